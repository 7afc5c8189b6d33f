//! File ingestion. Every file read is digested into the run report, and
//! parse failures are reported as `path:line:column`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use moonshine::denominator::{DenominatorError, ModuleCharacterData};
use moonshine::groups::{CommutingPair, GroupError, GroupTable};
use moonshine::hecke::{EquivariantFamily, HeckeError};
use moonshine::qseries::{parse_series, write_series};
use moonshine::{CycNum, Exponent, PuiseuxSeries, Rational, SeriesError};
use sha2::{Digest, Sha256};

use crate::report::InputDigest;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Input {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    Io {
        path: String,
        message: String,
    },
    /// Valid files whose contents the requested operation cannot use.
    Domain(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input {
                path,
                line,
                column,
                message,
            } => write!(f, "{path}:{line}:{column}: {message}"),
            CliError::Io { path, message } => write!(f, "{path}: {message}"),
            CliError::Domain(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn located(path: &Path, line: usize, column: usize, message: String) -> CliError {
    CliError::Input {
        path: path.display().to_string(),
        line,
        column,
        message,
    }
}

fn series_error(path: &Path, e: SeriesError) -> CliError {
    match e {
        SeriesError::Parse { line, column, message } => located(path, line, column, message),
        other => CliError::Domain(format!("{}: {other}", path.display())),
    }
}

fn group_error(path: &Path, e: GroupError) -> CliError {
    match e {
        GroupError::Parse { line, column, message } => located(path, line, column, message),
        other => CliError::Domain(format!("{}: {other}", path.display())),
    }
}

/// Reads inputs, remembering their digests in reading order.
#[derive(Debug, Default)]
pub struct Inputs {
    /// Series are truncated to `q^precision` on load.
    pub precision: Option<i64>,
    pub digests: Vec<InputDigest>,
}

impl Inputs {
    pub fn new(precision: Option<i64>) -> Self {
        Inputs {
            precision,
            digests: Vec::new(),
        }
    }

    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        self.digests.push(InputDigest {
            path: path.display().to_string(),
            sha256: format!("{:x}", Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes).map_err(|e| {
            let before = &e.as_bytes()[..e.utf8_error().valid_up_to()];
            let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
            let column = before.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
            located(path, line, column, "invalid UTF-8".into())
        })
    }

    pub fn series(&mut self, path: &Path) -> Result<PuiseuxSeries, CliError> {
        let text = self.read(path)?;
        let s = parse_series(&text).map_err(|e| series_error(path, e))?;
        Ok(match self.precision {
            Some(k) => s.truncate_exp(Exponent::from_integer(k)),
            None => s,
        })
    }

    pub fn group(&mut self, path: &Path) -> Result<GroupTable, CliError> {
        let text = self.read(path)?;
        GroupTable::parse(&text).map_err(|e| group_error(path, e))
    }

    pub fn character_data(&mut self, path: &Path) -> Result<ModuleCharacterData, CliError> {
        let text = self.read(path)?;
        let d = ModuleCharacterData::parse(&text).map_err(|e| match e {
            DenominatorError::Parse { line, column, message } => located(path, line, column, message),
            other => CliError::Domain(format!("{}: {other}", path.display())),
        })?;
        match self.precision {
            // gradings k/N sit at q^{k/N − 1}
            Some(q) if d.n() as i64 * (q + 1) < d.k_max() => {
                let k_max = d.n() as i64 * (q + 1);
                let mut out = ModuleCharacterData::new(d.n(), d.h_order(), k_max, d.p_max())
                    .map_err(|e| CliError::Domain(e.to_string()))?;
                for ((i, r, k, e), v) in d.entries().filter(|((_, _, k, _), _)| *k <= k_max) {
                    out.insert(i as i64, r as i64, k, e as u64, v.clone())
                        .map_err(|e| CliError::Domain(e.to_string()))?;
                }
                Ok(out)
            }
            _ => Ok(d),
        }
    }

    /// A family from a directory of `<g>_<h>.qs` files over `group`, or the
    /// single series of `input` on the trivial group.
    pub fn family(
        &mut self,
        group: Option<&Path>,
        dir: Option<&Path>,
        input: Option<&Path>,
    ) -> Result<EquivariantFamily, CliError> {
        match (dir, input) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either --family or --input, not both".into())),
            (None, None) => Err(CliError::Usage("one of --family or --input is required".into())),
            (None, Some(path)) => {
                if group.is_some() {
                    return Err(CliError::Usage("--group needs --family".into()));
                }
                Ok(EquivariantFamily::trivial(self.series(path)?))
            }
            (Some(dir), None) => {
                let group = group.ok_or_else(|| CliError::Usage("--family needs --group".into()))?;
                let group = self.group(group)?;
                self.family_dir(group, dir)
            }
        }
    }

    fn family_dir(&mut self, group: GroupTable, dir: &Path) -> Result<EquivariantFamily, CliError> {
        let io = |e: std::io::Error| CliError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        };
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(io)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()
            .map_err(io)?;
        files.retain(|p| p.extension().is_some_and(|x| x == "qs"));
        files.sort();
        if files.is_empty() {
            return Err(CliError::Domain(format!("{}: no .qs files", dir.display())));
        }
        let mut fam = EquivariantFamily::new(group.clone());
        let mut loaded = Vec::new();
        for path in files {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
            let pair = stem
                .split_once('_')
                .and_then(|(g, h)| Some((g.parse::<usize>().ok()?, h.parse::<usize>().ok()?)))
                .ok_or_else(|| CliError::Domain(format!("{}: file name must be <g>_<h>.qs", path.display())))?;
            let pair = CommutingPair::new(&group, pair.0, pair.1).map_err(|e| group_error(&path, e))?;
            let s = self.series(&path)?;
            fam.insert(pair, s.clone())
                .map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
            loaded.push((path, pair, s));
        }
        // two files for one class must agree
        for (path, pair, s) in &loaded {
            let stored = fam.get(*pair).map_err(|e| hecke_domain(&e))?;
            if let Some(e) = stored.first_difference(s) {
                return Err(CliError::Domain(format!(
                    "{}: disagrees with another file of the same class at q^{e}",
                    path.display()
                )));
            }
        }
        Ok(fam)
    }
}

pub fn hecke_domain(e: &HeckeError) -> CliError {
    CliError::Domain(e.to_string())
}

/// Integers print plainly, rationals as `n/d`, anything else as `L=...`.
pub fn fmt_cyc(c: &CycNum) -> String {
    match c.as_rational() {
        Some(r) if r.is_integer() => r.numer().to_string(),
        Some(r) => format!("{}/{}", r.numer(), r.denom()),
        None => c.to_string(),
    }
}

pub fn parse_cyc(s: &str) -> Option<CycNum> {
    if s.starts_with("L=") {
        s.parse().ok()
    } else {
        s.parse::<Rational>().ok().map(CycNum::from_rational)
    }
}

/// One `H_{m,n}` entry.
pub type HRow = ((u64, u64), CycNum);

/// `m n value` lines for a table of `H_{m,n}`.
pub fn write_h_table(rows: &[HRow]) -> String {
    let mut out = String::new();
    for ((m, n), v) in rows {
        out.push_str(&format!("{m} {n} {}\n", fmt_cyc(v)));
    }
    out
}

pub fn parse_h_table(src: &str) -> Result<Vec<HRow>, (usize, usize, String)> {
    let mut rows = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut parts = body.splitn(3, ' ');
        let m = parts.next().and_then(|t| t.parse().ok());
        let n = parts.next().and_then(|t| t.parse().ok());
        let v = parts.next().and_then(|t| parse_cyc(t.trim()));
        match (m, n, v) {
            (Some(m), Some(n), Some(v)) => rows.push(((m, n), v)),
            _ => return Err((i + 1, 1, "expected `m n value`".into())),
        }
    }
    Ok(rows)
}

pub fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn series_text(s: &PuiseuxSeries) -> String {
    write_series(s)
}
