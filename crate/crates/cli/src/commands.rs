//! One function per subcommand. Each reads its inputs through [`Inputs`],
//! appends result lines and checks to the report, and turns errors that only
//! reflect a short precision window into inconclusive checks.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use moonshine::denominator::{
    denominator_verify, fricke_monicity_suite, orbifold_partition, DenominatorError,
};
use moonshine::groups::{enumerate_components, CommutingPair, GroupTable};
use moonshine::hecke::{
    compose_by_isogenies, hecke_apply, hecke_compose_check, Comparison, EquivariantFamily, HeckeError,
};
use moonshine::monic::{
    leading_behavior, modular_equation, modular_roots, symmetry_check, trig_type_detect, weak_monicity_check,
    MonicError, MonicityReport,
};
use moonshine::replication::{
    bivarial, complete_replicability_check, extend_from_partial, extract_replicates, faber,
    replicability_check, ReplicationError,
};
use moonshine::{CycNum, Exponent, PuiseuxSeries, SeriesError, Verdict};

use crate::io::{fmt_cyc, series_text, write_h_table, write_output, CliError, Inputs};
use crate::report::RunReport;
use crate::{selftest, usage, Cli, Command};

/// Splits a library error into an inconclusive message or a hard error.
trait Split {
    fn split(self) -> Result<String, CliError>;
}

impl Split for SeriesError {
    fn split(self) -> Result<String, CliError> {
        match self {
            SeriesError::Inconclusive(m) => Ok(m),
            other => Err(CliError::Domain(other.to_string())),
        }
    }
}

impl Split for HeckeError {
    fn split(self) -> Result<String, CliError> {
        match self {
            HeckeError::Inconclusive(m) => Ok(m),
            HeckeError::Series(e) => e.split(),
            other => Err(CliError::Domain(other.to_string())),
        }
    }
}

impl Split for ReplicationError {
    fn split(self) -> Result<String, CliError> {
        match self {
            ReplicationError::Inconclusive(m) => Ok(m),
            e @ ReplicationError::Underdetermined { .. } => Ok(e.to_string()),
            ReplicationError::Series(e) => e.split(),
            ReplicationError::Hecke(e) => e.split(),
            other => Err(CliError::Domain(other.to_string())),
        }
    }
}

impl Split for MonicError {
    fn split(self) -> Result<String, CliError> {
        match self {
            MonicError::Inconclusive(m) => Ok(m),
            MonicError::Series(e) => e.split(),
            MonicError::Hecke(e) => e.split(),
            other => Err(CliError::Domain(other.to_string())),
        }
    }
}

impl Split for DenominatorError {
    fn split(self) -> Result<String, CliError> {
        match self {
            DenominatorError::Inconclusive(m) => Ok(m),
            DenominatorError::Series(e) => e.split(),
            DenominatorError::Monic(e) => e.split(),
            other => Err(CliError::Domain(other.to_string())),
        }
    }
}

/// `Some(value)`, or `None` after recording an inconclusive check.
fn attempt<T, E: Split>(r: &mut RunReport, name: &str, res: Result<T, E>) -> Result<Option<T>, CliError> {
    match res {
        Ok(v) => Ok(Some(v)),
        Err(e) => {
            let msg = e.split()?;
            r.check(name, Verdict::Inconclusive, None, msg);
            Ok(None)
        }
    }
}

fn emit(r: &mut RunReport, output: Option<&Path>, text: String) -> Result<(), CliError> {
    match output {
        Some(path) => {
            write_output(path, &text)?;
            r.line(format!("wrote {}", path.display()));
        }
        None => {
            for l in text.lines() {
                r.line(l.to_string());
            }
        }
    }
    Ok(())
}

fn window_of(s: &PuiseuxSeries) -> String {
    match s.precision() {
        Some(e) => format!("q^{e}"),
        None => "exact".into(),
    }
}

fn pair_in(group: &GroupTable, (g, h): (usize, usize)) -> Result<CommutingPair, CliError> {
    CommutingPair::new(group, g, h).map_err(|e| CliError::Domain(e.to_string()))
}

pub fn dispatch(cli: &Cli, r: &mut RunReport) -> Result<(), CliError> {
    let mut inp = Inputs::new(cli.precision);
    let res = run_command(cli, &mut inp, r);
    r.inputs = std::mem::take(&mut inp.digests);
    res
}

fn run_command(cli: &Cli, inp: &mut Inputs, r: &mut RunReport) -> Result<(), CliError> {
    match &cli.command {
        Command::Faber { input, n, output } => {
            let f = inp.series(input)?;
            if let Some(p) = attempt(r, "faber", faber(&f, *n))? {
                emit(r, output.as_deref(), format!("{p}\n"))?;
            }
        }
        Command::Bivarial { input, order, output } => {
            let f = inp.series(input)?;
            if let Some(t) = attempt(r, "bivarial", bivarial(&f, *order))? {
                let rows: Vec<((u64, u64), CycNum)> = t.iter().map(|(k, v)| (k, v.clone())).collect();
                let asym = rows.iter().find(|((m, n), v)| t.get(*n, *m) != Some(v));
                let (verdict, detail) = match asym {
                    Some(((m, n), _)) => (Verdict::Fail, format!("H_({m},{n}) differs from H_({n},{m})")),
                    None => (Verdict::Pass, String::new()),
                };
                r.check("H symmetric", verdict, Some(format!("m, n <= {order}")), detail);
                emit(r, output.as_deref(), write_h_table(&rows))?;
            }
        }
        Command::Replicates {
            input,
            t,
            max_index,
            output_dir,
        } => {
            let f = inp.series(input)?;
            if let Some(set) = attempt(r, "replicates", extract_replicates(&f, *t, *max_index))? {
                for s in 1..=*t {
                    let rep = set.get(s).expect("extracted up to t");
                    match output_dir {
                        Some(dir) => emit(r, Some(&dir.join(format!("rep_{s}.qs"))), series_text(rep))?,
                        None => {
                            r.line(format!("# replicate {s}"));
                            emit(r, None, series_text(rep))?;
                        }
                    }
                }
            }
        }
        Command::CheckReplicable { input, order, complete, t } => {
            let f = inp.series(input)?;
            let window = Some(format!("m, n <= {order}"));
            if let Some(rep) = attempt(r, "replicable", replicability_check(&f, *order))? {
                let detail = rep
                    .witness
                    .map(|(a, b)| format!("H{a:?} and H{b:?} share gcd and product but differ"))
                    .unwrap_or_default();
                r.check("replicable", rep.verdict, window.clone(), detail);
            }
            if *complete {
                if let Some(c) = attempt(r, "completely replicable", complete_replicability_check(&f, *t, *order))? {
                    let detail = c.findings.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join("; ");
                    let boxes = c.boxes.iter().map(|(t, b)| format!("t={t}:{b}")).collect::<Vec<_>>().join(" ");
                    r.check("completely replicable", c.verdict, Some(format!("boxes {boxes}")), detail);
                }
            }
        }
        Command::Extend7 { inputs, target, output } => {
            let mut partials: BTreeMap<u64, Vec<CycNum>> = BTreeMap::new();
            for (t, path) in inputs {
                let s = inp.series(path)?;
                let top = if s.is_exact() {
                    s.terms().last().map(|(n, _)| n).unwrap_or(0)
                } else {
                    s.precision_num() / s.denom() as i64
                };
                let mut v = vec![CycNum::zero()];
                for k in 1..=top {
                    v.push(s.coeff(Exponent::from_integer(k)).unwrap_or_else(CycNum::zero));
                }
                if partials.insert(*t, v).is_some() {
                    return Err(usage(format!("replicate {t} given twice")));
                }
            }
            match extend_from_partial(&partials, *target) {
                Ok(out) => {
                    r.check(
                        "extension consistent",
                        Verdict::Pass,
                        Some(format!("a_1..a_{target}")),
                        format!("{} determined equations verified", out.checks),
                    );
                    emit(r, output.as_deref(), series_text(out.replicates.base()))?;
                }
                Err(e @ ReplicationError::Inconsistent { .. }) => {
                    r.check("extension consistent", Verdict::Fail, None, e.to_string());
                }
                Err(e) => {
                    let msg = e.split()?;
                    r.check("extension consistent", Verdict::Inconclusive, None, msg);
                }
            }
        }
        Command::Hecke {
            group,
            family,
            input,
            n,
            pair,
            output,
        } => {
            let fam = inp.family(group.as_deref(), family.as_deref(), input.as_deref())?;
            let pair = pair_in(fam.group(), *pair)?;
            if let Some(s) = attempt(r, "hecke", hecke_apply(&fam, *n, pair))? {
                emit(r, output.as_deref(), series_text(&s))?;
            }
        }
        Command::HeckeComposeCheck {
            group,
            family,
            k,
            m,
            pair,
            top,
        } => {
            let fam = match family {
                Some(dir) => inp.family(Some(group), Some(dir), None)?,
                None => EquivariantFamily::random(&inp.group(group)?, cli.seed, *top),
            };
            let pairs = match pair {
                Some(p) => vec![pair_in(fam.group(), *p)?],
                None => fam.group().commuting_pairs(),
            };
            for p in pairs {
                compose_checks(r, &fam, *k, *m, p)?;
            }
        }
        Command::MonicCheck {
            group,
            family,
            input,
            pair,
            n_max,
        } => {
            let fam = inp.family(group.as_deref(), family.as_deref(), input.as_deref())?;
            let pair = pair_in(fam.group(), *pair)?;
            if let Some(reports) = attempt(r, "weak monicity", weak_monicity_check(&fam, pair, 1..=*n_max))? {
                monicity_checks(r, &reports);
            }
        }
        Command::ModularEq {
            group,
            family,
            input,
            pair,
            p,
            output,
        } => {
            let fam = inp.family(group.as_deref(), family.as_deref(), input.as_deref())?;
            let pair = pair_in(fam.group(), *pair)?;
            modular_checks(r, &fam, pair, *p, output.as_deref())?;
        }
        Command::Classify { input, n, g_order } => {
            let f = inp.series(input)?;
            classify(r, &f, *n, *g_order, cli.conductor_bound)?;
        }
        Command::Orbits { group } => {
            let g = inp.group(group)?;
            let comps = enumerate_components(&g);
            r.line(format!("classes {}", comps.classes.len()));
            r.line(format!("orbits {}", comps.orbits.len()));
            for (i, orbit) in comps.orbits.iter().enumerate() {
                let reps: Vec<String> = orbit
                    .iter()
                    .map(|&c| {
                        let p = comps.classes[c][0];
                        format!("({},{})", p.g, p.h)
                    })
                    .collect();
                r.line(format!("orbit {i}: {}", reps.join(" ")));
            }
        }
        Command::OrbifoldZ { data, k, l, m, output } => {
            let d = inp.character_data(data)?;
            emit(r, output.as_deref(), series_text(&orbifold_partition(&d, *k, *l, *m)))?;
        }
        Command::DenominatorCheck { data, window, powers } => {
            let d = inp.character_data(data)?;
            let powers: Vec<u64> = if powers.is_empty() {
                (1..=d.h_order() as u64).collect()
            } else {
                powers.clone()
            };
            let (p, q) = *window;
            if let Some(reports) = attempt(
                r,
                "denominator identity",
                denominator_verify(&d, powers, p, Exponent::from_integer(q)),
            )? {
                for rep in reports {
                    r.check(
                        format!("denominator identity for h^{}", rep.power),
                        rep.verdict,
                        Some(format!("p^{} q^{}", rep.window.0, rep.window.1)),
                        rep.reason,
                    );
                }
            }
        }
        Command::FrickeSuite { data, n_max, pair } => {
            let d = inp.character_data(data)?;
            if let Some(reports) = attempt(r, "weak monicity", fricke_monicity_suite(&d, *pair, 1..=*n_max))? {
                monicity_checks(r, &reports);
            }
        }
        Command::Selftest => {
            for c in selftest::run_all(cli.seed) {
                let verdict = if c.passed { Verdict::Pass } else { Verdict::Fail };
                let name = format!("criterion {}: {}", c.id, c.name);
                r.time(name.clone(), c.elapsed);
                r.check(name, verdict, None, c.detail);
            }
        }
    }
    Ok(())
}

fn compose_checks(
    r: &mut RunReport,
    fam: &EquivariantFamily,
    k: u64,
    m: u64,
    p: CommutingPair,
) -> Result<(), CliError> {
    let name = format!("T_{k} T_{m} at ({},{})", p.g, p.h);
    let start = Instant::now();
    let Some(cmp) = attempt(r, &name, hecke_compose_check(fam, k, m, p))? else {
        return Ok(());
    };
    r.check(&name, cmp.verdict, cmp.window.map(|w| format!("q^{w}")), mismatch(&cmp));
    let iso = format!("isogeny enumeration at ({},{})", p.g, p.h);
    if let Some((l, rr)) = attempt(r, &iso, compose_by_isogenies(fam, k, m, p))? {
        let by_triples = Comparison::new(l.clone(), rr.clone());
        let agrees = l.first_difference(&cmp.lhs).is_none() && rr.first_difference(&cmp.rhs).is_none();
        let verdict = match (by_triples.verdict, agrees) {
            (Verdict::Pass, true) => Verdict::Pass,
            (Verdict::Inconclusive, true) => Verdict::Inconclusive,
            _ => Verdict::Fail,
        };
        let detail = if agrees { mismatch(&by_triples) } else { "sums over triples differ from the operators".into() };
        r.check(iso, verdict, by_triples.window.map(|w| format!("q^{w}")), detail);
    }
    r.time(name, start.elapsed());
    Ok(())
}

fn mismatch(c: &Comparison) -> String {
    c.first_mismatch.map(|e| format!("first difference at q^{e}")).unwrap_or_default()
}

fn monicity_checks(r: &mut RunReport, reports: &[MonicityReport]) {
    for (i, rep) in reports.iter().enumerate() {
        let n = i + 1;
        let detail = match rep.first_failure {
            Some(e) => format!("residual at q^{e}"),
            None => format!("{n}·T_{n} f = {}", rep.polynomial),
        };
        r.check(
            format!("monic of degree {n}"),
            rep.verdict,
            Some(rep.window.map(|w| format!("q^{w}")).unwrap_or_else(|| "exact".into())),
            detail,
        );
    }
}

fn modular_checks(
    r: &mut RunReport,
    fam: &EquivariantFamily,
    pair: CommutingPair,
    p: u64,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let name = format!("F_{p} monic of degree {}", p + 1);
    let eq = match modular_equation(fam, pair, p) {
        Ok(eq) => eq,
        Err(MonicError::NotMonic { k, exponent }) => {
            r.check(name, Verdict::Fail, None, format!("e_{k} leaves a residual at q^{exponent}"));
            return Ok(());
        }
        Err(e) => {
            let msg = e.split()?;
            r.check(name, Verdict::Inconclusive, None, msg);
            return Ok(());
        }
    };
    let shape = eq.is_monic_in_x() && eq.x_degree() == Some(p as usize + 1);
    r.check(name, if shape { Verdict::Pass } else { Verdict::Fail }, None, "");
    r.check(format!("F_{p} symmetric"), symmetry_check(&eq), None, "");
    let y = fam.get(pair).map_err(|e| CliError::Domain(e.to_string()))?;
    let roots = modular_roots(fam, pair, p).map_err(|e| CliError::Domain(e.to_string()))?;
    let mut verdict = Verdict::Pass;
    let mut detail = String::new();
    let mut windows = Vec::new();
    for (i, root) in roots.iter().enumerate() {
        let v = eq.eval(root, &y);
        windows.push(window_of(&v));
        if let Some((e, _)) = v.iter().find(|(_, c)| !c.is_zero()) {
            verdict = Verdict::Fail;
            detail = format!("root {i} leaves q^{e}");
            break;
        }
        if v.precision().is_some_and(|w| w < Exponent::from_integer(0)) {
            verdict = Verdict::Inconclusive;
            detail = format!("root {i} is only known below q^0");
        }
    }
    r.check(format!("F_{p} vanishes on roots"), verdict, Some(windows.join(" ")), detail);
    emit(r, output, eq.to_text())
}

fn classify(r: &mut RunReport, f: &PuiseuxSeries, n: u64, g_order: u64, bound: Option<u64>) -> Result<(), CliError> {
    let t = trig_type_detect(f);
    let show = |c: &Option<CycNum>| c.as_ref().map(fmt_cyc).unwrap_or_else(|| "?".into());
    match t.verdict {
        Verdict::Pass => r.line(format!("trigonometric: zeta {} a0 {}", show(&t.zeta), show(&t.a0))),
        Verdict::Inconclusive => r.line(format!(
            "consistent with trigonometric type on {}: zeta {} a0 {} ({})",
            window_of(f),
            show(&t.zeta),
            show(&t.a0),
            t.reason
        )),
        Verdict::Fail => r.line(format!(
            "not trigonometric: {}; only the genus-zero branch remains, which is not certified here",
            t.reason
        )),
    }
    if let Some((a, b)) = t.transform {
        r.line(format!("transform tau -> {a}*tau + {b}"));
    }
    let lb = match leading_behavior(f, g_order, n) {
        Ok(lb) => lb,
        Err(MonicError::Domain(m)) => {
            r.line(format!("leading behaviour: {m}"));
            return Ok(());
        }
        Err(e) => return Err(CliError::Domain(e.to_string())),
    };
    let root = match bound {
        Some(b) => lb.zeta.classify_root_of_unity_bounded(b),
        None => lb.root,
    };
    let root = match root {
        Some((order, k)) => format!("e({k}/{order})"),
        None => "not a root of unity within the bound".into(),
    };
    r.line(format!("leading coefficient {} = {root}", fmt_cyc(&lb.zeta)));
    let mut notes = Vec::new();
    if lb.c.is_none() {
        notes.push("leading exponent times |g| is not an integer".to_string());
    }
    if !lb.root_ok {
        notes.push(format!("leading coefficient is not a {}-th root of unity", 2 * n));
    }
    if let Some(w) = lb.support_witness {
        notes.push(format!("q^{w} is not a multiple of the leading exponent"));
    }
    if lb.root_ok {
        notes.push(format!("zeta^{n} = 1: {}", lb.root_divides_n));
    }
    r.check("leading behaviour", lb.verdict(), None, notes.join("; "));
    Ok(())
}
