//! One handler per subcommand. Every handler returns (exit code, body);
//! bodies are assembled single-threaded so identical inputs give
//! byte-identical reports no matter how many workers computed the parts.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;

use gapcert::congruence::{congruent_mod, sturm_bound, two_adically_close, Modulus};
use gapcert::elliptic::{counter_by_name, family_et, point_order, ReductionType};
use gapcert::fixtures::FixtureSet;
use gapcert::gaps::{gap_scan, Certificate, GapConvention, HypothesisUnits, Weight2Isogeny};
use gapcert::intervals::{
    estimate_constant, parse_c, parse_delta, predicate_by_name, scan_fixed_c, sweep_rows,
};
use gapcert::qseries::{from_curve, load_qexp, store_qexp, QExpRecord, QExpansion};
use gapcert::verify::run_all;
use gapcert::{Error, Result};

use crate::{BoundMode, Command, Format};

pub fn run(cmd: &Command, set: &FixtureSet, format: Format) -> Result<(i32, String)> {
    match cmd {
        Command::Ap {
            curve,
            bound,
            counter,
        } => cmd_ap(set, curve, *bound, counter, format),
        Command::Qexp {
            curve,
            form,
            bound,
            counter,
        } => cmd_qexp(set, curve.as_deref(), form.as_deref(), *bound, counter, format),
        Command::Sturm {
            weight1,
            weight2,
            level,
        } => cmd_sturm(*weight1, *weight2, *level, format),
        Command::Congr {
            form1,
            form2,
            modulus_exp,
            check,
            bound,
        } => cmd_congr(set, form1, form2, *modulus_exp, *check, *bound, format),
        Command::Close {
            form1,
            form2,
            modulus_exp,
            s,
            prime_bound,
        } => cmd_close(set, form1, form2, *modulus_exp, *s, *prime_bound, format),
        Command::Scan {
            kind,
            level,
            xmin,
            xmax,
            c,
            delta,
            estimate,
        } => cmd_scan(kind, *level, *xmin, *xmax, c.as_deref(), delta, *estimate, format),
        Command::Gaps {
            curve,
            nmin,
            nmax,
            bound,
            convention,
            certify,
            counter,
        } => cmd_gaps(
            set,
            curve,
            *nmin,
            *nmax,
            *bound,
            convention,
            certify.as_deref(),
            counter,
            format,
        ),
        Command::EtFamily { count } => cmd_et_family(*count, format),
        Command::VerifyPaper => cmd_verify(set, format),
    }
}

/// A form argument names a stored prefix, a curve (whose newform gets
/// computed on demand), or a q-expansion JSON file.
enum Source {
    Stored(QExpansion),
    Curve(gapcert::fixtures::FixtureCurve),
}

impl Source {
    fn weight_level(&self) -> (u32, u64) {
        match self {
            Source::Stored(f) => (f.weight(), f.level()),
            Source::Curve(fc) => (2, fc.conductor),
        }
    }

    fn materialize(self, bound: u64) -> Result<QExpansion> {
        match self {
            Source::Stored(f) => Ok(f),
            Source::Curve(fc) => {
                from_curve(&fc.curve, fc.conductor, bound, counter_by_name("auto")?)
            }
        }
    }
}

fn resolve(set: &FixtureSet, name: &str) -> Result<Source> {
    if let Ok(f) = set.form(name) {
        return Ok(Source::Stored(f.clone()));
    }
    if let Ok(fc) = set.curve(name) {
        return Ok(Source::Curve(fc.clone()));
    }
    let path = Path::new(name);
    if path.exists() {
        let record: QExpRecord = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        return Ok(Source::Stored(load_qexp(&record)?));
    }
    Err(Error::unknown("form, curve, or file", name))
}

fn json_body(value: &impl serde::Serialize) -> Result<String> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    Ok(body)
}

fn parse_convention(s: &str) -> Result<GapConvention> {
    match s {
        "after-nonzero" => Ok(GapConvention::AfterNonzero),
        "literal" => Ok(GapConvention::Literal),
        other => Err(Error::unknown("gap convention", other)),
    }
}

fn csv_unsupported(report: &str) -> Error {
    Error::domain(format!("no CSV schema for the {report} report"))
}

fn cmd_ap(
    set: &FixtureSet,
    curve: &str,
    bound: u64,
    counter: &str,
    format: Format,
) -> Result<(i32, String)> {
    let fc = set.curve(curve)?;
    let counter = counter_by_name(counter)?;
    let mut rows = Vec::new();
    for p in gapcert::arith::primes_up_to(bound) {
        let a = fc.curve.ap(p, counter)?;
        rows.push((p, a, fc.curve.reduction_type(p).to_string()));
    }
    let body = match format {
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(p, a, r)| json!({"p": p, "a_p": a, "reduction": r}))
                .collect();
            json_body(&json!({"curve": fc.label, "table": items}))?
        }
        Format::Csv => {
            let mut out = String::from("p,a_p,reduction\n");
            for (p, a, r) in &rows {
                writeln!(out, "{p},{a},{r}").expect("string write");
            }
            out
        }
        Format::Text => {
            let mut out = format!("{}: {}\n", fc.label, fc.curve.equation());
            for (p, a, r) in &rows {
                writeln!(out, "a_{p} = {a}  ({r})").expect("string write");
            }
            out
        }
    };
    Ok((0, body))
}

fn cmd_qexp(
    set: &FixtureSet,
    curve: Option<&str>,
    form: Option<&str>,
    bound: Option<u64>,
    counter: &str,
    format: Format,
) -> Result<(i32, String)> {
    let f = match (curve, form) {
        (Some(label), None) => {
            let fc = set.curve(label)?;
            from_curve(
                &fc.curve,
                fc.conductor,
                bound.unwrap_or(50),
                counter_by_name(counter)?,
            )?
        }
        (None, Some(label)) => {
            let f = set.form(label)?.clone();
            if let Some(b) = bound {
                if b > f.bound() {
                    return Err(Error::PastTrustedBound { n: b, bound: f.bound() });
                }
            }
            f
        }
        _ => unreachable!("clap enforces exactly one source"),
    };
    let mut record = store_qexp(&f);
    if let Some(b) = bound {
        record.coefficients.truncate(b as usize + 1);
    }
    let body = match format {
        Format::Json => json_body(&record)?,
        Format::Csv => {
            let mut out = String::from("n,a_n\n");
            for (n, a) in record.coefficients.iter().enumerate() {
                writeln!(out, "{n},{a}").expect("string write");
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "{} (weight {}, level {}, trusted to {})\n",
                record.label.as_deref().unwrap_or("q-expansion"),
                record.weight,
                record.level,
                record.coefficients.len() - 1
            );
            for (n, a) in record.coefficients.iter().enumerate() {
                if a != "0" {
                    writeln!(out, "a({n}) = {a}").expect("string write");
                }
            }
            out
        }
    };
    Ok((0, body))
}

fn cmd_sturm(weight1: u32, weight2: u32, level: u64, format: Format) -> Result<(i32, String)> {
    let bound = sturm_bound(weight1, weight2, level)?;
    let body = match format {
        Format::Json => json_body(&json!({
            "weight1": weight1, "weight2": weight2, "level": level, "bound": bound
        }))?,
        Format::Csv => return Err(csv_unsupported("sturm")),
        Format::Text => format!("sturm({weight1}, {weight2}, {level}) = {bound}\n"),
    };
    Ok((0, body))
}

fn cmd_congr(
    set: &FixtureSet,
    form1: &str,
    form2: &str,
    modulus_exp: u32,
    check: BoundMode,
    bound: Option<u64>,
    format: Format,
) -> Result<(i32, String)> {
    let s1 = resolve(set, form1)?;
    let s2 = resolve(set, form2)?;
    let bound = match check {
        BoundMode::Explicit => bound.expect("clap requires --bound with --check explicit"),
        BoundMode::Sturm => {
            let (w1, l1) = s1.weight_level();
            let (w2, l2) = s2.weight_level();
            sturm_bound(w1, w2, num_integer::lcm(l1, l2))?
        }
    };
    let f1 = s1.materialize(bound)?;
    let f2 = s2.materialize(bound)?;
    let report = congruent_mod(&f1, &f2, Modulus::two_to(modulus_exp)?, bound)?;
    let exit = i32::from(!report.congruent);
    let body = match format {
        Format::Json => json_body(&json!({
            "form1": form1, "form2": form2, "report": report
        }))?,
        Format::Csv => return Err(csv_unsupported("congruence")),
        Format::Text => {
            let mut out = format!(
                "{form1} vs {form2} (mod 2^{modulus_exp}) to {}\n",
                report.checked_bound
            );
            writeln!(out, "congruent: {}", report.congruent).expect("string write");
            match report.first_failure_index {
                Some(n) => writeln!(out, "first failure: n = {n}").expect("string write"),
                None => writeln!(
                    out,
                    "certified: {} (sturm bound {})",
                    report.certified(),
                    report.sturm_bound
                )
                .expect("string write"),
            }
            out
        }
    };
    Ok((exit, body))
}

fn cmd_close(
    set: &FixtureSet,
    form1: &str,
    form2: &str,
    modulus_exp: u32,
    s: u32,
    prime_bound: u64,
    format: Format,
) -> Result<(i32, String)> {
    let f1 = resolve(set, form1)?.materialize(prime_bound)?;
    let f2 = resolve(set, form2)?.materialize(prime_bound)?;
    let report = two_adically_close(&f1, &f2, modulus_exp, s, prime_bound)?;
    let exit = i32::from(!report.close);
    let body = match format {
        Format::Json => json_body(&json!({
            "form1": form1, "form2": form2, "m": modulus_exp, "s": s, "report": report
        }))?,
        Format::Csv => return Err(csv_unsupported("closeness")),
        Format::Text => {
            let mut out = format!("{form1} vs {form2}: m = {modulus_exp}, s = {s}\n");
            writeln!(out, "close: {}", report.close).expect("string write");
            writeln!(
                out,
                "weight clause: {}, alpha clause: {} (alpha required {})",
                report.weight_clause_ok, report.alpha_clause_ok, report.alpha_required
            )
            .expect("string write");
            writeln!(out, "primes checked: {:?}", report.primes_checked).expect("string write");
            if !report.prime_failures.is_empty() {
                writeln!(out, "prime failures: {:?}", report.prime_failures)
                    .expect("string write");
            }
            out
        }
    };
    Ok((exit, body))
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    kind: &str,
    level: u64,
    xmin: u64,
    xmax: u64,
    c: Option<&str>,
    delta: &str,
    estimate: bool,
    format: Format,
) -> Result<(i32, String)> {
    let predicate = predicate_by_name(kind)?;
    let delta = parse_delta(delta)?;
    let report = if estimate {
        estimate_constant(level, xmin, xmax, delta, predicate)?
    } else {
        let c = parse_c(c.expect("clap requires --c without --estimate"))?;
        scan_fixed_c(level, xmin, xmax, &c, delta, predicate)?
    };
    let exit = i32::from(report.failure_count != 0);
    let body = match format {
        Format::Json => json_body(&report)?,
        Format::Csv => {
            let mut out = String::from("X,next_qualifying_n,gap,gap/X^(1/4)\n");
            for row in sweep_rows(level, xmin, xmax, predicate)? {
                writeln!(
                    out,
                    "{},{},{},{:.6}",
                    row.x, row.next_qualifying_n, row.gap, row.ratio
                )
                .expect("string write");
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "{} scan, level {level}, X in [{xmin}, {xmax}], c = {}, delta = {}\n",
                report.predicate, report.c, report.delta
            );
            writeln!(
                out,
                "failures: {}, max gap: {}",
                report.failure_count, report.max_gap_observed
            )
            .expect("string write");
            for (x, n) in report.witness_sample.iter().take(4) {
                writeln!(out, "witness: {x} -> {n}").expect("string write");
            }
            if let Some((x, gap)) = report.max_ratio_at {
                writeln!(out, "widest relative gap at X = {x} (gap {gap})")
                    .expect("string write");
            }
            out
        }
    };
    Ok((exit, body))
}

#[allow(clippy::too_many_arguments)]
fn cmd_gaps(
    set: &FixtureSet,
    curve: &str,
    nmin: u64,
    nmax: u64,
    bound: Option<u64>,
    convention: &str,
    certify: Option<&str>,
    counter: &str,
    format: Format,
) -> Result<(i32, String)> {
    let fc = set.curve(curve)?;
    let bound = bound.unwrap_or(nmax);
    let f = from_curve(&fc.curve, fc.conductor, bound, counter_by_name(counter)?)?;
    let convention = parse_convention(convention)?;

    let certificate: Option<Box<dyn Certificate>> = match certify {
        None => None,
        Some("weight2") => Some(Box::new(Weight2Isogeny::new(
            &fc.curve,
            fc.has_cyclic_4_isogeny,
        )?)),
        Some("hypothesis") => {
            let evidence = congruent_mod(
                &f,
                &f,
                Modulus::two_to(2)?,
                sturm_bound(2, 2, fc.conductor)?,
            )?;
            let mult2 = matches!(fc.curve.reduction_type(2), ReductionType::Multiplicative);
            Some(Box::new(HypothesisUnits::from_report(
                fc.conductor,
                fc.conductor,
                &evidence,
                fc.has_cyclic_4_isogeny,
                mult2,
            )?))
        }
        Some(other) => return Err(Error::unknown("certificate", other)),
    };
    let report = gap_scan(&f, nmin, nmax, convention, certificate.as_deref())?;
    let exit = i32::from(!report.certificate_violations.is_empty());
    let body = match format {
        Format::Json => json_body(&report)?,
        Format::Csv => {
            let mut out = String::from("n,run_length,ratio,certified,coefficient_nonzero\n");
            for r in &report.records {
                let certified = r.certified.map(|b| b.to_string()).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{:.6},{},{}",
                    r.n, r.run_length, r.ratio, certified, r.coefficient_nonzero
                )
                .expect("string write");
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "{}: zero runs in [{nmin}, {nmax}] ({:?})\n",
                report.form_label, report.convention
            );
            writeln!(out, "runs recorded: {}", report.records.len()).expect("string write");
            if let (Some(r), Some((n, len))) = (report.max_ratio, report.max_ratio_at) {
                writeln!(out, "max run/n^(1/4) = {r:.6} at n = {n} (run {len})")
                    .expect("string write");
            }
            if report.truncated_tail {
                writeln!(out, "final run truncated by the trusted bound").expect("string write");
            }
            if let Some(name) = &report.certificate {
                writeln!(
                    out,
                    "certificate {name}: {} violations",
                    report.certificate_violations.len()
                )
                .expect("string write");
            }
            out
        }
    };
    Ok((exit, body))
}

fn cmd_et_family(count: i64, format: Format) -> Result<(i32, String)> {
    if count < 1 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    let mut rows = Vec::new();
    for t in 1..=count {
        let member = family_et(&BigRational::from(BigInt::from(t)))?;
        let order = point_order(&member.curve, &member.torsion_point, 8)?;
        rows.push((
            t,
            member.curve.invariants().j.to_string(),
            order.map_or_else(|| "?".into(), |o| o.to_string()),
        ));
    }
    let body = match format {
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(t, j, o)| json!({"t": t, "j": j, "torsion_order": o}))
                .collect();
            json_body(&items)?
        }
        Format::Csv => {
            let mut out = String::from("t,j,torsion_order\n");
            for (t, j, o) in &rows {
                writeln!(out, "{t},{j},{o}").expect("string write");
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for (t, j, o) in &rows {
                writeln!(out, "t = {t}: order({{t, t}}) = {o}, j = {j}").expect("string write");
            }
            out
        }
    };
    Ok((0, body))
}

fn cmd_verify(set: &FixtureSet, format: Format) -> Result<(i32, String)> {
    let results = run_all(set);
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();
    let exit = i32::from(!failed.is_empty());
    let body = match format {
        Format::Json => json_body(&results)?,
        Format::Csv => return Err(csv_unsupported("verification")),
        Format::Text => {
            let mut out = String::new();
            for r in &results {
                out.push_str(&r.line());
                out.push('\n');
            }
            if failed.is_empty() {
                writeln!(out, "all {} checks passed", results.len()).expect("string write");
            } else {
                writeln!(out, "failed: {}", failed.join(", ")).expect("string write");
            }
            out
        }
    };
    Ok((exit, body))
}
