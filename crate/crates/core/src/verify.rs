//! End-to-end verification: each check reproduces one published
//! quantity or pinned invariant from scratch and reports pass/fail
//! with timing. The CLI's verify subcommand and the acceptance tests
//! both run these, so there is exactly one definition of "the build
//! reproduces the source material".
//!
//! A check that returns `passed = false` verified something and found
//! it false; infrastructure problems (missing fixtures, arithmetic
//! errors) also land in `passed = false` but keep the error text in
//! `detail`, since a verification run must never die half-way.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::{is_prime, is_sum_of_two_squares, primes_up_to};
use crate::congruence::{
    alpha, congruent_mod, mod4_power_pattern, mod4_prime_class, sturm_bound, two_adically_close,
    Modulus,
};
use crate::elliptic::counting::LegendreSum;
use crate::elliptic::{counter_by_name, family_et, point_order, ReductionType};
use crate::fixtures::FixtureSet;
use crate::gaps::{
    gap_scan, Certificate, CongruentSquares, GapConvention, HypothesisUnits, Weight2Isogeny,
};
use crate::intervals::{
    estimate_constant, parse_c, parse_delta, predicate_by_name, scan_fixed_c,
};
use crate::qseries::{eisenstein_e4, from_curve, series_multiply, store_qexp, QExpansion};
use crate::Result;

/// Outcome of one named check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl CheckResult {
    /// One-line rendering: "PASS name (12 ms): detail".
    pub fn line(&self) -> String {
        format!(
            "{} {} ({} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.millis,
            self.detail
        )
    }
}

fn run(name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    let start = Instant::now();
    let outcome = body();
    let millis = start.elapsed().as_millis();
    match outcome {
        Ok((passed, detail)) => CheckResult {
            name,
            passed,
            detail,
            millis,
        },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
            millis,
        },
    }
}

/// Every check, in order. All of them run even if early ones fail.
pub fn run_all(set: &FixtureSet) -> Vec<CheckResult> {
    vec![
        check_coefficients(set),
        check_sturm(),
        check_prefix_congruences(set),
        check_mod4_classification(set),
        check_eisenstein_products(set),
        check_certificate_soundness(set),
        check_interval_regression(set),
        check_alpha_et_family(),
        check_property_oracles(set),
    ]
}

/// Point counts reproduce every stored coefficient of the three
/// published weight-2 prefixes.
pub fn check_coefficients(set: &FixtureSet) -> CheckResult {
    run("coefficient-reproduction", || {
        let auto = counter_by_name("auto")?;
        let mut bad = Vec::new();
        let mut total = 0usize;
        for (curve_label, form_label) in
            [("24a3", "f_24_2"), ("32a4", "f_32_2"), ("15a7", "f_15_2")]
        {
            let fc = set.curve(curve_label)?;
            let published = set.form(form_label)?;
            let computed = from_curve(&fc.curve, fc.conductor, published.bound(), auto)?;
            for n in 1..=published.bound() {
                total += 1;
                if computed.coeff(n)? != published.coeff(n)? {
                    bad.push(format!(
                        "{curve_label}: a({n}) computed {} but stored {}",
                        computed.coeff(n)?,
                        published.coeff(n)?
                    ));
                }
            }
        }
        if bad.is_empty() {
            Ok((true, format!("{total} coefficients across 3 curves reproduced")))
        } else {
            Ok((false, bad.join("; ")))
        }
    })
}

/// The three stated Sturm bounds come out exactly.
pub fn check_sturm() -> CheckResult {
    run("sturm-bounds", || {
        let cases = [(2u32, 4u32, 24u64, 128u64), (2, 10, 24, 320), (2, 4, 32, 256)];
        let mut bad = Vec::new();
        for (w1, w2, n, want) in cases {
            let got = sturm_bound(w1, w2, n)?;
            if got != want {
                bad.push(format!("sturm({w1},{w2},{n}) = {got}, want {want}"));
            }
        }
        if bad.is_empty() {
            Ok((true, "128 / 320 / 256 exact".into()))
        } else {
            Ok((false, bad.join("; ")))
        }
    })
}

/// Mod-4 congruences over the printed prefixes: three pairs congruent,
/// the level-15 pair failing first at n = 2.
pub fn check_prefix_congruences(set: &FixtureSet) -> CheckResult {
    run("prefix-congruences", || {
        let auto = counter_by_name("auto")?;
        let m4 = Modulus::two_to(2)?;
        let mut bad = Vec::new();

        let curve = |l: &str| set.curve(l);
        let f24 = from_curve(&curve("24a3")?.curve, 24, 19, auto)?;
        let f32 = from_curve(&curve("32a4")?.curve, 32, 19, auto)?;
        let f15 = from_curve(&curve("15a7")?.curve, 15, 11, auto)?;

        for (f_e, label, bound) in [
            (&f24, "f_24_4", 19u64),
            (&f24, "f_12_10", 13),
            (&f32, "f_32_4_3", 19),
        ] {
            let rep = congruent_mod(f_e, set.form(label)?, m4, bound)?;
            if !rep.congruent {
                bad.push(format!(
                    "vs {label}: first failure at {:?}",
                    rep.first_failure_index
                ));
            }
        }
        let rep15 = congruent_mod(&f15, set.form("f_15_4")?, m4, 11)?;
        if rep15.congruent || rep15.first_failure_index != Some(2) {
            bad.push(format!(
                "level-15 pair: expected first failure at 2, got {:?}",
                rep15.first_failure_index
            ));
        }
        if bad.is_empty() {
            Ok((true, "3 congruent prefixes; level-15 pair fails first at n = 2".into()))
        } else {
            Ok((false, bad.join("; ")))
        }
    })
}

/// Every good odd p < 10^4 on every 4-isogeny curve lands in the
/// residue class forced by the reducible mod-4 representation:
/// a_p = 2 (mod 4) at p = 1 (mod 4), a_p = 0 (mod 4) at p = 3 (mod 4).
pub fn check_mod4_classification(set: &FixtureSet) -> CheckResult {
    run("mod4-classification", || {
        let counter = LegendreSum;
        let mut bad = Vec::new();
        let mut checked = 0usize;
        for fc in set.curves() {
            if !fc.has_cyclic_4_isogeny {
                continue;
            }
            for p in primes_up_to(9_999) {
                if p == 2 || !matches!(fc.curve.reduction_type(p), ReductionType::Good) {
                    continue;
                }
                let a = fc.curve.ap_good(p, &counter)?;
                let verdict = mod4_prime_class(a, p)?;
                checked += 1;
                if !verdict.ok {
                    bad.push(format!(
                        "{}: a_{p} = {a} not {} (mod 4)",
                        fc.label, verdict.residue
                    ));
                }
            }
        }
        if bad.is_empty() {
            Ok((true, format!("{checked} good odd primes over 4 curves, zero exceptions")))
        } else {
            Ok((false, bad.join("; ")))
        }
    })
}

/// Multiplying by E4 fixes everything mod 4: f * E4^n = f (mod 4) for
/// n = 1, 2, 3, certified at each product's Sturm bound (all <= 2000).
pub fn check_eisenstein_products(set: &FixtureSet) -> CheckResult {
    run("eisenstein-products", || {
        let auto = counter_by_name("auto")?;
        let fc = set.curve("e0")?;
        let f = from_curve(&fc.curve, fc.conductor, 2000, auto)?;
        let e4 = eisenstein_e4(2000);
        let m4 = Modulus::two_to(2)?;
        let mut bad = Vec::new();
        let mut sturms = Vec::new();
        let mut prod = f.clone();
        for n in 1u32..=3 {
            prod = series_multiply(&prod, &e4, 2000)?;
            let rep = congruent_mod(&prod, &f, m4, 2000)?;
            sturms.push(rep.sturm_bound.to_string());
            if !rep.congruent {
                bad.push(format!(
                    "f*E4^{n}: first failure at {:?}",
                    rep.first_failure_index
                ));
            } else if !rep.certified() {
                bad.push(format!(
                    "f*E4^{n}: checked 2000 < Sturm {}",
                    rep.sturm_bound
                ));
            }
        }
        if bad.is_empty() {
            Ok((true, format!(
                "f*E4^n = f (mod 4) to 2000 for n = 1..3, certified at Sturm {}",
                sturms.join("/")
            )))
        } else {
            Ok((false, bad.join("; ")))
        }
    })
}

/// All three certificate families re-checked against coefficients
/// computed to 10^5: zero violations permitted.
pub fn check_certificate_soundness(set: &FixtureSet) -> CheckResult {
    run("certificate-soundness", || {
        const BOUND: u64 = 100_000;
        let auto = counter_by_name("auto")?;
        let m4 = Modulus::two_to(2)?;
        let mut parts = Vec::new();
        let mut bad = Vec::new();

        let mut audit = |label: &'static str,
                         f: &QExpansion,
                         cert: &dyn Certificate|
         -> Result<()> {
            let rep = gap_scan(f, 1, BOUND, GapConvention::AfterNonzero, Some(cert))?;
            let certified: u64 = (1..=BOUND)
                .filter(|&n| cert.certifies(n).unwrap_or(false))
                .count() as u64;
            if rep.certificate_violations.is_empty() {
                parts.push(format!("{label}: {certified} certified, 0 violations"));
            } else {
                bad.push(format!(
                    "{label}: violations at {:?}",
                    &rep.certificate_violations[..rep.certificate_violations.len().min(5)]
                ));
            }
            Ok(())
        };

        let fc24 = set.curve("24a3")?;
        let f24 = from_curve(&fc24.curve, fc24.conductor, BOUND, auto)?;
        let w2 = Weight2Isogeny::new(&fc24.curve, fc24.has_cyclic_4_isogeny)?;
        audit("weight2/24a3", &f24, &w2)?;

        let self24 = congruent_mod(&f24, &f24, m4, sturm_bound(2, 2, 24)?)?;
        let mult2_24 = matches!(fc24.curve.reduction_type(2), ReductionType::Multiplicative);
        let hyp24 = HypothesisUnits::from_report(24, 24, &self24, true, mult2_24)?;
        audit("hypothesis/24a3", &f24, &hyp24)?;

        let fc42 = set.curve("e0")?;
        let f42 = from_curve(&fc42.curve, fc42.conductor, BOUND, auto)?;
        let prod = series_multiply(&f42, &eisenstein_e4(600), 600)?;
        let evidence = congruent_mod(&prod, &f42, m4, sturm_bound(2, 6, 42)?)?;
        let congruent = CongruentSquares::from_report(42, 42, &evidence, true)?;
        audit("congruent/e0", &f42, &congruent)?;

        let mult2_42 = matches!(fc42.curve.reduction_type(2), ReductionType::Multiplicative);
        let hyp42 = HypothesisUnits::from_report(42, 42, &evidence, true, mult2_42)?;
        audit("hypothesis/e0", &f42, &hyp42)?;

        if bad.is_empty() {
            Ok((true, parts.join("; ")))
        } else {
            Ok((false, bad.join("; ")))
        }
    })
}

/// The frozen scan constant is still exactly minimal, the fixed-c scan
/// has zero failures, and the level-15 pair is 2-adically close at
/// (m, s) = (2, 1) over every prime index in trust.
pub fn check_interval_regression(set: &FixtureSet) -> CheckResult {
    run("interval-regression", || {
        let reg = set.regression();
        let s2s = predicate_by_name("s2s")?;
        let delta = parse_delta(&reg.s2s_minimal_c.delta)?;
        let mut bad = Vec::new();

        let est = estimate_constant(
            reg.s2s_minimal_c.level,
            reg.s2s_minimal_c.x_min,
            reg.s2s_minimal_c.x_max,
            delta,
            s2s,
        )?;
        if est.c != reg.s2s_minimal_c.c {
            bad.push(format!(
                "minimal c drifted: swept {} but frozen {}",
                est.c, reg.s2s_minimal_c.c
            ));
        }
        if est.max_gap_observed != reg.s2s_minimal_c.max_gap {
            bad.push(format!(
                "max gap drifted: swept {} but frozen {}",
                est.max_gap_observed, reg.s2s_minimal_c.max_gap
            ));
        }
        let fixed = scan_fixed_c(
            reg.s2s_minimal_c.level,
            reg.s2s_minimal_c.x_min,
            reg.s2s_minimal_c.x_max,
            &parse_c(&reg.s2s_minimal_c.c)?,
            delta,
            s2s,
        )?;
        if fixed.failure_count != 0 {
            bad.push(format!("{} failures at the frozen c", fixed.failure_count));
        }

        let auto = counter_by_name("auto")?;
        let fc15 = set.curve("15a7")?;
        let f15 = from_curve(&fc15.curve, fc15.conductor, 11, auto)?;
        let close = two_adically_close(&f15, set.form("f_15_4")?, 2, 1, 11)?;
        if !close.close {
            bad.push(format!("level-15 pair not close: {close:?}"));
        }
        if close.primes_checked != [7, 11] {
            bad.push(format!(
                "expected prime indices [7, 11], checked {:?}",
                close.primes_checked
            ));
        }

        if bad.is_empty() {
            Ok((true, format!(
                "c = {} minimal over [{}, {}], gap <= {}; level-15 pair close at m=2, s=1 on p in {:?}",
                reg.s2s_minimal_c.c,
                reg.s2s_minimal_c.x_min,
                reg.s2s_minimal_c.x_max,
                reg.s2s_minimal_c.max_gap,
                close.primes_checked
            )))
        } else {
            Ok((false, bad.join("; ")))
        }
    })
}

/// The alpha table on -2..=10 and the 4-torsion family: 50 members,
/// every marked point of order exactly 4, more than 40 distinct
/// j-invariants.
pub fn check_alpha_et_family() -> CheckResult {
    run("alpha-et-family", || {
        let expected: [i64; 13] = [0, 0, 0, 0, 1, 1, 2, 3, 4, 5, 6, 7, 8];
        let mut bad = Vec::new();
        for (i, n) in (-2i64..=10).enumerate() {
            if alpha(n) != expected[i] {
                bad.push(format!("alpha({n}) = {}, want {}", alpha(n), expected[i]));
            }
        }
        let mut js = BTreeSet::new();
        for k in 1i64..=50 {
            let member = family_et(&BigRational::from(BigInt::from(k)))?;
            if point_order(&member.curve, &member.torsion_point, 8)? != Some(4) {
                bad.push(format!("t = {k}: marked point not of order 4"));
            }
            js.insert(member.curve.invariants().j);
        }
        let distinct = js.len();
        if distinct <= 40 {
            bad.push(format!("only {distinct} distinct j-invariants"));
        }
        if bad.is_empty() {
            Ok((true, format!(
                "alpha exact on -2..=10; 50 members, order 4 each, {distinct} distinct j"
            )))
        } else {
            Ok((false, bad.join("; ")))
        }
    })
}

/// Cross-implementation oracles: two-squares vs brute force,
/// Hecke multiplicativity, mod-4 power patterns vs exact arithmetic,
/// the Hasse bound, and byte-identical reports under 1/2/8 workers.
pub fn check_property_oracles(set: &FixtureSet) -> CheckResult {
    run("property-oracles", || {
        let mut bad = Vec::new();
        let auto = counter_by_name("auto")?;

        // sums of two squares against an exhaustive a^2 + b^2 sieve
        const S2S_BOUND: u64 = 100_000;
        let mut brute = vec![false; (S2S_BOUND + 1) as usize];
        let mut a = 0u64;
        while a * a <= S2S_BOUND {
            let mut b = a;
            while a * a + b * b <= S2S_BOUND {
                brute[(a * a + b * b) as usize] = true;
                b += 1;
            }
            a += 1;
        }
        for n in 1..=S2S_BOUND {
            if is_sum_of_two_squares(n)? != brute[n as usize] {
                bad.push(format!("two-squares mismatch at {n}"));
                break;
            }
        }

        // Hecke multiplicativity on computed coefficients
        let fc24 = set.curve("24a3")?;
        let f = from_curve(&fc24.curve, fc24.conductor, 10_000, auto)?;
        let mut pairs = 0u64;
        for m in 2..=99u64 {
            for n in m + 1..=10_000 / m {
                if num_integer::gcd(m, n) != 1 {
                    continue;
                }
                pairs += 1;
                if f.coeff(m * n)? != &(f.coeff(m)? * f.coeff(n)?) {
                    bad.push(format!("a({m}*{n}) != a({m})a({n})"));
                }
            }
        }

        // mod-4 power patterns vs the exact recurrence, all admissible a_p
        for p in (3..100u64).filter(|&p| is_prime(p)) {
            let class: i64 = if p % 4 == 1 { 2 } else { 0 };
            let half = 2 * (p as f64).sqrt() as i64;
            for a_p in (-half..=half).filter(|a| a.rem_euclid(4) == class) {
                let mut prev = BigInt::from(1);
                let mut cur = BigInt::from(a_p);
                for j in 1..=12u32 {
                    let want = u8::try_from(
                        (&cur % BigInt::from(4) + BigInt::from(4)) % BigInt::from(4),
                    )
                    .expect("residue");
                    let got = mod4_power_pattern(p, j, class as u8)?;
                    if got != want {
                        bad.push(format!("pattern({p}, {j}) = {got}, exact {want}"));
                    }
                    let next = &cur * BigInt::from(a_p) - BigInt::from(p) * &prev;
                    prev = std::mem::replace(&mut cur, next);
                }
            }
        }

        // Hasse bound on every fixture curve
        for fc in set.curves() {
            for p in primes_up_to(1000) {
                if matches!(fc.curve.reduction_type(p), ReductionType::Good) {
                    let a = fc.curve.ap_good(p, &LegendreSum)?;
                    if (a as i128) * (a as i128) > 4 * p as i128 {
                        bad.push(format!("{}: |a_{p}| = {} breaks Hasse", fc.label, a.abs()));
                    }
                }
            }
        }

        // identical reports regardless of worker count
        let render = |workers: usize| -> Result<(String, String, String)> {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| crate::Error::domain(format!("thread pool: {e}")))?;
            pool.install(|| {
                let f = from_curve(&fc24.curve, fc24.conductor, 2000, auto)?;
                let qexp = serde_json::to_string(&store_qexp(&f))?;
                let scan = serde_json::to_string(&estimate_constant(
                    48,
                    10_000,
                    100_000,
                    parse_delta("1/4")?,
                    predicate_by_name("s2s")?,
                )?)?;
                let gaps = serde_json::to_string(&gap_scan(
                    &f,
                    1,
                    2000,
                    GapConvention::AfterNonzero,
                    None,
                )?)?;
                Ok((qexp, scan, gaps))
            })
        };
        let baseline = render(1)?;
        for workers in [2usize, 8] {
            if render(workers)? != baseline {
                bad.push(format!("report bytes differ at {workers} workers"));
            }
        }

        if bad.is_empty() {
            Ok((true, format!(
                "two-squares to {S2S_BOUND}; {pairs} multiplicative pairs; patterns, Hasse, determinism x3 reports"
            )))
        } else {
            Ok((false, bad.join("; ")))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_checks_pass() {
        let set = FixtureSet::builtin().unwrap();
        for check in [
            check_coefficients(&set),
            check_sturm(),
            check_prefix_congruences(&set),
            check_alpha_et_family(),
        ] {
            assert!(check.passed, "{}", check.line());
        }
    }

    #[test]
    fn line_format_is_stable() {
        let r = CheckResult {
            name: "sturm-bounds",
            passed: true,
            detail: "128 / 320 / 256 exact".into(),
            millis: 3,
        };
        assert_eq!(r.line(), "PASS sturm-bounds (3 ms): 128 / 320 / 256 exact");
    }
}
