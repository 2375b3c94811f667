//! The gap function i_f(n): zero-run measurement over computed
//! q-expansions, sound non-vanishing certificates (4-isogeny sums of
//! two squares, certified mod-4 congruence transfer, and mod-4 unit
//! products on Hypothesis-form integers), and scan reports that
//! cross-check every certified index against the coefficients.
//!
//! Certificates are sound, not complete: a false verdict says nothing
//! (24a3 has a(9) = 1 yet 9 is never certified, since gcd(9, 48) > 1).

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::{factorize, is_sum_of_two_squares};
use crate::congruence::{mod4_power_pattern, CongruenceReport};
use crate::elliptic::CurveQ;
use crate::intervals::hypothesis_form_check;
use crate::qseries::QExpansion;
use crate::{Error, Result};

/// Zeros at start, start+1, ...; errors when the run is still open at
/// the trusted bound (the true length would only be bounded below).
fn run_length_from(f: &QExpansion, start: u64) -> Result<u64> {
    let mut n = start;
    loop {
        if n > f.bound() {
            return Err(Error::TruncatedRun {
                start,
                bound: f.bound(),
            });
        }
        if !f.coeff(n).unwrap().is_zero() {
            return Ok(n - start);
        }
        n += 1;
    }
}

/// i_f(n) under the displayed contract: the zero run after n when
/// a(n) != 0, and the literal max{i : a(n+j) = 0, 0 <= j <= i} when
/// a(n) = 0 (where j = 0 already lies in the run).
pub fn zero_run(f: &QExpansion, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::domain("gap indices start at n = 1"));
    }
    if n > f.bound() {
        return Err(Error::PastTrustedBound { n, bound: f.bound() });
    }
    if f.coeff(n).unwrap().is_zero() {
        Ok(run_length_from(f, n)? - 1)
    } else {
        run_length_from(f, n + 1)
    }
}

/// Which run the report records at an index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GapConvention {
    /// (n, len): a(n) != 0, a(n+1..=n+len) = 0. The growth statements
    /// concern gaps after nonzero coefficients, so this is the default.
    AfterNonzero,
    /// (s, i): a(s+j) = 0 for 0 <= j <= i, literally as displayed.
    Literal,
}

/// What a positive certificate verdict asserts about a(n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertClaim {
    NonZero,
    NonZeroMod4,
}

/// Sound non-vanishing criteria behind one trait so scans can carry
/// any of them. `certifies` errors only on inputs outside the
/// certificate's hypotheses that the caller should have filtered;
/// within a bulk scan, inapplicable indices simply return false.
pub trait Certificate: Sync {
    fn name(&self) -> &'static str;
    fn claim(&self) -> CertClaim;
    fn certifies(&self, n: u64) -> Result<bool>;
}

/// Weight-2 route: a curve with a rational cyclic 4-isogeny has
/// a_E(n) != 0 for every n that is a sum of two squares coprime to
/// 2 N_E.
pub struct Weight2Isogeny {
    conductor: u64,
}

impl Weight2Isogeny {
    pub fn new(curve: &CurveQ, has_cyclic_4_isogeny: bool) -> Result<Self> {
        if !has_cyclic_4_isogeny {
            return Err(Error::NotApplicable(
                "the weight-2 certificate needs a rational cyclic 4-isogeny".into(),
            ));
        }
        let conductor = curve.conductor().ok_or_else(|| {
            Error::domain(format!("curve {} has no conductor recorded", curve.equation()))
        })?;
        Ok(Weight2Isogeny { conductor })
    }
}

impl Certificate for Weight2Isogeny {
    fn name(&self) -> &'static str {
        "weight2"
    }

    fn claim(&self) -> CertClaim {
        CertClaim::NonZero
    }

    fn certifies(&self, n: u64) -> Result<bool> {
        if n == 0 {
            return Ok(false);
        }
        Ok(is_sum_of_two_squares(n)? && num_integer::gcd(n, 2 * self.conductor) == 1)
    }
}

pub fn certify_weight2(n: u64, curve: &CurveQ, has_cyclic_4_isogeny: bool) -> Result<bool> {
    Weight2Isogeny::new(curve, has_cyclic_4_isogeny)?.certifies(n)
}

/// Congruence-transfer route: once the eigenform f = f_E (mod 2^m),
/// m >= 2, is certified to the Sturm bound and E carries the 4-isogeny,
/// a_f(n) is a nonzero integer on sums of two squares coprime to
/// 2 N_f N_E.
///
/// The claim is integer nonvanishing, not a mod-4 unit: at a prime
/// p = 1 (mod 4) the transfer pins a_f(p) = 2 (mod 4), which is only the
/// seed. Nonvanishing at prime powers comes from f's own Hecke relations
/// (a_f(p) != 0 forces a_f(p^r) != 0 for p coprime to the level when f is
/// an eigenform with integer coefficients), and products follow by
/// multiplicativity. The mod-4 residue itself is not preserved:
/// a_f(p1 p2) = 2 * 2 = 0 (mod 4) when both primes are 1 (mod 4), e.g.
/// n = 65 for the conductor-42 curve. So this certificate requires f to
/// be an eigenform; for mere mod-4 congruence classes of non-eigenforms
/// use the hypothesis-form certificate instead.
pub struct CongruentSquares {
    level_f: u64,
    level_e: u64,
}

impl CongruentSquares {
    /// The report is the evidence; an uncertified or mod-2-only report
    /// is refused rather than trusted.
    pub fn from_report(
        level_f: u64,
        level_e: u64,
        report: &CongruenceReport,
        e_has_cyclic_4_isogeny: bool,
    ) -> Result<Self> {
        if !e_has_cyclic_4_isogeny {
            return Err(Error::NotApplicable(
                "the congruence certificate needs the curve side to carry a 4-isogeny".into(),
            ));
        }
        if !report.certified() {
            return Err(Error::NotApplicable(format!(
                "congruence checked to {} but Sturm bound is {}; verdict not certified",
                report.checked_bound, report.sturm_bound
            )));
        }
        if report.modulus_exponent < 2 {
            return Err(Error::NotApplicable(
                "mod-4 transfer needs modulus exponent m >= 2".into(),
            ));
        }
        Ok(CongruentSquares { level_f, level_e })
    }
}

impl Certificate for CongruentSquares {
    fn name(&self) -> &'static str {
        "congruent"
    }

    fn claim(&self) -> CertClaim {
        CertClaim::NonZero
    }

    fn certifies(&self, n: u64) -> Result<bool> {
        if n == 0 {
            return Ok(false);
        }
        Ok(is_sum_of_two_squares(n)? && num_integer::gcd(n, 2 * self.level_f * self.level_e) == 1)
    }
}

pub fn certify_congruent(
    n: u64,
    level_f: u64,
    level_e: u64,
    report: &CongruenceReport,
    e_has_cyclic_4_isogeny: bool,
) -> Result<bool> {
    CongruentSquares::from_report(level_f, level_e, report, e_has_cyclic_4_isogeny)?.certifies(n)
}

/// Mod-4 unit value of a(n) implied by the power patterns: product of
/// the pattern residues over the odd part. None when some factor kills
/// it mod 4 (which the Hypothesis shape is meant to rule out). The
/// 2^i factor is a unit (a(2)^i = +-1 at multiplicative 2) and cannot
/// change divisibility, so it is left out of the product.
fn mod4_unit_of_odd_part(n: u64) -> Result<Option<u8>> {
    let mut product = 1u8;
    for &(p, e) in factorize(n)?.factors() {
        if p == 2 {
            continue;
        }
        let class = if p % 4 == 1 { 2 } else { 0 };
        let r = mod4_power_pattern(p, e, class)?;
        product = (product * r) % 4;
        if product == 0 {
            return Ok(None);
        }
    }
    Ok(Some(product))
}

/// Hypothesis-form route (n = 2^i p^j m^2): the decomposition check
/// and an independent recomputation of the mod-4 unit must both pass.
/// `coprime_to` is the odd part of N_f N_E: the source states
/// (n, N N_E) = 1, which would exclude every even n although the
/// even part is handled by a(2^i) = +-1; reading the coprimality on
/// the odd part is the only interpretation that leaves that case
/// non-vacuous, and evenness is gated on mult_at_2 instead.
pub struct HypothesisUnits {
    coprime_to: u64,
    mult_at_2: bool,
}

impl HypothesisUnits {
    pub fn from_report(
        level_f: u64,
        level_e: u64,
        report: &CongruenceReport,
        e_has_cyclic_4_isogeny: bool,
        mult_at_2: bool,
    ) -> Result<Self> {
        if !e_has_cyclic_4_isogeny {
            return Err(Error::NotApplicable(
                "the hypothesis-form certificate needs the curve side to carry a 4-isogeny".into(),
            ));
        }
        if !report.certified() || report.modulus_exponent < 2 {
            return Err(Error::NotApplicable(
                "hypothesis-form transfer needs a certified mod-4 congruence".into(),
            ));
        }
        let mut coprime_to = level_f * level_e;
        while coprime_to % 2 == 0 {
            coprime_to /= 2;
        }
        Ok(HypothesisUnits {
            coprime_to,
            mult_at_2,
        })
    }
}

impl Certificate for HypothesisUnits {
    fn name(&self) -> &'static str {
        "hypothesis"
    }

    fn claim(&self) -> CertClaim {
        CertClaim::NonZeroMod4
    }

    /// Unlike the standalone operation, a bulk scan treats even n
    /// without multiplicative reduction at 2 as uncertified rather
    /// than erroring out mid-range.
    fn certifies(&self, n: u64) -> Result<bool> {
        if n == 0 || (n % 2 == 0 && !self.mult_at_2) {
            return Ok(false);
        }
        if hypothesis_form_check(n, self.coprime_to).is_none() {
            return Ok(false);
        }
        Ok(mod4_unit_of_odd_part(n)?.is_some())
    }
}

/// Standalone Hypothesis-form certificate at an explicit coprimality
/// level N. Errors on even n when the curve is not multiplicative at 2
/// (there is no handle on a(2^i) in that case).
pub fn certify_hypothesis_form(n: u64, level: u64, mult_at_2: bool) -> Result<bool> {
    if n == 0 {
        return Err(Error::domain("certificate indices start at n = 1"));
    }
    if n % 2 == 0 && !mult_at_2 {
        return Err(Error::NotApplicable(
            "even index needs multiplicative reduction at 2 to control a(2^i)".into(),
        ));
    }
    if hypothesis_form_check(n, level).is_none() {
        return Ok(false);
    }
    Ok(mod4_unit_of_odd_part(n)?.is_some())
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRecord {
    /// Anchor index: the nonzero coefficient before the run
    /// (AfterNonzero) or the first zero (Literal).
    pub n: u64,
    pub run_length: u64,
    /// run_length / n^(1/4).
    pub ratio: f64,
    pub certified: Option<bool>,
    pub coefficient_nonzero: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub form_label: String,
    pub bound: u64,
    pub range: (u64, u64),
    pub convention: GapConvention,
    pub records: Vec<GapRecord>,
    /// max run_length / n^(1/4) over records with n >= 1000 (smaller n
    /// only add noise to an asymptotic statement), argmax alongside.
    pub max_ratio: Option<f64>,
    pub max_ratio_at: Option<(u64, u64)>,
    /// The final run reached the trusted bound; its true length is
    /// unknown, so it is flagged and kept out of records and max_ratio.
    pub truncated_tail: bool,
    pub certificate: Option<String>,
    pub certificate_violations: Vec<u64>,
}

/// Maximal zero runs (start, length) intersecting [n_min, n_max],
/// extended to their true ends within [1, bound]. Second value set
/// when the last run is still open at the trusted bound.
fn maximal_runs(f: &QExpansion, n_min: u64, n_max: u64) -> (Vec<(u64, u64)>, bool) {
    let mut runs = Vec::new();
    let mut n = n_min;
    let mut truncated = false;
    while n <= n_max {
        if f.coeff(n).unwrap().is_zero() {
            let mut start = n;
            while start > 1 && f.coeff(start - 1).unwrap().is_zero() {
                start -= 1;
            }
            let mut end = n;
            while end < f.bound() && f.coeff(end + 1).unwrap().is_zero() {
                end += 1;
            }
            if end == f.bound() {
                truncated = true;
            } else {
                runs.push((start, end - start + 1));
            }
            n = end + 1;
        } else {
            n += 1;
        }
    }
    (runs, truncated)
}

/// Scan [n_min, n_max] for maximal zero runs, compute the growth ratio
/// statistics, and (when a certificate rides along) re-check every
/// certified index in range against the computed coefficients.
pub fn gap_scan(
    f: &QExpansion,
    n_min: u64,
    n_max: u64,
    convention: GapConvention,
    certificate: Option<&dyn Certificate>,
) -> Result<GapReport> {
    if n_min == 0 {
        return Err(Error::domain("gap indices start at n = 1"));
    }
    if n_min > n_max {
        return Err(Error::EmptyData(format!("empty range [{n_min}, {n_max}]")));
    }
    if n_max > f.bound() {
        return Err(Error::PastTrustedBound {
            n: n_max,
            bound: f.bound(),
        });
    }
    let (runs, truncated_tail) = maximal_runs(f, n_min, n_max);
    let mut records = Vec::with_capacity(runs.len());
    for &(start, len) in &runs {
        let (n, run_length) = match convention {
            GapConvention::AfterNonzero => {
                if start == 1 {
                    // a leading run has no preceding nonzero coefficient
                    continue;
                }
                (start - 1, len)
            }
            GapConvention::Literal => (start, len - 1),
        };
        let certified = match certificate {
            Some(cert) => Some(cert.certifies(n)?),
            None => None,
        };
        records.push(GapRecord {
            n,
            run_length,
            ratio: run_length as f64 / (n as f64).powf(0.25),
            certified,
            coefficient_nonzero: !f.coeff(n).unwrap().is_zero(),
        });
    }
    // Exact argmax of len/n^(1/4) over n >= 1000: compare len^4 n'
    // against len'^4 n.
    let mut best: Option<(u64, u64)> = None;
    for r in records.iter().filter(|r| r.n >= 1000) {
        let better = match best {
            None => true,
            Some((bn, blen)) => {
                (r.run_length as u128).pow(4) * bn as u128 > (blen as u128).pow(4) * r.n as u128
            }
        };
        if better {
            best = Some((r.n, r.run_length));
        }
    }
    let mut certificate_violations = Vec::new();
    if let Some(cert) = certificate {
        for n in n_min..=n_max {
            if cert.certifies(n)? {
                let a = f.coeff(n).unwrap();
                let holds = match cert.claim() {
                    CertClaim::NonZero => !a.is_zero(),
                    CertClaim::NonZeroMod4 => !(a % BigInt::from(4)).is_zero(),
                };
                if !holds {
                    certificate_violations.push(n);
                }
            }
        }
    }
    Ok(GapReport {
        form_label: f.label().unwrap_or("unlabeled").to_string(),
        bound: f.bound(),
        range: (n_min, n_max),
        convention,
        records,
        max_ratio: best.map(|(n, len)| len as f64 / (n as f64).powf(0.25)),
        max_ratio_at: best,
        truncated_tail,
        certificate: certificate.map(|c| c.name().to_string()),
        certificate_violations,
    })
}
