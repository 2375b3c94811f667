//! Truncated q-expansions: construction from elliptic curves, Hecke
//! extension from prime coefficients, Cauchy products, Eisenstein E4,
//! and an exact text interchange format.
//!
//! Every expansion carries a trusted bound (the highest index actually
//! computed or ingested); reads past it fail instead of returning
//! truncation garbage.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::lcm;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{primes_up_to, FactorSieve};
use crate::elliptic::{CurveQ, PointCounter};
use crate::{Error, Result};

/// A q-series sum a(n) q^n trusted up to a stated index. Weight is even
/// (0 allowed for constants); character is always trivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    weight: u32,
    level: u64,
    coeffs: Vec<BigInt>,
    normalized: bool,
    label: Option<String>,
}

impl QExpansion {
    /// Assemble and validate. `coeffs[n]` is a(n); the trusted bound is
    /// the last index supplied.
    pub fn from_parts(
        weight: u32,
        level: u64,
        coeffs: Vec<BigInt>,
        normalized: bool,
        label: Option<String>,
    ) -> Result<Self> {
        if weight % 2 != 0 {
            return Err(Error::schema(format!("odd weight {weight}")));
        }
        if level == 0 {
            return Err(Error::schema("level must be positive"));
        }
        if coeffs.is_empty() {
            return Err(Error::schema("empty coefficient list"));
        }
        if normalized && (coeffs.len() < 2 || !coeffs[1].is_one()) {
            return Err(Error::schema(
                "normalized flag requires a(1) = 1 within the trusted range",
            ));
        }
        Ok(QExpansion {
            weight,
            level,
            coeffs,
            normalized,
            label,
        })
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Highest trusted index.
    pub fn bound(&self) -> u64 {
        (self.coeffs.len() - 1) as u64
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// a(n), refusing indices past the trusted bound.
    pub fn coeff(&self, n: u64) -> Result<&BigInt> {
        self.coeffs.get(n as usize).ok_or(Error::PastTrustedBound {
            n,
            bound: self.bound(),
        })
    }

    /// All trusted coefficients, a(0) first.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }
}

/// Weight-2 eigenform attached to a curve: a(p) from point counts at
/// good primes and the reduction type at bad ones, extended to all
/// indices by the Hecke relations. `level` is the conductor
/// (caller-supplied; it decides which primes use the p | N recurrence).
pub fn from_curve(
    curve: &CurveQ,
    level: u64,
    bound: u64,
    counter: &dyn PointCounter,
) -> Result<QExpansion> {
    let prime_coeffs: BTreeMap<u64, i64> = primes_up_to(bound)
        .par_iter()
        .map(|&p| curve.ap(p, counter).map(|a| (p, a)))
        .collect::<Result<_>>()?;
    let coeffs = hecke_extend(&prime_coeffs, 2, level, bound)?;
    QExpansion::from_parts(2, level, coeffs, true, curve.label().map(str::to_string))
}

/// Fill a(0..=bound) from prime coefficients: a(p^r) by the weight-2k
/// recurrence a(p^r) = a(p) a(p^(r-1)) - p^(2k-1) a(p^(r-2)) away from
/// the level and a(p)^r at primes dividing it, then multiplicatively
/// across coprime factors.
pub fn hecke_extend(
    prime_coeffs: &BTreeMap<u64, i64>,
    weight: u32,
    level: u64,
    bound: u64,
) -> Result<Vec<BigInt>> {
    if weight % 2 != 0 || weight == 0 {
        return Err(Error::domain(format!(
            "Hecke extension needs positive even weight, got {weight}"
        )));
    }
    let primes = primes_up_to(bound);
    for &p in &primes {
        if !prime_coeffs.contains_key(&p) {
            return Err(Error::MissingPrime { p });
        }
    }
    let mut a = vec![BigInt::zero(); bound as usize + 1];
    if bound >= 1 {
        a[1] = BigInt::one();
    }
    for &p in &primes {
        let ap = BigInt::from(prime_coeffs[&p]);
        let pk = BigInt::from(p).pow(weight - 1);
        let mut prev = BigInt::one(); // a(p^0)
        let mut cur = ap.clone(); // a(p^1)
        let mut q = p;
        while q <= bound {
            a[q as usize] = cur.clone();
            let next = if level % p == 0 {
                &cur * &ap
            } else {
                &cur * &ap - &pk * &prev
            };
            prev = cur;
            cur = next;
            match q.checked_mul(p) {
                Some(nq) => q = nq,
                None => break,
            }
        }
    }
    // Composite n with at least two prime divisors: split off the
    // smallest prime power, which is coprime to the rest.
    let sieve = FactorSieve::new(bound);
    for n in 2..=bound {
        let spf = sieve.factorize(n)?.factors()[0].0;
        let mut q = 1;
        let mut m = n;
        while m % spf == 0 {
            m /= spf;
            q *= spf;
        }
        if m > 1 {
            a[n as usize] = &a[q as usize] * &a[m as usize];
        }
    }
    Ok(a)
}

/// Cauchy product truncated at `bound`. Weights add, levels lcm; the
/// product of eigenforms is not itself one, so the flag drops.
pub fn series_multiply(f: &QExpansion, g: &QExpansion, bound: u64) -> Result<QExpansion> {
    let trusted = f.bound().min(g.bound());
    if bound > trusted {
        return Err(Error::PastTrustedBound {
            n: bound,
            bound: trusted,
        });
    }
    let n = bound as usize;
    let coeffs: Vec<BigInt> = (0..=n)
        .map(|k| (0..=k).map(|i| &f.coeffs[i] * &g.coeffs[k - i]).sum())
        .collect();
    QExpansion::from_parts(
        f.weight + g.weight,
        lcm(f.level, g.level),
        coeffs,
        false,
        None,
    )
}

/// E4 = 1 + 240 sum sigma_3(n) q^n, weight 4, level 1.
pub fn eisenstein_e4(bound: u64) -> QExpansion {
    let n = bound as usize;
    let mut sigma3 = vec![0u128; n + 1];
    for d in 1..=n {
        let cube = (d as u128).pow(3);
        for multiple in (d..=n).step_by(d) {
            sigma3[multiple] += cube;
        }
    }
    let mut coeffs = vec![BigInt::one()];
    coeffs.extend((1..=n).map(|i| BigInt::from(240u32) * BigInt::from(sigma3[i])));
    QExpansion {
        weight: 4,
        level: 1,
        coeffs,
        normalized: false,
        label: Some("E4".to_string()),
    }
}

/// Interchange record: one object per form, coefficients as decimal
/// strings so arbitrary precision survives the round trip.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QExpRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub weight: u32,
    pub level: u64,
    pub normalized: bool,
    pub coefficients: Vec<String>,
}

pub fn load_qexp(record: &QExpRecord) -> Result<QExpansion> {
    let coeffs = record
        .coefficients
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.parse::<BigInt>()
                .map_err(|_| Error::schema(format!("coefficient {i} is not a decimal integer: {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    QExpansion::from_parts(
        record.weight,
        record.level,
        coeffs,
        record.normalized,
        record.label.clone(),
    )
}

pub fn store_qexp(f: &QExpansion) -> QExpRecord {
    QExpRecord {
        label: f.label.clone(),
        weight: f.weight,
        level: f.level,
        normalized: f.normalized,
        coefficients: f.coeffs.iter().map(BigInt::to_string).collect(),
    }
}
