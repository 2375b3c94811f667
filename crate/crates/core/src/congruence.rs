//! Congruences between q-expansions modulo powers of 2: ord_{q^a},
//! Sturm bounds that turn finite checks into certified verdicts, the
//! alpha threshold, 2-adic closeness, and the mod-4 Hecke power
//! patterns forced by a rational cyclic 4-isogeny.

use num_bigint::BigInt;
use num_integer::lcm;
use num_traits::Zero;
use serde::Serialize;

use crate::qseries::QExpansion;
use crate::{Error, Result};

/// The modulus q^m with q = (2) in Z. The ramified number-field case
/// keeps its slot in the constructor but is rejected: every worked
/// example has rational integer coefficients, where e(q/2) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modulus {
    exponent: u32,
}

impl Modulus {
    /// General-form constructor (base prime, exponent, ramification
    /// index), specialized to base 2 and e = 1.
    pub fn new(base: u64, exponent: u32, ramification: u32) -> Result<Self> {
        if base != 2 {
            return Err(Error::domain(format!(
                "only the prime 2 is supported as modulus base, got {base}"
            )));
        }
        if ramification != 1 {
            return Err(Error::domain(format!(
                "ramification index {ramification} requires number-field coefficients; \
                 this implementation is specialized to rational eigenforms (e = 1)"
            )));
        }
        if exponent == 0 {
            return Err(Error::domain("modulus exponent must be positive"));
        }
        Ok(Modulus { exponent })
    }

    /// 2^m.
    pub fn two_to(exponent: u32) -> Result<Self> {
        Modulus::new(2, exponent, 1)
    }

    pub fn base(&self) -> u64 {
        2
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn ramification(&self) -> u32 {
        1
    }

    pub fn value(&self) -> BigInt {
        BigInt::from(1u8) << self.exponent
    }
}

/// ord_{q^a} of a truncated series: the least index whose coefficient
/// 2^m does not divide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrdQa {
    Finite(u64),
    /// No failure up to the trusted bound. The usual convention calls
    /// a fully divisible series ord infinity; a truncation can only
    /// witness that up to its bound, so the bound is carried along.
    AllDivisibleUpTo(u64),
}

pub fn ord_qa(f: &QExpansion, modulus: Modulus) -> OrdQa {
    let m = modulus.value();
    for n in 0..=f.bound() {
        if !(f.coeff(n).expect("n <= bound") % &m).is_zero() {
            return OrdQa::Finite(n);
        }
    }
    OrdQa::AllDivisibleUpTo(f.bound())
}

/// [SL2(Z) : Gamma_1(N)] = N^2 prod_{p | N} (1 - 1/p^2), exact. The
/// uniform formula already gives the conventional values 1 and 3 at
/// N = 1, 2.
pub fn index_gamma1(n: u64) -> u64 {
    assert!(n >= 1, "level must be positive");
    let mut index = n * n;
    let mut rest = n;
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            index = index / (p * p) * (p * p - 1);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > 1 {
        index = index / (rest * rest) * (rest * rest - 1);
    }
    index
}

/// B = ceil(max{2k1, 2k2} [SL2(Z):Gamma_1(N)] / 12): coefficient-wise
/// congruence up to B certifies congruence of the forms.
pub fn sturm_bound(weight1: u32, weight2: u32, n: u64) -> Result<u64> {
    for w in [weight1, weight2] {
        if w == 0 || w % 2 != 0 {
            return Err(Error::domain(format!(
                "Sturm bound needs positive even weights, got {w}"
            )));
        }
    }
    let product = u64::from(weight1.max(weight2)) * index_gamma1(n);
    Ok(product.div_ceil(12))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub congruent: bool,
    pub first_failure_index: Option<u64>,
    pub checked_bound: u64,
    /// Sturm bound of the pair at the lcm of the levels; the verdict is
    /// certified (holds for the full forms) once checked_bound reaches it.
    pub sturm_bound: u64,
    pub modulus_exponent: u32,
}

impl CongruenceReport {
    pub fn certified(&self) -> bool {
        self.congruent && self.checked_bound >= self.sturm_bound
    }
}

/// Coefficient-wise comparison mod 2^m through index `bound`. Refuses
/// to read past either trusted bound rather than silently truncating.
pub fn congruent_mod(
    f1: &QExpansion,
    f2: &QExpansion,
    modulus: Modulus,
    bound: u64,
) -> Result<CongruenceReport> {
    let trusted = f1.bound().min(f2.bound());
    if bound > trusted {
        return Err(Error::PastTrustedBound {
            n: bound,
            bound: trusted,
        });
    }
    let m = modulus.value();
    let first_failure_index = (0..=bound)
        .find(|&n| !((f1.coeff(n).unwrap() - f2.coeff(n).unwrap()) % &m).is_zero());
    Ok(CongruenceReport {
        congruent: first_failure_index.is_none(),
        first_failure_index,
        checked_bound: bound,
        sturm_bound: sturm_bound(f1.weight(), f2.weight(), lcm(f1.level(), f2.level()))?,
        modulus_exponent: modulus.exponent(),
    })
}

/// alpha(n): 0 for n <= 1, 1 at n = 2, n - 2 beyond.
pub fn alpha(n: i64) -> i64 {
    match n {
        n if n <= 1 => 0,
        2 => 1,
        n => n - 2,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CloseReport {
    pub close: bool,
    /// 2k1 = 2k2 (mod 2^s).
    pub weight_clause_ok: bool,
    /// s >= alpha(ceil(m/e)) >= 1, with e = 1.
    pub alpha_clause_ok: bool,
    pub alpha_required: i64,
    pub primes_checked: Vec<u64>,
    pub prime_failures: Vec<u64>,
}

/// The 2-adically-close criterion at (m, s): weight congruence mod 2^s,
/// the alpha threshold, and a(p) congruence mod 2^m at every prime
/// p <= prime_bound away from 2 and both levels. Structural clause
/// failures are verdicts, not errors.
pub fn two_adically_close(
    f1: &QExpansion,
    f2: &QExpansion,
    m: u32,
    s: u32,
    prime_bound: u64,
) -> Result<CloseReport> {
    let trusted = f1.bound().min(f2.bound());
    if prime_bound > trusted {
        return Err(Error::PastTrustedBound {
            n: prime_bound,
            bound: trusted,
        });
    }
    let weight_modulus = BigInt::from(1u8) << s;
    let weight_clause_ok =
        ((BigInt::from(f1.weight()) - BigInt::from(f2.weight())) % &weight_modulus).is_zero();
    let alpha_required = alpha(i64::from(m));
    let alpha_clause_ok = alpha_required >= 1 && i64::from(s) >= alpha_required;
    let coeff_modulus = BigInt::from(1u8) << m;
    let mut primes_checked = Vec::new();
    let mut prime_failures = Vec::new();
    for p in crate::arith::primes_up_to(prime_bound) {
        if p == 2 || f1.level() % p == 0 || f2.level() % p == 0 {
            continue;
        }
        primes_checked.push(p);
        if !((f1.coeff(p).unwrap() - f2.coeff(p).unwrap()) % &coeff_modulus).is_zero() {
            prime_failures.push(p);
        }
    }
    Ok(CloseReport {
        close: weight_clause_ok && alpha_clause_ok && prime_failures.is_empty(),
        weight_clause_ok,
        alpha_clause_ok,
        alpha_required,
        primes_checked,
        prime_failures,
    })
}

/// Residue class forced on a_p mod 4 by a rational cyclic 4-isogeny:
/// a_p = +-(1+p) (mod 4), which collapses to 2 when p = 1 (mod 4) and
/// 0 when p = 3 (mod 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mod4Verdict {
    /// a_p lies in the forced class.
    pub ok: bool,
    /// The forced residue for this p, whether or not a_p attains it.
    pub residue: u8,
}

pub fn mod4_prime_class(a_p: i64, p: u64) -> Result<Mod4Verdict> {
    if p % 2 == 0 {
        return Err(Error::domain(format!(
            "mod-4 classification applies to odd primes, got {p}"
        )));
    }
    let residue = if p % 4 == 1 { 2 } else { 0 };
    Ok(Mod4Verdict {
        ok: a_p.rem_euclid(4) as u8 == residue,
        residue,
    })
}

/// a(p^j) mod 4 by the Hecke recurrence reduced mod 4. Weight drops
/// out: p^(2k-1) = p (mod 8) for odd p. Valid for p away from the
/// level (where the two-term recurrence holds).
pub fn mod4_power_pattern(p: u64, j: u32, a_p_mod4: u8) -> Result<u8> {
    let class = mod4_prime_class(i64::from(a_p_mod4), p)?;
    if !class.ok {
        return Err(Error::domain(format!(
            "a_p = {a_p_mod4} (mod 4) is inconsistent with the 4-isogeny class {} at p = {p}",
            class.residue
        )));
    }
    let a = u64::from(a_p_mod4);
    let p4 = p % 4;
    let (mut prev, mut cur) = (1u64, a);
    if j == 0 {
        return Ok(1);
    }
    for _ in 1..j {
        let next = (a * cur + 4 * 4 - p4 * prev) % 4;
        prev = cur;
        cur = next;
    }
    Ok(cur as u8)
}
