//! Elliptic curves over Q: Weierstrass invariants, reduction types,
//! traces of Frobenius, the exact rational group law, and the E_t family
//! with rational 4-torsion.
//!
//! Curves are long Weierstrass models with integer coefficients. All
//! reduction-type queries assume the model is globally minimal; the
//! shipped fixtures are Cremona minimal models and the assumption is not
//! re-verified (no Tate's algorithm here).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::{Error, Result};

pub mod counting;
mod group;

pub use counting::{counter_by_name, counter_names, PointCounter};
pub use group::{group_add, group_negate, point_order, CurvePoint};

/// An elliptic curve over Q in long Weierstrass form
/// y^2 + a1·xy + a3·y = x^3 + a2·x^2 + a4·x + a6.
///
/// Construction rejects singular equations, so the discriminant is
/// nonzero for every value of this type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveQ {
    a: [i64; 5],
    label: Option<String>,
    conductor: Option<u64>,
}

/// Derived Weierstrass quantities. `c4^3 - c6^2 = 1728·disc` always
/// holds, and `disc` is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub b2: BigInt,
    pub b4: BigInt,
    pub b6: BigInt,
    pub b8: BigInt,
    pub c4: BigInt,
    pub c6: BigInt,
    pub disc: BigInt,
    pub j: BigRational,
}

/// Local behaviour of the reduced curve at a prime, read off a minimal
/// model: good iff p ∤ disc, multiplicative iff p | disc and p ∤ c4,
/// additive otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionType {
    Good,
    Multiplicative,
    Additive,
}

impl std::fmt::Display for ReductionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReductionType::Good => "good",
            ReductionType::Multiplicative => "multiplicative",
            ReductionType::Additive => "additive",
        })
    }
}

fn b_invariants(a: [i64; 5]) -> (BigInt, BigInt, BigInt, BigInt) {
    let [a1, a2, a3, a4, a6] = a.map(BigInt::from);
    let b2 = &a1 * &a1 + 4 * &a2;
    let b4 = 2 * &a4 + &a1 * &a3;
    let b6 = &a3 * &a3 + 4 * &a6;
    let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
    debug_assert_eq!(4 * &b8, &b2 * &b6 - &b4 * &b4);
    (b2, b4, b6, b8)
}

fn disc_of(b2: &BigInt, b4: &BigInt, b6: &BigInt, b8: &BigInt) -> BigInt {
    -(b2 * b2 * b8) - 8 * (b4 * b4 * b4) - 27 * (b6 * b6) + 9 * (b2 * b4 * b6)
}

impl CurveQ {
    /// Build a curve from [a1, a2, a3, a4, a6]; rejects discriminant 0.
    pub fn new(a: [i64; 5]) -> Result<Self> {
        let c = CurveQ {
            a,
            label: None,
            conductor: None,
        };
        let (b2, b4, b6, b8) = b_invariants(a);
        if disc_of(&b2, &b4, &b6, &b8).is_zero() {
            return Err(Error::SingularCurve(c.equation()));
        }
        Ok(c)
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn with_conductor(mut self, conductor: u64) -> Self {
        self.conductor = Some(conductor);
        self
    }

    pub fn coefficients(&self) -> [i64; 5] {
        self.a
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn conductor(&self) -> Option<u64> {
        self.conductor
    }

    /// Human-readable Weierstrass equation, e.g.
    /// `y^2 + xy + y = x^3 + x^2 - 80x + 242`.
    pub fn equation(&self) -> String {
        let [a1, a2, a3, a4, a6] = self.a;
        let mut lhs = String::from("y^2");
        append_term(&mut lhs, a1, "xy");
        append_term(&mut lhs, a3, "y");
        let mut rhs = String::from("x^3");
        append_term(&mut rhs, a2, "x^2");
        append_term(&mut rhs, a4, "x");
        append_term(&mut rhs, a6, "");
        format!("{lhs} = {rhs}")
    }

    /// b-, c-invariants, discriminant, and j = c4^3/disc, all exact.
    pub fn invariants(&self) -> Invariants {
        let (b2, b4, b6, b8) = b_invariants(self.a);
        let c4 = &b2 * &b2 - 24 * &b4;
        let c6 = -(&b2 * &b2 * &b2) + 36 * &b2 * &b4 - 216 * &b6;
        let disc = disc_of(&b2, &b4, &b6, &b8);
        debug_assert_eq!(&c4 * &c4 * &c4 - &c6 * &c6, 1728 * &disc);
        let j = BigRational::new(&c4 * &c4 * &c4, disc.clone());
        Invariants {
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            disc,
            j,
        }
    }

    pub fn reduction_type(&self, p: u64) -> ReductionType {
        reduction_type_of(&self.invariants(), p)
    }

    /// Trace of Frobenius a_p = p + 1 − #E(F_p) at a prime of good
    /// reduction, computed by the given counting strategy.
    pub fn ap_good(&self, p: u64, counter: &dyn PointCounter) -> Result<i64> {
        if self.reduction_type(p) != ReductionType::Good {
            return Err(Error::WrongReduction {
                p,
                detail: "ap_good requires good reduction".into(),
            });
        }
        let count = counter.count(self, p)?;
        let ap = p as i64 + 1 - count as i64;
        debug_assert!((ap * ap) as u64 <= 4 * p, "Hasse bound violated at {p}");
        Ok(ap)
    }

    /// a_p at a bad prime of a minimal model: 0 at additive reduction,
    /// p − #E_ns(F_p) ∈ {±1} at multiplicative reduction, where E_ns
    /// drops the singular point of the reduced curve.
    pub fn ap_bad(&self, p: u64) -> Result<i64> {
        match self.reduction_type(p) {
            ReductionType::Good => Err(Error::WrongReduction {
                p,
                detail: "ap_bad requires bad reduction".into(),
            }),
            ReductionType::Additive => Ok(0),
            ReductionType::Multiplicative => {
                let ap = if p == 2 {
                    // #E_ns = smooth affine points + infinity
                    2 - (counting::nonsingular_affine_count(self, 2)? + 1) as i64
                } else {
                    // Same character sum as the good case: the node
                    // accounts for the +1 shift exactly.
                    -counting::chi_sum(self, p)
                };
                debug_assert!(ap == 1 || ap == -1, "multiplicative a_{p} = {ap}");
                Ok(ap)
            }
        }
    }

    /// a_p at any prime, dispatching on the reduction type.
    pub fn ap(&self, p: u64, counter: &dyn PointCounter) -> Result<i64> {
        match self.reduction_type(p) {
            ReductionType::Good => self.ap_good(p, counter),
            _ => self.ap_bad(p),
        }
    }
}

/// Classification from precomputed invariants, for callers that sweep
/// many primes against one curve.
pub fn reduction_type_of(inv: &Invariants, p: u64) -> ReductionType {
    let p = BigInt::from(p);
    if !(&inv.disc % &p).is_zero() {
        ReductionType::Good
    } else if !(&inv.c4 % &p).is_zero() {
        ReductionType::Multiplicative
    } else {
        ReductionType::Additive
    }
}

fn append_term(s: &mut String, coeff: i64, var: &str) {
    if coeff == 0 {
        return;
    }
    s.push_str(if coeff < 0 { " - " } else { " + " });
    let mag = coeff.unsigned_abs();
    if mag != 1 || var.is_empty() {
        s.push_str(&mag.to_string());
    }
    s.push_str(var);
}

/// A member of the family E_t : y^2 = x^3 − (2t−1)x^2 + t^2·x together
/// with the image of its rational 4-torsion point (t, t).
///
/// For t = a/b in lowest terms the model is cleared to integers by the
/// scaling (x, y) → (b^2 x, b^3 y), giving
/// y^2 = x^3 + (b^2 − 2ab)x^2 + a^2 b^2·x with torsion point (ab, ab^2).
pub struct EtMember {
    pub curve: CurveQ,
    pub torsion_point: CurvePoint,
}

/// The family is singular exactly at t ∈ {0, 1/4}
/// (disc = 16 t^4 (1 − 4t) before scaling); those values are rejected.
pub fn family_et(t: &BigRational) -> Result<EtMember> {
    if t.is_zero() || *t == BigRational::new(BigInt::from(1), BigInt::from(4)) {
        return Err(Error::domain(format!(
            "E_t is singular at t = {t} (allowed: t not in {{0, 1/4}})"
        )));
    }
    let a: i64 = i64::try_from(t.numer()).map_err(|_| Error::domain("numerator of t too large"))?;
    let b: i64 =
        i64::try_from(t.denom()).map_err(|_| Error::domain("denominator of t too large"))?;
    let a2 = b
        .checked_mul(b)
        .and_then(|bb| bb.checked_sub(2i64.checked_mul(a)?.checked_mul(b)?))
        .ok_or_else(|| Error::domain("t too large for the integral E_t model"))?;
    let a4 = a
        .checked_mul(a)
        .and_then(|aa| aa.checked_mul(b.checked_mul(b)?))
        .ok_or_else(|| Error::domain("t too large for the integral E_t model"))?;
    let curve = CurveQ::new([0, a2, 0, a4, 0])?;
    let torsion_point = CurvePoint::from_integers(a * b, a * b * b);
    debug_assert!(group::on_curve(&curve, &torsion_point));
    Ok(EtMember {
        curve,
        torsion_point,
    })
}

/// Signed remainder of a BigInt mod a small modulus, as the least
/// nonnegative residue.
pub(crate) fn residue_u64(v: &BigInt, m: u64) -> u64 {
    let r = v % BigInt::from(m);
    let r = if r.is_negative() { r + BigInt::from(m) } else { r };
    u64::try_from(&r).expect("residue fits u64")
}
