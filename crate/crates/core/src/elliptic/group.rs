//! Exact rational group law on long Weierstrass curves, used to verify
//! torsion claims (chord-and-tangent formulas, no floating point).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::CurveQ;
use crate::{Error, Result};

/// A rational point: infinity or exact affine coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum CurvePoint {
    Infinity,
    Affine(BigRational, BigRational),
}

impl CurvePoint {
    pub fn from_integers(x: i64, y: i64) -> Self {
        CurvePoint::Affine(
            BigRational::from(BigInt::from(x)),
            BigRational::from(BigInt::from(y)),
        )
    }

    pub fn affine(x: BigRational, y: BigRational) -> Self {
        CurvePoint::Affine(x, y)
    }
}

impl std::fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurvePoint::Infinity => f.write_str("O"),
            CurvePoint::Affine(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

fn coeffs(curve: &CurveQ) -> [BigRational; 5] {
    curve
        .coefficients()
        .map(|a| BigRational::from(BigInt::from(a)))
}

/// Whether the point satisfies the curve equation exactly.
pub fn on_curve(curve: &CurveQ, point: &CurvePoint) -> bool {
    match point {
        CurvePoint::Infinity => true,
        CurvePoint::Affine(x, y) => {
            let [a1, a2, a3, a4, a6] = coeffs(curve);
            let lhs = y * y + a1 * x * y + a3 * y;
            let rhs = x * x * x + a2 * x * x + a4 * x + a6;
            lhs == rhs
        }
    }
}

/// −P = (x, −y − a1·x − a3).
pub fn group_negate(curve: &CurveQ, point: &CurvePoint) -> Result<CurvePoint> {
    check_on_curve(curve, point)?;
    match point {
        CurvePoint::Infinity => Ok(CurvePoint::Infinity),
        CurvePoint::Affine(x, y) => {
            let [a1, _, a3, _, _] = coeffs(curve);
            Ok(CurvePoint::Affine(x.clone(), -y - a1 * x - a3))
        }
    }
}

fn check_on_curve(curve: &CurveQ, point: &CurvePoint) -> Result<()> {
    if on_curve(curve, point) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "point {point} is not on {}",
            curve.equation()
        )))
    }
}

/// Chord-and-tangent addition. Inputs must lie on the curve.
pub fn group_add(curve: &CurveQ, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
    check_on_curve(curve, p)?;
    check_on_curve(curve, q)?;
    let (x1, y1, x2, y2) = match (p, q) {
        (CurvePoint::Infinity, _) => return Ok(q.clone()),
        (_, CurvePoint::Infinity) => return Ok(p.clone()),
        (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => (x1, y1, x2, y2),
    };
    let [a1, a2, a3, a4, a6] = coeffs(curve);
    if x1 == x2 && (y1 + y2 + &a1 * x2 + &a3).is_zero() {
        return Ok(CurvePoint::Infinity);
    }
    // Slope and intercept of the chord (or tangent when the points
    // coincide), then the third intersection reflected.
    let (lambda, nu) = if x1 == x2 {
        let two = BigInt::from(2);
        let d = y1 * &two + &a1 * x1 + &a3;
        (
            (x1 * x1 * BigInt::from(3) + &a2 * x1 * &two + &a4 - &a1 * y1) / &d,
            (-(x1 * x1 * x1) + &a4 * x1 + &a6 * &two - &a3 * y1) / &d,
        )
    } else {
        let d = x2 - x1;
        ((y2 - y1) / &d, (y1 * x2 - y2 * x1) / &d)
    };
    let x3 = &lambda * &lambda + &a1 * &lambda - &a2 - x1 - x2;
    let y3 = -(&lambda + &a1) * &x3 - &nu - &a3;
    let sum = CurvePoint::Affine(x3, y3);
    debug_assert!(on_curve(curve, &sum));
    Ok(sum)
}

/// Least k ≤ max_order with kP = O, or None. Mazur's theorem caps
/// rational torsion orders at 12, so max_order ≤ 16 always suffices.
pub fn point_order(curve: &CurveQ, point: &CurvePoint, max_order: u32) -> Result<Option<u32>> {
    check_on_curve(curve, point)?;
    let mut acc = point.clone();
    for k in 1..=max_order {
        if acc == CurvePoint::Infinity {
            return Ok(Some(k));
        }
        acc = group_add(curve, &acc, point)?;
    }
    Ok(None)
}
