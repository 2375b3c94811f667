//! Point-counting strategies behind a common trait, registered by name
//! and selected at runtime.
//!
//! Every counter returns #E(F_p) including the point at infinity and
//! assumes good reduction at p (callers classify the prime first):
//!
//! * `enumerate`: scan of all affine pairs, O(p^2). The obviously
//!   correct oracle; capped at p <= 3000.
//! * `legendre`: #E = p + 1 + sum_x chi(g(x)) with
//!   g = 4x^3 + b2 x^2 + 2 b4 x + b6 the completed square and chi the
//!   quadratic character, evaluated by finite differences against a
//!   per-prime residue table. O(p) time, exact for every odd p.
//! * `bsgs`: Shanks-Mestre baby-step giant-step order finding in the
//!   Hasse interval, O(p^(1/4)) group operations per sample point, for
//!   p up to 10^8. Below 229 the interval can contain several group
//!   orders, so small p delegate to `legendre`.
//! * `auto`: enumerate at p = 2, legendre for odd p below 5*10^5, bsgs
//!   above (crossover measured coarsely; all agree everywhere).

use std::collections::{BTreeSet, HashMap};

use crate::arith::{isqrt, powmod};
use crate::{Error, Result};

use super::{residue_u64, CurveQ};

pub trait PointCounter: Sync {
    fn name(&self) -> &'static str;

    /// #E(F_p) including infinity; p must be a prime of good reduction.
    fn count(&self, curve: &CurveQ, p: u64) -> Result<u64>;
}

pub struct Enumerate;
pub struct LegendreSum;
pub struct Bsgs;
pub struct Auto;

static COUNTERS: [&dyn PointCounter; 4] = [&Enumerate, &LegendreSum, &Bsgs, &Auto];

pub fn counters() -> &'static [&'static dyn PointCounter] {
    &COUNTERS
}

pub fn counter_names() -> Vec<&'static str> {
    COUNTERS.iter().map(|c| c.name()).collect()
}

pub fn counter_by_name(name: &str) -> Result<&'static dyn PointCounter> {
    COUNTERS
        .iter()
        .copied()
        .find(|c| c.name() == name)
        .ok_or_else(|| Error::unknown("point counter", name))
}

const ENUMERATE_LIMIT: u64 = 3000;
const BSGS_LIMIT: u64 = 100_000_000;
/// Below this prime the Hasse interval can contain more than one group
/// order shared by E and its twist (Mestre's bound).
const MESTRE_MIN: u64 = 229;
const AUTO_BSGS_FROM: u64 = 500_000;

fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn negm(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

fn invm(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn reduced_a(curve: &CurveQ, p: u64) -> [u64; 5] {
    curve.coefficients().map(|a| a.rem_euclid(p as i64) as u64)
}

impl PointCounter for Enumerate {
    fn name(&self) -> &'static str {
        "enumerate"
    }

    fn count(&self, curve: &CurveQ, p: u64) -> Result<u64> {
        if p > ENUMERATE_LIMIT {
            return Err(Error::domain(format!(
                "enumerate counter is capped at p <= {ENUMERATE_LIMIT}, got {p}"
            )));
        }
        let [a1, a2, a3, a4, a6] = reduced_a(curve, p);
        let mut affine = 0u64;
        for x in 0..p {
            let x2 = mulm(x, x, p);
            let rhs = addm(
                addm(mulm(x2, x, p), mulm(a2, x2, p), p),
                addm(mulm(a4, x, p), a6, p),
                p,
            );
            for y in 0..p {
                let lhs = addm(
                    addm(mulm(y, y, p), mulm(mulm(a1, x, p), y, p), p),
                    mulm(a3, y, p),
                    p,
                );
                if lhs == rhs {
                    affine += 1;
                }
            }
        }
        Ok(affine + 1)
    }
}

/// sum over x in F_p of chi(4x^3 + b2 x^2 + 2 b4 x + b6), p odd.
///
/// Completing the square sends (x, y) to (x, 2y + a1 x + a3), so the
/// affine point count is p + this sum; at good p that gives
/// a_p = -sum, and at multiplicative p the node absorbs the difference
/// and a_p = -sum still (one singular affine point, counted once).
pub(crate) fn chi_sum(curve: &CurveQ, p: u64) -> i64 {
    debug_assert!(p > 2 && p % 2 == 1);
    let [a1, a2, a3, a4, a6] = reduced_a(curve, p);
    let b2 = addm(mulm(a1, a1, p), mulm(4 % p, a2, p), p);
    let b4 = addm(mulm(2 % p, a4, p), mulm(a1, a3, p), p);
    let b6 = addm(mulm(a3, a3, p), mulm(4 % p, a6, p), p);

    // Quadratic-residue table: mark x^2 mod p incrementally
    // ((x+1)^2 - x^2 = 2x + 1), no division in the loop.
    let mut qr = vec![false; p as usize];
    let mut sq = 0u64;
    let mut step = 1u64;
    let two = 2 % p;
    for _ in 0..p {
        qr[sq as usize] = true;
        sq = addm(sq, step, p);
        step = addm(step, two, p);
    }

    // g by finite differences: d1 = g(x+1) - g(x), d2 = d1(x+1) - d1(x),
    // third difference of a cubic with lead 4 is constant 24.
    let lin = mulm(2 % p, b4, p);
    let mut g = b6;
    let mut d1 = addm(addm(4 % p, b2, p), lin, p);
    let mut d2 = addm(24 % p, mulm(2 % p, b2, p), p);
    let d3 = 24 % p;
    let mut sum = 0i64;
    for _ in 0..p {
        if g != 0 {
            sum += if qr[g as usize] { 1 } else { -1 };
        }
        g = addm(g, d1, p);
        d1 = addm(d1, d2, p);
        d2 = addm(d2, d3, p);
    }
    sum
}

impl PointCounter for LegendreSum {
    fn name(&self) -> &'static str {
        "legendre"
    }

    fn count(&self, curve: &CurveQ, p: u64) -> Result<u64> {
        if p == 2 {
            return Enumerate.count(curve, p);
        }
        Ok((p as i64 + 1 + chi_sum(curve, p)) as u64)
    }
}

/// Affine points of the reduced curve that are smooth (some partial
/// derivative nonzero). Small p only; used for a_p at p = 2 and as a
/// test oracle at bad primes.
pub(crate) fn nonsingular_affine_count(curve: &CurveQ, p: u64) -> Result<u64> {
    if p > ENUMERATE_LIMIT {
        return Err(Error::domain(format!(
            "nonsingular point enumeration is capped at p <= {ENUMERATE_LIMIT}, got {p}"
        )));
    }
    let [a1, a2, a3, a4, a6] = reduced_a(curve, p);
    let mut smooth = 0u64;
    for x in 0..p {
        let x2 = mulm(x, x, p);
        let rhs = addm(
            addm(mulm(x2, x, p), mulm(a2, x2, p), p),
            addm(mulm(a4, x, p), a6, p),
            p,
        );
        // -dF/dx = 3x^2 + 2 a2 x + a4 - a1 y, dF/dy = 2y + a1 x + a3
        let fx_const = addm(
            addm(mulm(3 % p, x2, p), mulm(mulm(2 % p, a2, p), x, p), p),
            a4,
            p,
        );
        for y in 0..p {
            let lhs = addm(
                addm(mulm(y, y, p), mulm(mulm(a1, x, p), y, p), p),
                mulm(a3, y, p),
                p,
            );
            if lhs != rhs {
                continue;
            }
            let fx = subm(mulm(a1, y, p), fx_const, p);
            let fy = addm(addm(mulm(2 % p, y, p), mulm(a1, x, p), p), a3, p);
            if fx != 0 || fy != 0 {
                smooth += 1;
            }
        }
    }
    Ok(smooth)
}

/// Square root mod an odd prime (Tonelli-Shanks; direct exponent when
/// p = 3 mod 4). None iff a is a nonresidue.
fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if powmod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(powmod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..).find(|&z| powmod(z, (p - 1) / 2, p) == p - 1).unwrap();
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulm(t2, t2, p);
            i += 1;
        }
        let b = powmod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mulm(b, b, p);
        t = mulm(t, c, p);
        r = mulm(r, b, p);
    }
    Some(r)
}

/// y^2 = x^3 + a x + b over F_p; addition needs only `a`.
#[derive(Clone, Copy)]
struct FpCurve {
    a: u64,
    p: u64,
}

type FpPoint = Option<(u64, u64)>;

impl FpCurve {
    fn add(&self, p1: FpPoint, p2: FpPoint) -> FpPoint {
        let p = self.p;
        let ((x1, y1), (x2, y2)) = match (p1, p2) {
            (None, q) | (q, None) => return q,
            (Some(u), Some(v)) => (u, v),
        };
        let lambda = if x1 == x2 {
            if addm(y1, y2, p) == 0 {
                return None;
            }
            let num = addm(mulm(3 % p, mulm(x1, x1, p), p), self.a, p);
            mulm(num, invm(mulm(2 % p, y1, p), p), p)
        } else {
            mulm(subm(y2, y1, p), invm(subm(x2, x1, p), p), p)
        };
        let x3 = subm(subm(mulm(lambda, lambda, p), x1, p), x2, p);
        let y3 = subm(mulm(lambda, subm(x1, x3, p), p), y1, p);
        Some((x3, y3))
    }

    fn mul(&self, pt: FpPoint, k: u64) -> FpPoint {
        let mut acc = None;
        let mut base = pt;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }
}

/// All m in [lo, hi] with m*P = O, by baby-step giant-step. Every
/// returned value is re-verified by a direct scalar multiplication.
fn order_candidates(c: &FpCurve, pt: (u64, u64), lo: u64, hi: u64) -> Vec<u64> {
    let s = isqrt(hi - lo) + 1;
    // Baby steps a*P for a in 1..=s; if the order shows up this early,
    // the annihilators in range are exactly its multiples.
    let mut baby: HashMap<u64, Vec<u64>> = HashMap::new();
    let mut acc: FpPoint = Some(pt);
    for a in 1..=s {
        match acc {
            None => {
                let ord = a;
                let first = lo.div_ceil(ord) * ord;
                return (first..=hi).step_by(ord as usize).collect();
            }
            Some((x, _)) => baby.entry(x).or_default().push(a),
        }
        acc = c.add(acc, Some(pt));
    }
    let giant = c.mul(Some(pt), s);
    let mut q = c.mul(Some(pt), lo);
    let mut seeds = BTreeSet::new();
    let mut base = lo;
    while base <= hi {
        match q {
            None => {
                seeds.insert(base);
            }
            Some((x, _)) => {
                // same x means q = +-a*P, so (base -+ a)P = O for one sign
                if let Some(matches) = baby.get(&x) {
                    for &a in matches {
                        if base + a <= hi {
                            seeds.insert(base + a);
                        }
                        if base >= a + lo {
                            seeds.insert(base - a);
                        }
                    }
                }
            }
        }
        q = c.add(q, giant);
        base += s;
    }
    seeds
        .into_iter()
        .filter(|&m| c.mul(Some(pt), m).is_none())
        .collect()
}

/// Group order of y^2 = x^3 - 27 c4 x - 54 c6 over F_p (the short model
/// of the reduction, valid since p > 3), found by intersecting order
/// candidates from sample points on the curve and its quadratic twist
/// until a single value in the Hasse interval survives.
fn shanks_mestre(curve: &CurveQ, p: u64) -> Result<u64> {
    let inv = curve.invariants();
    let c4 = residue_u64(&inv.c4, p);
    let c6 = residue_u64(&inv.c6, p);
    let a = negm(mulm(27 % p, c4, p), p);
    let b = negm(mulm(54 % p, c6, p), p);
    let d = (2..).find(|&d| powmod(d, (p - 1) / 2, p) == p - 1).unwrap();
    let w = isqrt(4 * p);
    let (lo, hi) = (p + 1 - w, p + 1 + w);
    let ec = FpCurve { a, p };
    let tc = FpCurve {
        a: mulm(a, mulm(d, d, p), p),
        p,
    };
    let mut cands: Option<BTreeSet<u64>> = None;
    for x in 0..=200u64 {
        let x2 = mulm(x, x, p);
        let rhs = addm(addm(mulm(x2, x, p), mulm(a, x, p), p), b, p);
        if rhs == 0 {
            continue; // 2-torsion x; gives only parity information
        }
        let new: BTreeSet<u64> = if powmod(rhs, (p - 1) / 2, p) == 1 {
            let y = sqrt_mod(rhs, p).expect("residue has a root");
            order_candidates(&ec, (x, y), lo, hi).into_iter().collect()
        } else {
            // (d x, sqrt(d^3 rhs)) lies on the twist; its order m maps
            // to the curve order 2p + 2 - m.
            let tx = mulm(d, x, p);
            let ty = sqrt_mod(mulm(mulm(d, d, p), mulm(d, rhs, p), p), p)
                .expect("twisted value is a residue");
            order_candidates(&tc, (tx, ty), lo, hi)
                .into_iter()
                .map(|m| 2 * p + 2 - m)
                .collect()
        };
        cands = Some(match cands {
            None => new,
            Some(old) => old.intersection(&new).copied().collect(),
        });
        let set = cands.as_ref().unwrap();
        if set.len() == 1 {
            return Ok(*set.iter().next().unwrap());
        }
        if set.is_empty() {
            return Err(Error::domain(format!(
                "inconsistent order candidates at p = {p} (is the reduction good?)"
            )));
        }
    }
    Err(Error::domain(format!(
        "group order at p = {p} still ambiguous after 200 sample points"
    )))
}

impl PointCounter for Bsgs {
    fn name(&self) -> &'static str {
        "bsgs"
    }

    fn count(&self, curve: &CurveQ, p: u64) -> Result<u64> {
        if p < MESTRE_MIN {
            return LegendreSum.count(curve, p);
        }
        if p > BSGS_LIMIT {
            return Err(Error::domain(format!(
                "bsgs counter supports p <= {BSGS_LIMIT}, got {p}"
            )));
        }
        shanks_mestre(curve, p)
    }
}

impl PointCounter for Auto {
    fn name(&self) -> &'static str {
        "auto"
    }

    fn count(&self, curve: &CurveQ, p: u64) -> Result<u64> {
        if p == 2 {
            Enumerate.count(curve, p)
        } else if p < AUTO_BSGS_FROM {
            LegendreSum.count(curve, p)
        } else {
            Bsgs.count(curve, p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_prime, legendre_symbol, primes_up_to};

    fn curve_24a3() -> CurveQ {
        CurveQ::new([0, -1, 0, -64, 220]).unwrap()
    }

    fn curve_32a4() -> CurveQ {
        CurveQ::new([0, 0, 0, -11, 14]).unwrap()
    }

    fn curve_15a7() -> CurveQ {
        CurveQ::new([1, 1, 1, -80, 242]).unwrap()
    }

    fn good_primes(curve: &CurveQ, limit: u64) -> Vec<u64> {
        primes_up_to(limit)
            .into_iter()
            .filter(|&p| curve.reduction_type(p) == super::super::ReductionType::Good)
            .collect()
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(counter_by_name("legendre").unwrap().name(), "legendre");
        assert_eq!(counter_names(), vec!["enumerate", "legendre", "bsgs", "auto"]);
        assert!(counter_by_name("schoof").is_err());
    }

    #[test]
    fn chi_sum_matches_symbol_sum() {
        for curve in [curve_24a3(), curve_32a4(), curve_15a7()] {
            let [a1, a2, a3, a4, a6] = curve.coefficients();
            let (b2, b4, b6) = (a1 * a1 + 4 * a2, 2 * a4 + a1 * a3, a3 * a3 + 4 * a6);
            for p in primes_up_to(200).into_iter().skip(1) {
                let naive: i64 = (0..p as i64)
                    .map(|x| {
                        let g = 4 * x * x * x + b2 * x * x + 2 * b4 * x + b6;
                        legendre_symbol(g, p).unwrap() as i64
                    })
                    .sum();
                assert_eq!(chi_sum(&curve, p), naive, "{} at {p}", curve.equation());
            }
        }
    }

    #[test]
    fn enumerate_agrees_with_legendre() {
        for curve in [curve_24a3(), curve_32a4(), curve_15a7()] {
            for p in good_primes(&curve, 300) {
                if p == 2 {
                    continue;
                }
                assert_eq!(
                    Enumerate.count(&curve, p).unwrap(),
                    LegendreSum.count(&curve, p).unwrap(),
                    "{} at {p}",
                    curve.equation()
                );
            }
        }
    }

    #[test]
    fn bsgs_agrees_with_legendre_small() {
        for curve in [curve_24a3(), curve_32a4(), curve_15a7()] {
            for p in good_primes(&curve, 3000) {
                assert_eq!(
                    Bsgs.count(&curve, p).unwrap(),
                    LegendreSum.count(&curve, p).unwrap(),
                    "{} at {p}",
                    curve.equation()
                );
            }
        }
    }

    #[test]
    fn bsgs_agrees_with_legendre_at_ten_million() {
        let p = (10_000_000u64..).find(|&n| is_prime(n)).unwrap();
        let curve = curve_24a3();
        assert_eq!(curve.reduction_type(p), super::super::ReductionType::Good);
        assert_eq!(
            Bsgs.count(&curve, p).unwrap(),
            LegendreSum.count(&curve, p).unwrap()
        );
    }

    #[test]
    fn sqrt_mod_exhaustive_small() {
        for p in [3u64, 5, 7, 13, 17, 29, 97, 101] {
            for a in 0..p {
                match sqrt_mod(a, p) {
                    Some(r) => assert_eq!(mulm(r, r, p), a, "sqrt({a}) mod {p}"),
                    None => {
                        assert!(
                            (0..p).all(|y| mulm(y, y, p) != a),
                            "{a} is a residue mod {p} but sqrt_mod returned None"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn enumerate_cap() {
        assert!(Enumerate.count(&curve_24a3(), 3001).is_err());
    }

    #[test]
    fn counts_at_two() {
        // 15a7 has good reduction at 2 with a_2 = -1, so 4 points.
        assert_eq!(Enumerate.count(&curve_15a7(), 2).unwrap(), 4);
        assert_eq!(Auto.count(&curve_15a7(), 2).unwrap(), 4);
    }
}
