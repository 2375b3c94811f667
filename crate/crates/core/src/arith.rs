//! Exact integer arithmetic: factorization, quadratic residues, sums of
//! two squares, and prime generation.
//!
//! Everything here is deterministic and exact. Factorization is trial
//! division by sieved primes up to 10^6 followed by Brent's cycle variant
//! of Pollard rho for the (rare) larger cofactors; intended inputs stay
//! below 10^12.

use crate::{Error, Result};

/// Trial division covers primes up to this bound before rho takes over.
const TRIAL_LIMIT: u64 = 1_000_000;

/// A positive integer written as an ordered product of prime powers.
///
/// Primes are strictly increasing and every exponent is at least 1;
/// `factorize(1)` is the empty product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// The integer this factorization represents.
    pub fn value(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product::<u64>()
            .max(1)
    }

    /// Exponent of `p` in the factored integer (0 if `p` does not divide it).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// The largest square-free divisor.
    pub fn radical(&self) -> u64 {
        self.factors.iter().map(|&(p, _)| p).product::<u64>().max(1)
    }
}

/// All primes `<= limit` in increasing order (sieve of Eratosthenes).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

/// Smallest-prime-factor table for fast repeated factorization of all
/// integers up to a fixed limit. Used by the Hecke extension and the
/// interval sweeps, where millions of small factorizations are needed.
pub struct FactorSieve {
    spf: Vec<u32>,
}

impl FactorSieve {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut m = i;
                while m <= n {
                    if spf[m] == 0 {
                        spf[m] = i as u32;
                    }
                    m += i;
                }
            }
        }
        FactorSieve { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// Factorize `n`, which must be within the sieve limit.
    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 {
            return Err(Error::domain("cannot factorize 0"));
        }
        if n > self.limit() {
            return Err(Error::domain(format!(
                "{n} exceeds factor sieve limit {}",
                self.limit()
            )));
        }
        let mut factors = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as u64;
            let mut e = 0u32;
            while m as u64 % p == 0 {
                m /= p as usize;
                e += 1;
            }
            factors.push((p, e));
        }
        factors.sort_unstable();
        Ok(Factorization { factors })
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (the 12 smallest prime bases decide
/// primality for everything below 3.3 * 10^24).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho. Returns a nontrivial factor of the
/// (odd, composite) input.
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 3 && n % 2 == 1 && !is_prime(n));
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut count = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = num_integer::gcd(x.abs_diff(y), n);
            count += 1;
            if count > 1 << 24 {
                break;
            }
        }
        if d != n && d != 1 {
            return d;
        }
        c += 1;
    }
}

/// Factorize a positive integer exactly.
///
/// Trial division by sieved primes up to 10^6, then a primality test and
/// Pollard rho on whatever cofactor remains. Errors on `n = 0`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::domain("cannot factorize 0"));
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p <= TRIAL_LIMIT && p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    if m > 1 {
        let mut stack = vec![m];
        while let Some(k) = stack.pop() {
            if is_prime(k) {
                match factors.iter_mut().find(|f| f.0 == k) {
                    Some(f) => f.1 += 1,
                    None => factors.push((k, 1)),
                }
            } else {
                let d = pollard_rho(k);
                stack.push(d);
                stack.push(k / d);
            }
        }
    }
    factors.sort_unstable();
    Ok(Factorization { factors })
}

/// Legendre symbol (a/p) for an odd prime p, via Euler's criterion.
///
/// Returns 0 when p divides a, 1 when a is a nonzero square mod p, and -1
/// otherwise. Rejects even or composite p.
pub fn legendre_symbol(a: i64, p: u64) -> Result<i32> {
    if p == 2 || !is_prime(p) {
        return Err(Error::domain(format!("{p} is not an odd prime")));
    }
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return Ok(0);
    }
    let e = powmod(r, (p - 1) / 2, p);
    Ok(if e == 1 { 1 } else { -1 })
}

/// Whether n is a sum of two squares (a = 0 allowed), decided through the
/// factorization criterion: every prime = 3 (mod 4) divides n to an even
/// exponent.
pub fn is_sum_of_two_squares(n: u64) -> Result<bool> {
    let f = factorize(n)?;
    Ok(is_s2s_factored(&f))
}

/// The two-squares criterion applied to an existing factorization.
pub fn is_s2s_factored(f: &Factorization) -> bool {
    f.factors()
        .iter()
        .all(|&(p, e)| p % 4 != 3 || e % 2 == 0)
}

/// Largest r with r^2 <= n.
pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// Square root of -1 mod p for p = 1 (mod 4): a nonresidue raised to (p-1)/4.
fn sqrt_minus_one(p: u64) -> u64 {
    let mut g = 2u64;
    loop {
        if powmod(g, (p - 1) / 2, p) == p - 1 {
            return powmod(g, (p - 1) / 4, p);
        }
        g += 1;
    }
}

/// Hermite-Serret descent: write a prime p = 1 (mod 4) as a^2 + b^2.
fn prime_two_squares(p: u64) -> (u64, u64) {
    let x = sqrt_minus_one(p);
    let mut a = p;
    let mut b = x;
    while b * b > p {
        let t = a % b;
        a = b;
        b = t;
    }
    let c = isqrt(p - b * b);
    debug_assert_eq!(b * b + c * c, p);
    (b.min(c), b.max(c))
}

/// An explicit representation n = a^2 + b^2 (a <= b), when one exists.
///
/// Built by descent on the prime factorization and composed with the
/// Gaussian-integer product identity; the predicate itself never needs
/// this witness.
pub fn two_squares_witness(n: u64) -> Result<Option<(u64, u64)>> {
    let f = factorize(n)?;
    if !is_s2s_factored(&f) {
        return Ok(None);
    }
    // (a,b) as the Gaussian integer a + bi; multiply per prime power.
    let (mut a, mut b) = (1i128, 0i128);
    let mul = |(a, b): (i128, i128), (c, d): (i128, i128)| (a * c - b * d, a * d + b * c);
    for &(p, e) in f.factors() {
        if p == 2 {
            for _ in 0..e {
                (a, b) = mul((a, b), (1, 1));
            }
        } else if p % 4 == 1 {
            let (x, y) = prime_two_squares(p);
            for _ in 0..e {
                (a, b) = mul((a, b), (x as i128, y as i128));
            }
        } else {
            // p = 3 (mod 4), even exponent: contributes p^(e/2) as a real factor.
            let q = (p as i128).pow(e / 2);
            (a, b) = (a * q, b * q);
        }
    }
    let (a, b) = (a.unsigned_abs() as u64, b.unsigned_abs() as u64);
    debug_assert_eq!(a * a + b * b, n);
    Ok(Some((a.min(b), a.max(b))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(24).unwrap().factors(), &[(2, 3), (3, 1)]);
        assert_eq!(factorize(1).unwrap().factors(), &[]);
        // trial division up to sqrt(10009) finds no divisor
        assert_eq!(factorize(10009).unwrap().factors(), &[(10009, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_large_semiprime() {
        // 1000003 * 1000033, both above the trial-division bound
        let n = 1_000_003u64 * 1_000_033;
        let f = factorize(n).unwrap();
        assert_eq!(f.factors(), &[(1_000_003, 1), (1_000_033, 1)]);
        assert_eq!(f.value(), n);
    }

    #[test]
    fn two_squares_examples() {
        assert!(is_sum_of_two_squares(25).unwrap()); // 3^2 + 4^2
        assert!(!is_sum_of_two_squares(21).unwrap()); // 3 and 7 to odd exponent
        assert!(is_sum_of_two_squares(10009).unwrap()); // 3^2 + 100^2
        assert!(is_sum_of_two_squares(9).unwrap()); // 0^2 + 3^2, a = 0 counts
    }

    #[test]
    fn two_squares_brute_force_agreement() {
        // independent oracle: exhaustive search over a^2 + b^2 = n
        let brute = |n: u64| {
            let mut a = 0;
            while a * a * 2 <= n {
                let rest = n - a * a;
                let b = isqrt(rest);
                if b * b == rest {
                    return true;
                }
                a += 1;
            }
            false
        };
        for n in 1..=20_000u64 {
            assert_eq!(
                is_sum_of_two_squares(n).unwrap(),
                brute(n),
                "two-squares predicate disagrees with brute force at n = {n}"
            );
        }
    }

    #[test]
    fn witness_matches_predicate() {
        for n in 1..=5_000u64 {
            match two_squares_witness(n).unwrap() {
                Some((a, b)) => assert_eq!(a * a + b * b, n),
                None => assert!(!is_sum_of_two_squares(n).unwrap()),
            }
        }
        assert_eq!(two_squares_witness(10009).unwrap(), Some((3, 100)));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(1, 7).unwrap(), 1);
        assert_eq!(legendre_symbol(2, 7).unwrap(), 1); // 3^2 = 2 (mod 7)
        assert_eq!(legendre_symbol(3, 7).unwrap(), -1); // squares mod 7 are {1,2,4}
        assert_eq!(legendre_symbol(14, 7).unwrap(), 0);
        assert!(legendre_symbol(3, 9).is_err());
        assert!(legendre_symbol(3, 2).is_err());
    }

    #[test]
    fn legendre_exhaustive_squaring_oracle() {
        for p in primes_up_to(1000).into_iter().filter(|&p| p > 2) {
            let mut qr = vec![false; p as usize];
            for x in 1..p {
                qr[(x * x % p) as usize] = true;
            }
            for a in 0..p as i64 {
                let expect = if a == 0 {
                    0
                } else if qr[a as usize] {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre_symbol(a, p).unwrap(), expect, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn primes_examples() {
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(30).len(), 10); // pi(30) = 10
    }

    #[test]
    fn factor_sieve_matches_factorize() {
        let sieve = FactorSieve::new(10_000);
        for n in 1..=10_000u64 {
            assert_eq!(sieve.factorize(n).unwrap(), factorize(n).unwrap());
        }
        assert!(sieve.factorize(10_001).is_err());
        assert!(sieve.factorize(0).is_err());
    }

    proptest! {
        #[test]
        fn factorization_reconstructs(n in 1u64..1_000_000_000_000) {
            let f = factorize(n).unwrap();
            let mut prev = 0u64;
            for &(p, e) in f.factors() {
                prop_assert!(p > prev, "primes must strictly increase");
                prop_assert!(e >= 1);
                prop_assert!(is_prime(p));
                prev = p;
            }
            prop_assert_eq!(f.value(), n);
        }
    }
}
