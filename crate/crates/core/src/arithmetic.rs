//! Integer utilities: factorization, valuations, squarefreeness, modular helpers.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_with::{serde_as, DisplayFromStr};
use std::sync::OnceLock;

pub type BigRational = num_rational::BigRational;

/// Trial division bound used by [`factorize`].
pub const TRIAL_BOUND: u64 = 1_000_000;
/// Trial division bound used by [`factorize_u64`] before switching to rho.
pub const FAST_TRIAL_BOUND: u64 = 1 << 12;

/// Signed factorization `sign * prod p^e`.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Factorization {
    pub sign: i8,
    #[serde_as(as = "Vec<(DisplayFromStr, _)>")]
    pub factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn value(&self) -> BigInt {
        let mut v = BigInt::from(self.sign);
        for (p, e) in &self.factors {
            v *= num_traits::pow(p.clone(), *e as usize);
        }
        v
    }

    pub fn exponent_of(&self, p: &BigInt) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }
}

fn small_primes() -> &'static [u64] {
    static P: OnceLock<Vec<u64>> = OnceLock::new();
    P.get_or_init(|| primes_up_to(TRIAL_BOUND))
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Modular inverse, `None` when `gcd(a, m) != 1`.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let e = a.rem_euclid(m).extended_gcd(&m);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m))
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

// Bases 2..41 are deterministic below 3.3e24; beyond that the test is probabilistic.
const MR_BIG_BASES: [u64; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for &a in &MR_BIG_BASES {
        let a = BigUint::from(a);
        if (n % &a).is_zero() {
            return false;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: &BigInt) -> bool {
    n.sign() == Sign::Plus && is_prime_big(n.magnitude())
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Brent's variant of Pollard rho; `n` odd composite.
fn rho_u64(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut q) = (2u64, 2u64, 1u64, 1u64);
        let mut r = 1u64;
        let m = 128u64;
        let mut ys = 0u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = rho_u64(n);
    split_u64(d, out);
    split_u64(n / d, out);
}

fn collect(mut ps: Vec<u64>) -> Vec<(u64, u32)> {
    ps.sort_unstable();
    let mut res: Vec<(u64, u32)> = Vec::new();
    for p in ps {
        match res.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => res.push((p, 1)),
        }
    }
    res
}

/// Factorization of a positive 64-bit integer (trial division by small primes, then rho).
pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0);
    let mut ps = Vec::new();
    for &p in small_primes() {
        if p > FAST_TRIAL_BOUND || p * p > n {
            break;
        }
        while n.is_multiple_of(p) {
            ps.push(p);
            n /= p;
        }
    }
    split_u64(n, &mut ps);
    collect(ps)
}

fn rho_big(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let (mut x, mut y) = (BigUint::from(2u32), BigUint::from(2u32));
        let mut g = one.clone();
        while g == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            g = diff.gcd(n);
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn split_big(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if let Some(v) = n.to_u64() {
        let mut ps = Vec::new();
        split_u64(v, &mut ps);
        out.extend(ps.into_iter().map(BigUint::from));
        return;
    }
    if is_prime_big(&n) {
        out.push(n);
        return;
    }
    let d = rho_big(&n);
    let q = &n / &d;
    split_big(d, out);
    split_big(q, out);
}

/// Exact factorization of a nonzero integer: trial division to [`TRIAL_BOUND`],
/// then Pollard rho with Miller-Rabin on cofactors.
pub fn factorize(n: &BigInt) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::Zero);
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.magnitude().clone();
    let mut ps: Vec<BigUint> = Vec::new();
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        loop {
            let (q, r) = m.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            ps.push(pb.clone());
            m = q;
        }
    }
    split_big(m, &mut ps);
    ps.sort();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    for p in ps {
        let p = BigInt::from(p);
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { sign, factors })
}

/// Largest `e` with `p^e | n`.
pub fn valuation(n: &BigInt, p: &BigInt) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::Zero);
    }
    if *p < BigInt::from(2) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let mut m = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Ok(e);
        }
        m = q;
        e += 1;
    }
}

/// `v_p(n)` for machine integers; `None` when `n = 0`.
#[inline]
pub fn val_i128(mut n: i128, p: i128) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    Some(e)
}

/// `v_p(n)` capped at `cap`, with `v_p(0) = cap`.
#[inline]
pub fn val_capped(n: &BigInt, p: u64, cap: u32) -> u32 {
    if n.is_zero() {
        return cap;
    }
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut e = 0;
    while e < cap {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        m = q;
        e += 1;
    }
    e
}

pub fn is_squarefree(n: &BigInt) -> Result<bool> {
    let f = factorize(n)?;
    Ok(f.factors.iter().all(|(_, e)| *e == 1))
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// `floor(n^(1/k))` for `n >= 0`.
pub fn iroot(n: &BigInt, k: u32) -> BigInt {
    n.nth_root(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(mut n: u64) -> Vec<(u64, u32)> {
        let mut r = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                r.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            r.push((n, 1));
        }
        r
    }

    #[test]
    fn factor_examples() {
        let f = factorize(&big(-23296)).unwrap();
        assert_eq!(f.sign, -1);
        let got: Vec<(i64, u32)> = f
            .factors
            .iter()
            .map(|(p, e)| (p.to_i64().unwrap(), *e))
            .collect();
        assert_eq!(got, vec![(2, 8), (7, 1), (13, 1)]);
        assert_eq!(f.value(), big(-23296));
        let one = factorize(&big(1)).unwrap();
        assert!(one.is_unit() && one.sign == 1);
        let f = factorize(&big(91)).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert!(factorize(&big(0)).is_err());
    }

    #[test]
    fn factor_large_against_trial() {
        for n in [
            999_999_000_001u64,
            1_000_000_007 * 998_244_353,
            600_851_475_143,
            2u64.pow(61) - 1,
        ] {
            let f = factorize(&BigInt::from(n)).unwrap();
            assert_eq!(f.value(), BigInt::from(n));
            let fast = factorize_u64(n);
            let as_big: Vec<(BigInt, u32)> =
                fast.iter().map(|&(p, e)| (BigInt::from(p), e)).collect();
            assert_eq!(as_big, f.factors);
        }
        for n in 1..5000u64 {
            assert_eq!(factorize_u64(n), trial(n));
        }
        // beyond 64 bits
        let n = BigInt::from(18446744073709551557u64) * BigInt::from(1_000_000_007u64);
        let f = factorize(&n).unwrap();
        assert_eq!(f.factors.len(), 2);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&big(-921875), &big(5)).unwrap(), 6);
        assert_eq!(valuation(&big(7), &big(7)).unwrap(), 1);
        assert_eq!(valuation(&big(6), &big(5)).unwrap(), 0);
        assert!(valuation(&big(0), &big(5)).is_err());
    }

    #[test]
    fn squarefree_examples() {
        assert!(is_squarefree(&big(91)).unwrap());
        assert!(is_squarefree(&big(1)).unwrap());
        assert!(!is_squarefree(&big(25)).unwrap());
    }

    #[test]
    fn primality() {
        let ps = primes_up_to(10_000);
        for n in 0..10_000u64 {
            assert_eq!(is_prime_u64(n), ps.binary_search(&n).is_ok());
        }
        assert!(is_prime_big(&(BigUint::from(2u32).pow(89) - 1u32)));
        assert!(!is_prime_big(&(BigUint::from(2u32).pow(89) + 1u32)));
    }
}
