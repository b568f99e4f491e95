//! Outward-rounded interval arithmetic on dyadic fixed-point numbers.
//!
//! An [`IntervalReal`] with precision `p` stores integers `lo <= hi` and denotes
//! the real interval `[lo * 2^-p, hi * 2^-p]`. Every operation rounds the lower
//! end down and the upper end up, so the exact result of the operation applied
//! to any points of the operands lies in the returned interval.

use crate::arithmetic::BigRational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

pub const DEFAULT_PREC: u32 = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalReal {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k as usize
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn floor_shr(a: &BigInt, k: u32) -> BigInt {
    floor_div(a, &pow2(k))
}

fn ceil_shr(a: &BigInt, k: u32) -> BigInt {
    ceil_div(a, &pow2(k))
}

impl IntervalReal {
    pub fn from_bounds(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        IntervalReal { lo, hi, prec }
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        let v = n << prec as usize;
        IntervalReal {
            lo: v.clone(),
            hi: v,
            prec,
        }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(n), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_ratio(q: &BigRational, prec: u32) -> Self {
        let n = q.numer() << prec as usize;
        IntervalReal {
            lo: floor_div(&n, q.denom()),
            hi: ceil_div(&n, q.denom()),
            prec,
        }
    }

    pub fn from_frac(n: i64, d: i64, prec: u32) -> Self {
        Self::from_ratio(&BigRational::new(BigInt::from(n), BigInt::from(d)), prec)
    }

    /// Exact enclosure of an `f64` (every finite double is dyadic).
    pub fn from_f64(x: f64, prec: u32) -> Self {
        let q = BigRational::from_float(x).expect("finite float");
        Self::from_ratio(&q, prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn lo_raw(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_raw(&self) -> &BigInt {
        &self.hi
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.lo.clone(), pow2(self.prec))
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(self.hi.clone(), pow2(self.prec))
    }

    /// Change precision, rounding outward.
    pub fn with_prec(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = (prec - self.prec) as usize;
                IntervalReal {
                    lo: &self.lo << s,
                    hi: &self.hi << s,
                    prec,
                }
            }
            Ordering::Less => {
                let s = self.prec - prec;
                IntervalReal {
                    lo: floor_shr(&self.lo, s),
                    hi: ceil_shr(&self.hi, s),
                    prec,
                }
            }
        }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let p = self.prec.max(other.prec);
        (self.with_prec(p), other.with_prec(p))
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = self.aligned(o);
        IntervalReal {
            lo: &a.lo + &b.lo,
            hi: &a.hi + &b.hi,
            prec: a.prec,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (a, b) = self.aligned(o);
        IntervalReal {
            lo: &a.lo - &b.hi,
            hi: &a.hi - &b.lo,
            prec: a.prec,
        }
    }

    pub fn neg(&self) -> Self {
        IntervalReal {
            lo: -&self.hi,
            hi: -&self.lo,
            prec: self.prec,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.aligned(o);
        let ps = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let mn = ps.iter().min().unwrap();
        let mx = ps.iter().max().unwrap();
        IntervalReal {
            lo: floor_shr(mn, a.prec),
            hi: ceil_shr(mx, a.prec),
            prec: a.prec,
        }
    }

    pub fn sqr(&self) -> Self {
        let r = self.mul(self);
        if self.contains_zero() {
            IntervalReal {
                lo: BigInt::zero(),
                hi: r.hi,
                prec: r.prec,
            }
        } else {
            r
        }
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        let (x, y) = (&self.lo * n, &self.hi * n);
        if n.is_negative() {
            IntervalReal {
                lo: y,
                hi: x,
                prec: self.prec,
            }
        } else {
            IntervalReal {
                lo: x,
                hi: y,
                prec: self.prec,
            }
        }
    }

    pub fn div_int(&self, n: &BigInt) -> Self {
        assert!(!n.is_zero(), "division by zero");
        let (a, b) = if n.is_negative() {
            (-&self.hi, -&self.lo)
        } else {
            (self.lo.clone(), self.hi.clone())
        };
        let m = n.abs();
        IntervalReal {
            lo: floor_div(&a, &m),
            hi: ceil_div(&b, &m),
            prec: self.prec,
        }
    }

    /// Division; panics if the divisor contains zero.
    pub fn div(&self, o: &Self) -> Self {
        self.checked_div(o).expect("divisor interval contains zero")
    }

    pub fn checked_div(&self, o: &Self) -> Option<Self> {
        if o.contains_zero() {
            return None;
        }
        let (a, b) = self.aligned(o);
        let sh = a.prec as usize;
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for x in [&a.lo, &a.hi] {
            for y in [&b.lo, &b.hi] {
                let n = x << sh;
                let f = floor_div(&n, y);
                let c = ceil_div(&n, y);
                lo = Some(match lo {
                    Some(l) if l <= f => l,
                    _ => f,
                });
                hi = Some(match hi {
                    Some(h) if h >= c => h,
                    _ => c,
                });
            }
        }
        Some(IntervalReal {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
            prec: a.prec,
        })
    }

    pub fn recip(&self) -> Self {
        Self::one(self.prec).div(self)
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut r = Self::one(self.prec);
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.sqr();
            }
        }
        r
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        let n = q.numer() << self.prec as usize;
        &self.lo * q.denom() <= n && n <= &self.hi * q.denom()
    }

    pub fn contains_interval(&self, o: &Self) -> bool {
        let (a, b) = self.aligned(o);
        a.lo <= b.lo && b.hi <= a.hi
    }

    /// Some(true) if every point is < every point of `o`, Some(false) if every point is >=, else None.
    pub fn lt(&self, o: &Self) -> Option<bool> {
        let (a, b) = self.aligned(o);
        if a.hi < b.lo {
            Some(true)
        } else if a.lo >= b.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn hull(&self, o: &Self) -> Self {
        let (a, b) = self.aligned(o);
        IntervalReal {
            lo: a.lo.min(b.lo),
            hi: a.hi.max(b.hi),
            prec: a.prec,
        }
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        let (a, b) = self.aligned(o);
        let lo = a.lo.max(b.lo);
        let hi = a.hi.min(b.hi);
        if lo <= hi {
            Some(IntervalReal {
                lo,
                hi,
                prec: a.prec,
            })
        } else {
            None
        }
    }

    /// Widen by `eps` on both sides.
    pub fn widen(&self, eps: &BigRational) -> Self {
        let e = Self::from_ratio(eps, self.prec);
        IntervalReal {
            lo: &self.lo - &e.hi,
            hi: &self.hi + &e.hi,
            prec: self.prec,
        }
    }

    /// The interval `[-r, r]` for `r >= 0`.
    pub fn symmetric(r: &Self) -> Self {
        IntervalReal {
            lo: -&r.hi,
            hi: r.hi.clone(),
            prec: r.prec,
        }
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, pow2(self.prec))
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn mid_f64(&self) -> f64 {
        BigRational::new(&self.lo + &self.hi, pow2(self.prec + 1))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    pub fn lo_f64(&self) -> f64 {
        self.lower().to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.upper().to_f64().unwrap_or(f64::NAN)
    }

    pub fn midpoint(&self) -> Self {
        let m = floor_div(&(&self.lo + &self.hi), &BigInt::from(2));
        IntervalReal {
            lo: m.clone(),
            hi: m,
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            IntervalReal {
                lo: BigInt::zero(),
                hi: (-&self.lo).max(self.hi.clone()),
                prec: self.prec,
            }
        } else if self.hi.is_negative() || (self.hi.is_zero() && self.lo.is_negative()) {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Decimal lower and upper bounds with `digits` fractional digits.
    pub fn decimal_bounds(&self, digits: u32) -> (String, String) {
        let ten = num_traits::pow(BigInt::from(10), digits as usize);
        let d = pow2(self.prec);
        let l = floor_div(&(&self.lo * &ten), &d);
        let h = ceil_div(&(&self.hi * &ten), &d);
        (fmt_fixed(&l, digits), fmt_fixed(&h, digits))
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.hi.is_negative(), "sqrt of negative interval");
        let p = self.prec as usize;
        let lo = if self.lo.is_positive() {
            (&self.lo << p).sqrt()
        } else {
            BigInt::zero()
        };
        let hs = &self.hi << p;
        let mut hi = hs.sqrt();
        if &hi * &hi != hs {
            hi += 1;
        }
        IntervalReal {
            lo,
            hi,
            prec: self.prec,
        }
    }

    /// Enclosure of `n^(1/k)` for an integer `n >= 0`.
    pub fn root_of_int(n: &BigInt, k: u32, prec: u32) -> Self {
        assert!(!n.is_negative() && k >= 1);
        let s = n << (prec as usize * k as usize);
        let lo = s.nth_root(k);
        let hi = if num_traits::pow(lo.clone(), k as usize) == s {
            lo.clone()
        } else {
            &lo + 1
        };
        IntervalReal { lo, hi, prec }
    }

    /// Enclosure of `base^(num/den)` for a positive integer base.
    pub fn pow_frac(base: u64, num: i64, den: u32, prec: u32) -> Self {
        assert!(base > 0 && den > 0);
        let p = num_traits::pow(BigInt::from(base), num.unsigned_abs() as usize);
        let work = prec + 32;
        let r = Self::root_of_int(&p, den, work);
        let r = if num < 0 { r.recip() } else { r };
        r.with_prec(prec)
    }

    /// `exp` on intervals (monotone).
    pub fn exp(&self) -> Self {
        let lo = exp_point(&self.lo, self.prec);
        let hi = if self.lo == self.hi {
            lo.clone()
        } else {
            exp_point(&self.hi, self.prec)
        };
        IntervalReal {
            lo: lo.lo,
            hi: hi.hi,
            prec: self.prec,
        }
    }

    /// Natural logarithm on positive intervals (monotone).
    pub fn ln(&self) -> Self {
        assert!(self.lo.is_positive(), "ln of non-positive interval");
        let lo = ln_point(&self.lo, self.prec);
        let hi = if self.lo == self.hi {
            lo.clone()
        } else {
            ln_point(&self.hi, self.prec)
        };
        IntervalReal {
            lo: lo.lo,
            hi: hi.hi,
            prec: self.prec,
        }
    }

    pub fn pi(prec: u32) -> Self {
        let w = prec + 32;
        let a = atan_inv(5, w).mul_int(&BigInt::from(16));
        let b = atan_inv(239, w).mul_int(&BigInt::from(4));
        a.sub(&b).with_prec(prec)
    }

    /// Enclosures of `(cos, sin)` of `2*pi*k/n`.
    pub fn cos_sin_2pi(k: i64, n: i64, prec: u32) -> (Self, Self) {
        assert!(n > 0);
        let mut k = k.rem_euclid(n);
        if 2 * k > n {
            k -= n;
        }
        let w = prec + 40;
        let x = Self::pi(w)
            .mul_int(&BigInt::from(2 * k))
            .div_int(&BigInt::from(n));
        // |x| <= pi, so the tail after term j is below twice term j once j > 4.
        let mut c = Self::one(w);
        let mut s = Self::zero(w);
        let mut t = Self::one(w);
        let eps = BigRational::new(BigInt::one(), pow2(w - 4));
        let mut j: i64 = 0;
        loop {
            j += 1;
            t = t.mul(&x).div_int(&BigInt::from(j));
            match j % 4 {
                0 => c = c.add(&t),
                1 => s = s.add(&t),
                2 => c = c.sub(&t),
                _ => s = s.sub(&t),
            }
            let mag = t.abs().upper();
            if j > 4 && mag < eps {
                let tail = &mag * BigRational::from_integer(BigInt::from(2)) + &eps;
                return (
                    c.widen(&tail).with_prec(prec),
                    s.widen(&tail).with_prec(prec),
                );
            }
        }
    }

    pub fn ln2(prec: u32) -> Self {
        let w = prec + 16;
        atanh_small(&Self::from_frac(1, 3, w), w)
            .mul_int(&BigInt::from(2))
            .with_prec(prec)
    }
}

fn fmt_fixed(v: &BigInt, digits: u32) -> String {
    let neg = v.is_negative();
    let s = v.abs().to_string();
    let d = digits as usize;
    let s = if s.len() <= d {
        format!("{}{}", "0".repeat(d + 1 - s.len()), s)
    } else {
        s
    };
    let (ip, fp) = s.split_at(s.len() - d);
    let body = if d == 0 {
        ip.to_string()
    } else {
        format!("{ip}.{fp}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn bits(n: &BigInt) -> i64 {
    n.bits() as i64
}

/// exp(m * 2^-prec) enclosed at precision `prec`.
fn exp_point(m: &BigInt, prec: u32) -> IntervalReal {
    // reduce so that |z| <= 2^-10
    let s = (bits(m) - prec as i64 + 10).max(0) as u32;
    let w = prec + 40 + 2 * s;
    let raw = m << (w - prec - s) as usize;
    let z = IntervalReal {
        lo: raw.clone(),
        hi: raw,
        prec: w,
    };
    let mut sum = IntervalReal::one(w);
    let mut term = IntervalReal::one(w);
    let eps = BigRational::new(BigInt::one(), pow2(w - 10));
    let mut k = 1u32;
    loop {
        term = term.mul(&z).div_int(&BigInt::from(k));
        sum = sum.add(&term);
        k += 1;
        let mag = term.abs().upper();
        if mag < eps {
            break;
        }
    }
    // remainder bound: |z|^k/k! * 2 <= 2 * |term| * |z| / k
    let rem = term
        .abs()
        .mul(&z.abs())
        .mul_int(&BigInt::from(2))
        .div_int(&BigInt::from(k));
    sum = sum.add(&IntervalReal::symmetric(&rem));
    for _ in 0..s {
        sum = sum.sqr();
    }
    sum.with_prec(prec)
}

fn atanh_small(u: &IntervalReal, w: u32) -> IntervalReal {
    // u in [0, 1/3]
    let u2 = u.sqr();
    let mut pw = u.clone();
    let mut sum = u.clone();
    let eps = BigRational::new(BigInt::one(), pow2(w - 10));
    let mut k = 1u32;
    loop {
        pw = pw.mul(&u2);
        let t = pw.div_int(&BigInt::from(2 * k + 1));
        sum = sum.add(&t);
        k += 1;
        if pw.upper() < eps {
            break;
        }
    }
    // tail <= pw * u^2 / (1 - u^2) <= pw * (9/8) * u^2
    let tail = pw
        .mul(&u2)
        .mul_int(&BigInt::from(9))
        .div_int(&BigInt::from(8));
    let tail = IntervalReal {
        lo: BigInt::zero(),
        hi: tail.hi,
        prec: w,
    };
    sum.add(&tail)
}

fn ln_point(m: &BigInt, prec: u32) -> IntervalReal {
    // value = m 2^-prec = 2^e t with t in [1, 2)
    let e = bits(m) - 1 - prec as i64;
    let w = prec + 40 + (64 - e.unsigned_abs().leading_zeros());
    let t = if e >= 0 {
        IntervalReal {
            lo: m.clone(),
            hi: m.clone(),
            prec: prec + e as u32,
        }
        .with_prec(w)
    } else {
        let sh = (-e) as usize;
        IntervalReal {
            lo: m << sh,
            hi: m << sh,
            prec,
        }
        .with_prec(w)
    };
    let one = IntervalReal::one(w);
    let u = t.sub(&one).div(&t.add(&one));
    let lt = atanh_small(&u, w).mul_int(&BigInt::from(2));
    let l2 = IntervalReal::ln2(w);
    lt.add(&l2.mul_int(&BigInt::from(e))).with_prec(prec)
}

fn atan_inv(n: i64, w: u32) -> IntervalReal {
    // atan(1/n) = sum (-1)^k / ((2k+1) n^(2k+1)); alternating, decreasing
    let n2 = BigInt::from(n * n);
    let mut pw = IntervalReal::one(w).div_int(&BigInt::from(n));
    let mut sum = pw.clone();
    let eps = BigRational::new(BigInt::one(), pow2(w - 10));
    let mut k = 1i64;
    loop {
        pw = pw.div_int(&n2);
        let t = pw.div_int(&BigInt::from(2 * k + 1));
        if k % 2 == 1 {
            sum = sum.sub(&t);
        } else {
            sum = sum.add(&t);
        }
        k += 1;
        if t.upper() < eps {
            // next term bounds the remainder
            let nt = pw.div_int(&n2);
            return sum.add(&IntervalReal::symmetric(&nt));
        }
    }
}
