//! Exact arithmetic in `Z[zeta_N]` for prime powers `N = p^k`.
//!
//! Elements are stored in the group ring `Z[Z/N]` and compared after reduction
//! modulo the cyclotomic polynomial, which gives a canonical form on the
//! power basis `1, zeta, ..., zeta^(phi(N)-1)`.

use crate::arithmetic::factorize_u64;
use crate::error::{Error, Result};
use crate::interval::IntervalReal;
use num_bigint::BigInt;

#[derive(Clone, Debug)]
pub struct Cyclo {
    n: usize,
    p: usize,
    coeffs: Vec<i128>,
}

/// A complex number as a pair of real enclosures.
#[derive(Clone, Debug)]
pub struct ComplexValue {
    pub re: IntervalReal,
    pub im: IntervalReal,
}

impl ComplexValue {
    pub fn abs_sq(&self) -> IntervalReal {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn abs(&self) -> IntervalReal {
        self.abs_sq().sqrt()
    }
}

/// The prime of a prime power `n`, if it is one.
pub fn prime_of_power(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let f = factorize_u64(n);
    if f.len() == 1 {
        Some(f[0].0)
    } else {
        None
    }
}

impl Cyclo {
    pub fn zero(n: usize) -> Result<Self> {
        let p = prime_of_power(n as u64)
            .ok_or_else(|| Error::Invalid(format!("modulus {n} is not a prime power")))?;
        Ok(Cyclo {
            n,
            p: p as usize,
            coeffs: vec![0; n],
        })
    }

    /// `sum_j counts[j] zeta^j`.
    pub fn from_counts(counts: Vec<i128>) -> Result<Self> {
        let mut z = Self::zero(counts.len())?;
        z.coeffs = counts;
        Ok(z)
    }

    pub fn from_int(n: usize, m: i128) -> Result<Self> {
        let mut z = Self::zero(n)?;
        z.coeffs[0] = m;
        Ok(z)
    }

    pub fn zeta_pow(n: usize, j: i64) -> Result<Self> {
        let mut z = Self::zero(n)?;
        z.coeffs[j.rem_euclid(n as i64) as usize] = 1;
        Ok(z)
    }

    pub fn modulus(&self) -> usize {
        self.n
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Cyclo {
            coeffs,
            ..self.clone()
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Cyclo {
            coeffs,
            ..self.clone()
        }
    }

    /// Multiplication by `zeta^j`.
    pub fn rotate(&self, j: i64) -> Self {
        let s = j.rem_euclid(self.n as i64) as usize;
        let mut coeffs = vec![0; self.n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(i + s) % self.n] = c;
        }
        Cyclo {
            coeffs,
            ..self.clone()
        }
    }

    pub fn conj(&self) -> Self {
        let mut coeffs = vec![0; self.n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(self.n - i) % self.n] = c;
        }
        Cyclo {
            coeffs,
            ..self.clone()
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let mut coeffs = vec![0i128; self.n];
        let nz: Vec<(usize, i128)> = o
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for &(j, b) in &nz {
                coeffs[(i + j) % self.n] += a * b;
            }
        }
        Cyclo {
            coeffs,
            ..self.clone()
        }
    }

    /// `|z|^2 = z * conj(z)`, again an element of the ring.
    pub fn norm_sq(&self) -> Self {
        self.mul(&self.conj())
    }

    /// Coordinates on the power basis of length `phi(N)`.
    pub fn canonical(&self) -> Vec<i128> {
        let step = self.n / self.p;
        let phi = self.n - step;
        let mut out = self.coeffs[..phi].to_vec();
        // zeta^(phi + t) = -sum_{j < p-1} zeta^(j*step + t)
        for t in 0..step {
            let c = self.coeffs[phi + t];
            if c != 0 {
                for j in 0..self.p - 1 {
                    out[j * step + t] -= c;
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().iter().all(|&c| c == 0)
    }

    pub fn eq_exact(&self, o: &Self) -> bool {
        self.n == o.n && self.sub(o).is_zero()
    }

    /// The rational integer represented by `self`, if it is one.
    pub fn as_integer(&self) -> Option<i128> {
        let c = self.canonical();
        if c[1..].iter().all(|&x| x == 0) {
            Some(c[0])
        } else {
            None
        }
    }

    /// Evaluation using a precomputed table from [`root_table`].
    pub fn to_complex_with(&self, table: &[(IntervalReal, IntervalReal)]) -> ComplexValue {
        assert_eq!(table.len(), self.n);
        let prec = table[0].0.prec();
        let mut re = IntervalReal::zero(prec);
        let mut im = IntervalReal::zero(prec);
        for (j, &c) in self.canonical().iter().enumerate() {
            if c != 0 {
                let b = BigInt::from(c);
                re = re.add(&table[j].0.mul_int(&b));
                im = im.add(&table[j].1.mul_int(&b));
            }
        }
        ComplexValue { re, im }
    }

    pub fn to_complex(&self, prec: u32) -> ComplexValue {
        let mut re = IntervalReal::zero(prec);
        let mut im = IntervalReal::zero(prec);
        for (j, &c) in self.canonical().iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (co, si) = IntervalReal::cos_sin_2pi(j as i64, self.n as i64, prec);
            let b = BigInt::from(c);
            re = re.add(&co.mul_int(&b));
            im = im.add(&si.mul_int(&b));
        }
        ComplexValue { re, im }
    }
}

/// `(cos, sin)` of `2 pi j / n` for `j < n`.
pub fn root_table(n: usize, prec: u32) -> Vec<(IntervalReal, IntervalReal)> {
    (0..n)
        .map(|j| IntervalReal::cos_sin_2pi(j as i64, n as i64, prec))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_all_roots_vanishes() {
        for n in [5usize, 25, 7, 49, 8] {
            let z = Cyclo::from_counts(vec![1; n]).unwrap();
            assert!(z.is_zero(), "n = {n}");
            assert!(!Cyclo::zeta_pow(n, 1).unwrap().is_zero());
        }
    }

    #[test]
    fn gauss_sum_norm() {
        // quadratic Gauss sum mod 5 has |g|^2 = 5
        let mut c = vec![0i128; 5];
        for x in 0..5 {
            c[(x * x) % 5] += 1;
        }
        let g = Cyclo::from_counts(c).unwrap();
        assert_eq!(g.norm_sq().as_integer(), Some(5));
        let v = g.to_complex(96).abs_sq();
        assert!(v.contains(&crate::arithmetic::BigRational::from_integer(5.into())));
        assert!(v.width_f64() < 1e-20);
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(Cyclo::zero(15).is_err());
    }
}
