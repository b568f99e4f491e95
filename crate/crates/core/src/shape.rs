//! Geometry of the trace-zero part of the maximal order of a cubic algebra.
//!
//! The maximal order comes from [`q_and_d`] as the ring of a binary cubic form
//! `F = (a, b, c, d)`, with basis `1, w = a t, h = a t^2 + b t` where `t` is a root
//! of `F(x, 1)`. An element `x + y w + z h` is traceless iff `3x - by - 2cz = 0`.
//! Its length is `|alpha|^2 = sum over the three embeddings of |sigma(alpha)|^2`.

use crate::arithmetic::BigRational;
use crate::cubic::{q_and_d, BinaryCubicForm};
use crate::error::{Error, Result};
use crate::interval::IntervalReal;
use crate::local::MonicCubic;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_with::{serde_as, DisplayFromStr};

const PREC: u32 = 192;

type Form = Vec<BigInt>; // homogeneous coefficients, x-degree descending

fn form_mul(p: &Form, q: &Form) -> Form {
    let mut out = vec![BigInt::zero(); p.len() + q.len() - 1];
    for (i, x) in p.iter().enumerate() {
        for (j, y) in q.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `F(u x + s y, v x + t y)`.
pub fn transform_form(
    f: &BinaryCubicForm,
    u: &BigInt,
    s: &BigInt,
    v: &BigInt,
    t: &BigInt,
) -> BinaryCubicForm {
    let l1 = vec![u.clone(), s.clone()];
    let l2 = vec![v.clone(), t.clone()];
    let l11 = form_mul(&l1, &l1);
    let l22 = form_mul(&l2, &l2);
    let terms = [
        (&f.a, form_mul(&l11, &l1)),
        (&f.b, form_mul(&l11, &l2)),
        (&f.c, form_mul(&l1, &l22)),
        (&f.d, form_mul(&l22, &l2)),
    ];
    let mut out = vec![BigInt::zero(); 4];
    for (k, poly) in terms {
        for (i, c) in poly.iter().enumerate() {
            out[i] += k * c;
        }
    }
    BinaryCubicForm {
        a: out[0].clone(),
        b: out[1].clone(),
        c: out[2].clone(),
        d: out[3].clone(),
    }
}

/// An equivalent form with nonzero leading coefficient.
fn with_nonzero_lead(f: &BinaryCubicForm) -> BinaryCubicForm {
    if !f.a.is_zero() {
        return f.clone();
    }
    for (u, v) in [(0i64, 1i64), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1)] {
        let (ub, vb) = (BigInt::from(u), BigInt::from(v));
        if f.eval(&ub, &vb).is_zero() {
            continue;
        }
        let e = ub.extended_gcd(&vb);
        // u x_ - v y_ = 1 with t = x_, s = -y_... solve u t - s v = 1
        let (t, s) = (e.x.clone(), -e.y.clone());
        debug_assert_eq!(&ub * &t - &s * &vb, BigInt::one());
        return transform_form(f, &ub, &s, &vb, &t);
    }
    unreachable!("a nonzero cubic form has at most three projective zeros")
}

fn sign_at(f: &BinaryCubicForm, m: &BigInt, k: u32) -> i32 {
    // sign of F(m / 2^k, 1) * 8^k
    let s = BigInt::one() << k as usize;
    let v = f.eval(m, &s);
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Enclosure of the unique real root of `F(x, 1)` (leading coefficient nonzero, negative discriminant).
fn real_root(f: &BinaryCubicForm, prec: u32) -> IntervalReal {
    let bound = [&f.b, &f.c, &f.d].iter().map(|x| x.abs()).max().unwrap();
    let r: BigInt = bound.div_floor(&f.a.abs()) + 2;
    let mut lo: BigInt = -(&r << prec as usize);
    let mut hi: BigInt = &r << prec as usize;
    let slo = sign_at(f, &lo, prec);
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1usize;
        let sm = sign_at(f, &mid, prec);
        if sm == 0 {
            return IntervalReal::from_bounds(mid.clone(), mid, prec);
        }
        if sm == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    IntervalReal::from_bounds(lo, hi, prec)
}

/// Gram matrix of `|.|^2` on coefficient vectors in `1, t, t^2`.
fn power_gram(f: &BinaryCubicForm, prec: u32) -> [[IntervalReal; 3]; 3] {
    let a = BigRational::from_integer(f.a.clone());
    let disc = f.disc();
    let iv = |q: &BigRational| IntervalReal::from_ratio(q, prec);
    if disc.is_positive() {
        // three real roots: exact power sums
        let e1 = -BigRational::from_integer(f.b.clone()) / &a;
        let e2 = BigRational::from_integer(f.c.clone()) / &a;
        let e3 = -BigRational::from_integer(f.d.clone()) / &a;
        let p0 = BigRational::from_integer(BigInt::from(3));
        let p1 = e1.clone();
        let p2 = &e1 * &p1 - BigRational::from_integer(BigInt::from(2)) * &e2;
        let p3 = &e1 * &p2 - &e2 * &p1 + BigRational::from_integer(BigInt::from(3)) * &e3;
        let p4 = &e1 * &p3 - &e2 * &p2 + &e3 * &p1;
        let p = [p0, p1, p2, p3, p4];
        return std::array::from_fn(|i| std::array::from_fn(|j| iv(&p[i + j])));
    }
    let r = real_root(f, prec);
    let ai = iv(&a);
    let bi = IntervalReal::from_int(&f.b, prec);
    let ci = IntervalReal::from_int(&f.c, prec);
    // F(x,1) = (x - r)(a x^2 + (b + a r) x + (c + b r + a r^2))
    let s = bi.add(&ai.mul(&r)).div(&ai).neg();
    let n = ci.add(&bi.mul(&r)).add(&ai.mul(&r.sqr())).div(&ai);
    let two = BigInt::from(2);
    let r2 = r.sqr();
    let g00 = IntervalReal::from_i64(3, prec);
    let g01 = r.add(&s);
    let g02 = r2.add(&s.sqr()).sub(&n.mul_int(&two));
    let g11 = r2.add(&n.mul_int(&two));
    let g12 = r2.mul(&r).add(&n.mul(&s));
    let g22 = r2.sqr().add(&n.sqr().mul_int(&two));
    [
        [g00, g01.clone(), g02.clone()],
        [g01, g11, g12.clone()],
        [g02, g12, g22],
    ]
}

/// Integer basis of `{v in Z^3 : l . v = 0}` for `l[0] != 0`.
fn kernel_basis(l: [BigInt; 3]) -> [[BigInt; 3]; 2] {
    // unimodular column operations bringing l to (g, 0, 0)
    let mut u: [[BigInt; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            if i == j {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        })
    });
    let mut cur = l.clone();
    for k in 1..3 {
        if cur[k].is_zero() {
            continue;
        }
        let e = cur[0].extended_gcd(&cur[k]);
        let (s, t) = (e.x, e.y);
        let (p, q) = (&cur[0] / &e.gcd, &cur[k] / &e.gcd);
        // new col0 = s col0 + t colk ; new colk = -q col0 + p colk
        for row in u.iter_mut() {
            let c0 = row[0].clone();
            let ck = row[k].clone();
            row[0] = &s * &c0 + &t * &ck;
            row[k] = -&q * &c0 + &p * &ck;
        }
        cur[0] = e.gcd;
        cur[k] = BigInt::zero();
    }
    [
        std::array::from_fn(|i| u[i][1].clone()),
        std::array::from_fn(|i| u[i][2].clone()),
    ]
}

/// The traceless lattice with its Gram matrix in a kernel basis.
#[derive(Debug, Clone)]
pub struct TracelessLattice {
    pub form: BinaryCubicForm,
    /// Coordinates of the two basis vectors in the ring basis `1, w, h`.
    pub basis: [[BigInt; 3]; 2],
    pub gram: [[IntervalReal; 2]; 2],
}

impl TracelessLattice {
    pub fn norm_sq(&self, x: &BigInt, y: &BigInt) -> IntervalReal {
        let g = &self.gram;
        g[0][0]
            .mul_int(&(x * x))
            .add(&g[0][1].mul_int(&(BigInt::from(2) * x * y)))
            .add(&g[1][1].mul_int(&(y * y)))
    }

    pub fn det(&self) -> IntervalReal {
        let g = &self.gram;
        g[0][0].mul(&g[1][1]).sub(&g[0][1].sqr())
    }

    /// Ring coordinates of `x e1 + y e2`.
    pub fn vector(&self, x: &BigInt, y: &BigInt) -> [BigInt; 3] {
        std::array::from_fn(|i| x * &self.basis[0][i] + y * &self.basis[1][i])
    }

    fn recombine(&self, m: [[BigInt; 2]; 2]) -> Self {
        let g = &self.gram;
        let entry = |r: &[BigInt; 2], s: &[BigInt; 2]| {
            g[0][0]
                .mul_int(&(&r[0] * &s[0]))
                .add(&g[0][1].mul_int(&(&r[0] * &s[1] + &r[1] * &s[0])))
                .add(&g[1][1].mul_int(&(&r[1] * &s[1])))
        };
        let gram = [
            [entry(&m[0], &m[0]), entry(&m[0], &m[1])],
            [entry(&m[1], &m[0]), entry(&m[1], &m[1])],
        ];
        let basis = [
            self.vector(&m[0][0], &m[0][1]),
            self.vector(&m[1][0], &m[1][1]),
        ];
        TracelessLattice {
            form: self.form.clone(),
            basis,
            gram,
        }
    }
}

pub fn traceless_lattice(f: &MonicCubic) -> Result<TracelessLattice> {
    let inv = q_and_d(f)?;
    lattice_of_form(&inv.maximal_form)
}

pub fn lattice_of_form(form: &BinaryCubicForm) -> Result<TracelessLattice> {
    if form.disc().is_zero() {
        return Err(Error::Degenerate);
    }
    let form = with_nonzero_lead(form);
    let m = power_gram(&form, PREC);
    let ker = kernel_basis([BigInt::from(3), -form.b.clone(), -BigInt::from(2) * &form.c]);
    // ring coordinates (x, y, z) -> coefficients on 1, t, t^2
    let to_pow = |v: &[BigInt; 3]| {
        [
            v[0].clone(),
            &form.a * &v[1] + &form.b * &v[2],
            &form.a * &v[2],
        ]
    };
    let u = [to_pow(&ker[0]), to_pow(&ker[1])];
    let bil = |p: &[BigInt; 3], q: &[BigInt; 3]| {
        let mut acc = IntervalReal::zero(PREC);
        for i in 0..3 {
            for j in 0..3 {
                let c = &p[i] * &q[j];
                if !c.is_zero() {
                    acc = acc.add(&m[i][j].mul_int(&c));
                }
            }
        }
        acc
    };
    let gram = [
        [bil(&u[0], &u[0]), bil(&u[0], &u[1])],
        [bil(&u[1], &u[0]), bil(&u[1], &u[1])],
    ];
    Ok(TracelessLattice {
        form,
        basis: ker,
        gram,
    })
}

/// Lagrange-reduce the lattice; the result has `|b1| <= |b2|` and `2|<b1,b2>| <= |b1|^2`
/// up to the enclosure width.
pub fn reduce(l: &TracelessLattice) -> Result<TracelessLattice> {
    let mut cur = l.clone();
    for _ in 0..10_000 {
        let g11 = cur.gram[0][0].mid_f64();
        let g22 = cur.gram[1][1].mid_f64();
        if g11 > g22 {
            let one = BigInt::one();
            let zero = BigInt::zero();
            cur = cur.recombine([[zero.clone(), one.clone()], [one, zero]]);
            continue;
        }
        let mu = (cur.gram[0][1].mid_f64() / g11).round();
        if mu == 0.0 || !mu.is_finite() {
            break;
        }
        let mu = BigInt::from(mu as i128);
        cur = cur.recombine([[BigInt::one(), BigInt::zero()], [-mu, BigInt::one()]]);
    }
    let g = &cur.gram;
    // definite violations mean the floating point driver failed
    let twice = g[0][1].abs().mul_int(&BigInt::from(2));
    if g[0][0].lt(&twice) == Some(true) || g[1][1].lt(&g[0][0]) == Some(true) {
        return Err(Error::Invariant(
            "lattice reduction did not converge".into(),
        ));
    }
    Ok(cur)
}

/// Successive minima of the traceless lattice and the skewness `l2 / l1`.
#[derive(Debug, Clone)]
pub struct Shape {
    pub l1: IntervalReal,
    pub l2: IntervalReal,
    pub skewness: IntervalReal,
    pub covolume: IntervalReal,
    pub disc_field: BigInt,
    pub lattice: TracelessLattice,
}

#[serde_as]
#[derive(Debug, Clone, Serialize)]
pub struct ShapeSummary {
    pub l1: f64,
    pub l2: f64,
    pub skewness: f64,
    pub covolume: f64,
    #[serde_as(as = "DisplayFromStr")]
    pub disc_field: BigInt,
    #[serde_as(as = "[DisplayFromStr; 3]")]
    pub shortest: [BigInt; 3],
    pub form: BinaryCubicForm,
}

impl Shape {
    pub fn summary(&self) -> ShapeSummary {
        ShapeSummary {
            l1: self.l1.mid_f64(),
            l2: self.l2.mid_f64(),
            skewness: self.skewness.mid_f64(),
            covolume: self.covolume.mid_f64(),
            disc_field: self.disc_field.clone(),
            shortest: self.lattice.basis[0].clone(),
            form: self.lattice.form.clone(),
        }
    }
}

pub fn shape(f: &MonicCubic) -> Result<Shape> {
    let inv = q_and_d(f)?;
    let lat = reduce(&lattice_of_form(&inv.maximal_form)?)?;
    let l1 = lat.gram[0][0].sqrt();
    let l2 = lat.gram[1][1].sqrt();
    let covolume = lat.det().sqrt();
    let skewness = l2.div(&l1);
    Ok(Shape {
        l1,
        l2,
        skewness,
        covolume,
        disc_field: inv.disc_field,
        lattice: lat,
    })
}

/// Number of primitive traceless elements with `|alpha| < Y`, each pair `+-alpha` counted once.
pub fn count_traceless_primitive(f: &MonicCubic, y: &BigRational) -> Result<u64> {
    let s = shape(f)?;
    count_in_reduced(&s.lattice, y)
}

pub fn count_in_reduced(lat: &TracelessLattice, y: &BigRational) -> Result<u64> {
    if !y.is_positive() {
        return Ok(0);
    }
    let y2 = IntervalReal::from_ratio(&(y * y), PREC);
    let det = lat.det();
    if !det.is_positive() {
        return Err(Error::Invariant("degenerate Gram matrix".into()));
    }
    let yf = y.to_f64().unwrap_or(f64::INFINITY);
    let det_lo = det.lo_f64();
    let xmax = (yf * (lat.gram[1][1].hi_f64() / det_lo).sqrt()).floor() as i64 + 1;
    let ymax = (yf * (lat.gram[0][0].hi_f64() / det_lo).sqrt()).floor() as i64 + 1;
    if (xmax as f64) * (ymax as f64) > 4e8 {
        return Err(Error::Budget(format!(
            "enumeration box {xmax} x {ymax} too large"
        )));
    }
    let mut count = 0u64;
    for x in 0..=xmax {
        let ylo = if x == 0 { 1 } else { -ymax };
        for yv in ylo..=ymax {
            if x.gcd(&yv) != 1 {
                continue;
            }
            let n = lat.norm_sq(&BigInt::from(x), &BigInt::from(yv));
            match n.lt(&y2) {
                Some(true) => count += 1,
                Some(false) => {}
                None => {
                    return Err(Error::Straddle(format!(
                        "|({x}, {yv})| is within the enclosure of Y"
                    )))
                }
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(x: f64) -> BigRational {
        BigRational::from_float(x).unwrap()
    }

    #[test]
    fn kernel_is_kernel() {
        for (b, c) in [(0i64, 0i64), (5, -7), (-12, 9), (1, 1)] {
            let l = [BigInt::from(3), BigInt::from(-b), BigInt::from(-2 * c)];
            let k = kernel_basis(l.clone());
            for v in &k {
                let dot: BigInt = (0..3).map(|i| &l[i] * &v[i]).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn split_algebra_minima() {
        // Z x Z[sqrt d]: shortest traceless vectors (-2, 1) and (0, sqrt d)
        for d in [7i64, 10, 11, 14] {
            let s = shape(&MonicCubic::new(0, -d, 0)).unwrap();
            assert!(s
                .l1
                .sqr()
                .contains(&BigRational::from_integer(BigInt::from(6))));
            assert!(s
                .l2
                .sqr()
                .contains(&BigRational::from_integer(BigInt::from(2 * d))));
        }
    }

    #[test]
    fn complex_field_example() {
        let s = shape(&MonicCubic::new(0, -1, -1)).unwrap();
        assert_eq!(s.disc_field, BigInt::from(-23));
        let prod = s.l1.mul(&s.l2).mid_f64();
        let cov = s.covolume.mid_f64();
        assert!(prod >= cov * (1.0 - 1e-12) && prod <= cov * 2.0 / 3f64.sqrt() * (1.0 + 1e-12));
        assert!(s.skewness.lo_f64() >= 1.0 - 1e-12);
        assert!(s.l1.width_f64() < s.l1.mid_f64() * 2f64.powi(-40));
    }

    #[test]
    fn lemma_counts() {
        let f = MonicCubic::new(0, -1, -1);
        let s = shape(&f).unwrap();
        let (l1, l2) = (s.l1.mid_f64(), s.l2.mid_f64());
        assert_eq!(count_traceless_primitive(&f, &rat(l1 * 0.99)).unwrap(), 0);
        if l2 > l1 * 1.001 {
            assert_eq!(
                count_traceless_primitive(&f, &rat((l1 + l2) / 2.0)).unwrap(),
                1
            );
        }
        let mut last = 0;
        for k in 1..30 {
            let c = count_traceless_primitive(&f, &rat(l1 * k as f64 * 0.37 + 0.001)).unwrap();
            assert!(c >= last);
            last = c;
        }
    }
}
