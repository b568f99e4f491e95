//! Cubic rings: discriminants, traceless normalization, Dedekind's criterion,
//! the index `Q(f) = [O_f : R_f]` by saturation of binary cubic forms, and the
//! form attached to the maximal order.

use crate::arithmetic::{factorize, BigRational};
use crate::error::{Error, Result};
use crate::local::MonicCubic;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_with::{serde_as, DisplayFromStr};

/// `a x^3 + b x^2 y + c x y^2 + d y^3`.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BinaryCubicForm {
    #[serde_as(as = "DisplayFromStr")]
    pub a: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub b: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub c: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub d: BigInt,
}

impl BinaryCubicForm {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Self {
        BinaryCubicForm {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn from_monic(f: &MonicCubic) -> Self {
        BinaryCubicForm {
            a: BigInt::one(),
            b: f.a.clone(),
            c: f.b.clone(),
            d: f.c.clone(),
        }
    }

    pub fn coeffs(&self) -> [BigInt; 4] {
        [
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
        ]
    }

    pub fn disc(&self) -> BigInt {
        disc3(&self.a, &self.b, &self.c, &self.d)
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let (x2, y2) = (x * x, y * y);
        &self.a * &x2 * x + &self.b * &x2 * y + &self.c * x * &y2 + &self.d * &y2 * y
    }

    /// `F(r x + y, x)`: moves the point `[r : 1]` to `[1 : 0]`.
    fn move_to_infinity(&self, r: &BigInt) -> Self {
        let one = BigInt::one();
        let a = self.eval(r, &one);
        let b = BigInt::from(3) * &self.a * r * r + BigInt::from(2) * &self.b * r + &self.c;
        let c = BigInt::from(3) * &self.a * r + &self.b;
        BinaryCubicForm {
            a,
            b,
            c,
            d: self.a.clone(),
        }
    }

    fn swap(&self) -> Self {
        BinaryCubicForm {
            a: self.d.clone(),
            b: self.c.clone(),
            c: self.b.clone(),
            d: self.a.clone(),
        }
    }
}

/// `b^2c^2 - 4ac^3 - 4b^3d - 27a^2d^2 + 18abcd`.
pub fn disc3(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> BigInt {
    b * b * c * c
        - BigInt::from(4) * a * c * c * c
        - BigInt::from(4) * b * b * b * d
        - BigInt::from(27) * a * a * d * d
        + BigInt::from(18) * a * b * c * d
}

pub fn disc_binary_cubic(f: &BinaryCubicForm) -> BigInt {
    f.disc()
}

pub fn disc_monic_cubic(f: &MonicCubic) -> BigInt {
    f.disc()
}

/// `f(x + t)` with zero quadratic term. `t = -a/3` is kept as a rational; when it is
/// integral `integral` holds the translate. `companion` is always the integral model
/// `x^3 + 81 A x + 729 B` (the translate rescaled by `x -> x/9`).
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Traceless {
    #[serde_as(as = "DisplayFromStr")]
    pub t: BigRational,
    #[serde_as(as = "DisplayFromStr")]
    pub a0: BigRational,
    #[serde_as(as = "DisplayFromStr")]
    pub b0: BigRational,
    pub integral: Option<MonicCubic>,
    pub companion: MonicCubic,
}

pub fn traceless_normalize(f: &MonicCubic) -> Traceless {
    let three = BigInt::from(3);
    let t = BigRational::new(-f.a.clone(), three.clone());
    let a = BigRational::from_integer(f.a.clone());
    let b = BigRational::from_integer(f.b.clone());
    let c = BigRational::from_integer(f.c.clone());
    let r3 = BigRational::from_integer(three);
    let a0 = &b - &a * &a / &r3;
    let b0 = &c - &a * &b / &r3
        + BigRational::from_integer(BigInt::from(2)) * &a * &a * &a
            / BigRational::from_integer(BigInt::from(27));
    let integral = if t.is_integer() {
        Some(f.translate(&t.to_integer()))
    } else {
        None
    };
    let (ca, cb) = f.traceless_scaled();
    Traceless {
        t,
        a0,
        b0,
        integral,
        companion: MonicCubic::new(0, ca, cb),
    }
}

// ---------------------------------------------------------------------------
// polynomials over F_p, coefficient vectors from low to high degree

fn pmod(x: &BigInt, p: &BigInt) -> BigInt {
    x.mod_floor(p)
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn reduce(v: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    trim(v.iter().map(|c| pmod(c, p)).collect())
}

fn inv_mod(a: &BigInt, p: &BigInt) -> BigInt {
    let e = pmod(a, p).extended_gcd(p);
    pmod(&e.x, p)
}

fn poly_rem(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let mut r = reduce(a, p);
    let b = reduce(b, p);
    let db = b.len() - 1;
    let inv = inv_mod(&b[db], p);
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let q = pmod(&(&r[r.len() - 1] * &inv), p);
        for (i, bi) in b.iter().enumerate() {
            r[k + i] = pmod(&(&r[k + i] - &q * bi), p);
        }
        r = trim(r);
    }
    r
}

/// Monic gcd over F_p; the empty vector stands for the zero polynomial.
pub fn poly_gcd_mod(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let mut x = reduce(a, p);
    let mut y = reduce(b, p);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        let inv = inv_mod(&lead, p);
        x = x.iter().map(|c| pmod(&(c * &inv), p)).collect();
    }
    x
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn eval_poly(v: &[BigInt], x: &BigInt) -> BigInt {
    v.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

fn deriv(v: &[BigInt]) -> Vec<BigInt> {
    v.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

/// A repeated root in F_p of the nonzero polynomial `v` (degree at most 3).
fn repeated_root_mod(v: &[BigInt], p: &BigInt) -> Option<BigInt> {
    let v = reduce(v, p);
    if v.len() <= 1 {
        return None;
    }
    let dv = deriv(&v);
    if p < &BigInt::from(1000) {
        let pu = p.to_u64().unwrap();
        return (0..pu).map(BigInt::from).find(|r| {
            pmod(&eval_poly(&v, r), p).is_zero() && pmod(&eval_poly(&dv, r), p).is_zero()
        });
    }
    let g = poly_gcd_mod(&v, &dv, p);
    match g.len() {
        2 => Some(pmod(&-&g[0], p)),
        3 => Some(pmod(&(-&g[1] * inv_mod(&BigInt::from(2), p)), p)),
        _ => None,
    }
}

fn check_prime(p: &BigInt) -> Result<()> {
    if !crate::arithmetic::is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    Ok(())
}

/// Dedekind's criterion for `Z[x]/(f)` at `p`.
pub fn is_p_maximal(f: &MonicCubic, p: u64) -> Result<bool> {
    let pb = BigInt::from(p);
    check_prime(&pb)?;
    let disc = f.disc();
    if disc.is_zero() {
        return Err(Error::Degenerate);
    }
    if !(&disc % &pb).is_zero() {
        return Ok(true);
    }
    let fv = vec![f.c.clone(), f.b.clone(), f.a.clone(), BigInt::one()];
    let r = repeated_root_mod(&fv, &pb)
        .ok_or_else(|| Error::Invariant("p | disc without a repeated root".into()))?;
    // f = (x - r)^2 (x - s) mod p
    let s = pmod(&(-&f.a - BigInt::from(2) * &r), &pb);
    let lin = |z: &BigInt| vec![-z.clone(), BigInt::one()];
    let (g, h) = if s == r {
        (lin(&r), poly_mul(&lin(&r), &lin(&r)))
    } else {
        (poly_mul(&lin(&r), &lin(&s)), lin(&r))
    };
    let gh = poly_mul(&g, &h);
    let t: Vec<BigInt> = gh
        .iter()
        .zip(fv.iter())
        .map(|(x, y)| (x - y) / &pb)
        .collect();
    let d1 = poly_gcd_mod(&t, &g, &pb);
    if d1.is_empty() {
        // T = 0 mod p: gcd is g itself
        return Ok(poly_gcd_mod(&g, &h, &pb).len() <= 1);
    }
    Ok(poly_gcd_mod(&d1, &h, &pb).len() <= 1)
}

/// One index-`p` (or `p^2`) enlargement of the ring of `form` at `p`, if any.
fn enlarge_once(form: &BinaryCubicForm, p: &BigInt) -> Option<(BinaryCubicForm, u32)> {
    let c = form.coeffs();
    if c.iter().all(|x| pmod(x, p).is_zero()) {
        let d = c.iter().map(|x| x / p).collect::<Vec<_>>();
        return Some((
            BinaryCubicForm::new(d[0].clone(), d[1].clone(), d[2].clone(), d[3].clone()),
            2,
        ));
    }
    // repeated root at [1:0] or at some [r:1]
    let moved = if pmod(&form.a, p).is_zero() && pmod(&form.b, p).is_zero() {
        form.clone()
    } else {
        let v = vec![
            form.d.clone(),
            form.c.clone(),
            form.b.clone(),
            form.a.clone(),
        ];
        let r = repeated_root_mod(&v, p)?;
        form.move_to_infinity(&r)
    };
    let p2 = p * p;
    if !pmod(&moved.a, &p2).is_zero() {
        return None;
    }
    debug_assert!(pmod(&moved.b, p).is_zero());
    Some((
        BinaryCubicForm {
            a: &moved.a / &p2,
            b: &moved.b / p,
            c: moved.c.clone(),
            d: &moved.d * p,
        },
        1,
    ))
}

/// Saturate the ring of `form` at `p`; returns the maximal form and `v_p` of the index.
pub fn saturate_at(form: &BinaryCubicForm, p: &BigInt) -> Result<(BinaryCubicForm, u32)> {
    let mut f = form.clone();
    let mut v = 0;
    let p2 = p * p;
    loop {
        let d = f.disc();
        if d.is_zero() {
            return Err(Error::Degenerate);
        }
        if !(&d % &p2).is_zero() {
            break;
        }
        match enlarge_once(&f, p) {
            Some((g, k)) => {
                f = g;
                v += k;
            }
            None => break,
        }
    }
    Ok((f, v))
}

/// Discriminant data of `Z[x]/(f)` and its maximal order.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubicRingInvariants {
    #[serde_as(as = "DisplayFromStr")]
    pub disc_order: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub q_index: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub disc_field: BigInt,
    /// `(p, v_p(Q))` for every `p` with `v_p(Q) > 0`.
    #[serde_as(as = "Vec<(DisplayFromStr, _)>")]
    pub q_exps: Vec<(BigInt, u32)>,
    /// A binary cubic form whose ring is the maximal order.
    pub maximal_form: BinaryCubicForm,
}

pub fn q_and_d(f: &MonicCubic) -> Result<CubicRingInvariants> {
    let disc = f.disc();
    if disc.is_zero() {
        return Err(Error::Degenerate);
    }
    let fac = factorize(&disc)?;
    let mut form = BinaryCubicForm::from_monic(f);
    let mut q = BigInt::one();
    let mut q_exps = Vec::new();
    for (p, e) in &fac.factors {
        if *e < 2 {
            continue;
        }
        let (g, v) = saturate_at(&form, p)?;
        form = g;
        if v > 0 {
            q *= p.pow(v);
            q_exps.push((p.clone(), v));
        }
    }
    let q2 = &q * &q;
    if !(&disc % &q2).is_zero() {
        return Err(Error::Invariant(
            "Q^2 does not divide the discriminant".into(),
        ));
    }
    let disc_field = &disc / &q2;
    if form.disc() != disc_field {
        return Err(Error::Invariant(
            "saturated form has the wrong discriminant".into(),
        ));
    }
    Ok(CubicRingInvariants {
        disc_order: disc,
        q_index: q,
        disc_field,
        q_exps,
        maximal_form: form,
    })
}

/// `n x^3 + a x^2 y + b x y^2 + c y^3` from a translate `f(x + r) = x^3 + a x^2 + b n x + c n^2`.
pub fn form_from_translate(f: &MonicCubic, n: &BigInt, r: &BigInt) -> Result<BinaryCubicForm> {
    let g = f.translate(r);
    let n2 = n * n;
    if n.is_zero() || !(&g.b % n).is_zero() || !(&g.c % &n2).is_zero() {
        return Err(Error::Invalid(format!(
            "f(x + {r}) does not have the shape x^3 + ax^2 + bnx + cn^2 for n = {n}"
        )));
    }
    Ok(BinaryCubicForm {
        a: n.clone(),
        b: g.a,
        c: &g.b / n,
        d: &g.c / &n2,
    })
}

/// Smallest `r` in `[0, n)` with `n | f'(r)` and `n^2 | f(r)`; the condition only depends on
/// `r mod n`, so solutions are found prime power by prime power and combined.
pub fn find_translate(f: &MonicCubic, n: &BigInt) -> Result<Option<BigInt>> {
    if n.is_one() {
        return Ok(Some(BigInt::zero()));
    }
    if !n.is_positive() {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let fac = factorize(n)?;
    let mut sols: Vec<(BigInt, Vec<BigInt>)> = Vec::new();
    for (p, e) in &fac.factors {
        let pe = p.pow(*e);
        let pe2 = &pe * &pe;
        let limit = pe.to_u64().filter(|&x| x <= 10_000_000).ok_or_else(|| {
            Error::Budget(format!("prime power {pe} too large for translate search"))
        })?;
        let mut here = Vec::new();
        for r in 0..limit {
            let rb = BigInt::from(r);
            if (f.deriv(&rb) % &pe).is_zero() && (f.eval(&rb) % &pe2).is_zero() {
                here.push(rb);
            }
        }
        if here.is_empty() {
            return Ok(None);
        }
        sols.push((pe, here));
    }
    let combos: usize = sols.iter().map(|(_, s)| s.len()).product();
    if combos > 100_000 {
        return Err(Error::Budget("too many local translates".into()));
    }
    let mut best: Option<BigInt> = None;
    let mut idx = vec![0usize; sols.len()];
    loop {
        let (mut r, mut m) = (BigInt::zero(), BigInt::one());
        for (k, (pe, s)) in sols.iter().enumerate() {
            r = crt(&r, &m, &s[idx[k]], pe);
            m *= pe;
        }
        if best.as_ref().is_none_or(|b| &r < b) {
            best = Some(r);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(best);
            }
            idx[k] += 1;
            if idx[k] < sols[k].1.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub(crate) fn crt(r1: &BigInt, m1: &BigInt, r2: &BigInt, m2: &BigInt) -> BigInt {
    // m1, m2 coprime
    let inv = inv_mod(m1, m2);
    let k = pmod(&((r2 - r1) * inv), m2);
    pmod(&(r1 + m1 * k), &(m1 * m2))
}

/// Form of the maximal order in the shape produced by the index-`Q` translate
/// construction, when such a translate exists.
pub fn delone_faddeev_form(f: &MonicCubic, inv: &CubicRingInvariants) -> Result<BinaryCubicForm> {
    let r = find_translate(f, &inv.q_index)?.ok_or_else(|| {
        Error::Invalid(format!(
            "no translate of f has the index-{} shape",
            inv.q_index
        ))
    })?;
    let form = form_from_translate(f, &inv.q_index, &r)?;
    if form.disc() != inv.disc_field {
        return Err(Error::Invariant(
            "translate form discriminant differs from the field discriminant".into(),
        ));
    }
    Ok(form)
}

/// The inverse move: `F(y, x)`; exposed for tests of GL2 invariance.
pub fn swap_form(f: &BinaryCubicForm) -> BinaryCubicForm {
    f.swap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn discriminants() {
        assert_eq!(MonicCubic::new(0, 1, 1).disc(), bi(-31));
        assert_eq!(MonicCubic::new(0, -1, 0).disc(), bi(4));
        assert_eq!(MonicCubic::new(0, 0, 0).disc(), bi(0));
        assert_eq!(BinaryCubicForm::new(1, 0, 0, -1).disc(), bi(-27));
        assert_eq!(BinaryCubicForm::new(1, 0, 1, 1).disc(), bi(-31));
        assert_eq!(BinaryCubicForm::new(0, 0, 0, 1).disc(), bi(0));
        // product of squared root differences for x^3 - x
        let roots = [-1i64, 0, 1];
        let mut prod = 1i64;
        for i in 0..3 {
            for j in i + 1..3 {
                prod *= (roots[i] - roots[j]).pow(2);
            }
        }
        assert_eq!(bi(prod), MonicCubic::new(0, -1, 0).disc());
    }

    #[test]
    fn traceless_examples() {
        let t = traceless_normalize(&MonicCubic::new(3, 3, 1));
        assert_eq!(t.t, BigRational::from_integer(bi(-1)));
        assert_eq!(t.integral, Some(MonicCubic::new(0, 0, 0)));
        let f = MonicCubic::new(6, 5, 7);
        let t = traceless_normalize(&f);
        assert_eq!(t.t, BigRational::from_integer(bi(-2)));
        // expand (x-2)^3 + 6(x-2)^2 + 5(x-2) + 7
        assert_eq!(t.integral, Some(MonicCubic::new(0, -7, 13)));
        let g = MonicCubic::new(0, 4, 9);
        assert_eq!(traceless_normalize(&g).integral, Some(g.clone()));
        let h = MonicCubic::new(1, 0, 0);
        let th = traceless_normalize(&h);
        assert!(th.integral.is_none());
        assert_eq!(th.a0, BigRational::new(bi(-1), bi(3)));
        assert_eq!(th.b0, BigRational::new(bi(2), bi(27)));
        assert_eq!(th.companion, MonicCubic::new(0, -27, 54));
    }

    #[test]
    fn dedekind_examples() {
        assert!(is_p_maximal(&MonicCubic::new(0, 1, 1), 31).unwrap());
        // symbol IV at 5
        assert!(!is_p_maximal(&MonicCubic::new(0, 25, 25), 5).unwrap());
        // x^3 - 2 at 3 is maximal, x^3 - 10 at 3 is not (10 = 1 mod 9)
        assert!(is_p_maximal(&MonicCubic::new(0, 0, -2), 3).unwrap());
        assert!(!is_p_maximal(&MonicCubic::new(0, 0, -10), 3).unwrap());
        assert!(is_p_maximal(&MonicCubic::new(0, 0, -2), 2).unwrap());
        assert!(!is_p_maximal(&MonicCubic::new(0, 0, -8 * 3), 2).unwrap());
    }

    #[test]
    fn q_and_d_examples() {
        let inv = q_and_d(&MonicCubic::new(0, 1, 1)).unwrap();
        assert_eq!((inv.q_index, inv.disc_field), (bi(1), bi(-31)));
        let inv = q_and_d(&MonicCubic::new(0, 25, 25)).unwrap();
        assert_eq!(inv.q_index, bi(5));
        assert_eq!(
            crate::arithmetic::valuation(&inv.disc_field, &bi(5)).unwrap(),
            2
        );
        // x^3 - d x with d squarefree and 2, 3 mod 4 has Q = d
        for d in [2i64, 3, 6, 7, 10, 11, 14, 15, 19, 22] {
            let inv = q_and_d(&MonicCubic::new(0, -d, 0)).unwrap();
            assert_eq!(inv.q_index, bi(d), "d = {d}");
            assert_eq!(inv.disc_field, bi(4 * d));
        }
        // x^3 - 10: Q(cbrt 10) has discriminant -300, Z[cbrt 10] has index 3
        let inv = q_and_d(&MonicCubic::new(0, 0, -10)).unwrap();
        assert_eq!((inv.q_index, inv.disc_field), (bi(3), bi(-300)));
        // x^3 - 12 = x^3 - 2^2 3: K = Q(cbrt 18), disc -972 = -2^2 3^5; Z[x]/(f) has disc -3888
        let inv = q_and_d(&MonicCubic::new(0, 0, -12)).unwrap();
        assert_eq!(inv.disc_order, bi(-3888));
        assert_eq!(inv.q_index, bi(2));
        assert_eq!(inv.disc_field, bi(-972));
    }

    #[test]
    fn translate_forms() {
        let f = MonicCubic::new(0, 1, 1);
        let inv = q_and_d(&f).unwrap();
        assert_eq!(
            delone_faddeev_form(&f, &inv).unwrap(),
            BinaryCubicForm::new(1, 0, 1, 1)
        );
        let f = MonicCubic::new(0, 25, 25);
        let inv = q_and_d(&f).unwrap();
        let h = delone_faddeev_form(&f, &inv).unwrap();
        assert_eq!(h.a, bi(5));
        assert_eq!(h.disc(), inv.disc_field);
    }

    #[test]
    fn gcd_mod_small() {
        let p = bi(7);
        // (x-1)^2 (x-3) and its derivative
        let f = poly_mul(
            &poly_mul(&[bi(-1), bi(1)], &[bi(-1), bi(1)]),
            &[bi(-3), bi(1)],
        );
        let g = poly_gcd_mod(&f, &deriv(&f), &p);
        assert_eq!(g, vec![bi(6), bi(1)]);
    }
}
