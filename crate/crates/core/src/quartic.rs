//! Binary quartic forms `a x^4 + b x^3 y + c x^2 y^2 + d x y^3 + e y^4`, their
//! invariants, rooted forms and the embedding of monic cubics.

use crate::arithmetic::BigRational;
use crate::cubic::{disc3, find_translate, form_from_translate, BinaryCubicForm};
use crate::error::{Error, Result};
use crate::local::MonicCubic;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_with::{serde_as, DisplayFromStr};

#[serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BinaryQuarticForm {
    #[serde_as(as = "DisplayFromStr")]
    pub a: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub b: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub c: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub d: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub e: BigInt,
}

impl BinaryQuarticForm {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
        e: impl Into<BigInt>,
    ) -> Self {
        BinaryQuarticForm {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
            e: e.into(),
        }
    }

    pub fn from_coeffs(c: [BigInt; 5]) -> Self {
        let [a, b, c2, d, e] = c;
        BinaryQuarticForm { a, b, c: c2, d, e }
    }

    pub fn coeffs(&self) -> [BigInt; 5] {
        [
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
            self.e.clone(),
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs().iter().all(Zero::is_zero)
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, k) in self.coeffs().iter().enumerate() {
            acc += k * x.pow(4 - i as u32) * y.pow(i as u32);
        }
        acc
    }

    /// `y * h(x, y)` for a binary cubic `h`.
    pub fn y_times(h: &BinaryCubicForm) -> Self {
        BinaryQuarticForm::new(0, h.a.clone(), h.b.clone(), h.c.clone(), h.d.clone())
    }
}

pub fn invariants_ij(g: &BinaryQuarticForm) -> (BigInt, BigInt) {
    let (a, b, c, d, e) = (&g.a, &g.b, &g.c, &g.d, &g.e);
    let i = BigInt::from(12) * a * e - BigInt::from(3) * b * d + c * c;
    let j = BigInt::from(72) * a * c * e + BigInt::from(9) * b * c * d
        - BigInt::from(27) * a * d * d
        - BigInt::from(27) * e * b * b
        - BigInt::from(2) * c * c * c;
    (i, j)
}

/// `(4 I^3 - J^2) / 27`.
pub fn disc_quartic(g: &BinaryQuarticForm) -> BigRational {
    let (i, j) = invariants_ij(g);
    BigRational::new(BigInt::from(4) * &i * &i * &i - &j * &j, BigInt::from(27))
}

/// The discriminant as an integer; the division by 27 is always exact.
pub fn disc_quartic_int(g: &BinaryQuarticForm) -> Result<BigInt> {
    let d = disc_quartic(g);
    if !d.is_integer() {
        return Err(Error::Invariant("27 does not divide 4I^3 - J^2".into()));
    }
    Ok(d.to_integer())
}

/// `I` and `J` of a monic cubic, taken from the quartic `y f(x, y)`.
pub fn cubic_ij(f: &MonicCubic) -> (BigInt, BigInt) {
    invariants_ij(&BinaryQuarticForm::y_times(&BinaryCubicForm::from_monic(f)))
}

/// A 2x2 integer matrix of determinant `+-1`, acting on row vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UnimodularMatrix {
    pub m: [[i64; 2]; 2],
}

impl UnimodularMatrix {
    pub fn new(m: [[i64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] as i128 * m[1][1] as i128 - m[0][1] as i128 * m[1][0] as i128;
        if det.abs() != 1 {
            return Err(Error::Invalid(format!("determinant {det} is not +-1")));
        }
        Ok(UnimodularMatrix { m })
    }

    pub fn identity() -> Self {
        UnimodularMatrix {
            m: [[1, 0], [0, 1]],
        }
    }

    pub fn swap() -> Self {
        UnimodularMatrix {
            m: [[0, 1], [1, 0]],
        }
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut m = [[0i64; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        UnimodularMatrix { m }
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        let [[p, q], [r, s]] = self.m;
        UnimodularMatrix {
            m: [[d * s, -d * q], [-d * r, d * p]],
        }
    }
}

/// Coefficients (in `x^(n-i) y^i` order) of a product of linear forms.
fn mul_forms(f: &[BigInt], g: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); f.len() + g.len() - 1];
    for (i, a) in f.iter().enumerate() {
        for (j, b) in g.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `g((x, y) . gamma)`; the `1 / det^2` factor is 1.
pub fn pgl2_act_form(gamma: &UnimodularMatrix, g: &BinaryQuarticForm) -> BinaryQuarticForm {
    let [[p, q], [r, s]] = gamma.m;
    let lx = [BigInt::from(p), BigInt::from(r)]; // X = p x + r y
    let ly = [BigInt::from(q), BigInt::from(s)]; // Y = q x + s y
    let mut out = vec![BigInt::zero(); 5];
    for (i, k) in g.coeffs().iter().enumerate() {
        if k.is_zero() {
            continue;
        }
        let mut term = vec![k.clone()];
        for _ in 0..4 - i {
            term = mul_forms(&term, &lx);
        }
        for _ in 0..i {
            term = mul_forms(&term, &ly);
        }
        for (o, t) in out.iter_mut().zip(term) {
            *o += t;
        }
    }
    let c: [BigInt; 5] = out.try_into().expect("five coefficients");
    BinaryQuarticForm::from_coeffs(c)
}

/// A nonzero quartic together with a primitive root `[alpha : beta]`.
#[serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootedQuartic {
    pub g: BinaryQuarticForm,
    #[serde_as(as = "DisplayFromStr")]
    pub alpha: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub beta: BigInt,
}

impl RootedQuartic {
    pub fn new(
        g: BinaryQuarticForm,
        alpha: impl Into<BigInt>,
        beta: impl Into<BigInt>,
    ) -> Result<Self> {
        let (alpha, beta) = (alpha.into(), beta.into());
        if !alpha.gcd(&beta).is_one() {
            return Err(Error::Invalid(format!(
                "root [{alpha} : {beta}] is not primitive"
            )));
        }
        if g.is_zero() {
            return Err(Error::Zero);
        }
        if !g.eval(&alpha, &beta).is_zero() {
            return Err(Error::Invalid(format!("[{alpha} : {beta}] is not a root")));
        }
        Ok(RootedQuartic { g, alpha, beta })
    }

    /// The cubic `h` with `g = (beta x - alpha y) h`.
    pub fn cofactor(&self) -> Result<BinaryCubicForm> {
        let (al, be) = (&self.alpha, &self.beta);
        let c = self.g.coeffs();
        // a = be h0, b = be h1 - al h0, c = be h2 - al h1, d = be h3 - al h2, e = -al h3
        let div = |num: BigInt, den: &BigInt| -> Result<BigInt> {
            let (q, r) = num.div_rem(den);
            if r.is_zero() {
                Ok(q)
            } else {
                Err(Error::Invariant(
                    "linear factor does not divide the form".into(),
                ))
            }
        };
        let mut h = [
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
        ];
        if !be.is_zero() {
            h[0] = div(c[0].clone(), be)?;
            for i in 1..4 {
                h[i] = div(&c[i] + al * &h[i - 1], be)?;
            }
        } else {
            h[3] = div(-c[4].clone(), al)?;
            for i in (0..3).rev() {
                h[i] = div(be * &h[i + 1] - &c[i + 1], al)?;
            }
        }
        let [h0, h1, h2, h3] = h;
        let back = [
            be * &h0,
            be * &h1 - al * &h0,
            be * &h2 - al * &h1,
            be * &h3 - al * &h2,
            -(al * &h3),
        ];
        if back != c {
            return Err(Error::Invariant(
                "linear factor does not divide the form".into(),
            ));
        }
        Ok(BinaryCubicForm {
            a: h0,
            b: h1,
            c: h2,
            d: h3,
        })
    }
}

/// `Q = h(alpha, beta)` and `D = Disc(h)` for `g = (beta x - alpha y) h`.
pub fn q_d_rooted(rq: &RootedQuartic) -> Result<(BigInt, BigInt)> {
    let h = rq.cofactor()?;
    Ok((h.eval(&rq.alpha, &rq.beta), h.disc()))
}

/// `gamma . (g, [alpha : beta]) = (gamma . g, [alpha : beta] gamma^-1)`.
pub fn pgl2_act(gamma: &UnimodularMatrix, rq: &RootedQuartic) -> RootedQuartic {
    let inv = gamma.inverse();
    let [[p, q], [r, s]] = inv.m;
    let alpha = &rq.alpha * p + &rq.beta * r;
    let beta = &rq.alpha * q + &rq.beta * s;
    RootedQuartic {
        g: pgl2_act_form(gamma, &rq.g),
        alpha,
        beta,
    }
}

/// `f -> (y h(x, y), [1 : 0])` with `h = n x^3 + a x^2 y + b x y^2 + c y^3` read off
/// a translate `f(x + r) = x^3 + a x^2 + b n x + c n^2`, `n = Q(f)`.
/// Returns the rooted form and the translate used.
pub fn embed_sigma(f: &MonicCubic, q_f: &BigInt) -> Result<(RootedQuartic, BigInt)> {
    if !q_f.is_positive() {
        return Err(Error::Invalid("Q(f) must be positive".into()));
    }
    let r = find_translate(f, q_f)?.ok_or_else(|| {
        Error::Invariant(format!(
            "no translate of f has the shape required by n = {q_f}"
        ))
    })?;
    let h = form_from_translate(f, q_f, &r)?;
    let g = BinaryQuarticForm::y_times(&h);
    Ok((RootedQuartic::new(g, 1, 0)?, r))
}

/// The rooted forms `(beta x - alpha y) x^(3-i) y^i`, a basis of the forms vanishing at `[alpha : beta]`.
pub fn lattice_basis(alpha: i64, beta: i64) -> Result<[BinaryQuarticForm; 4]> {
    let unit = |i: usize| {
        let mut t = [0i64; 4];
        t[i] = 1;
        t
    };
    Ok([
        tuple_to_form(alpha, beta, unit(0))?.g,
        tuple_to_form(alpha, beta, unit(1))?.g,
        tuple_to_form(alpha, beta, unit(2))?.g,
        tuple_to_form(alpha, beta, unit(3))?.g,
    ])
}

/// `g = (beta x - alpha y)(a1 x^3 + a2 x^2 y + a3 x y^2 + a4 y^3)`. A zero tuple is rejected.
pub fn tuple_to_form(alpha: i64, beta: i64, t: [i64; 4]) -> Result<RootedQuartic> {
    let (al, be) = (BigInt::from(alpha), BigInt::from(beta));
    let h: Vec<BigInt> = t.iter().map(|&x| BigInt::from(x)).collect();
    let c = mul_forms(&[be, -al], &h);
    let g = BinaryQuarticForm::from_coeffs(c.try_into().expect("five coefficients"));
    RootedQuartic::new(g, alpha, beta)
}

/// Coordinates of `g` in [`lattice_basis`], i.e. the cofactor's coefficients.
pub fn lattice_coords(rq: &RootedQuartic) -> Result<[BigInt; 4]> {
    let h = rq.cofactor()?;
    Ok([h.a, h.b, h.c, h.d])
}

/// `Disc(a1 beta^3, a2 beta^3, a3 beta^3, -(a1 alpha^3 + a2 alpha^2 beta + a3 alpha beta^2))`.
pub fn t_alpha_beta(
    alpha: &BigInt,
    beta: &BigInt,
    a1: &BigInt,
    a2: &BigInt,
    a3: &BigInt,
) -> BigInt {
    let b3 = beta.pow(3);
    let last = -(a1 * alpha.pow(3) + a2 * alpha * alpha * beta + a3 * alpha * beta * beta);
    disc3(&(a1 * &b3), &(a2 * &b3), &(a3 * &b3), &last)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(c: [i64; 5]) -> BinaryQuarticForm {
        BinaryQuarticForm::new(c[0], c[1], c[2], c[3], c[4])
    }

    #[test]
    fn invariants_examples() {
        let g = q([1, 0, 0, 0, 1]);
        assert_eq!(invariants_ij(&g), (BigInt::from(12), BigInt::from(0)));
        assert_eq!(disc_quartic_int(&g).unwrap(), BigInt::from(256));
        let g = q([0, 1, 0, 1, 1]);
        assert_eq!(invariants_ij(&g), (BigInt::from(-3), BigInt::from(-27)));
        assert_eq!(invariants_ij(&q([0; 5])), (BigInt::zero(), BigInt::zero()));
    }

    #[test]
    fn swap_moves_root() {
        let rq = RootedQuartic::new(q([0, 1, 0, 0, 0]), 0, 1).unwrap();
        let s = pgl2_act(&UnimodularMatrix::swap(), &rq);
        assert_eq!(s.g, q([0, 0, 0, 1, 0]));
        assert_eq!(
            (s.alpha.clone(), s.beta.clone()),
            (BigInt::from(1), BigInt::from(0))
        );
        assert_eq!(pgl2_act(&UnimodularMatrix::identity(), &rq), rq);
        assert!(UnimodularMatrix::new([[2, 0], [0, 1]]).is_err());
    }

    #[test]
    fn rooted_invariants() {
        let rq = RootedQuartic::new(q([0, 1, 0, 1, 1]), 1, 0).unwrap();
        let (qq, d) = q_d_rooted(&rq).unwrap();
        assert_eq!(qq.abs(), BigInt::one());
        assert_eq!(d, BigInt::from(-31));
        assert_eq!(disc_quartic_int(&rq.g).unwrap(), BigInt::from(-31));
        // (x - y)(x^3 - y^3) has a double root at [1 : 1]
        let rq = RootedQuartic::new(q([1, -1, 0, -1, 1]), 1, 1).unwrap();
        assert_eq!(q_d_rooted(&rq).unwrap().0, BigInt::zero());
        assert!(disc_quartic_int(&rq.g).unwrap().is_zero());
        assert!(RootedQuartic::new(q([1, 0, 0, 0, 1]), 1, 0).is_err());
        assert!(RootedQuartic::new(q([0, 1, 0, 0, 0]), 2, 0).is_err());
    }

    #[test]
    fn embedding_example() {
        let f = MonicCubic::new(0, 1, 1);
        let (rq, r) = embed_sigma(&f, &BigInt::one()).unwrap();
        assert_eq!(r, BigInt::zero());
        assert_eq!(rq.g, q([0, 1, 0, 1, 1]));
        assert_eq!(invariants_ij(&rq.g), cubic_ij(&f));
        assert_eq!(cubic_ij(&f), (BigInt::from(-3), BigInt::from(-27)));
    }

    #[test]
    fn embedding_nontrivial_index() {
        // x^3 - 12 has Q = 2: f(x + r) needs 2 | 3r^2 and 4 | r^3 - 12
        let f = MonicCubic::new(0, 0, -12);
        let inv = crate::cubic::q_and_d(&f).unwrap();
        let (rq, _) = embed_sigma(&f, &inv.q_index).unwrap();
        let (qq, d) = q_d_rooted(&rq).unwrap();
        assert_eq!(qq.abs(), inv.q_index);
        assert_eq!(d, inv.disc_field);
        assert_eq!(invariants_ij(&rq.g), cubic_ij(&f));
        assert!(embed_sigma(&f, &BigInt::from(3)).is_err());
    }

    #[test]
    fn tuple_examples() {
        let rq = tuple_to_form(0, 1, [1, 0, 1, 1]).unwrap();
        assert_eq!(q_d_rooted(&rq).unwrap().0, BigInt::one());
        let rq = tuple_to_form(1, 1, [1, 0, 0, -1]).unwrap();
        let (qq, d) = q_d_rooted(&rq).unwrap();
        assert_eq!((qq, d), (BigInt::zero(), BigInt::from(-27)));
        assert!(disc_quartic_int(&rq.g).unwrap().is_zero());
        assert!(tuple_to_form(2, 4, [1, 0, 0, 0]).is_err());
    }

    #[test]
    fn t_degenerate() {
        let z = BigInt::zero();
        let t = t_alpha_beta(&BigInt::from(3), &BigInt::from(2), &z, &z, &BigInt::from(5));
        assert!(t.is_zero());
    }
}
