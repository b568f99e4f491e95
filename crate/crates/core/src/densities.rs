//! Exact p-adic densities of Kodaira symbols and of index exponents.
//!
//! For `p >= 5` the map `(a, b, c) -> (a, A, B)` with `A = b - a^2/3`,
//! `B = c - ab/3 + 2a^3/27` is a measure-preserving bijection of `(Z/p^m)^3`, and
//! the symbol of `x^3 + ax^2 + bx + c` only depends on `(A, B)`. Residue pairs
//! `(A, B) mod p^k` are classified by [`possible_symbols`], which returns every
//! symbol some lift in `Z_p^2` can have. Cylinders whose verdict is still open are
//! refined one digit at a time up to `p^m`.

use crate::arithmetic::{is_prime_u64, BigRational};
use crate::error::{Error, Result};
use crate::local::{KodairaSymbol, Reduction};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_with::{serde_as, DisplayFromStr};
use std::collections::BTreeSet;

/// Refuse direct enumeration of more residue triples than this.
pub const DIRECT_BUDGET: u128 = 1_000_000_000;

fn vp(mut x: i128, p: i128) -> u32 {
    debug_assert!(x != 0);
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Symbols attained by lifts of a residue pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Possible {
    pub symbols: BTreeSet<KodairaSymbol>,
    /// Every `In` with `n >= bound` may occur.
    pub in_from: Option<u32>,
    /// Every `In*` with `n >= bound` may occur.
    pub instar_from: Option<u32>,
    /// Some lift is not minimal.
    pub nonminimal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    In,
    Out,
    Open,
}

impl Possible {
    pub fn verdict(&self, target: &BTreeSet<KodairaSymbol>) -> Verdict {
        let fam_hit = |from: Option<u32>, star: bool| {
            from.is_some_and(|l| {
                target.iter().any(|t| match (t, star) {
                    (KodairaSymbol::In(n), false) | (KodairaSymbol::InStar(n), true) => *n >= l,
                    _ => false,
                })
            })
        };
        let hit = self.symbols.iter().any(|s| target.contains(s))
            || fam_hit(self.in_from, false)
            || fam_hit(self.instar_from, true);
        if !hit {
            return Verdict::Out;
        }
        let all_in = !self.nonminimal
            && self.in_from.is_none()
            && self.instar_from.is_none()
            && self.symbols.iter().all(|s| target.contains(s));
        if all_in {
            Verdict::In
        } else {
            Verdict::Open
        }
    }
}

/// All symbols of minimal lifts of `(A, B) = (a0, b0) mod p^k`, `k >= 1`.
pub fn possible_symbols(a0: i128, b0: i128, p: i128, k: u32) -> Possible {
    use KodairaSymbol::*;
    let pk = p.pow(k);
    let (a0, b0) = (a0.rem_euclid(pk), b0.rem_euclid(pk));
    let va_known = (a0 != 0).then(|| vp(a0, p));
    let vb_known = (b0 != 0).then(|| vp(b0, p));
    // candidate valuation classes: A in {0..3, >=4}, B in {0..5, >=6}
    let cands = |known: Option<u32>, top: u32| -> Vec<u32> {
        match known {
            Some(v) => vec![v.min(top)],
            None => (k.min(top)..=top).collect(),
        }
    };
    let mut out = Possible::default();
    let delta_mod = |modulus: i128| -> i128 {
        let a = a0 % modulus;
        let b = b0 % modulus;
        let a3 = (a * a % modulus) * a % modulus;
        (-4 * a3 - 27 * (b * b % modulus)).rem_euclid(modulus)
    };
    for va in cands(va_known, 4) {
        for vb in cands(vb_known, 6) {
            if va >= 4 && vb >= 6 {
                out.nonminimal = true;
                continue;
            }
            if va == 0 && vb == 0 {
                // A^3 and B^2 known mod p^k
                let d = delta_mod(pk);
                if d != 0 {
                    let n = vp(d, p);
                    out.symbols.insert(if n == 0 { I0 } else { In(n) });
                } else {
                    out.in_from = Some(out.in_from.map_or(k, |x| x.min(k)));
                }
                continue;
            }
            if va == 0 || vb == 0 {
                out.symbols.insert(I0);
                continue;
            }
            if vb == 1 {
                out.symbols.insert(II);
                continue;
            }
            if va == 1 {
                out.symbols.insert(III);
                continue;
            }
            if vb == 2 {
                out.symbols.insert(IV);
                continue;
            }
            // va >= 2, vb >= 3
            if va == 2 && vb == 3 {
                let exact = va_known == Some(2) && vb_known == Some(3);
                if exact {
                    // A^3 known mod p^(k+4), B^2 mod p^(k+3)
                    let kk = k + 3;
                    let m = p.pow(kk);
                    // reconstruct from the residues: lifts differ by multiples of p^k
                    let d = delta_mod(m);
                    if d != 0 {
                        let n = vp(d, p);
                        out.symbols
                            .insert(if n == 6 { I0Star } else { InStar(n - 6) });
                    } else {
                        let l = kk - 6;
                        out.instar_from = Some(out.instar_from.map_or(l, |x| x.min(l)));
                    }
                } else {
                    out.symbols.insert(I0Star);
                    out.instar_from = Some(1);
                }
                continue;
            }
            if (va == 2 && vb >= 4) || (va >= 3 && vb == 3) {
                out.symbols.insert(I0Star);
                continue;
            }
            if vb == 4 {
                out.symbols.insert(IVStar);
                continue;
            }
            if va == 3 {
                out.symbols.insert(IIIStar);
                continue;
            }
            out.symbols.insert(IIStar);
        }
    }
    out
}

#[serde_as]
#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub p: u64,
    pub target: String,
    pub modulus_exp: u32,
    #[serde_as(as = "DisplayFromStr")]
    pub favorable: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub total: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub density: BigRational,
    #[serde_as(as = "DisplayFromStr")]
    pub expected: BigRational,
    pub matches: bool,
    pub nodes: u64,
}

/// Table value for the density of a symbol among monic cubics over `Z_p`.
pub fn symbol_density_expected(p: u64, t: KodairaSymbol) -> BigRational {
    use KodairaSymbol::*;
    let pb = BigInt::from(p);
    let q = |num: BigInt, e: u32| BigRational::new(num, pb.pow(e));
    let p1: BigInt = &pb - 1;
    match t {
        I0 => q(p1, 1),
        In(n) => q(&p1 * &p1, n + 2),
        II => q(p1, 3),
        III => q(p1, 4),
        IV => q(p1, 5),
        I0Star => q(p1, 6),
        InStar(n) => q(&p1 * &p1, n + 7),
        IVStar => q(p1, 8),
        IIIStar => q(p1, 9),
        IIStar => q(p1, 10),
    }
}

/// Table value `(good, multiplicative, additive, total)` for index exponent `k`.
pub fn index_density_expected(p: u64, k: u32) -> [BigRational; 4] {
    let pb = BigInt::from(p);
    let p1: BigInt = &pb - 1;
    let q = |num: BigInt, e: u32| BigRational::new(num, pb.pow(e));
    let zero = BigRational::zero();
    let (g, m, a, t) = match k {
        0 => (
            q(p1.clone(), 1),
            q(&p1 * &p1, 3),
            q(p1.clone(), 3),
            q(&pb * &pb - 1, 2),
        ),
        1 => (
            zero.clone(),
            q(&p1 * &p1, 4),
            q(p1.clone(), 4),
            q(p1.clone(), 3),
        ),
        2 => (
            zero.clone(),
            q(&p1 * &p1, 5),
            q(p1.clone(), 5),
            q(p1.clone(), 4),
        ),
        3 => (zero.clone(), q(&p1 * &p1, 6), zero.clone(), q(&p1 * &p1, 6)),
        4 => (
            zero.clone(),
            q(&p1 * &p1, 7),
            q(p1.clone(), 6),
            q((BigInt::from(2) * &pb - 1) * &p1, 7),
        ),
        6..=8 => (
            zero.clone(),
            q(&p1 * &p1, k + 3),
            q((BigInt::from(2) * &pb - 1) * &p1, k + 3),
            q((BigInt::from(3) * &pb - 2) * &p1, k + 3),
        ),
        _ => (
            zero.clone(),
            q(&p1 * &p1, k + 3),
            q(&p1 * &p1, k + 3),
            q(BigInt::from(2) * &p1 * &p1, k + 3),
        ),
    };
    [g, m, a, t]
}

/// Smallest modulus exponent at which every residue class is decided for `t`.
pub fn m_min(t: KodairaSymbol) -> u32 {
    use KodairaSymbol::*;
    match t {
        I0 => 2,
        In(n) => n + 1,
        II | III | IV => 3,
        I0Star => 4,
        InStar(n) => n + 4,
        IVStar | IIIStar | IIStar => 6,
    }
}

fn check_p(p: u64) -> Result<()> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if p < 5 {
        return Err(Error::SmallPrime(p));
    }
    Ok(())
}

/// Count of `(A, B) mod p^m` whose class lies in `target`, by cylinder refinement.
/// Returns `(favorable pairs, nodes visited)`.
pub fn count_pairs(p: u64, target: &BTreeSet<KodairaSymbol>, m: u32) -> Result<(BigInt, u64)> {
    check_p(p)?;
    if m == 0 {
        return Err(Error::Invalid("modulus exponent must be positive".into()));
    }
    if (p as f64).powi(m as i32 + 3) > 1e36 {
        return Err(Error::Budget(format!(
            "p^{} exceeds 128-bit residue arithmetic",
            m + 3
        )));
    }
    let pi = p as i128;
    fn walk(
        a0: i128,
        b0: i128,
        k: u32,
        p: i128,
        m: u32,
        target: &BTreeSet<KodairaSymbol>,
    ) -> Result<(u128, u64)> {
        match possible_symbols(a0, b0, p, k).verdict(target) {
            Verdict::In => Ok(((p as u128).pow(2 * (m - k)), 1)),
            Verdict::Out => Ok((0, 1)),
            Verdict::Open => {
                if k == m {
                    return Err(Error::Undetermined(format!(
                        "({a0}, {b0}) mod p^{k} is still open"
                    )));
                }
                let pk = p.pow(k);
                let mut fav = 0u128;
                let mut nodes = 1u64;
                for i in 0..p {
                    for j in 0..p {
                        let (f, n) = walk(a0 + i * pk, b0 + j * pk, k + 1, p, m, target)?;
                        fav += f;
                        nodes += n;
                    }
                }
                Ok((fav, nodes))
            }
        }
    }
    let roots: Vec<(i128, i128)> = (0..pi).flat_map(|i| (0..pi).map(move |j| (i, j))).collect();
    let parts: Result<Vec<(u128, u64)>> = roots
        .par_iter()
        .map(|&(i, j)| walk(i, j, 1, pi, m, target))
        .collect();
    let parts = parts?;
    let fav: u128 = parts.iter().map(|x| x.0).sum();
    let nodes: u64 = parts.iter().map(|x| x.1).sum();
    Ok((BigInt::from(fav), nodes))
}

/// Direct count over every `(a, b, c) mod p^m`; independent of the `(A, B)` reduction
/// except through the classifier of residue pairs.
pub fn count_triples_direct(p: u64, target: &BTreeSet<KodairaSymbol>, m: u32) -> Result<BigInt> {
    check_p(p)?;
    let pm = (p as u128).pow(m);
    if pm * pm * pm > DIRECT_BUDGET {
        return Err(Error::Budget(format!("{}^{} residue triples", p, 3 * m)));
    }
    let n = pm as i128;
    let pi = p as i128;
    let inv3 = crate::arithmetic::inv_mod(3, n).unwrap();
    let inv27 = crate::arithmetic::inv_mod(27, n).unwrap();
    let total: Result<Vec<u128>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut fav = 0u128;
            for b in 0..n {
                for c in 0..n {
                    let aa = (b - a * a % n * inv3).rem_euclid(n);
                    let bb =
                        (c - a * b % n * inv3 % n + 2 * (a * a % n * a % n) * inv27).rem_euclid(n);
                    match possible_symbols(aa, bb, pi, m).verdict(target) {
                        Verdict::In => fav += 1,
                        Verdict::Out => {}
                        Verdict::Open => {
                            return Err(Error::Undetermined(format!("({a}, {b}, {c}) mod {p}^{m}")))
                        }
                    }
                }
            }
            Ok(fav)
        })
        .collect();
    Ok(BigInt::from(total?.iter().sum::<u128>()))
}

fn report(
    p: u64,
    target: String,
    m: u32,
    fav_pairs: BigInt,
    nodes: u64,
    expected: BigRational,
) -> DensityReport {
    let pb = BigInt::from(p);
    let favorable = fav_pairs * pb.pow(m);
    let total = pb.pow(3 * m);
    let density = BigRational::new(favorable.clone(), total.clone());
    let matches = density == expected;
    DensityReport {
        p,
        target,
        modulus_exp: m,
        favorable,
        total,
        density,
        expected,
        matches,
        nodes,
    }
}

pub fn count_symbol_density(p: u64, t: KodairaSymbol, m: Option<u32>) -> Result<DensityReport> {
    let m = m.unwrap_or_else(|| m_min(t));
    let target: BTreeSet<_> = [t].into_iter().collect();
    let (fav, nodes) = count_pairs(p, &target, m)?;
    Ok(report(
        p,
        t.to_string(),
        m,
        fav,
        nodes,
        symbol_density_expected(p, t),
    ))
}

/// Symbols with index exponent `k`, split by reduction type.
pub fn symbols_with_index(k: u32) -> Vec<KodairaSymbol> {
    KodairaSymbol::all_up_to(k + 10)
        .into_iter()
        .filter(|s| s.index_exp() == k)
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexDensityReport {
    pub p: u64,
    pub k: u32,
    pub good: DensityReport,
    pub multiplicative: DensityReport,
    pub additive: DensityReport,
    pub total: DensityReport,
    /// good + multiplicative + additive equals the total, exactly.
    pub row_sum_ok: bool,
    pub matches: bool,
}

pub fn count_index_density(p: u64, k: u32, m: Option<u32>) -> Result<IndexDensityReport> {
    let m = m.unwrap_or((k + 2).max(3));
    let syms = symbols_with_index(k);
    let expected = index_density_expected(p, k);
    let part = |red: Option<Reduction>, exp: &BigRational, name: &str| -> Result<DensityReport> {
        let target: BTreeSet<_> = syms
            .iter()
            .copied()
            .filter(|s| red.is_none_or(|r| s.reduction() == r))
            .collect();
        let (fav, nodes) = if target.is_empty() {
            (BigInt::zero(), 0)
        } else {
            count_pairs(p, &target, m)?
        };
        Ok(report(
            p,
            format!("index p^{k} {name}"),
            m,
            fav,
            nodes,
            exp.clone(),
        ))
    };
    let good = part(Some(Reduction::Good), &expected[0], "good")?;
    let multiplicative = part(
        Some(Reduction::Multiplicative),
        &expected[1],
        "multiplicative",
    )?;
    let additive = part(Some(Reduction::Additive), &expected[2], "additive")?;
    let total = part(None, &expected[3], "total")?;
    let row_sum_ok = &good.density + &multiplicative.density + &additive.density == total.density;
    let matches = good.matches && multiplicative.matches && additive.matches && total.matches;
    Ok(IndexDensityReport {
        p,
        k,
        good,
        multiplicative,
        additive,
        total,
        row_sum_ok,
        matches,
    })
}

/// Sum of the table densities over symbols with discriminant exponent at most `cap`.
pub fn table_mass(p: u64, cap: u32) -> BigRational {
    KodairaSymbol::all_up_to(cap)
        .into_iter()
        .map(|s| symbol_density_expected(p, s))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// Mass of non-minimal cubics, `p^-10`.
pub fn nonminimal_mass(p: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p).pow(10))
}
