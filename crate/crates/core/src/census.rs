//! Census of the family of curves with good reduction at 2 and 3.

use crate::arithmetic::{factorize_u64, val_i128, BigRational};
use crate::constants::{c_inf_minus, c_inf_plus, euler_constant, ConstantName, DEFAULT_P0};
use crate::error::{Error, Result};
use crate::interval::IntervalReal;
use crate::local::{symbol_from_valuations, KodairaSymbol};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// `(A, B) mod 2^7` rows of good reduction at 2, before the `+ 64 delta` shift.
pub const TABLE2_ODD_ROWS: [(u32, u32); 8] = [
    (5, 22),
    (13, 14),
    (21, 38),
    (29, 94),
    (37, 54),
    (45, 46),
    (53, 70),
    (61, 126),
];

/// `A / 3^3 mod 3^3` and the two `B / 3^3` values, each taken with both signs, mod `3^7`.
pub const TABLE3_ROWS: [(u32, [u32; 2]); 9] = [
    (2, [20, 34]),
    (5, [11, 16]),
    (8, [2, 29]),
    (11, [7, 20]),
    (14, [16, 38]),
    (17, [2, 25]),
    (20, [7, 34]),
    (23, [11, 38]),
    (26, [25, 29]),
];

/// Which table rows a pair satisfies, and the powers of 2 and 3 dividing `Delta(A, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GoodModel {
    pub row2: usize,
    pub row3: usize,
    pub delta2_exp: u32,
    pub delta3_exp: u32,
}

/// Row index (0-based) of the 2-adic table matched by residues mod 128.
pub fn row2(a: u32, b: u32) -> Option<usize> {
    if a.is_multiple_of(16) && b % 64 == 16 {
        return Some(0);
    }
    for (i, &(a0, b0)) in TABLE2_ODD_ROWS.iter().enumerate() {
        for delta in 0..2 {
            if a == (a0 + 64 * delta) % 128 && b == (b0 + 64 * delta) % 128 {
                return Some(i + 1);
            }
        }
    }
    None
}

/// Row index (0-based) of the 3-adic table matched by residues mod 3^7.
pub fn row3(a: u32, b: u32) -> Option<usize> {
    if !a.is_multiple_of(3) {
        return Some(0);
    }
    if (a % 243 == 81 || a % 243 == 162) && b.is_multiple_of(729) {
        return Some(1);
    }
    for (i, &(k, bs)) in TABLE3_ROWS.iter().enumerate() {
        if a % 729 != k * 27 {
            continue;
        }
        for &u in &bs {
            let plus = (u * 27) % 2187;
            let minus = (2187 - plus) % 2187;
            if b == plus || b == minus {
                return Some(i + 2);
            }
        }
    }
    None
}

pub fn good_reduction_model(a: &BigInt, b: &BigInt) -> Option<GoodModel> {
    let r = |x: &BigInt, m: u32| x.mod_floor(&BigInt::from(m)).to_u32().unwrap();
    let r2 = row2(r(a, 128), r(b, 128))?;
    let r3 = row3(r(a, 2187), r(b, 2187))?;
    Some(GoodModel {
        row2: r2,
        row3: r3,
        delta2_exp: 8,
        delta3_exp: if r3 == 0 { 0 } else { 12 },
    })
}

/// Which rows of the good-reduction tables are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyMode {
    /// `16 | A`, `B = 16 mod 64`, `3 !| A`.
    SingleClass,
    /// Every row of both tables.
    FullTables,
}

/// Residue conditions on `(A, B)` at 2 and 3.
#[derive(Debug, Clone, Serialize)]
pub struct CongruenceFamily {
    pub mode: FamilyMode,
    pub modulus2: u32,
    pub residues2: Vec<(u32, u32)>,
    pub modulus3: u32,
    pub residues3: Vec<(u32, u32)>,
    pub delta2_exp: u32,
}

impl CongruenceFamily {
    pub fn new(mode: FamilyMode) -> Self {
        let mut residues2 = Vec::new();
        for a in 0..128 {
            for b in 0..128 {
                if let Some(r) = row2(a, b) {
                    if mode == FamilyMode::FullTables || r == 0 {
                        residues2.push((a, b));
                    }
                }
            }
        }
        let mut residues3 = Vec::new();
        for a in 0..2187 {
            for b in 0..2187 {
                if let Some(r) = row3(a, b) {
                    if mode == FamilyMode::FullTables || r == 0 {
                        residues3.push((a, b));
                    }
                }
            }
        }
        CongruenceFamily {
            mode,
            modulus2: 128,
            residues2,
            modulus3: 2187,
            residues3,
            delta2_exp: 8,
        }
    }

    pub fn density2(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.residues2.len()),
            BigInt::from(128u32 * 128),
        )
    }

    pub fn density3(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.residues3.len()),
            BigInt::from(2187u32 * 2187),
        )
    }

    /// `sum nu_ij Delta_ij^(5/6)` over the enumerated rows; optionally skipping
    /// the 3-adic row `3^4 || A, 3^6 | B`, whose pairs rescale to the first row.
    pub fn mass(&self, distinct: bool) -> f64 {
        let mut m3 = 0.0;
        for &(a, b) in &self.residues3 {
            let r = row3(a, b).unwrap();
            if distinct && r == 1 {
                continue;
            }
            let e = if r == 0 { 0.0 } else { 12.0 };
            m3 += 3f64.powf(5.0 * e / 6.0);
        }
        m3 /= 2187.0 * 2187.0;
        let m2 = self.residues2.len() as f64 / (128.0 * 128.0) * 2f64.powf(5.0 * 8.0 / 6.0);
        m2 * m3
    }
}

pub(crate) fn row3_exp(r: usize) -> u32 {
    if r == 0 {
        0
    } else {
        12
    }
}

/// Allowed `B` residues for a given `A`, as a single progression set `B = r mod m`.
fn b_residues(fam: &CongruenceFamily, a: i64) -> Option<(i64, Vec<i64>, usize)> {
    let a2 = a.rem_euclid(128) as u32;
    let a3 = a.rem_euclid(2187) as u32;
    let s2: Vec<u32> = fam
        .residues2
        .iter()
        .filter(|r| r.0 == a2)
        .map(|r| r.1)
        .collect();
    if s2.is_empty() {
        return None;
    }
    let row = if !a3.is_multiple_of(3) {
        0
    } else {
        let s3: Vec<u32> = fam
            .residues3
            .iter()
            .filter(|r| r.0 == a3)
            .map(|r| r.1)
            .collect();
        let r = s3.first().map(|&b| row3(a3, b).unwrap())?;
        let mut out = Vec::new();
        for &x in &s2 {
            for &y in &s3 {
                out.push(crt2(x as i64, 128, y as i64, 2187));
            }
        }
        out.sort();
        return Some((128 * 2187, out, r));
    };
    if !fam.residues3.iter().any(|r| r.0 == a3) {
        return None;
    }
    let mut out: Vec<i64> = s2.into_iter().map(|x| x as i64).collect();
    out.sort();
    Some((128, out, row))
}

fn crt2(x: i64, m: i64, y: i64, n: i64) -> i64 {
    // m, n coprime
    let inv = crate::arithmetic::inv_mod(m as i128, n as i128).unwrap() as i64;
    let t = ((y - x).rem_euclid(n) * inv).rem_euclid(n);
    x + m * t
}

/// `j = 6912 A^3 / (4A^3 + 27B^2)` in lowest terms with positive denominator.
pub fn j_invariant(a: &BigInt, b: &BigInt) -> Result<BigRational> {
    let den = BigInt::from(4) * a * a * a + BigInt::from(27) * b * b;
    if den.is_zero() {
        return Err(Error::Degenerate);
    }
    Ok(BigRational::new(BigInt::from(6912) * a * a * a, den))
}

/// `|j| < log |Delta(E)|`, decided exactly or by interval logarithm.
pub fn passes_j_cutoff(a: i64, b: i64, delta_e: i128) -> Result<bool> {
    let (a, b) = (a as i128, b as i128);
    let num = 6912 * a.abs() * a * a;
    let num = num.abs();
    let den = (4 * a * a * a + 27 * b * b).abs();
    if den == 0 {
        return Err(Error::Degenerate);
    }
    let d = delta_e.unsigned_abs();
    if d <= 1 {
        return Ok(false);
    }
    let lhs = num as f64;
    let rhs = (d as f64).ln() * den as f64;
    if (lhs - rhs).abs() > 1e-9 * rhs.max(1.0) {
        return Ok(lhs < rhs);
    }
    let l = IntervalReal::from_int(&BigInt::from(d), 160)
        .ln()
        .mul_int(&BigInt::from(den));
    let j = IntervalReal::from_int(&BigInt::from(num), 160);
    j.lt(&l)
        .ok_or_else(|| Error::Straddle(format!("j-cutoff for ({a}, {b})")))
}

/// One classified curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveRecord {
    pub a: i64,
    pub b: i64,
    pub delta_ab: i128,
    pub delta_e: i64,
    pub conductor: u64,
    pub index: u64,
    pub q_inv: u64,
    pub d_inv: i64,
    pub j_num: String,
    pub j_den: String,
    pub symbols: Vec<(u64, KodairaSymbol)>,
    pub row2: usize,
    pub row3: usize,
    pub in_e: bool,
}

impl CurveRecord {
    pub fn j(&self) -> BigRational {
        BigRational::new(self.j_num.parse().unwrap(), self.j_den.parse().unwrap())
    }

    /// Exact per-record identities; `Err` on the first violation.
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Invariant(format!("({}, {}): {m}", self.a, self.b)));
        if self.delta_e % 2 == 0 || self.delta_e % 3 == 0 {
            return bad("Delta(E) not coprime to 6");
        }
        let d = self.delta_e.unsigned_abs();
        if !d.is_multiple_of(self.conductor) || d / self.conductor != self.index {
            return bad("index is not |Delta| / C");
        }
        if (self.q_inv as i128).pow(2) * self.d_inv as i128 != self.delta_e as i128 {
            return bad("Delta != Q^2 D");
        }
        let expected_den = BigInt::from(2).pow(8) * BigInt::from(3).pow(row3_exp(self.row3));
        if BigInt::from(self.delta_ab) != expected_den * BigInt::from(self.delta_e) {
            return bad("Delta(A, B) / Delta(E) is not the table normalizer");
        }
        if self.is_sf()
            && (self.d_inv.unsigned_abs() as u128) * d as u128 != (self.conductor as u128).pow(2)
        {
            return bad("sf curve with |D| != C^2 / |Delta|");
        }
        Ok(())
    }

    pub fn is_sf(&self) -> bool {
        factorize_u64(self.index).iter().all(|&(_, e)| e == 1)
    }

    pub fn is_single_class(&self) -> bool {
        self.row2 == 0 && self.row3 == 0
    }
}

/// Family flags of a classified record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub in_e: bool,
    pub sf: bool,
    pub kappa: bool,
    pub sigma: bool,
}

/// `sf`: index squarefree. `kappa`: `|Delta(E)| < C^kappa`. `sigma`: all symbols in the collection.
pub fn family_filters(
    rec: &CurveRecord,
    kappa: f64,
    sigma: Option<&BTreeSet<KodairaSymbol>>,
) -> Flags {
    let d = rec.delta_e.unsigned_abs() as f64;
    let lhs = d.ln();
    let rhs = kappa * (rec.conductor as f64).ln();
    let kap = if (lhs - rhs).abs() > 1e-12 * rhs.abs().max(1.0) {
        lhs < rhs
    } else {
        // exact comparison when kappa is a short decimal
        let k = BigRational::from_float(kappa).unwrap();
        let (n, m) = (
            k.numer().to_u32().unwrap_or(0),
            k.denom().to_u32().unwrap_or(1),
        );
        BigInt::from(rec.delta_e.unsigned_abs()).pow(m) < BigInt::from(rec.conductor).pow(n)
    };
    let sigma_ok = match sigma {
        None => true,
        Some(s) => rec.symbols.iter().all(|(_, t)| s.contains(t)),
    };
    Flags {
        in_e: rec.in_e,
        sf: rec.in_e && rec.is_sf(),
        kappa: rec.in_e && kap,
        sigma: rec.in_e && sigma_ok,
    }
}

/// Classify `(A, B)`. `Ok(None)` when the pair is outside the tables, singular or non-minimal at some `p >= 5`.
pub fn classify_pair(a: i64, b: i64) -> Result<Option<CurveRecord>> {
    let (a2, b2) = (a.rem_euclid(128) as u32, b.rem_euclid(128) as u32);
    let (a3, b3) = (a.rem_euclid(2187) as u32, b.rem_euclid(2187) as u32);
    let (r2, r3) = match (row2(a2, b2), row3(a3, b3)) {
        (Some(x), Some(y)) => (x, y),
        _ => return Ok(None),
    };
    let (ai, bi) = (a as i128, b as i128);
    let delta_ab = -4 * ai * ai * ai - 27 * bi * bi;
    if delta_ab == 0 {
        return Ok(None);
    }
    let norm = 256i128 * 3i128.pow(row3_exp(r3));
    if delta_ab % norm != 0 {
        return Err(Error::Invariant(format!(
            "({a}, {b}): normalizer does not divide Delta(A, B)"
        )));
    }
    let delta_e = delta_ab / norm;
    let de =
        i64::try_from(delta_e).map_err(|_| Error::Budget("Delta(E) exceeds 64 bits".into()))?;
    let mut conductor = 1u64;
    let mut q_inv = 1u64;
    let mut d_inv: i64 = de.signum();
    let mut symbols = Vec::new();
    for (p, e) in factorize_u64(de.unsigned_abs()) {
        if p < 5 {
            return Err(Error::Invariant(format!(
                "({a}, {b}): {p} divides Delta(E)"
            )));
        }
        let va = val_i128(ai, p as i128);
        let vb = val_i128(bi, p as i128);
        if va.is_none_or(|x| x >= 4) && vb.is_none_or(|x| x >= 6) {
            return Ok(None);
        }
        let t = symbol_from_valuations(va, vb, e)
            .ok_or_else(|| Error::Invariant(format!("({a}, {b}): no symbol at {p}")))?;
        let (c, dd, q, d) = t.exponents();
        if dd != e {
            return Err(Error::Invariant(format!(
                "({a}, {b}): v_{p}(Delta) = {e} but {t}"
            )));
        }
        conductor *= p.pow(c);
        q_inv *= p.pow(q);
        d_inv *= p.pow(d) as i64;
        symbols.push((p, t));
    }
    let index = de.unsigned_abs() / conductor;
    let j = j_invariant(&BigInt::from(a), &BigInt::from(b))?;
    let in_e = passes_j_cutoff(a, b, delta_e)?;
    Ok(Some(CurveRecord {
        a,
        b,
        delta_ab,
        delta_e: de,
        conductor,
        index,
        q_inv,
        d_inv,
        j_num: j.numer().to_string(),
        j_den: j.denom().to_string(),
        symbols,
        row2: r2,
        row3: r3,
        in_e,
    }))
}

pub const H_MAX_BUDGET: f64 = 1e10;

/// All pairs with `max(4|A|^3, 27B^2) < h_max` in the family, nonsingular, minimal,
/// and (when `cutoff` is set) passing the j-cutoff.
pub fn enumerate_family_e(h_max: f64, mode: FamilyMode, cutoff: bool) -> Result<Vec<CurveRecord>> {
    if !(h_max > 0.0) || h_max > H_MAX_BUDGET {
        return Err(Error::Budget(format!(
            "H_max = {h_max} outside (0, {H_MAX_BUDGET}]"
        )));
    }
    let fam = CongruenceFamily::new(mode);
    let a_max = ((h_max / 4.0).cbrt()).ceil() as i64 + 1;
    let b_max = ((h_max / 27.0).sqrt()).ceil() as i64 + 1;
    let in_box = |a: i64, b: i64| {
        let h = (4 * (a as i128).abs().pow(3)).max(27 * (b as i128).pow(2));
        (h as f64) < h_max
    };
    let strips: Vec<Result<Vec<CurveRecord>>> = (-a_max..=a_max)
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            let Some((m, res, _)) = b_residues(&fam, a) else {
                return Ok(out);
            };
            for r in res {
                let mut b = r - m * ((b_max + r) / m + 1);
                while b <= b_max {
                    if b >= -b_max && in_box(a, b) {
                        if let Some(rec) = classify_pair(a, b)? {
                            if !cutoff || rec.in_e {
                                out.push(rec);
                            }
                        }
                    }
                    b += m;
                }
            }
            out.sort_by_key(|r| r.b);
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for s in strips {
        all.extend(s?);
    }
    Ok(all)
}

/// Census parameters.
#[derive(Debug, Clone, Serialize)]
pub struct CensusConfig {
    pub grid: Vec<u64>,
    pub kappa: f64,
    pub mode: FamilyMode,
    /// Curves are enumerated up to `|Delta(E)| < index_cap * max(grid)`; curves of
    /// larger index below the conductor bound are missed.
    pub index_cap: u64,
    pub sigma: Option<BTreeSet<KodairaSymbol>>,
    /// Refuse to start above this many candidate pairs.
    pub budget: u64,
    pub prec: u32,
}

impl CensusConfig {
    pub fn dyadic(x_max: u64, kappa: f64) -> Self {
        CensusConfig {
            grid: dyadic_grid(x_max),
            kappa,
            mode: FamilyMode::SingleClass,
            index_cap: 1000,
            sigma: None,
            budget: 2_000_000_000,
            prec: 128,
        }
    }
}

/// `x_max / 2^i` down to `1000`, ascending.
pub fn dyadic_grid(x_max: u64) -> Vec<u64> {
    let mut g = vec![x_max];
    let mut x = x_max;
    while x / 2 >= 1000 {
        x /= 2;
        g.push(x);
    }
    g.reverse();
    g
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyCounts {
    pub counts: Vec<u64>,
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailRow {
    pub family: String,
    pub m: u64,
    /// `#{C < X_max, |Delta| > M C}`.
    pub count: u64,
    /// `count * M^(1/6) / X_max^(5/6)`.
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictedConstant {
    pub name: String,
    pub value: f64,
    pub lo: String,
    pub hi: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub grid: Vec<u64>,
    pub kappa: f64,
    pub mode: FamilyMode,
    pub index_cap: u64,
    pub delta_bound: u64,
    pub candidates: u64,
    pub records: u64,
    pub families: BTreeMap<String, FamilyCounts>,
    pub constants: BTreeMap<String, PredictedConstant>,
    /// `sum nu Delta_23^(5/6)` of the enumerated rows, and the value implied by the leading constant.
    pub local_mass: BTreeMap<String, f64>,
    /// Uncertified expectations that account for the j-cutoff at `log X_max`.
    pub heuristic: BTreeMap<String, f64>,
    pub tails: Vec<TailRow>,
}

/// Per-strip tallies, merged by exact addition.
#[derive(Default, Clone)]
struct Tally {
    bins: BTreeMap<String, Vec<u64>>,
    tails: BTreeMap<String, Vec<u64>>,
    records: u64,
}

impl Tally {
    fn merge(&mut self, o: Tally) {
        for (k, v) in o.bins {
            let e = self.bins.entry(k).or_insert_with(|| vec![0; v.len()]);
            e.iter_mut().zip(v).for_each(|(x, y)| *x += y);
        }
        for (k, v) in o.tails {
            let e = self.tails.entry(k).or_insert_with(|| vec![0; v.len()]);
            e.iter_mut().zip(v).for_each(|(x, y)| *x += y);
        }
        self.records += o.records;
    }
}

fn tail_ms(cap: u64) -> Vec<u64> {
    let mut m = vec![1u64];
    while m.last().unwrap() * 2 <= cap {
        m.push(m.last().unwrap() * 2);
    }
    m
}

fn family_names(cfg: &CensusConfig) -> Vec<&'static str> {
    let mut v = vec!["E", "E_sf", "E_kappa"];
    if cfg.sigma.is_some() {
        v.extend(["E_sigma_sf", "E_sigma_kappa"]);
    }
    if cfg.mode == FamilyMode::FullTables {
        v.extend(["E_full", "E_sf_full", "E_sf_full_distinct", "E_kappa_full"]);
    }
    v
}

/// Enumerate, classify and count by conductor.
pub fn run_census(cfg: &CensusConfig) -> Result<CensusReport> {
    let mut grid = cfg.grid.clone();
    grid.sort();
    grid.dedup();
    let x_max = *grid
        .last()
        .ok_or_else(|| Error::Invalid("empty grid".into()))?;
    if cfg.index_cap == 0 || cfg.kappa <= 1.0 {
        return Err(Error::Invalid(
            "index_cap must be positive and kappa > 1".into(),
        ));
    }
    let delta_bound = x_max
        .checked_mul(cfg.index_cap)
        .filter(|&d| d < 1u64 << 50)
        .ok_or_else(|| Error::Budget("x_max * index_cap too large".into()))?;
    let fam = CongruenceFamily::new(cfg.mode);
    // |j| < log|Delta(E)| <= L forces 6912|A|^3 < L |Delta(A, B)|
    let l = (delta_bound as f64).ln();
    let n_max = |row: usize| (256.0 * 3f64.powi(row3_exp(row) as i32)) * delta_bound as f64;
    let a_max = ((l * n_max(1) / 6912.0).cbrt()).ceil() as i64 + 1;
    let plan: Vec<(i64, i64, Vec<i64>, i64)> = (-a_max..=a_max)
        .filter_map(|a| {
            let (m, res, row) = b_residues(&fam, a)?;
            let n = n_max(row);
            if 6912.0 * (a as f64).abs().powi(3) >= l * n * (1.0 + 1e-9) {
                return None;
            }
            let b_max = (((n + 4.0 * (a as f64).abs().powi(3)) / 27.0).sqrt()).ceil() as i64 + 1;
            Some((a, m, res, b_max))
        })
        .collect();
    let candidates: u64 = plan
        .iter()
        .map(|(_, m, res, bm)| res.len() as u64 * (2 * *bm as u64 / *m as u64 + 1))
        .sum();
    if candidates > cfg.budget {
        return Err(Error::Budget(format!(
            "{candidates} candidate pairs exceed budget {}",
            cfg.budget
        )));
    }
    let names = family_names(cfg);
    let ms = tail_ms(cfg.index_cap);
    let nbins = grid.len();
    let tally = plan
        .par_iter()
        .map(|(a, m, res, b_max)| -> Result<Tally> {
            let mut t = Tally::default();
            for n in &names {
                t.bins.insert(n.to_string(), vec![0; nbins]);
            }
            for n in ["E", "E_sf", "E_full"] {
                t.tails.insert(n.to_string(), vec![0; ms.len()]);
            }
            let a = *a;
            let a3 = 4 * (a as i128).pow(3);
            for &r in res {
                let mut b = r - m * ((b_max + r) / m + 1);
                while b <= *b_max {
                    if b >= -*b_max {
                        let row_norm = if a.rem_euclid(3) == 0 {
                            256 * 3i128.pow(12)
                        } else {
                            256
                        };
                        let dab = -a3 - 27 * (b as i128).pow(2);
                        if dab != 0 && (dab.unsigned_abs() / row_norm as u128) < delta_bound as u128
                        {
                            if let Some(rec) = classify_pair(a, b)? {
                                if rec.in_e {
                                    rec.check()?;
                                    t.records += 1;
                                    tally_record(&mut t, &rec, cfg, &grid, &ms);
                                }
                            }
                        }
                    }
                    b += m;
                }
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |mut x, y| {
            x.merge(y);
            Ok(x)
        })?;
    let scale = |x: u64| (x as f64).powf(5.0 / 6.0);
    let mut families = BTreeMap::new();
    for n in &names {
        let bins = tally
            .bins
            .get(*n)
            .cloned()
            .unwrap_or_else(|| vec![0; nbins]);
        let mut counts = Vec::with_capacity(nbins);
        let mut acc = 0;
        for c in bins {
            acc += c;
            counts.push(acc);
        }
        let ratios = counts
            .iter()
            .zip(&grid)
            .map(|(&c, &x)| c as f64 / scale(x))
            .collect();
        families.insert(n.to_string(), FamilyCounts { counts, ratios });
    }
    let mut tails = Vec::new();
    for (fname, v) in &tally.tails {
        if !families.contains_key(fname) {
            continue;
        }
        for (i, &m) in ms.iter().enumerate() {
            tails.push(TailRow {
                family: fname.clone(),
                m,
                count: v[i],
                normalized: v[i] as f64 * (m as f64).powf(1.0 / 6.0) / scale(x_max),
            });
        }
    }
    let mut constants = BTreeMap::new();
    for name in [ConstantName::Sf, ConstantName::Kappa, ConstantName::Generic] {
        let c = euler_constant(name, DEFAULT_P0, cfg.prec)?;
        let (lo, hi) = c.value.decimal_bounds(12);
        constants.insert(
            name.to_string(),
            PredictedConstant {
                name: name.to_string(),
                value: c.value.mid_f64(),
                lo,
                hi,
            },
        );
    }
    let mut local_mass = BTreeMap::new();
    local_mass.insert(
        "implied_by_constant".to_string(),
        2f64.powf(2.0 / 3.0) / 8.0,
    );
    local_mass.insert(
        "single_class".to_string(),
        CongruenceFamily::new(FamilyMode::SingleClass).mass(false),
    );
    if cfg.mode == FamilyMode::FullTables {
        local_mass.insert("full_tables".to_string(), fam.mass(false));
        local_mass.insert("full_tables_distinct".to_string(), fam.mass(true));
    }
    let frac = cutoff_volume_fraction((x_max as f64).ln());
    let sf = constants["sf"].value;
    let implied = local_mass["implied_by_constant"];
    let mut heuristic = BTreeMap::new();
    heuristic.insert("cutoff_fraction".to_string(), frac);
    for (k, key) in [
        ("E_sf", "single_class"),
        ("E_sf_full_distinct", "full_tables_distinct"),
    ] {
        if let Some(m) = local_mass.get(key) {
            heuristic.insert(k.to_string(), sf * m / implied * frac);
        }
    }
    Ok(CensusReport {
        grid,
        kappa: cfg.kappa,
        mode: cfg.mode,
        index_cap: cfg.index_cap,
        delta_bound,
        candidates,
        records: tally.records,
        families,
        constants,
        local_mass,
        heuristic,
        tails,
    })
}

/// Area of `{|4a^3 + 27b^2| < 1, 1728 |4a^3| < l |4a^3 + 27b^2|}` divided by the
/// area without the second condition. Plain quadrature; a diagnostic only.
pub fn cutoff_volume_fraction(l: f64) -> f64 {
    let area = |l: Option<f64>| {
        // B-measure at fixed a: s = 4a^3 + 27b^2 ranges over allowed s, db = ds / sqrt(27 (s - t))
        let inner = |a: f64| {
            let t = 4.0 * a * a * a;
            let lo = l.map_or(0.0, |l| 1728.0 * t.abs() / l);
            let mut tot = 0.0;
            for (u, v) in [(-1.0, -lo), (lo, 1.0)] {
                let u: f64 = f64::max(u, t);
                if v > u {
                    tot += 2.0 / 27f64.sqrt() * ((v - t).sqrt() - (u - t).sqrt());
                }
            }
            tot
        };
        // substitute a = sign(x) |x|^3 to tame the cusp at 0 and the slow decay
        let r = match l {
            Some(l) => (l / 6912.0).cbrt().cbrt(),
            None => 40.0,
        };
        let n = 200_000;
        let h = 2.0 * r / n as f64;
        let f = |x: f64| inner(x.signum() * x.abs().powi(3)) * 3.0 * x * x;
        let mut s = f(-r) + f(r);
        for i in 1..n {
            let x = -r + i as f64 * h;
            s += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    area(Some(l)) / (c_inf_plus(64).mid_f64() + c_inf_minus(64).mid_f64())
}

fn tally_record(t: &mut Tally, rec: &CurveRecord, cfg: &CensusConfig, grid: &[u64], ms: &[u64]) {
    // first grid point strictly above the conductor
    let Some(bin) = grid.iter().position(|&x| rec.conductor < x) else {
        return;
    };
    let f = family_names_flags(rec, cfg);
    for (name, on) in f {
        if on {
            if let Some(v) = t.bins.get_mut(name) {
                v[bin] += 1;
            }
            if let Some(v) = t.tails.get_mut(name) {
                for (i, &m) in ms.iter().enumerate() {
                    if rec.index > m {
                        v[i] += 1;
                    }
                }
            }
        }
    }
}

fn family_names_flags(rec: &CurveRecord, cfg: &CensusConfig) -> Vec<(&'static str, bool)> {
    let fl = family_filters(rec, cfg.kappa, cfg.sigma.as_ref());
    let single = rec.is_single_class();
    vec![
        ("E", single),
        ("E_sf", single && fl.sf),
        ("E_kappa", single && fl.kappa),
        ("E_sigma_sf", single && fl.sf && fl.sigma),
        ("E_sigma_kappa", single && fl.kappa && fl.sigma),
        ("E_full", true),
        ("E_sf_full", fl.sf),
        ("E_sf_full_distinct", fl.sf && rec.row3 != 1),
        ("E_kappa_full", fl.kappa),
    ]
}

impl CensusReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,family,count,ratio\n");
        for (i, x) in self.grid.iter().enumerate() {
            for (name, f) in &self.families {
                s.push_str(&format!("{x},{name},{},{:.9}\n", f.counts[i], f.ratios[i]));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_pair() {
        let r = classify_pair(16, 16).unwrap().unwrap();
        assert_eq!(r.delta_e, -91);
        assert_eq!(r.conductor, 91);
        assert_eq!(r.index, 1);
        assert_eq!((r.j_num.as_str(), r.j_den.as_str()), ("110592", "91"));
        assert_eq!(r.j(), BigRational::new(28311552.into(), 23296.into()));
        assert!(!r.in_e);
        r.check().unwrap();
    }

    #[test]
    fn j_values() {
        assert!(j_invariant(&0.into(), &5.into()).unwrap().is_zero());
        assert_eq!(
            j_invariant(&3.into(), &0.into()).unwrap(),
            BigRational::from_integer(1728.into())
        );
        assert!(j_invariant(&(-3).into(), &2.into()).is_err());
    }

    #[test]
    fn kappa_filter() {
        let mut r = classify_pair(16, 16).unwrap().unwrap();
        r.in_e = true;
        assert!(family_filters(&r, 1.2, None).kappa);
        assert!(family_filters(&r, 1.2, None).sf);
        r.in_e = false;
        assert!(!family_filters(&r, 1.2, None).sf);
    }

    #[test]
    fn class_densities() {
        let s = CongruenceFamily::new(FamilyMode::SingleClass);
        assert_eq!(s.density2(), BigRational::new(1.into(), 1024.into()));
        assert_eq!(s.density3(), BigRational::new(2.into(), 3.into()));
        let f = CongruenceFamily::new(FamilyMode::FullTables);
        assert_eq!(
            f.density2(),
            BigRational::new(1.into(), 1024.into()) + BigRational::new(8.into(), 8192.into())
        );
        let d3 = BigRational::new(2.into(), 3.into())
            + BigRational::new(2.into(), 3i64.pow(11).into())
            + BigRational::new(36.into(), 3i64.pow(13).into());
        assert_eq!(f.density3(), d3);
    }

    #[test]
    fn cutoff_fraction_values() {
        let f = cutoff_volume_fraction(10f64.powi(7).ln());
        assert!((f - 0.063_473_6).abs() < 1e-4, "{f}");
        assert!(cutoff_volume_fraction(1e6) > 0.5);
    }

    #[test]
    fn dyadic() {
        assert_eq!(dyadic_grid(8000), vec![1000, 2000, 4000, 8000]);
    }
}
