use clap::{Args, Parser, Subcommand};
use ellstat::census::{dyadic_grid, run_census, CensusConfig, FamilyMode};
use ellstat::constants::{euler_constant, ConstantName, DEFAULT_P0};
use ellstat::cubic::q_and_d;
use ellstat::densities::{count_index_density, count_symbol_density};
use ellstat::fourier::{
    fourier_at, modulus_for, phi0_indicator, r_t_count, stated_magnitude, verify_iii_corrected,
    verify_iii_literal, verify_in_bound, verify_iv, verify_stated_magnitudes,
    verify_translate_bound, CharacterTriple, CheckReport,
};
use ellstat::local::{
    classify_by_translation, classify_by_valuations, global_invariants, local_data, KodairaSymbol,
    WeierstrassCurve,
};
use ellstat::quartic::{
    disc_quartic, embed_sigma, invariants_ij, q_d_rooted, BinaryQuarticForm, RootedQuartic,
};
use ellstat::shape::shape;
use ellstat::{Error, Result};
use num_bigint::BigInt;
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit codes: 0 success, 1 verification mismatch, 2 invariant violation, 3 budget refusal, 64 usage.
#[derive(Parser)]
#[command(
    name = "ellstat",
    version,
    about = "Reduction types, cubic rings and conductor census for y^2 = x^3 + Ax + B"
)]
struct Cli {
    /// File of `key = value` lines (budget, index_cap, prec, p0, digits, kappa).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Local data at each bad prime and global invariants of a curve.
    Classify {
        #[arg(long, value_name = "A,B")]
        curve: String,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Index and field discriminant of Z[x]/(x^3 + ax^2 + bx + c).
    Cubic {
        #[arg(long, value_name = "a,b,c")]
        poly: String,
        #[arg(long)]
        shape: bool,
        #[arg(long)]
        json: bool,
    },
    /// Exact p-adic density of a reduction type or an index exponent.
    Density {
        #[arg(long)]
        prime: u64,
        #[arg(long, conflicts_with = "index")]
        symbol: Option<String>,
        #[arg(long)]
        index: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Fourier transforms of the reduction-type indicators.
    Fourier(FourierArgs),
    /// Invariants of a binary quartic form, optionally rooted.
    Quartic {
        #[arg(long, value_name = "a,b,c,d,e", allow_hyphen_values = true)]
        form: String,
        #[arg(long, value_name = "alpha,beta", allow_hyphen_values = true)]
        root: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Rooted quartic attached to the cubic x^3 + Ax + B.
    Embed {
        #[arg(long, value_name = "A,B", allow_hyphen_values = true)]
        poly: String,
    },
    /// Conductor-ordered census.
    Census(CensusArgs),
    /// Certified leading constants.
    Constants {
        #[arg(long, default_value = "all")]
        name: String,
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long)]
        p0: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct FourierArgs {
    #[arg(long)]
    prime: u64,
    #[arg(long)]
    symbol: String,
    #[arg(long, value_name = "a,b,c", allow_hyphen_values = true)]
    chi: Option<String>,
    #[arg(long)]
    verify_lemmas: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct CensusArgs {
    /// Largest conductor, e.g. `10000000` or `1e7`.
    #[arg(long, value_parser = parse_count)]
    xmax: u64,
    /// `dyadic` or a comma-separated list.
    #[arg(long, default_value = "dyadic")]
    grid: String,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    full_tables: bool,
    #[arg(long)]
    index_cap: Option<u64>,
    /// Allowed reduction types, e.g. `I0,I1,II,III`.
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Default)]
struct Config(BTreeMap<String, String>);

impl Config {
    fn load(path: Option<&PathBuf>) -> Result<Self> {
        let Some(p) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(p)
            .map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
        let mut m = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Invalid(format!("config line {}: expected key = value", i + 1))
            })?;
            m.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Config(m))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Invalid(format!("config {key} = {v}"))),
        }
    }
}

/// A positive integer, also written as an exact power-of-ten multiple like `1e7` or `2.5e6`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if x >= 1.0 && x.fract() == 0.0 && x < 2f64.powi(63) {
        Ok(x as u64)
    } else {
        Err(format!("{s:?} is not a positive integer"))
    }
}

fn ints(s: &str, n: usize) -> Result<Vec<BigInt>> {
    let v: std::result::Result<Vec<BigInt>, _> =
        s.split(',').map(|x| x.trim().parse::<BigInt>()).collect();
    let v = v.map_err(|_| Error::Invalid(format!("expected {n} integers, got {s:?}")))?;
    if v.len() != n {
        return Err(Error::Invalid(format!("expected {n} integers, got {s:?}")));
    }
    Ok(v)
}

fn small(x: &BigInt) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Invalid(format!("{x} does not fit in 64 bits")))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).unwrap());
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap()
}

fn classify(curve: &str, prime: Option<u64>, as_json: bool) -> Result<bool> {
    let v = ints(curve, 2)?;
    let e = WeierstrassCurve::new(v[0].clone(), v[1].clone())?;
    if let Some(p) = prime {
        let s = classify_by_valuations(&e, p)?;
        let (s2, t) = classify_by_translation(&e.cubic(), p)?;
        let ld = local_data(s, p);
        if as_json {
            print_json(
                &json!({ "local": to_json(&ld), "translation_symbol": s2.to_string(), "translate": t.to_string() }),
            );
        } else {
            println!("p = {p}: {s} (translation test: {s2}, r = {t})");
            println!(
                "c = {}, delta = {}, q = {}, d = {}, {}",
                ld.c_exp, ld.delta_exp, ld.q_exp, ld.d_exp, ld.reduction
            );
        }
        return Ok(s == s2);
    }
    let g = global_invariants(&e)?;
    if as_json {
        print_json(&to_json(&g));
    } else {
        println!("Delta(E) = {}", g.delta);
        println!(
            "C(E) = {}, index = {}, Q = {}, D = {}",
            g.conductor, g.index, g.q, g.d
        );
        for l in &g.local {
            println!(
                "  p = {}: {} (c = {}, delta = {}, q = {}, d = {})",
                l.p, l.symbol, l.c_exp, l.delta_exp, l.q_exp, l.d_exp
            );
        }
    }
    Ok(true)
}

fn cubic(poly: &str, with_shape: bool, as_json: bool) -> Result<bool> {
    let v = ints(poly, 3)?;
    let f = ellstat::local::MonicCubic::new(v[0].clone(), v[1].clone(), v[2].clone());
    let inv = q_and_d(&f)?;
    let sh = if with_shape {
        Some(shape(&f)?.summary())
    } else {
        None
    };
    if as_json {
        print_json(&json!({ "invariants": to_json(&inv), "shape": sh.as_ref().map(to_json) }));
    } else {
        println!(
            "disc = {}, Q = {}, D = {}",
            inv.disc_order, inv.q_index, inv.disc_field
        );
        if let Some(s) = sh {
            println!(
                "l1 = {:.6}, l2 = {:.6}, skewness = {:.6}, covolume = {:.6}",
                s.l1, s.l2, s.skewness, s.covolume
            );
        }
    }
    Ok(true)
}

fn density(
    p: u64,
    symbol: Option<String>,
    index: Option<u32>,
    m: Option<u32>,
    as_json: bool,
) -> Result<bool> {
    match (symbol, index) {
        (Some(s), _) => {
            let t: KodairaSymbol = s.parse()?;
            let r = count_symbol_density(p, t, m)?;
            if as_json {
                print_json(&to_json(&r));
            } else {
                println!(
                    "{t} at p = {p}: {} (expected {}) {}",
                    r.density,
                    r.expected,
                    if r.matches { "ok" } else { "MISMATCH" }
                );
            }
            Ok(r.matches)
        }
        (None, Some(k)) => {
            let r = count_index_density(p, k, m)?;
            if as_json {
                print_json(&to_json(&r));
            } else {
                for part in [&r.good, &r.multiplicative, &r.additive, &r.total] {
                    println!(
                        "{}: {} (expected {})",
                        part.target, part.density, part.expected
                    );
                }
                println!("{}", if r.matches { "ok" } else { "MISMATCH" });
            }
            Ok(r.matches)
        }
        (None, None) => Err(Error::Invalid("give --symbol or --index".into())),
    }
}

fn fourier(a: &FourierArgs) -> Result<bool> {
    let t: KodairaSymbol = a.symbol.parse()?;
    let p = a.prime;
    let mut ok = true;
    if let Some(c) = &a.chi {
        let v = ints(c, 3)?;
        let n = modulus_for(t, p)?;
        let chi = CharacterTriple::new(small(&v[0])?, small(&v[1])?, small(&v[2])?, n)?;
        let z = fourier_at(&phi0_indicator(t, p)?, &chi)?;
        let norm = z.norm_sq().as_integer();
        let stated = stated_magnitude(t, p, &chi)?;
        let r = r_t_count(t, p, &chi)?;
        println!(
            "chi = {chi}: |F|^2 = {}, stated |F| = {stated}, r_T = {r}",
            norm.map_or("irrational".into(), |x| x.to_string())
        );
        ok &= norm == Some(stated as i128 * stated as i128);
    }
    if a.verify_lemmas {
        let mut reports: Vec<CheckReport> = vec![verify_stated_magnitudes(t, p, a.seed)?];
        match t {
            KodairaSymbol::III => {
                reports.push(verify_translate_bound(t, p)?);
                reports.push(verify_iii_literal(p)?);
                reports.push(verify_iii_corrected(p)?);
            }
            KodairaSymbol::IV => {
                reports.push(verify_translate_bound(t, p)?);
                reports.push(verify_iv(p)?);
            }
            KodairaSymbol::In(_) => {
                reports.push(verify_translate_bound(t, p)?);
                reports.push(verify_in_bound(t, p)?);
            }
            _ => {}
        }
        for r in &reports {
            let ratio = r
                .max_ratio
                .map(|x| format!(", max ratio {x:.3}"))
                .unwrap_or_default();
            println!(
                "{} [{} p={}]: {} checked, {} failures{}{}",
                r.check,
                r.symbol,
                r.p,
                r.checked,
                r.failures,
                ratio,
                if r.exhaustive { "" } else { " (sampled)" }
            );
            for e in &r.examples {
                println!("    {e}");
            }
            ok &= r.ok();
        }
    }
    Ok(ok)
}

fn quartic(form: &str, root: Option<&str>, as_json: bool) -> Result<bool> {
    let v = ints(form, 5)?;
    let g = BinaryQuarticForm::from_coeffs([
        v[0].clone(),
        v[1].clone(),
        v[2].clone(),
        v[3].clone(),
        v[4].clone(),
    ]);
    let (i, j) = invariants_ij(&g);
    let disc = disc_quartic(&g);
    let mut out = json!({ "I": i.to_string(), "J": j.to_string(), "disc": disc.to_string() });
    if let Some(r) = root {
        let r = ints(r, 2)?;
        let rq = RootedQuartic::new(g, r[0].clone(), r[1].clone())?;
        let (q, d) = q_d_rooted(&rq)?;
        out["Q"] = json!(q.to_string());
        out["D"] = json!(d.to_string());
    }
    if as_json {
        print_json(&out);
    } else {
        let obj = out.as_object().unwrap();
        for k in ["I", "J", "disc", "Q", "D"] {
            if let Some(x) = obj.get(k) {
                println!("{k} = {}", x.as_str().unwrap());
            }
        }
    }
    Ok(true)
}

fn embed(poly: &str) -> Result<bool> {
    let v = ints(poly, 2)?;
    let f = ellstat::local::MonicCubic::new(0, v[0].clone(), v[1].clone());
    let inv = q_and_d(&f)?;
    let (rq, r) = embed_sigma(&f, &inv.q_index)?;
    let (i, j) = invariants_ij(&rq.g);
    let (q, d) = q_d_rooted(&rq)?;
    let c = rq.g.coeffs();
    println!(
        "sigma(f) = ({}, {}, {}, {}, {}) rooted at [{}:{}], r = {r}",
        c[0], c[1], c[2], c[3], c[4], rq.alpha, rq.beta
    );
    println!("I = {i}, J = {j}, Q = {q}, D = {d}");
    println!("cubic: Q = {}, D = {}", inv.q_index, inv.disc_field);
    Ok(q.magnitude() == inv.q_index.magnitude() && d == inv.disc_field)
}

fn census(a: &CensusArgs, cfg: &Config) -> Result<bool> {
    let kappa = a.kappa.or(cfg.get("kappa")?).unwrap_or(1.5);
    let mut c = CensusConfig::dyadic(a.xmax, kappa);
    if a.grid != "dyadic" {
        let g: std::result::Result<Vec<u64>, _> =
            a.grid.split(',').map(|x| x.trim().parse()).collect();
        c.grid = g.map_err(|_| Error::Invalid(format!("grid {:?}", a.grid)))?;
        c.grid.push(a.xmax);
    } else {
        c.grid = dyadic_grid(a.xmax);
    }
    if a.full_tables {
        c.mode = FamilyMode::FullTables;
    }
    if let Some(x) = a.index_cap.or(cfg.get("index_cap")?) {
        c.index_cap = x;
    }
    if let Some(x) = cfg.get("budget")? {
        c.budget = x;
    }
    if let Some(x) = cfg.get("prec")? {
        c.prec = x;
    }
    if let Some(s) = &a.sigma {
        let set: Result<BTreeSet<KodairaSymbol>> = s.split(',').map(|x| x.parse()).collect();
        c.sigma = Some(set?);
    }
    let rep = run_census(&c)?;
    let v = to_json(&rep);
    match &a.out {
        Some(p) => std::fs::write(p, serde_json::to_string_pretty(&v).unwrap())
            .map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?,
        None => print_json(&v),
    }
    if let Some(p) = &a.csv {
        std::fs::write(p, rep.to_csv())
            .map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
    }
    if a.out.is_some() {
        eprintln!("{} records, {} candidates", rep.records, rep.candidates);
        for (name, f) in &rep.families {
            eprintln!(
                "{name:>20}: {:>10} ratio {:.6}",
                f.counts.last().unwrap(),
                f.ratios.last().unwrap()
            );
        }
    }
    Ok(true)
}

fn constants(
    name: &str,
    digits: Option<u32>,
    p0: Option<u64>,
    as_json: bool,
    cfg: &Config,
) -> Result<bool> {
    let digits = digits.or(cfg.get("digits")?).unwrap_or(12);
    let p0 = p0.or(cfg.get("p0")?).unwrap_or(DEFAULT_P0);
    let prec = cfg
        .get("prec")?
        .unwrap_or(((digits as f64) * 3.33) as u32 + 64);
    let names: Vec<ConstantName> = if name == "all" {
        ConstantName::ALL.to_vec()
    } else {
        vec![name.parse()?]
    };
    let mut out = Vec::new();
    for n in names {
        let c = euler_constant(n, p0, prec)?;
        out.push(c.summary(digits));
    }
    if as_json {
        print_json(&to_json(&out));
    } else {
        for s in out {
            println!(
                "{:>8}: [{}, {}] width {:.2e}",
                s.name, s.value_lo, s.value_hi, s.width
            );
        }
    }
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = Config::load(cli.config.as_ref())?;
    match cli.cmd {
        Cmd::Classify { curve, prime, json } => classify(&curve, prime, json),
        Cmd::Cubic { poly, shape, json } => cubic(&poly, shape, json),
        Cmd::Density {
            prime,
            symbol,
            index,
            m,
            json,
        } => density(prime, symbol, index, m, json),
        Cmd::Fourier(a) => fourier(&a),
        Cmd::Quartic { form, root, json } => quartic(&form, root.as_deref(), json),
        Cmd::Embed { poly } => embed(&poly),
        Cmd::Census(a) => census(&a, &cfg),
        Cmd::Constants {
            name,
            digits,
            p0,
            json,
        } => constants(&name, digits, p0, json, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Invariant(_) => 2,
                Error::Budget(_) => 3,
                _ => 64,
            })
        }
    }
}
