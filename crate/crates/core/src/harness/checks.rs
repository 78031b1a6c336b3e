//! Invariant suites behind `check --suite`. Each runs a fixed, deterministic
//! grid and reports pass or fail with a short detail line.

use std::cmp::Ordering;

use num_integer::Integer;

use super::report::summary_json;
use super::{abc_scan, lemma_elementary_check, lemma_m, theorem2_construct, vojta_scan, ScanConfig, T2Variant};
use crate::error::{Error, Result};
use crate::exact::factor::factor_biguint;
use crate::exact::{FactorConfig, LogRat, Rat};
use crate::places::{height, local_height_line, LineDivisor, Place, PlaceSet, ProjPoint};
use crate::stern_brocot::{alpha_interval, first_level, level_fractions, phi_closed, phi_direct};
use crate::tower::{all_towers, chain_tower, check_divisor_bookkeeping, per_prime_bound, SurfacePoint};

pub const SUITES: &[&str] = &[
    "farey",
    "phi",
    "lemma",
    "heights",
    "chain",
    "general",
    "bookkeeping",
    "t2",
    "abc",
    "determinism",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, failures: Vec<String>, checked: u64) -> SuiteOutcome {
    SuiteOutcome {
        name,
        passed: failures.is_empty(),
        detail: match failures.first() {
            None => format!("{checked} checks"),
            Some(f) => format!("{} of {checked} checks failed, first: {f}", failures.len()),
        },
    }
}

/// Runs one suite by name, or all of them for `all`.
pub fn run_suite(name: &str) -> Result<Vec<SuiteOutcome>> {
    if name == "all" {
        return SUITES.iter().map(|s| run_one(s)).collect();
    }
    Ok(vec![run_one(name)?])
}

fn run_one(name: &str) -> Result<SuiteOutcome> {
    match name {
        "farey" => farey(),
        "phi" => phi(),
        "lemma" => lemma(),
        "heights" => heights(),
        "chain" => chain(),
        "general" => general(),
        "bookkeeping" => bookkeeping(),
        "t2" => t2(),
        "abc" => abc(),
        "determinism" => determinism(),
        _ => Err(Error::Config(format!(
            "unknown suite `{name}`; expected all or one of {}",
            SUITES.join(", ")
        ))),
    }
}

fn reduced(max_den: u64) -> impl Iterator<Item = (u64, u64)> {
    (2..=max_den).flat_map(|q| (1..q).filter(move |p| p.gcd(&q) == 1).map(move |p| (p, q)))
}

fn farey() -> Result<SuiteOutcome> {
    let mut fails = Vec::new();
    let mut n_checks = 0;
    for n in 1..=12u32 {
        let lv = level_fractions(n)?;
        n_checks += 1;
        if lv.len() != (1usize << (n - 1)) + 1 {
            fails.push(format!("level {n} has {} fractions", lv.len()));
        }
        for w in lv.windows(2) {
            n_checks += 1;
            let det = w[1].num() as i128 * w[0].den() as i128 - w[0].num() as i128 * w[1].den() as i128;
            if det != 1 {
                fails.push(format!("{}/{} and {}/{} are not unimodular", w[0].num(), w[0].den(), w[1].num(), w[1].den()));
            }
        }
    }
    let four: Vec<(u64, u64)> = level_fractions(4)?.iter().map(|f| (f.num(), f.den())).collect();
    let expect = [(0, 1), (1, 4), (1, 3), (2, 5), (1, 2), (3, 5), (2, 3), (3, 4), (1, 1)];
    n_checks += 1;
    if four != expect {
        fails.push(format!("level 4 is {four:?}"));
    }
    for (p, q) in reduced(40) {
        n_checks += 1;
        let l = first_level(&Rat::frac(p as i64, q as i64))?;
        if l > q {
            fails.push(format!("{p}/{q} first appears at level {l}"));
        }
    }
    Ok(outcome("farey", fails, n_checks))
}

fn phi() -> Result<SuiteOutcome> {
    let mut fails = Vec::new();
    let mut n_checks = 0;
    for (p, q) in reduced(30) {
        let alpha = Rat::frac(p as i64, q as i64);
        let iv = alpha_interval(&alpha)?;
        let lo = iv.lo().to_rat().expect("finite");
        let hi = iv.hi().to_rat().expect("finite");
        let samples = 24;
        for k in 0..=samples {
            let x = &lo + &((&hi - &lo) * Rat::frac(k, samples));
            n_checks += 1;
            if phi_direct(&alpha, &x)? != phi_closed(&alpha, &x)? {
                fails.push(format!("alpha = {alpha}, x = {x}"));
            }
        }
        n_checks += 1;
        if phi_direct(&alpha, &alpha)? != Rat::frac(q as i64 - 1, q as i64) {
            fails.push(format!("peak at {alpha}"));
        }
    }
    Ok(outcome("phi", fails, n_checks))
}

fn lemma() -> Result<SuiteOutcome> {
    let mut fails = Vec::new();
    let mut n_checks = 0;
    let mut alphas = vec![Rat::zero(), Rat::one()];
    alphas.extend(reduced(40).map(|(p, q)| Rat::frac(p as i64, q as i64)));
    for alpha in &alphas {
        let m = lemma_m(alpha);
        for l in 1..=30 {
            n_checks += 1;
            let o = lemma_elementary_check(alpha, l)?;
            let eq_expected = match m {
                None => false,
                Some(m) => l >= m,
            };
            if !o.holds || o.equality != eq_expected {
                fails.push(format!("alpha = {alpha}, l = {l}, sum = {}", o.sum));
            }
        }
    }
    Ok(outcome("lemma", fails, n_checks))
}

fn heights() -> Result<SuiteOutcome> {
    let mut fails = Vec::new();
    let mut n_checks = 0;
    let cfg = FactorConfig::default();
    let nums = [-97i64, -12, -1, 1, 2, 7, 30, 1024, 99991];
    let dens = [1i64, 3, 8, 625];
    let lines = [LineDivisor::x(), LineDivisor::y(), LineDivisor::z()];
    for &an in &nums {
        for &ad in &dens {
            for &bn in &nums {
                for &bd in &dens {
                    let pt = ProjPoint::affine(&Rat::frac(an, ad), &Rat::frac(bn, bd));
                    for (i, line) in lines.iter().enumerate() {
                        n_checks += 1;
                        let coord = &pt.coords()[i];
                        let mut total = local_height_line(line, &pt, &Place::Infinity)?;
                        for p in factor_biguint(coord.magnitude(), &cfg)?.into_keys() {
                            total += &local_height_line(line, &pt, &Place::Prime(p))?;
                        }
                        if total != height(&pt) {
                            fails.push(format!("{pt}, line {i}"));
                        }
                    }
                }
            }
        }
    }
    Ok(outcome("heights", fails, n_checks))
}

fn bound_grid(towers: &[crate::tower::Tower], max: i64, fails: &mut Vec<String>) -> Result<u64> {
    let cfg = FactorConfig::default();
    let mut n_checks = 0;
    for a in 2..=max {
        let primes: Vec<_> = factor_biguint(&Rat::from(a - 1).numer_abs(), &cfg)?.into_keys().collect();
        for b in 1..=max {
            let pt = SurfacePoint::new(Rat::from(a), Rat::from(b))?;
            for t in towers {
                for q in &primes {
                    n_checks += 1;
                    let r = per_prime_bound(t, &pt, q)?;
                    if !r.ok {
                        fails.push(format!("tower {}, [{a}:{b}:1], p = {q}", t.spec_string()));
                    }
                }
            }
        }
    }
    Ok(n_checks)
}

fn chain() -> Result<SuiteOutcome> {
    let towers = (1..=6).map(|n| chain_tower(n, Rat::one())).collect::<Result<Vec<_>>>()?;
    let mut fails = Vec::new();
    let n = bound_grid(&towers, 60, &mut fails)?;
    Ok(outcome("chain", fails, n))
}

fn general() -> Result<SuiteOutcome> {
    let towers = all_towers(5, Rat::one())?;
    let mut fails = Vec::new();
    let n = bound_grid(&towers, 30, &mut fails)?;
    Ok(outcome("general", fails, n))
}

fn bookkeeping() -> Result<SuiteOutcome> {
    let mut fails = Vec::new();
    let towers = all_towers(6, Rat::one())?;
    for t in &towers {
        let r = check_divisor_bookkeeping(t);
        if !r.reduced || !r.canonical_ok {
            fails.push(format!("tower {}", t.spec_string()));
        }
    }
    let text = check_divisor_bookkeeping(&chain_tower(2, Rat::one())?).pullback_text;
    if text != "\u{394}\u{303} + \u{1ebc}\u{2081} + 2E\u{2082}" {
        fails.push(format!("chain 2 pullback is {text}"));
    }
    Ok(outcome("bookkeeping", fails, towers.len() as u64 + 1))
}

fn t2() -> Result<SuiteOutcome> {
    let mut fails = Vec::new();
    let mut n_checks = 0;
    let s = PlaceSet::infinity_only();
    for n in 3..=5 {
        for p in [2u64, 3, 5, 7] {
            for e in 2..=7u32 {
                n_checks += 1;
                let a = Rat::from_int(p.pow(e) + 1);
                let c = theorem2_construct(&a, n, &s, T2Variant::Integral)?;
                let expected = LogRat::of_int(p).scale((e / 2) as i64);
                let h_ok = c.h_b_le_n_h_am1_2;
                if !c.identities_ok() || c.total_excess() != expected || !h_ok {
                    fails.push(format!("a = {a}, n = {n}"));
                }
            }
        }
    }
    Ok(outcome("t2", fails, n_checks))
}

fn naive_rad(mut n: u64) -> u64 {
    let mut r = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            r *= d;
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        r *= n;
    }
    r
}

fn abc() -> Result<SuiteOutcome> {
    let mut fails = Vec::new();
    let c_max = 500;
    let r = abc_scan(c_max, 30)?;
    for w in r.top.windows(2) {
        let q0 = (w[0].c as f64).ln() / (naive_rad(w[0].a * w[0].b * w[0].c) as f64).ln();
        let q1 = (w[1].c as f64).ln() / (naive_rad(w[1].a * w[1].b * w[1].c) as f64).ln();
        if q0 < q1 - 1e-12 {
            fails.push(format!("{:?} ranked above {:?}", w[0], w[1]));
        }
    }
    let top = r.top.first().map(|t| (t.a, t.b, t.c));
    if top != Some((3, 125, 128)) {
        fails.push(format!("best triple up to {c_max} is {top:?}"));
    }
    if r.top[0].quality_cmp(&Rat::frac(1, 1))? != Ordering::Greater {
        fails.push("best quality not above 1".into());
    }
    Ok(outcome("abc", fails, r.top.len() as u64))
}

fn determinism() -> Result<SuiteOutcome> {
    let cfg = ScanConfig {
        a_range: (-20, 40),
        b_range: (1, 40),
        centers: vec![Rat::one(), Rat::from(-1)],
        tower: "t2:4".parse()?,
        s: "2".parse()?,
        record_points: true,
        ..ScanConfig::default()
    };
    let one = vojta_scan(&cfg)?;
    let many = vojta_scan(&ScanConfig { jobs: 4, ..cfg })?;
    let mut fails = Vec::new();
    if summary_json(&one, None) != summary_json(&many, None) {
        fails.push("summaries differ between 1 and 4 workers".into());
    }
    if super::report::points_jsonl(&one) != super::report::points_jsonl(&many) {
        fails.push("point records differ between 1 and 4 workers".into());
    }
    if !one.violations.is_empty() {
        fails.push(format!("{} per-prime violations", one.violations.len()));
    }
    Ok(outcome("determinism", fails, one.evaluated))
}
