//! Margins of the specialized Vojta inequality over a box of points
//! `[a : b : 1]`, with the unconditional per-prime bound checked at every
//! contributing prime.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;

use super::{run_chunks, TowerSpec};
use crate::error::{Error, Result};
use crate::exact::{FactorConfig, LogRat, LogSum, Rat};
use crate::places::PlaceSet;
use crate::tower::{eval_center, per_prime_bound, rhs_vojta, SurfacePoint, TowerSet};

#[derive(Clone, Debug)]
pub struct ScanConfig {
    /// Inclusive numerator range for `a`.
    pub a_range: (i64, i64),
    pub b_range: (i64, i64),
    /// Inclusive denominator ranges; `(1, 1)` scans integers only.
    pub a_den: (u64, u64),
    pub b_den: (u64, u64),
    pub s: PlaceSet,
    pub eps: Rat,
    pub tower: TowerSpec,
    pub centers: Vec<Rat>,
    pub jobs: usize,
    /// Length of the extremal list.
    pub top_k: usize,
    /// Keep one record per evaluated point.
    pub record_points: bool,
    pub factor: FactorConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            a_range: (2, 64),
            b_range: (1, 64),
            a_den: (1, 1),
            b_den: (1, 1),
            s: PlaceSet::infinity_only(),
            eps: Rat::frac(1, 10),
            tower: TowerSpec::Chain(4),
            centers: vec![Rat::one()],
            jobs: 1,
            top_k: 10,
            record_points: false,
            factor: FactorConfig::default(),
        }
    }
}

impl ScanConfig {
    /// The effective configuration as text. Parallelism is left out: it
    /// never changes a report.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let centers: Vec<String> = self.centers.iter().map(Rat::to_string).collect();
        BTreeMap::from([
            ("a_range".into(), format!("{}..{}", self.a_range.0, self.a_range.1)),
            ("b_range".into(), format!("{}..{}", self.b_range.0, self.b_range.1)),
            ("a_den".into(), format!("{}..{}", self.a_den.0, self.a_den.1)),
            ("b_den".into(), format!("{}..{}", self.b_den.0, self.b_den.1)),
            ("S".into(), self.s.to_string()),
            ("eps".into(), self.eps.to_string()),
            ("tower".into(), self.tower.to_string()),
            ("centers".into(), centers.join(",")),
            ("top_k".into(), self.top_k.to_string()),
        ])
    }

    fn validate(&self) -> Result<()> {
        if self.eps.is_negative() {
            return Err(Error::Config("eps must be nonnegative".into()));
        }
        for (name, (lo, hi)) in [("a_den", self.a_den), ("b_den", self.b_den)] {
            if lo == 0 || lo > hi {
                return Err(Error::Config(format!("{name} must be a nonempty range of positive integers")));
            }
        }
        for (name, (lo, hi)) in [("a_range", self.a_range), ("b_range", self.b_range)] {
            if lo > hi {
                return Err(Error::Config(format!("{name} is empty")));
            }
        }
        if self.centers.is_empty() {
            return Err(Error::Config("no centers".into()));
        }
        Ok(())
    }

    pub fn towers(&self) -> Result<TowerSet> {
        TowerSet::new(
            self.centers
                .iter()
                .map(|c| self.tower.build(c.clone()))
                .collect::<Result<_>>()?,
        )
    }
}

/// Reduced fractions `n/d` with `n` and `d` in the given ranges, ordered by
/// numerator, then denominator.
pub(crate) fn box_values(nums: (i64, i64), dens: (u64, u64)) -> Vec<Rat> {
    let mut out = Vec::new();
    for n in nums.0..=nums.1 {
        for d in dens.0..=dens.1 {
            if n.unsigned_abs().gcd(&d) == 1 || (n == 0 && d == 1) {
                out.push(Rat::new(n, d as i64).expect("d >= 1"));
            }
        }
    }
    out
}

/// One evaluated point.
#[derive(Clone, Debug)]
pub struct PointRecord {
    /// Position in the scan order; breaks exact ties.
    pub index: u64,
    pub a: Rat,
    pub b: Option<Rat>,
    pub lhs: LogRat,
    pub rhs: LogSum,
    pub margin: LogSum,
    approx: (f64, f64),
}

impl PointRecord {
    pub(crate) fn new(index: u64, a: Rat, b: Option<Rat>, lhs: LogRat, rhs: LogSum) -> Self {
        let margin = LogSum::from(lhs.clone()) - rhs.clone();
        let approx = margin.approx();
        PointRecord {
            index,
            a,
            b,
            lhs,
            rhs,
            margin,
            approx,
        }
    }

    /// Ranking order: larger margin first, then scan order.
    pub(crate) fn rank_cmp(&self, other: &PointRecord) -> Result<Ordering> {
        let (x, ex) = self.approx;
        let (y, ey) = other.approx;
        let by_margin = if (x - y).abs() > 2.0 * (ex + ey) {
            y.partial_cmp(&x).expect("finite margins")
        } else {
            other.margin.compare(&self.margin)?
        };
        Ok(by_margin.then(self.index.cmp(&other.index)))
    }
}

/// A failed unconditional per-prime bound.
#[derive(Clone, Debug)]
pub struct Violation {
    pub a: Rat,
    pub b: Rat,
    pub center: Rat,
    pub prime: BigUint,
    pub n_p: i64,
    pub m_p: i64,
    pub lhs: LogRat,
    pub bound: LogRat,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SkipCounts {
    pub a_zero: u64,
    pub a_on_center: u64,
    pub b_zero: u64,
}

/// Fitted constant of one nested box.
#[derive(Clone, Debug)]
pub struct ShellFit {
    pub k: u32,
    pub points: u64,
    pub best: Option<PointRecord>,
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub kind: &'static str,
    pub config: BTreeMap<String, String>,
    pub points: Vec<PointRecord>,
    pub evaluated: u64,
    pub skipped: SkipCounts,
    pub factor_failures: Vec<(Rat, Option<Rat>)>,
    /// The point attaining the largest margin.
    pub fitted_c: Option<PointRecord>,
    pub extremal: Vec<PointRecord>,
    pub violations: Vec<Violation>,
    pub bound_checks: u64,
    /// Whether all differences of centers are `S`-units (Vojta scans only).
    pub centers_s_units: Option<bool>,
    /// Nested boxes, innermost first (nested scans only).
    pub shells: Vec<ShellFit>,
}

impl ScanReport {
    pub fn fitted_value(&self) -> Option<&LogSum> {
        self.fitted_c.as_ref().map(|r| &r.margin)
    }
}

/// Inserts `rec` into the ranked list `top`, keeping at most `k` entries.
pub(crate) fn offer(top: &mut Vec<PointRecord>, rec: &PointRecord, k: usize) -> Result<()> {
    if k == 0 {
        return Ok(());
    }
    if top.len() == k && rec.rank_cmp(top.last().unwrap())? != Ordering::Less {
        return Ok(());
    }
    let mut pos = top.len();
    while pos > 0 && rec.rank_cmp(&top[pos - 1])? == Ordering::Less {
        pos -= 1;
    }
    top.insert(pos, rec.clone());
    top.truncate(k);
    Ok(())
}

/// Keeps the better of `best` and `rec`.
pub(crate) fn keep_best(best: &mut Option<PointRecord>, rec: &PointRecord) -> Result<()> {
    let better = match best {
        None => true,
        Some(b) => rec.rank_cmp(b)? == Ordering::Less,
    };
    if better {
        *best = Some(rec.clone());
    }
    Ok(())
}

/// Partial results of one chunk.
#[derive(Default)]
pub(crate) struct Partial {
    pub records: Vec<PointRecord>,
    pub top: Vec<PointRecord>,
    pub shell_best: Vec<Option<PointRecord>>,
    pub shell_points: Vec<u64>,
    pub violations: Vec<Violation>,
    pub failures: Vec<(Rat, Option<Rat>)>,
    pub evaluated: u64,
    pub skipped: SkipCounts,
    pub bound_checks: u64,
}

impl Partial {
    pub(crate) fn with_shells(n: usize) -> Partial {
        Partial {
            shell_best: vec![None; n],
            shell_points: vec![0; n],
            ..Partial::default()
        }
    }

    pub(crate) fn record(&mut self, rec: PointRecord, shell: usize, keep: bool, k: usize) -> Result<()> {
        self.evaluated += 1;
        self.shell_points[shell] += 1;
        keep_best(&mut self.shell_best[shell], &rec)?;
        offer(&mut self.top, &rec, k)?;
        if keep {
            self.records.push(rec);
        }
        Ok(())
    }
}

/// Merges chunk results in order.
pub(crate) fn merge(parts: Vec<Result<Partial>>, shells: usize, k: usize) -> Result<Partial> {
    let mut out = Partial::with_shells(shells);
    for p in parts {
        let p = p?;
        out.records.extend(p.records);
        for r in &p.top {
            offer(&mut out.top, r, k)?;
        }
        for (i, b) in p.shell_best.iter().enumerate() {
            if let Some(b) = b {
                keep_best(&mut out.shell_best[i], b)?;
            }
            out.shell_points[i] += p.shell_points[i];
        }
        out.violations.extend(p.violations);
        out.failures.extend(p.failures);
        out.evaluated += p.evaluated;
        out.skipped.a_zero += p.skipped.a_zero;
        out.skipped.a_on_center += p.skipped.a_on_center;
        out.skipped.b_zero += p.skipped.b_zero;
        out.bound_checks += p.bound_checks;
    }
    Ok(out)
}

enum Eval {
    Skip(fn(&mut SkipCounts)),
    FactorFailure,
    Done(PointRecord, Vec<Violation>, u64),
}

fn evaluate(ts: &TowerSet, cfg: &ScanConfig, index: u64, a: &Rat, b: &Rat) -> Result<Eval> {
    if a.is_zero() {
        return Ok(Eval::Skip(|s| s.a_zero += 1));
    }
    if b.is_zero() {
        return Ok(Eval::Skip(|s| s.b_zero += 1));
    }
    if ts.centers().any(|c| c == a) {
        return Ok(Eval::Skip(|s| s.a_on_center += 1));
    }
    let p = SurfacePoint::new(a.clone(), b.clone())?;
    let mut lhs = LogRat::zero();
    let mut violations = Vec::new();
    let mut checks = 0;
    for t in ts.towers() {
        let e = match eval_center(t, &p, &cfg.s, &cfg.factor) {
            Ok(e) => e,
            Err(Error::FactorEffort { .. }) => return Ok(Eval::FactorFailure),
            Err(e) => return Err(e),
        };
        lhs += &e.gcd_all;
        lhs += &e.outside;
        // Elsewhere every local contribution vanishes and the bound is
        // nonnegative.
        for (q, _, _) in &e.primes {
            let r = per_prime_bound(t, &p, q)?;
            checks += 1;
            if !r.ok {
                violations.push(Violation {
                    a: a.clone(),
                    b: b.clone(),
                    center: t.center().clone(),
                    prime: q.clone(),
                    n_p: r.n_p,
                    m_p: r.m_p,
                    lhs: r.lhs,
                    bound: r.bound,
                });
            }
        }
    }
    let rhs = rhs_vojta(&p, &cfg.s, &cfg.eps)?;
    Ok(Eval::Done(
        PointRecord::new(index, a.clone(), Some(b.clone()), lhs, rhs),
        violations,
        checks,
    ))
}

fn scan_impl(cfg: &ScanConfig, a_vals: &[Rat], b_vals: &[Rat], shells: &[u32]) -> Result<(Partial, TowerSet)> {
    cfg.validate()?;
    let ts = cfg.towers()?;
    let nb = b_vals.len();
    let total = a_vals.len() * nb;
    let nshells = shells.len().max(1);
    let bounds: Vec<Rat> = shells.iter().map(|&k| Rat::from_int(num_bigint::BigInt::from(1u8) << k)).collect();
    let parts = run_chunks(total, cfg.jobs, |range| -> Result<Partial> {
        let mut part = Partial::with_shells(nshells);
        for i in range {
            let (a, b) = (&a_vals[i / nb], &b_vals[i % nb]);
            let shell = if bounds.is_empty() {
                0
            } else {
                let m = a.abs().max(b.abs());
                match bounds.iter().position(|x| &m <= x) {
                    Some(s) => s,
                    None => continue,
                }
            };
            match evaluate(&ts, cfg, i as u64, a, b)? {
                Eval::Skip(count) => count(&mut part.skipped),
                Eval::FactorFailure => part.failures.push((a.clone(), Some(b.clone()))),
                Eval::Done(rec, v, checks) => {
                    part.violations.extend(v);
                    part.bound_checks += checks;
                    part.record(rec, shell, cfg.record_points, cfg.top_k)?;
                }
            }
        }
        Ok(part)
    })?;
    Ok((merge(parts, nshells, cfg.top_k)?, ts))
}

fn finish(cfg: &ScanConfig, part: Partial, ts: &TowerSet, shells: &[u32]) -> Result<ScanReport> {
    let mut fitted = None;
    let mut fits = Vec::new();
    let mut count = 0;
    for (i, best) in part.shell_best.iter().enumerate() {
        if let Some(b) = best {
            keep_best(&mut fitted, b)?;
        }
        count += part.shell_points[i];
        if let Some(&k) = shells.get(i) {
            fits.push(ShellFit {
                k,
                points: count,
                best: fitted.clone(),
            });
        }
    }
    Ok(ScanReport {
        kind: "vojta",
        config: cfg.echo(),
        points: part.records,
        evaluated: part.evaluated,
        skipped: part.skipped,
        factor_failures: part.failures,
        fitted_c: fitted,
        extremal: part.top,
        violations: part.violations,
        bound_checks: part.bound_checks,
        centers_s_units: Some(ts.differences_are_s_units(&cfg.s)),
        shells: fits,
    })
}

/// Exact margins `lhs - rhs` over the configured box. The fitted constant
/// is the largest margin; per-prime bound failures are listed.
pub fn vojta_scan(cfg: &ScanConfig) -> Result<ScanReport> {
    let a_vals = box_values(cfg.a_range, cfg.a_den);
    let b_vals = box_values(cfg.b_range, cfg.b_den);
    let (part, ts) = scan_impl(cfg, &a_vals, &b_vals, &[])?;
    finish(cfg, part, &ts, &[])
}

/// Fitted constants over the nested boxes `max(|a|, |b|) <= 2^k`, `k` in
/// `ks` (increasing), intersected with the configured box. The largest box
/// is scanned once; each point is charged to the smallest box containing it.
pub fn vojta_scan_nested(cfg: &ScanConfig, ks: &[u32]) -> Result<ScanReport> {
    if ks.is_empty() || ks.windows(2).any(|w| w[0] >= w[1]) || *ks.last().unwrap() > 62 {
        return Err(Error::Config("box exponents must increase and stay below 63".into()));
    }
    let lim = Rat::from_int(num_bigint::BigInt::from(1u8) << *ks.last().unwrap());
    let within = |v: &Rat| v.abs() <= lim;
    let a_vals: Vec<Rat> = box_values(cfg.a_range, cfg.a_den).into_iter().filter(within).collect();
    let b_vals: Vec<Rat> = box_values(cfg.b_range, cfg.b_den).into_iter().filter(within).collect();
    let (part, ts) = scan_impl(cfg, &a_vals, &b_vals, ks)?;
    let mut report = finish(cfg, part, &ts, ks)?;
    let list: Vec<String> = ks.iter().map(u32::to_string).collect();
    report.config.insert("nested_k".into(), list.join(","));
    Ok(report)
}
