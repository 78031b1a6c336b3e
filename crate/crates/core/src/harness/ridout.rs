//! Excess `sum_{v in S} v^+(a - 1) - eps h(a) - sum_{v not in S} |v(a)|`
//! over a box of `a`. There is nothing to violate: the scan only fits the
//! constant.

use crate::error::{Error, Result};
use crate::exact::factor::valuation;
use crate::exact::{LogRat, LogSum, Rat};
use crate::places::{height_rat, prime_to_s_int, PlaceSet};

use super::run_chunks;
use super::vojta::{box_values, merge, keep_best, Partial, PointRecord, ScanConfig, ScanReport};

/// `sum_{v in S} max(0, v(x))` with `v_inf(x) = -log |x|`.
pub fn s_part_plus(x: &Rat, s: &PlaceSet) -> Result<LogRat> {
    if x.is_zero() {
        return Err(Error::PointOnDivisor);
    }
    let mut total = LogRat::new(x.abs().recip()?.max(Rat::one()))?;
    for p in s.primes() {
        total += &LogRat::of_biguint(p).scale(valuation(x, p).max(0));
    }
    Ok(total)
}

/// `sum_{v not in S} |v(a)| = log` of the prime-to-`S` parts of numerator
/// and denominator.
pub fn outside_abs(a: &Rat, s: &PlaceSet) -> LogRat {
    LogRat::of_biguint(&(prime_to_s_int(&a.numer_abs(), s) * prime_to_s_int(&a.denom_abs(), s)))
}

pub(crate) fn ridout_record(index: u64, a: &Rat, s: &PlaceSet, eps: &Rat) -> Result<PointRecord> {
    let lhs = s_part_plus(&(a - &Rat::one()), s)?;
    let rhs = LogSum::term(eps.clone(), height_rat(a)) + LogSum::from(outside_abs(a, s));
    Ok(PointRecord::new(index, a.clone(), None, lhs, rhs))
}

/// Uses `a_range`, `a_den`, `S`, `eps` and `top_k` from the config; the
/// tower settings are ignored. `a = 0` and `a = 1` are skipped and counted.
pub fn ridout_scan(cfg: &ScanConfig) -> Result<ScanReport> {
    if cfg.eps.is_negative() {
        return Err(Error::Config("eps must be nonnegative".into()));
    }
    if cfg.a_den.0 == 0 || cfg.a_den.0 > cfg.a_den.1 || cfg.a_range.0 > cfg.a_range.1 {
        return Err(Error::Config("empty box".into()));
    }
    let a_vals = box_values(cfg.a_range, cfg.a_den);
    let parts = run_chunks(a_vals.len(), cfg.jobs, |range| -> Result<Partial> {
        let mut part = Partial::with_shells(1);
        for i in range {
            let a = &a_vals[i];
            if a.is_zero() {
                part.skipped.a_zero += 1;
            } else if a.is_one() {
                part.skipped.a_on_center += 1;
            } else {
                let rec = ridout_record(i as u64, a, &cfg.s, &cfg.eps)?;
                part.record(rec, 0, cfg.record_points, cfg.top_k)?;
            }
        }
        Ok(part)
    })?;
    let part = merge(parts, 1, cfg.top_k)?;
    let mut fitted = None;
    if let Some(b) = &part.shell_best[0] {
        keep_best(&mut fitted, b)?;
    }
    let mut config = cfg.echo();
    for k in ["b_range", "b_den", "tower", "centers"] {
        config.remove(k);
    }
    Ok(ScanReport {
        kind: "ridout",
        config,
        points: part.records,
        evaluated: part.evaluated,
        skipped: part.skipped,
        factor_failures: part.failures,
        fitted_c: fitted,
        extremal: part.top,
        violations: Vec::new(),
        bound_checks: 0,
        centers_s_units: None,
        shells: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    fn margin(a: i64, s: &str, eps: Rat) -> LogSum {
        ridout_record(0, &Rat::from(a), &s.parse().unwrap(), &eps).unwrap().margin
    }

    #[test]
    fn a_three() {
        // Nothing in S divides 2 and |a - 1| > 1; the outside term is log 3.
        let eps = Rat::frac(1, 10);
        let m = margin(3, "", eps.clone());
        let expect = -(LogSum::term(eps, LogRat::of_int(3)) + LogSum::from(LogRat::of_int(3)));
        assert_eq!(m.compare(&expect).unwrap(), Ordering::Equal);
    }

    #[test]
    fn powers_of_two_plus_one() {
        let eps = Rat::frac(1, 10);
        // a = 2^k + 1 prime: k log 2 - eps log a - log a.
        for (k, a) in [(1u32, 3i64), (2, 5), (4, 17), (8, 257), (16, 65537)] {
            let m = margin(a, "2", eps.clone());
            let expect = LogSum::from(LogRat::of_int(2).scale(k as i64))
                - LogSum::term(Rat::one() + &eps, LogRat::of_int(a as u64));
            assert_eq!(m.compare(&expect).unwrap(), Ordering::Equal);
        }
        // With S = {inf, 2, 3}, 8 is an S-unit and 9 has no part outside S.
        let m = margin(9, "2,3", eps.clone());
        let expect = LogSum::from(LogRat::of_int(8)) - LogSum::term(eps, LogRat::of_int(9));
        assert_eq!(m.compare(&expect).unwrap(), Ordering::Equal);
    }

    #[test]
    fn scan_counts_and_jobs() {
        let cfg = ScanConfig {
            a_range: (-20, 40),
            a_den: (1, 3),
            s: "2,3".parse().unwrap(),
            record_points: true,
            ..ScanConfig::default()
        };
        let r = ridout_scan(&cfg).unwrap();
        assert_eq!(r.skipped.a_zero, 1);
        assert_eq!(r.skipped.a_on_center, 1);
        assert_eq!(r.points.len() as u64, r.evaluated);
        let best = r.fitted_c.as_ref().unwrap();
        for p in &r.points {
            assert_ne!(p.margin.compare(&best.margin).unwrap(), Ordering::Greater);
        }
        let r4 = ridout_scan(&ScanConfig { jobs: 4, ..cfg }).unwrap();
        assert_eq!(r4.extremal.len(), r.extremal.len());
        for (x, y) in r.extremal.iter().zip(&r4.extremal) {
            assert_eq!(x.index, y.index);
        }
    }
}
