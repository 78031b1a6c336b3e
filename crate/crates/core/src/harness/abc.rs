//! abc triples ranked by quality `log c / log rad(abc)`, and the truncated
//! local height margin of a single rational.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{factor_u64, ln_fixed, log_combine, FactorConfig, LogRat, LogSum, Rat};
use crate::places::{height_rat, truncated_sum_outside, PlaceSet, Target};

/// A coprime triple `a + b = c` with `a <= b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AbcTriple {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub rad: u64,
}

impl AbcTriple {
    /// Checks coprimality and computes the radical by factoring.
    pub fn new(a: u64, b: u64) -> Result<AbcTriple> {
        let c = a.checked_add(b).ok_or(Error::Overflow("abc triple"))?;
        if a == 0 || b == 0 || a.gcd(&b) != 1 {
            return Err(Error::Precondition(format!("({a}, {b}) is not a coprime pair of positive integers")));
        }
        let rad = [a, b, c]
            .iter()
            .map(|&x| factor_u64(x).map(|f| f.iter().map(|&(p, _)| p).product::<u64>()))
            .try_fold(1u64, |acc, r| r.map(|x| acc * x))?;
        let (a, b) = (a.min(b), a.max(b));
        Ok(AbcTriple { a, b, c, rad })
    }

    pub fn log_c(&self) -> LogRat {
        LogRat::of_int(self.c)
    }

    pub fn log_rad(&self) -> LogRat {
        LogRat::of_int(self.rad)
    }

    pub fn quality_f64(&self) -> f64 {
        (self.c as f64).ln() / (self.rad as f64).ln()
    }

    /// Exactly whether the quality exceeds `t`: the sign of
    /// `log c - t log rad`.
    pub fn quality_cmp(&self, t: &Rat) -> Result<Ordering> {
        Ok(log_combine(&[(Rat::one(), self.log_c()), (-t, self.log_rad())])?.sign)
    }
}

/// `log c / log r` as a reduced fraction when `c` and `r` are powers of a
/// common integer.
fn rational_quality(c: u64, r: u64) -> Result<Option<Rat>> {
    let (fc, fr) = (factor_u64(c)?, factor_u64(r)?);
    if fc.len() != fr.len() || fc.iter().zip(&fr).any(|(x, y)| x.0 != y.0) {
        return Ok(None);
    }
    let (i, j) = (fc[0].1 as i64, fr[0].1 as i64);
    // Exponent vectors must be proportional.
    if fc.iter().zip(&fr).all(|(x, y)| x.1 as i64 * j == y.1 as i64 * i) {
        Ok(Some(Rat::frac(i, j)))
    } else {
        Ok(None)
    }
}

/// Exact comparison of `log c1 / log r1` with `log c2 / log r2`, all
/// arguments at least 2.
///
/// Equal rational qualities are recognized from the factorizations. Otherwise
/// the sign of `log c1 log r2 - log c2 log r1` is read off fixed-point
/// logarithms with rigorous error bounds, doubling the precision until the
/// bounds separate. A ratio of logs of integers is either rational or
/// transcendental, so a rational and an irrational quality always separate;
/// two irrational qualities that stay within 2^-4096 give `Inconclusive`.
pub fn compare_quality(c1: u64, r1: u64, c2: u64, r2: u64) -> Result<Ordering> {
    if c1 < 2 || r1 < 2 || c2 < 2 || r2 < 2 {
        return Err(Error::Precondition("qualities need c, rad >= 2".into()));
    }
    if (c1, r1) == (c2, r2) {
        return Ok(Ordering::Equal);
    }
    if let (Some(q1), Some(q2)) = (rational_quality(c1, r1)?, rational_quality(c2, r2)?) {
        return Ok(q1.cmp(&q2));
    }
    let mut gap = (0.0, 0.0);
    let mut w = 64u32;
    while w <= 4096 {
        let [lc1, lr1, lc2, lr2] = [c1, r1, c2, r2].map(|n| ln_fixed(&BigUint::from(n), w));
        let lhs = &lc1 * &lr2;
        let rhs = &lc2 * &lr1;
        // |x y - (x + e)(y + f)| <= |x| + |y| + 1 for |e|, |f| <= 1.
        let err = (&lc1 + &lr2 + 3u8) + (&lc2 + &lr1 + 3u8);
        let diff = &lhs - &rhs;
        if diff.magnitude() > err.magnitude() {
            return Ok(diff.sign().cmp(&num_bigint::Sign::NoSign));
        }
        let scale = 2f64.powi(-2 * w as i32);
        gap = (diff.to_f64().unwrap_or(0.0) * scale, err.to_f64().unwrap_or(f64::INFINITY) * scale);
        w *= 2;
    }
    Err(Error::Inconclusive {
        estimate: gap.0,
        error_bound: gap.1,
    })
}

#[derive(Clone, Debug)]
pub struct AbcReport {
    pub c_max: u64,
    /// Number of coprime triples considered.
    pub considered: u64,
    /// Ranked best first.
    pub top: Vec<AbcTriple>,
}

/// Radicals of `0..=n` by a smallest-prime-factor sieve.
fn rad_sieve(n: usize) -> Vec<u64> {
    let mut rad = vec![1u64; n + 1];
    for p in 2..=n {
        if rad[p] == 1 {
            for m in (p..=n).step_by(p) {
                rad[m] *= p as u64;
            }
        }
    }
    rad
}

/// All coprime triples with `c <= c_max`, ranked by quality (exact), ties by
/// `(c, a)`, truncated to `top_k`.
pub fn abc_scan(c_max: u64, top_k: usize) -> Result<AbcReport> {
    if c_max < 3 {
        return Err(Error::Precondition("c_max must be at least 3".into()));
    }
    let n = usize::try_from(c_max).map_err(|_| Error::Overflow("abc_scan"))?;
    if n > 1 << 24 {
        return Err(Error::SizeCap(format!("c_max = {c_max}")));
    }
    let rad = rad_sieve(n);
    let mut all = Vec::new();
    for c in 2..=c_max {
        for a in 1..=c / 2 {
            if a.gcd(&c) == 1 {
                let b = c - a;
                all.push((
                    AbcTriple {
                        a,
                        b,
                        c,
                        rad: rad[a as usize] * rad[b as usize] * rad[c as usize],
                    },
                    0.0f64,
                ));
            }
        }
    }
    for (t, q) in &mut all {
        *q = t.quality_f64();
    }
    let considered = all.len() as u64;
    // Both doubles are within a few ulps of the true quality, so a gap of
    // 1e-9 settles the order; near ties go to the exact comparison.
    let mut failure = None;
    all.sort_by(|(x, qx), (y, qy)| {
        let by_quality = if (qx - qy).abs() > 1e-9 {
            qy.partial_cmp(qx).unwrap()
        } else {
            match compare_quality(y.c, y.rad, x.c, x.rad) {
                Ok(o) => o,
                Err(e) => {
                    failure.get_or_insert(e);
                    Ordering::Equal
                }
            }
        };
        by_quality.then((x.c, x.a).cmp(&(y.c, y.a)))
    });
    if let Some(e) = failure {
        return Err(e);
    }
    all.truncate(top_k);
    Ok(AbcReport {
        c_max,
        considered,
        top: all.into_iter().map(|(t, _)| t).collect(),
    })
}

/// `sum over p outside S of the truncated heights at 0, 1 and infinity,
/// minus (1 - eps) h(x)`.
pub fn abc_truncated_margin(x: &Rat, s: &PlaceSet, eps: &Rat) -> Result<LogSum> {
    if x.is_zero() || x.is_one() {
        return Err(Error::PointOnDivisor);
    }
    let cfg = FactorConfig::default();
    let mut lhs = LogRat::zero();
    for t in [Target::Zero, Target::One, Target::Infinity] {
        lhs += &truncated_sum_outside(x, t, s, &cfg)?;
    }
    Ok(LogSum::from(lhs) - LogSum::term(Rat::one() - eps, height_rat(x)))
}

/// The radical of `n` as an integer, by factoring.
pub fn radical_u64(n: u64) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::Precondition("radical of zero".into()));
    }
    Ok(factor_u64(n)?.iter().map(|&(p, _)| p).product())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let t = AbcTriple::new(1, 8).unwrap();
        assert_eq!(t.rad, 6);
        assert!((t.quality_f64() - 1.2263).abs() < 1e-4);
        let t = AbcTriple::new(80, 1).unwrap();
        assert_eq!((t.a, t.b, t.c, t.rad), (1, 80, 81, 30));
        assert_eq!(t.quality_cmp(&Rat::frac(129, 100)).unwrap(), Ordering::Greater);
        assert_eq!(t.quality_cmp(&Rat::frac(1293, 1000)).unwrap(), Ordering::Less);
        let t = AbcTriple::new(1, 2).unwrap();
        assert_eq!(t.quality_cmp(&Rat::one()).unwrap(), Ordering::Less);
        assert!(AbcTriple::new(2, 4).is_err());
    }

    #[test]
    fn exact_quality_order() {
        assert_eq!(compare_quality(81, 30, 9, 6).unwrap(), Ordering::Greater);
        assert_eq!(compare_quality(9, 6, 81, 30).unwrap(), Ordering::Less);
        assert_eq!(compare_quality(2, 2, 2, 2).unwrap(), Ordering::Equal);
        // log 4 / log 2 = log 9 / log 3 = 2.
        assert_eq!(compare_quality(4, 2, 9, 3).unwrap(), Ordering::Equal);
        // The closest pair of distinct qualities with c <= 2000, 1.3e-13 apart.
        assert_eq!(compare_quality(1793, 1355454210, 1483, 795602806).unwrap(), Ordering::Greater);
        assert_eq!(compare_quality(8, 2, 9, 3).unwrap(), Ordering::Greater);
    }

    #[test]
    fn scan_top() {
        let r = abc_scan(100, 3).unwrap();
        let top: Vec<(u64, u64, u64)> = r.top.iter().map(|t| (t.a, t.b, t.c)).collect();
        assert_eq!(top[0], (1, 80, 81));
        assert!(r.top[0].quality_f64() >= r.top[1].quality_f64());
    }

    #[test]
    fn truncated_margin() {
        let m = abc_truncated_margin(&Rat::from(9), &PlaceSet::infinity_only(), &Rat::zero()).unwrap();
        // log 3 + log 2 - log 9
        assert_eq!(m.compare(&LogSum::from(LogRat::new(Rat::frac(6, 9)).unwrap())).unwrap(), Ordering::Equal);
        let half = abc_truncated_margin(&Rat::frac(1, 2), &PlaceSet::infinity_only(), &Rat::frac(1, 10)).unwrap();
        // log 2 (at infinity and at 1: 1 - 2 = -1) minus 9/10 log 2.
        assert_eq!(
            half.compare(&LogSum::term(Rat::frac(1, 10), LogRat::of_int(2))).unwrap(),
            Ordering::Equal
        );
    }
}
