//! The extremal points `[a : b : 1]` built from the factorization of
//! `a - 1`, with the per-prime identities checked exactly.

use num_bigint::BigUint;
use num_traits::{One, Pow};

use crate::error::{Error, Result};
use crate::exact::factor::{factor_biguint, valuation};
use crate::exact::{FactorConfig, LogRat, LogSum, Rat};
use crate::places::{gcd_plus, height_rat, is_s_integer, PlaceSet};
use crate::tower::{per_prime_bound, theorem2_tower, SurfacePoint};

use super::ridout::{outside_abs, s_part_plus};

/// `Integral` needs `a` to be an `S`-integer; `Rational` accepts any
/// `a = A/B` and factors `A - B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum T2Variant {
    Integral,
    Rational,
}

/// One prime `p` outside `S` dividing `a - 1`.
#[derive(Clone, Debug)]
pub struct T2Row {
    pub prime: BigUint,
    pub n_p: u64,
    pub m_p: u64,
    /// `n_p / m_p`; `None` when `m_p = 0`.
    pub alpha: Option<Rat>,
    pub alpha_ok: bool,
    /// All local contributions at `p`, `E(1)` included.
    pub lhs: LogRat,
    pub lambda_y: LogRat,
    pub excess: LogRat,
    /// `floor(n_p / 2) log p`.
    pub expected: LogRat,
    pub identity_ok: bool,
}

#[derive(Clone, Debug)]
pub struct T2Construction {
    pub a: Rat,
    pub n: usize,
    pub s: PlaceSet,
    pub variant: T2Variant,
    /// `a - 1 = delta * prod p^{n_p}`.
    pub delta: Rat,
    pub rows: Vec<T2Row>,
    pub b: BigUint,
    pub h_b: LogRat,
    /// `h(b) <= n h(a - 1)`.
    pub h_b_le_n_h_am1: bool,
    /// `h(b) <= n h(a - 1) + n log 2`.
    pub h_b_le_n_h_am1_2: bool,
    /// `h(b) <= n h(a) + n log 2`.
    pub h_b_le_n_h_a_2: bool,
}

impl T2Construction {
    pub fn point(&self) -> Result<SurfacePoint> {
        SurfacePoint::new(self.a.clone(), Rat::from(self.b.clone()))
    }

    pub fn identities_ok(&self) -> bool {
        self.rows.iter().all(|r| r.identity_ok && r.alpha_ok)
    }

    /// `sum_p floor(n_p / 2) log p`.
    pub fn total_excess(&self) -> LogRat {
        self.rows.iter().map(|r| r.excess.clone()).sum()
    }
}

fn m_p(n_p: u64, n: u64) -> u64 {
    match n_p {
        1 => 0,
        _ if n_p.is_multiple_of(2) => n_p / 2 * (2 * n - 3),
        _ => (n_p * (2 * n - 3) - 1) / 2,
    }
}

pub fn theorem2_construct(a: &Rat, n: usize, s: &PlaceSet, variant: T2Variant) -> Result<T2Construction> {
    theorem2_construct_with(a, n, s, variant, &FactorConfig::default())
}

pub fn theorem2_construct_with(
    a: &Rat,
    n: usize,
    s: &PlaceSet,
    variant: T2Variant,
    cfg: &FactorConfig,
) -> Result<T2Construction> {
    if a.is_zero() || a.is_one() {
        return Err(Error::PointOnDivisor);
    }
    if n < 3 {
        return Err(Error::Precondition(format!("n = {n}, need n >= 3")));
    }
    if variant == T2Variant::Integral && !is_s_integer(a, s) {
        return Err(Error::Precondition(format!("{a} is not an S-integer for S = {s}")));
    }
    let am1 = a - &Rat::one();
    // The numerator of a - 1 is A - B.
    let mut outside: Vec<(BigUint, u64)> = factor_biguint(&am1.numer_abs(), cfg)?
        .into_iter()
        .filter(|(p, _)| !s.contains_prime(p))
        .map(|(p, e)| (p, e as u64))
        .collect();
    outside.sort();

    let nn = n as u64;
    let mut b = BigUint::one();
    let mut removed = BigUint::one();
    for (p, e) in &outside {
        b *= Pow::pow(p, m_p(*e, nn) as u32);
        removed *= Pow::pow(p, *e as u32);
    }
    let delta = &am1 / &Rat::from(removed);
    let t = theorem2_tower(n, Rat::one())?;
    let pt = SurfacePoint::new(a.clone(), Rat::from(b.clone()))?;
    let lo = Rat::frac(2, 2 * n as i64 - 3);
    let hi = Rat::frac(1, n as i64 - 2);

    let mut rows = Vec::new();
    for (p, e) in outside {
        let m = m_p(e, nn);
        let r = per_prime_bound(&t, &pt, &p)?;
        debug_assert_eq!(r.n_p as u64, e);
        let excess = &r.lhs - &r.lambda_y;
        let expected = LogRat::of_biguint(&p).scale((e / 2) as i64);
        let alpha = (m > 0).then(|| Rat::frac(e as i64, m as i64));
        let alpha_ok = match &alpha {
            None => e == 1,
            Some(al) if e % 2 == 0 => al == &lo,
            Some(al) => &lo <= al && al <= &hi,
        };
        rows.push(T2Row {
            identity_ok: excess == expected,
            prime: p,
            n_p: e,
            m_p: m,
            alpha,
            alpha_ok,
            lhs: r.lhs,
            lambda_y: r.lambda_y,
            excess,
            expected,
        });
    }

    let h_b = height_rat(&Rat::from(b.clone()));
    let n_log2 = LogRat::of_int(2).scale(n as i64);
    let n_h_am1 = height_rat(&am1).scale(n as i64);
    let n_h_a = height_rat(a).scale(n as i64);
    Ok(T2Construction {
        a: a.clone(),
        n,
        s: s.clone(),
        variant,
        delta,
        rows,
        h_b_le_n_h_am1: h_b <= n_h_am1,
        h_b_le_n_h_am1_2: h_b <= &n_h_am1 + &n_log2,
        h_b_le_n_h_a_2: h_b <= &n_h_a + &n_log2,
        b,
        h_b,
    })
}

/// Both sides of the one-power-off inequality and of the final inequality
/// for one construction, constants omitted.
#[derive(Clone, Debug)]
pub struct SaturationRow {
    pub a: Rat,
    pub n: usize,
    pub b: BigUint,
    /// `sum_p floor(n_p / 2) log p`.
    pub one_power_off_lhs: LogRat,
    /// `eps max(h(a), h(b)) + log |a|'_S`.
    pub one_power_off_rhs: LogSum,
    /// `sum_{v in S} gcd_v^+(a - 1, b)`, left out of the one-power-off sum.
    pub dropped_s_part: LogRat,
    /// `sum_{v in S} max(0, v(a - 1)) + sum_p n_p log p - sum_{n_p odd} log p`.
    pub final_lhs: LogRat,
    /// `(1 + 2n) eps h(a) + 3 log |a|'_S`.
    pub final_rhs: LogSum,
}

/// Tabulates both inequalities per construction. Nothing is asserted; the
/// rows are there for trends.
pub fn saturation_report(cs: &[T2Construction], eps: &Rat, s: &PlaceSet) -> Result<Vec<SaturationRow>> {
    cs.iter()
        .map(|c| {
            let am1 = &c.a - &Rat::one();
            let bq = Rat::from(c.b.clone());
            // For a = A/B this is log |AB|'_S; for S-integers it is log |a|'_S.
            let outside = outside_abs(&c.a, s);
            let h_a = height_rat(&c.a);
            let one_power_off_rhs =
                LogSum::term(eps.clone(), h_a.clone().max(height_rat(&bq))) + LogSum::from(outside.clone());
            let mut dropped = LogRat::zero();
            for v in s.places() {
                dropped += &gcd_plus(&[am1.clone().into(), bq.clone().into()], &v)?;
            }
            let mut final_lhs = s_part_plus(&am1, s)?;
            for r in &c.rows {
                let k = r.n_p as i64 - (r.n_p % 2) as i64;
                final_lhs += &LogRat::of_biguint(&r.prime).scale(k);
            }
            debug_assert!(c.rows.iter().all(|r| valuation(&am1, &r.prime) == r.n_p as i64));
            let final_rhs = LogSum::term(eps * &Rat::from(1 + 2 * c.n as i64), h_a) + LogSum::from(outside.scale(3));
            Ok(SaturationRow {
                a: c.a.clone(),
                n: c.n,
                b: c.b.clone(),
                one_power_off_lhs: c.total_excess(),
                one_power_off_rhs,
                dropped_s_part: dropped,
                final_lhs,
                final_rhs,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inf() -> PlaceSet {
        PlaceSet::infinity_only()
    }

    #[test]
    fn a_82() {
        let c = theorem2_construct(&Rat::from(82), 3, &inf(), T2Variant::Integral).unwrap();
        assert_eq!(c.b, BigUint::from(729u32));
        assert_eq!(c.rows.len(), 1);
        let r = &c.rows[0];
        assert_eq!((r.n_p, r.m_p), (4, 6));
        assert_eq!(r.alpha, Some(Rat::frac(2, 3)));
        assert!(r.identity_ok && r.alpha_ok);
        assert_eq!(r.excess, LogRat::of_int(9));
        assert!(c.delta.is_one());
        assert!(c.h_b_le_n_h_am1);
    }

    #[test]
    fn a_33() {
        let c = theorem2_construct(&Rat::from(33), 4, &inf(), T2Variant::Integral).unwrap();
        assert_eq!(c.b, BigUint::from(4096u32));
        assert_eq!(c.rows[0].m_p, 12);
        assert_eq!(c.rows[0].excess, LogRat::of_int(4));
        assert!(c.identities_ok());
    }

    #[test]
    fn squarefree_gives_b_one() {
        // 31 - 1 = 2 * 3 * 5.
        let c = theorem2_construct(&Rat::from(31), 5, &inf(), T2Variant::Integral).unwrap();
        assert!(c.b.is_one());
        assert!(c.rows.iter().all(|r| r.m_p == 0 && r.excess.is_zero()));
        let rows = saturation_report(&[c], &Rat::frac(1, 10), &inf()).unwrap();
        assert!(rows[0].one_power_off_lhs.is_zero());
    }

    #[test]
    fn mixed_and_s_parts() {
        // 2^3 * 3^2 * 5 + 1 = 361, S = {inf, 5}: delta = 5.
        let s: PlaceSet = "5".parse().unwrap();
        let c = theorem2_construct(&Rat::from(361), 4, &s, T2Variant::Integral).unwrap();
        assert_eq!(c.delta, Rat::from(5));
        assert!(c.identities_ok());
        assert_eq!(c.total_excess(), LogRat::of_int(2 * 3));
        let row = &saturation_report(&[c], &Rat::frac(1, 10), &s).unwrap()[0];
        // 5 divides a - 1 but not b.
        assert!(row.dropped_s_part.is_zero());
        // log 5 + 3 log 2 + 2 log 3 - log 2.
        assert_eq!(row.final_lhs, LogRat::of_int(5 * 4 * 9));
    }

    #[test]
    fn rational_variant() {
        let a = Rat::frac(83, 2);
        assert!(theorem2_construct(&a, 3, &inf(), T2Variant::Integral).is_err());
        // A - B = 81.
        let c = theorem2_construct(&a, 3, &inf(), T2Variant::Rational).unwrap();
        assert_eq!(c.b, BigUint::from(729u32));
        assert!(c.identities_ok());
    }

    #[test]
    fn identities_over_a_grid() {
        for n in 3..=6 {
            for a in 2..400i64 {
                let c = theorem2_construct(&Rat::from(a), n, &inf(), T2Variant::Integral).unwrap();
                assert!(c.identities_ok(), "a = {a}, n = {n}");
                assert!(c.h_b_le_n_h_am1);
            }
        }
    }
}
