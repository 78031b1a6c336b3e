//! Places of the rationals, projective heights, local heights of lines and
//! the truncated quantities built from them.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::factor::{factor_biguint, int_valuation, strip_primes, valuation};
use crate::exact::{is_prime, FactorConfig, LogRat, Rat};

/// A place of the rationals.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Place {
    Infinity,
    Prime(BigUint),
}

impl Place {
    pub fn prime(p: impl Into<BigUint>) -> Result<Place> {
        let p = p.into();
        if !is_prime(&p)? {
            return Err(Error::NotPrime(p.to_string()));
        }
        Ok(Place::Prime(p))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    /// `log p`, or `None` at infinity.
    pub fn log_size(&self) -> Option<LogRat> {
        match self {
            Place::Infinity => None,
            Place::Prime(p) => Some(LogRat::of_biguint(p)),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => f.write_str("inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Place> {
        let t = s.trim();
        if matches!(t, "inf" | "infinity" | "∞") {
            return Ok(Place::Infinity);
        }
        let p: BigUint = t.parse().map_err(|_| Error::Parse(s.to_string()))?;
        Place::prime(p)
    }
}

/// A finite set of places that always contains the archimedean one.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct PlaceSet {
    primes: BTreeSet<BigUint>,
}

impl PlaceSet {
    /// Just `{inf}`.
    pub fn infinity_only() -> Self {
        PlaceSet::default()
    }

    pub fn with_primes<I, P>(primes: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: Into<BigUint>,
    {
        let mut set = BTreeSet::new();
        for p in primes {
            let p = p.into();
            if !is_prime(&p)? {
                return Err(Error::NotPrime(p.to_string()));
            }
            set.insert(p);
        }
        Ok(PlaceSet { primes: set })
    }

    pub fn contains(&self, v: &Place) -> bool {
        match v {
            Place::Infinity => true,
            Place::Prime(p) => self.primes.contains(p),
        }
    }

    pub fn contains_prime(&self, p: &BigUint) -> bool {
        self.primes.contains(p)
    }

    /// Finite primes of the set, increasing.
    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.primes.iter()
    }

    pub fn prime_vec(&self) -> Vec<BigUint> {
        self.primes.iter().cloned().collect()
    }

    /// All places, `inf` first.
    pub fn places(&self) -> Vec<Place> {
        std::iter::once(Place::Infinity)
            .chain(self.primes.iter().cloned().map(Place::Prime))
            .collect()
    }

    pub fn insert_prime(&mut self, p: BigUint) -> Result<()> {
        if !is_prime(&p)? {
            return Err(Error::NotPrime(p.to_string()));
        }
        self.primes.insert(p);
        Ok(())
    }
}

impl fmt::Display for PlaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{inf")?;
        for p in &self.primes {
            write!(f, ",{p}")?;
        }
        f.write_str("}")
    }
}

impl FromStr for PlaceSet {
    type Err = Error;

    /// Comma separated primes; `inf` may be listed and is always included.
    /// The empty string is `{inf}`.
    fn from_str(s: &str) -> Result<PlaceSet> {
        let mut out = PlaceSet::default();
        for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if let Place::Prime(p) = part.parse::<Place>()? {
                out.primes.insert(p);
            }
        }
        Ok(out)
    }
}

/// A point of P^1 or P^2 in canonical integer form: coprime coordinates,
/// first nonzero coordinate positive.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ProjPoint {
    coords: Vec<BigInt>,
}

impl ProjPoint {
    pub fn new(coords: &[Rat]) -> Result<Self> {
        if !(2..=3).contains(&coords.len()) {
            return Err(Error::Precondition(format!(
                "projective points have 2 or 3 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().all(Rat::is_zero) {
            return Err(Error::Precondition("all coordinates zero".into()));
        }
        let l = crate::exact::rat::lcm_all(coords.iter().map(Rat::denom));
        let mut ints: Vec<BigInt> = coords
            .iter()
            .map(|c| c.numer() * (&l / c.denom()))
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let first_neg = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
        for x in &mut ints {
            *x = &*x / &g;
            if first_neg {
                *x = -&*x;
            }
        }
        Ok(ProjPoint { coords: ints })
    }

    /// The affine point `[a : b : 1]`.
    pub fn affine(a: &Rat, b: &Rat) -> Self {
        ProjPoint::new(&[a.clone(), b.clone(), Rat::one()]).expect("last coordinate is 1")
    }

    /// The point `[a : 1]` of P^1.
    pub fn line_point(a: &Rat) -> Self {
        ProjPoint::new(&[a.clone(), Rat::one()]).expect("last coordinate is 1")
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(":")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

/// A line `uX + vY + wZ = 0` in P^2 with coprime integer coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LineDivisor {
    coeffs: [BigInt; 3],
}

impl LineDivisor {
    pub fn new(u: impl Into<BigInt>, v: impl Into<BigInt>, w: impl Into<BigInt>) -> Result<Self> {
        let mut c = [u.into(), v.into(), w.into()];
        let g = c.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return Err(Error::Precondition("zero linear form".into()));
        }
        for x in &mut c {
            *x = &*x / &g;
        }
        Ok(LineDivisor { coeffs: c })
    }

    pub fn x() -> Self {
        LineDivisor::new(1, 0, 0).unwrap()
    }

    pub fn y() -> Self {
        LineDivisor::new(0, 1, 0).unwrap()
    }

    pub fn z() -> Self {
        LineDivisor::new(0, 0, 1).unwrap()
    }

    pub fn coeffs(&self) -> &[BigInt; 3] {
        &self.coeffs
    }

    fn eval(&self, p: &ProjPoint) -> Result<BigInt> {
        if p.coords.len() != 3 {
            return Err(Error::Precondition("line divisors live on P^2".into()));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&p.coords)
            .map(|(c, x)| c * x)
            .sum())
    }
}

impl fmt::Display for LineDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [u, v, w] = &self.coeffs;
        write!(f, "({u})X + ({v})Y + ({w})Z = 0")
    }
}

fn max_abs(xs: &[BigInt]) -> BigUint {
    xs.iter()
        .map(|x| x.magnitude().clone())
        .max()
        .unwrap_or_default()
}

/// Logarithmic height `log max |x_i|` of the canonical integer form.
pub fn height(p: &ProjPoint) -> LogRat {
    LogRat::of_biguint(&max_abs(&p.coords))
}

/// Height of `a` as the point `[a : 1]`, i.e. `log max(|num|, den)`.
pub fn height_rat(a: &Rat) -> LogRat {
    let n = a.numer_abs();
    let d = a.denom_abs();
    LogRat::of_biguint(if n > d { &n } else { &d })
}

/// `v(F(x)) - min_i v(x_i)` at `v`.
///
/// With the canonical coprime form the minimum is 0 at every prime, so the
/// finite value is `ord_p(F(x)) log p`. At infinity it is
/// `log(max|x_i| / |F(x)|)`; this is nonnegative for the coordinate lines but
/// can be negative for lines with several nonzero coefficients. Summing over
/// all places gives exactly `h(P)`.
pub fn local_height_line(f: &LineDivisor, p: &ProjPoint, v: &Place) -> Result<LogRat> {
    let val = f.eval(p)?;
    if val.is_zero() {
        return Err(Error::PointOnDivisor);
    }
    match v {
        Place::Prime(q) => Ok(LogRat::of_biguint(q).scale(int_valuation(&val, q) as i64)),
        Place::Infinity => {
            let r = Rat::new(BigInt::from(max_abs(&p.coords)), val.abs())?;
            LogRat::new(r)
        }
    }
}

/// The three targets of truncated local heights on P^1.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Target {
    Zero,
    One,
    Infinity,
}

fn target_integer(a: &Rat, t: Target) -> Result<BigInt> {
    let v = match t {
        Target::Zero => a.numer().clone(),
        Target::One => a.numer() - a.denom(),
        Target::Infinity => a.denom().clone(),
    };
    if v.is_zero() {
        return Err(Error::PointOnDivisor);
    }
    Ok(v)
}

/// `min(lambda_p(t, [a:1]), log p)`: `log p` when `p` divides the relevant
/// integer of the canonical form `[A:B]` (`A`, `A - B` or `B`), else 0.
pub fn truncated_local_height(a: &Rat, t: Target, p: &BigUint) -> Result<LogRat> {
    if !is_prime(p)? {
        return Err(Error::NotPrime(p.to_string()));
    }
    let n = target_integer(a, t)?;
    Ok(if (&n % BigInt::from(p.clone())).is_zero() {
        LogRat::of_biguint(p)
    } else {
        LogRat::zero()
    })
}

/// Sum of truncated local heights over primes outside `s`: the log of the
/// prime-to-`s` radical of the relevant integer.
pub fn truncated_sum_outside(a: &Rat, t: Target, s: &PlaceSet, cfg: &FactorConfig) -> Result<LogRat> {
    let n = target_integer(a, t)?;
    let rest = strip_primes(n.magnitude(), &s.prime_vec());
    radical_of(&rest, cfg)
}

fn radical_of(n: &BigUint, cfg: &FactorConfig) -> Result<LogRat> {
    if n.is_one() {
        return Ok(LogRat::zero());
    }
    let rad: BigUint = factor_biguint(n, cfg)?.into_keys().product();
    Ok(LogRat::of_biguint(&rad))
}

/// `log` of the product of the distinct primes dividing the numerator of `a`.
pub fn radical(a: &Rat) -> Result<LogRat> {
    if a.is_zero() {
        return Err(Error::Precondition("radical of zero".into()));
    }
    radical_of(&a.numer_abs(), &FactorConfig::default())
}

/// `log |a|'_S`: the log of the part of the numerator prime to `s`.
pub fn prime_to_s(a: &Rat, s: &PlaceSet) -> Result<LogRat> {
    if a.is_zero() {
        return Err(Error::Precondition("prime-to-S part of zero".into()));
    }
    Ok(LogRat::of_biguint(&strip_primes(&a.numer_abs(), &s.prime_vec())))
}

/// Prime-to-`s` part of a nonzero integer magnitude.
pub fn prime_to_s_int(n: &BigUint, s: &PlaceSet) -> BigUint {
    strip_primes(n, &s.prime_vec())
}

pub fn is_s_integer(a: &Rat, s: &PlaceSet) -> bool {
    strip_primes(&a.denom_abs(), &s.prime_vec()).is_one()
}

pub fn is_s_unit(a: &Rat, s: &PlaceSet) -> bool {
    !a.is_zero() && is_s_integer(a, s) && strip_primes(&a.numer_abs(), &s.prime_vec()).is_one()
}

/// A rational or the formal value infinity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExtRat {
    Finite(Rat),
    Infinite,
}

impl From<Rat> for ExtRat {
    fn from(r: Rat) -> Self {
        ExtRat::Finite(r)
    }
}

/// `max(0, min_j v(x_j))`.
///
/// Both infinite entries and zero entries have valuation `+inf` and drop out
/// of the minimum; at least one entry must be a nonzero rational.
pub fn gcd_plus(xs: &[ExtRat], v: &Place) -> Result<LogRat> {
    let finite: Vec<&Rat> = xs
        .iter()
        .filter_map(|x| match x {
            ExtRat::Finite(r) if !r.is_zero() => Some(r),
            _ => None,
        })
        .collect();
    if finite.is_empty() {
        return Err(Error::Precondition(
            "gcd_plus needs at least one nonzero finite entry".into(),
        ));
    }
    match v {
        Place::Prime(p) => {
            let m = finite.iter().map(|x| valuation(x, p)).min().unwrap();
            Ok(LogRat::of_biguint(p).scale(m.max(0)))
        }
        Place::Infinity => {
            // -log max|x_j|, clamped at 0.
            let big = finite.iter().map(|x| x.abs()).max().unwrap();
            Ok(match big.cmp(&Rat::one()) {
                Ordering::Less => LogRat::new(big.recip()?)?,
                _ => LogRat::zero(),
            })
        }
    }
}

/// `sum over all places of gcd_v^+(x, y)` for nonzero `x`, `y`, without
/// factoring: `log gcd(num x, num y) + log max(1, 1/max(|x|,|y|))`.
pub fn global_gcd_plus(x: &Rat, y: &Rat) -> Result<LogRat> {
    if x.is_zero() || y.is_zero() {
        return Err(Error::PointOnDivisor);
    }
    let g = x.numer_abs().gcd(&y.numer_abs());
    let arch = gcd_plus(&[x.clone().into(), y.clone().into()], &Place::Infinity)?;
    Ok(LogRat::of_biguint(&g) + arch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::LogSum;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn lp(n: u64) -> LogRat {
        LogRat::of_int(n)
    }

    fn prime(p: u64) -> Place {
        Place::prime(p).unwrap()
    }

    #[test]
    fn heights() {
        assert_eq!(height(&ProjPoint::line_point(&r("3/2"))), lp(3));
        assert_eq!(height(&ProjPoint::new(&[r("1"), r("1"), r("1")]).unwrap()), LogRat::zero());
        let p = ProjPoint::new(&[r("2/3"), r("5"), r("1")]).unwrap();
        assert_eq!(p.to_string(), "[2:15:3]");
        assert_eq!(height(&p), lp(15));
        let neg = ProjPoint::new(&[r("-2"), r("4"), r("0")]).unwrap();
        assert_eq!(neg.to_string(), "[1:-2:0]");
    }

    #[test]
    fn line_heights() {
        let p = ProjPoint::new(&[r("2"), r("50"), r("1")]).unwrap();
        assert_eq!(local_height_line(&LineDivisor::y(), &p, &prime(5)).unwrap(), lp(25));
        let q = ProjPoint::new(&[r("1"), r("7"), r("1")]).unwrap();
        for v in [2, 3, 7, 11] {
            assert!(local_height_line(&LineDivisor::x(), &q, &prime(v)).unwrap().is_zero());
        }
        let t = ProjPoint::new(&[r("1"), r("3/4"), r("1")]).unwrap();
        assert!(local_height_line(&LineDivisor::y(), &t, &prime(2)).unwrap().is_zero());
        let on = ProjPoint::new(&[r("0"), r("1"), r("1")]).unwrap();
        assert_eq!(
            local_height_line(&LineDivisor::x(), &on, &Place::Infinity),
            Err(Error::PointOnDivisor)
        );
    }

    #[test]
    fn line_heights_sum_to_height() {
        let p = ProjPoint::new(&[r("2/9"), r("-35/4"), r("1")]).unwrap();
        let f = LineDivisor::new(1, 1, -2).unwrap();
        let val: BigInt = f.coeffs().iter().zip(p.coords()).map(|(c, x)| c * x).sum();
        let mut total = local_height_line(&f, &p, &Place::Infinity).unwrap();
        for q in factor_biguint(val.magnitude(), &FactorConfig::default()).unwrap().keys() {
            total += &local_height_line(&f, &p, &Place::Prime(q.clone())).unwrap();
        }
        assert_eq!(total, height(&p));
    }

    #[test]
    fn truncated() {
        let p3 = BigUint::from(3u32);
        let p2 = BigUint::from(2u32);
        assert_eq!(truncated_local_height(&r("9"), Target::Zero, &p3).unwrap(), lp(3));
        assert_eq!(truncated_local_height(&r("9"), Target::One, &p2).unwrap(), lp(2));
        assert_eq!(truncated_local_height(&r("5/8"), Target::Infinity, &p2).unwrap(), lp(2));
        assert!(truncated_local_height(&r("9"), Target::Zero, &p2).unwrap().is_zero());
        assert!(truncated_local_height(&r("1"), Target::One, &p2).is_err());
        assert!(truncated_local_height(&r("9"), Target::Zero, &BigUint::from(4u32)).is_err());
    }

    #[test]
    fn radicals_and_s_parts() {
        assert_eq!(radical(&r("12")).unwrap(), lp(6));
        assert_eq!(radical(&r("72")).unwrap(), lp(6));
        assert_eq!(radical(&r("9/10")).unwrap(), lp(3));
        let s23 = "2,3".parse::<PlaceSet>().unwrap();
        assert_eq!(prime_to_s(&r("720"), &s23).unwrap(), lp(5));
        assert!(prime_to_s(&r("1/7"), &s23).unwrap().is_zero());
        let s5: PlaceSet = "inf,5".parse().unwrap();
        assert_eq!(prime_to_s(&r("35/2"), &s5).unwrap(), lp(7));
    }

    #[test]
    fn s_units() {
        let s23: PlaceSet = "2,3".parse().unwrap();
        let s2: PlaceSet = "2".parse().unwrap();
        assert!(is_s_unit(&r("8/3"), &s23));
        assert!(is_s_integer(&r("10"), &s2) && !is_s_unit(&r("10"), &s2));
        assert!(is_s_integer(&r("7/2"), &s2) && !is_s_unit(&r("7/2"), &s2));
        assert!(!is_s_integer(&r("2/7"), &s2));
        assert!("4".parse::<PlaceSet>().is_err());
        assert_eq!(s23.to_string(), "{inf,2,3}");
    }

    #[test]
    fn gcd_plus_examples() {
        let f = |s: &str| ExtRat::Finite(r(s));
        assert_eq!(gcd_plus(&[f("12"), f("8")], &prime(2)).unwrap(), lp(4));
        assert_eq!(gcd_plus(&[f("5"), ExtRat::Infinite], &prime(5)).unwrap(), lp(5));
        assert!(gcd_plus(&[f("1/2"), f("3")], &prime(2)).unwrap().is_zero());
        assert_eq!(gcd_plus(&[f("1/2"), f("-1/3")], &Place::Infinity).unwrap(), lp(2));
        assert!(gcd_plus(&[f("0"), ExtRat::Infinite], &prime(2)).is_err());
        assert_eq!(gcd_plus(&[f("0"), f("18")], &prime(3)).unwrap(), lp(9));
    }

    #[test]
    fn global_gcd_matches_places() {
        let x = r("-18/5");
        let y = r("12/7");
        let mut sum = LogSum::from(gcd_plus(&[x.clone().into(), y.clone().into()], &Place::Infinity).unwrap());
        for p in [2u64, 3, 5, 7] {
            sum = sum + LogSum::from(gcd_plus(&[x.clone().into(), y.clone().into()], &prime(p)).unwrap());
        }
        let g = global_gcd_plus(&x, &y).unwrap();
        assert_eq!(sum.compare(&LogSum::from(g)).unwrap(), Ordering::Equal);
    }
}
