//! The left half of the Stern-Brocot tree: fractions in `[0, 1]`, Farey
//! intervals, fork paths and the piecewise-linear function `phi_alpha`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exact::Rat;

/// Largest level `level_fractions` will materialize.
pub const MAX_MATERIALIZED_LEVEL: u32 = 22;

/// Longest fork path `path_to` will build.
pub const MAX_PATH_LEN: u64 = 1 << 24;

/// A reduced fraction `p/q` in `[0, 1]`, or the formal endpoint `1/0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Farey {
    p: u64,
    q: u64,
}

impl Farey {
    pub const ZERO: Farey = Farey { p: 0, q: 1 };
    pub const ONE: Farey = Farey { p: 1, q: 1 };
    pub const RIGHT_ROOT: Farey = Farey { p: 1, q: 0 };

    /// Reduces `p/q`; requires `q >= 1` and `p <= q`.
    pub fn new(p: u64, q: u64) -> Result<Farey> {
        if q == 0 {
            return Err(Error::ZeroDenominator);
        }
        if p > q {
            return Err(Error::Precondition(format!("{p}/{q} exceeds 1")));
        }
        let g = p.gcd(&q);
        Ok(Farey { p: p / g, q: q / g })
    }

    pub fn from_rat(x: &Rat) -> Result<Farey> {
        if x.is_negative() {
            return Err(Error::Precondition(format!("{x} is negative")));
        }
        let p = x.numer().to_u64().ok_or(Error::Overflow("Farey::from_rat"))?;
        let q = x.denom().to_u64().ok_or(Error::Overflow("Farey::from_rat"))?;
        Farey::new(p, q)
    }

    pub fn num(&self) -> u64 {
        self.p
    }

    pub fn den(&self) -> u64 {
        self.q
    }

    pub fn is_right_root(&self) -> bool {
        self.q == 0
    }

    /// `None` for `1/0`.
    pub fn to_rat(&self) -> Option<Rat> {
        (self.q != 0).then(|| Rat::new(self.p, self.q).expect("q != 0"))
    }

    fn cmp_rat(&self, x: &Rat) -> Ordering {
        if self.q == 0 {
            return Ordering::Greater;
        }
        (BigInt::from(self.p) * x.denom()).cmp(&(x.numer() * BigInt::from(self.q)))
    }
}

impl Ord for Farey {
    fn cmp(&self, o: &Farey) -> Ordering {
        (self.p as u128 * o.q as u128).cmp(&(o.p as u128 * self.q as u128))
    }
}

impl PartialOrd for Farey {
    fn partial_cmp(&self, o: &Farey) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Farey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl fmt::Debug for Farey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A pair of Farey neighbors `lo < hi` with `q_lo p_hi - p_lo q_hi = 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FareyInterval {
    lo: Farey,
    hi: Farey,
}

impl FareyInterval {
    /// `(0/1, 1/1)`, the level-1 interval.
    pub const ROOT: FareyInterval = FareyInterval {
        lo: Farey::ZERO,
        hi: Farey::ONE,
    };

    /// `(0/1, 1/0)`, the formal interval that creates `E(1)`.
    pub const FORMAL: FareyInterval = FareyInterval {
        lo: Farey::ZERO,
        hi: Farey::RIGHT_ROOT,
    };

    pub fn new(lo: Farey, hi: Farey) -> Result<Self> {
        let det = hi.p as i128 * lo.q as i128 - lo.p as i128 * hi.q as i128;
        if det != 1 {
            return Err(Error::Precondition(format!(
                "({lo}, {hi}) is not a pair of Farey neighbors"
            )));
        }
        Ok(FareyInterval { lo, hi })
    }

    pub fn lo(&self) -> Farey {
        self.lo
    }

    pub fn hi(&self) -> Farey {
        self.hi
    }

    pub fn mediant(&self) -> Result<Farey> {
        let ov = || Error::Overflow("mediant");
        Ok(Farey {
            p: self.lo.p.checked_add(self.hi.p).ok_or_else(ov)?,
            q: self.lo.q.checked_add(self.hi.q).ok_or_else(ov)?,
        })
    }

    pub fn child(&self, fork: Fork) -> Result<FareyInterval> {
        let m = self.mediant()?;
        Ok(match fork {
            Fork::Left => FareyInterval { lo: self.lo, hi: m },
            Fork::Right => FareyInterval { lo: m, hi: self.hi },
        })
    }

    /// `lo < x < hi`.
    pub fn contains_open(&self, x: &Rat) -> bool {
        self.lo.cmp_rat(x) == Ordering::Less && self.hi.cmp_rat(x) == Ordering::Greater
    }

    /// `lo <= x <= hi`.
    pub fn contains_closed(&self, x: &Rat) -> bool {
        self.lo.cmp_rat(x) != Ordering::Greater && self.hi.cmp_rat(x) != Ordering::Less
    }
}

impl fmt::Display for FareyInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

impl fmt::Debug for FareyInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Fork {
    Left,
    Right,
}

/// A sequence of forks from the root interval.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SBPath(pub Vec<Fork>);

impl SBPath {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn forks(&self) -> &[Fork] {
        &self.0
    }

    /// The interval reached from `(0/1, 1/1)`.
    pub fn interval(&self) -> Result<FareyInterval> {
        self.0
            .iter()
            .try_fold(FareyInterval::ROOT, |iv, &f| iv.child(f))
    }

    /// Every interval along the path, root first.
    pub fn intervals(&self) -> Result<Vec<FareyInterval>> {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        let mut iv = FareyInterval::ROOT;
        out.push(iv);
        for &f in &self.0 {
            iv = iv.child(f)?;
            out.push(iv);
        }
        Ok(out)
    }
}

impl fmt::Display for SBPath {
    /// `L`/`R` letters; the empty path is `.`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(".");
        }
        for fork in &self.0 {
            f.write_str(match fork {
                Fork::Left => "L",
                Fork::Right => "R",
            })?;
        }
        Ok(())
    }
}

impl FromStr for SBPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<SBPath> {
        let t = s.trim();
        if t == "." || t.is_empty() {
            return Ok(SBPath::default());
        }
        t.chars()
            .map(|c| match c {
                'L' | 'l' => Ok(Fork::Left),
                'R' | 'r' => Ok(Fork::Right),
                _ => Err(Error::Parse(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(SBPath)
    }
}

/// All fractions of level `n`, increasing.
pub fn level_fractions(n: u32) -> Result<Vec<Farey>> {
    if n == 0 {
        return Err(Error::Precondition("levels start at 1".into()));
    }
    if n > MAX_MATERIALIZED_LEVEL {
        return Err(Error::SizeCap(format!(
            "level {n} has 2^{} + 1 fractions",
            n - 1
        )));
    }
    let mut cur = vec![Farey::ZERO, Farey::ONE];
    for _ in 1..n {
        let mut next = Vec::with_capacity(2 * cur.len() - 1);
        for w in cur.windows(2) {
            next.push(w[0]);
            next.push(FareyInterval { lo: w[0], hi: w[1] }.mediant()?);
        }
        next.push(*cur.last().unwrap());
        cur = next;
    }
    Ok(cur)
}

fn open_unit(x: &Rat) -> Result<(u64, u64)> {
    if !(x.is_positive() && x.numer() < x.denom()) {
        return Err(Error::Precondition(format!("{x} is not strictly between 0 and 1")));
    }
    let p = x.numer().to_u64().ok_or(Error::Overflow("Stern-Brocot descent"))?;
    let q = x.denom().to_u64().ok_or(Error::Overflow("Stern-Brocot descent"))?;
    Ok((p, q))
}

/// Level at which `x` first appears: the sum of its continued-fraction
/// partial quotients.
pub fn first_level(x: &Rat) -> Result<u64> {
    let (mut p, mut q) = open_unit(x)?;
    let mut total = 0u64;
    while p != 0 {
        total += q / p;
        (p, q) = (q % p, p);
    }
    Ok(total)
}

/// Forks from the root interval down to the interval whose mediant is `x`.
pub fn path_to(x: &Rat) -> Result<SBPath> {
    let (xp, xq) = open_unit(x)?;
    let level = first_level(x)?;
    if level - 2 > MAX_PATH_LEN {
        return Err(Error::SizeCap(format!("path to {x} has {} forks", level - 2)));
    }
    let mut iv = FareyInterval::ROOT;
    let mut path = Vec::with_capacity((level - 2) as usize);
    loop {
        let m = iv.mediant()?;
        let fork = match (xp as u128 * m.q as u128).cmp(&(m.p as u128 * xq as u128)) {
            Ordering::Equal => return Ok(SBPath(path)),
            Ordering::Less => Fork::Left,
            Ordering::Greater => Fork::Right,
        };
        path.push(fork);
        iv = iv.child(fork)?;
    }
}

/// The level-`n` Farey interval of `x`; undefined when `x` appears by level `n`.
pub fn farey_interval(x: &Rat, n: u64) -> Result<FareyInterval> {
    if n == 0 {
        return Err(Error::Precondition("levels start at 1".into()));
    }
    if first_level(x)? <= n {
        return Err(Error::UndefinedAtLevel(format!("{x} appears by level {n}")));
    }
    let path = path_to(x)?;
    SBPath(path.0[..(n - 1) as usize].to_vec()).interval()
}

/// `I_alpha`: the interval whose mediant is `alpha`.
pub fn alpha_interval(alpha: &Rat) -> Result<FareyInterval> {
    path_to(alpha)?.interval()
}

fn check_domain(alpha: &Rat, x: &Rat) -> Result<Vec<FareyInterval>> {
    let ivs = path_to(alpha)?.intervals()?;
    if !ivs.last().unwrap().contains_closed(x) {
        return Err(Error::Precondition(format!(
            "{x} lies outside the closed interval {}",
            ivs.last().unwrap()
        )));
    }
    Ok(ivs)
}

fn r(p: u64) -> Rat {
    Rat::from_int(p)
}

/// `sum_i min(b_i x - a_i, c_i - d_i x)` over the Farey intervals
/// `(a_i/b_i, c_i/d_i)` of `alpha` at levels `1..n`, where `alpha` first
/// appears at level `n + 1`.
pub fn phi_direct(alpha: &Rat, x: &Rat) -> Result<Rat> {
    let ivs = check_domain(alpha, x)?;
    // Over the common denominator of x, since v > 0.
    let (u, v) = (x.numer(), x.denom());
    let mut sum = BigInt::from(0u8);
    for iv in ivs {
        let left = u * iv.lo.q - v * iv.lo.p;
        let right = v * iv.hi.p - u * iv.hi.q;
        sum += left.min(right);
    }
    Rat::new(sum, v.clone())
}

/// The two-segment form: linear from `(a/b, (b-1)/b)` to
/// `(alpha, (q-1)/q)` and on to `(c/d, (d-1)/d)`.
pub fn phi_closed(alpha: &Rat, x: &Rat) -> Result<Rat> {
    let ivs = check_domain(alpha, x)?;
    let iv = ivs.last().unwrap();
    let qa = Rat::from(alpha.denom_abs());
    let peak_y = (&qa - Rat::one()) / qa;
    let end = |f: Farey| (r(f.p) / r(f.q), (r(f.q) - Rat::one()) / r(f.q));
    let (x0, y0) = if x <= alpha { end(iv.lo) } else { end(iv.hi) };
    if x == alpha {
        return Ok(peak_y);
    }
    let slope = (&peak_y - &y0) / (alpha - &x0);
    Ok(y0 + slope * (x - &x0))
}

/// The rational with least denominator strictly between `lo` and `hi`.
pub fn simplest_between(lo: &Rat, hi: &Rat) -> Result<Rat> {
    if lo >= hi {
        return Err(Error::Precondition(format!("empty interval ({lo}, {hi})")));
    }
    if lo.is_negative() && hi.is_positive() {
        return Ok(Rat::zero());
    }
    if !hi.is_positive() {
        return Ok(-simplest_positive(&-hi, Some(&-lo)));
    }
    Ok(simplest_positive(lo, Some(hi)))
}

/// Simplest rational in `(lo, hi)` with `lo >= 0`; `hi = None` is infinity.
fn simplest_positive(lo: &Rat, hi: Option<&Rat>) -> Rat {
    let next = Rat::from_int(lo.floor() + 1);
    if hi.is_none_or(|h| &next < h) {
        return next;
    }
    let hi = hi.unwrap();
    let fl = Rat::from_int(lo.floor());
    let (l, h) = (lo - &fl, hi - &fl);
    // l in [0, 1), h in (0, 1]: reflect through 1/x.
    let inv_lo = h.recip().expect("h > 0");
    let inv_hi = if l.is_zero() { None } else { Some(l.recip().expect("l > 0")) };
    fl + simplest_positive(&inv_lo, inv_hi.as_ref()).recip().expect("positive")
}
