//! Towers of intersection blowups of P^2 over a point `[a0 : 0 : 1]` of the
//! line `Y = 0`, encoded as subdivisions of Farey intervals.
//!
//! `L` (the strict transform of `Y = 0`) is the fraction `0/1`, `E(1)` is
//! `1/1` and every later exceptional divisor is the mediant of the pair of
//! crossing divisors blown up to create it. In local coordinates
//! `x - a0, y`, the divisor created from `(a/b, c/d)` has local height
//! `gcd_v^+((x-a0)^b / y^a, y^c / (x-a0)^d)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exact::factor::{factor_biguint, valuation};
use crate::exact::{FactorConfig, LogRat, LogSum, Rat};
use crate::places::{global_gcd_plus, height_rat, is_s_unit, Place, PlaceSet};
use crate::stern_brocot::{path_to, Farey, FareyInterval, SBPath};

/// An exceptional divisor `E(index)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DivisorNode {
    pub index: usize,
    pub fraction: Farey,
    pub creating_interval: FareyInterval,
    /// Coefficient in the pullback of `XYZ = 0`.
    pub mult_pullback: u64,
    /// Coefficient in the relative canonical divisor.
    pub discrepancy: u64,
}

impl DivisorNode {
    /// `max(0, min(b n - a m, c m - d n))` for the creating interval
    /// `(a/b, c/d)`, with `n = ord(x - a0)` and `m = ord(y)`.
    pub fn order_contrib(&self, n: i64, m: i64) -> i64 {
        let (lo, hi) = (self.creating_interval.lo(), self.creating_interval.hi());
        let (a, b) = (lo.num() as i128, lo.den() as i128);
        let (c, d) = (hi.num() as i128, hi.den() as i128);
        let (n, m) = (n as i128, m as i128);
        let v = (b * n - a * m).min(c * m - d * n).max(0);
        i64::try_from(v).expect("contribution fits in i64")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TowerKind {
    Chain,
    Theorem2,
    Custom,
}

/// A sequence of blowups over one center.
#[derive(Clone, Debug)]
pub struct Tower {
    center: Rat,
    kind: TowerKind,
    choices: Vec<FareyInterval>,
    nodes: Vec<DivisorNode>,
    crossing: BTreeSet<FareyInterval>,
    by_fraction: BTreeMap<Farey, usize>,
}

impl Tower {
    /// `X_1`: just `E(1)`, created from the formal interval `(0/1, 1/0)`.
    pub fn base(center: Rat) -> Result<Tower> {
        if center.is_zero() {
            return Err(Error::Precondition(
                "the center must lie off X = 0".into(),
            ));
        }
        let e1 = DivisorNode {
            index: 1,
            fraction: Farey::ONE,
            creating_interval: FareyInterval::FORMAL,
            mult_pullback: 1,
            discrepancy: 1,
        };
        Ok(Tower {
            center,
            kind: TowerKind::Custom,
            choices: Vec::new(),
            nodes: vec![e1],
            crossing: BTreeSet::from([FareyInterval::ROOT]),
            by_fraction: BTreeMap::from([(Farey::ONE, 0)]),
        })
    }

    /// Multiplicity and discrepancy of the divisor with this fraction.
    fn side(&self, f: Farey) -> (u64, u64) {
        if f == Farey::ZERO {
            (1, 0)
        } else if f.is_right_root() {
            (0, 0)
        } else {
            let n = &self.nodes[self.by_fraction[&f]];
            (n.mult_pullback, n.discrepancy)
        }
    }

    /// Blows up the crossing point of the two divisors in `iv`.
    pub fn blowup(&mut self, iv: FareyInterval) -> Result<&DivisorNode> {
        if !self.crossing.remove(&iv) {
            return Err(Error::InvalidBlowup(format!(
                "{iv} is not a current crossing"
            )));
        }
        let m = iv.mediant()?;
        let (ml, dl) = self.side(iv.lo());
        let (mh, dh) = self.side(iv.hi());
        self.crossing.insert(FareyInterval::new(iv.lo(), m)?);
        self.crossing.insert(FareyInterval::new(m, iv.hi())?);
        self.choices.push(iv);
        self.by_fraction.insert(m, self.nodes.len());
        self.nodes.push(DivisorNode {
            index: self.nodes.len() + 1,
            fraction: m,
            creating_interval: iv,
            mult_pullback: ml + mh,
            discrepancy: dl + dh + 1,
        });
        Ok(self.nodes.last().unwrap())
    }

    pub fn center(&self) -> &Rat {
        &self.center
    }

    pub fn kind(&self) -> TowerKind {
        self.kind
    }

    pub fn choices(&self) -> &[FareyInterval] {
        &self.choices
    }

    pub fn nodes(&self) -> &[DivisorNode] {
        &self.nodes
    }

    /// `E(i)`, 1-based.
    pub fn node(&self, i: usize) -> Result<&DivisorNode> {
        i.checked_sub(1)
            .and_then(|k| self.nodes.get(k))
            .ok_or_else(|| Error::Precondition(format!("no divisor E({i})")))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Current crossings, ordered by endpoints.
    pub fn crossing_set(&self) -> impl Iterator<Item = &FareyInterval> {
        self.crossing.iter()
    }

    /// Every blowup after `E(1)` was on the strict transform of `Y = 0`.
    pub fn is_chain(&self) -> bool {
        self.choices.iter().all(|c| c.lo() == Farey::ZERO)
    }

    /// Fork paths of the choices; the `custom:` tower syntax.
    pub fn choice_paths(&self) -> Vec<SBPath> {
        self.nodes[1..]
            .iter()
            .map(|n| path_to(&n.fraction.to_rat().unwrap()).expect("tree fraction"))
            .collect()
    }

    /// `custom:` form of the choices, e.g. `.,L,LR`.
    pub fn spec_string(&self) -> String {
        let paths: Vec<String> = self.choice_paths().iter().map(|p| p.to_string()).collect();
        format!("custom:{}", paths.join(","))
    }
}

/// Always blowing up on the strict transform of `Y = 0`: `E(i)` comes from
/// `(0/1, 1/(i-1))`.
pub fn chain_tower(n: usize, center: Rat) -> Result<Tower> {
    if n == 0 {
        return Err(Error::Precondition("a tower has at least E(1)".into()));
    }
    let mut t = Tower::base(center)?;
    for i in 2..=n {
        t.blowup(FareyInterval::new(Farey::ZERO, Farey::new(1, i as u64 - 1)?)?)?;
    }
    t.kind = TowerKind::Chain;
    Ok(t)
}

/// A chain of `n - 1` divisors, then the blowup of `E(n-1)` meeting
/// `E(n-2)`: the interval `(1/(n-1), 1/(n-2))`.
pub fn theorem2_tower(n: usize, center: Rat) -> Result<Tower> {
    if n < 3 {
        return Err(Error::Precondition(format!("n = {n}, need n >= 3")));
    }
    let mut t = chain_tower(n - 1, center)?;
    let k = n as u64;
    t.blowup(FareyInterval::new(Farey::new(1, k - 1)?, Farey::new(1, k - 2)?)?)?;
    t.kind = TowerKind::Theorem2;
    Ok(t)
}

pub fn custom_tower(choices: &[FareyInterval], center: Rat) -> Result<Tower> {
    let mut t = Tower::base(center)?;
    for &c in choices {
        t.blowup(c)?;
    }
    Ok(t)
}

/// Choices given as fork paths from `(0/1, 1/1)`; `.` is the root.
pub fn tower_from_paths(paths: &[SBPath], center: Rat) -> Result<Tower> {
    let ivs = paths
        .iter()
        .map(SBPath::interval)
        .collect::<Result<Vec<_>>>()?;
    custom_tower(&ivs, center)
}

/// Every tower with at most `max_blowups` blowups (counting `E(1)`), one
/// per choice sequence.
pub fn all_towers(max_blowups: usize, center: Rat) -> Result<Vec<Tower>> {
    if max_blowups == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut stack = vec![Tower::base(center)?];
    while let Some(t) = stack.pop() {
        if t.len() < max_blowups {
            for &c in t.crossing.iter().rev() {
                let mut next = t.clone();
                next.blowup(c)?;
                stack.push(next);
            }
        }
        out.push(t);
    }
    Ok(out)
}

/// A scan point `[a : b : 1]` with `a != 0` and `b != 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SurfacePoint {
    pub a: Rat,
    pub b: Rat,
}

impl SurfacePoint {
    pub fn new(a: Rat, b: Rat) -> Result<SurfacePoint> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::PointOnDivisor);
        }
        Ok(SurfacePoint { a, b })
    }

    /// `a - a0`, rejecting points over the center.
    pub fn offset(&self, center: &Rat) -> Result<Rat> {
        let x = &self.a - center;
        if x.is_zero() {
            return Err(Error::PointOnDivisor);
        }
        Ok(x)
    }
}

impl fmt::Display for SurfacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}:1]", self.a, self.b)
    }
}

fn rat_pow_abs(x: &Rat, e: u64) -> Result<Rat> {
    x.abs().pow(i64::try_from(e).map_err(|_| Error::Overflow("rat_pow_abs"))?)
}

/// Local height of `node` at `P` and `v`.
pub fn local_contrib(t: &Tower, node: &DivisorNode, p: &SurfacePoint, v: &Place) -> Result<LogRat> {
    let x = p.offset(&t.center)?;
    match v {
        Place::Prime(q) => {
            let k = node.order_contrib(valuation(&x, q), valuation(&p.b, q));
            Ok(LogRat::of_biguint(q).scale(k))
        }
        Place::Infinity => {
            // log max(1, min(|y|^a / |x|^b, |x|^d / |y|^c))
            let (lo, hi) = (node.creating_interval.lo(), node.creating_interval.hi());
            let first = &rat_pow_abs(&p.b, lo.num())? / &rat_pow_abs(&x, lo.den())?;
            let second = &rat_pow_abs(&x, hi.den())? / &rat_pow_abs(&p.b, hi.num())?;
            let m = first.min(second);
            Ok(LogRat::new(m.max(Rat::one()))?)
        }
    }
}

/// Path from the root interval to the creating interval of `E(i)`, `i >= 2`.
pub fn relevant_path(t: &Tower, i: usize) -> Result<SBPath> {
    if i < 2 {
        return Err(Error::Precondition("relevant paths start at E(2)".into()));
    }
    path_to(&t.node(i)?.fraction.to_rat().expect("finite fraction"))
}

/// Deepest level of a creating interval of some `E(i)`, `i >= 2`, whose
/// nested intervals all contain `alpha`, endpoints included; 0 if none.
pub fn max_subtower_level(t: &Tower, alpha: &Rat) -> Result<u64> {
    if !(alpha.is_positive() && alpha < &Rat::one()) {
        return Err(Error::Precondition(format!("{alpha} is not in (0, 1)")));
    }
    let mut best = 0;
    for i in 2..=t.len() {
        let path = relevant_path(t, i)?;
        if path.intervals()?.iter().all(|iv| iv.contains_closed(alpha)) {
            best = best.max(path.len() as u64 + 1);
        }
    }
    Ok(best)
}

/// `lambda_p((Y = 0), [a : b : 1]) = (ord_p b - min(ord_p a, ord_p b, 0)) log p`.
pub fn lambda_y_order(p: &SurfacePoint, q: &BigUint) -> i64 {
    let (va, vb) = (valuation(&p.a, q), valuation(&p.b, q));
    vb - va.min(vb).min(0)
}

/// One prime's side of the unconditional bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PerPrimeBound {
    pub prime: BigUint,
    pub n_p: i64,
    pub m_p: i64,
    /// `sum_i local_contrib(E(i), P, p)` over all divisors.
    pub lhs: LogRat,
    pub lambda_y: LogRat,
    pub bound: LogRat,
    pub ok: bool,
}

/// For chain towers the bound is `lambda_p(Y = 0)`; otherwise
/// `(n_p - 1) log p + lambda_p(Y = 0)` with `n_p = ord_p(a - a0) >= 1`.
pub fn per_prime_bound(t: &Tower, p: &SurfacePoint, q: &BigUint) -> Result<PerPrimeBound> {
    let x = p.offset(&t.center)?;
    let n = valuation(&x, q);
    if n <= 0 {
        return Err(Error::Precondition(format!(
            "ord_{q}(a - a0) = {n}; the bound needs a positive order"
        )));
    }
    let m = valuation(&p.b, q);
    let k: i64 = t.nodes.iter().map(|e| e.order_contrib(n, m)).sum();
    let logp = LogRat::of_biguint(q);
    let ly = lambda_y_order(p, q);
    let slack = if t.is_chain() { 0 } else { n - 1 };
    let lhs = logp.scale(k);
    let bound = logp.scale(slack + ly);
    Ok(PerPrimeBound {
        prime: q.clone(),
        n_p: n,
        m_p: m,
        ok: lhs <= bound,
        lambda_y: logp.scale(ly),
        lhs,
        bound,
    })
}

/// `lhs_p <= gcd_p^+(a - a0, b) + v_p(b) (q - 1)/q log p` with
/// `alpha_p = n_p / m_p = p'/q` in `(0, 1)`; `None` when `alpha_p` is outside.
/// Returns the two sides as coefficients of `log p`.
pub fn longest_path_bound(t: &Tower, p: &SurfacePoint, q: &BigUint) -> Result<Option<(Rat, Rat)>> {
    let x = p.offset(&t.center)?;
    let (n, m) = (valuation(&x, q), valuation(&p.b, q));
    if n <= 0 || m <= 0 || n >= m {
        return Ok(None);
    }
    let alpha = Rat::new(n, m)?;
    let den = Rat::from(alpha.denom_abs());
    let lhs: i64 = t.nodes.iter().map(|e| e.order_contrib(n, m)).sum();
    let rhs = Rat::from(n.min(m)) + Rat::from(m) * (&den - Rat::one()) / den;
    Ok(Some((Rat::from(lhs), rhs)))
}

/// Components of the pullback of `XYZ = 0` over the center.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Component {
    /// Strict transform of `XYZ = 0`.
    Delta,
    E(usize),
}

#[derive(Clone, Debug)]
pub struct BookkeepingReport {
    /// `pi^*(XYZ = 0)` component by component.
    pub pullback: Vec<(Component, u64)>,
    /// Coefficients of `pi^* Delta - sum_{i >= 2} pi_i^* E_i`.
    pub d_coeffs: Vec<(Component, i64)>,
    /// `(stored discrepancy, sum_i coefficient of E_j in pi_i^* E_i)` per `E(j)`.
    pub canonical: Vec<(usize, u64, u64)>,
    pub reduced: bool,
    pub canonical_ok: bool,
    /// The pullback written out, e.g. `Δ̃ + Ẽ₁ + 2E₂`.
    pub pullback_text: String,
}

fn subscript(n: usize) -> String {
    n.to_string()
        .chars()
        .map(|c| char::from_u32(0x2080 + c.to_digit(10).unwrap()).unwrap())
        .collect()
}

/// Expands pullbacks of every exceptional divisor through later blowups and
/// checks that the boundary divisor is reduced and that the discrepancies
/// agree with the canonical-divisor expansion.
pub fn check_divisor_bookkeeping(t: &Tower) -> BookkeepingReport {
    let n = t.len();
    // coef[i][j]: coefficient of E(j+1) in the pullback of E(i+1).
    let mut coef = vec![vec![0u64; n]; n];
    let side = |f: Farey| -> Option<usize> {
        if f == Farey::ZERO || f.is_right_root() {
            None
        } else {
            Some(t.by_fraction[&f])
        }
    };
    for j in 0..n {
        let iv = t.nodes[j].creating_interval;
        let (lo, hi) = (side(iv.lo()), side(iv.hi()));
        for (i, row) in coef.iter_mut().enumerate() {
            row[j] = if i == j {
                1
            } else if i < j {
                lo.map_or(0, |k| row[k]) + hi.map_or(0, |k| row[k])
            } else {
                0
            };
        }
    }
    let mut pullback = vec![(Component::Delta, 1u64)];
    let mut d_coeffs = vec![(Component::Delta, 1i64)];
    let mut canonical = Vec::new();
    for (j, node) in t.nodes.iter().enumerate() {
        pullback.push((Component::E(j + 1), node.mult_pullback));
        let later: u64 = (1..n).map(|i| coef[i][j]).sum();
        d_coeffs.push((Component::E(j + 1), node.mult_pullback as i64 - later as i64));
        let total: u64 = (0..n).map(|i| coef[i][j]).sum();
        canonical.push((j + 1, node.discrepancy, total));
    }
    let reduced = d_coeffs.iter().all(|&(_, c)| c == 1);
    let canonical_ok = canonical.iter().all(|&(_, d, s)| d == s);

    let blown: BTreeSet<Farey> = t.choices.iter().flat_map(|c| [c.lo(), c.hi()]).collect();
    let terms: Vec<String> = pullback
        .iter()
        .map(|&(c, m)| {
            let coeff = if m == 1 { String::new() } else { m.to_string() };
            match c {
                Component::Delta => format!("{coeff}Δ\u{303}"),
                Component::E(i) => {
                    let e = if blown.contains(&t.nodes[i - 1].fraction) { "\u{1ebc}" } else { "E" };
                    format!("{coeff}{e}{}", subscript(i))
                }
            }
        })
        .collect();
    BookkeepingReport {
        pullback,
        d_coeffs,
        canonical,
        reduced,
        canonical_ok,
        pullback_text: terms.join(" + "),
    }
}

/// Towers over distinct nonzero centers.
#[derive(Clone, Debug)]
pub struct TowerSet {
    towers: Vec<Tower>,
}

impl TowerSet {
    pub fn new(towers: Vec<Tower>) -> Result<TowerSet> {
        let mut seen = BTreeSet::new();
        for t in &towers {
            if !seen.insert(t.center.clone()) {
                return Err(Error::Precondition(format!("center {} repeated", t.center)));
            }
        }
        if towers.is_empty() {
            return Err(Error::Precondition("no towers".into()));
        }
        Ok(TowerSet { towers })
    }

    pub fn single(t: Tower) -> TowerSet {
        TowerSet { towers: vec![t] }
    }

    pub fn towers(&self) -> &[Tower] {
        &self.towers
    }

    pub fn centers(&self) -> impl Iterator<Item = &Rat> {
        self.towers.iter().map(|t| &t.center)
    }

    /// Whether every difference of distinct centers is an `S`-unit.
    pub fn differences_are_s_units(&self, s: &PlaceSet) -> bool {
        let c: Vec<&Rat> = self.centers().collect();
        c.iter().enumerate().all(|(i, x)| {
            c[i + 1..].iter().all(|y| is_s_unit(&(*x - *y), s))
        })
    }
}

/// Per-center pieces of the left-hand side at one point.
#[derive(Clone, Debug)]
pub struct CenterEval {
    /// `sum over all places of gcd_v^+(a - a0, b)`.
    pub gcd_all: LogRat,
    /// `sum over p outside S of sum_{j >= 2} local_contrib(E(j))`.
    pub outside: LogRat,
    /// `(p, ord_p(a - a0), ord_p(b))` for every prime where both are positive.
    pub primes: Vec<(BigUint, i64, i64)>,
}

/// Only primes dividing both numerators can contribute at finite places,
/// so only their gcd is factored.
pub fn eval_center(t: &Tower, p: &SurfacePoint, s: &PlaceSet, cfg: &FactorConfig) -> Result<CenterEval> {
    let x = p.offset(&t.center)?;
    let gcd_all = global_gcd_plus(&x, &p.b)?;
    let g = x.numer_abs().gcd(&p.b.numer_abs());
    let mut outside = LogRat::zero();
    let mut primes = Vec::new();
    if !g.is_one() {
        for q in factor_biguint(&g, cfg)?.into_keys() {
            let (n, m) = (valuation(&x, &q), valuation(&p.b, &q));
            if !s.contains_prime(&q) {
                let k: i64 = t.nodes[1..].iter().map(|e| e.order_contrib(n, m)).sum();
                outside += &LogRat::of_biguint(&q).scale(k);
            }
            primes.push((q, n, m));
        }
    }
    Ok(CenterEval { gcd_all, outside, primes })
}

/// `sum_i [sum_v gcd_v^+(a - a_i, b) + sum_{p not in S} sum_{j >= 2} local_contrib]`.
pub fn lhs_vojta(ts: &TowerSet, p: &SurfacePoint, s: &PlaceSet, cfg: &FactorConfig) -> Result<LogRat> {
    let mut total = LogRat::zero();
    for t in &ts.towers {
        let e = eval_center(t, p, s, cfg)?;
        total += &e.gcd_all;
        total += &e.outside;
    }
    Ok(total)
}

/// `log |ABC|'_S` for the canonical form `[A : B : C]` of `[a : b : 1]`,
/// i.e. `sum over v outside S of lambda_v((XYZ = 0), P)`.
pub fn lambda_xyz_outside(p: &SurfacePoint, s: &PlaceSet) -> Result<LogRat> {
    if p.a.is_zero() || p.b.is_zero() {
        return Err(Error::PointOnDivisor);
    }
    let l: BigInt = p.a.denom().lcm(p.b.denom());
    let prod = (p.a.numer() * (&l / p.a.denom())) * (p.b.numer() * (&l / p.b.denom())) * &l;
    Ok(LogRat::of_biguint(&crate::places::prime_to_s_int(prod.magnitude(), s)))
}

/// `eps max(h(a), h(b)) + sum_{v not in S} lambda_v((XYZ = 0), P)`.
pub fn rhs_vojta(p: &SurfacePoint, s: &PlaceSet, eps: &Rat) -> Result<LogSum> {
    if eps.is_negative() {
        return Err(Error::Precondition("eps must be nonnegative".into()));
    }
    let h = height_rat(&p.a).max(height_rat(&p.b));
    Ok(LogSum::term(eps.clone(), h) + LogSum::from(lambda_xyz_outside(p, s)?))
}

/// Whether `lhs - rhs` is positive, zero or negative.
pub fn compare_sides(lhs: &LogRat, rhs: &LogSum) -> Result<Ordering> {
    LogSum::from(lhs.clone()).compare(rhs)
}
