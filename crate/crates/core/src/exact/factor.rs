//! Integer factorization with certified primality, and p-adic orders.
//!
//! Small inputs (`u64`) go through trial division, a deterministic
//! Miller-Rabin test and Brent's variant of Pollard rho. Larger inputs are
//! trial-divided and then split with rho over `BigUint`; primes above the
//! deterministic Miller-Rabin range are certified with a Pocklington
//! certificate built from a full factorization of `n - 1`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::rat::Rat;
use crate::error::{Error, Result};

/// Miller-Rabin with these bases is exact for every n < 3.317e24.
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

const TRIAL_BOUND: u64 = 1 << 12;

/// Effort limits for the rho stage.
#[derive(Debug, Clone, Copy)]
pub struct FactorConfig {
    /// Iterations per rho attempt.
    pub rho_iterations: u64,
    /// Number of polynomial constants tried before giving up.
    pub rho_attempts: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            rho_iterations: 1 << 22,
            rho_attempts: 16,
        }
    }
}

/// `sign * prod p^e` with primes strictly increasing and nonzero exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    pub exponents: BTreeMap<BigUint, i64>,
}

impl Factorization {
    /// Multiplies the factorization back out.
    pub fn product(&self) -> Rat {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (p, &e) in &self.exponents {
            let pp = BigInt::from(p.pow(e.unsigned_abs() as u32));
            if e > 0 {
                num *= pp;
            } else {
                den *= pp;
            }
        }
        if self.sign < 0 {
            num = -num;
        }
        Rat::new(num, den).expect("positive denominator")
    }

    pub fn exponent(&self, p: &BigUint) -> i64 {
        self.exponents.get(p).copied().unwrap_or(0)
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.exponents.keys()
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic primality for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_u64(n: u64, c: u64, iters: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let mut x = y;
    let mut ys = y;
    let mut g = 1u64;
    let mut spent = 0u64;
    const M: u64 = 128;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..M.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += M;
        }
        r <<= 1;
        spent += r;
        if spent > iters {
            return None;
        }
    }
    if g == n {
        // Backtrack one step at a time.
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_u64(n: u64, cfg: &FactorConfig, out: &mut BTreeMap<u64, u32>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime_u64(n) {
        *out.entry(n).or_default() += 1;
        return Ok(());
    }
    let r = (n as f64).sqrt() as u64;
    for s in [r.saturating_sub(1), r, r + 1] {
        if s > 1 && s.checked_mul(s) == Some(n) {
            split_u64(s, cfg, out)?;
            return split_u64(s, cfg, out);
        }
    }
    for c in 1..=cfg.rho_attempts {
        if let Some(d) = rho_u64(n, c, cfg.rho_iterations) {
            split_u64(d, cfg, out)?;
            return split_u64(n / d, cfg, out);
        }
    }
    Err(Error::FactorEffort {
        value: n.to_string(),
    })
}

/// Prime factorization of a positive `u64` as `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Result<Vec<(u64, u32)>> {
    factor_u64_with(&mut n, &FactorConfig::default())
}

fn factor_u64_with(n: &mut u64, cfg: &FactorConfig) -> Result<Vec<(u64, u32)>> {
    if *n == 0 {
        return Err(Error::Precondition("cannot factor zero".into()));
    }
    let mut out = BTreeMap::new();
    let mut strip = |p: u64, n: &mut u64| {
        let mut e = 0;
        while (*n).is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.insert(p, e);
        }
    };
    strip(2, n);
    strip(3, n);
    let mut p = 5u64;
    while p < TRIAL_BOUND && p * p <= *n {
        strip(p, n);
        strip(p + 2, n);
        p += 6;
    }
    split_u64(*n, cfg, &mut out)?;
    Ok(out.into_iter().collect())
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &p in &MR_BASES {
        let bp = BigUint::from(p);
        if n == &bp {
            return true;
        }
        if (n % &bp).is_zero() {
            return false;
        }
    }
    let nm1 = n - 1u32;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// 3.317e24, the proven range of the fixed Miller-Rabin bases.
fn mr_exact_bound() -> BigUint {
    BigUint::parse_bytes(b"3317044064679887385961981", 10).expect("literal")
}

/// Certified primality test. Inputs beyond the deterministic Miller-Rabin
/// range get a Pocklington certificate; failure to build one is an error.
pub fn is_prime(n: &BigUint) -> Result<bool> {
    if let Some(small) = n.to_u64() {
        return Ok(is_prime_u64(small));
    }
    if !is_probable_prime_big(n) {
        return Ok(false);
    }
    if n < &mr_exact_bound() {
        return Ok(true);
    }
    pocklington(n, &FactorConfig::default())
}

fn pocklington(n: &BigUint, cfg: &FactorConfig) -> Result<bool> {
    let nm1 = n - 1u32;
    let f = factor_biguint(&nm1, cfg)?;
    for q in f.keys() {
        let exp_q = &nm1 / q;
        let mut witnessed = false;
        for a in 2u32..200 {
            let a = BigUint::from(a);
            if !a.modpow(&nm1, n).is_one() {
                return Ok(false);
            }
            let t = a.modpow(&exp_q, n);
            let g = if t.is_zero() { n.clone() } else { (t - 1u32).gcd(n) };
            if g.is_one() {
                witnessed = true;
                break;
            }
        }
        if !witnessed {
            return Err(Error::FactorEffort {
                value: n.to_string(),
            });
        }
    }
    Ok(true)
}

fn rho_big(n: &BigUint, c: u64, iters: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32);
    let mut x;
    let mut ys = y.clone();
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut r = 1u64;
    let mut spent = 0u64;
    const M: u64 = 64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..M.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += M;
        }
        r <<= 1;
        spent += r;
        if spent > iters {
            return None;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
            return (&g != n).then_some(g);
        }
    }
    Some(g)
}

fn split_big(n: BigUint, cfg: &FactorConfig, out: &mut BTreeMap<BigUint, i64>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if let Some(small) = n.to_u64() {
        let mut out64 = BTreeMap::new();
        split_u64(small, cfg, &mut out64)?;
        for (p, e) in out64 {
            *out.entry(BigUint::from(p)).or_default() += e as i64;
        }
        return Ok(());
    }
    if is_prime(&n)? {
        *out.entry(n).or_default() += 1;
        return Ok(());
    }
    let s = n.sqrt();
    if &s * &s == n {
        split_big(s.clone(), cfg, out)?;
        return split_big(s, cfg, out);
    }
    for c in 1..=cfg.rho_attempts {
        if let Some(d) = rho_big(&n, c, cfg.rho_iterations) {
            let rest = &n / &d;
            split_big(d, cfg, out)?;
            return split_big(rest, cfg, out);
        }
    }
    Err(Error::FactorEffort {
        value: n.to_string(),
    })
}

/// Prime factorization of a positive integer.
pub fn factor_biguint(n: &BigUint, cfg: &FactorConfig) -> Result<BTreeMap<BigUint, i64>> {
    if n.is_zero() {
        return Err(Error::Precondition("cannot factor zero".into()));
    }
    if let Some(mut small) = n.to_u64() {
        return Ok(factor_u64_with(&mut small, cfg)?
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e as i64))
            .collect());
    }
    let mut out = BTreeMap::new();
    let mut rest = n.clone();
    let mut p = 2u64;
    while p < TRIAL_BOUND {
        let bp = BigUint::from(p);
        let mut e = 0i64;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.insert(bp, e);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    split_big(rest, cfg, &mut out)?;
    Ok(out)
}

/// Factors a nonzero rational: numerator primes get positive exponents,
/// denominator primes negative ones.
pub fn factor(x: &Rat) -> Result<Factorization> {
    factor_with(x, &FactorConfig::default())
}

pub fn factor_with(x: &Rat, cfg: &FactorConfig) -> Result<Factorization> {
    if x.is_zero() {
        return Err(Error::Precondition("factor of zero".into()));
    }
    let mut exponents = factor_biguint(&x.numer_abs(), cfg)?;
    for (p, e) in factor_biguint(&x.denom_abs(), cfg)? {
        exponents.insert(p, -e);
    }
    Ok(Factorization {
        sign: if x.is_negative() { -1 } else { 1 },
        exponents,
    })
}

/// Multiplicity of `p` in the nonzero integer `n`. No primality check.
pub(crate) fn int_valuation(n: &BigInt, p: &BigUint) -> u64 {
    debug_assert!(!n.is_zero());
    if let (Some(n), Some(p)) = (n.magnitude().to_u64(), p.to_u64()) {
        let (mut n, mut e) = (n, 0);
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        return e;
    }
    let mut m = n.magnitude().clone();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return e;
        }
        m = q;
        e += 1;
    }
}

/// `ord_p(x)` for nonzero rational `x`, with `p` assumed prime.
pub(crate) fn valuation(x: &Rat, p: &BigUint) -> i64 {
    int_valuation(x.numer(), p) as i64 - int_valuation(x.denom(), p) as i64
}

/// The exponent of the prime `p` in the nonzero rational `x`.
pub fn ordp(x: &Rat, p: &BigUint) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::Precondition("ord_p of zero".into()));
    }
    if !is_prime(p)? {
        return Err(Error::NotPrime(p.to_string()));
    }
    Ok(valuation(x, p))
}

/// Removes every factor of each listed prime from `n`, returning what is left.
pub(crate) fn strip_primes(n: &BigUint, primes: &[BigUint]) -> BigUint {
    let mut m = n.clone();
    for p in primes {
        if m.is_zero() {
            break;
        }
        loop {
            let (q, r) = m.div_rem(p);
            if !r.is_zero() {
                break;
            }
            m = q;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn factor_small_examples() {
        let f = factor(&Rat::from(12)).unwrap();
        assert_eq!(f.sign, 1);
        assert_eq!(f.exponents, BTreeMap::from([(b(2), 2), (b(3), 1)]));

        let f = factor(&Rat::frac(-8, 3)).unwrap();
        assert_eq!(f.sign, -1);
        assert_eq!(f.exponents, BTreeMap::from([(b(2), 3), (b(3), -1)]));
    }

    #[test]
    fn factor_abc_record_value() {
        // 3^10 * 109
        let x = Rat::from(59049 * 109);
        let f = factor(&x).unwrap();
        assert_eq!(f.exponents, BTreeMap::from([(b(3), 10), (b(109), 1)]));
        assert_eq!(f.product(), x);
    }

    #[test]
    fn factor_semiprimes_needing_rho() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        let f = factor_u64(p * q).unwrap();
        assert_eq!(f, vec![(q, 1), (p, 1)]);

        // Above u64: product of two 40-bit primes times a 50-bit prime.
        let ps = [1_099_511_627_791u64, 1_099_511_627_803, 1_125_899_906_842_679];
        let n = ps.iter().fold(BigUint::one(), |acc, &p| acc * p);
        let f = factor_biguint(&n, &FactorConfig::default()).unwrap();
        for p in ps {
            assert!(is_prime_u64(p));
            assert_eq!(f.get(&b(p)), Some(&1));
        }
    }

    #[test]
    fn big_prime_is_certified() {
        // 2^89 - 1 is a Mersenne prime beyond the Miller-Rabin range.
        let m89 = (BigUint::one() << 89u32) - 1u32;
        assert!(is_prime(&m89).unwrap());
        let composite = (BigUint::one() << 90u32) - 1u32;
        assert!(!is_prime(&composite).unwrap());
    }

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        // Strong pseudoprime to several small bases.
        assert!(!is_prime_u64(3_215_031_751));
    }

    #[test]
    fn ordp_examples() {
        assert_eq!(ordp(&Rat::frac(8, 3), &b(2)).unwrap(), 3);
        assert_eq!(ordp(&Rat::frac(8, 3), &b(3)).unwrap(), -1);
        assert_eq!(ordp(&Rat::from(720), &b(5)).unwrap(), 1);
        assert!(matches!(ordp(&Rat::from(8), &b(4)), Err(Error::NotPrime(_))));
        assert!(ordp(&Rat::zero(), &b(2)).is_err());
    }

    #[test]
    fn zero_is_rejected() {
        assert!(factor(&Rat::zero()).is_err());
        assert!(factor_u64(0).is_err());
    }
}
