//! The elementary inequality `alpha + sum_{i=1}^{l} max(0, min(alpha, 1 - i alpha)) <= 1`.

use crate::error::{Error, Result};
use crate::exact::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaOutcome {
    pub sum: Rat,
    pub holds: bool,
    pub equality: bool,
}

/// The `m` with `1/(m+1) <= alpha < 1/m`, for `0 < alpha <= 1`.
pub fn lemma_m(alpha: &Rat) -> Option<u64> {
    if !alpha.is_positive() || alpha > &Rat::one() {
        return None;
    }
    let inv = alpha.recip().ok()?;
    let m = inv.ceil() - 1u32;
    u64::try_from(m).ok()
}

pub fn lemma_elementary_check(alpha: &Rat, l: u64) -> Result<LemmaOutcome> {
    if alpha.is_negative() || alpha > &Rat::one() {
        return Err(Error::Precondition(format!("alpha = {alpha} is outside [0, 1]")));
    }
    if l == 0 {
        return Err(Error::Precondition("l must be at least 1".into()));
    }
    let mut sum = alpha.clone();
    for i in 1..=l {
        let t = alpha.clone().min(Rat::one() - Rat::from(i as i64) * alpha);
        if !t.is_positive() {
            // 1 - i alpha only decreases from here on.
            break;
        }
        sum = sum + t;
    }
    let one = Rat::one();
    Ok(LemmaOutcome {
        holds: sum <= one,
        equality: sum == one,
        sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        for l in [1, 4, 9] {
            let z = lemma_elementary_check(&Rat::zero(), l).unwrap();
            assert!(z.holds && z.sum.is_zero());
            let o = lemma_elementary_check(&Rat::one(), l).unwrap();
            assert!(o.equality);
        }
        let t = lemma_elementary_check(&Rat::frac(1, 3), 5).unwrap();
        assert!(t.equality);
        assert_eq!(lemma_m(&Rat::frac(1, 3)), Some(2));
        let s = lemma_elementary_check(&Rat::frac(2, 7), 1).unwrap();
        assert_eq!(s.sum, Rat::frac(4, 7));
        assert!(lemma_elementary_check(&Rat::frac(3, 2), 1).is_err());
        assert_eq!(lemma_m(&Rat::one()), Some(0));
        assert_eq!(lemma_m(&Rat::zero()), None);
    }
}
