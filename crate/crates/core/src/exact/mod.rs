//! Exact arithmetic foundation: rationals, factorization, p-adic orders and
//! logarithmic scalars.

pub mod factor;
pub mod logs;
pub mod rat;

pub use factor::{factor, factor_u64, factor_with, is_prime, is_prime_u64, ordp, FactorConfig, Factorization};
pub use logs::{
    ln_fixed, log_combine, log_combine_capped, lograt_to_float, Combined, FloatApprox, LogRat,
    LogSum, DEFAULT_BIT_CAP,
};
pub use rat::Rat;
