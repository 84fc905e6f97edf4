//! Special functions, log-space arithmetic, adaptive quadrature and random
//! streams.

mod logspace;
pub mod quadrature;
pub mod rng;
pub mod special;

pub use logspace::{ln_one_minus_exp, log_sum_exp, LogSumExp, LogWeight};
pub use quadrature::{integrate, integrate_log, QuadratureOptions, QuadratureResult};
pub use rng::{uniform_stream, RandomStream};
pub use special::{inv_norm_cdf, ln_norm_pdf, log_falling_factorial_ratio, norm_cdf, norm_sf};
