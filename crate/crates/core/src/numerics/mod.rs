//! Special functions, quadrature, small eigensolvers and seeded randomness.

mod eig;
mod quadrature;
mod rng;
mod special;

pub use eig::sym_eig_max;
pub use quadrature::adaptive_quadrature;
pub use rng::RngStream;
pub use special::{erf, erfc, std_normal_cdf, std_normal_pdf};
