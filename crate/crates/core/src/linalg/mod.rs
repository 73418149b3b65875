//! Small dense complex linear algebra tuned for the problem sizes here
//! (spatial operators up to ~64×64, slab operators stored block-tridiagonally).

mod btd;
mod cmat;
mod eigh;

pub use btd::{BlockTridiag, BtdFactorization};
pub use cmat::{CMat, LuFactors};
pub use eigh::eigh;

pub type C64 = num_complex::Complex64;

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);
