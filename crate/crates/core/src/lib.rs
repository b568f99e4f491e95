//! Local reduction data of elliptic curves `y^2 = x^3 + Ax + B` at primes `p >= 5`,
//! the cubic rings attached to the cubic `x^3 + Ax + B`, exact p-adic densities,
//! finite Fourier sums over monic cubics, rooted binary quartic forms, and a
//! conductor-ordered census with certified Euler-product constants.

pub mod arithmetic;
pub mod census;
pub mod constants;
pub mod cubic;
pub mod cyclotomic;
pub mod densities;
pub mod error;
pub mod fourier;
pub mod interval;
pub mod local;
pub mod quartic;
pub mod shape;

pub use error::{Error, Result};
