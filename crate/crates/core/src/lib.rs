//! Exact q-expansions of weakly holomorphic modular forms and rigorously
//! error-bounded Fourier coefficients of Poincare series on Gamma_0(N),
//! together with discovery, exact construction, and numerical verification of
//! linear relations among cuspidal Poincare series.
//!
//! Module map:
//! - [`exactarith`]: Kronecker symbols, eps_d, Kloosterman sums (both
//!   integrality classes), weight/level profiles, dimension formulas.
//! - [`special`]: J/I-Bessel and incomplete gamma with certified absolute
//!   error bounds.
//! - [`qseries`]: truncated Laurent series over exact rationals; Eisenstein
//!   series, Delta, j, echelonized cusp bases, weakly holomorphic forms.
//! - [`poincare`]: numerical coefficients a(m,k,N;n) and b(-m,k,N;n) via
//!   Kloosterman/Bessel c-sums with rigorous tail and rounding bounds.
//! - [`relations`]: linear relations among the P(m,k,N): exact solver at
//!   level one, dual-pairing oracle, kernel search, numeric verification.
//!
//! All exact arithmetic uses GMP rationals ([`rug::Rational`]); all numerics
//! use MPFR floats at explicit precision with error bounds carried alongside
//! values, so every reported quantity comes with a proof-grade interval.

pub mod error;
pub mod exactarith;
pub mod numeric;
pub mod poincare;
pub mod qseries;
pub mod relations;
pub mod special;

pub use error::{Error, Result};
pub use exactarith::WeightProfile;
