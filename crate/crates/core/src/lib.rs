//! Structured-grid finite-volume solver for compressible flows at all
//! speeds, built around the family of Roe-type flux schemes: classical Roe,
//! preconditioned Roe, All-Speed Roe with three central-term variants,
//! the T-Roe modification, the LM-Roe fix, and two schemes that treat the
//! sound speed differently in the numerators and denominators of the
//! dissipation coefficients.

// negated comparisons reject NaN; index loops walk parallel 4-vectors
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cases;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod gas;
pub mod mesh;
pub mod schemes;
pub mod solver;

pub use error::{Error, Result};
