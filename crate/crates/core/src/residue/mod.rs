//! Residue sequences `S_{i,j,k}(alpha)` and their relatives, computed exactly
//! from the basis functions, plus the closed Gamma-product forms.

mod gamma;
mod sequences;

use thiserror::Error;

use crate::exact::CoreError;

pub use gamma::{
    closed_form_alpha_coefficient, closed_form_f_limit, gamma_half_integer, gamma_regularized,
    GammaFactor, GammaProduct, HalfInteger, PiMonomial,
};
pub use sequences::{
    jordan_closed_form, odd_branch_integral, recurrence_residual_from, s_one_one_even_closed_form,
    zero_index_closed_form, ResidueEngine, ResiduePoly, STable, TripleResidues,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResidueError {
    #[error("triple {triple:?} leaves the positive-index family")]
    IndexOutOfFamily { triple: [u32; 3] },
    #[error("index {index} is beyond the precomputed basis (max {max})")]
    IndexBeyondBasis { index: u32, max: u32 },
    #[error("closed form diverges at {triple:?}")]
    InfiniteLimit { triple: [u32; 3] },
    #[error("closed form at {triple:?} keeps a factor sqrt(pi)^{sqrt_pi_power}")]
    NonRationalLimit { triple: [u32; 3], sqrt_pi_power: i32 },
    #[error("pole of Gamma at {argument_halves}/2 needs a nonzero slope")]
    ZeroSlopeAtPole { argument_halves: i64 },
    #[error("unsupported argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}
