//! Schatten-class numerics: singular values and Schatten (quasi-)norms, divided differences,
//! discrete multilinear operator integrals, explicit isometric embeddings between ℓ_p and
//! Schatten spaces, cubature dimension bounds, and a numerical checker that tests a candidate
//! embedding `ℓ_q² → S_p^n` against the scalar identity and second-derivative obstructions.

pub mod cli;
pub mod divdiff;
pub mod embed;
pub mod error;
pub mod io;
pub mod matrix;
pub mod moi;
pub mod obstruct;
pub mod schatten;

pub use num_complex;

pub use divdiff::{divided_difference, SymbolFunction};
pub use embed::{
    lambda_bound, verify_isometry, DivisionAlgebra, Element, EmbeddingMap, Field, SpaceKind,
    SpaceSpec,
};
pub use error::{Error, ErrorKind, Result};
pub use matrix::{hermitian_eig, singular_values, ComplexMatrix, SpectralDecomposition};
pub use moi::{moi_apply, second_derivative_schatten, MoiProblem};
pub use obstruct::{check_candidate, CandidatePair, CheckConfig, ObstructionReport, Verdict};
pub use schatten::{schatten_norm, vector_pnorm, PExponent};
