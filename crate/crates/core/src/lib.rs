//! Numerical verification of torsion volume forms, peripheral forms and
//! Goldman symplectic forms on SL(N,C) representation varieties of free
//! groups.

pub mod cohomology;
pub mod error;
pub mod linalg;
pub mod mat;
pub mod torsion;
pub mod trace;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use mat::{GroupElement, LieElement, OrthonormalFrame, SigmaVector};
pub use cohomology::{Cocycle, CohomologyBasis, Representation, SurfaceConfig, Word};
