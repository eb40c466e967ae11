//! Exact quadratic-form machinery for deciding whether the tangent bundle
//! of a smooth affine diagonal quadric `Σ aᵢxᵢ² = 1` has a nowhere-vanishing section.

pub mod error;
pub mod exactnum;
pub mod fields;
pub mod linalg;
pub mod gwring;
pub mod hedgehog;
pub mod quadform;
pub mod wire;

pub use error::{Error, Result};
pub use exactnum::Rat;
pub use fields::{FieldDescriptor, FieldElem, Level, Place, SquareClass};
pub use gwring::{GWElem, GWInvariants, QuadExtension, WittClass};
pub use hedgehog::{Decision, LinearPoly, Obstruction, QuadricProblem, SectionCertificate, Verdict};
pub use linalg::Matrix;
pub use quadform::{DiagonalForm, GramMatrix, ValueGroup};
