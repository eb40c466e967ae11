//! Decision engine for nowhere-vanishing tangent sections on `Σ aᵢxᵢ² = 1`,
//! with explicit section synthesis and verification.

mod decide;
mod points;
mod section;

use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{FieldDescriptor, FieldElem, Level};
use crate::linalg::Matrix;
use crate::quadform::DiagonalForm;

pub use decide::{decide_section, decide_section_with, sphere_decision, DecideOptions};
pub use points::{
    binary_in_transfer_ideal, has_rational_point, in_value_group_squared, quadratic_point,
    quadratic_point_with_witness, PointStatus,
};
pub use section::{section_isotropic, section_odd, verify_section};

/// The affine quadric `Σ aᵢxᵢ² = 1` in `n+1` variables, optionally with a
/// claimed point on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadricProblem {
    pub field: FieldDescriptor,
    pub coeffs: Vec<FieldElem>,
    pub point: Option<Vec<FieldElem>>,
}

impl QuadricProblem {
    /// Rejects `n = 0`, zero coefficients and points off the quadric.
    pub fn new(field: FieldDescriptor, coeffs: Vec<FieldElem>, point: Option<Vec<FieldElem>>) -> Result<Self> {
        let field = field.validate()?;
        if coeffs.len() < 2 {
            return Err(Error::InvalidProblem(format!(
                "need at least two coefficients (n >= 1), got {}",
                coeffs.len()
            )));
        }
        let form = DiagonalForm::new(field, coeffs)?;
        if let Some(x) = &point {
            if x.len() != form.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "point has {} coordinates, quadric has {}",
                    x.len(),
                    form.dim()
                )));
            }
            for xi in x {
                field.check(xi)?;
            }
            if form.eval(x) != field.one() {
                return Err(Error::InvalidCertificate("point does not satisfy q = 1".into()));
            }
        }
        Ok(QuadricProblem {
            field,
            coeffs: form.coeffs,
            point,
        })
    }

    pub fn from_ints(field: FieldDescriptor, coeffs: &[i64]) -> Result<Self> {
        Self::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect(), None)
    }

    /// Dimension of the quadric; one less than the number of variables.
    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn form(&self) -> DiagonalForm {
        DiagonalForm {
            field: self.field,
            coeffs: self.coeffs.clone(),
        }
    }
}

/// `c + Σ cⱼxⱼ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearPoly {
    pub constant: FieldElem,
    pub linear: Vec<FieldElem>,
}

impl LinearPoly {
    pub fn homogeneous(k: FieldDescriptor, linear: Vec<FieldElem>) -> Self {
        LinearPoly {
            constant: k.zero(),
            linear,
        }
    }
}

/// A tuple of linear polynomials meant as a tangent vector field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionCertificate {
    pub entries: Vec<LinearPoly>,
    /// Basis change through which the section was built, when it was.
    pub basis_change: Option<Matrix>,
}

impl SectionCertificate {
    /// Homogeneous certificate `s(x) = C·x`.
    pub fn from_matrix(k: FieldDescriptor, c: &Matrix, basis_change: Option<Matrix>) -> Self {
        let entries = (0..c.rows())
            .map(|i| LinearPoly::homogeneous(k, c.row(i).to_vec()))
            .collect();
        SectionCertificate {
            entries,
            basis_change,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    SectionExists,
    NoSection,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::SectionExists => "SectionExists",
            Verdict::NoSection => "NoSection",
            Verdict::Unknown => "Unknown",
        })
    }
}

/// Why a `NoSection` verdict holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obstruction {
    /// Some real embedding makes every coefficient positive.
    AllEmbeddingsPositive,
    /// The level exceeds `bound = 2n+1`.
    LevelTooLarge { level: Level, bound: u32 },
    /// `−∏aᵢ ∉ [D(q)²]`.
    NecessaryConditionFails,
}

/// Stable tags naming the criterion behind a verdict.
pub mod tags {
    pub const ODD_PAIRING: &str = "odd-dimension-pairing";
    pub const ISOTROPIC_SPLIT: &str = "isotropic-hyperbolic-split";
    pub const SPHERE_LEVEL: &str = "sphere-level-bound";
    pub const COHOMOLOGICAL_DIMENSION_TWO: &str = "cohomological-dimension-two";
    pub const REAL_EMBEDDING_SIGNS: &str = "real-embedding-signs";
    pub const POINT_CRITERION: &str = "point-minus-one-in-value-group";
    pub const NECESSARY_CONDITION: &str = "necessary-transfer-condition";
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub certificate: Option<SectionCertificate>,
    /// Criteria the verdict relied on, most specific first.
    pub citations: Vec<String>,
    pub obstruction: Option<Obstruction>,
    pub diagnostics: Vec<String>,
}

impl Decision {
    fn new(verdict: Verdict) -> Self {
        Decision {
            verdict,
            certificate: None,
            citations: Vec::new(),
            obstruction: None,
            diagnostics: Vec::new(),
        }
    }

    fn exists(tag: &str, certificate: Option<SectionCertificate>) -> Self {
        let mut d = Self::new(Verdict::SectionExists);
        d.certificate = certificate;
        d.citations.push(tag.to_string());
        d
    }

    fn none(tag: &str, obstruction: Obstruction) -> Self {
        let mut d = Self::new(Verdict::NoSection);
        d.obstruction = Some(obstruction);
        d.citations.push(tag.to_string());
        d
    }

    fn unknown(diagnostics: Vec<String>) -> Self {
        let mut d = Self::new(Verdict::Unknown);
        d.diagnostics = diagnostics;
        d
    }
}
