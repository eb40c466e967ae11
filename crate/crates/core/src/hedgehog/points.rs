use crate::error::{Error, Result};
use crate::exactnum::{is_rational_square, sign_of};
use crate::fields::{FieldDescriptor, FieldElem};
use crate::gwring::{Functional, QuadExtension};
use crate::quadform::{
    dim3_neighbor_pfister, is_isotropic, represents, value_group_squared, DiagonalForm,
};

use super::QuadricProblem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointStatus {
    /// A point exists; the coordinates are attached when known explicitly.
    Yes(Option<Vec<FieldElem>>),
    No,
    Unknown,
}

/// Whether `q = 1` has a point over the base field, i.e. `1 ∈ D(q)`.
pub fn has_rational_point(problem: &QuadricProblem) -> Result<PointStatus> {
    let k = problem.field;
    let q = problem.form();
    if let Some(x) = &problem.point {
        if q.eval(x) != k.one() {
            return Err(Error::InvalidCertificate("point does not satisfy q = 1".into()));
        }
        return Ok(PointStatus::Yes(Some(x.clone())));
    }
    match k {
        FieldDescriptor::QuadraticallyClosed => Ok(PointStatus::Yes(None)),
        FieldDescriptor::RealQuadratic(_) => Ok(PointStatus::Unknown),
        _ => Ok(if represents(&q, &k.one())? {
            PointStatus::Yes(None)
        } else {
            PointStatus::No
        }),
    }
}

/// A quadratic extension `k(√α)` over which the projective quadric `q = 0`
/// acquires the point `u + √α·w`.
pub fn quadratic_point(q: &DiagonalForm, u: &[FieldElem]) -> Result<QuadExtension> {
    quadratic_point_with_witness(q, u).map(|(ext, _)| ext)
}

/// As [`quadratic_point`], also returning the orthogonal vector `w`.
pub fn quadratic_point_with_witness(
    q: &DiagonalForm,
    u: &[FieldElem],
) -> Result<(QuadExtension, Vec<FieldElem>)> {
    let k = q.field;
    let m = q.dim();
    if u.len() != m {
        return Err(Error::DimensionMismatch(format!("vector of length {} for a form of dimension {m}", u.len())));
    }
    if m == 1 {
        return Err(Error::NoOrthogonalVector);
    }
    let qu = q.eval(u);
    if k.is_zero(&qu) {
        return Err(Error::InvalidProblem("the base vector must be anisotropic".into()));
    }
    // projections of the unit vectors onto u^⊥ span it
    let mut candidates: Vec<Vec<FieldElem>> = Vec::new();
    for i in 0..m {
        let mut e = vec![k.zero(); m];
        e[i] = k.one();
        let t = k.div(&q.bilinear(&e, u), &qu)?;
        let w: Vec<FieldElem> = e.iter().zip(u).map(|(ei, ui)| k.sub(ei, &k.mul(&t, ui))).collect();
        if w.iter().any(|x| !k.is_zero(x)) {
            candidates.push(w);
        }
    }
    let pick = candidates
        .iter()
        .find(|w| !k.is_zero(&q.eval(w)))
        .cloned()
        .or_else(|| {
            // all candidates isotropic: u^⊥ is regular, so some pair has b ≠ 0
            candidates.iter().enumerate().find_map(|(i, a)| {
                candidates[i + 1..].iter().find_map(|b| {
                    let s: Vec<FieldElem> = a.iter().zip(b).map(|(x, y)| k.add(x, y)).collect();
                    (!k.is_zero(&q.eval(&s))).then_some(s)
                })
            })
        })
        .ok_or(Error::DegenerateChoice)?;
    let alpha = k.neg(&k.div(&qu, &q.eval(&pick))?);
    Ok((QuadExtension::new(k, alpha, Functional::FieldTrace)?, pick))
}

/// Decides `−ab ∈ [D(q)²]`; `None` when the available routes cannot decide.
pub fn binary_in_transfer_ideal(q: &DiagonalForm, a: &FieldElem, b: &FieldElem) -> Result<Option<bool>> {
    let k = q.field;
    for x in [a, b] {
        k.check(x)?;
        if k.is_zero(x) {
            return Err(Error::ZeroElement);
        }
    }
    in_value_group_squared(q, &k.neg(&k.mul(a, b)))
}

/// Decides `c ∈ [D(q)²]`; `None` when undecidable here or a resource limit was hit.
pub fn in_value_group_squared(q: &DiagonalForm, c: &FieldElem) -> Result<Option<bool>> {
    let k = q.field;
    k.check(c)?;
    if k.is_zero(c) {
        return Err(Error::ZeroElement);
    }
    let verdict = match k {
        FieldDescriptor::RealQuadratic(_) => return Ok(None),
        FieldDescriptor::Rationals => rational_route(q, c),
        _ => value_group_squared(q).and_then(|g| g.contains_elem(c)),
    };
    match verdict {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_resource_limit() => Ok(None),
        Err(e) => Err(e),
    }
}

fn rational_route(q: &DiagonalForm, c: &FieldElem) -> Result<bool> {
    let k = q.field;
    let a = &q.coeffs;
    let m = q.dim();
    if is_isotropic(q)? {
        return Ok(true);
    }
    if a.iter().all(|x| x == &a[0]) {
        // m⟨1⟩ neighbours the Pfister form 2^M⟨1⟩ with 2^{M−1} < m ≤ 2^M
        let pf = DiagonalForm::new(k, vec![k.one(); m.next_power_of_two()])?;
        return represents(&pf, c);
    }
    match m {
        1 => Ok(is_rational_square(&k.rational(c)?)),
        // D(⟨a₁,a₂⟩) = a₁·D(⟨1,a₁a₂⟩), the latter a group
        2 => represents(&DiagonalForm::new(k, vec![k.one(), k.mul(&a[0], &a[1])])?, c),
        3 => represents(&dim3_neighbor_pfister(k, &a[0], &a[1], &a[2])?, c),
        // anisotropic in dim ≥ 4 over ℚ means definite, and then D(q) is one sign class
        _ => Ok(sign_of(&k.rational(c)?) > 0),
    }
}
