use crate::error::{Error, Result};
use crate::fields::{FieldDescriptor, FieldElem};
use crate::linalg::{solve_affine, Matrix};
use crate::quadform::{find_isotropic_vector, hyperbolic_split};

use super::{QuadricProblem, SectionCertificate};

/// The pairing section `(a₂x₂, −a₁x₁, a₄x₄, −a₃x₃, …)` for an even number of variables.
pub fn section_odd(k: FieldDescriptor, a: &[FieldElem]) -> Result<SectionCertificate> {
    let m = a.len();
    if m < 2 {
        return Err(Error::InvalidProblem("need at least two coefficients".into()));
    }
    if m % 2 == 1 {
        return Err(Error::OddCaseOnly(m - 1));
    }
    let mut c = Matrix::zeros(k, m, m);
    for i in (0..m).step_by(2) {
        c.set(i, i + 1, a[i + 1].clone());
        c.set(i + 1, i, k.neg(&a[i]));
    }
    Ok(SectionCertificate::from_matrix(k, &c, None))
}

/// Linear map `y ↦ t(y)` of the section on the model `2y₁y₂ + Σ_{i≥3} cᵢyᵢ²`
/// with an odd number of variables: `(0, c₃y₃, −y₁, c₅y₅, −c₄y₄, …)`.
/// `diag` holds `c₃, c₄, …`.
fn model_section(k: FieldDescriptor, diag: &[FieldElem]) -> Matrix {
    let m = diag.len() + 2;
    debug_assert!(m % 2 == 1);
    let c = |i: usize| &diag[i - 2];
    let mut t = Matrix::zeros(k, m, m);
    t.set(1, 2, c(2).clone());
    t.set(2, 0, k.neg(&k.one()));
    for i in (3..m).step_by(2) {
        t.set(i, i + 1, c(i + 1).clone());
        t.set(i + 1, i, k.neg(c(i)));
    }
    t
}

/// Section for an isotropic form with `n` even, written in the original
/// coordinates as `s(x) = P·t(P⁻¹x)` where `P` splits off a hyperbolic plane.
pub fn section_isotropic(problem: &QuadricProblem, bound: u64) -> Result<SectionCertificate> {
    let k = problem.field;
    let n = problem.n();
    if n % 2 == 1 {
        return Err(Error::InvalidProblem(format!(
            "the hyperbolic-split construction needs even n, got {n}"
        )));
    }
    let q = problem.form();
    let v = find_isotropic_vector(&q, bound)?;
    let p = hyperbolic_split(&q, &v)?;
    let model = Matrix::diagonal(k, &q.coeffs).congruent(k, &p)?;
    let diag: Vec<FieldElem> = (2..q.dim()).map(|i| model.get(i, i).clone()).collect();
    let t = model_section(k, &diag);
    let c = p.mul(k, &t)?.mul(k, &p.inverse(k)?)?;
    Ok(SectionCertificate::from_matrix(k, &c, Some(p)))
}

/// Checks that `s` is tangent (`Σ aᵢxᵢsᵢ ≡ 0`) and has no zero on `q = 1`.
///
/// The zero locus test is sufficient, not necessary: it accepts when
/// `s = 0` is inconsistent, or when `q` is constant and different from 1
/// on the affine solution space.
pub fn verify_section(problem: &QuadricProblem, s: &SectionCertificate) -> Result<bool> {
    let k = problem.field;
    let gram = problem.form().gram().entries;
    verify_against_gram(k, &gram, s)
}

fn verify_against_gram(k: FieldDescriptor, g: &Matrix, s: &SectionCertificate) -> Result<bool> {
    let m = g.rows();
    if s.entries.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "certificate has {} entries, quadric has {m} variables",
            s.entries.len()
        )));
    }
    let mut rows = Vec::with_capacity(m);
    let mut d = Vec::with_capacity(m);
    for e in &s.entries {
        if e.linear.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "certificate entry has {} linear coefficients, expected {m}",
                e.linear.len()
            )));
        }
        k.check(&e.constant)?;
        for c in &e.linear {
            k.check(c)?;
        }
        rows.push(e.linear.clone());
        d.push(e.constant.clone());
    }
    let c = Matrix::from_rows(rows)?;

    // xᵀG(d + Cx) ≡ 0  ⇔  Gd = 0 and GC is alternating
    if g.mul_vec(k, &d).iter().any(|x| !k.is_zero(x)) {
        return Ok(false);
    }
    let h = g.mul(k, &c)?;
    for i in 0..m {
        for j in i..m {
            if !k.is_zero(&k.add(h.get(i, j), h.get(j, i))) {
                return Ok(false);
            }
        }
    }

    let neg_d: Vec<FieldElem> = d.iter().map(|x| k.neg(x)).collect();
    let Some((x0, kernel)) = solve_affine(k, &c, &neg_d)? else {
        return Ok(true);
    };
    let b = |u: &[FieldElem], v: &[FieldElem]| -> FieldElem {
        let gv = g.mul_vec(k, v);
        u.iter()
            .zip(&gv)
            .fold(k.zero(), |acc, (a, b)| k.add(&acc, &k.mul(a, b)))
    };
    for (i, ni) in kernel.iter().enumerate() {
        if !k.is_zero(&b(&x0, ni)) {
            return Ok(false);
        }
        for nj in &kernel[i..] {
            if !k.is_zero(&b(ni, nj)) {
                return Ok(false);
            }
        }
    }
    Ok(b(&x0, &x0) != k.one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;
    use crate::hedgehog::LinearPoly;

    fn q(n: i64) -> FieldElem {
        FieldElem::Rat(int(n))
    }

    fn lin(k: FieldDescriptor, m: usize, terms: &[(usize, FieldElem)]) -> LinearPoly {
        let mut v = vec![k.zero(); m];
        for (i, c) in terms {
            v[*i] = c.clone();
        }
        LinearPoly::homogeneous(k, v)
    }

    #[test]
    fn odd_pairing_examples() {
        let k = FieldDescriptor::Rationals;
        let a = vec![q(3), q(-5)];
        let s = section_odd(k, &a).unwrap();
        assert_eq!(s.entries, vec![lin(k, 2, &[(1, q(-5))]), lin(k, 2, &[(0, q(-3))])]);
        let p = QuadricProblem::new(k, a, None).unwrap();
        assert!(verify_section(&p, &s).unwrap());

        let s = section_odd(k, &[q(1), q(1), q(1), q(1)]).unwrap();
        assert_eq!(
            s.entries,
            vec![
                lin(k, 4, &[(1, q(1))]),
                lin(k, 4, &[(0, q(-1))]),
                lin(k, 4, &[(3, q(1))]),
                lin(k, 4, &[(2, q(-1))]),
            ]
        );
        assert_eq!(section_odd(k, &[q(1), q(1), q(1)]), Err(Error::OddCaseOnly(2)));
    }

    #[test]
    fn model_form_section() {
        let k = FieldDescriptor::Rationals;
        let a3 = q(7);
        let g = Matrix::from_rows(vec![
            vec![q(0), q(1), q(0)],
            vec![q(1), q(0), q(0)],
            vec![q(0), q(0), a3.clone()],
        ])
        .unwrap();
        let t = model_section(k, &[a3.clone()]);
        let s = SectionCertificate::from_matrix(k, &t, None);
        assert_eq!(
            s.entries,
            vec![lin(k, 3, &[]), lin(k, 3, &[(2, a3.clone())]), lin(k, 3, &[(0, q(-1))])]
        );
        assert!(verify_against_gram(k, &g, &s).unwrap());

        // (0, a₃x₃, x₁) leaves 2a₃x₁x₃ in the tangency identity
        let tampered = SectionCertificate {
            entries: vec![lin(k, 3, &[]), lin(k, 3, &[(2, a3)]), lin(k, 3, &[(0, q(1))])],
            basis_change: None,
        };
        assert!(!verify_against_gram(k, &g, &tampered).unwrap());
    }

    #[test]
    fn isotropic_section_end_to_end() {
        let k = FieldDescriptor::Rationals;
        let p = QuadricProblem::from_ints(k, &[1, 1, -2]).unwrap();
        let s = section_isotropic(&p, 100).unwrap();
        assert!(s.basis_change.is_some());
        assert!(verify_section(&p, &s).unwrap());

        let p = QuadricProblem::from_ints(k, &[1, 1, 1]).unwrap();
        assert_eq!(section_isotropic(&p, 100), Err(Error::NotIsotropic));

        for (field, coeffs) in [
            (FieldDescriptor::FinitePrime(3), vec![1, 1, 1]),
            (FieldDescriptor::FinitePrime(7), vec![3, 5, 6, 1, 2]),
            (FieldDescriptor::PAdic(5), vec![1, 3, -4]),
            (FieldDescriptor::Rationals, vec![2, 3, -5, 7, -1]),
            (FieldDescriptor::Reals, vec![2, -8, 5]),
        ] {
            let p = QuadricProblem::from_ints(field, &coeffs).unwrap();
            let s = section_isotropic(&p, 200).unwrap();
            assert!(verify_section(&p, &s).unwrap(), "{field} {coeffs:?}");
        }
    }

    #[test]
    fn verify_rejects_bad_certificates() {
        let k = FieldDescriptor::Rationals;
        let p = QuadricProblem::from_ints(k, &[1, 1]).unwrap();
        // tangent but vanishing identically
        let zero = SectionCertificate {
            entries: vec![lin(k, 2, &[]), lin(k, 2, &[])],
            basis_change: None,
        };
        assert!(!verify_section(&p, &zero).unwrap());
        // nonzero constant breaks tangency
        let mut c = zero.clone();
        c.entries[0].constant = q(1);
        assert!(!verify_section(&p, &c).unwrap());
        let short = SectionCertificate {
            entries: vec![lin(k, 2, &[])],
            basis_change: None,
        };
        assert!(verify_section(&p, &short).is_err());
    }
}
