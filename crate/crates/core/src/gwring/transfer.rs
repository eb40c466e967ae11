//! Scharlau transfer along quadratic extensions `k(√α)/k`.

use crate::error::{Error, Result};
use crate::fields::{is_square, FieldDescriptor, FieldElem};
use crate::linalg::Matrix;
use crate::quadform::{diagonalize, GramMatrix};

use super::{gw_add, gw_sub, GWElem};

/// Which `k`-linear functional `k(√α) → k` drives the transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Functional {
    /// `u + v√α ↦ 2u`.
    FieldTrace,
    /// `u + v√α ↦ v`.
    SOne,
}

/// The extension `k(√α)` with a chosen functional. `α` is a non-square of `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadExtension {
    pub base: FieldDescriptor,
    pub alpha: FieldElem,
    pub functional: Functional,
}

impl QuadExtension {
    pub fn new(base: FieldDescriptor, alpha: FieldElem, functional: Functional) -> Result<Self> {
        base.check(&alpha)?;
        if base.is_zero(&alpha) {
            return Err(Error::ZeroElement);
        }
        if is_square(base, &alpha)? {
            return Err(Error::NonSquarefreeExtension);
        }
        Ok(QuadExtension { base, alpha, functional })
    }

    pub fn with_functional(&self, functional: Functional) -> Self {
        QuadExtension { functional, ..self.clone() }
    }

    /// Generator whose transfer is `⟨1,−1⟩` under this functional.
    pub fn hyperbolic_generator(&self) -> ExtElem {
        let k = self.base;
        match self.functional {
            Functional::FieldTrace => ExtElem(k.zero(), k.one()),
            Functional::SOne => ExtElem(k.one(), k.zero()),
        }
    }

    fn apply(&self, x: &ExtElem) -> FieldElem {
        let k = self.base;
        match self.functional {
            Functional::FieldTrace => k.mul(&k.from_int(2), &x.0),
            Functional::SOne => x.1.clone(),
        }
    }

    fn mul(&self, x: &ExtElem, y: &ExtElem) -> ExtElem {
        let k = self.base;
        ExtElem(
            k.add(&k.mul(&x.0, &y.0), &k.mul(&self.alpha, &k.mul(&x.1, &y.1))),
            k.add(&k.mul(&x.0, &y.1), &k.mul(&x.1, &y.0)),
        )
    }
}

/// `u + v√α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtElem(pub FieldElem, pub FieldElem);

/// An element of GW(k(√α)) as formal generator lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtGWElem {
    pub plus: Vec<ExtElem>,
    pub minus: Vec<ExtElem>,
}

impl ExtGWElem {
    pub fn form(plus: Vec<ExtElem>) -> Self {
        ExtGWElem { plus, minus: Vec::new() }
    }

    pub fn rank(&self) -> i64 {
        self.plus.len() as i64 - self.minus.len() as i64
    }
}

/// Transfer of one generator: the binary form `x ↦ s(βx²)` on the basis `{1, √α}`.
fn transfer_generator(ext: &QuadExtension, beta: &ExtElem) -> Result<Vec<FieldElem>> {
    let k = ext.base;
    k.check(&beta.0)?;
    k.check(&beta.1)?;
    if k.is_zero(&beta.0) && k.is_zero(&beta.1) {
        return Err(Error::ZeroElement);
    }
    let root = ExtElem(k.zero(), k.one());
    let b_root = ext.mul(beta, &root);
    let b_alpha = ext.mul(&b_root, &root);
    let g = Matrix::from_rows(vec![
        vec![ext.apply(beta), ext.apply(&b_root)],
        vec![ext.apply(&b_root), ext.apply(&b_alpha)],
    ])?;
    let (d, _) = diagonalize(&GramMatrix::new(k, g)?)?;
    Ok(d.coeffs)
}

/// `s_*` for the extension's own functional; minus-part generators transfer with a minus sign.
pub fn scharlau_transfer(ext: &QuadExtension, x: &ExtGWElem) -> Result<GWElem> {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for b in &x.plus {
        plus.extend(transfer_generator(ext, b)?);
    }
    for b in &x.minus {
        minus.extend(transfer_generator(ext, b)?);
    }
    GWElem::new(ext.base, plus, minus)
}

/// Transfer along the functional `s(1) = 0, s(√α) = 1`, whatever `ext.functional` says.
pub fn transfer_s_one(ext: &QuadExtension, x: &ExtGWElem) -> Result<GWElem> {
    scharlau_transfer(&ext.with_functional(Functional::SOne), x)
}

/// For each probe `φ`, the pair `(s_*(φ), s_*(φ + ⟨h⟩) − ⟨1,−1⟩)` where `h` is the
/// functional's hyperbolic generator; the two agree in GW(k).
pub fn transfer_subgroup_bound(
    ext: &QuadExtension,
    probes: &[ExtGWElem],
) -> Result<Vec<(GWElem, GWElem)>> {
    let h = GWElem::hyperbolic(ext.base, 1);
    probes
        .iter()
        .map(|phi| {
            let direct = scharlau_transfer(ext, phi)?;
            let mut shifted = phi.clone();
            shifted.plus.push(ext.hyperbolic_generator());
            let corrected = gw_sub(&scharlau_transfer(ext, &shifted)?, &h)?;
            Ok((direct, corrected))
        })
        .collect()
}

/// Sum of the transfers of several elements; convenience for additivity checks.
pub fn transfer_sum(ext: &QuadExtension, xs: &[ExtGWElem]) -> Result<GWElem> {
    xs.iter().try_fold(GWElem::zero(ext.base), |acc, x| gw_add(&acc, &scharlau_transfer(ext, x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::gwring::gw_equal;
    use proptest::prelude::*;

    fn q(n: i64) -> FieldElem {
        FieldElem::Rat(int(n))
    }

    fn gen(u: i64, v: i64) -> ExtElem {
        ExtElem(q(u), q(v))
    }

    #[test]
    fn trace_examples_over_dyadic_field() {
        let k = FieldDescriptor::PAdic(2);
        for alpha in [2, -2] {
            let ext = QuadExtension::new(k, q(alpha), Functional::FieldTrace).unwrap();
            let t = scharlau_transfer(&ext, &ExtGWElem::form(vec![gen(1, 0)])).unwrap();
            let expect = GWElem::from_ints(k, &[2, alpha.signum()], &[]).unwrap();
            assert!(gw_equal(&t, &expect).unwrap(), "alpha = {alpha}: {t}");
        }
        let ext = QuadExtension::new(k, q(2), Functional::FieldTrace).unwrap();
        let t = scharlau_transfer(&ext, &ExtGWElem::form(vec![gen(1, 1)])).unwrap();
        assert_eq!(t, GWElem::from_ints(k, &[2, -4], &[]).unwrap());
        assert!(gw_equal(&t, &GWElem::from_ints(k, &[-2, 1], &[]).unwrap()).unwrap());
    }

    #[test]
    fn trace_of_root_is_hyperbolic() {
        for (k, a) in [
            (FieldDescriptor::Rationals, 3),
            (FieldDescriptor::Rationals, -1),
            (FieldDescriptor::PAdic(3), 3),
            (FieldDescriptor::PAdic(5), 2),
            (FieldDescriptor::Reals, -1),
        ] {
            let ext = QuadExtension::new(k, k.from_int(a), Functional::FieldTrace).unwrap();
            let t = scharlau_transfer(&ext, &ExtGWElem::form(vec![ExtElem(k.zero(), k.one())])).unwrap();
            assert!(gw_equal(&t, &GWElem::hyperbolic(k, 1)).unwrap());
        }
    }

    #[test]
    fn s_one_examples() {
        let k = FieldDescriptor::Rationals;
        let ext = QuadExtension::new(k, q(5), Functional::FieldTrace).unwrap();
        let t = transfer_s_one(&ext, &ExtGWElem::form(vec![gen(1, 0)])).unwrap();
        assert!(gw_equal(&t, &GWElem::hyperbolic(k, 1)).unwrap());
        let t = transfer_s_one(&ext, &ExtGWElem::form(vec![gen(0, 1)])).unwrap();
        assert_eq!(t, GWElem::from_ints(k, &[1, 5], &[]).unwrap());

        // s_*(⟨w₁ + √α⟩) = ⟨1, −N(u)·N(v)⟩ with w₁ = (u₁v₁ + αu₂v₂)/(u₁v₂ + u₂v₁)
        let alpha = 5;
        for (u1, u2, v1, v2) in [(1, 1, 2, 1), (3, -1, 1, 2), (2, 3, 5, -1)] {
            let w1 = rat(u1 * v1 + alpha * u2 * v2, u1 * v2 + u2 * v1);
            let x = ExtGWElem::form(vec![ExtElem(FieldElem::Rat(w1), q(1))]);
            let t = transfer_s_one(&ext, &x).unwrap();
            let nu = u1 * u1 - alpha * u2 * u2;
            let nv = v1 * v1 - alpha * v2 * v2;
            let expect = GWElem::from_ints(k, &[1, -nu * nv], &[]).unwrap();
            assert!(gw_equal(&t, &expect).unwrap(), "{t} vs {expect}");
        }
    }

    #[test]
    fn square_alpha_is_rejected() {
        let k = FieldDescriptor::Rationals;
        assert_eq!(
            QuadExtension::new(k, q(4), Functional::SOne),
            Err(Error::NonSquarefreeExtension)
        );
        let k = FieldDescriptor::PAdic(2);
        assert_eq!(
            QuadExtension::new(k, q(17), Functional::SOne),
            Err(Error::NonSquarefreeExtension)
        );
    }

    #[test]
    fn subgroup_bound_identity() {
        let k = FieldDescriptor::PAdic(3);
        for functional in [Functional::SOne, Functional::FieldTrace] {
            let ext = QuadExtension::new(k, q(3), functional).unwrap();
            let probes = vec![
                ExtGWElem::form(vec![gen(1, 0)]),
                ExtGWElem::form(vec![gen(0, 1)]),
                ExtGWElem::form(vec![]),
                ExtGWElem { plus: vec![gen(2, 1)], minus: vec![gen(1, 1)] },
            ];
            for (direct, corrected) in transfer_subgroup_bound(&ext, &probes).unwrap() {
                assert!(gw_equal(&direct, &corrected).unwrap());
            }
            let zero = &transfer_subgroup_bound(&ext, &[ExtGWElem::form(vec![])]).unwrap()[0];
            assert!(gw_equal(&zero.0, &GWElem::zero(k)).unwrap());
        }
    }

    fn arb_gen() -> impl Strategy<Value = (i64, i64)> {
        (-6i64..=6, -6i64..=6).prop_filter("nonzero", |(u, v)| (*u, *v) != (0, 0))
    }

    proptest! {
        #[test]
        fn transfer_is_additive(
            field in 0..3usize,
            alpha in prop_oneof![Just(2i64), Just(3), Just(-1), Just(6)],
            xs in proptest::collection::vec(arb_gen(), 0..3),
            ys in proptest::collection::vec(arb_gen(), 0..3),
            trace in any::<bool>(),
        ) {
            let k = [FieldDescriptor::Rationals, FieldDescriptor::PAdic(5), FieldDescriptor::PAdic(7)][field];
            let functional = if trace { Functional::FieldTrace } else { Functional::SOne };
            let Ok(ext) = QuadExtension::new(k, q(alpha), functional) else { return Ok(()); };
            let x = ExtGWElem::form(xs.iter().map(|&(u, v)| gen(u, v)).collect());
            let y = ExtGWElem { plus: vec![], minus: ys.iter().map(|&(u, v)| gen(u, v)).collect() };
            let both = ExtGWElem { plus: x.plus.clone(), minus: y.minus.clone() };
            let lhs = scharlau_transfer(&ext, &both).unwrap();
            let rhs = transfer_sum(&ext, &[x, y]).unwrap();
            prop_assert!(gw_equal(&lhs, &rhs).unwrap());
        }
    }
}
