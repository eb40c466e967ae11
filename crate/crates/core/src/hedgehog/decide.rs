use crate::error::{Error, Result};
use crate::fields::{level, FieldDescriptor};
use crate::quadform::is_isotropic;

use super::points::{has_rational_point, in_value_group_squared, PointStatus};
use super::section::{section_isotropic, section_odd};
use super::{tags, Decision, Obstruction, QuadricProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    /// Height bound for isotropic-vector searches.
    pub search_bound: u64,
    /// Answer all-ones problems from the level alone.
    pub sphere_fast_path: bool,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            search_bound: 1000,
            sphere_fast_path: true,
        }
    }
}

/// Verdict for the sphere `x₁² + ⋯ + x_{n+1}² = 1`: a section exists iff
/// `n` is odd or `s(k) ≤ 2n+1`.
pub fn sphere_decision(k: FieldDescriptor, n: usize) -> Result<Decision> {
    let k = k.validate()?;
    if n == 0 {
        return Err(Error::InvalidProblem("sphere dimension must be at least 1".into()));
    }
    if n % 2 == 1 {
        let cert = section_odd(k, &vec![k.one(); n + 1])?;
        return Ok(Decision::exists(tags::ODD_PAIRING, Some(cert)));
    }
    let bound = 2 * n as u32 + 1;
    let s = level(k);
    Ok(if s.at_most(bound) {
        Decision::exists(tags::SPHERE_LEVEL, None)
    } else {
        Decision::none(tags::SPHERE_LEVEL, Obstruction::LevelTooLarge { level: s, bound })
    })
}

pub fn decide_section(problem: &QuadricProblem) -> Result<Decision> {
    decide_section_with(problem, &DecideOptions::default())
}

/// Routes a problem through the explicit constructions first, then the
/// invariant criteria. Unsupported operations and resource limits degrade
/// to `Unknown` with a diagnostic.
pub fn decide_section_with(problem: &QuadricProblem, options: &DecideOptions) -> Result<Decision> {
    let mut notes = Vec::new();
    match route(problem, options, &mut notes) {
        Ok(mut d) => {
            notes.append(&mut d.diagnostics);
            d.diagnostics = notes;
            Ok(d)
        }
        Err(e) if degrades(&e) => {
            notes.push(format!("{}: {e}", e.kind()));
            Ok(Decision::unknown(notes))
        }
        Err(e) => Err(e),
    }
}

fn degrades(e: &Error) -> bool {
    e.is_resource_limit() || matches!(e, Error::UnsupportedField(_))
}

fn route(problem: &QuadricProblem, options: &DecideOptions, notes: &mut Vec<String>) -> Result<Decision> {
    let k = problem.field;
    let n = problem.n();
    let q = problem.form();

    if n % 2 == 1 {
        return Ok(Decision::exists(tags::ODD_PAIRING, Some(section_odd(k, &problem.coeffs)?)));
    }

    match is_isotropic(&q) {
        Ok(true) => {
            return match section_isotropic(problem, options.search_bound) {
                Ok(cert) => Ok(Decision::exists(tags::ISOTROPIC_SPLIT, Some(cert))),
                Err(Error::SearchExhausted { bound }) => {
                    let mut d = Decision::exists(tags::ISOTROPIC_SPLIT, None);
                    d.diagnostics.push(format!(
                        "form is isotropic but no isotropic vector of height <= {bound} was found; no certificate"
                    ));
                    Ok(d)
                }
                Err(e) => Err(e),
            };
        }
        Ok(false) => {}
        Err(e) if degrades(&e) => notes.push(format!("isotropy undecided ({}): {e}", e.kind())),
        Err(e) => return Err(e),
    }

    if options.sphere_fast_path && problem.coeffs.iter().all(|a| *a == k.one()) {
        return sphere_decision(k, n);
    }

    let point = has_rational_point(problem)?;
    if let PointStatus::Yes(_) = point {
        match k {
            FieldDescriptor::QuadraticallyClosed
            | FieldDescriptor::FinitePrime(_)
            | FieldDescriptor::PAdic(_) => {
                return Ok(Decision::exists(tags::COHOMOLOGICAL_DIMENSION_TWO, None));
            }
            FieldDescriptor::Reals | FieldDescriptor::Rationals | FieldDescriptor::RealQuadratic(_) => {
                return embedding_signs(problem);
            }
        }
    }
    if point == PointStatus::Unknown {
        notes.push(format!("rational point on the quadric undecided over {k}; supply one to use the embedding test"));
    }

    let minus_prod = k.neg(&k.product(&problem.coeffs));
    match in_value_group_squared(&q, &minus_prod)? {
        Some(false) => Ok(Decision::none(
            tags::NECESSARY_CONDITION,
            Obstruction::NecessaryConditionFails,
        )),
        Some(true) => {
            let mut d = Decision::unknown(vec![
                "n is even, the form is anisotropic and the quadric has no point over the base field".into(),
                "-(a_1 * ... * a_{n+1}) lies in the group generated by products of two represented values, \
                 so the necessary condition holds and no criterion decides this case"
                    .into(),
            ]);
            if point == PointStatus::Unknown {
                d.diagnostics[0] = "n is even and no point on the quadric is known".into();
            }
            d.citations.push(tags::NECESSARY_CONDITION.to_string());
            Ok(d)
        }
        None => Ok(Decision::unknown(vec![format!(
            "necessary condition -(a_1 * ... * a_{{n+1}}) in [D(q)^2] is undecided over {k}"
        )])),
    }
}

/// With a point on the quadric: a section exists iff every real embedding
/// makes some coefficient negative.
fn embedding_signs(problem: &QuadricProblem) -> Result<Decision> {
    let k = problem.field;
    let signs = problem
        .coeffs
        .iter()
        .map(|a| k.embedding_signs(a))
        .collect::<Result<Vec<_>>>()?;
    let embeddings = signs.first().map_or(0, Vec::len);
    let all_covered = (0..embeddings).all(|e| signs.iter().any(|s| s[e] < 0));
    let mut d = if all_covered {
        Decision::exists(tags::REAL_EMBEDDING_SIGNS, None)
    } else {
        Decision::none(tags::REAL_EMBEDDING_SIGNS, Obstruction::AllEmbeddingsPositive)
    };
    d.citations.push(tags::POINT_CRITERION.to_string());
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::least_non_residue;
    use crate::fields::Level;
    use crate::hedgehog::{verify_section, Verdict};
    use proptest::prelude::*;

    fn decide(k: FieldDescriptor, a: &[i64]) -> Decision {
        decide_section(&QuadricProblem::from_ints(k, a).unwrap()).unwrap()
    }

    #[test]
    fn sphere_examples() {
        let d = sphere_decision(FieldDescriptor::PAdic(2), 2).unwrap();
        assert_eq!(d.verdict, Verdict::SectionExists);
        let d = sphere_decision(FieldDescriptor::Rationals, 2).unwrap();
        assert_eq!(d.verdict, Verdict::NoSection);
        assert_eq!(
            d.obstruction,
            Some(Obstruction::LevelTooLarge {
                level: Level::Infinite,
                bound: 5
            })
        );
        for k in [FieldDescriptor::Reals, FieldDescriptor::Rationals, FieldDescriptor::PAdic(3)] {
            let d = sphere_decision(k, 7).unwrap();
            assert_eq!(d.verdict, Verdict::SectionExists);
            assert!(d.certificate.is_some());
        }
        assert!(sphere_decision(FieldDescriptor::Reals, 0).is_err());
    }

    #[test]
    fn decision_examples() {
        let d = decide(FieldDescriptor::PAdic(2), &[1, 1, 1]);
        assert_eq!(d.verdict, Verdict::SectionExists);
        assert!(d.certificate.is_none());
        assert_eq!(d.citations, vec![tags::SPHERE_LEVEL.to_string()]);

        assert_eq!(decide(FieldDescriptor::Reals, &[1, 1, 1]).verdict, Verdict::NoSection);
        assert_eq!(decide(FieldDescriptor::Rationals, &[1, 1, 1]).verdict, Verdict::NoSection);

        for p in [3u64, 5, 7, 11] {
            let u = least_non_residue(p) as i64;
            let pi = p as i64;
            let d = decide(FieldDescriptor::PAdic(p), &[u, pi, -u * pi]);
            assert_eq!(d.verdict, Verdict::Unknown, "p={p}");
            assert!(!d.diagnostics.is_empty());
        }

        let k = FieldDescriptor::FinitePrime(3);
        let p = QuadricProblem::from_ints(k, &[1, 1, 1]).unwrap();
        let d = decide_section(&p).unwrap();
        assert_eq!(d.verdict, Verdict::SectionExists);
        assert!(verify_section(&p, d.certificate.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn rational_embedding_route() {
        // ⟨1,1,−3⟩ is anisotropic over ℚ (3 is not a sum of two squares)
        // yet 1 is represented, so the sign test applies
        let d = decide(FieldDescriptor::Rationals, &[1, 1, -3]);
        assert_eq!(d.verdict, Verdict::SectionExists);
        assert_eq!(d.citations[0], tags::REAL_EMBEDDING_SIGNS);
        let d = decide(FieldDescriptor::Rationals, &[1, 2, 5]);
        assert_eq!(d.verdict, Verdict::NoSection);
        assert_eq!(d.obstruction, Some(Obstruction::AllEmbeddingsPositive));
        // negative definite: no point, condition −∏a = 1 holds
        assert_eq!(decide(FieldDescriptor::Rationals, &[-1, -2, -5]).verdict, Verdict::Unknown);
    }

    #[test]
    fn real_quadratic_needs_point() {
        let k = FieldDescriptor::RealQuadratic(2);
        let p = QuadricProblem::from_ints(k, &[1, 3, -1]).unwrap();
        let d = decide_section(&p).unwrap();
        assert_eq!(d.verdict, Verdict::Unknown);
        assert!(d.diagnostics.iter().any(|s| s.contains("UnsupportedField")));

        let p = QuadricProblem::new(k, p.coeffs.clone(), Some(vec![k.one(), k.zero(), k.zero()])).unwrap();
        assert_eq!(decide_section(&p).unwrap().verdict, Verdict::SectionExists);

        // 1 + √2 and 1 − √2 have opposite signs under the two embeddings
        let a = crate::fields::FieldElem::Quad(crate::exactnum::int(1), crate::exactnum::int(1));
        let b = crate::fields::FieldElem::Quad(crate::exactnum::int(1), crate::exactnum::int(-1));
        let p = QuadricProblem::new(k, vec![k.one(), a, b], Some(vec![k.one(), k.zero(), k.zero()])).unwrap();
        assert_eq!(decide_section(&p).unwrap().verdict, Verdict::SectionExists);
        let p = QuadricProblem::new(
            k,
            vec![k.one(), k.from_int(2), k.from_int(3)],
            Some(vec![k.one(), k.zero(), k.zero()]),
        )
        .unwrap();
        let d = decide_section(&p).unwrap();
        assert_eq!(d.verdict, Verdict::NoSection);
    }

    #[test]
    fn sphere_route_matches_general_route() {
        let general = DecideOptions {
            sphere_fast_path: false,
            ..DecideOptions::default()
        };
        for k in [
            FieldDescriptor::Reals,
            FieldDescriptor::FinitePrime(3),
            FieldDescriptor::FinitePrime(5),
            FieldDescriptor::FinitePrime(7),
            FieldDescriptor::PAdic(2),
            FieldDescriptor::PAdic(3),
            FieldDescriptor::PAdic(5),
        ] {
            for n in 1..=8usize {
                let p = QuadricProblem::from_ints(k, &vec![1; n + 1]).unwrap();
                let fast = decide_section(&p).unwrap();
                let slow = decide_section_with(&p, &general).unwrap();
                assert_eq!(fast.verdict, slow.verdict, "{k} n={n}");
                assert_eq!(fast.verdict, sphere_decision(k, n).unwrap().verdict, "{k} n={n}");
            }
        }
    }

    #[test]
    fn necessary_condition_matches_point_criterion() {
        // with a point, −∏aᵢ ∈ [D(q)²] ⇔ −1 ∈ [D(q)]
        use crate::fields::square_class_group;
        use crate::hedgehog::in_value_group_squared;
        use crate::quadform::{value_group, DiagonalForm};
        for k in [
            FieldDescriptor::FinitePrime(3),
            FieldDescriptor::FinitePrime(7),
            FieldDescriptor::PAdic(2),
            FieldDescriptor::PAdic(3),
            FieldDescriptor::PAdic(5),
        ] {
            let reps: Vec<_> = square_class_group(k).unwrap().iter().map(|c| c.rep_elem()).collect();
            for a in &reps {
                for b in &reps {
                    for c in &reps {
                        let form = DiagonalForm::new(k, vec![a.clone(), b.clone(), c.clone()]).unwrap();
                        let p = QuadricProblem::new(k, form.coeffs.clone(), None).unwrap();
                        if !matches!(has_rational_point(&p).unwrap(), PointStatus::Yes(_)) {
                            continue;
                        }
                        let minus_prod = k.neg(&k.product(&form.coeffs));
                        let necessary = in_value_group_squared(&form, &minus_prod).unwrap().unwrap();
                        let minus_one = value_group(&form).unwrap().contains_elem(&k.from_int(-1)).unwrap();
                        assert_eq!(necessary, minus_one, "{k} {form}");
                    }
                }
            }
        }
    }

    fn field_strategy() -> impl Strategy<Value = FieldDescriptor> {
        prop_oneof![
            Just(FieldDescriptor::Rationals),
            Just(FieldDescriptor::Reals),
            Just(FieldDescriptor::FinitePrime(5)),
            Just(FieldDescriptor::FinitePrime(11)),
            Just(FieldDescriptor::PAdic(2)),
            Just(FieldDescriptor::PAdic(3)),
        ]
    }

    fn coeff() -> impl Strategy<Value = i64> {
        (-9i64..=9).prop_filter("nonzero", |x| *x != 0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn parity_totality_and_soundness(
            k in field_strategy(),
            a in (1usize..=6).prop_flat_map(|n| proptest::collection::vec(coeff(), n + 1)),
        ) {
            let Ok(p) = QuadricProblem::from_ints(k, &a) else { return Ok(()) };
            let d = decide_section(&p).unwrap();
            if p.n() % 2 == 1 {
                prop_assert_eq!(d.verdict, Verdict::SectionExists);
                prop_assert!(d.certificate.is_some());
            }
            if k == FieldDescriptor::Reals && d.verdict == Verdict::NoSection {
                prop_assert!(a.iter().all(|&x| x > 0));
            }
            if d.verdict == Verdict::SectionExists {
                prop_assert!(d.certificate.is_some() || !d.citations.is_empty());
            }
            if let Some(c) = &d.certificate {
                prop_assert!(verify_section(&p, c).unwrap());
            }
        }
    }
}
