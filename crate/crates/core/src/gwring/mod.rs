//! Grothendieck–Witt ring arithmetic.
//!
//! Elements are formal differences of diagonal forms. There is no normal
//! form: equality is decided by comparing complete classical invariants.

mod transfer;
mod witt;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::exactnum::{relevant_primes, sign_of, Rat};
use crate::fields::{hilbert_symbol, square_class, FieldDescriptor, FieldElem, Place, SquareClass};
use crate::quadform::DiagonalForm;

pub use transfer::{
    scharlau_transfer, transfer_s_one, transfer_subgroup_bound, transfer_sum, ExtElem, ExtGWElem, Functional,
    QuadExtension,
};
pub use witt::{
    ideal_membership, ideal_membership_report, quotient_by_even_ideal, witt_classes, witt_reduce,
    MembershipReport, QuotientReport, WittClass,
};

/// `Σ⟨plus⟩ − Σ⟨minus⟩` in GW(k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GWElem {
    pub field: FieldDescriptor,
    pub plus: Vec<FieldElem>,
    pub minus: Vec<FieldElem>,
}

impl GWElem {
    pub fn new(field: FieldDescriptor, plus: Vec<FieldElem>, minus: Vec<FieldElem>) -> Result<Self> {
        for x in plus.iter().chain(&minus) {
            field.check(x)?;
            if field.is_zero(x) {
                return Err(Error::ZeroElement);
            }
        }
        Ok(GWElem { field, plus, minus })
    }

    pub fn zero(field: FieldDescriptor) -> Self {
        GWElem {
            field,
            plus: Vec::new(),
            minus: Vec::new(),
        }
    }

    /// The honest form `⟨a₁,…,a_m⟩`.
    pub fn form(field: FieldDescriptor, coeffs: Vec<FieldElem>) -> Result<Self> {
        Self::new(field, coeffs, Vec::new())
    }

    pub fn from_ints(field: FieldDescriptor, plus: &[i64], minus: &[i64]) -> Result<Self> {
        Self::new(
            field,
            plus.iter().map(|&c| field.from_int(c)).collect(),
            minus.iter().map(|&c| field.from_int(c)).collect(),
        )
    }

    pub fn from_diagonal(q: &DiagonalForm) -> Self {
        GWElem {
            field: q.field,
            plus: q.coeffs.clone(),
            minus: Vec::new(),
        }
    }

    /// `m·⟨1,−1⟩` for any integer `m`.
    pub fn hyperbolic(field: FieldDescriptor, m: i64) -> Self {
        let h = vec![field.one(), field.from_int(-1)];
        let copies: Vec<FieldElem> = h.iter().cycle().take(2 * m.unsigned_abs() as usize).cloned().collect();
        if m >= 0 {
            GWElem { field, plus: copies, minus: Vec::new() }
        } else {
            GWElem { field, plus: Vec::new(), minus: copies }
        }
    }

    pub fn rank(&self) -> i64 {
        self.plus.len() as i64 - self.minus.len() as i64
    }
}

impl fmt::Display for GWElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |xs: &[FieldElem]| -> String {
            xs.iter()
                .map(|x| match x {
                    FieldElem::Rat(r) => r.to_string(),
                    FieldElem::Residue(r) => r.to_string(),
                    FieldElem::Quad(u, v) => format!("{u}+{v}*sqrt(d)"),
                })
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(f, "<{}>", show(&self.plus))?;
        if !self.minus.is_empty() {
            write!(f, " - <{}>", show(&self.minus))?;
        }
        Ok(())
    }
}

fn same_field(x: &GWElem, y: &GWElem) -> Result<FieldDescriptor> {
    if x.field != y.field {
        return Err(Error::FieldMismatch);
    }
    Ok(x.field)
}

pub fn gw_add(x: &GWElem, y: &GWElem) -> Result<GWElem> {
    let field = same_field(x, y)?;
    Ok(GWElem {
        field,
        plus: x.plus.iter().chain(&y.plus).cloned().collect(),
        minus: x.minus.iter().chain(&y.minus).cloned().collect(),
    })
}

pub fn gw_neg(x: &GWElem) -> GWElem {
    GWElem {
        field: x.field,
        plus: x.minus.clone(),
        minus: x.plus.clone(),
    }
}

pub fn gw_sub(x: &GWElem, y: &GWElem) -> Result<GWElem> {
    gw_add(x, &gw_neg(y))
}

pub fn gw_mul(x: &GWElem, y: &GWElem) -> Result<GWElem> {
    let k = same_field(x, y)?;
    let prod = |a: &[FieldElem], b: &[FieldElem]| -> Vec<FieldElem> {
        a.iter().flat_map(|u| b.iter().map(move |v| k.mul(u, v))).collect()
    };
    let mut plus = prod(&x.plus, &y.plus);
    plus.extend(prod(&x.minus, &y.minus));
    let mut minus = prod(&x.plus, &y.minus);
    minus.extend(prod(&x.minus, &y.plus));
    Ok(GWElem { field: k, plus, minus })
}

/// `⟨c⟩·x`.
pub fn gw_scale(c: &FieldElem, x: &GWElem) -> Result<GWElem> {
    gw_mul(&GWElem::form(x.field, vec![c.clone()])?, x)
}

/// Classical invariants of a GW element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GWInvariants {
    pub rank: i64,
    /// Determinant class, minus-part generators inverted. `None` over ℚ(√d).
    pub disc: Option<SquareClass>,
    /// `(−1)^{r(r−1)/2}·disc`.
    pub signed_disc: Option<SquareClass>,
    /// Hasse–Witt invariant `∏_{i<j}(aᵢ,aⱼ)_v` per place, extended to differences by the cocycle rule.
    pub hasse: BTreeMap<Place, i8>,
    /// One signature per real embedding.
    pub signature: Vec<i64>,
}

/// `(−1)^{r(r−1)/2}` as a sign.
pub fn signed_disc_sign(rank: i64) -> i64 {
    if matches!(rank.rem_euclid(4), 2 | 3) {
        -1
    } else {
        1
    }
}

fn disc_class(x: &GWElem) -> Result<SquareClass> {
    let k = x.field;
    let d = k.product(x.plus.iter().chain(&x.minus));
    square_class(k, &d)
}

fn hasse_of_list(place: Place, a: &[Rat]) -> Result<i8> {
    let mut c = 1;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            c *= hilbert_symbol(place, &a[i], &a[j])?;
        }
    }
    Ok(c)
}

/// Hasse–Witt invariant at `place`; `c(P − M) = c(P)·c(M)·(dP, dM)·(dM, dM)`.
pub fn hasse_at(x: &GWElem, place: Place) -> Result<i8> {
    let k = x.field;
    let p: Vec<Rat> = x.plus.iter().map(|a| k.rational(a)).collect::<Result<_>>()?;
    let m: Vec<Rat> = x.minus.iter().map(|a| k.rational(a)).collect::<Result<_>>()?;
    let dp: Rat = p.iter().product();
    let dm: Rat = m.iter().product();
    Ok(hasse_of_list(place, &p)?
        * hasse_of_list(place, &m)?
        * hilbert_symbol(place, &dp, &dm)?
        * hilbert_symbol(place, &dm, &dm)?)
}

fn local_places(x: &GWElem) -> Result<Vec<Place>> {
    Ok(match x.field {
        FieldDescriptor::PAdic(p) => vec![Place::Prime(p)],
        FieldDescriptor::Reals => vec![Place::Real],
        FieldDescriptor::Rationals => {
            let vals: Vec<Rat> = x
                .plus
                .iter()
                .chain(&x.minus)
                .map(|a| x.field.rational(a))
                .collect::<Result<_>>()?;
            std::iter::once(Place::Real)
                .chain(relevant_primes(&vals)?.into_iter().map(Place::Prime))
                .collect()
        }
        _ => Vec::new(),
    })
}

fn signatures(x: &GWElem) -> Result<Vec<i64>> {
    let k = x.field;
    let count = crate::fields::real_embedding_count(k);
    let mut sig = vec![0i64; count];
    for (list, s) in [(&x.plus, 1i64), (&x.minus, -1i64)] {
        for a in list {
            let signs = match k {
                FieldDescriptor::Rationals | FieldDescriptor::Reals => vec![sign_of(&k.rational(a)?)],
                _ => k.embedding_signs(a)?,
            };
            for (acc, e) in sig.iter_mut().zip(signs) {
                *acc += s * i64::from(e);
            }
        }
    }
    Ok(sig)
}

pub fn invariants_of(x: &GWElem) -> Result<GWInvariants> {
    let k = x.field;
    let rank = x.rank();
    let signature = signatures(x)?;
    if let FieldDescriptor::RealQuadratic(_) = k {
        return Ok(GWInvariants {
            rank,
            disc: None,
            signed_disc: None,
            hasse: BTreeMap::new(),
            signature,
        });
    }
    let disc = disc_class(x)?;
    let sign = k.from_int(signed_disc_sign(rank));
    let signed_disc = square_class(k, &k.mul(&sign, &disc.rep_elem()))?;
    let mut hasse = BTreeMap::new();
    for place in local_places(x)? {
        hasse.insert(place, hasse_at(x, place)?);
    }
    Ok(GWInvariants {
        rank,
        disc: Some(disc),
        signed_disc: Some(signed_disc),
        hasse,
        signature,
    })
}

/// Signed discriminant class `δ±(x)`.
pub fn signed_discriminant(x: &GWElem) -> Result<SquareClass> {
    invariants_of(x)?
        .signed_disc
        .ok_or_else(|| Error::UnsupportedField(format!("discriminants over {}", x.field)))
}

/// Equality in GW(k) via complete invariants.
pub fn gw_equal(x: &GWElem, y: &GWElem) -> Result<bool> {
    let k = same_field(x, y)?;
    if x.rank() != y.rank() {
        return Ok(false);
    }
    match k {
        FieldDescriptor::QuadraticallyClosed => Ok(true),
        FieldDescriptor::Reals => Ok(signatures(x)? == signatures(y)?),
        FieldDescriptor::FinitePrime(_) => Ok(disc_class(x)? == disc_class(y)?),
        FieldDescriptor::PAdic(p) => Ok(disc_class(x)? == disc_class(y)?
            && hasse_at(x, Place::Prime(p))? == hasse_at(y, Place::Prime(p))?),
        FieldDescriptor::Rationals => {
            if signatures(x)? != signatures(y)? || disc_class(x)? != disc_class(y)? {
                return Ok(false);
            }
            let places: BTreeSet<Place> = local_places(x)?.into_iter().chain(local_places(y)?).collect();
            for place in places {
                if hasse_at(x, place)? != hasse_at(y, place)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        FieldDescriptor::RealQuadratic(_) => {
            Err(Error::UnsupportedField(format!("GW equality over {k}")))
        }
    }
}

/// `n/2·⟨1,−1⟩ + ⟨2, 2·∏aᵢ⟩` for even `n > 0` and `n + 1` coefficients.
pub fn euler_characteristic(k: FieldDescriptor, n: usize, a: &[FieldElem]) -> Result<GWElem> {
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    if n == 0 {
        return Err(Error::InvalidProblem("dimension must be positive".into()));
    }
    if a.len() != n + 1 {
        return Err(Error::DimensionMismatch(format!("{} coefficients for n = {n}", a.len())));
    }
    for x in a {
        k.check(x)?;
        if k.is_zero(x) {
            return Err(Error::ZeroElement);
        }
    }
    let two = k.from_int(2);
    let tail = GWElem::form(k, vec![two.clone(), k.mul(&two, &k.product(a))])?;
    gw_add(&GWElem::hyperbolic(k, (n / 2) as i64), &tail)
}

/// The unit `⟨1⟩`.
pub fn gw_one(k: FieldDescriptor) -> GWElem {
    GWElem {
        field: k,
        plus: vec![k.one()],
        minus: Vec::new(),
    }
}
