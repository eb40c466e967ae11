//! Base fields, their elements, square classes, Hilbert symbols and levels.
//!
//! Elements of ℝ, ℚ_p and quadratically closed fields are always rational
//! literals read inside the field, so every predicate is exactly decidable.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{
    self, factor_bound, is_prime_u64, is_rational_square, least_non_residue, legendre, legendre_u64,
    mod_u64, sign_of, squarefree_part, valuation, Rat,
};

/// Which base field a computation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldDescriptor {
    Rationals,
    Reals,
    QuadraticallyClosed,
    /// 𝔽_p, `p` an odd prime.
    FinitePrime(u64),
    /// ℚ_p, `p` any prime.
    PAdic(u64),
    /// ℚ(√d), `d > 1` squarefree.
    RealQuadratic(i64),
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rationals => write!(f, "Q"),
            FieldDescriptor::Reals => write!(f, "R"),
            FieldDescriptor::QuadraticallyClosed => write!(f, "quadratically closed field"),
            FieldDescriptor::FinitePrime(p) => write!(f, "F_{p}"),
            FieldDescriptor::PAdic(p) => write!(f, "Q_{p}"),
            FieldDescriptor::RealQuadratic(d) => write!(f, "Q(sqrt({d}))"),
        }
    }
}

/// An element of a field described by [`FieldDescriptor`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldElem {
    /// A rational literal (ℚ, ℝ, ℚ_p, quadratically closed).
    Rat(Rat),
    /// Residue in `[0, p)` for 𝔽_p.
    Residue(u64),
    /// `u + v·√d` for ℚ(√d).
    Quad(Rat, Rat),
}

impl FieldElem {
    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            FieldElem::Rat(r) => Some(r),
            _ => None,
        }
    }
}

impl FieldDescriptor {
    /// Checks the structural invariants (odd prime, squarefree `d > 1`, ...).
    pub fn validate(self) -> Result<Self> {
        match self {
            FieldDescriptor::FinitePrime(p) if !(p > 2 && is_prime_u64(p)) => Err(
                Error::InvalidField(format!("F_p needs an odd prime, got {p}")),
            ),
            FieldDescriptor::PAdic(p) if !is_prime_u64(p) => {
                Err(Error::InvalidField(format!("Q_p needs a prime, got {p}")))
            }
            FieldDescriptor::RealQuadratic(d) => {
                let ok = d > 1
                    && squarefree_part(&exactnum::int(d), factor_bound())
                        .map(|s| s == BigInt::from(d))
                        .unwrap_or(false);
                if ok {
                    Ok(self)
                } else {
                    Err(Error::InvalidField(format!(
                        "real quadratic field needs squarefree d > 1, got {d}"
                    )))
                }
            }
            _ => Ok(self),
        }
    }

    /// True for the kinds whose square-class group is finite.
    pub fn has_finite_square_classes(self) -> bool {
        !matches!(
            self,
            FieldDescriptor::Rationals | FieldDescriptor::RealQuadratic(_)
        )
    }

    /// Embeds a rational number. Fails over 𝔽_p when `p` divides the denominator.
    pub fn from_rat(self, r: &Rat) -> Result<FieldElem> {
        match self {
            FieldDescriptor::FinitePrime(p) => {
                let n = mod_u64(r.numer(), p);
                let d = mod_u64(r.denom(), p);
                let dinv = exactnum::inv_mod(d, p).ok_or_else(|| {
                    Error::InvalidElement(format!("denominator of {r} vanishes mod {p}"))
                })?;
                Ok(FieldElem::Residue(exactnum::mul_mod(n, dinv, p)))
            }
            FieldDescriptor::RealQuadratic(_) => Ok(FieldElem::Quad(r.clone(), Rat::zero())),
            _ => Ok(FieldElem::Rat(r.clone())),
        }
    }

    pub fn from_int(self, n: i64) -> FieldElem {
        self.from_rat(&exactnum::int(n)).expect("integers embed in every field")
    }

    pub fn zero(self) -> FieldElem {
        self.from_int(0)
    }

    pub fn one(self) -> FieldElem {
        self.from_int(1)
    }

    /// Checks that `x` has the shape this field expects.
    pub fn check(self, x: &FieldElem) -> Result<()> {
        let ok = match (self, x) {
            (FieldDescriptor::FinitePrime(p), FieldElem::Residue(r)) => *r < p,
            (FieldDescriptor::RealQuadratic(_), FieldElem::Quad(..)) => true,
            (FieldDescriptor::FinitePrime(_), _) | (FieldDescriptor::RealQuadratic(_), _) => false,
            (_, FieldElem::Rat(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn is_zero(self, x: &FieldElem) -> bool {
        match x {
            FieldElem::Rat(r) => r.is_zero(),
            FieldElem::Residue(r) => *r == 0,
            FieldElem::Quad(u, v) => u.is_zero() && v.is_zero(),
        }
    }

    pub fn add(self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        match (a, b) {
            (FieldElem::Rat(x), FieldElem::Rat(y)) => FieldElem::Rat(x + y),
            (FieldElem::Residue(x), FieldElem::Residue(y)) => {
                let p = self.modulus();
                FieldElem::Residue(((*x as u128 + *y as u128) % p as u128) as u64)
            }
            (FieldElem::Quad(u1, v1), FieldElem::Quad(u2, v2)) => FieldElem::Quad(u1 + u2, v1 + v2),
            _ => panic!("mixed element kinds over {self}"),
        }
    }

    pub fn neg(self, a: &FieldElem) -> FieldElem {
        match a {
            FieldElem::Rat(x) => FieldElem::Rat(-x),
            FieldElem::Residue(x) => {
                let p = self.modulus();
                FieldElem::Residue((p - x % p) % p)
            }
            FieldElem::Quad(u, v) => FieldElem::Quad(-u, -v),
        }
    }

    pub fn sub(self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        match (a, b) {
            (FieldElem::Rat(x), FieldElem::Rat(y)) => FieldElem::Rat(x * y),
            (FieldElem::Residue(x), FieldElem::Residue(y)) => {
                FieldElem::Residue(exactnum::mul_mod(*x, *y, self.modulus()))
            }
            (FieldElem::Quad(u1, v1), FieldElem::Quad(u2, v2)) => {
                let d = Rat::from_integer(BigInt::from(self.quad_d()));
                FieldElem::Quad(u1 * u2 + v1 * v2 * d, u1 * v2 + u2 * v1)
            }
            _ => panic!("mixed element kinds over {self}"),
        }
    }

    pub fn inv(self, a: &FieldElem) -> Result<FieldElem> {
        if self.is_zero(a) {
            return Err(Error::ZeroElement);
        }
        Ok(match a {
            FieldElem::Rat(x) => FieldElem::Rat(x.recip()),
            FieldElem::Residue(x) => {
                FieldElem::Residue(exactnum::inv_mod(*x, self.modulus()).expect("nonzero"))
            }
            FieldElem::Quad(u, v) => {
                let d = Rat::from_integer(BigInt::from(self.quad_d()));
                let norm = u * u - v * v * d;
                FieldElem::Quad(u / &norm, -v / &norm)
            }
        })
    }

    pub fn div(self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn square(self, a: &FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    pub fn product<'a>(self, xs: impl IntoIterator<Item = &'a FieldElem>) -> FieldElem {
        xs.into_iter().fold(self.one(), |acc, x| self.mul(&acc, x))
    }

    fn modulus(self) -> u64 {
        match self {
            FieldDescriptor::FinitePrime(p) => p,
            _ => panic!("{self} has no residue modulus"),
        }
    }

    fn quad_d(self) -> i64 {
        match self {
            FieldDescriptor::RealQuadratic(d) => d,
            _ => panic!("{self} is not a real quadratic field"),
        }
    }

    /// Rational value of `x` for the kinds that store rational literals.
    pub fn rational(self, x: &FieldElem) -> Result<Rat> {
        match x {
            FieldElem::Rat(r) => Ok(r.clone()),
            _ => Err(Error::UnsupportedField(format!(
                "{self}: element is not a rational literal"
            ))),
        }
    }

    /// Signs of `x` under the real embeddings of the field: one entry for ℚ
    /// and ℝ, two for ℚ(√d) (`√d ↦ +√d` first), none otherwise.
    pub fn embedding_signs(self, x: &FieldElem) -> Result<Vec<i8>> {
        if self.is_zero(x) {
            return Err(Error::ZeroElement);
        }
        match (self, x) {
            (FieldDescriptor::Rationals | FieldDescriptor::Reals, FieldElem::Rat(r)) => {
                Ok(vec![sign_of(r)])
            }
            (FieldDescriptor::RealQuadratic(d), FieldElem::Quad(u, v)) => Ok(vec![
                quad_sign(u, v, d),
                quad_sign(u, &-v, d),
            ]),
            (FieldDescriptor::RealQuadratic(_) | FieldDescriptor::Rationals | FieldDescriptor::Reals, _) => {
                Err(Error::FieldMismatch)
            }
            _ => Ok(Vec::new()),
        }
    }
}

/// Exact sign of `u + v·√d` for `d > 0` not a square.
fn quad_sign(u: &Rat, v: &Rat, d: i64) -> i8 {
    let su = if u.is_zero() { 0 } else { sign_of(u) };
    let sv = if v.is_zero() { 0 } else { sign_of(v) };
    if su >= 0 && sv >= 0 {
        return 1;
    }
    if su <= 0 && sv <= 0 {
        return -1;
    }
    // opposite signs: compare u² with v²·d
    let lhs = u * u;
    let rhs = v * v * Rat::from_integer(BigInt::from(d));
    if lhs > rhs {
        su
    } else {
        sv
    }
}

/// A class in `k^× / (k^×)²`, stored by its canonical representative.
///
/// Representatives: ℚ squarefree integers; ℝ ±1; quadratically closed 1;
/// 𝔽_p {1, least non-residue}; ℚ_p (p odd) {1, u, p, up} with `u` the least
/// non-residue mod p; ℚ₂ {±1, ±2, ±5, ±10}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass {
    pub field: FieldDescriptor,
    pub rep: BigInt,
}

impl SquareClass {
    pub fn is_trivial(&self) -> bool {
        self.rep.is_one()
    }

    pub fn rep_elem(&self) -> FieldElem {
        self.field
            .from_rat(&Rat::from_integer(self.rep.clone()))
            .expect("representatives embed")
    }

    /// Product of two classes over the same field.
    pub fn mul(&self, other: &SquareClass) -> Result<SquareClass> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let prod = Rat::from_integer(&self.rep * &other.rep);
        square_class(self.field, &self.field.from_rat(&prod)?)
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rep)
    }
}

/// Canonical square class of a nonzero element.
pub fn square_class(k: FieldDescriptor, x: &FieldElem) -> Result<SquareClass> {
    k.check(x)?;
    if k.is_zero(x) {
        return Err(Error::ZeroElement);
    }
    let rep: BigInt = match k {
        FieldDescriptor::Rationals => squarefree_part(&k.rational(x)?, factor_bound())?,
        FieldDescriptor::Reals => BigInt::from(sign_of(&k.rational(x)?)),
        FieldDescriptor::QuadraticallyClosed => BigInt::one(),
        FieldDescriptor::FinitePrime(p) => {
            let FieldElem::Residue(r) = x else { unreachable!() };
            if legendre_u64(*r, p) == 1 {
                BigInt::one()
            } else {
                BigInt::from(least_non_residue(p))
            }
        }
        FieldDescriptor::PAdic(p) => {
            let r = k.rational(x)?;
            padic_class_rep(&(r.numer() * r.denom()), p)
        }
        FieldDescriptor::RealQuadratic(_) => {
            return Err(Error::UnsupportedField(
                "square classes of a real quadratic field".into(),
            ))
        }
    };
    Ok(SquareClass { field: k, rep })
}

fn padic_class_rep(n: &BigInt, p: u64) -> BigInt {
    let (v, unit) = valuation(n, p);
    let odd = v % 2 == 1;
    if p == 2 {
        let base: i64 = match mod_u64(&unit, 8) {
            1 => 1,
            3 => -5,
            5 => 5,
            7 => -1,
            _ => unreachable!("2-adic unit is odd"),
        };
        BigInt::from(if odd { 2 * base } else { base })
    } else {
        let u = if legendre(&unit, p) == 1 {
            1
        } else {
            least_non_residue(p)
        };
        BigInt::from(if odd { u * p } else { u })
    }
}

/// The full square-class group, or `None` when it is infinite (ℚ, ℚ(√d)).
pub fn square_class_group(k: FieldDescriptor) -> Option<Vec<SquareClass>> {
    let reps: Vec<i64> = match k {
        FieldDescriptor::Rationals | FieldDescriptor::RealQuadratic(_) => return None,
        FieldDescriptor::Reals => vec![1, -1],
        FieldDescriptor::QuadraticallyClosed => vec![1],
        FieldDescriptor::FinitePrime(p) => vec![1, least_non_residue(p) as i64],
        FieldDescriptor::PAdic(2) => vec![1, -1, 5, -5, 2, -2, 10, -10],
        FieldDescriptor::PAdic(p) => {
            let u = least_non_residue(p) as i64;
            let p = p as i64;
            vec![1, u, p, u * p]
        }
    };
    Some(
        reps.into_iter()
            .map(|r| SquareClass {
                field: k,
                rep: BigInt::from(r),
            })
            .collect(),
    )
}

/// A place of ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// Hilbert symbol `(a, b)_v` of two nonzero rationals: +1 iff
/// `z² = a·x² + b·y²` has a nonzero solution over ℚ_v.
pub fn hilbert_symbol(place: Place, a: &Rat, b: &Rat) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroElement);
    }
    Ok(match place {
        Place::Real => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) => {
            // same square classes, integral representatives
            let a = a.numer() * a.denom();
            let b = b.numer() * b.denom();
            hilbert_integral(&a, &b, p)
        }
    })
}

fn hilbert_integral(a: &BigInt, b: &BigInt, p: u64) -> i8 {
    let (alpha, u) = valuation(a, p);
    let (beta, v) = valuation(b, p);
    if p == 2 {
        let u8_ = mod_u64(&u, 8);
        let v8 = mod_u64(&v, 8);
        let eps = |x: u64| ((x + 7) / 2) % 2; // (x-1)/2 mod 2 for odd x mod 8
        let omega = |x: u64| ((x * x - 1) / 8) % 2;
        let e = eps(u8_) * eps(v8) + alpha as u64 * omega(v8) + beta as u64 * omega(u8_);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let mut s: i8 = 1;
        if (alpha as u64 * beta as u64) % 2 == 1 && ((p - 1) / 2) % 2 == 1 {
            s = -s;
        }
        if beta % 2 == 1 {
            s *= legendre(&u, p);
        }
        if alpha % 2 == 1 {
            s *= legendre(&v, p);
        }
        s
    }
}

/// Hilbert symbol of two field elements, read at the field's own place.
/// Finite and quadratically closed fields have trivial symbols.
pub fn field_hilbert(k: FieldDescriptor, a: &FieldElem, b: &FieldElem) -> Result<i8> {
    if k.is_zero(a) || k.is_zero(b) {
        return Err(Error::ZeroElement);
    }
    match k {
        FieldDescriptor::Reals => hilbert_symbol(Place::Real, &k.rational(a)?, &k.rational(b)?),
        FieldDescriptor::PAdic(p) => {
            hilbert_symbol(Place::Prime(p), &k.rational(a)?, &k.rational(b)?)
        }
        FieldDescriptor::FinitePrime(_) | FieldDescriptor::QuadraticallyClosed => Ok(1),
        FieldDescriptor::Rationals | FieldDescriptor::RealQuadratic(_) => Err(
            Error::UnsupportedField(format!("{k} has infinitely many places")),
        ),
    }
}

/// The level `s(k)`: least number of squares summing to −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Finite(u32),
    Infinite,
}

impl Level {
    pub fn at_most(self, bound: u32) -> bool {
        matches!(self, Level::Finite(s) if s <= bound)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(s) => write!(f, "{s}"),
            Level::Infinite => write!(f, "infinite"),
        }
    }
}

pub fn level(k: FieldDescriptor) -> Level {
    match k {
        FieldDescriptor::QuadraticallyClosed => Level::Finite(1),
        FieldDescriptor::FinitePrime(p) => Level::Finite(if p % 4 == 1 { 1 } else { 2 }),
        FieldDescriptor::PAdic(2) => Level::Finite(4),
        FieldDescriptor::PAdic(p) => Level::Finite(if p % 4 == 1 { 1 } else { 2 }),
        FieldDescriptor::Reals | FieldDescriptor::Rationals | FieldDescriptor::RealQuadratic(_) => {
            Level::Infinite
        }
    }
}

/// `true` iff `x` is a nonzero square in `k` (decidable for every kind
/// except ℚ(√d)).
pub fn is_square(k: FieldDescriptor, x: &FieldElem) -> Result<bool> {
    if k == FieldDescriptor::Rationals {
        if k.is_zero(x) {
            return Err(Error::ZeroElement);
        }
        return Ok(is_rational_square(&k.rational(x)?));
    }
    Ok(square_class(k, x)?.is_trivial())
}

/// Number of real embeddings that matter for signatures.
pub fn real_embedding_count(k: FieldDescriptor) -> usize {
    match k {
        FieldDescriptor::Rationals | FieldDescriptor::Reals => 1,
        FieldDescriptor::RealQuadratic(_) => 2,
        _ => 0,
    }
}

#[cfg(test)]
pub(crate) fn rep_to_i64(c: &SquareClass) -> i64 {
    num_traits::ToPrimitive::to_i64(&c.rep).expect("finite-field representatives are small")
}
