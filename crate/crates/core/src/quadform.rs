//! Diagonal quadratic forms: diagonalization, isotropy, represented values,
//! value groups, isotropic vectors, hyperbolic splitting and Pfister forms.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{is_rational_square, relevant_primes, sign_of, sqrt_mod_prime, Rat};
use crate::fields::{
    hilbert_symbol, is_square, square_class, square_class_group, FieldDescriptor, FieldElem, Place,
    SquareClass,
};
use crate::linalg::{self, Matrix};

/// Leaf evaluations allowed per isotropic-vector search.
pub const SEARCH_BUDGET: u64 = 4_000_000;

/// A regular diagonal form `⟨a₁,…,a_m⟩`; `q(x) = Σ aᵢxᵢ²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagonalForm {
    pub field: FieldDescriptor,
    pub coeffs: Vec<FieldElem>,
}

impl DiagonalForm {
    /// Validates shape and regularity: nonempty, every coefficient nonzero.
    pub fn new(field: FieldDescriptor, coeffs: Vec<FieldElem>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::DimensionMismatch("a form needs at least one coefficient".into()));
        }
        for c in &coeffs {
            field.check(c)?;
            if field.is_zero(c) {
                return Err(Error::SingularForm);
            }
        }
        Ok(DiagonalForm { field, coeffs })
    }

    pub fn from_rats(field: FieldDescriptor, coeffs: &[Rat]) -> Result<Self> {
        let elems = coeffs.iter().map(|c| field.from_rat(c)).collect::<Result<_>>()?;
        Self::new(field, elems)
    }

    pub fn from_ints(field: FieldDescriptor, coeffs: &[i64]) -> Result<Self> {
        Self::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, v: &[FieldElem]) -> FieldElem {
        let k = self.field;
        self.coeffs
            .iter()
            .zip(v)
            .fold(k.zero(), |acc, (a, x)| k.add(&acc, &k.mul(a, &k.square(x))))
    }

    /// Symmetric bilinear form with `b(v, v) = q(v)`.
    pub fn bilinear(&self, u: &[FieldElem], v: &[FieldElem]) -> FieldElem {
        let k = self.field;
        self.coeffs
            .iter()
            .zip(u.iter().zip(v))
            .fold(k.zero(), |acc, (a, (x, y))| k.add(&acc, &k.mul(a, &k.mul(x, y))))
    }

    pub fn determinant(&self) -> FieldElem {
        self.field.product(&self.coeffs)
    }

    pub fn orthogonal_sum(&self, other: &DiagonalForm) -> Result<DiagonalForm> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.extend(other.coeffs.iter().cloned());
        Ok(DiagonalForm { field: self.field, coeffs })
    }

    /// `q ⊥ ⟨c⟩`.
    pub fn extended(&self, c: FieldElem) -> Result<DiagonalForm> {
        let mut coeffs = self.coeffs.clone();
        coeffs.push(c);
        DiagonalForm::new(self.field, coeffs)
    }

    pub fn gram(&self) -> GramMatrix {
        GramMatrix {
            field: self.field,
            entries: Matrix::diagonal(self.field, &self.coeffs),
        }
    }

    fn rational_coeffs(&self) -> Result<Vec<Rat>> {
        self.coeffs.iter().map(|c| self.field.rational(c)).collect()
    }
}

impl fmt::Display for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match c {
                FieldElem::Rat(r) => write!(f, "{r}")?,
                FieldElem::Residue(r) => write!(f, "{r}")?,
                FieldElem::Quad(u, v) => write!(f, "{u}+{v}*sqrt(d)")?,
            }
        }
        write!(f, ">")
    }
}

/// Symmetric matrix of a quadratic form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    pub field: FieldDescriptor,
    pub entries: Matrix,
}

impl GramMatrix {
    pub fn new(field: FieldDescriptor, entries: Matrix) -> Result<Self> {
        if !entries.is_symmetric() {
            return Err(Error::DimensionMismatch("Gram matrix must be square and symmetric".into()));
        }
        for i in 0..entries.rows() {
            for x in entries.row(i) {
                field.check(x)?;
            }
        }
        Ok(GramMatrix { field, entries })
    }
}

/// A subgroup of the square-class group of a field with finitely many classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueGroup {
    pub field: FieldDescriptor,
    /// Sorted, contains the trivial class.
    pub members: Vec<SquareClass>,
}

impl ValueGroup {
    pub fn contains(&self, c: &SquareClass) -> bool {
        self.members.binary_search(c).is_ok()
    }

    pub fn contains_elem(&self, x: &FieldElem) -> Result<bool> {
        Ok(self.contains(&square_class(self.field, x)?))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Subgroup of the square-class group generated by `gens`.
pub fn subgroup_generated(k: FieldDescriptor, gens: &[SquareClass]) -> Result<ValueGroup> {
    let one = square_class(k, &k.one())?;
    let mut members: BTreeSet<SquareClass> = BTreeSet::from([one]);
    let mut frontier: Vec<SquareClass> = members.iter().cloned().collect();
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = x.mul(g)?;
            if members.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    Ok(ValueGroup {
        field: k,
        members: members.into_iter().collect(),
    })
}

/// Congruence diagonalization: returns `d` and invertible `P` with `Pᵀ·g·P = diag(d)`.
pub fn diagonalize(g: &GramMatrix) -> Result<(DiagonalForm, Matrix)> {
    let k = g.field;
    let n = g.entries.rows();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty Gram matrix".into()));
    }
    let mut a = g.entries.to_rows();
    let mut p = Matrix::identity(k, n).to_rows(); // p[row][col]; columns are basis vectors
    for i in 0..n {
        if k.is_zero(&a[i][i]) {
            if let Some(j) = (i + 1..n).find(|&j| !k.is_zero(&a[j][j])) {
                a.swap(i, j);
                for row in a.iter_mut() {
                    row.swap(i, j);
                }
                for row in p.iter_mut() {
                    row.swap(i, j);
                }
            } else if let Some(j) = (i + 1..n).find(|&j| !k.is_zero(&a[i][j])) {
                // column i += column j, row i += row j; both diagonals vanish so the pivot is 2·a[i][j]
                for row in a.iter_mut() {
                    let v = k.add(&row[i], &row[j]);
                    row[i] = v;
                }
                let rj = a[j].clone();
                for (x, y) in a[i].iter_mut().zip(&rj) {
                    *x = k.add(x, y);
                }
                for row in p.iter_mut() {
                    let v = k.add(&row[i], &row[j]);
                    row[i] = v;
                }
            } else {
                return Err(Error::SingularForm);
            }
        }
        let pivot_inv = k.inv(&a[i][i])?;
        for j in i + 1..n {
            if k.is_zero(&a[i][j]) {
                continue;
            }
            let f = k.mul(&a[i][j], &pivot_inv);
            for row in a.iter_mut() {
                let v = k.sub(&row[j], &k.mul(&f, &row[i]));
                row[j] = v;
            }
            let ri = a[i].clone();
            for (x, y) in a[j].iter_mut().zip(&ri) {
                *x = k.sub(x, &k.mul(&f, y));
            }
            for row in p.iter_mut() {
                let v = k.sub(&row[j], &k.mul(&f, &row[i]));
                row[j] = v;
            }
        }
    }
    let d = (0..n).map(|i| a[i][i].clone()).collect();
    Ok((DiagonalForm::new(k, d)?, Matrix::from_rows(p)?))
}

/// Isotropy of a diagonal form over the completion of ℚ at `place`.
pub fn local_is_isotropic(place: Place, coeffs: &[Rat]) -> Result<bool> {
    if coeffs.iter().any(Zero::is_zero) {
        return Err(Error::SingularForm);
    }
    let m = coeffs.len();
    match place {
        Place::Real => Ok(m >= 2
            && coeffs.iter().any(Signed::is_positive)
            && coeffs.iter().any(Signed::is_negative)),
        Place::Prime(p) => {
            let k = FieldDescriptor::PAdic(p);
            let d: Rat = coeffs.iter().product();
            let minus_one = -Rat::one();
            let local_square =
                |x: &Rat| -> Result<bool> { Ok(square_class(k, &FieldElem::Rat(x.clone()))?.is_trivial()) };
            match m {
                0 | 1 => Ok(false),
                2 => local_square(&-d),
                3 | 4 => {
                    let mut eps = 1i8;
                    for i in 0..m {
                        for j in i + 1..m {
                            eps *= hilbert_symbol(place, &coeffs[i], &coeffs[j])?;
                        }
                    }
                    if m == 3 {
                        Ok(hilbert_symbol(place, &minus_one, &-d)? == eps)
                    } else {
                        Ok(!local_square(&d)? || eps == hilbert_symbol(place, &minus_one, &minus_one)?)
                    }
                }
                _ => Ok(true),
            }
        }
    }
}

/// Exact isotropy verdict (Hasse–Minkowski over ℚ).
pub fn is_isotropic(q: &DiagonalForm) -> Result<bool> {
    let k = q.field;
    let m = q.dim();
    match k {
        FieldDescriptor::QuadraticallyClosed => Ok(m >= 2),
        FieldDescriptor::Reals => local_is_isotropic(Place::Real, &q.rational_coeffs()?),
        FieldDescriptor::PAdic(p) => local_is_isotropic(Place::Prime(p), &q.rational_coeffs()?),
        FieldDescriptor::FinitePrime(_) => match m {
            1 => Ok(false),
            2 => is_square(k, &k.neg(&q.determinant())),
            _ => Ok(true),
        },
        FieldDescriptor::Rationals => {
            let a = q.rational_coeffs()?;
            match m {
                1 => Ok(false),
                2 => Ok(is_rational_square(&-(&a[0] * &a[1]))),
                _ => {
                    if !local_is_isotropic(Place::Real, &a)? {
                        return Ok(false);
                    }
                    if m >= 5 {
                        return Ok(true);
                    }
                    for p in relevant_primes(&a)? {
                        if !local_is_isotropic(Place::Prime(p), &a)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
            }
        }
        FieldDescriptor::RealQuadratic(_) => {
            Err(Error::UnsupportedField(format!("isotropy over {k}")))
        }
    }
}

/// `c ∈ D(q)`.
pub fn represents(q: &DiagonalForm, c: &FieldElem) -> Result<bool> {
    q.field.check(c)?;
    if q.field.is_zero(c) {
        return Err(Error::ZeroElement);
    }
    if is_isotropic(q)? {
        return Ok(true);
    }
    is_isotropic(&q.extended(q.field.neg(c))?)
}

/// The represented square classes `D(q)` of a form over a finite-square-class field.
pub fn represented_classes(q: &DiagonalForm) -> Result<Vec<SquareClass>> {
    let group = square_class_group(q.field)
        .ok_or_else(|| Error::UnsupportedField(format!("value groups over {}", q.field)))?;
    let mut out = Vec::new();
    for c in group {
        if represents(q, &c.rep_elem())? {
            out.push(c);
        }
    }
    out.sort();
    Ok(out)
}

/// `[D(q)]`.
pub fn value_group(q: &DiagonalForm) -> Result<ValueGroup> {
    subgroup_generated(q.field, &represented_classes(q)?)
}

/// `[D(q)²]`, generated by the pairwise products of represented classes.
pub fn value_group_squared(q: &DiagonalForm) -> Result<ValueGroup> {
    let d = represented_classes(q)?;
    let mut gens = Vec::new();
    for (i, a) in d.iter().enumerate() {
        for b in &d[i..] {
            gens.push(a.mul(b)?);
        }
    }
    subgroup_generated(q.field, &gens)
}

/// A nonzero `v` with `q(v) = 0`.
///
/// Over 𝔽_p the search is exhaustive. Over the rational-literal kinds it
/// enumerates integer vectors on a ℚ-isotropic coordinate subset by
/// increasing height, up to `bound` and [`SEARCH_BUDGET`] evaluations.
pub fn find_isotropic_vector(q: &DiagonalForm, bound: u64) -> Result<Vec<FieldElem>> {
    if !is_isotropic(q)? {
        return Err(Error::NotIsotropic);
    }
    let k = q.field;
    if let FieldDescriptor::FinitePrime(p) = k {
        return Ok(finite_field_zero(q, p));
    }
    let a = q.rational_coeffs()?;
    let m = a.len();
    let support = isotropic_support(&a)?.ok_or(Error::SearchExhausted { bound })?;
    let sub: Vec<Rat> = support.iter().map(|&i| a[i].clone()).collect();
    let local = if sub.len() == 2 {
        Some(binary_zero(&sub[0], &sub[1]))
    } else {
        integer_zero_search(&sub, bound)?
    };
    let local = local.ok_or(Error::SearchExhausted { bound })?;
    let mut v = vec![k.zero(); m];
    for (i, x) in support.into_iter().zip(local) {
        v[i] = FieldElem::Rat(x);
    }
    debug_assert!(k.is_zero(&q.eval(&v)));
    Ok(v)
}

fn finite_field_zero(q: &DiagonalForm, p: u64) -> Vec<FieldElem> {
    let k = q.field;
    let res = |x: &FieldElem| match x {
        FieldElem::Residue(r) => *r,
        _ => unreachable!("F_p elements are residues"),
    };
    let a: Vec<u64> = q.coeffs.iter().map(res).collect();
    let mut v = vec![k.zero(); a.len()];
    let inv = |x: u64| crate::exactnum::inv_mod(x, p).expect("nonzero residue");
    let mul = |x: u64, y: u64| crate::exactnum::mul_mod(x, y, p);
    if a.len() == 2 {
        // a₀x² = −a₁ with y = 1
        let t = mul(p - a[1], inv(a[0]));
        let x = sqrt_mod_prime(t, p).expect("isotropic binary form");
        v[0] = FieldElem::Residue(x);
        v[1] = k.one();
        return v;
    }
    // a₀x² + a₁y² = −a₂ with z = 1; solvable for some x since both sides take (p+1)/2 values
    for x in 0..p {
        let lhs = (p - a[2] + p - mul(a[0], mul(x, x))) % p;
        if let Some(y) = sqrt_mod_prime(mul(lhs, inv(a[1])), p) {
            v[0] = FieldElem::Residue(x);
            v[1] = FieldElem::Residue(y);
            v[2] = k.one();
            return v;
        }
    }
    unreachable!("ternary forms over F_p are isotropic")
}

/// Smallest coordinate subset on which the form is isotropic over ℚ.
fn isotropic_support(a: &[Rat]) -> Result<Option<Vec<usize>>> {
    let m = a.len();
    for size in 2..=m.min(5) {
        let mut found = None;
        for_each_subset(m, size, &mut |s| {
            let form = DiagonalForm::from_rats(
                FieldDescriptor::Rationals,
                &s.iter().map(|&i| a[i].clone()).collect::<Vec<_>>(),
            );
            match form.and_then(|f| is_isotropic(&f)) {
                Ok(true) => {
                    found = Some(Ok(s.to_vec()));
                    ControlFlow::Break(())
                }
                Ok(false) => ControlFlow::Continue(()),
                Err(e) => {
                    found = Some(Err(e));
                    ControlFlow::Break(())
                }
            }
        });
        if let Some(r) = found {
            return r.map(Some);
        }
    }
    Ok(None)
}

fn for_each_subset(m: usize, size: usize, f: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) {
    fn rec(
        start: usize,
        m: usize,
        size: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if cur.len() == size {
            return f(cur);
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, size, cur, f)?;
            cur.pop();
        }
        ControlFlow::Continue(())
    }
    let _ = rec(0, m, size, &mut Vec::new(), f);
}

/// Zero of `⟨a, b⟩` when `−ab` is a rational square: `(√(−b/a), 1)`.
fn binary_zero(a: &Rat, b: &Rat) -> Vec<Rat> {
    let t = -(b / a);
    let num = t.numer().sqrt();
    let den = t.denom().sqrt();
    vec![Rat::new(num, den), Rat::one()]
}

/// Integer zero of `Σ cᵢxᵢ²` on coordinates of height ≤ `bound`, solving for the last one.
fn integer_zero_search(a: &[Rat], bound: u64) -> Result<Option<Vec<Rat>>> {
    let lcm = a.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Option<Vec<i128>> = a
        .iter()
        .map(|r| (r.numer() * (&lcm / r.denom())).to_i64().map(i128::from))
        .collect();
    let Some(c) = ints else {
        return Ok(None);
    };
    let free = c.len() - 1;
    let last = c[free];
    let mut budget = SEARCH_BUDGET;
    let mut found: Option<Vec<i128>> = None;
    let mut cur = vec![0i128; free];
    for h in 1..=bound as i128 {
        let flow = shell(h, 0, false, false, &mut cur, &mut |x| {
            if budget == 0 {
                return ControlFlow::Break(());
            }
            budget -= 1;
            let s: i128 = x.iter().zip(&c).map(|(xi, ci)| ci * xi * xi).sum();
            // last·y² = −s
            if (-s) % last != 0 {
                return ControlFlow::Continue(());
            }
            let t = -s / last;
            if t < 0 {
                return ControlFlow::Continue(());
            }
            let y = isqrt(t);
            if y * y == t {
                let mut v = x.to_vec();
                v.push(y);
                found = Some(v);
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        if found.is_some() || flow.is_break() {
            break;
        }
    }
    Ok(found.map(|v| v.into_iter().map(|x| Rat::from_integer(BigInt::from(x))).collect()))
}

/// Visits every vector of sup-norm exactly `h` whose first nonzero entry is positive.
fn shell(
    h: i128,
    idx: usize,
    hit: bool,
    nonzero: bool,
    cur: &mut Vec<i128>,
    f: &mut dyn FnMut(&[i128]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if idx == cur.len() {
        return if hit { f(cur) } else { ControlFlow::Continue(()) };
    }
    let tail = idx + 1 == cur.len();
    for step in 0..=2 * h {
        // 0, 1, −1, 2, −2, …
        let x = if step == 0 {
            0
        } else if step % 2 == 1 {
            (step + 1) / 2
        } else {
            -step / 2
        };
        if !nonzero && x < 0 {
            continue;
        }
        if tail && !hit && x.abs() != h {
            continue;
        }
        cur[idx] = x;
        shell(h, idx + 1, hit || x.abs() == h, nonzero || x != 0, cur, f)?;
    }
    ControlFlow::Continue(())
}

fn isqrt(t: i128) -> i128 {
    let mut r = (t as f64).sqrt() as i128;
    while r * r > t {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= t {
        r += 1;
    }
    r
}

/// Change of basis `P` whose first two columns form a hyperbolic pair
/// (`Pᵀ·A·P = [[0,1],[1,0]] ⊕ diagonal`) with first column `v`.
pub fn hyperbolic_split(q: &DiagonalForm, v: &[FieldElem]) -> Result<Matrix> {
    let k = q.field;
    let m = q.dim();
    if v.len() != m {
        return Err(Error::DimensionMismatch(format!("vector of length {} for a form of dimension {m}", v.len())));
    }
    if v.iter().all(|x| k.is_zero(x)) || !k.is_zero(&q.eval(v)) {
        return Err(Error::NotIsotropicVector);
    }
    let unit = |j: usize| -> Vec<FieldElem> {
        (0..m).map(|i| if i == j { k.one() } else { k.zero() }).collect()
    };
    let j = (0..m)
        .find(|&j| !k.is_zero(&k.mul(&q.coeffs[j], &v[j])))
        .ok_or(Error::NotIsotropicVector)?;
    let w = unit(j);
    let b = q.bilinear(v, &w);
    // w − q(w)/(2b)·v is isotropic and pairs with v to b
    let shift = k.div(&q.eval(&w), &k.mul(&k.from_int(2), &b))?;
    let binv = k.inv(&b)?;
    let e2: Vec<FieldElem> = w
        .iter()
        .zip(v)
        .map(|(wi, vi)| k.mul(&k.sub(wi, &k.mul(&shift, vi)), &binv))
        .collect();

    let mut basis = vec![v.to_vec(), e2.clone()];
    let mut complement: Vec<Vec<FieldElem>> = Vec::new();
    for i in 0..m {
        if complement.len() == m - 2 {
            break;
        }
        let x = unit(i);
        let bx2 = q.bilinear(&x, &e2);
        let bxv = q.bilinear(&x, v);
        let y: Vec<FieldElem> = (0..m)
            .map(|t| k.sub(&k.sub(&x[t], &k.mul(&bx2, &v[t])), &k.mul(&bxv, &e2[t])))
            .collect();
        let mut trial = basis.clone();
        trial.extend(complement.iter().cloned());
        trial.push(y.clone());
        if linalg::rank(k, &trial)? == trial.len() {
            complement.push(y);
        }
    }
    if !complement.is_empty() {
        let y = Matrix::from_columns(k, &complement)?;
        let gram = Matrix::diagonal(k, &q.coeffs).congruent(k, &y)?;
        let (_, pc) = diagonalize(&GramMatrix::new(k, gram)?)?;
        let yp = y.mul(k, &pc)?;
        basis.extend((0..yp.cols()).map(|c| yp.column(c)));
    }
    Matrix::from_columns(k, &basis)
}

/// `⟨⟨b₁,…,b_n⟩⟩ = ∏ ⟨1, −bᵢ⟩`; coefficient `s` is `∏_{i ∈ bits(s)} (−bᵢ)`, unnormalized.
pub fn pfister_expand(k: FieldDescriptor, b: &[FieldElem]) -> Result<DiagonalForm> {
    let mut coeffs = vec![k.one()];
    for bi in b {
        let nb = k.neg(bi);
        let scaled: Vec<FieldElem> = coeffs.iter().map(|c| k.mul(c, &nb)).collect();
        coeffs.extend(scaled);
    }
    DiagonalForm::new(k, coeffs)
}

/// The 2-fold Pfister form `⟨1, a₁a₂, a₁a₃, a₂a₃⟩` containing a scalar multiple of `⟨a₁,a₂,a₃⟩`.
pub fn dim3_neighbor_pfister(
    k: FieldDescriptor,
    a1: &FieldElem,
    a2: &FieldElem,
    a3: &FieldElem,
) -> Result<DiagonalForm> {
    DiagonalForm::new(
        k,
        vec![k.one(), k.mul(a1, a2), k.mul(a1, a3), k.mul(a2, a3)],
    )
}

/// Sign pattern `(positives, negatives)` of a form over ℚ or ℝ.
pub fn signature_counts(q: &DiagonalForm) -> Result<(usize, usize)> {
    let a = q.rational_coeffs()?;
    let pos = a.iter().filter(|r| sign_of(r) > 0).count();
    Ok((pos, a.len() - pos))
}
