//! Finite Witt-ring models over 𝔽_p and ℚ_p, and ideal computations in GW(k)
//! through the injection `GW(k) → ℤ × W(k)`.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::fields::{field_hilbert, square_class, square_class_group, FieldDescriptor, FieldElem, Place, SquareClass};
use crate::quadform::{is_isotropic, DiagonalForm};

use super::{disc_class, gw_scale, hasse_at, GWElem};

/// Complete GW invariants over a local or finite field: rank, determinant class, Hasse–Witt invariant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Key {
    rank: i64,
    disc: SquareClass,
    hasse: i8,
}

fn supported(k: FieldDescriptor) -> Result<()> {
    match k {
        FieldDescriptor::FinitePrime(_) | FieldDescriptor::PAdic(_) => Ok(()),
        _ => Err(Error::UnsupportedField(format!("finite Witt ring model over {k}"))),
    }
}

fn hil(k: FieldDescriptor, a: &SquareClass, b: &SquareClass) -> Result<i8> {
    field_hilbert(k, &a.rep_elem(), &b.rep_elem())
}

fn key_of(x: &GWElem) -> Result<Key> {
    let k = x.field;
    let hasse = match k {
        FieldDescriptor::PAdic(p) => hasse_at(x, Place::Prime(p))?,
        _ => 1,
    };
    Ok(Key {
        rank: x.rank(),
        disc: disc_class(x)?,
        hasse,
    })
}

fn key_add(k: FieldDescriptor, a: &Key, b: &Key) -> Result<Key> {
    Ok(Key {
        rank: a.rank + b.rank,
        disc: a.disc.mul(&b.disc)?,
        hasse: a.hasse * b.hasse * hil(k, &a.disc, &b.disc)?,
    })
}

fn key_neg(k: FieldDescriptor, a: &Key) -> Result<Key> {
    Ok(Key {
        rank: -a.rank,
        disc: a.disc.clone(),
        hasse: a.hasse * hil(k, &a.disc, &a.disc)?,
    })
}

/// Invariants of `m·⟨1,−1⟩`: rank 2m, disc (−1)^m, Hasse (−1,−1)^{m(m−1)/2}.
fn hyperbolic_key(k: FieldDescriptor, m: i64) -> Result<Key> {
    let minus_one = square_class(k, &k.from_int(-1))?;
    let disc = if m.is_odd() { minus_one.clone() } else { square_class(k, &k.one())? };
    let twist = matches!(m.rem_euclid(4), 2 | 3);
    let hasse = if twist { hil(k, &minus_one, &minus_one)? } else { 1 };
    Ok(Key { rank: 2 * m, disc, hasse })
}

/// Witt class key: subtract hyperbolic planes until the rank is 0 or 1.
fn witt_normalize(k: FieldDescriptor, a: &Key) -> Result<Key> {
    let m = a.rank.div_euclid(2);
    if m == 0 {
        return Ok(a.clone());
    }
    key_add(k, a, &hyperbolic_key(k, -m)?)
}

fn witt_add(k: FieldDescriptor, a: &Key, b: &Key) -> Result<Key> {
    witt_normalize(k, &key_add(k, a, b)?)
}

fn witt_neg(k: FieldDescriptor, a: &Key) -> Result<Key> {
    witt_normalize(k, &key_neg(k, a)?)
}

fn witt_zero(k: FieldDescriptor) -> Result<Key> {
    Ok(Key {
        rank: 0,
        disc: square_class(k, &k.one())?,
        hasse: 1,
    })
}

/// `|W(k)|`: parity × discriminant × Hasse (trivial over 𝔽_p).
fn witt_order(k: FieldDescriptor) -> usize {
    let classes = square_class_group(k).map_or(0, |g| g.len());
    let hasse = if matches!(k, FieldDescriptor::PAdic(_)) { 2 } else { 1 };
    2 * classes * hasse
}

fn witt_scale(k: FieldDescriptor, n: i64, w: &Key) -> Result<Key> {
    let order = witt_order(k) as i64;
    let mut acc = witt_zero(k)?;
    for _ in 0..n.rem_euclid(order) {
        acc = witt_add(k, &acc, w)?;
    }
    Ok(acc)
}

/// A Witt class with its anisotropic representative (dimension ≤ 4, ≤ 2 over 𝔽_p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittClass {
    pub field: FieldDescriptor,
    pub representative: Vec<FieldElem>,
}

impl WittClass {
    pub fn dim(&self) -> usize {
        self.representative.len()
    }

    pub fn is_zero(&self) -> bool {
        self.representative.is_empty()
    }

    pub fn to_gw(&self) -> GWElem {
        GWElem {
            field: self.field,
            plus: self.representative.clone(),
            minus: Vec::new(),
        }
    }
}

fn multisets(n: usize, size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for prefix in multisets(n, size - 1) {
        let start = prefix.last().copied().unwrap_or(0);
        for i in start..n {
            let mut v = prefix.clone();
            v.push(i);
            out.push(v);
        }
    }
    out
}

fn witt_table(k: FieldDescriptor) -> Result<BTreeMap<Key, WittClass>> {
    supported(k)?;
    let reps = square_class_group(k).expect("finite square classes");
    let max_dim = if matches!(k, FieldDescriptor::FinitePrime(_)) { 2 } else { 4 };
    let mut table = BTreeMap::new();
    for dim in 0..=max_dim {
        for idx in multisets(reps.len(), dim) {
            let coeffs: Vec<FieldElem> = idx.iter().map(|&i| reps[i].rep_elem()).collect();
            if dim > 0 && is_isotropic(&DiagonalForm::new(k, coeffs.clone())?)? {
                continue;
            }
            let class = WittClass { field: k, representative: coeffs };
            let key = witt_normalize(k, &key_of(&class.to_gw())?)?;
            table.entry(key).or_insert(class);
        }
    }
    Ok(table)
}

/// Every Witt class of `k`, one anisotropic representative each, by increasing dimension.
pub fn witt_classes(k: FieldDescriptor) -> Result<Vec<WittClass>> {
    let mut v: Vec<WittClass> = witt_table(k)?.into_values().collect();
    v.sort_by_key(WittClass::dim);
    Ok(v)
}

/// The anisotropic representative of `x`'s Witt class.
pub fn witt_reduce(x: &GWElem) -> Result<WittClass> {
    let k = x.field;
    supported(k)?;
    let key = witt_normalize(k, &key_of(x)?)?;
    witt_table(k)?
        .remove(&key)
        .ok_or_else(|| Error::InvalidElement(format!("no anisotropic form matches {x}")))
}

/// Outcome of an ideal-membership query with the work it took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipReport {
    pub member: bool,
    /// gcd of the ranks of the additive generators `⟨u⟩·g`.
    pub rank_gcd: u64,
    /// Size of the Witt-class subgroup reachable at rank 0.
    pub kernel_size: usize,
    /// Witt additions performed while closing that subgroup.
    pub iterations: usize,
    /// `|W(k)| · #square classes · #generators`, an upper bound for `iterations`.
    pub iteration_bound: usize,
}

/// The additive subgroup of ℤ × W(k) spanned by an ideal's additive generators.
///
/// With `g = gcd(rᵢ)` and Bezout `Σcᵢrᵢ = g`, put `w₀ = Σcᵢwᵢ` and
/// `K = ⟨wᵢ − (rᵢ/g)·w₀⟩`. Then `(r, w)` is reachable iff `g | r` and
/// `w − (r/g)·w₀ ∈ K`.
struct IdealModel {
    field: FieldDescriptor,
    rank_gcd: i64,
    base: Key,
    kernel: BTreeSet<Key>,
    iterations: usize,
    iteration_bound: usize,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

impl IdealModel {
    fn build(k: FieldDescriptor, generators: &[GWElem]) -> Result<Self> {
        supported(k)?;
        if generators.iter().any(|g| g.field != k) {
            return Err(Error::FieldMismatch);
        }
        let classes = square_class_group(k).expect("finite square classes");
        let mut additive: Vec<(i64, Key)> = Vec::new();
        for g in generators {
            for u in &classes {
                let a = gw_scale(&u.rep_elem(), g)?;
                additive.push((a.rank(), witt_normalize(k, &key_of(&a)?)?));
            }
        }
        let ranks: Vec<i64> = additive.iter().map(|(r, _)| *r).collect();
        let g = ranks.iter().fold(0i64, |acc, r| acc.gcd(r));
        // only w₀ depends on the coefficients, and multiples of |W| vanish there
        let coeffs = bezout(&ranks);
        let mut base = witt_zero(k)?;
        for (c, (_, w)) in coeffs.iter().zip(&additive) {
            base = witt_add(k, &base, &witt_scale(k, *c, w)?)?;
        }
        let mut shifted = Vec::with_capacity(additive.len());
        for (r, w) in &additive {
            let t = if g == 0 { 0 } else { r / g };
            shifted.push(witt_add(k, w, &witt_neg(k, &witt_scale(k, t, &base)?)?)?);
        }
        let zero = witt_zero(k)?;
        let mut kernel = BTreeSet::from([zero.clone()]);
        let mut frontier = vec![zero];
        let mut iterations = 0;
        while let Some(x) = frontier.pop() {
            for s in &shifted {
                iterations += 1;
                let y = witt_add(k, &x, s)?;
                if kernel.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        Ok(IdealModel {
            field: k,
            rank_gcd: g,
            base,
            kernel,
            iterations,
            iteration_bound: witt_order(k) * classes.len() * generators.len(),
        })
    }

    fn contains(&self, x: &GWElem) -> Result<bool> {
        let k = self.field;
        if x.field != k {
            return Err(Error::FieldMismatch);
        }
        let r = x.rank();
        let t = if self.rank_gcd == 0 {
            if r != 0 {
                return Ok(false);
            }
            0
        } else {
            if r % self.rank_gcd != 0 {
                return Ok(false);
            }
            r / self.rank_gcd
        };
        let w = witt_normalize(k, &key_of(x)?)?;
        let residual = witt_add(k, &w, &witt_neg(k, &witt_scale(k, t, &self.base)?)?)?;
        Ok(self.kernel.contains(&residual))
    }
}

/// Integer coefficients `c` with `Σ cᵢ·rᵢ = gcd(r)`.
fn bezout(r: &[i64]) -> Vec<i64> {
    let mut g = 0i64;
    let mut c: Vec<i64> = Vec::with_capacity(r.len());
    for &ri in r {
        let (ng, x, y) = ext_gcd(g, ri);
        for ci in c.iter_mut() {
            *ci *= x;
        }
        c.push(y);
        g = ng;
    }
    c
}

/// Membership in the ideal of GW(k) generated by `generators`.
pub fn ideal_membership(target: &GWElem, generators: &[GWElem]) -> Result<bool> {
    Ok(ideal_membership_report(target, generators)?.member)
}

pub fn ideal_membership_report(target: &GWElem, generators: &[GWElem]) -> Result<MembershipReport> {
    let model = IdealModel::build(target.field, generators)?;
    Ok(MembershipReport {
        member: model.contains(target)?,
        rank_gcd: model.rank_gcd.unsigned_abs(),
        kernel_size: model.kernel.len(),
        iterations: model.iterations,
        iteration_bound: model.iteration_bound,
    })
}

/// Shape of `GW(k)/I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuotientReport {
    /// `I = GI(k)`, so the quotient is ℤ/2 through the rank mod 2.
    CyclicOfOrderTwo,
    /// `I ≠ GI(k)`; what the reachability computation found.
    Summary {
        all_generators_even: bool,
        contains_even_ideal: bool,
        rank_gcd: u64,
        kernel_size: usize,
        witt_order: usize,
    },
}

/// Decides whether the ideal generated by `generators` is the even-rank ideal GI(k).
pub fn quotient_by_even_ideal(k: FieldDescriptor, generators: &[GWElem]) -> Result<QuotientReport> {
    let model = IdealModel::build(k, generators)?;
    let all_even = generators.iter().all(|g| g.rank() % 2 == 0);
    // GI(k) is additively generated by the ⟨1, −u⟩
    let mut contains = true;
    for u in square_class_group(k).expect("finite square classes") {
        let probe = GWElem::form(k, vec![k.one(), k.neg(&u.rep_elem())])?;
        if !model.contains(&probe)? {
            contains = false;
            break;
        }
    }
    if all_even && contains {
        Ok(QuotientReport::CyclicOfOrderTwo)
    } else {
        Ok(QuotientReport::Summary {
            all_generators_even: all_even,
            contains_even_ideal: contains,
            rank_gcd: model.rank_gcd.unsigned_abs(),
            kernel_size: model.kernel.len(),
            witt_order: witt_order(k),
        })
    }
}
