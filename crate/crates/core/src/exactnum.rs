//! Exact rational arithmetic and the elementary number theory the rest of
//! the crate leans on: trial-division factoring, squarefree parts, Legendre
//! symbols and square roots modulo a prime.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rat = BigRational;

pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

static FACTOR_BOUND: AtomicU64 = AtomicU64::new(DEFAULT_FACTOR_BOUND);

/// Trial-division bound used by every operation that needs to factor.
pub fn factor_bound() -> u64 {
    FACTOR_BOUND.load(Ordering::Relaxed)
}

/// Change the process-wide trial-division bound. Values below 2 are clamped.
pub fn set_factor_bound(bound: u64) {
    FACTOR_BOUND.store(bound.max(2), Ordering::Relaxed);
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"n"` or `"n/d"` (surrounding whitespace allowed).
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::InvalidElement(format!("not a rational literal: {s:?}"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Rat::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::InvalidElement(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(n, d))
        }
    }
}

/// Inverse of [`parse_rat`]: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Prime factorization of a nonzero integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    /// Strictly increasing primes with positive exponents.
    pub factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn reconstruct(&self) -> BigInt {
        let mut acc = BigInt::from(self.sign);
        for (p, e) in &self.factors {
            acc *= num_traits::pow(p.clone(), *e as usize);
        }
        acc
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.iter().map(|(p, _)| p)
    }
}

/// Factors `n` by trial division up to `bound`, then proves the leftover
/// cofactor prime (trivially if it is below `bound²`, otherwise by a
/// deterministic Miller–Rabin test).
pub fn factor(n: &BigInt, bound: u64) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::ZeroElement);
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut rest = n.abs();
    let mut factors = Vec::new();
    let bound = bound.max(2);

    if let Some(small) = rest.to_u64() {
        let mut m = small;
        let mut d = 2u64;
        while d <= bound && d.saturating_mul(d) <= m {
            if m % d == 0 {
                let mut e = 0;
                while m % d == 0 {
                    m /= d;
                    e += 1;
                }
                factors.push((BigInt::from(d), e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        rest = BigInt::from(m);
    } else {
        let mut d = 2u64;
        while d <= bound {
            let bd = BigInt::from(d);
            if &bd * &bd > rest {
                break;
            }
            if rest.is_multiple_of(&bd) {
                let mut e = 0;
                while rest.is_multiple_of(&bd) {
                    rest /= &bd;
                    e += 1;
                }
                factors.push((bd, e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
    }

    if !rest.is_one() {
        let b = BigInt::from(bound);
        if rest <= &b * &b || is_prime_deterministic(&rest)? {
            factors.push((rest, 1));
        } else {
            return Err(Error::FactorBoundExceeded {
                cofactor: rest,
                bound,
            });
        }
    }
    Ok(Factorization { sign, factors })
}

const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller–Rabin with the first thirteen prime bases, which is a proof of
/// primality below 3.317·10²⁴. Larger composites-or-primes cannot be settled
/// and are reported as a bound failure by the caller.
fn is_prime_deterministic(n: &BigInt) -> Result<bool> {
    let limit: BigInt = "3317044064679887385961981".parse().unwrap();
    if *n < BigInt::from(2) {
        return Ok(false);
    }
    for &b in &MR_BASES {
        let b = BigInt::from(b);
        if *n == b {
            return Ok(true);
        }
        if n.is_multiple_of(&b) {
            return Ok(false);
        }
    }
    let one = BigInt::one();
    let n_minus_1 = n - &one;
    let mut d = n_minus_1.clone();
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for &b in &MR_BASES {
        let mut x = BigInt::from(b).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    if *n < limit {
        Ok(true)
    } else {
        Err(Error::FactorBoundExceeded {
            cofactor: n.clone(),
            bound: factor_bound(),
        })
    }
}

/// The unique squarefree integer `d` with `r = d · t²` for a rational `t`.
pub fn squarefree_part(r: &Rat, bound: u64) -> Result<BigInt> {
    if r.is_zero() {
        return Err(Error::ZeroElement);
    }
    // n/d ~ n·d modulo squares
    let m = r.numer() * r.denom();
    let f = factor(&m, bound)?;
    let mut out = BigInt::from(f.sign);
    for (p, e) in f.factors {
        if e % 2 == 1 {
            out *= p;
        }
    }
    Ok(out)
}

/// Exact test for `r` being the square of a rational.
pub fn is_rational_square(r: &Rat) -> bool {
    if r.is_negative() {
        return false;
    }
    is_perfect_square(r.numer()) && is_perfect_square(r.denom())
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = n.sqrt();
    &s * &s == *n
}

/// `(v, u)` with `n = p^v · u` and `p ∤ u`. `n` must be nonzero.
pub fn valuation(n: &BigInt, p: u64) -> (u32, BigInt) {
    debug_assert!(!n.is_zero());
    let bp = BigInt::from(p);
    let mut u = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = u.div_rem(&bp);
        if !r.is_zero() {
            break;
        }
        u = q;
        v += 1;
    }
    (v, u)
}

/// Residue of `n` in `[0, m)`.
pub fn mod_u64(n: &BigInt, m: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits")
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime; `None` for zero.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

/// Legendre symbol `(a | p)` for an odd prime `p`.
pub fn legendre(a: &BigInt, p: u64) -> i8 {
    legendre_u64(mod_u64(a, p), p)
}

pub fn legendre_u64(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Least quadratic non-residue modulo an odd prime.
pub fn least_non_residue(p: u64) -> u64 {
    (2..p)
        .find(|&a| legendre_u64(a, p) == -1)
        .expect("odd prime has a non-residue")
}

/// Tonelli–Shanks square root modulo an odd prime, if one exists.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if legendre_u64(a, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = least_non_residue(p);
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Small-number primality check used to validate field descriptors.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    match is_prime_deterministic(&BigInt::from(n)) {
        Ok(b) => b,
        Err(_) => unreachable!("u64 is below the deterministic limit"),
    }
}

/// Every prime dividing the numerator or denominator of any of `values`,
/// together with 2, in increasing order.
pub fn relevant_primes<'a>(values: impl IntoIterator<Item = &'a Rat>) -> Result<Vec<u64>> {
    let bound = factor_bound();
    let mut primes = vec![2u64];
    for r in values {
        if r.is_zero() {
            return Err(Error::ZeroElement);
        }
        for part in [r.numer(), r.denom()] {
            for p in factor(part, bound)?.primes() {
                let p = p.to_u64().ok_or_else(|| {
                    Error::UnsupportedField(format!("place at prime {p} beyond 64 bits"))
                })?;
                primes.push(p);
            }
        }
    }
    primes.sort_unstable();
    primes.dedup();
    Ok(primes)
}

/// Sign of a nonzero rational as ±1.
pub fn sign_of(r: &Rat) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        _ => 1,
    }
}
