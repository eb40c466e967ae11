//! Acceptance suite: one PASS/FAIL line per criterion, exact comparisons,
//! wall-clock limits enforced. Runs without the libtest harness so the
//! report is always printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hedgehog_core::exactnum::{int, least_non_residue, rat, relevant_primes, Rat};
use hedgehog_core::fields::{hilbert_symbol, square_class_group, Place};
use hedgehog_core::gwring::{
    euler_characteristic, gw_add, gw_equal, ideal_membership, quotient_by_even_ideal,
    scharlau_transfer, ExtElem, ExtGWElem, Functional, QuotientReport,
};
use hedgehog_core::hedgehog::{
    decide_section, has_rational_point, in_value_group_squared, sphere_decision, verify_section,
    PointStatus,
};
use hedgehog_core::quadform::{
    dim3_neighbor_pfister, is_isotropic, represented_classes, value_group_squared,
};
use hedgehog_core::{
    DiagonalForm, FieldDescriptor, FieldElem, GWElem, QuadExtension, QuadricProblem, Verdict,
};

type Check = fn() -> Result<(), String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn q(n: i64) -> FieldElem {
    FieldElem::Rat(int(n))
}

// ---------------------------------------------------------------- criterion 1

/// Levels from the classical tables: −1 is a square in 𝔽_p, ℚ_p iff p ≡ 1 (4);
/// otherwise a sum of two squares for odd p; s(ℚ₂) = 4; ordered fields infinite.
fn known_level(k: FieldDescriptor) -> Option<u32> {
    match k {
        FieldDescriptor::Reals | FieldDescriptor::Rationals => None,
        FieldDescriptor::QuadraticallyClosed => Some(1),
        FieldDescriptor::PAdic(2) => Some(4),
        FieldDescriptor::FinitePrime(p) | FieldDescriptor::PAdic(p) => Some(if p % 4 == 1 { 1 } else { 2 }),
        FieldDescriptor::RealQuadratic(_) => None,
    }
}

fn sphere_table() -> Result<(), String> {
    let fields = [
        FieldDescriptor::Reals,
        FieldDescriptor::QuadraticallyClosed,
        FieldDescriptor::FinitePrime(3),
        FieldDescriptor::FinitePrime(5),
        FieldDescriptor::FinitePrime(7),
        FieldDescriptor::PAdic(2),
        FieldDescriptor::PAdic(3),
        FieldDescriptor::PAdic(5),
        FieldDescriptor::Rationals,
    ];
    for k in fields {
        for n in 1..=6usize {
            let expected = n % 2 == 1 || known_level(k).is_some_and(|s| s as usize <= 2 * n + 1);
            let got = sphere_decision(k, n).map_err(|e| e.to_string())?.verdict;
            let want = if expected { Verdict::SectionExists } else { Verdict::NoSection };
            ensure(got == want, || format!("{k} n={n}: got {got}, expected {want}"))?;
        }
    }
    for (k, want) in [
        (FieldDescriptor::Reals, Verdict::NoSection),
        (FieldDescriptor::PAdic(2), Verdict::SectionExists),
        (FieldDescriptor::Rationals, Verdict::NoSection),
        (FieldDescriptor::FinitePrime(3), Verdict::SectionExists),
        (FieldDescriptor::FinitePrime(7), Verdict::SectionExists),
    ] {
        let got = sphere_decision(k, 2).map_err(|e| e.to_string())?.verdict;
        ensure(got == want, || format!("S^2 over {k}: got {got}"))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- criterion 2

fn euler_values() -> Result<(), String> {
    for k in [FieldDescriptor::PAdic(2), FieldDescriptor::Rationals] {
        for (n, hyperbolic) in [(2usize, 1i64), (4, 2)] {
            let ones = vec![k.one(); n + 1];
            let chi = euler_characteristic(k, n, &ones).map_err(|e| e.to_string())?;
            let expected = gw_add(
                &GWElem::hyperbolic(k, hyperbolic),
                &GWElem::from_ints(k, &[2, 2], &[]).unwrap(),
            )
            .unwrap();
            ensure(gw_equal(&chi, &expected).map_err(|e| e.to_string())?, || {
                format!("chi over {k} for n={n} is {chi}, expected {expected}")
            })?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- criterion 3

fn dyadic_transfers() -> Result<(), String> {
    let k = FieldDescriptor::PAdic(2);
    let one = ExtGWElem::form(vec![ExtElem(k.one(), k.zero())]);
    for (alpha, expected) in [(2, [2, 1]), (-2, [2, -1])] {
        let ext = QuadExtension::new(k, q(alpha), Functional::FieldTrace).map_err(|e| e.to_string())?;
        let t = scharlau_transfer(&ext, &one).map_err(|e| e.to_string())?;
        let want = GWElem::from_ints(k, &expected, &[]).unwrap();
        ensure(gw_equal(&t, &want).unwrap(), || format!("tr<1> over Q2(sqrt({alpha})) is {t}"))?;
    }
    let ext = QuadExtension::new(k, q(2), Functional::FieldTrace).unwrap();
    let unit = ExtGWElem::form(vec![ExtElem(k.one(), k.one())]);
    let t = scharlau_transfer(&ext, &unit).map_err(|e| e.to_string())?;
    let want = GWElem::from_ints(k, &[-2, 1], &[]).unwrap();
    ensure(gw_equal(&t, &want).unwrap(), || format!("tr<1+sqrt2> is {t}"))?;
    Ok(())
}

// ---------------------------------------------------------------- criterion 4

fn dyadic_quotient() -> Result<(), String> {
    let k = FieldDescriptor::PAdic(2);
    let gens: Vec<GWElem> = [3, 5, 7]
        .iter()
        .map(|&u| GWElem::from_ints(k, &[2, u], &[]).unwrap())
        .chain([1, 3, 5, 7].iter().map(|&u| GWElem::from_ints(k, &[2, 2 * u], &[]).unwrap()))
        .collect();
    let report = quotient_by_even_ideal(k, &gens).map_err(|e| e.to_string())?;
    ensure(report == QuotientReport::CyclicOfOrderTwo, || format!("quotient is {report:?}"))?;
    let chi = gw_add(&GWElem::hyperbolic(k, 1), &GWElem::from_ints(k, &[2, 2], &[]).unwrap()).unwrap();
    ensure(ideal_membership(&chi, &gens).unwrap(), || "<1,-1>+<2,2> not in I".into())?;
    ensure(!ideal_membership(&GWElem::from_ints(k, &[1], &[]).unwrap(), &gens).unwrap(), || {
        "<1> in I".into()
    })?;
    Ok(())
}

// ---------------------------------------------------------------- criterion 5

fn open_case() -> Result<(), String> {
    for p in [3u64, 5] {
        let k = FieldDescriptor::PAdic(p);
        let u = least_non_residue(p) as i64;
        let pi = p as i64;
        let coeffs = [u, pi, -u * pi];
        let problem = QuadricProblem::from_ints(k, &coeffs).unwrap();
        let d = decide_section(&problem).map_err(|e| e.to_string())?;
        ensure(d.verdict == Verdict::Unknown, || format!("p={p}: verdict {}", d.verdict))?;
        ensure(has_rational_point(&problem).unwrap() == PointStatus::No, || format!("p={p}: point found"))?;
        let form = problem.form();
        ensure(!is_isotropic(&form).unwrap(), || format!("p={p}: q isotropic"))?;
        let extended = form.extended(q(-1)).unwrap();
        ensure(!is_isotropic(&extended).unwrap(), || format!("p={p}: q + <-1> isotropic"))?;
        let minus_prod = k.neg(&k.product(&form.coeffs));
        ensure(in_value_group_squared(&form, &minus_prod).unwrap() == Some(true), || {
            format!("p={p}: necessary condition fails")
        })?;
    }
    Ok(())
}

// ---------------------------------------------------------------- criterion 6

fn certificate_soundness() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let fields = [
        FieldDescriptor::Rationals,
        FieldDescriptor::FinitePrime(3),
        FieldDescriptor::FinitePrime(5),
        FieldDescriptor::FinitePrime(7),
        FieldDescriptor::FinitePrime(11),
        FieldDescriptor::PAdic(2),
        FieldDescriptor::PAdic(3),
        FieldDescriptor::PAdic(5),
    ];
    let mut certified = 0;
    for _ in 0..200 {
        let k = fields[rng.gen_range(0..fields.len())];
        let n = rng.gen_range(1..=6usize);
        let problem = loop {
            let a: Vec<i64> = (0..=n)
                .map(|_| {
                    let x = rng.gen_range(1..=9i64);
                    if rng.gen_bool(0.5) { x } else { -x }
                })
                .collect();
            if let Ok(p) = QuadricProblem::from_ints(k, &a) {
                break p;
            }
        };
        let d = decide_section(&problem).map_err(|e| e.to_string())?;
        if n % 2 == 1 {
            ensure(d.certificate.is_some(), || format!("{k} {:?}: odd n without certificate", problem.coeffs))?;
        }
        if let Some(c) = &d.certificate {
            certified += 1;
            ensure(verify_section(&problem, c).map_err(|e| e.to_string())?, || {
                format!("{k} {:?}: certificate rejected", problem.coeffs)
            })?;
        }
    }
    ensure(certified > 100, || format!("only {certified} certificates emitted"))
}

// ---------------------------------------------------------------- criterion 7

fn pfister_neighbour_lemma() -> Result<(), String> {
    for k in [
        FieldDescriptor::FinitePrime(3),
        FieldDescriptor::FinitePrime(5),
        FieldDescriptor::FinitePrime(7),
        FieldDescriptor::PAdic(3),
        FieldDescriptor::PAdic(5),
        FieldDescriptor::PAdic(2),
    ] {
        let reps: Vec<FieldElem> = square_class_group(k).unwrap().iter().map(|c| c.rep_elem()).collect();
        for a1 in &reps {
            for a2 in &reps {
                for a3 in &reps {
                    let form = DiagonalForm::new(k, vec![a1.clone(), a2.clone(), a3.clone()]).unwrap();
                    let lhs = value_group_squared(&form).map_err(|e| e.to_string())?.members;
                    let pf = dim3_neighbor_pfister(k, a1, a2, a3).unwrap();
                    let rhs = represented_classes(&pf).map_err(|e| e.to_string())?;
                    ensure(lhs == rhs, || format!("{k} {form}: {lhs:?} vs {rhs:?}"))?;
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- criterion 8

fn random_rational(rng: &mut ChaCha8Rng) -> Rat {
    let n = rng.gen_range(1..=200_000i64);
    let d = rng.gen_range(1..=2_000i64);
    let r = rat(n, d);
    if rng.gen_bool(0.5) { r } else { -r }
}

fn perfect_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as f64).sqrt() as i64;
    (r.saturating_sub(2)..=r + 2).any(|s| s >= 0 && s * s == n)
}

/// A nonzero integer zero of `Σ aᵢxᵢ²` with `|xᵢ| ≤ h`, found by fixing all but
/// the last coordinate and solving for it.
fn brute_force_zero(a: &[i64], h: i64) -> bool {
    let m = a.len();
    let last = a[m - 1];
    let mut x = vec![-h; m - 1];
    loop {
        let s: i64 = a[..m - 1].iter().zip(&x).map(|(c, t)| c * t * t).sum();
        let nonzero = x.iter().any(|&t| t != 0);
        if nonzero && s % last == 0 && perfect_square(-s / last) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == m - 1 {
                return false;
            }
            x[i] += 1;
            if x[i] <= h {
                break;
            }
            x[i] = -h;
            i += 1;
        }
    }
}

fn squarefree(n: i64) -> bool {
    let n = n.abs();
    (2..=n).take_while(|d| d * d <= n).all(|d| n % (d * d) != 0)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

fn reciprocity_and_local_global() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    for _ in 0..500 {
        let a = random_rational(&mut rng);
        let b = random_rational(&mut rng);
        let primes = relevant_primes([&a, &b]).map_err(|e| e.to_string())?;
        let mut product = hilbert_symbol(Place::Real, &a, &b).unwrap();
        for p in primes {
            product *= hilbert_symbol(Place::Prime(p), &a, &b).unwrap();
        }
        ensure(product == 1, || format!("product formula fails for ({a}, {b})"))?;
    }

    let k = FieldDescriptor::Rationals;
    // arbitrary small forms: a zero found by search must be confirmed
    for _ in 0..150 {
        let m = rng.gen_range(2..=4usize);
        let a: Vec<i64> = (0..m)
            .map(|_| {
                let x = rng.gen_range(1..=12i64);
                if rng.gen_bool(0.5) { x } else { -x }
            })
            .collect();
        let verdict = is_isotropic(&DiagonalForm::from_ints(k, &a).unwrap()).unwrap();
        let h = if m == 4 { 25 } else { 50 };
        if brute_force_zero(&a, h) {
            ensure(verdict, || format!("{a:?}: oracle found a zero, verdict says anisotropic"))?;
        }
    }
    // squarefree pairwise-coprime ternaries: a zero exists below √|bc| when one exists
    // at all, so the height-50 oracle is exact here
    let mut checked = 0;
    while checked < 150 {
        let a: Vec<i64> = (0..3)
            .map(|_| {
                let x = rng.gen_range(1..=30i64);
                if rng.gen_bool(0.5) { x } else { -x }
            })
            .collect();
        if !a.iter().all(|&x| squarefree(x)) || gcd(a[0], a[1]) != 1 || gcd(a[0], a[2]) != 1 || gcd(a[1], a[2]) != 1 {
            continue;
        }
        checked += 1;
        let verdict = is_isotropic(&DiagonalForm::from_ints(k, &a).unwrap()).unwrap();
        let oracle = brute_force_zero(&a, 50);
        ensure(verdict == oracle, || format!("{a:?}: verdict {verdict}, oracle {oracle}"))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- criterion 9

/// Square-class label of a nonzero integer value, computed from scratch:
/// `(valuation parity, unit class)` with unit class by Euler's criterion for
/// odd p and by the residue mod 8 for p = 2.
fn local_class(v: i64, p: u64) -> (u32, i64) {
    let p = p as i64;
    let mut v = v;
    let mut e = 0;
    while v % p == 0 {
        v /= p;
        e += 1;
    }
    let unit = if p == 2 {
        v.rem_euclid(8)
    } else {
        let r = v.rem_euclid(p);
        let mut acc = 1i64;
        for _ in 0..(p - 1) / 2 {
            acc = acc * r % p;
        }
        acc
    };
    (e % 2, unit)
}

fn class_mul(x: (u32, i64), y: (u32, i64), p: u64) -> (u32, i64) {
    let m = if p == 2 { 8 } else { p as i64 };
    ((x.0 + y.0) % 2, x.1 * y.1 % m)
}

/// Values of `q` on the integer box `[−h, h]^m`, reduced to local square classes.
fn enumerate_classes(a: &[i64], h: i64, residue: impl Fn(i64) -> Option<(u32, i64)>) -> Vec<(u32, i64)> {
    let m = a.len();
    let mut out = Vec::new();
    let mut x = vec![-h; m];
    loop {
        let v: i64 = a.iter().zip(&x).map(|(c, t)| c * t * t).sum();
        if let Some(c) = residue(v) {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        let mut i = 0;
        loop {
            if i == m {
                return out;
            }
            x[i] += 1;
            if x[i] <= h {
                break;
            }
            x[i] = -h;
            i += 1;
        }
    }
}

fn closure(gens: &[(u32, i64)], p: u64) -> Vec<(u32, i64)> {
    let mut group = vec![(0u32, 1i64)];
    let mut frontier = group.clone();
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = class_mul(x, *g, p);
            if !group.contains(&y) {
                group.push(y);
                frontier.push(y);
            }
        }
    }
    group
}

fn theorem_oracle() -> Result<(), String> {
    let cases: [(FieldDescriptor, &[i64]); 4] = [
        (FieldDescriptor::FinitePrime(3), &[1, 2]),
        (FieldDescriptor::FinitePrime(5), &[1, 2]),
        (FieldDescriptor::PAdic(2), &[1, -1, 5, -5, 2, -2, 10, -10]),
        (FieldDescriptor::PAdic(3), &[1, 2, 3, 6]),
    ];
    let mut decided = 0;
    for (k, reps) in cases {
        let (p, finite) = match k {
            FieldDescriptor::FinitePrime(p) => (p, true),
            FieldDescriptor::PAdic(p) => (p, false),
            _ => unreachable!(),
        };
        let minus_one = local_class(-1, p);
        let one = local_class(1, p);
        for n in [2usize, 4] {
            let m = n + 1;
            // finite fields: exhaustive over 𝔽_p^m; p-adic: an integer box
            let h = if finite { (p as i64 - 1) / 2 } else if m == 3 { 8 } else { 3 };
            let mut idx = vec![0usize; m];
            loop {
                // coefficient multisets only: nondecreasing index tuples
                if idx.windows(2).all(|w| w[0] <= w[1]) {
                    let a: Vec<i64> = idx.iter().map(|&i| reps[i]).collect();
                    let residue = |v: i64| {
                        let v = if finite { v.rem_euclid(p as i64) } else { v };
                        (v != 0).then(|| local_class(v, p))
                    };
                    let d = enumerate_classes(&a, h, residue);
                    if d.contains(&one) {
                        let group = closure(&d, p);
                        let expected = group.contains(&minus_one);
                        let problem = QuadricProblem::from_ints(k, &a).unwrap();
                        let verdict = decide_section(&problem).map_err(|e| e.to_string())?.verdict;
                        let want = if expected { Verdict::SectionExists } else { Verdict::NoSection };
                        ensure(verdict == want, || format!("{k} {a:?}: got {verdict}, oracle {want}"))?;
                        decided += 1;
                    }
                }
                let mut i = 0;
                loop {
                    if i == m {
                        break;
                    }
                    idx[i] += 1;
                    if idx[i] < reps.len() {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                }
                if i == m {
                    break;
                }
            }
        }
    }
    ensure(decided > 100, || format!("only {decided} problems had a point"))
}

fn main() -> ExitCode {
    let criteria: [(u8, &str, Check, Duration); 9] = [
        (1, "sphere decision table", sphere_table, Duration::from_secs(1)),
        (2, "euler characteristic of the sphere closure", euler_values, Duration::from_secs(1)),
        (3, "dyadic trace transfers", dyadic_transfers, Duration::from_secs(1)),
        (4, "dyadic even-ideal quotient", dyadic_quotient, Duration::from_secs(10)),
        (5, "open-case fidelity", open_case, Duration::from_secs(1)),
        (6, "certificate soundness", certificate_soundness, Duration::from_secs(30)),
        (7, "Pfister neighbour lemma in dimension 3", pfister_neighbour_lemma, Duration::from_secs(30)),
        (8, "Hilbert reciprocity and local-global isotropy", reciprocity_and_local_global, Duration::from_secs(60)),
        (9, "point criterion against enumeration", theorem_oracle, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (id, name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            ensure(elapsed <= limit, || format!("took {elapsed:?}, limit {limit:?}"))
        });
        match outcome {
            Ok(()) => println!("criterion {id}: PASS  {name} ({:.3}s)", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {id}: FAIL  {name} ({:.3}s): {why}", elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
