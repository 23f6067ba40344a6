//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use normal_order::boson::coherent_overlap;
use normal_order::combinat::{named_sequence, stirling2, NamedSequence};
use normal_order::flow::{self, QvSymbol};
use normal_order::fps::elementary;
use normal_order::rational::{int, ratio};
use normal_order::sheffer::{catalog, monomiality_check, Family};
use normal_order::{NormalForm, Rational, Series, Side};

type Outcome = Result<(), String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_poly(rng: &mut ChaCha8Rng, order: usize) -> Series {
    let c: Vec<i64> = (0..=3).map(|_| rng.gen_range(-3..=3)).collect();
    Series::from_ints(&c, order)
}

fn katriel() -> Outcome {
    for n in 1..=10u32 {
        let got = NormalForm::number().power(n);
        let want = NormalForm::from_terms((1..=n).map(|k| (k, k, Rational::from_integer(stirling2(n as usize, k as usize)))));
        check(got == want, || format!("(a†a)^{n} = {got}, want {want}"))?;
    }
    Ok(())
}

fn number_exponential() -> Outcome {
    let order = 8;
    let brute = NormalForm::number().exp_series(order);
    // :e^{y(e^λ-1)}: with y^k ↦ a†^k a^k, via [λ^n](e^λ-1)^k/k!.
    let base = elementary::exp_x(order).sub(&Series::one(order));
    for (n, got) in brute.iter().enumerate() {
        let mut want = NormalForm::zero();
        let mut pk = Series::one(order);
        for k in 0..=n {
            if k > 0 {
                pk = pk.mul(&base).scale(&ratio(1, k as i64));
            }
            want.add_term(k as u32, k as u32, pk.coeff(n).clone());
        }
        check(*got == want, || format!("λ^{n}: {got} != {want}"))?;
    }
    Ok(())
}

fn central_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let series_order = 26;
    for trial in 0..20 {
        let sym = QvSymbol::at_origin(random_poly(&mut rng, series_order), random_poly(&mut rng, series_order));
        for side in [Side::CreationLinear, Side::AnnihilationLinear] {
            let op = sym.operator(side).map_err(|e| e.to_string())?;
            let ne = flow::normal_exponential(&sym, side, 6).map_err(|e| e.to_string())?;
            let brute = op.exp_series(6);
            check(ne.expansion == brute, || {
                format!("trial {trial}, {}: q = {}, v = {}", side.name(), sym.q, sym.v)
            })?;
        }
    }
    Ok(())
}

fn monomiality() -> Outcome {
    for family in Family::ALL {
        let report = monomiality_check(&catalog(family, 12), 10).map_err(|e| e.to_string())?;
        check(report.passed(), || format!("{family}: {:?}", report.first_failure()))?;
    }
    Ok(())
}

fn sequences() -> Outcome {
    let expected: [(NamedSequence, &[i64]); 4] = [
        (NamedSequence::RForests(2), &[1, 1, 3, 13, 73, 501, 4051]),
        (NamedSequence::RForests(3), &[1, 1, 4, 25, 211, 2236, 28471]),
        (NamedSequence::PartitionsOfPartitions, &[1, 1, 3, 12, 60, 385, 2471]),
        (NamedSequence::BesselPaths, &[1, 1, 7, 37, 266, 2431]),
    ];
    let mut failures = Vec::new();
    for (seq, want) in expected {
        let rec = named_sequence(seq, want.len() - 1).map_err(|e| e.to_string())?;
        let got = rec.integers().ok_or("non-integer term")?;
        let want: Vec<BigInt> = want.iter().map(|&w| BigInt::from(w)).collect();
        if got != want {
            let shown: Vec<String> = got.iter().map(BigInt::to_string).collect();
            failures.push(format!("{}: computed {}", seq.name(), shown.join(",")));
        }
    }
    check(failures.is_empty(), || failures.join("; "))
}

fn reverse() -> Outcome {
    let n = 11;
    let sym = flow::qv_from_sheffer(&elementary::geometric(n), &Series::x(n), &int(1)).map_err(|e| e.to_string())?;
    check(sym.order() == 10 && sym.center == int(1), || "wrong order or center".into())?;
    check(sym.q == Series::one(10), || format!("q = {}", sym.q))?;
    // 1/(2 - x) about x = 1
    check(sym.v == elementary::geometric(10), || format!("v = {}", sym.v))?;

    let root = Series::from_ints(&[1, -2], n).pow_rational(&ratio(1, 2)).map_err(|e| e.to_string())?;
    let b = Series::one(n).sub(&root);
    let sym = flow::qv_from_sheffer(&Series::one(n), &b, &int(1)).map_err(|e| e.to_string())?;
    check(sym.q == elementary::geometric(10), || format!("q = {}", sym.q))?;
    check(sym.v == Series::zero(10), || format!("v = {}", sym.v))
}

fn duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let order = 10;
    for trial in 0..10 {
        let mut a: Vec<Rational> = (0..=order + 1).map(|_| ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))).collect();
        let mut b: Vec<Rational> = (0..=order + 1).map(|_| ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))).collect();
        // G(0, x) = 1 pins A(0) = 1.
        a[0] = Rational::one();
        b[0] = Rational::zero();
        if b[1].is_zero() {
            b[1] = int(-2);
        }
        let (a, b) = (Series::new(a, order + 1), Series::new(b, order + 1));
        let zp = ratio(rng.gen_range(-3..=3), rng.gen_range(1..=4));
        let sym = flow::qv_from_sheffer(&a, &b, &zp).map_err(|e| e.to_string())?;
        let (a2, b2) = flow::sheffer_from_qv(&sym, &zp, order).map_err(|e| e.to_string())?;
        check(a2 == a.truncate(order) && b2 == b.truncate(order), || format!("trial {trial}: A = {a}, B = {b}"))?;
    }
    Ok(())
}

fn fock_numeric() -> Outcome {
    let lambda = 0.25;
    let z = Complex64::new(0.6, 0.0);
    let zp = z;
    let overlap = coherent_overlap(zp, z);
    let cases = [
        ("bell", Series::x(40), Series::x(40), None),
        // M = 2X - D as a boson operator: 2a† - a
        ("hermite", Series::from_ints(&[-1], 40), Series::from_ints(&[0, 2], 40), Some((lambda * (2.0 * z.conj() - zp) - lambda * lambda).exp())),
    ];
    for (name, q, v, closed) in cases {
        let sym = QvSymbol::at_origin(q, v);
        let exact = flow::coherent_element(&sym, Side::CreationLinear, lambda, zp, z, 14).map_err(|e| e.to_string())?;
        let op = sym.operator(Side::CreationLinear).map_err(|e| e.to_string())?;
        let numeric = op.to_fock(30).exp(lambda).coherent_expectation(zp, z).map_err(|e| e.to_string())? / overlap;
        check((exact - numeric).norm() < 1e-8, || format!("{name}: series {exact}, Fock {numeric}"))?;
        if let Some(closed) = closed {
            check((exact - closed).norm() < 1e-8, || format!("{name}: series {exact}, closed form {closed}"))?;
        }
    }
    Ok(())
}

fn semigroup() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    for trial in 0..10 {
        let sym = QvSymbol::at_origin(random_poly(&mut rng, 20), random_poly(&mut rng, 20));
        let defect = flow::semigroup_defect(&sym, 8).map_err(|e| e.to_string())?;
        check(defect.is_none(), || format!("trial {trial}: q = {}, v = {}, first defect at {defect:?}", sym.q, sym.v))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("katriel_stirling", katriel),
        ("number_operator_exponential", number_exponential),
        ("central_formula_vs_bruteforce", central_formula),
        ("monomiality_catalog", monomiality),
        ("printed_sequences", sequences),
        ("reverse_procedure", reverse),
        ("duality_round_trip", duality),
        ("fock_numeric", fock_numeric),
        ("flow_semigroup", semigroup),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {} {name}: PASS ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
