use normal_order::combinat::bell_poly;
use normal_order::flow::{self, QvSymbol};
use normal_order::fps::elementary;
use normal_order::rational::{int, ratio};
use normal_order::sheffer::{apply_ladder, catalog, ladder_ops, sequence_from_ab, Family};
use normal_order::{NormalForm, Poly, Series, ShefferPair, Side};
use proptest::prelude::*;

fn small_poly(order: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec(-3i64..=3, 4).prop_map(move |c| Series::from_ints(&c, order))
}

fn sheffer_ab(order: usize) -> impl Strategy<Value = (Series, Series)> {
    (
        prop::collection::vec((-3i64..=3, 1i64..=2), order),
        prop::collection::vec((-3i64..=3, 1i64..=2), order - 1),
        prop_oneof![Just(1i64), Just(-1), Just(2)],
    )
        .prop_map(move |(a, b, lead)| {
            let mut ac = vec![int(1)];
            ac.extend(a.into_iter().map(|(p, q)| ratio(p, q)));
            let mut bc = vec![int(0), int(lead)];
            bc.extend(b.into_iter().map(|(p, q)| ratio(p, q)));
            (Series::new(ac, order), Series::new(bc, order))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ladder_commutator_and_raising((a, b) in sheffer_ab(10)) {
        let pair = ShefferPair::from_ab(a.clone(), b.clone()).unwrap();
        let seq = sequence_from_ab(&a, &b, 7).unwrap();
        let (m, p) = ladder_ops(&pair).unwrap();
        // s_n = M^n s_0
        let mut s = seq[0].clone();
        for (n, want) in seq.iter().enumerate() {
            prop_assert_eq!(&s, want, "n = {}", n);
            if n < 7 {
                s = apply_ladder(&m, &s).unwrap();
            }
        }
        // [P, M] = 1 on every s_n with room to spare
        for sn in seq.iter().take(5) {
            let pm = apply_ladder(&p, &apply_ladder(&m, sn).unwrap()).unwrap();
            let mp = apply_ladder(&m, &apply_ladder(&p, sn).unwrap()).unwrap();
            prop_assert_eq!(pm.sub(&mp), sn.clone());
        }
    }

    #[test]
    fn sequence_matches_generating_function((a, b) in sheffer_ab(8), x in -3i64..=3) {
        // Σ s_n(x) λ^n/n! = A(λ)e^{xB(λ)} at an integer x
        let seq = sequence_from_ab(&a, &b, 8).unwrap();
        let gen = a.mul(&b.scale(&int(x)).exp().unwrap());
        for (n, sn) in seq.iter().enumerate() {
            let fact: i64 = (1..=n as i64).product();
            prop_assert_eq!(sn.eval(&int(x)), gen.coeff(n) * int(fact));
        }
    }

    #[test]
    fn flow_matches_lie_series(q in small_poly(16), v in small_poly(16)) {
        // c_{n+1} = q c_n'/(n+1),  g_{n+1} = (q g_n' + v g_n)/(n+1)
        let t = flow::solve_t(&q, &int(0), 6).unwrap();
        let g = flow::solve_g(&v, &t, 6).unwrap();
        let mut c = Series::x(16);
        let mut gn = Series::one(16);
        for n in 0..=6 {
            prop_assert!(t.coeff(n).agrees_with(&c), "T at n = {}", n);
            prop_assert!(g.coeff(n).agrees_with(&gn), "G at n = {}", n);
            let k = ratio(1, n as i64 + 1);
            c = q.truncate(c.order() - 1).mul(&c.deriv()).scale(&k);
            gn = q.truncate(gn.order() - 1).mul(&gn.deriv()).add(&v.truncate(gn.order() - 1).mul(&gn.truncate(gn.order() - 1))).scale(&k);
        }
    }

    #[test]
    fn duality_sides_agree(q in small_poly(20), v in small_poly(20)) {
        let sym = QvSymbol::at_origin(q, v);
        let cre = flow::normal_exponential(&sym, Side::CreationLinear, 4).unwrap();
        let ann = flow::normal_exponential(&sym, Side::AnnihilationLinear, 4).unwrap();
        let conj: Vec<NormalForm> = cre.expansion.iter().map(NormalForm::conjugate).collect();
        prop_assert_eq!(conj, ann.expansion);
    }

    #[test]
    fn qv_round_trip_from_operator(q in small_poly(12), v in small_poly(12), zp in -2i64..=2) {
        let zp = int(zp);
        let sym = QvSymbol::at_origin(q, v).recenter(&zp);
        prop_assume!(!sym.q.constant_term().eq(&int(0)));
        let (a, b) = flow::sheffer_from_qv(&sym, &zp, 10).unwrap();
        let back = flow::qv_from_sheffer(&a, &b, &zp).unwrap();
        prop_assert!(back.q.agrees_with(&sym.q));
        prop_assert!(back.v.agrees_with(&sym.v));
    }

    #[test]
    fn semigroup_holds(q in small_poly(16), v in small_poly(16)) {
        let sym = QvSymbol::at_origin(q, v);
        prop_assert_eq!(flow::semigroup_defect(&sym, 5).unwrap(), None);
    }
}

#[test]
fn bell_generating_function_as_biseries() {
    // Σ B(n,x) λ^n/n! = e^{x(e^λ-1)}
    let order = 10;
    let b = elementary::exp_x(order).sub(&Series::one(order));
    let seq = sequence_from_ab(&Series::one(order), &b, order).unwrap();
    for (n, s) in seq.iter().enumerate() {
        assert_eq!(*s, bell_poly(n));
    }
    // Same through the flow: q = x, v = 0 gives T = x e^λ, so
    // exp((T - x)·y) normal-orders a†a.
    let sym = QvSymbol::at_origin(Series::x(24), Series::zero(24));
    let ne = flow::normal_exponential(&sym, Side::CreationLinear, order).unwrap();
    for (n, nf) in ne.expansion.iter().enumerate() {
        let fact: i64 = (1..=n as i64).product();
        let bn = bell_poly(n);
        for k in 0..=n {
            assert_eq!(nf.coeff(k as u32, k as u32) * int(fact), bn.coeff(k));
        }
    }
}

#[test]
fn every_family_is_monomial_through_ten() {
    for family in Family::ALL {
        let pair = catalog(family, 12);
        let report = normal_order::sheffer::monomiality_check(&pair, 10).unwrap();
        assert!(report.passed(), "{family}: {:?}", report.first_failure());
        assert_eq!(report.checks, 33);
    }
}

#[test]
fn hermite_coherent_closed_form() {
    // e^{λ(2a† - a)}: ⟨z'|·|z⟩/⟨z'|z⟩ = exp(2λz'^* - λz - λ²)
    let sym = QvSymbol::at_origin(Series::from_ints(&[-1], 48), Series::from_ints(&[0, 2], 48));
    for (zp, z) in [((0.3, 0.2), (-0.1, 0.5)), ((0.6, 0.0), (0.6, 0.0))] {
        let zp = num_complex::Complex64::new(zp.0, zp.1);
        let z = num_complex::Complex64::new(z.0, z.1);
        let lambda = 0.3;
        let got = flow::coherent_element(&sym, Side::CreationLinear, lambda, zp, z, 20).unwrap();
        let want = (2.0 * lambda * zp.conj() - lambda * z - lambda * lambda).exp();
        assert!((got - want).norm() < 1e-10);
    }
}

#[test]
fn number_state_elements_use_the_sequence() {
    let pair = catalog(Family::Bell, 10);
    let z = num_complex::Complex64::new(0.4, 0.1);
    let got = flow::number_state_element(&pair, 3, 0, z).unwrap();
    let b3: Poly = bell_poly(3);
    let want = b3.eval_complex(z.conj()) * (-z.norm_sqr() / 2.0).exp();
    assert!((got - want).norm() < 1e-14);
}
