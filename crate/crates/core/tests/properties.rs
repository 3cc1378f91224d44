//! Randomized invariants across the modules.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use proptest::prelude::*;

use normform::arith::linalg;
use normform::arith::rational::{fmt_rational, int, parse_rational, rat, Rational};
use normform::classify;
use normform::counterexamples::{CFNumber, CfWord};
use normform::forms::{self, DecomposableForm, Reduction};
use normform::numberfield::{FieldElement, NumberField};
use normform::orbits::{self, minkowski_bound, TorusChart, TorusElement};
use normform::spectrum::{enumerate_values, BoxSpec};

const FIELDS: [&str; 4] = ["x^2-2", "x^2+1", "x^3-2", "x^4-2"];

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn rationals_roundtrip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let q = rat(n, d);
        prop_assert_eq!(parse_rational(&fmt_rational(&q)).unwrap(), q);
    }

    #[test]
    fn norm_is_multiplicative(
        which in 0usize..4,
        a in prop::collection::vec(-6i64..=6, 4),
        b in prop::collection::vec(-6i64..=6, 4),
    ) {
        let k = NumberField::parse(FIELDS[which]).unwrap();
        let n = k.degree();
        let (x, y) = (FieldElement::from_ints(&a[..n]), FieldElement::from_ints(&b[..n]));
        let f = k.norm_form();
        let e = f.rational_expansion().unwrap();
        let xy = k.mul(&x, &y);
        prop_assert_eq!(e.eval(&xy.coords), e.eval_int(&a[..n]) * e.eval_int(&b[..n]));
        prop_assert_eq!(k.norm(&x), e.eval_int(&a[..n]));
    }

    #[test]
    fn convergents_are_unimodular_and_close(prefix in prop::collection::vec(1u32..=4, 1..4), period in prop::collection::vec(1u32..=4, 1..4), depth in 4usize..40) {
        let x = CFNumber::new(CfWord::Periodic { prefix, period }, depth).unwrap();
        prop_assert!(x.convergent_quality());
        for w in x.convergents.windows(2) {
            let ((p0, q0), (p1, q1)) = (&w[0], &w[1]);
            prop_assert_eq!((p1 * q0 - p0 * q1).abs(), BigInt::one());
        }
        prop_assert!(x.interval.0 < x.interval.1);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn torus_elements_preserve_the_form(which in 0usize..4, u in prop::collection::vec(-2.0f64..2.0, 3), th in prop::collection::vec(-3.2f64..3.2, 2)) {
        let f = NumberField::parse(FIELDS[which]).unwrap().norm_form();
        let chart = TorusChart::new(&f).unwrap();
        let (s, t) = f.signature();
        let h = TorusElement::from_f64(&u[..chart.parameter_count()], &th[..t]);
        let tm = orbits::torus_matrix(&chart, &h).unwrap();
        prop_assert!(tm.invariance_residual < 1e-9, "residual {}", tm.invariance_residual);
        prop_assert!((tm.det - 1.0).abs() < 1e-9, "det {}", tm.det);
        let sys = orbits::systole(&tm.lattice().unwrap()).unwrap();
        prop_assert!(sys.length <= minkowski_bound(s + 2 * t) + 1e-12);
    }

    #[test]
    fn composing_torus_elements_multiplies_matrices(u1 in -1.5f64..1.5, u2 in -1.5f64..1.5, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let f = NumberField::parse("x^3-2").unwrap().norm_form();
        let chart = TorusChart::new(&f).unwrap();
        let (h1, h2) = (TorusElement::from_f64(&[u1], &[a]), TorusElement::from_f64(&[u2], &[b]));
        let g1 = orbits::torus_matrix(&chart, &h1).unwrap().g;
        let g2 = orbits::torus_matrix(&chart, &h2).unwrap().g;
        let g12 = orbits::torus_matrix(&chart, &h1.compose(&h2)).unwrap().g;
        for i in 0..3 {
            for j in 0..3 {
                let p: f64 = (0..3).map(|k| g1[i][k] * g2[k][j]).sum();
                prop_assert!((p - g12[i][j]).abs() < 1e-9 * (1.0 + p.abs()));
            }
        }
    }

    #[test]
    fn unit_span_is_closed(e1 in 1u32..4, e2 in 0u32..3, copies in 1usize..3) {
        let k = NumberField::parse("x^2-2").unwrap();
        let u = FieldElement::from_ints(&[3, 2]);
        let gens: Vec<_> = classify::unit_matrices(&k, &[k.pow(&u, e1), k.pow(&u, e2)])
            .iter()
            .map(|m| classify::block_diagonal(m, copies))
            .collect();
        let a = classify::span_algebra(2 * copies, &gens).unwrap();
        prop_assert!(a.closed);
        prop_assert_eq!(a.dim, 2);
        for x in &a.basis {
            for y in &a.basis {
                let xy = linalg::mat_mul(x, y);
                let mut rows: Vec<Vec<Rational>> = a.basis.iter().map(|b| linalg::flatten(b)).collect();
                let r = linalg::rank(&rows);
                rows.push(linalg::flatten(&xy));
                prop_assert_eq!(linalg::rank(&rows), r);
            }
        }
    }

    #[test]
    fn spectra_grow_with_the_box(rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 2), 2), r in 1u32..4) {
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        prop_assume!(rows[0][0] * rows[1][1] != rows[0][1] * rows[1][0]);
        let f = DecomposableForm::from_int_linear(&refs).unwrap();
        let small = enumerate_values(&f, BoxSpec::new(r), &int(12)).unwrap().rational_values().unwrap();
        let big = enumerate_values(&f, BoxSpec::new(r + 1), &int(12)).unwrap().rational_values().unwrap();
        prop_assert!(small.iter().all(|v| big.contains(v)));
    }

    #[test]
    fn reduction_preserves_values(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 2), probe in prop::collection::vec(-9i64..=9, 3)) {
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let minors = [(0, 1), (0, 2), (1, 2)].map(|(i, j)| rows[0][i] * rows[1][j] - rows[0][j] * rows[1][i]);
        prop_assume!(minors.iter().any(|&m| m != 0));
        let f = DecomposableForm::from_int_linear(&refs).unwrap();
        let Reduction::Reduced { tau, g, .. } = forms::reduce_variables(&f).unwrap() else {
            return Err(TestCaseError::fail("integer kernel must be rational"));
        };
        prop_assert!(forms::is_unimodular(&tau));
        let v: Vec<Rational> = probe.iter().map(|&x| int(x)).collect();
        let tv = linalg::mat_vec(&tau, &v);
        prop_assert_eq!(f.rational_expansion().unwrap().eval(&v), g.rational_expansion().unwrap().eval(&tv[..2]));
    }
}
