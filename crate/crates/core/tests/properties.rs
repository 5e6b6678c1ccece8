use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use qplab::algebra::field::{format_rational, parse_rational, rat, ratio};
use qplab::algebra::matrix::{fraction_free_echelon, rank_exact, rref, same_span};
use qplab::algebra::{nullspace_exact, nullspace_naive, BinaryForm, Biquad, Field, Matrix, ProjParam, Radicands, Rational};
use qplab::fibration::{exact_sample, phi_x};
use qplab::pencil::{sign_group_elements, PencilOfQuadrics};
use qplab::rng::substream;
use qplab::skew::{pfaffian, random_rank2, rank2_orthogonal_decomposition, SkewMap};
use qplab::variety::{canonical_gauge, gauge_equivalent};

fn small_rat() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| ratio(n, d))
}

fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec(-4i64..=4, rows * cols).prop_map(move |v| {
        Matrix::from_rows(v.chunks(cols).map(|r| r.iter().map(|&x| rat(x)).collect()).collect()).unwrap()
    })
}

fn skew(n: usize) -> impl Strategy<Value = SkewMap<Rational>> {
    prop::collection::vec(-5i64..=5, n * (n - 1) / 2).prop_map(move |v| {
        SkewMap::from_upper(n, &v.into_iter().map(rat).collect::<Vec<_>>()).unwrap()
    })
}

fn biquad() -> impl Strategy<Value = Biquad> {
    prop::array::uniform4(small_rat()).prop_map(|c| {
        // 2 and 3 are non-squares with non-square product
        let ctx = Radicands::new(rat(2), rat(-3)).unwrap();
        Biquad::new(&ctx, c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn echelon_forms_agree(m in (1usize..5, 1usize..6).prop_flat_map(|(r, c)| int_matrix(r, c))) {
        let (_, piv_ff) = fraction_free_echelon(&m).unwrap();
        let (_, piv_rref) = rref(&m).unwrap();
        prop_assert_eq!(&piv_ff, &piv_rref);
        prop_assert_eq!(rank_exact(&m), piv_ff.len());
        let a = nullspace_exact(&m).unwrap();
        let b = nullspace_naive(&m).unwrap();
        prop_assert_eq!(a.len(), m.cols() - piv_ff.len());
        prop_assert!(same_span(&a, &b, m.cols(), 0.0));
        for v in &a {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(Field::is_zero));
        }
    }

    #[test]
    fn biquad_field_axioms(a in biquad(), b in biquad(), c in biquad()) {
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!((a.clone() * b.clone()).norm(), a.norm() * b.norm());
        if let Some(inv) = a.inv() {
            prop_assert_eq!(a * inv, Biquad::one());
        } else {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn rationals_roundtrip_as_text(q in small_rat()) {
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }

    #[test]
    fn pfaffian_squares_to_determinant(a in (2usize..=4).prop_flat_map(|h| skew(2 * h))) {
        let pf = pfaffian(&a);
        prop_assert_eq!(pf.clone() * pf, a.matrix().det().unwrap());
    }

    #[test]
    fn pfaffian_is_congruence_covariant(a in skew(4), p in int_matrix(4, 4)) {
        let b = a.congruent(&p).unwrap();
        prop_assert_eq!(pfaffian(&b), p.det().unwrap() * pfaffian(&a));
    }

    #[test]
    fn rank_two_kernel_is_orthogonal_to_image(seed in any::<u64>(), half in 2usize..=4) {
        let r = random_rank2(&mut substream(seed, 0, 0), 2 * half, 4);
        let d = rank2_orthogonal_decomposition(&r).unwrap();
        prop_assert!(d.is_orthogonal());
        prop_assert_eq!(d.kernel.len() + d.image.len(), 2 * half);
    }

    #[test]
    fn roots_reconstruct_the_form(roots in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..6)) {
        // prod_i (a - r_i b)
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &(re, im) in &roots {
            let r = Complex64::new(re, im);
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k] += c;
                next[k + 1] -= c * r;
            }
            coeffs = next;
        }
        let f = BinaryForm::new(roots.len(), coeffs).unwrap();
        let found = f.roots().unwrap();
        prop_assert_eq!(found.len(), roots.len());
        for &(re, im) in &roots {
            let want = ProjParam::new(Complex64::new(re, im), Complex64::new(1.0, 0.0));
            let best = found.iter().map(|p| p.distance(&want)).fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-5, "root {re}+{im}i missed by {best}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gauge_normal_form_is_idempotent(seed in any::<u64>(), i in 0u32..8) {
        let p = Arc::new(PencilOfQuadrics::canonical(2).unwrap());
        let s = exact_sample(&p, seed, 0, i, false).unwrap();
        let c = canonical_gauge(&s.point, &s.covector).unwrap();
        let again = canonical_gauge(&s.point, &c).unwrap();
        prop_assert_eq!(again.eta(), c.eta());
        prop_assert!(gauge_equivalent(&s.point, &c, &s.covector, 0.0).unwrap());
        prop_assert_eq!(phi_x(&s.point, &c).unwrap(), phi_x(&s.point, &s.covector).unwrap());
    }

    #[test]
    fn sign_changes_are_involutions(seed in any::<u64>(), k in 0usize..32) {
        let p = Arc::new(PencilOfQuadrics::canonical(2).unwrap());
        let s = exact_sample(&p, seed, 0, 0, false).unwrap();
        let e = &sign_group_elements(&p)[k];
        let twice = s.point.act(e).unwrap().act(e).unwrap();
        prop_assert_eq!(twice.coords(), s.point.coords());
        let back = s.covector.act(e).unwrap().act(e).unwrap();
        prop_assert_eq!(back.eta(), s.covector.eta());
    }
}
