use num_complex::Complex64;
use proptest::prelude::*;
use rug::Rational;
use splitdec::field::{GroundField, QSign, Scalar};
use splitdec::linalg::Mat;
use splitdec::subspace::{DirectSum, Subspace};

const BS: [i64; 7] = [2, 3, 5, 6, -2, -3, -7];

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| Rational::from((n, d)))
}

fn field() -> impl Strategy<Value = GroundField> {
    (0..BS.len(), any::<bool>()).prop_map(|(i, plus)| {
        GroundField::new(BS[i], if plus { QSign::Plus } else { QSign::Minus }).unwrap()
    })
}

fn triple() -> impl Strategy<Value = (GroundField, Scalar, Scalar, Scalar)> {
    (field(), rational(), rational(), rational(), rational(), rational(), rational()).prop_map(
        |(f, a0, a1, b0, b1, c0, c1)| {
            let x = f.scalar(a0, a1);
            let y = f.scalar(b0, b1);
            let z = f.scalar(c0, c1);
            (f, x, y, z)
        },
    )
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn field_axioms((f, x, y, z) in triple()) {
        let zero = f.int(0);
        let one = f.int(1);
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x + &zero, x.clone());
        prop_assert_eq!(&x * &one, x.clone());
        prop_assert_eq!(&x - &x, zero.clone());
        if !x.is_zero() {
            prop_assert_eq!(&x * &x.recip().unwrap(), one);
        } else {
            prop_assert!(x.recip().is_err());
        }
    }

    #[test]
    fn numeric_value_is_a_homomorphism((f, x, y, _z) in triple()) {
        let (cx, cy) = (f.to_complex(&x), f.to_complex(&y));
        prop_assert!(close(f.to_complex(&(&x * &y)), cx * cy));
        prop_assert!(close(f.to_complex(&(&x + &y)), cx + cy));
        prop_assert!(close(f.to_complex(&x.conj()), cx.conj()));
        prop_assert!(close(f.to_complex(&f.q()) * f.to_complex(&f.q()), Complex64::new(f.b() as f64, 0.0)));
    }

    #[test]
    fn conj_and_sigma_are_automorphisms((f, x, y, _z) in triple()) {
        prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
        prop_assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
        prop_assert_eq!(x.conj().conj(), x.clone());
        let s = |v: &Scalar| f.sigma(v).unwrap();
        prop_assert_eq!(s(&(&x * &y)), &s(&x) * &s(&y));
        prop_assert_eq!(s(&(&x + &y)), &s(&x) + &s(&y));
        prop_assert_eq!(s(&s(&x)), x.clone());
        prop_assert_eq!(s(&f.q()), -f.q());
        if f.b() < 0 {
            prop_assert_eq!(x.conj(), s(&x));
        } else {
            prop_assert_eq!(x.conj(), x.clone());
        }
    }

    #[test]
    fn text_round_trip((f, x, _y, _z) in triple()) {
        prop_assert_eq!(f.parse_scalar(&x.to_string()).unwrap(), x);
    }
}

/// Column vectors with small integer entries, often dependent.
fn columns(n: usize) -> impl Strategy<Value = Mat<Rational>> {
    (1usize..=3, 0usize..=n).prop_flat_map(move |(rank, k)| {
        (
            proptest::collection::vec(-3i64..=3, n * rank),
            proptest::collection::vec(-2i64..=2, rank * k),
        )
            .prop_map(move |(gens, mix)| {
                let g = Mat::from_fn(n, rank, |r, c| Rational::from(gens[r * rank + c]));
                let m = Mat::from_fn(rank, k, |r, c| Rational::from(mix[r * k + c]));
                g.matmul(&m)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dimension_formula(u in columns(6), w in columns(6)) {
        let u = Subspace::span(&u);
        let w = Subspace::span(&w);
        let sum = u.sum(&w).unwrap();
        let meet = u.intersect(&w).unwrap();
        prop_assert_eq!(sum.dim() + meet.dim(), u.dim() + w.dim());
        prop_assert_eq!(&sum.recanonicalize(), &sum);
        prop_assert_eq!(&meet.recanonicalize(), &meet);
        prop_assert!(sum.contains(&u) && sum.contains(&w));
        prop_assert!(u.contains(&meet) && w.contains(&meet));
    }

    #[test]
    fn basis_is_canonical(u in columns(5), mix in proptest::collection::vec(-2i64..=2, 25)) {
        let span = Subspace::span(&u);
        let m = Mat::from_fn(u.cols(), u.cols(), |r, c| {
            Rational::from(if r == c { 1 } else { mix[(r * 5 + c) % 25] * i64::from(r < c) })
        });
        let again = Subspace::span(&u.matmul(&m));
        prop_assert_eq!(&span, &again);
        prop_assert_eq!(span.basis().rank(), span.dim());
    }

    #[test]
    fn orthogonal_complement(u in columns(6)) {
        let u = Subspace::span(&u);
        let full = Subspace::full(6);
        let perp = Subspace::orth_complement_within(&u, &full).unwrap();
        prop_assert_eq!(&perp.recanonicalize(), &perp);
        prop_assert_eq!(perp.dim() + u.dim(), 6);
        prop_assert!(u.intersect(&perp).unwrap().is_zero());
        let gram = u.basis().transpose().matmul(perp.basis());
        prop_assert!(gram.is_zero());
    }

    #[test]
    fn direct_sum_projectors(u in columns(5)) {
        let u = Subspace::span(&u);
        let perp = Subspace::orth_complement_within(&u, &Subspace::full(5)).unwrap();
        let ds = DirectSum::new(&[&u, &perp]).unwrap();
        let p0 = ds.projector(0);
        let p1 = ds.projector(1);
        prop_assert_eq!(p0.add(&p1), Mat::identity(5));
        prop_assert_eq!(p0.matmul(&p0), p0.clone());
        prop_assert!(p0.matmul(&p1).is_zero());
        prop_assert_eq!(p0.rank(), u.dim());
    }
}
