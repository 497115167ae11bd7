use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;
use splitdec::field::{GroundField, QSign, Scalar};
use splitdec::graphs::{build_family, DistanceData, GraphSpec, IntersectionData};
use splitdec::linalg::FieldElem;
use splitdec::scheme::{natural_field_b, OrderingChoice, SchemeData};
use splitdec::split::{Kind, SplitSystem};

fn system<F: FieldElem>(spec: &str) -> SplitSystem<F> {
    let g = build_family(&spec.parse::<GraphSpec>().unwrap()).unwrap();
    let dd = DistanceData::new(&g).unwrap();
    let inter = IntersectionData::new(&dd).unwrap();
    let field = GroundField::new(natural_field_b(&inter).unwrap_or(1), QSign::Plus).unwrap();
    let s = SchemeData::new(&inter, g.n(), &field, &OrderingChoice::Auto).unwrap();
    let dual = s.dual(&dd, 0).unwrap();
    SplitSystem::build(&s, &dd, &dual).unwrap()
}

fn random_vectors<F: FieldElem>(n: usize, count: usize, seed: u64) -> Vec<Vec<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let num: i64 = rng.gen_range(-20..=20);
                    let den: i64 = rng.gen_range(1..=9);
                    F::from_rational(&Rational::from((num, den)))
                })
                .collect()
        })
        .collect()
}

fn assert_all_pass<F: FieldElem>(sys: &SplitSystem<F>) {
    for c in sys.verify(0.0, true) {
        assert!(c.passed(), "{c:?}");
        assert_eq!(c.max_residual, "0", "{}", c.name);
    }
}

#[test]
fn small_graphs_pass_the_exact_suite() {
    assert_all_pass(&system::<Rational>("hamming:3,2"));
    assert_all_pass(&system::<Rational>("hamming:3,3"));
    assert_all_pass(&system::<Scalar>("cycle:8"));
}

#[test]
fn cycle_needs_the_quadratic_field() {
    let g = build_family(&"cycle:8".parse::<GraphSpec>().unwrap()).unwrap();
    let dd = DistanceData::new(&g).unwrap();
    let inter = IntersectionData::new(&dd).unwrap();
    let field = GroundField::new(2, QSign::Plus).unwrap();
    let s = SchemeData::new(&inter, 8, &field, &OrderingChoice::Auto).unwrap();
    let dual = s.dual(&dd, 0).unwrap();
    assert!(SplitSystem::<Rational>::build(&s, &dd, &dual).is_err());
}

#[test]
fn cycle_dimension_tables() {
    let sys = system::<Scalar>("cycle:8");
    let dd = sys.grid(Kind::DD).dims();
    // each shell of C_8 meets each eigenspace in the obvious way: 1,2,2,2,1
    let rows: Vec<usize> = dd.iter().map(|r| r.iter().sum()).collect();
    assert_eq!(rows, vec![1, 2, 2, 2, 1]);
    let cols: Vec<usize> = (0..5).map(|j| dd.iter().map(|r| r[j]).sum()).collect();
    assert_eq!(cols, vec![1, 2, 2, 2, 1]);
}

#[test]
fn components_match_direct_solve() {
    let sys = system::<Rational>("hamming:3,2");
    let vs = random_vectors::<Rational>(8, 100, 7);
    let c = sys.component_oracle(&vs, 0.0);
    assert!(c.passed(), "{c:?}");
    let sys = system::<Scalar>("cycle:8");
    let vs = random_vectors::<Scalar>(8, 100, 7);
    let c = sys.component_oracle(&vs, 0.0);
    assert!(c.passed(), "{c:?}");
}

#[test]
fn cube_displacement_is_concentrated() {
    let sys = system::<Rational>("hamming:3,2");
    assert_eq!(sys.phi(0), splitdec::linalg::Mat::identity(8));
    assert_eq!(sys.psi(0), splitdec::linalg::Mat::identity(8));
    for eta in 1..=3 {
        assert!(sys.phi(eta).is_zero());
    }
}
