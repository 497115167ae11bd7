use splitdec::field::{GroundField, QSign};
use splitdec::graphs::{build_family, DistanceData, GraphSpec, IntersectionData};
use splitdec::scheme::{check_self_dual, natural_field_b, OrderingChoice, SchemeData};

fn scheme(spec: &str, b: Option<i64>) -> (DistanceData, SchemeData) {
    let g = build_family(&spec.parse::<GraphSpec>().unwrap()).unwrap();
    let dd = DistanceData::new(&g).unwrap();
    let inter = IntersectionData::new(&dd).unwrap();
    let b = b.or_else(|| natural_field_b(&inter)).unwrap_or(1);
    let field = GroundField::new(b, QSign::Plus).unwrap();
    let s = SchemeData::new(&inter, g.n(), &field, &OrderingChoice::Auto).unwrap();
    (dd, s)
}

#[test]
fn forms_graphs_are_formally_self_dual() {
    for (spec, b) in [("bilinear:3,3,2", 2), ("hermitian:3,2", -2)] {
        let (dd, s) = scheme(spec, Some(b));
        assert!(check_self_dual(&s).passed());
        for c in s.verify(&dd, false) {
            assert!(c.passed(), "{spec}: {c:?}");
        }
        let dual = s.dual(&dd, 0).unwrap();
        assert!(dual.verify(&s).iter().all(|c| c.passed()));
    }
}
