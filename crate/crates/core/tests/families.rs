use splitdec::graphs::{build_family, DistanceData, GraphSpec, IntersectionData};

fn data(spec: &str) -> (usize, IntersectionData) {
    let g = build_family(&spec.parse::<GraphSpec>().unwrap()).unwrap();
    let dd = DistanceData::new(&g).unwrap();
    (g.n(), IntersectionData::new(&dd).unwrap())
}

#[test]
fn bilinear_forms_3x3_over_gf2() {
    let (n, inter) = data("bilinear:3,3,2");
    assert_eq!(n, 512);
    assert_eq!(inter.valency(), 49);
    assert_eq!(inter.array(), (vec![49, 36, 16], vec![1, 6, 28]));
    assert_eq!(inter.sphere_sizes(), vec![1, 49, 294, 168]);
    assert!(inter.check_array_invariants());
}

#[test]
fn hermitian_forms_3x3_over_gf4() {
    let (n, inter) = data("hermitian:3,2");
    assert_eq!(n, 512);
    assert_eq!(inter.array(), (vec![21, 20, 16], vec![1, 2, 12]));
    assert!(inter.check_array_invariants());
}

#[test]
fn small_families() {
    assert_eq!(data("hamming:3,2").1.array(), (vec![3, 2, 1], vec![1, 2, 3]));
    assert_eq!(data("johnson:7,3").1.array(), (vec![12, 6, 2], vec![1, 4, 9]));
    let (n, inter) = data("bilinear:2,2,2");
    assert_eq!(n, 16);
    assert_eq!(inter.array(), (vec![9, 4], vec![1, 6]));
    let (n, inter) = data("hermitian:2,2");
    assert_eq!(n, 16);
    assert_eq!(inter.array(), (vec![5, 4], vec![1, 2]));
}
