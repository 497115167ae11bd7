use rug::Rational;
use splitdec::field::{GroundField, QSign};
use splitdec::graphs::{build_family, DistanceData, GraphSpec, IntersectionData};
use splitdec::qtet::{run_suite, Classical, Frame, Probe, QParams, QTetOptions};
use splitdec::scheme::{OrderingChoice, SchemeData};
use splitdec::split::SplitSystem;

/// Runs the suite on a diameter-2 forms graph, which satisfies the same
/// closed forms but sits below the diameter bound of detection.
fn small_suite(spec: &str, b: i64, beta: i64, qsign: QSign, probe: Probe) {
    let g = build_family(&spec.parse::<GraphSpec>().unwrap()).unwrap();
    let dd = DistanceData::new(&g).unwrap();
    let inter = IntersectionData::new(&dd).unwrap();
    let field = GroundField::new(b, qsign).unwrap();
    let s = SchemeData::new(&inter, g.n(), &field, &OrderingChoice::Auto).unwrap();
    let dual = s.dual(&dd, 0).unwrap();
    let split: SplitSystem<Rational> = SplitSystem::build(&s, &dd, &dual).unwrap();
    let classical = Classical {
        d: 2,
        b,
        alpha: b - 1,
        beta: Rational::from(beta),
    };
    let params = QParams::fit(&classical, &field, s.theta(), dual.theta_star()).unwrap();
    let frame = Frame::new(&split, &dd, &dual);
    let opts = QTetOptions {
        probe,
        ..QTetOptions::default()
    };
    let checks = run_suite(&frame, &s, &dual, &params, &opts).unwrap();
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed()).collect();
    assert!(failed.is_empty(), "{spec}: {failed:#?}");
    for c in &checks {
        if c.mode.as_deref() == Some("exact") {
            assert_eq!(c.max_residual, "0", "{}", c.name);
        }
    }
}

#[test]
fn bilinear_2x2_real_branch() {
    for qsign in [QSign::Plus, QSign::Minus] {
        small_suite("bilinear:2,2,2", 2, 3, qsign, Probe::Full);
    }
}

#[test]
fn hermitian_2_imaginary_branch() {
    for qsign in [QSign::Plus, QSign::Minus] {
        small_suite("hermitian:2,2", -2, -5, qsign, Probe::Count(8));
    }
}
