//! End-to-end acceptance run. Writes one `criterion N: PASS|FAIL` line per
//! criterion straight to stderr, so the lines show even when test output is
//! captured, and fails if any criterion fails.
//!
//! Each graph is prepared and split once per sign of `q`; for the 512-vertex
//! graphs the `-` run reuses the changes of basis of the `+` run, as the
//! cache would.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use drg::config::{parse_suites, Backend, ProbeSpec, RunConfig};
use drg::pipeline::{prepare, verify_prepared, Prepared};
use drg::AnySplit;
use serde_json::{json, Map};
use splitdec::field::QSign;
use splitdec::qtet::{detect_classical, Detection};
use splitdec::report::{Check, Report};
use splitdec::split::SplitSystem;

const SMALL: [&str; 3] = ["hamming:3,2", "cycle:8", "hamming:3,3"];
const SIGNS: [QSign; 2] = [QSign::Plus, QSign::Minus];

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(problems: Vec<String>, ok: &str) -> Self {
        if problems.is_empty() {
            Verdict { pass: true, detail: ok.into() }
        } else {
            Verdict { pass: false, detail: problems.join("; ") }
        }
    }
}

fn config(graph: &str, suites: &str, qsign: QSign) -> RunConfig {
    let mut c = RunConfig::new(graph.parse().unwrap());
    c.suites = parse_suites(suites).unwrap();
    c.qsign = qsign;
    c
}

fn with_prefix<'a>(r: &'a Report, prefixes: &[&str]) -> Vec<&'a Check> {
    r.checks
        .iter()
        .filter(|c| prefixes.iter().any(|p| c.name.starts_with(p)))
        .collect()
}

fn exact_failures(checks: &[&Check], graph: &str) -> Vec<String> {
    checks
        .iter()
        .filter(|c| !c.passed() || c.max_residual != "0")
        .map(|c| format!("{graph} {} residual {}", c.name, c.max_residual))
        .collect()
}

fn has(r: &Report, name: &str) -> bool {
    r.checks.iter().any(|c| c.name == name)
}

struct SmallRun {
    report: Report,
    seconds: f64,
}

fn small_run(graph: &str, qsign: QSign) -> SmallRun {
    let t = Instant::now();
    let c = config(graph, "scheme,split,tmodule", qsign);
    let p = prepare(&c).unwrap();
    let split = AnySplit::build(&p.scheme, &p.dd, &p.dual).unwrap();
    let report = verify_prepared(&c, &p, Some(&split), Map::new()).unwrap();
    SmallRun { report, seconds: t.elapsed().as_secs_f64() }
}

fn criterion_1(runs: &BTreeMap<&str, SmallRun>) -> Verdict {
    let mut problems = Vec::new();
    for (g, run) in runs {
        let checks = with_prefix(&run.report, &["scheme.", "dual.", "split."]);
        problems.extend(exact_failures(&checks, g));
        for name in [
            "split.dd.partition",
            "split.uu.partition",
            "split.vanishing",
            "split.real",
            "split.transpose.dd_uu",
            "split.transpose.du_ud",
            "split.orthogonality.dd_uu",
            "split.dimensions",
            "split.displacement.two_expressions",
            "split.displacement.real_symmetric",
            "split.displacement.partition",
        ] {
            if !has(&run.report, name) {
                problems.push(format!("{g}: {name} missing"));
            }
        }
        if run.seconds > 60.0 {
            problems.push(format!("{g}: {:.1}s over 60s", run.seconds));
        }
    }
    let worst = runs.values().map(|r| r.seconds).fold(0.0, f64::max);
    Verdict::new(problems, &format!("all exact residuals zero, slowest graph {worst:.1}s"))
}

fn criterion_2(runs: &BTreeMap<&str, SmallRun>) -> Verdict {
    let mut problems = Vec::new();
    for g in ["hamming:3,2", "cycle:8"] {
        let checks = with_prefix(&runs[g].report, &["split.component_oracle"]);
        if checks.len() != 1 {
            problems.push(format!("{g}: oracle check missing"));
        }
        problems.extend(exact_failures(&checks, g));
    }
    Verdict::new(problems, "projector components equal solved components on 100 vectors")
}

fn criterion_3(runs: &BTreeMap<&str, SmallRun>) -> Verdict {
    let mut problems = Vec::new();
    for (g, run) in runs {
        let checks = with_prefix(&run.report, &["tmodule."]);
        if checks.len() < 10 {
            problems.push(format!("{g}: only {} tmodule checks", checks.len()));
        }
        problems.extend(exact_failures(&checks, g));
    }
    let ranks = &runs["hamming:3,2"].report.tables["modules"]["displacement_ranks"];
    for (op, range) in [("phi", 0..=3), ("psi", -3..=3)] {
        for h in range {
            let want = if h == 0 { 8 } else { 0 };
            if ranks[op][h.to_string()] != json!(want) {
                problems.push(format!("hamming:3,2 rank {op}_{h} = {}", ranks[op][h.to_string()]));
            }
        }
    }
    Verdict::new(problems, "modules irreducible, orthogonal, bounded; H(3,2) ranks phi_0 = psi_0 = 8")
}

fn rejection(det: &Detection, b: i64) -> Option<String> {
    det.candidates.iter().find(|c| c.b == b).and_then(|c| c.rejection.clone())
}

fn criterion_4(dets: &BTreeMap<&str, Detection>) -> Verdict {
    let mut problems = Vec::new();
    let bil = &dets["bilinear:3,3,2"];
    match &bil.result {
        Ok(c) if c.to_string() == "(3,2,1,7)" => {}
        other => problems.push(format!("bilinear: {other:?}")),
    }
    if rejection(bil, -3).is_none() {
        problems.push("bilinear: b = -3 not rejected".into());
    }
    match &dets["hermitian:3,2"].result {
        Ok(c) if c.to_string() == "(3,-2,-3,7)" => {}
        other => problems.push(format!("hermitian: {other:?}")),
    }
    let ham = &dets["hamming:3,2"];
    if ham.result.is_ok() {
        problems.push("hamming accepted".into());
    }
    match rejection(ham, 1) {
        Some(r) if r.contains("excluded") => {}
        other => problems.push(format!("hamming b = 1: {other:?}")),
    }
    match rejection(ham, -2) {
        Some(r) if r.contains("c_3") => {}
        other => problems.push(format!("hamming b = -2: {other:?}")),
    }
    Verdict::new(problems, "bilinear (3,2,1,7), hermitian (3,-2,-3,7), hamming rejected")
}

/// A 512-vertex graph verified under both signs of `q`.
struct LargeRun {
    reports: Vec<Report>,
    seconds: Vec<f64>,
}

fn large_run(graph: &str) -> LargeRun {
    let mut reports = Vec::new();
    let mut seconds = Vec::new();
    let mut sums = None;
    for qsign in SIGNS {
        let t = Instant::now();
        let mut c = config(graph, "scheme,qtet", qsign);
        c.backend = Some(Backend::F64);
        let p = prepare(&c).unwrap();
        let split = match &sums {
            None => AnySplit::build(&p.scheme, &p.dd, &p.dual).unwrap(),
            Some(AnySplit::Rational(s)) => {
                let s: &SplitSystem<_> = s;
                let sums = s.direct_sums().into_iter().cloned().collect();
                AnySplit::Rational(SplitSystem::from_direct_sums(&p.scheme, &p.dual, sums).unwrap())
            }
            Some(AnySplit::Scalar(_)) => panic!("{graph}: expected rational idempotents"),
        };
        reports.push(verify_prepared(&c, &p, Some(&split), Map::new()).unwrap());
        seconds.push(t.elapsed().as_secs_f64());
        sums.get_or_insert(split);
    }
    LargeRun { reports, seconds }
}

fn qtet_problems(graph: &str, r: &Report, seconds: f64, required: &[&str], branch: &str) -> Vec<String> {
    let mut problems = Vec::new();
    let qtet = with_prefix(r, &["qtet."]);
    for c in &qtet {
        if !c.passed() {
            problems.push(format!("{graph} {} failed: {}", c.name, c.witness.as_deref().unwrap_or("")));
            continue;
        }
        match c.mode.as_deref() {
            Some("float") => {
                let res: f64 = c.max_residual.parse().unwrap_or(f64::INFINITY);
                if res > 1e-6 {
                    problems.push(format!("{graph} {} residual {res:e}", c.name));
                }
            }
            _ if c.max_residual != "0" => problems.push(format!("{graph} {} residual {}", c.name, c.max_residual)),
            _ => {}
        }
    }
    if !qtet.iter().any(|c| c.mode.as_deref() == Some("float")) {
        problems.push(format!("{graph}: no float sweep"));
    }
    for prefix in required {
        if !qtet.iter().any(|c| c.name.starts_with(prefix)) {
            problems.push(format!("{graph}: no {prefix} checks"));
        }
    }
    let fit = qtet.iter().find(|c| c.name == "qtet.eigenvalue_fit");
    if fit.and_then(|c| c.branch.as_deref()) != Some(branch) {
        problems.push(format!("{graph}: branch is not {branch}"));
    }
    if seconds > 900.0 {
        problems.push(format!("{graph}: {seconds:.0}s over 15 min"));
    }
    problems
}

const COMMON: [&str; 18] = [
    "qtet.table.",
    "qtet.transpose.A",
    "qtet.transpose.Astar",
    "qtet.transpose.B",
    "qtet.transpose.K",
    "qtet.transpose.Phi",
    "qtet.transpose.Psi",
    "qtet.inverse.Phi",
    "qtet.inverse.Psi",
    "qtet.central.Phi",
    "qtet.central.Psi",
    "qtet.relation.inverse",
    "qtet.relation.serre",
    "qtet.relation.weyl",
    "qtet.generator_transpose.",
    "qtet.generators.chains",
    "qtet.spectral",
    "qtet.classical_parameters",
];

fn criterion_5(run: &LargeRun, sign: usize) -> Verdict {
    let mut required = COMMON.to_vec();
    required.push("qtet.real.");
    let problems = qtet_problems("bilinear:3,3,2", &run.reports[sign], run.seconds[sign], &required, "b>1");
    Verdict::new(problems, &format!("exact probes zero, float sweep within 1e-6, {:.0}s", run.seconds[sign]))
}

fn criterion_6(run: &LargeRun, sign: usize) -> Verdict {
    let mut required = COMMON.to_vec();
    required.extend(["qtet.conj.", "qtet.generator_conj.", "qtet.parity.A", "qtet.parity.Astar"]);
    let mut problems = qtet_problems("hermitian:3,2", &run.reports[sign], run.seconds[sign], &required, "b<-1");
    for prefix in ["qtet.conj.", "qtet.generator_conj."] {
        let names: std::collections::BTreeSet<&str> =
            with_prefix(&run.reports[sign], &[prefix]).iter().map(|c| c.name.as_str()).collect();
        let n = names.len();
        if n != 8 {
            problems.push(format!("hermitian: {n} {prefix} checks, expected 8"));
        }
    }
    Verdict::new(problems, &format!("conjugation and parity hold, {:.0}s", run.seconds[sign]))
}

fn criterion_8() -> Verdict {
    let mut problems = Vec::new();
    for g in SMALL {
        let a = small_run(g, QSign::Plus).report.checks_json();
        let b = small_run(g, QSign::Plus).report.checks_json();
        if a != b {
            problems.push(format!("{g}: check arrays differ"));
        }
    }
    let mut c = config("bilinear:3,3,2", "qtet", QSign::Plus);
    c.backend = Some(Backend::Exact);
    c.probe = ProbeSpec::Sample { count: 4, seed: 7 };
    let p: Prepared = prepare(&c).unwrap();
    let split = AnySplit::build(&p.scheme, &p.dd, &p.dual).unwrap();
    let a = verify_prepared(&c, &p, Some(&split), Map::new()).unwrap().checks_json();
    let b = verify_prepared(&c, &p, Some(&split), Map::new()).unwrap().checks_json();
    if a != b {
        problems.push("bilinear qtet: check arrays differ".into());
    }
    Verdict::new(problems, "repeated runs give byte-identical check arrays")
}

fn line(n: usize, v: &Verdict) -> String {
    format!("criterion {n}: {} ({})", if v.pass { "PASS" } else { "FAIL" }, v.detail)
}

#[test]
fn acceptance() {
    let mut lines = Vec::new();
    let mut per_sign: Vec<Vec<bool>> = Vec::new();

    let dets: BTreeMap<&str, Detection> = ["bilinear:3,3,2", "hermitian:3,2", "hamming:3,2"]
        .into_iter()
        .map(|g| (g, detect_classical(&prepare(&config(g, "scheme", QSign::Plus)).unwrap().inter)))
        .collect();
    let bil = large_run("bilinear:3,3,2");
    let her = large_run("hermitian:3,2");

    for (sign, qsign) in SIGNS.into_iter().enumerate() {
        let runs: BTreeMap<&str, SmallRun> = SMALL.into_iter().map(|g| (g, small_run(g, qsign))).collect();
        let verdicts = [
            criterion_1(&runs),
            criterion_2(&runs),
            criterion_3(&runs),
            criterion_4(&dets),
            criterion_5(&bil, sign),
            criterion_6(&her, sign),
        ];
        if sign == 0 {
            for (i, v) in verdicts.iter().enumerate() {
                lines.push(line(i + 1, v));
            }
        } else {
            for (i, v) in verdicts.iter().enumerate().filter(|(_, v)| !v.pass) {
                eprintln!("qsign -: criterion {}: {}", i + 1, v.detail);
            }
        }
        per_sign.push(verdicts.iter().map(|v| v.pass).collect());
    }

    let flipped: Vec<String> = (0..6)
        .filter(|&i| per_sign[0][i] != per_sign[1][i])
        .map(|i| format!("criterion {} changes with qsign", i + 1))
        .collect();
    lines.push(line(7, &Verdict::new(flipped, "criteria 1 to 6 agree under qsign + and -")));
    lines.push(line(8, &criterion_8()));

    let mut err = std::io::stderr().lock();
    for l in &lines {
        writeln!(err, "{l}").unwrap();
    }
    let failed: Vec<&String> = lines.iter().filter(|l| l.contains(": FAIL")).collect();
    assert!(failed.is_empty(), "{failed:#?}");
}
