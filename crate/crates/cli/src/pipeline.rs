//! The `info`, `verify` and `dump` commands.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rug::Rational;
use serde_json::{json, Map, Value};
use splitdec::dump::{write_matrix, ExactEntry};
use splitdec::field::GroundField;
use splitdec::graphs::{build_family, DistanceData, Graph, IntersectionData};
use splitdec::linalg::{FieldElem, Mat};
use splitdec::qtet::{self, detect_classical, probe_block, Detection, Frame, QParams, QTetOptions};
use splitdec::report::{Check, Report, Tally};
use splitdec::scheme::{check_self_dual, natural_field_b, DualData, SchemeData, DENSE_LIMIT};
use splitdec::split::{Kind, SplitSystem};
use splitdec::tmodules::{self, TModuleError, EXACT_LIMIT};

use crate::cache::{cache_key, cache_load, cache_store, sha256_hex, Artifact, CacheError, CACHE_ENV};
use crate::config::{Backend, RunConfig, Suite};
use crate::{AnySplit, CliError};

/// Graph, scheme and dual data at the configured base vertex.
pub struct Prepared {
    pub graph: Graph,
    pub dd: DistanceData,
    pub inter: IntersectionData,
    pub detection: Detection,
    pub field: GroundField,
    pub scheme: SchemeData,
    pub dual: DualData,
    /// SHA-256 of the edge list.
    pub fingerprint: String,
}

pub fn prepare(config: &RunConfig) -> Result<Prepared, CliError> {
    let cfg = |e: &dyn std::fmt::Display| CliError::Config(e.to_string());
    let graph = build_family(&config.graph).map_err(|e| cfg(&e))?;
    if config.base_vertex >= graph.n() {
        return Err(CliError::Config(format!(
            "base vertex {} out of range for {} vertices",
            config.base_vertex,
            graph.n()
        )));
    }
    let dd = DistanceData::new(&graph).map_err(|e| cfg(&e))?;
    let inter = IntersectionData::new(&dd).map_err(|e| cfg(&e))?;
    let detection = detect_classical(&inter);
    let b = match (&detection.result, natural_field_b(&inter)) {
        (_, Some(b)) => b,
        (Ok(c), None) => c.b,
        (Err(_), None) => 1,
    };
    let field = GroundField::new(b, config.qsign).map_err(|e| cfg(&e))?;
    let scheme = SchemeData::new(&inter, graph.n(), &field, &config.ordering).map_err(|e| cfg(&e))?;
    let dual = scheme.dual(&dd, config.base_vertex).map_err(|e| cfg(&e))?;
    let fingerprint = sha256_hex(graph.to_edge_list().as_bytes())[..16].to_string();
    Ok(Prepared {
        graph,
        dd,
        inter,
        detection,
        field,
        scheme,
        dual,
        fingerprint,
    })
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn classical_table(det: &Detection) -> Value {
    let outcome = match &det.result {
        Ok(c) => format!("classical {c}"),
        Err(e) => format!("not classical with alpha=b-1: {e}"),
    };
    let candidates: Vec<Value> = det
        .candidates
        .iter()
        .map(|c| {
            json!({
                "b": c.b,
                "beta": c.beta.as_ref().map(|b| b.to_string()),
                "rejection": c.rejection,
            })
        })
        .collect();
    json!({ "outcome": outcome, "candidates": candidates })
}

fn metadata(config: &RunConfig, p: &Prepared) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("graph".into(), json!(config.graph.to_string()));
    m.insert("n".into(), json!(p.graph.n()));
    m.insert("diameter".into(), json!(p.inter.diameter()));
    m.insert("intersection_array".into(), json!(p.inter.array_string()));
    m.insert(
        "field".into(),
        json!({
            "b": p.field.b(),
            "mode": p.field.mode().to_string(),
            "qsign": p.field.qsign().to_string(),
        }),
    );
    m.insert("config".into(), config.echo(p.graph.n()));
    m.insert(
        "versions".into(),
        json!({
            "drg": env!("CARGO_PKG_VERSION"),
            "splitdec": splitdec::VERSION,
        }),
    );
    m
}

fn scheme_tables(report: &mut Report, p: &Prepared) {
    let (b, c) = p.inter.array();
    report.set_table("intersection_array", json!({ "b": b, "c": c }));
    report.set_table("eigenvalues", json!(strings(p.scheme.theta())));
    report.set_table("multiplicities", json!(p.scheme.multiplicities()));
}

/// Graph parameters, spectrum, orderings and the classical-parameter test.
pub fn cmd_info(config: &RunConfig) -> Result<Report, CliError> {
    let p = prepare(config)?;
    let mut report = Report::new(Value::Object(metadata(config, &p)));
    scheme_tables(&mut report, &p);
    report.set_table("sphere_sizes", json!(p.inter.sphere_sizes()));
    report.set_table("qpoly_orderings", json!(p.scheme.qpoly_orderings()));
    report.set_table(
        "ordering",
        json!({ "chosen": p.scheme.ordering(), "source": p.scheme.ordering_source() }),
    );
    report.set_table("formally_self_dual", json!(check_self_dual(&p.scheme).passed()));
    report.set_table("classical", classical_table(&p.detection));
    Ok(report)
}

/// The human-readable lines printed by `drg info`.
pub fn info_text(report: &Report) -> String {
    let m = &report.metadata;
    let t = &report.tables;
    let mut out = String::new();
    out.push_str(&format!("graph: {}\n", m["graph"].as_str().unwrap_or("")));
    out.push_str(&format!("n={} D={}\n", m["n"], m["diameter"]));
    out.push_str(&format!("intersection array: {}\n", m["intersection_array"].as_str().unwrap_or("")));
    let eig: Vec<String> = t["eigenvalues"]
        .as_array()
        .into_iter()
        .flatten()
        .zip(t["multiplicities"].as_array().into_iter().flatten())
        .map(|(e, k)| format!("{} (x{})", e.as_str().unwrap_or(""), k))
        .collect();
    out.push_str(&format!("eigenvalues: {}\n", eig.join(", ")));
    out.push_str(&format!("Q-polynomial orderings: {}\n", t["qpoly_orderings"]));
    out.push_str(&format!(
        "ordering: {} ({})\n",
        t["ordering"]["chosen"],
        t["ordering"]["source"].as_str().unwrap_or("")
    ));
    out.push_str(&format!("formally self-dual: {}\n", t["formally_self_dual"]));
    out.push_str(&format!("{}\n", t["classical"]["outcome"].as_str().unwrap_or("")));
    out
}

fn cache_root(config: &RunConfig) -> Option<std::path::PathBuf> {
    config
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV).map(Into::into))
}

/// Builds the split system, going through the cache when one is configured.
/// Returns the system and a short description of the cache outcome.
pub fn obtain_split(config: &RunConfig, p: &Prepared, backend: Backend) -> Result<(AnySplit, String), CliError> {
    let build = || AnySplit::build(&p.scheme, &p.dd, &p.dual).map_err(|e| CliError::Internal(e.to_string()));
    let Some(root) = cache_root(config) else {
        return Ok((build()?, "disabled".into()));
    };
    let key = cache_key(Artifact::Split, config, &p.fingerprint, backend);
    let status = match cache_load(&root, &key, &p.scheme, &p.dual) {
        Ok(Some(split)) => return Ok((split, "hit".into())),
        Ok(None) => "stored",
        Err(CacheError::Corrupt(..)) => "corrupt, recomputed",
        Err(e) => return Err(CliError::Internal(e.to_string())),
    };
    let split = build()?;
    cache_store(&root, &key, &split).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok((split, status.into()))
}

fn split_checks<F: FieldElem>(s: &SplitSystem<F>, config: &RunConfig) -> Vec<Check> {
    let n = s.n();
    let dense = n <= DENSE_LIMIT;
    let mut checks = s.verify(config.tol, dense);
    let count = if dense { 100 } else { 8 };
    let probes = probe_block(n, count, config.probe.seed()).re;
    let vectors: Vec<Vec<F>> = probes
        .columns()
        .iter()
        .map(|v| v.iter().map(F::from_rational).collect())
        .collect();
    checks.push(s.component_oracle(&vectors, config.tol));
    checks
}

fn tmodule_checks<F: FieldElem>(
    p: &Prepared,
    split: &SplitSystem<F>,
    config: &RunConfig,
    report: &mut Report,
) -> Result<Vec<Check>, CliError> {
    match tmodules::run_suite(&p.scheme, &p.dd, &p.dual, split, config.probe.seed(), config.tol) {
        Ok(out) => {
            report.set_table("modules", out.table);
            Ok(out.checks)
        }
        Err(e @ TModuleError::NotFullySplit { .. }) => {
            let mut t = Tally::exact();
            t.fail(e.to_string());
            Ok(vec![t.finish("tmodule.decomposition", "V is an orthogonal direct sum of irreducible T-modules")])
        }
        Err(e) => Err(CliError::Internal(e.to_string())),
    }
}

fn qtet_checks(p: &Prepared, split: &SplitSystem<Rational>, config: &RunConfig, backend: Backend) -> Result<Vec<Check>, CliError> {
    let classical = p.detection.result.as_ref().map_err(|e| CliError::SuiteInapplicable(e.to_string()))?;
    let mut checks = vec![p.detection.to_check()];
    let params = match QParams::fit(classical, &p.field, p.scheme.theta(), p.dual.theta_star()) {
        Ok(params) => params,
        Err(e) => {
            let mut t = Tally::exact();
            t.fail(e.to_string());
            checks.push(t.finish("qtet.eigenvalue_fit", "theta_i = alpha_0 + alpha_1 q^(D-2i), theta*_i likewise"));
            return Ok(checks);
        }
    };
    let frame = Frame::new(split, &p.dd, &p.dual);
    let opts = QTetOptions {
        probe: config.probe.probe(),
        seed: config.probe.seed(),
        float_sweep: backend == Backend::F64,
        tol: config.tol,
    };
    let suite = qtet::run_suite(&frame, &p.scheme, &p.dual, &params, &opts).map_err(|e| CliError::Internal(e.to_string()))?;
    checks.extend(suite);
    Ok(checks)
}

/// Refuses suites that cannot run on this graph, before any work is done.
fn check_applicable(config: &RunConfig, p: &Prepared) -> Result<(), CliError> {
    let wants = |s: Suite| config.suites.contains(&s);
    if needs_split(config) && !p.scheme.is_q_polynomial() {
        return Err(CliError::SuiteInapplicable("the graph has no Q-polynomial ordering".into()));
    }
    if wants(Suite::QTet) {
        if let Err(e) = &p.detection.result {
            return Err(CliError::SuiteInapplicable(format!("qtet: {e}")));
        }
        if !p.scheme.is_rational() {
            return Err(CliError::SuiteInapplicable("qtet: the primitive idempotents are not rational".into()));
        }
    }
    if wants(Suite::TModule) && p.graph.n() > EXACT_LIMIT {
        return Err(CliError::SuiteInapplicable(format!(
            "tmodule: decomposition is limited to {EXACT_LIMIT} vertices"
        )));
    }
    Ok(())
}

/// Runs the selected suites in dependency order and assembles the report.
pub fn cmd_verify(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let p = prepare(config)?;
    check_applicable(config, &p)?;
    let backend = config.backend_for(p.graph.n());
    let mut extra = Map::new();
    let split = if needs_split(config) {
        let t = Instant::now();
        let (split, cache_status) = obtain_split(config, &p, backend)?;
        extra.insert("split_build".into(), json!(t.elapsed().as_secs_f64()));
        extra.insert("cache".into(), json!(cache_status));
        Some(split)
    } else {
        None
    };
    verify_prepared(config, &p, split.as_ref(), extra)
}

fn needs_split(config: &RunConfig) -> bool {
    [Suite::Split, Suite::QTet, Suite::TModule]
        .iter()
        .any(|s| config.suites.contains(s))
}

/// [`cmd_verify`] on already prepared data and split system, so that one
/// split can serve several runs (both signs of `q`, for instance).
/// `extra` entries go into the report metadata; timings are recorded there.
pub fn verify_prepared(
    config: &RunConfig,
    p: &Prepared,
    split: Option<&AnySplit>,
    extra: Map<String, Value>,
) -> Result<Report, CliError> {
    config.validate()?;
    check_applicable(config, p)?;
    let n = p.graph.n();
    let backend = config.backend_for(n);
    let wants = |s: Suite| config.suites.contains(&s);
    let mut meta = metadata(config, p);
    let mut timings = Map::new();
    let mut report = Report::new(Value::Null);
    scheme_tables(&mut report, p);
    let mut checks = Vec::new();

    if wants(Suite::Scheme) {
        let t = Instant::now();
        checks.extend(p.scheme.verify(&p.dd, n <= DENSE_LIMIT));
        checks.extend(p.dual.verify(&p.scheme));
        timings.insert("scheme".into(), json!(t.elapsed().as_secs_f64()));
    }

    if needs_split(config) {
        let split = split.ok_or_else(|| CliError::Internal("split system missing".into()))?;
        meta.insert("split_entry_type".into(), json!(split.entry_type()));
        report.set_table("tilde_dims", split.dims_table());

        if wants(Suite::Split) {
            let t = Instant::now();
            checks.extend(match split {
                AnySplit::Rational(s) => split_checks(s, config),
                AnySplit::Scalar(s) => split_checks(s, config),
            });
            timings.insert("split".into(), json!(t.elapsed().as_secs_f64()));
        }
        if wants(Suite::QTet) {
            let t = Instant::now();
            let AnySplit::Rational(s) = split else {
                return Err(CliError::SuiteInapplicable("qtet: the primitive idempotents are not rational".into()));
            };
            report.set_table("classical", classical_table(&p.detection));
            checks.extend(qtet_checks(p, s, config, backend)?);
            timings.insert("qtet".into(), json!(t.elapsed().as_secs_f64()));
        }
        if wants(Suite::TModule) {
            let t = Instant::now();
            checks.extend(match split {
                AnySplit::Rational(s) => tmodule_checks(p, s, config, &mut report)?,
                AnySplit::Scalar(s) => tmodule_checks(p, s, config, &mut report)?,
            });
            timings.insert("tmodule".into(), json!(t.elapsed().as_secs_f64()));
        }
    }

    for (k, v) in extra {
        if k == "split_build" {
            timings.insert(k, v);
        } else {
            meta.insert(k, v);
        }
    }
    meta.insert("timings_s".into(), Value::Object(timings));
    report.metadata = Value::Object(meta);
    report.checks = checks;
    Ok(report)
}

fn write_dump<F: ExactEntry>(dir: &Path, name: &str, m: &Mat<F>, field: &GroundField, index: &mut Map<String, Value>) -> Result<(), CliError> {
    let text = write_matrix(m, field);
    fs::write(dir.join(name), &text).map_err(|e| CliError::Internal(format!("{name}: {e}")))?;
    index.insert(
        name.into(),
        json!({ "rows": m.rows(), "cols": m.cols(), "sha256": sha256_hex(text.as_bytes()) }),
    );
    Ok(())
}

fn dump_split<F: ExactEntry>(
    dir: &Path,
    p: &Prepared,
    s: &SplitSystem<F>,
    index: &mut Map<String, Value>,
) -> Result<(), CliError> {
    for j in 0..=p.scheme.diameter() {
        let e = p
            .scheme
            .idempotent::<F>(&p.dd, j)
            .ok_or_else(|| CliError::Internal(format!("E_{j} is not representable")))?;
        write_dump(dir, &format!("E{j}.txt"), &e, s.field(), index)?;
    }
    for (kind, ds) in Kind::ALL.into_iter().zip(s.direct_sums()) {
        write_dump(dir, &format!("{kind}.change.txt"), ds.change(), s.field(), index)?;
        write_dump(dir, &format!("{kind}.inverse.txt"), ds.inverse(), s.field(), index)?;
    }
    Ok(())
}

/// Writes `A_1`, the primitive idempotents and the tilde-cell changes of
/// basis as matrix dumps into the `--out` directory, with `report.json`
/// referencing them by relative path.
pub fn cmd_dump(config: &RunConfig) -> Result<Report, CliError> {
    let dir = config
        .out
        .clone()
        .ok_or_else(|| CliError::Config("dump needs --out DIR".into()))?;
    let p = prepare(config)?;
    if !p.scheme.is_q_polynomial() {
        return Err(CliError::SuiteInapplicable("the graph has no Q-polynomial ordering".into()));
    }
    let backend = config.backend_for(p.graph.n());
    let (split, cache_status) = obtain_split(config, &p, backend)?;
    fs::create_dir_all(&dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    let mut index = Map::new();
    let a1: Mat<Rational> = p.dd.distance_matrix(1);
    write_dump(&dir, "A1.txt", &a1, &p.field, &mut index)?;
    match &split {
        AnySplit::Rational(s) => dump_split(&dir, &p, s, &mut index)?,
        AnySplit::Scalar(s) => dump_split(&dir, &p, s, &mut index)?,
    }
    let mut meta = metadata(config, &p);
    meta.insert("cache".into(), json!(cache_status));
    let mut report = Report::new(Value::Object(meta));
    scheme_tables(&mut report, &p);
    report.set_table("tilde_dims", split.dims_table());
    report.set_table("files", Value::Object(index));
    report.set_table("shells", json!(p.dual.shells()));
    fs::write(dir.join("report.json"), report.to_json()).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(report)
}
