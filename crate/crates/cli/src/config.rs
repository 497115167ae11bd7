//! Run configuration shared by every subcommand.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use splitdec::field::QSign;
use splitdec::graphs::GraphSpec;
use splitdec::qtet::Probe;
use splitdec::scheme::OrderingChoice;

use crate::CliError;

/// Largest graph run with the exact backend by default.
pub const EXACT_DEFAULT_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    F64,
}

impl FromStr for Backend {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "exact" => Ok(Backend::Exact),
            "f64" => Ok(Backend::F64),
            _ => Err(CliError::Config(format!("unknown backend `{s}` (expected exact or f64)"))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::F64 => "f64",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Scheme,
    Split,
    QTet,
    TModule,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Scheme, Suite::Split, Suite::QTet, Suite::TModule];

    pub fn label(self) -> &'static str {
        match self {
            Suite::Scheme => "scheme",
            Suite::Split => "split",
            Suite::QTet => "qtet",
            Suite::TModule => "tmodule",
        }
    }
}

impl FromStr for Suite {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.label() == s)
            .ok_or_else(|| CliError::Config(format!("unknown suite `{s}`")))
    }
}

/// Exact probe selection for the q-tetrahedron suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeSpec {
    Full,
    Sample { count: usize, seed: u64 },
}

impl ProbeSpec {
    pub fn seed(self) -> u64 {
        match self {
            ProbeSpec::Full => 42,
            ProbeSpec::Sample { seed, .. } => seed,
        }
    }

    pub fn probe(self) -> Probe {
        match self {
            ProbeSpec::Full => Probe::Full,
            ProbeSpec::Sample { count, .. } => Probe::Count(count),
        }
    }
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec::Sample { count: 32, seed: 42 }
    }
}

impl FromStr for ProbeSpec {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("bad probe `{s}` (expected full or sample:N:SEED)"));
        if s == "full" {
            return Ok(ProbeSpec::Full);
        }
        let rest = s.strip_prefix("sample:").ok_or_else(bad)?;
        let (count, seed) = rest.split_once(':').ok_or_else(bad)?;
        let count: usize = count.parse().map_err(|_| bad())?;
        let seed: u64 = seed.parse().map_err(|_| bad())?;
        if count == 0 {
            return Err(CliError::Config("probe count must be at least 1".into()));
        }
        Ok(ProbeSpec::Sample { count, seed })
    }
}

impl fmt::Display for ProbeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeSpec::Full => f.write_str("full"),
            ProbeSpec::Sample { count, seed } => write!(f, "sample:{count}:{seed}"),
        }
    }
}

/// `auto` or a comma-separated permutation of `0..=D` fixing 0.
pub fn parse_ordering(s: &str) -> Result<OrderingChoice, CliError> {
    if s == "auto" {
        return Ok(OrderingChoice::Auto);
    }
    let perm: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("bad ordering `{s}`")))?;
    let mut sorted = perm.clone();
    sorted.sort_unstable();
    if perm.first() != Some(&0) || sorted != (0..perm.len()).collect::<Vec<_>>() {
        return Err(CliError::Config(format!("ordering `{s}` is not a permutation of 0..D fixing 0")));
    }
    Ok(OrderingChoice::Given(perm))
}

pub fn ordering_label(o: &OrderingChoice) -> String {
    match o {
        OrderingChoice::Auto => "auto".into(),
        OrderingChoice::Given(p) => p.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub graph: GraphSpec,
    pub base_vertex: usize,
    /// `None` picks exact for graphs with at most 64 vertices, f64 otherwise.
    pub backend: Option<Backend>,
    pub tol: f64,
    pub qsign: QSign,
    pub probe: ProbeSpec,
    pub ordering: OrderingChoice,
    pub suites: Vec<Suite>,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(graph: GraphSpec) -> Self {
        RunConfig {
            graph,
            base_vertex: 0,
            backend: None,
            tol: 1e-8,
            qsign: QSign::Plus,
            probe: ProbeSpec::default(),
            ordering: OrderingChoice::Auto,
            suites: Suite::ALL.to_vec(),
            out: None,
            cache_dir: None,
        }
    }

    pub fn backend_for(&self, n: usize) -> Backend {
        self.backend.unwrap_or(if n <= EXACT_DEFAULT_LIMIT {
            Backend::Exact
        } else {
            Backend::F64
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0) {
            return Err(CliError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.suites.is_empty() {
            return Err(CliError::Config("no suites selected".into()));
        }
        Ok(())
    }

    /// The configuration as echoed into report metadata.
    pub fn echo(&self, n: usize) -> serde_json::Value {
        serde_json::json!({
            "graph": self.graph.to_string(),
            "base_vertex": self.base_vertex,
            "backend": self.backend_for(n).to_string(),
            "tol": self.tol,
            "qsign": self.qsign.to_string(),
            "probe": self.probe.to_string(),
            "ordering": ordering_label(&self.ordering),
            "suites": self.suites.iter().map(|s| s.label()).collect::<Vec<_>>(),
        })
    }
}

pub fn parse_suites(s: &str) -> Result<Vec<Suite>, CliError> {
    let mut out: Vec<Suite> = s.split(',').map(|p| p.trim().parse()).collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_specs() {
        assert_eq!("full".parse::<ProbeSpec>().unwrap(), ProbeSpec::Full);
        assert_eq!(
            "sample:8:3".parse::<ProbeSpec>().unwrap(),
            ProbeSpec::Sample { count: 8, seed: 3 }
        );
        assert!("sample:0:3".parse::<ProbeSpec>().is_err());
        assert!("sample:8".parse::<ProbeSpec>().is_err());
        assert_eq!(ProbeSpec::default().to_string(), "sample:32:42");
    }

    #[test]
    fn orderings() {
        assert_eq!(parse_ordering("auto").unwrap(), OrderingChoice::Auto);
        assert_eq!(parse_ordering("0,2,1").unwrap(), OrderingChoice::Given(vec![0, 2, 1]));
        assert!(parse_ordering("1,0,2").is_err());
        assert!(parse_ordering("0,1,1").is_err());
    }

    #[test]
    fn suites_are_ordered() {
        assert_eq!(
            parse_suites("tmodule,scheme,split").unwrap(),
            vec![Suite::Scheme, Suite::Split, Suite::TModule]
        );
        assert!(parse_suites("nope").is_err());
    }

    #[test]
    fn default_backend() {
        let c = RunConfig::new("hamming:3,2".parse().unwrap());
        assert_eq!(c.backend_for(8), Backend::Exact);
        assert_eq!(c.backend_for(512), Backend::F64);
    }
}
