//! Scenario configuration: flat key-value text with section headers.
//!
//! ```text
//! [graph]
//! nodes = 2
//! edge = 1 2
//!
//! [kernel]
//! name = linear_cos
//! a = 1.0
//!
//! [sim]
//! dt = 0.001
//! t_end = 10.0
//! record_every = 100
//! init = random
//! seed = 7
//!
//! [checks]
//! final_spread_max = 1e-4
//! ```
//!
//! `edge` and `vector` keys repeat, one line per item; node indices are
//! 1-based as in the edge-list file format. With `init = explicit` the
//! `vector = x y z` lines must match the node count.

use thiserror::Error;

use spheresync::graph::GraphError;
use spheresync::kernels::KernelError;
use spheresync::sim::{InitialState, SimulationConfig};
use spheresync::sphere::UnitVector;
use spheresync::{DistanceKernel, NetworkGraph};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing field `{field}` in [{section}]")]
    MissingField { section: &'static str, field: &'static str },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("line {line}: invalid value for `{key}`: {message}")]
    BadValue { line: usize, key: String, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{0} explicit vectors for {1} nodes")]
    VectorCount(usize, usize),
}

/// How the initial state is produced.
#[derive(Clone, Debug, PartialEq)]
pub enum InitSpec {
    Random { seed: u64 },
    Explicit(Vec<[f64; 3]>),
}

/// A convergence check requested by the scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Check {
    FinalSpreadMax(f64),
    RateMin(f64),
    ConstantLimitTol(f64),
    VFinalMax(f64),
}

impl Check {
    pub fn key(&self) -> &'static str {
        match self {
            Check::FinalSpreadMax(_) => "final_spread_max",
            Check::RateMin(_) => "rate_min",
            Check::ConstantLimitTol(_) => "constant_limit_tol",
            Check::VFinalMax(_) => "v_final_max",
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Check::FinalSpreadMax(v)
            | Check::RateMin(v)
            | Check::ConstantLimitTol(v)
            | Check::VFinalMax(v) => *v,
        }
    }
}

/// Parsed scenario file.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub nodes: usize,
    /// 1-based pairs exactly as given.
    pub edges: Vec<(usize, usize)>,
    pub kernel_name: String,
    pub kernel_a: Option<f64>,
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub init: InitSpec,
    pub checks: Vec<Check>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        #[derive(Default)]
        struct Raw {
            nodes: Option<usize>,
            edges: Vec<(usize, usize)>,
            kernel_name: Option<String>,
            kernel_a: Option<f64>,
            dt: Option<f64>,
            t_end: Option<f64>,
            record_every: Option<usize>,
            init: Option<String>,
            seed: Option<u64>,
            vectors: Vec<[f64; 3]>,
            checks: Vec<Check>,
        }
        let mut raw = Raw::default();
        let mut section = String::new();

        for (idx, full_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = full_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line: line_no,
                    message: "unterminated section header".into(),
                })?;
                section = name.trim().to_string();
                if !matches!(section.as_str(), "graph" | "kernel" | "sim" | "checks") {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        message: format!("unknown section `{section}`"),
                    });
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                message: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let parse_f64 = |v: &str| {
                v.parse::<f64>().map_err(|e| ConfigError::BadValue {
                    line: line_no,
                    key: key.to_string(),
                    message: e.to_string(),
                })
            };
            let parse_usize = |v: &str| {
                v.parse::<usize>().map_err(|e| ConfigError::BadValue {
                    line: line_no,
                    key: key.to_string(),
                    message: e.to_string(),
                })
            };

            match (section.as_str(), key) {
                ("graph", "nodes") => raw.nodes = Some(parse_usize(value)?),
                ("graph", "edge") => {
                    let mut it = value.split_whitespace();
                    let i = it.next().map(parse_usize).transpose()?.ok_or_else(|| {
                        ConfigError::BadValue {
                            line: line_no,
                            key: key.into(),
                            message: "expected two node indices".into(),
                        }
                    })?;
                    let j = it.next().map(parse_usize).transpose()?.ok_or_else(|| {
                        ConfigError::BadValue {
                            line: line_no,
                            key: key.into(),
                            message: "expected two node indices".into(),
                        }
                    })?;
                    raw.edges.push((i, j));
                }
                ("kernel", "name") => raw.kernel_name = Some(value.to_string()),
                ("kernel", "a") => raw.kernel_a = Some(parse_f64(value)?),
                ("sim", "dt") => raw.dt = Some(parse_f64(value)?),
                ("sim", "t_end") => raw.t_end = Some(parse_f64(value)?),
                ("sim", "record_every") => raw.record_every = Some(parse_usize(value)?),
                ("sim", "init") => raw.init = Some(value.to_string()),
                ("sim", "seed") => {
                    raw.seed = Some(value.parse::<u64>().map_err(|e| ConfigError::BadValue {
                        line: line_no,
                        key: key.into(),
                        message: e.to_string(),
                    })?)
                }
                ("sim", "vector") => {
                    let comps: Result<Vec<f64>, _> =
                        value.split_whitespace().map(parse_f64).collect();
                    let comps = comps?;
                    if comps.len() != 3 {
                        return Err(ConfigError::BadValue {
                            line: line_no,
                            key: key.into(),
                            message: "expected three components".into(),
                        });
                    }
                    raw.vectors.push([comps[0], comps[1], comps[2]]);
                }
                ("checks", "final_spread_max") => raw.checks.push(Check::FinalSpreadMax(parse_f64(value)?)),
                ("checks", "rate_min") => raw.checks.push(Check::RateMin(parse_f64(value)?)),
                ("checks", "constant_limit_tol") => {
                    raw.checks.push(Check::ConstantLimitTol(parse_f64(value)?))
                }
                ("checks", "v_final_max") => raw.checks.push(Check::VFinalMax(parse_f64(value)?)),
                (sec, _) if sec.is_empty() => {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        message: "key outside of any section".into(),
                    })
                }
                (sec, k) => {
                    return Err(ConfigError::UnknownKey {
                        line: line_no,
                        section: sec.to_string(),
                        key: k.to_string(),
                    })
                }
            }
        }

        let nodes = raw.nodes.ok_or(ConfigError::MissingField { section: "graph", field: "nodes" })?;
        let kernel_name =
            raw.kernel_name.ok_or(ConfigError::MissingField { section: "kernel", field: "name" })?;
        let dt = raw.dt.ok_or(ConfigError::MissingField { section: "sim", field: "dt" })?;
        let t_end = raw.t_end.ok_or(ConfigError::MissingField { section: "sim", field: "t_end" })?;

        let init = match raw.init.as_deref().unwrap_or("random") {
            "random" => InitSpec::Random { seed: raw.seed.unwrap_or(0) },
            "explicit" => {
                if raw.vectors.len() != nodes {
                    return Err(ConfigError::VectorCount(raw.vectors.len(), nodes));
                }
                InitSpec::Explicit(raw.vectors)
            }
            other => {
                return Err(ConfigError::BadValue {
                    line: 0,
                    key: "init".into(),
                    message: format!("expected `random` or `explicit`, got `{other}`"),
                })
            }
        };

        Ok(Self {
            nodes,
            edges: raw.edges,
            kernel_name,
            kernel_a: raw.kernel_a,
            dt,
            t_end,
            record_every: raw.record_every.unwrap_or(100),
            init,
            checks: raw.checks,
        })
    }

    /// Canonical text form; `parse(to_text(parse(x)))` equals `parse(x)`
    /// field by field.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("[graph]\n");
        out.push_str(&format!("nodes = {}\n", self.nodes));
        for (i, j) in &self.edges {
            out.push_str(&format!("edge = {i} {j}\n"));
        }
        out.push_str("\n[kernel]\n");
        out.push_str(&format!("name = {}\n", self.kernel_name));
        if let Some(a) = self.kernel_a {
            out.push_str(&format!("a = {a}\n"));
        }
        out.push_str("\n[sim]\n");
        out.push_str(&format!("dt = {}\n", self.dt));
        out.push_str(&format!("t_end = {}\n", self.t_end));
        out.push_str(&format!("record_every = {}\n", self.record_every));
        match &self.init {
            InitSpec::Random { seed } => {
                out.push_str("init = random\n");
                out.push_str(&format!("seed = {seed}\n"));
            }
            InitSpec::Explicit(vectors) => {
                out.push_str("init = explicit\n");
                for v in vectors {
                    out.push_str(&format!("vector = {} {} {}\n", v[0], v[1], v[2]));
                }
            }
        }
        if !self.checks.is_empty() {
            out.push_str("\n[checks]\n");
            for c in &self.checks {
                out.push_str(&format!("{} = {}\n", c.key(), c.value()));
            }
        }
        out
    }

    /// Builds the runnable simulation configuration (graph indices shift
    /// from the file's 1-based convention to 0-based).
    pub fn build(&self) -> Result<SimulationConfig<f64>, ConfigError> {
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(i, j)| (i.saturating_sub(1), j.saturating_sub(1)))
            .collect();
        let graph = NetworkGraph::new(self.nodes, &edges)?;
        let kernel = DistanceKernel::by_name(&self.kernel_name, self.kernel_a)?;
        let initial = match &self.init {
            InitSpec::Random { seed } => InitialState::Random { seed: *seed },
            InitSpec::Explicit(vs) => {
                let vectors: Result<Vec<_>, _> =
                    vs.iter().map(|v| UnitVector::new(v[0], v[1], v[2])).collect();
                InitialState::Explicit(vectors.map_err(|e| ConfigError::BadValue {
                    line: 0,
                    key: "vector".into(),
                    message: e.to_string(),
                })?)
            }
        };
        let mut config = SimulationConfig::uniform(graph, kernel, initial);
        config.dt = self.dt;
        config.t_end = self.t_end;
        config.record_every = self.record_every;
        Ok(config)
    }
}
