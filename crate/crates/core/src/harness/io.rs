use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{round_sig, HarnessError};
use crate::graph::{DemandPair, Edge, EdgeId, Instance, VertexId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: VertexId,
    pub v: VertexId,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandRecord {
    #[serde(rename = "S")]
    pub sources: Vec<VertexId>,
    #[serde(rename = "T")]
    pub sinks: Vec<VertexId>,
    pub k: u32,
}

/// On-disk instance: `{n, edges: [{u, v, cost}], demands: [{S, T, k}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub edges: Vec<EdgeRecord>,
    pub demands: Vec<DemandRecord>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        InstanceFile {
            n: instance.n(),
            edges: instance
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    u: e.u,
                    v: e.v,
                    cost: e.cost,
                })
                .collect(),
            demands: instance
                .demands()
                .iter()
                .map(|d| DemandRecord {
                    sources: d.sources().to_vec(),
                    sinks: d.sinks().to_vec(),
                    k: d.requirement(),
                })
                .collect(),
        }
    }

    pub fn into_instance(self) -> Result<Instance, crate::graph::GraphError> {
        let edges = self.edges.into_iter().map(|e| Edge::new(e.u, e.v, e.cost)).collect();
        let demands = self
            .demands
            .into_iter()
            .map(|d| DemandPair::new(d.sources, d.sinks, d.k))
            .collect();
        Instance::new(self.n, edges, demands)
    }
}

/// Parse and validate an instance document; `context` prefixes error messages.
pub fn parse_instance(text: &str, context: &str) -> Result<Instance, HarnessError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|source| HarnessError::Json {
        context: context.to_string(),
        source,
    })?;
    file.into_instance().map_err(|source| HarnessError::Invalid {
        context: context.to_string(),
        source,
    })
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, HarnessError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text, &path.display().to_string())
}

fn canonical_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonical_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, canonical_value(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with sorted keys and floats rounded to 9 significant digits.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String, HarnessError> {
    let v = serde_json::to_value(value).map_err(|source| HarnessError::Json {
        context: "serialize".into(),
        source,
    })?;
    let mut out = serde_json::to_string_pretty(&canonical_value(v)).map_err(|source| HarnessError::Json {
        context: "serialize".into(),
        source,
    })?;
    out.push('\n');
    Ok(out)
}

pub fn instance_to_json(instance: &Instance) -> String {
    canonical_json(&InstanceFile::from_instance(instance)).expect("instances serialize")
}

#[derive(Serialize)]
struct SolutionFile<'a, R: Serialize> {
    edges: &'a [EdgeId],
    cost: f64,
    record: &'a R,
}

/// Write `{edges, cost, record}` as canonical JSON.
pub fn save_solution<R: Serialize>(
    path: impl AsRef<Path>,
    edges: &[EdgeId],
    cost: f64,
    record: &R,
) -> Result<(), HarnessError> {
    let path = path.as_ref();
    let text = canonical_json(&SolutionFile { edges, cost, record })?;
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}
