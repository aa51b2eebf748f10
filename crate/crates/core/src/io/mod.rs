//! Instance and report files.
//!
//! Instances are JSON documents tagged by `kind`. Nodes are referenced by
//! name and every number is a rational string (`"3"`, `"-1/2"`).
//!
//! ```json
//! {
//!   "kind": "ssuf",
//!   "nodes": ["s", "t"],
//!   "source": "s",
//!   "arcs": [{ "tail": "s", "head": "t", "cost": "1" }],
//!   "terminals": [{ "node": "t", "demand": "1/2" }],
//!   "fractional": ["1/2"]
//! }
//! ```
//!
//! Ring edge `i` joins `nodes[i]` and `nodes[i + 1]` (cyclically); ring
//! fractional solutions list the clockwise share of each commodity.

mod report;

pub use report::{Report, RingReport, SsufReport};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Arc, Commodity, FractionalFlow, ModelError, RingEdge, RingFractionalSolution, RingInstance, Terminal,
    WeightedSsufNetwork,
};
use crate::rational::{serde_rational, serde_rational_opt, Exact};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed document: {0}")]
    Parse(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("expected a {expected} instance")]
    WrongKind { expected: &'static str },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcRecord {
    pub tail: String,
    pub head: String,
    #[serde(with = "serde_rational")]
    pub cost: crate::Rational,
    /// Accepted for compatibility; flow instances are uncapacitated.
    #[serde(default, with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
    pub capacity: Option<crate::Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalRecord {
    pub node: String,
    #[serde(with = "serde_rational")]
    pub demand: crate::Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    #[serde(with = "serde_rational")]
    pub cost: crate::Rational,
    #[serde(default, with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
    pub capacity: Option<crate::Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommodityRecord {
    pub source: String,
    pub sink: String,
    #[serde(with = "serde_rational")]
    pub demand: crate::Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsufDocument {
    pub nodes: Vec<String>,
    pub source: String,
    pub arcs: Vec<ArcRecord>,
    pub terminals: Vec<TerminalRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fractional: Option<Vec<Exact>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingDocument {
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeRecord>,
    pub commodities: Vec<CommodityRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fractional: Option<Vec<Exact>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceDocument {
    Ssuf(SsufDocument),
    Ring(RingDocument),
}

/// A parsed and validated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Ssuf {
        network: WeightedSsufNetwork,
        fractional: Option<FractionalFlow>,
    },
    Ring {
        ring: RingInstance,
        fractional: Option<RingFractionalSolution>,
    },
}

fn index(nodes: &[String]) -> Result<HashMap<&str, usize>, IoError> {
    let mut map = HashMap::with_capacity(nodes.len());
    for (i, n) in nodes.iter().enumerate() {
        if map.insert(n.as_str(), i).is_some() {
            return Err(IoError::DuplicateNode(n.clone()));
        }
    }
    Ok(map)
}

fn lookup(map: &HashMap<&str, usize>, name: &str) -> Result<usize, IoError> {
    map.get(name)
        .copied()
        .ok_or_else(|| IoError::UnknownNode(name.to_string()))
}

fn exact(values: &[Exact]) -> Vec<crate::Rational> {
    values.iter().map(|v| v.0.clone()).collect()
}

impl SsufDocument {
    pub fn network(&self) -> Result<WeightedSsufNetwork, IoError> {
        let map = index(&self.nodes)?;
        let arcs = self
            .arcs
            .iter()
            .map(|a| {
                Ok(Arc {
                    tail: lookup(&map, &a.tail)?,
                    head: lookup(&map, &a.head)?,
                    cost: a.cost.clone(),
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        let terminals = self
            .terminals
            .iter()
            .map(|t| {
                Ok(Terminal {
                    node: lookup(&map, &t.node)?,
                    demand: t.demand.clone(),
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(WeightedSsufNetwork::new(
            self.nodes.clone(),
            arcs,
            lookup(&map, &self.source)?,
            terminals,
        )?)
    }

    pub fn fractional_flow(&self) -> Option<FractionalFlow> {
        self.fractional.as_deref().map(|v| FractionalFlow::new(exact(v)))
    }

    pub fn from_network(network: &WeightedSsufNetwork, fractional: Option<&FractionalFlow>) -> Self {
        let name = |i: usize| network.nodes()[i].clone();
        SsufDocument {
            nodes: network.nodes().to_vec(),
            source: name(network.source()),
            arcs: network
                .arcs()
                .iter()
                .map(|a| ArcRecord {
                    tail: name(a.tail),
                    head: name(a.head),
                    cost: a.cost.clone(),
                    capacity: None,
                })
                .collect(),
            terminals: network
                .terminals()
                .iter()
                .map(|t| TerminalRecord {
                    node: name(t.node),
                    demand: t.demand.clone(),
                })
                .collect(),
            fractional: fractional.map(|x| x.values().iter().cloned().map(Exact).collect()),
        }
    }
}

impl RingDocument {
    pub fn ring(&self) -> Result<RingInstance, IoError> {
        let map = index(&self.nodes)?;
        let edges = self
            .edges
            .iter()
            .map(|e| RingEdge {
                cost: e.cost.clone(),
                capacity: e.capacity.clone(),
            })
            .collect();
        let commodities = self
            .commodities
            .iter()
            .map(|c| {
                Ok(Commodity {
                    source: lookup(&map, &c.source)?,
                    sink: lookup(&map, &c.sink)?,
                    demand: c.demand.clone(),
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(RingInstance::new(self.nodes.clone(), edges, commodities)?)
    }

    pub fn fractional_splits(&self) -> Result<Option<RingFractionalSolution>, IoError> {
        self.fractional
            .as_deref()
            .map(|v| RingFractionalSolution::new(exact(v)).map_err(IoError::from))
            .transpose()
    }

    pub fn from_ring(ring: &RingInstance, fractional: Option<&RingFractionalSolution>) -> Self {
        let name = |i: usize| ring.nodes()[i].clone();
        RingDocument {
            nodes: ring.nodes().to_vec(),
            edges: ring
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    cost: e.cost.clone(),
                    capacity: e.capacity.clone(),
                })
                .collect(),
            commodities: ring
                .commodities()
                .iter()
                .map(|c| CommodityRecord {
                    source: name(c.source),
                    sink: name(c.sink),
                    demand: c.demand.clone(),
                })
                .collect(),
            fractional: fractional.map(|x| x.splits().iter().cloned().map(Exact).collect()),
        }
    }
}

impl InstanceDocument {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_text(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("documents serialize");
        text.push('\n');
        text
    }

    pub fn instance(&self) -> Result<Instance, IoError> {
        match self {
            InstanceDocument::Ssuf(doc) => Ok(Instance::Ssuf {
                network: doc.network()?,
                fractional: doc.fractional_flow(),
            }),
            InstanceDocument::Ring(doc) => Ok(Instance::Ring {
                ring: doc.ring()?,
                fractional: doc.fractional_splits()?,
            }),
        }
    }
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    InstanceDocument::parse(text)?.instance()
}
