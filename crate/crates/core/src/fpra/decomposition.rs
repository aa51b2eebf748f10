use num_traits::{Signed, Zero};

use super::FpraError;
use crate::model::{ArcId, FractionalFlow, WeightedSsufNetwork};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecomposedPath {
    pub terminal: usize,
    pub arcs: Vec<ArcId>,
    pub amount: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathDecomposition {
    pub paths: Vec<DecomposedPath>,
}

impl PathDecomposition {
    /// Per-arc sum of path amounts.
    pub fn loads(&self, arcs: usize) -> Vec<Rational> {
        let mut load = vec![Rational::zero(); arcs];
        for p in &self.paths {
            for &a in &p.arcs {
                load[a] += &p.amount;
            }
        }
        load
    }

    pub fn for_terminal(&self, terminal: usize) -> impl Iterator<Item = (usize, &DecomposedPath)> {
        self.paths
            .iter()
            .enumerate()
            .filter(move |(_, p)| p.terminal == terminal)
    }
}

/// Splits `x` into source-terminal paths by walking backwards from each
/// terminal along arcs with remaining flow. Each extracted path either
/// finishes its terminal or empties an arc, so at most `|A| + |T|` paths
/// are produced.
pub fn flow_decomposition(network: &WeightedSsufNetwork, x: &FractionalFlow) -> Result<PathDecomposition, FpraError> {
    let support = x.support();
    if let Some(cycle) = network.find_cycle(&support) {
        return Err(FpraError::CyclicSupport(cycle));
    }
    let mut residual = x.values().to_vec();
    let mut in_arcs: Vec<Vec<ArcId>> = vec![Vec::new(); network.node_count()];
    for (id, arc) in network.arcs().iter().enumerate() {
        in_arcs[arc.head].push(id);
    }
    let mut out = PathDecomposition::default();
    for (index, terminal) in network.terminals().iter().enumerate() {
        let mut remaining = terminal.demand.clone();
        while remaining.is_positive() {
            let mut arcs = Vec::new();
            let mut at = terminal.node;
            let mut bottleneck = remaining.clone();
            while at != network.source() {
                let Some(&arc) = in_arcs[at].iter().find(|&&a| residual[a].is_positive()) else {
                    // Conservation fails: x is not in the flow polytope.
                    return Err(crate::model::ModelError::InvalidPath {
                        terminal: index,
                        reason: "flow does not reach the terminal".into(),
                    }
                    .into());
                };
                if residual[arc] < bottleneck {
                    bottleneck = residual[arc].clone();
                }
                arcs.push(arc);
                at = network.arc(arc).tail;
            }
            arcs.reverse();
            for &a in &arcs {
                residual[a] -= &bottleneck;
            }
            remaining -= &bottleneck;
            out.paths.push(DecomposedPath {
                terminal: index,
                arcs,
                amount: bottleneck,
            });
        }
    }
    Ok(out)
}
