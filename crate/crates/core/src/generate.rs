//! Seeded random instances.
//!
//! Every generator takes a seed and is deterministic for a given seed and
//! parameter set. Flow networks are acyclic by construction (arcs always go
//! from a lower to a higher node index) and carry a feasible fractional
//! flow obtained by mixing random source-terminal paths.

use num_traits::Zero;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Arc, Commodity, FractionalFlow, RingEdge, RingFractionalSolution, RingInstance, Terminal, WeightedSsufNetwork,
};
use crate::rational::{ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("unsatisfiable parameters: {0}")]
    UnsatisfiableParams(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsufParams {
    pub nodes: usize,
    pub arcs: usize,
    pub terminals: usize,
    /// Demands are `p/q` with `1 ≤ p ≤ max_numerator`, `1 ≤ q ≤ max_denominator`.
    pub max_numerator: i64,
    pub max_denominator: i64,
    /// Arc costs are integers in `[0, max_cost]`.
    pub max_cost: i64,
    /// Paths mixed per terminal in the fractional flow, at most.
    pub max_paths: usize,
}

impl Default for SsufParams {
    fn default() -> Self {
        SsufParams {
            nodes: 5,
            arcs: 8,
            terminals: 2,
            max_numerator: 4,
            max_denominator: 3,
            max_cost: 5,
            max_paths: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingParams {
    pub nodes: usize,
    pub commodities: usize,
    pub max_numerator: i64,
    pub max_denominator: i64,
    pub max_cost: i64,
    /// When set, every edge gets a capacity `p/q` with `1 ≤ p ≤ max_capacity`.
    pub max_capacity: Option<i64>,
    /// Denominator of the random splits.
    pub split_denominator: i64,
}

impl Default for RingParams {
    fn default() -> Self {
        RingParams {
            nodes: 6,
            commodities: 3,
            max_numerator: 4,
            max_denominator: 3,
            max_cost: 5,
            max_capacity: None,
            split_denominator: 6,
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn demand(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rational {
    ratio(rng.gen_range(1..=max_num), rng.gen_range(1..=max_den))
}

fn check_ranges(max_num: i64, max_den: i64, max_cost: i64) -> Result<(), GenerateError> {
    if max_num < 1 || max_den < 1 {
        return Err(GenerateError::UnsatisfiableParams(
            "demand ranges must be positive".into(),
        ));
    }
    if max_cost < 0 {
        return Err(GenerateError::UnsatisfiableParams(
            "max_cost must be nonnegative".into(),
        ));
    }
    Ok(())
}

/// A random acyclic network with a feasible fractional flow.
pub fn random_ssuf(seed: u64, p: &SsufParams) -> Result<(WeightedSsufNetwork, FractionalFlow), GenerateError> {
    check_ranges(p.max_numerator, p.max_denominator, p.max_cost)?;
    if p.nodes < 2 {
        return Err(GenerateError::UnsatisfiableParams(
            "at least two nodes are needed".into(),
        ));
    }
    if p.terminals > p.nodes - 1 {
        return Err(GenerateError::UnsatisfiableParams(format!(
            "{} terminals need at least {} nodes",
            p.terminals,
            p.terminals + 1
        )));
    }
    if p.arcs < p.nodes - 1 {
        return Err(GenerateError::UnsatisfiableParams(format!(
            "{} nodes need at least {} arcs to stay connected",
            p.nodes,
            p.nodes - 1
        )));
    }
    if p.max_paths < 1 {
        return Err(GenerateError::UnsatisfiableParams("max_paths must be positive".into()));
    }
    let mut rng = rng(seed);
    let n = p.nodes;
    let mut arcs = Vec::with_capacity(p.arcs);
    // One arc into every non-source node from an earlier node keeps everything reachable.
    for head in 1..n {
        let tail = rng.gen_range(0..head);
        arcs.push((tail, head));
    }
    while arcs.len() < p.arcs {
        let head = rng.gen_range(1..n);
        let tail = rng.gen_range(0..head);
        arcs.push((tail, head));
    }
    let arcs: Vec<Arc> = arcs
        .into_iter()
        .map(|(tail, head)| Arc {
            tail,
            head,
            cost: Rational::from_integer(rng.gen_range(0..=p.max_cost).into()),
        })
        .collect();
    let mut terminal_nodes: Vec<usize> = sample(&mut rng, n - 1, p.terminals)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    terminal_nodes.sort_unstable();
    let terminals: Vec<Terminal> = terminal_nodes
        .iter()
        .map(|&node| Terminal {
            node,
            demand: demand(&mut rng, p.max_numerator, p.max_denominator),
        })
        .collect();

    let mut in_arcs = vec![Vec::new(); n];
    for (id, a) in arcs.iter().enumerate() {
        in_arcs[a.head].push(id);
    }
    let mut x = vec![Rational::zero(); arcs.len()];
    for t in &terminals {
        let count = rng.gen_range(1..=p.max_paths);
        let weights: Vec<i64> = (0..count).map(|_| rng.gen_range(1..=4)).collect();
        let total: i64 = weights.iter().sum();
        for w in weights {
            let share = &t.demand * ratio(w, total);
            let mut at = t.node;
            while at != 0 {
                let id = in_arcs[at][rng.gen_range(0..in_arcs[at].len())];
                x[id] += &share;
                at = arcs[id].tail;
            }
        }
    }
    let names = (0..n)
        .map(|i| if i == 0 { "s".to_string() } else { format!("v{i}") })
        .collect();
    let network = WeightedSsufNetwork::new(names, arcs, 0, terminals).expect("generated networks are valid");
    Ok((network, FractionalFlow::new(x)))
}

/// A random ring instance with a fractional solution. About one commodity
/// in five is left unsplit so that preprocessing has something to fix.
pub fn random_ring(seed: u64, p: &RingParams) -> Result<(RingInstance, RingFractionalSolution), GenerateError> {
    check_ranges(p.max_numerator, p.max_denominator, p.max_cost)?;
    if p.nodes < 2 {
        return Err(GenerateError::UnsatisfiableParams(
            "a ring needs at least two nodes".into(),
        ));
    }
    if p.split_denominator < 1 {
        return Err(GenerateError::UnsatisfiableParams(
            "split_denominator must be positive".into(),
        ));
    }
    if p.max_capacity.is_some_and(|c| c < 1) {
        return Err(GenerateError::UnsatisfiableParams(
            "max_capacity must be positive".into(),
        ));
    }
    let mut rng = rng(seed);
    let n = p.nodes;
    let edges = (0..n)
        .map(|_| RingEdge {
            cost: Rational::from_integer(rng.gen_range(0..=p.max_cost).into()),
            capacity: p.max_capacity.map(|c| demand(&mut rng, c, p.max_denominator)),
        })
        .collect();
    let mut commodities = Vec::with_capacity(p.commodities);
    let mut splits = Vec::with_capacity(p.commodities);
    for _ in 0..p.commodities {
        let pair = sample(&mut rng, n, 2);
        commodities.push(Commodity {
            source: pair.index(0),
            sink: pair.index(1),
            demand: demand(&mut rng, p.max_numerator, p.max_denominator),
        });
        let q = p.split_denominator;
        splits.push(if rng.gen_ratio(1, 5) {
            Rational::from_integer(rng.gen_range(0..=1).into())
        } else {
            ratio(rng.gen_range(0..=q), q)
        });
    }
    let names = (0..n).map(|i| format!("r{i}")).collect();
    let ring = RingInstance::new(names, edges, commodities).expect("generated rings are valid");
    let x = RingFractionalSolution::new(splits).expect("splits lie in [0, 1]");
    Ok((ring, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::is_in_polytope;

    #[test]
    fn deterministic_per_seed() {
        let p = SsufParams::default();
        assert_eq!(random_ssuf(1, &p).unwrap(), random_ssuf(1, &p).unwrap());
        assert_ne!(random_ssuf(1, &p).unwrap(), random_ssuf(2, &p).unwrap());
        let r = RingParams::default();
        assert_eq!(random_ring(7, &r).unwrap(), random_ring(7, &r).unwrap());
    }

    #[test]
    fn zero_terminals() {
        let p = SsufParams {
            terminals: 0,
            ..Default::default()
        };
        let (g, x) = random_ssuf(3, &p).unwrap();
        assert!(g.terminals().is_empty());
        assert!(x.values().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn too_many_terminals() {
        let p = SsufParams {
            nodes: 3,
            terminals: 3,
            ..Default::default()
        };
        assert!(matches!(random_ssuf(1, &p), Err(GenerateError::UnsatisfiableParams(_))));
    }

    #[test]
    fn feasible_and_acyclic() {
        for seed in 0..50 {
            let (g, x) = random_ssuf(seed, &SsufParams::default()).unwrap();
            assert!(g.is_acyclic());
            assert!(is_in_polytope(&g, x.values()));
        }
    }

    #[test]
    fn capacitated_rings() {
        let p = RingParams {
            max_capacity: Some(6),
            ..Default::default()
        };
        for seed in 0..20 {
            let (r, x) = random_ring(seed, &p).unwrap();
            assert!(r.capacities().is_some());
            assert_eq!(x.splits().len(), 3);
        }
    }
}
