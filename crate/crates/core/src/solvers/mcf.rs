//! Min-cost flow with lower and upper arc bounds.
//!
//! Arcs start at their lower bound (negative-cost arcs at their upper bound,
//! so every residual arc has nonnegative cost). The remaining node
//! imbalances are routed from a super source to a super sink by successive
//! shortest augmenting paths, using Dijkstra on reduced costs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::{Signed, Zero};

use super::lp::Optimum;
use super::SolverError;
use crate::model::{FractionalFlow, WeightedSsufNetwork};
use crate::rational::Rational;

/// Per-arc bounds `0 <= lower <= upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcBounds {
    lower: Vec<Rational>,
    upper: Vec<Rational>,
}

impl ArcBounds {
    pub fn new(lower: Vec<Rational>, upper: Vec<Rational>) -> Result<Self, SolverError> {
        if lower.len() != upper.len() {
            return Err(SolverError::InvalidBounds("length mismatch".into()));
        }
        for (arc, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_negative() {
                return Err(SolverError::InvalidBounds(format!("negative lower bound on arc {arc}")));
            }
            if l > u {
                return Err(SolverError::InvalidBounds(format!("lower exceeds upper on arc {arc}")));
            }
        }
        Ok(ArcBounds { lower, upper })
    }

    pub fn lower(&self) -> &[Rational] {
        &self.lower
    }

    pub fn upper(&self) -> &[Rational] {
        &self.upper
    }

    pub fn contains(&self, values: &[Rational]) -> bool {
        values.len() == self.lower.len()
            && values
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| l <= v && v <= u)
    }
}

struct Residual {
    head: Vec<usize>,
    capacity: Vec<Rational>,
    cost: Vec<Rational>,
    out: Vec<Vec<usize>>,
}

impl Residual {
    fn new(nodes: usize) -> Self {
        Residual {
            head: Vec::new(),
            capacity: Vec::new(),
            cost: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    /// Adds `u -> v` and its reverse twin; returns the forward index (twin is `index ^ 1`).
    fn link(&mut self, u: usize, v: usize, capacity: Rational, cost: Rational) -> usize {
        let e = self.head.len();
        self.head.push(v);
        self.capacity.push(capacity);
        self.cost.push(cost.clone());
        self.out[u].push(e);
        self.head.push(u);
        self.capacity.push(Rational::zero());
        self.cost.push(-cost);
        self.out[v].push(e + 1);
        e
    }
}

/// Exact min-cost flow in the flow polytope of `network` within `bounds`.
pub fn min_cost_flow_bounded(
    network: &WeightedSsufNetwork,
    bounds: &ArcBounds,
) -> Result<Optimum<FractionalFlow>, SolverError> {
    let arcs = network.arcs();
    if bounds.lower.len() != arcs.len() {
        return Err(SolverError::InvalidBounds("bounds do not match the arc count".into()));
    }
    let n = network.node_count();
    let super_source = n;
    let super_sink = n + 1;

    let mut base: Vec<Rational> = arcs
        .iter()
        .zip(bounds.lower.iter().zip(&bounds.upper))
        .map(|(a, (l, u))| if a.cost.is_negative() { u.clone() } else { l.clone() })
        .collect();

    let mut need = network.supplies();
    for (arc, flow) in arcs.iter().zip(&base) {
        need[arc.tail] -= flow;
        need[arc.head] += flow;
    }

    let mut graph = Residual::new(n + 2);
    let mut forward = Vec::with_capacity(arcs.len());
    for (i, arc) in arcs.iter().enumerate() {
        let e = graph.link(arc.tail, arc.head, &bounds.upper[i] - &base[i], arc.cost.clone());
        graph.capacity[e + 1] = &base[i] - &bounds.lower[i];
        forward.push(e);
    }
    let mut required = Rational::zero();
    for (v, amount) in need.iter().enumerate() {
        if amount.is_positive() {
            graph.link(super_source, v, amount.clone(), Rational::zero());
            required += amount;
        } else if amount.is_negative() {
            graph.link(v, super_sink, -amount, Rational::zero());
        }
    }

    let mut potential = vec![Rational::zero(); n + 2];
    let mut routed = Rational::zero();
    while routed < required {
        let Some((dist, parent)) = shortest_paths(&graph, &potential, super_source) else {
            break;
        };
        let Some(sink_dist) = dist[super_sink].clone() else {
            break;
        };
        for (p, d) in potential.iter_mut().zip(&dist) {
            *p += match d {
                Some(d) if *d < sink_dist => d.clone(),
                _ => sink_dist.clone(),
            };
        }
        let mut bottleneck = &required - &routed;
        let mut v = super_sink;
        while v != super_source {
            let e = parent[v].expect("reachable node has a parent");
            if graph.capacity[e] < bottleneck {
                bottleneck = graph.capacity[e].clone();
            }
            v = graph.head[e ^ 1];
        }
        let mut v = super_sink;
        while v != super_source {
            let e = parent[v].expect("reachable node has a parent");
            graph.capacity[e] -= &bottleneck;
            graph.capacity[e ^ 1] += &bottleneck;
            v = graph.head[e ^ 1];
        }
        routed += bottleneck;
    }
    if routed < required {
        return Err(SolverError::Infeasible);
    }

    for (i, &e) in forward.iter().enumerate() {
        // Net change relative to the starting point is the reverse twin's gain.
        let start_reverse = &base[i] - &bounds.lower[i];
        base[i] += &graph.capacity[e + 1] - start_reverse;
    }
    let objective = network.cost_of(&base);
    Ok(Optimum {
        point: FractionalFlow::new(base),
        objective,
    })
}

type Paths = (Vec<Option<Rational>>, Vec<Option<usize>>);

fn shortest_paths(graph: &Residual, potential: &[Rational], from: usize) -> Option<Paths> {
    let n = graph.out.len();
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[from] = Some(Rational::zero());
    heap.push(Reverse((Rational::zero(), from)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &e in &graph.out[u] {
            if !graph.capacity[e].is_positive() {
                continue;
            }
            let v = graph.head[e];
            let reduced = &graph.cost[e] + &potential[u] - &potential[v];
            debug_assert!(!reduced.is_negative(), "reduced costs stay nonnegative");
            let candidate = &d + reduced;
            if dist[v].as_ref().is_none_or(|cur| candidate < *cur) {
                dist[v] = Some(candidate.clone());
                parent[v] = Some(e);
                heap.push(Reverse((candidate, v)));
            }
        }
    }
    Some((dist, parent))
}
