//! Weighted single-source unsplittable flow networks, fractional flows in the
//! flow polytope, and path-based unsplittable flows.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::ModelError;
use crate::rational::{dot, max_of, Rational};

pub type NodeId = usize;
pub type ArcId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    pub cost: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Terminal {
    pub node: NodeId,
    pub demand: Rational,
}

/// A directed network with one source and demand-carrying terminals.
///
/// Arcs and terminals are addressed by their position. Several terminals may
/// share a node; their demands add up in the conservation constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedSsufNetwork {
    nodes: Vec<String>,
    arcs: Vec<Arc>,
    source: NodeId,
    terminals: Vec<Terminal>,
}

impl WeightedSsufNetwork {
    /// Builds a network. Costs may be negative here; the tradeoff pipeline
    /// rejects them where nonnegativity is required.
    pub fn new(
        nodes: Vec<String>,
        arcs: Vec<Arc>,
        source: NodeId,
        terminals: Vec<Terminal>,
    ) -> Result<Self, ModelError> {
        let n = nodes.len();
        if source >= n {
            return Err(ModelError::UnknownNode(source));
        }
        for arc in &arcs {
            if arc.tail >= n {
                return Err(ModelError::UnknownNode(arc.tail));
            }
            if arc.head >= n {
                return Err(ModelError::UnknownNode(arc.head));
            }
        }
        for (index, terminal) in terminals.iter().enumerate() {
            if terminal.node >= n {
                return Err(ModelError::UnknownNode(terminal.node));
            }
            if terminal.node == source {
                return Err(ModelError::TerminalAtSource(index));
            }
            if terminal.demand.is_negative() {
                return Err(ModelError::NegativeDemand(index));
            }
        }
        Ok(WeightedSsufNetwork {
            nodes,
            arcs,
            source,
            terminals,
        })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id]
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn terminals(&self) -> &[Terminal] {
        &self.terminals
    }

    pub fn costs(&self) -> Vec<Rational> {
        self.arcs.iter().map(|a| a.cost.clone()).collect()
    }

    pub fn total_demand(&self) -> Rational {
        self.terminals.iter().map(|t| t.demand.clone()).sum()
    }

    pub fn max_demand(&self) -> Rational {
        max_of(self.terminals.iter().map(|t| &t.demand))
    }

    pub fn has_nonnegative_costs(&self) -> bool {
        self.arcs.iter().all(|a| !a.cost.is_negative())
    }

    /// Net supply `out - in` required at every node.
    pub fn supplies(&self) -> Vec<Rational> {
        let mut supply = vec![Rational::zero(); self.nodes.len()];
        for terminal in &self.terminals {
            supply[self.source] += &terminal.demand;
            supply[terminal.node] -= &terminal.demand;
        }
        supply
    }

    pub fn cost_of(&self, values: &[Rational]) -> Rational {
        dot(&self.costs(), values)
    }

    pub fn out_arcs(&self, node: NodeId) -> impl Iterator<Item = ArcId> + '_ {
        self.arcs
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.tail == node)
            .map(|(id, _)| id)
    }

    /// Copy of this network keeping only the listed arcs (in the given order).
    pub fn with_arcs(&self, keep: &[ArcId]) -> WeightedSsufNetwork {
        WeightedSsufNetwork {
            nodes: self.nodes.clone(),
            arcs: keep.iter().map(|&id| self.arcs[id].clone()).collect(),
            source: self.source,
            terminals: self.terminals.clone(),
        }
    }

    /// True iff the arcs whose `mask` entry is set contain no directed cycle.
    pub fn is_acyclic_on(&self, mask: &[bool]) -> bool {
        self.find_cycle(mask).is_none()
    }

    pub fn is_acyclic(&self) -> bool {
        self.is_acyclic_on(&vec![true; self.arcs.len()])
    }

    /// Finds a directed cycle among the masked arcs by depth-first search,
    /// visiting nodes and arcs in id order. Returns the cycle's arc ids.
    pub fn find_cycle(&self, mask: &[bool]) -> Option<Vec<ArcId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let n = self.nodes.len();
        let mut adjacency: Vec<Vec<ArcId>> = vec![Vec::new(); n];
        for (id, arc) in self.arcs.iter().enumerate() {
            if mask[id] {
                adjacency[arc.tail].push(id);
            }
        }
        let mut mark = vec![Mark::New; n];
        for root in 0..n {
            if mark[root] != Mark::New {
                continue;
            }
            // Stack of (node, next adjacency position); `via` holds the arc used to enter each stacked node.
            let mut stack: Vec<(NodeId, usize)> = vec![(root, 0)];
            let mut via: Vec<ArcId> = Vec::new();
            mark[root] = Mark::Active;
            while let Some(top) = stack.last_mut() {
                let node = top.0;
                if top.1 < adjacency[node].len() {
                    let arc_id = adjacency[node][top.1];
                    top.1 += 1;
                    let next = self.arcs[arc_id].head;
                    match mark[next] {
                        Mark::New => {
                            mark[next] = Mark::Active;
                            stack.push((next, 0));
                            via.push(arc_id);
                        }
                        Mark::Active => {
                            let start = stack
                                .iter()
                                .position(|&(v, _)| v == next)
                                .expect("active node is on the stack");
                            let mut cycle: Vec<ArcId> = via[start..].to_vec();
                            cycle.push(arc_id);
                            return Some(cycle);
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[node] = Mark::Done;
                    stack.pop();
                    via.pop();
                }
            }
        }
        None
    }

    /// All simple source-to-`target` paths using arcs with `mask` set, in
    /// lexicographic order of their arc-id sequences. Stops after `cap` paths
    /// and reports whether the enumeration was truncated.
    pub fn simple_paths(&self, target: NodeId, mask: &[bool], cap: usize) -> (Vec<Vec<ArcId>>, bool) {
        let mut out = Vec::new();
        let mut visited = vec![false; self.nodes.len()];
        let mut current = Vec::new();
        visited[self.source] = true;
        let truncated = self.paths_from(self.source, target, mask, cap, &mut visited, &mut current, &mut out);
        (out, truncated)
    }

    #[allow(clippy::too_many_arguments)]
    fn paths_from(
        &self,
        node: NodeId,
        target: NodeId,
        mask: &[bool],
        cap: usize,
        visited: &mut [bool],
        current: &mut Vec<ArcId>,
        out: &mut Vec<Vec<ArcId>>,
    ) -> bool {
        if node == target {
            if out.len() >= cap {
                return true;
            }
            out.push(current.clone());
            return false;
        }
        for (id, arc) in self.arcs.iter().enumerate() {
            if !mask[id] || arc.tail != node || visited[arc.head] {
                continue;
            }
            visited[arc.head] = true;
            current.push(id);
            let truncated = self.paths_from(arc.head, target, mask, cap, visited, current, out);
            current.pop();
            visited[arc.head] = false;
            if truncated {
                return true;
            }
        }
        false
    }
}

/// A point of the flow polytope: one nonnegative value per arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalFlow {
    values: Vec<Rational>,
}

impl FractionalFlow {
    pub fn new(values: Vec<Rational>) -> Self {
        FractionalFlow { values }
    }

    pub fn zero(arcs: usize) -> Self {
        FractionalFlow {
            values: vec![Rational::zero(); arcs],
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    pub fn get(&self, arc: ArcId) -> &Rational {
        &self.values[arc]
    }

    pub fn support(&self) -> Vec<bool> {
        self.values.iter().map(|v| v.is_positive()).collect()
    }
}

/// One source-to-sink path per terminal, as arc-id sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsplittablePathFlow {
    paths: Vec<Vec<ArcId>>,
}

impl UnsplittablePathFlow {
    pub fn new(paths: Vec<Vec<ArcId>>) -> Self {
        UnsplittablePathFlow { paths }
    }

    pub fn paths(&self) -> &[Vec<ArcId>] {
        &self.paths
    }

    pub fn path(&self, terminal: usize) -> &[ArcId] {
        &self.paths[terminal]
    }

    /// Re-indexes arc ids through `map` (sub-network id to original id).
    pub fn lift(&self, map: &[ArcId]) -> UnsplittablePathFlow {
        UnsplittablePathFlow {
            paths: self.paths.iter().map(|p| p.iter().map(|&a| map[a]).collect()).collect(),
        }
    }
}

/// Checks that `path` is a simple path from the source to `terminal`'s node.
pub fn validate_path(network: &WeightedSsufNetwork, terminal: usize, path: &[ArcId]) -> Result<(), ModelError> {
    let invalid = |reason: &str| ModelError::InvalidPath {
        terminal,
        reason: reason.to_string(),
    };
    let target = network
        .terminals()
        .get(terminal)
        .ok_or_else(|| invalid("no such terminal"))?
        .node;
    let mut at = network.source();
    let mut seen = BTreeSet::from([at]);
    for &arc_id in path {
        let arc = network.arcs().get(arc_id).ok_or_else(|| invalid("unknown arc"))?;
        if arc.tail != at {
            return Err(invalid("arcs are not consecutive"));
        }
        at = arc.head;
        if !seen.insert(at) {
            return Err(invalid("path revisits a node"));
        }
    }
    if at != target {
        return Err(invalid("path does not end at the terminal"));
    }
    Ok(())
}

/// Arc loads `f(a) = sum of d_t over terminals whose path uses a`.
pub fn induced_load(network: &WeightedSsufNetwork, flow: &UnsplittablePathFlow) -> Result<Vec<Rational>, ModelError> {
    if flow.paths().len() != network.terminals().len() {
        return Err(ModelError::DimensionMismatch {
            expected: network.terminals().len(),
            found: flow.paths().len(),
        });
    }
    let mut load = vec![Rational::zero(); network.arc_count()];
    for (index, path) in flow.paths().iter().enumerate() {
        validate_path(network, index, path)?;
        let demand = &network.terminals()[index].demand;
        for &arc in path {
            load[arc] += demand;
        }
    }
    Ok(load)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Negative {
        arc: ArcId,
        value: Rational,
    },
    Conservation {
        node: NodeId,
        expected: Rational,
        found: Rational,
    },
    Dimension {
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MembershipReport {
    pub violations: Vec<Violation>,
}

impl MembershipReport {
    pub fn is_member(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exact membership test for the flow polytope: nonnegativity and
/// conservation with aggregated supplies.
pub fn check_membership(network: &WeightedSsufNetwork, values: &[Rational]) -> MembershipReport {
    let mut report = MembershipReport::default();
    if values.len() != network.arc_count() {
        report.violations.push(Violation::Dimension {
            expected: network.arc_count(),
            found: values.len(),
        });
        return report;
    }
    for (arc, value) in values.iter().enumerate() {
        if value.is_negative() {
            report.violations.push(Violation::Negative {
                arc,
                value: value.clone(),
            });
        }
    }
    let mut net = vec![Rational::zero(); network.node_count()];
    for (arc, value) in network.arcs().iter().zip(values) {
        net[arc.tail] += value;
        net[arc.head] -= value;
    }
    for (node, (found, expected)) in net.into_iter().zip(network.supplies()).enumerate() {
        if found != expected {
            report
                .violations
                .push(Violation::Conservation { node, expected, found });
        }
    }
    report
}

pub fn is_in_polytope(network: &WeightedSsufNetwork, values: &[Rational]) -> bool {
    check_membership(network, values).is_member()
}

/// Cancels flow around directed cycles until the support is acyclic.
/// Each round subtracts the bottleneck of the first cycle found by DFS.
pub fn eliminate_cycle_flow(network: &WeightedSsufNetwork, x: &FractionalFlow) -> FractionalFlow {
    let mut values = x.values().to_vec();
    loop {
        let mask: Vec<bool> = values.iter().map(|v| v.is_positive()).collect();
        let Some(cycle) = network.find_cycle(&mask) else {
            break;
        };
        let bottleneck = cycle
            .iter()
            .map(|&a| values[a].clone())
            .min()
            .expect("cycles are nonempty");
        for &a in &cycle {
            values[a] -= &bottleneck;
        }
    }
    FractionalFlow::new(values)
}

/// A network restricted to a flow's support, remembering original arc ids.
#[derive(Debug, Clone)]
pub struct SupportRestriction {
    pub network: WeightedSsufNetwork,
    /// `arc_map[i]` is the original id of sub-network arc `i`.
    pub arc_map: Vec<ArcId>,
}

impl SupportRestriction {
    pub fn restrict(&self, values: &[Rational]) -> Vec<Rational> {
        self.arc_map.iter().map(|&a| values[a].clone()).collect()
    }

    pub fn embed(&self, sub_values: &[Rational], arcs: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); arcs];
        for (i, &a) in self.arc_map.iter().enumerate() {
            out[a] = sub_values[i].clone();
        }
        out
    }
}

pub fn support_subnetwork(network: &WeightedSsufNetwork, x: &FractionalFlow) -> SupportRestriction {
    let arc_map: Vec<ArcId> = (0..network.arc_count()).filter(|&a| x.get(a).is_positive()).collect();
    SupportRestriction {
        network: network.with_arcs(&arc_map),
        arc_map,
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::rational::{int, ratio};

    fn flow(values: &[Rational]) -> FractionalFlow {
        FractionalFlow::new(values.to_vec())
    }

    #[test]
    fn load_of_parallel_arcs() {
        let g = parallel_arcs(0, 1);
        let both_first = UnsplittablePathFlow::new(vec![vec![0], vec![0]]);
        assert_eq!(induced_load(&g, &both_first).unwrap(), vec![int(2), int(0)]);
        let one_each = UnsplittablePathFlow::new(vec![vec![0], vec![1]]);
        assert_eq!(induced_load(&g, &one_each).unwrap(), vec![int(1), int(1)]);
    }

    #[test]
    fn load_rejects_bad_paths() {
        let g = diamond(int(1));
        let broken = UnsplittablePathFlow::new(vec![vec![0, 3]]);
        assert!(matches!(
            induced_load(&g, &broken),
            Err(ModelError::InvalidPath { terminal: 0, .. })
        ));
        let short = UnsplittablePathFlow::new(vec![vec![0]]);
        assert!(induced_load(&g, &short).is_err());
        let unknown = UnsplittablePathFlow::new(vec![vec![9]]);
        assert!(induced_load(&g, &unknown).is_err());
    }

    #[test]
    fn membership_of_parallel_arc_points() {
        let g = parallel_arcs(0, 1);
        assert!(is_in_polytope(&g, &[int(1), int(1)]));
        assert!(is_in_polytope(&g, &[int(2), int(0)]));
        let report = check_membership(&g, &[int(1), int(0)]);
        assert!(!report.is_member());
        assert!(report.violations.contains(&Violation::Conservation {
            node: 0,
            expected: int(2),
            found: int(1),
        }));
        assert!(!is_in_polytope(&g, &[int(3), int(-1)]));
    }

    #[test]
    fn cycle_elimination_on_overlaid_two_cycle() {
        // s -> a -> t plus a <-> b carrying one unit of circulation.
        let g = WeightedSsufNetwork::new(
            vec!["s".into(), "a".into(), "t".into(), "b".into()],
            vec![
                Arc {
                    tail: 0,
                    head: 1,
                    cost: int(0),
                },
                Arc {
                    tail: 1,
                    head: 2,
                    cost: int(0),
                },
                Arc {
                    tail: 1,
                    head: 3,
                    cost: int(0),
                },
                Arc {
                    tail: 3,
                    head: 1,
                    cost: int(0),
                },
            ],
            0,
            vec![Terminal {
                node: 2,
                demand: int(2),
            }],
        )
        .unwrap();
        let x = flow(&[int(2), int(2), int(1), int(1)]);
        assert!(is_in_polytope(&g, x.values()));
        let cleaned = eliminate_cycle_flow(&g, &x);
        assert_eq!(cleaned.values(), &[int(2), int(2), int(0), int(0)]);
        assert!(is_in_polytope(&g, cleaned.values()));
        assert!(g.is_acyclic_on(&cleaned.support()));
    }

    #[test]
    fn cycle_elimination_fixed_points() {
        let g = diamond(int(1));
        let x = flow(&[ratio(1, 2), ratio(1, 2), ratio(1, 2), ratio(1, 2)]);
        assert_eq!(eliminate_cycle_flow(&g, &x), x);
        let empty = WeightedSsufNetwork::new(
            vec!["s".into(), "a".into()],
            vec![
                Arc {
                    tail: 0,
                    head: 1,
                    cost: int(1),
                },
                Arc {
                    tail: 1,
                    head: 0,
                    cost: int(1),
                },
            ],
            0,
            vec![],
        )
        .unwrap();
        let zero = FractionalFlow::zero(2);
        assert_eq!(eliminate_cycle_flow(&empty, &zero), zero);
    }

    #[test]
    fn support_restriction() {
        let g = parallel_arcs(0, 1);
        let sub = support_subnetwork(&g, &flow(&[int(2), int(0)]));
        assert_eq!(sub.arc_map, vec![0]);
        assert_eq!(sub.network.arc_count(), 1);
        let full = support_subnetwork(&g, &flow(&[int(1), int(1)]));
        assert_eq!(full.network, g);
        let sub_values = sub.restrict(&[int(2), int(0)]);
        assert_eq!(sub.embed(&sub_values, 2), vec![int(2), int(0)]);

        let no_demand = WeightedSsufNetwork::new(
            vec!["s".into(), "t".into()],
            vec![Arc {
                tail: 0,
                head: 1,
                cost: int(1),
            }],
            0,
            vec![],
        )
        .unwrap();
        let arcless = support_subnetwork(&no_demand, &FractionalFlow::zero(1));
        assert_eq!(arcless.network.arc_count(), 0);
    }

    #[test]
    fn path_enumeration_is_lexicographic() {
        let g = diamond(int(1));
        let (paths, truncated) = g.simple_paths(3, &[true; 4], 10);
        assert!(!truncated);
        assert_eq!(paths, vec![vec![0, 1], vec![2, 3]]);
        let (capped, truncated) = g.simple_paths(3, &[true; 4], 1);
        assert!(truncated);
        assert_eq!(capped.len(), 1);
    }

    #[test]
    fn terminal_validation() {
        let err = WeightedSsufNetwork::new(
            vec!["s".into()],
            vec![],
            0,
            vec![Terminal {
                node: 0,
                demand: int(1),
            }],
        );
        assert!(matches!(err, Err(ModelError::TerminalAtSource(0))));
        let err = WeightedSsufNetwork::new(
            vec!["s".into(), "t".into()],
            vec![],
            0,
            vec![Terminal {
                node: 1,
                demand: int(-1),
            }],
        );
        assert!(matches!(err, Err(ModelError::NegativeDemand(0))));
    }
}
