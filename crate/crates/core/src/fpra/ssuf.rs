use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{fallback_path, flow_decomposition, FpraError, SsufFpra};
use crate::model::{
    difference, support_subnetwork, ArcId, BoxErrorBody, FractionalFlow, ModelError, UnsplittablePathFlow,
    WeightedSsufNetwork,
};
use crate::rational::{serde_rational_vec, Rational};

/// Exhaustive FPRA: tries every assignment of terminals to source-terminal
/// paths inside the support of `x` and keeps the in-body assignment with the
/// smallest scaled L∞ deviation. Ties go to the lexicographically smallest
/// tuple of path indices, paths being ordered by their arc-id sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceSsuf {
    pub max_paths_per_terminal: usize,
    pub max_assignments: u128,
}

impl Default for BruteForceSsuf {
    fn default() -> Self {
        BruteForceSsuf {
            max_paths_per_terminal: 512,
            max_assignments: 1 << 22,
        }
    }
}

/// Evidence that no path assignment within the support fits the body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsufCounterexample {
    #[serde(with = "serde_rational_vec")]
    pub x: Vec<Rational>,
    pub body: BoxErrorBody,
    /// Candidate paths per terminal (original arc ids); empty for zero-demand terminals.
    pub candidates: Vec<Vec<Vec<ArcId>>>,
    pub assignments_checked: u128,
}

fn check_body(network: &WeightedSsufNetwork, x: &FractionalFlow, body: &BoxErrorBody) -> Result<(), FpraError> {
    for found in [x.values().len(), body.dim()] {
        if found != network.arc_count() {
            return Err(ModelError::DimensionMismatch {
                expected: network.arc_count(),
                found,
            }
            .into());
        }
    }
    Ok(())
}

impl BruteForceSsuf {
    /// Runs the search and returns the chosen assignment, or a counterexample.
    pub fn search(
        &self,
        network: &WeightedSsufNetwork,
        x: &FractionalFlow,
        body: &BoxErrorBody,
    ) -> Result<UnsplittablePathFlow, FpraError> {
        check_body(network, x, body)?;
        let support = x.support();
        if let Some(cycle) = network.find_cycle(&support) {
            return Err(FpraError::CyclicSupport(cycle));
        }
        let restricted = support_subnetwork(network, x);
        let sub = &restricted.network;
        let sub_mask = vec![true; sub.arc_count()];

        let terminals = network.terminals();
        let mut candidates: Vec<Vec<Vec<ArcId>>> = Vec::with_capacity(terminals.len());
        let mut fixed: Vec<Option<Vec<ArcId>>> = Vec::with_capacity(terminals.len());
        let mut total: u128 = 1;
        for (index, terminal) in terminals.iter().enumerate() {
            if terminal.demand.is_zero() {
                candidates.push(Vec::new());
                fixed.push(Some(fallback_path(network, index, &support)?));
                continue;
            }
            let (paths, truncated) = sub.simple_paths(terminal.node, &sub_mask, self.max_paths_per_terminal);
            if truncated {
                return Err(FpraError::TooLarge {
                    size: self.max_paths_per_terminal as u128 + 1,
                    cap: self.max_paths_per_terminal as u128,
                });
            }
            if paths.is_empty() {
                return Err(FpraError::NoPath(index));
            }
            total = total.saturating_mul(paths.len() as u128);
            let lifted = paths
                .into_iter()
                .map(|p| p.into_iter().map(|a| restricted.arc_map[a]).collect())
                .collect();
            candidates.push(lifted);
            fixed.push(None);
        }
        if total > self.max_assignments {
            return Err(FpraError::TooLarge {
                size: total,
                cap: self.max_assignments,
            });
        }

        let active: Vec<usize> = (0..terminals.len()).filter(|&t| fixed[t].is_none()).collect();
        let mut index = vec![0usize; active.len()];
        let mut best: Option<(Rational, Vec<usize>)> = None;
        let mut checked: u128 = 0;
        loop {
            checked += 1;
            let mut load = vec![Rational::zero(); network.arc_count()];
            for (slot, &t) in active.iter().enumerate() {
                for &a in &candidates[t][index[slot]] {
                    load[a] += &terminals[t].demand;
                }
            }
            if let Some(score) = body.scaled_deviation(&difference(&load, x.values())) {
                if best.as_ref().is_none_or(|(s, _)| score < *s) {
                    best = Some((score, index.clone()));
                }
            }
            // Odometer with the last terminal varying fastest: lexicographic order.
            let mut pos = active.len();
            let advanced = loop {
                if pos == 0 {
                    break false;
                }
                pos -= 1;
                index[pos] += 1;
                if index[pos] < candidates[active[pos]].len() {
                    break true;
                }
                index[pos] = 0;
            };
            if !advanced {
                break;
            }
        }

        let Some((_, choice)) = best else {
            return Err(FpraError::NoSolutionInBody(Box::new(SsufCounterexample {
                x: x.values().to_vec(),
                body: body.clone(),
                candidates,
                assignments_checked: checked,
            })));
        };
        let mut paths: Vec<Vec<ArcId>> = fixed.into_iter().map(|p| p.unwrap_or_default()).collect();
        for (slot, &t) in active.iter().enumerate() {
            paths[t] = candidates[t][choice[slot]].clone();
        }
        Ok(UnsplittablePathFlow::new(paths))
    }
}

impl SsufFpra for BruteForceSsuf {
    fn name(&self) -> &'static str {
        "brute"
    }

    fn honours_body(&self) -> bool {
        true
    }

    fn round(
        &self,
        network: &WeightedSsufNetwork,
        x: &FractionalFlow,
        body: &BoxErrorBody,
    ) -> Result<UnsplittablePathFlow, FpraError> {
        self.search(network, x, body)
    }
}

/// Assigns each terminal to its heaviest path in a flow decomposition of `x`.
/// Declares no body; the caller reports the realized deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GreedyPathStrip;

impl SsufFpra for GreedyPathStrip {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn honours_body(&self) -> bool {
        false
    }

    fn round(
        &self,
        network: &WeightedSsufNetwork,
        x: &FractionalFlow,
        body: &BoxErrorBody,
    ) -> Result<UnsplittablePathFlow, FpraError> {
        check_body(network, x, body)?;
        let decomposition = flow_decomposition(network, x)?;
        let support = x.support();
        let mut paths = Vec::with_capacity(network.terminals().len());
        for (index, terminal) in network.terminals().iter().enumerate() {
            if terminal.demand.is_zero() {
                paths.push(fallback_path(network, index, &support)?);
                continue;
            }
            let mut best: Option<&super::DecomposedPath> = None;
            for (_, p) in decomposition.for_terminal(index) {
                if best.is_none_or(|b| p.amount > b.amount) {
                    best = Some(p);
                }
            }
            let best = best.ok_or(FpraError::NoPath(index))?;
            paths.push(best.arcs.clone());
        }
        Ok(UnsplittablePathFlow::new(paths))
    }
}

/// Independently re-checks a counterexample: re-enumerates every simple
/// path inside the support with its own search, confirms the candidate
/// lists match, and confirms no assignment fits the body.
pub fn confirm_counterexample(network: &WeightedSsufNetwork, cex: &SsufCounterexample) -> bool {
    let m = network.arc_count();
    if cex.x.len() != m || cex.body.dim() != m || cex.candidates.len() != network.terminals().len() {
        return false;
    }
    if !crate::model::is_in_polytope(network, &cex.x) {
        return false;
    }
    let in_support: Vec<bool> = cex.x.iter().map(|v| v.is_positive()).collect();
    let mut lists = Vec::new();
    for (t, terminal) in network.terminals().iter().enumerate() {
        if terminal.demand.is_zero() {
            if !cex.candidates[t].is_empty() {
                return false;
            }
            lists.push(vec![Vec::new()]);
            continue;
        }
        let mut mine = paths_by_extension(network, terminal.node, &in_support);
        let mut theirs = cex.candidates[t].clone();
        mine.sort();
        theirs.sort();
        if mine != theirs {
            return false;
        }
        lists.push(mine);
    }
    // Every combination must leave the body.
    let mut index = vec![0usize; lists.len()];
    loop {
        let mut load = vec![Rational::zero(); m];
        for (t, list) in lists.iter().enumerate() {
            for &a in &list[index[t]] {
                load[a] += &network.terminals()[t].demand;
            }
        }
        if cex.body.contains(&difference(&load, &cex.x)) {
            return false;
        }
        let mut t = 0;
        while t < lists.len() {
            index[t] += 1;
            if index[t] < lists[t].len() {
                break;
            }
            index[t] = 0;
            t += 1;
        }
        if t == lists.len() {
            return true;
        }
    }
}

/// Breadth-first growth of partial paths from the source; a separate code
/// path from the recursive enumerator used by the search.
fn paths_by_extension(network: &WeightedSsufNetwork, target: usize, mask: &[bool]) -> Vec<Vec<ArcId>> {
    let source = network.source();
    let mut frontier: Vec<(usize, Vec<ArcId>, Vec<usize>)> = vec![(source, Vec::new(), vec![source])];
    let mut done = Vec::new();
    while let Some((at, path, seen)) = frontier.pop() {
        if at == target {
            done.push(path);
            continue;
        }
        for (id, arc) in network.arcs().iter().enumerate() {
            if mask[id] && arc.tail == at && !seen.contains(&arc.head) {
                let mut p = path.clone();
                p.push(id);
                let mut s = seen.clone();
                s.push(arc.head);
                frontier.push((arc.head, p, s));
            }
        }
    }
    done
}
