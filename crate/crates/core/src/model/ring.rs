//! Ring loading instances: an undirected cycle with source-sink commodities,
//! each routed clockwise (`P¹`) or counter-clockwise (`P²`).

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::rational::{dot, max_of, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingEdge {
    pub cost: Rational,
    pub capacity: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commodity {
    pub source: usize,
    pub sink: usize,
    pub demand: Rational,
}

/// Cycle `v_0 .. v_{n-1}`; edge `i` joins `v_i` and `v_{i+1 mod n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingInstance {
    nodes: Vec<String>,
    edges: Vec<RingEdge>,
    commodities: Vec<Commodity>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum PathChoice {
    /// Clockwise from source to sink.
    First,
    /// Counter-clockwise from source to sink.
    Second,
}

impl PathChoice {
    pub fn other(self) -> PathChoice {
        match self {
            PathChoice::First => PathChoice::Second,
            PathChoice::Second => PathChoice::First,
        }
    }

    /// The split value (fraction on `P¹`) of routing wholly on this path.
    pub fn as_split(self) -> Rational {
        match self {
            PathChoice::First => Rational::one(),
            PathChoice::Second => Rational::zero(),
        }
    }
}

impl From<PathChoice> for u8 {
    fn from(c: PathChoice) -> u8 {
        match c {
            PathChoice::First => 1,
            PathChoice::Second => 2,
        }
    }
}

impl TryFrom<u8> for PathChoice {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(PathChoice::First),
            2 => Ok(PathChoice::Second),
            other => Err(format!("path choice must be 1 or 2, got {other}")),
        }
    }
}

impl RingInstance {
    pub fn new(nodes: Vec<String>, edges: Vec<RingEdge>, commodities: Vec<Commodity>) -> Result<Self, ModelError> {
        let n = nodes.len();
        if n < 2 {
            return Err(ModelError::RingTooSmall(n));
        }
        if edges.len() != n {
            return Err(ModelError::DimensionMismatch {
                expected: n,
                found: edges.len(),
            });
        }
        for (index, c) in commodities.iter().enumerate() {
            if c.source >= n {
                return Err(ModelError::UnknownNode(c.source));
            }
            if c.sink >= n {
                return Err(ModelError::UnknownNode(c.sink));
            }
            if c.source == c.sink {
                return Err(ModelError::DegenerateCommodity(index));
            }
            if c.demand.is_negative() {
                return Err(ModelError::NegativeDemand(index));
            }
        }
        for (index, e) in edges.iter().enumerate() {
            if let Some(u) = &e.capacity {
                if u.is_negative() {
                    return Err(ModelError::NegativeCapacity(index));
                }
            }
        }
        Ok(RingInstance {
            nodes,
            edges,
            commodities,
        })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[RingEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn commodities(&self) -> &[Commodity] {
        &self.commodities
    }

    pub fn costs(&self) -> Vec<Rational> {
        self.edges.iter().map(|e| e.cost.clone()).collect()
    }

    pub fn capacities(&self) -> Option<Vec<Rational>> {
        self.edges.iter().map(|e| e.capacity.clone()).collect()
    }

    pub fn max_demand(&self) -> Rational {
        max_of(self.commodities.iter().map(|c| &c.demand))
    }

    pub fn total_demand(&self) -> Rational {
        self.commodities.iter().map(|c| c.demand.clone()).sum()
    }

    pub fn has_nonnegative_costs(&self) -> bool {
        self.edges.iter().all(|e| !e.cost.is_negative())
    }

    pub fn cost_of(&self, loads: &[Rational]) -> Rational {
        dot(&self.costs(), loads)
    }

    /// Clockwise distance from node `a` to node `b`.
    pub fn clockwise_span(&self, a: usize, b: usize) -> usize {
        let n = self.nodes.len();
        (b + n - a) % n
    }

    /// Whether edge `e` lies on the clockwise path of commodity `i`.
    pub fn on_first_path(&self, i: usize, e: usize) -> bool {
        let c = &self.commodities[i];
        self.clockwise_span(c.source, e) < self.clockwise_span(c.source, c.sink)
    }

    pub fn on_path(&self, i: usize, choice: PathChoice, e: usize) -> bool {
        self.on_first_path(i, e) == (choice == PathChoice::First)
    }

    pub fn path_edges(&self, i: usize, choice: PathChoice) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.on_path(i, choice, e)).collect()
    }

    /// Loads `x_e = sum λ_i d_i [e ∈ P¹_i] + sum (1-λ_i) d_i [e ∈ P²_i]`.
    pub fn split_loads(&self, splits: &[Rational]) -> Result<Vec<Rational>, ModelError> {
        if splits.len() != self.commodities.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.commodities.len(),
                found: splits.len(),
            });
        }
        let mut load = vec![Rational::zero(); self.edges.len()];
        for (i, (c, split)) in self.commodities.iter().zip(splits).enumerate() {
            let first = split * &c.demand;
            let second = (Rational::one() - split) * &c.demand;
            for (e, slot) in load.iter_mut().enumerate() {
                if self.on_first_path(i, e) {
                    *slot += &first;
                } else {
                    *slot += &second;
                }
            }
        }
        Ok(load)
    }

    pub fn choice_loads(&self, choices: &[PathChoice]) -> Result<Vec<Rational>, ModelError> {
        let splits: Vec<Rational> = choices.iter().map(|c| c.as_split()).collect();
        self.split_loads(&splits)
    }

    pub fn with_commodities(&self, commodities: Vec<Commodity>) -> Result<RingInstance, ModelError> {
        RingInstance::new(self.nodes.clone(), self.edges.clone(), commodities)
    }
}

/// Fraction `λ_i ∈ [0, 1]` of each commodity routed on its clockwise path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingFractionalSolution {
    splits: Vec<Rational>,
}

impl RingFractionalSolution {
    pub fn new(splits: Vec<Rational>) -> Result<Self, ModelError> {
        for (index, s) in splits.iter().enumerate() {
            if s.is_negative() || *s > Rational::one() {
                return Err(ModelError::SplitOutOfRange(index));
            }
        }
        Ok(RingFractionalSolution { splits })
    }

    pub fn splits(&self) -> &[Rational] {
        &self.splits
    }

    pub fn loads(&self, ring: &RingInstance) -> Result<Vec<Rational>, ModelError> {
        ring.split_loads(&self.splits)
    }

    /// The path a commodity is wholly routed on, if it is not split.
    pub fn unsplit_choice(&self, i: usize) -> Option<PathChoice> {
        let s = &self.splits[i];
        if s.is_one() {
            Some(PathChoice::First)
        } else if s.is_zero() {
            Some(PathChoice::Second)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RingUnsplittableSolution {
    choices: Vec<PathChoice>,
}

impl RingUnsplittableSolution {
    pub fn new(choices: Vec<PathChoice>) -> Self {
        RingUnsplittableSolution { choices }
    }

    pub fn choices(&self) -> &[PathChoice] {
        &self.choices
    }

    pub fn loads(&self, ring: &RingInstance) -> Result<Vec<Rational>, ModelError> {
        ring.choice_loads(&self.choices)
    }

    pub fn as_fractional(&self) -> RingFractionalSolution {
        RingFractionalSolution {
            splits: self.choices.iter().map(|c| c.as_split()).collect(),
        }
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn single_commodity_loads() {
        let r = ring(&[1, 1, 1, 1, 1], &[(1, 3, int(5))]);
        let loads = r.choice_loads(&[PathChoice::First]).unwrap();
        assert_eq!(loads, vec![int(0), int(5), int(5), int(0), int(0)]);
        assert_eq!(r.path_edges(0, PathChoice::First), vec![1, 2]);
        assert_eq!(r.path_edges(0, PathChoice::Second), vec![0, 3, 4]);
    }

    #[test]
    fn wrapping_paths() {
        let r = ring(&[1, 1, 1, 1], &[(3, 1, int(1))]);
        assert_eq!(r.path_edges(0, PathChoice::First), vec![0, 3]);
        assert_eq!(r.path_edges(0, PathChoice::Second), vec![1, 2]);
    }

    #[test]
    fn split_loads_follow_formula() {
        let r = ring(&[1, 1, 1, 1], &[(0, 2, int(2)), (1, 3, int(4))]);
        let loads = r.split_loads(&[ratio(1, 2), ratio(1, 4)]).unwrap();
        // edge 0: 1 (c0 cw) + 3 (c1 ccw); edge 1: 1 + 1; edge 2: 1 + 1; edge 3: 1 + 3.
        assert_eq!(loads, vec![int(4), int(2), int(2), int(4)]);
    }

    #[test]
    fn validation() {
        assert!(matches!(
            RingInstance::new(
                named(1),
                vec![RingEdge {
                    cost: int(0),
                    capacity: None
                }],
                vec![]
            ),
            Err(ModelError::RingTooSmall(1))
        ));
        let edges = vec![
            RingEdge {
                cost: int(0),
                capacity: None
            };
            3
        ];
        assert!(matches!(
            RingInstance::new(
                named(3),
                edges.clone(),
                vec![Commodity {
                    source: 1,
                    sink: 1,
                    demand: int(1)
                }]
            ),
            Err(ModelError::DegenerateCommodity(0))
        ));
        assert!(RingFractionalSolution::new(vec![ratio(3, 2)]).is_err());
        assert!(RingFractionalSolution::new(vec![ratio(-1, 2)]).is_err());
    }

    #[test]
    fn choice_serde_uses_one_and_two() {
        let json = serde_json::to_string(&vec![PathChoice::First, PathChoice::Second]).unwrap();
        assert_eq!(json, "[1,2]");
        let back: Vec<PathChoice> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![PathChoice::First, PathChoice::Second]);
        assert!(serde_json::from_str::<PathChoice>("3").is_err());
    }
}
