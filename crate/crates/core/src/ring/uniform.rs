//! Reduction from arbitrary edge capacities to a uniform capacity.
//!
//! Every edge below the largest capacity `u_unif` is subdivided by a new
//! vertex, and `2 r_e` artificial commodities of demand
//! `(u_unif − u(e)) / r_e ≤ d_max` are added across the two halves, half of
//! them spanning each half. Whichever way they are routed, one half carries
//! at least `u_unif − u(e)` of artificial demand, so a uniform solution's
//! violation bounds the violation of the original solution left after
//! removing the artificials.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::RingError;
use crate::model::{Commodity, PathChoice, RingEdge, RingInstance, RingUnsplittableSolution};
use crate::rational::{ceil, max_of, serde_rational, serde_rational_vec, Rational};

/// Upper limit on artificial commodities per subdivided edge.
pub const MAX_ARTIFICIALS_PER_EDGE: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subdivision {
    /// Original edge.
    pub edge: usize,
    pub r: usize,
    #[serde(with = "serde_rational")]
    pub demand: Rational,
    /// Uniform edges `e₁` and `e₂`.
    pub first: usize,
    pub second: usize,
    /// Uniform commodity indices spanning `e₁`, then those spanning `e₂`.
    pub across_first: Vec<usize>,
    pub across_second: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformReduction {
    instance: RingInstance,
    original: RingInstance,
    u_unif: Rational,
    d_max: Rational,
    /// Original edge → its uniform edges (one, or two if subdivided).
    pieces: Vec<Vec<usize>>,
    subdivisions: Vec<Subdivision>,
}

impl UniformReduction {
    pub fn instance(&self) -> &RingInstance {
        &self.instance
    }

    pub fn original(&self) -> &RingInstance {
        &self.original
    }

    pub fn uniform_capacity(&self) -> &Rational {
        &self.u_unif
    }

    pub fn d_max(&self) -> &Rational {
        &self.d_max
    }

    pub fn pieces(&self, edge: usize) -> &[usize] {
        &self.pieces[edge]
    }

    pub fn subdivisions(&self) -> &[Subdivision] {
        &self.subdivisions
    }

    /// Embeds an original solution with every artificial commodity on its
    /// single-edge path.
    pub fn embed(&self, choices: &[PathChoice]) -> RingUnsplittableSolution {
        let mut all = choices.to_vec();
        all.resize(self.instance.commodities().len(), PathChoice::First);
        RingUnsplittableSolution::new(all)
    }
}

/// Builds the uniform-capacity instance. Original commodities keep their
/// indices; artificial ones follow.
pub fn nonuniform_to_uniform(ring: &RingInstance) -> Result<UniformReduction, RingError> {
    let caps = ring.capacities().ok_or(RingError::MissingCapacities)?;
    let u_unif = max_of(&caps);
    let d_max = ring.max_demand();
    let n = ring.node_count();

    let mut node_index = Vec::with_capacity(n);
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut pieces = Vec::with_capacity(n);
    // (original edge, r, demand, new node) for subdivided edges.
    let mut splits = Vec::new();
    for (e, edge) in ring.edges().iter().enumerate() {
        node_index.push(nodes.len());
        nodes.push(ring.nodes()[e].clone());
        let gap = &u_unif - &caps[e];
        if gap.is_positive() {
            if d_max.is_zero() {
                return Err(RingError::ZeroDmax);
            }
            let r = ceil(&(&gap / &d_max))
                .to_usize()
                .filter(|&r| r <= MAX_ARTIFICIALS_PER_EDGE)
                .ok_or(RingError::TooManyArtificials(e))?;
            let demand = gap / Rational::from_integer(r.into());
            let mid = nodes.len();
            nodes.push(format!("{}~{}", ring.nodes()[e], e));
            let first = edges.len();
            edges.push(RingEdge {
                cost: edge.cost.clone(),
                capacity: Some(u_unif.clone()),
            });
            edges.push(RingEdge {
                cost: Rational::zero(),
                capacity: Some(u_unif.clone()),
            });
            pieces.push(vec![first, first + 1]);
            splits.push((e, r, demand, mid, first));
        } else {
            pieces.push(vec![edges.len()]);
            edges.push(RingEdge {
                cost: edge.cost.clone(),
                capacity: Some(u_unif.clone()),
            });
        }
    }
    let mut commodities: Vec<Commodity> = ring
        .commodities()
        .iter()
        .map(|c| Commodity {
            source: node_index[c.source],
            sink: node_index[c.sink],
            demand: c.demand.clone(),
        })
        .collect();
    let mut subdivisions = Vec::with_capacity(splits.len());
    for (e, r, demand, mid, first) in splits {
        let v = node_index[e];
        let w = node_index[(e + 1) % n];
        let mut across_first = Vec::with_capacity(r);
        let mut across_second = Vec::with_capacity(r);
        for _ in 0..r {
            across_first.push(commodities.len());
            commodities.push(Commodity {
                source: v,
                sink: mid,
                demand: demand.clone(),
            });
        }
        for _ in 0..r {
            across_second.push(commodities.len());
            commodities.push(Commodity {
                source: mid,
                sink: w,
                demand: demand.clone(),
            });
        }
        subdivisions.push(Subdivision {
            edge: e,
            r,
            demand,
            first,
            second: first + 1,
            across_first,
            across_second,
        });
    }
    let instance = RingInstance::new(nodes, edges, commodities)?;
    Ok(UniformReduction {
        instance,
        original: ring.clone(),
        u_unif,
        d_max,
        pieces,
        subdivisions,
    })
}

/// Per-edge comparison of violations before and after removing artificials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripReport {
    pub solution: RingUnsplittableSolution,
    /// Loads of the stripped solution on the original edges.
    #[serde(with = "serde_rational_vec")]
    pub loads: Vec<Rational>,
    /// `max(0, load_e − u(e))` in the original instance.
    #[serde(with = "serde_rational_vec")]
    pub original_violation: Vec<Rational>,
    /// Largest `max(0, load − u_unif)` over the uniform pieces of each edge.
    #[serde(with = "serde_rational_vec")]
    pub uniform_violation: Vec<Rational>,
    pub holds: bool,
}

fn violation(load: &Rational, capacity: &Rational) -> Rational {
    let v = load - capacity;
    if v.is_positive() {
        v
    } else {
        Rational::zero()
    }
}

/// Drops the artificial commodities and checks, edge by edge, that the
/// violation did not grow.
pub fn strip_artificials(
    reduction: &UniformReduction,
    uniform: &RingUnsplittableSolution,
) -> Result<StripReport, RingError> {
    let k = reduction.original.commodities().len();
    let total = reduction.instance.commodities().len();
    if uniform.choices().len() != total {
        return Err(RingError::Model(crate::model::ModelError::DimensionMismatch {
            expected: total,
            found: uniform.choices().len(),
        }));
    }
    let solution = RingUnsplittableSolution::new(uniform.choices()[..k].to_vec());
    let loads = solution.loads(&reduction.original)?;
    let uniform_loads = uniform.loads(&reduction.instance)?;
    let caps = reduction.original.capacities().ok_or(RingError::MissingCapacities)?;
    let original_violation: Vec<Rational> = loads.iter().zip(&caps).map(|(l, u)| violation(l, u)).collect();
    let uniform_violation: Vec<Rational> = reduction
        .pieces
        .iter()
        .map(|p| {
            max_of(
                p.iter()
                    .map(|&u| violation(&uniform_loads[u], &reduction.u_unif))
                    .collect::<Vec<_>>()
                    .iter(),
            )
        })
        .collect();
    let holds = original_violation.iter().zip(&uniform_violation).all(|(o, u)| o <= u);
    Ok(StripReport {
        solution,
        loads,
        original_violation,
        uniform_violation,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ring_fixtures::named;
    use crate::rational::{int, ratio};

    fn capacitated(caps: &[Rational], commodities: &[(usize, usize, Rational)]) -> RingInstance {
        RingInstance::new(
            named(caps.len()),
            caps.iter()
                .map(|u| RingEdge {
                    cost: int(1),
                    capacity: Some(u.clone()),
                })
                .collect(),
            commodities
                .iter()
                .map(|(s, t, d)| Commodity {
                    source: *s,
                    sink: *t,
                    demand: d.clone(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn counts_and_demands() {
        let r = capacitated(&[int(10), int(4), int(10)], &[(0, 1, int(2))]);
        let red = nonuniform_to_uniform(&r).unwrap();
        let s = &red.subdivisions()[0];
        assert_eq!(s.r, 3);
        assert_eq!(s.demand, int(2));
        assert_eq!(s.across_first.len() + s.across_second.len(), 6);
        assert_eq!(red.instance().node_count(), 4);
    }

    #[test]
    fn small_gap() {
        let r = capacitated(&[int(10), ratio(19, 2), int(10)], &[(0, 1, int(2))]);
        let red = nonuniform_to_uniform(&r).unwrap();
        let s = &red.subdivisions()[0];
        assert_eq!(s.r, 1);
        assert_eq!(s.demand, ratio(1, 2));
    }

    #[test]
    fn uniform_is_identity() {
        let r = capacitated(&[int(3), int(3), int(3)], &[(0, 2, int(1))]);
        let red = nonuniform_to_uniform(&r).unwrap();
        assert!(red.subdivisions().is_empty());
        assert_eq!(red.instance().commodities(), r.commodities());
        assert_eq!(red.instance().node_count(), 3);
    }

    #[test]
    fn zero_dmax() {
        let r = capacitated(&[int(3), int(1), int(3)], &[(0, 2, int(0))]);
        assert!(matches!(nonuniform_to_uniform(&r), Err(RingError::ZeroDmax)));
    }

    #[test]
    fn embedding_preserves_violation() {
        let r = capacitated(&[int(5), int(2), int(4), int(5)], &[(0, 2, int(3)), (1, 3, int(2))]);
        let red = nonuniform_to_uniform(&r).unwrap();
        for choices in [
            vec![PathChoice::First, PathChoice::First],
            vec![PathChoice::Second, PathChoice::First],
        ] {
            let report = strip_artificials(&red, &red.embed(&choices)).unwrap();
            assert_eq!(report.solution.choices(), choices.as_slice());
            assert_eq!(report.original_violation, report.uniform_violation);
        }
    }

    #[test]
    fn adversarial_artificial_routing() {
        let r = capacitated(&[int(5), int(1), int(5)], &[(0, 2, int(2))]);
        let red = nonuniform_to_uniform(&r).unwrap();
        let s = red.subdivisions()[0].clone();
        assert_eq!(s.r, 2);
        let mut choices = vec![PathChoice::First; red.instance().commodities().len()];
        // Half of each group the long way round.
        choices[s.across_first[0]] = PathChoice::Second;
        choices[s.across_second[1]] = PathChoice::Second;
        let report = strip_artificials(&red, &RingUnsplittableSolution::new(choices)).unwrap();
        assert!(report.holds);
    }
}
