//! The restricted problem `min { cᵀy : y ∈ Q ∩ (x − λR) }` for box bodies.
//!
//! `y ∈ x − λR` means `x − y ∈ λR`, so per coordinate
//! `x − λ·upper ≤ y ≤ x − λ·lower`.

use num_traits::{One, Signed, Zero};

use super::lp::{LinearProgram, Optimum, Relation};
use super::mcf::{min_cost_flow_bounded, ArcBounds};
use super::{simplex, LpStatus, SolverError};
use crate::model::{
    BoxErrorBody, FractionalFlow, ModelError, RingFractionalSolution, RingInstance, WeightedSsufNetwork,
};
use crate::rational::{Lambda, Rational};

fn check_dim(expected: usize, found: usize) -> Result<(), SolverError> {
    if expected != found {
        return Err(ModelError::DimensionMismatch { expected, found }.into());
    }
    Ok(())
}

/// Per-arc bounds of `{y ≥ 0} ∩ (x − λR)`.
pub fn restricted_bounds(x: &[Rational], body: &BoxErrorBody, lambda: &Lambda) -> Result<ArcBounds, SolverError> {
    check_dim(x.len(), body.dim())?;
    let l = lambda.value();
    let lower = x
        .iter()
        .zip(body.upper())
        .map(|(v, hi)| {
            let b = v - l * hi;
            if b.is_negative() {
                Rational::zero()
            } else {
                b
            }
        })
        .collect();
    let upper = x.iter().zip(body.lower()).map(|(v, lo)| v - l * lo).collect();
    ArcBounds::new(lower, upper)
}

/// Optimal `y*` over the flow polytope within `x − λR`.
pub fn restricted_min_cost_ssuf(
    network: &WeightedSsufNetwork,
    x: &FractionalFlow,
    body: &BoxErrorBody,
    lambda: &Lambda,
) -> Result<Optimum<FractionalFlow>, SolverError> {
    check_dim(network.arc_count(), x.values().len())?;
    let bounds = restricted_bounds(x.values(), body, lambda)?;
    min_cost_flow_bounded(network, &bounds)
}

/// The flow polytope within `bounds` as an explicit LP (one variable per arc).
pub fn ssuf_lp(network: &WeightedSsufNetwork, bounds: &ArcBounds) -> LinearProgram {
    let mut lp = LinearProgram::new(network.costs(), bounds.lower().to_vec(), bounds.upper().to_vec());
    for (node, supply) in network.supplies().into_iter().enumerate() {
        let row = network
            .arcs()
            .iter()
            .map(|a| {
                if a.tail == node && a.head != node {
                    Rational::one()
                } else if a.head == node && a.tail != node {
                    -Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        lp.add_row(row, Relation::Eq, supply);
    }
    lp
}

/// Ring loads as an affine function of the splits: `load = base + Σ λ_i · slope_i`.
fn load_model(ring: &RingInstance) -> (Vec<Rational>, Vec<Vec<Rational>>) {
    let m = ring.edge_count();
    let mut base = vec![Rational::zero(); m];
    let mut slopes = Vec::with_capacity(ring.commodities().len());
    for (i, c) in ring.commodities().iter().enumerate() {
        let mut slope = vec![Rational::zero(); m];
        for e in 0..m {
            if ring.on_first_path(i, e) {
                slope[e] = c.demand.clone();
            } else {
                base[e] += &c.demand;
                slope[e] = -c.demand.clone();
            }
        }
        slopes.push(slope);
    }
    (base, slopes)
}

/// Splits `λ_i ∈ [0, 1]` with `x̄_e − λ·upper_e ≤ load_e ≤ x̄_e − λ·lower_e`.
/// The objective omits the constant `cᵀbase`; see [`ring_restricted_min_cost`].
pub fn ring_lp(
    ring: &RingInstance,
    x_bar: &RingFractionalSolution,
    body: &BoxErrorBody,
    lambda: &Lambda,
) -> Result<LinearProgram, SolverError> {
    check_dim(ring.edge_count(), body.dim())?;
    let reference = x_bar.loads(ring)?;
    let (base, slopes) = load_model(ring);
    let costs = ring.costs();
    let k = ring.commodities().len();
    let objective = slopes
        .iter()
        .map(|s| s.iter().zip(&costs).map(|(a, c)| a * c).sum())
        .collect();
    let mut lp = LinearProgram::new(objective, vec![Rational::zero(); k], vec![Rational::one(); k]);
    let l = lambda.value();
    for e in 0..ring.edge_count() {
        let row: Vec<Rational> = slopes.iter().map(|s| s[e].clone()).collect();
        if row.iter().all(|a| a.is_zero()) {
            continue;
        }
        let hi = &reference[e] - l * &body.lower()[e] - &base[e];
        let lo = &reference[e] - l * &body.upper()[e] - &base[e];
        lp.add_row(row.clone(), Relation::Le, hi);
        lp.add_row(row, Relation::Ge, lo);
    }
    Ok(lp)
}

/// Optimal splits over the ring polytope within `x̄ − λR`. The objective is
/// the full cost `cᵀload`.
pub fn ring_restricted_min_cost(
    ring: &RingInstance,
    x_bar: &RingFractionalSolution,
    body: &BoxErrorBody,
    lambda: &Lambda,
) -> Result<Optimum<RingFractionalSolution>, SolverError> {
    let lp = ring_lp(ring, x_bar, body, lambda)?;
    let opt = match simplex::solve(&lp)? {
        LpStatus::Optimal(opt) => opt,
        LpStatus::Infeasible => return Err(SolverError::Infeasible),
    };
    let solution = RingFractionalSolution::new(opt.point)?;
    let objective = ring.cost_of(&solution.loads(ring)?);
    Ok(Optimum {
        point: solution,
        objective,
    })
}

/// Constant part of the ring objective omitted by [`ring_lp`].
pub fn ring_objective_offset(ring: &RingInstance) -> Rational {
    let (base, _) = load_model(ring);
    ring.cost_of(&base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::network_fixtures::parallel_arcs;
    use crate::model::ring_fixtures::ring;
    use crate::rational::{int, ratio};
    use crate::solvers::lp_oracle_enumerate;

    fn half() -> Lambda {
        Lambda::new(ratio(1, 2)).unwrap()
    }

    #[test]
    fn ssuf_full_lambda() {
        let g = parallel_arcs(0, 1);
        let x = FractionalFlow::new(vec![int(1), int(1)]);
        let body = BoxErrorBody::symmetric(2, &int(1)).unwrap();
        let opt = restricted_min_cost_ssuf(&g, &x, &body, &Lambda::one()).unwrap();
        assert_eq!(opt.point.values(), &[int(2), int(0)]);
    }

    #[test]
    fn ssuf_half_lambda() {
        let g = parallel_arcs(0, 1);
        let x = FractionalFlow::new(vec![int(1), int(1)]);
        let body = BoxErrorBody::symmetric(2, &int(1)).unwrap();
        let opt = restricted_min_cost_ssuf(&g, &x, &body, &half()).unwrap();
        assert_eq!(opt.point.values(), &[ratio(3, 2), ratio(1, 2)]);
        assert_eq!(opt.objective, ratio(1, 2));
    }

    #[test]
    fn ssuf_zero_costs_keep_objective_zero() {
        let g = parallel_arcs(0, 0);
        let x = FractionalFlow::new(vec![ratio(1, 3), ratio(5, 3)]);
        let body = BoxErrorBody::symmetric(2, &int(1)).unwrap();
        let opt = restricted_min_cost_ssuf(&g, &x, &body, &Lambda::one()).unwrap();
        assert_eq!(opt.objective, int(0));
        assert!(crate::model::is_in_polytope(&g, opt.point.values()));
    }

    #[test]
    fn asymmetric_body_orientation() {
        // R = [0, 1]²: y ∈ x − R means x − 1 ≤ y ≤ x.
        let body = BoxErrorBody::new(vec![int(0), int(0)], vec![int(1), int(1)]).unwrap();
        let b = restricted_bounds(&[int(1), int(1)], &body, &Lambda::one()).unwrap();
        assert_eq!(b.lower(), &[int(0), int(0)]);
        assert_eq!(b.upper(), &[int(1), int(1)]);
    }

    #[test]
    fn ssuf_lp_matches_flow_solver() {
        let g = parallel_arcs(2, 5);
        let x = FractionalFlow::new(vec![ratio(2, 3), ratio(4, 3)]);
        let body = BoxErrorBody::symmetric(2, &ratio(1, 2)).unwrap();
        let bounds = restricted_bounds(x.values(), &body, &Lambda::one()).unwrap();
        let flow = min_cost_flow_bounded(&g, &bounds).unwrap();
        let oracle = lp_oracle_enumerate(&ssuf_lp(&g, &bounds)).unwrap();
        assert_eq!(oracle.objective(), Some(&flow.objective));
    }

    #[test]
    fn ring_uniform_costs_give_constant_objective() {
        // 4-cycle, commodity 0 -> 2, both paths have two edges.
        let r = ring(&[1, 1, 1, 1], &[(0, 2, int(2))]);
        let x_bar = RingFractionalSolution::new(vec![ratio(1, 2)]).unwrap();
        let body = BoxErrorBody::symmetric(4, &int(2)).unwrap();
        let opt = ring_restricted_min_cost(&r, &x_bar, &body, &Lambda::one()).unwrap();
        assert_eq!(opt.objective, int(4));
    }

    #[test]
    fn ring_zero_costs() {
        let r = ring(&[0, 0, 0, 0], &[(0, 2, int(1)), (1, 3, int(2))]);
        let x_bar = RingFractionalSolution::new(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        let body = BoxErrorBody::symmetric(4, &int(2)).unwrap();
        let opt = ring_restricted_min_cost(&r, &x_bar, &body, &Lambda::one()).unwrap();
        assert_eq!(opt.objective, int(0));
    }

    #[test]
    fn ring_matches_oracle() {
        let r = ring(&[3, 1, 4, 1], &[(0, 2, int(1)), (1, 3, int(1))]);
        let x_bar = RingFractionalSolution::new(vec![ratio(1, 2), ratio(1, 3)]).unwrap();
        let body = BoxErrorBody::symmetric(4, &ratio(1, 2)).unwrap();
        let opt = ring_restricted_min_cost(&r, &x_bar, &body, &Lambda::one()).unwrap();
        let lp = ring_lp(&r, &x_bar, &body, &Lambda::one()).unwrap();
        let oracle = lp_oracle_enumerate(&lp).unwrap().into_optimum().unwrap();
        assert_eq!(oracle.objective + ring_objective_offset(&r), opt.objective);
    }
}
