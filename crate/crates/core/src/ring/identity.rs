//! The opposing-edges identity of canonical instances and the two-sided
//! deviation bound it yields.
//!
//! With canonical edges numbered from `s_1`, edge `j` joins `s_{j+1}` and
//! `s_{j+2}` (reading `s_{k'+1}` as `t_1`) and edge `k' + j` is its opposite
//! between the sinks. Every commodity crosses exactly one edge of each
//! opposite pair whichever way it is routed, so the two loads always add up
//! to the total demand.

use serde::{Deserialize, Serialize};

use super::{CanonicalRingForm, RingError};
use crate::model::{RingFractionalSolution, RingInstance, RingUnsplittableSolution};
use crate::rational::{serde_rational_vec, Rational};

fn canonical(form: &CanonicalRingForm) -> Result<&RingInstance, RingError> {
    form.instance.as_ref().ok_or(RingError::EmptyCanonicalForm)
}

/// `load[j] + load[k' + j] == Σ d` for every `j < k'`.
pub fn opposing_edges_hold(instance: &RingInstance, k_prime: usize, loads: &[Rational]) -> bool {
    if loads.len() != 2 * k_prime {
        return false;
    }
    let total = instance.total_demand();
    (0..k_prime).all(|j| &loads[j] + &loads[k_prime + j] == total)
}

/// Checks the identity on the loads of `solution` (fractional or integral).
pub fn check_opposing_edges(form: &CanonicalRingForm, loads: &[Rational]) -> Result<bool, RingError> {
    let instance = canonical(form)?;
    Ok(opposing_edges_hold(instance, form.k_prime(), loads))
}

pub fn check_opposing_fractional(form: &CanonicalRingForm, x: &RingFractionalSolution) -> Result<bool, RingError> {
    let loads = x.loads(canonical(form)?)?;
    check_opposing_edges(form, &loads)
}

pub fn check_opposing_unsplittable(form: &CanonicalRingForm, z: &RingUnsplittableSolution) -> Result<bool, RingError> {
    let loads = z.loads(canonical(form)?)?;
    check_opposing_edges(form, &loads)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSidedReport {
    #[serde(with = "crate::rational::serde_rational")]
    pub slack: Rational,
    /// `reference_e + slack − load_e`, nonnegative by hypothesis.
    #[serde(with = "serde_rational_vec")]
    pub upper_margins: Vec<Rational>,
    /// `load_e − (reference_e − slack)`, derived from the opposite edge's upper margin.
    #[serde(with = "serde_rational_vec")]
    pub lower_margins: Vec<Rational>,
}

/// From `load ≤ reference + α·d_max` on every canonical edge, derives
/// `load ≥ reference − α·d_max` through the opposing-edges identity.
pub fn two_sided_bound(
    form: &CanonicalRingForm,
    reference: &RingFractionalSolution,
    solution: &RingUnsplittableSolution,
    alpha: &Rational,
) -> Result<TwoSidedReport, RingError> {
    let instance = canonical(form)?;
    let k = form.k_prime();
    let slack = alpha * &form.d_max;
    let reference_loads = reference.loads(instance)?;
    let loads = solution.loads(instance)?;
    let upper_margins: Vec<Rational> = reference_loads
        .iter()
        .zip(&loads)
        .map(|(r, l)| r + &slack - l)
        .collect();
    if let Some(edge) = upper_margins.iter().position(|m| m < &Rational::from_integer(0.into())) {
        return Err(RingError::OneSidedViolated(edge));
    }
    if !opposing_edges_hold(instance, k, &reference_loads) || !opposing_edges_hold(instance, k, &loads) {
        return Err(RingError::OpposingEdgesFailed);
    }
    // load_e = D − load_opp ≥ D − reference_opp − slack = reference_e − slack.
    let lower_margins: Vec<Rational> = (0..2 * k).map(|e| upper_margins[(e + k) % (2 * k)].clone()).collect();
    debug_assert!(lower_margins
        .iter()
        .enumerate()
        .all(|(e, m)| *m == &loads[e] - (&reference_loads[e] - &slack)));
    Ok(TwoSidedReport {
        slack,
        upper_margins,
        lower_margins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ring_fixtures::ring;
    use crate::model::PathChoice;
    use crate::rational::{int, ratio};
    use crate::ring::preprocess;

    fn form(demands: &[Rational], splits: &[Rational]) -> CanonicalRingForm {
        let k = demands.len();
        let list: Vec<_> = demands.iter().enumerate().map(|(i, d)| (i, i + k, d.clone())).collect();
        let r = ring(&vec![1; 2 * k], &list);
        preprocess(&r, &RingFractionalSolution::new(splits.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn clockwise_example() {
        let f = form(&[int(1), int(2)], &[ratio(1, 2), ratio(1, 2)]);
        let inst = f.instance.as_ref().unwrap();
        let z = RingUnsplittableSolution::new(vec![PathChoice::First, PathChoice::First]);
        assert_eq!(z.loads(inst).unwrap(), vec![int(1), int(3), int(2), int(0)]);
        for a in [PathChoice::First, PathChoice::Second] {
            for b in [PathChoice::First, PathChoice::Second] {
                let z = RingUnsplittableSolution::new(vec![a, b]);
                assert!(check_opposing_unsplittable(&f, &z).unwrap());
            }
        }
    }

    #[test]
    fn fractional_and_corrupted() {
        let f = form(&[int(1), int(2)], &[ratio(1, 2), ratio(1, 2)]);
        for s in [ratio(1, 7), ratio(2, 3), ratio(9, 10)] {
            let x = RingFractionalSolution::new(vec![s.clone(), int(1) - &s]).unwrap();
            assert!(check_opposing_fractional(&f, &x).unwrap());
        }
        let mut loads = vec![int(1), int(3), int(2), int(0)];
        loads[2] += ratio(1, 10);
        assert!(!check_opposing_edges(&f, &loads).unwrap());
    }

    #[test]
    fn two_sided_from_one_sided() {
        let f = form(&[int(1), int(2)], &[ratio(1, 2), ratio(1, 2)]);
        let z = RingUnsplittableSolution::new(vec![PathChoice::First, PathChoice::Second]);
        let report = two_sided_bound(&f, &f.x_bar, &z, &ratio(13, 10)).unwrap();
        assert!(report.lower_margins.iter().all(|m| *m >= int(0)));
    }

    #[test]
    fn zero_alpha_on_integral_reference() {
        let f = form(&[int(1), int(2)], &[ratio(1, 2), ratio(1, 2)]);
        let z = RingUnsplittableSolution::new(vec![PathChoice::First, PathChoice::Second]);
        let report = two_sided_bound(&f, &z.as_fractional(), &z, &int(0)).unwrap();
        assert!(report
            .upper_margins
            .iter()
            .chain(&report.lower_margins)
            .all(|m| *m == int(0)));
    }

    #[test]
    fn one_sided_violation() {
        let f = form(&[int(1), int(2)], &[ratio(1, 2), ratio(1, 2)]);
        let z = RingUnsplittableSolution::new(vec![PathChoice::First, PathChoice::First]);
        // Loads (1,3,2,0) against 3/2 everywhere: edge 1 exceeds by 3/2 > 1/2.
        assert!(matches!(
            two_sided_bound(&f, &f.x_bar, &z, &ratio(1, 4)),
            Err(RingError::OneSidedViolated(1))
        ));
    }
}
