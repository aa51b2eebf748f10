use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::certificate::{check_names as names, Check};
use super::{MetaError, Relaxation, SsufRelaxation};
use crate::model::{BoxErrorBody, WeightedSsufNetwork};
use crate::rational::{self, Lambda, Rational};

/// Largest step `ε` keeping `y* + ε(y* − z)` inside the polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Epsilon {
    Finite(Rational),
    /// No constraint binds (`z = y*` on every moving coordinate's side).
    Unbounded,
}

impl Epsilon {
    /// The value used for the proof points; `1` when unbounded.
    pub fn usable(&self) -> Rational {
        match self {
            Epsilon::Finite(e) => e.clone(),
            Epsilon::Unbounded => Rational::one(),
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Epsilon::Finite(e) => f.write_str(&rational::format(e)),
            Epsilon::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl FromStr for Epsilon {
    type Err = rational::RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "unbounded" {
            return Ok(Epsilon::Unbounded);
        }
        rational::parse(s).map(Epsilon::Finite)
    }
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// `ε` for any relaxation with simple native bounds. Fails if `z` leaves
/// a bound that `y*` sits on, i.e. if `z` is off the minimal face of `y*`.
pub fn compute_epsilon_in<R: Relaxation + ?Sized>(
    rel: &R,
    y_star: &[Rational],
    z: &[Rational],
) -> Result<Epsilon, MetaError> {
    let mut best: Option<Rational> = None;
    for (i, (y, zi)) in y_star.iter().zip(z).enumerate() {
        let step = zi - y;
        let limit = if step.is_positive() {
            // ȳ_i = y_i − ε·step must stay above the lower bound.
            Some((y - rel.native_lower(i)) / &step)
        } else if step.is_negative() {
            rel.native_upper(i).map(|hi| (hi - y) / -&step)
        } else {
            None
        };
        if let Some(limit) = limit {
            if !limit.is_positive() {
                return Err(MetaError::FaceViolation { coordinate: i });
            }
            if best.as_ref().is_none_or(|b| limit < *b) {
                best = Some(limit);
            }
        }
    }
    Ok(best.map_or(Epsilon::Unbounded, Epsilon::Finite))
}

/// `ε` on the flow polytope: `min y*(a)/(z(a) − y*(a))` over arcs with `z(a) > y*(a)`.
pub fn compute_epsilon(
    network: &WeightedSsufNetwork,
    y_star: &[Rational],
    z: &[Rational],
) -> Result<Epsilon, MetaError> {
    compute_epsilon_in(&SsufRelaxation(network), y_star, z)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofPoints {
    pub epsilon: Epsilon,
    pub y_bar: Vec<Rational>,
    pub y_hat: Vec<Rational>,
    pub checks: Vec<Check>,
}

fn combine(a: &[Rational], wa: &Rational, b: &[Rational], wb: &Rational) -> Vec<Rational> {
    a.iter().zip(b).map(|(p, q)| wa * p + wb * q).collect()
}

/// Builds `ȳ` and `ŷ` and checks, exactly:
/// (a) `ȳ ∈ Q`; (b) `ȳ ∈ x − (λ+ε)R`; (c) `ŷ ∈ Q ∩ (x − λR)`;
/// (d) `cᵀy* ≤ cᵀŷ`; (e) the cost identity for `ŷ` holds and, combined
/// with (d), gives `λ·cᵀz ≤ cᵀx − (1−λ)·cᵀy*` and `cᵀz ≤ cᵀx / λ`.
pub fn verify_proof_points<R: Relaxation + ?Sized>(
    rel: &R,
    x: &[Rational],
    y_star: &[Rational],
    z: &[Rational],
    body: &BoxErrorBody,
    lambda: &Lambda,
) -> Result<ProofPoints, MetaError> {
    let epsilon = compute_epsilon_in(rel, y_star, z)?;
    let eps = epsilon.usable();
    let l = lambda.value();
    let one = Rational::one();
    let y_bar = combine(y_star, &(&one + &eps), z, &-eps.clone());
    let total = l + &eps;
    let y_hat = combine(x, &(&eps / &total), &y_bar, &(l / &total));

    let image_x = rel.image(x);
    let gap = |p: &[Rational]| -> Vec<Rational> { image_x.iter().zip(rel.image(p)).map(|(a, b)| a - b).collect() };
    let a = rel.contains(&y_bar);
    let b = body.dilate(&total).contains(&gap(&y_bar));
    let c = rel.contains(&y_hat) && body.scale(lambda).contains(&gap(&y_hat));

    let cx = rel.cost(x);
    let cy = rel.cost(y_star);
    let cz = rel.cost(z);
    let c_hat = rel.cost(&y_hat);
    let d = cy <= c_hat;
    let identity = &total * (&c_hat - &cy) == &eps * &cx - &eps * (&one - l) * &cy - &eps * l * &cz;
    let derived = l * &cz <= &cx - (&one - l) * &cy;
    let e = identity && (!d || derived) && d && l * &cz <= cx;

    let checks = vec![
        Check::new(names::PROOF_Y_BAR_IN_POLYTOPE, a),
        Check::new(names::PROOF_Y_BAR_IN_DILATED_BODY, b),
        Check::new(names::PROOF_Y_HAT_RESTRICTED, c),
        Check::new(names::PROOF_RESTRICTED_OPTIMALITY, d),
        Check::new(names::PROOF_COST_CHAIN, e),
    ];
    Ok(ProofPoints {
        epsilon,
        y_bar,
        y_hat,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::network_fixtures::parallel_arcs;
    use crate::rational::{int, ratio};

    #[test]
    fn epsilon_examples() {
        let g = parallel_arcs(0, 1);
        let e = compute_epsilon(&g, &[int(1), int(1)], &[int(2), int(0)]).unwrap();
        assert_eq!(e, Epsilon::Finite(int(1)));
        let e = compute_epsilon(&g, &[int(1), int(1)], &[int(1), int(1)]).unwrap();
        assert_eq!(e, Epsilon::Unbounded);
        let e = compute_epsilon(&g, &[ratio(3, 2), ratio(1, 2)], &[int(2), int(0)]).unwrap();
        assert_eq!(e, Epsilon::Finite(int(3)));
    }

    #[test]
    fn face_violation() {
        let g = parallel_arcs(0, 1);
        assert!(matches!(
            compute_epsilon(&g, &[int(2), int(0)], &[int(1), int(1)]),
            Err(MetaError::FaceViolation { coordinate: 1 })
        ));
    }

    #[test]
    fn all_checks_hold_on_parallel_trace() {
        let g = parallel_arcs(0, 1);
        let body = BoxErrorBody::symmetric(2, &int(1)).unwrap();
        let p = verify_proof_points(
            &SsufRelaxation(&g),
            &[int(1), int(1)],
            &[int(2), int(0)],
            &[int(2), int(0)],
            &body,
            &Lambda::one(),
        )
        .unwrap();
        assert!(p.checks.iter().all(|c| c.passed), "{:?}", p.checks);
        assert_eq!(p.epsilon, Epsilon::Unbounded);
    }

    #[test]
    fn half_lambda_trace() {
        let g = parallel_arcs(0, 1);
        let body = BoxErrorBody::symmetric(2, &int(1)).unwrap();
        let p = verify_proof_points(
            &SsufRelaxation(&g),
            &[int(1), int(1)],
            &[ratio(3, 2), ratio(1, 2)],
            &[int(2), int(0)],
            &body,
            &Lambda::new(ratio(1, 2)).unwrap(),
        )
        .unwrap();
        assert_eq!(p.epsilon, Epsilon::Finite(int(3)));
        assert_eq!(p.y_bar, vec![int(0), int(2)]);
        assert!(p.checks.iter().all(|c| c.passed), "{:?}", p.checks);
    }

    #[test]
    fn corrupted_z_fails_dilated_body() {
        // z = (2, 0) but the body has radius 1/4: ȳ drifts too far from x.
        let g = parallel_arcs(0, 1);
        let body = BoxErrorBody::symmetric(2, &ratio(1, 4)).unwrap();
        let p = verify_proof_points(
            &SsufRelaxation(&g),
            &[int(1), int(1)],
            &[ratio(5, 4), ratio(3, 4)],
            &[int(2), int(0)],
            &body,
            &Lambda::one(),
        )
        .unwrap();
        let b = p
            .checks
            .iter()
            .find(|c| c.name == names::PROOF_Y_BAR_IN_DILATED_BODY)
            .unwrap();
        assert!(!b.passed);
    }

    #[test]
    fn epsilon_text_round_trip() {
        for e in [Epsilon::Unbounded, Epsilon::Finite(ratio(7, 3))] {
            let json = serde_json::to_string(&e).unwrap();
            assert_eq!(serde_json::from_str::<Epsilon>(&json).unwrap(), e);
        }
    }
}
