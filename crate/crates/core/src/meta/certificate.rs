use num_traits::One;
use serde::{Deserialize, Serialize};

use super::proof::{verify_proof_points, Epsilon};
use super::Relaxation;
use crate::model::{difference, BoxErrorBody};
use crate::rational::{serde_rational, serde_rational_vec, Lambda, Rational};

pub mod check_names {
    pub const INPUT_FEASIBLE: &str = "input_feasible";
    pub const RESTRICTED_FEASIBLE: &str = "restricted_feasible";
    pub const RESTRICTED_COST_LE_INPUT: &str = "restricted_cost_le_input";
    pub const OUTPUT_FEASIBLE: &str = "output_feasible";
    pub const FPRA_IN_BODY: &str = "fpra_in_body";
    pub const FACE_PRESERVED: &str = "face_preserved";
    pub const DEVIATION_IN_DIFFERENCE_BODY: &str = "deviation_in_difference_body";
    pub const COST_BOUND: &str = "cost_bound";
    pub const PROOF_Y_BAR_IN_POLYTOPE: &str = "proof_y_bar_in_polytope";
    pub const PROOF_Y_BAR_IN_DILATED_BODY: &str = "proof_y_bar_in_dilated_body";
    pub const PROOF_Y_HAT_RESTRICTED: &str = "proof_y_hat_restricted";
    pub const PROOF_RESTRICTED_OPTIMALITY: &str = "proof_restricted_optimality";
    pub const PROOF_COST_CHAIN: &str = "proof_cost_chain";

    pub const PROOF: [&str; 5] = [
        PROOF_Y_BAR_IN_POLYTOPE,
        PROOF_Y_BAR_IN_DILATED_BODY,
        PROOF_Y_HAT_RESTRICTED,
        PROOF_RESTRICTED_OPTIMALITY,
        PROOF_COST_CHAIN,
    ];
}

use check_names as names;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, passed: bool) -> Self {
        Check {
            name: name.to_string(),
            passed,
        }
    }
}

/// Everything needed to re-check one run of the transformation.
///
/// `x`, `y_star`, `z`, `y_bar` and `y_hat` are native coordinates (arc
/// values for flows, splits for ring loading); `deviation` lives in the
/// cost space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundingCertificate {
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    #[serde(with = "serde_rational")]
    pub input_cost: Rational,
    #[serde(with = "serde_rational")]
    pub restricted_cost: Rational,
    #[serde(with = "serde_rational")]
    pub output_cost: Rational,
    #[serde(with = "serde_rational_vec")]
    pub x: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub y_star: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub z: Vec<Rational>,
    /// `z − x` in the cost space.
    #[serde(with = "serde_rational_vec")]
    pub deviation: Vec<Rational>,
    pub body_r: BoxErrorBody,
    pub body_r_minus_lambda_r: BoxErrorBody,
    /// `None` when `z` leaves the minimal face of `y*`.
    pub epsilon: Option<Epsilon>,
    #[serde(with = "serde_rational_vec")]
    pub y_bar: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub y_hat: Vec<Rational>,
    pub checks: Vec<Check>,
}

impl RoundingCertificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.clone())
            .collect()
    }

    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.passed)
    }
}

/// Whether `z` stays on every native bound that `y*` is tight on.
pub fn face_preserved<R: Relaxation + ?Sized>(rel: &R, y_star: &[Rational], z: &[Rational]) -> bool {
    y_star.iter().zip(z).enumerate().all(|(i, (y, zi))| {
        let lo = rel.native_lower(i);
        let at_upper = rel.native_upper(i).is_some_and(|hi| *y == hi && *zi != hi);
        !(*y == lo && *zi != lo) && !at_upper
    })
}

/// Evaluates every check for `x → y* → z` and records the proof points.
pub fn certify<R: Relaxation + ?Sized>(
    rel: &R,
    x: &[Rational],
    y_star: &[Rational],
    z: &[Rational],
    body: &BoxErrorBody,
    lambda: &Lambda,
) -> RoundingCertificate {
    let n = rel.native_dim();
    let shaped = [x, y_star, z].iter().all(|v| v.len() == n);
    let l = lambda.value();
    let difference_body = body.minkowski_diff(lambda);
    let (image_x, image_y, image_z) = if shaped {
        (rel.image(x), rel.image(y_star), rel.image(z))
    } else {
        (Vec::new(), Vec::new(), Vec::new())
    };
    let input_cost = if shaped { rel.cost(x) } else { Rational::default() };
    let restricted_cost = if shaped { rel.cost(y_star) } else { Rational::default() };
    let output_cost = if shaped { rel.cost(z) } else { Rational::default() };
    let deviation = difference(&image_z, &image_x);

    let mut checks = vec![
        Check::new(names::INPUT_FEASIBLE, shaped && rel.contains(x)),
        Check::new(
            names::RESTRICTED_FEASIBLE,
            shaped && rel.contains(y_star) && body.scale(lambda).contains(&difference(&image_x, &image_y)),
        ),
        Check::new(names::RESTRICTED_COST_LE_INPUT, shaped && restricted_cost <= input_cost),
        Check::new(names::OUTPUT_FEASIBLE, shaped && rel.contains(z)),
        Check::new(
            names::FPRA_IN_BODY,
            shaped && body.contains(&difference(&image_z, &image_y)),
        ),
        Check::new(names::FACE_PRESERVED, shaped && face_preserved(rel, y_star, z)),
        Check::new(
            names::DEVIATION_IN_DIFFERENCE_BODY,
            shaped && difference_body.contains(&deviation),
        ),
        Check::new(names::COST_BOUND, shaped && l * &output_cost <= input_cost),
    ];
    let proof = if shaped {
        verify_proof_points(rel, x, y_star, z, body, lambda).ok()
    } else {
        None
    };
    let (epsilon, y_bar, y_hat) = match proof {
        Some(p) => {
            checks.extend(p.checks);
            (Some(p.epsilon), p.y_bar, p.y_hat)
        }
        None => {
            checks.extend(names::PROOF.iter().map(|n| Check::new(n, false)));
            (None, Vec::new(), Vec::new())
        }
    };
    debug_assert!(l <= &Rational::one());
    RoundingCertificate {
        lambda: l.clone(),
        input_cost,
        restricted_cost,
        output_cost,
        x: x.to_vec(),
        y_star: y_star.to_vec(),
        z: z.to_vec(),
        deviation,
        body_r: body.clone(),
        body_r_minus_lambda_r: difference_body,
        epsilon,
        y_bar,
        y_hat,
        checks,
    }
}
