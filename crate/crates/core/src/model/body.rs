//! Axis-aligned box error bodies containing the origin.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::rational::{serde_rational_vec, Lambda, Rational};

/// The box `{v : lower <= v <= upper}` with `lower <= 0 <= upper`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxErrorBody {
    #[serde(with = "serde_rational_vec")]
    lower: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    upper: Vec<Rational>,
}

impl BoxErrorBody {
    pub fn new(lower: Vec<Rational>, upper: Vec<Rational>) -> Result<Self, ModelError> {
        if lower.len() != upper.len() {
            return Err(ModelError::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        for (coordinate, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if lo.is_positive() || hi.is_negative() {
                return Err(ModelError::BodyMissesOrigin(coordinate));
            }
        }
        Ok(BoxErrorBody { lower, upper })
    }

    /// `[-radius, radius]^dim`.
    pub fn symmetric(dim: usize, radius: &Rational) -> Result<Self, ModelError> {
        BoxErrorBody::new(vec![-radius.clone(); dim], vec![radius.clone(); dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[Rational] {
        &self.lower
    }

    pub fn upper(&self) -> &[Rational] {
        &self.upper
    }

    /// `λR`.
    pub fn scale(&self, lambda: &Lambda) -> BoxErrorBody {
        self.dilate(lambda.value())
    }

    /// `R - λR`, coordinatewise `[lo - λ·hi, hi - λ·lo]`.
    pub fn minkowski_diff(&self, lambda: &Lambda) -> BoxErrorBody {
        let l = lambda.value();
        BoxErrorBody {
            lower: self.lower.iter().zip(&self.upper).map(|(lo, hi)| lo - l * hi).collect(),
            upper: self.lower.iter().zip(&self.upper).map(|(lo, hi)| hi - l * lo).collect(),
        }
    }

    /// `factor·R` for any `factor >= 0`.
    pub fn dilate(&self, factor: &Rational) -> BoxErrorBody {
        assert!(!factor.is_negative(), "dilation factor must be nonnegative");
        BoxErrorBody {
            lower: self.lower.iter().map(|v| v * factor).collect(),
            upper: self.upper.iter().map(|v| v * factor).collect(),
        }
    }

    /// `-R`.
    pub fn negated(&self) -> BoxErrorBody {
        BoxErrorBody {
            lower: self.upper.iter().map(|v| -v).collect(),
            upper: self.lower.iter().map(|v| -v).collect(),
        }
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        v.len() == self.dim()
            && v.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    /// Whether `point - center` lies in the body.
    pub fn contains_offset(&self, point: &[Rational], center: &[Rational]) -> bool {
        point.len() == center.len() && self.contains(&difference(point, center))
    }

    /// `max_i |v_i| / radius_i`, where the radius is taken on the side of
    /// the sign of `v_i`. `None` when some coordinate leaves the body.
    pub fn scaled_deviation(&self, v: &[Rational]) -> Option<Rational> {
        if !self.contains(v) {
            return None;
        }
        let mut worst = Rational::zero();
        for (x, (lo, hi)) in v.iter().zip(self.lower.iter().zip(&self.upper)) {
            let ratio = if x.is_positive() {
                x / hi
            } else if x.is_negative() {
                x / lo
            } else {
                continue;
            };
            if ratio > worst {
                worst = ratio;
            }
        }
        Some(worst)
    }
}

pub fn difference(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
