use serde::{Deserialize, Serialize};

use super::{FpraError, RingFpra};
use crate::model::{
    difference, BoxErrorBody, ModelError, PathChoice, RingEdge, RingFractionalSolution, RingInstance,
    RingUnsplittableSolution,
};
use crate::rational::{max_of, serde_rational_vec, Rational};
use crate::ring::{nonuniform_to_uniform, strip_artificials};

/// How the ring brute force phrases its search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingSearchMode {
    /// Check each candidate's loads against the body directly.
    #[default]
    Direct,
    /// Treat the fractional loads as capacities, pass to the uniform-capacity
    /// instance, demand the uniform one-sided guarantee there, and strip the
    /// artificial commodities before the body check.
    Uniform,
}

/// Exhaustive ring FPRA over the `2^k` path choices of the commodities that
/// `x` splits; commodities `x` leaves unsplit keep their path. Among
/// in-body choices the smallest scaled L∞ deviation wins, ties going to the
/// lexicographically smallest choice vector (`First` before `Second`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceRing {
    /// Largest number of split commodities to enumerate over.
    pub cap: u32,
    pub mode: RingSearchMode,
}

impl Default for BruteForceRing {
    fn default() -> Self {
        BruteForceRing {
            cap: 20,
            mode: RingSearchMode::Direct,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingCounterexample {
    #[serde(with = "serde_rational_vec")]
    pub splits: Vec<Rational>,
    pub body: BoxErrorBody,
    /// Commodities whose path was enumerated.
    pub free: Vec<usize>,
    pub assignments_checked: u128,
}

fn base_choices(x: &RingFractionalSolution) -> (Vec<PathChoice>, Vec<usize>) {
    let mut choices = Vec::with_capacity(x.splits().len());
    let mut free = Vec::new();
    for i in 0..x.splits().len() {
        match x.unsplit_choice(i) {
            Some(c) => choices.push(c),
            None => {
                choices.push(PathChoice::First);
                free.push(i);
            }
        }
    }
    (choices, free)
}

/// Choice vector number `code`, with the first free commodity most significant.
fn decode(base: &[PathChoice], free: &[usize], code: u128) -> Vec<PathChoice> {
    let mut choices = base.to_vec();
    for (pos, &i) in free.iter().enumerate() {
        let bit = free.len() - 1 - pos;
        choices[i] = if (code >> bit) & 1 == 0 {
            PathChoice::First
        } else {
            PathChoice::Second
        };
    }
    choices
}

impl BruteForceRing {
    fn check_dims(ring: &RingInstance, x: &RingFractionalSolution, body: &BoxErrorBody) -> Result<(), FpraError> {
        if x.splits().len() != ring.commodities().len() {
            return Err(ModelError::DimensionMismatch {
                expected: ring.commodities().len(),
                found: x.splits().len(),
            }
            .into());
        }
        if body.dim() != ring.edge_count() {
            return Err(ModelError::DimensionMismatch {
                expected: ring.edge_count(),
                found: body.dim(),
            }
            .into());
        }
        Ok(())
    }

    pub fn search(
        &self,
        ring: &RingInstance,
        x: &RingFractionalSolution,
        body: &BoxErrorBody,
    ) -> Result<RingUnsplittableSolution, FpraError> {
        Self::check_dims(ring, x, body)?;
        let (base, free) = base_choices(x);
        if free.len() > self.cap as usize {
            return Err(FpraError::TooLarge {
                size: 1u128 << free.len().min(127),
                cap: 1u128 << self.cap.min(127),
            });
        }
        let reference = x.loads(ring)?;
        let total: u128 = 1 << free.len();

        let uniform = match self.mode {
            RingSearchMode::Direct => None,
            RingSearchMode::Uniform => {
                let edges = ring
                    .edges()
                    .iter()
                    .zip(&reference)
                    .map(|(e, u)| RingEdge {
                        cost: e.cost.clone(),
                        capacity: Some(u.clone()),
                    })
                    .collect();
                let capacitated = RingInstance::new(ring.nodes().to_vec(), edges, ring.commodities().to_vec())?;
                let reduction = nonuniform_to_uniform(&capacitated).map_err(|e| FpraError::Reduction(e.to_string()))?;
                Some(reduction)
            }
        };
        let slack = max_of(body.upper());

        let mut best: Option<(Rational, u128)> = None;
        for code in 0..total {
            let choices = decode(&base, &free, code);
            let loads = match &uniform {
                None => ring.choice_loads(&choices)?,
                Some(reduction) => {
                    let lifted = reduction.embed(&choices);
                    let uniform_loads = lifted.loads(reduction.instance())?;
                    let ceiling = reduction.uniform_capacity() + &slack;
                    if uniform_loads.iter().any(|l| *l > ceiling) {
                        continue;
                    }
                    let stripped =
                        strip_artificials(reduction, &lifted).map_err(|e| FpraError::Reduction(e.to_string()))?;
                    stripped.loads
                }
            };
            if let Some(score) = body.scaled_deviation(&difference(&loads, &reference)) {
                if best.as_ref().is_none_or(|(s, _)| score < *s) {
                    best = Some((score, code));
                }
            }
        }
        match best {
            Some((_, code)) => Ok(RingUnsplittableSolution::new(decode(&base, &free, code))),
            None => Err(FpraError::NoRingSolutionInBody(Box::new(RingCounterexample {
                splits: x.splits().to_vec(),
                body: body.clone(),
                free,
                assignments_checked: total,
            }))),
        }
    }
}

impl RingFpra for BruteForceRing {
    fn name(&self) -> &'static str {
        "brute"
    }

    fn honours_body(&self) -> bool {
        true
    }

    fn round(
        &self,
        ring: &RingInstance,
        x: &RingFractionalSolution,
        body: &BoxErrorBody,
    ) -> Result<RingUnsplittableSolution, FpraError> {
        self.search(ring, x, body)
    }
}

/// Re-enumerates every choice vector compatible with the unsplit
/// commodities and confirms none fits the body.
pub fn confirm_ring_counterexample(ring: &RingInstance, cex: &RingCounterexample) -> bool {
    let Ok(x) = RingFractionalSolution::new(cex.splits.clone()) else {
        return false;
    };
    if cex.splits.len() != ring.commodities().len() || cex.body.dim() != ring.edge_count() {
        return false;
    }
    let Ok(reference) = x.loads(ring) else {
        return false;
    };
    let k = cex.splits.len();
    for mask in 0u64..(1u64 << k) {
        let mut compatible = true;
        let mut choices = Vec::with_capacity(k);
        for i in 0..k {
            let c = if mask & (1 << i) == 0 {
                PathChoice::First
            } else {
                PathChoice::Second
            };
            if x.unsplit_choice(i).is_some_and(|fixed| fixed != c) {
                compatible = false;
                break;
            }
            choices.push(c);
        }
        if !compatible {
            continue;
        }
        let loads = ring.choice_loads(&choices).expect("dimensions checked");
        let deviation: Vec<Rational> = loads.iter().zip(&reference).map(|(l, r)| l - r).collect();
        if cex.body.contains(&deviation) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ring_fixtures::ring;
    use crate::rational::{int, ratio};
    use num_traits::Signed;

    #[test]
    fn single_commodity_tie_picks_first() {
        let r = ring(&[1, 1, 1, 1], &[(0, 2, int(1))]);
        let x = RingFractionalSolution::new(vec![ratio(1, 2)]).unwrap();
        let body = BoxErrorBody::symmetric(4, &int(1)).unwrap();
        let z = BruteForceRing::default().round(&r, &x, &body).unwrap();
        assert_eq!(z.choices(), &[PathChoice::First]);
    }

    #[test]
    fn two_crossing_commodities_minimize_deviation() {
        let r = ring(&[1, 1, 1, 1], &[(0, 2, int(1)), (1, 3, int(2))]);
        let x = RingFractionalSolution::new(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        let body = BoxErrorBody::symmetric(4, &int(2)).unwrap();
        let z = BruteForceRing::default().round(&r, &x, &body).unwrap();
        // Reference loads are 3/2 everywhere; every choice deviates by exactly 3/2 somewhere.
        let reference = x.loads(&r).unwrap();
        let mut best: Option<(Rational, Vec<PathChoice>)> = None;
        for a in [PathChoice::First, PathChoice::Second] {
            for b in [PathChoice::First, PathChoice::Second] {
                let loads = r.choice_loads(&[a, b]).unwrap();
                let dev = max_of(
                    difference(&loads, &reference)
                        .iter()
                        .map(|d| d.abs())
                        .collect::<Vec<_>>()
                        .iter(),
                );
                if best.as_ref().is_none_or(|(s, _)| dev < *s) {
                    best = Some((dev, vec![a, b]));
                }
            }
        }
        assert_eq!(z.choices(), best.unwrap().1.as_slice());
    }

    #[test]
    fn zero_radius_fails_on_split_input() {
        let r = ring(&[1, 1, 1, 1], &[(0, 2, int(1))]);
        let x = RingFractionalSolution::new(vec![ratio(1, 2)]).unwrap();
        let body = BoxErrorBody::symmetric(4, &int(0)).unwrap();
        let Err(FpraError::NoRingSolutionInBody(cex)) = BruteForceRing::default().round(&r, &x, &body) else {
            panic!("expected a counterexample");
        };
        assert!(confirm_ring_counterexample(&r, &cex));
    }

    #[test]
    fn unsplit_commodities_keep_their_path() {
        let r = ring(&[1, 1, 1, 1], &[(0, 2, int(1)), (1, 3, int(1))]);
        let x = RingFractionalSolution::new(vec![int(0), ratio(1, 2)]).unwrap();
        let body = BoxErrorBody::symmetric(4, &int(1)).unwrap();
        let z = BruteForceRing::default().round(&r, &x, &body).unwrap();
        assert_eq!(z.choices()[0], PathChoice::Second);
    }

    #[test]
    fn cap_is_enforced() {
        let r = ring(&[1, 1, 1, 1], &[(0, 2, int(1)), (1, 3, int(1))]);
        let x = RingFractionalSolution::new(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        let body = BoxErrorBody::symmetric(4, &int(1)).unwrap();
        let fpra = BruteForceRing {
            cap: 1,
            ..Default::default()
        };
        assert!(matches!(fpra.round(&r, &x, &body), Err(FpraError::TooLarge { .. })));
    }

    #[test]
    fn uniform_mode_agrees_with_direct() {
        let r = ring(&[2, 1, 3, 1, 1], &[(0, 2, int(1)), (1, 3, int(2)), (4, 2, ratio(1, 2))]);
        let x = RingFractionalSolution::new(vec![ratio(1, 3), ratio(1, 2), ratio(3, 4)]).unwrap();
        for radius in [int(0), ratio(1, 2), int(1), int(2)] {
            let body = BoxErrorBody::symmetric(5, &radius).unwrap();
            let direct = BruteForceRing::default().round(&r, &x, &body);
            let uniform = BruteForceRing {
                mode: RingSearchMode::Uniform,
                ..Default::default()
            }
            .round(&r, &x, &body);
            assert_eq!(direct.is_ok(), uniform.is_ok(), "radius {radius}");
        }
    }
}
