use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::identity::{opposing_edges_hold, two_sided_bound, TwoSidedReport};
use super::preprocess::{preprocess, CanonicalRingForm, FixedPath, ParallelShift};
use crate::fpra::{FpraDescriptor, RingFpra, Strictness};
use crate::meta::{certify, Check, MetaError, RingRelaxation, RoundingCertificate};
use crate::model::{BoxErrorBody, PathChoice, RingFractionalSolution, RingInstance, RingUnsplittableSolution};
use crate::rational::{ratio, serde_rational, serde_rational_vec, Lambda, Rational};

pub mod ring_check_names {
    pub const COST_BOUND: &str = "cost_bound";
    pub const LOAD_UPPER_BOUND: &str = "load_upper_bound";
    pub const PREPROCESSING_MONOTONE: &str = "preprocessing_monotone";
    pub const REDUCED_CONSISTENT: &str = "reduced_consistent";
    pub const OUTPUT_DECOMPOSES: &str = "output_decomposes";
    pub const OPPOSING_EDGES: &str = "opposing_edges";
    pub const TWO_SIDED: &str = "two_sided";
    pub const CANONICAL_CERTIFICATE: &str = "canonical_certificate";
}

use ring_check_names as names;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingRunConfig {
    /// Additive guarantee of the FPRA, in units of `d_max`.
    pub alpha: Rational,
    pub lambda: Lambda,
    pub strictness: Strictness,
}

impl Default for RingRunConfig {
    fn default() -> Self {
        RingRunConfig {
            alpha: ratio(13, 10),
            lambda: Lambda::one(),
            strictness: Strictness::Strict,
        }
    }
}

/// The outcome of one ring run, stated on the original edges, plus the
/// canonical-form certificate and the preprocessing provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingCertificate {
    #[serde(with = "serde_rational")]
    pub alpha: Rational,
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    #[serde(with = "serde_rational")]
    pub d_max: Rational,
    /// `(1 + λ)·α·d_max`.
    #[serde(with = "serde_rational")]
    pub load_bound: Rational,
    #[serde(with = "serde_rational")]
    pub input_cost: Rational,
    #[serde(with = "serde_rational")]
    pub output_cost: Rational,
    #[serde(with = "serde_rational_vec")]
    pub input_loads: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub preprocessed_loads: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub output_loads: Vec<Rational>,
    /// `x_e + load_bound − load_e`.
    #[serde(with = "serde_rational_vec")]
    pub load_margins: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub preprocessed: Vec<Rational>,
    pub fixed: Vec<FixedPath>,
    pub shifts: Vec<ParallelShift>,
    pub commodity_map: Vec<usize>,
    pub flipped: Vec<bool>,
    pub node_map: Vec<usize>,
    pub edge_map: Vec<usize>,
    /// Canonical-form choices returned by the FPRA.
    pub canonical_choices: Vec<PathChoice>,
    /// `None` when every commodity was fixed during preprocessing.
    pub canonical: Option<RoundingCertificate>,
    /// Two-sided deviation of the FPRA output from `y*` on canonical edges.
    pub two_sided: Option<TwoSidedReport>,
    pub fpra: FpraDescriptor,
    pub checks: Vec<Check>,
}

impl RingCertificate {
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

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingRun {
    pub solution: RingUnsplittableSolution,
    pub form: CanonicalRingForm,
    pub certificate: RingCertificate,
}

fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(p, q)| p + q).collect()
}

/// Rounds a fractional ring solution so that the cost is at most `cᵀx / λ`
/// and every edge load is at most `x_e + (1 + λ)·α·d_max`.
pub fn ring_round_with_cost<F: RingFpra + ?Sized>(
    ring: &RingInstance,
    x: &RingFractionalSolution,
    fpra: &F,
    config: &RingRunConfig,
) -> Result<RingRun, MetaError> {
    if config.alpha.is_negative() {
        return Err(MetaError::NegativeAlpha);
    }
    if !ring.has_nonnegative_costs() {
        return Err(MetaError::NegativeRingCosts);
    }
    let lambda = &config.lambda;
    let l = lambda.value();
    let form = preprocess(ring, x)?;
    let slack = &config.alpha * &form.d_max;
    let load_bound = (Rational::one() + l) * &slack;

    let (canonical_solution, canonical, two_sided, opposing, descriptor) = match &form.instance {
        None => {
            let body = BoxErrorBody::symmetric(0, &slack)?;
            (
                RingUnsplittableSolution::new(Vec::new()),
                None,
                None,
                true,
                fpra.descriptor(&body, config.strictness),
            )
        }
        Some(instance) => {
            let body = BoxErrorBody::symmetric(instance.edge_count(), &slack)?;
            let y_star = crate::solvers::ring_restricted_min_cost(instance, &form.x_bar, &body, lambda)?.point;
            let z = fpra.round(instance, &y_star, &body).map_err(|source| MetaError::Fpra {
                source,
                y_star: y_star.splits().to_vec(),
            })?;
            let z_splits: Vec<Rational> = z.choices().iter().map(|c| c.as_split()).collect();
            let cert = certify(
                &RingRelaxation(instance),
                form.x_bar.splits(),
                y_star.splits(),
                &z_splits,
                &body,
                lambda,
            );
            let k = form.k_prime();
            let opposing = [form.x_bar.loads(instance)?, y_star.loads(instance)?, z.loads(instance)?]
                .iter()
                .all(|loads| opposing_edges_hold(instance, k, loads));
            let two_sided = two_sided_bound(&form, &y_star, &z, &config.alpha).ok();
            (
                z,
                Some(cert),
                two_sided,
                opposing,
                fpra.descriptor(&body, config.strictness),
            )
        }
    };

    let k = ring.commodities().len();
    let solution = form.lift(k, &canonical_solution);
    let input_loads = x.loads(ring)?;
    let preprocessed_loads = form.preprocessed.loads(ring)?;
    let output_loads = solution.loads(ring)?;
    let fixed_loads = form.fixed_loads(ring);
    let (reduced_loads, canonical_loads) = match &form.instance {
        None => (fixed_loads.clone(), fixed_loads.clone()),
        Some(instance) => (
            add(&fixed_loads, &form.pull_back(&form.x_bar.loads(instance)?)),
            add(&fixed_loads, &form.pull_back(&canonical_solution.loads(instance)?)),
        ),
    };
    let input_cost = ring.cost_of(&input_loads);
    let output_cost = ring.cost_of(&output_loads);
    let preprocessed_cost = ring.cost_of(&preprocessed_loads);
    let load_margins: Vec<Rational> = input_loads
        .iter()
        .zip(&output_loads)
        .map(|(xe, le)| xe + &load_bound - le)
        .collect();

    let checks = vec![
        Check::new(names::COST_BOUND, l * &output_cost <= input_cost),
        Check::new(names::LOAD_UPPER_BOUND, load_margins.iter().all(|m| !m.is_negative())),
        Check::new(
            names::PREPROCESSING_MONOTONE,
            preprocessed_cost <= input_cost && preprocessed_loads.iter().zip(&input_loads).all(|(p, q)| p <= q),
        ),
        Check::new(names::REDUCED_CONSISTENT, reduced_loads == preprocessed_loads),
        Check::new(names::OUTPUT_DECOMPOSES, canonical_loads == output_loads),
        Check::new(names::OPPOSING_EDGES, opposing),
        Check::new(names::TWO_SIDED, form.instance.is_none() || two_sided.is_some()),
        Check::new(
            names::CANONICAL_CERTIFICATE,
            canonical.as_ref().is_none_or(|c| c.passed()),
        ),
    ];
    let certificate = RingCertificate {
        alpha: config.alpha.clone(),
        lambda: l.clone(),
        d_max: form.d_max.clone(),
        load_bound,
        input_cost,
        output_cost,
        input_loads,
        preprocessed_loads,
        output_loads,
        load_margins,
        preprocessed: form.preprocessed.splits().to_vec(),
        fixed: form.fixed.clone(),
        shifts: form.shifts.clone(),
        commodity_map: form.commodity_map.clone(),
        flipped: form.flipped.clone(),
        node_map: form.node_map.clone(),
        edge_map: form.edge_map.clone(),
        canonical_choices: canonical_solution.choices().to_vec(),
        canonical,
        two_sided,
        fpra: descriptor,
        checks,
    };
    if config.strictness == Strictness::Strict && !certificate.passed() {
        let mut failed = certificate.failed();
        if let Some(c) = &certificate.canonical {
            failed.extend(c.failed().into_iter().map(|n| format!("canonical.{n}")));
        }
        return Err(MetaError::CertificateViolation {
            failed,
            certificate: Box::new(serde_json::to_value(&certificate).expect("certificates serialize")),
        });
    }
    Ok(RingRun {
        solution,
        form,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpra::BruteForceRing;
    use crate::model::ring_fixtures::ring;
    use crate::rational::int;

    fn splits(v: &[Rational]) -> RingFractionalSolution {
        RingFractionalSolution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn already_unsplittable() {
        let r = ring(&[1, 2, 3, 4], &[(0, 2, int(1)), (1, 3, int(2))]);
        let x = splits(&[int(1), int(0)]);
        let run = ring_round_with_cost(&r, &x, &BruteForceRing::default(), &RingRunConfig::default()).unwrap();
        assert_eq!(run.solution.choices(), &[PathChoice::First, PathChoice::Second]);
        assert_eq!(run.certificate.output_loads, run.certificate.input_loads);
        assert_eq!(run.certificate.output_cost, run.certificate.input_cost);
        assert!(run.certificate.canonical.is_none());
    }

    #[test]
    fn crossing_pair_lambda_one() {
        let r = ring(&[1, 3, 2, 5], &[(0, 2, int(1)), (1, 3, int(2))]);
        let x = splits(&[ratio(1, 2), ratio(1, 3)]);
        let run = ring_round_with_cost(&r, &x, &BruteForceRing::default(), &RingRunConfig::default()).unwrap();
        let cert = &run.certificate;
        assert!(cert.passed(), "{:?}", cert.failed());
        assert_eq!(cert.load_bound, ratio(26, 5));
        assert!(cert.output_cost <= cert.input_cost);
        for ((l, xe), b) in cert
            .output_loads
            .iter()
            .zip(&cert.input_loads)
            .zip(std::iter::repeat(ratio(13, 5) * int(2)))
        {
            assert!(*l <= xe + b);
        }
    }

    #[test]
    fn lambda_half_bounds() {
        let r = ring(&[4, 1, 1, 1, 2, 3], &[(0, 3, int(3)), (1, 4, int(1)), (2, 5, int(2))]);
        let x = splits(&[ratio(1, 3), ratio(1, 2), ratio(3, 4)]);
        let config = RingRunConfig {
            lambda: Lambda::new(ratio(1, 2)).unwrap(),
            ..Default::default()
        };
        let run = ring_round_with_cost(&r, &x, &BruteForceRing::default(), &config).unwrap();
        let cert = &run.certificate;
        assert!(cert.passed(), "{:?}", cert.failed());
        assert_eq!(cert.load_bound, ratio(39, 20) * int(3));
        assert!(cert.output_cost <= int(2) * &cert.input_cost);
    }

    #[test]
    fn single_commodity() {
        let r = ring(&[1, 1, 1], &[(0, 1, int(2))]);
        let run = ring_round_with_cost(
            &r,
            &splits(&[ratio(1, 2)]),
            &BruteForceRing::default(),
            &RingRunConfig::default(),
        )
        .unwrap();
        assert!(run.certificate.passed());
        assert_eq!(run.solution.choices(), &[PathChoice::First]);
    }

    #[test]
    fn negative_costs_rejected() {
        let r = ring(&[1, -1, 1], &[(0, 1, int(2))]);
        assert!(matches!(
            ring_round_with_cost(
                &r,
                &splits(&[ratio(1, 2)]),
                &BruteForceRing::default(),
                &RingRunConfig::default()
            ),
            Err(MetaError::NegativeRingCosts)
        ));
    }

    #[test]
    fn zero_alpha_fails_honestly() {
        let r = ring(&[1, 1, 1, 1], &[(0, 2, int(1)), (1, 3, int(1))]);
        let config = RingRunConfig {
            alpha: int(0),
            ..Default::default()
        };
        let x = splits(&[ratio(1, 2), ratio(1, 2)]);
        assert!(matches!(
            ring_round_with_cost(&r, &x, &BruteForceRing::default(), &config),
            Err(MetaError::Fpra { .. })
        ));
    }

    #[test]
    fn enumeration_cap() {
        let r = ring(&[1, 1, 1, 1], &[(0, 2, int(1)), (1, 3, int(1))]);
        let fpra = BruteForceRing {
            cap: 1,
            ..Default::default()
        };
        let x = splits(&[ratio(1, 2), ratio(1, 2)]);
        // A zero body pins y* = x̄ with both commodities split.
        let config = RingRunConfig {
            alpha: int(0),
            ..Default::default()
        };
        assert!(matches!(
            ring_round_with_cost(&r, &x, &fpra, &config),
            Err(MetaError::Fpra {
                source: crate::fpra::FpraError::TooLarge { .. },
                ..
            })
        ));
    }
}
