use num_traits::Signed;

use super::{certify, MetaError, RoundingCertificate, SsufRelaxation};
use crate::fpra::{FpraDescriptor, SsufFpra, Strictness};
use crate::model::{
    induced_load, is_in_polytope, BoxErrorBody, FractionalFlow, UnsplittablePathFlow, WeightedSsufNetwork,
};
use crate::rational::{Lambda, Rational};
use crate::solvers::restricted_min_cost_ssuf;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsufRun {
    pub paths: UnsplittablePathFlow,
    /// Arc loads induced by `paths`.
    pub z: Vec<Rational>,
    pub y_star: FractionalFlow,
    pub certificate: RoundingCertificate,
    pub fpra: FpraDescriptor,
}

/// Rounds `x` to an unsplittable flow whose cost is at most `cᵀx / λ`.
///
/// In strict mode any failed certificate check is an error; in report mode
/// the run is returned with the failures recorded.
pub fn round_with_cost<F: SsufFpra + ?Sized>(
    network: &WeightedSsufNetwork,
    x: &FractionalFlow,
    fpra: &F,
    body: &BoxErrorBody,
    lambda: &Lambda,
    strictness: Strictness,
) -> Result<SsufRun, MetaError> {
    if !lambda.is_one() && network.costs().iter().any(|c| c.is_negative()) {
        return Err(MetaError::NegativeCosts);
    }
    if !is_in_polytope(network, x.values()) {
        return Err(MetaError::NotInPolytope);
    }
    if let Some(cycle) = network.find_cycle(&x.support()) {
        return Err(MetaError::CyclicSupport(cycle));
    }
    let y_star = restricted_min_cost_ssuf(network, x, body, lambda)?.point;
    let paths = fpra.round(network, &y_star, body).map_err(|source| MetaError::Fpra {
        source,
        y_star: y_star.values().to_vec(),
    })?;
    let z = induced_load(network, &paths)?;
    let certificate = certify(&SsufRelaxation(network), x.values(), y_star.values(), &z, body, lambda);
    if strictness == Strictness::Strict && !certificate.passed() {
        return Err(MetaError::CertificateViolation {
            failed: certificate.failed(),
            certificate: Box::new(serde_json::to_value(&certificate).expect("certificates serialize")),
        });
    }
    Ok(SsufRun {
        paths,
        z,
        y_star,
        certificate,
        fpra: fpra.descriptor(body, strictness),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpra::{BruteForceSsuf, GreedyPathStrip};
    use crate::meta::check_names;
    use crate::model::network_fixtures::{diamond, parallel_arcs};
    use crate::rational::{int, ratio};

    fn x11() -> FractionalFlow {
        FractionalFlow::new(vec![int(1), int(1)])
    }

    #[test]
    fn lambda_one_parallel() {
        let g = parallel_arcs(0, 1);
        let body = BoxErrorBody::symmetric(2, &int(1)).unwrap();
        let run = round_with_cost(
            &g,
            &x11(),
            &BruteForceSsuf::default(),
            &body,
            &Lambda::one(),
            Strictness::Strict,
        )
        .unwrap();
        assert_eq!(run.y_star.values(), &[int(2), int(0)]);
        assert_eq!(run.z, vec![int(2), int(0)]);
        assert_eq!(run.certificate.output_cost, int(0));
        assert_eq!(run.certificate.deviation, vec![int(1), int(-1)]);
        assert!(run.certificate.passed());
    }

    #[test]
    fn lambda_half_parallel() {
        let g = parallel_arcs(0, 1);
        let body = BoxErrorBody::symmetric(2, &int(1)).unwrap();
        let lambda = Lambda::new(ratio(1, 2)).unwrap();
        let run = round_with_cost(
            &g,
            &x11(),
            &BruteForceSsuf::default(),
            &body,
            &lambda,
            Strictness::Strict,
        )
        .unwrap();
        assert_eq!(run.y_star.values(), &[ratio(3, 2), ratio(1, 2)]);
        assert!(run.z == vec![int(2), int(0)] || run.z == vec![int(1), int(1)]);
        assert!(run.certificate.output_cost <= int(2));
        assert_eq!(
            run.certificate.body_r_minus_lambda_r.upper(),
            &[ratio(3, 2), ratio(3, 2)]
        );
    }

    #[test]
    fn zero_costs() {
        let g = parallel_arcs(0, 0);
        let body = BoxErrorBody::symmetric(2, &int(1)).unwrap();
        let run = round_with_cost(
            &g,
            &x11(),
            &BruteForceSsuf::default(),
            &body,
            &Lambda::one(),
            Strictness::Strict,
        )
        .unwrap();
        assert_eq!(run.certificate.output_cost, int(0));
        assert!(run.certificate.passed());
    }

    #[test]
    fn negative_costs_need_lambda_one() {
        let g = parallel_arcs(-1, 1);
        let body = BoxErrorBody::symmetric(2, &int(1)).unwrap();
        let half = Lambda::new(ratio(1, 2)).unwrap();
        assert!(matches!(
            round_with_cost(&g, &x11(), &BruteForceSsuf::default(), &body, &half, Strictness::Strict),
            Err(MetaError::NegativeCosts)
        ));
        let run = round_with_cost(
            &g,
            &x11(),
            &BruteForceSsuf::default(),
            &body,
            &Lambda::one(),
            Strictness::Strict,
        )
        .unwrap();
        assert!(run.certificate.output_cost <= run.certificate.input_cost);
    }

    #[test]
    fn infeasible_input() {
        let g = parallel_arcs(0, 1);
        let body = BoxErrorBody::symmetric(2, &int(1)).unwrap();
        let x = FractionalFlow::new(vec![int(1), int(0)]);
        assert!(matches!(
            round_with_cost(
                &g,
                &x,
                &BruteForceSsuf::default(),
                &body,
                &Lambda::one(),
                Strictness::Strict
            ),
            Err(MetaError::NotInPolytope)
        ));
    }

    #[test]
    fn fpra_failure_keeps_y_star() {
        // Radius 0 pins y* = x, which no pair of unit paths reproduces.
        let g = parallel_arcs(0, 0);
        let body = BoxErrorBody::symmetric(2, &int(0)).unwrap();
        let x = FractionalFlow::new(vec![ratio(3, 2), ratio(1, 2)]);
        let err = round_with_cost(
            &g,
            &x,
            &BruteForceSsuf::default(),
            &body,
            &Lambda::one(),
            Strictness::Strict,
        )
        .unwrap_err();
        match err {
            MetaError::Fpra { y_star, .. } => assert_eq!(y_star, vec![ratio(3, 2), ratio(1, 2)]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn greedy_out_of_body_strict_vs_report() {
        // y* = (2, 2, 1, 1); greedy moves a full unit off each arc of the
        // lower branch, twice the radius.
        let g = diamond(int(3));
        let x = FractionalFlow::new(vec![ratio(3, 2); 4]);
        let body = BoxErrorBody::symmetric(4, &ratio(1, 2)).unwrap();
        let strict = round_with_cost(&g, &x, &GreedyPathStrip, &body, &Lambda::one(), Strictness::Strict);
        let report = round_with_cost(&g, &x, &GreedyPathStrip, &body, &Lambda::one(), Strictness::Report);
        match (strict, report) {
            (Err(MetaError::CertificateViolation { failed, .. }), Ok(run)) => {
                assert!(failed.contains(&check_names::FPRA_IN_BODY.to_string()));
                assert_eq!(run.certificate.check(check_names::FPRA_IN_BODY), Some(false));
                assert!(run.fpra.declared_body.is_none());
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
