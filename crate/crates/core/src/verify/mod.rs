//! Standalone re-verification of serialized runs.
//!
//! Everything is recomputed from primary data: the instance, the input
//! `x`, the output paths or choices, and the recorded `y*`. Numbers stored
//! in a certificate are only ever compared against recomputed values, never
//! used to decide a check. No solver or rounding algorithm is invoked;
//! ring verification re-runs the (deterministic) preprocessing.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::{Report, RingReport, SsufReport};
use crate::meta::{certify, RingRelaxation, RoundingCertificate, SsufRelaxation};
use crate::model::{
    induced_load, BoxErrorBody, FractionalFlow, RingFractionalSolution, RingInstance, RingUnsplittableSolution,
    UnsplittablePathFlow, WeightedSsufNetwork,
};
use crate::rational::{format, Lambda, Rational};
use crate::ring::{opposing_edges_hold, preprocess, two_sided_bound, RingCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{what} has length {found}, expected {expected}")]
    IndexMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationCheck {
    pub name: String,
    pub claimed: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<VerificationCheck>,
    pub verdict: Verdict,
}

impl VerificationReport {
    fn new(checks: Vec<VerificationCheck>) -> Self {
        let verdict = if checks.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        VerificationReport { checks, verdict }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }
}

fn show_vec(values: &[Rational]) -> String {
    let parts: Vec<String> = values.iter().map(format).collect();
    format!("[{}]", parts.join(", "))
}

fn show<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("values serialize")
}

#[derive(Default)]
struct Checks(Vec<VerificationCheck>);

impl Checks {
    fn push(&mut self, name: impl Into<String>, claimed: impl Into<String>, computed: impl Into<String>, pass: bool) {
        self.0.push(VerificationCheck {
            name: name.into(),
            claimed: claimed.into(),
            computed: computed.into(),
            pass,
        });
    }

    fn same_value(&mut self, name: impl Into<String>, claimed: &Rational, computed: &Rational) {
        self.push(name, format(claimed), format(computed), claimed == computed);
    }

    fn same_vec(&mut self, name: impl Into<String>, claimed: &[Rational], computed: &[Rational]) {
        self.push(name, show_vec(claimed), show_vec(computed), claimed == computed);
    }

    fn same<T: Serialize + PartialEq>(&mut self, name: impl Into<String>, claimed: &T, computed: &T) {
        self.push(name, show(claimed), show(computed), claimed == computed);
    }

    fn finish(self) -> VerificationReport {
        VerificationReport::new(self.0)
    }
}

fn lambda_of(value: &Rational) -> Result<Lambda, VerifyError> {
    Lambda::new(value.clone()).map_err(|e| VerifyError::Parse(e.to_string()))
}

fn expect_len(what: &str, expected: usize, found: usize) -> Result<(), VerifyError> {
    if expected != found {
        return Err(VerifyError::IndexMismatch {
            what: what.to_string(),
            expected,
            found,
        });
    }
    Ok(())
}

fn valid_body(body: &BoxErrorBody) -> Result<BoxErrorBody, VerifyError> {
    BoxErrorBody::new(body.lower().to_vec(), body.upper().to_vec()).map_err(|e| VerifyError::Parse(e.to_string()))
}

/// Compares a claimed meta certificate with one recomputed from primary
/// data, field by field, then requires every recomputed check to hold and
/// to agree with the claim.
fn compare_certificates(out: &mut Checks, prefix: &str, claimed: &RoundingCertificate, computed: &RoundingCertificate) {
    let name = |n: &str| format!("{prefix}{n}");
    out.same_value(name("lambda"), &claimed.lambda, &computed.lambda);
    out.same_vec(name("x"), &claimed.x, &computed.x);
    out.same_vec(name("z"), &claimed.z, &computed.z);
    out.same_value(name("input_cost"), &claimed.input_cost, &computed.input_cost);
    out.same_value(
        name("restricted_cost"),
        &claimed.restricted_cost,
        &computed.restricted_cost,
    );
    out.same_value(name("output_cost"), &claimed.output_cost, &computed.output_cost);
    out.same_vec(name("deviation"), &claimed.deviation, &computed.deviation);
    out.same(name("body_r"), &claimed.body_r, &computed.body_r);
    out.same(
        name("body_r_minus_lambda_r"),
        &claimed.body_r_minus_lambda_r,
        &computed.body_r_minus_lambda_r,
    );
    out.same(name("epsilon"), &claimed.epsilon, &computed.epsilon);
    out.same_vec(name("y_bar"), &claimed.y_bar, &computed.y_bar);
    out.same_vec(name("y_hat"), &claimed.y_hat, &computed.y_hat);
    for check in &computed.checks {
        let claim = claimed.check(&check.name);
        out.push(
            name(&check.name),
            claim.map_or("missing".to_string(), |b| b.to_string()),
            check.passed.to_string(),
            check.passed && claim == Some(true),
        );
    }
    let bound = &computed.input_cost / &computed.lambda;
    out.push(
        name("cost_ceiling"),
        format!("<= {}", format(&bound)),
        format(&computed.output_cost),
        computed.output_cost <= bound,
    );
}

/// Re-checks a flow run: `z` is recomputed from the paths and every
/// certificate claim is compared against a fresh evaluation.
pub fn verify_ssuf_run(
    network: &WeightedSsufNetwork,
    x: &FractionalFlow,
    paths: &UnsplittablePathFlow,
    certificate: &RoundingCertificate,
) -> Result<VerificationReport, VerifyError> {
    let lambda = lambda_of(&certificate.lambda)?;
    let arcs = network.arc_count();
    expect_len("x", arcs, x.values().len())?;
    expect_len("y_star", arcs, certificate.y_star.len())?;
    expect_len("paths", network.terminals().len(), paths.paths().len())?;
    expect_len("body_r", arcs, certificate.body_r.dim())?;
    let body = valid_body(&certificate.body_r)?;

    let mut out = Checks::default();
    let z = match induced_load(network, paths) {
        Ok(z) => {
            out.push("paths_valid", "true", "true", true);
            z
        }
        Err(e) => {
            out.push("paths_valid", "true", e.to_string(), false);
            return Ok(out.finish());
        }
    };
    let recomputed = certify(
        &SsufRelaxation(network),
        x.values(),
        &certificate.y_star,
        &z,
        &body,
        &lambda,
    );
    compare_certificates(&mut out, "", certificate, &recomputed);
    Ok(out.finish())
}

fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(p, q)| p + q).collect()
}

/// Re-checks a ring run on the original edges and, after re-running the
/// preprocessing, on the canonical form.
pub fn verify_ring_run(
    ring: &RingInstance,
    x: &RingFractionalSolution,
    solution: &RingUnsplittableSolution,
    certificate: &RingCertificate,
) -> Result<VerificationReport, VerifyError> {
    let lambda = lambda_of(&certificate.lambda)?;
    if certificate.alpha.is_negative() {
        return Err(VerifyError::Parse(format!(
            "alpha must be nonnegative, got {}",
            certificate.alpha
        )));
    }
    let k = ring.commodities().len();
    let m = ring.edge_count();
    expect_len("x", k, x.splits().len())?;
    expect_len("solution", k, solution.choices().len())?;
    expect_len("input_loads", m, certificate.input_loads.len())?;
    expect_len("output_loads", m, certificate.output_loads.len())?;

    let mut out = Checks::default();
    let l = lambda.value();
    let costs_ok = ring.has_nonnegative_costs();
    out.push("nonnegative_costs", "true", costs_ok.to_string(), costs_ok);

    let form = preprocess(ring, x).map_err(|e| VerifyError::Parse(e.to_string()))?;
    let d_max = ring.max_demand();
    let slack = &certificate.alpha * &d_max;
    let load_bound = (Rational::one() + l) * &slack;
    let input_loads = x.loads(ring).map_err(|e| VerifyError::Parse(e.to_string()))?;
    let preprocessed_loads = form
        .preprocessed
        .loads(ring)
        .map_err(|e| VerifyError::Parse(e.to_string()))?;
    let output_loads = solution.loads(ring).map_err(|e| VerifyError::Parse(e.to_string()))?;
    let input_cost = ring.cost_of(&input_loads);
    let output_cost = ring.cost_of(&output_loads);
    let margins: Vec<Rational> = input_loads
        .iter()
        .zip(&output_loads)
        .map(|(xe, le)| xe + &load_bound - le)
        .collect();

    out.same_value("d_max", &certificate.d_max, &d_max);
    out.same_value("load_bound", &certificate.load_bound, &load_bound);
    out.same_vec("input_loads", &certificate.input_loads, &input_loads);
    out.same_vec(
        "preprocessed_loads",
        &certificate.preprocessed_loads,
        &preprocessed_loads,
    );
    out.same_vec("output_loads", &certificate.output_loads, &output_loads);
    out.same_vec("load_margins", &certificate.load_margins, &margins);
    out.same_value("input_cost", &certificate.input_cost, &input_cost);
    out.same_value("output_cost", &certificate.output_cost, &output_cost);
    out.same_vec("preprocessed", &certificate.preprocessed, form.preprocessed.splits());
    out.same("fixed", &certificate.fixed, &form.fixed);
    out.same("shifts", &certificate.shifts, &form.shifts);
    out.same("commodity_map", &certificate.commodity_map, &form.commodity_map);
    out.same("flipped", &certificate.flipped, &form.flipped);
    out.same("node_map", &certificate.node_map, &form.node_map);
    out.same("edge_map", &certificate.edge_map, &form.edge_map);

    let cost_ceiling = &input_cost / l;
    out.push(
        "cost_bound",
        format!("<= {}", format(&cost_ceiling)),
        format(&output_cost),
        output_cost <= cost_ceiling,
    );
    let worst = margins.iter().min().cloned().unwrap_or_else(Rational::zero);
    out.push(
        "load_upper_bound",
        format!("load_e <= x_e + {}", format(&load_bound)),
        format!("smallest margin {}", format(&worst)),
        !worst.is_negative(),
    );
    let monotone = ring.cost_of(&preprocessed_loads) <= input_cost
        && preprocessed_loads.iter().zip(&input_loads).all(|(p, q)| p <= q);
    out.push("preprocessing_monotone", "true", monotone.to_string(), monotone);
    let keeps_fixed = form.fixed.iter().all(|f| solution.choices()[f.commodity] == f.choice);
    out.push("fixed_paths_kept", "true", keeps_fixed.to_string(), keeps_fixed);

    let fixed_loads = form.fixed_loads(ring);
    match &form.instance {
        None => {
            out.push(
                "canonical_certificate",
                if certificate.canonical.is_some() {
                    "present"
                } else {
                    "absent"
                },
                "absent",
                certificate.canonical.is_none(),
            );
            out.same("canonical_choices", &certificate.canonical_choices, &Vec::new());
            out.same_vec("output_decomposes", &output_loads, &fixed_loads);
        }
        Some(instance) => {
            let canonical = form.restrict(solution);
            out.same(
                "canonical_choices",
                &certificate.canonical_choices,
                &canonical.choices().to_vec(),
            );
            let Some(claimed) = &certificate.canonical else {
                out.push("canonical_certificate", "absent", "required", false);
                return Ok(out.finish());
            };
            expect_len("canonical.y_star", form.k_prime(), claimed.y_star.len())?;
            let body = BoxErrorBody::symmetric(instance.edge_count(), &slack)
                .map_err(|e| VerifyError::Parse(e.to_string()))?;
            let z_splits: Vec<Rational> = canonical.choices().iter().map(|c| c.as_split()).collect();
            let recomputed = certify(
                &RingRelaxation(instance),
                form.x_bar.splits(),
                &claimed.y_star,
                &z_splits,
                &body,
                &lambda,
            );
            compare_certificates(&mut out, "canonical.", claimed, &recomputed);

            let y_star = RingFractionalSolution::new(claimed.y_star.clone());
            let canonical_loads = canonical
                .loads(instance)
                .map_err(|e| VerifyError::Parse(e.to_string()))?;
            let mut opposing = opposing_edges_hold(instance, form.k_prime(), &canonical_loads);
            if let Ok(loads) = form.x_bar.loads(instance) {
                opposing &= opposing_edges_hold(instance, form.k_prime(), &loads);
            }
            match &y_star {
                Ok(y) => {
                    let loads = y.loads(instance).map_err(|e| VerifyError::Parse(e.to_string()))?;
                    opposing &= opposing_edges_hold(instance, form.k_prime(), &loads);
                    let two_sided = two_sided_bound(&form, y, &canonical, &certificate.alpha).ok();
                    out.same("two_sided", &certificate.two_sided, &two_sided);
                    out.push(
                        "two_sided_holds",
                        "true",
                        two_sided.is_some().to_string(),
                        two_sided.is_some(),
                    );
                }
                Err(e) => out.push("two_sided", "y* in [0, 1]", e.to_string(), false),
            }
            out.push("opposing_edges", "true", opposing.to_string(), opposing);
            let lifted = add(&fixed_loads, &form.pull_back(&canonical_loads));
            out.same_vec("output_decomposes", &output_loads, &lifted);
        }
    }
    let claims = certificate.passed();
    out.push(
        "certificate_claims",
        "all checks pass",
        certificate.failed().join(", "),
        claims,
    );
    Ok(out.finish())
}

fn parse_error(e: impl std::fmt::Display) -> VerifyError {
    VerifyError::Parse(e.to_string())
}

fn verify_ssuf_report(report: &SsufReport) -> Result<VerificationReport, VerifyError> {
    let network = report.instance.network().map_err(parse_error)?;
    let x = report
        .instance
        .fractional_flow()
        .ok_or_else(|| VerifyError::Parse("report instance lacks the fractional input".into()))?;
    let paths = UnsplittablePathFlow::new(report.paths.clone());
    let mut result = verify_ssuf_run(&network, &x, &paths, &report.certificate)?;
    let loads_match = induced_load(&network, &paths).is_ok_and(|z| z == report.loads);
    result.checks.push(VerificationCheck {
        name: "reported_loads".into(),
        claimed: show_vec(&report.loads),
        computed: loads_match.to_string(),
        pass: loads_match,
    });
    let declared_ok = report
        .fpra
        .declared_body
        .as_ref()
        .is_none_or(|b| *b == report.certificate.body_r);
    result.checks.push(VerificationCheck {
        name: "declared_body".into(),
        claimed: show(&report.fpra.declared_body),
        computed: show(&report.certificate.body_r),
        pass: declared_ok,
    });
    Ok(VerificationReport::new(result.checks))
}

fn verify_ring_report(report: &RingReport) -> Result<VerificationReport, VerifyError> {
    let ring = report.instance.ring().map_err(parse_error)?;
    let x = report
        .instance
        .fractional_splits()
        .map_err(parse_error)?
        .ok_or_else(|| VerifyError::Parse("report instance lacks the fractional input".into()))?;
    let solution = RingUnsplittableSolution::new(report.solution.clone());
    verify_ring_run(&ring, &x, &solution, &report.certificate)
}

/// Verifies a parsed report of either kind.
pub fn verify_report(report: &Report) -> Result<VerificationReport, VerifyError> {
    match report {
        Report::Ssuf(r) => verify_ssuf_report(r),
        Report::Ring(r) => verify_ring_report(r),
    }
}

/// Parses and verifies report text.
pub fn verify_report_text(text: &str) -> Result<VerificationReport, VerifyError> {
    let report = Report::parse(text).map_err(parse_error)?;
    verify_report(&report)
}
