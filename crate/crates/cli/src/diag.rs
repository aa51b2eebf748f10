use std::process::ExitCode;

use serde_json::{json, Value};

use unsplit_core::fpra::FpraError;
use unsplit_core::io::IoError;
use unsplit_core::meta::MetaError;
use unsplit_core::rational::format;
use unsplit_core::verify::VerifyError;

pub const OK: u8 = 0;
pub const FAILED: u8 = 1;
pub const INPUT: u8 = 2;
pub const CAP: u8 = 3;

/// A structured diagnostic, printed to stderr as JSON.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub body: Value,
}

impl Failure {
    pub fn new(code: u8, kind: &str, message: impl Into<String>) -> Self {
        Failure {
            code,
            body: json!({ "error": kind, "message": message.into() }),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Failure::new(INPUT, "input", message)
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.body[key] = value;
        self
    }

    pub fn emit(&self) -> ExitCode {
        let text = serde_json::to_string_pretty(&self.body).expect("diagnostics serialize");
        eprintln!("{text}");
        ExitCode::from(self.code)
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        Failure::input(e.to_string())
    }
}

fn fpra_failure(source: &FpraError, y_star: &[unsplit_core::Rational]) -> Failure {
    let y: Vec<String> = y_star.iter().map(format).collect();
    let message = source.to_string();
    match source {
        FpraError::TooLarge { size, cap } => Failure::new(CAP, "too_large", message)
            .with("size", json!(size.to_string()))
            .with("cap", json!(cap.to_string())),
        FpraError::NoSolutionInBody(cex) => Failure::new(FAILED, "no_solution_in_body", message)
            .with("y_star", json!(y))
            .with(
                "counterexample",
                serde_json::to_value(cex).expect("counterexamples serialize"),
            ),
        FpraError::NoRingSolutionInBody(cex) => Failure::new(FAILED, "no_solution_in_body", message)
            .with("y_star", json!(y))
            .with(
                "counterexample",
                serde_json::to_value(cex).expect("counterexamples serialize"),
            ),
        FpraError::CyclicSupport(_) | FpraError::NoPath(_) | FpraError::Model(_) => {
            Failure::new(INPUT, "fpra_input", message).with("y_star", json!(y))
        }
        FpraError::Reduction(_) => Failure::new(FAILED, "fpra", message).with("y_star", json!(y)),
    }
}

impl From<MetaError> for Failure {
    fn from(e: MetaError) -> Self {
        let message = e.to_string();
        match e {
            MetaError::NegativeCosts | MetaError::NegativeRingCosts => Failure::new(INPUT, "negative_costs", message),
            MetaError::NegativeAlpha => Failure::new(INPUT, "negative_alpha", message),
            MetaError::NotInPolytope => Failure::new(INPUT, "not_in_polytope", message),
            MetaError::CyclicSupport(arcs) => Failure::new(INPUT, "cyclic_support", message).with("arcs", json!(arcs)),
            MetaError::Model(_) => Failure::new(INPUT, "model", message),
            MetaError::Ring(_) => Failure::new(INPUT, "ring", message),
            MetaError::FaceViolation { coordinate } => {
                Failure::new(FAILED, "face_violation", message).with("coordinate", json!(coordinate))
            }
            MetaError::Solver(_) => Failure::new(FAILED, "solver", message),
            MetaError::Fpra { source, y_star } => fpra_failure(&source, &y_star),
            MetaError::CertificateViolation { failed, certificate } => {
                Failure::new(FAILED, "certificate_violation", message)
                    .with("failed", json!(failed))
                    .with("certificate", *certificate)
            }
        }
    }
}
