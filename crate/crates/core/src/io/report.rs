use serde::{Deserialize, Serialize};

use super::{IoError, RingDocument, SsufDocument};
use crate::fpra::FpraDescriptor;
use crate::meta::{RoundingCertificate, SsufRun};
use crate::model::{ArcId, FractionalFlow, PathChoice, RingFractionalSolution, RingInstance, WeightedSsufNetwork};
use crate::rational::{serde_rational_vec, Rational};
use crate::ring::{RingCertificate, RingRun};
use crate::verify::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsufReport {
    /// The instance with `fractional` set to the input `x`.
    pub instance: SsufDocument,
    pub paths: Vec<Vec<ArcId>>,
    #[serde(with = "serde_rational_vec")]
    pub loads: Vec<Rational>,
    pub fpra: FpraDescriptor,
    pub certificate: RoundingCertificate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingReport {
    /// The instance with `fractional` set to the input splits.
    pub instance: RingDocument,
    pub solution: Vec<PathChoice>,
    pub certificate: RingCertificate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
#[allow(clippy::large_enum_variant)]
pub enum Report {
    Ssuf(SsufReport),
    Ring(RingReport),
}

impl Report {
    pub fn from_ssuf_run(network: &WeightedSsufNetwork, x: &FractionalFlow, run: &SsufRun) -> Self {
        Report::Ssuf(SsufReport {
            instance: SsufDocument::from_network(network, Some(x)),
            paths: run.paths.paths().to_vec(),
            loads: run.z.clone(),
            fpra: run.fpra.clone(),
            certificate: run.certificate.clone(),
            verification: None,
        })
    }

    pub fn from_ring_run(ring: &RingInstance, x: &RingFractionalSolution, run: &RingRun) -> Self {
        Report::Ring(RingReport {
            instance: RingDocument::from_ring(ring, Some(x)),
            solution: run.solution.choices().to_vec(),
            certificate: run.certificate.clone(),
            verification: None,
        })
    }

    pub fn verification(&self) -> Option<&VerificationReport> {
        match self {
            Report::Ssuf(r) => r.verification.as_ref(),
            Report::Ring(r) => r.verification.as_ref(),
        }
    }

    pub fn set_verification(&mut self, report: VerificationReport) {
        match self {
            Report::Ssuf(r) => r.verification = Some(report),
            Report::Ring(r) => r.verification = Some(report),
        }
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_text(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }
}
