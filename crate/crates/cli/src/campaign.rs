//! Randomized comparison of the exact solvers against vertex enumeration,
//! plus end-to-end pipeline and reduction checks on the same seeds.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use unsplit_core::fpra::{confirm_counterexample, BruteForceRing, BruteForceSsuf, FpraError, Strictness};
use unsplit_core::generate::{random_ring, random_ssuf, RingParams, SsufParams};
use unsplit_core::io::{InstanceDocument, Report, RingDocument, SsufDocument};
use unsplit_core::meta::{round_with_cost, MetaError};
use unsplit_core::model::{BoxErrorBody, PathChoice};
use unsplit_core::rational::{format, int, ratio};
use unsplit_core::ring::{nonuniform_to_uniform, ring_round_with_cost, strip_artificials, RingRunConfig};
use unsplit_core::solvers::{
    lp_oracle_enumerate, min_cost_flow_bounded, restricted_bounds, ring_lp, ring_objective_offset,
    ring_restricted_min_cost, simplex_solve, ssuf_lp, ArcBounds, SolverError,
};
use unsplit_core::verify::verify_report;
use unsplit_core::{Lambda, Rational};

pub const CHECKS: [&str; 5] = [
    "flow_oracle",
    "ring_oracle",
    "ssuf_round",
    "ring_round",
    "uniform_round_trip",
];

#[derive(Debug, Clone, Copy)]
pub struct CampaignConfig {
    pub instances: u64,
    pub seed: u64,
    /// Shifts every solver objective by one so that the comparison must fail.
    pub inject_fault: bool,
}

struct Disagreement {
    check: &'static str,
    detail: String,
    instance: Value,
}

/// Outcome of one check: a tally label, or a disagreement.
type CheckResult = Result<&'static str, Disagreement>;

fn fail(check: &'static str, detail: impl Into<String>, instance: InstanceDocument) -> Disagreement {
    Disagreement {
        check,
        detail: detail.into(),
        instance: serde_json::to_value(instance).expect("instances serialize"),
    }
}

fn show(value: Option<&Rational>) -> String {
    value.map_or_else(|| "infeasible".to_string(), format)
}

fn lambda_from(t: u64, steps: i64) -> Lambda {
    Lambda::new(ratio(1 + (t % steps as u64) as i64, steps)).expect("in (0, 1]")
}

fn flow_oracle(t: u64, fault: &Rational) -> CheckResult {
    let nodes = 2 + (t % 3) as usize;
    let params = SsufParams {
        nodes,
        arcs: nodes - 1 + (t / 3 % 3) as usize,
        terminals: (t % nodes.min(3) as u64) as usize,
        ..Default::default()
    };
    let (g, x) = random_ssuf(t, &params).expect("parameters are satisfiable");
    let doc = || InstanceDocument::Ssuf(SsufDocument::from_network(&g, Some(&x)));
    let radius = ratio((t % 7) as i64, 2);
    let body = BoxErrorBody::symmetric(g.arc_count(), &radius).expect("nonnegative radius");
    let mut bounds = restricted_bounds(x.values(), &body, &lambda_from(t, 4)).expect("matching dimensions");
    if t % 4 == 3 {
        let mut upper = bounds.upper().to_vec();
        let a = (t / 4) as usize % upper.len();
        upper[a] = bounds.lower()[a].clone();
        bounds = ArcBounds::new(bounds.lower().to_vec(), upper).expect("lower ≤ upper");
    }
    let solver = match min_cost_flow_bounded(&g, &bounds) {
        Ok(opt) => Some(opt.objective + fault),
        Err(SolverError::Infeasible) => None,
        Err(e) => return Err(fail("flow_oracle", e.to_string(), doc())),
    };
    let oracle = lp_oracle_enumerate(&ssuf_lp(&g, &bounds)).map_err(|e| fail("flow_oracle", e.to_string(), doc()))?;
    if solver.as_ref() != oracle.objective() {
        return Err(fail(
            "flow_oracle",
            format!(
                "solver {} vs enumeration {}",
                show(solver.as_ref()),
                show(oracle.objective())
            ),
            doc(),
        ));
    }
    Ok(if solver.is_some() { "agree" } else { "agree_infeasible" })
}

fn ring_oracle(t: u64, fault: &Rational) -> CheckResult {
    let params = RingParams {
        nodes: 3 + (t % 3) as usize,
        commodities: 1 + (t / 3 % 4) as usize,
        ..Default::default()
    };
    let (r, x) = random_ring(t, &params).expect("parameters are satisfiable");
    let doc = || InstanceDocument::Ring(RingDocument::from_ring(&r, Some(&x)));
    let radius = ratio((t % 9) as i64, 2);
    let body = BoxErrorBody::symmetric(r.edge_count(), &radius).expect("nonnegative radius");
    let err = |e: SolverError| fail("ring_oracle", e.to_string(), doc());
    let lp = ring_lp(&r, &x, &body, &lambda_from(t, 4)).map_err(err)?;
    let solver = simplex_solve(&lp).map_err(err)?.objective().map(|o| o + fault);
    let oracle = lp_oracle_enumerate(&lp).map_err(err)?;
    if solver.as_ref() != oracle.objective() {
        return Err(fail(
            "ring_oracle",
            format!(
                "simplex {} vs enumeration {}",
                show(solver.as_ref()),
                show(oracle.objective())
            ),
            doc(),
        ));
    }
    // x itself is feasible, so the restricted problem always has an optimum.
    let full = ring_restricted_min_cost(&r, &x, &body, &lambda_from(t, 4)).map_err(err)?;
    let offset = ring_objective_offset(&r);
    if oracle.objective().map(|o| o + &offset).as_ref() != Some(&full.objective) {
        return Err(fail(
            "ring_oracle",
            format!(
                "full objective {} vs enumeration {} + {}",
                format(&full.objective),
                show(oracle.objective()),
                format(&offset)
            ),
            doc(),
        ));
    }
    Ok("agree")
}

fn ssuf_round(t: u64) -> CheckResult {
    let (g, x) = random_ssuf(t, &SsufParams::default()).expect("parameters are satisfiable");
    let doc = || InstanceDocument::Ssuf(SsufDocument::from_network(&g, Some(&x)));
    let body = BoxErrorBody::symmetric(g.arc_count(), &g.max_demand()).expect("nonnegative radius");
    let lambda = [
        Lambda::one(),
        Lambda::new(ratio(1, 2)).unwrap(),
        Lambda::new(ratio(1, 4)).unwrap(),
    ][(t % 3) as usize]
        .clone();
    match round_with_cost(&g, &x, &BruteForceSsuf::default(), &body, &lambda, Strictness::Strict) {
        Ok(run) => {
            let report = Report::from_ssuf_run(&g, &x, &run);
            match verify_report(&report) {
                Ok(v) if v.passed() => Ok("certified"),
                Ok(v) => Err(fail(
                    "ssuf_round",
                    format!("verification failed: {}", v.failed().join(", ")),
                    doc(),
                )),
                Err(e) => Err(fail("ssuf_round", e.to_string(), doc())),
            }
        }
        Err(MetaError::Fpra {
            source: FpraError::NoSolutionInBody(cex),
            ..
        }) => {
            let detail = if confirm_counterexample(&g, &cex) {
                "confirmed counterexample: no unsplittable flow in the support fits the body"
            } else {
                "unconfirmed counterexample"
            };
            Err(fail("ssuf_round", detail, doc()))
        }
        Err(e) => Err(fail("ssuf_round", e.to_string(), doc())),
    }
}

fn ring_round(t: u64) -> CheckResult {
    let (r, x) = random_ring(t, &RingParams::default()).expect("parameters are satisfiable");
    let doc = || InstanceDocument::Ring(RingDocument::from_ring(&r, Some(&x)));
    let config = RingRunConfig {
        lambda: lambda_from(t, 2),
        ..Default::default()
    };
    let run = ring_round_with_cost(&r, &x, &BruteForceRing::default(), &config)
        .map_err(|e| fail("ring_round", e.to_string(), doc()))?;
    let report = Report::from_ring_run(&r, &x, &run);
    match verify_report(&report) {
        Ok(v) if v.passed() => Ok("certified"),
        Ok(v) => Err(fail(
            "ring_round",
            format!("verification failed: {}", v.failed().join(", ")),
            doc(),
        )),
        Err(e) => Err(fail("ring_round", e.to_string(), doc())),
    }
}

fn uniform_round_trip(t: u64) -> CheckResult {
    let params = RingParams {
        commodities: 1 + (t % 4) as usize,
        max_capacity: Some(8),
        ..Default::default()
    };
    let (r, _) = random_ring(t, &params).expect("parameters are satisfiable");
    let doc = || InstanceDocument::Ring(RingDocument::from_ring(&r, None));
    let reduction = nonuniform_to_uniform(&r).map_err(|e| fail("uniform_round_trip", e.to_string(), doc()))?;
    let k = r.commodities().len();
    for mask in 0u32..(1 << k) {
        let choices: Vec<PathChoice> = (0..k)
            .map(|i| {
                if mask >> i & 1 == 0 {
                    PathChoice::First
                } else {
                    PathChoice::Second
                }
            })
            .collect();
        let stripped = strip_artificials(&reduction, &reduction.embed(&choices))
            .map_err(|e| fail("uniform_round_trip", e.to_string(), doc()))?;
        if stripped.solution.choices() != choices.as_slice()
            || stripped.original_violation != stripped.uniform_violation
            || !stripped.holds
        {
            return Err(fail(
                "uniform_round_trip",
                format!("embedding {mask:b} does not round-trip"),
                doc(),
            ));
        }
    }
    Ok("agree")
}

fn run_instance(t: u64, fault: &Rational) -> Vec<(&'static str, CheckResult)> {
    vec![
        ("flow_oracle", flow_oracle(t, fault)),
        ("ring_oracle", ring_oracle(t, fault)),
        ("ssuf_round", ssuf_round(t)),
        ("ring_round", ring_round(t)),
        ("uniform_round_trip", uniform_round_trip(t)),
    ]
}

/// Maps `f` over `0..count` on all available cores, keeping index order.
fn parallel_map<T: Send>(count: u64, f: impl Fn(u64) -> T + Sync) -> Vec<T> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()) as u64;
    let chunk = count.div_ceil(threads).max(1);
    std::thread::scope(|scope| {
        let f = &f;
        let handles: Vec<_> = (0..count)
            .step_by(chunk as usize)
            .map(|start| scope.spawn(move || (start..(start + chunk).min(count)).map(f).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("campaign worker panicked"))
            .collect()
    })
}

/// Runs the campaign and returns the summary and whether every check agreed.
pub fn run(config: &CampaignConfig) -> (Value, bool) {
    let fault = if config.inject_fault { int(1) } else { int(0) };
    let results = parallel_map(config.instances, |i| run_instance(config.seed.wrapping_add(i), &fault));
    let mut tallies: BTreeMap<&str, BTreeMap<&str, u64>> = CHECKS.iter().map(|c| (*c, BTreeMap::new())).collect();
    let mut disagreements = Vec::new();
    for (i, checks) in results.into_iter().enumerate() {
        for (name, result) in checks {
            let label = match result {
                Ok(label) => label,
                Err(d) => {
                    disagreements.push(json!({
                        "index": i,
                        "seed": config.seed.wrapping_add(i as u64),
                        "check": d.check,
                        "detail": d.detail,
                        "instance": d.instance,
                    }));
                    "disagree"
                }
            };
            *tallies.get_mut(name).expect("known check").entry(label).or_default() += 1;
        }
    }
    let table: Vec<Value> = CHECKS
        .iter()
        .map(|c| {
            let mut row = json!({ "check": c, "disagree": 0 });
            for (label, count) in &tallies[c] {
                row[*label] = json!(count);
            }
            row
        })
        .collect();
    let ok = disagreements.is_empty();
    let summary = json!({
        "instances": config.instances,
        "seed": config.seed,
        "inject_fault": config.inject_fault,
        "checks": table,
        "disagreements": disagreements,
        "verdict": if ok { "pass" } else { "fail" },
    });
    (summary, ok)
}
