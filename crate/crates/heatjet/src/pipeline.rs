//! The end-to-end computation shared by the command line and the C ABI.

use crate::error::Result;
use crate::heatcoeff::{difference_operator, ev_sharp_table, heat_jets_from_table};
use crate::io::{heat_jets_to_docs, Problem, ResultDoc, VerificationDoc, VerifyLevel};
use crate::jet_algebra::Degree;
use crate::laplacian::hat_coefficients;
use crate::verify::run_verification;

/// Computes the heat coefficient jets for a validated problem and assembles
/// the output document, including the optional Jacobian-divided coefficients
/// and the verification report the problem's options ask for.
pub fn compute_result(problem: &Problem, input_sha256: String) -> Result<ResultDoc> {
    let order = problem.bounds.difference_order;
    let d = difference_operator(&problem.operator, order, Degree::at(0))?;
    let table = ev_sharp_table(&d)?;
    let jets = heat_jets_from_table(&table, problem.max_k, problem.max_degree)?;

    let hat = if problem.options.hat_coefficients {
        Some(heat_jets_to_docs(&hat_coefficients(&jets, &problem.metric)?))
    } else {
        None
    };

    let level = problem.options.verify_level;
    let verification = if level == VerifyLevel::None {
        None
    } else {
        let checks = run_verification(problem, &jets, Some(&table), level);
        Some(VerificationDoc {
            level,
            passed: checks.iter().all(|c| c.passed),
            checks,
        })
    };

    Ok(ResultDoc {
        version: env!("CARGO_PKG_VERSION").to_string(),
        input_sha256,
        dimension: problem.dimension,
        rank: problem.rank,
        max_k: problem.max_k,
        max_degree: problem.max_degree,
        bounds: problem.bounds,
        four_pi_prefactor: problem.options.reinstate_4pi,
        coefficients: heat_jets_to_docs(&jets),
        hat_coefficients: hat,
        verification,
    })
}
