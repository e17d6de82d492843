//! Cost accounting for a verification session.
//!
//! hcost counts PROOF_SECTION payload bits only (the annotation proper;
//! headers, updates, and framing are not help). vcost counts the verifier's
//! peak stored field elements: the sketch state alone for the transiently
//! checked triangle/4-cycle proofs, plus the explicitly stored proof parts
//! (M, U*, L, trees; one element per stored id) for matching.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CostReport {
    pub hcost_bits: u64,
    pub vcost_field_elements: u64,
    pub err_estimate: Option<f64>,
    pub per_update_muls: f64,
}

impl CostReport {
    pub fn new(hcost_bits: u64, vcost_field_elements: u64, per_update_muls: f64) -> CostReport {
        CostReport {
            hcost_bits,
            vcost_field_elements,
            err_estimate: None,
            per_update_muls,
        }
    }
}
