//! Margins of the reliability conditions and rate regions as inequality systems.
//!
//! A margin is `RHS − LHS` in bits; a condition holds strictly when its margin
//! exceeds the caller's `eps`.

mod membership;
mod scheme;
mod theorem2;
mod zchannel;

pub use membership::{theorem1_check, theorem3_check, Verdict};
pub use scheme::{AuxScheme, AuxSchemeSep, Lemma1Scheme, ZScheme};
pub use theorem2::{
    appendix_b_system, corollary1_margins, corollary1_terms, theorem2_margins, theorem2_system, theorem2_terms,
    verify_fm_projection, Corollary1Terms, FmCheck, Theorem2Terms, COROLLARY1_LABELS, COROLLARY1_TO_THEOREM2,
    THEOREM2_LABELS,
};
pub use zchannel::{
    appendix_e_region, check_condition1, compute_tau, corollary2_margins, lemma1_inner_bound_n1, lemma2_as_ci_region,
    lemma2_region, z_terms, zchannel_degraded_region, Condition1Report, TauResult, ZTerms, COROLLARY2_LABELS,
};

/// Default strictness for "<" conditions.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Ordered named margins with a feasibility verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionReport {
    pub margins: Vec<(String, f64)>,
    pub feasible: bool,
    pub eps: f64,
}

impl RegionReport {
    pub fn new(margins: Vec<(String, f64)>, eps: f64) -> Self {
        let feasible = margins.iter().all(|(_, m)| *m > eps);
        Self { margins, feasible, eps }
    }

    pub fn values(&self) -> Vec<f64> {
        self.margins.iter().map(|(_, m)| *m).collect()
    }

    /// Smallest margin; `+∞` when there are none.
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().map(|(_, m)| *m).fold(f64::INFINITY, f64::min)
    }

    /// Label of the first condition attaining the minimum margin.
    pub fn binding(&self) -> Option<&str> {
        let min = self.min_margin();
        self.margins.iter().find(|(_, m)| *m == min).map(|(l, _)| l.as_str())
    }

    pub fn margin(&self, label: &str) -> Option<f64> {
        self.margins.iter().find(|(l, _)| l == label).map(|(_, m)| *m)
    }
}
