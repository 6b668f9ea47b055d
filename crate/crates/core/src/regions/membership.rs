use crate::polytope::{InequalitySystem, LinearInequality};
use crate::prob::{SideInfo, SourceSpec};
use crate::{Error, Result};

/// Interior-membership verdict against a caller-supplied region.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub feasible: bool,
    pub margin: f64,
    pub point: Vec<f64>,
    pub binding: Option<String>,
}

/// Interior test that ignores the bare `R ≥ 0` faces: entropy points on the
/// coordinate planes still count as interior of the rate region.
fn interior(region: &InequalitySystem, point: Vec<f64>, eps: f64) -> Result<Verdict> {
    let m = region.contains_where(&point, eps, |r: &LinearInequality| !r.is_nonnegativity())?;
    Ok(Verdict {
        feasible: m.inside,
        margin: m.min_margin,
        binding: m.binding.map(|i| region.rows()[i].label.clone()),
        point,
    })
}

/// Is `(H(U1|V1), H(U2|V2))` interior to the capacity region?
pub fn theorem1_check(src1: &SourceSpec, src2: &SourceSpec, capacity: &InequalitySystem, eps: f64) -> Result<Verdict> {
    if src1.wiring() != SideInfo::Desired || src2.wiring() != SideInfo::Desired {
        return Err(Error::Configuration("each receiver must hold its own source's side information".into()));
    }
    if capacity.dim() != 2 {
        return Err(Error::Input(format!("capacity region must be over 2 rates, got {}", capacity.dim())));
    }
    interior(capacity, vec![src1.h_u_given_v(), src2.h_u_given_v()], eps)
}

/// Is `(H(V1), H(U1|V1), H(V2), H(U2|V2))` interior to the region over
/// `(R1s, R1p, R2s, R2p)`?
pub fn theorem3_check(src1: &SourceSpec, src2: &SourceSpec, region: &InequalitySystem, eps: f64) -> Result<Verdict> {
    if src1.h().is_none() || src2.h().is_none() {
        return Err(Error::Configuration("both sources need deterministic maps h_k".into()));
    }
    if region.dim() != 4 {
        return Err(Error::Input(format!("region must be over 4 rates, got {}", region.dim())));
    }
    interior(region, vec![src1.h_v(), src1.h_u_given_v(), src2.h_v(), src2.h_u_given_v()], eps)
}
