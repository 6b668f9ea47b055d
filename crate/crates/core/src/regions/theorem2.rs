use crate::polytope::InequalitySystem;
use crate::prob::{assemble_joint_corollary1, assemble_joint_theorem2, names::*, ChannelSpec, SideInfo, SourceSpec};
use crate::regions::{AuxScheme, AuxSchemeSep, RegionReport};
use crate::{Error, Result};

pub const THEOREM2_LABELS: [&str; 11] = [
    "H(U1) < I(X1;V2,Y1|W2,Q)",
    "H(U2) < I(X2;V1,Y2|W1,Q)",
    "H(U1) < I(W2,X1;V2,Y1|Q) - I(U2;W2|Q)",
    "H(U2) < I(W1,X2;V1,Y2|Q) - I(U1;W1|Q)",
    "H(U1)+H(U2) < I(X1;V2,Y1|W1,W2,Q) + I(W1,X2;V1,Y2|Q)",
    "H(U1)+H(U2) < I(X2;V1,Y2|W1,W2,Q) + I(W2,X1;V2,Y1|Q)",
    "H(U1)+H(U2) < I(W1,X2;V1,Y2|W2,Q) + I(W2,X1;V2,Y1|W1,Q)",
    "H(U1)+H(U2) < I(W2,X1;V2,Y1|Q) + I(W1,X2;V1,Y2|W2,Q) - I(U1;W1|Q)",
    "H(U1)+H(U2) < I(W1,X2;V1,Y2|Q) + I(W2,X1;V2,Y1|W1,Q) - I(U2;W2|Q)",
    "2H(U1)+H(U2) < I(W2,X1;V2,Y1|Q) + I(X1;V2,Y1|W1,W2,Q) + I(W1,X2;V1,Y2|W2,Q)",
    "H(U1)+2H(U2) < I(W1,X2;V1,Y2|Q) + I(X2;V1,Y2|W1,W2,Q) + I(W2,X1;V2,Y1|W1,Q)",
];

pub const COROLLARY1_LABELS: [&str; 11] = [
    "H(U1) < I(X1;Y1|WT2,Q)",
    "H(U1) + I(WB2;U2|V2,Q) < I(X1,WT2;Y1|Q)",
    "H(U2) < I(X2;Y2|WT1,Q)",
    "H(U2) + I(WB1;U1|V1,Q) < I(X2,WT1;Y2|Q)",
    "H(U1)+H(U2) - I(WB1;V1|Q) < I(X1;Y1|WT1,WT2,Q) + I(WT1,X2;Y2|Q)",
    "H(U1)+H(U2) - I(WB2;V2|Q) < I(X2;Y2|WT1,WT2,Q) + I(WT2,X1;Y1|Q)",
    "H(U1)+H(U2) - I(WB1;V1|Q) - I(WB2;V2|Q) < I(WT1,X2;Y2|WT2,Q) + I(WT2,X1;Y1|WT1,Q)",
    "H(U1)+H(U2) + I(WB1;U1|V1,Q) - I(WB2;V2|Q) < I(WT2,X1;Y1|Q) + I(WT1,X2;Y2|WT2,Q)",
    "H(U1)+H(U2) + I(WB2;U2|V2,Q) - I(WB1;V1|Q) < I(WT1,X2;Y2|Q) + I(WT2,X1;Y1|WT1,Q)",
    "2H(U1)+H(U2) - I(WB1;V1|Q) - I(WB2;V2|Q) < I(WT2,X1;Y1|Q) + I(X1;Y1|WT1,WT2,Q) + I(WT1,X2;Y2|WT2,Q)",
    "H(U1)+2H(U2) - I(WB1;V1|Q) - I(WB2;V2|Q) < I(WT1,X2;Y2|Q) + I(X2;Y2|WT1,WT2,Q) + I(WT2,X1;Y1|WT1,Q)",
];

/// Position in the Theorem-2 list of each Corollary-1 condition.
pub const COROLLARY1_TO_THEOREM2: [usize; 11] = [0, 2, 1, 3, 4, 5, 6, 7, 8, 9, 10];

/// Information terms of the Theorem-2 conditions on the assembled joint.
///
/// Naming: `a1 = I(X1;V2,Y1|W2,Q)`, `b1 = I(X1;V2,Y1|W1,W2,Q)`,
/// `c1 = I(W2,X1;V2,Y1|Q)`, `d1 = I(W2,X1;V2,Y1|W1,Q)`, `e1 = I(U1;W1|Q)`,
/// and symmetrically for user 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem2Terms {
    pub h_u1: f64,
    pub h_u2: f64,
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub d1: f64,
    pub e1: f64,
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
    pub d2: f64,
    pub e2: f64,
}

fn require_interfering(src1: &SourceSpec, src2: &SourceSpec) -> Result<()> {
    if src1.wiring() != SideInfo::Interfering || src2.wiring() != SideInfo::Interfering {
        return Err(Error::Configuration("conditions require interfering side information (V2 at receiver 1, V1 at receiver 2)".into()));
    }
    Ok(())
}

pub fn theorem2_terms(src1: &SourceSpec, src2: &SourceSpec, ch: &ChannelSpec, aux: &AuxScheme) -> Result<Theorem2Terms> {
    require_interfering(src1, src2)?;
    let joint = assemble_joint_theorem2(src1, src2, ch, aux)?;
    let i = joint.info();
    Ok(Theorem2Terms {
        h_u1: i.entropy(&[U1])?,
        h_u2: i.entropy(&[U2])?,
        a1: i.mi(&[X1], &[V2, Y1], &[W2, Q])?,
        b1: i.mi(&[X1], &[V2, Y1], &[W1, W2, Q])?,
        c1: i.mi(&[W2, X1], &[V2, Y1], &[Q])?,
        d1: i.mi(&[W2, X1], &[V2, Y1], &[W1, Q])?,
        e1: i.mi(&[U1], &[W1], &[Q])?,
        a2: i.mi(&[X2], &[V1, Y2], &[W1, Q])?,
        b2: i.mi(&[X2], &[V1, Y2], &[W1, W2, Q])?,
        c2: i.mi(&[W1, X2], &[V1, Y2], &[Q])?,
        d2: i.mi(&[W1, X2], &[V1, Y2], &[W2, Q])?,
        e2: i.mi(&[U2], &[W2], &[Q])?,
    })
}

impl Theorem2Terms {
    /// Right-hand sides of the eleven conditions and their `(HU1, HU2)` weights.
    pub fn rows(&self) -> [([f64; 2], f64); 11] {
        let t = self;
        [
            ([1.0, 0.0], t.a1),
            ([0.0, 1.0], t.a2),
            ([1.0, 0.0], t.c1 - t.e2),
            ([0.0, 1.0], t.c2 - t.e1),
            ([1.0, 1.0], t.b1 + t.c2),
            ([1.0, 1.0], t.b2 + t.c1),
            ([1.0, 1.0], t.d2 + t.d1),
            ([1.0, 1.0], t.c1 + t.d2 - t.e1),
            ([1.0, 1.0], t.c2 + t.d1 - t.e2),
            ([2.0, 1.0], t.c1 + t.b1 + t.d2),
            ([1.0, 2.0], t.c2 + t.b2 + t.d1),
        ]
    }

    pub fn margins(&self, eps: f64) -> RegionReport {
        let margins = self
            .rows()
            .iter()
            .zip(THEOREM2_LABELS)
            .map(|(([w1, w2], rhs), l)| (l.to_string(), rhs - (w1 * self.h_u1 + w2 * self.h_u2)))
            .collect();
        RegionReport::new(margins, eps)
    }

    /// The eleven conditions as a system over `(HU1, HU2)`.
    pub fn system(&self) -> InequalitySystem {
        let mut s = InequalitySystem::new(&["HU1", "HU2"]);
        for (([w1, w2], rhs), l) in self.rows().iter().zip(THEOREM2_LABELS) {
            s.push(vec![*w1, *w2], *rhs, l).expect("two coefficients");
        }
        s
    }

    /// Pre-elimination system over `(HU1, HU2, logL1, logL2)`.
    pub fn appendix_b_system(&self) -> InequalitySystem {
        let t = self;
        let mut s = InequalitySystem::new(&["HU1", "HU2", "logL1", "logL2"]);
        let rows: [([f64; 4], f64, &str); 10] = [
            ([1.0, 0.0, 0.0, 0.0], t.a1, "HU1 <= I(X1;V2,Y1|W2,Q)"),
            ([1.0, 0.0, -1.0, 0.0], t.b1, "HU1 - logL1 <= I(X1;V2,Y1|W1,W2,Q)"),
            ([1.0, 0.0, 0.0, 1.0], t.c1, "HU1 + logL2 <= I(W2,X1;V2,Y1|Q)"),
            ([1.0, 0.0, -1.0, 1.0], t.d1, "HU1 + logL2 - logL1 <= I(W2,X1;V2,Y1|W1,Q)"),
            ([0.0, 1.0, 0.0, 0.0], t.a2, "HU2 <= I(X2;V1,Y2|W1,Q)"),
            ([0.0, 1.0, 0.0, -1.0], t.b2, "HU2 - logL2 <= I(X2;V1,Y2|W1,W2,Q)"),
            ([0.0, 1.0, 1.0, 0.0], t.c2, "HU2 + logL1 <= I(W1,X2;V1,Y2|Q)"),
            ([0.0, 1.0, 1.0, -1.0], t.d2, "HU2 + logL1 - logL2 <= I(W1,X2;V1,Y2|W2,Q)"),
            ([0.0, 0.0, -1.0, 0.0], -t.e1, "logL1 >= I(U1;W1|Q)"),
            ([0.0, 0.0, 0.0, -1.0], -t.e2, "logL2 >= I(U2;W2|Q)"),
        ];
        for (c, b, l) in rows {
            s.push(c.to_vec(), b, l).expect("four coefficients");
        }
        s
    }

    /// Box edge large enough to contain every vertex of either system.
    pub fn box_edge(&self) -> f64 {
        let t = self;
        1.0 + [t.a1, t.b1, t.c1, t.d1, t.e1, t.a2, t.b2, t.c2, t.d2, t.e2].iter().map(|x| x.abs()).sum::<f64>() * 2.0
    }
}

pub fn theorem2_margins(src1: &SourceSpec, src2: &SourceSpec, ch: &ChannelSpec, aux: &AuxScheme, eps: f64) -> Result<RegionReport> {
    Ok(theorem2_terms(src1, src2, ch, aux)?.margins(eps))
}

pub fn theorem2_system(src1: &SourceSpec, src2: &SourceSpec, ch: &ChannelSpec, aux: &AuxScheme) -> Result<InequalitySystem> {
    Ok(theorem2_terms(src1, src2, ch, aux)?.system())
}

pub fn appendix_b_system(src1: &SourceSpec, src2: &SourceSpec, ch: &ChannelSpec, aux: &AuxScheme) -> Result<InequalitySystem> {
    Ok(theorem2_terms(src1, src2, ch, aux)?.appendix_b_system())
}

/// Outcome of comparing the projected pre-elimination system with the
/// eleven-condition system.
#[derive(Debug, Clone, PartialEq)]
pub struct FmCheck {
    pub equal: bool,
    pub projected: InequalitySystem,
    pub direct: InequalitySystem,
}

/// Eliminates `logL1`, `logL2` from `pre` and compares with `direct` on the
/// nonnegative quadrant, both clipped to a common box.
pub fn verify_fm_projection(pre: &InequalitySystem, direct: &InequalitySystem, edge: f64, tol: f64) -> Result<FmCheck> {
    let mut projected = pre.fm_eliminate_all(&["logL1", "logL2"])?;
    let mut direct = direct.clone();
    for s in [&mut projected, &mut direct] {
        s.add_nonnegativity();
        s.add_box(0.0, edge);
    }
    let equal = projected.region_equal(&direct, tol)?;
    Ok(FmCheck { equal, projected, direct })
}

impl Theorem2Terms {
    /// Projection check at these constants.
    pub fn verify_fm(&self, tol: f64) -> Result<FmCheck> {
        verify_fm_projection(&self.appendix_b_system(), &self.system(), self.box_edge(), tol)
    }
}

/// Information terms of the Corollary-1 conditions on the separated joint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corollary1Terms {
    pub h_u1: f64,
    pub h_u2: f64,
    /// `I(X1;Y1|WT2,Q)`
    pub x1_y1_g_t2: f64,
    /// `I(X1,WT2;Y1|Q)`
    pub x1t2_y1: f64,
    /// `I(X1;Y1|WT1,WT2,Q)`
    pub x1_y1_g_t1t2: f64,
    /// `I(WT2,X1;Y1|WT1,Q)`
    pub t2x1_y1_g_t1: f64,
    /// `I(X2;Y2|WT1,Q)`
    pub x2_y2_g_t1: f64,
    /// `I(X2,WT1;Y2|Q)`
    pub x2t1_y2: f64,
    /// `I(X2;Y2|WT1,WT2,Q)`
    pub x2_y2_g_t1t2: f64,
    /// `I(WT1,X2;Y2|WT2,Q)`
    pub t1x2_y2_g_t2: f64,
    /// `I(WB1;V1|Q)`
    pub b1_v1: f64,
    /// `I(WB2;V2|Q)`
    pub b2_v2: f64,
    /// `I(WB1;U1|V1,Q)`
    pub b1_u1_g_v1: f64,
    /// `I(WB2;U2|V2,Q)`
    pub b2_u2_g_v2: f64,
}

pub fn corollary1_terms(src1: &SourceSpec, src2: &SourceSpec, ch: &ChannelSpec, aux: &AuxSchemeSep) -> Result<Corollary1Terms> {
    require_interfering(src1, src2)?;
    let joint = assemble_joint_corollary1(src1, src2, ch, aux)?;
    let i = joint.info();
    Ok(Corollary1Terms {
        h_u1: i.entropy(&[U1])?,
        h_u2: i.entropy(&[U2])?,
        x1_y1_g_t2: i.mi(&[X1], &[Y1], &[WT2, Q])?,
        x1t2_y1: i.mi(&[X1, WT2], &[Y1], &[Q])?,
        x1_y1_g_t1t2: i.mi(&[X1], &[Y1], &[WT1, WT2, Q])?,
        t2x1_y1_g_t1: i.mi(&[WT2, X1], &[Y1], &[WT1, Q])?,
        x2_y2_g_t1: i.mi(&[X2], &[Y2], &[WT1, Q])?,
        x2t1_y2: i.mi(&[X2, WT1], &[Y2], &[Q])?,
        x2_y2_g_t1t2: i.mi(&[X2], &[Y2], &[WT1, WT2, Q])?,
        t1x2_y2_g_t2: i.mi(&[WT1, X2], &[Y2], &[WT2, Q])?,
        b1_v1: i.mi(&[WB1], &[V1], &[Q])?,
        b2_v2: i.mi(&[WB2], &[V2], &[Q])?,
        b1_u1_g_v1: i.mi(&[WB1], &[U1], &[V1, Q])?,
        b2_u2_g_v2: i.mi(&[WB2], &[U2], &[V2, Q])?,
    })
}

impl Corollary1Terms {
    pub fn margins(&self, eps: f64) -> RegionReport {
        let t = self;
        let (h1, h2) = (t.h_u1, t.h_u2);
        let values = [
            t.x1_y1_g_t2 - h1,
            t.x1t2_y1 - h1 - t.b2_u2_g_v2,
            t.x2_y2_g_t1 - h2,
            t.x2t1_y2 - h2 - t.b1_u1_g_v1,
            t.x1_y1_g_t1t2 + t.x2t1_y2 - (h1 + h2 - t.b1_v1),
            t.x2_y2_g_t1t2 + t.x1t2_y1 - (h1 + h2 - t.b2_v2),
            t.t1x2_y2_g_t2 + t.t2x1_y1_g_t1 - (h1 + h2 - t.b1_v1 - t.b2_v2),
            t.x1t2_y1 + t.t1x2_y2_g_t2 - (h1 + h2 + t.b1_u1_g_v1 - t.b2_v2),
            t.x2t1_y2 + t.t2x1_y1_g_t1 - (h1 + h2 + t.b2_u2_g_v2 - t.b1_v1),
            t.x1t2_y1 + t.x1_y1_g_t1t2 + t.t1x2_y2_g_t2 - (2.0 * h1 + h2 - t.b1_v1 - t.b2_v2),
            t.x2t1_y2 + t.x2_y2_g_t1t2 + t.t2x1_y1_g_t1 - (h1 + 2.0 * h2 - t.b1_v1 - t.b2_v2),
        ];
        RegionReport::new(COROLLARY1_LABELS.iter().zip(values).map(|(l, v)| (l.to_string(), v)).collect(), eps)
    }
}

pub fn corollary1_margins(src1: &SourceSpec, src2: &SourceSpec, ch: &ChannelSpec, aux: &AuxSchemeSep, eps: f64) -> Result<RegionReport> {
    Ok(corollary1_terms(src1, src2, ch, aux)?.margins(eps))
}
