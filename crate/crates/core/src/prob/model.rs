use serde::{Deserialize, Serialize};

use crate::prob::{Alphabet, CondPmf, JointPmf, ZERO_MASS};
use crate::{Error, Result};

/// Tolerance for the Z-channel factorization check.
const FACTOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelKind {
    General,
    ZInterference,
}

/// Discrete memoryless interference channel `p(y1, y2 | x1, x2)`.
///
/// Axes are renamed to `X1, X2, Y1, Y2`. A Z channel also keeps its factors
/// `p(y1 | x1)` and `p(y2 | x1, x2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    kind: ChannelKind,
    joint: CondPmf,
    factors: Option<(CondPmf, CondPmf)>,
}

impl ChannelSpec {
    /// General channel from a kernel with outputs `(y1, y2)` and inputs `(x1, x2)`.
    pub fn general(joint: CondPmf) -> Result<Self> {
        if joint.outputs().len() != 2 || joint.inputs().len() != 2 {
            return Err(Error::Input("channel kernel needs outputs (Y1, Y2) and inputs (X1, X2)".into()));
        }
        let joint = joint.relabeled(&["Y1", "Y2"], &["X1", "X2"])?;
        Ok(Self { kind: ChannelKind::General, joint, factors: None })
    }

    /// Z channel from `p(y1 | x1)` and `p(y2 | x1, x2)`.
    pub fn z(p_y1_x1: CondPmf, p_y2_x1x2: CondPmf) -> Result<Self> {
        if p_y1_x1.outputs().len() != 1 || p_y1_x1.inputs().len() != 1 {
            return Err(Error::Input("p(y1|x1) needs one output and one input axis".into()));
        }
        if p_y2_x1x2.outputs().len() != 1 || p_y2_x1x2.inputs().len() != 2 {
            return Err(Error::Input("p(y2|x1,x2) needs one output and two input axes".into()));
        }
        let f1 = p_y1_x1.relabeled(&["Y1"], &["X1"])?;
        let f2 = p_y2_x1x2.relabeled(&["Y2"], &["X1", "X2"])?;
        if f1.inputs()[0].size() != f2.inputs()[0].size() {
            return Err(Error::Composition("X1 alphabet differs between the two factors".into()));
        }
        let (nx1, nx2) = (f2.inputs()[0].size(), f2.inputs()[1].size());
        let (ny1, ny2) = (f1.out_size(), f2.out_size());
        let mut kernel = Vec::with_capacity(nx1 * nx2 * ny1 * ny2);
        for x1 in 0..nx1 {
            for x2 in 0..nx2 {
                for y1 in 0..ny1 {
                    for y2 in 0..ny2 {
                        kernel.push(f1.prob(x1, y1) * f2.prob(x1 * nx2 + x2, y2));
                    }
                }
            }
        }
        let joint = CondPmf::with_tolerance(
            vec![f1.outputs()[0].clone(), f2.outputs()[0].clone()],
            f2.inputs().to_vec(),
            kernel,
            1e-9,
        )?;
        Ok(Self { kind: ChannelKind::ZInterference, joint, factors: Some((f1, f2)) })
    }

    /// Z channel given both the joint kernel and its factors; they must agree.
    pub fn z_with_joint(joint: CondPmf, p_y1_x1: CondPmf, p_y2_x1x2: CondPmf) -> Result<Self> {
        let built = Self::z(p_y1_x1, p_y2_x1x2)?;
        let given = Self::general(joint)?;
        if given.joint.kernel().len() != built.joint.kernel().len() {
            return Err(Error::Composition("joint kernel shape differs from the factor product".into()));
        }
        let worst = given
            .joint
            .kernel()
            .iter()
            .zip(built.joint.kernel())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if worst > FACTOR_TOL {
            return Err(Error::Composition(format!("joint kernel differs from the factor product by {worst:e}")));
        }
        Ok(built)
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn joint(&self) -> &CondPmf {
        &self.joint
    }

    /// `(p(y1|x1), p(y2|x1,x2))`, or a configuration error for a general channel.
    pub fn z_factors(&self) -> Result<(&CondPmf, &CondPmf)> {
        self.factors
            .as_ref()
            .map(|(a, b)| (a, b))
            .ok_or_else(|| Error::Configuration("operation requires a Z-interference channel".into()))
    }

    pub fn x1(&self) -> &Alphabet {
        &self.joint.inputs()[0]
    }

    pub fn x2(&self) -> &Alphabet {
        &self.joint.inputs()[1]
    }

    pub fn y1(&self) -> &Alphabet {
        &self.joint.outputs()[0]
    }

    pub fn y2(&self) -> &Alphabet {
        &self.joint.outputs()[1]
    }
}

/// Which receiver sees a source's side information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideInfo {
    /// `V_k` is available at receiver `k`.
    Desired,
    /// `V_k` is available at the other receiver.
    Interfering,
}

/// Source `p(u, v)` with its side information wiring and optional map `v = h(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    joint: JointPmf,
    wiring: SideInfo,
    h: Option<Vec<usize>>,
}

impl SourceSpec {
    /// `joint` must have exactly two axes, source first; they are renamed `U`, `V`.
    pub fn new(joint: JointPmf, wiring: SideInfo, h: Option<Vec<usize>>) -> Result<Self> {
        if joint.axes().len() != 2 {
            return Err(Error::Input("source joint needs exactly two axes (U, V)".into()));
        }
        let axes = vec![joint.axes()[0].renamed("U"), joint.axes()[1].renamed("V")];
        let (nu, nv) = (axes[0].size(), axes[1].size());
        let joint = JointPmf::new(axes, joint.mass().to_vec())?;
        if let Some(h) = &h {
            if h.len() != nu || h.iter().any(|&v| v >= nv) {
                return Err(Error::Input(format!("map h needs {nu} entries in 0..{nv}")));
            }
            for u in 0..nu {
                for v in 0..nv {
                    if v != h[u] && joint.mass()[u * nv + v] > ZERO_MASS {
                        return Err(Error::Input(format!("p(u={u}, v={v}) > 0 contradicts h({u}) = {}", h[u])));
                    }
                }
            }
        }
        Ok(Self { joint, wiring, h })
    }

    /// Source with marginal `p_u` and side information `v = h(u)`.
    pub fn deterministic(u: Alphabet, v: Alphabet, p_u: &[f64], h: Vec<usize>, wiring: SideInfo) -> Result<Self> {
        let (nu, nv) = (u.size(), v.size());
        if p_u.len() != nu || h.len() != nu || h.iter().any(|&x| x >= nv) {
            return Err(Error::Input("p_u and h must cover the source alphabet".into()));
        }
        let mut mass = vec![0.0; nu * nv];
        for (i, &p) in p_u.iter().enumerate() {
            mass[i * nv + h[i]] = p;
        }
        Self::new(JointPmf::new(vec![u, v], mass)?, wiring, Some(h))
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    pub fn wiring(&self) -> SideInfo {
        self.wiring
    }

    pub fn h(&self) -> Option<&[usize]> {
        self.h.as_deref()
    }

    pub fn u(&self) -> &Alphabet {
        &self.joint.axes()[0]
    }

    pub fn v(&self) -> &Alphabet {
        &self.joint.axes()[1]
    }

    pub fn h_u(&self) -> f64 {
        self.joint.entropy(&["U"]).unwrap_or(0.0)
    }

    pub fn h_v(&self) -> f64 {
        self.joint.entropy(&["V"]).unwrap_or(0.0)
    }

    pub fn h_u_given_v(&self) -> f64 {
        self.joint.conditional_entropy(&["U"], &["V"]).unwrap_or(0.0)
    }

    pub fn with_wiring(&self, wiring: SideInfo) -> Self {
        Self { wiring, ..self.clone() }
    }
}
