//! Ready-made channels, sources and schemes used by examples and tests.

use crate::prob::{binary_entropy, Alphabet, ChannelSpec, CondPmf, JointPmf, SideInfo, SourceSpec};
use crate::regions::{AuxScheme, AuxSchemeSep, ZScheme};
use crate::{Error, Result};

fn bit(name: &str) -> Alphabet {
    Alphabet::binary(name)
}

fn deterministic(out: &str, inputs: &[&str], f: impl Fn(usize) -> usize) -> CondPmf {
    let inputs = inputs.iter().map(|n| bit(n)).collect();
    CondPmf::deterministic(vec![bit(out)], inputs, f).expect("binary deterministic kernel")
}

/// `Y1 = X1`, `Y2 = X1 ⊕ X2`.
pub fn xor_z_channel() -> ChannelSpec {
    let f1 = deterministic("Y1", &["X1"], |x| x);
    let f2 = deterministic("Y2", &["X1", "X2"], |i| (i >> 1) ^ (i & 1));
    ChannelSpec::z(f1, f2).expect("valid XOR channel")
}

/// `Y1 = X1`, `Y2 = X1 ∧ X2`.
pub fn and_z_channel() -> ChannelSpec {
    let f1 = deterministic("Y1", &["X1"], |x| x);
    let f2 = deterministic("Y2", &["X1", "X2"], |i| (i >> 1) & (i & 1));
    ChannelSpec::z(f1, f2).expect("valid AND channel")
}

/// `Y1 = X1`, `Y2 = X2` as a Z channel whose cross link is absent.
pub fn clean_z_channel() -> ChannelSpec {
    let f1 = deterministic("Y1", &["X1"], |x| x);
    let f2 = deterministic("Y2", &["X1", "X2"], |i| i & 1);
    ChannelSpec::z(f1, f2).expect("valid channel")
}

/// Two orthogonal noiseless binary links as a general channel.
pub fn orthogonal_noiseless_channel() -> ChannelSpec {
    let k = CondPmf::deterministic(vec![bit("Y1"), bit("Y2")], vec![bit("X1"), bit("X2")], |i| i)
        .expect("identity kernel");
    ChannelSpec::general(k).expect("valid channel")
}

/// Binary symmetric channel `p(y | x)`.
pub fn bsc(crossover: f64) -> Result<CondPmf> {
    let e = crossover;
    CondPmf::new(vec![bit("Y")], vec![bit("X")], vec![1.0 - e, e, e, 1.0 - e])
}

/// Doubly symmetric binary source: uniform `U`, `V = U ⊕ Bern(crossover)`.
pub fn dsbs(crossover: f64, wiring: SideInfo) -> Result<SourceSpec> {
    let (a, b) = ((1.0 - crossover) / 2.0, crossover / 2.0);
    SourceSpec::new(JointPmf::new(vec![bit("U"), bit("V")], vec![a, b, b, a])?, wiring, None)
}

/// Smallest `p ≤ 1/2` with `h(p) = h`.
pub fn bernoulli_with_entropy(h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::Domain(format!("binary entropy {h} outside [0, 1]")));
    }
    // The curve is flat at its peak, so bisection cannot resolve p there.
    if h == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// How a binary fixture source exposes side information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideMap {
    /// `V = U`.
    Copy,
    /// `V` unary.
    Empty,
}

/// Binary source with `H(U) = h` and deterministic side information.
pub fn bit_source(h: f64, side: SideMap, wiring: SideInfo) -> Result<SourceSpec> {
    let p = bernoulli_with_entropy(h)?;
    match side {
        SideMap::Copy => SourceSpec::deterministic(bit("U"), bit("V"), &[1.0 - p, p], vec![0, 1], wiring),
        SideMap::Empty => SourceSpec::deterministic(bit("U"), Alphabet::unary("V"), &[1.0 - p, p], vec![0, 0], wiring),
    }
}

/// Source with unary source and side-information alphabets.
pub fn null_source(wiring: SideInfo) -> SourceSpec {
    SourceSpec::deterministic(Alphabet::unary("U"), Alphabet::unary("V"), &[1.0], vec![0], wiring)
        .expect("point source")
}

/// `p(w) p(x1 | w)` with `W` unary and `X1 ~ p_x1`.
pub fn z_scheme_unary(p_x1: &[f64]) -> Result<ZScheme> {
    let k = CondPmf::new(vec![Alphabet::indexed("X1", p_x1.len())?], vec![Alphabet::unary("W")], p_x1.to_vec())?;
    ZScheme::new(Alphabet::unary("W"), vec![1.0], k)
}

/// `W = X1` with `X1 ~ p_x1`.
pub fn z_scheme_copy(p_x1: &[f64]) -> Result<ZScheme> {
    let n = p_x1.len();
    let k = CondPmf::deterministic(vec![Alphabet::indexed("X1", n)?], vec![Alphabet::indexed("W", n)?], |w| w)?;
    ZScheme::new(Alphabet::indexed("W", n)?, p_x1.to_vec(), k)
}

/// Separated binary XOR scheme with unary `Q`, `WB1 = V1`, `WT1 = X1`
/// uniform, `WB2` and `WT2` unary and `X2` uniform.
///
/// `src1` fixes the size of `V1` and the map `h1`.
pub fn xor_separated_scheme(src1: &crate::prob::SourceSpec) -> Result<AuxSchemeSep> {
    let h1 = src1
        .h()
        .ok_or_else(|| Error::Configuration("source 1 needs a deterministic map h1".into()))?
        .to_vec();
    let nv = src1.v().size();
    let nu = src1.u().size();
    let q = Alphabet::unary("Q");
    let wb1 = CondPmf::deterministic(vec![Alphabet::indexed("WB1", nv)?], vec![Alphabet::indexed("U1", nu)?, q.clone()], |u| h1[u])?;
    let wb2 = CondPmf::new(vec![Alphabet::unary("WB2")], vec![bit("U2"), q.clone()], vec![1.0, 1.0])?;
    let wt1x1 = CondPmf::new(vec![bit("WT1"), bit("X1")], vec![q.clone()], vec![0.5, 0.0, 0.0, 0.5])?;
    let wt2x2 = CondPmf::new(vec![Alphabet::unary("WT2"), bit("X2")], vec![q.clone()], vec![0.5, 0.5])?;
    AuxSchemeSep::new(q, vec![1.0], wb1, wb2, wt1x1, wt2x2)
}

/// Unary `Q` and `W_k`, `X_k = U_k`, for binary sources.
pub fn copy_scheme() -> AuxScheme {
    let q = Alphabet::unary("Q");
    let k = |w: &str, x: &str, u: &str| {
        CondPmf::deterministic(vec![Alphabet::unary(w), bit(x)], vec![bit(u), q.clone()], |i| i).expect("copy kernel")
    };
    AuxScheme::new(q.clone(), vec![1.0], k("W1", "X1", "U1"), k("W2", "X2", "U2")).expect("copy scheme")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_inversion() {
        for h in [0.0, 0.2, 0.5, 0.8, 1.0] {
            let p = bernoulli_with_entropy(h).unwrap();
            assert!((binary_entropy(p) - h).abs() < 1e-12, "h={h}");
        }
    }

    #[test]
    fn fixture_sources() {
        let s = bit_source(0.8, SideMap::Copy, SideInfo::Interfering).unwrap();
        assert!((s.h_u() - 0.8).abs() < 1e-12);
        assert_eq!(s.h_u_given_v(), 0.0);
        let e = bit_source(0.6, SideMap::Empty, SideInfo::Interfering).unwrap();
        assert!((e.h_u_given_v() - 0.6).abs() < 1e-12);
        assert!((dsbs(0.1, SideInfo::Desired).unwrap().h_u_given_v() - 0.4689956).abs() < 5e-8);
    }
}
