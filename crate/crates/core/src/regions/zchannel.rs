use rayon::prelude::*;

use crate::polytope::InequalitySystem;
use crate::prob::{entropy_of, names::*, product_joint, Alphabet, ChannelSpec, CondPmf, Factor, SideInfo, SourceSpec, DEFAULT_CELL_CAP};
use crate::regions::{Lemma1Scheme, RegionReport, ZScheme};
use crate::{rng, simplex, Error, Result};

/// Largest product grid evaluated by [`compute_tau`] before coarsening.
const TAU_GRID_BUDGET: u128 = 4_000_000;
/// Gap to τ tolerated for Condition 2.
const CONDITION2_TOL: f64 = 1e-6;
/// Spread of `H(Y2^n | X2^n = x2^n)` tolerated for Condition 1.
const CONDITION1_TOL: f64 = 1e-9;

/// Outcome of the small-blocklength Condition-1 check.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition1Report {
    pub holds: bool,
    /// Largest spread over `x2^n` of `H(Y2^n | X2^n = x2^n)` seen.
    pub max_deviation: f64,
    pub blocklengths: Vec<usize>,
    pub samples: usize,
}

impl Condition1Report {
    pub fn summary(&self) -> String {
        let verdict = if self.holds { "necessary check passed" } else { "violated" };
        format!(
            "{verdict} at n in {:?} with {} random input laws (max spread {:.3e}); not a proof for all n",
            self.blocklengths, self.samples, self.max_deviation
        )
    }
}

/// `p(y2 | x1, x2)` as a kernel with inputs `(x1, x2)`.
fn y2_kernel(ch: &ChannelSpec) -> Result<&CondPmf> {
    Ok(ch.z_factors()?.1)
}

/// Checks that `H(Y2^n | X2^n = x2^n)` does not depend on `x2^n` for random
/// laws on `X1^n` (not necessarily i.i.d.), `n = 1..=n_max`.
pub fn check_condition1(ch: &ChannelSpec, samples: usize, n_max: usize, seed: u64) -> Result<Condition1Report> {
    let k = y2_kernel(ch)?;
    let (nx1, nx2, ny) = (ch.x1().size(), ch.x2().size(), ch.y2().size());
    let mut max_dev: f64 = 0.0;
    for n in 1..=n_max {
        let pow = |b: usize| (b as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        let work = pow(nx1).saturating_mul(pow(nx2)).saturating_mul(pow(ny));
        if work > DEFAULT_CELL_CAP as u128 {
            return Err(Error::Size { cells: work, cap: DEFAULT_CELL_CAP });
        }
        let (cx1, cx2, cy) = (pow(nx1) as usize, pow(nx2) as usize, pow(ny) as usize);
        let mut r = rng::stream(seed, &[n as u64]);
        for _ in 0..samples {
            let p1 = simplex::random_point(cx1, &mut r);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for x2 in 0..cx2 {
                let mut py = vec![0.0; cy];
                for (x1, &px) in p1.iter().enumerate() {
                    let rows = letter_rows(k, x1, x2, n, nx1, nx2);
                    kron_accumulate(&rows, px, &mut py);
                }
                let h = entropy_of(&py);
                lo = lo.min(h);
                hi = hi.max(h);
            }
            max_dev = max_dev.max(hi - lo);
        }
    }
    Ok(Condition1Report {
        holds: max_dev < CONDITION1_TOL,
        max_deviation: max_dev,
        blocklengths: (1..=n_max).collect(),
        samples,
    })
}

fn letter_rows(k: &CondPmf, x1: usize, x2: usize, n: usize, nx1: usize, nx2: usize) -> Vec<&[f64]> {
    let (mut a, mut b) = (x1, x2);
    let mut rows = vec![&[][..]; n];
    for i in (0..n).rev() {
        rows[i] = k.row((a % nx1) * nx2 + b % nx2);
        a /= nx1;
        b /= nx2;
    }
    rows
}

/// Adds `w · (row_1 ⊗ … ⊗ row_n)` into `out`.
fn kron_accumulate(rows: &[&[f64]], w: f64, out: &mut [f64]) {
    let mut cur = vec![w];
    for r in rows {
        cur = cur.iter().flat_map(|&a| r.iter().map(move |&b| a * b)).collect();
    }
    out.iter_mut().zip(cur).for_each(|(o, c)| *o += c);
}

/// Maximum of `H(Y2)` over product inputs and the Condition-2 verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct TauResult {
    pub tau: f64,
    /// Input law on `X2` maximizing the worst case over `p(x1)`.
    pub p_star: Vec<f64>,
    pub condition2_holds: bool,
    /// `τ − min over p(x1) of H(Y2)` under `p_star`; zero when Condition 2 is exact.
    pub deviation: f64,
    /// Grid step actually used per simplex.
    pub resolution: f64,
}

/// `M[x1][y2] = Σ_x2 p2(x2) p(y2 | x1, x2)`.
fn mix_x2(k: &[f64], nx1: usize, nx2: usize, ny: usize, p2: &[f64]) -> Vec<f64> {
    let mut m = vec![0.0; nx1 * ny];
    for x1 in 0..nx1 {
        for (x2, &w) in p2.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let row = &k[(x1 * nx2 + x2) * ny..(x1 * nx2 + x2 + 1) * ny];
            for y in 0..ny {
                m[x1 * ny + y] += w * row[y];
            }
        }
    }
    m
}

fn h_y2(m: &[f64], ny: usize, p1: &[f64]) -> f64 {
    let mut py = vec![0.0; ny];
    for (x1, &w) in p1.iter().enumerate() {
        for y in 0..ny {
            py[y] += w * m[x1 * ny + y];
        }
    }
    entropy_of(&py)
}

/// Worst case over `p(x1)` of `H(Y2)`; concavity puts it at a vertex.
fn worst_h_y2(m: &[f64], ny: usize, nx1: usize) -> f64 {
    (0..nx1).map(|x1| entropy_of(&m[x1 * ny..(x1 + 1) * ny])).fold(f64::INFINITY, f64::min)
}

/// Grid search with local refinement for `τ = max H(Y2)` over `p(x1) p(x2)`,
/// and for a `p*(x2)` whose worst case over `p(x1)` reaches τ.
pub fn compute_tau(ch: &ChannelSpec, resolution: f64) -> Result<TauResult> {
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::Domain(format!("grid resolution {resolution} outside (0, 1]")));
    }
    let (nx1, nx2, ny) = (ch.x1().size(), ch.x2().size(), ch.y2().size());
    // Marginalize Y1 out of the joint kernel.
    let joint = ch.joint();
    let ny1 = ch.y1().size();
    let mut k = vec![0.0; nx1 * nx2 * ny];
    for cell in 0..nx1 * nx2 {
        for y1 in 0..ny1 {
            for y2 in 0..ny {
                k[cell * ny + y2] += joint.prob(cell, y1 * ny + y2);
            }
        }
    }
    let mut steps = (1.0 / resolution).round().max(1.0) as usize;
    while steps > 1 && simplex::grid_len(nx1, steps).saturating_mul(simplex::grid_len(nx2, steps)) > TAU_GRID_BUDGET {
        steps = steps * 9 / 10;
    }
    let g1 = simplex::grid(nx1, steps);
    let g2 = simplex::grid(nx2, steps);
    // Per p2: (best H over the p1 grid and its index, worst case over p1).
    let per_p2: Vec<(f64, usize, f64)> = g2
        .par_iter()
        .map(|p2| {
            let m = mix_x2(&k, nx1, nx2, ny, p2);
            let mut best = (f64::NEG_INFINITY, 0);
            for (i, p1) in g1.iter().enumerate() {
                let h = h_y2(&m, ny, p1);
                if h > best.0 {
                    best = (h, i);
                }
            }
            (best.0, best.1, worst_h_y2(&m, ny, nx1))
        })
        .collect();
    let (mut i_tau, mut i_star) = (0, 0);
    for (i, r) in per_p2.iter().enumerate() {
        if r.0 > per_p2[i_tau].0 {
            i_tau = i;
        }
        if r.2 > per_p2[i_star].2 {
            i_star = i;
        }
    }
    let step = 1.0 / steps as f64;
    // Refine τ by alternating coordinate refinement on p1 and p2.
    let (mut p1, mut p2) = (g1[per_p2[i_tau].1].clone(), g2[i_tau].clone());
    let mut tau = per_p2[i_tau].0;
    for _ in 0..4 {
        let m = mix_x2(&k, nx1, nx2, ny, &p2);
        let (a, _) = simplex::refine(p1.clone(), step, 1e-12, |p| h_y2(&m, ny, p));
        p1 = a;
        let (b, v) = simplex::refine(p2.clone(), step, 1e-12, |p| h_y2(&mix_x2(&k, nx1, nx2, ny, p), ny, &p1));
        p2 = b;
        tau = tau.max(v);
    }
    let (p_star, worst) = simplex::refine(g2[i_star].clone(), step, 1e-12, |p| worst_h_y2(&mix_x2(&k, nx1, nx2, ny, p), ny, nx1));
    let tau = tau.max(worst);
    let deviation = (tau - worst).max(0.0);
    Ok(TauResult { tau, p_star, condition2_holds: deviation <= CONDITION2_TOL, deviation, resolution: step })
}

/// Information terms of the Z-channel regions on
/// `p(w) p(x1|w) p(x2) p(y1|x1) p(y2|x1,x2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZTerms {
    pub i_x1_y1: f64,
    pub i_x1_y1_given_w: f64,
    pub i_wx2_y2: f64,
    pub i_w_y2_given_x2: f64,
    pub i_x2_y2_given_w: f64,
    pub h_y2_given_wx2: f64,
    pub h_y1_given_w: f64,
    pub h_y1_given_x1: f64,
}

pub fn z_terms(ch: &ChannelSpec, zs: &ZScheme, p_x2: &[f64]) -> Result<ZTerms> {
    let (f1, f2) = ch.z_factors()?;
    if zs.x1_given_w().out_size() != ch.x1().size() {
        return Err(Error::Composition("p(x1|w) output does not match X1".into()));
    }
    if p_x2.len() != ch.x2().size() {
        return Err(Error::Composition("p(x2) does not match X2".into()));
    }
    let axes = vec![zs.w().renamed(W), ch.x1().clone(), ch.x2().clone(), ch.y1().clone(), ch.y2().clone()];
    let joint = product_joint(
        axes,
        &[
            Factor::new(&[W], zs.p_w()),
            Factor::new(&[W, X1], zs.x1_given_w().kernel()),
            Factor::new(&[X2], p_x2),
            Factor::new(&[X1, Y1], f1.kernel()),
            Factor::new(&[X1, X2, Y2], f2.kernel()),
        ],
        DEFAULT_CELL_CAP,
    )?;
    let i = joint.info();
    Ok(ZTerms {
        i_x1_y1: i.mi(&[X1], &[Y1], &[])?,
        i_x1_y1_given_w: i.mi(&[X1], &[Y1], &[W])?,
        i_wx2_y2: i.mi(&[W, X2], &[Y2], &[])?,
        i_w_y2_given_x2: i.mi(&[W], &[Y2], &[X2])?,
        i_x2_y2_given_w: i.mi(&[X2], &[Y2], &[W])?,
        h_y2_given_wx2: i.cond_entropy(&[Y2], &[W, X2])?,
        h_y1_given_w: i.cond_entropy(&[Y1], &[W])?,
        h_y1_given_x1: i.cond_entropy(&[Y1], &[X1])?,
    })
}

fn require_condition2(tau: &TauResult) -> Result<()> {
    if !tau.condition2_holds {
        return Err(Error::Precondition(format!(
            "Condition 2 fails (best worst-case H(Y2) is {:.3e} below tau)",
            tau.deviation
        )));
    }
    Ok(())
}

fn require_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("gamma must be a nonnegative number, got {gamma}")));
    }
    Ok(())
}

/// Capacity region of the Z channel with side-information-free receiver 2,
/// over `(R1s, R1p, R2p)`.
pub fn lemma2_region(ch: &ChannelSpec, zs: &ZScheme, tau: &TauResult) -> Result<InequalitySystem> {
    require_condition2(tau)?;
    let t = z_terms(ch, zs, &tau.p_star)?;
    let mut s = InequalitySystem::new(&["R1s", "R1p", "R2p"]);
    s.add_le(&[("R1s", 1.0), ("R1p", 1.0)], t.i_x1_y1, "R1s+R1p <= I(X1;Y1)")?;
    s.add_le(&[("R2p", 1.0)], t.i_wx2_y2, "R2p <= I(W,X2;Y2)")?;
    s.add_le(&[("R1p", 1.0), ("R2p", 1.0)], t.i_x1_y1_given_w + t.i_wx2_y2, "R1p+R2p <= I(X1;Y1|W) + I(W,X2;Y2)")?;
    s.add_nonnegativity();
    Ok(s)
}

/// Lemma-2 region over `(R1s, R1p, R2s, R2p)` with `R2s` unconstrained.
pub fn lemma2_as_ci_region(region: &InequalitySystem) -> Result<InequalitySystem> {
    region.lift(&["R1s", "R1p", "R2s", "R2p"])
}

pub const COROLLARY2_LABELS: [&str; 3] = [
    "H(U1) < I(X1;Y1)",
    "H(U2) < I(W,X2;Y2)",
    "H(U1|V1)+H(U2) < I(W,X2;Y2) + I(X1;Y1|W)",
];

/// Necessary and sufficient conditions when `V1 = h1(U1)` and `V2` is empty.
pub fn corollary2_margins(
    src1: &SourceSpec,
    src2: &SourceSpec,
    ch: &ChannelSpec,
    zs: &ZScheme,
    tau: &TauResult,
    eps: f64,
) -> Result<RegionReport> {
    if src1.h().is_none() {
        return Err(Error::Configuration("source 1 needs a deterministic side-information map h1".into()));
    }
    if src2.v().size() != 1 {
        return Err(Error::Configuration("source 2 must have empty (unary) side information".into()));
    }
    if src1.wiring() != SideInfo::Interfering {
        return Err(Error::Configuration("V1 must be available at receiver 2".into()));
    }
    require_condition2(tau)?;
    let t = z_terms(ch, zs, &tau.p_star)?;
    let values = [
        t.i_x1_y1 - src1.h_u(),
        t.i_wx2_y2 - src2.h_u(),
        t.i_wx2_y2 + t.i_x1_y1_given_w - src1.h_u_given_v() - src2.h_u(),
    ];
    Ok(RegionReport::new(COROLLARY2_LABELS.iter().zip(values).map(|(l, v)| (l.to_string(), v)).collect(), eps))
}

/// Z channel with degraded message sets, over `(R1c, R1p, R2)`.
pub fn zchannel_degraded_region(ch: &ChannelSpec, zs: &ZScheme, tau: &TauResult, gamma: f64) -> Result<InequalitySystem> {
    require_gamma(gamma)?;
    require_condition2(tau)?;
    let t = z_terms(ch, zs, &tau.p_star)?;
    let mut s = InequalitySystem::new(&["R1c", "R1p", "R2"]);
    s.add_le(&[("R1p", 1.0)], t.i_x1_y1_given_w + gamma, "R1p <= I(X1;Y1|W) + gamma")?;
    s.add_le(&[("R1c", 1.0), ("R1p", 1.0)], t.i_x1_y1, "R1c+R1p <= I(X1;Y1)")?;
    s.add_le(&[("R1c", 1.0)], t.i_w_y2_given_x2 - gamma, "R1c <= I(W;Y2|X2) - gamma")?;
    s.add_le(&[("R2", 1.0), ("R1c", 1.0)], tau.tau - t.h_y2_given_wx2 - gamma, "R2+R1c <= tau - H(Y2|W,X2) - gamma")?;
    s.add_nonnegativity();
    Ok(s)
}

/// Achievable region for any Z channel and any `p(x2)`, over `(R1s, R1p, R2p)`.
pub fn appendix_e_region(ch: &ChannelSpec, zs: &ZScheme, p_x2: &[f64], gamma: f64) -> Result<InequalitySystem> {
    require_gamma(gamma)?;
    let t = z_terms(ch, zs, p_x2)?;
    let mut s = InequalitySystem::new(&["R1s", "R1p", "R2p"]);
    s.add_le(&[("R1p", 1.0)], t.h_y1_given_w + gamma - t.h_y1_given_x1, "R1p <= H(Y1|W) + gamma - H(Y1|X1)")?;
    s.add_le(&[("R1s", 1.0), ("R1p", 1.0)], t.i_x1_y1, "R1s+R1p <= I(X1;Y1)")?;
    s.add_le(&[("R2p", 1.0)], t.i_x2_y2_given_w, "R2p <= I(X2;Y2|W)")?;
    s.add_le(&[("R2p", 1.0)], t.i_wx2_y2 - gamma, "R2p <= I(W,X2;Y2) - gamma")?;
    s.add_nonnegativity();
    Ok(s)
}

/// Single-letter inner bound over `(R1s, R1p, R2s, R2p)`.
pub fn lemma1_inner_bound_n1(ch: &ChannelSpec, sch: &Lemma1Scheme) -> Result<InequalitySystem> {
    if sch.x1_given_s1().out_size() != ch.x1().size() || sch.x2_given_s2().out_size() != ch.x2().size() {
        return Err(Error::Composition("p(x_k|s_k) outputs do not match the channel inputs".into()));
    }
    let axes: Vec<Alphabet> = vec![
        sch.s1().clone(),
        sch.s2().clone(),
        ch.x1().clone(),
        ch.x2().clone(),
        ch.y1().clone(),
        ch.y2().clone(),
    ];
    let joint = product_joint(
        axes,
        &[
            Factor::new(&[S1], sch.p_s1()),
            Factor::new(&[S2], sch.p_s2()),
            Factor::new(&[S1, X1], sch.x1_given_s1().kernel()),
            Factor::new(&[S2, X2], sch.x2_given_s2().kernel()),
            Factor::new(&[X1, X2, Y1, Y2], ch.joint().kernel()),
        ],
        DEFAULT_CELL_CAP,
    )?;
    let i = joint.info();
    let mut s = InequalitySystem::new(&["R1s", "R1p", "R2s", "R2p"]);
    s.add_le(&[("R1p", 1.0)], i.mi(&[X1], &[Y1], &[S1, S2])?, "R1p <= I(X1;Y1|S1,S2)")?;
    s.add_le(&[("R1s", 1.0), ("R1p", 1.0)], i.mi(&[X1], &[Y1], &[S2])?, "R1s+R1p <= I(X1;Y1|S2)")?;
    s.add_le(&[("R2p", 1.0)], i.mi(&[X2], &[Y2], &[S1, S2])?, "R2p <= I(X2;Y2|S1,S2)")?;
    s.add_le(&[("R2s", 1.0), ("R2p", 1.0)], i.mi(&[X2], &[Y2], &[S1])?, "R2s+R2p <= I(X2;Y2|S1)")?;
    s.add_nonnegativity();
    Ok(s)
}
