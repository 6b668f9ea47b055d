//! Superposition coding with partial interference decoding.
//!
//! Transmitter `k` maps its source sequence to an inner codeword typical with
//! it (or to a random one when none is), then sends a channel word drawn
//! letter by letter from `p(x_k | u_k, w_k, q)`. Receiver `k` searches its
//! own source candidates jointly with the other transmitter's inner codebook.

use rand::Rng;
use rayon::prelude::*;

use super::typical::{enumerate_typical, Bounds, Codebook};
use super::{check_alphabet, codebook_len, sample, CodebookMode, Diagnostics, SimConfig, SimResult, CANDIDATE_CAP};
use crate::prob::{assemble_joint_theorem2, ChannelSpec, JointPmf, SideInfo, SourceSpec};
use crate::regions::AuxScheme;
use crate::{rng, Error, Result};

const U: [&str; 2] = ["U1", "U2"];
const V: [&str; 2] = ["V1", "V2"];
const W: [&str; 2] = ["W1", "W2"];
const X: [&str; 2] = ["X1", "X2"];
const Y: [&str; 2] = ["Y1", "Y2"];

/// Everything a trial needs, precomputed once.
struct Model {
    n: usize,
    nu: [usize; 2],
    nv: [usize; 2],
    nw: [usize; 2],
    nx: [usize; 2],
    ny: [usize; 2],
    p_q: Vec<f64>,
    p_uv: [Vec<f64>; 2],
    /// Indexed `q * nw + w`.
    p_w_given_q: [Vec<f64>; 2],
    /// Indexed `((q * nu + u) * nw + w) * nx + x`.
    p_x_given_uwq: [Vec<f64>; 2],
    /// Rows `x1 * nx2 + x2`, cells `y1 * ny2 + y2`.
    channel: Vec<f64>,
    /// Cells `(q, u_k, w_k)`.
    enc: [Bounds; 2],
    /// Cells `(q, u_k, w_k, x_k, y_k, v_j, w_j)` with `j` the other user.
    dec: [Bounds; 2],
    /// Cells `u_k`.
    cand: [Bounds; 2],
    /// Cells `(q, y_k, v_j, u_k)`: decoder bounds summed over each fiber.
    cand_cells: [Bounds; 2],
    /// Support of `(q, y_k, v_j, w_j)`.
    inner_support: [Vec<bool>; 2],
    len: [usize; 2],
}

fn conditional(j: &JointPmf, cond: &[&str], out: &[&str]) -> Result<Vec<f64>> {
    let names: Vec<&str> = cond.iter().chain(out).copied().collect();
    let m = j.marginal(&names)?;
    let k: usize = out.iter().map(|n| j.axis(n).map(|a| a.size())).product::<Result<usize>>()?;
    let mut p = m.mass().to_vec();
    for row in p.chunks_mut(k) {
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            row.iter_mut().for_each(|x| *x /= s);
        }
    }
    Ok(p)
}

impl Model {
    fn new(src: [&SourceSpec; 2], ch: &ChannelSpec, aux: &AuxScheme, cfg: &SimConfig) -> Result<(Self, [bool; 2])> {
        let j = assemble_joint_theorem2(src[0], src[1], ch, aux)?;
        let size = |name: &str| j.axis(name).map(|a| a.size());
        let n = cfg.n;
        let nq = size("Q")?;
        let nu = [size(U[0])?, size(U[1])?];
        let nv = [size(V[0])?, size(V[1])?];
        let nw = [size(W[0])?, size(W[1])?];
        let nx = [size(X[0])?, size(X[1])?];
        let ny = [size(Y[0])?, size(Y[1])?];
        for (s, what) in [(nq, "Q")].into_iter().chain((0..2).flat_map(|k| [(nu[k], U[k]), (nv[k], V[k]), (nw[k], W[k]), (nx[k], X[k]), (ny[k], Y[k])])) {
            check_alphabet(s, what)?;
        }
        let kernels = [aux.w1x1(), aux.w2x2()];
        let mut p_x_given_uwq = [Vec::new(), Vec::new()];
        for k in 0..2 {
            // p(x | u, w, q) from the auxiliary kernel itself; where p(w | u, q) = 0
            // the conditional is undefined and p(x | u, q) stands in.
            let ker = kernels[k];
            let mut t = vec![0.0; nq * nu[k] * nw[k] * nx[k]];
            for q in 0..nq {
                for u in 0..nu[k] {
                    let row = ker.row(u * nq + q);
                    let p_x: Vec<f64> = (0..nx[k]).map(|x| (0..nw[k]).map(|w| row[w * nx[k] + x]).sum()).collect();
                    for w in 0..nw[k] {
                        let pw: f64 = row[w * nx[k]..(w + 1) * nx[k]].iter().sum();
                        for x in 0..nx[k] {
                            t[((q * nu[k] + u) * nw[k] + w) * nx[k] + x] = if pw > 0.0 { row[w * nx[k] + x] / pw } else { p_x[x] };
                        }
                    }
                }
            }
            p_x_given_uwq[k] = t;
        }
        let bounds = |names: &[&str]| -> Result<Bounds> { Ok(Bounds::new(j.marginal(names)?.mass(), n, cfg.delta)) };
        let dec = |k: usize| bounds(&["Q", U[k], W[k], X[k], Y[k], V[1 - k], W[1 - k]]);
        // Joint typicality of the full decoder tuple bounds every marginal
        // count by the sums of the cell bounds it aggregates.
        let fiber = |k: usize, b: &Bounds| -> Bounds {
            let (nyk, nvj, nwj) = (ny[k], nv[1 - k], nw[1 - k]);
            let mut out = Bounds { lo: vec![0; nq * nyk * nvj * nu[k]], hi: vec![0; nq * nyk * nvj * nu[k]] };
            let mut cell = 0;
            for q in 0..nq {
                for u in 0..nu[k] {
                    for _w in 0..nw[k] {
                        for _x in 0..nx[k] {
                            for y in 0..nyk {
                                for v in 0..nvj {
                                    let t = ((q * nyk + y) * nvj + v) * nu[k] + u;
                                    for _ in 0..nwj {
                                        out.lo[t] += b.lo[cell];
                                        out.hi[t] += b.hi[cell];
                                        cell += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            out
        };
        let support = |k: usize, last: &str| -> Result<Vec<bool>> {
            Ok(j.marginal(&["Q", Y[k], V[1 - k], last])?.mass().iter().map(|&p| p > 0.0).collect())
        };
        let len = [codebook_len(n, cfg.rates[0])?, codebook_len(n, cfg.rates[1])?];
        let info = j.info();
        let warn = [
            cfg.rates[0] < info.mi(&["U1"], &["W1"], &["Q"])? - 1e-12,
            cfg.rates[1] < info.mi(&["U2"], &["W2"], &["Q"])? - 1e-12,
        ];
        let (dec0, dec1) = (dec(0)?, dec(1)?);
        let cand_cells = [fiber(0, &dec0), fiber(1, &dec1)];
        let model = Model {
            n,
            nu,
            nv,
            nw,
            nx,
            ny,
            p_q: aux.p_q().to_vec(),
            p_uv: [src[0].joint().mass().to_vec(), src[1].joint().mass().to_vec()],
            p_w_given_q: [conditional(&j, &["Q"], &["W1"])?, conditional(&j, &["Q"], &["W2"])?],
            p_x_given_uwq,
            channel: ch.joint().kernel().to_vec(),
            enc: [bounds(&["Q", "U1", "W1"])?, bounds(&["Q", "U2", "W2"])?],
            dec: [dec0, dec1],
            cand: [bounds(&["U1"])?, bounds(&["U2"])?],
            cand_cells,
            inner_support: [support(0, W[1])?, support(1, W[0])?],
            len,
        };
        Ok((model, warn))
    }
}

/// Time-sharing sequence, inner codebooks and the seeds of the lazy maps.
struct Codebooks {
    q: Vec<u8>,
    books: [Codebook; 2],
    map_seed: u64,
}

impl Codebooks {
    fn draw(m: &Model, seed: u64) -> Self {
        let mut r = rng::stream(seed, &[0]);
        let q: Vec<u8> = (0..m.n).map(|_| sample(&m.p_q, &mut r) as u8).collect();
        let book = |k: usize, r: &mut rand_chacha::ChaCha8Rng| {
            let nw = m.nw[k];
            let mut words = Vec::with_capacity(m.len[k] * m.n);
            for _ in 0..m.len[k] {
                for &qi in &q {
                    let row = &m.p_w_given_q[k][qi as usize * nw..(qi as usize + 1) * nw];
                    words.push(sample(row, r) as u8);
                }
            }
            Codebook::new(m.n, words)
        };
        let b0 = book(0, &mut rng::stream(seed, &[1]));
        let b1 = book(1, &mut rng::stream(seed, &[2]));
        Self { q, books: [b0, b1], map_seed: rng::derive(seed, &[3]) }
    }

    /// Inner codeword index for `u` and whether the fallback was used.
    fn encode(&self, m: &Model, k: usize, u: &[u8]) -> (usize, bool) {
        let mut r = rng::stream(self.map_seed, &[k as u64, rng::hash_seq(u), 0]);
        let ctx: Vec<usize> = self.q.iter().zip(u).map(|(&q, &a)| q as usize * m.nu[k] + a as usize).collect();
        let mut hits = Vec::new();
        self.books[k].typical_with(&ctx, m.nw[k], &m.enc[k], usize::MAX, &mut hits);
        if hits.is_empty() {
            (r.random_range(0..self.books[k].len()), true)
        } else {
            hits.sort_unstable();
            (hits[r.random_range(0..hits.len())] as usize, false)
        }
    }

    /// Channel word `x_k(u, w(u))`.
    fn channel_word(&self, m: &Model, k: usize, u: &[u8], w: usize) -> Vec<u8> {
        let mut r = rng::stream(self.map_seed, &[k as u64, rng::hash_seq(u), 1]);
        let word = self.books[k].word(w);
        let (nu, nw, nx) = (m.nu[k], m.nw[k], m.nx[k]);
        (0..m.n)
            .map(|i| {
                let base = ((self.q[i] as usize * nu + u[i] as usize) * nw + word[i] as usize) * nx;
                sample(&m.p_x_given_uwq[k][base..base + nx], &mut r) as u8
            })
            .collect()
    }
}

enum Decision {
    Unique(Vec<u8>),
    Ambiguous,
    Empty,
}

fn decode(m: &Model, cb: &Codebooks, k: usize, y: &[u8], v_other: &[u8]) -> Result<Decision> {
    let j = 1 - k;
    let (nu, ny, nv) = (m.nu[k], m.ny[k], m.nv[j]);
    let obs = |i: usize| (cb.q[i] as usize * ny + y[i] as usize) * nv + v_other[i] as usize;
    let ctx: Vec<usize> = (0..m.n).map(obs).collect();
    // Interferer codewords that can be typical with what the receiver sees.
    let nwj = m.nw[j];
    let inner = cb.books[j].filtered(|w| (0..m.n).all(|i| m.inner_support[k][ctx[i] * nwj + w[i] as usize]));
    let mut found: Option<Vec<u8>> = None;
    let mut ambiguous = false;
    let mut hit = Vec::with_capacity(1);
    enumerate_typical(nu, &m.cand[k], &ctx, &m.cand_cells[k], CANDIDATE_CAP, &mut |u| {
        let (w, _) = cb.encode(m, k, u);
        let x = cb.channel_word(m, k, u, w);
        let word = cb.books[k].word(w);
        let full: Vec<usize> = (0..m.n)
            .map(|i| {
                let c = ((cb.q[i] as usize * nu + u[i] as usize) * m.nw[k] + word[i] as usize) * m.nx[k] + x[i] as usize;
                (c * ny + y[i] as usize) * nv + v_other[i] as usize
            })
            .collect();
        hit.clear();
        inner.typical_with(&full, nwj, &m.dec[k], 1, &mut hit);
        if hit.is_empty() {
            return true;
        }
        if found.is_some() {
            ambiguous = true;
            return false;
        }
        found = Some(u.to_vec());
        true
    })?;
    Ok(match (found, ambiguous) {
        (_, true) => Decision::Ambiguous,
        (Some(u), false) => Decision::Unique(u),
        (None, false) => Decision::Empty,
    })
}

#[derive(Default)]
struct Outcome {
    wrong: [bool; 2],
    diag: Diagnostics,
}

fn trial(m: &Model, fixed: Option<&Codebooks>, seed: u64, t: u64) -> Result<Outcome> {
    let fresh;
    let cb = match fixed {
        Some(cb) => cb,
        None => {
            fresh = Codebooks::draw(m, rng::derive(seed, &[t, 1]));
            &fresh
        }
    };
    let mut r = rng::stream(seed, &[t, 0]);
    let mut u = [Vec::with_capacity(m.n), Vec::with_capacity(m.n)];
    let mut v = [Vec::with_capacity(m.n), Vec::with_capacity(m.n)];
    for k in 0..2 {
        for _ in 0..m.n {
            let c = sample(&m.p_uv[k], &mut r);
            u[k].push((c / m.nv[k]) as u8);
            v[k].push((c % m.nv[k]) as u8);
        }
    }
    let mut out = Outcome::default();
    let mut x = [Vec::new(), Vec::new()];
    for k in 0..2 {
        let (w, fallback) = cb.encode(m, k, &u[k]);
        let typical = m.cand[k].accepts_cells(u[k].iter().map(|&a| a as usize));
        if !typical {
            out.diag.atypical_sources[k] += 1;
        } else if fallback {
            out.diag.encoder_fallbacks[k] += 1;
        }
        x[k] = cb.channel_word(m, k, &u[k], w);
    }
    let ny2 = m.ny[1];
    let (mut y1, mut y2) = (Vec::with_capacity(m.n), Vec::with_capacity(m.n));
    let cells = m.ny[0] * ny2;
    for i in 0..m.n {
        let row = (x[0][i] as usize * m.nx[1] + x[1][i] as usize) * cells;
        let c = sample(&m.channel[row..row + cells], &mut r);
        y1.push((c / ny2) as u8);
        y2.push((c % ny2) as u8);
    }
    let y = [y1, y2];
    for k in 0..2 {
        match decode(m, cb, k, &y[k], &v[1 - k])? {
            Decision::Unique(d) => out.wrong[k] = d != u[k],
            Decision::Ambiguous => {
                out.wrong[k] = true;
                out.diag.ambiguities[k] += 1;
            }
            Decision::Empty => {
                out.wrong[k] = true;
                out.diag.no_candidate[k] += 1;
            }
        }
    }
    Ok(out)
}

/// Runs the superposition scheme for `aux` over `cfg.trials` independent trials.
///
/// Both sources must use interfering side information: receiver `k` sees the
/// side information of the other source.
pub fn simulate_theorem2_scheme(
    src1: &SourceSpec,
    src2: &SourceSpec,
    ch: &ChannelSpec,
    aux: &AuxScheme,
    cfg: &SimConfig,
) -> Result<SimResult> {
    cfg.validate()?;
    if src1.wiring() != SideInfo::Interfering || src2.wiring() != SideInfo::Interfering {
        return Err(Error::Configuration("the superposition scheme needs interfering side information".into()));
    }
    let (m, warn) = Model::new([src1, src2], ch, aux, cfg)?;
    let fixed = match cfg.codebook {
        CodebookMode::Fixed => Some(Codebooks::draw(&m, rng::derive(cfg.seed, &[u64::MAX]))),
        CodebookMode::FreshPerTrial => None,
    };
    let outcomes = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| trial(&m, fixed.as_ref(), cfg.seed, t))
        .collect::<Result<Vec<_>>>()?;
    let mut diag = Diagnostics { rate_warning: warn, ..Default::default() };
    let mut errors = [0u64; 2];
    let mut joint = 0;
    for o in &outcomes {
        for k in 0..2 {
            errors[k] += o.wrong[k] as u64;
            diag.atypical_sources[k] += o.diag.atypical_sources[k];
            diag.encoder_fallbacks[k] += o.diag.encoder_fallbacks[k];
            diag.ambiguities[k] += o.diag.ambiguities[k];
            diag.no_candidate[k] += o.diag.no_candidate[k];
        }
        joint += (o.wrong[0] || o.wrong[1]) as u64;
    }
    Ok(SimResult::from_counts(cfg.trials as u64, errors, joint, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, SideMap};

    #[test]
    fn encoder_rarely_falls_back_above_the_rate() {
        // Rate I(U1;W1|Q) + 3 delta with I(U1;W1|Q) = H(V1) = 0.8.
        let s1 = fixtures::bit_source(0.8, SideMap::Copy, SideInfo::Interfering).unwrap();
        let s2 = fixtures::bit_source(0.8, SideMap::Empty, SideInfo::Interfering).unwrap();
        let aux = fixtures::xor_separated_scheme(&s1).unwrap().to_joint_scheme().unwrap();
        let cfg = SimConfig { n: 16, delta: 0.1, rates: [1.1, 0.0], ..Default::default() };
        let (m, warn) = Model::new([&s1, &s2], &fixtures::xor_z_channel(), &aux, &cfg).unwrap();
        assert_eq!(warn, [false, false]);
        let (mut typical, mut fallbacks) = (0, 0);
        for t in 0..60u64 {
            let cb = Codebooks::draw(&m, rng::derive(5, &[t, 1]));
            let mut r = rng::stream(5, &[t, 0]);
            let u: Vec<u8> = (0..m.n).map(|_| (sample(&m.p_uv[0], &mut r) / m.nv[0]) as u8).collect();
            if m.cand[0].accepts_cells(u.iter().map(|&a| a as usize)) {
                typical += 1;
                fallbacks += cb.encode(&m, 0, &u).1 as u32;
            }
        }
        assert!(typical >= 30, "{typical}");
        assert!(fallbacks as f64 <= 0.1 * typical as f64, "{fallbacks} of {typical}");
    }
}
