//! Separate source and channel coding: random binning with side information
//! at the decoder, followed by a random channel code carrying the bin index.
//!
//! The counting route draws the source, side information, transmitted
//! codeword and channel output explicitly, and integrates over every
//! competitor (other sequences in the bin, other codewords) exactly: each
//! competitor falls in the bin or is drawn independently, so the chance that
//! none of them interferes follows from how many sequences of each joint type
//! would. The explicit route bins every sequence and is limited to small `n`.

use rand::Rng;
use rayon::prelude::*;

use super::typical::Bounds;
use super::{check_alphabet, codebook_size, sample, BinningMode, CodebookMode, DecodingRule, Diagnostics, SimConfig, SimResult};
use crate::prob::{CondPmf, SourceSpec, ZERO_MASS};
use crate::{rng, Error, Result};

/// Largest sequence space the explicit route enumerates.
const EXPLICIT_CAP: usize = 1 << 20;
/// Largest list of distinct joint types kept by the likelihood route.
const TYPE_CAP: usize = 4_000_000;
const SCORE_TOL: f64 = 1e-9;

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.filter(|x| *x > f64::NEG_INFINITY).collect();
    let Some(m) = v.iter().copied().reduce(f64::max) else { return f64::NEG_INFINITY };
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// One column of the joint type: the positions where the observed sequence
/// takes a fixed letter. The free sequence splits `m` into per-letter counts.
struct Column {
    m: u32,
    lo: Vec<u32>,
    hi: Vec<u32>,
    /// Natural-log weight per occurrence of each free letter.
    log_w: Vec<f64>,
    /// Natural-log likelihood per occurrence of each free letter.
    score: Vec<f64>,
}

struct Types {
    ln_fact: Vec<f64>,
}

impl Types {
    fn new(n: usize) -> Self {
        let mut ln_fact = vec![0.0; n + 1];
        for i in 1..=n {
            ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
        }
        Self { ln_fact }
    }

    /// Visits every count vector of `col` with `(ln multinomial + weight, score)`.
    fn compositions(&self, col: &Column, visit: &mut dyn FnMut(f64, f64)) {
        fn go(t: &Types, col: &Column, i: usize, left: u32, acc_w: f64, acc_s: f64, visit: &mut dyn FnMut(f64, f64)) {
            let k = col.lo.len();
            if i == k - 1 {
                if left < col.lo[i] || left > col.hi[i] {
                    return;
                }
                let c = left as f64;
                let w = acc_w - t.ln_fact[left as usize] + if left > 0 { c * col.log_w[i] } else { 0.0 };
                let s = acc_s + if left > 0 { c * col.score[i] } else { 0.0 };
                visit(w + t.ln_fact[col.m as usize], s);
                return;
            }
            let rest_lo: u32 = col.lo[i + 1..].iter().sum();
            let rest_hi: u32 = col.hi[i + 1..].iter().fold(0u32, |a, &h| a.saturating_add(h));
            for c in col.lo[i]..=col.hi[i].min(left) {
                if left - c < rest_lo || left - c > rest_hi {
                    continue;
                }
                let cf = c as f64;
                let w = acc_w - t.ln_fact[c as usize] + if c > 0 { cf * col.log_w[i] } else { 0.0 };
                let s = acc_s + if c > 0 { cf * col.score[i] } else { 0.0 };
                go(t, col, i + 1, left - c, w, s, visit);
            }
        }
        go(self, col, 0, col.m, 0.0, 0.0, visit);
    }

    /// `ln` of the total weight of free sequences admitted by the bounds.
    fn ln_mass(&self, cols: &[Column]) -> f64 {
        let mut total = 0.0;
        for col in cols {
            let mut terms = Vec::new();
            self.compositions(col, &mut |w, _| terms.push(w));
            total += log_sum_exp(terms.into_iter());
        }
        total
    }

    /// `ln` of the weight of free sequences scoring strictly above and equal to `target`.
    fn ln_mass_vs(&self, cols: &[Column], target: f64) -> Result<(f64, f64)> {
        let mut acc: Vec<(f64, f64)> = vec![(0.0, 0.0)];
        for col in cols {
            let mut here = Vec::new();
            self.compositions(col, &mut |w, s| here.push((s, w)));
            if acc.len().saturating_mul(here.len()) > TYPE_CAP {
                return Err(Error::Size { cells: (acc.len() * here.len()) as u128, cap: TYPE_CAP });
            }
            let mut next: Vec<(f64, f64)> = Vec::with_capacity(acc.len() * here.len());
            for &(s1, w1) in &acc {
                for &(s2, w2) in &here {
                    next.push((s1 + s2, w1 + w2));
                }
            }
            next.sort_by(|a, b| a.0.total_cmp(&b.0));
            // Merge equal scores so the list stays small.
            let mut merged: Vec<(f64, f64)> = Vec::with_capacity(next.len());
            for (s, w) in next {
                match merged.last_mut() {
                    Some(last) if (s - last.0).abs() <= SCORE_TOL => last.1 = log_sum_exp([last.1, w].into_iter()),
                    _ => merged.push((s, w)),
                }
            }
            acc = merged;
        }
        let above = log_sum_exp(acc.iter().filter(|(s, _)| *s > target + SCORE_TOL).map(|p| p.1));
        let equal = log_sum_exp(acc.iter().filter(|(s, _)| (s - target).abs() <= SCORE_TOL).map(|p| p.1));
        Ok((above, equal))
    }
}

/// Probability that the true candidate wins when each of `above` stronger
/// competitors shows up independently with probability `g`, each of `tie`
/// equal ones with probability `e`, and ties are broken uniformly. Counts are
/// floats because they can exceed 2^53.
fn win_probability(above: f64, tie: f64, g: f64, e: f64) -> f64 {
    let none_above = if above <= 0.0 { 1.0 } else if g >= 1.0 { 0.0 } else { (above * (-g).ln_1p()).exp() };
    let tie_factor = if tie <= 0.0 || e <= 0.0 {
        1.0
    } else if e >= 1.0 {
        1.0 / (tie + 1.0)
    } else {
        // E[1 / (1 + Binomial(tie, e))]
        -((tie + 1.0) * (-e).ln_1p()).exp_m1() / ((tie + 1.0) * e)
    };
    none_above * tie_factor
}

struct Model {
    n: usize,
    nu: usize,
    nv: usize,
    nx: usize,
    ny: usize,
    p_uv: Vec<f64>,
    /// `p(u | v)` indexed `u * nv + v`.
    p_u_given_v: Vec<f64>,
    p_x: Vec<f64>,
    /// Rows `x`, cells `y`.
    channel: Vec<f64>,
    src_bounds: Bounds,
    ch_bounds: Bounds,
    /// Codebook sizes; only the explicit route materializes them.
    bins: f64,
    words: f64,
    types: Types,
    rule: DecodingRule,
}

impl Model {
    fn ln_p_u_given_v(&self, u: usize, v: usize) -> f64 {
        self.p_u_given_v[u * self.nv + v].ln()
    }

    fn ln_p_y_given_x(&self, x: usize, y: usize) -> f64 {
        self.channel[x * self.ny + y].ln()
    }

    /// Columns over `v` for competitors `u'`; every sequence has weight one.
    fn source_columns(&self, v: &[u8], typical: bool) -> Vec<Column> {
        (0..self.nv)
            .map(|b| {
                let m = v.iter().filter(|&&x| x as usize == b).count() as u32;
                let (lo, hi) = (0..self.nu)
                    .map(|a| {
                        let c = a * self.nv + b;
                        if typical {
                            (self.src_bounds.lo[c], self.src_bounds.hi[c])
                        } else if self.p_u_given_v[c] > ZERO_MASS {
                            (0, m)
                        } else {
                            (0, 0)
                        }
                    })
                    .unzip();
                let score = (0..self.nu).map(|a| self.ln_p_u_given_v(a, b)).collect();
                Column { m, lo, hi, log_w: vec![0.0; self.nu], score }
            })
            .collect()
    }

    /// Columns over `y` for an independent codeword `x' ~ p_x`.
    fn channel_columns(&self, y: &[u8], typical: bool) -> Vec<Column> {
        (0..self.ny)
            .map(|b| {
                let m = y.iter().filter(|&&x| x as usize == b).count() as u32;
                let (lo, hi) = (0..self.nx)
                    .map(|a| {
                        let c = a * self.ny + b;
                        if typical {
                            (self.ch_bounds.lo[c], self.ch_bounds.hi[c])
                        } else if self.channel[c] > ZERO_MASS && self.p_x[a] > ZERO_MASS {
                            (0, m)
                        } else {
                            (0, 0)
                        }
                    })
                    .unzip();
                let log_w = self.p_x.iter().map(|p| p.ln()).collect();
                let score = (0..self.nx).map(|a| self.ln_p_y_given_x(a, b)).collect();
                Column { m, lo, hi, log_w, score }
            })
            .collect()
    }
}

#[derive(Default)]
struct Outcome {
    wrong: bool,
    diag: Diagnostics,
}

fn draw_source<R: Rng>(m: &Model, r: &mut R) -> (Vec<u8>, Vec<u8>) {
    (0..m.n)
        .map(|_| {
            let c = sample(&m.p_uv, r);
            ((c / m.nv) as u8, (c % m.nv) as u8)
        })
        .unzip()
}

fn through_channel<R: Rng>(m: &Model, x: &[u8], r: &mut R) -> Vec<u8> {
    x.iter().map(|&a| sample(&m.channel[a as usize * m.ny..(a as usize + 1) * m.ny], r) as u8).collect()
}

fn counting_trial(m: &Model, seed: u64, t: u64) -> Result<Outcome> {
    let mut r = rng::stream(seed, &[t, 0]);
    let (u, v) = draw_source(m, &mut r);
    let x: Vec<u8> = (0..m.n).map(|_| sample(&m.p_x, &mut r) as u8).collect();
    let y = through_channel(m, &x, &mut r);
    let mut out = Outcome::default();
    let others = m.words - 1.0;

    let channel_ok = match m.rule {
        DecodingRule::Typicality => {
            if !m.ch_bounds.accepts_cells(x.iter().zip(&y).map(|(&a, &b)| a as usize * m.ny + b as usize)) {
                false
            } else {
                let p_typ = m.types.ln_mass(&m.channel_columns(&y, true)).exp().min(1.0);
                r.random::<f64>() < win_probability(others, 0.0, p_typ, 0.0)
            }
        }
        DecodingRule::MaximumLikelihood => {
            let target: f64 = x.iter().zip(&y).map(|(&a, &b)| m.ln_p_y_given_x(a as usize, b as usize)).sum();
            let (above, equal) = m.types.ln_mass_vs(&m.channel_columns(&y, false), target)?;
            let (g, e) = (above.exp().min(1.0), equal.exp().min(1.0));
            // Each other codeword independently beats (g), ties (e) or loses.
            let p = if e > 0.0 {
                let (a, b) = (((others + 1.0) * (-g).ln_1p()).exp(), ((others + 1.0) * (-(g + e)).ln_1p()).exp());
                (a - b) / ((others + 1.0) * e)
            } else {
                win_probability(others, 0.0, g, 0.0)
            };
            r.random::<f64>() < p
        }
    };
    if !channel_ok {
        out.wrong = true;
        out.diag.channel_errors = 1;
        return Ok(out);
    }

    let q = 1.0 / m.bins;
    let p = match m.rule {
        DecodingRule::Typicality => {
            if !m.src_bounds.accepts_cells(u.iter().zip(&v).map(|(&a, &b)| a as usize * m.nv + b as usize)) {
                out.diag.atypical_sources[0] = 1;
                out.wrong = true;
                return Ok(out);
            }
            let competitors = m.types.ln_mass(&m.source_columns(&v, true)).exp() - 1.0;
            win_probability(competitors, 0.0, q, 0.0)
        }
        DecodingRule::MaximumLikelihood => {
            let target: f64 = u.iter().zip(&v).map(|(&a, &b)| m.ln_p_u_given_v(a as usize, b as usize)).sum();
            let (above, equal) = m.types.ln_mass_vs(&m.source_columns(&v, false), target)?;
            win_probability(above.exp(), (equal.exp() - 1.0).max(0.0), q, q)
        }
    };
    if r.random::<f64>() >= p {
        out.wrong = true;
        out.diag.ambiguities[0] = 1;
    }
    Ok(out)
}

/// Picks uniformly among the maximizers of `score` over `items`.
fn argmax_uniform<R: Rng>(items: impl Iterator<Item = (usize, f64)>, r: &mut R) -> Option<usize> {
    let mut best = f64::NEG_INFINITY;
    let mut ties: Vec<usize> = Vec::new();
    for (i, s) in items {
        if s > best + SCORE_TOL {
            best = s;
            ties.clear();
            ties.push(i);
        } else if (s - best).abs() <= SCORE_TOL && s > f64::NEG_INFINITY {
            ties.push(i);
        }
    }
    (!ties.is_empty()).then(|| ties[r.random_range(0..ties.len())])
}

fn letters(mut idx: usize, k: usize, n: usize) -> Vec<u8> {
    let mut s = vec![0u8; n];
    for i in (0..n).rev() {
        s[i] = (idx % k) as u8;
        idx /= k;
    }
    s
}

fn explicit_trial(m: &Model, seed: u64, code_seed: u64, t: u64) -> Outcome {
    let mut r = rng::stream(seed, &[t, 0]);
    let mut rc = rng::stream(code_seed, &[]);
    let space = m.nu.pow(m.n as u32);
    let (n_bins, n_words) = (m.bins as u32, m.words as usize);
    let bins: Vec<u32> = (0..space).map(|_| rc.random_range(0..n_bins)).collect();
    let book: Vec<Vec<u8>> = (0..n_words).map(|_| (0..m.n).map(|_| sample(&m.p_x, &mut rc) as u8).collect()).collect();

    let (u, v) = draw_source(m, &mut r);
    let u_idx = u.iter().fold(0usize, |a, &c| a * m.nu + c as usize);
    let b = bins[u_idx] as usize;
    let y = through_channel(m, &book[b], &mut r);
    let mut out = Outcome::default();

    let b_hat = match m.rule {
        DecodingRule::Typicality => {
            let hits: Vec<usize> = (0..n_words)
                .filter(|&i| m.ch_bounds.accepts_cells(book[i].iter().zip(&y).map(|(&a, &c)| a as usize * m.ny + c as usize)))
                .collect();
            (hits.len() == 1).then(|| hits[0])
        }
        DecodingRule::MaximumLikelihood => {
            let scores = (0..n_words).map(|i| (i, book[i].iter().zip(&y).map(|(&a, &c)| m.ln_p_y_given_x(a as usize, c as usize)).sum()));
            argmax_uniform(scores, &mut r)
        }
    };
    if b_hat != Some(b) {
        out.wrong = true;
        out.diag.channel_errors = 1;
        return out;
    }
    let in_bin = (0..space).filter(|&i| bins[i] as usize == b);
    let u_hat = match m.rule {
        DecodingRule::Typicality => {
            if !m.src_bounds.accepts_cells(u.iter().zip(&v).map(|(&a, &c)| a as usize * m.nv + c as usize)) {
                out.diag.atypical_sources[0] = 1;
            }
            let hits: Vec<usize> = in_bin
                .filter(|&i| m.src_bounds.accepts_cells(letters(i, m.nu, m.n).iter().zip(&v).map(|(&a, &c)| a as usize * m.nv + c as usize)))
                .collect();
            if hits.len() > 1 {
                out.diag.ambiguities[0] = 1;
            }
            (hits.len() == 1).then(|| hits[0])
        }
        DecodingRule::MaximumLikelihood => {
            let scores = in_bin.map(|i| (i, letters(i, m.nu, m.n).iter().zip(&v).map(|(&a, &c)| m.ln_p_u_given_v(a as usize, c as usize)).sum()));
            argmax_uniform(scores, &mut r)
        }
    };
    out.wrong = u_hat != Some(u_idx);
    out
}

/// Bins the source at rate `r_s`, sends the bin index over `channel` with a
/// random code of rate `r_c` and uniform inputs, and decodes the source from
/// the bin and the receiver's side information.
///
/// `channel` must have one input and one output axis. The `rates` field of
/// `cfg` is not used.
pub fn simulate_slepianwolf_separation(src: &SourceSpec, channel: &CondPmf, r_s: f64, r_c: f64, cfg: &SimConfig) -> Result<SimResult> {
    let params = cfg.validate()?;
    if channel.inputs().len() != 1 || channel.outputs().len() != 1 {
        return Err(Error::Configuration("the separation pipeline needs a point-to-point channel".into()));
    }
    if !(r_s.is_finite() && r_c.is_finite() && r_s >= 0.0 && r_c >= 0.0) {
        return Err(Error::Configuration("rates must be finite and nonnegative".into()));
    }
    if r_s > r_c + 1e-12 {
        return Err(Error::Configuration(format!("source rate {r_s} exceeds channel rate {r_c}")));
    }
    let (nu, nv) = (src.u().size(), src.v().size());
    let (nx, ny) = (channel.in_size(), channel.out_size());
    for (s, what) in [(nu, "U"), (nv, "V"), (nx, "X"), (ny, "Y")] {
        check_alphabet(s, what)?;
    }
    let n = params.n;
    let p_uv = src.joint().mass().to_vec();
    let p_v: Vec<f64> = (0..nv).map(|b| (0..nu).map(|a| p_uv[a * nv + b]).sum()).collect();
    let p_u_given_v = (0..nu * nv).map(|c| if p_v[c % nv] > 0.0 { p_uv[c] / p_v[c % nv] } else { 0.0 }).collect();
    let p_x = vec![1.0 / nx as f64; nx];
    let channel_k = channel.kernel().to_vec();
    let p_xy: Vec<f64> = (0..nx * ny).map(|c| p_x[c / ny] * channel_k[c]).collect();
    let m = Model {
        n,
        nu,
        nv,
        nx,
        ny,
        src_bounds: Bounds::new(&p_uv, n, params.delta),
        ch_bounds: Bounds::new(&p_xy, n, params.delta),
        p_uv,
        p_u_given_v,
        p_x,
        channel: channel_k,
        bins: codebook_size(n, r_s),
        words: codebook_size(n, r_c),
        types: Types::new(n),
        rule: cfg.decoding,
    };
    let outcomes: Vec<Outcome> = match cfg.binning {
        BinningMode::Counting => (0..cfg.trials as u64).into_par_iter().map(|t| counting_trial(&m, cfg.seed, t)).collect::<Result<_>>()?,
        BinningMode::Explicit => {
            let space = (nu as f64).powi(n as i32);
            let largest = space.max(m.words).max(m.bins);
            if largest > EXPLICIT_CAP as f64 {
                return Err(Error::Size { cells: largest as u128, cap: EXPLICIT_CAP });
            }
            (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| {
                    let code_seed = match cfg.codebook {
                        CodebookMode::FreshPerTrial => rng::derive(cfg.seed, &[t, 1]),
                        CodebookMode::Fixed => rng::derive(cfg.seed, &[u64::MAX]),
                    };
                    explicit_trial(&m, cfg.seed, code_seed, t)
                })
                .collect()
        }
    };
    let mut diag = Diagnostics::default();
    let mut wrong = 0;
    for o in &outcomes {
        wrong += o.wrong as u64;
        diag.atypical_sources[0] += o.diag.atypical_sources[0];
        diag.ambiguities[0] += o.diag.ambiguities[0];
        diag.channel_errors += o.diag.channel_errors;
    }
    Ok(SimResult::from_counts(cfg.trials as u64, [wrong, 0], wrong, diag))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_sums_match_brute_force() {
        // Sequences of length 6 over {0,1}: count those with two or three ones.
        let t = Types::new(6);
        let col = Column { m: 6, lo: vec![3, 2], hi: vec![4, 3], log_w: vec![0.0, 0.0], score: vec![0.0, 0.0] };
        assert!((t.ln_mass(&[col]).exp() - 35.0).abs() < 1e-9);
        // Weighted: P(Binomial(6, 0.3) = 2).
        let col = Column { m: 6, lo: vec![4, 2], hi: vec![4, 2], log_w: vec![0.7f64.ln(), 0.3f64.ln()], score: vec![0.0, 0.0] };
        let want = 15.0 * 0.7f64.powi(4) * 0.09;
        assert!((t.ln_mass(&[col]).exp() - want).abs() < 1e-12);
    }

    #[test]
    fn tie_formula_matches_binomial_sum() {
        let (k, e) = (7.0f64, 0.3f64);
        let direct: f64 = (0..=7)
            .map(|j| {
                let c = (1..=7).product::<u64>() as f64 / ((1..=j).product::<u64>() * (1..=7 - j).product::<u64>()) as f64;
                c * e.powi(j as i32) * (1.0 - e).powi(7 - j as i32) / (j as f64 + 1.0)
            })
            .sum();
        assert!((win_probability(0.0, k, 0.0, e) - direct).abs() < 1e-12);
    }
}
