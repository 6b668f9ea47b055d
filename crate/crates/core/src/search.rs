//! Feasibility search over auxiliary distributions.
//!
//! Every scheme is a list of probability rows (one simplex each). The climber
//! perturbs one row at a time, keeps strictly improving moves and maximizes
//! the smallest margin. Restarts run in parallel on independent streams and
//! the best result is merged by restart index.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::polytope::InequalitySystem;
use crate::prob::{Alphabet, ChannelSpec, CondPmf, SourceSpec};
use crate::regions::{self, AuxScheme, AuxSchemeSep, RegionReport, TauResult, ZScheme, DEFAULT_EPS};
use crate::{rng, simplex, Error, Result};

/// Upper limit on schemes enumerated by grid modes.
pub const GRID_CAP: u128 = 2_000_000;

/// Auxiliary alphabet sizes. `None` picks the defaults: `|Q| = 2`,
/// `|W_k| = |U_k| |X_k|`, `|WB_k| = |U_k|`, `|WT_k| = |X_k|`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Cardinalities {
    pub q: Option<usize>,
    pub w1: Option<usize>,
    pub w2: Option<usize>,
    pub wb1: Option<usize>,
    pub wb2: Option<usize>,
    pub wt1: Option<usize>,
    pub wt2: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    HillClimb,
    /// Every row ranges over the simplex grid with this denominator.
    Grid { steps: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig<S> {
    pub cards: Cardinalities,
    pub restarts: usize,
    pub iterations: usize,
    pub initial_step: f64,
    pub final_step: f64,
    pub seed: u64,
    pub mode: SearchMode,
    pub eps: f64,
    /// Starting point of restart 0.
    pub initial: Option<S>,
}

impl<S> Default for SearchConfig<S> {
    fn default() -> Self {
        Self {
            cards: Cardinalities::default(),
            restarts: 8,
            iterations: 400,
            initial_step: 0.5,
            final_step: 1e-3,
            seed: 0,
            mode: SearchMode::HillClimb,
            eps: DEFAULT_EPS,
            initial: None,
        }
    }
}

impl<S> SearchConfig<S> {
    fn validate(&self) -> Result<()> {
        let c = &self.cards;
        if [c.q, c.w1, c.w2, c.wb1, c.wb2, c.wt1, c.wt2].iter().any(|x| *x == Some(0)) {
            return Err(Error::Configuration("cardinalities must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Configuration("at least one restart is required".into()));
        }
        if !(self.initial_step > 0.0 && self.final_step > 0.0) {
            return Err(Error::Configuration("step scales must be positive".into()));
        }
        if let SearchMode::Grid { steps: 0 } = self.mode {
            return Err(Error::Configuration("grid denominator must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<S> {
    pub best: S,
    pub best_min_margin: f64,
    pub margins: RegionReport,
    pub evaluations: u64,
    pub converged: bool,
}

/// A scheme family parameterized by probability rows.
trait Family: Sync {
    type Scheme: Clone + Send + Sync;
    fn layout(&self) -> &[usize];
    fn build(&self, rows: &[Vec<f64>]) -> Result<Self::Scheme>;
    fn encode(&self, scheme: &Self::Scheme) -> Result<Vec<Vec<f64>>>;
    fn evaluate(&self, scheme: &Self::Scheme, eps: f64) -> Result<RegionReport>;

    fn score(&self, rows: &[Vec<f64>], eps: f64) -> Result<f64> {
        Ok(self.evaluate(&self.build(rows)?, eps)?.min_margin())
    }
}

fn kernel_rows(k: &CondPmf) -> Vec<Vec<f64>> {
    k.rows().map(<[f64]>::to_vec).collect()
}

fn check_layout(rows: &[Vec<f64>], layout: &[usize]) -> Result<()> {
    if rows.len() != layout.len() || rows.iter().zip(layout).any(|(r, &l)| r.len() != l) {
        return Err(Error::Configuration("initial scheme does not match the configured cardinalities".into()));
    }
    Ok(())
}

struct Theorem2Family<'a> {
    src1: &'a SourceSpec,
    src2: &'a SourceSpec,
    ch: &'a ChannelSpec,
    nq: usize,
    nw1: usize,
    nw2: usize,
    layout: Vec<usize>,
}

impl<'a> Theorem2Family<'a> {
    fn new(src1: &'a SourceSpec, src2: &'a SourceSpec, ch: &'a ChannelSpec, c: &Cardinalities) -> Self {
        let (nu1, nu2) = (src1.u().size(), src2.u().size());
        let (nx1, nx2) = (ch.x1().size(), ch.x2().size());
        let nq = c.q.unwrap_or(2);
        let nw1 = c.w1.unwrap_or(nu1 * nx1);
        let nw2 = c.w2.unwrap_or(nu2 * nx2);
        let mut layout = vec![nq];
        layout.extend(std::iter::repeat_n(nw1 * nx1, nu1 * nq));
        layout.extend(std::iter::repeat_n(nw2 * nx2, nu2 * nq));
        Self { src1, src2, ch, nq, nw1, nw2, layout }
    }
}

impl Family for Theorem2Family<'_> {
    type Scheme = AuxScheme;

    fn layout(&self) -> &[usize] {
        &self.layout
    }

    fn build(&self, rows: &[Vec<f64>]) -> Result<AuxScheme> {
        let q = Alphabet::indexed("Q", self.nq)?;
        let n1 = self.src1.u().size() * self.nq;
        let k = |w: &str, nw: usize, x: &Alphabet, u: &str, nu: usize, rs: &[Vec<f64>]| {
            CondPmf::from_rows(
                vec![Alphabet::indexed(w, nw)?, x.clone()],
                vec![Alphabet::indexed(u, nu)?, q.clone()],
                rs,
            )
        };
        let w1x1 = k("W1", self.nw1, self.ch.x1(), "U1", self.src1.u().size(), &rows[1..1 + n1])?;
        let w2x2 = k("W2", self.nw2, self.ch.x2(), "U2", self.src2.u().size(), &rows[1 + n1..])?;
        AuxScheme::new(q.clone(), rows[0].clone(), w1x1, w2x2)
    }

    fn encode(&self, s: &AuxScheme) -> Result<Vec<Vec<f64>>> {
        let mut rows = vec![s.p_q().to_vec()];
        rows.extend(kernel_rows(s.w1x1()));
        rows.extend(kernel_rows(s.w2x2()));
        check_layout(&rows, &self.layout)?;
        Ok(rows)
    }

    fn evaluate(&self, s: &AuxScheme, eps: f64) -> Result<RegionReport> {
        regions::theorem2_margins(self.src1, self.src2, self.ch, s, eps)
    }
}

struct Corollary1Family<'a> {
    src1: &'a SourceSpec,
    src2: &'a SourceSpec,
    ch: &'a ChannelSpec,
    nq: usize,
    nb: [usize; 2],
    nt: [usize; 2],
    layout: Vec<usize>,
}

impl<'a> Corollary1Family<'a> {
    fn new(src1: &'a SourceSpec, src2: &'a SourceSpec, ch: &'a ChannelSpec, c: &Cardinalities) -> Self {
        let (nu1, nu2) = (src1.u().size(), src2.u().size());
        let (nx1, nx2) = (ch.x1().size(), ch.x2().size());
        let nq = c.q.unwrap_or(2);
        let nb = [c.wb1.unwrap_or(nu1), c.wb2.unwrap_or(nu2)];
        let nt = [c.wt1.unwrap_or(nx1), c.wt2.unwrap_or(nx2)];
        let mut layout = vec![nq];
        layout.extend(std::iter::repeat_n(nb[0], nu1 * nq));
        layout.extend(std::iter::repeat_n(nb[1], nu2 * nq));
        layout.extend(std::iter::repeat_n(nt[0] * nx1, nq));
        layout.extend(std::iter::repeat_n(nt[1] * nx2, nq));
        Self { src1, src2, ch, nq, nb, nt, layout }
    }
}

impl Family for Corollary1Family<'_> {
    type Scheme = AuxSchemeSep;

    fn layout(&self) -> &[usize] {
        &self.layout
    }

    fn build(&self, rows: &[Vec<f64>]) -> Result<AuxSchemeSep> {
        let q = Alphabet::indexed("Q", self.nq)?;
        let (nu1, nu2) = (self.src1.u().size(), self.src2.u().size());
        let mut at = 1;
        let mut take = |n: usize| {
            let r = &rows[at..at + n];
            at += n;
            r
        };
        let wb1 = CondPmf::from_rows(vec![Alphabet::indexed("WB1", self.nb[0])?], vec![Alphabet::indexed("U1", nu1)?, q.clone()], take(nu1 * self.nq))?;
        let wb2 = CondPmf::from_rows(vec![Alphabet::indexed("WB2", self.nb[1])?], vec![Alphabet::indexed("U2", nu2)?, q.clone()], take(nu2 * self.nq))?;
        let wt1x1 = CondPmf::from_rows(vec![Alphabet::indexed("WT1", self.nt[0])?, self.ch.x1().clone()], vec![q.clone()], take(self.nq))?;
        let wt2x2 = CondPmf::from_rows(vec![Alphabet::indexed("WT2", self.nt[1])?, self.ch.x2().clone()], vec![q.clone()], take(self.nq))?;
        AuxSchemeSep::new(q.clone(), rows[0].clone(), wb1, wb2, wt1x1, wt2x2)
    }

    fn encode(&self, s: &AuxSchemeSep) -> Result<Vec<Vec<f64>>> {
        let mut rows = vec![s.p_q().to_vec()];
        for k in [s.wb1(), s.wb2(), s.wt1x1(), s.wt2x2()] {
            rows.extend(kernel_rows(k));
        }
        check_layout(&rows, &self.layout)?;
        Ok(rows)
    }

    fn evaluate(&self, s: &AuxSchemeSep, eps: f64) -> Result<RegionReport> {
        regions::corollary1_margins(self.src1, self.src2, self.ch, s, eps)
    }
}

fn random_rows<R: Rng + ?Sized>(layout: &[usize], sparse: bool, rng: &mut R) -> Vec<Vec<f64>> {
    layout
        .iter()
        .map(|&k| {
            if sparse {
                simplex::vertex(k, rng.random_range(0..k))
            } else {
                simplex::random_point(k, rng)
            }
        })
        .collect()
}

/// Perturbs one randomly chosen row in place.
fn perturb<R: Rng + ?Sized>(rows: &mut [Vec<f64>], movable: &[usize], step: f64, rng: &mut R) {
    let r = movable[rng.random_range(0..movable.len())];
    let row = &mut rows[r];
    let k = row.len();
    match rng.random_range(0..4) {
        0 => {
            for x in row.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *x += step * z;
            }
            simplex::project(row);
        }
        1 => {
            // Jump to a vertex.
            *row = simplex::vertex(k, rng.random_range(0..k));
        }
        _ => {
            let i = rng.random_range(0..k);
            let j = (i + 1 + rng.random_range(0..k - 1)) % k;
            let z: f64 = rng.sample::<f64, _>(StandardNormal).abs();
            let t = row[i].min(step * z);
            row[i] -= t;
            row[j] += t;
        }
    }
}

struct Climb {
    rows: Vec<Vec<f64>>,
    score: f64,
    evaluations: u64,
    converged: bool,
}

fn climb<F: Family>(fam: &F, start: Vec<Vec<f64>>, cfg: &SearchConfig<F::Scheme>, stream: u64) -> Result<Climb> {
    let mut r = rng::stream(cfg.seed, &[stream]);
    let movable: Vec<usize> = (0..start.len()).filter(|&i| start[i].len() > 1).collect();
    let mut rows = start;
    let mut score = fam.score(&rows, cfg.eps)?;
    let mut evaluations = 1;
    let mut last_improvement = 0;
    if !movable.is_empty() {
        let ratio = cfg.final_step / cfg.initial_step;
        for it in 0..cfg.iterations {
            let frac = if cfg.iterations > 1 { it as f64 / (cfg.iterations - 1) as f64 } else { 0.0 };
            let step = cfg.initial_step * ratio.powf(frac);
            let mut cand = rows.clone();
            perturb(&mut cand, &movable, step, &mut r);
            let s = fam.score(&cand, cfg.eps)?;
            evaluations += 1;
            if s > score {
                if s - score > 1e-9 {
                    last_improvement = it;
                }
                rows = cand;
                score = s;
            }
        }
    }
    let converged = cfg.iterations == 0 || last_improvement * 4 < cfg.iterations * 3;
    Ok(Climb { rows, score, evaluations, converged })
}

fn run<F: Family>(fam: &F, cfg: &SearchConfig<F::Scheme>) -> Result<SearchResult<F::Scheme>> {
    cfg.validate()?;
    let (rows, evaluations, converged) = match cfg.mode {
        SearchMode::HillClimb => {
            let initial = cfg.initial.as_ref().map(|s| fam.encode(s)).transpose()?;
            let climbs = (0..cfg.restarts)
                .into_par_iter()
                .map(|i| {
                    let start = match (&initial, i) {
                        (Some(rows), 0) => rows.clone(),
                        _ => random_rows(fam.layout(), i % 2 == 1, &mut rng::stream(cfg.seed, &[i as u64, 1])),
                    };
                    climb(fam, start, cfg, i as u64)
                })
                .collect::<Result<Vec<_>>>()?;
            let evaluations = climbs.iter().map(|c| c.evaluations).sum();
            let mut best = 0;
            for (i, c) in climbs.iter().enumerate() {
                if c.score > climbs[best].score {
                    best = i;
                }
            }
            let c = climbs.into_iter().nth(best).expect("at least one restart");
            (c.rows, evaluations, c.converged)
        }
        SearchMode::Grid { steps } => {
            let (rows, evaluations) = grid_search(fam, steps, cfg.eps)?;
            (rows, evaluations, true)
        }
    };
    let best = fam.build(&rows)?;
    let margins = fam.evaluate(&best, cfg.eps)?;
    Ok(SearchResult { best_min_margin: margins.min_margin(), best, margins, evaluations, converged })
}

/// Exhaustive search over per-row simplex grids, first best kept.
fn grid_search<F: Family>(fam: &F, steps: usize, eps: f64) -> Result<(Vec<Vec<f64>>, u64)> {
    let total = fam.layout().iter().fold(1u128, |a, &k| a.saturating_mul(simplex::grid_len(k, steps)));
    if total > GRID_CAP {
        return Err(Error::Size { cells: total, cap: GRID_CAP as usize });
    }
    let grids: Vec<Vec<Vec<f64>>> = fam.layout().iter().map(|&k| simplex::grid(k, steps)).collect();
    let decode = |mut idx: usize| -> Vec<Vec<f64>> {
        let mut rows = vec![Vec::new(); grids.len()];
        for (r, g) in grids.iter().enumerate().rev() {
            rows[r] = g[idx % g.len()].clone();
            idx /= g.len();
        }
        rows
    };
    let scores = (0..total as usize)
        .into_par_iter()
        .map(|i| fam.score(&decode(i), eps))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    Ok((decode(best), total as u64))
}

pub fn search_theorem2(
    src1: &SourceSpec,
    src2: &SourceSpec,
    ch: &ChannelSpec,
    cfg: &SearchConfig<AuxScheme>,
) -> Result<SearchResult<AuxScheme>> {
    run(&Theorem2Family::new(src1, src2, ch, &cfg.cards), cfg)
}

pub fn search_corollary1(
    src1: &SourceSpec,
    src2: &SourceSpec,
    ch: &ChannelSpec,
    cfg: &SearchConfig<AuxSchemeSep>,
) -> Result<SearchResult<AuxSchemeSep>> {
    run(&Corollary1Family::new(src1, src2, ch, &cfg.cards), cfg)
}

/// Random scheme with Dirichlet(1) rows at the given cardinalities.
pub fn random_aux_scheme<R: Rng + ?Sized>(
    src1: &SourceSpec,
    src2: &SourceSpec,
    ch: &ChannelSpec,
    cards: &Cardinalities,
    rng: &mut R,
) -> Result<AuxScheme> {
    let fam = Theorem2Family::new(src1, src2, ch, cards);
    fam.build(&random_rows(fam.layout(), false, rng))
}

/// Random separated scheme with Dirichlet(1) rows.
pub fn random_aux_scheme_sep<R: Rng + ?Sized>(
    src1: &SourceSpec,
    src2: &SourceSpec,
    ch: &ChannelSpec,
    cards: &Cardinalities,
    rng: &mut R,
) -> Result<AuxSchemeSep> {
    let fam = Corollary1Family::new(src1, src2, ch, cards);
    fam.build(&random_rows(fam.layout(), false, rng))
}

/// Lemma-2 regions over a grid of `p(w) p(x1|w)`, keeping only schemes whose
/// bound triple `(R1s+R1p, R2p, R1p+R2p)` is not dominated by another's.
pub fn maximize_lemma2_union(
    ch: &ChannelSpec,
    card_w: usize,
    steps: usize,
    tau: &TauResult,
) -> Result<Vec<(ZScheme, InequalitySystem)>> {
    if card_w == 0 || steps == 0 {
        return Err(Error::Configuration("cardinality and grid denominator must be at least 1".into()));
    }
    if !tau.condition2_holds {
        return Err(Error::Precondition("Condition 2 fails for this channel".into()));
    }
    let nx1 = ch.x1().size();
    let total = simplex::grid_len(card_w, steps).saturating_mul(simplex::grid_len(nx1, steps).saturating_pow(card_w as u32));
    if total > GRID_CAP {
        return Err(Error::Size { cells: total, cap: GRID_CAP as usize });
    }
    let gw = simplex::grid(card_w, steps);
    let gx = simplex::grid(nx1, steps);
    let w = Alphabet::indexed("W", card_w)?;
    let x1 = ch.x1().clone();
    let build = |i: usize| -> Result<ZScheme> {
        let mut idx = i;
        let mut rows = vec![Vec::new(); card_w];
        for r in rows.iter_mut().rev() {
            *r = gx[idx % gx.len()].clone();
            idx /= gx.len();
        }
        let k = CondPmf::from_rows(vec![x1.clone()], vec![w.clone()], &rows)?;
        ZScheme::new(w.clone(), gw[idx].clone(), k)
    };
    let evaluated = (0..total as usize)
        .into_par_iter()
        .map(|i| {
            let zs = build(i)?;
            let t = regions::z_terms(ch, &zs, &tau.p_star)?;
            Ok((i, [t.i_x1_y1, t.i_wx2_y2, t.i_x1_y1_given_w + t.i_wx2_y2]))
        })
        .collect::<Result<Vec<_>>>()?;
    const TOL: f64 = 1e-12;
    let dominates = |a: &[f64; 3], b: &[f64; 3]| a.iter().zip(b).all(|(x, y)| *x >= y - TOL);
    let mut kept: Vec<(usize, [f64; 3])> = Vec::new();
    for (i, b) in evaluated {
        if kept.iter().any(|(_, k)| dominates(k, &b)) {
            continue;
        }
        kept.retain(|(_, k)| !dominates(&b, k));
        kept.push((i, b));
    }
    kept.into_iter()
        .map(|(i, _)| {
            let zs = build(i)?;
            let region = regions::lemma2_region(ch, &zs, tau)?;
            Ok((zs, region))
        })
        .collect()
}
