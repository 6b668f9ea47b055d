use std::fmt::Write as _;

use icsi::polytope::InequalitySystem;
use icsi::prob::{ChannelKind, ChannelSpec, SourceSpec};
use icsi::regions::{self, RegionReport, TauResult, Verdict};
use icsi::search::{self, SearchConfig, SearchMode};
use icsi::sim::{self, SimConfig, SimResult};
use icsi::rng;

use crate::doc::{Channel, SpecDocument};
use crate::CliError;

/// What a command prints, the table it can save, and its exit status.
pub struct Outcome {
    pub report: String,
    pub table: Table,
    /// 0 success or feasible, 1 checked and negative.
    pub status: u8,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| CliError::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Shortest round-trip form, with negative zero and sub-1e-12 noise shown as 0.
fn num(x: f64) -> String {
    if x.abs() < 1e-12 {
        "0".into()
    } else {
        format!("{x}")
    }
}

fn bits(x: f64) -> String {
    format!("{:.7}", if x.abs() < 5e-8 { 0.0 } else { x })
}

const TAU_RESOLUTION: f64 = 0.01;
const CONDITION1_SAMPLES: usize = 50;
const CONDITION1_MAX_N: usize = 2;

fn tau(doc: &SpecDocument, ch: &ChannelSpec) -> Result<TauResult, CliError> {
    let res = doc.region_params().tau_resolution.unwrap_or(TAU_RESOLUTION);
    Ok(regions::compute_tau(ch, res)?)
}

fn wiring(s: &SourceSpec) -> &'static str {
    match s.wiring() {
        icsi::prob::SideInfo::Desired => "own receiver",
        icsi::prob::SideInfo::Interfering => "other receiver",
    }
}

pub fn info(doc: &SpecDocument, seed: u64) -> Result<Outcome, CliError> {
    let mut r = String::new();
    let mut t = Table::new(&["quantity", "value"]);
    writeln!(r, "alphabets:").unwrap();
    for a in &doc.alphabets {
        let size = a.labels.as_ref().map_or(a.size.unwrap_or(0), Vec::len);
        writeln!(r, "  {:<8} {size}", a.name).unwrap();
        t.push(vec![format!("|{}|", a.name), size.to_string()]);
    }
    for k in 0..doc.sources.len() {
        let s = doc.source(k)?;
        let i = k + 1;
        writeln!(r, "source {i} (side information at the {}):", wiring(&s)).unwrap();
        for (name, v) in [(format!("H(U{i})"), s.h_u()), (format!("H(U{i}|V{i})"), s.h_u_given_v()), (format!("H(V{i})"), s.h_v())] {
            writeln!(r, "  {name:<10} = {}", bits(v)).unwrap();
            t.push(vec![name, bits(v)]);
        }
    }
    if doc.channel.is_some() {
        match doc.channel()? {
            Channel::PointToPoint(k) => {
                writeln!(r, "channel: point-to-point, |X| = {}, |Y| = {}", k.in_size(), k.out_size()).unwrap();
                t.push(vec!["channel".into(), "point-to-point".into()]);
            }
            Channel::Interference(ch) => {
                let kind = match ch.kind() {
                    ChannelKind::General => "general IC",
                    ChannelKind::ZInterference => "Z-IC",
                };
                writeln!(r, "channel: {kind}").unwrap();
                t.push(vec!["channel".into(), kind.into()]);
                if ch.kind() == ChannelKind::ZInterference {
                    let c1 = regions::check_condition1(&ch, CONDITION1_SAMPLES, CONDITION1_MAX_N, seed)?;
                    let tau = tau(doc, &ch)?;
                    writeln!(r, "condition1: {} ({})", c1.holds, c1.summary()).unwrap();
                    writeln!(r, "condition2: {}", tau.condition2_holds).unwrap();
                    writeln!(r, "tau: {}", bits(tau.tau)).unwrap();
                    let p: Vec<String> = tau.p_star.iter().map(|x| format!("{x:.4}")).collect();
                    writeln!(r, "p*(x2): [{}]", p.join(", ")).unwrap();
                    t.push(vec!["condition1".into(), c1.holds.to_string()]);
                    t.push(vec!["condition2".into(), tau.condition2_holds.to_string()]);
                    t.push(vec!["tau".into(), bits(tau.tau)]);
                }
            }
        }
    }
    Ok(Outcome { report: r, table: t, status: 0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Theorem {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    #[value(name = "c1")]
    C1,
    #[value(name = "c2")]
    C2,
}

fn report_margins(title: &str, m: &RegionReport) -> Outcome {
    let mut r = String::new();
    let mut t = Table::new(&["condition", "margin"]);
    writeln!(r, "{title}").unwrap();
    for (label, v) in &m.margins {
        writeln!(r, "  {:>11}  {label}", bits(*v)).unwrap();
        t.push(vec![label.clone(), num(*v)]);
    }
    writeln!(r, "min margin: {}", bits(m.min_margin())).unwrap();
    writeln!(r, "binding: {}", m.binding().unwrap_or("none")).unwrap();
    writeln!(r, "feasible: {} (eps {:e})", m.feasible, m.eps).unwrap();
    Outcome { report: r, table: t, status: if m.feasible { 0 } else { 1 } }
}

fn report_verdict(title: &str, region: &InequalitySystem, v: &Verdict) -> Outcome {
    let mut r = String::new();
    let mut t = Table::new(&["condition", "margin"]);
    writeln!(r, "{title}").unwrap();
    let point: Vec<String> = region.variables().iter().zip(&v.point).map(|(n, x)| format!("{n}={}", bits(*x))).collect();
    writeln!(r, "point: {}", point.join(", ")).unwrap();
    for row in region.rows().iter().filter(|x| !x.is_nonnegativity()) {
        let m = row.margin(&v.point);
        writeln!(r, "  {:>11}  {}", bits(m), row.label).unwrap();
        t.push(vec![row.label.clone(), num(m)]);
    }
    writeln!(r, "min margin: {}", bits(v.margin)).unwrap();
    writeln!(r, "binding: {}", v.binding.as_deref().unwrap_or("none")).unwrap();
    writeln!(r, "feasible: {}", v.feasible).unwrap();
    Outcome { report: r, table: t, status: if v.feasible { 0 } else { 1 } }
}

pub fn check(doc: &SpecDocument, theorem: Theorem, eps: f64) -> Result<Outcome, CliError> {
    Ok(match theorem {
        Theorem::One => {
            let (s1, s2) = doc.sources()?;
            let region = doc.oracle_region()?.ok_or_else(|| CliError::Missing("oracle_region (the capacity region)".into()))?;
            let v = regions::theorem1_check(&s1, &s2, &region, eps)?;
            report_verdict("separation test: (H(U1|V1), H(U2|V2)) in the interior of the capacity region", &region, &v)
        }
        Theorem::Two => {
            let (s1, s2) = doc.sources()?;
            let ch = doc.interference_channel()?;
            let m = regions::theorem2_margins(&s1, &s2, &ch, &doc.any_aux()?, eps)?;
            report_margins("joint source-channel sufficient conditions", &m)
        }
        Theorem::Three => {
            let (s1, s2) = doc.sources()?;
            let region = match doc.oracle_region()? {
                Some(r) => r,
                None => {
                    let ch = doc.interference_channel()?;
                    let l2 = regions::lemma2_region(&ch, &doc.z_scheme()?, &tau(doc, &ch)?)?;
                    regions::lemma2_as_ci_region(&l2)?
                }
            };
            let v = regions::theorem3_check(&s1, &s2, &region, eps)?;
            report_verdict("deterministic side information: (H(V1), H(U1|V1), H(V2), H(U2|V2)) in the interior", &region, &v)
        }
        Theorem::C1 => {
            let (s1, s2) = doc.sources()?;
            let ch = doc.interference_channel()?;
            let aux = doc.aux_sep()?.ok_or_else(|| CliError::Missing("aux_sep".into()))?;
            let m = regions::corollary1_margins(&s1, &s2, &ch, &aux, eps)?;
            report_margins("separated-scheme sufficient conditions", &m)
        }
        Theorem::C2 => {
            let (s1, s2) = doc.sources()?;
            let ch = doc.interference_channel()?;
            let m = regions::corollary2_margins(&s1, &s2, &ch, &doc.z_scheme()?, &tau(doc, &ch)?, eps)?;
            report_margins("Z channel conditions", &m)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RegionKind {
    #[value(name = "lemma2")]
    Lemma2,
    #[value(name = "zdeg")]
    Zdeg,
    #[value(name = "appE")]
    AppE,
    #[value(name = "g1")]
    G1,
}

pub fn region(doc: &SpecDocument, kind: RegionKind, gamma: Option<f64>) -> Result<Outcome, CliError> {
    let params = doc.region_params();
    let gamma = gamma.or(params.gamma).unwrap_or(0.0);
    let ch = doc.interference_channel()?;
    let system = match kind {
        RegionKind::Lemma2 => regions::lemma2_region(&ch, &doc.z_scheme()?, &tau(doc, &ch)?)?,
        RegionKind::Zdeg => regions::zchannel_degraded_region(&ch, &doc.z_scheme()?, &tau(doc, &ch)?, gamma)?,
        RegionKind::AppE => {
            let p_x2 = match params.p_x2 {
                Some(p) => p,
                None => tau(doc, &ch)?.p_star,
            };
            regions::appendix_e_region(&ch, &doc.z_scheme()?, &p_x2, gamma)?
        }
        RegionKind::G1 => regions::lemma1_inner_bound_n1(&ch, &doc.lemma1()?)?,
    };
    let mut vertices: Vec<Vec<f64>> = system
        .enumerate_vertices()?
        .into_iter()
        .map(|v| v.0.into_iter().map(|x| if x.abs() < 1e-12 { 0.0 } else { x }).collect())
        .collect();
    vertices.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    let mut r = String::new();
    writeln!(r, "region over ({}):", system.variables().join(", ")).unwrap();
    for row in system.rows().iter().filter(|x| !x.is_nonnegativity()) {
        writeln!(r, "  {:<45} rhs {}", row.label, bits(row.bound)).unwrap();
    }
    writeln!(r, "{} vertices", vertices.len()).unwrap();
    let header: Vec<&str> = system.variables().iter().map(String::as_str).collect();
    let mut t = Table::new(&header);
    for v in &vertices {
        let cells: Vec<String> = v.iter().map(|x| num(*x)).collect();
        writeln!(r, "  ({})", cells.join(", ")).unwrap();
        t.push(cells);
    }
    Ok(Outcome { report: r, table: t, status: 0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    #[value(name = "t2")]
    T2,
    #[value(name = "c1")]
    C1,
}

pub struct SearchArgs {
    pub target: Target,
    pub seed: u64,
    pub restarts: Option<usize>,
    pub iterations: Option<usize>,
    pub eps: f64,
}

/// Runs the search; the second value is the input document with the winning
/// scheme in place, ready to be written out.
pub fn search(doc: &SpecDocument, a: &SearchArgs) -> Result<(Outcome, SpecDocument), CliError> {
    let (s1, s2) = doc.sources()?;
    let ch = doc.interference_channel()?;
    let p = doc.search_params();
    let mode = p.grid_steps.map_or(SearchMode::HillClimb, |steps| SearchMode::Grid { steps });
    let defaults = SearchConfig::<()>::default();
    let restarts = a.restarts.or(p.restarts).unwrap_or(defaults.restarts);
    let iterations = a.iterations.or(p.iterations).unwrap_or(defaults.iterations);
    let mut out = doc.clone();
    let (title, margins, best, evaluations) = match a.target {
        Target::T2 => {
            let cfg = SearchConfig { cards: p.cards.to_core(), restarts, iterations, seed: a.seed, mode, eps: a.eps, ..Default::default() };
            let res = search::search_theorem2(&s1, &s2, &ch, &cfg)?;
            out.set_aux(&res.best);
            ("joint scheme search", res.margins, res.best_min_margin, res.evaluations)
        }
        Target::C1 => {
            let cfg = SearchConfig { cards: p.cards.to_core(), restarts, iterations, seed: a.seed, mode, eps: a.eps, ..Default::default() };
            let res = search::search_corollary1(&s1, &s2, &ch, &cfg)?;
            out.set_aux_sep(&res.best);
            ("separated scheme search", res.margins, res.best_min_margin, res.evaluations)
        }
    };
    let mut o = report_margins(title, &margins);
    o.report = format!("best min margin: {} after {evaluations} evaluations\n{}", bits(best), o.report);
    Ok((o, out))
}

pub struct SimArgs {
    pub n: Vec<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub delta: Option<f64>,
}

pub fn simulate(doc: &SpecDocument, a: &SimArgs) -> Result<Outcome, CliError> {
    let p = doc.sim_params();
    let defaults = SimConfig::default();
    let ns = if a.n.is_empty() { p.n.clone().unwrap_or_else(|| vec![defaults.n]) } else { a.n.clone() };
    let base = SimConfig {
        n: defaults.n,
        delta: a.delta.or(p.delta).unwrap_or(defaults.delta),
        rates: p.rates.unwrap_or(defaults.rates),
        trials: a.trials.or(p.trials).unwrap_or(defaults.trials),
        seed: a.seed.or(p.seed).unwrap_or(defaults.seed),
        codebook: p.codebook.unwrap_or_default(),
        decoding: p.decoding.unwrap_or_default(),
        binning: p.binning.unwrap_or_default(),
    };
    enum Run {
        Joint(SourceSpec, SourceSpec, ChannelSpec, regions::AuxScheme),
        Separation(SourceSpec, icsi::prob::CondPmf, f64, f64),
    }
    let run = match doc.channel()? {
        Channel::Interference(ch) => {
            let (s1, s2) = doc.sources()?;
            Run::Joint(s1, s2, ch, doc.any_aux()?)
        }
        Channel::PointToPoint(k) => {
            let r_s = p.source_rate.ok_or_else(|| CliError::Missing("sim.source_rate".into()))?;
            Run::Separation(doc.source(0)?, k, r_s, p.channel_rate.unwrap_or(r_s))
        }
    };
    let mut r = String::new();
    let mut t = Table::new(&["n", "trials", "errors_rx1", "errors_rx2", "p_err", "ci_halfwidth"]);
    match &run {
        Run::Joint(..) => writeln!(r, "joint scheme simulation, rates {:?}, delta {}", base.rates, base.delta).unwrap(),
        Run::Separation(_, _, r_s, r_c) => writeln!(r, "separation pipeline, source rate {r_s}, channel rate {r_c}, delta {}", base.delta).unwrap(),
    }
    for &n in &ns {
        let cfg = SimConfig { n, ..base.clone() };
        let res: SimResult = match &run {
            Run::Joint(s1, s2, ch, aux) => sim::simulate_theorem2_scheme(s1, s2, ch, aux, &cfg)?,
            Run::Separation(s, k, r_s, r_c) => sim::simulate_slepianwolf_separation(s, k, *r_s, *r_c, &cfg)?,
        };
        writeln!(
            r,
            "n={n}: p_err {:.4} +/- {:.4} over {} trials, errors {:?}",
            res.p_err, res.ci_halfwidth, res.trials, res.errors
        )
        .unwrap();
        writeln!(r, "  diagnostics: {}", serde_json::to_string(&res.diagnostics).expect("diagnostics serialize")).unwrap();
        t.push(vec![
            n.to_string(),
            res.trials.to_string(),
            res.errors[0].to_string(),
            res.errors[1].to_string(),
            num(res.p_err),
            num(res.ci_halfwidth),
        ]);
    }
    Ok(Outcome { report: r, table: t, status: 0 })
}

/// Tolerance for the projected-versus-direct comparison.
const FM_TOL: f64 = 1e-9;

pub fn fm_verify(doc: &SpecDocument, instantiations: usize, seed: u64, corrupt: Option<f64>) -> Result<Outcome, CliError> {
    let (s1, s2) = doc.sources()?;
    let ch = doc.interference_channel()?;
    let cards = doc.search_params().cards.to_core();
    let mut r = String::new();
    let mut t = Table::new(&["instance", "equal"]);
    let mut mismatches = 0;
    for i in 0..instantiations {
        let aux = search::random_aux_scheme(&s1, &s2, &ch, &cards, &mut rng::stream(seed, &[i as u64]))?;
        let terms = regions::theorem2_terms(&s1, &s2, &ch, &aux)?;
        let direct = match corrupt {
            Some(shift) => shifted_bounds(&terms.system(), shift)?,
            None => terms.system(),
        };
        let check = regions::verify_fm_projection(&terms.appendix_b_system(), &direct, terms.box_edge(), FM_TOL)?;
        if !check.equal {
            mismatches += 1;
            writeln!(r, "instance {i}: projection differs from the direct system").unwrap();
        }
        t.push(vec![i.to_string(), check.equal.to_string()]);
    }
    writeln!(r, "{}/{instantiations} instances agree", instantiations - mismatches).unwrap();
    Ok(Outcome { report: r, table: t, status: if mismatches == 0 { 0 } else { 1 } })
}

/// Test hook: moves every right-hand side by `shift`.
fn shifted_bounds(s: &InequalitySystem, shift: f64) -> Result<InequalitySystem, CliError> {
    let mut out = InequalitySystem::new(s.variables());
    for row in s.rows() {
        out.push(row.coeffs.clone(), row.bound + shift, row.label.clone())?;
    }
    Ok(out)
}
