//! The JSON spec document and its conversion into core types.

use std::collections::BTreeMap;
use std::path::Path;

use icsi::polytope::InequalitySystem;
use icsi::prob::{Alphabet, ChannelSpec, CondPmf, JointPmf, SideInfo, SourceSpec, DEFAULT_CELL_CAP};
use icsi::regions::{AuxScheme, AuxSchemeSep, Lemma1Scheme, ZScheme};
use icsi::search::Cardinalities;
use icsi::sim::{BinningMode, CodebookMode, DecodingRule};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// Rows may be off by this much; they are rescaled on load.
const LOAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub format_version: u32,
    #[serde(default)]
    pub alphabets: Vec<AlphabetDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<SourceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<AuxDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_sep: Option<AuxSepDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_scheme: Option<ZSchemeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma1: Option<Lemma1Doc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_region: Option<RegionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphabetDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
}

/// `p(outputs | inputs)`, one row per input cell in row-major order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondDoc {
    pub outputs: Vec<String>,
    #[serde(default)]
    pub inputs: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKindDoc {
    General,
    Z,
    PointToPoint,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    pub kind: ChannelKindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_y1y2_given_x1x2: Option<CondDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_y1_given_x1: Option<CondDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_y2_given_x1x2: Option<CondDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_y_given_x: Option<CondDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceDoc {
    pub u: String,
    pub v: String,
    /// Rows indexed by `u`, columns by `v`.
    pub p_uv: Vec<Vec<f64>>,
    pub pi: SideInfo,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuxDoc {
    pub q: String,
    pub p_q: Vec<f64>,
    pub w1x1: CondDoc,
    pub w2x2: CondDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuxSepDoc {
    pub q: String,
    pub p_q: Vec<f64>,
    pub wb1: CondDoc,
    pub wb2: CondDoc,
    pub wt1x1: CondDoc,
    pub wt2x2: CondDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZSchemeDoc {
    pub w: String,
    pub p_w: Vec<f64>,
    pub x1_given_w: CondDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma1Doc {
    pub s1: String,
    pub p_s1: Vec<f64>,
    pub s2: String,
    pub p_s2: Vec<f64>,
    pub x1_given_s1: CondDoc,
    pub x2_given_s2: CondDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowDoc {
    pub coeffs: Vec<f64>,
    pub bound: f64,
    #[serde(default)]
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionDoc {
    pub variables: Vec<String>,
    pub rows: Vec<RowDoc>,
    /// Adds `R >= 0` for every variable.
    #[serde(default)]
    pub nonnegative: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Input law on `X2` for the region that takes one; `p*(x2)` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_x2: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_resolution: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CardsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w2: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wb1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wb2: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wt1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wt2: Option<usize>,
}

impl CardsDoc {
    pub fn to_core(&self) -> Cardinalities {
        Cardinalities { q: self.q, w1: self.w1, w2: self.w2, wb1: self.wb1, wb2: self.wb2, wt1: self.wt1, wt2: self.wt2 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchDoc {
    #[serde(default)]
    pub cards: CardsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    /// Simplex grid denominator; hill climbing when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codebook: Option<CodebookMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoding: Option<DecodingRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binning: Option<BinningMode>,
    /// Separation pipeline only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_rate: Option<f64>,
    /// Separation pipeline only; defaults to the source rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel_rate: Option<f64>,
}

/// The channel a document describes.
pub enum Channel {
    Interference(ChannelSpec),
    PointToPoint(CondPmf),
}

impl SpecDocument {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| e.context(&path.display().to_string()))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: SpecDocument = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(CliError::Parse(format!(
                "format_version {} is not supported (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        doc.alphabet_table()?;
        Ok(doc)
    }

    fn alphabet_table(&self) -> Result<BTreeMap<&str, Alphabet>, CliError> {
        let mut out = BTreeMap::new();
        for (i, a) in self.alphabets.iter().enumerate() {
            let field = format!("alphabets[{i}]");
            let alphabet = match (&a.labels, a.size) {
                (Some(l), None) => Alphabet::new(a.name.clone(), l.clone()),
                (None, Some(s)) => Alphabet::indexed(a.name.clone(), s),
                (Some(l), Some(s)) if l.len() == s => Alphabet::new(a.name.clone(), l.clone()),
                _ => return Err(CliError::Parse(format!("{field}: give `labels` or `size`, consistently"))),
            }
            .map_err(|e| CliError::field(&field, e))?;
            if out.insert(a.name.as_str(), alphabet).is_some() {
                return Err(CliError::Parse(format!("{field}: alphabet `{}` defined twice", a.name)));
            }
        }
        Ok(out)
    }

    fn alphabet(&self, name: &str, field: &str) -> Result<Alphabet, CliError> {
        self.alphabet_table()?
            .remove(name)
            .ok_or_else(|| CliError::Parse(format!("{field}: alphabet `{name}` is not defined")))
    }

    fn cond(&self, c: &CondDoc, field: &str) -> Result<CondPmf, CliError> {
        let lookup = |names: &[String], what: &str| -> Result<Vec<Alphabet>, CliError> {
            names.iter().map(|n| self.alphabet(n, &format!("{field}.{what}"))).collect()
        };
        let (outputs, inputs) = (lookup(&c.outputs, "outputs")?, lookup(&c.inputs, "inputs")?);
        let n_in: usize = inputs.iter().map(Alphabet::size).product();
        let n_out: usize = outputs.iter().map(Alphabet::size).product();
        if c.rows.len() != n_in {
            return Err(CliError::Parse(format!("{field}: expected {n_in} rows, got {}", c.rows.len())));
        }
        for (r, row) in c.rows.iter().enumerate() {
            check_row(row, n_out, &format!("{field}.rows[{r}]"))?;
        }
        let kernel = c.rows.concat();
        match CondPmf::new(outputs.clone(), inputs.clone(), kernel.clone()) {
            Ok(k) => Ok(k),
            Err(_) => CondPmf::renormalized(outputs, inputs, kernel).map_err(|e| CliError::field(field, e)),
        }
    }

    fn pmf(&self, p: &[f64], size: usize, field: &str) -> Result<Vec<f64>, CliError> {
        check_row(p, size, field)?;
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() <= icsi::prob::NORMALIZATION_TOL {
            Ok(p.to_vec())
        } else {
            Ok(p.iter().map(|x| x / s).collect())
        }
    }

    pub fn channel(&self) -> Result<Channel, CliError> {
        let c = self.channel.as_ref().ok_or_else(|| CliError::Missing("channel".into()))?;
        let need = |k: &Option<CondDoc>, name: &str| -> Result<CondPmf, CliError> {
            let field = format!("channel.{name}");
            let doc = k.as_ref().ok_or_else(|| CliError::Parse(format!("{field} is required for this channel kind")))?;
            self.cond(doc, &field)
        };
        let wrap = |e: icsi::Error| CliError::field("channel", e);
        Ok(match c.kind {
            ChannelKindDoc::General => {
                Channel::Interference(ChannelSpec::general(need(&c.p_y1y2_given_x1x2, "p_y1y2_given_x1x2")?).map_err(wrap)?)
            }
            ChannelKindDoc::Z => {
                let f1 = need(&c.p_y1_given_x1, "p_y1_given_x1")?;
                let f2 = need(&c.p_y2_given_x1x2, "p_y2_given_x1x2")?;
                let spec = match &c.p_y1y2_given_x1x2 {
                    Some(_) => ChannelSpec::z_with_joint(need(&c.p_y1y2_given_x1x2, "p_y1y2_given_x1x2")?, f1, f2),
                    None => ChannelSpec::z(f1, f2),
                };
                Channel::Interference(spec.map_err(wrap)?)
            }
            ChannelKindDoc::PointToPoint => {
                let k = need(&c.p_y_given_x, "p_y_given_x")?;
                if k.outputs().len() != 1 || k.inputs().len() != 1 {
                    return Err(CliError::Parse("channel.p_y_given_x needs one output and one input axis".into()));
                }
                Channel::PointToPoint(k)
            }
        })
    }

    pub fn interference_channel(&self) -> Result<ChannelSpec, CliError> {
        match self.channel()? {
            Channel::Interference(c) => Ok(c),
            Channel::PointToPoint(_) => Err(CliError::Missing("an interference channel (kind general or z)".into())),
        }
    }

    pub fn source(&self, k: usize) -> Result<SourceSpec, CliError> {
        let s = self.sources.get(k).ok_or_else(|| CliError::Missing(format!("sources[{k}]")))?;
        let field = format!("sources[{k}]");
        let (u, v) = (self.alphabet(&s.u, &field)?, self.alphabet(&s.v, &field)?);
        if s.p_uv.len() != u.size() {
            return Err(CliError::Parse(format!("{field}.p_uv: expected {} rows, got {}", u.size(), s.p_uv.len())));
        }
        for (r, row) in s.p_uv.iter().enumerate() {
            if row.len() != v.size() {
                return Err(CliError::Parse(format!("{field}.p_uv[{r}]: expected {} entries, got {}", v.size(), row.len())));
            }
        }
        let mass = s.p_uv.concat();
        let joint = JointPmf::with_tolerance(vec![u.clone(), v.clone()], mass.clone(), LOAD_TOL, DEFAULT_CELL_CAP)
            .and_then(|j| if (j.total() - 1.0).abs() > icsi::prob::NORMALIZATION_TOL { j.renormalize() } else { Ok(j) })
            .map_err(|e| CliError::field(&format!("{field}.p_uv"), e))?;
        SourceSpec::new(joint, s.pi, s.h.clone()).map_err(|e| CliError::field(&field, e))
    }

    pub fn sources(&self) -> Result<(SourceSpec, SourceSpec), CliError> {
        Ok((self.source(0)?, self.source(1)?))
    }

    pub fn aux(&self) -> Result<Option<AuxScheme>, CliError> {
        let Some(a) = &self.aux else { return Ok(None) };
        let q = self.alphabet(&a.q, "aux.q")?;
        let p_q = self.pmf(&a.p_q, q.size(), "aux.p_q")?;
        let w1x1 = self.cond(&a.w1x1, "aux.w1x1")?;
        let w2x2 = self.cond(&a.w2x2, "aux.w2x2")?;
        AuxScheme::new(q, p_q, w1x1, w2x2).map(Some).map_err(|e| CliError::field("aux", e))
    }

    pub fn aux_sep(&self) -> Result<Option<AuxSchemeSep>, CliError> {
        let Some(a) = &self.aux_sep else { return Ok(None) };
        let q = self.alphabet(&a.q, "aux_sep.q")?;
        let p_q = self.pmf(&a.p_q, q.size(), "aux_sep.p_q")?;
        let k = |c: &CondDoc, f: &str| self.cond(c, &format!("aux_sep.{f}"));
        AuxSchemeSep::new(q, p_q, k(&a.wb1, "wb1")?, k(&a.wb2, "wb2")?, k(&a.wt1x1, "wt1x1")?, k(&a.wt2x2, "wt2x2")?)
            .map(Some)
            .map_err(|e| CliError::field("aux_sep", e))
    }

    /// The joint scheme, or the separated one folded into joint form.
    pub fn any_aux(&self) -> Result<AuxScheme, CliError> {
        if let Some(a) = self.aux()? {
            return Ok(a);
        }
        match self.aux_sep()? {
            Some(s) => s.to_joint_scheme().map_err(|e| CliError::field("aux_sep", e)),
            None => Err(CliError::Missing("an auxiliary scheme (aux or aux_sep)".into())),
        }
    }

    pub fn z_scheme(&self) -> Result<ZScheme, CliError> {
        let z = self.z_scheme.as_ref().ok_or_else(|| CliError::Missing("z_scheme".into()))?;
        let w = self.alphabet(&z.w, "z_scheme.w")?;
        let p_w = self.pmf(&z.p_w, w.size(), "z_scheme.p_w")?;
        let k = self.cond(&z.x1_given_w, "z_scheme.x1_given_w")?;
        ZScheme::new(w, p_w, k).map_err(|e| CliError::field("z_scheme", e))
    }

    pub fn lemma1(&self) -> Result<Lemma1Scheme, CliError> {
        let l = self.lemma1.as_ref().ok_or_else(|| CliError::Missing("lemma1".into()))?;
        let s1 = self.alphabet(&l.s1, "lemma1.s1")?;
        let s2 = self.alphabet(&l.s2, "lemma1.s2")?;
        let p_s1 = self.pmf(&l.p_s1, s1.size(), "lemma1.p_s1")?;
        let p_s2 = self.pmf(&l.p_s2, s2.size(), "lemma1.p_s2")?;
        let k1 = self.cond(&l.x1_given_s1, "lemma1.x1_given_s1")?;
        let k2 = self.cond(&l.x2_given_s2, "lemma1.x2_given_s2")?;
        Lemma1Scheme::new(s1, p_s1, s2, p_s2, k1, k2).map_err(|e| CliError::field("lemma1", e))
    }

    pub fn oracle_region(&self) -> Result<Option<InequalitySystem>, CliError> {
        let Some(r) = &self.oracle_region else { return Ok(None) };
        let mut s = InequalitySystem::new(&r.variables);
        for (i, row) in r.rows.iter().enumerate() {
            let label = if row.label.is_empty() { format!("row {i}") } else { row.label.clone() };
            s.push(row.coeffs.clone(), row.bound, label).map_err(|e| CliError::field(&format!("oracle_region.rows[{i}]"), e))?;
        }
        if r.nonnegative {
            s.add_nonnegativity();
        }
        Ok(Some(s))
    }

    pub fn region_params(&self) -> RegionParams {
        self.region.clone().unwrap_or_default()
    }

    pub fn search_params(&self) -> SearchDoc {
        self.search.clone().unwrap_or_default()
    }

    pub fn sim_params(&self) -> SimDoc {
        self.sim.clone().unwrap_or_default()
    }

    /// Registers the axes of `k` under fresh names where needed and returns
    /// the kernel in document form.
    fn export_cond(&mut self, k: &CondPmf) -> CondDoc {
        let mut name = |a: &Alphabet| self.export_alphabet(a);
        let outputs = k.outputs().iter().map(&mut name).collect();
        let inputs = k.inputs().iter().map(&mut name).collect();
        CondDoc { outputs, inputs, rows: k.rows().map(<[f64]>::to_vec).collect() }
    }

    fn export_alphabet(&mut self, a: &Alphabet) -> String {
        let fits = |d: &AlphabetDoc| match (&d.labels, d.size) {
            (Some(l), _) => l.as_slice() == a.labels(),
            (None, Some(s)) => s == a.size() && Alphabet::indexed("", s).map(|x| x.labels() == a.labels()).unwrap_or(false),
            _ => false,
        };
        let mut candidate = a.name().to_string();
        let mut k = 1;
        loop {
            match self.alphabets.iter().find(|d| d.name == candidate) {
                Some(d) if fits(d) => return candidate,
                Some(_) => {
                    candidate = format!("{}_{k}", a.name());
                    k += 1;
                }
                None => {
                    self.alphabets.push(AlphabetDoc { name: candidate.clone(), labels: Some(a.labels().to_vec()), size: None });
                    return candidate;
                }
            }
        }
    }

    pub fn set_aux(&mut self, a: &AuxScheme) {
        let q = self.export_alphabet(a.q());
        let w1x1 = self.export_cond(a.w1x1());
        let w2x2 = self.export_cond(a.w2x2());
        self.aux = Some(AuxDoc { q, p_q: a.p_q().to_vec(), w1x1, w2x2 });
    }

    pub fn set_aux_sep(&mut self, a: &AuxSchemeSep) {
        let q = self.export_alphabet(a.q());
        let wb1 = self.export_cond(a.wb1());
        let wb2 = self.export_cond(a.wb2());
        let wt1x1 = self.export_cond(a.wt1x1());
        let wt2x2 = self.export_cond(a.wt2x2());
        self.aux_sep = Some(AuxSepDoc { q, p_q: a.p_q().to_vec(), wb1, wb2, wt1x1, wt2x2 });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}

fn check_row(row: &[f64], len: usize, field: &str) -> Result<(), CliError> {
    if row.len() != len {
        return Err(CliError::Parse(format!("{field}: expected {len} entries, got {}", row.len())));
    }
    if let Some(x) = row.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(CliError::Parse(format!("{field}: entry {x} is negative or not finite")));
    }
    let s: f64 = row.iter().sum();
    if (s - 1.0).abs() > LOAD_TOL {
        return Err(CliError::Parse(format!("{field} sums to {s}, not 1")));
    }
    Ok(())
}
