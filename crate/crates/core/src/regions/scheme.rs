use crate::prob::{Alphabet, CondPmf, NORMALIZATION_TOL};
use crate::{Error, Result};

fn check_pmf(what: &str, p: &[f64], size: usize) -> Result<()> {
    if p.len() != size {
        return Err(Error::Input(format!("{what} has {} entries, alphabet has {size}", p.len())));
    }
    if p.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
        return Err(Error::Input(format!("{what} has a negative or non-finite entry")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(format!("{what} sums to {s}")));
    }
    Ok(())
}

fn check_shape(what: &str, k: &CondPmf, n_out: usize, n_in: usize) -> Result<()> {
    if k.outputs().len() != n_out || k.inputs().len() != n_in {
        return Err(Error::Input(format!("{what} needs {n_out} output and {n_in} input axes")));
    }
    Ok(())
}

fn check_q(what: &str, k: &CondPmf, q: &Alphabet) -> Result<()> {
    let last = k.inputs().last().map(Alphabet::size).unwrap_or(0);
    if last != q.size() {
        return Err(Error::Composition(format!("{what}: last input has size {last}, Q has {}", q.size())));
    }
    Ok(())
}

/// Auxiliary distributions `p(q)`, `p(w1, x1 | u1, q)`, `p(w2, x2 | u2, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxScheme {
    q: Alphabet,
    p_q: Vec<f64>,
    w1x1: CondPmf,
    w2x2: CondPmf,
}

impl AuxScheme {
    /// Kernels have outputs `(w_k, x_k)` and inputs `(u_k, q)`.
    pub fn new(q: Alphabet, p_q: Vec<f64>, w1x1: CondPmf, w2x2: CondPmf) -> Result<Self> {
        check_pmf("p(q)", &p_q, q.size())?;
        check_shape("p(w1,x1|u1,q)", &w1x1, 2, 2)?;
        check_shape("p(w2,x2|u2,q)", &w2x2, 2, 2)?;
        check_q("p(w1,x1|u1,q)", &w1x1, &q)?;
        check_q("p(w2,x2|u2,q)", &w2x2, &q)?;
        let q = q.renamed("Q");
        let w1x1 = w1x1.relabeled(&["W1", "X1"], &["U1", "Q"])?;
        let w2x2 = w2x2.relabeled(&["W2", "X2"], &["U2", "Q"])?;
        Ok(Self { q, p_q, w1x1, w2x2 })
    }

    pub fn q(&self) -> &Alphabet {
        &self.q
    }

    pub fn p_q(&self) -> &[f64] {
        &self.p_q
    }

    pub fn w1x1(&self) -> &CondPmf {
        &self.w1x1
    }

    pub fn w2x2(&self) -> &CondPmf {
        &self.w2x2
    }
}

/// Separated auxiliaries `p(q)`, `p(wb_k | u_k, q)` and `p(wt_k, x_k | q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxSchemeSep {
    q: Alphabet,
    p_q: Vec<f64>,
    wb1: CondPmf,
    wb2: CondPmf,
    wt1x1: CondPmf,
    wt2x2: CondPmf,
}

impl AuxSchemeSep {
    pub fn new(q: Alphabet, p_q: Vec<f64>, wb1: CondPmf, wb2: CondPmf, wt1x1: CondPmf, wt2x2: CondPmf) -> Result<Self> {
        check_pmf("p(q)", &p_q, q.size())?;
        check_shape("p(wb1|u1,q)", &wb1, 1, 2)?;
        check_shape("p(wb2|u2,q)", &wb2, 1, 2)?;
        check_shape("p(wt1,x1|q)", &wt1x1, 2, 1)?;
        check_shape("p(wt2,x2|q)", &wt2x2, 2, 1)?;
        for (what, k) in [("p(wb1|u1,q)", &wb1), ("p(wb2|u2,q)", &wb2), ("p(wt1,x1|q)", &wt1x1), ("p(wt2,x2|q)", &wt2x2)] {
            check_q(what, k, &q)?;
        }
        Ok(Self {
            q: q.renamed("Q"),
            p_q,
            wb1: wb1.relabeled(&["WB1"], &["U1", "Q"])?,
            wb2: wb2.relabeled(&["WB2"], &["U2", "Q"])?,
            wt1x1: wt1x1.relabeled(&["WT1", "X1"], &["Q"])?,
            wt2x2: wt2x2.relabeled(&["WT2", "X2"], &["Q"])?,
        })
    }

    pub fn q(&self) -> &Alphabet {
        &self.q
    }

    pub fn p_q(&self) -> &[f64] {
        &self.p_q
    }

    pub fn wb1(&self) -> &CondPmf {
        &self.wb1
    }

    pub fn wb2(&self) -> &CondPmf {
        &self.wb2
    }

    pub fn wt1x1(&self) -> &CondPmf {
        &self.wt1x1
    }

    pub fn wt2x2(&self) -> &CondPmf {
        &self.wt2x2
    }

    /// The joint scheme with `W_k = (WB_k, WT_k)` and
    /// `p(w_k, x_k | u_k, q) = p(wb_k | u_k, q) p(wt_k, x_k | q)`.
    pub fn to_joint_scheme(&self) -> Result<AuxScheme> {
        let merge = |wb: &CondPmf, wt: &CondPmf, w: &str, x: &str, u: &str| -> Result<CondPmf> {
            let nq = self.q.size();
            let nu = wb.inputs()[0].size();
            let nb = wb.out_size();
            let (nt, nx) = (wt.outputs()[0].size(), wt.outputs()[1].size());
            let mut kernel = Vec::with_capacity(nu * nq * nb * nt * nx);
            for ui in 0..nu {
                for qi in 0..nq {
                    for b in 0..nb {
                        let pb = wb.prob(ui * nq + qi, b);
                        for t in 0..nt {
                            for xi in 0..nx {
                                kernel.push(pb * wt.prob(qi, t * nx + xi));
                            }
                        }
                    }
                }
            }
            CondPmf::with_tolerance(
                vec![Alphabet::product(w, &wb.outputs()[0], &wt.outputs()[0]), wt.outputs()[1].renamed(x)],
                vec![wb.inputs()[0].renamed(u), self.q.clone()],
                kernel,
                1e-9,
            )
        };
        let w1x1 = merge(&self.wb1, &self.wt1x1, "W1", "X1", "U1")?;
        let w2x2 = merge(&self.wb2, &self.wt2x2, "W2", "X2", "U2")?;
        AuxScheme::new(self.q.clone(), self.p_q.clone(), w1x1, w2x2)
    }
}

/// Lemma-2 style scheme `p(w) p(x1 | w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScheme {
    w: Alphabet,
    p_w: Vec<f64>,
    x1_given_w: CondPmf,
}

impl ZScheme {
    pub fn new(w: Alphabet, p_w: Vec<f64>, x1_given_w: CondPmf) -> Result<Self> {
        check_pmf("p(w)", &p_w, w.size())?;
        check_shape("p(x1|w)", &x1_given_w, 1, 1)?;
        if x1_given_w.in_size() != w.size() {
            return Err(Error::Composition("p(x1|w) input does not match W".into()));
        }
        Ok(Self { w: w.renamed("W"), p_w, x1_given_w: x1_given_w.relabeled(&["X1"], &["W"])? })
    }

    pub fn w(&self) -> &Alphabet {
        &self.w
    }

    pub fn p_w(&self) -> &[f64] {
        &self.p_w
    }

    pub fn x1_given_w(&self) -> &CondPmf {
        &self.x1_given_w
    }
}

/// Single-letter distributions `p(s1) p(s2) p(x1 | s1) p(x2 | s2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Scheme {
    s1: Alphabet,
    p_s1: Vec<f64>,
    s2: Alphabet,
    p_s2: Vec<f64>,
    x1_given_s1: CondPmf,
    x2_given_s2: CondPmf,
}

impl Lemma1Scheme {
    pub fn new(s1: Alphabet, p_s1: Vec<f64>, s2: Alphabet, p_s2: Vec<f64>, x1_given_s1: CondPmf, x2_given_s2: CondPmf) -> Result<Self> {
        check_pmf("p(s1)", &p_s1, s1.size())?;
        check_pmf("p(s2)", &p_s2, s2.size())?;
        check_shape("p(x1|s1)", &x1_given_s1, 1, 1)?;
        check_shape("p(x2|s2)", &x2_given_s2, 1, 1)?;
        if x1_given_s1.in_size() != s1.size() || x2_given_s2.in_size() != s2.size() {
            return Err(Error::Composition("p(x_k|s_k) input does not match S_k".into()));
        }
        Ok(Self {
            s1: s1.renamed("S1"),
            p_s1,
            s2: s2.renamed("S2"),
            p_s2,
            x1_given_s1: x1_given_s1.relabeled(&["X1"], &["S1"])?,
            x2_given_s2: x2_given_s2.relabeled(&["X2"], &["S2"])?,
        })
    }

    pub fn s1(&self) -> &Alphabet {
        &self.s1
    }

    pub fn p_s1(&self) -> &[f64] {
        &self.p_s1
    }

    pub fn s2(&self) -> &Alphabet {
        &self.s2
    }

    pub fn p_s2(&self) -> &[f64] {
        &self.p_s2
    }

    pub fn x1_given_s1(&self) -> &CondPmf {
        &self.x1_given_s1
    }

    pub fn x2_given_s2(&self) -> &CondPmf {
        &self.x2_given_s2
    }
}
