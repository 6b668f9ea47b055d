use crate::prob::pmf::cell_count;
use crate::prob::{names::*, Alphabet, ChannelSpec, CondPmf, JointPmf, SourceSpec, DEFAULT_CELL_CAP};
use crate::regions::{AuxScheme, AuxSchemeSep};
use crate::{Error, Result};

/// One factor of a product joint: a table laid out row-major over `axes`.
#[derive(Debug, Clone, Copy)]
pub struct Factor<'a> {
    pub axes: &'a [&'a str],
    pub table: &'a [f64],
}

impl<'a> Factor<'a> {
    pub fn new(axes: &'a [&'a str], table: &'a [f64]) -> Self {
        Self { axes, table }
    }
}

/// Joint whose cell mass is the product of the factors. Total mass must be
/// within 1e-9 of one; the result is then renormalized exactly.
pub fn product_joint(axes: Vec<Alphabet>, factors: &[Factor<'_>], cap: usize) -> Result<JointPmf> {
    let cells = cell_count(&axes, cap)?;
    let shape: Vec<usize> = axes.iter().map(Alphabet::size).collect();
    let k = axes.len();
    let mut strides: Vec<Vec<usize>> = Vec::with_capacity(factors.len());
    for f in factors {
        let mut st = vec![0usize; k];
        let mut s = 1usize;
        for name in f.axes.iter().rev() {
            let pos = axes
                .iter()
                .position(|a| a.name() == *name)
                .ok_or_else(|| Error::Composition(format!("factor axis `{name}` is not an axis of the joint")))?;
            if st[pos] != 0 {
                return Err(Error::Composition(format!("factor lists axis `{name}` twice")));
            }
            st[pos] = s;
            s *= shape[pos];
        }
        if s != f.table.len() {
            return Err(Error::Composition(format!(
                "factor over {:?} has {} entries, alphabets imply {s}",
                f.axes,
                f.table.len()
            )));
        }
        strides.push(st);
    }
    let mut mass = Vec::with_capacity(cells);
    let mut idx = vec![0usize; k];
    let mut pos = vec![0usize; factors.len()];
    for _ in 0..cells {
        let mut m = 1.0;
        for (f, &p) in factors.iter().zip(&pos) {
            m *= f.table[p];
            if m == 0.0 {
                break;
            }
        }
        mass.push(m);
        let mut ax = k;
        while ax > 0 {
            ax -= 1;
            idx[ax] += 1;
            for (p, st) in pos.iter_mut().zip(&strides) {
                *p += st[ax];
            }
            if idx[ax] < shape[ax] {
                break;
            }
            for (p, st) in pos.iter_mut().zip(&strides) {
                *p -= st[ax] * shape[ax];
            }
            idx[ax] = 0;
        }
    }
    JointPmf::with_tolerance(axes, mass, 1e-9, cap)?.renormalize()
}

fn same_size(what: &str, a: &Alphabet, b: &Alphabet) -> Result<()> {
    if a.size() != b.size() {
        return Err(Error::Composition(format!("{what}: alphabet sizes {} and {} differ", a.size(), b.size())));
    }
    Ok(())
}

fn check_kernel(what: &str, k: &CondPmf, outputs: &[&Alphabet], inputs: &[&Alphabet]) -> Result<()> {
    if k.outputs().len() != outputs.len() || k.inputs().len() != inputs.len() {
        return Err(Error::Composition(format!("{what}: unexpected number of axes")));
    }
    for (a, b) in k.outputs().iter().zip(outputs) {
        same_size(what, a, b)?;
    }
    for (a, b) in k.inputs().iter().zip(inputs) {
        same_size(what, a, b)?;
    }
    Ok(())
}

pub fn assemble_joint_theorem2(src1: &SourceSpec, src2: &SourceSpec, ch: &ChannelSpec, aux: &AuxScheme) -> Result<JointPmf> {
    assemble_joint_theorem2_capped(src1, src2, ch, aux, DEFAULT_CELL_CAP)
}

/// Joint `p(q) p(u1,v1) p(u2,v2) p(w1,x1|u1,q) p(w2,x2|u2,q) p(y1,y2|x1,x2)`.
pub fn assemble_joint_theorem2_capped(
    src1: &SourceSpec,
    src2: &SourceSpec,
    ch: &ChannelSpec,
    aux: &AuxScheme,
    cap: usize,
) -> Result<JointPmf> {
    let q = aux.q();
    let (w1, w2) = (&aux.w1x1().outputs()[0], &aux.w2x2().outputs()[0]);
    check_kernel("p(w1,x1|u1,q)", aux.w1x1(), &[w1, ch.x1()], &[src1.u(), q])?;
    check_kernel("p(w2,x2|u2,q)", aux.w2x2(), &[w2, ch.x2()], &[src2.u(), q])?;
    let axes = vec![
        q.renamed(Q),
        src1.u().renamed(U1),
        src1.v().renamed(V1),
        src2.u().renamed(U2),
        src2.v().renamed(V2),
        w1.renamed(W1),
        w2.renamed(W2),
        ch.x1().renamed(X1),
        ch.x2().renamed(X2),
        ch.y1().renamed(Y1),
        ch.y2().renamed(Y2),
    ];
    product_joint(
        axes,
        &[
            Factor::new(&[Q], aux.p_q()),
            Factor::new(&[U1, V1], src1.joint().mass()),
            Factor::new(&[U2, V2], src2.joint().mass()),
            Factor::new(&[U1, Q, W1, X1], aux.w1x1().kernel()),
            Factor::new(&[U2, Q, W2, X2], aux.w2x2().kernel()),
            Factor::new(&[X1, X2, Y1, Y2], ch.joint().kernel()),
        ],
        cap,
    )
}

pub fn assemble_joint_corollary1(src1: &SourceSpec, src2: &SourceSpec, ch: &ChannelSpec, aux: &AuxSchemeSep) -> Result<JointPmf> {
    assemble_joint_corollary1_capped(src1, src2, ch, aux, DEFAULT_CELL_CAP)
}

/// Joint `p(q) p(u1,v1) p(u2,v2) p(wb1|u1,q) p(wb2|u2,q) p(wt1,x1|q) p(wt2,x2|q) p(y1,y2|x1,x2)`.
pub fn assemble_joint_corollary1_capped(
    src1: &SourceSpec,
    src2: &SourceSpec,
    ch: &ChannelSpec,
    aux: &AuxSchemeSep,
    cap: usize,
) -> Result<JointPmf> {
    let q = aux.q();
    let (wb1, wb2) = (&aux.wb1().outputs()[0], &aux.wb2().outputs()[0]);
    let (wt1, wt2) = (&aux.wt1x1().outputs()[0], &aux.wt2x2().outputs()[0]);
    check_kernel("p(wb1|u1,q)", aux.wb1(), &[wb1], &[src1.u(), q])?;
    check_kernel("p(wb2|u2,q)", aux.wb2(), &[wb2], &[src2.u(), q])?;
    check_kernel("p(wt1,x1|q)", aux.wt1x1(), &[wt1, ch.x1()], &[q])?;
    check_kernel("p(wt2,x2|q)", aux.wt2x2(), &[wt2, ch.x2()], &[q])?;
    let axes = vec![
        q.renamed(Q),
        src1.u().renamed(U1),
        src1.v().renamed(V1),
        src2.u().renamed(U2),
        src2.v().renamed(V2),
        wb1.renamed(WB1),
        wb2.renamed(WB2),
        wt1.renamed(WT1),
        wt2.renamed(WT2),
        ch.x1().renamed(X1),
        ch.x2().renamed(X2),
        ch.y1().renamed(Y1),
        ch.y2().renamed(Y2),
    ];
    product_joint(
        axes,
        &[
            Factor::new(&[Q], aux.p_q()),
            Factor::new(&[U1, V1], src1.joint().mass()),
            Factor::new(&[U2, V2], src2.joint().mass()),
            Factor::new(&[U1, Q, WB1], aux.wb1().kernel()),
            Factor::new(&[U2, Q, WB2], aux.wb2().kernel()),
            Factor::new(&[Q, WT1, X1], aux.wt1x1().kernel()),
            Factor::new(&[Q, WT2, X2], aux.wt2x2().kernel()),
            Factor::new(&[X1, X2, Y1, Y2], ch.joint().kernel()),
        ],
        cap,
    )
}
