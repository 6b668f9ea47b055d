use crate::prob::pmf::cell_count;
use crate::prob::{Alphabet, DEFAULT_CELL_CAP, NORMALIZATION_TOL};
use crate::{Error, Result};

/// Conditional PMF `p(outputs | inputs)`.
///
/// The kernel is stored row per input cell: `kernel[i * out_size + o]`, with
/// input and output cells both row-major over their axes.
#[derive(Debug, Clone, PartialEq)]
pub struct CondPmf {
    outputs: Vec<Alphabet>,
    inputs: Vec<Alphabet>,
    kernel: Vec<f64>,
}

impl CondPmf {
    pub fn new(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, kernel: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(outputs, inputs, kernel, NORMALIZATION_TOL)
    }

    pub fn with_tolerance(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, kernel: Vec<f64>, tol: f64) -> Result<Self> {
        if outputs.is_empty() {
            return Err(Error::Input("conditional PMF needs at least one output axis".into()));
        }
        let all: Vec<&Alphabet> = outputs.iter().chain(&inputs).collect();
        for (i, a) in all.iter().enumerate() {
            if all[..i].iter().any(|b| b.name() == a.name()) {
                return Err(Error::Input(format!("duplicate axis `{}`", a.name())));
            }
        }
        let out = cell_count(&outputs, DEFAULT_CELL_CAP)?;
        let inp = cell_count(&inputs, DEFAULT_CELL_CAP)?;
        if kernel.len() != out * inp {
            return Err(Error::Input(format!("expected {} kernel entries, got {}", out * inp, kernel.len())));
        }
        for (r, row) in kernel.chunks(out).enumerate() {
            if row.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
                return Err(Error::Input(format!("row {r} has a negative or non-finite entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::NotNormalized(format!("row {r} sums to {s}")));
            }
        }
        Ok(Self { outputs, inputs, kernel })
    }

    /// Kernel from explicit rows, one per input cell.
    pub fn from_rows(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(outputs, inputs, rows.concat())
    }

    /// Rows rescaled to unit mass; rows of zero mass are rejected.
    pub fn renormalized(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, mut kernel: Vec<f64>) -> Result<Self> {
        let out = cell_count(&outputs, DEFAULT_CELL_CAP)?;
        if out == 0 || kernel.len() % out != 0 {
            return Err(Error::Input("kernel length is not a multiple of the output size".into()));
        }
        for (r, row) in kernel.chunks_mut(out).enumerate() {
            let s: f64 = row.iter().sum();
            if !(s > 0.0) {
                return Err(Error::NotNormalized(format!("row {r} has zero mass")));
            }
            row.iter_mut().for_each(|m| *m /= s);
        }
        Self::new(outputs, inputs, kernel)
    }

    /// Deterministic kernel: input cell `i` maps to output cell `f(i)`.
    pub fn deterministic(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, f: impl Fn(usize) -> usize) -> Result<Self> {
        let out = cell_count(&outputs, DEFAULT_CELL_CAP)?;
        let inp = cell_count(&inputs, DEFAULT_CELL_CAP)?;
        let mut kernel = vec![0.0; out * inp];
        for i in 0..inp {
            let o = f(i);
            if o >= out {
                return Err(Error::Input(format!("input cell {i} maps to output cell {o} of {out}")));
            }
            kernel[i * out + o] = 1.0;
        }
        Self::new(outputs, inputs, kernel)
    }

    pub fn outputs(&self) -> &[Alphabet] {
        &self.outputs
    }

    pub fn inputs(&self) -> &[Alphabet] {
        &self.inputs
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    pub fn out_size(&self) -> usize {
        self.outputs.iter().map(Alphabet::size).product()
    }

    pub fn in_size(&self) -> usize {
        self.inputs.iter().map(Alphabet::size).product()
    }

    pub fn row(&self, input_cell: usize) -> &[f64] {
        let o = self.out_size();
        &self.kernel[input_cell * o..(input_cell + 1) * o]
    }

    pub fn prob(&self, input_cell: usize, output_cell: usize) -> f64 {
        self.kernel[input_cell * self.out_size() + output_cell]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.kernel.chunks(self.out_size())
    }

    /// Same kernel with renamed axes.
    pub fn relabeled(&self, outputs: &[&str], inputs: &[&str]) -> Result<Self> {
        if outputs.len() != self.outputs.len() || inputs.len() != self.inputs.len() {
            return Err(Error::Composition("relabeling changes the number of axes".into()));
        }
        Self::new(
            self.outputs.iter().zip(outputs).map(|(a, n)| a.renamed(*n)).collect(),
            self.inputs.iter().zip(inputs).map(|(a, n)| a.renamed(*n)).collect(),
            self.kernel.clone(),
        )
    }
}
