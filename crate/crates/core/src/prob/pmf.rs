use crate::prob::{Alphabet, InfoCalc};
use crate::{Error, Result};

/// Default cap on the number of cells of a dense joint.
pub const DEFAULT_CELL_CAP: usize = 10_000_000;
/// Tolerance on the total mass of a freshly constructed PMF.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Masses at or below this are exact zeros in entropy sums.
pub const ZERO_MASS: f64 = 1e-15;

/// Entropy in bits of a (not necessarily normalized) mass vector.
pub fn entropy_of(mass: &[f64]) -> f64 {
    mass.iter()
        .filter(|&&p| p > ZERO_MASS)
        .map(|&p| -p * p.log2())
        .sum()
}

/// `h(p) = -p log p - (1-p) log (1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of(&[p, 1.0 - p])
}

/// Number of cells of a product space, checked against `cap`.
pub(crate) fn cell_count(axes: &[Alphabet], cap: usize) -> Result<usize> {
    let cells = axes.iter().fold(1u128, |acc, a| acc.saturating_mul(a.size() as u128));
    if cells > cap as u128 {
        return Err(Error::Size { cells, cap });
    }
    Ok(cells as usize)
}

/// Dense PMF over a product of named alphabets, row-major with the last axis
/// varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    axes: Vec<Alphabet>,
    mass: Vec<f64>,
}

impl JointPmf {
    pub fn new(axes: Vec<Alphabet>, mass: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(axes, mass, NORMALIZATION_TOL, DEFAULT_CELL_CAP)
    }

    /// Construction with an explicit normalization tolerance and cell cap.
    pub fn with_tolerance(axes: Vec<Alphabet>, mass: Vec<f64>, tol: f64, cap: usize) -> Result<Self> {
        let pmf = Self::unnormalized(axes, mass, cap)?;
        let total = pmf.total();
        if (total - 1.0).abs() > tol {
            return Err(Error::NotNormalized(format!("total mass {total} differs from 1 by more than {tol}")));
        }
        Ok(pmf)
    }

    /// Validates shape and signs only; pair with [`JointPmf::renormalize`].
    pub fn unnormalized(axes: Vec<Alphabet>, mass: Vec<f64>, cap: usize) -> Result<Self> {
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name() == a.name()) {
                return Err(Error::Input(format!("duplicate axis `{}`", a.name())));
            }
        }
        if axes.len() > 64 {
            return Err(Error::Input("at most 64 axes are supported".into()));
        }
        let cells = cell_count(&axes, cap)?;
        if mass.len() != cells {
            return Err(Error::Input(format!("expected {cells} masses, got {}", mass.len())));
        }
        if let Some(bad) = mass.iter().position(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::Input(format!("mass at cell {bad} is {}", mass[bad])));
        }
        Ok(Self { axes, mass })
    }

    /// Rescales to unit total mass.
    pub fn renormalize(mut self) -> Result<Self> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::NotNormalized("total mass is zero".into()));
        }
        self.mass.iter_mut().for_each(|m| *m /= total);
        Ok(self)
    }

    pub fn uniform(axes: Vec<Alphabet>) -> Result<Self> {
        let cells = cell_count(&axes, DEFAULT_CELL_CAP)?;
        Self::new(axes, vec![1.0 / cells as f64; cells])
    }

    /// Point mass on the cell with the given per-axis indices.
    pub fn point_mass(axes: Vec<Alphabet>, index: &[usize]) -> Result<Self> {
        let cells = cell_count(&axes, DEFAULT_CELL_CAP)?;
        let mut mass = vec![0.0; cells];
        let pmf = Self { axes, mass: Vec::new() };
        mass[pmf.flat_index(index)?] = 1.0;
        Ok(Self { mass, ..pmf })
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Alphabet::size).collect()
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name() == name)
            .ok_or_else(|| Error::AxisNotFound(name.to_string()))
    }

    pub fn axis(&self, name: &str) -> Result<&Alphabet> {
        Ok(&self.axes[self.axis_index(name)?])
    }

    /// Bit mask of the named axes.
    pub fn axis_mask(&self, names: &[&str]) -> Result<u64> {
        let mut mask = 0u64;
        for n in names {
            let bit = 1u64 << self.axis_index(n)?;
            if mask & bit != 0 {
                return Err(Error::InvalidQuery(format!("axis `{n}` listed twice")));
            }
            mask |= bit;
        }
        Ok(mask)
    }

    pub fn flat_index(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.axes.len() {
            return Err(Error::Input(format!("index has {} coordinates, joint has {} axes", index.len(), self.axes.len())));
        }
        let mut flat = 0;
        for (i, (&x, a)) in index.iter().zip(&self.axes).enumerate() {
            if x >= a.size() {
                return Err(Error::Input(format!("coordinate {i} is {x}, axis `{}` has size {}", a.name(), a.size())));
            }
            flat = flat * a.size() + x;
        }
        Ok(flat)
    }

    pub fn get(&self, index: &[usize]) -> Result<f64> {
        Ok(self.mass[self.flat_index(index)?])
    }

    /// Marginal masses over the axes in `mask`, laid out row-major in axis order.
    pub(crate) fn marginal_masses(&self, mask: u64) -> Vec<f64> {
        let shape = self.shape();
        let k = shape.len();
        let mut out_stride = vec![0usize; k];
        let mut size = 1;
        for i in (0..k).rev() {
            if mask >> i & 1 == 1 {
                out_stride[i] = size;
                size *= shape[i];
            }
        }
        let mut out = vec![0.0; size];
        if mask == 0 {
            out[0] = self.total();
            return out;
        }
        let mut idx = vec![0usize; k];
        let mut o = 0usize;
        for &m in &self.mass {
            out[o] += m;
            let mut ax = k;
            while ax > 0 {
                ax -= 1;
                idx[ax] += 1;
                o += out_stride[ax];
                if idx[ax] < shape[ax] {
                    break;
                }
                o -= out_stride[ax] * shape[ax];
                idx[ax] = 0;
            }
        }
        out
    }

    /// Marginal joint on the named axes, kept in the order given.
    pub fn marginal(&self, names: &[&str]) -> Result<JointPmf> {
        let positions = names.iter().map(|n| self.axis_index(n)).collect::<Result<Vec<_>>>()?;
        let mask = self.axis_mask(names)?;
        let sorted = self.marginal_masses(mask);
        let mut by_axis: Vec<usize> = positions.clone();
        by_axis.sort_unstable();
        let axes: Vec<Alphabet> = positions.iter().map(|&p| self.axes[p].clone()).collect();
        if by_axis == positions {
            return Ok(Self { axes, mass: sorted });
        }
        // Permute from axis order to the requested order.
        let sizes: Vec<usize> = by_axis.iter().map(|&p| self.axes[p].size()).collect();
        let mut stride_sorted = vec![1usize; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            stride_sorted[i] = stride_sorted[i + 1] * sizes[i + 1];
        }
        let perm: Vec<usize> = positions.iter().map(|p| by_axis.iter().position(|q| q == p).unwrap_or(0)).collect();
        let out_sizes: Vec<usize> = perm.iter().map(|&j| sizes[j]).collect();
        let mut mass = vec![0.0; sorted.len()];
        let mut idx = vec![0usize; out_sizes.len()];
        for slot in mass.iter_mut() {
            let src: usize = idx.iter().zip(&perm).map(|(&x, &j)| x * stride_sorted[j]).sum();
            *slot = sorted[src];
            for ax in (0..idx.len()).rev() {
                idx[ax] += 1;
                if idx[ax] < out_sizes[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        Ok(Self { axes, mass })
    }

    /// Memoizing evaluator for repeated entropy queries on this joint.
    pub fn info(&self) -> InfoCalc<'_> {
        InfoCalc::new(self)
    }

    /// `H(axes)` in bits.
    pub fn entropy(&self, names: &[&str]) -> Result<f64> {
        if names.is_empty() {
            return Err(Error::InvalidQuery("entropy of an empty axis set".into()));
        }
        Ok(entropy_of(&self.marginal_masses(self.axis_mask(names)?)))
    }

    /// `H(target | given)` in bits.
    pub fn conditional_entropy(&self, target: &[&str], given: &[&str]) -> Result<f64> {
        self.info().cond_entropy(target, given)
    }

    /// `I(a; b | c)` in bits, clamped at zero within tolerance.
    pub fn mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        self.info().mi(a, b, c)
    }
}
