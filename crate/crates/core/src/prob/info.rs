use std::cell::RefCell;
use std::collections::HashMap;

use crate::prob::{entropy_of, JointPmf};
use crate::{Error, Result};

/// Negative results above this are rounding noise and clamp to zero.
const CLAMP_TOL: f64 = 1e-12;

/// Entropy evaluator that memoizes marginal entropies by axis set.
pub struct InfoCalc<'a> {
    pmf: &'a JointPmf,
    memo: RefCell<HashMap<u64, f64>>,
}

impl<'a> InfoCalc<'a> {
    pub fn new(pmf: &'a JointPmf) -> Self {
        Self { pmf, memo: RefCell::new(HashMap::new()) }
    }

    pub fn pmf(&self) -> &JointPmf {
        self.pmf
    }

    fn h_mask(&self, mask: u64) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        if let Some(&h) = self.memo.borrow().get(&mask) {
            return h;
        }
        let h = entropy_of(&self.pmf.marginal_masses(mask));
        self.memo.borrow_mut().insert(mask, h);
        h
    }

    fn disjoint(&self, groups: &[&[&str]]) -> Result<Vec<u64>> {
        let masks = groups.iter().map(|g| self.pmf.axis_mask(g)).collect::<Result<Vec<_>>>()?;
        for i in 0..masks.len() {
            for j in 0..i {
                if masks[i] & masks[j] != 0 {
                    return Err(Error::InvalidQuery("axis groups overlap".into()));
                }
            }
        }
        Ok(masks)
    }

    pub fn entropy(&self, names: &[&str]) -> Result<f64> {
        if names.is_empty() {
            return Err(Error::InvalidQuery("entropy of an empty axis set".into()));
        }
        Ok(self.h_mask(self.pmf.axis_mask(names)?))
    }

    /// `H(target | given) = H(target, given) - H(given)`.
    pub fn cond_entropy(&self, target: &[&str], given: &[&str]) -> Result<f64> {
        let m = self.disjoint(&[target, given])?;
        let h = self.h_mask(m[0] | m[1]) - self.h_mask(m[1]);
        Ok(if h < 0.0 && h > -CLAMP_TOL { 0.0 } else { h })
    }

    /// `I(a; b | c) = H(a,c) + H(b,c) - H(a,b,c) - H(c)`.
    pub fn mi(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        let m = self.disjoint(&[a, b, c])?;
        let i = self.h_mask(m[0] | m[2]) + self.h_mask(m[1] | m[2]) - self.h_mask(m[0] | m[1] | m[2]) - self.h_mask(m[2]);
        Ok(if i < 0.0 && i > -CLAMP_TOL { 0.0 } else { i })
    }
}
