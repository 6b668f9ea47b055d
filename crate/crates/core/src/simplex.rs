//! Grids and random points on probability simplices.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

/// Number of points of the grid `{c / steps : Σ c = steps}` in `k` coordinates.
pub fn grid_len(k: usize, steps: usize) -> u128 {
    // C(steps + k - 1, k - 1), computed incrementally to stay exact.
    let mut acc: u128 = 1;
    for i in 1..k as u128 {
        acc = acc.saturating_mul(steps as u128 + i) / i;
    }
    acc
}

/// All grid points with denominator `steps`, in lexicographic order of counts.
pub fn grid(k: usize, steps: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut c = vec![0usize; k];
    fill(&mut c, 0, steps, steps, &mut out);
    out
}

fn fill(c: &mut Vec<usize>, pos: usize, left: usize, steps: usize, out: &mut Vec<Vec<f64>>) {
    if pos + 1 == c.len() {
        c[pos] = left;
        out.push(c.iter().map(|&x| x as f64 / steps as f64).collect());
        return;
    }
    for x in (0..=left).rev() {
        c[pos] = x;
        fill(c, pos + 1, left - x, steps, out);
    }
}

/// Flat Dirichlet sample.
pub fn random_point<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Vertex `i` of the simplex.
pub fn vertex(k: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[i] = 1.0;
    v
}

/// Clips negatives and rescales to unit mass; falls back to uniform.
pub fn project(p: &mut [f64]) {
    p.iter_mut().for_each(|x| {
        if !(x.is_finite() && *x > 0.0) {
            *x = 0.0
        }
    });
    let s: f64 = p.iter().sum();
    if s > 0.0 {
        p.iter_mut().for_each(|x| *x /= s);
    } else {
        let u = 1.0 / p.len() as f64;
        p.iter_mut().for_each(|x| *x = u);
    }
}

/// Hill climb of `f` over one simplex using pairwise mass transfers.
pub fn refine(start: Vec<f64>, mut step: f64, min_step: f64, f: impl Fn(&[f64]) -> f64) -> (Vec<f64>, f64) {
    let k = start.len();
    let mut best = start;
    let mut val = f(&best);
    while step > min_step {
        let mut improved = false;
        for i in 0..k {
            for j in 0..k {
                if i == j || best[i] <= 0.0 {
                    continue;
                }
                let t = step.min(best[i]);
                let mut cand = best.clone();
                cand[i] -= t;
                cand[j] += t;
                let v = f(&cand);
                if v > val {
                    best = cand;
                    val = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (best, val)
}
