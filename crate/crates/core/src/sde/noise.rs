use rand::Rng;
use rand_distr::StandardNormal;

use super::grid::TimeGrid;

/// Brownian increments `ΔB_k ∈ ℝⁿ` on a grid, stored row-major by step.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianIncrements {
    dim: usize,
    data: Vec<f64>,
}

impl BrownianIncrements {
    pub fn sample<R: Rng + ?Sized>(grid: &TimeGrid, dim: usize, rng: &mut R) -> Self {
        let steps = grid.steps();
        let mut data = Vec::with_capacity(steps * dim);
        for k in 0..steps {
            let s = grid.dt(k).sqrt();
            for _ in 0..dim {
                let z: f64 = rng.sample(StandardNormal);
                data.push(s * z);
            }
        }
        BrownianIncrements { dim, data }
    }

    pub fn from_vec(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len() % dim.max(1), 0);
        BrownianIncrements { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    #[inline]
    pub fn step(&self, k: usize) -> &[f64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Increments on `coarse.refine()` consistent with these ones: each
    /// coarse increment is split by Brownian-bridge interpolation, so the
    /// pairs sum back to the original.
    pub fn refine<R: Rng + ?Sized>(&self, coarse: &TimeGrid, rng: &mut R) -> (TimeGrid, Self) {
        let fine = coarse.refine();
        let n = self.dim;
        let mut data = Vec::with_capacity(2 * self.data.len());
        let mut second = vec![0.0; n];
        for k in 0..coarse.steps() {
            let a = fine.dt(2 * k);
            let b = fine.dt(2 * k + 1);
            let w = a / (a + b);
            let s = (a * b / (a + b)).sqrt();
            for (i, &db) in self.step(k).iter().enumerate() {
                let z: f64 = rng.sample(StandardNormal);
                let first = w * db + s * z;
                data.push(first);
                second[i] = db - first;
            }
            data.extend_from_slice(&second);
        }
        (fine, BrownianIncrements { dim: n, data })
    }
}
