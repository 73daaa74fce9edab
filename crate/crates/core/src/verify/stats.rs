use crate::exec::pairwise_sum;
use crate::sde::{Refinement, TimeGrid};

/// Acceptance threshold on `|z|`.
pub const Z_THRESHOLD: f64 = 3.0;

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Estimate {
                mean: f64::NAN,
                se: f64::NAN,
                n,
            };
        }
        let mean = pairwise_sum(xs) / n as f64;
        let se = if n > 1 {
            let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
            (pairwise_sum(&dev) / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Estimate { mean, se, n }
    }

    pub fn exact(value: f64) -> Self {
        Estimate {
            mean: value,
            se: 0.0,
            n: 0,
        }
    }
}

/// `(a − b)/√(se_a² + se_b²)`, zero when both sides agree exactly.
pub fn z_score(a: &Estimate, b: &Estimate) -> f64 {
    let s = (a.se * a.se + b.se * b.se).sqrt();
    z_from(a.mean - b.mean, s)
}

fn z_from(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        diff / se
    }
}

/// Grid description carried by every report.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeta {
    pub steps: usize,
    pub eps_end: f64,
    pub refinement: String,
}

impl GridMeta {
    pub fn of(grid: &TimeGrid) -> Self {
        GridMeta {
            steps: grid.steps(),
            eps_end: grid.eps_end(),
            refinement: match grid.refinement() {
                Refinement::Uniform => "uniform".into(),
                Refinement::Geometric { ratio } => format!("geometric({ratio})"),
            },
        }
    }
}

/// One Monte Carlo comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub se_lhs: f64,
    pub se_rhs: f64,
    /// Standard error of `lhs − rhs`; uses the paired differences when both
    /// sides come from the same paths.
    pub se_diff: f64,
    pub z: f64,
    pub n_paths: usize,
    pub failures: usize,
    pub grid: GridMeta,
    pub seed: u64,
    pub wall_time: f64,
}

impl McReport {
    /// Two independent samples (or an exact right-hand side).
    pub fn independent(label: impl Into<String>, lhs: Estimate, rhs: Estimate, meta: &RunMeta) -> Self {
        let se_diff = (lhs.se * lhs.se + rhs.se * rhs.se).sqrt();
        McReport {
            label: label.into(),
            lhs: lhs.mean,
            rhs: rhs.mean,
            se_lhs: lhs.se,
            se_rhs: rhs.se,
            se_diff,
            z: z_score(&lhs, &rhs),
            n_paths: meta.n_paths,
            failures: meta.failures,
            grid: meta.grid.clone(),
            seed: meta.seed,
            wall_time: meta.wall_time,
        }
    }

    /// Per-path pairs `(lhs_i, rhs_i)` drawn on the same paths.
    pub fn paired(label: impl Into<String>, lhs: &[f64], rhs: &[f64], meta: &RunMeta) -> Self {
        let l = Estimate::from_samples(lhs);
        let r = Estimate::from_samples(rhs);
        let diff: Vec<f64> = lhs.iter().zip(rhs).map(|(a, b)| a - b).collect();
        let d = Estimate::from_samples(&diff);
        McReport {
            label: label.into(),
            lhs: l.mean,
            rhs: r.mean,
            se_lhs: l.se,
            se_rhs: r.se,
            se_diff: d.se,
            z: z_from(l.mean - r.mean, d.se),
            n_paths: meta.n_paths,
            failures: meta.failures,
            grid: meta.grid.clone(),
            seed: meta.seed,
            wall_time: meta.wall_time,
        }
    }

    pub fn passed(&self) -> bool {
        self.z.abs() < Z_THRESHOLD
    }

    /// The left-hand estimate of this report against an exact value.
    pub fn lhs_against(&self, label: impl Into<String>, exact: f64) -> McReport {
        self.side_against(label, self.lhs, self.se_lhs, exact)
    }

    /// The right-hand estimate of this report against an exact value.
    pub fn rhs_against(&self, label: impl Into<String>, exact: f64) -> McReport {
        self.side_against(label, self.rhs, self.se_rhs, exact)
    }

    fn side_against(&self, label: impl Into<String>, mean: f64, se: f64, exact: f64) -> McReport {
        let meta = RunMeta {
            n_paths: self.n_paths,
            failures: self.failures,
            grid: self.grid.clone(),
            seed: self.seed,
            wall_time: self.wall_time,
        };
        let side = Estimate {
            mean,
            se,
            n: self.n_paths,
        };
        McReport::independent(label, side, Estimate::exact(exact), &meta)
    }
}

/// `E|x̃_t|²` for the flat bridge from radius `r0` to the origin in `n`
/// dimensions.
pub fn flat_bridge_second_moment(n: usize, r0: f64, t: f64) -> f64 {
    (1.0 - t).powi(2) * r0 * r0 + n as f64 * t * (1.0 - t)
}

/// Bookkeeping shared by the reports of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub n_paths: usize,
    pub failures: usize,
    pub grid: GridMeta,
    pub seed: u64,
    pub wall_time: f64,
}
