use std::time::Instant;

use super::stats::{GridMeta, RunMeta};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecPolicy};
use crate::geometry::{ChartPoint, GeometryModel};
use crate::rng::{path_stream, StreamPurpose};
use crate::sde::{simulate_with_increments, BrownianIncrements, FramePathSample, PathKind, TimeGrid};

/// Largest tolerated share of failed paths before a report is aborted.
pub const FAILURE_BUDGET: f64 = 1e-3;

/// Sampling parameters shared by the Monte Carlo checks.
#[derive(Debug, Clone, PartialEq)]
pub struct McSettings {
    pub n_paths: usize,
    pub grid: TimeGrid,
    pub seed: u64,
    pub policy: ExecPolicy,
    /// Number of step halvings applied to noise drawn on `grid`; see
    /// [`sample_path`].
    pub refinements: usize,
}

impl McSettings {
    pub fn new(n_paths: usize, grid: TimeGrid, seed: u64) -> Self {
        McSettings {
            n_paths,
            grid,
            seed,
            policy: ExecPolicy::default(),
            refinements: 0,
        }
    }

    /// Same Brownian paths seen on a grid with every step halved `levels`
    /// times.
    pub fn refined(mut self, levels: usize) -> Self {
        self.refinements = levels;
        self
    }

    /// The grid paths are actually simulated on.
    pub fn path_grid(&self) -> TimeGrid {
        (0..self.refinements).fold(self.grid.clone(), |g, _| g.refine())
    }

    pub fn with_policy(mut self, policy: ExecPolicy) -> Self {
        self.policy = policy;
        self
    }
}

/// Path `i` of a run: increments drawn on `settings.grid` from the stream
/// for `kind`, split `settings.refinements` times by Brownian-bridge
/// interpolation, then integrated on the resulting grid.
pub fn sample_path(
    geom: &GeometryModel,
    x0: &ChartPoint,
    settings: &McSettings,
    kind: PathKind,
    i: u64,
) -> Result<FramePathSample> {
    let purpose = match kind {
        PathKind::Bridge => StreamPurpose::Bridge,
        PathKind::Free => StreamPurpose::Free,
    };
    let mut rng = path_stream(settings.seed, purpose, i);
    let mut inc = BrownianIncrements::sample(&settings.grid, geom.dim(), &mut rng);
    let mut grid = settings.grid.clone();
    if settings.refinements > 0 {
        let mut refine_rng = path_stream(settings.seed, StreamPurpose::Refinement, i);
        for _ in 0..settings.refinements {
            let (fine, fine_inc) = inc.refine(&grid, &mut refine_rng);
            grid = fine;
            inc = fine_inc;
        }
    }
    simulate_with_increments(geom, x0, &grid, &inc, kind)
}

/// Per-path results in index order, with failed paths dropped.
#[derive(Debug, Clone)]
pub struct PathBatch<T> {
    pub values: Vec<T>,
    pub failures: usize,
    pub started: Instant,
}

impl<T> PathBatch<T> {
    pub fn meta(&self, settings: &McSettings, grid: &TimeGrid) -> RunMeta {
        RunMeta {
            n_paths: self.values.len(),
            failures: self.failures,
            grid: GridMeta::of(grid),
            seed: settings.seed,
            wall_time: self.started.elapsed().as_secs_f64(),
        }
    }
}

/// Runs `f` on every path index. Simulation failures count against the
/// budget; any other error aborts with the lowest failing index.
pub fn run_paths<T, F>(n_paths: usize, policy: ExecPolicy, f: F) -> Result<PathBatch<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    if n_paths == 0 {
        return Err(Error::InvalidInput("need at least one path".into()));
    }
    let started = Instant::now();
    let raw = map_indexed(n_paths, policy, |i| f(i as u64));
    let mut values = Vec::with_capacity(n_paths);
    let mut failures = 0;
    for r in raw {
        match r {
            Ok(v) => values.push(v),
            Err(Error::Simulation { .. }) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    if failures as f64 > FAILURE_BUDGET * n_paths as f64 {
        return Err(Error::FailureBudget {
            failed: failures,
            total: n_paths,
        });
    }
    Ok(PathBatch {
        values,
        failures,
        started,
    })
}
