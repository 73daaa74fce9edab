use super::runner::{run_paths, McSettings};
use super::stats::Estimate;
use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, GeometryModel};
use crate::pathspace::{divergence_pair, endpoint_pairing, CmDirection};
use crate::rng::{path_stream, StreamPurpose};
use crate::sde::{simulate_with_increments, BrownianIncrements, PathKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivRow {
    pub steps: usize,
    /// `E|direct − lemma1|`.
    pub mean_gap: f64,
    pub se: f64,
    /// `E|Y|` for the boundary pairing `Y = ⟨∇ log k_{1−t}, u h⟩` at the
    /// last node, which the truncated sums do not cancel.
    pub mean_boundary: f64,
    /// `E|direct − lemma1 − Y|`, the pure discretisation error.
    pub mean_residual: f64,
    pub se_residual: f64,
}

/// Mean pathwise gap between the two representations of the divergence
/// weight on a sequence of nested grids.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivTable {
    pub direction: String,
    pub rows: Vec<EquivRow>,
    pub n_paths: usize,
    pub seed: u64,
}

impl EquivTable {
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].mean_gap < w[0].mean_gap)
            || self.rows.iter().all(|r| r.mean_gap == 0.0)
    }

    pub fn residual_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].mean_residual < w[0].mean_residual)
            || self.rows.iter().all(|r| r.mean_residual == 0.0)
    }
}

/// The coarse grid is `settings.grid`; each further level halves every step.
/// Fine increments are Brownian-bridge refinements of the coarse ones, so
/// all levels see the same underlying Brownian path.
pub fn representation_equiv_check(
    geom: &GeometryModel,
    x0: &ChartPoint,
    h: &CmDirection,
    halvings: usize,
    settings: &McSettings,
) -> Result<EquivTable> {
    if halvings == 0 {
        return Err(Error::InvalidInput("need at least one halving".into()));
    }
    let mut grids = vec![settings.grid.clone()];
    for _ in 0..halvings {
        let next = grids[grids.len() - 1].refine();
        grids.push(next);
    }
    let batch = run_paths(settings.n_paths, settings.policy, |i| {
        let mut rng = path_stream(settings.seed, StreamPurpose::Bridge, i);
        let mut refine_rng = path_stream(settings.seed, StreamPurpose::Refinement, i);
        let mut inc = BrownianIncrements::sample(&grids[0], geom.dim(), &mut rng);
        let mut gaps = Vec::with_capacity(grids.len());
        for (level, grid) in grids.iter().enumerate() {
            if level > 0 {
                inc = inc.refine(&grids[level - 1], &mut refine_rng).1;
            }
            let path = simulate_with_increments(geom, x0, grid, &inc, PathKind::Bridge)?;
            let pair = divergence_pair(geom, &path, h)?;
            let gap = pair.direct.total - pair.lemma1.total;
            let y = if h.is_zero() { 0.0 } else { endpoint_pairing(geom, &path, h, grid.steps()) };
            gaps.push([gap.abs(), y.abs(), (gap - y).abs()]);
        }
        Ok(gaps)
    })?;
    let rows = grids
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let column = |c: usize| {
                let xs: Vec<f64> = batch.values.iter().map(|v| v[j][c]).collect();
                Estimate::from_samples(&xs)
            };
            let (gap, boundary, residual) = (column(0), column(1), column(2));
            EquivRow {
                steps: g.steps(),
                mean_gap: gap.mean,
                se: gap.se,
                mean_boundary: boundary.mean,
                mean_residual: residual.mean,
                se_residual: residual.se,
            }
        })
        .collect();
    Ok(EquivTable {
        direction: h.key(),
        rows,
        n_paths: batch.values.len(),
        seed: settings.seed,
    })
}
