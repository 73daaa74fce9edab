use nalgebra::DMatrix;
use rand::Rng;

use super::frame::{defect_raw, frame_inverse_apply, gram_schmidt_in_place, FrameState, Stepper};
use super::grid::TimeGrid;
use super::noise::BrownianIncrements;
use crate::error::{Error, Result};
use crate::geometry::{grad_log_k_into, norm, ChartPoint, GeometryModel, POLE_EPS};

/// Orthonormality defect above which a simulated path is rejected.
pub const FRAME_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    /// Semi-classical bridge from `x0` to the pole.
    Bridge,
    /// Free Brownian motion.
    Free,
}

impl PathKind {
    pub fn name(&self) -> &'static str {
        match self {
            PathKind::Bridge => "bridge",
            PathKind::Free => "free",
        }
    }
}

/// One discretised path with frames and both noise sequences, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePathSample {
    grid: TimeGrid,
    dim: usize,
    kind: PathKind,
    points: Vec<f64>,
    frames: Vec<f64>,
    db: Vec<f64>,
    db_tilde: Vec<f64>,
}

impl FramePathSample {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    /// Number of stored nodes, `K + 1`.
    pub fn len(&self) -> usize {
        self.grid.steps() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k * self.dim..(k + 1) * self.dim]
    }

    /// Column-major frame at node `k`.
    #[inline]
    pub fn frame(&self, k: usize) -> &[f64] {
        let n2 = self.dim * self.dim;
        &self.frames[k * n2..(k + 1) * n2]
    }

    #[inline]
    pub fn db(&self, k: usize) -> &[f64] {
        &self.db[k * self.dim..(k + 1) * self.dim]
    }

    #[inline]
    pub fn db_tilde(&self, k: usize) -> &[f64] {
        &self.db_tilde[k * self.dim..(k + 1) * self.dim]
    }

    pub fn state(&self, k: usize) -> FrameState {
        FrameState {
            point: ChartPoint::new(self.point(k).to_vec()),
            frame: DMatrix::from_column_slice(self.dim, self.dim, self.frame(k)),
        }
    }

    /// Radius at every node.
    pub fn radii(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| norm(self.point(k)))
            .collect()
    }

    /// The point at `t = 1`: the pole for bridges, the last node otherwise.
    pub fn terminal(&self) -> ChartPoint {
        match self.kind {
            PathKind::Bridge => ChartPoint::pole(self.dim),
            PathKind::Free => ChartPoint::new(self.point(self.len() - 1).to_vec()),
        }
    }

    /// Largest `|uᵀ G u − I|` over all nodes.
    pub fn max_orthonormality_defect(&self, geom: &GeometryModel) -> f64 {
        (0..self.len())
            .map(|k| defect_raw(geom, self.point(k), self.frame(k)))
            .fold(0.0, f64::max)
    }
}

pub fn simulate_bridge<R: Rng + ?Sized>(
    geom: &GeometryModel,
    x0: &ChartPoint,
    grid: &TimeGrid,
    rng: &mut R,
) -> Result<FramePathSample> {
    let inc = BrownianIncrements::sample(grid, geom.dim(), rng);
    simulate_with_increments(geom, x0, grid, &inc, PathKind::Bridge)
}

pub fn simulate_bm<R: Rng + ?Sized>(
    geom: &GeometryModel,
    x0: &ChartPoint,
    grid: &TimeGrid,
    rng: &mut R,
) -> Result<FramePathSample> {
    let inc = BrownianIncrements::sample(grid, geom.dim(), rng);
    simulate_with_increments(geom, x0, grid, &inc, PathKind::Free)
}

/// Integrates the horizontal SDE driven by given increments. Frames are
/// re-orthonormalised after every step.
pub fn simulate_with_increments(
    geom: &GeometryModel,
    x0: &ChartPoint,
    grid: &TimeGrid,
    inc: &BrownianIncrements,
    kind: PathKind,
) -> Result<FramePathSample> {
    let n = geom.dim();
    if x0.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x0.dim(),
        });
    }
    if inc.dim() != n || inc.steps() != grid.steps() {
        return Err(Error::InvalidInput(format!(
            "increments ({} steps of dim {}) do not match grid ({} steps) and dimension {n}",
            inc.steps(),
            inc.dim(),
            grid.steps()
        )));
    }
    if x0.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite starting point".into()));
    }
    if kind == PathKind::Bridge && x0.radius() < POLE_EPS {
        return Err(Error::DegeneratePoint {
            radius: x0.radius(),
        });
    }

    let steps = grid.steps();
    let n2 = n * n;
    let mut points = vec![0.0; (steps + 1) * n];
    let mut frames = vec![0.0; (steps + 1) * n2];
    let mut db_tilde = inc.as_slice().to_vec();

    points[..n].copy_from_slice(x0.as_slice());
    let init = FrameState::initial(geom, x0.clone())?;
    frames[..n2].copy_from_slice(init.frame.as_slice());

    let mut stepper = Stepper::new(n);
    let mut drift = vec![0.0; n];
    let mut correction = vec![0.0; n];
    let mut terms = geom.point_terms(x0.radius());
    for k in 0..steps {
        let (done, rest) = points.split_at_mut((k + 1) * n);
        let x = &done[k * n..];
        let x_next = &mut rest[..n];
        let (fdone, frest) = frames.split_at_mut((k + 1) * n2);
        let u = &fdone[k * n2..];
        let u_next = &mut frest[..n2];
        let dt = grid.dt(k);
        let db = inc.step(k);
        let loc = geom.local_with(x, norm(x), terms);

        let drift_ref = match kind {
            PathKind::Bridge => {
                let tau = 1.0 - grid.t(k);
                grad_log_k_into(tau, loc.d1_over_r, x, &mut drift);
                frame_inverse_apply(&loc, u, &drift, &mut correction);
                for (d, c) in db_tilde[k * n..(k + 1) * n].iter_mut().zip(&correction) {
                    *d += c * dt;
                }
                Some(drift.as_slice())
            }
            PathKind::Free => None,
        };

        stepper.heun(geom, &loc, u, db, dt, drift_ref, x_next, u_next);
        let fail = |reason: &str| Error::Simulation {
            step: k,
            reason: reason.into(),
        };
        if x_next.iter().chain(u_next.iter()).any(|v| !v.is_finite()) {
            return Err(fail("non-finite state"));
        }
        let r_next = norm(x_next);
        terms = geom.point_terms(r_next);
        if !geom.is_flat() {
            gram_schmidt_in_place(&geom.local_with(x_next, r_next, terms), u_next)
                .map_err(|e| fail(&format!("frame collapse: {e}")))?;
        }
    }

    Ok(FramePathSample {
        grid: grid.clone(),
        dim: n,
        kind,
        points,
        frames,
        db: inc.as_slice().to_vec(),
        db_tilde,
    })
}

/// Radius at each node of a Bessel bridge of dimension `n` from `r0` to 0:
///
/// ```text
/// dr = dβ + (n−1)/(2r) dt − r/(1−t) dt
/// ```
///
/// Sampled exactly as the norm of an `n`-dimensional Brownian bridge to the
/// origin, whose transitions are Gaussian:
/// `y_{k+1} | y_k ~ N(y_k τ_{k+1}/τ_k, Δt τ_{k+1}/τ_k)` with `τ = 1 − t`.
pub fn simulate_bessel_bridge<R: Rng + ?Sized>(
    n: usize,
    r0: f64,
    grid: &TimeGrid,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be ≥ 1".into()));
    }
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::InvalidInput(format!("r0 must be > 0, got {r0}")));
    }
    let mut y = vec![0.0; n];
    y[0] = r0;
    let mut out = Vec::with_capacity(grid.steps() + 1);
    out.push(r0);
    for k in 0..grid.steps() {
        let tau = 1.0 - grid.t(k);
        let ratio = (1.0 - grid.t(k + 1)) / tau;
        let sd = (grid.dt(k) * ratio).sqrt();
        for v in y.iter_mut() {
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            *v = *v * ratio + sd * z;
        }
        out.push(norm(&y));
    }
    Ok(out)
}
