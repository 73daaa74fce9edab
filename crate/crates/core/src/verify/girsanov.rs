use super::runner::{run_paths, McSettings};
use super::stats::{Estimate, McReport};
use crate::error::{Error, Result};
use crate::geometry::{norm, ChartPoint, GeometryModel};
use crate::pathspace::CylinderFunctional;
use crate::rng::{path_stream, StreamPurpose};
use crate::sde::{simulate_bm, simulate_bridge, FramePathSample};

/// Outcome of the change-of-measure check at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct GirsanovReport {
    /// `E_free[M_t g]` against `E_bridge[g]`.
    pub weighted: McReport,
    /// `E_free[M_t]` against 1.
    pub martingale: McReport,
}

/// Density of the bridge law with respect to free Brownian motion on
/// paths up to the last node `t` of `path`:
///
/// ```text
/// M_t = k_{1−t}(x_t) / k_1(x_0) · exp(−∫₀ᵗ Φ(x_s) ds)
/// ```
///
/// with the trapezoid rule for the integral.
pub fn girsanov_density(geom: &GeometryModel, path: &FramePathSample) -> f64 {
    let grid = path.grid();
    let last = grid.steps();
    let r0 = norm(path.point(0));
    let rt = norm(path.point(last));
    let mut integral = 0.0;
    let mut phi_prev = geom.phi(r0);
    for k in 0..last {
        let phi_next = geom.phi(norm(path.point(k + 1)));
        integral += 0.5 * (phi_prev + phi_next) * grid.dt(k);
        phi_prev = phi_next;
    }
    (geom.log_k(1.0 - grid.t(last), rt) - geom.log_k(1.0, r0) - integral).exp()
}

/// Compares `E_free[M_t g(x)]` with `E_bridge[g(x̃)]` for a functional `g`
/// of the path up to time `t`. Both samples live on the grid cut at `t`.
pub fn girsanov_check(
    geom: &GeometryModel,
    x0: &ChartPoint,
    t: f64,
    g: &CylinderFunctional,
    settings: &McSettings,
) -> Result<GirsanovReport> {
    let full = &settings.grid;
    if !(t > 0.0 && t <= full.last() + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "Girsanov time {t} outside (0, {}]",
            full.last()
        )));
    }
    let node = full.node_for(t)?;
    if node == 0 {
        return Err(Error::InvalidInput(format!("time {t} snaps to the start of the grid")));
    }
    if let Some(&late) = g.times().iter().find(|&&s| s > full.t(node) + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "functional time {late} lies after t = {t}"
        )));
    }
    let grid = full.truncate(node);
    let value = |path: &FramePathSample| -> Result<f64> {
        let bound = g.bind(path)?;
        Ok(g.value(&bound.times, &bound.points(path)))
    };

    let free = run_paths(settings.n_paths, settings.policy, |i| {
        let mut rng = path_stream(settings.seed, StreamPurpose::Free, i);
        let path = simulate_bm(geom, x0, &grid, &mut rng)?;
        let m = girsanov_density(geom, &path);
        Ok((m, m * value(&path)?))
    })?;
    let bridge = run_paths(settings.n_paths, settings.policy, |i| {
        let mut rng = path_stream(settings.seed, StreamPurpose::Bridge, i);
        let path = simulate_bridge(geom, x0, &grid, &mut rng)?;
        value(&path)
    })?;

    let mut meta = free.meta(settings, &grid);
    meta.failures += bridge.failures;
    meta.wall_time = free.started.elapsed().as_secs_f64();
    let ms: Vec<f64> = free.values.iter().map(|v| v.0).collect();
    let mg: Vec<f64> = free.values.iter().map(|v| v.1).collect();
    let tn = grid.last();
    Ok(GirsanovReport {
        weighted: McReport::independent(
            format!("girsanov E[M g] vs bridge g={} t={tn}", g.key()),
            Estimate::from_samples(&mg),
            Estimate::from_samples(&bridge.values),
            &meta,
        ),
        martingale: McReport::independent(
            format!("girsanov E[M] t={tn}"),
            Estimate::from_samples(&ms),
            Estimate::exact(1.0),
            &meta,
        ),
    })
}
