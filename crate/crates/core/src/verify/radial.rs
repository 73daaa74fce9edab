use super::runner::{run_paths, McSettings};
use super::stats::{Estimate, McReport};
use crate::error::{Error, Result};
use crate::geometry::{norm, ChartPoint, GeometryModel};
use crate::rng::{path_stream, StreamPurpose};
use crate::sde::{simulate_bessel_bridge, simulate_bridge};

fn slice_nodes(settings: &McSettings, t_slices: &[f64]) -> Result<Vec<usize>> {
    if t_slices.is_empty() {
        return Err(Error::InvalidInput("no time slices given".into()));
    }
    t_slices.iter().map(|&t| settings.grid.node_for(t)).collect()
}

/// First and second radial moments of the bridge against the Bessel-bridge
/// oracle of the same dimension and starting radius, per time slice.
pub fn radial_law_check(
    geom: &GeometryModel,
    x0: &ChartPoint,
    t_slices: &[f64],
    settings: &McSettings,
) -> Result<Vec<McReport>> {
    let nodes = slice_nodes(settings, t_slices)?;
    let grid = &settings.grid;
    let radii_at = |rs: &dyn Fn(usize) -> f64| nodes.iter().map(|&k| rs(k)).collect::<Vec<f64>>();

    let bridge = run_paths(settings.n_paths, settings.policy, |i| {
        let mut rng = path_stream(settings.seed, StreamPurpose::Bridge, i);
        let path = simulate_bridge(geom, x0, grid, &mut rng)?;
        Ok(radii_at(&|k| norm(path.point(k))))
    })?;
    let bessel = run_paths(settings.n_paths, settings.policy, |i| {
        let mut rng = path_stream(settings.seed, StreamPurpose::Bessel, i);
        let r = simulate_bessel_bridge(geom.dim(), x0.radius(), grid, &mut rng)?;
        Ok(radii_at(&|k| r[k]))
    })?;

    let mut meta = bridge.meta(settings, grid);
    meta.failures += bessel.failures;
    let mut out = Vec::with_capacity(2 * nodes.len());
    for (j, &t) in t_slices.iter().enumerate() {
        for (name, p) in [("E[r]", 1), ("E[r^2]", 2)] {
            let a: Vec<f64> = bridge.values.iter().map(|v| v[j].powi(p)).collect();
            let b: Vec<f64> = bessel.values.iter().map(|v| v[j].powi(p)).collect();
            out.push(McReport::independent(
                format!("radial {name} t={t} bridge vs bessel"),
                Estimate::from_samples(&a),
                Estimate::from_samples(&b),
                &meta,
            ));
        }
    }
    Ok(out)
}

/// One row of the exponential-moment audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRow {
    pub t: f64,
    pub estimate: f64,
    pub se: f64,
}

/// Empirical `E[exp(2a r(x̃_t)²)]` along the bridge for the model's growth
/// constant `a`. Reported, not asserted: the estimate can be heavy-tailed.
pub fn exponential_moment_audit(
    geom: &GeometryModel,
    x0: &ChartPoint,
    t_slices: &[f64],
    settings: &McSettings,
) -> Result<Vec<MomentRow>> {
    let nodes = slice_nodes(settings, t_slices)?;
    let a = geom.growth_constant();
    let batch = run_paths(settings.n_paths, settings.policy, |i| {
        let mut rng = path_stream(settings.seed, StreamPurpose::Bridge, i);
        let path = simulate_bridge(geom, x0, &settings.grid, &mut rng)?;
        Ok(nodes
            .iter()
            .map(|&k| {
                let r = norm(path.point(k));
                (2.0 * a * r * r).exp()
            })
            .collect::<Vec<f64>>())
    })?;
    Ok(t_slices
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let xs: Vec<f64> = batch.values.iter().map(|v| v[j]).collect();
            let e = Estimate::from_samples(&xs);
            MomentRow {
                t,
                estimate: e.mean,
                se: e.se,
            }
        })
        .collect())
}
