use super::runner::{run_paths, McSettings};
use super::stats::{Estimate, Z_THRESHOLD};
use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, GeometryModel};
use crate::pathspace::{endpoint_pairing, CmDirection};
use crate::rng::{path_stream, StreamPurpose};
use crate::sde::simulate_bridge;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow {
    /// Requested time.
    pub t: f64,
    /// Grid node time actually used.
    pub t_node: f64,
    pub m: f64,
    pub se: f64,
}

/// `m(t) = E[⟨∇log k_{1−t}(x̃_t), ũ_t h(t)⟩²]` at several times.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayTable {
    pub direction: String,
    pub rows: Vec<DecayRow>,
    pub n_paths: usize,
    pub seed: u64,
}

impl DecayTable {
    /// Each value lies below its predecessor by more than `margin` combined
    /// standard errors.
    pub fn strictly_decreasing(&self, margin: f64) -> bool {
        self.rows.windows(2).all(|w| {
            let s = (w[0].se.powi(2) + w[1].se.powi(2)).sqrt();
            w[0].m - w[1].m > margin * s
        })
    }

    pub fn passes(&self) -> bool {
        self.strictly_decreasing(Z_THRESHOLD)
    }

    /// The last value is not below the first by more than the threshold
    /// number of combined standard errors.
    pub fn no_decay(&self) -> bool {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) if self.rows.len() > 1 => {
                let s = (a.se.powi(2) + b.se.powi(2)).sqrt();
                a.m - b.m <= Z_THRESHOLD * s
            }
            _ => false,
        }
    }
}

pub fn endpoint_decay_check(
    geom: &GeometryModel,
    x0: &ChartPoint,
    h: &CmDirection,
    ts: &[f64],
    settings: &McSettings,
) -> Result<DecayTable> {
    if ts.is_empty() {
        return Err(Error::InvalidInput("no decay times given".into()));
    }
    let grid = &settings.grid;
    let nodes = ts
        .iter()
        .map(|&t| {
            if t <= 0.0 {
                Err(Error::InvalidInput(format!("decay time {t} must be > 0")))
            } else {
                grid.node_for(t)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let batch = run_paths(settings.n_paths, settings.policy, |i| {
        let mut rng = path_stream(settings.seed, StreamPurpose::Bridge, i);
        let path = simulate_bridge(geom, x0, grid, &mut rng)?;
        Ok(nodes
            .iter()
            .map(|&k| endpoint_pairing(geom, &path, h, k).powi(2))
            .collect::<Vec<f64>>())
    })?;
    let rows = ts
        .iter()
        .zip(&nodes)
        .enumerate()
        .map(|(j, (&t, &k))| {
            let xs: Vec<f64> = batch.values.iter().map(|v| v[j]).collect();
            let e = Estimate::from_samples(&xs);
            DecayRow {
                t,
                t_node: grid.t(k),
                m: e.mean,
                se: e.se,
            }
        })
        .collect();
    Ok(DecayTable {
        direction: h.key(),
        rows,
        n_paths: batch.values.len(),
        seed: settings.seed,
    })
}
