use super::runner::{run_paths, sample_path, McSettings};
use super::stats::{Estimate, McReport};
use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, GeometryModel};
use crate::pathspace::{differential_along, divergence_direct, CmDirection, CylinderFunctional};
use crate::sde::PathKind;

/// One `(F, G, h)` triple of the integration-by-parts identity
///
/// ```text
/// E[G dF(u h) + F dG(u h)] = E[F G div(h)]
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct IbpCombo {
    pub f: CylinderFunctional,
    pub g: CylinderFunctional,
    pub h: CmDirection,
}

impl IbpCombo {
    pub fn new(f: CylinderFunctional, g: CylinderFunctional, h: CmDirection) -> Self {
        IbpCombo { f, g, h }
    }

    pub fn parse(f: &str, g: &str, h: &str, dim: usize) -> Result<Self> {
        Ok(IbpCombo {
            f: CylinderFunctional::parse(f, dim)?,
            g: CylinderFunctional::parse(g, dim)?,
            h: CmDirection::parse(h, dim)?,
        })
    }

    pub fn label(&self) -> String {
        format!("ibp F={} G={} h={}", self.f.key(), self.g.key(), self.h.key())
    }
}

pub fn ibp_check(
    geom: &GeometryModel,
    x0: &ChartPoint,
    combo: &IbpCombo,
    settings: &McSettings,
) -> Result<McReport> {
    let mut v = ibp_check_many(geom, x0, std::slice::from_ref(combo), settings)?;
    Ok(v.remove(0))
}

/// Several combinations evaluated on one shared set of bridge paths.
pub fn ibp_check_many(
    geom: &GeometryModel,
    x0: &ChartPoint,
    combos: &[IbpCombo],
    settings: &McSettings,
) -> Result<Vec<McReport>> {
    if combos.is_empty() {
        return Ok(Vec::new());
    }
    for c in combos {
        if !c.h.is_pinned() {
            return Err(Error::InvalidInput(format!(
                "direction {} does not vanish at t = 1",
                c.h.key()
            )));
        }
    }
    let mut directions: Vec<CmDirection> = Vec::new();
    for c in combos {
        if !directions.contains(&c.h) {
            directions.push(c.h);
        }
    }
    let grid = settings.path_grid();
    let batch = run_paths(settings.n_paths, settings.policy, |i| {
        let path = sample_path(geom, x0, settings, PathKind::Bridge, i)?;
        let divs = directions
            .iter()
            .map(|h| divergence_direct(geom, &path, h).map(|d| d.total))
            .collect::<Result<Vec<_>>>()?;
        combos
            .iter()
            .map(|c| {
                let times_f = c.f.times();
                let times_g = c.g.times();
                let bf = c.f.bind(&path)?;
                let bg = c.g.bind(&path)?;
                let fv = c.f.value(&times_f, &bf.points(&path));
                let gv = c.g.value(&times_g, &bg.points(&path));
                let df = differential_along(&c.f, &path, &c.h)?;
                let dg = differential_along(&c.g, &path, &c.h)?;
                let div = divs[directions.iter().position(|h| *h == c.h).unwrap_or(0)];
                Ok((gv * df + fv * dg, fv * gv * div))
            })
            .collect::<Result<Vec<(f64, f64)>>>()
    })?;
    let meta = batch.meta(settings, &grid);
    Ok(combos
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let lhs: Vec<f64> = batch.values.iter().map(|v| v[j].0).collect();
            let rhs: Vec<f64> = batch.values.iter().map(|v| v[j].1).collect();
            McReport::paired(c.label(), &lhs, &rhs, &meta)
        })
        .collect())
}

/// `E[div h]` against 0: the divergence weight is a mean-zero functional
/// of the bridge.
pub fn divergence_mean_check(
    geom: &GeometryModel,
    x0: &ChartPoint,
    h: &CmDirection,
    settings: &McSettings,
) -> Result<McReport> {
    let grid = settings.path_grid();
    let batch = run_paths(settings.n_paths, settings.policy, |i| {
        let path = sample_path(geom, x0, settings, PathKind::Bridge, i)?;
        Ok(divergence_direct(geom, &path, h)?.total)
    })?;
    let meta = batch.meta(settings, &grid);
    Ok(McReport::independent(
        format!("E[div h] h={}", h.key()),
        Estimate::from_samples(&batch.values),
        Estimate::exact(0.0),
        &meta,
    ))
}
