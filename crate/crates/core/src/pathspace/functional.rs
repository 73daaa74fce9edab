use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::GeometryModel;
use crate::sde::FramePathSample;

/// Central-difference step for gradients without a closed form.
pub const FD_STEP: f64 = 1e-5;

type CustomFn = dyn Fn(&[&[f64]]) -> f64 + Send + Sync;

/// A user-supplied `f(x_{t₁}, …, x_{t_m})`; gradients come from central
/// differences.
#[derive(Clone)]
pub struct CustomFunctional {
    name: String,
    times: Vec<f64>,
    f: Arc<CustomFn>,
}

impl fmt::Debug for CustomFunctional {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("CustomFunctional")
            .field("name", &self.name)
            .field("times", &self.times)
            .finish_non_exhaustive()
    }
}

impl PartialEq for CustomFunctional {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.times == other.times && Arc::ptr_eq(&self.f, &other.f)
    }
}

/// Cylindrical functional `F(σ) = f(σ_{t₁}, …, σ_{t_m})`.
#[derive(Debug, Clone, PartialEq)]
pub enum CylinderFunctional {
    One,
    /// `(x^axis_t)^power`, axis 0-based.
    Coord { power: u32, axis: usize, t: f64 },
    /// `r(x_t)² = |x_t|²` in normal coordinates.
    Dist2 { t: f64 },
    /// `exp(−r(x_t)² / (2 w²))`.
    Bump { t: f64, width: f64 },
    Product(Box<CylinderFunctional>, Box<CylinderFunctional>),
    Custom(CustomFunctional),
}

/// Splits `name(a, b, …)` into the name and its top-level arguments.
pub(crate) fn split_call(s: &str) -> Option<(&str, Vec<&str>)> {
    let s = s.trim();
    let open = s.find('(')?;
    if !s.ends_with(')') {
        return None;
    }
    let name = s[..open].trim();
    let inner = &s[open + 1..s.len() - 1];
    let mut args = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            ',' if depth == 0 => {
                args.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return None;
    }
    if !inner.trim().is_empty() {
        args.push(inner[start..].trim());
    }
    Some((name, args))
}

impl CylinderFunctional {
    pub const REGISTRY: [&'static str; 5] = [
        "one",
        "coord(k,axis,t)",
        "dist2(t)",
        "bump(t[,width])",
        "prod(F,G)",
    ];

    pub fn custom(
        name: impl Into<String>,
        times: Vec<f64>,
        f: impl Fn(&[&[f64]]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        CylinderFunctional::Custom(CustomFunctional {
            name: name.into(),
            times,
            f: Arc::new(f),
        })
    }

    pub fn product(a: CylinderFunctional, b: CylinderFunctional) -> Self {
        CylinderFunctional::Product(Box::new(a), Box::new(b))
    }

    /// Parses a registry key. `axis` is 1-based and checked against `dim`.
    pub fn parse(key: &str, dim: usize) -> Result<Self> {
        let key = key.trim();
        let bad = |detail: &str| {
            Error::InvalidInput(format!(
                "unknown functional '{key}'{detail}; available: {}",
                Self::REGISTRY.join(", ")
            ))
        };
        if key == "one" {
            return Ok(CylinderFunctional::One);
        }
        let (name, args) = split_call(key).ok_or_else(|| bad(""))?;
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!(" (bad number '{s}')")));
        let time = |s: &str| {
            let t = num(s)?;
            if (0.0..1.0).contains(&t) {
                Ok(t)
            } else {
                Err(Error::InvalidInput(format!("functional time {t} outside [0, 1)")))
            }
        };
        match (name, args.as_slice()) {
            ("coord", [k, axis, t]) => {
                let power: u32 = k.parse().map_err(|_| bad(" (power must be an integer)"))?;
                let axis: usize = axis.parse().map_err(|_| bad(" (axis must be an integer)"))?;
                if !(1..=dim).contains(&axis) {
                    return Err(Error::InvalidInput(format!(
                        "coord axis {axis} outside 1..={dim}"
                    )));
                }
                Ok(CylinderFunctional::Coord {
                    power,
                    axis: axis - 1,
                    t: time(t)?,
                })
            }
            ("dist2", [t]) => Ok(CylinderFunctional::Dist2 { t: time(t)? }),
            ("bump", [t]) => Ok(CylinderFunctional::Bump {
                t: time(t)?,
                width: 1.0,
            }),
            ("bump", [t, w]) => {
                let width = num(w)?;
                if !(width.is_finite() && width > 0.0) {
                    return Err(Error::InvalidInput(format!("bump width must be > 0, got {width}")));
                }
                Ok(CylinderFunctional::Bump { t: time(t)?, width })
            }
            ("prod" | "product", [a, b]) => Ok(Self::product(Self::parse(a, dim)?, Self::parse(b, dim)?)),
            _ => Err(bad("")),
        }
    }

    pub fn key(&self) -> String {
        match self {
            CylinderFunctional::One => "one".into(),
            CylinderFunctional::Coord { power, axis, t } => format!("coord({power},{},{t})", axis + 1),
            CylinderFunctional::Dist2 { t } => format!("dist2({t})"),
            CylinderFunctional::Bump { t, width } if *width == 1.0 => format!("bump({t})"),
            CylinderFunctional::Bump { t, width } => format!("bump({t},{width})"),
            CylinderFunctional::Product(a, b) => format!("prod({},{})", a.key(), b.key()),
            CylinderFunctional::Custom(c) => c.name.clone(),
        }
    }

    fn collect_times(&self, out: &mut Vec<f64>) {
        match self {
            CylinderFunctional::One => {}
            CylinderFunctional::Coord { t, .. }
            | CylinderFunctional::Dist2 { t }
            | CylinderFunctional::Bump { t, .. } => out.push(*t),
            CylinderFunctional::Product(a, b) => {
                a.collect_times(out);
                b.collect_times(out);
            }
            CylinderFunctional::Custom(c) => out.extend_from_slice(&c.times),
        }
    }

    /// Distinct evaluation times, increasing. These index the slots of
    /// `value` and `covectors`.
    pub fn times(&self) -> Vec<f64> {
        let mut t = Vec::new();
        self.collect_times(&mut t);
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }

    pub fn has_closed_form(&self) -> bool {
        match self {
            CylinderFunctional::Custom(_) => false,
            CylinderFunctional::Product(a, b) => a.has_closed_form() && b.has_closed_form(),
            _ => true,
        }
    }

    fn slot(times: &[f64], t: f64) -> usize {
        times
            .iter()
            .position(|&s| s == t)
            .expect("time slot registered by times()")
    }

    /// `f` at points given per slot of `times`.
    pub fn value(&self, times: &[f64], points: &[&[f64]]) -> f64 {
        match self {
            CylinderFunctional::One => 1.0,
            CylinderFunctional::Coord { power, axis, t } => {
                points[Self::slot(times, *t)][*axis].powi(*power as i32)
            }
            CylinderFunctional::Dist2 { t } => {
                let x = points[Self::slot(times, *t)];
                crate::geometry::dot(x, x)
            }
            CylinderFunctional::Bump { t, width } => {
                let x = points[Self::slot(times, *t)];
                (-crate::geometry::dot(x, x) / (2.0 * width * width)).exp()
            }
            CylinderFunctional::Product(a, b) => a.value(times, points) * b.value(times, points),
            CylinderFunctional::Custom(c) => {
                let pts: Vec<&[f64]> = c.times.iter().map(|&t| points[Self::slot(times, t)]).collect();
                (c.f)(&pts)
            }
        }
    }

    /// Adds `scale · ∂_k f` (chart covector components) to `out[k]`.
    fn accumulate(&self, times: &[f64], points: &[&[f64]], scale: f64, out: &mut [Vec<f64>]) {
        match self {
            CylinderFunctional::One => {}
            CylinderFunctional::Coord { power, axis, t } => {
                if *power > 0 {
                    let k = Self::slot(times, *t);
                    let p = *power as f64;
                    out[k][*axis] += scale * p * points[k][*axis].powi(*power as i32 - 1);
                }
            }
            CylinderFunctional::Dist2 { t } => {
                let k = Self::slot(times, *t);
                for (o, x) in out[k].iter_mut().zip(points[k]) {
                    *o += scale * 2.0 * x;
                }
            }
            CylinderFunctional::Bump { t, width } => {
                let k = Self::slot(times, *t);
                let w2 = width * width;
                let v = (-crate::geometry::dot(points[k], points[k]) / (2.0 * w2)).exp();
                for (o, x) in out[k].iter_mut().zip(points[k]) {
                    *o -= scale * v * x / w2;
                }
            }
            CylinderFunctional::Product(a, b) => {
                let va = a.value(times, points);
                let vb = b.value(times, points);
                a.accumulate(times, points, scale * vb, out);
                b.accumulate(times, points, scale * va, out);
            }
            CylinderFunctional::Custom(_) => {
                let fd = self.covectors_fd(times, points);
                for (o, d) in out.iter_mut().zip(fd) {
                    for (oi, di) in o.iter_mut().zip(d) {
                        *oi += scale * di;
                    }
                }
            }
        }
    }

    /// Partial derivatives `∂_k f` per slot, as chart covectors.
    pub fn covectors(&self, times: &[f64], points: &[&[f64]]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = points.iter().map(|p| vec![0.0; p.len()]).collect();
        self.accumulate(times, points, 1.0, &mut out);
        out
    }

    /// Central-difference version of [`covectors`](Self::covectors).
    pub fn covectors_fd(&self, times: &[f64], points: &[&[f64]]) -> Vec<Vec<f64>> {
        let mut owned: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
        let mut out = Vec::with_capacity(points.len());
        for k in 0..points.len() {
            let mut c = vec![0.0; points[k].len()];
            for i in 0..c.len() {
                let x0 = owned[k][i];
                owned[k][i] = x0 + FD_STEP;
                let fp = self.value(times, &owned.iter().map(|v| v.as_slice()).collect::<Vec<_>>());
                owned[k][i] = x0 - FD_STEP;
                let fm = self.value(times, &owned.iter().map(|v| v.as_slice()).collect::<Vec<_>>());
                owned[k][i] = x0;
                c[i] = (fp - fm) / (2.0 * FD_STEP);
            }
            out.push(c);
        }
        out
    }

    /// Riemannian gradients `∇_k f = G⁻¹ ∂_k f` per slot.
    pub fn gradients(&self, geom: &GeometryModel, times: &[f64], points: &[&[f64]]) -> Vec<Vec<f64>> {
        raise_all(geom, points, self.covectors(times, points))
    }

    pub fn gradients_fd(&self, geom: &GeometryModel, times: &[f64], points: &[&[f64]]) -> Vec<Vec<f64>> {
        raise_all(geom, points, self.covectors_fd(times, points))
    }

    /// Node indices of the evaluation times on a path grid.
    pub fn bind(&self, path: &FramePathSample) -> Result<BoundFunctional> {
        let times = self.times();
        let nodes = times
            .iter()
            .map(|&t| path.grid().node_for(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundFunctional { times, nodes })
    }
}

fn raise_all(geom: &GeometryModel, points: &[&[f64]], cov: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    cov.into_iter()
        .zip(points)
        .map(|(c, x)| {
            let mut g = vec![0.0; c.len()];
            geom.local(x).raise_into(&c, &mut g);
            g
        })
        .collect()
}

/// Evaluation times of a functional together with their snapped grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundFunctional {
    pub times: Vec<f64>,
    pub nodes: Vec<usize>,
}

impl BoundFunctional {
    pub fn points<'a>(&self, path: &'a FramePathSample) -> Vec<&'a [f64]> {
        self.nodes.iter().map(|&k| path.point(k)).collect()
    }
}
