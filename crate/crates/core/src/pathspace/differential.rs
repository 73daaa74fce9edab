use std::str::FromStr;

use super::direction::CmDirection;
use super::functional::CylinderFunctional;
use crate::error::{Error, Result};
use crate::geometry::dot;
use crate::sde::{frame_apply, FramePathSample};

/// `dF(u h) = Σ_k ⟨∇_k f, u_{t_k} h(t_k)⟩_g`, which in the chart is the
/// covector `∂_k f` applied to `u_{t_k} h(t_k)`.
pub fn differential_along(
    f: &CylinderFunctional,
    path: &FramePathSample,
    h: &CmDirection,
) -> Result<f64> {
    if h.dim() != path.dim() {
        return Err(Error::DimensionMismatch {
            expected: path.dim(),
            got: h.dim(),
        });
    }
    let bound = f.bind(path)?;
    if h.is_zero() || bound.times.is_empty() {
        return Ok(0.0);
    }
    let points = bound.points(path);
    let cov = f.covectors(&bound.times, &points);
    let n = path.dim();
    let mut hv = vec![0.0; n];
    let mut uh = vec![0.0; n];
    let mut total = 0.0;
    for ((&t, &node), c) in bound.times.iter().zip(&bound.nodes).zip(&cov) {
        h.eval_into(t, &mut hv);
        frame_apply(path.frame(node), &hv, &mut uh);
        total += dot(c, &uh);
    }
    Ok(total)
}

/// Which Green function weights the gradient norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenKind {
    /// `G(s, t) = s ∧ t`.
    Based,
    /// `G⁰(s, t) = s ∧ t − s t`.
    Pinned,
}

impl GreenKind {
    pub fn kernel(&self, s: f64, t: f64) -> f64 {
        match self {
            GreenKind::Based => s.min(t),
            GreenKind::Pinned => s.min(t) - s * t,
        }
    }
}

impl FromStr for GreenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "based" => Ok(GreenKind::Based),
            "pinned" => Ok(GreenKind::Pinned),
            other => Err(Error::InvalidInput(format!(
                "unknown Green function '{other}'; available: based, pinned"
            ))),
        }
    }
}

/// `Σ_{k,j} G(t_k, t_j) ⟨u_{t_j} u_{t_k}⁻¹ ∇_k f, ∇_j f⟩_g`.
///
/// With `u` a `g`-isometry and `∇_k f = G⁻¹ ∂_k f`, the pulled-back
/// gradients are `u_kᵀ ∂_k f`, so the double sum is Euclidean in `ℝⁿ`.
pub fn green_gradient_norm(
    f: &CylinderFunctional,
    path: &FramePathSample,
    which: GreenKind,
) -> Result<f64> {
    let bound = f.bind(path)?;
    if bound.times.is_empty() {
        return Ok(0.0);
    }
    let n = path.dim();
    let points = bound.points(path);
    let cov = f.covectors(&bound.times, &points);
    let pulled: Vec<Vec<f64>> = cov
        .iter()
        .zip(&bound.nodes)
        .map(|(c, &node)| {
            let u = path.frame(node);
            (0..n).map(|a| dot(&u[a * n..(a + 1) * n], c)).collect()
        })
        .collect();
    let mut total = 0.0;
    for (k, &tk) in bound.times.iter().enumerate() {
        for (j, &tj) in bound.times.iter().enumerate() {
            total += which.kernel(tk, tj) * dot(&pulled[k], &pulled[j]);
        }
    }
    Ok(total)
}
