//! Rotationally symmetric manifolds with a pole, in the global normal chart.
//!
//! The pole is the chart origin and `r(x) = ‖x‖`. All quantities come from
//! the warping function `f` of `g = dr² + f(r)² dθ²`, converted from polar to
//! Cartesian normal coordinates:
//!
//! ```text
//! g_ij = δ_ij + (f²/r² − 1)(δ_ij − x_i x_j / r²)
//! ```

mod local;
mod radial;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use local::{dot, grad_log_k_into, norm, Local};
pub use radial::{
    hyperbolic_phi_closed_form, GeometryKind, MetricTerms, RadialTerms, WarpedProfile, POLE_EPS,
};

/// A point in normal coordinates at the pole.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint(pub DVector<f64>);

impl ChartPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        ChartPoint(DVector::from_vec(coords))
    }

    pub fn pole(dim: usize) -> Self {
        ChartPoint(DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn radius(&self) -> f64 {
        self.0.norm()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }
}

impl From<&[f64]> for ChartPoint {
    fn from(s: &[f64]) -> Self {
        ChartPoint(DVector::from_column_slice(s))
    }
}

/// Christoffel symbols `Γᵏ_ij`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Christoffel {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.dim + i) * self.dim + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialData {
    pub r: f64,
    pub grad_r: DVector<f64>,
    /// Bilinear chart components of `Hess r`.
    pub hess_r: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobianData {
    pub log_j: f64,
    pub grad_log_j: DVector<f64>,
    pub lap_log_j: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiData {
    pub phi: f64,
    pub grad_phi: DVector<f64>,
}

/// `log k_τ` and its derivatives. `hess_log_k` holds bilinear chart
/// components; `dtime_log_k` is `∂/∂s log k_{1−s}` at `τ = 1 − s`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogKData {
    pub log_k: f64,
    pub grad_log_k: DVector<f64>,
    pub hess_log_k: DMatrix<f64>,
    pub dtime_log_k: f64,
}

/// Immutable description of a manifold with a pole.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryModel {
    dim: usize,
    kind: GeometryKind,
    growth_a: f64,
}

impl GeometryModel {
    pub fn new(dim: usize, kind: GeometryKind, growth_a: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be ≥ 1".into()));
        }
        if !(growth_a.is_finite() && growth_a >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "growth constant a must be finite and ≥ 0, got {growth_a}"
            )));
        }
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        match kind {
            GeometryKind::Hyperbolic { c } => positive("curvature scale c", c)?,
            GeometryKind::Warped(WarpedProfile::Sinh { c }) => positive("curvature scale c", c)?,
            GeometryKind::Warped(WarpedProfile::Cubic { kappa }) => {
                // f must stay positive for r > 0
                if !(kappa.is_finite() && kappa >= 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "cubic profile needs κ ≥ 0, got {kappa}"
                    )));
                }
            }
            _ => {}
        }
        Ok(GeometryModel { dim, kind, growth_a })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(dim, GeometryKind::Euclidean, 0.0)
    }

    pub fn hyperbolic(dim: usize, c: f64) -> Result<Self> {
        Self::new(dim, GeometryKind::Hyperbolic { c }, 0.0)
    }

    pub fn warped(dim: usize, profile: WarpedProfile) -> Result<Self> {
        Self::new(dim, GeometryKind::Warped(profile), 0.0)
    }

    pub fn with_growth_constant(mut self, a: f64) -> Result<Self> {
        self = Self::new(self.dim, self.kind, a)?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn growth_constant(&self) -> f64 {
        self.growth_a
    }

    pub fn is_flat(&self) -> bool {
        matches!(
            self.kind,
            GeometryKind::Euclidean | GeometryKind::Warped(WarpedProfile::Flat)
        )
    }

    pub fn label(&self) -> String {
        match self.kind {
            GeometryKind::Euclidean => format!("euclidean(n={})", self.dim),
            GeometryKind::Hyperbolic { c } => format!("hyperbolic(n={}, c={c})", self.dim),
            GeometryKind::Warped(p) => format!("warped:{}(n={})", p.name(), self.dim),
        }
    }

    fn check(&self, x: &ChartPoint) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        if x.0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite chart coordinates".into()));
        }
        Ok(x.radius())
    }

    /// Radius at which pole limits of singular radial quantities are taken.
    fn pole_radius(&self) -> f64 {
        match self.kind {
            GeometryKind::Warped(WarpedProfile::Cubic { .. } | WarpedProfile::Sinh { .. }) => 1e-4,
            _ => POLE_EPS,
        }
    }

    /// Kernel view at a chart point given as a slice. No validation.
    #[inline]
    pub fn local<'a>(&self, x: &'a [f64]) -> Local<'a> {
        let r = norm(x);
        self.local_with(x, r, self.point_terms(r))
    }

    /// Kernel view from terms computed earlier by [`point_terms`](Self::point_terms).
    #[inline]
    pub fn local_with<'a>(&self, x: &'a [f64], r: f64, terms: (MetricTerms, f64)) -> Local<'a> {
        Local {
            x,
            r,
            m: terms.0,
            d1_over_r: terms.1,
        }
    }

    /// Metric pieces and `(log J)′/r` at radius `r`.
    #[inline]
    pub fn point_terms(&self, r: f64) -> (MetricTerms, f64) {
        self.kind.point_terms(self.dim, r)
    }

    #[inline]
    pub fn radial_terms(&self, r: f64) -> RadialTerms {
        self.kind.radial_terms(self.dim, r)
    }

    /// Radial terms with the pole replaced by its limit radius.
    #[inline]
    pub fn radial_terms_regular(&self, r: f64) -> RadialTerms {
        self.radial_terms(r.max(self.pole_radius()))
    }

    #[inline]
    pub fn d1_over_r(&self, r: f64) -> f64 {
        self.kind.d1_over_r(self.dim, r)
    }

    pub fn metric_at(&self, x: &ChartPoint) -> Result<DMatrix<f64>> {
        self.check(x)?;
        let loc = self.local(x.as_slice());
        let n = self.dim;
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { loc.m.alpha } else { 0.0 };
            d + loc.m.beta * x.0[i] * x.0[j]
        }))
    }

    /// Closed-form Christoffel symbols. Zero at the pole, which is their limit
    /// in normal coordinates.
    pub fn christoffel_at(&self, x: &ChartPoint) -> Result<Christoffel> {
        let r = self.check(x)?;
        let n = self.dim;
        let mut out = Christoffel::zeros(n);
        if r < POLE_EPS || self.is_flat() {
            return Ok(out);
        }
        let loc = self.local(x.as_slice());
        let mut ei = vec![0.0; n];
        let mut ej = vec![0.0; n];
        let mut g = vec![0.0; n];
        for i in 0..n {
            ei.fill(0.0);
            ei[i] = 1.0;
            for j in 0..n {
                ej.fill(0.0);
                ej[j] = 1.0;
                loc.connection_into(&ei, &ej, &mut g);
                for (k, gk) in g.iter().enumerate() {
                    out.set(k, i, j, *gk);
                }
            }
        }
        Ok(out)
    }

    pub fn ricci_sharp_at(&self, x: &ChartPoint) -> Result<DMatrix<f64>> {
        let r = self.check(x)?;
        let n = self.dim;
        let t = self.radial_terms_regular(r);
        if r < POLE_EPS {
            return Ok(DMatrix::identity(n, n) * t.ric_tan);
        }
        let loc = self.local(x.as_slice());
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e.fill(0.0);
            e[j] = 1.0;
            loc.ricci_apply_into(&t, &e, &mut col);
            m.column_mut(j).copy_from_slice(&col);
        }
        Ok(m)
    }

    pub fn radial_data(&self, x: &ChartPoint) -> Result<RadialData> {
        let r = self.check(x)?;
        if r < POLE_EPS {
            return Err(Error::DegeneratePoint { radius: r });
        }
        let n = self.dim;
        let t = self.radial_terms(r);
        let loc = self.local(x.as_slice());
        let grad_r = &x.0 / r;
        let hess_r = DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { 1.0 } else { 0.0 };
            t.hess_tan * loc.m.alpha * (d - x.0[i] * x.0[j] / (r * r))
        });
        Ok(RadialData { r, grad_r, hess_r })
    }

    pub fn jacobian_data(&self, x: &ChartPoint) -> Result<JacobianData> {
        let r = self.check(x)?;
        let n = self.dim;
        if r < POLE_EPS {
            let t = self.radial_terms_regular(r);
            return Ok(JacobianData {
                log_j: 0.0,
                grad_log_j: DVector::zeros(n),
                lap_log_j: t.lap_log_j(),
            });
        }
        let t = self.radial_terms(r);
        Ok(JacobianData {
            log_j: t.log_j,
            grad_log_j: &x.0 * t.d1_over_r,
            lap_log_j: t.lap_log_j(),
        })
    }

    pub fn phi_data(&self, x: &ChartPoint) -> Result<PhiData> {
        let r = self.check(x)?;
        let n = self.dim;
        if r < POLE_EPS {
            return Ok(PhiData {
                phi: self.radial_terms_regular(r).phi(),
                grad_phi: DVector::zeros(n),
            });
        }
        let t = self.radial_terms(r);
        Ok(PhiData {
            phi: t.phi(),
            grad_phi: &x.0 * (t.dphi() / r),
        })
    }

    /// Bilinear chart components of `Hess log J = (log J)″ dr⊗dr + (log J)′ Hess r`.
    pub fn hess_log_j(&self, x: &ChartPoint) -> Result<DMatrix<f64>> {
        let r = self.check(x)?;
        if r < POLE_EPS {
            return Err(Error::DegeneratePoint { radius: r });
        }
        let n = self.dim;
        let t = self.radial_terms(r);
        let alpha = self.kind.metric_terms(r).alpha;
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { 1.0 } else { 0.0 };
            let par = x.0[i] * x.0[j] / (r * r);
            t.d2 * par + t.d1 * t.hess_tan * alpha * (d - par)
        }))
    }

    pub fn log_k_data(&self, tau: f64, x: &ChartPoint) -> Result<LogKData> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidInput(format!("remaining time must be > 0, got {tau}")));
        }
        let r = self.check(x)?;
        let n = self.dim;
        let nf = n as f64;
        let r2 = r * r;
        let dtime_log_k = nf / (2.0 * tau) - r2 / (2.0 * tau * tau);
        let t = self.radial_terms_regular(r);
        let log_j = if r < POLE_EPS { 0.0 } else { t.log_j };
        let log_k =
            -0.5 * nf * (2.0 * std::f64::consts::PI * tau).ln() - r2 / (2.0 * tau) - 0.5 * log_j;
        let mut grad = vec![0.0; n];
        grad_log_k_into(tau, self.d1_over_r(r), x.as_slice(), &mut grad);
        let hess_log_k = if r < POLE_EPS {
            DMatrix::identity(n, n) * -(1.0 / tau + 0.5 * t.d2)
        } else {
            let loc = self.local(x.as_slice());
            let mut ei = vec![0.0; n];
            let mut ej = vec![0.0; n];
            DMatrix::from_fn(n, n, |i, j| {
                ei.fill(0.0);
                ej.fill(0.0);
                ei[i] = 1.0;
                ej[j] = 1.0;
                loc.hess_log_k_form(&t, tau, &ei, &ej)
            })
        };
        Ok(LogKData {
            log_k,
            grad_log_k: DVector::from_vec(grad),
            hess_log_k,
            dtime_log_k,
        })
    }

    /// `log k_τ` at radius `r`, without validation.
    #[inline]
    pub fn log_k(&self, tau: f64, r: f64) -> f64 {
        let nf = self.dim as f64;
        let log_j = if r < POLE_EPS || self.is_flat() {
            0.0
        } else {
            self.radial_terms(r).log_j
        };
        -0.5 * nf * (2.0 * std::f64::consts::PI * tau).ln() - r * r / (2.0 * tau) - 0.5 * log_j
    }

    /// `Φ` at radius `r`, with its pole limit.
    #[inline]
    pub fn phi(&self, r: f64) -> f64 {
        if self.is_flat() {
            0.0
        } else {
            self.radial_terms_regular(r).phi()
        }
    }

    /// Trace of a bilinear form with respect to `g`.
    pub fn trace_g(&self, x: &ChartPoint, form: &DMatrix<f64>) -> Result<f64> {
        let g = self.metric_at(x)?;
        let ginv = g
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular metric".into()))?;
        Ok((ginv * form).trace())
    }

    /// `|v|²_g` for a chart vector.
    pub fn norm2_g(&self, x: &ChartPoint, v: &DVector<f64>) -> Result<f64> {
        self.check(x)?;
        let loc = self.local(x.as_slice());
        Ok(loc.inner(v.as_slice(), v.as_slice()))
    }
}
