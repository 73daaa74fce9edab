use rand::Rng;
use rand_distr::StandardNormal;

use super::oracles::{fd_grad_norm2, fd_laplacian};
use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_phi_closed_form, norm, ChartPoint, GeometryKind, GeometryModel};
use crate::rng::{path_stream, StreamPurpose};

/// Tolerance between two closed-form routes.
pub const CLOSED_TOL: f64 = 1e-8;
/// Tolerance between a closed form and its finite-difference oracle.
pub const FD_TOL: f64 = 1e-5;

/// `|a − b| / max(1, |a|, |b|, scale)`; `scale` is the size of the largest
/// term when `a − b` is a sum with cancellation.
pub fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs()).max(scale.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub check: &'static str,
    pub tau: f64,
    pub r: f64,
    pub value: f64,
    pub reference: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub geometry: String,
    pub rows: Vec<IdentityRow>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> Vec<&IdentityRow> {
        self.rows.iter().filter(|r| !r.passed).collect()
    }

    pub fn worst(&self, check: &str) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.check == check)
            .map(|r| r.rel_err)
            .fold(0.0, f64::max)
    }
}

/// `count` chart points with radius uniform in `[r_min, r_max]` and
/// uniformly distributed direction.
pub fn random_sample_points(dim: usize, count: usize, r_min: f64, r_max: f64, seed: u64) -> Vec<ChartPoint> {
    let mut rng = path_stream(seed, StreamPurpose::Sampling, dim as u64);
    (0..count)
        .map(|_| {
            let r = r_min + (r_max - r_min) * rng.random::<f64>();
            let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let s = norm(&v).max(1e-300);
            v.iter_mut().for_each(|c| *c *= r / s);
            ChartPoint::new(v)
        })
        .collect()
}

struct Rows(Vec<IdentityRow>);

impl Rows {
    fn push(&mut self, check: &'static str, tau: f64, r: f64, value: f64, reference: f64, scale: f64, tol: f64) {
        let e = rel_err(value, reference, scale);
        self.0.push(IdentityRow {
            check,
            tau,
            r,
            value,
            reference,
            rel_err: e,
            tol,
            passed: e <= tol,
        });
    }

    fn audit(&mut self, check: &'static str, value: f64) {
        self.0.push(IdentityRow {
            check,
            tau: f64::NAN,
            r: f64::NAN,
            value,
            reference: value,
            rel_err: 0.0,
            tol: 0.0,
            passed: value.is_finite(),
        });
    }
}

/// Closed forms of the kernel identities against each other and against
/// finite-difference oracles, at every `(τ, x)`, plus curvature audits on a
/// radius grid.
pub fn identity_suite(geom: &GeometryModel, points: &[ChartPoint], taus: &[f64]) -> Result<IdentityReport> {
    let n = geom.dim();
    let nf = n as f64;
    let mut rows = Rows(Vec::new());
    for x in points {
        if x.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.dim(),
            });
        }
        let r = x.radius();
        if r < 1e-3 {
            return Err(Error::DegeneratePoint { radius: r });
        }
        let xs = x.as_slice();
        let t = geom.radial_terms(r);
        let phi = geom.phi(r);

        // (v) Φ = ½ J^{1/2} Δ J^{−1/2}
        let inv_sqrt_j = |y: &[f64]| {
            let ry = norm(y);
            if geom.is_flat() {
                1.0
            } else {
                (-0.5 * geom.radial_terms(ry).log_j).exp()
            }
        };
        let log_j = if geom.is_flat() { 0.0 } else { t.log_j };
        let phi_fd = 0.5 * (0.5 * log_j).exp() * fd_laplacian(geom, &inv_sqrt_j, xs)?;
        rows.push("phi_fd", f64::NAN, r, phi, phi_fd, 0.0, FD_TOL);
        if let GeometryKind::Hyperbolic { c } = geom.kind() {
            rows.push("phi_closed_form", f64::NAN, r, phi, hyperbolic_phi_closed_form(n, c, r), 0.0, CLOSED_TOL);
        }

        // (vi) Δr = tr_g Hess r
        let rd = geom.radial_data(x)?;
        let lap_r_trace = geom.trace_g(x, &rd.hess_r)?;
        let lap_r = if geom.is_flat() { (nf - 1.0) / r } else { t.lap_r };
        rows.push("lap_r_trace", f64::NAN, r, lap_r_trace, lap_r, 0.0, CLOSED_TOL);
        let lap_r_fd = fd_laplacian(geom, &|y: &[f64]| norm(y), xs)?;
        rows.push("lap_r_fd", f64::NAN, r, lap_r_fd, lap_r, 0.0, FD_TOL);

        // (vii) ‖∇dr‖_F ≤ Δr/√(n−1)
        if n > 1 {
            let ginv = geom
                .metric_at(x)?
                .try_inverse()
                .ok_or_else(|| Error::Numerical("singular metric".into()))?;
            let a = &ginv * &rd.hess_r;
            let frob = (&a * &a).trace().max(0.0).sqrt();
            let bound = lap_r / (nf - 1.0).sqrt();
            let ok = frob <= bound * (1.0 + 1e-10) + 1e-12;
            rows.0.push(IdentityRow {
                check: "hess_r_frobenius_bound",
                tau: f64::NAN,
                r,
                value: frob,
                reference: bound,
                rel_err: rel_err(frob, bound, 0.0),
                tol: 0.0,
                passed: ok,
            });
        }

        for &tau in taus {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::InvalidInput(format!("τ must be > 0, got {tau}")));
            }
            let lk = geom.log_k_data(tau, x)?;
            let log_k = |y: &[f64]| geom.log_k(tau, norm(y));
            let d1 = if geom.is_flat() { 0.0 } else { t.d1 };
            let lap_log_j = if geom.is_flat() { 0.0 } else { t.lap_log_j() };

            // (i) Δ log k
            let lap_closed = -(1.0 + r * lap_r) / tau - 0.5 * lap_log_j;
            let lap_trace = geom.trace_g(x, &lk.hess_log_k)?;
            let lap_fd = fd_laplacian(geom, &log_k, xs)?;
            rows.push("lap_log_k_trace", tau, r, lap_trace, lap_closed, 0.0, CLOSED_TOL);
            rows.push("lap_log_k_fd", tau, r, lap_fd, lap_closed, 0.0, FD_TOL);

            // (ii) ∂ₛ log k_{1−s} = −∂_τ log k_τ
            let dtau = 1e-5 * tau;
            let dtime_fd =
                -(geom.log_k(tau + dtau, r) - geom.log_k(tau - dtau, r)) / (2.0 * dtau);
            rows.push("dtime_log_k_fd", tau, r, dtime_fd, lk.dtime_log_k, 0.0, FD_TOL);

            // (iii) |∇ log k|² = (r/τ + ½ (log J)′)²
            let grad2_closed = (r / tau + 0.5 * d1).powi(2);
            let grad2_vec = geom.norm2_g(x, &lk.grad_log_k)?;
            let grad2_fd = fd_grad_norm2(geom, &log_k, xs)?;
            rows.push("grad_log_k_norm2", tau, r, grad2_vec, grad2_closed, 0.0, CLOSED_TOL);
            rows.push("grad_log_k_norm2_fd", tau, r, grad2_fd, grad2_closed, 0.0, FD_TOL);

            // (iv) ½Δ log k + ∂ₛ log k + ½|∇ log k|² = Φ
            let pde = |lap: f64, dt: f64, g2: f64| {
                let scale = (0.5 * lap).abs().max(dt.abs()).max((0.5 * g2).abs());
                (0.5 * lap + dt + 0.5 * g2, scale)
            };
            let (lhs, scale) = pde(lap_trace, lk.dtime_log_k, grad2_vec);
            rows.push("pde_identity", tau, r, lhs, phi, scale, CLOSED_TOL);
            let (lhs_fd, scale_fd) = pde(lap_fd, dtime_fd, grad2_fd);
            rows.push("pde_identity_fd", tau, r, lhs_fd, phi, scale_fd, FD_TOL);
        }
    }

    // (viii) curvature audits on a radius grid
    let radii: Vec<f64> = (0..=80).map(|i| 0.05 * i as f64).collect();
    let mut ric_max: f64 = 0.0;
    let mut phi_min = f64::INFINITY;
    for &r in &radii {
        let t = geom.radial_terms_regular(r);
        let (rr, rt) = if geom.is_flat() { (0.0, 0.0) } else { (t.ric_rad, t.ric_tan) };
        ric_max = ric_max.max(rr.abs()).max(rt.abs());
        phi_min = phi_min.min(geom.phi(r));
    }
    rows.audit("ricci_bound", ric_max);
    rows.audit("phi_lower_bound", phi_min);

    Ok(IdentityReport {
        geometry: geom.label(),
        rows: rows.0,
    })
}
