//! Allocation-free chart kernels at a single point.
//!
//! The metric in normal coordinates is `g_ij = α δ_ij + β x_i x_j` with
//! `β = (1 − α)/r²`, so every contraction the integrator needs is `O(n)`.

use super::radial::{MetricTerms, RadialTerms, POLE_EPS};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Metric data frozen at one chart point.
#[derive(Debug, Clone, Copy)]
pub struct Local<'a> {
    pub x: &'a [f64],
    pub r: f64,
    pub m: MetricTerms,
    /// `(log J)′/r` at `r`.
    pub d1_over_r: f64,
}

impl<'a> Local<'a> {
    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn at_pole(&self) -> bool {
        self.r < POLE_EPS
    }

    /// `g(a, b)`.
    #[inline]
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.m.alpha * dot(a, b) + self.m.beta * dot(self.x, a) * dot(self.x, b)
    }

    /// `G v`, turning a chart vector into its covector components.
    #[inline]
    pub fn lower_into(&self, v: &[f64], out: &mut [f64]) {
        let xv = self.m.beta * dot(self.x, v);
        for ((o, vi), xi) in out.iter_mut().zip(v).zip(self.x) {
            *o = self.m.alpha * vi + xv * xi;
        }
    }

    /// `G⁻¹ c`, turning covector components into a chart vector.
    #[inline]
    pub fn raise_into(&self, c: &[f64], out: &mut [f64]) {
        let xc = self.m.beta * dot(self.x, c);
        let inv = 1.0 / self.m.alpha;
        for ((o, ci), xi) in out.iter_mut().zip(c).zip(self.x) {
            *o = (ci - xc * xi) * inv;
        }
    }

    /// `Γᵏ_ij vⁱ wʲ`, written to `out`.
    #[inline]
    pub fn connection_into(&self, v: &[f64], w: &[f64], out: &mut [f64]) {
        let xv = dot(self.x, v);
        let xw = dot(self.x, w);
        let vw = dot(v, w);
        let a1 = 0.5 * self.m.dalpha_over_r;
        let a2 = 0.5 * self.m.dbeta_over_r;
        let radial = a2 * xv * xw + self.m.beta * vw - a1 * vw;
        let mut xl = 0.0;
        for k in 0..out.len() {
            let l = a1 * (xv * w[k] + xw * v[k]) + radial * self.x[k];
            out[k] = l;
            xl += self.x[k] * l;
        }
        let inv = 1.0 / self.m.alpha;
        let bxl = self.m.beta * xl;
        for (o, xi) in out.iter_mut().zip(self.x) {
            *o = (*o - bxl * xi) * inv;
        }
    }

    /// Split `v` into its radial coefficient `(x·v)/r²`; zero at the pole.
    #[inline]
    fn radial_coefficient(&self, v: &[f64]) -> f64 {
        if self.at_pole() {
            0.0
        } else {
            dot(self.x, v) / (self.r * self.r)
        }
    }

    /// `Ric♯ v` from the two Ricci eigenvalues.
    #[inline]
    pub fn ricci_apply_into(&self, t: &RadialTerms, v: &[f64], out: &mut [f64]) {
        let p = self.radial_coefficient(v);
        for ((o, vi), xi) in out.iter_mut().zip(v).zip(self.x) {
            *o = t.ric_tan * vi + (t.ric_rad - t.ric_tan) * p * xi;
        }
    }

    /// `Hess r (a, b)`.
    #[inline]
    pub fn hess_r_form(&self, t: &RadialTerms, a: &[f64], b: &[f64]) -> f64 {
        let xa = dot(self.x, a);
        let xb = dot(self.x, b);
        t.hess_tan * self.m.alpha * (dot(a, b) - xa * xb / (self.r * self.r))
    }

    /// `∇d log k_τ (a, b)`, including the `−½ Hess log J` piece.
    #[inline]
    pub fn hess_log_k_form(&self, t: &RadialTerms, tau: f64, a: &[f64], b: &[f64]) -> f64 {
        if self.at_pole() {
            return -(1.0 / tau + 0.5 * t.d2) * dot(a, b);
        }
        let xa = dot(self.x, a);
        let xb = dot(self.x, b);
        let r2 = self.r * self.r;
        let par = xa * xb / r2;
        let perp = dot(a, b) - par;
        -(1.0 / tau + 0.5 * t.d2) * par
            - (self.r / tau + 0.5 * t.d1) * t.hess_tan * self.m.alpha * perp
    }

    /// `dΦ(v)`.
    #[inline]
    pub fn dphi(&self, t: &RadialTerms, v: &[f64]) -> f64 {
        if self.at_pole() {
            return 0.0;
        }
        t.dphi() / self.r * dot(self.x, v)
    }
}

/// `∇ log k_τ` as a chart vector; only needs `(log J)′/r`.
#[inline]
pub fn grad_log_k_into(tau: f64, d1_over_r: f64, x: &[f64], out: &mut [f64]) {
    let s = -(1.0 / tau + 0.5 * d1_over_r);
    for (o, xi) in out.iter_mut().zip(x) {
        *o = s * xi;
    }
}
