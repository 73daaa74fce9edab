//! Scalar radial functions of a rotationally symmetric metric `dr² + f(r)² dθ²`.
//!
//! Everything the chart-level code needs is a function of `r` only: the
//! tangential metric factor `α = (f/r)²`, the Jacobian profile
//! `log J = (n−1) log(f/r)` and its derivatives, `Δr`, and the two Ricci
//! eigenvalues. Hyperbolic space gets its own branch with power series near
//! the pole, where the generic quotients cancel catastrophically.

/// Radii below this are treated as the pole itself.
pub const POLE_EPS: f64 = 1e-8;

const SERIES_CUTOFF: f64 = 0.1;

/// Named warping profiles accepted by the `warped` geometry kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WarpedProfile {
    /// `f(r) = r`, flat space written as a warped product.
    Flat,
    /// `f(r) = r + κ r³ / 6`; radial curvature `−κ / (1 + κ r²/6)`.
    Cubic { kappa: f64 },
    /// `f(r) = sinh(c r) / c` pushed through the generic warped formulas.
    Sinh { c: f64 },
}

impl WarpedProfile {
    pub fn name(&self) -> &'static str {
        match self {
            WarpedProfile::Flat => "flat",
            WarpedProfile::Cubic { .. } => "cubic",
            WarpedProfile::Sinh { .. } => "sinh",
        }
    }

    /// `(f, f′, f″, f‴)` at `r`.
    pub fn derivatives(&self, r: f64) -> [f64; 4] {
        match *self {
            WarpedProfile::Flat => [r, 1.0, 0.0, 0.0],
            WarpedProfile::Cubic { kappa } => [
                r + kappa * r * r * r / 6.0,
                1.0 + 0.5 * kappa * r * r,
                kappa * r,
                kappa,
            ],
            WarpedProfile::Sinh { c } => {
                let z = c * r;
                [z.sinh() / c, z.cosh(), c * z.sinh(), c * c * z.cosh()]
            }
        }
    }
}

/// Which rotationally symmetric model the geometry is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometryKind {
    Euclidean,
    /// Constant sectional curvature `−c²`.
    Hyperbolic { c: f64 },
    Warped(WarpedProfile),
}

/// Pieces of the chart metric `g_ij = α δ_ij + β x_i x_j` and their radial
/// derivatives divided by `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTerms {
    pub alpha: f64,
    pub alpha_m1: f64,
    pub dalpha_over_r: f64,
    pub beta: f64,
    pub dbeta_over_r: f64,
}

impl MetricTerms {
    pub const IDENTITY: MetricTerms = MetricTerms {
        alpha: 1.0,
        alpha_m1: 0.0,
        dalpha_over_r: 0.0,
        beta: 0.0,
        dbeta_over_r: 0.0,
    };
}

/// All radial scalars at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialTerms {
    pub r: f64,
    pub metric: MetricTerms,
    /// `f′/f`, the tangential eigenvalue of `Hess r`.
    pub hess_tan: f64,
    /// `Δr = (n−1) f′/f`.
    pub lap_r: f64,
    /// `d(Δr)/dr`.
    pub dlap_r: f64,
    pub log_j: f64,
    /// Radial derivatives of `log J`.
    pub d1: f64,
    pub d1_over_r: f64,
    pub d2: f64,
    pub d3: f64,
    /// Ricci eigenvalue on the radial direction.
    pub ric_rad: f64,
    /// Ricci eigenvalue on tangential directions.
    pub ric_tan: f64,
}

impl RadialTerms {
    /// `Φ = ⅛ |∇log J|² − ¼ Δ log J` for the radial profile.
    pub fn phi(&self) -> f64 {
        0.125 * self.d1 * self.d1 - 0.25 * (self.d2 + self.lap_r * self.d1)
    }

    /// `dΦ/dr`.
    pub fn dphi(&self) -> f64 {
        0.25 * self.d1 * self.d2
            - 0.25 * (self.d3 + self.dlap_r * self.d1 + self.lap_r * self.d2)
    }

    /// `Δ log J = (log J)″ + Δr (log J)′`.
    pub fn lap_log_j(&self) -> f64 {
        self.d2 + self.lap_r * self.d1
    }
}

fn poly(z2: f64, coeffs: &[f64]) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z2 + c)
}

/// Hyperbolic special functions of `z = c r`, each finite at `z = 0`.
#[derive(Debug, Clone, Copy)]
struct HypFunctions {
    /// `sinh z / z − 1`
    sm1: f64,
    /// `(coth z − 1/z) / z`
    coth_m_over_z: f64,
    /// `1/z² − csch² z`
    q2: f64,
    /// `d/dz (1/z² − csch² z)`
    q2p: f64,
    /// `(z cosh z − sinh z) / z³`
    sp_over_z: f64,
    /// `(sinh² z / z² − 1) / z²`
    q: f64,
    /// `q′(z) / z`
    qp_over_z: f64,
}

impl HypFunctions {
    fn at(z: f64) -> Self {
        let z2 = z * z;
        if z < SERIES_CUTOFF {
            HypFunctions {
                sm1: z2
                    * poly(
                        z2,
                        &[
                            1.0 / 6.0,
                            1.0 / 120.0,
                            1.0 / 5040.0,
                            1.0 / 362_880.0,
                            1.0 / 39_916_800.0,
                        ],
                    ),
                coth_m_over_z: poly(
                    z2,
                    &[
                        1.0 / 3.0,
                        -1.0 / 45.0,
                        2.0 / 945.0,
                        -1.0 / 4725.0,
                        2.0 / 93_555.0,
                    ],
                ),
                q2: poly(
                    z2,
                    &[
                        1.0 / 3.0,
                        -1.0 / 15.0,
                        2.0 / 189.0,
                        -1.0 / 675.0,
                        2.0 / 10_395.0,
                    ],
                ),
                q2p: z * poly(
                    z2,
                    &[-2.0 / 15.0, 8.0 / 189.0, -6.0 / 675.0, 16.0 / 10_395.0],
                ),
                sp_over_z: poly(
                    z2,
                    &[
                        1.0 / 3.0,
                        1.0 / 30.0,
                        1.0 / 840.0,
                        1.0 / 45_360.0,
                        1.0 / 3_991_680.0,
                    ],
                ),
                q: poly(
                    z2,
                    &[
                        1.0 / 3.0,
                        2.0 / 45.0,
                        1.0 / 315.0,
                        2.0 / 14_175.0,
                        2.0 / 467_775.0,
                    ],
                ),
                qp_over_z: poly(
                    z2,
                    &[4.0 / 45.0, 4.0 / 315.0, 4.0 / 4725.0, 16.0 / 467_775.0],
                ),
            }
        } else {
            let e = z.exp();
            let ei = 1.0 / e;
            let sh = 0.5 * (e - ei);
            let ch = 0.5 * (e + ei);
            let s = sh / z;
            let csch2 = 1.0 / (sh * sh);
            let sp = (z * ch - sh) / z2;
            let q = (s * s - 1.0) / z2;
            HypFunctions {
                sm1: s - 1.0,
                coth_m_over_z: (ch / sh - 1.0 / z) / z,
                q2: 1.0 / z2 - csch2,
                q2p: 2.0 * ch * csch2 / sh - 2.0 / (z2 * z),
                sp_over_z: sp / z,
                q,
                qp_over_z: (2.0 * s * sp / z2 - 2.0 * q / z) / z,
            }
        }
    }
}

impl GeometryKind {
    /// Metric pieces only; the hot path of the frame integrator.
    pub fn metric_terms(&self, r: f64) -> MetricTerms {
        match *self {
            GeometryKind::Euclidean | GeometryKind::Warped(WarpedProfile::Flat) => {
                MetricTerms::IDENTITY
            }
            GeometryKind::Hyperbolic { c } => hyperbolic_metric(c, &HypFunctions::at(c * r)),
            GeometryKind::Warped(WarpedProfile::Cubic { kappa }) => {
                let sm1 = kappa * r * r / 6.0;
                let s = 1.0 + sm1;
                MetricTerms {
                    alpha: s * s,
                    alpha_m1: sm1 * (s + 1.0),
                    dalpha_over_r: 2.0 * s * kappa / 3.0,
                    beta: -(kappa / 6.0) * (s + 1.0),
                    dbeta_over_r: -kappa * kappa / 18.0,
                }
            }
            GeometryKind::Warped(profile) => {
                if r < POLE_EPS {
                    return MetricTerms::IDENTITY;
                }
                let [f, f1, _, _] = profile.derivatives(r);
                let s = f / r;
                let alpha_m1 = s * s - 1.0;
                let dalpha_over_r = 2.0 * s * (f1 - s) / (r * r);
                MetricTerms {
                    alpha: s * s,
                    alpha_m1,
                    dalpha_over_r,
                    beta: -alpha_m1 / (r * r),
                    dbeta_over_r: -dalpha_over_r / (r * r) + 2.0 * alpha_m1 / r.powi(4),
                }
            }
        }
    }

    /// Metric pieces together with `(log J)′/r`, sharing one evaluation of
    /// the special functions.
    pub fn point_terms(&self, dim: usize, r: f64) -> (MetricTerms, f64) {
        match *self {
            GeometryKind::Euclidean | GeometryKind::Warped(WarpedProfile::Flat) => {
                (MetricTerms::IDENTITY, 0.0)
            }
            GeometryKind::Hyperbolic { c } => {
                let h = HypFunctions::at(c * r);
                let m = (dim - 1) as f64;
                (hyperbolic_metric(c, &h), m * c * c * h.coth_m_over_z)
            }
            GeometryKind::Warped(_) => (self.metric_terms(r), self.d1_over_r(dim, r)),
        }
    }

    /// `d(log J)/dr / r`, the only Jacobian quantity the bridge drift needs.
    pub fn d1_over_r(&self, dim: usize, r: f64) -> f64 {
        let m = (dim - 1) as f64;
        match *self {
            GeometryKind::Euclidean | GeometryKind::Warped(WarpedProfile::Flat) => 0.0,
            GeometryKind::Hyperbolic { c } => m * c * c * HypFunctions::at(c * r).coth_m_over_z,
            GeometryKind::Warped(_) => self.radial_terms(dim, r).d1_over_r,
        }
    }

    /// Full set of radial scalars. Singular quantities (`f′/f`, `Δr`) are
    /// infinite at the pole; callers exclude it.
    pub fn radial_terms(&self, dim: usize, r: f64) -> RadialTerms {
        let m = (dim - 1) as f64;
        match *self {
            GeometryKind::Euclidean | GeometryKind::Warped(WarpedProfile::Flat) => RadialTerms {
                r,
                metric: MetricTerms::IDENTITY,
                hess_tan: 1.0 / r,
                lap_r: m / r,
                dlap_r: -m / (r * r),
                log_j: 0.0,
                d1: 0.0,
                d1_over_r: 0.0,
                d2: 0.0,
                d3: 0.0,
                ric_rad: 0.0,
                ric_tan: 0.0,
            },
            GeometryKind::Hyperbolic { c } => {
                let z = c * r;
                let h = HypFunctions::at(z);
                let hess_tan = c * (z * h.coth_m_over_z) + 1.0 / r;
                RadialTerms {
                    r,
                    metric: hyperbolic_metric(c, &h),
                    hess_tan,
                    lap_r: m * hess_tan,
                    dlap_r: m * (c * c * h.q2 - 1.0 / (r * r)),
                    log_j: m * h.sm1.ln_1p(),
                    d1: m * c * z * h.coth_m_over_z,
                    d1_over_r: m * c * c * h.coth_m_over_z,
                    d2: m * c * c * h.q2,
                    d3: m * c * c * c * h.q2p,
                    ric_rad: -m * c * c,
                    ric_tan: -m * c * c,
                }
            }
            GeometryKind::Warped(profile) => {
                let [f, f1, f2, f3] = profile.derivatives(r);
                let a = f1 / f;
                let b = f2 / f;
                let d1 = m * (a - 1.0 / r);
                RadialTerms {
                    r,
                    metric: self.metric_terms(r),
                    hess_tan: a,
                    lap_r: m * a,
                    dlap_r: m * (b - a * a),
                    log_j: m * (f / r).ln(),
                    d1,
                    d1_over_r: if r < POLE_EPS { 0.0 } else { d1 / r },
                    d2: m * (b - a * a + 1.0 / (r * r)),
                    d3: m * (f3 / f - 3.0 * a * b + 2.0 * a * a * a - 2.0 / (r * r * r)),
                    ric_rad: -m * b,
                    ric_tan: -b - (m - 1.0) * (f1 * f1 - 1.0) / (f * f),
                }
            }
        }
    }
}

fn hyperbolic_metric(c: f64, h: &HypFunctions) -> MetricTerms {
    let s = 1.0 + h.sm1;
    MetricTerms {
        alpha: s * s,
        alpha_m1: h.sm1 * (s + 1.0),
        dalpha_over_r: 2.0 * s * c * c * h.sp_over_z,
        beta: -c * c * h.q,
        dbeta_over_r: -c.powi(4) * h.qp_over_z,
    }
}

/// Closed form of `Φ` on hyperbolic space of curvature `−c²`, used as an
/// independent check of the generic expansion.
pub fn hyperbolic_phi_closed_form(dim: usize, c: f64, r: f64) -> f64 {
    let m = (dim - 1) as f64;
    let z = c * r;
    let sh = z.sinh();
    -0.125 * m * m * c * c + 0.125 * m * (m - 2.0) * (1.0 / (r * r) - c * c / (sh * sh))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn series_and_direct_branches_meet() {
        let below = HypFunctions::at(SERIES_CUTOFF * (1.0 - 1e-12));
        let above = HypFunctions::at(SERIES_CUTOFF * (1.0 + 1e-12));
        let pairs = [
            (below.sm1, above.sm1),
            (below.coth_m_over_z, above.coth_m_over_z),
            (below.q2, above.q2),
            (below.q2p, above.q2p),
            (below.sp_over_z, above.sp_over_z),
            (below.q, above.q),
            (below.qp_over_z, above.qp_over_z),
        ];
        for (i, (a, b)) in pairs.iter().enumerate() {
            assert_relative_eq!(a, b, max_relative = 1e-9, epsilon = 1e-14);
            let _ = i;
        }
    }

    #[test]
    fn hyperbolic_matches_generic_sinh_profile() {
        for &c in &[0.5, 1.0, 2.0] {
            let hyp = GeometryKind::Hyperbolic { c };
            let gen = GeometryKind::Warped(WarpedProfile::Sinh { c });
            for &r in &[0.1, 0.3, 1.0, 2.5, 5.0] {
                let a = hyp.radial_terms(3, r);
                let b = gen.radial_terms(3, r);
                for (x, y) in [
                    (a.metric.alpha, b.metric.alpha),
                    (a.metric.dalpha_over_r, b.metric.dalpha_over_r),
                    (a.metric.beta, b.metric.beta),
                    (a.hess_tan, b.hess_tan),
                    (a.dlap_r, b.dlap_r),
                    (a.log_j, b.log_j),
                    (a.d1, b.d1),
                    (a.d2, b.d2),
                    (a.d3, b.d3),
                    (a.ric_rad, b.ric_rad),
                    (a.ric_tan, b.ric_tan),
                ] {
                    assert_relative_eq!(x, y, max_relative = 1e-6, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn hyperbolic_phi_three_dims_is_constant() {
        let g = GeometryKind::Hyperbolic { c: 1.0 };
        for &r in &[0.01, 0.2, 1.0, 3.0] {
            assert_relative_eq!(g.radial_terms(3, r).phi(), -0.5, epsilon = 1e-10);
            assert!(g.radial_terms(3, r).dphi().abs() < 1e-9);
        }
    }

    #[test]
    fn cubic_metric_terms_match_generic_quotients() {
        let kappa = 0.7;
        let p = WarpedProfile::Cubic { kappa };
        let exact = GeometryKind::Warped(p).metric_terms(0.8);
        let [f, f1, _, _] = p.derivatives(0.8);
        let s: f64 = f / 0.8;
        assert_relative_eq!(exact.alpha, s * s, max_relative = 1e-14);
        assert_relative_eq!(
            exact.dalpha_over_r,
            2.0 * s * (f1 - s) / 0.64,
            max_relative = 1e-12
        );
    }
}
