//! Horizontal frame-bundle dynamics in the chart.
//!
//! A frame `u` is an `n × n` matrix whose columns are the frame vectors in
//! chart components, stored column-major. The horizontal SDE reads
//!
//! ```text
//! dxᵏ   = (u ∘ dB)ᵏ + Aᵏ dt
//! duᵏ_a = −Γᵏ_ij(x) (∘dxⁱ) uʲ_a
//! ```
//!
//! with Stratonovich noise and the drift `A` frozen at the left endpoint.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, GeometryModel, Local};

/// A point together with a frame at that point.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameState {
    pub point: ChartPoint,
    pub frame: DMatrix<f64>,
}

impl FrameState {
    /// `g`-orthonormalised coordinate frame at `x`.
    pub fn initial(geom: &GeometryModel, x: ChartPoint) -> Result<Self> {
        let n = geom.dim();
        reorthonormalize(
            geom,
            &FrameState {
                point: x,
                frame: DMatrix::identity(n, n),
            },
        )
    }
}

/// Predictor-corrector scratch space, reused across steps of a path.
#[derive(Debug, Clone)]
pub struct Stepper {
    n: usize,
    ud: Vec<f64>,
    ud_star: Vec<f64>,
    x_star: Vec<f64>,
    u_star: Vec<f64>,
    g0: Vec<f64>,
    ga: Vec<f64>,
    tmp: Vec<f64>,
}

impl Stepper {
    pub fn new(n: usize) -> Self {
        Stepper {
            n,
            ud: vec![0.0; n],
            ud_star: vec![0.0; n],
            x_star: vec![0.0; n],
            u_star: vec![0.0; n * n],
            g0: vec![0.0; n * n],
            ga: vec![0.0; n * n],
            tmp: vec![0.0; n],
        }
    }

    /// One Stratonovich–Heun step from the point of `loc`; the output frame
    /// is not re-orthonormalised.
    #[allow(clippy::too_many_arguments)]
    pub fn heun(
        &mut self,
        geom: &GeometryModel,
        loc: &Local,
        u: &[f64],
        db: &[f64],
        dt: f64,
        drift: Option<&[f64]>,
        x_out: &mut [f64],
        u_out: &mut [f64],
    ) {
        let n = self.n;
        let x = loc.x;
        frame_apply(u, db, &mut self.ud);
        for k in 0..n {
            x_out[k] = x[k] + drift.map_or(0.0, |a| a[k] * dt);
        }

        if geom.is_flat() {
            for (o, d) in x_out.iter_mut().zip(&self.ud) {
                *o += d;
            }
            u_out.copy_from_slice(u);
            return;
        }

        for a in 0..n {
            let ua = &u[a * n..(a + 1) * n];
            loc.connection_into(&self.ud, ua, &mut self.g0[a * n..(a + 1) * n]);
            match drift {
                Some(dr) => loc.connection_into(dr, ua, &mut self.ga[a * n..(a + 1) * n]),
                None => self.ga[a * n..(a + 1) * n].fill(0.0),
            }
        }
        for k in 0..n {
            self.x_star[k] = x_out[k] + self.ud[k];
        }
        for i in 0..n * n {
            self.u_star[i] = u[i] - self.g0[i] - self.ga[i] * dt;
        }

        frame_apply(&self.u_star, db, &mut self.ud_star);
        let loc_star = geom.local(&self.x_star);
        for k in 0..n {
            x_out[k] += 0.5 * (self.ud[k] + self.ud_star[k]);
        }
        for a in 0..n {
            loc_star.connection_into(
                &self.ud_star,
                &self.u_star[a * n..(a + 1) * n],
                &mut self.tmp,
            );
            for k in 0..n {
                let i = a * n + k;
                u_out[i] = u[i] - 0.5 * (self.g0[i] + self.tmp[k]) - self.ga[i] * dt;
            }
        }
    }
}

/// `u · v` for a column-major frame.
#[inline]
pub fn frame_apply(u: &[f64], v: &[f64], out: &mut [f64]) {
    let n = out.len();
    out.fill(0.0);
    for (a, &va) in v.iter().enumerate() {
        let col = &u[a * n..(a + 1) * n];
        for (o, c) in out.iter_mut().zip(col) {
            *o += va * c;
        }
    }
}

/// `u⁻¹ w = uᵀ G w` for a `g`-orthonormal frame at the point of `loc`.
#[inline]
pub fn frame_inverse_apply(loc: &Local, u: &[f64], w: &[f64], out: &mut [f64]) {
    let n = out.len();
    for (a, o) in out.iter_mut().enumerate() {
        *o = loc.inner(&u[a * n..(a + 1) * n], w);
    }
}

/// Modified Gram–Schmidt in the `g`-inner product at the point of `loc`,
/// in place.
pub fn gram_schmidt_in_place(loc: &Local, u: &mut [f64]) -> Result<()> {
    let n = loc.x.len();
    for a in 0..n {
        for b in 0..a {
            let (done, rest) = u.split_at_mut(a * n);
            let eb = &done[b * n..(b + 1) * n];
            let va = &mut rest[..n];
            let p = loc.inner(va, eb);
            for (v, e) in va.iter_mut().zip(eb) {
                *v -= p * e;
            }
        }
        let va = &mut u[a * n..(a + 1) * n];
        let nrm = loc.inner(va, va).sqrt();
        if !(nrm.is_finite() && nrm > 1e-300) {
            return Err(Error::Numerical(format!(
                "singular frame: column {a} has g-norm {nrm:e}"
            )));
        }
        va.iter_mut().for_each(|v| *v /= nrm);
    }
    Ok(())
}

/// `max |uᵀ G u − I|` over entries.
pub fn defect_raw(geom: &GeometryModel, x: &[f64], u: &[f64]) -> f64 {
    let n = x.len();
    let loc = geom.local(x);
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let ip = loc.inner(&u[a * n..(a + 1) * n], &u[b * n..(b + 1) * n]);
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((ip - target).abs());
        }
    }
    worst
}

pub fn orthonormality_defect(geom: &GeometryModel, state: &FrameState) -> f64 {
    defect_raw(geom, state.point.as_slice(), state.frame.as_slice())
}

pub fn reorthonormalize(geom: &GeometryModel, state: &FrameState) -> Result<FrameState> {
    let n = geom.dim();
    if state.point.dim() != n || state.frame.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: state.point.dim(),
        });
    }
    let mut frame = state.frame.clone();
    gram_schmidt_in_place(&geom.local(state.point.as_slice()), frame.as_mut_slice())?;
    Ok(FrameState {
        point: state.point.clone(),
        frame,
    })
}

/// One Heun step of the horizontal SDE. The returned frame is the raw
/// predictor-corrector output; pair with [`reorthonormalize`].
pub fn horizontal_heun_step(
    geom: &GeometryModel,
    state: &FrameState,
    db: &[f64],
    dt: f64,
    drift: Option<&[f64]>,
) -> Result<FrameState> {
    let n = geom.dim();
    if db.len() != n || drift.is_some_and(|d| d.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: db.len(),
        });
    }
    let mut stepper = Stepper::new(n);
    let mut x = vec![0.0; n];
    let mut u = vec![0.0; n * n];
    stepper.heun(
        geom,
        &geom.local(state.point.as_slice()),
        state.frame.as_slice(),
        db,
        dt,
        drift,
        &mut x,
        &mut u,
    );
    if x.iter().chain(&u).any(|v| !v.is_finite()) {
        return Err(Error::Simulation {
            step: 0,
            reason: "non-finite state".into(),
        });
    }
    Ok(FrameState {
        point: ChartPoint::new(x),
        frame: DMatrix::from_vec(n, n, u),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn flat_zero_noise_leaves_state_unchanged() {
        let g = GeometryModel::euclidean(2).unwrap();
        let s = FrameState::initial(&g, ChartPoint::new(vec![0.3, -0.2])).unwrap();
        let out = horizontal_heun_step(&g, &s, &[0.0, 0.0], 0.01, None).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn flat_step_translates_point() {
        let g = GeometryModel::euclidean(3).unwrap();
        let s = FrameState::initial(&g, ChartPoint::new(vec![1.0, 0.0, 0.0])).unwrap();
        let out = horizontal_heun_step(&g, &s, &[0.1, -0.2, 0.3], 0.01, None).unwrap();
        assert_relative_eq!(out.point.0[0], 1.1, epsilon = 1e-15);
        assert_relative_eq!(out.point.0[1], -0.2, epsilon = 1e-15);
        assert_relative_eq!(out.point.0[2], 0.3, epsilon = 1e-15);
        assert_eq!(out.frame, DMatrix::identity(3, 3));
    }

    #[test]
    fn reorthonormalize_normalizes_and_is_idempotent() {
        let g = GeometryModel::euclidean(2).unwrap();
        let s = FrameState {
            point: ChartPoint::new(vec![0.5, 0.5]),
            frame: DMatrix::identity(2, 2) * 2.0,
        };
        let once = reorthonormalize(&g, &s).unwrap();
        assert_eq!(once.frame, DMatrix::identity(2, 2));
        let h = GeometryModel::hyperbolic(3, 1.0).unwrap();
        let s = FrameState::initial(&h, ChartPoint::new(vec![0.4, 1.0, -0.3])).unwrap();
        let again = reorthonormalize(&h, &s).unwrap();
        assert!((&again.frame - &s.frame).abs().max() < 1e-12);
    }

    #[test]
    fn singular_frame_is_an_error() {
        let g = GeometryModel::euclidean(2).unwrap();
        let s = FrameState {
            point: ChartPoint::new(vec![0.5, 0.5]),
            frame: DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]),
        };
        assert!(matches!(reorthonormalize(&g, &s), Err(Error::Numerical(_))));
    }

    #[test]
    fn defect_before_reorthonormalization_is_higher_order() {
        // defect after one noisy step with dB ~ √dt scales like dt^{3/2} or better
        let h = GeometryModel::hyperbolic(2, 1.0).unwrap();
        let s = FrameState::initial(&h, ChartPoint::new(vec![0.8, 0.3])).unwrap();
        let defect = |dt: f64| {
            let db = [0.7 * dt.sqrt(), -1.1 * dt.sqrt()];
            let out = horizontal_heun_step(&h, &s, &db, dt, None).unwrap();
            orthonormality_defect(&h, &out)
        };
        let d1 = defect(1e-2);
        let d2 = defect(1e-4);
        // two decades in dt → at least three decades in defect
        assert!(d2 < d1 * 1.5e-3, "{d1:e} {d2:e}");
    }

    proptest! {
        #[test]
        fn perturbed_frames_become_orthonormal(
            x in prop::collection::vec(-2.0f64..2.0, 3),
            p in prop::collection::vec(-0.05f64..0.05, 9),
        ) {
            let h = GeometryModel::hyperbolic(3, 1.0).unwrap();
            let s = FrameState::initial(&h, ChartPoint::new(x)).unwrap();
            let perturbed = FrameState {
                point: s.point.clone(),
                frame: &s.frame + DMatrix::from_vec(3, 3, p),
            };
            let fixed = reorthonormalize(&h, &perturbed).unwrap();
            prop_assert!(orthonormality_defect(&h, &fixed) < 1e-12);
        }
    }
}
