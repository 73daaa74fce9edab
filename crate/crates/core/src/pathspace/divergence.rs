use super::direction::CmDirection;
use crate::error::{Error, Result};
use crate::geometry::{dot, grad_log_k_into, norm, GeometryModel};
use crate::sde::{frame_apply, frame_inverse_apply, FramePathSample, PathKind};

/// Pieces of the divergence weight of a direction `h` along one bridge path.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DivergenceBreakdown {
    /// `Σ ⟨ḣ + ½ ric_u h, ΔB̃⟩`, or the same against `ΔB` for the
    /// raw-noise representation.
    pub martingale_term: f64,
    /// `Σ dΦ(u h) Δt`.
    pub phi_term: f64,
    /// `−Σ ∇d log k_{1−t}(u ΔB, u h)`; raw-noise representation only.
    pub hessian_term: f64,
    pub total: f64,
}

/// Both representations from one pass over a path.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DivergencePair {
    pub direct: DivergenceBreakdown,
    pub lemma1: DivergenceBreakdown,
}

fn check(path: &FramePathSample, h: &CmDirection) -> Result<()> {
    if path.kind() != PathKind::Bridge {
        return Err(Error::InvalidInput(
            "divergence weights need a bridge path (drift-corrected noise)".into(),
        ));
    }
    if h.dim() != path.dim() {
        return Err(Error::DimensionMismatch {
            expected: path.dim(),
            got: h.dim(),
        });
    }
    Ok(())
}

/// Left-endpoint sums for both representations of the weight:
///
/// ```text
/// direct:  Σ ⟨ḣ + ½ ric_u h, ΔB̃⟩ + Σ dΦ(u h) Δt
/// lemma1:  Σ ⟨ḣ + ½ ric_u h, ΔB⟩ − Σ ∇d log k_{1−t}(u ΔB, u h)
/// ```
pub fn divergence_pair(
    geom: &GeometryModel,
    path: &FramePathSample,
    h: &CmDirection,
) -> Result<DivergencePair> {
    check(path, h)?;
    if h.is_zero() {
        return Ok(DivergencePair::default());
    }
    let n = path.dim();
    let grid = path.grid();
    let flat = geom.is_flat();
    let mut hv = vec![0.0; n];
    let mut hd = vec![0.0; n];
    let mut uh = vec![0.0; n];
    let mut ric = vec![0.0; n];
    let mut ric_u = vec![0.0; n];
    let mut udb = vec![0.0; n];

    let (mut mart_tilde, mut mart_raw, mut phi, mut hess) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..grid.steps() {
        let t = grid.t(k);
        let dt = grid.dt(k);
        let tau = 1.0 - t;
        let x = path.point(k);
        let u = path.frame(k);
        h.eval_into(t, &mut hv);
        h.deriv_into(t, &mut hd);
        frame_apply(u, &hv, &mut uh);
        frame_apply(u, path.db(k), &mut udb);

        if flat {
            hess += dot(&udb, &uh) / tau;
            mart_tilde += dot(&hd, path.db_tilde(k));
            mart_raw += dot(&hd, path.db(k));
            continue;
        }
        let r = norm(x);
        let terms = geom.radial_terms_regular(r);
        let loc = geom.local_with(x, r, (terms.metric, terms.d1_over_r));
        loc.ricci_apply_into(&terms, &uh, &mut ric);
        frame_inverse_apply(&loc, u, &ric, &mut ric_u);
        for a in 0..n {
            let w = hd[a] + 0.5 * ric_u[a];
            mart_tilde += w * path.db_tilde(k)[a];
            mart_raw += w * path.db(k)[a];
        }
        phi += loc.dphi(&terms, &uh) * dt;
        hess -= loc.hess_log_k_form(&terms, tau, &udb, &uh);
    }
    Ok(DivergencePair {
        direct: DivergenceBreakdown {
            martingale_term: mart_tilde,
            phi_term: phi,
            hessian_term: 0.0,
            total: mart_tilde + phi,
        },
        lemma1: DivergenceBreakdown {
            martingale_term: mart_raw,
            phi_term: 0.0,
            hessian_term: hess,
            total: mart_raw + hess,
        },
    })
}

/// The divergence weight of `h`, computed against the drift-corrected noise.
pub fn divergence_direct(
    geom: &GeometryModel,
    path: &FramePathSample,
    h: &CmDirection,
) -> Result<DivergenceBreakdown> {
    Ok(divergence_pair(geom, path, h)?.direct)
}

/// The same weight rewritten against the raw driving noise: the drift
/// correction is traded for a stochastic integral of the Hessian of
/// `log k`, and the two `dΦ` integrals cancel.
pub fn divergence_lemma1(
    geom: &GeometryModel,
    path: &FramePathSample,
    h: &CmDirection,
) -> Result<DivergenceBreakdown> {
    Ok(divergence_pair(geom, path, h)?.lemma1)
}

/// `⟨∇ log k_{1−t}(x_t), u_t h(t)⟩_g` at grid node `k`.
pub fn endpoint_pairing(
    geom: &GeometryModel,
    path: &FramePathSample,
    h: &CmDirection,
    k: usize,
) -> f64 {
    let n = path.dim();
    let t = path.grid().t(k);
    let x = path.point(k);
    let mut grad = vec![0.0; n];
    let mut hv = vec![0.0; n];
    let mut uh = vec![0.0; n];
    grad_log_k_into(1.0 - t, geom.d1_over_r(norm(x)), x, &mut grad);
    h.eval_into(t, &mut hv);
    frame_apply(path.frame(k), &hv, &mut uh);
    geom.local(x).inner(&grad, &uh)
}
