//! Finite-difference oracles built only from point evaluations of the metric
//! and of scalar functions, independent of the closed-form curvature code.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, Christoffel, GeometryModel};

/// Step of the inner (gradient) differences.
pub const INNER_STEP: f64 = 3e-5;
/// Step of the outer (divergence) differences.
pub const OUTER_STEP: f64 = 3e-4;

fn shifted(x: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += h;
    y
}

/// Central-difference partial derivatives of `f` at `x`.
pub fn fd_covector(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| (f(&shifted(x, i, h)) - f(&shifted(x, i, -h))) / (2.0 * h))
        .collect()
}

fn metric_and_inverse(geom: &GeometryModel, x: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let g = geom.metric_at(&ChartPoint::from(x))?;
    let inv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular metric".into()))?;
    Ok((g, inv))
}

/// `|∇f|²_g` from differences of `f` and the metric at `x`.
pub fn fd_grad_norm2(geom: &GeometryModel, f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Result<f64> {
    let c = DVector::from_vec(fd_covector(f, x, INNER_STEP));
    let (_, inv) = metric_and_inverse(geom, x)?;
    Ok(c.dot(&(&inv * &c)))
}

/// Laplace–Beltrami operator in divergence form,
/// `Δf = |g|^{-1/2} ∂_i (|g|^{1/2} g^{ij} ∂_j f)`.
pub fn fd_laplacian(geom: &GeometryModel, f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Result<f64> {
    let flux = |y: &[f64], i: usize| -> Result<f64> {
        let (g, inv) = metric_and_inverse(geom, y)?;
        let c = DVector::from_vec(fd_covector(f, y, INNER_STEP));
        Ok(g.determinant().sqrt() * (inv.row(i) * c)[(0, 0)])
    };
    let (g, _) = metric_and_inverse(geom, x)?;
    let mut div = 0.0;
    for i in 0..x.len() {
        let p = flux(&shifted(x, i, OUTER_STEP), i)?;
        let m = flux(&shifted(x, i, -OUTER_STEP), i)?;
        div += (p - m) / (2.0 * OUTER_STEP);
    }
    Ok(div / g.determinant().sqrt())
}

/// Christoffel symbols from central differences of the metric.
pub fn fd_christoffel(geom: &GeometryModel, x: &[f64]) -> Result<Christoffel> {
    let n = x.len();
    let h = 1e-5;
    let dg = (0..n)
        .map(|k| {
            let p = geom.metric_at(&ChartPoint::from(shifted(x, k, h).as_slice()))?;
            let m = geom.metric_at(&ChartPoint::from(shifted(x, k, -h).as_slice()))?;
            Ok((p - m) / (2.0 * h))
        })
        .collect::<Result<Vec<_>>>()?;
    let (_, inv) = metric_and_inverse(geom, x)?;
    let mut out = Christoffel::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n)
                    .map(|l| 0.5 * inv[(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]))
                    .sum();
                out.set(k, i, j, v);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn flat_laplacian_of_quadratic() {
        let g = GeometryModel::euclidean(3).unwrap();
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        assert_relative_eq!(fd_laplacian(&g, &f, &[0.3, 0.2, -1.0]).unwrap(), 6.0, epsilon = 1e-6);
    }

    #[test]
    fn hyperbolic_laplacian_of_radius() {
        let g = GeometryModel::hyperbolic(3, 1.0).unwrap();
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let lap = fd_laplacian(&g, &f, &[0.6, -0.8, 0.0]).unwrap();
        assert_relative_eq!(lap, 2.0 / 1f64.tanh(), max_relative = 1e-6);
    }

    #[test]
    fn christoffel_oracle_matches_closed_form() {
        let g = GeometryModel::hyperbolic(2, 1.0).unwrap();
        let x = [0.9, -0.4];
        let a = fd_christoffel(&g, &x).unwrap();
        let b = g.christoffel_at(&ChartPoint::from(&x[..])).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_relative_eq!(a.get(k, i, j), b.get(k, i, j), epsilon = 1e-8);
                }
            }
        }
    }
}
