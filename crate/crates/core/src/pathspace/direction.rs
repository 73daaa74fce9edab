use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Zero,
    /// `√2 sin(kπs)/(kπ)`, unit `H¹` norm, vanishing at both ends.
    Sine { k: u32 },
    /// `s`, unit norm but `h(1) ≠ 0`; not a pinned direction.
    Ramp,
}

/// A Cameron–Martin direction `h(s) = φ(s) e_axis` in `ℝⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmDirection {
    dim: usize,
    axis: usize,
    profile: Profile,
}

/// Unit sine direction along axis `j` (1-based) in dimension `dim`.
pub fn cm_basis(dim: usize, k: u32, j: usize) -> Result<CmDirection> {
    CmDirection::new(dim, j, Profile::Sine { k })
}

impl CmDirection {
    /// `axis` is 1-based.
    pub fn new(dim: usize, axis: usize, profile: Profile) -> Result<Self> {
        if !(1..=dim).contains(&axis) {
            return Err(Error::InvalidInput(format!(
                "axis {axis} outside 1..={dim}"
            )));
        }
        if let Profile::Sine { k: 0 } = profile {
            return Err(Error::InvalidInput("sine frequency must be ≥ 1".into()));
        }
        Ok(CmDirection {
            dim,
            axis: axis - 1,
            profile,
        })
    }

    pub fn zero(dim: usize) -> Self {
        CmDirection {
            dim,
            axis: 0,
            profile: Profile::Zero,
        }
    }

    pub fn ramp(dim: usize, axis: usize) -> Result<Self> {
        Self::new(dim, axis, Profile::Ramp)
    }

    /// Parses `sine(k,axis)`, `ramp(axis)` or `zero`.
    pub fn parse(key: &str, dim: usize) -> Result<Self> {
        let key = key.trim();
        let bad = || {
            Error::InvalidInput(format!(
                "unknown direction '{key}'; available: {}",
                Self::REGISTRY.join(", ")
            ))
        };
        if key == "zero" {
            return Ok(Self::zero(dim));
        }
        let (name, args) = super::functional::split_call(key).ok_or_else(bad)?;
        let ints: Vec<usize> = args
            .iter()
            .map(|a| a.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        match (name, ints.as_slice()) {
            ("sine", &[k, axis]) => {
                let k = u32::try_from(k).map_err(|_| bad())?;
                Self::new(dim, axis, Profile::Sine { k })
            }
            ("ramp", &[axis]) => Self::ramp(dim, axis),
            _ => Err(bad()),
        }
    }

    pub const REGISTRY: [&'static str; 3] = ["sine(k,axis)", "ramp(axis)", "zero"];

    pub fn key(&self) -> String {
        match self.profile {
            Profile::Zero => "zero".into(),
            Profile::Sine { k } => format!("sine({k},{})", self.axis + 1),
            Profile::Ramp => format!("ramp({})", self.axis + 1),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 0-based axis.
    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn is_zero(&self) -> bool {
        self.profile == Profile::Zero
    }

    /// Whether `h(1) = 0`.
    pub fn is_pinned(&self) -> bool {
        !matches!(self.profile, Profile::Ramp)
    }

    #[inline]
    pub fn scalar(&self, s: f64) -> f64 {
        match self.profile {
            Profile::Zero => 0.0,
            Profile::Sine { k } => {
                let w = k as f64 * PI;
                SQRT_2 * (w * s).sin() / w
            }
            Profile::Ramp => s,
        }
    }

    #[inline]
    pub fn scalar_deriv(&self, s: f64) -> f64 {
        match self.profile {
            Profile::Zero => 0.0,
            Profile::Sine { k } => SQRT_2 * (k as f64 * PI * s).cos(),
            Profile::Ramp => 1.0,
        }
    }

    #[inline]
    pub fn eval_into(&self, s: f64, out: &mut [f64]) {
        out.fill(0.0);
        out[self.axis] = self.scalar(s);
    }

    #[inline]
    pub fn deriv_into(&self, s: f64, out: &mut [f64]) {
        out.fill(0.0);
        out[self.axis] = self.scalar_deriv(s);
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        self.eval_into(s, &mut v);
        v
    }

    pub fn deriv(&self, s: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        self.deriv_into(s, &mut v);
        v
    }

    /// `|h|_{H¹} = (∫₀¹ |ḣ|² ds)^{1/2}`.
    pub fn h_norm(&self) -> f64 {
        match self.profile {
            Profile::Zero => 0.0,
            Profile::Sine { .. } | Profile::Ramp => 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn simpson_energy(h: &CmDirection, m: usize) -> f64 {
        let step = 1.0 / m as f64;
        let f = |s: f64| h.scalar_deriv(s).powi(2);
        let mut acc = f(0.0) + f(1.0);
        for i in 1..m {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * step);
        }
        acc * step / 3.0
    }

    #[test]
    fn sine_basis_values() {
        let h = cm_basis(3, 1, 1).unwrap();
        let v = h.eval(0.5);
        assert_relative_eq!(v[0], 0.450_158, epsilon = 1e-6);
        assert_eq!((v[1], v[2]), (0.0, 0.0));
        let h2 = cm_basis(3, 2, 1).unwrap();
        assert!(h2.eval(0.5)[0].abs() < 1e-16);
        for k in 1..5 {
            for j in 1..=3 {
                let h = cm_basis(3, k, j).unwrap();
                assert_eq!(h.scalar(0.0), 0.0);
                assert!(h.scalar(1.0).abs() < 1e-15);
                assert_relative_eq!(simpson_energy(&h, 2000), h.h_norm().powi(2), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn ramp_is_not_pinned() {
        let h = CmDirection::ramp(2, 2).unwrap();
        assert!(!h.is_pinned());
        assert_eq!(h.eval(1.0), vec![0.0, 1.0]);
        assert_relative_eq!(simpson_energy(&h, 100), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_indices() {
        assert!(cm_basis(2, 1, 0).is_err());
        assert!(cm_basis(2, 1, 3).is_err());
        assert!(cm_basis(2, 0, 1).is_err());
    }

    #[test]
    fn parse_registry() {
        assert_eq!(CmDirection::parse("sine(2, 3)", 3).unwrap(), cm_basis(3, 2, 3).unwrap());
        assert_eq!(CmDirection::parse("ramp(1)", 2).unwrap().key(), "ramp(1)");
        assert!(CmDirection::parse("zero", 2).unwrap().is_zero());
        let err = CmDirection::parse("cosine(1,1)", 2).unwrap_err().to_string();
        assert!(err.contains("sine(k,axis)"), "{err}");
    }
}
