use crate::error::{Error, Result};

/// How nodes are spread over `[0, 1 − ε_end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Refinement {
    Uniform,
    /// Uniform steps until the step reaches `(1 − ratio)` of the remaining
    /// time, then `1 − t_{k+1} = ratio · (1 − t_k)` down to `ε_end`.
    Geometric { ratio: f64 },
}

impl Refinement {
    /// Steps of about a tenth of the remaining time near the end.
    pub const DEFAULT: Refinement = Refinement::Geometric { ratio: 0.9 };
}

/// Strictly increasing bridge-time nodes `0 = t₀ < … < t_K = 1 − ε_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    eps_end: f64,
    refinement: Refinement,
    /// First interval index of the geometric zone (`nodes.len() − 1` if none).
    zone_start: usize,
}

pub fn make_time_grid(steps: usize, eps_end: f64, refinement: Refinement) -> Result<TimeGrid> {
    if steps < 2 {
        return Err(Error::InvalidInput(format!("steps must be ≥ 2, got {steps}")));
    }
    if !(eps_end > 0.0 && eps_end <= 0.5) {
        return Err(Error::InvalidInput(format!(
            "eps_end must lie in (0, 0.5], got {eps_end}"
        )));
    }
    let end = 1.0 - eps_end;
    match refinement {
        Refinement::Uniform => {
            let dt = end / steps as f64;
            let mut nodes: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
            nodes[steps] = end;
            Ok(TimeGrid {
                nodes,
                eps_end,
                refinement,
                zone_start: steps,
            })
        }
        Refinement::Geometric { ratio } => {
            if !(ratio > 0.0 && ratio < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "geometric ratio must lie in (0, 1), got {ratio}"
                )));
            }
            // Largest zone that still starts after t = 0.
            let max_geo = ((eps_end.ln() / ratio.ln()) * (1.0 - 1e-12)).floor() as usize;
            let max_geo = max_geo.min(steps - 1);
            let zone_tau = |kg: usize| eps_end / ratio.powi(kg as i32);
            // Pick the zone length whose first geometric step best matches the
            // uniform step in front of it.
            let mut best = (f64::INFINITY, 0usize);
            for kg in 0..=max_geo {
                let tau_z = zone_tau(kg);
                if tau_z >= 1.0 {
                    break;
                }
                let uniform_dt = (1.0 - tau_z) / (steps - kg) as f64;
                let geo_dt = tau_z * (1.0 - ratio);
                let mismatch = (uniform_dt.ln() - geo_dt.ln()).abs();
                if mismatch < best.0 {
                    best = (mismatch, kg);
                }
            }
            let kg = best.1;
            let ku = steps - kg;
            let tau_z = zone_tau(kg);
            let dt = (1.0 - tau_z) / ku as f64;
            let mut nodes = Vec::with_capacity(steps + 1);
            nodes.extend((0..ku).map(|k| k as f64 * dt));
            nodes.push(1.0 - tau_z);
            let mut tau = tau_z;
            for _ in 0..kg {
                tau *= ratio;
                nodes.push(1.0 - tau);
            }
            nodes[steps] = end;
            Ok(TimeGrid {
                nodes,
                eps_end,
                refinement,
                zone_start: ku,
            })
        }
    }
}

impl TimeGrid {
    /// A grid from explicit nodes; they must start at 0 and increase strictly.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.first() != Some(&0.0) {
            return Err(Error::InvalidInput("grid must start at t = 0".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("grid nodes must increase strictly".into()));
        }
        let last = *nodes.last().unwrap_or(&0.0);
        if last >= 1.0 {
            return Err(Error::InvalidInput("grid must end before t = 1".into()));
        }
        let zone_start = nodes.len() - 1;
        Ok(TimeGrid {
            nodes,
            eps_end: 1.0 - last,
            refinement: Refinement::Uniform,
            zone_start,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn eps_end(&self) -> f64 {
        self.eps_end
    }

    pub fn refinement(&self) -> Refinement {
        self.refinement
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    #[inline]
    pub fn t(&self, k: usize) -> f64 {
        self.nodes[k]
    }

    #[inline]
    pub fn dt(&self, k: usize) -> f64 {
        self.nodes[k + 1] - self.nodes[k]
    }

    /// Index of the node closest to `t`.
    pub fn nearest_node(&self, t: f64) -> usize {
        let i = self.nodes.partition_point(|&s| s < t);
        if i == 0 {
            0
        } else if i == self.nodes.len() {
            i - 1
        } else if (self.nodes[i] - t) < (t - self.nodes[i - 1]) {
            i
        } else {
            i - 1
        }
    }

    /// Node index for a functional time, which must not exceed the last node.
    pub fn node_for(&self, t: f64) -> Result<usize> {
        if !(t >= 0.0 && t <= self.last() + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "time {t} outside the grid range [0, {}]",
                self.last()
            )));
        }
        Ok(self.nearest_node(t))
    }

    /// Every interval split in two: arithmetically in the uniform part,
    /// geometrically in the remaining time inside the refinement zone.
    pub fn refine(&self) -> TimeGrid {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for k in 0..self.steps() {
            let (a, b) = (self.nodes[k], self.nodes[k + 1]);
            nodes.push(a);
            if k < self.zone_start {
                nodes.push(0.5 * (a + b));
            } else {
                nodes.push(1.0 - ((1.0 - a) * (1.0 - b)).sqrt());
            }
        }
        nodes.push(self.last());
        let refinement = match self.refinement {
            Refinement::Uniform => Refinement::Uniform,
            Refinement::Geometric { ratio } => Refinement::Geometric { ratio: ratio.sqrt() },
        };
        TimeGrid {
            nodes,
            eps_end: self.eps_end,
            refinement,
            zone_start: 2 * self.zone_start,
        }
    }

    /// The grid cut at node `k` (inclusive).
    pub fn truncate(&self, k: usize) -> TimeGrid {
        let nodes = self.nodes[..=k].to_vec();
        TimeGrid {
            eps_end: 1.0 - nodes[k],
            zone_start: self.zone_start.min(k),
            refinement: self.refinement,
            nodes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tiny_uniform_grid() {
        let g = make_time_grid(2, 0.5, Refinement::Uniform).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5]);
    }

    #[test]
    fn uniform_thousand_steps() {
        let g = make_time_grid(1000, 1e-4, Refinement::Uniform).unwrap();
        assert_eq!(g.nodes().len(), 1001);
        assert_relative_eq!(g.dt(0), 9.999e-4, max_relative = 1e-12);
        assert_relative_eq!(g.dt(999), 9.999e-4, max_relative = 1e-9);
        assert_eq!(g.last(), 1.0 - 1e-4);
    }

    #[test]
    fn geometric_zone_decays_by_ratio() {
        let g = make_time_grid(1000, 1e-4, Refinement::Geometric { ratio: 0.99 }).unwrap();
        assert_eq!(g.steps(), 1000);
        assert_eq!(g.last(), 1.0 - 1e-4);
        let n = g.nodes();
        assert!(n.windows(2).all(|w| w[1] > w[0]));
        let zone = g.zone_start;
        assert!(zone < 1000 && zone > 0);
        for k in zone..999 {
            assert_relative_eq!((1.0 - n[k + 1]) / (1.0 - n[k]), 0.99, max_relative = 1e-9);
        }
        // uniform steps up to the zone
        for k in 1..zone {
            assert_relative_eq!(g.dt(k), g.dt(0), max_relative = 1e-9);
        }
    }

    #[test]
    fn default_refinement_uses_tenth_of_remaining_time() {
        let g = make_time_grid(1000, 1e-4, Refinement::DEFAULT).unwrap();
        let k = g.steps() - 1;
        assert_relative_eq!(g.dt(k) / (1.0 - g.t(k)), 0.1, max_relative = 1e-9);
    }

    #[test]
    fn invalid_parameters() {
        assert!(make_time_grid(1, 0.1, Refinement::Uniform).is_err());
        assert!(make_time_grid(10, 0.0, Refinement::Uniform).is_err());
        assert!(make_time_grid(10, 0.6, Refinement::Uniform).is_err());
        assert!(make_time_grid(10, 0.1, Refinement::Geometric { ratio: 1.0 }).is_err());
        assert!(TimeGrid::from_nodes(vec![0.0, 0.5, 0.4]).is_err());
        assert!(TimeGrid::from_nodes(vec![0.1, 0.5]).is_err());
    }

    #[test]
    fn few_steps_with_geometric_refinement() {
        let g = make_time_grid(3, 1e-4, Refinement::Geometric { ratio: 0.5 }).unwrap();
        assert_eq!(g.steps(), 3);
        assert_eq!(g.last(), 1.0 - 1e-4);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn refine_nests_and_keeps_zone_geometric() {
        let g = make_time_grid(200, 1e-4, Refinement::Geometric { ratio: 0.9 }).unwrap();
        let f = g.refine();
        assert_eq!(f.steps(), 400);
        for k in 0..=200 {
            assert_eq!(f.t(2 * k), g.t(k));
        }
        let ratio = 0.9f64.sqrt();
        for k in f.zone_start..f.steps() {
            assert_relative_eq!((1.0 - f.t(k + 1)) / (1.0 - f.t(k)), ratio, max_relative = 1e-9);
        }
    }

    #[test]
    fn nearest_node_snaps() {
        let g = make_time_grid(4, 0.2, Refinement::Uniform).unwrap();
        assert_eq!(g.nearest_node(0.21), 1);
        assert_eq!(g.nearest_node(0.3), 1);
        assert_eq!(g.nearest_node(0.41), 2);
        assert_eq!(g.nearest_node(5.0), 4);
        assert!(g.node_for(0.9).is_err());
        assert_eq!(g.node_for(0.8).unwrap(), 4);
    }
}
