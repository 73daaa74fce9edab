//! Experiment configuration read from JSON.
//!
//! ```json
//! {
//!   "geometry":   { "kind": "hyperbolic", "dim": 3, "c": 1.0, "a": 0.0 },
//!   "simulation": { "steps": 1000, "eps_end": 1e-4, "refinement": "geometric",
//!                   "ratio": 0.9, "paths": 10000, "seed": 0, "r0": 1.0 },
//!   "experiment": { "check": "ibp", "functionals": ["coord(1,1,0.5)", "one"],
//!                   "directions": ["sine(1,1)"] },
//!   "output":     { "json": "ibp.json", "csv": "ibp.csv" }
//! }
//! ```
//!
//! Every block except `geometry` is optional. Validation runs over the whole
//! document and reports every problem it finds.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, GeometryKind, GeometryModel, WarpedProfile, POLE_EPS};
use crate::pathspace::{CmDirection, CylinderFunctional};
use crate::sde::{make_time_grid, PathKind, Refinement, TimeGrid};
use crate::verify::IbpCombo;

/// The experiment a run performs; one per CLI subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Ibp,
    Girsanov,
    Radial,
    Decay,
    Identities,
    Equiv,
    Simulate,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Ibp,
        Check::Girsanov,
        Check::Radial,
        Check::Decay,
        Check::Identities,
        Check::Equiv,
        Check::Simulate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Ibp => "ibp",
            Check::Girsanov => "girsanov",
            Check::Radial => "radial",
            Check::Decay => "decay",
            Check::Identities => "identities",
            Check::Equiv => "equiv",
            Check::Simulate => "simulate",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
                Error::InvalidInput(format!("unknown check `{s}` (available: {})", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub grid: TimeGrid,
    pub paths: usize,
    pub seed: u64,
    pub x0: ChartPoint,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub check: Check,
    pub combos: Vec<IbpCombo>,
    pub functionals: Vec<CylinderFunctional>,
    pub directions: Vec<CmDirection>,
    pub t: Vec<f64>,
    pub halvings: usize,
    pub taus: Vec<f64>,
    pub points: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub process: PathKind,
    pub frames: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputConfig {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub path_dump: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub geometry: GeometryModel,
    pub simulation: SimulationConfig,
    pub experiment: ExperimentConfig,
    pub output: OutputConfig,
}

pub const DEFAULT_STEPS: usize = 1000;
pub const DEFAULT_EPS_END: f64 = 1e-4;
pub const DEFAULT_PATHS: usize = 10_000;
pub const DEFAULT_HALVINGS: usize = 3;

impl RunConfig {
    /// Applies command-line overrides. `out_dir` places `<check>.json` and
    /// `<check>.csv` there unless the config names the files itself.
    pub fn with_overrides(mut self, seed: Option<u64>, paths: Option<usize>, out_dir: Option<PathBuf>) -> Result<Self> {
        if let Some(s) = seed {
            self.simulation.seed = s;
        }
        if let Some(p) = paths {
            if p == 0 {
                return Err(Error::Config(vec!["--paths must be ≥ 1".into()]));
            }
            self.simulation.paths = p;
        }
        if let Some(dir) = out_dir {
            let name = self.experiment.check.name();
            let place = |p: Option<PathBuf>, ext: &str| match p {
                Some(p) if p.is_absolute() => p,
                Some(p) => dir.join(p),
                None => dir.join(format!("{name}.{ext}")),
            };
            self.output.json = Some(place(self.output.json.take(), "json"));
            self.output.csv = Some(place(self.output.csv.take(), "csv"));
            if let Some(p) = self.output.path_dump.take() {
                self.output.path_dump = Some(if p.is_absolute() { p } else { dir.join(p) });
            }
        }
        Ok(self)
    }
}

/// Parses and validates a configuration whose `experiment.check` names the
/// experiment.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_for(text, None)
}

/// As [`parse_config`], with the check supplied by the caller (a CLI
/// subcommand). A conflicting `experiment.check` is an error.
pub fn parse_config_for(text: &str, check: Option<Check>) -> Result<RunConfig> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| Error::Config(vec![format!("malformed JSON: {e}")]))?;
    let mut p = Parser::default();
    let root = match doc.as_object() {
        Some(o) => o,
        None => return Err(Error::Config(vec!["top level must be a JSON object".into()])),
    };
    p.keys("", root, &["geometry", "simulation", "experiment", "output"]);

    let empty = Map::new();
    let (dim, geometry) = match root.get("geometry") {
        Some(g) => p.geometry(g),
        None => {
            p.err("geometry", "missing required block");
            (None, None)
        }
    };
    let sim = p.block(root, "simulation").unwrap_or(&empty);
    let simulation = p.simulation(sim, dim);
    let exp = p.block(root, "experiment").unwrap_or(&empty);
    let experiment = p.experiment(exp, dim, check);
    let out = p.block(root, "output").unwrap_or(&empty);
    let output = p.output(out);

    match (geometry, simulation, experiment) {
        (Some(geometry), Some(simulation), Some(experiment)) if p.errors.is_empty() => Ok(RunConfig {
            geometry,
            simulation,
            experiment,
            output,
        }),
        _ => Err(Error::Config(p.errors)),
    }
}

#[derive(Default)]
struct Parser {
    errors: Vec<String>,
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

impl Parser {
    fn err(&mut self, at: &str, msg: impl fmt::Display) {
        self.errors.push(format!("{at}: {msg}"));
    }

    fn keys(&mut self, path: &str, obj: &Map<String, Value>, allowed: &[&str]) {
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                let at = join(path, k);
                self.err(&at, format!("unknown key (expected one of: {})", allowed.join(", ")));
            }
        }
    }

    fn block<'a>(&mut self, root: &'a Map<String, Value>, key: &str) -> Option<&'a Map<String, Value>> {
        let v = root.get(key)?;
        match v.as_object() {
            Some(o) => Some(o),
            None => {
                self.err(key, "must be an object");
                None
            }
        }
    }

    fn float(&mut self, obj: &Map<String, Value>, path: &str, key: &str) -> Option<f64> {
        let v = obj.get(key)?;
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.err(&join(path, key), format!("expected a finite number, got {v}"));
                None
            }
        }
    }

    fn uint(&mut self, obj: &Map<String, Value>, path: &str, key: &str) -> Option<u64> {
        let v = obj.get(key)?;
        match v.as_u64() {
            Some(x) => Some(x),
            None => {
                self.err(&join(path, key), format!("expected a non-negative integer, got {v}"));
                None
            }
        }
    }

    fn string<'a>(&mut self, obj: &'a Map<String, Value>, path: &str, key: &str) -> Option<&'a str> {
        let v = obj.get(key)?;
        match v.as_str() {
            Some(s) => Some(s),
            None => {
                self.err(&join(path, key), format!("expected a string, got {v}"));
                None
            }
        }
    }

    fn boolean(&mut self, obj: &Map<String, Value>, path: &str, key: &str) -> Option<bool> {
        let v = obj.get(key)?;
        match v.as_bool() {
            Some(b) => Some(b),
            None => {
                self.err(&join(path, key), format!("expected true or false, got {v}"));
                None
            }
        }
    }

    fn list<'a>(&mut self, obj: &'a Map<String, Value>, path: &str, key: &str) -> Option<&'a [Value]> {
        let v = obj.get(key)?;
        match v.as_array() {
            Some(a) => Some(a.as_slice()),
            None => {
                self.err(&join(path, key), format!("expected an array, got {v}"));
                None
            }
        }
    }

    fn floats(&mut self, obj: &Map<String, Value>, path: &str, key: &str) -> Option<Vec<f64>> {
        let items = self.list(obj, path, key)?;
        let at = join(path, key);
        let mut out = Vec::with_capacity(items.len());
        for (i, v) in items.iter().enumerate() {
            match v.as_f64() {
                Some(x) if x.is_finite() => out.push(x),
                _ => self.err(&format!("{at}[{i}]"), format!("expected a finite number, got {v}")),
            }
        }
        Some(out)
    }

    fn strings<'a>(&mut self, obj: &'a Map<String, Value>, path: &str, key: &str) -> Option<Vec<&'a str>> {
        let items = self.list(obj, path, key)?;
        let at = join(path, key);
        let mut out = Vec::with_capacity(items.len());
        for (i, v) in items.iter().enumerate() {
            match v.as_str() {
                Some(s) => out.push(s),
                None => self.err(&format!("{at}[{i}]"), format!("expected a string, got {v}")),
            }
        }
        Some(out)
    }

    fn geometry(&mut self, v: &Value) -> (Option<usize>, Option<GeometryModel>) {
        const P: &str = "geometry";
        let Some(obj) = v.as_object() else {
            self.err(P, "must be an object");
            return (None, None);
        };
        self.keys(P, obj, &["kind", "dim", "c", "kappa", "a"]);
        let dim = match self.uint(obj, P, "dim") {
            Some(0) => {
                self.err("geometry.dim", "dimension must be ≥ 1");
                None
            }
            Some(d) => Some(d as usize),
            None => {
                if !obj.contains_key("dim") {
                    self.err("geometry.dim", "missing required key");
                }
                None
            }
        };
        let c = self.float(obj, P, "c");
        let kappa = self.float(obj, P, "kappa");
        let a = self.float(obj, P, "a").unwrap_or(0.0);
        let kind_name = self.string(obj, P, "kind").unwrap_or("euclidean");
        let kind = match kind_name {
            "euclidean" => Some(GeometryKind::Euclidean),
            "hyperbolic" => Some(GeometryKind::Hyperbolic { c: c.unwrap_or(1.0) }),
            "warped-flat" => Some(GeometryKind::Warped(WarpedProfile::Flat)),
            "warped-cubic" => Some(GeometryKind::Warped(WarpedProfile::Cubic {
                kappa: kappa.unwrap_or(1.0),
            })),
            "warped-sinh" => Some(GeometryKind::Warped(WarpedProfile::Sinh { c: c.unwrap_or(1.0) })),
            other => {
                self.err(
                    "geometry.kind",
                    format!(
                        "unknown geometry `{other}` (available: euclidean, hyperbolic, warped-flat, warped-cubic, warped-sinh)"
                    ),
                );
                None
            }
        };
        let (Some(n), Some(kind)) = (dim, kind) else {
            return (dim, None);
        };
        match GeometryModel::new(n, kind, a) {
            Ok(g) => (dim, Some(g)),
            Err(e) => {
                self.err(P, plain(e));
                (dim, None)
            }
        }
    }

    fn simulation(&mut self, obj: &Map<String, Value>, dim: Option<usize>) -> Option<SimulationConfig> {
        const P: &str = "simulation";
        self.keys(P, obj, &["steps", "eps_end", "refinement", "ratio", "paths", "seed", "x0", "r0"]);
        let steps = self.uint(obj, P, "steps").unwrap_or(DEFAULT_STEPS as u64) as usize;
        let eps_end = self.float(obj, P, "eps_end").unwrap_or(DEFAULT_EPS_END);
        let ratio = self.float(obj, P, "ratio");
        let refinement = match self.string(obj, P, "refinement").unwrap_or("geometric") {
            "uniform" => {
                if ratio.is_some() {
                    self.err("simulation.ratio", "only meaningful with geometric refinement");
                }
                Some(Refinement::Uniform)
            }
            "geometric" => Some(Refinement::Geometric {
                ratio: ratio.unwrap_or(0.9),
            }),
            other => {
                self.err(
                    "simulation.refinement",
                    format!("unknown refinement `{other}` (available: uniform, geometric)"),
                );
                None
            }
        };
        let paths = self.uint(obj, P, "paths").unwrap_or(DEFAULT_PATHS as u64) as usize;
        if paths == 0 {
            self.err("simulation.paths", "must be ≥ 1");
        }
        let seed = self.uint(obj, P, "seed").unwrap_or(0);

        let grid = refinement.and_then(|r| match make_time_grid(steps, eps_end, r) {
            Ok(g) => Some(g),
            Err(e) => {
                self.err(P, plain(e));
                None
            }
        });

        let x0 = match (obj.contains_key("x0"), self.float(obj, P, "r0")) {
            (true, Some(_)) => {
                self.err(P, "give either x0 or r0, not both");
                None
            }
            (true, None) => {
                let xs = self.floats(obj, P, "x0")?;
                match dim {
                    Some(n) if xs.len() != n => {
                        self.err("simulation.x0", format!("has {} coordinates, geometry has dim {n}", xs.len()));
                        None
                    }
                    _ => Some(ChartPoint::new(xs)),
                }
            }
            (false, r0) => {
                let r0 = r0.unwrap_or(1.0);
                dim.map(|n| {
                    let mut v = vec![0.0; n];
                    v[0] = r0;
                    ChartPoint::new(v)
                })
            }
        };
        if let Some(x) = &x0 {
            if x.radius() < POLE_EPS {
                self.err(P, format!("starting point must be away from the pole (radius ≥ {POLE_EPS:e})"));
            }
        }
        if paths == 0 {
            return None;
        }
        Some(SimulationConfig {
            grid: grid?,
            paths,
            seed,
            x0: x0?,
        })
    }

    fn functional(&mut self, at: &str, key: &str, dim: usize) -> Option<CylinderFunctional> {
        match CylinderFunctional::parse(key, dim) {
            Ok(f) => Some(f),
            Err(e) => {
                let msg = plain(e);
                if msg.contains("available") {
                    self.err(at, msg);
                } else {
                    self.err(at, format!("{msg} (available functionals: {})", CylinderFunctional::REGISTRY.join(", ")));
                }
                None
            }
        }
    }

    fn direction(&mut self, at: &str, key: &str, dim: usize) -> Option<CmDirection> {
        match CmDirection::parse(key, dim) {
            Ok(h) => Some(h),
            Err(e) => {
                let msg = plain(e);
                if msg.contains("available") {
                    self.err(at, msg);
                } else {
                    self.err(at, format!("{msg} (available directions: {})", CmDirection::REGISTRY.join(", ")));
                }
                None
            }
        }
    }

    fn experiment(
        &mut self,
        obj: &Map<String, Value>,
        dim: Option<usize>,
        forced: Option<Check>,
    ) -> Option<ExperimentConfig> {
        const P: &str = "experiment";
        self.keys(
            P,
            obj,
            &[
                "check", "combos", "functionals", "directions", "t", "halvings", "taus", "points",
                "r_min", "r_max", "process", "frames",
            ],
        );
        let named = self.string(obj, P, "check").and_then(|s| match s.parse::<Check>() {
            Ok(c) => Some(c),
            Err(e) => {
                self.err("experiment.check", plain(e));
                None
            }
        });
        let check = match (forced, named) {
            (Some(f), Some(n)) if f != n => {
                self.err("experiment.check", format!("config is for `{n}` but `{f}` was requested"));
                return None;
            }
            (Some(c), _) | (None, Some(c)) => c,
            (None, None) => {
                if !obj.contains_key("check") {
                    self.err("experiment.check", "missing (name the check here or on the command line)");
                }
                return None;
            }
        };

        let default_functionals: &[&str] = match check {
            Check::Ibp => &["coord(1,1,0.5)", "one"],
            Check::Girsanov => &["dist2(0.5)"],
            _ => &[],
        };
        let default_directions: &[&str] = match check {
            Check::Ibp | Check::Equiv => &["sine(1,1)"],
            Check::Decay => &["sine(1,1)", "ramp(1)"],
            _ => &[],
        };
        let default_t: &[f64] = match check {
            Check::Girsanov => &[0.5],
            Check::Radial => &[0.25, 0.5, 0.75],
            Check::Decay => &[0.9, 0.99, 0.999],
            _ => &[],
        };

        let f_keys = self
            .strings(obj, P, "functionals")
            .unwrap_or_else(|| default_functionals.to_vec());
        let h_keys = self
            .strings(obj, P, "directions")
            .unwrap_or_else(|| default_directions.to_vec());
        let t = self.floats(obj, P, "t").unwrap_or_else(|| default_t.to_vec());
        for (i, &s) in t.iter().enumerate() {
            if !(s > 0.0 && s < 1.0) {
                self.err(&format!("experiment.t[{i}]"), format!("must lie in (0, 1), got {s}"));
            }
        }
        let halvings = self.uint(obj, P, "halvings").unwrap_or(DEFAULT_HALVINGS as u64) as usize;
        if !(1..=8).contains(&halvings) {
            self.err("experiment.halvings", format!("must lie in 1..=8, got {halvings}"));
        }
        let taus = self.floats(obj, P, "taus").unwrap_or_else(|| vec![0.1, 0.5, 1.0]);
        for (i, &s) in taus.iter().enumerate() {
            if s <= 0.0 {
                self.err(&format!("experiment.taus[{i}]"), format!("must be > 0, got {s}"));
            }
        }
        let points = self.uint(obj, P, "points").unwrap_or(50) as usize;
        if points == 0 {
            self.err("experiment.points", "must be ≥ 1");
        }
        let r_min = self.float(obj, P, "r_min").unwrap_or(0.1);
        let r_max = self.float(obj, P, "r_max").unwrap_or(4.0);
        if !(r_min >= 1e-3 && r_min <= r_max) {
            self.err(
                "experiment.r_min",
                format!("need 1e-3 ≤ r_min ≤ r_max, got r_min = {r_min}, r_max = {r_max}"),
            );
        }
        let process = match self.string(obj, P, "process").unwrap_or("bridge") {
            "bridge" => PathKind::Bridge,
            "free" => PathKind::Free,
            other => {
                self.err("experiment.process", format!("unknown process `{other}` (available: bridge, free)"));
                PathKind::Bridge
            }
        };
        let frames = self.boolean(obj, P, "frames").unwrap_or(false);

        let dim = dim?;
        let before = self.errors.len();
        let functionals: Vec<CylinderFunctional> = f_keys
            .iter()
            .enumerate()
            .filter_map(|(i, k)| self.functional(&format!("experiment.functionals[{i}]"), k, dim))
            .collect();
        let directions: Vec<CmDirection> = h_keys
            .iter()
            .enumerate()
            .filter_map(|(i, k)| self.direction(&format!("experiment.directions[{i}]"), k, dim))
            .collect();

        let mut combos = Vec::new();
        if let Some(items) = self.list(obj, P, "combos") {
            for (i, item) in items.iter().enumerate() {
                let at = format!("experiment.combos[{i}]");
                let Some(o) = item.as_object() else {
                    self.err(&at, "expected an object {\"f\", \"g\", \"h\"}");
                    continue;
                };
                self.keys(&at, o, &["f", "g", "h"]);
                let f = self.string(o, &at, "f").unwrap_or("one");
                let g = self.string(o, &at, "g").unwrap_or("one");
                let h = self.string(o, &at, "h").unwrap_or("sine(1,1)");
                let f = self.functional(&format!("{at}.f"), f, dim);
                let g = self.functional(&format!("{at}.g"), g, dim);
                let h = self.direction(&format!("{at}.h"), h, dim);
                if let (Some(f), Some(g), Some(h)) = (f, g, h) {
                    combos.push(IbpCombo::new(f, g, h));
                }
            }
        } else if check == Check::Ibp {
            let f = functionals.first().cloned();
            let g = functionals.get(1).cloned().unwrap_or(CylinderFunctional::One);
            if functionals.len() > 2 {
                self.err("experiment.functionals", "ibp takes at most two functionals [F, G]");
            }
            if let Some(f) = f {
                combos.extend(directions.iter().map(|h| IbpCombo::new(f.clone(), g.clone(), h.clone())));
            } else if self.errors.len() == before {
                self.err("experiment.functionals", "ibp needs at least one functional");
            }
        }

        let needs = |what: &str, ok: bool, p: &mut Parser| {
            if !ok && p.errors.len() == before {
                p.err(P, format!("`{check}` needs at least one {what}"));
            }
        };
        match check {
            Check::Ibp => needs("(F, G, h) combination", !combos.is_empty(), self),
            Check::Girsanov => {
                needs("functional", !functionals.is_empty(), self);
                needs("time in t", !t.is_empty(), self);
            }
            Check::Radial => needs("time in t", !t.is_empty(), self),
            Check::Decay => {
                needs("direction", !directions.is_empty(), self);
                needs("time in t", !t.is_empty(), self);
            }
            Check::Equiv => needs("direction", !directions.is_empty(), self),
            Check::Identities => needs("τ in taus", !taus.is_empty(), self),
            Check::Simulate => {}
        }

        Some(ExperimentConfig {
            check,
            combos,
            functionals,
            directions,
            t,
            halvings,
            taus,
            points,
            r_min,
            r_max,
            process,
            frames,
        })
    }

    fn output(&mut self, obj: &Map<String, Value>) -> OutputConfig {
        const P: &str = "output";
        self.keys(P, obj, &["json", "csv", "path_dump"]);
        let mut path = |key: &str| self.string(obj, P, key).map(PathBuf::from);
        OutputConfig {
            json: path("json"),
            csv: path("csv"),
            path_dump: path("path_dump"),
        }
    }
}

/// The message of an engine error without its category prefix.
fn plain(e: Error) -> String {
    match e {
        Error::InvalidInput(m) | Error::Numerical(m) => m,
        other => other.to_string(),
    }
}
