//! JSON scenario files.
//!
//! A [`Document`] mirrors the file format one-to-one, with every optional key
//! left as `None`. [`Scenario`] is the resolved form: defaults filled in,
//! scalars broadcast to lists, and every constraint checked.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use spinbath_core::bath::{
    build_ensemble, BathEnsemble, BathSpec, Boundary, Engine, DEFAULT_BRUTEFORCE_CAP,
};
use spinbath_core::series::TimeGrid;
use spinbath_core::single::SystemSpec;
use spinbath_core::two_qubit::TwoQubitSpec;

use crate::CliError;

pub const DEFAULT_OUTPUT: &str = "spinbath";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Single,
    TwoQubit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Variants {
    /// Uncorrelated preparation only.
    Woc,
    /// Correlated preparation only.
    Wc,
    #[default]
    Both,
}

impl Variants {
    pub fn woc(self) -> bool {
        matches!(self, Variants::Woc | Variants::Both)
    }

    pub fn wc(self) -> bool {
        matches!(self, Variants::Wc | Variants::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum EngineName {
    /// Collapse uniform baths, enumerate the rest.
    #[default]
    Auto,
    Bruteforce,
    Collapsed,
}

impl From<EngineName> for Engine {
    fn from(e: EngineName) -> Self {
        match e {
            EngineName::Auto => Engine::Auto,
            EngineName::Bruteforce => Engine::Bruteforce,
            EngineName::Collapsed => Engine::Collapsed,
        }
    }
}

impl From<Engine> for EngineName {
    fn from(e: Engine) -> Self {
        match e {
            Engine::Auto => EngineName::Auto,
            Engine::Bruteforce => EngineName::Bruteforce,
            Engine::Collapsed => EngineName::Collapsed,
        }
    }
}

impl EngineName {
    pub fn as_str(self) -> &'static str {
        match self {
            EngineName::Auto => "auto",
            EngineName::Bruteforce => "bruteforce",
            EngineName::Collapsed => "collapsed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryName {
    /// Ring: spin N couples back to spin 1.
    #[default]
    Periodic,
    /// Chain of N - 1 bonds; the last `ising` entry is ignored.
    Open,
}

/// One number for both qubits, or `[qubit 1, qubit 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum PerQubit {
    Both(f64),
    Each([f64; 2]),
}

impl PerQubit {
    fn expand(self) -> [f64; 2] {
        match self {
            PerQubit::Both(x) => [x, x],
            PerQubit::Each(p) => p,
        }
    }

    fn compact(p: [f64; 2]) -> Self {
        if p[0] == p[1] {
            PerQubit::Both(p[0])
        } else {
            PerQubit::Each(p)
        }
    }
}

/// One number for every bath spin, or a list of `n_spins` numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum PerSpin {
    All(f64),
    Each(Vec<f64>),
}

impl PerSpin {
    fn expand(self, n: usize) -> Vec<f64> {
        match self {
            PerSpin::All(x) => vec![x; n],
            PerSpin::Each(v) => v,
        }
    }

    fn compact(v: &[f64]) -> Self {
        match v.first() {
            Some(&x) if v.iter().all(|&y| y == x) => PerSpin::All(x),
            _ => PerSpin::Each(v.to_vec()),
        }
    }
}

/// A scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Document {
    /// One central qubit or a pair. Default `single`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    /// Central-qubit parameters; defaults depend on `mode`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemDoc>,
    pub bath: BathDoc,
    /// Which preparations to simulate. Default `both`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variants: Option<Variants>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridDoc>,
    /// Path prefix for `<prefix>.csv`, `<prefix>.meta.json` and `<prefix>.gp`.
    /// Default `spinbath`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// How the bath sum is evaluated. Default `auto`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<EngineName>,
    /// Largest bath enumerated configuration by configuration. Default 24.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bruteforce_cap: Option<usize>,
}

/// Central-qubit energies. In `single` mode every entry is a plain number
/// and `kappa`/`coupling_scale` are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    /// Bias before preparation. Default 4 (single) or 5 (two_qubit).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps0: Option<PerQubit>,
    /// Bias after preparation. Default 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<PerQubit>,
    /// Tunneling amplitude, at least 0. Default 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta0: Option<PerQubit>,
    /// Qubit-qubit `σz⊗σz` coupling (two_qubit only). Default 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Factor on the bath field seen by each qubit (two_qubit only). Default 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_scale: Option<PerQubit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct BathDoc {
    pub n_spins: usize,
    /// System-bath couplings `g_i`.
    pub couplings: PerSpin,
    /// Bath level splittings `ε_i`. Default 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splittings: Option<PerSpin>,
    /// Nearest-neighbour strengths `α_i`. Default 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ising: Option<PerSpin>,
    /// Default `periodic`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryName>,
    /// Inverse temperature, positive.
    pub beta: f64,
}

/// Uniform time grid on `[0, t_max]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    /// Default 10.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// At least 2. Default 1000.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemConfig {
    Single(SystemSpec),
    TwoQubit(TwoQubitSpec),
}

impl SystemConfig {
    pub fn mode(&self) -> Mode {
        match self {
            SystemConfig::Single(_) => Mode::Single,
            SystemConfig::TwoQubit(_) => Mode::TwoQubit,
        }
    }
}

/// A fully resolved, validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub system: SystemConfig,
    pub bath: BathSpec,
    pub variants: Variants,
    pub grid: TimeGrid,
    pub output: String,
    pub engine: EngineName,
    pub bruteforce_cap: usize,
}

pub fn parse_config(text: &str) -> Result<Scenario, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: Document = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        parse_error(path, e.into_inner())
    })?;
    de.end().map_err(|e| parse_error(String::new(), e))?;
    Scenario::from_document(doc)
}

fn parse_error(path: String, e: serde_json::Error) -> CliError {
    let full = e.to_string();
    let message = match full.rsplit_once(" at line ") {
        Some((m, _)) => m.to_string(),
        None => full,
    };
    CliError::Parse {
        path,
        line: e.line(),
        column: e.column(),
        message,
    }
}

/// JSON Schema of the scenario format.
pub fn schema() -> serde_json::Value {
    serde_json::to_value(schemars::schema_for!(Document)).expect("schema serializes")
}

impl Scenario {
    pub fn mode(&self) -> Mode {
        self.system.mode()
    }

    pub fn from_document(doc: Document) -> Result<Self, CliError> {
        let mode = doc.mode.unwrap_or_default();
        let system = resolve_system(mode, doc.system.unwrap_or_default())?;

        let b = doc.bath;
        let n = b.n_spins;
        let bath = BathSpec {
            n_spins: n,
            couplings: b.couplings.expand(n),
            splittings: b.splittings.unwrap_or(PerSpin::All(1.0)).expand(n),
            ising: b.ising.unwrap_or(PerSpin::All(0.0)).expand(n),
            boundary: match b.boundary.unwrap_or_default() {
                BoundaryName::Periodic => Boundary::Periodic,
                BoundaryName::Open => Boundary::Open,
            },
            beta: b.beta,
        };
        bath.validate()?;

        let g = doc.grid.unwrap_or_default();
        let grid = TimeGrid::new(g.t_max.unwrap_or(10.0), g.points.unwrap_or(1000));
        if grid.points < 2 {
            return Err(CliError::validation("grid.points", "must be at least 2"));
        }
        if !(grid.t_max.is_finite() && grid.t_max > 0.0) {
            return Err(CliError::validation(
                "grid.t_max",
                "must be positive and finite",
            ));
        }

        let output = doc.output.unwrap_or_else(|| DEFAULT_OUTPUT.into());
        if output.is_empty() {
            return Err(CliError::validation("output", "must not be empty"));
        }
        let bruteforce_cap = doc.bruteforce_cap.unwrap_or(DEFAULT_BRUTEFORCE_CAP);
        if bruteforce_cap == 0 || bruteforce_cap >= usize::BITS as usize {
            return Err(CliError::validation(
                "bruteforce_cap",
                format!("must be between 1 and {}", usize::BITS - 1),
            ));
        }

        Ok(Scenario {
            system,
            bath,
            variants: doc.variants.unwrap_or_default(),
            grid,
            output,
            engine: doc.engine.unwrap_or_default(),
            bruteforce_cap,
        })
    }

    /// The file form, with uniform lists written as single numbers.
    pub fn to_document(&self) -> Document {
        let system = match self.system {
            SystemConfig::Single(s) => SystemDoc {
                eps0: Some(PerQubit::Both(s.eps0)),
                eps: Some(PerQubit::Both(s.eps)),
                delta0: Some(PerQubit::Both(s.delta0)),
                kappa: None,
                coupling_scale: None,
            },
            SystemConfig::TwoQubit(s) => SystemDoc {
                eps0: Some(PerQubit::compact(s.eps0)),
                eps: Some(PerQubit::compact(s.eps)),
                delta0: Some(PerQubit::compact(s.delta0)),
                kappa: Some(s.kappa),
                coupling_scale: Some(PerQubit::compact(s.coupling_scale)),
            },
        };
        Document {
            mode: Some(self.mode()),
            system: Some(system),
            bath: BathDoc {
                n_spins: self.bath.n_spins,
                couplings: PerSpin::compact(&self.bath.couplings),
                splittings: Some(PerSpin::compact(&self.bath.splittings)),
                ising: Some(PerSpin::compact(&self.bath.ising)),
                boundary: Some(match self.bath.boundary {
                    Boundary::Periodic => BoundaryName::Periodic,
                    Boundary::Open => BoundaryName::Open,
                }),
                beta: self.bath.beta,
            },
            variants: Some(self.variants),
            grid: Some(GridDoc {
                t_max: Some(self.grid.t_max),
                points: Some(self.grid.points),
            }),
            output: Some(self.output.clone()),
            engine: Some(self.engine),
            bruteforce_cap: Some(self.bruteforce_cap),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }

    pub fn build_ensemble(&self) -> Result<BathEnsemble, CliError> {
        Ok(build_ensemble(
            &self.bath,
            self.engine.into(),
            self.bruteforce_cap,
        )?)
    }
}

fn resolve_system(mode: Mode, doc: SystemDoc) -> Result<SystemConfig, CliError> {
    match mode {
        Mode::Single => {
            if doc.kappa.is_some() {
                return Err(CliError::validation(
                    "system.kappa",
                    "only valid in two_qubit mode",
                ));
            }
            if doc.coupling_scale.is_some() {
                return Err(CliError::validation(
                    "system.coupling_scale",
                    "only valid in two_qubit mode",
                ));
            }
            let scalar = |name: &str, v: Option<PerQubit>, default: f64| match v {
                None => Ok(default),
                Some(PerQubit::Both(x)) => Ok(x),
                Some(PerQubit::Each(_)) => Err(CliError::validation(
                    format!("system.{name}"),
                    "a per-qubit pair is only valid in two_qubit mode",
                )),
            };
            let spec = SystemSpec {
                eps0: scalar("eps0", doc.eps0, 4.0)?,
                eps: scalar("eps", doc.eps, 2.0)?,
                delta0: scalar("delta0", doc.delta0, 1.0)?,
            };
            spec.validate()?;
            Ok(SystemConfig::Single(spec))
        }
        Mode::TwoQubit => {
            let pair = |v: Option<PerQubit>, default: f64| v.map_or([default; 2], PerQubit::expand);
            let spec = TwoQubitSpec {
                eps0: pair(doc.eps0, 5.0),
                eps: pair(doc.eps, 2.0),
                delta0: pair(doc.delta0, 1.0),
                kappa: doc.kappa.unwrap_or(0.0),
                coupling_scale: pair(doc.coupling_scale, 1.0),
            };
            spec.validate()?;
            Ok(SystemConfig::TwoQubit(spec))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_takes_defaults() {
        let s = parse_config(r#"{"bath": {"n_spins": 50, "couplings": 0.01, "beta": 1}}"#).unwrap();
        assert_eq!(
            s.system,
            SystemConfig::Single(SystemSpec {
                eps0: 4.0,
                eps: 2.0,
                delta0: 1.0
            })
        );
        assert_eq!(s.bath.splittings, vec![1.0; 50]);
        assert_eq!(s.bath.ising, vec![0.0; 50]);
        assert_eq!(s.bath.boundary, Boundary::Periodic);
        assert_eq!(s.grid, TimeGrid::new(10.0, 1000));
        assert_eq!(s.variants, Variants::Both);
        assert_eq!(s.engine, EngineName::Auto);
        assert_eq!(s.bruteforce_cap, 24);
    }

    #[test]
    fn two_qubit_defaults() {
        let s = parse_config(
            r#"{"mode": "two_qubit", "bath": {"n_spins": 3, "couplings": 0.05, "beta": 1}}"#,
        )
        .unwrap();
        assert_eq!(
            s.system,
            SystemConfig::TwoQubit(TwoQubitSpec::symmetric(5.0, 2.0, 1.0, 0.0))
        );
    }

    fn validation_path(text: &str) -> String {
        match parse_config(text) {
            Err(CliError::Validation { path, .. }) => path,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn constraint_violations_name_their_field() {
        let bath = r#""bath": {"n_spins": 3, "couplings": 0.1, "beta": 1}"#;
        assert_eq!(
            validation_path(&format!(r#"{{{bath}, "grid": {{"points": 1}}}}"#)),
            "grid.points"
        );
        assert_eq!(
            validation_path(&format!(r#"{{{bath}, "grid": {{"t_max": 0}}}}"#)),
            "grid.t_max"
        );
        assert_eq!(
            validation_path(r#"{"bath": {"n_spins": 3, "couplings": [0.1, 0.2], "beta": 1}}"#),
            "bath.couplings"
        );
        assert_eq!(
            validation_path(r#"{"bath": {"n_spins": 3, "couplings": 0.1, "beta": -1}}"#),
            "bath.beta"
        );
        assert_eq!(
            validation_path(&format!(r#"{{{bath}, "system": {{"delta0": -1}}}}"#)),
            "system.delta0"
        );
        assert_eq!(
            validation_path(&format!(r#"{{{bath}, "system": {{"kappa": 0.5}}}}"#)),
            "system.kappa"
        );
        assert_eq!(
            validation_path(&format!(r#"{{{bath}, "system": {{"eps0": [4, 5]}}}}"#)),
            "system.eps0"
        );
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_path() {
        let err =
            parse_config(r#"{"bath": {"n_spins": 3, "couplings": 0.1, "beta": 1, "gamma": 2}}"#)
                .unwrap_err();
        match err {
            CliError::Parse { path, message, .. } => {
                assert_eq!(path, "bath.gamma");
                assert!(message.contains("gamma"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_config("{\n  \"bath\": {\"n_spins\": 3,,}\n}").unwrap_err();
        match err {
            CliError::Parse { line, column, .. } => assert_eq!((line, column), (2, 25)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("{} {}"), Err(CliError::Parse { .. })));
    }

    #[test]
    fn heterogeneous_lists_survive_a_round_trip() {
        let text = r#"{
            "mode": "two_qubit",
            "system": {"eps0": [5, 4.5], "kappa": 0.25, "coupling_scale": [1, 0.5]},
            "bath": {"n_spins": 3, "couplings": [0.1, -0.2, 0.3], "ising": 0.2,
                     "boundary": "open", "beta": 2},
            "variants": "wc", "engine": "bruteforce", "output": "out/x"
        }"#;
        let s = parse_config(text).unwrap();
        assert_eq!(parse_config(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn schema_lists_every_top_level_key() {
        let schema = schema();
        let props = schema["properties"].as_object().unwrap();
        for key in [
            "mode",
            "system",
            "bath",
            "variants",
            "grid",
            "output",
            "engine",
            "bruteforce_cap",
        ] {
            assert!(props.contains_key(key), "{key}");
        }
        let required: Vec<&str> = schema["required"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap())
            .collect();
        assert_eq!(required, ["bath"]);
    }
}
