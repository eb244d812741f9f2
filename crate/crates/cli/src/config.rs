//! JSON experiment configs, validated into library types before any work starts.

use std::path::{Path, PathBuf};

use kloodist_core::equidist::{BoxST, IntervalST};
use kloodist_core::kloosterman::MAX_RESIDUE_FIELD;
use kloodist_core::{support, FieldSpec, Poly, PolyRing, RationalFn, ShortInterval};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub p: u64,
    #[serde(default = "one")]
    pub e: u32,
    /// Coefficient indices of the defining polynomial, constant term first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

/// A single parameter or a list of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Params {
    One(String),
    Many(Vec<String>),
}

impl Params {
    pub fn as_slice(&self) -> &[String] {
        match self {
            Params::One(s) => std::slice::from_ref(s),
            Params::Many(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub field: FieldConfig,
    pub a: Params,
    pub degrees: Vec<usize>,
    /// Moduli g for progression experiments, e.g. "0-0-1" for T^2.
    #[serde(default)]
    pub moduli: Vec<String>,
    /// Short intervals as "A=<poly>;h=<int>".
    #[serde(default)]
    pub short_intervals: Vec<String>,
    /// Target intervals [lo, hi] inside [0, pi].
    #[serde(default)]
    pub intervals: Vec<[f64; 2]>,
    /// Target boxes for joint runs, one [lo, hi] side per parameter.
    #[serde(default)]
    pub boxes: Vec<Vec<[f64; 2]>>,
    #[serde(default = "default_sym_max")]
    pub sym_max: u32,
    #[serde(default = "default_joint_sym_max")]
    pub joint_sym_max: u32,
    #[serde(default = "unit")]
    pub niederreiter_c: f64,
    #[serde(default = "unit")]
    pub error_scale_c: f64,
    #[serde(default = "default_grid")]
    pub grid_resolution: usize,
    /// Keep only places with nonzero constant term.
    #[serde(default)]
    pub nonzero_constant: bool,
    /// Replaces the default largest break B_a in the error scales.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_override: Option<f64>,
    /// deg D for the effective Chebotarev bound in census runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disc_degree: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

fn one() -> u32 {
    1
}
fn unit() -> f64 {
    1.0
}
fn default_sym_max() -> u32 {
    10
}
fn default_joint_sym_max() -> u32 {
    4
}
fn default_grid() -> usize {
    16
}

/// A config that passed validation, with every string parsed.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub field: FieldSpec,
    pub params: Vec<RationalFn>,
    pub moduli: Vec<Poly>,
    pub short_intervals: Vec<ShortInterval>,
    pub intervals: Vec<IntervalST>,
    pub boxes: Vec<BoxST>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The config as embedded in output headers. Settings that cannot change
    /// any output (workers, cache location) are left out so that they never
    /// change output bytes either.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.workers = None;
        c.cache_dir = None;
        serde_json::to_string(&c).expect("config serializes")
    }

    pub fn validate(&self) -> Result<Experiment, CliError> {
        let cfg = |m: String| CliError::Config(m);
        let field = FieldSpec::new(self.field.p, self.field.e, self.field.modulus.as_deref())
            .map_err(|e| cfg(format!("field: {e}")))?;
        let ring = PolyRing::new(&field);

        let names = self.a.as_slice();
        if names.is_empty() {
            return Err(cfg("a: at least one parameter is required".into()));
        }
        let mut params = Vec::with_capacity(names.len());
        for s in names {
            let a = RationalFn::parse(&ring, s).map_err(|e| cfg(format!("a {s:?}: {e}")))?;
            support(&field, &a).map_err(|e| cfg(format!("a {s:?}: {e}")))?;
            params.push(a);
        }

        if self.degrees.is_empty() {
            return Err(cfg("degrees: list is empty".into()));
        }
        for &d in &self.degrees {
            let fits = u64::from(field.q()).checked_pow(d as u32).is_some_and(|s| s <= MAX_RESIDUE_FIELD);
            if d == 0 || !fits {
                return Err(cfg(format!("degree {d}: need 1 <= d and q^d <= {MAX_RESIDUE_FIELD}")));
            }
        }

        let mut moduli = Vec::new();
        for s in &self.moduli {
            let g = ring.parse(s).map_err(|e| cfg(format!("modulus {s:?}: {e}")))?;
            if g.is_constant() || !g.is_monic() {
                return Err(cfg(format!("modulus {s:?}: must be monic of degree >= 1")));
            }
            moduli.push(g);
        }

        let short_intervals = self
            .short_intervals
            .iter()
            .map(|s| ShortInterval::parse(&ring, s).map_err(|e| cfg(format!("short interval {s:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;

        let side = |[lo, hi]: [f64; 2]| IntervalST::new(lo, hi).map_err(|e| cfg(format!("interval [{lo}, {hi}]: {e}")));
        let intervals = self.intervals.iter().copied().map(side).collect::<Result<Vec<_>, _>>()?;
        let mut boxes = Vec::new();
        for b in &self.boxes {
            if b.len() != params.len() {
                return Err(cfg(format!("box has {} sides but there are {} parameters", b.len(), params.len())));
            }
            boxes.push(BoxST { sides: b.iter().copied().map(side).collect::<Result<_, _>>()? });
        }

        if self.sym_max == 0 || self.joint_sym_max == 0 {
            return Err(cfg("sym_max and joint_sym_max must be >= 1".into()));
        }
        for (name, c) in [("niederreiter_c", self.niederreiter_c), ("error_scale_c", self.error_scale_c)] {
            if !(c.is_finite() && c > 0.0) {
                return Err(cfg(format!("{name} must be positive")));
            }
        }
        if self.grid_resolution == 0 {
            return Err(cfg("grid_resolution must be >= 1".into()));
        }
        if let Some(b) = self.b_override {
            if !(b.is_finite() && b >= 0.0) {
                return Err(cfg("b_override must be >= 0".into()));
            }
        }
        if let Some(dd) = self.disc_degree {
            if !(dd.is_finite() && dd >= 0.0) {
                return Err(cfg("disc_degree must be >= 0".into()));
            }
        }
        if self.workers == Some(0) {
            return Err(cfg("workers must be >= 1".into()));
        }

        Ok(Experiment { config: self.clone(), field, params, moduli, short_intervals, intervals, boxes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"field": {"p": 5}, "a": "0-1/1", "degrees": [2, 4]}"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!((c.field.e, c.sym_max, c.joint_sym_max, c.grid_resolution), (1, 10, 4, 16));
        let x = c.validate().unwrap();
        assert_eq!(x.params.len(), 1);
        assert_eq!(x.field.q(), 5);
    }

    #[test]
    fn unknown_fields_are_config_errors() {
        let err = ExperimentConfig::from_json(r#"{"field": {"p": 5}, "a": "0-1/1", "degrees": [2], "colour": 1}"#);
        assert!(matches!(err, Err(CliError::Config(_))));
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let bad = [
            r#"{"field": {"p": 6}, "a": "0-1/1", "degrees": [2]}"#,
            r#"{"field": {"p": 5}, "a": "3/1", "degrees": [2]}"#,
            r#"{"field": {"p": 5}, "a": "0-1/1", "degrees": [0]}"#,
            r#"{"field": {"p": 5}, "a": "0-1/1", "degrees": [12]}"#,
            r#"{"field": {"p": 5}, "a": "0-1/1", "degrees": [2], "intervals": [[2.0, 1.0]]}"#,
            r#"{"field": {"p": 5}, "a": ["0-1/1", "1-1/1"], "degrees": [2], "boxes": [[[0.0, 1.0]]]}"#,
            r#"{"field": {"p": 5}, "a": "0-1/1", "degrees": [2], "short_intervals": ["A=0-0-1;h=2"]}"#,
            r#"{"field": {"p": 5}, "a": "0-1/1", "degrees": [2], "workers": 0}"#,
        ];
        for text in bad {
            let r = ExperimentConfig::from_json(text).and_then(|c| c.validate().map(|_| ()));
            assert!(matches!(r, Err(CliError::Config(_))), "{text}");
        }
    }

    #[test]
    fn canonical_json_ignores_workers_and_cache() {
        let a = ExperimentConfig::from_json(MINIMAL).unwrap();
        let mut b = a.clone();
        b.workers = Some(8);
        b.cache_dir = Some("/tmp/x".into());
        assert_eq!(a.canonical_json(), b.canonical_json());
        let again = ExperimentConfig::from_json(&a.canonical_json()).unwrap();
        assert_eq!(again, a);
    }
}
