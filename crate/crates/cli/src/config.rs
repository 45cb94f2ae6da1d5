//! Scenario configuration and `key=value` overrides.

use std::collections::BTreeMap;
use std::path::PathBuf;

use kahlerlab_core::catalog::{boundary_ray, DomainSpec, RaySchedule};
use kahlerlab_core::field::PolyField;
use kahlerlab_core::sampling::sample_interior;
use kahlerlab_core::{Point64, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::checks::Check;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PointSet {
    /// Points given as `[[re, im], …]` per point.
    Explicit { points: Vec<Vec<[f64; 2]>> },
    /// Shifted Halton points with slack above `margin`.
    Sample { count: usize, seed: u64, margin: f64 },
    /// Points toward the boundary along `direction`.
    Ray {
        direction: Vec<[f64; 2]>,
        count: usize,
        delta_min: f64,
    },
}

impl PointSet {
    pub fn seed(&self) -> Option<u64> {
        match self {
            PointSet::Sample { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn resolve(&self, domain: &DomainSpec) -> Result<Vec<Point64>> {
        let pts = match self {
            PointSet::Explicit { points } => points
                .iter()
                .map(|p| Point64::new(p.iter().map(|c| C64::new(c[0], c[1])).collect()))
                .collect::<std::result::Result<Vec<_>, _>>()?,
            PointSet::Sample { count, seed, margin } => sample_interior(domain, *count, *seed, *margin)?,
            PointSet::Ray {
                direction,
                count,
                delta_min,
            } => {
                let dir: Vec<C64> = direction.iter().map(|c| C64::new(c[0], c[1])).collect();
                boundary_ray(
                    domain,
                    &dir,
                    RaySchedule {
                        count: *count,
                        delta_min: *delta_min,
                    },
                )?
            }
        };
        if let Some(p) = pts.iter().find(|p| p.dim() != domain.dim()) {
            return Err(CliError::config(format!(
                "point {:?} has dimension {}, domain {} has {}",
                p.to_f64_pairs(),
                p.dim(),
                domain.label(),
                domain.dim()
            )));
        }
        Ok(pts)
    }
}

/// A holomorphic vector field `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Zero,
    /// `X = i·z`.
    Rotation,
    /// `X = z`.
    Euler,
    /// Coefficients over the monomials of degree ≤ `degree`, component-major.
    Poly {
        degree: usize,
        coeffs: Vec<[f64; 2]>,
    },
    /// Coefficients drawn uniformly from `[−1, 1]²` with a seeded ChaCha8 stream.
    Random {
        degree: usize,
        seed: u64,
    },
}

impl FieldSpec {
    pub fn build(&self, n: usize) -> Result<PolyField<f64>> {
        Ok(match self {
            FieldSpec::Zero => PolyField::zero(n),
            FieldSpec::Rotation => PolyField::rotation(n),
            FieldSpec::Euler => PolyField::euler(n),
            FieldSpec::Poly { degree, coeffs } => {
                let c: Vec<C64> = coeffs.iter().map(|c| C64::new(c[0], c[1])).collect();
                PolyField::from_basis_coeffs(n, *degree, &c)?
            }
            FieldSpec::Random { degree, seed } => {
                let len = n * PolyField::<f64>::monomial_basis(n, *degree).len();
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let c: Vec<C64> = (0..len)
                    .map(|_| C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                    .collect();
                PolyField::from_basis_coeffs(n, *degree, &c)?
            }
        })
    }
}

/// Parameters of the soliton scan over polynomial fields with real
/// coefficients on `grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub degree: usize,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(CliError::config(format!("unknown format {s:?} (json or csv)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub domain: DomainSpec,
    pub points: PointSet,
    pub checks: Vec<String>,
    /// Per-check tolerance; for floor checks, the floor.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub jet_order: usize,
    /// Einstein/soliton constant; defaults to the domain's Einstein constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
    /// Multiplies the catalog potential; the metric scales, Ricci does not.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential_scale: Option<f64>,
    /// Checks listed here pass when the residual is at least the floor.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub floors: BTreeMap<String, f64>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn from_value(v: Value) -> Result<Self> {
        serde_json::from_value(v).map_err(|e| CliError::config(e.to_string()))
    }

    /// Applies `key.path=value` overrides; values parse as JSON, falling back
    /// to a plain string.
    pub fn with_overrides<S: AsRef<str>>(&self, sets: &[S]) -> Result<Self> {
        let mut v = self.to_value();
        for s in sets {
            apply_set(&mut v, s.as_ref())?;
        }
        Self::from_value(v)
    }

    pub fn lambda(&self) -> Option<f64> {
        self.lambda.or_else(|| self.domain.einstein_lambda())
    }

    pub fn parsed_checks(&self) -> Result<Vec<Check>> {
        self.checks.iter().map(|c| c.parse::<Check>()).collect()
    }

    pub fn floor(&self, check: Check) -> Option<f64> {
        self.floors.get(check.name()).copied()
    }

    pub fn tolerance(&self, check: Check) -> f64 {
        self.tolerances
            .get(check.name())
            .copied()
            .unwrap_or(check.default_tolerance())
    }

    /// Every precondition that can be checked without evaluating anything.
    pub fn validate(&self) -> Result<()> {
        self.domain.validate().map_err(|e| CliError::config(e.to_string()))?;
        let checks = self.parsed_checks()?;
        if checks.is_empty() {
            return Err(CliError::config("no checks requested"));
        }
        for name in self.tolerances.keys() {
            if !self.checks.contains(name) {
                return Err(CliError::config(format!(
                    "tolerance given for unrequested check {name:?}"
                )));
            }
        }
        for (name, tol) in &self.tolerances {
            if !(*tol > 0.0 && tol.is_finite()) {
                return Err(CliError::config(format!(
                    "tolerance for {name} must be positive, got {tol}"
                )));
            }
        }
        for (name, floor) in &self.floors {
            if !self.checks.contains(name) {
                return Err(CliError::config(format!("floor given for unrequested check {name:?}")));
            }
            if self.tolerances.contains_key(name) {
                return Err(CliError::config(format!(
                    "check {name} has both a tolerance and a floor"
                )));
            }
            if !(*floor > 0.0 && floor.is_finite()) {
                return Err(CliError::config(format!(
                    "floor for {name} must be positive, got {floor}"
                )));
            }
        }
        if let Some(s) = self.potential_scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(CliError::config(format!("potential_scale must be positive, got {s}")));
            }
        }
        if !(2..=kahlerlab_core::jet::MAX_ORDER).contains(&self.jet_order) {
            return Err(CliError::config(format!(
                "jet_order {} outside [2, {}]",
                self.jet_order,
                kahlerlab_core::jet::MAX_ORDER
            )));
        }
        for c in &checks {
            if self.jet_order < c.min_order() {
                return Err(CliError::config(format!(
                    "check {} needs jet_order >= {}, got {}",
                    c.name(),
                    c.min_order(),
                    self.jet_order
                )));
            }
            c.validate_for(self)?;
        }
        if let Some(f) = &self.field {
            f.build(self.domain.dim())
                .map_err(|e| CliError::config(e.to_string()))?;
        }
        Ok(())
    }
}

fn apply_set(root: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override {assignment:?} is not key=value")))?;
    let parsed = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(CliError::config(format!("empty segment in key {key:?}")));
        }
        let last = i + 1 == parts.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), parsed);
                    return Ok(());
                }
                map.entry(part.to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let k: usize = part
                    .parse()
                    .map_err(|_| CliError::config(format!("{part:?} indexes an array in {key:?}")))?;
                let slot = items
                    .get_mut(k)
                    .ok_or_else(|| CliError::config(format!("index {k} out of range in {key:?}")))?;
                if last {
                    *slot = parsed;
                    return Ok(());
                }
                slot
            }
            Value::Null => {
                *node = Value::Object(Default::default());
                let Value::Object(map) = node else { unreachable!() };
                if last {
                    map.insert(part.to_string(), parsed);
                    return Ok(());
                }
                map.entry(part.to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            _ => return Err(CliError::config(format!("{key:?} descends into a scalar"))),
        };
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ScenarioConfig {
        ScenarioConfig {
            scenario: "t".into(),
            domain: DomainSpec::thullen_gm(2),
            points: PointSet::Sample {
                count: 4,
                seed: 1,
                margin: 1e-3,
            },
            checks: vec!["einstein".into()],
            tolerances: BTreeMap::new(),
            jet_order: 4,
            lambda: Some(-3.0),
            field: None,
            scan: None,
            output: None,
            potential_scale: None,
            floors: BTreeMap::new(),
        }
    }

    #[test]
    fn overrides() {
        let c = base()
            .with_overrides(&[
                "points.count=9",
                "domain.m=3",
                "tolerances.einstein=1e-6",
                "scenario=renamed",
            ])
            .unwrap();
        assert_eq!(
            c.points,
            PointSet::Sample {
                count: 9,
                seed: 1,
                margin: 1e-3
            }
        );
        assert_eq!(c.domain, DomainSpec::thullen_gm(3));
        assert_eq!(c.tolerances["einstein"], 1e-6);
        assert_eq!(c.scenario, "renamed");
        assert!(base().with_overrides(&["points.count"]).is_err());
        assert!(base().with_overrides(&["jet_order.x=1"]).is_err());
        assert!(base().with_overrides(&["bogus=1"]).is_err());
    }

    #[test]
    fn validation() {
        assert!(base().validate().is_ok());
        let mut c = base();
        c.checks = vec!["nope".into()];
        assert!(matches!(c.validate(), Err(CliError::ConfigInvalid(_))));
        let mut c = base();
        c.jet_order = 3;
        assert!(c.validate().is_err());
        let mut c = base();
        c.tolerances.insert("einstein".into(), -1.0);
        assert!(c.validate().is_err());
        let mut c = base();
        c.checks = vec!["soliton".into()];
        c.domain = DomainSpec::thullen_bergman(2);
        c.lambda = None;
        assert!(c.validate().is_err(), "soliton needs a lambda");
        let mut c = base();
        c.floors.insert("einstein".into(), 0.1);
        assert!(c.validate().is_ok());
        c.tolerances.insert("einstein".into(), 0.1);
        assert!(c.validate().is_err());
        let mut c = base();
        c.potential_scale = Some(0.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let c = base();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ScenarioConfig::from_json(&text).unwrap(), c);
    }
}
