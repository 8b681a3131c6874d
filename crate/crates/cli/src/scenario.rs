//! Scenario files: JSON descriptions of an algebra, a reductive
//! subalgebra, a representation, a finite subset given as exponential
//! products, and run parameters. Matrices are row-major number arrays so
//! files stay diff-able and language-neutral.

use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub name: String,
    pub ambient_dim: usize,
    /// Basis of the algebra, each entry a row-major n*n array.
    pub g_basis: Vec<Vec<f64>>,
    /// How `h_basis` entries are encoded.
    #[serde(default)]
    pub h_basis_format: HBasisFormat,
    /// Subalgebra basis: coefficient vectors over `g_basis`, or row-major
    /// matrices, per `h_basis_format`.
    pub h_basis: Vec<Vec<f64>>,
    pub rep: RepSpec,
    /// Subset elements: each is an ordered list of factors, each factor a
    /// coefficient vector over `h_basis`; the element is the product of
    /// exponentials of those factors.
    pub omega: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focusing: Option<FocusingSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HBasisFormat {
    #[default]
    Coefficients,
    Matrices,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepSpec {
    pub dim: usize,
    /// One row-major dim*dim matrix per `g_basis` element.
    pub drho: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    pub rank: f64,
    pub newton: f64,
    pub verify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: 1e-9,
            newton: 1e-10,
            verify: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Sampling {
    pub seed: u64,
    pub count: usize,
    pub radius: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            seed: 42,
            count: 10_000,
            radius: 3.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FocusingSpec {
    /// The vector whose orbit is tested, length `rep.dim`.
    pub v: Vec<f64>,
    pub families: Vec<FamilySpec>,
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    #[serde(default = "default_threshold")]
    pub threshold_a: f64,
    #[serde(default = "default_threshold")]
    pub threshold_b: f64,
    #[serde(default = "default_budget")]
    pub opt_budget: usize,
}

fn default_grid() -> Vec<f64> {
    redukit_core::focusing::DEFAULT_GRID.to_vec()
}

fn default_threshold() -> f64 {
    1e6
}

fn default_budget() -> usize {
    redukit_core::focusing::DEFAULT_OPT_BUDGET
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    pub factors: Vec<FactorSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorSpec {
    /// Coefficient vector over `g_basis`.
    pub direction: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
    #[serde(default = "default_slope")]
    pub slope: f64,
}

fn default_slope() -> f64 {
    1.0
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let parsed: ScenarioFile =
            serde_json::from_str(&text).map_err(|e| format!("cannot parse scenario: {e}"))?;
        if parsed.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                parsed.schema_version
            ));
        }
        Ok(parsed)
    }
}
