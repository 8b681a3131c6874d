//! Builds and validates the full working context from a scenario file:
//! every structural invariant of the inputs is re-checked on load.

use crate::scenario::{HBasisFormat, ScenarioFile, Tolerances};
use redukit_core::bounds::OmegaSet;
use redukit_core::cartan::{
    adapt_inner_product, is_theta_stable, standard_theta, AdaptedInnerProduct, CartanStructure,
};
use redukit_core::liealg::{LieAlgebra, Representation, Subalgebra};
use redukit_core::numerics::{Mat, Vector};
use redukit_core::reductive_pair::{build_pair, commutant, Commutant, ReductivePair};

/// A validation failure with the itemized residuals collected so far.
#[derive(Debug)]
pub struct ValidationError {
    pub message: String,
    pub items: Vec<(String, f64)>,
}

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "scenario validation failed: {}", self.message)?;
        for (name, value) in &self.items {
            writeln!(f, "  {name}: {value:.3e}")?;
        }
        Ok(())
    }
}

/// All derived structures of a loaded scenario.
pub struct Context {
    pub name: String,
    pub alg: LieAlgebra,
    pub h: Subalgebra,
    pub rep: Representation,
    pub cartan: CartanStructure,
    pub pair: ReductivePair,
    pub comm: Commutant,
    pub q: AdaptedInnerProduct,
    pub omega: OmegaSet,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub sample_count: usize,
    pub radius: f64,
}

fn mat_from_flat(n: usize, flat: &[f64], what: &str) -> Result<Mat, ValidationError> {
    if flat.len() != n * n {
        return Err(ValidationError {
            message: format!("{what}: expected {} entries, found {}", n * n, flat.len()),
            items: vec![],
        });
    }
    Ok(Mat::from_row_slice(n, n, flat))
}

fn fail(message: impl Into<String>) -> ValidationError {
    ValidationError {
        message: message.into(),
        items: vec![],
    }
}

impl Context {
    /// Loads every structure, re-checking bracket closure, the
    /// representation property, and stability of the subalgebra under the
    /// involution. `seed_override` takes precedence over the file seed.
    pub fn build(file: &ScenarioFile, seed_override: Option<u64>) -> Result<Self, ValidationError> {
        let mut tolerances = file.tolerances;
        if let Ok(s) = std::env::var("REDUKIT_TOL") {
            tolerances.rank = s
                .parse::<f64>()
                .map_err(|e| fail(format!("REDUKIT_TOL not a number: {e}")))?;
        }
        let tol = tolerances.rank;
        let n = file.ambient_dim;

        let basis = file
            .g_basis
            .iter()
            .enumerate()
            .map(|(i, flat)| mat_from_flat(n, flat, &format!("g_basis[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let alg = LieAlgebra::new(n, basis, tol).map_err(|e| fail(e.to_string()))?;

        let h_coeffs = file
            .h_basis
            .iter()
            .enumerate()
            .map(|(i, entry)| match file.h_basis_format {
                HBasisFormat::Coefficients => {
                    if entry.len() != alg.dim() {
                        Err(fail(format!(
                            "h_basis[{i}]: expected {} coefficients, found {}",
                            alg.dim(),
                            entry.len()
                        )))
                    } else {
                        Ok(Vector::from_column_slice(entry))
                    }
                }
                HBasisFormat::Matrices => {
                    let m = mat_from_flat(n, entry, &format!("h_basis[{i}]"))?;
                    alg.coords_of(&m, tol)
                        .map_err(|e| fail(format!("h_basis[{i}] outside the span: {e}")))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let h = Subalgebra::new(&alg, h_coeffs, tol).map_err(|e| fail(e.to_string()))?;

        if file.rep.drho.len() != alg.dim() {
            return Err(fail(format!(
                "rep.drho has {} entries, algebra dimension is {}",
                file.rep.drho.len(),
                alg.dim()
            )));
        }
        let drho = file
            .rep
            .drho
            .iter()
            .enumerate()
            .map(|(i, flat)| mat_from_flat(file.rep.dim, flat, &format!("rep.drho[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let rep = Representation::new(file.rep.dim, drho).map_err(|e| fail(e.to_string()))?;
        let hom_residual = rep.homomorphism_residual(&alg);
        if hom_residual > 1e-8 {
            return Err(ValidationError {
                message: "drho does not respect the bracket".into(),
                items: vec![("representation property residual".into(), hom_residual)],
            });
        }

        let cartan = standard_theta(&alg).map_err(|e| fail(e.to_string()))?;
        if !is_theta_stable(&cartan, &h, tol) {
            let residual = redukit_core::cartan::theta_stability_residual(&cartan, h.coeffs());
            return Err(ValidationError {
                message: "h is not stable under the involution".into(),
                items: vec![("stability residual".into(), residual)],
            });
        }
        let pair = build_pair(&alg, &h, &cartan, tol).map_err(|e| fail(e.to_string()))?;
        let comm = commutant(&rep, &h, tol).map_err(|e| fail(e.to_string()))?;
        let q = adapt_inner_product(&alg, &cartan, &rep).map_err(|e| fail(e.to_string()))?;

        let omega_specs: Vec<Vec<Vector>> = file
            .omega
            .iter()
            .map(|factors| factors.iter().map(|f| Vector::from_column_slice(f)).collect())
            .collect();
        let omega = OmegaSet::new(&rep, &h, omega_specs).map_err(|e| fail(e.to_string()))?;

        Ok(Context {
            name: file.name.clone(),
            alg,
            h,
            rep,
            cartan,
            pair,
            comm,
            q,
            omega,
            tolerances,
            seed: seed_override.unwrap_or(file.sampling.seed),
            sample_count: file.sampling.count,
            radius: file.sampling.radius,
        })
    }
}
