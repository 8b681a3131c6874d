//! Shared fixtures for the benchmark targets.

use redukit_core::bounds::OmegaSet;
use redukit_core::cartan::{adapt_inner_product, standard_theta, AdaptedInnerProduct};
use redukit_core::liealg::{LieAlgebra, Representation, Subalgebra};
use redukit_core::presets;
use redukit_core::reductive_pair::{build_pair, commutant, Commutant, ReductivePair};

pub struct Fixture {
    pub alg: LieAlgebra,
    pub h: Subalgebra,
    pub rep: Representation,
    pub pair: ReductivePair,
    pub comm: Commutant,
    pub q: AdaptedInnerProduct,
    pub omega: OmegaSet,
}

fn build(
    alg: LieAlgebra,
    h: Subalgebra,
    rep: Representation,
    omega_specs: Vec<Vec<redukit_core::Vector>>,
) -> Fixture {
    let cs = standard_theta(&alg).expect("cartan");
    let pair = build_pair(&alg, &h, &cs, 1e-9).expect("pair");
    let comm = commutant(&rep, &h, 1e-9).expect("commutant");
    let q = adapt_inner_product(&alg, &cs, &rep).expect("adapted product");
    let omega = OmegaSet::new(&rep, &h, omega_specs).expect("omega");
    Fixture {
        alg,
        h,
        rep,
        pair,
        comm,
        q,
        omega,
    }
}

pub fn s1() -> Fixture {
    let alg = presets::sl2_algebra();
    let h = presets::sl2_torus(&alg);
    build(alg, h, presets::sl2_standard_rep(), presets::s1_omega_specs())
}

pub fn s2() -> Fixture {
    let alg = presets::sl3_algebra();
    let h = presets::so3_in_sl3(&alg);
    build(alg, h, presets::sl3_standard_rep(), presets::s2_omega_specs())
}
