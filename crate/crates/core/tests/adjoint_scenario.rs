//! Full-pipeline run on a configuration with a non-Euclidean adapted inner
//! product: sl(2,R) with its diagonal torus acting through the adjoint
//! representation. The adapted Gram is proportional to diag(8, 4, 4), so
//! every Q-whitened code path (operator norms, unit spheres, self-adjoint
//! spectra) is exercised away from the identity.

use redukit_core::bounds::{
    coefficient_space, compute_constant, condition_star, expansion_check, reduce_omega,
    verify_bound, OmegaSet,
};
use redukit_core::cartan::{adapt_inner_product, standard_theta};
use redukit_core::liealg::adjoint_rep;
use redukit_core::numerics::Vector;
use redukit_core::presets;
use redukit_core::reductive_pair::{build_pair, commutant};
use redukit_core::sampling;

#[test]
fn adjoint_representation_pipeline() {
    let alg = presets::sl2_algebra();
    let h = presets::sl2_torus(&alg);
    let rep = adjoint_rep(&alg);
    let cs = standard_theta(&alg).unwrap();
    let pair = build_pair(&alg, &h, &cs, 1e-9).unwrap();
    let comm = commutant(&rep, &h, 1e-9).unwrap();
    let q = adapt_inner_product(&alg, &cs, &rep).unwrap();

    // the adapted Gram is the positive form's matrix, trace-normalized
    let mut expect = cs.b_theta.gram.clone();
    expect *= 3.0 / expect.trace();
    assert!((q.q.clone() - expect).norm() < 1e-9);

    // commutant of a regular diagonal action is the full diagonal
    assert_eq!(comm.dim(), 3);

    // torus weights on the adjoint space are {0, +-2, +-4}: five
    // independent coefficient functions, separated by five grid points
    let specs: Vec<Vec<Vector>> = [-2.0, -1.0, 0.0, 1.0, 2.0]
        .iter()
        .map(|&t| vec![Vector::from_column_slice(&[t])])
        .collect();
    let omega = OmegaSet::new(&rep, &h, specs).unwrap();
    let space = coefficient_space(&rep, &h, &comm, &omega, 42, 128).unwrap();
    assert_eq!(space.dim(), 5);
    assert!(condition_star(&space, &omega, 1e-9));

    let reduced = reduce_omega(&space, &omega, 1e-9).unwrap();
    assert_eq!(reduced.len(), 5);

    let cert = compute_constant(&space, &reduced, &q, 1e-9).unwrap();
    assert!(cert.c_prime >= 1.0 - 1e-9);
    assert!(cert.duality_gap <= 1e-8);
    assert!(cert.c_eff > 0.0);

    // projected exponentials of transversal directions expand in this
    // inner product as well
    let mut rng = sampling::substream(5, 5);
    for _ in 0..200 {
        let coords = sampling::uniform_ball(&mut rng, pair.p.len(), 3.0);
        let p = pair.p_element(&alg, &coords);
        let (_, min) = expansion_check(&alg, &pair, &rep, &comm, &q, &p, 1e-9).unwrap();
        assert!(min >= 1.0 - 1e-8, "minimal eigenvalue {min}");
    }

    // and the sampled lower bound holds across the transversal set
    let report = verify_bound(&alg, &pair, &rep, &q, &cert, 2000, 3.0, 42);
    assert_eq!(report.violations, 0);
    assert!(report.min_ratio >= report.threshold);
}
