//! Command implementations. Each command returns a report plus an exit
//! class; the binary maps exit classes to process codes (0 success,
//! 2 validation failure, 3 bound/consistency violation, 4 numerical
//! non-convergence).

use crate::context::Context;
use crate::report::{mat_to_json, vec_to_json, Report};
use crate::scenario::{FocusingSpec, ScenarioFile};
use redukit_core::bounds::{
    compute_constant, condition_star, reduce_omega, BoundCertificate, CoefficientSpace, OmegaSet,
};
use redukit_core::focusing::{focusing_harness, BVerdict, ExpFamily, FamilyFactor};
use redukit_core::liealg::{killing_form, killing_invariance_residual};
use redukit_core::numerics::{comm as bracket, mat_from_rm, rank_basis, vec_rm, Mat, Vector};
use redukit_core::reductive_pair::{mostow_factor, mostow_jacobian_min_sv};
use redukit_core::Error as CoreError;
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Ok,
    ValidationFailed,
    BoundViolated,
    NoConvergence,
}

impl ExitClass {
    pub fn code(self) -> i32 {
        match self {
            ExitClass::Ok => 0,
            ExitClass::ValidationFailed => 2,
            ExitClass::BoundViolated => 3,
            ExitClass::NoConvergence => 4,
        }
    }
}

pub fn classify_core_error(e: &CoreError) -> ExitClass {
    match e {
        CoreError::NoConvergence { .. } | CoreError::OptimizationStalled { .. } => {
            ExitClass::NoConvergence
        }
        _ => ExitClass::ValidationFailed,
    }
}

/// The residual suite behind `check`: structural identities of the loaded
/// data plus the nine compatibility statements tying the involution, the
/// splitting, the representation, and the isotypic projector together.
pub fn remark_suite(ctx: &Context) -> Vec<(String, f64)> {
    let alg = &ctx.alg;
    let rep = &ctx.rep;
    let cs = &ctx.cartan;
    let pair = &ctx.pair;
    let q = &ctx.q;
    let comm = &ctx.comm;
    let d = alg.dim();
    let m = rep.dim_v();
    let mut out: Vec<(String, f64)> = Vec::new();

    // 1. k, h, z_g stable under the involution
    let r1 = redukit_core::cartan::theta_stability_residual(cs, cs.k.coeffs())
        .max(redukit_core::cartan::theta_stability_residual(cs, pair.h.coeffs()))
        .max(redukit_core::cartan::theta_stability_residual(cs, pair.z_g.coeffs()));
    out.push(("1 involution stability of k, h, z_g".into(), r1));

    // 2. orthocomplements agree for both forms and are supplementary
    let mut r2 = 0.0_f64;
    for coeffs in [cs.k.coeffs(), pair.h.coeffs(), pair.z_g.coeffs()] {
        let ob = redukit_core::cartan::form_orthocomplement(&cs.killing, coeffs, d);
        let obt = redukit_core::cartan::form_orthocomplement(&cs.b_theta, coeffs, d);
        r2 = r2.max(mutual_span_residual(&ob, &obt));
        let mut all: Vec<Vector> = coeffs.to_vec();
        all.extend(ob.iter().cloned());
        let (rank, _) = rank_basis(&all, ctx.tolerances.rank);
        if rank != d {
            r2 = r2.max(1.0);
        }
    }
    out.push(("2 orthocomplement agreement and supplementarity".into(), r2));

    // 3. z_g_perp invariant under the adjoint action of h
    let zperp_span = redukit_core::numerics::orthonormal_span(&pair.z_g_perp, 1e-12);
    let mut r3 = 0.0_f64;
    for hc in pair.h.coeffs() {
        let ad_h = alg.ad_of(hc);
        for w in &pair.z_g_perp {
            let moved = &ad_h * w;
            if moved.norm() > 1e-13 {
                r3 = r3.max(redukit_core::numerics::containment_residual(&zperp_span, &moved));
            }
        }
    }
    out.push(("3 adjoint stability of the centralizer complement".into(), r3));

    // 4. drho intertwines the involutions
    let mut r4 = 0.0_f64;
    for i in 0..d {
        let mut unit = Vector::zeros(d);
        unit[i] = 1.0;
        let lhs = rep.apply(&cs.apply(&unit));
        let rhs = q.theta_v(&rep.apply(&unit));
        r4 = r4.max((lhs - &rhs).norm() / (1.0 + rhs.norm()));
    }
    out.push(("4 drho intertwines the involutions".into(), r4));

    // 5. the trace-orthogonal complement of z is stable under conjugation
    let mut r5 = 0.0_f64;
    for hc in pair.h.coeffs() {
        let a = rep.apply(hc);
        for b in 0..m * m {
            let mut e_b = Vector::zeros(m * m);
            e_b[b] = 1.0;
            let probe = mat_from_rm(m, m, &e_b);
            let off = &probe - comm.project(&probe);
            let moved = bracket(&a, &off);
            r5 = r5.max(comm.project(&moved).norm() / (1.0 + moved.norm()));
        }
    }
    out.push(("5 conjugation stability of the complement of z".into(), r5));

    // 6. drho maps z_g into z and z_g_perp into the complement
    let mut r6 = 0.0_f64;
    for zc in pair.z_g.coeffs() {
        let img = rep.apply(zc);
        r6 = r6.max((&img - comm.project(&img)).norm() / (1.0 + img.norm()));
    }
    for w in &pair.z_g_perp {
        let img = rep.apply(w);
        r6 = r6.max(comm.project(&img).norm() / (1.0 + img.norm()));
    }
    out.push(("6 drho respects the centralizer split".into(), r6));

    // 7. theta_V stability of drho(k), drho(z_g), drho(h), z, z_perp
    let mut r7 = 0.0_f64;
    for coeffs in [cs.k.coeffs(), pair.z_g.coeffs(), pair.h.coeffs()] {
        let images: Vec<Vector> = coeffs.iter().map(|c| vec_rm(&rep.apply(c))).collect();
        if images.is_empty() {
            continue;
        }
        let span = redukit_core::numerics::orthonormal_span(&images, 1e-12);
        for c in coeffs {
            let moved = vec_rm(&q.theta_v(&rep.apply(c)));
            if moved.norm() > 1e-13 {
                r7 = r7.max(redukit_core::numerics::containment_residual(&span, &moved));
            }
        }
    }
    for z in comm.z_basis() {
        let moved = q.theta_v(z);
        r7 = r7.max((&moved - comm.project(&moved)).norm() / (1.0 + moved.norm()));
    }
    for b in 0..m * m {
        let mut e_b = Vector::zeros(m * m);
        e_b[b] = 1.0;
        let probe = mat_from_rm(m, m, &e_b);
        let off = &probe - comm.project(&probe);
        let moved = q.theta_v(&off);
        r7 = r7.max(comm.project(&moved).norm() / (1.0 + moved.norm()));
    }
    out.push(("7 involution stability of the image subspaces".into(), r7));

    // 8. the projector commutes with theta_V and preserves self-adjointness
    let mut r8 = 0.0_f64;
    for b in 0..m * m {
        let mut e_b = Vector::zeros(m * m);
        e_b[b] = 1.0;
        let probe = mat_from_rm(m, m, &e_b);
        let lhs = comm.project(&q.theta_v(&probe));
        let rhs = q.theta_v(&comm.project(&probe));
        r8 = r8.max((lhs - &rhs).norm() / (1.0 + rhs.norm()));
        let sym_probe = (&probe + q.adjoint(&probe)) * 0.5;
        r8 = r8.max(q.self_adjoint_residual(&comm.project(&sym_probe)));
    }
    out.push(("8 projector compatibility with the involution".into(), r8));

    // 9. drho sends k_perp to self-adjoint operators
    let mut r9 = 0.0_f64;
    for w in &cs.k_perp {
        r9 = r9.max(q.self_adjoint_residual(&rep.apply(w)));
    }
    out.push(("9 self-adjointness of the symmetric directions".into(), r9));

    out
}

fn mutual_span_residual(a: &[Vector], b: &[Vector]) -> f64 {
    if a.len() != b.len() {
        return 1.0;
    }
    let qa = redukit_core::numerics::orthonormal_span(a, 1e-12);
    let qb = redukit_core::numerics::orthonormal_span(b, 1e-12);
    let mut worst = 0.0_f64;
    for v in a {
        worst = worst.max(redukit_core::numerics::containment_residual(&qb, v));
    }
    for v in b {
        worst = worst.max(redukit_core::numerics::containment_residual(&qa, v));
    }
    worst
}

/// Structural residuals reported alongside the suite.
fn structural_residuals(ctx: &Context) -> Vec<(String, f64)> {
    let b = killing_form(&ctx.alg);
    vec![
        ("jacobi identity".into(), ctx.alg.jacobi_residual()),
        (
            "killing invariance".into(),
            killing_invariance_residual(&ctx.alg, &b),
        ),
        (
            "representation property".into(),
            ctx.rep.homomorphism_residual(&ctx.alg),
        ),
        (
            "subalgebra closure".into(),
            ctx.h.closure_residual(&ctx.alg),
        ),
        (
            "centralizer commutation".into(),
            ctx.pair.centralizer_commutation_residual(&ctx.alg),
        ),
        (
            "transversal orthogonality".into(),
            ctx.pair.p_orthogonality_residual(),
        ),
        (
            "adapted product adjunction".into(),
            redukit_core::cartan::adjunction_residual(&ctx.alg, &ctx.cartan, &ctx.rep, &ctx.q),
        ),
        (
            "projector idempotency".into(),
            ctx.comm.idempotency_residual(),
        ),
    ]
}

const REMARK_THRESHOLD: f64 = 1e-8;

pub fn cmd_check(ctx: &Context) -> (Report, ExitClass) {
    let structural = structural_residuals(ctx);
    let suite = remark_suite(ctx);
    let worst = suite.iter().map(|&(_, r)| r).fold(0.0_f64, f64::max);
    let pass = worst <= REMARK_THRESHOLD
        && structural.iter().all(|&(_, r)| r <= REMARK_THRESHOLD);
    let results = json!({
        "dimensions": {
            "algebra": ctx.alg.dim(),
            "ambient": ctx.alg.ambient_dim(),
            "subalgebra": ctx.h.dim(),
            "representation": ctx.rep.dim_v(),
            "centralizer": ctx.pair.z_g.dim(),
            "k": ctx.cartan.k.dim(),
            "p": ctx.pair.p.len(),
            "kperp_cap_zg": ctx.pair.kperp_cap_zg.len(),
            "commutant": ctx.comm.dim(),
            "omega": ctx.omega.len(),
        },
        "structural": residuals_json(&structural),
        "remark_suite": residuals_json(&suite),
        "threshold": REMARK_THRESHOLD,
        "pass": pass,
    });
    let report = Report::new(&ctx.name, "check", ctx.seed, results);
    let class = if pass {
        ExitClass::Ok
    } else {
        ExitClass::ValidationFailed
    };
    (report, class)
}

fn residuals_json(items: &[(String, f64)]) -> serde_json::Value {
    serde_json::Value::Array(
        items
            .iter()
            .map(|(name, value)| json!({ "name": name, "residual": value }))
            .collect(),
    )
}

/// Shared pipeline: coefficient space, subset reduction, certificate.
pub fn constant_pipeline(
    ctx: &Context,
) -> Result<(CoefficientSpace, OmegaSet, bool, BoundCertificate), CoreError> {
    let tol = ctx.tolerances.rank;
    let count = redukit_core::bounds::default_sample_count(ctx.rep.dim_v());
    let cs = redukit_core::bounds::coefficient_space(
        &ctx.rep, &ctx.h, &ctx.comm, &ctx.omega, ctx.seed, count,
    )?;
    let star_before = condition_star(&cs, &ctx.omega, tol);
    let omega_used = if star_before {
        reduce_omega(&cs, &ctx.omega, tol)?
    } else {
        // Evaluation cannot separate the space on this subset; keep an
        // independent-row subset and let the certificate decide whether the
        // functional stays in range.
        let eval = cs.eval_on(&ctx.omega);
        let rows: Vec<Vector> = (0..eval.nrows()).map(|r| eval.row(r).transpose()).collect();
        let (_, selected) = rank_basis(&rows, tol);
        ctx.omega.subset(&selected)
    };
    let cert = compute_constant(&cs, &omega_used, &ctx.q, tol)?;
    Ok((cs, omega_used, star_before, cert))
}

pub fn cmd_constant(ctx: &Context) -> Result<(Report, ExitClass), CoreError> {
    let (cs, omega_used, star, cert) = constant_pipeline(ctx)?;
    let results = json!({
        "coefficient_space_dim": cs.dim(),
        "basis_index": cs.basis_index.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "omega_total": ctx.omega.len(),
        "omega_used": omega_used.len(),
        "condition_star": star,
        "star_strict_on_subset": cert.star_strict,
        "c_prime": cert.c_prime,
        "c_norm": cert.c_norm,
        "c_eff": cert.c_eff,
        "duality_gap": cert.duality_gap,
        "lp_primal": vec_to_json(&cert.lp_primal),
        "lp_dual": vec_to_json(&cert.lp_dual),
    });
    Ok((
        Report::new(&ctx.name, "constant", ctx.seed, results),
        ExitClass::Ok,
    ))
}

pub fn cmd_verify(ctx: &Context) -> Result<(Report, ExitClass), CoreError> {
    let (cs, omega_used, star, cert) = constant_pipeline(ctx)?;
    let report = redukit_core::bounds::verify_bound_with_slack(
        &ctx.alg,
        &ctx.pair,
        &ctx.rep,
        &ctx.q,
        &cert,
        ctx.sample_count,
        ctx.radius,
        ctx.seed,
        ctx.tolerances.verify,
    );
    let results = json!({
        "coefficient_space_dim": cs.dim(),
        "omega_used": omega_used.len(),
        "condition_star": star,
        "c_prime": cert.c_prime,
        "c_norm": cert.c_norm,
        "c_eff": cert.c_eff,
        "duality_gap": cert.duality_gap,
        "samples": report.samples,
        "radius": ctx.radius,
        "violations": report.violations,
        "min_ratio": report.min_ratio,
        "threshold": report.threshold,
    });
    let class = if report.violations == 0 {
        ExitClass::Ok
    } else {
        ExitClass::BoundViolated
    };
    Ok((Report::new(&ctx.name, "verify", ctx.seed, results), class))
}

/// Elements to factor: explicit row-major matrices and/or seeded random
/// products of exponentials.
pub fn cmd_mostow(
    ctx: &Context,
    elements: &[Mat],
    random: usize,
) -> Result<(Report, ExitClass), CoreError> {
    let mut targets: Vec<(String, Mat)> = elements
        .iter()
        .enumerate()
        .map(|(i, m)| (format!("element[{i}]"), m.clone()))
        .collect();
    for i in 0..random {
        let mut rng = redukit_core::sampling::substream(ctx.seed, 1000 + i as u64);
        let coords =
            redukit_core::sampling::uniform_ball(&mut rng, ctx.alg.dim(), 1.0);
        let g = redukit_core::numerics::expm(&ctx.alg.element(&coords));
        targets.push((format!("random[{i}]"), g));
    }
    if targets.is_empty() {
        return Err(CoreError::InvalidInput(
            "no elements to factor: pass --element or --random".into(),
        ));
    }

    let mut rows = Vec::new();
    let mut class = ExitClass::Ok;
    for (label, g) in &targets {
        match mostow_factor(&ctx.alg, &ctx.pair, g, ctx.tolerances.newton, 80) {
            Ok(coords) => {
                let jac = mostow_jacobian_min_sv(&ctx.alg, &ctx.pair, &coords);
                rows.push(json!({
                    "element": label,
                    "converged": true,
                    "residual": coords.residual,
                    "iterations": coords.iterations,
                    "k_factor": mat_to_json(&coords.k_factor),
                    "p_component": mat_to_json(&coords.p_component),
                    "z_component": mat_to_json(&coords.z_component),
                    "p_coords": vec_to_json(&coords.p_coords),
                    "z_coords": vec_to_json(&coords.z_coords),
                    "jacobian_min_sv": jac,
                }));
            }
            Err(CoreError::NoConvergence {
                iterations,
                residual,
            }) => {
                class = ExitClass::NoConvergence;
                rows.push(json!({
                    "element": label,
                    "converged": false,
                    "residual": residual,
                    "iterations": iterations,
                }));
            }
            Err(other) => return Err(other),
        }
    }
    let results = json!({ "factorizations": rows });
    Ok((Report::new(&ctx.name, "mostow", ctx.seed, results), class))
}

pub fn cmd_focusing(
    ctx: &Context,
    spec: &FocusingSpec,
    v_override: Option<Vector>,
) -> Result<(Report, ExitClass), CoreError> {
    let v = v_override.unwrap_or_else(|| Vector::from_column_slice(&spec.v));
    if v.len() != ctx.rep.dim_v() {
        return Err(CoreError::DimensionMismatch(format!(
            "focusing vector has length {}, representation dimension is {}",
            v.len(),
            ctx.rep.dim_v()
        )));
    }
    let families: Vec<ExpFamily> = spec
        .families
        .iter()
        .map(|f| ExpFamily {
            name: f.name.clone(),
            factors: f
                .factors
                .iter()
                .map(|fac| FamilyFactor {
                    direction: Vector::from_column_slice(&fac.direction),
                    offset: fac.offset,
                    slope: fac.slope,
                })
                .collect(),
        })
        .collect();
    for fam in &families {
        for fac in &fam.factors {
            if fac.direction.len() != ctx.alg.dim() {
                return Err(CoreError::DimensionMismatch(format!(
                    "family '{}' direction length {} against algebra dim {}",
                    fam.name,
                    fac.direction.len(),
                    ctx.alg.dim()
                )));
            }
        }
    }

    let verdicts = focusing_harness(
        &ctx.alg,
        &ctx.pair,
        &ctx.rep,
        &ctx.q,
        &ctx.omega,
        &v,
        &families,
        &spec.grid,
        spec.threshold_a,
        spec.threshold_b,
        spec.opt_budget,
    )?;

    let mut consistent = true;
    let rows: Vec<serde_json::Value> = verdicts
        .iter()
        .map(|fv| {
            if !fv.b_implies_a_ok || fv.equivalence == Some(false) {
                consistent = false;
            }
            json!({
                "family": fv.name,
                "in_y": fv.in_y,
                "a_holds": fv.a_holds,
                "max_coeff": fv.max_coeff,
                "b": match fv.b {
                    BVerdict::Holds => "holds",
                    BVerdict::Fails => "fails",
                    BVerdict::Inconclusive => "inconclusive",
                },
                "b_profile": fv.b_profile,
                "equivalence": fv.equivalence,
                "b_implies_a": fv.b_implies_a_ok,
            })
        })
        .collect();
    let results = json!({
        "v": vec_to_json(&v),
        "grid": spec.grid,
        "threshold_a": spec.threshold_a,
        "threshold_b": spec.threshold_b,
        "families": rows,
        "consistent": consistent,
    });
    let class = if consistent {
        ExitClass::Ok
    } else {
        ExitClass::BoundViolated
    };
    Ok((Report::new(&ctx.name, "focusing", ctx.seed, results), class))
}

/// Parses a row-major matrix from an inline JSON array.
pub fn parse_element(ctx: &Context, text: &str) -> Result<Mat, String> {
    let flat: Vec<f64> =
        serde_json::from_str(text).map_err(|e| format!("cannot parse --element: {e}"))?;
    let n = ctx.alg.ambient_dim();
    if flat.len() != n * n {
        return Err(format!(
            "--element needs {} entries for a {n}x{n} matrix, found {}",
            n * n,
            flat.len()
        ));
    }
    Ok(Mat::from_row_slice(n, n, &flat))
}

/// Scenario-level entry point used by the binary and the test suites.
pub fn run_command(
    file: &ScenarioFile,
    command: &str,
    seed_override: Option<u64>,
    mostow_elements: &[String],
    mostow_random: usize,
    v_override: Option<Vec<f64>>,
) -> Result<(Report, ExitClass), (String, ExitClass)> {
    let ctx = Context::build(file, seed_override)
        .map_err(|e| (e.to_string(), ExitClass::ValidationFailed))?;
    let handle = |r: Result<(Report, ExitClass), CoreError>| {
        r.map_err(|e| {
            let class = classify_core_error(&e);
            (e.to_string(), class)
        })
    };
    match command {
        "check" => Ok(cmd_check(&ctx)),
        "constant" => handle(cmd_constant(&ctx)),
        "verify" => handle(cmd_verify(&ctx)),
        "mostow" => {
            let elements: Vec<Mat> = mostow_elements
                .iter()
                .map(|t| parse_element(&ctx, t))
                .collect::<Result<_, _>>()
                .map_err(|m| (m, ExitClass::ValidationFailed))?;
            let random = if elements.is_empty() && mostow_random == 0 {
                1
            } else {
                mostow_random
            };
            handle(cmd_mostow(&ctx, &elements, random))
        }
        "focusing" => {
            let spec = file.focusing.clone().ok_or_else(|| {
                (
                    "scenario has no focusing block and none was supplied".to_string(),
                    ExitClass::ValidationFailed,
                )
            })?;
            let v = v_override.map(|v| Vector::from_column_slice(&v));
            handle(cmd_focusing(&ctx, &spec, v))
        }
        other => Err((
            format!("unknown command '{other}'"),
            ExitClass::ValidationFailed,
        )),
    }
}
