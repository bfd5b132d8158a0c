//! Named verification suites. Each suite is a list of pass/fail checks
//! with the measured value and its tolerance.

use qproj::constraint::{box_study, quartic_constraint, refinement_study, SnapPolicy};
use qproj::elevation::{
    factorization_residual, factorization_residual_dense, periodic_momentum, pi_sector_kernel,
    propagator_factorization, random_sector_points, rank_one_report, sector_grid, sector_observable_discrepancy,
    SectorPoint,
};
use qproj::operator::spectral_norm;
use qproj::projector::{
    averaged_projector, averaged_projector_by_group_quadrature, bound_sweep, spectral_projector,
};
use qproj::quadrature::loglog_slope;
use qproj::reparam::{
    correction_study, extended_kernel, gram_matrix, propagation_residual, random_phase_points, reduced_closed_form,
    reduced_kernel, sharp_q_closed_form, sharp_q_propagator, ExtendedMode, GramKernel, PropagatorMode, ReducedMode,
};
use qproj::{eigendecompose, operator_norm, OperatorMatrix, ProjectorScheme, QuadratureSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliResult;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 1729;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Gap,
    Reparam,
    Elevation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `measured <= tolerance`
    AtMost,
    /// `measured >= tolerance`
    AtLeast,
    /// `|measured - target| <= tolerance`
    Within,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: Value,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64, detail: Value) -> Self {
        let passed = measured <= tolerance;
        Self { name: name.into(), measured, relation: Relation::AtMost, target: None, tolerance, passed, detail }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64, detail: Value) -> Self {
        let passed = measured >= tolerance;
        Self { name: name.into(), measured, relation: Relation::AtLeast, target: None, tolerance, passed, detail }
    }

    pub fn within(name: impl Into<String>, measured: f64, target: f64, tolerance: f64, detail: Value) -> Self {
        let passed = (measured - target).abs() <= tolerance;
        Self { name: name.into(), measured, relation: Relation::Within, target: Some(target), tolerance, passed, detail }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

pub fn run(suite: Suite, seed: u64) -> CliResult<SuiteReport> {
    let checks = match suite {
        Suite::Gap => gap_suite()?,
        Suite::Reparam => reparam_suite(seed)?,
        Suite::Elevation => elevation_suite(seed)?,
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport { suite, seed, passed, checks })
}

fn distance(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    spectral_norm(&(a.to_dense().into_owned() - b.to_dense().into_owned()))
}

fn gap_suite() -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();

    let quartic = quartic_constraint(128, SnapPolicy::SnapToLevel(0))?;
    let delta_cap = quartic.gap.delta_cap;
    checks.push(Check::within(
        "quartic_zero_multiplicity",
        quartic.gap.zero_multiplicity as f64,
        1.0,
        0.0,
        json!({ "dim": 128, "c": quartic.c, "Delta": delta_cap, "zero_tolerance": quartic.gap.zero_tolerance }),
    ));

    for r in bound_sweep(&quartic.operator, &[10.0, 100.0, 1000.0, 10000.0], None)? {
        let detail = json!({ "L": r.half_width, "Delta": r.delta_cap, "saturation_ratio": r.saturation_ratio });
        checks.push(Check::at_most(format!("interval_bound_L{}", r.half_width), r.measured_norm, r.bound, detail.clone()));
        checks.push(Check::at_most(
            format!("interval_filter_route_L{}", r.half_width),
            r.route_discrepancy,
            1e-12,
            json!({ "measured_norm": r.measured_norm, "filter_norm": r.filter_norm }),
        ));
    }

    let number = OperatorMatrix::from_diagonal(&(0..32).map(|n| n as f64 - 2.0).collect::<Vec<_>>());
    let haar = ProjectorScheme::Haar { nodes: 64 };
    let e = spectral_projector(&number, 0.0, None)?.matrix;
    let f = averaged_projector(&number, &haar)?.matrix;
    checks.push(Check::at_most("haar_number_operator", distance(&f, &e), 1e-13, json!({ "dim": 32, "nodes": 64 })));
    let g = averaged_projector_by_group_quadrature(&number, &haar, 64)?;
    checks.push(Check::at_most(
        "haar_group_route",
        spectral_norm(&(g - f.to_dense().into_owned())),
        1e-12,
        json!({ "dim": 32, "nodes": 64 }),
    ));

    // sinc average over the snapped quartic spectrum, written as a diagonal
    let values = eigendecompose(&quartic.operator)?.values;
    let diag = OperatorMatrix::from_diagonal(&values);
    let e = spectral_projector(&diag, 0.0, None)?.matrix;
    let mut cutoffs = Vec::new();
    let mut norms = Vec::new();
    for scale in [1e2, 1e3, 1e4] {
        let xi = scale / delta_cap;
        let f = averaged_projector(&diag, &ProjectorScheme::sinc(delta_cap / 2.0, xi))?;
        let diag_info = f.sinc.expect("sinc diagnostics");
        let norm = distance(&f.matrix, &e);
        checks.push(Check::at_most(
            format!("sinc_tail_bound_xi{scale}"),
            norm,
            diag_info.tail_bound + diag_info.quadrature_error,
            json!({ "xi_cutoff": xi, "delta": delta_cap / 2.0, "quadrature_error": diag_info.quadrature_error }),
        ));
        cutoffs.push(xi);
        norms.push(norm);
    }
    let exponent = -loglog_slope(&cutoffs, &norms);
    checks.push(Check::at_least(
        "sinc_decay_exponent",
        exponent,
        0.8,
        json!({ "xi_cutoffs": cutoffs, "norms": norms }),
    ));

    for (name, scheme) in [
        ("interval_group_route", ProjectorScheme::Interval { half_width: 10.0 }),
        ("sinc_group_route", ProjectorScheme::sinc(0.5, 40.0)),
    ] {
        let f = averaged_projector(&number, &scheme)?.matrix;
        let g = averaged_projector_by_group_quadrature(&number, &scheme, 32768)?;
        checks.push(Check::at_most(
            name,
            spectral_norm(&(g - f.to_dense().into_owned())),
            1e-9,
            json!({ "dim": 32, "scheme": scheme }),
        ));
    }

    let study = refinement_study(40.0, &[0.04, 0.02, 0.01, 0.005])?;
    let at_01 = study.reports[2];
    checks.push(Check::at_most(
        "mixed_zero_eigenvalue",
        at_01.eigenvalue.abs(),
        5e-4,
        json!({ "box": [-40.0, 40.0], "h": at_01.grid_spacing, "index": at_01.index }),
    ));
    checks.push(Check::at_least(
        "mixed_zero_mode_overlap",
        at_01.overlap,
        0.999999,
        json!({ "h": at_01.grid_spacing }),
    ));
    checks.push(Check::within(
        "mixed_refinement_order",
        study.slope,
        2.0,
        0.2,
        json!({ "spacings": study.spacings, "eigenvalues": study.reports.iter().map(|r| r.eigenvalue).collect::<Vec<_>>() }),
    ));
    let boxes = box_study(&[40.0, 60.0], 0.01)?;
    checks.push(Check::at_most(
        "mixed_gap_box_stability",
        boxes.relative_spread,
        0.02,
        json!({ "half_widths": boxes.half_widths, "gaps": boxes.gaps, "levels_below_edge": boxes.levels_below_edge }),
    ));
    Ok(checks)
}

fn reparam_suite(seed: u64) -> CliResult<Vec<Check>> {
    let quad = QuadratureSpec::default();
    let mut checks = Vec::new();

    let deltas = [0.2, 0.1, 0.05, 0.025];
    let pts = random_phase_points(10, seed, true);
    for (i, pair) in pts.chunks(2).enumerate() {
        let s = correction_study(&pair[0], &pair[1], &deltas, &quad)?;
        let detail = json!({
            "a": pair[0], "b": pair[1], "deltas": deltas, "absolute": s.absolute,
            "relative": s.relative, "max_error": s.max_error,
        });
        checks.push(Check::within(format!("correction_relative_order_pair{i}"), s.relative_slope, 2.0, 0.2, detail));
        checks.push(Check::at_least(
            format!("correction_absolute_order_pair{i}"),
            s.absolute_slope,
            1.8,
            json!({ "a": pair[0], "b": pair[1] }),
        ));
    }

    let pts = random_phase_points(20, seed.wrapping_add(1), false);
    let mut worst: f64 = 0.0;
    let mut worst_quad: f64 = 0.0;
    for pair in pts.chunks(2) {
        let exact = reduced_closed_form(&pair[0], &pair[1]);
        let limit = reduced_kernel(&pair[0], &pair[1], ReducedMode::DeltaLimit, &quad)?;
        let direct = reduced_kernel(&pair[0], &pair[1], ReducedMode::Quadrature, &quad)?;
        worst = worst.max((limit.value - exact).norm());
        worst_quad = worst_quad.max((direct.value - exact).norm());
    }
    checks.push(Check::at_most("reduction_delta_limit", worst, 1e-6, json!({ "pairs": 10 })));
    checks.push(Check::at_most("reduced_quadrature_route", worst_quad, 1e-10, json!({ "pairs": 10 })));
    let a = pts[0];
    let coincident = reduced_kernel(&a, &a, ReducedMode::DeltaLimit, &quad)?;
    checks.push(Check::within(
        "reduced_coincident_value",
        coincident.value.norm(),
        1.0,
        1e-10,
        json!({ "point": a, "value": [coincident.value.re, coincident.value.im] }),
    ));

    let mut residuals = Vec::new();
    let mut spread: f64 = 0.0;
    for pair in pts.chunks(2).take(5) {
        let r: Vec<f64> = [0.0, 1.0, 7.0]
            .iter()
            .map(|&t| propagation_residual(&pair[0], &pair[1], t, &quad).map(|v| v.value.norm()))
            .collect::<Result<_, _>>()?;
        let hi = r.iter().copied().fold(f64::MIN, f64::max);
        let lo = r.iter().copied().fold(f64::MAX, f64::min);
        spread = spread.max(hi - lo);
        residuals.extend(r);
    }
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    checks.push(Check::at_most("propagation_residual", worst, 1e-8, json!({ "t_mid": [0.0, 1.0, 7.0], "pairs": 5 })));
    checks.push(Check::at_most("propagation_t_mid_spread", spread, 1e-10, json!({ "t_mid": [0.0, 1.0, 7.0] })));

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut worst: f64 = 0.0;
    let mut worst_mod: f64 = 0.0;
    let mut samples = Vec::new();
    for _ in 0..6 {
        let dq: f64 = rng.random_range(-2.0..2.0);
        let dt: f64 = rng.random_range(0.5..2.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let closed = sharp_q_closed_form(dq, dt);
        let quadrature = sharp_q_propagator(dq, 0.0, dt, PropagatorMode::Quadrature, &quad)?;
        worst = worst.max((quadrature.value - closed).norm());
        worst_mod = worst_mod.max((closed.norm() - 1.0 / (std::f64::consts::TAU * dt.abs()).sqrt()).abs());
        samples.push([dq, dt]);
    }
    checks.push(Check::at_most("propagator_quadrature", worst, 1e-6, json!({ "samples": samples })));
    checks.push(Check::at_most("propagator_modulus", worst_mod, 1e-10, json!({ "samples": samples })));

    for n in [8, 16, 32] {
        for (label, kernel, extended) in
            [("extended", GramKernel::Extended { delta: 0.2 }, true), ("reduced", GramKernel::Reduced, false)]
        {
            let points = random_phase_points(n, seed.wrapping_add(3), extended);
            let g = gram_matrix(&points, kernel, &quad)?;
            checks.push(Check::at_least(
                format!("gram_positivity_{label}_{n}"),
                g.min_eigenvalue / g.max_eigenvalue,
                -1e-10,
                json!({ "min_eigenvalue": g.min_eigenvalue, "max_eigenvalue": g.max_eigenvalue, "max_error": g.max_error }),
            ));
        }
    }

    let ext = random_phase_points(2, seed.wrapping_add(4), true);
    let ab = extended_kernel(&ext[0], &ext[1], 0.2, ExtendedMode::Exact, &quad)?;
    let ba = extended_kernel(&ext[1], &ext[0], 0.2, ExtendedMode::Exact, &quad)?;
    checks.push(Check::at_most(
        "extended_hermiticity",
        (ab.value - ba.value.conj()).norm(),
        1e-12,
        json!({ "a": ext[0], "b": ext[1] }),
    ));
    Ok(checks)
}

fn elevation_suite(seed: u64) -> CliResult<Vec<Check>> {
    let quad = QuadratureSpec::default();
    let mut checks = Vec::new();

    let phi = quartic_constraint(64, SnapPolicy::SnapToLevel(0))?.operator;
    let grid = sector_grid(128, 0.2)?;
    let pi_op = periodic_momentum(&grid)?;
    let r = factorization_residual(&phi, &pi_op, 0.2)?;
    checks.push(Check::at_most(
        "projector_factorization",
        r.residual,
        1e-12,
        json!({ "system_dim": r.system_dim, "sector_dim": r.sector_dim, "joint_rank": r.joint_rank, "delta": 0.2 }),
    ));

    // the dense route diagonalizes Phi (x) 1 + mu 1 (x) Pi in one piece, so
    // its roundoff scales with dim * eps * norm
    let small_phi = quartic_constraint(16, SnapPolicy::SnapToLevel(0))?.operator;
    let small_pi = periodic_momentum(&sector_grid(32, 0.4)?)?;
    let dense = factorization_residual_dense(&small_phi, &small_pi, 0.2)?;
    let scale = (dense.system_dim * dense.sector_dim) as f64 * f64::EPSILON * (operator_norm(&small_phi)? + operator_norm(&small_pi)?);
    checks.push(Check::at_most(
        "projector_factorization_dense_route",
        dense.residual,
        scale,
        json!({ "system_dim": dense.system_dim, "sector_dim": dense.sector_dim }),
    ));

    let prop = propagator_factorization(&phi, &grid, 0.2, 1.3, 10, seed)?;
    checks.push(Check::at_most(
        "propagator_factorization",
        prop.max_discrepancy,
        1e-8,
        json!({ "samples": prop.labels.len(), "time": 1.3 }),
    ));

    let points = random_sector_points(8, seed);
    let deltas = [0.2, 0.1, 0.05];
    let report = rank_one_report(&points, &deltas, &quad)?;
    let slope = report.fitted_slope.unwrap_or(f64::NAN);
    checks.push(Check::within(
        "rank_one_collapse_order",
        slope,
        2.0,
        0.3,
        json!({ "deltas": deltas, "sigma_ratio": report.sigma_ratio, "monotone": report.is_monotone() }),
    ));

    let discrepancy = sector_observable_discrepancy(&points, &grid)?;
    checks.push(Check::at_most("sector_grid_observables", discrepancy, 1e-10, json!({ "points": points.len() })));

    let origin = SectorPoint::new(0.0, 0.0);
    let window = pi_sector_kernel(&origin, &origin, 0.1, &quad)?;
    checks.push(Check::within(
        "sector_window_weight",
        window.value.re,
        0.112_462_916_018_284_9,
        1e-12,
        json!({ "delta": 0.1, "estimated_error": window.estimated_error }),
    ));
    Ok(checks)
}
