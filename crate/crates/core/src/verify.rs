//! Self-verification suite: the invariants of every module, each reported
//! with its residual and tolerance.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{hermitian_eigensystem, random, ComplexMatrix};
use crate::photon::{min_error_state, min_error_table, MinErrorRow};
use crate::rate::{
    envelope_oracle, h12_prime, h12_unchecked, h3_unchecked, hzx_upper, max_second_difference,
    neglect_check_rows, region_bounds, region_dominance, region_map, tangent_envelope, threshold,
    Envelope, Protocol, RegionParams, VERTEX_LOW, VERTEX_RIGHT, VERTEX_TOP,
};
use crate::squash::{construct_squash_y_with, SquashOptions, SquashResult};
use crate::states::{
    basis_projector, simulate_clicks, singlet, threshold_povm, BasisAxis, BitValue, PhotonNumber,
    N_MAX,
};
use crate::symmetry::{
    build_projectors, commutant_defect, enumerate_group, intertwiner_defect, projector_defect,
    verify_linear_forms_with, ErrorModel, Symmetrizer, GROUP_ORDER,
};

pub const DEFAULT_SEED: u64 = 20240601;
/// Six-state threshold quoted in the literature.
pub const REFERENCE_THRESHOLD: f64 = 0.126112;
/// Bit error where h meets the envelope line, as quoted.
pub const NEGLECT_BOUND: f64 = 0.25677;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Photon numbers up to 5, coarser grids, no Monte Carlo.
    Fast,
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Fast => "fast",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fast" => Ok(Suite::Fast),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite '{other}' (expected fast or all)")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub seed: u64,
    /// Adds this amount to one diagonal entry of P0 before the structure
    /// checks. Test hook for the failure path.
    pub projector_perturbation: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            seed: DEFAULT_SEED,
            projector_perturbation: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `residual ≤ tolerance`.
    fn at_most(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self {
            name,
            passed: residual <= tolerance,
            residual,
            tolerance,
        }
    }

    /// Passes when `residual < tolerance`.
    fn below(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self {
            name,
            passed: residual < tolerance,
            residual,
            tolerance,
        }
    }

    fn failed(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            passed: false,
            residual: f64::INFINITY,
            tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub sixstate_threshold: f64,
    pub threshold_deviation: f64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Ctx {
    nmax: usize,
    rng: ChaCha8Rng,
    seed: u64,
    suite: Suite,
}

fn povm_checks(ctx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    let mut completeness = 0.0_f64;
    let mut negativity = 0.0_f64;
    for n in 1..=ctx.nmax {
        let n = PhotonNumber::new(n)?;
        let id = ComplexMatrix::identity(n.bob_dim());
        for axis in BasisAxis::ALL {
            let plus = threshold_povm(axis, BitValue::Plus, n);
            let minus = threshold_povm(axis, BitValue::Minus, n);
            completeness = completeness.max((&plus + &minus).max_abs_diff(&id));
            for m in [&plus, &minus] {
                negativity = negativity.max(-hermitian_eigensystem(m)?.min());
            }
        }
    }
    out.push(Check::at_most("povm_completeness", completeness, 1e-12));
    out.push(Check::at_most("povm_positivity", negativity.max(0.0), 1e-9));
    Ok(())
}

fn symmetry_checks(ctx: &mut Ctx, perturb: Option<f64>, out: &mut Vec<Check>) -> Result<()> {
    let group = enumerate_group()?;
    out.push(Check::at_most(
        "group_closure_24",
        (group.len() as f64 - GROUP_ORDER as f64).abs(),
        0.0,
    ));

    let mut projectors = build_projectors();
    if let Some(eps) = perturb {
        projectors.p0[(0, 0)].re += eps;
    }
    out.push(Check::at_most("projector_structure", projector_defect(&projectors), 1e-10));

    let sym = Symmetrizer::with_projectors(projectors)?;
    out.push(Check::at_most("projector_commutant", commutant_defect(&sym), 1e-10));
    let probes: Vec<ComplexMatrix> = (0..3).map(|_| random::matrix(16, 16, &mut ctx.rng)).collect();
    out.push(Check::at_most("block_intertwiners", intertwiner_defect(&sym, &probes), 1e-10));

    let samples = if ctx.suite == Suite::All { 50 } else { 10 };
    let mut fit = 0.0_f64;
    let mut idem = 0.0_f64;
    let mut trace = 0.0_f64;
    for _ in 0..samples {
        let rho = random::density(16, &mut ctx.rng);
        let w = sym.twirl(&rho)?;
        fit = fit.max(sym.fit_residual(&w));
        idem = idem.max(sym.twirl(&w)?.max_abs_diff(&w));
        trace = trace.max((w.trace().re - 1.0).abs());
    }
    out.push(Check::at_most("twirl_block_fit", fit, 1e-10));
    out.push(Check::at_most("twirl_idempotence", idem, 1e-10));
    out.push(Check::at_most("twirl_trace", trace, 1e-12));
    Ok(())
}

fn squash_checks(ctx: &Ctx, out: &mut Vec<Check>) -> Result<SquashResult> {
    let sq = construct_squash_y_with(&SquashOptions {
        seed: Some(ctx.seed),
    })?;
    out.push(Check::at_most("squash_choi_psd", (-sq.choi_min_eig).max(0.0), 1e-9));
    out.push(Check::at_most("squash_trace_targets", sq.constraint_residual, 1e-9));
    let n3 = PhotonNumber::new(3)?;
    let mut povm = 0.0_f64;
    for axis in [BasisAxis::X, BasisAxis::Z] {
        for bit in BitValue::ALL {
            let got = sq.apply(&basis_projector(axis, bit));
            povm = povm.max(got.max_abs_diff(&threshold_povm(axis, bit, n3)));
        }
    }
    out.push(Check::at_most("squash_reproduces_povm", povm, 1e-9));
    let unital = sq
        .apply(&ComplexMatrix::identity(2))
        .max_abs_diff(&ComplexMatrix::identity(8));
    out.push(Check::at_most("squash_unital", unital, 1e-12));
    Ok(sq)
}

fn region_checks(sq: &SquashResult, out: &mut Vec<Check>) -> Result<ErrorModel> {
    let projectors = Arc::new(build_projectors());
    let forms = verify_linear_forms_with(&projectors, sq);
    out.push(Check::at_most("linear_forms", forms.max_deviation, 1e-9));

    let model = ErrorModel::with_projectors(projectors, sq);
    let mut vertex = 0.0_f64;
    for ((u, t, s), want) in [
        ((1.0, 1.0, -1.0), VERTEX_LOW),
        ((1.0, 1.0, 1.0), VERTEX_TOP),
        ((1.0, 0.0, 0.0), VERTEX_RIGHT),
    ] {
        let pt = region_map(&RegionParams::new(u, t, s)?, &model)?;
        vertex = vertex.max((pt.e_b - want.e_b).abs()).max((pt.e_y - want.e_y).abs());
    }
    out.push(Check::at_most("triangle_vertices", vertex, 1e-12));
    Ok(model)
}

fn entropy_checks(env: &Envelope, out: &mut Vec<Check>) -> Result<()> {
    let diag = (1..500)
        .map(|i| {
            let e = i as f64 * 1e-3;
            (h3_unchecked(e, e) - h12_unchecked(e)).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::at_most("diagonal_h3_equals_h12", diag, 1e-12));

    out.push(Check::at_most(
        "h12_concavity",
        max_second_difference(h12_unchecked, 0.0, 0.5, 1e-3).max(0.0),
        1e-12,
    ));
    let mut h3_col = 0.0_f64;
    for i in 1..50 {
        let e_b = 0.25 + i as f64 * 0.01;
        let (lo, hi) = region_bounds(e_b)?;
        let step = (hi - lo) / 100.0;
        if step > 0.0 {
            h3_col = h3_col.max(max_second_difference(|y| h3_unchecked(e_b, y), lo, hi, step));
        }
    }
    out.push(Check::at_most("h3_concavity_in_ey", h3_col.max(0.0), 1e-12));
    let upper = max_second_difference(|e| hzx_upper(e, env).unwrap_or(f64::NAN), 0.0, 0.25, 1e-4);
    out.push(Check::at_most("envelope_concavity", upper.max(0.0), 1e-9));

    let tangency = (h12_unchecked(env.e_d) - env.line(env.e_d))
        .abs()
        .max((h12_prime(env.e_d) - env.slope).abs())
        .max((env.line(0.25) - env.v3).abs());
    out.push(Check::at_most("envelope_tangency", tangency, 1e-8));
    Ok(())
}

fn threshold_checks(out: &mut Vec<Check>) -> Result<f64> {
    let six = threshold(Protocol::SixstateThreshold)?;
    let qubit = threshold(Protocol::SixstateQubit)?;
    let bb84 = threshold(Protocol::Bb84)?;
    out.push(Check::at_most("threshold_sixstate", (six - REFERENCE_THRESHOLD).abs(), 5e-6));
    // BB84 < threshold-detector six-state < qubit six-state
    let order = (bb84 - six).max(six - qubit);
    out.push(Check::below("threshold_ordering", order, 0.0));
    Ok(six)
}

fn photon_checks(ctx: &Ctx, out: &mut Vec<Check>) -> Result<Vec<MinErrorRow>> {
    let rows = min_error_table(PhotonNumber::new(ctx.nmax)?)?;
    let n1 = PhotonNumber::new(1)?;
    out.push(Check::at_most("singlet_zero_error", rows[0].min_e_b.abs(), 1e-12));
    let fid = min_error_state(n1)?.fidelity(&singlet());
    out.push(Check::at_most("singlet_minimizer", 1.0 - fid, 1e-9));
    out.push(Check::at_most(
        "three_photon_min_error",
        (rows[2].min_e_b - 0.25).abs(),
        1e-9,
    ));
    let agreement = rows.iter().map(MinErrorRow::agreement).fold(0.0, f64::max);
    out.push(Check::at_most("min_error_reduced_space", agreement, 1e-10));
    let lowest = rows
        .iter()
        .filter(|r| r.n.get() >= 4)
        .map(|r| r.min_e_b)
        .fold(f64::INFINITY, f64::min);
    // strictly above the bound
    out.push(Check::below("min_error_exceeds_bound", NEGLECT_BOUND - lowest, 0.0));
    Ok(rows)
}

fn envelope_checks(
    ctx: &Ctx,
    env: &Envelope,
    model: &ErrorModel,
    rows: &[MinErrorRow],
    out: &mut Vec<Check>,
) -> Result<()> {
    match neglect_check_rows(rows, env) {
        Ok(rep) => {
            let margin = rep.rows.iter().map(|r| r.line_margin).fold(f64::INFINITY, f64::min);
            // residual is minus the smallest gap between the line and h
            out.push(Check::at_most("neglect_rule", -margin, 0.0));
        }
        Err(_) => out.push(Check::failed("neglect_rule", 0.0)),
    }

    let grid = if ctx.suite == Suite::All { 200 } else { 60 };
    let dom = region_dominance(grid, env, model)?;
    out.push(Check::at_most("region_dominance", dom.max_excess.max(0.0), 1e-6));
    out.push(Check::below("near_equality_at_vertex", dom.near_equality_radius, 0.01));

    let floor = rows
        .iter()
        .filter(|r| r.n.get() >= 4)
        .map(|r| r.min_e_b)
        .fold(f64::INFINITY, f64::min);
    let hull = envelope_oracle(1e-4, floor.min(1.0))?;
    let mut gap = 0.0_f64;
    for i in 0..=2500 {
        let e = i as f64 * 1e-4;
        let v = hull.value_at(e).unwrap_or(f64::NAN);
        gap = gap.max((v - hzx_upper(e, env)?).abs());
    }
    out.push(Check::at_most("oracle_envelope", gap, 1e-4));
    Ok(())
}

fn monte_carlo_checks(ctx: &mut Ctx, out: &mut Vec<Check>) -> Result<()> {
    let trials = 100_000;
    let mut worst = 0.0_f64;
    for n in 1..=3 {
        let n = PhotonNumber::new(n)?;
        let rho = random::density(n.bob_dim(), &mut ctx.rng);
        for (k, axis) in BasisAxis::ALL.into_iter().enumerate() {
            let rec = simulate_clicks(&rho, axis, n, trials, ctx.seed.wrapping_add(k as u64))?;
            let sigma = rec.sigma().max(1e-12);
            worst = worst.max((rec.frequency(BitValue::Plus) - rec.p_plus).abs() / sigma);
        }
    }
    out.push(Check::at_most("monte_carlo_clicks_sigma", worst, 4.0));
    Ok(())
}

pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut ctx = Ctx {
        nmax: if opts.suite == Suite::All { N_MAX } else { 5 },
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
        seed: opts.seed,
        suite: opts.suite,
    };
    let mut checks = Vec::new();
    povm_checks(&ctx, &mut checks)?;
    symmetry_checks(&mut ctx, opts.projector_perturbation, &mut checks)?;
    let sq = squash_checks(&ctx, &mut checks)?;
    let model = region_checks(&sq, &mut checks)?;
    let env = tangent_envelope()?;
    entropy_checks(&env, &mut checks)?;
    let six = threshold_checks(&mut checks)?;
    let rows = photon_checks(&ctx, &mut checks)?;
    envelope_checks(&ctx, &env, &model, &rows, &mut checks)?;
    if opts.suite == Suite::All {
        monte_carlo_checks(&mut ctx, &mut checks)?;
    }
    Ok(VerifyReport {
        suite: opts.suite,
        seed: opts.seed,
        passed: checks.iter().all(|c| c.passed),
        sixstate_threshold: six,
        threshold_deviation: six - REFERENCE_THRESHOLD,
        checks,
    })
}
