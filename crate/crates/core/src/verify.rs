//! Scenario registry and seeded trial runner.
//!
//! Every scenario is a function from a per-trial seed to a list of named
//! checks. A check either compares two values through their ratio (passing
//! when `| |lhs/rhs| - 1 |` is within tolerance) or reports a residual
//! directly. Trials run in parallel but are collected in index order, so a
//! report depends only on the master seed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohomology::{
    bending_cocycle, circle_cohomology, coboundary, h1_basis_rose, is_good, random_good_rep,
    random_representation, relative_dimension, relative_tangent_basis, Cocycle, Representation, SurfaceConfig,
    SurfaceKind, Word,
};
use crate::error::{Error, Result};
use crate::linalg::{c, real, rel_err, subspace_distance, CMatrix, C64};
use crate::mat::{
    companion_section, dsigma, dsigma_central, is_regular, random_group_element_with, random_lie_element_with,
    sigma, standard_frame, GroupElement, LieElement, SigmaVector, REGULAR_TOL,
};
use crate::torsion::{nu_squared_via_torsion, nu_via_sigma, rose_volume_eval, su_nu_check, vandermonde_newton_check, witten_check};
use crate::trace::{
    d_t, d_t_central, f3_quadratic_check, fricke_identity_check, goldman_bracket, scaled_residual, t,
    variation_pairing, FormKey, Genericity, SymplecticKey, MARGIN,
};

pub const DEFAULT_SEED: u64 = 20240501;
pub const THREADS_ENV: &str = "CHARVOL_THREADS";

/// Static description of a registered scenario.
#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    pub default_trials: usize,
    pub tolerance: f64,
    /// Whether the phase of the ratio must be the same in every trial.
    pub constant_sign: bool,
    run: fn(&TrialCtx) -> Result<TrialOutput>,
}

struct TrialCtx {
    trial: usize,
    seed: u64,
    tol: f64,
}

enum Kind {
    Ratio,
    Residual(f64),
}

struct Check {
    name: &'static str,
    lhs: C64,
    rhs: C64,
    kind: Kind,
    tol: f64,
}

#[derive(Default)]
struct TrialOutput {
    checks: Vec<Check>,
    margins: BTreeMap<String, f64>,
}

impl TrialOutput {
    fn ratio(&mut self, name: &'static str, lhs: C64, rhs: C64, tol: f64) {
        self.checks.push(Check {
            name,
            lhs,
            rhs,
            kind: Kind::Ratio,
            tol,
        });
    }

    fn residual(&mut self, name: &'static str, lhs: C64, rhs: C64, residual: f64, tol: f64) {
        self.checks.push(Check {
            name,
            lhs,
            rhs,
            kind: Kind::Residual(residual),
            tol,
        });
    }

    fn margins(&mut self, rho: &Representation, gens: &[Genericity]) -> Result<()> {
        for g in gens {
            self.margins.insert(g.name(), g.value(rho)?.norm());
        }
        Ok(())
    }
}

/// One line of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub scenario: String,
    pub trial: usize,
    pub seed: u64,
    pub check: String,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub ratio: [f64; 2],
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub margins: BTreeMap<String, f64>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub description: String,
    pub tolerance: f64,
    pub master_seed: u64,
    pub trials: usize,
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub max_residual: f64,
    /// Phase of the ratio shared by all trials, when the scenario tracks it.
    pub sign: Option<[f64; 2]>,
    pub sign_constant: Option<bool>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub summary: Summary,
    pub records: Vec<ReportRecord>,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub trials: Option<usize>,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub threads: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            trials: None,
            seed: DEFAULT_SEED,
            tolerance: None,
            threads: None,
        }
    }
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of trial `trial` under `master`.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    splitmix64(master ^ splitmix64(trial as u64))
}

pub fn scenarios() -> &'static [Scenario] {
    &SCENARIOS
}

pub fn scenario_names() -> Vec<&'static str> {
    SCENARIOS.iter().map(|s| s.name).collect()
}

pub fn find_scenario(name: &str) -> Result<&'static Scenario> {
    SCENARIOS.iter().find(|s| s.name == name).ok_or_else(|| Error::UnknownScenario {
        name: name.to_string(),
        registered: scenario_names().join(", "),
    })
}

fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

pub fn run_scenario(name: &str, opts: &RunOptions) -> Result<Report> {
    let sc = find_scenario(name)?;
    let trials = opts.trials.unwrap_or(sc.default_trials);
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let tol = opts.tolerance.unwrap_or(sc.tolerance);
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} is not a non-negative number")));
    }
    let tol_override = opts.tolerance;
    let run_one = |trial: usize| run_trial(sc, opts.seed, trial, tol, tol_override);
    let per_trial: Vec<Vec<ReportRecord>> = match opts.threads.or_else(threads_from_env) {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            pool.install(|| (0..trials).into_par_iter().map(run_one).collect())
        }
        None => (0..trials).into_par_iter().map(run_one).collect(),
    };
    let records: Vec<ReportRecord> = per_trial.into_iter().flatten().collect();
    Ok(Report {
        summary: summarize(sc, opts.seed, trials, tol, &records),
        records,
    })
}

fn run_trial(sc: &Scenario, master: u64, trial: usize, tol: f64, tol_override: Option<f64>) -> Vec<ReportRecord> {
    let seed = trial_seed(master, trial);
    let ctx = TrialCtx { trial, seed, tol };
    match (sc.run)(&ctx) {
        Ok(out) => out
            .checks
            .into_iter()
            .map(|ch| {
                let tol = tol_override.unwrap_or(ch.tol);
                let ratio = if ch.rhs.norm() > 0.0 { ch.lhs / ch.rhs } else { real(f64::NAN) };
                let residual = match ch.kind {
                    Kind::Ratio => (ratio.norm() - 1.0).abs(),
                    Kind::Residual(r) => r,
                };
                let pass = residual.is_finite() && residual <= tol;
                let finite = |z: C64| if z.re.is_finite() && z.im.is_finite() { z } else { real(0.0) };
                ReportRecord {
                    scenario: sc.name.to_string(),
                    trial,
                    seed,
                    check: ch.name.to_string(),
                    lhs: pair(ch.lhs),
                    rhs: pair(ch.rhs),
                    ratio: pair(finite(ratio)),
                    residual: if residual.is_finite() { residual } else { f64::MAX },
                    tolerance: tol,
                    pass,
                    margins: out.margins.clone(),
                    reason: if pass { None } else { Some("outside tolerance".into()) },
                }
            })
            .collect(),
        Err(e) => vec![ReportRecord {
            scenario: sc.name.to_string(),
            trial,
            seed,
            check: "trial".into(),
            lhs: [0.0, 0.0],
            rhs: [0.0, 0.0],
            ratio: [0.0, 0.0],
            residual: f64::MAX,
            tolerance: tol,
            pass: false,
            margins: BTreeMap::new(),
            reason: Some(e.to_string()),
        }],
    }
}

fn summarize(sc: &Scenario, master: u64, trials: usize, tol: f64, records: &[ReportRecord]) -> Summary {
    let passed = records.iter().filter(|r| r.pass).count();
    let failed = records.len() - passed;
    let max_residual = records.iter().map(|r| r.residual).fold(0.0, f64::max);
    let (sign, sign_constant) = if sc.constant_sign {
        let phases: Vec<C64> = records
            .iter()
            .filter(|r| r.pass)
            .map(|r| {
                let z = c(r.ratio[0], r.ratio[1]);
                z / z.norm()
            })
            .collect();
        match phases.first() {
            Some(&p0) => {
                let constant = phases.iter().all(|p| (p - p0).norm() < 1e-3);
                let rounded = c(p0.re.round() + 0.0, p0.im.round() + 0.0);
                let shown = if (rounded - p0).norm() < 1e-3 { rounded } else { p0 };
                (Some(pair(shown)), Some(constant))
            }
            None => (None, Some(false)),
        }
    } else {
        (None, None)
    };
    Summary {
        scenario: sc.name.to_string(),
        description: sc.description.to_string(),
        tolerance: tol,
        master_seed: master,
        trials,
        checks: records.len(),
        passed,
        failed,
        max_residual,
        sign,
        sign_constant,
        pass: failed == 0 && sign_constant.unwrap_or(true),
    }
}

fn sample(n: usize, cfg: &SurfaceConfig, gens: &[Genericity], seed: u64) -> Result<Representation> {
    random_good_rep(n, cfg, gens, MARGIN, seed)
}

fn volume_trial(ctx: &TrialCtx, key: FormKey) -> Result<TrialOutput> {
    let gens = key.genericity();
    let rho = sample(key.n(), &SurfaceConfig::rose(key.k()), &gens, ctx.seed)?;
    let frame = standard_frame(key.n())?;
    let h = h1_basis_rose(&rho)?;
    let lhs = rose_volume_eval(&rho, &h.classes, &frame)?;
    let rhs = crate::trace::coordinate_volume(&rho, key, &h.classes, MARGIN)?.value;
    let mut out = TrialOutput::default();
    out.margins(&rho, &gens)?;
    out.ratio("volume-ratio", lhs, rhs, ctx.tol);
    Ok(out)
}

fn nu_trial(ctx: &TrialCtx) -> Result<TrialOutput> {
    let n = 2 + ctx.trial % 3;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut out = TrialOutput::default();
    for _ in 0..100 {
        let a = random_group_element_with(n, &mut rng)?;
        if !is_regular(&a, REGULAR_TOL)? {
            continue;
        }
        let v = circle_cohomology(&a)?.h1;
        let nu = nu_via_sigma(&a, &v)?;
        let squared = nu_squared_via_torsion(&a, &v)?;
        let lhs = nu * nu;
        out.residual("nu-squared", lhs, squared, rel_err(lhs, squared), ctx.tol);
        return Ok(out);
    }
    Err(Error::RejectionExhausted(100))
}

fn witten_trial(ctx: &TrialCtx, n: usize, kind: SurfaceKind) -> Result<TrialOutput> {
    let cfg = SurfaceConfig::new(kind);
    let gens: Vec<Genericity> = match (kind, n) {
        (SurfaceKind::S11, _) => vec![Genericity::S11Chart],
        (SurfaceKind::S04, _) => vec![Genericity::S04Chart],
        (_, 3) => vec![Genericity::Sl3Commutator(1, 2)],
        _ => vec![],
    };
    let rho = sample(n, &cfg, &gens, ctx.seed)?;
    let value = witten_check(&rho, &cfg, MARGIN)?;
    let mut out = TrialOutput::default();
    out.margins(&rho, &gens)?;
    out.ratio("factorisation-ratio", value.lhs, value.rhs, ctx.tol);
    Ok(out)
}

fn goldman_trial(ctx: &TrialCtx) -> Result<TrialOutput> {
    let mut out = TrialOutput::default();
    let pair_rep = random_representation(2, 2, ctx.seed)?;
    let (a, b) = (pair_rep.generator(0), pair_rep.generator(1));
    let lhs = variation_pairing(a, b)?;
    let rhs = (t(&pair_rep, &Word::from([1, 2]))? - t(&pair_rep, &Word::from([1, -2]))?) / 2.0;
    out.residual("variation-product", lhs, rhs, scaled_residual(lhs, rhs), 1e-10);
    let cfg = SurfaceConfig::new(SurfaceKind::S04);
    let rho = sample(2, &cfg, &[Genericity::S04Chart], ctx.seed)?;
    let bracket = goldman_bracket(&rho, SymplecticKey::S04Sl2)?;
    let diff = t(&rho, &Word::from([1, 2, 2, 3]))? - t(&rho, &Word::from([1, 2, 3, 2]))?;
    let (l, r) = (real(bracket.norm()), real(diff.norm()));
    out.residual("s04-bracket", l, r, rel_err(l, r), ctx.tol);
    let swapped = -goldman_bracket(&swap_s04(&rho)?, SymplecticKey::S04Sl2)?;
    out.margins(&rho, &[Genericity::S04Chart])?;
    out.residual("s04-bracket-orientation", real(bracket.norm()), real(swapped.norm()), rel_err(real(bracket.norm()), real(swapped.norm())), ctx.tol);
    Ok(out)
}

/// The same four-holed sphere with its generators listed in reverse order
/// (inverted), which reverses the orientation of the surface.
fn swap_s04(rho: &Representation) -> Result<Representation> {
    Representation::new(vec![
        rho.generator(2).inverse(),
        rho.generator(1).inverse(),
        rho.generator(0).inverse(),
    ])
}

fn bending_trial(ctx: &TrialCtx) -> Result<TrialOutput> {
    let cfg = SurfaceConfig::new(SurfaceKind::S04);
    let rho = sample(2, &cfg, &[Genericity::S04Chart], ctx.seed)?;
    let lambda = Word::from([1, 2]);
    let mu = Word::from([2, 3]);
    let l = rho.evaluate(&lambda)?;
    let a = LieElement::new((l.matrix() - l.inverse().matrix()) * real(0.5))?;
    let beta = bending_cocycle(&rho, &[3], &a, &lambda)?;
    let mut out = TrialOutput::default();
    out.margins(&rho, &[Genericity::S04Chart])?;
    let dl = d_t(&rho, &lambda, &beta)?;
    out.residual("dt-lambda", dl, real(0.0), dl.norm(), 1e-9);
    let dm = d_t(&rho, &mu, &beta)?;
    let expected = t(&rho, &Word::from([1, 2, 3, 2]))? - t(&rho, &Word::from([1, 2, 2, 3]))?;
    out.residual("dt-mu", dm, expected, rel_err(dm, expected), ctx.tol);
    // the other side of the curve: conjugate the first two generators
    let beta2 = bending_cocycle(&rho, &[1, 2], &a, &lambda)?;
    let dl2 = d_t(&rho, &lambda, &beta2)?;
    out.residual("dt-lambda-other-side", dl2, real(0.0), dl2.norm() / l.matrix().norm().max(1.0), 1e-9);
    Ok(out)
}

fn trace_identity_trial(ctx: &TrialCtx) -> Result<TrialOutput> {
    let mut out = TrialOutput::default();
    if ctx.trial == 0 {
        let a = GroupElement::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]])?;
        let b = GroupElement::from_real_rows(&[&[1.0, 1.0], &[1.0, 2.0]])?;
        let f = fricke_identity_check(&a, &b)?;
        out.residual("fixed-pair-commutator", f.commutator_trace, real(-2.0), (f.commutator_trace + 2.0).norm(), ctx.tol);
    }
    let rho = random_representation(2, 3, ctx.seed)?;
    let f = fricke_identity_check(rho.generator(0), rho.generator(1))?;
    out.residual("fricke-product", real(f.product), real(0.0), f.product, ctx.tol);
    out.residual("commutator-polynomial", real(f.commutator), real(0.0), f.commutator, ctx.tol);
    let q = f3_quadratic_check(&rho)?;
    out.residual("f3-quadratic", real(q.max()), real(0.0), q.max(), ctx.tol);
    Ok(out)
}

fn su_trial(ctx: &TrialCtx) -> Result<TrialOutput> {
    let n = 2 + ctx.trial % 2;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut out = TrialOutput::default();
    for _ in 0..100 {
        let mut theta: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
        theta.push(-theta.iter().sum::<f64>());
        match su_nu_check(&theta) {
            Ok((a, b)) => {
                if b.norm() < 1e-3 {
                    continue;
                }
                out.ratio("su-magnitude", real(a.norm()), real(b.norm()), ctx.tol);
                return Ok(out);
            }
            Err(Error::DegenerateSpectrum(..)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RejectionExhausted(100))
}

fn dimension_trial(ctx: &TrialCtx) -> Result<TrialOutput> {
    let mut out = TrialOutput::default();
    let mut exact = |name: &'static str, got: usize, expected: i64| {
        let diff = (got as i64 - expected).abs() as f64;
        out.residual(name, real(got as f64), real(expected as f64), diff, 0.0);
    };
    for n in [2usize, 3] {
        let k = 2 + ctx.trial % 4;
        let rho = sample(n, &SurfaceConfig::rose(k), &[], ctx.seed ^ n as u64)?;
        let h = h1_basis_rose(&rho)?;
        exact(if n == 2 { "rose-h1-sl2" } else { "rose-h1-sl3" }, h.len(), ((k - 1) * (n * n - 1)) as i64);
    }
    let cases: [(&'static str, usize, SurfaceKind, i64); 4] = [
        ("relative-s03-sl2", 2, SurfaceKind::S03, 0),
        ("relative-s11-sl2", 2, SurfaceKind::S11, 2),
        ("relative-s04-sl2", 2, SurfaceKind::S04, 2),
        ("relative-s03-sl3", 3, SurfaceKind::S03Sl3, 2),
    ];
    for (name, n, kind, expected) in cases {
        let cfg = SurfaceConfig::new(kind);
        debug_assert_eq!(relative_dimension(n, &cfg), expected);
        let rho = sample(n, &cfg, &[], ctx.seed)?;
        exact(name, relative_tangent_basis(&rho, &cfg)?.len(), expected);
    }
    Ok(out)
}

fn regularity_trial(ctx: &TrialCtx) -> Result<TrialOutput> {
    let mut out = TrialOutput::default();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    // pairs in SL(3) whose two commutator traces differ
    let mut found = None;
    for _ in 0..1000 {
        let a = random_group_element_with(3, &mut rng)?;
        let b = random_group_element_with(3, &mut rng)?;
        let rho = Representation::new(vec![a, b])?;
        let gap = Genericity::Sl3Commutator(1, 2).value(&rho)?.norm();
        if gap > MARGIN {
            found = Some((rho, gap));
            break;
        }
    }
    let (rho, gap) = found.ok_or(Error::RejectionExhausted(1000))?;
    out.margins.insert(Genericity::Sl3Commutator(1, 2).name(), gap);
    let holds = is_regular(rho.generator(0), REGULAR_TOL)? && is_regular(rho.generator(1), REGULAR_TOL)? && is_good(&rho);
    let miss = if holds { 0.0 } else { 1.0 };
    out.residual("commutator-gap-implies-regular-and-good", real(1.0 - miss), real(1.0), miss, 0.0);

    let a = rho.generator(0);
    if is_regular(a, REGULAR_TOL)? {
        let frame = standard_frame(3)?;
        let x = LieElement::project(a.matrix())?;
        let y = LieElement::project(a.inverse().matrix())?;
        let mut span = CMatrix::zeros(8, 2);
        span.set_column(0, &frame.coords(x.matrix()));
        span.set_column(1, &frame.coords(y.matrix()));
        let kernel = circle_cohomology(a)?.h0_coords;
        let dist = subspace_distance(&span, &kernel, 1e-10);
        out.residual("invariant-span", real(dist), real(0.0), dist, 1e-8);
    }

    let n = 2 + ctx.trial % 5;
    let p = SigmaVector::new((0..n - 1).map(|_| c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect())?;
    let back = sigma(&companion_section(&p));
    let err = back.values.iter().zip(&p.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    out.residual("companion-round-trip", real(err), real(0.0), err, 1e-10);
    Ok(out)
}

fn derivative_trial(ctx: &TrialCtx) -> Result<TrialOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let n = 2 + ctx.trial % 2;
    let k = 2 + ctx.trial % 3;
    let rho = random_representation(n, k, rng.gen())?;
    let len = rng.gen_range(1..=6);
    // freely reduced, so the trace function is not constant
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let g = rng.gen_range(1..=k as i32) * if rng.gen_bool(0.5) { 1 } else { -1 };
        if letters.last() != Some(&-g) {
            letters.push(g);
        }
    }
    let word = Word::new(letters);
    let u = Cocycle::new((0..k).map(|_| random_lie_element_with(n, &mut rng)).collect::<Result<_>>()?);
    let exact = d_t(&rho, &word, &u)?;
    let approx = d_t_central(&rho, &word, &u, 1e-5)?;
    let mut out = TrialOutput::default();
    out.residual("trace-differential", exact, approx, rel_err(exact, approx), ctx.tol);
    let a = rho.generator(0);
    let v = random_lie_element_with(n, &mut rng)?;
    let ds = dsigma(a, v.matrix());
    let fd = dsigma_central(a, v.matrix(), 1e-5);
    let worst = ds.iter().zip(&fd).map(|(x, y)| rel_err(*x, *y)).fold(0.0, f64::max);
    out.residual("sigma-differential", ds[0], fd[0], worst, ctx.tol);
    // coboundaries are invisible to every trace function
    let b = random_lie_element_with(n, &mut rng)?;
    let cob = d_t(&rho, &word, &coboundary(&rho, &b))?;
    let scale: f64 = word
        .letters
        .iter()
        .map(|&l| rho.generator(l.unsigned_abs() as usize - 1).matrix().norm())
        .product::<f64>()
        * b.matrix().norm();
    out.residual("coboundary-annihilated", cob, real(0.0), cob.norm() / scale.max(1.0), 1e-9);
    Ok(out)
}

fn vandermonde_trial(ctx: &TrialCtx) -> Result<TrialOutput> {
    let n = 2 + ctx.trial % 3;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut u: Vec<C64> = (0..n - 1).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..3.0))).collect();
    let s: C64 = u.iter().sum();
    u.push(-s);
    let r = vandermonde_newton_check(&u)?;
    let mut out = TrialOutput::default();
    out.ratio("jacobian-vandermonde", real(r.jacobian.norm()), real(r.vandermonde.norm()), ctx.tol);
    Ok(out)
}

fn nu_delta_trial(ctx: &TrialCtx) -> Result<TrialOutput> {
    let gens = FormKey::FkSl3(3).genericity();
    let rho = sample(3, &SurfaceConfig::rose(3), &gens, ctx.seed)?;
    let r = crate::trace::nu_delta_check(&rho, MARGIN)?;
    let mut out = TrialOutput::default();
    out.margins(&rho, &gens)?;
    out.ratio("bending-determinant", r.bending_det, r.delta, ctx.tol);
    Ok(out)
}

static SCENARIOS: [Scenario; 19] = [
    Scenario {
        name: "volume-f2-sl2",
        description: "rank-2 free group in SL(2): rose torsion against 2 sqrt2 dt1 dt2 dt12",
        default_trials: 60,
        tolerance: 1e-7,
        constant_sign: true,
        run: |c| volume_trial(c, FormKey::F2Sl2),
    },
    Scenario {
        name: "volume-f3-sl2",
        description: "rank-3 free group in SL(2): 4/(t123 - t213) over the six-trace chart",
        default_trials: 60,
        tolerance: 1e-7,
        constant_sign: true,
        run: |c| volume_trial(c, FormKey::F3Sl2),
    },
    Scenario {
        name: "volume-f4-sl2",
        description: "rank-4 free group in SL(2): nine-dimensional trace chart",
        default_trials: 60,
        tolerance: 1e-7,
        constant_sign: true,
        run: |c| volume_trial(c, FormKey::FkSl2(4)),
    },
    Scenario {
        name: "volume-f2-sl3",
        description: "rank-2 free group in SL(3): eight-dimensional trace chart",
        default_trials: 60,
        tolerance: 1e-6,
        constant_sign: true,
        run: |c| volume_trial(c, FormKey::F2Sl3),
    },
    Scenario {
        name: "volume-f3-sl3",
        description: "rank-3 free group in SL(3): sixteen-dimensional chart with bending determinants",
        default_trials: 60,
        tolerance: 1e-6,
        constant_sign: true,
        run: |c| volume_trial(c, FormKey::FkSl3(3)),
    },
    Scenario {
        name: "nu-consistency",
        description: "peripheral form: (i^eps sqrt N det dsigma)^2 against circle torsion times pairing, N = 2, 3, 4",
        default_trials: 150,
        tolerance: 1e-8,
        constant_sign: false,
        run: nu_trial,
    },
    Scenario {
        name: "witten-s11-sl2",
        description: "one-holed torus in SL(2): rose torsion against omega ^ nu",
        default_trials: 50,
        tolerance: 1e-6,
        constant_sign: true,
        run: |c| witten_trial(c, 2, SurfaceKind::S11),
    },
    Scenario {
        name: "witten-s04-sl2",
        description: "four-holed sphere in SL(2): rose torsion against omega ^ nu1 ^ .. ^ nu4",
        default_trials: 50,
        tolerance: 1e-6,
        constant_sign: true,
        run: |c| witten_trial(c, 2, SurfaceKind::S04),
    },
    Scenario {
        name: "witten-s03-sl2",
        description: "pair of pants in SL(2): rose torsion against nu1 ^ nu2 ^ nu12",
        default_trials: 50,
        tolerance: 1e-6,
        constant_sign: true,
        run: |c| witten_trial(c, 2, SurfaceKind::S03),
    },
    Scenario {
        name: "witten-s03-sl3",
        description: "pair of pants in SL(3): rose torsion against omega ^ nu1 ^ nu2 ^ nu12",
        default_trials: 50,
        tolerance: 1e-6,
        constant_sign: true,
        run: |c| witten_trial(c, 3, SurfaceKind::S03Sl3),
    },
    Scenario {
        name: "goldman-identities",
        description: "variation-function product rule and the four-holed-sphere bracket",
        default_trials: 50,
        tolerance: 1e-8,
        constant_sign: false,
        run: goldman_trial,
    },
    Scenario {
        name: "bending",
        description: "bending along 12 in the four-holed sphere: dt_12 = 0 and dt_23 = t1232 - t1223",
        default_trials: 50,
        tolerance: 1e-8,
        constant_sign: false,
        run: bending_trial,
    },
    Scenario {
        name: "trace-identities",
        description: "Fricke product rule, commutator polynomial, rank-3 quadratic",
        default_trials: 50,
        tolerance: 1e-8,
        constant_sign: false,
        run: trace_identity_trial,
    },
    Scenario {
        name: "su-nu",
        description: "peripheral form on the maximal torus of SU(2), SU(3) against the sine product",
        default_trials: 50,
        tolerance: 1e-6,
        constant_sign: false,
        run: su_trial,
    },
    Scenario {
        name: "dimensions",
        description: "dimensions of H^1 of the rose and of relative tangent spaces",
        default_trials: 12,
        tolerance: 0.0,
        constant_sign: false,
        run: dimension_trial,
    },
    Scenario {
        name: "regularity-lemmas",
        description: "SL(3) commutator gap implies regular and good; invariant span; companion section",
        default_trials: 200,
        tolerance: 0.0,
        constant_sign: false,
        run: regularity_trial,
    },
    Scenario {
        name: "derivative-oracle",
        description: "analytic trace and sigma differentials against central differences",
        default_trials: 100,
        tolerance: 1e-5,
        constant_sign: false,
        run: derivative_trial,
    },
    Scenario {
        name: "vandermonde-newton",
        description: "Jacobian of (sum u, sigma_1..sigma_{N-1}) against the Vandermonde product",
        default_trials: 60,
        tolerance: 1e-8,
        constant_sign: false,
        run: vandermonde_trial,
    },
    Scenario {
        name: "nu-delta",
        description: "SL(3) bending determinant of dt23, dt(-2)(-3) against delta1[2,3]",
        default_trials: 50,
        tolerance: 1e-7,
        constant_sign: false,
        run: nu_delta_trial,
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(trials: usize) -> RunOptions {
        RunOptions {
            trials: Some(trials),
            ..RunOptions::default()
        }
    }

    #[test]
    fn seeds_differ_per_trial_and_master() {
        assert_ne!(trial_seed(1, 0), trial_seed(1, 1));
        assert_ne!(trial_seed(1, 0), trial_seed(2, 0));
        assert_eq!(trial_seed(7, 3), trial_seed(7, 3));
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(matches!(run_scenario("su-nu", &quick(0)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn unknown_scenario_lists_registry() {
        match run_scenario("volume-f9-sl7", &quick(1)) {
            Err(Error::UnknownScenario { registered, .. }) => {
                assert!(registered.contains("volume-f2-sl2"));
                assert!(registered.contains("vandermonde-newton"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn names_are_unique() {
        let mut names = scenario_names();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), SCENARIOS.len());
    }

    #[test]
    fn same_seed_same_report_under_any_thread_count() {
        let a = run_scenario("volume-f2-sl2", &RunOptions { threads: Some(1), ..quick(6) }).unwrap();
        let b = run_scenario("volume-f2-sl2", &RunOptions { threads: Some(3), ..quick(6) }).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.summary.pass);
        assert_eq!(a.summary.sign_constant, Some(true));
    }

    #[test]
    fn tolerance_override_can_fail_a_run() {
        let r = run_scenario("su-nu", &RunOptions { tolerance: Some(0.0), ..quick(4) }).unwrap();
        assert!(r.records.iter().all(|x| x.tolerance == 0.0));
        assert_eq!(r.summary.passed + r.summary.failed, r.summary.checks);
    }

    #[test]
    fn sampler_failure_is_a_failed_trial() {
        let sc = find_scenario("bending").unwrap();
        let records = run_trial(sc, 0, 0, 1e-8, None);
        assert!(!records.is_empty());
        let failing = Scenario {
            run: |_| Err(Error::RejectionExhausted(3)),
            ..*sc
        };
        let records = run_trial(&failing, 0, 0, 1e-8, None);
        assert_eq!(records.len(), 1);
        assert!(!records[0].pass);
        assert!(records[0].reason.as_deref().unwrap().contains('3'));
    }
}
