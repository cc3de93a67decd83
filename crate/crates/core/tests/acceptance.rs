//! Acceptance criteria AC1-AC8. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. Reference values come from oracles defined
//! here: direct matrix algebra, dense-grid likelihoods and Simpson quadrature.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use aqse_core::estimator::{EstimatorState, LogTables, Trajectory};
use aqse_core::harness::{
    read_trajectories_csv, replay_trace, run_ensemble, write_run_outputs, ExperimentConfig,
    HarnessError, InitialGuess,
};
use aqse_core::model::{
    classical_fisher_information, lue_estimator, sld_fisher_information, wrapped_deviation,
    AngleRad, Outcome, QUANTUM_FISHER_INFORMATION,
};
use aqse_core::source::read_trace;
use aqse_core::stats::{
    chisq_cdf, chisq_quantile, gof_test, mean_ci, normal_cdf, normal_quantile, standardize, t_cdf,
    t_quantile, variance_ci,
};

const INV_FISHER: f64 = 1.0 / 16.0;

// AC1 / AC2
const FISHER_TOL: f64 = 1e-9;
const CRAMER_RAO_TOL: f64 = 1e-12;
const SLOPE_TOL: f64 = 1e-6;
// AC3
const COARSE_GRID: usize = 10_000;
const DENSE_GRID: usize = 100_000;
// AC4
const MEAN_OFFSET_MAX_DEG: f64 = 0.12;
const VAR_CI_WIDTH_MAX: f64 = 0.016;
const VAR_CI_HITS_MIN: usize = 3;
const HALF_WIDTH_TARGET_DEG: f64 = 0.06;
const HALF_WIDTH_TOL_DEG: f64 = 0.01;
// AC5
const GOF_SEEDS: usize = 10;
const GOF_ACCEPT_MIN: usize = 7;
const CHISQ_21_90: f64 = 29.615;
// AC6
const RMSE_SCALED_RANGE: (f64, f64) = (0.2125, 0.2875);
// AC7
const CDF_TOL: f64 = 1e-8;
const ROUND_TRIP_TOL: f64 = 1e-8;
// AC8
const FLIP_TRIAL: u64 = 17;
const FLIP_STEP: u64 = 150;

const PHOTONS: usize = 300;
const TRIALS: usize = 500;

type Criterion = (&'static str, &'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn config(theta_deg: f64, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        theta_true_deg: theta_deg,
        n_photons: PHOTONS,
        trials: TRIALS,
        master_seed: seed,
        ..Default::default()
    }
}

fn finals(trajectories: &[Trajectory]) -> Vec<AngleRad> {
    trajectories
        .iter()
        .map(|t| t.final_mle().unwrap())
        .collect()
}

// ---------------------------------------------------------------- AC1

/// `Tr[rho L^2]` from the state vector and its analytic derivative.
fn oracle_quantum_fisher(theta: f64) -> f64 {
    let psi = [(2.0 * theta).cos(), (2.0 * theta).sin()];
    let dpsi = [-2.0 * (2.0 * theta).sin(), 2.0 * (2.0 * theta).cos()];
    let mut rho = [[0.0; 2]; 2];
    let mut l = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            rho[i][j] = psi[i] * psi[j];
            // pure state: L = 2 d(rho)/d(theta)
            l[i][j] = 2.0 * (dpsi[i] * psi[j] + psi[i] * dpsi[j]);
        }
    }
    let mut trace = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            trace += rho[i][j] * (l[j][0] * l[0][i] + l[j][1] * l[1][i]);
        }
    }
    trace
}

fn ac1() -> Verdict {
    let mut worst_classical: f64 = 0.0;
    let mut worst_quantum: f64 = 0.0;
    for i in 0..1000 {
        let theta = AngleRad::new(i as f64 * FRAC_PI_2 / 1000.0);
        let classical =
            classical_fisher_information(theta, theta).expect("nondegenerate at theta_hat = theta");
        let quantum = oracle_quantum_fisher(theta.value());
        worst_classical = worst_classical.max((classical - QUANTUM_FISHER_INFORMATION).abs());
        worst_quantum = worst_quantum
            .max((classical - quantum).abs())
            .max((sld_fisher_information(theta) - quantum).abs());
    }
    verdict(
        worst_classical <= FISHER_TOL && worst_quantum <= FISHER_TOL,
        format!(
            "max |F - 16| = {worst_classical:.2e}, max |F - Tr[rho L^2]| = {worst_quantum:.2e}"
        ),
    )
}

// ---------------------------------------------------------------- AC2

/// Outcome probability from the squared overlap, independent of the library.
fn oracle_p1(theta: f64, theta_hat: f64) -> f64 {
    (2.0 * (theta_hat - theta) + FRAC_PI_4).cos().powi(2)
}

fn ac2() -> Verdict {
    let mut worst_vj: f64 = 0.0;
    let mut worst_slope: f64 = 0.0;
    for i in 0..100 {
        let theta0 = AngleRad::new(0.01 + i as f64 * FRAC_PI_2 / 100.0);
        let lue = lue_estimator(theta0);
        let t0 = theta0.value();
        worst_vj = worst_vj.max((lue.variance(t0) * QUANTUM_FISHER_INFORMATION - 1.0).abs());
        let expect = |t: f64| {
            let p1 = oracle_p1(t, t0);
            p1 * lue.estimate(Outcome::One) + (1.0 - p1) * lue.estimate(Outcome::Two)
        };
        let h = 1e-5;
        let slope = (expect(t0 + h) - expect(t0 - h)) / (2.0 * h);
        worst_slope = worst_slope.max((slope - 1.0).abs());
    }
    verdict(
        worst_vj <= CRAMER_RAO_TOL && worst_slope <= SLOPE_TOL,
        format!("max |V J - 1| = {worst_vj:.2e}, max |slope - 1| = {worst_slope:.2e}"),
    )
}

// ---------------------------------------------------------------- AC3

/// Argmax set of the log-likelihood on `DENSE_GRID` points, evaluated directly.
fn dense_maximizers(settings: &[f64], outcomes: &[Outcome]) -> Vec<f64> {
    let step = FRAC_PI_2 / DENSE_GRID as f64;
    let ll: Vec<f64> = (0..DENSE_GRID)
        .map(|k| {
            let theta = k as f64 * step;
            settings
                .iter()
                .zip(outcomes)
                .map(|(s, o)| {
                    let p1 = oracle_p1(theta, *s);
                    match o {
                        Outcome::One => p1.ln(),
                        Outcome::Two => (1.0 - p1).ln(),
                    }
                })
                .sum()
        })
        .collect();
    let best = ll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ll.iter()
        .enumerate()
        .filter(|(_, v)| **v >= best - 1e-9)
        .map(|(k, _)| k as f64 * step)
        .collect()
}

fn ac3() -> Verdict {
    let tables = Arc::new(LogTables::new(COARSE_GRID).unwrap());
    let coarse_step = FRAC_PI_2 / COARSE_GRID as f64;
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    let mut multi = 0;
    for start in [0.0, 0.3] {
        for bits in 0..32u32 {
            let outcomes: Vec<Outcome> = (0..5)
                .map(|i| {
                    if bits >> i & 1 == 0 {
                        Outcome::One
                    } else {
                        Outcome::Two
                    }
                })
                .collect();
            let mut state = EstimatorState::with_tables(Arc::clone(&tables), AngleRad::new(start));
            let mut settings = Vec::new();
            for o in &outcomes {
                settings.push(state.mle().value());
                state.update(*o).unwrap();
            }
            let maximizers = dense_maximizers(&settings, &outcomes);
            if maximizers.len() > 1
                && (maximizers[maximizers.len() - 1] - maximizers[0]) > 2.0 * coarse_step
            {
                multi += 1;
            }
            let mle = state.mle();
            let distance = maximizers
                .iter()
                .map(|m| mle.deviation_from(AngleRad::new(*m)).abs())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(distance);
            cases += 1;
        }
    }
    verdict(
        worst <= coarse_step + 1e-15,
        format!(
            "{cases} sequences, max distance to dense argmax = {:.3} coarse steps ({multi} with several maximizers)",
            worst / coarse_step
        ),
    )
}

// ---------------------------------------------------------------- AC4

fn ac4() -> Verdict {
    let mut ok = true;
    let mut hits = 0;
    let mut parts = Vec::new();
    for (i, theta_deg) in [0.0, 30.0, 60.0, 78.3].into_iter().enumerate() {
        let start = Instant::now();
        let runs = run_ensemble(&config(theta_deg, 1 + i as u64)).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let f = finals(&runs);
        let mean = mean_ci(&f, 0.90).unwrap();
        let offset_deg = wrapped_deviation((mean.estimate - theta_deg).to_radians()).to_degrees();
        let var = variance_ci(&f, PHOTONS, 0.90).unwrap();
        let half = mean.half_width();
        let contains = var.contains(INV_FISHER);
        hits += usize::from(contains);
        ok &= offset_deg.abs() <= MEAN_OFFSET_MAX_DEG
            && var.width() <= VAR_CI_WIDTH_MAX
            && (half - HALF_WIDTH_TARGET_DEG).abs() <= HALF_WIDTH_TOL_DEG;
        parts.push(format!(
            "{theta_deg}deg: mu-theta={offset_deg:+.4} +-{half:.4}, v=[{:.4},{:.4}]{} ({elapsed:.1}s)",
            var.lower,
            var.upper,
            if contains { "" } else { " misses J^-1" }
        ));
    }
    ok &= hits >= VAR_CI_HITS_MIN;
    verdict(ok, parts.join("; "))
}

// ---------------------------------------------------------------- AC5 / AC6

fn ac5() -> Verdict {
    let mut accepted = 0;
    let mut below_critical = true;
    let mut stats = Vec::new();
    for seed in 0..GOF_SEEDS as u64 {
        let runs = run_ensemble(&config(60.0, 100 + seed)).unwrap();
        let sample = standardize(&finals(&runs), PHOTONS, QUANTUM_FISHER_INFORMATION).unwrap();
        let gof = gof_test(&sample, 0.10).unwrap();
        if gof.accept {
            accepted += 1;
            below_critical &= gof.statistic < CHISQ_21_90;
        }
        stats.push(format!("{:.1}", gof.statistic));
    }
    verdict(
        accepted >= GOF_ACCEPT_MIN && below_critical,
        format!(
            "{accepted}/{GOF_SEEDS} accepted, X2 = [{}]",
            stats.join(", ")
        ),
    )
}

fn ac6() -> Verdict {
    let theta = AngleRad::from_degrees(60.0);
    let runs = run_ensemble(&config(60.0, 200)).unwrap();
    let medians: Vec<f64> = [10, 30, 100, 300]
        .iter()
        .map(|&n| {
            let mut e: Vec<f64> = runs
                .iter()
                .map(|t| t.mle_after(n).unwrap().deviation_from(theta).abs())
                .collect();
            e.sort_by(f64::total_cmp);
            0.5 * (e[e.len() / 2 - 1] + e[e.len() / 2])
        })
        .collect();
    let monotone = medians.windows(2).all(|w| w[1] <= w[0]);
    let mse = runs
        .iter()
        .map(|t| t.final_mle().unwrap().deviation_from(theta).powi(2))
        .sum::<f64>()
        / runs.len() as f64;
    let scaled = mse.sqrt() * (PHOTONS as f64).sqrt();
    verdict(
        monotone && (RMSE_SCALED_RANGE.0..=RMSE_SCALED_RANGE.1).contains(&scaled),
        format!(
            "medians at n=10,30,100,300: [{}] rad, RMSE*sqrt(300) = {scaled:.4}",
            medians
                .iter()
                .map(|m| format!("{m:.5}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

// ---------------------------------------------------------------- AC7

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

fn oracle_normal_cdf(x: f64) -> f64 {
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
    0.5 + simpson(pdf, 0.0, x, 200_000)
}

/// With `x = s^2` the chi-square density becomes `s^(k-1) exp(-s^2/2)`, smooth
/// at the origin; the CDF is a ratio of two integrals, so no gamma function is needed.
fn oracle_chisq_cdf(k: f64, x: f64) -> f64 {
    let peak = (k - 1.0).max(0.0).sqrt();
    let log_peak = if peak > 0.0 {
        (k - 1.0) * peak.ln() - 0.5 * peak * peak
    } else {
        0.0
    };
    let g = |s: f64| {
        if s == 0.0 {
            return if k == 1.0 { (-log_peak).exp() } else { 0.0 };
        }
        ((k - 1.0) * s.ln() - 0.5 * s * s - log_peak).exp()
    };
    let upper = peak + 40.0;
    let s = x.sqrt().min(upper);
    simpson(g, 0.0, s, 400_000) / simpson(g, 0.0, upper, 400_000)
}

/// With `t = sqrt(nu) tan(phi)` the t density becomes `cos(phi)^(nu-1)` on `(-pi/2, pi/2)`.
fn oracle_t_cdf(nu: f64, t: f64) -> f64 {
    let g = |phi: f64| phi.cos().powf(nu - 1.0);
    let phi = (t / nu.sqrt()).atan();
    0.5 + 0.5 * simpson(g, 0.0, phi, 400_000) / simpson(g, 0.0, FRAC_PI_2, 400_000)
}

fn ac7() -> Verdict {
    let mut worst: f64 = 0.0;
    for x in [0.0, 1.0 / 6.0, -3.5, 1.0, -1.959963984540054, 2.5] {
        worst = worst.max((normal_cdf(x) - oracle_normal_cdf(x)).abs());
    }
    for (k, x) in [
        (2.0, 1.3862944),
        (21.0, 29.615),
        (21.0, 16.8),
        (21.0, 35.0),
        (1.0, 2.7),
        (499.0, 448.0),
        (499.0, 551.8),
    ] {
        worst = worst.max((chisq_cdf(k, x).unwrap() - oracle_chisq_cdf(k, x)).abs());
    }
    for (nu, t) in [
        (3.0, 3.1824),
        (3.0, 2.3534),
        (499.0, 1.6479),
        (1.0, -2.0),
        (21.0, 0.7),
    ] {
        worst = worst.max((t_cdf(nu, t).unwrap() - oracle_t_cdf(nu, t)).abs());
    }
    let mut worst_round_trip: f64 = 0.0;
    for p in [0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.975, 0.99] {
        for dof in [1.0, 2.0, 3.0, 21.0, 499.0] {
            let q = chisq_quantile(dof, p).unwrap();
            worst_round_trip = worst_round_trip.max((chisq_cdf(dof, q).unwrap() - p).abs());
            let q = t_quantile(dof, p).unwrap();
            worst_round_trip = worst_round_trip.max((t_cdf(dof, q).unwrap() - p).abs());
        }
        worst_round_trip =
            worst_round_trip.max((normal_cdf(normal_quantile(p).unwrap()) - p).abs());
    }
    verdict(
        worst <= CDF_TOL && worst_round_trip <= ROUND_TRIP_TOL,
        format!(
            "max |cdf - quadrature| = {worst:.2e}, max round-trip error = {worst_round_trip:.2e}"
        ),
    )
}

// ---------------------------------------------------------------- AC8

fn ac8() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        output_dir: dir.path().to_owned(),
        initial_guess: InitialGuess::Random,
        ..config(60.0, 300)
    };
    let recorded = run_ensemble(&cfg).unwrap();
    write_run_outputs(dir.path(), &cfg, &recorded).unwrap();

    let mut trace = read_trace(&dir.path().join("trace.csv")).unwrap();
    let reference = read_trajectories_csv(&dir.path().join("trajectories.csv")).unwrap();
    let replayed = replay_trace(&trace, cfg.grid_size, cfg.theta_true(), Some(&reference)).unwrap();
    let exact = replayed.len() == recorded.len()
        && replayed.iter().zip(&recorded).all(|((trial, r), o)| {
            r.steps.len() == o.steps.len()
                && r.steps.iter().zip(&o.steps).all(|(a, b)| {
                    a.setting.value().to_bits() == b.setting.value().to_bits()
                        && a.outcome == b.outcome
                        && a.mle_after.value().to_bits() == b.mle_after.value().to_bits()
                })
                && *trial < TRIALS as u64
        });

    let record = &mut trace.trials.get_mut(&FLIP_TRIAL).unwrap()[FLIP_STEP as usize];
    record.outcome = record.outcome.flipped();
    let located = |reference: Option<&BTreeMap<u64, Vec<f64>>>| match replay_trace(
        &trace,
        cfg.grid_size,
        cfg.theta_true(),
        reference,
    ) {
        Err(HarnessError::Divergence { trial, step, .. }) => Some((trial, step)),
        _ => None,
    };
    let with_reference = located(Some(&reference));
    let trace_only = located(None);
    let expected = Some((FLIP_TRIAL, FLIP_STEP));
    verdict(
        exact && with_reference == expected && trace_only == expected,
        format!(
            "{} trajectories bit-exact: {exact}; flip at trial {FLIP_TRIAL} step {FLIP_STEP} located at {:?} (with estimates), {:?} (trace only)",
            replayed.len(),
            with_reference,
            trace_only
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1", "Fisher saturation", ac1),
        ("AC2", "Cramer-Rao equality for the LUE", ac2),
        ("AC3", "MLE dense-grid oracle equivalence", ac3),
        ("AC4", "ensemble mean and variance intervals", ac4),
        ("AC5", "asymptotic normality", ac5),
        ("AC6", "consistency trend", ac6),
        ("AC7", "distribution-function accuracy", ac7),
        ("AC8", "replay integrity", ac8),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let v = check();
        failed += usize::from(!v.pass);
        println!(
            "{id} {} {name}: {} [{:.2}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {}/{} passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
