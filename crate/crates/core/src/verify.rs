//! Property suites over random states, shared by `gsteer verify` and the
//! integration tests.
//!
//! Case `i` of a suite draws from its own RNG stream, so verdicts do not
//! depend on the number of worker threads.

use std::f64::consts::LN_2;

use nalgebra::SymmetricEigen;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::apply_channel_a;
use crate::cm::{CovarianceMatrix, Party};
use crate::error::Result;
use crate::linalg::{effective_tol, log_det_spd};
use crate::oracle::{dense_eigen_crosscheck, empirical_reid, sample_gaussian};
use crate::random::{
    random_channel, random_cm_with, random_mixed_matrix, random_symplectic, rng_for, RandomCmConfig,
};
use crate::steering::{
    coherent_information, condition_on_measurement, reid_variances, schur_complement,
    steering_measure, steering_report, Direction, MeasurementCm,
};
use crate::symplectic::{
    apply_local_symplectic, bona_fide_check, is_bona_fide, is_ppt, partial_transpose,
    symplectic_eigenvalues,
};
use crate::twomode::{
    extremal_state, key_rate_bound, purity_profile, steering_bounds_check, to_standard_form,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Random cases per property suite.
    pub cases: usize,
    /// States checked against the Monte Carlo oracle.
    pub mc_states: usize,
    /// Samples per Monte Carlo state.
    pub mc_samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            cases: 1000,
            mc_states: 10,
            mc_samples: 200_000,
            seed: 2015,
            tol: crate::DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub violations: usize,
    /// Largest deviation seen, in the suite's own units.
    pub worst: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub passed: bool,
    pub seed: u64,
    pub suites: Vec<SuiteOutcome>,
}

impl VerifySummary {
    pub fn failing(&self) -> Vec<&str> {
        self.suites
            .iter()
            .filter(|s| !s.passed)
            .map(|s| s.name.as_str())
            .collect()
    }
}

/// Outcome of one random case: its deviation and whether it broke the
/// property. Cases that do not exercise the property are skipped.
#[derive(Debug, Clone, Copy)]
enum Case {
    Checked { deviation: f64, violated: bool },
    Skipped,
}

fn check(deviation: f64, limit: f64) -> Case {
    Case::Checked {
        deviation,
        violated: !(deviation <= limit),
    }
}

fn run_cases<F>(name: &str, config: &SuiteConfig, salt: u64, cases: usize, f: F) -> SuiteOutcome
where
    F: Fn(&mut ChaCha8Rng, usize) -> Result<Case> + Sync,
{
    let results: Vec<Result<Case>> = (0..cases)
        .into_par_iter()
        .map(|i| f(&mut rng_for(config.seed, (salt << 32) | i as u64), i))
        .collect();
    let mut outcome = SuiteOutcome {
        name: name.to_string(),
        passed: true,
        cases: 0,
        violations: 0,
        worst: 0.0,
        note: String::new(),
    };
    let mut errors = 0;
    for r in results {
        match r {
            Ok(Case::Checked {
                deviation,
                violated,
            }) => {
                outcome.cases += 1;
                outcome.worst = outcome.worst.max(deviation);
                if violated {
                    outcome.violations += 1;
                }
            }
            Ok(Case::Skipped) => {}
            Err(e) => {
                errors += 1;
                if outcome.note.is_empty() {
                    outcome.note = format!("error: {e}");
                }
            }
        }
    }
    outcome.violations += errors;
    outcome.passed = outcome.violations == 0 && outcome.cases > 0;
    outcome
}

const PARTITIONS: [(usize, usize); 4] = [(1, 1), (2, 1), (1, 2), (2, 2)];

/// Spread of temperatures and squeezings so that both PPT and strongly
/// entangled states show up.
const REGIMES: [RandomCmConfig; 4] = [
    RandomCmConfig {
        temperature_scale: 3.0,
        max_squeezing: 2.0,
    },
    RandomCmConfig {
        temperature_scale: 10.0,
        max_squeezing: 1.0,
    },
    RandomCmConfig {
        temperature_scale: 30.0,
        max_squeezing: 0.5,
    },
    RandomCmConfig {
        temperature_scale: 5.0,
        max_squeezing: 0.3,
    },
];

fn random_state(rng: &mut ChaCha8Rng, i: usize) -> CovarianceMatrix {
    let (n, m) = PARTITIONS[i % PARTITIONS.len()];
    random_cm_with(n, m, &REGIMES[(i / PARTITIONS.len()) % REGIMES.len()], rng)
}

fn two_mode(rng: &mut ChaCha8Rng, i: usize) -> CovarianceMatrix {
    random_cm_with(1, 1, &REGIMES[i % REGIMES.len()], rng)
}

fn both_measures(sigma: &CovarianceMatrix) -> Result<[f64; 2]> {
    Ok([
        steering_measure(sigma, Direction::AToB)?,
        steering_measure(sigma, Direction::BToA)?,
    ])
}

pub fn suite_bona_fide_spectrum(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("bona_fide_spectrum", config, 1, config.cases, |rng, i| {
        let base = random_state(rng, i);
        // Shrinking by a random factor pushes some states out of the set.
        let f = rng.random_range(0.5..=1.2);
        let sigma = CovarianceMatrix::new(base.matrix() * f, base.n_a(), base.n_b())?;
        let verdict = bona_fide_check(&sigma, config.tol);
        let nu_min = symplectic_eigenvalues(sigma.matrix())?[0];
        let tol = effective_tol(config.tol, sigma.matrix().norm(), sigma.dim());
        if (nu_min - 1.0).abs() < 1e-6 {
            return Ok(Case::Skipped);
        }
        let agree = verdict.verdict.accepted() == (nu_min >= 1.0 - tol);
        Ok(check(if agree { 0.0 } else { 1.0 }, 0.0))
    })
}

pub fn suite_partial_transpose_involution(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("partial_transpose_involution", config, 2, config.cases, |rng, i| {
        let sigma = random_state(rng, i);
        let twice = partial_transpose(&partial_transpose(&sigma));
        Ok(check(if twice == sigma { 0.0 } else { 1.0 }, 0.0))
    })
}

fn max_rel_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max)
}

pub fn suite_local_invariance(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("local_symplectic_invariance", config, 3, config.cases, |rng, i| {
        let sigma = random_state(rng, i);
        let s_a = random_symplectic(sigma.n_a(), 1.0, rng);
        let s_b = random_symplectic(sigma.n_b(), 1.0, rng);
        let moved = apply_local_symplectic(&sigma, &s_a, &s_b)?;
        let g0 = both_measures(&sigma)?;
        let g1 = both_measures(&moved)?;
        let mut dev = (g0[0] - g1[0]).abs().max((g0[1] - g1[1]).abs());
        for (x, y) in [
            (sigma.matrix().clone(), moved.matrix().clone()),
            (sigma.block_a(), moved.block_a()),
            (sigma.block_b(), moved.block_b()),
        ] {
            dev = dev.max(max_rel_diff(&symplectic_eigenvalues(&x)?, &symplectic_eigenvalues(&y)?));
        }
        let ld = (sigma.log_det()? - moved.log_det()?).abs();
        Ok(check(dev.max(ld), 1e-9))
    })
}

pub fn suite_channel_keeps_b(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("channel_keeps_b_block", config, 4, config.cases, |rng, i| {
        let sigma = random_state(rng, i);
        let ch = random_channel(sigma.n_a(), rng);
        let out = apply_channel_a(&sigma, &ch)?;
        let same = out.block_b() == sigma.block_b() && is_bona_fide(&out, config.tol);
        Ok(check(if same { 0.0 } else { 1.0 }, 0.0))
    })
}

/// Single steered mode: `G^{A→B} = max{0, ½ ln(det A / det σ)}`.
pub fn suite_single_mode_formula(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("single_mode_formula", config, 5, config.cases, |rng, i| {
        let n = 1 + i % 3;
        let sigma = random_cm_with(n, 1, &REGIMES[(i / 3) % REGIMES.len()], rng);
        let g = steering_measure(&sigma, Direction::AToB)?;
        let closed = (0.5 * (sigma.block_a().determinant() / sigma.matrix().determinant()).ln()).max(0.0);
        Ok(check((g - closed).abs(), 1e-8))
    })
}

pub fn suite_monotonicity(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("monotonicity_under_channels", config, 6, config.cases, |rng, i| {
        let sigma = random_state(rng, i);
        let out = apply_channel_a(&sigma, &random_channel(sigma.n_a(), rng))?;
        let increase = steering_measure(&out, Direction::AToB)? - steering_measure(&sigma, Direction::AToB)?;
        Ok(check(increase.max(0.0), 1e-9))
    })
}

pub fn suite_additivity(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("additivity", config, 7, config.cases, |rng, i| {
        let s1 = random_state(rng, i);
        let s2 = random_state(rng, i + 1);
        let joint = both_measures(&s1.tensor(&s2))?;
        let (g1, g2) = (both_measures(&s1)?, both_measures(&s2)?);
        let dev = (joint[0] - g1[0] - g2[0]).abs().max((joint[1] - g1[1] - g2[1]).abs());
        Ok(check(dev, 1e-9))
    })
}

/// PPT states are nonsteerable in both directions.
pub fn suite_ppt_no_go(config: &SuiteConfig) -> SuiteOutcome {
    let mut outcome = run_cases("ppt_implies_nonsteerable", config, 8, config.cases, |rng, i| {
        let sigma = random_state(rng, i);
        if !is_ppt(&sigma, config.tol) {
            return Ok(Case::Skipped);
        }
        let g = both_measures(&sigma)?;
        let mut dev = g[0].max(g[1]);
        let mut violated = dev > 0.0;
        for d in [Direction::AToB, Direction::BToA] {
            if sigma.n_modes(d.steered()) == 1 {
                let info = coherent_information(&sigma, d)?;
                dev = dev.max(info);
                violated |= info > 1e-9;
            }
        }
        Ok(Case::Checked {
            deviation: dev,
            violated,
        })
    });
    outcome.note = format!("{} PPT states among {} drawn", outcome.cases, config.cases);
    outcome
}

/// Pure states with one steered mode: both measures equal `S(A)`.
pub fn suite_pure_hierarchy(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("pure_state_hierarchy", config, 9, config.cases, |rng, i| {
        let n = 1 + i % 3;
        let config_pure = RandomCmConfig {
            temperature_scale: 1.0,
            max_squeezing: 1.0,
        };
        let sigma = random_cm_with(n, 1, &config_pure, rng);
        let s_a = 0.5 * log_det_spd(&sigma.block_a())?;
        let g = both_measures(&sigma)?;
        Ok(check((g[0] - s_a).abs().max((g[1] - s_a).abs()), 1e-8))
    })
}

/// Coherent information is convex under mixing of covariance matrices.
pub fn suite_convexity(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("coherent_information_convexity", config, 10, config.cases, |rng, i| {
        let (n, _) = PARTITIONS[i % 2];
        let regime = &REGIMES[(i / 2) % REGIMES.len()];
        let s1 = random_cm_with(n, 1, regime, rng);
        let s2 = random_cm_with(n, 1, regime, rng);
        let lambda = [0.25, 0.5, 0.75][i % 3];
        let mixed = coherent_information(&s1.mix(&s2, lambda)?, Direction::AToB)?;
        let chord = lambda * coherent_information(&s1, Direction::AToB)?
            + (1.0 - lambda) * coherent_information(&s2, Direction::AToB)?;
        Ok(check((mixed - chord).max(0.0), 1e-9))
    })
}

/// Bob's conditional state after any Gaussian measurement dominates the
/// Schur complement.
pub fn suite_conditioning_order(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("conditioning_dominates_schur", config, 11, config.cases, |rng, i| {
        let sigma = random_state(rng, i);
        let seed = random_mixed_matrix(
            sigma.n_a(),
            &RandomCmConfig {
                temperature_scale: 2.0,
                max_squeezing: 2.0,
            },
            rng,
        );
        let cond = condition_on_measurement(&sigma, &MeasurementCm::new(seed)?)?;
        let schur = schur_complement(&sigma, Party::B)?;
        let gap = SymmetricEigen::new(cond - schur).eigenvalues.min();
        Ok(check((-gap).max(0.0), 1e-9))
    })
}

pub fn suite_asymmetry_bounds(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("asymmetry_bounds", config, 12, config.cases, |rng, i| {
        let b = steering_bounds_check(&two_mode(rng, i))?;
        let dev = (-b.lower_slack).max(-b.upper_slack).max(-b.ceiling_slack).max(0.0);
        Ok(Case::Checked {
            deviation: dev,
            violated: b.defect || b.asymmetry > LN_2 + 1e-9,
        })
    })
}

/// `η < μ_B ⇔ G^{A→B} > 0` away from the threshold.
pub fn suite_threshold_consistency(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("threshold_consistency", config, 13, config.cases, |rng, i| {
        let sigma = two_mode(rng, i);
        let p = purity_profile(&sigma)?;
        let g = both_measures(&sigma)?;
        if (p.eta - p.mu_b).abs() < 1e-9 || (p.eta - p.mu_a).abs() < 1e-9 {
            return Ok(Case::Skipped);
        }
        let ok = (p.eta < p.mu_b) == (g[0] > 0.0) && (p.eta < p.mu_a) == (g[1] > 0.0);
        Ok(check(if ok { 0.0 } else { 1.0 }, 0.0))
    })
}

/// Extremal states are physical with `det σ ≥ 1` across `s ∈ [1, 10]`,
/// `a ∈ [s, 10⁸]`.
pub fn suite_extremal_grid(config: &SuiteConfig) -> SuiteOutcome {
    let s_values: Vec<f64> = (0..10).map(|k| 1.0 + k as f64).collect();
    run_cases("extremal_family_physical", config, 14, s_values.len() * 9, |_, i| {
        let s = s_values[i / 9];
        let a = s * 10f64.powf((8.0 - s.log10()) * (i % 9) as f64 / 8.0);
        let sigma = extremal_state(s, a.min(1e8).max(s))?;
        let log_det = sigma.log_det()?;
        let ok = is_bona_fide(&sigma, config.tol) && log_det >= -1e-9;
        Ok(check(if ok { 0.0 } else { 1.0 }, 0.0))
    })
}

pub fn suite_eigen_crosscheck(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("dense_eigen_crosscheck", config, 15, config.cases, |rng, i| {
        let modes = 1 + i % 4;
        let m = random_mixed_matrix(modes, &REGIMES[(i / 4) % REGIMES.len()], rng);
        let fast = symplectic_eigenvalues(&m)?;
        let dense = dense_eigen_crosscheck(&m)?;
        Ok(check(max_rel_diff(&fast, &dense), 1e-8))
    })
}

/// Monte Carlo Reid products against `det M^{A/B}` on standard forms of
/// random two-mode states. Passes when at least 80% of comparisons fall
/// within three standard errors.
pub fn suite_reid_oracle(config: &SuiteConfig) -> SuiteOutcome {
    let results: Vec<Result<[bool; 2]>> = (0..config.mc_states)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(config.seed, (16 << 32) | i as u64);
            let sigma = to_standard_form(&two_mode(&mut rng, i))?.to_cm()?;
            let batch = sample_gaussian(&sigma, config.mc_samples, config.seed.wrapping_add(i as u64))?;
            let (prod_a, prod_b) = reid_variances(&sigma)?;
            let mut ok = [false; 2];
            for (k, (party, exact)) in [(Party::A, prod_a), (Party::B, prod_b)].into_iter().enumerate() {
                let est = empirical_reid(&batch, party)?;
                ok[k] = (est.product - exact).abs() <= 3.0 * est.std_error;
            }
            Ok(ok)
        })
        .collect();
    let mut within = 0;
    let mut total = 0;
    let mut errors = 0;
    for r in results {
        match r {
            Ok(ok) => {
                total += 2;
                within += ok.iter().filter(|&&b| b).count();
            }
            Err(_) => errors += 1,
        }
    }
    let fraction = if total > 0 { within as f64 / total as f64 } else { 0.0 };
    SuiteOutcome {
        name: "reid_monte_carlo".into(),
        passed: errors == 0 && total > 0 && fraction >= 0.8,
        cases: total,
        violations: total - within + errors,
        worst: 1.0 - fraction,
        note: format!("{within}/{total} within 3 standard errors at {} samples", config.mc_samples),
    }
}

/// Key rate through `G^{B→A}` equals the Reid-variance form.
pub fn suite_key_rate_forms(config: &SuiteConfig) -> SuiteOutcome {
    run_cases("key_rate_reid_form", config, 17, config.cases, |rng, i| {
        let p = to_standard_form(&two_mode(rng, i))?;
        let report = steering_report(&p.to_cm()?)?;
        if !report.steerable_b_to_a {
            return Ok(Case::Skipped);
        }
        // Homodyne conditional variances of Alice's quadratures.
        let v_x = p.a - p.c * p.c / p.b;
        let v_p = p.a - p.d * p.d / p.b;
        let reid_form = (2.0 / (std::f64::consts::E * (v_x * v_p).sqrt())).ln().max(0.0);
        Ok(check((key_rate_bound(report.g_b_to_a)? - reid_form).abs(), 1e-8))
    })
}

pub type Suite = fn(&SuiteConfig) -> SuiteOutcome;

pub const SUITES: [(&str, Suite); 17] = [
    ("bona_fide_spectrum", suite_bona_fide_spectrum),
    ("partial_transpose_involution", suite_partial_transpose_involution),
    ("local_symplectic_invariance", suite_local_invariance),
    ("channel_keeps_b_block", suite_channel_keeps_b),
    ("single_mode_formula", suite_single_mode_formula),
    ("monotonicity_under_channels", suite_monotonicity),
    ("additivity", suite_additivity),
    ("ppt_implies_nonsteerable", suite_ppt_no_go),
    ("pure_state_hierarchy", suite_pure_hierarchy),
    ("coherent_information_convexity", suite_convexity),
    ("conditioning_dominates_schur", suite_conditioning_order),
    ("asymmetry_bounds", suite_asymmetry_bounds),
    ("threshold_consistency", suite_threshold_consistency),
    ("extremal_family_physical", suite_extremal_grid),
    ("dense_eigen_crosscheck", suite_eigen_crosscheck),
    ("reid_monte_carlo", suite_reid_oracle),
    ("key_rate_reid_form", suite_key_rate_forms),
];

pub fn run_all(config: &SuiteConfig) -> VerifySummary {
    let suites: Vec<SuiteOutcome> = SUITES.iter().map(|(_, suite)| suite(config)).collect();
    VerifySummary {
        passed: suites.iter().all(|s| s.passed),
        seed: config.seed,
        suites,
    }
}
