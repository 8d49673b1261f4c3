//! Two-mode states: standard form, the purity classification, the pure and
//! extremal families, steering bounds and the one-sided device-independent
//! key rate.
//!
//! For one mode per side both steerabilities are functions of the three
//! purities `μ_A = 1/√det A`, `μ_B = 1/√det B`, `μ = 1/√det σ` only:
//! `G^{A→B} = max{0, ln(μ_B/η)}` with `η = μ_A μ_B / μ`.

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::cm::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::linalg::{log_det_spd, max_abs};
use crate::steering::{steering_measure, Direction, SteeringReport};
use crate::symplectic::{is_bona_fide, is_ppt};
use crate::DEFAULT_TOL;

/// Tolerance on `η₀ ≤ η ≤ 1` when labelling physicality.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Inequality violations larger than this in [`steering_bounds_check`] are
/// reported as defects.
pub const BOUNDS_DEFECT_TOL: f64 = 1e-8;

/// Covariances `(a, b, c, d)` of a two-mode standard form
/// `A = diag(a, a)`, `B = diag(b, b)`, `C = diag(c, d)`, with `c ≥ |d|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardFormParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl StandardFormParams {
    /// Normalizes `(c, d)` to the `c ≥ |d|` convention using local rotations
    /// (which swap `c` and `d`) and parity flips (which negate both).
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        let (mut c, mut d) = if c.abs() >= d.abs() { (c, d) } else { (d, c) };
        if c < 0.0 {
            c = -c;
            d = -d;
        }
        Self { a, b, c, d }
    }

    pub fn to_cm(&self) -> Result<CovarianceMatrix> {
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            self.a, 0.0,    self.c, 0.0,
            0.0,    self.a, 0.0,    self.d,
            self.c, 0.0,    self.b, 0.0,
            0.0,    self.d, 0.0,    self.b,
        ]);
        CovarianceMatrix::new(m, 1, 1)
    }

    /// `det σ = (ab − c²)(ab − d²)`.
    pub fn det(&self) -> f64 {
        let ab = self.a * self.b;
        (ab - self.c * self.c) * (ab - self.d * self.d)
    }
}

/// Whether a two-mode matrix already has the standard-form sparsity pattern
/// and proportional-to-identity local blocks, relative to its largest entry.
pub fn is_standard_form(sigma: &CovarianceMatrix, tol: f64) -> bool {
    if sigma.n_a() != 1 || sigma.n_b() != 1 {
        return false;
    }
    let m = sigma.matrix();
    let scale = tol * max_abs(m).max(1.0);
    let off = [(0, 1), (2, 3), (0, 3), (1, 2)];
    off.iter().all(|&(i, j)| m[(i, j)].abs() <= scale)
        && (m[(0, 0)] - m[(1, 1)]).abs() <= scale
        && (m[(2, 2)] - m[(3, 3)]).abs() <= scale
}

/// Standard-form covariances of a two-mode state.
///
/// Matrices already in standard form are read directly. Otherwise each
/// local block is brought to a multiple of the identity by a single-mode
/// squeezer and the correlation block is diagonalized by local rotations.
pub fn to_standard_form(sigma: &CovarianceMatrix) -> Result<StandardFormParams> {
    if sigma.n_a() != 1 || sigma.n_b() != 1 {
        return Err(Error::Structural(format!(
            "standard form needs partition (1, 1), got ({}, {})",
            sigma.n_a(),
            sigma.n_b()
        )));
    }
    let m = sigma.matrix();
    if is_standard_form(sigma, 1e-14) {
        return Ok(StandardFormParams::new(
            0.5 * (m[(0, 0)] + m[(1, 1)]),
            0.5 * (m[(2, 2)] + m[(3, 3)]),
            m[(0, 2)],
            m[(1, 3)],
        ));
    }
    let (a, s_a) = normalizer(&sigma.block_a())?;
    let (b, s_b) = normalizer(&sigma.block_b())?;
    let c = &s_a * sigma.block_c() * s_b.transpose();
    let svd = c.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    // Reflections are not symplectic; fold their signs into the second value.
    let sign = u.determinant().signum() * v_t.determinant().signum();
    let (c, d) = (svd.singular_values[0], sign * svd.singular_values[1]);
    let params = StandardFormParams::new(a, b, c, d);
    let check = params.to_cm()?;
    if !is_bona_fide(&check, DEFAULT_TOL.max(1e-8)) {
        return Err(Error::InconsistentInvariants(
            "reconstructed standard form is not bona fide".into(),
        ));
    }
    Ok(params)
}

/// `(√det m, S)` with `S` the single-mode symplectic giving `S m Sᵀ = √det m · I`.
fn normalizer(m: &DMatrix<f64>) -> Result<(f64, DMatrix<f64>)> {
    let eig = SymmetricEigen::new(m.clone());
    let (l1, l2) = (eig.eigenvalues[0], eig.eigenvalues[1]);
    if !(l1 > 0.0 && l2 > 0.0) {
        return Err(Error::Domain("local block is not positive definite".into()));
    }
    let v = (l1 * l2).sqrt();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![(v / l1).sqrt(), (v / l2).sqrt()]));
    Ok((v, &eig.eigenvectors * d * eig.eigenvectors.transpose()))
}

/// Global and marginal purities of a two-mode state and their ratio `η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurityProfile {
    pub mu_a: f64,
    pub mu_b: f64,
    pub mu: f64,
    pub eta: f64,
}

impl PurityProfile {
    /// Profile with the given marginal purities and ratio `η`; `μ` follows.
    pub fn from_eta(mu_a: f64, mu_b: f64, eta: f64) -> Self {
        Self {
            mu_a,
            mu_b,
            mu: mu_a * mu_b / eta,
            eta,
        }
    }

    /// Lower edge of the physical region, `μ_A μ_B + |μ_A − μ_B|`.
    pub fn eta_0(&self) -> f64 {
        self.mu_a * self.mu_b + (self.mu_a - self.mu_b).abs()
    }

    /// Above this, states are necessarily separable.
    pub fn eta_s(&self) -> f64 {
        self.mu_a + self.mu_b - self.mu_a * self.mu_b
    }

    /// Below this, states are necessarily entangled.
    pub fn eta_e(&self) -> f64 {
        (self.mu_a.powi(2) + self.mu_b.powi(2) - self.mu_a.powi(2) * self.mu_b.powi(2)).sqrt()
    }

    /// Steering flags `(A→B, B→A)` from `η < μ_B` and `η < μ_A`, without
    /// any physicality check.
    pub fn steering_thresholds(&self) -> (bool, bool) {
        (self.eta < self.mu_b, self.eta < self.mu_a)
    }
}

pub fn purity_profile(sigma: &CovarianceMatrix) -> Result<PurityProfile> {
    if sigma.n_a() != 1 || sigma.n_b() != 1 {
        return Err(Error::Structural("purity profile needs a two-mode state".into()));
    }
    let mu_a = (-0.5 * log_det_spd(&sigma.block_a())?).exp();
    let mu_b = (-0.5 * log_det_spd(&sigma.block_b())?).exp();
    let mu = (-0.5 * sigma.log_det()?).exp();
    Ok(PurityProfile {
        mu_a,
        mu_b,
        mu,
        eta: mu_a * mu_b / mu,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Physicality {
    Physical,
    Unphysical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Separability {
    Separable,
    /// Purities alone do not decide; both kinds of state exist here.
    Coexistence,
    Entangled,
}

/// Position of a purity profile in the `(μ_A, μ_B, η)` classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub physicality: Physicality,
    /// `None` for unphysical profiles.
    pub separability: Option<Separability>,
    pub steer_a_to_b: bool,
    pub steer_b_to_a: bool,
}

pub fn classify_two_mode(p: &PurityProfile) -> RegionLabel {
    let physical = p.eta >= p.eta_0() - PHYSICALITY_TOL && p.eta <= 1.0 + PHYSICALITY_TOL;
    if !physical {
        return RegionLabel {
            physicality: Physicality::Unphysical,
            separability: None,
            steer_a_to_b: false,
            steer_b_to_a: false,
        };
    }
    let separability = if p.eta >= p.eta_s() {
        Separability::Separable
    } else if p.eta < p.eta_e() {
        Separability::Entangled
    } else {
        Separability::Coexistence
    };
    let (steer_a_to_b, steer_b_to_a) = p.steering_thresholds();
    RegionLabel {
        physicality: Physicality::Physical,
        separability: Some(separability),
        steer_a_to_b,
        steer_b_to_a,
    }
}

/// Separability decided on an actual state by partial transposition, which
/// is necessary and sufficient for two modes.
pub fn resolved_separability(sigma: &CovarianceMatrix, tol: f64) -> Separability {
    if is_ppt(sigma, tol) {
        Separability::Separable
    } else {
        Separability::Entangled
    }
}

/// A standard-form state with the given purities, from the `d = −c`
/// family: `a = 1/μ_A`, `b = 1/μ_B`, `c² = ab − 1/μ`.
///
/// This family reaches every physical profile, so `None` means the profile
/// is unphysical.
pub fn witness_state(p: &PurityProfile) -> Option<CovarianceMatrix> {
    if classify_two_mode(p).physicality != Physicality::Physical {
        return None;
    }
    let (a, b) = (1.0 / p.mu_a, 1.0 / p.mu_b);
    let c = (a * b - 1.0 / p.mu).max(0.0).sqrt();
    StandardFormParams::new(a, b, c, -c).to_cm().ok()
}

/// Pure two-mode squeezed state with local variance `a`.
pub fn tmsv_state(a: f64) -> Result<CovarianceMatrix> {
    if !(a >= 1.0) {
        return Err(Error::Domain(format!("local variance {a} must be at least 1")));
    }
    let c = (a * a - 1.0).sqrt();
    StandardFormParams::new(a, a, c, -c).to_cm()
}

/// Member of the extremal family with parameter `s` and local variance `a`
/// (`a ≥ s ≥ 1`): `b = a − 1 + a/s`, `c = −d = √((a−1)(s+1)a/s)`.
///
/// The family minimizes steerability at fixed entanglement and maximizes
/// steering asymmetry in the limit `a → ∞`. `G^{A→B} = ln s` holds for every
/// finite `a`; `G^{B→A}` approaches `ln(s+1)` with an `O(1/a)` error.
pub fn extremal_state(s: f64, a: f64) -> Result<CovarianceMatrix> {
    if !(s >= 1.0) || !(a >= s) || !a.is_finite() {
        return Err(Error::Domain(format!(
            "extremal family needs a ≥ s ≥ 1, got s = {s}, a = {a}"
        )));
    }
    let b = a - 1.0 + a / s;
    let c = ((a - 1.0) * (s + 1.0) * (a / s)).sqrt();
    StandardFormParams::new(a, b, c, -c).to_cm()
}

/// How much is known about the Rényi-2 entanglement of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntanglementKind {
    /// Pure state: `E = S(A)`.
    Exact,
    /// Extremal family: `E = ln(2s+1)`, attained as `a → ∞`.
    ExactAsymptotic,
    BoundsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementEstimate {
    pub kind: EntanglementKind,
    pub value: Option<f64>,
    pub lower: f64,
    pub upper: Option<f64>,
}

fn match_extremal(a: f64, b: f64, c: f64, d: f64) -> Option<f64> {
    let denom = b - a + 1.0;
    if !(denom > 0.0) {
        return None;
    }
    let s = a / denom;
    let rel = 1e-6;
    if s < 1.0 - rel || s > a * (1.0 + rel) {
        return None;
    }
    let c_expected = ((a - 1.0).max(0.0) * (s + 1.0) * (a / s)).sqrt();
    let scale = c_expected.max(1.0);
    if (c - c_expected).abs() <= rel * scale && (d + c).abs() <= rel * scale {
        Some(s.max(1.0))
    } else {
        None
    }
}

/// Gaussian Rényi-2 entanglement where a closed form is available, bounds
/// otherwise.
pub fn entanglement_renyi2(sigma: &CovarianceMatrix) -> Result<EntanglementEstimate> {
    let params = to_standard_form(sigma)?;
    let log_det = sigma.log_det()?;
    if log_det.abs() <= 1e-8 {
        let e = 0.5 * log_det_spd(&sigma.block_a())?;
        return Ok(EntanglementEstimate {
            kind: EntanglementKind::Exact,
            value: Some(e),
            lower: e,
            upper: Some(e),
        });
    }
    let StandardFormParams { a, b, c, d } = params;
    if let Some(s) = match_extremal(a, b, c, d).or_else(|| match_extremal(b, a, c, d)) {
        let e = (2.0 * s + 1.0).ln();
        return Ok(EntanglementEstimate {
            kind: EntanglementKind::ExactAsymptotic,
            value: Some(e),
            lower: e,
            upper: Some(e),
        });
    }
    let lower = steering_measure(sigma, Direction::AToB)?.max(steering_measure(sigma, Direction::BToA)?);
    Ok(EntanglementEstimate {
        kind: EntanglementKind::BoundsOnly,
        value: None,
        lower,
        upper: None,
    })
}

/// Evaluation of the two-mode steering-asymmetry inequalities.
///
/// Slacks are `right − left`; a negative slack is a violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsCheck {
    pub g_a_to_b: f64,
    pub g_b_to_a: f64,
    pub asymmetry: f64,
    /// `G^{B→A} − max{0, ln(e^{G^{A→B}} − 1)}`.
    pub lower_slack: f64,
    /// `ln(e^{G^{A→B}} + 1) − G^{B→A}`.
    pub upper_slack: f64,
    /// `ln 2 − |G^{B→A} − G^{A→B}|`.
    pub ceiling_slack: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub ceiling_ok: bool,
    /// Some inequality fails by more than [`BOUNDS_DEFECT_TOL`]; this can only
    /// come from a numerical defect.
    pub defect: bool,
}

/// `max{0, ln(e^g − 1)}`.
pub fn asymmetry_floor(g: f64) -> f64 {
    if g <= LN_2 {
        0.0
    } else {
        g.exp_m1().ln()
    }
}

/// `ln(e^g + 1)`.
pub fn asymmetry_ceiling(g: f64) -> f64 {
    g + (-g).exp().ln_1p()
}

/// `max{0, ln(½(e^E − 1))}`, the least steerability compatible with
/// Rényi-2 entanglement `E`.
pub fn entanglement_floor(e: f64) -> f64 {
    (0.5 * e.exp_m1()).ln().max(0.0)
}

pub fn steering_bounds_check(sigma: &CovarianceMatrix) -> Result<BoundsCheck> {
    if sigma.n_a() != 1 || sigma.n_b() != 1 {
        return Err(Error::Structural("bounds check needs a two-mode state".into()));
    }
    let g_a_to_b = steering_measure(sigma, Direction::AToB)?;
    let g_b_to_a = steering_measure(sigma, Direction::BToA)?;
    let asymmetry = (g_b_to_a - g_a_to_b).abs();
    let lower_slack = g_b_to_a - asymmetry_floor(g_a_to_b);
    let upper_slack = asymmetry_ceiling(g_a_to_b) - g_b_to_a;
    let ceiling_slack = LN_2 - asymmetry;
    let ok = |slack: f64| slack >= -BOUNDS_DEFECT_TOL;
    let (lower_ok, upper_ok, ceiling_ok) = (ok(lower_slack), ok(upper_slack), ok(ceiling_slack));
    if !(lower_ok && upper_ok && ceiling_ok) {
        log::error!(
            "steering bounds violated: G_AB = {g_a_to_b}, G_BA = {g_b_to_a} \
             (slacks {lower_slack:.3e}, {upper_slack:.3e}, {ceiling_slack:.3e})"
        );
    }
    Ok(BoundsCheck {
        g_a_to_b,
        g_b_to_a,
        asymmetry,
        lower_slack,
        upper_slack,
        ceiling_slack,
        lower_ok,
        upper_ok,
        ceiling_ok,
        defect: !(lower_ok && upper_ok && ceiling_ok),
    })
}

/// Guaranteed key rate `max{0, G + ln 2 − 1}` (nats) of one-sided
/// device-independent CV-QKD with homodyne detection.
///
/// Direct reconciliation uses `G^{B→A}`; reverse reconciliation `G^{A→B}`.
pub fn key_rate_bound(g: f64) -> Result<f64> {
    if !(g >= 0.0) {
        return Err(Error::Domain(format!("steerability {g} must be non-negative")));
    }
    Ok((g + LN_2 - 1.0).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reconciliation {
    /// Alice sends corrections to Bob; bounded through `G^{B→A}`.
    Direct,
    /// Bob sends corrections to Alice; bounded through `G^{A→B}`.
    Reverse,
}

impl Reconciliation {
    pub fn direction(self) -> Direction {
        match self {
            Reconciliation::Direct => Direction::BToA,
            Reconciliation::Reverse => Direction::AToB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRate {
    pub reconciliation: Reconciliation,
    pub nats: f64,
    pub bits: f64,
}

pub fn key_rates(report: &SteeringReport) -> [KeyRate; 2] {
    [Reconciliation::Direct, Reconciliation::Reverse].map(|reconciliation| {
        let nats = key_rate_bound(report.measure(reconciliation.direction()))
            .expect("steering measures are non-negative");
        KeyRate {
            reconciliation,
            nats,
            bits: nats / LN_2,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_cm;
    use crate::steering::steering_report;
    use crate::symplectic::apply_local_symplectic;

    fn rotation(theta: f64) -> DMatrix<f64> {
        let (s, c) = theta.sin_cos();
        DMatrix::from_row_slice(2, 2, &[c, s, -s, c])
    }

    #[test]
    fn standard_form_of_tmsv() {
        let p = to_standard_form(&tmsv_state(2.0).unwrap()).unwrap();
        let r3 = 3f64.sqrt();
        assert_eq!((p.a, p.b), (2.0, 2.0));
        assert!((p.c - r3).abs() < 1e-15 && (p.d + r3).abs() < 1e-15);
    }

    #[test]
    fn standard_form_survives_local_rotations() {
        let s = tmsv_state(2.0).unwrap();
        let r = apply_local_symplectic(&s, &rotation(0.7), &rotation(2.1)).unwrap();
        assert!(!is_standard_form(&r, 1e-12));
        let p = to_standard_form(&r).unwrap();
        let r3 = 3f64.sqrt();
        assert!((p.a - 2.0).abs() < 1e-8 && (p.b - 2.0).abs() < 1e-8);
        assert!((p.c - r3).abs() < 1e-8 && (p.d + r3).abs() < 1e-8, "{p:?}");
    }

    #[test]
    fn standard_form_of_product_state() {
        let a = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
        let b = DMatrix::from_diagonal_element(2, 2, 1.5);
        let s = CovarianceMatrix::from_blocks(&a, &b, &DMatrix::zeros(2, 2)).unwrap();
        let p = to_standard_form(&s).unwrap();
        assert_eq!((p.c, p.d), (0.0, 0.0));
        assert!((p.a - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn standard_form_reproduces_invariants() {
        for seed in 0..50 {
            let s = random_cm(1, 1, 3.0, seed);
            let p = to_standard_form(&s).unwrap();
            let r = p.to_cm().unwrap();
            let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(1.0);
            assert!(rel(s.det().unwrap(), r.det().unwrap()) < 1e-8);
            assert!(rel(s.block_c().determinant(), r.block_c().determinant()) < 1e-8);
            assert!(p.c >= p.d.abs());
        }
    }

    #[test]
    fn standard_form_of_squeezed_pure_states() {
        let cfg = crate::random::RandomCmConfig {
            temperature_scale: 1.0,
            max_squeezing: 1.5,
        };
        for seed in 0..200 {
            let mut rng = crate::random::rng_for(seed, 0);
            let sigma = crate::random::random_cm_with(1, 1, &cfg, &mut rng);
            let p = to_standard_form(&sigma).unwrap();
            assert!((p.det().ln() - sigma.log_det().unwrap()).abs() < 1e-6);
            assert!((p.c + p.d).abs() <= 1e-6 * p.c);
        }
    }

    #[test]
    fn standard_form_rejects_multimode() {
        assert!(matches!(
            to_standard_form(&random_cm(2, 1, 2.0, 1)),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn purity_examples() {
        let v = purity_profile(&CovarianceMatrix::vacuum(1, 1).unwrap()).unwrap();
        for x in [v.mu_a, v.mu_b, v.mu, v.eta] {
            assert!((x - 1.0).abs() < 1e-15);
        }
        let t = purity_profile(&tmsv_state(2.0).unwrap()).unwrap();
        assert!((t.mu_a - 0.5).abs() < 1e-14 && (t.mu_b - 0.5).abs() < 1e-14);
        assert!((t.mu - 1.0).abs() < 1e-12 && (t.eta - 0.25).abs() < 1e-12);
        let x = purity_profile(&extremal_state(2.0, 1e4).unwrap()).unwrap();
        assert!((x.eta - x.eta_0()).abs() < 1e-3);
    }

    #[test]
    fn classify_vacuum_and_tmsv() {
        let v = classify_two_mode(&PurityProfile::from_eta(1.0, 1.0, 1.0));
        assert_eq!(v.physicality, Physicality::Physical);
        assert_eq!(v.separability, Some(Separability::Separable));
        assert!(!v.steer_a_to_b && !v.steer_b_to_a);

        let p = PurityProfile::from_eta(0.5, 0.5, 0.25);
        assert!((p.eta_e() - 7f64.sqrt() / 4.0).abs() < 1e-15);
        let t = classify_two_mode(&p);
        assert_eq!(t.separability, Some(Separability::Entangled));
        assert!(t.steer_a_to_b && t.steer_b_to_a);
    }

    #[test]
    fn one_way_thresholds() {
        // Below η₀ = 0.72: the thresholds alone say one-way, the label says
        // unphysical.
        let p = PurityProfile::from_eta(0.4, 0.8, 0.6);
        assert_eq!(p.steering_thresholds(), (true, false));
        let l = classify_two_mode(&p);
        assert_eq!(l.physicality, Physicality::Unphysical);
        assert_eq!(l.separability, None);
        assert!(!l.steer_a_to_b && !l.steer_b_to_a);

        let q = PurityProfile::from_eta(0.4, 0.8, 0.75);
        let l = classify_two_mode(&q);
        assert_eq!(l.physicality, Physicality::Physical);
        assert_eq!((l.steer_a_to_b, l.steer_b_to_a), (true, false));
        let w = witness_state(&q).unwrap();
        assert!(is_bona_fide(&w, DEFAULT_TOL));
        let r = steering_report(&w).unwrap();
        assert!(r.g_a_to_b > 0.0 && r.g_b_to_a == 0.0);
        assert!((r.g_a_to_b - (0.8f64 / 0.75).ln()).abs() < 1e-12);
    }

    #[test]
    fn witness_reproduces_purities() {
        let p = PurityProfile::from_eta(0.3, 0.7, 0.7);
        let w = purity_profile(&witness_state(&p).unwrap()).unwrap();
        assert!((w.mu_a - 0.3).abs() < 1e-12);
        assert!((w.mu_b - 0.7).abs() < 1e-12);
        assert!((w.eta - 0.7).abs() < 1e-12);
        assert!(witness_state(&PurityProfile::from_eta(0.3, 0.7, 0.5)).is_none());
        assert!(witness_state(&PurityProfile::from_eta(0.4, 0.8, 0.6)).is_none());
    }

    #[test]
    fn tmsv_examples() {
        let v = tmsv_state(1.0).unwrap();
        assert_eq!(v.matrix(), &DMatrix::identity(4, 4));
        assert!(matches!(tmsv_state(0.5), Err(Error::Domain(_))));
        for a in [1.5, 2.0, 7.0] {
            let s = tmsv_state(a).unwrap();
            let e = entanglement_renyi2(&s).unwrap();
            assert_eq!(e.kind, EntanglementKind::Exact);
            assert!((e.value.unwrap() - a.ln()).abs() < 1e-12);
            for d in [Direction::AToB, Direction::BToA] {
                assert!((steering_measure(&s, d).unwrap() - a.ln()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn extremal_examples() {
        let s = extremal_state(1.0, 1e8).unwrap();
        assert!(steering_measure(&s, Direction::AToB).unwrap() < 1e-5);
        assert!((steering_measure(&s, Direction::BToA).unwrap() - LN_2).abs() < 1e-5);
        let finite = extremal_state(2.0, 2.0).unwrap();
        assert!(is_bona_fide(&finite, DEFAULT_TOL));
        assert!((steering_measure(&finite, Direction::BToA).unwrap() - 3f64.ln()).abs() > 1e-3);
        assert!(extremal_state(2.0, 1.5).is_err());
        assert!(extremal_state(0.5, 3.0).is_err());
    }

    #[test]
    fn entanglement_kinds() {
        let x = entanglement_renyi2(&extremal_state(2.0, 1e8).unwrap()).unwrap();
        assert_eq!(x.kind, EntanglementKind::ExactAsymptotic);
        assert!((x.value.unwrap() - 5f64.ln()).abs() < 1e-12);

        let swapped = extremal_state(3.0, 1e6).unwrap().swap_parties();
        let y = entanglement_renyi2(&swapped).unwrap();
        assert_eq!(y.kind, EntanglementKind::ExactAsymptotic);
        assert!((y.value.unwrap() - 7f64.ln()).abs() < 1e-9);

        let m = random_cm(1, 1, 3.0, 9);
        let e = entanglement_renyi2(&m).unwrap();
        assert_eq!(e.kind, EntanglementKind::BoundsOnly);
        assert!(e.value.is_none() && e.upper.is_none());
        let r = steering_report(&m).unwrap();
        assert_eq!(e.lower, r.g_a_to_b.max(r.g_b_to_a));
    }

    #[test]
    fn bounds_on_tmsv_are_interior() {
        let b = steering_bounds_check(&tmsv_state(3.0).unwrap()).unwrap();
        assert!(b.asymmetry < 1e-12);
        assert!(b.lower_slack > 0.0 && b.upper_slack > 0.0 && b.ceiling_slack > 0.0);
        assert!(!b.defect);
    }

    #[test]
    fn bounds_on_extremal_saturate() {
        let b = steering_bounds_check(&extremal_state(1.0, 1e8).unwrap()).unwrap();
        assert!((b.asymmetry - LN_2).abs() < 1e-5);
        assert!(b.ceiling_slack.abs() < 1e-5);
        assert!(!b.defect);
    }

    #[test]
    fn key_rate_values() {
        assert_eq!(key_rate_bound(0.0).unwrap(), 0.0);
        assert_eq!(key_rate_bound(1.0 - LN_2).unwrap(), 0.0);
        assert!((key_rate_bound(1.0).unwrap() - LN_2).abs() < 1e-15);
        assert!(matches!(key_rate_bound(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn key_rates_follow_reconciliation() {
        let r = steering_report(&extremal_state(1.0, 1e8).unwrap()).unwrap();
        let [direct, reverse] = key_rates(&r);
        assert_eq!(direct.reconciliation, Reconciliation::Direct);
        assert!((direct.nats - (2.0 * LN_2 - 1.0)).abs() < 1e-5);
        assert_eq!(reverse.nats, 0.0);
        assert!((direct.bits * LN_2 - direct.nats).abs() < 1e-15);
    }
}
