//! Grid scans behind the two figures: the `(μ_A, μ_B)` classification at
//! fixed `η`, and steerability against Rényi-2 entanglement along the pure
//! and extremal families.
//!
//! Cells are evaluated in parallel and returned in row-major grid order.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt17;
use crate::steering::{steering_report, Direction};
use crate::twomode::{
    asymmetry_ceiling, asymmetry_floor, classify_two_mode, entanglement_floor, extremal_state,
    tmsv_state, witness_state, Physicality, PurityProfile, RegionLabel, Separability,
};
use crate::steering::steering_measure;

/// `steps` evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::Domain(format!("grid needs at least 2 steps, got {steps}")));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::Domain(format!("grid range [{min}, {max}] is empty")));
        }
        Ok(Self { min, max, steps })
    }

    /// Parses `MIN:MAX:STEPS`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let [min, max, steps] = parts[..] else {
            return Err(Error::Parse(format!("grid `{spec}` is not MIN:MAX:STEPS")));
        };
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}")));
        let steps = steps
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("`{steps}`: {e}")))?;
        Self::new(num(min)?, num(max)?, steps)
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCell {
    pub profile: PurityProfile,
    pub label: RegionLabel,
    /// Steerabilities of the witness state; `None` where no physical state
    /// has these purities.
    pub g_a_to_b: Option<f64>,
    pub g_b_to_a: Option<f64>,
}

impl RegionCell {
    /// `max{G^{A→B}, G^{B→A}}`.
    pub fn g_sym(&self) -> Option<f64> {
        Some(self.g_a_to_b?.max(self.g_b_to_a?))
    }
}

fn region_cell(mu_a: f64, mu_b: f64, eta: f64) -> RegionCell {
    let profile = PurityProfile::from_eta(mu_a, mu_b, eta);
    let label = classify_two_mode(&profile);
    let report = witness_state(&profile).and_then(|w| steering_report(&w).ok());
    RegionCell {
        profile,
        label,
        g_a_to_b: report.as_ref().map(|r| r.g_a_to_b),
        g_b_to_a: report.as_ref().map(|r| r.g_b_to_a),
    }
}

/// Classification of every `(μ_A, μ_B)` grid point at fixed `η`; `μ_A` is
/// the outer (row) index.
pub fn scan_regions(eta: f64, mu_a: &GridAxis, mu_b: &GridAxis) -> Result<Vec<RegionCell>> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("η = {eta} outside (0, 1]")));
    }
    for axis in [mu_a, mu_b] {
        if !(axis.min > 0.0 && axis.max <= 1.0) {
            return Err(Error::Domain(format!(
                "purity grid [{}, {}] must lie in (0, 1]",
                axis.min, axis.max
            )));
        }
    }
    let (na, nb) = (mu_a.steps, mu_b.steps);
    Ok((0..na * nb)
        .into_par_iter()
        .map(|k| region_cell(mu_a.value(k / nb), mu_b.value(k % nb), eta))
        .collect())
}

fn label_strings(label: &RegionLabel) -> (&'static str, &'static str) {
    let physicality = match label.physicality {
        Physicality::Physical => "physical",
        Physicality::Unphysical => "unphysical",
    };
    let separability = match label.separability {
        Some(Separability::Separable) => "separable",
        Some(Separability::Coexistence) => "coexistence",
        Some(Separability::Entangled) => "entangled",
        None => "",
    };
    (physicality, separability)
}

pub const REGION_HEADER: &str =
    "mu_a,mu_b,eta,physicality,separability,steer_a_to_b,steer_b_to_a,g_a_to_b,g_b_to_a,g_sym";

pub fn write_regions_csv<W: Write>(cells: &[RegionCell], mut w: W) -> std::io::Result<()> {
    let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
    writeln!(w, "{REGION_HEADER}")?;
    for c in cells {
        let (physicality, separability) = label_strings(&c.label);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt17(c.profile.mu_a),
            fmt17(c.profile.mu_b),
            fmt17(c.profile.eta),
            physicality,
            separability,
            c.label.steer_a_to_b,
            c.label.steer_b_to_a,
            opt(c.g_a_to_b),
            opt(c.g_b_to_a),
            opt(c.g_sym()),
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Two-mode squeezed states, local variance `2s+1`.
    Pure,
    /// Extremal states with parameter `s`.
    Extremal,
    /// Extremal states with the parties swapped.
    #[serde(rename = "extremal_ba")]
    ExtremalSwapped,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Pure => "pure",
            Family::Extremal => "extremal",
            Family::ExtremalSwapped => "extremal_ba",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsRow {
    pub family: Family,
    pub s: f64,
    /// Local variance of the generated state.
    pub a: f64,
    /// Rényi-2 entanglement of the family member (asymptotic for extremal).
    pub entanglement: f64,
    pub g_a_to_b: f64,
    pub g_b_to_a: f64,
    /// `max{0, ln(½(e^E − 1))}`.
    pub entanglement_floor: f64,
    /// `max{0, ln(e^{G^{A→B}} − 1)}`.
    pub asymmetry_floor: f64,
    /// `ln(e^{G^{A→B}} + 1)`.
    pub asymmetry_ceiling: f64,
}

fn bounds_row(family: Family, s: f64, a: f64) -> Result<BoundsRow> {
    let (sigma, local, entanglement) = match family {
        Family::Pure => {
            let ap = 2.0 * s + 1.0;
            (tmsv_state(ap)?, ap, ap.ln())
        }
        Family::Extremal => (extremal_state(s, a)?, a, (2.0 * s + 1.0).ln()),
        Family::ExtremalSwapped => (extremal_state(s, a)?.swap_parties(), a, (2.0 * s + 1.0).ln()),
    };
    let g_a_to_b = steering_measure(&sigma, Direction::AToB)?;
    let g_b_to_a = steering_measure(&sigma, Direction::BToA)?;
    Ok(BoundsRow {
        family,
        s,
        a: local,
        entanglement,
        g_a_to_b,
        g_b_to_a,
        entanglement_floor: entanglement_floor(entanglement),
        asymmetry_floor: asymmetry_floor(g_a_to_b),
        asymmetry_ceiling: asymmetry_ceiling(g_a_to_b),
    })
}

/// Rows for the pure, extremal and swapped-extremal families at every `s`
/// of the grid; extremal members use local variance `a`.
pub fn scan_bounds(s_axis: &GridAxis, a: f64) -> Result<Vec<BoundsRow>> {
    if !(s_axis.min >= 1.0) {
        return Err(Error::Domain(format!("s grid must start at 1 or above, got {}", s_axis.min)));
    }
    if !(a >= s_axis.max) {
        return Err(Error::Domain(format!("a = {a} must be at least s_max = {}", s_axis.max)));
    }
    let families = [Family::Pure, Family::Extremal, Family::ExtremalSwapped];
    (0..s_axis.steps * families.len())
        .into_par_iter()
        .map(|k| bounds_row(families[k % families.len()], s_axis.value(k / families.len()), a))
        .collect()
}

pub const BOUNDS_HEADER: &str =
    "family,s,a,e,g_a_to_b,g_b_to_a,e_floor,asymmetry_floor,asymmetry_ceiling";

pub fn write_bounds_csv<W: Write>(rows: &[BoundsRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{BOUNDS_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.family.name(),
            fmt17(r.s),
            fmt17(r.a),
            fmt17(r.entanglement),
            fmt17(r.g_a_to_b),
            fmt17(r.g_b_to_a),
            fmt17(r.entanglement_floor),
            fmt17(r.asymmetry_floor),
            fmt17(r.asymmetry_ceiling),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing() {
        let g = GridAxis::parse("0.1:1:10").unwrap();
        assert_eq!(g.values().len(), 10);
        assert_eq!(g.value(9), 1.0);
        assert!(GridAxis::parse("0:1:1").is_err());
        assert!(GridAxis::parse("1:0:5").is_err());
        assert!(matches!(GridAxis::parse("0:1"), Err(Error::Parse(_))));
    }

    #[test]
    fn region_points_at_half() {
        // Below η_e ≈ 0.983, but μ = 1.62 > 1: no state has these purities.
        let c = region_cell(0.9, 0.9, 0.5);
        assert!(c.profile.eta < c.profile.eta_e());
        assert_eq!(c.label.physicality, Physicality::Unphysical);
        assert_eq!(c.g_sym(), None);

        let c = region_cell(0.3, 0.3, 0.5);
        assert_eq!(c.label.separability, Some(Separability::Coexistence));
        assert!(!c.label.steer_a_to_b && !c.label.steer_b_to_a);
        assert_eq!(c.g_sym(), Some(0.0));

        let c = region_cell(0.3, 0.6, 0.5);
        assert_eq!(c.label.separability, Some(Separability::Entangled));
        assert!(c.label.steer_a_to_b && !c.label.steer_b_to_a);
        assert!((c.g_a_to_b.unwrap() - (0.6f64 / 0.5).ln()).abs() < 1e-12);
        assert_eq!(c.g_b_to_a, Some(0.0));

        let c = region_cell(0.2, 0.9, 0.5);
        assert_eq!(c.label.physicality, Physicality::Unphysical);
        assert_eq!(c.g_sym(), None);
    }

    #[test]
    fn bounds_rows_match_closed_forms() {
        let axis = GridAxis::new(1.0, 2.0, 2).unwrap();
        let rows = scan_bounds(&axis, 1e8).unwrap();
        let find = |f: Family, s: f64| *rows.iter().find(|r| r.family == f && r.s == s).unwrap();
        let x = find(Family::Extremal, 2.0);
        assert!((x.entanglement - 5f64.ln()).abs() < 1e-15);
        assert!((x.g_a_to_b - 2f64.ln()).abs() < 1e-5);
        assert!((x.g_b_to_a - 3f64.ln()).abs() < 1e-5);
        let p = find(Family::Pure, 1.0);
        assert!((p.entanglement - 3f64.ln()).abs() < 1e-15);
        assert!((p.g_a_to_b - 3f64.ln()).abs() < 1e-12 && (p.g_b_to_a - 3f64.ln()).abs() < 1e-12);
        assert!(find(Family::Extremal, 1.0).g_a_to_b < 1e-5);
        let sw = find(Family::ExtremalSwapped, 2.0);
        assert!((sw.g_a_to_b - 3f64.ln()).abs() < 1e-5);
    }

    #[test]
    fn bounds_preconditions() {
        let axis = GridAxis::new(1.0, 5.0, 3).unwrap();
        assert!(scan_bounds(&axis, 4.0).is_err());
        assert!(scan_bounds(&GridAxis::new(0.5, 2.0, 3).unwrap(), 10.0).is_err());
    }

    #[test]
    fn csv_is_deterministic() {
        let axis = GridAxis::new(0.05, 1.0, 20).unwrap();
        let render = || {
            let mut out = Vec::new();
            write_regions_csv(&scan_regions(0.5, &axis, &axis).unwrap(), &mut out).unwrap();
            out
        };
        let first = render();
        assert_eq!(first, render());
        let text = String::from_utf8(first).unwrap();
        assert_eq!(text.lines().next().unwrap(), REGION_HEADER);
        assert_eq!(text.lines().count(), 401);
    }
}
