//! Physical parameters, the polariton mixing angle and every quantity derived
//! from it, plus the strong-nonlinearity feasibility report.
//!
//! Rates are plain numbers in whatever unit the caller picks: units of the
//! cavity decay rate (κ = 1) for the dynamics, or 2π·MHz for the
//! experimental feasibility table. Drive amplitudes follow
//! `Ω_Λ = sqrt(2 K_Λ) β` evaluated numerically in the same unit, with β
//! treated as a dimensionless amplitude.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::scalar::{lit, to_f64, Real};

/// Raw model inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams<T> {
    /// Number of atoms N in the ensemble.
    pub n_atoms: u64,
    /// Single-atom cavity coupling g.
    pub g: T,
    /// Cavity field decay rate κ.
    pub kappa: T,
    /// Decay rate of the intermediate excited state |e⟩.
    pub gamma_e: T,
    /// Decay rate of the Rydberg states.
    pub gamma_r: T,
    /// Uniform blockade interaction strength χ̄.
    pub chi_bar: T,
    /// Cosine of the mixing angle; the control Rabi frequency is derived from it.
    pub cos_theta: T,
    /// Weak coherent drive amplitude β.
    pub beta: T,
    /// Detuning Δ(ω) of the drive from the cavity resonance.
    pub delta: T,
    /// Control Rabi frequency, only consulted when `g = 0` (where cosθ = 1
    /// no longer determines Ω).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_rabi: Option<T>,
}

impl<T: Real> PhysicalParams<T> {
    /// Parameters of the cosθ sweep and the time traces in units of κ:
    /// κ = 1, γ_e = κ, γ_r = 0.001κ, χ̄ = 2κ, g = 3κ, β = 1, N = 600, cosθ = 0.04.
    pub fn blockade_reference() -> Self {
        Self {
            n_atoms: 600,
            g: lit(3.0),
            kappa: T::one(),
            gamma_e: T::one(),
            gamma_r: lit(0.001),
            chi_bar: lit(2.0),
            cos_theta: lit(0.04),
            beta: T::one(),
            delta: T::zero(),
            control_rabi: None,
        }
    }

    /// Experimental numbers in units of 2π·MHz: 600 atoms, g = 200,
    /// (κ, γ_e) = (53, 3), χ̄ = 100, γ_r = 0.001 (2π kHz), cosθ = 0.04, β = 7.
    pub fn experimental_reference() -> Self {
        Self {
            n_atoms: 600,
            g: lit(200.0),
            kappa: lit(53.0),
            gamma_e: lit(3.0),
            gamma_r: lit(0.001),
            chi_bar: lit(100.0),
            cos_theta: lit(0.04),
            beta: lit(7.0),
            delta: T::zero(),
            control_rabi: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(name: &'static str, value: f64, reason: &'static str) -> SimError {
            SimError::InvalidParameter { name, value, reason }
        }
        if self.n_atoms == 0 {
            return Err(bad("n_atoms", 0.0, "must be at least 1"));
        }
        let rates = [
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma_e", self.gamma_e),
            ("gamma_r", self.gamma_r),
            ("chi_bar", self.chi_bar),
            ("beta", self.beta),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < T::zero() {
                return Err(bad(name, to_f64(v), "must be finite and non-negative"));
            }
        }
        if !self.delta.is_finite() {
            return Err(bad("delta", to_f64(self.delta), "must be finite"));
        }
        let c = self.cos_theta;
        if !(c > T::zero() && c <= T::one()) {
            return Err(bad("cos_theta", to_f64(c), "must lie in (0, 1]"));
        }
        if self.g == T::zero() {
            if c != T::one() {
                return Err(bad("cos_theta", to_f64(c), "must be 1 when g = 0"));
            }
            if let Some(om) = self.control_rabi {
                if !om.is_finite() || om < T::zero() {
                    return Err(bad("control_rabi", to_f64(om), "must be finite and non-negative"));
                }
            }
        }
        Ok(())
    }

    /// Collective coupling √N·g.
    pub fn collective_coupling(&self) -> T {
        lit::<T>(self.n_atoms as f64).sqrt() * self.g
    }
}

/// Quantities derived from the mixing angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams<T> {
    pub cos_theta: T,
    pub sin_theta: T,
    /// Control Rabi frequency Ω.
    pub control_rabi: T,
    /// Bright polariton energy E₁ = √(Ng² + Ω²).
    pub e1: T,
    /// E₂ = −E₁.
    pub e2: T,
    /// Effective decay rates K₀ = κcos²θ, K₁ = K₂ = κsin²θ.
    pub k0: T,
    pub k1: T,
    pub k2: T,
    /// Drive strengths Ω_Λ = √(2K_Λ)β.
    pub omega_drive_0: T,
    pub omega_drive_1: T,
    pub omega_drive_2: T,
    /// Dark-polariton nonlinearity λ = χ̄sin²θ.
    pub lambda_blockade: T,
    /// χ̄cos²θ/2, coefficient of the bright-bright χ̄ terms.
    pub chi_bright: T,
    /// χ̄sinθcosθ/√2, coefficient of the dark-bright χ̄ terms.
    pub chi_mixed: T,
    /// E₁ over the largest coupling that must stay small against it.
    pub rwa_margin: T,
    // carried along so Hamiltonian builders need only this struct
    pub kappa: T,
    pub gamma_e: T,
    pub gamma_r: T,
    pub chi_bar: T,
    pub beta: T,
    pub delta: T,
}

impl<T: Real> DerivedParams<T> {
    /// Polariton energies (E₀, E₁, E₂).
    pub fn energies(&self) -> [T; 3] {
        [T::zero(), self.e1, self.e2]
    }

    pub fn decay_rates(&self) -> [T; 3] {
        [self.k0, self.k1, self.k2]
    }

    pub fn drive_strengths(&self) -> [T; 3] {
        [self.omega_drive_0, self.omega_drive_1, self.omega_drive_2]
    }

    /// Same parameters with a different drive detuning.
    pub fn with_delta(mut self, delta: T) -> Self {
        self.delta = delta;
        self
    }
}

/// cosθ = Ω/√(Ng² + Ω²).
pub fn cos_theta_from_rabi<T: Real>(collective_coupling: T, control_rabi: T) -> T {
    if control_rabi.is_infinite() {
        return T::one();
    }
    control_rabi / collective_coupling.hypot(control_rabi)
}

pub fn derive_params<T: Real>(p: &PhysicalParams<T>) -> Result<DerivedParams<T>> {
    p.validate()?;
    let one = T::one();
    let two = lit::<T>(2.0);
    let c = p.cos_theta;
    let s = ((one - c) * (one + c)).sqrt();
    let coupling = p.collective_coupling();

    let control_rabi = if coupling == T::zero() {
        p.control_rabi.unwrap_or_else(T::zero)
    } else if s == T::zero() {
        T::infinity()
    } else {
        coupling * c / s
    };
    let e1 = if control_rabi.is_infinite() {
        T::infinity()
    } else {
        coupling.hypot(control_rabi)
    };

    let k0 = p.kappa * c * c;
    let k1 = p.kappa * s * s;
    let drive = |k: T| (two * k).sqrt() * p.beta;
    let omega_drive_0 = drive(k0);
    let omega_drive_1 = drive(k1);
    let lambda_blockade = p.chi_bar * s * s;
    let chi_bright = p.chi_bar * c * c / two;
    let chi_mixed = p.chi_bar * s * c / two.sqrt();

    let largest = [chi_bright, chi_mixed, omega_drive_0, omega_drive_1, omega_drive_1]
        .into_iter()
        .fold(T::zero(), T::max);
    let rwa_margin = if largest == T::zero() {
        T::infinity()
    } else {
        e1 / largest
    };

    Ok(DerivedParams {
        cos_theta: c,
        sin_theta: s,
        control_rabi,
        e1,
        e2: -e1,
        k0,
        k1,
        k2: k1,
        omega_drive_0,
        omega_drive_1,
        omega_drive_2: omega_drive_1,
        lambda_blockade,
        chi_bright,
        chi_mixed,
        rwa_margin,
        kappa: p.kappa,
        gamma_e: p.gamma_e,
        gamma_r: p.gamma_r,
        chi_bar: p.chi_bar,
        beta: p.beta,
        delta: p.delta,
    })
}

/// Unit label used when printing rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    /// Rates in units of κ.
    #[default]
    Kappa,
    /// Rates in units of 2π·MHz.
    TwoPiMhz,
}

impl Units {
    pub fn label(self) -> &'static str {
        match self {
            Units::Kappa => "kappa",
            Units::TwoPiMhz => "2pi*MHz",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub name: &'static str,
    pub symbol: &'static str,
    pub value: f64,
    /// Whether the value carries the rate unit (false for dimensionless ratios).
    pub is_rate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioCheck {
    pub name: &'static str,
    pub value: f64,
    pub pass: bool,
}

/// Strong-nonlinearity and RWA-validity summary.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub units: Units,
    pub threshold: f64,
    pub rows: Vec<ReportRow>,
    pub checks: Vec<RatioCheck>,
}

pub const DEFAULT_RATIO_THRESHOLD: f64 = 50.0;

impl FeasibilityReport {
    pub fn value(&self, symbol: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.symbol == symbol)
            .map(|r| r.value)
            .or_else(|| self.checks.iter().find(|c| c.name == symbol).map(|c| c.value))
    }

    pub fn check(&self, name: &str) -> Option<&RatioCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// CSV body lines `quantity,value,unit,flag` without header.
    pub fn csv_rows(&self) -> Vec<(String, f64, String, String)> {
        let mut out = Vec::new();
        for r in &self.rows {
            let unit = if r.is_rate { self.units.label() } else { "1" };
            out.push((r.symbol.to_string(), r.value, unit.to_string(), String::new()));
        }
        for c in &self.checks {
            let flag = if c.pass { "pass" } else { "fail" };
            out.push((c.name.to_string(), c.value, "1".to_string(), flag.to_string()));
        }
        out
    }
}

pub fn feasibility_report<T: Real>(
    p: &PhysicalParams<T>,
    units: Units,
    threshold: f64,
) -> Result<FeasibilityReport> {
    let d = derive_params(p)?;
    let f = to_f64::<T>;
    let rate = |name, symbol, value| ReportRow { name, symbol, value, is_rate: true };
    let rows = vec![
        rate("bright polariton energy", "E1", f(d.e1)),
        rate("control Rabi frequency", "Omega", f(d.control_rabi)),
        rate("blockade nonlinearity", "lambda", f(d.lambda_blockade)),
        rate("dark polariton decay", "K0", f(d.k0)),
        rate("bright polariton decay", "K1", f(d.k1)),
        rate("dark polariton drive", "Omega0", f(d.omega_drive_0)),
        rate("bright polariton drive", "Omega1", f(d.omega_drive_1)),
        rate("bright-bright coupling", "chi_cos2/2", f(d.chi_bright)),
        rate("dark-bright coupling", "chi_sincos/sqrt2", f(d.chi_mixed)),
        rate("Rydberg decay", "gamma_r", f(p.gamma_r)),
        ReportRow { name: "sin(theta)", symbol: "sin_theta", value: f(d.sin_theta), is_rate: false },
    ];
    let ratio = |num: f64, den: f64| if den == 0.0 { if num == 0.0 { 0.0 } else { f64::INFINITY } } else { num / den };
    let lambda = f(d.lambda_blockade);
    let checks = [
        ("lambda/K0", ratio(lambda, f(d.k0))),
        ("lambda/gamma_r", ratio(lambda, f(p.gamma_r))),
        ("rwa_margin", f(d.rwa_margin)),
    ]
    .into_iter()
    .map(|(name, value)| RatioCheck { name, value, pass: value >= threshold })
    .collect();
    Ok(FeasibilityReport { units, threshold, rows, checks })
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<26} {:>18} {:>16}  {}", "quantity", "symbol", "value", "unit")?;
        for r in &self.rows {
            let unit = if r.is_rate { self.units.label() } else { "" };
            writeln!(f, "{:<26} {:>18} {:>16.6}  {}", r.name, r.symbol, r.value, unit)?;
        }
        writeln!(f)?;
        writeln!(f, "{:<26} {:>18} {:>16}  (threshold {})", "ratio", "", "value", self.threshold)?;
        for c in &self.checks {
            let flag = if c.pass { "pass" } else { "FAIL" };
            writeln!(f, "{:<26} {:>18} {:>16.4}  {}", c.name, "", c.value, flag)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig2() -> PhysicalParams<f64> {
        PhysicalParams::blockade_reference()
    }

    #[test]
    fn blockade_reference_values() {
        // Independent closed-form evaluation (python, double precision):
        // s = sqrt(1-0.04^2), E1 = sqrt(600)*3/s, ...
        let d = derive_params(&fig2()).unwrap();
        assert_relative_eq!(d.sin_theta, 0.999_199_679_743_743_7, max_relative = 1e-12);
        assert_relative_eq!(d.e1, 73.543_550_676_819_02, max_relative = 1e-9);
        assert_relative_eq!(d.control_rabi, 2.941_742_027_072_761, max_relative = 1e-9);
        assert_relative_eq!(d.k0, 0.0016, max_relative = 1e-12);
        assert_relative_eq!(d.lambda_blockade, 1.9968, max_relative = 1e-12);
        assert_relative_eq!(d.omega_drive_0, 0.056_568_542_494_923_8, max_relative = 1e-12);
        assert_eq!(d.e2, -d.e1);
    }

    #[test]
    fn experimental_reference_values() {
        let d = derive_params(&PhysicalParams::<f64>::experimental_reference()).unwrap();
        assert!((d.lambda_blockade - 99.84).abs() < 1e-9);
        assert!((d.k0 - 0.0848).abs() < 1e-12);
        assert!((d.chi_bright - 0.08).abs() < 1e-12);
        assert!((d.chi_mixed - 2.826).abs() < 1e-3);
        assert!((d.omega_drive_0 - 2.883).abs() < 1e-3);
    }

    #[test]
    fn zero_coupling_is_bare_photon() {
        let p = PhysicalParams {
            g: 0.0,
            cos_theta: 1.0,
            control_rabi: Some(5.0),
            ..fig2()
        };
        let d = derive_params(&p).unwrap();
        assert_eq!(d.lambda_blockade, 0.0);
        assert_eq!(d.k0, p.kappa);
        assert_eq!(d.k1, 0.0);
        assert_eq!(d.k2, 0.0);
        assert_eq!(d.e1, 5.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        for c in [0.0, -0.1, 1.5, f64::NAN] {
            let p = PhysicalParams { cos_theta: c, ..fig2() };
            assert!(matches!(derive_params(&p), Err(SimError::InvalidParameter { name: "cos_theta", .. })));
        }
        let p = PhysicalParams { kappa: -1.0, ..fig2() };
        assert!(derive_params(&p).is_err());
        let p = PhysicalParams { n_atoms: 0, ..fig2() };
        assert!(derive_params(&p).is_err());
        let p = PhysicalParams { g: 0.0, ..fig2() };
        assert!(derive_params(&p).is_err());
    }

    #[test]
    fn feasibility_ratios() {
        let r = feasibility_report(&PhysicalParams::<f64>::experimental_reference(), Units::TwoPiMhz, 50.0).unwrap();
        let ratio = r.value("lambda/K0").unwrap();
        assert!((1.1e3..1.2e3).contains(&ratio), "{ratio}");
        assert!(r.all_pass());

        let r = feasibility_report(&fig2(), Units::Kappa, 50.0).unwrap();
        assert!((r.value("lambda/K0").unwrap() - 1248.0).abs() < 1e-9);

        let p = PhysicalParams { cos_theta: 1.0, ..PhysicalParams::<f64>::experimental_reference() };
        let r = feasibility_report(&p, Units::TwoPiMhz, 50.0).unwrap();
        assert_eq!(r.value("lambda/K0").unwrap(), 0.0);
        assert!(!r.check("lambda/K0").unwrap().pass);
        assert!(r.to_string().contains("FAIL"));
    }

    #[test]
    fn single_precision_matches() {
        let d32 = derive_params(&PhysicalParams::<f32>::blockade_reference()).unwrap();
        let d64 = derive_params(&fig2()).unwrap();
        assert!((d32.e1 as f64 - d64.e1).abs() / d64.e1 < 1e-6);
        assert!((d32.lambda_blockade as f64 - d64.lambda_blockade).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn mixing_angle_round_trip(c in 1e-3f64..0.999, g in 0.01f64..50.0, n in 1u64..10_000) {
            let p = PhysicalParams { cos_theta: c, g, n_atoms: n, ..fig2() };
            let d = derive_params(&p).unwrap();
            let back = cos_theta_from_rabi(p.collective_coupling(), d.control_rabi);
            prop_assert!(((back - c) / c).abs() < 1e-12);
            prop_assert!((d.sin_theta.powi(2) + d.cos_theta.powi(2) - 1.0).abs() < 1e-15);
            prop_assert!(d.k0 + d.k1 <= 2.0 * p.kappa);
            prop_assert!(d.lambda_blockade <= p.chi_bar);
            prop_assert_eq!(d.e1, d.e2.abs());
        }

        #[test]
        fn smaller_cos_theta_trades_decay_for_nonlinearity(a in 0.01f64..0.98, step in 1e-3f64..0.01) {
            let hi = derive_params(&PhysicalParams { cos_theta: a + step, ..fig2() }).unwrap();
            let lo = derive_params(&PhysicalParams { cos_theta: a, ..fig2() }).unwrap();
            prop_assert!(lo.k0 < hi.k0);
            prop_assert!(lo.lambda_blockade > hi.lambda_blockade);
        }
    }
}
