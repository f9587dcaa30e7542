//! Fiber parameters, dimensionless scales and the Raman response model.
//!
//! All frequencies handed to [`RamanModel`] methods are dimensionless
//! (`Ω̂ = Ω·t0`). The model is a sum of damped-oscillator Lorentzians,
//!
//! ```text
//! h(τ)   = (1 - f_R) δ(τ) + Θ(τ) Σ_j F_j δ̂_j e^{-δ̂_j τ} sin(Ω̂_j τ)
//! α^R(Ω) = 2 Im h̃(|Ω|) = Σ_j F_j [δ̂_j² / ((|Ω|-Ω̂_j)² + δ̂_j²) - δ̂_j² / ((|Ω|+Ω̂_j)² + δ̂_j²)]
//! F(Ω)   = ½ [n_th(Ω) + ½] α^R(Ω)
//! ```
//!
//! so `F_j` is the peak gain of component `j`, `∫h = 1`, and the low-frequency
//! fluorescence reduces to `2 F_j Ω̂_j δ̂_j² (k_B T t0/ħ) / (Ω̂_j² + δ̂_j²)²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dispersion {
    /// `k'' < 0`, supports bright solitons.
    Anomalous,
    /// `k'' > 0`, supports dark solitons.
    Normal,
}

impl Dispersion {
    /// Sign in front of `(i/2) ∂²φ/∂τ²`.
    pub fn sign(self) -> f64 {
        match self {
            Dispersion::Anomalous => 1.0,
            Dispersion::Normal => -1.0,
        }
    }
}

/// Physical fiber and pulse parameters, SI units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberConfig {
    /// Pulse time scale (s).
    pub t0: f64,
    /// Group-velocity dispersion k'' (s²/m); negative is anomalous.
    pub k2: f64,
    /// Effective mode area (m²).
    pub mode_area: f64,
    /// Kerr index (m²/W).
    pub n2_kerr: f64,
    /// Carrier wavelength (m).
    pub carrier_wavelength: f64,
    /// Intensity gain per meter, balanced against loss.
    pub gain_per_meter: f64,
    /// Phonon reservoir temperature (K).
    pub temperature: f64,
    /// Overrides the first-principles photon-number scale when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_bar: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    /// Dispersion length (m).
    pub x0: f64,
    pub n_bar: f64,
    pub alpha_g: f64,
    pub alpha_a: f64,
}

impl FiberConfig {
    /// Dispersion-shifted fiber with a 500 fs pulse at 1.55 µm, 0.2 dB/km, 300 K.
    pub fn dispersion_shifted_500fs() -> Self {
        Self {
            t0: 500e-15,
            k2: -0.57e-24 / 1e3,
            mode_area: 40e-12,
            n2_kerr: 2.6e-20,
            carrier_wavelength: 1.55e-6,
            gain_per_meter: 4.6e-5,
            temperature: 300.0,
            n_bar: Some(4e6),
        }
    }

    pub fn dispersion(&self) -> Dispersion {
        if self.k2 < 0.0 {
            Dispersion::Anomalous
        } else {
            Dispersion::Normal
        }
    }

    pub fn carrier_angular_frequency(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.carrier_wavelength
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(field, format!("must be positive, got {v}")))
            }
        };
        positive("fiber.t0", self.t0)?;
        if !(self.k2.is_finite() && self.k2 != 0.0) {
            return Err(Error::param("fiber.k2", "must be finite and nonzero"));
        }
        positive("fiber.mode_area", self.mode_area)?;
        positive("fiber.n2_kerr", self.n2_kerr)?;
        positive("fiber.carrier_wavelength", self.carrier_wavelength)?;
        if !(self.gain_per_meter.is_finite() && self.gain_per_meter >= 0.0) {
            return Err(Error::param("fiber.gain_per_meter", "must be >= 0"));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::param("fiber.temperature", "must be >= 0"));
        }
        if let Some(n) = self.n_bar {
            positive("fiber.n_bar", n)?;
        }
        Ok(())
    }

    /// `n̄` from `|k''| 𝒜 c / (n₂ ħ ω₀² t0)`, ignoring any override.
    pub fn photon_scale_first_principles(&self) -> f64 {
        let w0 = self.carrier_angular_frequency();
        self.k2.abs() * self.mode_area * SPEED_OF_LIGHT / (self.n2_kerr * HBAR * w0 * w0 * self.t0)
    }

    pub fn derive_scales(&self) -> Result<Scales> {
        self.validate()?;
        let x0 = self.t0 * self.t0 / self.k2.abs();
        let n_bar = self.n_bar.unwrap_or_else(|| self.photon_scale_first_principles());
        let alpha_g = self.gain_per_meter * x0;
        Ok(Scales {
            x0,
            n_bar,
            alpha_g,
            alpha_a: alpha_g,
        })
    }
}

/// One damped-oscillator line of the Raman response.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorentzianComponent {
    /// Peak gain (dimensionless).
    #[serde(rename = "F")]
    pub strength: f64,
    /// Half width (rad/s).
    pub delta_rad_per_s: f64,
    /// Centre frequency (rad/s).
    pub omega_rad_per_s: f64,
}

impl LorentzianComponent {
    /// Single-line fit centred at 12 THz.
    pub const SINGLE_LINE: LorentzianComponent = LorentzianComponent {
        strength: 0.7263,
        delta_rad_per_s: 20e12,
        omega_rad_per_s: 75.4e12,
    };
}

#[derive(Clone, Debug, PartialEq)]
struct ScaledLine {
    strength: f64,
    delta: f64,
    omega: f64,
}

/// Raman response in dimensionless units for a given pulse scale `t0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RamanModel {
    components: Vec<LorentzianComponent>,
    temperature: f64,
    t0: f64,
    lines: Vec<ScaledLine>,
    /// `k_B T t0 / ħ`
    thermal_scale: f64,
}

impl RamanModel {
    pub fn new(components: Vec<LorentzianComponent>, temperature: f64, t0: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::param("raman.components", "at least one component required"));
        }
        for c in &components {
            if !(c.delta_rad_per_s.is_finite() && c.delta_rad_per_s > 0.0) {
                return Err(Error::param("raman.components.delta_rad_per_s", "must be positive"));
            }
            if !(c.omega_rad_per_s.is_finite() && c.omega_rad_per_s > 0.0) {
                return Err(Error::param("raman.components.omega_rad_per_s", "must be positive"));
            }
            if !c.strength.is_finite() {
                return Err(Error::param("raman.components.F", "must be finite"));
            }
        }
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::param("raman.temperature", "must be >= 0"));
        }
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::param("raman.t0", "must be positive"));
        }
        let lines = components
            .iter()
            .map(|c| ScaledLine {
                strength: c.strength,
                delta: c.delta_rad_per_s * t0,
                omega: c.omega_rad_per_s * t0,
            })
            .collect();
        Ok(Self {
            components,
            temperature,
            t0,
            lines,
            thermal_scale: BOLTZMANN * temperature * t0 / HBAR,
        })
    }

    pub fn single_lorentzian(temperature: f64, t0: f64) -> Result<Self> {
        Self::new(vec![LorentzianComponent::SINGLE_LINE], temperature, t0)
    }

    pub fn components(&self) -> &[LorentzianComponent] {
        &self.components
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Same lines at a different temperature.
    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(self.components.clone(), temperature, self.t0)
    }

    /// Largest dimensionless line centre.
    pub fn max_center(&self) -> f64 {
        self.lines.iter().map(|l| l.omega).fold(0.0, f64::max)
    }

    /// Bose occupation `1 / (exp(ħ|Ω|/(k_B T t0)) - 1)`.
    pub fn thermal_occupation(&self, omega: f64) -> Result<f64> {
        if omega == 0.0 {
            return Err(Error::ZeroFrequency);
        }
        if self.thermal_scale == 0.0 {
            return Ok(0.0);
        }
        Ok(1.0 / (omega.abs() / self.thermal_scale).exp_m1())
    }

    /// Even Raman gain `α^R(|Ω|)`.
    pub fn raman_gain(&self, omega: f64) -> f64 {
        let w = omega.abs();
        self.lines
            .iter()
            .map(|l| {
                let d2 = l.delta * l.delta;
                l.strength * (d2 / ((w - l.omega).powi(2) + d2) - d2 / ((w + l.omega).powi(2) + d2))
            })
            .sum()
    }

    /// `lim_{Ω→0} α^R(Ω)/|Ω|`.
    pub fn raman_gain_slope(&self) -> f64 {
        self.lines
            .iter()
            .map(|l| {
                let s = l.omega * l.omega + l.delta * l.delta;
                4.0 * l.strength * l.omega * l.delta * l.delta / (s * s)
            })
            .sum()
    }

    /// `F(Ω) = ½[n_th(Ω) + ½] α^R(Ω)`; the `Ω = 0` value is the finite limit.
    pub fn fluorescence(&self, omega: f64) -> f64 {
        if omega == 0.0 {
            return self.fluorescence_at_zero();
        }
        let n_th = self.thermal_occupation(omega).unwrap_or(0.0);
        0.5 * (n_th + 0.5) * self.raman_gain(omega)
    }

    /// Low-frequency closed form `Σ 2 F_j Ω̂_j δ̂_j² (k_B T t0/ħ) / (Ω̂_j² + δ̂_j²)²`.
    pub fn fluorescence_at_zero(&self) -> f64 {
        0.5 * self.thermal_scale * self.raman_gain_slope()
    }

    /// Delayed fraction `f_R = ∫h_R dτ`.
    pub fn raman_fraction(&self) -> f64 {
        self.lines
            .iter()
            .map(|l| l.strength * l.delta * l.omega / (l.omega * l.omega + l.delta * l.delta))
            .sum()
    }

    /// `h̃(Ω) = ∫ h(τ) e^{iΩτ} dτ`, including the instantaneous part.
    pub fn response_spectrum(&self, omega: f64) -> Complex64 {
        let delayed: Complex64 = self
            .lines
            .iter()
            .map(|l| {
                let denom = Complex64::new(
                    l.omega * l.omega + l.delta * l.delta - omega * omega,
                    -2.0 * l.delta * omega,
                );
                Complex64::new(l.strength * l.delta * l.omega, 0.0) / denom
            })
            .sum();
        Complex64::new(1.0 - self.raman_fraction(), 0.0) + delayed
    }

    fn delayed_response(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        self.lines
            .iter()
            .map(|l| l.strength * l.delta * (-l.delta * tau).exp() * (l.omega * tau).sin())
            .sum()
    }

    pub fn check_resolved(&self, grid: &TimeGrid) -> Result<()> {
        let center = self.max_center();
        if grid.nyquist() < center {
            return Err(Error::UnresolvedRamanBand {
                nyquist: grid.nyquist(),
                center,
            });
        }
        Ok(())
    }

    /// Causal response sampled on the grid. The instantaneous part sits in
    /// the `τ = 0` bin with its weight set so that `Σ h dτ = 1` exactly.
    pub fn response_kernel(&self, grid: &TimeGrid) -> Result<Vec<f64>> {
        self.check_resolved(grid)?;
        let dtau = grid.dtau();
        let mut h: Vec<f64> = grid.taus().iter().map(|&t| self.delayed_response(t)).collect();
        let delayed_area: f64 = h.iter().sum::<f64>() * dtau;
        h[grid.center_index()] += (1.0 - delayed_area) / dtau;
        Ok(h)
    }

    /// Fluorescence sampled at the grid frequencies, FFT order.
    pub fn fluorescence_on_grid(&self, grid: &TimeGrid) -> Vec<f64> {
        grid.omegas().iter().map(|&w| self.fluorescence(w)).collect()
    }

    /// `F̃(τ) = (1/2π) ∫ F(Ω) e^{-iΩτ} dΩ` on the grid; a white spectrum maps
    /// to `F(0)/dτ` in the `τ = 0` bin.
    pub fn fluorescence_time_kernel(&self, grid: &TimeGrid) -> Result<Vec<f64>> {
        self.check_resolved(grid)?;
        Ok(spectrum_to_time_kernel(grid, &self.fluorescence_on_grid(grid)))
    }
}

/// Inverse transform of an even real spectrum given in FFT order, delta-normalized.
pub fn spectrum_to_time_kernel(grid: &TimeGrid, spectrum: &[f64]) -> Vec<f64> {
    let tau_max = grid.tau_max();
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .zip(grid.omegas())
        .map(|(&f, &w)| Complex64::from_polar(f, w * tau_max))
        .collect();
    let mut scratch = grid.scratch();
    grid.back_transform_raw(&mut buf, &mut scratch);
    // back_transform_raw already divides by n; remaining factor is 1/dτ.
    let scale = 1.0 / grid.dtau();
    buf.iter().map(|v| v.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{forward_transform, ComplexField};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn paper_fiber() -> FiberConfig {
        FiberConfig {
            n_bar: None,
            ..FiberConfig::dispersion_shifted_500fs()
        }
    }

    #[test]
    fn dispersion_length_500fs() {
        let s = paper_fiber().derive_scales().unwrap();
        assert_relative_eq!(s.x0, (500e-15f64).powi(2) / 0.57e-27, max_relative = 1e-12);
        assert!((s.x0 - 438.6).abs() < 0.1, "x0 = {}", s.x0);
        assert_relative_eq!(s.alpha_g, 4.6e-5 * s.x0, max_relative = 1e-12);
        assert_eq!(s.alpha_a, s.alpha_g);
    }

    #[test]
    fn photon_scale_first_principles() {
        // At 1.55 µm the quoted fiber gives n̄ ≈ 3.37e6 (the rounded 4e6 needs a longer carrier).
        let n = paper_fiber().photon_scale_first_principles();
        assert!(n > 3.3e6 && n < 4.0e6, "n_bar = {n:e}");
        let s = FiberConfig::dispersion_shifted_500fs().derive_scales().unwrap();
        assert_eq!(s.n_bar, 4e6);
    }

    #[test]
    fn zero_gain_gives_zero_alpha() {
        let f = FiberConfig {
            gain_per_meter: 0.0,
            ..paper_fiber()
        };
        assert_eq!(f.derive_scales().unwrap().alpha_g, 0.0);
    }

    #[test]
    fn rejects_invalid_fiber() {
        let bad_t0 = FiberConfig {
            t0: 0.0,
            ..paper_fiber()
        };
        assert!(bad_t0.derive_scales().is_err());
        let bad_k2 = FiberConfig {
            k2: 0.0,
            ..paper_fiber()
        };
        assert!(bad_k2.derive_scales().is_err());
        assert_eq!(paper_fiber().dispersion(), Dispersion::Anomalous);
        let normal = FiberConfig {
            k2: 0.57e-27,
            ..paper_fiber()
        };
        assert_eq!(normal.dispersion(), Dispersion::Normal);
    }

    #[test]
    fn thermal_occupation_values() {
        let t0 = 1e-12;
        let m = RamanModel::single_lorentzian(300.0, t0).unwrap();
        let scale = BOLTZMANN * 300.0 * t0 / HBAR;
        assert_relative_eq!(
            m.thermal_occupation(scale * 2f64.ln()).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        // Ω/t0 = k_B T/ħ ≈ 3.928e13 rad/s
        assert_relative_eq!(
            m.thermal_occupation(scale).unwrap(),
            1.0 / (1f64.exp() - 1.0),
            max_relative = 1e-12
        );
        assert_relative_eq!(m.thermal_occupation(-scale).unwrap(), 0.5820, max_relative = 1e-4);
        assert!(m.thermal_occupation(1e6).unwrap() < 1e-100);
        assert!(matches!(m.thermal_occupation(0.0), Err(Error::ZeroFrequency)));
    }

    #[test]
    fn single_line_fluorescence_at_zero() {
        let m = RamanModel::single_lorentzian(300.0, 500e-15).unwrap();
        let f0 = m.fluorescence(0.0);
        // 2 F₁ Ω₁ δ₁² (k_B T/ħ) / (Ω₁² + δ₁²)² with SI values, evaluated by hand
        assert_relative_eq!(f0, 0.046_469, max_relative = 1e-4);
        // two significant figures
        assert_eq!(format!("{f0:.1e}"), "4.6e-2");
        // independent of t0
        let m1 = RamanModel::single_lorentzian(300.0, 1e-12).unwrap();
        assert_relative_eq!(m1.fluorescence(0.0), f0, max_relative = 1e-12);
    }

    #[test]
    fn zero_temperature_leaves_spontaneous_floor() {
        let m = RamanModel::single_lorentzian(0.0, 500e-15).unwrap();
        assert_eq!(m.fluorescence(0.0), 0.0);
        for w in [0.5, 5.0, 37.7, 60.0] {
            assert_relative_eq!(m.fluorescence(w), m.raman_gain(w) / 4.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn gain_slope_and_peak() {
        let t0 = 500e-15;
        let m = RamanModel::single_lorentzian(300.0, t0).unwrap();
        assert_eq!(m.raman_gain(0.0), 0.0);
        let (o, d) = (75.4e12 * t0, 20e12 * t0);
        let expected = 4.0 * 0.7263 * o * d * d / (o * o + d * d).powi(2);
        assert_relative_eq!(m.raman_gain(1e-7) / 1e-7, expected, max_relative = 1e-6);
        assert_relative_eq!(m.raman_gain_slope(), expected, max_relative = 1e-14);
        // peak sits near the 12 THz line centre
        let peak = (1..2000)
            .map(|i| i as f64 * 0.05)
            .max_by(|a, b| m.raman_gain(*a).total_cmp(&m.raman_gain(*b)))
            .unwrap();
        assert!((peak - o).abs() / o < 0.05, "peak at {peak}, centre {o}");
    }

    #[test]
    fn fluorescence_limit_matches_closed_form() {
        for (f, d, o, t) in [
            (0.7263, 20e12, 75.4e12, 300.0),
            (0.3, 5e12, 30e12, 77.0),
            (1.1, 40e12, 90e12, 500.0),
        ] {
            let c = LorentzianComponent {
                strength: f,
                delta_rad_per_s: d,
                omega_rad_per_s: o,
            };
            let m = RamanModel::new(vec![c], t, 700e-15).unwrap();
            let (ow, dw) = (o * 700e-15, d * 700e-15);
            let closed = 2.0 * f * ow * dw * dw * BOLTZMANN * t * 700e-15 / ((ow * ow + dw * dw).powi(2) * HBAR);
            assert_relative_eq!(m.fluorescence(1e-6), closed, max_relative = 1e-6);
            assert_relative_eq!(m.fluorescence(0.0), closed, max_relative = 1e-12);
        }
    }

    #[test]
    fn fluorescence_is_even_and_factorizes() {
        let m = RamanModel::single_lorentzian(300.0, 500e-15).unwrap();
        assert_eq!(m.fluorescence(2.5), m.fluorescence(-2.5));
        for w in [0.01, 0.3, 2.5, 10.0, 37.7, 79.0] {
            let n = m.thermal_occupation(w).unwrap();
            assert_relative_eq!(
                m.fluorescence(w),
                0.5 * (n + 0.5) * m.raman_gain(w),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn response_kernel_shape_and_normalization() {
        let t0 = 500e-15;
        let m = RamanModel::single_lorentzian(300.0, t0).unwrap();
        let g = TimeGrid::new(1024, 20.0).unwrap();
        let h = m.response_kernel(&g).unwrap();
        let area: f64 = h.iter().sum::<f64>() * g.dtau();
        assert!((area - 1.0).abs() < 1e-6);
        // causal
        for (j, &t) in g.taus().iter().enumerate() {
            if t < 0.0 {
                assert_eq!(h[j], 0.0);
            }
        }
        // damped sinusoid: sign flips between successive half periods kπ/Ω̂
        let o = 75.4e12 * t0;
        for k in 0..4 {
            let t_in = (k as f64 + 0.5) * PI / o;
            let v = m.delayed_response(t_in);
            assert_eq!(v.signum(), if k % 2 == 0 { 1.0 } else { -1.0 });
            assert!(m.delayed_response((k + 1) as f64 * PI / o).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_strength_kernel_is_delta() {
        let c = LorentzianComponent {
            strength: 0.0,
            ..LorentzianComponent::SINGLE_LINE
        };
        let m = RamanModel::new(vec![c], 300.0, 500e-15).unwrap();
        let g = TimeGrid::new(256, 10.0).unwrap();
        let h = m.response_kernel(&g).unwrap();
        for (j, &v) in h.iter().enumerate() {
            if j == g.center_index() {
                assert_relative_eq!(v, 1.0 / g.dtau());
            } else {
                assert_eq!(v, 0.0);
            }
        }
        assert_eq!(m.response_spectrum(3.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn kernel_rejects_unresolved_band() {
        let m = RamanModel::single_lorentzian(300.0, 500e-15).unwrap();
        let coarse = TimeGrid::new(64, 20.0).unwrap();
        assert!(matches!(
            m.response_kernel(&coarse),
            Err(Error::UnresolvedRamanBand { .. })
        ));
        assert!(m.fluorescence_time_kernel(&coarse).is_err());
    }

    #[test]
    fn kernel_spectrum_duality() {
        // α^R(Ω) = 2 Im ∫h e^{iΩτ}dτ for Ω > 0, on a grid resolving the line well.
        let m = RamanModel::single_lorentzian(300.0, 500e-15).unwrap();
        let g = TimeGrid::new(8192, 20.0).unwrap();
        let h = m.response_kernel(&g).unwrap();
        let field = ComplexField::new(&g, h.iter().map(|&x| Complex64::new(x, 0.0)).collect(), 0.0).unwrap();
        let spec = forward_transform(&field);
        let peak = m.raman_gain(m.max_center());
        for w in [1.0, 5.0, 20.0, 37.7, 50.0, 70.0] {
            let numeric = 2.0 * spec.at(w).im * (2.0 * PI).sqrt();
            let analytic = m.raman_gain(w);
            assert!(
                (numeric - analytic).abs() < 0.01 * peak,
                "Ω={w}: {numeric} vs {analytic}"
            );
            assert_relative_eq!(2.0 * m.response_spectrum(w).im, analytic, max_relative = 1e-12);
        }
        assert_relative_eq!(m.response_spectrum(0.0).re, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn white_spectrum_time_kernel_is_delta() {
        let g = TimeGrid::new(256, 10.0).unwrap();
        let f0 = 0.046;
        let k = spectrum_to_time_kernel(&g, &vec![f0; 256]);
        for (j, &v) in k.iter().enumerate() {
            if j == g.center_index() {
                assert_relative_eq!(v, f0 / g.dtau(), max_relative = 1e-12);
            } else {
                assert!(v.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fluorescence_time_kernel_even_with_dc_area() {
        let m = RamanModel::single_lorentzian(300.0, 500e-15).unwrap();
        let g = TimeGrid::new(1024, 20.0).unwrap();
        let k = m.fluorescence_time_kernel(&g).unwrap();
        let c = g.center_index();
        for j in 1..c {
            assert!((k[c + j] - k[c - j]).abs() < 1e-10 * k[c].abs());
        }
        let area: f64 = k.iter().sum::<f64>() * g.dtau();
        assert_relative_eq!(area, m.fluorescence(0.0), max_relative = 1e-10);
    }

    proptest! {
        #[test]
        fn fluorescence_nonnegative(t in 0.0f64..1000.0, w in -80.0f64..80.0) {
            let m = RamanModel::single_lorentzian(t, 500e-15).unwrap();
            prop_assert!(m.fluorescence(w) >= 0.0);
            prop_assert_eq!(m.raman_gain(w), m.raman_gain(-w));
        }

        #[test]
        fn occupation_monotone(a in 1e-3f64..50.0, b in 1e-3f64..50.0) {
            let m = RamanModel::single_lorentzian(300.0, 500e-15).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(m.thermal_occupation(lo).unwrap() >= m.thermal_occupation(hi).unwrap());
            prop_assert!(m.thermal_occupation(hi).unwrap() > 0.0);
        }
    }
}
