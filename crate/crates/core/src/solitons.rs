//! Analytic solitons, linearized parameter projections and closed-form jitter laws.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, TimeGrid};
use crate::physics::{FiberConfig, RamanModel};

/// Edge amplitude allowed for a bright soliton, relative to its peak.
pub const EDGE_TOLERANCE: f64 = 1e-8;

fn sech(x: f64) -> f64 {
    // cosh overflows beyond |x| ≈ 710; sech is zero there anyway
    if x.abs() > 700.0 {
        0.0
    } else {
        1.0 / x.cosh()
    }
}

/// `A sech(Aτ - q) exp(iVτ + iθ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrightSolitonParams {
    pub amplitude: f64,
    pub velocity: f64,
    /// Position phase `q`; the peak sits at `τ = q/A`.
    pub position: f64,
    pub phase: f64,
}

impl Default for BrightSolitonParams {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            velocity: 0.0,
            position: 0.0,
            phase: 0.0,
        }
    }
}

impl BrightSolitonParams {
    pub fn center(&self) -> f64 {
        self.position / self.amplitude
    }

    pub fn value(&self, tau: f64) -> Complex64 {
        let a = self.amplitude;
        Complex64::from_polar(a * sech(a * tau - self.position), self.velocity * tau + self.phase)
    }

    /// Parameters after a noise-free propagation distance `zeta`.
    pub fn evolved(&self, zeta: f64) -> Self {
        Self {
            position: self.position + self.velocity * self.amplitude * zeta,
            phase: self.phase + 0.5 * (self.amplitude.powi(2) - self.velocity.powi(2)) * zeta,
            ..*self
        }
    }
}

/// Gray soliton on a background `φ0`; `depth = 1` is black.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DarkSolitonParams {
    pub background: f64,
    pub depth: f64,
    /// Position phase `q`; the dip sits at `τ = q/(φ0 A)`.
    pub position: f64,
    pub phase: f64,
}

impl Default for DarkSolitonParams {
    fn default() -> Self {
        Self {
            background: 1.0,
            depth: 1.0,
            position: 0.0,
            phase: 0.0,
        }
    }
}

impl DarkSolitonParams {
    /// Total phase step `ψ = 2 arcsin(A)`.
    pub fn phase_step(&self) -> f64 {
        2.0 * self.depth.asin()
    }

    pub fn center(&self) -> f64 {
        self.position / (self.background * self.depth)
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.depth) {
            return Err(Error::param("soliton.A", "dark soliton depth must lie in [0, 1]"));
        }
        if !(self.background.is_finite() && self.background > 0.0) {
            return Err(Error::param("soliton.phi0", "must be positive"));
        }
        Ok(())
    }

    /// `φ0 e^{iθ} [√(1-A²) + iA tanh(φ0Aτ - q)]`.
    pub fn value(&self, tau: f64) -> Complex64 {
        let a = self.depth;
        let x = self.background * a * tau - self.position;
        let shape = Complex64::new((1.0 - a * a).max(0.0).sqrt(), a * x.tanh());
        shape * Complex64::from_polar(self.background, self.phase)
    }

    /// `∂φ/∂q` at these parameters.
    pub fn position_derivative(&self, tau: f64) -> Complex64 {
        let a = self.depth;
        let x = self.background * a * tau - self.position;
        let s = sech(x);
        Complex64::new(0.0, -a * s * s) * Complex64::from_polar(self.background, self.phase)
    }
}

pub fn bright_field(params: &BrightSolitonParams, grid: &TimeGrid) -> Result<ComplexField> {
    if !(params.amplitude.is_finite() && params.amplitude > 0.0) {
        return Err(Error::param("soliton.A", "bright amplitude must be positive"));
    }
    let field = ComplexField::from_fn(grid, |t| params.value(t));
    let first = grid.taus()[0];
    let last = grid.taus()[grid.n_points() - 1];
    let edge = params.value(first).norm().max(params.value(last).norm());
    let limit = EDGE_TOLERANCE * params.amplitude;
    if edge > limit {
        return Err(Error::WindowTooNarrow { edge, limit });
    }
    Ok(field)
}

/// Dark soliton field. With `pair` set, a second kink of opposite chirp is
/// placed half a window away so the field matches at the periodic boundary;
/// the kinks then sit at `±τ_max/2` shifted by the requested position.
pub fn dark_field(params: &DarkSolitonParams, grid: &TimeGrid, pair: bool) -> Result<ComplexField> {
    params.validate()?;
    if !pair {
        return Ok(ComplexField::from_fn(grid, |t| params.value(t)));
    }
    let (first, second) = dark_pair_members(params, grid);
    let phase = Complex64::from_polar(1.0, params.phase);
    Ok(ComplexField::from_fn(grid, |t| {
        // unit-background shapes; conj flips the chirp of the second kink
        let u = first.value(t) / params.background;
        let v = second.value(t) / params.background;
        params.background * phase * u * v.conj()
    }))
}

/// The two kinks of a periodic dark pair, each with zero phase.
pub fn dark_pair_members(params: &DarkSolitonParams, grid: &TimeGrid) -> (DarkSolitonParams, DarkSolitonParams) {
    let k = params.background * params.depth;
    let half = grid.tau_max() / 2.0;
    let first = DarkSolitonParams {
        position: params.position - k * half,
        phase: 0.0,
        ..*params
    };
    let second = DarkSolitonParams {
        position: params.position + k * half,
        phase: 0.0,
        ..*params
    };
    (first, second)
}

/// Linearized changes of the four bright-soliton parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BrightProjection {
    pub amplitude: f64,
    pub position: f64,
    pub velocity: f64,
    pub phase: f64,
    /// `‖Δφ‖ / ‖φ̄‖`; above [`LINEARIZATION_LIMIT`] the projection is unreliable.
    pub relative_perturbation: f64,
}

pub const LINEARIZATION_LIMIT: f64 = 0.3;

impl BrightProjection {
    pub fn is_linear(&self) -> bool {
        self.relative_perturbation <= LINEARIZATION_LIMIT
    }
}

/// Tangent modes `∂φ/∂P` for `P = (A, q, V, θ)`.
pub fn bright_tangents(params: &BrightSolitonParams, grid: &TimeGrid) -> [Vec<Complex64>; 4] {
    let a = params.amplitude;
    let mut out: [Vec<Complex64>; 4] = Default::default();
    for &t in grid.taus() {
        let x = a * t - params.position;
        let base = params.value(t);
        let th = x.tanh();
        out[0].push(base * (1.0 / a - t * th));
        out[1].push(base * th);
        out[2].push(base * Complex64::new(0.0, t));
        out[3].push(base * Complex64::new(0.0, 1.0));
    }
    out
}

/// Adjoint modes: `φ̄`, `(τ-τc)φ̄`, `i tanh(Aτ-q)φ̄`, `i(τ-τc) tanh(Aτ-q)φ̄`.
pub fn bright_adjoints(params: &BrightSolitonParams, grid: &TimeGrid) -> [Vec<Complex64>; 4] {
    let a = params.amplitude;
    let tc = params.center();
    let mut out: [Vec<Complex64>; 4] = Default::default();
    for &t in grid.taus() {
        let x = a * t - params.position;
        let base = params.value(t);
        let th = x.tanh();
        let s = t - tc;
        out[0].push(base);
        out[1].push(base * s);
        out[2].push(base * Complex64::new(0.0, th));
        out[3].push(base * Complex64::new(0.0, s * th));
    }
    out
}

fn real_overlap(a: &[Complex64], b: &[Complex64], dtau: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum::<f64>() * dtau
}

/// `G_ij = Re ∫ f_{P_i} f̲_{P_j}* dτ`.
pub fn bright_gram_matrix(params: &BrightSolitonParams, grid: &TimeGrid) -> [[f64; 4]; 4] {
    let tangents = bright_tangents(params, grid);
    let adjoints = bright_adjoints(params, grid);
    let mut g = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            g[i][j] = real_overlap(&tangents[i], &adjoints[j], grid.dtau());
        }
    }
    g
}

/// Projects `field - φ̄` onto the adjoint modes of `reference`.
///
/// The grid Gram matrix is inverted so that each parameter change is read off
/// exactly for perturbations lying in the tangent space.
pub fn project_bright_parameters(field: &ComplexField, reference: &BrightSolitonParams) -> Result<BrightProjection> {
    let grid = field.grid();
    let dtau = grid.dtau();
    let base: Vec<Complex64> = grid.taus().iter().map(|&t| reference.value(t)).collect();
    let delta: Vec<Complex64> = field.values.iter().zip(&base).map(|(f, b)| f - b).collect();
    let adjoints = bright_adjoints(reference, grid);
    let mut rhs = [0.0; 4];
    for j in 0..4 {
        rhs[j] = real_overlap(&delta, &adjoints[j], dtau);
    }
    let g = bright_gram_matrix(reference, grid);
    // rhs_j = Σ_i ΔP_i G_ij, so solve Gᵀ ΔP = rhs
    let gt = Matrix4::from_fn(|i, j| g[j][i]);
    let p = gt
        .lu()
        .solve(&Vector4::from(rhs))
        .ok_or_else(|| Error::Quadrature("singular soliton Gram matrix".into()))?;
    let norm_base = base.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
    let norm_delta = delta.iter().map(|d| d.norm_sqr()).sum::<f64>().sqrt();
    Ok(BrightProjection {
        amplitude: p[0],
        position: p[1],
        velocity: p[2],
        phase: p[3],
        relative_perturbation: norm_delta / norm_base,
    })
}

/// `|S(ω)|²` for `S(ω) = ∫ tanh(τ) sech²(τ) e^{-iωτ} dτ`.
fn internal_mode_power(w: f64) -> f64 {
    let x = 0.5 * PI * w;
    if x.abs() < 1e-4 {
        // π²ω⁴/(4 sinh² x) → ω² (1 - x²/3)
        return w * w * (1.0 - x * x / 3.0);
    }
    if x.abs() > 350.0 {
        return 0.0;
    }
    let s = x.sinh();
    PI * PI * w.powi(4) / (4.0 * s * s)
}

/// Relative change allowed between successive quadrature refinements.
const OVERLAP_RTOL: f64 = 1e-9;

/// `I = ∫∫ s(τ)s(τ') F̃((τ-τ')/A) dτ dτ'` with `s = tanh·sech²`, evaluated as
/// `(A/2π) ∫ F(Aω) |S(ω)|² dω` for an arbitrary even fluorescence spectrum.
pub fn overlap_integral_with(amplitude: f64, fluorescence: impl Fn(f64) -> f64) -> Result<f64> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::param("soliton.A", "must be positive"));
    }
    // |S|² < 1e-40 beyond ω = 32
    let upper = 32.0;
    let integrand = |w: f64| fluorescence(amplitude * w) * internal_mode_power(w);
    let simpson = |n: usize| {
        let h = upper / n as f64;
        let mut acc = integrand(0.0) + integrand(upper);
        for k in 1..n {
            let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += weight * integrand(k as f64 * h);
        }
        acc * h / 3.0
    };
    let mut n = 256;
    let mut prev = simpson(n);
    loop {
        n *= 2;
        let next = simpson(n);
        let scale = next.abs().max(f64::MIN_POSITIVE);
        if (next - prev).abs() <= OVERLAP_RTOL * scale || next == 0.0 {
            // even integrand: twice the half-line
            return Ok(amplitude / PI * next);
        }
        if n > 1 << 22 {
            return Err(Error::Quadrature(format!(
                "overlap integral unconverged: {prev:e} vs {next:e}"
            )));
        }
        prev = next;
    }
}

/// Overlap integral for a Raman model at soliton amplitude `A`.
pub fn overlap_integral(model: &RamanModel, amplitude: f64) -> Result<f64> {
    overlap_integral_with(amplitude, |w| model.fluorescence(w))
}

/// `I(t0 → ∞) = (4/15) F(0)` at unit amplitude.
pub fn white_overlap_limit(model: &RamanModel) -> f64 {
    4.0 / 15.0 * model.fluorescence_at_zero()
}

/// Variance of the arrival time, split by noise source (dimensionless).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JitterPrediction {
    pub zeta: f64,
    pub vacuum: f64,
    pub gordon_haus: f64,
    pub raman: f64,
    pub total: f64,
}

impl JitterPrediction {
    fn new(zeta: f64, vacuum: f64, gordon_haus: f64, raman: f64) -> Self {
        Self {
            zeta,
            vacuum,
            gordon_haus,
            raman,
            total: vacuum + gordon_haus + raman,
        }
    }

    /// Same split in s².
    pub fn in_seconds2(&self, t0: f64) -> Self {
        let s = t0 * t0;
        Self {
            zeta: self.zeta,
            vacuum: self.vacuum * s,
            gordon_haus: self.gordon_haus * s,
            raman: self.raman * s,
            total: self.total * s,
        }
    }
}

fn check_inputs(zeta: f64, amp: f64, alpha_g: f64, overlap: f64, n_bar: f64) -> Result<()> {
    let nonneg = |field: &'static str, v: f64| {
        if v.is_finite() && v >= 0.0 {
            Ok(())
        } else {
            Err(Error::param(field, format!("must be >= 0, got {v}")))
        }
    };
    nonneg("zeta", zeta)?;
    nonneg("soliton amplitude", amp)?;
    nonneg("alpha_g", alpha_g)?;
    nonneg("overlap integral", overlap)?;
    if !(n_bar.is_finite() && n_bar > 0.0) {
        return Err(Error::param("n_bar", "must be positive"));
    }
    Ok(())
}

/// Bright soliton:
/// `π²/(24n̄) + A³ζ²/(6n̄)` (vacuum), `π²α^Gζ/(12n̄) + α^G A³ζ³/(9n̄)` (Gordon-Haus),
/// `2A⁴Iζ³/(3n̄)` (Raman).
pub fn predict_bright_jitter(
    zeta: f64,
    amplitude: f64,
    alpha_g: f64,
    overlap: f64,
    n_bar: f64,
) -> Result<JitterPrediction> {
    check_inputs(zeta, amplitude, alpha_g, overlap, n_bar)?;
    let a3 = amplitude.powi(3);
    let z2 = zeta * zeta;
    let z3 = z2 * zeta;
    let vacuum = PI * PI / (24.0 * n_bar) + a3 * z2 / (6.0 * n_bar);
    let gordon_haus = PI * PI * alpha_g * zeta / (12.0 * n_bar) + alpha_g * a3 * z3 / (9.0 * n_bar);
    let raman = 2.0 * amplitude.powi(4) * overlap * z3 / (3.0 * n_bar);
    Ok(JitterPrediction::new(zeta, vacuum, gordon_haus, raman))
}

/// Black soliton:
/// `π²/(48n̄) + φ0³ζ²/(12n̄)` (vacuum), `α^G φ0³ζ³/(18n̄)` (Gordon-Haus),
/// `Iφ0⁴ζ³/(6n̄)` (Raman).
pub fn predict_dark_jitter(
    zeta: f64,
    background: f64,
    alpha_g: f64,
    overlap: f64,
    n_bar: f64,
) -> Result<JitterPrediction> {
    check_inputs(zeta, background, alpha_g, overlap, n_bar)?;
    let p3 = background.powi(3);
    let z2 = zeta * zeta;
    let z3 = z2 * zeta;
    let vacuum = PI * PI / (48.0 * n_bar) + p3 * z2 / (12.0 * n_bar);
    let gordon_haus = alpha_g * p3 * z3 / (18.0 * n_bar);
    let raman = overlap * background.powi(4) * z3 / (6.0 * n_bar);
    Ok(JitterPrediction::new(zeta, vacuum, gordon_haus, raman))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolitonKind {
    Bright,
    Dark,
}

/// Raman to Gordon-Haus cubic-coefficient ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JitterRatio {
    /// From the overlap integral: `6I/(Gx0)` bright, `3I/(Gx0)` dark.
    pub exact: f64,
    /// White-noise form: `8F(0)/(5Gx0)` bright, `4F(0)/(5Gx0)` dark.
    pub white_approx: f64,
}

pub fn jitter_ratio(model: &RamanModel, fiber: &FiberConfig, kind: SolitonKind) -> Result<JitterRatio> {
    jitter_ratio_with_overlap(overlap_integral(model, 1.0)?, model.fluorescence_at_zero(), fiber, kind)
}

pub fn jitter_ratio_with_overlap(
    overlap: f64,
    f_zero: f64,
    fiber: &FiberConfig,
    kind: SolitonKind,
) -> Result<JitterRatio> {
    let scales = fiber.derive_scales()?;
    if scales.alpha_g <= 0.0 {
        return Err(Error::param("fiber.gain_per_meter", "ratio undefined without gain"));
    }
    let factor = match kind {
        SolitonKind::Bright => 1.0,
        SolitonKind::Dark => 0.5,
    };
    Ok(JitterRatio {
        exact: factor * 6.0 * overlap / scales.alpha_g,
        white_approx: factor * 8.0 * f_zero / (5.0 * scales.alpha_g),
    })
}

/// Dispersion length (m) below which Raman jitter exceeds Gordon-Haus jitter,
/// white-noise form `8F(0)/(5G)` for bright and `4F(0)/(5G)` for dark solitons.
pub fn crossover_length(f_zero: f64, gain_per_meter: f64, kind: SolitonKind) -> Result<f64> {
    if !(gain_per_meter > 0.0) {
        return Err(Error::param("fiber.gain_per_meter", "must be positive"));
    }
    let factor = match kind {
        SolitonKind::Bright => 8.0,
        SolitonKind::Dark => 4.0,
    };
    Ok(factor * f_zero / (5.0 * gain_per_meter))
}
