//! Uniform periodic time lattice and the spectral transforms built on it.
//!
//! Transforms follow `f(Ω) = (1/√2π) ∫ f(τ) e^{iΩτ} dτ`. Spectral arrays are
//! kept in FFT order: index `k < n/2` holds `Ω = k·dΩ`, the rest hold the
//! negative frequencies, and `k = n/2` is the Nyquist bin (`Ω = -π/dτ`).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

struct GridInner {
    n_points: usize,
    tau_max: f64,
    dtau: f64,
    taus: Vec<f64>,
    omegas: Vec<f64>,
    // rustfft "inverse" is the e^{+i...} sum, which matches our forward convention.
    plus: Arc<dyn Fft<f64>>,
    minus: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

/// Time lattice spanning `[-tau_max, tau_max)` with `n_points` samples.
///
/// Cheap to clone; clones share the precomputed FFT plans.
#[derive(Clone)]
pub struct TimeGrid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for TimeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeGrid")
            .field("n_points", &self.inner.n_points)
            .field("tau_max", &self.inner.tau_max)
            .finish()
    }
}

impl PartialEq for TimeGrid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n_points == other.inner.n_points && self.inner.tau_max == other.inner.tau_max
    }
}

impl TimeGrid {
    pub fn new(n_points: usize, tau_max: f64) -> Result<Self> {
        if n_points < 4 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= 4, got {n_points}"
            )));
        }
        if !(tau_max.is_finite() && tau_max > 0.0) {
            return Err(Error::InvalidGrid(format!("tau_max must be positive, got {tau_max}")));
        }
        let dtau = 2.0 * tau_max / n_points as f64;
        let domega = PI / tau_max;
        let taus = (0..n_points).map(|j| -tau_max + j as f64 * dtau).collect();
        let omegas = (0..n_points)
            .map(|k| {
                let signed = if k < n_points / 2 {
                    k as isize
                } else {
                    k as isize - n_points as isize
                };
                signed as f64 * domega
            })
            .collect();
        let mut planner = FftPlanner::new();
        let plus = planner.plan_fft_inverse(n_points);
        let minus = planner.plan_fft_forward(n_points);
        let scratch_len = plus.get_inplace_scratch_len().max(minus.get_inplace_scratch_len());
        Ok(Self {
            inner: Arc::new(GridInner {
                n_points,
                tau_max,
                dtau,
                taus,
                omegas,
                plus,
                minus,
                scratch_len,
            }),
        })
    }

    pub fn n_points(&self) -> usize {
        self.inner.n_points
    }

    pub fn tau_max(&self) -> f64 {
        self.inner.tau_max
    }

    pub fn dtau(&self) -> f64 {
        self.inner.dtau
    }

    /// Frequency spacing `2π / (2 τ_max)`.
    pub fn domega(&self) -> f64 {
        PI / self.inner.tau_max
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.inner.dtau
    }

    pub fn taus(&self) -> &[f64] {
        &self.inner.taus
    }

    /// Angular frequencies in FFT order.
    pub fn omegas(&self) -> &[f64] {
        &self.inner.omegas
    }

    /// Index of the `τ = 0` sample.
    pub fn center_index(&self) -> usize {
        self.inner.n_points / 2
    }

    /// Unnormalized `Σ_j x_j e^{+2πijk/n}`; pairs with [`Self::back_transform_raw`].
    pub(crate) fn to_spectrum_raw(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inner.plus.process_with_scratch(buf, scratch);
    }

    /// `(1/n) Σ_k X_k e^{-2πijk/n}`, the exact inverse of [`Self::to_spectrum_raw`].
    pub(crate) fn back_transform_raw(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inner.minus.process_with_scratch(buf, scratch);
        let scale = 1.0 / self.inner.n_points as f64;
        buf.iter_mut().for_each(|x| *x *= scale);
    }

    /// `Σ_k X_k e^{-2πijk/n}` without the `1/n`; callers fold it into a multiplier.
    pub(crate) fn back_transform_unscaled(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inner.minus.process_with_scratch(buf, scratch);
    }

    pub(crate) fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.inner.scratch_len]
    }

    /// Phase `e^{-iΩ_k τ_max}` that ties raw FFT coefficients to the continuous transform.
    fn origin_phase(&self, k: usize) -> Complex64 {
        Complex64::from_polar(1.0, -self.inner.omegas[k] * self.inner.tau_max)
    }

    /// Grid frequencies sorted ascending, with the FFT index of each.
    pub fn sorted_frequencies(&self) -> Vec<(usize, f64)> {
        let n = self.inner.n_points;
        (0..n)
            .map(|i| {
                let k = (i + n / 2) % n;
                (k, self.inner.omegas[k])
            })
            .collect()
    }
}

/// Sampled complex envelope `φ(τ)` at propagation coordinate `zeta`.
#[derive(Clone, Debug)]
pub struct ComplexField {
    grid: TimeGrid,
    pub values: Vec<Complex64>,
    pub zeta: f64,
}

impl ComplexField {
    pub fn new(grid: &TimeGrid, values: Vec<Complex64>, zeta: f64) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
            zeta,
        })
    }

    pub fn zeros(grid: &TimeGrid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.n_points()],
            zeta: 0.0,
        }
    }

    pub fn from_fn(grid: &TimeGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.taus().iter().map(|&t| f(t)).collect();
        Self {
            grid: grid.clone(),
            values,
            zeta: 0.0,
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Dimensionless photon number `Σ|φ|² dτ`.
    pub fn photon_number(&self) -> f64 {
        photon_number(self)
    }

    /// `sqrt(Σ|a - b|² dτ)`.
    pub fn l2_distance(&self, other: &ComplexField) -> f64 {
        let dtau = self.grid.dtau();
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            * dtau.sqrt()
    }

    /// Continuous transform `(1/√2π) Σ φ(τ_j) e^{iΩτ_j} dτ` at an arbitrary frequency.
    pub fn spectrum_at(&self, omega: f64) -> Complex64 {
        self.values
            .iter()
            .zip(self.grid.taus())
            .map(|(v, &t)| v * Complex64::cis(omega * t))
            .sum::<Complex64>()
            * (self.grid.dtau() / (2.0 * PI).sqrt())
    }

    /// Momentum `Im ∫ φ* ∂τφ dτ`, evaluated spectrally.
    pub fn momentum(&self) -> f64 {
        let spec = forward_transform(self);
        // ∂τ ↔ -iΩ, so Im∫φ*∂τφ = -Σ Ω|φ̃|² dΩ.
        -spec
            .values
            .iter()
            .zip(self.grid.omegas())
            .map(|(v, w)| w * v.norm_sqr())
            .sum::<f64>()
            * self.grid.domega()
    }
}

/// Spectrum `φ̃(Ω_k)` in FFT order.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: TimeGrid,
    pub values: Vec<Complex64>,
    pub zeta: f64,
}

impl SpectralField {
    pub fn new(grid: &TimeGrid, values: Vec<Complex64>, zeta: f64) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
            zeta,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Value at the grid frequency nearest to `omega`.
    pub fn at(&self, omega: f64) -> Complex64 {
        let n = self.grid.n_points() as isize;
        let k = (omega / self.grid.domega()).round() as isize;
        self.values[k.rem_euclid(n) as usize]
    }
}

pub fn forward_transform(field: &ComplexField) -> SpectralField {
    let grid = &field.grid;
    let mut buf = field.values.clone();
    let mut scratch = grid.scratch();
    grid.to_spectrum_raw(&mut buf, &mut scratch);
    let scale = grid.dtau() / (2.0 * PI).sqrt();
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= grid.origin_phase(k) * scale;
    }
    SpectralField {
        grid: grid.clone(),
        values: buf,
        zeta: field.zeta,
    }
}

pub fn inverse_transform(spec: &SpectralField) -> ComplexField {
    let grid = &spec.grid;
    let scale = (2.0 * PI).sqrt() / grid.dtau();
    let mut buf: Vec<Complex64> = spec
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| v * grid.origin_phase(k).conj() * scale)
        .collect();
    let mut scratch = grid.scratch();
    grid.back_transform_raw(&mut buf, &mut scratch);
    ComplexField {
        grid: grid.clone(),
        values: buf,
        zeta: spec.zeta,
    }
}

pub fn photon_number(field: &ComplexField) -> f64 {
    field.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * field.grid.dtau()
}
