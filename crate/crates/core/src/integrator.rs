//! Split-step propagation of the stochastic Raman-Schrödinger equation
//!
//! ```text
//! ∂φ/∂ζ = i[±½ ∂²φ/∂τ² + (h ⋆ |φ|²) φ + Γ^R φ] + Γ
//! ```
//!
//! One step of length `dζ` is `D(dζ/2) · K · D(dζ/2)`, where `D` is the
//! deterministic flow and `K` applies the noise accumulated over the step:
//! a half additive kick, the Stratonovich phase rotation `exp(iΓ^R dζ)`, and
//! the second half kick. With [`Scheme::Strang`], `D` is one linear/nonlinear
//! Strang splitting and `K` is merged into its nonlinear stage; with
//! [`Scheme::Fourth`], `D` is the symmetric three-stage composition of Strang
//! steps, accurate to fourth order in `dζ` when noise is off.
//!
//! The nonlinear sub-flow only rotates the phase, so `|φ|` and hence the
//! (instantaneous or delayed) intensity are constant across it and the
//! midpoint of the implicit scheme is available in closed form.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, TimeGrid};
use crate::noise::{NoiseIncrement, NoiseSettings, NoiseStream, RamanNoiseShaper};
use crate::physics::{Dispersion, RamanModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseMode {
    /// Bare Kerr term `|φ|²`.
    Instantaneous,
    /// Causal Raman convolution `h ⋆ |φ|²`.
    Delayed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Strang,
    #[default]
    Fourth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub dzeta: f64,
    pub total_zeta: f64,
    pub snapshot_every: f64,
    pub dispersion: Dispersion,
    pub response: ResponseMode,
    pub noise: NoiseSettings,
    #[serde(default)]
    pub scheme: Scheme,
}

fn as_multiple(value: f64, step: f64) -> Option<usize> {
    let k = (value / step).round();
    ((k * step - value).abs() <= 1e-9 * value.abs().max(step)).then_some(k as usize)
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dzeta.is_finite() && self.dzeta > 0.0) {
            return Err(Error::param("propagation.d_zeta", "must be positive"));
        }
        if !(self.total_zeta.is_finite() && self.total_zeta >= 0.0) {
            return Err(Error::param("propagation.total_zeta", "must be >= 0"));
        }
        if self.total_zeta > 0.0 {
            if !(self.snapshot_every >= self.dzeta && self.snapshot_every <= self.total_zeta * (1.0 + 1e-12)) {
                return Err(Error::param(
                    "propagation.snapshot_every",
                    "must satisfy d_zeta <= snapshot_every <= total_zeta",
                ));
            }
            if as_multiple(self.snapshot_every, self.dzeta).is_none() {
                return Err(Error::param(
                    "propagation.snapshot_every",
                    "must be an integer multiple of d_zeta",
                ));
            }
            if as_multiple(self.total_zeta, self.dzeta).is_none() {
                return Err(Error::param(
                    "propagation.total_zeta",
                    "must be an integer multiple of d_zeta",
                ));
            }
        }
        self.noise.validate()
    }

    pub fn total_steps(&self) -> usize {
        if self.total_zeta == 0.0 {
            0
        } else {
            as_multiple(self.total_zeta, self.dzeta).unwrap_or(0)
        }
    }

    fn snapshot_stride(&self) -> usize {
        as_multiple(self.snapshot_every, self.dzeta).unwrap_or(1).max(1)
    }

    /// Step indices at which snapshots are taken, starting with step 0.
    pub fn snapshot_steps(&self) -> Vec<usize> {
        let total = self.total_steps();
        let stride = self.snapshot_stride();
        let mut steps: Vec<usize> = (0..=total).step_by(stride).collect();
        if *steps.last().unwrap() != total {
            steps.push(total);
        }
        steps
    }

    pub fn snapshot_zetas(&self) -> Vec<f64> {
        self.snapshot_steps()
            .into_iter()
            .map(|s| s as f64 * self.dzeta)
            .collect()
    }

    /// Same run with the step halved.
    pub fn halved(&self) -> Self {
        Self {
            dzeta: self.dzeta / 2.0,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub snapshots: Vec<ComplexField>,
    pub seed: u64,
    /// Matched-noise step-doubling error per snapshot, when certified.
    pub step_error: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn zetas(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.zeta).collect()
    }
}

const YOSHIDA_OUTER: f64 = 1.351_207_191_959_657_6; // 1 / (2 - 2^{1/3})
const YOSHIDA_INNER: f64 = 1.0 - 2.0 * YOSHIDA_OUTER;

/// Reusable buffers for one trajectory.
pub struct Workspace {
    intensity: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Workspace {
    pub fn new(grid: &TimeGrid) -> Self {
        Self {
            intensity: vec![Complex64::new(0.0, 0.0); grid.n_points()],
            scratch: grid.scratch(),
        }
    }
}

/// Precomputed operators for a fixed grid, step and response model.
pub struct Propagator {
    grid: TimeGrid,
    config: PropagationConfig,
    /// Linear propagators in FFT order, `1/n` folded in; one per distinct sub-step length.
    linear: Vec<Vec<Complex64>>,
    /// `h̃(Ω_k)/n` for the delayed response.
    response: Option<Vec<Complex64>>,
    shaper: Option<Arc<RamanNoiseShaper>>,
    /// `(stage length, index into `linear`)` sequence for one `D`.
    nonlinear_stages: Vec<f64>,
    linear_stages: Vec<usize>,
}

impl Propagator {
    pub fn new(grid: &TimeGrid, config: &PropagationConfig, raman: &RamanModel) -> Result<Self> {
        config.validate()?;
        let needs_model = config.response == ResponseMode::Delayed || config.noise.raman;
        if needs_model {
            raman.check_resolved(grid)?;
        }
        let n = grid.n_points() as f64;
        let response = (config.response == ResponseMode::Delayed)
            .then(|| grid.omegas().iter().map(|&w| raman.response_spectrum(w) / n).collect());
        let shaper = if config.noise.raman {
            Some(Arc::new(RamanNoiseShaper::new(grid, raman, config.noise.n_bar)?))
        } else {
            None
        };

        let sign = config.dispersion.sign();
        let linear_factor = |len: f64| -> Vec<Complex64> {
            grid.omegas()
                .iter()
                .map(|&w| Complex64::from_polar(1.0 / n, -sign * w * w * len / 2.0))
                .collect()
        };
        let half = config.dzeta / 2.0;
        let (linear, linear_stages, nonlinear_stages) = match config.scheme {
            // D(h) = L(h/2) N(h) L(h/2) with h = dζ/2
            Scheme::Strang => (vec![linear_factor(half / 2.0)], vec![0, 0], vec![half]),
            Scheme::Fourth => {
                let a = YOSHIDA_OUTER * half;
                let b = YOSHIDA_INNER * half;
                (
                    vec![linear_factor(a / 2.0), linear_factor((a + b) / 2.0)],
                    vec![0, 1, 1, 0],
                    vec![a, b, a],
                )
            }
        };
        Ok(Self {
            grid: grid.clone(),
            config: config.clone(),
            linear,
            response,
            shaper,
            nonlinear_stages,
            linear_stages,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn config(&self) -> &PropagationConfig {
        &self.config
    }

    pub fn raman_shaper(&self) -> Option<&Arc<RamanNoiseShaper>> {
        self.shaper.as_ref()
    }

    fn apply_linear(&self, field: &mut [Complex64], which: usize, ws: &mut Workspace) {
        self.grid.to_spectrum_raw(field, &mut ws.scratch);
        for (v, f) in field.iter_mut().zip(&self.linear[which]) {
            *v *= f;
        }
        self.grid.back_transform_unscaled(field, &mut ws.scratch);
    }

    /// Nonlinear intensity `N[φ]` into `ws.intensity` (real parts).
    fn nonlinear_potential(&self, field: &[Complex64], ws: &mut Workspace) {
        for (i, v) in ws.intensity.iter_mut().zip(field) {
            *i = Complex64::new(v.norm_sqr(), 0.0);
        }
        if let Some(h) = &self.response {
            self.grid.to_spectrum_raw(&mut ws.intensity, &mut ws.scratch);
            for (i, hk) in ws.intensity.iter_mut().zip(h) {
                *i *= hk;
            }
            self.grid.back_transform_unscaled(&mut ws.intensity, &mut ws.scratch);
        }
    }

    /// Phase rotation `φ ← φ·exp(i[N dζ + Γ^R dζ])` with additive half kicks around it.
    fn apply_nonlinear(&self, field: &mut [Complex64], len: f64, noise: Option<&NoiseIncrement>, ws: &mut Workspace) {
        let gain = noise.and_then(|n| n.gain.as_deref());
        let raman = noise.and_then(|n| n.raman.as_deref());
        if let Some(w) = gain {
            field.iter_mut().zip(w).for_each(|(v, dw)| *v += dw * 0.5);
        }
        if len != 0.0 {
            self.nonlinear_potential(field, ws);
        }
        match (len != 0.0, raman) {
            (true, Some(r)) => {
                for ((v, i), dr) in field.iter_mut().zip(&ws.intensity).zip(r) {
                    *v *= Complex64::cis(i.re * len + dr);
                }
            }
            (true, None) => {
                for (v, i) in field.iter_mut().zip(&ws.intensity) {
                    *v *= Complex64::cis(i.re * len);
                }
            }
            (false, Some(r)) => {
                for (v, dr) in field.iter_mut().zip(r) {
                    *v *= Complex64::cis(*dr);
                }
            }
            (false, None) => {}
        }
        if let Some(w) = gain {
            field.iter_mut().zip(w).for_each(|(v, dw)| *v += dw * 0.5);
        }
    }

    fn deterministic_half(&self, field: &mut [Complex64], ws: &mut Workspace) {
        for (stage, &len) in self.nonlinear_stages.iter().enumerate() {
            self.apply_linear(field, self.linear_stages[stage], ws);
            self.apply_nonlinear(field, len, None, ws);
        }
        self.apply_linear(field, *self.linear_stages.last().unwrap(), ws);
    }

    /// Advance `field` by one step `dζ` with the given noise increments.
    pub fn step(&self, field: &mut [Complex64], noise: &NoiseIncrement, ws: &mut Workspace) -> Result<()> {
        let has_noise = noise.gain.is_some() || noise.raman.is_some();
        match self.config.scheme {
            Scheme::Strang => {
                // L(dζ/2) [N(dζ) + K] L(dζ/2): both D halves share the nonlinear stage.
                self.apply_linear(field, 0, ws);
                self.apply_linear(field, 0, ws);
                self.apply_nonlinear(field, self.config.dzeta, has_noise.then_some(noise), ws);
                self.apply_linear(field, 0, ws);
                self.apply_linear(field, 0, ws);
            }
            Scheme::Fourth => {
                self.deterministic_half(field, ws);
                if has_noise {
                    self.apply_nonlinear(field, 0.0, Some(noise), ws);
                }
                self.deterministic_half(field, ws);
            }
        }
        Ok(())
    }

    /// Integrate one trajectory, handing each snapshot to `observe`.
    ///
    /// `substeps > 1` draws noise at `dζ/substeps` and sums it per step, so that
    /// the result shares its noise realization with a run at the finer step.
    pub fn run(
        &self,
        initial: &ComplexField,
        seed: u64,
        substeps: usize,
        mut observe: impl FnMut(&ComplexField) -> Result<()>,
    ) -> Result<()> {
        if initial.grid() != &self.grid {
            return Err(Error::InvalidGrid("initial field is on a different grid".into()));
        }
        let mut stream = NoiseStream::new(&self.grid, &self.config.noise, self.shaper.clone(), seed)?;
        let mut field = initial.clone();
        if let Some(dv) = stream.initial_vacuum() {
            field.values.iter_mut().zip(dv).for_each(|(v, d)| *v += d);
        }
        let mut ws = Workspace::new(&self.grid);
        let steps = self.config.snapshot_steps();
        let dzeta = self.config.dzeta;
        let fine = dzeta / substeps as f64;
        let noisy = self.config.noise.gain || self.config.noise.raman;
        let quiet = NoiseIncrement::default();
        let mut done = 0usize;
        field.zeta = 0.0;
        for &target in &steps {
            while done < target {
                let noise = if noisy {
                    stream.next_increment(fine, substeps)
                } else {
                    quiet.clone()
                };
                self.step(&mut field.values, &noise, &mut ws)?;
                done += 1;
                if !field.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFinite {
                        zeta: done as f64 * dzeta,
                        seed,
                    });
                }
            }
            field.zeta = done as f64 * dzeta;
            observe(&field)?;
        }
        Ok(())
    }

    pub fn propagate(&self, initial: &ComplexField, seed: u64) -> Result<Trajectory> {
        let mut snapshots = Vec::new();
        self.run(initial, seed, 1, |f| {
            snapshots.push(f.clone());
            Ok(())
        })?;
        Ok(Trajectory {
            snapshots,
            seed,
            step_error: None,
        })
    }

    /// Trajectories at `dζ` and `dζ/2` driven by the same noise.
    pub fn propagate_pair(
        &self,
        raman: &RamanModel,
        initial: &ComplexField,
        seed: u64,
    ) -> Result<(Trajectory, Trajectory)> {
        let fine_prop = Propagator::new(&self.grid, &self.config.halved(), raman)?;
        let mut coarse = Vec::new();
        self.run(initial, seed, 2, |f| {
            coarse.push(f.clone());
            Ok(())
        })?;
        let fine = fine_prop.propagate(initial, seed)?;
        Ok((
            Trajectory {
                snapshots: coarse,
                seed,
                step_error: None,
            },
            fine,
        ))
    }

    /// L2 distance between the `dζ` and `dζ/2` solutions at each snapshot.
    pub fn step_doubling_error(&self, raman: &RamanModel, initial: &ComplexField, seed: u64) -> Result<Vec<f64>> {
        let (coarse, fine) = self.propagate_pair(raman, initial, seed)?;
        Ok(coarse
            .snapshots
            .iter()
            .zip(&fine.snapshots)
            .map(|(c, f)| c.l2_distance(f))
            .collect())
    }
}

/// Convenience wrapper building a [`Propagator`] and integrating once.
pub fn propagate(
    initial: &ComplexField,
    config: &PropagationConfig,
    raman: &RamanModel,
    seed: u64,
) -> Result<Trajectory> {
    Propagator::new(initial.grid(), config, raman)?.propagate(initial, seed)
}

/// Convenience wrapper for the matched-noise step-doubling certificate.
pub fn step_doubling_error(
    initial: &ComplexField,
    config: &PropagationConfig,
    raman: &RamanModel,
    seed: u64,
) -> Result<Vec<f64>> {
    Propagator::new(initial.grid(), config, raman)?.step_doubling_error(raman, initial, seed)
}
