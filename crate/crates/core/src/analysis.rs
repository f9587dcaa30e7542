//! Homodyne arrival-time measurement and ensemble jitter statistics.
//!
//! Positions are read off with a local oscillator proportional to the
//! translation adjoint of the reference soliton: `(τ - τc)φ̄` for bright
//! pulses and the `sech²` phase-quadrature mode for a black kink.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, TimeGrid};
use crate::integrator::{PropagationConfig, Propagator};
use crate::noise::{derive_trajectory_seed, NoiseSettings};
use crate::physics::RamanModel;
use crate::solitons::{
    bright_field, dark_field, dark_pair_members, BrightSolitonParams, DarkSolitonParams, LINEARIZATION_LIMIT,
};

/// Reference soliton a measurement is taken against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reference {
    Bright(BrightSolitonParams),
    /// One kink of a dark field, measured over `window = [start, end)` in τ.
    Dark {
        kink: DarkSolitonParams,
        window: (f64, f64),
    },
}

/// Precomputed local oscillator for one reference.
#[derive(Clone, Debug)]
pub struct PositionProbe {
    shape: Vec<Complex64>,
    lo: Vec<Complex64>,
    range: Range<usize>,
    scale: f64,
    phase: f64,
    phase_match: bool,
    dtau: f64,
    shape_norm: f64,
}

impl PositionProbe {
    pub fn new(grid: &TimeGrid, reference: &Reference, phase_match: bool) -> Result<Self> {
        let taus = grid.taus();
        let dtau = grid.dtau();
        let (range, phase, scale, shape, tangent, lo): (
            Range<usize>,
            f64,
            f64,
            Vec<Complex64>,
            Vec<Complex64>,
            Vec<Complex64>,
        ) = match *reference {
            Reference::Bright(p) => {
                if !(p.amplitude > 0.0) {
                    return Err(Error::param("reference.A", "must be positive"));
                }
                let zero = BrightSolitonParams { phase: 0.0, ..p };
                let tc = zero.center();
                let shape: Vec<Complex64> = taus.iter().map(|&t| zero.value(t)).collect();
                let tangent = taus
                    .iter()
                    .zip(&shape)
                    .map(|(&t, s)| s * (p.amplitude * t - p.position).tanh())
                    .collect();
                let lo = taus.iter().zip(&shape).map(|(&t, s)| s * (t - tc)).collect();
                (0..grid.n_points(), p.phase, 1.0 / p.amplitude, shape, tangent, lo)
            }
            Reference::Dark { kink, window } => {
                if !(kink.depth > 0.0 && kink.depth <= 1.0 && kink.background > 0.0) {
                    return Err(Error::param(
                        "reference.A",
                        "dark kink needs depth in (0, 1] and positive background",
                    ));
                }
                let start = taus.iter().position(|&t| t >= window.0).unwrap_or(taus.len());
                let end = taus.iter().position(|&t| t >= window.1).unwrap_or(taus.len());
                if end <= start {
                    return Err(Error::param("reference.window", "empty measurement window"));
                }
                let zero = DarkSolitonParams { phase: 0.0, ..kink };
                let ts = &taus[start..end];
                let shape = ts.iter().map(|&t| zero.value(t)).collect();
                let tangent: Vec<Complex64> = ts.iter().map(|&t| zero.position_derivative(t)).collect();
                let lo = tangent.clone();
                (
                    start..end,
                    kink.phase,
                    1.0 / (kink.background * kink.depth),
                    shape,
                    tangent,
                    lo,
                )
            }
        };
        let norm: f64 = tangent.iter().zip(&lo).map(|(a, b)| (a * b.conj()).re).sum::<f64>() * dtau;
        if !(norm.abs() > 1e-12) {
            return Err(Error::Quadrature(
                "local oscillator orthogonal to the translation mode".into(),
            ));
        }
        let lo = lo.into_iter().map(|v| v / norm).collect();
        let shape_norm = shape.iter().map(|s| s.norm_sqr()).sum::<f64>().sqrt();
        Ok(Self {
            shape,
            lo,
            range,
            scale,
            phase,
            phase_match,
            dtau,
            shape_norm,
        })
    }

    /// Phase of `∫ field · φ̄*` over the measurement window.
    pub fn matched_phase(&self, field: &ComplexField) -> f64 {
        field.values[self.range.clone()]
            .iter()
            .zip(&self.shape)
            .map(|(f, s)| f * s.conj())
            .sum::<Complex64>()
            .arg()
    }

    fn rotation(&self, field: &ComplexField) -> Complex64 {
        let theta = if self.phase_match {
            self.matched_phase(field)
        } else {
            self.phase
        };
        Complex64::from_polar(1.0, -theta)
    }

    /// Arrival-time displacement `Δq/A` (bright) or `Δq/(φ0A)` (dark).
    pub fn measure(&self, field: &ComplexField) -> f64 {
        let rot = self.rotation(field);
        let dq: f64 = field.values[self.range.clone()]
            .iter()
            .zip(&self.shape)
            .zip(&self.lo)
            .map(|((f, s), g)| ((f * rot - s) * g.conj()).re)
            .sum::<f64>()
            * self.dtau;
        dq * self.scale
    }

    /// `‖field - φ̄‖/‖φ̄‖` over the window, after phase alignment.
    pub fn relative_perturbation(&self, field: &ComplexField) -> f64 {
        let rot = self.rotation(field);
        let d: f64 = field.values[self.range.clone()]
            .iter()
            .zip(&self.shape)
            .map(|(f, s)| (f * rot - s).norm_sqr())
            .sum();
        d.sqrt() / self.shape_norm
    }

    pub fn is_linear(&self, field: &ComplexField) -> bool {
        self.relative_perturbation(field) <= LINEARIZATION_LIMIT
    }
}

pub fn measure_position(field: &ComplexField, reference: &Reference, phase_match: bool) -> Result<f64> {
    Ok(PositionProbe::new(field.grid(), reference, phase_match)?.measure(field))
}

/// Bright reference fitted to a (noise-free) field: `A = N/2`, `V = P/N`,
/// centre at the intensity centroid.
pub fn bright_reference_from_field(field: &ComplexField) -> Reference {
    let n = field.photon_number();
    let centroid = field
        .values
        .iter()
        .zip(field.grid().taus())
        .map(|(v, &t)| t * v.norm_sqr())
        .sum::<f64>()
        * field.grid().dtau()
        / n;
    let amplitude = n / 2.0;
    Reference::Bright(BrightSolitonParams {
        amplitude,
        velocity: field.momentum() / n,
        position: amplitude * centroid,
        phase: 0.0,
    })
}

/// Dark reference for the kink inside `window`, centred on the centroid of
/// the intensity deficit `φ0² - |φ|²`.
pub fn dark_reference_from_field(field: &ComplexField, kink: &DarkSolitonParams, window: (f64, f64)) -> Reference {
    let bg2 = kink.background * kink.background;
    let (mut num, mut den) = (0.0, 0.0);
    for (v, &t) in field.values.iter().zip(field.grid().taus()) {
        if t >= window.0 && t < window.1 {
            let w = bg2 - v.norm_sqr();
            num += w * t;
            den += w;
        }
    }
    let center = if den > 0.0 { num / den } else { kink.center() };
    Reference::Dark {
        kink: DarkSolitonParams {
            position: kink.background * kink.depth * center,
            phase: 0.0,
            ..*kink
        },
        window,
    }
}

/// Mean, unbiased variance and the fourth-moment standard error of the variance.
pub fn variance_with_error(samples: &[f64]) -> (f64, f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let (m2, m4) = samples.iter().fold((0.0, 0.0), |(a, b), &x| {
        let d = (x - mean) * (x - mean);
        (a + d, b + d * d)
    });
    let (m2, m4) = (m2 / n, m4 / n);
    let var = m2 * n / (n - 1.0);
    let se = ((m4 - m2 * m2).max(0.0) / n).sqrt();
    (mean, var, se)
}

/// Arrival-time statistics across an ensemble, per snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub zetas: Vec<f64>,
    /// `positions[trajectory][snapshot]`.
    pub positions: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub std_error: Vec<f64>,
}

impl EnsembleResult {
    pub fn from_positions(zetas: Vec<f64>, positions: Vec<Vec<f64>>) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::param(
                "ensemble.n_trajectories",
                "need at least two trajectories for a variance",
            ));
        }
        if let Some(bad) = positions.iter().find(|p| p.len() != zetas.len()) {
            return Err(Error::SnapshotMismatch(format!(
                "trajectory has {} snapshots, expected {}",
                bad.len(),
                zetas.len()
            )));
        }
        let mut mean = Vec::with_capacity(zetas.len());
        let mut variance = Vec::with_capacity(zetas.len());
        let mut std_error = Vec::with_capacity(zetas.len());
        let mut column = vec![0.0; positions.len()];
        for k in 0..zetas.len() {
            for (c, p) in column.iter_mut().zip(&positions) {
                *c = p[k];
            }
            let (m, v, s) = variance_with_error(&column);
            mean.push(m);
            variance.push(v);
            std_error.push(s);
        }
        Ok(Self {
            zetas,
            positions,
            mean,
            variance,
            std_error,
        })
    }

    pub fn n_trajectories(&self) -> usize {
        self.positions.len()
    }

    pub fn variance_seconds2(&self, t0: f64) -> Vec<f64> {
        self.variance.iter().map(|v| v * t0 * t0).collect()
    }

    /// Statistics of trajectories `[0, n/2)` and `[n/2, n)`.
    pub fn halves(&self) -> Result<(Self, Self)> {
        let mid = self.positions.len() / 2;
        Ok((
            Self::from_positions(self.zetas.clone(), self.positions[..mid].to_vec())?,
            Self::from_positions(self.zetas.clone(), self.positions[mid..].to_vec())?,
        ))
    }
}

/// Measures stored trajectories against per-snapshot references.
pub fn jitter_curve(
    trajectories: &[crate::integrator::Trajectory],
    references: &[Reference],
    phase_match: bool,
) -> Result<EnsembleResult> {
    let first = trajectories
        .first()
        .ok_or_else(|| Error::param("ensemble.n_trajectories", "no trajectories"))?;
    let zetas = first.zetas();
    if references.len() != zetas.len() {
        return Err(Error::SnapshotMismatch(format!(
            "{} references for {} snapshots",
            references.len(),
            zetas.len()
        )));
    }
    let grid = first.snapshots[0].grid().clone();
    let probes = references
        .iter()
        .map(|r| PositionProbe::new(&grid, r, phase_match))
        .collect::<Result<Vec<_>>>()?;
    let mut positions = Vec::with_capacity(trajectories.len());
    for t in trajectories {
        if t.zetas() != zetas {
            return Err(Error::SnapshotMismatch("trajectories sampled at different zeta".into()));
        }
        if t.snapshots.iter().any(|s| s.grid() != &grid) {
            return Err(Error::SnapshotMismatch("trajectories on different grids".into()));
        }
        positions.push(t.snapshots.iter().zip(&probes).map(|(s, p)| p.measure(s)).collect());
    }
    EnsembleResult::from_positions(zetas, positions)
}

/// Initial condition of an ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    Bright(BrightSolitonParams),
    /// Two kinks of opposite chirp; the one at `-τ_max/2` is measured.
    DarkPair(DarkSolitonParams),
}

impl InitialState {
    pub fn field(&self, grid: &TimeGrid) -> Result<ComplexField> {
        match self {
            InitialState::Bright(p) => bright_field(p, grid),
            InitialState::DarkPair(p) => dark_field(p, grid, true),
        }
    }

    /// Reference matching a noise-free snapshot of this state.
    pub fn reference_for(&self, clean: &ComplexField) -> Reference {
        match self {
            InitialState::Bright(_) => bright_reference_from_field(clean),
            InitialState::DarkPair(p) => {
                let (first, _) = dark_pair_members(p, clean.grid());
                let tau_max = clean.grid().tau_max();
                let c = first.center();
                dark_reference_from_field(clean, &first, (c - tau_max / 2.0, c + tau_max / 2.0))
            }
        }
    }
}

/// Everything needed to run one Monte Carlo ensemble.
#[derive(Clone, Debug)]
pub struct EnsembleSpec {
    pub grid: TimeGrid,
    pub propagation: PropagationConfig,
    pub raman: RamanModel,
    pub initial: InitialState,
    pub n_trajectories: usize,
    /// Leading trajectories rerun at `dζ/2` with matched noise.
    pub certify_trajectories: usize,
    pub phase_match: bool,
}

/// Matched-noise step-doubling check over a subset of trajectories.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCertificate {
    pub dzeta: f64,
    pub trajectories: usize,
    /// Largest L2 field difference between the `dζ` and `dζ/2` runs.
    pub max_field_error: f64,
    /// RMS over trajectories of the centred position difference, per snapshot.
    pub position_error: Vec<f64>,
    /// `position_error / sqrt(ensemble variance)`, per snapshot.
    pub relative_error: Vec<f64>,
    pub coarse_positions: Vec<Vec<f64>>,
    pub fine_positions: Vec<Vec<f64>>,
}

impl StepCertificate {
    pub fn max_relative_error(&self) -> f64 {
        self.relative_error.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct EnsembleRun {
    pub result: EnsembleResult,
    pub references: Vec<Reference>,
    pub certificate: Option<StepCertificate>,
}

/// Noise steps are always drawn at `dζ/2` and summed, so any member can be
/// replayed at half the step with identical noise.
const NOISE_SUBSTEPS: usize = 2;

pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleRun> {
    if spec.n_trajectories < 1 {
        return Err(Error::param("ensemble.n_trajectories", "must be >= 1"));
    }
    let initial = spec.initial.field(&spec.grid)?;
    let propagator = Propagator::new(&spec.grid, &spec.propagation, &spec.raman)?;

    let quiet_config = PropagationConfig {
        noise: NoiseSettings {
            vacuum: false,
            gain: false,
            raman: false,
            ..spec.propagation.noise.clone()
        },
        ..spec.propagation.clone()
    };
    let clean = Propagator::new(&spec.grid, &quiet_config, &spec.raman)?.propagate(&initial, 0)?;
    let references: Vec<Reference> = clean.snapshots.iter().map(|s| spec.initial.reference_for(s)).collect();
    let probes = references
        .iter()
        .map(|r| PositionProbe::new(&spec.grid, r, spec.phase_match))
        .collect::<Result<Vec<_>>>()?;
    let zetas = clean.zetas();

    let master = spec.propagation.noise.master_seed;
    let positions = (0..spec.n_trajectories)
        .into_par_iter()
        .map(|i| {
            let seed = derive_trajectory_seed(master, i as u64);
            let mut out = Vec::with_capacity(probes.len());
            propagator.run(&initial, seed, NOISE_SUBSTEPS, |f| {
                out.push(probes[out.len()].measure(f));
                Ok(())
            })?;
            Ok(out)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    let result = if positions.len() >= 2 {
        EnsembleResult::from_positions(zetas.clone(), positions)?
    } else {
        // a single trajectory has no spread
        let n = zetas.len();
        EnsembleResult {
            mean: positions[0].clone(),
            zetas: zetas.clone(),
            positions,
            variance: vec![0.0; n],
            std_error: vec![0.0; n],
        }
    };

    let certificate = if spec.certify_trajectories > 0 {
        Some(certify(spec, &propagator, &initial, &probes, &result)?)
    } else {
        None
    };
    Ok(EnsembleRun {
        result,
        references,
        certificate,
    })
}

fn certify(
    spec: &EnsembleSpec,
    coarse: &Propagator,
    initial: &ComplexField,
    probes: &[PositionProbe],
    result: &EnsembleResult,
) -> Result<StepCertificate> {
    let fine = Propagator::new(&spec.grid, &spec.propagation.halved(), &spec.raman)?;
    let count = spec.certify_trajectories.min(spec.n_trajectories);
    let master = spec.propagation.noise.master_seed;
    let runs = (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = derive_trajectory_seed(master, i as u64);
            let mut coarse_fields = Vec::new();
            let mut coarse_pos = Vec::new();
            coarse.run(initial, seed, NOISE_SUBSTEPS, |f| {
                coarse_pos.push(probes[coarse_pos.len()].measure(f));
                coarse_fields.push(f.clone());
                Ok(())
            })?;
            let mut fine_pos = Vec::new();
            let mut max_err: f64 = 0.0;
            fine.run(initial, seed, 1, |f| {
                let k = fine_pos.len();
                fine_pos.push(probes[k].measure(f));
                max_err = max_err.max(f.l2_distance(&coarse_fields[k]));
                Ok(())
            })?;
            Ok((coarse_pos, fine_pos, max_err))
        })
        .collect::<Result<Vec<_>>>()?;

    let snapshots = result.zetas.len();
    let mut position_error = vec![0.0; snapshots];
    let mut relative_error = vec![0.0; snapshots];
    for k in 0..snapshots {
        let diffs: Vec<f64> = runs.iter().map(|(c, f, _)| c[k] - f[k]).collect();
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let rms = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / diffs.len() as f64).sqrt();
        position_error[k] = rms;
        let signal = result.variance[k].sqrt();
        relative_error[k] = if signal > 0.0 {
            rms / signal
        } else if rms == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    Ok(StepCertificate {
        dzeta: spec.propagation.dzeta,
        trajectories: count,
        max_field_error: runs.iter().map(|r| r.2).fold(0.0, f64::max),
        position_error,
        relative_error,
        coarse_positions: runs.iter().map(|r| r.0.clone()).collect(),
        fine_positions: runs.into_iter().map(|r| r.1).collect(),
    })
}

/// Ensembles driven by one noise source at a time, plus all together.
#[derive(Clone, Debug)]
pub struct NoiseDecomposition {
    pub vacuum_only: EnsembleRun,
    pub gordon_haus_only: EnsembleRun,
    pub raman_only: EnsembleRun,
    pub total: EnsembleRun,
}

/// Runs the four source families with the same master seed, so every family
/// sees the same per-source random streams.
pub fn decompose_noise_runs(spec: &EnsembleSpec) -> Result<NoiseDecomposition> {
    let with = |vacuum: bool, gain: bool, raman: bool| {
        let mut s = spec.clone();
        s.propagation.noise.vacuum = vacuum;
        s.propagation.noise.gain = gain;
        s.propagation.noise.raman = raman;
        run_ensemble(&s)
    };
    Ok(NoiseDecomposition {
        vacuum_only: with(true, false, false)?,
        gordon_haus_only: with(false, true, false)?,
        raman_only: with(false, false, true)?,
        total: with(true, true, true)?,
    })
}

/// Weighted least-squares fit of `y ≈ Σ c_p x^p` over the given powers.
pub fn fit_powers(x: &[f64], y: &[f64], weights: &[f64], powers: &[i32]) -> Result<Vec<f64>> {
    if x.len() != y.len() || x.len() != weights.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len().min(weights.len()),
        });
    }
    let design = DMatrix::from_fn(x.len(), powers.len(), |i, j| weights[i].sqrt() * x[i].powi(powers[j]));
    let rhs = DVector::from_iterator(y.len(), y.iter().zip(weights).map(|(v, w)| w.sqrt() * v));
    let svd = design.svd(true, true);
    if svd.rank(1e-12 * svd.singular_values.max()) < powers.len() {
        return Err(Error::Quadrature("singular least-squares system".into()));
    }
    let solution = svd.solve(&rhs, 0.0).map_err(|e| Error::Quadrature(e.to_string()))?;
    Ok(solution.iter().copied().collect())
}

/// Fits `variance ≈ Σ c_p ζ^p` weighted by `1/SE²`, skipping points without spread.
pub fn fit_variance(result: &EnsembleResult, powers: &[i32]) -> Result<Vec<f64>> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut w = Vec::new();
    for ((&z, &v), &se) in result.zetas.iter().zip(&result.variance).zip(&result.std_error) {
        if se > 0.0 {
            x.push(z);
            y.push(v);
            w.push(1.0 / (se * se));
        }
    }
    fit_powers(&x, &y, &w, powers)
}
