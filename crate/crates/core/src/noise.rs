//! Stochastic inputs of the Wigner equation on the time lattice.
//!
//! Continuum delta correlations `δ(τ-τ')δ(ζ-ζ')` become a per-bin variance of
//! `1/(dτ·dζ)`; increments over a step therefore carry variance `∝ dζ/dτ`.
//! Each noise source draws from its own ChaCha stream so switching one source
//! off leaves the others' realizations unchanged.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::physics::RamanModel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSettings {
    pub vacuum: bool,
    pub gain: bool,
    pub raman: bool,
    pub n_bar: f64,
    pub alpha_g: f64,
    pub alpha_a: f64,
    pub master_seed: u64,
}

impl NoiseSettings {
    /// All sources off.
    pub fn quiet(n_bar: f64) -> Self {
        Self {
            vacuum: false,
            gain: false,
            raman: false,
            n_bar,
            alpha_g: 0.0,
            alpha_a: 0.0,
            master_seed: 0,
        }
    }

    pub fn any(&self) -> bool {
        self.vacuum || self.gain || self.raman
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_bar.is_finite() && self.n_bar > 0.0) {
            return Err(Error::param("noise.n_bar", "must be positive"));
        }
        if !(self.alpha_g >= 0.0 && self.alpha_a >= 0.0) {
            return Err(Error::param("noise.alpha_g", "gain and loss must be >= 0"));
        }
        if self.gain && self.alpha_g != self.alpha_a {
            return Err(Error::param(
                "noise.alpha_a",
                format!("gain {} and loss {} must balance", self.alpha_g, self.alpha_a),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Source {
    Vacuum = 0,
    Gain = 1,
    Raman = 2,
}

fn source_rng(trajectory_seed: u64, source: Source) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(trajectory_seed);
    rng.set_stream(source as u64);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trajectory seed. A composition of bijections on `u64`, hence injective
/// in `trajectory_index` for a fixed master seed.
pub fn derive_trajectory_seed(master_seed: u64, trajectory_index: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(splitmix64(trajectory_index)))
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, sigma_component: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * sigma_component, im * sigma_component)
}

/// Initial Wigner vacuum fluctuation, `<|Δφ_k|²> = 1/(2 n̄ dτ)`.
pub fn sample_initial_vacuum<R: Rng + ?Sized>(grid: &TimeGrid, n_bar: f64, rng: &mut R) -> Vec<Complex64> {
    let sigma = (1.0 / (4.0 * n_bar * grid.dtau())).sqrt();
    (0..grid.n_points()).map(|_| complex_gaussian(rng, sigma)).collect()
}

/// Amplifier/loss increment `Γ dζ`, `<|ΔW_k|²> = (α^G + α^A) dζ / (2 n̄ dτ)`.
pub fn sample_gain_noise<R: Rng + ?Sized>(
    grid: &TimeGrid,
    settings: &NoiseSettings,
    dzeta: f64,
    rng: &mut R,
) -> Vec<Complex64> {
    let var = (settings.alpha_g + settings.alpha_a) * dzeta / (2.0 * settings.n_bar * grid.dtau());
    let sigma = (0.5 * var).sqrt();
    (0..grid.n_points()).map(|_| complex_gaussian(rng, sigma)).collect()
}

/// Spectral filter `√(2F(Ω_k)/n̄)` used to color real white noise.
#[derive(Clone, Debug)]
pub struct RamanNoiseShaper {
    grid: TimeGrid,
    filter: Vec<f64>,
}

impl RamanNoiseShaper {
    pub fn new(grid: &TimeGrid, model: &RamanModel, n_bar: f64) -> Result<Self> {
        model.check_resolved(grid)?;
        Self::from_spectrum(grid, &model.fluorescence_on_grid(grid), n_bar)
    }

    /// Filter from an arbitrary even fluorescence spectrum in FFT order.
    pub fn from_spectrum(grid: &TimeGrid, fluorescence: &[f64], n_bar: f64) -> Result<Self> {
        if fluorescence.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                got: fluorescence.len(),
            });
        }
        let mut filter = Vec::with_capacity(fluorescence.len());
        for (&f, &w) in fluorescence.iter().zip(grid.omegas()) {
            if !(f >= 0.0) {
                return Err(Error::NegativeFluorescence { omega: w, value: f });
            }
            filter.push((2.0 * f / n_bar).sqrt());
        }
        Ok(Self {
            grid: grid.clone(),
            filter,
        })
    }

    pub fn filter(&self) -> &[f64] {
        &self.filter
    }

    fn shape_into(&self, white: &[f64], out: &mut [Complex64], scratch: &mut [Complex64]) {
        for (o, &w) in out.iter_mut().zip(white) {
            *o = Complex64::new(w, 0.0);
        }
        self.grid.to_spectrum_raw(out, scratch);
        for (o, &h) in out.iter_mut().zip(&self.filter) {
            *o *= h;
        }
        self.grid.back_transform_raw(out, scratch);
    }
}

/// Raman increment `Γ^R dζ`: real white noise of variance `dζ/dτ` shaped by the filter.
pub fn sample_raman_noise<R: Rng + ?Sized>(shaper: &RamanNoiseShaper, dzeta: f64, rng: &mut R) -> Vec<f64> {
    let grid = &shaper.grid;
    let sigma = (dzeta / grid.dtau()).sqrt();
    let white: Vec<f64> = (0..grid.n_points())
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    let mut scratch = grid.scratch();
    shaper.shape_into(&white, &mut buf, &mut scratch);
    buf.into_iter().map(|c| c.re).collect()
}

/// Noise entering one integration step.
#[derive(Clone, Debug, Default)]
pub struct NoiseIncrement {
    pub gain: Option<Vec<Complex64>>,
    pub raman: Option<Vec<f64>>,
}

/// Reproducible noise for a single trajectory.
///
/// A step of `substeps × dzeta_fine` returns the exact sum of the `substeps`
/// fine increments, so a run at `dζ` and one at `dζ/2` see identical noise.
pub struct NoiseStream {
    grid: TimeGrid,
    settings: NoiseSettings,
    shaper: Option<Arc<RamanNoiseShaper>>,
    vacuum_rng: ChaCha8Rng,
    gain_rng: ChaCha8Rng,
    raman_rng: ChaCha8Rng,
    white: Vec<f64>,
    shaped: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl NoiseStream {
    pub fn new(
        grid: &TimeGrid,
        settings: &NoiseSettings,
        shaper: Option<Arc<RamanNoiseShaper>>,
        trajectory_seed: u64,
    ) -> Result<Self> {
        if settings.raman && shaper.is_none() {
            return Err(Error::Config("raman noise enabled without a noise shaper".into()));
        }
        let n = grid.n_points();
        Ok(Self {
            grid: grid.clone(),
            settings: settings.clone(),
            shaper,
            vacuum_rng: source_rng(trajectory_seed, Source::Vacuum),
            gain_rng: source_rng(trajectory_seed, Source::Gain),
            raman_rng: source_rng(trajectory_seed, Source::Raman),
            white: vec![0.0; n],
            shaped: vec![Complex64::new(0.0, 0.0); n],
            scratch: grid.scratch(),
        })
    }

    pub fn initial_vacuum(&mut self) -> Option<Vec<Complex64>> {
        self.settings
            .vacuum
            .then(|| sample_initial_vacuum(&self.grid, self.settings.n_bar, &mut self.vacuum_rng))
    }

    pub fn next_increment(&mut self, dzeta_fine: f64, substeps: usize) -> NoiseIncrement {
        let n = self.grid.n_points();
        let gain = self.settings.gain.then(|| {
            let mut acc = vec![Complex64::new(0.0, 0.0); n];
            for _ in 0..substeps {
                let fine = sample_gain_noise(&self.grid, &self.settings, dzeta_fine, &mut self.gain_rng);
                acc.iter_mut().zip(fine).for_each(|(a, f)| *a += f);
            }
            acc
        });
        let raman = match (&self.shaper, self.settings.raman) {
            (Some(shaper), true) => {
                let sigma = (dzeta_fine / self.grid.dtau()).sqrt();
                let mut acc = vec![0.0; n];
                for _ in 0..substeps {
                    for w in self.white.iter_mut() {
                        *w = sigma * self.raman_rng.sample::<f64, _>(StandardNormal);
                    }
                    shaper.shape_into(&self.white, &mut self.shaped, &mut self.scratch);
                    acc.iter_mut().zip(&self.shaped).for_each(|(a, s)| *a += s.re);
                }
                Some(acc)
            }
            _ => None,
        };
        NoiseIncrement { gain, raman }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::spectrum_to_time_kernel;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn settings_all(n_bar: f64, alpha: f64) -> NoiseSettings {
        NoiseSettings {
            vacuum: true,
            gain: true,
            raman: true,
            n_bar,
            alpha_g: alpha,
            alpha_a: alpha,
            master_seed: 7,
        }
    }

    /// Sample variance and its standard error from the fourth moment.
    fn var_with_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        (m2 * n / (n - 1.0), ((m4 - m2 * m2) / n).sqrt())
    }

    #[test]
    fn vacuum_variance_single_point() {
        let g = TimeGrid::new(64, 4.0).unwrap();
        let n_bar = 100.0;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut re = Vec::new();
        let mut abs2 = Vec::new();
        let mut cross = Vec::new();
        for _ in 0..100_000 {
            let v = sample_initial_vacuum(&g, n_bar, &mut rng);
            re.push(v[10].re);
            abs2.push(v[10].norm_sqr());
            cross.push((v[10] * v[11].conj()).re);
        }
        let expected = 1.0 / (2.0 * n_bar * g.dtau());
        let mean_abs2 = abs2.iter().sum::<f64>() / abs2.len() as f64;
        let (var_abs2, _) = var_with_se(&abs2);
        let se_abs2 = (var_abs2 / abs2.len() as f64).sqrt();
        assert!(
            (mean_abs2 - expected).abs() < 3.0 * se_abs2,
            "{mean_abs2} vs {expected}"
        );
        let (var_re, se_re) = var_with_se(&re);
        assert!((var_re - expected / 2.0).abs() < 3.0 * se_re);
        let mean_cross = cross.iter().sum::<f64>() / cross.len() as f64;
        let (var_cross, _) = var_with_se(&cross);
        assert!(mean_cross.abs() < 3.0 * (var_cross / cross.len() as f64).sqrt());
    }

    #[test]
    fn vacuum_vanishes_in_classical_limit() {
        let g = TimeGrid::new(64, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = sample_initial_vacuum(&g, 1e30, &mut rng);
        assert!(v.iter().all(|x| x.norm() < 1e-13));
    }

    #[test]
    fn gain_noise_variance_rule() {
        let g = TimeGrid::new(1024, 20.0).unwrap();
        let s = NoiseSettings {
            n_bar: 4e6,
            ..settings_all(4e6, 0.02)
        };
        let expected = 0.04 * 0.01 / (2.0 * 4e6 * g.dtau());
        assert_relative_eq!(expected, 1.28e-9, max_relative = 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut acc = 0.0;
        let reps = 200;
        for _ in 0..reps {
            acc += sample_gain_noise(&g, &s, 0.01, &mut rng)
                .iter()
                .map(|v| v.norm_sqr())
                .sum::<f64>();
        }
        let mean = acc / (reps * 1024) as f64;
        // |ΔW|² is exponential: relative SE = 1/sqrt(samples)
        assert!((mean / expected - 1.0).abs() < 3.0 / ((reps * 1024) as f64).sqrt());

        let off = NoiseSettings {
            alpha_g: 0.0,
            alpha_a: 0.0,
            ..s
        };
        assert!(sample_gain_noise(&g, &off, 0.01, &mut rng)
            .iter()
            .all(|v| v.norm() == 0.0));
    }

    #[test]
    fn gain_noise_is_spectrally_flat() {
        let g = TimeGrid::new(256, 10.0).unwrap();
        let s = settings_all(1.0, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let reps = 4000;
        let mut psd = vec![0.0; 256];
        let mut scratch = g.scratch();
        for _ in 0..reps {
            let mut v = sample_gain_noise(&g, &s, 1.0, &mut rng);
            g.to_spectrum_raw(&mut v, &mut scratch);
            psd.iter_mut().zip(&v).for_each(|(p, x)| *p += x.norm_sqr());
        }
        let mean = psd.iter().sum::<f64>() / 256.0;
        for p in &psd {
            // each bin averages `reps` exponential variates
            assert!((p / mean - 1.0).abs() < 5.0 / (reps as f64).sqrt());
        }
    }

    #[test]
    fn raman_noise_zero_when_strength_zero() {
        let g = TimeGrid::new(1024, 20.0).unwrap();
        let c = crate::physics::LorentzianComponent {
            strength: 0.0,
            ..crate::physics::LorentzianComponent::SINGLE_LINE
        };
        let m = RamanModel::new(vec![c], 300.0, 500e-15).unwrap();
        let shaper = RamanNoiseShaper::new(&g, &m, 4e6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(sample_raman_noise(&shaper, 0.01, &mut rng).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn raman_white_limit_variance() {
        let g = TimeGrid::new(256, 10.0).unwrap();
        let (f0, n_bar, dz) = (0.046, 50.0, 0.01);
        let shaper = RamanNoiseShaper::from_spectrum(&g, &vec![f0; 256], n_bar).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut samples = Vec::new();
        for _ in 0..400 {
            let r = sample_raman_noise(&shaper, dz, &mut rng);
            samples.extend_from_slice(&r);
        }
        let (var, se) = var_with_se(&samples);
        let expected = 2.0 * f0 * dz / (n_bar * g.dtau());
        assert!((var - expected).abs() < 3.0 * se, "{var} vs {expected}");
    }

    #[test]
    fn raman_periodogram_follows_fluorescence() {
        let g = TimeGrid::new(1024, 20.0).unwrap();
        let m = RamanModel::single_lorentzian(300.0, 500e-15).unwrap();
        let n_bar = 4e6;
        let shaper = RamanNoiseShaper::new(&g, &m, n_bar).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let dz = 0.005;
        let reps = 10_000;
        let mut psd = vec![0.0; 1024];
        let mut scratch = g.scratch();
        for _ in 0..reps {
            let r = sample_raman_noise(&shaper, dz, &mut rng);
            let mut buf: Vec<Complex64> = r.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            g.to_spectrum_raw(&mut buf, &mut scratch);
            psd.iter_mut().zip(&buf).for_each(|(p, x)| *p += x.norm_sqr());
        }
        // E|Y_k|² = n (dζ/dτ) 2F_k/n̄
        let norm = 1024.0 * dz / g.dtau();
        let fl = m.fluorescence_on_grid(&g);
        for k in 0..1024 {
            let est = psd[k] / reps as f64 / norm;
            let want = 2.0 * fl[k] / n_bar;
            assert!((est / want - 1.0).abs() < 0.05, "bin {k}: {est} vs {want}");
        }
    }

    #[test]
    fn raman_synthesis_is_real() {
        let g = TimeGrid::new(1024, 20.0).unwrap();
        let m = RamanModel::single_lorentzian(300.0, 500e-15).unwrap();
        let shaper = RamanNoiseShaper::new(&g, &m, 4e6).unwrap();
        let mut white = vec![0.0; 1024];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for w in white.iter_mut() {
            *w = rng.sample(StandardNormal);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); 1024];
        let mut scratch = g.scratch();
        shaper.shape_into(&white, &mut out, &mut scratch);
        let scale = out.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
        assert!(out.iter().all(|c| c.im.abs() < 1e-12 * scale));
    }

    #[test]
    fn raman_covariance_matches_time_kernel() {
        let g = TimeGrid::new(1024, 20.0).unwrap();
        let m = RamanModel::single_lorentzian(300.0, 500e-15).unwrap();
        let n_bar = 1.0;
        let shaper = RamanNoiseShaper::new(&g, &m, n_bar).unwrap();
        let kernel = spectrum_to_time_kernel(&g, &m.fluorescence_on_grid(&g));
        let c = g.center_index();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut lag0 = Vec::new();
        for _ in 0..2000 {
            let r = sample_raman_noise(&shaper, 1.0, &mut rng);
            for j in (0..1024).step_by(8) {
                lag0.push(r[j] * r[j]);
            }
        }
        let mean = lag0.iter().sum::<f64>() / lag0.len() as f64;
        let expected = 2.0 * kernel[c] / n_bar;
        assert!((mean / expected - 1.0).abs() < 0.03, "{mean} vs {expected}");
    }

    #[test]
    fn negative_fluorescence_rejected() {
        let g = TimeGrid::new(64, 4.0).unwrap();
        let mut spec = vec![0.1; 64];
        spec[3] = -1e-3;
        assert!(matches!(
            RamanNoiseShaper::from_spectrum(&g, &spec, 1.0),
            Err(Error::NegativeFluorescence { .. })
        ));
    }

    #[test]
    fn noise_scales_inverse_with_n_bar() {
        let g = TimeGrid::new(256, 10.0).unwrap();
        let s1 = settings_all(100.0, 0.1);
        let s2 = settings_all(200.0, 0.1);
        let mut a = NoiseStream::new(&g, &s1, None, 11).ok();
        assert!(a.is_none(), "raman without shaper is rejected");
        let sh1 = Arc::new(RamanNoiseShaper::from_spectrum(&g, &vec![0.05; 256], 100.0).unwrap());
        let sh2 = Arc::new(RamanNoiseShaper::from_spectrum(&g, &vec![0.05; 256], 200.0).unwrap());
        a = Some(NoiseStream::new(&g, &s1, Some(sh1), 11).unwrap());
        let mut b = NoiseStream::new(&g, &s2, Some(sh2), 11).unwrap();
        let (a, b) = (a.as_mut().unwrap(), &mut b);
        let va = a.initial_vacuum().unwrap();
        let vb = b.initial_vacuum().unwrap();
        for (x, y) in va.iter().zip(&vb) {
            assert_relative_eq!(x.norm_sqr(), 2.0 * y.norm_sqr(), max_relative = 1e-12);
        }
        let ia = a.next_increment(0.01, 1);
        let ib = b.next_increment(0.01, 1);
        for (x, y) in ia.gain.unwrap().iter().zip(ib.gain.unwrap().iter()) {
            assert_relative_eq!(x.norm_sqr(), 2.0 * y.norm_sqr(), max_relative = 1e-12);
        }
        for (x, y) in ia.raman.unwrap().iter().zip(ib.raman.unwrap().iter()) {
            assert_relative_eq!(x * x, 2.0 * y * y, max_relative = 1e-9, epsilon = 1e-30);
        }
    }

    #[test]
    fn coarse_step_is_sum_of_fine_steps() {
        let g = TimeGrid::new(1024, 20.0).unwrap();
        let m = RamanModel::single_lorentzian(300.0, 500e-15).unwrap();
        let s = settings_all(1e4, 0.02);
        let shaper = Arc::new(RamanNoiseShaper::new(&g, &m, s.n_bar).unwrap());
        let mut fine = NoiseStream::new(&g, &s, Some(shaper.clone()), 99).unwrap();
        let mut coarse = NoiseStream::new(&g, &s, Some(shaper), 99).unwrap();
        for _ in 0..3 {
            let f1 = fine.next_increment(0.005, 1);
            let f2 = fine.next_increment(0.005, 1);
            let c = coarse.next_increment(0.005, 2);
            let (g1, g2, gc) = (f1.gain.unwrap(), f2.gain.unwrap(), c.gain.unwrap());
            for k in 0..1024 {
                assert_eq!(g1[k] + g2[k], gc[k]);
            }
            let (r1, r2, rc) = (f1.raman.unwrap(), f2.raman.unwrap(), c.raman.unwrap());
            for k in 0..1024 {
                assert_eq!(r1[k] + r2[k], rc[k]);
            }
        }
    }

    #[test]
    fn sources_use_independent_streams() {
        let g = TimeGrid::new(64, 4.0).unwrap();
        let with_gain = NoiseSettings {
            raman: false,
            ..settings_all(10.0, 0.1)
        };
        let no_gain = NoiseSettings {
            gain: false,
            ..with_gain.clone()
        };
        let mut a = NoiseStream::new(&g, &with_gain, None, 5).unwrap();
        let mut b = NoiseStream::new(&g, &no_gain, None, 5).unwrap();
        let _ = a.next_increment(0.1, 1);
        let _ = b.next_increment(0.1, 1);
        // drawing gain noise does not perturb later draws of other sources
        assert_eq!(a.initial_vacuum(), b.initial_vacuum());
    }

    #[test]
    fn trajectory_seeds() {
        assert_ne!(derive_trajectory_seed(42, 0), derive_trajectory_seed(42, 1));
        assert_eq!(derive_trajectory_seed(42, 17), derive_trajectory_seed(42, 17));
        let seeds: std::collections::HashSet<u64> = (0..10_000).map(|i| derive_trajectory_seed(3, i)).collect();
        assert_eq!(seeds.len(), 10_000);
    }

    #[test]
    fn stationarity_across_grid() {
        let g = TimeGrid::new(128, 8.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let reps = 20_000;
        let (mut left, mut right) = (0.0, 0.0);
        for _ in 0..reps {
            let v = sample_initial_vacuum(&g, 1.0, &mut rng);
            left += v[3].norm_sqr();
            right += v[100].norm_sqr();
        }
        let expected = reps as f64 / (2.0 * g.dtau());
        assert!((left / expected - 1.0).abs() < 4.0 / (reps as f64).sqrt());
        assert!((right / expected - 1.0).abs() < 4.0 / (reps as f64).sqrt());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn seed_derivation_injective_locally(master in any::<u64>(), i in any::<u64>(), j in any::<u64>()) {
            prop_assume!(i != j);
            prop_assert_ne!(derive_trajectory_seed(master, i), derive_trajectory_seed(master, j));
        }
    }
}
