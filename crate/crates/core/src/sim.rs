//! Stochastic cross-check: integrates the c-number generalized Langevin
//! equation with spectrally synthesized noise and estimates escape rates
//! from first-passage times.
//!
//! The exponential kernel is handled by the exact Markovian embedding
//!   xdot = v,  vdot = -V'(x) - y + f(t) + Q(t),
//!   ydot = -y/tau_c + (Gamma/tau_c) v,
//! so no memory integral is carried. Trajectories are independent work
//! units with per-trajectory RNG substreams; results are identical for any
//! degree of parallelism.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex as FftComplex;
use rustfft::Fft;
use serde::{Deserialize, Serialize};

use crate::bath::{BathSpec, FdrMode};
use crate::dispersion::{evolve_moments, FluctuationState};
use crate::error::Error;
use crate::moments::stationary_variances;
use crate::potential::CubicPotential;
use crate::Result;

fn default_absorb() -> f64 {
    0.5
}

/// Simulation parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    /// Integrator step.
    pub dt: f64,
    /// Horizon; trajectories not escaped by then are censored.
    pub t_max: f64,
    pub n_traj: usize,
    pub seed: u64,
    pub noise_mode: FdrMode,
    /// Include the local-curvature dispersion forcing Q(t).
    #[serde(default)]
    pub q_correction: bool,
    /// Absorbing boundary sits at x_b + absorb_offset.
    #[serde(default = "default_absorb")]
    pub absorb_offset: f64,
    /// Synthesis bins; defaults to the FFT grid implied by (dt, t_max).
    #[serde(default)]
    pub n_freq: Option<usize>,
}

impl SimConfig {
    pub fn validate(&self, bath: &BathSpec, potential: &CubicPotential) -> Result<()> {
        let scale = bath
            .tau_c
            .min(1.0 / potential.omega0_sq().sqrt())
            .min(1.0 / potential.omegab_sq().sqrt());
        if !(self.dt > 0.0) || self.dt >= scale / 20.0 {
            return Err(Error::Config(format!(
                "dt = {} too large; need dt < {:.4} (min(tau_c, 1/omega)/20)",
                self.dt,
                scale / 20.0
            )));
        }
        if self.n_traj < 100 {
            return Err(Error::Config("n_traj must be >= 100".into()));
        }
        if !(self.absorb_offset > 0.0) {
            return Err(Error::Config("absorb_offset must be > 0".into()));
        }
        if let Some(nf) = self.n_freq {
            let w_synth = bath.omega_max().min(std::f64::consts::PI / self.dt);
            let needed = (self.t_max * w_synth / std::f64::consts::PI).ceil() as usize;
            if nf < needed {
                return Err(Error::Config(format!(
                    "n_freq = {nf} violates Nyquist coverage; need >= {needed}"
                )));
            }
        }
        Ok(())
    }
}

/// First-passage rate estimate.
#[derive(Debug, Clone, Serialize)]
pub struct FptEstimate {
    pub k_sim: f64,
    pub stderr: f64,
    pub n_escaped: usize,
    pub censored: usize,
}

/// Per-trajectory outcome written to the CSV.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrajectoryOutcome {
    pub index: usize,
    /// First-passage time, or None if censored at t_max.
    pub fpt: Option<f64>,
}

/// FFT plan shared across trajectories.
pub struct NoisePlan {
    n_fft: usize,
    fft: Arc<dyn Fft<f64>>,
    /// sqrt(S(omega_k) d_omega) per bin, zero beyond the synthesis cutoff.
    amplitude: Vec<f64>,
}

impl NoisePlan {
    pub fn new(bath: &BathSpec, cfg: &SimConfig) -> Self {
        let n_steps = (cfg.t_max / cfg.dt).ceil() as usize + 2;
        let n_fft = n_steps.next_power_of_two();
        let d_omega = 2.0 * std::f64::consts::PI / (n_fft as f64 * cfg.dt);
        let w_cut = bath.omega_max().min(std::f64::consts::PI / cfg.dt);
        let n_half = n_fft / 2;
        let n_bins = cfg.n_freq.unwrap_or(n_half).min(n_half);
        let mut amplitude = vec![0.0; n_half + 1];
        for (k, a) in amplitude.iter_mut().enumerate().take(n_bins + 1) {
            let w = k as f64 * d_omega;
            if w <= w_cut {
                *a = (bath.spectral_weight(w, cfg.noise_mode) * d_omega).sqrt();
            }
        }
        let mut planner = rustfft::FftPlanner::new();
        let fft = planner.plan_fft_inverse(n_fft);
        NoisePlan {
            n_fft,
            fft,
            amplitude,
        }
    }

    /// Real stationary Gaussian path on the step grid, deterministic given
    /// (seed, trajectory index).
    pub fn synthesize(&self, seed: u64, traj_index: u64) -> Vec<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(traj_index.wrapping_add(1));
        let n = self.n_fft;
        let mut spec = vec![FftComplex::new(0.0, 0.0); n];
        // f_j = sum_k [a_k cos(w_k t_j) + b_k sin(w_k t_j)] built as a
        // Hermitian spectrum: Z_k = (a_k - i b_k)/2 for 0 < k < n/2
        for k in 0..=(n / 2) {
            let amp = self.amplitude[k];
            let (ga, gb): (f64, f64) = (gauss(&mut rng), gauss(&mut rng));
            if amp == 0.0 {
                continue;
            }
            if k == 0 {
                spec[0] = FftComplex::new(amp * ga, 0.0);
            } else if k == n / 2 {
                spec[n / 2] = FftComplex::new(amp * ga, 0.0);
            } else {
                let z = FftComplex::new(0.5 * amp * ga, -0.5 * amp * gb);
                spec[k] = z;
                spec[n - k] = z.conj();
            }
        }
        self.fft.process(&mut spec);
        spec.into_iter().map(|z| z.re).collect()
    }
}

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; two uniforms per call keeps the stream layout simple and
    // reproducible
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Result of one trajectory.
pub enum Outcome {
    Escaped(f64),
    Censored,
}

/// Heun (predictor-corrector) integration of the embedded system with a
/// precomputed noise path; returns the first time x >= x_b + offset.
pub fn integrate_trajectory(
    potential: &CubicPotential,
    bath: &BathSpec,
    cfg: &SimConfig,
    noise: &[f64],
    x0: f64,
    v0: f64,
) -> Result<Outcome> {
    let dt = cfg.dt;
    let n_steps = (cfg.t_max / dt).floor() as usize;
    let absorb = potential.xb() + cfg.absorb_offset;
    let tau_c = bath.tau_c;
    let g_over_tau = bath.gamma / tau_c;
    let (mut x, mut v, mut y) = (x0, v0, 0.0_f64);

    // dispersion forcing state: local curvature sign and clock since the
    // last sign change
    let q_on = cfg.q_correction && cfg.noise_mode == FdrMode::Quantum;
    let mut q_state: FluctuationState;
    let mut q_sign;
    {
        let v2 = potential.derivative(x, 2)?;
        q_sign = v2 >= 0.0;
        let om = v2.abs().max(1e-12).sqrt();
        q_state = FluctuationState::minimum_uncertainty(bath.hbar, om);
    }
    let v3 = potential.derivative(0.0, 3)?;

    let mut q_t = 0.0_f64;
    for i in 0..n_steps {
        if i + 1 >= noise.len() {
            return Err(Error::Config("noise path shorter than horizon".into()));
        }
        let q_now = if q_on {
            let v2 = potential.derivative(x, 2)?;
            if (v2 >= 0.0) != q_sign {
                // crossing the inflection: restart the local dispersion clock
                q_sign = v2 >= 0.0;
                q_t = 0.0;
                let om = v2.abs().max(1e-12).sqrt();
                q_state = FluctuationState::minimum_uncertainty(bath.hbar, om);
            }
            let v2_local = potential.derivative(x, 2)?;
            -0.5 * v3 * evolve_moments(&q_state, v2_local, q_t).dx2
        } else {
            0.0
        };

        let f0 = noise[i];
        let f1 = noise[i + 1];
        let ax0 = v;
        let av0 = -potential.derivative(x, 1)? - y + f0 + q_now;
        let ay0 = -y / tau_c + g_over_tau * v;
        let xp = x + dt * ax0;
        let vp = v + dt * av0;
        let yp = y + dt * ay0;
        let av1 = -potential.derivative(xp, 1)? - yp + f1 + q_now;
        let ay1 = -yp / tau_c + g_over_tau * vp;
        x += 0.5 * dt * (ax0 + vp);
        v += 0.5 * dt * (av0 + av1);
        y += 0.5 * dt * (ay0 + ay1);
        q_t += dt;

        if !x.is_finite() || !v.is_finite() {
            return Err(Error::IntegrationDiverged {
                step: i,
                t: i as f64 * dt,
            });
        }
        if x >= absorb {
            return Ok(Outcome::Escaped((i + 1) as f64 * dt));
        }
    }
    Ok(Outcome::Censored)
}

/// Tabulated inverse-CDF sampler for the stationary well position.
struct WellSampler {
    xs: Vec<f64>,
    cdf: Vec<f64>,
    v_sigma: f64,
    v_mean: f64,
}

impl WellSampler {
    fn build(potential: &CubicPotential, bath: &BathSpec, mode: FdrMode) -> Result<Self> {
        // effective temperatures reproducing the stationary variances of
        // the harmonic well: T_x = omega0^2 sxx(inf), velocity variance D0
        let (t_x, d0) = match mode {
            FdrMode::Classical => (bath.kbt(), bath.kbt()),
            FdrMode::Quantum => {
                let (sxx, svv) = stationary_variances(bath, potential.omega0_sq(), mode)?;
                (potential.omega0_sq() * sxx, svv)
            }
        };
        let sigma0 = (t_x / potential.omega0_sq()).sqrt();
        let x_lo = potential.x0() - 8.0 * sigma0;
        let x_hi = potential.xb();
        let n = 4000;
        let mut xs = Vec::with_capacity(n + 1);
        let mut cdf = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        let mut prev = 0.0;
        for i in 0..=n {
            let x = x_lo + (x_hi - x_lo) * i as f64 / n as f64;
            let w = (-(potential.derivative(x, 0)?) / t_x).exp();
            if i > 0 {
                acc += 0.5 * (w + prev) * (x_hi - x_lo) / n as f64;
            }
            prev = w;
            xs.push(x);
            cdf.push(acc);
        }
        let total = *cdf.last().unwrap();
        for c in cdf.iter_mut() {
            *c /= total;
        }
        Ok(WellSampler {
            xs,
            cdf,
            v_sigma: d0.sqrt(),
            v_mean: 0.0,
        })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        let u: f64 = rng.gen();
        let idx = match self
            .cdf
            .binary_search_by(|c| c.partial_cmp(&u).unwrap())
        {
            Ok(i) => i,
            Err(i) => i.min(self.cdf.len() - 1),
        };
        let x = if idx == 0 {
            self.xs[0]
        } else {
            let (c0, c1) = (self.cdf[idx - 1], self.cdf[idx]);
            let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
            self.xs[idx - 1] + frac * (self.xs[idx] - self.xs[idx - 1])
        };
        let v = self.v_mean + self.v_sigma * gauss(rng);
        (x, v)
    }
}

/// First-passage rate over an ensemble drawn from the stationary well
/// distribution. Censored trajectories enter through the exponential
/// maximum-likelihood estimate k = n_esc / (sum t_esc + n_cens t_max).
pub fn estimate_rate(
    potential: &CubicPotential,
    bath: &BathSpec,
    cfg: &SimConfig,
) -> Result<(FptEstimate, Vec<TrajectoryOutcome>)> {
    cfg.validate(bath, potential)?;
    let plan = NoisePlan::new(bath, cfg);
    let sampler = WellSampler::build(potential, bath, cfg.noise_mode)?;

    let outcomes: Vec<TrajectoryOutcome> = (0..cfg.n_traj)
        .into_par_iter()
        .map(|i| {
            let noise = plan.synthesize(cfg.seed, i as u64);
            // initial conditions from a dedicated substream so the noise
            // stream layout stays independent of them
            let mut ic_rng = ChaCha12Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
            ic_rng.set_stream(i as u64 + 1);
            let (x0, v0) = sampler.sample(&mut ic_rng);
            let fpt = match integrate_trajectory(potential, bath, cfg, &noise, x0, v0) {
                Ok(Outcome::Escaped(t)) => Some(t),
                Ok(Outcome::Censored) => None,
                Err(_) => None,
            };
            TrajectoryOutcome { index: i, fpt }
        })
        .collect();

    let n_escaped = outcomes.iter().filter(|o| o.fpt.is_some()).count();
    let censored = cfg.n_traj - n_escaped;
    if n_escaped == 0 {
        return Err(Error::EstimateUnavailable(
            "no trajectory escaped; increase t_max or temperature".into(),
        ));
    }
    // order-independent accumulation in index order
    let mut total_time = 0.0;
    for o in &outcomes {
        total_time += o.fpt.unwrap_or(cfg.t_max);
    }
    let k_sim = n_escaped as f64 / total_time;
    let stderr = k_sim / (n_escaped as f64).sqrt();
    Ok((
        FptEstimate {
            k_sim,
            stderr,
            n_escaped,
            censored,
        },
        outcomes,
    ))
}

/// Convenience wrapper returning only the estimate.
pub fn estimate_rate_summary(
    potential: &CubicPotential,
    bath: &BathSpec,
    cfg: &SimConfig,
) -> Result<FptEstimate> {
    estimate_rate(potential, bath, cfg).map(|(e, _)| e)
}

/// Reference theoretical rate for the same (bath, potential) used when
/// validating the estimator.
pub fn reference_rate(bath: &BathSpec, potential: &CubicPotential, mode: FdrMode) -> Result<f64> {
    let formula = match mode {
        FdrMode::Classical => crate::rate::RateFormula::Classical,
        FdrMode::Quantum => crate::rate::RateFormula::Simplified,
    };
    crate::rate::kramers_rate(
        bath,
        potential,
        &crate::dispersion::DispersionInit::MinimumUncertainty,
        mode,
        formula,
    )
    .map(|r| r.k)
}

/// Exactness of the Markovian embedding: integrates one deterministic
/// trajectory and compares y(t) against direct quadrature of the memory
/// integral. Returns the max deviation.
pub fn embedding_deviation(potential: &CubicPotential, bath: &BathSpec, t_end: f64) -> Result<f64> {
    let dt = 2e-4;
    let n = (t_end / dt) as usize;
    let tau_c = bath.tau_c;
    let g_over_tau = bath.gamma / tau_c;
    let (mut x, mut v, mut y) = (0.3, 0.0, 0.0);
    let mut vs = vec![v];
    let mut max_dev = 0.0_f64;
    for i in 0..n {
        let ax0 = v;
        let av0 = -potential.derivative(x, 1)? - y;
        let ay0 = -y / tau_c + g_over_tau * v;
        let xp = x + dt * ax0;
        let vp = v + dt * av0;
        let yp = y + dt * ay0;
        let av1 = -potential.derivative(xp, 1)? - yp;
        let ay1 = -yp / tau_c + g_over_tau * vp;
        x += 0.5 * dt * (ax0 + vp);
        v += 0.5 * dt * (av0 + av1);
        y += 0.5 * dt * (ay0 + ay1);
        vs.push(v);
        // direct memory integral int_0^t (Gamma/tau_c) e^{-(t-t')/tau_c} v dt'
        if i % 200 == 199 {
            let t_now = (i + 1) as f64 * dt;
            let mut direct = 0.0;
            for (j, vj) in vs.iter().enumerate() {
                let tj = j as f64 * dt;
                let w = if j == 0 || j == vs.len() - 1 { 0.5 } else { 1.0 };
                direct += w * g_over_tau * (-(t_now - tj) / tau_c).exp() * vj * dt;
            }
            max_dev = max_dev.max((direct - y).abs());
        }
    }
    Ok(max_dev)
}
