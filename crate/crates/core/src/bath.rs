//! Lorentzian heat bath: spectral density, exponential memory kernel,
//! Laplace transform, and the quantum/classical noise autocorrelation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::quad;
use crate::Result;

/// Which fluctuation-dissipation relation ties the noise to the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FdrMode {
    /// hbar omega coth(hbar omega / 2 kB T) weighting; T = 0 is allowed.
    Quantum,
    /// c(tau) = kB T beta(tau).
    Classical,
}

fn default_hbar() -> f64 {
    1.0
}
fn default_kb() -> f64 {
    1.0
}

/// Bath and thermal parameters. `omega_max` truncates every frequency
/// integral and the noise synthesis grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BathSpec {
    /// Damping strength Gamma (1/time).
    pub gamma: f64,
    /// Noise correlation time tau_c (time).
    pub tau_c: f64,
    /// Temperature T.
    pub temperature: f64,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default = "default_kb")]
    pub kb: f64,
    /// High-frequency cutoff; defaults to 1e3 / tau_c.
    #[serde(default)]
    pub omega_max: Option<f64>,
}

impl BathSpec {
    pub fn new(gamma: f64, tau_c: f64, temperature: f64) -> Self {
        BathSpec {
            gamma,
            tau_c,
            temperature,
            hbar: 1.0,
            kb: 1.0,
            omega_max: None,
        }
    }

    pub fn with_temperature(&self, temperature: f64) -> Self {
        let mut b = self.clone();
        b.temperature = temperature;
        b
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        let mut b = self.clone();
        b.gamma = gamma;
        b
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max.unwrap_or(1.0e3 / self.tau_c)
    }

    /// kB T in energy units.
    pub fn kbt(&self) -> f64 {
        self.kb * self.temperature
    }

    /// Validates positivity constraints. Returns warnings for soft limits
    /// (a cutoff that sits too close to the Lorentzian knee).
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.gamma > 0.0) {
            return Err(Error::Domain("gamma must be > 0".into()));
        }
        if !(self.tau_c > 0.0) {
            return Err(Error::Domain("tau_c must be > 0".into()));
        }
        if self.temperature < 0.0 {
            return Err(Error::Domain("temperature must be >= 0".into()));
        }
        if !(self.hbar > 0.0) || !(self.kb > 0.0) {
            return Err(Error::Domain("hbar and kb must be > 0".into()));
        }
        if !(self.omega_max() > 0.0) {
            return Err(Error::Domain("omega_max must be > 0".into()));
        }
        let mut warnings = Vec::new();
        if self.omega_max() * self.tau_c < 100.0 {
            warnings.push(format!(
                "omega_max * tau_c = {:.3} < 100: cutoff is close to the Lorentzian knee",
                self.omega_max() * self.tau_c
            ));
        }
        Ok(warnings)
    }

    /// kappa(omega) rho(omega) = (2/pi) Gamma / (1 + omega^2 tau_c^2).
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        if omega < 0.0 {
            return Err(Error::Domain(format!("negative frequency {omega}")));
        }
        let x = omega * self.tau_c;
        Ok(2.0 / std::f64::consts::PI * self.gamma / (1.0 + x * x))
    }

    /// beta(t) = (Gamma/tau_c) exp(-|t|/tau_c).
    pub fn memory_kernel(&self, t: f64) -> f64 {
        self.gamma / self.tau_c * (-t.abs() / self.tau_c).exp()
    }

    /// Laplace transform beta~(s) = Gamma / (1 + s tau_c); pole at s = -1/tau_c.
    pub fn kernel_laplace(&self, s: Complex64) -> Result<Complex64> {
        let den = Complex64::new(1.0, 0.0) + s * self.tau_c;
        if den.norm() < 1e-14 {
            return Err(Error::Domain(format!(
                "kernel_laplace evaluated at its pole s = -1/tau_c = {:.6}",
                -1.0 / self.tau_c
            )));
        }
        Ok(Complex64::new(self.gamma, 0.0) / den)
    }

    /// omega * coth(hbar omega / 2 kB T), with the omega -> 0 and T -> 0
    /// limits taken analytically (2 kB T / hbar and |omega| respectively).
    pub fn omega_coth(&self, omega: f64) -> f64 {
        let kbt = self.kbt();
        if kbt == 0.0 {
            return omega.abs();
        }
        let x = self.hbar * omega / (2.0 * kbt);
        if x.abs() < 1e-8 {
            // omega*coth -> 2 kB T / hbar + hbar omega^2/(6 kB T)
            2.0 * kbt / self.hbar + self.hbar * omega * omega / (6.0 * kbt)
        } else {
            omega / x.tanh()
        }
    }

    /// Cosine-transform weight of the noise correlation: c(tau) =
    /// int_0^omega_max S(omega) cos(omega tau) d omega.
    pub fn spectral_weight(&self, omega: f64, mode: FdrMode) -> f64 {
        let x = omega * self.tau_c;
        let lorentz = 1.0 / (1.0 + x * x);
        match mode {
            FdrMode::Quantum => {
                self.gamma / std::f64::consts::PI * self.hbar * self.omega_coth(omega) * lorentz
            }
            FdrMode::Classical => {
                2.0 * self.kbt() * self.gamma / std::f64::consts::PI * lorentz
            }
        }
    }

    /// Noise autocorrelation c(tau). Quantum mode integrates the
    /// coth-weighted Lorentzian up to `omega_max`; classical mode is the
    /// closed form kB T beta(tau). Even in tau by construction.
    pub fn noise_correlation(&self, tau: f64, mode: FdrMode) -> Result<f64> {
        if self.temperature < 0.0 {
            return Err(Error::Domain("temperature must be >= 0".into()));
        }
        let tau = tau.abs();
        match mode {
            FdrMode::Classical => Ok(self.kbt() * self.memory_kernel(tau)),
            FdrMode::Quantum => {
                let wmax = self.omega_max();
                // oscillation-aware seed panels: period pi/tau in omega,
                // knee at 1/tau_c
                let mut breaks = vec![1.0 / self.tau_c, 10.0 / self.tau_c];
                if tau > 0.0 {
                    let period = std::f64::consts::PI / tau;
                    let mut w = period;
                    while w < wmax && breaks.len() < 4000 {
                        breaks.push(w);
                        w += period;
                    }
                }
                quad::adaptive(
                    &|w: f64| self.spectral_weight(w, FdrMode::Quantum) * (w * tau).cos(),
                    0.0,
                    wmax,
                    &breaks,
                    1e-9,
                    1e-7,
                    "noise_correlation",
                )
            }
        }
    }

    /// Cutoff-sensitivity estimate for the quantum c(tau). The tail
    /// integrand falls off like hbar Gamma/(pi tau_c^2 omega), so for
    /// tau > 0 the cosine tail is bounded by the cosine-integral envelope
    /// ~ 2/(omega_max tau); at tau = 0 the tail is log-divergent and the
    /// per-octave increment is reported instead.
    pub fn correlation_cutoff_sensitivity(&self, tau: f64) -> f64 {
        let wmax = self.omega_max();
        let tail_scale = self.hbar * self.gamma / (std::f64::consts::PI * self.tau_c.powi(2));
        if tau.abs() * wmax > 1.0 {
            tail_scale * 2.0 / (tau.abs() * wmax)
        } else {
            tail_scale * std::f64::consts::LN_2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bath() -> BathSpec {
        BathSpec::new(1.3, 0.3, 10.0)
    }

    #[test]
    fn spectral_density_peak_and_knee() {
        let b = bath();
        assert_relative_eq!(
            b.spectral_density(0.0).unwrap(),
            2.0 * 1.3 / std::f64::consts::PI,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            b.spectral_density(1.0 / 0.3).unwrap(),
            1.3 / std::f64::consts::PI,
            max_relative = 1e-14
        );
        assert!(b.spectral_density(-1.0).is_err());
    }

    #[test]
    fn spectral_density_integrates_to_kernel_at_zero() {
        let b = bath();
        let total = quad::adaptive(
            &|w: f64| b.spectral_density(w).unwrap(),
            0.0,
            b.omega_max(),
            &quad::log_edges(1.0 / b.tau_c, b.omega_max()),
            1e-10,
            1e-10,
            "density",
        )
        .unwrap();
        // arctan tail: int_0^W = (Gamma/tau_c)(2/pi) atan(W tau_c)
        assert_relative_eq!(total, b.memory_kernel(0.0), max_relative = 1e-3);
    }

    #[test]
    fn kernel_values() {
        let b = bath();
        assert_relative_eq!(b.memory_kernel(0.0), 1.3 / 0.3, max_relative = 1e-15);
        assert_relative_eq!(
            b.memory_kernel(0.3),
            (1.3 / 0.3) * (-1.0_f64).exp(),
            max_relative = 1e-15
        );
        // evenness
        assert_eq!(b.memory_kernel(0.7), b.memory_kernel(-0.7));
        // int_0^inf beta = Gamma
        let total = quad::adaptive(
            &|t: f64| b.memory_kernel(t),
            0.0,
            40.0 * b.tau_c,
            &[],
            1e-12,
            1e-12,
            "kernel",
        )
        .unwrap();
        assert_relative_eq!(total, b.gamma, max_relative = 1e-10);
    }

    #[test]
    fn kernel_laplace_values() {
        let b = bath();
        let g = |s: f64| b.kernel_laplace(Complex64::new(s, 0.0)).unwrap().re;
        assert_relative_eq!(g(0.0), 1.3, max_relative = 1e-15);
        assert_relative_eq!(g(1.0 / 0.3), 0.65, max_relative = 1e-15);
        assert!(g(1e9) < 1e-8);
        assert!(b.kernel_laplace(Complex64::new(-1.0 / 0.3, 0.0)).is_err());
    }

    #[test]
    fn classical_correlation_closed_form() {
        let b = bath();
        let c0 = b.noise_correlation(0.0, FdrMode::Classical).unwrap();
        assert_relative_eq!(c0, 10.0 * 1.3 / 0.3, max_relative = 1e-15);
    }

    #[test]
    fn quantum_matches_classical_at_high_temperature() {
        let b = BathSpec::new(1.3, 0.3, 100.0);
        for tau in [0.1, 0.5, 1.0] {
            let cq = b.noise_correlation(tau, FdrMode::Quantum).unwrap();
            let cc = b.noise_correlation(tau, FdrMode::Classical).unwrap();
            assert!(
                (cq / cc - 1.0).abs() < 0.01,
                "tau={tau}: cq={cq} cc={cc}"
            );
        }
    }

    #[test]
    fn quantum_t0_finite_and_cutoff_stable() {
        let mut b = BathSpec::new(1.3, 0.3, 0.0);
        let c1 = b.noise_correlation(0.3, FdrMode::Quantum).unwrap();
        assert!(c1.is_finite());
        b.omega_max = Some(2.0e3 / 0.3);
        let c2 = b.noise_correlation(0.3, FdrMode::Quantum).unwrap();
        let band = b.correlation_cutoff_sensitivity(0.3);
        assert!(
            (c1 - c2).abs() <= band.abs().max(1e-6),
            "c1={c1} c2={c2} band={band}"
        );
    }

    #[test]
    fn correlation_even_in_tau() {
        let b = bath();
        let cp = b.noise_correlation(0.4, FdrMode::Quantum).unwrap();
        let cm = b.noise_correlation(-0.4, FdrMode::Quantum).unwrap();
        assert_eq!(cp, cm);
    }

    #[test]
    fn quantum_nonincreasing_near_zero_at_t0() {
        let b = BathSpec::new(1.3, 0.3, 0.0);
        let taus: Vec<f64> = (0..=6).map(|i| 0.05 * i as f64).collect();
        let cs: Vec<f64> = taus
            .iter()
            .map(|&t| b.noise_correlation(t, FdrMode::Quantum).unwrap())
            .collect();
        for w in cs.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "c not non-increasing: {cs:?}");
        }
    }

    #[test]
    fn serde_defaults() {
        let b: BathSpec =
            serde_json::from_str(r#"{"gamma":1.3,"tau_c":0.3,"temperature":10.0}"#).unwrap();
        assert_eq!(b.hbar, 1.0);
        assert_eq!(b.kb, 1.0);
        assert_relative_eq!(b.omega_max(), 1.0e3 / 0.3, max_relative = 1e-15);
    }
}
