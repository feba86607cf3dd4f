//! Relaxation functions M(t), m(t) = dM/dt and chi(t) for well and barrier,
//! by exact partial-fraction inversion of the cubic-denominator Laplace
//! transforms M~(s) = (s + 1/tau_c) / (s^3 + a s^2 + b s + c).

use num_complex::Complex64;
use serde::Serialize;

use crate::bath::BathSpec;
use crate::error::Error;
use crate::expsum::ExpSum;
use crate::Result;

/// Sign of the curvature term in the resolvent denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Well,
    Barrier,
}

/// Roots of s^3 + a s^2 + b s + c, via the trigonometric/Cardano form
/// plus one Newton polish per root.
pub fn cubic_roots(a: f64, b: f64, c: f64) -> [Complex64; 3] {
    // depressed cubic: s = z - a/3, z^3 + p z + q = 0
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = Complex64::new(-a / 3.0, 0.0);
    let disc = Complex64::new(q * q / 4.0 + p * p * p / 27.0, 0.0);
    let sq = disc.sqrt();
    let half_q = Complex64::new(-q / 2.0, 0.0);
    // pick the larger-magnitude cube-root argument for stability
    let u3 = if (half_q + sq).norm() >= (half_q - sq).norm() {
        half_q + sq
    } else {
        half_q - sq
    };
    let u = u3.powf(1.0 / 3.0);
    let omega = Complex64::new(-0.5, 0.5 * 3.0_f64.sqrt());
    let mut roots = [Complex64::new(0.0, 0.0); 3];
    for (k, r) in roots.iter_mut().enumerate() {
        let uk = u * omega.powu(k as u32);
        // z = uk - p/(3 uk)
        let z = if uk.norm() > 1e-300 {
            uk - Complex64::new(p / 3.0, 0.0) / uk
        } else {
            Complex64::new(0.0, 0.0)
        };
        *r = z + shift;
    }
    // one Newton step per root
    let poly = |s: Complex64| ((s + a) * s + b) * s + c;
    let dpoly = |s: Complex64| (3.0 * s + 2.0 * a) * s + b;
    for r in roots.iter_mut() {
        let d = dpoly(*r);
        if d.norm() > 1e-14 {
            *r -= poly(*r) / d;
        }
    }
    // canonicalize: real roots get exactly zero imaginary part, conjugate
    // pairs are symmetrized
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    for r in roots.iter_mut() {
        if r.im.abs() < 1e-9 * scale {
            r.im = 0.0;
        }
    }
    roots
}

/// Coefficients (a, b, c) of the resolvent denominator for the given
/// region: multiplying s^2 + s beta~(s) +/- omega^2 by (1 + s tau_c)/tau_c.
pub fn denominator_coeffs(bath: &BathSpec, omega_sq: f64, region: Region) -> (f64, f64, f64) {
    let a = 1.0 / bath.tau_c;
    match region {
        Region::Well => (a, omega_sq + bath.gamma / bath.tau_c, omega_sq / bath.tau_c),
        Region::Barrier => (
            a,
            bath.gamma / bath.tau_c - omega_sq,
            -omega_sq / bath.tau_c,
        ),
    }
}

/// Relaxation functions of the linearized generalized Langevin equation at
/// curvature +/- omega^2, as exact exponential sums over the resolvent poles.
#[derive(Debug, Clone)]
pub struct Relaxation {
    pub region: Region,
    /// |V''| at the expansion point.
    pub omega_sq: f64,
    pub roots: [Complex64; 3],
    /// Partial-fraction amplitudes of M~(s).
    pub coeffs: [Complex64; 3],
    tau_c: f64,
    gamma: f64,
}

impl Relaxation {
    /// Builds M(t) = sum_i c_i exp(lambda_i t) from the poles of
    /// (s + 1/tau_c) / D(s). Nearly repeated roots are refused.
    pub fn build(bath: &BathSpec, omega_sq: f64, region: Region) -> Result<Self> {
        if !(omega_sq > 0.0) {
            return Err(Error::Domain("relaxation needs omega_sq > 0".into()));
        }
        let (a, b, c) = denominator_coeffs(bath, omega_sq, region);
        let roots = cubic_roots(a, b, c);
        let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
        let mut min_sep = f64::INFINITY;
        for i in 0..3 {
            for j in (i + 1)..3 {
                min_sep = min_sep.min((roots[i] - roots[j]).norm());
            }
        }
        if min_sep < 1e-8 * scale {
            return Err(Error::DegenerateRoots {
                separation: min_sep,
            });
        }
        let mut coeffs = [Complex64::new(0.0, 0.0); 3];
        for i in 0..3 {
            let r = roots[i];
            let dp = (3.0 * r + 2.0 * a) * r + b;
            coeffs[i] = (r + 1.0 / bath.tau_c) / dp;
        }
        Ok(Relaxation {
            region,
            omega_sq,
            roots,
            coeffs,
            tau_c: bath.tau_c,
            gamma: bath.gamma,
        })
    }

    /// M(t) as an exponential sum; M(0) = 0, Mdot(0) = 1.
    pub fn m_big(&self) -> ExpSum {
        let mut s = ExpSum::new();
        for i in 0..3 {
            s.push(self.coeffs[i], self.roots[i], 0);
        }
        s.compress();
        s
    }

    /// m(t) = dM/dt.
    pub fn m_small(&self) -> ExpSum {
        let mut s = ExpSum::new();
        for i in 0..3 {
            s.push(self.coeffs[i] * self.roots[i], self.roots[i], 0);
        }
        s.compress();
        s
    }

    /// chi(t) = 1 -/+ omega^2 int_0^t M. The constant parts cancel exactly
    /// through the partial-fraction identity sum_i c_i / lambda_i = -M~(0),
    /// so the result is a pure exponential sum.
    pub fn chi(&self) -> ExpSum {
        let sign = match self.region {
            Region::Well => -1.0,
            Region::Barrier => 1.0,
        };
        let mut s = ExpSum::constant(Complex64::new(1.0, 0.0));
        let integral = self.m_big().antiderivative();
        s = s.add(&integral.scale(Complex64::new(sign * self.omega_sq, 0.0)));
        s.compress();
        s
    }

    /// chi evaluated at t (Region picks the sign).
    pub fn chi_at(&self, t: f64) -> f64 {
        self.chi().value_re(t)
    }

    /// Signed curvature V'' at the expansion point: +omega^2 in the well,
    /// -omega^2 at the barrier.
    pub fn curvature(&self) -> f64 {
        match self.region {
            Region::Well => self.omega_sq,
            Region::Barrier => -self.omega_sq,
        }
    }

    /// The reactive (positive real) rate at the barrier.
    pub fn lambda_r(&self) -> Result<f64> {
        if self.region != Region::Barrier {
            return Err(Error::Domain("lambda_r is a barrier quantity".into()));
        }
        let pos: Vec<&Complex64> = self.roots.iter().filter(|r| r.re > 0.0).collect();
        if pos.len() != 1 {
            return Err(Error::Structural(format!(
                "expected exactly one unstable resolvent root, found {}",
                pos.len()
            )));
        }
        if pos[0].im.abs() > 1e-9 * pos[0].norm().max(1.0) {
            return Err(Error::Structural(
                "unstable resolvent root is not real".into(),
            ));
        }
        Ok(pos[0].re)
    }

    /// Index of the unstable root, if any.
    pub fn unstable_index(&self) -> Option<usize> {
        let idx = self
            .roots
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.re.partial_cmp(&b.1.re).unwrap())
            .map(|(i, _)| i)?;
        (self.roots[idx].re > 0.0).then_some(idx)
    }

    /// Max |x(t) - M(t)| over a grid, where x solves the Markovian
    /// embedding of the linearized GLE with x(0)=0, v(0)=1, y(0)=0.
    /// For the barrier the deviation is measured relative to |M|.
    pub fn validate_against_ode(&self, t_end: f64, n_steps: usize) -> f64 {
        let v2 = self.curvature();
        let gamma_over_tau = self.gamma / self.tau_c;
        let tau_c = self.tau_c;
        let msum = self.m_big();
        let f = |state: [f64; 3]| -> [f64; 3] {
            let [x, v, y] = state;
            [v, -v2 * x - y, -y / tau_c + gamma_over_tau * v]
        };
        let dt = t_end / n_steps as f64;
        let mut s = [0.0, 1.0, 0.0];
        let mut t = 0.0;
        let mut max_dev: f64 = 0.0;
        for _ in 0..n_steps {
            // classic RK4
            let k1 = f(s);
            let s2 = [
                s[0] + 0.5 * dt * k1[0],
                s[1] + 0.5 * dt * k1[1],
                s[2] + 0.5 * dt * k1[2],
            ];
            let k2 = f(s2);
            let s3 = [
                s[0] + 0.5 * dt * k2[0],
                s[1] + 0.5 * dt * k2[1],
                s[2] + 0.5 * dt * k2[2],
            ];
            let k3 = f(s3);
            let s4 = [s[0] + dt * k3[0], s[1] + dt * k3[1], s[2] + dt * k3[2]];
            let k4 = f(s4);
            for i in 0..3 {
                s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            t += dt;
            let m_val = msum.value_re(t);
            let dev = (s[0] - m_val).abs();
            max_dev = max_dev.max(match self.region {
                Region::Well => dev,
                Region::Barrier => dev / m_val.abs().max(1.0),
            });
        }
        max_dev
    }
}

/// Which trigonometric factor a moment integral carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// Exact int_0^t f(t1) trig(omega t1) dt1 via the complex-exponential
/// split; rate coincidences (lambda = -/+ i omega) fall into the secular
/// branch of the antiderivative automatically.
pub fn trig_moment(f: &ExpSum, omega: f64, phase: Trig, t: f64) -> f64 {
    let half = Complex64::new(0.5, 0.0);
    let mih = Complex64::new(0.0, -0.5);
    let iw = Complex64::new(0.0, omega);
    let mut shifted = ExpSum::new();
    for term in f.terms() {
        match phase {
            Trig::Cos => {
                shifted.push(term.coeff * half, term.rate + iw, term.power);
                shifted.push(term.coeff * half, term.rate - iw, term.power);
            }
            Trig::Sin => {
                // sin = (e^{iwt} - e^{-iwt}) / (2i)
                shifted.push(term.coeff * mih, term.rate + iw, term.power);
                shifted.push(term.coeff * (-mih), term.rate - iw, term.power);
            }
        }
    }
    shifted.compress();
    shifted.antiderivative().value_re(t)
}

/// Positive root of the Grote-Hynes condition
/// lambda^2 + lambda Gamma/(1 + lambda tau_c) = omega_b^2, by bisection.
/// Independent of the cubic-root path; used for cross-validation.
pub fn grote_hynes_root(bath: &BathSpec, omegab_sq: f64) -> f64 {
    let f = |l: f64| l * l + l * bath.gamma / (1.0 + l * bath.tau_c) - omegab_sq;
    let mut lo = 0.0;
    let mut hi = omegab_sq.sqrt(); // f(omega_b) > 0 always
    debug_assert!(f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::BathSpec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn paper_bath() -> BathSpec {
        BathSpec::new(1.3, 0.3, 10.0)
    }
    const OM_SQ: f64 = 2.46621207433047;

    #[test]
    fn known_factorization() {
        let mut roots = cubic_roots(6.0, 11.0, 6.0)
            .map(|r| r.re)
            .to_vec();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(roots[0], -3.0, max_relative = 1e-12);
        assert_relative_eq!(roots[1], -2.0, max_relative = 1e-12);
        assert_relative_eq!(roots[2], -1.0, max_relative = 1e-12);
    }

    #[test]
    fn well_coefficients_and_structure() {
        let bath = paper_bath();
        let (a, b, c) = denominator_coeffs(&bath, OM_SQ, Region::Well);
        assert_relative_eq!(a, 10.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(b, 6.79954540766380, max_relative = 1e-8);
        assert_relative_eq!(c, 8.22070691443490, max_relative = 1e-8);
        let roots = cubic_roots(a, b, c);
        let n_real = roots.iter().filter(|r| r.im == 0.0).count();
        assert_eq!(n_real, 1, "one real root plus a conjugate pair");
        let sum: Complex64 = roots.iter().sum();
        assert_relative_eq!(sum.re, -10.0 / 3.0, max_relative = 1e-10);
        assert!(sum.im.abs() < 1e-10);
    }

    #[test]
    fn barrier_reactive_root_matches_grote_hynes() {
        let bath = paper_bath();
        let (_a, b, c) = denominator_coeffs(&bath, OM_SQ, Region::Barrier);
        assert_relative_eq!(b, 1.86712125900287, max_relative = 1e-8);
        assert_relative_eq!(c, -8.22070691443490, max_relative = 1e-8);
        let relax = Relaxation::build(&bath, OM_SQ, Region::Barrier).unwrap();
        let lam_r = relax.lambda_r().unwrap();
        assert_relative_eq!(lam_r, 1.1606316668657353, max_relative = 1e-8);
        let gh = grote_hynes_root(&bath, OM_SQ);
        assert_relative_eq!(lam_r, gh, max_relative = 1e-10);
        // Grote-Hynes consistency: the resolvent denominator vanishes there
        let resid = lam_r * lam_r + lam_r * bath.gamma / (1.0 + lam_r * bath.tau_c) - OM_SQ;
        assert!(resid.abs() < 1e-10 * OM_SQ);
    }

    #[test]
    fn initial_value_theorem() {
        let bath = paper_bath();
        for region in [Region::Well, Region::Barrier] {
            let relax = Relaxation::build(&bath, OM_SQ, region).unwrap();
            let m = relax.m_big();
            assert!(m.value(0.0).norm() < 1e-12, "M(0) = 0");
            assert_relative_eq!(
                relax.m_small().value_re(0.0),
                1.0,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn chi_limits() {
        let bath = paper_bath();
        let relax = Relaxation::build(&bath, OM_SQ, Region::Well).unwrap();
        assert_relative_eq!(relax.chi_at(0.0), 1.0, max_relative = 1e-12);
        assert!(relax.chi_at(40.0).abs() < 1e-6, "chi(large) -> 0 in the well");
        // int_0^inf M = 1/omega0^2 equivalently
        let integral = relax.m_big().antiderivative().value_re(60.0);
        assert_relative_eq!(integral, 1.0 / OM_SQ, max_relative = 1e-8);

        let relax_b = Relaxation::build(&bath, OM_SQ, Region::Barrier).unwrap();
        assert_relative_eq!(relax_b.chi_at(0.0), 1.0, max_relative = 1e-12);
        // barrier chi grows like exp(lambda_r t)
        let lam_r = relax_b.lambda_r().unwrap();
        let g1 = relax_b.chi_at(8.0);
        let g2 = relax_b.chi_at(9.0);
        assert_relative_eq!((g2 / g1).ln(), lam_r, max_relative = 1e-3);
    }

    #[test]
    fn ode_oracle_well() {
        let bath = paper_bath();
        let relax = Relaxation::build(&bath, OM_SQ, Region::Well).unwrap();
        let dev = relax.validate_against_ode(20.0, 40_000);
        assert!(dev < 1e-8, "well M(t) vs ODE deviation {dev}");
    }

    #[test]
    fn ode_oracle_barrier() {
        let bath = paper_bath();
        let relax = Relaxation::build(&bath, OM_SQ, Region::Barrier).unwrap();
        let dev = relax.validate_against_ode(8.0, 40_000);
        assert!(dev < 1e-6, "barrier M(t) vs ODE relative deviation {dev}");
    }

    #[test]
    fn undamped_limit_is_sine() {
        let bath = BathSpec::new(1e-12, 0.3, 1.0);
        let relax = Relaxation::build(&bath, OM_SQ, Region::Well).unwrap();
        let om = OM_SQ.sqrt();
        for t in [0.5, 1.5, 4.0] {
            assert_relative_eq!(
                relax.m_big().value_re(t),
                (om * t).sin() / om,
                epsilon = 1e-6
            );
        }
    }

    #[test]
    fn trig_moment_against_quadrature() {
        let bath = paper_bath();
        let m = Relaxation::build(&bath, OM_SQ, Region::Well)
            .unwrap()
            .m_big();
        let cases = [(2.0, 5.0), (0.37, 1.3), (11.0, 2.0)];
        for (omega, t) in cases {
            let exact = trig_moment(&m, omega, Trig::Cos, t);
            let breaks: Vec<f64> = (1..(t * omega / 3.0) as usize)
                .map(|i| i as f64 * 3.0 / omega)
                .collect();
            let q = crate::quad::adaptive(
                &|x| m.value_re(x) * (omega * x).cos(),
                0.0,
                t,
                &breaks,
                1e-13,
                1e-13,
                "trig",
            )
            .unwrap();
            assert_relative_eq!(exact, q, epsilon = 1e-10);
            let exact_s = trig_moment(&m, omega, Trig::Sin, t);
            let qs = crate::quad::adaptive(
                &|x| m.value_re(x) * (omega * x).sin(),
                0.0,
                t,
                &breaks,
                1e-13,
                1e-13,
                "trig",
            )
            .unwrap();
            assert_relative_eq!(exact_s, qs, epsilon = 1e-10);
        }
    }

    #[test]
    fn trig_moment_zero_frequency_and_time() {
        let bath = paper_bath();
        let m = Relaxation::build(&bath, OM_SQ, Region::Well)
            .unwrap()
            .m_big();
        assert_relative_eq!(
            trig_moment(&m, 0.0, Trig::Cos, 5.0),
            m.antiderivative().value_re(5.0),
            max_relative = 1e-12
        );
        assert!(trig_moment(&m, 2.0, Trig::Cos, 0.0).abs() < 1e-15);
        assert!(trig_moment(&m, 2.0, Trig::Sin, 0.0).abs() < 1e-15);
    }

    #[test]
    fn m_small_matches_finite_differences() {
        let bath = paper_bath();
        let relax = Relaxation::build(&bath, OM_SQ, Region::Well).unwrap();
        let m_big = relax.m_big();
        let m_small = relax.m_small();
        let h = 1e-5;
        for t in [0.3, 1.0, 3.0, 7.0] {
            let fd = (m_big.value_re(t + h) - m_big.value_re(t - h)) / (2.0 * h);
            assert_relative_eq!(m_small.value_re(t), fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn degenerate_roots_refused() {
        // s^3 + 3 s^2 + 3 s + 1 = (s+1)^3 would be degenerate; build a bath
        // that produces a near-repeated pair instead: detected via direct call
        let roots = cubic_roots(3.0, 3.0, 1.0);
        let mut min_sep = f64::INFINITY;
        for i in 0..3 {
            for j in (i + 1)..3 {
                min_sep = min_sep.min((roots[i] - roots[j]).norm());
            }
        }
        assert!(min_sep < 1e-4, "triple root detected as nearly repeated");
    }

    proptest! {
        #[test]
        fn vieta_identities(a in -5.0_f64..5.0, b in -5.0_f64..5.0, c in -5.0_f64..5.0) {
            let roots = cubic_roots(a, b, c);
            let sum: Complex64 = roots.iter().sum();
            let pair = roots[0]*roots[1] + roots[0]*roots[2] + roots[1]*roots[2];
            let prod = roots[0]*roots[1]*roots[2];
            let scale = roots.iter().map(|r| r.norm()).fold(1.0_f64, f64::max);
            prop_assert!((sum + a).norm() <= 1e-10 * scale.max(a.abs()));
            prop_assert!((pair - b).norm() <= 1e-9 * (scale*scale).max(b.abs()));
            prop_assert!((prod + c).norm() <= 1e-9 * (scale*scale*scale).max(c.abs()));
        }
    }
}
