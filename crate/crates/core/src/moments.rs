//! Variances of the quantum-mechanical mean position and velocity, by two
//! independent routes, plus the dispersion convolutions G(t), g(t).
//!
//! Spectral route: each variance is an omega integral of the bath weight
//! S(omega) against bilinear response moments
//!   J_M(omega, t) = int_0^t M(t1) e^{-i omega t1} dt1
//! (and J_m with m = dM/dt), evaluated in closed form from the
//! exponential-sum representation. Direct route: the double time integral
//! with the noise correlation c(t1 - t2), kept fully independent as an
//! oracle.

use num_complex::Complex64;
use serde::Serialize;

use crate::bath::{BathSpec, FdrMode};
use crate::expsum::ExpSum;
use crate::quad;
use crate::resolvent::Relaxation;
use crate::Result;

/// sigma^2_xx, sigma^2_vv, sigma^2_xv at time t.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VarianceSet {
    pub sxx: f64,
    pub svv: f64,
    pub sxv: f64,
    pub t: f64,
}

/// Which computational route produces the variances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Spectral,
    Direct,
}

/// Closed-form J(omega, t) = int_0^t f(t1) e^{-i omega t1} dt1 for an
/// exponential sum without polynomial powers.
fn response_moment(f: &ExpSum, omega: f64, t: f64) -> Complex64 {
    let iw = Complex64::new(0.0, omega);
    let mut acc = Complex64::new(0.0, 0.0);
    for term in f.terms() {
        debug_assert_eq!(term.power, 0, "response_moment expects pure exponentials");
        let z = term.rate - iw;
        if z.norm() < 1e-12 {
            acc += term.coeff * t;
        } else {
            acc += term.coeff * ((z * t).exp() - 1.0) / z;
        }
    }
    acc
}

/// Per-omega bilinear integrands for the five sigma quantities.
struct Bilinears {
    xx: f64,
    vv: f64,
    xv: f64,
    dvv: f64,
    dxv: f64,
}

fn bilinears(m_big: &ExpSum, m_small: &ExpSum, omega: f64, t: f64) -> Bilinears {
    let jm = response_moment(m_big, omega, t);
    let jv = response_moment(m_small, omega, t);
    let eiwt = (Complex64::new(0.0, -omega * t)).exp();
    let jm_dot = m_big.value(t) * eiwt;
    let jv_dot = m_small.value(t) * eiwt;
    Bilinears {
        xx: (jm * jm.conj()).re,
        vv: (jv * jv.conj()).re,
        xv: (jm * jv.conj()).re,
        dvv: 2.0 * (jv_dot * jv.conj()).re,
        dxv: (jm_dot * jv.conj()).re + (jm * jv_dot.conj()).re,
    }
}

/// Panel edges for the omega integration of oscillatory bilinears: spacing
/// follows the oscillation period pi / t, refined near the spectral knee.
fn spectral_edges(bath: &BathSpec, t: f64, omega_scale: f64) -> Vec<f64> {
    let wmax = bath.omega_max();
    let osc = if t > 0.0 {
        std::f64::consts::PI / t
    } else {
        f64::INFINITY
    };
    let base = (1.0 / bath.tau_c).min(omega_scale).max(1e-3);
    let du = osc.min(base);
    if wmax / du > 400_000.0 {
        return quad::uniform_edges(wmax / 400_000.0, wmax);
    }
    quad::uniform_edges(du, wmax)
}

/// Spectral-route variances plus (d svv/dt, d sxv/dt) at time t.
pub fn variances_spectral_full(
    bath: &BathSpec,
    relax: &Relaxation,
    t: f64,
    mode: FdrMode,
) -> Result<(VarianceSet, f64, f64)> {
    let m_big = relax.m_big();
    let m_small = relax.m_small();
    let edges = spectral_edges(bath, t, relax.omega_sq.sqrt());
    let mut sums = [0.0_f64; 5];
    let mut comps = [0.0_f64; 5];
    for w in edges.windows(2) {
        let vals = gk15_vec(
            &|omega: f64| {
                let s = bath.spectral_weight(omega, mode);
                let b = bilinears(&m_big, &m_small, omega, t);
                [s * b.xx, s * b.vv, s * b.xv, s * b.dvv, s * b.dxv]
            },
            w[0],
            w[1],
        );
        for i in 0..5 {
            let y = vals[i] - comps[i];
            let tt = sums[i] + y;
            comps[i] = (tt - sums[i]) - y;
            sums[i] = tt;
        }
    }
    Ok((
        VarianceSet {
            sxx: sums[0],
            svv: sums[1],
            sxv: sums[2],
            t,
        },
        sums[3],
        sums[4],
    ))
}

/// Spectral variances with the pure unstable-squared class removed
/// analytically per frequency: in |J|^2-type bilinears the growing parts
/// P = c_r e^{(lambda_r - i w) t}/(lambda_r - i w) are split off and their
/// squared contribution dropped. Combined with closure constants that
/// satisfy lambda_r^2 + gamma lambda_r - omega^2 = 0, the e^{2 lambda_r t}
/// divergence of the phi/psi combinations cancels exactly, so this routine
/// never subtracts large floats. Used by the quasi-stationary plateau
/// diagnostics at the barrier.
pub fn quasi_stationary_spectral(
    bath: &BathSpec,
    relax: &Relaxation,
    t: f64,
    mode: FdrMode,
) -> Result<(VarianceSet, f64, f64)> {
    let m_big = relax.m_big();
    let m_small = relax.m_small();
    let unstable = relax
        .unstable_index()
        .ok_or_else(|| crate::error::Error::Domain("no unstable mode".into()))?;
    let (c_r, lam_r) = (relax.coeffs[unstable], relax.roots[unstable]);
    let edges = spectral_edges(bath, t, relax.omega_sq.sqrt());
    let mut sums = [0.0_f64; 5];
    let mut comps = [0.0_f64; 5];
    for w in edges.windows(2) {
        let vals = gk15_vec(
            &|omega: f64| {
                let s = bath.spectral_weight(omega, mode);
                let iw = Complex64::new(0.0, omega);
                let zr = lam_r - iw;
                let pm = c_r * (zr * t).exp() / zr;
                let pv = pm * lam_r;
                let jm = response_moment(&m_big, omega, t);
                let jv = response_moment(&m_small, omega, t);
                let eiwt = (Complex64::new(0.0, -omega * t)).exp();
                let jm_dot = m_big.value(t) * eiwt;
                let jv_dot = m_small.value(t) * eiwt;
                let pm_dot = c_r * (lam_r * t).exp() * eiwt;
                let pv_dot = pm_dot * lam_r;
                [
                    s * ((jm * jm.conj()).re - (pm * pm.conj()).re),
                    s * ((jv * jv.conj()).re - (pv * pv.conj()).re),
                    s * ((jm * jv.conj()).re - (pm * pv.conj()).re),
                    s * (2.0 * (jv_dot * jv.conj()).re - 2.0 * (pv_dot * pv.conj()).re),
                    s * ((jm_dot * jv.conj()).re + (jm * jv_dot.conj()).re
                        - (pm_dot * pv.conj()).re
                        - (pm * pv_dot.conj()).re),
                ]
            },
            w[0],
            w[1],
        );
        for i in 0..5 {
            let y = vals[i] - comps[i];
            let tt = sums[i] + y;
            comps[i] = (tt - sums[i]) - y;
            sums[i] = tt;
        }
    }
    Ok((
        VarianceSet {
            sxx: sums[0],
            svv: sums[1],
            sxv: sums[2],
            t,
        },
        sums[3],
        sums[4],
    ))
}

/// Vector-valued GK15 panel (values only; the panel layout fixes accuracy).
fn gk15_vec<const N: usize, F: Fn(f64) -> [f64; N]>(f: &F, a: f64, b: f64) -> [f64; N] {
    const XGK: [f64; 8] = [
        0.991455371120813,
        0.949107912342759,
        0.864864423359769,
        0.741531185599394,
        0.586087235467691,
        0.405845151377397,
        0.207784955007898,
        0.0,
    ];
    const WGK: [f64; 8] = [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
    ];
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut acc = [0.0; N];
    for i in 0..N {
        acc[i] = fc[i] * WGK[7];
    }
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for i in 0..N {
            acc[i] += WGK[j] * (f1[i] + f2[i]);
        }
    }
    for v in acc.iter_mut() {
        *v *= half;
    }
    acc
}

/// Direct-route variances: double time quadrature of the defining
/// integrals with c(t1 - t2). Inner panels are aligned to the correlation
/// peak at t2 = t1 so the cusp-like feature never sits mid-panel.
pub fn variances_direct(
    bath: &BathSpec,
    relax: &Relaxation,
    t: f64,
    mode: FdrMode,
) -> Result<VarianceSet> {
    if t == 0.0 {
        return Ok(VarianceSet {
            sxx: 0.0,
            svv: 0.0,
            sxv: 0.0,
            t,
        });
    }
    let m_big = relax.m_big();
    let m_small = relax.m_small();
    let corr = Correlation::build(bath, t, mode)?;

    let scale = relax.omega_sq.sqrt().max(1.0 / bath.tau_c);
    let n_panels = ((t * scale * 3.0).ceil() as usize).clamp(24, 900);
    let edges: Vec<f64> = (0..=n_panels)
        .map(|i| t * i as f64 / n_panels as f64)
        .collect();
    let tau_c = bath.tau_c;
    // geometric micro-panels toward t2 = t1 resolve the integrable
    // log-singular peak of the quantum correlation
    let peak_edges = |t1: f64, lo: f64, hi: f64| -> Vec<f64> {
        let mut e: Vec<f64> = edges
            .iter()
            .copied()
            .filter(|&x| x > lo && x < hi)
            .collect();
        for d in [
            -2.0, -1.0, -0.25, -0.064, -0.016, -0.004, -0.001, 0.0, 0.001, 0.004, 0.016, 0.064,
            0.25, 1.0, 2.0,
        ] {
            let x = t1 + d * tau_c;
            if x > lo && x < hi {
                e.push(x);
            }
        }
        e.push(lo);
        e.push(hi);
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * t);
        e
    };

    // triangle integrals with factor 2 for sxx, svv
    let tri = |f: &ExpSum, g: &ExpSum| -> f64 {
        let outer = |t1: f64| {
            let inner = peak_edges(t1, 0.0, t1);
            let (v, _) = quad::composite(&|t2: f64| g.value_re(t2) * corr.eval(t1 - t2), &inner);
            f.value_re(t1) * v
        };
        let (v, _) = quad::composite(&outer, &edges);
        2.0 * v
    };
    // full square for sxv (equals (1/2) d sxx/dt)
    let square = |f: &ExpSum, g: &ExpSum| -> f64 {
        let outer = |t1: f64| {
            let inner = peak_edges(t1, 0.0, t);
            let (v, _) = quad::composite(&|t2: f64| g.value_re(t2) * corr.eval(t1 - t2), &inner);
            f.value_re(t1) * v
        };
        let (v, _) = quad::composite(&outer, &edges);
        v
    };
    Ok(VarianceSet {
        sxx: tri(&m_big, &m_big),
        svv: tri(&m_small, &m_small),
        sxv: square(&m_big, &m_small),
        t,
    })
}

/// Noise correlation evaluator for the direct route.
///
/// Classical: kB T beta(tau) in closed form. Quantum at T > 0: the
/// residue series of the infinite-cutoff integral,
///   c(tau) = (hbar Gamma / 2 tau_c^2) cot(hbar/(2 kB T tau_c)) e^{-tau/tau_c}
///            - 2 kB T Gamma sum_{n>=1} nu n e^{-nu n tau} / (1 - (nu n tau_c)^2)
/// with nu = 2 pi kB T / hbar, summed with its slowly-converging 1/n part
/// resummed into a logarithm. Quantum at T = 0 (or near a bath Matsubara
/// resonance nu n tau_c = 1): dense quadrature table with cubic
/// interpolation. The finite-omega_max truncation only affects the
/// variance integrands beyond their 1/omega^3 falloff and is negligible
/// against the comparison tolerances.
enum Correlation {
    Classical { amp: f64, nu: f64 },
    Series(SeriesParams),
    Vacuum { pref: f64, tau_c: f64, tau_floor: f64 },
    Table { values: Vec<f64>, dt: f64 },
}

struct SeriesParams {
    pref_pole: f64,
    pref_thermal: f64,
    nu: f64,
    tau_c: f64,
    inv_tau_c: f64,
    tau_floor: f64,
}

impl Correlation {
    fn build(bath: &BathSpec, t: f64, mode: FdrMode) -> Result<Self> {
        if mode == FdrMode::Classical {
            return Ok(Correlation::Classical {
                amp: bath.kbt() * bath.gamma / bath.tau_c,
                nu: 1.0 / bath.tau_c,
            });
        }
        let kbt = bath.kbt();
        if kbt == 0.0 {
            return Ok(Correlation::Vacuum {
                pref: bath.hbar * bath.gamma
                    / (std::f64::consts::PI * bath.tau_c * bath.tau_c),
                tau_c: bath.tau_c,
                tau_floor: 1e-3 / bath.omega_max(),
            });
        }
        if kbt > 0.0 {
            let nu = 2.0 * std::f64::consts::PI * kbt / bath.hbar;
            // distance to the nearest bath-Matsubara resonance
            let x = 1.0 / (nu * bath.tau_c);
            let near_resonance = (x - x.round()).abs() * nu * bath.tau_c < 0.02 && x.round() >= 1.0;
            if !near_resonance {
                let theta = bath.hbar / (2.0 * kbt * bath.tau_c);
                return Ok(Correlation::Series(SeriesParams {
                    pref_pole: bath.hbar * bath.gamma / (2.0 * bath.tau_c * bath.tau_c)
                        / theta.tan(),
                    pref_thermal: 2.0 * kbt * bath.gamma,
                    nu,
                    tau_c: bath.tau_c,
                    inv_tau_c: 1.0 / bath.tau_c,
                    tau_floor: 1e-3 / bath.omega_max(),
                }));
            }
        }
        let n = 2048;
        let dt = t / n as f64;
        let mut values = Vec::with_capacity(n + 1);
        for i in 0..=n {
            values.push(bath.noise_correlation(i as f64 * dt, FdrMode::Quantum)?);
        }
        Ok(Correlation::Table { values, dt })
    }

    fn eval(&self, tau: f64) -> f64 {
        let tau = tau.abs();
        match self {
            Correlation::Classical { amp, nu } => amp * (-nu * tau).exp(),
            Correlation::Vacuum {
                pref,
                tau_c,
                tau_floor,
            } => pref * quad::lorentz_cos_moment((tau / tau_c).max(tau_floor / tau_c)),
            Correlation::Series(p) => {
                // the log divergence at tau -> 0 is integrable; the floor
                // only guards literal zero
                let tau = tau.max(p.tau_floor);
                let q = (-p.nu * tau).exp();
                // sum_n nu n q^n/(1-x_n^2) with x_n = nu n tau_c, written as
                // corrected terms ~ n^-3 plus the resummed log
                let inv_ntc2 = 1.0 / (p.nu * p.tau_c * p.tau_c);
                let mut s_corr = 0.0;
                let mut qn = 1.0;
                for n in 1..=4000 {
                    qn *= q;
                    let x = p.nu * n as f64 * p.tau_c;
                    let term = inv_ntc2 / (n as f64 * (1.0 - x * x)) * qn;
                    s_corr += term;
                    if n > 8 && term.abs() < 1e-14 * (1.0 + s_corr.abs()) {
                        break;
                    }
                }
                let log_part = if q < 1.0 {
                    inv_ntc2 * (1.0 - q).ln()
                } else {
                    f64::NEG_INFINITY
                };
                let series = s_corr + log_part;
                p.pref_pole * (-tau * p.inv_tau_c).exp() - p.pref_thermal * series
            }
            Correlation::Table { values, dt } => {
                let x = tau / dt;
                let n = values.len() - 1;
                let i = (x.floor() as usize).min(n - 1);
                let frac = x - i as f64;
                let im1 = i.saturating_sub(1);
                let ip2 = (i + 2).min(n);
                let (p0, p1, p2, p3) = (values[im1], values[i], values[(i + 1).min(n)], values[ip2]);
                let a = 0.5 * (-p0 + 3.0 * p1 - 3.0 * p2 + p3);
                let b = 0.5 * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3);
                let c = 0.5 * (p2 - p0);
                ((a * frac + b) * frac + c) * frac + p1
            }
        }
    }
}

/// Public entry point combining both routes.
pub fn variances(
    bath: &BathSpec,
    relax: &Relaxation,
    t: f64,
    method: Method,
    mode: FdrMode,
) -> Result<VarianceSet> {
    match method {
        Method::Spectral => variances_spectral_full(bath, relax, t, mode).map(|(v, _, _)| v),
        Method::Direct => variances_direct(bath, relax, t, mode),
    }
}

/// Stationary (t -> infinity) variances of a stable linear response with
/// curvature +omega^2:
///   sxx(inf) = int S(w) |M~(iw)|^2 dw,  svv(inf) = int S(w) w^2 |M~(iw)|^2 dw.
pub fn stationary_variances(bath: &BathSpec, omega_sq: f64, mode: FdrMode) -> Result<(f64, f64)> {
    let wmax = bath.omega_max();
    let edges = stationary_edges(bath, omega_sq, wmax);
    let resp_sq = |w: f64| {
        let beta = Complex64::new(bath.gamma, 0.0) / Complex64::new(1.0, w * bath.tau_c);
        let den = Complex64::new(omega_sq - w * w, 0.0) + Complex64::new(0.0, w) * beta;
        1.0 / den.norm_sqr()
    };
    let (sxx, exx) = quad::composite(&|w: f64| bath.spectral_weight(w, mode) * resp_sq(w), &edges);
    let (svv, evv) = quad::composite(
        &|w: f64| bath.spectral_weight(w, mode) * w * w * resp_sq(w),
        &edges,
    );
    let tol = 1e-7 * (sxx.abs() + svv.abs()).max(1e-30);
    if exx + evv > 100.0 * tol {
        return Err(crate::error::Error::QuadratureNonConvergence {
            context: "stationary_variances".into(),
            err_est: exx + evv,
            requested: tol,
        });
    }
    Ok((sxx, svv))
}

fn stationary_edges(bath: &BathSpec, omega_sq: f64, wmax: f64) -> Vec<f64> {
    let om = omega_sq.sqrt();
    let mut edges = vec![0.0];
    let fine = (om.min(1.0 / bath.tau_c) / 8.0).max(wmax * 1e-9);
    let mut w = fine;
    let knee = 4.0 * om.max(1.0 / bath.tau_c);
    while w < knee.min(wmax) {
        edges.push(w);
        w += fine;
    }
    while w < wmax {
        edges.push(w);
        w *= 1.6;
    }
    edges.push(wmax);
    // a weakly damped response has a near-singular resonance at om whose
    // linewidth ~ Re beta(i om) needs dedicated panels
    let width = (bath.gamma / (1.0 + omega_sq * bath.tau_c * bath.tau_c)).max(1e-6 * om);
    if width < fine {
        let mut w = om - 8.0 * width;
        while w < om + 8.0 * width {
            if w > 0.0 && w < wmax {
                edges.push(w);
            }
            w += width / 4.0;
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * wmax);
    edges
}

/// G(t) = (M * Q)(t) and g(t) = dG/dt, values at t.
pub fn convolution_g(m_big: &ExpSum, q: &ExpSum, t: f64) -> (f64, f64) {
    let (g_sum, g_dot) = convolution_g_sums(m_big, q);
    (g_sum.value_re(t), g_dot.value_re(t))
}

/// The exponential-sum forms, for callers that evaluate repeatedly.
pub fn convolution_g_sums(m_big: &ExpSum, q: &ExpSum) -> (ExpSum, ExpSum) {
    let g_sum = m_big.convolve(q);
    let g_dot = g_sum.derivative();
    (g_sum, g_dot)
}

/// Least-squares line fit of G over [0.1 w, w]; the residual is reported
/// so callers can assess linearity of the window.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GbFit {
    pub slope: f64,
    pub max_residual: f64,
    pub window: f64,
}

pub fn gb_short_time<F: Fn(f64) -> f64>(g_of_t: F, window: f64) -> Result<GbFit> {
    if !(window > 0.0) {
        return Err(crate::error::Error::Domain(
            "gb_short_time needs window > 0".into(),
        ));
    }
    let n = 64;
    let t_lo = 0.1 * window;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    let mut pts = Vec::with_capacity(n);
    for i in 0..n {
        let t = t_lo + (window - t_lo) * i as f64 / (n - 1) as f64;
        let y = g_of_t(t);
        pts.push((t, y));
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    let nf = n as f64;
    let denom = nf * sxx - sx * sx;
    let slope = (nf * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / nf;
    let max_residual = pts
        .iter()
        .map(|&(t, y)| (y - slope * t - intercept).abs())
        .fold(0.0, f64::max);
    Ok(GbFit {
        slope,
        max_residual,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolvent::Region;
    use approx::assert_relative_eq;

    const OM_SQ: f64 = 2.46621207433047;

    fn bath() -> BathSpec {
        BathSpec::new(1.3, 0.3, 10.0)
    }

    #[test]
    fn zero_time_is_zero() {
        let b = bath();
        let relax = Relaxation::build(&b, OM_SQ, Region::Well).unwrap();
        for method in [Method::Spectral, Method::Direct] {
            let v = variances(&b, &relax, 0.0, method, FdrMode::Classical).unwrap();
            assert!(v.sxx.abs() < 1e-14 && v.svv.abs() < 1e-14 && v.sxv.abs() < 1e-14);
        }
    }

    #[test]
    fn classical_equipartition_long_time() {
        let b = bath();
        let relax = Relaxation::build(&b, OM_SQ, Region::Well).unwrap();
        let v = variances(&b, &relax, 50.0, Method::Spectral, FdrMode::Classical).unwrap();
        assert_relative_eq!(v.sxx, b.kbt() / OM_SQ, max_relative = 2e-4);
        assert_relative_eq!(v.svv, b.kbt(), max_relative = 2e-4);
        assert!(v.sxv.abs() < 1e-3 * b.kbt());
    }

    #[test]
    fn stationary_matches_finite_time_limit() {
        let b = bath();
        let relax = Relaxation::build(&b, OM_SQ, Region::Well).unwrap();
        let (sxx_inf, svv_inf) = stationary_variances(&b, OM_SQ, FdrMode::Classical).unwrap();
        assert_relative_eq!(sxx_inf, b.kbt() / OM_SQ, max_relative = 1e-6);
        assert_relative_eq!(svv_inf, b.kbt(), max_relative = 1e-6);
        let v = variances(&b, &relax, 60.0, Method::Spectral, FdrMode::Classical).unwrap();
        assert_relative_eq!(v.sxx, sxx_inf, max_relative = 1e-4);
    }

    #[test]
    fn zero_point_velocity_variance_weak_coupling() {
        let b = BathSpec::new(0.05, 0.3, 0.0);
        let (_, svv_inf) = stationary_variances(&b, OM_SQ, FdrMode::Quantum).unwrap();
        let zero_point = 0.5 * OM_SQ.sqrt();
        assert!(
            (svv_inf / zero_point - 1.0).abs() < 0.05,
            "svv(inf) = {svv_inf}, hbar omega0/2 = {zero_point}"
        );
    }

    #[test]
    fn sxv_is_half_sxx_rate() {
        let b = bath();
        let relax = Relaxation::build(&b, OM_SQ, Region::Well).unwrap();
        let h = 1e-4;
        for t in [0.8, 2.0] {
            let vp = variances(&b, &relax, t + h, Method::Spectral, FdrMode::Quantum).unwrap();
            let vm = variances(&b, &relax, t - h, Method::Spectral, FdrMode::Quantum).unwrap();
            let v = variances(&b, &relax, t, Method::Spectral, FdrMode::Quantum).unwrap();
            let fd = (vp.sxx - vm.sxx) / (2.0 * h);
            assert_relative_eq!(v.sxv, 0.5 * fd, max_relative = 1e-5, epsilon = 1e-7);
        }
    }

    #[test]
    fn spectral_vs_direct_well() {
        let b = bath();
        let relax = Relaxation::build(&b, OM_SQ, Region::Well).unwrap();
        for (t, temp) in [(0.5, 10.0), (2.0, 1.0), (5.0, 0.0)] {
            let bt = b.with_temperature(temp);
            let s = variances(&bt, &relax, t, Method::Spectral, FdrMode::Quantum).unwrap();
            let d = variances(&bt, &relax, t, Method::Direct, FdrMode::Quantum).unwrap();
            for (a, bb) in [(s.sxx, d.sxx), (s.svv, d.svv), (s.sxv, d.sxv)] {
                assert!(
                    (a - bb).abs() <= 1e-3 * bb.abs().max(1.0),
                    "t={t} T={temp}: spectral {a} vs direct {bb}"
                );
            }
        }
    }

    #[test]
    fn monotone_in_temperature() {
        let b = bath();
        let mut prev = (0.0, 0.0);
        for temp in [0.0, 1.0, 5.0, 10.0] {
            let bt = b.with_temperature(temp);
            let (sxx, svv) = stationary_variances(&bt, OM_SQ, FdrMode::Quantum).unwrap();
            assert!(sxx >= prev.0 && svv >= prev.1, "T={temp}");
            prev = (sxx, svv);
        }
    }

    #[test]
    fn hbar_to_zero_reproduces_classical() {
        let mut b = bath();
        b.hbar = 1e-6;
        let (sxx_q, svv_q) = stationary_variances(&b, OM_SQ, FdrMode::Quantum).unwrap();
        let (sxx_c, svv_c) = stationary_variances(&b, OM_SQ, FdrMode::Classical).unwrap();
        assert_relative_eq!(sxx_q, sxx_c, max_relative = 1e-6);
        assert_relative_eq!(svv_q, svv_c, max_relative = 1e-6);
    }

    #[test]
    fn long_time_velocity_variance_is_stationary() {
        let b = bath();
        let relax = Relaxation::build(&b, OM_SQ, Region::Well).unwrap();
        let t = 50.0 / OM_SQ.sqrt();
        let (v, dvv, _) = variances_spectral_full(&b, &relax, t, FdrMode::Quantum).unwrap();
        assert!(
            dvv.abs() < 1e-4 * v.svv,
            "d svv/dt = {dvv} vs svv = {}",
            v.svv
        );
    }

    #[test]
    fn convolution_trivial_cases() {
        let b = bath();
        let relax = Relaxation::build(&b, OM_SQ, Region::Well).unwrap();
        let m = relax.m_big();
        let zero = ExpSum::new();
        let (g, gd) = convolution_g(&m, &zero, 1.0);
        assert_eq!(g, 0.0);
        assert_eq!(gd, 0.0);
        let q = ExpSum::constant(Complex64::new(0.7, 0.0));
        let (g0, gd0) = convolution_g(&m, &q, 0.0);
        assert!(g0.abs() < 1e-14);
        assert!(gd0.abs() < 1e-12, "g(0) = M(0) Q(0) = 0, got {gd0}");
    }

    #[test]
    fn convolution_against_quadrature_barrier() {
        let b = bath();
        let relax = Relaxation::build(&b, OM_SQ, Region::Barrier).unwrap();
        let p = crate::potential::CubicPotential::from_energy(0.5, 10.0).unwrap();
        let s0 = crate::dispersion::FluctuationState::minimum_uncertainty(1.0, OM_SQ.sqrt());
        let q = crate::dispersion::dispersion_expsum(&p, Region::Barrier, &s0).unwrap();
        let m = relax.m_big();
        let (g, _) = convolution_g(&m, &q, 1.0);
        let oracle = quad::adaptive(
            &|tau: f64| m.value_re(1.0 - tau) * q.value_re(tau),
            0.0,
            1.0,
            &[],
            1e-13,
            1e-13,
            "conv oracle",
        )
        .unwrap();
        assert_relative_eq!(g, oracle, epsilon = 1e-9);
    }

    #[test]
    fn gb_fit_exact_line() {
        let fit = gb_short_time(|t| 3.0 * t, 0.5).unwrap();
        assert_relative_eq!(fit.slope, 3.0, max_relative = 1e-12);
        assert!(fit.max_residual < 1e-12);
    }

    #[test]
    fn gb_window_stability() {
        let b = bath();
        let relax = Relaxation::build(&b, OM_SQ, Region::Barrier).unwrap();
        let p = crate::potential::CubicPotential::from_energy(0.5, 10.0).unwrap();
        let ob = p.omegab_sq().sqrt();
        let s0 = crate::dispersion::FluctuationState::minimum_uncertainty(1.0, ob);
        let q = crate::dispersion::dispersion_expsum(&p, Region::Barrier, &s0).unwrap();
        let (g_sum, g_dot) = convolution_g_sums(&relax.m_big(), &q);
        let w = 0.5 / (2.0 * ob);
        // window sizes differing < 10% move the slope by less than 10%
        let fit1 = gb_short_time(|t| g_sum.value_re(t), w).unwrap();
        let fit2 = gb_short_time(|t| g_sum.value_re(t), 1.05 * w).unwrap();
        assert!(
            (fit1.slope / fit2.slope - 1.0).abs() < 0.10,
            "windows give {} vs {}",
            fit1.slope,
            fit2.slope
        );
        // self-consistency oracle: the least-squares slope equals dG/dt at
        // the mean abscissa of the fit (exactly, for the quadratic onset)
        let gd_mid = g_dot.value_re(0.55 * w);
        assert!(
            (fit1.slope / gd_mid - 1.0).abs() < 0.05,
            "slope {} vs g(t_mid) {}",
            fit1.slope,
            gd_mid
        );
        // frozen regression anchor at the default window, paper parameters
        approx::assert_relative_eq!(fit1.slope, 0.014151, max_relative = 1e-3);
    }
}
