//! Lowest-order quantum dispersion of the system: the flow of the second
//! moments of (delta X, delta P) near a fixed point, and the c-number
//! forcing Q(t) = -(1/2) V''' <delta X^2>.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};

use crate::expsum::ExpSum;
use crate::potential::CubicPotential;
use crate::resolvent::Region;
use crate::Result;

/// Second moments of the quantum corrections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluctuationState {
    /// <delta X^2>
    pub dx2: f64,
    /// <delta X delta P + delta P delta X>
    pub sym: f64,
    /// <delta P^2>
    pub dp2: f64,
}

impl FluctuationState {
    /// Minimum-uncertainty state matched to frequency omega:
    /// (hbar/2 omega, 0, hbar omega / 2).
    pub fn minimum_uncertainty(hbar: f64, omega: f64) -> Self {
        FluctuationState {
            dx2: hbar / (2.0 * omega),
            sym: 0.0,
            dp2: hbar * omega / 2.0,
        }
    }

    /// Symplectic invariant dx2 * dp2 - (sym/2)^2, conserved by the
    /// linearized flow.
    pub fn invariant(&self) -> f64 {
        self.dx2 * self.dp2 - 0.25 * self.sym * self.sym
    }
}

/// How the initial fluctuation state is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DispersionInit {
    /// (hbar/2 omega, 0, hbar omega/2) with omega from the local curvature.
    MinimumUncertainty,
    Explicit(FluctuationState),
}

impl DispersionInit {
    pub fn state(&self, hbar: f64, omega: f64) -> FluctuationState {
        match self {
            DispersionInit::MinimumUncertainty => {
                FluctuationState::minimum_uncertainty(hbar, omega)
            }
            DispersionInit::Explicit(s) => *s,
        }
    }
}

impl Default for DispersionInit {
    fn default() -> Self {
        DispersionInit::MinimumUncertainty
    }
}

impl Serialize for DispersionInit {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            DispersionInit::MinimumUncertainty => {
                let mut m = ser.serialize_map(Some(1))?;
                m.serialize_entry("minimum_uncertainty", &true)?;
                m.end()
            }
            DispersionInit::Explicit(s) => s.serialize(ser),
        }
    }
}

impl<'de> Deserialize<'de> for DispersionInit {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Min {
                #[allow(dead_code)]
                minimum_uncertainty: bool,
            },
            State {
                dx2: f64,
                sym: f64,
                dp2: f64,
            },
        }
        match Raw::deserialize(de)? {
            Raw::Min { .. } => Ok(DispersionInit::MinimumUncertainty),
            Raw::State { dx2, sym, dp2 } => {
                Ok(DispersionInit::Explicit(FluctuationState { dx2, sym, dp2 }))
            }
        }
    }
}

/// Closed-form flow of (dx2, sym, dp2) under
///   d(dx2)/dt = sym,  d(sym)/dt = 2 dp2 - 2 v2 dx2,  d(dp2)/dt = -v2 sym
/// with the local curvature v2 = V''(xbar) held constant.
pub fn evolve_moments(state0: &FluctuationState, v2: f64, t: f64) -> FluctuationState {
    if v2 == 0.0 {
        // free particle: polynomial growth
        return FluctuationState {
            dx2: state0.dx2 + state0.sym * t + state0.dp2 * t * t,
            sym: state0.sym + 2.0 * state0.dp2 * t,
            dp2: state0.dp2,
        };
    }
    if v2 > 0.0 {
        let om = v2.sqrt();
        let c_mean = (state0.dp2 + v2 * state0.dx2) / (2.0 * v2);
        let a = 0.5 * (state0.dx2 - state0.dp2 / v2);
        let b = state0.sym / (2.0 * om);
        let (s2, c2) = (2.0 * om * t).sin_cos();
        FluctuationState {
            dx2: c_mean + a * c2 + b * s2,
            sym: 2.0 * om * (b * c2 - a * s2),
            dp2: v2 * (c_mean - a * c2 - b * s2),
        }
    } else {
        let ob = (-v2).sqrt();
        let ob2 = -v2;
        let c_mean = (ob2 * state0.dx2 - state0.dp2) / (2.0 * ob2);
        let a = (state0.dp2 + ob2 * state0.dx2) / (2.0 * ob2);
        let b = state0.sym / (2.0 * ob);
        let ch = (2.0 * ob * t).cosh();
        let sh = (2.0 * ob * t).sinh();
        FluctuationState {
            dx2: c_mean + a * ch + b * sh,
            sym: 2.0 * ob * (a * sh + b * ch),
            dp2: ob2 * (a * ch + b * sh) - ob2 * c_mean,
        }
    }
}

/// <delta X^2>(t) near the elliptic fixed point (well), closed form.
pub fn delta_x2_well(state0: &FluctuationState, omega0_sq: f64, t: f64) -> Result<f64> {
    if !(omega0_sq > 0.0) {
        return Err(crate::error::Error::Domain(
            "delta_x2_well needs omega0_sq > 0".into(),
        ));
    }
    let om = omega0_sq.sqrt();
    let i0 = state0.dp2 + omega0_sq * state0.dx2;
    Ok(0.5 * (state0.dx2 - state0.dp2 / omega0_sq) * (2.0 * om * t).cos()
        + state0.sym / (2.0 * om) * (2.0 * om * t).sin()
        + 2.0 * i0 / (4.0 * omega0_sq))
}

/// <delta X^2>(t) near the hyperbolic fixed point (barrier), general
/// initial data; reduces to dx2_0 cosh + (sym_0/2 omega_b) sinh when
/// dp2_0 = omega_b^2 dx2_0.
pub fn delta_x2_barrier(state0: &FluctuationState, omegab_sq: f64, t: f64) -> Result<f64> {
    if !(omegab_sq > 0.0) {
        return Err(crate::error::Error::Domain(
            "delta_x2_barrier needs omegab_sq > 0".into(),
        ));
    }
    Ok(evolve_moments(state0, -omegab_sq, t).dx2)
}

/// Q(t) = -(1/2) V'''(x_region) <delta X^2(t)>; positive for the cubic.
pub fn quantum_dispersion_q(
    potential: &CubicPotential,
    region: Region,
    state0: &FluctuationState,
    t: f64,
) -> Result<f64> {
    let (x_ref, v2) = match region {
        Region::Well => (potential.x0(), potential.omega0_sq()),
        Region::Barrier => (potential.xb(), -potential.omegab_sq()),
    };
    let v3 = potential.derivative(x_ref, 3)?;
    Ok(-0.5 * v3 * evolve_moments(state0, v2, t).dx2)
}

/// Q(t) as an exponential sum (rates 0, +/-2 i omega in the well;
/// 0, +/-2 omega_b at the barrier), the form consumed by the G = M * Q
/// convolution.
pub fn dispersion_expsum(
    potential: &CubicPotential,
    region: Region,
    state0: &FluctuationState,
) -> Result<ExpSum> {
    let (x_ref, v2, omega) = match region {
        Region::Well => (potential.x0(), potential.omega0_sq(), potential.omega0_sq().sqrt()),
        Region::Barrier => (
            potential.xb(),
            -potential.omegab_sq(),
            potential.omegab_sq().sqrt(),
        ),
    };
    let v3 = potential.derivative(x_ref, 3)?;
    let pref = Complex64::new(-0.5 * v3, 0.0);
    let mut s = ExpSum::new();
    if v2 > 0.0 {
        let c_mean = (state0.dp2 + v2 * state0.dx2) / (2.0 * v2);
        let a = 0.5 * (state0.dx2 - state0.dp2 / v2);
        let b = state0.sym / (2.0 * omega);
        // a cos(2wt) + b sin(2wt) + c
        let iw2 = Complex64::new(0.0, 2.0 * omega);
        s.push(pref * Complex64::new(0.5 * a, -0.5 * b), iw2, 0);
        s.push(pref * Complex64::new(0.5 * a, 0.5 * b), -iw2, 0);
        s.push(pref * c_mean, Complex64::new(0.0, 0.0), 0);
    } else {
        let ob2 = -v2;
        let c_mean = (ob2 * state0.dx2 - state0.dp2) / (2.0 * ob2);
        let a = (state0.dp2 + ob2 * state0.dx2) / (2.0 * ob2);
        let b = state0.sym / (2.0 * omega);
        // a cosh(2wt) + b sinh(2wt) + c
        let w2 = Complex64::new(2.0 * omega, 0.0);
        s.push(pref * Complex64::new(0.5 * (a + b), 0.0), w2, 0);
        s.push(pref * Complex64::new(0.5 * (a - b), 0.0), -w2, 0);
        s.push(pref * c_mean, Complex64::new(0.0, 0.0), 0);
    }
    s.compress();
    Ok(s)
}
