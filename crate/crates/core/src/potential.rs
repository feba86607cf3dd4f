//! Metastable cubic potential V(x) = -(1/3) A x^3 + B x^2 with derived
//! well/barrier geometry.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::Error;
use crate::Result;

/// Cubic potential with well at x0 = 0 and barrier at xb = 2B/A.
#[derive(Debug, Clone, Serialize)]
pub struct CubicPotential {
    pub a_bar: f64,
    pub b_bar: f64,
}

impl CubicPotential {
    pub fn new(a_bar: f64, b_bar: f64) -> Result<Self> {
        if !(a_bar > 0.0) || !(b_bar > 0.0) {
            return Err(Error::Domain(
                "cubic potential needs a_bar > 0 and b_bar > 0".into(),
            ));
        }
        Ok(CubicPotential { a_bar, b_bar })
    }

    /// Builds the potential from the activation energy:
    /// B = ((3/4) A^2 E)^(1/3).
    pub fn from_energy(a_bar: f64, e_act: f64) -> Result<Self> {
        if !(a_bar > 0.0) || !(e_act > 0.0) {
            return Err(Error::Domain(
                "from_energy needs a_bar > 0 and e_act > 0".into(),
            ));
        }
        let b_bar = (0.75 * a_bar * a_bar * e_act).cbrt();
        Ok(CubicPotential { a_bar, b_bar })
    }

    pub fn x0(&self) -> f64 {
        0.0
    }

    pub fn xb(&self) -> f64 {
        2.0 * self.b_bar / self.a_bar
    }

    /// V''(x0) = 2B.
    pub fn omega0_sq(&self) -> f64 {
        2.0 * self.b_bar
    }

    /// -V''(xb) = 2B for this family; kept separate from omega0_sq so the
    /// pipeline never relies on their equality.
    pub fn omegab_sq(&self) -> f64 {
        -self.derivative(self.xb(), 2).unwrap()
    }

    /// Activation energy E = V(xb) - V(x0), evaluated from the polynomial.
    pub fn e_act(&self) -> f64 {
        self.derivative(self.xb(), 0).unwrap() - self.derivative(self.x0(), 0).unwrap()
    }

    /// Polynomial derivatives; order 0 returns V itself and order 3 is the
    /// constant -2A.
    pub fn derivative(&self, x: f64, order: u32) -> Result<f64> {
        let (a, b) = (self.a_bar, self.b_bar);
        match order {
            0 => Ok(-a / 3.0 * x.powi(3) + b * x * x),
            1 => Ok(x * (2.0 * b - a * x)),
            2 => Ok(2.0 * b - 2.0 * a * x),
            3 => Ok(-2.0 * a),
            _ => Err(Error::Domain(format!(
                "derivative order {order} not available (max 3)"
            ))),
        }
    }
}

impl<'de> Deserialize<'de> for CubicPotential {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a_bar: f64,
            #[serde(default)]
            b_bar: Option<f64>,
            #[serde(default)]
            e_act: Option<f64>,
        }
        let raw = Raw::deserialize(de)?;
        match (raw.b_bar, raw.e_act) {
            (Some(b), None) => CubicPotential::new(raw.a_bar, b).map_err(D::Error::custom),
            (None, Some(e)) => CubicPotential::from_energy(raw.a_bar, e).map_err(D::Error::custom),
            _ => Err(D::Error::custom(
                "potential needs exactly one of b_bar / e_act",
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn paper_parameters() {
        let p = CubicPotential::from_energy(0.5, 10.0).unwrap();
        assert_relative_eq!(p.b_bar, 1.2331060371652351, max_relative = 1e-10);
        assert_relative_eq!(p.xb(), 4.93242414866094, max_relative = 1e-10);
        assert_relative_eq!(p.omega0_sq(), 2.46621207433047, max_relative = 1e-10);
        assert_relative_eq!(p.omegab_sq(), 2.46621207433047, max_relative = 1e-10);
        assert_relative_eq!(p.e_act(), 10.0, max_relative = 1e-12);
    }

    #[test]
    fn stationary_points_and_curvatures() {
        let p = CubicPotential::from_energy(0.5, 10.0).unwrap();
        assert_relative_eq!(p.derivative(p.x0(), 1).unwrap(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(p.derivative(p.xb(), 1).unwrap(), 0.0, epsilon = 1e-12);
        assert!(p.derivative(p.x0(), 2).unwrap() > 0.0);
        assert!(p.derivative(p.xb(), 2).unwrap() < 0.0);
        assert_relative_eq!(p.derivative(17.3, 3).unwrap(), -1.0, max_relative = 1e-15);
        assert!(p.derivative(0.0, 4).is_err());
    }

    #[test]
    fn degenerate_limit() {
        let p = CubicPotential::from_energy(2.0, 1e-12).unwrap();
        assert!(p.b_bar < 1e-3);
        assert!(p.xb() < 1e-3);
    }

    #[test]
    fn curvature_symmetry_without_hardcoding() {
        let p = CubicPotential::from_energy(1.7, 3.0).unwrap();
        assert_relative_eq!(p.omega0_sq(), p.omegab_sq(), max_relative = 1e-12);
    }

    #[test]
    fn serde_exactly_one_of() {
        let p: CubicPotential = serde_json::from_str(r#"{"a_bar":0.5,"e_act":10.0}"#).unwrap();
        assert_relative_eq!(p.e_act(), 10.0, max_relative = 1e-12);
        let p2: CubicPotential = serde_json::from_str(r#"{"a_bar":0.5,"b_bar":1.0}"#).unwrap();
        assert_relative_eq!(p2.b_bar, 1.0);
        assert!(serde_json::from_str::<CubicPotential>(r#"{"a_bar":0.5}"#).is_err());
        assert!(serde_json::from_str::<CubicPotential>(
            r#"{"a_bar":0.5,"b_bar":1.0,"e_act":10.0}"#
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn energy_round_trips(a in 0.05_f64..5.0, e in 0.01_f64..100.0) {
            let p = CubicPotential::from_energy(a, e).unwrap();
            prop_assert!((p.e_act() - e).abs() <= 1e-12 * e);
        }
    }
}
