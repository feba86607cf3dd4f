//! CSV assembly and file/stdout dispatch. Floats use %.12e so identical
//! configurations produce byte-identical tables.

use std::path::Path;

use anyhow::anyhow;
use qkramers_core::fpcoeffs::coefficients_at;
use qkramers_core::resolvent::Region;
use qkramers_core::{Config, Error as CoreError, FdrMode};

pub fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

pub fn write_text(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// CSV of the time-dependent coefficients:
/// t,gamma,omega_sq,phi,psi,N,Omega,g,Y (RFC 4180, CRLF rows).
/// Rows where the coefficients are singular carry an error string.
pub fn coeffs_csv(
    config: &Config,
    region: Region,
    mode: FdrMode,
    t_min: f64,
    t_max: f64,
    n: usize,
) -> anyhow::Result<String> {
    if !(t_min > 0.0) || !(t_max > t_min) || n < 2 {
        return Err(anyhow!(CoreError::Config(
            "coeffs needs 0 < t_min < t_max and n >= 2".into()
        )));
    }
    let mut out = String::from("t,gamma,omega_sq,phi,psi,N,Omega,g,Y\r\n");
    for i in 0..n {
        let t = t_min + (t_max - t_min) * i as f64 / (n - 1) as f64;
        match coefficients_at(
            &config.bath,
            &config.potential,
            region,
            &config.dispersion,
            mode,
            t,
        ) {
            Ok(c) => {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\r\n",
                    fmt(c.t),
                    fmt(c.gamma_t),
                    fmt(c.omega_t_sq),
                    fmt(c.phi),
                    fmt(c.psi),
                    fmt(c.n_t),
                    fmt(c.omega_drift),
                    fmt(c.g_t),
                    fmt(c.y_t)
                ));
            }
            Err(e) => {
                let msg = e.to_string().replace(['"', ',', '\n'], ";");
                out.push_str(&format!("{},,,,,,,,\"{}\"\r\n", fmt(t), msg));
            }
        }
    }
    Ok(out)
}
