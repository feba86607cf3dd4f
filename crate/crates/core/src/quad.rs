//! Adaptive Gauss-Kronrod quadrature and Gauss-Hermite rules.
//!
//! The integrands in this crate are smooth but can oscillate (factors of
//! cos(omega t) under an omega integral), so the adaptive driver accepts
//! caller-supplied break points and subdivides locally from there.

use crate::error::Error;
use crate::Result;

/// 15-point Kronrod abscissae on [-1, 1] (positive half).
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

/// Kronrod weights matching `XGK`.
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

/// 7-point Gauss weights (for the embedded error estimate).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Single Gauss-Kronrod 7-15 panel; returns (integral, error estimate).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut fv = [0.0_f64; 15];
    fv[7] = fc;
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let integral = kronrod * half;
    let mut err = ((kronrod - gauss) * half).abs();
    // QUADPACK-style rescaling keeps the estimate meaningful when the
    // integrand nearly cancels over the panel.
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, v) in fv.iter().enumerate().take(7) {
        asc += WGK[j] * ((v - mean).abs() + (fv[14 - j] - mean).abs());
    }
    asc *= half.abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    (integral, err)
}

/// Adaptive integration of `f` over [a, b].
///
/// `breaks` seeds the initial partition (useful when the caller knows the
/// oscillation scale); it may be empty. Worst panels are split first.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    context: &str,
) -> Result<f64> {
    if !(b > a) {
        return Ok(0.0);
    }
    let mut edges: Vec<f64> = vec![a];
    edges.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    edges.sort_by(|p, q| p.partial_cmp(q).unwrap());
    edges.dedup();

    struct Panel {
        a: f64,
        b: f64,
        val: f64,
        err: f64,
    }
    let mut panels: Vec<Panel> = Vec::with_capacity(edges.len() * 2);
    for w in edges.windows(2) {
        let (val, err) = gk15(f, w[0], w[1]);
        panels.push(Panel {
            a: w[0],
            b: w[1],
            val,
            err,
        });
    }

    let max_panels = 20_000;
    loop {
        let total: f64 = kahan_sum(panels.iter().map(|p| p.val));
        let err_total: f64 = panels.iter().map(|p| p.err).sum();
        let tol = abs_tol.max(rel_tol * total.abs());
        if err_total <= tol {
            return Ok(total);
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureNonConvergence {
                context: context.to_string(),
                err_est: err_total,
                requested: tol,
            });
        }
        // split the worst panel
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.partial_cmp(&y.1.err).unwrap())
            .unwrap();
        let Panel { a: pa, b: pb, .. } = panels[idx];
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // panel at floating-point resolution; accept what we have
            return Ok(kahan_sum(panels.iter().map(|p| p.val)));
        }
        let (v1, e1) = gk15(f, pa, mid);
        let (v2, e2) = gk15(f, mid, pb);
        panels[idx] = Panel {
            a: pa,
            b: mid,
            val: v1,
            err: e1,
        };
        panels.push(Panel {
            a: mid,
            b: pb,
            val: v2,
            err: e2,
        });
    }
}

/// Fixed composite GK15 over explicit panel edges, with compensated
/// summation so results do not depend on evaluation order.
pub fn composite<F: Fn(f64) -> f64>(f: &F, edges: &[f64]) -> (f64, f64) {
    let mut vals = Vec::with_capacity(edges.len().saturating_sub(1));
    let mut errs = 0.0;
    for w in edges.windows(2) {
        let (v, e) = gk15(f, w[0], w[1]);
        vals.push(v);
        errs += e;
    }
    (kahan_sum(vals.into_iter()), errs)
}

/// Kahan-compensated sum.
pub fn kahan_sum<I: Iterator<Item = f64>>(it: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in it {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Geometrically refined edges for smooth integrands on [0, wmax]:
/// dense near zero (spectral knees live there), sparse in the tail.
pub fn log_edges(scale: f64, wmax: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut e = scale.min(wmax);
    while e < wmax {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(wmax);
    edges.dedup();
    edges
}

/// Uniform edges with spacing `du`, covering [0, wmax].
pub fn uniform_edges(du: f64, wmax: f64) -> Vec<f64> {
    let n = (wmax / du).ceil().max(1.0) as usize;
    (0..=n).map(|i| wmax * i as f64 / n as f64).collect()
}

/// Gauss-Hermite nodes/weights for integrals of exp(-x^2) f(x) over the
/// real line. Newton iteration on the recurrence; weights from the
/// derivative identity.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0_f64; n];
    let mut weights = vec![0.0_f64; n];
    let m = (n + 1) / 2;
    let mut z = 0.0_f64;
    for i in 0..m {
        // initial guesses (Numerical Recipes)
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            // orthonormal Hermite recurrence
            let mut p1 = std::f64::consts::PI.powf(-0.25);
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / (j as f64 + 1.0)).sqrt() * p2
                    - ((j as f64) / (j as f64 + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    (nodes, weights)
}

/// Error function, f64 precision.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

const EULER_GAMMA: f64 = 0.577215664901532860606512;

/// Exponential integral E1(x) for x > 0.
pub fn expint_e1(x: f64) -> f64 {
    assert!(x > 0.0);
    if x <= 1.0 {
        // series: E1 = -gamma - ln x + sum (-1)^{n+1} x^n/(n n!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for n in 1..=60 {
            term *= -x / n as f64;
            let add = -term / n as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1.0) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // Lentz continued fraction: E1 = e^-x / (x + 1/(1 + 1/(x + 2/(1 + ...))))
        let mut b = x + 1.0;
        let mut c = 1e308;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=200 {
            let a = -(i as f64) * (i as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x).exp() * h
    }
}

/// Exponential integral Ei(x) (principal value) for x > 0.
pub fn expint_ei(x: f64) -> f64 {
    assert!(x > 0.0);
    if x < 40.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for n in 1..=180 {
            term *= x / n as f64;
            let add = term / n as f64;
            sum += add;
            if add < 1e-17 * sum.abs().max(1.0) {
                break;
            }
        }
        EULER_GAMMA + x.ln() + sum
    } else {
        // asymptotic e^x/x (1 + 1!/x + 2!/x^2 + ...), truncated at the
        // smallest term
        let mut sum = 1.0;
        let mut term = 1.0;
        for n in 1..=60 {
            let next = term * n as f64 / x;
            if next > term {
                break;
            }
            term = next;
            sum += term;
        }
        x.exp() / x * sum
    }
}

/// e^x E1(x) without forming e^x; Lentz continued fraction.
fn expint_e1_scaled(x: f64) -> f64 {
    let mut b = x + 1.0;
    let mut c = 1e308;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=300 {
        let a = -(i as f64) * (i as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// e^{-x} Ei(x) without forming e^x; asymptotic series, valid x >= 40.
fn expint_ei_scaled(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 1..=60 {
        let next = term * n as f64 / x;
        if next > term {
            break;
        }
        term = next;
        sum += term;
    }
    sum / x
}

/// f(s) = int_0^inf u cos(u s)/(1 + u^2) du
///      = (1/2)[e^s E1(s) - e^{-s} Ei(s)] for s > 0; tends to -1/s^2.
pub fn lorentz_cos_moment(s: f64) -> f64 {
    assert!(s > 0.0);
    if s >= 40.0 {
        0.5 * (expint_e1_scaled(s) - expint_ei_scaled(s))
    } else {
        0.5 * (s.exp() * expint_e1(s) - (-s).exp() * expint_ei(s))
    }
}
