//! Exact algebra on sums of c * t^p * exp(lambda t).
//!
//! Every relaxation function, response integral and convolution in the
//! pipeline lives in this basis, so barrier-top quantities can be combined
//! symbolically (merging equal rates cancels the growing exponentials
//! analytically) instead of subtracting large floats.

use num_complex::Complex64;

/// One basis term: `coeff * t^power * exp(rate * t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub rate: Complex64,
    pub power: u32,
}

/// Sum of exponential-polynomial terms.
#[derive(Debug, Clone, Default)]
pub struct ExpSum {
    terms: Vec<Term>,
}

/// Rates closer than this (relative to the rate scale) are merged.
const RATE_TOL: f64 = 1e-10;

impl ExpSum {
    pub fn new() -> Self {
        ExpSum { terms: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        ExpSum {
            terms: vec![Term {
                coeff: c,
                rate: Complex64::new(0.0, 0.0),
                power: 0,
            }],
        }
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut s = ExpSum { terms };
        s.compress();
        s
    }

    pub fn push(&mut self, coeff: Complex64, rate: Complex64, power: u32) {
        self.terms.push(Term { coeff, rate, power });
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn value(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            acc += term.coeff * t.powi(term.power as i32) * (term.rate * t).exp();
        }
        acc
    }

    /// Real part of the value; sums built from conjugate-paired terms are
    /// real up to rounding.
    pub fn value_re(&self, t: f64) -> f64 {
        self.value(t).re
    }

    /// Largest imaginary residue relative to max(1, |value|) over a grid;
    /// a real-valuedness diagnostic.
    pub fn imag_residue(&self, grid: &[f64]) -> f64 {
        grid.iter()
            .map(|&t| {
                let v = self.value(t);
                v.im.abs() / v.re.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> ExpSum {
        ExpSum {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * c,
                    ..*t
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &ExpSum) -> ExpSum {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        ExpSum::from_terms(terms)
    }

    pub fn sub(&self, other: &ExpSum) -> ExpSum {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &ExpSum) -> ExpSum {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Term {
                    coeff: a.coeff * b.coeff,
                    rate: a.rate + b.rate,
                    power: a.power + b.power,
                });
            }
        }
        ExpSum::from_terms(terms)
    }

    /// d/dt, term by term.
    pub fn derivative(&self) -> ExpSum {
        let mut terms = Vec::with_capacity(self.terms.len() * 2);
        for t in &self.terms {
            terms.push(Term {
                coeff: t.coeff * t.rate,
                ..*t
            });
            if t.power > 0 {
                terms.push(Term {
                    coeff: t.coeff * t.power as f64,
                    rate: t.rate,
                    power: t.power - 1,
                });
            }
        }
        ExpSum::from_terms(terms)
    }

    /// Exact antiderivative from 0: F(t) = int_0^t f(tau) d tau, returned
    /// in the same basis (constants appear as rate-zero terms).
    pub fn antiderivative(&self) -> ExpSum {
        let scale = self.rate_scale();
        let mut out = Vec::new();
        for t in &self.terms {
            integral_term(t.coeff, t.rate, t.power, scale, &mut out);
        }
        ExpSum::from_terms(out)
    }

    /// Convolution (f * g)(t) = int_0^t f(t - tau) g(tau) d tau.
    /// Coinciding rates fall into the t * exp(lambda t) branch exactly.
    pub fn convolve(&self, other: &ExpSum) -> ExpSum {
        let scale = self.rate_scale().max(other.rate_scale());
        let mut out: Vec<Term> = Vec::new();
        for f in &self.terms {
            for g in &other.terms {
                convolve_terms(f, g, scale, &mut out);
            }
        }
        ExpSum::from_terms(out)
    }

    /// Typical magnitude of the rates, used for degeneracy tolerances.
    pub fn rate_scale(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.rate.norm())
            .fold(0.0, f64::max)
            .max(1.0)
    }

    /// Largest real part among the rates of non-negligible terms.
    pub fn dominant_rate(&self) -> Option<Complex64> {
        self.terms
            .iter()
            .max_by(|a, b| a.rate.re.partial_cmp(&b.rate.re).unwrap())
            .map(|t| t.rate)
    }

    /// Merge terms with equal (rate, power) and drop coefficients that are
    /// negligible against the largest one. This is where analytically
    /// cancelling growing exponentials actually vanish.
    pub fn compress(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        let scale = self.rate_scale();
        let tol = RATE_TOL * scale;
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        'outer: for t in &self.terms {
            for m in merged.iter_mut() {
                if m.power == t.power && (m.rate - t.rate).norm() <= tol {
                    m.coeff += t.coeff;
                    continue 'outer;
                }
            }
            merged.push(*t);
        }
        let cmax = merged
            .iter()
            .map(|t| t.coeff.norm())
            .fold(0.0, f64::max);
        merged.retain(|t| t.coeff.norm() > 1e-14 * cmax);
        merged.sort_by(|a, b| {
            b.rate
                .re
                .partial_cmp(&a.rate.re)
                .unwrap()
                .then(b.power.cmp(&a.power))
        });
        self.terms = merged;
    }
}

/// Appends the terms of int_0^t c tau^p exp(r tau) d tau.
fn integral_term(c: Complex64, r: Complex64, p: u32, scale: f64, out: &mut Vec<Term>) {
    if r.norm() <= RATE_TOL * scale {
        // pure polynomial
        out.push(Term {
            coeff: c / (p as f64 + 1.0),
            rate: Complex64::new(0.0, 0.0),
            power: p + 1,
        });
        return;
    }
    // int tau^p e^{r tau} = e^{r t} sum_j (-1)^j p!/(p-j)! t^{p-j} / r^{j+1},
    // minus its value at 0
    let mut fact = 1.0;
    let mut rpow = r;
    for j in 0..=p {
        let coeff = c * fact * (-1.0_f64).powi(j as i32) / rpow;
        out.push(Term {
            coeff,
            rate: r,
            power: p - j,
        });
        if j == p {
            out.push(Term {
                coeff: -coeff,
                rate: Complex64::new(0.0, 0.0),
                power: 0,
            });
        }
        fact *= (p - j) as f64;
        rpow *= r;
    }
}

/// Appends the terms of the convolution of f = c t^p e^{a t} with
/// g = d t^q e^{b t}.
fn convolve_terms(f: &Term, g: &Term, scale: f64, out: &mut Vec<Term>) {
    let nu = g.rate - f.rate;
    let cd = f.coeff * g.coeff;
    // (t - tau)^p expanded binomially; inner integrals of tau^{k+q} e^{nu tau}
    let mut binom = 1.0_f64;
    for k in 0..=f.power {
        if k > 0 {
            binom *= (f.power - k + 1) as f64 / k as f64;
        }
        let pref = cd * binom * (-1.0_f64).powi(k as i32);
        let n = k + g.power;
        let tpow = f.power - k;
        let mut inner: Vec<Term> = Vec::new();
        integral_term(Complex64::new(1.0, 0.0), nu, n, scale, &mut inner);
        for it in inner {
            out.push(Term {
                coeff: pref * it.coeff,
                rate: f.rate + it.rate,
                power: tpow + it.power,
            });
        }
    }
}
