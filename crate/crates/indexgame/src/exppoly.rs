//! Exact arithmetic on exponential polynomials, i.e. finite sums of
//! `c * t^p * exp(a t)`. The closed-form inventory schedules are all of this
//! shape, so their cost integrands (products of schedule values and rates)
//! stay inside the class and integrate in closed form.

const MERGE_EPS: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    coeff: f64,
    power: u32,
    rate: f64,
}

/// Sum of `coeff * t^power * exp(rate * t)` terms.
#[derive(Debug, Clone, Default)]
pub struct ExpPoly {
    terms: Vec<Term>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// Single term `coeff * t^power * exp(rate * t)`.
    pub fn term(coeff: f64, power: u32, rate: f64) -> Self {
        let mut p = Self::zero();
        p.push(coeff, power, rate);
        p
    }

    /// Constant term.
    pub fn constant(c: f64) -> Self {
        Self::term(c, 0, 0.0)
    }

    pub fn push(&mut self, coeff: f64, power: u32, rate: f64) {
        if coeff == 0.0 {
            return;
        }
        for t in &mut self.terms {
            if t.power == power && (t.rate - rate).abs() <= MERGE_EPS {
                t.coeff += coeff;
                return;
            }
        }
        self.terms.push(Term { coeff, power, rate });
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(t.coeff, t.power, t.rate);
        }
        out
    }

    pub fn scale(&self, s: f64) -> ExpPoly {
        let mut out = Self::zero();
        for t in &self.terms {
            out.push(t.coeff * s, t.power, t.rate);
        }
        out
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = Self::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.push(a.coeff * b.coeff, a.power + b.power, a.rate + b.rate);
            }
        }
        out
    }

    /// Termwise time derivative.
    pub fn derivative(&self) -> ExpPoly {
        let mut out = Self::zero();
        for t in &self.terms {
            if t.power > 0 {
                out.push(t.coeff * t.power as f64, t.power - 1, t.rate);
            }
            out.push(t.coeff * t.rate, t.power, t.rate);
        }
        out
    }

    #[cfg(test)]
    pub fn eval(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| term.coeff * t.powi(term.power as i32) * (term.rate * t).exp())
            .sum()
    }

    /// Definite integral over `[0, x]`.
    pub fn integral(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| term.coeff * mono_integral(term.power, term.rate, x))
            .sum()
    }
}

/// `∫_0^x t^p exp(a t) dt`, stable for small `|a x|`.
fn mono_integral(p: u32, a: f64, x: f64) -> f64 {
    let ax = a * x;
    if ax.abs() < 0.25 {
        // x^{p+1} Σ_m (a x)^m / (m! (p + 1 + m)); converges fast here.
        let mut sum = 0.0;
        let mut factor = 1.0; // (a x)^m / m!
        for m in 0..24 {
            let add = factor / (p as f64 + 1.0 + m as f64);
            sum += add;
            if add.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
            factor *= ax / (m as f64 + 1.0);
        }
        return x.powi(p as i32 + 1) * sum;
    }
    // I_0 = expm1(a x)/a; I_p = (x^p e^{a x} - p I_{p-1}) / a.
    let mut acc = ax.exp_m1() / a;
    for q in 1..=p {
        acc = (x.powi(q as i32) * ax.exp() - q as f64 * acc) / a;
    }
    acc
}
