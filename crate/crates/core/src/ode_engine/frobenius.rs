//! Frobenius expansions at the regular singular point `r = 0`.
//!
//! In the variable `ρ = r^{N/(N-1)}` both coefficients of the mode equation
//! are analytic, so a solution starting with exponent `β` has the form
//! `ψ = r^β Σ_j c_j ρ^j`.

use crate::bubble::Dimension;
use crate::modes::{self, OdeCoefficients};

#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusSeries {
    beta: f64,
    m: f64,
    coeffs: Vec<f64>,
}

impl FrobeniusSeries {
    /// Series for the regular (`β_plus`) branch of mode `k`, `c_0 = 1`,
    /// truncated after `terms` coefficients.
    pub fn regular(k: usize, n: Dimension, terms: usize) -> Self {
        let spec = modes::mode_spec(k, n);
        Self::with_exponent(k, n, spec.beta_plus, terms)
    }

    pub fn with_exponent(k: usize, n: Dimension, beta: f64, terms: usize) -> Self {
        assert!(terms >= 1);
        let c = OdeCoefficients::new(k, n);
        let m = n.rho_exponent();
        let s = c.p_from_rho(0.0) - 1.0;
        let q = {
            let nf = n.as_f64();
            nf.powi(3) / ((nf - 1.0) * (nf - 1.0))
        };
        // p = (1+s) + s Σ_{i≥1} (-1)^i ρ^i,   q_total = q_c + q Σ_{i≥1} (-1)^{i-1} i ρ^i
        let p_i = |i: usize| if i == 0 { 1.0 + s } else { s * if i.is_multiple_of(2) { 1.0 } else { -1.0 } };
        let q_i = |i: usize| {
            if i == 0 {
                c.q_centrifugal()
            } else {
                q * i as f64 * if i % 2 == 1 { 1.0 } else { -1.0 }
            }
        };
        let indicial = |g: f64| g * (g - 1.0) + p_i(0) * g + q_i(0);
        let mut coeffs = vec![1.0];
        for j in 1..terms {
            let mut acc = 0.0;
            for i in 1..=j {
                let g = beta + (j - i) as f64 * m;
                acc += (p_i(i) * g + q_i(i)) * coeffs[j - i];
            }
            coeffs.push(-acc / indicial(beta + j as f64 * m));
        }
        Self { beta, m, coeffs }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// `(Σ c_j ρ^j, Σ c_j (β + j m) ρ^j)`: the series with the factor `r^β`
    /// removed, and `r ψ'(r)` likewise.
    pub fn reduced(&self, r: f64) -> (f64, f64) {
        let rho = r.powf(self.m);
        let mut pw = 1.0;
        let mut v = 0.0;
        let mut dv = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            v += c * pw;
            dv += c * (self.beta + j as f64 * self.m) * pw;
            pw *= rho;
        }
        (v, dv)
    }

    /// `ψ(r), ψ'(r), ψ''(r)` of the truncated series.
    pub fn eval(&self, r: f64) -> crate::testfn::RadialJet {
        let rho = r.powf(self.m);
        let rb = r.powf(self.beta);
        let mut pw = 1.0;
        let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            let g = self.beta + j as f64 * self.m;
            v += c * pw;
            d1 += c * g * pw;
            d2 += c * g * (g - 1.0) * pw;
            pw *= rho;
        }
        crate::testfn::RadialJet {
            value: rb * v,
            d1: rb * d1 / r,
            d2: rb * d2 / (r * r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{mode_residual, psi0, psi1};

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn first_coefficient_reproduces_closed_forms() {
        for n in 2..=6 {
            let nf = n as f64;
            // ψ_1 = r^β/(1+ρ) = r^β (1 - ρ + ρ² - ...)
            let s1 = FrobeniusSeries::regular(1, dim(n), 4);
            for (j, c) in s1.coefficients().iter().enumerate() {
                let expected = if j % 2 == 0 { 1.0 } else { -1.0 };
                assert!((c - expected).abs() < 1e-12, "n={n} j={j} c={c}");
            }
            // ψ_0/(N-1) = (1 - ρ/(N-1))/(1+ρ): c_1 = -N/(N-1)
            let s0 = FrobeniusSeries::regular(0, dim(n), 2);
            assert!((s0.coefficients()[1] + nf / (nf - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn long_series_converges_to_closed_forms() {
        let d = dim(3);
        let s0 = FrobeniusSeries::regular(0, d, 60);
        let s1 = FrobeniusSeries::regular(1, d, 60);
        for &r in &[0.01, 0.1, 0.3] {
            assert!((s0.eval(r).value * 2.0 - psi0(d, r).value).abs() < 1e-13);
            assert!((s1.eval(r).value - psi1(d, r).value).abs() < 1e-13);
        }
    }

    #[test]
    fn truncated_series_residual_is_below_each_retained_term() {
        for n in 2..=6 {
            for k in 0..=6 {
                let d = dim(n);
                let series = FrobeniusSeries::regular(k, d, 2);
                // residual relative to the first correction term's contribution
                let ratio = |r: f64| {
                    let res = mode_residual(k, d, r, series.eval(r)).abs();
                    res / ((series.coefficients()[1] * d.rho(r)).abs() * r.powf(series.beta()) / (r * r))
                };
                let at_rho = |rho: f64| ratio(rho.powf(1.0 / d.rho_exponent()));
                let (coarse, fine) = (at_rho(1e-4), at_rho(1e-5));
                assert!(coarse < 0.2, "n={n} k={k}: {coarse:e}");
                // one more power of ρ is left over
                let order = (coarse / fine).log10();
                assert!((order - 1.0).abs() < 0.05, "n={n} k={k}: {order}");
            }
        }
    }
}
