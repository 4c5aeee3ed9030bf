//! Spherical-harmonic modes of the linearized operator.
//!
//! Writing `φ(x) = ψ(r) Y_k(ω)`, each radial coefficient solves
//!
//! ```text
//! ψ'' + (1 + N(N-2)/((N-1)(1+ρ))) ψ'/r - λ_k/(N-1) ψ/r² + N³/(N-1)² ρ/(1+ρ)² ψ/r² = 0
//! ```
//!
//! with `λ_k = k(k+N-2)`. Multiplying by `p(r) = r^{N-1}|U'|^{N-2}` puts the
//! equation in divergence (Sturm–Liouville) form.

use serde::{Deserialize, Serialize};

use crate::bubble::{self, Dimension};
use crate::testfn::RadialJet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub k: usize,
    pub n: usize,
    pub lambda: f64,
    pub multiplicity: u128,
    pub beta_minus: f64,
    pub beta_plus: f64,
}

impl ModeSpec {
    /// `λ_k/(N-1)`.
    pub fn reduced_lambda(&self) -> f64 {
        self.lambda / (self.n as f64 - 1.0)
    }

    /// Exponent of the growing solution at infinity, `sqrt(λ_k/(N-1))`.
    pub fn exponent_at_infinity(&self) -> f64 {
        self.reduced_lambda().sqrt()
    }
}

pub fn eigenvalue(k: usize, n: Dimension) -> f64 {
    let k = k as f64;
    k * (k + n.as_f64() - 2.0)
}

/// `(2k+N-2)(N+k-3)! / (k!(N-2)!)`; equals 1 for `k = 0`.
pub fn multiplicity(k: usize, n: Dimension) -> u128 {
    let n = n.get() as u128;
    let k = k as u128;
    if k == 0 {
        return 1;
    }
    if n == 2 {
        return 2;
    }
    // (N+k-3)!/(k!(N-2)!) = C(N+k-3, k) / (N-2)
    let mut binom: u128 = 1;
    for j in 1..=k {
        binom = binom * (n - 3 + j) / j;
    }
    (2 * k + n - 2) * binom / (n - 2)
}

/// `p(0) - 1 = N(N-2)/(N-1)`, the linear coefficient of the indicial equation.
fn indicial_linear(n: Dimension) -> f64 {
    let nf = n.as_f64();
    nf * (nf - 2.0) / (nf - 1.0)
}

/// Roots of `β² + β N(N-2)/(N-1) - λ_k/(N-1) = 0`, as `(β_minus, β_plus)`.
pub fn indicial_exponents(k: usize, n: Dimension) -> (f64, f64) {
    let s = indicial_linear(n);
    let c = eigenvalue(k, n) / (n.as_f64() - 1.0);
    let root = (s * s + 4.0 * c).sqrt();
    // cancellation-free form of (-s + root)/2
    let plus = if c == 0.0 { 0.0 } else { 2.0 * c / (root + s) };
    (-(s + root) / 2.0, plus)
}

pub fn mode_spec(k: usize, n: Dimension) -> ModeSpec {
    let (beta_minus, beta_plus) = indicial_exponents(k, n);
    ModeSpec {
        k,
        n: n.get(),
        lambda: eigenvalue(k, n),
        multiplicity: multiplicity(k, n),
        beta_minus,
        beta_plus,
    }
}

/// Coefficients of the expanded mode equation
/// `ψ'' + p(r) ψ'/r + (q_centrifugal + q_potential(r)) ψ/r² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeCoefficients {
    n: Dimension,
    lambda: f64,
}

impl OdeCoefficients {
    pub fn new(k: usize, n: Dimension) -> Self {
        Self {
            n,
            lambda: eigenvalue(k, n),
        }
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    pub fn p_from_rho(&self, rho: f64) -> f64 {
        1.0 + indicial_linear(self.n) / (1.0 + rho)
    }

    pub fn p(&self, r: f64) -> f64 {
        self.p_from_rho(self.n.rho(r))
    }

    pub fn q_centrifugal(&self) -> f64 {
        -self.lambda / (self.n.as_f64() - 1.0)
    }

    pub fn q_potential_from_rho(&self, rho: f64) -> f64 {
        let nf = self.n.as_f64();
        nf.powi(3) / ((nf - 1.0) * (nf - 1.0)) * rho / ((1.0 + rho) * (1.0 + rho))
    }

    pub fn q_potential(&self, r: f64) -> f64 {
        self.q_potential_from_rho(self.n.rho(r))
    }
}

/// `ψ_0(r) = ((N-1) - ρ)/(1 + ρ)`, the radial profile of `Z_0`.
pub fn psi0(n: Dimension, r: f64) -> RadialJet {
    let nf = n.as_f64();
    if r == 0.0 {
        return RadialJet {
            value: nf - 1.0,
            d1: 0.0,
            d2: if n.get() == 2 { -4.0 } else { f64::NEG_INFINITY },
        };
    }
    let m = n.rho_exponent();
    let rho = n.rho(r);
    let q = 1.0 + rho;
    let drho = m * rho / r;
    let d2rho = m * (m - 1.0) * rho / (r * r);
    // ψ_0 = -1 + N/(1+ρ)
    RadialJet {
        value: (nf - 1.0 - rho) / q,
        d1: -nf * drho / (q * q),
        d2: -nf * (d2rho * q - 2.0 * drho * drho) / (q * q * q),
    }
}

/// `ψ_1(r) = r^{1/(N-1)}/(1 + ρ)`, the radial profile of `Z_i`.
pub fn psi1(n: Dimension, r: f64) -> RadialJet {
    let beta = 1.0 / (n.as_f64() - 1.0);
    if r == 0.0 {
        let two = n.get() == 2;
        return RadialJet {
            value: 0.0,
            d1: if two { 1.0 } else { f64::INFINITY },
            d2: if two { 0.0 } else { f64::NEG_INFINITY },
        };
    }
    let m = n.rho_exponent();
    let rho = n.rho(r);
    let q = 1.0 + rho;
    let drho = m * rho / r;
    let d2rho = m * (m - 1.0) * rho / (r * r);
    let value = r.powf(beta) / q;
    let dlog = beta / r - drho / q;
    let d2log = -beta / (r * r) - d2rho / q + drho * drho / (q * q);
    RadialJet {
        value,
        d1: value * dlog,
        d2: value * (d2log + dlog * dlog),
    }
}

fn residual_terms(k: usize, n: Dimension, r: f64, psi: RadialJet) -> [f64; 4] {
    let c = OdeCoefficients::new(k, n);
    let rho = n.rho(r);
    let r2 = r * r;
    [
        psi.d2,
        c.p_from_rho(rho) * psi.d1 / r,
        c.q_centrifugal() * psi.value / r2,
        c.q_potential_from_rho(rho) * psi.value / r2,
    ]
}

/// Left side of the expanded mode equation for mode `k`.
pub fn mode_residual(k: usize, n: Dimension, r: f64, psi: RadialJet) -> f64 {
    residual_terms(k, n, r, psi).iter().sum()
}

/// Sum of absolute values of the terms in [`mode_residual`]; the natural
/// scale against which cancellation in the residual is measured.
pub fn mode_residual_scale(k: usize, n: Dimension, r: f64, psi: RadialJet) -> f64 {
    residual_terms(k, n, r, psi).iter().map(|t| t.abs()).sum()
}

/// `p(r) = r^{N-1} |U'(r)|^{N-2}`, the Sturm–Liouville weight of the
/// divergence form, and its derivative.
pub fn divergence_weight(n: Dimension, r: f64) -> (f64, f64) {
    let ni = n.get() as i32;
    let g = bubble::grad_norm_power(n, r, ni - 2).expect("nonnegative power");
    let dg = bubble::grad_norm_power_derivative(n, r, ni - 2);
    let p = r.powi(ni - 1) * g;
    let dp = (n.as_f64() - 1.0) * r.powi(ni - 2) * g + r.powi(ni - 1) * dg;
    (p, dp)
}

/// `r^{N-3} |U'(r)|^{N-2}`, the weight multiplying `λ_k ψ/(N-1)`.
pub fn centrifugal_weight(n: Dimension, r: f64) -> f64 {
    let ni = n.get() as i32;
    r.powi(ni - 3) * bubble::grad_norm_power(n, r, ni - 2).expect("nonnegative power")
}

pub fn centrifugal_weight_derivative(n: Dimension, r: f64) -> f64 {
    let ni = n.get() as i32;
    let g = bubble::grad_norm_power(n, r, ni - 2).expect("nonnegative power");
    let dg = bubble::grad_norm_power_derivative(n, r, ni - 2);
    (n.as_f64() - 3.0) * r.powi(ni - 4) * g + r.powi(ni - 3) * dg
}

/// Left side of the divergence form
/// `(p ψ')' - λ_k r^{N-3}|U'|^{N-2} ψ/(N-1) + e^U r^{N-1} ψ/(N-1)`.
pub fn divergence_residual(k: usize, n: Dimension, r: f64, psi: RadialJet) -> f64 {
    let nf = n.as_f64();
    let (p, dp) = divergence_weight(n, r);
    let lambda = eigenvalue(k, n);
    p * psi.d2 + dp * psi.d1 - lambda * centrifugal_weight(n, r) * psi.value / (nf - 1.0)
        + bubble::exp_u(n, r) * r.powi(n.get() as i32 - 1) * psi.value / (nf - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn binom(n: u128, k: u128) -> u128 {
        if k > n {
            return 0;
        }
        (1..=k).fold(1, |acc, j| acc * (n - k + j) / j)
    }

    #[test]
    fn mode_spec_examples() {
        let s = mode_spec(1, dim(3));
        assert_eq!(s.lambda, 2.0);
        assert_eq!(s.multiplicity, 3);
        assert!((s.beta_plus - 0.5).abs() < 1e-15);
        for n in 2..=7 {
            let s0 = mode_spec(0, dim(n));
            assert_eq!((s0.lambda, s0.multiplicity, s0.beta_plus), (0.0, 1, 0.0));
            let s1 = mode_spec(1, dim(n));
            assert_eq!(s1.lambda, n as f64 - 1.0);
            assert_eq!(s1.multiplicity, n as u128);
            assert!((s1.beta_plus - 1.0 / (n as f64 - 1.0)).abs() < 1e-14);
        }
        let s2 = mode_spec(2, dim(3));
        assert_eq!((s2.lambda, s2.multiplicity), (6.0, 5));
    }

    #[test]
    fn multiplicities_in_three_dimensions_are_odd_numbers() {
        let m: Vec<u128> = (0..=5).map(|k| multiplicity(k, dim(3))).collect();
        assert_eq!(m, vec![1, 3, 5, 7, 9, 11]);
    }

    /// Independent count: harmonic homogeneous polynomials of degree k have
    /// dimension C(k+N-1, N-1) - C(k+N-3, N-1).
    #[test]
    fn multiplicity_matches_polynomial_dimension_count() {
        for n in 2..=12u128 {
            for k in 0..=20u128 {
                let expected = binom(k + n - 1, n - 1) - if k >= 2 { binom(k + n - 3, n - 1) } else { 0 };
                assert_eq!(multiplicity(k as usize, dim(n as usize)), expected, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn indicial_roots_solve_the_quadratic() {
        for n in 2..=8 {
            for k in 0..=12 {
                let s = mode_spec(k, dim(n));
                let nf = n as f64;
                let lin = nf * (nf - 2.0) / (nf - 1.0);
                for b in [s.beta_minus, s.beta_plus] {
                    let v = b * b + b * lin - s.lambda / (nf - 1.0);
                    assert!(v.abs() < 1e-12 * (1.0 + b * b), "n={n} k={k} β={b}");
                }
                assert!(s.beta_minus <= 0.0 && s.beta_plus >= 0.0);
            }
        }
    }

    #[test]
    fn coefficient_limits() {
        for n in 2..=6 {
            let d = dim(n);
            let nf = n as f64;
            let c = OdeCoefficients::new(0, d);
            assert!((c.p(1e-12) - (nf * nf - nf - 1.0) / (nf - 1.0)).abs() < 1e-9);
            assert!((c.p(1e12) - 1.0).abs() < 1e-9);
            let peak = c.q_potential_from_rho(1.0);
            for &rho in &[0.0, 0.1, 0.5, 0.99, 1.01, 2.0, 50.0] {
                assert!(c.q_potential_from_rho(rho) >= 0.0);
                assert!(c.q_potential_from_rho(rho) <= peak);
            }
        }
    }

    #[test]
    fn closed_form_profiles() {
        for n in 2..=6 {
            let d = dim(n);
            assert_eq!(psi0(d, 0.0).value, n as f64 - 1.0);
            assert!((psi0(d, 1e9).value + 1.0).abs() < 1e-9);
            assert!((psi1(d, 1.0).value - 0.5).abs() < 1e-15);
            assert!((psi1(d, 1e8).value * 1e8 - 1.0).abs() < 1e-6);
        }
    }

    /// Symbolic-differentiation oracle: derivatives of ψ_0, ψ_1 by
    /// fourth-order central differences of the closed-form values.
    #[test]
    fn profile_derivatives_match_finite_differences() {
        for n in 2..=6 {
            let d = dim(n);
            for f in [psi0 as fn(Dimension, f64) -> RadialJet, psi1] {
                for &r in &[0.1, 1.0, 10.0] {
                    let h = 1e-3 * r;
                    let v = |x: f64| f(d, x).value;
                    let d1 = (-v(r + 2.0 * h) + 8.0 * v(r + h) - 8.0 * v(r - h) + v(r - 2.0 * h)) / (12.0 * h);
                    let d2 = (-v(r + 2.0 * h) + 16.0 * v(r + h) - 30.0 * v(r) + 16.0 * v(r - h) - v(r - 2.0 * h)) / (12.0 * h * h);
                    let jet = f(d, r);
                    assert!((jet.d1 - d1).abs() <= 1e-8 * (1.0 + d1.abs()));
                    assert!((jet.d2 - d2).abs() <= 1e-6 * (1.0 + d2.abs()));
                }
            }
        }
    }

    #[test]
    fn closed_forms_solve_their_mode_equations() {
        for n in 2..=6 {
            let d = dim(n);
            for &r in &[0.1, 1.0, 10.0] {
                assert!(mode_residual(0, d, r, psi0(d, r)).abs() < 1e-10, "n={n} r={r}");
                assert!(mode_residual(1, d, r, psi1(d, r)).abs() < 1e-10, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn residuals_for_different_modes_differ_by_the_centrifugal_shift() {
        let d = dim(3);
        let jet = psi0(d, 1.0);
        let diff = mode_residual(1, d, 1.0, jet) - mode_residual(0, d, 1.0, jet);
        // -(λ_1 - λ_0)/(N-1) ψ_0(1) / 1² = -1 · 1/2
        assert!((diff + 0.5).abs() < 1e-14);
        assert!(mode_residual(1, d, 1.0, jet).abs() > 0.4);
    }

    #[test]
    fn divergence_form_examples() {
        let d3 = dim(3);
        assert!(divergence_residual(1, d3, 1.0, psi1(d3, 1.0)).abs() < 1e-10);
        // ratio at n=3, k=2, r=2 with ψ_0 equals r²|U'|
        let r = 2.0;
        let jet = psi0(d3, r);
        let ratio = divergence_residual(2, d3, r, jet) / mode_residual(2, d3, r, jet);
        let expected = r * r * bubble::u_radial_derivative(d3, r).value.abs();
        assert!((ratio - expected).abs() < 1e-12 * expected);
        // constant ψ with k = 0, n = 2 at r = 1: e^U r/(N-1) = 2
        let d2 = dim(2);
        let one = RadialJet { value: 1.0, d1: 0.0, d2: 0.0 };
        assert!((divergence_residual(0, d2, 1.0, one) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn divergence_weight_derivative_matches_finite_differences() {
        for n in 2..=6 {
            let d = dim(n);
            for &r in &[0.05, 0.7, 3.0, 40.0] {
                let h = 1e-5 * r;
                let fd = (divergence_weight(d, r + h).0 - divergence_weight(d, r - h).0) / (2.0 * h);
                let an = divergence_weight(d, r).1;
                assert!((fd - an).abs() <= 1e-7 * an.abs().max(1e-300), "n={n} r={r}");
            }
        }
    }
}
