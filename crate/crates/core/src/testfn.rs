//! Smooth functions on `R^N` with closed-form value, gradient and Hessian.
//!
//! Everything the linearized operator consumes goes through [`TestFunction`];
//! no derivative here is approximated numerically.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::bubble::{self, Dimension};

/// Value, gradient and Hessian at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl Jet {
    pub fn zero(n: usize) -> Self {
        Self {
            value: 0.0,
            gradient: DVector::zeros(n),
            hessian: DMatrix::zeros(n, n),
        }
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &Jet) -> Jet {
        Jet {
            value: self.value + t * other.value,
            gradient: &self.gradient + &other.gradient * t,
            hessian: &self.hessian + &other.hessian * t,
        }
    }

    pub fn laplacian(&self) -> f64 {
        self.hessian.trace()
    }
}

pub trait TestFunction: Send + Sync {
    fn jet(&self, x: &[f64]) -> Jet;

    fn value(&self, x: &[f64]) -> f64 {
        self.jet(x).value
    }

    fn gradient(&self, x: &[f64]) -> DVector<f64> {
        self.jet(x).gradient
    }

    fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        self.jet(x).hessian
    }
}

/// `ψ(r), ψ'(r), ψ''(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Lifts a radial profile `h(r)` to `x ↦ h(|x|)`.
///
/// At the origin the gradient is taken as zero and the Hessian as `h''(0) I`,
/// which is only meaningful when `h'(r)/r → h''(0)`.
pub struct Radial<F> {
    profile: F,
}

impl<F: Fn(f64) -> RadialJet + Send + Sync> Radial<F> {
    pub fn new(profile: F) -> Self {
        Self { profile }
    }
}

fn radial_jet(x: &[f64], h: RadialJet) -> Jet {
    let n = x.len();
    let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    if r == 0.0 {
        return Jet {
            value: h.value,
            gradient: DVector::zeros(n),
            hessian: DMatrix::identity(n, n) * h.d2,
        };
    }
    let omega = DVector::from_iterator(n, x.iter().map(|c| c / r));
    let oo = &omega * omega.transpose();
    let hessian = &oo * h.d2 + (DMatrix::identity(n, n) - &oo) * (h.d1 / r);
    Jet {
        value: h.value,
        gradient: omega * h.d1,
        hessian,
    }
}

impl<F: Fn(f64) -> RadialJet + Send + Sync> TestFunction for Radial<F> {
    fn jet(&self, x: &[f64]) -> Jet {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        radial_jet(x, (self.profile)(r))
    }
}

/// The bubble `U` itself, as a function on `R^N`.
pub struct BubbleFunction {
    n: Dimension,
}

impl BubbleFunction {
    pub fn new(n: Dimension) -> Self {
        Self { n }
    }
}

impl TestFunction for BubbleFunction {
    fn jet(&self, x: &[f64]) -> Jet {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let h = RadialJet {
            value: bubble::u_radial(self.n, r),
            d1: bubble::u_radial_derivative(self.n, r).value,
            d2: if r == 0.0 {
                // finite only for N = 2
                if self.n.get() == 2 {
                    -self.n.grad_scale()
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                bubble::u_radial_second_derivative(self.n, r)
            },
        };
        radial_jet(x, h)
    }
}

/// `Z_0 = x·∇U + N`.
pub struct KernelZ0 {
    n: Dimension,
}

impl KernelZ0 {
    pub fn new(n: Dimension) -> Self {
        Self { n }
    }
}

impl TestFunction for KernelZ0 {
    fn jet(&self, x: &[f64]) -> Jet {
        let nf = self.n.as_f64();
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let psi = crate::modes::psi0(self.n, r);
        let c = nf / (nf - 1.0);
        radial_jet(
            x,
            RadialJet {
                value: c * psi.value,
                d1: c * psi.d1,
                d2: c * psi.d2,
            },
        )
    }
}

/// `Z_i = ∂U/∂x_i`, with `axis` in `1..=N`.
pub struct KernelZi {
    n: Dimension,
    axis: usize,
}

impl KernelZi {
    pub fn new(n: Dimension, axis: usize) -> Self {
        assert!((1..=n.get()).contains(&axis), "axis {axis} outside 1..={}", n.get());
        Self { n, axis }
    }
}

impl TestFunction for KernelZi {
    fn jet(&self, x: &[f64]) -> Jet {
        // Z_i = g(r) x_i with g = U'(r)/r = -a r^{β-1}/(1+ρ), β = 1/(N-1).
        let n = x.len();
        let i = self.axis - 1;
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r == 0.0 {
            let mut jet = Jet::zero(n);
            jet.gradient[i] = if self.n.get() == 2 { -self.n.grad_scale() } else { f64::NEG_INFINITY };
            return jet;
        }
        let beta = 1.0 / (self.n.as_f64() - 1.0);
        let rho = self.n.rho(r);
        let m = self.n.rho_exponent();
        let a = self.n.grad_scale();
        let g = -a * r.powf(beta - 1.0) / (1.0 + rho);
        // log-derivative of g: (β-1)/r - ρ'/(1+ρ)
        let drho = m * rho / r;
        let dlog = (beta - 1.0) / r - drho / (1.0 + rho);
        let d2rho = m * (m - 1.0) * rho / (r * r);
        let d2log = -(beta - 1.0) / (r * r) - d2rho / (1.0 + rho) + drho * drho / ((1.0 + rho) * (1.0 + rho));
        let g1 = g * dlog;
        let g2 = g * (d2log + dlog * dlog);
        let xi = x[i];
        let mut grad = DVector::from_iterator(n, x.iter().map(|c| g1 * xi * c / r));
        grad[i] += g;
        let mut hess = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let (xj, xk) = (x[j], x[k]);
                let mut v = (g2 - g1 / r) * xi * xj * xk / (r * r);
                if j == k {
                    v += g1 * xi / r;
                }
                if i == j {
                    v += g1 * xk / r;
                }
                if i == k {
                    v += g1 * xj / r;
                }
                hess[(j, k)] = v;
            }
        }
        Jet {
            value: g * xi,
            gradient: grad,
            hessian: hess,
        }
    }
}

/// `c` everywhere.
pub struct Constant(pub f64);

impl TestFunction for Constant {
    fn jet(&self, x: &[f64]) -> Jet {
        let mut jet = Jet::zero(x.len());
        jet.value = self.0;
        jet
    }
}

/// `Σ_j c_j x^{α_j} · exp(-|x|^2/σ^2)`, the randomized family for operator
/// checks: monomials of total degree at most 3, `σ ∈ {1, 3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPolynomial {
    terms: Vec<(f64, Vec<u32>)>,
    sigma: f64,
}

impl GaussianPolynomial {
    pub const MAX_DEGREE: u32 = 3;

    pub fn new(terms: Vec<(f64, Vec<u32>)>, sigma: f64) -> Self {
        assert!(sigma > 0.0);
        Self { terms, sigma }
    }

    /// One to four random terms with coefficients uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let count = rng.random_range(1..=4);
        let terms = (0..count)
            .map(|_| {
                let coef = rng.random_range(-1.0..=1.0);
                let degree = rng.random_range(0..=Self::MAX_DEGREE);
                let mut alpha = vec![0u32; n];
                for _ in 0..degree {
                    alpha[rng.random_range(0..n)] += 1;
                }
                (coef, alpha)
            })
            .collect();
        let sigma = if rng.random_bool(0.5) { 1.0 } else { 3.0 };
        Self { terms, sigma }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Widens the Gaussian by `factor`, so samples far from the origin are not
    /// evaluated deep in the (subnormal) tail.
    pub fn widened(mut self, factor: f64) -> Self {
        assert!(factor > 0.0);
        self.sigma *= factor;
        self
    }

    fn polynomial_jet(&self, x: &[f64]) -> Jet {
        let n = x.len();
        let mut jet = Jet::zero(n);
        let pw = |xi: f64, e: i64| if e < 0 { 0.0 } else { xi.powi(e as i32) };
        for (c, alpha) in &self.terms {
            let mono = |shift: &dyn Fn(usize) -> i64| -> f64 { (0..n).map(|l| pw(x[l], alpha[l] as i64 - shift(l))).product() };
            jet.value += c * mono(&|_| 0);
            for i in 0..n {
                let ai = alpha[i] as f64;
                if ai > 0.0 {
                    jet.gradient[i] += c * ai * mono(&|l| (l == i) as i64);
                }
                for j in 0..n {
                    let coef = if i == j {
                        ai * (ai - 1.0)
                    } else {
                        ai * alpha[j] as f64
                    };
                    if coef != 0.0 {
                        jet.hessian[(i, j)] += c * coef * mono(&|l| (l == i) as i64 + (l == j) as i64);
                    }
                }
            }
        }
        jet
    }
}

impl TestFunction for GaussianPolynomial {
    fn jet(&self, x: &[f64]) -> Jet {
        let n = x.len();
        let s2 = self.sigma * self.sigma;
        let r2: f64 = x.iter().map(|c| c * c).sum();
        let g = (-r2 / s2).exp();
        let xv = DVector::from_column_slice(x);
        let dg = &xv * (-2.0 / s2 * g);
        let d2g = (&xv * xv.transpose() * (4.0 / (s2 * s2)) - DMatrix::identity(n, n) * (2.0 / s2)) * g;
        let p = self.polynomial_jet(x);
        let cross = &p.gradient * dg.transpose();
        Jet {
            value: p.value * g,
            gradient: &p.gradient * g + &dg * p.value,
            hessian: &p.hessian * g + &cross + cross.transpose() + d2g * p.value,
        }
    }
}

/// Homogeneous harmonic polynomials of degree at most two; restricted to the
/// unit sphere they are spherical harmonics `Y_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarmonicPolynomial {
    One,
    /// `x_i` (0-based axis)
    Linear(usize),
    /// `x_i x_j`, `i != j`
    Product(usize, usize),
    /// `x_i^2 - x_j^2`, `i != j`
    DifferenceOfSquares(usize, usize),
}

impl HarmonicPolynomial {
    pub fn degree(self) -> usize {
        match self {
            Self::One => 0,
            Self::Linear(_) => 1,
            Self::Product(..) | Self::DifferenceOfSquares(..) => 2,
        }
    }

    pub fn jet(self, x: &[f64]) -> Jet {
        let n = x.len();
        let mut jet = Jet::zero(n);
        match self {
            Self::One => jet.value = 1.0,
            Self::Linear(i) => {
                jet.value = x[i];
                jet.gradient[i] = 1.0;
            }
            Self::Product(i, j) => {
                jet.value = x[i] * x[j];
                jet.gradient[i] = x[j];
                jet.gradient[j] = x[i];
                jet.hessian[(i, j)] = 1.0;
                jet.hessian[(j, i)] = 1.0;
            }
            Self::DifferenceOfSquares(i, j) => {
                jet.value = x[i] * x[i] - x[j] * x[j];
                jet.gradient[i] = 2.0 * x[i];
                jet.gradient[j] = -2.0 * x[j];
                jet.hessian[(i, i)] = 2.0;
                jet.hessian[(j, j)] = -2.0;
            }
        }
        jet
    }

    /// `Y(ω) = H(ω)` for a unit vector, i.e. `H(x)/|x|^k`.
    pub fn on_sphere(self, x: &[f64]) -> f64 {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        self.jet(x).value / r.powi(self.degree() as i32)
    }
}

/// `φ(x) = ψ(r) Y(ω) = ψ(r) r^{-k} H(x)`, a single spherical-harmonic mode.
pub struct SeparatedMode<F> {
    profile: F,
    harmonic: HarmonicPolynomial,
}

impl<F: Fn(f64) -> RadialJet + Send + Sync> SeparatedMode<F> {
    pub fn new(profile: F, harmonic: HarmonicPolynomial) -> Self {
        Self { profile, harmonic }
    }
}

impl<F: Fn(f64) -> RadialJet + Send + Sync> TestFunction for SeparatedMode<F> {
    fn jet(&self, x: &[f64]) -> Jet {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let k = self.harmonic.degree() as f64;
        let psi = (self.profile)(r);
        // h(r) = ψ(r) r^{-k}
        let rk = r.powf(-k);
        let h = RadialJet {
            value: psi.value * rk,
            d1: (psi.d1 - k * psi.value / r) * rk,
            d2: (psi.d2 - 2.0 * k * psi.d1 / r + k * (k + 1.0) * psi.value / (r * r)) * rk,
        };
        let hj = radial_jet(x, h);
        let pj = self.harmonic.jet(x);
        let cross = &hj.gradient * pj.gradient.transpose();
        Jet {
            value: hj.value * pj.value,
            gradient: &hj.gradient * pj.value + &pj.gradient * hj.value,
            hessian: &hj.hessian * pj.value + &cross + cross.transpose() + &pj.hessian * hj.value,
        }
    }
}

/// Direction uniform on the sphere, radius log-uniform in `[r_lo, r_hi]`.
pub fn sample_point<R: Rng + ?Sized>(n: usize, r_lo: f64, r_hi: f64, rng: &mut R) -> Vec<f64> {
    let mut dir: Vec<f64> = Vec::with_capacity(n);
    while dir.len() < n {
        // Box–Muller
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random();
        let rad = (-2.0 * u1.ln()).sqrt();
        let ang = 2.0 * std::f64::consts::PI * u2;
        dir.push(rad * ang.cos());
        if dir.len() < n {
            dir.push(rad * ang.sin());
        }
    }
    let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
    let radius = (r_lo.ln() + rng.random::<f64>() * (r_hi / r_lo).ln()).exp();
    dir.iter().map(|c| c / norm * radius).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fd_check(f: &dyn TestFunction, x: &[f64], tol: f64) {
        let n = x.len();
        let h = 1e-5;
        let jet = f.jet(x);
        for i in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let g_fd = (f.value(&xp) - f.value(&xm)) / (2.0 * h);
            assert!((g_fd - jet.gradient[i]).abs() <= tol * (1.0 + jet.gradient[i].abs()), "grad[{i}]: {g_fd} vs {}", jet.gradient[i]);
            let gp = f.gradient(&xp);
            let gm = f.gradient(&xm);
            for j in 0..n {
                let h_fd = (gp[j] - gm[j]) / (2.0 * h);
                assert!(
                    (h_fd - jet.hessian[(i, j)]).abs() <= tol * (1.0 + jet.hessian[(i, j)].abs()),
                    "hess[{i},{j}]: {h_fd} vs {}",
                    jet.hessian[(i, j)]
                );
            }
        }
        assert!((&jet.hessian - jet.hessian.transpose()).amax() < 1e-12);
    }

    #[test]
    fn gaussian_polynomials_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=5 {
            for _ in 0..10 {
                let f = GaussianPolynomial::random(n, &mut rng);
                let x = sample_point(n, 0.1, 2.0, &mut rng);
                fd_check(&f, &x, 1e-6);
            }
        }
    }

    #[test]
    fn bubble_and_kernel_elements_match_finite_differences() {
        for n in 2..=6 {
            let d = Dimension::new(n).unwrap();
            let x: Vec<f64> = (0..n).map(|i| 0.4 - 0.15 * i as f64).collect();
            fd_check(&BubbleFunction::new(d), &x, 1e-6);
            fd_check(&KernelZ0::new(d), &x, 1e-6);
            for axis in 1..=n {
                fd_check(&KernelZi::new(d, axis), &x, 1e-6);
            }
        }
    }

    #[test]
    fn kernel_functions_agree_with_bubble_module() {
        let d = Dimension::new(4).unwrap();
        let x = vec![0.3, -1.2, 0.5, 2.0];
        let p = bubble::SpacePoint::new(x.clone());
        assert!((KernelZ0::new(d).value(&x) - bubble::z0(d, &p)).abs() < 1e-14);
        for i in 1..=4 {
            assert!((KernelZi::new(d, i).value(&x) - bubble::zi(d, &p, i).unwrap()).abs() < 1e-14);
        }
        // Z_i is the i-th component of ∇U
        let grad_u = BubbleFunction::new(d).gradient(&x);
        for i in 1..=4 {
            assert!((KernelZi::new(d, i).value(&x) - grad_u[i - 1]).abs() < 1e-14);
        }
    }

    #[test]
    fn separated_modes_match_finite_differences() {
        let profile = |r: f64| RadialJet {
            value: r * r * (-r).exp(),
            d1: (2.0 * r - r * r) * (-r).exp(),
            d2: (2.0 - 4.0 * r + r * r) * (-r).exp(),
        };
        let x = [0.7, -0.4, 0.9];
        for h in [
            HarmonicPolynomial::One,
            HarmonicPolynomial::Linear(1),
            HarmonicPolynomial::Product(0, 2),
            HarmonicPolynomial::DifferenceOfSquares(0, 1),
        ] {
            fd_check(&SeparatedMode::new(profile, h), &x, 1e-6);
        }
    }

    #[test]
    fn harmonic_polynomials_are_harmonic() {
        let x = [0.3, 1.1, -0.8, 0.2];
        for h in [
            HarmonicPolynomial::One,
            HarmonicPolynomial::Linear(2),
            HarmonicPolynomial::Product(1, 3),
            HarmonicPolynomial::DifferenceOfSquares(0, 3),
        ] {
            assert_eq!(h.jet(&x).laplacian(), 0.0);
        }
    }

    #[test]
    fn sampled_points_respect_radius_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..=6 {
            for _ in 0..100 {
                let x = sample_point(n, 1e-2, 1e2, &mut rng);
                let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                assert!((1e-2 * (1.0 - 1e-12)..=1e2 * (1.0 + 1e-12)).contains(&r));
            }
        }
    }
}
