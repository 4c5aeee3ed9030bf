//! The explicit Liouville bubble of the N-Laplacian,
//!
//! ```text
//! U(x) = log( C_N / (1 + |x|^{N/(N-1)})^N ),   C_N = N (N^2/(N-1))^{N-1},
//! ```
//!
//! its scaling/translation family `U(λ(x - a)) + N log λ`, and the kernel
//! elements obtained by differentiating that family at `λ = 1, a = 0`.
//!
//! Throughout, `ρ = r^{N/(N-1)}` is the natural radial variable; every
//! closed form below is written in terms of it.

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions};

/// Spatial dimension `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    /// Beyond this the prefactor `(N^2/(N-1))^{N-1}` leaves comfortable f64 range.
    pub const MAX: usize = 64;

    pub fn new(n: usize) -> Result<Self> {
        if (2..=Self::MAX).contains(&n) {
            Ok(Self(n))
        } else {
            Err(Error::InvalidDimension {
                got: n,
                max: Self::MAX,
            })
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// `N/(N-1)`, the exponent in `ρ = r^{N/(N-1)}`.
    pub fn rho_exponent(self) -> f64 {
        let n = self.as_f64();
        n / (n - 1.0)
    }

    /// `N^2/(N-1)`, the prefactor of `|∇U|`.
    pub fn grad_scale(self) -> f64 {
        let n = self.as_f64();
        n * n / (n - 1.0)
    }

    pub fn rho(self, r: f64) -> f64 {
        r.powf(self.rho_exponent())
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

/// Scaling `λ > 0` and translation `a ∈ R^N` of the bubble family.
#[derive(Debug, Clone, PartialEq)]
pub struct BubbleParams {
    lam: f64,
    a: Vec<f64>,
}

impl BubbleParams {
    pub fn new(lam: f64, a: Vec<f64>) -> Result<Self> {
        if !(lam > 0.0 && lam.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lam",
                reason: format!("scaling must be positive and finite, got {lam}"),
            });
        }
        if a.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: "translation must be finite".into(),
            });
        }
        Ok(Self { lam, a })
    }

    /// `λ = 1, a = 0` in dimension `n`.
    pub fn standard(n: Dimension) -> Self {
        Self {
            lam: 1.0,
            a: vec![0.0; n.get()],
        }
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }
}

/// A point of `R^N` with its cached Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacePoint {
    coords: Vec<f64>,
    r: f64,
}

impl SpacePoint {
    pub fn new(coords: Vec<f64>) -> Self {
        let r = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        Self { coords, r }
    }

    pub fn origin(n: Dimension) -> Self {
        Self::new(vec![0.0; n.get()])
    }

    /// `r e_1`.
    pub fn on_axis(n: Dimension, r: f64) -> Self {
        let mut coords = vec![0.0; n.get()];
        coords[0] = r;
        Self::new(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// A radial quantity that has a removable singularity at `r = 0`; when the
/// input was the origin the limiting value is returned and `at_origin` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialValue {
    pub value: f64,
    pub at_origin: bool,
}

pub fn c_constant(n: Dimension) -> f64 {
    let nf = n.as_f64();
    nf * n.grad_scale().powi(n.get() as i32 - 1)
}

/// `Γ(k/2)` for a positive integer `k`.
fn gamma_half_integer(k: usize) -> f64 {
    debug_assert!(k >= 1);
    let (mut g, mut x) = if k.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (std::f64::consts::PI.sqrt(), 0.5)
    };
    let target = k as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area of the unit sphere in `R^d`, `2 π^{d/2} / Γ(d/2)`, for `d >= 1`.
pub(crate) fn unit_sphere_area(d: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / gamma_half_integer(d)
}

/// `ω_{N-1}`, the area of the unit sphere `S^{N-1} ⊂ R^N`.
pub fn sphere_area(n: Dimension) -> f64 {
    unit_sphere_area(n.get())
}

/// `U(r)` for the standard bubble (`λ = 1, a = 0`).
pub fn u_radial(n: Dimension, r: f64) -> f64 {
    c_constant(n).ln() - n.as_f64() * n.rho(r).ln_1p()
}

/// `e^{U(r)} = C_N / (1 + ρ)^N`.
pub fn exp_u(n: Dimension, r: f64) -> f64 {
    c_constant(n) / (1.0 + n.rho(r)).powi(n.get() as i32)
}

/// `U_{λ,a}(x) = U(λ(x - a)) + N log λ`.
pub fn u_value(n: Dimension, p: &BubbleParams, x: &SpacePoint) -> Result<f64> {
    if x.dim() != n.get() || p.a().len() != n.get() {
        return Err(Error::InvalidParameter {
            name: "x",
            reason: format!(
                "point has {} coordinates and translation {}, dimension is {}",
                x.dim(),
                p.a().len(),
                n.get()
            ),
        });
    }
    let dist = x
        .coords()
        .iter()
        .zip(p.a())
        .map(|(xi, ai)| (xi - ai) * (xi - ai))
        .sum::<f64>()
        .sqrt();
    Ok(u_radial(n, p.lam() * dist) + n.as_f64() * p.lam().ln())
}

/// `U'(r) = -(N^2/(N-1)) r^{1/(N-1)} / (1 + ρ)`; negative for every `r > 0`.
pub fn u_radial_derivative(n: Dimension, r: f64) -> RadialValue {
    if r == 0.0 {
        return RadialValue {
            value: 0.0,
            at_origin: true,
        };
    }
    let beta = 1.0 / (n.as_f64() - 1.0);
    RadialValue {
        value: -n.grad_scale() * r.powf(beta) / (1.0 + n.rho(r)),
        at_origin: false,
    }
}

/// `U''(r)`, by differentiating the closed form of `U'`.
pub fn u_radial_second_derivative(n: Dimension, r: f64) -> f64 {
    let nf = n.as_f64();
    let beta = 1.0 / (nf - 1.0);
    let rho = n.rho(r);
    // U'' = -a r^{β-1} [ (1+ρ)/(N-1) - N ρ/(N-1) ] / (1+ρ)^2
    -n.grad_scale() * r.powf(beta - 1.0) * ((1.0 + rho) * beta - n.rho_exponent() * rho) / ((1.0 + rho) * (1.0 + rho))
}

/// `|∇U|^k = (N^2/(N-1))^k r^{k/(N-1)} / (1 + ρ)^k`.
pub fn grad_norm_power(n: Dimension, r: f64, k: i32) -> Result<f64> {
    if r == 0.0 {
        return match k.signum() {
            0 => Ok(1.0),
            1 => Ok(0.0),
            _ => Err(Error::Singular("negative power of |∇U| at r = 0")),
        };
    }
    let beta = 1.0 / (n.as_f64() - 1.0);
    Ok(n.grad_scale().powi(k) * r.powf(k as f64 * beta) / (1.0 + n.rho(r)).powi(k))
}

/// `d/dr |∇U|^k`, the radial component of `∇(|∇U|^k)`:
/// `a^k (k/(N-1)) r^{k/(N-1)-1} (1 + (1-N)ρ) / (1+ρ)^{k+1}`.
pub fn grad_norm_power_derivative(n: Dimension, r: f64, k: i32) -> f64 {
    let nf = n.as_f64();
    let beta = 1.0 / (nf - 1.0);
    let rho = n.rho(r);
    let kf = k as f64;
    n.grad_scale().powi(k) * kf * beta * r.powf(kf * beta - 1.0) * (1.0 + (1.0 - nf) * rho) / (1.0 + rho).powi(k + 1)
}

/// `(r^{N-1} |U'|^{N-2} U')' / r^{N-1} + e^U`, with the flux derivative taken
/// term by term from the closed form. Vanishes up to rounding.
///
/// The two terms of the flux derivative each exceed `e^U` by a factor of
/// about `ρ` and cancel, so they are combined in double-double arithmetic;
/// plain `f64` would leave an error of order `ε ρ e^U`.
pub fn n_laplace_residual(n: Dimension, r: f64) -> f64 {
    let nf = n.as_f64();
    let ni = n.get() as i32;
    // flux F(r) = r^{N-1} |U'|^{N-2} U' = -a^{N-1} r^N / (1+ρ)^{N-1}
    // F'(r) = -a^{N-1} [ N r^{N-1} (1+ρ)^{-(N-1)} - (N-1) r^N (1+ρ)^{-N} ρ'(r) ]
    // and r ρ'(r) = (N/(N-1)) ρ; the common factor r^{N-1} is divided out.
    let rho = TwoFloat::from(n.rho(r));
    let q = rho + 1.0;
    let m = TwoFloat::from(nf) / (nf - 1.0);
    let a = TwoFloat::from(nf * nf) / (nf - 1.0);
    let term_power = q.powi(ni - 1).recip() * nf;
    let term_chain = m * rho * (nf - 1.0) / q.powi(ni);
    let flux_derivative = -(a.powi(ni - 1) * (term_power - term_chain));
    f64::from(flux_derivative) + exp_u(n, r)
}

/// `(ω_{N-1}/N) C_N`, the total mass of every member of the bubble family.
pub fn mass_target(n: Dimension) -> f64 {
    sphere_area(n) / n.as_f64() * c_constant(n)
}

fn compactified_radius(n: Dimension, s: f64) -> (f64, f64) {
    // s = ρ/(1+ρ)  =>  ρ = s/(1-s),  r = ρ^{1/m},  dr/ds = ρ^{1/m - 1} / (m (1-s)^2)
    let m = n.rho_exponent();
    let rho = s / (1.0 - s);
    let r = rho.powf(1.0 / m);
    let dr_ds = rho.powf(1.0 / m - 1.0) / (m * (1.0 - s) * (1.0 - s));
    (r, dr_ds)
}

/// `ω_{N-1} ∫_0^∞ e^{U(r)} r^{N-1} dr`, computed on the compactified variable
/// `s = ρ/(1+ρ) ∈ (0, 1)`. The result is accurate to `tol` relative.
pub fn mass_integral(n: Dimension, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let ni = n.get() as i32;
    let integrand = |s: f64| {
        let (r, dr_ds) = compactified_radius(n, s);
        u_radial(n, r).exp() * r.powi(ni - 1) * dr_ds
    };
    let opts = QuadOptions {
        rel_tol: tol,
        abs_tol: 1e-12,
        ..Default::default()
    };
    let res = quadrature::integrate(integrand, 0.0, 1.0, &opts)?;
    Ok(sphere_area(n) * res.value)
}

/// Mass `∫ e^{U_{λ,a}} dx` of an arbitrary member of the family, computed in
/// polar coordinates about the origin (not about `a`), so that translation and
/// scaling invariance are genuinely exercised. For `a ≠ 0` this is a nested
/// quadrature over `(r, θ)` with `θ` the angle to `a`.
pub fn mass_integral_scaled(n: Dimension, p: &BubbleParams, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if p.a().len() != n.get() {
        return Err(Error::InvalidParameter {
            name: "a",
            reason: format!("translation has {} coordinates, dimension is {}", p.a().len(), n.get()),
        });
    }
    let ni = n.get() as i32;
    let nf = n.as_f64();
    let lam = p.lam();
    let shift = p.a().iter().map(|c| c * c).sum::<f64>().sqrt();
    let log_lam_n = nf * lam.ln();
    let opts = QuadOptions {
        rel_tol: tol,
        abs_tol: 1e-12,
        max_intervals: 4000,
    };
    if shift == 0.0 {
        let integrand = |s: f64| {
            let (r, dr_ds) = compactified_radius(n, s);
            (u_radial(n, lam * r) + log_lam_n).exp() * r.powi(ni - 1) * dr_ds
        };
        let res = quadrature::integrate(integrand, 0.0, 1.0, &opts)?;
        return Ok(sphere_area(n) * res.value);
    }
    let inner_opts = QuadOptions {
        rel_tol: tol * 1e-2,
        abs_tol: 1e-15,
        max_intervals: 4000,
    };
    // An inner failure surfaces as NaN, which the outer rule reports as non-convergence.
    let integrand = |s: f64| {
        let (r, dr_ds) = compactified_radius(n, s);
        let angular = |theta: f64| {
            let d2 = (r * r - 2.0 * r * shift * theta.cos() + shift * shift).max(0.0);
            (u_radial(n, lam * d2.sqrt()) + log_lam_n).exp() * theta.sin().powi(ni - 2)
        };
        match quadrature::integrate(angular, 0.0, std::f64::consts::PI, &inner_opts) {
            Ok(v) => v.value * r.powi(ni - 1) * dr_ds,
            Err(_) => f64::NAN,
        }
    };
    let res = quadrature::integrate(integrand, 0.0, 1.0, &opts)?;
    // ω_{N-2}: measure of the (N-2)-sphere of directions orthogonal to `a`.
    Ok(unit_sphere_area(n.get() - 1) * res.value)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("tolerance must be positive, got {tol}"),
        })
    }
}

/// `Z_0(x) = x·∇U + N = (N/(N-1)) ((N-1) - ρ)/(1 + ρ)`.
pub fn z0(n: Dimension, x: &SpacePoint) -> f64 {
    let nf = n.as_f64();
    let rho = n.rho(x.r());
    nf / (nf - 1.0) * ((nf - 1.0) - rho) / (1.0 + rho)
}

/// `Z_i(x) = ∂U/∂x_i`, for the axis index `1 <= i <= N`.
pub fn zi(n: Dimension, x: &SpacePoint, i: usize) -> Result<f64> {
    if !(1..=n.get()).contains(&i) || x.dim() != n.get() {
        return Err(Error::InvalidParameter {
            name: "i",
            reason: format!("axis index {i} outside 1..={}", n.get()),
        });
    }
    let r = x.r();
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(u_radial_derivative(n, r).value * x.coords()[i - 1] / r)
}

/// The radius `(N-1)^{(N-1)/N}` at which `Z_0` changes sign.
pub fn z0_zero_radius(n: Dimension) -> f64 {
    let nf = n.as_f64();
    (nf - 1.0).powf((nf - 1.0) / nf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn dimension_bounds() {
        assert!(Dimension::new(1).is_err());
        assert!(Dimension::new(0).is_err());
        assert!(Dimension::new(2).is_ok());
        assert!(Dimension::new(Dimension::MAX + 1).is_err());
    }

    #[test]
    fn c_constant_values() {
        assert_eq!(c_constant(dim(2)), 8.0);
        assert!((c_constant(dim(3)) - 60.75).abs() < 1e-12);
        assert!((c_constant(dim(4)) - 16384.0 / 27.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(dim(2)) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(dim(3)) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(dim(4)) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(dim(5)) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!((unit_sphere_area(1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn u_at_origin_and_scaling() {
        let n = dim(2);
        let x0 = SpacePoint::origin(n);
        let u = u_value(n, &BubbleParams::standard(n), &x0).unwrap();
        assert!((u - 8f64.ln()).abs() < 1e-15);
        let p = BubbleParams::new(2.0, vec![0.0, 0.0]).unwrap();
        assert!((u_value(n, &p, &x0).unwrap() - 32f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn u_log_slope_at_infinity() {
        let n = dim(3);
        let slope = (u_radial(n, 1e9) - u_radial(n, 1e8)) / 10f64.ln();
        assert!((slope + 4.5).abs() < 1e-6, "{slope}");
    }

    #[test]
    fn radial_derivative_values() {
        assert!((u_radial_derivative(dim(2), 1.0).value + 2.0).abs() < 1e-15);
        assert!((u_radial_derivative(dim(3), 1.0).value + 2.25).abs() < 1e-15);
        let origin = u_radial_derivative(dim(4), 0.0);
        assert_eq!(origin.value, 0.0);
        assert!(origin.at_origin);
        assert!(u_radial_derivative(dim(4), 1e-12).value.abs() < 1e-3);
    }

    #[test]
    fn grad_norm_power_values() {
        assert!((grad_norm_power(dim(2), 1.0, 2).unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(grad_norm_power(dim(3), 0.0, 1).unwrap(), 0.0);
        assert!((grad_norm_power(dim(3), 1.0, -1).unwrap() - 4.0 / 9.0).abs() < 1e-15);
        assert!(matches!(grad_norm_power(dim(3), 0.0, -1), Err(Error::Singular(_))));
    }

    #[test]
    fn grad_norm_power_derivative_matches_finite_differences() {
        for n in 2..=6 {
            for &k in &[-2, -1, 1, 2, 4] {
                for &r in &[0.3, 1.0, 4.0] {
                    let h = 1e-5 * r;
                    let fd = (grad_norm_power(dim(n), r + h, k).unwrap() - grad_norm_power(dim(n), r - h, k).unwrap()) / (2.0 * h);
                    let an = grad_norm_power_derivative(dim(n), r, k);
                    assert!((fd - an).abs() <= 1e-7 * (1.0 + an.abs()), "n={n} k={k} r={r}: {fd} vs {an}");
                }
            }
        }
    }

    #[test]
    fn second_derivative_matches_finite_differences() {
        for n in 2..=6 {
            for &r in &[0.2, 1.0, 7.0] {
                let h = 1e-5 * r;
                let fd = (u_radial_derivative(dim(n), r + h).value - u_radial_derivative(dim(n), r - h).value) / (2.0 * h);
                let an = u_radial_second_derivative(dim(n), r);
                assert!((fd - an).abs() <= 1e-7 * (1.0 + an.abs()));
            }
        }
    }

    #[test]
    fn residual_vanishes_at_spot_points() {
        for &(n, r, tol) in &[(2, 1.0, 1e-12), (3, 0.5, 1e-10), (5, 10.0, 1e-10)] {
            let res = n_laplace_residual(dim(n), r);
            assert!(res.abs() <= tol * exp_u(dim(n), r), "n={n} r={r} res={res}");
        }
    }

    /// Independent route: fourth-order central differences of the flux
    /// `r^{N-1}|U'|^{N-2}U'` built only from `U'`.
    #[test]
    fn residual_oracle_by_finite_differences() {
        for n in 2..=6 {
            let d = dim(n);
            let flux = |r: f64| r.powi(n as i32 - 1) * grad_norm_power(d, r, n as i32 - 2).unwrap() * u_radial_derivative(d, r).value;
            for &r in &[0.05, 0.5, 1.0, 3.0, 20.0] {
                let h = 1e-3 * r;
                let fd = (-flux(r + 2.0 * h) + 8.0 * flux(r + h) - 8.0 * flux(r - h) + flux(r - 2.0 * h)) / (12.0 * h);
                let lhs = fd / r.powi(n as i32 - 1) + exp_u(d, r);
                assert!(lhs.abs() <= 1e-8 * exp_u(d, r), "n={n} r={r} fd residual {lhs}");
            }
        }
    }

    #[test]
    fn mass_matches_closed_form() {
        assert!((mass_target(dim(2)) - 8.0 * PI).abs() < 1e-12);
        assert!((mass_target(dim(3)) - 81.0 * PI).abs() < 1e-11);
        assert!((mass_target(dim(4)) - 2.0 * PI * PI * 4096.0 / 27.0).abs() < 1e-9);
        for n in 2..=6 {
            let m = mass_integral(dim(n), 1e-12).unwrap();
            assert!((m - mass_target(dim(n))).abs() <= 1e-11 * m, "n={n}: {m}");
        }
    }

    #[test]
    fn mass_rejects_bad_tolerance() {
        assert!(mass_integral(dim(3), 0.0).is_err());
        assert!(mass_integral(dim(3), -1.0).is_err());
    }

    #[test]
    fn kernel_element_values() {
        let n = dim(3);
        assert!((z0(n, &SpacePoint::origin(n)) - 3.0).abs() < 1e-15);
        let r_star = 2f64.powf(2.0 / 3.0);
        assert!(z0(n, &SpacePoint::on_axis(n, r_star)).abs() < 1e-14);
        assert!((z0_zero_radius(n) - r_star).abs() < 1e-15);
        let n2 = dim(2);
        assert!((zi(n2, &SpacePoint::new(vec![1.0, 0.0]), 1).unwrap() + 2.0).abs() < 1e-15);
        assert_eq!(zi(n2, &SpacePoint::origin(n2), 2).unwrap(), 0.0);
        assert!(zi(n2, &SpacePoint::origin(n2), 3).is_err());
        assert!(zi(n2, &SpacePoint::origin(n2), 0).is_err());
    }

    #[test]
    fn z0_is_the_scaling_derivative() {
        // d/dλ U_{λ,0}(x) at λ = 1, by central differences.
        for n in 2..=5 {
            let d = dim(n);
            let x = SpacePoint::new((0..n).map(|i| 0.3 + 0.2 * i as f64).collect());
            let h = 1e-6;
            let up = u_value(d, &BubbleParams::new(1.0 + h, vec![0.0; n]).unwrap(), &x).unwrap();
            let dn = u_value(d, &BubbleParams::new(1.0 - h, vec![0.0; n]).unwrap(), &x).unwrap();
            assert!(((up - dn) / (2.0 * h) - z0(d, &x)).abs() < 1e-8);
        }
    }

    #[test]
    fn params_validation() {
        assert!(BubbleParams::new(0.0, vec![0.0]).is_err());
        assert!(BubbleParams::new(-1.0, vec![0.0]).is_err());
        assert!(BubbleParams::new(1.0, vec![f64::NAN]).is_err());
        let n = dim(2);
        let p = BubbleParams::standard(n);
        assert!(u_value(n, &p, &SpacePoint::new(vec![1.0, 2.0, 3.0])).is_err());
    }
}
