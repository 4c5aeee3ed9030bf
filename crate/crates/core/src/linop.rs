//! The linearization of `φ ↦ Δ_N φ + e^φ` at the bubble,
//!
//! ```text
//! L(φ) = div(|∇U|^{N-2} ∇φ) + (N-2) div(|∇U|^{N-4} (∇U·∇φ) ∇U) + e^U φ,
//! ```
//!
//! evaluated as the sum of seven explicit terms `A..G`, and its rescaled form
//!
//! ```text
//! |x|²Δφ + N(N-2) (x·∇φ)/(1+ρ) + (N-2) Σ φ_ij x_i x_j + N³/(N-1) ρ/(1+ρ)² φ,
//! ```
//!
//! which is regular at the origin. The two agree up to the positive factor
//! [`weight`].

use serde::{Deserialize, Serialize};

use crate::bubble::{self, Dimension, SpacePoint};
use crate::error::{Error, Result};
use crate::testfn::{BubbleFunction, Jet, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TermTag {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl TermTag {
    pub const ALL: [TermTag; 7] = [Self::A, Self::B, Self::C, Self::D, Self::E, Self::F, Self::G];
}

/// Contractions of the test function's jet with `x` that every term uses.
struct Contractions {
    phi: f64,
    laplacian: f64,
    /// `x·∇φ`
    radial: f64,
    /// `Σ φ_ij x_i x_j`
    radial_hessian: f64,
}

impl Contractions {
    fn new(jet: &Jet, x: &[f64]) -> Self {
        let radial = x.iter().zip(jet.gradient.iter()).map(|(a, b)| a * b).sum();
        let mut radial_hessian = 0.0;
        for (i, xi) in x.iter().enumerate() {
            for (j, xj) in x.iter().enumerate() {
                radial_hessian += jet.hessian[(i, j)] * xi * xj;
            }
        }
        Self {
            phi: jet.value,
            laplacian: jet.laplacian(),
            radial,
            radial_hessian,
        }
    }
}

fn check_point(n: Dimension, x: &SpacePoint) -> Result<()> {
    if x.dim() != n.get() {
        return Err(Error::InvalidParameter {
            name: "x",
            reason: format!("point has {} coordinates, dimension is {}", x.dim(), n.get()),
        });
    }
    Ok(())
}

fn term_from(n: Dimension, c: &Contractions, r: f64, tag: TermTag) -> f64 {
    let nf = n.as_f64();
    if n.get() == 2 && !matches!(tag, TermTag::A | TermTag::G) {
        // every one of B..F carries a factor N - 2
        return 0.0;
    }
    let ni = n.get() as i32;
    let rho = n.rho(r);
    let q = 1.0 + rho;
    let w = n.grad_scale().powi(ni - 2);
    let r_neg = r.powf(-n.rho_exponent());
    let brace1 = 1.0 + (1.0 - nf) * rho;
    let brace2 = (nf - 1.0 + 1.0 / (nf - 1.0)) + (nf - 2.0) * rho;
    match tag {
        TermTag::A => w * r.powf((nf - 2.0) / (nf - 1.0)) / q.powi(ni - 2) * c.laplacian,
        TermTag::B | TermTag::E => w * (nf - 2.0) / (nf - 1.0) * r_neg / q.powi(ni - 1) * brace1 * c.radial,
        TermTag::C => (nf - 2.0) * w * r_neg / q.powi(ni - 1) * brace2 * c.radial,
        TermTag::D => (nf - 2.0) * w * (nf - 4.0) / (nf - 1.0) * r_neg / q.powi(ni - 1) * brace1 * c.radial,
        TermTag::F => (nf - 2.0) * w * r_neg / q.powi(ni - 2) * c.radial_hessian,
        TermTag::G => bubble::c_constant(n) / q.powi(ni) * c.phi,
    }
}

/// One of the seven terms of `L(φ)(x)`. Requires `x ≠ 0`; at the origin use
/// [`regular_form`].
pub fn term(n: Dimension, f: &dyn TestFunction, x: &SpacePoint, tag: TermTag) -> Result<f64> {
    check_point(n, x)?;
    if x.r() == 0.0 {
        return Err(Error::Singular("terms of L use negative powers of |x|; evaluate regular_form at the origin"));
    }
    let c = Contractions::new(&f.jet(x.coords()), x.coords());
    Ok(term_from(n, &c, x.r(), tag))
}

/// All seven terms, in the order of [`TermTag::ALL`].
pub fn terms(n: Dimension, f: &dyn TestFunction, x: &SpacePoint) -> Result<[f64; 7]> {
    check_point(n, x)?;
    if x.r() == 0.0 {
        return Err(Error::Singular("terms of L use negative powers of |x|; evaluate regular_form at the origin"));
    }
    let c = Contractions::new(&f.jet(x.coords()), x.coords());
    Ok(TermTag::ALL.map(|t| term_from(n, &c, x.r(), t)))
}

/// `L(φ)(x) = A + B + C + D + E + F + G`, for `x ≠ 0`.
pub fn apply_linearized(n: Dimension, f: &dyn TestFunction, x: &SpacePoint) -> Result<f64> {
    Ok(terms(n, f, x)?.iter().sum())
}

/// The rescaled operator, regular everywhere including the origin.
pub fn regular_form(n: Dimension, f: &dyn TestFunction, x: &SpacePoint) -> Result<f64> {
    check_point(n, x)?;
    let nf = n.as_f64();
    let r = x.r();
    let rho = n.rho(r);
    let c = Contractions::new(&f.jet(x.coords()), x.coords());
    Ok(r * r * c.laplacian
        + nf * (nf - 2.0) * c.radial / (1.0 + rho)
        + (nf - 2.0) * c.radial_hessian
        + nf.powi(3) / (nf - 1.0) * rho / ((1.0 + rho) * (1.0 + rho)) * c.phi)
}

/// `(N²/(N-1))^{N-2} r^{(N-2)/(N-1) - 2} (1+ρ)^{-(N-2)}`, so that
/// `L(φ) = weight · regular_form(φ)` pointwise.
pub fn weight(n: Dimension, r: f64) -> f64 {
    let nf = n.as_f64();
    let ni = n.get() as i32;
    n.grad_scale().powi(ni - 2) * r.powf((nf - 2.0) / (nf - 1.0) - 2.0) / (1.0 + n.rho(r)).powi(ni - 2)
}

/// `Δ_N g + e^g` from the jet of `g`:
/// `|∇g|^{N-2} Δg + (N-2)|∇g|^{N-4} D²g(∇g, ∇g) + e^g`.
pub fn nonlinear_operator(n: Dimension, g: &Jet) -> Result<f64> {
    Ok(nonlinear_operator_terms(n, g)?.iter().sum())
}

/// The three terms of [`nonlinear_operator`], in the order written there.
pub fn nonlinear_operator_terms(n: Dimension, g: &Jet) -> Result<[f64; 3]> {
    let ni = n.get() as i32;
    let grad_norm = g.gradient.norm();
    let exp = g.value.exp();
    if n.get() == 2 {
        return Ok([g.laplacian(), 0.0, exp]);
    }
    if grad_norm == 0.0 {
        return Err(Error::Singular("Δ_N is not defined by the expanded formula where the gradient vanishes"));
    }
    let quad = (g.gradient.transpose() * &g.hessian * &g.gradient)[(0, 0)];
    Ok([
        grad_norm.powi(ni - 2) * g.laplacian(),
        (n.as_f64() - 2.0) * grad_norm.powi(ni - 4) * quad,
        exp,
    ])
}

/// `(N(U + tφ) - N(U - tφ)) / 2t` at `x`.
pub fn central_difference(n: Dimension, f: &dyn TestFunction, x: &SpacePoint, t_step: f64) -> Result<f64> {
    check_point(n, x)?;
    if !(t_step > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t_step",
            reason: format!("step must be positive, got {t_step}"),
        });
    }
    if x.r() == 0.0 {
        return Err(Error::Singular("the directional derivative check is evaluated away from the origin"));
    }
    let u = BubbleFunction::new(n).jet(x.coords());
    let phi = f.jet(x.coords());
    let plus = nonlinear_operator(n, &u.axpy(t_step, &phi))?;
    let minus = nonlinear_operator(n, &u.axpy(-t_step, &phi))?;
    Ok((plus - minus) / (2.0 * t_step))
}

/// `|central difference of N(U + tφ) - L(φ)|`, which is `O(t_step²)` plus rounding.
pub fn directional_derivative_check(n: Dimension, f: &dyn TestFunction, x: &SpacePoint, t_step: f64) -> Result<f64> {
    let cd = central_difference(n, f, x, t_step)?;
    Ok((cd - apply_linearized(n, f, x)?).abs())
}
