//! WebAssembly bindings for the browser demo. Every export returns a JSON
//! string; the `*_json` functions hold the logic so they run natively too.

use nlk_core::ode_engine::{self, SecondSolutionMethod, SolutionTrajectory, TrajectoryOptions};
use nlk_core::verifier::{self, ModeReport};
use nlk_core::{bubble, modes, BubbleParams, Dimension, SpacePoint};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Points per plotted trajectory; enough for a smooth canvas curve.
const PLOT_POINTS: usize = 600;

#[derive(Serialize)]
struct ProfilePoint {
    r: f64,
    u: f64,
    exp_u: f64,
    z0: f64,
    psi0: f64,
    psi1: f64,
}

#[derive(Serialize)]
struct Profile {
    n: usize,
    lam: f64,
    mass: f64,
    mass_target: f64,
    points: Vec<ProfilePoint>,
}

fn dimension(n: u32) -> Result<Dimension, String> {
    Dimension::new(n as usize).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// `U_λ(r) = U(λr) + N log λ` and friends on a log grid over `[1e-3, 1e3]`.
pub fn bubble_profile_json(n: u32, lam: f64, points: u32) -> Result<String, String> {
    let d = dimension(n)?;
    let params = BubbleParams::new(lam, vec![0.0; d.get()]).map_err(|e| e.to_string())?;
    let count = points.clamp(2, 5000) as usize;
    let points = (0..count)
        .map(|i| {
            let r = 10f64.powf(-3.0 + 6.0 * i as f64 / (count - 1) as f64);
            let x = SpacePoint::on_axis(d, r);
            let u = bubble::u_value(d, &params, &x).expect("dimensions agree");
            // kernel elements of the rescaled bubble are pulled back from the standard one
            let scaled = SpacePoint::on_axis(d, lam * r);
            ProfilePoint {
                r,
                u,
                exp_u: u.exp(),
                z0: bubble::z0(d, &scaled),
                psi0: modes::psi0(d, lam * r).value,
                psi1: modes::psi1(d, lam * r).value,
            }
        })
        .collect();
    let mass = bubble::mass_integral_scaled(d, &params, 1e-10).map_err(|e| e.to_string())?;
    to_json(&Profile {
        n: d.get(),
        lam,
        mass,
        mass_target: bubble::mass_target(d),
        points,
    })
}

#[derive(Serialize)]
struct Curve {
    r: Vec<f64>,
    psi: Vec<f64>,
}

impl Curve {
    fn from(traj: &SolutionTrajectory) -> Self {
        let stride = traj.samples().len().div_ceil(PLOT_POINTS).max(1);
        let thin = traj.thinned(stride);
        Self {
            r: thin.samples().iter().map(|s| s.r).collect(),
            psi: thin.samples().iter().map(|s| s.psi).collect(),
        }
    }
}

#[derive(Serialize)]
struct ModeSolution {
    n: usize,
    k: usize,
    lambda: f64,
    beta_plus: f64,
    exponent_at_infinity: f64,
    regular: Curve,
    second: Option<Curve>,
}

/// The regular radial solution of mode `k` and, for `k ≤ 1`, a second one.
pub fn mode_solution_json(n: u32, k: u32) -> Result<String, String> {
    let d = dimension(n)?;
    let k = k as usize;
    let opts = TrajectoryOptions::default();
    let (lo, hi) = ode_engine::default_range(k, d);
    let regular = ode_engine::integrate_regular(k, d, lo, hi, &opts).map_err(|e| e.to_string())?;
    let second = if k <= 1 {
        let s = ode_engine::second_solution(k, d, SecondSolutionMethod::WronskianLaunch, (lo, hi), &opts).map_err(|e| e.to_string())?;
        Some(Curve::from(&s))
    } else {
        None
    };
    let spec = modes::mode_spec(k, d);
    to_json(&ModeSolution {
        n: d.get(),
        k,
        lambda: spec.lambda,
        beta_plus: spec.beta_plus,
        exponent_at_infinity: spec.exponent_at_infinity(),
        regular: Curve::from(&regular),
        second,
    })
}

/// The verifier's evidence for a single mode.
pub fn verify_mode_json(n: u32, k: u32) -> Result<String, String> {
    let d = dimension(n)?;
    let k = k as usize;
    if k > ode_engine::K_MAX_SUPPORTED {
        return Err(format!("k must be at most {}", ode_engine::K_MAX_SUPPORTED));
    }
    let tol = nlk_core::Tolerances::default();
    let report: ModeReport = match k {
        0 => verifier::verify_mode0(d, &tol),
        1 => verifier::verify_mode1(d, &tol),
        _ => verifier::verify_higher_mode(k, d, &tol),
    };
    to_json(&report)
}

#[wasm_bindgen]
pub fn bubble_profile(n: u32, lam: f64, points: u32) -> Result<String, JsError> {
    bubble_profile_json(n, lam, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn mode_solution(n: u32, k: u32) -> Result<String, JsError> {
    mode_solution_json(n, k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn verify_mode(n: u32, k: u32) -> Result<String, JsError> {
    verify_mode_json(n, k).map_err(|e| JsError::new(&e))
}
