//! Dormand–Prince 5(4) embedded pair.

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
// fifth-order weights, also the last stage row (FSAL)
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
// B minus the embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub(crate) type State = [f64; 2];

pub(crate) struct StepResult {
    pub y: State,
    pub error: State,
    /// derivative at the new point (first stage of the next step)
    pub f_new: State,
}

fn combine(y: &State, h: f64, ks: &[State], coefs: &[f64]) -> State {
    let mut out = *y;
    for (k, c) in ks.iter().zip(coefs) {
        if *c != 0.0 {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
    }
    out
}

/// One trial step from `(t, y)` with derivative `f0 = rhs(t, y)`.
pub(crate) fn step<F: Fn(f64, &State) -> State>(rhs: &F, t: f64, y: &State, f0: State, h: f64) -> StepResult {
    let mut k = [[0.0; 2]; 7];
    k[0] = f0;
    k[1] = rhs(t + C[1] * h, &combine(y, h, &k[..1], &A2));
    k[2] = rhs(t + C[2] * h, &combine(y, h, &k[..2], &A3));
    k[3] = rhs(t + C[3] * h, &combine(y, h, &k[..3], &A4));
    k[4] = rhs(t + C[4] * h, &combine(y, h, &k[..4], &A5));
    k[5] = rhs(t + C[5] * h, &combine(y, h, &k[..5], &A6));
    let y_new = combine(y, h, &k[..6], &B[..6]);
    k[6] = rhs(t + h, &y_new);
    let mut error = [0.0; 2];
    for (kk, e) in k.iter().zip(E) {
        error[0] += h * e * kk[0];
        error[1] += h * e * kk[1];
    }
    StepResult {
        y: y_new,
        error,
        f_new: k[6],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_consistent() {
        assert!((B.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(E.iter().sum::<f64>().abs() < 1e-15);
        for (row, c) in [&A2[..], &A3, &A4, &A5, &A6].iter().zip(&C[1..]) {
            assert!((row.iter().sum::<f64>() - c).abs() < 1e-14);
        }
    }

    #[test]
    fn fifth_order_on_a_linear_oscillator() {
        // y'' = -y, exact solution (cos, -sin)
        let rhs = |_t: f64, y: &State| [y[1], -y[0]];
        let run = |h: f64| {
            let mut y = [1.0, 0.0];
            let mut t = 0.0;
            while t < 1.0 - 1e-12 {
                y = step(&rhs, t, &y, rhs(t, &y), h).y;
                t += h;
            }
            (y[0] - 1f64.cos()).abs()
        };
        let ratio = run(0.1) / run(0.05);
        assert!(ratio > 25.0 && ratio < 40.0, "ratio {ratio}");
    }
}
