//! Adaptive Dormand–Prince 5(4) integration with dense output.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense output coefficients (Hairer & Wanner, DOPRI5 contd5).
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

pub(crate) struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

/// Integrates `y' = f(x, y)` from `x0` and returns the state at every entry of
/// `outputs` (increasing, all `>= x0`).
pub(crate) fn dopri5<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    x0: f64,
    y0: [f64; N],
    outputs: &[f64],
    tol: &Tolerance,
) -> Result<Vec<[f64; N]>> {
    let mut out = Vec::with_capacity(outputs.len());
    let mut next = 0;
    while next < outputs.len() && outputs[next] <= x0 {
        out.push(y0);
        next += 1;
    }
    let Some(&x_end) = outputs.last() else { return Ok(out) };
    let mut x = x0;
    let mut y = y0;
    let mut h = ((x_end - x0) * 1e-3).min(1e-3);
    let mut k = [[0.0; N]; 7];
    k[0] = f(x, &y);
    let mut steps = 0;
    while next < outputs.len() {
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::IntegrationFailure(format!("step budget exhausted at x = {x}")));
        }
        if h < 1e-14 * x.abs().max(1.0) {
            return Err(Error::IntegrationFailure(format!("step size underflow at x = {x}")));
        }
        h = h.min(x_end - x);
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for i in 0..N {
                    ys[i] += h * A[s][j] * kj[i];
                }
            }
            k[s] = f(x + C[s] * h, &ys);
        }
        let mut y_new = y;
        for i in 0..N {
            y_new[i] += h * (0..7).map(|s| B5[s] * k[s][i]).sum::<f64>();
        }
        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = h * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>();
            let scale = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / scale).abs());
        }
        if !err.is_finite() {
            h *= 0.1;
            continue;
        }
        if err <= 1.0 {
            let k7 = f(x + h, &y_new);
            // Dense output between x and x + h.
            while next < outputs.len() && outputs[next] <= x + h {
                let theta = (outputs[next] - x) / h;
                out.push(interpolate(&y, &y_new, &k, &k7, h, theta));
                next += 1;
            }
            x += h;
            y = y_new;
            k[0] = k7;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok(out)
}

const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];

fn interpolate<const N: usize>(
    y0: &[f64; N],
    y1: &[f64; N],
    k: &[[f64; N]; 7],
    k7: &[f64; N],
    h: f64,
    theta: f64,
) -> [f64; N] {
    let mut out = [0.0; N];
    let t1 = 1.0 - theta;
    for i in 0..N {
        let dy = y1[i] - y0[i];
        let bspl = h * k[0][i] - dy;
        let r4 = h * (0..6).map(|s| D[s] * k[s][i]).sum::<f64>() + h * D[6] * k7[i];
        out[i] = y0[i] + theta * (dy + t1 * (bspl + theta * (dy - h * k7[i] - bspl + t1 * r4)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_with_dense_output() {
        let tol = Tolerance { rtol: 1e-12, atol: 1e-12, max_steps: 100_000 };
        let xs: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1).collect();
        let ys = dopri5(|_, y| [-y[0], y[0]], 0.0, [1.0, 0.0], &xs, &tol).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((y[0] - (-x).exp()).abs() < 1e-10, "{x}: {}", y[0]);
            assert!((y[1] - (1.0 - (-x).exp())).abs() < 1e-10);
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let tol = Tolerance { rtol: 1e-11, atol: 1e-12, max_steps: 100_000 };
        let xs = [1.0, 3.0, 10.0];
        let ys = dopri5(|_, y| [y[1], -y[0]], 0.0, [0.0, 1.0], &xs, &tol).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((y[0] - x.sin()).abs() < 1e-9);
        }
    }
}
