//! Dormand–Prince 5(4) embedded pair for two-component first-order systems.

/// State `[u, u']`.
pub type State = [f64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Error-control settings for the adaptive stepper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Steps never exceed `max_step_ratio * r`; this caps growth near the
    /// singular endpoint where the coefficients blow up.
    pub max_step_ratio: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            rtol: 1e-13,
            atol: 1e-24,
            max_step_ratio: 0.25,
            max_step: 0.5,
            max_steps: 2_000_000,
        }
    }
}

/// One accepted step of the embedded pair.
#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    pub y: State,
    /// Scaled error norm; the step is acceptable when it is `<= 1`.
    pub err: f64,
}

/// Takes a single Dormand–Prince step of size `h` from `(r, y)`.
pub fn dp5_step<F>(f: &F, r: f64, y: &State, h: f64, cfg: &ControllerConfig) -> StepOutcome
where
    F: Fn(f64, &State) -> State,
{
    let k1 = f(r, y);
    let k2 = f(r + C2 * h, &comb(y, h, &[(A21, &k1)]));
    let k3 = f(r + C3 * h, &comb(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = f(r + C4 * h, &comb(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(
        r + C5 * h,
        &comb(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        r + h,
        &comb(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y_new = comb(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(r + h, &y_new);

    let mut err2 = 0.0;
    for i in 0..2 {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
        err2 += (e / sc).powi(2);
    }
    StepOutcome {
        y: y_new,
        err: (err2 / 2.0).sqrt(),
    }
}

fn comb(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Step-size factor after a step with scaled error `err`.
pub fn step_factor(err: f64) -> f64 {
    if err == 0.0 {
        return 5.0;
    }
    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    // harmonic oscillator y'' = -y from (1, 0): exact cos, -sin
    #[test]
    fn fifth_order_convergence() {
        let f = |_r: f64, y: &State| [y[1], -y[0]];
        let cfg = ControllerConfig::default();
        let run = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = [1.0, 0.0];
            for i in 0..n {
                y = dp5_step(&f, i as f64 * h, &y, h, &cfg).y;
            }
            (y[0] - 1f64.cos()).abs()
        };
        let e1 = run(10);
        let e2 = run(20);
        let order = (e1 / e2).log2();
        assert!(order > 4.7, "observed order {order}");
    }

    #[test]
    fn error_estimate_shrinks_with_step() {
        let f = |r: f64, y: &State| [y[1], -y[0] * (1.0 + r)];
        let cfg = ControllerConfig::default();
        let big = dp5_step(&f, 0.0, &[1.0, 0.0], 0.2, &cfg).err;
        let small = dp5_step(&f, 0.0, &[1.0, 0.0], 0.1, &cfg).err;
        assert!(small < big / 16.0);
    }
}
