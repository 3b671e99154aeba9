//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

/// Classical index-3 Lane-Emden problem `θ'' + 2θ'/ξ + θ³ = 0`, `θ(0) = 1`,
/// integrated with fixed-step RK4; returns `(ξ₁, θ'(ξ₁))` at the first zero.
pub fn lane_emden_first_zero_rk4(h: f64) -> (f64, f64) {
    let f = |x: f64, y: [f64; 2]| [y[1], -2.0 * y[1] / x - y[0].powi(3)];
    // Series start: θ = 1 − ξ²/6 + ξ⁴/40 (n = 3 coefficient 3/120).
    let x0 = h;
    let mut x = x0;
    let mut y = [1.0 - x0 * x0 / 6.0 + x0.powi(4) / 40.0, -x0 / 3.0 + x0.powi(3) / 10.0];
    loop {
        let k1 = f(x, y);
        let k2 = f(x + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f(x + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        let yn = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if yn[0] <= 0.0 {
            // Newton on the cubic Hermite interpolant through the last step.
            let (p0, p1, m0, m1) = (y[0], yn[0], y[1] * h, yn[1] * h);
            let mut t = p0 / (p0 - p1);
            for _ in 0..50 {
                let (t2, t3) = (t * t, t * t * t);
                let v = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
                    + (t3 - 2.0 * t2 + t) * m0
                    + (-2.0 * t3 + 3.0 * t2) * p1
                    + (t3 - t2) * m1;
                let d = (6.0 * t2 - 6.0 * t) * p0
                    + (3.0 * t2 - 4.0 * t + 1.0) * m0
                    + (-6.0 * t2 + 6.0 * t) * p1
                    + (3.0 * t2 - 2.0 * t) * m1;
                t -= v / d;
            }
            // θ' at the zero from the interpolant of θ' (Hermite with θ'' from the ODE).
            let s0 = f(x, y)[1] * h;
            let s1 = f(x + h, yn)[1] * h;
            let (q0, q1) = (y[1], yn[1]);
            let (t2, t3) = (t * t, t * t * t);
            let dth = (2.0 * t3 - 3.0 * t2 + 1.0) * q0
                + (t3 - 2.0 * t2 + t) * s0
                + (-2.0 * t3 + 3.0 * t2) * q1
                + (t3 - t2) * s1;
            return (x + t * h, dth);
        }
        y = yn;
        x += h;
    }
}

/// Richardson-extrapolated first zero and slope of the classical problem.
pub fn lane_emden_oracle() -> (f64, f64) {
    let (a1, b1) = lane_emden_first_zero_rk4(2e-3);
    let (a2, b2) = lane_emden_first_zero_rk4(1e-3);
    ((16.0 * a2 - a1) / 15.0, (16.0 * b2 - b1) / 15.0)
}
