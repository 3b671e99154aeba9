//! Dormand–Prince 5(4) integrator with Hairer's continuous extension and
//! terminal event location on the dense output.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h})")]
    StepFailure { t: f64, h: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
}

/// Tolerances and step controls.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_init: None, h_max: f64::INFINITY, h_min: 1e-300, max_steps: 1_000_000 }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, ..Self::default() }
    }
}

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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step together with its interpolation coefficients.
#[derive(Debug, Clone)]
pub struct DenseStep<const D: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; D],
    pub y1: [f64; D],
    pub f0: [f64; D],
    pub f1: [f64; D],
    rcont: [[f64; D]; 5],
}

impl<const D: usize> DenseStep<D> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Continuous extension (order 4) inside the step.
    pub fn eval(&self, t: f64) -> [f64; D] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.rcont;
        std::array::from_fn(|i| r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i]))))
    }
}

/// Outcome of an integration: the accepted steps plus the terminal event, if any.
#[derive(Debug, Clone)]
pub struct OdeSolution<const D: usize> {
    pub steps: Vec<DenseStep<D>>,
    pub t_final: f64,
    pub y_final: [f64; D],
    pub event: Option<(f64, [f64; D])>,
}

impl<const D: usize> OdeSolution<D> {
    /// Dense evaluation anywhere in the integrated range.
    pub fn eval(&self, t: f64) -> [f64; D] {
        if self.steps.is_empty() {
            return self.y_final;
        }
        let forward = self.steps[0].h > 0.0;
        let idx = self.steps.partition_point(|s| if forward { s.t1() < t } else { s.t1() > t });
        let step = &self.steps[idx.min(self.steps.len() - 1)];
        step.eval(t)
    }
}

/// Which way an event function must cross zero to fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Any,
    Falling,
    Rising,
}

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end` (either direction), stopping
/// early at the first zero of `event` with the requested crossing sense.
/// A `halt` predicate may end integration without an event (returns with `event = None`).
pub fn integrate<const D: usize, F, G, H>(
    f: F,
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    opts: &OdeOptions,
    mut event: Option<(G, Crossing)>,
    mut halt: H,
) -> Result<OdeSolution<D>, OdeError>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    G: FnMut(f64, &[f64; D]) -> f64,
    H: FnMut(f64, &[f64; D]) -> bool,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut f0 = f(t, &y);
    let err_norm = |e: &[f64; D], ya: &[f64; D], yb: &[f64; D]| -> f64 {
        let mut s = 0.0;
        for i in 0..D {
            let sc = opts.atol + opts.rtol * ya[i].abs().max(yb[i].abs());
            s += (e[i] / sc).powi(2);
        }
        (s / D as f64).sqrt()
    };
    let mut h = match opts.h_init {
        Some(h) => h.abs(),
        None => {
            let d0 = err_norm(&y, &y, &y).max(1e-5);
            let d1 = err_norm(&f0, &y, &y).max(1e-5);
            (0.01 * d0 / d1).min(span)
        }
    }
    .min(opts.h_max)
    .max(opts.h_min);
    let mut steps = Vec::new();
    let mut g_prev = event.as_mut().map(|(g, _)| g(t, &y));
    let mut fac_old: f64 = 1e-4;

    for _ in 0..opts.max_steps {
        if (t - t_end) * dir >= -1e-15 * span.max(1.0) {
            return Ok(OdeSolution { steps, t_final: t, y_final: y, event: None });
        }
        let last = (t + dir * h - t_end) * dir > 0.0;
        let hs = if last { (t_end - t) * dir } else { h };
        let hd = dir * hs;
        let k1 = f0;
        let k2 = f(t + C2 * hd, &axpy(&y, hd, &[(A21, &k1)]));
        let k3 = f(t + C3 * hd, &axpy(&y, hd, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hd, &axpy(&y, hd, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * hd, &axpy(&y, hd, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(t + hd, &axpy(&y, hd, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y1 = axpy(&y, hd, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + hd, &y1);
        let e: [f64; D] =
            std::array::from_fn(|i| hd * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]));
        let finite = y1.iter().chain(k7.iter()).all(|v| v.is_finite());
        let err = if finite { err_norm(&e, &y, &y1) } else { f64::INFINITY };

        if err <= 1.0 {
            // Lund-stabilized step-size controller (as in DOPRI5).
            let fac11 = err.max(1e-300).powf(0.17);
            let fac = (fac11 / fac_old.powf(0.04) / 0.9).clamp(0.1, 5.0);
            fac_old = err.max(1e-4);
            let rc2: [f64; D] = std::array::from_fn(|i| y1[i] - y[i]);
            let rc3: [f64; D] = std::array::from_fn(|i| hd * k1[i] - rc2[i]);
            let rc4: [f64; D] = std::array::from_fn(|i| rc2[i] - hd * k7[i] - rc3[i]);
            let rc5: [f64; D] = std::array::from_fn(|i| {
                hd * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
            });
            let step = DenseStep { t0: t, h: hd, y0: y, y1, f0: k1, f1: k7, rcont: [y, rc2, rc3, rc4, rc5] };
            let t_new = t + hd;
            if let (Some((g, sense)), Some(gp)) = (event.as_mut(), g_prev) {
                let g_new = g(t_new, &y1);
                let fires = match sense {
                    Crossing::Any => gp * g_new <= 0.0 && gp != 0.0,
                    Crossing::Falling => gp > 0.0 && g_new <= 0.0,
                    Crossing::Rising => gp < 0.0 && g_new >= 0.0,
                };
                if fires {
                    let te = locate_root(|tt| g(tt, &step.eval(tt)), t, gp, t_new, g_new);
                    let ye = step.eval(te);
                    steps.push(step);
                    return Ok(OdeSolution { steps, t_final: te, y_final: ye, event: Some((te, ye)) });
                }
                g_prev = Some(g_new);
            }
            steps.push(step);
            t = t_new;
            y = y1;
            f0 = k7;
            if halt(t, &y) {
                return Ok(OdeSolution { steps, t_final: t, y_final: y, event: None });
            }
            h = (hs / fac).min(opts.h_max);
        } else {
            if !finite && hs <= opts.h_min {
                return Err(OdeError::NonFinite { t });
            }
            let shrink = if finite { (err.powf(0.2) / 0.9).clamp(1.0, 10.0) } else { 10.0 };
            h = hs / shrink;
        }
        if h < opts.h_min || h < 1e-15 * t.abs().max(1e-300) {
            return Err(OdeError::StepFailure { t, h });
        }
    }
    Err(OdeError::TooManySteps(opts.max_steps))
}

/// Bracketed root location (Illinois variant of regula falsi, bisection fallback).
fn locate_root<G: FnMut(f64) -> f64>(mut g: G, mut a: f64, mut ga: f64, mut b: f64, mut gb: f64) -> f64 {
    if gb == 0.0 {
        return b;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
        let mut c = (a * gb - b * ga) / (gb - ga);
        if !c.is_finite() || (c - a) * (c - b) >= 0.0 {
            c = 0.5 * (a + b);
        }
        let gc = g(c);
        if gc == 0.0 {
            return c;
        }
        if gc * gb < 0.0 {
            a = b;
            ga = gb;
            b = c;
            gb = gc;
            side = 0;
        } else {
            b = c;
            gb = gc;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    if ga.abs() < gb.abs() {
        a
    } else {
        b
    }
}

/// Convenience wrapper with no event and no halt predicate.
pub fn integrate_plain<const D: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    opts: &OdeOptions,
) -> Result<OdeSolution<D>, OdeError>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    integrate(f, t0, y0, t_end, opts, None::<(fn(f64, &[f64; D]) -> f64, Crossing)>, |_, _| false)
}
