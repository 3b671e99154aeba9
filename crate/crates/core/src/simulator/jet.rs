//! Truncated Taylor series in frame time, used to generate higher time
//! derivatives of a solution from the evolution equation itself.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of Taylor coefficients carried (enough for `∂ₛ⁵`).
pub const JET_LEN: usize = 6;

/// Arithmetic shared by plain numbers and jets, so the pointwise
/// nonlinearity is written once.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn constant(x: f64) -> Self;
    fn value(&self) -> f64;
    fn powf(self, p: f64) -> Self;
}

impl Scalar for f64 {
    fn constant(x: f64) -> Self {
        x
    }

    fn value(&self) -> f64 {
        *self
    }

    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
}

/// `Σ cₘ σᵐ`, truncated after [`JET_LEN`] terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [f64; JET_LEN]);

impl Jet {
    pub fn zero() -> Self {
        Self([0.0; JET_LEN])
    }
}

impl Add for Jet {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.0.iter_mut().zip(rhs.0).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for Jet {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.0.iter_mut().zip(rhs.0).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Neg for Jet {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.0.iter_mut().for_each(|a| *a = -*a);
        self
    }
}

impl Mul for Jet {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = [0.0; JET_LEN];
        for (n, o) in out.iter_mut().enumerate() {
            *o = (0..=n).map(|k| self.0[k] * rhs.0[n - k]).sum();
        }
        Self(out)
    }
}

impl Div for Jet {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let mut out = [0.0; JET_LEN];
        for n in 0..JET_LEN {
            let acc: f64 = (1..=n).map(|k| rhs.0[k] * out[n - k]).sum();
            out[n] = (self.0[n] - acc) / rhs.0[0];
        }
        Self(out)
    }
}

impl Add<f64> for Jet {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.0[0] += rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        self.0.iter_mut().for_each(|a| *a *= rhs);
        self
    }
}

impl Scalar for Jet {
    fn constant(x: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = x;
        Self(c)
    }

    fn value(&self) -> f64 {
        self.0[0]
    }

    /// Power of a series with nonzero constant term, by the classical
    /// recurrence `n f₀ gₙ = Σₖ (p k − (n − k)) fₖ gₙ₋ₖ`.
    fn powf(self, p: f64) -> Self {
        let f = self.0;
        let mut g = [0.0; JET_LEN];
        g[0] = f[0].powf(p);
        for n in 1..JET_LEN {
            let s: f64 = (1..=n).map(|k| (p * k as f64 - (n - k) as f64) * f[k] * g[n - k]).sum();
            g[n] = s / (n as f64 * f[0]);
        }
        Self(g)
    }
}
