//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for the
//! eigenvalues and inverse iteration for the eigenvectors.

/// Number of eigenvalues of the tridiagonal `(d, e)` strictly below `x`.
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let qq = if q == 0.0 { f64::EPSILON * (e[i - 1].abs() + 1e-300) } else { q };
        q = d[i] - x - e[i - 1] * e[i - 1] / qq;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin bounds on the spectrum.
pub fn gershgorin(d: &[f64], e: &[f64]) -> (f64, f64) {
    let n = d.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based) by bisection to full precision.
pub fn kth_eigenvalue(d: &[f64], e: &[f64], k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(d, e);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    lo -= 1e-12 * scale;
    hi += 1e-12 * scale;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solve `(T - mu I) x = b` by Gaussian elimination with partial pivoting.
fn shifted_solve(d: &[f64], e: &[f64], mu: f64, b: &mut [f64]) {
    let n = d.len();
    if n == 1 {
        let p = d[0] - mu;
        b[0] /= if p == 0.0 { f64::EPSILON } else { p };
        return;
    }
    // Rows hold (diag, super1, super2) after elimination.
    let mut a0: Vec<f64> = d.iter().map(|v| v - mu).collect();
    let mut a1: Vec<f64> = (0..n).map(|i| if i + 1 < n { e[i] } else { 0.0 }).collect();
    let mut a2 = vec![0.0; n];
    let mut sub: Vec<f64> = e.to_vec();
    let tiny = f64::EPSILON
        * (d.iter().map(|v| v.abs()).fold(0.0, f64::max) + e.iter().map(|v| v.abs()).fold(0.0, f64::max))
            .max(f64::MIN_POSITIVE);
    for i in 0..n - 1 {
        if sub[i].abs() > a0[i].abs() {
            // swap rows i and i+1
            let (r0, r1, r2) = (a0[i], a1[i], a2[i]);
            a0[i] = sub[i];
            a1[i] = a0[i + 1];
            a2[i] = a1[i + 1];
            let next0 = r1;
            let next1 = r2;
            sub[i] = r0;
            a0[i + 1] = next0;
            a1[i + 1] = next1;
            b.swap(i, i + 1);
            let m = sub[i] / a0[i];
            a0[i + 1] -= m * a1[i];
            a1[i + 1] -= m * a2[i];
            b[i + 1] -= m * b[i];
        } else {
            if a0[i] == 0.0 {
                a0[i] = tiny;
            }
            let m = sub[i] / a0[i];
            a0[i + 1] -= m * a1[i];
            b[i + 1] -= m * b[i];
        }
    }
    if a0[n - 1] == 0.0 {
        a0[n - 1] = tiny;
    }
    b[n - 1] /= a0[n - 1];
    b[n - 2] = (b[n - 2] - a1[n - 2] * b[n - 1]) / a0[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - a1[i] * b[i + 1] - a2[i] * b[i + 2]) / a0[i];
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Unit eigenvector for the (accurate) eigenvalue `mu`, orthogonalized against `previous`.
pub fn eigenvector(d: &[f64], e: &[f64], mu: f64, previous: &[Vec<f64>]) -> Vec<f64> {
    let n = d.len();
    // Deterministic, non-degenerate start vector.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64 * 0.7548776662).fract() - 0.5)).collect();
    normalize(&mut v);
    for _ in 0..4 {
        shifted_solve(d, e, mu, &mut v);
        for p in previous {
            let c: f64 = v.iter().zip(p).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
        }
        normalize(&mut v);
    }
    // Fix sign deterministically: largest component positive.
    let imax = (0..n).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0);
    if v[imax] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

/// Apply the tridiagonal matrix.
pub fn matvec(d: &[f64], e: &[f64], x: &[f64]) -> Vec<f64> {
    let n = d.len();
    (0..n)
        .map(|i| {
            let mut s = d[i] * x[i];
            if i > 0 {
                s += e[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += e[i] * x[i + 1];
            }
            s
        })
        .collect()
}
