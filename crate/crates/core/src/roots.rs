//! Small root finders used by the equilibrium solvers.

use crate::math::abs;

/// Bisection on `[lo, hi]` for a function whose sign differs at the ends.
///
/// Returns `None` when the endpoints do not bracket a root. Stops when the
/// bracket is narrower than `tol` or after `max_iter` halvings.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || (f_lo > 0.0) == (f_hi > 0.0) {
        return None;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            return Some(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonSettings {
    /// Stop when the residual ∞-norm drops below this.
    pub tolerance: f64,
    pub max_iter: usize,
    /// Relative finite-difference step for the Jacobian.
    pub fd_step: f64,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings {
            tolerance: 1e-13,
            max_iter: 200,
            fd_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOutcome {
    pub x: [f64; 2],
    pub residual: f64,
    pub iterations: usize,
}

fn norm(r: [f64; 2]) -> f64 {
    abs(r[0]).max(abs(r[1]))
}

/// Damped Newton for a 2×2 system with a forward-difference Jacobian.
///
/// `residual` returns `None` outside its domain; a step is halved until it
/// lands inside the domain and reduces the residual norm. Returns the best
/// point reached, which may not meet the tolerance.
pub fn newton2<F>(residual: F, start: [f64; 2], settings: NewtonSettings) -> Option<NewtonOutcome>
where
    F: Fn([f64; 2]) -> Option<[f64; 2]>,
{
    let mut x = start;
    let mut r = residual(x)?;
    let mut r_norm = norm(r);
    let mut iterations = 0;
    while iterations < settings.max_iter && r_norm > settings.tolerance {
        iterations += 1;
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let h = settings.fd_step * abs(x[k]).max(1e-8);
            let mut xh = x;
            xh[k] += h;
            let rh = residual(xh)?;
            jac[0][k] = (rh[0] - r[0]) / h;
            jac[1][k] = (rh[1] - r[1]) / h;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let step = [
            (r[0] * jac[1][1] - r[1] * jac[0][1]) / det,
            (r[1] * jac[0][0] - r[0] * jac[1][0]) / det,
        ];
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = [x[0] - lambda * step[0], x[1] - lambda * step[1]];
            if let Some(rt) = residual(trial) {
                let nt = norm(rt);
                if nt < r_norm {
                    x = trial;
                    r = rt;
                    r_norm = nt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Some(NewtonOutcome {
        x,
        residual: r_norm,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt_two() {
        let root = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((root - core::f64::consts::SQRT_2).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_none());
    }

    #[test]
    fn newton_solves_a_coupled_system() {
        // x² + y² = 4, x = y  →  x = y = √2
        let out = newton2(
            |v| Some([v[0] * v[0] + v[1] * v[1] - 4.0, v[0] - v[1]]),
            [1.0, 0.5],
            NewtonSettings::default(),
        )
        .unwrap();
        assert!(out.residual < 1e-12);
        assert!((out.x[0] - core::f64::consts::SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn newton_respects_domain() {
        // √x + y = 3, y = 1; only valid for x >= 0
        let out = newton2(
            |v| (v[0] >= 0.0).then(|| [libm::sqrt(v[0]) + v[1] - 3.0, v[1] - 1.0]),
            [0.01, 0.0],
            NewtonSettings::default(),
        )
        .unwrap();
        assert!((out.x[0] - 4.0).abs() < 1e-8, "{:?}", out);
    }
}
