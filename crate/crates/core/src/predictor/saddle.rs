//! The integrals `F_p`, `G_p` and the saddle-point equations built on them.
//!
//! `F_p(a, b) = int_0^1 x^p sigma(b - a x) dx` and
//! `G_p(a, b) = int_0^1 x^p sigma(b - a x) sigma(a x - b) dx`
//! with `sigma` the logistic function. `dF_p/db = G_p`, `dF_p/da = -G_{p+1}`.

use super::quad::integrate;
use crate::{Error, Result};

pub const QUAD_TOL: f64 = 1e-12;

pub(crate) fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub fn f_p(p: i32, a: f64, b: f64) -> f64 {
    integrate(|x| x.powi(p) * logistic(b - a * x), 0.0, 1.0, QUAD_TOL)
}

pub fn g_p(p: i32, a: f64, b: f64) -> f64 {
    integrate(
        |x| {
            let s = logistic(b - a * x);
            x.powi(p) * s * (1.0 - s)
        },
        0.0,
        1.0,
        QUAD_TOL,
    )
}

/// `int_0^1 log(1 + e^{b - a x}) dx`.
pub fn softplus_integral(a: f64, b: f64) -> f64 {
    integrate(|x| softplus(b - a * x), 0.0, 1.0, QUAD_TOL)
}

const A_LIMIT: f64 = 1e7;

/// Root of `F_1(a, 0) = tau` for `tau in (0, 1/2)`.
pub fn solve_a(tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 0.5) {
        return Err(Error::Domain(format!("tau = {tau} outside (0, 1/2)")));
    }
    let g = |a: f64| f_p(1, a, 0.0) - tau;
    if tau == 0.25 {
        return Ok(0.0);
    }
    // F_1(., 0) decreases from 1/2 to 0
    let (mut lo, mut hi) = if tau < 0.25 { (0.0, 1.0) } else { (-1.0, 0.0) };
    if tau < 0.25 {
        while g(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > A_LIMIT {
                return Err(Error::Domain(format!("tau = {tau} too close to 0")));
            }
        }
    } else {
        while g(lo) < 0.0 {
            hi = lo;
            lo *= 2.0;
            if lo < -A_LIMIT {
                return Err(Error::Domain(format!("tau = {tau} too close to 1/2")));
            }
        }
    }
    bracketed_root(g, lo, hi, 1e-13)
}

/// Root of a decreasing or increasing `g` on `[lo, hi]` with a sign change,
/// using secant steps that fall back to bisection when they leave the bracket.
fn bracketed_root<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, ftol: f64) -> Result<f64> {
    let mut glo = g(lo);
    let mut ghi = g(hi);
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::NoConvergence("root not bracketed".into()));
    }
    let mut bisect_next = false;
    for _ in 0..200 {
        let secant = hi - ghi * (hi - lo) / (ghi - glo);
        let mid = 0.5 * (lo + hi);
        let x = if bisect_next || !(secant > lo && secant < hi) {
            mid
        } else {
            secant
        };
        let gx = g(x);
        if gx.abs() <= ftol || (hi - lo).abs() <= 1e-15 * (1.0 + x.abs()) {
            return Ok(x);
        }
        let old_width = hi - lo;
        if gx.signum() == glo.signum() {
            lo = x;
            glo = gx;
        } else {
            hi = x;
            ghi = gx;
        }
        // force a bisection when a secant step shrank the bracket too little
        bisect_next = (hi - lo) > 0.5 * old_width;
    }
    Err(Error::NoConvergence(
        "bracketed root did not converge".into(),
    ))
}

/// Admissible `(tau, r)`: `r in (0, 1)` and `r^2/2 < tau < r - r^2/2`.
pub fn ab_domain_contains(tau: f64, r: f64) -> bool {
    r > 0.0 && r < 1.0 && tau > 0.5 * r * r && tau < r - 0.5 * r * r
}

/// Joint root of `F_0(a, b) = r`, `F_1(a, b) = tau`.
pub fn solve_ab(tau: f64, r: f64) -> Result<(f64, f64)> {
    if !ab_domain_contains(tau, r) {
        return Err(Error::NoConvergence(format!(
            "(tau, r) = ({tau}, {r}) outside the solvable region"
        )));
    }
    let b0 = (r / (1.0 - r)).ln();
    let t0 = 0.5 * r;
    if tau == t0 {
        return Ok((0.0, b0));
    }
    // continuation in tau from the analytic point at tau = r/2
    let mut ab = (0.0, b0);
    let mut t_done = t0;
    let mut step = (tau - t0) / 4.0;
    while t_done != tau {
        let t_next = if (tau - t_done).abs() <= step.abs() {
            tau
        } else {
            t_done + step
        };
        match newton_ab(t_next, r, ab) {
            Ok(next) => {
                ab = next;
                t_done = t_next;
                step *= 1.5;
            }
            Err(e) => {
                step *= 0.25;
                if step.abs() < 1e-12 {
                    return Err(e);
                }
            }
        }
    }
    Ok(ab)
}

fn residual(tau: f64, r: f64, a: f64, b: f64) -> (f64, f64) {
    (f_p(0, a, b) - r, f_p(1, a, b) - tau)
}

fn newton_ab(tau: f64, r: f64, start: (f64, f64)) -> Result<(f64, f64)> {
    let (mut a, mut b) = start;
    let (mut r0, mut r1) = residual(tau, r, a, b);
    let mut norm = r0.hypot(r1);
    for _ in 0..100 {
        if norm <= 1e-12 {
            return Ok((a, b));
        }
        let (g0, g1, g2) = (g_p(0, a, b), g_p(1, a, b), g_p(2, a, b));
        // J = [[-G1, G0], [-G2, G1]] in (a, b)
        let det = -g1 * g1 + g0 * g2;
        if det.abs() < 1e-300 || !det.is_finite() {
            break;
        }
        let da = (g1 * r0 - g0 * r1) / det;
        let db = (g2 * r0 - g1 * r1) / det;
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-6 {
            let (na, nb) = (a - lambda * da, b - lambda * db);
            let (s0, s1) = residual(tau, r, na, nb);
            let n = s0.hypot(s1);
            if n.is_finite() && n < norm {
                a = na;
                b = nb;
                r0 = s0;
                r1 = s1;
                norm = n;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm <= 1e-10 {
        Ok((a, b))
    } else {
        Err(Error::NoConvergence(format!(
            "Newton stalled at residual {norm:e} for (tau, r) = ({tau}, {r})"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_forms_at_origin() {
        assert!((f_p(1, 0.0, 0.0) - 0.25).abs() < 1e-14);
        assert!((f_p(0, 0.0, 0.0) - 0.5).abs() < 1e-14);
        assert!((g_p(2, 0.0, 0.0) - 1.0 / 12.0).abs() < 1e-14);
        assert!((softplus_integral(0.0, 0.0) - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn derivative_identities() {
        let (a, b, h) = (1.3, -0.4, 1e-5);
        for p in 0..2 {
            let db = (f_p(p, a, b + h) - f_p(p, a, b - h)) / (2.0 * h);
            let da = (f_p(p, a + h, b) - f_p(p, a - h, b)) / (2.0 * h);
            assert!((db - g_p(p, a, b)).abs() < 1e-8);
            assert!((da + g_p(p + 1, a, b)).abs() < 1e-8);
        }
    }

    #[test]
    fn solve_a_points() {
        assert_eq!(solve_a(0.25).unwrap(), 0.0);
        let a = solve_a(0.3).unwrap();
        assert!(a < 0.0);
        assert!((f_p(1, a, 0.0) - 0.3).abs() <= 1e-10);
        assert!(solve_a(0.0).is_err());
        assert!(solve_a(0.5).is_err());
        let a = solve_a(1e-4).unwrap();
        assert!((f_p(1, a, 0.0) - 1e-4).abs() <= 1e-10);
    }

    #[test]
    fn solve_ab_points() {
        let (a, b) = solve_ab(0.25, 0.5).unwrap();
        assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        let r: f64 = 0.1;
        let (a, b) = solve_ab(0.05, r).unwrap();
        assert!(a.abs() < 1e-12);
        assert!((b - (r / (1.0 - r)).ln()).abs() < 1e-12);
        assert!(solve_ab(0.001, 0.1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn solve_a_residual(tau in 0.01f64..0.49) {
            let a = solve_a(tau).unwrap();
            prop_assert!((f_p(1, a, 0.0) - tau).abs() <= 1e-10);
        }

        #[test]
        fn solve_ab_residual(r in 0.05f64..0.95, frac in 0.1f64..0.9) {
            let lo = 0.5 * r * r;
            let hi = r - 0.5 * r * r;
            let tau = lo + frac * (hi - lo);
            let (a, b) = solve_ab(tau, r).unwrap();
            prop_assert!((f_p(0, a, b) - r).abs() <= 1e-9);
            prop_assert!((f_p(1, a, b) - tau).abs() <= 1e-9);
        }

        #[test]
        fn f_decreasing_in_a(a in -20.0f64..20.0, b in -3.0f64..3.0) {
            for p in 0..3 {
                prop_assert!(f_p(p, a + 0.5, b) < f_p(p, a, b));
            }
        }
    }
}
