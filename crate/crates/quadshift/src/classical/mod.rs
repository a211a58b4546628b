//! Classical equations of motion, the shift trajectory driven by the linear
//! terms, and the phase accumulators attached to it.
//!
//! The classical system is `dx/dt = a p + b x + f`, `-dp/dt = b p + c x + g`.
//! The shift `(x_bar, p_bar)` is its solution with zero initial data at the
//! turn-on time `t0`; `beta` integrates
//! `d beta/dt = a p_bar^2 / 2 - c x_bar^2 / 2 + f p_bar` and
//! `gamma = p_bar x_bar - beta`.

pub(crate) mod quad;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CoefficientFunction, CoefficientSet};
use quad::adaptive_simpson;

/// Quadrature tolerance for the closed-form shift examples.
const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub x: f64,
    pub p: f64,
    pub t: f64,
}

/// Shift trajectory sample: spatial shift, momentum shift, and the two phase
/// accumulators. `beta + gamma = p_bar * x_bar` holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftState {
    pub x_bar: f64,
    pub p_bar: f64,
    pub beta: f64,
    pub gamma: f64,
    pub t: f64,
}

impl ShiftState {
    pub fn zero(t: f64) -> Self {
        Self { x_bar: 0.0, p_bar: 0.0, beta: 0.0, gamma: 0.0, t }
    }
}

fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], dt: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let mut y2 = *y;
    for i in 0..N {
        y2[i] = y[i] + 0.5 * dt * k1[i];
    }
    let k2 = f(t + 0.5 * dt, &y2);
    for i in 0..N {
        y2[i] = y[i] + 0.5 * dt * k2[i];
    }
    let k3 = f(t + 0.5 * dt, &y2);
    for i in 0..N {
        y2[i] = y[i] + dt * k3[i];
    }
    let k4 = f(t + dt, &y2);
    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Step sizes for covering `[t0, t1]` with full steps of `dt` plus one final
/// partial step so the last sample lands on `t1` exactly.
fn step_sizes(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::config("dt", "must be positive and finite"));
    }
    if !(t1 >= t0) {
        return Err(Error::config("t_span", "end must not precede start"));
    }
    let span = t1 - t0;
    let full = (span / dt).floor() as usize;
    let mut steps = vec![dt; full];
    let rem = span - full as f64 * dt;
    if rem > 1e-12 * dt.max(1.0) {
        steps.push(rem);
    } else if let Some(last) = steps.last_mut() {
        // absorb rounding dust so the final time is exact
        *last += rem;
    }
    Ok(steps)
}

/// Classic fourth-order Runge-Kutta solution of the equations of motion,
/// sampled at every step; the final sample is at `t_span.1` exactly.
pub fn integrate_trajectory(
    coeffs: &CoefficientSet,
    x0: f64,
    p0: f64,
    t_span: (f64, f64),
    dt: f64,
) -> Result<Vec<ClassicalState>> {
    let rhs = |t: f64, y: &[f64; 2]| {
        let (x, p) = (y[0], y[1]);
        [
            coeffs.a.eval(t) * p + coeffs.b.eval(t) * x + coeffs.f.eval(t),
            -(coeffs.b.eval(t) * p + coeffs.c.eval(t) * x + coeffs.g.eval(t)),
        ]
    };
    let mut y = [x0, p0];
    let mut t = t_span.0;
    let mut out = vec![ClassicalState { x: x0, p: p0, t }];
    for h in step_sizes(t_span.0, t_span.1, dt)? {
        y = rk4_step(&rhs, t, &y, h);
        t += h;
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteState { t });
        }
        out.push(ClassicalState { x: y[0], p: y[1], t });
    }
    if let Some(last) = out.last_mut() {
        last.t = t_span.1;
    }
    Ok(out)
}

/// Integrates the joint shift system `(x_bar, p_bar, beta)` from zero initial
/// data at `coeffs.t0`, returning one sample per step.
///
/// `gamma` is taken as `p_bar x_bar - beta`, making the `beta + gamma`
/// identity exact. As an internal guard the closed integral form
/// `beta = p_bar x_bar / 2 + 1/2 int (f p_bar + g x_bar)` is accumulated by
/// trapezoid and must agree with the differential form within 100x the
/// trapezoid error budget `dt^2 (1 + t - t0) (1 + max|f p_bar + g x_bar| + |beta|) / 12`.
pub fn integrate_shift(
    coeffs: &CoefficientSet,
    t_span: (f64, f64),
    dt: f64,
) -> Result<Vec<ShiftState>> {
    if (t_span.0 - coeffs.t0).abs() > 1e-12 {
        return Err(Error::config(
            "t_span",
            format!("shift integration must start at coefficients t0 = {}", coeffs.t0),
        ));
    }
    let rhs = |t: f64, y: &[f64; 3]| {
        let (xb, pb) = (y[0], y[1]);
        let (a, b, c) = (coeffs.a.eval(t), coeffs.b.eval(t), coeffs.c.eval(t));
        let (f, g) = (coeffs.f.eval(t), coeffs.g.eval(t));
        [
            a * pb + b * xb + f,
            -(b * pb + c * xb + g),
            0.5 * a * pb * pb - 0.5 * c * xb * xb + f * pb,
        ]
    };
    let mut y = [0.0_f64; 3];
    let mut t = t_span.0;
    let mut out = vec![ShiftState::zero(t)];
    // trapezoid accumulation of int (f p_bar + g x_bar) dt for the cross-check
    let drive = |t: f64, y: &[f64; 3]| coeffs.f.eval(t) * y[1] + coeffs.g.eval(t) * y[0];
    let mut integral = 0.0;
    let mut prev_drive = drive(t, &y);
    let mut drive_max: f64 = prev_drive.abs();
    for h in step_sizes(t_span.0, t_span.1, dt)? {
        y = rk4_step(&rhs, t, &y, h);
        t += h;
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteState { t });
        }
        let d = drive(t, &y);
        integral += 0.5 * h * (prev_drive + d);
        prev_drive = d;
        drive_max = drive_max.max(d.abs());
        let (x_bar, p_bar, beta) = (y[0], y[1], y[2]);
        let beta_closed = 0.5 * p_bar * x_bar + 0.5 * integral;
        let budget =
            dt * dt * (1.0 + t - t_span.0) * (1.0 + drive_max + beta.abs()) / 12.0;
        let limit = 100.0 * budget + 1e-12;
        let delta = (beta - beta_closed).abs();
        if delta > limit {
            return Err(Error::CrossCheckFailure { t, delta, limit });
        }
        out.push(ShiftState { x_bar, p_bar, beta, gamma: p_bar * x_bar - beta, t });
    }
    if let Some(last) = out.last_mut() {
        last.t = t_span.1;
    }
    Ok(out)
}

/// Closed-form shift for a free particle of mass `m` under a uniform force
/// `-g(t)`: `x_bar = -G1/m`, `p_bar = -G`, `beta = G2/(2m)` with
/// `G = int g`, `G1 = int G`, `G2 = int G^2`, all by adaptive quadrature.
pub fn example1_shift(
    g_fn: &CoefficientFunction,
    m: f64,
    t0: f64,
    t: f64,
) -> Result<(f64, f64, f64)> {
    assert!(m > 0.0, "mass must be positive");
    assert!(t >= t0, "t must not precede t0");
    let inner_tol = QUAD_TOL / (10.0 * (1.0 + t - t0));
    let big_g = |tau: f64| adaptive_simpson(&|s| Ok(g_fn.eval(s)), t0, tau, inner_tol);
    let g_t = big_g(t)?;
    let g1 = adaptive_simpson(&big_g, t0, t, QUAD_TOL)?;
    let g2 = adaptive_simpson(&|tau| Ok(big_g(tau)?.powi(2)), t0, t, QUAD_TOL)?;
    Ok((-g1 / m, -g_t, g2 / (2.0 * m)))
}

/// Closed-form shift for an oscillator of mass `m`, frequency `omega`, under
/// a uniform force `-g(t)`:
/// `x_bar = -S/(m omega)`, `p_bar = -C`,
/// `beta = (S C - int g S) / (2 m omega)` with
/// `S(t) = int g(s) sin(omega (t - s))`, `C(t) = int g(s) cos(omega (t - s))`.
///
/// The sign of `x_bar` follows the classical equations of motion (zero
/// initial data), not the opposite sign printed in the source example.
pub fn example2_shift(
    g_fn: &CoefficientFunction,
    m: f64,
    omega: f64,
    t0: f64,
    t: f64,
) -> Result<(f64, f64, f64)> {
    assert!(m > 0.0 && omega > 0.0, "mass and frequency must be positive");
    assert!(t >= t0, "t must not precede t0");
    let inner_tol = QUAD_TOL / (10.0 * (1.0 + t - t0));
    let s_at = |tau: f64| {
        adaptive_simpson(&|s| Ok(g_fn.eval(s) * (omega * (tau - s)).sin()), t0, tau, inner_tol)
    };
    let s_t = s_at(t)?;
    let c_t =
        adaptive_simpson(&|s| Ok(g_fn.eval(s) * (omega * (t - s)).cos()), t0, t, QUAD_TOL)?;
    let int_gs = adaptive_simpson(&|s| Ok(g_fn.eval(s) * s_at(s)?), t0, t, QUAD_TOL)?;
    let beta = (s_t * c_t - int_gs) / (2.0 * m * omega);
    Ok((-s_t / (m * omega), -c_t, beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CoefficientFunction as Cf;
    use std::f64::consts::{E, PI};

    fn set(a: f64, b: f64, c: f64, f: f64, g: f64) -> CoefficientSet {
        CoefficientSet {
            a: Cf::constant(a),
            b: Cf::constant(b),
            c: Cf::constant(c),
            f: Cf::constant(f),
            g: Cf::constant(g),
            t0: 0.0,
        }
    }

    #[test]
    fn free_motion() {
        let traj = integrate_trajectory(&set(1.0, 0.0, 0.0, 0.0, 0.0), 0.0, 1.0, (0.0, 2.0), 1e-3)
            .unwrap();
        let last = traj.last().unwrap();
        assert_eq!(last.t, 2.0);
        assert!((last.x - 2.0).abs() < 1e-10);
        assert!((last.p - 1.0).abs() < 1e-10);
    }

    #[test]
    fn harmonic_quarter_period() {
        // x = cos t, p = -sin t
        let traj = integrate_trajectory(
            &set(1.0, 0.0, 1.0, 0.0, 0.0),
            1.0,
            0.0,
            (0.0, PI / 2.0),
            1e-3,
        )
        .unwrap();
        let last = traj.last().unwrap();
        assert!(last.x.abs() < 1e-8);
        assert!((last.p + 1.0).abs() < 1e-8);
    }

    #[test]
    fn pure_b_exponentials() {
        let traj = integrate_trajectory(&set(0.0, 1.0, 0.0, 0.0, 0.0), 1.0, 1.0, (0.0, 1.0), 1e-3)
            .unwrap();
        let last = traj.last().unwrap();
        assert!((last.x - E).abs() < 1e-8);
        assert!((last.p - 1.0 / E).abs() < 1e-8);
    }

    #[test]
    fn non_finite_is_reported() {
        // runaway exponential growth overflows quickly with huge b
        let r = integrate_trajectory(&set(0.0, 1e150, 0.0, 0.0, 0.0), 1.0, 1.0, (0.0, 1.0), 0.25);
        assert!(matches!(r, Err(Error::NonFiniteState { .. })));
    }

    #[test]
    fn shift_without_linear_terms_is_zero() {
        let sh = integrate_shift(&set(1.0, 0.2, 0.5, 0.0, 0.0), (0.0, 2.0), 1e-3).unwrap();
        for s in sh {
            assert_eq!(s.x_bar, 0.0);
            assert_eq!(s.p_bar, 0.0);
            assert_eq!(s.beta, 0.0);
            assert_eq!(s.gamma, 0.0);
        }
    }

    #[test]
    fn shift_constant_force() {
        // p_bar = -t, x_bar = -t^2/2, beta = t^3/6, gamma = t^3/3
        let sh = integrate_shift(&set(1.0, 0.0, 0.0, 0.0, 1.0), (0.0, 1.0), 1e-4).unwrap();
        let last = sh.last().unwrap();
        assert!((last.p_bar + 1.0).abs() < 1e-10);
        assert!((last.x_bar + 0.5).abs() < 1e-10);
        assert!((last.beta - 1.0 / 6.0).abs() < 1e-10);
        assert!((last.gamma - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn shift_constant_f_is_pure_translation() {
        let sh = integrate_shift(&set(1.0, 0.0, 0.0, 1.0, 0.0), (0.0, 1.0), 1e-4).unwrap();
        let last = sh.last().unwrap();
        assert!((last.x_bar - 1.0).abs() < 1e-12);
        assert!(last.p_bar.abs() < 1e-12);
        assert!(last.beta.abs() < 1e-12);
        assert!(last.gamma.abs() < 1e-12);
    }

    #[test]
    fn shift_requires_t0_alignment() {
        let r = integrate_shift(&set(1.0, 0.0, 0.0, 0.0, 1.0), (0.5, 1.0), 1e-3);
        assert!(matches!(r, Err(Error::Config { .. })));
    }

    #[test]
    fn example1_constant_force() {
        let g = Cf::constant(1.0);
        let (xb, pb, beta) = example1_shift(&g, 1.0, 0.0, 1.0).unwrap();
        assert!((xb + 0.5).abs() < 1e-11);
        assert!((pb + 1.0).abs() < 1e-11);
        assert!((beta - 1.0 / 6.0).abs() < 1e-11);
    }

    #[test]
    fn example1_zero_force() {
        let g = Cf::zero();
        let (xb, pb, beta) = example1_shift(&g, 1.0, 0.0, 2.0).unwrap();
        assert_eq!((xb, pb, beta), (0.0, 0.0, 0.0));
    }

    #[test]
    fn example1_linear_force_heavier_mass() {
        // g(t) = t, m = 2, t = 2: G = 2, G1 = 4/3, G2 = 8/5
        let g = Cf::polynomial(0.0, &[0.0, 1.0]);
        let (xb, pb, beta) = example1_shift(&g, 2.0, 0.0, 2.0).unwrap();
        assert!((xb + 2.0 / 3.0).abs() < 1e-10);
        assert!((pb + 2.0).abs() < 1e-10);
        assert!((beta - 2.0 / 5.0).abs() < 1e-10);
    }

    #[test]
    fn example2_half_period() {
        // g = 1, m = omega = 1, t = pi: S = 2, C = 0, beta = -pi/2
        let g = Cf::constant(1.0);
        let (xb, pb, beta) = example2_shift(&g, 1.0, 1.0, 0.0, PI).unwrap();
        assert!((xb + 2.0).abs() < 1e-10);
        assert!(pb.abs() < 1e-10);
        assert!((beta + PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn example2_zero_force() {
        let (xb, pb, beta) = example2_shift(&Cf::zero(), 1.0, 1.0, 0.0, 1.7).unwrap();
        assert_eq!((xb, pb, beta), (0.0, 0.0, 0.0));
    }

    #[test]
    fn example2_quarter_period() {
        // g = 1, t = pi/2: S = C = 1, int g S = pi/2 - 1, beta = 1 - pi/4
        let g = Cf::constant(1.0);
        let (xb, pb, beta) = example2_shift(&g, 1.0, 1.0, 0.0, PI / 2.0).unwrap();
        assert!((xb + 1.0).abs() < 1e-10);
        assert!((pb + 1.0).abs() < 1e-10);
        assert!((beta - (1.0 - PI / 4.0)).abs() < 1e-10);
    }

    #[test]
    fn rk4_is_fourth_order() {
        // error ratio when halving dt should be about 16
        let coeffs = CoefficientSet {
            a: Cf::constant(1.0),
            b: Cf::sinusoid(0.3, 1.1, 0.2),
            c: Cf::offset_sinusoid(0.8, 0.3, 0.9, 0.0),
            f: Cf::zero(),
            g: Cf::zero(),
            t0: 0.0,
        };
        let reference =
            integrate_trajectory(&coeffs, 1.0, 0.3, (0.0, 2.0), 1e-4).unwrap().last().unwrap().x;
        let err = |dt: f64| {
            (integrate_trajectory(&coeffs, 1.0, 0.3, (0.0, 2.0), dt).unwrap().last().unwrap().x
                - reference)
                .abs()
        };
        let ratio = err(0.02) / err(0.01);
        let order = ratio.log2();
        assert!(
            (order - 4.0).abs() < 0.3,
            "observed RK4 order {order} (ratio {ratio})"
        );
    }
}
