//! Closed-form time-dependent coefficient functions and the five-coefficient
//! set of the quadratic generator.
//!
//! Coefficients are piecewise (cubic polynomial + sinusoids), evaluated
//! exactly from the stored parameters so the classical integrator and the
//! quantum propagator consume identical inputs with no interpolation error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One sinusoidal term `amp * sin(omega * (t - t_start) + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sinusoid {
    pub amp: f64,
    pub omega: f64,
    #[serde(default)]
    pub phase: f64,
}

/// One piece of a piecewise coefficient, valid from `t_start` until the next
/// segment starts. The polynomial is in powers of `(t - t_start)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub t_start: f64,
    #[serde(default)]
    pub poly: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<Sinusoid>,
}

/// A piecewise closed-form function of time.
///
/// Evaluation picks the segment with the largest `t_start <= t` (the first
/// segment also covers any earlier `t`) and is pure: equal inputs give
/// bit-identical results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoefficientFunction {
    segments: Vec<Segment>,
}

impl CoefficientFunction {
    /// Builds from segments; start times must be strictly increasing and the
    /// polynomial degree is capped at cubic.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::config("segments", "at least one segment required"));
        }
        for pair in segments.windows(2) {
            if !(pair[1].t_start > pair[0].t_start) {
                return Err(Error::config(
                    "segments",
                    format!(
                        "segment start times must be strictly increasing ({} then {})",
                        pair[0].t_start, pair[1].t_start
                    ),
                ));
            }
        }
        for seg in &segments {
            if !seg.t_start.is_finite() {
                return Err(Error::config("segments.t_start", "must be finite"));
            }
            if seg.poly.len() > 4 {
                return Err(Error::config("segments.poly", "at most cubic (4 coefficients)"));
            }
            if seg.poly.iter().any(|c| !c.is_finite()) {
                return Err(Error::config("segments.poly", "coefficients must be finite"));
            }
            if seg.sin.iter().any(|s| ![s.amp, s.omega, s.phase].iter().all(|v| v.is_finite())) {
                return Err(Error::config("segments.sin", "terms must be finite"));
            }
        }
        Ok(Self { segments })
    }

    /// Identically zero.
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(value: f64) -> Self {
        Self { segments: vec![Segment { t_start: 0.0, poly: vec![value], sin: Vec::new() }] }
    }

    /// Single polynomial segment in `(t - t_start)`.
    pub fn polynomial(t_start: f64, coeffs: &[f64]) -> Self {
        Self {
            segments: vec![Segment { t_start, poly: coeffs.to_vec(), sin: Vec::new() }],
        }
    }

    /// `amp * sin(omega * t + phase)` (single segment starting at t = 0).
    pub fn sinusoid(amp: f64, omega: f64, phase: f64) -> Self {
        Self {
            segments: vec![Segment {
                t_start: 0.0,
                poly: Vec::new(),
                sin: vec![Sinusoid { amp, omega, phase }],
            }],
        }
    }

    /// `offset + amp * sin(omega * t + phase)`.
    pub fn offset_sinusoid(offset: f64, amp: f64, omega: f64, phase: f64) -> Self {
        Self {
            segments: vec![Segment {
                t_start: 0.0,
                poly: vec![offset],
                sin: vec![Sinusoid { amp, omega, phase }],
            }],
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Exact evaluation at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let idx = match self.segments.iter().rposition(|s| s.t_start <= t) {
            Some(i) => i,
            None => 0, // before the first start time: extend the first segment
        };
        let seg = &self.segments[idx];
        let u = t - seg.t_start;
        let mut v = 0.0;
        for &c in seg.poly.iter().rev() {
            v = v * u + c;
        }
        for s in &seg.sin {
            v += s.amp * (s.omega * u + s.phase).sin();
        }
        v
    }

    /// True when every stored parameter makes the function identically zero.
    pub fn is_zero(&self) -> bool {
        self.segments.iter().all(|seg| {
            seg.poly.iter().all(|&c| c == 0.0) && seg.sin.iter().all(|s| s.amp == 0.0)
        })
    }
}

/// The five time-dependent coefficients of the quadratic generator
/// `H = a/2 p^2 + b/2 (px + xp) + c/2 x^2 + f p + g x`, plus the turn-on
/// time `t0` at which the shift trajectory starts from zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub a: CoefficientFunction,
    pub b: CoefficientFunction,
    pub c: CoefficientFunction,
    pub f: CoefficientFunction,
    pub g: CoefficientFunction,
    pub t0: f64,
}

impl CoefficientSet {
    /// Free particle of mass `1/a0` with every other coefficient zero.
    pub fn free(a0: f64, t0: f64) -> Self {
        Self {
            a: CoefficientFunction::constant(a0),
            b: CoefficientFunction::zero(),
            c: CoefficientFunction::zero(),
            f: CoefficientFunction::zero(),
            g: CoefficientFunction::zero(),
            t0,
        }
    }

    /// Copy with the linear terms removed: `f = g = 0`, `a, b, c` unchanged.
    pub fn strip_linear(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            f: CoefficientFunction::zero(),
            g: CoefficientFunction::zero(),
            t0: self.t0,
        }
    }

    /// Whether either linear coefficient is structurally nonzero.
    pub fn has_linear_terms(&self) -> bool {
        !(self.f.is_zero() && self.g.is_zero())
    }

    /// The quadratic coefficients only; the moment ODEs never see `f` or `g`.
    pub fn quadratic_part(&self) -> (&CoefficientFunction, &CoefficientFunction, &CoefficientFunction) {
        (&self.a, &self.b, &self.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_polynomial_and_sinusoid() {
        let f = CoefficientFunction::polynomial(1.0, &[2.0, 3.0, 0.5]);
        // 2 + 3u + 0.5u^2 at u = 2
        assert_eq!(f.eval(3.0), 2.0 + 6.0 + 2.0);
        let s = CoefficientFunction::sinusoid(2.0, 3.0, 0.25);
        assert_eq!(s.eval(1.5), 2.0 * (3.0 * 1.5 + 0.25).sin());
    }

    #[test]
    fn eval_picks_segment_and_extends_first() {
        let f = CoefficientFunction::new(vec![
            Segment { t_start: 0.0, poly: vec![1.0], sin: vec![] },
            Segment { t_start: 2.0, poly: vec![5.0, 1.0], sin: vec![] },
        ])
        .unwrap();
        assert_eq!(f.eval(-1.0), 1.0);
        assert_eq!(f.eval(1.9), 1.0);
        assert_eq!(f.eval(2.0), 5.0);
        assert_eq!(f.eval(3.0), 6.0);
    }

    #[test]
    fn eval_is_pure() {
        let f = CoefficientFunction::new(vec![Segment {
            t_start: -0.3,
            poly: vec![0.1, -2.0, 0.7, 0.01],
            sin: vec![Sinusoid { amp: 0.9, omega: 4.2, phase: 1.1 }],
        }])
        .unwrap();
        for k in 0..50 {
            let t = -1.0 + 0.17 * k as f64;
            assert_eq!(f.eval(t).to_bits(), f.eval(t).to_bits());
        }
    }

    #[test]
    fn nonincreasing_segments_rejected() {
        let r = CoefficientFunction::new(vec![
            Segment { t_start: 1.0, poly: vec![1.0], sin: vec![] },
            Segment { t_start: 1.0, poly: vec![2.0], sin: vec![] },
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn strip_linear_zeroes_f_g_only() {
        let set = CoefficientSet {
            a: CoefficientFunction::constant(1.0),
            b: CoefficientFunction::sinusoid(0.1, 2.0, 0.0),
            c: CoefficientFunction::polynomial(0.0, &[0.5, 0.2]),
            f: CoefficientFunction::constant(0.7),
            g: CoefficientFunction::sinusoid(1.0, 1.0, 0.5),
            t0: 0.0,
        };
        let s = set.strip_linear();
        for t in [0.0, 0.3, 2.7] {
            assert_eq!(s.a.eval(t), set.a.eval(t));
            assert_eq!(s.b.eval(t), set.b.eval(t));
            assert_eq!(s.c.eval(t), set.c.eval(t));
            assert_eq!(s.f.eval(t), 0.0);
            assert_eq!(s.g.eval(t), 0.0);
        }
        assert!(!s.has_linear_terms());
        assert!(set.has_linear_terms());
        // idempotent
        assert_eq!(s.strip_linear(), s);
    }

    #[test]
    fn strip_linear_identity_on_h0() {
        let set = CoefficientSet {
            a: CoefficientFunction::constant(1.0),
            b: CoefficientFunction::zero(),
            c: CoefficientFunction::constant(1.0),
            f: CoefficientFunction::zero(),
            g: CoefficientFunction::zero(),
            t0: 0.0,
        };
        assert_eq!(set.strip_linear(), set);
    }
}
