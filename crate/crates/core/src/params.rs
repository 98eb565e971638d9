//! Problem parameters, the admissible power window and the frequency scaling.

use thiserror::Error;

/// Upper end of the admissible power window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalExponent {
    Finite(f64),
    Unbounded,
}

impl CriticalExponent {
    /// `true` when `p` lies strictly below the critical exponent.
    pub fn admits(&self, p: f64) -> bool {
        match *self {
            CriticalExponent::Finite(c) => p < c,
            CriticalExponent::Unbounded => p.is_finite(),
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            CriticalExponent::Finite(c) => c,
            CriticalExponent::Unbounded => f64::INFINITY,
        }
    }
}

/// `2d / (d - 2(1-a))`, or [`CriticalExponent::Unbounded`] when the
/// denominator is not positive.
pub fn critical_exponent(d: u32, a: f64) -> CriticalExponent {
    let denom = d as f64 - 2.0 * (1.0 - a);
    if denom > 0.0 {
        CriticalExponent::Finite(2.0 * d as f64 / denom)
    } else {
        CriticalExponent::Unbounded
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("dimension d = {d} is below the minimum 2")]
    DimensionTooSmall { d: u32 },
    #[error("weight exponent a = {a} is outside {allowed}")]
    WeightOutOfRange { a: f64, allowed: &'static str },
    #[error("frequency omega = {omega} must be positive")]
    NonpositiveOmega { omega: f64 },
    #[error("power p = {p} is outside the open window (2, {upper})")]
    PowerOutOfWindow { p: f64, upper: f64 },
}

/// `(d, a, omega, p)` for `-div(|x|^{2a} grad u) + omega u = u^{p-1}` in `R^d`.
///
/// `oracle_mode` admits the non-degenerate case `a = 0`, used as a
/// reference problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub d: u32,
    pub a: f64,
    pub omega: f64,
    pub p: f64,
    pub oracle_mode: bool,
}

impl ProblemParams {
    pub fn new(d: u32, a: f64, omega: f64, p: f64) -> Self {
        ProblemParams {
            d,
            a,
            omega,
            p,
            oracle_mode: false,
        }
    }

    /// Parameters with `oracle_mode` set, so that `a = 0` validates.
    pub fn oracle(d: u32, a: f64, omega: f64, p: f64) -> Self {
        ProblemParams {
            oracle_mode: true,
            ..Self::new(d, a, omega, p)
        }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        ProblemParams { omega, ..self }
    }

    pub fn dim(&self) -> f64 {
        self.d as f64
    }

    /// Exponent `d - 1 + 2a` of the radial flux `r^{d-1+2a} u'`.
    pub fn flux_exponent(&self) -> f64 {
        self.d as f64 - 1.0 + 2.0 * self.a
    }

    pub fn critical_exponent(&self) -> CriticalExponent {
        critical_exponent(self.d, self.a)
    }

    pub fn validate(self) -> Result<Self, ParamError> {
        if self.d < 2 {
            return Err(ParamError::DimensionTooSmall { d: self.d });
        }
        let a_ok = if self.oracle_mode {
            (0.0..1.0).contains(&self.a)
        } else {
            self.a > 0.0 && self.a < 1.0
        };
        if !a_ok {
            let allowed = if self.oracle_mode { "[0, 1)" } else { "(0, 1)" };
            return Err(ParamError::WeightOutOfRange { a: self.a, allowed });
        }
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(ParamError::NonpositiveOmega { omega: self.omega });
        }
        let crit = self.critical_exponent();
        if !(self.p > 2.0 && crit.admits(self.p)) {
            return Err(ParamError::PowerOutOfWindow {
                p: self.p,
                upper: crit.value(),
            });
        }
        Ok(self)
    }
}

/// Covariance of the equation under `u(x) -> A u(D x)`.
///
/// If `u` solves the `omega = 1` problem then
/// `x -> amplitude_factor * u(dilation_factor * x)` solves the problem at
/// the original `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingMap {
    pub amplitude_factor: f64,
    pub dilation_factor: f64,
}

impl ScalingMap {
    pub fn identity() -> Self {
        ScalingMap {
            amplitude_factor: 1.0,
            dilation_factor: 1.0,
        }
    }

    pub fn for_params(params: &ProblemParams) -> Self {
        ScalingMap {
            amplitude_factor: params.omega.powf(1.0 / (params.p - 2.0)),
            dilation_factor: params.omega.powf(1.0 / (2.0 * (1.0 - params.a))),
        }
    }

    pub fn inverse(&self) -> Self {
        ScalingMap {
            amplitude_factor: 1.0 / self.amplitude_factor,
            dilation_factor: 1.0 / self.dilation_factor,
        }
    }

    pub fn compose(&self, other: &ScalingMap) -> Self {
        ScalingMap {
            amplitude_factor: self.amplitude_factor * other.amplitude_factor,
            dilation_factor: self.dilation_factor * other.dilation_factor,
        }
    }

    /// Carries samples `(s_i, u_i, u'_i)` of a normalized solution to
    /// samples `(s_i / D, A u_i, A D u'_i)` of the original problem.
    pub fn transport(&self, radii: &[f64], u: &[f64], du: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (amp, dil) = (self.amplitude_factor, self.dilation_factor);
        (
            radii.iter().map(|s| s / dil).collect(),
            u.iter().map(|v| amp * v).collect(),
            du.iter().map(|v| amp * dil * v).collect(),
        )
    }
}

/// Returns the `omega = 1` parameters together with the map that carries
/// normalized solutions back to the original frequency.
pub fn normalize_omega(params: &ProblemParams) -> (ProblemParams, ScalingMap) {
    (params.with_omega(1.0), ScalingMap::for_params(params))
}
