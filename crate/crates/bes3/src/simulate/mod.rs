//! Path-level constructions of the BES(3) process from `r > 0`.
//!
//! Three independent constructions of the same law:
//! * [`simulate_norm3d`] — the Euclidean norm of a 3-D Brownian motion
//!   started at `(r, 0, 0)`; marginally exact at every grid time.
//! * [`simulate_euler_sde`] — Euler-Maruyama on `dR = dB + dt / R`, with
//!   reflection as the positivity fix.
//! * [`simulate_williams`] — the decomposition at the ultimate minimum:
//!   Brownian motion from `r` run to its first hit of an independent
//!   uniform level, then that level plus an independent BES(3) from 0.
//!
//! Plus [`simulate_figure1_walk`], a literal replication of the
//! uniform-increment random-walk construction used for illustration.

mod williams;

pub use williams::{
    simulate_williams, williams_window, WilliamsSample, WindowSample, PRE_G_CAP_FACTOR,
};
pub(crate) use williams::{simulate_williams_opts, williams_window_opts, WilliamsMutation};

use crate::error::{Error, Result};
use crate::path::{BridgeMinAccumulator, BridgedSummary, SamplePath};
use crate::rng::RandomSource;

/// Construction selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Norm3d,
    Euler,
    Williams,
    Figure1,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Norm3d => "norm3d",
            Method::Euler => "euler",
            Method::Williams => "williams",
            Method::Figure1 => "figure1",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "norm3d" => Some(Method::Norm3d),
            "euler" => Some(Method::Euler),
            "williams" => Some(Method::Williams),
            "figure1" => Some(Method::Figure1),
            _ => None,
        }
    }
}

/// Batch simulation parameters.
///
/// For the Williams construction `horizon` is the length of the post-minimum
/// segment; the pre-minimum segment is capped at [`PRE_G_CAP_FACTOR`]` * r^2`
/// time units per attempt.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct SimConfig {
    pub r: f64,
    pub horizon: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub method: Method,
}

impl SimConfig {
    /// Validate the configuration and return the grid step count.
    ///
    /// `horizon / dt` must round to an integer step count to within a
    /// relative `1e-9`.
    pub fn validate(&self) -> Result<usize> {
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::Config(format!(
                "r must be finite and positive, got {}",
                self.r
            )));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!(
                "dt must be finite and positive, got {}",
                self.dt
            )));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::Config(format!(
                "horizon must be finite and positive, got {}",
                self.horizon
            )));
        }
        if self.dt > self.horizon {
            return Err(Error::Config(format!(
                "dt = {} exceeds horizon = {}",
                self.dt, self.horizon
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::Config("n_paths must be positive".into()));
        }
        let steps_f = self.horizon / self.dt;
        let steps = steps_f.round();
        if (steps_f - steps).abs() > 1e-9 * steps_f.max(1.0) {
            return Err(Error::Config(format!(
                "horizon/dt = {steps_f} does not round to an integer step count"
            )));
        }
        Ok(steps as usize)
    }
}

/// 3-D Gaussian walker whose norm is the exact BES(3) construction.
pub(crate) struct Norm3dWalker {
    pos: [f64; 3],
    sqrt_dt: f64,
}

impl Norm3dWalker {
    pub(crate) fn new(r: f64, dt: f64) -> Self {
        Self {
            pos: [r, 0.0, 0.0],
            sqrt_dt: dt.sqrt(),
        }
    }

    /// Advance one grid step and return the new radial value.
    pub(crate) fn step<S: RandomSource>(&mut self, rng: &mut S) -> f64 {
        for p in &mut self.pos {
            *p += self.sqrt_dt * rng.standard_normal();
        }
        norm3(self.pos)
    }
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Exact-construction path: `R_k = |(r,0,0) + W_{k dt}|`.
pub fn norm3d_path<S: RandomSource>(r: f64, dt: f64, steps: usize, rng: &mut S) -> SamplePath {
    let mut walker = Norm3dWalker::new(r, dt);
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    times.push(0.0);
    values.push(r);
    for k in 1..=steps {
        times.push(k as f64 * dt);
        values.push(walker.step(rng));
    }
    SamplePath {
        times,
        values,
        reflect_count: 0,
    }
}

/// [`norm3d_path`] driven by a validated [`SimConfig`].
pub fn simulate_norm3d<S: RandomSource>(config: &SimConfig, rng: &mut S) -> Result<SamplePath> {
    let steps = config.validate()?;
    Ok(norm3d_path(config.r, config.dt, steps, rng))
}

/// Streaming norm3d summary: terminal value plus the bridge-corrected
/// running minimum, without materializing the path.
///
/// Draw order per step: three normals for the spatial increment, then the
/// bridge uniform for segments that could lower the running minimum.
pub(crate) fn norm3d_bridged_summary<S: RandomSource>(
    r: f64,
    dt: f64,
    steps: usize,
    rng: &mut S,
) -> BridgedSummary {
    let mut walker = Norm3dWalker::new(r, dt);
    let mut acc = BridgeMinAccumulator::new(r).with_floor(0.0);
    let mut value = r;
    for k in 1..=steps {
        value = walker.step(rng);
        acc.step(k as f64 * dt, value, rng);
    }
    acc.finish(value)
}

/// Euler-Maruyama path for `dR = dB + dt / R`.
///
/// A step landing at or below zero is replaced by its absolute value and
/// counted in `reflect_count`.
pub fn euler_path<S: RandomSource>(r: f64, dt: f64, steps: usize, rng: &mut S) -> SamplePath {
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    times.push(0.0);
    values.push(r);
    let mut x = r;
    let mut reflects = 0u64;
    let sqrt_dt = dt.sqrt();
    for k in 1..=steps {
        x = euler_step(x, rng.standard_normal(), dt, sqrt_dt, true, &mut reflects);
        times.push(k as f64 * dt);
        values.push(x);
    }
    SamplePath {
        times,
        values,
        reflect_count: reflects,
    }
}

fn euler_step(
    x: f64,
    normal: f64,
    dt: f64,
    sqrt_dt: f64,
    include_drift: bool,
    reflects: &mut u64,
) -> f64 {
    let drift = if include_drift { dt / x } else { 0.0 };
    let mut next = x + sqrt_dt * normal + drift;
    if next <= 0.0 {
        next = (-next).max(f64::MIN_POSITIVE);
        *reflects += 1;
    }
    next
}

/// [`euler_path`] driven by a validated [`SimConfig`].
pub fn simulate_euler_sde<S: RandomSource>(config: &SimConfig, rng: &mut S) -> Result<SamplePath> {
    let steps = config.validate()?;
    Ok(euler_path(config.r, config.dt, steps, rng))
}

/// Streaming Euler terminal value; `include_drift = false` degrades the
/// scheme to plain Brownian motion for mutation testing.
pub(crate) fn euler_terminal_opts<S: RandomSource>(
    r: f64,
    dt: f64,
    steps: usize,
    include_drift: bool,
    rng: &mut S,
) -> (f64, u64) {
    let mut x = r;
    let mut reflects = 0u64;
    let sqrt_dt = dt.sqrt();
    for _ in 0..steps {
        x = euler_step(x, rng.standard_normal(), dt, sqrt_dt, include_drift, &mut reflects);
    }
    (x, reflects)
}

/// Fraction of reflected steps above which a batch should carry a warning
/// that `dt` is too coarse for the start level.
pub const EULER_REFLECT_WARN_FRACTION: f64 = 0.001;

pub fn reflects_warrant_warning(total_reflects: u64, total_steps: u64) -> bool {
    total_steps > 0 && (total_reflects as f64) > EULER_REFLECT_WARN_FRACTION * total_steps as f64
}

/// Start point of the illustrative random walk, with norm exactly 6.
pub const FIGURE1_START: [f64; 3] = [4.0, 4.0, 2.0];

/// Norm of a random walk with i.i.d. uniform `[-1/2, 1/2]^3` increments.
///
/// One step is one time unit (increment variance `1/12` per coordinate; no
/// rescaling to Brownian time). Draw order per step: x, then y, then z.
pub fn simulate_figure1_walk<S: RandomSource>(
    rng: &mut S,
    steps: usize,
    start: [f64; 3],
) -> SamplePath {
    let mut pos = start;
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    times.push(0.0);
    values.push(norm3(pos));
    for k in 1..=steps {
        for p in &mut pos {
            *p += rng.uniform01() - 0.5;
        }
        times.push(k as f64);
        values.push(norm3(pos));
    }
    SamplePath {
        times,
        values,
        reflect_count: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::path_summary;
    use crate::rng::{make_rng, ScriptedSource};
    use approx::assert_relative_eq;

    fn config(method: Method) -> SimConfig {
        SimConfig {
            r: 1.0,
            horizon: 1.0,
            dt: 1e-3,
            n_paths: 1,
            seed: 7,
            method,
        }
    }

    #[test]
    fn config_validation_names_the_bad_field() {
        let mut c = config(Method::Norm3d);
        c.dt = 0.0;
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("dt"));
        let mut c = config(Method::Norm3d);
        c.r = -1.0;
        assert!(c.validate().unwrap_err().to_string().contains('r'));
        let mut c = config(Method::Norm3d);
        c.dt = 0.3; // 1/0.3 is not an integer
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        assert_eq!(config(Method::Norm3d).validate().unwrap(), 1000);
    }

    #[test]
    fn norm3d_zero_steps_is_the_initial_condition() {
        let mut rng = make_rng(1, 0);
        let p = norm3d_path(2.5, 0.1, 0, &mut rng);
        assert_eq!(p.times, vec![0.0]);
        assert_eq!(p.values, vec![2.5]);
    }

    #[test]
    fn norm3d_with_zero_driver_is_constant() {
        let mut rng = ScriptedSource::constant(0.5, 0.0);
        let p = norm3d_path(1.5, 0.01, 10, &mut rng);
        assert!(p.values.iter().all(|&v| v == 1.5));
    }

    #[test]
    fn norm3d_scaling_is_exact_for_power_of_two_factors() {
        // (r, T, dt) -> (c r, c^2 T, c^2 dt) with shared draws scales values
        // by c and times by c^2 bit-exactly when c is a power of two.
        let c = 2.0;
        let mut base_rng = make_rng(9, 3);
        let mut scaled_rng = make_rng(9, 3);
        let base = norm3d_path(1.0, 1e-3, 500, &mut base_rng);
        let scaled = norm3d_path(c, c * c * 1e-3, 500, &mut scaled_rng);
        for k in 0..base.len() {
            assert_eq!(scaled.values[k].to_bits(), (c * base.values[k]).to_bits());
            assert_eq!(
                scaled.times[k].to_bits(),
                (c * c * base.times[k]).to_bits()
            );
        }
    }

    #[test]
    fn euler_deterministic_drift_recursion() {
        let mut rng = ScriptedSource::constant(0.5, 0.0);
        let p = euler_path(1.0, 0.1, 2, &mut rng);
        assert_eq!(p.values[0], 1.0);
        assert_relative_eq!(p.values[1], 1.1, epsilon = 1e-15);
        assert_relative_eq!(p.values[2], 1.1 + 0.1 / 1.1, epsilon = 1e-15);
        assert_eq!(p.reflect_count, 0);
    }

    #[test]
    fn euler_reflects_and_counts() {
        // One scripted huge negative shock pushes the state below zero.
        let mut rng = ScriptedSource::new([], [-10.0, 0.0]);
        let p = euler_path(0.5, 0.01, 2, &mut rng);
        assert!(p.values.iter().all(|&v| v > 0.0));
        assert_eq!(p.reflect_count, 1);
    }

    #[test]
    fn reflect_warning_threshold() {
        assert!(!reflects_warrant_warning(0, 10_000));
        assert!(!reflects_warrant_warning(10, 10_000));
        assert!(reflects_warrant_warning(11, 10_000));
        assert!(!reflects_warrant_warning(0, 0));
    }

    #[test]
    fn figure1_starts_at_six_and_zero_increments_hold() {
        let mut rng = make_rng(3, 0);
        let p = simulate_figure1_walk(&mut rng, 0, FIGURE1_START);
        assert_eq!(p.values, vec![6.0]);

        let mut zero = ScriptedSource::constant(0.5, 0.0);
        let p = simulate_figure1_walk(&mut zero, 5, FIGURE1_START);
        assert!(p.values.iter().all(|&v| v == 6.0));
        assert_eq!(p.times, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn figure1_long_walk_minimum_stays_positive() {
        let mut rng = make_rng(7, 0);
        let p = simulate_figure1_walk(&mut rng, 1200, FIGURE1_START);
        let s = path_summary(&p).unwrap();
        assert!(s.running_min > 0.0);
        assert_eq!(p.len(), 1201);
    }

    #[test]
    fn norm3d_terminal_second_moment_matches_gaussian_expectation() {
        // Oracle: E|x0 + W_T|^2 = r^2 + 3T, checked here by quadrature of
        // the coordinate-wise Gaussian second moments.
        use crate::quad::{integrate, QuadratureSpec};
        let (r, t): (f64, f64) = (1.0, 1.0);
        let spec = QuadratureSpec::default();
        let phi = |s: f64| (-s * s / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut oracle = 0.0;
        for mean in [r, 0.0, 0.0] {
            oracle += integrate(
                |s| {
                    let x = mean + t.sqrt() * s;
                    x * x * phi(s)
                },
                -10.0,
                10.0,
                &spec,
            )
            .unwrap()
            .value;
        }
        assert_relative_eq!(oracle, r * r + 3.0 * t, epsilon = 1e-9);

        let n = 10_000;
        let mut sq = Vec::with_capacity(n);
        for i in 0..n {
            let mut rng = make_rng(7, i as u64);
            let p = norm3d_path(r, 1e-3, 1000, &mut rng);
            let v = p.terminal().unwrap();
            sq.push(v * v);
        }
        let (mean, se) = crate::stats::mc_mean_ci(&sq).unwrap();
        assert!(
            (mean - oracle).abs() <= 3.0 * se,
            "mean {mean} vs {oracle} (3se = {})",
            3.0 * se
        );
    }
}
