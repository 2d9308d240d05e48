//! The decomposition of the process at its ultimate minimum.
//!
//! Draw a uniform level `a = r U`; run a Brownian motion from `r` until its
//! first hit of `a`; append `a` plus an independent BES(3) from 0. Crossing
//! detection between grid points uses the exact Brownian-bridge crossing
//! probability `exp(-2 (x1 - a)(x2 - a) / dt)`, so the hit time carries no
//! first-order grid bias. One uniform per segment serves as both the
//! crossing decision and, conditionally on no crossing, the quantile of the
//! segment's bridge minimum above the barrier.

use super::{Norm3dWalker, SimConfig};
use crate::error::{Error, Result};
use crate::path::SamplePath;
use crate::rng::RandomSource;

/// Pre-minimum segment cap, in units of `r^2` time. An attempt that has not
/// crossed by then is abandoned and redrawn; the exact tail gives about a
/// 5.6% abandon rate per attempt at this cap.
pub const PRE_G_CAP_FACTOR: f64 = 50.0;

const MAX_ATTEMPTS: u32 = 1_000_000;

/// Crossing probabilities below this are treated as zero and consume no
/// uniform draw.
const CROSSING_SKIP: f64 = 1e-12;

/// Deliberate law corruptions used by the verification suite to prove its
/// own checks are not vacuous.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct WilliamsMutation {
    /// Square the uniform before forming the minimum level.
    pub square_u: bool,
    /// Append the post segment without adding the minimum level back.
    pub drop_post_shift: bool,
}

/// A sampled decomposition: the level triple plus the two path segments.
///
/// `pre_path` runs from `(0, r)` and ends exactly at the level `a` at the
/// grid time `g_grid`; `post_path` lives on its own grid starting at time 0
/// with `post_path.values[0] == a`.
#[derive(Clone, Debug)]
pub struct WilliamsSample {
    pub u: f64,
    pub a: f64,
    pub g_grid: f64,
    pub pre_path: SamplePath,
    pub post_path: SamplePath,
    /// Abandoned attempts that hit the pre-minimum cap before crossing.
    pub retries: u32,
}

impl WilliamsSample {
    /// The spliced path on a single grid: post times re-based by `g_grid`,
    /// the duplicated splice point dropped.
    pub fn concatenated(&self) -> SamplePath {
        let mut times = self.pre_path.times.clone();
        let mut values = self.pre_path.values.clone();
        for k in 1..self.post_path.len() {
            times.push(self.g_grid + self.post_path.times[k]);
            values.push(self.post_path.values[k]);
        }
        SamplePath {
            times,
            values,
            reflect_count: 0,
        }
    }
}

enum Segment {
    Crossed,
    Moved(f64),
}

/// Advance one pre-minimum Brownian step and decide whether the barrier was
/// crossed inside the segment. When `min_tracker` is supplied and the
/// segment could undercut the current best, the same uniform that decided
/// "no crossing" is reused as the conditional quantile of the segment
/// minimum above the barrier.
fn pre_segment<S: RandomSource>(
    x1: f64,
    a: f64,
    dt: f64,
    sqrt_dt: f64,
    rng: &mut S,
    min_tracker: Option<&mut (f64, f64, f64)>, // (best, best_time, seg_left_time)
) -> Segment {
    let x2 = x1 + sqrt_dt * rng.standard_normal();
    if x2 <= a {
        return Segment::Crossed;
    }
    let p = (-2.0 * (x1 - a) * (x2 - a) / dt).exp();
    let track_candidate = match &min_tracker {
        Some(t) => x1.min(x2) - t.0 < 5.0 * sqrt_dt,
        None => false,
    };
    if p > CROSSING_SKIP || track_candidate {
        let u = rng.uniform01();
        if u < p {
            return Segment::Crossed;
        }
        if track_candidate {
            // Conditional bridge minimum given min > a: u is uniform on
            // [p, 1), exactly the quantile range above the barrier.
            let m = if u == 0.0 {
                x1.min(x2)
            } else {
                0.5 * (x1 + x2 - ((x1 - x2).powi(2) - 2.0 * dt * u.ln()).sqrt())
            };
            let m = m.max(a);
            let tracker = min_tracker.expect("candidate implies tracker");
            if m < tracker.0 {
                tracker.0 = m;
                tracker.1 = tracker.2;
            }
        }
    }
    Segment::Moved(x2)
}

/// One pre-minimum attempt on the grid; returns the stopped path ending at
/// `a` when the barrier is crossed within `cap_steps`.
fn pre_attempt<S: RandomSource>(
    r: f64,
    a: f64,
    dt: f64,
    cap_steps: usize,
    rng: &mut S,
) -> Option<SamplePath> {
    let mut times = vec![0.0];
    let mut values = vec![r];
    if r - a <= 0.0 {
        // Minimum at the start level: the pre segment is a single point.
        return Some(SamplePath {
            times,
            values,
            reflect_count: 0,
        });
    }
    let sqrt_dt = dt.sqrt();
    let mut x = r;
    for k in 1..=cap_steps {
        match pre_segment(x, a, dt, sqrt_dt, rng, None) {
            Segment::Crossed => {
                times.push(k as f64 * dt);
                values.push(a);
                return Some(SamplePath {
                    times,
                    values,
                    reflect_count: 0,
                });
            }
            Segment::Moved(x2) => {
                times.push(k as f64 * dt);
                values.push(x2);
                x = x2;
            }
        }
    }
    None
}

pub(crate) fn simulate_williams_opts<S: RandomSource>(
    r: f64,
    dt: f64,
    post_steps: usize,
    cap_steps: usize,
    mutation: WilliamsMutation,
    rng: &mut S,
) -> Result<WilliamsSample> {
    let mut retries = 0u32;
    for _ in 0..MAX_ATTEMPTS {
        let u = rng.uniform01();
        let u_eff = if mutation.square_u { u * u } else { u };
        let a = r * u_eff;
        let Some(pre_path) = pre_attempt(r, a, dt, cap_steps, rng) else {
            retries += 1;
            continue;
        };
        let g_grid = *pre_path.times.last().expect("non-empty");

        let shift = if mutation.drop_post_shift { 0.0 } else { a };
        let mut walker = Norm3dWalker::new(0.0, dt);
        let mut times = Vec::with_capacity(post_steps + 1);
        let mut values = Vec::with_capacity(post_steps + 1);
        times.push(0.0);
        values.push(shift);
        for k in 1..=post_steps {
            times.push(k as f64 * dt);
            values.push(shift + walker.step(rng));
        }
        let post_path = SamplePath {
            times,
            values,
            reflect_count: 0,
        };

        return Ok(WilliamsSample {
            u: u_eff,
            a,
            g_grid,
            pre_path,
            post_path,
            retries,
        });
    }
    Err(Error::Config(format!(
        "no pre-minimum crossing within {cap_steps} steps after {MAX_ATTEMPTS} attempts"
    )))
}

/// Decomposition sample driven by a validated [`SimConfig`].
///
/// `config.horizon` is the post-minimum segment length; the pre segment is
/// capped at [`PRE_G_CAP_FACTOR`]` * r^2` time units per attempt, with
/// abandoned attempts counted in `retries`.
pub fn simulate_williams<S: RandomSource>(
    config: &SimConfig,
    rng: &mut S,
) -> Result<WilliamsSample> {
    let post_steps = config.validate()?;
    let cap_steps = (PRE_G_CAP_FACTOR * config.r * config.r / config.dt).ceil() as usize;
    simulate_williams_opts(
        config.r,
        config.dt,
        post_steps,
        cap_steps,
        WilliamsMutation::default(),
        rng,
    )
}

/// Fixed-window summary of the spliced construction.
///
/// The decomposition defines the process on all of `[0, infinity)`; this
/// evaluates it on `[0, window]` only, which requires no pre-minimum cap and
/// therefore no retries: if the barrier is not hit inside the window the
/// window is simply the Brownian segment.
#[derive(Clone, Copy, Debug)]
pub struct WindowSample {
    /// Value at the end of the window.
    pub terminal: f64,
    /// Bridge-corrected minimum over the window.
    pub min: f64,
    /// Time attaining the minimum: the crossing time when crossed, else the
    /// left endpoint of the lowest bridge segment.
    pub argmin_time: f64,
    /// Whether the minimum level was reached inside the window.
    pub crossed: bool,
}

pub(crate) fn williams_window_opts<S: RandomSource>(
    r: f64,
    dt: f64,
    window_steps: usize,
    mutation: WilliamsMutation,
    rng: &mut S,
) -> WindowSample {
    let u = rng.uniform01();
    let u_eff = if mutation.square_u { u * u } else { u };
    let a = r * u_eff;
    let sqrt_dt = dt.sqrt();

    let mut crossed_at: Option<usize> = None;
    if r - a <= 0.0 {
        crossed_at = Some(0);
    }

    // (best, best_time, current segment left time)
    let mut tracker = (r, 0.0, 0.0);
    let mut x = r;
    if crossed_at.is_none() {
        for k in 1..=window_steps {
            tracker.2 = (k - 1) as f64 * dt;
            match pre_segment(x, a, dt, sqrt_dt, rng, Some(&mut tracker)) {
                Segment::Crossed => {
                    crossed_at = Some(k);
                    break;
                }
                Segment::Moved(x2) => x = x2,
            }
        }
    }

    match crossed_at {
        Some(k) => {
            let t_cross = k as f64 * dt;
            let shift = if mutation.drop_post_shift { 0.0 } else { a };
            let mut walker = Norm3dWalker::new(0.0, dt);
            let mut post = 0.0;
            for _ in k..window_steps {
                post = walker.step(rng);
            }
            WindowSample {
                terminal: shift + post,
                min: shift.min(a),
                argmin_time: t_cross,
                crossed: true,
            }
        }
        None => WindowSample {
            terminal: x,
            min: tracker.0,
            argmin_time: tracker.1,
            crossed: false,
        },
    }
}

/// Evaluate the spliced construction on the fixed window
/// `[0, window_steps * dt]`.
pub fn williams_window<S: RandomSource>(
    r: f64,
    dt: f64,
    window_steps: usize,
    rng: &mut S,
) -> WindowSample {
    williams_window_opts(r, dt, window_steps, WilliamsMutation::default(), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::path_summary;
    use crate::rng::{make_rng, ScriptedSource};

    fn opts() -> WilliamsMutation {
        WilliamsMutation::default()
    }

    #[test]
    fn forced_u_one_is_purely_the_post_segment() {
        // u = 1 pins the minimum at the start level; with a zero post driver
        // the whole path is constant at r.
        let mut rng = ScriptedSource::new([1.0], [0.0; 30]);
        let s = simulate_williams_opts(2.0, 0.1, 10, 100, opts(), &mut rng).unwrap();
        assert_eq!(s.a, 2.0);
        assert_eq!(s.g_grid, 0.0);
        assert_eq!(s.pre_path.len(), 1);
        assert!(s.post_path.values.iter().all(|&v| v == 2.0));
        let concat = s.concatenated();
        assert_eq!(concat.len(), 11);
        assert!(concat.values.iter().all(|&v| v == 2.0));
    }

    #[test]
    fn forced_direct_crossing_pins_the_level() {
        // u = 0.5 from r = 1 puts the barrier at 0.5; a scripted -10 normal
        // crosses on the first step.
        let normals: Vec<f64> = std::iter::once(-10.0).chain([0.0; 6]).collect();
        let mut rng = ScriptedSource::new([0.5], normals);
        let s = simulate_williams_opts(1.0, 0.01, 2, 100, opts(), &mut rng).unwrap();
        assert_eq!(s.a, 0.5);
        assert_eq!(s.g_grid, 0.01);
        assert_eq!(s.pre_path.values, vec![1.0, 0.5]);
        assert_eq!(s.post_path.values[0], 0.5);
        assert_eq!(s.retries, 0);
    }

    #[test]
    fn cap_exhaustion_retries_with_a_fresh_level() {
        // First attempt: barrier far below, one upward step, cap = 1 step.
        // Second attempt: a crossing forced by a large downward step.
        let mut rng = ScriptedSource::new([0.2, 0.9], [2.0, -10.0, 0.0, 0.0, 0.0]);
        let s = simulate_williams_opts(1.0, 0.01, 1, 1, opts(), &mut rng).unwrap();
        assert_eq!(s.retries, 1);
        assert_eq!(s.a, 0.9);
        assert_eq!(s.g_grid, 0.01);
    }

    #[test]
    fn splice_invariants_hold_on_real_draws() {
        for i in 0..50 {
            let mut rng = make_rng(21, i);
            let s = simulate_williams_opts(1.0, 0.01, 50, 20_000, opts(), &mut rng).unwrap();
            assert!(s.pre_path.values.iter().all(|&v| v >= s.a));
            assert_eq!(*s.pre_path.values.last().unwrap(), s.a);
            assert_eq!(s.post_path.values[0], s.a);
            assert!(s.post_path.values.iter().all(|&v| v >= s.a));
            let concat = s.concatenated();
            let summary = path_summary(&concat).unwrap();
            assert_eq!(summary.running_min, s.a);
            assert_eq!(summary.argmin_time, s.g_grid);
            // Times strictly increasing across the splice.
            for k in 1..concat.len() {
                assert!(concat.times[k] > concat.times[k - 1]);
            }
        }
    }

    #[test]
    fn window_crossing_produces_post_terminal() {
        let normals: Vec<f64> = std::iter::once(-10.0).chain([0.0; 12]).collect();
        let mut rng = ScriptedSource::new([0.5, 0.5, 0.5], normals);
        let w = williams_window_opts(1.0, 0.25, 4, opts(), &mut rng);
        assert!(w.crossed);
        assert_eq!(w.min, 0.5);
        assert_eq!(w.argmin_time, 0.25);
        assert_eq!(w.terminal, 0.5);
    }

    #[test]
    fn window_without_crossing_is_the_brownian_segment() {
        // Upward drift script never approaches the barrier.
        let mut rng = ScriptedSource::new(vec![0.1; 20], vec![1.0; 8]);
        let w = williams_window_opts(1.0, 0.01, 8, opts(), &mut rng);
        assert!(!w.crossed);
        assert!(w.terminal > 1.0);
        assert!(w.min <= 1.0 && w.min >= 0.1);
    }

    #[test]
    fn window_minimum_sits_above_the_barrier_when_uncrossed() {
        for i in 0..200 {
            let mut rng = make_rng(33, i);
            let w = williams_window_opts(1.0, 1e-3, 1000, opts(), &mut rng);
            if !w.crossed {
                assert!(w.min > 0.0);
            }
            assert!(w.min <= 1.0);
            assert!(w.terminal > 0.0);
        }
    }
}
