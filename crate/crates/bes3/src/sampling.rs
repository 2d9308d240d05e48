//! Exact scalar samplers for first-passage times and the last-hitting time.
//!
//! The first-passage time of a Brownian motion to a level at distance `d`
//! is sampled through the reciprocal-square representation `T = d^2 / N^2`
//! with `N` standard normal; the last-hitting time `g` of the process from
//! `r` combines a uniform level `a = r U` with the first passage over the
//! remaining distance `r - a`.

use crate::rng::RandomSource;

/// A sampled first-passage time to a level at distance `level_distance`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstPassageSample {
    pub level_distance: f64,
    pub time: f64,
}

/// A sampled triple for the ultimate-minimum decomposition: the uniform `u`,
/// the realized minimum level `a = r u`, and the last-hitting time `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GSample {
    pub u: f64,
    pub a: f64,
    pub g: f64,
}

/// Sample the first-passage time over `distance`.
///
/// `distance = 0` returns time 0 without consuming any draw. A normal draw
/// of exactly zero (probability zero outside scripted tests) is redrawn.
///
/// # Panics
/// If `distance` is negative or non-finite.
pub fn sample_first_passage<S: RandomSource>(rng: &mut S, distance: f64) -> FirstPassageSample {
    assert!(
        distance >= 0.0 && distance.is_finite(),
        "distance must be finite and non-negative, got {distance}"
    );
    if distance == 0.0 {
        return FirstPassageSample {
            level_distance: 0.0,
            time: 0.0,
        };
    }
    let time = loop {
        let n = rng.standard_normal();
        if n != 0.0 {
            let ratio = distance / n;
            break ratio * ratio;
        }
    };
    FirstPassageSample {
        level_distance: distance,
        time,
    }
}

/// Sample `(u, a, g)` for the process started at `r`.
///
/// Draw order is part of the contract: the uniform is drawn first, then the
/// normal that forms `g = (r - a)^2 / N^2`. With `u = 1` (only reachable
/// through forced draws) the distance is zero, `g = 0`, and no normal is
/// consumed.
///
/// # Panics
/// If `r` is not strictly positive and finite.
pub fn sample_g_exact<S: RandomSource>(rng: &mut S, r: f64) -> GSample {
    assert!(
        r > 0.0 && r.is_finite(),
        "start level must be finite and positive, got {r}"
    );
    let u = rng.uniform01();
    sample_g_with_level_fraction(rng, r, u)
}

/// Complete a `g` sample from an already-drawn level fraction `u`.
///
/// Split out so the verification suite can inject a deliberately biased
/// fraction when exercising its mutation scenarios.
pub(crate) fn sample_g_with_level_fraction<S: RandomSource>(
    rng: &mut S,
    r: f64,
    u: f64,
) -> GSample {
    let a = r * u;
    let fp = sample_first_passage(rng, r - a);
    GSample { u, a, g: fp.time }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{make_rng, ScriptedSource};

    #[test]
    fn zero_distance_consumes_no_draws() {
        // Empty script: any draw would panic.
        let mut rng = ScriptedSource::new([], []);
        let s = sample_first_passage(&mut rng, 0.0);
        assert_eq!(s.time, 0.0);
        assert_eq!(s.level_distance, 0.0);
    }

    #[test]
    fn forced_unit_normal_gives_distance_squared() {
        let mut rng = ScriptedSource::new([], [1.0]);
        let s = sample_first_passage(&mut rng, 2.0);
        assert_eq!(s.time, 4.0);
    }

    #[test]
    fn zero_normal_is_redrawn() {
        let mut rng = ScriptedSource::new([], [0.0, 0.0, 2.0]);
        let s = sample_first_passage(&mut rng, 1.0);
        assert_eq!(s.time, 0.25);
    }

    #[test]
    fn time_scales_as_distance_squared_under_shared_draws() {
        let d = 0.7;
        let mut a = make_rng(11, 5);
        let mut b = make_rng(11, 5);
        let t1 = sample_first_passage(&mut a, d).time;
        let t2 = sample_first_passage(&mut b, 2.0 * d).time;
        assert_eq!(t2, 4.0 * t1);
    }

    #[test]
    fn forced_u_one_pins_the_minimum_at_the_start() {
        let mut rng = ScriptedSource::new([1.0], []);
        let s = sample_g_exact(&mut rng, 3.0);
        assert_eq!(s.u, 1.0);
        assert_eq!(s.a, 3.0);
        assert_eq!(s.g, 0.0);
    }

    #[test]
    fn forced_midpoint_arithmetic() {
        let mut rng = ScriptedSource::new([0.5], [1.0]);
        let s = sample_g_exact(&mut rng, 2.0);
        assert_eq!(s.a, 1.0);
        assert_eq!(s.g, 1.0);
    }

    #[test]
    fn brownian_scaling_under_shared_draws() {
        // r -> c r with identical draws gives a -> c a and g -> c^2 g
        // exactly; c = 2 keeps every float operation an exponent shift.
        let c = 2.0;
        let mut base = make_rng(5, 9);
        let mut scaled = make_rng(5, 9);
        for _ in 0..50 {
            let s1 = sample_g_exact(&mut base, 1.5);
            let s2 = sample_g_exact(&mut scaled, c * 1.5);
            assert_eq!(s2.a, c * s1.a);
            assert_eq!(s2.g, c * c * s1.g);
        }
    }

    #[test]
    #[should_panic(expected = "non-negative")]
    fn negative_distance_panics() {
        let mut rng = make_rng(1, 0);
        sample_first_passage(&mut rng, -1.0);
    }

    #[test]
    #[should_panic(expected = "positive")]
    fn non_positive_start_level_panics() {
        let mut rng = make_rng(1, 0);
        sample_g_exact(&mut rng, 0.0);
    }
}
