//! Closed-form laws for the BES(3) last-hitting-time circle of facts.
//!
//! * `hitting_density` — first-passage density of a level by Brownian motion.
//! * `g_density`, `g_cdf` — law of the time `g` at which the process from
//!   `r > 0` attains its ultimate minimum.
//! * `g_laplace`, `g_laplace_numeric` — its Laplace transform, in closed
//!   form and as an independent quadrature of the density.
//! * `azema_z` — the conditional survival ratio `I_t / R_t`.
//! * `ultimate_inf_cdf` — the uniform law of the ultimate minimum on `[0, r]`.
//!
//! All functions are pure and total over their stated domains; inputs
//! outside the domain produce [`Error::Domain`], never silent NaNs.

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadResult, QuadratureSpec};

fn sqrt_2pi() -> f64 {
    (2.0 * std::f64::consts::PI).sqrt()
}

/// Density at `t` of the first time Brownian motion from 0 reaches level `a`:
/// `|a| exp(-a^2 / 2t) / sqrt(2 pi t^3)`.
///
/// `a = 0` returns 0 for every `t > 0`; the hitting time of the start level
/// is a point mass at zero and carries no density on `(0, inf)`.
pub fn hitting_density(t: f64, a: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "hitting_density requires t > 0, got t = {t}"
        )));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let a = a.abs();
    Ok(a * (-a * a / (2.0 * t)).exp() / (sqrt_2pi() * (t * t * t).sqrt()))
}

/// Density of `g` for the process started at `r`:
/// `(1 - exp(-r^2 / 2t)) / (r sqrt(2 pi t))`.
pub fn g_density(t: f64, r: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "g_density requires t > 0, got t = {t}"
        )));
    }
    check_start_level(r, "g_density")?;
    Ok((-(-r * r / (2.0 * t)).exp_m1()) / (r * (2.0 * std::f64::consts::PI * t).sqrt()))
}

/// Analytic bound on the upper tail `P(g > t)`, `min(1, r / sqrt(2 pi t))`.
///
/// Used as the explicit truncation allowance whenever a finite horizon
/// stands in for an infinite one.
pub fn g_tail_bound(t: f64, r: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    (r / (2.0 * std::f64::consts::PI * t).sqrt()).min(1.0)
}

/// `P(g <= t)` by adaptive quadrature of [`g_density`].
///
/// The `1/sqrt(s)` endpoint factor is absorbed by the substitution `s = v^2`,
/// after which the integrand is smooth and bounded on `[0, sqrt(t)]`.
pub fn g_cdf(t: f64, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_start_level(r, "g_cdf")?;
    if t < 0.0 {
        return Err(Error::Domain(format!("g_cdf requires t >= 0, got t = {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let norm = r * sqrt_2pi();
    let integrand = move |v: f64| 2.0 * (-(-r * r / (2.0 * v * v)).exp_m1()) / norm;
    let result = integrate(integrand, 0.0, t.sqrt(), quad)?;
    Ok(result.value.clamp(0.0, 1.0))
}

/// Laplace transform of the law of `g`:
/// `(1 - exp(-sqrt(2 lambda) r)) / (sqrt(2 lambda) r)`.
///
/// `lambda = 0` returns 1 by the analytic limit; arguments with
/// `sqrt(2 lambda) r < 1e-8` use the two-term Taylor expansion of
/// `(1 - e^-x)/x` to avoid 0/0.
pub fn g_laplace(lambda: f64, r: f64) -> Result<f64> {
    check_start_level(r, "g_laplace")?;
    if lambda < 0.0 {
        return Err(Error::Domain(format!(
            "g_laplace requires lambda >= 0, got lambda = {lambda}"
        )));
    }
    let x = (2.0 * lambda).sqrt() * r;
    if x < 1e-8 {
        return Ok(1.0 - x / 2.0);
    }
    Ok(-(-x).exp_m1() / x)
}

/// `int_0^inf exp(-lambda t) p(t) dt` by quadrature, as an independent route
/// to [`g_laplace`].
///
/// The integral is truncated at the first `t*` where the analytic bound
/// `exp(-lambda t*) min(1, r / sqrt(2 pi t*))` drops below `abs_tol`
/// (capped at `1e12 r^2`); the bound at the cutoff is added to the reported
/// error estimate.
pub fn g_laplace_numeric(lambda: f64, r: f64, quad: &QuadratureSpec) -> Result<QuadResult> {
    check_start_level(r, "g_laplace_numeric")?;
    if lambda < 0.0 {
        return Err(Error::Domain(format!(
            "g_laplace_numeric requires lambda >= 0, got lambda = {lambda}"
        )));
    }
    quad.validate()?;

    let tail = |t: f64| (-lambda * t).exp() * g_tail_bound(t, r);
    let cap = 1e12 * r * r;
    let mut t_star = r * r;
    while tail(t_star) > quad.abs_tol && t_star < cap {
        t_star *= 2.0;
    }
    let tail_bound = tail(t_star);

    let norm = r * sqrt_2pi();
    let integrand =
        move |v: f64| 2.0 * (-(-r * r / (2.0 * v * v)).exp_m1()) * (-lambda * v * v).exp() / norm;
    let mut result = integrate(integrand, 0.0, t_star.sqrt(), quad)?;
    result.error_estimate += tail_bound;
    Ok(result)
}

/// The conditional survival ratio `Z_t = I_t / R_t` from the running
/// infimum and the current value.
pub fn azema_z(i_t: f64, r_t: f64) -> Result<f64> {
    if !(i_t > 0.0) || !(r_t > 0.0) {
        return Err(Error::Domain(format!(
            "azema_z requires positive inputs, got i_t = {i_t}, r_t = {r_t}"
        )));
    }
    if i_t > r_t {
        return Err(Error::Domain(format!(
            "running infimum {i_t} exceeds current value {r_t}"
        )));
    }
    Ok(i_t / r_t)
}

/// CDF of the ultimate minimum of the process from `r`: uniform on `[0, r]`.
pub fn ultimate_inf_cdf(x: f64, r: f64) -> Result<f64> {
    check_start_level(r, "ultimate_inf_cdf")?;
    Ok((x / r).clamp(0.0, 1.0))
}

fn check_start_level(r: f64, what: &str) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "{what} requires a start level r > 0, got r = {r}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const QUAD: QuadratureSpec = QuadratureSpec {
        rel_tol: 1e-8,
        abs_tol: 1e-12,
        max_subdivisions: 200_000,
    };

    #[test]
    fn hitting_density_frozen_value() {
        // e^{-1/2} / sqrt(2 pi)
        assert_relative_eq!(
            hitting_density(1.0, 1.0).unwrap(),
            0.241970724519143,
            epsilon = 1e-12
        );
    }

    #[test]
    fn hitting_density_is_symmetric_in_the_level() {
        for &(t, a) in &[(0.5, 1.0), (1.0, 2.5), (3.0, 0.3)] {
            assert_eq!(
                hitting_density(t, a).unwrap().to_bits(),
                hitting_density(t, -a).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn hitting_density_domain() {
        assert!(matches!(hitting_density(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(hitting_density(-1.0, 1.0), Err(Error::Domain(_))));
        assert_eq!(hitting_density(2.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn g_density_frozen_value() {
        // (1 - e^{-1/2}) / sqrt(2 pi)
        assert_relative_eq!(
            g_density(1.0, 1.0).unwrap(),
            0.156971555882289,
            epsilon = 1e-12
        );
    }

    #[test]
    fn g_density_domain() {
        assert!(matches!(g_density(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(g_density(1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(g_density(1.0, -2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn g_density_large_t_tail_shape() {
        // p(t) ~ r / (2 t sqrt(2 pi t)); the normalized ratio tends to 1.
        let r = 1.0;
        let t = 1e4;
        let ratio = g_density(t, r).unwrap() * 2.0 * t * (2.0 * std::f64::consts::PI * t).sqrt() / r;
        assert!((ratio - 1.0).abs() < 1e-4, "ratio = {ratio}");
    }

    #[test]
    fn g_cdf_endpoints_and_frozen_value() {
        assert_eq!(g_cdf(0.0, 1.0, &QUAD).unwrap(), 0.0);
        assert_relative_eq!(
            g_cdf(1.0, 1.0, &QUAD).unwrap(),
            0.631253619627493,
            epsilon = 1e-7
        );
        assert!((g_cdf(1e8, 1.0, &QUAD).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn g_cdf_matches_mixture_oracle() {
        // Independent oracle: P(g <= t) = int_0^1 2 (1 - Phi(u r / sqrt(t))) du,
        // the uniform mixture of first-passage CDFs.
        let phi = |x: f64| 0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2);
        let t: f64 = 1.0;
        let oracle = integrate(|u| 2.0 * (1.0 - phi(u / t.sqrt())), 0.0, 1.0, &QUAD)
            .unwrap()
            .value;
        assert_relative_eq!(oracle, 0.631253619627493, epsilon = 1e-9);
        assert!((g_cdf(t, 1.0, &QUAD).unwrap() - oracle).abs() <= 1e-6);
    }

    #[test]
    fn g_cdf_is_nondecreasing_and_scale_invariant() {
        let mut prev = 0.0;
        for i in 1..=20 {
            let t = 0.25 * i as f64;
            let c = g_cdf(t, 1.0, &QUAD).unwrap();
            assert!(c >= prev);
            prev = c;
        }
        for &c in &[0.5, 2.0] {
            for &t in &[0.5, 1.0, 2.0] {
                let base = g_cdf(t, 1.0, &QUAD).unwrap();
                let scaled = g_cdf(c * c * t, c, &QUAD).unwrap();
                assert!((base - scaled).abs() <= 1e-8, "c={c}, t={t}");
            }
        }
    }

    #[test]
    fn g_cdf_central_difference_matches_density() {
        let h = 1e-4;
        for &t in &[0.5, 1.0, 2.0] {
            let d = (g_cdf(t + h, 1.0, &QUAD).unwrap() - g_cdf(t - h, 1.0, &QUAD).unwrap())
                / (2.0 * h);
            let p = g_density(t, 1.0).unwrap();
            assert!((d - p).abs() <= 1e-4, "t={t}: {d} vs {p}");
        }
    }

    #[test]
    fn g_laplace_frozen_values() {
        assert_eq!(g_laplace(0.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            g_laplace(0.5, 1.0).unwrap(),
            0.632120558828558,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            g_laplace(2.0, 1.0).unwrap(),
            0.432332358381694,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            g_laplace(2.0, 6.0).unwrap(),
            0.083332821315637,
            epsilon = 1e-12
        );
    }

    #[test]
    fn g_laplace_small_argument_branch_is_continuous() {
        // Both branches agree with 1 - x/2 to machine precision around the
        // Taylor threshold x = 1e-8.
        let r = 1.0;
        for &x in &[0.9e-8f64, 1.1e-8] {
            let lam = 0.5 * x * x;
            let v = g_laplace(lam, r).unwrap();
            let expected = 1.0 - x / 2.0;
            assert!((v - expected).abs() < 1e-15, "x = {x}: {v} vs {expected}");
        }
    }

    #[test]
    fn g_laplace_domain_and_monotonicity() {
        assert!(matches!(g_laplace(-0.1, 1.0), Err(Error::Domain(_))));
        let mut prev = 1.0;
        for i in 1..=40 {
            let lam = 0.25 * i as f64;
            let v = g_laplace(lam, 2.0).unwrap();
            assert!(v > 0.0 && v <= 1.0);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn laplace_numeric_matches_closed_form() {
        for &(lam, r) in &[(0.5, 1.0), (2.0, 1.0), (1.0, 6.0)] {
            let numeric = g_laplace_numeric(lam, r, &QUAD).unwrap();
            let analytic = g_laplace(lam, r).unwrap();
            assert!(
                (numeric.value - analytic).abs() <= 1e-6,
                "lambda={lam}, r={r}: {} vs {analytic}",
                numeric.value
            );
        }
    }

    #[test]
    fn laplace_numeric_at_zero_recovers_total_mass() {
        let res = g_laplace_numeric(0.0, 1.0, &QUAD).unwrap();
        assert!((res.value - 1.0).abs() <= 1e-4, "value = {}", res.value);
        // Truncation at the documented cap leaves a visible tail bound.
        assert!(res.error_estimate < 1e-4);
    }

    #[test]
    fn azema_ratio() {
        assert_eq!(azema_z(2.0, 4.0).unwrap(), 0.5);
        assert_eq!(azema_z(3.0, 3.0).unwrap(), 1.0);
        assert_relative_eq!(azema_z(1.41963, 6.0).unwrap(), 0.2366050, epsilon = 1e-7);
        assert!(matches!(azema_z(2.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(azema_z(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(azema_z(1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn ultimate_inf_cdf_clamps() {
        let r = 4.0;
        assert_eq!(ultimate_inf_cdf(2.0, r).unwrap(), 0.5);
        assert_eq!(ultimate_inf_cdf(-1.0, r).unwrap(), 0.0);
        assert_eq!(ultimate_inf_cdf(9.0, r).unwrap(), 1.0);
        assert!(matches!(ultimate_inf_cdf(1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn hitting_density_normalizes() {
        // Substitute t = v^2 and truncate where the analytic tail
        // 2 Phi(a / sqrt(t)) - 1 <= 0.8 a / sqrt(t) falls below 1e-7.
        for &a in &[0.5f64, 1.0, 3.0] {
            let v_star = 8e6 * a;
            let integrand = move |v: f64| {
                if v == 0.0 {
                    0.0
                } else {
                    2.0 * a * (-a * a / (2.0 * v * v)).exp() / (sqrt_2pi() * v * v)
                }
            };
            let mass = integrate(integrand, 0.0, v_star, &QUAD).unwrap().value;
            assert!((mass - 1.0).abs() <= 1e-6, "a={a}: mass={mass}");
        }
    }
}
