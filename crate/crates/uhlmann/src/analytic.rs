//! Closed-form Loschmidt amplitudes for great-circle Uhlmann processes, the
//! j = 1/2 and j = 1 specializations, critical-temperature solvers, and
//! transition (zero) counting over temperature ranges.

use std::f64::consts::{LN_10, PI};

use crate::error::{Error, Result};
use crate::holonomy::chi;
use crate::linalg::sech;
use crate::spin::SpinJ;
use crate::spin::SpinOperators;
use crate::thermal::ThermalSpec;

/// Clamp for the generating function at exact zeros of the amplitude:
/// g_max = -ln(eps^2) with eps = 1e-12.
pub const GEN_FN_MAX: f64 = 24.0 * LN_10;

/// Explicit zero- and infinite-temperature limit queries. The closed forms
/// are never evaluated at extreme floats; the analytic limits are returned
/// directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemperatureLimit {
    Zero,
    Infinite,
}

/// Parameters of a temperature sweep.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub j: SpinJ,
    pub omega0: f64,
    pub winding: u32,
    pub t_grid: Vec<f64>,
}

impl SweepSpec {
    pub fn new(j: SpinJ, omega0: f64, winding: u32, t_grid: Vec<f64>) -> Result<Self> {
        if omega0 <= 0.0 || !omega0.is_finite() {
            return Err(Error::InvalidFrequency(omega0));
        }
        if t_grid.is_empty() || t_grid[0] <= 0.0 {
            return Err(Error::NonPositiveTemperature(
                t_grid.first().copied().unwrap_or(0.0),
            ));
        }
        if !t_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::NonPositiveTemperature(f64::NAN));
        }
        Ok(Self {
            j,
            omega0,
            winding,
            t_grid,
        })
    }

    /// Log-spaced grid; critical temperatures accumulate near zero for large
    /// winding, so this is the default spacing.
    pub fn log_grid(tmin: f64, tmax: f64, count: usize) -> Vec<f64> {
        let (a, b) = (tmin.ln(), tmax.ln());
        (0..count)
            .map(|k| (a + (b - a) * k as f64 / (count - 1).max(1) as f64).exp())
            .collect()
    }

    pub fn linear_grid(tmin: f64, tmax: f64, count: usize) -> Vec<f64> {
        (0..count)
            .map(|k| tmin + (tmax - tmin) * k as f64 / (count - 1).max(1) as f64)
            .collect()
    }
}

/// Critical temperatures with the quantized phases on the intervals between
/// them: label 0 where the amplitude is positive, pi where it is negative.
#[derive(Debug, Clone)]
pub struct TransitionReport {
    pub tstars: Vec<f64>,
    pub phase_labels: Vec<f64>,
}

/// Loschmidt amplitude of a great-circle Uhlmann process,
/// sum_m e^{-beta omega0 m} / Z * d^j_{mm}(2 pi winding chi).
/// Longitude and equator loops share this expression.
pub fn loschmidt_great_circle(j: SpinJ, omega0: f64, winding: u32, t: f64) -> Result<f64> {
    let value = loschmidt_great_circle_complex(j, omega0, winding, t)?;
    debug_assert!(
        value.im.abs() < 1e-10,
        "amplitude not real: im = {:.3e}",
        value.im
    );
    Ok(value.re)
}

/// Same sum kept complex, exposing the (rounding-level) imaginary residue of
/// the Wigner-d matrix elements.
pub fn loschmidt_great_circle_complex(
    j: SpinJ,
    omega0: f64,
    winding: u32,
    t: f64,
) -> Result<num_complex::Complex64> {
    let spec = ThermalSpec::new(t, omega0, j)?;
    let ops = SpinOperators::new(j);
    let theta = 2.0 * PI * winding as f64 * chi(&spec);
    let u = ops.exp_jy(theta);
    Ok(spec
        .boltzmann_weights()
        .iter()
        .enumerate()
        .map(|(k, w)| u[(k, k)] * *w)
        .sum())
}

/// Limits of the great-circle amplitude: (-1)^{2j winding} at T -> 0
/// (the Berry limit) and 1 at T -> infinity.
pub fn loschmidt_great_circle_limit(j: SpinJ, winding: u32, limit: TemperatureLimit) -> f64 {
    match limit {
        TemperatureLimit::Zero => {
            if (j.two_j() as u64 * winding as u64).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        }
        TemperatureLimit::Infinite => 1.0,
    }
}

/// j = 1/2 closed form: cos(pi winding) cos(pi winding sech(beta omega0 / 2)).
pub fn loschmidt_half(omega0: f64, winding: u32, t: f64) -> Result<f64> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::NonPositiveTemperature(t));
    }
    let w = winding as f64;
    Ok((PI * w).cos() * (PI * w * sech(omega0 / (2.0 * t))).cos())
}

pub fn loschmidt_half_limit(winding: u32, limit: TemperatureLimit) -> f64 {
    match limit {
        TemperatureLimit::Zero => {
            if winding.is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        }
        TemperatureLimit::Infinite => 1.0,
    }
}

/// j = 1 closed form, evaluated in the overflow-free shape
/// ((1 + c) + c sech(beta omega0)) / (2 + sech(beta omega0)) with
/// c = cos(2 pi winding sech(beta omega0 / 2)).
pub fn loschmidt_spin1(omega0: f64, winding: u32, t: f64) -> Result<f64> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::NonPositiveTemperature(t));
    }
    let beta = 1.0 / t;
    let c = (2.0 * PI * winding as f64 * sech(beta * omega0 / 2.0)).cos();
    let s = sech(beta * omega0);
    Ok(((1.0 + c) + c * s) / (2.0 + s))
}

/// Both temperature limits of the j = 1 amplitude equal 1.
pub fn loschmidt_spin1_limit(_limit: TemperatureLimit) -> f64 {
    1.0
}

/// Critical temperatures of the j = 1/2 system, ascending:
/// T* = omega0 / (2 ln(x + sqrt(x^2 - 1))) with x = winding / (n + 1/2),
/// n = 0 .. winding - 1. Empty for winding 0.
pub fn tstar_half(omega0: f64, winding: u32) -> Vec<f64> {
    (0..winding)
        .map(|n| {
            let x = winding as f64 / (n as f64 + 0.5);
            omega0 / (2.0 * (x + (x * x - 1.0).sqrt()).ln())
        })
        .collect()
}

/// Geometrical generating function g = -ln(value^2), L = 1 convention,
/// clamped at -ln(1e-24) so exact zeros stay finite.
pub fn generating_function(loschmidt_value: f64) -> f64 {
    assert!(
        loschmidt_value.abs() <= 1.0 + 1e-9,
        "amplitude modulus {loschmidt_value} exceeds 1"
    );
    let sq = (loschmidt_value * loschmidt_value).max(1e-24);
    -sq.ln()
}

/// Scans the great-circle amplitude for sign changes on a log-spaced grid,
/// bisects each bracket to relative tolerance 1e-10, and labels the phases
/// between zeros. A refinement ladder (x4 grid, 3 rounds) guards against
/// zeros hiding inside a single cell; if refinement keeps finding new zeros
/// the scan aborts with `GridTooCoarse` instead of merging them.
pub fn find_tqpt_zeros(
    j: SpinJ,
    omega0: f64,
    winding: u32,
    t_range: (f64, f64),
    grid_n: usize,
) -> Result<TransitionReport> {
    let (lo, hi) = t_range;
    if lo <= 0.0 || hi <= lo {
        return Err(Error::NonPositiveTemperature(lo));
    }
    assert!(grid_n >= 64, "grid_n must be at least 64");
    let g = |t: f64| loschmidt_great_circle(j, omega0, winding, t);

    let brackets_at = |n: usize| -> Result<Vec<(f64, f64)>> {
        let grid = SweepSpec::log_grid(lo, hi, n);
        let mut brackets = Vec::new();
        let mut prev_t = grid[0];
        let mut prev_g = g(prev_t)?;
        for &t in &grid[1..] {
            let val = g(t)?;
            if prev_g.signum() != val.signum() {
                brackets.push((prev_t, t));
            }
            prev_t = t;
            prev_g = val;
        }
        Ok(brackets)
    };

    let mut brackets = brackets_at(grid_n)?;
    let mut n = grid_n;
    let mut stable = false;
    for _ in 0..3 {
        n *= 4;
        let refined = brackets_at(n)?;
        if refined.len() == brackets.len() {
            brackets = refined;
            stable = true;
            break;
        }
        brackets = refined;
    }
    if !stable {
        let t_hint = brackets.first().map_or(lo, |b| b.0);
        return Err(Error::GridTooCoarse(t_hint));
    }

    let mut tstars = Vec::with_capacity(brackets.len());
    for (mut a, mut b) in brackets {
        let mut ga = g(a)?;
        while (b - a) > 1e-10 * 0.5 * (a + b) {
            let mid = 0.5 * (a + b);
            let gm = g(mid)?;
            if gm.signum() == ga.signum() {
                a = mid;
                ga = gm;
            } else {
                b = mid;
            }
        }
        tstars.push(0.5 * (a + b));
    }

    // Phase labels on the intervals, from the sign at geometric midpoints.
    let mut edges = vec![lo];
    edges.extend(&tstars);
    edges.push(hi);
    let mut phase_labels = Vec::with_capacity(edges.len() - 1);
    for pair in edges.windows(2) {
        let mid = (pair[0] * pair[1]).sqrt();
        phase_labels.push(if g(mid)? < 0.0 { PI } else { 0.0 });
    }
    debug_assert!(phase_labels.windows(2).all(|w| w[0] != w[1]));
    Ok(TransitionReport {
        tstars,
        phase_labels,
    })
}
