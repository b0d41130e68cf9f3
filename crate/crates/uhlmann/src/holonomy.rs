//! Uhlmann connection of the spin-j paramagnet, path-ordered holonomy over
//! closed parameter loops, Loschmidt amplitude / Uhlmann phase, curvature,
//! and the (vanishing) Chern number.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::analytic::generating_function;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::spin::{hermitian_exp, SphereAngles, SpinOperators};
use crate::thermal::{density_matrix, DensityMatrix, ThermalSpec};

/// Connection strength chi = 1 - sech(beta omega0 / 2). Zero at infinite
/// temperature, one in the zero-temperature (Berry) limit.
pub fn chi(spec: &ThermalSpec) -> f64 {
    1.0 - linalg::sech(spec.beta() * spec.omega0() / 2.0)
}

/// The two directional components of the Uhlmann connection one-form,
/// A_U = a_theta dtheta + a_phi dphi. Both are anti-Hermitian.
#[derive(Debug, Clone)]
pub struct ConnectionAtPoint {
    pub a_theta: CMatrix,
    pub a_phi: CMatrix,
}

/// Closed-form spin-j Uhlmann connection:
/// a_theta = -i chi (J_x sin p - J_y cos p),
/// a_phi   = -i chi [(J_x cos p + J_y sin p) cos t - J_z sin t] sin t.
pub fn connection_spin_j(ops: &SpinOperators, a: SphereAngles, chi: f64) -> ConnectionAtPoint {
    let mi = Complex64::new(0.0, -1.0);
    let (st, ct) = (a.theta.sin(), a.theta.cos());
    let (sp, cp) = (a.phi.sin(), a.phi.cos());
    let a_theta = (ops.jx.scale(sp) - ops.jy.scale(cp)) * (mi * chi);
    let a_phi =
        ((ops.jx.scale(cp) + ops.jy.scale(sp)).scale(ct) - ops.jz.scale(st)) * (mi * chi * st);
    ConnectionAtPoint { a_theta, a_phi }
}

/// General eigen-decomposition form of the Uhlmann connection,
/// A_U = -sum_{mn} |m><m| [d sqrt(rho), sqrt(rho)] |n><n| / (lambda_m + lambda_n),
/// with d sqrt(rho) from central finite differences of the supplied family.
/// Serves as the independent cross-check of `connection_spin_j`.
pub fn connection_general<F>(family: F, a: SphereAngles, fd_step: f64) -> Result<ConnectionAtPoint>
where
    F: Fn(SphereAngles) -> Result<DensityMatrix>,
{
    assert!(
        fd_step > 0.0 && fd_step <= 1e-3,
        "fd_step must lie in (0, 1e-3]"
    );
    let dm = family(a)?;
    let min_eig = dm.eigvals.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < 1e-14 {
        return Err(Error::RankDeficient(min_eig));
    }
    let sqrt_at = |angles: SphereAngles| -> Result<CMatrix> {
        Ok(crate::thermal::sqrt_density(&family(angles)?))
    };
    let root = crate::thermal::sqrt_density(&dm);
    let component = |plus: SphereAngles, minus: SphereAngles| -> Result<CMatrix> {
        let d_root = (sqrt_at(plus)? - sqrt_at(minus)?).scale(0.5 / fd_step);
        let comm = &d_root * &root - &root * &d_root;
        let mut s = dm.eigvecs.adjoint() * comm * &dm.eigvecs;
        for m in 0..dm.dim() {
            for n in 0..dm.dim() {
                s[(m, n)] /= Complex64::new(dm.eigvals[m] + dm.eigvals[n], 0.0);
            }
        }
        Ok((&dm.eigvecs * s * dm.eigvecs.adjoint()).scale(-1.0))
    };
    let a_theta = component(
        SphereAngles::new(a.theta + fd_step, a.phi),
        SphereAngles::new(a.theta - fd_step, a.phi),
    )?;
    let a_phi = component(
        SphereAngles::new(a.theta, a.phi + fd_step),
        SphereAngles::new(a.theta, a.phi - fd_step),
    )?;
    Ok(ConnectionAtPoint { a_theta, a_phi })
}

/// A closed parameterized curve t in [0, 1] on the parameter sphere.
/// Winding counts full turns of the driven angle; negative values reverse
/// the orientation.
#[derive(Debug, Clone)]
pub enum LoopPath {
    /// theta(t) = 2 pi winding t at fixed phi0, starting on the north pole.
    Longitude { phi0: f64, winding: i32 },
    /// phi(t) = 2 pi winding t at theta = pi/2, starting at phi = 0.
    Equator { winding: i32 },
    /// Piecewise-linear interpolation of (t, angles) samples.
    Custom {
        samples: Vec<(f64, SphereAngles)>,
        winding: i32,
    },
}

impl LoopPath {
    pub fn longitude(phi0: f64, winding: i32) -> Self {
        Self::Longitude { phi0, winding }
    }

    pub fn equator(winding: i32) -> Self {
        Self::Equator { winding }
    }

    /// Samples must start at t = 0, end at t = 1, with strictly increasing t.
    pub fn custom(samples: Vec<(f64, SphereAngles)>, winding: i32) -> Result<Self> {
        let ok = samples.len() >= 2
            && samples[0].0 == 0.0
            && samples[samples.len() - 1].0 == 1.0
            && samples.windows(2).all(|w| w[0].0 < w[1].0);
        if !ok {
            return Err(Error::PathNotClosed(f64::NAN));
        }
        let path = Self::Custom { samples, winding };
        path.check_closed()?;
        Ok(path)
    }

    pub fn winding(&self) -> i32 {
        match self {
            Self::Longitude { winding, .. }
            | Self::Equator { winding }
            | Self::Custom { winding, .. } => *winding,
        }
    }

    pub fn sample(&self, t: f64) -> SphereAngles {
        match self {
            Self::Longitude { phi0, winding } => {
                SphereAngles::new(2.0 * PI * *winding as f64 * t, *phi0)
            }
            Self::Equator { winding } => {
                SphereAngles::new(PI / 2.0, 2.0 * PI * *winding as f64 * t)
            }
            Self::Custom { samples, .. } => {
                if t <= samples[0].0 {
                    return samples[0].1;
                }
                if t >= samples[samples.len() - 1].0 {
                    return samples[samples.len() - 1].1;
                }
                let idx = samples.partition_point(|(ti, _)| *ti <= t);
                let (t0, a0) = samples[idx - 1];
                let (t1, a1) = samples[idx];
                let u = (t - t0) / (t1 - t0);
                SphereAngles::new(
                    a0.theta + u * (a1.theta - a0.theta),
                    a0.phi + u * (a1.phi - a0.phi),
                )
            }
        }
    }

    /// Endpoints must denote the same point on S^2; the comparison is made on
    /// the embedded unit vectors, so windings and theta reflections are fine.
    pub fn check_closed(&self) -> Result<()> {
        let start = self.sample(0.0).unit_vector();
        let end = self.sample(1.0).unit_vector();
        let gap = start
            .iter()
            .zip(end.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if gap > 1e-9 {
            return Err(Error::PathNotClosed(gap));
        }
        Ok(())
    }

    /// Same loop traversed backwards.
    pub fn reversed(&self) -> Self {
        match self {
            Self::Longitude { phi0, winding } => Self::Longitude {
                phi0: *phi0,
                winding: -winding,
            },
            Self::Equator { winding } => Self::Equator { winding: -winding },
            Self::Custom { samples, winding } => Self::Custom {
                samples: samples
                    .iter()
                    .rev()
                    .map(|(t, a)| (1.0 - t, *a))
                    .collect(),
                winding: -winding,
            },
        }
    }
}

/// Outcome of a path-ordered holonomy evaluation.
#[derive(Debug, Clone)]
pub struct HolonomyResult {
    /// The transport matrix P exp(-closed-loop integral of A_U).
    pub holonomy: CMatrix,
    /// Loschmidt amplitude Tr[rho(0) holonomy].
    pub loschmidt: Complex64,
    /// Uhlmann phase: principal argument of the amplitude, in (-pi, pi].
    pub phase: f64,
    /// Generating function -ln |G|^2 (L = 1 convention), clamped.
    pub gen_fn: f64,
    pub steps_used: usize,
    /// Max-entry difference between the N- and 2N-step transport matrices.
    pub est_error: f64,
}

/// Controls for `holonomy_adaptive`.
#[derive(Debug, Clone, Copy)]
pub struct HolonomyOptions {
    pub tol: f64,
    pub initial_steps: usize,
    pub max_steps: usize,
}

impl Default for HolonomyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            initial_steps: 256,
            max_steps: 1 << 14,
        }
    }
}

/// One pass of the path-ordered product with midpoint sampling: each step
/// exponentiates the connection exactly, later factors multiply from the left.
fn transport(ops: &SpinOperators, chi: f64, path: &LoopPath, steps: usize) -> CMatrix {
    let dim = ops.j.dim();
    let mut u = CMatrix::identity(dim, dim);
    let mut prev = path.sample(0.0);
    for k in 0..steps {
        let next = path.sample((k + 1) as f64 / steps as f64);
        let mid = path.sample((k as f64 + 0.5) / steps as f64);
        let conn = connection_spin_j(ops, mid, chi);
        let m = conn.a_theta.scale(next.theta - prev.theta)
            + conn.a_phi.scale(next.phi - prev.phi);
        // m is anti-Hermitian; exp(-m) = e^{i g} with g = i m Hermitian.
        let g = m * Complex64::new(0.0, 1.0);
        let factor = hermitian_exp(&g, -1.0).expect("i * connection step is Hermitian");
        u = factor * u;
        prev = next;
    }
    u
}

fn assemble(
    ops: &SpinOperators,
    spec: &ThermalSpec,
    path: &LoopPath,
    holonomy: CMatrix,
    steps_used: usize,
    est_error: f64,
) -> Result<HolonomyResult> {
    let rho0 = density_matrix(ops, spec, path.sample(0.0))?;
    let loschmidt = (&rho0.rho * &holonomy).trace();
    debug_assert!(loschmidt.norm() <= 1.0 + 1e-9);
    let mut phase = loschmidt.arg();
    if phase <= -PI {
        phase = PI;
    }
    let gen_fn = generating_function(loschmidt.norm());
    Ok(HolonomyResult {
        holonomy,
        loschmidt,
        phase,
        gen_fn,
        steps_used,
        est_error,
    })
}

/// Path-ordered Uhlmann holonomy with a fixed step count (>= 16). The result
/// uses 2 * steps; the extra pass at `steps` feeds the step-doubling error
/// estimate.
pub fn holonomy(
    ops: &SpinOperators,
    spec: &ThermalSpec,
    path: &LoopPath,
    steps: usize,
) -> Result<HolonomyResult> {
    if steps < 16 {
        return Err(Error::InvalidSteps(steps));
    }
    path.check_closed()?;
    let x = chi(spec);
    let coarse = transport(ops, x, path, steps);
    let fine = transport(ops, x, path, 2 * steps);
    let est_error = linalg::max_abs_diff(&fine, &coarse);
    assemble(ops, spec, path, fine, 2 * steps, est_error)
}

/// Doubles the step count until the step-doubling error estimate drops below
/// `opts.tol`, failing with `NotConverged` at `opts.max_steps`.
pub fn holonomy_adaptive(
    ops: &SpinOperators,
    spec: &ThermalSpec,
    path: &LoopPath,
    opts: HolonomyOptions,
) -> Result<HolonomyResult> {
    path.check_closed()?;
    let x = chi(spec);
    let mut steps = opts.initial_steps.max(16);
    let mut coarse = transport(ops, x, path, steps);
    loop {
        let fine = transport(ops, x, path, 2 * steps);
        let est_error = linalg::max_abs_diff(&fine, &coarse);
        if est_error <= opts.tol {
            return assemble(ops, spec, path, fine, 2 * steps, est_error);
        }
        if 2 * steps >= opts.max_steps {
            return Err(Error::NotConverged {
                err: est_error,
                tol: opts.tol,
                steps: 2 * steps,
            });
        }
        steps *= 2;
        coarse = fine;
    }
}

/// Z2 classification of an Uhlmann phase: values cluster at 0 and pi away
/// from transitions, so snap on |theta| = pi/2.
pub fn snap_phase(theta_u: f64) -> f64 {
    if theta_u.abs() < PI / 2.0 {
        0.0
    } else {
        PI
    }
}

/// Closed-form Uhlmann curvature (coefficient of dtheta ^ dphi):
/// F_U = i tanh^2(beta omega0 / 2) sin t (J_x sin t cos p + J_y sin t sin p + J_z cos t).
pub fn curvature(ops: &SpinOperators, spec: &ThermalSpec, a: SphereAngles) -> CMatrix {
    let th = (spec.beta() * spec.omega0() / 2.0).tanh();
    let (st, ct) = (a.theta.sin(), a.theta.cos());
    let (sp, cp) = (a.phi.sin(), a.phi.cos());
    let direction = ops.jx.scale(st * cp) + ops.jy.scale(st * sp) + ops.jz.scale(ct);
    direction * Complex64::new(0.0, th * th * st)
}

/// Curvature from F = dA + A ^ A with central finite differences of the
/// closed-form connection; cross-validates `curvature`.
pub fn curvature_fd(ops: &SpinOperators, spec: &ThermalSpec, a: SphereAngles, h: f64) -> CMatrix {
    let x = chi(spec);
    let at = |theta: f64, phi: f64| connection_spin_j(ops, SphereAngles::new(theta, phi), x);
    let d_theta_a_phi = (at(a.theta + h, a.phi).a_phi - at(a.theta - h, a.phi).a_phi)
        .scale(0.5 / h);
    let d_phi_a_theta = (at(a.theta, a.phi + h).a_theta - at(a.theta, a.phi - h).a_theta)
        .scale(0.5 / h);
    let conn = at(a.theta, a.phi);
    let wedge = &conn.a_theta * &conn.a_phi - &conn.a_phi * &conn.a_theta;
    d_theta_a_phi - d_phi_a_theta + wedge
}

/// Composite trapezoid quadrature on a rectangle; second-order accurate.
fn trapezoid_2d<F>(f: F, x_range: (f64, f64), y_range: (f64, f64), nx: usize, ny: usize) -> Complex64
where
    F: Fn(f64, f64) -> Complex64,
{
    let hx = (x_range.1 - x_range.0) / nx as f64;
    let hy = (y_range.1 - y_range.0) / ny as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..=nx {
        let wx = if i == 0 || i == nx { 0.5 } else { 1.0 };
        let x = x_range.0 + i as f64 * hx;
        for k in 0..=ny {
            let wy = if k == 0 || k == ny { 0.5 } else { 1.0 };
            sum += f(x, y_range.0 + k as f64 * hy) * (wx * wy);
        }
    }
    sum * Complex64::new(hx * hy, 0.0)
}

/// Chern number of the Uhlmann connection, (i / 2 pi) integral of Tr F_U over
/// the sphere. Vanishes identically since the J matrices are traceless.
pub fn chern_number(ops: &SpinOperators, spec: &ThermalSpec, grid: (usize, usize)) -> f64 {
    let (ntheta, nphi) = grid;
    assert!(ntheta >= 8 && nphi >= 8, "grid must be at least 8 x 8");
    let integral = trapezoid_2d(
        |theta, phi| curvature(ops, spec, SphereAngles::new(theta, phi)).trace(),
        (0.0, PI),
        (0.0, 2.0 * PI),
        ntheta,
        nphi,
    );
    let ch = integral * Complex64::new(0.0, 1.0 / (2.0 * PI));
    debug_assert!(ch.im.abs() < 1e-9);
    ch.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_error, max_abs, max_abs_diff};
    use crate::spin::SpinJ;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(t: f64, omega0: f64, two_j: u32) -> ThermalSpec {
        ThermalSpec::new(t, omega0, SpinJ::new(two_j)).unwrap()
    }

    /// Loschmidt amplitude of a great circle straight from the Wigner-d sum.
    fn analytic_great_circle(spec: &ThermalSpec, winding: i32) -> f64 {
        let weights = spec.boltzmann_weights();
        let theta = 2.0 * PI * winding as f64 * chi(spec);
        let j = spec.j();
        weights
            .iter()
            .zip(j.two_m_values())
            .map(|(w, tm)| w * crate::spin::wigner_d(j, tm, tm, theta).unwrap())
            .sum()
    }

    /// A tilted circle on S^2 around an axis at polar angle `alpha`, sampled
    /// densely enough for linear interpolation; phi is unwrapped.
    fn tilted_circle(alpha: f64, n: usize, warp: f64) -> Vec<(f64, SphereAngles)> {
        let (e1, e2, axis) = (
            [alpha.cos(), 0.0, -alpha.sin()],
            [0.0, 1.0, 0.0],
            [alpha.sin(), 0.0, alpha.cos()],
        );
        let _ = axis;
        let mut samples = Vec::with_capacity(n + 1);
        let mut prev_phi: f64 = 0.0;
        for k in 0..=n {
            let t = k as f64 / n as f64;
            // Optional nonuniform traversal speed, same geometric image.
            let s = t + warp * (2.0 * PI * t).sin() / (2.0 * PI);
            let ang = 2.0 * PI * s;
            let p: Vec<f64> = (0..3)
                .map(|i| ang.cos() * e1[i] + ang.sin() * e2[i])
                .collect();
            let theta = p[2].clamp(-1.0, 1.0).acos();
            let mut phi = p[1].atan2(p[0]);
            while phi - prev_phi > PI {
                phi -= 2.0 * PI;
            }
            while phi - prev_phi < -PI {
                phi += 2.0 * PI;
            }
            prev_phi = phi;
            samples.push((t, SphereAngles::new(theta, phi)));
        }
        samples.last_mut().unwrap().0 = 1.0;
        samples
    }

    #[test]
    fn chi_limits_and_value() {
        assert!(chi(&spec(1e12, 1.0, 1)).abs() < 1e-9);
        assert!((chi(&spec(1e-12, 1.0, 1)) - 1.0).abs() < 1e-12);
        // beta = 2, omega0 = 1: 1 - 1/cosh(1).
        assert!((chi(&spec(0.5, 1.0, 1)) - 0.351945726).abs() < 1e-9);
        // Monotone increasing in beta.
        let values: Vec<f64> = [10.0, 3.0, 1.0, 0.3, 0.1]
            .iter()
            .map(|&t| chi(&spec(t, 1.0, 1)))
            .collect();
        assert!(values.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn connection_half_spin_explicit() {
        let ops = SpinOperators::new(SpinJ::new(1));
        let x = 0.37;
        for (theta, phi) in [(0.9, 0.4), (2.2, -1.0)] {
            let conn = connection_spin_j(&ops, SphereAngles::new(theta, phi), x);
            let e_m = Complex64::from_polar(1.0, -phi);
            let e_p = Complex64::from_polar(1.0, phi);
            let a_theta = CMatrix::from_row_slice(
                2,
                2,
                &[c(0.0, 0.0), e_m, -e_p, c(0.0, 0.0)],
            )
            .scale(x / 2.0);
            // The dphi component carries the overall sin(theta) of the general
            // form; the equator value i chi J_z is recovered at theta = pi/2.
            let a_phi = CMatrix::from_row_slice(
                2,
                2,
                &[
                    c(-theta.sin(), 0.0),
                    theta.cos() * e_m,
                    theta.cos() * e_p,
                    c(theta.sin(), 0.0),
                ],
            ) * c(0.0, -x / 2.0)
                * c(theta.sin(), 0.0);
            assert!(max_abs_diff(&conn.a_theta, &a_theta) < 1e-14);
            assert!(max_abs_diff(&conn.a_phi, &a_phi) < 1e-14);
        }
    }

    #[test]
    fn connection_spin_one_explicit() {
        let ops = SpinOperators::new(SpinJ::new(2));
        let x = 0.52;
        let (theta, phi) = (1.3, 0.7);
        let conn = connection_spin_j(&ops, SphereAngles::new(theta, phi), x);
        let e_m = Complex64::from_polar(1.0, -phi);
        let e_p = Complex64::from_polar(1.0, phi);
        let r2 = 2.0_f64.sqrt();
        let a_theta = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.0, 0.0),
                e_m,
                c(0.0, 0.0),
                -e_p,
                c(0.0, 0.0),
                e_m,
                c(0.0, 0.0),
                -e_p,
                c(0.0, 0.0),
            ],
        )
        .scale(x / r2);
        let a_phi = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(-r2 * theta.sin(), 0.0),
                theta.cos() * e_m,
                c(0.0, 0.0),
                theta.cos() * e_p,
                c(0.0, 0.0),
                theta.cos() * e_m,
                c(0.0, 0.0),
                theta.cos() * e_p,
                c(r2 * theta.sin(), 0.0),
            ],
        ) * c(0.0, -x / r2)
            * c(theta.sin(), 0.0);
        assert!(max_abs_diff(&conn.a_theta, &a_theta) < 1e-14);
        assert!(max_abs_diff(&conn.a_phi, &a_phi) < 1e-14);
    }

    #[test]
    fn connection_on_equator_is_i_chi_jz() {
        let ops = SpinOperators::new(SpinJ::new(3));
        let x = 0.8;
        let conn = connection_spin_j(&ops, SphereAngles::new(PI / 2.0, 1.1), x);
        assert!(max_abs_diff(&conn.a_phi, &(&ops.jz * c(0.0, x))) < 1e-14);
    }

    #[test]
    fn connection_components_anti_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for two_j in [1u32, 2, 3, 4] {
            let ops = SpinOperators::new(SpinJ::new(two_j));
            for _ in 0..6 {
                let a = SphereAngles::new(rng.gen_range(0.0..PI), rng.gen_range(-PI..PI));
                let conn = connection_spin_j(&ops, a, rng.gen_range(0.0..1.0));
                for m in [&conn.a_theta, &conn.a_phi] {
                    assert!(max_abs(&(m + m.adjoint())) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn general_connection_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for two_j in [1u32, 2, 3] {
            let ops = SpinOperators::new(SpinJ::new(two_j));
            for _ in 0..20 {
                let s = spec(rng.gen_range(0.2..3.0), 1.0, two_j);
                // Stay away from the poles where the finite-difference family
                // parameterization is fine but sin(theta) factors vanish anyway.
                let a = SphereAngles::new(rng.gen_range(0.2..2.9), rng.gen_range(-3.0..3.0));
                let ops_ref = &ops;
                let general = connection_general(
                    move |ang| density_matrix(ops_ref, &s, ang),
                    a,
                    1e-5,
                )
                .unwrap();
                let closed = connection_spin_j(&ops, a, chi(&s));
                assert!(max_abs_diff(&general.a_theta, &closed.a_theta) < 1e-6);
                assert!(max_abs_diff(&general.a_phi, &closed.a_phi) < 1e-6);
            }
        }
    }

    #[test]
    fn general_connection_near_pure_state() {
        // beta = 50 with omega0 = 0.5 keeps the smallest weight above the
        // rank cutoff while chi = 1 - sech(12.5) is within 1e-5 of 1.
        let ops = SpinOperators::new(SpinJ::new(1));
        let s = spec(0.02, 0.5, 1);
        let a = SphereAngles::new(1.1, 0.6);
        let ops_ref = &ops;
        let general =
            connection_general(move |ang| density_matrix(ops_ref, &s, ang), a, 1e-5).unwrap();
        let berry_limit = connection_spin_j(&ops, a, 1.0);
        assert!(max_abs_diff(&general.a_theta, &berry_limit.a_theta) < 1e-4);
        assert!(max_abs_diff(&general.a_phi, &berry_limit.a_phi) < 1e-4);
    }

    #[test]
    fn general_connection_rejects_rank_deficient() {
        let ops = SpinOperators::new(SpinJ::new(1));
        let s = spec(0.01, 1.0, 1); // min weight ~ e^{-100}
        let ops_ref = &ops;
        let err = connection_general(
            move |ang| density_matrix(ops_ref, &s, ang),
            SphereAngles::new(1.0, 0.0),
            1e-5,
        );
        assert!(matches!(err, Err(Error::RankDeficient(_))));
    }

    #[test]
    fn general_connection_spin_zero_vanishes() {
        let ops = SpinOperators::new(SpinJ::new(0));
        let s = spec(1.0, 1.0, 0);
        let ops_ref = &ops;
        let conn = connection_general(
            move |ang| density_matrix(ops_ref, &s, ang),
            SphereAngles::new(1.0, 0.5),
            1e-5,
        )
        .unwrap();
        assert!(max_abs(&conn.a_theta) < 1e-12);
        assert!(max_abs(&conn.a_phi) < 1e-12);
    }

    #[test]
    fn equator_holonomy_matches_constant_exponential() {
        let ops = SpinOperators::new(SpinJ::new(2));
        let s = spec(0.7, 1.0, 2);
        let x = chi(&s);
        for winding in [1i32, 2] {
            let res = holonomy(&ops, &s, &LoopPath::equator(winding), 128).unwrap();
            let expect =
                hermitian_exp(&ops.jz, 2.0 * PI * winding as f64 * x).unwrap();
            assert!(max_abs_diff(&res.holonomy, &expect) < 1e-9);
        }
    }

    #[test]
    fn longitude_holonomy_matches_rotated_exponential() {
        let ops = SpinOperators::new(SpinJ::new(1));
        let s = spec(0.4, 1.0, 1);
        let x = chi(&s);
        let phi0 = 1.3;
        let winding = 2;
        let res = holonomy(&ops, &s, &LoopPath::longitude(phi0, winding), 128).unwrap();
        // closed-loop integral of A = 2 pi i chi W e^{-i phi Jz} J_y e^{i phi Jz};
        // exponentiate the Hermitian generator.
        let gen = ops.exp_jz(phi0) * &ops.jy * ops.exp_jz(-phi0);
        let expect = hermitian_exp(&gen, 2.0 * PI * x * winding as f64).unwrap();
        assert!(max_abs_diff(&res.holonomy, &expect) < 1e-9);
    }

    #[test]
    fn holonomy_reproduces_analytic_loschmidt() {
        for two_j in [1u32, 2, 3] {
            let ops = SpinOperators::new(SpinJ::new(two_j));
            for winding in [1i32, 2] {
                for t in [0.3, 1.0] {
                    let s = spec(t, 1.0, two_j);
                    let expect = analytic_great_circle(&s, winding);
                    for path in [LoopPath::longitude(0.7, winding), LoopPath::equator(winding)] {
                        let res =
                            holonomy_adaptive(&ops, &s, &path, HolonomyOptions::default())
                                .unwrap();
                        assert!(
                            (res.loschmidt.re - expect).abs() < 1e-6,
                            "2j={two_j} winding={winding} T={t}: {} vs {expect}",
                            res.loschmidt.re
                        );
                        assert!(res.loschmidt.im.abs() < 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn longitude_result_independent_of_phi0() {
        let ops = SpinOperators::new(SpinJ::new(3));
        let s = spec(0.6, 1.0, 3);
        let base = holonomy(&ops, &s, &LoopPath::longitude(0.0, 1), 256)
            .unwrap()
            .loschmidt;
        for phi0 in [1.0, 2.0, 3.0] {
            let g = holonomy(&ops, &s, &LoopPath::longitude(phi0, 1), 256)
                .unwrap()
                .loschmidt;
            assert!((g - base).norm() < 1e-8);
        }
    }

    #[test]
    fn infinite_temperature_holonomy_is_trivial() {
        let ops = SpinOperators::new(SpinJ::new(2));
        let s = spec(1e6, 1.0, 2);
        let res = holonomy(&ops, &s, &LoopPath::longitude(0.0, 1), 64).unwrap();
        assert!(max_abs_diff(&res.holonomy, &CMatrix::identity(3, 3)) < 1e-9);
        assert!((res.loschmidt - c(1.0, 0.0)).norm() < 1e-9);
        assert!(res.phase.abs() < 1e-9);
    }

    #[test]
    fn holonomy_rejects_too_few_steps() {
        let ops = SpinOperators::new(SpinJ::new(1));
        let s = spec(1.0, 1.0, 1);
        assert!(matches!(
            holonomy(&ops, &s, &LoopPath::equator(1), 8),
            Err(Error::InvalidSteps(8))
        ));
    }

    #[test]
    fn open_path_is_rejected() {
        let samples = vec![
            (0.0, SphereAngles::new(0.5, 0.0)),
            (1.0, SphereAngles::new(0.5, 2.0)),
        ];
        assert!(matches!(
            LoopPath::custom(samples, 0),
            Err(Error::PathNotClosed(_))
        ));
    }

    #[test]
    fn tilted_loop_reversal_inverts_holonomy() {
        let ops = SpinOperators::new(SpinJ::new(2));
        let s = spec(0.5, 1.0, 2);
        let path = LoopPath::custom(tilted_circle(0.6, 400, 0.0), 1).unwrap();
        let forward = holonomy(&ops, &s, &path, 512).unwrap();
        let backward = holonomy(&ops, &s, &path.reversed(), 512).unwrap();
        let product = &forward.holonomy * &backward.holonomy;
        assert!(max_abs_diff(&product, &CMatrix::identity(3, 3)) < 1e-5);
        assert!((forward.loschmidt.norm() - backward.loschmidt.norm()).abs() < 1e-6);
    }

    #[test]
    fn step_doubling_error_decays_second_order_on_noncommuting_loop() {
        let ops = SpinOperators::new(SpinJ::new(1));
        let s = spec(0.5, 1.0, 1);
        let path = LoopPath::custom(tilted_circle(0.8, 2048, 0.0), 1).unwrap();
        let coarse = holonomy(&ops, &s, &path, 64).unwrap();
        let fine = holonomy(&ops, &s, &path, 128).unwrap();
        let ratio = coarse.est_error / fine.est_error;
        assert!(
            (2.5..6.0).contains(&ratio),
            "expected ~4x decay, got {ratio} ({} -> {})",
            coarse.est_error,
            fine.est_error
        );
    }

    #[test]
    fn reparameterized_loop_gives_same_holonomy() {
        let ops = SpinOperators::new(SpinJ::new(1));
        let s = spec(0.5, 1.0, 1);
        let uniform = LoopPath::custom(tilted_circle(0.8, 4096, 0.0), 1).unwrap();
        let warped = LoopPath::custom(tilted_circle(0.8, 4096, 0.6), 1).unwrap();
        let a = holonomy(&ops, &s, &uniform, 2048).unwrap();
        let b = holonomy(&ops, &s, &warped, 2048).unwrap();
        assert!((a.loschmidt - b.loschmidt).norm() < 1e-7);
    }

    #[test]
    fn adaptive_holonomy_reports_nonconvergence() {
        let ops = SpinOperators::new(SpinJ::new(1));
        let s = spec(0.5, 1.0, 1);
        let path = LoopPath::custom(tilted_circle(0.8, 512, 0.0), 1).unwrap();
        let opts = HolonomyOptions {
            tol: 1e-15,
            initial_steps: 16,
            max_steps: 64,
        };
        assert!(matches!(
            holonomy_adaptive(&ops, &s, &path, opts),
            Err(Error::NotConverged { .. })
        ));
    }

    #[test]
    fn tilted_great_circle_probe() {
        // Conjecture: any great circle gives the same Loschmidt amplitude as
        // the longitude/equator closed form. Unproven, so this reports the
        // deviation instead of asserting equality; only basic sanity is
        // enforced.
        let ops = SpinOperators::new(SpinJ::new(2));
        for alpha in [0.4, 0.9] {
            for t in [0.3, 1.0] {
                let s = spec(t, 1.0, 2);
                let path = LoopPath::custom(tilted_circle(alpha, 8192, 0.0), 1).unwrap();
                let res = holonomy(&ops, &s, &path, 4096).unwrap();
                let closed = analytic_great_circle(&s, 1);
                println!(
                    "tilted great circle (alpha={alpha}, T={t}): G = {:+.9} {:+.3e}i, \
                     closed form {:+.9}, deviation {:.3e}",
                    res.loschmidt.re,
                    res.loschmidt.im,
                    closed,
                    (res.loschmidt - c(closed, 0.0)).norm()
                );
                assert!(res.loschmidt.norm() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn snap_phase_classifies() {
        assert_eq!(snap_phase(0.001), 0.0);
        assert_eq!(snap_phase(-3.1), PI);
        assert_eq!(snap_phase(PI), PI);
    }

    #[test]
    fn curvature_vanishes_on_poles_and_is_traceless() {
        let ops = SpinOperators::new(SpinJ::new(3));
        let s = spec(0.8, 1.2, 3);
        for phi in [0.0, 1.0] {
            assert!(max_abs(&curvature(&ops, &s, SphereAngles::new(0.0, phi))) < 1e-14);
            assert!(max_abs(&curvature(&ops, &s, SphereAngles::new(PI, phi))) < 1e-13);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = SphereAngles::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI));
            assert!(curvature(&ops, &s, a).trace().norm() < 1e-12);
        }
    }

    #[test]
    fn curvature_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for two_j in [1u32, 2] {
            let ops = SpinOperators::new(SpinJ::new(two_j));
            for _ in 0..20 {
                let s = spec(rng.gen_range(0.2..4.0), 1.0, two_j);
                let a = SphereAngles::new(rng.gen_range(0.1..3.0), rng.gen_range(-3.0..3.0));
                let closed = curvature(&ops, &s, a);
                let fd = curvature_fd(&ops, &s, a, 1e-5);
                assert!(
                    max_abs_diff(&closed, &fd) < 1e-6,
                    "2j={two_j}: {}",
                    max_abs_diff(&closed, &fd)
                );
                assert!(hermiticity_error(&(closed * c(0.0, 1.0))) < 1e-10);
            }
        }
    }

    #[test]
    fn chern_number_vanishes() {
        for two_j in [0u32, 1, 2] {
            let ops = SpinOperators::new(SpinJ::new(two_j));
            for t in [0.2, 1.0, 5.0] {
                let s = spec(t, 1.0, two_j);
                assert!(chern_number(&ops, &s, (64, 64)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn quadrature_is_second_order() {
        // Known integral: int_0^pi int_0^1 sin(x) y^3 dy dx = 2 * 1/4.
        let f = |x: f64, y: f64| c(x.sin() * y * y * y, 0.0);
        let exact = 0.5;
        let coarse = (trapezoid_2d(f, (0.0, PI), (0.0, 1.0), 16, 16).re - exact).abs();
        let fine = (trapezoid_2d(f, (0.0, PI), (0.0, 1.0), 32, 32).re - exact).abs();
        let ratio = coarse / fine;
        assert!((3.0..5.5).contains(&ratio), "ratio {ratio}");
    }
}
