use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

use uhlmann::analytic::{
    find_tqpt_zeros, generating_function, loschmidt_great_circle, loschmidt_great_circle_complex,
    tstar_half, SweepSpec,
};
use uhlmann::circuit::{
    angles_from_weights, build_prep_circuit, circuit_to_text, run_protocol_on_register,
    WeightVector,
};
use uhlmann::holonomy::{
    chern_number, connection_general, connection_spin_j, curvature, curvature_fd,
    holonomy_adaptive, snap_phase, HolonomyOptions, LoopPath,
};
use uhlmann::linalg::max_abs_diff;
use uhlmann::protocol::{evolve, protocol_fidelity, transport_residual, ProtocolSchedule};
use uhlmann::spin::{SphereAngles, SpinJ, SpinOperators};
use uhlmann::{chi, density_matrix, ThermalSpec};

use crate::config::{OutputFormat, RunConfig, Spacing};

pub type Runner = fn(&RunConfig) -> Result<u8, String>;

/// 12 significant digits, locale-independent.
fn sig12(x: f64) -> String {
    format!("{:.11e}", x)
}

fn write_output(cfg: &RunConfig, content: &str) -> Result<(), String> {
    match &cfg.output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn temperature_grid(cfg: &RunConfig) -> Vec<f64> {
    match cfg.spacing {
        Spacing::Log => SweepSpec::log_grid(cfg.tmin, cfg.tmax, cfg.count),
        Spacing::Linear => SweepSpec::linear_grid(cfg.tmin, cfg.tmax, cfg.count),
    }
}

/// Reported grid value -> physical temperature (natural units scale by omega0).
fn physical_t(cfg: &RunConfig, grid_value: f64) -> f64 {
    if cfg.natural_units {
        grid_value * cfg.omega0
    } else {
        grid_value
    }
}

#[derive(Serialize)]
struct SweepRow {
    #[serde(rename = "T")]
    t: f64,
    #[serde(rename = "G_real")]
    g_real: f64,
    #[serde(rename = "G_imag")]
    g_imag: f64,
    #[serde(rename = "theta_U")]
    theta_u: f64,
    g: f64,
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<u8, String> {
    let j = SpinJ::new(cfg.two_j);
    let shown = temperature_grid(cfg);
    let physical: Vec<f64> = shown.iter().map(|&t| physical_t(cfg, t)).collect();
    let sweep = SweepSpec::new(j, cfg.omega0, cfg.winding, physical).map_err(|e| e.to_string())?;
    let rows: Result<Vec<SweepRow>, String> = shown
        .par_iter()
        .zip(sweep.t_grid.par_iter())
        .map(|(&grid_t, &t)| {
            let amp = loschmidt_great_circle_complex(j, cfg.omega0, cfg.winding, t)
                .map_err(|e| e.to_string())?;
            let raw = amp.im.atan2(amp.re);
            let theta_u = if cfg.raw_phase { raw } else { snap_phase(raw) };
            Ok(SweepRow {
                t: grid_t,
                g_real: amp.re,
                g_imag: amp.im,
                theta_u,
                g: generating_function(amp.norm()),
            })
        })
        .collect();
    let rows = rows?;

    let content = match cfg.format {
        OutputFormat::Csv => {
            let mut out = String::from("T,G_real,G_imag,theta_U,g\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    sig12(r.t),
                    sig12(r.g_real),
                    sig12(r.g_imag),
                    sig12(r.theta_u),
                    sig12(r.g)
                );
            }
            out
        }
        OutputFormat::Json => {
            let body = serde_json::json!({ "rows": rows });
            format!("{}\n", serde_json::to_string(&body).unwrap())
        }
    };
    write_output(cfg, &content)?;
    Ok(0)
}

pub fn cmd_tstar(cfg: &RunConfig) -> Result<u8, String> {
    let j = SpinJ::new(cfg.two_j);
    let grid_n = cfg.count.max(64);
    let (lo, hi) = (physical_t(cfg, cfg.tmin), physical_t(cfg, cfg.tmax));
    let report =
        find_tqpt_zeros(j, cfg.omega0, cfg.winding, (lo, hi), grid_n).map_err(|e| e.to_string())?;

    let back = |t: f64| if cfg.natural_units { t / cfg.omega0 } else { t };
    let mut edges = vec![cfg.tmin];
    edges.extend(report.tstars.iter().map(|&t| back(t)));
    edges.push(cfg.tmax);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "# tstar report: j={} omega0={} winding={} trange=({},{}) grid={}",
        cfg.j_label(),
        sig12(cfg.omega0),
        cfg.winding,
        sig12(cfg.tmin),
        sig12(cfg.tmax),
        grid_n
    );
    for (k, label) in report.phase_labels.iter().enumerate() {
        let _ = writeln!(
            out,
            "interval {k}: T in ({}, {}), theta_U = {}",
            sig12(edges[k]),
            sig12(edges[k + 1]),
            sig12(*label)
        );
        if k < report.tstars.len() {
            let _ = writeln!(out, "tstar {k}: {}", sig12(back(report.tstars[k])));
        }
    }
    if cfg.two_j == 1 {
        let closed = tstar_half(cfg.omega0, cfg.winding);
        let max_dev = closed
            .iter()
            .zip(&report.tstars)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let _ = writeln!(
            out,
            "# closed-form cross-check (j = 1/2): {} zeros, max |T*_closed - T*_bisect| = {}",
            closed.len(),
            sig12(max_dev)
        );
    }
    write_output(cfg, &out)?;
    Ok(0)
}

struct Check {
    name: &'static str,
    max_dev: f64,
    tol: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.max_dev <= self.tol
    }
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<u8, String> {
    let j = SpinJ::new(cfg.two_j);
    let ops = SpinOperators::new(j);
    let temps = [0.3, 1.0, 3.0];
    let windings: Vec<u32> = (1..=cfg.winding.max(1)).collect();
    // Fixed probe points keep the report byte-deterministic.
    let points = [
        (0.6, 0.3),
        (1.1, 2.4),
        (1.9, -1.2),
        (2.6, 4.0),
        (0.9, 5.5),
        (2.2, 0.7),
    ];
    let mut checks = Vec::new();

    // 1. Path-ordered holonomy against the Wigner-d closed form.
    let mut dev: f64 = 0.0;
    for &winding in &windings {
        for &t in &temps {
            let spec = ThermalSpec::new(t, cfg.omega0, j).map_err(|e| e.to_string())?;
            let expect =
                loschmidt_great_circle(j, cfg.omega0, winding, t).map_err(|e| e.to_string())?;
            for path in [
                LoopPath::longitude(0.7, winding as i32),
                LoopPath::equator(winding as i32),
            ] {
                let opts = HolonomyOptions {
                    tol: cfg.tolerance,
                    ..HolonomyOptions::default()
                };
                let res = holonomy_adaptive(&ops, &spec, &path, opts).map_err(|e| e.to_string())?;
                dev = dev
                    .max((res.loschmidt.re - expect).abs())
                    .max(res.loschmidt.im.abs());
            }
        }
    }
    checks.push(Check {
        name: "holonomy_vs_analytic",
        max_dev: dev,
        tol: 1e-6,
    });

    // 2. Finite-difference connection against the closed form.
    let mut dev: f64 = 0.0;
    for &t in &temps {
        let spec = ThermalSpec::new(t, cfg.omega0, j).map_err(|e| e.to_string())?;
        let x = chi(&spec);
        for &(theta, phi) in &points {
            let a = SphereAngles::new(theta, phi);
            let ops_ref = &ops;
            let spec_copy = spec;
            let general = connection_general(
                move |ang| density_matrix(ops_ref, &spec_copy, ang),
                a,
                1e-5,
            )
            .map_err(|e| e.to_string())?;
            let closed = connection_spin_j(&ops, a, x);
            dev = dev
                .max(max_abs_diff(&general.a_theta, &closed.a_theta))
                .max(max_abs_diff(&general.a_phi, &closed.a_phi));
        }
    }
    checks.push(Check {
        name: "connection_general_vs_spin_j",
        max_dev: dev,
        tol: 1e-6,
    });

    // 3. Purified-state protocol fidelity against the closed form.
    let mut dev: f64 = 0.0;
    for &winding in &windings {
        for &t in &temps {
            let spec = ThermalSpec::new(t, cfg.omega0, j).map_err(|e| e.to_string())?;
            let overlap = protocol_fidelity(&ops, &spec, &ProtocolSchedule::linear(winding))
                .map_err(|e| e.to_string())?;
            let expect =
                loschmidt_great_circle(j, cfg.omega0, winding, t).map_err(|e| e.to_string())?;
            dev = dev.max((overlap - Complex64::new(expect, 0.0)).norm());
        }
    }
    checks.push(Check {
        name: "protocol_vs_analytic",
        max_dev: dev,
        tol: 1e-10,
    });

    // 4. Register-circuit overlap against the closed form.
    let mut dev: f64 = 0.0;
    for &winding in &windings {
        for &t in &temps {
            let spec = ThermalSpec::new(t, cfg.omega0, j).map_err(|e| e.to_string())?;
            let weights = WeightVector::from_thermal(&spec).map_err(|e| e.to_string())?;
            let circ = build_prep_circuit(&angles_from_weights(&weights));
            let overlap = run_protocol_on_register(&circ, &spec, &ProtocolSchedule::linear(winding))
                .map_err(|e| e.to_string())?;
            let expect =
                loschmidt_great_circle(j, cfg.omega0, winding, t).map_err(|e| e.to_string())?;
            dev = dev.max((overlap - Complex64::new(expect, 0.0)).norm());
        }
    }
    checks.push(Check {
        name: "circuit_vs_analytic",
        max_dev: dev,
        tol: 1e-9,
    });

    // 5. Curvature closed form against dA + A ^ A.
    let mut dev: f64 = 0.0;
    for &t in &temps {
        let spec = ThermalSpec::new(t, cfg.omega0, j).map_err(|e| e.to_string())?;
        for &(theta, phi) in &points {
            let a = SphereAngles::new(theta, phi);
            dev = dev.max(max_abs_diff(
                &curvature(&ops, &spec, a),
                &curvature_fd(&ops, &spec, a, 1e-5),
            ));
        }
    }
    checks.push(Check {
        name: "curvature_closed_vs_fd",
        max_dev: dev,
        tol: 1e-6,
    });

    // 6. The Uhlmann Chern number vanishes.
    let mut dev: f64 = 0.0;
    for &t in &temps {
        let spec = ThermalSpec::new(t, cfg.omega0, j).map_err(|e| e.to_string())?;
        dev = dev.max(chern_number(&ops, &spec, (64, 64)).abs());
    }
    checks.push(Check {
        name: "chern_number_zero",
        max_dev: dev,
        tol: 1e-8,
    });

    let mut out = String::new();
    let _ = writeln!(
        out,
        "# verify report: j={} omega0={} windings=1..{}",
        cfg.j_label(),
        sig12(cfg.omega0),
        cfg.winding.max(1)
    );
    let mut all_ok = true;
    for check in &checks {
        all_ok &= check.passed();
        let _ = writeln!(
            out,
            "check {}: max_dev={} tol={} {}",
            check.name,
            sig12(check.max_dev),
            sig12(check.tol),
            if check.passed() { "PASS" } else { "FAIL" }
        );
    }
    let _ = writeln!(out, "verdict: {}", if all_ok { "PASS" } else { "FAIL" });
    write_output(cfg, &out)?;
    Ok(if all_ok { 0 } else { 1 })
}

#[derive(Serialize)]
struct ProtocolRow {
    #[serde(rename = "T")]
    t: f64,
    max_residual: f64,
    overlap_real: f64,
    overlap_imag: f64,
    analytic: f64,
    abs_error: f64,
}

pub fn cmd_protocol(cfg: &RunConfig) -> Result<u8, String> {
    let j = SpinJ::new(cfg.two_j);
    let ops = SpinOperators::new(j);
    let sched = ProtocolSchedule::linear(cfg.winding);
    let rows: Result<Vec<ProtocolRow>, String> = temperature_grid(cfg)
        .iter()
        .map(|&grid_t| {
            let spec =
                ThermalSpec::new(physical_t(cfg, grid_t), cfg.omega0, j).map_err(|e| e.to_string())?;
            let traj = evolve(&ops, &spec, &sched, cfg.steps).map_err(|e| e.to_string())?;
            let max_residual = transport_residual(&traj)
                .into_iter()
                .map(f64::abs)
                .fold(0.0, f64::max);
            let overlap =
                protocol_fidelity(&ops, &spec, &sched).map_err(|e| e.to_string())?;
            let analytic = loschmidt_great_circle(j, cfg.omega0, cfg.winding, physical_t(cfg, grid_t))
                .map_err(|e| e.to_string())?;
            Ok(ProtocolRow {
                t: grid_t,
                max_residual,
                overlap_real: overlap.re,
                overlap_imag: overlap.im,
                analytic,
                abs_error: (overlap - Complex64::new(analytic, 0.0)).norm(),
            })
        })
        .collect();
    let rows = rows?;

    let content = match cfg.format {
        OutputFormat::Csv => {
            let mut out =
                String::from("T,max_residual,overlap_real,overlap_imag,analytic,abs_error\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    sig12(r.t),
                    sig12(r.max_residual),
                    sig12(r.overlap_real),
                    sig12(r.overlap_imag),
                    sig12(r.analytic),
                    sig12(r.abs_error)
                );
            }
            out
        }
        OutputFormat::Json => {
            let body = serde_json::json!({ "rows": rows });
            format!("{}\n", serde_json::to_string(&body).unwrap())
        }
    };
    write_output(cfg, &content)?;
    Ok(0)
}

pub fn cmd_circuit(cfg: &RunConfig) -> Result<u8, String> {
    let j = SpinJ::new(cfg.two_j);
    let t = physical_t(cfg, cfg.tmin);
    let spec = ThermalSpec::new(t, cfg.omega0, j).map_err(|e| e.to_string())?;
    let weights = WeightVector::from_thermal(&spec).map_err(|e| e.to_string())?;
    let circ = build_prep_circuit(&angles_from_weights(&weights));
    let text = circuit_to_text(&circ);
    let overlap = run_protocol_on_register(&circ, &spec, &ProtocolSchedule::linear(cfg.winding))
        .map_err(|e| e.to_string())?;
    let analytic =
        loschmidt_great_circle(j, cfg.omega0, cfg.winding, t).map_err(|e| e.to_string())?;

    let mut report = String::new();
    let _ = writeln!(
        report,
        "# circuit report: j={} omega0={} winding={} T={}",
        cfg.j_label(),
        sig12(cfg.omega0),
        cfg.winding,
        sig12(cfg.tmin)
    );
    let _ = writeln!(
        report,
        "# qubits_per_register={} gates={}",
        weights.qubits(),
        circ.gates.len()
    );
    let _ = writeln!(
        report,
        "# overlap = {} {}",
        sig12(overlap.re),
        sig12(overlap.im)
    );
    let _ = writeln!(report, "# analytic = {}", sig12(analytic));
    let _ = writeln!(
        report,
        "# abs_error = {}",
        sig12((overlap - Complex64::new(analytic, 0.0)).norm())
    );

    match &cfg.output {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            print!("{report}");
        }
        None => {
            print!("{report}{text}");
        }
    }
    Ok(0)
}
