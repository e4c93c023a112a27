//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use oritube::characterization::{
    bundled, force_summary, load_trajectories, pressure_displacement, render_plot, split_steady_segments,
    step_response_metrics, trajectory_dependency, Series,
};
use oritube::folding::write_sweep_csv as write_fold_csv;
use oritube::geometry::stl::export_stl;
use oritube::geometry::svg::export_svg_pattern;
use oritube::material::SpecimenMeta;
use oritube::structural::{
    build_bar_hinge_with, gradient, minimize_energy, tensile_sweep, write_sweep_csv, QuarterModel, Triangulation,
};
use oritube::{
    assemble_bidirectional, build_bar_hinge, check_admissible, fit_ogden, fold_configuration, fold_sweep,
    unroll_crease_pattern, AssemblySpec, CrossSection, ExperimentRecord, OgdenParams, StressStrainCurve, TriMesh, Vec3,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use common::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn admissibility() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut agree = 0;
    let mut admissible = 0;
    let total = 1000;
    for i in 0..total {
        // redraw the rare perturbation that folds the quad over itself
        let (pts, cs) = loop {
            let pts = if i % 2 == 0 { random_parallelogram(&mut rng) } else { perturbed_quad(&mut rng) };
            if let Ok(cs) = CrossSection::new(pts.clone()) {
                break (pts, cs);
            }
        };
        let verdict = check_admissible(&cs, 1e-6).map_err(|e| e.to_string())?.admissible;
        let oracle = admissible_by_pairs(&pts, 1e-6);
        admissible += usize::from(oracle);
        agree += usize::from(verdict == oracle);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        agree == total && secs < 1.0 && admissible == total / 2,
        format!("{agree}/{total} verdicts agree ({admissible} admissible), {secs:.3} s"),
    )
}

fn rigid_fold() -> Outcome {
    let start = Instant::now();
    let tube = square_tube(3);
    let states = fold_sweep(&tube, 101).map_err(|e| e.to_string())?;
    let edge = states.iter().map(|s| s.edge_length_residual(&tube)).fold(0.0, f64::max);
    let planar = states.iter().map(|s| s.planarity_residual(&tube)).fold(0.0, f64::max);
    let vols: Vec<f64> = states.iter().map(|s| s.enclosed_volume).collect();
    let vmax = vols.iter().cloned().fold(0.0, f64::max);
    let ends = vols[0].abs().max(vols[100].abs());
    let inner_positive = vols[1..100].iter().all(|&v| v > 0.0);
    let asym = (0..=100).map(|i| (vols[i] - vols[100 - i]).abs()).fold(0.0, f64::max);
    // independent check: constraint null space is rigid motions plus one fold
    let dof: Vec<usize> = [0.2, 0.35, 0.8]
        .iter()
        .map(|&t| fold_configuration(&tube, t).map(|s| mobility(&tube, &s.vertices)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(
        edge < 1e-9
            && planar < 1e-9
            && ends <= 1e-9 * vmax
            && inner_positive
            && asym <= 1e-6 * vmax
            && dof.iter().all(|&d| d == 7)
            && secs < 30.0,
        format!(
            "edge {edge:.1e} mm, planarity {planar:.1e} mm, end volume {ends:.1e}, \
             asymmetry {:.1e} of max {vmax:.1} mm³, mobility {dof:?}, {secs:.2} s",
            asym / vmax
        ),
    )
}

fn volume_oracle() -> Outcome {
    let tube = square_tube(3);
    let state = fold_configuration(&tube, 0.25).map_err(|e| e.to_string())?;
    let mesh = tube.closed_mesh_at(&state.vertices);
    let (mc, se) = monte_carlo_volume(&mesh, 1_000_000, 20211);
    let rel = (state.enclosed_volume - mc).abs() / mc;
    ensure(
        rel < 0.01 && !state.volume_from_hull,
        format!(
            "t = 0.25: mesh {:.2} mm³, Monte-Carlo {mc:.2} ± {se:.2} mm³, difference {:.3}%",
            state.enclosed_volume,
            100.0 * rel
        ),
    )
}

fn material_fit() -> Outcome {
    let start = Instant::now();
    let truth = OgdenParams::ELASTIC_RESIN;
    let strain: Vec<f64> = (0..=90).map(|i| i as f64 * 1.5 / 90.0).collect();
    let clean =
        StressStrainCurve::synthetic(&truth, strain.clone(), SpecimenMeta::TYPE_IV).map_err(|e| e.to_string())?;
    let fit = fit_ogden(&clean, &OgdenParams::DEFAULT_GUESS).map_err(|e| e.to_string())?;
    let err =
        |p: &OgdenParams| ((p.mu1 - truth.mu1).abs() / truth.mu1).max((p.alpha1 - truth.alpha1).abs() / truth.alpha1);
    let clean_err = err(&fit.params);

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let noise = Normal::new(0.0, 0.02).unwrap();
    let noisy_stress: Vec<f64> = clean.stress.iter().map(|s| s * (1.0 + noise.sample(&mut rng))).collect();
    let noisy = StressStrainCurve::new(strain, noisy_stress, SpecimenMeta::TYPE_IV).map_err(|e| e.to_string())?;
    let nfit = fit_ogden(&noisy, &OgdenParams::DEFAULT_GUESS).map_err(|e| e.to_string())?;
    let noisy_err = err(&nfit.params);
    let secs = start.elapsed().as_secs_f64();
    ensure(
        clean_err < 1e-3 && noisy_err < 0.02 && nfit.r2 > 0.99 && secs < 5.0,
        format!(
            "noiseless error {:.1e}%, 2% noise error {:.3}% with R² {:.5}, {secs:.2} s",
            100.0 * clean_err,
            100.0 * noisy_err,
            nfit.r2
        ),
    )
}

fn stress_energy() -> Outcome {
    let p = OgdenParams::ELASTIC_RESIN;
    let w = |l: f64| {
        let t = 1.0 / l.sqrt();
        p.energy([l, t, t]).unwrap()
    };
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let l = 0.5 + 2.5 * i as f64 / 99.0;
        let h = 1e-5;
        let fd = (w(l + h) - w(l - h)) / (2.0 * h);
        let s = p.uniaxial_stress(l).map_err(|e| e.to_string())?;
        worst = worst.max((fd - s).abs() / s.abs());
    }
    ensure(worst < 1e-6, format!("max relative error {worst:.2e} over 100 stretches in [0.5, 3]"))
}

fn gradient_check() -> Outcome {
    let tube = square_tube(3);
    let model = build_bar_hinge(&tube, &OgdenParams::ELASTIC_RESIN, 1.0, 0.01).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x: Vec<Vec3> = model.nodes.iter().map(|p| p + Vec3::from_fn(|_, _| rng.random_range(-0.5..0.5))).collect();
        let g = gradient(&model, &x);
        let fd = fd_gradient(&model, &x, 1e-6);
        let scale = g.iter().map(|v| v.amax()).fold(0.0, f64::max);
        let diff = g.iter().zip(&fd).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
        worst = worst.max(diff / scale);
    }
    ensure(worst < 1e-6, format!("max |analytic - finite difference| / max |gradient| = {worst:.2e} over 100 states"))
}

fn simulation_sanity() -> Outcome {
    let tube = square_tube(3);
    let model = build_bar_hinge(&tube, &OgdenParams::ELASTIC_RESIN, 1.0, 0.01).map_err(|e| e.to_string())?;
    let eq = minimize_energy(&model, &model.tensile_loading().at(0.0)).map_err(|e| e.to_string())?;
    let rest_reaction = eq.reactions.iter().map(|r| r.1.norm()).fold(0.0, f64::max);

    let full = build_bar_hinge_with(&tube, &OgdenParams::ELASTIC_RESIN, 1.0, 0.01, Triangulation::UnionJack)
        .map_err(|e| e.to_string())?;
    let quarter = QuarterModel::new(&full).map_err(|e| e.to_string())?;
    let d = [0.0, 0.5, 1.0];
    let f = tensile_sweep(&full, &d).map_err(|e| e.to_string())?;
    let q = quarter.tensile_sweep(&d, &Default::default()).map_err(|e| e.to_string())?;
    let (ff, fq) = (f[2].force, q[2].force);
    let rel = (fq - ff / 4.0).abs() / (ff / 4.0);
    ensure(
        rest_reaction < 1e-8 && rel < 0.02,
        format!(
            "zero-displacement reaction {rest_reaction:.1e} N; at 1 mm full {ff:.5} N, quarter {fq:.5} N, \
             quarter vs full/4 {:.2e}",
            rel
        ),
    )
}

fn characterization() -> Outcome {
    let rec = |name: &str, text: &str| ExperimentRecord::from_csv(name, text.as_bytes()).map_err(|e| e.to_string());
    let force = force_summary(&rec("force", bundled::FORCE_TRACE)?).map_err(|e| e.to_string())?;
    let step = step_response_metrics(&rec("step", bundled::STEP_RESPONSE)?).map_err(|e| e.to_string())?;
    let sweep = rec("sweep", bundled::PRESSURE_SWEEP)?;
    let curve = pressure_displacement(&split_steady_segments(&sweep)).map_err(|e| e.to_string())?;
    let rounds = load_trajectories(bundled::TRAJECTORIES.as_bytes()).map_err(|e| e.to_string())?;
    let deps = trajectory_dependency(&rounds).map_err(|e| e.to_string())?;
    let worst = deps.iter().map(|d| d.normalized_pct).fold(0.0, f64::max);
    let four_rounds = deps.iter().all(|d| d.rounds == 4);
    ensure(
        (force.max_force_n - 42.0).abs() <= 1.0
            && (force.pressure_kpa + 94.0).abs() <= 2.0
            && (step.actuation_s - 2.0).abs() <= 0.3
            && step.cycle_s > 5.0
            && (curve.plateau_kpa + 35.0).abs() <= 3.0
            && worst < 5.0
            && four_rounds,
        format!(
            "max force {:.2} N at {:.1} kPa, actuation {:.2} s, cycle {:.2} s, plateau {:.1} kPa, \
             trajectory deviation {worst:.2}%",
            force.max_force_n, force.pressure_kpa, step.actuation_s, step.cycle_s, curve.plateau_kpa
        ),
    )
}

fn export_meshes() -> Result<Vec<(String, TriMesh)>, String> {
    let mut out = Vec::new();
    for n in [1, 3] {
        out.push((format!("tube {n} unit"), square_tube(n).closed_mesh()));
    }
    let tube = square_tube(3);
    // flat end states enclose nothing and are never written as frames
    for s in fold_sweep(&tube, 21).map_err(|e| e.to_string())?.iter().filter(|s| s.enclosed_volume > 0.0) {
        out.push((format!("fold t={:.2}", s.t), tube.closed_mesh_at(&s.vertices)));
    }
    let spec = AssemblySpec { tube: square_tube(1).spec, n_vertical: 2, n_horizontal: 1, pattern: (2, 1, 1) };
    let asm = assemble_bidirectional(&spec).map_err(|e| e.to_string())?;
    for i in 0..asm.tubes.len() {
        out.push((format!("assembly tube {i}"), asm.tube_closed_mesh(i)));
    }
    let model = build_bar_hinge(&tube, &OgdenParams::ELASTIC_RESIN, 1.0, 0.01).map_err(|e| e.to_string())?;
    for p in tensile_sweep(&model, &[0.0, 0.5]).map_err(|e| e.to_string())? {
        out.push((
            format!("simulation {}", p.displacement),
            TriMesh::new(p.positions, model.triangles.clone()).capped(),
        ));
    }
    Ok(out)
}

fn export_integrity() -> Outcome {
    let meshes = export_meshes()?;
    for (name, mesh) in &meshes {
        stl_contract(mesh).map_err(|e| format!("{name}: {e}"))?;
    }
    let one = stl_contract(&square_tube(1).closed_mesh())?;
    Ok(format!(
        "{} STL files watertight, byte counts 84 + 50n, bit-exact round trip; single unit tube {one} bytes",
        meshes.len()
    ))
}

/// Every output the command-line front end writes, produced twice in-process.
fn library_outputs() -> Result<Vec<u8>, String> {
    let mut all = Vec::new();
    for (_, mesh) in export_meshes()? {
        export_stl(&mesh, &mut all).map_err(|e| e.to_string())?;
    }
    let tube = square_tube(3);
    let pattern = unroll_crease_pattern(&tube).map_err(|e| e.to_string())?;
    export_svg_pattern(&pattern, &mut all).map_err(|e| e.to_string())?;
    write_fold_csv(&fold_sweep(&tube, 21).map_err(|e| e.to_string())?, &mut all).map_err(|e| e.to_string())?;
    let model = build_bar_hinge(&tube, &OgdenParams::ELASTIC_RESIN, 1.0, 0.01).map_err(|e| e.to_string())?;
    write_sweep_csv(&tensile_sweep(&model, &[0.0, 0.3, 0.6]).map_err(|e| e.to_string())?, &mut all)
        .map_err(|e| e.to_string())?;
    let curve = oritube::material::load_utm_csv(bundled::UTM_SYNTHETIC.as_bytes(), SpecimenMeta::TYPE_IV)
        .map_err(|e| e.to_string())?;
    let fit = oritube::material::fit_ogden_seeded(&curve, &OgdenParams::DEFAULT_GUESS, 9).map_err(|e| e.to_string())?;
    all.extend_from_slice(fit.report().as_bytes());
    let force = ExperimentRecord::from_csv("force", bundled::FORCE_TRACE.as_bytes()).map_err(|e| e.to_string())?;
    render_plot(&[Series::line("force", force.force_series())], "time [s]", "force [N]", &mut all)
        .map_err(|e| e.to_string())?;
    Ok(all)
}

fn cli_binary() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    let bin = dir.join(format!("oritube{}", std::env::consts::EXE_SUFFIX));
    bin.is_file().then_some(bin)
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(Result::ok)
                .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap_or_default()))
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

const CLI_CONFIG: &str = "\
section_a_mm = 15
section_b_mm = 15
alpha_deg = 45
unit_length_mm = 15
n_units = 2
n_vertical = 2
n_horizontal = 1
fold_steps = 11
displacement_stop_mm = 0.4
displacement_steps = 3
";

fn cli_runs(bin: &Path) -> Result<usize, String> {
    let root = std::env::temp_dir().join(format!("oritube-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&root).map_err(|e| e.to_string())?;
    let cfg = root.join("design.cfg");
    std::fs::write(&cfg, CLI_CONFIG).map_err(|e| e.to_string())?;
    let commands: [&[&str]; 7] = [
        &["check"],
        &["generate"],
        &["fold", "--frames"],
        &["simulate", "--frames"],
        &["fit"],
        &["analyze"],
        &["materials"],
    ];
    for args in commands {
        let mut runs = Vec::new();
        for k in 0..2 {
            let out = root.join(format!("{}-{k}", args[0]));
            let output = Command::new(bin)
                .arg("--config")
                .arg(&cfg)
                .arg("--out")
                .arg(&out)
                .args(["--seed", "11"])
                .args(args)
                .output()
                .map_err(|e| e.to_string())?;
            if !output.status.success() {
                return Err(format!(
                    "`{}` exited with {}: {}",
                    args.join(" "),
                    output.status,
                    String::from_utf8_lossy(&output.stderr)
                ));
            }
            runs.push((output.stdout, read_tree(&out)));
        }
        if runs[0] != runs[1] {
            return Err(format!("`{}` differs between runs", args.join(" ")));
        }
    }
    std::fs::remove_dir_all(&root).ok();
    Ok(commands.len())
}

fn determinism() -> Outcome {
    let a = library_outputs()?;
    let b = library_outputs()?;
    if a != b {
        return Err("library outputs differ between runs".into());
    }
    let bin = cli_binary().ok_or("command-line binary not built; run `cargo test --workspace`")?;
    let n = cli_runs(&bin)?;
    Ok(format!("{} output bytes identical in-process; {n} commands identical across two runs", a.len()))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("admissibility", admissibility),
        ("rigid-fold validity", rigid_fold),
        ("volume oracle", volume_oracle),
        ("material fit recovery", material_fit),
        ("stress-energy consistency", stress_energy),
        ("bar-and-hinge gradient", gradient_check),
        ("simulation sanity", simulation_sanity),
        ("characterization pipeline", characterization),
        ("export integrity", export_integrity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
