use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use oritube::characterization::{
    bundled, force_summary, load_trajectories, material_catalog, pressure_displacement, render_plot,
    split_steady_segments, step_response_metrics, trajectory_dependency, AnalysisError, Series,
};
use oritube::config::Config;
use oritube::folding::write_sweep_csv as write_fold_csv;
use oritube::geometry::stl::export_stl;
use oritube::geometry::svg::export_svg_pattern;
use oritube::geometry::{CreaseKind, DEFAULT_LENGTH_TOL};
use oritube::material::{fit_ogden_seeded, load_utm_csv, uniaxial_stress, SpecimenMeta};
use oritube::structural::{
    build_bar_hinge_with, sweep, write_sweep_csv, Loading, QuarterModel, SimulationScenario, SolverOptions,
    StructuralError, SweepPoint, Triangulation,
};
use oritube::{
    assemble_bidirectional, check_admissible, fold_configuration, generate_tube, make_quad_section,
    unroll_crease_pattern, CrossSection, ExperimentRecord, OgdenParams, TriMesh, Vec3,
};

use crate::design::{self, get, usage};
use crate::{AnalyzeArgs, CheckArgs, Failure, FitArgs, FoldArgs, MaterialsArgs, Outcome, SimulateArgs};

pub struct Context {
    pub config: Config,
    pub out: PathBuf,
    pub seed: u64,
}

impl Context {
    fn write(&self, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
        fs::create_dir_all(&self.out).with_context(|| format!("cannot create {}", self.out.display()))?;
        let path = self.out.join(name);
        fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
        log::info!("wrote {name} ({} bytes)", bytes.len());
        Ok(())
    }

    fn write_stl(&self, name: &str, mesh: &TriMesh) -> anyhow::Result<usize> {
        let mut bytes = Vec::new();
        export_stl(mesh, &mut bytes)?;
        self.write(name, &bytes)?;
        Ok(bytes.len())
    }
}

pub fn check(ctx: &Context, args: &CheckArgs) -> Outcome {
    let cfg = &ctx.config;
    let from_flags = args.a.is_some() || args.b.is_some() || args.theta1.is_some() || args.theta2.is_some();
    let section = if let Some(points) = &args.points {
        CrossSection::from_points(&design::parse_points(points)?)?
    } else if from_flags {
        make_quad_section(
            args.a.map_or_else(|| get(cfg, "section_a_mm", 15.0), Ok)?,
            args.b.map_or_else(|| get(cfg, "section_b_mm", 15.0), Ok)?,
            args.theta1.map_or_else(|| get(cfg, "theta1_deg", 0.0), Ok)?,
            args.theta2.map_or_else(|| get(cfg, "theta2_deg", 90.0), Ok)?,
        )?
    } else if design::has_section(cfg) {
        design::section(cfg)?
    } else {
        return Err(usage(
            "no cross-section given: pass --a/--b/--theta1/--theta2, --points, or a config with section keys",
        ));
    };
    let tol = args.tol.map_or_else(|| get(cfg, "length_tol_mm", DEFAULT_LENGTH_TOL), Ok)?;
    if !(tol > 0.0) {
        return Err(usage(format!("tolerance must be positive, got {tol}")));
    }
    let report = check_admissible(&section, tol)?;
    println!("{report}");
    if report.admissible {
        Ok(())
    } else {
        Err(Failure::Verdict("cross-section is not admissible".into()))
    }
}

pub fn generate(ctx: &Context) -> Outcome {
    let spec = design::tube_spec(&ctx.config)?;
    let assembly = design::assembly_spec(&ctx.config)?;
    let tube = generate_tube(&spec)?;
    let mesh = tube.closed_mesh();
    let stl_bytes = ctx.write_stl("tube.stl", &mesh)?;
    let pattern = unroll_crease_pattern(&tube)?;
    let mut svg = Vec::new();
    export_svg_pattern(&pattern, &mut svg)?;
    ctx.write("pattern.svg", &svg)?;

    let count = |kind| tube.creases.iter().filter(|c| c.kind == kind).count();
    let mut report = String::new();
    writeln!(report, "vertices = {}", tube.vertices.len())?;
    writeln!(report, "faces = {}", tube.faces.len())?;
    writeln!(report, "creases = {}", tube.creases.len())?;
    writeln!(report, "mountain_creases = {}", count(CreaseKind::Mountain))?;
    writeln!(report, "valley_creases = {}", count(CreaseKind::Valley))?;
    writeln!(report, "boundary_edges = {}", count(CreaseKind::Boundary))?;
    writeln!(report, "deployed_length_mm = {:.6}", tube.deployed_length)?;
    writeln!(report, "stl_triangles = {}", mesh.triangles.len())?;
    writeln!(report, "stl_bytes = {stl_bytes}")?;
    writeln!(report, "pattern_panels = {}", pattern.panels.len())?;
    writeln!(report, "pattern_fold_lines = {}", pattern.fold_lines().count())?;
    if let Some(spec) = assembly {
        let asm = assemble_bidirectional(&spec)?;
        for i in 0..asm.tubes.len() {
            ctx.write_stl(&format!("assembly_tube_{i:03}.stl"), &asm.tube_closed_mesh(i))?;
        }
        writeln!(report, "assembly_tubes = {}", asm.tubes.len())?;
        writeln!(report, "assembly_vertices = {}", asm.vertices.len())?;
        writeln!(report, "assembly_faces = {}", asm.faces.len())?;
        writeln!(report, "assembly_ambiguous_creases = {}", asm.ambiguous_creases.len())?;
    }
    ctx.write("geometry_report.txt", report.as_bytes())?;
    print!("{report}");
    Ok(())
}

pub fn fold(ctx: &Context, args: &FoldArgs) -> Outcome {
    let cfg = &ctx.config;
    let steps = args.steps.map_or_else(|| get(cfg, "fold_steps", design::DEFAULT_FOLD_STEPS), Ok)?;
    let t0 = args.t_start.map_or_else(|| get(cfg, "fold_t_start", 0.0), Ok)?;
    let t1 = args.t_stop.map_or_else(|| get(cfg, "fold_t_stop", 1.0), Ok)?;
    if steps < 2 {
        return Err(usage(format!("at least 2 fold steps are needed, got {steps}")));
    }
    if !(0.0..=1.0).contains(&t0) || !(0.0..=1.0).contains(&t1) || t0 >= t1 {
        return Err(usage(format!("invalid fold range [{t0}, {t1}]: need 0 <= start < stop <= 1")));
    }
    let tube = generate_tube(&design::tube_spec(cfg)?)?;
    let states = (0..steps)
        .map(|i| fold_configuration(&tube, t0 + (t1 - t0) * i as f64 / (steps - 1) as f64))
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = Vec::new();
    write_fold_csv(&states, &mut csv)?;
    ctx.write("fold.csv", &csv)?;

    let mut frames = 0;
    if args.frames {
        for (i, s) in states.iter().enumerate() {
            // a flat state has coincident walls and no solid to write
            if s.enclosed_volume > 0.0 {
                ctx.write_stl(&format!("fold_{i:03}.stl"), &tube.closed_mesh_at(&s.vertices))?;
                frames += 1;
            } else {
                log::info!("state {i} (t = {:.6}) is flat; no frame written", s.t);
            }
        }
    }
    let peak = states.iter().max_by(|a, b| a.enclosed_volume.total_cmp(&b.enclosed_volume)).expect("steps >= 2");
    println!("states = {}", states.len());
    println!("max_volume_mm3 = {:.6}", peak.enclosed_volume);
    println!("max_volume_t = {:.6}", peak.t);
    if args.frames {
        println!("frames = {frames}");
    }
    Ok(())
}

fn triangulation(cfg: &Config, quarter: bool) -> Result<Triangulation, Failure> {
    let default = if quarter { "union-jack" } else { "diagonal" };
    match cfg.raw("triangulation").unwrap_or(default) {
        "diagonal" => Ok(Triangulation::Diagonal),
        "union-jack" => Ok(Triangulation::UnionJack),
        other => Err(usage(format!("triangulation must be `diagonal` or `union-jack`, got `{other}`"))),
    }
}

pub fn simulate(ctx: &Context, args: &SimulateArgs) -> Outcome {
    let cfg = &ctx.config;
    let scenario = SimulationScenario::from_config(cfg).map_err(|e| match e {
        StructuralError::InvalidParameter(m) => usage(m),
        other => other.into(),
    })?;
    let tri = triangulation(cfg, args.quarter)?;
    let supported = match cfg.raw("supports").unwrap_or("ends") {
        "ends" => true,
        "none" => false,
        other => return Err(usage(format!("supports must be `ends` or `none`, got `{other}`"))),
    };
    let tube = generate_tube(&design::tube_spec(cfg)?)?;
    let model =
        build_bar_hinge_with(&tube, &OgdenParams::ELASTIC_RESIN, scenario.thickness_mm, scenario.crease_scale, tri)?;
    let displacements = scenario.displacements();
    let options = SolverOptions::default();
    let unsupported = Loading { supports: Vec::new(), rates: Vec::new() };

    let (points, full_positions): (Vec<SweepPoint>, Vec<Vec<Vec3>>) = if args.quarter {
        let q = QuarterModel::new(&model)?;
        let loading = if supported { q.tensile_loading() } else { unsupported };
        let points = sweep(&q.model, &loading, &displacements, &options)?;
        let full = points.iter().map(|p| q.expand(&p.positions)).collect();
        (points, full)
    } else {
        let loading = if supported { model.tensile_loading() } else { unsupported };
        let points = sweep(&model, &loading, &displacements, &options)?;
        let full = points.iter().map(|p| p.positions.clone()).collect();
        (points, full)
    };

    let mut csv = Vec::new();
    write_sweep_csv(&points, &mut csv)?;
    ctx.write("simulation.csv", &csv)?;
    if args.frames {
        for (i, x) in full_positions.into_iter().enumerate() {
            ctx.write_stl(&format!("simulation_{i:03}.stl"), &TriMesh::new(x, model.triangles.clone()).capped())?;
        }
    }

    let mut report = String::new();
    writeln!(report, "model = {}", if args.quarter { "quarter" } else { "full" })?;
    writeln!(report, "nodes = {}", model.n_nodes())?;
    writeln!(report, "bars = {}", model.bars.len())?;
    writeln!(report, "hinges = {}", model.hinges.len())?;
    writeln!(report, "steps = {}", points.len())?;
    writeln!(report, "gradient_tolerance_N = {:e}", options.gradient_tol)?;
    let worst = points.iter().map(|p| p.gradient_norm).fold(0.0, f64::max);
    writeln!(report, "max_gradient_norm_N = {worst:.3e}")?;
    writeln!(report, "converged = {}", worst <= options.gradient_tol)?;
    for p in &points {
        writeln!(
            report,
            "step d = {:.6} mm: force {:.6e} N, energy {:.6e} N mm, {} iterations, gradient {:.3e} N",
            p.displacement, p.force, p.energy, p.iterations, p.gradient_norm
        )?;
    }
    ctx.write("simulation_report.txt", report.as_bytes())?;
    print!("{report}");
    Ok(())
}

pub fn fit(ctx: &Context, args: &FitArgs) -> Outcome {
    let source = args.input.clone().or_else(|| ctx.config.raw("utm_csv").map(PathBuf::from));
    let curve = match &source {
        Some(path) => {
            let file = fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            load_utm_csv(file, SpecimenMeta::TYPE_IV).with_context(|| format!("cannot read {}", path.display()))?
        }
        None => load_utm_csv(bundled::UTM_SYNTHETIC.as_bytes(), SpecimenMeta::TYPE_IV)?,
    };
    let result = fit_ogden_seeded(&curve, &OgdenParams::DEFAULT_GUESS, ctx.seed)?;
    let report = result.report();
    ctx.write("fit_report.json", report.as_bytes())?;

    let data: Vec<(f64, f64)> = curve.strain.iter().zip(&curve.stress).map(|(&e, &s)| (e, s)).collect();
    let model = curve
        .strain
        .iter()
        .map(|&e| Ok((e, uniaxial_stress(&result.params, 1.0 + e)?)))
        .collect::<Result<Vec<_>, oritube::material::MaterialError>>()?;
    let mut svg = Vec::new();
    render_plot(
        &[Series::markers("measured", data), Series::line("Ogden fit", model)],
        "engineering strain",
        "nominal stress [Pa]",
        &mut svg,
    )?;
    ctx.write("fit.svg", &svg)?;
    print!("{report}");
    Ok(())
}

const FORCE_FILE: &str = "force_trace.csv";
const STEP_FILE: &str = "step_response.csv";
const PRESSURE_FILE: &str = "pressure_sweep.csv";
const TRAJECTORY_FILE: &str = "trajectories.csv";

/// Trace texts by file name, from `dir` or the bundled set.
fn traces(dir: Option<&Path>) -> anyhow::Result<Vec<(&'static str, String)>> {
    let names = [FORCE_FILE, STEP_FILE, PRESSURE_FILE, TRAJECTORY_FILE];
    let Some(dir) = dir else {
        let texts = [bundled::FORCE_TRACE, bundled::STEP_RESPONSE, bundled::PRESSURE_SWEEP, bundled::TRAJECTORIES];
        return Ok(names.into_iter().zip(texts.map(String::from)).collect());
    };
    if !dir.is_dir() {
        anyhow::bail!("{} is not a directory", dir.display());
    }
    let mut out = Vec::new();
    for name in names {
        let path = dir.join(name);
        if path.is_file() {
            out.push((name, fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?));
        }
    }
    if out.is_empty() {
        anyhow::bail!("no experiment traces ({}) in {}", names.join(", "), dir.display());
    }
    Ok(out)
}

fn plot(series: &[Series], x: &str, y: &str) -> Result<Vec<u8>, AnalysisError> {
    let mut svg = Vec::new();
    render_plot(series, x, y, &mut svg)?;
    Ok(svg)
}

pub fn analyze(ctx: &Context, args: &AnalyzeArgs) -> Outcome {
    let dir = args.input.clone().or_else(|| ctx.config.raw("data_dir").map(PathBuf::from));
    let mut report = String::new();
    for (name, text) in traces(dir.as_deref())? {
        let label = name.trim_end_matches(".csv");
        let context = || format!("in {name}");
        match name {
            FORCE_FILE => {
                let rec = ExperimentRecord::from_csv(label, text.as_bytes()).with_context(context)?;
                let f = force_summary(&rec).with_context(context)?;
                writeln!(report, "max_force_N = {:.3}", f.max_force_n)?;
                writeln!(report, "max_force_time_s = {:.3}", f.time_s)?;
                writeln!(report, "pressure_at_max_force_kPa = {:.3}", f.pressure_kpa)?;
                let svg = plot(&[Series::line("force", rec.force_series())], "time [s]", "force [N]")?;
                ctx.write("force.svg", &svg)?;
            }
            STEP_FILE => {
                let rec = ExperimentRecord::from_csv(label, text.as_bytes()).with_context(context)?;
                let m = step_response_metrics(&rec).with_context(context)?;
                writeln!(report, "actuation_time_s = {:.3}", m.actuation_s)?;
                writeln!(report, "hold_time_s = {:.3}", m.hold_s)?;
                writeln!(report, "release_time_s = {:.3}", m.release_s)?;
                writeln!(report, "cycle_time_s = {:.3}", m.cycle_s)?;
                writeln!(report, "step_plateau_mm = {:.3}", m.plateau_mm)?;
                let svg =
                    plot(&[Series::line("displacement", rec.displacement_series())], "time [s]", "displacement [mm]")?;
                ctx.write("step_response.svg", &svg)?;
            }
            PRESSURE_FILE => {
                let rec = ExperimentRecord::from_csv(label, text.as_bytes()).with_context(context)?;
                let curve = pressure_displacement(&split_steady_segments(&rec)).with_context(context)?;
                writeln!(report, "pressure_plateau_kPa = {:.3}", curve.plateau_kpa)?;
                writeln!(report, "max_steady_displacement_mm = {:.3}", curve.max_displacement_mm)?;
                writeln!(report, "pressure_levels = {}", curve.points.len())?;
                let svg =
                    plot(&[Series::line("steady displacement", curve.points)], "pressure [kPa]", "displacement [mm]")?;
                ctx.write("pressure_displacement.svg", &svg)?;
            }
            _ => {
                let rounds = load_trajectories(text.as_bytes()).with_context(context)?;
                for d in trajectory_dependency(&rounds).with_context(context)? {
                    writeln!(report, "direction_{}_rounds = {}", d.direction, d.rounds)?;
                    writeln!(report, "direction_{}_rms_mm = {:.4}", d.direction, d.mean_rms_mm)?;
                    writeln!(report, "direction_{}_deviation_pct = {:.3}", d.direction, d.normalized_pct)?;
                }
                let series: Vec<Series> = rounds
                    .iter()
                    .map(|r| {
                        Series::line(
                            format!("direction {} round {}", r.direction, r.round),
                            r.points.iter().map(|p| (p.x, p.y)).collect(),
                        )
                    })
                    .collect();
                ctx.write("trajectories.svg", &plot(&series, "x [mm]", "y [mm]")?)?;
            }
        }
    }
    ctx.write("analysis_report.txt", report.as_bytes())?;
    print!("{report}");
    Ok(())
}

pub fn materials(args: &MaterialsArgs) -> Outcome {
    let entries = match material_catalog(args.name.as_deref()) {
        Ok(e) => e,
        Err(AnalysisError::UnknownMaterial(name)) => {
            return Err(Failure::Verdict(format!("unknown material `{name}`")));
        }
        Err(e) => return Err(e.into()),
    };
    for e in &entries {
        println!("{e}");
    }
    println!("{} material(s)", entries.len());
    Ok(())
}
