use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use sonobe::augment::{augment, cap_feasibility};
use sonobe::blueprint::{assembly_plan, color_modules, module_count, vertex_diagram, ColoringOutcome};
use sonobe::catalog::{degree_histogram, load_off_file, torus_grid, Catalog, CatalogError, OffSurface};
use sonobe::net::{net_svg, placements_json, unfold, UnfoldOptions};
use sonobe::realize::{dihedral_angles, edge_energy, realize, RealizeOptions};
use sonobe::surface::{euler_characteristic, genus};
use sonobe::{Embedding, TriangleMesh};

use crate::report::{Inputs, Metrics, Outcomes, RunReport};
use crate::{Cli, Command, Format};

pub const EXIT_OK: u8 = 0;
pub const EXIT_OTHER: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NOT_CONVERGED: u8 = 3;
pub const EXIT_INFEASIBLE: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn validation(message: impl ToString) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.to_string(),
        }
    }

    fn other(message: impl ToString) -> Self {
        Self {
            code: EXIT_OTHER,
            message: message.to_string(),
        }
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Io { .. } => Failure::other(e),
            _ => Failure::validation(e),
        }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    catalog: Catalog,
    written: Vec<String>,
}

impl Ctx<'_> {
    fn wants(&self, format: Format) -> bool {
        self.cli.format.is_empty() || self.cli.format.contains(&format)
    }

    fn write(&mut self, file: &str, contents: &str, format: Format) -> Result<(), Failure> {
        if !self.wants(format) {
            return Ok(());
        }
        self.write_always(file, contents)
    }

    fn write_always(&mut self, file: &str, contents: &str) -> Result<(), Failure> {
        fs::create_dir_all(&self.cli.out).map_err(|e| Failure::other(format!("{}: {e}", self.cli.out.display())))?;
        let path: PathBuf = self.cli.out.join(file);
        fs::write(&path, contents).map_err(|e| Failure::other(format!("{}: {e}", path.display())))?;
        self.written.push(path.display().to_string());
        Ok(())
    }

    fn options(&self) -> RealizeOptions {
        RealizeOptions {
            tolerance: self.cli.tol,
            max_restarts: self.cli.restarts,
            seed: self.cli.seed,
            ..Default::default()
        }
    }

    fn inputs(&self) -> Inputs {
        Inputs {
            seed: self.cli.seed,
            tol: self.cli.tol,
            restarts: self.cli.restarts,
            ..Default::default()
        }
    }
}

struct Input {
    stem: String,
    mesh: TriangleMesh,
    embedding: Option<Embedding>,
    hexagons: usize,
}

impl Input {
    fn load(arg: &str, ctx: &Ctx, inputs: &mut Inputs) -> Result<Input, Failure> {
        let path = Path::new(arg);
        if path.is_file() {
            inputs.file = Some(arg.to_string());
            let off = load_off_file(path)?;
            let mesh = off.triangle_mesh().map_err(Failure::validation)?;
            let hexagons = match &off.surface {
                OffSurface::Mixed(p) => p.hexagon_count(),
                OffSurface::Triangles(_) => 0,
            };
            let embedding = off
                .triangle_coordinates()
                .filter(|c| c.len() == mesh.vertex_count())
                .map(|c| Embedding::new(c).map_err(Failure::validation))
                .transpose()?;
            let stem = path
                .file_stem()
                .map_or("input".into(), |s| s.to_string_lossy().into_owned());
            return Ok(Input {
                stem,
                mesh,
                embedding,
                hexagons,
            });
        }
        inputs.name = Some(arg.to_string());
        let entry = ctx.catalog.get(arg)?;
        Ok(Input {
            stem: entry.name.clone(),
            mesh: entry.mesh.clone(),
            embedding: entry.reference_embedding.clone(),
            hexagons: entry.undissected.as_ref().map_or(0, |p| p.hexagon_count()),
        })
    }
}

fn shape_metrics(mesh: &TriangleMesh) -> Metrics {
    Metrics {
        vertices: Some(mesh.vertex_count()),
        faces: Some(mesh.face_count()),
        edges: Some(mesh.edge_count()),
        genus: genus(mesh).ok(),
        module_count: Some(module_count(mesh)),
        ..Default::default()
    }
}

fn max_dihedral(mesh: &TriangleMesh, emb: &Embedding) -> Option<f64> {
    dihedral_angles(mesh, emb)
        .ok()
        .map(|d| d.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

struct Realized {
    embedding: Embedding,
    energy: f64,
    converged: bool,
    self_intersecting: bool,
    restarts_used: usize,
}

/// Use the supplied embedding if it already has unit edges, otherwise run
/// the optimizer (starting from it when present).
fn embedding_for(input: &Input, ctx: &Ctx, from_scratch: bool) -> Result<Realized, Failure> {
    let opts = ctx.options();
    if !from_scratch {
        if let Some(emb) = &input.embedding {
            let energy = edge_energy(&input.mesh, emb);
            if energy < opts.tolerance {
                return Ok(Realized {
                    self_intersecting: sonobe::realize::self_intersects(&input.mesh, emb).intersecting,
                    embedding: emb.clone(),
                    energy,
                    converged: true,
                    restarts_used: 0,
                });
            }
        }
    }
    let init = if from_scratch { None } else { input.embedding.as_ref() };
    let r = realize(&input.mesh, init, &opts).map_err(Failure::other)?;
    Ok(Realized {
        embedding: r.embedding,
        energy: r.final_energy,
        converged: r.converged,
        self_intersecting: r.self_intersecting,
        restarts_used: r.restarts_used,
    })
}

fn fill_realization(report: &mut RunReport, mesh: &TriangleMesh, r: &Realized) {
    report.outcomes.realized = Some(r.converged);
    report.outcomes.self_intersecting = Some(r.self_intersecting);
    report.metrics.energy = Some(r.energy);
    report.metrics.max_edge_deviation = Some(r.embedding.max_edge_deviation(mesh));
    report.metrics.max_dihedral = max_dihedral(mesh, &r.embedding);
    report.metrics.restarts_used = Some(r.restarts_used);
}

pub fn run(cli: &Cli) -> Result<(RunReport, u8), Failure> {
    let catalog = match &cli.catalog_dir {
        Some(dir) => Catalog::from_dir(dir)?,
        None => Catalog::builtin().clone(),
    };
    let mut ctx = Ctx {
        cli,
        catalog,
        written: Vec::new(),
    };
    let mut report = RunReport {
        inputs: ctx.inputs(),
        ..Default::default()
    };
    let (code, report_file) = match &cli.command {
        Command::Catalog => {
            report.command = "catalog".into();
            catalog_cmd(&mut ctx, &mut report)?
        }
        Command::Validate { input } => {
            report.command = "validate".into();
            validate_cmd(&mut ctx, &mut report, input)?
        }
        Command::Realize { input } => {
            report.command = "realize".into();
            realize_cmd(&mut ctx, &mut report, input)?
        }
        Command::Augment { input } => {
            report.command = "augment".into();
            augment_cmd(&mut ctx, &mut report, input)?
        }
        Command::Blueprint { input, start, colors } => {
            report.command = "blueprint".into();
            blueprint_cmd(&mut ctx, &mut report, input, *start, *colors)?
        }
        Command::Net { input, root } => {
            report.command = "net".into();
            net_cmd(&mut ctx, &mut report, input, *root)?
        }
        Command::SearchTorus { grid, name } => {
            report.command = "search-torus".into();
            search_torus_cmd(&mut ctx, &mut report, grid.as_deref(), name.as_deref())?
        }
    };
    let report_path = cli.out.join(&report_file).display().to_string();
    report.artifacts_written = ctx.written.clone();
    report.artifacts_written.push(report_path);
    ctx.write_always(&report_file, &report.to_json())?;
    Ok((report, code))
}

type Outcome = Result<(u8, String), Failure>;

fn catalog_cmd(ctx: &mut Ctx, report: &mut RunReport) -> Outcome {
    let summaries = ctx.catalog.summaries();
    report.outcomes = Outcomes {
        status: "ok".into(),
        validated: true,
        ..Default::default()
    };
    report.details = json!({ "entries": summaries });
    Ok((EXIT_OK, "catalog.json".into()))
}

fn validate_cmd(ctx: &mut Ctx, report: &mut RunReport, arg: &str) -> Outcome {
    let input = Input::load(arg, ctx, &mut report.inputs)?;
    report.outcomes = Outcomes {
        status: "valid".into(),
        validated: true,
        ..Default::default()
    };
    report.metrics = shape_metrics(&input.mesh);
    report.details = json!({
        "euler_characteristic": euler_characteristic(&input.mesh),
        "degree_histogram": degree_histogram(&input.mesh),
        "hexagons_dissected": input.hexagons,
        "has_coordinates": input.embedding.is_some(),
    });
    Ok((EXIT_OK, format!("validate_{}.json", input.stem)))
}

fn realize_cmd(ctx: &mut Ctx, report: &mut RunReport, arg: &str) -> Outcome {
    let input = Input::load(arg, ctx, &mut report.inputs)?;
    // catalog reference embeddings are not used as starts here
    let from_scratch = report.inputs.file.is_none();
    let r = embedding_for(&input, ctx, from_scratch)?;
    report.metrics = shape_metrics(&input.mesh);
    report.outcomes.validated = true;
    fill_realization(report, &input.mesh, &r);
    report.outcomes.status = match (r.converged, r.self_intersecting) {
        (false, _) => "not_converged",
        (true, true) => "realized_self_intersecting",
        (true, false) => "realized",
    }
    .into();
    if r.converged {
        let off = sonobe::catalog::write_off(&input.mesh, Some(&r.embedding));
        ctx.write(&format!("{}_realized.off", input.stem), &off, Format::Off)?;
    }
    let code = if r.converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
    Ok((code, format!("realize_{}.json", input.stem)))
}

fn augment_cmd(ctx: &mut Ctx, report: &mut RunReport, arg: &str) -> Outcome {
    let input = Input::load(arg, ctx, &mut report.inputs)?;
    let r = embedding_for(&input, ctx, false)?;
    report.metrics = shape_metrics(&input.mesh);
    report.outcomes.validated = true;
    fill_realization(report, &input.mesh, &r);
    let file = format!("augment_{}.json", input.stem);
    if !r.converged {
        report.outcomes.status = "not_converged".into();
        return Ok((EXIT_NOT_CONVERGED, file));
    }
    let model = augment(&input.mesh, &r.embedding).map_err(Failure::other)?;
    let caps = cap_feasibility(&model);
    report.outcomes.augmented = Some(true);
    report.outcomes.feasible = Some(caps.feasible);
    report.outcomes.status = if caps.feasible { "feasible" } else { "infeasible" }.into();
    let heights = model.apex_heights();
    let min_wedge = caps.edge_wedge_angles.iter().cloned().fold(f64::INFINITY, f64::min);
    report.details = json!({
        "colliding_pairs": caps.colliding_pairs,
        "boundary_contacts": caps.boundary_contacts,
        "min_wedge_angle": min_wedge,
        "apex_height_min": heights.iter().cloned().fold(f64::INFINITY, f64::min),
        "apex_height_max": heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        "augmented_vertices": model.vertex_count(),
        "augmented_faces": model.cap_faces.len(),
    });
    let surface = model.surface().map_err(Failure::other)?;
    let points = Embedding::new(model.points()).map_err(Failure::other)?;
    let off = sonobe::catalog::write_off(&surface, Some(&points));
    ctx.write(&format!("{}_augmented.off", input.stem), &off, Format::Off)?;
    let code = if caps.feasible { EXIT_OK } else { EXIT_INFEASIBLE };
    Ok((code, file))
}

fn blueprint_cmd(ctx: &mut Ctx, report: &mut RunReport, arg: &str, start: Option<usize>, colors: usize) -> Outcome {
    let input = Input::load(arg, ctx, &mut report.inputs)?;
    report.metrics = shape_metrics(&input.mesh);
    report.outcomes.validated = true;
    report.outcomes.status = "ok".into();
    let plan = assembly_plan(&input.mesh, start).map_err(Failure::validation)?;
    let coloring = match color_modules(&input.mesh, colors).map_err(Failure::validation)? {
        ColoringOutcome::Colored(c) => json!(c),
        ColoringOutcome::NoColoring => json!(null),
    };
    let diagram = vertex_diagram(&input.mesh).with_layout().map_err(Failure::other)?;
    let planar = diagram.layout.as_ref().is_some_and(|l| l.planar);
    report.details = json!({
        "pyramids_at": diagram.pyramids_at,
        "diagram_planar": planar,
        "assembly_steps": plan.steps.len(),
        "first_step_modules": plan.steps.first().map_or(0, |s| s.modules_added.len()),
        "coloring": coloring,
    });
    let svg = diagram.to_svg().map_err(Failure::other)?;
    ctx.write(&format!("{}_diagram.svg", input.stem), &svg, Format::Svg)?;
    let plan_json = serde_json::to_string_pretty(&plan).expect("plan serializes") + "\n";
    ctx.write(&format!("{}_plan.json", input.stem), &plan_json, Format::Json)?;
    Ok((EXIT_OK, format!("blueprint_{}.json", input.stem)))
}

fn net_cmd(ctx: &mut Ctx, report: &mut RunReport, arg: &str, root: Option<usize>) -> Outcome {
    let input = Input::load(arg, ctx, &mut report.inputs)?;
    let r = embedding_for(&input, ctx, false)?;
    report.metrics = shape_metrics(&input.mesh);
    report.outcomes.validated = true;
    fill_realization(report, &input.mesh, &r);
    let file = format!("net_{}.json", input.stem);
    if !r.converged {
        report.outcomes.status = "not_converged".into();
        return Ok((EXIT_NOT_CONVERGED, file));
    }
    let opts = UnfoldOptions {
        root_face: root,
        seed: ctx.cli.seed,
        ..Default::default()
    };
    let net = unfold(&input.mesh, &r.embedding, &opts);
    report.outcomes.status = if net.overlap_free() {
        "overlap_free"
    } else {
        "overlapping"
    }
    .into();
    report.details = json!({
        "overlap_free": net.overlap_free(),
        "attempts": net.attempts,
        "root_face": net.root_face,
        "overlapping_pairs": net.overlaps,
        "tree_edges": net.tree_edges,
        "boundary_edges": net.boundary_edges,
    });
    ctx.write(&format!("{}_net.svg", input.stem), &net_svg(&net), Format::Svg)?;
    ctx.write(
        &format!("{}_net.json", input.stem),
        &(placements_json(&net) + "\n"),
        Format::Json,
    )?;
    Ok((EXIT_OK, file))
}

fn parse_grid(grid: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::validation(format!("grid must look like MxN, got {grid:?}"));
    let (m, n) = grid.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        m.trim().parse().map_err(|_| bad())?,
        n.trim().parse().map_err(|_| bad())?,
    ))
}

fn search_torus_cmd(ctx: &mut Ctx, report: &mut RunReport, grid: Option<&str>, name: Option<&str>) -> Outcome {
    let input = match (grid, name) {
        (Some(g), _) => {
            report.inputs.grid = Some(g.to_string());
            let (m, n) = parse_grid(g)?;
            let mesh = torus_grid(m, n)?;
            Input {
                stem: format!("torus_grid_{m}x{n}"),
                mesh,
                embedding: None,
                hexagons: 0,
            }
        }
        (None, Some(n)) => Input::load(n, ctx, &mut report.inputs)?,
        (None, None) => return Err(Failure::validation("need --grid or --name")),
    };
    report.metrics = shape_metrics(&input.mesh);
    report.outcomes.validated = true;
    let r = embedding_for(&input, ctx, false)?;
    fill_realization(report, &input.mesh, &r);
    let status = if !r.converged {
        "not_realized"
    } else if r.self_intersecting {
        "realized_self_intersecting"
    } else {
        let model = augment(&input.mesh, &r.embedding).map_err(Failure::other)?;
        let caps = cap_feasibility(&model);
        report.outcomes.augmented = Some(true);
        report.outcomes.feasible = Some(caps.feasible);
        if caps.feasible {
            "realized_feasible"
        } else {
            "realized_infeasible"
        }
    };
    report.outcomes.status = status.into();
    report.details = json!({
        "search_outcome": status,
        "best_residual": r.energy,
        "euler_characteristic": euler_characteristic(&input.mesh),
    });
    if r.converged {
        let off = sonobe::catalog::write_off(&input.mesh, Some(&r.embedding));
        ctx.write(&format!("{}_realized.off", input.stem), &off, Format::Off)?;
    }
    Ok((EXIT_OK, format!("search-torus_{}.json", input.stem)))
}
