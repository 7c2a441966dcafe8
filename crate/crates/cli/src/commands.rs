use std::fs;
use std::path::{Path, PathBuf};

use tubal::io::{load_mask, load_t3, save_mask, save_t3};
use tubal::lab::{
    dof, incoherence, phase_grid, psnr, rand_low_tubal, rel_error, run_table1, run_table2, PhaseKind,
    PhaseSpec, Table1Row, Table2Row, REPORT_RANK_TOL,
};
use tubal::solve::LinearStrategy;
use tubal::tsvd::DEFAULT_RANK_TOL;
use tubal::{
    make_bernoulli_mask, make_gaussian_map, solve_completion, solve_gaussian, spectral_norm, tnn, tsvd,
    tubal_rank, Dims, SampleMask, Solution, TSvdMode, Tensor3,
};

use crate::args::{Cli, Command, Kind, Settings};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::pnm::{read_image, write_image, Image};
use crate::report::{opt_real, real, solver_fields, write_csv, write_history, SOLVER_COLUMNS};

/// Result of a successful run: summary lines for the terminal and the files
/// written. `unconverged` holds the iteration count of a solve that hit the
/// cap; its outputs are still written.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub lines: Vec<String>,
    pub outputs: Vec<String>,
    pub unconverged: Option<usize>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        if self.unconverged.is_some() {
            3
        } else {
            0
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn wrote(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    fn solved(&mut self, sol: &Solution) {
        if !sol.report.converged {
            self.unconverged = Some(sol.report.iterations);
        }
    }
}

pub fn run(cli: Cli) -> CliResult<RunOutput> {
    match cli.command {
        Command::Info { tensor } => info(&tensor, &cli.settings),
        Command::Replay { manifest } => {
            let m = RunManifest::load(&manifest)?;
            if matches!(m.command, Command::Replay { .. } | Command::Info { .. }) {
                return Err(CliError::Usage("manifest does not record a replayable command".into()));
            }
            let settings = Settings {
                out: cli.settings.out,
                ..m.settings
            };
            execute(m.command, settings)
        }
        command => execute(resolve_paths(command)?, cli.settings),
    }
}

fn absolute(p: PathBuf) -> CliResult<PathBuf> {
    Ok(fs::canonicalize(p)?)
}

/// Input paths are recorded as absolute paths so manifests replay from
/// any working directory.
fn resolve_paths(command: Command) -> CliResult<Command> {
    Ok(match command {
        Command::Recover { tensor, m, linear } => Command::Recover {
            tensor: absolute(tensor)?,
            m,
            linear,
        },
        Command::Complete { tensor, p, mask } => Command::Complete {
            tensor: absolute(tensor)?,
            p,
            mask: mask.map(absolute).transpose()?,
        },
        Command::Inpaint { image, p, mask } => Command::Inpaint {
            image: absolute(image)?,
            p,
            mask: mask.map(absolute).transpose()?,
        },
        Command::Frames { dir, p } => Command::Frames {
            dir: absolute(dir)?,
            p,
        },
        other => other,
    })
}

fn execute(command: Command, settings: Settings) -> CliResult<RunOutput> {
    let out = settings
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("--out <DIR> is required".into()))?;
    fs::create_dir_all(&out)?;
    let mut run = RunOutput::default();
    match &command {
        Command::Gen { n1, n2, n3, r, scale } => {
            let dims = Dims::new(*n1, *n2, *n3)?;
            let x = rand_low_tubal(dims, *r, settings.seed, (*scale).into())?;
            save_t3(out.join("tensor.t3"), &x)?;
            run.wrote("tensor.t3");
            run.line(format!("tensor.t3: {dims}, tubal rank {r}"));
        }
        Command::Recover { tensor, m, linear } => {
            recover(&mut run, &out, &settings, tensor, *m, (*linear).into())?
        }
        Command::Complete { tensor, p, mask } => {
            complete(&mut run, &out, &settings, tensor, *p, mask.as_deref())?
        }
        Command::Phase {
            kind,
            n1,
            n2,
            n3,
            levels,
            ranks,
            trials,
            threshold,
        } => {
            let spec = PhaseSpec {
                kind: (*kind).into(),
                dims: Dims::new(*n1, *n2, *n3)?,
                levels: levels.clone(),
                ranks: ranks.clone(),
                trials: *trials,
                seed: settings.seed,
                threshold: *threshold,
                config: settings.admm(LinearStrategy::Auto),
            };
            phase(&mut run, &out, &spec, *kind)?
        }
        Command::Table { which } => table(&mut run, &out, &settings, *which)?,
        Command::Inpaint { image, p, mask } => {
            inpaint(&mut run, &out, &settings, image, *p, mask.as_deref())?
        }
        Command::Frames { dir, p } => frames(&mut run, &out, &settings, dir, *p)?,
        Command::Info { .. } | Command::Replay { .. } => unreachable!("handled by run"),
    }
    RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command,
        settings,
        outputs: run.outputs.clone(),
    }
    .save(&out)?;
    Ok(run)
}

fn last_iterate(res: tubal::Result<Solution>) -> CliResult<Solution> {
    match res {
        Ok(sol) => Ok(sol),
        Err(tubal::Error::NotConverged(sol)) => Ok(*sol),
        Err(e) => Err(e.into()),
    }
}

fn report_rank_tol(settings: &Settings) -> f64 {
    settings.rank_tol.unwrap_or(REPORT_RANK_TOL)
}

fn save_solution(run: &mut RunOutput, out: &Path, settings: &Settings, sol: &Solution) -> CliResult<()> {
    save_t3(out.join("solution.t3"), &sol.x)?;
    run.wrote("solution.t3");
    if settings.history {
        write_history(&out.join("history.csv"), &sol.report)?;
        run.wrote("history.csv");
    }
    run.solved(sol);
    Ok(())
}

fn recover(
    run: &mut RunOutput,
    out: &Path,
    settings: &Settings,
    tensor: &Path,
    m: usize,
    linear: LinearStrategy,
) -> CliResult<()> {
    let x0 = load_t3(tensor)?;
    let dims = x0.dims();
    let map = make_gaussian_map(m, dims, settings.seed)?;
    let y = map.apply(&x0)?;
    let sol = last_iterate(solve_gaussian(&map, &y, &settings.admm(linear)))?;
    save_solution(run, out, settings, &sol)?;

    let rank = tubal_rank(&sol.x, report_rank_tol(settings))?;
    let rel = rel_error(&sol.x, &x0);
    let mut row = vec![
        dims.n1.to_string(),
        dims.n2.to_string(),
        dims.n3.to_string(),
        m.to_string(),
        settings.seed.to_string(),
        rank.to_string(),
        real(rel),
        real(sol.report.objective),
    ];
    row.extend(solver_fields(&sol.report));
    let mut header = vec!["n1", "n2", "n3", "m", "seed", "rank", "rel_error", "tnn"];
    header.extend(SOLVER_COLUMNS);
    write_csv(&out.join("report.csv"), &header, &[row])?;
    run.wrote("report.csv");
    run.line(format!(
        "recovered {dims} from m = {m}: rank {rank}, rel_error {rel:.3e}, {} iterations",
        sol.report.iterations
    ));
    Ok(())
}

/// Mask for a completion run: drawn from `p`, or loaded and checked.
fn completion_mask(dims: Dims, p: Option<f64>, mask: Option<&Path>, seed: u64) -> CliResult<SampleMask> {
    match (p, mask) {
        (Some(p), None) => Ok(make_bernoulli_mask(dims, p, seed)?),
        (None, Some(path)) => {
            let m = load_mask(path)?;
            if m.dims() != dims {
                return Err(CliError::Usage(format!(
                    "mask is {} but the data is {dims}",
                    m.dims()
                )));
            }
            Ok(m)
        }
        _ => Err(CliError::Usage("give exactly one of --p and --mask".into())),
    }
}

fn complete(
    run: &mut RunOutput,
    out: &Path,
    settings: &Settings,
    tensor: &Path,
    p: Option<f64>,
    mask_path: Option<&Path>,
) -> CliResult<()> {
    let data = load_t3(tensor)?;
    let dims = data.dims();
    let mask = completion_mask(dims, p, mask_path, settings.seed)?;
    // With a stored mask the input holds observations only; with a rate it
    // is the full tensor and serves as ground truth.
    let truth = p.map(|_| &data);
    let observed = mask.proj_omega(&data)?;
    let sol = last_iterate(solve_completion(&mask, &observed, &settings.admm(LinearStrategy::Auto)))?;
    save_solution(run, out, settings, &sol)?;
    save_mask(out.join("mask.om"), &mask)?;
    run.wrote("mask.om");

    let rank = tubal_rank(&sol.x, report_rank_tol(settings))?;
    let rel = truth.map(|t| rel_error(&sol.x, t));
    let mut row = vec![
        dims.n1.to_string(),
        dims.n2.to_string(),
        dims.n3.to_string(),
        real(mask.p()),
        mask.count().to_string(),
        mask.seed().to_string(),
        rank.to_string(),
        opt_real(rel),
        real(sol.report.objective),
    ];
    row.extend(solver_fields(&sol.report));
    let mut header = vec!["n1", "n2", "n3", "p", "observed", "seed", "rank", "rel_error", "tnn"];
    header.extend(SOLVER_COLUMNS);
    write_csv(&out.join("report.csv"), &header, &[row])?;
    run.wrote("report.csv");
    let err = rel.map(|r| format!(", rel_error {r:.3e}")).unwrap_or_default();
    run.line(format!(
        "completed {dims} from {} entries: rank {rank}{err}, {} iterations",
        mask.count(),
        sol.report.iterations
    ));
    Ok(())
}

fn level_field(kind: Kind, level: f64) -> String {
    match kind {
        Kind::Gaussian => format!("{}", level as u64),
        Kind::Completion => real(level),
    }
}

fn phase(run: &mut RunOutput, out: &Path, spec: &PhaseSpec, kind: Kind) -> CliResult<()> {
    let grid = phase_grid(spec)?;
    let d = spec.dims;
    let name = match spec.kind {
        PhaseKind::Gaussian => "gaussian",
        PhaseKind::Completion => "completion",
    };
    let rows: Vec<Vec<String>> = grid
        .cells
        .iter()
        .map(|c| {
            vec![
                name.to_string(),
                d.n1.to_string(),
                d.n2.to_string(),
                d.n3.to_string(),
                c.r.to_string(),
                level_field(kind, c.level),
                c.trials.to_string(),
                c.successes.to_string(),
                real(c.success_rate()),
                real(c.mean_rel_error),
                real(c.mean_iterations),
            ]
        })
        .collect();
    write_csv(
        &out.join("grid.csv"),
        &[
            "kind",
            "n1",
            "n2",
            "n3",
            "r",
            "m_or_p",
            "trials",
            "successes",
            "success_rate",
            "mean_rel_err",
            "mean_iters",
        ],
        &rows,
    )?;
    run.wrote("grid.csv");

    // Matrix of success rates for plotting: one row per rank, one column
    // per level.
    let mut dat = format!(
        "# success rate, rows r = {:?}, columns m_or_p = {:?}\n",
        spec.ranks, spec.levels
    );
    for ri in 0..spec.ranks.len() {
        let row: Vec<String> = (0..spec.levels.len())
            .map(|li| format!("{}", grid.cell(li, ri).success_rate()))
            .collect();
        dat.push_str(&row.join(" "));
        dat.push('\n');
    }
    fs::write(out.join("grid.dat"), dat)?;
    run.wrote("grid.dat");

    for c in &grid.cells {
        if c.errors > 0 {
            run.line(format!(
                "cell (m_or_p = {}, r = {}): {} of {} trials failed",
                level_field(kind, c.level),
                c.r,
                c.errors,
                c.trials
            ));
        }
    }
    run.line(format!("{} cells written to grid.csv", grid.cells.len()));
    Ok(())
}

fn table(run: &mut RunOutput, out: &Path, settings: &Settings, which: u8) -> CliResult<()> {
    let cfg = settings.admm(LinearStrategy::Auto);
    let seed = settings.seed;
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = if which == 1 {
        let specs: Vec<Table1Row> = [(10, 2, 541), (20, 4, 2161), (30, 6, 4861)]
            .iter()
            .enumerate()
            .map(|(i, &(n, r, m))| Table1Row {
                n,
                n3: 5,
                r,
                m,
                seed: seed.wrapping_add(i as u64),
            })
            .collect();
        let results = run_table1(&specs, &cfg);
        let rows = specs
            .iter()
            .zip(results)
            .map(|(s, res)| {
                let mut row = vec![
                    s.n.to_string(),
                    s.n3.to_string(),
                    s.r.to_string(),
                    s.m.to_string(),
                    dof(s.n as u64, s.n as u64, s.n3 as u64, s.r as u64).to_string(),
                ];
                row.extend(outcome_fields(res));
                row
            })
            .collect();
        (
            vec!["n", "n3", "r", "m", "d_r", "rank", "rel_error", "iterations", "converged", "error"],
            rows,
        )
    } else {
        let specs: Vec<Table2Row> = [(50, 3, 0.47), (50, 5, 0.57), (100, 5, 0.39)]
            .iter()
            .enumerate()
            .map(|(i, &(n, r, p))| Table2Row {
                n,
                r,
                p,
                seed: seed.wrapping_add(i as u64),
            })
            .collect();
        let results = run_table2(&specs, &cfg);
        let rows = specs
            .iter()
            .zip(results)
            .map(|(s, res)| {
                let d_r = dof(s.n as u64, s.n as u64, s.n as u64, s.r as u64);
                let observed = res.as_ref().map(|o| o.samples.to_string()).unwrap_or_default();
                let ratio = res
                    .as_ref()
                    .map(|o| real(o.samples as f64 / d_r as f64))
                    .unwrap_or_default();
                let mut row = vec![s.n.to_string(), s.r.to_string(), real(s.p), observed, d_r.to_string(), ratio];
                row.extend(outcome_fields(res));
                row
            })
            .collect();
        (
            vec![
                "n", "r", "p", "m", "d_r", "m_over_d_r", "rank", "rel_error", "iterations", "converged",
                "error",
            ],
            rows,
        )
    };
    write_csv(&out.join("table.csv"), &header, &rows)?;
    run.wrote("table.csv");
    run.line(format!("{} rows written to table.csv", rows.len()));
    Ok(())
}

fn outcome_fields(res: tubal::Result<tubal::lab::TableOutcome>) -> Vec<String> {
    match res {
        Ok(o) => vec![
            o.verdict.rank.to_string(),
            real(o.verdict.rel_error),
            o.verdict.iterations.to_string(),
            o.verdict.converged.to_string(),
            String::new(),
        ],
        Err(e) => vec![String::new(), String::new(), String::new(), String::new(), e.to_string()],
    }
}

fn inpaint(
    run: &mut RunOutput,
    out: &Path,
    settings: &Settings,
    image: &Path,
    p: Option<f64>,
    mask_path: Option<&Path>,
) -> CliResult<()> {
    let img = read_image(image)?;
    let m = img.to_tensor()?;
    let mask = completion_mask(m.dims(), p, mask_path, settings.seed)?;
    let observed = mask.proj_omega(&m)?;
    let sol = last_iterate(solve_completion(&mask, &observed, &settings.admm(LinearStrategy::Auto)))?;
    let ext = if img.channels == 1 { "pgm" } else { "ppm" };

    let filled = Image::from_tensor(&sol.x);
    let name = format!("inpainted.{ext}");
    write_image(&out.join(&name), &filled)?;
    run.wrote(&name);
    let name = format!("observed.{ext}");
    write_image(&out.join(&name), &Image::from_tensor(&observed))?;
    run.wrote(&name);
    save_mask(out.join("mask.om"), &mask)?;
    run.wrote("mask.om");
    if settings.history {
        write_history(&out.join("history.csv"), &sol.report)?;
        run.wrote("history.csv");
    }
    run.solved(&sol);

    let db = psnr(&filled.to_tensor()?, &m);
    let mut header = vec!["height", "width", "channels", "p", "observed", "seed", "psnr"];
    header.extend(SOLVER_COLUMNS);
    let mut row = vec![
        img.height.to_string(),
        img.width.to_string(),
        img.channels.to_string(),
        real(mask.p()),
        mask.count().to_string(),
        mask.seed().to_string(),
        real(db),
    ];
    row.extend(solver_fields(&sol.report));
    write_csv(&out.join("report.csv"), &header, &[row])?;
    run.wrote("report.csv");
    run.line(format!("PSNR {db:.2} dB"));
    Ok(())
}

fn frames(run: &mut RunOutput, out: &Path, settings: &Settings, dir: &Path, p: f64) -> CliResult<()> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")));
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Usage(format!("no .pgm frames in {}", dir.display())));
    }
    let mut images = Vec::with_capacity(paths.len());
    for path in &paths {
        let img = read_image(path)?;
        if img.channels != 1 {
            return Err(CliError::UnsupportedFormat(format!(
                "{}: frames must be grayscale",
                path.display()
            )));
        }
        if let Some(first) = images.first() {
            let first: &Image = first;
            if (img.height, img.width) != (first.height, first.width) {
                return Err(CliError::FrameSizeMismatch {
                    name: path.display().to_string(),
                    expected: (first.height, first.width),
                    got: (img.height, img.width),
                });
            }
        }
        images.push(img);
    }
    let (h, w) = (images[0].height, images[0].width);
    // Lateral slice j holds frame j.
    let m = Tensor3::from_fn(Dims::new(h, images.len(), w)?, |i, j, k| {
        images[j].pixels[i * w + k] as f64 / 255.0
    });
    let mask = make_bernoulli_mask(m.dims(), p, settings.seed)?;
    let sol = last_iterate(solve_completion(
        &mask,
        &mask.proj_omega(&m)?,
        &settings.admm(LinearStrategy::Auto),
    ))?;
    let quantized = Image::from_tensor(&sol.x).to_tensor()?;

    let frame_dir = out.join("frames");
    fs::create_dir_all(&frame_dir)?;
    for (j, path) in paths.iter().enumerate() {
        let frame = Image {
            width: w,
            height: h,
            channels: 1,
            pixels: (0..h)
                .flat_map(|i| (0..w).map(move |k| (i, k)))
                .map(|(i, k)| crate::pnm::quantize(sol.x.get(i, j, k)))
                .collect(),
        };
        let name = path.file_name().expect("listed file").to_string_lossy().into_owned();
        write_image(&frame_dir.join(&name), &frame)?;
        run.wrote(&format!("frames/{name}"));
    }
    if settings.history {
        write_history(&out.join("history.csv"), &sol.report)?;
        run.wrote("history.csv");
    }
    run.solved(&sol);

    let db = psnr(&quantized, &m);
    let rel = rel_error(&quantized, &m);
    let mut header = vec!["frames", "height", "width", "p", "observed", "seed", "psnr", "rel_error"];
    header.extend(SOLVER_COLUMNS);
    let mut row = vec![
        images.len().to_string(),
        h.to_string(),
        w.to_string(),
        real(p),
        mask.count().to_string(),
        settings.seed.to_string(),
        real(db),
        real(rel),
    ];
    row.extend(solver_fields(&sol.report));
    write_csv(&out.join("report.csv"), &header, &[row])?;
    run.wrote("report.csv");
    run.line(format!("{} frames: PSNR {db:.2} dB, rel_error {rel:.3e}", images.len()));
    Ok(())
}

/// Summary statistics of a tensor file, one `key: value` per line.
pub fn info_lines(x: &Tensor3, rank_tol: f64) -> CliResult<Vec<String>> {
    let rank = tubal_rank(x, rank_tol)?;
    let mu = if rank == 0 {
        "n/a".to_string()
    } else {
        real(incoherence(&tsvd(x, TSvdMode::Skinny(Some(rank)))))
    };
    Ok(vec![
        format!("dims: {}", x.dims()),
        format!("tubal_rank: {rank}"),
        format!("tnn: {}", real(tnn(x))),
        format!("spectral_norm: {}", real(spectral_norm(x))),
        format!("frobenius_norm: {}", real(x.fro_norm())),
        format!("incoherence: {mu}"),
    ])
}

fn info(tensor: &Path, settings: &Settings) -> CliResult<RunOutput> {
    let x = load_t3(tensor)?;
    Ok(RunOutput {
        lines: info_lines(&x, settings.rank_tol.unwrap_or(DEFAULT_RANK_TOL))?,
        ..RunOutput::default()
    })
}
