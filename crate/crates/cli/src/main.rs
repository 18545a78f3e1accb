//! `tentlim`: command-line front end for tent-map inverse limits.
//!
//! Exit codes: 0 success, 1 a verification check failed (or output could not
//! be written), 2 usage error or invalid input, 3 computation refused.

mod config;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{Mode, RunConfig};
use tentlim::chains::{build_chain, refines};
use tentlim::folding::{folding_points, is_folding_point};
use tentlim::invlim::{p_points_on_arc, parse_point, Arc, TailRule};
use tentlim::isotopy::DisplacementMap;
use tentlim::report::{self, Series};
use tentlim::verify::{verify_all, VerifyConfig};
use tentlim::{Approx, BigRational, Error, Scalar, TentMap};

const DEFAULT_DEPTH: usize = 64;
const DEFAULT_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(
    name = "tentlim",
    version,
    about = "Tent-map inverse limits: orbits, chains, folding points and isotopies"
)]
struct Cli {
    /// Configuration file with `key = value` lines; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Slope s in [√2, 2], as p/q or a decimal (decimals use float mode).
    #[arg(long, global = true)]
    slope: Option<String>,
    /// Arithmetic mode; defaults to exact for p/q slopes.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Orbit depth for ω-limits, recurrence tests and folding enumeration.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Clustering and comparison tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Directory for output files; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Forward orbit x, T(x), …, T^n(x).
    Orbit {
        #[arg(long)]
        x: String,
        #[arg(long)]
        n: usize,
    },
    /// ω-limit set of a point (the critical point by default).
    Omega {
        #[arg(long, default_value = "1/2")]
        x: String,
        /// Iterates discarded before sampling.
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        burn: usize,
    },
    /// Whether the critical point stays away from its own forward orbit.
    Nonrecurrent,
    /// Chains C_{k,r}.
    Chain {
        #[command(subcommand)]
        action: ChainCommand,
    },
    /// p-points of the arc {(N, u, L) : a ≤ u ≤ b}.
    Ppoints {
        #[arg(long)]
        level: usize,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        p: usize,
    },
    /// Folding points.
    Folding {
        #[command(subcommand)]
        action: FoldingCommand,
    },
    /// Invariant suites.
    Verify {
        #[command(subcommand)]
        action: VerifyCommand,
    },
    /// SVG plots in the (π_i, π_j) plane.
    Plot {
        #[command(subcommand)]
        action: PlotCommand,
    },
}

#[derive(Args, Debug)]
struct ChainArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    r: usize,
}

#[derive(Subcommand, Debug)]
enum ChainCommand {
    /// Links of C_{k,r}.
    Build(ChainArgs),
    /// Certified mesh of C_{k,r}.
    Mesh {
        #[command(flatten)]
        chain: ChainArgs,
        /// Coordinates bounded individually beyond k; defaults to k.
        #[arg(long)]
        tail_depth: Option<usize>,
    },
    /// Refinement witness of C_{k,r} into C_{k2,r2}.
    Refines {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        k2: usize,
        #[arg(long)]
        r2: usize,
    },
}

#[derive(Subcommand, Debug)]
enum FoldingCommand {
    /// Certificate for one point, e.g. "point N=0 u=0 tail=L".
    Detect {
        #[arg(long)]
        point: String,
    },
    /// All folding points reachable by backward paths in ω(1/2).
    Enumerate,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Every suite; exits 0 iff all checks pass.
    All {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 3)]
        maps: usize,
        #[arg(long, default_value_t = 3)]
        grid: usize,
        #[arg(long, default_value_t = 6)]
        mesh_levels: usize,
    },
}

#[derive(Args, Debug)]
struct ArcArgs {
    #[arg(long)]
    level: usize,
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    /// Horizontal coordinate index.
    #[arg(long, default_value_t = 0)]
    i: usize,
    /// Vertical coordinate index.
    #[arg(long, default_value_t = 1)]
    j: usize,
    #[arg(long, default_value_t = 400)]
    samples: usize,
}

#[derive(Subcommand, Debug)]
enum PlotCommand {
    /// An arc of C_0.
    Composant(ArcArgs),
    /// An arc, its image under a seeded displacement map, and the slice H(·, t).
    Isotopy {
        #[command(flatten)]
        arc: ArcArgs,
        #[arg(long, default_value = "1/2")]
        t: String,
    },
}

/// Writes to `<out>/<name>` or to stdout.
fn emit(
    cfg: &RunConfig,
    name: &str,
    write: impl FnOnce(&mut dyn Write) -> tentlim::Result<()>,
) -> Result<()> {
    match &cfg.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            let mut file = io::BufWriter::new(fs::File::create(&path)?);
            write(&mut file)?;
            file.flush()?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn run<S: Scalar>(command: &Command, cfg: &RunConfig) -> Result<ExitCode> {
    let slope = cfg.slope.as_deref().context("missing --slope")?;
    let map = TentMap::new(S::parse_str(slope)?)?;
    let depth = cfg.depth.unwrap_or(DEFAULT_DEPTH);
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    let seed = cfg.seed.unwrap_or(0);
    match command {
        Command::Orbit { x, n } => {
            let orbit = map.orbit(&S::parse_str(x)?, *n)?;
            emit(cfg, "orbit.csv", |w| report::write_orbit_csv(w, &orbit))?;
        }
        Command::Omega { x, burn } => {
            let omega = map.omega_limit(&S::parse_str(x)?, *burn, depth, tol)?;
            emit(cfg, "omega.csv", |w| report::write_omega_csv(w, &omega))?;
        }
        Command::Nonrecurrent => {
            let result = map.nonrecurrence(depth, tol);
            emit(cfg, "nonrecurrent.csv", |w| {
                report::write_nonrecurrence_csv(w, &result)
            })?;
        }
        Command::Chain { action } => match action {
            ChainCommand::Build(c) => {
                let chain = build_chain(&map, c.k, c.r)?;
                emit(cfg, "chain.csv", |w| report::write_chain_csv(w, &chain))?;
            }
            ChainCommand::Mesh {
                chain: c,
                tail_depth,
            } => {
                let chain = build_chain(&map, c.k, c.r)?;
                let mesh = chain.mesh(&map, tail_depth.unwrap_or(c.k));
                emit(cfg, "mesh.csv", |w| report::write_mesh_csv(w, &chain, mesh))?;
            }
            ChainCommand::Refines { chain: c, k2, r2 } => {
                let fine = build_chain(&map, c.k, c.r)?;
                let coarse = build_chain(&map, *k2, *r2)?;
                let result = refines(&map, &fine, &coarse);
                eprintln!("refines={} total={}", result.refines(), result.is_total());
                emit(cfg, "witness.csv", |w| {
                    report::write_witness_csv(w, &result)
                })?;
            }
        },
        Command::Ppoints { level, a, b, p } => {
            let arc = Arc::new(
                &map,
                *level,
                S::parse_str(a)?,
                S::parse_str(b)?,
                TailRule::Left,
            )?;
            let points = p_points_on_arc(&map, &arc, *p).all();
            emit(cfg, "ppoints.csv", |w| {
                report::write_ppoints_csv(w, &points)
            })?;
        }
        Command::Folding { action } => {
            let omega = map.omega_limit(&S::half(), depth, depth, tol)?;
            let points = match action {
                FoldingCommand::Detect { point } => vec![parse_point(&map, point)?],
                FoldingCommand::Enumerate => folding_points(&map, &omega, depth)?,
            };
            let certs: Vec<_> = points
                .iter()
                .map(|x| is_folding_point(&map, x, &omega, depth, tol))
                .collect();
            emit(cfg, "folding.csv", |w| report::write_folding_csv(w, &certs))?;
        }
        Command::Verify {
            action:
                VerifyCommand::All {
                    samples,
                    maps,
                    grid,
                    mesh_levels,
                },
        } => {
            let vcfg = VerifyConfig {
                seed,
                samples: *samples,
                maps: *maps,
                grid: *grid,
                mesh_levels: *mesh_levels,
                depth,
                tol,
            };
            let result = verify_all(&map, &vcfg)?;
            emit(cfg, "verify.csv", |w| {
                report::write_suite_csv(w, &result.rows)
            })?;
            for suite in &result.skipped {
                eprintln!("skipped {suite}: ω(1/2) is not certified finite");
            }
            let failed = result.rows.iter().filter(|r| !r.pass).count();
            eprintln!("{} checks, {failed} failed", result.rows.len());
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Plot { action } => {
            let (args, svg) = match action {
                PlotCommand::Composant(args) => {
                    let arc = Arc::new(
                        &map,
                        args.level,
                        S::parse_str(&args.a)?,
                        S::parse_str(&args.b)?,
                        TailRule::Left,
                    )?;
                    let series = [Series {
                        label: arc.to_string(),
                        color: "#1f77b4",
                        points: report::arc_series(&map, &arc, args.i, args.j, args.samples),
                    }];
                    (
                        args,
                        report::render_svg(&format!("s = {slope}"), (args.i, args.j), &series),
                    )
                }
                PlotCommand::Isotopy { arc: args, t } => {
                    let arc = Arc::new(
                        &map,
                        args.level,
                        S::parse_str(&args.a)?,
                        S::parse_str(&args.b)?,
                        TailRule::Left,
                    )?;
                    let h = DisplacementMap::seeded(seed, 3, 16.0, &[S::zero()])?;
                    let t = S::parse_str(t)?;
                    let series =
                        report::isotopy_series(&map, &h, &arc, &t, (args.i, args.j), args.samples)?;
                    (
                        args,
                        report::render_svg(
                            &format!("s = {slope}, seed = {seed}"),
                            (args.i, args.j),
                            &series,
                        ),
                    )
                }
            };
            let name = format!("plot_{}_{}.svg", args.i, args.j);
            emit(cfg, &name, |w| Ok(w.write_all(svg.as_bytes())?))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e {
            Error::OmegaNotFinite
            | Error::PartitionCap { .. }
            | Error::NoInjectiveLevel(_)
            | Error::Ambiguous { .. }
            | Error::NotSameComposant(_) => 3,
            Error::Io(_) | Error::Csv(_) => 1,
            _ => 2,
        };
    }
    if err.downcast_ref::<io::Error>().is_some() {
        return 1;
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = (|| {
        let file = match &cli.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            slope: cli.common.slope.clone(),
            mode: cli.common.mode,
            depth: cli.common.depth,
            tol: cli.common.tol,
            out: cli.common.out.clone(),
            seed: cli.common.seed,
        };
        let cfg = file.overlay(flags);
        match cfg.resolved_mode()? {
            Mode::Exact => run::<BigRational>(&cli.command, &cfg),
            Mode::Float => run::<Approx>(&cli.command, &cfg),
        }
    })();
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
