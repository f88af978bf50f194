use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use khslice::batteries::{self, write_points, CLOUD_SAMPLES, CURVE_SAMPLES, LOOP_TOL, MOMENT_TOL, SLICE_SAMPLES};
use khslice::config::{init_threads, Format, RunConfig, DEFAULT_MAX_CROSSINGS};
use khslice::corpus;
use khslice::kh;
use khslice::report::Report;
use khslice_core::braid::parse_braid;
use khslice_core::curves::parse_matching;
use khslice_core::diagram::braid_closure_diagram;
use khslice_core::slice::SPECTRUM_TOL;
use khslice_core::transport::TransportOptions;

#[derive(Parser)]
#[command(name = "khslice", version, about = "Khovanov homology of braid closures, arc systems and slice geometry checks")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Flags {
    /// Output format: text, json or csv.
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Overrides the battery's tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Overrides the battery's sample count (at least 8).
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_CROSSINGS)]
    max_crossings: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Khovanov homology and Jones polynomial of a braid closure.
    Kh {
        /// Braid as `m: k1 k2 ...`.
        braid: String,
        /// Also write the closure diagram as JSON.
        #[arg(long)]
        dump_diagram: Option<PathBuf>,
    },
    /// Random Markov moves; checks the homology does not change.
    Markov {
        braid: String,
        #[arg(long, default_value_t = 6)]
        moves: usize,
    },
    /// Homology checks over a braid corpus (the bundled one by default).
    Corpus { file: Option<PathBuf> },
    /// Slice and transport batteries.
    Geom {
        #[command(subcommand)]
        which: Geom,
    },
    /// Slice batteries.
    Slice {
        #[command(subcommand)]
        which: SliceCmd,
    },
    /// Arc-system battery, or the action of one braid on one matching.
    Curves {
        /// Matching as `m; (1,4)+ (2,3)+`.
        #[arg(long, requires = "braid")]
        matching: Option<String>,
        #[arg(long, requires = "matching")]
        braid: Option<String>,
        /// Matching to intersect the result with (default: the input).
        #[arg(long, requires = "matching")]
        against: Option<String>,
    },
}

#[derive(Subcommand)]
enum Geom {
    Slice,
    A1 {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// CSV dump of the cloud after the full loop.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    A2 {
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        power: i32,
        /// CSV dump of the transported cloud.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    Maslov,
}

#[derive(Subcommand)]
enum SliceCmd {
    Verify,
}

fn run(cmd: Command, cfg: &RunConfig) -> Result<Report, String> {
    let opts = TransportOptions::default();
    let dump = |cloud: Option<_>, path: Option<PathBuf>| -> Result<(), String> {
        match (cloud, path) {
            (Some(c), Some(p)) => write_points(&c, &p).map_err(|e| format!("{}: {e}", p.display())),
            _ => Ok(()),
        }
    };
    Ok(match cmd {
        Command::Kh { braid, dump_diagram } => {
            let b = parse_braid(&braid).map_err(|e| e.to_string())?;
            if let Some(path) = dump_diagram {
                let json = serde_json::to_string_pretty(&braid_closure_diagram(&b)).map_err(|e| e.to_string())?;
                std::fs::write(&path, json + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
            }
            kh::kh_report(&b, cfg).map_err(|e| e.to_string())?
        }
        Command::Markov { braid, moves } => {
            let b = parse_braid(&braid).map_err(|e| e.to_string())?;
            kh::markov_report(&b, moves, cfg).map_err(|e| e.to_string())?
        }
        Command::Corpus { file } => {
            let entries = match file {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
                    corpus::entries(&text).map_err(|(line, e)| format!("{}:{line}: {e}", p.display()))?
                }
                None => corpus::bundled(),
            };
            kh::corpus_report(&entries, cfg)
        }
        Command::Geom { which: Geom::Slice } | Command::Slice { which: SliceCmd::Verify } => {
            batteries::slice_report(cfg.samples_or(SLICE_SAMPLES), cfg.seed, cfg.tol_or(SPECTRUM_TOL))
        }
        Command::Geom { which: Geom::A1 { t, points } } => {
            let (r, cloud) = batteries::a1_report(t, cfg.samples_or(CLOUD_SAMPLES), cfg.tol_or(LOOP_TOL), &opts);
            dump(cloud, points)?;
            r
        }
        Command::Geom { which: Geom::A2 { d, eps, power, points } } => {
            let (r, cloud) =
                batteries::a2_report(d, eps, power, cfg.samples_or(CLOUD_SAMPLES), cfg.tol_or(MOMENT_TOL), &opts);
            dump(cloud, points)?;
            r
        }
        Command::Geom { which: Geom::Maslov } => batteries::maslov_report(&opts),
        Command::Curves { matching: Some(m), braid: Some(b), against } => {
            let m = parse_matching(&m).map_err(|e| e.to_string())?;
            let b = parse_braid(&b).map_err(|e| e.to_string())?;
            let against = against.map(|a| parse_matching(&a)).transpose().map_err(|e| e.to_string())?;
            batteries::curves_act_report(&m, &b, against.as_ref())?
        }
        Command::Curves { .. } => batteries::curves_report(cfg.samples_or(CURVE_SAMPLES), cfg.seed),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let f = cli.flags;
    let cfg = RunConfig {
        format: f.format,
        out: f.out,
        seed: f.seed,
        tol: f.tol,
        samples: f.samples,
        max_crossings: f.max_crossings,
    };
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    init_threads();
    let mut report = match run(cli.command, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    report.seed = cfg.seed;
    let text = report.render(cfg.format);
    match &cfg.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
