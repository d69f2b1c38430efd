//! `colordiff` command-line tool.

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use colordiff_core::evaluation::{build_report, compute_distance_table, load_dataset, render_heatmap, DistanceTable};
use colordiff_core::metrics::{evaluate, Registry};
use colordiff_core::palette::{extract_palette, load_image, palette_of, save_swatch_sheet, Init, KmeansConfig};
use colordiff_core::{ColorError, ColorSpaceTag, Srgb8, WhitePoint};
use colordiff_survey::service::{run, ServiceConfig};
use colordiff_survey::simulate::{records_csv, run_simulation, Client, SimulationConfig};
use colordiff_survey::SurveyError;

#[derive(Parser)]
#[command(name = "colordiff", version, about = "Color conversions, color-difference metrics, palettes and perceptual evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a color to another color space.
    Convert {
        /// `#RRGGBB` or `r,g,b`
        color: String,
        #[arg(long)]
        to: ColorSpaceTag,
    },
    /// Distance between two colors under a registered metric.
    Dist {
        a: String,
        b: String,
        #[arg(long, default_value = "lab_cie2000")]
        metric: String,
    },
    /// Extract a dominant-color palette from an image with k-means.
    Palette(PaletteArgs),
    /// Correlate metric distances with human scores.
    Eval(EvalArgs),
    /// Run the survey HTTP service.
    Serve(ServeArgs),
    /// Drive a running survey service with synthetic respondents.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct PaletteArgs {
    image: PathBuf,
    /// Working color space, a comma-separated list, or `all`.
    #[arg(long, default_value = "lab")]
    space: String,
    #[arg(long, default_value_t = 6)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Use uniformly random initial centroids instead of k-means++.
    #[arg(long)]
    random_init: bool,
    /// Write a PNG swatch sheet, one row per space.
    #[arg(long)]
    sheet: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    dataset: PathBuf,
    /// Comma-separated metric ids; defaults to the table metrics.
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
    /// Precomputed distance table (`pair_id,<metric>...`) used instead of
    /// computing distances from the pair colors.
    #[arg(long)]
    distances: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    heatmap: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "COLORDIFF_ADDR", default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    #[arg(long, env = "COLORDIFF_DATA_DIR", default_value = "survey-data")]
    data_dir: PathBuf,
    #[arg(long, env = "COLORDIFF_DATASETS", default_value = "data/datasets")]
    datasets: PathBuf,
    #[arg(long, env = "COLORDIFF_STATIC_DIR")]
    static_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Dataset name as served by the service.
    dataset: String,
    #[arg(long, default_value_t = 15)]
    respondents: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "lab_cie2000")]
    oracle_metric: String,
    #[arg(long, env = "COLORDIFF_URL", default_value = "http://127.0.0.1:8080")]
    url: String,
    /// Where to write the dataset scored with the aggregated ratings.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the individual simulated responses as CSV.
    #[arg(long)]
    records: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<ColorError> for Failure {
    fn from(e: ColorError) -> Self {
        match e {
            ColorError::Parse(_)
            | ColorError::UnknownSpace(_)
            | ColorError::Usage(_)
            | ColorError::UnknownMetric { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<SurveyError> for Failure {
    fn from(e: SurveyError) -> Self {
        match e {
            SurveyError::Color(c) => c.into(),
            SurveyError::BadRequest(_) | SurveyError::Config(_) | SurveyError::UnknownDataset(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn write_file(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn convert_cmd(color: &str, to: ColorSpaceTag) -> Outcome {
    let c: Srgb8 = color.parse()?;
    let out = colordiff_core::color::convert_srgb(c, to, &WhitePoint::D65)?;
    let [x, y, z] = out.channels();
    println!("{x:.4} {y:.4} {z:.4}");
    Ok(())
}

fn dist_cmd(a: &str, b: &str, metric: &str) -> Outcome {
    let (a, b): (Srgb8, Srgb8) = (a.parse()?, b.parse()?);
    let reg = Registry::default();
    let d = evaluate(reg.lookup(metric)?, a, b, &WhitePoint::D65)?;
    println!("{d:.4}");
    Ok(())
}

fn palette_cmd(args: &PaletteArgs) -> Outcome {
    let spaces: Vec<ColorSpaceTag> = if args.space == "all" {
        ColorSpaceTag::ALL.to_vec()
    } else {
        args.space.split(',').map(|s| s.trim().parse()).collect::<colordiff_core::Result<_>>()?
    };
    let mut cfg = KmeansConfig::new(args.k, args.seed);
    cfg.tol = args.tol;
    cfg.max_iters = args.max_iters;
    cfg.restarts = args.restarts;
    if args.random_init {
        cfg.init = Init::Random;
    }
    let mut rows = Vec::new();
    if let [space] = spaces[..] {
        let result = extract_palette(&args.image, space, &cfg)?;
        print!("{}", result.report());
        rows.push(result.centroids_srgb);
    } else {
        let pixels = load_image(&args.image)?;
        for (i, space) in spaces.iter().enumerate() {
            let result = palette_of(&pixels, *space, &cfg)?;
            if i > 0 {
                println!();
            }
            print!("{}", result.report());
            rows.push(result.centroids_srgb);
        }
    }
    if let Some(sheet) = &args.sheet {
        save_swatch_sheet(&rows, sheet)?;
    }
    Ok(())
}

fn eval_cmd(args: &EvalArgs) -> Outcome {
    let ds = load_dataset(&args.dataset)?;
    if ds.human.is_none() {
        return Err(Failure::Usage(format!(
            "{} has no human score column; expected `pair_id,color_a,color_b,human_score` records",
            args.dataset.display()
        )));
    }
    let table = match &args.distances {
        Some(path) => {
            let mut table = DistanceTable::load(path)?;
            if let Some(keep) = &args.metrics {
                for m in keep {
                    if table.column(m).is_none() {
                        return Err(Failure::Usage(format!("{} has no `{m}` column", path.display())));
                    }
                }
                table.columns.retain(|(m, _)| keep.contains(m));
            }
            table
        }
        None => {
            let reg = Registry::default();
            let ids: Vec<&str> = match &args.metrics {
                Some(m) => m.iter().map(String::as_str).collect(),
                None => colordiff_core::metrics::TABLE_METRICS.to_vec(),
            };
            compute_distance_table(&ds, &ids, &reg, &WhitePoint::D65)?
        }
    };
    let report = build_report(&ds, &table)?;
    if let Some(out) = &args.out {
        write_file(out, &report.to_csv())?;
    }
    if let Some(svg) = &args.heatmap {
        write_file(svg, &render_heatmap(&report)?)?;
    }
    print!("{}", report.ranking_text());
    Ok(())
}

async fn shutdown_signal() {
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        match signal(SignalKind::terminate()) {
            Ok(mut term) => {
                tokio::select! {
                    _ = tokio::signal::ctrl_c() => {}
                    _ = term.recv() => {}
                }
            }
            Err(_) => {
                let _ = tokio::signal::ctrl_c().await;
            }
        }
    }
    #[cfg(not(unix))]
    {
        let _ = tokio::signal::ctrl_c().await;
    }
}

fn serve_cmd(args: &ServeArgs) -> Outcome {
    let cfg = ServiceConfig {
        data_dir: args.data_dir.clone(),
        dataset_dir: args.datasets.clone(),
        static_dir: args.static_dir.clone(),
    };
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Runtime(e.to_string()))?;
    rt.block_on(run(args.addr, cfg, shutdown_signal()))?;
    Ok(())
}

fn simulate_cmd(args: &SimulateArgs) -> Outcome {
    let cfg = SimulationConfig {
        respondents: args.respondents,
        noise: args.noise,
        seed: args.seed,
        oracle_metric: args.oracle_metric.clone(),
    };
    let reg = Registry::default();
    reg.lookup(&cfg.oracle_metric)?;
    if !(args.noise >= 0.0) {
        return Err(Failure::Usage(format!("--noise must be non-negative, got {}", args.noise)));
    }
    let client = Client::new(&args.url);
    let outcome = run_simulation(&client, &args.dataset, &cfg, &reg)?;
    if let Some(path) = &args.records {
        write_file(path, &records_csv(&outcome.records))?;
    }
    let text = outcome.dataset.to_text();
    match &args.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    eprintln!("submitted {} judgments from {} respondents", outcome.records.len(), args.respondents);
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Convert { color, to } => convert_cmd(color, *to),
        Command::Dist { a, b, metric } => dist_cmd(a, b, metric),
        Command::Palette(args) => palette_cmd(args),
        Command::Eval(args) => eval_cmd(args),
        Command::Serve(args) => serve_cmd(args),
        Command::Simulate(args) => simulate_cmd(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
