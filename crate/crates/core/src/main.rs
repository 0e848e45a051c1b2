use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pass_sim::channel::{ArrayLayout, NoiseModel, ScenarioKind, SharedPa};
use pass_sim::experiment::{
    format_sig9, placement_offsets, preset, preset_notes, rate_query, run_figure, write_outputs, Figure, FigureConfig,
    RateQuery,
};
use pass_sim::rates::Method;
use pass_sim::system::SPEED_OF_LIGHT;
use pass_sim::{PassError, Result};

#[derive(Parser)]
#[command(name = "pass-sim", version, about = "Uplink pinching-antenna system rates and placements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the CSV data of a figure preset or config file.
    Figure(FigureArgs),
    /// Print a single per-user ergodic rate in bits/s/Hz.
    Rate(RateArgs),
    /// Print PA offsets `n,offset` for one user as CSV.
    Place(PlaceArgs),
}

#[derive(Args)]
struct FigureArgs {
    /// Preset name, fig3..fig10. Optional with --config.
    name: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config value, e.g. `room.height=5` or `sweep.methods=theorem`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print the effective config as TOML and exit.
    #[arg(long)]
    dump_config: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Mpsu,
    Spsu,
    Spmu,
    Siso,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpmuPaArg {
    Center,
    Optimized,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Coherent,
    FarZone,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    PerPa,
    Single,
}

#[derive(Args)]
struct RateArgs {
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    /// theorem, high_snr, maclaurin, quadrature, approx or montecarlo.
    #[arg(long)]
    method: Method,
    /// Waveguide height in metres.
    #[arg(long, default_value_t = 20.0)]
    h: f64,
    /// Room side length in metres.
    #[arg(long, default_value_t = 10.0)]
    d: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    power_dbm: f64,
    #[arg(long, default_value_t = 2)]
    users: usize,
    /// PAs per side of the centre PA (mpsu).
    #[arg(long, default_value_t = 10)]
    n_pas: usize,
    #[arg(long, default_value_t = 2.4e9)]
    fc: f64,
    #[arg(long, default_value_t = 1e6)]
    bw: f64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "center")]
    spmu_pa: SpmuPaArg,
    #[arg(long, value_enum, default_value = "coherent")]
    layout: LayoutArg,
    #[arg(long, value_enum, default_value = "per-pa")]
    noise_model: NoiseArg,
}

#[derive(Args)]
struct PlaceArgs {
    /// Distance from the user to the PA directly above it, in metres.
    #[arg(long)]
    d0: f64,
    /// PAs per side of the centre PA.
    #[arg(long)]
    n: usize,
    /// Use the far-zone grid `x_n = n lambda`.
    #[arg(long)]
    fz: bool,
    #[arg(long, default_value_t = 2.4e9)]
    fc: f64,
}

fn load_config(args: &FigureArgs) -> Result<FigureConfig> {
    let base = match (&args.config, &args.name) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| PassError::Config(format!("cannot read {}: {e}", path.display())))?;
            let cfg = FigureConfig::from_toml(&text)?;
            if let Some(name) = &args.name {
                if name.parse::<Figure>()? != cfg.figure {
                    return Err(PassError::Config(format!("{} describes {}, not {name}", path.display(), cfg.figure)));
                }
            }
            cfg
        }
        (None, Some(name)) => preset(name.parse()?),
        (None, None) => return Err(PassError::Config("give a figure name or --config".into())),
    };
    let mut sets = args.set.clone();
    if let Some(seed) = args.seed {
        sets.push(format!("sweep.seed={seed}"));
    }
    if let Some(samples) = args.samples {
        sets.push(format!("sweep.samples={samples}"));
    }
    let mut cfg = base.with_overrides(&sets)?;
    if let Some(out) = &args.out {
        cfg.sweep.out_dir = out.to_string_lossy().into_owned();
    }
    Ok(cfg)
}

fn figure(args: FigureArgs) -> Result<()> {
    let cfg = load_config(&args)?;
    if args.dump_config {
        let mut text = String::new();
        for line in preset_notes(cfg.figure).lines() {
            text.push_str("# ");
            text.push_str(line);
            text.push('\n');
        }
        text.push('\n');
        text.push_str(&cfg.to_toml()?);
        io::stdout().write_all(text.as_bytes())?;
        return Ok(());
    }
    let outputs = run_figure(&cfg)?;
    for path in write_outputs(&outputs, cfg.sweep.out_dir.as_ref())? {
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

fn rate(a: RateArgs) -> Result<()> {
    let scenario = match a.scenario {
        ScenarioArg::Mpsu => ScenarioKind::Mpsu {
            n_pas: a.n_pas,
            layout: match a.layout {
                LayoutArg::Coherent => ArrayLayout::Coherent,
                LayoutArg::FarZone => ArrayLayout::FarZone,
            },
            noise_model: match a.noise_model {
                NoiseArg::PerPa => NoiseModel::PerPa,
                NoiseArg::Single => NoiseModel::Single,
            },
        },
        ScenarioArg::Spsu => ScenarioKind::Spsu,
        ScenarioArg::Spmu => ScenarioKind::Spmu {
            pa: match a.spmu_pa {
                SpmuPaArg::Center => SharedPa::Center,
                SpmuPaArg::Optimized => SharedPa::Optimized,
            },
        },
        ScenarioArg::Siso => ScenarioKind::Siso,
    };
    let e = rate_query(&RateQuery {
        scenario,
        method: a.method,
        height: a.h,
        extent: a.d,
        power_dbm: a.power_dbm,
        num_users: a.users,
        carrier_frequency_hz: a.fc,
        bandwidth_hz: a.bw,
        samples: a.samples,
        seed: a.seed,
    })?;
    if e.n_samples > 0 {
        log::info!("95% half-width {} over {} drops", format_sig9(e.ci_half_width), e.n_samples);
    }
    println!("{}", format_sig9(e.value));
    Ok(())
}

fn place(a: PlaceArgs) -> Result<()> {
    if !(a.fc > 0.0 && a.fc.is_finite()) {
        return Err(PassError::Domain(format!("carrier frequency must be positive, got {}", a.fc)));
    }
    let rows = placement_offsets(a.d0, a.n, SPEED_OF_LIGHT / a.fc, a.fz)?;
    let mut out = String::from("n,offset\n");
    for (n, x) in rows {
        out.push_str(&format!("{n},{}\n", format_sig9(x)));
    }
    io::stdout().write_all(out.as_bytes())?;
    Ok(())
}

fn exit_code(e: &PassError) -> u8 {
    match e {
        PassError::NonConvergence(_) => 3,
        PassError::Io(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Figure(a) => figure(a),
        Command::Rate(a) => rate(a),
        Command::Place(a) => place(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
