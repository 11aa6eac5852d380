use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use emsource::imaging::{FieldEvaluator, ImagingSpec, Variant};
use emsource::io::{
    check_data_matches, format_report, human_table, parse_config, plane_field, read_dataset, reconstruct_document,
    run_selfcheck, write_dataset, write_json, write_plane_csv, write_vtk, DatasetMetadata, ExperimentConfig, Plane,
};
use emsource::Error;
use log::info;

/// Locate electromagnetic sources from Cauchy data on a sphere.
#[derive(Parser, Debug)]
#[command(name = "emsource", version)]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Evaluate every sampling point instead of the two-stage search.
    #[arg(long, global = true)]
    dense: bool,
    /// Noise seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize (noisy) Cauchy data for the configured sources.
    Simulate { config: PathBuf },
    /// Recover sources from a dataset.
    Reconstruct { config: PathBuf, data: PathBuf },
    /// Export an imaging field.
    Field(FieldArgs),
    /// Check kernel identities and quadrature sums.
    Selfcheck,
}

#[derive(Args, Debug)]
struct FieldArgs {
    config: PathBuf,
    data: PathBuf,
    /// Plane such as `z=0.5`.
    #[arg(long)]
    plane: Option<Plane>,
    /// Write the whole grid as legacy VTK.
    #[arg(long)]
    volume: bool,
    /// Scale the field to maximum 1.
    #[arg(long)]
    normalize: bool,
    #[arg(long, value_enum, default_value_t = VariantArg::Modulus)]
    variant: VariantArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Modulus,
    RealPart,
    ImagPart,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Modulus => Variant::Modulus,
            VariantArg::RealPart => Variant::RealPart,
            VariantArg::ImagPart => Variant::ImagPart,
        }
    }
}

enum Failure {
    Validation(String),
    Runtime(String),
    SelfCheck,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn load_config(path: &Path, cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = parse_config(path)?;
    if let Some(seed) = cli.seed {
        cfg.noise.seed = seed;
    }
    if cli.dense {
        cfg.grid.two_stage = false;
    }
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig, config_path: &Path) -> PathBuf {
    cfg.output_dir(config_path.parent().unwrap_or(Path::new(".")))
}

fn simulate(cli: &Cli, config: &Path) -> Result<(), Failure> {
    let cfg = load_config(config, cli)?;
    let data = cfg.synthesize()?;
    let files = write_dataset(&data, &out_dir(&cfg, config), &cfg.output.name)?;
    println!("wrote {} ({} rows)", files.csv.display(), data.len());
    println!("wrote {}", files.metadata.display());
    println!("sha256 {}", files.sha256);
    Ok(())
}

fn reconstruct(cli: &Cli, config: &Path, data_path: &Path) -> Result<(), Failure> {
    let cfg = load_config(config, cli)?;
    let data = read_dataset(data_path)?;
    check_data_matches(&cfg, &data)?;
    let sha = std::fs::read(data_path)
        .ok()
        .and_then(|m| serde_json::from_slice::<DatasetMetadata>(&m).ok())
        .map(|m| m.csv_sha256);
    let doc = reconstruct_document(&cfg, &data, sha)?;
    let dir = out_dir(&cfg, config);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let json = dir.join(format!("{}.result.json", cfg.output.name));
    write_json(&json, &doc)?;
    let table = human_table(&doc);
    let txt = dir.join(format!("{}.table.txt", cfg.output.name));
    std::fs::write(&txt, &table).map_err(|e| Error::io(&txt, e))?;
    print!("{table}");
    println!("wrote {}", json.display());
    info!(
        "{:.1} s, {} base evaluations on {} threads",
        doc.stats.wall_seconds, doc.stats.evaluations, doc.stats.threads
    );
    Ok(())
}

fn field(cli: &Cli, args: &FieldArgs) -> Result<(), Failure> {
    let cfg = load_config(&args.config, cli)?;
    let data = read_dataset(&args.data)?;
    check_data_matches(&cfg, &data)?;
    if args.plane.is_none() && !args.volume {
        return Err(Failure::Validation("give --plane, --volume or both".into()));
    }
    let spec = ImagingSpec::new(cfg.imaging.base, args.variant.into(), cfg.imaging.s)?;
    let ev = FieldEvaluator::from_data(&data, cfg.imaging.base, cfg.sampling_grid()?)?;
    let dir = out_dir(&cfg, &args.config);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let stem = format!("{}.{}", cfg.output.name, Variant::from(args.variant).name());
    if let Some(plane) = &args.plane {
        let mut slice = plane_field(&ev, &spec, &[], plane)?;
        if args.normalize {
            slice = slice.normalized();
        }
        let axis = ["x", "y", "z"][slice.plane.axis];
        let path = dir.join(format!("{stem}.{axis}{:.3}.csv", slice.plane.value));
        write_plane_csv(&slice, &path)?;
        println!("wrote {} ({} points)", path.display(), slice.values.len());
        #[cfg(feature = "png")]
        {
            let png = path.with_extension("png");
            emsource::io::write_plane_png(&slice, &png)?;
            println!("wrote {}", png.display());
        }
        let (u, v) = slice.argmax();
        println!("plane maximum {:.6e} at ({u:.3}, {v:.3})", slice.max());
    }
    if args.volume {
        let f = ev.field(&spec, &[], spec.label())?;
        let path = dir.join(format!("{stem}.vtk"));
        write_vtk(&f, &path, args.normalize)?;
        println!("wrote {} ({} points)", path.display(), f.values.len());
    }
    Ok(())
}

fn selfcheck() -> Result<(), Failure> {
    let rows = run_selfcheck();
    print!("{}", format_report(&rows));
    if rows.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::SelfCheck)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Simulate { config } => simulate(&cli, config),
        Command::Reconstruct { config, data } => reconstruct(&cli, config, data),
        Command::Field(args) => field(&cli, args),
        Command::Selfcheck => selfcheck(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::SelfCheck) => ExitCode::from(3),
    }
}
