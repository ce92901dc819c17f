//! `multiform` — runs batches of multiform evolution experiments.
//!
//! Flags and `--config` files share one `key=value` vocabulary; config
//! entries override flags, and the written `manifest.txt` is itself a valid
//! config that reproduces the batch.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use multiform::harness::{parse_settings, write_outputs, ExperimentSpec};
use multiform::{BaseFunctionId, Error};

#[derive(Parser, Debug)]
#[command(
    name = "multiform",
    version,
    about = "Multiform evolution over random embeddings",
    after_help = "Any setting can also come from --config <file> as key=value lines \
                  (e.g. ridge=1e-6, floor=2, transfer=auto, curves=false)."
)]
struct Cli {
    /// Base function(s), comma separated.
    #[arg(long)]
    function: Option<String>,
    /// Ambient dimension.
    #[arg(long = "D", value_name = "INT")]
    ambient_dim: Option<String>,
    /// Effective dimension.
    #[arg(long = "de", value_name = "INT")]
    effective_dim: Option<String>,
    /// Embedding dimensions, comma separated.
    #[arg(long, value_name = "LIST")]
    dims: Option<String>,
    /// Variant(s): de, de+m, de+mt, de+mf; comma separated.
    #[arg(long)]
    variant: Option<String>,
    /// Population size [default: 100].
    #[arg(long, value_name = "INT")]
    pop: Option<String>,
    /// Evaluation budget per run [default: 50000].
    #[arg(long, value_name = "INT")]
    fes: Option<String>,
    /// Seeds: inclusive range `a..b` or comma list.
    #[arg(long, value_name = "SEEDS")]
    seeds: Option<String>,
    /// DE crossover rate [default: 0.9].
    #[arg(long, value_name = "REAL")]
    cr: Option<String>,
    /// DE scale factor [default: 0.35].
    #[arg(long, value_name = "REAL")]
    f: Option<String>,
    /// Allocation step size [default: 2].
    #[arg(long, value_name = "REAL")]
    alpha: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "results")]
    out: PathBuf,
    /// key=value settings file; its entries override flags.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print the available base functions and exit.
    #[arg(long)]
    list_functions: bool,
}

impl Cli {
    fn flag_settings(&self) -> Vec<(String, String)> {
        [
            ("function", &self.function),
            ("D", &self.ambient_dim),
            ("de", &self.effective_dim),
            ("dims", &self.dims),
            ("variant", &self.variant),
            ("pop", &self.pop),
            ("fes", &self.fes),
            ("seeds", &self.seeds),
            ("cr", &self.cr),
            ("f", &self.f),
            ("alpha", &self.alpha),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .collect()
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}\n");
    eprintln!("{}", Cli::command().render_usage());
    eprintln!("\nFor more information, try '--help'.");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_functions {
        for f in BaseFunctionId::ALL {
            let (lo, hi) = f.native_range();
            println!("{:<12} [{lo}, {hi}]", f.name());
        }
        return ExitCode::SUCCESS;
    }

    let mut settings = cli.flag_settings();
    if let Some(path) = &cli.config {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return usage_error(format!("cannot read config {}: {e}", path.display())),
        };
        match parse_settings(&text) {
            Ok(extra) => settings.extend(extra),
            Err(e) => return usage_error(format!("{}: {e}", path.display())),
        }
    }
    let spec = match ExperimentSpec::from_settings(&settings, cli.out.clone()) {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };

    let runs = spec.seeds.len() * spec.functions.len() * spec.variants.len();
    eprintln!("running {runs} runs into {}", spec.out_dir.display());
    let result = spec.execute().and_then(|logs| write_outputs(&logs, &spec));
    match result {
        Ok(files) => {
            println!("{}", files.summary.display());
            println!("{}", files.runs.display());
            println!("{}", files.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e @ Error::InvalidInput(_)) => usage_error(e),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
