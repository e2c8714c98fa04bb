use clap::{Parser, Subcommand, ValueEnum};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use uwmi::em::{FieldModel, MediaPair, QuadratureSpec};
use uwmi::harness::{
    field_probe, load_scenario, run_experiment, threads_from_env, validate_scenario, with_threads, write_csv,
    write_probe_csv, Experiment, Scenario,
};

#[derive(Parser)]
#[command(name = "uwmi", version, about = "Underwater MI link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Exact,
    Simplified,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file; defaults apply when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<Model>,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV.
    Run {
        /// fig3_upper, fig4_lower, fig5_reliability, fig6_multiuser or fig7_estimation.
        #[arg(value_parser = parse_experiment)]
        experiment: Experiment,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        draws: Option<usize>,
    },
    /// Dump field components over a range/azimuth grid.
    FieldProbe {
        #[command(flatten)]
        common: Common,
        /// Comma-separated horizontal ranges, m.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0])]
        ranges: Vec<f64>,
        /// Comma-separated azimuths, rad.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0])]
        azimuths: Vec<f64>,
        /// Fill the upper half-space with the lower medium.
        #[arg(long)]
        homogeneous: bool,
    },
    /// Check the model invariants on a scenario.
    Validate {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, value_enum)]
        model: Option<Model>,
        #[arg(long, default_value_t = 1000)]
        draws: usize,
    },
}

fn parse_experiment(name: &str) -> Result<Experiment, String> {
    Experiment::from_name(name).ok_or_else(|| {
        let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
        format!("unknown experiment `{name}`; expected one of {}", names.join(", "))
    })
}

fn scenario(path: Option<&Path>, model: Option<Model>) -> uwmi::Result<Scenario> {
    let mut s = match path {
        Some(p) => load_scenario(p)?,
        None => Scenario::default(),
    };
    match model {
        Some(Model::Simplified) => s.model = FieldModel::Simplified,
        Some(Model::Exact) if !matches!(s.model, FieldModel::Exact(_)) => s.model = FieldModel::Exact(QuadratureSpec::default()),
        _ => {}
    }
    Ok(s)
}

fn output(path: Option<&Path>) -> uwmi::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn execute(cli: Cli) -> uwmi::Result<bool> {
    let threads = threads_from_env()?;
    match cli.command {
        Command::Run {
            experiment,
            common,
            seed,
            draws,
        } => {
            let mut s = scenario(common.scenario.as_deref(), common.model)?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            if let Some(d) = draws {
                s.draws = d;
            }
            let rows = with_threads(threads, || run_experiment(experiment, &s))??;
            write_csv(&rows, output(common.out.as_deref())?)?;
            Ok(true)
        }
        Command::FieldProbe {
            common,
            ranges,
            azimuths,
            homogeneous,
        } => {
            let mut s = scenario(common.scenario.as_deref(), common.model)?;
            if homogeneous {
                s.media = MediaPair::homogeneous(s.media.lower);
            }
            let rows = with_threads(threads, || field_probe(&s, &ranges, &azimuths))??;
            write_probe_csv(&rows, output(common.out.as_deref())?)?;
            Ok(true)
        }
        Command::Validate { scenario: path, model, draws } => {
            let s = scenario(path.as_deref(), model)?;
            let checks = with_threads(threads, || validate_scenario(&s, draws))??;
            let mut ok = true;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                ok &= c.passed;
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("uwmi: {e}");
            ExitCode::from(1)
        }
    }
}
