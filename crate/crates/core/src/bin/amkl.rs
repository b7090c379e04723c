use std::path::PathBuf;
use std::process::ExitCode;

use amkl::harness::{self, DataSource, EmitFlags, Overrides, RunConfig};
use amkl::{AlgorithmConfig, Error, SyntheticSpec, Variant};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "amkl", version, about = "Online multiple kernel learning with kernel selection and active labeling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its trace.
    Run(Common),
    /// Run several variants on one dataset and print a table.
    Compare {
        #[arg(long, value_delimiter = ',', default_value = "raker,omkl_aks,amkl_aks")]
        variants: Vec<Variant>,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep the confidence threshold eta_c.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "5e-5,5e-4,5e-3")]
        eta_c_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Run configuration file (TOML or JSON); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset manifest (TOML).
    #[arg(long, conflicts_with = "synthetic_sigma2")]
    manifest: Option<PathBuf>,
    /// Use a synthetic stream generated with this Gaussian bandwidth.
    #[arg(long)]
    synthetic_sigma2: Option<f64>,
    #[arg(long, default_value_t = 5000)]
    synthetic_len: usize,
    #[arg(long, default_value_t = 5)]
    synthetic_dim: usize,
    #[arg(long, default_value_t = 0.0)]
    synthetic_noise: f64,
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eta_l: Option<f64>,
    #[arg(long)]
    eta_g: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Random features per kernel (D).
    #[arg(long)]
    features: Option<usize>,
    #[arg(long)]
    eta_c: Option<f64>,
    /// Maximum consecutive skipped labels (M).
    #[arg(long)]
    max_skips: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Force the subset size K.
    #[arg(long)]
    fixed_k: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    /// Turn active labeling on or off.
    #[arg(long)]
    active: Option<bool>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    regret: bool,
    #[arg(long)]
    no_trace: bool,
    #[arg(long)]
    no_summary: bool,
    #[arg(long)]
    no_plot: bool,
}

impl Common {
    fn run_config(&self) -> amkl::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => {
                let data = match (&self.manifest, self.synthetic_sigma2) {
                    (Some(path), _) => DataSource::Manifest { path: path.clone() },
                    (None, Some(sigma2)) => DataSource::Synthetic(SyntheticSpec::new(
                        sigma2,
                        self.synthetic_noise,
                        self.synthetic_len,
                        self.synthetic_dim,
                        self.seed.unwrap_or(0),
                    )),
                    (None, None) => {
                        return Err(Error::Config("one of --config, --manifest or --synthetic-sigma2 is required".into()))
                    }
                };
                let variant = self.variant.unwrap_or(Variant::AmklAks);
                RunConfig::new(AlgorithmConfig::standard(variant, 1), data)
            }
        };
        Overrides {
            variant: self.variant,
            seed: self.seed,
            eta_l: self.eta_l,
            eta_g: self.eta_g,
            lambda: self.lambda,
            num_features: self.features,
            eta_c: self.eta_c,
            max_skips: self.max_skips,
            delta: self.delta,
            gamma_cap: self.gamma,
            fixed_k: self.fixed_k,
            budget: self.budget,
            active: self.active,
            output_dir: self.out.clone(),
            regret: self.regret.then_some(true),
            emit: Some(EmitFlags {
                trace_csv: !self.no_trace,
                summary: !self.no_summary,
                plot_data: !self.no_plot,
            }),
        }
        .apply(&mut cfg);
        cfg.algorithm.validate()?;
        Ok(cfg)
    }
}

fn execute(command: Command) -> amkl::Result<()> {
    match command {
        Command::Run(common) => {
            let s = harness::run_experiment(&common.run_config()?)?;
            println!("dataset:  {}", s.dataset);
            println!("variant:  {}", s.variant);
            println!("samples:  {}", s.samples);
            println!("mse:      {:.6e}", s.final_mse);
            println!("al_eff:   {:.4}", s.final_al_eff);
            if let Some(r) = s.regret {
                println!("regret:   {r:.6}");
            }
        }
        Command::Compare { variants, csv, common } => {
            let base = common.run_config()?;
            let runs = variants
                .iter()
                .map(|&v| {
                    let mut cfg = base.clone();
                    Overrides {
                        variant: Some(v),
                        ..Default::default()
                    }
                    .apply(&mut cfg);
                    cfg.output_dir = base.output_dir.as_ref().map(|d| d.join(v.name()));
                    cfg
                })
                .collect::<Vec<_>>();
            let table = harness::compare(&runs)?;
            print!("{}", table.to_text());
            if let Some(path) = csv {
                std::fs::write(&path, table.to_csv()).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
            }
        }
        Command::Sweep { eta_c_grid, seeds, common } => {
            let points = harness::sweep(&common.run_config()?, &eta_c_grid, &seeds)?;
            println!("{:>10}  {:>6}  {:>8}  {:>12}", "eta_c", "seed", "AL_eff", "MSE (1e-3)");
            for p in points {
                println!("{:>10.1e}  {:>6}  {:>8.4}  {:>12.4}", p.eta_c, p.seed, p.final_al_eff, p.final_mse * 1e3);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_data_error() { 2 } else { 1 })
        }
    }
}
