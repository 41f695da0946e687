//! Command-line front end: one subcommand per protocol plus `replay`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use increlab::harness::{
    random_classes, replay, run, ClassifierKind, DatasetSpec, ExperimentConfig, MetricsReport, Protocol,
    ReplayOptions,
};
use increlab::memory::SelectionPolicy;
use increlab::netcore::LrDrop;

#[derive(Parser)]
#[command(name = "increlab", version, about = "Class-incremental learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn classes a few at a time under a fixed exemplar budget.
    Incremental {
        #[command(flatten)]
        common: Common,
        /// Classes per increment.
        #[arg(long, default_value_t = 2)]
        increment_size: usize,
        /// Total exemplar memory.
        #[arg(long, default_value_t = increlab::harness::DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value = "herding", value_parser = parse_policy)]
        policy: SelectionPolicy,
    },
    /// Train a teacher on every class, then a student that sees some classes
    /// only through distillation.
    DistillBias {
        #[command(flatten)]
        common: Common,
        /// Classes hidden from the student, e.g. `1,5,7`.
        #[arg(long, value_delimiter = ',')]
        removed_classes: Option<Vec<usize>>,
        /// Number of classes drawn at random when `--removed-classes` is absent.
        #[arg(long, default_value_t = 5)]
        remove_count: usize,
    },
    /// Re-run the experiment described by a metadata.json.
    Replay {
        metadata: PathBuf,
        /// Defaults to `replay/` next to the metadata file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Location of the MNIST files on this machine.
        #[arg(long)]
        mnist_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetKind {
    Mnist,
    Blobs,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "mnist")]
    dataset: DatasetKind,
    #[arg(long, default_value = "data/mnist")]
    mnist_dir: PathBuf,
    /// Use only the first N MNIST training images.
    #[arg(long)]
    train_limit: Option<usize>,
    /// Distillation weight in [0, 1].
    #[arg(long, default_value_t = increlab::harness::DEFAULT_GAMMA)]
    gamma: f64,
    #[arg(long, default_value_t = increlab::harness::DEFAULT_TEMPERATURE)]
    temperature: f64,
    /// Comma list of tc, tc-scaled, nem, ncm.
    #[arg(long, value_delimiter = ',', value_parser = parse_classifier)]
    classifiers: Option<Vec<ClassifierKind>>,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    /// Comma list of EPOCH:DIVISOR.
    #[arg(long, value_delimiter = ',', default_value = "5:5,8:5")]
    lr_drops: Vec<LrDrop>,
    #[arg(long, default_value_t = 0.9)]
    momentum: f64,
    #[arg(long, default_value_t = 128)]
    batch_size: usize,
    /// Hidden layer widths.
    #[arg(long, value_delimiter = ',', default_value = "256,128")]
    hidden: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory, `runs/<protocol>-<seed>` by default.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_policy(s: &str) -> Result<SelectionPolicy, String> {
    s.parse().map_err(|e: increlab::Error| e.to_string())
}

fn parse_classifier(s: &str) -> Result<ClassifierKind, String> {
    s.parse().map_err(|e: increlab::Error| e.to_string())
}

impl Common {
    fn config(self, protocol: Protocol, name: &str, default_classifiers: &[ClassifierKind]) -> ExperimentConfig {
        let dataset = match self.dataset {
            DatasetKind::Mnist => DatasetSpec::Mnist {
                dir: self.mnist_dir,
                train_limit: self.train_limit,
            },
            DatasetKind::Blobs => DatasetSpec::default_blobs(),
        };
        let out = self.out.unwrap_or_else(|| PathBuf::from(format!("runs/{name}-{}", self.seed)));
        let mut cfg = ExperimentConfig::new(protocol, dataset, self.seed, out);
        cfg.gamma = self.gamma;
        cfg.temperature = self.temperature;
        cfg.classifiers = self.classifiers.unwrap_or_else(|| default_classifiers.to_vec());
        cfg.hidden_layers = self.hidden;
        cfg.train.epochs = self.epochs;
        cfg.train.initial_lr = self.lr;
        cfg.train.lr_drops = self.lr_drops;
        cfg.train.momentum = self.momentum;
        cfg.train.batch_size = self.batch_size;
        cfg
    }
}

fn print_report(report: &MetricsReport) {
    if let Some(t) = report.teacher_accuracy {
        println!("teacher: {:.2}%", 100.0 * t);
    }
    let header: Vec<&str> = report.classifiers.iter().map(|k| k.as_str()).collect();
    println!("increment  classes  {}", header.join("  "));
    for m in &report.increments {
        let accs: Vec<String> = report
            .classifiers
            .iter()
            .map(|k| format!("{:>w$.2}", 100.0 * m.accuracy[k], w = k.as_str().len()))
            .collect();
        println!("{:>9}  {:>7}  {}", m.increment, m.classes_seen.len(), accs.join("  "));
    }
    println!("wall time: {:.1}s", report.wall_time_secs);
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Incremental {
            common,
            increment_size,
            budget,
            policy,
        } => {
            let mut cfg = common.config(Protocol::Incremental { increment_size }, "incremental", &ClassifierKind::ALL);
            cfg.budget = budget;
            cfg.policy = policy;
            log::info!("writing to {}", cfg.out_dir.display());
            run(&cfg)
        }
        Command::DistillBias {
            common,
            removed_classes,
            remove_count,
        } => {
            let num_classes = match common.dataset {
                DatasetKind::Mnist => 10,
                DatasetKind::Blobs => DatasetSpec::default_blobs().num_classes(),
            };
            let removed = removed_classes.unwrap_or_else(|| random_classes(num_classes, remove_count, common.seed));
            log::info!("removed classes: {removed:?}");
            let cfg = common.config(
                Protocol::DistillBias { removed_classes: removed },
                "distill-bias",
                &[ClassifierKind::Tc, ClassifierKind::TcScaled, ClassifierKind::Ncm],
            );
            log::info!("writing to {}", cfg.out_dir.display());
            run(&cfg)
        }
        Command::Replay { metadata, out, mnist_dir } => replay(&metadata, &ReplayOptions { out_dir: out, mnist_dir }),
    };
    match result {
        Ok(report) => {
            print_report(&report);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
