use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use tmhcrf::analysis::{self, DEFAULT_HALF_WIDTH, DEFAULT_RADIUS};
use tmhcrf::chain::{helix_marginals, viterbi};
use tmhcrf::config::{feature_hash, ExperimentConfig};
use tmhcrf::features::tables::property_residues;
use tmhcrf::model_io::{load_model, model_hash, save_model};
use tmhcrf::seq::{labels_to_string, parse_dataset, parse_labels, BinaryLabel, Dataset, ParseMode, Residue};
use tmhcrf::train::{Problem, Reduction};
use tmhcrf::{CrfModel, Error, ErrorClass, MetricsReport, Result};

#[derive(Parser)]
#[command(name = "tmhcrf", version, about = "Transmembrane helix prediction with a linear-chain CRF")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Sum training contributions in a fixed order for reproducible weights.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from one of the built-in presets exp1..exp8.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model.
    Train {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Labelled training set (overrides data.train).
        #[arg(long)]
        train: Option<PathBuf>,
        /// Where to write the model.
        #[arg(long)]
        model: PathBuf,
        /// Write the per-iteration objective trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        sigma2: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Drop training records whose id starts with this prefix (repeatable).
        #[arg(long)]
        exclude_prefix: Vec<String>,
        /// Map unknown residue letters to X instead of failing.
        #[arg(long)]
        lenient: bool,
    },
    /// Label sequences with a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Append per-residue helix probabilities.
        #[arg(long)]
        emit_marginals: bool,
        /// Fail unless the model was built with this configuration.
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        lenient: bool,
    },
    /// Score predictions against gold labels.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        /// Predictions as written by `predict`.
        #[arg(long)]
        pred: PathBuf,
        /// Also write the metrics as TSV.
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
    /// Residue distributions around predicted helices.
    Analyze {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Residue set for profiles: a property group name, `all`, or letters.
        #[arg(long, default_value = "Hydrophobic")]
        set: String,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: usize,
        #[arg(long, default_value_t = DEFAULT_HALF_WIDTH)]
        half_width: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        lenient: bool,
    },
    /// Print the effective configuration.
    ConfigDump {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Central,
    Profile,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.display().to_string(),
        source: e,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(io_err(p)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn mode(lenient: bool) -> ParseMode {
    if lenient {
        ParseMode::Lenient
    } else {
        ParseMode::Strict
    }
}

fn load_config(args: &ConfigArgs) -> Result<ExperimentConfig> {
    let mut c = match &args.preset {
        Some(p) => ExperimentConfig::preset(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(path) = &args.config {
        c.apply(&read(path)?)?;
    }
    Ok(c)
}

fn predict_all(model: &CrfModel, data: &Dataset) -> Result<Vec<Vec<BinaryLabel>>> {
    data.records()
        .par_iter()
        .map(|r| viterbi(r, model).map(|d| d.labels))
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::ConfigConflict(e.to_string()))?;
    }
    match cli.command {
        Command::Train {
            cfg,
            train,
            model,
            trace,
            sigma2,
            epsilon,
            max_iters,
            exclude_prefix,
            lenient,
        } => {
            let mut c = load_config(&cfg)?;
            if let Some(v) = sigma2 {
                c.train.sigma2 = v;
            }
            if let Some(v) = epsilon {
                c.train.epsilon = v;
            }
            if let Some(v) = max_iters {
                c.train.max_iters = v;
            }
            if cli.deterministic {
                c.train.reduction = Reduction::Deterministic;
            }
            c.exclude_prefixes.extend(exclude_prefix);
            let path = train
                .or_else(|| c.train_path.as_ref().map(PathBuf::from))
                .ok_or_else(|| Error::ConfigConflict("no training set given (--train or data.train)".into()))?;
            let topo = c.resolve_topology()?;
            let data = parse_dataset(&read(&path)?, mode(lenient))?.exclude_prefixes(&c.exclude_prefixes);
            let (m, report) = Problem::new(&data, &c.features, &topo)?.optimize(&c.train)?;
            save_model(&m, &model)?;
            if let Some(t) = trace {
                fs::write(&t, report.to_tsv()).map_err(io_err(&t))?;
            }
            println!("features\t{}", report.num_features);
            println!("objective\t{}", report.objective);
            println!("iterations\t{}", report.iterations);
            println!("grad_norm\t{}", report.grad_norm);
            println!("termination\t{}", report.termination.name());
        }
        Command::Predict {
            model,
            input,
            out,
            emit_marginals,
            cfg,
            lenient,
        } => {
            let m = load_model(&model)?;
            if cfg.config.is_some() || cfg.preset.is_some() {
                let c = load_config(&cfg)?;
                let kind = c.resolve_topology()?.kind();
                if feature_hash(&c.features, kind) != model_hash(&m) {
                    return Err(Error::IncompatibleModel(
                        "the model was trained with a different feature configuration".into(),
                    ));
                }
            }
            let data = parse_dataset(&read(&input)?, mode(lenient))?;
            let rows: Vec<Result<String>> = data
                .records()
                .par_iter()
                .map(|r| {
                    let labels = viterbi(r, &m)?.labels;
                    let mut row = format!("{}\t{}", r.id(), labels_to_string(&labels));
                    if emit_marginals {
                        let p: Vec<String> = helix_marginals(r, &m)?.iter().map(|x| format!("{x:.6}")).collect();
                        row.push('\t');
                        row.push_str(&p.join(","));
                    }
                    row.push('\n');
                    Ok(row)
                })
                .collect();
            let text = rows.into_iter().collect::<Result<String>>()?;
            write_out(out.as_deref(), &text)?;
        }
        Command::Eval { gold, pred, tsv } => {
            let gold_set = parse_dataset(&read(&gold)?, ParseMode::Lenient)?;
            let mut preds: Vec<(String, Vec<BinaryLabel>)> = Vec::new();
            for (n, line) in read(&pred)?.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let mut f = line.split('\t');
                let (id, labels) = (f.next().unwrap_or(""), f.next().unwrap_or(""));
                let labels = parse_labels(labels).ok_or_else(|| Error::Syntax {
                    line: n + 1,
                    msg: "expected `id<TAB>labels`".into(),
                })?;
                preds.push((id.to_string(), labels));
            }
            let mut golds = Vec::with_capacity(preds.len());
            for (id, _) in &preds {
                let g = gold_set
                    .get(id)
                    .and_then(|r| r.gold())
                    .ok_or_else(|| Error::MissingGold(id.clone()))?;
                golds.push(g);
            }
            let pairs: Vec<(&[BinaryLabel], &[BinaryLabel])> =
                golds.iter().zip(&preds).map(|(g, (_, p))| (*g, p.as_slice())).collect();
            let report = MetricsReport::evaluate(&pairs)?;
            print!("{report}");
            if let Some(t) = tsv {
                fs::write(&t, report.to_tsv()).map_err(io_err(&t))?;
            }
        }
        Command::Analyze {
            model,
            input,
            mode: which,
            set,
            radius,
            half_width,
            out,
            lenient,
        } => {
            let m = load_model(&model)?;
            let data = parse_dataset(&read(&input)?, mode(lenient))?;
            let labels = predict_all(&m, &data)?;
            let pairs: Vec<_> = data.records().iter().zip(&labels).map(|(r, l)| (r, l.as_slice())).collect();
            let text = match which {
                Mode::Central => analysis::central_composition(&pairs, half_width)?.to_tsv(),
                Mode::Profile => {
                    if radius == 0 {
                        return Err(Error::ConfigConflict("--radius must be at least 1".into()));
                    }
                    analysis::positional_profile(&pairs, &residue_set(&set)?, radius)?.to_tsv()
                }
            };
            write_out(out.as_deref(), &text)?;
        }
        Command::ConfigDump { cfg } => {
            let mut c = load_config(&cfg)?;
            if cli.deterministic {
                c.train.reduction = Reduction::Deterministic;
            }
            print!("{}", c.to_text());
        }
    }
    Ok(())
}

fn residue_set(text: &str) -> Result<BTreeSet<Residue>> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(Residue::STANDARD.into_iter().collect());
    }
    if let Some(v) = property_residues(text) {
        return Ok(v.into_iter().collect());
    }
    text.chars()
        .map(Residue::from_char)
        .collect::<Option<BTreeSet<_>>>()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::ConfigConflict(format!("unknown residue set `{text}`")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Usage => 2,
                ErrorClass::Data => 3,
                ErrorClass::Numerical => 4,
            })
        }
    }
}
