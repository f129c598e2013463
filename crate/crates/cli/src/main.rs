use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use descsel::assets;
use descsel::corpus::{parse_corpus, parse_corpus_unchecked, serialize_corpus, validate, Corpus};
use descsel::eval::{
    accuracy, majority_baseline, per_class_metrics, report, run_experiment, ConfusionMatrix, ExperimentConfig,
};
use descsel::features::{
    extract_examples, read_dataset, write_dataset, ClassLabel, Example, FeatureGroup, GroupSet, Provenance,
};
use descsel::rules::{classify, format_rulelist, parse_rulelist, train, LearnerParams, RuleList};
use descsel::synth::{self, SynthParams};
use descsel::FocusModel;

#[derive(Parser)]
#[command(name = "descsel", version, about = "Learn and evaluate attribute selection for object descriptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a corpus file; exits nonzero if any invariant is violated.
    Validate {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Encode every mention as a feature vector plus class label (CSV).
    Extract {
        #[command(flatten)]
        sel: Selection,
        #[arg(long)]
        corpus: PathBuf,
        /// Output directory; the dataset goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Induce a rule list from a corpus or a labelled dataset.
    Train {
        #[command(flatten)]
        sel: Selection,
        #[arg(long, conflicts_with = "dataset", required_unless_present = "dataset")]
        corpus: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        noise_correction: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a rule list to a dataset; reports metrics when gold labels exist.
    Predict {
        /// Rule file, or `@fig14` / `@fig16` for the shipped rule sets.
        #[arg(long)]
        rules: String,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validate several configurations on one shared fold plan.
    Experiment {
        #[arg(long)]
        corpus: PathBuf,
        /// `majority`, or `GROUPS[:FOCUS]` such as `fam,iinf,contrast:seg`.
        /// Repeatable; the standard seventeen-row suite runs when omitted.
        #[arg(long = "config")]
        configs: Vec<String>,
        #[arg(long, default_value_t = 25)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        noise_correction: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a corpus whose labels follow a planted rule list.
    Synth {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 13)]
        dialogues: usize,
        #[arg(long, default_value_t = 0.0)]
        label_noise: f64,
        /// Planted policy; a built-in five-rule policy when omitted.
        #[arg(long)]
        rules: Option<String>,
        #[arg(long, default_value = "seg")]
        focus: FocusModel,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-class recall, precision, fallout and F from predictions or a
    /// confusion grid.
    Metrics {
        /// CSV with `gold` and `predicted` columns.
        #[arg(long, conflicts_with = "confusion", required_unless_present = "confusion")]
        predictions: Option<PathBuf>,
        /// Confusion grid as written by `predict`.
        #[arg(long)]
        confusion: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Selection {
    /// Comma-separated feature groups (fam, inh, cp, contrast, iinf) or `all`.
    #[arg(long, default_value = "all")]
    groups: GroupSet,
    /// Focus model, required when the contrast group is selected.
    #[arg(long)]
    focus: Option<FocusModel>,
}

impl Selection {
    fn check(&self) -> Result<()> {
        if self.groups.contains(FeatureGroup::Contrast) && self.focus.is_none() {
            bail!("--focus seg|1utt|5utt is required when the contrast group is selected");
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { corpus } => cmd_validate(&corpus),
        Command::Extract { sel, corpus, out } => {
            sel.check()?;
            let examples = extract_examples(&load_corpus(&corpus)?, sel.groups, sel.focus)?;
            let mut buf = Vec::new();
            write_dataset(&examples, &mut buf)?;
            emit(out.as_deref(), "dataset.csv", &buf)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Train { sel, corpus, dataset, noise_correction, seed, out } => {
            let examples = match (corpus, dataset) {
                (Some(c), _) => {
                    sel.check()?;
                    extract_examples(&load_corpus(&c)?, sel.groups, sel.focus)?
                }
                (None, Some(d)) => dataset_examples(&d, sel.groups)?,
                (None, None) => unreachable!("clap requires one source"),
            };
            let params = LearnerParams { noise_correction, rng_seed: seed, ..LearnerParams::default() };
            let rl = train(&examples, &params);
            let gold: Vec<ClassLabel> = examples.iter().map(|e| e.label).collect();
            let pred: Vec<ClassLabel> = examples.iter().map(|e| classify(&rl, &e.features)).collect();
            eprintln!("{} rules, training accuracy {:.1}%", rl.rules.len(), 100.0 * accuracy(&pred, &gold));
            emit(out.as_deref(), "rules.txt", format_rulelist(&rl).as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Predict { rules, dataset, out } => cmd_predict(&rules, &dataset, out.as_deref()),
        Command::Experiment { corpus, configs, k, seed, noise_correction, out } => {
            let corpus = load_corpus(&corpus)?;
            let params = LearnerParams { noise_correction, rng_seed: seed, ..LearnerParams::default() };
            let configs = if configs.is_empty() {
                ExperimentConfig::standard_suite(&params)
            } else {
                configs.iter().map(|c| parse_config(c, &params)).collect::<Result<_>>()?
            };
            let rep = run_experiment(&corpus, &configs, k, seed)?;
            let table = report::accuracy_table(&rep);
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    write_file(&dir.join("accuracy.txt"), table.as_bytes())?;
                    write_file(&dir.join("accuracy.csv"), report::accuracy_csv(&rep).as_bytes())?;
                    write_file(&dir.join("ttests.csv"), report::ttest_csv(&rep).as_bytes())?;
                    print!("{table}");
                }
                None => print!("{table}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth { seed, dialogues, label_noise, rules, focus, out } => {
            let policy = match rules {
                Some(r) => load_rules(&r)?,
                None => synth::default_policy(),
            };
            let p = SynthParams { seed, n_dialogues: dialogues, label_noise, policy, focus, ..SynthParams::default() };
            let corpus = synth::generate(&p)?;
            eprintln!("{} dialogues, {} mentions", corpus.dialogues.len(), corpus.mention_count());
            emit(out.as_deref(), "corpus.coco", serialize_corpus(&corpus).as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Metrics { predictions, confusion, out } => {
            let m = match (predictions, confusion) {
                (Some(p), _) => confusion_from_predictions(&p)?,
                (None, Some(c)) => confusion_from_grid(&c)?,
                (None, None) => unreachable!("clap requires one source"),
            };
            emit(out.as_deref(), "metrics.txt", metrics_report(&m).as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_validate(path: &Path) -> Result<ExitCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let corpus = parse_corpus_unchecked(&text)?;
    let violations = validate(&corpus);
    for v in &violations {
        println!("{v}");
    }
    if violations.is_empty() {
        eprintln!("ok: {} dialogues, {} mentions", corpus.dialogues.len(), corpus.mention_count());
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} violation(s)", violations.len());
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_predict(rules: &str, dataset: &Path, out: Option<&Path>) -> Result<ExitCode> {
    let rl = load_rules(rules)?;
    for f in rl.unresolved_features() {
        eprintln!("warning: feature `{f}` is not in the registry; its conditions never hold");
    }
    let rows = read_dataset(open(dataset)?)?;
    let preds: Vec<ClassLabel> = rows.iter().map(|r| classify(&rl, &r.features)).collect();
    let gold: Option<Vec<ClassLabel>> = rows.iter().map(|r| r.label).collect();

    let mut listing = String::new();
    if rows.is_empty() {
        // nothing to list
    } else if gold.is_some() {
        listing.push_str("row,predicted,gold\n");
    } else {
        listing.push_str("row,predicted\n");
    }
    for (i, p) in preds.iter().enumerate() {
        match &gold {
            Some(g) => listing.push_str(&format!("{},{},{}\n", i + 1, p, g[i])),
            None => listing.push_str(&format!("{},{}\n", i + 1, p)),
        }
    }
    emit(out, "predictions.csv", listing.as_bytes())?;

    if let (Some(g), false) = (gold, rows.is_empty()) {
        let m = ConfusionMatrix::from_pairs(&g, &preds)?;
        let text = metrics_report(&m);
        match out {
            Some(dir) => {
                write_file(&dir.join("metrics.txt"), text.as_bytes())?;
                write_file(&dir.join("confusion.csv"), report::confusion_csv(&m.trimmed()).as_bytes())?;
            }
            None => eprint!("{text}"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn metrics_report(m: &ConfusionMatrix) -> String {
    let m = m.trimmed();
    let mut s = format!("accuracy {:.2}% over {} examples\n", 100.0 * m.accuracy(), m.total());
    let gold: Vec<ClassLabel> =
        m.labels.iter().enumerate().flat_map(|(i, l)| std::iter::repeat_n(*l, m.row_total(i))).collect();
    if let Some((label, share)) = majority_baseline(&gold) {
        s.push_str(&format!("majority class {label} ({:.2}%)\n", 100.0 * share));
    }
    s.push('\n');
    s.push_str(&report::class_metrics_table(&per_class_metrics(&m)));
    s.push('\n');
    s.push_str(&report::confusion_table(&m));
    s
}

/// `majority`, or `GROUPS[:FOCUS]`.
fn parse_config(text: &str, params: &LearnerParams) -> Result<ExperimentConfig> {
    if text.eq_ignore_ascii_case("majority") {
        return Ok(ExperimentConfig::majority());
    }
    let (groups, focus) = match text.split_once(':') {
        Some((g, f)) => (g, Some(f.parse::<FocusModel>().map_err(anyhow::Error::msg)?)),
        None => (text, None),
    };
    let groups: GroupSet = groups.parse().map_err(anyhow::Error::msg)?;
    let sel = Selection { groups, focus };
    sel.check().with_context(|| format!("configuration `{text}`"))?;
    Ok(ExperimentConfig::rules(text, groups, focus, params))
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_corpus(&text).with_context(|| format!("loading {}", path.display()))
}

fn load_rules(source: &str) -> Result<RuleList> {
    if source.starts_with('@') {
        return assets::builtin(source).with_context(|| format!("unknown built-in rule set `{source}` (try @fig14, @fig16)"));
    }
    let text = fs::read_to_string(source).with_context(|| format!("reading {source}"))?;
    parse_rulelist(&text).with_context(|| format!("parsing {source}"))
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).with_context(|| format!("opening {}", path.display()))
}

/// Labelled dataset rows as examples, masked to `groups`.
fn dataset_examples(path: &Path, groups: GroupSet) -> Result<Vec<Example>> {
    read_dataset(open(path)?)?
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let label = r.label.with_context(|| format!("{}: row {} has no class", path.display(), i + 1))?;
            Ok(Example {
                features: r.features.masked(groups),
                label,
                provenance: Provenance { dialogue: String::new(), utterance: 0, mention_id: format!("row{}", i + 1) },
            })
        })
        .collect()
}

fn confusion_from_predictions(path: &Path) -> Result<ConfusionMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().context("empty predictions file")?.split(',').map(str::trim).collect();
    let col = |name: &str| header.iter().position(|h| *h == name).with_context(|| format!("no `{name}` column"));
    let (gi, pi) = (col("gold")?, col("predicted")?);
    let (mut gold, mut pred) = (Vec::new(), Vec::new());
    for (n, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |i: usize| -> Result<ClassLabel> {
            let cell = cells.get(i).with_context(|| format!("row {} is short", n + 1))?;
            cell.parse().map_err(anyhow::Error::msg)
        };
        gold.push(get(gi)?);
        pred.push(get(pi)?);
    }
    Ok(ConfusionMatrix::from_pairs(&gold, &pred)?)
}

fn confusion_from_grid(path: &Path) -> Result<ConfusionMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().context("empty confusion file")?;
    let labels: Vec<ClassLabel> =
        header.split(',').skip(1).map(|s| s.trim().parse().map_err(anyhow::Error::msg)).collect::<Result<_>>()?;
    let mut counts = Vec::new();
    for (i, line) in lines.enumerate() {
        let mut cells = line.split(',').map(str::trim);
        let row_label: ClassLabel = cells.next().unwrap_or("").parse().map_err(anyhow::Error::msg)?;
        if labels.get(i) != Some(&row_label) {
            bail!("row {} is labelled {row_label}, expected the column order", i + 1);
        }
        counts.push(cells.map(|c| c.parse::<usize>().with_context(|| format!("bad count `{c}`"))).collect::<Result<_>>()?);
    }
    Ok(ConfusionMatrix::from_grid(labels, counts)?)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Writes `bytes` to `dir/name`, or to stdout without a directory.
fn emit(dir: Option<&Path>, name: &str, bytes: &[u8]) -> Result<()> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            write_file(&dir.join(name), bytes)
        }
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}
