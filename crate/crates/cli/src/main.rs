//! `perscribe` command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use perscribe::concern::rank_permissions;
use perscribe::config::{check_schema_version, OutputFormat, SCHEMA_VERSION};
use perscribe::metrics::{content_overlap, readability, text_stats, Readability, TextStats};
use perscribe::personality::{
    evaluate_bank, label_traits, score_bfi, synth_dataset, AdoptionDataset, AdoptionVector, BankReport,
    CorrelationSpec, LikertResponse, ModelBank,
};
use perscribe::{
    baseline_description, generate_description, AppCategory, AttentionRanking, Config, Dimension, Gender,
    MalwareFeature, PermissionSnapshot, PersonalisedDescription, TraitProfile,
};
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "perscribe", version, about = "Personalised security descriptions for Android apps")]
struct Cli {
    /// Run configuration file. Defaults to the shipped data.
    #[arg(long, global = true, env = "PERSCRIBE_CONFIG")]
    config: Option<PathBuf>,
    /// Seed for every random choice. Drawn from entropy when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// App category, e.g. social or maps.
    #[arg(long, global = true, value_parser = parse_category)]
    category: Option<AppCategory>,
    /// Gender used to pick questionnaire norms.
    #[arg(long, global = true, value_parser = parse_gender)]
    gender: Option<Gender>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Rank the eight permissions for an app about to be installed.
    Rank {
        /// Permission settings snapshot (JSON).
        snapshot: PathBuf,
    },
    /// Infer a Big Five profile from questionnaire answers or app adoption.
    Profile(ProfileArgs),
    /// Generate a personalised description of an app's features.
    Generate {
        /// Feature list (JSON).
        features: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
        /// Ready-made profile document; all-Medium when no source is given.
        #[arg(long, conflicts_with_all = ["responses", "adoption"])]
        profile_file: Option<PathBuf>,
        /// Permission snapshot; the default ranking is used without one.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Score readability and content overlap against a baseline.
    Eval {
        /// Descriptions to score: plain text or `generate` JSON output.
        #[arg(required = true)]
        descriptions: Vec<PathBuf>,
        /// Baseline text or description file.
        #[arg(long, required_unless_present = "features")]
        baseline: Option<PathBuf>,
        /// Build the baseline from this feature list instead.
        #[arg(long, conflicts_with = "baseline")]
        features: Option<PathBuf>,
    },
    /// Train and evaluate the ten trait models on an adoption dataset.
    Train {
        dataset: PathBuf,
        /// Where to write the fitted model bank.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic adoption dataset.
    Synth {
        /// Correlation spec; the shipped one when absent.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 600)]
        n: usize,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ProfileArgs {
    /// BFI-44 answers (JSON).
    #[arg(long)]
    responses: Option<PathBuf>,
    /// Per-category installed-app counts (JSON).
    #[arg(long, requires = "models")]
    adoption: Option<PathBuf>,
    /// Model bank written by `train`.
    #[arg(long)]
    models: Option<PathBuf>,
}

fn parse_category(s: &str) -> Result<AppCategory, String> {
    let found = AppCategory::from_name_lossy(s);
    if found == AppCategory::Other && !s.trim().eq_ignore_ascii_case("other") {
        let names: Vec<&str> = AppCategory::ALL.iter().map(|c| c.name()).collect();
        return Err(format!("unknown category `{s}` (expected one of {})", names.join(", ")));
    }
    Ok(found)
}

fn parse_gender(s: &str) -> Result<Gender, String> {
    s.parse().map_err(|e: perscribe::Error| e.to_string())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Versioned wrapper for documents whose library type has no version field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Envelope<T> {
    schema_version: u32,
    #[serde(flatten)]
    body: T,
}

impl<T> Envelope<T> {
    fn new(body: T) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            body,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

struct Ctx {
    config: Config,
    format: Format,
    seed: Option<u64>,
    category: Option<AppCategory>,
    gender: Option<Gender>,
}

impl Ctx {
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce(&T) -> String) {
        match self.format {
            Format::Json => print!("{}", to_json(value)),
            Format::Text => print!("{}", text(value)),
        }
    }

    fn seed(&self) -> u64 {
        self.seed.or(self.config.seed).unwrap_or_else(rand::random)
    }
}

fn ranking_table(ranking: &AttentionRanking) -> String {
    let mut out = format!("source: {:?}\n", ranking.source());
    for (i, e) in ranking.entries().iter().enumerate() {
        let _ = writeln!(out, "{:>2}  {:<11} {:.3}", i + 1, e.permission.name(), e.level);
    }
    out
}

fn profile_line(profile: &TraitProfile) -> String {
    Dimension::ALL
        .iter()
        .map(|d| format!("{}={}", d.code(), profile.level(*d).name()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn load_ranking(ctx: &Ctx, snapshot: Option<&Path>) -> Result<AttentionRanking> {
    let default = ctx.config.default_ranking()?;
    let Some(path) = snapshot else {
        return Ok(default);
    };
    let snapshot = PermissionSnapshot::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let Some(category) = ctx.category else {
        bail!("--category is required with a snapshot");
    };
    Ok(rank_permissions(category, &snapshot, &default))
}

fn load_profile(ctx: &Ctx, args: &ProfileArgs) -> Result<Option<TraitProfile>> {
    match (&args.responses, &args.adoption) {
        (Some(_), Some(_)) => bail!("give either --responses or --adoption, not both"),
        (Some(path), None) => {
            let (response, stated) =
                LikertResponse::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?;
            let gender = ctx
                .gender
                .or(stated)
                .context("gender is needed to pick norms: pass --gender or set it in the responses file")?;
            let scores = score_bfi(&response, &ctx.config.scoring_key);
            let mut profile = label_traits(&scores, gender, &ctx.config.norms)?;
            profile.scores = Some(scores);
            Ok(Some(profile))
        }
        (None, Some(path)) => {
            let models = args.models.as_deref().context("--adoption needs --models")?;
            let bank = ModelBank::from_json(&read(models)?).with_context(|| format!("in {}", models.display()))?;
            let x = AdoptionVector::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?;
            Ok(Some(bank.predict_profile(&x)))
        }
        (None, None) => Ok(None),
    }
}

/// Text of a file holding either plain text or a `generate` JSON document.
fn description_text(path: &Path) -> Result<String> {
    let raw = read(path)?;
    if let Ok(d) = serde_json::from_str::<Envelope<PersonalisedDescription>>(&raw) {
        check_schema_version(d.schema_version, "description").with_context(|| format!("in {}", path.display()))?;
        return Ok(d.body.text());
    }
    Ok(raw.trim().to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TextScore {
    source: String,
    stats: TextStats,
    readability: Readability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DescriptionScore {
    score: TextScore,
    content_overlap: f64,
    /// FRE of the description minus FRE of the baseline.
    fre_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EvalReport {
    schema_version: u32,
    baseline: TextScore,
    descriptions: Vec<DescriptionScore>,
}

fn score(source: String, text: &str) -> Result<TextScore> {
    let stats = text_stats(text);
    let readability = readability(&stats).with_context(|| format!("{source} has no sentences"))?;
    Ok(TextScore {
        source,
        stats,
        readability,
    })
}

fn eval_table(report: &EvalReport) -> String {
    let mut out = format!(
        "{:<28} {:>7} {:>6} {:>6} {:>6} {:>6} {:>8}\n",
        "text", "FRE", "FKGL", "GFS", "SMOG", "ARI", "overlap"
    );
    let row = |out: &mut String, s: &TextScore, overlap: Option<f64>| {
        let r = &s.readability;
        let overlap = overlap.map_or("-".to_string(), |o| format!("{o:.2}"));
        let _ = writeln!(
            out,
            "{:<28} {:>7.1} {:>6.1} {:>6.1} {:>6.1} {:>6.1} {:>8}",
            s.source, r.fre, r.fkgl, r.gfs, r.smog, r.ari, overlap
        );
    };
    row(&mut out, &report.baseline, None);
    for d in &report.descriptions {
        row(&mut out, &d.score, Some(d.content_overlap));
    }
    out
}

fn train_table(report: &BankReport) -> String {
    let mut out = format!("seed: {}\n{:<8} {:<14} {:>9} {:>9}\n", report.seed, "target", "family", "precision", "baseline");
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
    for t in &report.targets {
        let _ = writeln!(
            out,
            "{:<8} {:<14} {:>9} {:>9}",
            t.target.to_string(),
            format!("{:?}", t.family),
            fmt(t.precision),
            fmt(t.random_baseline)
        );
    }
    let _ = writeln!(out, "mean     {:<14} {:>9.3} {:>9.3}", "", report.mean_precision, report.mean_baseline);
    out
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => Config::load(path).with_context(|| format!("loading configuration {}", path.display()))?,
        None => Config::shipped(),
    };
    let format = cli.format.unwrap_or(match config.format {
        Some(OutputFormat::Text) => Format::Text,
        _ => Format::Json,
    });
    let ctx = Ctx {
        config,
        format,
        seed: cli.seed,
        category: cli.category,
        gender: cli.gender,
    };

    match cli.command {
        Command::Rank { snapshot } => {
            let ranking = load_ranking(&ctx, Some(&snapshot))?;
            ctx.emit(&Envelope::new(ranking), |r| ranking_table(&r.body));
        }
        Command::Profile(args) => {
            let profile = load_profile(&ctx, &args)?.context("give --responses or --adoption with --models")?;
            ctx.emit(&Envelope::new(profile), |p| format!("{}\n", profile_line(&p.body)));
        }
        Command::Generate {
            features,
            profile,
            profile_file,
            snapshot,
        } => {
            let list =
                MalwareFeature::list_from_json(&read(&features)?).with_context(|| format!("in {}", features.display()))?;
            let profile = match profile_file {
                Some(path) => TraitProfile::from_json(&read(&path)?).with_context(|| format!("in {}", path.display()))?,
                None => load_profile(&ctx, &profile)?.unwrap_or_else(TraitProfile::neutral),
            };
            let ranking = load_ranking(&ctx, snapshot.as_deref())?;
            let seed = ctx.seed();
            let description = generate_description(&ctx.config, &list, &profile, &ranking, seed)?;
            ctx.emit(&Envelope::new(description), |d| {
                let d = &d.body;
                let mut out = format!("# seed: {}\n# profile: {}\n", d.seed, profile_line(&d.profile));
                for s in &d.sentences {
                    let _ = writeln!(out, "{}", s.text);
                }
                out
            });
        }
        Command::Eval {
            descriptions,
            baseline,
            features,
        } => {
            let (name, base_text) = match (baseline, features) {
                (Some(path), _) => (path.display().to_string(), description_text(&path)?),
                (None, Some(path)) => {
                    let list = MalwareFeature::list_from_json(&read(&path)?)
                        .with_context(|| format!("in {}", path.display()))?;
                    let sentences: Vec<String> =
                        baseline_description(&list, &ctx.config.lexicon).into_iter().map(|(t, _)| t).collect();
                    ("baseline".to_string(), sentences.join(" "))
                }
                (None, None) => bail!("give --baseline or --features"),
            };
            let filter = ctx.config.content_filter();
            let baseline = score(name, &base_text)?;
            let mut scored = Vec::new();
            for path in &descriptions {
                let text = description_text(path)?;
                let s = score(path.display().to_string(), &text)?;
                scored.push(DescriptionScore {
                    fre_gain: s.readability.fre - baseline.readability.fre,
                    content_overlap: content_overlap(&base_text, &text, &filter),
                    score: s,
                });
            }
            let report = EvalReport {
                schema_version: SCHEMA_VERSION,
                baseline,
                descriptions: scored,
            };
            ctx.emit(&report, eval_table);
        }
        Command::Train { dataset, out } => {
            let data = AdoptionDataset::from_json(&read(&dataset)?).with_context(|| format!("in {}", dataset.display()))?;
            let (report, bank) = evaluate_bank(&data, ctx.seed())?;
            write(&out, &to_json(&bank))?;
            ctx.emit(&report, train_table);
        }
        Command::Synth { spec, n, out } => {
            let spec = match spec {
                Some(path) => {
                    CorrelationSpec::from_json(&read(&path)?).with_context(|| format!("in {}", path.display()))?
                }
                None => CorrelationSpec::shipped(),
            };
            let seed = ctx.seed();
            if ctx.seed.or(ctx.config.seed).is_none() {
                eprintln!("seed: {seed}");
            }
            let data = synth_dataset(&spec, n, seed)?;
            match out {
                Some(path) => write(&path, &to_json(&data))?,
                None => print!("{}", to_json(&data)),
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
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
