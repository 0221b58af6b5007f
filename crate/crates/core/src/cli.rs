//! The `fsaudit` command line.
//!
//! Exit status: 0 on success, 1 on usage errors (including a bare
//! invocation), 2 when data or a setting is rejected. Every run logs its
//! resolved settings and seed at info level on stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;
use serde_json::json;

use crate::classifiers::ClassifierKind;
use crate::config::Hyperparams;
use crate::dataset::synth::{generate_classifier_dependent_pair, DependenceMode};
use crate::dataset::{load_csv, stratified_split, LabelColumn};
use crate::error::{Error, Result};
use crate::estimators::{holdout_true_error, loo_error, proper_rloo_error, resubstitution_error};
use crate::harness::{load_manifest, read_jsonl, run_grid_to_file, sonar_case_study, CaseStudy, GridConfig};
use crate::rankers::{rank_features, RankerKind};
use crate::report::{self, CurveSeries, GlyphSpec};
use crate::samplesize::{
    linspace_step, mcnemar_sample_size, sample_size_curve, smoothed_sample_size, Agreement, McNemarPlan,
    SmoothedPlan,
};
use crate::selectors::{select, SelectionScheme};
use crate::stats::{combination_ranking, factor_ranks, selector_rank_table, Factor, Metric};
use crate::subset::FeatureSubset;
use crate::Dataset;

#[derive(Debug, Parser)]
#[command(
    name = "fsaudit",
    version,
    about = "Feature selection and error estimation for wide datasets",
    arg_required_else_help = true
)]
pub struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Hyperparameter overrides, one `key = value` per line.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// More logging (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Only warnings and errors on stderr.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Instances needed to tell two features apart.
    Samplesize(SampleSizeArgs),
    /// Rank the features of a dataset.
    Rank(RankArgs),
    /// Choose a feature subset with a selection scheme.
    Select(SelectArgs),
    /// Error estimates of one classifier on one subset.
    Estimate(EstimateArgs),
    /// Run the benchmark grid over a dataset manifest.
    Bench(BenchArgs),
    /// Score every subset of the top-10 features of sonar.
    CaseStudy(CaseStudyArgs),
    /// Rank tables and Friedman tests from a results file.
    Analyze(AnalyzeArgs),
    /// Figures and tables as SVG, HTML and CSV.
    Report(ReportArgs),
    /// Small self-contained demonstrations.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct SampleSizeArgs {
    #[arg(long, required_unless_present = "curve")]
    pub p1: Option<f64>,
    #[arg(long, required_unless_present = "curve")]
    pub p2: Option<f64>,
    /// Probability both features are right; defaults to p1 * p2.
    #[arg(long = "d")]
    pub d: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Round the answer up to a whole number of instances.
    #[arg(long)]
    pub ceil: bool,
    /// Continuous-score version; needs --var1 and --var2.
    #[arg(long)]
    pub smoothed: bool,
    #[arg(long, requires = "smoothed")]
    pub var1: Option<f64>,
    #[arg(long, requires = "smoothed")]
    pub var2: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub cov: f64,
    #[arg(long)]
    pub two_tailed: bool,
    /// Print a `p1,alpha,N` table instead of one value.
    #[arg(long, conflicts_with_all = ["p1", "p2", "smoothed"])]
    pub curve: bool,
    #[arg(long, default_value_t = 0.55)]
    pub from: f64,
    #[arg(long, default_value_t = 0.95)]
    pub to: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long, default_value_t = 0.05)]
    pub gap: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.01")]
    pub alphas: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Headered CSV file.
    #[arg(long)]
    pub data: PathBuf,
    /// Label column: a name, a 0-based index or `last`.
    #[arg(long, default_value = "last")]
    pub label_col: String,
    /// Draw a stratified probe of this many instances per class; the rest
    /// becomes the holdout.
    #[arg(long)]
    pub per_class: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "SU", value_parser = parse_ranker)]
    pub ranker: RankerKind,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "LDC", value_parser = parse_classifier)]
    pub classifier: ClassifierKind,
    #[arg(long, default_value = "SU", value_parser = parse_ranker)]
    pub ranker: RankerKind,
    #[arg(long, default_value = "TOP10", value_parser = parse_scheme)]
    pub selector: SelectionScheme,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "LDC", value_parser = parse_classifier)]
    pub classifier: ClassifierKind,
    /// Comma-separated feature indices or names; all features when absent.
    #[arg(long)]
    pub features: Option<String>,
    /// Any of resub, loo, sloo, rloo, holdout.
    #[arg(long, value_delimiter = ',', default_value = "resub,loo,sloo")]
    pub estimators: Vec<String>,
    /// Ranker and scheme redone inside each fold for `rloo`.
    #[arg(long, value_parser = parse_ranker)]
    pub ranker: Option<RankerKind>,
    #[arg(long, default_value = "ALL", value_parser = parse_scheme)]
    pub selector: SelectionScheme,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Lines of `name,path[,N,n]`.
    #[arg(long)]
    pub manifest: PathBuf,
    /// JSON-lines results file; a CSV twin is written beside it.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, env = "FSAUDIT_WORKERS", default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', value_parser = parse_classifier)]
    pub classifiers: Vec<ClassifierKind>,
    #[arg(long, value_delimiter = ',', value_parser = parse_ranker)]
    pub rankers: Vec<RankerKind>,
    #[arg(long, value_delimiter = ',', value_parser = parse_scheme)]
    pub selectors: Vec<SelectionScheme>,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 10)]
    pub per_class: usize,
    /// Keep finished cells of an existing results file.
    #[arg(long)]
    pub resume: bool,
    /// Record wall-clock durations (results are then not byte-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CaseStudyTarget {
    Sonar,
}

#[derive(Debug, Args)]
pub struct CaseStudyArgs {
    pub target: CaseStudyTarget,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "last")]
    pub label_col: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Directory for the bundle, the row table and the scatter plot.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "true_error", value_parser = parse_metric)]
    pub metric: Metric,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Benchmark results (JSON lines).
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Bundle written by `case-study`.
    #[arg(long)]
    pub case_study: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "true_error", value_parser = parse_metric)]
    pub metric: Metric,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DemoKind {
    /// Two features that only one of LDC and 1-NN can use.
    Fig3,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    pub which: DemoKind,
    #[arg(long, default_value = "ldc-wins", value_parser = parse_mode)]
    pub mode: DependenceMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_classifier(s: &str) -> std::result::Result<ClassifierKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_ranker(s: &str) -> std::result::Result<RankerKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scheme(s: &str) -> std::result::Result<SelectionScheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_metric(s: &str) -> std::result::Result<Metric, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<DependenceMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    init_logging(&cli);
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn init_logging(cli: &Cli) {
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => log::LevelFilter::Warn,
        (false, 0) => log::LevelFilter::Info,
        (false, 1) => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env("FSAUDIT_LOG")
        .format_timestamp(None)
        .try_init();
}

fn hyperparams(cli: &Cli) -> Result<Hyperparams> {
    match &cli.config {
        Some(p) => Hyperparams::from_file(p),
        None => Ok(Hyperparams::default()),
    }
}

fn log_resolved(command: &dyn std::fmt::Debug, hyper: &Hyperparams, seed: Option<u64>) {
    let h = hyper.to_config_string().trim_end().replace('\n', " ");
    match seed {
        Some(s) => info!("resolved config: {command:?}; hyper: {h}; seed={s}"),
        None => info!("resolved config: {command:?}; hyper: {h}"),
    }
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    let out = if json {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        s
    } else {
        text()
    };
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(out.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| Error::io("<stdout>", e))
}

fn execute(cli: &Cli) -> Result<()> {
    let hyper = hyperparams(cli)?;
    match &cli.command {
        Command::Samplesize(a) => {
            log_resolved(a, &hyper, None);
            samplesize(cli.json, a)
        }
        Command::Rank(a) => {
            log_resolved(a, &hyper, Some(a.data.seed));
            rank(cli.json, a, &hyper)
        }
        Command::Select(a) => {
            log_resolved(a, &hyper, Some(a.data.seed));
            select_cmd(cli.json, a, &hyper)
        }
        Command::Estimate(a) => {
            log_resolved(a, &hyper, Some(a.data.seed));
            estimate(cli.json, a, &hyper)
        }
        Command::Bench(a) => {
            log_resolved(a, &hyper, Some(a.seed));
            bench(cli.json, a, hyper)
        }
        Command::CaseStudy(a) => {
            log_resolved(a, &hyper, Some(a.seed));
            case_study(cli.json, a, &hyper)
        }
        Command::Analyze(a) => {
            log_resolved(a, &hyper, None);
            analyze(cli.json, a)
        }
        Command::Report(a) => {
            log_resolved(a, &hyper, None);
            report_cmd(cli.json, a)
        }
        Command::Demo(a) => {
            log_resolved(a, &hyper, Some(a.seed));
            demo(cli.json, a, &hyper)
        }
    }
}

fn samplesize(json: bool, a: &SampleSizeArgs) -> Result<()> {
    let round = |n: f64| if a.ceil { n.ceil() } else { n };
    if a.curve {
        let grid = linspace_step(a.from, a.to, a.step);
        let points = sample_size_curve(&grid, a.gap, &a.alphas, Agreement::Independent)?;
        return emit(json, &points, || {
            let mut s = String::from("p1,alpha,N\n");
            for p in &points {
                let _ = writeln!(s, "{:.4},{},{:.4}", p.p1, p.alpha, round(p.n));
            }
            s
        });
    }
    let (p1, p2) = (a.p1.expect("required by clap"), a.p2.expect("required by clap"));
    if a.smoothed {
        let (v1, v2) = a
            .var1
            .zip(a.var2)
            .ok_or_else(|| Error::invalid("--smoothed needs --var1 and --var2"))?;
        let plan = SmoothedPlan::new(p1, p2, v1, v2, a.cov, a.alpha, a.two_tailed)?;
        let r = smoothed_sample_size(&plan)?;
        let n = round(r.n);
        return emit(json, &json!({"N": n, "degenerate_variance": r.degenerate_variance}), || {
            format!("{}\n", fmt_n(n, a.ceil))
        });
    }
    let d = a.d.unwrap_or(p1 * p2);
    let n = round(mcnemar_sample_size(&McNemarPlan::new(p1, p2, d, a.alpha)?)?);
    emit(json, &json!({"p1": p1, "p2": p2, "d": d, "alpha": a.alpha, "N": n}), || {
        format!("{}\n", fmt_n(n, a.ceil))
    })
}

fn fmt_n(n: f64, whole: bool) -> String {
    if whole {
        format!("{n:.0}")
    } else {
        format!("{n:.1}")
    }
}

struct Loaded {
    probe: Dataset,
    holdout: Option<Dataset>,
}

fn load_data(a: &DataArgs) -> Result<Loaded> {
    let label: LabelColumn = a.label_col.parse()?;
    let d = load_csv(&a.data, &label)?;
    match a.per_class {
        Some(m) => {
            let split = stratified_split(&d, m, a.seed)?;
            Ok(Loaded {
                probe: split.probe,
                holdout: Some(split.holdout),
            })
        }
        None => Ok(Loaded { probe: d, holdout: None }),
    }
}

fn rank(json: bool, a: &RankArgs, hyper: &Hyperparams) -> Result<()> {
    let data = load_data(&a.data)?;
    let ranked = rank_features(a.ranker, hyper, &data.probe, a.data.seed)?;
    let names = data.probe.feature_names();
    let rows: Vec<_> = ranked
        .features()
        .iter()
        .zip(ranked.scores())
        .enumerate()
        .map(|(i, (&f, &s))| json!({"rank": i + 1, "feature_index": f, "feature_name": names[f], "score": s}))
        .collect();
    emit(json, &rows, || {
        let mut s = String::from("rank,feature_index,feature_name,score\n");
        for (i, (&f, sc)) in ranked.features().iter().zip(ranked.scores()).enumerate() {
            let _ = writeln!(s, "{},{},{},{}", i + 1, f, names[f], sc);
        }
        s
    })
}

fn subset_names(d: &Dataset, s: &FeatureSubset) -> Vec<String> {
    s.indices().iter().map(|&i| d.feature_names()[i].clone()).collect()
}

fn select_cmd(json: bool, a: &SelectArgs, hyper: &Hyperparams) -> Result<()> {
    let data = load_data(&a.data)?;
    let probe = &data.probe;
    let ranked = rank_features(a.ranker, hyper, probe, a.data.seed)?;
    let r = select(a.selector, &ranked, a.classifier, hyper, probe, a.data.seed)?;
    let truth = match &data.holdout {
        Some(h) => Some(holdout_true_error(a.classifier, hyper, probe, &r.subset, h, a.data.seed)?.value),
        None => None,
    };
    let names = subset_names(probe, &r.subset);
    emit(
        json,
        &json!({
            "subset": r.subset.indices(),
            "features": names,
            "criterion": r.criterion.value,
            "evaluations": r.evaluations,
            "candidates_tied": r.candidates_tied,
            "true_error": truth,
        }),
        || {
            let mut s = format!(
                "subset: {}\nindices: {}\ncriterion (smoothed LOO): {:.6}\nevaluations: {}\n",
                names.join(" "),
                r.subset,
                r.criterion.value,
                r.evaluations
            );
            if let Some(t) = truth {
                let _ = writeln!(s, "holdout error: {t:.6}");
            }
            s
        },
    )
}

fn parse_features(d: &Dataset, spec: Option<&str>) -> Result<FeatureSubset> {
    let Some(spec) = spec else {
        return Ok(FeatureSubset::all(d.n_features()));
    };
    let mut idx = Vec::new();
    for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let i = match tok.parse::<usize>() {
            Ok(i) => i,
            Err(_) => d
                .feature_names()
                .iter()
                .position(|n| n == tok)
                .ok_or_else(|| Error::invalid(format!("no feature named {tok:?}")))?,
        };
        idx.push(i);
    }
    let s = FeatureSubset::new(idx);
    d.check_subset(&s)?;
    Ok(s)
}

fn estimate(json: bool, a: &EstimateArgs, hyper: &Hyperparams) -> Result<()> {
    let data = load_data(&a.data)?;
    let probe = &data.probe;
    let subset = parse_features(probe, a.features.as_deref())?;
    let seed = a.data.seed;
    let mut out = Vec::new();
    for name in &a.estimators {
        let e = match name.to_ascii_lowercase().as_str() {
            "resub" => resubstitution_error(a.classifier, hyper, probe, &subset, seed)?,
            "loo" => loo_error(a.classifier, hyper, probe, &subset, seed, false)?,
            "sloo" => loo_error(a.classifier, hyper, probe, &subset, seed, true)?,
            "rloo" => {
                if a.selector.needs_ranking() && a.ranker.is_none() {
                    return Err(Error::invalid(format!("rloo with {} needs --ranker", a.selector.tag())));
                }
                proper_rloo_error(a.classifier, a.ranker, a.selector, hyper, probe, seed)?.estimate
            }
            "holdout" => {
                let h = data
                    .holdout
                    .as_ref()
                    .ok_or_else(|| Error::invalid("holdout needs --per-class to set a probe aside"))?;
                holdout_true_error(a.classifier, hyper, probe, &subset, h, seed)?
            }
            other => return Err(Error::invalid(format!("unknown estimator {other:?}"))),
        };
        out.push(e);
    }
    emit(json, &json!({"subset": subset.indices(), "estimates": out}), || {
        let mut s = String::from("estimator,value,evaluations\n");
        for e in &out {
            let _ = writeln!(s, "{},{:.6},{}", e.kind.tag(), e.value, e.n_evaluations);
        }
        s
    })
}

fn bench(json: bool, a: &BenchArgs, hyper: Hyperparams) -> Result<()> {
    let defaults = GridConfig::default();
    let config = GridConfig {
        per_class: a.per_class,
        runs: a.runs,
        classifiers: if a.classifiers.is_empty() { defaults.classifiers } else { a.classifiers.clone() },
        rankers: if a.rankers.is_empty() { defaults.rankers } else { a.rankers.clone() },
        selectors: if a.selectors.is_empty() { defaults.selectors } else { a.selectors.clone() },
        master_seed: a.seed,
        hyper,
        workers: a.workers.max(1),
        timing: a.timing,
    };
    config.validate()?;
    let datasets = load_manifest(&a.manifest)?
        .iter()
        .map(|e| e.load())
        .collect::<Result<Vec<_>>>()?;
    info!(
        "grid: {} datasets x {} records, {} workers",
        datasets.len(),
        config.records_per_dataset(),
        config.workers
    );
    let s = run_grid_to_file(&config, &datasets, &a.out, a.resume)?;
    emit(
        json,
        &json!({"computed": s.computed, "skipped": s.skipped, "errors": s.errors, "out": a.out}),
        || format!("computed {} cells, kept {}, {} error rows -> {}\n", s.computed, s.skipped, s.errors, a.out.display()),
    )
}

fn case_study(json: bool, a: &CaseStudyArgs, hyper: &Hyperparams) -> Result<()> {
    let label: LabelColumn = a.label_col.parse()?;
    let sonar = load_csv(&a.data, &label)?;
    let cs = sonar_case_study(&sonar, hyper, a.seed)?;
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let bundle = dir.join("case_study.json");
        std::fs::write(&bundle, serde_json::to_string(&cs)?).map_err(|e| Error::io(&bundle, e))?;
        let rows = dir.join("case_study_rows.csv");
        std::fs::write(&rows, case_study_csv(&cs)).map_err(|e| Error::io(&rows, e))?;
        let cfg = format!("case-study seed={} {}", a.seed, hyper.to_config_string());
        let svg = dir.join(report::artifact_name("fig2", &cfg, "svg"));
        report::emit_scatter_svg(&scatter_title(&cs), &report::case_study_panels(&cs), &svg)?;
        info!("wrote {}, {} and {}", bundle.display(), rows.display(), svg.display());
    }
    emit(json, &cs.best, || {
        let mut s = format!("top 10 ({}): {:?}\nestimator,ranks,predicted,true\n", cs.ranker.tag(), cs.top10);
        for b in &cs.best {
            let ranks: Vec<String> = b.ranks.iter().map(usize::to_string).collect();
            let pred = b.predicted.map_or("-".to_string(), |p| format!("{p:.4}"));
            let _ = writeln!(s, "{},[{}],{},{:.4}", b.estimator.tag(), ranks.join(" "), pred, b.true_error);
        }
        s
    })
}

fn scatter_title(cs: &CaseStudy) -> String {
    format!("{}: {} on subsets of the {} top 10 (probe seed {})", cs.dataset, cs.classifier.tag(), cs.ranker.tag(), cs.probe_seed)
}

fn case_study_csv(cs: &CaseStudy) -> String {
    let mut s = String::from("ranks,features,resub,loo,sloo,true_error\n");
    for r in &cs.rows {
        let ranks: Vec<String> = r.ranks.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{},{},{},{},{},{}", ranks.join(" "), r.subset, r.resub, r.loo, r.sloo, r.true_error);
    }
    s
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn analyze(json: bool, a: &AnalyzeArgs) -> Result<()> {
    let records = read_jsonl(&a.input)?;
    if records.is_empty() {
        return Err(Error::invalid(format!("{} holds no records", a.input.display())));
    }
    let table = selector_rank_table(&records, a.metric, a.alpha);
    report::emit_rank_table(&table, "Average ranks of the selection schemes", &a.out.join("selector_ranks.html"))?;
    let combos = combination_ranking(&records, a.metric)?;
    write(&a.out.join("combinations.csv"), &report::combination_csv(&combos))?;
    let tests = json!({
        "metric": a.metric,
        "alpha": a.alpha,
        "selector_table": table,
        "combinations": {
            "n_blocks": combos.n_blocks,
            "skipped_blocks": combos.skipped_blocks,
            "friedman": combos.friedman,
        },
    });
    write(&a.out.join("tests.json"), &serde_json::to_string_pretty(&tests)?)?;
    emit(json, &tests, || {
        let mut s = format!(
            "{} records, {} complete blocks; wrote selector_ranks.html/.csv, combinations.csv, tests.json to {}\n",
            records.len(),
            combos.n_blocks,
            a.out.display()
        );
        s.push_str("best combinations:\n");
        for (i, r) in combos.rows.iter().take(10).enumerate() {
            let _ = writeln!(s, "{:>3}. {:<24} {:.3}", i + 1, r.label(), r.avg_rank);
        }
        s
    })
}

fn report_cmd(json: bool, a: &ReportArgs) -> Result<()> {
    let cfg = format!("{a:?}");
    let mut written: Vec<PathBuf> = Vec::new();

    let grid = linspace_step(0.55, 0.95, 0.01);
    let points = sample_size_curve(&grid, 0.05, &[0.05, 0.01], Agreement::Independent)?;
    let series: Vec<CurveSeries> = [0.05, 0.01]
        .iter()
        .map(|&alpha| CurveSeries {
            label: format!("alpha = {alpha}"),
            points: points.iter().filter(|p| p.alpha == alpha).map(|p| (p.p1, p.n)).collect(),
        })
        .collect();
    let p = a.out.join(report::artifact_name("fig1", &cfg, "svg"));
    report::emit_curve_svg("Required N, p2 = p1 - 0.05, independent features", "p1", "N", &series, &p)?;
    written.push(p);

    if let Some(input) = &a.input {
        let records = read_jsonl(input)?;
        let table = selector_rank_table(&records, a.metric, a.alpha);
        let p = a.out.join(report::artifact_name("table3", &cfg, "html"));
        report::emit_rank_table(&table, "Average ranks of the selection schemes", &p)?;
        written.push(p.with_extension("csv"));
        written.push(p);
        for (fig, factor) in [("fig4", Factor::Classifier), ("fig5", Factor::Ranker), ("fig6", Factor::Selector)] {
            let f = factor_ranks(&records, a.metric, factor);
            if f.spokes.len() < 3 {
                log::warn!("{fig}: glyph plots need at least 3 datasets, found {}", f.spokes.len());
                continue;
            }
            let p = a.out.join(report::artifact_name(fig, &cfg, "svg"));
            report::emit_glyph_svg(&GlyphSpec::from_factor_ranks(format!("Average ranks by {factor:?}").to_lowercase(), &f), &p)?;
            written.push(p);
        }
    }
    if let Some(path) = &a.case_study {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cs: CaseStudy = serde_json::from_str(&text)?;
        let p = a.out.join(report::artifact_name("fig2", &cfg, "svg"));
        report::emit_scatter_svg(&scatter_title(&cs), &report::case_study_panels(&cs), &p)?;
        written.push(p);
    }
    emit(json, &written, || written.iter().map(|p| format!("{}\n", p.display())).collect())
}

fn demo(json: bool, a: &DemoArgs, hyper: &Hyperparams) -> Result<()> {
    match a.which {
        DemoKind::Fig3 => {
            let d = generate_classifier_dependent_pair(a.mode, a.seed);
            let both = FeatureSubset::all(2);
            let mut rows = Vec::new();
            for kind in [ClassifierKind::Ldc, ClassifierKind::Nn1] {
                let pair = loo_error(kind, hyper, &d, &both, a.seed, false)?.value;
                let single: Vec<f64> = (0..2)
                    .map(|f| loo_error(kind, hyper, &d, &FeatureSubset::new(vec![f]), a.seed, false).map(|e| e.value))
                    .collect::<Result<_>>()?;
                rows.push((kind, pair, single));
            }
            let value = json!({
                "mode": a.mode.to_string(),
                "n_instances": d.n_instances(),
                "loo": rows.iter().map(|(k, p, s)| json!({"classifier": k, "pair": p, "single": s})).collect::<Vec<_>>(),
            });
            emit(json, &value, || {
                let tag = |k: ClassifierKind| if k == ClassifierKind::Nn1 { "1NN" } else { k.tag() };
                let mut s = rows.iter().map(|(k, p, _)| format!("LOO({})={}", tag(*k), p)).collect::<Vec<_>>().join(" ");
                s.push('\n');
                for (k, _, single) in &rows {
                    let _ = writeln!(s, "  {} single features: x1 {:.3}, x2 {:.3}", tag(*k), single[0], single[1]);
                }
                s
            })
        }
    }
}
