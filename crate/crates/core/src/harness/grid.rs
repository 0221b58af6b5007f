use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::ClassifierKind;
use crate::config::Hyperparams;
use crate::dataset::{restrict_to_top2_classes, stratified_split, Dataset, SplitPair};
use crate::error::{Error, Result};
use crate::estimators::holdout_true_error;
use crate::rankers::{rank_features, RankedList, RankerKind};
use crate::seed::cell_seed;
use crate::selectors::{select_cached, CriterionCache, SelectionScheme};
use crate::subset::FeatureSubset;

/// One benchmark cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub dataset: String,
    /// 1-based sampling run.
    pub run: usize,
    pub classifier: ClassifierKind,
    /// Absent for `ALL`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranker: Option<RankerKind>,
    pub selector: SelectionScheme,
    pub subset: FeatureSubset,
    /// Smoothed LOO criterion of `subset` on the probe.
    #[serde(with = "nan_as_null")]
    pub est_error: f64,
    /// Counting error on the holdout.
    #[serde(with = "nan_as_null")]
    pub true_error: f64,
    pub evaluations: usize,
    pub seed: u64,
    /// Wall-clock seconds; recorded only when timing is switched on, so
    /// results files stay byte-reproducible by default.
    pub duration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Identity of a cell within a results file.
pub type RecordKey = (String, usize, ClassifierKind, Option<RankerKind>, SelectionScheme);

impl RunRecord {
    pub fn key(&self) -> RecordKey {
        (
            self.dataset.clone(),
            self.run,
            self.classifier,
            self.ranker,
            self.selector,
        )
    }

    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub per_class: usize,
    pub runs: usize,
    pub classifiers: Vec<ClassifierKind>,
    pub rankers: Vec<RankerKind>,
    /// May include `ALL`, which runs once per classifier and run.
    pub selectors: Vec<SelectionScheme>,
    pub master_seed: u64,
    pub hyper: Hyperparams,
    pub workers: usize,
    pub timing: bool,
}

impl Default for GridConfig {
    /// The full grid: 7 classifiers, 5 rankers, 7 schemes, 10 runs of
    /// 10 instances per class.
    fn default() -> Self {
        GridConfig {
            per_class: 10,
            runs: 10,
            classifiers: ClassifierKind::ALL.to_vec(),
            rankers: RankerKind::ALL.to_vec(),
            selectors: SelectionScheme::ALL_SCHEMES.to_vec(),
            master_seed: 1,
            hyper: Hyperparams::default(),
            workers: 1,
            timing: false,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.per_class < 2 {
            return Err(Error::invalid("per_class must be at least 2"));
        }
        if self.runs < 1 {
            return Err(Error::invalid("runs must be at least 1"));
        }
        if self.classifiers.is_empty() || self.selectors.is_empty() {
            return Err(Error::invalid("grid needs at least one classifier and one selector"));
        }
        if self.ranked_selectors().next().is_some() && self.rankers.is_empty() {
            return Err(Error::invalid("ranked selectors given without any ranker"));
        }
        self.hyper.validate()
    }

    fn ranked_selectors(&self) -> impl Iterator<Item = SelectionScheme> + '_ {
        self.selectors.iter().copied().filter(|s| s.needs_ranking())
    }

    fn has_all(&self) -> bool {
        self.selectors.contains(&SelectionScheme::All)
    }

    /// `|C|·|R|·|Sel \ ALL|·runs + |C|·runs` (second term only with `ALL`).
    pub fn records_per_dataset(&self) -> usize {
        let c = self.classifiers.len();
        let ranked = self.ranked_selectors().count();
        c * self.rankers.len() * ranked * self.runs + if self.has_all() { c * self.runs } else { 0 }
    }

    /// Cell keys of one (dataset, run, classifier), in canonical order.
    fn job_keys(&self, dataset: &str, run: usize, kind: ClassifierKind) -> Vec<RecordKey> {
        let mut keys = Vec::new();
        if self.has_all() {
            keys.push((dataset.to_string(), run, kind, None, SelectionScheme::All));
        }
        for &r in &self.rankers {
            for s in self.ranked_selectors() {
                keys.push((dataset.to_string(), run, kind, Some(r), s));
            }
        }
        keys
    }
}

struct Prepared {
    split: SplitPair,
    rankings: Vec<(RankerKind, std::result::Result<RankedList, String>)>,
}

fn prepare(config: &GridConfig, data: &Dataset, run: usize, seed: u64) -> std::result::Result<Prepared, String> {
    let two = restrict_to_top2_classes(data);
    let split = stratified_split(&two, config.per_class, seed).map_err(|e| e.to_string())?;
    let rankings = if config.ranked_selectors().next().is_some() {
        config
            .rankers
            .iter()
            .map(|&r| (r, rank_features(r, &config.hyper, &split.probe, seed).map_err(|e| e.to_string())))
            .collect()
    } else {
        Vec::new()
    };
    log::debug!("prepared {} run {run}", data.name());
    Ok(Prepared { split, rankings })
}

fn error_record(key: &RecordKey, seed: u64, msg: &str) -> RunRecord {
    RunRecord {
        dataset: key.0.clone(),
        run: key.1,
        classifier: key.2,
        ranker: key.3,
        selector: key.4,
        subset: FeatureSubset::empty(),
        est_error: f64::NAN,
        true_error: f64::NAN,
        evaluations: 0,
        seed,
        duration: None,
        error: Some(msg.to_string()),
    }
}

fn run_job(
    config: &GridConfig,
    prepared: &std::result::Result<Prepared, String>,
    keys: &[RecordKey],
    seed: u64,
) -> Vec<RunRecord> {
    let p = match prepared {
        Ok(p) => p,
        Err(msg) => return keys.iter().map(|k| error_record(k, seed, msg)).collect(),
    };
    let probe = &p.split.probe;
    let kind = keys[0].2;
    let mut cache = CriterionCache::new(kind, probe, seed);
    let empty = RankedList::from_scores(&[]);
    keys.iter()
        .map(|key| {
            let start = Instant::now();
            let ranked = match key.3 {
                None => Ok(&empty),
                Some(r) => match &p.rankings.iter().find(|(k, _)| *k == r).unwrap().1 {
                    Ok(l) => Ok(l),
                    Err(e) => Err(e.clone()),
                },
            };
            let outcome = ranked
                .and_then(|ranked| {
                    select_cached(key.4, ranked, kind, &config.hyper, probe, seed, &mut cache)
                        .map_err(|e| e.to_string())
                })
                .and_then(|sel| {
                    holdout_true_error(kind, &config.hyper, probe, &sel.subset, &p.split.holdout, seed)
                        .map(|t| (sel, t))
                        .map_err(|e| e.to_string())
                });
            match outcome {
                Ok((sel, truth)) => RunRecord {
                    dataset: key.0.clone(),
                    run: key.1,
                    classifier: kind,
                    ranker: key.3,
                    selector: key.4,
                    subset: sel.subset,
                    est_error: sel.criterion.value,
                    true_error: truth.value,
                    evaluations: sel.evaluations,
                    seed,
                    duration: config.timing.then(|| start.elapsed().as_secs_f64()),
                    error: None,
                },
                Err(msg) => error_record(key, seed, &msg),
            }
        })
        .collect()
}

/// Sorts into the canonical file order: dataset, run, classifier, ranker
/// (`ALL` first), selector.
pub fn sort_records(records: &mut [RunRecord]) {
    records.sort_by(|a, b| a.key().cmp(&b.key()));
}

fn run_jobs(
    config: &GridConfig,
    datasets: &[Dataset],
    done: &BTreeSet<RecordKey>,
    sink: &(dyn Fn(&[RunRecord]) -> Result<()> + Sync),
) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let mut names = BTreeSet::new();
    for d in datasets {
        if !names.insert(d.name()) {
            return Err(Error::invalid(format!("duplicate dataset name {:?}", d.name())));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;

    // (dataset, run) units, prepared lazily inside the pool
    let units: Vec<(usize, usize)> = (0..datasets.len())
        .flat_map(|d| (1..=config.runs).map(move |r| (d, r)))
        .collect();
    let results: Mutex<Vec<RunRecord>> = Mutex::new(Vec::new());
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    pool.install(|| {
        units.par_iter().for_each(|&(di, run)| {
            let data = &datasets[di];
            let seed = cell_seed(config.master_seed, data.name(), run);
            let jobs: Vec<(ClassifierKind, Vec<RecordKey>)> = config
                .classifiers
                .iter()
                .map(|&k| {
                    let keys: Vec<RecordKey> = config
                        .job_keys(data.name(), run, k)
                        .into_iter()
                        .filter(|key| !done.contains(key))
                        .collect();
                    (k, keys)
                })
                .filter(|(_, keys)| !keys.is_empty())
                .collect();
            if jobs.is_empty() {
                return;
            }
            let prepared = prepare(config, data, run, seed);
            jobs.par_iter().for_each(|(kind, keys)| {
                let recs = run_job(config, &prepared, keys, seed);
                log::info!("{} run {run} {kind}: {} cells", data.name(), recs.len());
                if let Err(e) = sink(&recs) {
                    failure.lock().unwrap().get_or_insert(e);
                }
                results.lock().unwrap().extend(recs);
            });
        })
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let mut out = results.into_inner().unwrap();
    sort_records(&mut out);
    Ok(out)
}

/// Runs every cell in memory and returns the records in canonical order.
pub fn run_grid(config: &GridConfig, datasets: &[Dataset]) -> Result<Vec<RunRecord>> {
    run_jobs(config, datasets, &BTreeSet::new(), &|_| Ok(()))
}

pub fn to_jsonl(records: &[RunRecord]) -> Result<String> {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    Ok(s)
}

/// Parses a results file. A truncated final line (from an interrupted
/// write) is ignored.
pub fn read_jsonl(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let lines: Vec<String> = BufReader::new(f)
        .lines()
        .collect::<std::io::Result<_>>()
        .map_err(|e| Error::io(path, e))?;
    let mut out = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(r) => out.push(r),
            Err(_) if i + 1 == lines.len() => log::warn!("ignoring truncated last line of {}", path.display()),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    dataset: &'a str,
    run: usize,
    classifier: &'static str,
    ranker: &'static str,
    selector: &'static str,
    subset: String,
    est_error: String,
    true_error: String,
    evaluations: usize,
    seed: u64,
    duration: String,
    error: &'a str,
}

fn fmt_opt(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        String::new()
    }
}

pub fn write_csv_export(records: &[RunRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(CsvRow {
            dataset: &r.dataset,
            run: r.run,
            classifier: r.classifier.tag(),
            ranker: r.ranker.map_or("", |k| k.tag()),
            selector: r.selector.tag(),
            subset: r
                .subset
                .indices()
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            est_error: fmt_opt(r.est_error),
            true_error: fmt_opt(r.true_error),
            evaluations: r.evaluations,
            seed: r.seed,
            duration: r.duration.map_or(String::new(), |d| d.to_string()),
            error: r.error.as_deref().unwrap_or(""),
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Path of the CSV twin of a JSONL results file.
pub fn csv_path_for(jsonl: &Path) -> PathBuf {
    jsonl.with_extension("csv")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSummary {
    pub computed: usize,
    pub skipped: usize,
    pub errors: usize,
}

/// Runs the grid into `out` (JSONL) plus its CSV twin.
///
/// With `resume`, cells already present in `out` are skipped and the new
/// ones appended as they finish; the file is finally rewritten in canonical
/// order, so a resumed run ends byte-identical to an uninterrupted one.
pub fn run_grid_to_file(
    config: &GridConfig,
    datasets: &[Dataset],
    out: &Path,
    resume: bool,
) -> Result<GridSummary> {
    let previous = if resume && out.exists() {
        read_jsonl(out)?
    } else {
        Vec::new()
    };
    let done: BTreeSet<RecordKey> = previous.iter().map(RunRecord::key).collect();
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = if resume {
        // drop any truncated tail before appending
        fs::write(out, to_jsonl(&previous)?).map_err(|e| Error::io(out, e))?;
        OpenOptions::new().append(true).open(out)
    } else {
        File::create(out)
    }
    .map_err(|e| Error::io(out, e))?;
    let appender = Mutex::new(BufWriter::new(file));
    let sink = |recs: &[RunRecord]| -> Result<()> {
        let text = to_jsonl(recs)?;
        let mut w = appender.lock().unwrap();
        w.write_all(text.as_bytes())
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(out, e))
    };
    let fresh = run_jobs(config, datasets, &done, &sink)?;
    drop(appender);

    let computed = fresh.len();
    let mut all = previous;
    all.extend(fresh);
    sort_records(&mut all);
    let errors = all.iter().filter(|r| r.is_error()).count();
    fs::write(out, to_jsonl(&all)?).map_err(|e| Error::io(out, e))?;
    write_csv_export(&all, csv_path_for(out))?;
    Ok(GridSummary {
        computed,
        skipped: done.len(),
        errors,
    })
}
