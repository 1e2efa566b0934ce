//! Scoring findings against labelled screens.
//!
//! Detection is counted per (screen, category) presence. A screen with no
//! labels is a non-DP screen; the `non_dp` row scores whether such screens
//! were left without findings. Averages over the ten categories are weighted
//! by instance count.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::RuleSet;
use crate::error::{decode_json, Error, Result};
use crate::geometry::BoundingBox;
use crate::icons::{ingest_external_detections, IconDetection};
use crate::ingest::read_segment_sidecar;
use crate::model::{DarkPatternCategory, Domain, GroundTruthLabel, Segment, UiScreenshot};
use crate::par::{self, Execution};
use crate::resolution::{detect, Ablation, DpFinding, RelevanceTable, ResolutionConfig};

/// One labelled screen, with paths resolved against the manifest.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetEntry {
    pub id: String,
    pub domain: Domain,
    pub screenshot: PathBuf,
    pub segments: PathBuf,
    pub icons: Option<PathBuf>,
    pub labels: Vec<GroundTruthLabel>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestLine {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    domain: Domain,
    screenshot: PathBuf,
    segments: PathBuf,
    #[serde(default)]
    icons: Option<PathBuf>,
    labels: Vec<GroundTruthLabel>,
}

/// Parses a JSON-lines manifest. Blank lines are skipped; an entry without an
/// `id` takes its screenshot's file stem.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<DatasetEntry>> {
    let mut entries = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let raw: ManifestLine = decode_json(line).map_err(|e| match e {
            Error::Schema { path, message } => Error::schema(format!("line {}: {path}", i + 1), message),
            other => other,
        })?;
        let id = raw.id.unwrap_or_else(|| {
            raw.screenshot
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
        if !ids.insert(id.clone()) {
            return Err(Error::schema(
                format!("line {}: id", i + 1),
                format!("duplicate entry id `{id}`"),
            ));
        }
        entries.push(DatasetEntry {
            id,
            domain: raw.domain,
            screenshot: base.join(raw.screenshot),
            segments: base.join(raw.segments),
            icons: raw.icons.map(|p| base.join(p)),
            labels: raw.labels,
        });
    }
    if entries.is_empty() {
        return Err(Error::EmptyInput("manifest has no entries".into()));
    }
    Ok(entries)
}

pub fn load_manifest(path: &Path) -> Result<Vec<DatasetEntry>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text, path.parent().unwrap_or(Path::new("")))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Counts {
    fn add(&mut self, other: Counts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

/// Per-category counts, including the `non_dp` row.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub per_category: BTreeMap<DarkPatternCategory, Counts>,
}

impl OutcomeCounts {
    pub fn get(&self, category: DarkPatternCategory) -> Counts {
        self.per_category.get(&category).copied().unwrap_or_default()
    }

    fn bump(&mut self, category: DarkPatternCategory, f: impl FnOnce(&mut Counts)) {
        f(self.per_category.entry(category).or_default());
    }

    pub fn merge(&mut self, other: &OutcomeCounts) {
        for (&c, &n) in &other.per_category {
            self.per_category.entry(c).or_default().add(n);
        }
    }

    /// Sum over the ten dark pattern categories.
    pub fn aggregate(&self) -> Counts {
        let mut total = Counts::default();
        for c in DarkPatternCategory::ALL {
            total.add(self.get(c));
        }
        total
    }
}

/// Outcomes for one screen.
pub fn screen_outcomes(findings: &[DpFinding], labels: &[GroundTruthLabel]) -> OutcomeCounts {
    use DarkPatternCategory::NonDp;
    let predicted: BTreeSet<_> = findings.iter().map(|f| f.category).collect();
    let truth: BTreeSet<_> = labels.iter().map(|l| l.category).collect();
    let mut out = OutcomeCounts::default();
    for &c in predicted.union(&truth) {
        match (predicted.contains(&c), truth.contains(&c)) {
            (true, true) => out.bump(c, |n| n.tp += 1),
            (true, false) => out.bump(c, |n| n.fp += 1),
            _ => out.bump(c, |n| n.fn_ += 1),
        }
    }
    match (predicted.is_empty(), truth.is_empty()) {
        (true, true) => out.bump(NonDp, |n| n.tp += 1),
        (false, true) => out.bump(NonDp, |n| n.fn_ += 1),
        (true, false) => out.bump(NonDp, |n| n.fp += 1),
        (false, false) => {}
    }
    out
}

/// Outcomes summed over screens given as `(findings, labels)` pairs.
pub fn classify_outcomes<'a, I>(screens: I) -> OutcomeCounts
where
    I: IntoIterator<Item = (&'a [DpFinding], &'a [GroundTruthLabel])>,
{
    let mut total = OutcomeCounts::default();
    for (findings, labels) in screens {
        total.merge(&screen_outcomes(findings, labels));
    }
    total
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Rates {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Precision, recall and F1, with every 0/0 taken as 0.
pub fn precision_recall_f1(c: Counts) -> Rates {
    let (tp, fp, fn_) = (c.tp as f64, c.fp as f64, c.fn_ as f64);
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    Rates {
        precision,
        recall,
        f1: ratio(2.0 * precision * recall, precision + recall),
    }
}

/// 1.0 when `pred` lies inside `gt`, otherwise the strict IoU.
pub fn contained_iou(pred: &BoundingBox, gt: &BoundingBox) -> f64 {
    pred.contained_iou(gt)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct IouSums {
    pub pairs: u64,
    pub strict: f64,
    pub contained: f64,
}

impl IouSums {
    fn add(&mut self, other: IouSums) {
        self.pairs += other.pairs;
        self.strict += other.strict;
        self.contained += other.contained;
    }

    pub fn avg_strict(&self) -> f64 {
        ratio(self.strict, self.pairs as f64)
    }

    pub fn avg_contained(&self) -> f64 {
        ratio(self.contained, self.pairs as f64)
    }
}

/// Greedy one-to-one matching by descending strict IoU, continued until one
/// side runs out. Returns `(strict, contained)` per matched pair.
fn match_boxes(preds: &[BoundingBox], truths: &[BoundingBox]) -> Vec<(f64, f64)> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, p) in preds.iter().enumerate() {
        for (j, t) in truths.iter().enumerate() {
            pairs.push((p.strict_iou(t), i, j));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let (mut used_p, mut used_t) = (vec![false; preds.len()], vec![false; truths.len()]);
    let mut out = Vec::new();
    for (iou, i, j) in pairs {
        if used_p[i] || used_t[j] {
            continue;
        }
        used_p[i] = true;
        used_t[j] = true;
        out.push((iou, preds[i].contained_iou(&truths[j])));
    }
    out
}

/// Localization sums for the true-positive categories of one screen.
pub fn localization_scores(
    findings: &[DpFinding],
    labels: &[GroundTruthLabel],
) -> BTreeMap<DarkPatternCategory, IouSums> {
    let mut out = BTreeMap::new();
    for finding in findings {
        let truths: Vec<BoundingBox> = labels
            .iter()
            .filter(|l| l.category == finding.category)
            .map(|l| l.bbox)
            .collect();
        if truths.is_empty() {
            continue;
        }
        let sums: &mut IouSums = out.entry(finding.category).or_default();
        for (strict, contained) in match_boxes(&finding.boxes, &truths) {
            sums.add(IouSums {
                pairs: 1,
                strict,
                contained,
            });
        }
    }
    out
}

/// Findings and labels for one screen: everything a report is built from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScreenResult {
    pub id: String,
    pub findings: Vec<DpFinding>,
    pub labels: Vec<GroundTruthLabel>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CategoryRow {
    pub category: DarkPatternCategory,
    pub instances: u64,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl CategoryRow {
    fn new(category: DarkPatternCategory, c: Counts) -> Self {
        let r = precision_recall_f1(c);
        CategoryRow {
            category,
            instances: c.tp + c.fn_,
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Averages {
    pub total_instances: u64,
    /// Rates averaged over categories, weighted by instance count.
    pub weighted: Rates,
    /// Unweighted mean over categories with at least one instance.
    pub macro_avg: Rates,
    /// Rates of the summed counts.
    pub micro: Rates,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalizationRow {
    pub category: DarkPatternCategory,
    pub pairs: u64,
    pub avg_strict_iou: f64,
    pub avg_contained_iou: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub ablation: String,
    pub screens: usize,
    pub failed_entries: usize,
    pub failures: Vec<String>,
    pub categories: Vec<CategoryRow>,
    pub averages: Averages,
    pub non_dp: CategoryRow,
    /// Categories with at least one true positive.
    pub localization: Vec<LocalizationRow>,
    pub overall_localization: Option<LocalizationRow>,
    pub non_dp_screens: usize,
    pub false_positive_screen_rate: f64,
}

fn localization_row(category: DarkPatternCategory, s: IouSums) -> LocalizationRow {
    LocalizationRow {
        category,
        pairs: s.pairs,
        avg_strict_iou: s.avg_strict(),
        avg_contained_iou: s.avg_contained(),
    }
}

/// Builds a report from per-screen results. Pure in its inputs.
pub fn build_report(ablation: &str, results: &[ScreenResult], failures: Vec<String>) -> EvaluationReport {
    let counts = classify_outcomes(results.iter().map(|r| (r.findings.as_slice(), r.labels.as_slice())));
    let categories: Vec<CategoryRow> = DarkPatternCategory::ALL
        .into_iter()
        .map(|c| CategoryRow::new(c, counts.get(c)))
        .collect();

    let total_instances: u64 = categories.iter().map(|r| r.instances).sum();
    let weighted = |f: fn(&CategoryRow) -> f64| {
        ratio(
            categories.iter().map(|r| r.instances as f64 * f(r)).sum(),
            total_instances as f64,
        )
    };
    let present: Vec<&CategoryRow> = categories.iter().filter(|r| r.instances > 0).collect();
    let mean = |f: fn(&CategoryRow) -> f64| ratio(present.iter().map(|r| f(r)).sum(), present.len() as f64);
    let averages = Averages {
        total_instances,
        weighted: Rates {
            precision: weighted(|r| r.precision),
            recall: weighted(|r| r.recall),
            f1: weighted(|r| r.f1),
        },
        macro_avg: Rates {
            precision: mean(|r| r.precision),
            recall: mean(|r| r.recall),
            f1: mean(|r| r.f1),
        },
        micro: precision_recall_f1(counts.aggregate()),
    };

    let mut loc: BTreeMap<DarkPatternCategory, IouSums> = BTreeMap::new();
    for r in results {
        for (c, s) in localization_scores(&r.findings, &r.labels) {
            loc.entry(c).or_default().add(s);
        }
    }
    let mut overall = IouSums::default();
    for s in loc.values() {
        overall.add(*s);
    }
    let localization = loc
        .into_iter()
        .filter(|(_, s)| s.pairs > 0)
        .map(|(c, s)| localization_row(c, s))
        .collect();

    let non_dp_screens = results.iter().filter(|r| r.labels.is_empty()).count();
    let flagged = results
        .iter()
        .filter(|r| r.labels.is_empty() && !r.findings.is_empty())
        .count();

    EvaluationReport {
        ablation: ablation.to_string(),
        screens: results.len(),
        failed_entries: failures.len(),
        failures,
        categories,
        averages,
        non_dp: CategoryRow::new(DarkPatternCategory::NonDp, counts.get(DarkPatternCategory::NonDp)),
        localization,
        overall_localization: (overall.pairs > 0).then(|| localization_row(DarkPatternCategory::NonDp, overall)),
        non_dp_screens,
        false_positive_screen_rate: ratio(flagged as f64, non_dp_screens as f64),
    }
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text tables: detection per category, then localization.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "Ablation: {}", self.ablation);
        let _ = writeln!(
            s,
            "Screens: {} evaluated, {} failed, {} non-DP",
            self.screens, self.failed_entries, self.non_dp_screens
        );
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:<24} {:>9} {:>5} {:>5} {:>5} {:>9} {:>7} {:>8}",
            "DP Category", "Instances", "TP", "FP", "FN", "Precision", "Recall", "F1-score"
        );
        let row = |s: &mut String, r: &CategoryRow| {
            let _ = writeln!(
                s,
                "{:<24} {:>9} {:>5} {:>5} {:>5} {:>9.2} {:>7.2} {:>8.2}",
                r.category.title(),
                r.instances,
                r.tp,
                r.fp,
                r.fn_,
                r.precision,
                r.recall,
                r.f1
            );
        };
        for r in &self.categories {
            row(&mut s, r);
        }
        let _ = writeln!(s, "{}", "-".repeat(78));
        let a = &self.averages;
        let _ = writeln!(s, "{:<24} {:>9}", "Total Instances", a.total_instances);
        let _ = writeln!(s, "{:<24} {:>33.2}", "Avg. Precision", a.weighted.precision);
        let _ = writeln!(s, "{:<24} {:>41.2}", "Avg. Recall", a.weighted.recall);
        let _ = writeln!(s, "{:<24} {:>50.2}", "Avg. F1-score", a.weighted.f1);
        row(&mut s, &self.non_dp);
        let _ = writeln!(s, "False-positive screen rate: {:.2}", self.false_positive_screen_rate);
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:<24} {:>6} {:>12} {:>15}",
            "Localization", "Pairs", "Strict IoU", "Contained IoU"
        );
        for r in self.localization.iter().chain(&self.overall_localization) {
            let name = if r.category.is_dark_pattern() {
                r.category.title()
            } else {
                "Overall"
            };
            let _ = writeln!(
                s,
                "{:<24} {:>6} {:>12.2} {:>15.2}",
                name, r.pairs, r.avg_strict_iou, r.avg_contained_iou
            );
        }
        for f in &self.failures {
            let _ = writeln!(s, "failed: {f}");
        }
        s
    }
}

/// Rules, relevance and thresholds shared by every screen.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub rules: RuleSet,
    pub relevance: RelevanceTable,
    pub config: ResolutionConfig,
}

impl Default for Pipeline {
    /// Built-in rules with default thresholds.
    fn default() -> Self {
        Pipeline::new(RuleSet::builtin(), ResolutionConfig::default())
    }
}

impl Pipeline {
    pub fn new(rules: RuleSet, config: ResolutionConfig) -> Self {
        Pipeline {
            rules,
            relevance: RelevanceTable::default(),
            config,
        }
    }
}

/// A dataset entry with its files read.
#[derive(Clone, Debug)]
pub struct LoadedEntry {
    pub id: String,
    pub screen: UiScreenshot,
    pub segments: Vec<Segment>,
    pub icons: Vec<IconDetection>,
    pub labels: Vec<GroundTruthLabel>,
}

pub fn load_entry(entry: &DatasetEntry) -> Result<LoadedEntry> {
    let mut screen = UiScreenshot::load(&entry.screenshot, entry.domain)?;
    screen.id = entry.id.clone();
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
    let segments = read_segment_sidecar(&read(&entry.segments)?, screen.width(), screen.height())?.segments;
    let icons = match &entry.icons {
        Some(p) => ingest_external_detections(&read(p)?, screen.width(), screen.height())?.1,
        None => Vec::new(),
    };
    Ok(LoadedEntry {
        id: entry.id.clone(),
        screen,
        segments,
        icons,
        labels: entry.labels.clone(),
    })
}

/// Loads every entry; failures are returned as messages, in manifest order.
pub fn load_entries(entries: &[DatasetEntry], exec: Execution) -> (Vec<LoadedEntry>, Vec<String>) {
    let mut loaded = Vec::new();
    let mut failures = Vec::new();
    for (entry, result) in entries.iter().zip(par::map(exec, entries, load_entry)) {
        match result {
            Ok(l) => loaded.push(l),
            Err(e) => failures.push(format!("{}: {e}", entry.id)),
        }
    }
    (loaded, failures)
}

/// Runs detection on loaded entries. Any detection error is reported as a
/// failure for that entry.
pub fn run_entries(
    loaded: &[LoadedEntry],
    pipeline: &Pipeline,
    ablation: Ablation,
    exec: Execution,
) -> (Vec<ScreenResult>, Vec<String>) {
    let outputs = par::map(exec, loaded, |e| {
        detect(
            &e.screen,
            &e.segments,
            &e.icons,
            &pipeline.rules,
            &pipeline.relevance,
            &pipeline.config,
            ablation,
        )
    });
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (entry, out) in loaded.iter().zip(outputs) {
        match out {
            Ok(findings) => results.push(ScreenResult {
                id: entry.id.clone(),
                findings,
                labels: entry.labels.clone(),
            }),
            Err(e) => failures.push(format!("{}: {e}", entry.id)),
        }
    }
    (results, failures)
}

/// Evaluates a dataset under one ablation.
pub fn evaluate_dataset(
    entries: &[DatasetEntry],
    pipeline: &Pipeline,
    ablation: Ablation,
    exec: Execution,
) -> EvaluationReport {
    evaluate_ablations(entries, pipeline, &[ablation], exec).remove(0)
}

/// Evaluates a dataset under several ablations, reading each file once.
pub fn evaluate_ablations(
    entries: &[DatasetEntry],
    pipeline: &Pipeline,
    ablations: &[Ablation],
    exec: Execution,
) -> Vec<EvaluationReport> {
    let (loaded, load_failures) = load_entries(entries, exec);
    ablations
        .iter()
        .map(|&a| {
            let (results, run_failures) = run_entries(&loaded, pipeline, a, exec);
            let mut failures = load_failures.clone();
            failures.extend(run_failures);
            build_report(a.tag(), &results, failures)
        })
        .collect()
}
