use std::path::PathBuf;

use anyhow::{Context, Result};
use dpscan::icons::{detect_icons_template, ingest_external_detections, load_template_dir};
use dpscan::ingest::{read_segment_sidecar, run_ocr_backend};
use dpscan::par::with_jobs;
use dpscan::{detect, Ablation, Domain, FindingsDocument, RelevanceTable, UiScreenshot};

use crate::output::{emit, load_rules, load_settings, warn, Overrides};

#[derive(clap::Args)]
#[command(group(clap::ArgGroup::new("text").required(true).args(["segments", "ocr_backend"])))]
pub struct Args {
    /// PNG or JPEG screenshot.
    pub screenshot: PathBuf,
    /// Segment sidecar (JSON).
    #[arg(long)]
    pub segments: Option<PathBuf>,
    /// OCR command; run as `<command> <screenshot>` and expected to print a segment sidecar.
    #[arg(long)]
    pub ocr_backend: Option<String>,
    /// Icon detection sidecar (JSON).
    #[arg(long, conflicts_with = "templates")]
    pub icon_detections: Option<PathBuf>,
    /// Directory of icon template PNGs for the built-in matcher.
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// Lexical rule file (defaults to the built-in rules).
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// TOML settings file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Skip brightness contrast.
    #[arg(long)]
    pub disable_color: bool,
    /// Skip relative size differences.
    #[arg(long)]
    pub disable_spatial: bool,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Worker threads for template matching (1 runs sequentially).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write the findings document here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    let mut settings = load_settings(args.config.as_ref())?;
    args.overrides.apply(&mut settings.resolution)?;
    let rules = load_rules(args.rules.as_ref())?;
    let screen = UiScreenshot::load(&args.screenshot, Domain::Unknown)?;
    let (w, h) = (screen.width(), screen.height());

    let ingested = match (&args.segments, &args.ocr_backend) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            read_segment_sidecar(&text, w, h).with_context(|| format!("in {}", path.display()))?
        }
        (None, Some(command)) => run_ocr_backend(&args.screenshot, w, h, command)?,
        (None, None) => unreachable!("clap requires one segment source"),
    };
    warn(&ingested.diagnostics);

    let icons = if let Some(path) = &args.icon_detections {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        ingest_external_detections(&text, w, h)
            .with_context(|| format!("in {}", path.display()))?
            .1
    } else if let Some(dir) = &args.templates {
        let (templates, diagnostics) = load_template_dir(dir)?;
        warn(&diagnostics);
        let exec = crate::generate::execution(args.jobs)?;
        let out = with_jobs(args.jobs, || {
            detect_icons_template(&screen, &templates, &settings.detector, exec)
        })?;
        warn(&out.diagnostics);
        out.detections
    } else {
        Vec::new()
    };

    let ablation = Ablation {
        color: !args.disable_color,
        spatial: !args.disable_spatial,
    };
    let findings = detect(
        &screen,
        &ingested.segments,
        &icons,
        &rules,
        &RelevanceTable::default(),
        &settings.resolution,
        ablation,
    )?;
    let doc = FindingsDocument {
        screenshot_id: screen.id.clone(),
        findings,
    };
    emit(&(doc.to_json() + "\n"), args.out.as_deref())
}
