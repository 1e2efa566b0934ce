use std::path::PathBuf;

use anyhow::Result;
use clap::ValueEnum;
use dpscan::par::with_jobs;
use dpscan::{evaluate_ablations, load_manifest, Ablation, Pipeline};

use crate::output::{emit, load_rules, load_settings, warn, Overrides};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AblationArg {
    Full,
    Text,
    #[value(name = "text+color")]
    TextColor,
    #[value(name = "text+spatial")]
    TextSpatial,
    All,
}

impl AblationArg {
    fn expand(self) -> Vec<Ablation> {
        match self {
            AblationArg::Full => vec![Ablation::FULL],
            AblationArg::Text => vec![Ablation::TEXT],
            AblationArg::TextColor => vec![Ablation::TEXT_COLOR],
            AblationArg::TextSpatial => vec![Ablation::TEXT_SPATIAL],
            AblationArg::All => Ablation::ALL.to_vec(),
        }
    }
}

#[derive(clap::Args)]
pub struct Args {
    /// Dataset manifest (JSON lines).
    pub manifest: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Analyses to enable; `all` runs the four combinations.
    #[arg(long, value_enum, default_value = "full")]
    pub ablation: AblationArg,
    /// Worker threads (1 runs sequentially).
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    let mut settings = load_settings(args.config.as_ref())?;
    args.overrides.apply(&mut settings.resolution)?;
    let pipeline = Pipeline::new(load_rules(args.rules.as_ref())?, settings.resolution);
    let entries = load_manifest(&args.manifest)?;
    let exec = crate::generate::execution(args.jobs)?;
    let ablations = args.ablation.expand();
    let reports = with_jobs(args.jobs, || evaluate_ablations(&entries, &pipeline, &ablations, exec));
    for r in reports.iter().take(1) {
        warn(&r.failures);
    }

    let text = match args.format {
        Format::Json if reports.len() == 1 => reports[0].to_json() + "\n",
        Format::Json => serde_json::to_string_pretty(&reports)? + "\n",
        Format::Table => reports.iter().map(|r| r.to_table()).collect::<Vec<_>>().join("\n"),
    };
    emit(&text, args.out.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_expands_to_four_combinations() {
        let tags: Vec<_> = AblationArg::All.expand().iter().map(|a| a.tag()).collect();
        assert_eq!(tags, ["text", "text+color", "text+spatial", "text+color+spatial"]);
        assert_eq!(AblationArg::Full.expand(), [Ablation::FULL]);
    }
}
