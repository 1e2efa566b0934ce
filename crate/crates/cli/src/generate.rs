use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use dpscan::par::with_jobs;
use dpscan::synthetic::{ui_background, write_icon_templates};
use dpscan::{generate_dataset, Execution, SynthConfig};

use crate::output::warn;

#[derive(clap::Args)]
pub struct Args {
    /// Directory of background screenshots.
    #[arg(long)]
    pub backgrounds: PathBuf,
    /// Directory of RGBA icon templates named `<class>_<variant>.png`.
    #[arg(long)]
    pub templates: PathBuf,
    /// Output dataset directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Share of composites placed in the training split.
    #[arg(long, default_value_t = 0.8)]
    pub split: f64,
    #[arg(long, default_value_t = 0.5)]
    pub min_scale: f64,
    #[arg(long, default_value_t = 2.0)]
    pub max_scale: f64,
    /// Worker threads (1 runs sequentially).
    #[arg(long)]
    pub jobs: Option<usize>,
}

pub fn run(args: Args) -> Result<()> {
    let exec = execution(args.jobs)?;
    let cfg = SynthConfig {
        min_scale: args.min_scale,
        max_scale: args.max_scale,
        split_ratio: args.split,
    };
    let manifest = with_jobs(args.jobs, || {
        generate_dataset(&args.backgrounds, &args.templates, &args.out, args.seed, &cfg, exec)
    })?;
    warn(&manifest.diagnostics);
    eprintln!("wrote {} composites to {}", manifest.entries.len(), args.out.display());
    Ok(())
}

#[derive(clap::Args)]
pub struct AssetArgs {
    /// Output directory; gets `templates/` and `backgrounds/`.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of procedural backgrounds.
    #[arg(long, default_value_t = 4)]
    pub backgrounds: u32,
    #[arg(long, default_value_t = 360)]
    pub width: u32,
    #[arg(long, default_value_t = 640)]
    pub height: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run_assets(args: AssetArgs) -> Result<()> {
    if args.width == 0 || args.height == 0 {
        bail!("background size must be positive");
    }
    write_icon_templates(&args.out.join("templates"))?;
    let dir = args.out.join("backgrounds");
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    for i in 0..args.backgrounds {
        let path = dir.join(format!("ui_{i:03}.png"));
        ui_background(args.seed.wrapping_add(u64::from(i)), args.width, args.height)
            .save(&path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn execution(jobs: Option<usize>) -> Result<Execution> {
    Ok(match jobs {
        Some(0) => bail!("--jobs must be at least 1"),
        Some(1) => Execution::Sequential,
        _ => Execution::Parallel,
    })
}
