use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use dpscan::raster::{draw_text, fill_rect, rgb, stroke_rect, text_height, text_width};
use dpscan::{BoundingBox, FindingsDocument};

#[derive(clap::Args)]
pub struct Args {
    pub screenshot: PathBuf,
    /// Findings document produced by `detect`.
    pub findings: PathBuf,
    /// Output PNG (defaults to `<stem>.annotated.png` next to the screenshot).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const PALETTE: [[u8; 3]; 4] = [[230, 25, 75], [0, 130, 200], [245, 130, 48], [60, 180, 75]];

pub fn run(args: Args) -> Result<()> {
    let stem = args
        .screenshot
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let text =
        std::fs::read_to_string(&args.findings).with_context(|| format!("reading {}", args.findings.display()))?;
    let doc = FindingsDocument::parse(&text).with_context(|| format!("in {}", args.findings.display()))?;
    if doc.screenshot_id != stem {
        bail!("findings are for screenshot {:?}, not {:?}", doc.screenshot_id, stem);
    }
    let mut img = image::open(&args.screenshot)
        .with_context(|| format!("reading {}", args.screenshot.display()))?
        .to_rgb8();
    let (w, h) = img.dimensions();

    for (i, finding) in doc.findings.iter().enumerate() {
        let color = rgb(PALETTE[i % 4][0], PALETTE[i % 4][1], PALETTE[i % 4][2]);
        let label = format!("{} {:.2}", finding.category.name(), finding.fused_score).to_uppercase();
        for b in &finding.boxes {
            if b.right() > w || b.bottom() > h {
                bail!("box {b:?} lies outside the {w}x{h} screenshot");
            }
            stroke_rect(&mut img, *b, 2, color);
            let lh = text_height(1) + 2;
            let lw = (text_width(&label, 1) + 2).min(w - b.left());
            let ly = if b.top() >= lh {
                b.top() - lh
            } else {
                b.bottom().min(h - lh.min(h))
            };
            if let Ok(bg) = BoundingBox::new(b.left(), ly, lw, lh.min(h - ly)) {
                fill_rect(&mut img, bg, color);
                draw_text(
                    &mut img,
                    i64::from(b.left()) + 1,
                    i64::from(ly) + 1,
                    1,
                    &label,
                    rgb(255, 255, 255),
                );
            }
        }
    }

    let out = args
        .out
        .unwrap_or_else(|| args.screenshot.with_file_name(format!("{stem}.annotated.png")));
    img.save(&out).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}
