#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use image::{Rgb, RgbImage};
use serde_json::json;

pub const WHITE: [u8; 3] = [255, 255, 255];

pub fn dpscan() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dpscan"))
}

pub fn run(args: &[&str]) -> Output {
    dpscan().args(args).output().expect("spawn dpscan")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

/// Writes a `w`x`h` PNG filled with `bg`, then paints each rectangle.
pub fn write_screen(dir: &Path, id: &str, w: u32, h: u32, bg: [u8; 3], fills: &[([u32; 4], [u8; 3])]) -> PathBuf {
    let mut img = RgbImage::from_pixel(w, h, Rgb(bg));
    for &([l, t, bw, bh], px) in fills {
        for y in t..t + bh {
            for x in l..l + bw {
                img.put_pixel(x, y, Rgb(px));
            }
        }
    }
    let path = dir.join(format!("{id}.png"));
    img.save(&path).unwrap();
    path
}

pub fn segments_json(id: &str, w: u32, h: u32, segs: &[(&str, [u32; 4], &str)]) -> String {
    let segments: Vec<_> = segs
        .iter()
        .map(|(sid, b, text)| json!({"id": sid, "box": b, "text": text}))
        .collect();
    json!({"screenshot_id": id, "width": w, "height": h, "segments": segments}).to_string()
}

pub fn write_segments(dir: &Path, id: &str, w: u32, h: u32, segs: &[(&str, [u32; 4], &str)]) -> PathBuf {
    let path = dir.join(format!("{id}.segments.json"));
    std::fs::write(&path, segments_json(id, w, h, segs)).unwrap();
    path
}

pub fn manifest_line(id: &str, labels: &[(&str, [u32; 4])]) -> String {
    let labels: Vec<_> = labels.iter().map(|(c, b)| json!({"category": c, "box": b})).collect();
    json!({
        "id": id,
        "screenshot": format!("{id}.png"),
        "segments": format!("{id}.segments.json"),
        "labels": labels,
    })
    .to_string()
}

pub const TOP: [u32; 4] = [20, 20, 200, 20];
pub const BOTTOM: [u32; 4] = [20, 200, 200, 20];

/// One screen of the metrics fixture: segment texts and ground-truth labels.
pub struct MetricScreen {
    pub texts: &'static [&'static str],
    pub labels: &'static [&'static str],
}

const NAG: &str = "Watch ad to continue";
const LOW: &str = "Only 3 in stock";
const HIGH: &str = "Selling fast";
const ACT: &str = "25 people bought this";
const SALE: &str = "Sale ends tonight";
const GAME: &str = "Earn 50 points";
const PLAIN: &str = "Add to cart";

/// Twenty white 400x300 screens, each with one or two far-apart segments.
/// Segments sit at `TOP` and `BOTTOM`; labels share the box of the first
/// segment.
pub const METRIC_SCREENS: [MetricScreen; 20] = [
    MetricScreen {
        texts: &[NAG],
        labels: &["nagging"],
    },
    MetricScreen {
        texts: &[LOW],
        labels: &["low_stock_message"],
    },
    MetricScreen {
        texts: &[HIGH],
        labels: &["high_demand_message"],
    },
    MetricScreen {
        texts: &[ACT],
        labels: &["activity_message"],
    },
    MetricScreen {
        texts: &[SALE],
        labels: &["countdown_timer", "limited_time_message"],
    },
    MetricScreen {
        texts: &[GAME],
        labels: &["gamification"],
    },
    MetricScreen {
        texts: &[SALE],
        labels: &["countdown_timer"],
    },
    MetricScreen {
        texts: &[NAG],
        labels: &[],
    },
    MetricScreen {
        texts: &[PLAIN],
        labels: &[],
    },
    MetricScreen {
        texts: &[PLAIN],
        labels: &[],
    },
    MetricScreen {
        texts: &[PLAIN],
        labels: &["low_stock_message"],
    },
    MetricScreen {
        texts: &["I agree to the terms"],
        labels: &["default_choice"],
    },
    MetricScreen {
        texts: &[LOW, HIGH],
        labels: &["low_stock_message", "high_demand_message"],
    },
    MetricScreen {
        texts: &[LOW],
        labels: &["low_stock_message", "high_demand_message"],
    },
    MetricScreen {
        texts: &[GAME],
        labels: &["nagging"],
    },
    MetricScreen {
        texts: &[ACT],
        labels: &["activity_message"],
    },
    MetricScreen {
        texts: &[PLAIN],
        labels: &[],
    },
    MetricScreen {
        texts: &[NAG, GAME],
        labels: &["nagging"],
    },
    MetricScreen {
        texts: &[SALE],
        labels: &["limited_time_message"],
    },
    MetricScreen {
        texts: &[HIGH],
        labels: &[],
    },
];

/// Writes the metrics fixture into `dir` and returns the manifest path.
pub fn write_metric_fixture(dir: &Path) -> PathBuf {
    let mut manifest = String::new();
    for (i, screen) in METRIC_SCREENS.iter().enumerate() {
        let id = format!("m{:02}", i + 1);
        write_screen(dir, &id, 400, 300, WHITE, &[]);
        let ids = ["a", "b"];
        let boxes = [TOP, BOTTOM];
        let segs: Vec<_> = screen
            .texts
            .iter()
            .enumerate()
            .map(|(k, t)| (ids[k], boxes[k], *t))
            .collect();
        write_segments(dir, &id, 400, 300, &segs);
        let labels: Vec<_> = screen.labels.iter().map(|c| (*c, TOP)).collect();
        manifest.push_str(&manifest_line(&id, &labels));
        manifest.push('\n');
    }
    let path = dir.join("manifest.jsonl");
    std::fs::write(&path, manifest).unwrap();
    path
}

/// Large bright affirmative button with a small dark decline link right
/// under it. Returns (screenshot, segments sidecar, label box).
pub fn write_attention_fixture(dir: &Path) -> (PathBuf, PathBuf, [u32; 4]) {
    let (w, h) = (360, 640);
    let yes = [40, 400, 280, 48];
    let no = [110, 448, 140, 14];
    let screen = write_screen(
        dir,
        "attention",
        w,
        h,
        [236, 236, 236],
        &[
            ([20, 80, 320, 200], [200, 210, 230]),
            (yes, [255, 200, 0]),
            (no, [40, 40, 40]),
        ],
    );
    let segments = write_segments(
        dir,
        "attention",
        w,
        h,
        &[
            ("title", [40, 40, 200, 24], "Premium membership"),
            ("body", [40, 300, 280, 20], "Unlimited streaming for one low price"),
            ("yes", yes, "Yes, give me the deal"),
            ("no", no, "No, I don't want to save money"),
        ],
    );
    (screen, segments, [106, 446, 148, 18])
}
