//! Sequential vs parallel execution for the three data-parallel stages.

use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dpscan::icons::DetectorConfig;
use dpscan::ingest::segments_to_json;
use dpscan::synth::synthesize_screen;
use dpscan::synthetic::{icon_templates, ui_background, write_icon_templates};
use dpscan::{
    detect_icons_template, evaluate_dataset, generate_dataset, load_manifest, Ablation, BoundingBox, Domain, Execution,
    Pipeline, Segment, SynthConfig, UiScreenshot,
};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn detection(c: &mut Criterion) {
    let templates = icon_templates();
    let background = UiScreenshot::new("bg", ui_background(1, 240, 320), Domain::Mobile).unwrap();
    let (screen, _) = synthesize_screen(&background, &templates[0], 4, &SynthConfig::default()).unwrap();
    let cfg = DetectorConfig::default();
    let mut group = c.benchmark_group("detection");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| detect_icons_template(&screen, &templates, &cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn write_eval_fixture(dir: &Path, screens: usize) {
    let texts = [
        "Only 3 in stock",
        "Sale ends tonight",
        "Watch ad to continue",
        "Add to cart",
    ];
    let mut manifest = String::new();
    for i in 0..screens {
        let id = format!("s{i:03}");
        ui_background(i as u64, 360, 640)
            .save(dir.join(format!("{id}.png")))
            .unwrap();
        let segments: Vec<Segment> = (0..4)
            .map(|k| {
                let b = BoundingBox::new(20, 60 + 120 * k as u32, 240, 24).unwrap();
                Segment::new(k.to_string(), b, texts[(i + k) % texts.len()])
            })
            .collect();
        std::fs::write(
            dir.join(format!("{id}.segments.json")),
            segments_to_json(&id, 360, 640, &segments),
        )
        .unwrap();
        manifest.push_str(&format!(
            r#"{{"id":"{id}","screenshot":"{id}.png","segments":"{id}.segments.json","labels":[{{"category":"low_stock_message","box":[20,60,240,24]}}]}}"#
        ));
        manifest.push('\n');
    }
    std::fs::write(dir.join("manifest.jsonl"), manifest).unwrap();
}

fn evaluation(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    write_eval_fixture(dir.path(), 32);
    let entries = load_manifest(&dir.path().join("manifest.jsonl")).unwrap();
    let pipeline = Pipeline::default();
    let mut group = c.benchmark_group("evaluation");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| evaluate_dataset(&entries, &pipeline, Ablation::FULL, exec))
        });
    }
    group.finish();
}

fn generation(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    let (bg, tpl) = (dir.path().join("bg"), dir.path().join("tpl"));
    std::fs::create_dir_all(&bg).unwrap();
    write_icon_templates(&tpl).unwrap();
    for i in 0..4u64 {
        ui_background(i, 240, 320).save(bg.join(format!("bg{i}.png"))).unwrap();
    }
    let mut group = c.benchmark_group("generation");
    group.sample_size(10);
    for (name, exec) in MODES {
        let out = dir.path().join(name);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| generate_dataset(&bg, &tpl, &out, 7, &SynthConfig::default(), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, detection, evaluation, generation);
criterion_main!(benches);
