//! Dark pattern detection for single UI screenshots.
//!
//! The pipeline reads text segments for a screen ([`ingest`]), optionally
//! detects icons ([`icons`]), analyses each segment's wording, brightness and
//! neighbourhood ([`analysis`]), and resolves the evidence into at most a
//! couple of findings ([`resolution`]). [`evaluation`] scores findings
//! against labelled datasets, and [`synth`] builds icon-detection training
//! sets by compositing icons onto UI backgrounds.
//!
//! ```
//! use dpscan::{detect, Ablation, BoundingBox, RelevanceTable, ResolutionConfig, RuleSet, Segment, UiScreenshot};
//!
//! let screen = UiScreenshot::uniform("shop", 320, 200, [255, 255, 255]).unwrap();
//! let segments = [Segment::new("0", BoundingBox::new(10, 10, 120, 16).unwrap(), "Only 2 available")];
//! let findings = detect(
//!     &screen,
//!     &segments,
//!     &[],
//!     &RuleSet::builtin(),
//!     &RelevanceTable::default(),
//!     &ResolutionConfig::default(),
//!     Ablation::FULL,
//! )
//! .unwrap();
//! assert_eq!(findings[0].category.name(), "low_stock_message");
//! ```

pub mod analysis;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod icons;
pub mod ingest;
pub mod model;
pub mod par;
pub mod raster;
pub mod resolution;
pub mod settings;
pub mod synth;
pub mod synthetic;

pub use analysis::{BrightnessClass, RuleSet, TextMatch};
pub use error::{Error, Result};
pub use evaluation::{evaluate_ablations, evaluate_dataset, load_manifest, EvaluationReport, Pipeline};
pub use geometry::BoundingBox;
pub use icons::{detect_icons_template, map_icons_to_dps, DetectorConfig, IconClass, IconDetection, IconTemplate};
pub use ingest::{read_segment_sidecar, run_ocr_backend};
pub use model::{DarkPatternCategory, Domain, GroundTruthLabel, Segment, UiScreenshot};
pub use par::Execution;
pub use resolution::{detect, Ablation, DpFinding, FindingsDocument, RelevanceTable, ResolutionConfig};
pub use settings::Settings;
pub use synth::{generate_dataset, SynthConfig};
