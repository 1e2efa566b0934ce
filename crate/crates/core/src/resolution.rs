//! Segment-level voting and screen-level fusion.
//!
//! Each segment with a lexical match for a category is scored on four
//! features: its own match, a same-category match on a neighbour, a
//! brightness contrast with a neighbour, and a relative size gap with a
//! neighbour. The score is the share of relevant features present. At screen
//! level the best segment per category is blended with the icon evidence and
//! the strongest categories are reported.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{analyze_segments, RuleSet, SegmentEvidence};
use crate::error::{decode_json, Error, Result};
use crate::geometry::BoundingBox;
use crate::icons::{map_icons_to_dps, IconDetection, IconDpCandidate};
use crate::model::{DarkPatternCategory, Segment, UiScreenshot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    OwnText,
    NeighborText,
    Contrast,
    SizeDiff,
}

impl Feature {
    pub const ALL: [Feature; 4] = [
        Feature::OwnText,
        Feature::NeighborText,
        Feature::Contrast,
        Feature::SizeDiff,
    ];
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FeatureVector {
    pub own_text: bool,
    pub neighbor_text: bool,
    pub contrast: bool,
    pub size_diff: bool,
}

impl FeatureVector {
    pub fn get(&self, feature: Feature) -> bool {
        match feature {
            Feature::OwnText => self.own_text,
            Feature::NeighborText => self.neighbor_text,
            Feature::Contrast => self.contrast,
            Feature::SizeDiff => self.size_diff,
        }
    }
}

/// Which features count toward each category's score.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelevanceTable {
    table: BTreeMap<DarkPatternCategory, Vec<Feature>>,
}

impl Default for RelevanceTable {
    /// Brightness and size only matter for attention distraction and default
    /// choice; every other category is judged on text alone.
    fn default() -> Self {
        use DarkPatternCategory::*;
        let table = DarkPatternCategory::ALL
            .into_iter()
            .map(|c| {
                let features = match c {
                    AttentionDistraction | DefaultChoice => Feature::ALL.to_vec(),
                    _ => vec![Feature::OwnText, Feature::NeighborText],
                };
                (c, features)
            })
            .collect();
        RelevanceTable { table }
    }
}

impl RelevanceTable {
    pub fn new(table: BTreeMap<DarkPatternCategory, Vec<Feature>>) -> Result<Self> {
        for c in DarkPatternCategory::ALL {
            let features = table
                .get(&c)
                .ok_or_else(|| Error::Config(format!("relevance table has no entry for {c}")))?;
            if !features.contains(&Feature::OwnText) {
                return Err(Error::Config(format!("relevance for {c} must include own_text")));
            }
        }
        if table.contains_key(&DarkPatternCategory::NonDp) {
            return Err(Error::Config("relevance table cannot list non_dp".into()));
        }
        let table = table
            .into_iter()
            .map(|(c, mut f)| {
                f.sort();
                f.dedup();
                (c, f)
            })
            .collect();
        Ok(RelevanceTable { table })
    }

    pub fn relevant(&self, category: DarkPatternCategory) -> &[Feature] {
        self.table.get(&category).map_or(&[], Vec::as_slice)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResolutionConfig {
    pub proximity_factor: f64,
    pub size_diff_threshold: f64,
    pub brightness_share: f64,
    pub segment_weight: f64,
    pub icon_weight: f64,
    pub confidence_threshold: f64,
    pub max_findings: usize,
}

impl Default for ResolutionConfig {
    fn default() -> Self {
        ResolutionConfig {
            proximity_factor: 0.05,
            size_diff_threshold: 0.25,
            brightness_share: 0.65,
            segment_weight: 0.8,
            icon_weight: 0.2,
            confidence_threshold: 0.4,
            max_findings: 2,
        }
    }
}

impl ResolutionConfig {
    /// Reads a TOML file; missing keys keep their defaults.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ResolutionConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be in (0, 1), got {v}")))
            }
        };
        open_unit("size_diff_threshold", self.size_diff_threshold)?;
        open_unit("brightness_share", self.brightness_share)?;
        open_unit("confidence_threshold", self.confidence_threshold)?;
        if !(self.proximity_factor.is_finite() && self.proximity_factor > 0.0) {
            return Err(Error::Config(format!(
                "proximity_factor must be positive, got {}",
                self.proximity_factor
            )));
        }
        let weights_ok = (0.0..=1.0).contains(&self.segment_weight)
            && (0.0..=1.0).contains(&self.icon_weight)
            && (self.segment_weight + self.icon_weight - 1.0).abs() < 1e-9;
        if !weights_ok {
            return Err(Error::Config(format!(
                "segment_weight and icon_weight must be in [0, 1] and sum to 1, got {} and {}",
                self.segment_weight, self.icon_weight
            )));
        }
        if self.max_findings == 0 {
            return Err(Error::Config("max_findings must be at least 1".into()));
        }
        Ok(())
    }

    /// `segment_weight * segment + icon_weight * icon`, written as an
    /// interpolation so the result stays inside `[segment, icon]`.
    pub fn fuse(&self, segment: f64, icon: f64) -> f64 {
        segment + self.icon_weight * (icon - segment)
    }
}

/// Which optional analyses are enabled. Text analysis is always on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ablation {
    pub color: bool,
    pub spatial: bool,
}

impl Default for Ablation {
    fn default() -> Self {
        Ablation::FULL
    }
}

impl Ablation {
    pub const TEXT: Ablation = Ablation {
        color: false,
        spatial: false,
    };
    pub const TEXT_COLOR: Ablation = Ablation {
        color: true,
        spatial: false,
    };
    pub const TEXT_SPATIAL: Ablation = Ablation {
        color: false,
        spatial: true,
    };
    pub const FULL: Ablation = Ablation {
        color: true,
        spatial: true,
    };
    pub const ALL: [Ablation; 4] = [
        Ablation::TEXT,
        Ablation::TEXT_COLOR,
        Ablation::TEXT_SPATIAL,
        Ablation::FULL,
    ];

    pub fn tag(self) -> &'static str {
        match (self.color, self.spatial) {
            (false, false) => "text",
            (true, false) => "text+color",
            (false, true) => "text+spatial",
            (true, true) => "text+color+spatial",
        }
    }
}

impl fmt::Display for Ablation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Ablation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "text" => Ok(Ablation::TEXT),
            "text+color" => Ok(Ablation::TEXT_COLOR),
            "text+spatial" => Ok(Ablation::TEXT_SPATIAL),
            "full" | "text+color+spatial" => Ok(Ablation::FULL),
            other => Err(Error::Config(format!("unknown ablation `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CategoryVerdict {
    pub votes: u32,
    pub score: f64,
    pub features: FeatureVector,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SegmentVerdict {
    pub segment_id: String,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub per_category: BTreeMap<DarkPatternCategory, CategoryVerdict>,
}

/// Scores one segment against its own neighbours.
pub fn segment_votes(
    segment: &SegmentEvidence,
    neighbors: &[&SegmentEvidence],
    relevance: &RelevanceTable,
    cfg: &ResolutionConfig,
    ablation: Ablation,
) -> SegmentVerdict {
    let contrast = ablation.color && neighbors.iter().any(|n| segment.brightness.is_opposite(n.brightness));
    let size_diff = ablation.spatial
        && neighbors.iter().any(|n| {
            (segment.profile.rel_width - n.profile.rel_width).abs() > cfg.size_diff_threshold
                || (segment.profile.rel_height - n.profile.rel_height).abs() > cfg.size_diff_threshold
        });
    let per_category = segment
        .matches
        .keys()
        .map(|&category| {
            let features = FeatureVector {
                own_text: true,
                neighbor_text: neighbors.iter().any(|n| n.matches.contains_key(&category)),
                contrast,
                size_diff,
            };
            let relevant = relevance.relevant(category);
            let votes = relevant.iter().filter(|&&f| features.get(f)).count() as u32;
            let score = if relevant.is_empty() {
                0.0
            } else {
                f64::from(votes) / relevant.len() as f64
            };
            (category, CategoryVerdict { votes, score, features })
        })
        .collect();
    SegmentVerdict {
        segment_id: segment.segment_id.clone(),
        bbox: segment.bbox,
        per_category,
    }
}

/// Verdicts for every segment of a screen.
pub fn screen_verdicts(
    evidence: &[SegmentEvidence],
    relevance: &RelevanceTable,
    cfg: &ResolutionConfig,
    ablation: Ablation,
) -> Vec<SegmentVerdict> {
    evidence
        .iter()
        .map(|e| {
            let neighbors: Vec<&SegmentEvidence> = e.neighbors.iter().map(|&j| &evidence[j]).collect();
            segment_votes(e, &neighbors, relevance, cfg, ablation)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpFinding {
    pub category: DarkPatternCategory,
    pub fused_score: f64,
    pub votes: u32,
    pub boxes: Vec<BoundingBox>,
}

/// Picks the best segment per category, blends in icon evidence, and keeps
/// the strongest categories. Icon candidates without a supporting segment
/// are ignored.
pub fn resolve_ui(
    verdicts: &[SegmentVerdict],
    icon_candidates: &[IconDpCandidate],
    cfg: &ResolutionConfig,
) -> Vec<DpFinding> {
    let mut best: BTreeMap<DarkPatternCategory, (&SegmentVerdict, &CategoryVerdict)> = BTreeMap::new();
    for verdict in verdicts {
        for (&category, cv) in &verdict.per_category {
            let replace = match best.get(&category) {
                None => true,
                Some((sv, cur)) => cv
                    .score
                    .total_cmp(&cur.score)
                    .then(cv.votes.cmp(&cur.votes))
                    .then(sv.segment_id.cmp(&verdict.segment_id))
                    .is_gt(),
            };
            if replace {
                best.insert(category, (verdict, cv));
            }
        }
    }

    let mut icons: BTreeMap<DarkPatternCategory, &IconDpCandidate> = BTreeMap::new();
    for c in icon_candidates {
        let keep = icons.get(&c.category).is_none_or(|cur| c.confidence > cur.confidence);
        if keep {
            icons.insert(c.category, c);
        }
    }

    let mut findings: Vec<DpFinding> = best
        .into_iter()
        .map(|(category, (sv, cv))| {
            let mut boxes = vec![sv.bbox];
            let fused_score = match icons.get(&category) {
                Some(icon) => {
                    boxes.push(icon.bbox);
                    cfg.fuse(cv.score, icon.confidence)
                }
                None => cv.score,
            };
            DpFinding {
                category,
                fused_score,
                votes: cv.votes,
                boxes,
            }
        })
        .filter(|f| f.fused_score >= cfg.confidence_threshold)
        .collect();
    findings.sort_by(|a, b| {
        b.votes
            .cmp(&a.votes)
            .then(b.fused_score.total_cmp(&a.fused_score))
            .then(a.category.name().cmp(b.category.name()))
    });
    findings.truncate(cfg.max_findings);
    findings
}

/// End-to-end detection on one screen. An empty result means the screen is
/// judged free of dark patterns.
pub fn detect(
    screen: &UiScreenshot,
    segments: &[Segment],
    icon_detections: &[IconDetection],
    rules: &RuleSet,
    relevance: &RelevanceTable,
    cfg: &ResolutionConfig,
    ablation: Ablation,
) -> Result<Vec<DpFinding>> {
    cfg.validate()?;
    let evidence = analyze_segments(screen, segments, rules, cfg.proximity_factor, cfg.brightness_share)?;
    let verdicts = screen_verdicts(&evidence, relevance, cfg, ablation);
    Ok(resolve_ui(&verdicts, &map_icons_to_dps(icon_detections), cfg))
}

/// The findings document written by `detect`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FindingsDocument {
    pub screenshot_id: String,
    pub findings: Vec<DpFinding>,
}

impl FindingsDocument {
    pub fn parse(text: &str) -> Result<Self> {
        decode_json(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("findings serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{BrightnessClass, SpatialProfile, TextMatch};
    use proptest::prelude::*;
    use DarkPatternCategory::*;

    fn bx(l: u32, t: u32, w: u32, h: u32) -> BoundingBox {
        BoundingBox::new(l, t, w, h).unwrap()
    }

    fn evidence(
        id: &str,
        cats: &[DarkPatternCategory],
        brightness: BrightnessClass,
        rel: (f64, f64),
    ) -> SegmentEvidence {
        SegmentEvidence {
            segment_id: id.into(),
            bbox: bx(0, 0, 10, 10),
            matches: cats
                .iter()
                .map(|&c| {
                    (
                        c,
                        TextMatch {
                            category: c,
                            segment_id: id.into(),
                            rule: 0,
                            span: 0..1,
                        },
                    )
                })
                .collect(),
            brightness,
            neighbors: vec![],
            profile: SpatialProfile {
                segment_id: id.into(),
                neighbor_ids: vec![],
                rel_width: rel.0,
                rel_height: rel.1,
            },
        }
    }

    fn verdict(id: &str, entries: &[(DarkPatternCategory, u32, f64)]) -> SegmentVerdict {
        SegmentVerdict {
            segment_id: id.into(),
            bbox: bx(0, 0, 10, 10),
            per_category: entries
                .iter()
                .map(|&(c, votes, score)| {
                    (
                        c,
                        CategoryVerdict {
                            votes,
                            score,
                            features: FeatureVector::default(),
                        },
                    )
                })
                .collect(),
        }
    }

    #[test]
    fn default_relevance() {
        let t = RelevanceTable::default();
        assert_eq!(t.relevant(DefaultChoice).len(), 4);
        assert_eq!(t.relevant(AttentionDistraction).len(), 4);
        assert_eq!(t.relevant(Nagging), [Feature::OwnText, Feature::NeighborText]);
        for c in DarkPatternCategory::ALL {
            assert!(t.relevant(c).contains(&Feature::OwnText));
        }
    }

    #[test]
    fn relevance_must_include_own_text() {
        let mut map: BTreeMap<_, _> = DarkPatternCategory::ALL
            .into_iter()
            .map(|c| (c, vec![Feature::OwnText]))
            .collect();
        assert!(RelevanceTable::new(map.clone()).is_ok());
        map.insert(Nagging, vec![Feature::Contrast]);
        assert!(RelevanceTable::new(map.clone()).is_err());
        map.remove(&Nagging);
        assert!(RelevanceTable::new(map).is_err());
    }

    #[test]
    fn default_choice_three_of_four() {
        let me = evidence("a", &[DefaultChoice], BrightnessClass::Darker, (0.4, 0.5));
        let n = evidence("b", &[], BrightnessClass::Brighter, (1.0, 1.0));
        let v = segment_votes(
            &me,
            &[&n],
            &RelevanceTable::default(),
            &ResolutionConfig::default(),
            Ablation::FULL,
        );
        let cv = &v.per_category[&DefaultChoice];
        assert_eq!((cv.votes, cv.score), (3, 0.75));
        assert!(!cv.features.neighbor_text);
    }

    #[test]
    fn activity_message_text_only() {
        let me = evidence("a", &[ActivityMessage], BrightnessClass::Normal, (1.0, 1.0));
        let v = segment_votes(
            &me,
            &[],
            &RelevanceTable::default(),
            &ResolutionConfig::default(),
            Ablation::FULL,
        );
        let cv = &v.per_category[&ActivityMessage];
        assert_eq!((cv.votes, cv.score), (1, 0.5));
    }

    #[test]
    fn no_match_no_scores() {
        let me = evidence("a", &[], BrightnessClass::Darker, (0.1, 0.1));
        let n = evidence("b", &[Nagging], BrightnessClass::Brighter, (1.0, 1.0));
        let v = segment_votes(
            &me,
            &[&n],
            &RelevanceTable::default(),
            &ResolutionConfig::default(),
            Ablation::FULL,
        );
        assert!(v.per_category.is_empty());
    }

    #[test]
    fn size_gap_must_exceed_threshold() {
        let cfg = ResolutionConfig::default();
        let n = evidence("b", &[], BrightnessClass::Normal, (1.0, 1.0));
        let at = evidence("a", &[DefaultChoice], BrightnessClass::Normal, (0.75, 1.0));
        let past = evidence("a", &[DefaultChoice], BrightnessClass::Normal, (0.74, 1.0));
        let t = RelevanceTable::default();
        assert!(
            !segment_votes(&at, &[&n], &t, &cfg, Ablation::FULL).per_category[&DefaultChoice]
                .features
                .size_diff
        );
        assert!(
            segment_votes(&past, &[&n], &t, &cfg, Ablation::FULL).per_category[&DefaultChoice]
                .features
                .size_diff
        );
    }

    #[test]
    fn fusion_is_exact() {
        let cfg = ResolutionConfig::default();
        assert_eq!(cfg.fuse(0.5, 1.0), 0.6);
        let v = verdict("s", &[(Nagging, 1, 0.5)]);
        let icon = IconDpCandidate {
            category: Nagging,
            confidence: 1.0,
            bbox: bx(50, 50, 8, 8),
        };
        let f = resolve_ui(&[v], &[icon], &cfg);
        assert_eq!(f[0].fused_score, 0.6);
        assert_eq!(f[0].boxes, [bx(0, 0, 10, 10), bx(50, 50, 8, 8)]);
    }

    #[test]
    fn ranking_votes_then_score() {
        let v = verdict(
            "s",
            &[(DefaultChoice, 3, 0.75), (Nagging, 2, 0.9), (Gamification, 2, 0.6)],
        );
        let f = resolve_ui(&[v], &[], &ResolutionConfig::default());
        let cats: Vec<_> = f.iter().map(|f| f.category).collect();
        assert_eq!(cats, [DefaultChoice, Nagging]);
    }

    #[test]
    fn icons_alone_never_fire() {
        let icon = IconDpCandidate {
            category: Nagging,
            confidence: 1.0,
            bbox: bx(0, 0, 4, 4),
        };
        assert!(resolve_ui(&[], &[icon], &ResolutionConfig::default()).is_empty());
    }

    #[test]
    fn best_segment_ties_go_to_more_votes_then_lowest_id() {
        let cfg = ResolutionConfig::default();
        let mut a = verdict("b", &[(Nagging, 1, 0.5)]);
        a.bbox = bx(1, 1, 5, 5);
        let b = verdict("a", &[(Nagging, 1, 0.5)]);
        let f = resolve_ui(&[a.clone(), b], &[], &cfg);
        assert_eq!(f[0].boxes, [bx(0, 0, 10, 10)]);
        let c = verdict("c", &[(Nagging, 2, 0.5)]);
        let f = resolve_ui(&[a, c], &[], &cfg);
        assert_eq!(f[0].votes, 2);
    }

    #[test]
    fn below_threshold_is_dropped() {
        let v = verdict("s", &[(DefaultChoice, 1, 0.25)]);
        assert!(resolve_ui(&[v], &[], &ResolutionConfig::default()).is_empty());
    }

    #[test]
    fn config_from_toml() {
        let cfg = ResolutionConfig::from_toml("confidence_threshold = 0.3\nmax_findings = 3\n").unwrap();
        assert_eq!(cfg.confidence_threshold, 0.3);
        assert_eq!(cfg.max_findings, 3);
        assert_eq!(cfg.proximity_factor, 0.05);
        assert!(ResolutionConfig::from_toml("bogus = 1").is_err());
        assert!(ResolutionConfig::from_toml("segment_weight = 0.5").is_err());
        assert!(ResolutionConfig::from_toml("confidence_threshold = 1.0").is_err());
        assert!(ResolutionConfig::from_toml("max_findings = 0").is_err());
    }

    #[test]
    fn ablation_tags_round_trip() {
        for a in Ablation::ALL {
            assert_eq!(a.tag().parse::<Ablation>().unwrap(), a);
        }
        assert_eq!("full".parse::<Ablation>().unwrap(), Ablation::FULL);
        assert!("color".parse::<Ablation>().is_err());
    }

    #[test]
    fn findings_document_round_trip() {
        let doc = FindingsDocument {
            screenshot_id: "s".into(),
            findings: vec![DpFinding {
                category: LowStockMessage,
                fused_score: 0.5,
                votes: 1,
                boxes: vec![bx(1, 2, 3, 4)],
            }],
        };
        let json = doc.to_json();
        assert!(json.contains("\"low_stock_message\""));
        assert_eq!(FindingsDocument::parse(&json).unwrap(), doc);
    }

    fn arb_brightness() -> impl Strategy<Value = BrightnessClass> {
        prop_oneof![
            Just(BrightnessClass::Darker),
            Just(BrightnessClass::Brighter),
            Just(BrightnessClass::Normal)
        ]
    }

    fn arb_evidence(id: String) -> impl Strategy<Value = SegmentEvidence> {
        (
            proptest::sample::subsequence(DarkPatternCategory::ALL.to_vec(), 0..4),
            arb_brightness(),
            (0.05f64..=1.0, 0.05f64..=1.0),
        )
            .prop_map(move |(cats, b, rel)| evidence(&id, &cats, b, rel))
    }

    fn arb_neighborhood() -> impl Strategy<Value = (SegmentEvidence, Vec<SegmentEvidence>)> {
        (
            arb_evidence("me".into()),
            proptest::collection::vec(arb_evidence("n".into()), 0..5),
        )
    }

    proptest! {
        #[test]
        fn enabling_analyses_never_lowers_scores((me, ns) in arb_neighborhood()) {
            let refs: Vec<&SegmentEvidence> = ns.iter().collect();
            let t = RelevanceTable::default();
            let cfg = ResolutionConfig::default();
            let score = |a| segment_votes(&me, &refs, &t, &cfg, a);
            let text = score(Ablation::TEXT);
            for wider in [Ablation::TEXT_COLOR, Ablation::TEXT_SPATIAL, Ablation::FULL] {
                let w = score(wider);
                for (c, v) in &text.per_category {
                    prop_assert!(w.per_category[c].score >= v.score);
                    prop_assert!(w.per_category[c].votes >= v.votes);
                }
            }
            let full = score(Ablation::FULL);
            for (c, v) in &score(Ablation::TEXT_COLOR).per_category {
                prop_assert!(full.per_category[c].score >= v.score);
            }
        }

        #[test]
        fn resolution_bounds(
            entries in proptest::collection::vec(
                (proptest::sample::select(DarkPatternCategory::ALL.to_vec()), 0u32..5, 0.0f64..=1.0, "[a-c]"),
                0..12,
            ),
            icons in proptest::collection::vec(
                (proptest::sample::select(DarkPatternCategory::ALL.to_vec()), 0.0f64..=1.0),
                0..4,
            ),
            max_findings in 1usize..4,
        ) {
            let verdicts: Vec<SegmentVerdict> = entries
                .iter()
                .map(|(c, v, s, id)| verdict(id, &[(*c, *v, *s)]))
                .collect();
            let icons: Vec<IconDpCandidate> = icons
                .iter()
                .map(|&(category, confidence)| IconDpCandidate { category, confidence, bbox: bx(0, 0, 2, 2) })
                .collect();
            let cfg = ResolutionConfig { max_findings, ..Default::default() };
            let out = resolve_ui(&verdicts, &icons, &cfg);
            prop_assert!(out.len() <= max_findings);
            for f in &out {
                prop_assert!(f.fused_score >= cfg.confidence_threshold);
                prop_assert!((0.0..=1.0).contains(&f.fused_score));
                prop_assert!(!f.boxes.is_empty());
                prop_assert!(verdicts.iter().any(|v| v.per_category.contains_key(&f.category)));
            }
            prop_assert_eq!(&out, &resolve_ui(&verdicts, &icons, &cfg));
            prop_assert!(resolve_ui(&[], &icons, &cfg).is_empty());
        }
    }
}
