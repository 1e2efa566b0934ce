//! Lexical rule matching.
//!
//! Text and rule literals go through the same normalization: [`tokenize`],
//! then contraction expansion and a small suffix-folding table
//! ([`fold_tokens`]). A rule is a sequence of slots matched against a
//! contiguous run of normalized tokens.
//!
//! # Rule file grammar
//!
//! ```text
//! file     = { line }
//! line     = [ rule ] [ "#" comment ] newline
//! rule     = category ":" slot { slot }
//! slot     = word | "<" alt { "/" alt } ">" | "[number]" | "[*" N "]" | "[*]"
//! ```
//!
//! `category` is any spelling accepted by [`DarkPatternCategory`]'s parser
//! (`LowStockMessage`, `low_stock_message`, ...). An alternative may span
//! several words (`<opt out/refuse to>`). `[*N]` skips up to `N` arbitrary
//! tokens; `[*]` means `[*4]`. Every rule needs at least one literal slot.

use std::collections::BTreeMap;
use std::ops::Range;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DarkPatternCategory, Segment};

pub const DEFAULT_FREE_SLOT: usize = 4;

const DEFAULT_RULES_TEXT: &str = include_str!("../../rules/default.rules");

/// Splits on non-alphanumeric characters and lowercases. A `.` or `,`
/// between two digits stays inside the number (`1,299.99` is one token).
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let joins_number = matches!(c, '.' | ',')
            && i > 0
            && chars[i - 1].is_ascii_digit()
            && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())
            && !current.is_empty();
        if c.is_alphanumeric() || joins_number {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

pub fn is_number(token: &str) -> bool {
    token.starts_with(|c: char| c.is_ascii_digit()) && token.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',')
}

/// `(stem, clitic)` pairs produced by splitting an apostrophe contraction,
/// with their expansion.
const CONTRACTIONS: &[(&str, &str, &[&str])] = &[
    ("won", "t", &["will", "not"]),
    ("can", "t", &["can", "not"]),
    ("shan", "t", &["shall", "not"]),
    ("ain", "t", &["is", "not"]),
    ("i", "m", &["i", "am"]),
];

fn expand_pair(first: &str, second: &str) -> Option<Vec<String>> {
    if let Some((_, _, out)) = CONTRACTIONS.iter().find(|(a, b, _)| *a == first && *b == second) {
        return Some(out.iter().map(|s| s.to_string()).collect());
    }
    let word = |w: &str| w.to_string();
    match second {
        "t" if first.len() > 1 && first.ends_with('n') => Some(vec![word(&first[..first.len() - 1]), word("not")]),
        "re" => Some(vec![word(first), word("are")]),
        "ll" => Some(vec![word(first), word("will")]),
        "ve" => Some(vec![word(first), word("have")]),
        _ => None,
    }
}

/// Suffix folding applied to every non-numeric token.
pub fn stem(token: &str) -> String {
    if is_number(token) || !token.is_ascii() {
        return token.to_string();
    }
    let mut w = token.to_string();
    if w.len() >= 4 && w.ends_with("ies") {
        w.truncate(w.len() - 3);
        w.push('y');
    } else if w.ends_with("sses")
        || (w.len() >= 5 && (w.ends_with("ches") || w.ends_with("shes") || w.ends_with("xes")))
    {
        w.truncate(w.len() - 2);
    } else if w.len() >= 3 && w.ends_with('s') && !(w.ends_with("ss") || w.ends_with("us") || w.ends_with("is")) {
        w.truncate(w.len() - 1);
    }

    let mut cut = false;
    if w.len() > 5 && w.ends_with("ing") {
        w.truncate(w.len() - 3);
        cut = true;
    } else if w.len() > 4 && w.ends_with("ied") {
        w.truncate(w.len() - 3);
        w.push('y');
    } else if w.len() >= 5 && w.ends_with("ed") {
        w.truncate(w.len() - 2);
        cut = true;
    }
    if cut {
        let b = w.as_bytes();
        let n = b.len();
        if n >= 2 && b[n - 1] == b[n - 2] && !b"aeioulsz".contains(&b[n - 1]) {
            w.truncate(n - 1);
        }
    }

    if !cut && w.len() > 3 && w.ends_with('e') {
        w.truncate(w.len() - 1);
    }
    w
}

/// Expands contractions (`don t` -> `do not`) and stems.
pub fn fold_tokens(tokens: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        if let Some(next) = tokens.get(i + 1) {
            if let Some(expanded) = expand_pair(&tokens[i], next) {
                out.extend(expanded);
                i += 2;
                continue;
            }
        }
        out.push(tokens[i].clone());
        i += 1;
    }
    out.iter().map(|t| stem(t)).collect()
}

/// [`tokenize`] followed by [`fold_tokens`].
pub fn normalize(text: &str) -> Vec<String> {
    fold_tokens(&tokenize(text))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlotSpec {
    /// Each alternative is a normalized token sequence.
    Literal(Vec<Vec<String>>),
    Number,
    Free {
        max_tokens: usize,
    },
}

impl SlotSpec {
    /// Builds a literal slot from raw alternative phrases.
    pub fn literal<S: AsRef<str>>(alternatives: &[S]) -> Result<SlotSpec> {
        let mut alts = Vec::new();
        for alt in alternatives {
            let tokens = normalize(alt.as_ref());
            if tokens.is_empty() {
                return Err(Error::Rule {
                    line: 0,
                    message: format!("alternative `{}` has no tokens", alt.as_ref()),
                });
            }
            if !alts.contains(&tokens) {
                alts.push(tokens);
            }
        }
        if alts.is_empty() {
            return Err(Error::Rule {
                line: 0,
                message: "literal slot without alternatives".into(),
            });
        }
        Ok(SlotSpec::Literal(alts))
    }

    /// Token positions reachable by matching this slot at `at`.
    fn advance(&self, tokens: &[String], at: usize, out: &mut Vec<usize>) {
        match self {
            SlotSpec::Literal(alts) => {
                for alt in alts {
                    if tokens.get(at..at + alt.len()) == Some(alt.as_slice()) {
                        out.push(at + alt.len());
                    }
                }
            }
            SlotSpec::Number => {
                if tokens.get(at).is_some_and(|t| is_number(t)) {
                    out.push(at + 1);
                }
            }
            SlotSpec::Free { max_tokens } => {
                out.extend(at..=(at + max_tokens).min(tokens.len()));
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexicalRule {
    pub category: DarkPatternCategory,
    pub slots: Vec<SlotSpec>,
    /// The rule as written, for diagnostics.
    pub source: String,
}

impl LexicalRule {
    pub fn new(category: DarkPatternCategory, slots: Vec<SlotSpec>, source: impl Into<String>) -> Result<Self> {
        if !category.is_dark_pattern() {
            return Err(Error::Rule {
                line: 0,
                message: "rules cannot target non_dp".into(),
            });
        }
        if !slots.iter().any(|s| matches!(s, SlotSpec::Literal(_))) {
            return Err(Error::Rule {
                line: 0,
                message: "a rule needs at least one literal slot".into(),
            });
        }
        Ok(LexicalRule {
            category,
            slots,
            source: source.into(),
        })
    }

    /// End of the longest match starting at `start`, if any.
    pub fn longest_match_at(&self, tokens: &[String], start: usize) -> Option<usize> {
        let mut frontier = vec![start];
        for slot in &self.slots {
            let mut next = Vec::new();
            for &at in &frontier {
                slot.advance(tokens, at, &mut next);
            }
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                return None;
            }
            frontier = next;
        }
        frontier.last().copied().filter(|&end| end > start)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleSet {
    pub rules: Vec<LexicalRule>,
}

impl RuleSet {
    /// The shipped rule table.
    pub fn builtin() -> RuleSet {
        RuleSet::parse(DEFAULT_RULES_TEXT).expect("built-in rules parse")
    }

    pub fn load(path: &Path) -> Result<RuleSet> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RuleSet::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RuleSet> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            rules.push(parse_rule(line).map_err(|e| match e {
                Error::Rule { message, .. } => Error::Rule { line: i + 1, message },
                other => Error::Rule {
                    line: i + 1,
                    message: other.to_string(),
                },
            })?);
        }
        if rules.is_empty() {
            return Err(Error::EmptyInput("rule file contains no rules".into()));
        }
        Ok(RuleSet { rules })
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

fn rule_error(message: impl Into<String>) -> Error {
    Error::Rule {
        line: 0,
        message: message.into(),
    }
}

fn parse_rule(line: &str) -> Result<LexicalRule> {
    let (head, body) = line
        .split_once(':')
        .ok_or_else(|| rule_error("expected `Category: slots`"))?;
    let category: DarkPatternCategory = head.trim().parse()?;
    let mut slots = Vec::new();
    let mut rest = body.trim_start();
    while !rest.is_empty() {
        let (slot, tail) = match rest.as_bytes()[0] {
            b'<' => {
                let end = rest.find('>').ok_or_else(|| rule_error("unclosed `<`"))?;
                let alts: Vec<&str> = rest[1..end].split('/').map(str::trim).collect();
                if alts.iter().any(|a| a.is_empty()) {
                    return Err(rule_error(format!("empty alternative in `{}`", &rest[..=end])));
                }
                (SlotSpec::literal(&alts)?, &rest[end + 1..])
            }
            b'[' => {
                let end = rest.find(']').ok_or_else(|| rule_error("unclosed `[`"))?;
                let inner = rest[1..end].trim();
                let slot = if inner.eq_ignore_ascii_case("number") {
                    SlotSpec::Number
                } else if let Some(n) = inner.strip_prefix('*') {
                    let max_tokens = if n.trim().is_empty() {
                        DEFAULT_FREE_SLOT
                    } else {
                        n.trim()
                            .parse()
                            .map_err(|_| rule_error(format!("bad gap size `[{inner}]`")))?
                    };
                    SlotSpec::Free { max_tokens }
                } else {
                    return Err(rule_error(format!("unknown slot `[{inner}]`")));
                };
                (slot, &rest[end + 1..])
            }
            _ => {
                let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
                (SlotSpec::literal(&[&rest[..end]])?, &rest[end..])
            }
        };
        slots.push(slot);
        rest = tail.trim_start();
    }
    LexicalRule::new(category, slots, line)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TextMatch {
    pub category: DarkPatternCategory,
    pub segment_id: String,
    /// Index into the rule set.
    pub rule: usize,
    /// Range over the segment's normalized tokens.
    pub span: Range<usize>,
}

impl TextMatch {
    pub fn matched_token_count(&self) -> usize {
        self.span.len()
    }
}

/// Every (rule, start) pair that matches, each with its longest extent.
pub fn match_text(segment: &Segment, rules: &RuleSet) -> Vec<TextMatch> {
    let tokens = normalize(&segment.text);
    let mut out = Vec::new();
    for (ri, rule) in rules.rules.iter().enumerate() {
        for start in 0..tokens.len() {
            if let Some(end) = rule.longest_match_at(&tokens, start) {
                out.push(TextMatch {
                    category: rule.category,
                    segment_id: segment.id.clone(),
                    rule: ri,
                    span: start..end,
                });
            }
        }
    }
    out
}

/// Longest match per category; ties go to the earliest span start, then the
/// lowest segment id, then the lowest rule index.
pub fn select_longest_per_category(matches: &[TextMatch]) -> BTreeMap<DarkPatternCategory, TextMatch> {
    let mut best: BTreeMap<DarkPatternCategory, TextMatch> = BTreeMap::new();
    for m in matches {
        let better = match best.get(&m.category) {
            None => true,
            Some(cur) => {
                let key = |t: &TextMatch| {
                    (
                        std::cmp::Reverse(t.matched_token_count()),
                        t.span.start,
                        t.segment_id.clone(),
                        t.rule,
                    )
                };
                key(m) < key(cur)
            }
        };
        if better {
            best.insert(m.category, m.clone());
        }
    }
    best
}
