//! Structured report grammar.
//!
//! Reports commit to a stance: Long/Short/Neutral per 1-day/1-week/1-month
//! horizon, each with an optional conviction percentage. This module parses
//! that grammar out of free text, diffs two reports' stances, and decides
//! the `core_compromised` revert predicate used by the debate gates.
//!
//! `parse_report` is total: malformed sections are skipped, never guessed.

use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum Timeframe {
    OneDay,
    OneWeek,
    OneMonth,
}

impl Timeframe {
    pub const ALL: [Timeframe; 3] = [Timeframe::OneDay, Timeframe::OneWeek, Timeframe::OneMonth];

    pub fn label(&self) -> &'static str {
        match self {
            Timeframe::OneDay => "1-DAY",
            Timeframe::OneWeek => "1-WEEK",
            Timeframe::OneMonth => "1-MONTH",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    Long,
    Short,
    Neutral,
}

impl Position {
    pub fn label(&self) -> &'static str {
        match self {
            Position::Long => "LONG",
            Position::Short => "SHORT",
            Position::Neutral => "NEUTRAL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recommendation {
    pub timeframe: Timeframe,
    pub position: Position,
    /// As parsed; range validation happens in the compromise check so that
    /// out-of-range convictions written by a model remain detectable.
    pub conviction_pct: Option<u32>,
    pub rationale_excerpt: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredReport {
    pub markdown: String,
    /// Sorted OneDay, OneWeek, OneMonth; at most one per timeframe.
    pub recommendations: Vec<Recommendation>,
    pub section_headings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StanceChange {
    Unchanged,
    DirectionFlipped,
    Removed,
    Added,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StanceDiff {
    pub per_timeframe: BTreeMap<Timeframe, StanceChange>,
    /// after − before, where both sides carry a conviction.
    pub conviction_deltas: BTreeMap<Timeframe, i64>,
}

/// Thresholds for the `core_compromised` predicate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CompromiseThresholds {
    pub conviction_min: u32,
    pub conviction_max: u32,
    pub max_conviction_delta: u32,
}

impl Default for CompromiseThresholds {
    fn default() -> Self {
        Self {
            conviction_min: 50,
            conviction_max: 95,
            max_conviction_delta: 15,
        }
    }
}

fn timeframe_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\b1[\s-]?(day|week|month)\b").unwrap())
}

fn position_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^\s*\**position\**\s*:\s*\**\[?\s*(LONG|SHORT|NEUTRAL)").unwrap())
}

fn conviction_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^\s*\**conviction\**\s*:\s*\**\[?\s*(\d+)").unwrap())
}

fn heading_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s{0,3}#{1,6}\s+(.+?)\s*$").unwrap())
}

fn tf_of(word: &str) -> Timeframe {
    match word.to_ascii_lowercase().as_str() {
        "day" => Timeframe::OneDay,
        "week" => Timeframe::OneWeek,
        _ => Timeframe::OneMonth,
    }
}

/// Extract the stance grammar out of arbitrary report text.
///
/// Timeframe headers ("1-DAY TRADING RECOMMENDATION" and friends, matched
/// case-insensitively) open a scope that runs until the next header; the
/// first `Position:` line in scope, plus an optional `Conviction:` line,
/// forms that timeframe's recommendation. The first successful parse per
/// timeframe wins.
pub fn parse_report(text: &str) -> StructuredReport {
    let mut recs: BTreeMap<Timeframe, Recommendation> = BTreeMap::new();
    let mut headings = Vec::new();

    let mut scope: Option<Timeframe> = None;
    let mut scope_position: Option<Position> = None;
    let mut scope_conviction: Option<u32> = None;
    let mut scope_rationale = String::new();

    let commit =
        |scope: &mut Option<Timeframe>,
         pos: &mut Option<Position>,
         conv: &mut Option<u32>,
         rationale: &mut String,
         recs: &mut BTreeMap<Timeframe, Recommendation>| {
            if let (Some(tf), Some(p)) = (*scope, *pos) {
                recs.entry(tf).or_insert(Recommendation {
                    timeframe: tf,
                    position: p,
                    conviction_pct: *conv,
                    rationale_excerpt: rationale.trim().chars().take(240).collect(),
                });
            }
            *pos = None;
            *conv = None;
            rationale.clear();
        };

    for line in text.lines() {
        if let Some(cap) = heading_re().captures(line) {
            headings.push(cap[1].to_string());
        }
        if let Some(m) = timeframe_re().captures(line) {
            commit(
                &mut scope,
                &mut scope_position,
                &mut scope_conviction,
                &mut scope_rationale,
                &mut recs,
            );
            scope = Some(tf_of(&m[1]));
            continue;
        }
        if scope.is_some() {
            if scope_position.is_none() {
                if let Some(cap) = position_re().captures(line) {
                    scope_position = Some(match cap[1].to_ascii_uppercase().as_str() {
                        "LONG" => Position::Long,
                        "SHORT" => Position::Short,
                        _ => Position::Neutral,
                    });
                    continue;
                }
            }
            if scope_position.is_some() && scope_conviction.is_none() {
                if let Some(cap) = conviction_re().captures(line) {
                    scope_conviction = cap[1].parse::<u32>().ok();
                    continue;
                }
            }
            if scope_position.is_some() && !line.trim().is_empty() {
                if !scope_rationale.is_empty() {
                    scope_rationale.push(' ');
                }
                scope_rationale.push_str(line.trim());
            }
        }
    }
    commit(
        &mut scope,
        &mut scope_position,
        &mut scope_conviction,
        &mut scope_rationale,
        &mut recs,
    );

    StructuredReport {
        markdown: text.to_string(),
        recommendations: recs.into_values().collect(),
        section_headings: headings,
    }
}

/// True iff all three horizons carry a valid position.
pub fn has_recommendations(report: &StructuredReport) -> bool {
    Timeframe::ALL
        .iter()
        .all(|tf| report.recommendations.iter().any(|r| r.timeframe == *tf))
}

impl StructuredReport {
    pub fn recommendation(&self, tf: Timeframe) -> Option<&Recommendation> {
        self.recommendations.iter().find(|r| r.timeframe == tf)
    }
}

/// Per-timeframe stance classification over the union of both reports.
pub fn stance_diff(before: &StructuredReport, after: &StructuredReport) -> StanceDiff {
    let mut per_timeframe = BTreeMap::new();
    let mut conviction_deltas = BTreeMap::new();
    for tf in Timeframe::ALL {
        let b = before.recommendation(tf);
        let a = after.recommendation(tf);
        let change = match (b, a) {
            (None, None) => continue,
            (Some(_), None) => StanceChange::Removed,
            (None, Some(_)) => StanceChange::Added,
            (Some(b), Some(a)) => {
                if let (Some(cb), Some(ca)) = (b.conviction_pct, a.conviction_pct) {
                    conviction_deltas.insert(tf, i64::from(ca) - i64::from(cb));
                }
                if b.position == a.position {
                    StanceChange::Unchanged
                } else {
                    StanceChange::DirectionFlipped
                }
            }
        };
        per_timeframe.insert(tf, change);
    }
    StanceDiff {
        per_timeframe,
        conviction_deltas,
    }
}

/// The debate revert predicate: has `after` broken `before`'s core stance?
///
/// Triggers on any direction flip or removed horizon, any conviction in
/// `after` outside the allowed band, or a conviction shift beyond the
/// configured delta.
pub fn core_compromised_with(
    before: &StructuredReport,
    after: &StructuredReport,
    th: &CompromiseThresholds,
) -> bool {
    let diff = stance_diff(before, after);
    if diff
        .per_timeframe
        .values()
        .any(|c| matches!(c, StanceChange::DirectionFlipped | StanceChange::Removed))
    {
        return true;
    }
    if after.recommendations.iter().any(|r| {
        r.conviction_pct
            .is_some_and(|c| c < th.conviction_min || c > th.conviction_max)
    }) {
        return true;
    }
    if diff
        .conviction_deltas
        .values()
        .any(|d| d.unsigned_abs() > u64::from(th.max_conviction_delta))
    {
        return true;
    }
    false
}

pub fn core_compromised(before: &StructuredReport, after: &StructuredReport) -> bool {
    core_compromised_with(before, after, &CompromiseThresholds::default())
}

/// Canonical writer of the recommendation grammar; the golden fixtures and
/// the offline backends share it.
pub fn render_recommendations(recs: &[Recommendation]) -> String {
    let mut out = String::new();
    for r in recs {
        let title = match r.timeframe {
            Timeframe::OneDay => "1-DAY TRADING RECOMMENDATION",
            Timeframe::OneWeek => "1-WEEK MOMENTUM STRATEGY",
            Timeframe::OneMonth => "1-MONTH FUNDAMENTAL POSITION",
        };
        out.push_str(&format!("### {title}\n"));
        out.push_str(&format!("Position: {}\n", r.position.label()));
        if let Some(c) = r.conviction_pct {
            out.push_str(&format!("Conviction: {c}%\n"));
        }
        if !r.rationale_excerpt.is_empty() {
            out.push_str(&format!("Rationale: {}\n", r.rationale_excerpt));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(tf: Timeframe, p: Position, c: Option<u32>) -> Recommendation {
        Recommendation {
            timeframe: tf,
            position: p,
            conviction_pct: c,
            rationale_excerpt: String::new(),
        }
    }

    fn report_with(recs: Vec<Recommendation>) -> StructuredReport {
        let md = render_recommendations(&recs);
        parse_report(&md)
    }

    #[test]
    fn basic_grammar() {
        let r = parse_report("1-DAY TRADING RECOMMENDATION\nPosition: LONG\nConviction: 78%");
        assert_eq!(r.recommendations.len(), 1);
        let rec = &r.recommendations[0];
        assert_eq!(rec.timeframe, Timeframe::OneDay);
        assert_eq!(rec.position, Position::Long);
        assert_eq!(rec.conviction_pct, Some(78));
    }

    #[test]
    fn no_position_lines_means_no_recommendations() {
        let r = parse_report("A long meditation on markets without commitments.");
        assert!(r.recommendations.is_empty());
        assert!(!has_recommendations(&r));
    }

    #[test]
    fn three_sections_sort_canonically() {
        let text = "1-MONTH OUTLOOK\nPosition: SHORT\n\n1-DAY CALL\nPosition: LONG\n\n1-WEEK VIEW\nPosition: NEUTRAL\n";
        let r = parse_report(text);
        let tfs: Vec<_> = r.recommendations.iter().map(|x| x.timeframe).collect();
        assert_eq!(tfs, vec![Timeframe::OneDay, Timeframe::OneWeek, Timeframe::OneMonth]);
        assert!(has_recommendations(&r));
    }

    #[test]
    fn first_parse_per_timeframe_wins() {
        let text = "1-DAY\nPosition: LONG\n\n1-DAY\nPosition: SHORT\n";
        let r = parse_report(text);
        assert_eq!(r.recommendations.len(), 1);
        assert_eq!(r.recommendations[0].position, Position::Long);
    }

    #[test]
    fn parse_is_idempotent_through_canonical_writer() {
        let original = report_with(vec![
            rec(Timeframe::OneDay, Position::Long, Some(78)),
            rec(Timeframe::OneWeek, Position::Neutral, Some(70)),
            rec(Timeframe::OneMonth, Position::Short, Some(65)),
        ]);
        let round = parse_report(&render_recommendations(&original.recommendations));
        assert_eq!(
            original
                .recommendations
                .iter()
                .map(|r| (r.timeframe, r.position, r.conviction_pct))
                .collect::<Vec<_>>(),
            round
                .recommendations
                .iter()
                .map(|r| (r.timeframe, r.position, r.conviction_pct))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn diff_identity() {
        let r = report_with(vec![
            rec(Timeframe::OneDay, Position::Long, Some(78)),
            rec(Timeframe::OneWeek, Position::Long, Some(72)),
            rec(Timeframe::OneMonth, Position::Neutral, Some(65)),
        ]);
        let d = stance_diff(&r, &r);
        assert!(d.per_timeframe.values().all(|c| *c == StanceChange::Unchanged));
        assert!(d.conviction_deltas.values().all(|x| *x == 0));
        assert!(!core_compromised(&r, &r));
    }

    #[test]
    fn flip_and_removal_detected() {
        let before = report_with(vec![
            rec(Timeframe::OneDay, Position::Long, Some(78)),
            rec(Timeframe::OneWeek, Position::Long, Some(72)),
        ]);
        let flipped = report_with(vec![
            rec(Timeframe::OneDay, Position::Short, Some(78)),
            rec(Timeframe::OneWeek, Position::Long, Some(72)),
        ]);
        let d = stance_diff(&before, &flipped);
        assert_eq!(d.per_timeframe[&Timeframe::OneDay], StanceChange::DirectionFlipped);
        assert!(core_compromised(&before, &flipped));
        // Flip symmetry: either direction of the flip triggers the predicate.
        assert!(core_compromised(&flipped, &before));

        let removed = report_with(vec![rec(Timeframe::OneDay, Position::Long, Some(78))]);
        let d = stance_diff(&before, &removed);
        assert_eq!(d.per_timeframe[&Timeframe::OneWeek], StanceChange::Removed);
        assert!(core_compromised(&before, &removed));
    }

    #[test]
    fn conviction_rules() {
        let before = report_with(vec![
            rec(Timeframe::OneDay, Position::Long, Some(78)),
            rec(Timeframe::OneWeek, Position::Long, Some(72)),
            rec(Timeframe::OneMonth, Position::Neutral, Some(65)),
        ]);
        let gentle = report_with(vec![
            rec(Timeframe::OneDay, Position::Long, Some(82)),
            rec(Timeframe::OneWeek, Position::Long, Some(72)),
            rec(Timeframe::OneMonth, Position::Neutral, Some(65)),
        ]);
        assert!(!core_compromised(&before, &gentle));

        let out_of_band = report_with(vec![
            rec(Timeframe::OneDay, Position::Long, Some(99)),
            rec(Timeframe::OneWeek, Position::Long, Some(72)),
            rec(Timeframe::OneMonth, Position::Neutral, Some(65)),
        ]);
        assert!(core_compromised(&before, &out_of_band));

        let big_swing = report_with(vec![
            rec(Timeframe::OneDay, Position::Long, Some(58)),
            rec(Timeframe::OneWeek, Position::Long, Some(72)),
            rec(Timeframe::OneMonth, Position::Neutral, Some(65)),
        ]);
        // 78 -> 58 is a 20-point drop, beyond the 15-point band.
        assert!(core_compromised(&before, &big_swing));
    }

    #[test]
    fn headings_collected_in_order() {
        let r = parse_report("# Top\nbody\n## Mid\n### Inner\n");
        assert_eq!(r.section_headings, vec!["Top", "Mid", "Inner"]);
    }
}
