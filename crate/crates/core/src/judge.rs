//! LLM-as-judge evaluation harness.
//!
//! Eight rubric dimensions, each scored 1–4 by a separate judge call, plus
//! mode-level aggregation and the improvement comparison table. The judge
//! gateway is configured independently of the generation gateway.

use crate::gateway::{ChatRequest, Gateway, GenerationParams};
use crate::prompts::{JUDGE_HEADER, JUDGE_STRICT_RETRY};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum JudgeError {
    #[error("unparseable verdict for {dimension}: {reply:?}")]
    UnparseableVerdict { dimension: String, reply: String },
    #[error("no scorecards for mode {0}")]
    MissingMode(String),
    #[error(transparent)]
    Gateway(#[from] crate::gateway::GatewayError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
pub enum EvalDimensionName {
    Readability,
    LanguageAbstractness,
    Coherence,
    FinancialKeyPointsCoverage,
    BackgroundContextAdequacy,
    ManagementSentimentConveyance,
    FutureOutlookAnalysis,
    FactualAccuracy,
}

impl EvalDimensionName {
    pub const ALL: [EvalDimensionName; 8] = [
        EvalDimensionName::Readability,
        EvalDimensionName::LanguageAbstractness,
        EvalDimensionName::Coherence,
        EvalDimensionName::FinancialKeyPointsCoverage,
        EvalDimensionName::BackgroundContextAdequacy,
        EvalDimensionName::ManagementSentimentConveyance,
        EvalDimensionName::FutureOutlookAnalysis,
        EvalDimensionName::FactualAccuracy,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            EvalDimensionName::Readability => "Readability",
            EvalDimensionName::LanguageAbstractness => "Language Abstractness",
            EvalDimensionName::Coherence => "Coherence",
            EvalDimensionName::FinancialKeyPointsCoverage => "Financial Key Points Coverage",
            EvalDimensionName::BackgroundContextAdequacy => "Background Context Adequacy",
            EvalDimensionName::ManagementSentimentConveyance => "Management Sentiment Conveyance",
            EvalDimensionName::FutureOutlookAnalysis => "Future Outlook Analysis",
            EvalDimensionName::FactualAccuracy => "Factual Accuracy",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalDimension {
    pub name: EvalDimensionName,
    pub rubric_prompt: String,
}

fn rubric(criterion: &str, labels: [&str; 4]) -> String {
    format!(
        "{JUDGE_HEADER}\n{criterion}\n\n# LABELS\n1. Not reported: {}\n2. Reported but not useful: {}\n3. Reported and reasonable: {}\n4. Reported and insightful: {}\n",
        labels[0], labels[1], labels[2], labels[3]
    )
}

/// The eight registered dimensions with their rubric prompts.
pub fn builtin_dimensions() -> Vec<EvalDimension> {
    use EvalDimensionName::*;
    let spec: [(EvalDimensionName, &str, [&str; 4]); 8] = [
        (
            Readability,
            "Readability: Assess the clarity and fluency of the report's language; grammar, style, and ease of reading.",
            [
                "The language is hard to follow throughout, with pervasive grammatical problems.",
                "Readable in places but frequent awkward phrasing obstructs understanding.",
                "Generally clear and fluent with minor stylistic rough edges.",
                "Polished, fluent prose that is effortless to read.",
            ],
        ),
        (
            LanguageAbstractness,
            "Language Abstractness: Assess the degree of summarization and synthesis beyond raw data repetition.",
            [
                "The report merely repeats raw figures with no synthesis.",
                "Occasional summarization but mostly verbatim data restatement.",
                "Meaningful synthesis of the underlying data with some repetition.",
                "Insightful abstraction that distills the data into a coherent narrative.",
            ],
        ),
        (
            Coherence,
            "Coherence: Assess the logical flow and structural clarity across paragraphs and ideas.",
            [
                "Disjointed sections with no recognizable structure.",
                "Some structure but frequent logical jumps between ideas.",
                "Mostly logical flow with occasional abrupt transitions.",
                "A tightly structured report whose sections build on each other.",
            ],
        ),
        (
            FinancialKeyPointsCoverage,
            "Financial Key Points Coverage: Assess whether the report captures the essential financial highlights from the earnings call, including revenue, profit, margins, growth rates, major business highlights, and significant announcements.",
            [
                "The report barely or does not mention any key financial information.",
                "Mentions few financial metrics or omits important highlights.",
                "Covers most highlights but misses some details.",
                "Comprehensively covers all major highlights.",
            ],
        ),
        (
            BackgroundContextAdequacy,
            "Background Context Adequacy: Assess the provision of historical/industry context and explanations for performance.",
            [
                "No context is provided for any reported results.",
                "Sparse context that leaves key results unexplained.",
                "Adequate context for most results with some gaps.",
                "Rich, relevant context that explains performance drivers.",
            ],
        ),
        (
            ManagementSentimentConveyance,
            "Management Sentiment Conveyance: Assess the accuracy in reflecting management's expressed tone (optimism, caution, etc.).",
            [
                "Management tone is absent or misrepresented.",
                "Tone is mentioned but without supporting evidence from the call.",
                "Tone is conveyed reasonably with some nuance lost.",
                "Tone is conveyed faithfully with supporting statements from the call.",
            ],
        ),
        (
            FutureOutlookAnalysis,
            "Future Outlook Analysis: Assess the reporting of guidance, forecasts, or strategic plans for future performance.",
            [
                "No forward-looking content is reported.",
                "Guidance is mentioned superficially without analysis.",
                "Guidance and plans are reported with reasonable analysis.",
                "Forward outlook is analyzed thoroughly and tied to stated guidance.",
            ],
        ),
        (
            FactualAccuracy,
            "Factual Accuracy: Assess whether the report's statements, figures, and claims align with the original earnings call content. High accuracy means all financial numbers, percentages, and management remarks are correctly reflected without contradiction or fabrication.",
            [
                "The report is highly inaccurate, with major errors or contradictions.",
                "Contains multiple factual errors, inconsistencies, or contradictions.",
                "Mostly accurate with only minor approximations.",
                "Entirely accurate; all numbers and remarks perfectly match the source.",
            ],
        ),
    ];
    spec.into_iter()
        .map(|(name, criterion, labels)| EvalDimension {
            name,
            rubric_prompt: rubric(criterion, labels),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scorecard {
    pub report_id: String,
    pub mode: String,
    pub scores: BTreeMap<EvalDimensionName, u8>,
    pub mean: f64,
    pub judge_model: String,
}

/// First standalone integer in 1..=4 wins; anything else is unparseable.
fn parse_verdict(reply: &str) -> Option<u8> {
    let re = regex::Regex::new(r"\b(\d+)\b").unwrap();
    let verdict = re
        .captures_iter(reply)
        .filter_map(|c| c[1].parse::<u8>().ok())
        .find(|v| (1..=4).contains(v));
    verdict
}

/// Score one dimension with one judge call, retrying a parse failure once
/// with a stricter instruction.
pub fn judge_dimension(
    report_text: &str,
    source_transcript: &str,
    dim: &EvalDimension,
    gateway: &Gateway,
) -> Result<u8, JudgeError> {
    let base_prompt = format!(
        "{}\n# SUMMARY UNDER EVALUATION\n{report_text}\n\n# SOURCE TRANSCRIPT\n{source_transcript}\n",
        dim.rubric_prompt
    );
    for strict in [false, true] {
        let user_prompt = if strict {
            format!("{base_prompt}\n{JUDGE_STRICT_RETRY}\n")
        } else {
            base_prompt.clone()
        };
        let reply = gateway.chat(&ChatRequest {
            system_prompt: "You are a rigorous financial report evaluator.".to_string(),
            user_prompt,
            params: GenerationParams {
                temperature: 0.0,
                ..GenerationParams::default()
            },
            role_tag: format!("judge:{}", dim.name.label()),
        })?;
        if let Some(score) = parse_verdict(&reply) {
            return Ok(score);
        }
        if strict {
            return Err(JudgeError::UnparseableVerdict {
                dimension: dim.name.label().to_string(),
                reply,
            });
        }
    }
    unreachable!("strict retry either returns or errors")
}

/// Score a report on all eight dimensions. Atomic: any failed dimension
/// fails the whole scorecard.
pub fn score_report(
    report_id: &str,
    mode: &str,
    report_text: &str,
    source_transcript: &str,
    gateway: &Gateway,
) -> Result<Scorecard, JudgeError> {
    let mut scores = BTreeMap::new();
    for dim in builtin_dimensions() {
        let s = judge_dimension(report_text, source_transcript, &dim, gateway)?;
        scores.insert(dim.name, s);
    }
    let mean = scores.values().map(|v| f64::from(*v)).sum::<f64>() / scores.len() as f64;
    Ok(Scorecard {
        report_id: report_id.to_string(),
        mode: mode.to_string(),
        scores,
        mean,
        judge_model: gateway.chat_model_id().to_string(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeSummary {
    pub mode: String,
    pub reports: usize,
    pub mean: f64,
    /// mode mean − zero-shot mean, when a zero-shot group is present.
    pub improvement: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ModeSummary>,
}

pub const ZERO_SHOT_MODE: &str = "zero_shot";

/// Aggregate scorecards by mode and compute improvement over zero-shot.
pub fn compare_modes(
    grouped: &BTreeMap<String, Vec<Scorecard>>,
    requested: &[&str],
) -> Result<ComparisonTable, JudgeError> {
    for mode in requested {
        if grouped.get(*mode).map_or(true, |v| v.is_empty()) {
            return Err(JudgeError::MissingMode(mode.to_string()));
        }
    }
    let mode_mean = |mode: &str| -> Option<f64> {
        let cards = grouped.get(mode)?;
        if cards.is_empty() {
            return None;
        }
        Some(cards.iter().map(|c| c.mean).sum::<f64>() / cards.len() as f64)
    };
    let baseline = mode_mean(ZERO_SHOT_MODE);
    let rows = requested
        .iter()
        .map(|mode| {
            let mean = mode_mean(mode).expect("validated above");
            ModeSummary {
                mode: mode.to_string(),
                reports: grouped[*mode].len(),
                mean,
                improvement: baseline.map(|b| mean - b),
            }
        })
        .collect();
    Ok(ComparisonTable { rows })
}

impl ComparisonTable {
    /// Plain-text table with the improvement column formatted to +0.XX.
    pub fn render(&self) -> String {
        let mut out = String::from("mode                       n     mean   improvement\n");
        for r in &self.rows {
            let imp = r
                .improvement
                .map(|i| format!("{i:+.2}"))
                .unwrap_or_else(|| "n/a".into());
            out.push_str(&format!("{:<26} {:<5} {:<6.2} {}\n", r.mode, r.reports, r.mean, imp));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::mock::{FixedReplyBackend, ScriptedBackend};
    use crate::gateway::offline_embed::HashingEmbedder;
    use crate::gateway::RetryPolicy;

    fn judge_gateway(chat: Box<dyn crate::gateway::ChatBackend>) -> Gateway {
        Gateway::new(
            chat,
            Box::new(HashingEmbedder::default()),
            RetryPolicy { max_attempts: 1, initial_backoff_ms: 0 },
            8,
            64,
        )
    }

    #[test]
    fn eight_dimensions_registered_once() {
        let dims = builtin_dimensions();
        assert_eq!(dims.len(), 8);
        let mut names: Vec<_> = dims.iter().map(|d| d.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 8);
        for d in &dims {
            for label in 1..=4 {
                assert!(d.rubric_prompt.contains(&format!("{label}. ")));
            }
            assert!(d.rubric_prompt.contains("You are a financial expert"));
        }
    }

    #[test]
    fn plain_digit_parses() {
        let gw = judge_gateway(Box::new(FixedReplyBackend { reply: "3".into() }));
        let dims = builtin_dimensions();
        assert_eq!(judge_dimension("report", "transcript", &dims[0], &gw).unwrap(), 3);
    }

    #[test]
    fn lenient_rule_takes_first_in_range_integer() {
        let gw = judge_gateway(Box::new(FixedReplyBackend {
            reply: "excellent (4)".into(),
        }));
        let dims = builtin_dimensions();
        assert_eq!(judge_dimension("r", "t", &dims[0], &gw).unwrap(), 4);
    }

    #[test]
    fn out_of_range_fails_after_one_retry() {
        let backend = ScriptedBackend::new(vec!["7".into(), "7".into()]);
        let gw = judge_gateway(Box::new(backend));
        let dims = builtin_dimensions();
        match judge_dimension("r", "t", &dims[0], &gw) {
            Err(JudgeError::UnparseableVerdict { .. }) => {}
            other => panic!("expected UnparseableVerdict, got {other:?}"),
        }
        assert_eq!(gw.chat_call_count(), 2, "exactly one retry");
    }

    #[test]
    fn retry_can_recover() {
        let backend = ScriptedBackend::new(vec!["I decline to use digits".into(), "2".into()]);
        let gw = judge_gateway(Box::new(backend));
        let dims = builtin_dimensions();
        assert_eq!(judge_dimension("r", "t", &dims[0], &gw).unwrap(), 2);
    }

    #[test]
    fn scorecard_mean_is_exact() {
        let gw = judge_gateway(Box::new(FixedReplyBackend { reply: "3".into() }));
        let card = score_report("r1", "findebate", "report", "transcript", &gw).unwrap();
        assert_eq!(card.scores.len(), 8);
        assert_eq!(card.mean, 3.0);

        let backend = ScriptedBackend::new(
            ["4", "4", "4", "4", "3", "3", "3", "3"].iter().map(|s| s.to_string()).collect(),
        );
        let gw = judge_gateway(Box::new(backend));
        let card = score_report("r1", "findebate", "report", "transcript", &gw).unwrap();
        assert_eq!(card.mean, 3.5);
    }

    #[test]
    fn failed_dimension_fails_whole_card() {
        // Seventh call is garbage twice; no partial card may survive.
        let mut replies: Vec<String> = vec!["3".into(); 6];
        replies.push("no digits at all".into());
        replies.push("still none".into());
        let gw = judge_gateway(Box::new(ScriptedBackend::new(replies)));
        assert!(score_report("r1", "findebate", "report", "transcript", &gw).is_err());
    }

    fn card(mode: &str, mean: f64) -> Scorecard {
        Scorecard {
            report_id: "r".into(),
            mode: mode.into(),
            scores: BTreeMap::new(),
            mean,
            judge_model: "test".into(),
        }
    }

    #[test]
    fn improvement_matches_stored_means() {
        let mut grouped = BTreeMap::new();
        grouped.insert("zero_shot".to_string(), vec![card("zero_shot", 2.97)]);
        grouped.insert("findebate".to_string(), vec![card("findebate", 3.58)]);
        let table = compare_modes(&grouped, &["zero_shot", "findebate"]).unwrap();
        let imp = table.rows[1].improvement.unwrap();
        assert_eq!(format!("{imp:+.2}"), "+0.61");
        assert_eq!(format!("{:+.2}", table.rows[0].improvement.unwrap()), "+0.00");
    }

    #[test]
    fn missing_mode_is_an_error() {
        let grouped = BTreeMap::new();
        assert!(matches!(
            compare_modes(&grouped, &["zero_shot"]),
            Err(JudgeError::MissingMode(_))
        ));
    }
}
