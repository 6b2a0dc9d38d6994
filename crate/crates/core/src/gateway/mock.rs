//! Deterministic offline chat backends.
//!
//! The compliant backend makes the whole pipeline a pure function of
//! (transcript bytes, config): analysts get marker-tagged canned analyses,
//! the synthesizer emits a fixed-stance report in the canonical grammar,
//! and the debate roles return stance-preserving rewrites. The adversarial
//! backend deliberately violates the debate contract to exercise the
//! safety gates.

use super::{ChatBackend, ChatRequest, GatewayError};
use crate::report::{
    parse_report, render_recommendations, Position, Recommendation, Timeframe,
};
use crate::transcript::text_digest;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Mutex;

/// Marker line every canned analyst reply carries.
pub fn analysis_marker(role_tag: &str) -> String {
    format!("MOCK-ANALYSIS role={role_tag}")
}

fn fixture_recommendations() -> Vec<Recommendation> {
    vec![
        Recommendation {
            timeframe: Timeframe::OneDay,
            position: Position::Long,
            conviction_pct: Some(78),
            rationale_excerpt: "Revenue beat and raised guidance support immediate upside.".into(),
        },
        Recommendation {
            timeframe: Timeframe::OneWeek,
            position: Position::Long,
            conviction_pct: Some(72),
            rationale_excerpt: "Momentum from double-digit growth carries the week.".into(),
        },
        Recommendation {
            timeframe: Timeframe::OneMonth,
            position: Position::Neutral,
            conviction_pct: Some(65),
            rationale_excerpt: "Valuation already reflects the improved outlook.".into(),
        },
    ]
}

fn synthesizer_report(user_prompt: &str) -> String {
    let digest = &text_digest(user_prompt)[..16];
    format!(
        "# Institutional Investment Report\n\n\
         ## Executive Summary\n\
         Consolidated specialist view of the earnings call (input digest {digest}). \
         Results featured revenue growth, solid cash generation, and raised guidance.\n\n\
         ## Key Financial Indicators\n\
         Revenue growth double-digit; guidance raised for the full year.\n\n\
         ## Management Sentiment\n\
         Tone confident and specific; guidance language constructive.\n\n\
         ## MULTI-TIMEFRAME INVESTMENT STRATEGY\n\n{}\
         ## Risk Assessment\n\
         Labor costs and contract renewals remain the principal watch items.\n",
        render_recommendations(&fixture_recommendations())
    )
}

const REPORT_OPEN: &str = "=== CURRENT REPORT ===";
const REPORT_CLOSE: &str = "=== END REPORT ===";

/// Pull the report body out of a debate user prompt; falls back to the whole
/// prompt when the delimiters are absent.
fn extract_report(user_prompt: &str) -> &str {
    if let Some(start) = user_prompt.find(REPORT_OPEN) {
        let rest = &user_prompt[start + REPORT_OPEN.len()..];
        if let Some(end) = rest.find(REPORT_CLOSE) {
            return rest[..end].trim();
        }
    }
    user_prompt
}

fn debate_rewrite(phase: &str, user_prompt: &str) -> String {
    let report = extract_report(user_prompt);
    let extra = match phase {
        "trust" => "## Evidence Reinforcement\nAdditional supporting evidence strengthens every existing recommendation without altering direction or conviction.\n",
        "skeptic" => "## Risk Scenario Analysis\nDownside scenarios and hedge strategies are acknowledged; the stated positions withstand them.\n",
        _ => "## Final Synthesis\nTrust reinforcement and Skeptic risk framing are merged; all recommendations stand as originally stated.\n",
    };
    format!("{report}\n\n{extra}")
}

enum MockMode {
    Compliant,
    Adversarial,
}

pub struct MockChatBackend {
    mode: MockMode,
    rng: Mutex<ChaCha8Rng>,
}

impl MockChatBackend {
    pub fn compliant(seed: u64) -> Self {
        Self {
            mode: MockMode::Compliant,
            rng: Mutex::new(ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    /// Debate phases randomly flip directions, drop sections, corrupt
    /// convictions, emit garbage, or fail outright.
    pub fn adversarial(seed: u64) -> Self {
        Self {
            mode: MockMode::Adversarial,
            rng: Mutex::new(ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    fn adversarial_debate(&self, phase: &str, user_prompt: &str) -> Result<String, GatewayError> {
        let mut rng = self.rng.lock().unwrap();
        let report = extract_report(user_prompt);
        let parsed = parse_report(report);
        let mut recs = parsed.recommendations.clone();
        match rng.gen_range(0..6u8) {
            0 => Ok(debate_rewrite(phase, user_prompt)), // behaves for once
            1 => {
                // Flip a random direction.
                if !recs.is_empty() {
                    let i = rng.gen_range(0..recs.len());
                    recs[i].position = match recs[i].position {
                        Position::Long => Position::Short,
                        Position::Short => Position::Long,
                        Position::Neutral => Position::Long,
                    };
                }
                Ok(format!(
                    "# Rewritten Report\n\n{}",
                    render_recommendations(&recs)
                ))
            }
            2 => {
                // Drop a timeframe section.
                if !recs.is_empty() {
                    let i = rng.gen_range(0..recs.len());
                    recs.remove(i);
                }
                Ok(format!(
                    "# Rewritten Report\n\n{}",
                    render_recommendations(&recs)
                ))
            }
            3 => {
                // Corrupt a conviction: out of band or a large swing.
                if !recs.is_empty() {
                    let i = rng.gen_range(0..recs.len());
                    recs[i].conviction_pct = Some(*[20u32, 99, 100, 5].get(rng.gen_range(0..4)).unwrap());
                }
                Ok(format!(
                    "# Rewritten Report\n\n{}",
                    render_recommendations(&recs)
                ))
            }
            4 => Ok("I am unable to review this report. Markets are mysterious.".into()),
            _ => Err(GatewayError::BackendUnavailable {
                attempts: 1,
                detail: "adversarial outage".into(),
            }),
        }
    }
}

impl ChatBackend for MockChatBackend {
    fn chat(&self, req: &ChatRequest) -> Result<String, GatewayError> {
        let tag = req.role_tag.as_str();
        match tag {
            "synthesizer" | "zero_shot" | "standard_rag" => Ok(synthesizer_report(&req.user_prompt)),
            "trust" | "skeptic" | "leader" => match self.mode {
                MockMode::Compliant => Ok(debate_rewrite(tag, &req.user_prompt)),
                MockMode::Adversarial => self.adversarial_debate(tag, &req.user_prompt),
            },
            t if t.starts_with("judge") => {
                // Deterministic score in 1..=4 keyed by the prompt content.
                let h = text_digest(&req.user_prompt);
                let b = u32::from(h.as_bytes()[0] % 4) + 1;
                Ok(format!("{b}"))
            }
            _ => Ok(format!(
                "{}\n\nDeterministic specialist assessment derived from input digest {}.\n\
                 The evidence passages above support a measured, well-grounded view\n\
                 from the {} perspective, with realistic confidence levels (70-80%).",
                analysis_marker(tag),
                &text_digest(&req.user_prompt)[..16],
                tag
            )),
        }
    }
}

/// Test helper: always replies with the same canned string.
pub struct FixedReplyBackend {
    pub reply: String,
}

impl ChatBackend for FixedReplyBackend {
    fn chat(&self, _req: &ChatRequest) -> Result<String, GatewayError> {
        Ok(self.reply.clone())
    }
}

/// Test helper: replies from a scripted sequence, repeating the last entry.
pub struct ScriptedBackend {
    replies: Mutex<(Vec<String>, usize)>,
}

impl ScriptedBackend {
    pub fn new(replies: Vec<String>) -> Self {
        Self {
            replies: Mutex::new((replies, 0)),
        }
    }
}

impl ChatBackend for ScriptedBackend {
    fn chat(&self, _req: &ChatRequest) -> Result<String, GatewayError> {
        let mut g = self.replies.lock().unwrap();
        let (replies, idx) = &mut *g;
        let i = (*idx).min(replies.len().saturating_sub(1));
        *idx += 1;
        Ok(replies.get(i).cloned().unwrap_or_default())
    }
}
