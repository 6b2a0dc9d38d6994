//! Single-round Trust → Skeptic → Leader optimization with safety gates.
//!
//! The central guarantee: whatever the backend does — flip directions,
//! drop sections, emit garbage, fail outright — the returned final report
//! either equals the original R0 byte-for-byte or passes the
//! `core_compromised` predicate against R0. Intermediate phase violations
//! discard that phase's output and carry its input forward; the final gate
//! and every failure path revert to R0.

use crate::agents::{render_analyses, AgentAnalysis};
use crate::gateway::{ChatRequest, Gateway, GenerationParams};
use crate::prompts;
use crate::report::{
    core_compromised_with, has_recommendations, parse_report, stance_diff,
    CompromiseThresholds, StanceChange, StructuredReport,
};
use crate::transcript::text_digest;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DebatePhase {
    SafetyCheck,
    Trust,
    Skeptic,
    Leader,
    FinalCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DebateOutcome {
    Optimized,
    SkippedNoRecommendations,
    RevertedCoreCompromised,
    RevertedPhaseFailure,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DebateLogEntry {
    pub phase: DebatePhase,
    pub prompt_digest: String,
    pub response_digest: String,
    pub verdict: String,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DebateLog {
    pub entries: Vec<DebateLogEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DebateSession {
    pub r0: StructuredReport,
    pub r1: Option<StructuredReport>,
    pub r2: Option<StructuredReport>,
    pub r_star: Option<StructuredReport>,
    pub log: DebateLog,
    pub outcome: DebateOutcome,
}

impl DebateSession {
    /// The report the caller must ship: R* only on Optimized, R0 otherwise.
    pub fn final_report(&self) -> &StructuredReport {
        match self.outcome {
            DebateOutcome::Optimized => self.r_star.as_ref().unwrap_or(&self.r0),
            _ => &self.r0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DebateSpec {
    pub phase: DebatePhase,
    pub system_prompt: String,
    pub user_prompt_template: String,
}

/// Trust/Skeptic/Leader specs with their embedded system prompts.
pub fn debate_agent_specs() -> [DebateSpec; 3] {
    [
        DebateSpec {
            phase: DebatePhase::Trust,
            system_prompt: prompts::TRUST_SYSTEM.to_string(),
            user_prompt_template: prompts::DEBATE_USER_TEMPLATE.to_string(),
        },
        DebateSpec {
            phase: DebatePhase::Skeptic,
            system_prompt: prompts::SKEPTIC_SYSTEM.to_string(),
            user_prompt_template: prompts::DEBATE_USER_TEMPLATE.to_string(),
        },
        DebateSpec {
            phase: DebatePhase::Leader,
            system_prompt: prompts::LEADER_SYSTEM.to_string(),
            user_prompt_template: prompts::DEBATE_USER_TEMPLATE.to_string(),
        },
    ]
}

fn role_tag(phase: DebatePhase) -> &'static str {
    match phase {
        DebatePhase::Trust => "trust",
        DebatePhase::Skeptic => "skeptic",
        DebatePhase::Leader => "leader",
        DebatePhase::SafetyCheck => "safety_check",
        DebatePhase::FinalCheck => "final_check",
    }
}

#[derive(Debug, Clone)]
pub struct DebateConfig {
    pub rounds: usize,
    pub thresholds: CompromiseThresholds,
    pub params: GenerationParams,
}

impl Default for DebateConfig {
    fn default() -> Self {
        Self {
            rounds: 1,
            thresholds: CompromiseThresholds::default(),
            params: GenerationParams::default(),
        }
    }
}

/// Does `candidate` flip or remove any direction present in `baseline`?
fn stance_violated(baseline: &StructuredReport, candidate: &StructuredReport) -> bool {
    stance_diff(baseline, candidate)
        .per_timeframe
        .values()
        .any(|c| matches!(c, StanceChange::DirectionFlipped | StanceChange::Removed))
}

/// Run the safe debate over a draft report.
pub fn run_safe_debate(
    r0: &StructuredReport,
    analyses: &[AgentAnalysis],
    gateway: &Gateway,
    cfg: &DebateConfig,
) -> DebateSession {
    let mut log = DebateLog::default();
    let r0_digest = text_digest(&r0.markdown);

    // Safety check: refuse to debate a report without a complete stance.
    if !has_recommendations(r0) {
        log.entries.push(DebateLogEntry {
            phase: DebatePhase::SafetyCheck,
            prompt_digest: r0_digest.clone(),
            response_digest: r0_digest,
            verdict: "skip: no recommendations".into(),
            elapsed_ms: 0,
        });
        return DebateSession {
            r0: r0.clone(),
            r1: None,
            r2: None,
            r_star: None,
            log,
            outcome: DebateOutcome::SkippedNoRecommendations,
        };
    }
    log.entries.push(DebateLogEntry {
        phase: DebatePhase::SafetyCheck,
        prompt_digest: r0_digest.clone(),
        response_digest: r0_digest.clone(),
        verdict: "recommendations present".into(),
        elapsed_ms: 0,
    });

    let specs = debate_agent_specs();
    let analyses_text = render_analyses(analyses);
    let mut current = r0.clone();
    let mut r1 = None;
    let mut r2 = None;
    let mut r_star = None;

    for _round in 0..cfg.rounds.max(1) {
        for spec in &specs {
            let fields: BTreeMap<&str, &str> = BTreeMap::from([
                ("report", current.markdown.as_str()),
                ("analyses", analyses_text.as_str()),
            ]);
            let user_prompt = match crate::agents::fill_template(&spec.user_prompt_template, &fields)
            {
                Ok(p) => p,
                Err(e) => {
                    return phase_failure(r0, r1, r2, log, spec.phase, &e.to_string());
                }
            };
            let req = ChatRequest {
                system_prompt: spec.system_prompt.clone(),
                user_prompt: user_prompt.clone(),
                params: cfg.params,
                role_tag: role_tag(spec.phase).to_string(),
            };
            let started = Instant::now();
            let response = match gateway.chat(&req) {
                Ok(r) => r,
                Err(e) => {
                    return phase_failure(r0, r1, r2, log, spec.phase, &e.to_string());
                }
            };
            let elapsed_ms = started.elapsed().as_millis() as u64;
            let candidate = parse_report(&response);

            // Intermediate gate for Trust/Skeptic: a direction flip or
            // removal relative to R0, or a shrunken heading structure
            // relative to the phase input, discards this phase's output.
            let (next, verdict) = if spec.phase != DebatePhase::Leader
                && (stance_violated(r0, &candidate)
                    || candidate.section_headings.len() < current.section_headings.len())
            {
                (current.clone(), "discarded: stance violation".to_string())
            } else {
                (candidate, "accepted".to_string())
            };

            log.entries.push(DebateLogEntry {
                phase: spec.phase,
                prompt_digest: text_digest(&user_prompt),
                response_digest: text_digest(&response),
                verdict,
                elapsed_ms,
            });

            match spec.phase {
                DebatePhase::Trust => r1 = Some(next.clone()),
                DebatePhase::Skeptic => r2 = Some(next.clone()),
                DebatePhase::Leader => r_star = Some(next.clone()),
                _ => {}
            }
            current = next;
        }
    }

    // Final gate: R* must preserve R0's core or be thrown away.
    let star = r_star.clone().unwrap_or_else(|| r0.clone());
    let compromised = core_compromised_with(r0, &star, &cfg.thresholds);
    log.entries.push(DebateLogEntry {
        phase: DebatePhase::FinalCheck,
        prompt_digest: text_digest(&r0.markdown),
        response_digest: text_digest(&star.markdown),
        verdict: if compromised {
            "core compromised: reverting to original".into()
        } else {
            "core preserved".into()
        },
        elapsed_ms: 0,
    });

    DebateSession {
        r0: r0.clone(),
        r1,
        r2,
        r_star,
        log,
        outcome: if compromised {
            DebateOutcome::RevertedCoreCompromised
        } else {
            DebateOutcome::Optimized
        },
    }
}

fn phase_failure(
    r0: &StructuredReport,
    r1: Option<StructuredReport>,
    r2: Option<StructuredReport>,
    mut log: DebateLog,
    phase: DebatePhase,
    cause: &str,
) -> DebateSession {
    log.entries.push(DebateLogEntry {
        phase,
        prompt_digest: String::new(),
        response_digest: String::new(),
        verdict: format!("failed: {cause}"),
        elapsed_ms: 0,
    });
    DebateSession {
        r0: r0.clone(),
        r1,
        r2,
        r_star: None,
        log,
        outcome: DebateOutcome::RevertedPhaseFailure,
    }
}

/// Human-readable audit document for a finished session.
pub fn render_debate_report(session: &DebateSession) -> String {
    let mut out = String::new();
    out.push_str("# Debate Audit\n\n");
    out.push_str(&format!("outcome: {:?}\n\n", session.outcome));
    out.push_str("## Phase Log\n\n");
    for e in &session.log.entries {
        out.push_str(&format!(
            "- phase={:?} verdict=\"{}\" prompt_digest={} response_digest={}\n",
            e.phase,
            e.verdict,
            short(&e.prompt_digest),
            short(&e.response_digest)
        ));
    }
    if let Some(star) = &session.r_star {
        out.push_str("\n## Stance Diff (R0 -> R*)\n\n");
        let diff = stance_diff(&session.r0, star);
        for (tf, change) in &diff.per_timeframe {
            let delta = diff
                .conviction_deltas
                .get(tf)
                .map(|d| format!("{d:+}"))
                .unwrap_or_else(|| "n/a".into());
            out.push_str(&format!(
                "- {}: {:?}, conviction delta {}\n",
                tf.label(),
                change,
                delta
            ));
        }
    }
    out
}

fn short(digest: &str) -> &str {
    if digest.len() >= 12 {
        &digest[..12]
    } else {
        digest
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::Gateway;
    use crate::report::render_recommendations;
    use crate::report::{Position, Recommendation, Timeframe};

    fn full_report() -> StructuredReport {
        let recs = vec![
            Recommendation {
                timeframe: Timeframe::OneDay,
                position: Position::Long,
                conviction_pct: Some(78),
                rationale_excerpt: "beat".into(),
            },
            Recommendation {
                timeframe: Timeframe::OneWeek,
                position: Position::Long,
                conviction_pct: Some(72),
                rationale_excerpt: "momentum".into(),
            },
            Recommendation {
                timeframe: Timeframe::OneMonth,
                position: Position::Neutral,
                conviction_pct: Some(65),
                rationale_excerpt: "valuation".into(),
            },
        ];
        parse_report(&format!(
            "# Report\n\n## Strategy\n\n{}",
            render_recommendations(&recs)
        ))
    }

    #[test]
    fn specs_carry_embedded_prompts() {
        let specs = debate_agent_specs();
        assert_eq!(specs.len(), 3);
        assert!(specs[0].system_prompt.contains("PRESERVE and ENHANCE"));
        assert!(specs[1].system_prompt.contains("identify potential risks"));
        assert!(specs[2].system_prompt.contains("FINAL OPTIMIZED REPORT"));
    }

    #[test]
    fn skip_when_no_recommendations() {
        let r0 = parse_report("prose without stances");
        let gw = Gateway::offline(0);
        let session = run_safe_debate(&r0, &[], &gw, &DebateConfig::default());
        assert_eq!(session.outcome, DebateOutcome::SkippedNoRecommendations);
        assert_eq!(session.final_report().markdown, r0.markdown);
        assert!(session.r1.is_none() && session.r2.is_none() && session.r_star.is_none());
        assert_eq!(session.log.entries.len(), 1);
        assert_eq!(session.log.entries[0].phase, DebatePhase::SafetyCheck);
        assert_eq!(gw.chat_call_count(), 0);
    }

    #[test]
    fn compliant_backend_optimizes_with_full_log() {
        let r0 = full_report();
        let gw = Gateway::offline(0);
        let session = run_safe_debate(&r0, &[], &gw, &DebateConfig::default());
        assert_eq!(session.outcome, DebateOutcome::Optimized);
        let phases: Vec<_> = session.log.entries.iter().map(|e| e.phase).collect();
        assert_eq!(
            phases,
            vec![
                DebatePhase::SafetyCheck,
                DebatePhase::Trust,
                DebatePhase::Skeptic,
                DebatePhase::Leader,
                DebatePhase::FinalCheck
            ]
        );
        // Directions preserved on every horizon.
        let final_report = session.final_report();
        for tf in Timeframe::ALL {
            assert_eq!(
                final_report.recommendation(tf).unwrap().position,
                r0.recommendation(tf).unwrap().position
            );
        }
        // Exactly one call per debate phase when rounds=1.
        assert_eq!(gw.chat_call_count(), 3);
    }

    #[test]
    fn audit_rendering_mentions_outcome_and_digests() {
        let r0 = full_report();
        let gw = Gateway::offline(0);
        let session = run_safe_debate(&r0, &[], &gw, &DebateConfig::default());
        let doc = render_debate_report(&session);
        assert!(doc.contains("outcome: Optimized"));
        assert_eq!(doc.matches("phase=").count(), 5);
        // Digests in the document match recomputed digests of logged texts.
        let r0_digest = text_digest(&r0.markdown);
        assert!(doc.contains(short(&r0_digest)));
    }

    #[test]
    fn skipped_audit_has_only_safety_check() {
        let r0 = parse_report("no stance here");
        let gw = Gateway::offline(0);
        let session = run_safe_debate(&r0, &[], &gw, &DebateConfig::default());
        let doc = render_debate_report(&session);
        assert!(doc.contains("skip: no recommendations"));
        assert_eq!(doc.matches("phase=").count(), 1);
    }
}
