//! The five specialist analysts and the report synthesizer.
//!
//! Each agent carries a two-level prompt: a system prompt fixing its
//! professional identity (embedded verbatim in [`crate::prompts`]) and a
//! user template for the analytical task. The five analysts run
//! concurrently over the same rendered evidence; the synthesizer then
//! consolidates their outputs into the draft report R0.

use crate::gateway::{ChatRequest, Gateway, GenerationParams};
use crate::prompts;
use crate::report::{parse_report, StructuredReport};
use crate::transcript::TranscriptDocument;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("agent {role:?} failed: {cause}")]
    AgentFailed { role: AgentRole, cause: String },
    #[error("template references unknown placeholder {{{0}}}")]
    MissingPlaceholder(String),
    #[error("expected the five analyst roles exactly once, got {0}")]
    BadRoster(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum AgentRole {
    Earnings,
    MarketPredictor,
    Sentiment,
    Valuation,
    Risk,
    Synthesizer,
}

impl AgentRole {
    /// Canonical analyst order; outputs assemble in this order regardless
    /// of completion order.
    pub const ANALYSTS: [AgentRole; 5] = [
        AgentRole::Earnings,
        AgentRole::MarketPredictor,
        AgentRole::Sentiment,
        AgentRole::Valuation,
        AgentRole::Risk,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            AgentRole::Earnings => "earnings_analyst",
            AgentRole::MarketPredictor => "market_predictor",
            AgentRole::Sentiment => "sentiment_analyst",
            AgentRole::Valuation => "valuation_analyst",
            AgentRole::Risk => "risk_analyst",
            AgentRole::Synthesizer => "synthesizer",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AgentSpec {
    pub role: AgentRole,
    pub system_prompt: String,
    pub user_prompt_template: String,
    pub target_words: Option<(u32, u32)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgentAnalysis {
    pub role: AgentRole,
    pub text: String,
    pub evidence_ids_cited: Vec<String>,
    pub elapsed_ms: u64,
    pub model_id: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DraftReport {
    pub markdown: String,
    pub report: StructuredReport,
    pub source_analyses: Vec<AgentAnalysis>,
    /// Set when the synthesizer output parsed to no recommendations; the
    /// debate phase then skips.
    pub missing_recommendations: bool,
}

/// The six built-in agent specs; system prompts are embedded verbatim.
pub fn builtin_agent_specs() -> Vec<AgentSpec> {
    vec![
        AgentSpec {
            role: AgentRole::Earnings,
            system_prompt: prompts::EARNINGS_SYSTEM.to_string(),
            user_prompt_template: prompts::ANALYST_USER_TEMPLATE.to_string(),
            target_words: Some((1200, 1500)),
        },
        AgentSpec {
            role: AgentRole::MarketPredictor,
            system_prompt: prompts::MARKET_PREDICTOR_SYSTEM.to_string(),
            user_prompt_template: prompts::ANALYST_USER_TEMPLATE.to_string(),
            target_words: Some((1100, 1400)),
        },
        AgentSpec {
            role: AgentRole::Sentiment,
            system_prompt: prompts::SENTIMENT_SYSTEM.to_string(),
            user_prompt_template: prompts::ANALYST_USER_TEMPLATE.to_string(),
            target_words: Some((1000, 1300)),
        },
        AgentSpec {
            role: AgentRole::Valuation,
            system_prompt: prompts::VALUATION_SYSTEM.to_string(),
            user_prompt_template: prompts::ANALYST_USER_TEMPLATE.to_string(),
            target_words: None,
        },
        AgentSpec {
            role: AgentRole::Risk,
            system_prompt: prompts::RISK_SYSTEM.to_string(),
            user_prompt_template: prompts::ANALYST_USER_TEMPLATE.to_string(),
            target_words: None,
        },
        AgentSpec {
            role: AgentRole::Synthesizer,
            system_prompt: prompts::SYNTHESIZER_SYSTEM.to_string(),
            user_prompt_template: prompts::SYNTHESIZER_USER_TEMPLATE.to_string(),
            target_words: None,
        },
    ]
}

/// Substitute `{placeholder}` slots in a template.
///
/// Every placeholder in the template must be present in `fields`; leftover
/// braces are a hard error so malformed prompts never reach a provider.
pub fn fill_template(
    template: &str,
    fields: &BTreeMap<&str, &str>,
) -> Result<String, AgentError> {
    let mut out = template.to_string();
    for (k, v) in fields {
        out = out.replace(&format!("{{{k}}}"), v);
    }
    let re = regex::Regex::new(r"\{([a-z_]+)\}").unwrap();
    if let Some(cap) = re.captures(&out) {
        return Err(AgentError::MissingPlaceholder(cap[1].to_string()));
    }
    Ok(out)
}

/// Build the outgoing request for one agent: system prompt verbatim, user
/// template with evidence and transcript metadata substituted.
pub fn compose_prompt(
    spec: &AgentSpec,
    evidence_text: &str,
    doc: &TranscriptDocument,
    params: GenerationParams,
) -> Result<ChatRequest, AgentError> {
    let fields = BTreeMap::from([
        ("evidence", evidence_text),
        ("title", doc.title.as_str()),
        ("doc_id", doc.doc_id.as_str()),
    ]);
    Ok(ChatRequest {
        system_prompt: spec.system_prompt.clone(),
        user_prompt: fill_template(&spec.user_prompt_template, &fields)?,
        params,
        role_tag: spec.role.tag().to_string(),
    })
}

fn cited_chunk_ids(text: &str, evidence_text: &str) -> Vec<String> {
    // chunk ids appear in evidence as "[<id>]"; count only ids echoed back.
    let re = regex::Regex::new(r"\[([0-9a-f]{4,}:[0-9]{4})\]").unwrap();
    let mut ids: Vec<String> = re
        .captures_iter(text)
        .map(|c| c[1].to_string())
        .filter(|id| evidence_text.contains(id))
        .collect();
    ids.sort();
    ids.dedup();
    ids
}

fn per_role_params(
    base: GenerationParams,
    overrides: &BTreeMap<AgentRole, GenerationParams>,
    role: AgentRole,
) -> GenerationParams {
    overrides.get(&role).copied().unwrap_or(base)
}

/// Run the five analysts concurrently; results return in canonical order.
/// Any single failure aborts the run naming the failing role.
pub fn run_agents(
    specs: &[AgentSpec],
    evidence_text: &str,
    doc: &TranscriptDocument,
    gateway: &Gateway,
    params: GenerationParams,
    overrides: &BTreeMap<AgentRole, GenerationParams>,
) -> Result<Vec<AgentAnalysis>, AgentError> {
    let mut roster: Vec<&AgentSpec> = Vec::new();
    for role in AgentRole::ANALYSTS {
        let matching: Vec<&AgentSpec> = specs.iter().filter(|s| s.role == role).collect();
        if matching.len() != 1 {
            return Err(AgentError::BadRoster(format!(
                "role {role:?} registered {} times",
                matching.len()
            )));
        }
        roster.push(matching[0]);
    }

    let results: Vec<Result<AgentAnalysis, AgentError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = roster
            .iter()
            .map(|spec| {
                let p = per_role_params(params, overrides, spec.role);
                scope.spawn(move || {
                    let req = compose_prompt(spec, evidence_text, doc, p)?;
                    let started = Instant::now();
                    let text = gateway.chat(&req).map_err(|e| AgentError::AgentFailed {
                        role: spec.role,
                        cause: e.to_string(),
                    })?;
                    Ok(AgentAnalysis {
                        role: spec.role,
                        evidence_ids_cited: cited_chunk_ids(&text, evidence_text),
                        text,
                        elapsed_ms: started.elapsed().as_millis() as u64,
                        model_id: gateway.chat_model_id().to_string(),
                    })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("agent thread")).collect()
    });

    results.into_iter().collect()
}

/// Render the five analyses for inlining into a synthesis or debate prompt.
pub fn render_analyses(analyses: &[AgentAnalysis]) -> String {
    let mut out = String::new();
    for a in analyses {
        out.push_str(&format!("--- {} ---\n{}\n\n", a.role.tag(), a.text));
    }
    out
}

/// Consolidate the five analyses into the draft report R0.
pub fn synthesize_report(
    specs: &[AgentSpec],
    analyses: &[AgentAnalysis],
    doc: &TranscriptDocument,
    gateway: &Gateway,
    params: GenerationParams,
) -> Result<DraftReport, AgentError> {
    let roles: Vec<AgentRole> = analyses.iter().map(|a| a.role).collect();
    if roles.len() != 5 || AgentRole::ANALYSTS.iter().any(|r| !roles.contains(r)) {
        return Err(AgentError::BadRoster(format!(
            "synthesis requires the five analyst roles exactly once, got {roles:?}"
        )));
    }
    let spec = specs
        .iter()
        .find(|s| s.role == AgentRole::Synthesizer)
        .ok_or_else(|| AgentError::BadRoster("no synthesizer registered".into()))?;
    let inline = render_analyses(analyses);
    let fields = BTreeMap::from([
        ("analyses", inline.as_str()),
        ("title", doc.title.as_str()),
        ("doc_id", doc.doc_id.as_str()),
    ]);
    let req = ChatRequest {
        system_prompt: spec.system_prompt.clone(),
        user_prompt: fill_template(&spec.user_prompt_template, &fields)?,
        params,
        role_tag: spec.role.tag().to_string(),
    };
    let text = gateway.chat(&req).map_err(|e| AgentError::AgentFailed {
        role: AgentRole::Synthesizer,
        cause: e.to_string(),
    })?;
    let report = parse_report(&text);
    let missing = !crate::report::has_recommendations(&report);
    Ok(DraftReport {
        markdown: text,
        report,
        source_analyses: analyses.to_vec(),
        missing_recommendations: missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::{ChatBackend, GatewayError, RetryPolicy};
    use crate::gateway::mock::MockChatBackend;
    use crate::gateway::offline_embed::HashingEmbedder;
    use crate::transcript::parse_transcript;

    fn doc() -> TranscriptDocument {
        parse_transcript("### Prepared remarks\n**CEO**\n: Strong quarter with growth.\n").unwrap()
    }

    #[test]
    fn builtin_specs_shape() {
        let specs = builtin_agent_specs();
        assert_eq!(specs.len(), 6);
        let mut roles: Vec<_> = specs.iter().map(|s| s.role).collect();
        roles.sort();
        roles.dedup();
        assert_eq!(roles.len(), 6);
        let earnings = specs.iter().find(|s| s.role == AgentRole::Earnings).unwrap();
        assert!(earnings.system_prompt.contains("CFA charterholder"));
        let synth = specs.iter().find(|s| s.role == AgentRole::Synthesizer).unwrap();
        assert!(synth.user_prompt_template.contains("Position: [LONG/SHORT/NEUTRAL]"));
        assert!(synth.system_prompt.contains("You are a Managing Director"));
    }

    #[test]
    fn compose_substitutes_all_placeholders() {
        let specs = builtin_agent_specs();
        let req = compose_prompt(&specs[0], "E-MARKER", &doc(), GenerationParams::default()).unwrap();
        assert!(req.user_prompt.contains("E-MARKER"));
        assert!(!regex::Regex::new(r"\{[a-z_]+\}").unwrap().is_match(&req.user_prompt));
        assert_eq!(req.system_prompt, specs[0].system_prompt);
    }

    #[test]
    fn unknown_placeholder_is_an_error() {
        let mut spec = builtin_agent_specs().remove(0);
        spec.user_prompt_template.push_str("\n{surprise_field}");
        match compose_prompt(&spec, "E", &doc(), GenerationParams::default()) {
            Err(AgentError::MissingPlaceholder(p)) => assert_eq!(p, "surprise_field"),
            other => panic!("expected MissingPlaceholder, got {other:?}"),
        }
    }

    #[test]
    fn agents_run_in_canonical_order_with_markers() {
        let gw = Gateway::offline(0);
        let analyses = run_agents(
            &builtin_agent_specs(),
            "evidence",
            &doc(),
            &gw,
            GenerationParams::default(),
            &BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(analyses.len(), 5);
        for (a, role) in analyses.iter().zip(AgentRole::ANALYSTS) {
            assert_eq!(a.role, role);
            assert!(a.text.contains(&format!("MOCK-ANALYSIS role={}", role.tag())));
        }
        // Determinism of the text payloads.
        let again = run_agents(
            &builtin_agent_specs(),
            "evidence",
            &doc(),
            &gw,
            GenerationParams::default(),
            &BTreeMap::new(),
        )
        .unwrap();
        let texts: Vec<_> = analyses.iter().map(|a| &a.text).collect();
        let texts2: Vec<_> = again.iter().map(|a| &a.text).collect();
        assert_eq!(texts, texts2);
    }

    struct FailFor(AgentRole);
    impl ChatBackend for FailFor {
        fn chat(&self, req: &crate::gateway::ChatRequest) -> Result<String, GatewayError> {
            if req.role_tag == self.0.tag() {
                Err(GatewayError::ResponseEmpty)
            } else {
                MockChatBackend::compliant(0).chat(req)
            }
        }
    }

    #[test]
    fn single_failure_names_the_role() {
        let gw = Gateway::new(
            Box::new(FailFor(AgentRole::Risk)),
            Box::new(HashingEmbedder::default()),
            RetryPolicy { max_attempts: 1, initial_backoff_ms: 0 },
            8,
            64,
        );
        let err = run_agents(
            &builtin_agent_specs(),
            "evidence",
            &doc(),
            &gw,
            GenerationParams::default(),
            &BTreeMap::new(),
        )
        .unwrap_err();
        assert!(matches!(err, AgentError::AgentFailed { role: AgentRole::Risk, .. }));
    }

    #[test]
    fn synthesis_parses_three_timeframes() {
        let gw = Gateway::offline(0);
        let specs = builtin_agent_specs();
        let analyses = run_agents(
            &specs,
            "evidence",
            &doc(),
            &gw,
            GenerationParams::default(),
            &BTreeMap::new(),
        )
        .unwrap();
        let draft =
            synthesize_report(&specs, &analyses, &doc(), &gw, GenerationParams::default()).unwrap();
        assert_eq!(draft.report.recommendations.len(), 3);
        assert!(!draft.missing_recommendations);
        assert_eq!(draft.source_analyses.len(), 5);
    }

    #[test]
    fn duplicate_roles_rejected_by_synthesis() {
        let gw = Gateway::offline(0);
        let specs = builtin_agent_specs();
        let analyses = run_agents(
            &specs,
            "evidence",
            &doc(),
            &gw,
            GenerationParams::default(),
            &BTreeMap::new(),
        )
        .unwrap();
        let mut dup = analyses.clone();
        dup[1] = dup[0].clone();
        assert!(matches!(
            synthesize_report(&specs, &dup, &doc(), &gw, GenerationParams::default()),
            Err(AgentError::BadRoster(_))
        ));
    }

    #[test]
    fn synthesizer_without_positions_sets_flag() {
        let gw = Gateway::new(
            Box::new(crate::gateway::mock::FixedReplyBackend {
                reply: "A report with prose but no stance lines at all.".into(),
            }),
            Box::new(HashingEmbedder::default()),
            RetryPolicy { max_attempts: 1, initial_backoff_ms: 0 },
            8,
            64,
        );
        let specs = builtin_agent_specs();
        let offline = Gateway::offline(0);
        let analyses = run_agents(
            &specs,
            "evidence",
            &doc(),
            &offline,
            GenerationParams::default(),
            &BTreeMap::new(),
        )
        .unwrap();
        let draft =
            synthesize_report(&specs, &analyses, &doc(), &gw, GenerationParams::default()).unwrap();
        assert!(draft.missing_recommendations);
        assert!(draft.report.recommendations.is_empty());
    }
}
