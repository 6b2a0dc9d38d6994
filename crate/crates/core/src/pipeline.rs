//! End-to-end orchestration and the on-disk artifact tree.
//!
//! Four modes form a strict ladder — each adds stages on top of the
//! previous one — so ablation runs differ only in the stages they add.
//! Offline runs are bit-reproducible: the only nondeterministic manifest
//! field is `timing`, which determinism comparisons must exclude.

use crate::agents::{
    builtin_agent_specs, render_analyses, run_agents, synthesize_report, AgentAnalysis,
};
use crate::config::RunConfig;
use crate::debate::{render_debate_report, run_safe_debate, DebateConfig, DebateOutcome};
use crate::gateway::{ChatRequest, EmbeddingVector, Gateway};
use crate::index::{EmbeddedChunk, VectorIndex};
use crate::prompts;
use crate::report::{parse_report, StructuredReport};
use crate::retrieval::{
    default_query_bank, render_evidence, retrieve_evidence, DimensionName,
};
use crate::segmenter::{chunks_to_jsonl, segment_document, Chunk};
use crate::transcript::TranscriptDocument;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Segmenter(#[from] crate::segmenter::SegmenterError),
    #[error(transparent)]
    Gateway(#[from] crate::gateway::GatewayError),
    #[error(transparent)]
    Index(#[from] crate::index::IndexError),
    #[error(transparent)]
    Retrieval(#[from] crate::retrieval::RetrievalError),
    #[error(transparent)]
    Agent(#[from] crate::agents::AgentError),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("artifact io at {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("document produced no chunks")]
    NoChunks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineMode {
    ZeroShot,
    StandardRag,
    MultiAgentNoDebate,
    FinDebate,
}

impl PipelineMode {
    pub const ALL: [PipelineMode; 4] = [
        PipelineMode::ZeroShot,
        PipelineMode::StandardRag,
        PipelineMode::MultiAgentNoDebate,
        PipelineMode::FinDebate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PipelineMode::ZeroShot => "zero_shot",
            PipelineMode::StandardRag => "standard_rag",
            PipelineMode::MultiAgentNoDebate => "multi_agent_no_debate",
            PipelineMode::FinDebate => "findebate",
        }
    }

    /// Stage set; each mode is a strict superset of the one before it.
    pub fn stages(&self) -> Vec<&'static str> {
        let mut s = vec!["ingest", "generate"];
        if *self >= PipelineMode::StandardRag {
            s.extend(["segment", "index", "retrieve"]);
        }
        if *self >= PipelineMode::MultiAgentNoDebate {
            s.extend(["analysts", "synthesize"]);
        }
        if *self >= PipelineMode::FinDebate {
            s.push("debate");
        }
        s.sort_unstable();
        s
    }
}

impl PartialOrd for PipelineMode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PipelineMode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

impl std::str::FromStr for PipelineMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PipelineMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                format!(
                    "unknown mode {s:?}; expected one of: {}",
                    PipelineMode::ALL
                        .iter()
                        .map(|m| m.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            })
    }
}

impl std::fmt::Display for PipelineMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Wall-clock data; the single manifest field excluded from determinism
/// comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingInfo {
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub mode: String,
    pub doc_id: String,
    pub title: String,
    pub stages: Vec<String>,
    pub chat_model: String,
    pub embed_model: String,
    pub chat_calls: u64,
    pub embed_calls: u64,
    pub chunk_count: usize,
    pub offline: bool,
    pub debate_outcome: Option<String>,
    pub artifacts: Vec<String>,
    pub timing: TimingInfo,
}

#[derive(Debug)]
pub struct PipelineOutput {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
    pub final_report: StructuredReport,
    pub debate_outcome: Option<DebateOutcome>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

struct ArtifactWriter {
    root: PathBuf,
    written: Vec<String>,
}

impl ArtifactWriter {
    fn new(root: &Path) -> Result<Self, PipelineError> {
        std::fs::create_dir_all(root).map_err(io_err(root))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, rel: &str, bytes: impl AsRef<[u8]>) -> Result<(), PipelineError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(io_err(&path))?;
        }
        std::fs::write(&path, bytes.as_ref()).map_err(io_err(&path))?;
        self.written.push(rel.to_string());
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<(), PipelineError> {
        let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
        text.push('\n');
        self.write(rel, text)
    }
}

/// Embed in gateway-sized batches, preserving order.
fn embed_all(gateway: &Gateway, texts: &[String]) -> Result<Vec<EmbeddingVector>, PipelineError> {
    let mut out = Vec::with_capacity(texts.len());
    for batch in texts.chunks(64) {
        out.extend(gateway.embed(batch)?);
    }
    Ok(out)
}

fn build_index(
    doc: &TranscriptDocument,
    chunks: &[Chunk],
    gateway: &Gateway,
) -> Result<VectorIndex, PipelineError> {
    let _ = doc;
    let texts: Vec<String> = chunks.iter().map(|c| c.text.clone()).collect();
    let vectors = embed_all(gateway, &texts)?;
    let mut index = VectorIndex::new(gateway.embed_dim(), gateway.embed_model_id());
    let items: Vec<EmbeddedChunk> = chunks
        .iter()
        .cloned()
        .zip(vectors)
        .map(|(chunk, vector)| EmbeddedChunk { chunk, vector })
        .collect();
    index.add(&items)?;
    Ok(index)
}

fn zero_shot_report(
    doc: &TranscriptDocument,
    gateway: &Gateway,
    cfg: &RunConfig,
) -> Result<String, PipelineError> {
    let fields = BTreeMap::from([
        ("title", doc.title.as_str()),
        ("doc_id", doc.doc_id.as_str()),
        ("transcript", doc.raw_text.as_str()),
    ]);
    let user_prompt = crate::agents::fill_template(prompts::ZERO_SHOT_USER_TEMPLATE, &fields)?;
    Ok(gateway.chat(&ChatRequest {
        system_prompt: prompts::SYNTHESIZER_SYSTEM.to_string(),
        user_prompt,
        params: cfg.generation,
        role_tag: "zero_shot".to_string(),
    })?)
}

/// One composite query (title + the general-performance query group),
/// flat top-k retrieval, one generation call.
fn standard_rag_report(
    doc: &TranscriptDocument,
    index: &VectorIndex,
    gateway: &Gateway,
    cfg: &RunConfig,
) -> Result<(String, String), PipelineError> {
    let bank = default_query_bank();
    let general = bank
        .iter()
        .find(|d| d.name == DimensionName::GeneralFinancialPerformance)
        .expect("built-in bank has all dimensions");
    let composite = format!("{} {}", doc.title, general.queries.join(" "));
    let qv = embed_all(gateway, &[composite])?.remove(0);
    let hits = index.search(&qv, cfg.retrieval.standard_rag_k)?;
    let mut evidence = String::new();
    for h in &hits {
        evidence.push_str(&format!(
            "[{}] ({}) {}\n",
            h.chunk_id, h.chunk.speaker, h.chunk.text
        ));
    }
    let fields = BTreeMap::from([
        ("title", doc.title.as_str()),
        ("doc_id", doc.doc_id.as_str()),
        ("evidence", evidence.as_str()),
    ]);
    let user_prompt = crate::agents::fill_template(prompts::STANDARD_RAG_USER_TEMPLATE, &fields)?;
    let report = gateway.chat(&ChatRequest {
        system_prompt: prompts::SYNTHESIZER_SYSTEM.to_string(),
        user_prompt,
        params: cfg.generation,
        role_tag: "standard_rag".to_string(),
    })?;
    Ok((report, evidence))
}

/// Run one mode over one document, writing the artifact tree under
/// `out_dir`. `offline` forces the deterministic backends and zeroes every
/// per-call elapsed time so artifact bytes are reproducible.
pub fn run_pipeline(
    doc: &TranscriptDocument,
    cfg: &RunConfig,
    mode: PipelineMode,
    out_dir: &Path,
    offline: bool,
) -> Result<PipelineOutput, PipelineError> {
    let started = Instant::now();
    let gateway = cfg.build_gateway(offline)?;
    let mut w = ArtifactWriter::new(out_dir)?;

    w.write("source.md", &doc.raw_text)?;

    let mut chunk_count = 0usize;
    let mut debate_outcome = None;

    let final_markdown: String = match mode {
        PipelineMode::ZeroShot => zero_shot_report(doc, &gateway, cfg)?,
        PipelineMode::StandardRag => {
            let chunks = segment_document(doc, &cfg.segmenter)?;
            if chunks.is_empty() {
                return Err(PipelineError::NoChunks);
            }
            chunk_count = chunks.len();
            w.write("chunks.jsonl", chunks_to_jsonl(&chunks))?;
            let index = build_index(doc, &chunks, &gateway)?;
            let index_path = out_dir.join("index.bin");
            index.persist(&index_path)?;
            w.written.push("index.bin".into());
            let (report, evidence) = standard_rag_report(doc, &index, &gateway, cfg)?;
            w.write("evidence.md", &evidence)?;
            report
        }
        PipelineMode::MultiAgentNoDebate | PipelineMode::FinDebate => {
            let chunks = segment_document(doc, &cfg.segmenter)?;
            if chunks.is_empty() {
                return Err(PipelineError::NoChunks);
            }
            chunk_count = chunks.len();
            w.write("chunks.jsonl", chunks_to_jsonl(&chunks))?;
            let index = build_index(doc, &chunks, &gateway)?;
            let index_path = out_dir.join("index.bin");
            index.persist(&index_path)?;
            w.written.push("index.bin".into());

            let bundle =
                retrieve_evidence(&index, &default_query_bank(), &gateway, cfg.retrieval.k_per_dimension)?;
            let evidence_text = render_evidence(&bundle, cfg.retrieval.evidence_budget_tokens);
            w.write("evidence.md", &evidence_text)?;
            w.write_json("evidence.json", &bundle)?;

            let specs = builtin_agent_specs();
            let mut analyses = run_agents(
                &specs,
                &evidence_text,
                doc,
                &gateway,
                cfg.generation,
                &cfg.agent_overrides,
            )?;
            if offline {
                scrub_analysis_timing(&mut analyses);
            }
            for a in &analyses {
                w.write(&format!("analyses/{}.md", a.role.tag()), &a.text)?;
            }
            w.write("analyses/combined.md", render_analyses(&analyses))?;

            let draft = synthesize_report(&specs, &analyses, doc, &gateway, cfg.generation)?;
            w.write("draft_report.md", &draft.markdown)?;
            w.write_json("draft_recommendations.json", &draft.report.recommendations)?;

            if mode == PipelineMode::FinDebate {
                let debate_cfg = DebateConfig {
                    rounds: cfg.debate.rounds,
                    thresholds: cfg.debate.thresholds,
                    params: cfg.generation,
                };
                let mut session = run_safe_debate(&draft.report, &analyses, &gateway, &debate_cfg);
                if offline {
                    for e in &mut session.log.entries {
                        e.elapsed_ms = 0;
                    }
                }
                w.write_json("debate_log.json", &session.log)?;
                w.write("debate_audit.md", render_debate_report(&session))?;
                debate_outcome = Some(session.outcome);
                session.final_report().markdown.clone()
            } else {
                draft.markdown
            }
        }
    };

    w.write("final_report.md", &final_markdown)?;

    let manifest = Manifest {
        schema_version: 1,
        mode: mode.as_str().to_string(),
        doc_id: doc.doc_id.clone(),
        title: doc.title.clone(),
        stages: mode.stages().into_iter().map(String::from).collect(),
        chat_model: gateway.chat_model_id().to_string(),
        embed_model: gateway.embed_model_id().to_string(),
        chat_calls: gateway.chat_call_count(),
        embed_calls: gateway.embed_call_count(),
        chunk_count,
        offline,
        debate_outcome: debate_outcome.map(|o| format!("{o:?}")),
        artifacts: {
            let mut a = w.written.clone();
            a.push("manifest.json".into());
            a.sort();
            a
        },
        timing: TimingInfo {
            elapsed_ms: started.elapsed().as_millis() as u64,
        },
    };
    w.write_json("manifest.json", &manifest)?;

    Ok(PipelineOutput {
        out_dir: out_dir.to_path_buf(),
        final_report: parse_report(&final_markdown),
        debate_outcome,
        manifest,
    })
}

fn scrub_analysis_timing(analyses: &mut [AgentAnalysis]) {
    for a in analyses {
        a.elapsed_ms = 0;
    }
}

/// Default artifact location: `<root>/<doc_id prefix>/<mode>`.
pub fn default_out_dir(root: &Path, doc: &TranscriptDocument, mode: PipelineMode) -> PathBuf {
    root.join(&doc.doc_id[..12.min(doc.doc_id.len())])
        .join(mode.as_str())
}
