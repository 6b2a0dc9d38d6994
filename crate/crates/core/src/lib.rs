//! FinDebate: earnings-call transcripts to chaptered multi-horizon
//! investment reports via domain-specific retrieval, five specialist
//! analysts, and a stance-preserving debate round, plus an LLM-judge
//! evaluation harness. Everything runs fully offline against deterministic
//! mock backends; an OpenAI-compatible HTTP adapter plugs in real
//! providers.

pub mod agents;
pub mod config;
pub mod debate;
pub mod gateway;
pub mod index;
pub mod judge;
pub mod pipeline;
pub mod prompts;
pub mod report;
pub mod retrieval;
pub mod segmenter;
pub mod transcript;

pub use agents::{AgentAnalysis, AgentRole, DraftReport};
pub use config::RunConfig;
pub use debate::{DebateOutcome, DebatePhase, DebateSession};
pub use gateway::{ChatRequest, Gateway, GenerationParams};
pub use index::VectorIndex;
pub use judge::{ComparisonTable, Scorecard};
pub use pipeline::{run_pipeline, Manifest, PipelineMode, PipelineOutput};
pub use report::{CompromiseThresholds, Position, Recommendation, StructuredReport, Timeframe};
pub use retrieval::EvidenceBundle;
pub use segmenter::{Chunk, SegmenterConfig};
pub use transcript::TranscriptDocument;
