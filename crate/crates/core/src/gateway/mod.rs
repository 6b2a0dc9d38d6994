//! Provider-agnostic chat and embedding gateway.
//!
//! The pipeline only ever talks to [`Gateway`], which layers retry,
//! in-flight limiting, and call accounting over a pluggable backend pair.
//! Deterministic offline backends live in [`mock`] and [`offline_embed`];
//! the OpenAI-compatible HTTP adapter lives in [`http`].

pub mod http;
pub mod mock;
pub mod offline_embed;

use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("backend unavailable after {attempts} attempts: {detail}")]
    BackendUnavailable { attempts: usize, detail: String },
    #[error("provider returned an empty completion")]
    ResponseEmpty,
    #[error("embedding batch of {got} exceeds limit {limit}")]
    BatchTooLarge { got: usize, limit: usize },
    #[error("empty text at batch index {index}")]
    EmptyText { index: usize },
    #[error("completion was truncated by the provider ({detail})")]
    Truncated { detail: String },
}

/// Generation parameters; defaults follow the evaluation setup used for
/// every report-producing call.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct GenerationParams {
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub top_p: f64,
    pub frequency_penalty: f64,
}

impl Default for GenerationParams {
    fn default() -> Self {
        Self {
            temperature: 0.6,
            max_output_tokens: 6500,
            top_p: 0.85,
            frequency_penalty: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChatRequest {
    pub system_prompt: String,
    pub user_prompt: String,
    pub params: GenerationParams,
    /// Which agent is asking; backends may key behavior on it.
    pub role_tag: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EmbeddingVector {
    pub values: Vec<f32>,
    pub dim: usize,
    pub model_id: String,
}

impl EmbeddingVector {
    pub fn l2_norm(&self) -> f32 {
        self.values.iter().map(|v| v * v).sum::<f32>().sqrt()
    }
}

pub trait ChatBackend: Send + Sync {
    fn chat(&self, req: &ChatRequest) -> Result<String, GatewayError>;
}

pub trait EmbedBackend: Send + Sync {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, GatewayError>;
    fn dim(&self) -> usize;
    fn model_id(&self) -> &str;
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: usize,
    pub initial_backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            initial_backoff_ms: 500,
        }
    }
}

/// Counting semaphore bounding concurrent backend calls.
struct Inflight {
    limit: usize,
    state: Mutex<usize>,
    cv: Condvar,
}

impl Inflight {
    fn new(limit: usize) -> Self {
        Self {
            limit: limit.max(1),
            state: Mutex::new(0),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> InflightGuard<'_> {
        let mut n = self.state.lock().unwrap();
        while *n >= self.limit {
            n = self.cv.wait(n).unwrap();
        }
        *n += 1;
        InflightGuard { sem: self }
    }
}

struct InflightGuard<'a> {
    sem: &'a Inflight,
}

impl Drop for InflightGuard<'_> {
    fn drop(&mut self) {
        let mut n = self.sem.state.lock().unwrap();
        *n -= 1;
        self.sem.cv.notify_one();
    }
}

/// Shared front door for all model traffic.
pub struct Gateway {
    chat_backend: Box<dyn ChatBackend>,
    embed_backend: Box<dyn EmbedBackend>,
    retry: RetryPolicy,
    embed_batch_limit: usize,
    inflight: Inflight,
    chat_model_id: String,
    chat_calls: AtomicU64,
    embed_calls: AtomicU64,
}

impl Gateway {
    pub fn new(
        chat_backend: Box<dyn ChatBackend>,
        embed_backend: Box<dyn EmbedBackend>,
        retry: RetryPolicy,
        max_inflight: usize,
        embed_batch_limit: usize,
    ) -> Self {
        Self {
            chat_backend,
            embed_backend,
            retry,
            embed_batch_limit,
            inflight: Inflight::new(max_inflight),
            chat_model_id: "offline-mock".to_string(),
            chat_calls: AtomicU64::new(0),
            embed_calls: AtomicU64::new(0),
        }
    }

    pub fn with_chat_model_id(mut self, id: impl Into<String>) -> Self {
        self.chat_model_id = id.into();
        self
    }

    pub fn chat_model_id(&self) -> &str {
        &self.chat_model_id
    }

    /// Fully offline gateway: deterministic mock chat + hashing embedder.
    pub fn offline(seed: u64) -> Self {
        Self::new(
            Box::new(mock::MockChatBackend::compliant(seed)),
            Box::new(offline_embed::HashingEmbedder::default()),
            RetryPolicy {
                max_attempts: 3,
                initial_backoff_ms: 0,
            },
            8,
            64,
        )
    }

    pub fn chat(&self, req: &ChatRequest) -> Result<String, GatewayError> {
        let _guard = self.inflight.acquire();
        self.chat_calls.fetch_add(1, Ordering::Relaxed);
        let mut backoff = self.retry.initial_backoff_ms;
        let mut last = String::new();
        for attempt in 1..=self.retry.max_attempts {
            match self.chat_backend.chat(req) {
                Ok(text) if text.trim().is_empty() => return Err(GatewayError::ResponseEmpty),
                Ok(text) => return Ok(text),
                Err(GatewayError::BackendUnavailable { detail, .. }) => {
                    last = detail;
                    if attempt < self.retry.max_attempts && backoff > 0 {
                        std::thread::sleep(Duration::from_millis(backoff));
                        backoff = backoff.saturating_mul(2);
                    }
                }
                Err(other) => return Err(other),
            }
        }
        Err(GatewayError::BackendUnavailable {
            attempts: self.retry.max_attempts,
            detail: last,
        })
    }

    pub fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, GatewayError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        if texts.len() > self.embed_batch_limit {
            return Err(GatewayError::BatchTooLarge {
                got: texts.len(),
                limit: self.embed_batch_limit,
            });
        }
        if let Some(i) = texts.iter().position(|t| t.trim().is_empty()) {
            return Err(GatewayError::EmptyText { index: i });
        }
        let _guard = self.inflight.acquire();
        self.embed_calls.fetch_add(1, Ordering::Relaxed);
        let mut backoff = self.retry.initial_backoff_ms;
        let mut last = String::new();
        for attempt in 1..=self.retry.max_attempts {
            match self.embed_backend.embed(texts) {
                Ok(vecs) => return Ok(vecs),
                Err(GatewayError::BackendUnavailable { detail, .. }) => {
                    last = detail;
                    if attempt < self.retry.max_attempts && backoff > 0 {
                        std::thread::sleep(Duration::from_millis(backoff));
                        backoff = backoff.saturating_mul(2);
                    }
                }
                Err(other) => return Err(other),
            }
        }
        Err(GatewayError::BackendUnavailable {
            attempts: self.retry.max_attempts,
            detail: last,
        })
    }

    pub fn embed_dim(&self) -> usize {
        self.embed_backend.dim()
    }

    pub fn embed_model_id(&self) -> &str {
        self.embed_backend.model_id()
    }

    pub fn chat_call_count(&self) -> u64 {
        self.chat_calls.load(Ordering::Relaxed)
    }

    pub fn embed_call_count(&self) -> u64 {
        self.embed_calls.load(Ordering::Relaxed)
    }
}
