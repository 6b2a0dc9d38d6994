//! OpenAI-compatible HTTP adapter for chat completions and embeddings.
//!
//! Model names, base URL, and the API key all come from configuration or
//! the `FINDEBATE_API_KEY` environment variable, never from code.

use super::{ChatBackend, ChatRequest, EmbedBackend, EmbeddingVector, GatewayError};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::time::Duration;

pub const API_KEY_ENV: &str = "FINDEBATE_API_KEY";

fn default_timeout() -> u64 {
    120
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HttpProviderConfig {
    pub base_url: String,
    pub chat_model: String,
    pub embed_model: String,
    pub embed_dim: usize,
    /// Never serialized back out; normally resolved from the environment.
    #[serde(skip_serializing, default)]
    pub api_key: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

impl HttpProviderConfig {
    fn resolved_key(&self) -> Option<String> {
        self.api_key
            .clone()
            .or_else(|| std::env::var(API_KEY_ENV).ok())
    }

    /// Require a usable key, filling it from `FINDEBATE_API_KEY` if the
    /// config left it unset.
    pub fn with_env_key(mut self) -> Result<Self, String> {
        match self.resolved_key() {
            Some(key) => {
                self.api_key = Some(key);
                Ok(self)
            }
            None => Err(format!(
                "no API key: set {API_KEY_ENV} or provide api_key in config"
            )),
        }
    }
}

pub struct HttpChatBackend {
    cfg: HttpProviderConfig,
    client: reqwest::blocking::Client,
}

impl HttpChatBackend {
    pub fn new(cfg: HttpProviderConfig) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()
            .expect("http client");
        Self { cfg, client }
    }
}

#[derive(Deserialize)]
struct ChatCompletion {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
    finish_reason: Option<String>,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: Option<String>,
}

fn transport_err(detail: impl std::fmt::Display) -> GatewayError {
    GatewayError::BackendUnavailable {
        attempts: 1,
        detail: detail.to_string(),
    }
}

impl ChatBackend for HttpChatBackend {
    fn chat(&self, req: &ChatRequest) -> Result<String, GatewayError> {
        let body = json!({
            "model": self.cfg.chat_model,
            "messages": [
                {"role": "system", "content": req.system_prompt},
                {"role": "user", "content": req.user_prompt},
            ],
            "temperature": req.params.temperature,
            "max_tokens": req.params.max_output_tokens,
            "top_p": req.params.top_p,
            "frequency_penalty": req.params.frequency_penalty,
        });
        let mut http = self
            .client
            .post(format!("{}/chat/completions", self.cfg.base_url.trim_end_matches('/')))
            .json(&body);
        if let Some(key) = self.cfg.resolved_key() {
            http = http.bearer_auth(key);
        }
        let resp = http.send().map_err(transport_err)?;
        let status = resp.status();
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(transport_err(format!("provider status {status}")));
        }
        if !status.is_success() {
            // Client errors are not retryable; surface them as final.
            return Err(GatewayError::ResponseEmpty);
        }
        let parsed: ChatCompletion = resp.json().map_err(transport_err)?;
        let choice = parsed.choices.into_iter().next().ok_or(GatewayError::ResponseEmpty)?;
        let content = choice.message.content.unwrap_or_default();
        if choice.finish_reason.as_deref() == Some("length") {
            // Truncation is reported, never silently accepted.
            return Err(GatewayError::Truncated {
                detail: format!("finish_reason=length after {} chars", content.len()),
            });
        }
        Ok(content)
    }
}

pub struct HttpEmbedBackend {
    cfg: HttpProviderConfig,
    client: reqwest::blocking::Client,
}

impl HttpEmbedBackend {
    pub fn new(cfg: HttpProviderConfig) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()
            .expect("http client");
        Self { cfg, client }
    }
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingDatum>,
}

#[derive(Deserialize)]
struct EmbeddingDatum {
    index: usize,
    embedding: Vec<f32>,
}

impl EmbedBackend for HttpEmbedBackend {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, GatewayError> {
        let body = json!({ "model": self.cfg.embed_model, "input": texts });
        let mut http = self
            .client
            .post(format!("{}/embeddings", self.cfg.base_url.trim_end_matches('/')))
            .json(&body);
        if let Some(key) = self.cfg.resolved_key() {
            http = http.bearer_auth(key);
        }
        let resp = http.send().map_err(transport_err)?;
        let status = resp.status();
        if !status.is_success() {
            return Err(transport_err(format!("provider status {status}")));
        }
        let mut parsed: EmbeddingResponse = resp.json().map_err(transport_err)?;
        parsed.data.sort_by_key(|d| d.index);
        if parsed.data.len() != texts.len() {
            return Err(transport_err(format!(
                "embedding count mismatch: sent {}, got {}",
                texts.len(),
                parsed.data.len()
            )));
        }
        Ok(parsed
            .data
            .into_iter()
            .map(|d| EmbeddingVector {
                dim: d.embedding.len(),
                values: d.embedding,
                model_id: self.cfg.embed_model.clone(),
            })
            .collect())
    }

    fn dim(&self) -> usize {
        self.cfg.embed_dim
    }

    fn model_id(&self) -> &str {
        &self.cfg.embed_model
    }
}
