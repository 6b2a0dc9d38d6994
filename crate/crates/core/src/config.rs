//! Run configuration: TOML file + CLI overrides. Secrets never live in the
//! file; the API key comes from the environment at gateway construction.

use crate::agents::AgentRole;
use crate::gateway::http::HttpProviderConfig;
use crate::gateway::{GenerationParams, RetryPolicy};
use crate::report::CompromiseThresholds;
use crate::segmenter::SegmenterConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("failed to read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to parse config {path}: {source}")]
    Parse {
        path: String,
        source: toml::de::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct GatewayConfig {
    /// None => offline deterministic backends.
    pub provider: Option<HttpProviderConfig>,
    pub retry: Option<RetryPolicy>,
    pub max_inflight: Option<usize>,
    pub embed_batch_limit: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RetrievalConfig {
    pub k_per_dimension: usize,
    pub evidence_budget_tokens: usize,
    pub standard_rag_k: usize,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self {
            k_per_dimension: 8,
            evidence_budget_tokens: 3000,
            standard_rag_k: 16,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DebateSettings {
    pub rounds: usize,
    pub thresholds: CompromiseThresholds,
}

impl Default for DebateSettings {
    fn default() -> Self {
        Self {
            rounds: 1,
            thresholds: CompromiseThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub gateway: GatewayConfig,
    pub generation: GenerationParams,
    /// Per-agent overrides; absent roles use `generation`.
    pub agent_overrides: BTreeMap<AgentRole, GenerationParams>,
    pub segmenter: SegmenterConfig,
    pub retrieval: RetrievalConfig,
    pub debate: DebateSettings,
    /// Seed for the offline mock backends.
    pub mock_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gateway: GatewayConfig::default(),
            generation: GenerationParams::default(),
            agent_overrides: BTreeMap::new(),
            segmenter: SegmenterConfig::default(),
            retrieval: RetrievalConfig::default(),
            debate: DebateSettings::default(),
            mock_seed: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: RunConfig = toml::from_str(&raw).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.segmenter
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.retrieval.k_per_dimension == 0 {
            return Err(ConfigError::Invalid("k_per_dimension must be >= 1".into()));
        }
        if self.retrieval.standard_rag_k == 0 {
            return Err(ConfigError::Invalid("standard_rag_k must be >= 1".into()));
        }
        if self.debate.rounds == 0 {
            return Err(ConfigError::Invalid("debate rounds must be >= 1".into()));
        }
        if !(0.0..=2.0).contains(&self.generation.temperature) {
            return Err(ConfigError::Invalid("temperature must be in [0, 2]".into()));
        }
        Ok(())
    }

    /// Build the gateway described by this config. `force_offline` wins over
    /// any configured provider.
    pub fn build_gateway(&self, force_offline: bool) -> Result<crate::gateway::Gateway, ConfigError> {
        use crate::gateway::http::{HttpChatBackend, HttpEmbedBackend};
        use crate::gateway::mock::MockChatBackend;
        use crate::gateway::offline_embed::HashingEmbedder;
        use crate::gateway::Gateway;

        let retry = self.gateway.retry.unwrap_or_default();
        let max_inflight = self.gateway.max_inflight.unwrap_or(8);
        let batch = self.gateway.embed_batch_limit.unwrap_or(64);

        match (&self.gateway.provider, force_offline) {
            (Some(provider), false) => {
                let provider = provider
                    .clone()
                    .with_env_key()
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                let chat_model = provider.chat_model.clone();
                Ok(Gateway::new(
                    Box::new(HttpChatBackend::new(provider.clone())),
                    Box::new(HttpEmbedBackend::new(provider)),
                    retry,
                    max_inflight,
                    batch,
                )
                .with_chat_model_id(chat_model))
            }
            _ => Ok(Gateway::new(
                Box::new(MockChatBackend::compliant(self.mock_seed)),
                Box::new(HashingEmbedder::default()),
                RetryPolicy {
                    initial_backoff_ms: 0,
                    ..retry
                },
                max_inflight,
                batch,
            )),
        }
    }
}
