//! Deterministic offline embedder: hashed unigram+bigram counts,
//! L2-normalized into a fixed 256-dim space.

use super::{EmbedBackend, EmbeddingVector, GatewayError};

pub const OFFLINE_EMBED_DIM: usize = 256;
pub const OFFLINE_EMBED_MODEL_ID: &str = "offline-hash-256";

pub struct HashingEmbedder {
    dim: usize,
}

impl Default for HashingEmbedder {
    fn default() -> Self {
        Self {
            dim: OFFLINE_EMBED_DIM,
        }
    }
}

/// FNV-1a 64-bit; stable across runs and platforms, unlike the std hasher.
fn fnv1a(data: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in data.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl HashingEmbedder {
    pub fn embed_one(&self, text: &str) -> EmbeddingVector {
        let mut values = vec![0f32; self.dim];
        let tokens: Vec<String> = text
            .split_whitespace()
            .map(|w| {
                w.chars()
                    .filter(|c| c.is_alphanumeric())
                    .collect::<String>()
                    .to_lowercase()
            })
            .filter(|w| !w.is_empty())
            .collect();
        for t in &tokens {
            let h = fnv1a(t);
            let idx = (h % self.dim as u64) as usize;
            // Sign bit from a higher hash bit spreads mass over both signs.
            let sign = if (h >> 32) & 1 == 0 { 1.0 } else { -1.0 };
            values[idx] += sign;
        }
        for pair in tokens.windows(2) {
            let h = fnv1a(&format!("{} {}", pair[0], pair[1]));
            let idx = (h % self.dim as u64) as usize;
            let sign = if (h >> 32) & 1 == 0 { 1.0 } else { -1.0 };
            values[idx] += sign;
        }
        let norm = values.iter().map(|v| v * v).sum::<f32>().sqrt();
        if norm > 0.0 {
            for v in &mut values {
                *v /= norm;
            }
        } else {
            // All-sign-cancelled or empty token stream: a fixed unit basis
            // vector keeps the unit-norm contract.
            values[0] = 1.0;
        }
        EmbeddingVector {
            values,
            dim: self.dim,
            model_id: OFFLINE_EMBED_MODEL_ID.to_string(),
        }
    }
}

impl EmbedBackend for HashingEmbedder {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, GatewayError> {
        Ok(texts.iter().map(|t| self.embed_one(t)).collect())
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn model_id(&self) -> &str {
        OFFLINE_EMBED_MODEL_ID
    }
}
