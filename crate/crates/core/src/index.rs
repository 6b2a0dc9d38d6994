//! In-process exact vector index.
//!
//! Stores L2-normalized copies so cosine similarity is a dot product, scans
//! exhaustively (one earnings call yields hundreds of chunks, not millions),
//! and persists to a versioned binary file for byte-stable round trips.

use crate::gateway::EmbeddingVector;
use crate::segmenter::Chunk;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"FDIX";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IndexError {
    #[error("dimension mismatch: index dim {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("duplicate chunk_id {0}")]
    DuplicateId(String),
    #[error("search on empty index")]
    EmptyIndex,
    #[error("io failure: {0}")]
    IoFailure(String),
    #[error("unrecognized or incompatible index file (magic/version mismatch)")]
    FormatVersionMismatch,
}

impl From<std::io::Error> for IndexError {
    fn from(e: std::io::Error) -> Self {
        IndexError::IoFailure(e.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddedChunk {
    pub chunk: Chunk,
    pub vector: EmbeddingVector,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SearchHit {
    pub chunk_id: String,
    pub score: f32,
    pub chunk: Chunk,
}

pub struct VectorIndex {
    dim: usize,
    model_id: String,
    /// Normalized vectors, row-major.
    vectors: Vec<f32>,
    chunks: Vec<Chunk>,
}

fn normalize(values: &[f32]) -> Vec<f32> {
    let norm = values.iter().map(|v| v * v).sum::<f32>().sqrt();
    if norm > 0.0 {
        values.iter().map(|v| v / norm).collect()
    } else {
        values.to_vec()
    }
}

impl VectorIndex {
    pub fn new(dim: usize, model_id: impl Into<String>) -> Self {
        Self {
            dim,
            model_id: model_id.into(),
            vectors: Vec::new(),
            chunks: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    /// Add a batch atomically: any rejected item leaves the index unchanged.
    pub fn add(&mut self, items: &[EmbeddedChunk]) -> Result<usize, IndexError> {
        let mut seen: HashSet<&str> = self.chunks.iter().map(|c| c.chunk_id.as_str()).collect();
        for item in items {
            if item.vector.dim != self.dim || item.vector.values.len() != self.dim {
                return Err(IndexError::DimMismatch {
                    expected: self.dim,
                    got: item.vector.dim,
                });
            }
            if !seen.insert(&item.chunk.chunk_id) {
                return Err(IndexError::DuplicateId(item.chunk.chunk_id.clone()));
            }
        }
        for item in items {
            self.vectors.extend(normalize(&item.vector.values));
            self.chunks.push(item.chunk.clone());
        }
        Ok(items.len())
    }

    /// Exact top-k by cosine similarity; ties break by ascending chunk_id.
    pub fn search(&self, query: &EmbeddingVector, k: usize) -> Result<Vec<SearchHit>, IndexError> {
        if query.dim != self.dim || query.values.len() != self.dim {
            return Err(IndexError::DimMismatch {
                expected: self.dim,
                got: query.dim,
            });
        }
        if self.is_empty() {
            return Err(IndexError::EmptyIndex);
        }
        let q = normalize(&query.values);
        let mut scored: Vec<(f32, usize)> = self
            .chunks
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let row = &self.vectors[i * self.dim..(i + 1) * self.dim];
                let dot: f32 = row.iter().zip(&q).map(|(a, b)| a * b).sum();
                (dot, i)
            })
            .collect();
        scored.sort_by(|a, b| {
            b.0.total_cmp(&a.0)
                .then_with(|| self.chunks[a.1].chunk_id.cmp(&self.chunks[b.1].chunk_id))
        });
        scored.truncate(k);
        Ok(scored
            .into_iter()
            .map(|(score, i)| SearchHit {
                chunk_id: self.chunks[i].chunk_id.clone(),
                score,
                chunk: self.chunks[i].clone(),
            })
            .collect())
    }

    /// Byte-stable serialization: header, fixed-width f32 vectors, then
    /// length-prefixed JSON chunk records.
    pub fn persist(&self, path: &Path) -> Result<(), IndexError> {
        let mut buf: Vec<u8> = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.dim as u32).to_le_bytes());
        buf.extend_from_slice(&(self.chunks.len() as u32).to_le_bytes());
        let mid = self.model_id.as_bytes();
        buf.extend_from_slice(&(mid.len() as u16).to_le_bytes());
        buf.extend_from_slice(mid);
        for v in &self.vectors {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for c in &self.chunks {
            let rec = serde_json::to_vec(c).map_err(|e| IndexError::IoFailure(e.to_string()))?;
            buf.extend_from_slice(&(rec.len() as u32).to_le_bytes());
            buf.extend_from_slice(&rec);
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(&buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, IndexError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let mut pos = 0usize;
        let take = |pos: &mut usize, n: usize| -> Result<&[u8], IndexError> {
            if *pos + n > bytes.len() {
                return Err(IndexError::IoFailure("truncated index file".into()));
            }
            let s = &bytes[*pos..*pos + n];
            *pos += n;
            Ok(s)
        };
        if take(&mut pos, 4)? != MAGIC {
            return Err(IndexError::FormatVersionMismatch);
        }
        let version = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(IndexError::FormatVersionMismatch);
        }
        let dim = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
        let count = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
        let mid_len = u16::from_le_bytes(take(&mut pos, 2)?.try_into().unwrap()) as usize;
        let model_id = String::from_utf8(take(&mut pos, mid_len)?.to_vec())
            .map_err(|_| IndexError::FormatVersionMismatch)?;
        let mut vectors = Vec::with_capacity(count * dim);
        for _ in 0..count * dim {
            vectors.push(f32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()));
        }
        let mut chunks = Vec::with_capacity(count);
        for _ in 0..count {
            let len = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
            let rec = take(&mut pos, len)?;
            let chunk: Chunk =
                serde_json::from_slice(rec).map_err(|e| IndexError::IoFailure(e.to_string()))?;
            chunks.push(chunk);
        }
        if pos != bytes.len() {
            return Err(IndexError::IoFailure("trailing bytes in index file".into()));
        }
        Ok(Self {
            dim,
            model_id,
            vectors,
            chunks,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmenter::BoundaryKind;

    fn chunk(id: &str) -> Chunk {
        Chunk {
            chunk_id: id.to_string(),
            doc_id: "doc".into(),
            text: format!("text of {id}"),
            char_span: (0, 1),
            boundary_kind: BoundaryKind::Paragraph,
            section_heading: "Body".into(),
            speaker: "Unattributed".into(),
        }
    }

    fn vec_of(dim: usize, values: Vec<f32>) -> EmbeddingVector {
        EmbeddingVector {
            dim,
            values,
            model_id: "test".into(),
        }
    }

    fn item(id: &str, values: Vec<f32>) -> EmbeddedChunk {
        EmbeddedChunk {
            chunk: chunk(id),
            vector: vec_of(values.len(), values),
        }
    }

    #[test]
    fn add_and_count() {
        let mut idx = VectorIndex::new(3, "test");
        let n = idx
            .add(&[
                item("a", vec![1.0, 0.0, 0.0]),
                item("b", vec![0.0, 1.0, 0.0]),
                item("c", vec![0.0, 0.0, 1.0]),
            ])
            .unwrap();
        assert_eq!(n, 3);
        assert_eq!(idx.len(), 3);
    }

    #[test]
    fn duplicate_id_rejected_atomically() {
        let mut idx = VectorIndex::new(2, "test");
        idx.add(&[item("a", vec![1.0, 0.0])]).unwrap();
        let err = idx
            .add(&[item("b", vec![0.0, 1.0]), item("a", vec![1.0, 1.0])])
            .unwrap_err();
        assert!(matches!(err, IndexError::DuplicateId(id) if id == "a"));
        assert_eq!(idx.len(), 1, "no partial batch");
    }

    #[test]
    fn dim_mismatch_rejected() {
        let mut idx = VectorIndex::new(2, "test");
        assert!(matches!(
            idx.add(&[item("a", vec![1.0, 0.0, 0.0])]),
            Err(IndexError::DimMismatch { expected: 2, got: 3 })
        ));
        idx.add(&[item("a", vec![1.0, 0.0])]).unwrap();
        assert!(matches!(
            idx.search(&vec_of(3, vec![1.0, 0.0, 0.0]), 1),
            Err(IndexError::DimMismatch { .. })
        ));
    }

    #[test]
    fn identity_query_scores_one() {
        let mut idx = VectorIndex::new(2, "test");
        idx.add(&[item("a", vec![1.0, 0.0]), item("b", vec![0.0, 1.0])])
            .unwrap();
        let hits = idx.search(&vec_of(2, vec![1.0, 0.0]), 1).unwrap();
        assert_eq!(hits[0].chunk_id, "a");
        assert!((hits[0].score - 1.0).abs() < 1e-6);
    }

    #[test]
    fn k_truncates_to_size() {
        let mut idx = VectorIndex::new(2, "test");
        idx.add(&[item("a", vec![1.0, 0.0]), item("b", vec![0.0, 1.0])])
            .unwrap();
        assert_eq!(idx.search(&vec_of(2, vec![1.0, 1.0]), 10).unwrap().len(), 2);
    }

    #[test]
    fn empty_index_search_errors() {
        let idx = VectorIndex::new(2, "test");
        assert!(matches!(
            idx.search(&vec_of(2, vec![1.0, 0.0]), 1),
            Err(IndexError::EmptyIndex)
        ));
    }

    #[test]
    fn ties_break_by_chunk_id() {
        let mut idx = VectorIndex::new(2, "test");
        idx.add(&[
            item("zeta", vec![1.0, 0.0]),
            item("alpha", vec![1.0, 0.0]),
            item("mid", vec![0.0, 1.0]),
        ])
        .unwrap();
        let hits = idx.search(&vec_of(2, vec![1.0, 0.0]), 3).unwrap();
        assert_eq!(hits[0].chunk_id, "alpha");
        assert_eq!(hits[1].chunk_id, "zeta");
    }

    #[test]
    fn persist_round_trip_is_search_equivalent_and_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let mut idx = VectorIndex::new(3, "test");
        idx.add(&[
            item("a", vec![1.0, 0.2, 0.0]),
            item("b", vec![0.0, 1.0, 0.4]),
            item("c", vec![0.3, 0.0, 1.0]),
        ])
        .unwrap();
        let p1 = dir.path().join("one.fdix");
        let p2 = dir.path().join("two.fdix");
        idx.persist(&p1).unwrap();
        let loaded = VectorIndex::load(&p1).unwrap();
        loaded.persist(&p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());

        for q in [vec![1.0, 0.0, 0.0], vec![0.2, 0.9, 0.1], vec![0.5, 0.5, 0.5]] {
            let a = idx.search(&vec_of(3, q.clone()), 3).unwrap();
            let b = loaded.search(&vec_of(3, q), 3).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn empty_index_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let idx = VectorIndex::new(4, "test");
        let p = dir.path().join("empty.fdix");
        idx.persist(&p).unwrap();
        assert_eq!(VectorIndex::load(&p).unwrap().len(), 0);
    }

    #[test]
    fn corrupted_file_never_loads_partially() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.fdix");
        std::fs::write(&p, b"not an index at all").unwrap();
        assert!(matches!(
            VectorIndex::load(&p),
            Err(IndexError::FormatVersionMismatch)
        ));
        let mut idx = VectorIndex::new(2, "test");
        idx.add(&[item("a", vec![1.0, 0.0])]).unwrap();
        let good = dir.path().join("good.fdix");
        idx.persist(&good).unwrap();
        let mut bytes = std::fs::read(&good).unwrap();
        bytes.truncate(bytes.len() - 3);
        std::fs::write(&p, bytes).unwrap();
        assert!(matches!(VectorIndex::load(&p), Err(IndexError::IoFailure(_))));
    }
}
