//! Recursive boundary-preserving segmentation.
//!
//! Chunks prefer paragraph boundaries, then sentence boundaries, then plain
//! word boundaries, and never cross a speaker turn. The token proxy is the
//! whitespace word count, so every size rule here is deterministic and
//! provider-independent.

use crate::transcript::TranscriptDocument;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SegmenterError {
    #[error("invalid segmenter config: min_chunk_tokens ({min}) must be < max_chunk_tokens ({max})")]
    InvalidConfig { min: usize, max: usize },
}

/// Coarsest boundary level that produced a chunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundaryKind {
    Paragraph,
    Sentence,
    Token,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Chunk {
    pub chunk_id: String,
    pub doc_id: String,
    pub text: String,
    pub char_span: (usize, usize),
    pub boundary_kind: BoundaryKind,
    pub section_heading: String,
    pub speaker: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SegmenterConfig {
    pub max_chunk_tokens: usize,
    pub min_chunk_tokens: usize,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        Self {
            max_chunk_tokens: 512,
            min_chunk_tokens: 32,
        }
    }
}

impl SegmenterConfig {
    pub fn validate(&self) -> Result<(), SegmenterError> {
        if self.min_chunk_tokens == 0 || self.min_chunk_tokens >= self.max_chunk_tokens {
            return Err(SegmenterError::InvalidConfig {
                min: self.min_chunk_tokens,
                max: self.max_chunk_tokens,
            });
        }
        Ok(())
    }
}

/// Whitespace word count; the deterministic stand-in for tokenizer lengths.
pub fn token_estimate(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Abbreviations whose trailing period never ends a sentence.
const ABBREVIATIONS: &[&str] = &["Mr.", "Inc.", "Q.", "U.S."];

/// Byte offsets (relative to `text`) immediately after each sentence end.
///
/// A sentence ends at `.`/`?`/`!` followed by whitespace and then an
/// uppercase letter or an opening quote.
fn sentence_end_offsets(text: &str) -> Vec<usize> {
    let bytes = text.as_bytes();
    let mut ends = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (i, &(pos, c)) in chars.iter().enumerate() {
        if !matches!(c, '.' | '?' | '!') {
            continue;
        }
        // Lookahead: whitespace then uppercase/quote.
        let mut j = i + 1;
        if j >= chars.len() || !chars[j].1.is_whitespace() {
            continue;
        }
        while j < chars.len() && chars[j].1.is_whitespace() {
            j += 1;
        }
        if j >= chars.len() {
            continue;
        }
        let next = chars[j].1;
        if !(next.is_uppercase() || next == '"' || next == '\'' || next == '\u{201C}') {
            continue;
        }
        if c == '.' {
            // Back up to the start of the word ending here.
            let mut w = pos;
            while w > 0 && !bytes[w - 1].is_ascii_whitespace() {
                w -= 1;
            }
            let word = &text[w..pos + 1];
            if ABBREVIATIONS.iter().any(|a| word.ends_with(a)) {
                continue;
            }
        }
        ends.push(pos + c.len_utf8());
    }
    ends
}

/// Non-whitespace trimmed sub-span of `text[start..end]`, absolute offsets
/// relative to `base`.
fn trimmed_span(text: &str, start: usize, end: usize, base: usize) -> Option<(usize, usize)> {
    let slice = &text[start..end];
    let t = slice.trim_start();
    let lead = slice.len() - t.len();
    let t = t.trim_end();
    if t.is_empty() {
        return None;
    }
    Some((base + start + lead, base + start + lead + t.len()))
}

struct Fragment {
    span: (usize, usize), // absolute in raw_text
    kind: BoundaryKind,
}

/// Split one speaker turn into fragments honoring the boundary hierarchy.
fn split_turn(raw_text: &str, span: (usize, usize), max: usize) -> Vec<Fragment> {
    let (turn_start, turn_end) = span;
    let text = &raw_text[turn_start..turn_end];
    let mut out = Vec::new();

    // Paragraphs: blank-line separated regions.
    let mut para_bounds = Vec::new();
    let mut cursor = 0usize;
    let blank = regex::Regex::new(r"\n[ \t]*\n").unwrap();
    for m in blank.find_iter(text) {
        para_bounds.push((cursor, m.start()));
        cursor = m.end();
    }
    para_bounds.push((cursor, text.len()));

    for (ps, pe) in para_bounds {
        let Some((abs_s, abs_e)) = trimmed_span(text, ps, pe, turn_start) else {
            continue;
        };
        let para = &raw_text[abs_s..abs_e];
        if token_estimate(para) <= max {
            out.push(Fragment {
                span: (abs_s, abs_e),
                kind: BoundaryKind::Paragraph,
            });
            continue;
        }
        // Sentence pass: greedy packing up to the limit. Adjacent undersized
        // sentences merge; a single oversized sentence drops to word splits.
        let mut sent_spans = Vec::new();
        let mut s_cursor = 0usize;
        for end in sentence_end_offsets(para) {
            if let Some(sp) = trimmed_span(para, s_cursor, end, abs_s) {
                sent_spans.push(sp);
            }
            s_cursor = end;
        }
        if let Some(sp) = trimmed_span(para, s_cursor, para.len(), abs_s) {
            sent_spans.push(sp);
        }

        let mut acc: Option<(usize, usize, usize)> = None; // (start, end, words)
        for (ss, se) in sent_spans {
            let words = token_estimate(&raw_text[ss..se]);
            if words > max {
                if let Some((as_, ae, _)) = acc.take() {
                    out.push(Fragment {
                        span: (as_, ae),
                        kind: BoundaryKind::Sentence,
                    });
                }
                out.extend(split_words(raw_text, (ss, se), max));
                continue;
            }
            match acc {
                Some((as_, _, aw)) if aw + words <= max => {
                    acc = Some((as_, se, aw + words));
                }
                Some((as_, ae, _)) => {
                    out.push(Fragment {
                        span: (as_, ae),
                        kind: BoundaryKind::Sentence,
                    });
                    acc = Some((ss, se, words));
                }
                None => acc = Some((ss, se, words)),
            }
        }
        if let Some((as_, ae, _)) = acc {
            out.push(Fragment {
                span: (as_, ae),
                kind: BoundaryKind::Sentence,
            });
        }
    }
    out
}

/// Word-boundary split of an oversized sentence into runs of ≤ max words.
fn split_words(raw_text: &str, span: (usize, usize), max: usize) -> Vec<Fragment> {
    let (start, end) = span;
    let text = &raw_text[start..end];
    let mut words: Vec<(usize, usize)> = Vec::new();
    let mut w_start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = w_start.take() {
                words.push((s, i));
            }
        } else if w_start.is_none() {
            w_start = Some(i);
        }
    }
    if let Some(s) = w_start {
        words.push((s, text.len()));
    }
    words
        .chunks(max)
        .map(|run| Fragment {
            span: (start + run[0].0, start + run[run.len() - 1].1),
            kind: BoundaryKind::Token,
        })
        .collect()
}

/// Segment a parsed document into retrieval chunks.
pub fn segment_document(
    doc: &TranscriptDocument,
    cfg: &SegmenterConfig,
) -> Result<Vec<Chunk>, SegmenterError> {
    cfg.validate()?;
    let mut chunks = Vec::new();
    let mut ordinal = 0usize;
    for section in &doc.sections {
        for turn in &section.turns {
            for frag in split_turn(&doc.raw_text, turn.char_span, cfg.max_chunk_tokens) {
                let (s, e) = frag.span;
                chunks.push(Chunk {
                    chunk_id: format!("{}:{:04}", &doc.doc_id[..12.min(doc.doc_id.len())], ordinal),
                    doc_id: doc.doc_id.clone(),
                    text: doc.raw_text[s..e].to_string(),
                    char_span: (s, e),
                    boundary_kind: frag.kind,
                    section_heading: section.heading.clone(),
                    speaker: turn.speaker.clone(),
                });
                ordinal += 1;
            }
        }
    }
    Ok(chunks)
}

/// Serialize chunks as line-delimited JSON for inspection artifacts.
pub fn chunks_to_jsonl(chunks: &[Chunk]) -> String {
    let mut out = String::new();
    for c in chunks {
        out.push_str(&serde_json::to_string(c).expect("chunk serializes"));
        out.push('\n');
    }
    out
}
