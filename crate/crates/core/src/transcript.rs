//! Earnings-call transcript parsing.
//!
//! Input is markdown-flavoured plain text: `###` lines open sections,
//! `**Speaker**` lines (optionally followed by a `: `-prefixed line) open
//! speaker turns. Anything outside a marker falls through to a synthetic
//! "Body" section with speaker "Unattributed".

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum TranscriptError {
    #[error("empty input: transcript text is blank")]
    EmptyInput,
    #[error("io failure reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A single speaker's contiguous contribution.
///
/// `char_span` points into the normalized `raw_text` of the owning document;
/// `text` is exactly that slice.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SpeakerTurn {
    pub speaker: String,
    pub text: String,
    pub char_span: (usize, usize),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TranscriptSection {
    pub heading: String,
    pub turns: Vec<SpeakerTurn>,
}

/// A parsed earnings call. `doc_id` is a content hash of the normalized
/// bytes, so identical transcripts get identical ids regardless of filename.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TranscriptDocument {
    pub doc_id: String,
    pub ticker: Option<String>,
    pub title: String,
    pub sections: Vec<TranscriptSection>,
    pub raw_text: String,
    /// Non-fatal parse diagnostics, e.g. a degenerate no-marker document.
    pub warnings: Vec<String>,
}

/// Lowercase hex SHA-256 of the CRLF-normalized bytes.
pub fn doc_fingerprint(raw: &str) -> String {
    let normalized = normalize_newlines(raw);
    let mut hasher = Sha256::new();
    hasher.update(normalized.as_bytes());
    hex_lower(&hasher.finalize())
}

/// SHA-256 hex digest of arbitrary text; the shared audit primitive.
pub fn text_digest(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    hex_lower(&hasher.finalize())
}

fn hex_lower(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

fn normalize_newlines(raw: &str) -> String {
    raw.replace("\r\n", "\n").replace('\r', "\n")
}

fn is_section_marker(line: &str) -> Option<&str> {
    let t = line.trim_start();
    if let Some(rest) = t.strip_prefix("###") {
        if rest.starts_with(' ') || rest.is_empty() {
            return Some(rest.trim());
        }
    }
    None
}

fn is_title_marker(line: &str) -> Option<&str> {
    let t = line.trim_start();
    if let Some(rest) = t.strip_prefix("##") {
        if !rest.starts_with('#') && (rest.starts_with(' ') || rest.is_empty()) {
            return Some(rest.trim());
        }
    }
    None
}

/// `**Name**` alone on a line, tolerating a trailing colon.
fn is_speaker_marker(line: &str) -> Option<&str> {
    let t = line.trim();
    let body = t.strip_prefix("**")?;
    let end = body.find("**")?;
    let name = &body[..end];
    let rest = body[end + 2..].trim();
    if name.is_empty() || !(rest.is_empty() || rest == ":") {
        return None;
    }
    Some(name)
}

/// Parse a transcript into sections and speaker turns.
///
/// Purely a function of the input bytes: CRLF is normalized to LF up front
/// and all spans refer to the normalized text.
pub fn parse_transcript(raw: &str) -> Result<TranscriptDocument, TranscriptError> {
    if raw.trim().is_empty() {
        return Err(TranscriptError::EmptyInput);
    }
    let raw_text = normalize_newlines(raw);
    let doc_id = doc_fingerprint(&raw_text);

    let mut title = String::new();
    let mut warnings = Vec::new();
    let mut sections: Vec<TranscriptSection> = Vec::new();
    let mut current_heading: Option<String> = None;
    let mut current_turns: Vec<SpeakerTurn> = Vec::new();
    // Pending turn accumulation: speaker + content start offset.
    let mut pending_speaker: Option<String> = None;
    let mut content_start: Option<usize> = None;
    let mut content_end: usize = 0;
    let mut marker_seen = false;

    let flush_turn = |speaker: Option<String>,
                          start: Option<usize>,
                          end: usize,
                          turns: &mut Vec<SpeakerTurn>,
                          raw_text: &str| {
        if let (Some(sp), Some(st)) = (speaker, start) {
            // Trim the span to its non-whitespace extent.
            let slice = &raw_text[st..end];
            let lead = slice.len() - slice.trim_start().len();
            let trail = slice.len() - slice.trim_end().len();
            let (s, e) = (st + lead, end - trail);
            if s < e {
                turns.push(SpeakerTurn {
                    speaker: sp,
                    text: raw_text[s..e].to_string(),
                    char_span: (s, e),
                });
            }
        }
    };

    let mut offset = 0usize;
    for line in raw_text.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        let stripped = line.strip_suffix('\n').unwrap_or(line);

        if let Some(heading) = is_section_marker(stripped) {
            flush_turn(
                pending_speaker.take(),
                content_start.take(),
                content_end,
                &mut current_turns,
                &raw_text,
            );
            if current_heading.is_some() || !current_turns.is_empty() {
                sections.push(TranscriptSection {
                    heading: current_heading.take().unwrap_or_else(|| "Body".to_string()),
                    turns: std::mem::take(&mut current_turns),
                });
            }
            current_heading = Some(if heading.is_empty() {
                "Untitled".to_string()
            } else {
                heading.to_string()
            });
            continue;
        }
        if let Some(t) = is_title_marker(stripped) {
            if title.is_empty() {
                title = t.to_string();
                continue;
            }
            // Later ## lines are ordinary content.
        }
        if let Some(name) = is_speaker_marker(stripped) {
            marker_seen = true;
            flush_turn(
                pending_speaker.take(),
                content_start.take(),
                content_end,
                &mut current_turns,
                &raw_text,
            );
            pending_speaker = Some(name.to_string());
            content_start = None;
            continue;
        }

        if stripped.trim().is_empty() && content_start.is_none() {
            continue;
        }
        let mut start = line_start;
        if content_start.is_none() {
            if pending_speaker.is_none() {
                pending_speaker = Some("Unattributed".to_string());
            }
            // First content line of a marked turn may carry the `:` prefix.
            let t = stripped.trim_start();
            if t.starts_with(':') {
                let colon = line_start + (stripped.len() - t.len());
                let after = &raw_text[colon + 1..line_start + stripped.len()];
                let pad = after.len() - after.trim_start().len();
                start = colon + 1 + pad;
            }
            content_start = Some(start);
        }
        content_end = line_start + stripped.trim_end().len();
    }
    flush_turn(
        pending_speaker.take(),
        content_start.take(),
        content_end,
        &mut current_turns,
        &raw_text,
    );
    if current_heading.is_some() || !current_turns.is_empty() {
        sections.push(TranscriptSection {
            heading: current_heading.unwrap_or_else(|| "Body".to_string()),
            turns: current_turns,
        });
    }
    // Drop sections whose body ended up empty (e.g. heading with no prose).
    sections.retain(|s| !s.turns.is_empty());

    if sections.is_empty() {
        // Nothing but markers / whitespace; fall back to one raw turn.
        let trimmed = raw_text.trim();
        let start = raw_text.find(trimmed).unwrap_or(0);
        sections.push(TranscriptSection {
            heading: "Body".to_string(),
            turns: vec![SpeakerTurn {
                speaker: "Unattributed".to_string(),
                text: trimmed.to_string(),
                char_span: (start, start + trimmed.len()),
            }],
        });
    }
    if !marker_seen {
        warnings.push("degenerate parse: no speaker markers found".to_string());
    }
    if title.is_empty() {
        title = "Untitled Earnings Call".to_string();
    }

    Ok(TranscriptDocument {
        doc_id,
        ticker: None,
        title,
        sections,
        raw_text,
        warnings,
    })
}

/// Read and parse one transcript file.
pub fn load_transcript(path: &Path) -> Result<TranscriptDocument, TranscriptError> {
    let raw = std::fs::read_to_string(path).map_err(|e| TranscriptError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_transcript(&raw)
}

/// Walk a directory for `*.txt` / `*.md` transcripts, sorted by path.
pub fn ingest_dir(dir: &Path) -> Result<Vec<TranscriptDocument>, TranscriptError> {
    let mut paths: Vec<_> = walkdir::WalkDir::new(dir)
        .into_iter()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("txt") | Some("md")
            )
        })
        .collect();
    paths.sort();
    paths.iter().map(|p| load_transcript(p)).collect()
}

/// Collapse all whitespace runs to single spaces; the round-trip comparison
/// normal form.
pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl TranscriptDocument {
    /// All turns in document order.
    pub fn turns(&self) -> impl Iterator<Item = (&TranscriptSection, &SpeakerTurn)> {
        self.sections
            .iter()
            .flat_map(|s| s.turns.iter().map(move |t| (s, t)))
    }
}
