//! Document chunking with sentence-boundary preference.
//!
//! Chunks are measured in characters (not bytes), cover the document,
//! and consecutive chunks share exactly `chunk_overlap_chars`
//! characters, so the original text can be reconstructed by dropping
//! each successor's overlap prefix. Split points prefer a sentence
//! boundary within ±10% of the target size and fall back to a hard
//! cut when none exists.

use super::config::ExtractionConfig;

/// One extraction unit. `index` is 1-based and contiguous across the
/// document; `entities`/`locations` start empty and are filled by
/// entity spotting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub index: usize,
    pub text: String,
    pub entities: Vec<String>,
    pub locations: Vec<String>,
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum ChunkError {
    #[error("document is empty")]
    EmptyDocument,
}

/// Is the character at `pos` a sentence end (terminator followed by
/// whitespace or end of text)?
fn is_sentence_end(chars: &[char], pos: usize) -> bool {
    matches!(chars[pos], '.' | '!' | '?')
        && chars.get(pos + 1).map_or(true, |c| c.is_whitespace())
}

/// Split a document into overlapping chunks.
pub fn chunk_text(doc: &str, config: &ExtractionConfig) -> Result<Vec<Chunk>, ChunkError> {
    if doc.trim().is_empty() {
        return Err(ChunkError::EmptyDocument);
    }
    let size = config.chunk_size_chars;
    let overlap = config.chunk_overlap_chars;
    debug_assert!(overlap < size);

    let chars: Vec<char> = doc.chars().collect();
    let total = chars.len();
    let window = size / 10;

    let mut chunks = Vec::new();
    let mut start = 0usize;
    loop {
        if total - start <= size {
            chunks.push(chars[start..].iter().collect::<String>());
            break;
        }
        // Prefer the last sentence end inside [size - 10%, size + 10%].
        let lo = start + size.saturating_sub(window);
        let hi = (start + size + window).min(total - 1);
        let mut end = start + size;
        for pos in (lo..=hi).rev() {
            if is_sentence_end(&chars, pos) {
                end = pos + 1;
                break;
            }
        }
        // A boundary too close to the overlap would stall the scan;
        // fall back to the hard cut (size > overlap guarantees progress).
        if end <= start + overlap {
            end = start + size;
        }
        chunks.push(chars[start..end].iter().collect::<String>());
        start = end - overlap;
        if start >= total {
            break;
        }
    }

    Ok(chunks
        .into_iter()
        .enumerate()
        .map(|(i, text)| Chunk {
            index: i + 1,
            text,
            entities: Vec::new(),
            locations: Vec::new(),
        })
        .collect())
}

/// Undo chunking: the first chunk plus each successor minus its
/// overlap prefix reproduces the document.
pub fn reconstruct(chunks: &[Chunk], overlap: usize) -> String {
    let mut out = String::new();
    for (i, chunk) in chunks.iter().enumerate() {
        if i == 0 {
            out.push_str(&chunk.text);
        } else {
            out.extend(chunk.text.chars().skip(overlap));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config(size: usize, overlap: usize) -> ExtractionConfig {
        ExtractionConfig {
            chunk_size_chars: size,
            chunk_overlap_chars: overlap,
            ..ExtractionConfig::default()
        }
    }

    #[test]
    fn ten_thousand_chars_make_three_chunks() {
        let doc = "x".repeat(10_000);
        let chunks = chunk_text(&doc, &config(4000, 200)).unwrap();
        assert_eq!(chunks.len(), 3);
        assert_eq!(chunks[0].text.chars().count(), 4000);
        assert_eq!(chunks[1].text.chars().count(), 4000);
        assert_eq!(chunks[2].text.chars().count(), 2400);
        assert_eq!(reconstruct(&chunks, 200), doc);
    }

    #[test]
    fn short_document_is_one_chunk() {
        let chunks = chunk_text("A short tale.", &config(4000, 200)).unwrap();
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].index, 1);
        assert_eq!(chunks[0].text, "A short tale.");
    }

    #[test]
    fn empty_document_is_rejected() {
        assert_eq!(chunk_text("", &config(4000, 200)), Err(ChunkError::EmptyDocument));
        assert_eq!(
            chunk_text("   \n\t", &config(4000, 200)),
            Err(ChunkError::EmptyDocument)
        );
    }

    #[test]
    fn split_prefers_a_sentence_boundary_in_the_window() {
        // One sentence end at position 95 (within 100 ± 10).
        let mut doc = "a".repeat(95);
        doc.push('.');
        doc.push(' ');
        doc.push_str(&"b".repeat(120));
        let chunks = chunk_text(&doc, &config(100, 10)).unwrap();
        assert_eq!(chunks[0].text.chars().count(), 96);
        assert!(chunks[0].text.ends_with('.'));
        assert_eq!(reconstruct(&chunks, 10), doc);
    }

    #[test]
    fn hard_cut_when_no_boundary_exists() {
        let doc = "y".repeat(250);
        let chunks = chunk_text(&doc, &config(100, 10)).unwrap();
        assert_eq!(chunks[0].text.chars().count(), 100);
        assert_eq!(reconstruct(&chunks, 10), doc);
    }

    #[test]
    fn indices_are_one_based_and_contiguous() {
        let doc = "z".repeat(1000);
        let chunks = chunk_text(&doc, &config(100, 10)).unwrap();
        for (i, chunk) in chunks.iter().enumerate() {
            assert_eq!(chunk.index, i + 1);
        }
    }

    #[test]
    fn multibyte_text_is_split_on_character_boundaries() {
        let doc = "Θουκυδίδης Ἀθηναῖος ξυνέγραψε τὸν πόλεμον. ".repeat(40);
        let chunks = chunk_text(&doc, &config(300, 30)).unwrap();
        assert!(chunks.len() > 1);
        assert_eq!(reconstruct(&chunks, 30), doc);
    }

    proptest! {
        #[test]
        fn reconstruction_recovers_any_document(
            doc in "[ a-zA-Z.!?\u{0391}-\u{03c9}]{1,2000}",
            size in 40usize..400,
            overlap in 0usize..30,
        ) {
            prop_assume!(!doc.trim().is_empty());
            let chunks = chunk_text(&doc, &config(size, overlap)).unwrap();
            prop_assert_eq!(reconstruct(&chunks, overlap), doc);
            for (i, chunk) in chunks.iter().enumerate() {
                prop_assert_eq!(chunk.index, i + 1);
            }
        }
    }
}
