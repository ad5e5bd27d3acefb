//! Entity and location spotting.
//!
//! A lightweight capitalization heuristic: maximal runs of
//! capitalized words become candidates wherever they occur (not only
//! at sentence starts). Ordinary sentence-initial capitalization is
//! discarded by evidence, not position: a leading word is trimmed
//! from a run when it also occurs lowercased in the chunk, or when it
//! is a common function word. Candidates found in the gazetteer are
//! classified as locations; the rest are entities.

use std::collections::BTreeSet;

use super::chunk::Chunk;
use super::gazetteer::Gazetteer;

/// Function words that never start a name. Kept deliberately small;
/// the lowercase-evidence rule handles the rest.
const LEADING_STOPWORDS: [&str; 34] = [
    "the", "a", "an", "in", "on", "at", "of", "and", "but", "for", "nor", "so", "yet", "with",
    "from", "to", "by", "as", "when", "then", "thus", "now", "here", "there", "they", "he",
    "she", "we", "it", "this", "that", "after", "before", "during",
];

/// Strip punctuation from both ends of a raw whitespace token,
/// keeping interior apostrophes and hyphens.
fn core_word(raw: &str) -> &str {
    raw.trim_matches(|c: char| !c.is_alphanumeric())
}

fn is_capitalized(word: &str) -> bool {
    word.chars().next().is_some_and(char::is_uppercase)
}

/// Spot entity and location candidates in a chunk.
///
/// Returns `(entities, locations)` in first-appearance order, each
/// name listed once. Gazetteer membership decides the split.
pub fn spot_entities(chunk: &Chunk, gazetteer: &Gazetteer) -> (Vec<String>, Vec<String>) {
    // Evidence set: words seen lowercased anywhere in the chunk.
    let mut lowercase_seen: BTreeSet<String> = BTreeSet::new();
    for raw in chunk.text.split_whitespace() {
        let core = core_word(raw);
        if core.chars().next().is_some_and(char::is_lowercase) {
            lowercase_seen.insert(core.to_lowercase());
        }
    }

    let mut entities = Vec::new();
    let mut locations = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut run: Vec<String> = Vec::new();

    let mut flush = |run: &mut Vec<String>, entities: &mut Vec<String>, locations: &mut Vec<String>| {
        // Trim capitalized common words from the front: stopwords, or
        // words the chunk itself also uses in lowercase.
        let mut start = 0;
        while start < run.len() {
            let lower = run[start].to_lowercase();
            if LEADING_STOPWORDS.contains(&lower.as_str()) || lowercase_seen.contains(&lower) {
                start += 1;
            } else {
                break;
            }
        }
        if start < run.len() {
            let name = run[start..].join(" ");
            if seen.insert(name.to_lowercase()) {
                if gazetteer.contains(&name) {
                    locations.push(name);
                } else {
                    entities.push(name);
                }
            }
        }
        run.clear();
    };

    for raw in chunk.text.split_whitespace() {
        let core = core_word(raw);
        if !core.is_empty() && is_capitalized(core) {
            run.push(core.to_string());
            // Punctuation after the word ends the run ("Athens," etc.).
            if raw.ends_with(|c: char| !c.is_alphanumeric()) {
                flush(&mut run, &mut entities, &mut locations);
            }
        } else {
            flush(&mut run, &mut entities, &mut locations);
        }
    }
    flush(&mut run, &mut entities, &mut locations);

    (entities, locations)
}
