//! The LLM backend contract and the deterministic mock.
//!
//! Real model adapters (hosted APIs, local inference servers) plug in
//! behind [`LlmBackend`]; the pipeline itself never knows which model
//! is talking. [`MockBackend`] is the shipped reference
//! implementation: fully deterministic, offline, and faithful to the
//! OUTPUT FORMAT block of the extraction prompt, so end-to-end runs
//! and tests exercise the same code paths a live model would.

use std::sync::Mutex;

#[derive(Debug, thiserror::Error)]
#[error("backend '{backend}' failed: {reason}")]
pub struct BackendError {
    pub backend: String,
    pub reason: String,
}

/// A completion-only language model. Implementations must be
/// deterministic for a given prompt at temperature 0 and must not
/// mutate pipeline state.
pub trait LlmBackend: Send + Sync {
    fn name(&self) -> &str;
    fn complete(&self, prompt: &str) -> Result<String, BackendError>;
}

// ===== Mock =====

/// Deterministic stand-in for a live model. It reads the chunk
/// number and the spotted names out of the prompt and emits one
/// event block in exactly the OUTPUT FORMAT shape: id
/// `ste:Event{chunk_num}_1`, dated `{432 - chunk_num} BC`, located at
/// the first spotted location (omitted when none was found), with no
/// coordinates — locating events is enrichment's job.
#[derive(Debug, Default)]
pub struct MockBackend;

/// Pull the value of a `LABEL: a, b, c` prompt line.
fn prompt_line<'a>(prompt: &'a str, label: &str) -> Option<&'a str> {
    prompt
        .lines()
        .find_map(|line| line.strip_prefix(label))
        .map(str::trim)
}

fn first_item(list: Option<&str>) -> Option<&str> {
    list.and_then(|items| items.split(',').next())
        .map(str::trim)
        .filter(|item| !item.is_empty())
}

impl LlmBackend for MockBackend {
    fn name(&self) -> &str {
        "mock"
    }

    fn complete(&self, prompt: &str) -> Result<String, BackendError> {
        let chunk_num: i64 = prompt
            .lines()
            .find_map(|line| line.strip_prefix("TEXT CHUNK "))
            .and_then(|rest| rest.split_whitespace().next())
            .and_then(|num| num.parse().ok())
            .ok_or_else(|| BackendError {
                backend: "mock".to_string(),
                reason: "prompt has no TEXT CHUNK header".to_string(),
            })?;

        let agent = first_item(prompt_line(prompt, "ENTITIES FOUND:"))
            .unwrap_or("unnamed parties")
            .to_string();
        let location = first_item(prompt_line(prompt, "LOCATIONS FOUND:"));

        // Keep mock chronology in the war's era: chunk 1 -> 431 BC.
        let year = (432 - chunk_num).max(1);
        let mut event = format!(
            "ste:Event{chunk_num}_1 a ste:Event ;\n\
             \x20   ste:hasType \"historical event\" ;\n\
             \x20   ste:hasAgent \"{agent}\" ;\n\
             \x20   ste:hasTime \"{year} BC\" ;\n"
        );
        if let Some(location) = location {
            event.push_str(&format!("    ste:hasLocation \"{location}\" ;\n"));
        }
        event.push_str(&format!(
            "    ste:hasResult \"the account of {agent} shaped the course of the war\" .\n"
        ));
        Ok(event)
    }
}

// ===== Scripted backend (test helper) =====

/// Replays canned responses in call order; calls beyond the script
/// fail. Useful for exercising per-chunk failure handling.
pub struct ScriptedBackend {
    name: String,
    responses: Mutex<Vec<Result<String, String>>>,
}

impl ScriptedBackend {
    pub fn new<I>(responses: I) -> Self
    where
        I: IntoIterator<Item = Result<String, String>>,
    {
        let mut queue: Vec<_> = responses.into_iter().collect();
        queue.reverse(); // pop() serves in original order
        ScriptedBackend {
            name: "scripted".to_string(),
            responses: Mutex::new(queue),
        }
    }
}

impl LlmBackend for ScriptedBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn complete(&self, _prompt: &str) -> Result<String, BackendError> {
        match self.responses.lock().unwrap().pop() {
            Some(Ok(body)) => Ok(body),
            Some(Err(reason)) => Err(BackendError {
                backend: self.name.clone(),
                reason,
            }),
            None => Err(BackendError {
                backend: self.name.clone(),
                reason: "script exhausted".to_string(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::chunk::Chunk;
    use crate::pipeline::prompt::build_prompt;

    fn prompt_for(index: usize, entities: &[&str], locations: &[&str]) -> String {
        build_prompt(
            &Chunk {
                index,
                text: "some text".to_string(),
                entities: entities.iter().map(|s| s.to_string()).collect(),
                locations: locations.iter().map(|s| s.to_string()).collect(),
            },
            None,
        )
    }

    #[test]
    fn mock_emits_one_event_in_output_format() {
        let out = MockBackend
            .complete(&prompt_for(1, &["Pericles", "Cleon"], &["Athens"]))
            .unwrap();
        assert!(out.starts_with("ste:Event1_1 a ste:Event ;"));
        assert!(out.contains("ste:hasAgent \"Pericles\""));
        assert!(out.contains("ste:hasTime \"431 BC\""));
        assert!(out.contains("ste:hasLocation \"Athens\""));
        assert!(out.trim_end().ends_with('.'));
    }

    #[test]
    fn mock_is_deterministic_and_chunk_scoped() {
        let p2 = prompt_for(2, &["Archidamus"], &[]);
        let first = MockBackend.complete(&p2).unwrap();
        let second = MockBackend.complete(&p2).unwrap();
        assert_eq!(first, second);
        assert!(first.contains("ste:Event2_1"));
        assert!(first.contains("ste:hasTime \"430 BC\""));
        assert!(!first.contains("ste:hasLocation"));
    }

    #[test]
    fn mock_without_chunk_header_fails() {
        assert!(MockBackend.complete("no header here").is_err());
    }

    #[test]
    fn scripted_backend_replays_and_then_fails() {
        let backend = ScriptedBackend::new([
            Ok("first".to_string()),
            Err("model unavailable".to_string()),
        ]);
        assert_eq!(backend.complete("p").unwrap(), "first");
        let err = backend.complete("p").unwrap_err();
        assert!(err.to_string().contains("model unavailable"));
        assert!(backend.complete("p").is_err());
    }
}
