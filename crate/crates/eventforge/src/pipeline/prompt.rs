//! Extraction prompt assembly.
//!
//! The template is the system prompt used for every extraction run.
//! One deliberate change from its original form: the OUTPUT FORMAT
//! block types the coordinate literals with `^^xsd:double`, because
//! untyped coordinate strings were a known defect of earlier runs
//! (downstream consumers silently dropped the values). The rest is
//! reproduced verbatim.
//!
//! When retrieved context is supplied, a clearly delimited RETRIEVED
//! CONTEXT section is inserted between the spotted-name lines and the
//! TASK section.

use super::chunk::Chunk;

/// The extraction prompt skeleton. `{chunk_num}`, `{chunk}`,
/// `{entities}`, `{locations}`, and `{context_section}` are
/// substituted by [`build_prompt`]; no placeholder survives into the
/// output.
const TEMPLATE: &str = "\
You are extracting historical events from text using ONLY the information provided in the text chunk.

TEXT CHUNK {chunk_num} TO ANALYZE:
{chunk}

ENTITIES FOUND: {entities}
LOCATIONS FOUND: {locations}

{context_section}TASK: Extract historical events using text information and making REASONABLE INFERENCES.

REQUIREMENTS:
1. Extract ONLY events explicitly mentioned in the text chunk
2. Use information directly stated in the text
3. MAKE REASONABLE INFERENCES from context clues
4. Infer coordinates, countries, regions from textual context

OUTPUT FORMAT:
ste:Event{chunk_num}_1 a ste:Event ;
    ste:hasType \"event description\" ;
    ste:hasAgent \"person/group\" ;
    ste:hasTime \"time period\" ;
    ste:hasLocation \"location name\" ;
    ste:hasLatitude \"37.9838\"^^xsd:double ;
    ste:hasLongitude \"23.7275\"^^xsd:double ;
    ste:hasCountry \"Greece\" ;
    ste:hasRegion \"Attica\" ;
    ste:hasLocationSource \"inferred\" ;
    ste:hasResult \"outcome\" .
";

/// Render the extraction prompt for one chunk.
pub fn build_prompt(chunk: &Chunk, rag_context: Option<&str>) -> String {
    let context_section = match rag_context {
        Some(context) => format!("RETRIEVED CONTEXT:\n{}\n\n", context.trim_end()),
        None => String::new(),
    };
    TEMPLATE
        .replace("{chunk_num}", &chunk.index.to_string())
        .replace("{chunk}", &chunk.text)
        .replace("{entities}", &chunk.entities.join(", "))
        .replace("{locations}", &chunk.locations.join(", "))
        .replace("{context_section}", &context_section)
}
