use posecode_core::pipeline::ProvenanceEntry;
use posecode_core::{mirror_text, Caption};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceLine {
    pub fact: String,
    pub category: String,
    pub sentence: usize,
}

/// One output caption, serialized as a single JSON line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaptionLine {
    pub pose_id: String,
    pub caption_index: u32,
    pub profile: String,
    pub seed: u64,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Vec<ProvenanceLine>>,
}

impl CaptionLine {
    pub fn new(caption: &Caption, caption_index: u32, with_provenance: bool) -> Self {
        CaptionLine {
            pose_id: caption.pose_id.clone(),
            caption_index,
            profile: caption.profile.clone(),
            seed: caption.seed,
            text: caption.text.clone(),
            provenance: with_provenance
                .then(|| caption.provenance.iter().map(provenance_line).collect()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("caption lines serialize")
    }
}

fn provenance_line(p: &ProvenanceEntry) -> ProvenanceLine {
    ProvenanceLine {
        fact: p.fact.clone(),
        category: p.category.clone(),
        sentence: p.sentence,
    }
}

/// Swaps left and right in every caption text. Lines that are not caption
/// records are mirrored whole. Provenance keeps naming the facts of the
/// original pose.
pub fn mirror_caption_lines(input: &str) -> String {
    let mut out = String::with_capacity(input.len());
    for piece in input.split_inclusive('\n') {
        let (line, end) = match piece.strip_suffix('\n') {
            Some(l) => (l, "\n"),
            None => (piece, ""),
        };
        match serde_json::from_str::<CaptionLine>(line) {
            Ok(mut c) if c.to_json() == line => {
                c.text = mirror_text(&c.text);
                out.push_str(&c.to_json());
            }
            _ => out.push_str(&mirror_text(line)),
        }
        out.push_str(end);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedItem {
    pub id: String,
    pub value: f64,
    pub unit: String,
    pub category: String,
}

/// Raw posecodes of one pose, for debugging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractLine {
    pub pose_id: String,
    pub posecodes: Vec<ExtractedItem>,
}
