//! On-disk formats: JSON-lines poses, sequences and captions, the packed
//! binary pose format, and tab-separated definition tables.

mod captions;
mod poses;
mod tables;

pub use captions::{mirror_caption_lines, CaptionLine, ExtractLine, ExtractedItem, ProvenanceLine};
pub use poses::{
    read_corpus, read_poses_binary, read_poses_jsonl, read_sequences_jsonl, write_poses_binary,
    write_poses_jsonl, write_sequences_jsonl, LabeledSequence, BINARY_MAGIC, BINARY_VERSION,
};
pub use tables::{
    item_text, parse_binning, parse_eligibility, parse_exclusions, parse_frequencies, parse_item,
    parse_posecodes, parse_registry, parse_roles, parse_rules, parse_super_posecodes,
    write_binning, write_eligibility, write_exclusions, write_frequencies, write_posecodes,
    write_registry, write_review, write_roles, write_rules, write_super_posecodes, Exclusion,
};

use std::path::Path;

use crate::{Error, Result};

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Non-empty, non-comment lines with their 1-based numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let t = l.trim_end_matches('\r');
        if t.trim().is_empty() || t.trim_start().starts_with('#') {
            None
        } else {
            Some((i + 1, t))
        }
    })
}
