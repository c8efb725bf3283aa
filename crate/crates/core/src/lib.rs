//! Deterministic, seedable generation of natural-language descriptions for
//! 3D human poses.
//!
//! A pose (joint coordinates, meters, y-up) is turned into a caption in four
//! stages: elementary *posecodes* are measured and binned with jittered
//! thresholds, then selected (trivial and ambiguous facts removed, optional
//! random skipping, redundancy pruning), aggregated into compact description
//! units, and finally verbalized through a randomized template bank.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! the parallel dataset driver live in the `posecode` crate.
//!
//! ```
//! use posecode_core::{Captioner, CaptionProfile, synthetic};
//!
//! let captioner = Captioner::with_defaults().unwrap();
//! let record = synthetic::t_pose_record("t-pose");
//! let caption = captioner.caption(&record, &CaptionProfile::n1().deterministic(), 7).unwrap();
//! assert!(caption.text.contains("horizontal"));
//! ```
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod aggregation;
pub mod catalog;
mod error;
pub mod geometry;
pub mod pipeline;
pub mod pose;
pub mod posecode;
pub mod realization;
pub mod rng;
pub mod sampler;
pub mod selection;
pub mod skeleton;
pub mod superposecode;
pub mod synthetic;

pub use error::{Error, Result};
pub use geometry::Vec3;
pub use pipeline::{caption_seed, generate_caption, Caption, Captioner, CaptionerData};
pub use pose::{
    derive_auxiliary_keypoints, mirror_pose, mpje, mpje_coords, AuxLabel, AuxiliaryDeriver,
    Keypoint, LabelSource, PoseCorpus, PoseKeypoints, PoseRecord, Registry, Side,
};
pub use posecode::{
    categorize, extract_posecodes, BinningSpec, ExtractedPosecode, Measurement, PosecodeDef,
    PosecodeKind, PosecodeSet, Unit,
};
pub use realization::{mirror_text, AuxLabelMode, CaptionProfile, TemplateBank};
pub use selection::{EligibilityClass, EligibilityTable, MiningParams, StatRule};
pub use superposecode::{Role, RoleEntry, SuperPosecodeDef, SuperPosecodeSet};
