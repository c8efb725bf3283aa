//! The SMPL-H joint ordering used as the default keypoint registry.

use alloc::sync::Arc;

use crate::pose::Registry;

/// The 52 SMPL-H joints, in model order.
pub const SMPLH_JOINTS: [&str; 52] = [
    "pelvis",
    "left_hip",
    "right_hip",
    "spine1",
    "left_knee",
    "right_knee",
    "spine2",
    "left_ankle",
    "right_ankle",
    "spine3",
    "left_foot",
    "right_foot",
    "neck",
    "left_collar",
    "right_collar",
    "head",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_index1",
    "left_index2",
    "left_index3",
    "left_middle1",
    "left_middle2",
    "left_middle3",
    "left_pinky1",
    "left_pinky2",
    "left_pinky3",
    "left_ring1",
    "left_ring2",
    "left_ring3",
    "left_thumb1",
    "left_thumb2",
    "left_thumb3",
    "right_index1",
    "right_index2",
    "right_index3",
    "right_middle1",
    "right_middle2",
    "right_middle3",
    "right_pinky1",
    "right_pinky2",
    "right_pinky3",
    "right_ring1",
    "right_ring2",
    "right_ring3",
    "right_thumb1",
    "right_thumb2",
    "right_thumb3",
];

/// Keypoints appended by [`crate::AuxiliaryDeriver`].
pub const AUXILIARY_JOINTS: [&str; 3] = ["left_hand", "right_hand", "torso"];

/// Parent of each SMPL-H joint (`usize::MAX` for the root).
pub const SMPLH_PARENTS: [usize; 52] = [
    usize::MAX,
    0,
    0,
    0,
    1,
    2,
    3,
    4,
    5,
    6,
    7,
    8,
    9,
    9,
    9,
    12,
    13,
    14,
    16,
    17,
    18,
    19,
    20,
    22,
    23,
    20,
    25,
    26,
    20,
    28,
    29,
    20,
    31,
    32,
    20,
    34,
    35,
    21,
    37,
    38,
    21,
    40,
    41,
    21,
    43,
    44,
    21,
    46,
    47,
    21,
    49,
    50,
];

/// Approximate neutral-shape rest offsets of each joint from its parent, in
/// meters, T-pose, facing +z with the body's left towards +x.
pub const SMPLH_REST_OFFSETS: [[f64; 3]; 52] = [
    [0.0, 0.93, 0.0],
    [0.06, -0.09, 0.0],
    [-0.06, -0.09, 0.0],
    [0.0, 0.11, -0.02],
    [0.04, -0.38, 0.0],
    [-0.04, -0.38, 0.0],
    [0.0, 0.14, 0.0],
    [-0.01, -0.40, -0.04],
    [0.01, -0.40, -0.04],
    [0.0, 0.06, 0.02],
    [0.02, -0.06, 0.12],
    [-0.02, -0.06, 0.12],
    [0.0, 0.21, -0.03],
    [0.08, 0.12, 0.0],
    [-0.08, 0.12, 0.0],
    [0.0, 0.09, 0.05],
    [0.12, 0.05, 0.0],
    [-0.12, 0.05, 0.0],
    [0.26, 0.0, 0.0],
    [-0.26, 0.0, 0.0],
    [0.25, 0.0, 0.0],
    [-0.25, 0.0, 0.0],
    // left hand
    [0.09, 0.0, 0.03],
    [0.03, 0.0, 0.0],
    [0.02, 0.0, 0.0],
    [0.095, 0.0, 0.01],
    [0.035, 0.0, 0.0],
    [0.025, 0.0, 0.0],
    [0.08, 0.0, -0.04],
    [0.02, 0.0, 0.0],
    [0.015, 0.0, 0.0],
    [0.09, 0.0, -0.015],
    [0.03, 0.0, 0.0],
    [0.02, 0.0, 0.0],
    [0.03, -0.01, 0.03],
    [0.03, 0.0, 0.02],
    [0.025, 0.0, 0.01],
    // right hand
    [-0.09, 0.0, 0.03],
    [-0.03, 0.0, 0.0],
    [-0.02, 0.0, 0.0],
    [-0.095, 0.0, 0.01],
    [-0.035, 0.0, 0.0],
    [-0.025, 0.0, 0.0],
    [-0.08, 0.0, -0.04],
    [-0.02, 0.0, 0.0],
    [-0.015, 0.0, 0.0],
    [-0.09, 0.0, -0.015],
    [-0.03, 0.0, 0.0],
    [-0.02, 0.0, 0.0],
    [-0.03, -0.01, 0.03],
    [-0.03, 0.0, 0.02],
    [-0.025, 0.0, 0.01],
];

/// Index of a joint in [`SMPLH_JOINTS`]. Panics on unknown names, so only
/// use it with literals.
pub fn smplh_index(name: &str) -> usize {
    SMPLH_JOINTS
        .iter()
        .position(|j| *j == name)
        .unwrap_or_else(|| panic!("unknown SMPL-H joint {name}"))
}

pub fn smplh_registry() -> Arc<Registry> {
    Arc::new(Registry::new(SMPLH_JOINTS.iter().copied()).expect("SMPL-H joint table is valid"))
}
