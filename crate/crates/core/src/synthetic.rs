//! Forward-kinematics pose construction on the default skeleton, for tests,
//! demos and throughput runs.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};

use crate::geometry::{Mat3, Vec3};
use crate::pose::{mirror_pose, AuxLabel, PoseKeypoints, PoseRecord};
use crate::rng::CaptionRng;
use crate::skeleton::{smplh_index, smplh_registry, SMPLH_PARENTS, SMPLH_REST_OFFSETS};

/// Local joint rotations applied to the rest skeleton.
#[derive(Debug, Clone)]
pub struct PoseBuilder {
    local: Vec<Mat3>,
}

impl Default for PoseBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl PoseBuilder {
    pub fn new() -> Self {
        PoseBuilder {
            local: alloc::vec![Mat3::IDENTITY; SMPLH_PARENTS.len()],
        }
    }

    /// Composes `rot` onto the local rotation of `joint`.
    pub fn rotate(mut self, joint: &str, rot: Mat3) -> Self {
        let i = smplh_index(joint);
        self.local[i] = rot * self.local[i];
        self
    }

    /// Rotation about x (degrees), the usual flexion axis of legs and spine.
    pub fn rx(self, joint: &str, deg: f64) -> Self {
        self.rotate(joint, Mat3::rot_x(deg))
    }

    pub fn ry(self, joint: &str, deg: f64) -> Self {
        self.rotate(joint, Mat3::rot_y(deg))
    }

    pub fn rz(self, joint: &str, deg: f64) -> Self {
        self.rotate(joint, Mat3::rot_z(deg))
    }

    pub fn build(&self) -> PoseKeypoints {
        let n = SMPLH_PARENTS.len();
        let mut global = alloc::vec![Mat3::IDENTITY; n];
        let mut pos = alloc::vec![Vec3::ZERO; n];
        for i in 0..n {
            let [x, y, z] = SMPLH_REST_OFFSETS[i];
            let offset = Vec3::new(x, y, z);
            match SMPLH_PARENTS[i] {
                usize::MAX => {
                    global[i] = self.local[i];
                    pos[i] = offset;
                }
                p => {
                    global[i] = global[p] * self.local[i];
                    pos[i] = pos[p] + global[p].apply(offset);
                }
            }
        }
        PoseKeypoints::new(smplh_registry(), pos)
            .expect("forward kinematics yields finite coordinates")
    }
}

pub fn t_pose() -> PoseKeypoints {
    PoseBuilder::new().build()
}

pub fn t_pose_record(id: &str) -> PoseRecord {
    PoseRecord::new(id, t_pose())
}

/// Arms hanging down along the body.
pub fn standing() -> PoseBuilder {
    PoseBuilder::new()
        .rz("left_shoulder", -80.0)
        .rz("right_shoulder", 80.0)
}

/// A random but anatomically plausible pose.
pub fn random_pose<R: RngCore + ?Sized>(rng: &mut R) -> PoseKeypoints {
    let mut b = PoseBuilder::new();
    let mut r = |lo: f64, hi: f64| rng.gen_range(lo..hi);
    for spine in ["spine1", "spine2", "spine3"] {
        b = b
            .rx(spine, r(-15.0, 25.0))
            .rz(spine, r(-15.0, 15.0))
            .ry(spine, r(-15.0, 15.0));
    }
    b = b.rx("neck", r(-20.0, 30.0)).rx("head", r(-20.0, 20.0));
    for (side, s) in [("left", 1.0), ("right", -1.0)] {
        b = b
            .rx(&format!("{side}_hip"), r(-100.0, 30.0))
            .rz(&format!("{side}_hip"), s * r(-10.0, 40.0))
            .rx(&format!("{side}_knee"), r(0.0, 150.0))
            .rx(&format!("{side}_ankle"), r(-30.0, 30.0))
            .rz(&format!("{side}_shoulder"), s * r(-85.0, 85.0))
            .ry(&format!("{side}_shoulder"), -s * r(-40.0, 100.0))
            .ry(&format!("{side}_elbow"), -s * r(0.0, 150.0))
            .rz(&format!("{side}_wrist"), r(-30.0, 30.0));
    }
    b.build()
}

const BABEL_LABELS: [&str; 6] = ["walk", "yoga", "stretch", "squat", "jump", "throw"];

/// `n` random poses with ids `synthetic-<i>`; some carry an action label
/// and some come from a pretend dance recording.
pub fn varied_corpus(n: usize, seed: u64) -> Vec<PoseRecord> {
    let mut rng = CaptionRng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut rec = PoseRecord::new(format!("synthetic-{i}"), random_pose(&mut rng));
            match rng.gen_range(0..4) {
                0 => rec.aux_labels.push(AuxLabel::babel(
                    BABEL_LABELS[rng.gen_range(0..BABEL_LABELS.len())],
                )),
                1 => rec.aux_labels.push(AuxLabel::dancing()),
                _ => {}
            }
            rec.sequence_id = Some(format!("seq-{}", i / 10));
            rec
        })
        .collect()
}

/// Lying flat, face down.
pub fn lying() -> PoseKeypoints {
    standing().rx("pelvis", 90.0).build()
}

/// Standing with each spine joint bent `forward` degrees (negative leans
/// back) and `sideways` degrees (negative bends to the left).
pub fn spine_bend(forward: f64, sideways: f64) -> PoseBuilder {
    ["spine1", "spine2", "spine3"]
        .iter()
        .fold(standing(), |b, s| b.rx(s, forward).rz(s, sideways))
}

pub fn bent_left() -> PoseKeypoints {
    spine_bend(0.0, -20.0).build()
}

pub fn bent_right() -> PoseKeypoints {
    mirror_pose(&bent_left()).expect("default registry is paired")
}

pub fn bent_forward() -> PoseKeypoints {
    spine_bend(25.0, 0.0).build()
}

pub fn bent_backward() -> PoseKeypoints {
    spine_bend(-20.0, 0.0).build()
}

/// Straight leg lifted up in front, the ankle higher than the neck.
pub fn raise_leg(b: PoseBuilder, side: &str) -> PoseBuilder {
    b.rx(&format!("{side}_hip"), -160.0)
}

/// Down on the left knee, right foot planted in front.
pub fn kneel_on_left() -> PoseKeypoints {
    standing()
        .rx("left_hip", 10.0)
        .rx("left_knee", 80.0)
        .rx("left_ankle", 60.0)
        .rx("right_hip", -90.0)
        .rx("right_knee", 90.0)
        .build()
}

pub fn kneel_on_right() -> PoseKeypoints {
    mirror_pose(&kneel_on_left()).expect("default registry is paired")
}

/// Upright on both knees, shins flat behind.
pub fn kneeling_upright() -> PoseKeypoints {
    standing()
        .rx("left_knee", 90.0)
        .rx("right_knee", 90.0)
        .rx("left_ankle", 63.0)
        .rx("right_ankle", 63.0)
        .build()
}

/// Both knees folded tight with the knees lowest.
pub fn kneeling_folded() -> PoseKeypoints {
    standing()
        .rx("left_knee", 150.0)
        .rx("right_knee", 150.0)
        .build()
}

/// Knees folded tight and on the ground with the hips low, leaning back.
pub fn kneeling_sitting_back() -> PoseKeypoints {
    standing()
        .rx("left_knee", 160.0)
        .rx("right_knee", 160.0)
        .rx("pelvis", 70.0)
        .build()
}

/// Arms held straight forward, hands a shoulder width apart.
pub fn hands_forward() -> PoseKeypoints {
    PoseBuilder::new()
        .ry("left_shoulder", -95.0)
        .ry("right_shoulder", 95.0)
        .build()
}

/// Standing with arms down; the feet are a shoulder width apart.
pub fn feet_apart() -> PoseKeypoints {
    standing().rz("left_hip", 3.0).rz("right_hip", -3.0).build()
}

/// One constructed pose per production alternative of the default
/// super-posecodes, as `(super-posecode id, alternative index, pose)`. Each
/// pose satisfies its alternative and no other alternative of the same
/// super-posecode.
pub fn super_posecode_examples() -> Vec<(&'static str, usize, PoseKeypoints)> {
    let bend =
        |forward, sideways, raised: &str| raise_leg(spine_bend(forward, sideways), raised).build();
    alloc::vec![
        ("torso_horizontal", 0, lying()),
        ("body_bent_left", 0, bend(0.0, -20.0, "right")),
        ("body_bent_left", 1, bend(0.0, -20.0, "left")),
        ("body_bent_right", 0, bend(0.0, 20.0, "right")),
        ("body_bent_right", 1, bend(0.0, 20.0, "left")),
        ("body_bent_backward", 0, bend(-20.0, 0.0, "right")),
        ("body_bent_backward", 1, bend(-20.0, 0.0, "left")),
        ("body_bent_forward", 0, bend(25.0, 0.0, "right")),
        ("body_bent_forward", 1, bend(25.0, 0.0, "left")),
        ("body_kneel_on_left", 0, kneel_on_left()),
        ("body_kneel_on_right", 0, kneel_on_right()),
        ("body_kneeling", 0, kneeling_upright()),
        ("body_kneeling", 1, kneeling_sitting_back()),
        ("hands_shoulder_width", 0, hands_forward()),
        ("feet_shoulder_width", 0, feet_apart()),
    ]
}
