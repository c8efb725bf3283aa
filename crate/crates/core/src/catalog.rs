//! Shipped defaults: the 77 elementary posecodes, their binning, the ten
//! super-posecodes with roles, the eligibility table, the statistics rules
//! and the template bank.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::pose::Registry;
use crate::posecode::{BinningSpec, BinningTable, PosecodeDef, PosecodeKind, PosecodeSet};
use crate::realization::TemplateBank;
use crate::selection::{EligibilityClass, EligibilityTable, RuleItem, StatRule};
use crate::superposecode::{Requirement, Role, RoleEntry, SuperPosecodeDef, SuperPosecodeSet};
use crate::Result;

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

pub fn default_binning_specs() -> Vec<BinningSpec> {
    use PosecodeKind::*;
    let spec = |kind, cats: &[&str], thresholds: &[f64], noise| {
        BinningSpec::new(kind, strings(cats), thresholds.to_vec(), noise)
            .expect("shipped binning is valid")
    };
    vec![
        spec(
            Angle,
            &[
                "completely bent",
                "almost completely bent",
                "bent at right angle",
                "partially bent",
                "slightly bent",
                "straight",
            ],
            &[45.0, 75.0, 105.0, 135.0, 160.0],
            5.0,
        ),
        spec(
            Distance,
            &["close", "shoulder width apart", "spread", "wide"],
            &[0.20, 0.40, 0.80],
            0.05,
        ),
        spec(
            RelPosX,
            &["at the right of", "x-ignored", "at the left of"],
            &[-0.15, 0.15],
            0.05,
        ),
        spec(
            RelPosY,
            &["below", "y-ignored", "above"],
            &[-0.15, 0.15],
            0.05,
        ),
        spec(
            RelPosZ,
            &["behind", "z-ignored", "in front of"],
            &[-0.15, 0.15],
            0.05,
        ),
        spec(
            PitchRoll,
            &["vertical", "pitch-roll-ignored", "horizontal"],
            &[10.0, 80.0],
            5.0,
        ),
        spec(
            GroundContact,
            &["on the ground", "ground-ignored"],
            &[0.10],
            0.05,
        ),
    ]
}

pub fn binning_table() -> BinningTable {
    BinningTable::new(default_binning_specs()).expect("one spec per kind")
}

/// `angle.<middle joint>`, otherwise `<kind>.<joint>.<joint>`.
pub fn posecode_id(kind: PosecodeKind, joints: &[&str]) -> String {
    match kind {
        PosecodeKind::Angle => alloc::format!("angle.{}", joints[1]),
        _ => alloc::format!("{}.{}", kind.name(), joints.join(".")),
    }
}

fn def(kind: PosecodeKind, joints: &[&str]) -> PosecodeDef {
    PosecodeDef::new(posecode_id(kind, joints), kind, joints)
}

pub fn default_posecodes() -> Vec<PosecodeDef> {
    use PosecodeKind::*;
    let mut out = Vec::with_capacity(77);
    for side in ["left", "right"] {
        for (a, b, c) in [("hip", "knee", "ankle"), ("shoulder", "elbow", "wrist")] {
            let j = [
                alloc::format!("{side}_{a}"),
                alloc::format!("{side}_{b}"),
                alloc::format!("{side}_{c}"),
            ];
            out.push(def(Angle, &[&j[0], &j[1], &j[2]]));
        }
    }
    // keep the angle block ordered by limb: left leg, right leg, left arm, right arm
    out.swap(1, 2);

    let distances: [(&str, &str); 22] = [
        ("left_elbow", "right_elbow"),
        ("left_hand", "right_hand"),
        ("left_knee", "right_knee"),
        ("left_foot", "right_foot"),
        ("left_hand", "left_shoulder"),
        ("left_hand", "right_shoulder"),
        ("right_hand", "left_shoulder"),
        ("right_hand", "right_shoulder"),
        ("left_hand", "right_elbow"),
        ("right_hand", "left_elbow"),
        ("left_hand", "left_knee"),
        ("left_hand", "right_knee"),
        ("right_hand", "left_knee"),
        ("right_hand", "right_knee"),
        ("left_hand", "left_ankle"),
        ("left_hand", "right_ankle"),
        ("right_hand", "left_ankle"),
        ("right_hand", "right_ankle"),
        ("left_hand", "left_foot"),
        ("left_hand", "right_foot"),
        ("right_hand", "left_foot"),
        ("right_hand", "right_foot"),
    ];
    for (a, b) in distances {
        out.push(def(Distance, &[a, b]));
    }

    let relpos: [(&str, &str, &str); 22] = [
        ("left_shoulder", "right_shoulder", "yz"),
        ("left_elbow", "right_elbow", "yz"),
        ("left_hand", "right_hand", "xyz"),
        ("left_knee", "right_knee", "yz"),
        ("left_foot", "right_foot", "xyz"),
        ("neck", "pelvis", "xz"),
        ("left_ankle", "neck", "y"),
        ("right_ankle", "neck", "y"),
        ("left_hip", "left_knee", "y"),
        ("right_hip", "right_knee", "y"),
        ("left_hand", "left_shoulder", "xy"),
        ("right_hand", "right_shoulder", "xy"),
        ("left_foot", "left_hip", "xy"),
        ("right_foot", "right_hip", "xy"),
        ("left_wrist", "neck", "y"),
        ("right_wrist", "neck", "y"),
        ("left_hand", "left_hip", "y"),
        ("right_hand", "right_hip", "y"),
        ("left_hand", "torso", "z"),
        ("right_hand", "torso", "z"),
        ("left_foot", "torso", "z"),
        ("right_foot", "torso", "z"),
    ];
    for (a, b, axes) in relpos {
        for axis in axes.chars() {
            let kind = match axis {
                'x' => RelPosX,
                'y' => RelPosY,
                _ => RelPosZ,
            };
            out.push(def(kind, &[a, b]));
        }
    }

    let pitchroll: [(&str, &str); 13] = [
        ("left_hip", "left_knee"),
        ("right_hip", "right_knee"),
        ("left_knee", "left_ankle"),
        ("right_knee", "right_ankle"),
        ("left_shoulder", "left_elbow"),
        ("right_shoulder", "right_elbow"),
        ("left_elbow", "left_wrist"),
        ("right_elbow", "right_wrist"),
        ("pelvis", "left_shoulder"),
        ("pelvis", "right_shoulder"),
        ("pelvis", "neck"),
        ("left_hand", "right_hand"),
        ("left_foot", "right_foot"),
    ];
    for (a, b) in pitchroll {
        out.push(def(PitchRoll, &[a, b]));
    }

    for j in ["left_knee", "right_knee", "left_foot", "right_foot"] {
        out.push(def(GroundContact, &[j]));
    }
    out
}

/// Default definitions on the SMPL-H registry extended with hands and torso.
pub fn default_posecode_set() -> Result<PosecodeSet> {
    let deriver = crate::AuxiliaryDeriver::new(Registry::smplh())?;
    PosecodeSet::new(
        deriver.extended_registry().clone(),
        default_posecodes(),
        binning_table(),
    )
}

fn req(id: &str, category: &str) -> Requirement {
    Requirement::new(id, category)
}

pub fn default_super_posecodes() -> Vec<SuperPosecodeDef> {
    use EligibilityClass::{Skippable, Unskippable};
    let sp = |id: &str,
              subject: &str,
              category: &str,
              eligibility,
              alternatives: Vec<Vec<Requirement>>| SuperPosecodeDef {
        id: id.into(),
        subject: subject.into(),
        category: category.into(),
        eligibility,
        alternatives,
    };
    let bent_sideways = |side: &str| {
        ["left_ankle", "right_ankle"]
            .iter()
            .map(|a| {
                vec![
                    req(&alloc::format!("relpos_y.{a}.neck"), "below"),
                    req("relpos_x.neck.pelvis", side),
                ]
            })
            .collect::<Vec<_>>()
    };
    let bent_z = |cat: &str| {
        ["left_ankle", "right_ankle"]
            .iter()
            .map(|a| {
                vec![
                    req(&alloc::format!("relpos_y.{a}.neck"), "below"),
                    req("relpos_z.neck.pelvis", cat),
                ]
            })
            .collect::<Vec<_>>()
    };
    vec![
        sp(
            "torso_horizontal",
            "torso",
            "horizontal",
            Unskippable,
            vec![vec![
                req("pitchroll.pelvis.left_shoulder", "horizontal"),
                req("pitchroll.pelvis.right_shoulder", "horizontal"),
            ]],
        ),
        sp(
            "body_bent_left",
            "body",
            "bent left",
            Skippable,
            bent_sideways("at the left of"),
        ),
        sp(
            "body_bent_right",
            "body",
            "bent right",
            Skippable,
            bent_sideways("at the right of"),
        ),
        sp(
            "body_bent_backward",
            "body",
            "bent backward",
            Unskippable,
            bent_z("behind"),
        ),
        sp(
            "body_bent_forward",
            "body",
            "bent forward",
            Skippable,
            bent_z("in front of"),
        ),
        sp(
            "body_kneel_on_left",
            "body",
            "kneeling on left",
            Unskippable,
            vec![vec![
                req("relpos_y.left_knee.right_knee", "below"),
                req("ground_contact.left_knee", "on the ground"),
                req("ground_contact.right_foot", "on the ground"),
            ]],
        ),
        sp(
            "body_kneel_on_right",
            "body",
            "kneeling on right",
            Unskippable,
            vec![vec![
                req("relpos_y.left_knee.right_knee", "above"),
                req("ground_contact.right_knee", "on the ground"),
                req("ground_contact.left_foot", "on the ground"),
            ]],
        ),
        sp(
            "body_kneeling",
            "body",
            "kneeling",
            Unskippable,
            vec![
                vec![
                    req("relpos_y.left_hip.left_knee", "above"),
                    req("relpos_y.right_hip.right_knee", "above"),
                    req("ground_contact.left_knee", "on the ground"),
                    req("ground_contact.right_knee", "on the ground"),
                ],
                vec![
                    req("angle.left_knee", "completely bent"),
                    req("angle.right_knee", "completely bent"),
                    req("ground_contact.left_knee", "on the ground"),
                    req("ground_contact.right_knee", "on the ground"),
                ],
            ],
        ),
        sp(
            "hands_shoulder_width",
            "hands",
            "shoulder width apart",
            Unskippable,
            vec![vec![
                req("distance.left_hand.right_hand", "shoulder width apart"),
                req("pitchroll.left_hand.right_hand", "horizontal"),
            ]],
        ),
        sp(
            "feet_shoulder_width",
            "feet",
            "shoulder width apart",
            Skippable,
            vec![vec![
                req("distance.left_foot.right_foot", "shoulder width apart"),
                req("pitchroll.left_foot.right_foot", "horizontal"),
            ]],
        ),
    ]
}

pub fn default_roles() -> Vec<RoleEntry> {
    let whole = |id: &str, role| RoleEntry {
        posecode: id.into(),
        category: None,
        role,
        scope: None,
    };
    let mut out: Vec<RoleEntry> = ["left_knee", "right_knee", "left_foot", "right_foot"]
        .iter()
        .map(|j| whole(&alloc::format!("ground_contact.{j}"), Role::Support))
        .collect();
    out.push(whole("pitchroll.pelvis.left_shoulder", Role::Support));
    out.push(whole("pitchroll.pelvis.right_shoulder", Role::Support));
    for knee in ["left_knee", "right_knee"] {
        out.push(RoleEntry {
            posecode: alloc::format!("angle.{knee}"),
            category: Some("completely bent".into()),
            role: Role::SemiSupport,
            scope: Some("body_kneeling".into()),
        });
    }
    out
}

pub fn default_super_posecode_set(posecodes: &PosecodeSet) -> Result<SuperPosecodeSet> {
    SuperPosecodeSet::new(posecodes, default_super_posecodes(), default_roles())
}

/// Categories never verbalized because they are inherently ambiguous, as
/// `(posecode id, category)`.
pub fn default_ambiguous(set: &PosecodeSet) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for d in 0..set.len() {
        let def = set.def(d);
        let id = def.id.as_str();
        let kind = def.kind;
        let hand = def.joints.iter().any(|j| j.ends_with("_hand"));
        let whole = kind == PosecodeKind::GroundContact
            || matches!(
                id,
                "pitchroll.left_hand.right_hand"
                    | "pitchroll.left_foot.right_foot"
                    | "pitchroll.pelvis.left_shoulder"
                    | "pitchroll.pelvis.right_shoulder"
            );
        for cat in &set.spec(d).categories {
            let ambiguous = whole
                || cat.ends_with("-ignored")
                || (kind == PosecodeKind::Distance && hand && cat != "close");
            if ambiguous {
                out.push((id.to_string(), cat.clone()));
            }
        }
    }
    out
}

const TRIVIAL: [(&str, &str); 15] = [
    ("relpos_x.left_hand.right_hand", "at the left of"),
    ("relpos_x.left_foot.right_foot", "at the left of"),
    ("relpos_x.left_hand.left_shoulder", "at the left of"),
    ("relpos_x.right_hand.right_shoulder", "at the right of"),
    ("relpos_x.left_foot.left_hip", "at the left of"),
    ("relpos_x.right_foot.right_hip", "at the right of"),
    ("relpos_y.left_ankle.neck", "below"),
    ("relpos_y.right_ankle.neck", "below"),
    ("relpos_y.left_hip.left_knee", "above"),
    ("relpos_y.right_hip.right_knee", "above"),
    ("relpos_y.left_wrist.neck", "below"),
    ("relpos_y.right_wrist.neck", "below"),
    ("relpos_y.left_foot.left_hip", "below"),
    ("relpos_y.right_foot.right_hip", "below"),
    ("pitchroll.pelvis.neck", "vertical"),
];

const UNSKIPPABLE: [(&str, &str); 16] = [
    ("angle.left_knee", "completely bent"),
    ("angle.right_knee", "completely bent"),
    ("angle.left_elbow", "completely bent"),
    ("angle.right_elbow", "completely bent"),
    ("relpos_x.left_hand.right_hand", "at the right of"),
    ("relpos_x.left_foot.right_foot", "at the right of"),
    ("relpos_y.left_ankle.neck", "above"),
    ("relpos_y.right_ankle.neck", "above"),
    ("distance.left_hand.left_ankle", "close"),
    ("distance.left_hand.right_ankle", "close"),
    ("distance.right_hand.left_ankle", "close"),
    ("distance.right_hand.right_ankle", "close"),
    ("distance.left_hand.left_foot", "close"),
    ("distance.left_hand.right_foot", "close"),
    ("distance.right_hand.left_foot", "close"),
    ("distance.right_hand.right_foot", "close"),
];

/// Eligibility of every default `(posecode, category)`; anything not listed
/// as ambiguous, trivial or unskippable is skippable.
pub fn default_eligibility(set: &PosecodeSet) -> EligibilityTable {
    let ambiguous = default_ambiguous(set);
    let mut table = EligibilityTable::new();
    for d in 0..set.len() {
        let id = set.def(d).id.as_str();
        for cat in &set.spec(d).categories {
            let key = (id, cat.as_str());
            let class = if ambiguous.iter().any(|(p, c)| p == id && c == cat) {
                EligibilityClass::IgnoredAmbiguous
            } else if TRIVIAL.contains(&key) {
                EligibilityClass::IgnoredTrivial
            } else if UNSKIPPABLE.contains(&key) {
                EligibilityClass::Unskippable
            } else {
                EligibilityClass::Skippable
            };
            table.insert(id, cat.as_str(), class);
        }
    }
    table
}

/// Hand-written rules shipped until a corpus is mined: raising one hand
/// above its shoulder while the other is below its hip says which hand is
/// higher. Support 0 marks them as not mined.
pub fn default_rules() -> Vec<StatRule> {
    let rule = |x: [(&str, &str); 2], y: (&str, &str)| {
        let mut x: Vec<RuleItem> = x.iter().map(|(p, c)| RuleItem::new(*p, *c)).collect();
        x.sort();
        StatRule {
            x,
            y: RuleItem::new(y.0, y.1),
            support: 0,
            confidence: 1.0,
        }
    };
    vec![
        rule(
            [
                ("relpos_y.left_hand.left_shoulder", "above"),
                ("relpos_y.right_hand.right_hip", "below"),
            ],
            ("relpos_y.left_hand.right_hand", "above"),
        ),
        rule(
            [
                ("relpos_y.right_hand.right_shoulder", "above"),
                ("relpos_y.left_hand.left_hip", "below"),
            ],
            ("relpos_y.left_hand.right_hand", "below"),
        ),
    ]
}

pub const DEFAULT_TEMPLATES: &str = include_str!("templates.txt");

pub fn default_template_bank() -> TemplateBank {
    TemplateBank::parse(DEFAULT_TEMPLATES).expect("shipped template bank parses")
}
