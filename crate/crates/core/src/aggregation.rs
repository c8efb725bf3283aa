//! Description units and the four merge rules (entity, symmetry, keypoint,
//! interpretation) applied at random.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::pose::{Registry, Side};
use crate::posecode::{PosecodeKind, PosecodeSet};
use crate::selection::Fact;
use crate::superposecode::SuperPosecodeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PartSide {
    Left,
    Right,
    Center,
    /// Both sides at once, e.g. "the hands".
    Both,
}

impl PartSide {
    pub fn from_side(side: Side) -> Self {
        match side {
            Side::Left => PartSide::Left,
            Side::Right => PartSide::Right,
            Side::Center => PartSide::Center,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            PartSide::Left => PartSide::Right,
            PartSide::Right => PartSide::Left,
            s => s,
        }
    }

    pub fn word(self) -> Option<&'static str> {
        match self {
            PartSide::Left => Some("left"),
            PartSide::Right => Some("right"),
            _ => None,
        }
    }
}

/// A body part, keypoint or entity as it will be named in text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Part {
    pub noun: String,
    pub side: PartSide,
}

impl Part {
    pub fn new(noun: impl Into<String>, side: PartSide) -> Self {
        Part {
            noun: noun.into(),
            side,
        }
    }

    /// `left_upper_arm` -> ("upper arm", left).
    pub fn from_name(name: &str) -> Self {
        let side = PartSide::from_side(Side::of_name(name));
        let bare = name
            .strip_prefix("left_")
            .or_else(|| name.strip_prefix("right_"))
            .unwrap_or(name);
        Part::new(bare.replace('_', " "), side)
    }

    pub fn mirrored(&self) -> Self {
        Part::new(self.noun.clone(), self.side.opposite())
    }

    pub fn is_mirror_of(&self, other: &Part) -> bool {
        self.noun == other.noun
            && matches!(
                (self.side, other.side),
                (PartSide::Left, PartSide::Right) | (PartSide::Right, PartSide::Left)
            )
    }

    pub fn is_plural(&self) -> bool {
        self.side == PartSide::Both
    }

    pub fn plural_noun(&self) -> String {
        plural(&self.noun)
    }

    /// "the left hand", "the hands", "the torso".
    pub fn phrase(&self) -> String {
        match self.side {
            PartSide::Left | PartSide::Right => {
                format!("the {} {}", self.side.word().unwrap_or(""), self.noun)
            }
            PartSide::Center => format!("the {}", self.noun),
            PartSide::Both => format!("the {}", self.plural_noun()),
        }
    }
}

pub fn plural(noun: &str) -> String {
    match noun {
        "foot" => "feet".into(),
        "calf" => "calves".into(),
        "body" | "torso" | "pelvis" => noun.into(),
        n if n.ends_with('s') => n.into(),
        n => format!("{n}s"),
    }
}

/// One categorization said about the unit's subjects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    /// Template family: a posecode kind name, or `super` for super-posecodes.
    pub kind: String,
    /// Category name; super-posecode id for the `super` family.
    pub category: String,
    pub object: Option<Part>,
    /// Category stating the reverse relation, when subject and object swap.
    pub inverse: Option<String>,
    /// The object is a support keypoint that may be left implicit.
    pub implicit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescriptionUnit {
    pub id: usize,
    pub subjects: Vec<Part>,
    pub predicates: Vec<Predicate>,
    /// Indices into the caption's fact list.
    pub provenance: Vec<usize>,
    pub position: usize,
}

impl DescriptionUnit {
    pub fn is_plural(&self) -> bool {
        self.subjects.len() > 1 || self.subjects.iter().any(Part::is_plural)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AggregationRule {
    Entity,
    Symmetry,
    Keypoint,
    Interpretation,
}

impl AggregationRule {
    pub fn name(self) -> &'static str {
        match self {
            AggregationRule::Entity => "entity",
            AggregationRule::Symmetry => "symmetry",
            AggregationRule::Keypoint => "keypoint",
            AggregationRule::Interpretation => "interpretation",
        }
    }
}

pub const ALL_RULES: [AggregationRule; 4] = [
    AggregationRule::Entity,
    AggregationRule::Symmetry,
    AggregationRule::Keypoint,
    AggregationRule::Interpretation,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AggregationOption {
    pub rule: AggregationRule,
    /// Unit ids consumed by the merge.
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregationEvent {
    pub option: AggregationOption,
    /// Id of the resulting unit, `None` when the option was discarded.
    pub merged: Option<usize>,
}

fn segment_noun(a: &str, b: &str) -> Option<&'static str> {
    Some(match (a, b) {
        ("hip", "knee") => "thigh",
        ("knee", "ankle") => "calf",
        ("shoulder", "elbow") => "upper arm",
        ("elbow", "wrist") => "forearm",
        ("pelvis", "neck") | ("pelvis", "shoulder") => "torso",
        _ => return None,
    })
}

fn pitchroll_subject(a: &Part, b: &Part) -> Part {
    if a.is_mirror_of(b) {
        return Part::new(a.noun.clone(), PartSide::Both);
    }
    match segment_noun(&a.noun, &b.noun) {
        Some("torso") => Part::new("torso", PartSide::Center),
        Some(noun) => Part::new(
            noun,
            if a.side == PartSide::Center {
                b.side
            } else {
                a.side
            },
        ),
        None => a.clone(),
    }
}

fn implicit_object(kind: PosecodeKind, category: &str, subject: &Part, object: &Part) -> bool {
    let limb = |p: &Part| matches!(p.noun.as_str(), "hand" | "wrist" | "foot");
    match kind {
        PosecodeKind::RelPosX | PosecodeKind::RelPosY | PosecodeKind::RelPosZ
            if object.noun == "torso" =>
        {
            true
        }
        PosecodeKind::RelPosY => {
            category == "above"
                && matches!(subject.noun.as_str(), "hand" | "wrist")
                && matches!(object.noun.as_str(), "neck" | "head")
        }
        PosecodeKind::RelPosX => {
            limb(subject)
                && subject.side == object.side
                && matches!(
                    (subject.noun.as_str(), object.noun.as_str()),
                    ("hand" | "wrist", "shoulder") | ("foot", "hip")
                )
        }
        _ => false,
    }
}

fn super_subject(subject: &str) -> Part {
    match subject {
        "hands" => Part::new("hand", PartSide::Both),
        "feet" => Part::new("foot", PartSide::Both),
        s => Part::from_name(s),
    }
}

/// One single-predicate unit per fact, in fact order.
pub fn build_units(
    facts: &[Fact],
    posecodes: &PosecodeSet,
    supers: &SuperPosecodeSet,
) -> Vec<DescriptionUnit> {
    let reg: &Registry = posecodes.registry();
    facts
        .iter()
        .enumerate()
        .map(|(i, fact)| {
            let (subject, predicate) = match *fact {
                Fact::Super(s) => {
                    let def = supers.def(s);
                    (
                        super_subject(&def.subject),
                        Predicate {
                            kind: "super".into(),
                            category: def.id.clone(),
                            object: None,
                            inverse: None,
                            implicit: false,
                        },
                    )
                }
                Fact::Posecode(p) => {
                    let kind = posecodes.kind(p.def);
                    let parts: Vec<Part> = posecodes
                        .joints(p.def)
                        .iter()
                        .map(|&j| Part::from_name(reg.name(j)))
                        .collect();
                    let category = posecodes.category_name(p.def, p.category).to_string();
                    let n = posecodes.category_count(p.def);
                    let (subject, object) = match kind {
                        PosecodeKind::Angle => (parts[1].clone(), None),
                        PosecodeKind::GroundContact => (parts[0].clone(), None),
                        PosecodeKind::PitchRoll => (pitchroll_subject(&parts[0], &parts[1]), None),
                        _ => (parts[0].clone(), Some(parts[1].clone())),
                    };
                    let inverse = kind.axis().map(|_| {
                        posecodes
                            .category_name(p.def, n - 1 - p.category)
                            .to_string()
                    });
                    let implicit = object
                        .as_ref()
                        .is_some_and(|o| implicit_object(kind, &category, &subject, o));
                    (
                        subject,
                        Predicate {
                            kind: kind.name().into(),
                            category,
                            object,
                            inverse,
                            implicit,
                        },
                    )
                }
            };
            DescriptionUnit {
                id: i,
                subjects: vec![subject],
                predicates: vec![predicate],
                provenance: vec![i],
                position: i,
            }
        })
        .collect()
}

fn entity_of(a: &Part, b: &Part) -> Option<&'static str> {
    if a.side != b.side || a.side == PartSide::Center {
        return None;
    }
    let pair = |x: &str, y: &str| (a.noun == x && b.noun == y) || (a.noun == y && b.noun == x);
    if pair("elbow", "hand") || pair("elbow", "wrist") || pair("upper arm", "forearm") {
        Some("arm")
    } else if pair("knee", "foot") || pair("knee", "ankle") || pair("thigh", "calf") {
        Some("leg")
    } else {
        None
    }
}

fn single(u: &DescriptionUnit) -> Option<(&Part, &Predicate)> {
    match (u.subjects.as_slice(), u.predicates.as_slice()) {
        ([s], [p]) => Some((s, p)),
        _ => None,
    }
}

/// The merged unit's subjects and predicates, if `rule` applies to `a, b`.
fn merge(
    rule: AggregationRule,
    a: &DescriptionUnit,
    b: &DescriptionUnit,
) -> Option<(Vec<Part>, Vec<Predicate>)> {
    match rule {
        AggregationRule::Entity => {
            let ((sa, pa), (sb, pb)) = (single(a)?, single(b)?);
            if pa != pb {
                return None;
            }
            let entity = entity_of(sa, sb)?;
            if pa
                .object
                .as_ref()
                .is_some_and(|o| entity_of(o, sa).is_some() || o == sa || o == sb)
            {
                return None;
            }
            Some((vec![Part::new(entity, sa.side)], vec![pa.clone()]))
        }
        AggregationRule::Symmetry => {
            let ((sa, pa), (sb, pb)) = (single(a)?, single(b)?);
            if !sa.is_mirror_of(sb)
                || pa.kind != pb.kind
                || pa.category != pb.category
                || pa.implicit != pb.implicit
            {
                return None;
            }
            let object = match (&pa.object, &pb.object) {
                (None, None) => None,
                (Some(oa), Some(ob)) if oa == ob && oa.side == PartSide::Center => Some(oa.clone()),
                (Some(oa), Some(ob))
                    if oa.is_mirror_of(ob) && oa.side == sa.side && ob.side == sb.side =>
                {
                    Some(Part::new(oa.noun.clone(), PartSide::Both))
                }
                _ => return None,
            };
            let predicate = Predicate {
                object,
                ..pa.clone()
            };
            Some((
                vec![Part::new(sa.noun.clone(), PartSide::Both)],
                vec![predicate],
            ))
        }
        AggregationRule::Keypoint => {
            let ([sa], [sb]) = (a.subjects.as_slice(), b.subjects.as_slice()) else {
                return None;
            };
            if sa != sb {
                return None;
            }
            let mut predicates = a.predicates.clone();
            predicates.extend(b.predicates.iter().cloned());
            Some((vec![sa.clone()], predicates))
        }
        AggregationRule::Interpretation => {
            let ([pa], [pb]) = (a.predicates.as_slice(), b.predicates.as_slice()) else {
                return None;
            };
            if pa != pb || a.subjects.iter().any(|s| b.subjects.contains(s)) {
                return None;
            }
            if pa
                .object
                .as_ref()
                .is_some_and(|o| a.subjects.contains(o) || b.subjects.contains(o))
            {
                return None;
            }
            let mut subjects = a.subjects.clone();
            subjects.extend(b.subjects.iter().cloned());
            Some((subjects, vec![pa.clone()]))
        }
    }
}

/// Every applicable merge between two distinct units, pairs in unit order.
pub fn enumerate_aggregation_options(
    units: &[DescriptionUnit],
    rules: &[AggregationRule],
) -> Vec<AggregationOption> {
    let mut out = Vec::new();
    for (i, a) in units.iter().enumerate() {
        for b in &units[i + 1..] {
            push_options(&mut out, a, b, rules);
        }
    }
    out
}

fn push_options(
    out: &mut Vec<AggregationOption>,
    a: &DescriptionUnit,
    b: &DescriptionUnit,
    rules: &[AggregationRule],
) {
    for &rule in rules {
        if merge(rule, a, b).is_some() {
            out.push(AggregationOption {
                rule,
                a: a.id,
                b: b.id,
            });
        }
    }
}

/// Repeatedly draws an option uniformly; applies it with `aggregation_prob`
/// and otherwise discards it for good. Stops when no option is left.
pub fn apply_aggregations<R: RngCore + ?Sized>(
    units: Vec<DescriptionUnit>,
    rules: &[AggregationRule],
    aggregation_prob: f64,
    rng: &mut R,
) -> Vec<DescriptionUnit> {
    apply_aggregations_logged(units, rules, aggregation_prob, rng, &mut Vec::new())
}

/// [`apply_aggregations`] recording every drawn option in `log`.
pub fn apply_aggregations_logged<R: RngCore + ?Sized>(
    mut units: Vec<DescriptionUnit>,
    rules: &[AggregationRule],
    aggregation_prob: f64,
    rng: &mut R,
    log: &mut Vec<AggregationEvent>,
) -> Vec<DescriptionUnit> {
    let mut next_id = units.iter().map(|u| u.id + 1).max().unwrap_or(0);
    let mut options = enumerate_aggregation_options(&units, rules);
    while !options.is_empty() {
        let option = options.remove(rng.gen_range(0..options.len()));
        if rng.gen::<f64>() >= aggregation_prob {
            log.push(AggregationEvent {
                option,
                merged: None,
            });
            continue;
        }
        let ia = units
            .iter()
            .position(|u| u.id == option.a)
            .expect("live option");
        let ib = units
            .iter()
            .position(|u| u.id == option.b)
            .expect("live option");
        let (subjects, predicates) =
            merge(option.rule, &units[ia], &units[ib]).expect("option still applies");
        let mut provenance = units[ia].provenance.clone();
        provenance.extend(units[ib].provenance.iter().copied());
        let merged = DescriptionUnit {
            id: next_id,
            subjects,
            predicates,
            provenance,
            position: units[ia].position.min(units[ib].position),
        };
        next_id += 1;
        log.push(AggregationEvent {
            option,
            merged: Some(merged.id),
        });
        let (lo, hi) = if ia < ib { (ia, ib) } else { (ib, ia) };
        units.remove(hi);
        units[lo] = merged;
        options.retain(|o| {
            ![o.a, o.b]
                .iter()
                .any(|id| *id == option.a || *id == option.b)
        });
        let merged = &units[lo];
        for other in units.iter().filter(|u| u.id != merged.id) {
            for &rule in rules {
                // keep the pair orientation stable: older unit first
                if merge(rule, other, merged).is_some() {
                    options.push(AggregationOption {
                        rule,
                        a: other.id,
                        b: merged.id,
                    });
                }
            }
        }
    }
    units
}
