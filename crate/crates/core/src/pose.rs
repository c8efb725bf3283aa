//! Keypoint registries, poses and pose-level operations.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::geometry::Vec3;
use crate::skeleton::{smplh_registry, AUXILIARY_JOINTS};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
    Center,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            Side::Center => Side::Center,
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Center => "",
        }
    }

    /// Side of a keypoint name (`left_*`, `right_*`, anything else).
    pub fn of_name(name: &str) -> Side {
        if name.starts_with("left_") {
            Side::Left
        } else if name.starts_with("right_") {
            Side::Right
        } else {
            Side::Center
        }
    }
}

/// Swap a leading `left_`/`right_` prefix; center names are returned as is.
pub fn mirror_name(name: &str) -> String {
    if let Some(rest) = name.strip_prefix("left_") {
        alloc::format!("right_{rest}")
    } else if let Some(rest) = name.strip_prefix("right_") {
        alloc::format!("left_{rest}")
    } else {
        name.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Keypoint {
    pub name: String,
    pub side: Side,
    pub index: usize,
}

/// Ordered keypoint names. Sides are read from the `left_`/`right_` name
/// prefixes; a sided keypoint whose mirrored name is absent is allowed here
/// but makes [`mirror_pose`] fail.
#[derive(Debug, Clone)]
pub struct Registry {
    keypoints: Vec<Keypoint>,
    by_name: BTreeMap<String, usize>,
    mirror: Vec<Option<usize>>,
}

impl PartialEq for Registry {
    fn eq(&self, other: &Self) -> bool {
        self.keypoints == other.keypoints
    }
}

impl Registry {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut keypoints = Vec::new();
        let mut by_name = BTreeMap::new();
        for (index, name) in names.into_iter().enumerate() {
            let name: String = name.into();
            if by_name.insert(name.clone(), index).is_some() {
                return Err(Error::DuplicateKeypoint(name));
            }
            keypoints.push(Keypoint {
                side: Side::of_name(&name),
                name,
                index,
            });
        }
        let mirror = keypoints
            .iter()
            .map(|k| match k.side {
                Side::Center => Some(k.index),
                _ => by_name.get(&mirror_name(&k.name)).copied(),
            })
            .collect();
        Ok(Registry {
            keypoints,
            by_name,
            mirror,
        })
    }

    /// The 52-joint SMPL-H registry.
    pub fn smplh() -> Arc<Registry> {
        smplh_registry()
    }

    pub fn len(&self) -> usize {
        self.keypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keypoints.is_empty()
    }

    pub fn keypoints(&self) -> &[Keypoint] {
        &self.keypoints
    }

    pub fn get(&self, index: usize) -> &Keypoint {
        &self.keypoints[index]
    }

    pub fn name(&self, index: usize) -> &str {
        &self.keypoints[index].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::MissingKeypoint(name.to_string()))
    }

    /// Index of the side-swapped counterpart (itself for center keypoints).
    pub fn mirror_of(&self, index: usize) -> Option<usize> {
        self.mirror[index]
    }

    fn names(&self) -> impl Iterator<Item = &str> {
        self.keypoints.iter().map(|k| k.name.as_str())
    }
}

/// One pose: coordinates in registry order, meters, y-up, yaw-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseKeypoints {
    registry: Arc<Registry>,
    coords: Vec<Vec3>,
}

impl PoseKeypoints {
    pub fn new(registry: Arc<Registry>, coords: Vec<Vec3>) -> Result<Self> {
        if coords.len() != registry.len() {
            return Err(Error::CoordinateCount {
                expected: registry.len(),
                found: coords.len(),
            });
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoordinate(registry.name(i).to_string()));
        }
        Ok(PoseKeypoints { registry, coords })
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    pub fn coords(&self) -> &[Vec3] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, index: usize) -> Vec3 {
        self.coords[index]
    }

    pub fn by_name(&self, name: &str) -> Result<Vec3> {
        Ok(self.coords[self.registry.require(name)?])
    }

    fn same_registry(&self, other: &PoseKeypoints) -> bool {
        Arc::ptr_eq(&self.registry, &other.registry) || self.registry == other.registry
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelSource {
    /// Sequence-level action annotation (e.g. "yoga", "walk").
    Babel,
    /// The coarse label assigned to poses from dance recordings.
    Dancing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxLabel {
    pub text: String,
    pub source: LabelSource,
}

impl AuxLabel {
    pub fn babel(text: impl Into<String>) -> Self {
        AuxLabel {
            text: text.into(),
            source: LabelSource::Babel,
        }
    }

    pub fn dancing() -> Self {
        AuxLabel {
            text: "dancing".into(),
            source: LabelSource::Dancing,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoseRecord {
    pub pose_id: String,
    pub keypoints: PoseKeypoints,
    pub sequence_id: Option<String>,
    pub aux_labels: Vec<AuxLabel>,
}

impl PoseRecord {
    pub fn new(pose_id: impl Into<String>, keypoints: PoseKeypoints) -> Self {
        PoseRecord {
            pose_id: pose_id.into(),
            keypoints,
            sequence_id: None,
            aux_labels: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoseCorpus {
    pub records: Vec<PoseRecord>,
}

impl PoseCorpus {
    pub fn new(records: Vec<PoseRecord>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for r in &records {
            if seen.insert(r.pose_id.as_str(), ()).is_some() {
                return Err(Error::InvalidDefinition(alloc::format!(
                    "duplicate pose id `{}`",
                    r.pose_id
                )));
            }
        }
        Ok(PoseCorpus { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Appends the hand and torso keypoints to poses of one base registry.
///
/// The hand sits halfway between the wrist and the second phalanx of the
/// middle finger; the torso is the mean of pelvis, neck and third spine joint.
#[derive(Debug, Clone)]
pub struct AuxiliaryDeriver {
    base: Arc<Registry>,
    extended: Arc<Registry>,
    left_wrist: usize,
    left_middle2: usize,
    right_wrist: usize,
    right_middle2: usize,
    pelvis: usize,
    neck: usize,
    spine3: usize,
}

impl AuxiliaryDeriver {
    pub fn new(base: Arc<Registry>) -> Result<Self> {
        if let Some(name) = AUXILIARY_JOINTS.iter().find(|n| base.index_of(n).is_some()) {
            return Err(Error::AlreadyExtended((*name).into()));
        }
        let extended = Arc::new(Registry::new(
            base.names().chain(AUXILIARY_JOINTS.iter().copied()),
        )?);
        Ok(AuxiliaryDeriver {
            left_wrist: base.require("left_wrist")?,
            left_middle2: base.require("left_middle2")?,
            right_wrist: base.require("right_wrist")?,
            right_middle2: base.require("right_middle2")?,
            pelvis: base.require("pelvis")?,
            neck: base.require("neck")?,
            spine3: base.require("spine3")?,
            base,
            extended,
        })
    }

    pub fn base_registry(&self) -> &Arc<Registry> {
        &self.base
    }

    pub fn extended_registry(&self) -> &Arc<Registry> {
        &self.extended
    }

    pub fn derive(&self, pose: &PoseKeypoints) -> Result<PoseKeypoints> {
        if !(Arc::ptr_eq(&self.base, &pose.registry) || *self.base == *pose.registry) {
            return Err(Error::RegistryMismatch);
        }
        let c = &pose.coords;
        let mut coords = Vec::with_capacity(c.len() + 3);
        coords.extend_from_slice(c);
        coords.push((c[self.left_wrist] + c[self.left_middle2]) * 0.5);
        coords.push((c[self.right_wrist] + c[self.right_middle2]) * 0.5);
        coords.push((c[self.pelvis] + c[self.neck] + c[self.spine3]) / 3.0);
        Ok(PoseKeypoints {
            registry: self.extended.clone(),
            coords,
        })
    }
}

/// One-off convenience wrapper around [`AuxiliaryDeriver`].
pub fn derive_auxiliary_keypoints(pose: &PoseKeypoints) -> Result<PoseKeypoints> {
    AuxiliaryDeriver::new(pose.registry.clone())?.derive(pose)
}

/// Mean per-joint Euclidean distance.
pub fn mpje(a: &PoseKeypoints, b: &PoseKeypoints) -> Result<f64> {
    if !a.same_registry(b) {
        return Err(Error::RegistryMismatch);
    }
    Ok(mpje_coords(&a.coords, &b.coords))
}

/// Mean per-joint distance of two coordinate lists of equal length, without
/// registry checks.
pub fn mpje_coords(a: &[Vec3], b: &[Vec3]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let total: f64 = a.iter().zip(b).map(|(p, q)| p.distance(*q)).sum();
    total / a.len() as f64
}

/// Left/right reflection: x negated and sided keypoints swapped.
pub fn mirror_pose(pose: &PoseKeypoints) -> Result<PoseKeypoints> {
    let reg = &pose.registry;
    let mut coords = Vec::with_capacity(pose.len());
    for i in 0..pose.len() {
        let m = reg
            .mirror_of(i)
            .ok_or_else(|| Error::UnpairedKeypoint(reg.name(i).to_string()))?;
        coords.push(pose.coords[m].mirrored());
    }
    Ok(PoseKeypoints {
        registry: reg.clone(),
        coords,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;
    use alloc::vec;

    fn extended(pose: &PoseKeypoints) -> PoseKeypoints {
        derive_auxiliary_keypoints(pose).unwrap()
    }

    #[test]
    fn hand_is_wrist_phalanx_midpoint() {
        let reg = Registry::smplh();
        let mut coords = vec![Vec3::ZERO; reg.len()];
        coords[reg.require("left_wrist").unwrap()] = Vec3::new(0.0, 1.0, 0.0);
        coords[reg.require("left_middle2").unwrap()] = Vec3::new(0.2, 1.0, 0.0);
        let pose = PoseKeypoints::new(reg, coords).unwrap();
        let ext = extended(&pose);
        assert_eq!(ext.len(), 55);
        let hand = ext.by_name("left_hand").unwrap();
        assert!((hand.x - 0.1).abs() < 1e-15);
        assert_eq!(hand.y, 1.0);
        assert_eq!(hand.z, 0.0);
    }

    #[test]
    fn torso_is_mean_of_pelvis_neck_spine3() {
        let reg = Registry::smplh();
        let mut coords = vec![Vec3::ZERO; reg.len()];
        coords[reg.require("pelvis").unwrap()] = Vec3::new(0.0, 1.0, 0.0);
        coords[reg.require("neck").unwrap()] = Vec3::new(0.0, 1.5, 0.0);
        coords[reg.require("spine3").unwrap()] = Vec3::new(0.0, 1.2, 0.0);
        let ext = extended(&PoseKeypoints::new(reg, coords).unwrap());
        let torso = ext.by_name("torso").unwrap();
        assert!((torso.y - 3.7 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn derivation_keeps_original_coordinates() {
        let pose = synthetic::t_pose();
        let ext = extended(&pose);
        assert_eq!(&ext.coords()[..52], pose.coords());
    }

    #[test]
    fn missing_source_keypoint_is_a_configuration_error() {
        let names = crate::skeleton::SMPLH_JOINTS
            .iter()
            .copied()
            .filter(|n| *n != "spine3");
        let reg = Arc::new(Registry::new(names).unwrap());
        let err = AuxiliaryDeriver::new(reg).unwrap_err();
        assert_eq!(err, Error::MissingKeypoint("spine3".into()));
    }

    #[test]
    fn extended_registry_is_rejected() {
        let ext = extended(&synthetic::t_pose());
        assert!(matches!(
            derive_auxiliary_keypoints(&ext),
            Err(Error::AlreadyExtended(_))
        ));
    }

    #[test]
    fn mpje_of_identical_poses_is_zero() {
        let p = synthetic::t_pose();
        assert_eq!(mpje(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn mpje_of_uniform_offset_is_offset_length() {
        let p = synthetic::t_pose();
        let shifted: Vec<Vec3> = p
            .coords()
            .iter()
            .map(|c| *c + Vec3::new(1.0, 0.0, 0.0))
            .collect();
        let q = PoseKeypoints::new(p.registry().clone(), shifted).unwrap();
        assert!((mpje(&p, &q).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mpje_rejects_registry_mismatch() {
        let p = synthetic::t_pose();
        let e = extended(&p);
        assert_eq!(mpje(&p, &e), Err(Error::RegistryMismatch));
    }

    #[test]
    fn mirror_swaps_sides_and_negates_x() {
        let reg = Registry::smplh();
        let ext_reg = AuxiliaryDeriver::new(reg)
            .unwrap()
            .extended_registry()
            .clone();
        let mut coords = vec![Vec3::ZERO; ext_reg.len()];
        coords[ext_reg.require("left_hand").unwrap()] = Vec3::new(0.3, 1.0, 0.0);
        let pose = PoseKeypoints::new(ext_reg, coords).unwrap();
        let m = mirror_pose(&pose).unwrap();
        assert_eq!(m.by_name("right_hand").unwrap(), Vec3::new(-0.3, 1.0, 0.0));
        assert_eq!(m.by_name("left_hand").unwrap(), Vec3::new(-0.0, 0.0, 0.0));
    }

    #[test]
    fn symmetric_pose_is_a_mirror_fixed_point() {
        let p = synthetic::t_pose();
        assert_eq!(mirror_pose(&p).unwrap(), p);
    }

    #[test]
    fn unpaired_keypoint_cannot_be_mirrored() {
        let reg = Arc::new(Registry::new(["pelvis", "left_toe"]).unwrap());
        let pose = PoseKeypoints::new(reg, vec![Vec3::ZERO; 2]).unwrap();
        assert_eq!(
            mirror_pose(&pose),
            Err(Error::UnpairedKeypoint("left_toe".into()))
        );
    }

    #[test]
    fn duplicate_names_are_rejected() {
        assert!(matches!(
            Registry::new(["neck", "neck"]),
            Err(Error::DuplicateKeypoint(_))
        ));
    }

    #[test]
    fn non_finite_coordinates_are_rejected() {
        let reg = Arc::new(Registry::new(["neck"]).unwrap());
        assert!(PoseKeypoints::new(reg, vec![Vec3::new(f64::NAN, 0.0, 0.0)]).is_err());
    }
}
