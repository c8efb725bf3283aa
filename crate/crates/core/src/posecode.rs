//! Elementary posecodes: measurement and randomized binning.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, RngCore};

use crate::geometry::{acos_deg, Axis};
use crate::pose::{PoseKeypoints, Registry};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PosecodeKind {
    Angle,
    Distance,
    RelPosX,
    RelPosY,
    RelPosZ,
    PitchRoll,
    GroundContact,
}

impl PosecodeKind {
    pub const ALL: [PosecodeKind; 7] = [
        PosecodeKind::Angle,
        PosecodeKind::Distance,
        PosecodeKind::RelPosX,
        PosecodeKind::RelPosY,
        PosecodeKind::RelPosZ,
        PosecodeKind::PitchRoll,
        PosecodeKind::GroundContact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PosecodeKind::Angle => "angle",
            PosecodeKind::Distance => "distance",
            PosecodeKind::RelPosX => "relpos_x",
            PosecodeKind::RelPosY => "relpos_y",
            PosecodeKind::RelPosZ => "relpos_z",
            PosecodeKind::PitchRoll => "pitchroll",
            PosecodeKind::GroundContact => "ground_contact",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        PosecodeKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Number of keypoints a definition of this kind refers to.
    pub fn arity(self) -> usize {
        match self {
            PosecodeKind::Angle => 3,
            PosecodeKind::GroundContact => 1,
            _ => 2,
        }
    }

    pub fn unit(self) -> Unit {
        match self {
            PosecodeKind::Angle | PosecodeKind::PitchRoll => Unit::Degrees,
            _ => Unit::Meters,
        }
    }

    pub fn axis(self) -> Option<Axis> {
        match self {
            PosecodeKind::RelPosX => Some(Axis::X),
            PosecodeKind::RelPosY => Some(Axis::Y),
            PosecodeKind::RelPosZ => Some(Axis::Z),
            _ => None,
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for PosecodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Degrees,
    Meters,
}

impl Unit {
    pub fn name(self) -> &'static str {
        match self {
            Unit::Degrees => "deg",
            Unit::Meters => "m",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub value: f64,
    pub unit: Unit,
}

impl Measurement {
    pub fn degrees(value: f64) -> Self {
        Measurement {
            value,
            unit: Unit::Degrees,
        }
    }

    pub fn meters(value: f64) -> Self {
        Measurement {
            value,
            unit: Unit::Meters,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosecodeDef {
    pub id: String,
    pub kind: PosecodeKind,
    pub joints: Vec<String>,
}

impl PosecodeDef {
    pub fn new(id: impl Into<String>, kind: PosecodeKind, joints: &[&str]) -> Self {
        PosecodeDef {
            id: id.into(),
            kind,
            joints: joints.iter().map(|j| j.to_string()).collect(),
        }
    }
}

/// Thresholds for one posecode kind. Category `i` covers
/// `thresholds[i-1] < v <= thresholds[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinningSpec {
    pub kind: PosecodeKind,
    pub categories: Vec<String>,
    pub thresholds: Vec<f64>,
    pub noise: f64,
}

impl BinningSpec {
    pub fn new(
        kind: PosecodeKind,
        categories: Vec<String>,
        thresholds: Vec<f64>,
        noise: f64,
    ) -> Result<Self> {
        let fail = |reason: String| Error::InvalidBinning {
            kind: kind.name(),
            reason,
        };
        if categories.len() != thresholds.len() + 1 {
            return Err(fail(format!(
                "{} categories for {} thresholds",
                categories.len(),
                thresholds.len()
            )));
        }
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(fail("non-finite threshold".into()));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(fail("thresholds must be strictly increasing".into()));
        }
        if !(noise.is_finite() && noise >= 0.0) {
            return Err(fail("noise must be finite and non-negative".into()));
        }
        let mut seen = BTreeMap::new();
        for c in &categories {
            if seen.insert(c.as_str(), ()).is_some() {
                return Err(fail(format!("duplicate category `{c}`")));
            }
        }
        Ok(BinningSpec {
            kind,
            categories,
            thresholds,
            noise,
        })
    }

    /// Noiseless band index of `v`.
    pub fn band(&self, v: f64) -> usize {
        self.thresholds.partition_point(|t| v > *t)
    }

    pub fn category_index(&self, name: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == name)
    }

    /// Band of `v + eps`, `eps` uniform in `[-noise*scale, noise*scale]`.
    /// Exactly one random draw per call, whatever the noise level.
    pub fn categorize_value<R: RngCore + ?Sized>(
        &self,
        v: f64,
        noise_scale: f64,
        rng: &mut R,
    ) -> usize {
        let u: f64 = rng.gen();
        let eta = self.noise * noise_scale;
        self.band(v + eta * (2.0 * u - 1.0))
    }
}

/// Bins `raw` with `spec`, drawing a single jitter from `rng`.
pub fn categorize<R: RngCore + ?Sized>(
    raw: Measurement,
    spec: &BinningSpec,
    rng: &mut R,
) -> Result<usize> {
    let expected = spec.kind.unit();
    if raw.unit != expected {
        return Err(Error::UnitMismatch {
            expected: expected.name(),
            found: raw.unit.name(),
        });
    }
    if !raw.value.is_finite() {
        return Err(Error::NonFiniteMeasurement);
    }
    Ok(spec.categorize_value(raw.value, 1.0, rng))
}

/// One binning spec per kind.
#[derive(Debug, Clone, PartialEq)]
pub struct BinningTable {
    specs: [Option<BinningSpec>; 7],
}

impl BinningTable {
    pub fn new(specs: impl IntoIterator<Item = BinningSpec>) -> Result<Self> {
        let mut table: [Option<BinningSpec>; 7] = Default::default();
        for spec in specs {
            let slot = spec.kind.slot();
            if table[slot].is_some() {
                return Err(Error::InvalidBinning {
                    kind: spec.kind.name(),
                    reason: "defined twice".into(),
                });
            }
            table[slot] = Some(spec);
        }
        Ok(BinningTable { specs: table })
    }

    pub fn get(&self, kind: PosecodeKind) -> Option<&BinningSpec> {
        self.specs[kind.slot()].as_ref()
    }

    pub fn require(&self, kind: PosecodeKind) -> Result<&BinningSpec> {
        self.get(kind).ok_or_else(|| Error::InvalidBinning {
            kind: kind.name(),
            reason: "no binning spec".into(),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = &BinningSpec> {
        self.specs.iter().flatten()
    }
}

fn degenerate(what: &str) -> Error {
    Error::Degenerate(what.into())
}

/// Angle at `j` between `p_i - p_j` and `p_k - p_j`, degrees in `[0, 180]`.
pub fn measure_angle(pose: &PoseKeypoints, i: usize, j: usize, k: usize) -> Result<f64> {
    let a = pose.get(i) - pose.get(j);
    let b = pose.get(k) - pose.get(j);
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(degenerate("angle arm has zero length"));
    }
    Ok(acos_deg(a.dot(b) / (na * nb)))
}

pub fn measure_distance(pose: &PoseKeypoints, i: usize, j: usize) -> f64 {
    pose.get(i).distance(pose.get(j))
}

/// `p_i - p_j` along `axis`.
pub fn measure_relative_position(pose: &PoseKeypoints, i: usize, j: usize, axis: Axis) -> f64 {
    pose.get(i).axis(axis) - pose.get(j).axis(axis)
}

/// Angle between segment `i -> j` and the vertical, folded to `[0, 90]`.
pub fn measure_pitch_roll(pose: &PoseKeypoints, i: usize, j: usize) -> Result<f64> {
    let d = pose.get(j) - pose.get(i);
    let n = d.norm();
    if n == 0.0 {
        return Err(degenerate("segment has zero length"));
    }
    Ok(acos_deg(libm::fabs(d.y) / n))
}

/// Height of `i` above the lowest keypoint of the pose.
pub fn measure_ground_contact(pose: &PoseKeypoints, i: usize) -> f64 {
    let floor = pose
        .coords()
        .iter()
        .map(|c| c.y)
        .fold(f64::INFINITY, f64::min);
    pose.get(i).y - floor
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractedPosecode {
    /// Index into the owning [`PosecodeSet`].
    pub def: usize,
    pub raw: Measurement,
    /// Index into the kind's category list.
    pub category: usize,
}

/// Maps a definition onto its left/right counterpart. `reversed` is set when
/// the counterpart lists the same keypoints in the opposite order (e.g. the
/// left-hand/right-hand pair maps onto itself).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MirrorDef {
    pub def: usize,
    pub reversed: bool,
}

/// Posecode definitions resolved against a keypoint registry, with their
/// binning table.
#[derive(Debug, Clone)]
pub struct PosecodeSet {
    registry: Arc<Registry>,
    defs: Vec<PosecodeDef>,
    joints: Vec<[usize; 3]>,
    by_id: BTreeMap<String, usize>,
    binning: BinningTable,
    mirror: Vec<Option<MirrorDef>>,
}

impl PosecodeSet {
    pub fn new(
        registry: Arc<Registry>,
        defs: Vec<PosecodeDef>,
        binning: BinningTable,
    ) -> Result<Self> {
        let mut joints = Vec::with_capacity(defs.len());
        let mut by_id = BTreeMap::new();
        for (i, def) in defs.iter().enumerate() {
            if def.joints.len() != def.kind.arity() {
                return Err(Error::InvalidDefinition(format!(
                    "posecode `{}` ({}) needs {} keypoints, got {}",
                    def.id,
                    def.kind,
                    def.kind.arity(),
                    def.joints.len()
                )));
            }
            binning.require(def.kind)?;
            let mut idx = [0usize; 3];
            for (slot, name) in idx.iter_mut().zip(&def.joints) {
                *slot = registry
                    .require(name)
                    .map_err(|e| e.context(format!("posecode `{}`", def.id)))?;
            }
            if by_id.insert(def.id.clone(), i).is_some() {
                return Err(Error::InvalidDefinition(format!(
                    "duplicate posecode id `{}`",
                    def.id
                )));
            }
            joints.push(idx);
        }
        let mut set = PosecodeSet {
            registry,
            defs,
            joints,
            by_id,
            binning,
            mirror: Vec::new(),
        };
        set.mirror = (0..set.defs.len()).map(|d| set.find_mirror(d)).collect();
        Ok(set)
    }

    fn find_mirror(&self, d: usize) -> Option<MirrorDef> {
        let kind = self.defs[d].kind;
        let arity = kind.arity();
        let mut mirrored = [0usize; 3];
        for (m, &j) in mirrored.iter_mut().zip(&self.joints[d][..arity]) {
            *m = self.registry.mirror_of(j)?;
        }
        let same = |m: &[usize; 3]| {
            (0..self.defs.len())
                .find(|&o| self.defs[o].kind == kind && self.joints[o][..arity] == m[..arity])
        };
        if let Some(def) = same(&mirrored) {
            return Some(MirrorDef {
                def,
                reversed: false,
            });
        }
        if arity > 1 {
            mirrored[..arity].reverse();
            if let Some(def) = same(&mirrored) {
                return Some(MirrorDef {
                    def,
                    reversed: true,
                });
            }
        }
        None
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn defs(&self) -> &[PosecodeDef] {
        &self.defs
    }

    pub fn def(&self, index: usize) -> &PosecodeDef {
        &self.defs[index]
    }

    pub fn kind(&self, index: usize) -> PosecodeKind {
        self.defs[index].kind
    }

    /// Resolved keypoint indices (only the first `arity` are meaningful).
    pub fn joints(&self, index: usize) -> &[usize] {
        &self.joints[index][..self.defs[index].kind.arity()]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownPosecode(id.into()))
    }

    pub fn binning(&self) -> &BinningTable {
        &self.binning
    }

    pub fn spec(&self, def: usize) -> &BinningSpec {
        self.binning
            .get(self.defs[def].kind)
            .expect("checked at construction")
    }

    pub fn category_name(&self, def: usize, category: usize) -> &str {
        &self.spec(def).categories[category]
    }

    pub fn category_count(&self, def: usize) -> usize {
        self.spec(def).categories.len()
    }

    pub fn category_index(&self, def: usize, name: &str) -> Result<usize> {
        self.spec(def)
            .category_index(name)
            .ok_or_else(|| Error::UnknownCategory {
                kind: self.defs[def].kind.name().into(),
                category: name.into(),
            })
    }

    pub fn mirror_def(&self, def: usize) -> Option<MirrorDef> {
        self.mirror[def]
    }

    /// The category the mirrored pose yields on the counterpart definition.
    pub fn mirror_category(&self, def: usize, category: usize) -> Option<(usize, usize)> {
        let m = self.mirror[def]?;
        let kind = self.defs[def].kind;
        let flip = (kind == PosecodeKind::RelPosX) ^ (m.reversed && kind.axis().is_some());
        let cat = if flip {
            self.category_count(def) - 1 - category
        } else {
            category
        };
        Some((m.def, cat))
    }

    pub fn measure(&self, pose: &PoseKeypoints, def: usize) -> Result<Measurement> {
        let [i, j, k] = self.joints[def];
        let kind = self.defs[def].kind;
        let value = match kind {
            PosecodeKind::Angle => measure_angle(pose, i, j, k)?,
            PosecodeKind::Distance => measure_distance(pose, i, j),
            PosecodeKind::RelPosX | PosecodeKind::RelPosY | PosecodeKind::RelPosZ => {
                measure_relative_position(pose, i, j, kind.axis().expect("relpos kind"))
            }
            PosecodeKind::PitchRoll => measure_pitch_roll(pose, i, j)?,
            PosecodeKind::GroundContact => measure_ground_contact(pose, i),
        };
        Ok(Measurement {
            value,
            unit: kind.unit(),
        })
    }

    fn check_registry(&self, pose: &PoseKeypoints) -> Result<()> {
        if Arc::ptr_eq(&self.registry, pose.registry()) || *self.registry == **pose.registry() {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    /// One posecode per definition, in definition order; each consumes one
    /// draw from `rng`.
    pub fn extract<R: RngCore + ?Sized>(
        &self,
        pose: &PoseKeypoints,
        noise_scale: f64,
        rng: &mut R,
    ) -> Result<Vec<ExtractedPosecode>> {
        self.check_registry(pose)?;
        let mut out = Vec::with_capacity(self.defs.len());
        for def in 0..self.defs.len() {
            let raw = self
                .measure(pose, def)
                .map_err(|e| e.context(format!("posecode `{}`", self.defs[def].id)))?;
            let category = self.spec(def).categorize_value(raw.value, noise_scale, rng);
            out.push(ExtractedPosecode { def, raw, category });
        }
        Ok(out)
    }

    /// Category of every definition without jitter.
    pub fn noiseless_categories(&self, pose: &PoseKeypoints) -> Result<Vec<usize>> {
        self.check_registry(pose)?;
        (0..self.defs.len())
            .map(|def| {
                let raw = self
                    .measure(pose, def)
                    .map_err(|e| e.context(format!("posecode `{}`", self.defs[def].id)))?;
                Ok(self.spec(def).band(raw.value))
            })
            .collect()
    }
}

/// Extracts every posecode of `set` from an already extended pose.
pub fn extract_posecodes<R: RngCore + ?Sized>(
    pose: &PoseKeypoints,
    set: &PosecodeSet,
    rng: &mut R,
) -> Result<Vec<ExtractedPosecode>> {
    set.extract(pose, 1.0, rng)
}
