use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};
use std::path::Path;
use std::sync::Arc;

use posecode_core::sampler::SequenceFrames;
use posecode_core::{AuxLabel, LabelSource, PoseCorpus, PoseKeypoints, PoseRecord, Registry, Vec3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const BINARY_MAGIC: [u8; 4] = *b"PSKP";
pub const BINARY_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum LabelLine {
    Full { text: String, source: String },
    Text(String),
}

impl LabelLine {
    fn from_label(l: &AuxLabel) -> Self {
        LabelLine::Full {
            text: l.text.clone(),
            source: source_name(l.source).into(),
        }
    }

    fn into_label(self) -> std::result::Result<AuxLabel, String> {
        match self {
            LabelLine::Text(text) => Ok(AuxLabel::babel(text)),
            LabelLine::Full { text, source } => Ok(AuxLabel {
                text,
                source: parse_source(&source)
                    .ok_or_else(|| format!("unknown label source `{source}`"))?,
            }),
        }
    }
}

fn source_name(s: LabelSource) -> &'static str {
    match s {
        LabelSource::Babel => "babel",
        LabelSource::Dancing => "dancing",
    }
}

fn parse_source(s: &str) -> Option<LabelSource> {
    match s {
        "babel" => Some(LabelSource::Babel),
        "dancing" => Some(LabelSource::Dancing),
        _ => None,
    }
}

type JointMap = BTreeMap<String, [f64; 3]>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseLine {
    pose_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sequence_id: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    labels: Vec<LabelLine>,
    joints: JointMap,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceLine {
    sequence_id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    labels: Vec<LabelLine>,
    frames: Vec<JointMap>,
}

fn joint_map(pose: &PoseKeypoints) -> JointMap {
    let reg = pose.registry();
    pose.coords()
        .iter()
        .enumerate()
        .map(|(i, v)| (reg.name(i).to_string(), [v.x, v.y, v.z]))
        .collect()
}

fn keypoints(
    map: &JointMap,
    registry: &Arc<Registry>,
) -> std::result::Result<PoseKeypoints, String> {
    if let Some(extra) = map.keys().find(|k| registry.index_of(k).is_none()) {
        return Err(format!("unknown joint `{extra}`"));
    }
    let coords = registry
        .keypoints()
        .iter()
        .map(|k| {
            map.get(&k.name)
                .map(|&[x, y, z]| Vec3::new(x, y, z))
                .ok_or_else(|| format!("missing joint `{}`", k.name))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    PoseKeypoints::new(registry.clone(), coords).map_err(|e| e.to_string())
}

fn labels(lines: Vec<LabelLine>) -> std::result::Result<Vec<AuxLabel>, String> {
    lines.into_iter().map(LabelLine::into_label).collect()
}

/// One JSON object per line: `pose_id`, optional `sequence_id` and `labels`,
/// and `joints` mapping every registry name to `[x, y, z]`.
pub fn read_poses_jsonl<R: BufRead>(
    reader: R,
    registry: &Arc<Registry>,
    source_name: &str,
) -> Result<Vec<PoseRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::parse(source_name, i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fail = |m: String| Error::parse(source_name, i + 1, m);
        let parsed: PoseLine = serde_json::from_str(&line).map_err(|e| fail(e.to_string()))?;
        let kp = keypoints(&parsed.joints, registry).map_err(fail)?;
        out.push(PoseRecord {
            pose_id: parsed.pose_id,
            keypoints: kp,
            sequence_id: parsed.sequence_id,
            aux_labels: labels(parsed.labels).map_err(fail)?,
        });
    }
    Ok(out)
}

pub fn write_poses_jsonl<W: Write>(records: &[PoseRecord], mut out: W) -> Result<()> {
    for r in records {
        let line = PoseLine {
            pose_id: r.pose_id.clone(),
            sequence_id: r.sequence_id.clone(),
            labels: r.aux_labels.iter().map(LabelLine::from_label).collect(),
            joints: joint_map(&r.keypoints),
        };
        serde_json::to_writer(&mut out, &line).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSequence {
    pub frames: SequenceFrames,
    pub labels: Vec<AuxLabel>,
}

/// One sequence per line: `sequence_id`, optional `labels`, and `frames`, a
/// list of joint maps as in the pose format.
pub fn read_sequences_jsonl<R: BufRead>(
    reader: R,
    registry: &Arc<Registry>,
    source_name: &str,
) -> Result<Vec<LabeledSequence>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::parse(source_name, i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fail = |m: String| Error::parse(source_name, i + 1, m);
        let parsed: SequenceLine = serde_json::from_str(&line).map_err(|e| fail(e.to_string()))?;
        let frames = parsed
            .frames
            .iter()
            .enumerate()
            .map(|(f, m)| keypoints(m, registry).map_err(|e| fail(format!("frame {f}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        out.push(LabeledSequence {
            frames: SequenceFrames {
                sequence_id: parsed.sequence_id,
                frames,
            },
            labels: labels(parsed.labels).map_err(fail)?,
        });
    }
    Ok(out)
}

pub fn write_sequences_jsonl<W: Write>(sequences: &[LabeledSequence], mut out: W) -> Result<()> {
    for s in sequences {
        let line = SequenceLine {
            sequence_id: s.frames.sequence_id.clone(),
            labels: s.labels.iter().map(LabelLine::from_label).collect(),
            frames: s.frames.frames.iter().map(joint_map).collect(),
        };
        serde_json::to_writer(&mut out, &line).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn put_str<W: Write>(out: &mut W, s: &str) -> std::io::Result<()> {
    let len = u16::try_from(s.len())
        .map_err(|_| std::io::Error::other(format!("string too long: {s:.40}")))?;
    out.write_all(&len.to_le_bytes())?;
    out.write_all(s.as_bytes())
}

/// Packed variant: magic, version, joint table, record count, then per
/// record its id, optional sequence id, labels and little-endian `f32`
/// triples in joint-table order. Coordinates lose precision to `f32`.
pub fn write_poses_binary<W: Write>(
    records: &[PoseRecord],
    registry: &Registry,
    mut out: W,
) -> Result<()> {
    out.write_all(&BINARY_MAGIC)?;
    out.write_all(&BINARY_VERSION.to_le_bytes())?;
    out.write_all(&(registry.len() as u32).to_le_bytes())?;
    for k in registry.keypoints() {
        put_str(&mut out, &k.name)?;
    }
    out.write_all(&(records.len() as u64).to_le_bytes())?;
    for r in records {
        if **r.keypoints.registry() != *registry {
            return Err(Error::Pipeline(posecode_core::Error::RegistryMismatch));
        }
        put_str(&mut out, &r.pose_id)?;
        match &r.sequence_id {
            Some(s) => {
                out.write_all(&[1])?;
                put_str(&mut out, s)?;
            }
            None => out.write_all(&[0])?,
        }
        out.write_all(&(r.aux_labels.len() as u16).to_le_bytes())?;
        for l in &r.aux_labels {
            out.write_all(&[l.source as u8])?;
            put_str(&mut out, &l.text)?;
        }
        for v in r.keypoints.coords() {
            for c in [v.x, v.y, v.z] {
                out.write_all(&(c as f32).to_le_bytes())?;
            }
        }
    }
    Ok(())
}

struct Input<'a, R> {
    reader: R,
    name: &'a str,
    record: usize,
}

impl<R: Read> Input<'_, R> {
    fn fail(&self, m: impl Into<String>) -> Error {
        Error::parse(self.name, self.record, m)
    }

    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0; N];
        self.reader
            .read_exact(&mut b)
            .map_err(|e| self.fail(format!("truncated input: {e}")))?;
        Ok(b)
    }

    fn string(&mut self) -> Result<String> {
        let len = u16::from_le_bytes(self.bytes()?) as usize;
        let mut b = vec![0; len];
        self.reader
            .read_exact(&mut b)
            .map_err(|e| self.fail(format!("truncated input: {e}")))?;
        String::from_utf8(b).map_err(|_| self.fail("invalid UTF-8"))
    }
}

/// Reads the packed format; the joint table must name exactly the joints of
/// `registry`, in any order. Error positions count records from 1, with 0
/// for the header.
pub fn read_poses_binary<R: Read>(
    reader: R,
    registry: &Arc<Registry>,
    source_name: &str,
) -> Result<Vec<PoseRecord>> {
    let mut input = Input {
        reader,
        name: source_name,
        record: 0,
    };
    if input.bytes::<4>()? != BINARY_MAGIC {
        return Err(input.fail("not a packed pose file"));
    }
    let version = u32::from_le_bytes(input.bytes()?);
    if version != BINARY_VERSION {
        return Err(input.fail(format!("unsupported version {version}")));
    }
    let joints = u32::from_le_bytes(input.bytes()?) as usize;
    if joints != registry.len() {
        return Err(input.fail(format!("{joints} joints, registry has {}", registry.len())));
    }
    let mut slot = Vec::with_capacity(joints);
    for _ in 0..joints {
        let name = input.string()?;
        let i = registry
            .index_of(&name)
            .ok_or_else(|| input.fail(format!("unknown joint `{name}`")))?;
        if slot.contains(&i) {
            return Err(input.fail(format!("joint `{name}` listed twice")));
        }
        slot.push(i);
    }
    let count = u64::from_le_bytes(input.bytes()?) as usize;
    let mut out = Vec::with_capacity(count.min(1 << 20));
    for r in 0..count {
        input.record = r + 1;
        let pose_id = input.string()?;
        let sequence_id = match input.bytes::<1>()?[0] {
            0 => None,
            1 => Some(input.string()?),
            f => return Err(input.fail(format!("bad sequence flag {f}"))),
        };
        let n_labels = u16::from_le_bytes(input.bytes()?);
        let mut aux_labels = Vec::with_capacity(n_labels as usize);
        for _ in 0..n_labels {
            let source = match input.bytes::<1>()?[0] {
                0 => LabelSource::Babel,
                1 => LabelSource::Dancing,
                s => return Err(input.fail(format!("bad label source {s}"))),
            };
            aux_labels.push(AuxLabel {
                text: input.string()?,
                source,
            });
        }
        let mut coords = vec![Vec3::ZERO; joints];
        for &i in &slot {
            let mut c = [0.0; 3];
            for v in &mut c {
                *v = f32::from_le_bytes(input.bytes()?) as f64;
            }
            coords[i] = Vec3::new(c[0], c[1], c[2]);
        }
        let keypoints =
            PoseKeypoints::new(registry.clone(), coords).map_err(|e| input.fail(e.to_string()))?;
        out.push(PoseRecord {
            pose_id,
            keypoints,
            sequence_id,
            aux_labels,
        });
    }
    Ok(out)
}

/// Corpus file by extension: `.pskp` is the packed format, anything else
/// JSON lines. Pose ids must be unique.
pub fn read_corpus(path: &Path, registry: &Arc<Registry>) -> Result<Vec<PoseRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = std::io::BufReader::new(file);
    let name = path.display().to_string();
    let records = if path.extension().is_some_and(|e| e == "pskp") {
        read_poses_binary(reader, registry, &name)?
    } else {
        read_poses_jsonl(reader, registry, &name)?
    };
    let corpus = PoseCorpus::new(records).map_err(|err| Error::Core {
        path: path.into(),
        err,
    })?;
    Ok(corpus.records)
}
