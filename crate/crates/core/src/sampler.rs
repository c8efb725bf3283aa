//! Candidate extraction from motion sequences and farthest-point sampling
//! under the mean per-joint distance.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::pose::{mpje_coords, PoseKeypoints, PoseRecord};
use crate::rng::stream;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFrames {
    pub sequence_id: String,
    pub frames: Vec<PoseKeypoints>,
}

/// Drops `head_tail` frames at both ends, then keeps the first frame of
/// every `stride`-frame window. Ids are `<sequence>/<frame index>`.
pub fn filter_frames(seq: &SequenceFrames, head_tail: usize, stride: usize) -> Vec<PoseRecord> {
    let n = seq.frames.len();
    if n <= 2 * head_tail || stride == 0 {
        return Vec::new();
    }
    (head_tail..n - head_tail)
        .step_by(stride)
        .map(|i| {
            let mut r =
                PoseRecord::new(format!("{}/{}", seq.sequence_id, i), seq.frames[i].clone());
            r.sequence_id = Some(seq.sequence_id.clone());
            r
        })
        .collect()
}

/// Seeded uniform first pick.
pub fn first_pick(count: usize, seed: u64) -> usize {
    stream(seed).gen_range(0..count)
}

/// Unselected index with the largest distance, lowest index on ties.
pub fn farthest_unselected(min_dist: &[f64], selected: &[bool]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &d) in min_dist.iter().enumerate() {
        if selected[i] {
            continue;
        }
        if best.is_none_or(|b| d > min_dist[b]) {
            best = Some(i);
        }
    }
    best
}

fn check(poses: &[&PoseKeypoints], n: usize) -> Result<()> {
    if n > poses.len() {
        return Err(Error::SampleTooLarge {
            requested: n,
            available: poses.len(),
        });
    }
    if let Some(first) = poses.first() {
        if poses.iter().any(|p| p.registry() != first.registry()) {
            return Err(Error::RegistryMismatch);
        }
    }
    Ok(())
}

/// Greedy max-min selection of `n` poses; returns indices in pick order.
/// Keeps the distance of every candidate to its nearest selected pose, so
/// the cost is `O(n * candidates)` distance evaluations.
pub fn farthest_point_sample(candidates: &[PoseRecord], n: usize, seed: u64) -> Result<Vec<usize>> {
    let poses: Vec<&PoseKeypoints> = candidates.iter().map(|r| &r.keypoints).collect();
    farthest_point_sample_poses(&poses, n, seed)
}

pub fn farthest_point_sample_poses(
    poses: &[&PoseKeypoints],
    n: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    farthest_point_sample_with(poses, n, seed, |pick, min_dist, selected| {
        relax_min_distances(pick, poses, min_dist, selected)
    })
}

/// Lowers `min_dist[i]` to the distance between `pick` and each unselected
/// pose `i`.
pub fn relax_min_distances(
    pick: &PoseKeypoints,
    poses: &[&PoseKeypoints],
    min_dist: &mut [f64],
    selected: &[bool],
) {
    let p = pick.coords();
    for (i, q) in poses.iter().enumerate() {
        if !selected[i] {
            let d = mpje_coords(p, q.coords());
            if d < min_dist[i] {
                min_dist[i] = d;
            }
        }
    }
}

/// Farthest-point sampling with a caller-supplied distance update, called
/// as `update(pick, min_dist, selected)` after every pick; lets callers
/// spread the update over threads.
pub fn farthest_point_sample_with<U>(
    poses: &[&PoseKeypoints],
    n: usize,
    seed: u64,
    mut update: U,
) -> Result<Vec<usize>>
where
    U: FnMut(&PoseKeypoints, &mut [f64], &[bool]),
{
    check(poses, n)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut selected = vec![false; poses.len()];
    let mut min_dist = vec![f64::INFINITY; poses.len()];
    let mut order = Vec::with_capacity(n);
    let mut pick = first_pick(poses.len(), seed);
    loop {
        selected[pick] = true;
        order.push(pick);
        if order.len() == n {
            return Ok(order);
        }
        update(poses[pick], &mut min_dist, &selected);
        pick = farthest_unselected(&min_dist, &selected).expect("n <= candidates");
    }
}
