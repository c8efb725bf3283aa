//! Parallel drivers. Work is split across a rayon pool but results are
//! always emitted in corpus order, so output never depends on `jobs`.

use std::io::Write;

use posecode_core::sampler::farthest_point_sample_with;
use posecode_core::selection::CategoryMatrix;
use posecode_core::{mpje_coords, CaptionProfile, Captioner, PoseKeypoints, PoseRecord};
use rayon::prelude::*;

use crate::formats::CaptionLine;
use crate::{Error, Result};

/// Poses captioned per parallel batch before writing.
const BATCH: usize = 1024;

pub fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j);
    }
    b.build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub schedule: Vec<CaptionProfile>,
    pub per_pose: u32,
    pub seed: u64,
    pub provenance: bool,
}

#[derive(Debug)]
pub struct PoseFailure {
    pub pose_id: String,
    pub error: posecode_core::Error,
}

#[derive(Debug, Default)]
pub struct GenerationReport {
    pub poses: usize,
    pub captions: usize,
    pub failures: Vec<PoseFailure>,
}

/// All captions of one pose; caption `i` uses profile `i mod schedule
/// length` and its own seed derived from `(seed, pose_id, i)`.
pub fn caption_pose(
    record: &PoseRecord,
    captioner: &Captioner,
    opts: &GenerateOptions,
) -> posecode_core::Result<Vec<CaptionLine>> {
    (0..opts.per_pose)
        .map(|i| {
            captioner
                .caption_indexed(record, &opts.schedule, opts.seed, i)
                .map(|c| CaptionLine::new(&c, i, opts.provenance))
        })
        .collect()
}

/// Captions every pose and writes one JSON line per caption, in corpus
/// order. A failing pose contributes no lines and is reported.
pub fn generate_dataset<W: Write>(
    corpus: &[PoseRecord],
    captioner: &Captioner,
    opts: &GenerateOptions,
    pool: &rayon::ThreadPool,
    mut out: W,
) -> Result<GenerationReport> {
    if opts.schedule.is_empty() {
        return Err(Error::Config("empty profile schedule".into()));
    }
    let mut report = GenerationReport {
        poses: corpus.len(),
        ..Default::default()
    };
    for batch in corpus.chunks(BATCH) {
        let results: Vec<_> = pool.install(|| {
            batch
                .par_iter()
                .map(|r| caption_pose(r, captioner, opts))
                .collect()
        });
        for (record, result) in batch.iter().zip(results) {
            match result {
                Ok(lines) => {
                    for line in lines {
                        out.write_all(line.to_json().as_bytes())?;
                        out.write_all(b"\n")?;
                        report.captions += 1;
                    }
                }
                Err(error) => report.failures.push(PoseFailure {
                    pose_id: record.pose_id.clone(),
                    error,
                }),
            }
        }
    }
    out.flush()?;
    Ok(report)
}

/// Noiseless categories of every pose, computed in parallel.
pub fn category_matrix(
    corpus: &[PoseRecord],
    captioner: &Captioner,
    pool: &rayon::ThreadPool,
) -> Result<CategoryMatrix> {
    if corpus.is_empty() {
        return Err(posecode_core::Error::EmptyCorpus.into());
    }
    let set = captioner.posecodes();
    let rows = pool.install(|| {
        corpus
            .par_iter()
            .map(|r| {
                captioner
                    .extend(&r.keypoints)
                    .and_then(|p| set.noiseless_categories(&p))
                    .map_err(|e| posecode_core::Error::Context {
                        context: format!("pose `{}`", r.pose_id),
                        source: Box::new(e),
                    })
            })
            .collect::<posecode_core::Result<Vec<_>>>()
    })?;
    Ok(CategoryMatrix { rows })
}

/// Farthest-point sampling with the distance updates spread over the pool;
/// selects exactly what the sequential sampler selects.
pub fn farthest_point_sample_parallel(
    poses: &[&PoseKeypoints],
    n: usize,
    seed: u64,
    pool: &rayon::ThreadPool,
) -> Result<Vec<usize>> {
    let order = pool.install(|| {
        farthest_point_sample_with(poses, n, seed, |pick, min_dist, selected| {
            let p = pick.coords();
            min_dist
                .par_iter_mut()
                .zip(selected.par_iter())
                .zip(poses.par_iter())
                .for_each(|((m, &sel), q)| {
                    if !sel {
                        let d = mpje_coords(p, q.coords());
                        if d < *m {
                            *m = d;
                        }
                    }
                });
        })
    })?;
    Ok(order)
}
