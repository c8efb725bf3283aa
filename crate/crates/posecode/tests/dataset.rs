use posecode::dataset::{
    category_matrix, farthest_point_sample_parallel, generate_dataset, thread_pool, GenerateOptions,
};
use posecode_core::sampler::farthest_point_sample_poses;
use posecode_core::{synthetic, CaptionProfile, Captioner, PoseKeypoints, PoseRecord, Vec3};

fn opts(seed: u64) -> GenerateOptions {
    GenerateOptions {
        schedule: CaptionProfile::default_schedule(),
        per_pose: 3,
        seed,
        provenance: true,
    }
}

fn run(corpus: &[PoseRecord], jobs: usize) -> Vec<u8> {
    let captioner = Captioner::with_defaults().unwrap();
    let pool = thread_pool(Some(jobs)).unwrap();
    let mut out = Vec::new();
    let report = generate_dataset(corpus, &captioner, &opts(11), &pool, &mut out).unwrap();
    assert!(report.failures.is_empty());
    assert_eq!(report.captions, corpus.len() * 3);
    out
}

#[test]
fn output_does_not_depend_on_worker_count() {
    // more poses than one batch so batch boundaries are crossed
    let corpus = synthetic::varied_corpus(1100, 4);
    let one = run(&corpus, 1);
    assert_eq!(one, run(&corpus, 4));
    assert_eq!(one, run(&corpus, 8));
}

#[test]
fn failures_are_reported_and_skipped() {
    let mut corpus = synthetic::varied_corpus(4, 5);
    let reg = corpus[0].keypoints.registry().clone();
    let flat = PoseKeypoints::new(reg.clone(), vec![Vec3::ZERO; reg.len()]).unwrap();
    corpus.insert(2, PoseRecord::new("collapsed", flat));
    let captioner = Captioner::with_defaults().unwrap();
    let pool = thread_pool(Some(2)).unwrap();
    let mut out = Vec::new();
    let report = generate_dataset(&corpus, &captioner, &opts(1), &pool, &mut out).unwrap();
    assert_eq!(report.poses, 5);
    assert_eq!(report.captions, 12);
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].pose_id, "collapsed");
}

#[test]
fn empty_schedule_is_rejected() {
    let captioner = Captioner::with_defaults().unwrap();
    let pool = thread_pool(Some(1)).unwrap();
    let mut o = opts(1);
    o.schedule.clear();
    let corpus = synthetic::varied_corpus(1, 1);
    assert!(generate_dataset(&corpus, &captioner, &o, &pool, Vec::new()).is_err());
}

#[test]
fn parallel_category_matrix_matches_sequential() {
    let corpus = synthetic::varied_corpus(200, 6);
    let captioner = Captioner::with_defaults().unwrap();
    let pool = thread_pool(Some(4)).unwrap();
    let m = category_matrix(&corpus, &captioner, &pool).unwrap();
    for (row, r) in m.rows.iter().zip(&corpus) {
        let p = captioner.extend(&r.keypoints).unwrap();
        assert_eq!(
            row,
            &captioner.posecodes().noiseless_categories(&p).unwrap()
        );
    }
    assert!(category_matrix(&[], &captioner, &pool).is_err());
}

#[test]
fn parallel_sampling_matches_sequential() {
    let corpus = synthetic::varied_corpus(300, 7);
    let poses: Vec<&PoseKeypoints> = corpus.iter().map(|r| &r.keypoints).collect();
    let pool = thread_pool(Some(4)).unwrap();
    for seed in 0..5 {
        assert_eq!(
            farthest_point_sample_parallel(&poses, 40, seed, &pool).unwrap(),
            farthest_point_sample_poses(&poses, 40, seed).unwrap()
        );
    }
    assert!(farthest_point_sample_parallel(&poses, 301, 0, &pool).is_err());
}
