//! Acceptance checks; prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use posecode::dataset::{generate_dataset, thread_pool, GenerateOptions};
use posecode::formats::write_poses_jsonl;
use posecode_core::pose::{mirror_name, mirror_pose};
use posecode_core::posecode::{ExtractedPosecode, PosecodeKind, PosecodeSet};
use posecode_core::rng::stream;
use posecode_core::sampler::{farthest_point_sample_poses, first_pick};
use posecode_core::selection::{
    apply_relation_ripple, classify_eligibility, compute_category_frequencies,
    mine_statistics_rules, CategoryMatrix, EligibilityClass,
};
use posecode_core::superposecode::evaluate_super_posecodes;
use posecode_core::{
    caption_seed, catalog, mirror_text, synthetic, CaptionProfile, Captioner, EligibilityTable,
    MiningParams, PoseKeypoints, PoseRecord, SuperPosecodeSet,
};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn captioner() -> Captioner {
    Captioner::with_defaults().expect("default tables load")
}

// Categorization table, written out independently of the catalog.
fn expected_bins() -> Vec<(PosecodeKind, Vec<&'static str>, Vec<f64>)> {
    use PosecodeKind::*;
    vec![
        (
            Angle,
            vec![
                "completely bent",
                "almost completely bent",
                "bent at right angle",
                "partially bent",
                "slightly bent",
                "straight",
            ],
            vec![45.0, 75.0, 105.0, 135.0, 160.0],
        ),
        (
            Distance,
            vec!["close", "shoulder width apart", "spread", "wide"],
            vec![0.2, 0.4, 0.8],
        ),
        (
            RelPosX,
            vec!["at the right of", "x-ignored", "at the left of"],
            vec![-0.15, 0.15],
        ),
        (
            RelPosY,
            vec!["below", "y-ignored", "above"],
            vec![-0.15, 0.15],
        ),
        (
            RelPosZ,
            vec!["behind", "z-ignored", "in front of"],
            vec![-0.15, 0.15],
        ),
        (
            PitchRoll,
            vec!["vertical", "pitch-roll-ignored", "horizontal"],
            vec![10.0, 80.0],
        ),
        (
            GroundContact,
            vec!["on the ground", "ground-ignored"],
            vec![0.1],
        ),
    ]
}

fn threshold_conformance() -> Outcome {
    let start = Instant::now();
    let table = catalog::binning_table();
    let mut rng = stream(1);
    let mut checked = 0;
    for (kind, names, thresholds) in expected_bins() {
        let spec = table
            .get(kind)
            .ok_or(format!("no spec for {}", kind.name()))?;
        ensure(spec.categories == names, || {
            format!("{} category names differ", kind.name())
        })?;
        ensure(spec.thresholds == thresholds, || {
            format!("{} thresholds differ", kind.name())
        })?;
        let mut quiet = spec.clone();
        quiet.noise = 0.0;
        let unit = kind.unit();
        for (i, &t) in thresholds.iter().enumerate() {
            for (v, want) in [(t.next_down(), i), (t, i), (t.next_up(), i + 1)] {
                let got = spec.categorize_value(v, 0.0, &mut rng);
                let raw = posecode_core::posecode::Measurement { value: v, unit };
                let via_measurement = posecode_core::posecode::categorize(raw, &quiet, &mut rng)
                    .map_err(|e| e.to_string())?;
                ensure(got == want && via_measurement == want, || {
                    format!(
                        "{} at {v:e}: got {got}/{via_measurement}, want {want}",
                        kind.name()
                    )
                })?;
                ensure(spec.categories[got] == names[want], || {
                    "name mismatch".into()
                })?;
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{checked} boundary values across 7 kinds in {elapsed:?}"
    ))
}

/// Categories whose band intersects `[v - eta, v + eta]`.
fn attainable(thresholds: &[f64], v: f64, eta: f64) -> Vec<usize> {
    let (lo, hi) = (v - eta, v + eta);
    (0..=thresholds.len())
        .filter(|&c| {
            let below = if c == 0 {
                f64::NEG_INFINITY
            } else {
                thresholds[c - 1]
            };
            let above = if c == thresholds.len() {
                f64::INFINITY
            } else {
                thresholds[c]
            };
            below < hi && lo <= above
        })
        .collect()
}

fn noise_containment() -> Outcome {
    let table = catalog::binning_table();
    let mut rng = stream(2);
    let mut draws = 0usize;
    let mut moved = 0usize;
    for spec in table.iter() {
        let eta = spec.noise;
        for &t in &spec.thresholds {
            for _ in 0..10_000 {
                let v = t + rng.gen_range(-2.0..=2.0) * eta;
                let got = spec.categorize_value(v, 1.0, &mut rng);
                let ok = attainable(&spec.thresholds, v, eta);
                ensure(ok.contains(&got), || {
                    format!("{} v={v}: category {got} outside {ok:?}", spec.kind.name())
                })?;
                moved += usize::from(got != spec.band(v));
                draws += 1;
            }
        }
    }
    ensure(moved > 0, || "jitter never changed a category".into())?;
    Ok(format!(
        "{draws} draws, 0 violations, {moved} jittered across a boundary"
    ))
}

fn end_to_end_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = dir.path().join("poses.jsonl");
    let records = synthetic::varied_corpus(1000, 3);
    write_poses_jsonl(
        &records,
        std::fs::File::create(&corpus).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for jobs in ["1", "8"] {
        let out = dir.path().join(format!("captions-{jobs}.jsonl"));
        let status = Command::new(env!("CARGO_BIN_EXE_posecode"))
            .args(["generate", "--corpus"])
            .arg(&corpus)
            .args(["--seed", "7", "--per-pose", "3", "--jobs", jobs, "--out"])
            .arg(&out)
            .env_remove("POSECODE_DATA_DIR")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || {
            String::from_utf8_lossy(&status.stderr).into()
        })?;
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    let lines = outputs[0].iter().filter(|&&b| b == b'\n').count();
    ensure(lines == 3000, || format!("{lines} lines"))?;
    ensure(outputs[0] == outputs[1], || {
        "outputs differ between 1 and 8 workers".into()
    })?;
    Ok(format!(
        "{lines} lines, {} bytes, identical",
        outputs[0].len()
    ))
}

fn throughput() -> Outcome {
    let c = captioner();
    let corpus = synthetic::varied_corpus(10_000, 4);
    let pool = thread_pool(None).map_err(|e| e.to_string())?;
    let opts = GenerateOptions {
        schedule: CaptionProfile::default_schedule(),
        per_pose: 3,
        seed: 7,
        provenance: false,
    };
    let start = Instant::now();
    let report =
        generate_dataset(&corpus, &c, &opts, &pool, std::io::sink()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(report.failures.is_empty(), || {
        format!("{} failures", report.failures.len())
    })?;
    ensure(report.captions == 30_000, || {
        format!("{} captions", report.captions)
    })?;
    let rate = report.captions as f64 / elapsed.as_secs_f64();
    let detail = format!(
        "30000 captions in {:.2}s, {rate:.0} captions/s on {} worker(s)",
        elapsed.as_secs_f64(),
        pool.current_num_threads()
    );
    ensure(elapsed <= Duration::from_secs(60), || detail.clone())?;
    Ok(detail)
}

fn super_posecode_table() -> Outcome {
    let c = captioner();
    let supers = c.super_posecodes();
    let examples = synthetic::super_posecode_examples();
    let mut alternatives = 0;
    for (s, def) in supers.defs().iter().enumerate() {
        for a in 0..supers.alternatives(s).len() {
            ensure(
                examples
                    .iter()
                    .any(|(id, alt, _)| *id == def.id && *alt == a),
                || format!("no example for {} alternative {a}", def.id),
            )?;
            alternatives += 1;
        }
    }
    ensure(supers.defs().len() == 10, || {
        format!("{} super-posecodes", supers.defs().len())
    })?;
    let deterministic = CaptionProfile::n1().deterministic();
    for (i, (id, alt, pose)) in examples.iter().enumerate() {
        let s = supers
            .defs()
            .iter()
            .position(|d| d.id == *id)
            .ok_or("unknown id")?;
        let extended = c.extend(pose).map_err(|e| e.to_string())?;
        let cats = c
            .posecodes()
            .noiseless_categories(&extended)
            .map_err(|e| e.to_string())?;
        for (a, reqs) in supers.alternatives(s).iter().enumerate() {
            let holds = reqs.iter().all(|&(d, cat)| cats[d] == cat);
            ensure(holds == (a == *alt), || {
                format!("{id}: alternative {a} holds={holds}")
            })?;
        }
        let extracted = c
            .posecodes()
            .extract(&extended, 0.0, &mut stream(0))
            .map_err(|e| e.to_string())?;
        let outcome = evaluate_super_posecodes(&extracted, supers);
        ensure(outcome.produced.contains(&s), || {
            format!("{id}/{alt} not produced")
        })?;
        let record = PoseRecord::new(format!("example-{i}"), pose.clone());
        let (caption, _) = c
            .caption_traced(&record, &deterministic, 0)
            .map_err(|e| e.to_string())?;
        ensure(caption.provenance.iter().any(|p| p.fact == *id), || {
            format!("{id} missing from caption: {}", caption.text)
        })?;
    }

    let knee_angle = |fact: &str| fact == "angle.left_knee" || fact == "angle.right_knee";
    let kneeling = PoseRecord::new("kneeling", synthetic::kneeling_sitting_back());
    let mut captions = 0;
    for profile in CaptionProfile::default_schedule() {
        for seed in 0..50 {
            let (caption, trace) = c
                .caption_traced(&kneeling, &profile, seed)
                .map_err(|e| e.to_string())?;
            ensure(
                trace.produced_supers.iter().any(|s| s == "body_kneeling"),
                || "kneeling did not fire".into(),
            )?;
            ensure(
                !caption.provenance.iter().any(|p| knee_angle(&p.fact)),
                || format!("knee angle kept next to kneeling: {}", caption.text),
            )?;
            captions += 1;
        }
    }
    let crouch = synthetic::standing()
        .rx("left_knee", 160.0)
        .rx("right_knee", 160.0)
        .rx("left_hip", -90.0)
        .rx("right_hip", -90.0)
        .build();
    let (caption, trace) = c
        .caption_traced(&PoseRecord::new("crouch", crouch), &deterministic, 0)
        .map_err(|e| e.to_string())?;
    ensure(
        !trace.produced_supers.iter().any(|s| s == "body_kneeling"),
        || "kneeling fired in the air".into(),
    )?;
    ensure(
        caption.provenance.iter().any(|p| knee_angle(&p.fact)),
        || format!("knee angle lost without kneeling: {}", caption.text),
    )?;
    Ok(format!(
        "{} super-posecodes, {alternatives} alternatives, {captions} kneeling captions without knee angles",
        supers.defs().len()
    ))
}

/// `(axis, from, to)` for an ordering fact: the first relative-position
/// category puts the first keypoint lower on the axis, the last one higher.
fn order_edge(p: &ExtractedPosecode, set: &PosecodeSet) -> Option<(PosecodeKind, String, String)> {
    let def = set.def(p.def);
    if !matches!(
        def.kind,
        PosecodeKind::RelPosX | PosecodeKind::RelPosY | PosecodeKind::RelPosZ
    ) {
        return None;
    }
    let last = set.category_count(p.def) - 1;
    let (a, b) = (def.joints[0].clone(), def.joints[1].clone());
    match p.category {
        0 => Some((def.kind, a, b)),
        c if c == last => Some((def.kind, b, a)),
        _ => None,
    }
}

/// Transitive reduction per axis by Floyd-Warshall closure: an edge
/// `u -> v` is dropped when some third node `w` has `u ->+ w ->+ v`.
fn reduction_oracle(facts: &[ExtractedPosecode], set: &PosecodeSet) -> Vec<ExtractedPosecode> {
    let edges: Vec<_> = facts.iter().map(|p| order_edge(p, set)).collect();
    let mut closures = BTreeMap::new();
    for kind in [
        PosecodeKind::RelPosX,
        PosecodeKind::RelPosY,
        PosecodeKind::RelPosZ,
    ] {
        let mut nodes: Vec<&str> = edges
            .iter()
            .flatten()
            .filter(|e| e.0 == kind)
            .flat_map(|e| [e.1.as_str(), e.2.as_str()])
            .collect();
        nodes.sort();
        nodes.dedup();
        let n = nodes.len();
        let idx = |s: &str| nodes.binary_search(&s).unwrap();
        let mut r = vec![vec![false; n]; n];
        for (_, a, b) in edges.iter().flatten().filter(|e| e.0 == kind) {
            r[idx(a)][idx(b)] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        let names: Vec<String> = nodes.iter().map(|s| s.to_string()).collect();
        closures.insert(kind, (names, r));
    }
    facts
        .iter()
        .zip(&edges)
        .filter(|(_, e)| match e {
            None => true,
            Some((kind, a, b)) => {
                let (names, r) = &closures[kind];
                let i = names.iter().position(|x| x == a).unwrap();
                let j = names.iter().position(|x| x == b).unwrap();
                !(0..names.len()).any(|w| w != i && w != j && r[i][w] && r[w][j])
            }
        })
        .map(|(p, _)| *p)
        .collect()
}

/// Relative positions between every pair of a few keypoints on all three
/// axes, plus some definitions that carry no ordering.
fn dense_relpos_set(c: &Captioner) -> Result<PosecodeSet, String> {
    use posecode_core::posecode::PosecodeDef;
    const JOINTS: [&str; 8] = [
        "left_hand",
        "right_hand",
        "left_shoulder",
        "right_shoulder",
        "neck",
        "pelvis",
        "left_foot",
        "right_foot",
    ];
    let mut defs = vec![
        PosecodeDef::new(
            "angle.left_knee",
            PosecodeKind::Angle,
            &["left_hip", "left_knee", "left_ankle"],
        ),
        PosecodeDef::new(
            "distance.left_hand.right_hand",
            PosecodeKind::Distance,
            &["left_hand", "right_hand"],
        ),
        PosecodeDef::new(
            "ground.left_foot",
            PosecodeKind::GroundContact,
            &["left_foot"],
        ),
    ];
    for (kind, axis) in [
        (PosecodeKind::RelPosX, "x"),
        (PosecodeKind::RelPosY, "y"),
        (PosecodeKind::RelPosZ, "z"),
    ] {
        for (i, a) in JOINTS.iter().enumerate() {
            for b in &JOINTS[i + 1..] {
                defs.push(PosecodeDef::new(
                    format!("relpos_{axis}.{a}.{b}"),
                    kind,
                    &[a, b],
                ));
            }
        }
    }
    PosecodeSet::new(
        c.posecodes().registry().clone(),
        defs,
        catalog::binning_table(),
    )
    .map_err(|e| e.to_string())
}

fn relation_ripple_oracle(c: &Captioner) -> Result<(usize, usize), String> {
    let set = dense_relpos_set(c)?;
    let (relpos, plain): (Vec<usize>, Vec<usize>) =
        (0..set.len()).partition(|&d| set.def(d).id.starts_with("relpos"));
    let mut rng = stream(6);
    let (mut removed, mut ordering) = (0, 0);
    for _ in 0..1000 {
        // consistent orderings: every keypoint gets a random coordinate
        let mut coord = BTreeMap::new();
        let mut facts = Vec::new();
        // one axis per set so that chains are common
        let axis = [
            PosecodeKind::RelPosX,
            PosecodeKind::RelPosY,
            PosecodeKind::RelPosZ,
        ][rng.gen_range(0..3)];
        let mut defs: Vec<usize> = relpos
            .iter()
            .copied()
            .filter(|&d| set.def(d).kind == axis)
            .collect();
        defs.shuffle(&mut rng);
        let mut kept = 0;
        for &d in &defs {
            if kept == 10 {
                break;
            }
            let def = set.def(d);
            let mut at = |j: &str| {
                *coord
                    .entry((def.kind, j.to_string()))
                    .or_insert_with(|| rng.gen_range(0..5))
            };
            let (a, b) = (at(&def.joints[0]), at(&def.joints[1]));
            let category = match a.cmp(&b) {
                std::cmp::Ordering::Less => 0,
                std::cmp::Ordering::Equal => 1,
                std::cmp::Ordering::Greater => set.category_count(d) - 1,
            };
            if category != 1 {
                kept += 1;
            } else if rng.gen_bool(0.7) {
                continue;
            }
            let raw = posecode_core::posecode::Measurement::meters(f64::from(a) - f64::from(b));
            facts.push(ExtractedPosecode {
                def: d,
                raw,
                category,
            });
        }
        for &d in &plain {
            if rng.gen_bool(0.5) {
                let unit = set.def(d).kind.unit();
                let category = rng.gen_range(0..set.category_count(d));
                facts.push(ExtractedPosecode {
                    def: d,
                    raw: posecode_core::posecode::Measurement { value: 0.0, unit },
                    category,
                });
            }
        }
        facts.shuffle(&mut rng);
        let got = apply_relation_ripple(&facts, &set);
        let want = reduction_oracle(&facts, &set);
        ensure(got == want, || {
            format!("reduction differs on {} facts", facts.len())
        })?;
        ordering += kept;
        removed += facts.len() - got.len();
    }
    ensure(removed > 0, || "no implied fact in any set".into())?;
    Ok((ordering, removed))
}

/// Counterpart definition and whether its keypoints are listed in reverse.
fn mirror_partner(set: &PosecodeSet, d: usize) -> Option<(usize, bool)> {
    let def = set.def(d);
    let mirrored: Vec<String> = def.joints.iter().map(|j| mirror_name(j)).collect();
    let find = |joints: &[String]| {
        set.defs()
            .iter()
            .position(|e| e.kind == def.kind && e.joints == joints)
    };
    if let Some(m) = find(&mirrored) {
        return Some((m, false));
    }
    let mut reversed = mirrored;
    reversed.reverse();
    find(&reversed).map(|m| (m, true))
}

fn mirrored_category(set: &PosecodeSet, d: usize, c: usize) -> Option<(usize, usize)> {
    let (m, reversed) = mirror_partner(set, d)?;
    let kind = set.def(d).kind;
    let relpos = matches!(
        kind,
        PosecodeKind::RelPosX | PosecodeKind::RelPosY | PosecodeKind::RelPosZ
    );
    let flip = (kind == PosecodeKind::RelPosX) != (reversed && relpos);
    let last = set.category_count(d) - 1;
    Some((m, if flip { last - c } else { c }))
}

type Rule = (Vec<(usize, usize)>, (usize, usize), usize, usize);

/// Every `X => Y` with one or two items in `X`, by direct counting.
fn mining_oracle(
    rows: &[Vec<usize>],
    set: &PosecodeSet,
    usable: &BTreeSet<(usize, usize)>,
    params: &MiningParams,
) -> Vec<Rule> {
    let count = |items: &[(usize, usize)]| {
        rows.iter()
            .filter(|r| items.iter().all(|&(d, c)| r[d] == c))
            .count()
    };
    let passes = |x: &[(usize, usize)], y: (usize, usize)| -> Option<(usize, usize)> {
        let support = count(x);
        let mut with_y = x.to_vec();
        with_y.push(y);
        let hits = count(&with_y);
        let tau = if x.len() == 1 {
            params.tau_single
        } else {
            params.tau_pair
        };
        (support >= params.min_support && hits as f64 / support as f64 >= tau)
            .then_some((support, hits))
    };
    let items: Vec<(usize, usize)> = usable.iter().copied().collect();
    let mut xs: Vec<Vec<(usize, usize)>> = items.iter().map(|&i| vec![i]).collect();
    for (k, &a) in items.iter().enumerate() {
        for &b in &items[k + 1..] {
            xs.push(vec![a, b]);
        }
    }
    let m = |i: (usize, usize)| mirrored_category(set, i.0, i.1).unwrap();
    let mut out = Vec::new();
    for x in &xs {
        for &y in &items {
            if x.contains(&y) {
                continue;
            }
            let Some((support, hits)) = passes(x, y) else {
                continue;
            };
            let mx: Vec<_> = x.iter().map(|&i| m(i)).collect();
            let my = m(y);
            if (mx.len() == 2 && mx[0] == mx[1]) || mx.contains(&my) || passes(&mx, my).is_none() {
                continue;
            }
            out.push((x.clone(), y, support, hits));
        }
    }
    out
}

fn mining_oracle_check(c: &Captioner) -> Result<(usize, usize), String> {
    let full = c.posecodes();
    let mut rng = stream(8);
    let mut rules_total = 0;
    let mut trials = 0;
    for trial in 0..6 {
        // mirror-closed subset of at most 20 definitions
        let mut order: Vec<usize> = (0..full.len()).collect();
        order.shuffle(&mut rng);
        let mut chosen = BTreeSet::new();
        for d in order {
            let m = mirror_partner(full, d).map(|(m, _)| m).unwrap_or(d);
            let extra =
                usize::from(!chosen.contains(&d)) + usize::from(m != d && !chosen.contains(&m));
            if chosen.len() + extra <= 20 {
                chosen.insert(d);
                chosen.insert(m);
            }
        }
        let defs: Vec<_> = chosen.iter().map(|&d| full.def(d).clone()).collect();
        let set = PosecodeSet::new(full.registry().clone(), defs, catalog::binning_table())
            .map_err(|e| e.to_string())?;
        let mut table = EligibilityTable::new();
        for d in 0..set.len() {
            for k in 0..set.category_count(d) {
                let name = set.category_name(d, k);
                let class = if name.ends_with("-ignored") {
                    EligibilityClass::IgnoredAmbiguous
                } else {
                    EligibilityClass::Skippable
                };
                table.insert(set.def(d).id.clone(), name, class);
            }
        }
        let no_supers = SuperPosecodeSet::new(&set, vec![], vec![]).map_err(|e| e.to_string())?;
        let eligibility = table.compile(&set, &no_supers).map_err(|e| e.to_string())?;

        let records = synthetic::varied_corpus(500, 100 + trial);
        let poses: Vec<PoseKeypoints> = records
            .iter()
            .map(|r| c.extend(&r.keypoints))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let matrix = CategoryMatrix::from_poses(&poses, &set).map_err(|e| e.to_string())?;
        let params = MiningParams::default();
        let got = mine_statistics_rules(&matrix, &set, &eligibility, &params)
            .map_err(|e| e.to_string())?;

        let eligible = |d: usize, k: usize| !set.category_name(d, k).ends_with("-ignored");
        let usable: BTreeSet<(usize, usize)> = (0..set.len())
            .flat_map(|d| (0..set.category_count(d)).map(move |k| (d, k)))
            .filter(|&(d, k)| eligible(d, k))
            .filter(|&(d, k)| {
                mirrored_category(&set, d, k).is_some_and(|(md, mk)| eligible(md, mk))
            })
            .collect();
        let label =
            |(d, k): (usize, usize)| (set.def(d).id.clone(), set.category_name(d, k).to_string());
        let mut want: Vec<_> = mining_oracle(&matrix.rows, &set, &usable, &params)
            .into_iter()
            .map(|(x, y, s, h)| {
                let mut x: Vec<_> = x.into_iter().map(label).collect();
                x.sort();
                (x, label(y), s, h as f64 / s as f64)
            })
            .collect();
        want.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        let got: Vec<_> = got
            .iter()
            .map(|r| {
                let x: Vec<_> =
                    r.x.iter()
                        .map(|i| (i.posecode.clone(), i.category.clone()))
                        .collect();
                (
                    x,
                    (r.y.posecode.clone(), r.y.category.clone()),
                    r.support,
                    r.confidence,
                )
            })
            .collect();
        ensure(got == want, || {
            format!(
                "trial {trial}: {} mined rules, oracle {}",
                got.len(),
                want.len()
            )
        })?;
        rules_total += got.len();
        trials += 1;
    }
    ensure(rules_total > 0, || "no rule mined in any trial".into())?;
    Ok((trials, rules_total))
}

fn ripple_oracles() -> Outcome {
    let c = captioner();
    let (ordering, removed) = relation_ripple_oracle(&c)?;
    let (trials, rules) = mining_oracle_check(&c)?;
    Ok(format!(
        "1000 fact sets, {ordering} ordering facts, {removed} implied ones dropped; {trials} mining corpora, {rules} rules, all equal"
    ))
}

fn mpje(a: &PoseKeypoints, b: &PoseKeypoints) -> f64 {
    let d: f64 = a
        .coords()
        .iter()
        .zip(b.coords())
        .map(|(p, q)| {
            let (x, y, z) = (p.x - q.x, p.y - q.y, p.z - q.z);
            (x * x + y * y + z * z).sqrt()
        })
        .sum();
    d / a.coords().len() as f64
}

fn brute_force_fps(poses: &[PoseKeypoints], n: usize, seed: u64) -> Vec<usize> {
    let mut chosen = vec![first_pick(poses.len(), seed)];
    while chosen.len() < n {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..poses.len() {
            if chosen.contains(&i) {
                continue;
            }
            let d = chosen
                .iter()
                .map(|&s| mpje(&poses[i], &poses[s]))
                .fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        chosen.push(best.unwrap().0);
    }
    chosen
}

fn fps_oracle() -> Outcome {
    let mut rng = stream(9);
    let poses: Vec<PoseKeypoints> = (0..200).map(|_| synthetic::random_pose(&mut rng)).collect();
    let refs: Vec<&PoseKeypoints> = poses.iter().collect();
    for seed in 0..10 {
        let got = farthest_point_sample_poses(&refs, 50, seed).map_err(|e| e.to_string())?;
        let want = brute_force_fps(&poses, 50, seed);
        ensure(got == want, || format!("seed {seed}: selections differ"))?;
    }
    Ok("200 candidates, n=50, 10 seeds identical".into())
}

fn mirror_properties() -> Outcome {
    let c = captioner();
    let set = c.posecodes();
    let partners = (0..set.len())
        .filter(|&d| mirror_partner(set, d).is_some())
        .count();
    ensure(partners == set.len(), || {
        format!(
            "{} of {} definitions have a counterpart",
            partners,
            set.len()
        )
    })?;
    let mut rng = stream(10);
    let mut compared = 0;
    for _ in 0..1000 {
        let pose = synthetic::random_pose(&mut rng);
        let mirrored = mirror_pose(&pose).map_err(|e| e.to_string())?;
        let a = set
            .noiseless_categories(&c.extend(&pose).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let b = set
            .noiseless_categories(&c.extend(&mirrored).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        for (d, &cat) in a.iter().enumerate() {
            let (md, mc) = mirrored_category(set, d, cat).unwrap();
            ensure(b[md] == mc, || {
                format!(
                    "{} = {} but mirrored {} = {}",
                    set.def(d).id,
                    set.category_name(d, cat),
                    set.def(md).id,
                    set.category_name(md, b[md])
                )
            })?;
            compared += 1;
        }
    }
    let schedule = CaptionProfile::default_schedule();
    let records = synthetic::varied_corpus(334, 11);
    let mut captions = 0;
    let mut changed = 0;
    'outer: for r in &records {
        for i in 0..3 {
            if captions == 1000 {
                break 'outer;
            }
            let text = c
                .caption_indexed(r, &schedule, 7, i)
                .map_err(|e| e.to_string())?
                .text;
            let once = mirror_text(&text);
            ensure(mirror_text(&once) == text, || {
                format!("not an involution: {text}")
            })?;
            ensure(
                once.split_whitespace().count() == text.split_whitespace().count(),
                || format!("word count changed: {text}"),
            )?;
            changed += usize::from(once != text);
            captions += 1;
        }
    }
    Ok(format!("{compared} categories side-swapped correctly; {captions} captions ({changed} changed by mirroring) restored"))
}

fn eligibility_thresholds() -> Outcome {
    let set = catalog::default_posecode_set().map_err(|e| e.to_string())?;
    let poses = 100;
    // three posecodes carry one planted category each; the rest sit in 0
    let planted = [(0usize, 1usize, 70usize), (1, 1, 30), (2, 1, 3)];
    let rows: Vec<Vec<usize>> = (0..poses)
        .map(|i| {
            let mut row = vec![0; set.len()];
            for &(d, c, n) in &planted {
                if i < n {
                    row[d] = c;
                }
            }
            row
        })
        .collect();
    let freqs =
        compute_category_frequencies(&CategoryMatrix { rows }, &set).map_err(|e| e.to_string())?;
    let table = classify_eligibility(&freqs, 0.6, 0.06, &BTreeSet::new());
    let want = [
        (0.70, EligibilityClass::IgnoredTrivial),
        (0.30, EligibilityClass::Skippable),
        (0.03, EligibilityClass::Unskippable),
    ];
    for (&(d, c, _), &(freq, class)) in planted.iter().zip(&want) {
        let id = &set.def(d).id;
        let cat = set.category_name(d, c);
        let row = freqs
            .rows
            .iter()
            .find(|r| &r.posecode == id && r.category == cat)
            .ok_or("row missing")?;
        ensure(row.frequency == freq, || {
            format!("{id}/{cat}: frequency {}", row.frequency)
        })?;
        let got = table.get(id, cat);
        ensure(got == Some(class), || {
            format!("{id}/{cat} at {freq}: {got:?}")
        })?;
    }
    Ok("0.70 ignored_trivial, 0.30 skippable, 0.03 unskippable".into())
}

const DIVERSITY_MIN: f64 = 0.90;
const MIN_UNITS: usize = 5;

fn caption_diversity() -> Outcome {
    let c = captioner();
    let schedule = CaptionProfile::default_schedule();
    let records = synthetic::varied_corpus(1000, 12);
    let mut eligible = 0;
    let mut diverse = 0;
    for r in &records {
        let mut texts = BTreeSet::new();
        let mut fewest = usize::MAX;
        for i in 0..3u32 {
            let profile = &schedule[i as usize % schedule.len()];
            let (caption, _) = c
                .caption_traced(r, profile, caption_seed(7, &r.pose_id, i))
                .map_err(|e| e.to_string())?;
            fewest = fewest.min(caption.provenance.len());
            texts.insert(caption.text);
        }
        if fewest >= MIN_UNITS {
            eligible += 1;
            diverse += usize::from(texts.len() >= 2);
        }
    }
    ensure(eligible > 0, || "no pose qualifies".into())?;
    let share = diverse as f64 / eligible as f64;
    let detail = format!(
        "{diverse}/{eligible} qualifying poses ({:.1}%) have >= 2 distinct captions",
        share * 100.0
    );
    ensure(share >= DIVERSITY_MIN, || detail.clone())?;
    Ok(detail)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("threshold conformance", threshold_conformance),
        ("noise containment", noise_containment),
        ("end-to-end determinism", end_to_end_determinism),
        ("throughput", throughput),
        ("super-posecode table", super_posecode_table),
        ("ripple oracles", ripple_oracles),
        ("farthest-point sampling oracle", fps_oracle),
        ("mirror properties", mirror_properties),
        ("eligibility thresholds", eligibility_thresholds),
        ("caption diversity", caption_diversity),
    ];
    let mut failed = 0;
    let mut out = std::io::stdout().lock();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (verdict, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        writeln!(out, "criterion {:>2} {name}: {verdict} ({detail})", i + 1).unwrap();
    }
    writeln!(out, "{} passed, {failed} failed", criteria.len() - failed).unwrap();
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
