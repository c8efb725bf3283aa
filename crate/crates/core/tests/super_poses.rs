use posecode_core::selection::Fact;
use posecode_core::superposecode::evaluate_super_posecodes;
use posecode_core::{synthetic, CaptionProfile, Captioner};

fn noiseless(c: &Captioner, pose: &posecode_core::PoseKeypoints) -> Vec<(usize, usize)> {
    let p = c.extend(pose).unwrap();
    let cats = c.posecodes().noiseless_categories(&p).unwrap();
    cats.into_iter().enumerate().collect()
}

#[test]
fn every_alternative_has_an_isolated_example() {
    let c = Captioner::with_defaults().unwrap();
    let supers = c.super_posecodes();
    let examples = synthetic::super_posecode_examples();
    for (s, def) in supers.defs().iter().enumerate() {
        for a in 0..supers.alternatives(s).len() {
            assert!(
                examples
                    .iter()
                    .any(|(id, alt, _)| *id == def.id && *alt == a),
                "no example for {} alternative {a}",
                def.id
            );
        }
    }
    for (id, alt, pose) in &examples {
        let s = supers.defs().iter().position(|d| d.id == *id).unwrap();
        let facts = noiseless(&c, pose);
        for (a, reqs) in supers.alternatives(s).iter().enumerate() {
            let holds = reqs.iter().all(|r| facts.contains(r));
            assert_eq!(
                holds,
                a == *alt,
                "{id} alternative {a} on the example for {alt}"
            );
        }
    }
}

#[test]
fn examples_produce_their_fact_end_to_end() {
    let c = Captioner::with_defaults().unwrap();
    let profile = CaptionProfile::n1().deterministic();
    for (i, (id, alt, pose)) in synthetic::super_posecode_examples().into_iter().enumerate() {
        let mut rng = posecode_core::rng::stream(0);
        let extracted = c
            .posecodes()
            .extract(&c.extend(&pose).unwrap(), 0.0, &mut rng)
            .unwrap();
        let outcome = evaluate_super_posecodes(&extracted, c.super_posecodes());
        assert!(
            outcome
                .produced
                .iter()
                .any(|&s| c.super_posecodes().def(s).id == id),
            "{id} / {alt}"
        );
        let record = posecode_core::PoseRecord::new(format!("example-{i}"), pose);
        let (caption, trace) = c.caption_traced(&record, &profile, 3).unwrap();
        assert!(trace.produced_supers.iter().any(|s| s == id));
        assert!(
            caption.provenance.iter().any(|p| p.fact == id),
            "{id}: {}",
            caption.text
        );
    }
}

#[test]
fn kneeling_drops_completely_bent_knees_from_the_caption() {
    let c = Captioner::with_defaults().unwrap();
    let record = posecode_core::PoseRecord::new("kneeling", synthetic::kneeling_sitting_back());
    for profile in CaptionProfile::default_schedule() {
        for seed in 0..20 {
            let (caption, trace) = c.caption_traced(&record, &profile, seed).unwrap();
            assert!(trace.produced_supers.iter().any(|s| s == "body_kneeling"));
            assert!(trace.selected.iter().all(|f| match f {
                Fact::Posecode(p) =>
                    !c.posecodes().def(p.def).id.starts_with("angle.")
                        || !c.posecodes().def(p.def).id.ends_with("knee"),
                Fact::Super(_) => true,
            }));
            assert!(
                caption
                    .provenance
                    .iter()
                    .all(|p| p.fact != "angle.left_knee" && p.fact != "angle.right_knee"),
                "{}",
                caption.text
            );
            assert!(caption.provenance.iter().any(|p| p.fact == "body_kneeling"));
        }
    }
}

#[test]
fn failed_kneeling_keeps_the_knee_angles() {
    let c = Captioner::with_defaults().unwrap();
    // folded knees held in the air: no ground contact, no kneeling
    let pose = synthetic::standing()
        .rx("left_knee", 160.0)
        .rx("right_knee", 160.0)
        .rx("left_hip", -90.0)
        .rx("right_hip", -90.0)
        .build();
    let record = posecode_core::PoseRecord::new("crouch", pose);
    let (caption, trace) = c
        .caption_traced(&record, &CaptionProfile::n1().deterministic(), 0)
        .unwrap();
    assert!(!trace.produced_supers.iter().any(|s| s == "body_kneeling"));
    assert!(caption
        .provenance
        .iter()
        .any(|p| p.fact == "angle.left_knee" && p.category == "completely bent"));
}
