//! End-to-end caption generation for one pose.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::aggregation::{
    apply_aggregations_logged, build_units, AggregationEvent, AggregationRule,
};
use crate::catalog;
use crate::pose::{AuxiliaryDeriver, PoseKeypoints, PoseRecord, Registry};
use crate::posecode::{BinningTable, PosecodeDef, PosecodeSet};
use crate::realization::{
    append_auxiliary_sentence, assemble_caption, render_unit, CaptionProfile, TemplateBank,
};
use crate::rng::{derive_seed, stream};
use crate::selection::{
    apply_relation_ripple, apply_statistics_ripple, select_posecodes, CompiledEligibility,
    CompiledRule, EligibilityTable, Fact, StatRule,
};
use crate::superposecode::{
    evaluate_super_posecodes, RoleEntry, SuperPosecodeDef, SuperPosecodeSet,
};
use crate::{Error, Result};

/// Per-caption seed from the global seed, pose id and caption index.
pub fn caption_seed(global_seed: u64, pose_id: &str, caption_index: u32) -> u64 {
    derive_seed(global_seed, pose_id, caption_index)
}

/// Unresolved configuration tables, as loaded from files.
#[derive(Debug, Clone)]
pub struct CaptionerData {
    /// Registry of the input poses, before the auxiliary keypoints.
    pub base_registry: Arc<Registry>,
    pub posecodes: Vec<PosecodeDef>,
    pub binning: BinningTable,
    pub super_posecodes: Vec<SuperPosecodeDef>,
    pub roles: Vec<RoleEntry>,
    /// `None` derives the shipped default table for the given definitions.
    pub eligibility: Option<EligibilityTable>,
    pub rules: Vec<StatRule>,
    pub templates: TemplateBank,
}

impl CaptionerData {
    pub fn defaults() -> Self {
        CaptionerData {
            base_registry: Registry::smplh(),
            posecodes: catalog::default_posecodes(),
            binning: catalog::binning_table(),
            super_posecodes: catalog::default_super_posecodes(),
            roles: catalog::default_roles(),
            eligibility: None,
            rules: catalog::default_rules(),
            templates: catalog::default_template_bank(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProvenanceEntry {
    /// Posecode or super-posecode id.
    pub fact: String,
    pub category: String,
    /// Index of the sentence that conveys the fact, in text order.
    pub sentence: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Caption {
    pub pose_id: String,
    pub profile: String,
    pub seed: u64,
    pub text: String,
    /// Number of description units verbalized.
    pub units: usize,
    pub provenance: Vec<ProvenanceEntry>,
}

/// Intermediate results, for debugging and tests.
#[derive(Debug, Clone, Default)]
pub struct CaptionTrace {
    pub produced_supers: Vec<String>,
    pub selected: Vec<Fact>,
    pub aggregation_log: Vec<AggregationEvent>,
}

/// Resolved, validated configuration; immutable and shareable across
/// threads.
#[derive(Debug, Clone)]
pub struct Captioner {
    deriver: AuxiliaryDeriver,
    posecodes: PosecodeSet,
    supers: SuperPosecodeSet,
    eligibility_table: EligibilityTable,
    eligibility: CompiledEligibility,
    rules: Vec<StatRule>,
    compiled_rules: Vec<CompiledRule>,
    templates: TemplateBank,
}

const PHASE_ONE: [AggregationRule; 2] = [AggregationRule::Entity, AggregationRule::Symmetry];
const PHASE_TWO: [AggregationRule; 2] =
    [AggregationRule::Keypoint, AggregationRule::Interpretation];

impl Captioner {
    pub fn with_defaults() -> Result<Self> {
        Self::new(CaptionerData::defaults())
    }

    pub fn new(data: CaptionerData) -> Result<Self> {
        let deriver = AuxiliaryDeriver::new(data.base_registry)?;
        let posecodes = PosecodeSet::new(
            deriver.extended_registry().clone(),
            data.posecodes,
            data.binning,
        )?;
        let supers = SuperPosecodeSet::new(&posecodes, data.super_posecodes, data.roles)?;
        let eligibility_table = data
            .eligibility
            .unwrap_or_else(|| catalog::default_eligibility(&posecodes));
        let eligibility = eligibility_table.compile(&posecodes, &supers)?;
        let compiled_rules = data
            .rules
            .iter()
            .map(|r| CompiledRule::compile(r, &posecodes))
            .collect::<Result<Vec<_>>>()?;
        data.templates.validate()?;
        for d in 0..posecodes.len() {
            for c in 0..posecodes.category_count(d) {
                let kind = posecodes.kind(d).name();
                let cat = posecodes.category_name(d, c);
                if eligibility.posecode(d, c).is_eligible() && !data.templates.has(kind, cat) {
                    return Err(Error::MissingTemplate {
                        kind: kind.into(),
                        category: cat.into(),
                    });
                }
            }
        }
        for s in supers.defs() {
            if !data.templates.has("super", &s.id) {
                return Err(Error::MissingTemplate {
                    kind: "super".into(),
                    category: s.id.clone(),
                });
            }
        }
        Ok(Captioner {
            deriver,
            posecodes,
            supers,
            eligibility_table,
            eligibility,
            rules: data.rules,
            compiled_rules,
            templates: data.templates,
        })
    }

    pub fn posecodes(&self) -> &PosecodeSet {
        &self.posecodes
    }

    pub fn super_posecodes(&self) -> &SuperPosecodeSet {
        &self.supers
    }

    pub fn eligibility_table(&self) -> &EligibilityTable {
        &self.eligibility_table
    }

    pub fn eligibility(&self) -> &CompiledEligibility {
        &self.eligibility
    }

    pub fn rules(&self) -> &[StatRule] {
        &self.rules
    }

    pub fn templates(&self) -> &TemplateBank {
        &self.templates
    }

    pub fn deriver(&self) -> &AuxiliaryDeriver {
        &self.deriver
    }

    /// Pose with the auxiliary keypoints, deriving them if needed.
    pub fn extend(&self, pose: &PoseKeypoints) -> Result<PoseKeypoints> {
        if **pose.registry() == **self.deriver.extended_registry() {
            Ok(pose.clone())
        } else {
            self.deriver.derive(pose)
        }
    }

    pub fn caption(
        &self,
        record: &PoseRecord,
        profile: &CaptionProfile,
        seed: u64,
    ) -> Result<Caption> {
        self.caption_traced(record, profile, seed).map(|(c, _)| c)
    }

    /// Caption number `index` of a pose under a profile schedule.
    pub fn caption_indexed(
        &self,
        record: &PoseRecord,
        schedule: &[CaptionProfile],
        global_seed: u64,
        index: u32,
    ) -> Result<Caption> {
        if schedule.is_empty() {
            return Err(Error::InvalidParameter("empty profile schedule".into()));
        }
        let profile = &schedule[index as usize % schedule.len()];
        self.caption(
            record,
            profile,
            caption_seed(global_seed, &record.pose_id, index),
        )
    }

    pub fn caption_traced(
        &self,
        record: &PoseRecord,
        profile: &CaptionProfile,
        seed: u64,
    ) -> Result<(Caption, CaptionTrace)> {
        let id = record.pose_id.as_str();
        let mut rng = stream(seed);
        let mut trace = CaptionTrace::default();

        let pose = self
            .extend(&record.keypoints)
            .map_err(|e| e.at_stage("derive", id))?;
        let extracted = self
            .posecodes
            .extract(&pose, profile.noise_scale, &mut rng)
            .map_err(|e| e.at_stage("extract", id))?;

        let outcome = evaluate_super_posecodes(&extracted, &self.supers);
        trace.produced_supers = outcome
            .produced
            .iter()
            .map(|&s| self.supers.def(s).id.clone())
            .collect();
        let retained = if profile.ripple_effect {
            apply_relation_ripple(&outcome.retained, &self.posecodes)
        } else {
            outcome.retained
        };

        let facts: Vec<Fact> = retained
            .into_iter()
            .map(Fact::Posecode)
            .chain(outcome.produced.into_iter().map(Fact::Super))
            .collect();
        let selected = select_posecodes(
            &facts,
            &self.eligibility,
            profile.effective_skip_prob(),
            &mut rng,
        );

        let mut units = build_units(&selected, &self.posecodes, &self.supers);
        if profile.implicitness {
            units = apply_aggregations_logged(
                units,
                &PHASE_ONE,
                profile.aggregation_prob,
                &mut rng,
                &mut trace.aggregation_log,
            );
        }
        if profile.ripple_effect {
            apply_statistics_ripple(&mut units, &selected, &self.compiled_rules);
        }
        if profile.implicitness {
            units = apply_aggregations_logged(
                units,
                &PHASE_TWO,
                profile.aggregation_prob,
                &mut rng,
                &mut trace.aggregation_log,
            );
        }
        units.sort_by_key(|u| u.position);

        let sentences = units
            .iter()
            .map(|u| render_unit(u, &self.templates, profile, &mut rng))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.at_stage("realize", id))?;
        let (text, positions) = if sentences.is_empty() {
            (String::new(), Vec::new())
        } else {
            assemble_caption(
                &sentences,
                &self.templates,
                profile.fixed_realization,
                &mut rng,
            )
            .map_err(|e| e.at_stage("realize", id))?
        };
        let text = append_auxiliary_sentence(&text, record, profile, &self.templates, &mut rng);

        let mut provenance = Vec::new();
        for (u, &sentence) in units.iter().zip(&positions) {
            for &f in &u.provenance {
                let (fact, category) = match selected[f] {
                    Fact::Posecode(p) => (
                        self.posecodes.def(p.def).id.clone(),
                        self.posecodes.category_name(p.def, p.category).to_string(),
                    ),
                    Fact::Super(s) => (
                        self.supers.def(s).id.clone(),
                        self.supers.def(s).category.clone(),
                    ),
                };
                provenance.push(ProvenanceEntry {
                    fact,
                    category,
                    sentence,
                });
            }
        }
        provenance.sort_by(|a, b| (a.sentence, &a.fact).cmp(&(b.sentence, &b.fact)));
        trace.selected = selected;

        Ok((
            Caption {
                pose_id: record.pose_id.clone(),
                profile: profile.name.clone(),
                seed,
                text,
                units: units.len(),
                provenance,
            },
            trace,
        ))
    }
}

pub fn generate_caption(
    record: &PoseRecord,
    captioner: &Captioner,
    profile: &CaptionProfile,
    seed: u64,
) -> Result<Caption> {
    captioner.caption(record, profile, seed)
}
