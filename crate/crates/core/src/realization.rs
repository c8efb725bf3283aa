//! Template-based verbalization of description units, caption assembly and
//! text utilities.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use crate::aggregation::{DescriptionUnit, Part, PartSide, Predicate};
use crate::pose::{AuxLabel, LabelSource, PoseRecord};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Plurality {
    Singular,
    Plural,
    /// Matches both; used when no specific entry exists.
    Any,
}

impl Plurality {
    pub fn name(self) -> &'static str {
        match self {
            Plurality::Singular => "singular",
            Plurality::Plural => "plural",
            Plurality::Any => "any",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Plurality::Singular, Plurality::Plural, Plurality::Any]
            .into_iter()
            .find(|p| p.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Form {
    /// The object is named.
    Explicit,
    /// The support keypoint is left out.
    Implicit,
}

impl Form {
    pub fn name(self) -> &'static str {
        match self {
            Form::Explicit => "explicit",
            Form::Implicit => "implicit",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Form::Explicit, Form::Implicit]
            .into_iter()
            .find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemplateKey {
    pub kind: String,
    pub category: String,
    pub plurality: Plurality,
    pub form: Form,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TransitionKind {
    /// Ends the previous sentence; the connective opens the next one.
    Sentence,
    /// Joins both sentences into one with a comma.
    Clause,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub kind: TransitionKind,
    /// May be empty for a plain sentence break.
    pub connective: String,
}

/// Predicate phrases plus the surrounding phrase lists.
///
/// Predicate templates use `{be}` for the conjugated verb and `{obj}` for
/// the object reference; intros wrap the first sentence as `{s}`; label
/// sentences use `{label}`; side references use `{side}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TemplateBank {
    predicates: BTreeMap<TemplateKey, Vec<String>>,
    pub intros: Vec<String>,
    pub transitions: Vec<Transition>,
    pub labels: Vec<String>,
    pub pronoun_singular: Vec<String>,
    pub pronoun_plural: Vec<String>,
    pub others: Vec<String>,
    pub side_refs: Vec<String>,
}

fn slots(template: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        let end = rest[start..]
            .find('}')
            .ok_or_else(|| Error::InvalidTemplate(format!("unclosed slot in `{template}`")))?;
        out.push(&rest[start + 1..start + end]);
        rest = &rest[start + end + 1..];
    }
    if rest.contains('}') {
        return Err(Error::InvalidTemplate(format!(
            "stray `}}` in `{template}`"
        )));
    }
    Ok(out)
}

fn check_slots(template: &str, allowed: &[&str], required: &[&str]) -> Result<()> {
    let found = slots(template)?;
    if let Some(bad) = found.iter().find(|s| !allowed.contains(s)) {
        return Err(Error::InvalidTemplate(format!(
            "unknown slot `{{{bad}}}` in `{template}`"
        )));
    }
    if let Some(missing) = required.iter().find(|r| !found.contains(r)) {
        return Err(Error::InvalidTemplate(format!(
            "`{template}` lacks `{{{missing}}}`"
        )));
    }
    Ok(())
}

impl TemplateBank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_predicate(&mut self, key: TemplateKey, template: impl Into<String>) -> Result<()> {
        let template = template.into();
        check_slots(&template, &["be", "obj"], &[])?;
        self.predicates.entry(key).or_default().push(template);
        Ok(())
    }

    pub fn predicate_keys(&self) -> impl Iterator<Item = &TemplateKey> {
        self.predicates.keys()
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&TemplateKey, &[String])> {
        self.predicates.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// Templates for a key, falling back to `Plurality::Any`.
    pub fn lookup(
        &self,
        kind: &str,
        category: &str,
        plurality: Plurality,
        form: Form,
    ) -> Option<&[String]> {
        let key = |plurality| TemplateKey {
            kind: kind.into(),
            category: category.into(),
            plurality,
            form,
        };
        self.predicates
            .get(&key(plurality))
            .or_else(|| self.predicates.get(&key(Plurality::Any)))
            .map(Vec::as_slice)
            .filter(|v| !v.is_empty())
    }

    pub fn has(&self, kind: &str, category: &str) -> bool {
        [Plurality::Singular, Plurality::Plural]
            .iter()
            .all(|&p| self.lookup(kind, category, p, Form::Explicit).is_some())
    }

    /// Parses the line-oriented bank format: `|`-separated fields, `#`
    /// comments, `@`-prefixed lines for the phrase lists.
    pub fn parse(text: &str) -> Result<Self> {
        let mut bank = TemplateBank::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('|').map(str::trim).collect();
            let bad =
                |what: &str| Error::InvalidTemplate(format!("line {}: {what}: `{line}`", n + 1));
            match fields.as_slice() {
                ["@intro", t] => {
                    check_slots(t, &["s"], &["s"]).map_err(|_| bad("intro needs {s}"))?;
                    bank.intros.push(t.to_string());
                }
                ["@transition", kind, connective] => {
                    let kind = match *kind {
                        "sentence" => TransitionKind::Sentence,
                        "clause" => TransitionKind::Clause,
                        _ => return Err(bad("transition kind must be sentence or clause")),
                    };
                    bank.transitions.push(Transition {
                        kind,
                        connective: connective.to_string(),
                    });
                }
                ["@label", t] => {
                    check_slots(t, &["label"], &["label"])
                        .map_err(|_| bad("label sentence needs {label}"))?;
                    bank.labels.push(t.to_string());
                }
                ["@pronoun", "singular", t] => bank.pronoun_singular.push(t.to_string()),
                ["@pronoun", "plural", t] => bank.pronoun_plural.push(t.to_string()),
                ["@other", t] => bank.others.push(t.to_string()),
                ["@side_ref", t] => {
                    check_slots(t, &["side"], &["side"])
                        .map_err(|_| bad("side reference needs {side}"))?;
                    bank.side_refs.push(t.to_string());
                }
                [kind, category, plurality, form, template] if !kind.starts_with('@') => {
                    let plurality =
                        Plurality::parse(plurality).ok_or_else(|| bad("unknown plurality"))?;
                    let form = Form::parse(form).ok_or_else(|| bad("unknown form"))?;
                    let key = TemplateKey {
                        kind: kind.to_string(),
                        category: category.to_string(),
                        plurality,
                        form,
                    };
                    bank.add_predicate(key, *template)
                        .map_err(|e| e.context(format!("line {}", n + 1)))?;
                }
                _ => return Err(bad("unrecognized line")),
            }
        }
        bank.validate()?;
        Ok(bank)
    }

    /// Every phrase list must be non-empty.
    pub fn validate(&self) -> Result<()> {
        let lists: [(&str, usize); 7] = [
            ("@intro", self.intros.len()),
            ("@transition", self.transitions.len()),
            ("@label", self.labels.len()),
            ("@pronoun singular", self.pronoun_singular.len()),
            ("@pronoun plural", self.pronoun_plural.len()),
            ("@other", self.others.len()),
            ("@side_ref", self.side_refs.len()),
        ];
        match lists.iter().find(|(_, n)| *n == 0) {
            Some((name, _)) => Err(Error::InvalidTemplate(format!("no `{name}` entries"))),
            None => Ok(()),
        }
    }

    /// Inverse of [`TemplateBank::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, list) in &self.predicates {
            for t in list {
                out.push_str(&format!(
                    "{} | {} | {} | {} | {}\n",
                    k.kind,
                    k.category,
                    k.plurality.name(),
                    k.form.name(),
                    t
                ));
            }
        }
        for t in &self.intros {
            out.push_str(&format!("@intro | {t}\n"));
        }
        for t in &self.transitions {
            let kind = match t.kind {
                TransitionKind::Sentence => "sentence",
                TransitionKind::Clause => "clause",
            };
            out.push_str(&format!("@transition | {kind} | {}\n", t.connective));
        }
        for t in &self.labels {
            out.push_str(&format!("@label | {t}\n"));
        }
        for t in &self.pronoun_singular {
            out.push_str(&format!("@pronoun | singular | {t}\n"));
        }
        for t in &self.pronoun_plural {
            out.push_str(&format!("@pronoun | plural | {t}\n"));
        }
        for t in &self.others {
            out.push_str(&format!("@other | {t}\n"));
        }
        for t in &self.side_refs {
            out.push_str(&format!("@side_ref | {t}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuxLabelMode {
    Off,
    Babel,
    /// Babel labels plus the generic label of dance-dataset poses.
    BabelDancing,
}

impl AuxLabelMode {
    pub fn admits(self, label: &AuxLabel) -> bool {
        match (self, label.source) {
            (AuxLabelMode::Off, _) => false,
            (_, LabelSource::Babel) => true,
            (AuxLabelMode::BabelDancing, LabelSource::Dancing) => true,
            (AuxLabelMode::Babel, LabelSource::Dancing) => false,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AuxLabelMode::Off => "off",
            AuxLabelMode::Babel => "babel",
            AuxLabelMode::BabelDancing => "babel+dancing",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            AuxLabelMode::Off,
            AuxLabelMode::Babel,
            AuxLabelMode::BabelDancing,
        ]
        .into_iter()
        .find(|m| m.name() == s)
    }
}

/// Feature toggles and knobs of one caption version.
#[derive(Debug, Clone, PartialEq)]
pub struct CaptionProfile {
    pub name: String,
    pub random_skip: bool,
    /// Aggregation, support-keypoint omission and substitute words.
    pub implicitness: bool,
    pub aux_labels: AuxLabelMode,
    /// Relation-based and statistics-based redundancy removal.
    pub ripple_effect: bool,
    pub skip_prob: f64,
    pub aggregation_prob: f64,
    pub noise_scale: f64,
    /// First template, first intro and transition, unit order kept,
    /// left-side subjects: the caption becomes a function of the facts.
    pub fixed_realization: bool,
}

pub const PROFILE_NAMES: [&str; 9] = ["N1", "N2", "N3", "N4", "N4d", "N5", "A1", "A2", "A3"];

impl CaptionProfile {
    fn base(name: &str) -> Self {
        CaptionProfile {
            name: name.into(),
            random_skip: false,
            implicitness: false,
            aux_labels: AuxLabelMode::Off,
            ripple_effect: false,
            skip_prob: 0.15,
            aggregation_prob: 0.95,
            noise_scale: 1.0,
            fixed_realization: false,
        }
    }

    pub fn n1() -> Self {
        Self::base("N1")
    }

    pub fn n2() -> Self {
        CaptionProfile {
            random_skip: true,
            ..Self::base("N2")
        }
    }

    pub fn n3() -> Self {
        CaptionProfile {
            implicitness: true,
            ..Self::base("N3")
        }
    }

    pub fn n4() -> Self {
        CaptionProfile {
            aux_labels: AuxLabelMode::Babel,
            ..Self::base("N4")
        }
    }

    pub fn n4d() -> Self {
        CaptionProfile {
            aux_labels: AuxLabelMode::BabelDancing,
            ..Self::base("N4d")
        }
    }

    pub fn n5() -> Self {
        CaptionProfile {
            ripple_effect: true,
            ..Self::base("N5")
        }
    }

    pub fn a1() -> Self {
        CaptionProfile {
            random_skip: true,
            ..Self::base("A1")
        }
    }

    pub fn a2() -> Self {
        CaptionProfile {
            random_skip: true,
            implicitness: true,
            aux_labels: AuxLabelMode::BabelDancing,
            ..Self::base("A2")
        }
    }

    pub fn a3() -> Self {
        CaptionProfile {
            random_skip: true,
            implicitness: true,
            ripple_effect: true,
            ..Self::base("A3")
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        Some(match name {
            "N1" => Self::n1(),
            "N2" => Self::n2(),
            "N3" => Self::n3(),
            "N4" => Self::n4(),
            "N4d" => Self::n4d(),
            "N5" => Self::n5(),
            "A1" => Self::a1(),
            "A2" => Self::a2(),
            "A3" => Self::a3(),
            _ => return None,
        })
    }

    /// The three-version mix used for three captions per pose.
    pub fn default_schedule() -> Vec<Self> {
        alloc::vec![Self::a1(), Self::a2(), Self::a3()]
    }

    pub fn effective_skip_prob(&self) -> f64 {
        if self.random_skip {
            self.skip_prob
        } else {
            0.0
        }
    }

    /// Locks every random realization choice and disables jitter, skipping
    /// and probabilistic aggregation.
    pub fn deterministic(mut self) -> Self {
        self.noise_scale = 0.0;
        self.skip_prob = 0.0;
        self.aggregation_prob = 1.0;
        self.fixed_realization = true;
        self
    }
}

/// How the object of a predicate is referred to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectRef {
    None,
    Named(Part),
    /// "the right one"
    BySide(PartSide),
    /// "the other"
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubjectAssignment {
    pub subjects: Vec<Part>,
    /// Predicates as verbalized, with the category possibly inverted.
    pub predicates: Vec<(Predicate, ObjectRef)>,
}

fn is_symmetric(unit: &DescriptionUnit) -> bool {
    match unit.subjects.as_slice() {
        [s] => {
            matches!(s.side, PartSide::Left | PartSide::Right)
                && unit
                    .predicates
                    .iter()
                    .all(|p| p.object.as_ref().is_some_and(|o| o.is_mirror_of(s)))
        }
        _ => false,
    }
}

/// Picks the subject of a unit. When subject and object are the two sides
/// of the same part, the side is drawn uniformly (swapping subject and
/// object and reversing the relation if needed) and, with `substitutes`,
/// the object is referred to by name, by side or as "the other".
pub fn choose_subject<R: RngCore + ?Sized>(
    unit: &DescriptionUnit,
    substitutes: bool,
    fixed: bool,
    rng: &mut R,
) -> SubjectAssignment {
    let named = |p: &Predicate| match &p.object {
        Some(o) => ObjectRef::Named(o.clone()),
        None => ObjectRef::None,
    };
    if !is_symmetric(unit) {
        return SubjectAssignment {
            subjects: unit.subjects.clone(),
            predicates: unit
                .predicates
                .iter()
                .map(|p| (p.clone(), named(p)))
                .collect(),
        };
    }
    let subject = &unit.subjects[0];
    let want_right = if fixed { false } else { rng.gen::<bool>() };
    let swap = (subject.side == PartSide::Right) != want_right;
    let chosen = if swap {
        subject.mirrored()
    } else {
        subject.clone()
    };
    let predicates = unit
        .predicates
        .iter()
        .map(|p| {
            let mut p = p.clone();
            if swap {
                if let Some(inv) = p.inverse.clone() {
                    p.inverse = Some(core::mem::replace(&mut p.category, inv));
                }
                p.object = Some(subject.clone());
            }
            let object = p.object.clone().expect("symmetric predicates have objects");
            let r = if substitutes && !fixed {
                match rng.gen_range(0..3) {
                    0 => ObjectRef::Named(object),
                    1 => ObjectRef::BySide(object.side),
                    _ => ObjectRef::Other,
                }
            } else {
                ObjectRef::Named(object)
            };
            (p, r)
        })
        .collect();
    SubjectAssignment {
        subjects: alloc::vec![chosen],
        predicates,
    }
}

fn pick<'a, R: RngCore + ?Sized>(list: &'a [String], fixed: bool, rng: &mut R) -> &'a str {
    if fixed {
        &list[0]
    } else {
        &list[rng.gen_range(0..list.len())]
    }
}

/// "a", "a and b", "a, b and c".
pub fn join_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {}", init.join(", "), last),
    }
}

fn render_predicate<R: RngCore + ?Sized>(
    predicate: &Predicate,
    object: &ObjectRef,
    plural: bool,
    bank: &TemplateBank,
    profile: &CaptionProfile,
    rng: &mut R,
) -> Result<String> {
    let plurality = if plural {
        Plurality::Plural
    } else {
        Plurality::Singular
    };
    let fixed = profile.fixed_realization;
    let implicit = profile.implicitness && predicate.implicit;
    let list = implicit
        .then(|| {
            bank.lookup(
                &predicate.kind,
                &predicate.category,
                plurality,
                Form::Implicit,
            )
        })
        .flatten()
        .or_else(|| {
            bank.lookup(
                &predicate.kind,
                &predicate.category,
                plurality,
                Form::Explicit,
            )
        })
        .ok_or_else(|| Error::MissingTemplate {
            kind: predicate.kind.clone(),
            category: predicate.category.clone(),
        })?;
    let template = pick(list, fixed, rng);
    let obj = match object {
        ObjectRef::None => String::new(),
        ObjectRef::Named(p) => p.phrase(),
        ObjectRef::BySide(side) => {
            pick(&bank.side_refs, fixed, rng).replace("{side}", side.word().unwrap_or(""))
        }
        ObjectRef::Other => pick(&bank.others, fixed, rng).to_string(),
    };
    if template.contains("{obj}") && obj.is_empty() {
        return Err(Error::InvalidTemplate(format!(
            "`{template}` needs an object but `{}` = `{}` has none",
            predicate.kind, predicate.category
        )));
    }
    Ok(template
        .replace("{be}", if plural { "are" } else { "is" })
        .replace("{obj}", &obj))
}

/// Verbalizes one unit; multi-predicate units become
/// "subject P1 and P2. It P3".
pub fn render_unit<R: RngCore + ?Sized>(
    unit: &DescriptionUnit,
    bank: &TemplateBank,
    profile: &CaptionProfile,
    rng: &mut R,
) -> Result<String> {
    let assignment = choose_subject(unit, profile.implicitness, profile.fixed_realization, rng);
    let plural = assignment.subjects.len() > 1 || assignment.subjects.iter().any(Part::is_plural);
    let subject = join_list(
        &assignment
            .subjects
            .iter()
            .map(Part::phrase)
            .collect::<Vec<_>>(),
    );
    let mut phrases = Vec::with_capacity(assignment.predicates.len());
    for (p, o) in &assignment.predicates {
        phrases.push(render_predicate(p, o, plural, bank, profile, rng)?);
    }
    let mut out = String::new();
    for (i, chunk) in phrases.chunks(2).enumerate() {
        let head = if i == 0 {
            subject.clone()
        } else {
            out.push_str(". ");
            let head = if profile.implicitness {
                let pronouns = if plural {
                    &bank.pronoun_plural
                } else {
                    &bank.pronoun_singular
                };
                pick(pronouns, profile.fixed_realization, rng).to_string()
            } else {
                subject.clone()
            };
            capitalize(&head)
        };
        out.push_str(&head);
        out.push(' ');
        out.push_str(&chunk.join(" and "));
    }
    Ok(out)
}

pub fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn strip_period(s: &str) -> &str {
    s.trim_end().trim_end_matches('.')
}

/// Joins sentences in random order with random transitions and an intro.
/// Returns the text and, for each input sentence, its position in the text.
pub fn assemble_caption<R: RngCore + ?Sized>(
    sentences: &[String],
    bank: &TemplateBank,
    fixed: bool,
    rng: &mut R,
) -> Result<(String, Vec<usize>)> {
    if sentences.is_empty() {
        return Err(Error::EmptyCaption);
    }
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    if !fixed {
        order.shuffle(rng);
    }
    let intro = if bank.intros.is_empty() {
        "{s}"
    } else {
        pick(&bank.intros, fixed, rng)
    };
    let mut text = intro.replace("{s}", strip_period(&sentences[order[0]]));
    for &i in &order[1..] {
        let next = strip_period(&sentences[i]);
        let t = if bank.transitions.is_empty() {
            &Transition {
                kind: TransitionKind::Sentence,
                connective: String::new(),
            }
        } else if fixed {
            &bank.transitions[0]
        } else {
            &bank.transitions[rng.gen_range(0..bank.transitions.len())]
        };
        match (t.kind, t.connective.is_empty()) {
            (TransitionKind::Sentence, true) => {
                text.push_str(". ");
                text.push_str(&capitalize(next));
            }
            (TransitionKind::Sentence, false) => {
                text.push_str(". ");
                text.push_str(&capitalize(&t.connective));
                text.push(' ');
                text.push_str(next);
            }
            (TransitionKind::Clause, _) => {
                text.push_str(", ");
                text.push_str(&t.connective);
                text.push(' ');
                text.push_str(next);
            }
        }
    }
    let mut text = capitalize(strip_period(&text));
    text.push('.');
    let mut position = alloc::vec![0; sentences.len()];
    for (pos, &i) in order.iter().enumerate() {
        position[i] = pos;
    }
    Ok((text, position))
}

/// Appends one label sentence when the record has labels the profile
/// admits; otherwise returns `text` unchanged. Draws only when a label is
/// used.
pub fn append_auxiliary_sentence<R: RngCore + ?Sized>(
    text: &str,
    record: &PoseRecord,
    profile: &CaptionProfile,
    bank: &TemplateBank,
    rng: &mut R,
) -> String {
    let admitted: Vec<&AuxLabel> = record
        .aux_labels
        .iter()
        .filter(|l| profile.aux_labels.admits(l))
        .collect();
    if admitted.is_empty() || bank.labels.is_empty() {
        return text.to_string();
    }
    let fixed = profile.fixed_realization;
    let label = if fixed {
        admitted[0]
    } else {
        admitted[rng.gen_range(0..admitted.len())]
    };
    let sentence = capitalize(&pick(&bank.labels, fixed, rng).replace("{label}", &label.text));
    if text.is_empty() {
        sentence
    } else {
        format!("{text} {sentence}")
    }
}

fn swap_side_word(word: &str) -> Option<&'static str> {
    Some(match word {
        "left" => "right",
        "right" => "left",
        "Left" => "Right",
        "Right" => "Left",
        "LEFT" => "RIGHT",
        "RIGHT" => "LEFT",
        _ => return None,
    })
}

/// Swaps the words left and right (lower, capitalized or upper case) on
/// whole-word boundaries. An involution.
pub fn mirror_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut word_start: Option<usize> = None;
    let flush = |out: &mut String, word: &str| match swap_side_word(word) {
        Some(s) => out.push_str(s),
        None => out.push_str(word),
    };
    for (i, c) in text.char_indices() {
        if c.is_alphabetic() {
            word_start.get_or_insert(i);
        } else {
            if let Some(s) = word_start.take() {
                flush(&mut out, &text[s..i]);
            }
            out.push(c);
        }
    }
    if let Some(s) = word_start {
        flush(&mut out, &text[s..]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rng::CaptionRng;
    use rand::SeedableRng;
    use std::collections::BTreeSet;

    fn unit(
        subject: &str,
        kind: &str,
        category: &str,
        object: Option<&str>,
        inverse: Option<&str>,
    ) -> DescriptionUnit {
        DescriptionUnit {
            id: 0,
            subjects: alloc::vec![Part::from_name(subject)],
            predicates: alloc::vec![Predicate {
                kind: kind.into(),
                category: category.into(),
                object: object.map(Part::from_name),
                inverse: inverse.map(Into::into),
                implicit: object == Some("torso"),
            }],
            provenance: alloc::vec![0],
            position: 0,
        }
    }

    #[test]
    fn mirror_text_examples() {
        assert_eq!(
            mirror_text("the left hand is above the right knee"),
            "the right hand is above the left knee"
        );
        assert_eq!(
            mirror_text("Left, RIGHT; leftover bright"),
            "Right, LEFT; leftover bright"
        );
        assert_eq!(mirror_text("no sides here"), "no sides here");
        let t = "The left foot is behind the right one. Right.";
        assert_eq!(mirror_text(&mirror_text(t)), t);
    }

    #[test]
    fn symmetric_subject_is_balanced() {
        let u = unit("left_hand", "distance", "close", Some("right_hand"), None);
        let mut rng = CaptionRng::seed_from_u64(11);
        let mut left = 0;
        for _ in 0..10_000 {
            let a = choose_subject(&u, false, false, &mut rng);
            if a.subjects[0].side == PartSide::Left {
                left += 1;
            }
        }
        assert!((4700..=5300).contains(&left), "{left}");
    }

    #[test]
    fn swapped_subject_reverses_the_relation() {
        let u = unit(
            "left_hand",
            "relpos_y",
            "above",
            Some("right_hand"),
            Some("below"),
        );
        let mut rng = CaptionRng::seed_from_u64(0);
        for _ in 0..50 {
            let a = choose_subject(&u, true, false, &mut rng);
            let (p, _) = &a.predicates[0];
            if a.subjects[0].side == PartSide::Right {
                assert_eq!(p.category, "below");
                assert_eq!(p.object, Some(Part::from_name("left_hand")));
            } else {
                assert_eq!(p.category, "above");
            }
        }
    }

    #[test]
    fn asymmetric_subject_is_kept() {
        let u = unit(
            "left_hand",
            "relpos_y",
            "above",
            Some("neck"),
            Some("below"),
        );
        let mut rng = CaptionRng::seed_from_u64(0);
        for _ in 0..50 {
            assert_eq!(
                choose_subject(&u, true, false, &mut rng).subjects[0],
                Part::from_name("left_hand")
            );
        }
    }

    #[test]
    fn implicitness_drops_the_torso() {
        let bank = catalog::default_template_bank();
        let u = unit(
            "right_foot",
            "relpos_z",
            "behind",
            Some("torso"),
            Some("in front of"),
        );
        let mut rng = CaptionRng::seed_from_u64(4);
        for _ in 0..30 {
            let on = render_unit(&u, &bank, &CaptionProfile::n3(), &mut rng).unwrap();
            assert!(!on.contains("torso"), "{on}");
            let off = render_unit(&u, &bank, &CaptionProfile::n1(), &mut rng).unwrap();
            assert!(off.contains("the torso"), "{off}");
        }
    }

    #[test]
    fn unknown_category_is_a_configuration_error() {
        let bank = catalog::default_template_bank();
        let u = unit("left_knee", "angle", "wobbly", None, None);
        let err = render_unit(
            &u,
            &bank,
            &CaptionProfile::n1(),
            &mut CaptionRng::seed_from_u64(0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingTemplate { ref category, .. } if category == "wobbly"));
    }

    #[test]
    fn assembly_covers_all_orders() {
        let bank = catalog::default_template_bank();
        let s: Vec<String> = ["alpha is one", "beta is two", "gamma is three"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut rng = CaptionRng::seed_from_u64(8);
        let mut seen = BTreeSet::new();
        for _ in 0..10_000 {
            let (_, pos) = assemble_caption(&s, &bank, false, &mut rng).unwrap();
            seen.insert(pos);
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(
            assemble_caption(&[], &bank, false, &mut rng),
            Err(Error::EmptyCaption)
        );
    }

    #[test]
    fn single_sentence_gets_an_intro() {
        let bank = catalog::default_template_bank();
        let (t, _) = assemble_caption(
            &["the left knee is bent".into()],
            &bank,
            true,
            &mut CaptionRng::seed_from_u64(0),
        )
        .unwrap();
        assert!(t.contains("the left knee is bent") && t.ends_with('.'));
        assert!(t.chars().next().unwrap().is_uppercase());
    }

    #[test]
    fn bank_text_round_trips() {
        let bank = catalog::default_template_bank();
        assert_eq!(TemplateBank::parse(&bank.to_text()).unwrap(), bank);
        assert!(TemplateBank::parse("angle | straight | any | explicit | {be} {nope}").is_err());
    }

    #[test]
    fn label_sentences_follow_the_profile() {
        let bank = catalog::default_template_bank();
        let mut record = crate::synthetic::t_pose_record("p");
        let mut rng = CaptionRng::seed_from_u64(0);
        assert_eq!(
            append_auxiliary_sentence("X.", &record, &CaptionProfile::n4(), &bank, &mut rng),
            "X."
        );
        record.aux_labels.push(AuxLabel::babel("yoga"));
        assert!(
            append_auxiliary_sentence("X.", &record, &CaptionProfile::n4(), &bank, &mut rng)
                .contains("yoga")
        );
        let mut dance = crate::synthetic::t_pose_record("d");
        dance.aux_labels.push(AuxLabel::dancing());
        assert_eq!(
            append_auxiliary_sentence("X.", &dance, &CaptionProfile::n4(), &bank, &mut rng),
            "X."
        );
        assert!(
            append_auxiliary_sentence("X.", &dance, &CaptionProfile::n4d(), &bank, &mut rng)
                .contains("danc")
        );
    }
}
