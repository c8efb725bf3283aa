//! Posecode eligibility, statistics-based redundancy rules and per-caption
//! selection.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::aggregation::DescriptionUnit;
use crate::pose::PoseKeypoints;
use crate::posecode::{ExtractedPosecode, PosecodeSet};
use crate::superposecode::SuperPosecodeSet;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EligibilityClass {
    /// Rare, discriminative: never skipped.
    Unskippable,
    Skippable,
    /// Holds for most poses; never verbalized.
    IgnoredTrivial,
    /// Inherently ambiguous configuration; never verbalized.
    IgnoredAmbiguous,
}

impl EligibilityClass {
    pub fn name(self) -> &'static str {
        match self {
            EligibilityClass::Unskippable => "unskippable",
            EligibilityClass::Skippable => "skippable",
            EligibilityClass::IgnoredTrivial => "ignored_trivial",
            EligibilityClass::IgnoredAmbiguous => "ignored_ambiguous",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            EligibilityClass::Unskippable,
            EligibilityClass::Skippable,
            EligibilityClass::IgnoredTrivial,
            EligibilityClass::IgnoredAmbiguous,
        ]
        .into_iter()
        .find(|c| c.name() == s)
    }

    pub fn is_eligible(self) -> bool {
        matches!(
            self,
            EligibilityClass::Unskippable | EligibilityClass::Skippable
        )
    }
}

/// `(posecode id, category) -> class`, kept sorted for stable output.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EligibilityTable {
    entries: BTreeMap<(String, String), EligibilityClass>,
}

impl EligibilityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        posecode: impl Into<String>,
        category: impl Into<String>,
        class: EligibilityClass,
    ) {
        self.entries
            .insert((posecode.into(), category.into()), class);
    }

    pub fn get(&self, posecode: &str, category: &str) -> Option<EligibilityClass> {
        // BTreeMap<(String, String)> cannot be queried with borrowed tuples
        self.entries
            .iter()
            .find(|((p, c), _)| p == posecode && c == category)
            .map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, EligibilityClass)> {
        self.entries
            .iter()
            .map(|((p, c), v)| (p.as_str(), c.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Index-based lookup table; every category of every posecode must be
    /// covered.
    pub fn compile(
        &self,
        set: &PosecodeSet,
        supers: &SuperPosecodeSet,
    ) -> Result<CompiledEligibility> {
        let mut lookup: BTreeMap<&str, BTreeMap<&str, EligibilityClass>> = BTreeMap::new();
        for ((p, c), v) in &self.entries {
            lookup.entry(p.as_str()).or_default().insert(c.as_str(), *v);
        }
        let mut per_def = Vec::with_capacity(set.len());
        for d in 0..set.len() {
            let id = set.def(d).id.as_str();
            let cats = &set.spec(d).categories;
            let mut row = Vec::with_capacity(cats.len());
            for c in cats {
                let class = lookup
                    .get(id)
                    .and_then(|m| m.get(c.as_str()))
                    .ok_or_else(|| {
                        Error::InvalidDefinition(format!(
                            "eligibility table has no entry for `{id}` = `{c}`"
                        ))
                    })?;
                row.push(*class);
            }
            per_def.push(row);
        }
        Ok(CompiledEligibility {
            per_def,
            supers: supers.defs().iter().map(|d| d.eligibility).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledEligibility {
    per_def: Vec<Vec<EligibilityClass>>,
    supers: Vec<EligibilityClass>,
}

impl CompiledEligibility {
    pub fn posecode(&self, def: usize, category: usize) -> EligibilityClass {
        self.per_def[def][category]
    }

    pub fn class_of(&self, fact: &Fact) -> EligibilityClass {
        match fact {
            Fact::Posecode(p) => self.posecode(p.def, p.category),
            Fact::Super(s) => self.supers[*s],
        }
    }
}

/// A fact about one pose, elementary or super.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fact {
    Posecode(ExtractedPosecode),
    Super(usize),
}

/// Noiseless category of every posecode for every pose of a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryMatrix {
    pub rows: Vec<Vec<usize>>,
}

impl CategoryMatrix {
    /// `poses` must already carry the auxiliary keypoints.
    pub fn from_poses(poses: &[PoseKeypoints], set: &PosecodeSet) -> Result<Self> {
        if poses.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let rows = poses
            .iter()
            .map(|p| set.noiseless_categories(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(CategoryMatrix { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Merge of two partial matrices, as produced by parallel workers.
    pub fn concat(mut self, other: CategoryMatrix) -> Self {
        self.rows.extend(other.rows);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyRow {
    pub posecode: String,
    pub category: String,
    pub count: usize,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    pub poses: usize,
    /// One row per (posecode, category), in definition and category order.
    pub rows: Vec<FrequencyRow>,
}

pub fn compute_category_frequencies(
    matrix: &CategoryMatrix,
    set: &PosecodeSet,
) -> Result<FrequencyTable> {
    if matrix.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut counts: Vec<Vec<usize>> = (0..set.len())
        .map(|d| vec![0; set.category_count(d)])
        .collect();
    for row in &matrix.rows {
        if row.len() != set.len() {
            return Err(Error::InvalidParameter(format!(
                "category row has {} entries for {} posecodes",
                row.len(),
                set.len()
            )));
        }
        for (d, &c) in row.iter().enumerate() {
            counts[d][c] += 1;
        }
    }
    let poses = matrix.len();
    let mut rows = Vec::new();
    for (d, per_cat) in counts.iter().enumerate() {
        for (c, &count) in per_cat.iter().enumerate() {
            rows.push(FrequencyRow {
                posecode: set.def(d).id.clone(),
                category: set.category_name(d, c).into(),
                count,
                frequency: count as f64 / poses as f64,
            });
        }
    }
    Ok(FrequencyTable { poses, rows })
}

pub const TRIVIAL_AT: f64 = 0.60;
pub const UNSKIPPABLE_BELOW: f64 = 0.06;

/// Frequency-based classes; listed ambiguous categories override frequency.
pub fn classify_eligibility(
    freqs: &FrequencyTable,
    trivial_at: f64,
    unskippable_below: f64,
    ambiguous: &BTreeSet<(String, String)>,
) -> EligibilityTable {
    let mut table = EligibilityTable::new();
    for row in &freqs.rows {
        let key = (row.posecode.clone(), row.category.clone());
        let class = if ambiguous.contains(&key) {
            EligibilityClass::IgnoredAmbiguous
        } else if row.frequency >= trivial_at {
            EligibilityClass::IgnoredTrivial
        } else if row.frequency < unskippable_below {
            EligibilityClass::Unskippable
        } else {
            EligibilityClass::Skippable
        };
        table.entries.insert(key, class);
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningParams {
    pub min_support: usize,
    pub tau_single: f64,
    pub tau_pair: f64,
    pub max_x: usize,
}

impl Default for MiningParams {
    fn default() -> Self {
        MiningParams {
            min_support: 50,
            tau_single: 0.7,
            tau_pair: 0.8,
            max_x: 2,
        }
    }
}

impl MiningParams {
    pub fn tau(&self, x_len: usize) -> f64 {
        if x_len >= 2 {
            self.tau_pair
        } else {
            self.tau_single
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleItem {
    pub posecode: String,
    pub category: String,
}

impl RuleItem {
    pub fn new(posecode: impl Into<String>, category: impl Into<String>) -> Self {
        RuleItem {
            posecode: posecode.into(),
            category: category.into(),
        }
    }
}

/// `x => y`: among poses with every item of `x`, a fraction `confidence`
/// also has `y`. `support` counts the poses with `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatRule {
    pub x: Vec<RuleItem>,
    pub y: RuleItem,
    pub support: usize,
    pub confidence: f64,
}

/// Items for rule mining: one per `(posecode, category)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemSpace {
    pub labels: Vec<RuleItem>,
    pub mirror: Vec<Option<usize>>,
    pub eligible: Vec<bool>,
}

impl ItemSpace {
    pub fn from_posecodes(
        set: &PosecodeSet,
        eligibility: &CompiledEligibility,
    ) -> (Self, Vec<usize>) {
        let mut offsets = Vec::with_capacity(set.len());
        let mut labels = Vec::new();
        let mut eligible = Vec::new();
        for d in 0..set.len() {
            offsets.push(labels.len());
            for c in 0..set.category_count(d) {
                labels.push(RuleItem::new(
                    set.def(d).id.clone(),
                    set.category_name(d, c),
                ));
                eligible.push(eligibility.posecode(d, c).is_eligible());
            }
        }
        let mut mirror = Vec::with_capacity(labels.len());
        for d in 0..set.len() {
            for c in 0..set.category_count(d) {
                mirror.push(set.mirror_category(d, c).map(|(md, mc)| offsets[md] + mc));
            }
        }
        (
            ItemSpace {
                labels,
                mirror,
                eligible,
            },
            offsets,
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

struct Bitset(Vec<u64>);

impl Bitset {
    fn new(n: usize) -> Self {
        Bitset(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn and_count(&self, o: &Bitset) -> usize {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn and(&self, o: &Bitset) -> Bitset {
        Bitset(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
}

fn passes(hits: usize, support: usize, tau: f64, params: &MiningParams) -> bool {
    support >= params.min_support && support > 0 && hits as f64 / support as f64 >= tau
}

/// Mines every rule `X => Y` with `|X| <= max_x` (at most 2), `|Y| = 1`,
/// all items eligible, meeting support and confidence, whose left/right
/// mirrored rule meets them as well. Output is sorted by item labels.
///
/// `transactions` lists the items present in each pose.
pub fn mine_rules(
    transactions: &[Vec<usize>],
    space: &ItemSpace,
    params: &MiningParams,
) -> Result<Vec<StatRule>> {
    if transactions.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if params.max_x == 0 || params.max_x > 2 {
        return Err(Error::InvalidParameter(format!(
            "max_x must be 1 or 2, got {}",
            params.max_x
        )));
    }
    let n = transactions.len();
    let m = space.len();
    let mut bits: Vec<Bitset> = (0..m).map(|_| Bitset::new(n)).collect();
    for (p, items) in transactions.iter().enumerate() {
        for &i in items {
            if i >= m {
                return Err(Error::InvalidParameter(format!("item {i} out of range")));
            }
            bits[i].set(p);
        }
    }
    let counts: Vec<usize> = bits.iter().map(Bitset::count).collect();
    let usable: Vec<usize> = (0..m)
        .filter(|&i| space.eligible[i] && space.mirror[i].is_some_and(|mi| space.eligible[mi]))
        .collect();
    let mut pair = BTreeMap::new();
    let mut pair_count = |a: usize, b: usize| -> usize {
        let key = if a < b { (a, b) } else { (b, a) };
        *pair
            .entry(key)
            .or_insert_with(|| bits[key.0].and_count(&bits[key.1]))
    };

    let mirror = |i: usize| space.mirror[i].expect("usable items have mirrors");
    let mut found: Vec<(Vec<usize>, usize, usize, usize)> = Vec::new();

    for &x in &usable {
        let s = counts[x];
        if s < params.min_support {
            continue;
        }
        for &y in &usable {
            if y == x {
                continue;
            }
            let hits = pair_count(x, y);
            if !passes(hits, s, params.tau_single, params) {
                continue;
            }
            let (mx, my) = (mirror(x), mirror(y));
            if mx == my || !passes(pair_count(mx, my), counts[mx], params.tau_single, params) {
                continue;
            }
            found.push((vec![x], y, s, hits));
        }
    }

    if params.max_x == 2 {
        for (ai, &a) in usable.iter().enumerate() {
            for &b in &usable[ai + 1..] {
                let s = pair_count(a, b);
                if s < params.min_support {
                    continue;
                }
                let ab = bits[a].and(&bits[b]);
                for &y in &usable {
                    if y == a || y == b {
                        continue;
                    }
                    // cheap upper bounds before the triple intersection
                    if (pair_count(a, y) as f64 / s as f64) < params.tau_pair
                        || (pair_count(b, y) as f64 / s as f64) < params.tau_pair
                    {
                        continue;
                    }
                    let hits = ab.and_count(&bits[y]);
                    if !passes(hits, s, params.tau_pair, params) {
                        continue;
                    }
                    let (ma, mb, my) = (mirror(a), mirror(b), mirror(y));
                    if ma == mb || my == ma || my == mb {
                        continue;
                    }
                    let ms = pair_count(ma, mb);
                    if ms < params.min_support {
                        continue;
                    }
                    let mhits = bits[ma].and(&bits[mb]).and_count(&bits[my]);
                    if !passes(mhits, ms, params.tau_pair, params) {
                        continue;
                    }
                    found.push((vec![a, b], y, s, hits));
                }
            }
        }
    }

    let mut rules: Vec<StatRule> = found
        .into_iter()
        .map(|(x, y, support, hits)| {
            let mut x: Vec<RuleItem> = x.into_iter().map(|i| space.labels[i].clone()).collect();
            x.sort();
            StatRule {
                x,
                y: space.labels[y].clone(),
                support,
                confidence: hits as f64 / support as f64,
            }
        })
        .collect();
    rules.sort_by(|a, b| (&a.x, &a.y).cmp(&(&b.x, &b.y)));
    Ok(rules)
}

/// Rule mining over a noiseless category matrix with the given eligibility.
pub fn mine_statistics_rules(
    matrix: &CategoryMatrix,
    set: &PosecodeSet,
    eligibility: &CompiledEligibility,
    params: &MiningParams,
) -> Result<Vec<StatRule>> {
    if matrix.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let (space, offsets) = ItemSpace::from_posecodes(set, eligibility);
    let transactions: Vec<Vec<usize>> = matrix
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(d, &c)| offsets[d] + c)
                .collect()
        })
        .collect();
    mine_rules(&transactions, &space, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Upper,
    Lower,
    Other,
}

fn region_of_joint(name: &str) -> Region {
    const UPPER: [&str; 10] = [
        "shoulder", "elbow", "wrist", "hand", "collar", "neck", "head", "index", "middle", "thumb",
    ];
    const LOWER: [&str; 4] = ["hip", "knee", "ankle", "foot"];
    if UPPER.iter().any(|u| name.contains(u)) || name.contains("pinky") || name.contains("ring") {
        Region::Upper
    } else if LOWER.iter().any(|l| name.contains(l)) {
        Region::Lower
    } else {
        Region::Other
    }
}

fn region_of_item(item: &RuleItem, set: &PosecodeSet) -> Region {
    let Some(d) = set.index_of(&item.posecode) else {
        return Region::Other;
    };
    let reg = set.registry();
    let mut regions = set.joints(d).iter().map(|&j| region_of_joint(reg.name(j)));
    let first = regions.next().unwrap_or(Region::Other);
    if regions.all(|r| r == first) {
        first
    } else {
        Region::Other
    }
}

/// Rules whose two conditions span the upper and the lower body while the
/// implied item sits with only one of them; such a condition tends to just
/// shrink the denominator. Candidates for manual exclusion.
pub fn is_suspect_rule(rule: &StatRule, set: &PosecodeSet) -> bool {
    if rule.x.len() != 2 {
        return false;
    }
    let a = region_of_item(&rule.x[0], set);
    let b = region_of_item(&rule.x[1], set);
    let y = region_of_item(&rule.y, set);
    let opposite = matches!(
        (a, b),
        (Region::Upper, Region::Lower) | (Region::Lower, Region::Upper)
    );
    opposite && (y == a || y == b)
}

/// A rule resolved to `(posecode, category)` indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledRule {
    pub x: Vec<(usize, usize)>,
    pub y: (usize, usize),
}

impl CompiledRule {
    pub fn compile(rule: &StatRule, set: &PosecodeSet) -> Result<Self> {
        let item = |i: &RuleItem| -> Result<(usize, usize)> {
            let d = set.require(&i.posecode)?;
            Ok((d, set.category_index(d, &i.category)?))
        };
        Ok(CompiledRule {
            x: rule.x.iter().map(item).collect::<Result<_>>()?,
            y: item(&rule.y)?,
        })
    }
}

/// Ordering fact `lo < hi` along one axis, for relative-position posecodes.
fn ordering(fact: &ExtractedPosecode, set: &PosecodeSet) -> Option<(usize, usize, usize)> {
    let axis = set.kind(fact.def).axis()? as usize;
    let j = set.joints(fact.def);
    let last = set.category_count(fact.def) - 1;
    if fact.category == 0 {
        Some((axis, j[0], j[1]))
    } else if fact.category == last {
        Some((axis, j[1], j[0]))
    } else {
        None
    }
}

/// Drops every ordering fact `a < c` implied by a chain `a < b < ... < c`
/// of other facts on the same axis (transitive reduction per axis). Other
/// posecodes pass through untouched.
pub fn apply_relation_ripple(
    posecodes: &[ExtractedPosecode],
    set: &PosecodeSet,
) -> Vec<ExtractedPosecode> {
    let edges: Vec<Option<(usize, usize, usize)>> =
        posecodes.iter().map(|p| ordering(p, set)).collect();
    let succ = |axis: usize, from: usize| {
        edges
            .iter()
            .flatten()
            .filter(move |(a, lo, _)| *a == axis && *lo == from)
            .map(|(_, _, hi)| *hi)
    };
    let reaches = |axis: usize, start: usize, target: usize| {
        let mut seen = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            if n == target {
                return true;
            }
            if seen.insert(n) {
                stack.extend(succ(axis, n));
            }
        }
        false
    };
    posecodes
        .iter()
        .zip(&edges)
        .filter(|(_, e)| match e {
            None => true,
            Some((axis, lo, hi)) => !succ(*axis, *lo).any(|v| v != *hi && reaches(*axis, v, *hi)),
        })
        .map(|(p, _)| *p)
        .collect()
}

fn unit_item(unit: &DescriptionUnit, facts: &[Fact]) -> Option<(usize, usize)> {
    match unit.provenance.as_slice() {
        [only] => match facts[*only] {
            Fact::Posecode(p) => Some((p.def, p.category)),
            Fact::Super(_) => None,
        },
        _ => None,
    }
}

/// One pass over `rules` in order: when every `x` item is still conveyed by
/// some unit, the standalone unit carrying `y` (if any) is removed.
pub fn apply_statistics_ripple(
    units: &mut Vec<DescriptionUnit>,
    facts: &[Fact],
    rules: &[CompiledRule],
) {
    let items_present = |units: &[DescriptionUnit]| -> BTreeSet<(usize, usize)> {
        units
            .iter()
            .flat_map(|u| u.provenance.iter())
            .filter_map(|&f| match facts[f] {
                Fact::Posecode(p) => Some((p.def, p.category)),
                Fact::Super(_) => None,
            })
            .collect()
    };
    let mut present = items_present(units);
    for rule in rules {
        if !rule.x.iter().all(|x| present.contains(x)) {
            continue;
        }
        if let Some(pos) = units
            .iter()
            .position(|u| unit_item(u, facts) == Some(rule.y))
        {
            units.remove(pos);
            present = items_present(units);
        }
    }
}

/// Removes ignored facts, keeps unskippable ones and drops each skippable
/// fact with probability `skip_prob` (one draw per skippable fact).
pub fn select_posecodes<R: RngCore + ?Sized>(
    facts: &[Fact],
    eligibility: &CompiledEligibility,
    skip_prob: f64,
    rng: &mut R,
) -> Vec<Fact> {
    facts
        .iter()
        .filter(|f| match eligibility.class_of(f) {
            EligibilityClass::Unskippable => true,
            EligibilityClass::Skippable => rng.gen::<f64>() >= skip_prob,
            EligibilityClass::IgnoredTrivial | EligibilityClass::IgnoredAmbiguous => false,
        })
        .copied()
        .collect()
}
