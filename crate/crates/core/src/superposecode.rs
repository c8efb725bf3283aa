//! Binary higher-level concepts built from elementary categorizations, and
//! the support / semi-support retention logic around them.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::posecode::{ExtractedPosecode, PosecodeSet};
use crate::selection::EligibilityClass;
use crate::{Error, Result};

/// `posecode` must have been categorized as `category`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub posecode: String,
    pub category: String,
}

impl Requirement {
    pub fn new(posecode: impl Into<String>, category: impl Into<String>) -> Self {
        Requirement {
            posecode: posecode.into(),
            category: category.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperPosecodeDef {
    pub id: String,
    /// Described body part or entity ("torso", "body", "hands", ...).
    pub subject: String,
    pub category: String,
    /// Either [`EligibilityClass::Skippable`] or [`EligibilityClass::Unskippable`].
    pub eligibility: EligibilityClass,
    /// Any one fully satisfied alternative produces the concept.
    pub alternatives: Vec<Vec<Requirement>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    /// Only feeds super-posecodes, never verbalized.
    Support,
    /// Dropped when its super-posecode fires, kept otherwise.
    SemiSupport,
    Regular,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Support => "support",
            Role::SemiSupport => "semi-support",
            Role::Regular => "regular",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Role::Support, Role::SemiSupport, Role::Regular]
            .into_iter()
            .find(|r| r.name() == s)
    }
}

/// Role of a posecode (optionally a single categorization of it), optionally
/// scoped to one super-posecode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleEntry {
    pub posecode: String,
    pub category: Option<String>,
    pub role: Role,
    pub scope: Option<String>,
}

#[derive(Debug, Clone)]
struct CompiledRole {
    category: Option<usize>,
    role: Role,
    /// Super-posecodes whose production discards a semi-support fact.
    supers: Vec<usize>,
}

/// Super-posecode definitions and role assignments resolved against a
/// [`PosecodeSet`].
#[derive(Debug, Clone)]
pub struct SuperPosecodeSet {
    defs: Vec<SuperPosecodeDef>,
    alternatives: Vec<Vec<Vec<(usize, usize)>>>,
    roles: Vec<Vec<CompiledRole>>,
    entries: Vec<RoleEntry>,
}

/// Result of [`evaluate_super_posecodes`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOutcome {
    /// Indices of the produced super-posecodes, in definition order.
    pub produced: Vec<usize>,
    pub retained: Vec<ExtractedPosecode>,
}

impl SuperPosecodeSet {
    pub fn new(
        posecodes: &PosecodeSet,
        defs: Vec<SuperPosecodeDef>,
        roles: Vec<RoleEntry>,
    ) -> Result<Self> {
        let mut alternatives = Vec::with_capacity(defs.len());
        for def in &defs {
            if def.alternatives.is_empty() {
                return Err(Error::InvalidDefinition(format!(
                    "super-posecode `{}` has no production alternative",
                    def.id
                )));
            }
            if !matches!(
                def.eligibility,
                EligibilityClass::Skippable | EligibilityClass::Unskippable
            ) {
                return Err(Error::InvalidDefinition(format!(
                    "super-posecode `{}` must be skippable or unskippable",
                    def.id
                )));
            }
            let mut alts = Vec::with_capacity(def.alternatives.len());
            for alt in &def.alternatives {
                let mut reqs = Vec::with_capacity(alt.len());
                for r in alt {
                    let d = posecodes
                        .require(&r.posecode)
                        .map_err(|e| e.context(format!("super-posecode `{}`", def.id)))?;
                    reqs.push((d, posecodes.category_index(d, &r.category)?));
                }
                alts.push(reqs);
            }
            alternatives.push(alts);
        }
        let mut ids = defs.iter().map(|d| d.id.as_str()).collect::<Vec<_>>();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidDefinition(format!(
                "duplicate super-posecode `{}`",
                w[0]
            )));
        }

        let mut compiled = vec![Vec::new(); posecodes.len()];
        for entry in &roles {
            let d = posecodes
                .require(&entry.posecode)
                .map_err(|e| e.context("role table"))?;
            let category = entry
                .category
                .as_deref()
                .map(|c| posecodes.category_index(d, c))
                .transpose()?;
            let scope = entry
                .scope
                .as_deref()
                .map(|s| {
                    defs.iter().position(|x| x.id == s).ok_or_else(|| {
                        Error::InvalidDefinition(format!(
                            "role scoped to unknown super-posecode `{s}`"
                        ))
                    })
                })
                .transpose()?;
            let contributes = |s: usize| {
                alternatives[s]
                    .iter()
                    .flatten()
                    .any(|&(rd, rc)| rd == d && category.is_none_or(|c| c == rc))
            };
            let supers: Vec<usize> = match scope {
                Some(s) => [s].into_iter().filter(|&s| contributes(s)).collect(),
                None => (0..defs.len()).filter(|&s| contributes(s)).collect(),
            };
            if entry.role != Role::Regular && supers.is_empty() {
                return Err(Error::InvalidDefinition(format!(
                    "{} posecode `{}` does not contribute to any super-posecode",
                    entry.role.name(),
                    entry.posecode
                )));
            }
            compiled[d].push(CompiledRole {
                category,
                role: entry.role,
                supers,
            });
        }
        Ok(SuperPosecodeSet {
            defs,
            alternatives,
            roles: compiled,
            entries: roles,
        })
    }

    pub fn defs(&self) -> &[SuperPosecodeDef] {
        &self.defs
    }

    pub fn def(&self, index: usize) -> &SuperPosecodeDef {
        &self.defs[index]
    }

    pub fn role_entries(&self) -> &[RoleEntry] {
        &self.entries
    }

    /// Resolved `(posecode, category)` requirements of each alternative.
    pub fn alternatives(&self, index: usize) -> &[Vec<(usize, usize)>] {
        &self.alternatives[index]
    }

    fn role_of(&self, fact: &ExtractedPosecode) -> Option<&CompiledRole> {
        self.roles
            .get(fact.def)?
            .iter()
            .find(|r| r.category.is_none_or(|c| c == fact.category))
    }
}

/// Produces every super-posecode with a satisfied alternative and filters
/// the elementary facts according to their roles.
pub fn evaluate_super_posecodes(
    extracted: &[ExtractedPosecode],
    set: &SuperPosecodeSet,
) -> SuperOutcome {
    let holds = |(d, c): (usize, usize)| extracted.iter().any(|e| e.def == d && e.category == c);
    let produced: Vec<usize> = (0..set.defs.len())
        .filter(|&s| {
            set.alternatives[s]
                .iter()
                .any(|alt| alt.iter().all(|&req| holds(req)))
        })
        .collect();
    let retained = extracted
        .iter()
        .filter(|e| match set.role_of(e) {
            None => true,
            Some(r) => match r.role {
                Role::Regular => true,
                Role::Support => false,
                Role::SemiSupport => !r.supers.iter().any(|s| produced.contains(s)),
            },
        })
        .copied()
        .collect();
    SuperOutcome { produced, retained }
}
