//! Tab-separated tables. `#` starts a comment line; fields never contain
//! tabs. Rule items are written `posecode=category`, conjunctions joined by
//! ` & ` and production alternatives by ` or `.

use std::fmt::Write as _;

use posecode_core::posecode::BinningTable;
use posecode_core::selection::{FrequencyRow, FrequencyTable, RuleItem};
use posecode_core::superposecode::Requirement;
use posecode_core::{
    BinningSpec, EligibilityClass, EligibilityTable, MiningParams, PosecodeDef, PosecodeKind,
    Registry, Role, RoleEntry, StatRule, SuperPosecodeDef,
};

use super::content_lines;
use crate::{Error, Result};

fn fields<'a>(name: &str, line: usize, text: &'a str, expected: usize) -> Result<Vec<&'a str>> {
    let f: Vec<&str> = text.split('\t').map(str::trim).collect();
    if f.len() != expected {
        return Err(Error::parse(
            name,
            line,
            format!(
                "expected {expected} tab-separated fields, found {}",
                f.len()
            ),
        ));
    }
    Ok(f)
}

fn number<T: std::str::FromStr>(name: &str, line: usize, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(name, line, format!("not a number: `{s}`")))
}

pub fn parse_registry(text: &str, name: &str) -> Result<Registry> {
    let names: Vec<&str> = content_lines(text).map(|(_, l)| l.trim()).collect();
    Registry::new(names).map_err(|e| Error::parse(name, 0, e.to_string()))
}

pub fn write_registry(registry: &Registry) -> String {
    let mut s = String::from("# joint name, in coordinate order\n");
    for k in registry.keypoints() {
        s.push_str(&k.name);
        s.push('\n');
    }
    s
}

pub fn parse_posecodes(text: &str, name: &str) -> Result<Vec<PosecodeDef>> {
    content_lines(text)
        .map(|(n, l)| {
            let f = fields(name, n, l, 3)?;
            let kind = PosecodeKind::parse(f[1])
                .ok_or_else(|| Error::parse(name, n, format!("unknown kind `{}`", f[1])))?;
            Ok(PosecodeDef {
                id: f[0].into(),
                kind,
                joints: f[2].split(',').map(|j| j.trim().to_string()).collect(),
            })
        })
        .collect()
}

pub fn write_posecodes(defs: &[PosecodeDef]) -> String {
    let mut s = String::from("# id\tkind\tjoints\n");
    for d in defs {
        let _ = writeln!(s, "{}\t{}\t{}", d.id, d.kind.name(), d.joints.join(","));
    }
    s
}

pub fn parse_binning(text: &str, name: &str) -> Result<BinningTable> {
    let specs = content_lines(text)
        .map(|(n, l)| {
            let f = fields(name, n, l, 4)?;
            let kind = PosecodeKind::parse(f[0])
                .ok_or_else(|| Error::parse(name, n, format!("unknown kind `{}`", f[0])))?;
            let categories = f[1].split(';').map(|c| c.trim().to_string()).collect();
            let thresholds = if f[2].is_empty() {
                Vec::new()
            } else {
                f[2].split(',')
                    .map(|t| number(name, n, t.trim()))
                    .collect::<Result<Vec<f64>>>()?
            };
            let noise = number(name, n, f[3])?;
            BinningSpec::new(kind, categories, thresholds, noise)
                .map_err(|e| Error::parse(name, n, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    BinningTable::new(specs).map_err(|e| Error::parse(name, 0, e.to_string()))
}

pub fn write_binning(table: &BinningTable) -> String {
    let mut s = String::from("# kind\tcategories\tthresholds\tnoise\n");
    for spec in table.iter() {
        let t: Vec<String> = spec.thresholds.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}",
            spec.kind.name(),
            spec.categories.join(";"),
            t.join(","),
            spec.noise
        );
    }
    s
}

pub fn item_text(item: &RuleItem) -> String {
    format!("{}={}", item.posecode, item.category)
}

pub fn parse_item(s: &str) -> Option<RuleItem> {
    let (p, c) = s.split_once('=')?;
    let (p, c) = (p.trim(), c.trim());
    (!p.is_empty() && !c.is_empty()).then(|| RuleItem::new(p, c))
}

fn parse_conjunction(name: &str, line: usize, s: &str) -> Result<Vec<RuleItem>> {
    s.split(" & ")
        .map(|i| {
            parse_item(i)
                .ok_or_else(|| Error::parse(name, line, format!("bad item `{}`", i.trim())))
        })
        .collect()
}

fn conjunction_text(items: &[RuleItem]) -> String {
    items.iter().map(item_text).collect::<Vec<_>>().join(" & ")
}

pub fn parse_super_posecodes(text: &str, name: &str) -> Result<Vec<SuperPosecodeDef>> {
    content_lines(text)
        .map(|(n, l)| {
            let f = fields(name, n, l, 5)?;
            let eligibility = EligibilityClass::parse(f[3])
                .ok_or_else(|| Error::parse(name, n, format!("unknown class `{}`", f[3])))?;
            let alternatives = f[4]
                .split(" or ")
                .map(|alt| {
                    parse_conjunction(name, n, alt).map(|items| {
                        items
                            .into_iter()
                            .map(|i| Requirement::new(i.posecode, i.category))
                            .collect()
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SuperPosecodeDef {
                id: f[0].into(),
                subject: f[1].into(),
                category: f[2].into(),
                eligibility,
                alternatives,
            })
        })
        .collect()
}

pub fn write_super_posecodes(defs: &[SuperPosecodeDef]) -> String {
    let mut s = String::from("# id\tsubject\tcategory\teligibility\talternatives\n");
    for d in defs {
        let alts: Vec<String> = d
            .alternatives
            .iter()
            .map(|alt| {
                alt.iter()
                    .map(|r| format!("{}={}", r.posecode, r.category))
                    .collect::<Vec<_>>()
                    .join(" & ")
            })
            .collect();
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}",
            d.id,
            d.subject,
            d.category,
            d.eligibility.name(),
            alts.join(" or ")
        );
    }
    s
}

fn optional(s: &str) -> Option<String> {
    (s != "*").then(|| s.to_string())
}

/// `posecode, category, role, scope`; `*` stands for any category or scope.
pub fn parse_roles(text: &str, name: &str) -> Result<Vec<RoleEntry>> {
    content_lines(text)
        .map(|(n, l)| {
            let f = fields(name, n, l, 4)?;
            let role = Role::parse(f[2])
                .ok_or_else(|| Error::parse(name, n, format!("unknown role `{}`", f[2])))?;
            Ok(RoleEntry {
                posecode: f[0].into(),
                category: optional(f[1]),
                role,
                scope: optional(f[3]),
            })
        })
        .collect()
}

pub fn write_roles(roles: &[RoleEntry]) -> String {
    let mut s = String::from("# posecode\tcategory\trole\tscope\n");
    for r in roles {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}",
            r.posecode,
            r.category.as_deref().unwrap_or("*"),
            r.role.name(),
            r.scope.as_deref().unwrap_or("*")
        );
    }
    s
}

pub fn parse_eligibility(text: &str, name: &str) -> Result<EligibilityTable> {
    let mut table = EligibilityTable::new();
    for (n, l) in content_lines(text) {
        let f = fields(name, n, l, 3)?;
        let class = EligibilityClass::parse(f[2])
            .ok_or_else(|| Error::parse(name, n, format!("unknown class `{}`", f[2])))?;
        if table.get(f[0], f[1]).is_some() {
            return Err(Error::parse(
                name,
                n,
                format!("duplicate entry {}={}", f[0], f[1]),
            ));
        }
        table.insert(f[0], f[1], class);
    }
    Ok(table)
}

pub fn write_eligibility(table: &EligibilityTable) -> String {
    let mut s = String::from("# posecode\tcategory\tclass\n");
    for (p, c, class) in table.iter() {
        let _ = writeln!(s, "{p}\t{c}\t{}", class.name());
    }
    s
}

fn rule_header(params: &MiningParams) -> String {
    format!(
        "# min_support={}\ttau1={}\ttau2={}\n# x\ty\tsupport\tconfidence\n",
        params.min_support, params.tau_single, params.tau_pair
    )
}

pub fn write_rules(rules: &[StatRule], params: &MiningParams) -> String {
    let mut s = rule_header(params);
    for r in rules {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}",
            conjunction_text(&r.x),
            item_text(&r.y),
            r.support,
            r.confidence
        );
    }
    s
}

pub fn parse_rules(text: &str, name: &str) -> Result<Vec<StatRule>> {
    content_lines(text)
        .map(|(n, l)| {
            let f = fields(name, n, l, 4)?;
            let mut x = parse_conjunction(name, n, f[0])?;
            x.sort();
            let y = parse_item(f[1])
                .ok_or_else(|| Error::parse(name, n, format!("bad item `{}`", f[1])))?;
            Ok(StatRule {
                x,
                y,
                support: number(name, n, f[2])?,
                confidence: number(name, n, f[3])?,
            })
        })
        .collect()
}

/// Report of the rules flagged for manual review, in the rules format.
pub fn write_review(rules: &[&StatRule], params: &MiningParams) -> String {
    let mut s = String::from(
        "# conditions span upper and lower body while the implied item shares a region with one of them\n",
    );
    s.push_str(&rule_header(params));
    for r in rules {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}",
            conjunction_text(&r.x),
            item_text(&r.y),
            r.support,
            r.confidence
        );
    }
    s
}

/// A rule `x => y` to drop from a rules file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exclusion {
    pub x: Vec<RuleItem>,
    pub y: RuleItem,
}

impl Exclusion {
    pub fn matches(&self, rule: &StatRule) -> bool {
        self.x == rule.x && self.y == rule.y
    }
}

pub fn parse_exclusions(text: &str, name: &str) -> Result<Vec<Exclusion>> {
    content_lines(text)
        .map(|(n, l)| {
            let f = fields(name, n, l, 2)?;
            let mut x = parse_conjunction(name, n, f[0])?;
            x.sort();
            let y = parse_item(f[1])
                .ok_or_else(|| Error::parse(name, n, format!("bad item `{}`", f[1])))?;
            Ok(Exclusion { x, y })
        })
        .collect()
}

pub fn write_exclusions(exclusions: &[Exclusion]) -> String {
    let mut s = String::from("# x\ty\n");
    for e in exclusions {
        let _ = writeln!(s, "{}\t{}", conjunction_text(&e.x), item_text(&e.y));
    }
    s
}

pub fn write_frequencies(table: &FrequencyTable) -> String {
    let mut s = format!(
        "# poses={}\n# posecode\tcategory\tcount\tfrequency\n",
        table.poses
    );
    for r in &table.rows {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}",
            r.posecode, r.category, r.count, r.frequency
        );
    }
    s
}

/// Frequencies are recomputed from the counts and the `# poses=` header.
pub fn parse_frequencies(text: &str, name: &str) -> Result<FrequencyTable> {
    let poses: usize = text
        .lines()
        .find_map(|l| l.strip_prefix("# poses="))
        .ok_or_else(|| Error::parse(name, 1, "missing `# poses=` header"))
        .and_then(|p| number(name, 1, p.trim()))?;
    if poses == 0 {
        return Err(Error::parse(name, 1, "zero poses"));
    }
    let rows = content_lines(text)
        .map(|(n, l)| {
            let f = fields(name, n, l, 4)?;
            let count: usize = number(name, n, f[2])?;
            Ok(FrequencyRow {
                posecode: f[0].into(),
                category: f[1].into(),
                count,
                frequency: count as f64 / poses as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrequencyTable { poses, rows })
}
