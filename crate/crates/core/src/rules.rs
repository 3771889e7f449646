//! Ground string rewrite rules and the one-step rewrite relation.
//!
//! A [`RuleSystem`] is a labeled abstract rewriting system over character
//! strings: every rule is one labeled sub-relation, and a state rewrites to
//! every string obtained by splicing a rule's right-hand side over one
//! occurrence of its left-hand side. All occurrences are reported, including
//! overlapping ones.
//!
//! Base rules (order 0) match anywhere in a state. Homotopy rungs (order 2 and
//! up) are whole-state rules: they only fire when the state equals their
//! left-hand side.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, ParseErrorKind, Result};

/// One rewrite rule `lhs -> rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub id: String,
    pub lhs: String,
    pub rhs: String,
    /// 0 for base rules, `k >= 2` for an order-`k` homotopy rung.
    pub order: u32,
    pub inverse_of: Option<String>,
}

impl Rule {
    pub fn new(id: impl Into<String>, lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        Rule {
            id: id.into(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            order: 0,
            inverse_of: None,
        }
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.order = order;
        self
    }

    pub fn with_inverse(mut self, inverse: impl Into<String>) -> Self {
        self.inverse_of = Some(inverse.into());
        self
    }

    /// Rungs rewrite whole states only.
    pub fn is_rung(&self) -> bool {
        self.order >= 2
    }

    /// The layer of the n-fold structure this rule contributes arrows to:
    /// base rules give 1-cells, order-`k` rungs give arrows in direction `k`.
    pub fn stratum(&self) -> u32 {
        self.order.max(1)
    }
}

/// An ordered set of uniquely labeled rules.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSystem {
    rules: Vec<Rule>,
    index: HashMap<String, usize>,
}

impl RuleSystem {
    /// Builds a system, checking id uniqueness and declared inverses.
    pub fn new(rules: Vec<Rule>) -> Result<Self> {
        let mut index = HashMap::with_capacity(rules.len());
        for (i, rule) in rules.iter().enumerate() {
            if rule.lhs.is_empty() {
                return Err(Error::EmptyLhs(rule.id.clone()));
            }
            if index.insert(rule.id.clone(), i).is_some() {
                return Err(Error::DuplicateRuleId(rule.id.clone()));
            }
        }
        for rule in &rules {
            let Some(target) = &rule.inverse_of else {
                continue;
            };
            let bad = |reason| Error::BadInverse {
                rule: rule.id.clone(),
                target: target.clone(),
                reason,
            };
            let other = index
                .get(target)
                .map(|&i| &rules[i])
                .ok_or_else(|| bad("no such rule exists"))?;
            if other.lhs != rule.rhs || other.rhs != rule.lhs {
                return Err(bad("its sides are not swapped"));
            }
            if other.order != rule.order {
                return Err(bad("it has a different order"));
            }
        }
        Ok(RuleSystem { rules, index })
    }

    pub fn empty() -> Self {
        RuleSystem::default()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rule(&self, index: usize) -> &Rule {
        &self.rules[index]
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.position(id).map(|i| &self.rules[i])
    }

    /// Index of the declared inverse of the rule at `index`, if any.
    pub fn inverse_index(&self, index: usize) -> Option<usize> {
        self.rules[index].inverse_of.as_deref().and_then(|id| self.position(id))
    }

    /// Highest rung order present, or 1 when the system only has base rules.
    pub fn max_order(&self) -> u32 {
        self.rules.iter().map(Rule::stratum).max().unwrap_or(1)
    }

    /// Characters used by any rule.
    pub fn alphabet(&self) -> BTreeSet<char> {
        self.rules
            .iter()
            .flat_map(|r| r.lhs.chars().chain(r.rhs.chars()))
            .collect()
    }

    /// Alphabet of the rules together with some initial states.
    pub fn alphabet_with<'a>(&self, states: impl IntoIterator<Item = &'a str>) -> BTreeSet<char> {
        let mut alphabet = self.alphabet();
        for s in states {
            alphabet.extend(s.chars());
        }
        alphabet
    }

    pub fn into_rules(self) -> Vec<Rule> {
        self.rules
    }
}

/// An occurrence of a rule's left-hand side inside a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchSite<'s> {
    /// Index of the rule in its system.
    pub rule: usize,
    /// Character offset of the occurrence.
    pub position: usize,
    pub subject: &'s str,
}

/// Every occurrence of every rule in `state`, ordered by (rule index, position).
pub fn find_matches<'s>(state: &'s str, system: &RuleSystem) -> Vec<MatchSite<'s>> {
    let mut sites = Vec::new();
    for (rule_index, rule) in system.rules.iter().enumerate() {
        if rule.is_rung() {
            if state == rule.lhs {
                sites.push(MatchSite {
                    rule: rule_index,
                    position: 0,
                    subject: state,
                });
            }
            continue;
        }
        // UTF-8 is self-synchronizing, so a byte-level hit of a valid needle
        // always starts on a character boundary.
        for (position, (byte, _)) in state.char_indices().enumerate() {
            if state[byte..].starts_with(rule.lhs.as_str()) {
                sites.push(MatchSite {
                    rule: rule_index,
                    position,
                    subject: state,
                });
            }
        }
    }
    sites
}

fn byte_offset(s: &str, chars: usize) -> Option<usize> {
    if chars == 0 {
        return Some(0);
    }
    s.char_indices()
        .map(|(b, _)| b)
        .chain(std::iter::once(s.len()))
        .nth(chars)
}

/// Rewrites the subject of `site` at the matched occurrence.
pub fn apply_match(site: &MatchSite<'_>, system: &RuleSystem) -> Result<String> {
    let rule = system.rules.get(site.rule).ok_or_else(|| Error::InvalidSite {
        rule: format!("#{}", site.rule),
        subject: site.subject.to_owned(),
        position: site.position,
    })?;
    let invalid = || Error::InvalidSite {
        rule: rule.id.clone(),
        subject: site.subject.to_owned(),
        position: site.position,
    };
    if rule.is_rung() {
        if site.position != 0 || site.subject != rule.lhs {
            return Err(invalid());
        }
        return Ok(rule.rhs.clone());
    }
    let start = byte_offset(site.subject, site.position).ok_or_else(invalid)?;
    if !site.subject[start..].starts_with(rule.lhs.as_str()) {
        return Err(invalid());
    }
    let end = start + rule.lhs.len();
    let mut out = String::with_capacity(site.subject.len() - rule.lhs.len() + rule.rhs.len());
    out.push_str(&site.subject[..start]);
    out.push_str(&rule.rhs);
    out.push_str(&site.subject[end..]);
    Ok(out)
}

/// Applies rule `rule` at character `position` of `state`.
pub fn rewrite_at(state: &str, rule: usize, position: usize, system: &RuleSystem) -> Result<String> {
    apply_match(
        &MatchSite {
            rule,
            position,
            subject: state,
        },
        system,
    )
}

/// The labeled successor set `{(label, q) : state ->label q}`.
pub fn successors(state: &str, system: &RuleSystem) -> BTreeSet<(String, String)> {
    find_matches(state, system)
        .iter()
        .map(|site| {
            let next = apply_match(site, system).expect("find_matches yields valid sites");
            (system.rules[site.rule].id.clone(), next)
        })
        .collect()
}

fn fresh_id(base: &str, taken: &HashMap<String, usize>, extra: &BTreeSet<String>) -> String {
    let free = |id: &str| !taken.contains_key(id) && !extra.contains(id);
    if free(base) {
        return base.to_owned();
    }
    (2..)
        .map(|n| format!("{base}_{n}"))
        .find(|id| free(id))
        .expect("unbounded id search")
}

/// Appends `rhs -> lhs` for every rule without a declared inverse and links
/// the pair both ways. Idempotent.
pub fn invert_system(system: &RuleSystem) -> Result<RuleSystem> {
    let mut rules = system.rules.clone();
    let mut added = BTreeSet::new();
    let mut appended = Vec::new();
    for rule in rules.iter_mut() {
        if rule.inverse_of.is_some() {
            continue;
        }
        if rule.rhs.is_empty() {
            return Err(Error::EmptyRhsInverse(rule.id.clone()));
        }
        let id = fresh_id(&format!("{}_inv", rule.id), &system.index, &added);
        added.insert(id.clone());
        appended.push(Rule {
            id: id.clone(),
            lhs: rule.rhs.clone(),
            rhs: rule.lhs.clone(),
            order: rule.order,
            inverse_of: Some(rule.id.clone()),
        });
        rule.inverse_of = Some(id);
    }
    rules.extend(appended);
    RuleSystem::new(rules)
}

/// A parsed rules document: rules with their orders plus `@spec` directives.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RulesDocument {
    pub rules: Vec<Rule>,
    pub specs: Vec<SpecDirective>,
}

/// `@spec <source states> | <target states>` inside an `@order k` section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecDirective {
    pub line: usize,
    pub order: u32,
    pub source: Vec<String>,
    pub target: Vec<String>,
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the rules-file format, keeping `@spec` directives.
pub fn parse_document(text: &str) -> Result<RulesDocument, ParseError> {
    let mut doc = RulesDocument::default();
    let mut order = 0u32;
    let mut explicit: Vec<Option<String>> = Vec::new();
    let mut lines = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let err = |kind| ParseError { line: line_no, kind };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("@order") => {
                let rest: Vec<&str> = tokens.collect();
                let k = match rest.as_slice() {
                    [k] => k.parse::<u32>().ok(),
                    _ => None,
                };
                order = match k {
                    Some(k) if k != 1 => k,
                    _ => {
                        return Err(err(ParseErrorKind::Directive(format!(
                            "`{line}` (expected `@order k`, k = 0 or k >= 2)"
                        ))))
                    }
                };
                continue;
            }
            Some("@spec") => {
                let rest: Vec<&str> = tokens.collect();
                let mut halves = rest.split(|t| *t == "|");
                let (Some(source), Some(target), None) = (halves.next(), halves.next(), halves.next()) else {
                    return Err(err(ParseErrorKind::Directive(format!(
                        "`{line}` (expected `@spec s0 .. sk | t0 .. tk`)"
                    ))));
                };
                if order < 2 || source.is_empty() || target.is_empty() {
                    return Err(err(ParseErrorKind::Directive(format!(
                        "`{line}` (needs two nonempty paths inside an `@order k` section, k >= 2)"
                    ))));
                }
                doc.specs.push(SpecDirective {
                    line: line_no,
                    order,
                    source: source.iter().map(|s| s.to_string()).collect(),
                    target: target.iter().map(|s| s.to_string()).collect(),
                });
                continue;
            }
            _ => {}
        }

        let Some((left, right)) = line.split_once("->") else {
            return Err(err(ParseErrorKind::MissingArrow));
        };
        if right.contains("->") {
            return Err(err(ParseErrorKind::Directive(format!(
                "`{line}` has more than one arrow"
            ))));
        }
        let left = left.trim();
        let (name, lhs) = match left.split_once(':') {
            Some((name, rest))
                if is_identifier(name) && rest.starts_with(char::is_whitespace) && !rest.trim().is_empty() =>
            {
                (Some(name.to_owned()), rest.trim())
            }
            _ => (None, left),
        };
        if lhs.is_empty() {
            return Err(err(ParseErrorKind::EmptyLhs));
        }
        if lhs.contains(char::is_whitespace) {
            return Err(err(ParseErrorKind::Whitespace(lhs.to_owned())));
        }
        let right: Vec<&str> = right.split_whitespace().collect();
        let (rhs, inverse_of) = match right.as_slice() {
            [] => ("", None),
            [rhs] => (*rhs, None),
            [rhs, inv] if inv.len() > 1 && inv.starts_with('~') => (*rhs, Some(inv[1..].to_owned())),
            _ => return Err(err(ParseErrorKind::Whitespace(right.join(" ")))),
        };
        explicit.push(name);
        lines.push(line_no);
        doc.rules.push(Rule {
            id: String::new(),
            lhs: lhs.to_owned(),
            rhs: rhs.to_owned(),
            order,
            inverse_of,
        });
    }

    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, name) in explicit.iter().enumerate() {
        if let Some(name) = name {
            if seen.insert(name.clone(), i).is_some() {
                return Err(ParseError {
                    line: lines[i],
                    kind: ParseErrorKind::DuplicateId(name.clone()),
                });
            }
        }
    }
    for (i, name) in explicit.into_iter().enumerate() {
        let id = match name {
            Some(name) => name,
            None => {
                let id = format!("r{}", i + 1);
                if seen.insert(id.clone(), i).is_some() {
                    return Err(ParseError {
                        line: lines[i],
                        kind: ParseErrorKind::DuplicateId(id),
                    });
                }
                id
            }
        };
        doc.rules[i].id = id;
    }
    Ok(doc)
}

/// Parses a rules file into a [`RuleSystem`]; `@spec` directives are ignored.
pub fn parse_rules(text: &str) -> Result<RuleSystem, ParseError> {
    let doc = parse_document(text)?;
    RuleSystem::new(doc.rules).map_err(|e| ParseError {
        line: 0,
        kind: ParseErrorKind::Invalid(e.to_string()),
    })
}

/// Renders one rule as a rules-file line.
pub fn format_rule(rule: &Rule) -> String {
    let mut line = format!("{}: {} -> {}", rule.id, rule.lhs, rule.rhs);
    if let Some(inv) = &rule.inverse_of {
        line.push_str(" ~");
        line.push_str(inv);
    }
    line
}

/// Serializes a system; rungs are grouped under `@order k` lines.
pub fn format_rules(system: &RuleSystem) -> String {
    let mut out = String::new();
    let mut order = 0;
    for rule in system.rules() {
        if rule.order != order {
            order = rule.order;
            out.push_str(&format!("@order {order}\n"));
        }
        out.push_str(&format_rule(rule));
        out.push('\n');
    }
    out
}
