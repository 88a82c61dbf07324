//! Type definitions: Boolean formulas over primitive type patterns that map
//! a concept's primitive types onto a target taxonomy.
//!
//! One rule per line:
//!
//! ```text
//! # comment
//! /ORGANIZATION/COMPANY := (/ORGANIZATION/COMPANY || /NEWS_AGENCY) && !/SPORTS_LEAGUE
//! /OTHER := !ALL_TYPES_EXLUCDING_OTHER* || /OTHER*
//! ```
//!
//! `!` binds tighter than `&&`, which binds tighter than `||`. Patterns are
//! globs where `*` matches any run of characters, `/` included, and all
//! comparisons are case-insensitive.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Macro atom that stands for "any atom used positively by a non-OTHER rule".
pub const ALL_NON_OTHER_MACRO: &str = "ALL_TYPES_EXLUCDING_OTHER";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypePattern {
    raw: String,
    normalized: String,
}

impl TypePattern {
    pub fn new(raw: &str) -> Self {
        TypePattern {
            raw: raw.to_string(),
            normalized: raw.to_lowercase(),
        }
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn normalized(&self) -> &str {
        &self.normalized
    }

    pub fn matches(&self, primitive: &str) -> bool {
        glob_match(&self.normalized, &primitive.to_lowercase())
    }
}

/// Case-insensitive glob match of a pattern against a primitive type path.
pub fn match_pattern(pattern: &str, primitive: &str) -> bool {
    glob_match(&pattern.to_lowercase(), &primitive.to_lowercase())
}

// `*` matches any (possibly empty) sequence; no other metacharacters.
fn glob_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    let (mut pi, mut ti) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while ti < t.len() {
        if pi < p.len() && p[pi] == '*' {
            star = Some((pi, ti));
            pi += 1;
        } else if pi < p.len() && p[pi] == t[ti] {
            pi += 1;
            ti += 1;
        } else if let Some((sp, st)) = star {
            pi = sp + 1;
            ti = st + 1;
            star = Some((sp, st + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == '*')
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Pattern(TypePattern),
    /// `ALL_TYPES_EXLUCDING_OTHER`, optionally written with a trailing `*`.
    AllNonOther {
        raw: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeFormula {
    Atom(Atom),
    Not(Box<TypeFormula>),
    And(Box<TypeFormula>, Box<TypeFormula>),
    Or(Box<TypeFormula>, Box<TypeFormula>),
}

impl TypeFormula {
    pub fn pattern(p: &str) -> Self {
        TypeFormula::Atom(Atom::Pattern(TypePattern::new(p)))
    }

    pub fn negate(f: TypeFormula) -> Self {
        TypeFormula::Not(Box::new(f))
    }

    pub fn and(a: TypeFormula, b: TypeFormula) -> Self {
        TypeFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: TypeFormula, b: TypeFormula) -> Self {
        TypeFormula::Or(Box::new(a), Box::new(b))
    }

    /// Structural equality on normalized patterns.
    pub fn same_as(&self, other: &TypeFormula) -> bool {
        use TypeFormula::*;
        match (self, other) {
            (Atom(crate::typedef::Atom::Pattern(a)), Atom(crate::typedef::Atom::Pattern(b))) => {
                a.normalized == b.normalized
            }
            (Atom(crate::typedef::Atom::AllNonOther { .. }), Atom(crate::typedef::Atom::AllNonOther { .. })) => true,
            (Not(a), Not(b)) => a.same_as(b),
            (And(a1, b1), And(a2, b2)) | (Or(a1, b1), Or(a2, b2)) => a1.same_as(a2) && b1.same_as(b2),
            _ => false,
        }
    }

    /// Patterns that occur under an even number of negations.
    pub fn positive_patterns(&self) -> Vec<&TypePattern> {
        let mut out = Vec::new();
        self.collect_positive(false, &mut out);
        out
    }

    fn collect_positive<'a>(&'a self, negated: bool, out: &mut Vec<&'a TypePattern>) {
        match self {
            TypeFormula::Atom(Atom::Pattern(p)) => {
                if !negated {
                    out.push(p);
                }
            }
            TypeFormula::Atom(Atom::AllNonOther { .. }) => {}
            TypeFormula::Not(f) => f.collect_positive(!negated, out),
            TypeFormula::And(a, b) | TypeFormula::Or(a, b) => {
                a.collect_positive(negated, out);
                b.collect_positive(negated, out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            TypeFormula::Or(..) => 1,
            TypeFormula::And(..) => 2,
            TypeFormula::Not(_) => 3,
            TypeFormula::Atom(_) => 4,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for TypeFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeFormula::Atom(Atom::Pattern(p)) => f.write_str(&p.raw),
            TypeFormula::Atom(Atom::AllNonOther { raw }) => f.write_str(raw),
            TypeFormula::Not(inner) => {
                f.write_str("!")?;
                inner.fmt_child(f, 3)
            }
            // Left-associative: the right operand of the same operator needs parens.
            TypeFormula::And(a, b) => {
                a.fmt_child(f, 2)?;
                f.write_str(" && ")?;
                b.fmt_child(f, 3)
            }
            TypeFormula::Or(a, b) => {
                a.fmt_child(f, 1)?;
                f.write_str(" || ")?;
                b.fmt_child(f, 2)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeRule {
    pub target: String,
    pub formula: TypeFormula,
}

/// Number of non-empty segments in a slash path.
pub fn depth(path: &str) -> usize {
    path.split('/').filter(|s| !s.is_empty()).count()
}

fn first_segment(path: &str) -> Option<&str> {
    path.split('/').find(|s| !s.is_empty())
}

/// True iff `fine`'s first segment is the single segment of `coarse`.
pub fn is_compatible(fine: &str, coarse: &str) -> bool {
    match (first_segment(fine), first_segment(coarse)) {
        (Some(a), Some(b)) => depth(coarse) == 1 && a == b,
        _ => false,
    }
}

/// Rules in definition order, plus the resolved `ALL_TYPES_EXLUCDING_OTHER` macro.
#[derive(Debug, Clone, Default)]
pub struct TypeDefinition {
    rules: Vec<TypeRule>,
    all_non_other: Vec<TypePattern>,
    warnings: Vec<String>,
}

impl TypeDefinition {
    pub fn from_rules(rules: Vec<TypeRule>) -> Self {
        let mut defs = TypeDefinition::default();
        for r in rules {
            defs.push_rule(r, 0);
        }
        defs.finish();
        defs
    }

    fn push_rule(&mut self, rule: TypeRule, line: usize) {
        if let Some(existing) = self.rules.iter_mut().find(|r| r.target == rule.target) {
            self.warnings.push(format!(
                "line {line}: rule for {} replaces an earlier definition",
                rule.target
            ));
            *existing = rule;
        } else {
            self.rules.push(rule);
        }
    }

    fn finish(&mut self) {
        let mut seen = BTreeSet::new();
        let mut macro_atoms = Vec::new();
        for r in &self.rules {
            if first_segment(&r.target).is_some_and(|s| s.eq_ignore_ascii_case("other")) {
                continue;
            }
            for p in r.formula.positive_patterns() {
                let prefix = if p.normalized.ends_with('*') {
                    p.normalized.clone()
                } else {
                    format!("{}*", p.normalized)
                };
                if seen.insert(prefix.clone()) {
                    macro_atoms.push(TypePattern::new(&prefix));
                }
            }
        }
        self.all_non_other = macro_atoms;
        let coarse: BTreeSet<&str> = self
            .rules
            .iter()
            .filter(|r| depth(&r.target) == 1)
            .map(|r| r.target.as_str())
            .collect();
        let mut orphans = Vec::new();
        for r in &self.rules {
            if depth(&r.target) >= 2 {
                let head = format!("/{}", first_segment(&r.target).unwrap_or_default());
                if !coarse.contains(head.as_str()) {
                    orphans.push(format!("fine type {} has no coarse rule for {head}", r.target));
                }
            }
        }
        self.warnings.extend(orphans);
    }

    pub fn rules(&self) -> &[TypeRule] {
        &self.rules
    }

    pub fn rule(&self, target: &str) -> Option<&TypeFormula> {
        self.rules.iter().find(|r| r.target == target).map(|r| &r.formula)
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn all_non_other(&self) -> &[TypePattern] {
        &self.all_non_other
    }

    pub fn targets(&self) -> impl Iterator<Item = &str> {
        self.rules.iter().map(|r| r.target.as_str())
    }

    pub fn coarse_set(&self) -> BTreeSet<&str> {
        self.targets().filter(|t| depth(t) == 1).collect()
    }

    pub fn fine_set(&self) -> BTreeSet<&str> {
        self.targets().filter(|t| depth(t) >= 2).collect()
    }

    /// Depth-1 target whose name is OTHER, if the taxonomy has one.
    pub fn other_target(&self) -> Option<&str> {
        self.targets()
            .find(|t| depth(t) == 1 && first_segment(t).is_some_and(|s| s.eq_ignore_ascii_case("other")))
    }

    pub fn eval<S: AsRef<str>>(&self, formula: &TypeFormula, primitives: &[S]) -> bool {
        match formula {
            TypeFormula::Atom(Atom::Pattern(p)) => primitives.iter().any(|s| p.matches(s.as_ref())),
            TypeFormula::Atom(Atom::AllNonOther { .. }) => self
                .all_non_other
                .iter()
                .any(|p| primitives.iter().any(|s| p.matches(s.as_ref()))),
            TypeFormula::Not(f) => !self.eval(f, primitives),
            TypeFormula::And(a, b) => self.eval(a, primitives) && self.eval(b, primitives),
            TypeFormula::Or(a, b) => self.eval(a, primitives) || self.eval(b, primitives),
        }
    }

    /// Target types whose rule fires on the given primitive types.
    pub fn apply<S: AsRef<str>>(&self, primitives: &[S]) -> BTreeSet<String> {
        let lowered: Vec<String> = primitives.iter().map(|s| s.as_ref().to_lowercase()).collect();
        self.rules
            .iter()
            .filter(|r| self.eval(&r.formula, &lowered))
            .map(|r| r.target.clone())
            .collect()
    }

    /// Partition target types into depth-1 and deeper.
    pub fn split_coarse_fine<'a, I>(types: I) -> (BTreeSet<String>, BTreeSet<String>)
    where
        I: IntoIterator<Item = &'a String>,
    {
        types.into_iter().cloned().partition(|t| depth(t) == 1)
    }
}

impl fmt::Display for TypeDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{} := {}", r.target, r.formula)?;
        }
        Ok(())
    }
}

/// Applies a type definition to every concept of a type table, memoized.
#[derive(Debug, Clone, Default)]
pub struct ConceptTargets {
    map: BTreeMap<String, BTreeSet<String>>,
}

impl ConceptTargets {
    pub fn build(defs: &TypeDefinition, table: &crate::corpus::ConceptTypeTable) -> Self {
        let map = table
            .iter()
            .map(|(c, prims)| {
                let prims: Vec<&str> = prims.iter().map(String::as_str).collect();
                (c.to_string(), defs.apply(&prims))
            })
            .collect();
        ConceptTargets { map }
    }

    pub fn from_map(map: BTreeMap<String, BTreeSet<String>>) -> Self {
        ConceptTargets { map }
    }

    /// `T(c)`; empty for concepts without primitive types.
    pub fn of(&self, concept: &str) -> &BTreeSet<String> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        self.map.get(concept).unwrap_or(&EMPTY)
    }

    pub fn coarse_of(&self, concept: &str) -> impl Iterator<Item = &str> {
        self.of(concept).iter().map(String::as_str).filter(|t| depth(t) == 1)
    }

    pub fn fine_of(&self, concept: &str) -> impl Iterator<Item = &str> {
        self.of(concept).iter().map(String::as_str).filter(|t| depth(t) >= 2)
    }
}

/// Published taxonomy mappings shipped with the crate, by name.
pub const BUILTIN_TYPEDEFS: &[(&str, &str)] = &[
    (
        "figer_additions",
        include_str!("../fixtures/typedefs/figer_additions.typedefs"),
    ),
    ("bbn", include_str!("../fixtures/typedefs/bbn.typedefs")),
    (
        "ontonotes_fine",
        include_str!("../fixtures/typedefs/ontonotes_fine.typedefs"),
    ),
    ("ontonotes", include_str!("../fixtures/typedefs/ontonotes.typedefs")),
    ("muc", include_str!("../fixtures/typedefs/muc.typedefs")),
    ("conll", include_str!("../fixtures/typedefs/conll.typedefs")),
    ("bb3", include_str!("../fixtures/typedefs/bb3.typedefs")),
];

// ---------------------------------------------------------------------------
// Parser

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Not,
    And,
    Or,
    Atom(String),
}

struct Lexer<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    col_offset: usize,
    _src: &'a str,
}

fn is_atom_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | '!' | '&' | '|')
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize, col_offset: usize) -> Self {
        Lexer {
            chars: src.chars().enumerate().collect(),
            pos: 0,
            line,
            col_offset,
            _src: src,
        }
    }

    fn err(&self, col: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.col_offset + col + 1,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>> {
        let mut out = Vec::new();
        while self.pos < self.chars.len() {
            let (col, c) = self.chars[self.pos];
            if c.is_whitespace() {
                self.pos += 1;
                continue;
            }
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '!' => Tok::Not,
                '&' | '|' => {
                    let next = self.chars.get(self.pos + 1).map(|&(_, n)| n);
                    if next != Some(c) {
                        return Err(self.err(col, format!("expected '{c}{c}'")));
                    }
                    self.pos += 1;
                    if c == '&' {
                        Tok::And
                    } else {
                        Tok::Or
                    }
                }
                _ => {
                    let start = self.pos;
                    while self.pos < self.chars.len() && is_atom_char(self.chars[self.pos].1) {
                        self.pos += 1;
                    }
                    let text: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
                    out.push((col, Tok::Atom(text)));
                    continue;
                }
            };
            out.push((col, tok));
            self.pos += 1;
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    line: usize,
    col_offset: usize,
    end_col: usize,
}

impl Parser {
    fn err_at(&self, col: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.col_offset + col + 1,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|&(c, _)| c).unwrap_or(self.end_col)
    }

    fn parse_or(&mut self) -> Result<TypeFormula> {
        let mut lhs = self.parse_and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.parse_and()?;
            lhs = TypeFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<TypeFormula> {
        let mut lhs = self.parse_unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.parse_unary()?;
            lhs = TypeFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<TypeFormula> {
        if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            return Ok(TypeFormula::negate(self.parse_unary()?));
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> Result<TypeFormula> {
        let col = self.col();
        match self.toks.get(self.pos).cloned() {
            Some((_, Tok::LParen)) => {
                self.pos += 1;
                let inner = self.parse_or()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err_at(self.col(), "unbalanced parentheses: expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some((_, Tok::Atom(text))) => {
                self.pos += 1;
                parse_atom(&text).ok_or_else(|| self.err_at(col, format!("type pattern must start with '/': {text:?}")))
            }
            Some((_, tok)) => Err(self.err_at(col, format!("expected a type pattern, found {tok:?}"))),
            None => Err(self.err_at(col, "dangling operator: expected a type pattern")),
        }
    }
}

fn parse_atom(text: &str) -> Option<TypeFormula> {
    if text.trim_end_matches('*') == ALL_NON_OTHER_MACRO {
        return Some(TypeFormula::Atom(Atom::AllNonOther { raw: text.to_string() }));
    }
    text.starts_with('/').then(|| TypeFormula::pattern(text))
}

/// Parses a single formula. `line` and `col_offset` are used for diagnostics.
pub fn parse_formula(src: &str, line: usize, col_offset: usize) -> Result<TypeFormula> {
    let toks = Lexer::new(src, line, col_offset).tokens()?;
    let end_col = src.chars().count();
    let mut p = Parser {
        toks,
        pos: 0,
        line,
        col_offset,
        end_col,
    };
    if p.toks.is_empty() {
        return Err(p.err_at(end_col, "empty right-hand side"));
    }
    let f = p.parse_or()?;
    if p.pos < p.toks.len() {
        let col = p.col();
        let msg = if p.peek() == Some(&Tok::RParen) {
            "unbalanced parentheses: unexpected ')'".to_string()
        } else {
            format!("unexpected token {:?}", p.peek().unwrap())
        };
        return Err(p.err_at(col, msg));
    }
    Ok(f)
}

fn validate_target(target: &str, line: usize) -> Result<()> {
    if !target.starts_with('/') || depth(target) == 0 || target.chars().any(char::is_whitespace) {
        return Err(Error::Parse {
            line,
            column: 1,
            message: format!("target type must be a slash path: {target:?}"),
        });
    }
    Ok(())
}

/// Parses a type-definition file.
pub fn parse_typedefs(source: &str) -> Result<TypeDefinition> {
    let mut defs = TypeDefinition::default();
    for (i, raw_line) in source.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (target, rhs, col_offset) = match raw_line.find(":=") {
            Some(pos) => {
                let target = raw_line[..pos].trim();
                let col = raw_line[..pos + 2].chars().count();
                (target, &raw_line[pos + 2..], col)
            }
            None => {
                // A bare "TARGET PATTERN" pair is accepted as a rule with a warning.
                let fields: Vec<&str> = trimmed.split_whitespace().collect();
                if fields.len() == 2 && fields.iter().all(|f| f.starts_with('/')) {
                    defs.warnings.push(format!(
                        "line {line}: missing ':=' between {} and {}; read as a rule",
                        fields[0], fields[1]
                    ));
                    let head = raw_line.find(fields[0]).unwrap_or(0) + fields[0].len();
                    let col = raw_line[..head].chars().count();
                    (fields[0], &raw_line[head..], col)
                } else {
                    return Err(Error::Parse {
                        line,
                        column: 1,
                        message: "expected 'TARGET := EXPR'".into(),
                    });
                }
            }
        };
        validate_target(target, line)?;
        let formula = parse_formula(rhs, line, col_offset)?;
        defs.push_rule(
            TypeRule {
                target: target.to_string(),
                formula,
            },
            line,
        );
    }
    defs.finish();
    Ok(defs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conll_person_rule() {
        let d = parse_typedefs("/PER := /PEOPLE/PERSON").unwrap();
        assert_eq!(d.rules().len(), 1);
        assert_eq!(d.coarse_set().into_iter().collect::<Vec<_>>(), ["/PER"]);
        assert!(d.fine_set().is_empty());
        assert_eq!(d.apply(&["/people/person"]), BTreeSet::from(["/PER".to_string()]));
        assert!(d.apply::<&str>(&[]).is_empty());
    }

    #[test]
    fn or_of_two_atoms() {
        let d = parse_typedefs("/ART := /ART || /WRITTEN_WORK").unwrap();
        let expected = TypeFormula::or(TypeFormula::pattern("/ART"), TypeFormula::pattern("/WRITTEN_WORK"));
        assert!(d.rule("/ART").unwrap().same_as(&expected));
    }

    #[test]
    fn precedence_not_and_or() {
        let f = parse_formula("!/a && /b || /c", 1, 0).unwrap();
        let expected = TypeFormula::or(
            TypeFormula::and(
                TypeFormula::negate(TypeFormula::pattern("/a")),
                TypeFormula::pattern("/b"),
            ),
            TypeFormula::pattern("/c"),
        );
        assert!(f.same_as(&expected), "{f}");
    }

    #[test]
    fn left_associative() {
        let f = parse_formula("/a || /b || /c", 1, 0).unwrap();
        let expected = TypeFormula::or(
            TypeFormula::or(TypeFormula::pattern("/a"), TypeFormula::pattern("/b")),
            TypeFormula::pattern("/c"),
        );
        assert!(f.same_as(&expected));
    }

    #[test]
    fn parse_errors_carry_position() {
        for (src, col) in [
            ("/X := (/A || ", 14),
            ("/X := /A &&", 12),
            ("/X := ", 7),
            ("/X := /A )", 10),
            ("/X := /A & /B", 10),
        ] {
            match parse_typedefs(src) {
                Err(Error::Parse { line, column, .. }) => {
                    assert_eq!(line, 1, "{src}");
                    assert_eq!(column, col, "{src}");
                }
                other => panic!("{src}: expected parse error, got {other:?}"),
            }
        }
        assert!(parse_typedefs("/X := person").is_err());
        assert!(parse_typedefs("X := /person").is_err());
        assert!(matches!(
            parse_typedefs("# c\n\n/A := /a\n/B := (/b").unwrap_err(),
            Error::Parse { line: 4, .. }
        ));
    }

    #[test]
    fn later_rule_replaces_with_warning() {
        let d = parse_typedefs("/A := /x\n/A := /y").unwrap();
        assert_eq!(d.rules().len(), 1);
        assert!(d.rule("/A").unwrap().same_as(&TypeFormula::pattern("/y")));
        assert!(d.warnings().iter().any(|w| w.contains("replaces")));
    }

    #[test]
    fn missing_assign_typo_accepted() {
        let d = parse_typedefs("/PERSON/DOCTOR\t/MEDICINE/PHYSICIAN\t").unwrap();
        assert!(d.rule("/PERSON/DOCTOR").is_some());
        assert!(d.warnings().iter().any(|w| w.contains("missing ':='")));
    }

    #[test]
    fn glob_examples() {
        assert!(match_pattern("/*/MICROORGANISM/*", "/biology/microorganism/bacterium"));
        assert!(!match_pattern("/location/*", "/location"));
        assert!(match_pattern("/people/person", "/people/person"));
        assert!(!match_pattern("/people/person", "/people/person/x"));
        assert!(match_pattern("/a*", "/a"));
        assert!(match_pattern("*", ""));
    }

    #[test]
    fn vacuous_negation() {
        let d = TypeDefinition::default();
        let empty: [&str; 0] = [];
        assert!(!d.eval(&TypeFormula::pattern("/a"), &empty));
        assert!(d.eval(&TypeFormula::negate(TypeFormula::pattern("/a")), &empty));
    }

    #[test]
    fn compatibility() {
        assert!(is_compatible("/people/athlete", "/people"));
        assert!(!is_compatible("/organization/company", "/people"));
        assert!(is_compatible("/a/b/c", "/a"));
        assert!(!is_compatible("/a/b", "/a/b"));
    }

    #[test]
    fn split_by_depth() {
        let ts: BTreeSet<String> = ["/organization", "/organization/company", "/location"]
            .map(String::from)
            .into();
        let (c, f) = TypeDefinition::split_coarse_fine(&ts);
        assert_eq!(c.len(), 2);
        assert_eq!(f.len(), 1);
        let (c, f) = TypeDefinition::split_coarse_fine(&BTreeSet::new());
        assert!(c.is_empty() && f.is_empty());
    }

    #[test]
    fn macro_resolution_skips_other_and_negated_atoms() {
        let d =
            parse_typedefs("/A := /x/y && !/z\n/OTHER/ART := /film\n/OTHER := !ALL_TYPES_EXLUCDING_OTHER* || /OTHER*")
                .unwrap();
        let atoms: Vec<&str> = d.all_non_other().iter().map(|p| p.normalized()).collect();
        assert_eq!(atoms, ["/x/y*"]);
        assert_eq!(d.apply(&["/x/y"]), BTreeSet::from(["/A".to_string()]));
        assert_eq!(
            d.apply(&["/film"]),
            BTreeSet::from(["/OTHER".to_string(), "/OTHER/ART".to_string()])
        );
        assert_eq!(d.other_target(), Some("/OTHER"));
    }

    #[test]
    fn orphan_fine_type_warns() {
        let d = parse_typedefs("/GPE/CITY := /location/citytown").unwrap();
        assert!(d.warnings().iter().any(|w| w.contains("/GPE/CITY")));
    }
}
