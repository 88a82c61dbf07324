//! Independent reference implementations used as test oracles. Nothing in
//! here calls into the code paths it checks.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use regex::Regex;

// ---------------------------------------------------------------------------
// Type-definition oracle: regex globs and a shunting-yard evaluator.

/// Anchored, case-insensitive regex for a glob where `*` is `.*`.
pub fn glob_regex(pattern: &str) -> Regex {
    thread_local! {
        static CACHE: std::cell::RefCell<std::collections::HashMap<String, Regex>> = Default::default();
    }
    CACHE.with(|c| {
        c.borrow_mut()
            .entry(pattern.to_string())
            .or_insert_with(|| {
                let body: Vec<String> = pattern.split('*').map(regex::escape).collect();
                Regex::new(&format!("(?i)^{}$", body.join(".*"))).unwrap()
            })
            .clone()
    })
}

pub fn glob_oracle(pattern: &str, text: &str) -> bool {
    glob_regex(pattern).is_match(text)
}

#[derive(Debug, Clone)]
pub enum Expr {
    Atom(String),
    Macro,
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Fully parenthesized rendering in the rule syntax.
    pub fn render(&self) -> String {
        match self {
            Expr::Atom(a) => a.clone(),
            Expr::Macro => "ALL_TYPES_EXLUCDING_OTHER*".into(),
            Expr::Not(e) => format!("!({})", e.render()),
            Expr::And(a, b) => format!("({}) && ({})", a.render(), b.render()),
            Expr::Or(a, b) => format!("({}) || ({})", a.render(), b.render()),
        }
    }

    /// Minimal rendering that relies on precedence (NOT > AND > OR).
    pub fn render_min(&self) -> String {
        fn prec(e: &Expr) -> u8 {
            match e {
                Expr::Or(..) => 1,
                Expr::And(..) => 2,
                Expr::Not(_) => 3,
                _ => 4,
            }
        }
        fn wrap(e: &Expr, min: u8) -> String {
            if prec(e) < min {
                format!("({})", e.render_min())
            } else {
                e.render_min()
            }
        }
        match self {
            Expr::Atom(_) | Expr::Macro => self.render(),
            Expr::Not(e) => format!("!{}", wrap(e, 3)),
            Expr::And(a, b) => format!("{} && {}", wrap(a, 2), wrap(b, 3)),
            Expr::Or(a, b) => format!("{} || {}", wrap(a, 1), wrap(b, 2)),
        }
    }

    fn positive_atoms(&self, negated: bool, out: &mut Vec<String>) {
        match self {
            Expr::Atom(a) if !negated => out.push(a.clone()),
            Expr::Atom(_) | Expr::Macro => {}
            Expr::Not(e) => e.positive_atoms(!negated, out),
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.positive_atoms(negated, out);
                b.positive_atoms(negated, out);
            }
        }
    }

    pub fn eval(&self, prims: &[String], macro_atoms: &[String]) -> bool {
        match self {
            Expr::Atom(a) => {
                let re = glob_regex(a);
                prims.iter().any(|p| re.is_match(p))
            }
            Expr::Macro => macro_atoms.iter().any(|a| {
                let re = glob_regex(&format!("{}*", a.trim_end_matches('*')));
                prims.iter().any(|p| re.is_match(p))
            }),
            Expr::Not(e) => !e.eval(prims, macro_atoms),
            Expr::And(a, b) => a.eval(prims, macro_atoms) && b.eval(prims, macro_atoms),
            Expr::Or(a, b) => a.eval(prims, macro_atoms) || b.eval(prims, macro_atoms),
        }
    }
}

/// Shunting-yard parse of a rule body into [`Expr`].
pub fn oracle_parse(src: &str) -> Expr {
    let tok_re = Regex::new(r"\(|\)|!|&&|\|\||[^\s()!&|]+").unwrap();
    let toks: Vec<&str> = tok_re.find_iter(src).map(|m| m.as_str()).collect();
    let prec = |op: &str| match op {
        "!" => 3,
        "&&" => 2,
        "||" => 1,
        _ => 0,
    };
    let mut out: Vec<Expr> = Vec::new();
    let mut ops: Vec<&str> = Vec::new();
    fn apply(op: &str, out: &mut Vec<Expr>) {
        match op {
            "!" => {
                let e = out.pop().unwrap();
                out.push(Expr::Not(Box::new(e)));
            }
            "&&" | "||" => {
                let b = out.pop().unwrap();
                let a = out.pop().unwrap();
                out.push(if op == "&&" {
                    Expr::And(Box::new(a), Box::new(b))
                } else {
                    Expr::Or(Box::new(a), Box::new(b))
                });
            }
            _ => unreachable!(),
        }
    }
    for t in toks {
        match t {
            "(" | "!" => ops.push(t),
            ")" => {
                while let Some(op) = ops.pop() {
                    if op == "(" {
                        break;
                    }
                    apply(op, &mut out);
                }
                while ops.last() == Some(&"!") {
                    apply(ops.pop().unwrap(), &mut out);
                }
            }
            "&&" | "||" => {
                while let Some(&top) = ops.last() {
                    if top != "(" && prec(top) >= prec(t) {
                        apply(ops.pop().unwrap(), &mut out);
                    } else {
                        break;
                    }
                }
                ops.push(t);
            }
            atom => {
                out.push(if atom.trim_end_matches('*') == "ALL_TYPES_EXLUCDING_OTHER" {
                    Expr::Macro
                } else {
                    Expr::Atom(atom.to_string())
                });
                while ops.last() == Some(&"!") {
                    apply(ops.pop().unwrap(), &mut out);
                }
            }
        }
    }
    while let Some(op) = ops.pop() {
        apply(op, &mut out);
    }
    assert_eq!(out.len(), 1, "oracle could not parse {src:?}");
    out.pop().unwrap()
}

/// Oracle for a whole definition file: target → formula, later lines win.
pub struct OracleDefs {
    pub rules: Vec<(String, Expr)>,
    pub macro_atoms: Vec<String>,
}

impl OracleDefs {
    pub fn parse(src: &str) -> Self {
        let mut rules: Vec<(String, Expr)> = Vec::new();
        for line in src.lines() {
            let l = line.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let (target, body) = match l.split_once(":=") {
                Some((t, b)) => (t.trim().to_string(), b.to_string()),
                None => {
                    let mut it = l.split_whitespace();
                    (it.next().unwrap().to_string(), it.next().unwrap().to_string())
                }
            };
            let e = oracle_parse(&body);
            if let Some(r) = rules.iter_mut().find(|r| r.0 == target) {
                r.1 = e;
            } else {
                rules.push((target, e));
            }
        }
        let mut macro_atoms = Vec::new();
        for (t, e) in &rules {
            let head = t.trim_start_matches('/').split('/').next().unwrap_or("");
            if !head.eq_ignore_ascii_case("other") {
                e.positive_atoms(false, &mut macro_atoms);
            }
        }
        OracleDefs { rules, macro_atoms }
    }

    pub fn apply(&self, prims: &[&str]) -> BTreeSet<String> {
        let prims: Vec<String> = prims.iter().map(|s| s.to_string()).collect();
        self.rules
            .iter()
            .filter(|(_, e)| e.eval(&prims, &self.macro_atoms))
            .map(|(t, _)| t.clone())
            .collect()
    }
}

// ---------------------------------------------------------------------------
// ESA oracle: direct double loop over sentences.

pub struct RawSentence {
    pub tokens: Vec<String>,
    pub concept: Option<String>,
}

pub struct EsaOracle {
    /// word → concept → score
    pub scores: BTreeMap<String, BTreeMap<String, f64>>,
}

impl EsaOracle {
    pub fn build(sentences: &[RawSentence]) -> Self {
        let n = sentences.len();
        let lowered: Vec<Vec<String>> = sentences
            .iter()
            .map(|s| s.tokens.iter().map(|t| t.to_lowercase()).collect())
            .collect();
        let mut vocab = BTreeSet::new();
        for toks in &lowered {
            vocab.extend(toks.iter().cloned());
        }
        let mut scores = BTreeMap::new();
        for w in &vocab {
            let df = lowered.iter().filter(|toks| toks.contains(w)).count();
            let idf = (n as f64 / df as f64).ln();
            let mut per_concept: BTreeMap<String, f64> = BTreeMap::new();
            for (s, toks) in sentences.iter().zip(&lowered) {
                let Some(c) = &s.concept else { continue };
                let tf = toks.iter().filter(|t| *t == w).count();
                if tf == 0 {
                    continue;
                }
                *per_concept.entry(c.clone()).or_insert(0.0) += tf as f64 * idf;
            }
            per_concept.retain(|_, v| *v > 0.0);
            if !per_concept.is_empty() {
                scores.insert(w.clone(), per_concept);
            }
        }
        EsaOracle { scores }
    }

    pub fn score(&self, word: &str, concept: &str) -> f64 {
        self.scores
            .get(&word.to_lowercase())
            .and_then(|m| m.get(concept))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn ranking(&self, query: &[String], ell: usize) -> Vec<(String, f64)> {
        let mut agg: BTreeMap<String, f64> = BTreeMap::new();
        for tok in query {
            if let Some(m) = self.scores.get(&tok.to_lowercase()) {
                for (c, s) in m {
                    *agg.entry(c.clone()).or_insert(0.0) += s;
                }
            }
        }
        let mut v: Vec<(String, f64)> = agg.into_iter().collect();
        v.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        v.truncate(ell);
        v
    }
}

// ---------------------------------------------------------------------------
// Straight-line transcription of the inference rule.

pub type TargetMap = BTreeMap<String, BTreeSet<String>>;

#[derive(Debug, Clone, PartialEq)]
pub struct RefOutput {
    pub coarse: Option<String>,
    pub fine: Vec<String>,
    pub used_surface: bool,
}

#[derive(Debug, Default, Clone, Copy)]
pub struct RefBranches {
    pub prior_hi_tau_some: bool,
    pub prior_hi_tau_none: bool,
    pub prior_lo_tau_some: bool,
    pub prior_lo_tau_none: bool,
    pub filtered_empty: bool,
}

pub struct RefInput<'a> {
    pub t: &'a TargetMap,
    pub c_esa: &'a [String],
    pub c_elmo: &'a [(String, f64)],
    pub surf: Option<(&'a str, f64)>,
    pub lambda: f64,
    pub eta_s: f64,
    pub eta_c: f64,
    pub fallback: Option<&'a str>,
}

fn depth(t: &str) -> usize {
    t.split('/').filter(|s| !s.is_empty()).count()
}

fn head(t: &str) -> &str {
    t.split('/').find(|s| !s.is_empty()).unwrap_or("")
}

pub fn reference_infer(inp: &RefInput) -> (RefOutput, RefBranches) {
    let mut br = RefBranches::default();
    let empty = BTreeSet::new();
    let types_of = |c: &str| inp.t.get(c).unwrap_or(&empty);
    let count = |t: &str, coll: &[&str]| coll.iter().filter(|c| types_of(c).contains(t)).count();
    let r = |t: &str, tp: &str, a: &[&str], b: &[&str]| -> f64 {
        let x = count(t, a) as f64 / a.len() as f64;
        let y = count(tp, b) as f64 / b.len() as f64;
        if y == 0.0 {
            if x > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            x / y
        }
    };
    let fallback = RefOutput {
        coarse: inp.fallback.map(String::from),
        fine: vec![],
        used_surface: false,
    };
    if inp.c_esa.is_empty() || inp.c_elmo.is_empty() {
        return (fallback, br);
    }
    let esa: Vec<&str> = inp.c_esa.iter().map(|s| s.as_str()).collect();
    let elmo: Vec<&str> = inp.c_elmo.iter().map(|(c, _)| c.as_str()).collect();

    let select_coarse = |c: &str| -> Option<String> {
        let mut best: Option<(String, f64, usize)> = None;
        let coarse: Vec<&String> = types_of(c).iter().filter(|t| depth(t) == 1).collect();
        for t in coarse {
            let mut vote = 0.0;
            for (cc, cons) in inp.c_elmo {
                if types_of(cc).contains(t) {
                    vote += cons;
                }
            }
            let n = count(t, &elmo);
            let replace = match &best {
                None => true,
                Some((bt, bv, bn)) => vote > *bv || (vote == *bv && (n > *bn || (n == *bn && t < bt))),
            };
            if replace {
                best = Some((t.clone(), vote, n));
            }
        }
        best.map(|b| b.0)
    };

    let mut tau_surf = vec![];
    if let Some((cs, _)) = inp.surf {
        for t in types_of(cs).iter().filter(|t| depth(t) == 1) {
            if r(t, t, &elmo, &esa) > 1.0 {
                tau_surf.push(t.clone());
            }
        }
    }
    if let Some((_, p)) = inp.surf {
        match (p >= inp.lambda, !tau_surf.is_empty()) {
            (true, true) => br.prior_hi_tau_some = true,
            (true, false) => br.prior_hi_tau_none = true,
            (false, true) => br.prior_lo_tau_some = true,
            (false, false) => br.prior_lo_tau_none = true,
        }
    }

    if let Some((cs, p)) = inp.surf {
        if p >= inp.lambda && !tau_surf.is_empty() {
            let coarse = select_coarse(cs).unwrap();
            let mut c_tilde: Vec<&str> = vec![cs];
            for c in &elmo {
                if *c != cs {
                    c_tilde.push(c);
                }
            }
            let mut fine = vec![];
            for tf in types_of(cs).iter().filter(|t| depth(t) >= 2) {
                if head(tf) == head(&coarse) && r(tf, &coarse, &c_tilde, &c_tilde) >= inp.eta_s {
                    fine.push(tf.clone());
                }
            }
            fine.sort();
            return (
                RefOutput {
                    coarse: Some(coarse),
                    fine,
                    used_surface: true,
                },
                br,
            );
        }
    }

    let mut c_elmo_tilde: Vec<&(String, f64)> = vec![];
    for entry in inp.c_elmo {
        let ok = types_of(&entry.0)
            .iter()
            .filter(|t| depth(t) == 1)
            .any(|t| r(t, t, &elmo, &esa) > 1.0);
        if ok {
            c_elmo_tilde.push(entry);
        }
    }
    let pool: Vec<&(String, f64)> = if c_elmo_tilde.is_empty() {
        br.filtered_empty = true;
        inp.c_elmo.iter().collect()
    } else {
        c_elmo_tilde
    };
    let mut best = pool[0];
    for e in &pool {
        if e.1 > best.1 {
            best = e;
        }
    }
    let Some(coarse) = select_coarse(&best.0) else {
        return (fallback, br);
    };
    let mut fine_cands: BTreeSet<&String> = BTreeSet::new();
    for c in &elmo {
        for t in types_of(c).iter().filter(|t| depth(t) >= 2) {
            fine_cands.insert(t);
        }
    }
    let mut fine = vec![];
    for tf in fine_cands {
        if head(tf) == head(&coarse) && r(tf, &coarse, &elmo, &elmo) >= inp.eta_c {
            fine.push(tf.clone());
        }
    }
    (
        RefOutput {
            coarse: Some(coarse),
            fine,
            used_surface: false,
        },
        br,
    )
}

// ---------------------------------------------------------------------------
// Metrics oracle: formulas evaluated with plain loops over explicit sets.

pub struct RefMetrics {
    pub strict: f64,
    pub macro_p: f64,
    pub macro_r: f64,
    pub micro_p: f64,
    pub micro_r: f64,
    pub type_macro_p: f64,
    pub type_macro_r: f64,
    pub type_micro_p: f64,
    pub type_micro_r: f64,
}

pub fn reference_metrics(golds: &[BTreeSet<String>], preds: &[BTreeSet<String>]) -> RefMetrics {
    let m = golds.len() as f64;
    let mut exact = 0.0;
    let (mut mp, mut mr) = (0.0, 0.0);
    let (mut inter, mut sp, mut sg) = (0.0, 0.0, 0.0);
    for i in 0..golds.len() {
        let g = &golds[i];
        let p = &preds[i];
        if g == p {
            exact += 1.0;
        }
        let mut k = 0.0;
        for t in p {
            if g.contains(t) {
                k += 1.0;
            }
        }
        if !p.is_empty() {
            mp += k / p.len() as f64;
        }
        if !g.is_empty() {
            mr += k / g.len() as f64;
        }
        inter += k;
        sp += p.len() as f64;
        sg += g.len() as f64;
    }
    let mut all_types: BTreeSet<&String> = BTreeSet::new();
    for s in golds.iter().chain(preds) {
        all_types.extend(s.iter());
    }
    let gt = |t: &String| golds.iter().filter(|g| g.contains(t)).count() as f64;
    let pt = |t: &String| preds.iter().filter(|p| p.contains(t)).count() as f64;
    let ct = |t: &String| {
        golds
            .iter()
            .zip(preds)
            .filter(|(g, p)| g.contains(t) && p.contains(t))
            .count() as f64
    };
    let sum_g: f64 = all_types.iter().map(|t| gt(t)).sum();
    let sum_p: f64 = all_types.iter().map(|t| pt(t)).sum();
    let sum_c: f64 = all_types.iter().map(|t| ct(t)).sum();
    let (mut tmp, mut tmr) = (0.0, 0.0);
    for t in &all_types {
        let (g, p, c) = (gt(t), pt(t), ct(t));
        if p > 0.0 && sum_g > 0.0 {
            tmp += (c / p) * (g / sum_g);
        }
        if g > 0.0 && sum_p > 0.0 {
            tmr += (c / g) * (p / sum_p);
        }
    }
    let div = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
    RefMetrics {
        strict: exact / m,
        macro_p: mp / m,
        macro_r: mr / m,
        micro_p: div(inter, sp),
        micro_r: div(inter, sg),
        type_macro_p: tmp,
        type_macro_r: tmr,
        type_micro_p: div(sum_c, sum_p),
        type_micro_r: div(sum_c, sum_g),
    }
}

pub fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

// ---------------------------------------------------------------------------
// Random instances of the inference rule, realized through identity rules.

pub mod alg1 {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::Rng;
    use typeground::corpus::ConceptTypeTable;
    use typeground::encoder::RankedConcept;
    use typeground::esa::ScoredConcept;
    use typeground::inference::{infer_from_candidates, Candidates, Fallback, InferenceParams, TypePrediction};
    use typeground::prior::SurfaceConcept;
    use typeground::typedef::{parse_typedefs, ConceptTargets};

    #[derive(Debug, Clone)]
    pub struct Instance {
        pub types: TargetMap,
        pub c_esa: Vec<String>,
        pub c_elmo: Vec<(String, f64)>,
        pub surf: Option<(String, f64)>,
        pub lambda: f64,
        pub eta_s: f64,
        pub eta_c: f64,
        pub fallback: Option<String>,
    }

    const COARSE: [&str; 4] = ["/a", "/b", "/c", "/d"];

    pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
        let n_coarse = rng.gen_range(1..=4);
        let n_fine = rng.gen_range(1..=12 - n_coarse);
        let mut pool: Vec<String> = COARSE[..n_coarse].iter().map(|s| s.to_string()).collect();
        for k in 0..n_fine {
            pool.push(format!("{}/f{k}", COARSE[rng.gen_range(0..4)]));
        }
        let n_concepts = rng.gen_range(1..=20);
        let density = [0.15, 0.3, 0.5][rng.gen_range(0..3)];
        let mut types = TargetMap::new();
        let names: Vec<String> = (0..n_concepts).map(|i| format!("k{i}")).collect();
        for name in &names {
            let set: BTreeSet<String> = pool.iter().filter(|_| rng.gen_bool(density)).cloned().collect();
            types.insert(name.clone(), set);
        }

        let mut order = names.clone();
        order.shuffle(rng);
        let n_esa = if rng.gen_bool(0.02) {
            0
        } else {
            rng.gen_range(1..=n_concepts)
        };
        let c_esa: Vec<String> = order[..n_esa].to_vec();
        let n_elmo = match n_esa {
            0 => 0,
            n if rng.gen_bool(0.25) => n,
            n => rng.gen_range(1..=n),
        };
        let mut picked: Vec<usize> = (0..n_esa).collect();
        picked.shuffle(rng);
        picked.truncate(n_elmo);
        let mut c_elmo: Vec<(usize, String, f64)> = picked
            .into_iter()
            .map(|i| (i, c_esa[i].clone(), rng.gen_range(1..=9) as f64 / 10.0))
            .collect();
        c_elmo.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.cmp(&b.0)));
        let c_elmo = c_elmo.into_iter().map(|(_, c, s)| (c, s)).collect();

        let surf = if rng.gen_bool(0.85) {
            let c = names[rng.gen_range(0..n_concepts)].clone();
            let p = [0.1, 0.3, 0.5, 0.6, 0.9, 1.0][rng.gen_range(0..6)];
            Some((c, p))
        } else {
            None
        };
        Instance {
            types,
            c_esa,
            c_elmo,
            surf,
            lambda: [0.3, 0.5, 0.7][rng.gen_range(0..3)],
            eta_s: [0.5, 0.8, 1.0][rng.gen_range(0..3)],
            eta_c: [0.2, 0.3, 0.5, 1.0][rng.gen_range(0..4)],
            fallback: if rng.gen_bool(0.5) { Some("/other".into()) } else { None },
        }
    }

    impl Instance {
        pub fn params(&self) -> InferenceParams {
            InferenceParams {
                lambda: self.lambda,
                eta_s: self.eta_s,
                eta_c: self.eta_c,
                ..InferenceParams::default()
            }
        }

        pub fn reference(&self) -> (RefOutput, RefBranches) {
            reference_infer(&RefInput {
                t: &self.types,
                c_esa: &self.c_esa,
                c_elmo: &self.c_elmo,
                surf: self.surf.as_ref().map(|(c, p)| (c.as_str(), *p)),
                lambda: self.lambda,
                eta_s: self.eta_s,
                eta_c: self.eta_c,
                fallback: self.fallback.as_deref(),
            })
        }

        /// Runs the library with `T(c)` obtained from identity rules over a
        /// primitive type table.
        pub fn run(&self) -> TypePrediction {
            let all: BTreeSet<&String> = self.types.values().flatten().collect();
            let src: String = all.iter().map(|t| format!("{t} := {t}\n")).collect();
            let defs = parse_typedefs(&src).unwrap();
            let mut table = ConceptTypeTable::new();
            for (c, ts) in &self.types {
                if !ts.is_empty() {
                    table.insert(c, ts.iter().cloned()).unwrap();
                }
            }
            let targets = ConceptTargets::build(&defs, &table);
            let n = self.c_esa.len();
            let cands = Candidates {
                c_esa: self
                    .c_esa
                    .iter()
                    .enumerate()
                    .map(|(i, c)| ScoredConcept {
                        concept: c.clone(),
                        score: (n - i) as f64,
                    })
                    .collect(),
                c_elmo: self
                    .c_elmo
                    .iter()
                    .map(|(c, s)| RankedConcept {
                        concept: c.clone(),
                        consistency: *s,
                    })
                    .collect(),
                surface: self.surf.as_ref().map(|(c, p)| SurfaceConcept {
                    concept: c.clone(),
                    probability: *p,
                }),
                surface_consistency: None,
            };
            let fallback = match &self.fallback {
                Some(t) => Fallback::Target(t.clone()),
                None => Fallback::Abstain,
            };
            infer_from_candidates(&cands, &self.params(), &targets, &fallback)
        }
    }

    pub fn as_ref_output(p: &TypePrediction) -> RefOutput {
        RefOutput {
            coarse: p.coarse.clone(),
            fine: p.fine.clone(),
            used_surface: p.used_surface,
        }
    }
}
