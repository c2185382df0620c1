//! Proof obligations as TPTP problem files (typed first-order form, TFF).
//!
//! Individuals and pluralities become the sorts `ind` and `pl`, with plural
//! membership as the predicate `mem`. Plural term formers are function
//! symbols constrained by their defining biconditionals. There is no
//! comprehension schema: a problem assumes only the instances its sentences
//! need, so it stays first-order at the price of being weaker than full
//! plural logic.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::structures::Kind;
use crate::syntax::{Formula, NamedFormula, Quantifier, Term};
use crate::theory::{self, Theory};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("no lemma named `{0}`")]
    UnknownName(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Comprehension instances a problem may assume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Instance {
    /// `x in I(y) <-> x = y`
    Singleton,
    /// `x in YY + ZZ <-> x in YY or x in ZZ`
    Union,
    /// `x in YY & ZZ <-> x in YY and x in ZZ`
    Intersection,
    /// Components through fusion: members of pluralities fusing to members.
    ComponentsByFusion,
    /// Components through parthood: parts of members.
    ComponentsByPart,
    /// `u in zzstar(ZZ, x) <-> P(u, x) and u in U(ZZ)`, the plurality used
    /// when deriving composition from parthood.
    PartsWithin,
}

impl Instance {
    pub fn name(self) -> &'static str {
        match self {
            Instance::Singleton => "I",
            Instance::Union => "union",
            Instance::Intersection => "intersection",
            Instance::ComponentsByFusion => "U_F",
            Instance::ComponentsByPart => "U_P",
            Instance::PartsWithin => "zzstar",
        }
    }

    fn axiom(self) -> (&'static str, &'static str) {
        match self {
            Instance::Singleton => ("instance_I", "![X:ind, Y:ind]: (mem(X, single(Y)) <=> X = Y)"),
            Instance::Union => {
                ("instance_union", "![X:ind, YY:pl, ZZ:pl]: (mem(X, union(YY, ZZ)) <=> (mem(X, YY) | mem(X, ZZ)))")
            }
            Instance::Intersection => (
                "instance_intersection",
                "![X:ind, YY:pl, ZZ:pl]: (mem(X, inter(YY, ZZ)) <=> (mem(X, YY) & mem(X, ZZ)))",
            ),
            Instance::ComponentsByFusion => (
                "instance_U_F",
                "![X:ind, ZZ:pl]: (mem(X, comp(ZZ)) <=> ?[Z:ind]: (mem(Z, ZZ) & ?[YY:pl]: (f(YY, Z) & mem(X, YY))))",
            ),
            Instance::ComponentsByPart => {
                ("instance_U_P", "![X:ind, ZZ:pl]: (mem(X, comp(ZZ)) <=> ?[Y:ind]: (mem(Y, ZZ) & p(X, Y)))")
            }
            Instance::PartsWithin => {
                ("instance_zzstar", "![U:ind, ZZ:pl, X:ind]: (mem(U, zzstar(ZZ, X)) <=> (p(U, X) & mem(U, comp(ZZ))))")
            }
        }
    }
}

/// Defined predicates, stated over the primitive of the problem's side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Definition {
    PartFromFusion,
    FusionFromPart,
    Overlap,
    ProperPart,
}

impl Definition {
    fn axiom(self) -> (&'static str, &'static str) {
        match self {
            Definition::PartFromFusion => {
                ("def_P_by_F", "![X:ind, Y:ind]: (p(X, Y) <=> ?[ZZ:pl]: (f(ZZ, Y) & mem(X, ZZ)))")
            }
            Definition::FusionFromPart => (
                "def_F_by_P",
                "![ZZ:pl, X:ind]: (f(ZZ, X) <=> (![Y:ind]: (mem(Y, ZZ) => p(Y, X)) \
                 & ![Y:ind]: (p(Y, X) => ?[Z:ind]: (mem(Z, ZZ) & o(Z, Y)))))",
            ),
            Definition::Overlap => ("def_O", "![X:ind, Y:ind]: (o(X, Y) <=> ?[Z:ind]: (p(Z, X) & p(Z, Y)))"),
            Definition::ProperPart => ("def_PP", "![X:ind, Y:ind]: (pp(X, Y) <=> (p(X, Y) & X != Y))"),
        }
    }
}

const EMPTY_AXIOM: (&str, &str) = ("empty_plurality", "![X:ind]: ~mem(X, empty)");
const EXTENSIONALITY_AXIOM: (&str, &str) =
    ("plural_extensionality", "![XX:pl, YY:pl]: ((![Z:ind]: (mem(Z, XX) <=> mem(Z, YY))) => XX = YY)");

/// Symbols and plural quantifiers met while encoding.
#[derive(Debug, Default, Clone)]
struct Usage {
    symbols: BTreeSet<&'static str>,
    plural_quantifier: bool,
}

struct Encoder<'a> {
    usage: &'a mut Usage,
    fresh: usize,
}

impl Encoder<'_> {
    fn ind(x: &str) -> String {
        format!("I_{x}")
    }

    fn pl(xx: &str) -> String {
        format!("L_{xx}")
    }

    fn term(&mut self, t: &Term) -> String {
        match t {
            Term::Var(v) => Self::pl(v),
            Term::Singleton(x) => {
                self.usage.symbols.insert("single");
                format!("single({})", Self::ind(x))
            }
            Term::Union(a, b) => {
                self.usage.symbols.insert("union");
                format!("union({}, {})", self.term(a), self.term(b))
            }
            Term::Intersection(a, b) => {
                self.usage.symbols.insert("inter");
                format!("inter({}, {})", self.term(a), self.term(b))
            }
            Term::Components(a) => {
                self.usage.symbols.insert("comp");
                format!("comp({})", self.term(a))
            }
        }
    }

    fn mem(&mut self, x: String, t: String) -> String {
        self.usage.symbols.insert("mem");
        format!("mem({x}, {t})")
    }

    fn fresh(&mut self) -> String {
        self.fresh += 1;
        format!("S_{}", self.fresh)
    }

    /// `A sub B` (or `A eq B` when `both`) with a fresh bound individual.
    fn inclusion(&mut self, a: &Term, b: &Term, both: bool) -> String {
        let (a, b) = (self.term(a), self.term(b));
        let z = self.fresh();
        let left = self.mem(z.clone(), a);
        let right = self.mem(z.clone(), b);
        let op = if both { "<=>" } else { "=>" };
        format!("![{z}:ind]: ({left} {op} {right})")
    }

    fn pred(&mut self, name: &'static str, args: &[&str]) -> String {
        self.usage.symbols.insert(name);
        let args: Vec<_> = args.iter().map(|a| Self::ind(a)).collect();
        format!("{name}({})", args.join(", "))
    }

    fn formula(&mut self, f: &Formula) -> String {
        match f {
            Formula::Equal(x, y) => format!("{} = {}", Self::ind(x), Self::ind(y)),
            Formula::Member(x, t) => {
                let t = self.term(t);
                self.mem(Self::ind(x), t)
            }
            Formula::Included(a, b) => self.inclusion(a, b, false),
            Formula::Coextensive(a, b) => self.inclusion(a, b, true),
            Formula::Fuses(t, x) => {
                self.usage.symbols.insert("f");
                format!("f({}, {})", self.term(t), Self::ind(x))
            }
            Formula::Part(x, y) => self.pred("p", &[x, y]),
            Formula::ProperPart(x, y) => self.pred("pp", &[x, y]),
            Formula::Overlap(x, y) => self.pred("o", &[x, y]),
            Formula::Not(g) => format!("~({})", self.formula(g)),
            Formula::And(a, b) => format!("({} & {})", self.formula(a), self.formula(b)),
            Formula::Or(a, b) => format!("({} | {})", self.formula(a), self.formula(b)),
            Formula::Implies(a, b) => format!("({} => {})", self.formula(a), self.formula(b)),
            Formula::Iff(a, b) => format!("({} <=> {})", self.formula(a), self.formula(b)),
            Formula::Individual { quantifier, var, within, body } => {
                let v = Self::ind(var);
                let guard = within.as_ref().map(|t| {
                    let t = self.term(t);
                    self.mem(v.clone(), t)
                });
                self.quantified(*quantifier, format!("{v}:ind"), guard, body)
            }
            Formula::Plural { quantifier, var, within, body } => {
                self.usage.plural_quantifier = true;
                let guard = within.as_ref().map(|t| self.inclusion(&Term::var(var.clone()), t, false));
                self.quantified(*quantifier, format!("{}:pl", Self::pl(var)), guard, body)
            }
        }
    }

    fn quantified(&mut self, q: Quantifier, binder: String, guard: Option<String>, body: &Formula) -> String {
        let body = self.formula(body);
        let (sym, join) = match q {
            Quantifier::Forall => ("!", "=>"),
            Quantifier::Exists => ("?", "&"),
        };
        match guard {
            Some(g) => format!("{sym}[{binder}]: ({g} {join} {body})"),
            None => format!("{sym}[{binder}]: {body}"),
        }
    }
}

fn encode_with(f: &Formula, usage: &mut Usage) -> String {
    Encoder { usage, fresh: 0 }.formula(f)
}

/// TFF rendering of a formula. Individual variables become `I_x`, plural
/// ones `L_XX`; inclusion and coextension are expanded with fresh `S_k`.
pub fn encode(f: &Formula) -> String {
    encode_with(f, &mut Usage::default())
}

/// A self-contained problem: the conjecture, the axioms of a theory, and
/// every definition and comprehension instance those sentences rely on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    pub name: String,
    pub anchor: String,
    pub theory: String,
    pub kind: Kind,
    /// Named TFF formulas in problem order, conjecture excluded.
    pub axioms: Vec<(String, String)>,
    pub instances: Vec<Instance>,
    pub conjecture: String,
    symbols: BTreeSet<&'static str>,
}

impl Obligation {
    /// The problem file text.
    pub fn to_tptp(&self) -> String {
        let mut out = String::new();
        let instances: Vec<_> = self.instances.iter().map(|i| i.name()).collect();
        let _ = writeln!(out, "% Problem  : {}", self.name);
        let _ = writeln!(out, "% Anchor   : {}", self.anchor);
        let _ = writeln!(out, "% Theory   : {} ({} primitive)", self.theory, self.kind);
        let _ = writeln!(
            out,
            "% Instances: {}",
            if instances.is_empty() { "none".to_string() } else { instances.join(", ") }
        );
        let _ = writeln!(out, "% Axioms   : {}", self.axioms.len());
        out.push_str(
            "% Encoding : pluralities are the sort pl with membership mem. Only the\n\
             %            comprehension instances listed above are assumed, so the\n\
             %            problem is first-order and weaker than full plural logic.\n\n",
        );
        out.push_str("tff(ind_type, type, ind: $tType).\ntff(pl_type, type, pl: $tType).\n");
        for (symbol, signature) in DECLARATIONS {
            if self.symbols.contains(symbol) {
                let _ = writeln!(out, "tff({symbol}_type, type, {symbol}: {signature}).");
            }
        }
        out.push('\n');
        for (name, text) in &self.axioms {
            let _ = writeln!(out, "tff({}, axiom, {}).", formula_name(name), text);
        }
        let _ = writeln!(out, "\ntff({}, conjecture, {}).", formula_name(&self.name), self.conjecture);
        out
    }

    /// The file name used by [`write_all`].
    pub fn file_name(&self) -> String {
        format!("{}.p", self.name)
    }
}

const DECLARATIONS: [(&str, &str); 11] = [
    ("mem", "(ind * pl) > $o"),
    ("f", "(pl * ind) > $o"),
    ("p", "(ind * ind) > $o"),
    ("pp", "(ind * ind) > $o"),
    ("o", "(ind * ind) > $o"),
    ("single", "ind > pl"),
    ("union", "(pl * pl) > pl"),
    ("inter", "(pl * pl) > pl"),
    ("comp", "pl > pl"),
    ("zzstar", "(pl * ind) > pl"),
    ("empty", "pl"),
];

fn formula_name(name: &str) -> String {
    let plain = name.chars().next().is_some_and(|c| c.is_ascii_lowercase())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain {
        name.to_string()
    } else {
        format!("'{}'", name.replace('\\', "\\\\").replace('\'', "\\'"))
    }
}

/// Symbols an axiom text mentions, found by name.
fn symbols_in(text: &str) -> BTreeSet<&'static str> {
    let word = |c: Option<char>| c.is_some_and(|c| c.is_ascii_alphanumeric() || c == '_');
    DECLARATIONS
        .iter()
        .map(|(symbol, _)| *symbol)
        .filter(|symbol| {
            text.match_indices(symbol)
                .any(|(i, _)| !word(text[..i].chars().next_back()) && !word(text[i + symbol.len()..].chars().next()))
        })
        .collect()
}

/// Builds the problem of proving `conjecture` from the axioms of `t`.
pub fn emit_obligation(name: &str, t: &Theory, conjecture: &NamedFormula) -> Obligation {
    let mut usage = Usage::default();
    let mut axioms: Vec<(String, String)> =
        t.obligations.iter().map(|o| (o.name.clone(), encode_with(&o.sentence, &mut usage))).collect();
    let conjecture_text = encode_with(&conjecture.sentence, &mut usage);
    let conjecture_uses_components = {
        let mut found = false;
        conjecture.sentence.visit_terms(&mut |t| found |= matches!(t, Term::Components(_)));
        found
    };

    let mut symbols = usage.symbols.clone();
    let mut instances = BTreeSet::new();
    let mut definitions = BTreeSet::new();
    // Close under what definitions and instances themselves mention.
    loop {
        let before = (instances.len(), definitions.len());
        if symbols.contains("single") {
            instances.insert(Instance::Singleton);
        }
        if symbols.contains("union") {
            instances.insert(Instance::Union);
        }
        if symbols.contains("inter") {
            instances.insert(Instance::Intersection);
        }
        if symbols.contains("comp") {
            instances.insert(match t.kind {
                Kind::Fusion => Instance::ComponentsByFusion,
                Kind::Part => Instance::ComponentsByPart,
            });
        }
        if t.kind == Kind::Part && conjecture_uses_components {
            instances.insert(Instance::PartsWithin);
        }
        if symbols.contains("pp") {
            definitions.insert(Definition::ProperPart);
        }
        if symbols.contains("o") {
            definitions.insert(Definition::Overlap);
        }
        match t.kind {
            Kind::Fusion if symbols.contains("p") => {
                definitions.insert(Definition::PartFromFusion);
            }
            Kind::Part if symbols.contains("f") => {
                definitions.insert(Definition::FusionFromPart);
            }
            _ => {}
        }
        for i in &instances {
            symbols.extend(symbols_in(i.axiom().1));
        }
        for d in &definitions {
            symbols.extend(symbols_in(d.axiom().1));
        }
        if (instances.len(), definitions.len()) == before {
            break;
        }
    }

    let plural = usage.plural_quantifier || !instances.is_empty() || definitions.contains(&Definition::PartFromFusion);
    if plural {
        symbols.insert("mem");
        symbols.insert("empty");
        axioms.push((EMPTY_AXIOM.0.into(), EMPTY_AXIOM.1.into()));
        axioms.push((EXTENSIONALITY_AXIOM.0.into(), EXTENSIONALITY_AXIOM.1.into()));
    }
    for d in &definitions {
        let (n, text) = d.axiom();
        axioms.push((n.into(), text.into()));
    }
    for i in &instances {
        let (n, text) = i.axiom();
        axioms.push((n.into(), text.into()));
    }

    Obligation {
        name: name.to_string(),
        anchor: conjecture.anchor.clone(),
        theory: t.name.clone(),
        kind: t.kind,
        axioms,
        instances: instances.into_iter().collect(),
        conjecture: conjecture_text,
        symbols,
    }
}

/// The problem for one registry lemma, over its own theory.
pub fn emit_lemma(name: &str) -> Result<Obligation, ExportError> {
    let lemma = theory::lemma(name).ok_or_else(|| ExportError::UnknownName(name.to_string()))?;
    Ok(emit_obligation(lemma.name(), &lemma.theory(), &lemma.obligation))
}

/// One problem per registry lemma, in registry order.
pub fn emit_all() -> Vec<Obligation> {
    theory::lemma_suite().iter().map(|l| emit_obligation(l.name(), &l.theory(), &l.obligation)).collect()
}

/// Writes each obligation to `dir/<name>.p`, creating `dir` if needed.
pub fn write_all(dir: &Path, obligations: &[Obligation]) -> Result<Vec<PathBuf>, ExportError> {
    std::fs::create_dir_all(dir).map_err(|source| ExportError::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    for o in obligations {
        let path = dir.join(o.file_name());
        std::fs::write(&path, o.to_tptp()).map_err(|source| ExportError::Io { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}
