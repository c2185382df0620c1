//! Two-sorted formula language.
//!
//! Individual variables are lowercase identifiers, plural variables uppercase.
//! Plural terms are built from variables with `I(x)` (the plurality of things
//! identical to `x`), `+` (union), `&` (intersection) and `U(T)` (components).
//!
//! Restricted quantifiers (`forall x in T . φ`, `exists XX sub T . φ`) are kept
//! as written; the evaluator gives them their desugared meaning.

use std::collections::BTreeSet;
use std::fmt;

mod parser;

pub use parser::{parse, parse_term, parse_theory_file, ParseError, TheoryLine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Individual,
    Plural,
}

impl Sort {
    /// Sort of a variable, read off the case of its first letter.
    pub fn of_name(name: &str) -> Option<Sort> {
        let first = name.chars().next()?;
        if first.is_ascii_lowercase() {
            Some(Sort::Individual)
        } else if first.is_ascii_uppercase() {
            Some(Sort::Plural)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    /// `I(x)`
    Singleton(String),
    Union(Box<Term>, Box<Term>),
    Intersection(Box<Term>, Box<Term>),
    /// `U(T)`
    Components(Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn singleton(x: impl Into<String>) -> Term {
        Term::Singleton(x.into())
    }

    pub fn union(a: Term, b: Term) -> Term {
        Term::Union(Box::new(a), Box::new(b))
    }

    pub fn intersection(a: Term, b: Term) -> Term {
        Term::Intersection(Box::new(a), Box::new(b))
    }

    pub fn components(t: Term) -> Term {
        Term::Components(Box::new(t))
    }

    fn collect_free(&self, out: &mut BTreeSet<(Sort, String)>) {
        match self {
            Term::Var(v) => {
                out.insert((Sort::Plural, v.clone()));
            }
            Term::Singleton(x) => {
                out.insert((Sort::Individual, x.clone()));
            }
            Term::Union(a, b) | Term::Intersection(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Term::Components(t) => t.collect_free(out),
        }
    }

    pub(crate) fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Var(_) | Term::Singleton(_) => {}
            Term::Union(a, b) | Term::Intersection(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::Components(t) => t.visit(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `x = y`
    Equal(String, String),
    /// `x in T`
    Member(String, Term),
    /// `T sub S`
    Included(Term, Term),
    /// `T eq S`
    Coextensive(Term, Term),
    /// `F(T, x)`
    Fuses(Term, String),
    /// `P(x, y)`
    Part(String, String),
    /// `PP(x, y)`
    ProperPart(String, String),
    /// `O(x, y)`
    Overlap(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// Quantifier over individuals, optionally restricted by `in T`.
    Individual {
        quantifier: Quantifier,
        var: String,
        within: Option<Term>,
        body: Box<Formula>,
    },
    /// Quantifier over pluralities, optionally restricted by `sub T`.
    Plural {
        quantifier: Quantifier,
        var: String,
        within: Option<Term>,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Formula {
        Self::quantified(Quantifier::Forall, var.into(), None, body)
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Formula {
        Self::quantified(Quantifier::Exists, var.into(), None, body)
    }

    /// Builds a quantifier whose sort follows the variable's case.
    pub fn quantified(quantifier: Quantifier, var: String, within: Option<Term>, body: Formula) -> Formula {
        let body = Box::new(body);
        match Sort::of_name(&var) {
            Some(Sort::Plural) => Formula::Plural { quantifier, var, within, body },
            _ => Formula::Individual { quantifier, var, within, body },
        }
    }

    /// Free variables with their sorts, in name order.
    pub fn free_variables(&self) -> BTreeSet<(Sort, String)> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    fn collect_free(&self, out: &mut BTreeSet<(Sort, String)>) {
        let ind = |out: &mut BTreeSet<_>, v: &String| {
            out.insert((Sort::Individual, v.clone()));
        };
        match self {
            Formula::Equal(a, b) | Formula::Part(a, b) | Formula::ProperPart(a, b) | Formula::Overlap(a, b) => {
                ind(out, a);
                ind(out, b);
            }
            Formula::Member(x, t) | Formula::Fuses(t, x) => {
                ind(out, x);
                t.collect_free(out);
            }
            Formula::Included(a, b) | Formula::Coextensive(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Not(f) => f.collect_free(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Individual { var, within, body, .. } => bound_free(Sort::Individual, var, within, body, out),
            Formula::Plural { var, within, body, .. } => bound_free(Sort::Plural, var, within, body, out),
        }
    }

    /// Calls `f` on every plural term occurring in the formula, outermost first.
    pub fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::Equal(..) | Formula::Part(..) | Formula::ProperPart(..) | Formula::Overlap(..) => {}
            Formula::Member(_, t) | Formula::Fuses(t, _) => t.visit(f),
            Formula::Included(a, b) | Formula::Coextensive(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Not(g) => g.visit_terms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
            Formula::Individual { within, body, .. } | Formula::Plural { within, body, .. } => {
                if let Some(t) = within {
                    t.visit(f);
                }
                body.visit_terms(f);
            }
        }
    }

    /// Calls `f` on every subformula, outermost first.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(g) => g.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Individual { body, .. } | Formula::Plural { body, .. } => body.visit(f),
            _ => {}
        }
    }

    /// Number of nested plural quantifiers along the deepest path.
    pub fn plural_depth(&self) -> usize {
        match self {
            Formula::Not(g) => g.plural_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.plural_depth().max(b.plural_depth())
            }
            Formula::Individual { body, .. } => body.plural_depth(),
            Formula::Plural { body, .. } => 1 + body.plural_depth(),
            _ => 0,
        }
    }

    /// Number of nested quantifiers of either sort along the deepest path.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Not(g) => g.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Individual { body, .. } | Formula::Plural { body, .. } => 1 + body.quantifier_depth(),
            _ => 0,
        }
    }
}

fn bound_free(sort: Sort, var: &str, within: &Option<Term>, body: &Formula, out: &mut BTreeSet<(Sort, String)>) {
    // The restriction sits inside the binder's scope, as in its desugaring.
    let mut inner = BTreeSet::new();
    if let Some(t) = within {
        t.collect_free(&mut inner);
    }
    body.collect_free(&mut inner);
    inner.remove(&(sort, var.to_string()));
    out.extend(inner);
}

/// A closed sentence with a registry key and a citation anchor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedFormula {
    pub name: String,
    pub sentence: Formula,
    pub anchor: String,
}

impl NamedFormula {
    pub fn new(name: impl Into<String>, sentence: Formula, anchor: impl Into<String>) -> Self {
        NamedFormula { name: name.into(), sentence, anchor: anchor.into() }
    }
}

// Binding strength of each construct; a child printed where a tighter level
// is required gets parentheses.
const PREC_QUANT: u8 = 0;
const PREC_IFF: u8 = 1;
const PREC_IMPLIES: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_NOT: u8 = 5;
const PREC_ATOM: u8 = 6;

const TERM_UNION: u8 = 1;
const TERM_INTER: u8 = 2;
const TERM_ATOM: u8 = 3;

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Union(..) => TERM_UNION,
        Term::Intersection(..) => TERM_INTER,
        _ => TERM_ATOM,
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    let parens = term_prec(t) < min;
    if parens {
        f.write_str("(")?;
    }
    match t {
        Term::Var(v) => f.write_str(v)?,
        Term::Singleton(x) => write!(f, "I({x})")?,
        Term::Union(a, b) => {
            write_term(f, a, TERM_UNION)?;
            f.write_str(" + ")?;
            write_term(f, b, TERM_INTER)?;
        }
        Term::Intersection(a, b) => {
            write_term(f, a, TERM_INTER)?;
            f.write_str(" & ")?;
            write_term(f, b, TERM_ATOM)?;
        }
        Term::Components(t) => {
            f.write_str("U(")?;
            write_term(f, t, 0)?;
            f.write_str(")")?;
        }
    }
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

fn formula_prec(g: &Formula) -> u8 {
    match g {
        Formula::Individual { .. } | Formula::Plural { .. } => PREC_QUANT,
        Formula::Iff(..) => PREC_IFF,
        Formula::Implies(..) => PREC_IMPLIES,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        Formula::Not(..) => PREC_NOT,
        _ => PREC_ATOM,
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, g: &Formula, min: u8) -> fmt::Result {
    let parens = formula_prec(g) < min;
    if parens {
        f.write_str("(")?;
    }
    let binary = |f: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula, l: u8, r: u8| {
        write_formula(f, a, l)?;
        write!(f, " {op} ")?;
        write_formula(f, b, r)
    };
    match g {
        Formula::Equal(x, y) => write!(f, "{x} = {y}")?,
        Formula::Member(x, t) => write!(f, "{x} in {t}")?,
        Formula::Included(a, b) => write!(f, "{a} sub {b}")?,
        Formula::Coextensive(a, b) => write!(f, "{a} eq {b}")?,
        Formula::Fuses(t, x) => write!(f, "F({t}, {x})")?,
        Formula::Part(x, y) => write!(f, "P({x}, {y})")?,
        Formula::ProperPart(x, y) => write!(f, "PP({x}, {y})")?,
        Formula::Overlap(x, y) => write!(f, "O({x}, {y})")?,
        Formula::Not(h) => {
            f.write_str("not ")?;
            write_formula(f, h, PREC_NOT)?;
        }
        Formula::And(a, b) => binary(f, a, "and", b, PREC_AND, PREC_NOT)?,
        Formula::Or(a, b) => binary(f, a, "or", b, PREC_OR, PREC_AND)?,
        Formula::Implies(a, b) => binary(f, a, "->", b, PREC_OR, PREC_IMPLIES)?,
        Formula::Iff(a, b) => binary(f, a, "<->", b, PREC_IFF, PREC_IMPLIES)?,
        Formula::Individual { quantifier, var, within, body } => {
            write!(f, "{} {var}", quantifier.keyword())?;
            if let Some(t) = within {
                write!(f, " in {t}")?;
            }
            f.write_str(" . ")?;
            write_formula(f, body, PREC_QUANT)?;
        }
        Formula::Plural { quantifier, var, within, body } => {
            write!(f, "{} {var}", quantifier.keyword())?;
            if let Some(t) = within {
                write!(f, " sub {t}")?;
            }
            f.write_str(" . ")?;
            write_formula(f, body, PREC_QUANT)?;
        }
    }
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, PREC_QUANT)
    }
}

/// Concrete syntax of a formula; `parse(&print(f))` rebuilds `f`.
pub fn print(f: &Formula) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_with_minimal_parentheses() {
        let f = parse("(P(x,y) and O(x,y)) or not x = y").unwrap();
        assert_eq!(print(&f), "P(x, y) and O(x, y) or not x = y");
        let g = parse("(a = b -> b = c) -> c = a").unwrap();
        assert_eq!(print(&g), "(a = b -> b = c) -> c = a");
        let h = parse("a = b -> b = c -> c = a").unwrap();
        assert_eq!(print(&h), "a = b -> b = c -> c = a");
    }

    #[test]
    fn prints_restricted_quantifiers_as_written() {
        let src = "forall x in U(ZZ) . exists YY sub ZZ + I(x) . x in YY";
        assert_eq!(print(&parse(src).unwrap()), src);
    }

    #[test]
    fn quantifier_operands_are_parenthesized() {
        let f = Formula::and(
            Formula::forall("x", Formula::Part("x".into(), "x".into())),
            Formula::Equal("y".into(), "y".into()),
        );
        let text = print(&f);
        assert_eq!(text, "(forall x . P(x, x)) and y = y");
        assert_eq!(parse(&text).unwrap(), f);
    }

    #[test]
    fn term_precedence() {
        let t = Term::intersection(Term::var("A"), Term::union(Term::var("B"), Term::var("C")));
        assert_eq!(t.to_string(), "A & (B + C)");
        let u = Term::union(Term::var("A"), Term::union(Term::var("B"), Term::var("C")));
        assert_eq!(u.to_string(), "A + (B + C)");
        assert_eq!(parse_term(&u.to_string()).unwrap(), u);
    }

    #[test]
    fn free_variables_respect_binders() {
        let f = parse("forall x in I(y) . exists ZZ sub U(WW) . x in ZZ").unwrap();
        let free: Vec<_> = f.free_variables().into_iter().collect();
        assert_eq!(free, vec![(Sort::Individual, "y".to_string()), (Sort::Plural, "WW".to_string())]);
        assert!(parse("forall x . P(x, x)").unwrap().is_closed());
    }
}
