//! Evaluation of formulas over finite structures.
//!
//! Individual quantifiers range over the domain; plural quantifiers range over
//! every subset of it, the empty one included, visited in increasing order of
//! their characteristic bits. Atoms that are not primitive in a structure's
//! signature are evaluated through the definitional translations (see
//! [`Interpretation`]).
//!
//! Formulas are compiled to a slot-addressed [`Program`] before evaluation so
//! that repeated checks over many structures avoid name lookups.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::structures::{Interpretation, Plurality, Structure};
use crate::syntax::{Formula, NamedFormula, Quantifier, Sort, Term};

mod guards;

pub use guards::push_guards;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{name}`")]
    Unbound { name: String },
    #[error("value bound to `{name}` is outside the domain of size {n}")]
    OutOfRange { name: String, n: usize },
}

/// Values for free variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    individuals: BTreeMap<String, usize>,
    pluralities: BTreeMap<String, Plurality>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_individual(mut self, name: impl Into<String>, x: usize) -> Self {
        self.individuals.insert(name.into(), x);
        self
    }

    pub fn with_plural(mut self, name: impl Into<String>, zz: Plurality) -> Self {
        self.pluralities.insert(name.into(), zz);
        self
    }

    pub fn individual(&self, name: &str) -> Option<usize> {
        self.individuals.get(name).copied()
    }

    pub fn plural(&self, name: &str) -> Option<Plurality> {
        self.pluralities.get(name).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty() && self.pluralities.is_empty()
    }

    pub fn individuals(&self) -> impl Iterator<Item = (&str, usize)> {
        self.individuals.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn pluralities(&self) -> impl Iterator<Item = (&str, Plurality)> {
        self.pluralities.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.individuals {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{k}={v}")?;
        }
        for (k, v) in &self.pluralities {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.individuals.len() + self.pluralities.len()))?;
        for (k, v) in &self.individuals {
            map.serialize_entry(k, v)?;
        }
        for (k, v) in &self.pluralities {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// Result of checking a closed sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOutcome {
    pub value: bool,
    /// On failure of a sentence that opens with universal quantifiers, the
    /// first binding of that block (in enumeration order) falsifying the body.
    pub witness: Option<Assignment>,
}

type Slot = u16;

#[derive(Debug, Clone)]
enum TermNode {
    Var(Slot),
    Singleton(Slot),
    Union(Box<TermNode>, Box<TermNode>),
    Intersection(Box<TermNode>, Box<TermNode>),
    Components(Box<TermNode>),
}

impl TermNode {
    fn mentions_plural(&self, slot: Slot) -> bool {
        match self {
            TermNode::Var(s) => *s == slot,
            TermNode::Singleton(_) => false,
            TermNode::Union(a, b) | TermNode::Intersection(a, b) => a.mentions_plural(slot) || b.mentions_plural(slot),
            TermNode::Components(t) => t.mentions_plural(slot),
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Equal(Slot, Slot),
    Member(Slot, TermNode),
    Included(TermNode, TermNode),
    Coextensive(TermNode, TermNode),
    Fuses(TermNode, Slot),
    Part(Slot, Slot),
    ProperPart(Slot, Slot),
    Overlap(Slot, Slot),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Individual {
        forall: bool,
        slot: Slot,
        within: Option<TermNode>,
        body: Box<Node>,
    },
    Plural {
        forall: bool,
        slot: Slot,
        within: Option<TermNode>,
        /// Restriction does not mention the bound variable, so only its
        /// subsets need visiting.
        fixed_within: bool,
        body: Box<Node>,
    },
}

#[derive(Default)]
struct Compiler {
    ind_names: Vec<String>,
    pl_names: Vec<String>,
    ind_scope: Vec<(String, Slot)>,
    pl_scope: Vec<(String, Slot)>,
    free_ind: Vec<(String, Slot)>,
    free_pl: Vec<(String, Slot)>,
}

impl Compiler {
    fn fresh(names: &mut Vec<String>, name: &str) -> Slot {
        names.push(name.to_string());
        Slot::try_from(names.len() - 1).expect("formula has too many variables")
    }

    fn lookup(&mut self, sort: Sort, name: &str) -> Slot {
        let (scope, free, names) = match sort {
            Sort::Individual => (&self.ind_scope, &mut self.free_ind, &mut self.ind_names),
            Sort::Plural => (&self.pl_scope, &mut self.free_pl, &mut self.pl_names),
        };
        if let Some((_, s)) = scope.iter().rev().find(|(n, _)| n == name) {
            return *s;
        }
        if let Some((_, s)) = free.iter().find(|(n, _)| n == name) {
            return *s;
        }
        let s = Self::fresh(names, name);
        free.push((name.to_string(), s));
        s
    }

    fn term(&mut self, t: &Term) -> TermNode {
        match t {
            Term::Var(v) => TermNode::Var(self.lookup(Sort::Plural, v)),
            Term::Singleton(x) => TermNode::Singleton(self.lookup(Sort::Individual, x)),
            Term::Union(a, b) => TermNode::Union(Box::new(self.term(a)), Box::new(self.term(b))),
            Term::Intersection(a, b) => TermNode::Intersection(Box::new(self.term(a)), Box::new(self.term(b))),
            Term::Components(t) => TermNode::Components(Box::new(self.term(t))),
        }
    }

    fn ind(&mut self, name: &str) -> Slot {
        self.lookup(Sort::Individual, name)
    }

    fn formula(&mut self, f: &Formula) -> Node {
        let bin = |c: &mut Self, a: &Formula, b: &Formula| (Box::new(c.formula(a)), Box::new(c.formula(b)));
        match f {
            Formula::Equal(x, y) => Node::Equal(self.ind(x), self.ind(y)),
            Formula::Member(x, t) => Node::Member(self.ind(x), self.term(t)),
            Formula::Included(a, b) => Node::Included(self.term(a), self.term(b)),
            Formula::Coextensive(a, b) => Node::Coextensive(self.term(a), self.term(b)),
            Formula::Fuses(t, x) => Node::Fuses(self.term(t), self.ind(x)),
            Formula::Part(x, y) => Node::Part(self.ind(x), self.ind(y)),
            Formula::ProperPart(x, y) => Node::ProperPart(self.ind(x), self.ind(y)),
            Formula::Overlap(x, y) => Node::Overlap(self.ind(x), self.ind(y)),
            Formula::Not(g) => Node::Not(Box::new(self.formula(g))),
            Formula::And(a, b) => {
                let (a, b) = bin(self, a, b);
                Node::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(self, a, b);
                Node::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(self, a, b);
                Node::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(self, a, b);
                Node::Iff(a, b)
            }
            Formula::Individual { quantifier, var, within, body } => {
                let slot = Self::fresh(&mut self.ind_names, var);
                self.ind_scope.push((var.clone(), slot));
                let within = within.as_ref().map(|t| self.term(t));
                let body = Box::new(self.formula(body));
                self.ind_scope.pop();
                Node::Individual { forall: *quantifier == Quantifier::Forall, slot, within, body }
            }
            Formula::Plural { quantifier, var, within, body } => {
                let slot = Self::fresh(&mut self.pl_names, var);
                self.pl_scope.push((var.clone(), slot));
                let within = within.as_ref().map(|t| self.term(t));
                let body = Box::new(self.formula(body));
                self.pl_scope.pop();
                let fixed_within = within.as_ref().is_some_and(|t| !t.mentions_plural(slot));
                Node::Plural { forall: *quantifier == Quantifier::Forall, slot, within, fixed_within, body }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Compiled {
    root: Node,
    ind_names: Vec<String>,
    pl_names: Vec<String>,
    free_ind: Vec<(String, Slot)>,
    free_pl: Vec<(String, Slot)>,
}

impl Compiled {
    fn new(f: &Formula) -> Compiled {
        let mut c = Compiler::default();
        let root = c.formula(f);
        Compiled { root, ind_names: c.ind_names, pl_names: c.pl_names, free_ind: c.free_ind, free_pl: c.free_pl }
    }

    fn machine<'a, I: Interpretation + ?Sized>(&self, s: &'a I, a: &Assignment) -> Result<Machine<'a, I>, EvalError> {
        let n = s.size();
        let mut m = Machine { s, n, ind: vec![0; self.ind_names.len()], pl: vec![0; self.pl_names.len()] };
        for (name, slot) in &self.free_ind {
            let x = a.individual(name).ok_or_else(|| EvalError::Unbound { name: name.clone() })?;
            if x >= n {
                return Err(EvalError::OutOfRange { name: name.clone(), n });
            }
            m.ind[*slot as usize] = x;
        }
        for (name, slot) in &self.free_pl {
            let zz = a.plural(name).ok_or_else(|| EvalError::Unbound { name: name.clone() })?;
            if !zz.fits(n) {
                return Err(EvalError::OutOfRange { name: name.clone(), n });
            }
            m.pl[*slot as usize] = zz.bits();
        }
        Ok(m)
    }

    fn check_in<I: Interpretation + ?Sized>(&self, s: &I) -> Result<EvalOutcome, EvalError> {
        let mut m = self.machine(s, &Assignment::new())?;
        let mut prefix = Vec::new();
        let mut node = &self.root;
        while let Node::Individual { forall: true, body, .. } | Node::Plural { forall: true, body, .. } = node {
            prefix.push(node);
            node = body;
        }
        if prefix.is_empty() {
            return Ok(EvalOutcome { value: m.formula(node), witness: None });
        }
        if !m.counterexample(&prefix, node) {
            return Ok(EvalOutcome { value: true, witness: None });
        }
        let mut witness = Assignment::new();
        for binder in &prefix {
            match binder {
                Node::Individual { slot, .. } => {
                    let name = &self.ind_names[*slot as usize];
                    witness = witness.with_individual(name.clone(), m.ind[*slot as usize]);
                }
                Node::Plural { slot, .. } => {
                    let name = &self.pl_names[*slot as usize];
                    witness = witness.with_plural(name.clone(), Plurality::from_bits(m.pl[*slot as usize]));
                }
                _ => unreachable!(),
            }
        }
        Ok(EvalOutcome { value: false, witness: Some(witness) })
    }
}

/// A formula compiled for repeated evaluation.
///
/// Truth values come from a guard-pushed rewrite of the formula (see
/// [`push_guards`]); witnesses are searched in the original quantifier order.
#[derive(Debug, Clone)]
pub struct Program {
    fast: Compiled,
    faithful: Compiled,
}

impl Program {
    pub fn compile(f: &Formula) -> Program {
        Program { fast: Compiled::new(&push_guards(f)), faithful: Compiled::new(f) }
    }

    pub fn is_closed(&self) -> bool {
        self.faithful.free_ind.is_empty() && self.faithful.free_pl.is_empty()
    }

    /// Truth value under `a`.
    pub fn eval(&self, s: &Structure, a: &Assignment) -> Result<bool, EvalError> {
        match s {
            Structure::Part(p) => self.eval_in(p, a),
            Structure::Fusion(f) => self.eval_in(f, a),
        }
    }

    pub fn eval_in<I: Interpretation + ?Sized>(&self, s: &I, a: &Assignment) -> Result<bool, EvalError> {
        let mut m = self.fast.machine(s, a)?;
        Ok(m.formula(&self.fast.root))
    }

    /// Truth value of a closed program; open programs are an error.
    pub fn holds(&self, s: &Structure) -> Result<bool, EvalError> {
        self.eval(s, &Assignment::new())
    }

    pub fn holds_in<I: Interpretation + ?Sized>(&self, s: &I) -> Result<bool, EvalError> {
        self.eval_in(s, &Assignment::new())
    }

    /// Truth value plus a falsifying binding of the leading universal block.
    pub fn check(&self, s: &Structure) -> Result<EvalOutcome, EvalError> {
        match s {
            Structure::Part(p) => self.check_in(p),
            Structure::Fusion(f) => self.check_in(f),
        }
    }

    pub fn check_in<I: Interpretation + ?Sized>(&self, s: &I) -> Result<EvalOutcome, EvalError> {
        if self.holds_in(s)? {
            return Ok(EvalOutcome { value: true, witness: None });
        }
        self.faithful.check_in(s)
    }
}

struct Machine<'a, I: ?Sized> {
    s: &'a I,
    n: usize,
    ind: Vec<usize>,
    pl: Vec<u64>,
}

/// Next submask of `sup` after `s`, in increasing numeric order.
#[inline]
fn next_submask(s: u64, sup: u64) -> u64 {
    (s | !sup).wrapping_add(1) & sup
}

impl<I: Interpretation + ?Sized> Machine<'_, I> {
    fn term(&self, t: &TermNode) -> u64 {
        match t {
            TermNode::Var(s) => self.pl[*s as usize],
            TermNode::Singleton(s) => 1 << self.ind[*s as usize],
            TermNode::Union(a, b) => self.term(a) | self.term(b),
            TermNode::Intersection(a, b) => self.term(a) & self.term(b),
            TermNode::Components(t) => self.s.components(Plurality::from_bits(self.term(t))).bits(),
        }
    }

    fn formula(&mut self, f: &Node) -> bool {
        match f {
            Node::Equal(a, b) => self.ind[*a as usize] == self.ind[*b as usize],
            Node::Member(x, t) => self.term(t) >> self.ind[*x as usize] & 1 == 1,
            Node::Included(a, b) => self.term(a) & !self.term(b) == 0,
            Node::Coextensive(a, b) => self.term(a) == self.term(b),
            Node::Fuses(t, x) => self.s.fuses(Plurality::from_bits(self.term(t)), self.ind[*x as usize]),
            Node::Part(x, y) => self.s.part(self.ind[*x as usize], self.ind[*y as usize]),
            Node::ProperPart(x, y) => self.s.proper_part(self.ind[*x as usize], self.ind[*y as usize]),
            Node::Overlap(x, y) => self.s.overlap(self.ind[*x as usize], self.ind[*y as usize]),
            Node::Not(g) => !self.formula(g),
            Node::And(a, b) => self.formula(a) && self.formula(b),
            Node::Or(a, b) => self.formula(a) || self.formula(b),
            Node::Implies(a, b) => !self.formula(a) || self.formula(b),
            Node::Iff(a, b) => self.formula(a) == self.formula(b),
            Node::Individual { forall, slot, within, body } => {
                for x in 0..self.n {
                    self.ind[*slot as usize] = x;
                    if let Some(t) = within {
                        if self.term(t) >> x & 1 == 0 {
                            continue;
                        }
                    }
                    if self.formula(body) != *forall {
                        return !*forall;
                    }
                }
                *forall
            }
            Node::Plural { forall, slot, within, fixed_within, body } => {
                let found =
                    self.visit_pluralities(*slot, within.as_ref(), *fixed_within, |m| m.formula(body) != *forall);
                found != *forall
            }
        }
    }

    /// Visits candidate values for a plural binder in increasing order,
    /// skipping those outside the restriction. Stops at the first value for
    /// which `stop` returns true and reports whether that happened; the slot
    /// keeps the stopping value.
    fn visit_pluralities(
        &mut self,
        slot: Slot,
        within: Option<&TermNode>,
        fixed_within: bool,
        mut stop: impl FnMut(&mut Self) -> bool,
    ) -> bool {
        let slot = slot as usize;
        match within {
            Some(t) if fixed_within => {
                let sup = self.term(t);
                let mut s = 0u64;
                loop {
                    self.pl[slot] = s;
                    if stop(self) {
                        return true;
                    }
                    if s == sup {
                        return false;
                    }
                    s = next_submask(s, sup);
                }
            }
            _ => {
                let count = 1u64 << self.n;
                for s in 0..count {
                    self.pl[slot] = s;
                    if let Some(t) = within {
                        if s & !self.term(t) != 0 {
                            continue;
                        }
                    }
                    if stop(self) {
                        return true;
                    }
                }
                false
            }
        }
    }

    /// Searches the universal prefix for a binding that falsifies `matrix`,
    /// in the same order as ordinary evaluation.
    fn counterexample(&mut self, prefix: &[&Node], matrix: &Node) -> bool {
        let Some((first, rest)) = prefix.split_first() else {
            return !self.formula(matrix);
        };
        match first {
            Node::Individual { slot, within, .. } => {
                for x in 0..self.n {
                    self.ind[*slot as usize] = x;
                    if let Some(t) = within {
                        if self.term(t) >> x & 1 == 0 {
                            continue;
                        }
                    }
                    if self.counterexample(rest, matrix) {
                        return true;
                    }
                }
                false
            }
            Node::Plural { slot, within, fixed_within, .. } => {
                self.visit_pluralities(*slot, within.as_ref(), *fixed_within, |m| m.counterexample(rest, matrix))
            }
            _ => unreachable!("prefix holds quantifiers only"),
        }
    }
}

/// Denotation of a plural term under `a`.
pub fn eval_term(s: &Structure, t: &Term, a: &Assignment) -> Result<Plurality, EvalError> {
    let mut c = Compiler::default();
    let node = c.term(t);
    let program = Compiled {
        root: Node::Equal(0, 0),
        ind_names: c.ind_names,
        pl_names: c.pl_names,
        free_ind: c.free_ind,
        free_pl: c.free_pl,
    };
    let m = match s {
        Structure::Part(p) => program.machine(p as &dyn Interpretation, a)?,
        Structure::Fusion(f) => program.machine(f as &dyn Interpretation, a)?,
    };
    Ok(Plurality::from_bits(m.term(&node)))
}

/// Truth value of `f` under `a`.
pub fn eval(s: &Structure, f: &Formula, a: &Assignment) -> Result<bool, EvalError> {
    Program::compile(f).eval(s, a)
}

/// Evaluates a closed sentence, reporting a witness on failure.
pub fn check_sentence(s: &Structure, nf: &NamedFormula) -> Result<EvalOutcome, EvalError> {
    Program::compile(&nf.sentence).check(s)
}

/// The body left after stripping a sentence's leading universal block, with
/// each stripped restriction turned back into an antecedent.
pub fn universal_matrix(sentence: &Formula) -> Formula {
    match sentence {
        Formula::Individual { quantifier: Quantifier::Forall, var, within, body } => {
            let inner = universal_matrix(body);
            match within {
                Some(t) => Formula::implies(Formula::Member(var.clone(), t.clone()), inner),
                None => inner,
            }
        }
        Formula::Plural { quantifier: Quantifier::Forall, var, within, body } => {
            let inner = universal_matrix(body);
            match within {
                Some(t) => Formula::implies(Formula::Included(Term::Var(var.clone()), t.clone()), inner),
                None => inner,
            }
        }
        other => other.clone(),
    }
}

/// Re-evaluates a failure witness from scratch: true when the witness really
/// falsifies the sentence's matrix.
pub fn witness_falsifies(s: &Structure, sentence: &Formula, witness: &Assignment) -> Result<bool, EvalError> {
    Ok(!eval(s, &universal_matrix(sentence), witness)?)
}
