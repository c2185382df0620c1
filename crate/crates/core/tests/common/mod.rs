//! Shared helpers for the integration tests: a seeded formula generator and a
//! direct recursive evaluator used as an oracle for the compiled one.

#![allow(dead_code)]

use std::collections::HashMap;

use gemcheck_core::structures::Interpretation;
use gemcheck_core::syntax::{Quantifier, Sort};
use gemcheck_core::{Formula, Plurality, Structure, Term};
use rand::Rng;

const INDIVIDUALS: [&str; 4] = ["x", "y", "z", "w"];
const PLURALS: [&str; 4] = ["XX", "YY", "ZZ", "WW"];

fn pick<'a>(rng: &mut impl Rng, names: &[&'a str]) -> &'a str {
    names[rng.gen_range(0..names.len())]
}

pub fn random_term(rng: &mut impl Rng, depth: u32) -> Term {
    if depth == 0 || rng.gen_bool(0.4) {
        return if rng.gen_bool(0.5) {
            Term::var(pick(rng, &PLURALS))
        } else {
            Term::singleton(pick(rng, &INDIVIDUALS))
        };
    }
    match rng.gen_range(0..3) {
        0 => Term::union(random_term(rng, depth - 1), random_term(rng, depth - 1)),
        1 => Term::intersection(random_term(rng, depth - 1), random_term(rng, depth - 1)),
        _ => Term::components(random_term(rng, depth - 1)),
    }
}

fn random_atom(rng: &mut impl Rng) -> Formula {
    let x = pick(rng, &INDIVIDUALS).to_string();
    let y = pick(rng, &INDIVIDUALS).to_string();
    match rng.gen_range(0..8) {
        0 => Formula::Equal(x, y),
        1 => Formula::Member(x, random_term(rng, 2)),
        2 => Formula::Included(random_term(rng, 2), random_term(rng, 2)),
        3 => Formula::Coextensive(random_term(rng, 2), random_term(rng, 2)),
        4 => Formula::Fuses(random_term(rng, 2), x),
        5 => Formula::Part(x, y),
        6 => Formula::ProperPart(x, y),
        _ => Formula::Overlap(x, y),
    }
}

fn quantifier(rng: &mut impl Rng) -> Quantifier {
    if rng.gen_bool(0.5) {
        Quantifier::Forall
    } else {
        Quantifier::Exists
    }
}

fn restriction(rng: &mut impl Rng) -> Option<Term> {
    rng.gen_bool(0.3).then(|| random_term(rng, 1))
}

/// A formula whose connective and quantifier nesting is at most `depth`.
pub fn random_formula(rng: &mut impl Rng, depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return random_atom(rng);
    }
    let choice = rng.gen_range(0..7);
    let mut sub = || random_formula(rng, depth - 1);
    match choice {
        0 => Formula::not(sub()),
        1 => Formula::and(sub(), sub()),
        2 => Formula::or(sub(), sub()),
        3 => Formula::implies(sub(), sub()),
        4 => Formula::iff(sub(), sub()),
        5 => {
            let body = random_formula(rng, depth - 1);
            Formula::Individual {
                quantifier: quantifier(rng),
                var: pick(rng, &INDIVIDUALS).to_string(),
                within: restriction(rng),
                body: Box::new(body),
            }
        }
        _ => {
            let body = random_formula(rng, depth - 1);
            Formula::Plural {
                quantifier: quantifier(rng),
                var: pick(rng, &PLURALS).to_string(),
                within: restriction(rng),
                body: Box::new(body),
            }
        }
    }
}

/// `f` with every free variable bound by a randomly chosen quantifier.
pub fn close(rng: &mut impl Rng, f: Formula) -> Formula {
    let mut out = f;
    for (sort, var) in out.free_variables() {
        let body = Box::new(out);
        out = match sort {
            Sort::Individual => Formula::Individual { quantifier: quantifier(rng), var, within: None, body },
            Sort::Plural => Formula::Plural { quantifier: quantifier(rng), var, within: None, body },
        };
    }
    out
}

#[derive(Clone, Default)]
pub struct Env {
    ind: HashMap<String, usize>,
    pl: HashMap<String, u64>,
}

fn term(s: &dyn Interpretation, t: &Term, env: &Env) -> u64 {
    match t {
        Term::Var(v) => env.pl[v],
        Term::Singleton(x) => 1 << env.ind[x],
        Term::Union(a, b) => term(s, a, env) | term(s, b, env),
        Term::Intersection(a, b) => term(s, a, env) & term(s, b, env),
        Term::Components(t) => s.components(Plurality::from_bits(term(s, t, env))).bits(),
    }
}

/// Textbook recursive semantics: restricted quantifiers desugar to a guarded
/// quantifier over the whole domain (or every subset of it).
pub fn naive_eval(s: &dyn Interpretation, f: &Formula, env: &Env) -> bool {
    let n = s.size();
    match f {
        Formula::Equal(a, b) => env.ind[a] == env.ind[b],
        Formula::Member(x, t) => term(s, t, env) >> env.ind[x] & 1 == 1,
        Formula::Included(a, b) => term(s, a, env) & !term(s, b, env) == 0,
        Formula::Coextensive(a, b) => term(s, a, env) == term(s, b, env),
        Formula::Fuses(t, x) => s.fuses(Plurality::from_bits(term(s, t, env)), env.ind[x]),
        Formula::Part(a, b) => s.part(env.ind[a], env.ind[b]),
        Formula::ProperPart(a, b) => s.proper_part(env.ind[a], env.ind[b]),
        Formula::Overlap(a, b) => s.overlap(env.ind[a], env.ind[b]),
        Formula::Not(g) => !naive_eval(s, g, env),
        Formula::And(a, b) => naive_eval(s, a, env) && naive_eval(s, b, env),
        Formula::Or(a, b) => naive_eval(s, a, env) || naive_eval(s, b, env),
        Formula::Implies(a, b) => !naive_eval(s, a, env) || naive_eval(s, b, env),
        Formula::Iff(a, b) => naive_eval(s, a, env) == naive_eval(s, b, env),
        Formula::Individual { quantifier, var, within, body } => {
            let mut inner = env.clone();
            let mut instance = |x: usize| {
                inner.ind.insert(var.clone(), x);
                let guard = within.as_ref().is_none_or(|t| term(s, t, &inner) >> x & 1 == 1);
                (guard, guard && naive_eval(s, body, &inner))
            };
            match quantifier {
                Quantifier::Forall => (0..n).all(|x| {
                    let (g, b) = instance(x);
                    !g || b
                }),
                Quantifier::Exists => (0..n).any(|x| instance(x).1),
            }
        }
        Formula::Plural { quantifier, var, within, body } => {
            let mut inner = env.clone();
            let mut instance = |m: u64| {
                inner.pl.insert(var.clone(), m);
                let guard = within.as_ref().is_none_or(|t| m & !term(s, t, &inner) == 0);
                (guard, guard && naive_eval(s, body, &inner))
            };
            match quantifier {
                Quantifier::Forall => (0..1u64 << n).all(|m| {
                    let (g, b) = instance(m);
                    !g || b
                }),
                Quantifier::Exists => (0..1u64 << n).any(|m| instance(m).1),
            }
        }
    }
}

pub fn naive_holds(s: &Structure, f: &Formula) -> bool {
    naive_eval(s.interpretation(), f, &Env::default())
}
