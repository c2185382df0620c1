//! Rewrites a formula into an equivalent one that is cheaper to evaluate by
//! enumeration.
//!
//! Inside each block of like quantifiers the binders are reordered and every
//! antecedent (for `forall`) or conjunct (for `exists`) is tested as soon as
//! the variables it mentions are bound:
//!
//! ```text
//! forall ZZ . forall YY . forall x . (F(ZZ, x) and F(YY, x) -> B)
//!   ==>  forall x . forall ZZ . (F(ZZ, x) -> forall YY . (F(YY, x) -> B))
//! ```
//!
//! Both steps are valid for every structure, the empty one included. Blocks
//! that reuse a variable name, or whose restrictions refer to a variable
//! bound later in the block, keep their order.

use std::collections::BTreeSet;

use crate::syntax::{Formula, Quantifier, Sort, Term};

#[derive(Clone)]
struct Binder {
    sort: Sort,
    var: String,
    within: Option<Term>,
}

impl Binder {
    fn wrap(&self, quantifier: Quantifier, body: Formula) -> Formula {
        let (var, within, body) = (self.var.clone(), self.within.clone(), Box::new(body));
        match self.sort {
            Sort::Individual => Formula::Individual { quantifier, var, within, body },
            Sort::Plural => Formula::Plural { quantifier, var, within, body },
        }
    }
}

fn binder(f: &Formula) -> Option<(Quantifier, Binder, &Formula)> {
    match f {
        Formula::Individual { quantifier, var, within, body } => {
            Some((*quantifier, Binder { sort: Sort::Individual, var: var.clone(), within: within.clone() }, body))
        }
        Formula::Plural { quantifier, var, within, body } => {
            Some((*quantifier, Binder { sort: Sort::Plural, var: var.clone(), within: within.clone() }, body))
        }
        _ => None,
    }
}

fn conjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other.clone()),
    }
}

/// `A1 and A2 -> (A3 -> B)` as `([A1, A2, A3], B)`.
fn antecedents(f: &Formula) -> (Vec<Formula>, Formula) {
    let mut guards = Vec::new();
    let mut f = f;
    while let Formula::Implies(a, b) = f {
        conjuncts(a, &mut guards);
        f = b;
    }
    (guards, f.clone())
}

fn term_names(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    t.visit(&mut |t| match t {
        Term::Var(v) | Term::Singleton(v) => {
            out.insert(v.clone());
        }
        _ => {}
    });
    out
}

fn free_names(f: &Formula) -> BTreeSet<String> {
    f.free_variables().into_iter().map(|(_, v)| v).collect()
}

/// The formula with every like-quantifier block reordered and guarded.
pub fn push_guards(f: &Formula) -> Formula {
    match f {
        Formula::Individual { .. } | Formula::Plural { .. } => block(f),
        Formula::Not(g) => Formula::not(push_guards(g)),
        Formula::And(a, b) => Formula::and(push_guards(a), push_guards(b)),
        Formula::Or(a, b) => Formula::or(push_guards(a), push_guards(b)),
        Formula::Implies(a, b) => Formula::implies(push_guards(a), push_guards(b)),
        Formula::Iff(a, b) => Formula::iff(push_guards(a), push_guards(b)),
        atom => atom.clone(),
    }
}

enum Step {
    Bind(usize),
    Guard(usize),
}

fn block(f: &Formula) -> Formula {
    let (quantifier, first, mut body) = binder(f).expect("block starts at a quantifier");
    let mut binders = vec![first];
    while let Some((q, b, inner)) = binder(body) {
        if q != quantifier {
            break;
        }
        binders.push(b);
        body = inner;
    }

    let names: Vec<&str> = binders.iter().map(|b| b.var.as_str()).collect();
    let distinct = names.iter().collect::<BTreeSet<_>>().len() == names.len();
    // Block variables each restriction depends on; a restriction naming a
    // variable bound later in the block refers to an outer one.
    let mut deps = Vec::new();
    let mut reorderable = distinct;
    for (i, b) in binders.iter().enumerate() {
        let mentioned = b.within.as_ref().map(term_names).unwrap_or_default();
        if names[i + 1..].iter().any(|v| mentioned.contains(*v)) {
            reorderable = false;
        }
        deps.push((0..i).filter(|&j| mentioned.contains(names[j])).collect::<Vec<_>>());
    }
    if !reorderable {
        let inner = push_guards(body);
        return binders.iter().rev().fold(inner, |acc, b| b.wrap(quantifier, acc));
    }

    let (guards, core) = match quantifier {
        Quantifier::Forall => {
            let (g, c) = antecedents(body);
            (g, Some(c))
        }
        Quantifier::Exists => {
            let mut g = Vec::new();
            conjuncts(body, &mut g);
            (g, None)
        }
    };
    let guards: Vec<Formula> = guards.iter().map(push_guards).collect();
    let guard_vars: Vec<BTreeSet<usize>> = guards
        .iter()
        .map(|g| {
            let free = free_names(g);
            (0..binders.len()).filter(|&i| free.contains(names[i])).collect()
        })
        .collect();

    let mut steps = Vec::new();
    let mut bound = BTreeSet::new();
    let mut placed = vec![false; guards.len()];
    let mut place_ready = |bound: &BTreeSet<usize>, steps: &mut Vec<Step>| {
        for (g, vars) in guard_vars.iter().enumerate() {
            if !placed[g] && vars.is_subset(bound) {
                placed[g] = true;
                steps.push(Step::Guard(g));
            }
        }
    };
    place_ready(&bound, &mut steps);
    while bound.len() < binders.len() {
        let best = (0..binders.len())
            .filter(|i| !bound.contains(i) && deps[*i].iter().all(|d| bound.contains(d)))
            .max_by_key(|&i| {
                let mut with = bound.clone();
                with.insert(i);
                let enabled = guard_vars.iter().filter(|v| !v.is_subset(&bound) && v.is_subset(&with)).count();
                let mentions = guard_vars.iter().filter(|v| !v.is_subset(&bound) && v.contains(&i)).count();
                (enabled, mentions, std::cmp::Reverse(i))
            })
            .expect("restrictions only depend on earlier binders");
        bound.insert(best);
        steps.push(Step::Bind(best));
        place_ready(&bound, &mut steps);
    }
    // An existential block must end in a formula: sink the last guard below
    // any trailing binders.
    if core.is_none() && matches!(steps.last(), Some(Step::Bind(_))) {
        if let Some(pos) = steps.iter().rposition(|s| matches!(s, Step::Guard(_))) {
            let g = steps.remove(pos);
            steps.push(g);
        }
    }

    let mut acc: Option<Formula> = core.map(|c| push_guards(&c));
    for step in steps.into_iter().rev() {
        acc = Some(match (step, acc) {
            (Step::Guard(g), None) => guards[g].clone(),
            (Step::Guard(g), Some(a)) => match quantifier {
                Quantifier::Forall => Formula::implies(guards[g].clone(), a),
                Quantifier::Exists => Formula::and(guards[g].clone(), a),
            },
            (Step::Bind(i), Some(a)) => binders[i].wrap(quantifier, a),
            (Step::Bind(_), None) => unreachable!("existential blocks end in a guard"),
        });
    }
    acc.expect("a block has a body")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, print};

    fn rewrite(src: &str) -> String {
        print(&push_guards(&parse(src).unwrap()))
    }

    #[test]
    fn guards_move_out() {
        assert_eq!(
            rewrite("forall ZZ . forall YY . forall x . (F(ZZ, x) and F(YY, x) -> P(x, x))"),
            "forall x . forall ZZ . F(ZZ, x) -> (forall YY . F(YY, x) -> P(x, x))"
        );
    }

    #[test]
    fn existential_conjuncts() {
        assert_eq!(
            rewrite("exists x . exists y . (P(y, y) and P(x, y))"),
            "exists y . P(y, y) and (exists x . P(x, y))"
        );
        assert_eq!(rewrite("exists x . exists y . P(x, x)"), "exists x . exists y . P(x, x)");
    }

    #[test]
    fn restriction_order_kept() {
        let src = "forall x in U(YY) . forall YY . P(x, x)";
        assert_eq!(rewrite(src), print(&parse(src).unwrap()));
    }

    #[test]
    fn repeated_names_kept() {
        let src = "forall x . forall x . P(x, x)";
        assert_eq!(rewrite(src), print(&parse(src).unwrap()));
    }
}
