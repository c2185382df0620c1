//! Built-in theories: the axioms of both presentations of classical mereology
//! and the consequences each must have.
//!
//! The same sentences ship as `.thy` files under `theories/`; the test suite
//! checks the two stay identical.

use thiserror::Error;

use crate::structures::Kind;
use crate::syntax::{parse, parse_theory_file, Formula, NamedFormula, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("duplicate obligation `{0}`")]
    Duplicate(String),
    #[error("obligation `{name}` has free variables: {vars}")]
    NotClosed { name: String, vars: String },
    #[error("no obligation named `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// An ordered, named set of closed sentences.
///
/// `kind` is the signature whose models the theory is about; it decides
/// which structures the search enumerates and which definitions the export
/// assumes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub name: String,
    pub kind: Kind,
    pub obligations: Vec<NamedFormula>,
}

impl Theory {
    pub fn new(name: impl Into<String>, kind: Kind, obligations: Vec<NamedFormula>) -> Result<Theory, TheoryError> {
        let mut seen = std::collections::BTreeSet::new();
        for o in &obligations {
            if !seen.insert(o.name.as_str()) {
                return Err(TheoryError::Duplicate(o.name.clone()));
            }
            let free = o.sentence.free_variables();
            if !free.is_empty() {
                let vars = free.into_iter().map(|(_, v)| v).collect::<Vec<_>>().join(", ");
                return Err(TheoryError::NotClosed { name: o.name.clone(), vars });
            }
        }
        Ok(Theory { name: name.into(), kind, obligations })
    }

    /// Reads a `.thy` file; anchors default to the obligation name.
    pub fn from_thy(name: impl Into<String>, kind: Kind, text: &str) -> Result<Theory, TheoryError> {
        let obligations = parse_theory_file(text)?
            .into_iter()
            .map(|l| NamedFormula::new(l.name.clone(), l.formula, l.name))
            .collect();
        Theory::new(name, kind, obligations)
    }

    pub fn get(&self, name: &str) -> Option<&NamedFormula> {
        self.obligations.iter().find(|o| o.name == name)
    }

    pub fn len(&self) -> usize {
        self.obligations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obligations.is_empty()
    }

    /// The theory minus one obligation.
    pub fn without(&self, name: &str) -> Result<Theory, TheoryError> {
        if self.get(name).is_none() {
            return Err(TheoryError::Unknown(name.to_string()));
        }
        Ok(Theory {
            name: format!("{}-{}", self.name, name),
            kind: self.kind,
            obligations: self.obligations.iter().filter(|o| o.name != name).cloned().collect(),
        })
    }

    /// The `.thy` rendering of the theory.
    pub fn to_thy(&self) -> String {
        let width = self.obligations.iter().map(|o| o.name.len()).max().unwrap_or(0);
        let mut out = format!("# {}\n", self.name);
        for o in &self.obligations {
            out.push_str(&format!("{:width$} : {}\n", o.name, o.sentence));
        }
        out
    }
}

fn sentence(text: &str) -> Formula {
    parse(text).unwrap_or_else(|e| panic!("built-in sentence does not parse: {e}\n{text}"))
}

fn entry(name: &str, anchor: &str, text: &str) -> NamedFormula {
    NamedFormula::new(name, sentence(text), anchor)
}

fn build(name: &str, kind: Kind, obligations: Vec<NamedFormula>) -> Theory {
    Theory::new(name, kind, obligations).expect("built-in theory is well formed")
}

/// `zz` fuses to `x`, spelled out with parthood alone (overlap expanded to a
/// common part). `w`, `v` and `t` are used as bound variables.
fn fusion_by_parthood(zz: &str, x: &str) -> String {
    format!(
        "(forall w in {zz} . P(w, {x})) and \
         (forall w . (P(w, {x}) -> (exists v in {zz} . (exists t . (P(t, v) and P(t, w))))))"
    )
}

const EXISTS_F: &str = "forall ZZ . ((exists x . x in ZZ) -> (exists y . F(ZZ, y)))";
const APPROX_F: &str = "forall XX . forall YY . forall z . (F(XX, z) and XX eq YY -> F(YY, z))";
const ID_F: &str = "forall x . forall y . (F(I(y), x) -> x = y)";
const EXT_F: &str = "forall ZZ . forall YY . forall UU . forall x . forall v . \
     (F(ZZ, x) and F(YY, x) and F(UU + ZZ, v) -> F(UU + YY, v))";
const COMP_F: &str = "forall ZZ . forall x . forall y . \
     (F(ZZ + I(x), y) and F(ZZ, y) -> (exists VV sub U(ZZ) . (F(VV, x) and (exists z . z in VV))))";
// The consequent tests U(I(x)) & U(I(z)), exactly as the axiom is usually
// displayed.
const WSP_F: &str = "forall x . forall y . \
     (F(I(x) + I(y), y) and not x = y -> \
      (exists z in U(I(y)) . not (exists u . F(U(I(x)) & U(I(z)), u))))";

const REF_P: &str = "forall x . P(x, x)";
const ANTIS_P: &str = "forall x . forall y . (P(x, y) and P(y, x) -> x = y)";
const TRANS_P: &str = "forall x . forall y . forall z . (P(x, y) and P(y, z) -> P(x, z))";
const FUN_F: &str = "forall ZZ . forall x . forall y . (F(ZZ, x) and F(ZZ, y) -> x = y)";

/// Fusion as the primitive: existence, coextensive substitution, identity,
/// extensionality, composition and the supplementation condition.
pub fn gem_f() -> Theory {
    build(
        "gem_f",
        Kind::Fusion,
        vec![
            entry("exists_F", "exists_F: every nonempty plurality has a fusion", EXISTS_F),
            entry("approx_F", "approx_F: coextensive pluralities have the same fusions", APPROX_F),
            entry("id_F", "id_F: the fusion of the things identical to y is y", ID_F),
            entry("ext_F", "ext_F: pluralities with a common fusion are interchangeable inside fusions", EXT_F),
            entry("comp_F", "comp_F: a redundant fusand is composed of components", COMP_F),
            entry("wsp_F", "wsp_F: fusion form of weak supplementation", WSP_F),
        ],
    )
}

/// Parthood as the primitive: a partial order in which every nonempty
/// plurality has exactly one fusion. Fusion and overlap are expanded.
pub fn gem_p() -> Theory {
    let exists = format!("forall ZZ . ((exists x . x in ZZ) -> (exists y . ({})))", fusion_by_parthood("ZZ", "y"));
    let unique = format!(
        "forall ZZ . forall x . forall y . ({} and {} -> x = y)",
        fusion_by_parthood("ZZ", "x"),
        fusion_by_parthood("ZZ", "y")
    );
    build(
        "gem_p",
        Kind::Part,
        vec![
            entry("ref_P", "ref_P: parthood is reflexive", REF_P),
            entry("antis_P", "antis_P: parthood is antisymmetric", ANTIS_P),
            entry("trans_P", "trans_P: parthood is transitive", TRANS_P),
            entry("exists_F", "exists_F: every nonempty plurality has a fusion (fusion by parthood)", &exists),
            entry("fun_F", "fun_F: fusions are unique (fusion by parthood)", &unique),
        ],
    )
}

/// Proper parthood presentation; on part structures `PP` is parthood between
/// distinct individuals.
pub fn pp_axioms() -> Theory {
    build(
        "pp",
        Kind::Part,
        vec![
            entry("as_PP", "as_PP: proper parthood is asymmetric", "forall x . forall y . (PP(x, y) -> not PP(y, x))"),
            entry(
                "trans_PP",
                "trans_PP: proper parthood is transitive",
                "forall x . forall y . forall z . (PP(x, y) and PP(y, z) -> PP(x, z))",
            ),
            entry(
                "dfP_PP",
                "dfP_PP: parthood is proper parthood or identity",
                "forall x . forall y . (P(x, y) <-> PP(x, y) or x = y)",
            ),
        ],
    )
}

/// A consequence that must hold in every model of the theory of `side`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma {
    pub obligation: NamedFormula,
    pub side: Kind,
}

impl Lemma {
    pub fn name(&self) -> &str {
        &self.obligation.name
    }

    /// The axioms the lemma is claimed to follow from.
    pub fn theory(&self) -> Theory {
        match self.side {
            Kind::Fusion => gem_f(),
            Kind::Part => gem_p(),
        }
    }
}

const CLASSICAL_SUM: &str = "(forall y in ZZ . P(y, x)) and (forall y . (P(y, x) -> (exists v in ZZ . O(v, y))))";

/// Every lemma, fusion side first, in a fixed order.
pub fn lemma_suite() -> Vec<Lemma> {
    let f = |name: &str, anchor: &str, text: &str| Lemma { obligation: entry(name, anchor, text), side: Kind::Fusion };
    let p = |name: &str, anchor: &str, text: &str| Lemma { obligation: entry(name, anchor, text), side: Kind::Part };
    vec![
        f("FIx", "FIx: each individual is the fusion of itself", "forall x . F(I(x), x)"),
        f(
            "P_F2",
            "P_F2: x is part of y iff x and y together fuse to y",
            "forall x . forall y . (P(x, y) <-> F(I(x) + I(y), y))",
        ),
        f("ref_P", "ref_P derived from the fusion axioms", REF_P),
        f("antis_P", "antis_P derived from the fusion axioms", ANTIS_P),
        f("trans_P", "trans_P derived from the fusion axioms", TRANS_P),
        f("fun_F", "fun_F: uniqueness of fusion", FUN_F),
        f(
            "cltosum",
            "cltosum: a fusion is a classical sum",
            &format!("forall ZZ . forall x . (F(ZZ, x) -> {CLASSICAL_SUM})"),
        ),
        f("FUIx", "FUIx: the components of x fuse to x", "forall x . F(U(I(x)), x)"),
        f(
            "sumtocl",
            "sumtocl: a classical sum is a fusion",
            &format!("forall ZZ . forall x . ({CLASSICAL_SUM} -> F(ZZ, x))"),
        ),
        f(
            "defUP",
            "defUP: components are parts of members",
            "forall ZZ . forall x . (x in U(ZZ) <-> (exists y in ZZ . P(x, y)))",
        ),
        p(
            "WSP",
            "WSP: weak supplementation",
            "forall x . forall y . (PP(x, y) -> (exists z . (PP(z, y) and not O(z, x))))",
        ),
        p(
            "F_P_Mub",
            "F_P=Mub: fusions are minimal upper bounds",
            "forall ZZ . forall x . (F(ZZ, x) <-> (exists y . y in ZZ) and (forall y in ZZ . P(y, x)) \
             and (forall y . ((forall v in ZZ . P(v, y)) -> P(x, y))))",
        ),
        p("id_F", "id_F derived from the parthood axioms", ID_F),
        p("ext_F", "ext_F: fusion extensionality", EXT_F),
        p("comp_F", "comp_F: principle of composition", COMP_F),
        p("wsp_F", "wsp_F derived from the parthood axioms", WSP_F),
        p("approx_F", "approx_F derived from the parthood axioms", APPROX_F),
        p(
            "defPF",
            "defPF: parthood is membership in a plurality fusing to the whole",
            "forall x . forall y . (P(x, y) <-> (exists ZZ . (F(ZZ, y) and x in ZZ)))",
        ),
        p(
            "defUF",
            "defUF: components are members of pluralities fusing to members",
            "forall ZZ . forall x . (x in U(ZZ) <-> (exists z in ZZ . (exists YY . (F(YY, z) and x in YY))))",
        ),
    ]
}

/// The lemmas of one side as a theory.
pub fn lemmas_for(side: Kind) -> Theory {
    let name = match side {
        Kind::Fusion => "lemmas_f",
        Kind::Part => "lemmas_p",
    };
    let obligations = lemma_suite().into_iter().filter(|l| l.side == side).map(|l| l.obligation).collect();
    build(name, side, obligations)
}

pub fn lemma(name: &str) -> Option<Lemma> {
    lemma_suite().into_iter().find(|l| l.name() == name)
}

/// Looks up a built-in theory by its name.
pub fn builtin(name: &str) -> Option<Theory> {
    match name {
        "gem_f" => Some(gem_f()),
        "gem_p" => Some(gem_p()),
        "pp" => Some(pp_axioms()),
        "lemmas_f" => Some(lemmas_for(Kind::Fusion)),
        "lemmas_p" => Some(lemmas_for(Kind::Part)),
        _ => None,
    }
}

pub const BUILTIN_NAMES: [&str; 5] = ["gem_f", "gem_p", "pp", "lemmas_f", "lemmas_p"];

/// The `.thy` file shipped alongside a built-in theory.
pub fn shipped_text(name: &str) -> Option<&'static str> {
    match name {
        "gem_f" => Some(include_str!("../theories/gem_f.thy")),
        "gem_p" => Some(include_str!("../theories/gem_p.thy")),
        "pp" => Some(include_str!("../theories/pp.thy")),
        "lemmas_f" => Some(include_str!("../theories/lemmas_f.thy")),
        "lemmas_p" => Some(include_str!("../theories/lemmas_p.thy")),
        _ => None,
    }
}

/// Names of obligations where the built-in theory and its shipped file
/// disagree (missing on either side, different order, or different sentence).
pub fn shipped_mismatches(name: &str) -> Result<Vec<String>, TheoryError> {
    let builtin = builtin(name).ok_or_else(|| TheoryError::Unknown(name.to_string()))?;
    let text = shipped_text(name).ok_or_else(|| TheoryError::Unknown(name.to_string()))?;
    let file = Theory::from_thy(name, builtin.kind, text)?;
    let mut bad = Vec::new();
    let len = builtin.len().max(file.len());
    for i in 0..len {
        match (builtin.obligations.get(i), file.obligations.get(i)) {
            (Some(a), Some(b)) if a.name == b.name && a.sentence == b.sentence => {}
            (Some(a), _) => bad.push(a.name.clone()),
            (None, Some(b)) => bad.push(b.name.clone()),
            (None, None) => {}
        }
    }
    Ok(bad)
}

/// How a displayed formula of the two axiomatizations is represented here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    /// A named obligation of a built-in theory.
    Obligation { theory: &'static str, name: &'static str },
    /// Built into the evaluator (or the export encoding) as a definition.
    Definition(&'static str),
    /// An intermediate step inside a derivation; not a separate obligation.
    DerivationStep,
}

/// Every displayed formula label with where it lives.
///
/// ```
/// use gemcheck_core::theory::{builtin, coverage, Coverage};
///
/// for (label, cov) in coverage() {
///     if let Coverage::Obligation { theory, name } = cov {
///         let t = builtin(theory).unwrap();
///         assert!(t.get(name).is_some(), "{label} missing from {theory}");
///     }
/// }
/// assert!(coverage().iter().any(|(l, _)| *l == "dfU_P"));
/// ```
pub fn coverage() -> &'static [(&'static str, Coverage)] {
    use Coverage::*;
    &[
        ("I", Definition("term former I(x)")),
        ("union", Definition("term former +")),
        ("intersection", Definition("term former &")),
        ("inclusion", Definition("atom sub")),
        ("coextension", Definition("atom eq (mutual inclusion)")),
        ("exists_F", Obligation { theory: "gem_f", name: "exists_F" }),
        ("approx_F", Obligation { theory: "gem_f", name: "approx_F" }),
        ("ext_F", Obligation { theory: "gem_f", name: "ext_F" }),
        ("id_F", Obligation { theory: "gem_f", name: "id_F" }),
        ("comp_F", Obligation { theory: "gem_f", name: "comp_F" }),
        ("wsp_F", Obligation { theory: "gem_f", name: "wsp_F" }),
        ("dfU_F", Definition("U on fusion structures")),
        ("dfP_F", Definition("P on fusion structures")),
        ("as_PP", Obligation { theory: "pp", name: "as_PP" }),
        ("trans_PP", Obligation { theory: "pp", name: "trans_PP" }),
        ("exists_F (parthood side)", Obligation { theory: "gem_p", name: "exists_F" }),
        ("fun_F", Obligation { theory: "gem_p", name: "fun_F" }),
        ("dfF_P", Definition("F on part structures")),
        ("dfP_PP", Obligation { theory: "pp", name: "dfP_PP" }),
        ("dfO", Definition("O on both kinds of structure")),
        ("ref_P", Obligation { theory: "gem_p", name: "ref_P" }),
        ("antis_P", Obligation { theory: "gem_p", name: "antis_P" }),
        ("trans_P", Obligation { theory: "gem_p", name: "trans_P" }),
        ("dfPP_P", Definition("PP on both kinds of structure")),
        ("FIx", Obligation { theory: "lemmas_f", name: "FIx" }),
        ("P_F2", Obligation { theory: "lemmas_f", name: "P_F2" }),
        ("star", DerivationStep),
        ("star-star", DerivationStep),
        ("ref/antis/trans from fusion", Obligation { theory: "lemmas_f", name: "trans_P" }),
        ("uniqueness of fusion", Obligation { theory: "lemmas_f", name: "fun_F" }),
        ("cltosum", Obligation { theory: "lemmas_f", name: "cltosum" }),
        ("FUIx", Obligation { theory: "lemmas_f", name: "FUIx" }),
        ("sumtocl", Obligation { theory: "lemmas_f", name: "sumtocl" }),
        ("WSP", Obligation { theory: "lemmas_p", name: "WSP" }),
        ("F_P=Mub", Obligation { theory: "lemmas_p", name: "F_P_Mub" }),
        ("dfMub", Definition("inlined in F_P_Mub; structures::mub")),
        ("id_F from parthood", Obligation { theory: "lemmas_p", name: "id_F" }),
        ("ext_F from parthood", Obligation { theory: "lemmas_p", name: "ext_F" }),
        ("dfU_P", Definition("U on part structures")),
        ("comp_F from parthood", Obligation { theory: "lemmas_p", name: "comp_F" }),
        ("zz*", Definition("comprehension instance in exported problems")),
        ("wsp_F from parthood", Obligation { theory: "lemmas_p", name: "wsp_F" }),
        ("approx_F from parthood", Obligation { theory: "lemmas_p", name: "approx_F" }),
        ("defPF", Obligation { theory: "lemmas_p", name: "defPF" }),
        ("defUF", Obligation { theory: "lemmas_p", name: "defUF" }),
        ("dfU_P from fusion", Obligation { theory: "lemmas_f", name: "defUP" }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::print;

    #[test]
    fn shipped_files_match_builtins() {
        for name in BUILTIN_NAMES {
            assert_eq!(shipped_mismatches(name).unwrap(), Vec::<String>::new(), "{name}");
        }
    }

    #[test]
    fn theory_sizes() {
        assert_eq!(gem_f().len(), 6);
        assert_eq!(gem_p().len(), 5);
        assert_eq!(pp_axioms().len(), 3);
        assert_eq!(lemmas_for(Kind::Fusion).len(), 10);
        assert_eq!(lemmas_for(Kind::Part).len(), 9);
    }

    #[test]
    fn every_sentence_round_trips() {
        for t in BUILTIN_NAMES.iter().map(|n| builtin(n).unwrap()) {
            for o in &t.obligations {
                assert_eq!(parse(&print(&o.sentence)).unwrap(), o.sentence, "{}/{}", t.name, o.name);
                assert!(!o.anchor.is_empty());
            }
        }
    }

    #[test]
    fn gem_p_mentions_only_parthood() {
        for o in &gem_p().obligations {
            o.sentence.visit(&mut |f| {
                assert!(
                    !matches!(f, Formula::Fuses(..) | Formula::Overlap(..) | Formula::ProperPart(..)),
                    "{} uses a defined predicate",
                    o.name
                )
            });
        }
    }

    #[test]
    fn rejects_duplicates_and_open_sentences() {
        let a = NamedFormula::new("a", sentence(REF_P), "a");
        assert_eq!(Theory::new("t", Kind::Part, vec![a.clone(), a.clone()]), Err(TheoryError::Duplicate("a".into())));
        let open = NamedFormula::new("b", sentence("P(x, y)"), "b");
        assert!(matches!(Theory::new("t", Kind::Part, vec![open]), Err(TheoryError::NotClosed { .. })));
    }

    #[test]
    fn without_drops_one() {
        let t = gem_f().without("wsp_F").unwrap();
        assert_eq!(t.len(), 5);
        assert!(t.get("wsp_F").is_none());
        assert!(gem_f().without("nope").is_err());
    }

    #[test]
    fn thy_rendering_reparses() {
        for t in BUILTIN_NAMES.iter().map(|n| builtin(n).unwrap()) {
            let again = Theory::from_thy(t.name.clone(), t.kind, &t.to_thy()).unwrap();
            let names: Vec<_> = again.obligations.iter().map(|o| (&o.name, &o.sentence)).collect();
            let orig: Vec<_> = t.obligations.iter().map(|o| (&o.name, &o.sentence)).collect();
            assert_eq!(names, orig);
        }
    }

    #[test]
    fn lemma_names_are_unique() {
        let mut names: Vec<_> = lemma_suite().iter().map(|l| l.name().to_string()).collect();
        let total = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), total);
        assert_eq!(lemma("FUIx").unwrap().side, Kind::Fusion);
        assert_eq!(lemma("defUF").unwrap().side, Kind::Part);
        assert!(lemma("nope").is_none());
    }
}
