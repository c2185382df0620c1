//! Exhaustive and randomized exploration of finite structures.
//!
//! Candidates are enumerated by relation code: bit `x * n + y` for parthood,
//! bit `zz * n + x` for fusion. The code space is cut into a fixed number of
//! contiguous chunks which workers process independently; results are merged
//! in chunk order, so output never depends on the number of workers or on
//! scheduling.
//!
//! A candidate is a model when every obligation evaluates true through the
//! formula evaluator. Obligations that are literally one of the built-in
//! axioms are first screened by the loop checkers in [`crate::native`], which
//! only ever reject early; acceptance always goes through the evaluator.

use std::collections::BTreeSet;
use std::ops::Range;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::native::NativeAxiom;
use crate::semantics::{witness_falsifies, Assignment, EvalError, Program};
use crate::structures::{
    canonical_gem, induced_fusion, induced_part, FusionStructure, Kind, PartStructure, Plurality, Structure,
    StructureError,
};
use crate::syntax::{Formula, NamedFormula};
use crate::theory::{self, Theory};

pub const DEFAULT_CAPACITY: u64 = 1 << 26;

/// Number of chunks the code space is split into, whatever the worker count.
const CHUNKS: u64 = 256;

/// Largest domain [`automorphism_count`] will permute.
pub const PERMUTATION_LIMIT: usize = 8;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("{kind} structures of size {n} give {} candidates, over the ceiling of {limit}", fmt_count(*.candidates))]
    Capacity { kind: Kind, n: usize, candidates: Option<u64>, limit: u64 },
    #[error("automorphisms are only counted up to {limit} individuals, got {n}")]
    Permutations { n: usize, limit: usize },
    #[error("witness for `{obligation}` does not falsify it on\n{structure}")]
    UnsoundWitness { obligation: String, structure: String },
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn fmt_count(c: Option<u64>) -> String {
    c.map_or_else(|| "more than 2^63".to_string(), |c| c.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub max_n_part: usize,
    pub max_n_fusion: usize,
    pub random_samples: u64,
    pub seed: u64,
    pub workers: usize,
    /// Largest number of candidates enumerated for a single size.
    pub capacity: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_n_part: 4,
            max_n_fusion: 3,
            random_samples: 10_000,
            seed: 0,
            workers: 4,
            capacity: DEFAULT_CAPACITY,
        }
    }
}

impl SearchBounds {
    pub fn max_n(&self, kind: Kind) -> usize {
        match kind {
            Kind::Part => self.max_n_part,
            Kind::Fusion => self.max_n_fusion,
        }
    }
}

/// Number of relation entries of a structure: `n²` or `n·2ⁿ`.
pub fn relation_bits(kind: Kind, n: usize) -> usize {
    match kind {
        Kind::Part => n * n,
        Kind::Fusion => n << n,
    }
}

/// `2^bits`, or `None` once that no longer fits a code.
pub fn candidate_count(kind: Kind, n: usize) -> Option<u64> {
    let bits = relation_bits(kind, n);
    (bits < 64).then(|| 1u64 << bits)
}

fn checked_count(kind: Kind, n: usize, capacity: u64) -> Result<u64, SearchError> {
    match candidate_count(kind, n) {
        Some(c) if c <= capacity => Ok(c),
        candidates => Err(SearchError::Capacity { kind, n, candidates, limit: capacity }),
    }
}

pub fn decode(kind: Kind, n: usize, code: u64) -> Structure {
    match kind {
        Kind::Part => PartStructure::from_code(n, code).into(),
        Kind::Fusion => FusionStructure::from_code(n, code).into(),
    }
}

/// Structures of one size in code order.
#[derive(Debug, Clone)]
pub struct Enumeration {
    kind: Kind,
    n: usize,
    codes: Range<u64>,
}

impl Enumeration {
    /// The candidates whose codes lie in `codes`.
    pub fn range(kind: Kind, n: usize, codes: Range<u64>) -> Enumeration {
        Enumeration { kind, n, codes }
    }

    /// Splits the remaining codes into at most `parts` contiguous pieces, in
    /// order; chaining the pieces gives back this enumeration.
    pub fn split(&self, parts: u64) -> Vec<Enumeration> {
        partition(self.codes.clone(), parts)
            .into_iter()
            .map(|codes| Enumeration { kind: self.kind, n: self.n, codes })
            .collect()
    }

    pub fn codes(&self) -> Range<u64> {
        self.codes.clone()
    }
}

impl Iterator for Enumeration {
    type Item = Structure;

    fn next(&mut self) -> Option<Structure> {
        self.codes.next().map(|code| decode(self.kind, self.n, code))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.codes.size_hint()
    }
}

/// Every structure of the given signature and size, in code order.
pub fn enumerate_structures(kind: Kind, n: usize, capacity: u64) -> Result<Enumeration, SearchError> {
    let total = checked_count(kind, n, capacity)?;
    Ok(Enumeration::range(kind, n, 0..total))
}

/// Contiguous, ordered, near-equal pieces of `codes`.
pub fn partition(codes: Range<u64>, parts: u64) -> Vec<Range<u64>> {
    let len = codes.end.saturating_sub(codes.start);
    let parts = parts.clamp(1, len.max(1));
    let (step, extra) = (len / parts, len % parts);
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = codes.start;
    for i in 0..parts {
        let end = start + step + u64::from(i < extra);
        out.push(start..end);
        start = end;
    }
    out
}

/// A structure whose relation entries are independent fair coin flips.
pub fn random_structure(kind: Kind, n: usize, rng: &mut impl Rng) -> Result<Structure, StructureError> {
    Ok(match kind {
        Kind::Part => {
            let mut pairs = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    if rng.gen::<bool>() {
                        pairs.push((x, y));
                    }
                }
            }
            PartStructure::new(n, pairs)?.into()
        }
        Kind::Fusion => {
            let mut pairs = Vec::new();
            for zz in 0u64..1 << n {
                for x in 0..n {
                    if rng.gen::<bool>() {
                        pairs.push((Plurality::from_bits(zz), x));
                    }
                }
            }
            FusionStructure::new(n, pairs)?.into()
        }
    })
}

/// `count` seeded random structures.
pub fn random_structures(
    kind: Kind,
    n: usize,
    count: u64,
    seed: u64,
) -> impl Iterator<Item = Result<Structure, StructureError>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(move |_| random_structure(kind, n, &mut rng))
}

/// Which native checker, if any, decides the same sentence on `kind`
/// structures.
pub fn native_for(kind: Kind, sentence: &Formula) -> Option<NativeAxiom> {
    use NativeAxiom::*;
    let table: [(Theory, &[(&str, NativeAxiom)]); 3] = [
        (
            theory::gem_f(),
            &[
                ("exists_F", FusionExistence),
                ("approx_F", FusionCoextensive),
                ("id_F", FusionIdentity),
                ("ext_F", FusionExtensionality),
                ("comp_F", FusionComposition),
                ("wsp_F", FusionSupplementation),
            ],
        ),
        (
            theory::gem_p(),
            &[
                ("ref_P", Reflexivity),
                ("antis_P", Antisymmetry),
                ("trans_P", Transitivity),
                ("exists_F", PartFusionExistence),
                ("fun_F", PartFusionUniqueness),
            ],
        ),
        (
            theory::pp_axioms(),
            &[("as_PP", ProperAsymmetry), ("trans_PP", ProperTransitivity), ("dfP_PP", PartFromProper)],
        ),
    ];
    table.iter().find_map(|(t, names)| {
        names.iter().find_map(|(name, axiom)| {
            let o = t.get(name)?;
            (axiom.kind() == kind && o.sentence == *sentence).then_some(*axiom)
        })
    })
}

struct Check {
    obligation: NamedFormula,
    program: Program,
    native: Option<NativeAxiom>,
}

/// A theory prepared for testing many structures of one signature.
///
/// Obligations are tried cheapest first: fewest nested plural quantifiers,
/// then fewest nested quantifiers, then theory order. The order affects
/// speed only.
pub struct CompiledTheory {
    name: String,
    checks: Vec<Check>,
}

fn cost(f: &Formula) -> (usize, usize) {
    (f.plural_depth(), f.quantifier_depth())
}

impl CompiledTheory {
    pub fn new(t: &Theory, kind: Kind) -> CompiledTheory {
        let mut checks: Vec<(usize, Check)> = t
            .obligations
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let check = Check {
                    obligation: o.clone(),
                    program: Program::compile(&o.sentence),
                    native: native_for(kind, &o.sentence),
                };
                (i, check)
            })
            .collect();
        checks.sort_by_key(|(i, c)| (cost(&c.obligation.sentence), *i));
        CompiledTheory { name: t.name.clone(), checks: checks.into_iter().map(|(_, c)| c).collect() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn screened_out(&self, s: &Structure) -> bool {
        self.checks.iter().any(|c| c.native.and_then(|a| a.check(s)) == Some(false))
    }

    /// Whether every obligation holds, screening with native checkers first.
    pub fn is_model(&self, s: &Structure) -> Result<bool, EvalError> {
        if self.screened_out(s) {
            return Ok(false);
        }
        self.holds_by_evaluation(s)
    }

    /// Whether every obligation holds, using only the evaluator.
    pub fn holds_by_evaluation(&self, s: &Structure) -> Result<bool, EvalError> {
        for c in &self.checks {
            if !c.program.holds(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Failure of one obligation on one structure, after re-verification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub obligation: String,
    pub witness: Assignment,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure: Option<String>,
}

/// Evaluates a sentence and, when it fails, re-derives the failure from the
/// witness through a fresh evaluation before handing it out.
pub fn verified_check(s: &Structure, o: &NamedFormula) -> Result<Option<Assignment>, SearchError> {
    let outcome = Program::compile(&o.sentence).check(s)?;
    if outcome.value {
        return Ok(None);
    }
    let witness = outcome.witness.unwrap_or_default();
    if !witness_falsifies(s, &o.sentence, &witness)? {
        return Err(SearchError::UnsoundWitness { obligation: o.name.clone(), structure: s.to_literal() });
    }
    Ok(Some(witness))
}

fn literal(s: &Structure) -> String {
    s.to_literal().trim_end().to_string()
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub obligation: String,
    pub anchor: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Assignment>,
}

/// Verdicts of every obligation of a theory on a single structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub theory: String,
    pub kind: Kind,
    pub n: usize,
    pub structure: String,
    pub verdicts: Vec<Verdict>,
    pub failures: Vec<Failure>,
    pub elapsed_ms: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{} structure, n={}, theory {}", self.kind, self.n, self.theory)?;
        let width = self.verdicts.iter().map(|v| v.obligation.len()).max().unwrap_or(0);
        for v in &self.verdicts {
            write!(f, "  {:width$}  {}", v.obligation, if v.passed { "pass" } else { "FAIL" })?;
            match &v.witness {
                Some(w) if !w.is_empty() => writeln!(f, "  [{w}]")?,
                _ => writeln!(f)?,
            }
        }
        let failed = self.verdicts.iter().filter(|v| !v.passed).count();
        write!(f, "{} of {} obligations hold", self.verdicts.len() - failed, self.verdicts.len())
    }
}

/// Evaluates every obligation of `t` on `s`, in theory order.
pub fn check_theory(s: &Structure, t: &Theory) -> Result<CheckReport, SearchError> {
    let start = Instant::now();
    let mut verdicts = Vec::with_capacity(t.len());
    let mut failures = Vec::new();
    for o in &t.obligations {
        let witness = verified_check(s, o)?;
        if let Some(w) = &witness {
            failures.push(Failure { obligation: o.name.clone(), witness: w.clone(), structure: None });
        }
        verdicts.push(Verdict {
            obligation: o.name.clone(),
            anchor: o.anchor.clone(),
            passed: witness.is_none(),
            witness,
        });
    }
    Ok(CheckReport {
        theory: t.name.clone(),
        kind: s.kind(),
        n: s.n(),
        structure: literal(s),
        verdicts,
        failures,
        elapsed_ms: elapsed_ms(start),
    })
}

/// Result of filtering one size.
#[derive(Debug, Clone)]
pub struct ModelScan {
    pub candidates: u64,
    pub models: Vec<Structure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelsReport {
    pub theory: String,
    pub kind: Kind,
    pub n: usize,
    pub candidates: u64,
    pub models: usize,
    pub structures: Vec<String>,
    pub failures: Vec<Failure>,
    pub seed: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Exhaustive,
    Random,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "random" => Ok(Strategy::Random),
            _ => Err(format!("unknown strategy `{s}` (expected exhaustive or random)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountermodelOutcome {
    /// A model of the base theory on which the target fails.
    Found { structure: Structure, witness: Assignment },
    /// Every size up to the bound was searched without success.
    Exhausted,
    /// The random sample budget ran out without success.
    BudgetSpent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountermodelReport {
    pub theory: String,
    pub target: String,
    pub kind: Kind,
    pub strategy: Strategy,
    pub max_n: usize,
    pub candidates: u64,
    pub outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Assignment>,
    pub seed: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PartSideTally {
    pub n: usize,
    pub candidates: u64,
    pub gem_p_models: usize,
    /// Models whose induced fusion relation satisfies every fusion axiom.
    pub induced_gem_f: usize,
    /// Models recovered by inducing fusion and then parthood again.
    pub round_trips: usize,
    /// Models on which parthood is membership in a plurality fusing to the
    /// whole, pointwise.
    pub def_pf: usize,
    /// Models on which both definitions of components agree for every
    /// plurality.
    pub def_uf: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FusionSideTally {
    pub n: usize,
    pub candidates: u64,
    pub gem_f_models: usize,
    /// Models whose induced parthood satisfies every parthood axiom.
    pub induced_gem_p: usize,
    /// Models recovered by inducing parthood and then fusion again.
    pub round_trips: usize,
    /// Models in which the empty plurality fuses to something.
    pub empty_fusions: usize,
}

/// Sizes searched on both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Correspondence {
    pub n: usize,
    pub gem_p_models: usize,
    pub gem_f_models: usize,
    /// The induced fusion relations of the parthood models are pairwise
    /// distinct and are exactly the fusion models.
    pub bijective: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub n: usize,
    pub kind: Kind,
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub max_n_part: usize,
    pub max_n_fusion: usize,
    pub seed: u64,
    pub part: Vec<PartSideTally>,
    pub fusion: Vec<FusionSideTally>,
    pub correspondence: Vec<Correspondence>,
    pub violations: Vec<Violation>,
    pub elapsed_ms: u64,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "parthood side")?;
        writeln!(f, "  n  candidates  models  induced-F  round-trip  defPF  defUF")?;
        for t in &self.part {
            writeln!(
                f,
                "  {:<2} {:>10}  {:>6}  {:>9}  {:>10}  {:>5}  {:>5}",
                t.n, t.candidates, t.gem_p_models, t.induced_gem_f, t.round_trips, t.def_pf, t.def_uf
            )?;
        }
        writeln!(f, "fusion side")?;
        writeln!(f, "  n  candidates  models  induced-P  round-trip  empty-fusions")?;
        for t in &self.fusion {
            writeln!(
                f,
                "  {:<2} {:>10}  {:>6}  {:>9}  {:>10}  {:>13}",
                t.n, t.candidates, t.gem_f_models, t.induced_gem_p, t.round_trips, t.empty_fusions
            )?;
        }
        for c in &self.correspondence {
            writeln!(
                f,
                "n={}: {} parthood models, {} fusion models, bijection {}",
                c.n,
                c.gem_p_models,
                c.gem_f_models,
                if c.bijective { "holds" } else { "FAILS" }
            )?;
        }
        for v in &self.violations {
            writeln!(f, "violation: {} n={} {}", v.kind, v.n, v.check)?;
        }
        write!(f, "{} violations", self.violations.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaRow {
    pub name: String,
    pub anchor: String,
    pub theory: String,
    pub kind: Kind,
    pub structures: usize,
    pub passed: bool,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub max_n_part: usize,
    pub max_n_fusion: usize,
    pub canonical_sizes: Vec<u32>,
    pub seed: u64,
    pub rows: Vec<LemmaRow>,
    pub elapsed_ms: u64,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

impl std::fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in &self.rows {
            writeln!(
                f,
                "{:width$}  {:8}  {:>3} structures  {}",
                r.name,
                r.theory,
                r.structures,
                if r.passed { "pass" } else { "FAIL" }
            )?;
            for fail in &r.failures {
                writeln!(f, "    [{}]", fail.witness)?;
            }
        }
        let failed = self.rows.iter().filter(|r| !r.passed).count();
        write!(f, "{} of {} lemmas hold", self.rows.len() - failed, self.rows.len())
    }
}

/// Serializes a report with every `elapsed_ms` field removed, for comparing
/// runs.
pub fn json_without_timing<T: Serialize>(report: &T) -> String {
    let mut value = serde_json::to_value(report).expect("reports serialize");
    strip_timing(&mut value);
    serde_json::to_string_pretty(&value).expect("values serialize")
}

pub fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("elapsed_ms");
            map.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

/// Runs searches on a private pool of `bounds.workers` threads.
pub struct Search {
    bounds: SearchBounds,
    pool: rayon::ThreadPool,
}

impl Search {
    pub fn new(bounds: SearchBounds) -> Result<Search, SearchError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(bounds.workers.max(1))
            .build()
            .map_err(|e| SearchError::Pool(e.to_string()))?;
        Ok(Search { bounds, pool })
    }

    pub fn bounds(&self) -> &SearchBounds {
        &self.bounds
    }

    /// Maps `f` over the chunks of `0..total` in parallel, keeping chunk
    /// order.
    fn chunked<T, F>(&self, total: u64, f: F) -> Result<Vec<T>, SearchError>
    where
        T: Send,
        F: Fn(Range<u64>) -> Result<T, SearchError> + Send + Sync,
    {
        let chunks = partition(0..total, CHUNKS);
        self.pool.install(|| chunks.into_par_iter().map(f).collect())
    }

    /// Models of `t` among all `kind` structures of size `n`, in code order.
    pub fn filter_models(&self, kind: Kind, n: usize, t: &Theory) -> Result<ModelScan, SearchError> {
        let total = checked_count(kind, n, self.bounds.capacity)?;
        let compiled = CompiledTheory::new(t, kind);
        let pieces = self.chunked(total, |codes| {
            let mut found = Vec::new();
            for code in codes {
                let s = decode(kind, n, code);
                if compiled.is_model(&s)? {
                    found.push(s);
                }
            }
            Ok(found)
        })?;
        Ok(ModelScan { candidates: total, models: pieces.into_iter().flatten().collect() })
    }

    pub fn count_models(&self, kind: Kind, n: usize, t: &Theory) -> Result<usize, SearchError> {
        Ok(self.filter_models(kind, n, t)?.models.len())
    }

    pub fn models_report(&self, kind: Kind, n: usize, t: &Theory) -> Result<ModelsReport, SearchError> {
        let start = Instant::now();
        let scan = self.filter_models(kind, n, t)?;
        Ok(ModelsReport {
            theory: t.name.clone(),
            kind,
            n,
            candidates: scan.candidates,
            models: scan.models.len(),
            structures: scan.models.iter().map(literal).collect(),
            failures: Vec::new(),
            seed: self.bounds.seed,
            elapsed_ms: elapsed_ms(start),
        })
    }

    /// A model of `base` falsifying `target`, searched size by size up to
    /// the bound for `base.kind` (exhaustive), or among random structures of
    /// exactly that size (random).
    pub fn find_countermodel(
        &self,
        base: &Theory,
        target: &NamedFormula,
        strategy: Strategy,
    ) -> Result<(CountermodelOutcome, u64), SearchError> {
        let kind = base.kind;
        let compiled = CompiledTheory::new(base, kind);
        let target_program = Program::compile(&target.sentence);
        let is_counter = |s: &Structure| -> Result<bool, SearchError> {
            Ok(!compiled.screened_out(s) && !target_program.holds(s)? && compiled.holds_by_evaluation(s)?)
        };
        let max_n = self.bounds.max_n(kind);
        let mut candidates = 0u64;
        let found = match strategy {
            Strategy::Exhaustive => {
                let mut found = None;
                for n in 0..=max_n {
                    let total = checked_count(kind, n, self.bounds.capacity)?;
                    let chunks = partition(0..total, CHUNKS);
                    let hit = self.pool.install(|| {
                        chunks.into_par_iter().find_map_first(|codes| {
                            for code in codes {
                                let s = decode(kind, n, code);
                                match is_counter(&s) {
                                    Ok(true) => return Some(Ok((s, code))),
                                    Ok(false) => {}
                                    Err(e) => return Some(Err(e)),
                                }
                            }
                            None
                        })
                    });
                    match hit.transpose()? {
                        Some((s, code)) => {
                            candidates += code + 1;
                            found = Some(s);
                            break;
                        }
                        None => candidates += total,
                    }
                }
                found
            }
            Strategy::Random => {
                let mut found = None;
                for s in random_structures(kind, max_n, self.bounds.random_samples, self.bounds.seed) {
                    let s = s?;
                    candidates += 1;
                    if is_counter(&s)? {
                        found = Some(s);
                        break;
                    }
                }
                found
            }
        };
        let Some(structure) = found else {
            let outcome = match strategy {
                Strategy::Exhaustive => CountermodelOutcome::Exhausted,
                Strategy::Random => CountermodelOutcome::BudgetSpent,
            };
            return Ok((outcome, candidates));
        };
        for o in &base.obligations {
            if verified_check(&structure, o)?.is_some() {
                return Err(SearchError::UnsoundWitness {
                    obligation: o.name.clone(),
                    structure: structure.to_literal(),
                });
            }
        }
        match verified_check(&structure, target)? {
            Some(witness) => Ok((CountermodelOutcome::Found { structure, witness }, candidates)),
            None => {
                Err(SearchError::UnsoundWitness { obligation: target.name.clone(), structure: structure.to_literal() })
            }
        }
    }

    pub fn countermodel_report(
        &self,
        base: &Theory,
        target: &NamedFormula,
        strategy: Strategy,
    ) -> Result<CountermodelReport, SearchError> {
        let start = Instant::now();
        let (outcome, candidates) = self.find_countermodel(base, target, strategy)?;
        let mut report = CountermodelReport {
            theory: base.name.clone(),
            target: target.name.clone(),
            kind: base.kind,
            strategy,
            max_n: self.bounds.max_n(base.kind),
            candidates,
            outcome: "",
            n: None,
            structure: None,
            witness: None,
            seed: self.bounds.seed,
            elapsed_ms: 0,
        };
        match outcome {
            CountermodelOutcome::Found { structure, witness } => {
                report.outcome = "found";
                report.n = Some(structure.n());
                report.structure = Some(literal(&structure));
                report.witness = Some(witness);
            }
            CountermodelOutcome::Exhausted => report.outcome = "exhausted",
            CountermodelOutcome::BudgetSpent => report.outcome = "budget_spent",
        }
        report.elapsed_ms = elapsed_ms(start);
        Ok(report)
    }

    /// Checks that the two axiomatizations have the same finite models once
    /// each primitive is defined from the other.
    pub fn verify_equivalence(&self) -> Result<EquivalenceReport, SearchError> {
        let start = Instant::now();
        let gem_f = theory::gem_f();
        let gem_p = theory::gem_p();
        let mut violations = Vec::new();
        let violation = |n: usize, kind: Kind, check: &str, s: &Structure, failure: Option<Failure>| Violation {
            n,
            kind,
            check: check.to_string(),
            structure: Some(literal(s)),
            failure,
        };

        let mut part = Vec::new();
        let mut part_images = Vec::new();
        for n in 1..=self.bounds.max_n_part {
            let scan = self.filter_models(Kind::Part, n, &gem_p)?;
            let mut tally =
                PartSideTally { n, candidates: scan.candidates, gem_p_models: scan.models.len(), ..Default::default() };
            let mut images = Vec::new();
            for s in &scan.models {
                let p = s.as_part().expect("part enumeration");
                let f = induced_fusion(p);
                let fs = Structure::from(f.clone());
                let report = check_theory(&fs, &gem_f)?;
                if report.passed() {
                    tally.induced_gem_f += 1;
                } else {
                    for fail in report.failures {
                        violations.push(violation(n, Kind::Part, "induced fusion satisfies gem_f", s, Some(fail)));
                    }
                }
                if induced_part(&f) == *p {
                    tally.round_trips += 1;
                } else {
                    violations.push(violation(n, Kind::Part, "round trip part -> fusion -> part", s, None));
                }
                if part_is_fusion_membership(p, &f) {
                    tally.def_pf += 1;
                } else {
                    violations.push(violation(n, Kind::Part, "defPF pointwise", s, None));
                }
                if components_agree(p, &f) {
                    tally.def_uf += 1;
                } else {
                    violations.push(violation(n, Kind::Part, "defUF pointwise", s, None));
                }
                images.push(f);
            }
            part.push(tally);
            part_images.push(images);
        }

        let mut fusion = Vec::new();
        let mut fusion_models = Vec::new();
        for n in 1..=self.bounds.max_n_fusion {
            let scan = self.filter_models(Kind::Fusion, n, &gem_f)?;
            let mut tally = FusionSideTally {
                n,
                candidates: scan.candidates,
                gem_f_models: scan.models.len(),
                ..Default::default()
            };
            let mut models = Vec::new();
            for s in &scan.models {
                let f = s.as_fusion().expect("fusion enumeration");
                let p = induced_part(f);
                let report = check_theory(&Structure::from(p.clone()), &gem_p)?;
                if report.passed() {
                    tally.induced_gem_p += 1;
                } else {
                    for fail in report.failures {
                        violations.push(violation(n, Kind::Fusion, "induced parthood satisfies gem_p", s, Some(fail)));
                    }
                }
                if induced_fusion(&p) == *f {
                    tally.round_trips += 1;
                } else {
                    violations.push(violation(n, Kind::Fusion, "round trip fusion -> part -> fusion", s, None));
                }
                if !f.fusions_of(Plurality::EMPTY).is_empty() {
                    tally.empty_fusions += 1;
                }
                models.push(f.clone());
            }
            fusion.push(tally);
            fusion_models.push(models);
        }

        let mut correspondence = Vec::new();
        for n in 1..=self.bounds.max_n_part.min(self.bounds.max_n_fusion) {
            let images = &part_images[n - 1];
            let models = &fusion_models[n - 1];
            let image_codes: BTreeSet<_> = images.iter().map(FusionStructure::table).collect();
            let model_codes: BTreeSet<_> = models.iter().map(FusionStructure::table).collect();
            let bijective = image_codes.len() == images.len() && image_codes == model_codes;
            if !bijective {
                violations.push(Violation {
                    n,
                    kind: Kind::Fusion,
                    check: "induced fusion is a bijection onto fusion models".into(),
                    structure: None,
                    failure: None,
                });
            }
            correspondence.push(Correspondence {
                n,
                gem_p_models: images.len(),
                gem_f_models: models.len(),
                bijective,
            });
        }

        Ok(EquivalenceReport {
            max_n_part: self.bounds.max_n_part,
            max_n_fusion: self.bounds.max_n_fusion,
            seed: self.bounds.seed,
            part,
            fusion,
            correspondence,
            violations,
            elapsed_ms: elapsed_ms(start),
        })
    }

    /// Evaluates lemmas on every model of their theory up to the bounds and
    /// on the canonical models built from `canonical` atoms. `only` selects a
    /// single lemma by name.
    pub fn check_lemmas(&self, only: Option<&str>, canonical: &[u32]) -> Result<LemmaReport, SearchError> {
        let start = Instant::now();
        let lemmas: Vec<_> =
            theory::lemma_suite().into_iter().filter(|l| only.is_none_or(|name| l.name() == name)).collect();
        let mut rows = Vec::new();
        for side in [Kind::Fusion, Kind::Part] {
            let side_lemmas: Vec<_> = lemmas.iter().filter(|l| l.side == side).collect();
            if side_lemmas.is_empty() {
                continue;
            }
            let axioms = side_lemmas[0].theory();
            let mut structures = Vec::new();
            for n in 1..=self.bounds.max_n(side) {
                structures.extend(self.filter_models(side, n, &axioms)?.models);
            }
            for &k in canonical {
                let p = canonical_gem(k)?;
                structures.push(match side {
                    Kind::Part => p.into(),
                    Kind::Fusion => induced_fusion(&p).into(),
                });
            }
            for lemma in side_lemmas {
                let o = &lemma.obligation;
                let results = self.pool.install(|| {
                    structures.par_iter().map(|s| Ok(verified_check(s, o)?.map(|w| (literal(s), w)))).collect::<Result<
                        Vec<_>,
                        SearchError,
                    >>(
                    )
                })?;
                let failures: Vec<_> = results
                    .into_iter()
                    .flatten()
                    .map(|(structure, witness)| Failure {
                        obligation: o.name.clone(),
                        witness,
                        structure: Some(structure),
                    })
                    .collect();
                rows.push(LemmaRow {
                    name: o.name.clone(),
                    anchor: o.anchor.clone(),
                    theory: axioms.name.clone(),
                    kind: side,
                    structures: structures.len(),
                    passed: failures.is_empty(),
                    failures,
                });
            }
        }
        Ok(LemmaReport {
            max_n_part: self.bounds.max_n_part,
            max_n_fusion: self.bounds.max_n_fusion,
            canonical_sizes: canonical.to_vec(),
            seed: self.bounds.seed,
            rows,
            elapsed_ms: elapsed_ms(start),
        })
    }
}

/// `P x y` iff some plurality containing `x` fuses to `y`, computed from the
/// raw relations.
fn part_is_fusion_membership(p: &PartStructure, f: &FusionStructure) -> bool {
    let n = p.n();
    let table = f.table();
    (0..n).all(|x| {
        (0..n).all(|y| {
            let by_fusion = table.iter().enumerate().any(|(zz, row)| row >> y & 1 == 1 && zz >> x & 1 == 1);
            p.above(x).contains(y) == by_fusion
        })
    })
}

/// Parts of members of `zz` are exactly the members of pluralities fusing to
/// members of `zz`, for every `zz`.
fn components_agree(p: &PartStructure, f: &FusionStructure) -> bool {
    let n = p.n();
    let table = f.table();
    (0u64..1 << n).all(|zz| {
        let mut by_part = 0u64;
        for y in Plurality::from_bits(zz).members() {
            by_part |= p.below(y).bits();
        }
        let mut by_fusion = 0u64;
        for (yy, row) in table.iter().enumerate() {
            if row & zz != 0 {
                by_fusion |= yy as u64;
            }
        }
        by_part == by_fusion
    })
}

/// Permutations `π` of the domain with `P x y ⇔ P πx πy`.
pub fn automorphism_count(p: &PartStructure) -> Result<u64, SearchError> {
    let n = p.n();
    if n > PERMUTATION_LIMIT {
        return Err(SearchError::Permutations { n, limit: PERMUTATION_LIMIT });
    }
    let mut count = 0;
    for_each_permutation(n, |perm| {
        let preserves = (0..n).all(|x| (0..n).all(|y| p.above(x).contains(y) == p.above(perm[x]).contains(perm[y])));
        count += u64::from(preserves);
    });
    Ok(count)
}

/// Calls `f` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// The structure with `x` renamed to `perm[x]`.
pub fn relabel(p: &PartStructure, perm: &[usize]) -> PartStructure {
    PartStructure::new(p.n(), p.pairs().map(|(x, y)| (perm[x], perm[y])).collect::<Vec<_>>())
        .expect("a permutation keeps indices in range")
}

/// Labeled models on `2^k − 1` individuals isomorphic to `canonical_gem(k)`:
/// `(2^k − 1)! / |Aut|`.
pub fn labeled_count(k: u32) -> Result<u64, SearchError> {
    let p = canonical_gem(k)?;
    let aut = automorphism_count(&p)?;
    let factorial: u64 = (1..=p.n() as u64).product();
    Ok(factorial / aut)
}
