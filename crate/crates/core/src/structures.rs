//! Finite interpretations of the two signatures.
//!
//! A [`PartStructure`] interprets the parthood predicate `P` directly; a
//! [`FusionStructure`] interprets the fusion predicate `F` between pluralities
//! and individuals. Every other predicate (`O`, `PP`, `U`, and whichever of
//! `P`/`F` is not primitive) is derived on demand through the definitional
//! translations, so both kinds of structure answer the same questions.
//!
//! Pluralities are subsets of the domain, encoded as bitmasks. The empty
//! plurality is an ordinary value.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod literal;

/// Largest domain any structure may have.
///
/// Fusion tables and plural quantifiers are indexed by all `2^n` subsets of
/// the domain, so this bounds memory at a few hundred kilobytes per table.
pub const DOMAIN_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("index {index} out of range for domain of size {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("domain size {n} exceeds the configured limit of {limit}")]
    Capacity { n: usize, limit: usize },
    #[error("line {line}: {message}")]
    Literal { line: usize, message: String },
}

/// Which primitive a structure interprets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Part,
    Fusion,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Part => "part",
            Kind::Fusion => "fusion",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "part" => Ok(Kind::Part),
            "fusion" => Ok(Kind::Fusion),
            other => Err(format!("unknown structure kind `{other}` (expected part or fusion)")),
        }
    }
}

/// A subset of a finite domain; bit `i` is set when individual `i` is one of
/// the plurality.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plurality(u64);

impl Plurality {
    pub const EMPTY: Plurality = Plurality(0);

    pub const fn from_bits(bits: u64) -> Self {
        Plurality(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub const fn singleton(x: usize) -> Self {
        Plurality(1 << x)
    }

    /// The plurality of every individual in a domain of size `n`.
    pub const fn universe(n: usize) -> Self {
        if n >= 64 {
            Plurality(u64::MAX)
        } else {
            Plurality((1u64 << n) - 1)
        }
    }

    pub fn contains(self, x: usize) -> bool {
        x < 64 && self.0 >> x & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Plurality) -> Plurality {
        Plurality(self.0 | other.0)
    }

    pub fn intersection(self, other: Plurality) -> Plurality {
        Plurality(self.0 & other.0)
    }

    pub fn with(self, x: usize) -> Plurality {
        Plurality(self.0 | 1 << x)
    }

    /// `self ≼ other`: every member of `self` is one of `other`.
    pub fn is_subset(self, other: Plurality) -> bool {
        self.0 & !other.0 == 0
    }

    /// True when every member is an index below `n`.
    pub fn fits(self, n: usize) -> bool {
        self.is_subset(Plurality::universe(n))
    }

    pub fn members(self) -> Members {
        Members(self.0)
    }

    pub fn max_member(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }
}

impl FromIterator<usize> for Plurality {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        iter.into_iter().fold(Plurality::EMPTY, Plurality::with)
    }
}

impl fmt::Debug for Plurality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Plurality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.members().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Plurality {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.members())
    }
}

/// Iterator over the members of a plurality in increasing order.
#[derive(Debug, Clone)]
pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let x = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(x)
    }
}

/// The derived vocabulary every structure answers, whatever its primitive.
///
/// Implementations must agree with the definitional translations: on part
/// structures `F` is fusion-by-parthood and `U zz` collects parts of members;
/// on fusion structures `P xy` holds when `x` is one of some plurality fusing
/// to `y`, and `U zz` collects members of pluralities fusing to members of `zz`.
pub trait Interpretation {
    fn size(&self) -> usize;
    fn fuses(&self, zz: Plurality, x: usize) -> bool;
    fn part(&self, x: usize, y: usize) -> bool;
    fn components(&self, zz: Plurality) -> Plurality;

    fn proper_part(&self, x: usize, y: usize) -> bool {
        x != y && self.part(x, y)
    }

    fn overlap(&self, x: usize, y: usize) -> bool;
}

fn check_size(n: usize) -> Result<(), StructureError> {
    if n > DOMAIN_LIMIT {
        Err(StructureError::Capacity { n, limit: DOMAIN_LIMIT })
    } else {
        Ok(())
    }
}

fn check_index(index: usize, n: usize) -> Result<(), StructureError> {
    if index >= n {
        Err(StructureError::IndexOutOfRange { index, n })
    } else {
        Ok(())
    }
}

/// Domain `{0..n-1}` with a primitive parthood relation.
#[derive(Clone)]
pub struct PartStructure {
    n: usize,
    /// `above[x]` holds every `y` with `P x y`.
    above: Vec<u64>,
    /// `below[y]` holds every `x` with `P x y`.
    below: Vec<u64>,
    fusion: OnceLock<Vec<u64>>,
}

impl PartStructure {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, StructureError> {
        check_size(n)?;
        let mut above = vec![0u64; n];
        for (x, y) in pairs {
            check_index(x, n)?;
            check_index(y, n)?;
            above[x] |= 1 << y;
        }
        Ok(Self::from_rows_unchecked(n, above))
    }

    pub fn empty(n: usize) -> Result<Self, StructureError> {
        Self::new(n, [])
    }

    pub(crate) fn from_rows_unchecked(n: usize, above: Vec<u64>) -> Self {
        let mut below = vec![0u64; n];
        for (x, row) in above.iter().enumerate() {
            for y in Plurality::from_bits(*row).members() {
                below[y] |= 1 << x;
            }
        }
        PartStructure { n, above, below, fusion: OnceLock::new() }
    }

    /// Decodes relation bit `x * n + y` of `code`.
    pub fn from_code(n: usize, code: u64) -> Self {
        debug_assert!(n * n <= 64);
        let row_mask = Plurality::universe(n).bits();
        let above = (0..n).map(|x| code >> (x * n) & row_mask).collect();
        Self::from_rows_unchecked(n, above)
    }

    /// Inverse of [`PartStructure::from_code`]; `None` when the relation has
    /// more than 64 entries.
    pub fn code(&self) -> Option<u64> {
        (self.n * self.n <= 64)
            .then(|| self.above.iter().enumerate().fold(0, |acc, (x, row)| acc | row << (x * self.n)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Individuals `y` with `P x y`.
    pub fn above(&self, x: usize) -> Plurality {
        Plurality(self.above[x])
    }

    /// Individuals `x` with `P x y`.
    pub fn below(&self, y: usize) -> Plurality {
        Plurality(self.below[y])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |x| self.above(x).members().map(move |y| (x, y)))
    }

    pub fn pair_count(&self) -> usize {
        self.above.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Whether `zz` fuses to `x`: every member is part of `x` and every part
    /// of `x` overlaps some member.
    fn fuses_direct(&self, zz: Plurality, x: usize) -> bool {
        if !zz.is_subset(self.below(x)) {
            return false;
        }
        let reach = zz.members().fold(0u64, |acc, v| acc | self.below[v]);
        self.below(x).members().all(|y| self.below[y] & reach != 0)
    }

    /// `table[zz]` holds every `x` that `zz` fuses to.
    pub fn fusion_table(&self) -> &[u64] {
        self.fusion.get_or_init(|| {
            (0u64..1 << self.n)
                .map(|zz| (0..self.n).filter(|&x| self.fuses_direct(Plurality(zz), x)).fold(0, |acc, x| acc | 1 << x))
                .collect()
        })
    }

    /// Minimal upper bounds of `zz`.
    pub fn mub(&self, zz: Plurality) -> Plurality {
        if zz.is_empty() {
            return Plurality::EMPTY;
        }
        let upper: Plurality = (0..self.n).filter(|&x| zz.is_subset(self.below(x))).collect();
        upper.members().filter(|&x| upper.is_subset(self.above(x))).collect()
    }
}

impl Interpretation for PartStructure {
    fn size(&self) -> usize {
        self.n
    }

    fn fuses(&self, zz: Plurality, x: usize) -> bool {
        self.fusion_table()[zz.bits() as usize] >> x & 1 == 1
    }

    fn part(&self, x: usize, y: usize) -> bool {
        self.above[x] >> y & 1 == 1
    }

    fn components(&self, zz: Plurality) -> Plurality {
        Plurality(zz.members().fold(0, |acc, y| acc | self.below[y]))
    }

    fn overlap(&self, x: usize, y: usize) -> bool {
        self.below[x] & self.below[y] != 0
    }
}

impl PartialEq for PartStructure {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.above == other.above
    }
}

impl Eq for PartStructure {}

impl fmt::Debug for PartStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartStructure({})", literal::format_part(self).trim_end().replace('\n', "; "))
    }
}

/// Domain `{0..n-1}` with a primitive fusion relation between pluralities and
/// individuals.
#[derive(Clone)]
pub struct FusionStructure {
    n: usize,
    /// `table[zz]` holds every `x` with `F zz x`; indexed by plurality bits.
    table: Vec<u64>,
    below: OnceLock<Vec<u64>>,
}

impl FusionStructure {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (Plurality, usize)>) -> Result<Self, StructureError> {
        check_size(n)?;
        let mut table = vec![0u64; 1 << n];
        for (zz, x) in pairs {
            if let Some(m) = zz.max_member() {
                check_index(m, n)?;
            }
            check_index(x, n)?;
            table[zz.bits() as usize] |= 1 << x;
        }
        Ok(Self::from_table_unchecked(n, table))
    }

    pub fn empty(n: usize) -> Result<Self, StructureError> {
        Self::new(n, [])
    }

    pub(crate) fn from_table_unchecked(n: usize, table: Vec<u64>) -> Self {
        FusionStructure { n, table, below: OnceLock::new() }
    }

    /// Decodes relation bit `zz * n + x` of `code`.
    pub fn from_code(n: usize, code: u64) -> Self {
        debug_assert!(n << n <= 64);
        let row_mask = Plurality::universe(n).bits();
        let table = (0..1usize << n).map(|zz| code >> (zz * n) & row_mask).collect();
        Self::from_table_unchecked(n, table)
    }

    /// Inverse of [`FusionStructure::from_code`]; `None` when the relation
    /// has more than 64 entries.
    pub fn code(&self) -> Option<u64> {
        (self.n << self.n <= 64)
            .then(|| self.table.iter().enumerate().fold(0, |acc, (zz, row)| acc | row << (zz * self.n)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    /// Individuals that `zz` fuses to.
    pub fn fusions_of(&self, zz: Plurality) -> Plurality {
        Plurality(self.table[zz.bits() as usize])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Plurality, usize)> + '_ {
        self.table
            .iter()
            .enumerate()
            .flat_map(|(zz, row)| Plurality(*row).members().map(move |x| (Plurality(zz as u64), x)))
    }

    pub fn pair_count(&self) -> usize {
        self.table.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Induced parts of `y`: members of any plurality fusing to `y`.
    pub fn below(&self, y: usize) -> Plurality {
        Plurality(self.below_rows()[y])
    }

    fn below_rows(&self) -> &[u64] {
        self.below.get_or_init(|| {
            let mut below = vec![0u64; self.n];
            for (zz, row) in self.table.iter().enumerate() {
                for y in Plurality(*row).members() {
                    below[y] |= zz as u64;
                }
            }
            below
        })
    }
}

impl Interpretation for FusionStructure {
    fn size(&self) -> usize {
        self.n
    }

    fn fuses(&self, zz: Plurality, x: usize) -> bool {
        self.table[zz.bits() as usize] >> x & 1 == 1
    }

    fn part(&self, x: usize, y: usize) -> bool {
        self.below_rows()[y] >> x & 1 == 1
    }

    fn components(&self, zz: Plurality) -> Plurality {
        let below = self.below_rows();
        Plurality(zz.members().fold(0, |acc, z| acc | below[z]))
    }

    fn overlap(&self, x: usize, y: usize) -> bool {
        let below = self.below_rows();
        below[x] & below[y] != 0
    }
}

impl PartialEq for FusionStructure {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.table == other.table
    }
}

impl Eq for FusionStructure {}

impl fmt::Debug for FusionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FusionStructure({})", literal::format_fusion(self).trim_end().replace('\n', "; "))
    }
}

/// A structure of either signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    Part(PartStructure),
    Fusion(FusionStructure),
}

impl Structure {
    pub fn kind(&self) -> Kind {
        match self {
            Structure::Part(_) => Kind::Part,
            Structure::Fusion(_) => Kind::Fusion,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Structure::Part(p) => p.n(),
            Structure::Fusion(f) => f.n(),
        }
    }

    /// Position of the structure in the enumeration order of its kind.
    pub fn code(&self) -> Option<u64> {
        match self {
            Structure::Part(p) => p.code(),
            Structure::Fusion(f) => f.code(),
        }
    }

    pub fn as_part(&self) -> Option<&PartStructure> {
        match self {
            Structure::Part(p) => Some(p),
            Structure::Fusion(_) => None,
        }
    }

    pub fn as_fusion(&self) -> Option<&FusionStructure> {
        match self {
            Structure::Fusion(f) => Some(f),
            Structure::Part(_) => None,
        }
    }

    pub fn interpretation(&self) -> &dyn Interpretation {
        match self {
            Structure::Part(p) => p,
            Structure::Fusion(f) => f,
        }
    }

    /// The structure in the text literal format.
    pub fn to_literal(&self) -> String {
        literal::format(self)
    }
}

impl From<PartStructure> for Structure {
    fn from(p: PartStructure) -> Self {
        Structure::Part(p)
    }
}

impl From<FusionStructure> for Structure {
    fn from(f: FusionStructure) -> Self {
        Structure::Fusion(f)
    }
}

/// Nonempty subsets of `k` atoms ordered by inclusion.
///
/// Individuals are the subsets of `{1..k}` sorted by cardinality, then by the
/// numeric value of their characteristic bits.
pub fn canonical_gem(k: u32) -> Result<PartStructure, StructureError> {
    let n = if k >= 63 { usize::MAX } else { (1usize << k) - 1 };
    check_size(n)?;
    let mut subsets: Vec<u64> = (1u64..1 << k).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    let pairs = subsets
        .iter()
        .enumerate()
        .flat_map(|(x, a)| subsets.iter().enumerate().filter(move |(_, b)| *a & !**b == 0).map(move |(y, _)| (x, y)));
    PartStructure::new(n, pairs.collect::<Vec<_>>())
}

/// Parthood defined from fusion: `P x y` iff `x` is one of some plurality
/// fusing to `y`.
pub fn induced_part(fs: &FusionStructure) -> PartStructure {
    let n = fs.n();
    let mut above = vec![0u64; n];
    for (zz, y) in fs.pairs() {
        for x in zz.members() {
            above[x] |= 1 << y;
        }
    }
    PartStructure::from_rows_unchecked(n, above)
}

/// Fusion defined from parthood: `zz` fuses to `x` iff every member of `zz`
/// is part of `x` and every part of `x` overlaps a member of `zz`.
pub fn induced_fusion(ps: &PartStructure) -> FusionStructure {
    FusionStructure::from_table_unchecked(ps.n(), ps.fusion_table().to_vec())
}

pub fn overlap(ps: &PartStructure, x: usize, y: usize) -> bool {
    ps.overlap(x, y)
}

pub fn proper_part(ps: &PartStructure, x: usize, y: usize) -> bool {
    ps.proper_part(x, y)
}

/// `U zz` under the definition matching the structure's signature.
pub fn components(s: &Structure, zz: Plurality) -> Plurality {
    s.interpretation().components(zz)
}

/// Minimal upper bounds of a nonempty plurality.
pub fn mub(ps: &PartStructure, zz: Plurality) -> Plurality {
    ps.mub(zz)
}
