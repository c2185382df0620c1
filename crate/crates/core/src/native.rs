//! Hand-written loop checkers for the axioms of both theories.
//!
//! These work directly on the raw relations (rows of bits) and never touch the
//! formula evaluator or the derived-predicate code in `structures`. They serve
//! two purposes: an independent oracle for the evaluator, and a fast first
//! pass when filtering millions of candidate structures.

use crate::structures::{FusionStructure, Kind, PartStructure, Structure};

/// Axioms with a native checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NativeAxiom {
    // Parthood side.
    Reflexivity,
    Antisymmetry,
    Transitivity,
    /// Every nonempty plurality has a fusion, fusion defined from parthood.
    PartFusionExistence,
    /// Fusions defined from parthood are unique.
    PartFusionUniqueness,
    ProperAsymmetry,
    ProperTransitivity,
    /// Parthood is proper parthood or identity.
    PartFromProper,
    // Fusion side.
    FusionExistence,
    FusionCoextensive,
    FusionExtensionality,
    FusionIdentity,
    FusionComposition,
    FusionSupplementation,
}

impl NativeAxiom {
    pub fn kind(self) -> Kind {
        use NativeAxiom::*;
        match self {
            Reflexivity | Antisymmetry | Transitivity | PartFusionExistence | PartFusionUniqueness
            | ProperAsymmetry | ProperTransitivity | PartFromProper => Kind::Part,
            _ => Kind::Fusion,
        }
    }

    /// `None` when the structure has the other signature.
    pub fn check(self, s: &Structure) -> Option<bool> {
        match s {
            Structure::Part(p) if self.kind() == Kind::Part => Some(self.check_part(p)),
            Structure::Fusion(f) if self.kind() == Kind::Fusion => Some(self.check_fusion(f)),
            _ => None,
        }
    }

    pub fn check_part(self, p: &PartStructure) -> bool {
        let rows = part_rows(p);
        use NativeAxiom::*;
        match self {
            Reflexivity => reflexive(&rows),
            Antisymmetry => antisymmetric(&rows),
            Transitivity => transitive(&rows),
            PartFusionExistence => fusion_exists_by_part(&rows),
            PartFusionUniqueness => fusion_unique_by_part(&rows),
            ProperAsymmetry => proper_asymmetric(&rows),
            ProperTransitivity => proper_transitive(&rows),
            PartFromProper => part_from_proper(&rows),
            _ => panic!("{self:?} is not a parthood axiom"),
        }
    }

    pub fn check_fusion(self, f: &FusionStructure) -> bool {
        let n = f.n();
        let t = f.table();
        use NativeAxiom::*;
        match self {
            FusionExistence => fusion_existence(n, t),
            FusionCoextensive => fusion_coextensive(n, t),
            FusionExtensionality => fusion_extensionality(n, t),
            FusionIdentity => fusion_identity(n, t),
            FusionComposition => fusion_composition(n, t),
            FusionSupplementation => fusion_supplementation(n, t),
            _ => panic!("{self:?} is not a fusion axiom"),
        }
    }
}

/// `rows[x][y]` is `P x y`.
fn part_rows(p: &PartStructure) -> Vec<Vec<bool>> {
    let n = p.n();
    let mut rows = vec![vec![false; n]; n];
    for (x, y) in p.pairs() {
        rows[x][y] = true;
    }
    rows
}

fn reflexive(p: &[Vec<bool>]) -> bool {
    (0..p.len()).all(|x| p[x][x])
}

fn antisymmetric(p: &[Vec<bool>]) -> bool {
    let n = p.len();
    for x in 0..n {
        for y in 0..n {
            if p[x][y] && p[y][x] && x != y {
                return false;
            }
        }
    }
    true
}

fn transitive(p: &[Vec<bool>]) -> bool {
    let n = p.len();
    for x in 0..n {
        for y in 0..n {
            if !p[x][y] {
                continue;
            }
            for z in 0..n {
                if p[y][z] && !p[x][z] {
                    return false;
                }
            }
        }
    }
    true
}

fn overlaps(p: &[Vec<bool>], x: usize, y: usize) -> bool {
    (0..p.len()).any(|z| p[z][x] && p[z][y])
}

/// Fusion from parthood: members all part of `x`, every part of `x`
/// overlapping a member.
fn fuses_by_part(p: &[Vec<bool>], members: &[usize], x: usize) -> bool {
    let n = p.len();
    members.iter().all(|&m| p[m][x]) && (0..n).all(|y| !p[y][x] || members.iter().any(|&v| overlaps(p, v, y)))
}

fn members_of(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

fn fusion_exists_by_part(p: &[Vec<bool>]) -> bool {
    let n = p.len();
    (1u64..1 << n).all(|zz| {
        let members = members_of(zz, n);
        (0..n).any(|x| fuses_by_part(p, &members, x))
    })
}

fn fusion_unique_by_part(p: &[Vec<bool>]) -> bool {
    let n = p.len();
    (0u64..1 << n).all(|zz| {
        let members = members_of(zz, n);
        (0..n).filter(|&x| fuses_by_part(p, &members, x)).count() <= 1
    })
}

fn proper(p: &[Vec<bool>], x: usize, y: usize) -> bool {
    p[x][y] && x != y
}

fn proper_asymmetric(p: &[Vec<bool>]) -> bool {
    let n = p.len();
    (0..n).all(|x| (0..n).all(|y| !proper(p, x, y) || !proper(p, y, x)))
}

fn proper_transitive(p: &[Vec<bool>]) -> bool {
    let n = p.len();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if proper(p, x, y) && proper(p, y, z) && !proper(p, x, z) {
                    return false;
                }
            }
        }
    }
    true
}

fn part_from_proper(p: &[Vec<bool>]) -> bool {
    let n = p.len();
    (0..n).all(|x| (0..n).all(|y| p[x][y] == (proper(p, x, y) || x == y)))
}

fn fuses(t: &[u64], zz: u64, x: usize) -> bool {
    t[zz as usize] >> x & 1 == 1
}

/// `x ≺ U zz` iff some member `z` of `zz` has a plurality `yy` fusing to it
/// with `x` among `yy`.
fn components_by_fusion(n: usize, t: &[u64], zz: u64) -> u64 {
    let mut out = 0u64;
    for z in 0..n {
        if zz >> z & 1 == 0 {
            continue;
        }
        for (yy, row) in t.iter().enumerate() {
            if row >> z & 1 == 1 {
                out |= yy as u64;
            }
        }
    }
    out
}

fn fusion_existence(n: usize, t: &[u64]) -> bool {
    (1u64..1 << n).all(|zz| (0..n).any(|y| fuses(t, zz, y)))
}

fn fusion_coextensive(n: usize, t: &[u64]) -> bool {
    for xx in 0u64..1 << n {
        for yy in 0u64..1 << n {
            // Pluralities are coextensive exactly when they are the same set.
            let same = (0..n).all(|z| (xx >> z & 1) == (yy >> z & 1));
            for z in 0..n {
                if same && fuses(t, xx, z) && !fuses(t, yy, z) {
                    return false;
                }
            }
        }
    }
    true
}

fn fusion_extensionality(n: usize, t: &[u64]) -> bool {
    for zz in 0u64..1 << n {
        for yy in 0u64..1 << n {
            let shared = (0..n).any(|x| fuses(t, zz, x) && fuses(t, yy, x));
            if !shared {
                continue;
            }
            for uu in 0u64..1 << n {
                for v in 0..n {
                    if fuses(t, uu | zz, v) && !fuses(t, uu | yy, v) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn fusion_identity(n: usize, t: &[u64]) -> bool {
    (0..n).all(|y| (0..n).all(|x| !fuses(t, 1 << y, x) || x == y))
}

fn fusion_composition(n: usize, t: &[u64]) -> bool {
    for zz in 0u64..1 << n {
        let comps = components_by_fusion(n, t, zz);
        for x in 0..n {
            for y in 0..n {
                if !(fuses(t, zz | 1 << x, y) && fuses(t, zz, y)) {
                    continue;
                }
                let found = (1u64..1 << n).any(|vv| vv & !comps == 0 && fuses(t, vv, x));
                if !found {
                    return false;
                }
            }
        }
    }
    true
}

fn fusion_supplementation(n: usize, t: &[u64]) -> bool {
    for x in 0..n {
        for y in 0..n {
            if x == y || !fuses(t, 1 << x | 1 << y, y) {
                continue;
            }
            let ux = components_by_fusion(n, t, 1 << x);
            let uy = components_by_fusion(n, t, 1 << y);
            let found = (0..n).any(|z| {
                uy >> z & 1 == 1 && {
                    let common = ux & components_by_fusion(n, t, 1 << z);
                    (0..n).all(|u| !fuses(t, common, u))
                }
            });
            if !found {
                return false;
            }
        }
    }
    true
}
