//! The independence relation `A ⊥_B C` iff `ABC = AB ⊗_B BC`, and sweeps
//! that test its axioms and the deletion properties on every member of
//! `Forb_c(S)` up to a given size.
//!
//! Sweeps only use role assignments that cover every vertex of the ambient
//! structure. Configurations that leave vertices unused live in a smaller
//! induced substructure, which is enumerated at its own size.

use rayon::prelude::*;
use serde::Serialize;

use crate::amalgam::check_compatible;
use crate::color::{Color, ColorLanguage};
use crate::enumerate::enumerate_forb;
use crate::error::{Error, Result};
use crate::structure::{is_member_unchecked, structure_isomorphic, CompleteStructure};
use crate::triangle::TriangleSet;

/// Largest ambient size accepted by the sweeps.
pub const MAX_SIZE_CEILING: usize = 7;

/// Violations retained per report (or per base size for deletion reports).
pub const WITNESS_CAP: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceQuery {
    pub ambient: CompleteStructure,
    pub set_a: Vec<usize>,
    pub set_b: Vec<usize>,
    pub set_c: Vec<usize>,
}

/// A ternary relation on disjoint vertex sets (bitmasks) of a structure.
pub trait Relation: Sync {
    fn independent(&self, m: &CompleteStructure, a: u32, b: u32, c: u32) -> bool;
}

/// The relation induced by prioritised amalgamation.
#[derive(Clone, Copy, Debug)]
pub struct Prioritised<'a> {
    pub lang: &'a ColorLanguage,
    pub s: &'a TriangleSet,
}

impl Relation for Prioritised<'_> {
    fn independent(&self, m: &CompleteStructure, a: u32, b: u32, c: u32) -> bool {
        bits(a).all(|x| {
            bits(c).all(|y| completion_color(m, x, y, b, self.lang, self.s) == Some(m.color(x, y)))
        })
    }
}

/// The color `⊗_B` assigns to `(x, y)` given the edges of `x` and `y` to `B`.
pub(crate) fn completion_color(
    m: &CompleteStructure,
    x: usize,
    y: usize,
    base: u32,
    lang: &ColorLanguage,
    s: &TriangleSet,
) -> Option<Color> {
    let blocked = bits(base).fold(0, |acc, b| acc | s.veto(m.color(x, b), m.color(b, y)));
    lang.first_unblocked(blocked)
}

pub(crate) fn bits(mask: u32) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(v)
    })
}

fn mask_of(set: &[usize], n: usize) -> Result<u32> {
    let mut mask = 0u32;
    for &v in set {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, len: n });
        }
        mask |= 1 << v;
    }
    Ok(mask)
}

fn mask_vec(mask: u32) -> Vec<usize> {
    bits(mask).collect()
}

/// Whether `A ⊥_B C` holds in the ambient structure.
///
/// Overlap of `A` and `B` (or `C` and `B`) is allowed and ignored; `A` and
/// `C` may only meet inside `B`.
pub fn independent(q: &IndependenceQuery, lang: &ColorLanguage, s: &TriangleSet) -> Result<bool> {
    check_compatible(lang, s)?;
    let m = &q.ambient;
    m.check_palette(s.palette())?;
    let n = m.len();
    if n > 32 {
        return Err(Error::input(
            "ambient structures are limited to 32 vertices",
        ));
    }
    if !is_member_unchecked(m, s) {
        return Err(Error::NotInClass(
            "ambient structure contains a forbidden triangle".into(),
        ));
    }
    let (a, b, c) = (
        mask_of(&q.set_a, n)?,
        mask_of(&q.set_b, n)?,
        mask_of(&q.set_c, n)?,
    );
    if a & c & !b != 0 {
        return Err(Error::input("A and C may only intersect inside B"));
    }
    Ok(Prioritised { lang, s }.independent(m, a & !b, b, c & !b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Monotonicity,
    Transitivity,
    Symmetry,
    Stationarity,
    Existence,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::Monotonicity,
        Axiom::Transitivity,
        Axiom::Symmetry,
        Axiom::Stationarity,
        Axiom::Existence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Monotonicity => "monotonicity",
            Axiom::Transitivity => "transitivity",
            Axiom::Symmetry => "symmetry",
            Axiom::Stationarity => "stationarity",
            Axiom::Existence => "existence",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name() == text)
            .ok_or_else(|| Error::input(format!("unknown axiom {text:?}")))
    }
}

/// Size caps for the vertex sets in a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Largest `|B|`.
    pub base: usize,
    /// Largest `|A \ B|` and `|C \ B|`.
    pub side: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { base: 3, side: 2 }
    }
}

/// One offending configuration: the ambient structure and its named sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub structure: CompleteStructure,
    pub sets: Vec<(&'static str, Vec<usize>)>,
    /// Colors of a type vector, where the check involves one.
    pub type_colors: Option<Vec<Color>>,
}

impl Witness {
    pub fn set(&self, name: &str) -> Option<&[usize]> {
        self.sets
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub max_size: usize,
    pub caps: Caps,
    pub structures_checked: u64,
    pub instances_checked: u64,
    pub violation_count: u64,
    /// The first [`WITNESS_CAP`] violations, by size, canonical order and
    /// role assignment.
    pub violations: Vec<Witness>,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.violation_count == 0
    }
}

/// Checks `axiom` for the prioritised relation on `Forb_c(S)` up to
/// `max_size` vertices.
pub fn check_axiom(
    axiom: Axiom,
    s: &TriangleSet,
    lang: &ColorLanguage,
    max_size: usize,
    caps: Caps,
) -> Result<AxiomReport> {
    check_axiom_with(&Prioritised { lang, s }, axiom, s, lang, max_size, caps)
}

/// As [`check_axiom`], for an arbitrary relation. `lang` supplies the
/// completion used to construct realizations for existence.
pub fn check_axiom_with<R: Relation>(
    rel: &R,
    axiom: Axiom,
    s: &TriangleSet,
    lang: &ColorLanguage,
    max_size: usize,
    caps: Caps,
) -> Result<AxiomReport> {
    check_compatible(lang, s)?;
    check_max_size(max_size)?;
    let levels = enumerate_forb(s, max_size);
    let mut report = AxiomReport {
        axiom,
        max_size,
        caps,
        structures_checked: 0,
        instances_checked: 0,
        violation_count: 0,
        violations: Vec::new(),
    };
    for (n, level) in levels.iter().enumerate() {
        let roles = RoleTable::new(axiom, n, caps);
        let results: Vec<Tally> = level
            .par_iter()
            .map(|m| match axiom {
                Axiom::Existence => existence(rel, m, s, lang, caps),
                _ => roles.check(rel, m, axiom),
            })
            .collect();
        report.structures_checked += level.len() as u64;
        for t in results {
            report.instances_checked += t.checked;
            report.violation_count += t.violations.len() as u64;
            for w in t.violations {
                if report.violations.len() < WITNESS_CAP {
                    report.violations.push(w);
                }
            }
        }
    }
    Ok(report)
}

fn check_max_size(max_size: usize) -> Result<()> {
    if max_size > MAX_SIZE_CEILING {
        return Err(Error::Capability(format!(
            "max size {max_size} exceeds the ceiling {MAX_SIZE_CEILING}"
        )));
    }
    Ok(())
}

#[derive(Default)]
struct Tally {
    checked: u64,
    violations: Vec<Witness>,
}

/// All role assignments of `n` vertices for one axiom, as masks.
struct RoleTable {
    rows: Vec<[u32; 4]>,
}

impl RoleTable {
    fn new(axiom: Axiom, n: usize, caps: Caps) -> Self {
        let roles = match axiom {
            Axiom::Symmetry => 3,
            Axiom::Existence => 0,
            _ => 4,
        };
        let mut rows = Vec::new();
        if roles == 0 {
            return RoleTable { rows };
        }
        let total = (roles as u64).pow(n as u32);
        for code in 0..total {
            let mut masks = [0u32; 4];
            let mut x = code;
            for v in 0..n {
                masks[(x % roles as u64) as usize] |= 1 << v;
                x /= roles as u64;
            }
            let size = |m: u32| m.count_ones() as usize;
            let ok = match axiom {
                // [A, B, C, D]
                Axiom::Monotonicity | Axiom::Transitivity => {
                    masks[0] != 0
                        && masks[2] != 0
                        && masks[3] != 0
                        && size(masks[0]) <= caps.side
                        && size(masks[2] | masks[3]) <= caps.side
                        && size(masks[1]) <= caps.base
                }
                // [A, B, C]
                Axiom::Symmetry => {
                    masks[0] != 0
                        && masks[2] != 0
                        && size(masks[0]) <= caps.side
                        && size(masks[2]) <= caps.side
                        && size(masks[1]) <= caps.base
                }
                // [A, A', B, C]
                Axiom::Stationarity => {
                    masks[0] != 0
                        && size(masks[0]) == size(masks[1])
                        && size(masks[0]) <= caps.side.min(2)
                        && masks[3] != 0
                        && size(masks[3]) <= caps.side
                        && size(masks[2]) <= caps.base
                        && masks[0] < masks[1]
                }
                Axiom::Existence => unreachable!(),
            };
            if ok {
                rows.push(masks);
            }
        }
        RoleTable { rows }
    }

    fn check<R: Relation>(&self, rel: &R, m: &CompleteStructure, axiom: Axiom) -> Tally {
        let mut t = Tally::default();
        for &[p, q, r, u] in &self.rows {
            match axiom {
                Axiom::Monotonicity => {
                    let (a, b, c, d) = (p, q, r, u);
                    t.checked += 1;
                    if rel.independent(m, a, b, c | d)
                        && !(rel.independent(m, a, b, c) && rel.independent(m, a, b | c, d))
                    {
                        t.violations
                            .push(witness(m, &[("A", a), ("B", b), ("C", c), ("D", d)]));
                    }
                }
                Axiom::Transitivity => {
                    let (a, b, c, d) = (p, q, r, u);
                    t.checked += 1;
                    if rel.independent(m, a, b, c)
                        && rel.independent(m, a, b | c, d)
                        && !rel.independent(m, a, b, c | d)
                    {
                        t.violations
                            .push(witness(m, &[("A", a), ("B", b), ("C", c), ("D", d)]));
                    }
                }
                Axiom::Symmetry => {
                    let (a, b, c) = (p, q, r);
                    t.checked += 1;
                    if rel.independent(m, a, b, c) != rel.independent(m, c, b, a) {
                        t.violations
                            .push(witness(m, &[("A", a), ("B", b), ("C", c)]));
                    }
                }
                Axiom::Stationarity => {
                    let (a, a2, b, c) = (p, q, r, u);
                    let xs = mask_vec(a);
                    let ys = mask_vec(a2);
                    let matchings: Vec<Vec<(usize, usize)>> = if xs.len() == 1 {
                        vec![vec![(xs[0], ys[0])]]
                    } else {
                        vec![
                            vec![(xs[0], ys[0]), (xs[1], ys[1])],
                            vec![(xs[0], ys[1]), (xs[1], ys[0])],
                        ]
                    };
                    for pairs in matchings {
                        t.checked += 1;
                        if !same_type(m, &pairs, b) {
                            continue;
                        }
                        if !(rel.independent(m, a, b, c) && rel.independent(m, a2, b, c)) {
                            continue;
                        }
                        if !pinned_iso_over(m, &pairs, b | c) {
                            t.violations
                                .push(witness(m, &[("A", a), ("A'", a2), ("B", b), ("C", c)]));
                        }
                    }
                }
                Axiom::Existence => unreachable!(),
            }
        }
        t
    }
}

fn witness(m: &CompleteStructure, sets: &[(&'static str, u32)]) -> Witness {
    Witness {
        structure: m.clone(),
        sets: sets
            .iter()
            .map(|&(name, mask)| (name, mask_vec(mask)))
            .collect(),
        type_colors: None,
    }
}

/// `a_i -> a'_i` preserves colors to `B` and among the tuple.
fn same_type(m: &CompleteStructure, pairs: &[(usize, usize)], b: u32) -> bool {
    pairs
        .iter()
        .all(|&(x, y)| bits(b).all(|v| m.color(x, v) == m.color(y, v)))
        && pairs.iter().all(|&(x1, y1)| {
            pairs
                .iter()
                .all(|&(x2, y2)| x1 == x2 || m.color(x1, x2) == m.color(y1, y2))
        })
}

/// Whether `aBC` and `a'BC` are isomorphic via `a_i -> a'_i`, fixing `BC`.
fn pinned_iso_over(m: &CompleteStructure, pairs: &[(usize, usize)], fixed: u32) -> bool {
    let fixed: Vec<usize> = mask_vec(fixed);
    let left: Vec<usize> = pairs
        .iter()
        .map(|p| p.0)
        .chain(fixed.iter().copied())
        .collect();
    let right: Vec<usize> = pairs
        .iter()
        .map(|p| p.1)
        .chain(fixed.iter().copied())
        .collect();
    let (m1, m2) = (m.induced(&left), m.induced(&right));
    let pins: Vec<(usize, usize)> = (0..left.len()).map(|i| (i, i)).collect();
    structure_isomorphic(&m1, &m2, &pins).expect("pins are an injective identity")
}

/// For every base `B` (within the cap) and every admissible 1-type over
/// `B`, the `⊗_B` realization against `C = M \ B` must exist, lie in
/// `Forb_c(S)`, and be independent from `C` over `B`.
fn existence<R: Relation>(
    rel: &R,
    m: &CompleteStructure,
    s: &TriangleSet,
    lang: &ColorLanguage,
    caps: Caps,
) -> Tally {
    let n = m.len();
    let k = s.palette().len();
    let mut t = Tally::default();
    for b in 0u32..(1 << n) {
        let bv = mask_vec(b);
        if bv.len() > caps.base {
            continue;
        }
        let c = ((1u32 << n) - 1) & !b;
        let mut tau = vec![Color(0); bv.len()];
        let types = (k as u64).pow(bv.len() as u32);
        for code in 0..types {
            let mut x = code;
            for slot in tau.iter_mut().rev() {
                *slot = Color((x % k as u64) as u8);
                x /= k as u64;
            }
            // admissible: the one-point extension of B itself is valid
            let admissible = (0..bv.len()).all(|i| {
                (i + 1..bv.len()).all(|j| !s.forbids(m.color(bv[i], bv[j]), tau[i], tau[j]))
            });
            if !admissible {
                continue;
            }
            t.checked += 1;
            let mut colors = vec![Color(0); n];
            for (i, &v) in bv.iter().enumerate() {
                colors[v] = tau[i];
            }
            let mut ok = true;
            for v in bits(c) {
                let blocked = bv
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (i, &w)| acc | s.veto(tau[i], m.color(w, v)));
                match lang.first_unblocked(blocked) {
                    Some(col) => colors[v] = col,
                    None => ok = false,
                }
            }
            let ext = m.with_vertex(&colors);
            let a = 1u32 << n;
            ok = ok
                && (0..n)
                    .all(|i| (i + 1..n).all(|j| !s.forbids(colors[i], colors[j], m.color(i, j))));
            ok = ok && rel.independent(&ext, a, b, c);
            if !ok {
                let mut w = witness(m, &[("B", b), ("C", c)]);
                w.type_colors = Some(tau.clone());
                t.violations.push(w);
            }
        }
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeletionVariant {
    OneSided,
    TwoSided,
}

impl DeletionVariant {
    pub fn name(self) -> &'static str {
        match self {
            DeletionVariant::OneSided => "one_sided",
            DeletionVariant::TwoSided => "two_sided",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "one_sided" | "one-sided" => Ok(DeletionVariant::OneSided),
            "two_sided" | "two-sided" => Ok(DeletionVariant::TwoSided),
            _ => Err(Error::input(format!("unknown deletion variant {text:?}"))),
        }
    }
}

/// Violations of one base size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionGroup {
    pub base_size: usize,
    pub count: u64,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionReport {
    pub variant: DeletionVariant,
    pub max_size: usize,
    pub structures_checked: u64,
    pub instances_checked: u64,
    pub violation_count: u64,
    /// Nonempty groups in increasing base size.
    pub groups: Vec<DeletionGroup>,
}

impl DeletionReport {
    pub fn holds(&self) -> bool {
        self.violation_count == 0
    }

    /// The first violation on the fewest vertices.
    pub fn minimal_witness(&self) -> Option<&Witness> {
        self.groups.first().and_then(|g| g.witnesses.first())
    }
}

/// Whether the deletion property fails at `(a, b, c, B)`: the hypotheses
/// `a ⊥_{bB} c` and the variant's color condition hold but `a ⊥_B c` does not.
#[allow(clippy::too_many_arguments)]
pub fn deletion_fails(
    m: &CompleteStructure,
    a: usize,
    b: usize,
    c: usize,
    base: u32,
    variant: DeletionVariant,
    lang: &ColorLanguage,
    s: &TriangleSet,
) -> bool {
    if !lang.is_solution(m.color(a, b)) {
        return false;
    }
    if variant == DeletionVariant::TwoSided && !lang.is_solution(m.color(b, c)) {
        return false;
    }
    let rel = Prioritised { lang, s };
    let (am, cm) = (1u32 << a, 1u32 << c);
    rel.independent(m, am, base | 1 << b, cm) && !rel.independent(m, am, base, cm)
}

/// Sweeps all `(a, b, c, B)` covering members of `Forb_c(S)` with up to
/// `max_size` vertices.
pub fn check_deletion(
    s: &TriangleSet,
    lang: &ColorLanguage,
    variant: DeletionVariant,
    max_size: usize,
) -> Result<DeletionReport> {
    check_compatible(lang, s)?;
    check_max_size(max_size)?;
    let levels = enumerate_forb(s, max_size);
    let mut report = DeletionReport {
        variant,
        max_size,
        structures_checked: 0,
        instances_checked: 0,
        violation_count: 0,
        groups: Vec::new(),
    };
    for (n, level) in levels.iter().enumerate().skip(3) {
        let full = (1u32 << n) - 1;
        let results: Vec<Tally> = level
            .par_iter()
            .map(|m| {
                let mut t = Tally::default();
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            if a == b || b == c || a == c {
                                continue;
                            }
                            t.checked += 1;
                            let base = full & !(1 << a | 1 << b | 1 << c);
                            if deletion_fails(m, a, b, c, base, variant, lang, s) {
                                t.violations.push(witness(
                                    m,
                                    &[("a", 1 << a), ("b", 1 << b), ("c", 1 << c), ("B", base)],
                                ));
                            }
                        }
                    }
                }
                t
            })
            .collect();
        report.structures_checked += level.len() as u64;
        let mut group = DeletionGroup {
            base_size: n - 3,
            count: 0,
            witnesses: Vec::new(),
        };
        for t in results {
            report.instances_checked += t.checked;
            group.count += t.violations.len() as u64;
            for w in t.violations {
                if group.witnesses.len() < WITNESS_CAP {
                    group.witnesses.push(w);
                }
            }
        }
        report.violation_count += group.count;
        if group.count > 0 {
            report.groups.push(group);
        }
    }
    Ok(report)
}
