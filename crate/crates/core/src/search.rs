//! Bounded search for amalgamation failures, forced colors and solution sets.
//!
//! Every search runs in two stages. First the base is treated abstractly: each
//! base vertex is a *profile*, the vector of its colors to the new vertices,
//! and cross colors follow from the profiles alone. Only when a multiset of
//! profiles produces the sought outcome is the base made concrete, by
//! backtracking over the base-internal edges subject to `Forb_c(S)`.
//!
//! Candidates are visited in a fixed order: base size, then shape, then the
//! colors of the new-vertex edges, then profile multisets in lexicographic
//! order. The first realizable candidate in that order is returned, so results
//! do not depend on thread scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::amalgam::{
    check_compatible, complete_unchecked, AmalgamationInstance, CompletionResult,
};
use crate::color::{Color, ColorLanguage, ColorSet, Palette};
use crate::conditions::{check_condition1, condition2_params, Condition2Params};
use crate::error::{Error, Result};
use crate::structure::CompleteStructure;
use crate::triangle::TriangleSet;

/// Number of new vertices on each side of a searched configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub left: usize,
    pub right: usize,
}

impl Shape {
    pub const ONE_ONE: Shape = Shape { left: 1, right: 1 };
    pub const TWO_ONE: Shape = Shape { left: 2, right: 1 };
    pub const ONE_TWO: Shape = Shape { left: 1, right: 2 };

    fn total(self) -> usize {
        self.left + self.right
    }
}

/// A realized candidate: base profiles, base edges and new-vertex edges.
#[derive(Clone, Debug)]
struct Found {
    shape: Shape,
    inner_left: Option<Color>,
    inner_right: Option<Color>,
    profiles: Vec<Vec<Color>>,
    base: CompleteStructure,
}

impl Found {
    fn instance(&self) -> AmalgamationInstance {
        let k = self.base.len();
        let side = |count: usize, offset: usize, inner: Option<Color>| {
            CompleteStructure::from_fn(k + count, |u, v| {
                if v < k {
                    self.base.color(u, v)
                } else if u < k {
                    self.profiles[u][offset + v - k]
                } else {
                    inner.expect("two new vertices on a side carry an inner color")
                }
            })
        };
        let left = side(self.shape.left, 0, self.inner_left);
        let right = side(self.shape.right, self.shape.left, self.inner_right);
        AmalgamationInstance::new(k, left, right).expect("search builds consistent instances")
    }
}

struct ShapeSearch<'a> {
    s: &'a TriangleSet,
    shape: Shape,
    inner_left: Option<Color>,
    inner_right: Option<Color>,
    allowed: Vec<Vec<Color>>,
}

impl<'a> ShapeSearch<'a> {
    fn new(
        s: &'a TriangleSet,
        shape: Shape,
        inner_left: Option<Color>,
        inner_right: Option<Color>,
    ) -> Self {
        let k = s.palette().len();
        let t = shape.total();
        let mut allowed = Vec::new();
        let mut digits = vec![0usize; t];
        'outer: loop {
            let prof: Vec<Color> = digits.iter().map(|&d| Color(d as u8)).collect();
            let left_ok = inner_left.is_none_or(|e| !s.forbids(e, prof[0], prof[1]));
            let right_ok = inner_right.is_none_or(|e| {
                let p = shape.left;
                !s.forbids(e, prof[p], prof[p + 1])
            });
            if left_ok && right_ok {
                allowed.push(prof);
            }
            // increment, most significant digit first so the list is lexicographic
            for pos in (0..t).rev() {
                digits[pos] += 1;
                if digits[pos] < k {
                    continue 'outer;
                }
                digits[pos] = 0;
            }
            break;
        }
        ShapeSearch {
            s,
            shape,
            inner_left,
            inner_right,
            allowed,
        }
    }

    /// Cross-pair veto masks for a profile multiset, row-major over
    /// (left-new, right-new).
    fn masks(&self, picks: &[usize], out: &mut Vec<u32>) {
        out.clear();
        let p = self.shape.left;
        for i in 0..p {
            for j in 0..self.shape.right {
                let mut m = 0;
                for &idx in picks {
                    let prof = &self.allowed[idx];
                    m |= self.s.veto(prof[i], prof[p + j]);
                }
                out.push(m);
            }
        }
    }

    /// Concrete base edges for the chosen profiles, if any exist.
    fn realize(&self, picks: &[usize]) -> Option<CompleteStructure> {
        let k = picks.len();
        let all = self.s.palette().all().0;
        let t = self.shape.total();
        let mut allowed = vec![0u32; k * k];
        for j in 1..k {
            for i in 0..j {
                let (pi, pj) = (&self.allowed[picks[i]], &self.allowed[picks[j]]);
                let mut veto = 0;
                for x in 0..t {
                    veto |= self.s.veto(pi[x], pj[x]);
                }
                allowed[i * k + j] = all & !veto;
            }
        }
        let edges: Vec<(usize, usize)> = (1..k).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
        let mut colors = vec![Color(0); k * k];
        if assign_edges(self.s, k, &edges, 0, &allowed, &mut colors) {
            Some(CompleteStructure::from_fn(k, |i, j| colors[i * k + j]))
        } else {
            None
        }
    }

    /// First profile multiset of size `k` (lexicographic) that satisfies
    /// `accept` on its cross masks and admits a concrete base.
    fn find_first<F>(&self, k: usize, accept: &F) -> Option<Found>
    where
        F: Fn(&[u32]) -> bool + Sync,
    {
        let len = self.allowed.len();
        let build = |picks: &[usize], base: CompleteStructure| Found {
            shape: self.shape,
            inner_left: self.inner_left,
            inner_right: self.inner_right,
            profiles: picks.iter().map(|&i| self.allowed[i].clone()).collect(),
            base,
        };
        if k == 0 {
            let mut masks = Vec::new();
            self.masks(&[], &mut masks);
            return accept(&masks).then(|| build(&[], CompleteStructure::empty()));
        }
        (0..len).into_par_iter().find_map_first(|first| {
            let mut picks = vec![first; k];
            let mut masks = Vec::new();
            loop {
                self.masks(&picks, &mut masks);
                if accept(&masks) {
                    if let Some(base) = self.realize(&picks) {
                        return Some(build(&picks, base));
                    }
                }
                // next nondecreasing tuple with picks[0] fixed
                let mut pos = k;
                loop {
                    if pos == 1 {
                        return None;
                    }
                    pos -= 1;
                    if picks[pos] + 1 < len {
                        let v = picks[pos] + 1;
                        for slot in &mut picks[pos..] {
                            *slot = v;
                        }
                        break;
                    }
                }
            }
        })
    }
}

fn assign_edges(
    s: &TriangleSet,
    k: usize,
    edges: &[(usize, usize)],
    idx: usize,
    allowed: &[u32],
    colors: &mut [Color],
) -> bool {
    let Some(&(i, j)) = edges.get(idx) else {
        return true;
    };
    let mut options = allowed[i * k + j];
    while options != 0 {
        let c = Color(options.trailing_zeros() as u8);
        options &= options - 1;
        // edges are filled column by column, so (h, i) and (h, j) exist for h < i
        let ok = (0..i).all(|h| !s.forbids(c, colors[h * k + i], colors[h * k + j]));
        if ok {
            colors[i * k + j] = c;
            colors[j * k + i] = c;
            if assign_edges(s, k, edges, idx + 1, allowed, colors) {
                return true;
            }
        }
    }
    false
}

/// Searches shapes and inner colors for base sizes `0..=bound`.
fn search<F>(
    s: &TriangleSet,
    shapes: &[Shape],
    min_base: usize,
    bound: usize,
    accept: F,
) -> Option<Found>
where
    F: Fn(Shape, Option<Color>, Option<Color>, &[u32]) -> bool + Sync,
{
    let palette = s.palette();
    let inner_options = |count: usize| -> Vec<Option<Color>> {
        if count == 2 {
            palette.colors().map(Some).collect()
        } else {
            vec![None]
        }
    };
    for k in min_base..=bound {
        for &shape in shapes {
            for il in inner_options(shape.left) {
                for ir in inner_options(shape.right) {
                    let engine = ShapeSearch::new(s, shape, il, ir);
                    let accept = |m: &[u32]| accept(shape, il, ir, m);
                    if let Some(found) = engine.find_first(k, &accept) {
                        return Some(found);
                    }
                }
            }
        }
    }
    None
}

/// Cross colors for masks under `lang`, `None` entries for obstructed pairs.
fn cross_colors(lang: &ColorLanguage, masks: &[u32]) -> Vec<Option<Color>> {
    masks.iter().map(|&m| lang.first_unblocked(m)).collect()
}

fn completion_fails(
    s: &TriangleSet,
    lang: &ColorLanguage,
    shape: Shape,
    il: Option<Color>,
    ir: Option<Color>,
    masks: &[u32],
) -> bool {
    let cols = cross_colors(lang, masks);
    if cols.iter().any(Option::is_none) {
        return true;
    }
    let cols: Vec<Color> = cols.into_iter().flatten().collect();
    let q = shape.right;
    if let Some(e) = il {
        // a, a' and each right vertex c
        for j in 0..q {
            if s.forbids(e, cols[j], cols[q + j]) {
                return true;
            }
        }
    }
    if let Some(e) = ir {
        for i in 0..shape.left {
            if s.forbids(e, cols[i * q], cols[i * q + 1]) {
                return true;
            }
        }
    }
    false
}

/// An instance on which prioritised amalgamation fails, with its completion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub instance: AmalgamationInstance,
    pub completion: CompletionResult,
}

impl Counterexample {
    fn from_found(found: &Found, lang: &ColorLanguage, s: &TriangleSet) -> Self {
        let instance = found.instance();
        let completion = complete_unchecked(&instance, lang, s);
        Counterexample {
            instance,
            completion,
        }
    }
}

/// Lexicographically least instance (base size `<= bound`, up to three new
/// vertices) whose completion has a forbidden triangle or an obstructed
/// cross pair. No certificate shortcut is taken.
pub fn search_counterexample(
    s: &TriangleSet,
    lang: &ColorLanguage,
    bound: usize,
) -> Option<Counterexample> {
    let shapes = [Shape::ONE_ONE, Shape::TWO_ONE, Shape::ONE_TWO];
    search(s, &shapes, 0, bound, |shape, il, ir, masks| {
        completion_fails(s, lang, shape, il, ir, masks)
    })
    .map(|f| Counterexample::from_found(&f, lang, s))
}

/// Least one-point instance with base size `<= bound` in which some cross
/// pair has no admissible solution color.
pub fn search_failed_edge(
    s: &TriangleSet,
    lang: &ColorLanguage,
    bound: usize,
) -> Option<Counterexample> {
    search(s, &[Shape::ONE_ONE], 0, bound, |_, _, _, masks| {
        lang.first_unblocked(masks[0]).is_none()
    })
    .map(|f| Counterexample::from_found(&f, lang, s))
}

/// Searches for an instance with new vertices `a, a'` (left) and `c` (right),
/// `r(a, a') = inner`, in which the completion colors `(a, c)` and `(a', c)`
/// with exactly `ac` and `a2c`.
pub fn realize_cross_pattern(
    s: &TriangleSet,
    lang: &ColorLanguage,
    ac: Color,
    a2c: Color,
    inner: Color,
    bound: usize,
) -> Option<Counterexample> {
    search(s, &[Shape::TWO_ONE], 0, bound, |_, il, _, masks| {
        il == Some(inner)
            && lang.first_unblocked(masks[0]) == Some(ac)
            && lang.first_unblocked(masks[1]) == Some(a2c)
    })
    .map(|f| Counterexample::from_found(&f, lang, s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureStatus {
    CertifiedCondition1,
    CertifiedCondition2,
    CounterexampleFound,
    NoCounterexampleUpToBound,
}

impl ClosureStatus {
    pub fn passes(self) -> bool {
        !matches!(self, ClosureStatus::CounterexampleFound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureVerdict {
    pub status: ClosureStatus,
    pub witness: Option<Counterexample>,
    pub bound_used: usize,
    /// Parameters of the two-color certificate when that is what certified.
    pub params: Option<Condition2Params>,
    /// True when the verdict is conclusive: a certificate, a concrete
    /// counterexample, or a search bound large enough to be exhaustive.
    pub conclusive: bool,
}

/// Base size beyond which no new closure failure can appear: an obstructed
/// pair needs at most `m` blocking base points, and a forbidden triangle
/// through two cross edges at most `2(m - 1)`.
pub fn exhaustive_bound(lang: &ColorLanguage) -> usize {
    let m = lang.priority().len();
    m.max(2 * (m - 1))
}

/// Decides whether prioritised amalgamation stays inside `Forb_c(S)`.
///
/// Obstructed cross pairs are always searched first, with the exact base
/// bound `|L'|`, since the syntactic certificates assume that a solution color
/// exists. Then a certificate is tried, and failing that a bounded search.
pub fn check_closure(
    s: &TriangleSet,
    lang: &ColorLanguage,
    bound: usize,
) -> Result<ClosureVerdict> {
    check_compatible(lang, s)?;
    if bound == 0 {
        return Err(Error::input("search bound must be at least 1"));
    }
    let m = lang.priority().len();
    if let Some(w) = search_failed_edge(s, lang, m) {
        return Ok(ClosureVerdict {
            status: ClosureStatus::CounterexampleFound,
            witness: Some(w),
            bound_used: m,
            params: None,
            conclusive: true,
        });
    }
    if check_condition1(s, lang) {
        return Ok(ClosureVerdict {
            status: ClosureStatus::CertifiedCondition1,
            witness: None,
            bound_used: m,
            params: None,
            conclusive: true,
        });
    }
    if let Some(params) = condition2_params(s, lang).first() {
        return Ok(ClosureVerdict {
            status: ClosureStatus::CertifiedCondition2,
            witness: None,
            bound_used: m,
            params: Some(*params),
            conclusive: true,
        });
    }
    Ok(match search_counterexample(s, lang, bound) {
        Some(w) => ClosureVerdict {
            status: ClosureStatus::CounterexampleFound,
            witness: Some(w),
            bound_used: bound,
            params: None,
            conclusive: true,
        },
        None => ClosureVerdict {
            status: ClosureStatus::NoCounterexampleUpToBound,
            witness: None,
            bound_used: bound,
            params: None,
            conclusive: bound >= exhaustive_bound(lang),
        },
    })
}

/// A color that is the unique admissible completion of some one-point
/// amalgamation, hence a member of every solution set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForcedColor {
    pub color: Color,
    pub witness: AmalgamationInstance,
}

/// Colors forced by one-point instances with base size `<= bound`, in
/// palette order, each with its least witness.
pub fn forced_colors(s: &TriangleSet, bound: usize) -> Vec<ForcedColor> {
    let all = s.palette().all().0;
    s.palette()
        .colors()
        .filter_map(|color| {
            search(s, &[Shape::ONE_ONE], 0, bound, |_, _, _, masks| {
                all & !masks[0] == color.bit()
            })
            .map(|f| ForcedColor {
                color,
                witness: f.instance(),
            })
        })
        .collect()
}

/// Whether `witness` is a valid one-point instance whose only admissible
/// completing color (over the whole palette) is `color`.
pub fn forces(s: &TriangleSet, witness: &AmalgamationInstance, color: Color) -> bool {
    if witness.left_new() != 1 || witness.right_new() != 1 {
        return false;
    }
    let k = witness.base_len();
    let mask = crate::amalgam::profile_mask(witness.profile(k, k), s);
    crate::structure::is_member_unchecked(witness.left(), s)
        && crate::structure::is_member_unchecked(witness.right(), s)
        && s.palette().all().0 & !mask == color.bit()
}

/// Every valid one-point instance on exactly `base_size` base vertices
/// that forces `color`, in lexicographic order of (base edges, left
/// profile, right profile). Limited to `base_size <= 3`.
pub fn forcing_instances(
    s: &TriangleSet,
    color: Color,
    base_size: usize,
) -> Result<Vec<AmalgamationInstance>> {
    s.palette().check(color)?;
    if base_size > 3 {
        return Err(Error::Capability(format!(
            "forcing enumeration is limited to 3 base vertices, got {base_size}"
        )));
    }
    let k = s.palette().len();
    let pairs: Vec<(usize, usize)> = (0..base_size)
        .flat_map(|i| (i + 1..base_size).map(move |j| (i, j)))
        .collect();
    let digits = pairs.len() + 2 * base_size;
    let mut out = Vec::new();
    let mut code = vec![0u8; digits];
    loop {
        let base_edge = |i: usize, j: usize| {
            Color(code[pairs.iter().position(|&p| p == (i, j)).expect("pair")])
        };
        let side = |offset: usize| {
            CompleteStructure::from_fn(base_size + 1, |i, j| {
                if j < base_size {
                    base_edge(i, j)
                } else {
                    Color(code[offset + i])
                }
            })
        };
        let left = side(pairs.len());
        let right = side(pairs.len() + base_size);
        let inst = AmalgamationInstance::new(base_size, left, right).expect("shared base");
        if forces(s, &inst, color) {
            out.push(inst);
        }
        let Some(i) = (0..digits).rev().find(|&i| (code[i] as usize) + 1 < k) else {
            return Ok(out);
        };
        code[i] += 1;
        code[i + 1..].iter_mut().for_each(|d| *d = 0);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub colors: ColorSet,
    /// Every priority order (highest first) under which closure passes.
    pub orders: Vec<Vec<Color>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSetReport {
    pub bound: usize,
    pub forced: Vec<ForcedColor>,
    /// Inclusion-minimal admissible solution sets, by size then palette order.
    pub minimal: Vec<SolutionSet>,
}

impl SolutionSetReport {
    pub fn forced_set(&self) -> ColorSet {
        ColorSet::from_colors(self.forced.iter().map(|f| f.color))
    }
}

/// Finds every inclusion-minimal proper subset `L'` of the palette,
/// containing all forced colors, for which some priority order passes
/// [`check_closure`] at `bound`.
pub fn find_solution_sets(s: &TriangleSet, bound: usize) -> Result<SolutionSetReport> {
    if bound == 0 {
        return Err(Error::input("search bound must be at least 1"));
    }
    let palette = s.palette();
    let forced = forced_colors(s, bound);
    let forced_set = ColorSet::from_colors(forced.iter().map(|f| f.color));

    let all = palette.all().0;
    let mut candidates: Vec<ColorSet> = (1..all)
        .map(ColorSet)
        .filter(|set| forced_set.is_subset(*set))
        .collect();
    candidates.sort_by_key(|set| (set.len(), set.iter().map(|c| c.0).collect::<Vec<_>>()));

    let mut minimal: Vec<SolutionSet> = Vec::new();
    for set in candidates {
        if minimal.iter().any(|w| w.colors.is_subset(set)) {
            continue;
        }
        let orders = admissible_orders(s, palette, set, bound)?;
        if !orders.is_empty() {
            minimal.push(SolutionSet {
                colors: set,
                orders,
            });
        }
    }
    Ok(SolutionSetReport {
        bound,
        forced,
        minimal,
    })
}

/// Orders on `set` (lexicographic permutation order) passing closure.
pub fn admissible_orders(
    s: &TriangleSet,
    palette: &Palette,
    set: ColorSet,
    bound: usize,
) -> Result<Vec<Vec<Color>>> {
    let colors: Vec<Color> = set.iter().collect();
    let perms = permutations(&colors);
    let verdicts: Vec<Result<bool>> = perms
        .par_iter()
        .map(|order| {
            let lang = ColorLanguage::new(palette.clone(), order.clone())?;
            Ok(check_closure(s, &lang, bound)?.status.passes())
        })
        .collect();
    let mut out = Vec::new();
    for (order, ok) in perms.into_iter().zip(verdicts) {
        if ok? {
            out.push(order);
        }
    }
    Ok(out)
}

/// All permutations of `items` in lexicographic order of positions.
pub(crate) fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}
