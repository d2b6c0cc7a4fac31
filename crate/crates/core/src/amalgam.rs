//! The prioritised amalgamation operator.
//!
//! Given `A` and `C` over a common base `B`, each cross pair `(a, c)` with
//! `a` in `A \ B` and `c` in `C \ B` receives the highest-priority solution
//! color `R_i` such that `{R_i, r(a,b), r(b,c)}` is not forbidden for any
//! `b` in `B`.

use crate::color::{Color, ColorLanguage};
use crate::error::{Error, Result};
use crate::structure::{is_member_unchecked, CompleteStructure, Violation};
use crate::triangle::{Triangle, TriangleSet};

/// Two structures glued over a common base.
///
/// Vertices `0..base_len` of both `left` and `right` are the base; the
/// remaining vertices of each side are the new points `A \ B` and `C \ B`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmalgamationInstance {
    base_len: usize,
    left: CompleteStructure,
    right: CompleteStructure,
}

impl AmalgamationInstance {
    pub fn new(base_len: usize, left: CompleteStructure, right: CompleteStructure) -> Result<Self> {
        if left.len() <= base_len || right.len() <= base_len {
            return Err(Error::input(format!(
                "both sides need at least one vertex outside the base of size {base_len} \
                 (left has {}, right has {})",
                left.len(),
                right.len()
            )));
        }
        let base: Vec<usize> = (0..base_len).collect();
        if left.induced(&base) != right.induced(&base) {
            return Err(Error::input("left and right disagree on the base"));
        }
        Ok(AmalgamationInstance {
            base_len,
            left,
            right,
        })
    }

    pub fn base_len(&self) -> usize {
        self.base_len
    }

    pub fn base(&self) -> CompleteStructure {
        self.left.induced(&(0..self.base_len).collect::<Vec<_>>())
    }

    pub fn left(&self) -> &CompleteStructure {
        &self.left
    }

    pub fn right(&self) -> &CompleteStructure {
        &self.right
    }

    pub fn left_new(&self) -> usize {
        self.left.len() - self.base_len
    }

    pub fn right_new(&self) -> usize {
        self.right.len() - self.base_len
    }

    /// The obstruction profile of cross pair `(a, c)`: left vertex `a` and
    /// right vertex `c`, both given in their side's numbering.
    pub fn profile(&self, a: usize, c: usize) -> Vec<(Color, Color)> {
        (0..self.base_len)
            .map(|b| (self.left.color(a, b), self.right.color(b, c)))
            .collect()
    }
}

/// A cross edge of a completion, in the numbering of the completed structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CrossEdge {
    pub left: usize,
    pub right: usize,
    pub color: Color,
}

/// The result of `A (x)_B C`.
///
/// `completed` numbers the base first, then `A \ B`, then `C \ B`. A cross
/// pair with no admissible solution color is listed in `failed_edges` and
/// carries the lowest-priority color as a placeholder in `completed`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionResult {
    pub completed: CompleteStructure,
    pub base_len: usize,
    pub left_new: usize,
    pub right_new: usize,
    pub cross_colors: Vec<CrossEdge>,
    /// Forbidden triangles among `(A u C) \ B`.
    pub violations: Vec<Violation>,
    pub failed_edges: Vec<(usize, usize)>,
}

impl CompletionResult {
    /// True when the completion exists and lies in `Forb_c(S)`.
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.failed_edges.is_empty()
    }

    pub fn cross_color(&self, left: usize, right: usize) -> Option<Color> {
        self.cross_colors
            .iter()
            .find(|e| e.left == left && e.right == right)
            .map(|e| e.color)
    }
}

/// Union of veto masks over a profile.
#[inline]
pub fn profile_mask(profile: impl IntoIterator<Item = (Color, Color)>, s: &TriangleSet) -> u32 {
    profile.into_iter().fold(0, |m, (p, q)| m | s.veto(p, q))
}

/// The highest-priority solution color not vetoed by any pair of the
/// profile, or `None` when every solution color is obstructed.
///
/// Colors must belong to the shared palette of `lang` and `s`.
pub fn prioritized_color(
    profile: impl IntoIterator<Item = (Color, Color)>,
    lang: &ColorLanguage,
    s: &TriangleSet,
) -> Option<Color> {
    debug_assert_eq!(lang.palette(), s.palette());
    lang.first_unblocked(profile_mask(profile, s))
}

pub(crate) fn check_compatible(lang: &ColorLanguage, s: &TriangleSet) -> Result<()> {
    if lang.palette() != s.palette() {
        return Err(Error::PaletteMismatch(format!(
            "language over [{}] but triangles over [{}]",
            lang.palette(),
            s.palette()
        )));
    }
    Ok(())
}

/// Computes `A (x)_B C`. Both sides must lie in `Forb_c(S)`.
pub fn amalgamate(
    inst: &AmalgamationInstance,
    lang: &ColorLanguage,
    s: &TriangleSet,
) -> Result<CompletionResult> {
    check_compatible(lang, s)?;
    inst.left.check_palette(s.palette())?;
    inst.right.check_palette(s.palette())?;
    if !is_member_unchecked(&inst.left, s) {
        return Err(Error::NotInClass("left side of the amalgamation".into()));
    }
    if !is_member_unchecked(&inst.right, s) {
        return Err(Error::NotInClass("right side of the amalgamation".into()));
    }
    Ok(complete_unchecked(inst, lang, s))
}

pub(crate) fn complete_unchecked(
    inst: &AmalgamationInstance,
    lang: &ColorLanguage,
    s: &TriangleSet,
) -> CompletionResult {
    let k = inst.base_len;
    let p = inst.left_new();
    let q = inst.right_new();
    let n = k + p + q;

    let mut cross = Vec::with_capacity(p * q);
    let mut failed = Vec::new();
    // cross_table[i * q + j] for left-new i, right-new j
    let mut cross_table = vec![Color(0); p * q];
    for i in 0..p {
        for j in 0..q {
            let a = k + i;
            let c = k + j;
            let color = match prioritized_color(inst.profile(a, c), lang, s) {
                Some(col) => col,
                None => {
                    failed.push((k + i, k + p + j));
                    lang.last()
                }
            };
            cross_table[i * q + j] = color;
            cross.push(CrossEdge {
                left: k + i,
                right: k + p + j,
                color,
            });
        }
    }

    let completed = CompleteStructure::from_fn(n, |u, v| {
        // u < v
        let side = |x: usize| {
            if x < k {
                0
            } else if x < k + p {
                1
            } else {
                2
            }
        };
        match (side(u), side(v)) {
            (0 | 1, 0 | 1) => inst.left.color(u, v),
            (0, 2) => inst.right.color(u, v - p),
            (2, 2) => inst.right.color(u - p, v - p),
            (1, 2) => cross_table[(u - k) * q + (v - k - p)],
            _ => unreachable!("u < v keeps sides ordered"),
        }
    });

    // Only triangles inside (A u C) \ B that use at least one cross edge can
    // be new; triangles through the base are vetted by the priority rule.
    let mut violations = Vec::new();
    for x in k..n {
        for y in x + 1..n {
            for z in y + 1..n {
                let left_side = [x, y, z].iter().filter(|&&v| v < k + p).count();
                if left_side == 0 || left_side == 3 {
                    continue;
                }
                let (xy, xz, yz) = (
                    completed.color(x, y),
                    completed.color(x, z),
                    completed.color(y, z),
                );
                if s.forbids(xy, xz, yz) {
                    violations.push(Violation {
                        vertices: [x, y, z],
                        triangle: Triangle::new(xy, xz, yz),
                    });
                }
            }
        }
    }

    CompletionResult {
        completed,
        base_len: k,
        left_new: p,
        right_new: q,
        cross_colors: cross,
        violations,
        failed_edges: failed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::Palette;
    use crate::structure::validate_structure;

    fn pal() -> Palette {
        Palette::parse("RGXY").unwrap()
    }

    fn c(ch: char) -> Color {
        pal().color(ch).unwrap()
    }

    fn s11() -> TriangleSet {
        TriangleSet::from_words(pal(), ["RXX", "GGX", "YXX", "XXX"]).unwrap()
    }

    fn s26() -> TriangleSet {
        TriangleSet::from_words(pal(), ["RRX", "RXX", "RYY", "GYX", "GXX", "YYX", "XXX"]).unwrap()
    }

    fn lang(order: &str) -> ColorLanguage {
        ColorLanguage::with_order(pal(), order).unwrap()
    }

    #[test]
    fn empty_profile_gives_top_color() {
        assert_eq!(prioritized_color([], &lang("R>G"), &s11()), Some(c('R')));
    }

    #[test]
    fn xx_and_rg_profile_gives_g() {
        let profile = [(c('X'), c('X')), (c('R'), c('G'))];
        assert_eq!(
            prioritized_color(profile, &lang("R>G"), &s11()),
            Some(c('G'))
        );
    }

    #[test]
    fn xx_profile_obstructs_rg_in_26() {
        assert_eq!(
            prioritized_color([(c('X'), c('X'))], &lang("R>G"), &s26()),
            None
        );
    }

    /// Base {b1, b2} first, then a (left) / c (right).
    fn xx_and_rg_instance() -> AmalgamationInstance {
        let left =
            CompleteStructure::from_edges(3, &[(0, 1, c('R')), (0, 2, c('X')), (1, 2, c('R'))])
                .unwrap();
        let right =
            CompleteStructure::from_edges(3, &[(0, 1, c('R')), (0, 2, c('X')), (1, 2, c('G'))])
                .unwrap();
        AmalgamationInstance::new(2, left, right).unwrap()
    }

    #[test]
    fn two_x_edges_push_the_cross_edge_to_g() {
        let res = amalgamate(&xx_and_rg_instance(), &lang("R>G"), &s11()).unwrap();
        assert_eq!(res.cross_colors.len(), 1);
        assert_eq!(res.cross_color(2, 3), Some(c('G')));
        assert!(res.is_clean());
    }

    #[test]
    fn order_g_over_r_creates_ggx() {
        // base b = 0; left a1 = 1, a2 = 2; right c = 1
        let left =
            CompleteStructure::from_edges(3, &[(0, 1, c('R')), (0, 2, c('G')), (1, 2, c('X'))])
                .unwrap();
        let right = CompleteStructure::from_edges(2, &[(0, 1, c('R'))]).unwrap();
        let inst = AmalgamationInstance::new(1, left, right).unwrap();
        let res = amalgamate(&inst, &lang("G>R"), &s11()).unwrap();
        assert_eq!(res.cross_color(1, 3), Some(c('G')));
        assert_eq!(res.cross_color(2, 3), Some(c('G')));
        assert_eq!(res.violations.len(), 1);
        assert_eq!(res.violations[0].vertices, [1, 2, 3]);
        assert_eq!(res.violations[0].triangle.word(&pal()), "GGX");
        assert!(res.failed_edges.is_empty());
        // The full revalidation sees the same single triangle.
        assert_eq!(
            validate_structure(&res.completed, &s11()).unwrap(),
            res.violations
        );
    }

    #[test]
    fn one_point_over_empty_base() {
        let one = CompleteStructure::monochrome(1, c('R'));
        let inst = AmalgamationInstance::new(0, one.clone(), one).unwrap();
        let res = amalgamate(&inst, &lang("G>R"), &s26()).unwrap();
        assert_eq!(res.cross_color(0, 1), Some(c('G')));
        assert!(res.is_clean());
    }

    #[test]
    fn failed_edge_is_data() {
        let e = CompleteStructure::from_edges(2, &[(0, 1, c('X'))]).unwrap();
        let inst = AmalgamationInstance::new(1, e.clone(), e).unwrap();
        let res = amalgamate(&inst, &lang("R>G"), &s26()).unwrap();
        assert_eq!(res.failed_edges, vec![(1, 2)]);
    }

    #[test]
    fn instance_validation() {
        let e = CompleteStructure::from_edges(2, &[(0, 1, c('X'))]).unwrap();
        let f = CompleteStructure::from_edges(2, &[(0, 1, c('R'))]).unwrap();
        assert!(AmalgamationInstance::new(2, e.clone(), e.clone()).is_err());
        let three_x = CompleteStructure::monochrome(3, c('X'));
        let three_r = CompleteStructure::monochrome(3, c('R'));
        assert!(AmalgamationInstance::new(2, three_x, three_r).is_err());
        let inst = AmalgamationInstance::new(1, e, f).unwrap();
        // Factors outside Forb_c(S) are rejected.
        let bad = AmalgamationInstance::new(
            0,
            CompleteStructure::monochrome(3, c('X')),
            CompleteStructure::monochrome(1, c('X')),
        )
        .unwrap();
        assert!(matches!(
            amalgamate(&bad, &lang("R>G"), &s11()),
            Err(Error::NotInClass(_))
        ));
        let other = ColorLanguage::with_order(Palette::parse("RGX").unwrap(), "R>G").unwrap();
        assert!(matches!(
            amalgamate(&inst, &other, &s11()),
            Err(Error::PaletteMismatch(_))
        ));
    }
}
