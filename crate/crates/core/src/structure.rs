//! Finite complete edge-colored graphs and `Forb_c(S)` membership.

use std::cmp::Ordering;

use crate::color::{Color, Palette};
use crate::error::{Error, Result};
use crate::triangle::{Triangle, TriangleSet};

/// A complete structure on vertices `0..n`: every pair of distinct vertices
/// carries exactly one color.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompleteStructure {
    n: usize,
    // Dense symmetric n*n matrix; the diagonal is always Color(0) and never read.
    cells: Vec<Color>,
}

impl CompleteStructure {
    pub fn empty() -> Self {
        CompleteStructure {
            n: 0,
            cells: Vec::new(),
        }
    }

    /// Builds a structure from a coloring function, called once per pair `i < j`.
    pub fn from_fn(n: usize, mut color: impl FnMut(usize, usize) -> Color) -> Self {
        let mut cells = vec![Color(0); n * n];
        for j in 1..n {
            for i in 0..j {
                let c = color(i, j);
                cells[i * n + j] = c;
                cells[j * n + i] = c;
            }
        }
        CompleteStructure { n, cells }
    }

    pub fn monochrome(n: usize, c: Color) -> Self {
        CompleteStructure::from_fn(n, |_, _| c)
    }

    /// Builds a structure from an explicit edge list; every pair must be
    /// listed exactly once (in either orientation).
    pub fn from_edges(n: usize, edges: &[(usize, usize, Color)]) -> Result<Self> {
        let mut seen = vec![false; n * n];
        let mut cells = vec![Color(0); n * n];
        for &(i, j, c) in edges {
            for v in [i, j] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, len: n });
                }
            }
            if i == j {
                return Err(Error::input(format!("self-pair ({i}, {i}) is not allowed")));
            }
            if seen[i * n + j] {
                return Err(Error::input(format!("pair ({i}, {j}) colored twice")));
            }
            seen[i * n + j] = true;
            seen[j * n + i] = true;
            cells[i * n + j] = c;
            cells[j * n + i] = c;
        }
        for j in 1..n {
            for i in 0..j {
                if !seen[i * n + j] {
                    return Err(Error::input(format!("pair ({i}, {j}) has no color")));
                }
            }
        }
        Ok(CompleteStructure { n, cells })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// The color `r(i, j)`; `i != j`.
    #[inline]
    pub fn color(&self, i: usize, j: usize) -> Color {
        debug_assert!(i != j, "no self-pairs");
        self.cells[i * self.n + j]
    }

    /// All pairs `(i, j, r(i, j))` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Color)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j, self.color(i, j))))
    }

    /// Adjoins one vertex whose colors to `0..n` are `colors`.
    pub fn with_vertex(&self, colors: &[Color]) -> Self {
        let mut next = self.clone();
        next.push_vertex(colors);
        next
    }

    pub(crate) fn push_vertex(&mut self, colors: &[Color]) {
        assert_eq!(
            colors.len(),
            self.n,
            "new vertex needs one color per existing vertex"
        );
        let n = self.n;
        let m = n + 1;
        let mut cells = vec![Color(0); m * m];
        for i in 0..n {
            cells[i * m..i * m + n].copy_from_slice(&self.cells[i * n..i * n + n]);
            cells[i * m + n] = colors[i];
            cells[n * m + i] = colors[i];
        }
        self.n = m;
        self.cells = cells;
    }

    /// The substructure induced on `vertices`, relabelled `0..vertices.len()`
    /// in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        CompleteStructure::from_fn(vertices.len(), |i, j| self.color(vertices[i], vertices[j]))
    }

    /// Relabels vertices: vertex `v` of `self` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut inv = vec![0; self.n];
        for (v, &p) in perm.iter().enumerate() {
            inv[p] = v;
        }
        CompleteStructure::from_fn(self.n, |i, j| self.color(inv[i], inv[j]))
    }

    pub(crate) fn check_palette(&self, palette: &Palette) -> Result<()> {
        for (_, _, c) in self.edges() {
            palette.check(c)?;
        }
        Ok(())
    }

    /// Lexicographically least color code over all vertex orderings, and the
    /// ordering achieving it (`order[k]` is the vertex placed at position `k`).
    ///
    /// The code lists, for each position `j = 1..n`, the colors from positions
    /// `0..j` to position `j`. Search is branch-and-bound on prefixes.
    pub fn canonical_form(&self) -> (Vec<u8>, Vec<usize>) {
        let n = self.n;
        if n <= 1 {
            return (Vec::new(), (0..n).collect());
        }
        let mut search = CanonSearch {
            m: self,
            order: Vec::with_capacity(n),
            used: vec![false; n],
            code: Vec::with_capacity(n * (n - 1) / 2),
            best: None,
        };
        search.run();
        let (code, order) = search.best.expect("n >= 2 always reaches a leaf");
        (code, order)
    }

    /// The canonical representative: vertices renumbered by canonical position.
    pub fn canonical(&self) -> Self {
        let (code, _) = self.canonical_form();
        CompleteStructure::from_code(self.n, &code)
    }

    /// Rebuilds a structure from a canonical-form code.
    pub fn from_code(n: usize, code: &[u8]) -> Self {
        assert_eq!(code.len(), n * n.saturating_sub(1) / 2);
        CompleteStructure::from_fn(n, |i, j| Color(code[j * (j - 1) / 2 + i]))
    }
}

struct CanonSearch<'a> {
    m: &'a CompleteStructure,
    order: Vec<usize>,
    used: Vec<bool>,
    code: Vec<u8>,
    best: Option<(Vec<u8>, Vec<usize>)>,
}

impl CanonSearch<'_> {
    fn run(&mut self) {
        let n = self.m.n;
        if self.order.len() == n {
            let better = match &self.best {
                None => true,
                Some((b, _)) => self.code < *b,
            };
            if better {
                self.best = Some((self.code.clone(), self.order.clone()));
            }
            return;
        }
        for v in 0..n {
            if self.used[v] {
                continue;
            }
            let start = self.code.len();
            for k in 0..self.order.len() {
                let u = self.order[k];
                self.code.push(self.m.color(u, v).0);
            }
            let prune = match &self.best {
                Some((b, _)) => self.code[..].cmp(&b[..self.code.len()]) == Ordering::Greater,
                None => false,
            };
            if !prune {
                self.used[v] = true;
                self.order.push(v);
                self.run();
                self.order.pop();
                self.used[v] = false;
            }
            self.code.truncate(start);
        }
    }
}

/// A vertex triple realizing a forbidden triangle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    /// Ascending vertex indices.
    pub vertices: [usize; 3],
    pub triangle: Triangle,
}

/// Every vertex triple of `m` whose color multiset lies in `s`, in ascending
/// lexicographic order of the triple. Empty iff `m` is in `Forb_c(S)`.
pub fn validate_structure(m: &CompleteStructure, s: &TriangleSet) -> Result<Vec<Violation>> {
    m.check_palette(s.palette())?;
    Ok(violations_unchecked(m, s))
}

pub(crate) fn violations_unchecked(m: &CompleteStructure, s: &TriangleSet) -> Vec<Violation> {
    let n = m.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let ij = m.color(i, j);
            for k in j + 1..n {
                let (ik, jk) = (m.color(i, k), m.color(j, k));
                if s.forbids(ij, ik, jk) {
                    out.push(Violation {
                        vertices: [i, j, k],
                        triangle: Triangle::new(ij, ik, jk),
                    });
                }
            }
        }
    }
    out
}

/// Fail-fast membership test for `Forb_c(S)`.
pub fn is_member(m: &CompleteStructure, s: &TriangleSet) -> Result<bool> {
    m.check_palette(s.palette())?;
    Ok(is_member_unchecked(m, s))
}

pub(crate) fn is_member_unchecked(m: &CompleteStructure, s: &TriangleSet) -> bool {
    let n = m.len();
    for i in 0..n {
        for j in i + 1..n {
            let ij = m.color(i, j);
            for k in j + 1..n {
                if s.forbids(ij, m.color(i, k), m.color(j, k)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether a color-preserving bijection `m1 -> m2` extending `pinned` exists.
pub fn structure_isomorphic(
    m1: &CompleteStructure,
    m2: &CompleteStructure,
    pinned: &[(usize, usize)],
) -> Result<bool> {
    let n = m1.len();
    for &(u, v) in pinned {
        if u >= n {
            return Err(Error::VertexOutOfRange { vertex: u, len: n });
        }
        if v >= m2.len() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                len: m2.len(),
            });
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut taken = vec![false; m2.len()];
    for &(u, v) in pinned {
        if map[u] != usize::MAX && map[u] != v {
            return Err(Error::input(format!("vertex {u} pinned twice")));
        }
        if map[u] == usize::MAX && taken[v] {
            return Err(Error::input(format!(
                "pinned correspondence is not injective at {v}"
            )));
        }
        map[u] = v;
        taken[v] = true;
    }
    if n != m2.len() {
        return Ok(false);
    }
    // Pinned pairs must agree among themselves.
    for &(u1, v1) in pinned {
        for &(u2, v2) in pinned {
            if u1 < u2 && m1.color(u1, u2) != m2.color(v1, v2) {
                return Ok(false);
            }
        }
    }
    let free: Vec<usize> = (0..n).filter(|&u| map[u] == usize::MAX).collect();
    Ok(extend_iso(m1, m2, &free, 0, &mut map, &mut taken))
}

fn extend_iso(
    m1: &CompleteStructure,
    m2: &CompleteStructure,
    free: &[usize],
    depth: usize,
    map: &mut [usize],
    taken: &mut [bool],
) -> bool {
    let Some(&u) = free.get(depth) else {
        return true;
    };
    for v in 0..m2.len() {
        if taken[v] {
            continue;
        }
        let consistent = (0..m1.len())
            .filter(|&w| w != u && map[w] != usize::MAX)
            .all(|w| m1.color(u, w) == m2.color(v, map[w]));
        if consistent {
            map[u] = v;
            taken[v] = true;
            if extend_iso(m1, m2, free, depth + 1, map, taken) {
                return true;
            }
            map[u] = usize::MAX;
            taken[v] = false;
        }
    }
    false
}

/// The color vector `(r(a, b))` for `b` in `base`, in ascending vertex order.
pub fn type_vector(m: &CompleteStructure, a: usize, base: &[usize]) -> Result<Vec<Color>> {
    let n = m.len();
    if a >= n {
        return Err(Error::VertexOutOfRange { vertex: a, len: n });
    }
    let mut sorted = base.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &b in &sorted {
        if b >= n {
            return Err(Error::VertexOutOfRange { vertex: b, len: n });
        }
        if b == a {
            return Err(Error::input(format!("vertex {a} lies in its own base")));
        }
    }
    Ok(sorted.iter().map(|&b| m.color(a, b)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::Palette;

    fn pal() -> Palette {
        Palette::parse("RGXY").unwrap()
    }

    fn c(ch: char) -> Color {
        pal().color(ch).unwrap()
    }

    fn s11() -> TriangleSet {
        TriangleSet::from_words(pal(), ["RXX", "GGX", "YXX", "XXX"]).unwrap()
    }

    #[test]
    fn rxx_triangle_is_reported() {
        let m = CompleteStructure::from_edges(3, &[(0, 1, c('R')), (0, 2, c('X')), (1, 2, c('X'))])
            .unwrap();
        let v = validate_structure(&m, &s11()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].vertices, [0, 1, 2]);
        assert_eq!(v[0].triangle.word(&pal()), "RXX");
    }

    #[test]
    fn empty_and_monochrome_structures_are_clean() {
        assert!(validate_structure(&CompleteStructure::empty(), &s11())
            .unwrap()
            .is_empty());
        let m = CompleteStructure::monochrome(5, c('R'));
        assert!(validate_structure(&m, &s11()).unwrap().is_empty());
    }

    #[test]
    fn out_of_palette_color_is_an_error() {
        let m = CompleteStructure::monochrome(3, Color(9));
        assert!(matches!(
            validate_structure(&m, &s11()),
            Err(Error::ColorOutOfRange { index: 9, .. })
        ));
    }

    #[test]
    fn from_edges_requires_totality() {
        assert!(CompleteStructure::from_edges(3, &[(0, 1, c('R'))]).is_err());
        assert!(CompleteStructure::from_edges(2, &[(0, 0, c('R'))]).is_err());
        assert!(CompleteStructure::from_edges(2, &[(0, 1, c('R')), (1, 0, c('G'))]).is_err());
    }

    #[test]
    fn single_edge_isomorphism() {
        let r = CompleteStructure::monochrome(2, c('R'));
        let g = CompleteStructure::monochrome(2, c('G'));
        assert!(structure_isomorphic(&r, &r, &[]).unwrap());
        assert!(!structure_isomorphic(&r, &g, &[]).unwrap());
    }

    #[test]
    fn non_injective_pin_is_rejected() {
        let r = CompleteStructure::monochrome(3, c('R'));
        assert!(structure_isomorphic(&r, &r, &[(0, 1), (2, 1)]).is_err());
        assert!(structure_isomorphic(&r, &r, &[(0, 1), (0, 2)]).is_err());
    }

    #[test]
    fn type_vector_examples() {
        let m = CompleteStructure::monochrome(4, c('R'));
        assert!(type_vector(&m, 0, &[]).unwrap().is_empty());
        assert_eq!(type_vector(&m, 0, &[3, 1, 2]).unwrap().len(), 3);
        assert!(type_vector(&m, 1, &[1]).is_err());
    }

    #[test]
    fn canonical_form_is_label_invariant() {
        let m = CompleteStructure::from_fn(5, |i, j| Color(((i * 3 + j * 7) % 4) as u8));
        let perm = [3, 0, 4, 1, 2];
        let relabelled = m.relabel(&perm);
        assert_eq!(m.canonical_form().0, relabelled.canonical_form().0);
        assert_eq!(m.canonical(), relabelled.canonical());
        let (code, order) = m.canonical_form();
        assert_eq!(m.induced(&order), CompleteStructure::from_code(5, &code));
    }

    #[test]
    fn push_vertex_keeps_old_colors() {
        let m = CompleteStructure::monochrome(2, c('R'));
        let m2 = m.with_vertex(&[c('G'), c('X')]);
        assert_eq!(m2.color(0, 1), c('R'));
        assert_eq!(m2.color(2, 0), c('G'));
        assert_eq!(m2.color(1, 2), c('X'));
        assert_eq!(m2.induced(&[0, 1]), m);
    }
}
