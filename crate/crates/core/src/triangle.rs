//! Forbidden triangles.

use std::fmt;

use crate::color::{Color, ColorSet, Palette};
use crate::error::{Error, Result};

/// An unordered multiset of three colors, stored sorted by palette index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle([Color; 3]);

impl Triangle {
    pub fn new(a: Color, b: Color, c: Color) -> Self {
        let mut t = [a, b, c];
        t.sort_unstable();
        Triangle(t)
    }

    /// Parses a word such as `RXX`; any permutation is accepted.
    pub fn parse(palette: &Palette, word: &str) -> Result<Self> {
        let chars: Vec<char> = word.chars().collect();
        if chars.len() != 3 {
            return Err(Error::Input(format!(
                "triangle {word:?} must have exactly three color symbols"
            )));
        }
        Ok(Triangle::new(
            palette.color(chars[0])?,
            palette.color(chars[1])?,
            palette.color(chars[2])?,
        ))
    }

    pub fn colors(&self) -> [Color; 3] {
        self.0
    }

    /// Number of entries (with multiplicity) lying in `set`.
    pub fn count_in(&self, set: ColorSet) -> usize {
        self.0.iter().filter(|c| set.contains(**c)).count()
    }

    pub fn count_of(&self, c: Color) -> usize {
        self.0.iter().filter(|x| **x == c).count()
    }

    /// Whether the multiset contains `{p, q}` as a sub-multiset.
    pub fn contains_pair(&self, p: Color, q: Color) -> bool {
        if p == q {
            self.count_of(p) >= 2
        } else {
            self.count_of(p) >= 1 && self.count_of(q) >= 1
        }
    }

    pub fn word(&self, palette: &Palette) -> String {
        palette.word(self.0)
    }

    pub fn display<'a>(&'a self, palette: &'a Palette) -> impl fmt::Display + 'a {
        DisplayTriangle(self, palette)
    }
}

struct DisplayTriangle<'a>(&'a Triangle, &'a Palette);

impl fmt::Display for DisplayTriangle<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.word(self.1))
    }
}

/// The forbidden-triangle system `S` over a palette.
///
/// Triangles keep their insertion order (duplicates dropped) so that a
/// constraint file written back out matches the source listing. Lookups go
/// through two dense tables: membership by sorted triple, and the veto mask
/// `veto(p, q) = { x : {x, p, q} in S }`.
#[derive(Clone, Debug)]
pub struct TriangleSet {
    palette: Palette,
    triangles: Vec<Triangle>,
    member: Vec<bool>,
    veto: Vec<u32>,
}

impl PartialEq for TriangleSet {
    fn eq(&self, other: &Self) -> bool {
        self.palette == other.palette && self.member == other.member
    }
}

impl Eq for TriangleSet {}

impl TriangleSet {
    pub fn new(palette: Palette, triangles: impl IntoIterator<Item = Triangle>) -> Result<Self> {
        let k = palette.len();
        let mut set = TriangleSet {
            member: vec![false; k * k * k],
            veto: vec![0; k * k],
            triangles: Vec::new(),
            palette,
        };
        for t in triangles {
            for c in t.colors() {
                set.palette.check(c)?;
            }
            if set.contains(&t) {
                continue;
            }
            let [a, b, c] = t.colors();
            for [x, y, z] in [
                [a, b, c],
                [a, c, b],
                [b, a, c],
                [b, c, a],
                [c, a, b],
                [c, b, a],
            ] {
                let idx = set.cell(x, y, z);
                set.member[idx] = true;
                set.veto[y.index() * k + z.index()] |= x.bit();
            }
            set.triangles.push(t);
        }
        Ok(set)
    }

    /// Builds a set from words such as `["RXX", "GGX"]`.
    pub fn from_words<'a>(
        palette: Palette,
        words: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self> {
        let triangles = words
            .into_iter()
            .map(|w| Triangle::parse(&palette, w))
            .collect::<Result<Vec<_>>>()?;
        TriangleSet::new(palette, triangles)
    }

    /// The empty constraint system.
    pub fn empty(palette: Palette) -> Self {
        TriangleSet::new(palette, []).expect("empty set is always valid")
    }

    #[inline]
    fn cell(&self, a: Color, b: Color, c: Color) -> usize {
        let k = self.palette.len();
        (a.index() * k + b.index()) * k + c.index()
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn contains(&self, t: &Triangle) -> bool {
        let [a, b, c] = t.colors();
        self.member[self.cell(a, b, c)]
    }

    #[inline]
    pub fn forbids(&self, a: Color, b: Color, c: Color) -> bool {
        self.member[self.cell(a, b, c)]
    }

    /// Colors `x` such that `{x, p, q}` is forbidden, as a bitmask.
    #[inline]
    pub fn veto(&self, p: Color, q: Color) -> u32 {
        self.veto[p.index() * self.palette.len() + q.index()]
    }

    pub fn words(&self) -> Vec<String> {
        self.triangles
            .iter()
            .map(|t| t.word(&self.palette))
            .collect()
    }
}
