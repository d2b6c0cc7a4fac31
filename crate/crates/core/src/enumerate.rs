//! Members of `Forb_c(S)` up to isomorphism, by vertex count.
//!
//! Level `n` is produced by adding one vertex to every representative of
//! level `n - 1` in all valid ways and keeping one canonical form per class.
//! Every structure on `n` vertices arises this way, since deleting a vertex
//! leaves a member of level `n - 1`.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::color::Color;
use crate::structure::CompleteStructure;
use crate::triangle::TriangleSet;

/// Canonical representatives of each size `0..=max_size`, each level sorted
/// by canonical code.
pub fn enumerate_forb(s: &TriangleSet, max_size: usize) -> Vec<Vec<CompleteStructure>> {
    let mut levels = vec![vec![CompleteStructure::empty()]];
    for n in 1..=max_size {
        let prev = levels.last().expect("level 0 exists");
        let codes: BTreeSet<Vec<u8>> = prev
            .par_iter()
            .map(|m| {
                let mut out = BTreeSet::new();
                for ext in one_point_extensions(m, s) {
                    out.insert(ext.canonical_form().0);
                }
                out
            })
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            });
        levels.push(
            codes
                .iter()
                .map(|c| CompleteStructure::from_code(n, c))
                .collect(),
        );
    }
    levels
}

/// Every valid structure obtained by adding one vertex after the existing ones.
pub fn one_point_extensions(m: &CompleteStructure, s: &TriangleSet) -> Vec<CompleteStructure> {
    let n = m.len();
    let k = s.palette().len() as u8;
    let mut out = Vec::new();
    let mut colors = vec![Color(0); n];
    extend(m, s, k, 0, &mut colors, &mut out);
    out
}

fn extend(
    m: &CompleteStructure,
    s: &TriangleSet,
    k: u8,
    pos: usize,
    colors: &mut [Color],
    out: &mut Vec<CompleteStructure>,
) {
    if pos == colors.len() {
        out.push(m.with_vertex(colors));
        return;
    }
    for c in 0..k {
        let c = Color(c);
        if (0..pos).all(|i| !s.forbids(m.color(i, pos), colors[i], c)) {
            colors[pos] = c;
            extend(m, s, k, pos + 1, colors, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::Palette;

    fn counts(s: &TriangleSet, n: usize) -> Vec<usize> {
        enumerate_forb(s, n).iter().map(Vec::len).collect()
    }

    #[test]
    fn unconstrained_two_colors_match_graph_counts() {
        // complete 2-colorings up to isomorphism are simple graphs
        let s = TriangleSet::empty(Palette::parse("AB").unwrap());
        assert_eq!(counts(&s, 5), vec![1, 1, 2, 4, 11, 34]);
    }

    #[test]
    fn triangle_free_graphs() {
        // forbidding AAA leaves triangle-free graphs on the A edges
        let s = TriangleSet::from_words(Palette::parse("AB").unwrap(), ["AAA"]).unwrap();
        assert_eq!(counts(&s, 6), vec![1, 1, 2, 3, 7, 14, 38]);
    }

    #[test]
    fn levels_are_sorted_canonical_and_valid() {
        let s =
            TriangleSet::from_words(Palette::parse("RGX").unwrap(), ["RXX", "GGX", "XXX"]).unwrap();
        for level in enumerate_forb(&s, 4) {
            for w in level.windows(2) {
                assert!(w[0].canonical_form().0 < w[1].canonical_form().0);
            }
            for m in &level {
                assert_eq!(m.canonical(), *m);
                assert!(crate::structure::is_member_unchecked(m, &s));
            }
        }
    }
}
