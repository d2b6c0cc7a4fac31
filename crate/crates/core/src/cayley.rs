//! Translation-invariant structures on `Z_2^n`.
//!
//! A coloring `chi` of the nonzero group elements defines the complete
//! structure with `r(x, y) = chi[x ^ y]`. Translations are automorphisms, so
//! validity reduces to the lines `{a, b, a ^ b}` and the extension property
//! for bases of size at most two reduces to bases `{0}` and `{0, d}`.
//! Colorings are found by tabu search on
//! `violated lines * LINE_WEIGHT + missing types`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::color::Color;
use crate::structure::CompleteStructure;
use crate::triangle::TriangleSet;

const LINE_WEIGHT: i64 = 2;

pub(crate) struct SearchParams {
    pub dim: usize,
    pub t: usize,
    pub steps: usize,
    pub seed: u64,
}

/// A coloring of `1..2^dim`; index 0 is unused.
pub(crate) fn find_coloring(s: &TriangleSet, p: &SearchParams) -> Option<Vec<Color>> {
    assert!(p.t <= 2, "translation search covers bases of size <= 2");
    let mut st = State::new(s, p.dim, p.t, &mut ChaCha8Rng::seed_from_u64(p.seed));
    if st.cost() == 0 {
        return Some(st.colors());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = st.chi.len();
    let k = st.k;
    let mut tabu = vec![0usize; n * k];
    let mut best = st.cost();
    let mut since_best = 0;
    for step in 1..=p.steps {
        let mut choice: Option<(i64, usize, u8)> = None;
        let mut ties = 0u32;
        for e in 1..n {
            let old = st.chi[e];
            for c in 0..k as u8 {
                if c == old {
                    continue;
                }
                st.apply(e, c);
                let cost = st.cost();
                st.apply(e, old);
                let allowed = tabu[e * k + c as usize] <= step || cost < best;
                if !allowed {
                    continue;
                }
                match choice {
                    Some((b, _, _)) if cost > b => {}
                    Some((b, _, _)) if cost == b => {
                        ties += 1;
                        if rng.gen_range(0..=ties) == 0 {
                            choice = Some((cost, e, c));
                        }
                    }
                    _ => {
                        ties = 0;
                        choice = Some((cost, e, c));
                    }
                }
            }
        }
        let Some((cost, e, c)) = choice else { continue };
        let old = st.chi[e];
        st.apply(e, c);
        tabu[e * k + old as usize] = step + 7 + rng.gen_range(0..n.min(16));
        if cost == 0 {
            return Some(st.colors());
        }
        if cost < best {
            best = cost;
            since_best = 0;
        } else {
            since_best += 1;
        }
        if since_best > 50 * n {
            // restart from a perturbed copy
            for _ in 0..n / 4 {
                let e = rng.gen_range(1..n);
                let c = rng.gen_range(0..k as u8);
                st.apply(e, c);
            }
            best = st.cost();
            since_best = 0;
        }
    }
    None
}

/// The structure on `2^dim` vertices defined by `chi`.
pub(crate) fn structure(chi: &[Color]) -> CompleteStructure {
    CompleteStructure::from_fn(chi.len(), |x, y| chi[x ^ y])
}

struct State {
    k: usize,
    t: usize,
    chi: Vec<u8>,
    /// Occurrences of each color among nonzero elements.
    count: Vec<usize>,
    /// `pairs[(d * k + p) * k + q]`: elements `w` outside `{0, d}` with
    /// `chi[w] = p` and `chi[w ^ d] = q`.
    pairs: Vec<u32>,
    /// `forbid[(a * k + b) * k + c]`.
    forbid: Vec<bool>,
    violated: i64,
    missing: i64,
}

impl State {
    fn new(s: &TriangleSet, dim: usize, t: usize, rng: &mut ChaCha8Rng) -> Self {
        let n = 1usize << dim;
        let k = s.palette().len();
        let mut forbid = vec![false; k * k * k];
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    forbid[(a * k + b) * k + c] =
                        s.forbids(Color(a as u8), Color(b as u8), Color(c as u8));
                }
            }
        }
        let mut chi = vec![0u8; n];
        for x in chi.iter_mut().skip(1) {
            *x = rng.gen_range(0..k as u8);
        }
        let mut st = State {
            k,
            t,
            chi,
            count: vec![0; k],
            pairs: vec![0; if t >= 2 { n * k * k } else { 0 }],
            forbid,
            violated: 0,
            missing: 0,
        };
        st.recount();
        st
    }

    fn forbids(&self, a: u8, b: u8, c: u8) -> bool {
        self.forbid[(a as usize * self.k + b as usize) * self.k + c as usize]
    }

    fn cost(&self) -> i64 {
        self.violated * LINE_WEIGHT + self.missing
    }

    fn colors(&self) -> Vec<Color> {
        self.chi.iter().map(|&c| Color(c)).collect()
    }

    fn recount(&mut self) {
        let n = self.chi.len();
        let k = self.k;
        self.count.iter_mut().for_each(|c| *c = 0);
        for e in 1..n {
            self.count[self.chi[e] as usize] += 1;
        }
        self.violated = 0;
        for a in 1..n {
            for b in a + 1..n {
                let c = a ^ b;
                if c > b && self.forbids(self.chi[a], self.chi[b], self.chi[c]) {
                    self.violated += 1;
                }
            }
        }
        self.missing = 0;
        if self.t >= 1 {
            self.missing += self.count.iter().filter(|&&c| c == 0).count() as i64;
        }
        if self.t >= 2 {
            self.pairs.iter_mut().for_each(|p| *p = 0);
            for d in 1..n {
                for w in 1..n {
                    if w != d {
                        self.pairs
                            [(d * k + self.chi[w] as usize) * k + self.chi[w ^ d] as usize] += 1;
                    }
                }
            }
            for d in 1..n {
                self.missing += self.row_missing(d);
            }
        }
    }

    /// Admissible but unrealized types over `{0, d}`.
    fn row_missing(&self, d: usize) -> i64 {
        let k = self.k;
        let cd = self.chi[d];
        let mut m = 0;
        for p in 0..k {
            for q in 0..k {
                if self.pairs[(d * k + p) * k + q] == 0 && !self.forbids(cd, p as u8, q as u8) {
                    m += 1;
                }
            }
        }
        m
    }

    fn bump(&mut self, d: usize, p: u8, q: u8, up: bool) {
        let k = self.k;
        let i = (d * k + p as usize) * k + q as usize;
        let admissible = !self.forbids(self.chi[d], p, q);
        if up {
            if self.pairs[i] == 0 && admissible {
                self.missing -= 1;
            }
            self.pairs[i] += 1;
        } else {
            self.pairs[i] -= 1;
            if self.pairs[i] == 0 && admissible {
                self.missing += 1;
            }
        }
    }

    fn apply(&mut self, e: usize, c: u8) {
        let old = self.chi[e];
        if old == c {
            return;
        }
        let n = self.chi.len();
        for a in 1..n {
            let b = a ^ e;
            if a != e && a < b {
                let (x, y) = (self.chi[a], self.chi[b]);
                self.violated += self.forbids(c, x, y) as i64 - self.forbids(old, x, y) as i64;
            }
        }
        if self.t >= 1 {
            if self.count[old as usize] == 1 {
                self.missing += 1;
            }
            self.count[old as usize] -= 1;
            if self.count[c as usize] == 0 {
                self.missing -= 1;
            }
            self.count[c as usize] += 1;
        }
        if self.t >= 2 {
            let before = self.row_missing(e);
            for d in 1..n {
                if d == e {
                    continue;
                }
                let x = self.chi[e ^ d];
                self.bump(d, old, x, false);
                self.bump(d, x, old, false);
            }
            self.chi[e] = c;
            for d in 1..n {
                if d == e {
                    continue;
                }
                let x = self.chi[e ^ d];
                self.bump(d, c, x, true);
                self.bump(d, x, c, true);
            }
            self.missing += self.row_missing(e) - before;
        } else {
            self.chi[e] = c;
        }
    }
}
