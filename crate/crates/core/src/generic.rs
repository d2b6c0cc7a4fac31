//! Finite approximations of the Fraïssé limit with the extension property
//! for bases of bounded size.
//!
//! Two constructions are tried in turn.
//!
//! * Translation-invariant structures on `Z_2^n` (levels `t <= 2`): a seeded
//!   tabu search over colorings of the group, for growing `n`.
//! * Extension scans: every pair `(B, τ)` with `|B| <= t` and `τ` an
//!   admissible, unrealized one-point type over `B` gets a fresh vertex with
//!   colors `τ` on `B`. Its remaining edges are chosen greedily to realize as
//!   many other pending pairs as possible. Construction stops after a scan
//!   that adds nothing, or fails at the vertex limit.
//!
//! For `t >= 1` the order is first checked for closure, so a class that is
//! not closed under `⊗` is reported with its counterexample.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use serde::Serialize;

use crate::amalgam::{
    check_compatible, complete_unchecked, AmalgamationInstance, CompletionResult,
};
use crate::cayley::{find_coloring, structure as group_structure, SearchParams};
use crate::color::{Color, ColorLanguage, Palette};
use crate::conditions::check_maincond_i;
use crate::error::{Error, Result};
use crate::format::write_structure;
use crate::search::{check_closure, Counterexample};
use crate::structure::{is_member_unchecked, CompleteStructure};
use crate::triangle::TriangleSet;

pub const MAX_SATURATION_LEVEL: usize = 3;
pub const DEFAULT_VERTEX_LIMIT: usize = 4000;
pub const DEFAULT_GROUP_DIM: usize = 6;
pub const DEFAULT_SEARCH_STEPS: usize = 20_000;
/// Search bound for the closure precheck.
pub const PRECHECK_BOUND: usize = 3;

/// One adjoined vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionStep {
    pub scan: usize,
    pub vertex: usize,
    pub base: Vec<usize>,
    pub tau: Vec<Color>,
    /// Unrealized pairs settled by this vertex.
    pub settled: usize,
}

/// How an approximation was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Method {
    /// Vertices are the elements of `Z_2^dim`, `r(x, y)` depends on `x ^ y`.
    Group { dim: usize },
    /// Extension scans; see the log.
    Extension,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericApproximation {
    pub structure: CompleteStructure,
    pub saturation_level: usize,
    pub seed: u64,
    pub method: Method,
    pub scans: usize,
    /// Adjoined vertices, empty for [`Method::Group`].
    pub log: Vec<ExtensionStep>,
}

/// Why a construction stopped: the class is not closed under `⊗`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionFailure {
    pub message: String,
    pub instance: AmalgamationInstance,
    pub completion: CompletionResult,
    /// Base vertices (instance indices) that already obstruct every solution
    /// color of a failed edge, smallest such set first found.
    pub blocking_base: Option<Vec<usize>>,
}

impl ConstructionFailure {
    fn new(
        message: String,
        instance: AmalgamationInstance,
        lang: &ColorLanguage,
        s: &TriangleSet,
    ) -> Self {
        let completion = complete_unchecked(&instance, lang, s);
        let blocking_base = completion
            .failed_edges
            .first()
            .map(|&(a, c)| minimal_blocking_base(&instance, a, c - instance.left_new(), lang, s));
        ConstructionFailure {
            message,
            instance,
            completion,
            blocking_base,
        }
    }

    fn from_counterexample(
        message: String,
        w: Counterexample,
        lang: &ColorLanguage,
        s: &TriangleSet,
    ) -> Self {
        ConstructionFailure::new(message, w.instance, lang, s)
    }
}

/// Smallest subset of the base whose profile pairs alone obstruct every
/// solution color for `(a, c)` (`a` indexes `left`, `c` indexes `right`).
fn minimal_blocking_base(
    inst: &AmalgamationInstance,
    a: usize,
    c: usize,
    lang: &ColorLanguage,
    s: &TriangleSet,
) -> Vec<usize> {
    let k = inst.base_len();
    let vetoes: Vec<u32> = (0..k)
        .map(|b| s.veto(inst.left().color(a, b), inst.right().color(b, c)))
        .collect();
    let need = lang.solutions().0;
    (1..=k)
        .flat_map(|size| combinations(k, size))
        .find(|pick| pick.iter().fold(0, |m, &b| m | vetoes[b]) & need == need)
        .unwrap_or_else(|| (0..k).collect())
}

/// Builder options beyond the saturation level and seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub vertex_limit: usize,
    /// Largest group dimension tried; `None` skips the group search.
    pub group_dim: Option<usize>,
    /// Tabu steps per group dimension.
    pub search_steps: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            vertex_limit: DEFAULT_VERTEX_LIMIT,
            group_dim: Some(DEFAULT_GROUP_DIM),
            search_steps: DEFAULT_SEARCH_STEPS,
        }
    }
}

pub fn build_generic(
    s: &TriangleSet,
    lang: &ColorLanguage,
    t: usize,
    seed: u64,
) -> Result<GenericApproximation> {
    build_generic_with(s, lang, t, seed, BuildOptions::default())
}

pub fn build_generic_with(
    s: &TriangleSet,
    lang: &ColorLanguage,
    t: usize,
    seed: u64,
    opts: BuildOptions,
) -> Result<GenericApproximation> {
    check_compatible(lang, s)?;
    if t > MAX_SATURATION_LEVEL {
        return Err(Error::Capability(format!(
            "saturation level {t} exceeds the ceiling {MAX_SATURATION_LEVEL}"
        )));
    }
    if t > 0 {
        let verdict = check_closure(s, lang, PRECHECK_BOUND)?;
        if let Some(w) = verdict.witness {
            let msg = format!(
                "order {} does not close the class: {} on a base of {} vertices",
                lang.order_compact(),
                if w.completion.failed_edges.is_empty() {
                    "forbidden triangle"
                } else {
                    "no admissible solution color"
                },
                w.instance.base_len()
            );
            return Err(Error::Construction(Box::new(
                ConstructionFailure::from_counterexample(msg, w, lang, s),
            )));
        }
    }

    if t <= 2 {
        if let Some(max_dim) = opts.group_dim {
            for dim in 0..=max_dim {
                if 1usize << dim > opts.vertex_limit {
                    break;
                }
                let params = SearchParams {
                    dim,
                    t,
                    steps: opts.search_steps,
                    seed,
                };
                if let Some(chi) = find_coloring(s, &params) {
                    return Ok(GenericApproximation {
                        structure: group_structure(&chi),
                        saturation_level: t,
                        seed,
                        method: Method::Group { dim },
                        scans: 0,
                        log: Vec::new(),
                    });
                }
            }
        }
    }
    extend_scans(s, lang, t, seed, opts.vertex_limit)
}

fn extend_scans(
    s: &TriangleSet,
    lang: &ColorLanguage,
    t: usize,
    seed: u64,
    vertex_limit: usize,
) -> Result<GenericApproximation> {
    let k = s.palette().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let type_orders: Vec<Vec<Vec<Color>>> = (0..=t)
        .map(|len| {
            let mut all = all_types(k, len);
            if seed != 0 {
                all.shuffle(&mut rng);
            }
            all
        })
        .collect();

    let mut m = CompleteStructure::empty();
    let mut log = Vec::new();
    let mut scans = 0;
    loop {
        scans += 1;
        let reqs = unrealized(&m, s, t, &type_orders);
        if reqs.is_empty() {
            break;
        }
        let scan_start = m.len();
        let mut settled = vec![false; reqs.len()];
        for i in 0..reqs.len() {
            if settled[i] {
                continue;
            }
            let (base, tau) = &reqs[i];
            if realized_among(&m, base, tau, scan_start) {
                settled[i] = true;
                continue;
            }
            if m.len() >= vertex_limit {
                return Err(Error::Capability(format!(
                    "vertex limit {vertex_limit} reached before saturation at level {t}"
                )));
            }
            let colors = choose_colors(&m, s, lang, t, &reqs, &settled, i)?;
            let vertex = m.len();
            m.push_vertex(&colors);
            let mut count = 0;
            for j in i..reqs.len() {
                if !settled[j] && realizes(&m, vertex, &reqs[j].0, &reqs[j].1) {
                    settled[j] = true;
                    count += 1;
                }
            }
            log.push(ExtensionStep {
                scan: scans,
                vertex,
                base: base.clone(),
                tau: tau.clone(),
                settled: count,
            });
        }
    }
    debug_assert!(is_member_unchecked(&m, s));
    Ok(GenericApproximation {
        structure: m,
        saturation_level: t,
        seed,
        method: Method::Extension,
        scans,
        log,
    })
}

fn all_types(k: usize, len: usize) -> Vec<Vec<Color>> {
    let total = k.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let mut v = vec![Color(0); len];
            for slot in v.iter_mut().rev() {
                *slot = Color((code % k) as u8);
                code /= k;
            }
            v
        })
        .collect()
}

/// `size`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if size > n {
        return out;
    }
    let mut pick: Vec<usize> = (0..size).collect();
    loop {
        out.push(pick.clone());
        let Some(i) = (0..size).rev().find(|&i| pick[i] < n - size + i) else {
            return out;
        };
        pick[i] += 1;
        for j in i + 1..size {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// All vertex subsets of size `<= t`, by size and then lexicographically.
fn bases(n: usize, t: usize) -> Vec<Vec<usize>> {
    (0..=t.min(n))
        .flat_map(|size| combinations(n, size))
        .collect()
}

fn admissible(m: &CompleteStructure, s: &TriangleSet, base: &[usize], tau: &[Color]) -> bool {
    (0..base.len())
        .all(|i| (i + 1..base.len()).all(|j| !s.forbids(m.color(base[i], base[j]), tau[i], tau[j])))
}

fn realizes(m: &CompleteStructure, v: usize, base: &[usize], tau: &[Color]) -> bool {
    !base.contains(&v) && base.iter().zip(tau).all(|(&b, &c)| m.color(v, b) == c)
}

fn realized_among(m: &CompleteStructure, base: &[usize], tau: &[Color], from: usize) -> bool {
    (from..m.len()).any(|v| realizes(m, v, base, tau))
}

/// Unrealized admissible pairs, bases in order and types in `type_orders`.
fn unrealized(
    m: &CompleteStructure,
    s: &TriangleSet,
    t: usize,
    type_orders: &[Vec<Vec<Color>>],
) -> Vec<(Vec<usize>, Vec<Color>)> {
    let k = s.palette().len();
    bases(m.len(), t)
        .into_par_iter()
        .map(|base| {
            let mut seen = vec![false; k.pow(base.len() as u32)];
            for v in 0..m.len() {
                if base.contains(&v) {
                    continue;
                }
                let code = base
                    .iter()
                    .fold(0, |acc, &b| acc * k + m.color(v, b).index());
                seen[code] = true;
            }
            type_orders[base.len()]
                .iter()
                .filter(|tau| {
                    let code = tau.iter().fold(0, |acc, c| acc * k + c.index());
                    !seen[code] && admissible(m, s, &base, tau)
                })
                .map(|tau| (base.clone(), tau.clone()))
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect()
}

/// Colors from a new vertex to every existing vertex.
///
/// The colors of requirement `seed` are fixed first. The other vertices
/// follow in index order, each taking the color that keeps the extension in
/// `Forb_c(S)` and completes the most unsettled requirements, counting also
/// types over the new vertex (alone or with one colored vertex) that become
/// realized. Ties go to the priority order, then to palette order.
fn choose_colors(
    m: &CompleteStructure,
    s: &TriangleSet,
    lang: &ColorLanguage,
    t: usize,
    reqs: &[(Vec<usize>, Vec<Color>)],
    settled: &[bool],
    seed: usize,
) -> Result<Vec<Color>> {
    let n = m.len();
    let k = s.palette().len();
    let preference: Vec<Color> = lang
        .priority()
        .iter()
        .copied()
        .chain(s.palette().colors().filter(|c| !lang.is_solution(*c)))
        .collect();

    let (seed_base, seed_tau) = &reqs[seed];
    let mut order: Vec<usize> = seed_base.clone();
    order.extend((0..n).filter(|v| !seed_base.contains(v)));
    // unsettled requirements through each vertex, and whether each is
    // still consistent with the colors chosen so far
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut alive = vec![false; reqs.len()];
    for j in seed + 1..reqs.len() {
        if settled[j] {
            continue;
        }
        let consistent = reqs[j].0.iter().zip(&reqs[j].1).all(|(b, c)| {
            seed_base
                .iter()
                .position(|x| x == b)
                .is_none_or(|i| seed_tau[i] == *c)
        });
        if consistent {
            alive[j] = true;
            for &v in &reqs[j].0 {
                if !seed_base.contains(&v) {
                    through[v].push(j);
                }
            }
        }
    }

    let mut d = Draft {
        colors: vec![None; n],
        colored: Vec::with_capacity(n),
        seen: vec![false; k],
        covered: vec![false; if t >= 2 { n * k * k } else { 0 }],
        k,
        pairs: t >= 2,
    };
    for (&b, &c) in seed_base.iter().zip(seed_tau) {
        d.assign(m, b, c);
    }

    for &w in &order[seed_base.len()..] {
        let mut best: Option<(usize, Color)> = None;
        for &c in &preference {
            let valid = d
                .colored
                .iter()
                .all(|&u| !s.forbids(c, d.color(u), m.color(u, w)));
            if !valid {
                continue;
            }
            let mut gain = if d.seen[c.index()] { 0 } else { n * k };
            for &j in &through[w] {
                if alive[j]
                    && reqs[j].1[reqs[j].0.iter().position(|&b| b == w).expect("indexed")] == c
                {
                    gain += 1;
                }
            }
            if t >= 2 {
                for &v in &d.colored {
                    let c2 = m.color(w, v);
                    if !d.covered[v * k * k + c.index() * k + c2.index()]
                        && !s.forbids(d.color(v), c, c2)
                    {
                        gain += 1;
                    }
                }
            }
            if best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, c));
            }
        }
        let Some((_, c)) = best else {
            let filled: Vec<Color> = d.colors.iter().map(|c| c.unwrap_or(Color(0))).collect();
            let inst = domain_instance(m, &d.colored, &filled, &[w]);
            let msg = format!("no color towards vertex {w} avoids the forbidden triangles");
            return Err(Error::Construction(Box::new(ConstructionFailure::new(
                msg, inst, lang, s,
            ))));
        };
        d.assign(m, w, c);
        for &j in &through[w] {
            if reqs[j].1[reqs[j].0.iter().position(|&b| b == w).expect("indexed")] != c {
                alive[j] = false;
            }
        }
    }
    Ok(d.colors
        .into_iter()
        .map(|c| c.expect("every vertex colored"))
        .collect())
}

/// Partial color vector of a new vertex with coverage bookkeeping.
struct Draft {
    colors: Vec<Option<Color>>,
    colored: Vec<usize>,
    seen: Vec<bool>,
    /// `covered[v * k * k + c1 * k + c2]`: some colored `w` has
    /// `r(new, w) = c1` and `r(w, v) = c2`.
    covered: Vec<bool>,
    k: usize,
    pairs: bool,
}

impl Draft {
    fn color(&self, v: usize) -> Color {
        self.colors[v].expect("vertex already colored")
    }

    fn assign(&mut self, m: &CompleteStructure, w: usize, c: Color) {
        self.colors[w] = Some(c);
        self.colored.push(w);
        self.seen[c.index()] = true;
        if self.pairs {
            let k = self.k;
            for v in 0..m.len() {
                if v != w {
                    self.covered[v * k * k + c.index() * k + m.color(w, v).index()] = true;
                }
            }
        }
    }
}

/// The instance `D + new` versus `D + others`, base vertices first.
fn domain_instance(
    m: &CompleteStructure,
    dom: &[usize],
    colors: &[Color],
    others: &[usize],
) -> AmalgamationInstance {
    let k = dom.len();
    let left = CompleteStructure::from_fn(k + 1, |u, v| {
        if v < k {
            m.color(dom[u], dom[v])
        } else {
            colors[dom[u]]
        }
    });
    let right_vs: Vec<usize> = dom.iter().chain(others).copied().collect();
    let right = m.induced(&right_vs);
    AmalgamationInstance::new(k, left, right).expect("shared domain")
}

/// Pairs `(B, τ)` with `|B| <= t` and `τ` admissible but not realized.
/// Written independently of the builder's bookkeeping.
pub fn audit_saturation(
    g: &GenericApproximation,
    s: &TriangleSet,
) -> Vec<(Vec<usize>, Vec<Color>)> {
    let m = &g.structure;
    let k = s.palette().len();
    let mut missing = Vec::new();
    for base in bases(m.len(), g.saturation_level) {
        for tau in all_types(k, base.len()) {
            let ok = (0..m.len()).any(|v| realizes(m, v, &base, &tau));
            if !ok && admissible(m, s, &base, &tau) {
                missing.push((base.clone(), tau));
            }
        }
    }
    missing
}

fn check_base(g: &GenericApproximation, base: &[usize]) -> Result<Vec<usize>> {
    let n = g.structure.len();
    let mut sorted = base.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != base.len() {
        return Err(Error::input("base vertices must be distinct"));
    }
    if let Some(&v) = sorted.iter().find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex: v, len: n });
    }
    if base.len() > g.saturation_level {
        return Err(Error::Capability(format!(
            "base of {} vertices exceeds saturation level {}",
            base.len(),
            g.saturation_level
        )));
    }
    Ok(sorted)
}

/// A vertex realizing `tau` over `base` (`tau[i]` is the color to `base[i]`).
pub fn extension_witness(
    g: &GenericApproximation,
    s: &TriangleSet,
    base: &[usize],
    tau: &[Color],
) -> Result<usize> {
    check_base(g, base)?;
    if tau.len() != base.len() {
        return Err(Error::input(
            "type vector length differs from the base size",
        ));
    }
    for &c in tau {
        s.palette().check(c)?;
    }
    let m = &g.structure;
    if !admissible(m, s, base, tau) {
        return Err(Error::input(
            "type is not admissible: its one-point extension has a forbidden triangle",
        ));
    }
    (0..m.len())
        .find(|&v| realizes(m, v, base, tau))
        .ok_or_else(|| Error::Capability("approximation is not saturated for this type".into()))
}

/// A vertex `a` with `r(c1, a) = R1`, `r(c2, a) = R2` and `r(b, a) = R1` on
/// the base.
pub fn distinguishing_witness(
    g: &GenericApproximation,
    s: &TriangleSet,
    lang: &ColorLanguage,
    c1: usize,
    c2: usize,
    base: &[usize],
) -> Result<usize> {
    check_compatible(lang, s)?;
    let m = &g.structure;
    let n = m.len();
    for v in [c1, c2] {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, len: n });
        }
    }
    if c1 == c2 || base.contains(&c1) || base.contains(&c2) {
        return Err(Error::input(
            "c1 and c2 must be distinct and outside the base",
        ));
    }
    if !check_maincond_i(s, lang)? {
        return Err(Error::input(
            "some forbidden triangle contains R1 R1 or R1 R2",
        ));
    }
    let (r1, r2) = (lang.priority()[0], lang.priority()[1]);
    check_base(
        &GenericApproximation {
            saturation_level: g.saturation_level.saturating_sub(2),
            ..g.clone()
        },
        base,
    )?;
    if base
        .iter()
        .any(|&b| m.color(c1, b) != r1 || m.color(c2, b) != r1)
    {
        return Err(Error::input(
            "c1 and c2 must be R1-related to every base vertex",
        ));
    }
    let mut full: Vec<usize> = base.to_vec();
    full.push(c1);
    full.push(c2);
    let mut tau = vec![r1; base.len()];
    tau.push(r1);
    tau.push(r2);
    extension_witness(g, s, &full, &tau)
}

/// Structure file with a leading metadata comment.
pub fn write_approximation(g: &GenericApproximation, palette: &Palette, entry: &str) -> String {
    format!(
        "# entry={entry} t={} seed={}\n{}",
        g.saturation_level,
        g.seed,
        write_structure(&g.structure, palette)
    )
}
