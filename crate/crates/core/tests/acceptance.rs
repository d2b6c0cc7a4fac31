//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines are always shown.

use std::collections::{BTreeMap, HashSet};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semifree::amalgam::{amalgamate, prioritized_color, AmalgamationInstance};
use semifree::catalogue::{
    find_entry, load_catalogue, verify_table, CatalogueEntry, Classification, ClassifyOptions,
};
use semifree::color::{Color, ColorLanguage, ColorSet, Palette};
use semifree::conditions::{check_condition1, condition2_params};
use semifree::format::ConstraintFile;
use semifree::generic::{audit_saturation, build_generic};
use semifree::independence::{check_axiom, check_deletion, Axiom, Caps, DeletionVariant};
use semifree::search::{
    find_solution_sets, forces, forcing_instances, search_counterexample, search_failed_edge,
};
use semifree::structure::{structure_isomorphic, validate_structure, CompleteStructure};
use semifree::triangle::TriangleSet;
use semifree::Error;

type Verdict = Result<String, String>;

fn main() {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 9] = [
        ("table reproduction", table_reproduction),
        ("#26 solution set", solution_set_26),
        ("worked amalgamations", worked_amalgamations),
        ("independence axioms", independence_axioms),
        ("deletion trichotomy", deletion_trichotomy),
        ("certificates agree with search", certificates_vs_search),
        ("generic builder", generic_builder),
        ("oracle equivalence", oracle_equivalence),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({detail}) [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn entry(id: &str) -> CatalogueEntry {
    find_entry(&load_catalogue(), id)
        .expect("catalogue entry")
        .clone()
}

fn col(p: &Palette, ch: char) -> Color {
    p.color(ch).expect("palette color")
}

fn lang(p: &Palette, order: &str) -> ColorLanguage {
    ColorLanguage::with_order(p.clone(), order).expect("order")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semifree"))
}

fn table_reproduction() -> Verdict {
    let out = bin()
        .args(["verify-table", "--bound", "3", "--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let r = &v["result"];
    let failing: Vec<String> = r["entries"]
        .as_array()
        .ok_or("no entries")?
        .iter()
        .filter(|e| e["matches"] != true)
        .map(|e| format!("{}: {}", e["id"], e["mismatch"]))
        .collect();
    ensure(out.status.code() == Some(0), || {
        format!("exit {:?}, {failing:?}", out.status.code())
    })?;
    ensure(r["total"] == 28 && r["passed"] == 28, || {
        format!("{}/{}", r["passed"], r["total"])
    })?;

    // the classification itself, from the library
    let entries = load_catalogue();
    let summary = verify_table(&entries, &ClassifyOptions::default(), &BTreeMap::new())
        .map_err(|e| e.to_string())?;
    for rep in &summary.entries {
        let e = find_entry(&entries, &rep.id).expect("entry");
        ensure(rep.computed == Some(e.expected), || {
            format!("{} computed {:?}", rep.id, rep.computed)
        })?;
        if let Some(p) = e.expected_params {
            ensure(rep.condition2.contains(&p), || {
                format!("{} parameters", rep.id)
            })?;
        }
    }
    let counts = |c: Classification| {
        summary
            .entries
            .iter()
            .filter(|r| r.computed == Some(c))
            .count()
    };
    Ok(format!(
        "28/28 match: {} condition 1, {} condition 2, {} special",
        counts(Classification::Condition1),
        counts(Classification::Condition2),
        counts(Classification::Special26)
    ))
}

/// One-point instance from base edges and the two profiles.
fn one_point(
    p: &Palette,
    base: &[(usize, usize, char)],
    k: usize,
    left: &[char],
    right: &[char],
) -> AmalgamationInstance {
    let side = |prof: &[char]| {
        let mut edges: Vec<(usize, usize, Color)> =
            base.iter().map(|&(i, j, c)| (i, j, col(p, c))).collect();
        edges.extend(prof.iter().enumerate().map(|(i, &c)| (i, k, col(p, c))));
        CompleteStructure::from_edges(k + 1, &edges).expect("structure")
    };
    AmalgamationInstance::new(k, side(left), side(right)).expect("instance")
}

/// Equality of one-point instances up to renaming base points and
/// swapping the two sides.
fn same_one_point(x: &AmalgamationInstance, y: &AmalgamationInstance) -> bool {
    let k = x.base_len();
    if k != y.base_len() || x.left().len() != k + 1 || y.left().len() != k + 1 {
        return false;
    }
    let glue = |i: &AmalgamationInstance, swap: bool| {
        let (l, r) = if swap {
            (i.right(), i.left())
        } else {
            (i.left(), i.right())
        };
        CompleteStructure::from_fn(k + 2, |u, v| match (u < k + 1, v < k + 1) {
            (true, true) => l.color(u, v),
            (true, false) if u < k => r.color(u, k),
            // the cross pair itself: fixed dummy, pinned below
            _ => Color(0),
        })
    };
    let gx = glue(x, false);
    [false, true].into_iter().any(|swap| {
        let gy = glue(y, swap);
        structure_isomorphic(&gx, &gy, &[(k, k), (k + 1, k + 1)]).unwrap_or(false)
    })
}

fn solution_set_26() -> Verdict {
    let e = entry("#26");
    let s = &e.triangles;
    let p = s.palette();
    let rep = find_solution_sets(s, 3).map_err(|e| e.to_string())?;
    let rgy = ColorSet::from_colors([col(p, 'R'), col(p, 'G'), col(p, 'Y')]);
    ensure(
        rep.minimal.len() == 1 && rep.minimal[0].colors == rgy,
        || {
            format!(
                "minimal sets {:?}",
                rep.minimal
                    .iter()
                    .map(|m| p.set_word(m.colors))
                    .collect::<Vec<_>>()
            )
        },
    )?;
    ensure(rep.forced_set() == rgy, || {
        format!("forced {}", p.set_word(rep.forced_set()))
    })?;
    for f in &rep.forced {
        ensure(forces(s, &f.witness, f.color), || {
            format!("witness for {} does not force", p.symbol(f.color))
        })?;
    }

    // the three diagrams: base points b1 = 0, b2 = 1
    let diagrams = [
        (
            'G',
            one_point(p, &[(0, 1, 'R')], 2, &['Y', 'G'], &['Y', 'X']),
        ),
        (
            'R',
            one_point(p, &[(0, 1, 'G')], 2, &['Y', 'R'], &['X', 'R']),
        ),
        ('Y', one_point(p, &[], 1, &['X'], &['X'])),
    ];
    let mut notes = Vec::new();
    for (ch, d) in &diagrams {
        let c = col(p, *ch);
        ensure(forces(s, d, c), || {
            format!("diagram for {ch} does not force it")
        })?;
        let all = forcing_instances(s, c, d.base_len()).map_err(|e| e.to_string())?;
        ensure(all.iter().any(|w| same_one_point(w, d)), || {
            format!("diagram for {ch} not enumerated")
        })?;
        let ours = &rep
            .forced
            .iter()
            .find(|f| f.color == c)
            .ok_or("missing forced color")?
            .witness;
        ensure(ours.base_len() == d.base_len(), || {
            format!("{ch}: base sizes differ")
        })?;
        notes.push(format!(
            "{ch}: least witness {} the diagram",
            if same_one_point(ours, d) {
                "is"
            } else {
                "differs from"
            }
        ));
    }
    Ok(format!(
        "unique minimal set {{RGY}}, forced RGY; {}",
        notes.join(", ")
    ))
}

fn worked_amalgamations() -> Verdict {
    let e = entry("#11");
    let s = &e.triangles;
    let p = s.palette();
    // base b1 = 0, b2 = 1; a and c
    let inst = one_point(p, &[(0, 1, 'R')], 2, &['X', 'R'], &['X', 'G']);
    let r = amalgamate(&inst, &lang(p, "R>G"), s).map_err(|e| e.to_string())?;
    ensure(
        r.cross_color(2, 3) == Some(col(p, 'G')) && r.is_clean(),
        || "cross edge is not G".into(),
    )?;

    // base b = 0; a1 = 1, a2 = 2 on the left; c on the right
    let left = CompleteStructure::from_edges(
        3,
        &[
            (0, 1, col(p, 'R')),
            (0, 2, col(p, 'G')),
            (1, 2, col(p, 'X')),
        ],
    )
    .map_err(|e| e.to_string())?;
    let right =
        CompleteStructure::from_edges(2, &[(0, 1, col(p, 'R'))]).map_err(|e| e.to_string())?;
    let inst = AmalgamationInstance::new(1, left, right).map_err(|e| e.to_string())?;
    let r = amalgamate(&inst, &lang(p, "G>R"), s).map_err(|e| e.to_string())?;
    let words: Vec<(String, [usize; 3])> = r
        .violations
        .iter()
        .map(|v| (v.triangle.word(p), v.vertices))
        .collect();
    ensure(words == [("GGX".to_string(), [1, 2, 3])], || {
        format!("violations {words:?}")
    })?;
    Ok("cross edge G under R>G; GGX at a1 a2 c under G>R".into())
}

fn independence_axioms() -> Verdict {
    let mut parts = Vec::new();
    for (id, order) in [("3col#1", None), ("#11", None), ("#26", Some("G>R>Y"))] {
        let e = entry(id);
        let l = match order {
            Some(o) => lang(e.triangles.palette(), o),
            None => e.language.clone(),
        };
        let mut instances = 0;
        for a in Axiom::ALL {
            let r =
                check_axiom(a, &e.triangles, &l, 6, Caps::default()).map_err(|e| e.to_string())?;
            ensure(r.holds(), || {
                format!("{id} {}: {} violations", a.name(), r.violation_count)
            })?;
            ensure(r.instances_checked > 0, || {
                format!("{id} {}: nothing checked", a.name())
            })?;
            instances += r.instances_checked;
        }
        parts.push(format!("{id} {instances} instances"));
    }
    Ok(format!(
        "0 violations up to 6 vertices: {}",
        parts.join(", ")
    ))
}

fn deletion_trichotomy() -> Verdict {
    let mut checked = 0;
    for e in load_catalogue() {
        if e.expected == Classification::Special26 {
            continue;
        }
        let r = check_deletion(&e.triangles, &e.language, DeletionVariant::OneSided, 6)
            .map_err(|e| e.to_string())?;
        ensure(r.holds(), || {
            format!("{}: {} one-sided violations", e.id, r.violation_count)
        })?;
        checked += 1;
    }

    let e = entry("#26");
    let s = &e.triangles;
    let p = s.palette();
    let l = lang(p, "G>R>Y");
    let one = check_deletion(s, &l, DeletionVariant::OneSided, 6).map_err(|e| e.to_string())?;
    ensure(!one.holds(), || "one-sided deletion holds for #26".into())?;
    // a = 0, c = 1, b = 2, b' = 3
    let diagram = CompleteStructure::from_edges(
        4,
        &[
            (0, 1, col(p, 'R')),
            (0, 2, col(p, 'Y')),
            (1, 2, col(p, 'X')),
            (2, 3, col(p, 'G')),
            (0, 3, col(p, 'R')),
            (1, 3, col(p, 'R')),
        ],
    )
    .map_err(|e| e.to_string())?;
    let matches = |w: &semifree::independence::Witness,
                   target: &CompleteStructure,
                   roles: &[(&str, usize)]| {
        let mut pins = Vec::new();
        for &(name, v) in roles {
            match w.set(name) {
                Some(&[x]) => pins.push((x, v)),
                _ => return false,
            }
        }
        w.structure.len() == target.len()
            && structure_isomorphic(&w.structure, target, &pins).unwrap_or(false)
    };
    let minimal = one.minimal_witness().ok_or("no witness")?;
    let restricted = diagram.induced(&[0, 1, 2]);
    ensure(
        matches(minimal, &restricted, &[("a", 0), ("c", 1), ("b", 2)]),
        || "smallest witness is not the diagram without b'".into(),
    )?;
    let four = one
        .groups
        .iter()
        .find(|g| g.base_size == 1)
        .ok_or("no 4-vertex witnesses")?;
    ensure(
        four.witnesses
            .iter()
            .any(|w| matches(w, &diagram, &[("a", 0), ("c", 1), ("b", 2), ("B", 3)])),
        || "diagram not among the 4-vertex witnesses".into(),
    )?;
    let two = check_deletion(s, &l, DeletionVariant::TwoSided, 6).map_err(|e| e.to_string())?;
    ensure(two.holds(), || {
        format!("two-sided: {} violations", two.violation_count)
    })?;
    let sizes: Vec<String> = one
        .groups
        .iter()
        .map(|g| format!("|B|={}:{}", g.base_size, g.count))
        .collect();
    Ok(format!(
        "one-sided holds for {checked} entries; #26 one-sided fails ({}), diagram among 4-vertex witnesses, \
         smallest witness is the diagram minus b' with B empty; #26 two-sided holds",
        sizes.join(" ")
    ))
}

fn certificates_vs_search() -> Verdict {
    let mut certified = 0;
    for e in load_catalogue() {
        let s = &e.triangles;
        let p = s.palette();
        for a in p.colors() {
            for b in p.colors() {
                if a == b {
                    continue;
                }
                let l = ColorLanguage::new(p.clone(), vec![a, b]).map_err(|e| e.to_string())?;
                let cert = check_condition1(s, &l) || !condition2_params(s, &l).is_empty();
                // the certificates presuppose that a solution color always exists
                if !cert || search_failed_edge(s, &l, 2).is_some() {
                    continue;
                }
                certified += 1;
                ensure(search_counterexample(s, &l, 3).is_none(), || {
                    format!(
                        "{} {}: certified but search found a counterexample",
                        e.id,
                        l.order_compact()
                    )
                })?;
            }
        }
        let own = check_condition1(s, &e.language) || !condition2_params(s, &e.language).is_empty();
        if e.expected != Classification::Special26 {
            ensure(own, || format!("{}: catalogue order not certified", e.id))?;
        }
    }
    Ok(format!(
        "{certified} certified (entry, order) pairs, no counterexample at bound 3"
    ))
}

fn generic_builder() -> Verdict {
    let e = entry("#11");
    let s = &e.triangles;
    let g = build_generic(s, &e.language, 2, 0).map_err(|e| e.to_string())?;
    let missing = audit_saturation(&g, s);
    ensure(missing.is_empty(), || {
        format!("{} unrealized types", missing.len())
    })?;
    let v = validate_structure(&g.structure, s).map_err(|e| e.to_string())?;
    ensure(v.is_empty(), || format!("{} forbidden triangles", v.len()))?;

    let e26 = entry("#26");
    let p = e26.triangles.palette();
    let err = build_generic(&e26.triangles, &lang(p, "R>G"), 2, 0)
        .err()
        .ok_or("#26 with {R,G} was built")?;
    let Error::Construction(f) = err else {
        return Err(format!("unexpected error {err}"));
    };
    let x = col(p, 'X');
    let k = f.instance.base_len();
    ensure(k == 1 && f.instance.profile(1, 1) == vec![(x, x)], || {
        format!("witness base {k}, not XX")
    })?;
    ensure(!f.completion.failed_edges.is_empty(), || {
        "witness has no failed edge".into()
    })?;
    Ok(format!(
        "#11 t=2: {} vertices, saturated and valid; #26 {{R,G}}: XX-base failure",
        g.structure.len()
    ))
}

/// Sorted triples of color indices.
fn triangle_table(s: &TriangleSet) -> HashSet<[u8; 3]> {
    let p = s.palette();
    s.words()
        .iter()
        .map(|w| {
            let mut t = [0u8; 3];
            for (slot, ch) in t.iter_mut().zip(w.chars()) {
                *slot = p.symbols().iter().position(|&x| x == ch).expect("symbol") as u8;
            }
            t.sort_unstable();
            t
        })
        .collect()
}

fn naive_forbidden(table: &HashSet<[u8; 3]>, a: u8, b: u8, c: u8) -> bool {
    let mut t = [a, b, c];
    t.sort_unstable();
    table.contains(&t)
}

fn oracle_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let catalogue = load_catalogue();
    let mut profiles = 0;
    for e in &catalogue {
        let s = &e.triangles;
        let k = s.palette().len() as u8;
        let table = triangle_table(s);
        let mut langs = vec![e.language.clone()];
        if e.language.priority().len() == 2 {
            let mut rev = e.language.priority().to_vec();
            rev.reverse();
            langs.push(ColorLanguage::new(s.palette().clone(), rev).expect("order"));
        }
        for i in 0..10_000 {
            let l = &langs[i % langs.len()];
            let len = rng.gen_range(0..=6);
            let prof: Vec<(Color, Color)> = (0..len)
                .map(|_| (Color(rng.gen_range(0..k)), Color(rng.gen_range(0..k))))
                .collect();
            let naive = l.priority().iter().copied().find(|&c| {
                prof.iter()
                    .all(|&(x, y)| !naive_forbidden(&table, x.0, y.0, c.0))
            });
            let fast = prioritized_color(prof.iter().copied(), l, s);
            ensure(naive == fast, || {
                format!("{}: profile {prof:?}: {fast:?} vs {naive:?}", e.id)
            })?;
            profiles += 1;
        }
    }

    let mut structures = 0;
    for i in 0..1000 {
        let e = &catalogue[i % catalogue.len()];
        let s = &e.triangles;
        let k = s.palette().len() as u8;
        let table = triangle_table(s);
        let n = rng.gen_range(0..=8);
        // sparse colorings in a few colors make valid structures common
        let colors = rng.gen_range(1..=k);
        let m = CompleteStructure::from_fn(n, |_, _| Color(rng.gen_range(0..colors)));
        let mut naive = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if naive_forbidden(&table, m.color(a, b).0, m.color(a, c).0, m.color(b, c).0) {
                        naive.push([a, b, c]);
                    }
                }
            }
        }
        let fast: Vec<[usize; 3]> = validate_structure(&m, s)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|v| v.vertices)
            .collect();
        ensure(naive == fast, || {
            format!("{}: structure on {n} vertices disagrees", e.id)
        })?;
        structures += 1;
    }
    Ok(format!(
        "{profiles} profiles and {structures} structures, 0 disagreements"
    ))
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cons = dir.path().join("c11.constraints");
    let e = entry("#11");
    let file = ConstraintFile {
        language: Some(e.language.clone()),
        triangles: e.triangles.clone(),
    };
    std::fs::write(&cons, file.write()).map_err(|e| e.to_string())?;
    let c = cons.to_str().ok_or("path")?;
    let runs: Vec<Vec<&str>> = vec![
        vec!["verify-table", "--bound", "3"],
        vec!["check-closure", "--entry", "#11", "--order", "G>R"],
        vec!["find-solutions", "--entry", "#26"],
        vec!["check-sir", "--constraints", c, "--max-size", "4"],
        vec![
            "check-deletion",
            "--entry",
            "#26",
            "--order",
            "G>R>Y",
            "--max-size",
            "5",
        ],
        vec!["build-generic", "--entry", "#11", "--t", "2", "--seed", "5"],
        vec![
            "build-generic",
            "--entry",
            "#26",
            "--order",
            "R>G",
            "--t",
            "2",
        ],
        vec!["classify", "--entry", "#26"],
        vec!["catalogue", "export"],
    ];
    for args in &runs {
        let once = |_: u8| {
            bin()
                .args(args)
                .args(["--format", "json"])
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (once(0)?, once(1)?);
        ensure(a.status.code() == b.status.code(), || {
            format!("{args:?}: exit codes differ")
        })?;
        ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || {
            format!("{args:?}: outputs differ")
        })?;
        let v: serde_json::Value =
            serde_json::from_slice(&a.stdout).map_err(|e| format!("{args:?}: {e}"))?;
        ensure(v["schema"] == 1, || format!("{args:?}: schema field"))?;
    }
    Ok(format!(
        "{} commands byte-identical across two runs",
        runs.len()
    ))
}
