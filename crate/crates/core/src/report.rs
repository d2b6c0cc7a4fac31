//! Deterministic JSON views of every report type.
//!
//! Objects are `serde_json` maps, which keep keys sorted, and no view
//! contains timings or addresses, so equal inputs give byte-identical output.

use serde_json::{json, Value};

use crate::amalgam::{AmalgamationInstance, CompletionResult};
use crate::catalogue::{EntryReport, TableSummary};
use crate::color::{Color, ColorLanguage, ColorSet, Palette};
use crate::conditions::Condition2Params;
use crate::generic::{audit_saturation, ConstructionFailure, GenericApproximation, Method};
use crate::independence::{AxiomReport, DeletionReport, Witness};
use crate::search::{ClosureVerdict, Counterexample, SolutionSetReport};
use crate::structure::{CompleteStructure, Violation};
use crate::triangle::TriangleSet;

pub const SCHEMA: u32 = 1;

/// `{"schema": 1, "command": .., "result": ..}`.
pub fn envelope(command: &str, result: Value) -> Value {
    json!({ "schema": SCHEMA, "command": command, "result": result })
}

/// Pretty-printed with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn sym(p: &Palette, c: Color) -> String {
    p.symbol(c).to_string()
}

fn set(p: &Palette, s: ColorSet) -> Vec<String> {
    s.iter().map(|c| sym(p, c)).collect()
}

fn order(p: &Palette, o: &[Color]) -> String {
    o.iter().map(|&c| sym(p, c)).collect::<Vec<_>>().join(">")
}

pub fn language(l: &ColorLanguage) -> Value {
    json!({
        "palette": l.palette().symbols().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "order": l.order_compact(),
    })
}

pub fn triangles(s: &TriangleSet) -> Value {
    json!(s.words())
}

pub fn structure(m: &CompleteStructure, p: &Palette) -> Value {
    let edges: Vec<Value> = m
        .edges()
        .map(|(i, j, c)| json!([i, j, sym(p, c)]))
        .collect();
    json!({ "vertices": m.len(), "edges": edges })
}

pub fn violations(v: &[Violation], p: &Palette) -> Value {
    v.iter()
        .map(|x| json!({ "vertices": x.vertices, "triangle": x.triangle.word(p) }))
        .collect()
}

pub fn instance(inst: &AmalgamationInstance, p: &Palette) -> Value {
    json!({
        "base": inst.base_len(),
        "left": structure(inst.left(), p),
        "right": structure(inst.right(), p),
    })
}

pub fn completion(r: &CompletionResult, p: &Palette) -> Value {
    json!({
        "clean": r.is_clean(),
        "base": r.base_len,
        "left_new": r.left_new,
        "right_new": r.right_new,
        "cross_edges": r.cross_colors.iter().map(|e| json!([e.left, e.right, sym(p, e.color)])).collect::<Vec<_>>(),
        "violations": violations(&r.violations, p),
        "failed_edges": r.failed_edges,
        "completed": structure(&r.completed, p),
    })
}

pub fn counterexample(w: &Counterexample, p: &Palette) -> Value {
    json!({ "instance": instance(&w.instance, p), "completion": completion(&w.completion, p) })
}

pub fn params(x: &Condition2Params, p: &Palette) -> Value {
    json!({ "l_star": set(p, x.l_star), "l_hat": set(p, x.l_hat) })
}

pub fn closure(v: &ClosureVerdict, p: &Palette) -> Value {
    json!({
        "status": v.status,
        "passes": v.status.passes(),
        "bound": v.bound_used,
        "conclusive": v.conclusive,
        "params": v.params.as_ref().map(|x| params(x, p)),
        "witness": v.witness.as_ref().map(|w| counterexample(w, p)),
    })
}

pub fn solution_sets(r: &SolutionSetReport, p: &Palette) -> Value {
    json!({
        "bound": r.bound,
        "forced": r.forced.iter().map(|f| json!({
            "color": sym(p, f.color),
            "witness": instance(&f.witness, p),
        })).collect::<Vec<_>>(),
        "minimal": r.minimal.iter().map(|m| json!({
            "colors": set(p, m.colors),
            "orders": m.orders.iter().map(|o| order(p, o)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn witness(w: &Witness, p: &Palette) -> Value {
    let sets: serde_json::Map<String, Value> = w
        .sets
        .iter()
        .map(|(n, v)| (n.to_string(), json!(v)))
        .collect();
    json!({
        "structure": structure(&w.structure, p),
        "sets": sets,
        "type": w.type_colors.as_ref().map(|t| t.iter().map(|&c| sym(p, c)).collect::<Vec<_>>()),
    })
}

pub fn axiom(r: &AxiomReport, p: &Palette) -> Value {
    json!({
        "axiom": r.axiom,
        "holds": r.holds(),
        "max_size": r.max_size,
        "caps": r.caps,
        "structures_checked": r.structures_checked,
        "instances_checked": r.instances_checked,
        "violation_count": r.violation_count,
        "violations": r.violations.iter().map(|w| witness(w, p)).collect::<Vec<_>>(),
    })
}

pub fn deletion(r: &DeletionReport, p: &Palette) -> Value {
    json!({
        "variant": r.variant,
        "holds": r.holds(),
        "max_size": r.max_size,
        "structures_checked": r.structures_checked,
        "instances_checked": r.instances_checked,
        "violation_count": r.violation_count,
        "groups": r.groups.iter().map(|g| json!({
            "base_size": g.base_size,
            "count": g.count,
            "witnesses": g.witnesses.iter().map(|w| witness(w, p)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn approximation(g: &GenericApproximation, s: &TriangleSet) -> Value {
    let p = s.palette();
    let method = match g.method {
        Method::Group { dim } => json!({ "kind": "group", "dim": dim }),
        Method::Extension => json!({ "kind": "extension" }),
    };
    json!({
        "saturation_level": g.saturation_level,
        "seed": g.seed,
        "method": method,
        "scans": g.scans,
        "vertices": g.structure.len(),
        "unrealized_types": audit_saturation(g, s).len(),
        "violations": violations(&crate::structure::validate_structure(&g.structure, s).unwrap_or_default(), p),
        "log": g.log.iter().map(|e| json!({
            "scan": e.scan,
            "vertex": e.vertex,
            "base": e.base,
            "type": e.tau.iter().map(|&c| sym(p, c)).collect::<Vec<_>>(),
            "settled": e.settled,
        })).collect::<Vec<_>>(),
        "structure": structure(&g.structure, p),
    })
}

pub fn construction_failure(f: &ConstructionFailure, p: &Palette) -> Value {
    json!({
        "message": f.message,
        "instance": instance(&f.instance, p),
        "completion": completion(&f.completion, p),
        "blocking_base": f.blocking_base,
    })
}

pub fn entry(r: &EntryReport) -> Value {
    let p = r.language.palette();
    json!({
        "id": r.id,
        "matches": r.matches,
        "mismatch": r.mismatch,
        "expected": r.expected,
        "expected_params": r.expected_params.as_ref().map(|x| params(x, p)),
        "computed": r.computed,
        "language": language(&r.language),
        "condition1": r.condition1,
        "condition2": r.condition2.iter().map(|x| params(x, p)).collect::<Vec<_>>(),
        "no_two_color_certificate": r.no_two_color_certificate,
        "maincond_i": r.maincond_i,
        "order_independent": r.order_independent,
        "closure": closure(&r.closure, p),
        "solution_sets": solution_sets(&r.solutions, p),
        "deletion": r.deletion.as_ref().map(|d| json!({
            "max_size": d.max_size,
            "one_sided_violations": d.one_sided_violations,
            "two_sided_violations": d.two_sided_violations,
        })),
    })
}

pub fn table(t: &TableSummary) -> Value {
    json!({
        "bound": t.options.bound,
        "deletion_size": t.options.deletion_size,
        "catalogue_sha256": t.checksum,
        "total": t.entries.len(),
        "passed": t.passed(),
        "pass": t.pass(),
        "entries": t.entries.iter().map(entry).collect::<Vec<_>>(),
    })
}
