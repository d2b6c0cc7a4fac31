//! The 28 forbidden-triangle systems with semi-free amalgamation, and their
//! expected classification.
//!
//! The data lives in `catalogue.txt`: stanzas of an `entry:` line, an
//! `expect:` line and a constraint file whose `solutions:`/`order:` lines
//! give the expected solution set and priority order.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::color::{parse_order, ColorLanguage, ColorSet};
use crate::conditions::{check_condition1, check_maincond_i, condition2_params, Condition2Params};
use crate::error::{Error, Result};
use crate::format::ConstraintFile;
use crate::independence::{check_deletion, DeletionVariant};
use crate::search::{check_closure, find_solution_sets, ClosureVerdict, SolutionSetReport};
use crate::triangle::TriangleSet;

const CATALOGUE: &str = include_str!("catalogue.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Condition1,
    Condition2,
    Special26,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Condition1 => "condition1",
            Classification::Condition2 => "condition2",
            Classification::Special26 => "special26",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogueEntry {
    pub id: String,
    /// Expected solution set and order.
    pub language: ColorLanguage,
    pub triangles: TriangleSet,
    pub expected: Classification,
    /// `(L*, L^)` for two-color certificate entries.
    pub expected_params: Option<Condition2Params>,
}

/// Every entry, in catalogue order.
pub fn load_catalogue() -> Vec<CatalogueEntry> {
    parse_catalogue(CATALOGUE).expect("embedded catalogue parses")
}

pub fn catalogue_text() -> &'static str {
    CATALOGUE
}

/// Hex SHA-256 of the embedded catalogue.
pub fn catalogue_checksum() -> String {
    Sha256::digest(CATALOGUE.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn find_entry<'a>(entries: &'a [CatalogueEntry], id: &str) -> Option<&'a CatalogueEntry> {
    entries.iter().find(|e| e.id == id)
}

pub fn parse_catalogue(text: &str) -> Result<Vec<CatalogueEntry>> {
    let lines: Vec<&str> = text.lines().collect();
    let starts: Vec<usize> = (0..lines.len())
        .filter(|&i| lines[i].trim_start().starts_with("entry:"))
        .collect();
    if let Some(i) = (0..starts.first().copied().unwrap_or(lines.len())).find(|&i| {
        let l = lines[i].trim();
        !l.is_empty() && !l.starts_with('#')
    }) {
        return Err(Error::parse(
            i + 1,
            "content before the first `entry:` line",
        ));
    }
    let mut entries: Vec<CatalogueEntry> = Vec::new();
    for (n, &start) in starts.iter().enumerate() {
        let end = starts.get(n + 1).copied().unwrap_or(lines.len());
        let entry = parse_stanza(&lines[start..end], start)?;
        if entries.iter().any(|e| e.id == entry.id) {
            return Err(Error::parse(
                start + 1,
                format!("duplicate entry {}", entry.id),
            ));
        }
        entries.push(entry);
    }
    Ok(entries)
}

fn parse_stanza(lines: &[&str], offset: usize) -> Result<CatalogueEntry> {
    let id = lines[0].trim()["entry:".len()..].trim().to_string();
    if id.is_empty() {
        return Err(Error::parse(offset + 1, "empty entry id"));
    }
    let expect_at = (1..lines.len())
        .find(|&i| {
            let l = lines[i].trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .ok_or_else(|| Error::parse(offset + 1, "missing `expect:` line"))?;
    let expect = lines[expect_at]
        .trim()
        .strip_prefix("expect:")
        .ok_or_else(|| Error::parse(offset + expect_at + 1, "expected `expect: ...`"))?
        .trim();

    let eln = offset + expect_at + 1;
    let mut words = expect.split_whitespace();
    let kind = words.next();
    let (mut star, mut hat) = (None, None);
    if kind == Some("condition2") {
        for w in words.by_ref() {
            match w.split_once('=') {
                Some(("star", v)) => star = Some(v),
                Some(("hat", v)) => hat = Some(v),
                _ => return Err(Error::parse(eln, format!("unexpected {w:?}"))),
            }
        }
    }
    if words.next().is_some() {
        return Err(Error::parse(eln, "trailing text after classification"));
    }
    let expected = match kind {
        Some("condition1") => Classification::Condition1,
        Some("condition2") => Classification::Condition2,
        Some("special26") => Classification::Special26,
        _ => {
            return Err(Error::parse(
                eln,
                format!("unknown classification {expect:?}"),
            ))
        }
    };

    // keep line numbers by blanking what was already consumed
    let body: String = lines
        .iter()
        .enumerate()
        .map(|(i, l)| if i <= expect_at { "" } else { l })
        .collect::<Vec<_>>()
        .join("\n");
    let file = ConstraintFile::parse(&body).map_err(|e| match e {
        Error::Parse { line, message } => Error::parse(offset + line, message),
        other => other,
    })?;
    let language = file.language.ok_or_else(|| {
        Error::parse(
            offset + 1,
            format!("entry {id} has no `solutions:`/`order:`"),
        )
    })?;
    let palette = file.triangles.palette().clone();

    let expected_params = match expected {
        Classification::Condition2 => {
            let (star, hat) = star
                .zip(hat)
                .ok_or_else(|| Error::parse(eln, "condition2 needs `star=` and `hat=`"))?;
            Some(
                Condition2Params::parse(&palette, star, hat)
                    .map_err(|e| Error::parse(eln, e.to_string()))?,
            )
        }
        _ => None,
    };
    Ok(CatalogueEntry {
        id,
        language,
        triangles: file.triangles,
        expected,
        expected_params,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Base-size bound of the closure and solution-set searches.
    pub bound: usize,
    /// Ambient size of the deletion sweeps; `0` skips them.
    pub deletion_size: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            bound: 3,
            deletion_size: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionOutcome {
    pub max_size: usize,
    pub one_sided_violations: u64,
    pub two_sided_violations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryReport {
    pub id: String,
    pub expected: Classification,
    pub expected_params: Option<Condition2Params>,
    /// The order actually classified (the catalogue one unless overridden).
    pub language: ColorLanguage,
    pub computed: Option<Classification>,
    pub condition1: bool,
    pub condition2: Vec<Condition2Params>,
    /// No two-color solution set passes either certificate, in any order.
    pub no_two_color_certificate: bool,
    pub maincond_i: Option<bool>,
    pub closure: ClosureVerdict,
    pub solutions: SolutionSetReport,
    pub deletion: Option<DeletionOutcome>,
    /// Whether closure holds under both orders of a two-color solution set.
    pub order_independent: Option<bool>,
    pub matches: bool,
    pub mismatch: Vec<String>,
}

/// Classifies `e`, using `order` in place of the catalogue order when given.
pub fn classify_entry(
    e: &CatalogueEntry,
    opts: &ClassifyOptions,
    order: Option<&str>,
) -> Result<EntryReport> {
    let s = &e.triangles;
    let palette = s.palette();
    let language = match order {
        Some(o) => ColorLanguage::new(palette.clone(), parse_order(palette, o)?)?,
        None => e.language.clone(),
    };
    let condition1 = check_condition1(s, &language);
    let condition2 = condition2_params(s, &language);
    let maincond_i = (language.priority().len() >= 2)
        .then(|| check_maincond_i(s, &language))
        .transpose()?;
    let closure = check_closure(s, &language, opts.bound)?;
    let solutions = find_solution_sets(s, opts.bound)?;
    let no_two_color_certificate = no_two_color_certificate(s)?;

    let computed = if condition1 {
        Some(Classification::Condition1)
    } else if !condition2.is_empty() {
        Some(Classification::Condition2)
    } else if language.priority().len() == 3 && no_two_color_certificate && closure.status.passes()
    {
        Some(Classification::Special26)
    } else {
        None
    };

    let order_independent = (language.priority().len() == 2)
        .then(|| -> Result<bool> {
            let mut rev = language.priority().to_vec();
            rev.reverse();
            let other = ColorLanguage::new(palette.clone(), rev)?;
            Ok(closure.status.passes() && check_closure(s, &other, opts.bound)?.status.passes())
        })
        .transpose()?;

    let deletion = if opts.deletion_size >= 3 {
        let one = check_deletion(s, &language, DeletionVariant::OneSided, opts.deletion_size)?;
        let two = check_deletion(s, &language, DeletionVariant::TwoSided, opts.deletion_size)?;
        Some(DeletionOutcome {
            max_size: opts.deletion_size,
            one_sided_violations: one.violation_count,
            two_sided_violations: two.violation_count,
        })
    } else {
        None
    };

    let mut mismatch = Vec::new();
    if computed != Some(e.expected) {
        mismatch.push(format!(
            "computed {}, expected {}",
            computed.map_or("no classification", Classification::name),
            e.expected.name()
        ));
    }
    if let Some(p) = e.expected_params {
        if !condition2.contains(&p) {
            let v = p.describe(palette);
            mismatch.push(format!(
                "condition 2 fails for L*={{{}}}, L^={{{}}}",
                v.l_star, v.l_hat
            ));
        }
    }
    if language != e.language {
        mismatch.push(format!(
            "order {} differs from the expected {}",
            language.order_compact(),
            e.language.order_compact()
        ));
    }
    if let Some(w) = &closure.witness {
        mismatch.push(format!(
            "closure counterexample on a base of {} vertices",
            w.instance.base_len()
        ));
    }
    let expected_set = e.language.solutions();
    match solutions.minimal.iter().find(|m| m.colors == expected_set) {
        None => mismatch.push(format!(
            "{{{}}} is not a minimal solution set",
            palette.set_word(expected_set)
        )),
        Some(m)
            if !m
                .orders
                .iter()
                .any(|o| o.as_slice() == e.language.priority()) =>
        {
            mismatch.push(format!(
                "order {} is not admissible",
                e.language.order_compact()
            ))
        }
        Some(_) => {}
    }
    if maincond_i == Some(false) && e.expected != Classification::Special26 {
        mismatch.push("part (i) of the main condition fails".into());
    }
    if e.expected == Classification::Special26 {
        if solutions.forced_set() != expected_set {
            mismatch.push(format!(
                "forced colors {{{}}}, expected {{{}}}",
                palette.set_word(solutions.forced_set()),
                palette.set_word(expected_set)
            ));
        }
        if solutions.minimal.len() != 1 {
            mismatch.push(format!(
                "{} minimal solution sets, expected one",
                solutions.minimal.len()
            ));
        }
    }
    if let Some(d) = &deletion {
        let (one_ok, two_ok) = match e.expected {
            Classification::Special26 => (d.one_sided_violations > 0, d.two_sided_violations == 0),
            _ => (d.one_sided_violations == 0, true),
        };
        if !one_ok {
            mismatch.push(format!(
                "one-sided deletion: {} violations",
                d.one_sided_violations
            ));
        }
        if !two_ok {
            mismatch.push(format!(
                "two-sided deletion: {} violations",
                d.two_sided_violations
            ));
        }
    }

    Ok(EntryReport {
        id: e.id.clone(),
        expected: e.expected,
        expected_params: e.expected_params,
        language,
        computed,
        condition1,
        condition2,
        no_two_color_certificate,
        maincond_i,
        closure,
        solutions,
        deletion,
        order_independent,
        matches: mismatch.is_empty(),
        mismatch,
    })
}

/// True when neither certificate holds for any ordered pair of colors.
fn no_two_color_certificate(s: &TriangleSet) -> Result<bool> {
    let palette = s.palette();
    for a in palette.colors() {
        for b in palette.colors() {
            if a == b || ColorSet::from_colors([a, b]) == palette.all() {
                continue;
            }
            let lang = ColorLanguage::new(palette.clone(), vec![a, b])?;
            if check_condition1(s, &lang) || !condition2_params(s, &lang).is_empty() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableSummary {
    pub options: ClassifyOptions,
    pub checksum: String,
    pub entries: Vec<EntryReport>,
}

impl TableSummary {
    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.matches).count()
    }

    /// Vacuously true for an empty selection.
    pub fn pass(&self) -> bool {
        self.passed() == self.entries.len()
    }
}

/// Classifies `entries` in parallel; reports keep the input order.
/// `overrides` maps entry ids to priority orders.
pub fn verify_table(
    entries: &[CatalogueEntry],
    opts: &ClassifyOptions,
    overrides: &BTreeMap<String, String>,
) -> Result<TableSummary> {
    if let Some(id) = overrides
        .keys()
        .find(|id| find_entry(entries, id).is_none())
    {
        return Err(Error::input(format!(
            "order override for unknown entry {id}"
        )));
    }
    let reports: Result<Vec<EntryReport>> = entries
        .par_iter()
        .map(|e| classify_entry(e, opts, overrides.get(&e.id).map(String::as_str)))
        .collect();
    Ok(TableSummary {
        options: *opts,
        checksum: catalogue_checksum(),
        entries: reports?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_of_the_catalogue() {
        let c = load_catalogue();
        assert_eq!(c.len(), 28);
        assert_eq!(
            c.iter()
                .filter(|e| e.triangles.palette().len() == 3)
                .count(),
            1
        );
        assert_eq!(
            c.iter()
                .filter(|e| e.triangles.palette().len() == 4)
                .count(),
            27
        );
        let e = find_entry(&c, "#26").unwrap();
        assert_eq!(
            e.triangles.words(),
            ["RRX", "RXX", "RYY", "GYX", "GXX", "YYX", "XXX"]
        );
        assert_eq!(e.expected, Classification::Special26);
        assert_eq!(e.language.order_compact(), "G>R>Y");
        let e = find_entry(&c, "3col#1").unwrap();
        assert_eq!(e.triangles.palette().to_string(), "R G X");
        assert_eq!(e.triangles.words(), ["RXX", "GGX", "XXX"]);
        let e = find_entry(&c, "#19").unwrap();
        let p = e.expected_params.unwrap().describe(e.triangles.palette());
        assert_eq!((p.l_star.as_str(), p.l_hat.as_str()), ("X", "Y"));
    }

    #[test]
    fn classification_ranges() {
        let c = load_catalogue();
        for e in &c[1..] {
            let n: usize = e.id[1..].parse().unwrap();
            let want = match n {
                1..=10 | 21..=25 => Classification::Condition1,
                26 => Classification::Special26,
                _ => Classification::Condition2,
            };
            assert_eq!(e.expected, want, "{}", e.id);
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_catalogue(
            "entry: a\nexpect: condition1\ncolors: R G X\nsolutions: R\norder: R\nRQX\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 6, .. }), "{err:?}");
        let err = parse_catalogue("entry: a\nexpect: nonsense\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        let err = parse_catalogue("colors: R G\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn checksum_is_pinned() {
        assert_eq!(
            catalogue_checksum(),
            "b27056390a7c6ec2798e7a6fabaf8d81aa6d53014dc3b3f98cd772da7326089f"
        );
    }

    #[test]
    fn wrong_order_for_eleven_fails_with_ggx() {
        let c = load_catalogue();
        let opts = ClassifyOptions {
            bound: 3,
            deletion_size: 0,
        };
        let overrides = BTreeMap::from([("#11".to_string(), "G>R".to_string())]);
        let sel: Vec<CatalogueEntry> = c
            .iter()
            .filter(|e| e.id == "#11" || e.id == "#5")
            .cloned()
            .collect();
        let s = verify_table(&sel, &opts, &overrides).unwrap();
        assert_eq!(s.passed(), 1);
        let r = &s.entries[1];
        assert_eq!(r.id, "#11");
        assert!(!r.matches);
        let w = r.closure.witness.as_ref().unwrap();
        let v = &w.completion.violations[0];
        assert_eq!(v.triangle.word(r.language.palette()), "GGX");
    }

    #[test]
    fn empty_selection_is_a_vacuous_pass() {
        let s = verify_table(&[], &ClassifyOptions::default(), &BTreeMap::new()).unwrap();
        assert!(s.pass());
        assert_eq!(s.entries.len(), 0);
    }
}
