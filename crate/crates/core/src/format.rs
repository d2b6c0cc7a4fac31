//! Text formats for constraint systems, structures and amalgamation instances.
//!
//! Constraint file:
//!
//! ```text
//! colors: R G X Y
//! solutions: R G
//! order: R > G
//! RXX
//! GGX
//! ```
//!
//! The `solutions:`/`order:` pair may be omitted when no priority is needed.
//! Structure file: first line the vertex count `n`, then `n(n-1)/2` lines
//! `i j COLOR` with `i < j`. Blank lines and lines starting with `#` are
//! ignored by both parsers. The writers emit exactly the canonical layout, so
//! `write(parse(write(x))) == write(x)`.

use crate::amalgam::AmalgamationInstance;
use crate::color::{parse_order, ColorLanguage, Palette};
use crate::error::{Error, Result};
use crate::structure::CompleteStructure;
use crate::triangle::{Triangle, TriangleSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintFile {
    pub language: Option<ColorLanguage>,
    pub triangles: TriangleSet,
}

impl ConstraintFile {
    pub fn palette(&self) -> &Palette {
        self.triangles.palette()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);

        let (ln, first) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `colors:` line"))?;
        let colors =
            header(first, "colors").ok_or_else(|| Error::parse(ln, "expected `colors: ...`"))?;
        let palette = Palette::parse(colors).map_err(|e| Error::parse(ln, e.to_string()))?;

        let mut language = None;
        let mut rest: Vec<(usize, &str)> = Vec::new();
        let mut pending = lines.next();
        if let Some((ln, line)) = pending {
            if let Some(sol) = header(line, "solutions") {
                let set = palette
                    .parse_set(sol)
                    .map_err(|e| Error::parse(ln, e.to_string()))?;
                let (oln, oline) = lines
                    .next()
                    .ok_or_else(|| Error::parse(ln + 1, "expected `order:` after `solutions:`"))?;
                let order = header(oline, "order")
                    .ok_or_else(|| Error::parse(oln, "expected `order: ...`"))?;
                let priority =
                    parse_order(&palette, order).map_err(|e| Error::parse(oln, e.to_string()))?;
                let lang = ColorLanguage::new(palette.clone(), priority)
                    .map_err(|e| Error::parse(oln, e.to_string()))?;
                if lang.solutions() != set {
                    return Err(Error::parse(
                        oln,
                        "order must rank exactly the colors listed under `solutions:`",
                    ));
                }
                language = Some(lang);
                pending = None;
            }
        }
        rest.extend(pending);
        rest.extend(lines);

        let mut triangles = Vec::new();
        for (ln, line) in rest {
            if line.contains(':') {
                return Err(Error::parse(ln, format!("unexpected header line {line:?}")));
            }
            for word in line.split_whitespace() {
                triangles.push(
                    Triangle::parse(&palette, word).map_err(|e| Error::parse(ln, e.to_string()))?,
                );
            }
        }
        let triangles =
            TriangleSet::new(palette, triangles).map_err(|e| Error::parse(1, e.to_string()))?;
        Ok(ConstraintFile {
            language,
            triangles,
        })
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("colors: {}\n", self.palette()));
        if let Some(lang) = &self.language {
            let sol: Vec<String> = lang
                .solutions()
                .iter()
                .map(|c| self.palette().symbol(c).to_string())
                .collect();
            out.push_str(&format!("solutions: {}\n", sol.join(" ")));
            out.push_str(&format!("order: {}\n", lang.order_string()));
        }
        for w in self.triangles.words() {
            out.push_str(&w);
            out.push('\n');
        }
        out
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn header<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let (k, v) = line.split_once(':')?;
    (k.trim() == key).then_some(v.trim())
}

/// A file without content lines is the empty structure.
pub fn parse_structure(text: &str, palette: &Palette) -> Result<CompleteStructure> {
    let mut lines = content_lines(text).peekable();
    if lines.peek().is_none() {
        return Ok(CompleteStructure::empty());
    }
    let m = parse_structure_lines(&mut lines, palette, None)?;
    if let Some((ln, _)) = lines.next() {
        return Err(Error::parse(ln, "trailing content after the edge lines"));
    }
    Ok(m)
}

fn parse_structure_lines<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    palette: &Palette,
    stop_at: Option<&str>,
) -> Result<CompleteStructure> {
    let (ln, first) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing vertex count"))?;
    let n: usize = first
        .parse()
        .map_err(|_| Error::parse(ln, format!("expected a vertex count, got {first:?}")))?;
    let expected = n * n.saturating_sub(1) / 2;
    let mut edges = Vec::with_capacity(expected);
    let mut last_ln = ln;
    for _ in 0..expected {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| Error::parse(last_ln + 1, format!("expected {expected} edge lines")))?;
        last_ln = ln;
        if let Some(stop) = stop_at {
            if header(line, stop).is_some() {
                return Err(Error::parse(ln, format!("expected {expected} edge lines")));
            }
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::parse(ln, "expected `i j COLOR`"));
        }
        let i: usize = parts[0]
            .parse()
            .map_err(|_| Error::parse(ln, "bad vertex index"))?;
        let j: usize = parts[1]
            .parse()
            .map_err(|_| Error::parse(ln, "bad vertex index"))?;
        if i >= j {
            return Err(Error::parse(ln, "edge lines must have i < j"));
        }
        let mut sym = parts[2].chars();
        let color = match (sym.next(), sym.next()) {
            (Some(ch), None) => palette
                .color(ch)
                .map_err(|e| Error::parse(ln, e.to_string()))?,
            _ => return Err(Error::parse(ln, format!("bad color {:?}", parts[2]))),
        };
        edges.push((i, j, color));
    }
    CompleteStructure::from_edges(n, &edges).map_err(|e| Error::parse(last_ln, e.to_string()))
}

pub fn write_structure(m: &CompleteStructure, palette: &Palette) -> String {
    let mut out = format!("{}\n", m.len());
    for (i, j, c) in m.edges() {
        out.push_str(&format!("{i} {j} {}\n", palette.symbol(c)));
    }
    out
}

/// Amalgamation instance file:
///
/// ```text
/// base: 1
/// left:
/// <structure on A, base vertices first>
/// right:
/// <structure on C, base vertices first>
/// ```
pub fn parse_instance(text: &str, palette: &Palette) -> Result<AmalgamationInstance> {
    let mut lines = content_lines(text);
    let (ln, line) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `base:` line"))?;
    let k: usize = header(line, "base")
        .ok_or_else(|| Error::parse(ln, "expected `base: <size>`"))?
        .parse()
        .map_err(|_| Error::parse(ln, "bad base size"))?;
    let (ln, line) = lines
        .next()
        .ok_or_else(|| Error::parse(ln + 1, "missing `left:`"))?;
    if header(line, "left").is_none() {
        return Err(Error::parse(ln, "expected `left:`"));
    }
    let left = parse_structure_lines(&mut lines, palette, Some("right"))?;
    let (ln, line) = lines
        .next()
        .ok_or_else(|| Error::parse(ln + 1, "missing `right:`"))?;
    if header(line, "right").is_none() {
        return Err(Error::parse(ln, "expected `right:`"));
    }
    let right = parse_structure_lines(&mut lines, palette, None)?;
    if let Some((ln, _)) = lines.next() {
        return Err(Error::parse(ln, "trailing content after right structure"));
    }
    AmalgamationInstance::new(k, left, right)
}

pub fn write_instance(inst: &AmalgamationInstance, palette: &Palette) -> String {
    format!(
        "base: {}\nleft:\n{}right:\n{}",
        inst.base_len(),
        write_structure(inst.left(), palette),
        write_structure(inst.right(), palette)
    )
}
