//! Syntactic certificates on the forbidden-triangle system.

use serde::Serialize;

use crate::amalgam::check_compatible;
use crate::color::{Color, ColorLanguage, ColorSet, Palette};
use crate::error::{Error, Result};
use crate::triangle::{Triangle, TriangleSet};

/// Parameters `(L*, L^)` of the two-color certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Condition2Params {
    pub l_star: ColorSet,
    pub l_hat: ColorSet,
}

impl Condition2Params {
    pub fn new(l_star: ColorSet, l_hat: ColorSet) -> Self {
        Condition2Params { l_star, l_hat }
    }

    pub fn parse(palette: &Palette, l_star: &str, l_hat: &str) -> Result<Self> {
        Ok(Condition2Params {
            l_star: palette.parse_set(l_star)?,
            l_hat: palette.parse_set(l_hat)?,
        })
    }

    pub fn describe(&self, palette: &Palette) -> ParamsView {
        ParamsView {
            l_star: palette.set_word(self.l_star),
            l_hat: palette.set_word(self.l_hat),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParamsView {
    pub l_star: String,
    pub l_hat: String,
}

/// No forbidden triangle has two or more entries (with multiplicity) in the
/// solution set.
pub fn check_condition1(s: &TriangleSet, lang: &ColorLanguage) -> bool {
    let sol = lang.solutions();
    s.triangles().iter().all(|t| t.count_in(sol) < 2)
}

/// The two-color certificate for `L' = {R1 > R2}` with parameters `(L*, L^)`.
///
/// `S` must contain every `R' R^1 R^2` (`R'` outside `L^ u {R2}`, `R^1, R^2`
/// in `L*`), every `R2 R2 R^1` and every `R2 R^ R^1`, and every other
/// triangle of `S` must avoid `R1` and the pair `R2 R2`.
pub fn check_condition2(
    s: &TriangleSet,
    lang: &ColorLanguage,
    params: &Condition2Params,
) -> Result<bool> {
    check_compatible(lang, s)?;
    let (r1, r2) = two_colors(lang)?;
    let palette = lang.palette();
    let all = palette.all();
    let Condition2Params { l_star, l_hat } = *params;
    if !l_star.is_subset(all) || !l_hat.is_subset(all) {
        return Err(Error::input(
            "condition parameters use colors outside the palette",
        ));
    }
    let sol = lang.solutions();
    if l_star.0 & sol.0 != 0 {
        return Err(Error::input("L* must be disjoint from the solution set"));
    }
    if l_hat.0 & (sol.0 | l_star.0) != 0 {
        return Err(Error::input(
            "L^ must be disjoint from the solution set and L*",
        ));
    }

    let required = condition2_required(palette, r2, l_star, l_hat);
    if !required.iter().all(|t| s.contains(t)) {
        return Ok(false);
    }
    let extra_ok = s
        .triangles()
        .iter()
        .filter(|t| !required.contains(t))
        .all(|t| t.count_of(r1) == 0 && t.count_of(r2) < 2);
    Ok(extra_ok)
}

fn condition2_required(
    palette: &Palette,
    r2: Color,
    l_star: ColorSet,
    l_hat: ColorSet,
) -> Vec<Triangle> {
    let mut req = Vec::new();
    for x in l_star.iter() {
        for y in l_star.iter() {
            for r in palette.colors() {
                if r != r2 && !l_hat.contains(r) {
                    req.push(Triangle::new(r, x, y));
                }
            }
        }
        req.push(Triangle::new(r2, r2, x));
        for h in l_hat.iter() {
            req.push(Triangle::new(r2, h, x));
        }
    }
    req.sort();
    req.dedup();
    req
}

fn two_colors(lang: &ColorLanguage) -> Result<(Color, Color)> {
    match lang.priority() {
        [r1, r2] => Ok((*r1, *r2)),
        p => Err(Error::input(format!(
            "condition 2 needs exactly two solution colors, got {}",
            p.len()
        ))),
    }
}

/// Every `(L*, L^)` for which [`check_condition2`] holds, in ascending
/// `(L*, L^)` bitmask order. Empty unless the solution set has two colors.
pub fn condition2_params(s: &TriangleSet, lang: &ColorLanguage) -> Vec<Condition2Params> {
    if lang.priority().len() != 2 || lang.palette() != s.palette() {
        return Vec::new();
    }
    let rest = lang.palette().all().0 & !lang.solutions().0;
    let mut out = Vec::new();
    for star in submasks(rest) {
        for hat in submasks(rest & !star) {
            let params = Condition2Params::new(ColorSet(star), ColorSet(hat));
            if check_condition2(s, lang, &params).unwrap_or(false) {
                out.push(params);
            }
        }
    }
    out
}

/// Submasks of `mask` in ascending numeric order.
fn submasks(mask: u32) -> Vec<u32> {
    let mut v: Vec<u32> = (0..=mask).filter(|m| m & !mask == 0).collect();
    v.sort_unstable();
    v
}

/// Part (i) of the main condition: no triangle contains `R1 R1` or `R1 R2`.
pub fn check_maincond_i(s: &TriangleSet, lang: &ColorLanguage) -> Result<bool> {
    check_compatible(lang, s)?;
    let p = lang.priority();
    if p.len() < 2 {
        return Err(Error::input("part (i) needs at least two solution colors"));
    }
    let (r1, r2) = (p[0], p[1]);
    Ok(s.triangles()
        .iter()
        .all(|t| !t.contains_pair(r1, r1) && !t.contains_pair(r1, r2)))
}
