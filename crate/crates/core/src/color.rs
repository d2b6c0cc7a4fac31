//! Colors, palettes and prioritised solution sets.
//!
//! A [`Palette`] is the relation alphabet: an ordered list of single-character
//! color symbols. Colors are referred to by their dense index into the palette
//! ([`Color`]), so every structure and triangle set is interpreted relative to
//! one palette. A [`ColorLanguage`] adds the solution set together with its
//! priority order, highest priority first.

use std::fmt;

use crate::error::{Error, Result};

/// Upper limit on palette size; color sets are stored as `u32` bitmasks.
pub const MAX_COLORS: usize = 16;

/// Index of a color in its palette.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Color(pub u8);

impl Color {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub(crate) fn bit(self) -> u32 {
        1 << self.0
    }
}

/// A set of colors of one palette, as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorSet(pub u32);

impl ColorSet {
    pub const EMPTY: ColorSet = ColorSet(0);

    pub fn from_colors(colors: impl IntoIterator<Item = Color>) -> Self {
        ColorSet(colors.into_iter().fold(0, |m, c| m | c.bit()))
    }

    #[inline]
    pub fn contains(self, c: Color) -> bool {
        self.0 & c.bit() != 0
    }

    #[inline]
    pub fn insert(&mut self, c: Color) {
        self.0 |= c.bit();
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: ColorSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Colors in ascending palette order.
    pub fn iter(self) -> impl Iterator<Item = Color> {
        (0..MAX_COLORS as u8)
            .map(Color)
            .filter(move |c| self.contains(*c))
    }
}

/// The relation alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Palette {
    symbols: Vec<char>,
}

impl Palette {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::Language("palette is empty".into()));
        }
        if symbols.len() > MAX_COLORS {
            return Err(Error::Language(format!(
                "at most {MAX_COLORS} colors are supported, got {}",
                symbols.len()
            )));
        }
        for (i, s) in symbols.iter().enumerate() {
            if !s.is_ascii_alphanumeric() {
                return Err(Error::Language(format!(
                    "color symbol {s:?} must be a single ASCII letter or digit"
                )));
            }
            if symbols[..i].contains(s) {
                return Err(Error::Language(format!("duplicate color {s}")));
            }
        }
        Ok(Palette { symbols })
    }

    /// Parses a palette from a string such as `"RGXY"` or `"R G X Y"`.
    pub fn parse(text: &str) -> Result<Self> {
        Palette::new(text.chars().filter(|c| !c.is_whitespace()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn colors(&self) -> impl Iterator<Item = Color> + '_ {
        (0..self.symbols.len() as u8).map(Color)
    }

    pub fn all(&self) -> ColorSet {
        ColorSet((1u32 << self.symbols.len()) - 1)
    }

    pub fn symbol(&self, c: Color) -> char {
        self.symbols[c.index()]
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn color(&self, symbol: char) -> Result<Color> {
        self.symbols
            .iter()
            .position(|s| *s == symbol)
            .map(|i| Color(i as u8))
            .ok_or_else(|| Error::UnknownColor(symbol.to_string()))
    }

    pub fn contains(&self, c: Color) -> bool {
        c.index() < self.symbols.len()
    }

    pub(crate) fn check(&self, c: Color) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(Error::ColorOutOfRange {
                index: c.0,
                len: self.len(),
            })
        }
    }

    /// Renders a color sequence as concatenated symbols, e.g. `"RXX"`.
    pub fn word(&self, colors: impl IntoIterator<Item = Color>) -> String {
        colors.into_iter().map(|c| self.symbol(c)).collect()
    }

    /// Renders a set as concatenated symbols in palette order.
    pub fn set_word(&self, set: ColorSet) -> String {
        self.word(set.iter())
    }

    pub fn parse_set(&self, text: &str) -> Result<ColorSet> {
        let mut set = ColorSet::EMPTY;
        for ch in text.chars().filter(|c| !c.is_whitespace() && *c != ',') {
            set.insert(self.color(ch)?);
        }
        Ok(set)
    }
}

impl fmt::Display for Palette {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// A palette together with a prioritised solution set `R1 > R2 > ... > Rm`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColorLanguage {
    palette: Palette,
    priority: Vec<Color>,
}

impl ColorLanguage {
    /// `priority` lists the solution colors from highest to lowest priority.
    pub fn new(palette: Palette, priority: Vec<Color>) -> Result<Self> {
        if priority.is_empty() {
            return Err(Error::Language("solution set is empty".into()));
        }
        for (i, c) in priority.iter().enumerate() {
            palette.check(*c)?;
            if priority[..i].contains(c) {
                return Err(Error::Language(format!(
                    "color {} repeated in priority order",
                    palette.symbol(*c)
                )));
            }
        }
        if priority.len() >= palette.len() {
            return Err(Error::Language(
                "solution set must be a proper subset of the palette".into(),
            ));
        }
        Ok(ColorLanguage { palette, priority })
    }

    /// Builds a language from a priority string such as `"G>R>Y"` or `"R > G"`.
    pub fn with_order(palette: Palette, order: &str) -> Result<Self> {
        let priority = parse_order(&palette, order)?;
        ColorLanguage::new(palette, priority)
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn priority(&self) -> &[Color] {
        &self.priority
    }

    pub fn solutions(&self) -> ColorSet {
        ColorSet::from_colors(self.priority.iter().copied())
    }

    pub fn is_solution(&self, c: Color) -> bool {
        self.priority.contains(&c)
    }

    /// Highest-priority solution color not contained in `blocked`.
    #[inline]
    pub fn first_unblocked(&self, blocked: u32) -> Option<Color> {
        self.priority
            .iter()
            .copied()
            .find(|c| blocked & c.bit() == 0)
    }

    /// Lowest-priority solution color.
    pub fn last(&self) -> Color {
        *self.priority.last().expect("solution set is never empty")
    }

    /// Priority rendered as `R > G`.
    pub fn order_string(&self) -> String {
        let parts: Vec<String> = self
            .priority
            .iter()
            .map(|c| self.palette.symbol(*c).to_string())
            .collect();
        parts.join(" > ")
    }

    /// Compact rendering, e.g. `G>R>Y`.
    pub fn order_compact(&self) -> String {
        let parts: Vec<String> = self
            .priority
            .iter()
            .map(|c| self.palette.symbol(*c).to_string())
            .collect();
        parts.join(">")
    }
}

pub fn parse_order(palette: &Palette, order: &str) -> Result<Vec<Color>> {
    let mut out = Vec::new();
    for part in order.split('>') {
        let part = part.trim();
        let mut chars = part.chars();
        match (chars.next(), chars.next()) {
            (Some(ch), None) => out.push(palette.color(ch)?),
            _ => {
                return Err(Error::Language(format!(
                    "malformed priority order {order:?}: expected symbols separated by '>'"
                )))
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rgxy() -> Palette {
        Palette::parse("R G X Y").unwrap()
    }

    #[test]
    fn palette_rejects_duplicates_and_empty() {
        assert!(Palette::parse("RR").is_err());
        assert!(Palette::parse("").is_err());
        assert!(Palette::parse("R-").is_err());
    }

    #[test]
    fn language_requires_proper_nonempty_subset() {
        let p = rgxy();
        assert!(ColorLanguage::with_order(p.clone(), "R>G").is_ok());
        assert!(ColorLanguage::with_order(p.clone(), "R>G>X>Y").is_err());
        assert!(ColorLanguage::with_order(p.clone(), "R>R").is_err());
        assert!(ColorLanguage::with_order(p.clone(), "R>Q").is_err());
        assert!(ColorLanguage::with_order(p, "RG").is_err());
    }

    #[test]
    fn first_unblocked_follows_priority() {
        let lang = ColorLanguage::with_order(rgxy(), "G > R").unwrap();
        let g = lang.palette().color('G').unwrap();
        let r = lang.palette().color('R').unwrap();
        assert_eq!(lang.first_unblocked(0), Some(g));
        assert_eq!(lang.first_unblocked(g.bit()), Some(r));
        assert_eq!(lang.first_unblocked(g.bit() | r.bit()), None);
        assert_eq!(lang.order_string(), "G > R");
    }

    #[test]
    fn color_set_iterates_in_palette_order() {
        let p = rgxy();
        let s = p.parse_set("YR").unwrap();
        assert_eq!(p.set_word(s), "RY");
        assert_eq!(s.len(), 2);
        assert!(ColorSet::EMPTY.is_subset(s));
    }
}
