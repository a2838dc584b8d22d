use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};
use core::str::FromStr;

/// Longest supported context.
pub const MAX_DEPTH: usize = 32;

/// A context: the relevant suffix of the past, stored most-recent-first.
///
/// `as_slice()[0]` is the symbol immediately preceding the predicted one and
/// the last element is the oldest symbol (the leaf). `Display` and parsing use
/// the reverse, chronological order in which contexts are usually written.
#[derive(Clone, Copy)]
pub struct Context {
    len: u8,
    symbols: [u8; MAX_DEPTH],
}

impl Context {
    /// `None` for an empty or over-long string.
    pub fn from_recent_first(symbols: &[u8]) -> Option<Self> {
        if symbols.is_empty() || symbols.len() > MAX_DEPTH {
            return None;
        }
        let mut buf = [0u8; MAX_DEPTH];
        buf[..symbols.len()].copy_from_slice(symbols);
        Some(Context {
            len: symbols.len() as u8,
            symbols: buf,
        })
    }

    pub fn from_oldest_first(symbols: &[u8]) -> Option<Self> {
        let mut c = Self::from_recent_first(symbols)?;
        c.symbols[..symbols.len()].reverse();
        Some(c)
    }

    pub fn symbol(s: u8) -> Self {
        let mut symbols = [0u8; MAX_DEPTH];
        symbols[0] = s;
        Context { len: 1, symbols }
    }

    #[inline]
    pub fn as_slice(&self) -> &[u8] {
        &self.symbols[..self.len as usize]
    }

    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn most_recent(&self) -> u8 {
        self.symbols[0]
    }

    /// The leaf symbol.
    #[inline]
    pub fn oldest(&self) -> u8 {
        self.symbols[self.len as usize - 1]
    }

    /// `k` prepended in chronological order, i.e. one level deeper.
    #[inline]
    pub fn child(&self, k: u8) -> Option<Self> {
        if self.len() == MAX_DEPTH {
            return None;
        }
        let mut c = *self;
        c.symbols[c.len as usize] = k;
        c.len += 1;
        Some(c)
    }

    /// Drops the oldest symbol; `None` at depth one.
    #[inline]
    pub fn parent(&self) -> Option<Self> {
        if self.len <= 1 {
            return None;
        }
        let mut c = *self;
        c.len -= 1;
        c.symbols[c.len as usize] = 0;
        Some(c)
    }

    /// Chronological order, oldest first.
    pub fn oldest_first(&self) -> impl DoubleEndedIterator<Item = u8> + ExactSizeIterator + Clone + '_ {
        self.as_slice().iter().rev().copied()
    }

    /// Whether `self` is a suffix (in chronological order) of `other`.
    #[inline]
    pub fn is_suffix_of(&self, other: &Context) -> bool {
        other.as_slice().starts_with(self.as_slice())
    }

    /// Whether `self` is a suffix of the chronological string `past`.
    #[inline]
    pub fn is_suffix_of_past(&self, past: &[u8]) -> bool {
        let l = self.len();
        l <= past.len() && self.as_slice().iter().zip(past.iter().rev()).all(|(a, b)| a == b)
    }

    /// Chronological rendering: plain digits when every symbol is below 10,
    /// dot-separated numbers otherwise. A lone symbol of 10 or more gets a
    /// trailing dot (`12.`) so it cannot be read back as two symbols.
    pub fn render_oldest_first(&self) -> String {
        render(self.oldest_first())
    }

    /// Internal most-recent-first rendering.
    pub fn render_recent_first(&self) -> String {
        render(self.as_slice().iter().copied())
    }
}

fn render(symbols: impl Iterator<Item = u8> + Clone) -> String {
    use core::fmt::Write;
    let dotted = symbols.clone().any(|s| s >= 10);
    let mut out = String::new();
    for (i, s) in symbols.enumerate() {
        if dotted && i > 0 {
            out.push('.');
        }
        let _ = write!(out, "{s}");
    }
    if dotted && !out.contains('.') {
        out.push('.');
    }
    out
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.as_slice() == other.as_slice()
    }
}

impl Eq for Context {}

impl Hash for Context {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.as_slice().hash(state)
    }
}

impl Ord for Context {
    /// Lexicographic on the most-recent-first string. The children of a context
    /// sort immediately after it, so a grown branch occupies a contiguous run.
    fn cmp(&self, other: &Self) -> Ordering {
        self.as_slice().cmp(other.as_slice())
    }
}

impl PartialOrd for Context {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_oldest_first())
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Context({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse context {0:?}: expected digits or dot-separated symbols")]
pub struct ParseContextError(pub String);

impl FromStr for Context {
    type Err = ParseContextError;

    /// Parses the chronological (oldest-first) rendering.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseContextError(String::from(s));
        let symbols: Vec<u8> = if s.contains('.') {
            s.strip_suffix('.')
                .filter(|rest| !rest.contains('.'))
                .unwrap_or(s)
                .split('.')
                .map(|p| p.parse::<u8>().map_err(|_| err()))
                .collect::<Result<_, _>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(err))
                .collect::<Result<_, _>>()?
        };
        Context::from_oldest_first(&symbols).ok_or_else(err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(s: &str) -> Context {
        s.parse().unwrap()
    }

    #[test]
    fn parse_is_chronological() {
        let c = ctx("011");
        assert_eq!(c.as_slice(), &[1, 1, 0]);
        assert_eq!(c.most_recent(), 1);
        assert_eq!(c.oldest(), 0);
        assert_eq!(c.to_string(), "011");
        assert_eq!(c.render_recent_first(), "110");
    }

    #[test]
    fn dotted_rendering_for_large_symbols() {
        let c = Context::from_oldest_first(&[12, 3]).unwrap();
        assert_eq!(c.to_string(), "12.3");
        assert_eq!(ctx("12.3"), c);
        let lone = Context::symbol(12);
        assert_eq!(lone.to_string(), "12.");
        assert_eq!(ctx("12."), lone);
        assert_eq!(ctx("12").as_slice(), &[2, 1]);
    }

    #[test]
    fn child_and_parent() {
        let c = ctx("1");
        let g = c.child(0).unwrap();
        assert_eq!(g, ctx("01"));
        assert_eq!(g.parent().unwrap(), c);
        assert!(c.parent().is_none());
        assert!(c.is_suffix_of(&g));
        assert!(!g.is_suffix_of(&c));
    }

    #[test]
    fn suffix_of_past() {
        assert!(ctx("01").is_suffix_of_past(&[1, 1, 0, 1]));
        assert!(!ctx("01").is_suffix_of_past(&[1, 1, 1, 0]));
        assert!(!ctx("001").is_suffix_of_past(&[0, 1]));
    }

    #[test]
    fn children_sort_contiguously_after_parent() {
        let s = ctx("10");
        let mut v = alloc::vec![ctx("1"), s, s.child(1).unwrap(), ctx("0"), s.child(0).unwrap()];
        v.sort();
        let pos = v.iter().position(|c| *c == s).unwrap();
        assert_eq!(v[pos + 1], s.child(0).unwrap());
        assert_eq!(v[pos + 2], s.child(1).unwrap());
    }

    #[test]
    fn rejects_bad_text() {
        assert!("".parse::<Context>().is_err());
        assert!("0a1".parse::<Context>().is_err());
        assert!("1.300".parse::<Context>().is_err());
    }
}
