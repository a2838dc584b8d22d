use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One-step transition constraints, `allowed[from][to]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AllowedMatrix {
    size: usize,
    allowed: Vec<bool>,
}

impl AllowedMatrix {
    /// Every row needs an allowed successor and every column an allowed
    /// predecessor.
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self> {
        let size = rows.len();
        if size < 2 {
            return Err(Error::InvalidAllowedMatrix(format!("need at least 2 rows, got {size}")));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != size) {
            return Err(Error::InvalidAllowedMatrix(format!(
                "row {i} has {} entries, expected {size}",
                r.len()
            )));
        }
        let allowed: Vec<bool> = rows.into_iter().flatten().collect();
        let m = AllowedMatrix { size, allowed };
        for i in 0..size {
            if !(0..size).any(|j| m.is_allowed(i as u8, j as u8)) {
                return Err(Error::InvalidAllowedMatrix(format!(
                    "symbol {i} has no allowed successor"
                )));
            }
            if !(0..size).any(|j| m.is_allowed(j as u8, i as u8)) {
                return Err(Error::InvalidAllowedMatrix(format!(
                    "symbol {i} has no allowed predecessor"
                )));
            }
        }
        Ok(m)
    }

    pub fn all_allowed(size: usize) -> Self {
        AllowedMatrix {
            size,
            allowed: vec![true; size * size],
        }
    }

    /// Allowed transitions between the five rhythmic syllable classes
    /// (0-3 stress/boundary classes, 4 end of sentence).
    pub fn portuguese_rhythm() -> Self {
        const Y: bool = true;
        const N: bool = false;
        AllowedMatrix::new(vec![
            vec![Y, Y, Y, Y, Y],
            vec![Y, N, Y, Y, Y],
            vec![Y, Y, N, N, N],
            vec![Y, N, Y, Y, Y],
            vec![N, N, Y, Y, N],
        ])
        .expect("static matrix is valid")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn is_allowed(&self, from: u8, to: u8) -> bool {
        self.allowed[from as usize * self.size + to as usize]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[bool]> {
        self.allowed.chunks(self.size)
    }

    /// Whether a most-recent-first string contains a prohibited step from an
    /// older symbol to the newer one next to it.
    #[inline]
    pub fn has_prohibited_pair(&self, recent_first: &[u8]) -> bool {
        recent_first.windows(2).any(|w| !self.is_allowed(w[1], w[0]))
    }

    /// First prohibited adjacent pair in a chronological sequence, as
    /// `(position of the second symbol, from, to)`.
    pub fn first_violation(&self, chronological: &[u8]) -> Option<(usize, u8, u8)> {
        chronological
            .windows(2)
            .position(|w| !self.is_allowed(w[0], w[1]))
            .map(|i| (i + 1, chronological[i], chronological[i + 1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_layout_rows_are_from() {
        let a = AllowedMatrix::portuguese_rhythm();
        assert!(!a.is_allowed(4, 4));
        assert!(!a.is_allowed(4, 0));
        assert!(a.is_allowed(4, 2));
        assert!(!a.is_allowed(2, 3));
        assert!(a.is_allowed(2, 1));
        assert!(!a.is_allowed(1, 1));
    }

    #[test]
    fn rejects_dead_rows_and_columns() {
        assert!(AllowedMatrix::new(vec![vec![false, false], vec![true, true]]).is_err());
        assert!(AllowedMatrix::new(vec![vec![true, false], vec![true, false]]).is_err());
        assert!(AllowedMatrix::new(vec![vec![true, true], vec![true]]).is_err());
    }

    #[test]
    fn pair_direction() {
        let a = AllowedMatrix::portuguese_rhythm();
        // chronological 4 then 0 is prohibited; recent-first that is [0, 4]
        assert!(a.has_prohibited_pair(&[0, 4]));
        assert!(!a.has_prohibited_pair(&[4, 0]));
        assert_eq!(a.first_violation(&[0, 1, 4, 0]), Some((3, 4, 0)));
        assert_eq!(a.first_violation(&[0, 2, 1]), None);
    }
}
