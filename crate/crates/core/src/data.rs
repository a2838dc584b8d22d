//! Alphabets, symbol sequences and multi-sequence datasets.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tree::MAX_DEPTH;

/// Alphabet `{0, .., m-1}` with `2 <= m <= 256`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if (2..=256).contains(&size) {
            Ok(Alphabet(size))
        } else {
            Err(Error::InvalidAlphabet(size))
        }
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0
    }

    #[inline]
    pub fn contains(self, symbol: usize) -> bool {
        symbol < self.0
    }
}

/// A chronologically ordered symbol sequence, oldest symbol first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequence(Vec<u8>);

impl Sequence {
    /// Checks every symbol against the alphabet. `index` is only used in errors.
    pub fn new(alphabet: Alphabet, symbols: Vec<u8>, index: usize) -> Result<Self> {
        if let Some((position, &s)) = symbols
            .iter()
            .enumerate()
            .find(|(_, &s)| !alphabet.contains(s as usize))
        {
            return Err(Error::SymbolOutOfRange {
                sequence: index,
                position,
                symbol: s as usize,
                alphabet_size: alphabet.size(),
            });
        }
        Ok(Sequence(symbols))
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Independent sequences over a common alphabet, together with the depth
/// bound `L` used for counting. The first `L` symbols of every sequence are
/// conditioning values; each sequence is strictly longer than `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    alphabet: Alphabet,
    sequences: Vec<Sequence>,
    depth_bound: usize,
}

impl Dataset {
    pub fn new(alphabet: Alphabet, sequences: Vec<Sequence>, depth_bound: usize) -> Result<Self> {
        if depth_bound == 0 || depth_bound > MAX_DEPTH {
            return Err(Error::InvalidDepth { depth: depth_bound });
        }
        if sequences.is_empty() {
            return Err(Error::EmptyDataset);
        }
        for (i, seq) in sequences.iter().enumerate() {
            if seq.len() <= depth_bound {
                return Err(Error::SequenceTooShort {
                    sequence: i,
                    length: seq.len(),
                    depth: depth_bound,
                });
            }
            if let Some((position, &s)) = seq.0.iter().enumerate().find(|(_, &s)| !alphabet.contains(s as usize)) {
                return Err(Error::SymbolOutOfRange {
                    sequence: i,
                    position,
                    symbol: s as usize,
                    alphabet_size: alphabet.size(),
                });
            }
        }
        Ok(Dataset {
            alphabet,
            sequences,
            depth_bound,
        })
    }

    /// Builds a dataset from raw symbol vectors.
    pub fn from_symbols(alphabet_size: usize, sequences: Vec<Vec<u8>>, depth_bound: usize) -> Result<Self> {
        let alphabet = Alphabet::new(alphabet_size)?;
        let sequences = sequences
            .into_iter()
            .enumerate()
            .map(|(i, s)| Sequence::new(alphabet, s, i))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(alphabet, sequences, depth_bound)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.size()
    }

    pub fn sequences(&self) -> &[Sequence] {
        &self.sequences
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn depth_bound(&self) -> usize {
        self.depth_bound
    }

    /// Number of counted transitions, `sum_i (T_i - L)`.
    pub fn transitions(&self) -> u64 {
        self.sequences.iter().map(|s| (s.len() - self.depth_bound) as u64).sum()
    }

    /// Same sequences under a different depth bound.
    pub fn with_depth_bound(self, depth_bound: usize) -> Result<Self> {
        Dataset::new(self.alphabet, self.sequences, depth_bound)
    }

    /// Fails on the first adjacent pair that `allowed` prohibits.
    pub fn check_allowed(&self, allowed: &crate::tree::AllowedMatrix) -> Result<()> {
        if allowed.size() != self.alphabet_size() {
            return Err(Error::InvalidAllowedMatrix(format!(
                "matrix is {0}x{0} but the alphabet has {1} symbols",
                allowed.size(),
                self.alphabet_size()
            )));
        }
        for (i, s) in self.sequences.iter().enumerate() {
            if let Some((position, from, to)) = allowed.first_violation(s.symbols()) {
                return Err(Error::ProhibitedTransition {
                    sequence: i,
                    position,
                    from,
                    to,
                });
            }
        }
        Ok(())
    }

    /// Splits into the sequences selected by `indices` and the rest, both in
    /// original order.
    pub fn split(&self, indices: &[usize]) -> (Vec<&Sequence>, Vec<&Sequence>) {
        let mut inside = Vec::with_capacity(indices.len());
        let mut outside = Vec::with_capacity(self.len().saturating_sub(indices.len()));
        for (i, s) in self.sequences.iter().enumerate() {
            if indices.contains(&i) {
                inside.push(s);
            } else {
                outside.push(s);
            }
        }
        (inside, outside)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn alphabet_bounds() {
        assert!(Alphabet::new(1).is_err());
        assert!(Alphabet::new(2).is_ok());
        assert!(Alphabet::new(256).is_ok());
        assert!(Alphabet::new(257).is_err());
    }

    #[test]
    fn rejects_out_of_range_symbol() {
        let err = Dataset::from_symbols(2, vec![vec![0, 1, 2, 0]], 2).unwrap_err();
        assert_eq!(
            err,
            Error::SymbolOutOfRange {
                sequence: 0,
                position: 2,
                symbol: 2,
                alphabet_size: 2
            }
        );
    }

    #[test]
    fn rejects_sequence_not_longer_than_depth() {
        let err = Dataset::from_symbols(2, vec![vec![0, 1, 1], vec![0, 1]], 2).unwrap_err();
        assert!(matches!(
            err,
            Error::SequenceTooShort {
                sequence: 1,
                length: 2,
                depth: 2
            }
        ));
    }

    #[test]
    fn transitions_and_split() {
        let d = Dataset::from_symbols(2, vec![vec![0, 1, 1, 0], vec![1, 1, 1, 1], vec![0; 10]], 2).unwrap();
        assert_eq!(d.transitions(), 2 + 2 + 8);
        let (a, b) = d.split(&[1]);
        assert_eq!(a.len(), 1);
        assert_eq!(b.len(), 2);
        assert_eq!(a[0].symbols(), &[1, 1, 1, 1]);
    }
}
