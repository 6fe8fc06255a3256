//! The binary erasure channel.
//!
//! Each transmitted bit is independently replaced by an erasure with
//! probability `eps` and passed through unchanged otherwise; a non-erased
//! output is always correct. Text fixtures spell symbols as `'0'`, `'1'`,
//! and `'?'`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::rng;

/// One channel output: a known bit or an erasure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Erased,
}

impl Symbol {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    /// The bit value, if known.
    pub fn bit(self) -> Option<bool> {
        match self {
            Symbol::Zero => Some(false),
            Symbol::One => Some(true),
            Symbol::Erased => None,
        }
    }

    pub fn is_erased(self) -> bool {
        matches!(self, Symbol::Erased)
    }

    /// XOR of two symbols; erased if either side is erased.
    pub fn xor(self, other: Symbol) -> Symbol {
        match (self.bit(), other.bit()) {
            (Some(a), Some(b)) => Symbol::from_bit(a ^ b),
            _ => Symbol::Erased,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Erased => '?',
        };
        write!(f, "{c}")
    }
}

impl FromStr for Symbol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" => Ok(Symbol::Zero),
            "1" => Ok(Symbol::One),
            "?" => Ok(Symbol::Erased),
            other => Err(format!("invalid symbol {other:?}")),
        }
    }
}

/// A binary word of length at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word(Vec<bool>);

impl Word {
    /// Wraps a bit vector. Panics on an empty vector.
    pub fn from_bits(bits: Vec<bool>) -> Self {
        assert!(!bits.is_empty(), "a word has at least one bit");
        Word(bits)
    }

    pub fn zero(n: usize) -> Self {
        Word::from_bits(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    /// All positions mapped to known symbols.
    pub fn to_symbols(&self) -> Vec<Symbol> {
        self.0.iter().map(|&b| Symbol::from_bit(b)).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Sends `word` through BEC(`eps`). Identical seeds give identical outputs.
pub fn transmit(word: &Word, eps: f64, rng_seed: u64) -> Vec<Symbol> {
    assert!((0.0..=1.0).contains(&eps), "erasure probability out of range");
    let mut rng = rng::from_seed(rng_seed);
    word.bits()
        .iter()
        .map(|&b| {
            if rng.random::<f64>() < eps {
                Symbol::Erased
            } else {
                Symbol::from_bit(b)
            }
        })
        .collect()
}

/// Channel capacity of BEC(`eps`) in bits per use.
pub fn capacity(eps: f64) -> f64 {
    assert!((0.0..=1.0).contains(&eps), "erasure probability out of range");
    1.0 - eps
}
