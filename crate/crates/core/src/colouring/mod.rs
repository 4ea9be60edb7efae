//! Red/blue colourings of `[N] = {1, ..., N}` and arithmetic-progression queries.

mod ap;
mod io;

pub use ap::{
    ap_is_monochromatic, find_blue_3ap, find_blue_3ap_with, longest_mono_ap, longest_mono_ap_full,
    LongestAp, SearchStrategy, DENSITY_THRESHOLD,
};
pub use io::{parse_colouring, read_colouring, write_colouring, FORMAT_TAG};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Colour {
    Red,
    Blue,
}

impl Colour {
    pub fn other(self) -> Colour {
        match self {
            Colour::Red => Colour::Blue,
            Colour::Blue => Colour::Red,
        }
    }
}

/// A 2-colouring of `[N]`. Blue elements are stored as packed bits, red is the complement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Colouring {
    n_max: usize,
    words: Vec<u64>,
}

impl Colouring {
    pub fn all_red(n_max: usize) -> Self {
        Colouring { n_max, words: vec![0; n_max.div_ceil(64)] }
    }

    pub fn from_blue<I: IntoIterator<Item = usize>>(n_max: usize, blue: I) -> Result<Self> {
        let mut c = Colouring::all_red(n_max);
        for n in blue {
            if n == 0 || n > n_max {
                return invalid(format!("blue element {n} outside [1, {n_max}]"));
            }
            c.set_blue(n, true);
        }
        Ok(c)
    }

    /// Builds a colouring from a predicate on `n`.
    pub fn from_fn(n_max: usize, mut is_blue: impl FnMut(usize) -> bool) -> Self {
        let mut c = Colouring::all_red(n_max);
        for n in 1..=n_max {
            if is_blue(n) {
                c.set_blue(n, true);
            }
        }
        c
    }

    pub(crate) fn from_words(n_max: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), n_max.div_ceil(64));
        Colouring { n_max, words }
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Panics if `n` is not in `[1, N]`.
    #[inline]
    pub fn is_blue(&self, n: usize) -> bool {
        assert!(n >= 1 && n <= self.n_max, "element {n} outside [1, {}]", self.n_max);
        let i = n - 1;
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn colour(&self, n: usize) -> Colour {
        if self.is_blue(n) {
            Colour::Blue
        } else {
            Colour::Red
        }
    }

    #[inline]
    pub fn has_colour(&self, n: usize, colour: Colour) -> bool {
        self.is_blue(n) == (colour == Colour::Blue)
    }

    pub fn set_blue(&mut self, n: usize, blue: bool) {
        assert!(n >= 1 && n <= self.n_max);
        let i = n - 1;
        if blue {
            self.words[i >> 6] |= 1 << (i & 63);
        } else {
            self.words[i >> 6] &= !(1 << (i & 63));
        }
    }

    pub fn blue_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn blue_elements(&self) -> Vec<usize> {
        (1..=self.n_max).filter(|&n| self.is_blue(n)).collect()
    }

    /// Swaps red and blue.
    pub fn complement(&self) -> Colouring {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        let tail = self.n_max % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        Colouring { n_max: self.n_max, words }
    }

    /// The colouring of `[n]` obtained by forgetting elements above `n`.
    pub fn restrict(&self, n: usize) -> Colouring {
        let n = n.min(self.n_max);
        Colouring::from_fn(n, |k| self.is_blue(k))
    }
}

impl Default for Colouring {
    fn default() -> Self {
        Colouring::all_red(0)
    }
}

/// The progression `start, start + difference, ..., start + (length - 1) * difference`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ApWitness {
    pub start: usize,
    pub difference: usize,
    pub length: usize,
}

impl ApWitness {
    pub fn new(start: usize, difference: usize, length: usize) -> Self {
        ApWitness { start, difference, length }
    }

    pub fn last(&self) -> usize {
        self.start + (self.length.saturating_sub(1)) * self.difference
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.length).map(move |i| self.start + i * self.difference)
    }

    pub fn fits(&self, n_max: usize) -> bool {
        self.start >= 1 && self.difference >= 1 && self.length >= 1 && self.last() <= n_max
    }
}
