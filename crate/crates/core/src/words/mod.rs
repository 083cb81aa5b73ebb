//! Free group words: letters, free reduction, cyclic reduction, conjugacy
//! class enumeration and weighted word metrics.
//!
//! Generators of a free group of rank `r` are `a_1 .. a_r`. A [`Letter`] is a
//! signed generator index; the text form uses `a`..`z` for generators and the
//! uppercase letter for the inverse (`A` is `a⁻¹`). The identity prints as `1`.
//! Generators past the 26th print as `x27` / `X27`.

mod conj;
mod metric;

pub use conj::{
    cyclic_reduce, enumerate_conj_classes, least_rotation, ConjClass, DEFAULT_CLASS_CAP,
};
pub use metric::{
    check_semigroup_generation, word_length, word_length_in_tube, word_length_with_path,
    GenerationCheck, GenerationStatus, GeneratingSet, SearchLimits,
};

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator or its inverse. `Letter(i)` with `i > 0` is `a_i`, `i < 0` is `a_{|i|}⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter(i32);

impl Letter {
    /// The generator `a_index` (1-based).
    pub fn generator(index: usize) -> Letter {
        assert!(index >= 1, "generator indices are 1-based");
        Letter(index as i32)
    }

    pub fn inverse_of_generator(index: usize) -> Letter {
        Letter::generator(index).inverse()
    }

    pub fn from_signed(raw: i32) -> Option<Letter> {
        (raw != 0).then_some(Letter(raw))
    }

    pub fn signed(self) -> i32 {
        self.0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// 1-based generator index.
    pub fn index(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    /// Position in the fixed letter order a₁ < a₁⁻¹ < a₂ < a₂⁻¹ < …
    pub fn order_key(self) -> u32 {
        2 * (self.index() as u32 - 1) + u32::from(self.is_inverse())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = self.index();
        if i <= 26 {
            let base = if self.is_inverse() { b'A' } else { b'a' };
            write!(f, "{}", (base + (i - 1) as u8) as char)
        } else if self.is_inverse() {
            write!(f, "X{i}")
        } else {
            write!(f, "x{i}")
        }
    }
}

/// Generators `a_1 .. a_rank` of a free group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    rank: usize,
}

impl Alphabet {
    pub fn new(rank: usize) -> Result<Alphabet> {
        if rank == 0 {
            return Err(Error::input("alphabet rank must be at least 1"));
        }
        if rank > i32::MAX as usize / 2 {
            return Err(Error::input(format!("alphabet rank {rank} is too large")));
        }
        Ok(Alphabet { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// All 2r letters in the canonical order.
    pub fn letters(&self) -> Vec<Letter> {
        (1..=self.rank)
            .flat_map(|i| [Letter::generator(i), Letter::inverse_of_generator(i)])
            .collect()
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.index() <= self.rank
    }

    pub fn check(&self, word: &Word) -> Result<()> {
        match word.letters().iter().find(|l| !self.contains(**l)) {
            Some(l) => Err(Error::input(format!(
                "letter {l} is outside the alphabet of rank {}",
                self.rank
            ))),
            None => Ok(()),
        }
    }

    /// Every reduced word of length at most `radius`, shortest first and
    /// lexicographic within a length.
    pub fn ball(&self, radius: usize, cap: usize) -> Result<Vec<Word>> {
        let mut out = vec![Word::identity()];
        let mut layer = vec![Word::identity()];
        let letters = self.letters();
        for _ in 0..radius {
            let mut next = Vec::with_capacity(layer.len() * (2 * self.rank - 1));
            for w in &layer {
                for &l in &letters {
                    if w.last() == Some(l.inverse()) {
                        continue;
                    }
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
            if out.len() + next.len() > cap {
                return Err(Error::cap(format!("ball of radius {radius}"), cap));
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        Ok(out)
    }

    /// Uniformly random reduced word of exactly `len` letters.
    pub fn random_word<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Word {
        let letters = self.letters();
        let mut v: Vec<Letter> = Vec::with_capacity(len);
        while v.len() < len {
            let l = letters[rng.random_range(0..letters.len())];
            if v.last() == Some(&l.inverse()) {
                continue;
            }
            v.push(l);
        }
        Word(v)
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

/// Free reduction of a raw signed letter sequence.
pub fn reduce(alphabet: &Alphabet, raw: &[i32]) -> Result<Word> {
    let mut letters = Vec::with_capacity(raw.len());
    for &r in raw {
        let l = Letter::from_signed(r)
            .ok_or_else(|| Error::input("0 is not a generator index"))?;
        if !alphabet.contains(l) {
            return Err(Error::input(format!(
                "generator index {r} outside rank {}",
                alphabet.rank()
            )));
        }
        letters.push(l);
    }
    Ok(Word::from_letters(letters))
}

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    /// Reduces an arbitrary letter sequence.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word(stack)
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    /// Parses `aBa`, `1` (identity) or tokens like `x27X3`.
    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "1" {
            return Ok(Word::identity());
        }
        let chars: Vec<char> = text.chars().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if (c == 'x' || c == 'X') && i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let idx: usize = chars[i + 1..j]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::input(format!("bad generator token in {text:?}")))?;
                if idx == 0 {
                    return Err(Error::input("generator indices start at 1"));
                }
                let l = Letter::generator(idx);
                letters.push(if c == 'X' { l.inverse() } else { l });
                i = j;
                continue;
            }
            let l = if c.is_ascii_lowercase() {
                Letter::generator((c as u8 - b'a') as usize + 1)
            } else if c.is_ascii_uppercase() {
                Letter::inverse_of_generator((c as u8 - b'A') as usize + 1)
            } else if c == ' ' || c == '*' || c == '.' {
                i += 1;
                continue;
            } else {
                return Err(Error::input(format!("unexpected character {c:?} in word {text:?}")));
            };
            letters.push(l);
            i += 1;
        }
        let w = Word::from_letters(letters);
        alphabet.check(&w)?;
        Ok(w)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &Word) -> Word {
        let c = self
            .0
            .iter()
            .rev()
            .zip(other.0.iter())
            .take_while(|(x, y)| **x == y.inverse())
            .count();
        let mut v = Vec::with_capacity(self.len() + other.len() - 2 * c);
        v.extend_from_slice(&self.0[..self.len() - c]);
        v.extend_from_slice(&other.0[c..]);
        Word(v)
    }

    /// Length of the longest common prefix of the two reduced words.
    pub fn common_prefix_len(&self, other: &Word) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .take_while(|(x, y)| x == y)
            .count()
    }

    /// Number of letters peeled by cyclic reduction from each end.
    pub(crate) fn peel_len(&self) -> usize {
        let n = self.len();
        let mut i = 0;
        while n - 2 * i >= 2 && self.0[i] == self.0[n - 1 - i].inverse() {
            i += 1;
        }
        i
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.len() <= 1 || self.0[0] != self.0[self.len() - 1].inverse()
    }

    /// `self^k` for `k ≥ 0`, built as `w·u^k·w⁻¹` from the cyclic decomposition
    /// so no repeated reduction is needed.
    pub fn pow(&self, k: usize) -> Word {
        if k == 0 || self.is_identity() {
            return Word::identity();
        }
        let p = self.peel_len();
        let n = self.len();
        let core = &self.0[p..n - p];
        let mut v = Vec::with_capacity(2 * p + k * core.len());
        v.extend_from_slice(&self.0[..p]);
        for _ in 0..k {
            v.extend_from_slice(core);
        }
        v.extend_from_slice(&self.0[n - p..]);
        Word(v)
    }

    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Word {
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inverse()));
        Word(letters)
    }

    /// Exponent sum of generator `index` (abelianization coordinate).
    pub fn exponent_sum(&self, index: usize) -> i64 {
        self.0
            .iter()
            .filter(|l| l.index() == index)
            .map(|l| if l.is_inverse() { -1 } else { 1 })
            .sum()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn reduce_cancels_adjacent_inverses() {
        let w = reduce(&f2(), &[1, -1, 2]).unwrap();
        assert_eq!(w.to_string(), "b");
    }

    #[test]
    fn reduce_empty_is_identity() {
        let w = reduce(&f2(), &[]).unwrap();
        assert!(w.is_identity());
        assert_eq!(w.to_string(), "1");
    }

    #[test]
    fn reduce_keeps_reduced_words() {
        let w = reduce(&f2(), &[1, 2, -1]).unwrap();
        assert_eq!(w.to_string(), "abA");
    }

    #[test]
    fn reduce_rejects_bad_index() {
        assert!(matches!(reduce(&f2(), &[3]), Err(Error::Input(_))));
        assert!(matches!(reduce(&f2(), &[0]), Err(Error::Input(_))));
    }

    #[test]
    fn parse_and_display_round_trip() {
        let a = Alphabet::new(30).unwrap();
        for text in ["abA", "1", "x27X28a", "zZ"] {
            let w = Word::parse(&a, text).unwrap();
            let again = Word::parse(&a, &w.to_string()).unwrap();
            assert_eq!(w, again);
        }
        assert!(Word::parse(&a, "zZ").unwrap().is_identity());
        assert!(Word::parse(&f2(), "c").is_err());
    }

    #[test]
    fn letter_order() {
        let a = Letter::generator(1);
        let b = Letter::generator(2);
        assert!(a < a.inverse());
        assert!(a.inverse() < b);
        assert!(b < b.inverse());
    }

    #[test]
    fn power_uses_conjugator_split() {
        let g = Word::parse(&f2(), "abA").unwrap();
        assert_eq!(g.pow(3).to_string(), "abbbA");
        assert_eq!(g.pow(0), Word::identity());
        let h = Word::parse(&f2(), "abAB").unwrap();
        let naive = (0..4).fold(Word::identity(), |acc, _| acc.mul(&h));
        assert_eq!(h.pow(4), naive);
    }

    #[test]
    fn ball_sizes() {
        // 1 + 4 * (3^r - 1) / 2 in rank 2
        let ball = f2().ball(4, usize::MAX).unwrap();
        assert_eq!(ball.len(), 1 + 4 * (81 - 1) / 2);
        assert!(f2().ball(10, 100).is_err());
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(raw in proptest::collection::vec(prop_oneof![-2i32..=-1, 1i32..=2], 0..40)) {
            let w = reduce(&f2(), &raw).unwrap();
            let raw2: Vec<i32> = w.letters().iter().map(|l| l.signed()).collect();
            prop_assert_eq!(reduce(&f2(), &raw2).unwrap(), w);
        }

        #[test]
        fn mul_matches_reduction_of_concatenation(
            x in proptest::collection::vec(prop_oneof![-2i32..=-1, 1i32..=2], 0..20),
            y in proptest::collection::vec(prop_oneof![-2i32..=-1, 1i32..=2], 0..20),
        ) {
            let a = reduce(&f2(), &x).unwrap();
            let b = reduce(&f2(), &y).unwrap();
            let cat: Vec<i32> = x.iter().chain(y.iter()).copied().collect();
            prop_assert_eq!(a.mul(&b), reduce(&f2(), &cat).unwrap());
            prop_assert!(a.mul(&a.inverse()).is_identity());
        }
    }
}
