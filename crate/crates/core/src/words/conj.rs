use std::fmt;
use std::hash::{Hash, Hasher};

use super::{Alphabet, Letter, Word};
use crate::error::{Error, Result};

/// Default cap on the number of classes `enumerate_conj_classes` may return.
pub const DEFAULT_CLASS_CAP: usize = 2_000_000;

/// A conjugacy class, stored as its canonical representative: the
/// lexicographically least rotation of a cyclically reduced word.
///
/// `conjugator` is a witness `w` with `w⁻¹·g·w = rep` for the element `g` the
/// class was computed from. Equality and hashing only look at `rep`.
#[derive(Clone, Debug)]
pub struct ConjClass {
    rep: Word,
    conjugator: Word,
}

impl ConjClass {
    /// Class of an already canonical representative.
    pub(crate) fn canonical(rep: Word) -> ConjClass {
        ConjClass {
            rep,
            conjugator: Word::identity(),
        }
    }

    pub fn rep(&self) -> &Word {
        &self.rep
    }

    pub fn conjugator(&self) -> &Word {
        &self.conjugator
    }

    /// Cyclically reduced length, i.e. the translation length in the unit tree.
    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.rep.is_identity()
    }
}

impl PartialEq for ConjClass {
    fn eq(&self, other: &Self) -> bool {
        self.rep == other.rep
    }
}

impl Eq for ConjClass {}

impl Hash for ConjClass {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rep.hash(state);
    }
}

impl fmt::Display for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rep)
    }
}

/// Start index of the least rotation (smallest such index for periodic input).
pub fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n <= 1 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = &s[(i + k) % n];
        let b = &s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// Cyclic reduction plus canonical rotation, with a conjugator witness.
pub fn cyclic_reduce(g: &Word) -> ConjClass {
    let letters = g.letters();
    let p = g.peel_len();
    let core = &letters[p..letters.len() - p];
    let r = least_rotation(core);
    let mut rep = Vec::with_capacity(core.len());
    rep.extend_from_slice(&core[r..]);
    rep.extend_from_slice(&core[..r]);
    // peel and core prefix concatenate without cancellation because g is reduced
    let mut conj = Vec::with_capacity(p + r);
    conj.extend_from_slice(&letters[..p]);
    conj.extend_from_slice(&core[..r]);
    ConjClass {
        rep: Word::from_reduced_unchecked(rep),
        conjugator: Word::from_reduced_unchecked(conj),
    }
}

fn is_canonical(w: &[Letter]) -> bool {
    let r = least_rotation(w);
    r == 0 || w[r..].iter().chain(w[..r].iter()).eq(w.iter())
}

/// Every non-trivial conjugacy class with cyclically reduced length at most
/// `max_len`, each once, ordered by length and then lexicographically.
pub fn enumerate_conj_classes(
    alphabet: &Alphabet,
    max_len: usize,
    cap: usize,
) -> Result<Vec<ConjClass>> {
    if max_len == 0 {
        return Err(Error::input("max_len must be at least 1"));
    }
    let letters = alphabet.letters();
    let mut out = Vec::new();
    let mut buf: Vec<Letter> = Vec::with_capacity(max_len);
    for len in 1..=max_len {
        for &first in &letters {
            buf.clear();
            buf.push(first);
            extend(&letters, len, &mut buf, &mut out, cap)?;
        }
    }
    Ok(out)
}

fn extend(
    letters: &[Letter],
    len: usize,
    buf: &mut Vec<Letter>,
    out: &mut Vec<ConjClass>,
    cap: usize,
) -> Result<()> {
    if buf.len() == len {
        let first = buf[0];
        let last = buf[len - 1];
        if len >= 2 && last == first.inverse() {
            return Ok(());
        }
        if is_canonical(buf) {
            if out.len() >= cap {
                return Err(Error::cap("conjugacy class enumeration", cap));
            }
            out.push(ConjClass::canonical(Word::from_reduced_unchecked(buf.clone())));
        }
        return Ok(());
    }
    let first = buf[0];
    let prev = *buf.last().expect("buffer starts non-empty");
    for &l in letters {
        // a canonical word starts with its smallest letter
        if l < first || l == prev.inverse() {
            continue;
        }
        buf.push(l);
        extend(letters, len, buf, out, cap)?;
        buf.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn f2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(&f2(), s).unwrap()
    }

    #[test]
    fn single_peel() {
        let c = cyclic_reduce(&w("abA"));
        assert_eq!(c.rep().to_string(), "b");
        assert_eq!(c.conjugator().to_string(), "a");
    }

    #[test]
    fn commutator_is_already_canonical() {
        let c = cyclic_reduce(&w("abAB"));
        assert_eq!(c.rep().to_string(), "abAB");
        assert!(c.conjugator().is_identity());
        // a rotation of it lands on the same class
        let c2 = cyclic_reduce(&w("bABa"));
        assert_eq!(c, c2);
        let g = w("bABa");
        let back = c2.conjugator().inverse().mul(&g).mul(c2.conjugator());
        assert_eq!(&back, c2.rep());
    }

    #[test]
    fn identity_class_is_empty() {
        let c = cyclic_reduce(&Word::identity());
        assert!(c.is_trivial());
    }

    #[test]
    fn enumeration_small_cases() {
        let z = Alphabet::new(1).unwrap();
        let cls = enumerate_conj_classes(&z, 2, usize::MAX).unwrap();
        let names: Vec<String> = cls.iter().map(|c| c.rep().to_string()).collect();
        assert_eq!(names, vec!["a", "A", "aa", "AA"]);
        assert_eq!(enumerate_conj_classes(&f2(), 1, usize::MAX).unwrap().len(), 4);
        assert_eq!(enumerate_conj_classes(&f2(), 2, usize::MAX).unwrap().len(), 12);
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(
            enumerate_conj_classes(&f2(), 6, 10),
            Err(Error::ResourceCap { .. })
        ));
    }

    /// Brute force: every reduced word, cyclically reduce, dedupe.
    fn brute_force_count(max_len: usize) -> usize {
        let ball = f2().ball(max_len, usize::MAX).unwrap();
        let set: HashSet<Word> = ball
            .iter()
            .map(|g| cyclic_reduce(g).rep().clone())
            .filter(|r| !r.is_identity() && r.len() <= max_len)
            .collect();
        set.len()
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for l in 1..=6 {
            let fast = enumerate_conj_classes(&f2(), l, usize::MAX).unwrap();
            assert_eq!(fast.len(), brute_force_count(l), "L = {l}");
            let uniq: HashSet<&ConjClass> = fast.iter().collect();
            assert_eq!(uniq.len(), fast.len());
            assert!(fast.iter().all(|c| cyclic_reduce(c.rep()) == *c));
        }
    }

    #[test]
    fn least_rotation_periodic() {
        assert_eq!(least_rotation(&[2, 1, 2, 1]), 1);
        assert_eq!(least_rotation(&[1, 1, 1]), 0);
        assert_eq!(least_rotation(&[3, 1, 2]), 1);
    }

    fn arb_word(max: usize) -> impl Strategy<Value = Word> {
        proptest::collection::vec(prop_oneof![-2i32..=-1, 1i32..=2], 0..max)
            .prop_map(|raw| super::super::reduce(&f2(), &raw).unwrap())
    }

    proptest! {
        #[test]
        fn conjugation_invariance(g in arb_word(16), h in arb_word(10)) {
            let conj = h.mul(&g).mul(&h.inverse());
            prop_assert_eq!(cyclic_reduce(&conj), cyclic_reduce(&g));
        }

        #[test]
        fn witness_conjugates_to_rep(g in arb_word(20)) {
            let c = cyclic_reduce(&g);
            let back = c.conjugator().inverse().mul(&g).mul(c.conjugator());
            prop_assert_eq!(&back, c.rep());
        }

        #[test]
        fn power_homogeneity(g in arb_word(12), k in 1usize..6) {
            let r = cyclic_reduce(&g);
            let rk = cyclic_reduce(&r.rep().pow(k));
            prop_assert_eq!(rk.len(), k * r.len());
        }
    }
}
