use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use ordered_float::OrderedFloat;

use super::{Alphabet, Letter, Word};
use crate::error::{Error, Result};

/// A finite weighted subset `S` of the free group, used as a (possibly
/// asymmetric) right word metric `d_S(g, h) = |g⁻¹h|_S`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingSet {
    alphabet: Alphabet,
    elements: Vec<(Word, f64)>,
    symmetric: bool,
}

impl GeneratingSet {
    pub fn new(alphabet: Alphabet, elements: Vec<(Word, f64)>) -> Result<GeneratingSet> {
        if elements.is_empty() {
            return Err(Error::input("generating set is empty"));
        }
        for (w, wt) in &elements {
            alphabet.check(w)?;
            if !(wt.is_finite() && *wt > 0.0) {
                return Err(Error::input(format!("weight of {w} must be a positive real, got {wt}")));
            }
        }
        let symmetric = elements.iter().all(|(w, wt)| {
            let inv = w.inverse();
            elements.iter().any(|(v, vt)| *v == inv && vt == wt)
        });
        Ok(GeneratingSet {
            alphabet,
            elements,
            symmetric,
        })
    }

    /// Standard generators and inverses with unit weights.
    pub fn standard(alphabet: Alphabet) -> GeneratingSet {
        let elements = alphabet
            .letters()
            .into_iter()
            .map(|l| (Word::letter(l), 1.0))
            .collect();
        GeneratingSet::new(alphabet, elements).expect("standard set is valid")
    }

    /// Standard generators and inverses; generator `i` and its inverse both get `weights[i-1]`.
    pub fn weighted_standard(alphabet: Alphabet, weights: &[f64]) -> Result<GeneratingSet> {
        if weights.len() != alphabet.rank() {
            return Err(Error::input(format!(
                "expected {} weights, got {}",
                alphabet.rank(),
                weights.len()
            )));
        }
        let elements = alphabet
            .letters()
            .into_iter()
            .map(|l| (Word::letter(l), weights[l.index() - 1]))
            .collect();
        GeneratingSet::new(alphabet, elements)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn elements(&self) -> &[(Word, f64)] {
        &self.elements
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// If this is exactly the standard letter set with weights depending only
    /// on the generator index, those per-generator weights.
    pub fn standard_weights(&self) -> Option<Vec<f64>> {
        let mut w: Vec<Option<f64>> = vec![None; 2 * self.alphabet.rank()];
        for (word, wt) in &self.elements {
            if word.len() != 1 {
                return None;
            }
            let slot = &mut w[word.letters()[0].order_key() as usize];
            match slot {
                Some(prev) if *prev != *wt => return None,
                _ => *slot = Some(*wt),
            }
        }
        let mut out = Vec::with_capacity(self.alphabet.rank());
        for i in 0..self.alphabet.rank() {
            match (w[2 * i], w[2 * i + 1]) {
                (Some(x), Some(y)) if x == y => out.push(x),
                _ => return None,
            }
        }
        Some(out)
    }

    /// Smallest weight per letter of reduced length, `min w(s)/|s|`.
    pub fn min_cost_per_letter(&self) -> f64 {
        self.elements
            .iter()
            .filter(|(w, _)| !w.is_identity())
            .map(|(w, wt)| wt / w.len() as f64)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest reduced length per unit weight, `max |s|/w(s)`: the Lipschitz
    /// constant of the unit tree distance with respect to `d_S`.
    pub fn max_letters_per_cost(&self) -> f64 {
        self.elements
            .iter()
            .map(|(w, wt)| w.len() as f64 / wt)
            .fold(0.0, f64::max)
    }

    pub fn max_element_len(&self) -> usize {
        self.elements.iter().map(|(w, _)| w.len()).max().unwrap_or(0)
    }

    pub fn max_weight(&self) -> f64 {
        self.elements.iter().map(|(_, w)| *w).fold(0.0, f64::max)
    }
}

/// Budget for word-length searches.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchLimits {
    /// Largest path cost explored.
    pub cost_radius: f64,
    /// Largest number of distinct group elements materialized.
    pub node_budget: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            cost_radius: 32.0,
            node_budget: 2_000_000,
        }
    }
}

fn tree_dist(p: &Word, t: &Word) -> usize {
    p.len() + t.len() - 2 * p.common_prefix_len(t)
}

/// A* over group elements. The heuristic `c·|p⁻¹t|` with `c = min w(s)/|s|` is
/// admissible and consistent, since one step by `s` moves at most `|s|` in the tree.
fn search(
    target: &Word,
    set: &GeneratingSet,
    limits: SearchLimits,
    tube: Option<usize>,
) -> Result<(f64, Vec<usize>)> {
    set.alphabet.check(target)?;
    if target.is_identity() {
        return Ok((0.0, Vec::new()));
    }
    let c = set.min_cost_per_letter();
    if !c.is_finite() {
        return Err(Error::SearchExhausted {
            target: target.to_string(),
            radius: limits.cost_radius,
        });
    }
    let h = |p: &Word| c * tree_dist(p, target) as f64;
    let in_tube = |p: &Word| match tube {
        Some(r) => p.len() - p.common_prefix_len(target) <= r,
        None => true,
    };
    let slack = 1e-9 * limits.cost_radius.max(1.0);

    let mut best: HashMap<Word, (f64, Option<(Word, usize)>)> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(Word::identity(), (0.0, None));
    heap.push(Reverse((OrderedFloat(h(&Word::identity())), OrderedFloat(0.0), Word::identity())));

    while let Some(Reverse((_, OrderedFloat(g), p))) = heap.pop() {
        if best.get(&p).is_some_and(|(b, _)| *b < g) {
            continue;
        }
        if p == *target {
            let mut path = Vec::new();
            let mut cur = p;
            while let Some((_, Some((prev, idx)))) = best.get(&cur) {
                path.push(*idx);
                cur = prev.clone();
            }
            path.reverse();
            return Ok((g, path));
        }
        for (idx, (s, w)) in set.elements.iter().enumerate() {
            if s.is_identity() {
                continue;
            }
            let q = p.mul(s);
            let gq = g + w;
            if gq + h(&q) > limits.cost_radius + slack || !in_tube(&q) {
                continue;
            }
            let improved = match best.entry(q.clone()) {
                Entry::Occupied(mut e) => {
                    if gq < e.get().0 {
                        e.insert((gq, Some((p.clone(), idx))));
                        true
                    } else {
                        false
                    }
                }
                Entry::Vacant(e) => {
                    e.insert((gq, Some((p.clone(), idx))));
                    true
                }
            };
            if improved {
                if best.len() > limits.node_budget {
                    return Err(Error::cap(
                        format!("word length search for {target}"),
                        limits.node_budget,
                    ));
                }
                let f = gq + h(&q);
                heap.push(Reverse((OrderedFloat(f), OrderedFloat(gq), q)));
            }
        }
    }
    Err(Error::SearchExhausted {
        target: target.to_string(),
        radius: limits.cost_radius,
    })
}

/// `|g|_S`: least total weight of a product of elements of `S` equal to `g`.
pub fn word_length(g: &Word, set: &GeneratingSet, limits: SearchLimits) -> Result<f64> {
    search(g, set, limits, None).map(|(c, _)| c)
}

/// `|g|_S` together with the indices into `S` of an optimal product.
pub fn word_length_with_path(
    g: &Word,
    set: &GeneratingSet,
    limits: SearchLimits,
) -> Result<(f64, Vec<usize>)> {
    search(g, set, limits, None)
}

/// Cost of the best product whose partial products stay within tree distance
/// `tube` of the geodesic from the identity to `g`. Always an upper bound for
/// `|g|_S`; equal to it once the tube is wide enough.
pub fn word_length_in_tube(
    g: &Word,
    set: &GeneratingSet,
    tube: usize,
    limits: SearchLimits,
) -> Result<f64> {
    search(g, set, limits, Some(tube)).map(|(c, _)| c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenerationStatus {
    Generated,
    /// Certified: some letter is not a positive product of `S`.
    NotGenerated,
    /// Some letter was not reached within the search limits.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationCheck {
    pub status: GenerationStatus,
    /// For each reached letter: its `S`-length and the indices of a witness product.
    pub witnesses: Vec<(Letter, f64, Vec<usize>)>,
    /// The first letter that is certified unreachable or was not reached.
    pub failing: Option<Letter>,
}

impl GenerationCheck {
    pub fn generated(&self) -> bool {
        self.status == GenerationStatus::Generated
    }
}

/// Whether `S` generates the free group as a semigroup.
///
/// An exponent-sum obstruction certifies failure: if every element of `S` has
/// nonnegative exponent sum in some generator, that generator's inverse is not
/// a positive product (and symmetrically). Otherwise each letter is searched for.
pub fn check_semigroup_generation(set: &GeneratingSet, limits: SearchLimits) -> GenerationCheck {
    let alphabet = set.alphabet;
    for i in 1..=alphabet.rank() {
        let sums: Vec<i64> = set.elements.iter().map(|(w, _)| w.exponent_sum(i)).collect();
        let failing = if sums.iter().all(|&e| e >= 0) {
            Some(Letter::inverse_of_generator(i))
        } else if sums.iter().all(|&e| e <= 0) {
            Some(Letter::generator(i))
        } else {
            None
        };
        if failing.is_some() {
            return GenerationCheck {
                status: GenerationStatus::NotGenerated,
                witnesses: Vec::new(),
                failing,
            };
        }
    }
    let mut witnesses = Vec::new();
    for l in alphabet.letters() {
        match search(&Word::letter(l), set, limits, None) {
            Ok((c, path)) => witnesses.push((l, c, path)),
            Err(_) => {
                return GenerationCheck {
                    status: GenerationStatus::Inconclusive,
                    witnesses,
                    failing: Some(l),
                }
            }
        }
    }
    GenerationCheck {
        status: GenerationStatus::Generated,
        witnesses,
        failing: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(&f2(), s).unwrap()
    }

    fn set(items: &[(&str, f64)]) -> GeneratingSet {
        GeneratingSet::new(f2(), items.iter().map(|(s, x)| (w(s), *x)).collect()).unwrap()
    }

    #[test]
    fn standard_lengths() {
        let s = GeneratingSet::standard(f2());
        assert!(s.is_symmetric());
        assert_eq!(word_length(&w("ab"), &s, SearchLimits::default()).unwrap(), 2.0);
        assert_eq!(word_length(&Word::identity(), &s, SearchLimits::default()).unwrap(), 0.0);
    }

    #[test]
    fn extra_generator_shortens() {
        let s = set(&[("a", 1.0), ("A", 1.0), ("b", 1.0), ("B", 1.0), ("ab", 1.0)]);
        assert!(!s.is_symmetric());
        assert_eq!(word_length(&w("ab"), &s, SearchLimits::default()).unwrap(), 1.0);
        assert_eq!(word_length(&w("BA"), &s, SearchLimits::default()).unwrap(), 2.0);
    }

    #[test]
    fn weighted_path() {
        let s = GeneratingSet::weighted_standard(f2(), &[1.0, 2.0]).unwrap();
        assert_eq!(word_length(&w("bbb"), &s, SearchLimits::default()).unwrap(), 6.0);
        assert_eq!(s.standard_weights(), Some(vec![1.0, 2.0]));
    }

    #[test]
    fn exhausted_radius_is_reported() {
        let s = GeneratingSet::standard(f2());
        let lim = SearchLimits {
            cost_radius: 3.0,
            ..SearchLimits::default()
        };
        assert!(matches!(
            word_length(&w("abab"), &s, lim),
            Err(Error::SearchExhausted { .. })
        ));
    }

    #[test]
    fn witness_path_multiplies_to_target() {
        let s = set(&[("ab", 1.0), ("B", 1.0), ("A", 1.0)]);
        let (c, path) = word_length_with_path(&w("a"), &s, SearchLimits::default()).unwrap();
        assert_eq!(c, 2.0);
        let prod = path
            .iter()
            .fold(Word::identity(), |acc, &i| acc.mul(&s.elements()[i].0));
        assert_eq!(prod, w("a"));
    }

    #[test]
    fn generation_examples() {
        let lim = SearchLimits::default();
        assert!(check_semigroup_generation(&GeneratingSet::standard(f2()), lim).generated());
        let pos = check_semigroup_generation(&set(&[("a", 1.0), ("b", 1.0)]), lim);
        assert_eq!(pos.status, GenerationStatus::NotGenerated);
        assert_eq!(pos.failing, Some(Letter::inverse_of_generator(1)));
        let mixed = check_semigroup_generation(&set(&[("ab", 1.0), ("B", 1.0), ("A", 1.0)]), lim);
        assert!(mixed.generated());
    }

    #[test]
    fn tube_search_is_an_upper_bound() {
        let s = set(&[("a", 1.0), ("A", 1.0), ("b", 1.0), ("B", 1.0), ("ab", 1.0)]);
        let lim = SearchLimits::default();
        for g in f2().ball(4, usize::MAX).unwrap() {
            let exact = word_length(&g, &s, lim).unwrap();
            let tube = word_length_in_tube(&g, &s, 1, lim).unwrap();
            assert!(tube >= exact);
        }
    }

    proptest! {
        #[test]
        fn triangle_inequality(x in proptest::collection::vec(prop_oneof![-2i32..=-1, 1i32..=2], 0..7),
                               y in proptest::collection::vec(prop_oneof![-2i32..=-1, 1i32..=2], 0..7)) {
            let s = set(&[("a", 1.0), ("A", 1.5), ("b", 1.0), ("B", 2.0), ("ab", 1.2)]);
            let lim = SearchLimits::default();
            let g = crate::words::reduce(&f2(), &x).unwrap();
            let h = crate::words::reduce(&f2(), &y).unwrap();
            let lg = word_length(&g, &s, lim).unwrap();
            let lh = word_length(&h, &s, lim).unwrap();
            let lgh = word_length(&g.mul(&h), &s, lim).unwrap();
            prop_assert!(lgh <= lg + lh + 1e-9);
        }

        #[test]
        fn standard_set_gives_reduced_length(x in proptest::collection::vec(prop_oneof![-2i32..=-1, 1i32..=2], 0..12)) {
            let g = crate::words::reduce(&f2(), &x).unwrap();
            let l = word_length(&g, &GeneratingSet::standard(f2()), SearchLimits::default()).unwrap();
            prop_assert_eq!(l, g.len() as f64);
        }
    }
}
