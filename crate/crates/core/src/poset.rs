//! Finite posets over explicit element lists.
//!
//! A [`FinitePoset`] stores the full comparability relation as bitset rows,
//! which keeps the core operations — transitive reduction, Möbius function,
//! meets and joins, intervals — simple word-parallel loops.  Construction
//! validates that the supplied comparison really is a partial order and
//! reports a witness when it is not.
//!
//! The module also provides the two orders on shuffle words: the graded
//! shuffle order and the (ungraded) bubble order.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::word::{
    enumerate_words, enumerate_words_unbounded, leq_bub, leq_shuf, Params, ShuffleWord,
    ENUMERATE_CAP,
};

fn bits_new(n: usize) -> Vec<u64> {
    vec![0u64; n.div_ceil(64)]
}

fn bits_get(b: &[u64], i: usize) -> bool {
    b[i / 64] & (1 << (i % 64)) != 0
}

fn bits_set(b: &mut [u64], i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn bits_count(b: &[u64]) -> usize {
    b.iter().map(|w| w.count_ones() as usize).sum()
}

fn bits_is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn bits_ones(b: &[u64]) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        core::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            }
        })
    })
}

/// Outcome of [`FinitePoset::check_lattice`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeCheck {
    Lattice,
    /// The two elements have no greatest common lower bound.
    NoMeet(usize, usize),
    /// The two elements have no least common upper bound.
    NoJoin(usize, usize),
}

/// A finite poset on an indexed element list.
#[derive(Debug, Clone)]
pub struct FinitePoset<E> {
    elements: Vec<E>,
    /// `up[i]` has bit `j` set iff `e_i <= e_j`.
    up: Vec<Vec<u64>>,
    /// `down[i]` has bit `j` set iff `e_j <= e_i`.
    down: Vec<Vec<u64>>,
    /// Indices sorted by down-set size: a linear extension.
    topo: Vec<usize>,
    /// Position of each index inside `topo`.
    topo_pos: Vec<usize>,
}

/// Validates `leq` as a partial order on `elements` and builds the poset.
pub fn build_poset<E: fmt::Display>(
    elements: Vec<E>,
    leq: impl Fn(&E, &E) -> bool,
) -> Result<FinitePoset<E>> {
    build_poset_indexed(elements, |els, i, j| leq(&els[i], &els[j]))
}

/// Like [`build_poset`] but the comparison sees element indices, so callers
/// can consult precomputed per-element data.
pub fn build_poset_indexed<E: fmt::Display>(
    elements: Vec<E>,
    leq: impl Fn(&[E], usize, usize) -> bool,
) -> Result<FinitePoset<E>> {
    let n = elements.len();
    let mut up = vec![bits_new(n); n];
    let mut down = vec![bits_new(n); n];
    for (i, up_row) in up.iter_mut().enumerate() {
        for (j, down_row) in down.iter_mut().enumerate() {
            if leq(&elements, i, j) {
                bits_set(up_row, j);
                bits_set(down_row, i);
            }
        }
    }
    for i in 0..n {
        if !bits_get(&up[i], i) {
            return Err(Error::NotAPartialOrder(format!(
                "not reflexive at {}",
                elements[i]
            )));
        }
        for j in bits_ones(&up[i]) {
            if j != i && bits_get(&up[j], i) {
                return Err(Error::NotAPartialOrder(format!(
                    "antisymmetry fails on {} and {}",
                    elements[i], elements[j]
                )));
            }
            if !bits_is_subset(&up[j], &up[i]) {
                let k = bits_ones(&up[j])
                    .find(|&k| !bits_get(&up[i], k))
                    .expect("subset check failed, so a stray bit exists");
                return Err(Error::NotAPartialOrder(format!(
                    "transitivity fails: {} <= {} <= {} but not {} <= {}",
                    elements[i], elements[j], elements[k], elements[i], elements[k]
                )));
            }
        }
    }
    let mut topo: Vec<usize> = (0..n).collect();
    topo.sort_by_key(|&i| (bits_count(&down[i]), i));
    let mut topo_pos = vec![0; n];
    for (pos, &i) in topo.iter().enumerate() {
        topo_pos[i] = pos;
    }
    Ok(FinitePoset {
        elements,
        up,
        down,
        topo,
        topo_pos,
    })
}

impl<E> FinitePoset<E> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &E {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        bits_get(&self.up[i], j)
    }

    /// Indices in `[i, j]`, in linear-extension order.
    pub fn interval(&self, i: usize, j: usize) -> Vec<usize> {
        let mut out: Vec<usize> = bits_ones(&self.up[i])
            .filter(|&k| bits_get(&self.down[j], k))
            .collect();
        out.sort_by_key(|&k| self.topo_pos[k]);
        out
    }

    /// All elements below `i`, inclusive.
    pub fn down_set(&self, i: usize) -> Vec<usize> {
        bits_ones(&self.down[i]).collect()
    }

    /// All elements above `i`, inclusive.
    pub fn up_set(&self, i: usize) -> Vec<usize> {
        bits_ones(&self.up[i]).collect()
    }

    /// The cover relations `(lower, upper)` of the transitive reduction,
    /// sorted by index pair.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in bits_ones(&self.up[i]) {
                if j == i {
                    continue;
                }
                // A cover has nothing strictly between: the interval is {i, j}.
                let between = self.up[i]
                    .iter()
                    .zip(&self.down[j])
                    .map(|(a, b)| (a & b).count_ones() as usize)
                    .sum::<usize>();
                if between == 2 {
                    out.push((i, j));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// A linear extension chosen greedily: at each step the `seed mod k`-th
    /// of the `k` currently minimal elements is emitted, and the seed is
    /// advanced by a linear congruential step.
    pub fn linear_extension(&self, seed: u64) -> Vec<usize> {
        let n = self.len();
        let mut missing_below: Vec<usize> = (0..n).map(|i| bits_count(&self.down[i]) - 1).collect();
        let mut eligible: BTreeSet<usize> = (0..n).filter(|&i| missing_below[i] == 0).collect();
        let mut state = seed;
        let mut out = Vec::with_capacity(n);
        while !eligible.is_empty() {
            let pick = (state % eligible.len() as u64) as usize;
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let &chosen = eligible.iter().nth(pick).expect("nonempty");
            eligible.remove(&chosen);
            out.push(chosen);
            for j in bits_ones(&self.up[chosen]) {
                if j != chosen {
                    missing_below[j] -= 1;
                    if missing_below[j] == 0 {
                        eligible.insert(j);
                    }
                }
            }
        }
        debug_assert_eq!(out.len(), n, "comparison must be acyclic");
        out
    }

    /// Greatest lower bound, if it exists.
    pub fn meet(&self, i: usize, j: usize) -> Option<usize> {
        let commons: Vec<u64> = self.down[i]
            .iter()
            .zip(&self.down[j])
            .map(|(a, b)| a & b)
            .collect();
        let top = bits_ones(&commons).max_by_key(|&k| self.topo_pos[k])?;
        bits_is_subset(&commons, &self.down[top]).then_some(top)
    }

    /// Least upper bound, if it exists.
    pub fn join(&self, i: usize, j: usize) -> Option<usize> {
        let commons: Vec<u64> = self.up[i]
            .iter()
            .zip(&self.up[j])
            .map(|(a, b)| a & b)
            .collect();
        let bottom = bits_ones(&commons).min_by_key(|&k| self.topo_pos[k])?;
        bits_is_subset(&commons, &self.up[bottom]).then_some(bottom)
    }

    /// Checks that every pair has a meet and a join, reporting the first
    /// failing pair otherwise.
    pub fn check_lattice(&self) -> LatticeCheck {
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.meet(i, j).is_none() {
                    return LatticeCheck::NoMeet(i, j);
                }
                if self.join(i, j).is_none() {
                    return LatticeCheck::NoJoin(i, j);
                }
            }
        }
        LatticeCheck::Lattice
    }

    /// `(bottom, top)` if the poset has unique minimum and maximum.
    pub fn bounds(&self) -> Result<(usize, usize)> {
        if self.is_empty() {
            return Err(Error::NotBounded("empty poset"));
        }
        let n = self.len();
        let mut minimals = (0..n).filter(|&i| bits_count(&self.down[i]) == 1);
        let bottom = minimals.next().expect("nonempty");
        if minimals.next().is_some() {
            return Err(Error::NotBounded("no unique minimal element"));
        }
        let mut maximals = (0..n).filter(|&i| bits_count(&self.up[i]) == 1);
        let top = maximals.next().expect("nonempty");
        if maximals.next().is_some() {
            return Err(Error::NotBounded("no unique maximal element"));
        }
        Ok((bottom, top))
    }

    /// Edge counts of the shortest and longest maximal chains from bottom to
    /// top; a bounded poset is graded exactly when these agree everywhere,
    /// but the extremes already witness non-gradedness when they differ.
    pub fn chain_length_extremes(&self) -> Result<(usize, usize)> {
        let (bottom, top) = self.bounds()?;
        let covers = self.covers();
        let mut lower_covers = vec![Vec::new(); self.len()];
        for (i, j) in covers {
            lower_covers[j].push(i);
        }
        let mut shortest = vec![usize::MAX; self.len()];
        let mut longest = vec![0usize; self.len()];
        shortest[bottom] = 0;
        for &i in &self.topo {
            for &c in &lower_covers[i] {
                shortest[i] = shortest[i].min(shortest[c].saturating_add(1));
                longest[i] = longest[i].max(longest[c] + 1);
            }
        }
        Ok((shortest[top], longest[top]))
    }

    /// Möbius function values `mu(i, j)` for all `j`, as checked machine
    /// integers; errors out on overflow instead of wrapping.
    pub fn mobius_row(&self, i: usize) -> Result<Vec<i64>> {
        let n = self.len();
        let mut row = vec![0i64; n];
        row[i] = 1;
        for &j in &self.topo {
            if j == i || !self.leq(i, j) {
                continue;
            }
            let mut acc: i64 = 0;
            for a in self.up[i]
                .iter()
                .zip(&self.down[j])
                .enumerate()
                .flat_map(|(wi, (ua, ub))| {
                    let mut w = ua & ub;
                    core::iter::from_fn(move || {
                        if w == 0 {
                            None
                        } else {
                            let bit = w.trailing_zeros() as usize;
                            w &= w - 1;
                            Some(wi * 64 + bit)
                        }
                    })
                })
            {
                if a != j {
                    acc = acc
                        .checked_add(row[a])
                        .ok_or(Error::Overflow("mobius row"))?;
                }
            }
            row[j] = acc.checked_neg().ok_or(Error::Overflow("mobius row"))?;
        }
        Ok(row)
    }

    /// Möbius row with arbitrary-precision values.
    pub fn mobius_row_big(&self, i: usize) -> Vec<BigInt> {
        let n = self.len();
        let mut row = vec![BigInt::zero(); n];
        row[i] = BigInt::from(1);
        for &j in &self.topo {
            if j == i || !self.leq(i, j) {
                continue;
            }
            let mut acc = BigInt::zero();
            for k in bits_ones(&self.up[i]) {
                if k != j && bits_get(&self.down[j], k) {
                    acc += &row[k];
                }
            }
            row[j] = -acc;
        }
        row
    }

    /// `mu(i, j)`; zero when the elements are incomparable.
    pub fn mobius(&self, i: usize, j: usize) -> BigInt {
        if !self.leq(i, j) {
            return BigInt::zero();
        }
        self.mobius_row_big(i).swap_remove(j)
    }

    /// Checks that `map` is an order-reversing bijection onto `other`.
    pub fn check_anti_isomorphism<F>(&self, other: &FinitePoset<F>, map: &[usize]) -> Result<()> {
        self.check_map(other, map, true)
    }

    /// Checks that `map` is an order-preserving bijection onto `other`.
    pub fn check_isomorphism<F>(&self, other: &FinitePoset<F>, map: &[usize]) -> Result<()> {
        self.check_map(other, map, false)
    }

    fn check_map<F>(&self, other: &FinitePoset<F>, map: &[usize], reverse: bool) -> Result<()> {
        let n = self.len();
        if map.len() != n || other.len() != n {
            return Err(Error::NotABijection(format!(
                "size mismatch: {} vs {}",
                n,
                other.len()
            )));
        }
        let mut seen = bits_new(n);
        for &im in map {
            if im >= n || bits_get(&seen, im) {
                return Err(Error::NotABijection(format!("image {im} repeats")));
            }
            bits_set(&mut seen, im);
        }
        for i in 0..n {
            for j in 0..n {
                let there = if reverse {
                    other.leq(map[j], map[i])
                } else {
                    other.leq(map[i], map[j])
                };
                if self.leq(i, j) != there {
                    return Err(Error::NotABijection(format!(
                        "order not {} on pair ({i}, {j})",
                        if reverse { "reversed" } else { "preserved" }
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Cap on `m + n` for building a full order on `Shuf(m, n)` in memory.
pub const POSET_CAP: usize = 10;

fn check_poset_cap(p: Params, what: &'static str) -> Result<()> {
    if p.r() > POSET_CAP {
        return Err(Error::CapExceeded {
            what,
            limit: POSET_CAP,
            got: p.r(),
        });
    }
    Ok(())
}

fn word_poset(
    p: Params,
    words: Vec<ShuffleWord>,
    leq: fn(&ShuffleWord, &ShuffleWord) -> bool,
) -> Result<FinitePoset<ShuffleWord>> {
    // Support masks prune most pairs before the full comparison runs.
    let keys: Vec<(u64, u64)> = words
        .iter()
        .map(|w| {
            let xm = w.x_indices().fold(0u64, |m, i| m | (1 << (i - 1)));
            let ym = w.y_indices().fold(0u64, |m, i| m | (1 << (i - 1)));
            (xm, ym)
        })
        .collect();
    let _ = p;
    build_poset_indexed(words, move |els, i, j| {
        let (ix, iy) = keys[i];
        let (jx, jy) = keys[j];
        jx & !ix == 0 && iy & !jy == 0 && leq(&els[i], &els[j])
    })
}

/// The bubble order on all of `Shuf(m, n)`.
pub fn bub_poset(p: Params) -> Result<FinitePoset<ShuffleWord>> {
    check_poset_cap(p, "bub_poset")?;
    word_poset(p, enumerate_words(p)?, leq_bub)
}

/// [`bub_poset`] without the resource cap.
pub fn bub_poset_unbounded(p: Params) -> Result<FinitePoset<ShuffleWord>> {
    if p.r() > ENUMERATE_CAP {
        return Err(Error::CapExceeded {
            what: "enumerate_words",
            limit: ENUMERATE_CAP,
            got: p.r(),
        });
    }
    word_poset(p, enumerate_words_unbounded(p), leq_bub)
}

/// The shuffle order on all of `Shuf(m, n)`.
pub fn shuf_poset(p: Params) -> Result<FinitePoset<ShuffleWord>> {
    check_poset_cap(p, "shuf_poset")?;
    word_poset(p, enumerate_words(p)?, leq_shuf)
}

/// [`shuf_poset`] without the resource cap.
pub fn shuf_poset_unbounded(p: Params) -> Result<FinitePoset<ShuffleWord>> {
    if p.r() > ENUMERATE_CAP {
        return Err(Error::CapExceeded {
            what: "enumerate_words",
            limit: ENUMERATE_CAP,
            got: p.r(),
        });
    }
    word_poset(p, enumerate_words_unbounded(p), leq_shuf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{bub_upper_covers, parse_word, shuf_rank};
    use alloc::string::ToString;

    fn idx(poset: &FinitePoset<ShuffleWord>, s: &str) -> usize {
        let w = parse_word(s).unwrap();
        poset
            .elements()
            .iter()
            .position(|e| *e == w)
            .expect("word in poset")
    }

    #[test]
    fn rejects_non_posets() {
        // Divisibility with a lie at (2, 3) breaks transitivity: 2 <= 3 <= 9
        // but 2 does not divide 9.
        let err =
            build_poset(vec![2u32, 3, 9], |a, b| b % a == 0 || (*a, *b) == (2, 3)).unwrap_err();
        assert!(matches!(err, Error::NotAPartialOrder(_)));
        // All-true relation violates antisymmetry.
        let err = build_poset(vec![1u32, 2], |_, _| true).unwrap_err();
        assert!(matches!(err, Error::NotAPartialOrder(_)));
    }

    #[test]
    fn pentagon_structure() {
        let p = Params::new(1, 1);
        let bub = bub_poset(p).unwrap();
        assert_eq!(bub.len(), 5);
        assert_eq!(bub.covers().len(), 5);
        assert_eq!(bub.check_lattice(), LatticeCheck::Lattice);
        let (bottom, top) = bub.bounds().unwrap();
        assert_eq!(bub.element(bottom).to_string(), "x1");
        assert_eq!(bub.element(top).to_string(), "y1");
        // One maximal chain has two edges, the other three: not graded.
        assert_eq!(bub.chain_length_extremes().unwrap(), (2, 3));
        assert_eq!(bub.mobius(bottom, top), BigInt::from(1));
    }

    #[test]
    fn shuffle_order_mobius_and_grading() {
        let p = Params::new(1, 1);
        let shuf = shuf_poset(p).unwrap();
        let (bottom, top) = shuf.bounds().unwrap();
        assert_eq!(shuf.mobius(bottom, top), BigInt::from(2));
        assert_eq!(shuf.chain_length_extremes().unwrap(), (2, 2));
        for (i, j) in shuf.covers() {
            assert_eq!(
                shuf_rank(shuf.element(j), p),
                shuf_rank(shuf.element(i), p) + 1
            );
        }
    }

    #[test]
    fn mobius_row_variants_agree() {
        let p = Params::new(2, 2);
        let shuf = shuf_poset(p).unwrap();
        for i in [0, 3, 7] {
            let small = shuf.mobius_row(i).unwrap();
            let big = shuf.mobius_row_big(i);
            for (a, b) in small.iter().zip(&big) {
                assert_eq!(BigInt::from(*a), *b);
            }
        }
    }

    #[test]
    fn mobius_rows_sum_to_zero() {
        // For any j > i the interval [i, j] sums to zero by definition.
        let p = Params::new(2, 1);
        for poset in [bub_poset(p).unwrap(), shuf_poset(p).unwrap()] {
            for i in 0..poset.len() {
                let row = poset.mobius_row_big(i);
                for j in 0..poset.len() {
                    if i != j && poset.leq(i, j) {
                        let total: BigInt =
                            poset.interval(i, j).iter().map(|&k| row[k].clone()).sum();
                        assert!(total.is_zero(), "interval [{i}, {j}] sums to {total}");
                    }
                }
            }
        }
    }

    #[test]
    fn covers_match_word_level_moves() {
        let p = Params::new(2, 2);
        let bub = bub_poset(p).unwrap();
        let mut expected = BTreeSet::new();
        for (i, word) in bub.elements().iter().enumerate() {
            for (v, _) in bub_upper_covers(word, p) {
                let j = bub
                    .elements()
                    .iter()
                    .position(|e| *e == v)
                    .expect("cover stays in Shuf");
                expected.insert((i, j));
            }
        }
        let got: BTreeSet<_> = bub.covers().into_iter().collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn both_orders_are_lattices_small() {
        for (m, n) in [(1, 1), (2, 1), (2, 2)] {
            let p = Params::new(m, n);
            assert_eq!(bub_poset(p).unwrap().check_lattice(), LatticeCheck::Lattice);
            assert_eq!(
                shuf_poset(p).unwrap().check_lattice(),
                LatticeCheck::Lattice
            );
        }
    }

    #[test]
    fn pentagon_meets_and_joins() {
        let p = Params::new(1, 1);
        let bub = bub_poset(p).unwrap();
        let (e, xy, yx) = (idx(&bub, "-"), idx(&bub, "x1 y1"), idx(&bub, "y1 x1"));
        assert_eq!(bub.meet(e, xy), Some(idx(&bub, "x1")));
        assert_eq!(bub.join(e, xy), Some(idx(&bub, "y1")));
        assert_eq!(bub.meet(xy, yx), Some(xy));
        assert_eq!(bub.join(e, yx), Some(idx(&bub, "y1")));
    }

    #[test]
    fn linear_extensions_are_valid_and_seeded() {
        let p = Params::new(2, 1);
        let bub = bub_poset(p).unwrap();
        let mut distinct = BTreeSet::new();
        for seed in 0..8 {
            let ext = bub.linear_extension(seed);
            assert_eq!(ext.len(), bub.len());
            let mut pos = vec![0; bub.len()];
            for (k, &i) in ext.iter().enumerate() {
                pos[i] = k;
            }
            for i in 0..bub.len() {
                for j in 0..bub.len() {
                    if i != j && bub.leq(i, j) {
                        assert!(pos[i] < pos[j], "seed {seed} violates {i} <= {j}");
                    }
                }
            }
            distinct.insert(ext);
        }
        assert!(distinct.len() > 1, "seeds never change the extension");
    }

    #[test]
    fn interval_and_sets() {
        let p = Params::new(1, 1);
        let bub = bub_poset(p).unwrap();
        let (bottom, top) = bub.bounds().unwrap();
        assert_eq!(bub.interval(bottom, top).len(), 5);
        let xy = idx(&bub, "x1 y1");
        assert_eq!(bub.interval(idx(&bub, "x1"), xy).len(), 2);
        assert_eq!(bub.down_set(xy).len(), 2);
        assert_eq!(bub.up_set(xy).len(), 3);
    }

    #[test]
    fn dualize_is_an_anti_isomorphism() {
        let p = Params::new(2, 1);
        let bub = bub_poset(p).unwrap();
        let dual = bub_poset(p.swapped()).unwrap();
        let map: Vec<usize> = bub
            .elements()
            .iter()
            .map(|w| {
                let img = crate::word::dualize(w);
                dual.elements()
                    .iter()
                    .position(|e| *e == img)
                    .expect("dual word exists")
            })
            .collect();
        bub.check_anti_isomorphism(&dual, &map).unwrap();
        assert!(bub.check_isomorphism(&dual, &map).is_err());
    }

    #[test]
    fn poset_cap_applies() {
        assert!(matches!(
            bub_poset(Params::new(6, 5)),
            Err(Error::CapExceeded { .. })
        ));
        assert!(bub_poset_unbounded(Params::new(6, 5)).is_ok());
    }
}
