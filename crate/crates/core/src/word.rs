//! Shuffle words and their two partial orders.
//!
//! A word over the letters `x1 < … < xm` and `y1 < … < yn` is a *shuffle
//! word* when no letter repeats and both the x-letters and the y-letters
//! appear in increasing order.  `Shuf(m, n)` denotes the set of all shuffle
//! words for the parameters `(m, n)`, including the empty word.
//!
//! Two partial orders on `Shuf(m, n)` are generated by letter moves:
//!
//! * the *shuffle order* `leq_shuf`, generated by deleting an x-letter or
//!   inserting a y-letter anywhere;
//! * the *bubble order* `leq_bub`, generated by the restricted moves that
//!   also appear as covers: swapping an adjacent `x y` pair to `y x`
//!   (a transposition) and the *right indels* — deleting an x-letter that is
//!   followed by another x-letter or sits at the end of the word, and the
//!   mirror-image y-insertions.
//!
//! Both orders admit closed comparison tests on subwords and inversion sets,
//! which this module implements directly; the generating-move descriptions
//! are kept as oracles in the test suite.  Each cover of the bubble order
//! carries a label — a loop `x_s`, a loop `y_t`, or an edge `{x_s, y_t}` —
//! and the set of labels below a fixed word is a face of the noncrossing
//! matching complex (see [`crate::complex`]).

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::complex::{CVertex, Face};
use crate::error::{Error, Result};

/// Ambient parameters: words draw their letters from `x1..xm` and `y1..yn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Params {
    pub m: usize,
    pub n: usize,
}

impl Params {
    pub const fn new(m: usize, n: usize) -> Self {
        Params { m, n }
    }

    /// Total number of available letters.
    pub const fn r(&self) -> usize {
        self.m + self.n
    }

    /// Parameters with the roles of the two alphabets exchanged.
    pub const fn swapped(&self) -> Self {
        Params {
            m: self.n,
            n: self.m,
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

/// Which alphabet a letter belongs to.  `X` sorts before `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LetterKind {
    X,
    Y,
}

/// One letter `x{index}` or `y{index}`; indices start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub kind: LetterKind,
    pub index: usize,
}

impl Letter {
    pub const fn x(index: usize) -> Self {
        Letter {
            kind: LetterKind::X,
            index,
        }
    }

    pub const fn y(index: usize) -> Self {
        Letter {
            kind: LetterKind::Y,
            index,
        }
    }

    pub const fn is_x(&self) -> bool {
        matches!(self.kind, LetterKind::X)
    }

    pub const fn is_y(&self) -> bool {
        matches!(self.kind, LetterKind::Y)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            LetterKind::X => 'x',
            LetterKind::Y => 'y',
        };
        write!(f, "{}{}", k, self.index)
    }
}

/// Parses `x3` or `y12`.
pub fn parse_letter(s: &str) -> Result<Letter> {
    let (kind, digits) = match s.as_bytes().first() {
        Some(b'x') => (LetterKind::X, &s[1..]),
        Some(b'y') => (LetterKind::Y, &s[1..]),
        _ => {
            return Err(Error::Parse(format!(
                "letter must start with x or y: {s:?}"
            )))
        }
    };
    let index: usize = digits
        .parse()
        .map_err(|_| Error::Parse(format!("bad letter index in {s:?}")))?;
    if index == 0 {
        return Err(Error::Parse(format!("letter indices start at 1: {s:?}")));
    }
    Ok(Letter { kind, index })
}

/// A duplicate-free word whose x-letters and y-letters each increase.
///
/// Equality and hashing are by letter sequence.  The derived `Ord` is the
/// plain lexicographic order on letter sequences and is only meant for set
/// storage; the canonical enumeration order of `Shuf(m, n)` is the one
/// produced by [`enumerate_words`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ShuffleWord {
    letters: Vec<Letter>,
}

impl ShuffleWord {
    /// Validates the structural invariants (each side strictly increasing).
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        let mut last_x = 0usize;
        let mut last_y = 0usize;
        for l in &letters {
            if l.index == 0 {
                return Err(Error::InvalidWord(format!("index 0 in {l}")));
            }
            let last = match l.kind {
                LetterKind::X => &mut last_x,
                LetterKind::Y => &mut last_y,
            };
            if l.index <= *last {
                return Err(Error::InvalidWord(format!(
                    "letter {l} does not increase its side"
                )));
            }
            *last = l.index;
        }
        Ok(ShuffleWord { letters })
    }

    /// Internal constructor for sequences already known to be valid.
    fn from_valid(letters: Vec<Letter>) -> Self {
        debug_assert!(ShuffleWord::new(letters.clone()).is_ok());
        ShuffleWord { letters }
    }

    pub fn empty() -> Self {
        ShuffleWord::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Checks the letter indices against the ambient parameters.
    pub fn validate(&self, p: Params) -> Result<()> {
        for l in &self.letters {
            let bound = match l.kind {
                LetterKind::X => p.m,
                LetterKind::Y => p.n,
            };
            if l.index > bound {
                return Err(Error::InvalidWord(format!(
                    "letter {l} out of range for parameters {p}"
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, l: Letter) -> bool {
        // Each side increases, so binary search within the side would work;
        // words are short and a scan is clearer.
        self.letters.contains(&l)
    }

    pub fn position_of(&self, l: Letter) -> Option<usize> {
        self.letters.iter().position(|&c| c == l)
    }

    pub fn x_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters.iter().filter(|l| l.is_x()).map(|l| l.index)
    }

    pub fn y_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters.iter().filter(|l| l.is_y()).map(|l| l.index)
    }

    pub fn x_count(&self) -> usize {
        self.x_indices().count()
    }

    pub fn y_count(&self) -> usize {
        self.y_indices().count()
    }

    fn x_mask(&self) -> u128 {
        self.x_indices().fold(0u128, |m, i| m | (1 << (i - 1)))
    }

    fn y_mask(&self) -> u128 {
        self.y_indices().fold(0u128, |m, i| m | (1 << (i - 1)))
    }

    /// Support bitmask used by the canonical enumeration order: `x_i` is bit
    /// `i - 1` and `y_j` is bit `m + j - 1`.
    pub fn support_mask(&self, p: Params) -> u64 {
        let mut mask = 0u64;
        for l in &self.letters {
            let bit = match l.kind {
                LetterKind::X => l.index - 1,
                LetterKind::Y => p.m + l.index - 1,
            };
            mask |= 1 << bit;
        }
        mask
    }
}

impl fmt::Display for ShuffleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "-");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parses the output of `Display`: space-separated letters, `-` when empty.
pub fn parse_word(s: &str) -> Result<ShuffleWord> {
    let s = s.trim();
    if s == "-" || s.is_empty() {
        return Ok(ShuffleWord::empty());
    }
    let letters = s
        .split_whitespace()
        .map(parse_letter)
        .collect::<Result<Vec<_>>>()?;
    ShuffleWord::new(letters)
}

/// Cap on `m + n` for full enumeration.
pub const ENUMERATE_CAP: usize = 16;

/// All of `Shuf(m, n)` in canonical order: by support bitmask, then by the
/// lexicographically ordered inversion set.
pub fn enumerate_words(p: Params) -> Result<Vec<ShuffleWord>> {
    if p.r() > ENUMERATE_CAP {
        return Err(Error::CapExceeded {
            what: "enumerate_words",
            limit: ENUMERATE_CAP,
            got: p.r(),
        });
    }
    Ok(enumerate_words_unbounded(p))
}

/// [`enumerate_words`] without the resource cap.
pub fn enumerate_words_unbounded(p: Params) -> Vec<ShuffleWord> {
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(p.r());
    for xm in 0u64..(1 << p.m) {
        let xs: Vec<Letter> = (1..=p.m)
            .filter(|i| xm & (1 << (i - 1)) != 0)
            .map(Letter::x)
            .collect();
        for ym in 0u64..(1 << p.n) {
            let ys: Vec<Letter> = (1..=p.n)
                .filter(|j| ym & (1 << (j - 1)) != 0)
                .map(Letter::y)
                .collect();
            interleave(&xs, &ys, &mut prefix, &mut out);
        }
    }
    out.sort_by_cached_key(|w| canonical_key(w, p));
    out
}

/// Canonical sort key of a word: `(support bitmask, inversion pairs)`.
pub fn canonical_key(w: &ShuffleWord, p: Params) -> (u64, Vec<(usize, usize)>) {
    (
        w.support_mask(p),
        inversion_set(w).pairs.iter().copied().collect(),
    )
}

fn interleave(xs: &[Letter], ys: &[Letter], prefix: &mut Vec<Letter>, out: &mut Vec<ShuffleWord>) {
    if xs.is_empty() && ys.is_empty() {
        out.push(ShuffleWord::from_valid(prefix.clone()));
        return;
    }
    if let Some((&h, rest)) = xs.split_first() {
        prefix.push(h);
        interleave(rest, ys, prefix, out);
        prefix.pop();
    }
    if let Some((&h, rest)) = ys.split_first() {
        prefix.push(h);
        interleave(xs, rest, prefix, out);
        prefix.pop();
    }
}

/// Inversion pairs `(s, t)`: `y_t` occurs somewhere before `x_s`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InversionSet {
    pairs: BTreeSet<(usize, usize)>,
}

impl InversionSet {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, s: usize, t: usize) -> bool {
        self.pairs.contains(&(s, t))
    }

    pub fn is_subset(&self, other: &InversionSet) -> bool {
        self.pairs.is_subset(&other.pairs)
    }
}

pub fn inversion_set(w: &ShuffleWord) -> InversionSet {
    let mut pairs = BTreeSet::new();
    let mut ys_seen = Vec::new();
    for l in w.letters() {
        match l.kind {
            LetterKind::Y => ys_seen.push(l.index),
            LetterKind::X => {
                for &t in &ys_seen {
                    pairs.insert((l.index, t));
                }
            }
        }
    }
    InversionSet { pairs }
}

/// The subword of `u` consisting of the letters that also occur in `v`.
pub fn restrict(u: &ShuffleWord, v: &ShuffleWord) -> ShuffleWord {
    let vx = v.x_mask();
    let vy = v.y_mask();
    let letters = u
        .letters()
        .iter()
        .filter(|l| {
            let mask = match l.kind {
                LetterKind::X => vx,
                LetterKind::Y => vy,
            };
            mask & (1 << (l.index - 1)) != 0
        })
        .copied()
        .collect();
    ShuffleWord::from_valid(letters)
}

/// Bubble-order comparison: `v`'s x-letters survive in `u`, `u`'s y-letters
/// survive in `v`, and restricting each word to the other's letters can only
/// gain inversions going up.
pub fn leq_bub(u: &ShuffleWord, v: &ShuffleWord) -> bool {
    let (ux, uy) = (u.x_mask(), u.y_mask());
    let (vx, vy) = (v.x_mask(), v.y_mask());
    if vx & !ux != 0 || uy & !vy != 0 {
        return false;
    }
    inversion_set(&restrict(u, v)).is_subset(&inversion_set(&restrict(v, u)))
}

/// Shuffle-order comparison: like [`leq_bub`] but the shared letters must
/// appear in exactly the same relative order, because deletions and
/// insertions never reorder what stays.
pub fn leq_shuf(u: &ShuffleWord, v: &ShuffleWord) -> bool {
    let (ux, uy) = (u.x_mask(), u.y_mask());
    let (vx, vy) = (v.x_mask(), v.y_mask());
    if vx & !ux != 0 || uy & !vy != 0 {
        return false;
    }
    restrict(u, v) == restrict(v, u)
}

/// Which elementary move produces an upper cover in the bubble order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    /// Adjacent `x_s y_t` swapped to `y_t x_s`.
    Transposition,
    /// An x-letter deleted, or a y-letter inserted, at a right-indel
    /// position: directly before a letter of the same kind or at the end.
    RightIndel,
}

/// Slot where inserting `l` leaves it directly before the next larger letter
/// of its own kind, or at the end of the word if there is none.  Deleting the
/// letter from the resulting word is then a right indel.
fn right_indel_slot(w: &ShuffleWord, l: Letter) -> usize {
    w.letters()
        .iter()
        .position(|c| c.kind == l.kind && c.index > l.index)
        .unwrap_or(w.len())
}

fn with_inserted(w: &ShuffleWord, slot: usize, l: Letter) -> ShuffleWord {
    let mut letters = w.letters().to_vec();
    letters.insert(slot, l);
    ShuffleWord::from_valid(letters)
}

fn with_removed(w: &ShuffleWord, slot: usize) -> ShuffleWord {
    let mut letters = w.letters().to_vec();
    letters.remove(slot);
    ShuffleWord::from_valid(letters)
}

fn with_swapped(w: &ShuffleWord, slot: usize) -> ShuffleWord {
    let mut letters = w.letters().to_vec();
    letters.swap(slot, slot + 1);
    ShuffleWord::from_valid(letters)
}

/// Upper covers of `w` in the bubble order, tagged with the move that
/// produces them: transpositions by position, then x-deletions by position,
/// then y-insertions by letter index.
pub fn bub_upper_covers(w: &ShuffleWord, p: Params) -> Vec<(ShuffleWord, MoveKind)> {
    debug_assert!(w.validate(p).is_ok());
    let mut out = Vec::new();
    let k = w.len();
    for i in 0..k.saturating_sub(1) {
        if w.letters()[i].is_x() && w.letters()[i + 1].is_y() {
            out.push((with_swapped(w, i), MoveKind::Transposition));
        }
    }
    for i in 0..k {
        if w.letters()[i].is_x() && (i + 1 == k || w.letters()[i + 1].is_x()) {
            out.push((with_removed(w, i), MoveKind::RightIndel));
        }
    }
    let ymask = w.y_mask();
    for t in 1..=p.n {
        if ymask & (1 << (t - 1)) == 0 {
            let l = Letter::y(t);
            out.push((
                with_inserted(w, right_indel_slot(w, l), l),
                MoveKind::RightIndel,
            ));
        }
    }
    out
}

/// Lower covers of `w`, each tagged with its cover label: an edge for an
/// undone transposition, a loop `x_s` for a reinserted x-letter, a loop `y_t`
/// for a removed y-letter.
pub fn bub_lower_covers(w: &ShuffleWord, p: Params) -> Vec<(ShuffleWord, CVertex)> {
    debug_assert!(w.validate(p).is_ok());
    let mut out = Vec::new();
    let k = w.len();
    for i in 0..k.saturating_sub(1) {
        let (a, b) = (w.letters()[i], w.letters()[i + 1]);
        if a.is_y() && b.is_x() {
            out.push((with_swapped(w, i), CVertex::edge(b.index, a.index)));
        }
    }
    let xmask = w.x_mask();
    for s in 1..=p.m {
        if xmask & (1 << (s - 1)) == 0 {
            let l = Letter::x(s);
            let lower = with_inserted(w, right_indel_slot(w, l), l);
            out.push((lower, CVertex::Loop(l)));
        }
    }
    for i in 0..k {
        if w.letters()[i].is_y() && (i + 1 == k || w.letters()[i + 1].is_y()) {
            out.push((with_removed(w, i), CVertex::Loop(w.letters()[i])));
        }
    }
    out
}

/// Splits the letters of `w` into the *interface* — letters taking part in
/// an adjacent `y x` pair — and the *residue*, everything else.
pub fn interface_residue(w: &ShuffleWord) -> (BTreeSet<Letter>, BTreeSet<Letter>) {
    let mut interface = BTreeSet::new();
    for i in 0..w.len().saturating_sub(1) {
        let (a, b) = (w.letters()[i], w.letters()[i + 1]);
        if a.is_y() && b.is_x() {
            interface.insert(a);
            interface.insert(b);
        }
    }
    let residue = w
        .letters()
        .iter()
        .copied()
        .filter(|l| !interface.contains(l))
        .collect();
    (interface, residue)
}

/// `(a, b)` where `a` counts lower covers by transposition (half the
/// interface) and `b` counts lower covers by right indel (absent x-letters
/// plus y-letters in the residue).
pub fn in_degrees(w: &ShuffleWord, p: Params) -> (usize, usize) {
    let mut a = 0;
    let mut y_residue = 0;
    let k = w.len();
    for i in 0..k {
        let l = w.letters()[i];
        let next = w.letters().get(i + 1);
        if l.is_y() {
            match next {
                Some(nx) if nx.is_x() => a += 1,
                Some(_) | None => y_residue += 1,
            }
        }
    }
    let b = (p.m - w.x_count()) + y_residue;
    (a, b)
}

/// Total in-degree `a + b`, the number of lower covers of `w`.
pub fn in_degree(w: &ShuffleWord, p: Params) -> usize {
    let (a, b) = in_degrees(w, p);
    a + b
}

/// The label of the cover `u ⋖ v`, or an error if it is not one.
pub fn cover_label(u: &ShuffleWord, v: &ShuffleWord, p: Params) -> Result<CVertex> {
    bub_lower_covers(v, p)
        .into_iter()
        .find(|(w, _)| w == u)
        .map(|(_, label)| label)
        .ok_or_else(|| Error::NotACover(format!("{u} is not a lower cover of {v}")))
}

/// The labels of all lower covers of `w`: a face of the noncrossing matching
/// complex with one vertex per cover.
pub fn downward_labels(w: &ShuffleWord, p: Params) -> Face {
    Face::from_iter(bub_lower_covers(w, p).into_iter().map(|(_, label)| label))
}

/// Inverse of [`downward_labels`]: reconstructs the unique word whose lower
/// covers carry exactly the given labels.
///
/// The construction starts from the x-letters that do not occur as loops,
/// in increasing order; inserts the y-letter of each edge directly before
/// its x-partner; and finally inserts each loop y-letter before the next
/// larger surviving y-letter (at the end when there is none).
pub fn word_from_labels(face: &Face, p: Params) -> Result<ShuffleWord> {
    crate::complex::validate_gamma_face(face, p)?;
    let mut loop_x = BTreeSet::new();
    let mut loop_y = Vec::new();
    let mut edges = Vec::new();
    for v in face.vertices() {
        match v {
            CVertex::Loop(l) if l.is_x() => {
                loop_x.insert(l.index);
            }
            CVertex::Loop(l) => loop_y.push(l.index),
            CVertex::Edge { x, y } => edges.push((*x, *y)),
        }
    }
    let mut letters: Vec<Letter> = (1..=p.m)
        .filter(|s| !loop_x.contains(s))
        .map(Letter::x)
        .collect();
    let mut w = ShuffleWord::from_valid(letters.clone());
    for &(s, t) in &edges {
        let pos = w
            .position_of(Letter::x(s))
            .expect("edge x-letter is never a loop, so it survives");
        letters = w.letters().to_vec();
        letters.insert(pos, Letter::y(t));
        w = ShuffleWord::new(letters)
            .map_err(|_| Error::NotAFace(format!("labels admit no shuffle word: {face}")))?;
    }
    for &t in &loop_y {
        let l = Letter::y(t);
        w = with_inserted(&w, right_indel_slot(&w, l), l);
    }
    debug_assert_eq!(downward_labels(&w, p), *face);
    Ok(w)
}

/// Letter-swap map `x_s -> y_s`, `y_t -> x_t` with the word order kept.
/// It lands in `Shuf(n, m)` and reverses the bubble order.
pub fn dualize(w: &ShuffleWord) -> ShuffleWord {
    let letters = w
        .letters()
        .iter()
        .map(|l| match l.kind {
            LetterKind::X => Letter::y(l.index),
            LetterKind::Y => Letter::x(l.index),
        })
        .collect();
    ShuffleWord::from_valid(letters)
}

/// Rank in the (graded) shuffle order: deleted x-letters plus present
/// y-letters.
pub fn shuf_rank(w: &ShuffleWord, p: Params) -> usize {
    (p.m - w.x_count()) + w.y_count()
}
