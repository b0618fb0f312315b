//! Noncrossing matching and bipartite complexes.
//!
//! Vertices are loops `x_s`, `y_t` and edges `{x_s, y_t}`.  The *matching
//! complex* `gamma(m, n)` lives on the edges with `1 <= s <= m`,
//! `1 <= t <= n` together with all loops; a set of vertices is a face when
//! no letter is used twice and the edges are strictly noncrossing.  Its
//! faces are exactly the label sets of bubble-order cover moves (see
//! [`crate::word::downward_labels`]).
//!
//! The *bipartite complex* `delta(m, n)` additionally admits the sentinel
//! endpoints `x_0` and `y_0` inside edges (but not the edge `{x_0, y_0}`
//! itself and never as loops); here edges may share endpoints and only
//! strict crossings are forbidden, while a letter still cannot be both
//! looped and edged.  Its facets correspond bijectively to shuffle words
//! via [`phi`], and the facet adjacency reproduces the bubble-order Hasse
//! diagram.
//!
//! Complexes are stored as explicit vertex lists plus facet bitmasks, which
//! caps the ground set at 64 vertices; the resource caps on `(m, n)` keep
//! every buildable complex inside that bound.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{q_var, MultiPoly};
use crate::word::{
    enumerate_words, enumerate_words_unbounded, Letter, LetterKind, Params, ShuffleWord,
    ENUMERATE_CAP,
};

/// A vertex of a matching or bipartite complex.
///
/// The derived order is the canonical one: loops first (all `x`, then all
/// `y`, by index), then edges sorted by `(x, y)`.  Edge endpoints `0` are
/// the sentinels, only meaningful in the bipartite complexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CVertex {
    Loop(Letter),
    Edge { x: usize, y: usize },
}

impl CVertex {
    pub const fn edge(x: usize, y: usize) -> Self {
        CVertex::Edge { x, y }
    }

    pub const fn loop_x(s: usize) -> Self {
        CVertex::Loop(Letter::x(s))
    }

    pub const fn loop_y(t: usize) -> Self {
        CVertex::Loop(Letter::y(t))
    }

    pub const fn is_loop(&self) -> bool {
        matches!(self, CVertex::Loop(_))
    }

    pub const fn is_edge(&self) -> bool {
        matches!(self, CVertex::Edge { .. })
    }

    /// The non-sentinel letters this vertex occupies.
    pub fn letters(&self) -> Vec<Letter> {
        match *self {
            CVertex::Loop(l) => vec![l],
            CVertex::Edge { x, y } => {
                let mut out = Vec::new();
                if x > 0 {
                    out.push(Letter::x(x));
                }
                if y > 0 {
                    out.push(Letter::y(y));
                }
                out
            }
        }
    }
}

impl fmt::Display for CVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CVertex::Loop(l) => write!(f, "{l}"),
            CVertex::Edge { x, y } => write!(f, "x{x}-y{y}"),
        }
    }
}

/// Parses `x3`, `y2`, or `x2-y0`.
pub fn parse_cvertex(s: &str) -> Result<CVertex> {
    if let Some((a, b)) = s.split_once('-') {
        let xs = a
            .strip_prefix('x')
            .ok_or_else(|| Error::Parse(format!("edge must look like x2-y3: {s:?}")))?;
        let ys = b
            .strip_prefix('y')
            .ok_or_else(|| Error::Parse(format!("edge must look like x2-y3: {s:?}")))?;
        let x: usize = xs
            .parse()
            .map_err(|_| Error::Parse(format!("bad edge endpoint in {s:?}")))?;
        let y: usize = ys
            .parse()
            .map_err(|_| Error::Parse(format!("bad edge endpoint in {s:?}")))?;
        if (x, y) == (0, 0) {
            return Err(Error::Parse(format!(
                "the edge between the two sentinels is never a vertex: {s:?}"
            )));
        }
        return Ok(CVertex::edge(x, y));
    }
    crate::word::parse_letter(s).map(CVertex::Loop)
}

/// A finite set of complex vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Face {
    vertices: BTreeSet<CVertex>,
}

impl Face {
    pub fn empty() -> Self {
        Face::default()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &CVertex> {
        self.vertices.iter()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: &CVertex) -> bool {
        self.vertices.contains(v)
    }

    pub fn insert(&mut self, v: CVertex) -> bool {
        self.vertices.insert(v)
    }

    pub fn is_subset(&self, other: &Face) -> bool {
        self.vertices.is_subset(&other.vertices)
    }
}

impl FromIterator<CVertex> for Face {
    fn from_iter<T: IntoIterator<Item = CVertex>>(iter: T) -> Self {
        Face {
            vertices: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Checks membership in the matching complex `gamma(m, n)`: no sentinels,
/// every letter used at most once, edges strictly noncrossing.
pub fn validate_gamma_face(face: &Face, p: Params) -> Result<()> {
    let mut used = BTreeSet::new();
    let mut edges = Vec::new();
    for v in face.vertices() {
        match *v {
            CVertex::Loop(l) => {
                let bound = if l.is_x() { p.m } else { p.n };
                if l.index == 0 || l.index > bound {
                    return Err(Error::NotAFace(format!("loop {l} out of range")));
                }
            }
            CVertex::Edge { x, y } => {
                if x == 0 || x > p.m || y == 0 || y > p.n {
                    return Err(Error::NotAFace(format!("edge {v} out of range")));
                }
                edges.push((x, y));
            }
        }
        for l in v.letters() {
            if !used.insert(l) {
                return Err(Error::NotAFace(format!("letter {l} used twice in {face}")));
            }
        }
    }
    for (i, &(x1, y1)) in edges.iter().enumerate() {
        for &(x2, y2) in &edges[i + 1..] {
            // NM1 already rules out shared endpoints, so strict slopes only.
            if (x1 < x2) != (y1 < y2) {
                return Err(Error::NotAFace(format!(
                    "edges x{x1}-y{y1} and x{x2}-y{y2} cross"
                )));
            }
        }
    }
    Ok(())
}

/// Checks membership in the bipartite complex `delta(m, n)`: sentinel edge
/// endpoints allowed, a letter never both looped and edged, and no strict
/// crossings (shared endpoints are fine).
pub fn validate_delta_face(face: &Face, p: Params) -> Result<()> {
    let mut looped = BTreeSet::new();
    let mut edged = BTreeSet::new();
    let mut edges = Vec::new();
    for v in face.vertices() {
        match *v {
            CVertex::Loop(l) => {
                let bound = if l.is_x() { p.m } else { p.n };
                if l.index == 0 || l.index > bound {
                    return Err(Error::NotAFace(format!("loop {l} out of range")));
                }
                looped.insert(l);
            }
            CVertex::Edge { x, y } => {
                if x > p.m || y > p.n || (x, y) == (0, 0) {
                    return Err(Error::NotAFace(format!("edge {v} out of range")));
                }
                edges.push((x, y));
                for l in v.letters() {
                    edged.insert(l);
                }
            }
        }
    }
    if let Some(l) = looped.intersection(&edged).next() {
        return Err(Error::NotAFace(format!(
            "letter {l} is both looped and edged in {face}"
        )));
    }
    for (i, &(x1, y1)) in edges.iter().enumerate() {
        for &(x2, y2) in &edges[i + 1..] {
            if (x1 < x2 && y1 > y2) || (x1 > x2 && y1 < y2) {
                return Err(Error::NotAFace(format!(
                    "edges x{x1}-y{y1} and x{x2}-y{y2} cross"
                )));
            }
        }
    }
    Ok(())
}

/// Families of complexes this crate can build directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplexKind {
    /// Noncrossing matchings plus loops.
    Gamma,
    /// The loop-free part of `Gamma`.
    GammaPlus,
    /// Noncrossing bipartite faces with sentinels.
    Delta,
    /// The loop-free part of `Delta`.
    DeltaPlus,
    /// Edges `{x_s, y_t}` with `s > t`; square parameters only.
    LeftLeaning,
    /// Result of a link, deletion, join, or relabeling.
    Derived,
}

impl ComplexKind {
    pub const fn name(&self) -> &'static str {
        match self {
            ComplexKind::Gamma => "gamma",
            ComplexKind::GammaPlus => "gamma-plus",
            ComplexKind::Delta => "delta",
            ComplexKind::DeltaPlus => "delta-plus",
            ComplexKind::LeftLeaning => "left-leaning",
            ComplexKind::Derived => "derived",
        }
    }
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a buildable kind name.
pub fn parse_kind(s: &str) -> Result<ComplexKind> {
    Ok(match s {
        "gamma" => ComplexKind::Gamma,
        "gamma-plus" => ComplexKind::GammaPlus,
        "delta" => ComplexKind::Delta,
        "delta-plus" => ComplexKind::DeltaPlus,
        "left-leaning" => ComplexKind::LeftLeaning,
        _ => return Err(Error::Parse(format!("unknown complex kind {s:?}"))),
    })
}

/// Cap on `m + n` for the matching complexes.
pub const GAMMA_CAP: usize = 14;
/// Cap on `m + n` for the bipartite complexes.
pub const DELTA_CAP: usize = 12;
/// Cap on the ground-set size of the vertex-decomposability search.
pub const VD_VERTEX_CAP: usize = 20;

/// A simplicial complex given by its vertex list and facet bitmasks.
///
/// Bit `i` of a mask refers to `vertices[i]`; the vertex list is kept in
/// canonical (sorted) order and contains only vertices that occur in at
/// least one facet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex {
    kind: ComplexKind,
    params: Option<Params>,
    vertices: Vec<CVertex>,
    facets: Vec<u64>,
}

fn mask_bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut w = mask;
    core::iter::from_fn(move || {
        if w == 0 {
            None
        } else {
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(b)
        }
    })
}

/// Keeps only the maximal masks, deduplicated, sorted ascending.
fn prune_to_maximal(masks: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut sorted: Vec<u64> = masks
        .into_iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    sorted.sort_by_key(|m| core::cmp::Reverse(m.count_ones()));
    let mut maximal: Vec<u64> = Vec::new();
    for m in sorted {
        if !maximal.iter().any(|a| m & !a == 0) {
            maximal.push(m);
        }
    }
    maximal.sort_unstable();
    maximal
}

impl Complex {
    /// Builds one of the named complexes, subject to the resource caps.
    pub fn build(kind: ComplexKind, p: Params) -> Result<Complex> {
        let (cap, what) = match kind {
            ComplexKind::Gamma | ComplexKind::GammaPlus | ComplexKind::LeftLeaning => {
                (GAMMA_CAP, "matching complex")
            }
            ComplexKind::Delta | ComplexKind::DeltaPlus => (DELTA_CAP, "bipartite complex"),
            ComplexKind::Derived => {
                return Err(Error::Unsupported("derived complexes come from operations"))
            }
        };
        if p.r() > cap {
            return Err(Error::CapExceeded {
                what,
                limit: cap,
                got: p.r(),
            });
        }
        Complex::build_unbounded(kind, p)
    }

    /// [`Complex::build`] without the `(m, n)` caps; the 64-vertex ground-set
    /// bound still applies.
    pub fn build_unbounded(kind: ComplexKind, p: Params) -> Result<Complex> {
        match kind {
            ComplexKind::Gamma => build_gamma(p),
            ComplexKind::GammaPlus => {
                let gamma = build_gamma(p)?;
                let loops: Vec<CVertex> = gamma
                    .vertices
                    .iter()
                    .copied()
                    .filter(CVertex::is_loop)
                    .collect();
                let mut plus = gamma.deletion(&loops)?;
                plus.kind = ComplexKind::GammaPlus;
                plus.params = Some(p);
                Ok(plus)
            }
            ComplexKind::Delta => build_delta(p),
            ComplexKind::DeltaPlus => {
                let delta = build_delta(p)?;
                let loops: Vec<CVertex> = delta
                    .vertices
                    .iter()
                    .copied()
                    .filter(CVertex::is_loop)
                    .collect();
                let mut plus = delta.deletion(&loops)?;
                plus.kind = ComplexKind::DeltaPlus;
                plus.params = Some(p);
                Ok(plus)
            }
            ComplexKind::LeftLeaning => {
                if p.m != p.n {
                    return Err(Error::SquareOnly("the left-leaning complex"));
                }
                let plus = Complex::build_unbounded(ComplexKind::GammaPlus, p)?;
                let steep: Vec<CVertex> = plus
                    .vertices
                    .iter()
                    .copied()
                    .filter(|v| match *v {
                        CVertex::Edge { x, y } => x <= y,
                        CVertex::Loop(_) => true,
                    })
                    .collect();
                let mut left = plus.deletion(&steep)?;
                left.kind = ComplexKind::LeftLeaning;
                left.params = Some(p);
                Ok(left)
            }
            ComplexKind::Derived => {
                Err(Error::Unsupported("derived complexes come from operations"))
            }
        }
    }

    /// Builds a complex from explicit faces: the ground set is the union of
    /// the face vertices and the facets are the maximal given faces.
    pub fn from_faces(faces: &[Face]) -> Result<Complex> {
        let vertex_set: BTreeSet<CVertex> =
            faces.iter().flat_map(|f| f.vertices().copied()).collect();
        let vertices: Vec<CVertex> = vertex_set.into_iter().collect();
        if vertices.len() > 64 {
            return Err(Error::CapExceeded {
                what: "complex ground set",
                limit: 64,
                got: vertices.len(),
            });
        }
        let index: BTreeMap<CVertex, usize> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let masks = faces.iter().map(|f| {
            f.vertices()
                .map(|v| 1u64 << index[v])
                .fold(0u64, |a, b| a | b)
        });
        let mut complex = Complex {
            kind: ComplexKind::Derived,
            params: None,
            vertices,
            facets: prune_to_maximal(masks),
        };
        complex.prune_ground_set();
        Ok(complex)
    }

    fn from_trusted_facets(
        kind: ComplexKind,
        params: Option<Params>,
        vertices: Vec<CVertex>,
        masks: impl IntoIterator<Item = u64>,
    ) -> Result<Complex> {
        if vertices.len() > 64 {
            return Err(Error::CapExceeded {
                what: "complex ground set",
                limit: 64,
                got: vertices.len(),
            });
        }
        let facets: Vec<u64> = masks
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        debug_assert_eq!(prune_to_maximal(facets.iter().copied()), facets);
        let mut complex = Complex {
            kind,
            params,
            vertices,
            facets,
        };
        complex.prune_ground_set();
        Ok(complex)
    }

    /// Drops ground-set vertices that occur in no facet and compacts masks.
    fn prune_ground_set(&mut self) {
        let used: u64 = self.facets.iter().fold(0, |a, b| a | b);
        if used.count_ones() as usize == self.vertices.len() {
            return;
        }
        let mut keep = Vec::new();
        let mut remap = BTreeMap::new();
        for (i, &v) in self.vertices.iter().enumerate() {
            if used & (1 << i) != 0 {
                remap.insert(i, keep.len());
                keep.push(v);
            }
        }
        self.vertices = keep;
        for mask in &mut self.facets {
            let mut out = 0u64;
            for b in mask_bits(*mask) {
                out |= 1 << remap[&b];
            }
            *mask = out;
        }
        self.facets.sort_unstable();
    }

    pub fn kind(&self) -> ComplexKind {
        self.kind
    }

    pub fn params(&self) -> Option<Params> {
        self.params
    }

    pub fn vertices(&self) -> &[CVertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, v: &CVertex) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    pub fn facet_masks(&self) -> &[u64] {
        &self.facets
    }

    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    /// Size of the largest facet (`0` for the empty complex).
    pub fn max_facet_size(&self) -> usize {
        self.facets
            .iter()
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn face_from_mask(&self, mask: u64) -> Face {
        mask_bits(mask).map(|b| self.vertices[b]).collect()
    }

    pub fn mask_from_face(&self, face: &Face) -> Result<u64> {
        let mut mask = 0u64;
        for v in face.vertices() {
            let i = self
                .vertex_index(v)
                .ok_or_else(|| Error::NotInComplex(format!("vertex {v}")))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    pub fn facet_faces(&self) -> Vec<Face> {
        self.facets
            .iter()
            .map(|&m| self.face_from_mask(m))
            .collect()
    }

    /// Facets as label sets, for order-independent comparison of complexes
    /// over different ground representations.
    pub fn facet_label_sets(&self) -> BTreeSet<BTreeSet<CVertex>> {
        self.facets
            .iter()
            .map(|&m| mask_bits(m).map(|b| self.vertices[b]).collect())
            .collect()
    }

    /// True when both complexes have the same facets as labeled sets.
    pub fn same_faces(&self, other: &Complex) -> bool {
        self.facet_label_sets() == other.facet_label_sets()
    }

    pub fn contains_mask(&self, mask: u64) -> bool {
        self.facets.iter().any(|f| mask & !f == 0)
    }

    pub fn contains_face(&self, face: &Face) -> bool {
        match self.mask_from_face(face) {
            Ok(mask) => self.contains_mask(mask),
            Err(_) => false,
        }
    }

    /// All faces grouped by size: entry `k` lists the faces with `k`
    /// vertices, each sorted ascending.  Entry `0` is `[0]` unless the
    /// complex is void.
    pub fn faces_by_size(&self) -> Vec<Vec<u64>> {
        if self.facets.is_empty() {
            return Vec::new();
        }
        let top = self.max_facet_size();
        let mut levels: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); top + 1];
        for &f in &self.facets {
            levels[f.count_ones() as usize].insert(f);
        }
        for size in (1..=top).rev() {
            let current: Vec<u64> = levels[size].iter().copied().collect();
            for mask in current {
                for b in mask_bits(mask) {
                    levels[size - 1].insert(mask & !(1 << b));
                }
            }
        }
        levels
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect()
    }

    /// `(f_{-1}, f_0, ..., f_{d-1})`; empty for the void complex.
    pub fn f_vector(&self) -> Vec<u64> {
        self.faces_by_size()
            .iter()
            .map(|level| level.len() as u64)
            .collect()
    }

    /// The face-count polynomial `sum_k f_{k-1} q^k`.
    pub fn f_poly(&self) -> MultiPoly {
        let mut poly = MultiPoly::zero(q_var());
        for (k, count) in self.f_vector().into_iter().enumerate() {
            poly.add_term(vec![k as u32], BigInt::from(count));
        }
        poly
    }

    /// The h-vector `(h_0, ..., h_d)` where `d` is the largest facet size.
    pub fn h_vector(&self) -> Vec<BigInt> {
        let f = self.f_vector();
        let d = self.max_facet_size();
        let mut h = Vec::with_capacity(d + 1);
        for k in 0..=d {
            let mut acc = BigInt::zero();
            for (i, fi) in f.iter().enumerate().take(k + 1) {
                let c = crate::poly::binomial(d - i, k - i);
                let term = c * BigInt::from(*fi);
                if (k - i) % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            h.push(acc);
        }
        h
    }

    /// The polynomial `sum_k h_k q^k`.
    pub fn h_poly(&self) -> MultiPoly {
        let mut poly = MultiPoly::zero(q_var());
        for (k, value) in self.h_vector().into_iter().enumerate() {
            poly.add_term(vec![k as u32], value);
        }
        poly
    }

    /// Reduced Euler characteristic `-f(-1)`.
    pub fn reduced_euler(&self) -> BigInt {
        let mut acc = BigInt::zero();
        for (k, count) in self.f_vector().into_iter().enumerate() {
            let term = BigInt::from(count);
            if k % 2 == 0 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        acc
    }

    pub fn is_pure(&self) -> bool {
        let mut sizes = self.facets.iter().map(|m| m.count_ones());
        match sizes.next() {
            None => true,
            Some(first) => sizes.all(|s| s == first),
        }
    }

    /// True when every set of pairwise-joined vertices is a face.
    pub fn is_flag(&self) -> bool {
        let v = self.vertex_count();
        if v == 0 {
            return true;
        }
        let all: u64 = !0u64 >> (64 - v);
        let mut pair = vec![0u64; v];
        for (a, row) in pair.iter_mut().enumerate() {
            for b in 0..v {
                if a != b && self.contains_mask((1 << a) | (1 << b)) {
                    *row |= 1 << b;
                }
            }
        }
        for level in self.faces_by_size() {
            for &mask in &level {
                // Vertices joined to everything in the face must extend it.
                let mut joined = all & !mask;
                for b in mask_bits(mask) {
                    joined &= pair[b];
                }
                for b in mask_bits(joined) {
                    if !self.contains_mask(mask | (1 << b)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// For a pure complex: every ridge lies in exactly two facets.
    pub fn is_thin(&self) -> Result<bool> {
        if !self.is_pure() {
            return Err(Error::NotPure("thinness check"));
        }
        let mut ridge_count: BTreeMap<u64, usize> = BTreeMap::new();
        for &f in &self.facets {
            for b in mask_bits(f) {
                *ridge_count.entry(f & !(1 << b)).or_insert(0) += 1;
            }
        }
        Ok(ridge_count.values().all(|&c| c == 2))
    }

    /// Facet-adjacency edges `(i, j)` with `i < j` for a pure complex:
    /// facets sharing a ridge.
    pub fn dual_graph(&self) -> Result<Vec<(usize, usize)>> {
        if !self.is_pure() {
            return Err(Error::NotPure("the dual graph"));
        }
        let d = self.max_facet_size() as u32;
        let mut out = Vec::new();
        for i in 0..self.facets.len() {
            for j in (i + 1)..self.facets.len() {
                if (self.facets[i] & self.facets[j]).count_ones() + 1 == d {
                    out.push((i, j));
                }
            }
        }
        Ok(out)
    }

    /// The link of a face: all `F \ face` for facets `F` containing it.
    pub fn link(&self, face: &Face) -> Result<Complex> {
        let mask = self.mask_from_face(face)?;
        if !self.contains_mask(mask) {
            return Err(Error::NotInComplex(format!("face {face}")));
        }
        let facets: Vec<u64> = self
            .facets
            .iter()
            .filter(|&&f| mask & !f == 0)
            .map(|&f| f & !mask)
            .collect();
        // Containing facets are incomparable, so the differences are too.
        Complex::from_trusted_facets(ComplexKind::Derived, None, self.vertices.clone(), facets)
    }

    /// The deletion: all faces avoiding the given vertices.  Vertices not in
    /// the ground set are ignored (nothing to avoid).
    pub fn deletion(&self, verts: &[CVertex]) -> Result<Complex> {
        let mut avoid = 0u64;
        for v in verts {
            if let Some(i) = self.vertex_index(v) {
                avoid |= 1 << i;
            }
        }
        let candidates = self.facets.iter().map(|&f| f & !avoid);
        let facets = prune_to_maximal(candidates);
        let mut out = Complex {
            kind: ComplexKind::Derived,
            params: None,
            vertices: self.vertices.clone(),
            facets,
        };
        out.prune_ground_set();
        Ok(out)
    }

    /// The join: faces are unions of a face of `self` and a face of `other`.
    /// Ground sets must be label-disjoint.
    pub fn join(&self, other: &Complex) -> Result<Complex> {
        if let Some(shared) = self
            .vertices
            .iter()
            .find(|v| other.vertex_index(v).is_some())
        {
            return Err(Error::GroundSetsOverlap(format!("vertex {shared}")));
        }
        let mut vertices: Vec<CVertex> = self
            .vertices
            .iter()
            .chain(other.vertices.iter())
            .copied()
            .collect();
        vertices.sort_unstable();
        if vertices.len() > 64 {
            return Err(Error::CapExceeded {
                what: "complex ground set",
                limit: 64,
                got: vertices.len(),
            });
        }
        let position: BTreeMap<CVertex, usize> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let remap = |complex: &Complex, mask: u64| -> u64 {
            mask_bits(mask)
                .map(|b| 1u64 << position[&complex.vertices[b]])
                .fold(0, |a, b| a | b)
        };
        let mut facets = Vec::new();
        for &a in &self.facets {
            for &b in &other.facets {
                facets.push(remap(self, a) | remap(other, b));
            }
        }
        // Unions of incomparable pairs on disjoint grounds stay incomparable.
        Complex::from_trusted_facets(ComplexKind::Derived, None, vertices, facets)
    }

    /// Renames every vertex through `map`, which must stay injective.
    pub fn relabel(&self, map: impl Fn(&CVertex) -> CVertex) -> Result<Complex> {
        let images: Vec<CVertex> = self.vertices.iter().map(&map).collect();
        let mut sorted: Vec<(CVertex, usize)> = images.iter().copied().zip(0..).collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::NotABijection("relabeling collides".to_owned()));
        }
        let mut new_position = vec![0usize; images.len()];
        for (new_idx, &(_, old_idx)) in sorted.iter().enumerate() {
            new_position[old_idx] = new_idx;
        }
        let vertices: Vec<CVertex> = sorted.into_iter().map(|(v, _)| v).collect();
        let facets: Vec<u64> = self
            .facets
            .iter()
            .map(|&f| {
                mask_bits(f)
                    .map(|b| 1u64 << new_position[b])
                    .fold(0, |a, b| a | b)
            })
            .collect();
        Complex::from_trusted_facets(ComplexKind::Derived, None, vertices, facets)
    }

    /// Walks the facets in the given order and checks the shelling
    /// condition at every step; on success returns the restriction masks.
    pub fn check_shelling(&self, order: &[usize]) -> Result<ShellingOutcome> {
        let count = self.facets.len();
        if order.len() != count {
            return Err(Error::NotAPermutation(format!(
                "expected {count} facet indices, got {}",
                order.len()
            )));
        }
        let mut seen = vec![false; count];
        for &i in order {
            if i >= count || seen[i] {
                return Err(Error::NotAPermutation(format!(
                    "index {i} repeats or overflows"
                )));
            }
            seen[i] = true;
        }
        let mut restrictions = Vec::with_capacity(count);
        for (step, &fi) in order.iter().enumerate() {
            let fk = self.facets[fi];
            let mut restriction = 0u64;
            for b in mask_bits(fk) {
                let ridge = fk & !(1 << b);
                if order[..step].iter().any(|&e| ridge & !self.facets[e] == 0) {
                    restriction |= 1 << b;
                }
            }
            // Every earlier intersection must fit under a shared ridge,
            // which fails exactly when some earlier facet contains the
            // whole restriction set.
            if step > 0
                && order[..step]
                    .iter()
                    .any(|&e| restriction & !self.facets[e] == 0)
            {
                return Ok(ShellingOutcome::FailedAt { step });
            }
            restrictions.push(restriction);
        }
        Ok(ShellingOutcome::Shelled { restrictions })
    }

    /// Searches for a vertex decomposition, trying edge vertices in `(x, y)`
    /// order before loops.  Returns a witness tree on success.
    pub fn vertex_decomposition(&self) -> Result<VdReport> {
        if self.vertex_count() > VD_VERTEX_CAP {
            return Err(Error::CapExceeded {
                what: "vertex decomposability search",
                limit: VD_VERTEX_CAP,
                got: self.vertex_count(),
            });
        }
        // Candidate order: edges by (x, y), then loops.
        let mut candidates: Vec<usize> = (0..self.vertex_count()).collect();
        candidates.sort_by_key(|&i| match self.vertices[i] {
            CVertex::Edge { x, y } => (0, x, y, 0),
            CVertex::Loop(l) => (1, l.index, 0, if l.is_x() { 0 } else { 1 }),
        });
        let mut memo: BTreeMap<Vec<u64>, Option<usize>> = BTreeMap::new();
        let decomposable = vd_search(&self.facets, &candidates, &mut memo);
        let tree = decomposable.then(|| vd_tree(&self.facets, &memo, &self.vertices));
        Ok(VdReport { decomposable, tree })
    }

    /// Distribution of `(delta(F), |F|)` over all faces, where `delta(F)`
    /// is the size of the largest facet containing `F`.
    pub fn bw_distribution(&self) -> BTreeMap<(usize, usize), u64> {
        let mut out = BTreeMap::new();
        for level in self.faces_by_size() {
            for &mask in &level {
                let delta = self
                    .facets
                    .iter()
                    .filter(|&&f| mask & !f == 0)
                    .map(|f| f.count_ones() as usize)
                    .max()
                    .expect("every face lies in a facet");
                *out.entry((delta, mask.count_ones() as usize)).or_insert(0) += 1;
            }
        }
        out
    }
}

/// Result of walking a facet order through the shelling condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShellingOutcome {
    /// Every step passed; `restrictions[k]` is the restriction-face mask of
    /// the `k`-th facet in the order.
    Shelled { restrictions: Vec<u64> },
    /// The facet at this position (0-based) violates the condition.
    FailedAt { step: usize },
}

impl ShellingOutcome {
    /// Tallies restriction sizes into an h-vector of length `d + 1`.
    pub fn h_tally(&self, d: usize) -> Option<Vec<u64>> {
        match self {
            ShellingOutcome::Shelled { restrictions } => {
                let mut h = vec![0u64; d + 1];
                for &r in restrictions {
                    h[r.count_ones() as usize] += 1;
                }
                Some(h)
            }
            ShellingOutcome::FailedAt { .. } => None,
        }
    }
}

/// Witness tree for vertex decomposability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VdTree {
    /// At most one facet: a (possibly empty) simplex.
    Simplex,
    /// Shedding at `vertex`; both branches decompose.
    Shed {
        vertex: CVertex,
        link: Box<VdTree>,
        deletion: Box<VdTree>,
    },
}

/// Outcome of the vertex-decomposability search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VdReport {
    pub decomposable: bool,
    pub tree: Option<VdTree>,
}

/// Order-preserving compaction of the used vertices: the memo key shared by
/// all subproblems with the same relative facet structure.
fn vd_key(facets: &[u64]) -> Vec<u64> {
    let used: u64 = facets.iter().fold(0, |a, b| a | b);
    let positions: Vec<usize> = mask_bits(used).collect();
    let mut out: Vec<u64> = facets
        .iter()
        .map(|&f| {
            positions
                .iter()
                .enumerate()
                .filter(|&(_, &p)| f & (1 << p) != 0)
                .fold(0u64, |a, (newbit, _)| a | (1 << newbit))
        })
        .collect();
    out.sort_unstable();
    out
}

/// Splits at vertex `v`: facets of the link and of the deletion.
fn vd_split(facets: &[u64], v: usize) -> (Vec<u64>, Vec<u64>) {
    let bit = 1u64 << v;
    let link: Vec<u64> = facets
        .iter()
        .filter(|&&f| f & bit != 0)
        .map(|&f| f & !bit)
        .collect();
    let deletion = prune_to_maximal(facets.iter().map(|&f| f & !bit));
    (link, deletion)
}

/// The shedding condition: the deletion keeps no facet that the link also
/// has, i.e. every deletion facet was already a facet of the whole complex.
fn vd_shedding_ok(link: &[u64], deletion: &[u64]) -> bool {
    let link_set: BTreeSet<u64> = link.iter().copied().collect();
    deletion.iter().all(|f| !link_set.contains(f))
}

fn vd_search(
    facets: &[u64],
    candidates: &[usize],
    memo: &mut BTreeMap<Vec<u64>, Option<usize>>,
) -> bool {
    if facets.len() <= 1 {
        return true;
    }
    let key = vd_key(facets);
    if let Some(entry) = memo.get(&key) {
        return entry.is_some();
    }
    let used: u64 = facets.iter().fold(0, |a, b| a | b);
    for &v in candidates {
        if used & (1 << v) == 0 {
            continue;
        }
        let (link, deletion) = vd_split(facets, v);
        if !vd_shedding_ok(&link, &deletion) {
            continue;
        }
        if vd_search(&link, candidates, memo) && vd_search(&deletion, candidates, memo) {
            // The memo key renumbers vertices; record the choice in that
            // compact numbering so any embedding can replay it.
            let compact = mask_bits(used).position(|p| p == v).expect("v is used");
            memo.insert(key, Some(compact));
            return true;
        }
    }
    memo.insert(key, None);
    false
}

/// Replays memoized choices into an explicit witness tree.  The memoized
/// choice is label-independent, so any embedding with the same compacted
/// facet structure can reuse it.
fn vd_tree(facets: &[u64], memo: &BTreeMap<Vec<u64>, Option<usize>>, labels: &[CVertex]) -> VdTree {
    if facets.len() <= 1 {
        return VdTree::Simplex;
    }
    let used: u64 = facets.iter().fold(0, |a, b| a | b);
    let compact = memo
        .get(&vd_key(facets))
        .copied()
        .flatten()
        .expect("tree is only built after a successful search");
    let v = mask_bits(used).nth(compact).expect("choice is in range");
    let (link, deletion) = vd_split(facets, v);
    VdTree::Shed {
        vertex: labels[v],
        link: Box::new(vd_tree(&link, memo, labels)),
        deletion: Box::new(vd_tree(&deletion, memo, labels)),
    }
}

fn build_gamma(p: Params) -> Result<Complex> {
    let vertices = gamma_vertices(p);
    if vertices.len() > 64 {
        return Err(Error::CapExceeded {
            what: "complex ground set",
            limit: 64,
            got: vertices.len(),
        });
    }
    let index: BTreeMap<CVertex, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut facets = Vec::new();
    // A facet uses every letter: pick equal-size supports S, T; the
    // noncrossing condition forces the increasing pairing between them, and
    // all remaining letters become loops.
    for s_mask in 0u64..(1 << p.m) {
        let s: Vec<usize> = (1..=p.m).filter(|i| s_mask & (1 << (i - 1)) != 0).collect();
        for t_mask in 0u64..(1 << p.n) {
            let t: Vec<usize> = (1..=p.n).filter(|j| t_mask & (1 << (j - 1)) != 0).collect();
            if s.len() != t.len() {
                continue;
            }
            let mut mask = 0u64;
            for (&a, &b) in s.iter().zip(&t) {
                mask |= 1 << index[&CVertex::edge(a, b)];
            }
            for i in 1..=p.m {
                if s_mask & (1 << (i - 1)) == 0 {
                    mask |= 1 << index[&CVertex::loop_x(i)];
                }
            }
            for j in 1..=p.n {
                if t_mask & (1 << (j - 1)) == 0 {
                    mask |= 1 << index[&CVertex::loop_y(j)];
                }
            }
            facets.push(mask);
        }
    }
    // Distinct support pairs give incomparable faces: each uses all letters.
    Complex::from_trusted_facets(ComplexKind::Gamma, Some(p), vertices, facets)
}

fn gamma_vertices(p: Params) -> Vec<CVertex> {
    let mut vertices: Vec<CVertex> = (1..=p.m)
        .map(CVertex::loop_x)
        .chain((1..=p.n).map(CVertex::loop_y))
        .collect();
    for s in 1..=p.m {
        for t in 1..=p.n {
            vertices.push(CVertex::edge(s, t));
        }
    }
    vertices.sort_unstable();
    vertices
}

fn delta_vertices(p: Params) -> Vec<CVertex> {
    let mut vertices: Vec<CVertex> = (1..=p.m)
        .map(CVertex::loop_x)
        .chain((1..=p.n).map(CVertex::loop_y))
        .collect();
    for s in 0..=p.m {
        for t in 0..=p.n {
            if (s, t) != (0, 0) {
                vertices.push(CVertex::edge(s, t));
            }
        }
    }
    vertices.sort_unstable();
    vertices
}

fn build_delta(p: Params) -> Result<Complex> {
    let vertices = delta_vertices(p);
    if vertices.len() > 64 {
        return Err(Error::CapExceeded {
            what: "complex ground set",
            limit: 64,
            got: vertices.len(),
        });
    }
    let index: BTreeMap<CVertex, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let words = if p.r() <= ENUMERATE_CAP {
        enumerate_words(p)?
    } else {
        enumerate_words_unbounded(p)
    };
    let expected = words.len();
    let facets: Vec<u64> = words
        .iter()
        .map(|w| {
            let face = phi(w, p);
            face.vertices()
                .map(|v| 1u64 << index[v])
                .fold(0u64, |a, b| a | b)
        })
        .collect();
    // Facets all have m + n vertices (pure), hence pairwise incomparable.
    let complex = Complex::from_trusted_facets(ComplexKind::Delta, Some(p), vertices, facets)?;
    debug_assert_eq!(complex.facet_count(), expected, "phi must be injective");
    Ok(complex)
}

/// The facet of `delta(m, n)` attached to a word: a loop at every absent
/// letter, and an edge from each letter of `w` to the nearest preceding
/// letter of the opposite type in the sentinel-prefixed word `x0 y0 w`.
pub fn phi(w: &ShuffleWord, p: Params) -> Face {
    debug_assert!(w.validate(p).is_ok());
    let mut face = Face::empty();
    let xs: BTreeSet<usize> = w.x_indices().collect();
    let ys: BTreeSet<usize> = w.y_indices().collect();
    for s in 1..=p.m {
        if !xs.contains(&s) {
            face.insert(CVertex::loop_x(s));
        }
    }
    for t in 1..=p.n {
        if !ys.contains(&t) {
            face.insert(CVertex::loop_y(t));
        }
    }
    for (i, l) in w.letters().iter().enumerate() {
        let partner = w.letters()[..i]
            .iter()
            .rev()
            .find(|c| c.kind != l.kind)
            .map(|c| c.index)
            .unwrap_or(0);
        let edge = match l.kind {
            LetterKind::X => CVertex::edge(l.index, partner),
            LetterKind::Y => CVertex::edge(partner, l.index),
        };
        face.insert(edge);
    }
    face
}

/// Inverse direction of the facet correspondence, extended to all faces:
/// the unique minimal-support word whose facet contains the face.
///
/// The edges of the face form a forest; each tree component is peeled from
/// its largest-index endpoints and contributes a contiguous block of
/// letters, blocks are concatenated by their smallest x-endpoint, and the
/// sentinels are dropped at the end.
pub fn face_to_covering_word(face: &Face, p: Params) -> Result<ShuffleWord> {
    validate_delta_face(face, p)?;
    let edges: Vec<(usize, usize)> = face
        .vertices()
        .filter_map(|v| match *v {
            CVertex::Edge { x, y } => Some((x, y)),
            CVertex::Loop(_) => None,
        })
        .collect();
    // Group edges into connected components of the bipartite graph.
    let mut component_of: BTreeMap<(bool, usize), usize> = BTreeMap::new();
    let mut components: Vec<Vec<(usize, usize)>> = Vec::new();
    for &(s, t) in &edges {
        let cx = component_of.get(&(false, s)).copied();
        let cy = component_of.get(&(true, t)).copied();
        let target = match (cx, cy) {
            (None, None) => {
                components.push(Vec::new());
                components.len() - 1
            }
            (Some(c), None) | (None, Some(c)) => c,
            (Some(a), Some(b)) => {
                if a != b {
                    // Merge the two trees; rare and components are tiny.
                    let moved: Vec<(usize, usize)> = core::mem::take(&mut components[b]);
                    for &(ms, mt) in &moved {
                        component_of.insert((false, ms), a);
                        component_of.insert((true, mt), a);
                    }
                    components[a].extend(moved);
                }
                a
            }
        };
        component_of.insert((false, s), target);
        component_of.insert((true, t), target);
        components[target].push((s, t));
    }
    let mut blocks: Vec<(usize, Vec<Letter>)> = Vec::new();
    for comp in components.iter().filter(|c| !c.is_empty()) {
        let min_x = comp.iter().map(|&(s, _)| s).min().expect("nonempty");
        let letters = peel_component(comp.clone(), face)?;
        blocks.push((min_x, letters));
    }
    blocks.sort_by_key(|&(min_x, _)| min_x);
    let letters: Vec<Letter> = blocks
        .into_iter()
        .flat_map(|(_, ls)| ls)
        .filter(|l| l.index > 0)
        .collect();
    ShuffleWord::new(letters)
        .map_err(|e| Error::NotAFace(format!("no covering word for {face}: {e}")))
}

/// Peels one tree component from its largest endpoints: the rightmost x and
/// rightmost y always form an edge, and in a tree with two or more edges
/// one of them is a leaf, which detaches and lands at the end of the block.
fn peel_component(mut edges: Vec<(usize, usize)>, face: &Face) -> Result<Vec<Letter>> {
    // Sentinel letters use index 0 and are filtered out by the caller.
    if edges.len() == 1 {
        let (s, t) = edges[0];
        return Ok(vec![Letter::x(s), Letter::y(t)]);
    }
    let max_s = edges.iter().map(|&(s, _)| s).max().expect("nonempty");
    let max_t = edges.iter().map(|&(_, t)| t).max().expect("nonempty");
    let top = edges
        .iter()
        .position(|&e| e == (max_s, max_t))
        .ok_or_else(|| {
            Error::NotAFace(format!(
                "component of {face} lacks the extreme edge x{max_s}-y{max_t}"
            ))
        })?;
    let deg_x = edges.iter().filter(|&&(s, _)| s == max_s).count();
    let deg_y = edges.iter().filter(|&&(_, t)| t == max_t).count();
    let leaf = if deg_x == 1 {
        Letter::x(max_s)
    } else if deg_y == 1 {
        Letter::y(max_t)
    } else {
        return Err(Error::NotAFace(format!(
            "component of {face} has a cycle through x{max_s}-y{max_t}"
        )));
    };
    edges.swap_remove(top);
    let mut letters = peel_component(edges, face)?;
    letters.push(leaf);
    Ok(letters)
}

/// The set of words whose facet contains `face` is a closed interval of the
/// bubble order; returns its endpoints.  Requires `m + n` within the word
/// enumeration cap since the check materializes the interval.
pub fn k_interval(face: &Face, p: Params) -> Result<(ShuffleWord, ShuffleWord)> {
    validate_delta_face(face, p)?;
    let words = enumerate_words(p)?;
    let members: Vec<&ShuffleWord> = words
        .iter()
        .filter(|w| {
            let f = phi(w, p);
            face.vertices().all(|v| f.contains(v))
        })
        .collect();
    if members.is_empty() {
        return Err(Error::NotInComplex(format!("no facet contains {face}")));
    }
    let min = members
        .iter()
        .find(|u| members.iter().all(|v| crate::word::leq_bub(u, v)))
        .ok_or(Error::NotBounded("no minimum covering word"))?;
    let max = members
        .iter()
        .find(|u| members.iter().all(|v| crate::word::leq_bub(v, u)))
        .ok_or(Error::NotBounded("no maximum covering word"))?;
    for w in &words {
        let inside = crate::word::leq_bub(min, w) && crate::word::leq_bub(w, max);
        let member = members.contains(&w);
        if inside != member {
            return Err(Error::NotInComplex(format!(
                "covering words of {face} are not an interval: {w}"
            )));
        }
    }
    Ok(((*min).clone(), (*max).clone()))
}
