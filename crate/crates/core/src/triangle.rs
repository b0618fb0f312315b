//! The triangle polynomials attached to the shuffle family, in both their
//! definitional and closed forms, plus the identity verifier.
//!
//! Five polynomial families live here.
//!
//! * `h_triangle`: over all words, `q^in(w) t^indel_in(w)` where `in` counts
//!   lower covers in the bubble order and `indel_in` the indel-generated ones.
//! * `f_triangle`: over all faces of the bipartite complex, `q^edges t^loops`.
//! * `extended_triangles`: the same two sums with one variable per letter, so
//!   each loop label `z` contributes its own `t_z`.
//! * `bw_triangles`: the degree-refined face count `q^delta(F) t^(delta(F)-|F|)`
//!   of an arbitrary complex, with its h-version.
//! * `m_triangle` / `char_poly`: Mobius-function sums over the shuffle order.
//!
//! Identities between these are checked by `verify_identity`.  Every check is
//! decided by exact evaluation: each side is cleared of denominators (the
//! substitutions only ever divide by `q`, `q+1`, `q-1`, `t`, or `1-t`) and the
//! two cleared integer polynomials are compared on an integer grid larger than
//! every per-variable degree bound, so agreement on the grid is equivalent to
//! the identity.  No floating point, no rational-function normalization.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::min;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::complex::{CVertex, Complex, ComplexKind};
use crate::error::{Error, Result};
use crate::poly::{binomial, fmt_rat, q_var, qt_vars, MultiPoly};
use crate::poset::shuf_poset;
use crate::word::{
    downward_labels, enumerate_words, in_degrees, shuf_rank, Letter, LetterKind, Params,
};

/// How a triangle polynomial is computed.  `Definitional` sums over the
/// actual combinatorial objects; `Closed` uses the binomial formula.  For the
/// M-triangle the closed formula is conjectural, so the two modes may in
/// principle disagree there; everywhere else agreement is a theorem that the
/// test suite pins down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Definitional,
    Closed,
}

/// Letter-count cap for the extended triangles (term counts grow as `2^r`).
pub const EXTENDED_CAP: usize = 8;

fn big(i: i64) -> BigInt {
    BigInt::from(i)
}

/// Builds a polynomial from sparse (variable, exponent) specifications.
fn poly_of(vars: &[String], terms: &[(&[(usize, u32)], i64)]) -> MultiPoly {
    let mut out = MultiPoly::zero(vars.to_vec());
    for (spec, coef) in terms {
        let mut exps = vec![0u32; vars.len()];
        for &(v, e) in *spec {
            exps[v] += e;
        }
        out.add_term(exps, big(*coef));
    }
    out
}

/// `binom(m,a) * binom(n,a)`, the number of ways to engage `a` letters of
/// each kind.
fn pair_count(p: Params, a: usize) -> BigInt {
    binomial(p.m, a) * binomial(p.n, a)
}

/// The H-triangle in `q`, `t`.
///
/// Definitional: `sum over words w of q^in(w) t^indel_in(w)`.
/// Closed: `sum over a of binom(m,a) binom(n,a) q^a (qt+1)^(m+n-2a)`.
pub fn h_triangle(p: Params, mode: Mode) -> Result<MultiPoly> {
    let vars = qt_vars();
    match mode {
        Mode::Definitional => {
            let mut acc = MultiPoly::zero(vars);
            for w in enumerate_words(p)? {
                let (a, b) = in_degrees(&w, p);
                acc.add_term(vec![(a + b) as u32, b as u32], BigInt::one());
            }
            Ok(acc)
        }
        Mode::Closed => {
            let qt1 = poly_of(&vars, &[(&[(0, 1), (1, 1)], 1), (&[], 1)]);
            let mut acc = MultiPoly::zero(vars.clone());
            for a in 0..=min(p.m, p.n) {
                let block = qt1.pow((p.r() - 2 * a) as u32).mul(&MultiPoly::monomial(
                    vars.clone(),
                    vec![a as u32, 0],
                    pair_count(p, a),
                ));
                acc = acc.add(&block);
            }
            Ok(acc)
        }
    }
}

/// The F-triangle in `q`, `t`.
///
/// Definitional: `sum over faces of Delta(m,n) of q^|edges| t^|loops|`.
/// Closed: `sum over a of binom(m,a) binom(n,a) q^a (q+1)^a (q+t+1)^(m+n-2a)`.
pub fn f_triangle(p: Params, mode: Mode) -> Result<MultiPoly> {
    let vars = qt_vars();
    match mode {
        Mode::Definitional => {
            let c = Complex::build(ComplexKind::Delta, p)?;
            let mut edge_mask = 0u64;
            for (i, v) in c.vertices().iter().enumerate() {
                if v.is_edge() {
                    edge_mask |= 1 << i;
                }
            }
            let mut acc = MultiPoly::zero(vars);
            for level in c.faces_by_size() {
                for mask in level {
                    let e = (mask & edge_mask).count_ones();
                    let l = (mask & !edge_mask).count_ones();
                    acc.add_term(vec![e, l], BigInt::one());
                }
            }
            Ok(acc)
        }
        Mode::Closed => {
            let qt1 = poly_of(&vars, &[(&[(0, 1)], 1), (&[(1, 1)], 1), (&[], 1)]);
            let q1 = poly_of(&vars, &[(&[(0, 1)], 1), (&[], 1)]);
            let mut acc = MultiPoly::zero(vars.clone());
            for a in 0..=min(p.m, p.n) {
                let block = qt1.pow((p.r() - 2 * a) as u32).mul(&q1.pow(a as u32)).mul(
                    &MultiPoly::monomial(vars.clone(), vec![a as u32, 0], pair_count(p, a)),
                );
                acc = acc.add(&block);
            }
            Ok(acc)
        }
    }
}

/// Variable list for the extended triangles: `q`, then one `t_z` per letter
/// in canonical letter order `x1..xm, y1..yn`.
pub fn extended_vars(p: Params) -> Vec<String> {
    let mut vars = Vec::with_capacity(1 + p.r());
    vars.push("q".to_string());
    for i in 1..=p.m {
        vars.push(format!("t_x{i}"));
    }
    for j in 1..=p.n {
        vars.push(format!("t_y{j}"));
    }
    vars
}

/// Index of letter `z`'s variable within `extended_vars`.
fn letter_var(p: Params, l: Letter) -> usize {
    match l.kind {
        LetterKind::X => l.index,
        LetterKind::Y => p.m + l.index,
    }
}

/// The extended pair `(F-tilde, H-tilde)` with one `t_z` variable per letter.
///
/// `F-tilde` sums `q^|edges| * prod of t_z over loops z` over faces of the
/// bipartite complex; `H-tilde` sums `q^in(w) * prod of t_z over indel labels
/// z` over words.  Specializing every `t_z` to `t` recovers the plain
/// triangles.
pub fn extended_triangles(p: Params) -> Result<(MultiPoly, MultiPoly)> {
    if p.r() > EXTENDED_CAP {
        return Err(Error::CapExceeded {
            what: "extended triangle letter count",
            limit: EXTENDED_CAP,
            got: p.r(),
        });
    }
    let vars = extended_vars(p);

    let c = Complex::build(ComplexKind::Delta, p)?;
    let mut f_ext = MultiPoly::zero(vars.clone());
    for level in c.faces_by_size() {
        for mask in level {
            let mut exps = vec![0u32; vars.len()];
            let mut bits = mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                match c.vertices()[i] {
                    CVertex::Loop(l) => exps[letter_var(p, l)] += 1,
                    CVertex::Edge { .. } => exps[0] += 1,
                }
            }
            f_ext.add_term(exps, BigInt::one());
        }
    }

    let mut h_ext = MultiPoly::zero(vars.clone());
    for w in enumerate_words(p)? {
        let (a, b) = in_degrees(&w, p);
        let mut exps = vec![0u32; vars.len()];
        exps[0] = (a + b) as u32;
        for v in downward_labels(&w, p).vertices() {
            if let CVertex::Loop(l) = v {
                exps[letter_var(p, *l)] += 1;
            }
        }
        h_ext.add_term(exps, BigInt::one());
    }

    Ok((f_ext, h_ext))
}

/// Collapses every per-letter variable to the single `t`, mapping an extended
/// triangle back into the plain `q`, `t` ring.
pub fn collapse_extended(ext: &MultiPoly) -> MultiPoly {
    let mut out = MultiPoly::zero(qt_vars());
    for (exps, coef) in ext.terms() {
        let t: u32 = exps[1..].iter().sum();
        out.add_term(vec![exps[0], t], coef.clone());
    }
    out
}

/// A table of values keyed by (largest containing facet size, face size).
pub type DegreeTable = BTreeMap<(usize, usize), BigInt>;

/// Degree-refined face tables of a complex: `f[(i,j)]` counts faces of size
/// `j` whose largest containing facet has size `i`, and
/// `h[(i,j)] = sum over k of (-1)^(j-k) binom(i-k, j-k) f[(i,k)]`.
pub fn bw_tables(c: &Complex) -> (DegreeTable, DegreeTable) {
    let f: DegreeTable = c
        .bw_distribution()
        .into_iter()
        .map(|(k, v)| (k, BigInt::from(v)))
        .collect();
    let depths: BTreeSet<usize> = f.keys().map(|&(i, _)| i).collect();
    let mut h = BTreeMap::new();
    for &i in &depths {
        for j in 0..=i {
            let mut acc = BigInt::zero();
            for k in 0..=j {
                if let Some(fv) = f.get(&(i, k)) {
                    let term = binomial(i - k, j - k) * fv;
                    if (j - k) % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
            }
            if !acc.is_zero() {
                h.insert((i, j), acc);
            }
        }
    }
    (f, h)
}

/// The degree-refined pair `(F-bw, H-bw)` of a complex in `q`, `t`:
/// `F-bw = sum over faces F of q^delta(F) t^(delta(F) - |F|)` where `delta`
/// is the size of the largest facet containing `F`, and `H-bw` is `F-bw`
/// with `t` replaced by `t - 1`.
pub fn bw_triangles(c: &Complex) -> (MultiPoly, MultiPoly) {
    let (f, h) = bw_tables(c);
    let vars = qt_vars();
    let mut fbw = MultiPoly::zero(vars.clone());
    for (&(i, j), count) in &f {
        fbw.add_term(vec![i as u32, (i - j) as u32], count.clone());
    }
    let mut hbw = MultiPoly::zero(vars);
    for (&(i, j), count) in &h {
        hbw.add_term(vec![i as u32, (i - j) as u32], count.clone());
    }
    (fbw, hbw)
}

/// Closed forms of the degree-refined pair for the noncrossing matching
/// complex on `(m, n)`: `F-bw = q^(m+n) H(1/q, qt)` term by term, and its
/// `t -> t-1` image.
pub fn bw_closed_gamma(p: Params) -> Result<(MultiPoly, MultiPoly)> {
    let h = h_triangle(p, Mode::Closed)?;
    let vars = qt_vars();
    let r = p.r() as u32;
    let mut fbw = MultiPoly::zero(vars.clone());
    for (exps, coef) in h.terms() {
        // q^i t^j  ->  q^(r-i) (qt)^j = q^(r-i+j) t^j
        fbw.add_term(vec![r - exps[0] + exps[1], exps[1]], coef.clone());
    }
    let t_minus_1 = poly_of(&vars, &[(&[(1, 1)], 1), (&[], -1)]);
    let hbw = fbw.compose_var(1, &t_minus_1);
    Ok((fbw, hbw))
}

/// The M-triangle `sum over pairs u <= v in the shuffle order of
/// mu(u,v) q^rank(u) t^rank(v)`.
///
/// `Closed` mode evaluates the conjectured formula
/// `sum over a of binom(m,a) binom(n,a) t^a (1-t)^a (q-1)^a (qt-t+1)^(m+n-2a)`;
/// the verifier compares the two modes.
pub fn m_triangle(p: Params, mode: Mode) -> Result<MultiPoly> {
    let vars = qt_vars();
    match mode {
        Mode::Definitional => {
            let poset = shuf_poset(p)?;
            let ranks: Vec<u32> = poset
                .elements()
                .iter()
                .map(|w| shuf_rank(w, p) as u32)
                .collect();
            let mut acc = MultiPoly::zero(vars);
            for i in 0..poset.len() {
                let row = poset.mobius_row_big(i);
                for (j, mu) in row.iter().enumerate() {
                    if !mu.is_zero() {
                        acc.add_term(vec![ranks[i], ranks[j]], mu.clone());
                    }
                }
            }
            Ok(acc)
        }
        Mode::Closed => {
            let core = poly_of(&vars, &[(&[(0, 1), (1, 1)], 1), (&[(1, 1)], -1), (&[], 1)]);
            let t1t = poly_of(&vars, &[(&[(1, 1)], 1), (&[(1, 2)], -1)]);
            let q1 = poly_of(&vars, &[(&[(0, 1)], 1), (&[], -1)]);
            let mut acc = MultiPoly::zero(vars.clone());
            for a in 0..=min(p.m, p.n) {
                let block = core
                    .pow((p.r() - 2 * a) as u32)
                    .mul(&t1t.pow(a as u32))
                    .mul(&q1.pow(a as u32))
                    .scale(&pair_count(p, a));
                acc = acc.add(&block);
            }
            Ok(acc)
        }
    }
}

/// The characteristic polynomial of the shuffle order in `q`.
///
/// Definitional: `sum over v of mu(bottom, v) q^rank(v)`.
/// Closed: `sum over a of binom(m,a) binom(n,a) (-q)^a (1-q)^(m+n-a)`.
pub fn char_poly(p: Params, mode: Mode) -> Result<MultiPoly> {
    let vars = q_var();
    match mode {
        Mode::Definitional => {
            let poset = shuf_poset(p)?;
            let (bottom, _) = poset.bounds()?;
            let row = poset.mobius_row_big(bottom);
            let mut acc = MultiPoly::zero(vars);
            for (j, mu) in row.iter().enumerate() {
                if !mu.is_zero() {
                    acc.add_term(vec![shuf_rank(&poset.elements()[j], p) as u32], mu.clone());
                }
            }
            Ok(acc)
        }
        Mode::Closed => {
            let one_q = poly_of(&vars, &[(&[], 1), (&[(0, 1)], -1)]);
            let mut acc = MultiPoly::zero(vars.clone());
            for a in 0..=min(p.m, p.n) {
                let sign = if a % 2 == 0 { 1 } else { -1 };
                let block = one_q.pow((p.r() - a) as u32).mul(&MultiPoly::monomial(
                    vars.clone(),
                    vec![a as u32],
                    pair_count(p, a) * big(sign),
                ));
                acc = acc.add(&block);
            }
            Ok(acc)
        }
    }
}

// ---------------------------------------------------------------------------
// Identity verification.
// ---------------------------------------------------------------------------

/// Names of the verifiable identities.  `EulerGamma` and the two conjectures
/// are checked exactly as claimed; a claim that does not hold for the
/// constructed objects is reported as FAIL with a witness, never silently
/// repaired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum IdentityName {
    /// `F(q,t) = q^(m+n) H((q+1)/q, (t+1)/(q+1))`, both sides definitional.
    Fh,
    /// `H(q,t) = (q-1)^(m+n) F(1/(q-1), (1+q(t-1))/(q-1))`.
    FhInverse,
    /// The extended analogue of `FhInverse`, with `(1+q(t_z-1))/(q-1)` per
    /// letter variable.
    ExtendedFh,
    /// `M(q,t) = (1-t)^(m+n) H(t(q-1)/(1-t), q/(q-1))` (conjecture).
    HmConjecture,
    /// Definitional M-triangle equals its conjectured closed formula.
    MClosedConjecture,
    /// `char(q) = q^(m+n) H((q-1)/q, (1-2q)/(q-1))`.
    CharFromH,
    /// `F(q,t) = (-1)^(m+n) F(-1-q, -1-t)`.
    FSymmetry,
    /// `h_i(Delta) = h_(m+n-i)(Delta)` for every `i`.
    DehnSommerville,
    /// `f_Delta(q) = (q+1)^(m+n) h_Delta(q/(q+1))`.
    FhRelation,
    /// `h_Delta(q) = f_Gamma(q)` coefficientwise.
    HIsF,
    /// `M(q,t) = (qt)^(m+n) M(1/t, 1/q)`.
    MSelfDual,
    /// Reduced Euler characteristic of the matching complex equals `(-1)^n`
    /// for `m = n` and `0` otherwise, as claimed.
    EulerGamma,
    /// Reduced Euler characteristic of the bipartite complex equals
    /// `(-1)^(m+n-1)`.
    EulerDelta,
}

impl IdentityName {
    pub const ALL: [IdentityName; 13] = [
        IdentityName::Fh,
        IdentityName::FhInverse,
        IdentityName::ExtendedFh,
        IdentityName::HmConjecture,
        IdentityName::MClosedConjecture,
        IdentityName::CharFromH,
        IdentityName::FSymmetry,
        IdentityName::DehnSommerville,
        IdentityName::FhRelation,
        IdentityName::HIsF,
        IdentityName::MSelfDual,
        IdentityName::EulerGamma,
        IdentityName::EulerDelta,
    ];

    pub const fn name(&self) -> &'static str {
        match self {
            IdentityName::Fh => "fh",
            IdentityName::FhInverse => "fh_inverse",
            IdentityName::ExtendedFh => "extended_fh",
            IdentityName::HmConjecture => "hm_conjecture",
            IdentityName::MClosedConjecture => "m_closed_conjecture",
            IdentityName::CharFromH => "char_from_h",
            IdentityName::FSymmetry => "f_symmetry",
            IdentityName::DehnSommerville => "dehn_sommerville",
            IdentityName::FhRelation => "fh_relation",
            IdentityName::HIsF => "h_is_f",
            IdentityName::MSelfDual => "m_self_dual",
            IdentityName::EulerGamma => "euler_gamma",
            IdentityName::EulerDelta => "euler_delta",
        }
    }

    pub fn parse(s: &str) -> Result<IdentityName> {
        IdentityName::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown identity name: {s}")))
    }
}

/// A failed comparison: the evaluation point (or index) and the two side
/// values there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub point: String,
    pub lhs: String,
    pub rhs: String,
}

/// Outcome of one identity check at one parameter pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: IdentityName,
    pub params: Params,
    pub pass: bool,
    pub witness: Option<Witness>,
}

impl IdentityReport {
    /// The one-line textual form, `<name> <m> <n> PASS|FAIL [witness]`.
    pub fn line(&self) -> String {
        let mut s = format!(
            "{} {} {} {}",
            self.name.name(),
            self.params.m,
            self.params.n,
            if self.pass { "PASS" } else { "FAIL" }
        );
        if let Some(w) = &self.witness {
            s.push_str(&format!(
                " [at {}: lhs = {}, rhs = {}]",
                w.point, w.lhs, w.rhs
            ));
        }
        s
    }
}

/// One side of an identity, `prefactor * base(subs)`.  With `subs` present,
/// base variable `u` is replaced by `num_u / den_u` (polynomials over the
/// outer variables); the side's cleared value at a point multiplies through
/// by `prod of den_u^deg_u(base)`, which `values_at` reports alongside.
struct Side {
    base: MultiPoly,
    prefactor: MultiPoly,
    subs: Option<Vec<(MultiPoly, MultiPoly)>>,
}

impl Side {
    fn plain(base: MultiPoly, outer: &[String]) -> Side {
        Side {
            base,
            prefactor: MultiPoly::one(outer.to_vec()),
            subs: None,
        }
    }

    fn substituted(
        base: MultiPoly,
        prefactor: MultiPoly,
        subs: Vec<(MultiPoly, MultiPoly)>,
    ) -> Side {
        assert_eq!(
            base.vars().len(),
            subs.len(),
            "one substitution per base variable"
        );
        Side {
            base,
            prefactor,
            subs: Some(subs),
        }
    }

    /// Upper bound on the cleared side's degree in outer variable `v`.
    fn value_degree_bound(&self, v: usize) -> u32 {
        let mut d = self.prefactor.degree_in(v);
        match &self.subs {
            None => d += self.base.degree_in(v),
            Some(subs) => {
                for (u, (num, den)) in subs.iter().enumerate() {
                    d += self.base.degree_in(u) * num.degree_in(v).max(den.degree_in(v));
                }
            }
        }
        d
    }

    /// Degree in outer variable `v` of the clearing factor.
    fn clearing_degree_bound(&self, v: usize) -> u32 {
        match &self.subs {
            None => 0,
            Some(subs) => subs
                .iter()
                .enumerate()
                .map(|(u, (_, den))| self.base.degree_in(u) * den.degree_in(v))
                .sum(),
        }
    }

    /// `(cleared value, clearing factor)` at an integer point; the true side
    /// value is their quotient.
    fn values_at(&self, point: &[BigInt]) -> (BigInt, BigInt) {
        let pre = self.prefactor.eval_int(point);
        let subs = match &self.subs {
            None => return (pre * self.base.eval_int(point), BigInt::one()),
            Some(subs) => subs,
        };
        let degs: Vec<u32> = (0..subs.len()).map(|u| self.base.degree_in(u)).collect();
        let mut num_pows = Vec::with_capacity(subs.len());
        let mut den_pows = Vec::with_capacity(subs.len());
        for (u, (num, den)) in subs.iter().enumerate() {
            num_pows.push(pow_table(num.eval_int(point), degs[u]));
            den_pows.push(pow_table(den.eval_int(point), degs[u]));
        }
        let mut acc = BigInt::zero();
        for (exps, coef) in self.base.terms() {
            let mut term = coef.clone();
            for (u, &e) in exps.iter().enumerate() {
                term *= &num_pows[u][e as usize];
                term *= &den_pows[u][(degs[u] - e) as usize];
            }
            acc += term;
        }
        let mut clearing = BigInt::one();
        for (u, &d) in degs.iter().enumerate() {
            clearing *= &den_pows[u][d as usize];
        }
        (pre * acc, clearing)
    }
}

fn pow_table(value: BigInt, max_exp: u32) -> Vec<BigInt> {
    let mut table = Vec::with_capacity(max_exp as usize + 1);
    table.push(BigInt::one());
    for k in 1..=max_exp as usize {
        let next = &table[k - 1] * &value;
        table.push(next);
    }
    table
}

/// Points per outer variable needed to separate the two cleared sides.
fn points_needed(lhs: &Side, rhs: &Side, v: usize) -> u32 {
    let forward = lhs.value_degree_bound(v) + rhs.clearing_degree_bound(v);
    let backward = rhs.value_degree_bound(v) + lhs.clearing_degree_bound(v);
    forward.max(backward) + 1
}

/// The standard evaluation grid `{2, ..., 3r+5}` (always at least 4 points),
/// avoiding every denominator root `0`, `1`, `-1`.
fn spec_grid(r: usize) -> Vec<BigInt> {
    (2..=(3 * r + 5) as i64).map(BigInt::from).collect()
}

/// Compares two sides on a per-variable integer grid.  The grids must exceed
/// the cleared degree bounds (asserted), which makes pointwise agreement
/// equivalent to the polynomial identity.  Returns the first mismatch.
fn grid_check(outer: &[String], lhs: &Side, rhs: &Side, grids: &[Vec<BigInt>]) -> Option<Witness> {
    assert_eq!(grids.len(), outer.len(), "one grid per outer variable");
    for v in 0..outer.len() {
        assert!(
            grids[v].len() as u32 >= points_needed(lhs, rhs, v),
            "grid for {} is smaller than the degree bound",
            outer[v]
        );
    }
    let mut idx = vec![0usize; grids.len()];
    loop {
        let point: Vec<BigInt> = idx.iter().zip(grids).map(|(&i, g)| g[i].clone()).collect();
        let (la, ld) = lhs.values_at(&point);
        let (ra, rd) = rhs.values_at(&point);
        if &la * &rd != &ra * &ld {
            let lv = BigRational::new(la, ld);
            let rv = BigRational::new(ra, rd);
            let rendered: Vec<String> = outer
                .iter()
                .zip(&point)
                .map(|(v, x)| format!("{v}={x}"))
                .collect();
            return Some(Witness {
                point: rendered.join(", "),
                lhs: fmt_rat(&lv),
                rhs: fmt_rat(&rv),
            });
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return None;
            }
            idx[k] += 1;
            if idx[k] < grids[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Checks one named identity at `(m, n)` by exact grid evaluation (or exact
/// integer comparison for the vector and Euler identities).  `Err` means the
/// computation could not run (caps); `pass == false` means it ran and the
/// claimed identity does not hold, with a witness.
pub fn verify_identity(name: IdentityName, p: Params) -> Result<IdentityReport> {
    let qt = qt_vars();
    let r = p.r() as u32;
    // Building blocks over (q, t).
    let q_ = poly_of(&qt, &[(&[(0, 1)], 1)]);
    let t_ = poly_of(&qt, &[(&[(1, 1)], 1)]);
    let q1 = poly_of(&qt, &[(&[(0, 1)], 1), (&[], 1)]);
    let qm1 = poly_of(&qt, &[(&[(0, 1)], 1), (&[], -1)]);
    let t1 = poly_of(&qt, &[(&[(1, 1)], 1), (&[], 1)]);
    let one_t = poly_of(&qt, &[(&[], 1), (&[(1, 1)], -1)]);

    let witness = match name {
        IdentityName::Fh => {
            let f = f_triangle(p, Mode::Definitional)?;
            let h = h_triangle(p, Mode::Definitional)?;
            let lhs = Side::plain(f, &qt);
            let rhs = Side::substituted(h, q_.pow(r), vec![(q1.clone(), q_), (t1, q1)]);
            grid_check(&qt, &lhs, &rhs, &[spec_grid(p.r()), spec_grid(p.r())])
        }
        IdentityName::FhInverse => {
            let f = f_triangle(p, Mode::Definitional)?;
            let h = h_triangle(p, Mode::Definitional)?;
            // 1 + q(t-1) = qt - q + 1
            let qt_q1 = poly_of(&qt, &[(&[(0, 1), (1, 1)], 1), (&[(0, 1)], -1), (&[], 1)]);
            let one = MultiPoly::one(qt.clone());
            let lhs = Side::plain(h, &qt);
            let rhs = Side::substituted(
                f,
                qm1.pow(r),
                vec![(one, qm1.clone()), (qt_q1, qm1.clone())],
            );
            grid_check(&qt, &lhs, &rhs, &[spec_grid(p.r()), spec_grid(p.r())])
        }
        IdentityName::ExtendedFh => {
            let evars = extended_vars(p);
            let (f_ext, h_ext) = extended_triangles(p)?;
            let e_qm1 = poly_of(&evars, &[(&[(0, 1)], 1), (&[], -1)]);
            let e_one = MultiPoly::one(evars.clone());
            let mut subs = vec![(e_one, e_qm1.clone())];
            for z in 1..=p.r() {
                // 1 + q(t_z - 1) = q*t_z - q + 1
                let num = poly_of(&evars, &[(&[(0, 1), (z, 1)], 1), (&[(0, 1)], -1), (&[], 1)]);
                subs.push((num, e_qm1.clone()));
            }
            let lhs = Side::plain(h_ext, &evars);
            let rhs = Side::substituted(f_ext, e_qm1.pow(r), subs);
            let mut grids = vec![spec_grid(p.r())];
            for z in 1..=p.r() {
                let pts = points_needed(&lhs, &rhs, z) as i64;
                grids.push((2..2 + pts).map(BigInt::from).collect());
            }
            grid_check(&evars, &lhs, &rhs, &grids)
        }
        IdentityName::HmConjecture => {
            let m_def = m_triangle(p, Mode::Definitional)?;
            let h = h_triangle(p, Mode::Definitional)?;
            // t(q-1) = qt - t
            let qt_t = poly_of(&qt, &[(&[(0, 1), (1, 1)], 1), (&[(1, 1)], -1)]);
            let lhs = Side::plain(m_def, &qt);
            let rhs = Side::substituted(h, one_t.pow(r), vec![(qt_t, one_t), (q_, qm1)]);
            grid_check(&qt, &lhs, &rhs, &[spec_grid(p.r()), spec_grid(p.r())])
        }
        IdentityName::MClosedConjecture => {
            let m_def = m_triangle(p, Mode::Definitional)?;
            let m_closed = m_triangle(p, Mode::Closed)?;
            let lhs = Side::plain(m_def, &qt);
            let rhs = Side::plain(m_closed, &qt);
            grid_check(&qt, &lhs, &rhs, &[spec_grid(p.r()), spec_grid(p.r())])
        }
        IdentityName::CharFromH => {
            let qv = q_var();
            let ch = char_poly(p, Mode::Definitional)?;
            let h = h_triangle(p, Mode::Definitional)?;
            let uq = poly_of(&qv, &[(&[(0, 1)], 1)]);
            let uqm1 = poly_of(&qv, &[(&[(0, 1)], 1), (&[], -1)]);
            let u_1_2q = poly_of(&qv, &[(&[], 1), (&[(0, 1)], -2)]);
            let lhs = Side::plain(ch, &qv);
            let rhs = Side::substituted(
                h,
                uq.pow(r),
                vec![(uqm1.clone(), uq.clone()), (u_1_2q, uqm1)],
            );
            grid_check(&qv, &lhs, &rhs, &[spec_grid(p.r())])
        }
        IdentityName::FSymmetry => {
            let f = f_triangle(p, Mode::Definitional)?;
            let m1_q = poly_of(&qt, &[(&[], -1), (&[(0, 1)], -1)]);
            let m1_t = poly_of(&qt, &[(&[], -1), (&[(1, 1)], -1)]);
            let one = MultiPoly::one(qt.clone());
            let sign = MultiPoly::constant(qt.clone(), big(if p.r() % 2 == 0 { 1 } else { -1 }));
            let lhs = Side::plain(f.clone(), &qt);
            let rhs = Side::substituted(f, sign, vec![(m1_q, one.clone()), (m1_t, one)]);
            grid_check(&qt, &lhs, &rhs, &[spec_grid(p.r()), spec_grid(p.r())])
        }
        IdentityName::DehnSommerville => {
            let d = Complex::build(ComplexKind::Delta, p)?;
            let h = d.h_vector();
            assert_eq!(h.len(), p.r() + 1, "bipartite complex h-vector length");
            let mut found = None;
            for i in 0..=p.r() {
                if h[i] != h[p.r() - i] {
                    found = Some(Witness {
                        point: format!("i={i}"),
                        lhs: h[i].to_string(),
                        rhs: h[p.r() - i].to_string(),
                    });
                    break;
                }
            }
            found
        }
        IdentityName::FhRelation => {
            let qv = q_var();
            let d = Complex::build(ComplexKind::Delta, p)?;
            let uq = poly_of(&qv, &[(&[(0, 1)], 1)]);
            let uq1 = poly_of(&qv, &[(&[(0, 1)], 1), (&[], 1)]);
            let lhs = Side::plain(d.f_poly(), &qv);
            let rhs = Side::substituted(d.h_poly(), uq1.pow(r), vec![(uq, uq1.clone())]);
            grid_check(&qv, &lhs, &rhs, &[spec_grid(p.r())])
        }
        IdentityName::HIsF => {
            let qv = q_var();
            let d = Complex::build(ComplexKind::Delta, p)?;
            let g = Complex::build(ComplexKind::Gamma, p)?;
            let lhs = Side::plain(d.h_poly(), &qv);
            let rhs = Side::plain(g.f_poly(), &qv);
            grid_check(&qv, &lhs, &rhs, &[spec_grid(p.r())])
        }
        IdentityName::MSelfDual => {
            let m_def = m_triangle(p, Mode::Definitional)?;
            let one = MultiPoly::one(qt.clone());
            let qt_r = MultiPoly::monomial(qt.clone(), vec![r, r], BigInt::one());
            let lhs = Side::plain(m_def.clone(), &qt);
            let rhs = Side::substituted(m_def, qt_r, vec![(one.clone(), t_), (one, q_)]);
            grid_check(&qt, &lhs, &rhs, &[spec_grid(p.r()), spec_grid(p.r())])
        }
        IdentityName::EulerGamma => {
            let g = Complex::build(ComplexKind::Gamma, p)?;
            let actual = g.reduced_euler();
            let claimed = if p.m == p.n {
                big(if p.n % 2 == 0 { 1 } else { -1 })
            } else {
                BigInt::zero()
            };
            integer_witness("reduced Euler characteristic", &actual, &claimed)
        }
        IdentityName::EulerDelta => {
            let d = Complex::build(ComplexKind::Delta, p)?;
            let actual = d.reduced_euler();
            let claimed = big(if (p.r() + 1) % 2 == 0 { 1 } else { -1 });
            integer_witness("reduced Euler characteristic", &actual, &claimed)
        }
    };
    Ok(IdentityReport {
        name,
        params: p,
        pass: witness.is_none(),
        witness,
    })
}

fn integer_witness(what: &str, actual: &BigInt, claimed: &BigInt) -> Option<Witness> {
    if actual == claimed {
        None
    } else {
        Some(Witness {
            point: what.to_string(),
            lhs: actual.to_string(),
            rhs: claimed.to_string(),
        })
    }
}
