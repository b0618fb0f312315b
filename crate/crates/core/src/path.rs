//! Colored Delannoy paths and their bijections with faces and flags of the
//! loop-free matching complex.
//!
//! A path walks from `(0, 0)` to `(m, n)` using east steps `E`, north steps
//! `N`, and diagonal steps `D1, ..., Dq` in one of `q` colors.  A peak (an
//! `N` step immediately followed by an `E` step) at the point `(i, j)`
//! corresponds to the edge `(i+1, j)`; a color-`k` diagonal from
//! `(s-1, t-1)` to `(s, t)` corresponds to the edge `(s, t)` entering a
//! nested chain at level `k`.  Together these identify `q`-colored paths
//! with `(q+1)`-flags of faces, and plain monotone paths (`q = 0`) with
//! single faces.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::binomial;
use crate::word::Params;

/// One step of a path: east, north, or a colored diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Step {
    E,
    N,
    D(usize),
}

impl Step {
    pub const fn dx(&self) -> usize {
        match self {
            Step::E | Step::D(_) => 1,
            Step::N => 0,
        }
    }

    pub const fn dy(&self) -> usize {
        match self {
            Step::N | Step::D(_) => 1,
            Step::E => 0,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::E => write!(f, "E"),
            Step::N => write!(f, "N"),
            Step::D(c) => write!(f, "D{c}"),
        }
    }
}

/// Parses `E`, `N`, or `D<color>` with a positive color.
pub fn parse_step(s: &str) -> Result<Step> {
    match s {
        "E" => Ok(Step::E),
        "N" => Ok(Step::N),
        _ => {
            let c = s
                .strip_prefix('D')
                .and_then(|c| c.parse::<usize>().ok())
                .filter(|&c| c >= 1)
                .ok_or_else(|| Error::Parse(format!("bad step: {s:?}")))?;
            Ok(Step::D(c))
        }
    }
}

/// A colored Delannoy path, stored as its step sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DelannoyPath {
    steps: Vec<Step>,
}

impl DelannoyPath {
    pub fn new(steps: Vec<Step>) -> Result<DelannoyPath> {
        if let Some(bad) = steps.iter().find(|s| matches!(s, Step::D(0))) {
            return Err(Error::Parse(format!(
                "diagonal color must be positive: {bad}"
            )));
        }
        Ok(DelannoyPath { steps })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The endpoint `(m, n)` the path reaches from the origin.
    pub fn end(&self) -> (usize, usize) {
        let m = self.steps.iter().map(|s| s.dx()).sum();
        let n = self.steps.iter().map(|s| s.dy()).sum();
        (m, n)
    }

    /// The largest color used, `0` when there is no diagonal step.
    pub fn max_color(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match s {
                Step::D(c) => *c,
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Points reached by an `N` step and left by an `E` step, in path order.
    /// The start and end of the path are never peaks.
    pub fn peaks(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let (mut x, mut y) = (0, 0);
        for k in 0..self.steps.len() {
            x += self.steps[k].dx();
            y += self.steps[k].dy();
            if self.steps[k] == Step::N && k + 1 < self.steps.len() && self.steps[k + 1] == Step::E
            {
                out.push((x, y));
            }
        }
        out
    }

    /// The diagonal steps as `(s, t, color)` where the step runs from
    /// `(s-1, t-1)` to `(s, t)`, in path order.
    pub fn diagonals(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        let (mut x, mut y) = (0, 0);
        for step in &self.steps {
            x += step.dx();
            y += step.dy();
            if let Step::D(c) = step {
                out.push((x, y, *c));
            }
        }
        out
    }
}

impl fmt::Display for DelannoyPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return write!(f, "-");
        }
        for (k, step) in self.steps.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

/// Parses a space-separated step sequence; `-` is the empty path.
pub fn parse_path(s: &str) -> Result<DelannoyPath> {
    let trimmed = s.trim();
    if trimmed == "-" || trimmed.is_empty() {
        return DelannoyPath::new(Vec::new());
    }
    let steps = trimmed
        .split_whitespace()
        .map(parse_step)
        .collect::<Result<Vec<_>>>()?;
    DelannoyPath::new(steps)
}

/// Caps for exhaustive path enumeration.
pub const PATH_LENGTH_CAP: usize = 14;
pub const PATH_COLOR_CAP: usize = 6;

/// Enforces the enumeration caps `m + n <= 14`, `q <= 6`.
pub fn check_path_caps(p: Params, q: usize) -> Result<()> {
    if p.r() > PATH_LENGTH_CAP {
        return Err(Error::CapExceeded {
            what: "path grid semiperimeter",
            limit: PATH_LENGTH_CAP,
            got: p.r(),
        });
    }
    if q > PATH_COLOR_CAP {
        return Err(Error::CapExceeded {
            what: "path color count",
            limit: PATH_COLOR_CAP,
            got: q,
        });
    }
    Ok(())
}

/// All `q`-colored Delannoy paths to `(m, n)`, in lexicographic order of
/// their step sequences under `E < N < D1 < ... < Dq`.
pub fn enumerate_delannoy(p: Params, q: usize) -> Result<Vec<DelannoyPath>> {
    check_path_caps(p, q)?;
    Ok(enumerate_delannoy_unbounded(p, q))
}

/// Uncapped variant of `enumerate_delannoy`.
pub fn enumerate_delannoy_unbounded(p: Params, q: usize) -> Vec<DelannoyPath> {
    let mut out = Vec::new();
    let mut steps = Vec::with_capacity(p.r());
    walk(p, q, 0, 0, &mut steps, &mut out);
    out
}

fn walk(
    p: Params,
    q: usize,
    x: usize,
    y: usize,
    steps: &mut Vec<Step>,
    out: &mut Vec<DelannoyPath>,
) {
    if x == p.m && y == p.n {
        out.push(DelannoyPath {
            steps: steps.clone(),
        });
        return;
    }
    if x < p.m {
        steps.push(Step::E);
        walk(p, q, x + 1, y, steps, out);
        steps.pop();
    }
    if y < p.n {
        steps.push(Step::N);
        walk(p, q, x, y + 1, steps, out);
        steps.pop();
    }
    if x < p.m && y < p.n {
        for c in 1..=q {
            steps.push(Step::D(c));
            walk(p, q, x + 1, y + 1, steps, out);
            steps.pop();
        }
    }
}

/// `sum over a of binom(m,a) binom(n,a) (q+1)^a`, the number of `q`-colored
/// Delannoy paths to `(m, n)`.
pub fn count_delannoy(p: Params, q: usize) -> BigInt {
    let q1 = BigInt::from(q as u64 + 1);
    let mut acc = BigInt::zero();
    let mut q1_pow = BigInt::one();
    for a in 0..=p.m.min(p.n) {
        acc += binomial(p.m, a) * binomial(p.n, a) * &q1_pow;
        q1_pow *= &q1;
    }
    acc
}

/// A nested chain of edge sets, one set per color level.  Level `0` holds
/// the peak edges; level `k` adds the color-`k` diagonal edges.
pub type EdgeChain = Vec<BTreeSet<(usize, usize)>>;

/// Reads off the `(q+1)`-term nested edge chain of a `q`-colored path.
pub fn flag_from_path(path: &DelannoyPath, q: usize) -> Result<EdgeChain> {
    if path.max_color() > q {
        return Err(Error::Parse(format!(
            "path uses color {} but only {} are allowed",
            path.max_color(),
            q
        )));
    }
    let mut chain: EdgeChain = vec![BTreeSet::new(); q + 1];
    for (i, j) in path.peaks() {
        chain[0].insert((i + 1, j));
    }
    for (s, t, c) in path.diagonals() {
        chain[c].insert((s, t));
    }
    for k in 1..chain.len() {
        let lower = chain[k - 1].clone();
        chain[k].extend(lower);
    }
    Ok(chain)
}

/// The single edge set of a plain monotone path (no diagonal steps): one
/// edge `(i+1, j)` per peak `(i, j)`.
pub fn face_from_path(path: &DelannoyPath) -> Result<BTreeSet<(usize, usize)>> {
    Ok(flag_from_path(path, 0)?.pop().expect("chain level 0"))
}

/// Validates the chain and merges it into one feature list sorted by the
/// `x`-endpoint: `(s, t, level)` where `level` is the chain index at which
/// the edge first appears.
fn chain_features(
    chain: &[BTreeSet<(usize, usize)>],
    p: Params,
) -> Result<Vec<(usize, usize, usize)>> {
    if chain.is_empty() {
        return Err(Error::NotAFace("empty chain".to_string()));
    }
    for k in 1..chain.len() {
        if !chain[k - 1].is_subset(&chain[k]) {
            return Err(Error::NotAFace(format!(
                "chain level {k} does not contain level {}",
                k - 1
            )));
        }
    }
    let mut features = Vec::new();
    for &(s, t) in chain.last().expect("nonempty chain") {
        if s < 1 || s > p.m || t < 1 || t > p.n {
            return Err(Error::NotAFace(format!("edge ({s}, {t}) leaves the grid")));
        }
        let level = chain
            .iter()
            .position(|g| g.contains(&(s, t)))
            .expect("edge taken from the last level");
        features.push((s, t, level));
    }
    features.sort_unstable();
    for w in features.windows(2) {
        let ((s1, t1, _), (s2, t2, _)) = (w[0], w[1]);
        if s1 == s2 || t1 >= t2 {
            return Err(Error::NotAFace(format!(
                "edges ({s1}, {t1}) and ({s2}, {t2}) cross or share an endpoint"
            )));
        }
    }
    Ok(features)
}

/// Rebuilds the unique path with the given nested edge chain: level-0 edges
/// become peaks, level-`k` edges become color-`k` diagonals, and the gaps
/// are filled east-then-north so no unmarked peak appears.
pub fn path_from_flag(chain: &[BTreeSet<(usize, usize)>], p: Params) -> Result<DelannoyPath> {
    let features = chain_features(chain, p)?;
    let mut steps = Vec::new();
    let (mut x, mut y) = (0, 0);
    let fill = |steps: &mut Vec<Step>, x: &mut usize, y: &mut usize, tx: usize, ty: usize| {
        while *x < tx {
            steps.push(Step::E);
            *x += 1;
        }
        while *y < ty {
            steps.push(Step::N);
            *y += 1;
        }
    };
    for (s, t, level) in features {
        fill(&mut steps, &mut x, &mut y, s - 1, t - 1);
        if level == 0 {
            steps.push(Step::N);
            steps.push(Step::E);
        } else {
            steps.push(Step::D(level));
        }
        x = s;
        y = t;
    }
    fill(&mut steps, &mut x, &mut y, p.m, p.n);
    DelannoyPath::new(steps)
}

/// Rebuilds the plain monotone path whose peak edges are the given face.
pub fn path_from_face(face: &BTreeSet<(usize, usize)>, p: Params) -> Result<DelannoyPath> {
    path_from_flag(core::slice::from_ref(face), p)
}

/// The two path families on a square grid singled out by staying weakly
/// below the main diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchroderKind {
    /// Peaks `(i, j)` satisfy `i >= j` and diagonal steps into `(s, t)`
    /// satisfy `s >= t`.
    Schroder,
    /// Additionally no diagonal step lies on the main diagonal (`s = t`).
    LittleSchroder,
}

impl SchroderKind {
    pub const fn name(&self) -> &'static str {
        match self {
            SchroderKind::Schroder => "schroder",
            SchroderKind::LittleSchroder => "little-schroder",
        }
    }
}

/// Whether a path on a square grid stays weakly below the main diagonal,
/// with the little variant also banning diagonal steps on it.  Only defined
/// for `m = n`.
pub fn is_schroder(path: &DelannoyPath, kind: SchroderKind) -> Result<bool> {
    let (m, n) = path.end();
    if m != n {
        return Err(Error::SquareOnly("the diagonal path families"));
    }
    let peaks_ok = path.peaks().iter().all(|&(i, j)| i >= j);
    let diag_ok = path.diagonals().iter().all(|&(s, t, _)| match kind {
        SchroderKind::Schroder => s >= t,
        SchroderKind::LittleSchroder => s > t,
    });
    Ok(peaks_ok && diag_ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;

    use crate::complex::{CVertex, Complex, ComplexKind, Face};
    use crate::triangle::{h_triangle, Mode};
    use num_traits::ToPrimitive;

    fn pp(m: usize, n: usize) -> Params {
        Params::new(m, n)
    }

    fn edges(list: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        list.iter().copied().collect()
    }

    fn face_of(edges: &BTreeSet<(usize, usize)>) -> Face {
        let mut f = Face::empty();
        for &(s, t) in edges {
            f.insert(CVertex::edge(s, t));
        }
        f
    }

    #[test]
    fn step_serialization_roundtrips() {
        for s in ["E", "N", "D1", "D4"] {
            assert_eq!(parse_step(s).unwrap().to_string(), s);
        }
        assert!(parse_step("D0").is_err());
        assert!(parse_step("X").is_err());
        let path = parse_path("E D2 N").unwrap();
        assert_eq!(path.to_string(), "E D2 N");
        assert_eq!(path.end(), (2, 2));
        assert_eq!(
            parse_path("-").unwrap(),
            DelannoyPath::new(Vec::new()).unwrap()
        );
        assert_eq!(parse_path("-").unwrap().to_string(), "-");
    }

    #[test]
    fn unit_square_enumeration_is_ordered() {
        let paths = enumerate_delannoy(pp(1, 1), 1).unwrap();
        let rendered: Vec<String> = paths.iter().map(|p| p.to_string()).collect();
        assert_eq!(rendered, ["E N", "N E", "D1"]);
    }

    #[test]
    fn counts_match_enumeration() {
        for m in 0..=3 {
            for n in 0..=3 {
                for q in 0..=3 {
                    let p = pp(m, n);
                    let listed = enumerate_delannoy(p, q).unwrap().len();
                    assert_eq!(
                        count_delannoy(p, q).to_usize().unwrap(),
                        listed,
                        "at ({m}, {n}) with {q} colors"
                    );
                }
            }
        }
        assert_eq!(count_delannoy(pp(2, 2), 2), BigInt::from(22));
        assert_eq!(enumerate_delannoy(pp(2, 2), 2).unwrap().len(), 22);
    }

    #[test]
    fn uncolored_count_is_binomial() {
        for m in 0..=5 {
            for n in 0..=5 {
                assert_eq!(count_delannoy(pp(m, n), 0), binomial(m + n, n));
            }
        }
    }

    #[test]
    fn count_matches_flag_generating_value() {
        for m in 0..=3 {
            for n in 0..=3 {
                for q in 0..=3 {
                    let p = pp(m, n);
                    let h = h_triangle(p, Mode::Closed).unwrap();
                    let flags = h.eval_int(&[BigInt::from(q as u64 + 1), BigInt::zero()]);
                    assert_eq!(count_delannoy(p, q), flags);
                }
            }
        }
    }

    #[test]
    fn enumeration_caps_are_enforced() {
        assert!(matches!(
            enumerate_delannoy(pp(8, 7), 0),
            Err(Error::CapExceeded {
                limit: 14,
                got: 15,
                ..
            })
        ));
        assert!(matches!(
            enumerate_delannoy(pp(1, 1), 7),
            Err(Error::CapExceeded {
                limit: 6,
                got: 7,
                ..
            })
        ));
    }

    #[test]
    fn unit_square_peak_maps_to_the_edge() {
        let path = parse_path("N E").unwrap();
        assert_eq!(path.peaks(), vec![(0, 1)]);
        assert_eq!(face_from_path(&path).unwrap(), edges(&[(1, 1)]));
        assert_eq!(path_from_face(&edges(&[(1, 1)]), pp(1, 1)).unwrap(), path);
        assert_eq!(
            face_from_path(&parse_path("E N").unwrap()).unwrap(),
            edges(&[])
        );
    }

    #[test]
    fn monotone_paths_biject_with_loop_free_faces() {
        for m in 0..=3 {
            for n in 0..=3 {
                let p = pp(m, n);
                let c = Complex::build(ComplexKind::GammaPlus, p).unwrap();
                let mut complex_faces = BTreeSet::new();
                for level in c.faces_by_size() {
                    for mask in level {
                        let mut set = BTreeSet::new();
                        for v in c.face_from_mask(mask).vertices() {
                            if let CVertex::Edge { x, y } = v {
                                set.insert((*x, *y));
                            }
                        }
                        complex_faces.insert(set);
                    }
                }
                let mut path_faces = BTreeSet::new();
                for path in enumerate_delannoy(p, 0).unwrap() {
                    let face = face_from_path(&path).unwrap();
                    assert_eq!(path_from_face(&face, p).unwrap(), path);
                    path_faces.insert(face);
                }
                assert_eq!(path_faces, complex_faces, "at ({m}, {n})");
            }
        }
    }

    #[test]
    fn colored_paths_roundtrip_through_flags() {
        for m in 0..=3 {
            for n in 0..=3 {
                for q in 0..=3 {
                    let p = pp(m, n);
                    let c = Complex::build(ComplexKind::GammaPlus, p).unwrap();
                    let mut seen = BTreeSet::new();
                    for path in enumerate_delannoy(p, q).unwrap() {
                        let chain = flag_from_path(&path, q).unwrap();
                        assert_eq!(chain.len(), q + 1);
                        for level in &chain {
                            assert!(c.contains_face(&face_of(level)));
                        }
                        assert_eq!(path_from_flag(&chain, p).unwrap(), path);
                        seen.insert(chain);
                    }
                    assert_eq!(
                        BigInt::from(seen.len()),
                        count_delannoy(p, q),
                        "flags at ({m}, {n}) with {q} colors"
                    );
                }
            }
        }
    }

    #[test]
    fn worked_flag_example_roundtrips() {
        let p = pp(14, 13);
        let path = parse_path("N E N D4 N N E D2 E N E D1 E D2 D2 E E D1 N N E").unwrap();
        assert_eq!(path.end(), (14, 13));
        let g0 = edges(&[(1, 1), (3, 5), (6, 7), (14, 13)]);
        let mut g1 = g0.clone();
        g1.extend([(7, 8), (13, 11)]);
        let mut g2 = g1.clone();
        g2.extend([(4, 6), (9, 9), (10, 10)]);
        let g3 = g2.clone();
        let mut g4 = g3.clone();
        g4.insert((2, 3));
        let chain = vec![g0, g1, g2, g3, g4];
        assert_eq!(flag_from_path(&path, 4).unwrap(), chain);
        assert_eq!(path_from_flag(&chain, p).unwrap(), path);
    }

    #[test]
    fn flag_rejects_bad_chains() {
        assert!(flag_from_path(&parse_path("D2").unwrap(), 1).is_err());
        // Not nested.
        let chain = vec![edges(&[(1, 1)]), edges(&[(2, 2)])];
        assert!(path_from_flag(&chain, pp(2, 2)).is_err());
        // Crossing pair.
        assert!(path_from_flag(&[edges(&[(1, 2), (2, 1)])], pp(2, 2)).is_err());
        // Shared endpoint.
        assert!(path_from_flag(&[edges(&[(1, 1), (1, 2)])], pp(2, 2)).is_err());
        // Out of range.
        assert!(path_from_flag(&[edges(&[(3, 1)])], pp(2, 2)).is_err());
        assert!(path_from_flag(&[], pp(1, 1)).is_err());
    }

    #[test]
    fn schroder_counts_match_classical_values() {
        // One color: the classical large and small families.
        let expect_big = [1usize, 2, 6, 22];
        let expect_little = [1usize, 1, 3, 11];
        for n in 0..=3 {
            let paths = enumerate_delannoy(pp(n, n), 1).unwrap();
            let big = paths
                .iter()
                .filter(|p| is_schroder(p, SchroderKind::Schroder).unwrap())
                .count();
            let little = paths
                .iter()
                .filter(|p| is_schroder(p, SchroderKind::LittleSchroder).unwrap())
                .count();
            assert_eq!(big, expect_big[n], "large family at n = {n}");
            assert_eq!(little, expect_little[n], "small family at n = {n}");
        }
    }

    #[test]
    fn uncolored_schroder_paths_are_catalan_counted() {
        let catalan = [1usize, 1, 2, 5, 14];
        for (n, &want) in catalan.iter().enumerate() {
            let count = enumerate_delannoy(pp(n, n), 0)
                .unwrap()
                .iter()
                .filter(|p| is_schroder(p, SchroderKind::Schroder).unwrap())
                .count();
            assert_eq!(count, want, "at n = {n}");
        }
    }

    #[test]
    fn uncolored_schroder_faces_are_the_left_leaning_faces() {
        for n in 1..=4 {
            let p = pp(n, n);
            let c = Complex::build(ComplexKind::LeftLeaning, p).unwrap();
            let mut complex_faces = BTreeSet::new();
            for level in c.faces_by_size() {
                for mask in level {
                    let mut set = BTreeSet::new();
                    for v in c.face_from_mask(mask).vertices() {
                        if let CVertex::Edge { x, y } = v {
                            set.insert((*x, *y));
                        }
                    }
                    complex_faces.insert(set);
                }
            }
            let mut path_faces = BTreeSet::new();
            for path in enumerate_delannoy(p, 0).unwrap() {
                if is_schroder(&path, SchroderKind::Schroder).unwrap() {
                    path_faces.insert(face_from_path(&path).unwrap());
                }
            }
            assert_eq!(path_faces, complex_faces, "at n = {n}");
        }
    }

    #[test]
    fn schroder_filter_requires_square_grid() {
        let path = parse_path("E").unwrap();
        assert!(matches!(
            is_schroder(&path, SchroderKind::Schroder),
            Err(Error::SquareOnly(_))
        ));
    }

    #[test]
    fn h_statistic_counts_peaks_and_diagonals() {
        // The closed H value at (q ones, t) generates paths by feature count:
        // substituting q -> q+1, t -> 0 counts flags, refining by total
        // feature count matches the coefficientwise identity used above.
        let p = pp(2, 2);
        let paths = enumerate_delannoy(p, 2).unwrap();
        let mut by_features = [0usize; 8];
        for path in &paths {
            by_features[path.peaks().len() + path.diagonals().len()] += 1;
        }
        let h = h_triangle(p, Mode::Closed).unwrap();
        let mut expect = [0usize; 8];
        for (exps, coef) in h.terms() {
            if exps[1] == 0 {
                // q^a with t-degree zero: a engaged pairs, each colorable
                // three ways.
                expect[exps[0] as usize] += coef.to_usize().unwrap() * 3usize.pow(exps[0]);
            }
        }
        assert_eq!(by_features, expect);
    }
}
