//! Exact multivariate polynomials with arbitrary-precision coefficients.
//!
//! [`MultiPoly`] is a sparse polynomial over a fixed, ordered variable list.
//! Coefficients are [`BigInt`]s and evaluation is exact over the rationals,
//! so every comparison made elsewhere in the crate is an exact equality, not
//! a floating-point approximation.
//!
//! The display and serialization order of terms is graded lexicographic,
//! descending: higher total degree first, ties broken by the exponent vector
//! in descending lexicographic order.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used for polynomial evaluation.
pub type Rat = num_rational::BigRational;

/// Convenience constructor for integer-valued rationals.
pub fn rat(i: i64) -> Rat {
    Rat::from_integer(BigInt::from(i))
}

/// Formats a rational as `p/q`, or just `p` when integral.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        r.to_string()
    }
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// A sparse polynomial in the variables `vars`, mapping exponent vectors to
/// nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl MultiPoly {
    /// The zero polynomial in the given variables.
    pub fn zero(vars: Vec<String>) -> Self {
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    /// A constant polynomial.
    pub fn constant(vars: Vec<String>, value: BigInt) -> Self {
        let mut poly = MultiPoly::zero(vars);
        if !value.is_zero() {
            poly.terms.insert(vec![0; poly.vars.len()], value);
        }
        poly
    }

    /// The polynomial `1`.
    pub fn one(vars: Vec<String>) -> Self {
        MultiPoly::constant(vars, BigInt::one())
    }

    /// The polynomial consisting of the single variable `vars[index]`.
    pub fn var(vars: Vec<String>, index: usize) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[index] = 1;
        MultiPoly::monomial(vars, exps, BigInt::one())
    }

    /// A single term `coef * prod vars[i]^exps[i]`.
    pub fn monomial(vars: Vec<String>, exps: Vec<u32>, coef: BigInt) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length mismatch");
        let mut poly = MultiPoly::zero(vars);
        if !coef.is_zero() {
            poly.terms.insert(exps, coef);
        }
        poly
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Largest exponent of one variable across all terms.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// The coefficient of the given exponent vector (zero when absent).
    pub fn coef(&self, exps: &[u32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Adds `coef` to the term with exponents `exps`.
    pub fn add_term(&mut self, exps: Vec<u32>, coef: BigInt) {
        assert_eq!(
            exps.len(),
            self.vars.len(),
            "exponent vector length mismatch"
        );
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(BigInt::zero);
        *entry += coef;
        if entry.is_zero() {
            if let Some(key) = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
            {
                self.terms.remove(&key);
            }
        }
    }

    fn assert_same_vars(&self, other: &MultiPoly) {
        assert_eq!(
            self.vars, other.vars,
            "polynomial arithmetic requires identical variable lists"
        );
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        self.assert_same_vars(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, factor: &BigInt) -> MultiPoly {
        if factor.is_zero() {
            return MultiPoly::zero(self.vars.clone());
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.assert_same_vars(other);
        let mut out = MultiPoly::zero(self.vars.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, mut exp: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut out = MultiPoly::one(self.vars.clone());
        while exp > 0 {
            if exp & 1 == 1 {
                out = out.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Exact evaluation at a rational point, one value per variable.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.vars.len(), "evaluation point arity");
        let mut acc = Rat::zero();
        for (exps, coef) in &self.terms {
            let mut term = Rat::from_integer(coef.clone());
            for (value, &e) in point.iter().zip(exps) {
                if e > 0 {
                    term *= value.pow(e as i32);
                }
            }
            acc += term;
        }
        acc
    }

    /// Evaluation at an integer point.
    pub fn eval_int(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.vars.len(), "evaluation point arity");
        let mut acc = BigInt::zero();
        for (exps, coef) in &self.terms {
            let mut term = coef.clone();
            for (value, &e) in point.iter().zip(exps) {
                for _ in 0..e {
                    term *= value;
                }
            }
            acc += term;
        }
        acc
    }

    /// Substitutes an integer for one variable; the variable stays in the
    /// list with exponent zero everywhere.
    pub fn substitute_int(&self, var: usize, value: &BigInt) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars.clone());
        for (exps, coef) in &self.terms {
            let mut c = coef.clone();
            for _ in 0..exps[var] {
                c *= value;
            }
            let mut e = exps.clone();
            e[var] = 0;
            out.add_term(e, c);
        }
        out
    }

    /// Substitutes another variable of the same polynomial ring for `var`,
    /// e.g. turning `f(q, t)` into `f(q, q)`.
    pub fn substitute_var(&self, var: usize, replacement: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars.clone());
        for (exps, coef) in &self.terms {
            let mut e = exps.clone();
            if var != replacement {
                e[replacement] += e[var];
                e[var] = 0;
            }
            out.add_term(e, coef.clone());
        }
        out
    }

    /// Drops a variable that no term uses.
    pub fn forget_var(&self, var: usize) -> Option<MultiPoly> {
        if self.terms.keys().any(|e| e[var] != 0) {
            return None;
        }
        let vars = self
            .vars
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != var)
            .map(|(_, v)| v.clone())
            .collect();
        let mut out = MultiPoly::zero(vars);
        for (exps, coef) in &self.terms {
            let e = exps
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != var)
                .map(|(_, &x)| x)
                .collect();
            out.add_term(e, coef.clone());
        }
        Some(out)
    }

    /// Iterates terms in storage order; use `terms_canonical` when the
    /// graded-lex serialization order matters.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    /// Substitutes a polynomial of the same ring for one variable.
    pub fn compose_var(&self, var: usize, replacement: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, replacement.vars, "composition ring mismatch");
        let dmax = self.degree_in(var) as usize;
        let mut pows = Vec::with_capacity(dmax + 1);
        pows.push(MultiPoly::one(self.vars.clone()));
        for k in 1..=dmax {
            pows.push(pows[k - 1].mul(replacement));
        }
        let mut out = MultiPoly::zero(self.vars.clone());
        for (exps, coef) in &self.terms {
            let mut rest = exps.clone();
            rest[var] = 0;
            let monomial = MultiPoly::monomial(self.vars.clone(), rest, coef.clone());
            out = out.add(&monomial.mul(&pows[exps[var] as usize]));
        }
        out
    }

    /// Terms in canonical order: total degree descending, then exponent
    /// vectors in descending lexicographic order.
    pub fn terms_canonical(&self) -> Vec<(&Vec<u32>, &BigInt)> {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(ea, _), (eb, _)| {
            let da: u32 = ea.iter().sum();
            let db: u32 = eb.iter().sum();
            db.cmp(&da).then_with(|| eb.cmp(ea))
        });
        terms
    }
}

fn fmt_monomial(f: &mut fmt::Formatter<'_>, vars: &[String], exps: &[u32]) -> fmt::Result {
    let mut first = true;
    for (v, &e) in vars.iter().zip(exps) {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "{v}")?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (pos, (exps, coef)) in self.terms_canonical().into_iter().enumerate() {
            let negative = coef.is_negative();
            if pos == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let magnitude = coef.abs();
            let constant_term = exps.iter().all(|&e| e == 0);
            if constant_term {
                write!(f, "{magnitude}")?;
            } else {
                if !magnitude.is_one() {
                    write!(f, "{magnitude}*")?;
                }
                fmt_monomial(f, &self.vars, exps)?;
            }
        }
        Ok(())
    }
}

/// The standard two-variable ring used by the triangle polynomials.
pub fn qt_vars() -> Vec<String> {
    vec!["q".to_owned(), "t".to_owned()]
}

/// The univariate ring in `q`.
pub fn q_var() -> Vec<String> {
    vec!["q".to_owned()]
}

/// Compares two polynomials term by term and reports the first differing
/// exponent vector, for error messages.
pub fn first_difference(a: &MultiPoly, b: &MultiPoly) -> Option<Vec<u32>> {
    if a == b {
        return None;
    }
    let keys: alloc::collections::BTreeSet<&Vec<u32>> =
        a.terms.keys().chain(b.terms.keys()).collect();
    for k in keys {
        match a.coef(k).cmp(&b.coef(k)) {
            Ordering::Equal => continue,
            _ => return Some(k.clone()),
        }
    }
    None
}
