//! Sparse multivariate polynomials over exact scalars.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors ordered
//! graded-lexicographically with respect to the declared variable list, so
//! iteration order (and hence serialization) is stable across runs. Zero
//! coefficients are never stored: structural equality is polynomial equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An ordered list of variable names shared by all polynomials of one ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRing {
    vars: Vec<String>,
}

impl PolyRing {
    pub fn new<S: Into<String>>(vars: Vec<S>) -> Arc<Self> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        let mut seen = vars.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), vars.len(), "duplicate variable name");
        Arc::new(PolyRing { vars })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }
}

/// Exponent vector, ordered by total degree then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in the variables of its ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    ring: Arc<PolyRing>,
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        MultiPoly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: Scalar) -> Self {
        let mut p = MultiPoly::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; ring.len()]), c);
        }
        p
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        MultiPoly::constant(ring, Scalar::one())
    }

    pub fn var(ring: &Arc<PolyRing>, name: &str) -> Result<Self> {
        let idx = ring.index_of(name)?;
        let mut exps = vec![0; ring.len()];
        exps[idx] = 1;
        let mut p = MultiPoly::zero(ring);
        p.terms.insert(Monomial(exps), Scalar::one());
        Ok(p)
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value of a constant polynomial, if it is one.
    pub fn as_constant(&self) -> Option<Scalar> {
        if self.terms.is_empty() {
            return Some(Scalar::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_constant() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn degree_in(&self, var: &str) -> Result<u32> {
        let idx = self.ring.index_of(var)?;
        Ok(self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0))
    }

    pub fn total_degree(&self) -> u64 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    fn same_ring(&self, other: &MultiPoly) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring,
            "polynomials from different rings"
        );
    }

    fn insert_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = MultiPoly::one(&self.ring);
        for _ in 0..n {
            result = &result * self;
        }
        result
    }

    /// Definite integral from 0 in `var`: `d(result)/d(var) = self` and the
    /// result vanishes at `var = 0`.
    pub fn integrate(&self, var: &str) -> Result<Self> {
        let idx = self.ring.index_of(var)?;
        let mut out = MultiPoly::zero(&self.ring);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            exps[idx] += 1;
            let coeff = c.checked_div(&Scalar::from_int(exps[idx] as i64))?;
            out.insert_term(Monomial(exps), coeff);
        }
        Ok(out)
    }

    /// Formal partial derivative in `var`.
    pub fn differentiate(&self, var: &str) -> Result<Self> {
        let idx = self.ring.index_of(var)?;
        let mut out = MultiPoly::zero(&self.ring);
        for (m, c) in &self.terms {
            if m.0[idx] == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            let e = exps[idx];
            exps[idx] -= 1;
            out.insert_term(Monomial(exps), c * &Scalar::from_int(e as i64));
        }
        Ok(out)
    }

    /// Substitutes polynomials (of the same ring) for variables; unlisted
    /// variables are left alone. Substituting nothing returns `self`.
    pub fn substitute(&self, bindings: &BTreeMap<String, MultiPoly>) -> Result<Self> {
        let mut images: Vec<Option<MultiPoly>> = vec![None; self.ring.len()];
        for (name, value) in bindings {
            self.same_ring(value);
            images[self.ring.index_of(name)?] = Some(value.clone());
        }
        let mut out = MultiPoly::zero(&self.ring);
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(&self.ring, c.clone());
            for (idx, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match &images[idx] {
                    None => {
                        let mut exps = vec![0; self.ring.len()];
                        exps[idx] = e;
                        let mut mono = MultiPoly::zero(&self.ring);
                        mono.terms.insert(Monomial(exps), Scalar::one());
                        term = &term * &mono;
                    }
                    Some(p) => term = &term * &p.pow(e),
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Substitutes scalars for variables. Every variable occurring in the
    /// polynomial must be bound.
    pub fn eval(&self, bindings: &BTreeMap<String, Scalar>) -> Result<Scalar> {
        let mut values: Vec<Option<Scalar>> = vec![None; self.ring.len()];
        for (name, value) in bindings {
            values[self.ring.index_of(name)?] = Some(value.clone());
        }
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (idx, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = values[idx]
                    .as_ref()
                    .ok_or_else(|| Error::UnboundParameter(self.ring.vars()[idx].clone()))?;
                term = &term * &v.pow(e as i64).expect("nonnegative power");
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Scales so the leading (greatest) monomial has coefficient one.
    pub fn monic(&self) -> Self {
        match self.terms.iter().next_back() {
            None => self.clone(),
            Some((_, lead)) => self.scale(&lead.inv().expect("leading coefficient nonzero")),
        }
    }
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.same_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.same_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(m.clone(), -c);
        }
        out
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.same_ring(rhs);
        let mut out = MultiPoly::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for MultiPoly {
    /// Terms in descending graded-lex order, e.g. `-1/12*t^3*x1^3 + t*x3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = matches!(c.sign(), Some(-1));
            let (sign, mag) = if negative {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            let mono = self.format_monomial(m);
            let coeff_str = match &mag {
                Scalar::Gauss(..) => format!("({})", mag),
                _ => mag.to_string(),
            };
            if mono.is_empty() {
                write!(f, "{}", coeff_str)?;
            } else if mag.is_one() {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}*{}", coeff_str, mono)?;
            }
        }
        Ok(())
    }
}

impl MultiPoly {
    fn format_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (idx, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if e == 1 {
                parts.push(self.ring.vars()[idx].clone());
            } else {
                parts.push(format!("{}^{}", self.ring.vars()[idx], e));
            }
        }
        parts.join("*")
    }
}

/// Parses expressions like `-1/240*t^5*x1^5 + 1/12*t^3*x1^2*x3` over a ring.
///
/// Grammar: sums/differences of products of powers; factors are rational
/// literals, variable names, or parenthesized subexpressions. The imaginary
/// unit is written `i` and is accepted when `i` is not a ring variable.
pub fn parse_poly(ring: &Arc<PolyRing>, input: &str) -> Result<MultiPoly> {
    Parser {
        ring,
        bytes: input.as_bytes(),
        pos: 0,
    }
    .parse_all()
}

struct Parser<'a> {
    ring: &'a Arc<PolyRing>,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> Error {
        Error::ParsePoly {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<MultiPoly> {
        let p = self.parse_expr()?;
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return Err(self.error("trailing input"));
        }
        Ok(p)
    }

    fn parse_expr(&mut self) -> Result<MultiPoly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.parse_term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.parse_term()?
            }
            _ => self.parse_term()?,
        };
        while let Some(op) = self.peek() {
            match op {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.parse_term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.parse_term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.parse_factor()?;
        while let Some(b'*') = self.peek() {
            self.pos += 1;
            acc = &acc * &self.parse_factor()?;
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<MultiPoly> {
        let base = self.parse_base()?;
        if let Some(b'^') = self.peek() {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.error("expected exponent"));
            }
            let exp: u32 = std::str::from_utf8(&self.bytes[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.error("exponent out of range"))?;
            return Ok(base.pow(exp));
        }
        Ok(base)
    }

    fn parse_base(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.parse_factor()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_digit() || self.bytes[self.pos] == b'/')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                let value: Scalar = text
                    .parse()
                    .map_err(|_| self.error("bad rational literal"))?;
                Ok(MultiPoly::constant(self.ring, value))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric()
                        || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                if name == "i" && self.ring.index_of("i").is_err() {
                    return Ok(MultiPoly::constant(self.ring, Scalar::i()));
                }
                MultiPoly::var(self.ring, name)
            }
            _ => Err(self.error("expected factor")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Arc<PolyRing> {
        PolyRing::new(vec!["t", "x1", "x2", "x3"])
    }

    fn p(s: &str) -> MultiPoly {
        parse_poly(&ring(), s).unwrap()
    }

    #[test]
    fn integrate_from_zero() {
        assert_eq!(p("x1").integrate("t").unwrap(), p("t*x1"));
        assert_eq!(p("t").integrate("t").unwrap(), p("1/2*t^2"));
        assert_eq!(p("t^2*x1^3").integrate("t").unwrap(), p("1/3*t^3*x1^3"));
        assert!(p("t").integrate("nope").is_err());
    }

    #[test]
    fn integrate_then_differentiate_is_identity() {
        for text in ["0", "x1 - 2*t", "t^3*x2 + 1/7*x3^2 - 5"] {
            let q = p(text);
            assert_eq!(q.integrate("t").unwrap().differentiate("t").unwrap(), q);
        }
    }

    #[test]
    fn substitution() {
        let gamma3 = p("-1/12*t^3*x1^3 + t*x3");
        let mut at_one = BTreeMap::new();
        at_one.insert("t".to_string(), MultiPoly::one(&ring()));
        assert_eq!(gamma3.substitute(&at_one).unwrap(), p("-1/12*x1^3 + x3"));
        let mut at_zero = BTreeMap::new();
        at_zero.insert("t".to_string(), MultiPoly::zero(&ring()));
        assert_eq!(p("1/2*t^2").substitute(&at_zero).unwrap(), p("0"));
        assert_eq!(p("t*x1").substitute(&BTreeMap::new()).unwrap(), p("t*x1"));
    }

    #[test]
    fn display_round_trip_and_order() {
        let q = p("x3 + t*x1 - 1/12*t^3*x1^3");
        let text = q.to_string();
        assert_eq!(text, "-1/12*t^3*x1^3 + t*x1 + x3");
        assert_eq!(parse_poly(&ring(), &text).unwrap(), q);
    }

    #[test]
    fn eval_requires_bindings() {
        let q = p("t*x1 + x2");
        let mut b = BTreeMap::new();
        b.insert("t".to_string(), Scalar::from_int(1));
        b.insert("x1".to_string(), Scalar::ratio(1, 2));
        assert!(q.eval(&b).is_err());
        b.insert("x2".to_string(), Scalar::from_int(3));
        assert_eq!(q.eval(&b).unwrap(), Scalar::ratio(7, 2));
    }

    #[test]
    fn gaussian_coefficients() {
        let r = PolyRing::new(vec!["z"]);
        let q = parse_poly(&r, "i*z + 1").unwrap();
        let w = parse_poly(&r, "i*z - 1").unwrap();
        // (iz+1)(iz-1) = -z^2 - 1
        assert_eq!(&q * &w, parse_poly(&r, "-z^2 - 1").unwrap());
    }
}
