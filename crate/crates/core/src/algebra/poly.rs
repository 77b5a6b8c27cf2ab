use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::monomial::{Letter, Monomial};
use super::AlgebraError;

/// Primes accepted as the coefficient modulus.
pub const SUPPORTED_PRIMES: [u32; 4] = [2, 3, 5, 7];

pub fn check_prime(p: u32) -> Result<u32, AlgebraError> {
    if SUPPORTED_PRIMES.contains(&p) {
        Ok(p)
    } else {
        Err(AlgebraError::UnsupportedModulus(p))
    }
}

/// Multiplicative inverse in `Z/pZ`, `a ≠ 0`.
pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    // p is tiny, so Fermat by repeated multiplication is fine.
    let mut acc = 1u32;
    for _ in 0..p - 2 {
        acc = acc * a % p;
    }
    acc
}

/// Element of the free algebra `(Z/pZ)<x, y>`.
///
/// Canonical: zero coefficients are never stored, so structural equality is
/// equality in the algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    p: u32,
    terms: BTreeMap<Monomial, u32>,
}

impl Poly {
    pub fn zero(p: u32) -> Self {
        Self { p, terms: BTreeMap::new() }
    }

    pub fn constant(p: u32, c: i64) -> Self {
        Self::term(p, Monomial::ONE, c)
    }

    pub fn one(p: u32) -> Self {
        Self::constant(p, 1)
    }

    pub fn term(p: u32, m: Monomial, c: i64) -> Self {
        let mut out = Self::zero(p);
        out.add_term(m, c.rem_euclid(p as i64) as u32);
        out
    }

    pub fn monomial(p: u32, m: Monomial) -> Self {
        Self::term(p, m, 1)
    }

    pub fn x(p: u32) -> Self {
        Self::monomial(p, Monomial::x())
    }

    pub fn y(p: u32) -> Self {
        Self::monomial(p, Monomial::y())
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Largest degree present, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|e| e == d),
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: u32) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry = (*entry + c) % self.p;
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    fn same_modulus(&self, other: &Poly) -> Result<(), AlgebraError> {
        if self.p != other.p {
            return Err(AlgebraError::ModulusMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.same_modulus(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(*m, c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.checked_add(&other.neg_ref())
    }

    fn neg_ref(&self) -> Poly {
        self.scale(self.p - 1)
    }

    pub fn scale(&self, c: u32) -> Poly {
        let mut out = Poly::zero(self.p);
        for (m, d) in self.terms() {
            out.add_term(*m, c % self.p * d);
        }
        out
    }

    /// Non-commutative product; term degrees add.
    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.mul_truncated(other, usize::MAX)
    }

    /// Product with every term of degree above `max_degree` dropped. Since
    /// `F_{>D}` is an ideal this is the product in `F / F_{>D}`.
    pub fn mul_truncated(&self, other: &Poly, max_degree: usize) -> Result<Poly, AlgebraError> {
        self.same_modulus(other)?;
        let mut out = Poly::zero(self.p);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if a.degree() + b.degree() > max_degree {
                    // terms are sorted by degree, so the rest are larger too
                    break;
                }
                out.add_term(a.concat(b)?, ca * cb);
            }
        }
        Ok(out)
    }

    /// Drops every component of degree above `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> Poly {
        Poly {
            p: self.p,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= max_degree)
                .map(|(m, &c)| (*m, c))
                .collect(),
        }
    }

    /// Degree-`k` homogeneous component.
    pub fn component(&self, k: usize) -> Poly {
        Poly {
            p: self.p,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == k)
                .map(|(m, &c)| (*m, c))
                .collect(),
        }
    }

    /// The nonzero homogeneous components, keyed by degree.
    pub fn homogeneous_components(&self) -> BTreeMap<usize, Poly> {
        let mut out: BTreeMap<usize, Poly> = BTreeMap::new();
        for (m, c) in self.terms() {
            out.entry(m.degree()).or_insert_with(|| Poly::zero(self.p)).add_term(*m, c);
        }
        out
    }

    /// Parses the text form, e.g. `"1 + x*y + 2*y*x"`, `"x^3*y - y"`.
    pub fn parse(text: &str, p: u32) -> Result<Poly, AlgebraError> {
        check_prime(p)?;
        Parser { src: text, chars: text.char_indices().peekable(), p }.poly()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, &c)| match (c, m.degree()) {
                (_, 0) => c.to_string(),
                (1, _) => m.to_string(),
                _ => format!("{c}*{m}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).expect("moduli agree")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs).expect("moduli agree")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("moduli agree and degrees fit")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_ref()
    }
}

/// `u · v`, failing on a modulus mismatch.
pub fn poly_mul(u: &Poly, v: &Poly) -> Result<Poly, AlgebraError> {
    u.checked_mul(v)
}

struct Parser<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    p: u32,
}

impl Parser<'_> {
    fn err(&self, at: usize, what: &str) -> AlgebraError {
        AlgebraError::Parse { input: self.src.to_string(), at, reason: what.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn pos(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |&(i, _)| i)
    }

    fn number(&mut self) -> Option<u64> {
        let mut digits = String::new();
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        digits.parse().ok()
    }

    fn poly(&mut self) -> Result<Poly, AlgebraError> {
        let mut out = Poly::zero(self.p);
        let mut sign = 1i64;
        self.skip_ws();
        if self.chars.peek().is_some_and(|&(_, c)| c == '-') {
            self.chars.next();
            sign = -1;
        }
        loop {
            let t = self.term()?;
            out = &out + &if sign < 0 { -&t } else { t };
            self.skip_ws();
            match self.chars.next() {
                None => return Ok(out),
                Some((_, '+')) => sign = 1,
                Some((_, '-')) => sign = -1,
                Some((i, _)) => return Err(self.err(i, "expected '+' or '-'")),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, AlgebraError> {
        let mut coeff = 1u64;
        let mut letters: Vec<Letter> = Vec::new();
        loop {
            self.skip_ws();
            let at = self.pos();
            match self.chars.peek().map(|&(_, c)| c) {
                Some(c) if c.is_ascii_digit() => {
                    let n = self.number().ok_or_else(|| self.err(at, "bad number"))?;
                    coeff = coeff * (n % self.p as u64) % self.p as u64;
                }
                Some(c @ ('x' | 'y')) => {
                    self.chars.next();
                    let letter = if c == 'x' { Letter::X } else { Letter::Y };
                    let mut exp = 1;
                    if self.chars.peek().is_some_and(|&(_, c)| c == '^') {
                        self.chars.next();
                        exp = self.number().ok_or_else(|| self.err(at, "bad exponent"))? as usize;
                    }
                    letters.extend(std::iter::repeat_n(letter, exp));
                }
                _ => return Err(self.err(at, "expected a coefficient or a letter")),
            }
            self.skip_ws();
            if self.chars.peek().is_some_and(|&(_, c)| c == '*') {
                self.chars.next();
            } else {
                break;
            }
        }
        Ok(Poly::term(self.p, Monomial::from_letters(&letters)?, coeff as i64))
    }
}
