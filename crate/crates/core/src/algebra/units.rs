use std::fmt;

use super::ideal::HomogeneousIdeal;
use super::monomial::{Letter, Monomial};
use super::poly::Poly;
use super::AlgebraError;

/// `X ↦ 1+x`, `Y ↦ 1+y` and their inverses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnitLetter {
    X,
    Y,
    XInv,
    YInv,
}

impl UnitLetter {
    pub fn inverse(self) -> Self {
        match self {
            UnitLetter::X => UnitLetter::XInv,
            UnitLetter::Y => UnitLetter::YInv,
            UnitLetter::XInv => UnitLetter::X,
            UnitLetter::YInv => UnitLetter::Y,
        }
    }

    fn base(self) -> Letter {
        match self {
            UnitLetter::X | UnitLetter::XInv => Letter::X,
            UnitLetter::Y | UnitLetter::YInv => Letter::Y,
        }
    }

    fn is_inverse(self) -> bool {
        matches!(self, UnitLetter::XInv | UnitLetter::YInv)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitWord(pub Vec<UnitLetter>);

impl UnitWord {
    /// `x ↦ X`, `y ↦ Y`, so the top component of the image is `m` itself.
    pub fn from_monomial(m: &Monomial) -> Self {
        UnitWord(
            m.letters()
                .into_iter()
                .map(|l| if l == Letter::X { UnitLetter::X } else { UnitLetter::Y })
                .collect(),
        )
    }

    pub fn inverse(&self) -> Self {
        UnitWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &UnitWord) -> Self {
        UnitWord(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses `"X Y X^-1"`; `"X^3"` abbreviates `"X X X"` and `"1"` is the
    /// empty word.
    pub fn parse(text: &str) -> Result<Self, AlgebraError> {
        let mut letters = Vec::new();
        let mut at = 0;
        for token in text.split_whitespace() {
            let here = at;
            let bad = |reason: &str| AlgebraError::Parse {
                input: text.to_string(),
                at: here,
                reason: reason.to_string(),
            };
            at += token.len() + 1;
            if token == "1" {
                continue;
            }
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().map_err(|_| bad("bad exponent"))?),
                None => (token, 1),
            };
            let letter = match name {
                "X" => UnitLetter::X,
                "Y" => UnitLetter::Y,
                _ => return Err(bad("expected X or Y")),
            };
            let letter = if exp < 0 { letter.inverse() } else { letter };
            letters.extend(std::iter::repeat_n(letter, exp.unsigned_abs() as usize));
        }
        Ok(UnitWord(letters))
    }
}

impl fmt::Display for UnitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|l| match l {
                UnitLetter::X => "X",
                UnitLetter::Y => "Y",
                UnitLetter::XInv => "X^-1",
                UnitLetter::YInv => "Y^-1",
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `Σ_{i<N} (-1)^i t^i` for `t ∈ {x, y}`, inverse to `1+t` modulo `t^N`.
pub fn unit_inverse(letter: Letter, exponent: usize, p: u32) -> Result<Poly, AlgebraError> {
    let mut out = Poly::zero(p);
    for i in 0..exponent {
        let sign = if i % 2 == 0 { 1 } else { -1 };
        out = &out + &Poly::term(p, Monomial::power(letter, i)?, sign);
    }
    Ok(out)
}

fn letter_image(l: UnitLetter, exponent: usize, p: u32) -> Result<Poly, AlgebraError> {
    let t = Poly::monomial(p, Monomial::power(l.base(), 1)?);
    if l.is_inverse() {
        unit_inverse(l.base(), exponent, p)
    } else {
        Ok(&Poly::one(p) + &t)
    }
}

/// Image of `w` in `F / (I + F_{>D})`.
pub fn unit_word_to_poly(
    w: &UnitWord,
    exponent: usize,
    ideal: &HomogeneousIdeal,
    horizon: usize,
) -> Result<Poly, AlgebraError> {
    let p = ideal.modulus();
    if exponent < 2 {
        return Err(AlgebraError::UnitExponent(exponent));
    }
    for letter in [Letter::X, Letter::Y] {
        if !ideal.has_generator(&Poly::monomial(p, Monomial::power(letter, exponent)?)) {
            return Err(AlgebraError::MissingUnitRelations { exponent });
        }
    }
    let mut acc = Poly::one(p);
    for &l in &w.0 {
        acc = acc.mul_truncated(&letter_image(l, exponent, p)?, horizon)?;
    }
    ideal.quotient_reduce(&acc, horizon)
}

/// Product of the top homogeneous components of the letter images. For a
/// word without inverses this is the monomial spelled by the word.
pub fn unit_top_component(w: &UnitWord, exponent: usize, p: u32) -> Result<Poly, AlgebraError> {
    let mut acc = Poly::one(p);
    for &l in &w.0 {
        let image = letter_image(l, exponent, p)?;
        let top = image.component(image.degree().unwrap_or(0));
        acc = acc.checked_mul(&top)?;
    }
    Ok(acc)
}
