use std::fmt;

use super::AlgebraError;

/// Longest word a [`Monomial`] can hold.
pub const MAX_DEGREE: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    X,
    Y,
}

/// A word over `{x, y}` packed one bit per letter (`x = 0`, `y = 1`, first
/// letter most significant).
///
/// Ordering is by degree, then lexicographic with `x < y`; within a degree
/// the packed bits are exactly the index of the monomial in the basis of
/// `F_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    len: u8,
    bits: u64,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { len: 0, bits: 0 };

    pub fn x() -> Self {
        Self { len: 1, bits: 0 }
    }

    pub fn y() -> Self {
        Self { len: 1, bits: 1 }
    }

    /// The `index`-th monomial of degree `degree` in lexicographic order.
    pub fn from_index(degree: usize, index: u64) -> Self {
        debug_assert!(degree <= MAX_DEGREE);
        debug_assert!(degree == 64 || index < (1u64 << degree));
        Self { len: degree as u8, bits: index }
    }

    pub fn from_letters(letters: &[Letter]) -> Result<Self, AlgebraError> {
        if letters.len() > MAX_DEGREE {
            return Err(AlgebraError::DegreeOverflow(letters.len()));
        }
        let bits = letters.iter().fold(0u64, |acc, l| (acc << 1) | (*l == Letter::Y) as u64);
        Ok(Self { len: letters.len() as u8, bits })
    }

    /// `letter^exp`.
    pub fn power(letter: Letter, exp: usize) -> Result<Self, AlgebraError> {
        Self::from_letters(&vec![letter; exp])
    }

    pub fn degree(&self) -> usize {
        self.len as usize
    }

    /// Position in the lexicographic basis of its degree.
    pub fn index(&self) -> u64 {
        self.bits
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.len)
            .rev()
            .map(|i| if (self.bits >> i) & 1 == 1 { Letter::Y } else { Letter::X })
            .collect()
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Monomial) -> Result<Self, AlgebraError> {
        let len = self.degree() + other.degree();
        if len > MAX_DEGREE {
            return Err(AlgebraError::DegreeOverflow(len));
        }
        Ok(Self { len: len as u8, bits: (self.bits << other.len) | other.bits })
    }

    /// Maximal runs of equal letters, e.g. `x²yx³ -> [(X,2),(Y,1),(X,3)]`.
    pub fn runs(&self) -> Vec<(Letter, usize)> {
        let mut runs: Vec<(Letter, usize)> = Vec::new();
        for l in self.letters() {
            match runs.last_mut() {
                Some((last, n)) if *last == l => *n += 1,
                _ => runs.push((l, 1)),
            }
        }
        runs
    }

    /// All monomials of degree `degree`, in basis order.
    pub fn all_of_degree(degree: usize) -> impl Iterator<Item = Monomial> {
        (0..1u64 << degree).map(move |i| Monomial::from_index(degree, i))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return write!(f, "1");
        }
        let parts: Vec<&str> = self
            .letters()
            .iter()
            .map(|l| match l {
                Letter::X => "x",
                Letter::Y => "y",
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}
