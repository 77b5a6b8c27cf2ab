use std::collections::BTreeMap;
use std::fmt;

use super::GroupError;

/// Sparse exponent vector of an abelian word: generator -> nonzero exponent.
pub type ExponentVector = BTreeMap<usize, i64>;

/// `x_gen^exp`, `exp ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub exp: i64,
}

impl Letter {
    pub fn new(gen: usize, exp: i64) -> Self {
        Self { gen, exp }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exp {
            1 => write!(f, "x{}", self.gen),
            e => write!(f, "x{}^{}", self.gen, e),
        }
    }
}

/// A word in the generators `x_i`, kept as written (no cancellation).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

fn parse_letter(token: &str, input: &str) -> Result<Letter, GroupError> {
    let bad = |reason: &str| GroupError::Parse { input: input.to_string(), reason: reason.into() };
    let body = token.strip_prefix('x').ok_or_else(|| bad("letters look like x3 or x3^-1"))?;
    let (gen, exp) = match body.split_once('^') {
        Some((g, e)) => (g, e.parse::<i64>().map_err(|_| bad("bad exponent"))?),
        None => (body, 1),
    };
    let gen = gen.parse::<usize>().map_err(|_| bad("bad generator index"))?;
    if exp == 0 {
        return Err(bad("zero exponent"));
    }
    Ok(Letter { gen, exp })
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn gen(gen: usize) -> Self {
        Word(vec![Letter::new(gen, 1)])
    }

    pub fn power(gen: usize, exp: i64) -> Self {
        if exp == 0 {
            Word::empty()
        } else {
            Word(vec![Letter::new(gen, exp)])
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| Letter::new(l.gen, -l.exp)).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Free reduction: adjacent letters on the same generator are merged and
    /// zero exponents dropped.
    pub fn freely_reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for &l in &self.0 {
            match out.last_mut() {
                Some(top) if top.gen == l.gen => {
                    top.exp += l.exp;
                    if top.exp == 0 {
                        out.pop();
                    }
                }
                _ => out.push(l),
            }
        }
        Word(out)
    }

    /// Abelianized word.
    pub fn exponents(&self) -> ExponentVector {
        let mut v = ExponentVector::new();
        for l in &self.0 {
            let e = v.entry(l.gen).or_insert(0);
            *e += l.exp;
            if *e == 0 {
                v.remove(&l.gen);
            }
        }
        v
    }

    /// The word `Π x_i^{e_i}` in increasing generator order.
    pub fn from_exponents(v: &ExponentVector) -> Word {
        Word(v.iter().filter(|(_, &e)| e != 0).map(|(&g, &e)| Letter::new(g, e)).collect())
    }

    /// Whitespace-separated `x3`, `x3^-1`, `x3^2`; `1` is the empty word.
    pub fn parse(text: &str) -> Result<Word, GroupError> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            if token != "1" {
                letters.push(parse_letter(token, text)?);
            }
        }
        Ok(Word(letters))
    }

    /// Each letter expanded into `|exp|` unit letters.
    pub fn unit_letters(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.0.iter().flat_map(|l| {
            std::iter::repeat_n((l.gen, l.exp < 0), l.exp.unsigned_abs() as usize)
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(Letter::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `g_0 a g_1 a … a g_n` in `G * (Z/2Z)`, `a` the generator of `Z/2Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StarWord {
    pub pieces: Vec<Word>,
}

impl StarWord {
    pub fn new(pieces: Vec<Word>) -> Self {
        assert!(!pieces.is_empty(), "a star word has at least one G-piece");
        Self { pieces }
    }

    /// Number of `a` letters.
    pub fn a_count(&self) -> usize {
        self.pieces.len() - 1
    }

    pub fn parse(text: &str) -> Result<StarWord, GroupError> {
        let mut pieces = vec![Word::empty()];
        for token in text.split_whitespace() {
            match token {
                "a" => pieces.push(Word::empty()),
                "1" => {}
                t => pieces.last_mut().expect("nonempty").0.push(parse_letter(t, text)?),
            }
        }
        Ok(StarWord { pieces })
    }

    pub fn inverse(&self) -> StarWord {
        StarWord { pieces: self.pieces.iter().rev().map(Word::inverse).collect() }
    }

    pub fn concat(&self, other: &StarWord) -> StarWord {
        let mut pieces = self.pieces.clone();
        let last = pieces.pop().expect("nonempty");
        pieces.push(last.concat(&other.pieces[0]));
        pieces.extend(other.pieces[1..].iter().cloned());
        StarWord { pieces }
    }
}

impl fmt::Display for StarWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut tokens: Vec<String> = Vec::new();
        for (i, piece) in self.pieces.iter().enumerate() {
            if i > 0 {
                tokens.push("a".into());
            }
            tokens.extend(piece.0.iter().map(Letter::to_string));
        }
        if tokens.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", tokens.join(" "))
    }
}

/// Bijections between words and naturals. A word is first spelled as unit
/// letters `x_g^{±1}`, coded `2g` and `2g+1`.
///
/// * `Infinite`: the letter sequence under the crate-wide sequence coding,
///   for infinitely generated groups.
/// * `Finite(k)`: bijective base-`2k` numeration over `k` generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordCodec {
    Infinite,
    Finite(usize),
}

fn checked_pair(a: usize, b: usize) -> Option<usize> {
    let d = a.checked_add(b)?;
    let t = d.checked_mul(d.checked_add(1)?)? / 2;
    t.checked_add(b)
}

impl WordCodec {
    pub fn encode(&self, w: &Word) -> Result<usize, GroupError> {
        let codes: Vec<usize> = w.unit_letters().map(|(g, inv)| 2 * g + inv as usize).collect();
        match *self {
            WordCodec::Infinite => codes
                .iter()
                .rev()
                .try_fold(0usize, |acc, &c| checked_pair(c, acc)?.checked_add(1))
                .ok_or(GroupError::CodeOverflow),
            WordCodec::Finite(k) => {
                let base = 2 * k;
                let mut acc = 0usize;
                for c in codes {
                    if c >= base {
                        return Err(GroupError::Alphabet { code: c, gens: k });
                    }
                    acc = acc
                        .checked_mul(base)
                        .and_then(|v| v.checked_add(c + 1))
                        .ok_or(GroupError::CodeOverflow)?;
                }
                Ok(acc)
            }
        }
    }

    pub fn decode(&self, code: usize) -> Word {
        let codes: Vec<usize> = match *self {
            WordCodec::Infinite => crate::ceer::pairing::decode_seq(code),
            WordCodec::Finite(k) => {
                let base = 2 * k;
                let mut digits = Vec::new();
                let mut n = code;
                while n > 0 {
                    let d = (n - 1) % base;
                    digits.push(d);
                    n = (n - 1) / base;
                }
                digits.reverse();
                digits
            }
        };
        Word(
            codes
                .into_iter()
                .map(|c| Letter::new(c / 2, if c % 2 == 0 { 1 } else { -1 }))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_syntax_round_trips() {
        for s in ["1", "x3", "x3^-1", "x0 x1^2 x0^-1"] {
            assert_eq!(Word::parse(s).unwrap().to_string(), s);
        }
        assert!(Word::parse("y3").is_err());
        assert!(Word::parse("x3^0").is_err());
        for s in ["1", "a", "x1 a x2", "a a x0^-1 a"] {
            assert_eq!(StarWord::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(StarWord::parse("x1 a a").unwrap().pieces.len(), 3);
    }

    #[test]
    fn free_reduction_and_exponents() {
        let w = Word::parse("x1 x2 x2^-1 x1 x3").unwrap();
        assert_eq!(w.freely_reduced().to_string(), "x1^2 x3");
        assert_eq!(w.exponents(), ExponentVector::from([(1, 2), (3, 1)]));
        assert_eq!(Word::parse("x4 x4^-1").unwrap().freely_reduced(), Word::empty());
    }

    #[test]
    fn codecs_are_bijective_on_small_codes() {
        for codec in [WordCodec::Infinite, WordCodec::Finite(2)] {
            for n in 0..500 {
                assert_eq!(codec.encode(&codec.decode(n)).unwrap(), n, "{codec:?} {n}");
            }
        }
        assert_eq!(WordCodec::Finite(1).decode(3).to_string(), "x0 x0");
        assert!(WordCodec::Finite(1).encode(&Word::gen(1)).is_err());
        assert!(WordCodec::Infinite.encode(&Word::power(3, 9)).is_err());
    }

    #[test]
    fn star_word_inverse() {
        let w = StarWord::parse("x1 a x2^-1").unwrap();
        assert_eq!(w.inverse().to_string(), "x2 a x1^-1");
        assert_eq!(w.concat(&w.inverse()).to_string(), "x1 a x2^-1 x2 a x1^-1");
    }
}
