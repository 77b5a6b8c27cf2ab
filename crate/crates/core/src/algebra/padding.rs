//! Padding a c.e. relator stream into a decidable one: the relators
//! enumerated at stage `s` are written at position `s` as `r + s*1 - s*1`,
//! and every other position carries `0 + s*1 - s*1`.

use std::fmt;

use super::poly::Poly;
use super::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedEntry {
    pub position: usize,
    pub relators: Vec<Poly>,
}

impl fmt::Display for PaddedEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.position;
        write!(f, "{s}: ")?;
        if self.relators.is_empty() {
            return write!(f, "0 + {s}*1 - {s}*1");
        }
        let parts: Vec<String> =
            self.relators.iter().map(|r| format!("{r} + {s}*1 - {s}*1")).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl PaddedEntry {
    /// Parses one line of the form printed by `Display`.
    pub fn parse(line: &str, line_no: usize, p: u32) -> Result<Self, AlgebraError> {
        let bad = |reason: String| AlgebraError::Padding { line: line_no, reason };
        let (pos, rest) = line.split_once(':').ok_or_else(|| bad("missing ':'".into()))?;
        let position: usize =
            pos.trim().parse().map_err(|_| bad(format!("bad position {pos:?}")))?;
        let suffix = format!(" + {position}*1 - {position}*1");
        let mut relators = Vec::new();
        for part in rest.trim().split("; ") {
            let body = part
                .strip_suffix(&suffix)
                .ok_or_else(|| bad(format!("padding does not match position {position}")))?;
            let r = Poly::parse(body, p).map_err(|e| bad(e.to_string()))?;
            if !r.is_zero() {
                relators.push(r);
            }
        }
        Ok(Self { position, relators })
    }
}

/// Lays a staged relator stream out by position `0..=last stage`.
pub fn pad_presentation(relators: &[(usize, Poly)]) -> Vec<PaddedEntry> {
    let Some(last) = relators.iter().map(|(s, _)| *s).max() else {
        return Vec::new();
    };
    let mut out: Vec<PaddedEntry> =
        (0..=last).map(|position| PaddedEntry { position, relators: Vec::new() }).collect();
    for (s, r) in relators {
        out[*s].relators.push(r.clone());
    }
    out
}

/// Recovers the staged stream from its padded form.
pub fn unpad(entries: &[PaddedEntry]) -> Vec<(usize, Poly)> {
    entries
        .iter()
        .flat_map(|e| e.relators.iter().map(move |r| (e.position, r.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_relator() {
        let r = Poly::parse("x*y + y*x", 2).unwrap();
        let padded = pad_presentation(&[(3, r.clone())]);
        assert_eq!(padded.len(), 4);
        assert_eq!(padded[3].to_string(), "3: x*y + y*x + 3*1 - 3*1");
        assert_eq!(padded[1].to_string(), "1: 0 + 1*1 - 1*1");
        assert_eq!(unpad(&padded), vec![(3, r)]);
    }

    #[test]
    fn empty_stream() {
        assert!(pad_presentation(&[]).is_empty());
    }

    #[test]
    fn text_round_trip_and_positional_decoding() {
        let a = Poly::parse("x^2", 3).unwrap();
        let b = Poly::parse("2*y*x + x*y", 3).unwrap();
        let c = Poly::parse("y^3", 3).unwrap();
        let stream = vec![(1, a), (4, b), (4, c)];
        let padded = pad_presentation(&stream);
        assert!(padded[2].relators.is_empty() && padded[3].relators.is_empty());
        let text: Vec<String> = padded.iter().map(|e| e.to_string()).collect();
        let back: Vec<PaddedEntry> = text
            .iter()
            .enumerate()
            .map(|(i, l)| PaddedEntry::parse(l, i + 1, 3).unwrap())
            .collect();
        assert_eq!(back, padded);
        assert_eq!(unpad(&back), stream);
        assert!(PaddedEntry::parse("2: x + 3*1 - 3*1", 1, 3).is_err());
    }
}
