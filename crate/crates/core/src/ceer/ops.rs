use std::collections::HashMap;

use super::pairing::unpair;
use super::{CeerError, CeerTable, Stage};

/// `⊕_j X^j`: `<j, n>` is related to `<j', m>` iff `j = j'` and `n X^j m`.
///
/// Columns beyond `columns.len()` are identity columns. Every index below
/// `bound` must decode to a position inside its column's bound.
pub fn uniform_join(columns: &[CeerTable], bound: usize) -> Result<CeerTable, CeerError> {
    for z in 0..bound {
        let (j, n) = unpair(z);
        if let Some(col) = columns.get(j) {
            if n >= col.bound() {
                return Err(CeerError::OutOfRange { index: n, bound: col.bound() });
            }
        }
    }
    let mut stages: Vec<Stage> = columns.iter().flat_map(|c| c.stages()).collect();
    stages.sort_unstable();
    stages.dedup();
    let mut out = CeerTable::identity(bound);
    for s in stages {
        let snaps: Vec<_> = columns.iter().map(|c| c.snapshot(s)).collect();
        let mut first: HashMap<(usize, usize), usize> = HashMap::new();
        for z in 0..bound {
            let (j, n) = unpair(z);
            let Some(snap) = snaps.get(j) else { continue };
            let anchor = *first.entry((j, snap.rep(n).expect("checked"))).or_insert(z);
            if anchor != z && !out.related(anchor, z, s)? {
                out.assert_pair(anchor, z, s)?;
            }
        }
    }
    Ok(out)
}

/// `A × B` on Cantor-coded pairs below `bound`: related at stage `s` iff both
/// coordinates are related at `s`.
pub fn product(a: &CeerTable, b: &CeerTable, bound: usize) -> Result<CeerTable, CeerError> {
    let coords: Vec<(usize, usize)> = (0..bound).map(unpair).collect();
    for &(x, y) in &coords {
        if x >= a.bound() {
            return Err(CeerError::OutOfRange { index: x, bound: a.bound() });
        }
        if y >= b.bound() {
            return Err(CeerError::OutOfRange { index: y, bound: b.bound() });
        }
    }
    let mut stages: Vec<Stage> = a.stages().into_iter().chain(b.stages()).collect();
    stages.sort_unstable();
    stages.dedup();
    let mut out = CeerTable::identity(bound);
    for s in stages {
        let (pa, pb) = (a.snapshot(s), b.snapshot(s));
        let mut first: HashMap<(usize, usize), usize> = HashMap::new();
        for (z, &(x, y)) in coords.iter().enumerate() {
            let key = (pa.rep(x).expect("checked"), pb.rep(y).expect("checked"));
            let anchor = *first.entry(key).or_insert(z);
            if anchor != z && !out.related(anchor, z, s)? {
                out.assert_pair(anchor, z, s)?;
            }
        }
    }
    Ok(out)
}
