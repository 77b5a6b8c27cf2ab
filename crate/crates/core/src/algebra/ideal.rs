use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::monomial::{Monomial, MAX_DEGREE};
use super::poly::{check_prime, inv_mod, Poly};
use super::AlgebraError;

/// Row-echelon basis of a subspace of `F_k`, columns indexed by monomial
/// index. Each row is keyed by its pivot, the largest column in its support,
/// and has pivot coefficient 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EchelonBasis {
    degree: usize,
    p: u32,
    rows: BTreeMap<u64, Vec<(u64, u32)>>,
}

impl EchelonBasis {
    pub fn new(degree: usize, p: u32) -> Self {
        Self { degree, p, rows: BTreeMap::new() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.rows.keys().map(move |&c| Monomial::from_index(self.degree, c))
    }

    /// Rows as polynomials, in pivot order.
    pub fn rows(&self) -> Vec<Poly> {
        self.rows
            .values()
            .map(|row| {
                let mut f = Poly::zero(self.p);
                for &(c, a) in row {
                    f.add_term(Monomial::from_index(self.degree, c), a);
                }
                f
            })
            .collect()
    }

    /// Canonical representative of `v` modulo the span: no pivot column
    /// survives.
    pub fn reduce(&self, mut v: BTreeMap<u64, u32>) -> BTreeMap<u64, u32> {
        let p = self.p;
        let mut out = BTreeMap::new();
        while let Some((col, a)) = v.pop_last() {
            match self.rows.get(&col) {
                None => {
                    out.insert(col, a);
                }
                Some(row) => {
                    let factor = p - a;
                    for &(c, b) in &row[1..] {
                        let e = v.entry(c).or_insert(0);
                        *e = (*e + factor * b) % p;
                        if *e == 0 {
                            v.remove(&c);
                        }
                    }
                }
            }
        }
        out
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: BTreeMap<u64, u32>) -> bool {
        let r = self.reduce(v);
        let Some((&pivot, &lead)) = r.last_key_value() else {
            return false;
        };
        let scale = inv_mod(lead, self.p);
        let row = r.iter().rev().map(|(&c, &a)| (c, a * scale % self.p)).collect();
        self.rows.insert(pivot, row);
        true
    }

    pub fn contains(&self, v: BTreeMap<u64, u32>) -> bool {
        self.reduce(v).is_empty()
    }
}

fn vector_of(f: &Poly) -> BTreeMap<u64, u32> {
    f.terms().map(|(m, c)| (m.index(), c)).collect()
}

/// Adds every `u · h · v` of total degree `basis.degree()` to `basis`.
fn insert_products(basis: &mut EchelonBasis, h: &Poly, d: usize) {
    let k = basis.degree;
    if d > k {
        return;
    }
    let h_terms: Vec<(u64, u32)> = h.terms().map(|(m, c)| (m.index(), c)).collect();
    for a in 0..=k - d {
        let b = k - d - a;
        for u in 0..1u64 << a {
            for v in 0..1u64 << b {
                let row = h_terms
                    .iter()
                    .map(|&(m, c)| ((u << (d + b)) | (m << b) | v, c))
                    .collect();
                basis.insert(row);
            }
        }
    }
}

/// Two-sided ideal of `F` generated by homogeneous polynomials, materialized
/// degree by degree up to the horizon `maxdeg`.
#[derive(Debug, Clone)]
pub struct HomogeneousIdeal {
    p: u32,
    maxdeg: usize,
    generators: Vec<Poly>,
    cache: Vec<OnceLock<EchelonBasis>>,
}

impl HomogeneousIdeal {
    pub fn new(p: u32, maxdeg: usize) -> Result<Self, AlgebraError> {
        check_prime(p)?;
        if maxdeg > MAX_DEGREE {
            return Err(AlgebraError::DegreeOverflow(maxdeg));
        }
        Ok(Self {
            p,
            maxdeg,
            generators: Vec::new(),
            cache: (0..=maxdeg).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn with_generators(
        p: u32,
        maxdeg: usize,
        gens: impl IntoIterator<Item = Poly>,
    ) -> Result<Self, AlgebraError> {
        let mut ideal = Self::new(p, maxdeg)?;
        for g in gens {
            ideal.add_generator(g)?;
        }
        Ok(ideal)
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn maxdeg(&self) -> usize {
        self.maxdeg
    }

    /// Generators in the order they were added.
    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    /// `n_k`: how many generators have degree `k`.
    pub fn generator_counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for g in &self.generators {
            *counts.entry(g.degree().unwrap_or(0)).or_insert(0) += 1;
        }
        counts
    }

    pub fn has_generator(&self, g: &Poly) -> bool {
        self.generators.contains(g)
    }

    /// Adds a nonzero homogeneous generator. Cached bases of degree at least
    /// its degree are extended in place; generators beyond the horizon are
    /// recorded (and counted) but never materialized.
    pub fn add_generator(&mut self, h: Poly) -> Result<(), AlgebraError> {
        if h.modulus() != self.p {
            return Err(AlgebraError::ModulusMismatch(self.p, h.modulus()));
        }
        if !h.is_homogeneous() || h.is_zero() {
            return Err(AlgebraError::NotHomogeneous(h.to_string()));
        }
        let d = h.degree().expect("nonzero");
        for k in d..=self.maxdeg {
            if let Some(basis) = self.cache[k].get_mut() {
                insert_products(basis, &h, d);
            }
        }
        self.generators.push(h);
        Ok(())
    }

    fn check_horizon(&self, degree: usize) -> Result<(), AlgebraError> {
        if degree > self.maxdeg {
            return Err(AlgebraError::Horizon { degree, maxdeg: self.maxdeg });
        }
        Ok(())
    }

    /// Echelon basis of `I_k`, computed once and cached.
    pub fn ideal_degree_basis(&self, k: usize) -> Result<&EchelonBasis, AlgebraError> {
        self.check_horizon(k)?;
        Ok(self.cache[k].get_or_init(|| {
            let mut basis = EchelonBasis::new(k, self.p);
            for h in &self.generators {
                insert_products(&mut basis, h, h.degree().expect("nonzero"));
            }
            basis
        }))
    }

    /// Whether every homogeneous component of `f` lies in `I`.
    pub fn member(&self, f: &Poly) -> Result<bool, AlgebraError> {
        if let Some(d) = f.degree() {
            self.check_horizon(d)?;
        }
        for (k, c) in f.homogeneous_components() {
            if !self.ideal_degree_basis(k)?.contains(vector_of(&c)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `dim (F_k + I) / I = 2^k - dim I_k`.
    pub fn quotient_dim(&self, k: usize) -> Result<u64, AlgebraError> {
        let dim = self.ideal_degree_basis(k)?.dim() as u64;
        Ok((1u64 << k) - dim)
    }

    /// Canonical representative of `f` in `F / (I + F_{>D})`.
    pub fn quotient_reduce(&self, f: &Poly, horizon: usize) -> Result<Poly, AlgebraError> {
        self.check_horizon(horizon)?;
        let mut out = Poly::zero(self.p);
        for (k, c) in f.truncate(horizon).homogeneous_components() {
            for (col, a) in self.ideal_degree_basis(k)?.reduce(vector_of(&c)) {
                out.add_term(Monomial::from_index(k, col), a);
            }
        }
        Ok(out)
    }

    /// The lexicographically first degree-`k` monomial outside `I`.
    pub fn first_standard_monomial(&self, k: usize) -> Result<Option<Monomial>, AlgebraError> {
        let basis = self.ideal_degree_basis(k)?;
        Ok(Monomial::all_of_degree(k).find(|m| !basis.contains(BTreeMap::from([(m.index(), 1)]))))
    }
}
