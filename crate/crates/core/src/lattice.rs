//! Multi-index combinatorics and the staircase/fiber structure of
//! monomial-generated invariant subspaces M ⊆ H²(ℂᵈ) ⊗ ℂʳ.
//!
//! A monomial submodule is stored as a list of generators (ν, E_ν): an
//! exponent plus a rational basis of a coefficient subspace E_ν ⊆ ℂʳ. The
//! fiber at a lattice point n is E(n) = Σ { E_ν : ν ≤ n }; the submodule is
//! the orthogonal sum of the blocks zⁿ ⊗ E(n).

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::linalg::{in_span, row_rank, rref_basis};
use crate::{Error, Rat, Result};

/// Lattice point n ∈ ℤ₊ᵈ labeling the monomial zⁿ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        Self(components)
    }

    pub fn zero(d: usize) -> Self {
        Self(vec![0; d])
    }

    /// Unit multi-index e_k (1-based axis).
    pub fn unit(d: usize, k: usize) -> Self {
        let mut v = vec![0; d];
        v[k - 1] = 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn component(&self, k: usize) -> u32 {
        self.0[k - 1]
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    /// Total degree |n| = n₁ + … + n_d.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise partial order m ≤ n.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    /// n + e_k (1-based axis).
    pub fn step(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        v[k - 1] += 1;
        Self(v)
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices in d variables of total degree n, in lexicographic order.
pub fn indices_of_degree(d: usize, n: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; d];
    fn rec(d: usize, pos: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if pos == d - 1 {
            current[pos] = left;
            out.push(MultiIndex::new(current.clone()));
            return;
        }
        for v in (0..=left).rev() {
            current[pos] = v;
            rec(d, pos + 1, left - v, current, out);
        }
    }
    if d == 0 {
        return out;
    }
    rec(d, 0, n, &mut current, &mut out);
    out
}

/// C(n + d - 1, d - 1): the number of degree-n monomials in d variables.
pub fn monomial_count(d: usize, n: u32) -> u64 {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 1..d as u128 {
        num *= n as u128 + i;
        den *= i;
    }
    (num / den) as u64
}

/// One generator zᵛ ⊗ E_ν of a monomial submodule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub exponent: MultiIndex,
    /// Basis (rows) of the coefficient subspace E_ν ⊆ ℂʳ.
    pub fiber: Vec<Vec<Rat>>,
}

/// Which Hilbert function a graded computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Submodule,
    Quotient,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Submodule => write!(f, "submodule"),
            Side::Quotient => write!(f, "quotient"),
        }
    }
}

/// Invariant subspace of the rank-r d-shift generated by monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialSubmodule {
    d: usize,
    r: usize,
    generators: Vec<Generator>,
}

impl MonomialSubmodule {
    pub fn new(d: usize, r: usize, generators: Vec<Generator>) -> Result<Self> {
        assert!(d >= 1 && r >= 1, "need d >= 1 and r >= 1");
        for g in &generators {
            if g.exponent.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: g.exponent.dim(),
                });
            }
            if g.fiber.is_empty() {
                return Err(Error::InvalidProblem(format!(
                    "generator at {} has an empty fiber basis",
                    g.exponent
                )));
            }
            for v in &g.fiber {
                if v.len() != r {
                    return Err(Error::RankMismatch {
                        expected: r,
                        got: v.len(),
                    });
                }
            }
            if row_rank(&g.fiber) < g.fiber.len() {
                return Err(Error::InvalidProblem(format!(
                    "fiber basis at {} is linearly dependent",
                    g.exponent
                )));
            }
        }
        Ok(Self { d, r, generators })
    }

    /// The zero submodule {0}.
    pub fn zero(d: usize, r: usize) -> Self {
        Self {
            d,
            r,
            generators: Vec::new(),
        }
    }

    /// The full space H² ⊗ ℂʳ (generated at exponent 0 with fiber ℂʳ).
    pub fn full(d: usize, r: usize) -> Self {
        let fiber = (0..r)
            .map(|i| {
                let mut v = vec![Rat::zero(); r];
                v[i] = Rat::from_integer(1.into());
                v
            })
            .collect();
        Self {
            d,
            r,
            generators: vec![Generator {
                exponent: MultiIndex::zero(d),
                fiber,
            }],
        }
    }

    /// Rank-one submodule generated by a list of plain monomial exponents.
    pub fn from_exponents(d: usize, exponents: &[Vec<u32>]) -> Result<Self> {
        let generators = exponents
            .iter()
            .map(|e| Generator {
                exponent: MultiIndex::new(e.clone()),
                fiber: vec![vec![Rat::from_integer(1.into())]],
            })
            .collect();
        Self::new(d, 1, generators)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn is_zero_module(&self) -> bool {
        self.generators.is_empty()
    }

    /// Largest total degree among generators (0 for the zero module).
    pub fn max_generator_degree(&self) -> u32 {
        self.generators
            .iter()
            .map(|g| g.exponent.degree())
            .max()
            .unwrap_or(0)
    }

    /// Canonical RREF basis of the fiber E(n) = Σ { E_ν : ν ≤ n }.
    pub fn fiber(&self, n: &MultiIndex) -> Result<Vec<Vec<Rat>>> {
        if n.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: n.dim(),
            });
        }
        let mut stacked: Vec<Vec<Rat>> = Vec::new();
        for g in &self.generators {
            if g.exponent.leq(n)? {
                stacked.extend(g.fiber.iter().cloned());
            }
        }
        Ok(rref_basis(&stacked))
    }

    pub fn fiber_dim(&self, n: &MultiIndex) -> usize {
        // the spectrum enumerator hits this in a tight loop: avoid rank
        // computations when zero or one generator contributes
        let mut contributing: Option<&Generator> = None;
        let mut several = false;
        for g in &self.generators {
            if g.exponent.leq(n).unwrap_or(false) {
                if contributing.is_some() {
                    several = true;
                    break;
                }
                contributing = Some(g);
            }
        }
        match (contributing, several) {
            (None, _) => 0,
            (Some(g), false) => g.fiber.len(),
            _ => {
                let mut stacked: Vec<Vec<Rat>> = Vec::new();
                for g in &self.generators {
                    if g.exponent.leq(n).unwrap_or(false) {
                        stacked.extend(g.fiber.iter().cloned());
                    }
                }
                row_rank(&stacked)
            }
        }
    }

    /// (dim M_n, dim M⊥_n) for the degree-n graded pieces.
    pub fn graded_dims(&self, n: u32) -> (u64, u64) {
        let total = self.r as u64 * monomial_count(self.d, n);
        let dim_m: u64 = indices_of_degree(self.d, n)
            .iter()
            .map(|ix| self.fiber_dim(ix) as u64)
            .sum();
        (dim_m, total - dim_m)
    }

    /// Hilbert function of the chosen side at degree n.
    pub fn hilbert(&self, side: Side, n: u32) -> u64 {
        let (sub, quot) = self.graded_dims(n);
        match side {
            Side::Submodule => sub,
            Side::Quotient => quot,
        }
    }

    /// Canonical form: same-exponent generators merged, redundant generators
    /// (fiber already produced at that exponent by the others) removed, fiber
    /// bases in reduced row echelon form. `fiber` agrees with the input at
    /// every lattice point.
    pub fn minimalize(&self) -> Self {
        // merge generators sharing an exponent
        let mut merged: Vec<(MultiIndex, Vec<Vec<Rat>>)> = Vec::new();
        for g in &self.generators {
            match merged.iter_mut().find(|(e, _)| *e == g.exponent) {
                Some((_, rows)) => rows.extend(g.fiber.iter().cloned()),
                None => merged.push((g.exponent.clone(), g.fiber.clone())),
            }
        }
        merged.sort_by(|(a, _), (b, _)| (a.degree(), a).cmp(&(b.degree(), b)));

        // drop fiber vectors already generated at ν by the remaining generators
        let mut kept: Vec<Generator> = Vec::new();
        for i in 0..merged.len() {
            let (nu, rows) = &merged[i];
            let mut context: Vec<Vec<Rat>> = Vec::new();
            for (j, (mu, other)) in merged.iter().enumerate() {
                if j != i && mu.leq(nu).unwrap_or(false) {
                    context.extend(other.iter().cloned());
                }
            }
            // keep the part of span(rows) not inside span(context): extend a
            // basis of the context restricted to this exponent
            let mut necessary: Vec<Vec<Rat>> = Vec::new();
            for v in rows {
                let mut seen = context.clone();
                seen.extend(necessary.iter().cloned());
                if !in_span(&seen, v) {
                    necessary.push(v.clone());
                }
            }
            if !necessary.is_empty() {
                kept.push(Generator {
                    exponent: nu.clone(),
                    fiber: rref_basis(&necessary),
                });
            }
        }
        Self {
            d: self.d,
            r: self.r,
            generators: kept,
        }
    }

    /// Curvature via the graded surrogate: the eventual constant value of the
    /// (d−1)-th finite difference of the Hilbert function. Stability requires
    /// three consecutive equal values over the tail of the sampled window.
    pub fn curvature(&self, side: Side, max_degree: u32) -> Result<CurvatureReport> {
        let required = self.max_generator_degree() + self.d as u32 + 3;
        if max_degree < required {
            return Err(Error::CutoffTooSmall {
                required,
                got: max_degree,
            });
        }
        let samples: Vec<(u32, u64)> = (0..=max_degree)
            .map(|n| (n, self.hilbert(side, n)))
            .collect();
        let mut diffs: Vec<i64> = samples.iter().map(|(_, h)| *h as i64).collect();
        for _ in 1..self.d {
            diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        }
        let m = diffs.len();
        let stable = m >= 3 && diffs[m - 1] == diffs[m - 2] && diffs[m - 2] == diffs[m - 3];
        Ok(CurvatureReport {
            side,
            k: if stable { Some(diffs[m - 1]) } else { None },
            window: (0, max_degree),
            stable,
            hilbert_samples: samples,
        })
    }
}

/// Result of the graded curvature computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub side: Side,
    /// Eventual constant of Δ^{d−1} h; `None` when stabilization failed.
    pub k: Option<i64>,
    /// Degree range sampled.
    pub window: (u32, u32),
    pub stable: bool,
    pub hilbert_samples: Vec<(u32, u64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::XorShift64;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn qi(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn leq_examples() {
        assert!(mi(&[1, 1]).leq(&mi(&[2, 3])).unwrap());
        assert!(!mi(&[2, 0]).leq(&mi(&[1, 5])).unwrap());
        assert!(mi(&[0, 0]).leq(&mi(&[0, 0])).unwrap());
        assert!(mi(&[1]).leq(&mi(&[1, 2])).is_err());
    }

    #[test]
    fn fiber_examples() {
        let m = MonomialSubmodule::from_exponents(2, &[vec![1, 1]]).unwrap();
        assert!(m.fiber(&mi(&[0, 3])).unwrap().is_empty());
        assert_eq!(m.fiber(&mi(&[2, 3])).unwrap().len(), 1);
        assert!(matches!(
            m.fiber(&mi(&[2, 3, 1])),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 3
            })
        ));

        // rank-2 fibers stack: span{(1,0)} + span{(1,1)} = C^2
        let m2 = MonomialSubmodule::new(
            2,
            2,
            vec![
                Generator {
                    exponent: mi(&[1, 0]),
                    fiber: vec![vec![qi(1), qi(0)]],
                },
                Generator {
                    exponent: mi(&[0, 1]),
                    fiber: vec![vec![qi(1), qi(1)]],
                },
            ],
        )
        .unwrap();
        assert_eq!(m2.fiber(&mi(&[1, 1])).unwrap().len(), 2);
        assert_eq!(m2.fiber(&mi(&[1, 0])).unwrap().len(), 1);
    }

    #[test]
    fn graded_dims_examples() {
        let m = MonomialSubmodule::from_exponents(2, &[vec![1, 1]]).unwrap();
        // degree 4: members are (1,3),(2,2),(3,1) of the 5 lattice points
        assert_eq!(m.graded_dims(4), (3, 2));
        assert_eq!(m.graded_dims(0), (0, 1));

        let full = MonomialSubmodule::full(3, 2);
        for n in 0..6 {
            let total = 2 * monomial_count(3, n);
            assert_eq!(full.graded_dims(n), (total, 0));
        }
    }

    #[test]
    fn graded_dims_brute_force_oracle() {
        // brute force: a degree-n lattice point is in M = <z1 z2> iff both
        // exponents are >= 1
        let m = MonomialSubmodule::from_exponents(2, &[vec![1, 1]]).unwrap();
        for n in 0..=12 {
            let expect = indices_of_degree(2, n)
                .iter()
                .filter(|ix| ix.component(1) >= 1 && ix.component(2) >= 1)
                .count() as u64;
            assert_eq!(m.graded_dims(n).0, expect);
        }
    }

    #[test]
    fn minimalize_examples() {
        let m = MonomialSubmodule::from_exponents(2, &[vec![1, 0], vec![2, 1]]).unwrap();
        let min = m.minimalize();
        assert_eq!(min.generators().len(), 1);
        assert_eq!(min.generators()[0].exponent, mi(&[1, 0]));

        let m2 = MonomialSubmodule::new(
            2,
            2,
            vec![
                Generator {
                    exponent: mi(&[1, 0]),
                    fiber: vec![vec![qi(1), qi(0)]],
                },
                Generator {
                    exponent: mi(&[1, 0]),
                    fiber: vec![vec![qi(0), qi(1)]],
                },
            ],
        )
        .unwrap();
        let min2 = m2.minimalize();
        assert_eq!(min2.generators().len(), 1);
        assert_eq!(min2.generators()[0].fiber.len(), 2);

        assert!(MonomialSubmodule::zero(2, 1).minimalize().is_zero_module());
    }

    #[test]
    fn minimalize_preserves_fiber_at_random_points() {
        let mut rng = XorShift64::new(0x5eed);
        for _ in 0..8 {
            let d = 2 + (rng.below(2) as usize);
            let r = 1 + (rng.below(2) as usize);
            let mut gens = Vec::new();
            for _ in 0..(1 + rng.below(4)) {
                let exponent = MultiIndex::new((0..d).map(|_| rng.below(4) as u32).collect());
                let mut fiber = Vec::new();
                for _ in 0..(1 + rng.below(r as u64)) {
                    let v: Vec<Rat> = (0..r).map(|_| rng.small_rat()).collect();
                    if !v.iter().all(|x| x.is_zero()) && !fiber.contains(&v) {
                        fiber.push(v);
                    }
                }
                if !fiber.is_empty() && row_rank(&fiber) == fiber.len() {
                    gens.push(Generator { exponent, fiber });
                }
            }
            let m = MonomialSubmodule::new(d, r, gens).unwrap();
            let min = m.minimalize();
            for _ in 0..200 {
                let n = MultiIndex::new((0..d).map(|_| rng.below(7) as u32).collect());
                assert_eq!(m.fiber(&n).unwrap(), min.fiber(&n).unwrap());
            }
        }
    }

    #[test]
    fn fiber_monotonicity() {
        let mut rng = XorShift64::new(0xfee1);
        let m = MonomialSubmodule::new(
            3,
            2,
            vec![
                Generator {
                    exponent: mi(&[1, 0, 2]),
                    fiber: vec![vec![qi(1), qi(2)]],
                },
                Generator {
                    exponent: mi(&[0, 2, 0]),
                    fiber: vec![vec![qi(3), qi(-1)]],
                },
            ],
        )
        .unwrap();
        for _ in 0..100 {
            let n = MultiIndex::new((0..3).map(|_| rng.below(5) as u32).collect());
            let here = m.fiber(&n).unwrap();
            for k in 1..=3 {
                let there = m.fiber(&n.step(k)).unwrap();
                for v in &here {
                    assert!(in_span(&there, v));
                }
            }
        }
    }

    #[test]
    fn graded_dims_sum_property() {
        let m = MonomialSubmodule::from_exponents(3, &[vec![1, 1, 0], vec![0, 1, 2]]).unwrap();
        for n in 0..=10 {
            let (a, b) = m.graded_dims(n);
            assert_eq!(a + b, monomial_count(3, n));
        }
    }

    #[test]
    fn curvature_examples() {
        // M = {0}, quotient side, d=2, r=1: h(n) = n+1, K = 1
        let zero = MonomialSubmodule::zero(2, 1);
        let rep = zero.curvature(Side::Quotient, 8).unwrap();
        assert!(rep.stable);
        assert_eq!(rep.k, Some(1));

        let m = MonomialSubmodule::from_exponents(2, &[vec![1, 1]]).unwrap();
        let q = m.curvature(Side::Quotient, 10).unwrap();
        assert_eq!(q.k, Some(0));
        let s = m.curvature(Side::Submodule, 10).unwrap();
        assert_eq!(s.k, Some(1));
    }

    #[test]
    fn curvature_additivity() {
        let m = MonomialSubmodule::from_exponents(3, &[vec![1, 1, 0], vec![0, 0, 3]]).unwrap();
        let s = m.curvature(Side::Submodule, 12).unwrap();
        let q = m.curvature(Side::Quotient, 12).unwrap();
        assert!(s.stable && q.stable);
        assert_eq!(s.k.unwrap() + q.k.unwrap(), 1);
    }

    #[test]
    fn curvature_cutoff_guard() {
        let m = MonomialSubmodule::from_exponents(2, &[vec![4, 4]]).unwrap();
        assert!(matches!(
            m.curvature(Side::Quotient, 5),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn monomial_count_matches_enumeration() {
        for d in 1..=4 {
            for n in 0..=8 {
                assert_eq!(monomial_count(d, n), indices_of_degree(d, n).len() as u64);
            }
        }
    }
}
