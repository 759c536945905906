//! The Dirac operator D = B + B* on H ⊗ ΛZ for truncated commuting tuples:
//! graded blocks, exact kernel dimensions, the Fredholm index of D₊, and the
//! cross-check of the index formulas against the graded curvature.
//!
//! B = Σ T_k ⊗ C_k raises both the polynomial degree and the form degree by
//! one, so D preserves s = (polynomial degree) − (form degree) and decomposes
//! into finite blocks. Within a block, B also preserves the multi-degree
//! μ = n − 1_ω, which splits the kernel computation into independent
//! lattice-point clusters of dimension at most 2ᵈ·r.

use std::collections::HashMap;

use num_traits::Zero;
use serde::Serialize;

use crate::exterior::{canonical_subsets, create, elements};
use crate::fock::{shift_tuple, Part, TruncatedOperator};
use crate::lattice::{MonomialSubmodule, MultiIndex, Side};
use crate::linalg::{rank, SparseMat};
use crate::{Error, Rat, Result};

/// Canonically ordered basis of the exterior algebra ΛZ, dim Z = d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExteriorBasis {
    d: usize,
    subsets: Vec<u32>,
    index_of: HashMap<u32, usize>,
}

impl ExteriorBasis {
    pub fn new(d: usize) -> Self {
        let subsets = canonical_subsets(d);
        let index_of = subsets.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        Self {
            d,
            subsets,
            index_of,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn subsets(&self) -> &[u32] {
        &self.subsets
    }

    pub fn index(&self, mask: u32) -> usize {
        self.index_of[&mask]
    }

    /// Human-readable element list of the i-th subset.
    pub fn describe(&self, i: usize) -> Vec<u32> {
        elements(self.subsets[i])
    }
}

/// Creation operators on ΛZ in the canonical subset basis, with the canonical
/// anticommutation relations verified exactly.
#[derive(Debug, Clone)]
pub struct CreationMatrices {
    pub basis: ExteriorBasis,
    /// d matrices of size 2ᵈ×2ᵈ with entries in {−1, 0, +1}.
    pub matrices: Vec<Vec<Vec<i64>>>,
    pub car_verified: bool,
}

/// Build C_1,…,C_d and verify C_iC_j + C_jC_i = 0 and
/// C_i*C_j + C_jC_i* = δ_ij·1 exactly.
pub fn creation_matrices(d: usize) -> Result<CreationMatrices> {
    if d < 1 {
        return Err(Error::InvalidProblem("need d >= 1".into()));
    }
    let basis = ExteriorBasis::new(d);
    let n = basis.len();
    let mut matrices = vec![vec![vec![0i64; n]; n]; d];
    for (col, mask) in basis.subsets().iter().enumerate() {
        for k in 1..=d {
            if let Some((m2, s)) = create(*mask, k) {
                matrices[k - 1][basis.index(m2)][col] = s as i64;
            }
        }
    }
    let mul = |a: &Vec<Vec<i64>>, b: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
        let mut c = vec![vec![0i64; n]; n];
        for i in 0..n {
            for k in 0..n {
                if a[i][k] != 0 {
                    for j in 0..n {
                        c[i][j] += a[i][k] * b[k][j];
                    }
                }
            }
        }
        c
    };
    let transpose = |a: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
        let mut t = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                t[j][i] = a[i][j];
            }
        }
        t
    };
    let mut car_verified = true;
    for i in 0..d {
        for j in 0..d {
            let anti = mul(&matrices[i], &matrices[j]);
            let anti2 = mul(&matrices[j], &matrices[i]);
            for r in 0..n {
                for c in 0..n {
                    if anti[r][c] + anti2[r][c] != 0 {
                        car_verified = false;
                    }
                }
            }
            let ci_star = transpose(&matrices[i]);
            let m1 = mul(&ci_star, &matrices[j]);
            let m2 = mul(&matrices[j], &ci_star);
            for r in 0..n {
                for c in 0..n {
                    let expect = if i == j && r == c { 1 } else { 0 };
                    if m1[r][c] + m2[r][c] != expect {
                        car_verified = false;
                    }
                }
            }
        }
    }
    if !car_verified {
        return Err(Error::Numerical(
            "canonical anticommutation relations failed (construction bug)".into(),
        ));
    }
    Ok(CreationMatrices {
        basis,
        matrices,
        car_verified,
    })
}

/// One graded block of the Dirac complex: everything with
/// polynomial degree − form degree = s.
#[derive(Debug, Clone)]
pub struct DiracBlock {
    pub s: i64,
    /// (lattice point, fiber slot, subset mask) per block element.
    pub labels: Vec<(MultiIndex, usize, u32)>,
    pub b_matrix: SparseMat,
    pub bstar_matrix: SparseMat,
    /// Diagonal Gram of the block elements.
    pub gram: Vec<Rat>,
    /// Form-degree parity per element (false = even).
    pub parity_odd: Vec<bool>,
}

impl DiracBlock {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// Assemble the complete block at level s. Requires cutoff ≥ s + d + 1 so no
/// truncation edge can reach the block.
pub fn dirac_block(tuple: &[TruncatedOperator], s: i64) -> Result<DiracBlock> {
    let d = tuple.len();
    if s < -(d as i64) {
        return Err(Error::InvalidProblem(format!("s = {s} below -d")));
    }
    let cutoff = tuple[0].basis().cutoff();
    let required = (s + d as i64 + 1).max(1) as u32;
    if cutoff < required {
        return Err(Error::CutoffTooSmall {
            required,
            got: cutoff,
        });
    }
    Ok(assemble_block(tuple, s))
}

/// Internal assembly without the completeness guard; used by the index scan
/// once vanishing of all degrees beyond the cutoff has been established.
fn assemble_block(tuple: &[TruncatedOperator], s: i64) -> DiracBlock {
    let d = tuple.len();
    let basis = tuple[0].basis();
    let transposed: Vec<SparseMat> = tuple.iter().map(|t| t.matrix().transpose()).collect();

    let mut labels: Vec<(MultiIndex, usize, u32)> = Vec::new();
    let mut position: HashMap<(usize, u32), usize> = HashMap::new();
    let mut base_index: Vec<usize> = Vec::new();
    for mask in canonical_subsets(d) {
        let j = mask.count_ones() as i64;
        let degree = s + j;
        if degree < 0 || degree > basis.cutoff() as i64 {
            continue;
        }
        for i in 0..basis.len() {
            if basis.degree_of(i) as i64 == degree {
                let (p, slot) = basis.element(i);
                position.insert((i, mask), labels.len());
                labels.push((p.clone(), slot, mask));
                base_index.push(i);
            }
        }
    }
    let n = labels.len();
    let mut gram = Vec::with_capacity(n);
    let mut parity_odd = Vec::with_capacity(n);
    for (u, (_, _, mask)) in labels.iter().enumerate() {
        gram.push(basis.gram()[base_index[u]].clone());
        parity_odd.push(!mask.count_ones().is_multiple_of(2));
    }

    let mut triplets = Vec::new();
    for (u, (_, _, mask)) in labels.iter().enumerate() {
        let i = base_index[u];
        for k in 1..=d {
            let Some((m2, sign)) = create(*mask, k) else {
                continue;
            };
            // column i of T_k = row i of its transpose
            for (row, v) in transposed[k - 1].row(i) {
                if let Some(&target) = position.get(&(*row, m2)) {
                    let val = if sign > 0 { v.clone() } else { -v.clone() };
                    triplets.push((target, u, val));
                }
            }
        }
    }
    let b_matrix = SparseMat::from_triplets(n, n, triplets);
    let mut star_triplets = Vec::with_capacity(b_matrix.nnz());
    let bt = b_matrix.transpose();
    for u in 0..n {
        for (v_col, val) in bt.row(u) {
            star_triplets.push((u, *v_col, val * &gram[*v_col] / &gram[u]));
        }
    }
    let bstar_matrix = SparseMat::from_triplets(n, n, star_triplets);
    DiracBlock {
        s,
        labels,
        b_matrix,
        bstar_matrix,
        gram,
        parity_odd,
    }
}

/// Exact dimensions of ker D ∩ (even part) and ker D ∩ (odd part) of a block.
///
/// Since ⟨D²x, x⟩ = ‖Bx‖² + ‖B*x‖², the kernel of D is the joint nullspace
/// {Bx = 0, B*x = 0}. B preserves the multi-degree μ = n − 1_ω and parity
/// decouples, so the stacked nullity is computed cluster by cluster.
pub fn block_kernel_dims(block: &DiracBlock) -> (usize, usize) {
    let n = block.dim();
    if n == 0 {
        return (0, 0);
    }
    // cluster elements by μ
    let mut clusters: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (u, (p, _, mask)) in block.labels.iter().enumerate() {
        let mu: Vec<i64> = (1..=p.dim())
            .map(|k| p.component(k) as i64 - ((mask >> (k - 1)) & 1) as i64)
            .collect();
        clusters.entry(mu).or_default().push(u);
    }
    let mut k_even = 0;
    let mut k_odd = 0;
    for members in clusters.values() {
        let local: HashMap<usize, usize> =
            members.iter().enumerate().map(|(l, u)| (*u, l)).collect();
        let m = members.len();
        for odd in [false, true] {
            let cols: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&u| block.parity_odd[u] == odd)
                .collect();
            if cols.is_empty() {
                continue;
            }
            // stacked system {Bx = 0, B*x = 0} restricted to the cluster
            let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(2 * m);
            for mat in [&block.b_matrix, &block.bstar_matrix] {
                for &u in members {
                    let mut row = vec![Rat::zero(); cols.len()];
                    let mut nonzero = false;
                    for (c, v) in mat.row(u) {
                        debug_assert!(local.contains_key(c), "B couples distinct clusters");
                        if let Some(ci) = cols.iter().position(|x| x == c) {
                            row[ci] = v.clone();
                            nonzero = true;
                        }
                    }
                    if nonzero {
                        rows.push(row);
                    }
                }
            }
            let nullity = cols.len() - rank(rows);
            if odd {
                k_odd += nullity;
            } else {
                k_even += nullity;
            }
        }
    }
    (k_even, k_odd)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexStatus {
    Stable,
    Inconclusive,
}

/// Kernel dimensions and Fredholm index of D₊, summed over graded blocks.
#[derive(Debug, Clone, Serialize)]
pub struct IndexReport {
    pub dim_ker_plus: usize,
    pub dim_ker_minus: usize,
    /// dim ker D₊ − dim ker D₊* (ker D₊* = ker D ∩ H̃₋ since D is self-adjoint).
    pub index: i64,
    /// Range of s actually examined.
    pub blocks_examined: (i64, i64),
    pub window: usize,
    pub status: IndexStatus,
    /// Cutoff that would let the scan continue when inconclusive.
    pub required_cutoff: Option<u32>,
    /// Per-block kernel dimensions for blocks with nonzero kernel.
    pub kernel_blocks: Vec<(i64, usize, usize)>,
}

/// Scan blocks s = −d, −d+1, … accumulating kernel dimensions until `window`
/// consecutive blocks have zero kernel on both sides. Never guesses: if the
/// cutoff is exhausted first, the report is inconclusive with partial sums.
pub fn dirac_index(tuple: &[TruncatedOperator], window: usize) -> Result<IndexReport> {
    let d = tuple.len();
    if d == 0 || window == 0 {
        return Err(Error::InvalidProblem("need d >= 1 and window >= 1".into()));
    }
    for t in tuple.iter().skip(1) {
        if t.basis() != tuple[0].basis() && !std::sync::Arc::ptr_eq(t.basis(), tuple[0].basis()) {
            return Err(Error::BasisMismatch);
        }
    }
    let basis = tuple[0].basis();
    let cutoff = basis.cutoff();

    // For the compressed part, an empty top shell means the fibers are full
    // on that shell and hence (by monotonicity) full forever: the space
    // vanishes beyond the cutoff and every block is complete regardless of s.
    // A restricted basis gives no such certificate — a generator might sit
    // beyond the cutoff — so it goes through the completeness bound.
    let top_shell_empty =
        basis.part() == Part::Compressed && (0..basis.len()).all(|i| basis.degree_of(i) < cutoff);
    let max_occupied: i64 = (0..basis.len())
        .map(|i| basis.degree_of(i) as i64)
        .max()
        .unwrap_or(-1);

    let mut k_even_total = 0usize;
    let mut k_odd_total = 0usize;
    let mut zero_run = 0usize;
    let mut s = -(d as i64);
    let mut last_s = s - 1;
    let mut kernel_blocks = Vec::new();
    let status;
    let mut required_cutoff = None;
    loop {
        let complete = s + (d as i64) < cutoff as i64 || top_shell_empty;
        if !complete {
            status = IndexStatus::Inconclusive;
            required_cutoff = Some((s + d as i64 + 1) as u32);
            break;
        }
        let (ke, ko) = if top_shell_empty && s > max_occupied {
            (0, 0)
        } else {
            let block = assemble_block(tuple, s);
            block_kernel_dims(&block)
        };
        k_even_total += ke;
        k_odd_total += ko;
        if ke > 0 || ko > 0 {
            kernel_blocks.push((s, ke, ko));
        }
        last_s = s;
        if ke == 0 && ko == 0 {
            zero_run += 1;
            if zero_run >= window {
                status = IndexStatus::Stable;
                break;
            }
        } else {
            zero_run = 0;
        }
        s += 1;
    }
    Ok(IndexReport {
        dim_ker_plus: k_even_total,
        dim_ker_minus: k_odd_total,
        index: k_even_total as i64 - k_odd_total as i64,
        blocks_examined: (-(d as i64), last_s),
        window,
        status,
        required_cutoff,
        kernel_blocks,
    })
}

/// Cross-check of the index formulas: the Dirac indices of the restriction
/// and the compression against the graded curvature of each side, and their
/// additivity to (−1)ᵈ·r.
#[derive(Debug, Clone, Serialize)]
pub struct IndexFormulasReport {
    pub d: usize,
    pub r: usize,
    pub index_submodule: Option<i64>,
    pub index_quotient: Option<i64>,
    pub curvature_submodule: Option<i64>,
    pub curvature_quotient: Option<i64>,
    /// ind D_B₊ = (−1)ᵈ · K(submodule)
    pub submodule_formula_holds: Option<bool>,
    /// ind D_C₊ = (−1)ᵈ · K(quotient)
    pub quotient_formula_holds: Option<bool>,
    /// ind D_B₊ + ind D_C₊ = (−1)ᵈ · r
    pub additivity_holds: Option<bool>,
    pub conclusive: bool,
}

impl IndexFormulasReport {
    pub fn all_hold(&self) -> bool {
        self.conclusive
            && self.submodule_formula_holds == Some(true)
            && self.quotient_formula_holds == Some(true)
            && self.additivity_holds == Some(true)
    }
}

pub fn verify_index_formulas(
    module: &MonomialSubmodule,
    cutoff: u32,
    window: usize,
) -> Result<IndexFormulasReport> {
    let d = module.d();
    let r = module.r();
    let sign = if d.is_multiple_of(2) { 1i64 } else { -1i64 };

    let restricted = shift_tuple(module, cutoff, Part::Restricted)?;
    let compressed = shift_tuple(module, cutoff, Part::Compressed)?;
    let ind_b = dirac_index(&restricted, window)?;
    let ind_c = dirac_index(&compressed, window)?;
    let curv_s = module.curvature(Side::Submodule, cutoff)?;
    let curv_q = module.curvature(Side::Quotient, cutoff)?;

    let b_ok = ind_b.status == IndexStatus::Stable;
    let c_ok = ind_c.status == IndexStatus::Stable;
    let conclusive = b_ok && c_ok && curv_s.stable && curv_q.stable;

    let index_submodule = b_ok.then_some(ind_b.index);
    let index_quotient = c_ok.then_some(ind_c.index);
    let curvature_submodule = curv_s.k;
    let curvature_quotient = curv_q.k;

    let submodule_formula_holds = match (index_submodule, curvature_submodule) {
        (Some(i), Some(k)) => Some(i == sign * k),
        _ => None,
    };
    let quotient_formula_holds = match (index_quotient, curvature_quotient) {
        (Some(i), Some(k)) => Some(i == sign * k),
        _ => None,
    };
    let additivity_holds = match (index_submodule, index_quotient) {
        (Some(a), Some(b)) => Some(a + b == sign * r as i64),
        _ => None,
    };
    Ok(IndexFormulasReport {
        d,
        r,
        index_submodule,
        index_quotient,
        curvature_submodule,
        curvature_quotient,
        submodule_formula_holds,
        quotient_formula_holds,
        additivity_holds,
        conclusive,
    })
}
