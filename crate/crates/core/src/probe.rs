//! Floating-point probes for homogeneous (non-monomial) vector-polynomial
//! generators: graded orthonormal bases of M, blockwise projections, and
//! commutator singular-value decay reports.
//!
//! Homogeneous generators make M graded, so P_M is block diagonal by degree
//! and [P_M, S_k] is block superdiagonal; its singular values are the union
//! of the per-degree block singular values. The probe never claims a theorem:
//! verdicts are decaying / non-decaying / inconclusive with evidence attached.

use serde::Serialize;

use crate::fock::fock_norm_sq;
use crate::lattice::{indices_of_degree, MultiIndex};
use crate::linalg::rat_to_f64;
use crate::schatten::{tail_exponent_f64, TailFit};
use crate::{Error, Rat, Result};

/// Rank-decision threshold for the column-pivoted orthonormalization.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// A finite set of homogeneous vector polynomials in ℂ[z]⊗ℂʳ.
#[derive(Debug, Clone)]
pub struct HomogeneousGeneratorSet {
    d: usize,
    r: usize,
    /// Each generator: terms (exponent, coefficient vector), all of one degree.
    generators: Vec<Vec<(MultiIndex, Vec<Rat>)>>,
    degrees: Vec<u32>,
}

impl HomogeneousGeneratorSet {
    pub fn new(d: usize, r: usize, generators: Vec<Vec<(MultiIndex, Vec<Rat>)>>) -> Result<Self> {
        use num_traits::Zero;
        let mut degrees = Vec::with_capacity(generators.len());
        for (idx, g) in generators.iter().enumerate() {
            if g.is_empty() || g.iter().all(|(_, c)| c.iter().all(|x| x.is_zero())) {
                return Err(Error::InvalidProblem(format!("generator {idx} is zero")));
            }
            let deg = g[0].0.degree();
            for (m, c) in g {
                if m.dim() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: m.dim(),
                    });
                }
                if c.len() != r {
                    return Err(Error::RankMismatch {
                        expected: r,
                        got: c.len(),
                    });
                }
                if m.degree() != deg {
                    return Err(Error::NonHomogeneous { index: idx });
                }
            }
            degrees.push(deg);
        }
        Ok(Self {
            d,
            r,
            generators,
            degrees,
        })
    }

    /// Rank-one scalar polynomial generators from (exponent, coefficient) terms.
    pub fn scalar(d: usize, polys: Vec<Vec<(Vec<u32>, i64)>>) -> Result<Self> {
        let generators = polys
            .into_iter()
            .map(|terms| {
                terms
                    .into_iter()
                    .map(|(e, c)| (MultiIndex::new(e), vec![Rat::from_integer(c.into())]))
                    .collect()
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

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }
}

/// Orthonormal basis of the degree-n graded piece M_n, in coordinates with
/// respect to the normalized monomials (zᵐ/‖zᵐ‖) ⊗ e_i.
#[derive(Debug, Clone)]
pub struct GradedBasis {
    pub degree: u32,
    /// Ambient coordinate dimension r·C(n+d−1, d−1).
    pub ambient_dim: usize,
    /// Orthonormal vectors spanning M_n.
    pub vectors: Vec<Vec<f64>>,
}

/// Coordinate layout of the degree-n piece: lattice points in lexicographic
/// order, r slots each.
fn coordinate_index(points: &[MultiIndex], r: usize, m: &MultiIndex, slot: usize) -> Option<usize> {
    points.binary_search(m).ok().map(|i| i * r + slot)
}

/// Per-degree orthonormal bases of M_n for n ≤ cutoff, built from the
/// generator shifts zᵃ·f with |a| + deg f = n and a rank decision at
/// [`RANK_THRESHOLD`].
pub fn graded_subspace_bases(
    gens: &HomogeneousGeneratorSet,
    cutoff: u32,
) -> Result<Vec<GradedBasis>> {
    if cutoff < gens.max_degree() {
        return Err(Error::CutoffTooSmall {
            required: gens.max_degree(),
            got: cutoff,
        });
    }
    let d = gens.d;
    let r = gens.r;
    let mut out = Vec::with_capacity(cutoff as usize + 1);
    for n in 0..=cutoff {
        let points = indices_of_degree(d, n);
        let mut sorted_points = points.clone();
        sorted_points.sort();
        let ambient = sorted_points.len() * r;
        let mut columns: Vec<Vec<f64>> = Vec::new();
        for (g, terms) in gens.generators.iter().enumerate() {
            let deg = gens.degrees[g];
            if deg > n {
                continue;
            }
            for shift in indices_of_degree(d, n - deg) {
                let mut col = vec![0.0; ambient];
                for (m, c) in terms {
                    let target = MultiIndex::new(
                        m.components()
                            .iter()
                            .zip(shift.components())
                            .map(|(a, b)| a + b)
                            .collect(),
                    );
                    let scale = rat_to_f64(&fock_norm_sq(&target)).sqrt();
                    for (slot, coeff) in c.iter().enumerate() {
                        if let Some(ix) = coordinate_index(&sorted_points, r, &target, slot) {
                            col[ix] += rat_to_f64(coeff) * scale;
                        }
                    }
                }
                columns.push(col);
            }
        }
        let vectors = orthonormalize_pivoted(columns);
        out.push(GradedBasis {
            degree: n,
            ambient_dim: ambient,
            vectors,
        });
    }
    Ok(out)
}

/// Modified Gram–Schmidt with column pivoting and a second orthogonalization
/// pass; columns are normalized up front so the threshold is relative.
fn orthonormalize_pivoted(mut columns: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    for c in &mut columns {
        let n = norm(c);
        if n > 0.0 {
            for x in c.iter_mut() {
                *x /= n;
            }
        }
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    loop {
        // pivot: column with largest residual norm
        let mut best = None;
        let mut best_norm = RANK_THRESHOLD;
        for (i, c) in columns.iter().enumerate() {
            let n = norm(c);
            if n > best_norm {
                best_norm = n;
                best = Some(i);
            }
        }
        let Some(i) = best else {
            break;
        };
        let mut v = columns.swap_remove(i);
        // re-orthogonalize against the accepted basis for stability
        for _ in 0..2 {
            for u in &basis {
                let c = dotf(&v, u);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= c * y;
                }
            }
        }
        let n = norm(&v);
        if n <= RANK_THRESHOLD {
            continue;
        }
        for x in v.iter_mut() {
            *x /= n;
        }
        for c in columns.iter_mut() {
            let t = dotf(c, &v);
            for (x, y) in c.iter_mut().zip(&v) {
                *x -= t * y;
            }
        }
        basis.push(v);
    }
    basis
}

fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dotf(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayVerdict {
    Decaying,
    NonDecaying,
    Inconclusive,
}

/// Commutator decay evidence for one axis.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub axis: usize,
    /// (cutoff, largest singular value sourced from the upper half of the
    /// truncation) per requested cutoff, ascending.
    pub upper_half_peaks: Vec<(u32, f64)>,
    /// Full descending singular-value list at the largest cutoff.
    pub singular_values: Vec<f64>,
    pub tail: Option<TailFit>,
    pub verdict: DecayVerdict,
}

/// Build [P_M, S_k] blockwise at each cutoff and report the decay of the
/// upper-half singular values across cutoffs. At least 3 increasing cutoffs
/// are needed for a non-inconclusive verdict.
pub fn probe_commutator_decay(
    gens: &HomogeneousGeneratorSet,
    cutoffs: &[u32],
) -> Result<Vec<DecayReport>> {
    if cutoffs.is_empty() {
        return Err(Error::InsufficientData("no cutoffs given".into()));
    }
    let mut sorted = cutoffs.to_vec();
    sorted.sort_unstable();
    let top = *sorted.last().unwrap();
    let bases = graded_subspace_bases(gens, top)?;
    let d = gens.d;
    let mut reports = Vec::with_capacity(d);
    for k in 1..=d {
        let blocks = commutator_blocks(gens, &bases, k, top);
        let mut peaks = Vec::with_capacity(sorted.len());
        for &n_cut in &sorted {
            // singular values sourced from degrees in the upper half of this
            // truncation: blocks n with n > n_cut/2, n <= n_cut − 1
            let mut peak = 0.0f64;
            for (n, svs) in &blocks {
                if *n < n_cut && 2 * *n > n_cut {
                    for s in svs {
                        peak = peak.max(*s);
                    }
                }
            }
            peaks.push((n_cut, peak));
        }
        let mut all: Vec<f64> = blocks
            .iter()
            .filter(|(n, _)| *n < top)
            .flat_map(|(_, svs)| svs.iter().copied())
            .collect();
        all.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let tail = tail_exponent_f64(&all).ok();
        let verdict = if sorted.len() < 3 {
            DecayVerdict::Inconclusive
        } else if peaks.iter().all(|(_, p)| *p < 1e-10) || peaks.windows(2).all(|w| w[1].1 < w[0].1)
        {
            // already at numerical zero, or strictly shrinking with the cutoff
            DecayVerdict::Decaying
        } else if peaks.windows(2).all(|w| w[1].1 >= w[0].1 * 0.999) {
            DecayVerdict::NonDecaying
        } else {
            DecayVerdict::Inconclusive
        };
        reports.push(DecayReport {
            axis: k,
            upper_half_peaks: peaks,
            singular_values: all,
            tail,
            verdict,
        });
    }
    Ok(reports)
}

/// Per-degree blocks of [P_M, S_k]: for each n < cutoff the block
/// P_{n+1}S_k − S_kP_n from degree n to n+1, returned as singular values.
fn commutator_blocks(
    gens: &HomogeneousGeneratorSet,
    bases: &[GradedBasis],
    k: usize,
    cutoff: u32,
) -> Vec<(u32, Vec<f64>)> {
    let d = gens.d;
    let r = gens.r;
    let mut out = Vec::new();
    for n in 0..cutoff {
        let src_points = {
            let mut p = indices_of_degree(d, n);
            p.sort();
            p
        };
        let dst_points = {
            let mut p = indices_of_degree(d, n + 1);
            p.sort();
            p
        };
        let rows = dst_points.len() * r;
        let cols = src_points.len() * r;
        // S_k block in normalized coordinates
        let mut shift = nalgebra::DMatrix::<f64>::zeros(rows, cols);
        for (pi, p) in src_points.iter().enumerate() {
            let q = p.step(k);
            let Some(qi) = coordinate_index(&dst_points, 1, &q, 0) else {
                continue;
            };
            let w = (((p.component(k) + 1) as f64) / ((p.degree() + 1) as f64)).sqrt();
            for slot in 0..r {
                shift[(qi * r + slot, pi * r + slot)] = w;
            }
        }
        let proj = |basis: &GradedBasis| -> nalgebra::DMatrix<f64> {
            let dim = basis.ambient_dim;
            let mut p = nalgebra::DMatrix::<f64>::zeros(dim, dim);
            for v in &basis.vectors {
                let u = nalgebra::DVector::from_column_slice(v);
                p += &u * u.transpose();
            }
            p
        };
        let p_src = proj(&bases[n as usize]);
        let p_dst = proj(&bases[n as usize + 1]);
        let block = &p_dst * &shift - &shift * &p_src;
        let svd = block.svd(false, false);
        let mut svs: Vec<f64> = svd.singular_values.iter().copied().collect();
        svs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        out.push((n, svs));
    }
    out
}
