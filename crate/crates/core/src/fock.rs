//! Exact truncated matrix models on the symmetric Fock space: the d-shift,
//! its restriction to a monomial submodule M, its compression to M⊥,
//! Gram-twisted adjoints, defect operators and the commutator/defect
//! operator identities.
//!
//! Basis convention: unnormalized monomials zⁿ ⊗ v with a separate diagonal
//! Gram ‖zⁿ ⊗ v‖² = (n!/|n|!)·|v|², where the per-point fiber vectors v are
//! pairwise orthogonal rational vectors. Multiplication operators then have
//! rational (mostly 0/1) entries and adjoints stay rational — no square
//! roots appear anywhere in the exact path.
//!
//! Truncation semantics: an operator output of degree > N is dropped, so
//! identities involving at most two degree-raising factors are exact on
//! vectors of degree ≤ N−2.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::exterior;
use crate::lattice::{indices_of_degree, MonomialSubmodule, MultiIndex};
use crate::linalg::{dot, orthogonal_complement, orthogonalize, projection_matrix, SparseMat};
use crate::{Error, Rat, Result};

/// ‖zⁿ‖² = n₁!·…·n_d!/|n|! as an exact rational, via the multiplicative
/// recursion ‖z^{n+e_k}‖²/‖zⁿ‖² = (n_k+1)/(|n|+1).
pub fn fock_norm_sq(n: &MultiIndex) -> Rat {
    let mut norm = Rat::one();
    let mut total: u64 = 0;
    for k in 1..=n.dim() {
        for i in 0..n.component(k) as u64 {
            total += 1;
            norm *= Rat::new((i as i64 + 1).into(), (total as i64).into());
        }
    }
    norm
}

/// Which operator model lives on the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    /// S_k on the whole truncated space.
    Full,
    /// S_k restricted to M (basis: fibers E(n)).
    Restricted,
    /// P⊥ S_k P⊥ on M⊥ (basis: fiber complements E(n)⊥).
    Compressed,
}

/// Ordered basis of a degree-≤N truncation: lattice points in graded
/// lexicographic order, each carrying pairwise-orthogonal rational fiber
/// vectors, plus the diagonal Gram data.
#[derive(Debug, PartialEq, Eq)]
pub struct TruncatedBasis {
    d: usize,
    r: usize,
    cutoff: u32,
    part: Part,
    points: Vec<MultiIndex>,
    /// Fiber vectors per point (may be empty at a point).
    vectors: Vec<Vec<Vec<Rat>>>,
    offsets: Vec<usize>,
    total: usize,
    point_of: HashMap<MultiIndex, usize>,
    /// Diagonal Gram: ‖zⁿ‖²·|v|² per basis element.
    gram: Vec<Rat>,
}

impl TruncatedBasis {
    pub fn build(module: &MonomialSubmodule, cutoff: u32, part: Part) -> Result<Arc<Self>> {
        if cutoff < 1 {
            return Err(Error::CutoffTooSmall {
                required: 1,
                got: cutoff,
            });
        }
        let d = module.d();
        let r = module.r();
        let mut points = Vec::new();
        for n in 0..=cutoff {
            points.extend(indices_of_degree(d, n));
        }
        let mut vectors = Vec::with_capacity(points.len());
        for p in &points {
            let vecs = match part {
                Part::Full => (0..r)
                    .map(|i| {
                        let mut v = vec![Rat::zero(); r];
                        v[i] = Rat::one();
                        v
                    })
                    .collect(),
                Part::Restricted => orthogonalize(&module.fiber(p)?),
                Part::Compressed => orthogonal_complement(&module.fiber(p)?, r),
            };
            vectors.push(vecs);
        }
        let mut offsets = Vec::with_capacity(points.len());
        let mut total = 0;
        for v in &vectors {
            offsets.push(total);
            total += v.len();
        }
        let point_of = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let mut gram = Vec::with_capacity(total);
        for (p, vecs) in points.iter().zip(&vectors) {
            let nn = fock_norm_sq(p);
            for v in vecs {
                gram.push(&nn * dot(v, v));
            }
        }
        Ok(Arc::new(Self {
            d,
            r,
            cutoff,
            part,
            points,
            vectors,
            offsets,
            total,
            point_of,
            gram,
        }))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn part(&self) -> Part {
        self.part
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn points(&self) -> &[MultiIndex] {
        &self.points
    }

    pub fn vectors_at(&self, point_idx: usize) -> &[Vec<Rat>] {
        &self.vectors[point_idx]
    }

    pub fn offset(&self, point_idx: usize) -> usize {
        self.offsets[point_idx]
    }

    pub fn point_index(&self, p: &MultiIndex) -> Option<usize> {
        self.point_of.get(p).copied()
    }

    /// Lattice point and local fiber slot of a basis element.
    pub fn element(&self, i: usize) -> (&MultiIndex, usize) {
        let pi = match self.offsets.binary_search(&i) {
            Ok(p) => {
                // several points may share an offset when fibers are empty;
                // advance to the one that actually owns element i
                let mut p = p;
                while self.vectors[p].is_empty() {
                    p += 1;
                }
                p
            }
            Err(p) => p - 1,
        };
        (&self.points[pi], i - self.offsets[pi])
    }

    pub fn gram(&self) -> &[Rat] {
        &self.gram
    }

    /// Degree of the lattice point carrying basis element i.
    pub fn degree_of(&self, i: usize) -> u32 {
        self.element(i).0.degree()
    }
}

/// Exact rational matrix of an operator on a truncated basis.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    basis: Arc<TruncatedBasis>,
    matrix: SparseMat,
}

impl TruncatedOperator {
    pub fn new(basis: Arc<TruncatedBasis>, matrix: SparseMat) -> Self {
        assert_eq!(matrix.rows(), basis.len());
        assert_eq!(matrix.cols(), basis.len());
        Self { basis, matrix }
    }

    pub fn basis(&self) -> &Arc<TruncatedBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &SparseMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn identity(basis: Arc<TruncatedBasis>) -> Self {
        let n = basis.len();
        Self::new(basis, SparseMat::identity(n))
    }

    pub fn zero(basis: Arc<TruncatedBasis>) -> Self {
        let n = basis.len();
        Self::new(basis, SparseMat::zero(n, n))
    }

    fn check_same_basis(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis {
            Ok(())
        } else {
            Err(Error::BasisMismatch)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            matrix: self.matrix.mul(&other.matrix),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            matrix: self.matrix.add(&other.matrix),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            matrix: self.matrix.sub(&other.matrix),
        })
    }

    /// Gram-twisted adjoint G⁻¹·Aᵀ·G. Exact involution.
    pub fn adjoint(&self) -> Self {
        let g = self.basis.gram();
        let t = self.matrix.transpose();
        let mut triplets = Vec::with_capacity(t.nnz());
        for i in 0..t.rows() {
            for (j, v) in t.row(i) {
                triplets.push((i, *j, v * &g[*j] / &g[i]));
            }
        }
        Self {
            basis: self.basis.clone(),
            matrix: SparseMat::from_triplets(self.dim(), self.dim(), triplets),
        }
    }

    /// Apply to a sparse coordinate vector.
    pub fn apply(&self, x: &[(usize, Rat)]) -> Vec<(usize, Rat)> {
        self.matrix.apply(x)
    }
}

/// Matrix of S_k (full), S_k|_M (restricted) or P⊥S_kP⊥ (compressed) on the
/// degree-≤N truncation. Degree-N vectors map to 0 by truncation.
pub fn truncated_shift(
    module: &MonomialSubmodule,
    k: usize,
    cutoff: u32,
    part: Part,
) -> Result<TruncatedOperator> {
    let basis = TruncatedBasis::build(module, cutoff, part)?;
    shift_on_basis(module, &basis, k)
}

/// The whole tuple (S_1,…,S_d) on one shared basis.
pub fn shift_tuple(
    module: &MonomialSubmodule,
    cutoff: u32,
    part: Part,
) -> Result<Vec<TruncatedOperator>> {
    let basis = TruncatedBasis::build(module, cutoff, part)?;
    (1..=module.d())
        .map(|k| shift_on_basis(module, &basis, k))
        .collect()
}

fn shift_on_basis(
    module: &MonomialSubmodule,
    basis: &Arc<TruncatedBasis>,
    k: usize,
) -> Result<TruncatedOperator> {
    let d = module.d();
    if k < 1 || k > d {
        return Err(Error::InvalidAxis { axis: k, d });
    }
    let mut triplets = Vec::new();
    for (pi, p) in basis.points().iter().enumerate() {
        if p.degree() >= basis.cutoff() {
            continue; // truncated to 0
        }
        let target = p.step(k);
        let Some(ti) = basis.point_index(&target) else {
            continue;
        };
        let src_off = basis.offset(pi);
        let dst_off = basis.offset(ti);
        let dst_vecs = basis.vectors_at(ti);
        for (i, v) in basis.vectors_at(pi).iter().enumerate() {
            // image of zⁿ ⊗ v is z^{n+e_k} ⊗ w where w = v for full/restricted
            // and w = P_{E(target)⊥} v for compressed; in both cases w expands
            // over the orthogonal target vectors with rational coefficients.
            for (j, w) in dst_vecs.iter().enumerate() {
                let c = dot(v, w) / dot(w, w);
                if !c.is_zero() {
                    triplets.push((dst_off + j, src_off + i, c));
                }
            }
        }
    }
    let n = basis.len();
    Ok(TruncatedOperator::new(
        basis.clone(),
        SparseMat::from_triplets(n, n, triplets),
    ))
}

/// Orthogonal projection P_M as an operator on the full basis: block diagonal
/// with blocks P_{E(n)}.
pub fn projection(module: &MonomialSubmodule, cutoff: u32) -> Result<TruncatedOperator> {
    let basis = TruncatedBasis::build(module, cutoff, Part::Full)?;
    projection_on_basis(module, &basis)
}

fn projection_on_basis(
    module: &MonomialSubmodule,
    basis: &Arc<TruncatedBasis>,
) -> Result<TruncatedOperator> {
    assert_eq!(basis.part(), Part::Full);
    let r = module.r();
    let mut triplets = Vec::new();
    for (pi, p) in basis.points().iter().enumerate() {
        let fiber = module.fiber(p)?;
        if fiber.is_empty() {
            continue;
        }
        let block = projection_matrix(&fiber, r);
        let off = basis.offset(pi);
        for i in 0..r {
            for j in 0..r {
                if !block[i][j].is_zero() {
                    triplets.push((off + i, off + j, block[i][j].clone()));
                }
            }
        }
    }
    let n = basis.len();
    Ok(TruncatedOperator::new(
        basis.clone(),
        SparseMat::from_triplets(n, n, triplets),
    ))
}

/// Defect operator 1 − Σ A_k A_k* of a tuple sharing one basis.
pub fn defect(tuple: &[TruncatedOperator]) -> Result<TruncatedOperator> {
    let first = tuple.first().ok_or(Error::InsufficientData(
        "defect of an empty tuple".to_string(),
    ))?;
    let mut acc = TruncatedOperator::identity(first.basis().clone());
    for t in tuple {
        first.check_same_basis(t)?;
        acc = acc.sub(&t.mul(&t.adjoint())?)?;
    }
    Ok(acc)
}

/// Self-commutator T_i* T_j − T_j T_i* (star on the left factor first).
pub fn self_commutator(
    tuple: &[TruncatedOperator],
    i: usize,
    j: usize,
) -> Result<TruncatedOperator> {
    let d = tuple.len();
    if i < 1 || i > d {
        return Err(Error::InvalidAxis { axis: i, d });
    }
    if j < 1 || j > d {
        return Err(Error::InvalidAxis { axis: j, d });
    }
    let ti = &tuple[i - 1];
    let tj = &tuple[j - 1];
    ti.check_same_basis(tj)?;
    let tis = ti.adjoint();
    tis.mul(tj)?.sub(&tj.mul(&tis)?)
}

/// Exact defects of the commutator/defect-operator identities.
///
/// All five defects are exact rationals and must vanish: the identities are
/// exact operator identities, and restricting to interior degrees (≤ N−2)
/// removes truncation edge effects.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    /// max |defect| for [B_j,B_k*]P = −[P,A_j][P,A_k]* + P[A_j,A_k*]P over j,k
    pub restricted_commutator: Rat,
    /// max |defect| for [C_j,C_k*]P⊥ = [P,A_k]*[P,A_j] + P⊥[A_j,A_k*]P⊥
    pub compressed_commutator: Rat,
    /// max |defect| for Δ_B P = PΔ_A P + Σ[P,A_k][P,A_k]*
    pub restricted_defect: Rat,
    /// max |defect| for Δ_C P⊥ = P⊥Δ_A P⊥
    pub compressed_defect: Rat,
    /// max |defect| for D² = F⊗1 + Σ(T_k*T_j − T_jT_k*)⊗C_k*C_j on the
    /// compressed tuple
    pub dirac_square: Rat,
    /// Degrees the identities were evaluated on.
    pub degrees_tested: (u32, u32),
    pub all_zero: bool,
}

type LambdaVec = HashMap<(usize, u32), Rat>;

fn lambda_add(acc: &mut LambdaVec, key: (usize, u32), v: Rat) {
    if v.is_zero() {
        return;
    }
    let slot = acc.entry(key).or_insert_with(Rat::zero);
    *slot += v;
    if slot.is_zero() {
        acc.remove(&key);
    }
}

fn max_abs_diff(a: &[(usize, Rat)], b: &[(usize, Rat)]) -> Rat {
    use num_traits::Signed;
    let mut diff: HashMap<usize, Rat> = a.iter().cloned().collect();
    for (i, v) in b {
        let slot = diff.entry(*i).or_insert_with(Rat::zero);
        *slot -= v;
    }
    diff.values()
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(Rat::zero)
}

/// Evaluate the four defect/commutator identities and the Dirac-square
/// identity on every basis vector of degree ≤ N−2, reporting exact maximal
/// entrywise defects.
pub fn verify_identities(module: &MonomialSubmodule, cutoff: u32) -> Result<IdentityReport> {
    let required = module.max_generator_degree() + 2;
    if cutoff < required {
        return Err(Error::CutoffTooSmall {
            required,
            got: cutoff,
        });
    }
    let d = module.d();
    let basis = TruncatedBasis::build(module, cutoff, Part::Full)?;
    let shifts: Vec<TruncatedOperator> = (1..=d)
        .map(|k| shift_on_basis(module, &basis, k))
        .collect::<Result<_>>()?;
    let adjoints: Vec<TruncatedOperator> = shifts.iter().map(|s| s.adjoint()).collect();
    let p = projection_on_basis(module, &basis)?;
    let one = TruncatedOperator::identity(basis.clone());
    let pperp = one.sub(&p)?;

    let interior = cutoff - 2;
    let mut worst_restricted_comm = Rat::zero();
    let mut worst_compressed_comm = Rat::zero();
    let mut worst_restricted_defect = Rat::zero();
    let mut worst_compressed_defect = Rat::zero();

    let elems: Vec<usize> = (0..basis.len())
        .filter(|&i| basis.degree_of(i) <= interior)
        .collect();

    let ap = |op: &TruncatedOperator, x: &[(usize, Rat)]| op.apply(x);
    for &e in &elems {
        let x = vec![(e, Rat::one())];
        let px = ap(&p, &x);
        let perpx = ap(&pperp, &x);

        for j in 0..d {
            let aj = &shifts[j];
            for k in 0..d {
                let aks = &adjoints[k];
                // [B_j,B_k*]P = −[P,A_j][P,A_k]* + P[A_j,A_k*]P
                let lhs = {
                    let t1 = ap(aj, &ap(&p, &ap(aks, &px)));
                    let t2 = ap(&p, &ap(aks, &ap(aj, &px)));
                    sub_vecs(&t1, &t2)
                };
                let rhs = {
                    // [P,A_k]* x = (A_k*P − PA_k*) x
                    let cks = sub_vecs(&ap(aks, &px), &ap(&p, &ap(aks, &x)));
                    // [P,A_j] y = (PA_j − A_jP) y
                    let cj = sub_vecs(&ap(&p, &ap(aj, &cks)), &ap(aj, &ap(&p, &cks)));
                    let bracket = sub_vecs(&ap(aj, &ap(aks, &px)), &ap(aks, &ap(aj, &px)));
                    sub_vecs(&ap(&p, &bracket), &cj)
                };
                let dl = max_abs_diff(&lhs, &rhs);
                if dl > worst_restricted_comm {
                    worst_restricted_comm = dl;
                }

                // [C_j,C_k*]P⊥ = [P,A_k]*[P,A_j] + P⊥[A_j,A_k*]P⊥
                let lhs = {
                    let t1 = ap(&pperp, &ap(aj, &ap(&pperp, &ap(aks, &perpx))));
                    let t2 = ap(&pperp, &ap(aks, &ap(&pperp, &ap(aj, &perpx))));
                    sub_vecs(&t1, &t2)
                };
                let rhs = {
                    let cj = sub_vecs(&ap(&p, &ap(aj, &x)), &ap(aj, &px));
                    let ckstar_cj = sub_vecs(&ap(aks, &ap(&p, &cj)), &ap(&p, &ap(aks, &cj)));
                    let bracket = sub_vecs(&ap(aj, &ap(aks, &perpx)), &ap(aks, &ap(aj, &perpx)));
                    add_vecs(&ckstar_cj, &ap(&pperp, &bracket))
                };
                let dl = max_abs_diff(&lhs, &rhs);
                if dl > worst_compressed_comm {
                    worst_compressed_comm = dl;
                }
            }
        }

        // Δ_B P = PΔ_A P + Σ[P,A_k][P,A_k]*
        {
            let mut lhs = px.clone();
            for k in 0..d {
                let t = ap(&shifts[k], &ap(&p, &ap(&adjoints[k], &px)));
                lhs = sub_vecs(&lhs, &t);
            }
            let mut rhs = {
                // P Δ_A P x = P(Px − ΣA_kA_k*Px)
                let mut inner = px.clone();
                for k in 0..d {
                    inner = sub_vecs(&inner, &ap(&shifts[k], &ap(&adjoints[k], &px)));
                }
                ap(&p, &inner)
            };
            for k in 0..d {
                let cks = sub_vecs(
                    &ap(&adjoints[k], &ap(&p, &x)),
                    &ap(&p, &ap(&adjoints[k], &x)),
                );
                let ck = sub_vecs(
                    &ap(&p, &ap(&shifts[k], &cks)),
                    &ap(&shifts[k], &ap(&p, &cks)),
                );
                rhs = add_vecs(&rhs, &ck);
            }
            let dl = max_abs_diff(&lhs, &rhs);
            if dl > worst_restricted_defect {
                worst_restricted_defect = dl;
            }
        }

        // Δ_C P⊥ = P⊥Δ_A P⊥
        {
            let mut lhs = perpx.clone();
            for k in 0..d {
                let t = ap(
                    &pperp,
                    &ap(&shifts[k], &ap(&pperp, &ap(&adjoints[k], &perpx))),
                );
                lhs = sub_vecs(&lhs, &t);
            }
            let rhs = {
                let mut inner = perpx.clone();
                for k in 0..d {
                    inner = sub_vecs(&inner, &ap(&shifts[k], &ap(&adjoints[k], &perpx)));
                }
                ap(&pperp, &inner)
            };
            let dl = max_abs_diff(&lhs, &rhs);
            if dl > worst_compressed_defect {
                worst_compressed_defect = dl;
            }
        }
    }

    let dsq = dirac_square_defect(module, cutoff)?;
    let all_zero = worst_restricted_comm.is_zero()
        && worst_compressed_comm.is_zero()
        && worst_restricted_defect.is_zero()
        && worst_compressed_defect.is_zero()
        && dsq.is_zero();
    Ok(IdentityReport {
        restricted_commutator: worst_restricted_comm,
        compressed_commutator: worst_compressed_comm,
        restricted_defect: worst_restricted_defect,
        compressed_defect: worst_compressed_defect,
        dirac_square: dsq,
        degrees_tested: (0, interior),
        all_zero,
    })
}

fn sub_vecs(a: &[(usize, Rat)], b: &[(usize, Rat)]) -> Vec<(usize, Rat)> {
    let mut acc: HashMap<usize, Rat> = a.iter().cloned().collect();
    for (i, v) in b {
        let slot = acc.entry(*i).or_insert_with(Rat::zero);
        *slot -= v;
    }
    let mut out: Vec<(usize, Rat)> = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    out.sort_by_key(|(i, _)| *i);
    out
}

fn add_vecs(a: &[(usize, Rat)], b: &[(usize, Rat)]) -> Vec<(usize, Rat)> {
    let mut acc: HashMap<usize, Rat> = a.iter().cloned().collect();
    for (i, v) in b {
        let slot = acc.entry(*i).or_insert_with(Rat::zero);
        *slot += v;
    }
    let mut out: Vec<(usize, Rat)> = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    out.sort_by_key(|(i, _)| *i);
    out
}

/// D² = F⊗1 + Σ_{k,j}(T_k*T_j − T_jT_k*)⊗C_k*C_j for the compressed tuple,
/// evaluated on (basis vector ⊗ subset) elements of interior degree.
fn dirac_square_defect(module: &MonomialSubmodule, cutoff: u32) -> Result<Rat> {
    use num_traits::Signed;
    let d = module.d();
    let tuple = shift_tuple(module, cutoff, Part::Compressed)?;
    let adjoints: Vec<TruncatedOperator> = tuple.iter().map(|t| t.adjoint()).collect();
    let basis = tuple[0].basis().clone();
    let interior = cutoff - 2;

    let apply_b = |x: &LambdaVec| -> LambdaVec {
        let mut out = LambdaVec::new();
        for ((i, mask), c) in x {
            for k in 1..=d {
                if let Some((m2, s)) = exterior::create(*mask, k) {
                    let img = tuple[k - 1].apply(&[(*i, c.clone())]);
                    for (i2, v) in img {
                        let sv = if s > 0 { v } else { -v };
                        lambda_add(&mut out, (i2, m2), sv);
                    }
                }
            }
        }
        out
    };
    let apply_bstar = |x: &LambdaVec| -> LambdaVec {
        let mut out = LambdaVec::new();
        for ((i, mask), c) in x {
            for k in 1..=d {
                if let Some((m2, s)) = exterior::annihilate(*mask, k) {
                    let img = adjoints[k - 1].apply(&[(*i, c.clone())]);
                    for (i2, v) in img {
                        let sv = if s > 0 { v } else { -v };
                        lambda_add(&mut out, (i2, m2), sv);
                    }
                }
            }
        }
        out
    };

    let mut worst = Rat::zero();
    for e in 0..basis.len() {
        if basis.degree_of(e) > interior {
            continue;
        }
        for mask in 0..(1u32 << d) {
            let mut x = LambdaVec::new();
            x.insert((e, mask), Rat::one());

            // LHS: D²x with D = B + B*
            let dx = {
                let mut v = apply_b(&x);
                for (k, c) in apply_bstar(&x) {
                    lambda_add(&mut v, k, c);
                }
                v
            };
            let mut lhs = apply_b(&dx);
            for (k, c) in apply_bstar(&dx) {
                lambda_add(&mut lhs, k, c);
            }

            // RHS: (ΣT_kT_k*)⊗1 + Σ(T_k*T_j − T_jT_k*)⊗C_k*C_j
            let mut rhs = LambdaVec::new();
            for k in 1..=d {
                let img = tuple[k - 1].apply(&adjoints[k - 1].apply(&[(e, Rat::one())]));
                for (i2, v) in img {
                    lambda_add(&mut rhs, (i2, mask), v);
                }
            }
            for k in 1..=d {
                for j in 1..=d {
                    let Some((mj, sj)) = exterior::create(mask, j) else {
                        continue;
                    };
                    let Some((mkj, sk)) = exterior::annihilate(mj, k) else {
                        continue;
                    };
                    let sign = sj * sk;
                    let t1 = adjoints[k - 1].apply(&tuple[j - 1].apply(&[(e, Rat::one())]));
                    let t2 = tuple[j - 1].apply(&adjoints[k - 1].apply(&[(e, Rat::one())]));
                    for (i2, v) in t1 {
                        lambda_add(&mut rhs, (i2, mkj), if sign > 0 { v } else { -v });
                    }
                    for (i2, v) in t2 {
                        lambda_add(&mut rhs, (i2, mkj), if sign > 0 { -v } else { v });
                    }
                }
            }

            for (key, v) in &rhs {
                let slot = lhs.entry(*key).or_insert_with(Rat::zero);
                *slot -= v;
            }
            for v in lhs.values() {
                let a = v.abs();
                if a > worst {
                    worst = a;
                }
            }
        }
    }
    Ok(worst)
}
