//! Subset bookkeeping for the exterior algebra ΛZ over a d-dimensional space.
//!
//! Basis elements of ΛZ are subsets of {1,…,d} stored as bitmasks (bit k−1 for
//! axis k). The canonical ordering is by cardinality, then by the sorted
//! element list; wedge signs follow the convention that creating with e_k
//! prepends, so the sign counts the elements of the subset smaller than k.

/// All 2ᵈ subsets in canonical order (cardinality, then lexicographic on the
/// sorted element lists).
pub fn canonical_subsets(d: usize) -> Vec<u32> {
    let mut masks: Vec<u32> = (0..(1u32 << d)).collect();
    masks.sort_by_key(|m| (m.count_ones(), elements(*m)));
    masks
}

/// Sorted element list of a subset mask (1-based axes).
pub fn elements(mask: u32) -> Vec<u32> {
    (0..32)
        .filter(|b| mask & (1 << b) != 0)
        .map(|b| b + 1)
        .collect()
}

/// Action of the creation operator C_k on a subset: returns the target mask
/// and the sign, or `None` when k already occurs (C_k annihilates).
pub fn create(mask: u32, k: usize) -> Option<(u32, i8)> {
    let bit = 1u32 << (k - 1);
    if mask & bit != 0 {
        return None;
    }
    let below = (mask & (bit - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1 } else { -1 };
    Some((mask | bit, sign))
}

/// Action of the annihilation operator C_k* on a subset: returns the target
/// mask and the sign, or `None` when k does not occur. Subsets are
/// orthonormal, so this is the exact adjoint of [`create`].
pub fn annihilate(mask: u32, k: usize) -> Option<(u32, i8)> {
    let bit = 1u32 << (k - 1);
    if mask & bit == 0 {
        return None;
    }
    let below = (mask & (bit - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1 } else { -1 };
    Some((mask & !bit, sign))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_d2() {
        // {}, {1}, {2}, {1,2}
        assert_eq!(canonical_subsets(2), vec![0b00, 0b01, 0b10, 0b11]);
    }

    #[test]
    fn create_then_annihilate_signs() {
        for d in 1..=5 {
            for mask in canonical_subsets(d) {
                for k in 1..=d {
                    if let Some((m2, s)) = create(mask, k) {
                        let (m3, s2) = annihilate(m2, k).unwrap();
                        assert_eq!(m3, mask);
                        assert_eq!(s, s2);
                    }
                }
            }
        }
    }
}
