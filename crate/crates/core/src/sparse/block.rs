//! Block layouts for indexed families.
//!
//! With `n` vertices and `k` index values, slot `t` of a family occupies
//! column block `[t·n, (t+1)·n)` of an `n x k·n` *horizontal* matrix, or row
//! block `[t·n, (t+1)·n)` of a `k·n x n` *vertical* matrix. Every transform
//! here is a pure re-indexing of entries and keeps the layout.

use super::{BoolMat, SparseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockSide {
    Horizontal,
    Vertical,
}

fn expect_shape(op: &'static str, m: &BoolMat, shape: (usize, usize)) -> Result<(), SparseError> {
    if m.shape() != shape {
        return Err(SparseError::DimensionMismatch { op, left: m.shape(), right: shape });
    }
    Ok(())
}

/// Places the `n x n` matrix `a` into slot `slot` of a `k`-slot block.
pub fn block_offset(a: &BoolMat, slot: usize, universe: usize, side: BlockSide) -> Result<BoolMat, SparseError> {
    let n = a.rows();
    expect_shape("block_offset", a, (n, n))?;
    if slot >= universe {
        return Err(SparseError::SlotOutOfRange { slot, universe });
    }
    let off = slot * n;
    Ok(match side {
        BlockSide::Horizontal => a.map_entries(n, universe * n, |r, c| (r, c + off)),
        BlockSide::Vertical => a.map_entries(universe * n, n, |r, c| (r + off, c)),
    })
}

/// Spreads a vertical block onto the block diagonal of a `k·n x k·n`
/// matrix: `(t·n + u, w)` becomes `(t·n + u, t·n + w)`.
pub fn block_diagonalize(v: &BoolMat, n: usize, universe: usize) -> Result<BoolMat, SparseError> {
    expect_shape("block_diagonalize", v, (universe * n, n))?;
    Ok(v.map_entries(universe * n, universe * n, |r, c| (r, (r / n) * n + c)))
}

/// Inverse of [`block_diagonalize`] on its image.
pub fn diagonal_to_vertical(d: &BoolMat, n: usize, universe: usize) -> Result<BoolMat, SparseError> {
    expect_shape("diagonal_to_vertical", d, (universe * n, universe * n))?;
    Ok(d.map_entries(universe * n, n, |r, c| (r, c % n.max(1))))
}

/// Union of the column blocks of a horizontal block matrix.
pub fn block_collapse(h: &BoolMat, n: usize, universe: usize) -> Result<BoolMat, SparseError> {
    expect_shape("block_collapse", h, (n, universe * n))?;
    Ok(h.map_entries(n, n, |r, c| (r, c % n)))
}

/// Union of the row blocks of a vertical block matrix.
pub fn block_collapse_vertical(v: &BoolMat, n: usize, universe: usize) -> Result<BoolMat, SparseError> {
    expect_shape("block_collapse_vertical", v, (universe * n, n))?;
    Ok(v.map_entries(n, n, |r, c| (r % n, c)))
}

/// `(t·n + u, w)` to `(u, t·n + w)`.
pub fn vertical_to_horizontal(v: &BoolMat, n: usize, universe: usize) -> Result<BoolMat, SparseError> {
    expect_shape("vertical_to_horizontal", v, (universe * n, n))?;
    Ok(v.map_entries(n, universe * n, |r, c| (r % n, (r / n) * n + c)))
}

/// `(u, t·n + w)` to `(t·n + u, w)`.
pub fn horizontal_to_vertical(h: &BoolMat, n: usize, universe: usize) -> Result<BoolMat, SparseError> {
    expect_shape("horizontal_to_vertical", h, (n, universe * n))?;
    Ok(h.map_entries(universe * n, n, |r, c| ((c / n) * n + r, c % n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{spgemm, union, Layout, OpCounter, Orientation};
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn m(rows: usize, cols: usize, e: &[(usize, usize)]) -> BoolMat {
        BoolMat::from_entries(rows, cols, Layout::RowMajor, e.iter().copied()).unwrap()
    }

    #[test]
    fn offset_examples() {
        let a = m(10, 10, &[(1, 2)]);
        assert_eq!(block_offset(&a, 0, 1, BlockSide::Horizontal).unwrap().sorted_entries(), vec![(1, 2)]);
        let h = block_offset(&a, 3, 5, BlockSide::Horizontal).unwrap();
        assert_eq!(h.shape(), (10, 50));
        assert_eq!(h.sorted_entries(), vec![(1, 32)]);
        let v = block_offset(&a, 3, 5, BlockSide::Vertical).unwrap();
        assert_eq!(v.sorted_entries(), vec![(31, 2)]);
        assert!(h.is_hypersparse());
        assert_eq!(
            block_offset(&a, 5, 5, BlockSide::Vertical).unwrap_err(),
            SparseError::SlotOutOfRange { slot: 5, universe: 5 }
        );
    }

    #[test]
    fn diagonalize_examples() {
        let v = m(10, 10, &[(2, 3)]);
        assert_eq!(block_diagonalize(&v, 10, 1).unwrap().sorted_entries(), vec![(2, 3)]);
        let v = m(20, 10, &[(12, 3)]);
        let d = block_diagonalize(&v, 10, 2).unwrap();
        assert_eq!(d.sorted_entries(), vec![(12, 13)]);
        assert_eq!(diagonal_to_vertical(&d, 10, 2).unwrap(), v);
        assert!(block_diagonalize(&m(10, 10, &[]), 10, 2).is_err());
    }

    #[test]
    fn collapse_examples() {
        let h = m(3, 3, &[(0, 1), (2, 2)]);
        assert_eq!(block_collapse(&h, 3, 1).unwrap(), h);
        let h = m(3, 9, &[(0, 1), (0, 7)]);
        assert_eq!(block_collapse(&h, 3, 3).unwrap().sorted_entries(), vec![(0, 1)]);
        assert!(block_collapse(&h, 3, 2).is_err());
    }

    fn slices(v: &BoolMat, n: usize, k: usize) -> Vec<BoolMat> {
        (0..k)
            .map(|t| {
                let e: Vec<_> = v.iter().filter(|&(r, _)| r / n == t).map(|(r, c)| (r - t * n, c)).collect();
                m(n, n, &e)
            })
            .collect()
    }

    fn vertical() -> impl Strategy<Value = (BoolMat, usize, usize)> {
        (1usize..=10, 1usize..=4).prop_flat_map(|(n, k)| {
            proptest::collection::vec((0..k * n, 0..n), 0..40)
                .prop_map(move |e| (m(k * n, n, &e), n, k))
        })
    }

    proptest! {
        #[test]
        fn diagonal_product_is_per_slot_product(((left, n, k), seed) in (vertical(), any::<u64>())) {
            // right operand drawn deterministically from the seed
            let mut right_entries = Vec::new();
            let mut s = seed;
            for r in 0..k * n {
                for c in 0..n {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    if (s >> 33) % 4 == 0 {
                        right_entries.push((r, c));
                    }
                }
            }
            let right = m(k * n, n, &right_entries);
            let mut cnt = OpCounter::default();
            let d = block_diagonalize(&left, n, k).unwrap();
            let got = spgemm(&d, &right, Orientation::RowByRow, &mut cnt).unwrap();
            let (ls, rs) = (slices(&left, n, k), slices(&right, n, k));
            for t in 0..k {
                // dense per-slot product
                let mut expect = Vec::new();
                for u in 0..n {
                    for w in 0..n {
                        if (0..n).any(|x| ls[t].contains(u, x) && rs[t].contains(x, w)) {
                            expect.push((u, w));
                        }
                    }
                }
                prop_assert_eq!(slices(&got, n, k)[t].sorted_entries(), expect);
            }
        }

        #[test]
        fn collapse_is_union_of_slices((v, n, k) in vertical()) {
            let mut cnt = OpCounter::default();
            let expect = slices(&v, n, k).iter().fold(m(n, n, &[]), |acc, s| union(&acc, s, &mut cnt).unwrap());
            prop_assert_eq!(block_collapse_vertical(&v, n, k).unwrap(), expect.clone());
            let h = vertical_to_horizontal(&v, n, k).unwrap();
            prop_assert_eq!(h.nnz(), v.nnz());
            prop_assert_eq!(block_collapse(&h, n, k).unwrap(), expect);
            prop_assert_eq!(horizontal_to_vertical(&h, n, k).unwrap(), v);
        }

        #[test]
        fn offset_preserves_nnz((v, n, k) in vertical(), side in prop_oneof![Just(BlockSide::Horizontal), Just(BlockSide::Vertical)]) {
            let a = slices(&v, n, k)[0].clone();
            let o = block_offset(&a, k - 1, k, side).unwrap();
            prop_assert_eq!(o.nnz(), a.nnz());
        }
    }
}
