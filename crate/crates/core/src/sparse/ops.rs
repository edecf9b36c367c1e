use alloc::vec;
use alloc::vec::Vec;

use super::{BoolMat, Layout, OpCounter, SparseError};

/// Element-wise union. Both operands must share shape and layout.
pub fn union(a: &BoolMat, b: &BoolMat, counter: &mut OpCounter) -> Result<BoolMat, SparseError> {
    if a.shape() != b.shape() {
        return Err(SparseError::DimensionMismatch { op: "union", left: a.shape(), right: b.shape() });
    }
    if a.layout != b.layout {
        return Err(SparseError::LayoutMismatch { op: "union", expected: a.layout, found: b.layout });
    }
    counter.union_entries += (a.nnz() + b.nnz()) as u64;
    if b.is_empty() {
        return Ok(a.clone());
    }
    if a.is_empty() {
        return Ok(b.clone());
    }
    Ok(merge_lines(a, b, |x, y, out| {
        let (mut i, mut j) = (0, 0);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                core::cmp::Ordering::Less => {
                    out.push(x[i]);
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(y[j]);
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    out.push(x[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&x[i..]);
        out.extend_from_slice(&y[j..]);
    }))
}

/// Entries of `a` absent from `b`. `b` is converted to the layout of `a`
/// when they differ.
pub fn difference(a: &BoolMat, b: &BoolMat) -> Result<BoolMat, SparseError> {
    if a.shape() != b.shape() {
        return Err(SparseError::DimensionMismatch { op: "difference", left: a.shape(), right: b.shape() });
    }
    if a.is_empty() || b.is_empty() {
        return Ok(a.clone());
    }
    let converted;
    let b = if b.layout == a.layout {
        b
    } else {
        converted = convert(b, a.layout);
        &converted
    };
    Ok(merge_lines(a, b, |x, y, out| {
        let mut j = 0;
        for &v in x {
            while j < y.len() && y[j] < v {
                j += 1;
            }
            if j == y.len() || y[j] != v {
                out.push(v);
            }
        }
    }))
}

/// Walks the nonempty lines of both operands in order and combines each
/// pair of lines (one side possibly empty) with `f`.
fn merge_lines(a: &BoolMat, b: &BoolMat, f: impl Fn(&[usize], &[usize], &mut Vec<usize>)) -> BoolMat {
    let mut ids = Vec::new();
    let mut ptr = vec![0usize];
    let mut idx = Vec::with_capacity(a.nnz().max(b.nnz()));
    let mut la = a.lines().peekable();
    let mut lb = b.lines().peekable();
    loop {
        let (line, x, y): (usize, &[usize], &[usize]) = match (la.peek(), lb.peek()) {
            (None, None) => break,
            (Some(&(l, x)), None) => {
                la.next();
                (l, x, &[])
            }
            (None, Some(&(l, y))) => {
                lb.next();
                (l, &[], y)
            }
            (Some(&(l1, x)), Some(&(l2, y))) => {
                if l1 < l2 {
                    la.next();
                    (l1, x, &[])
                } else if l2 < l1 {
                    lb.next();
                    (l2, &[], y)
                } else {
                    la.next();
                    lb.next();
                    (l1, x, y)
                }
            }
        };
        let before = idx.len();
        f(x, y, &mut idx);
        if idx.len() > before {
            ids.push(line);
            ptr.push(idx.len());
        }
    }
    BoolMat::from_compressed(a.rows, a.cols, a.layout, ids, ptr, idx)
}

/// Same logical matrix stored in `layout`.
pub fn convert(a: &BoolMat, layout: Layout) -> BoolMat {
    if a.layout == layout {
        return a.clone();
    }
    let pairs = a.lines().flat_map(|(l, ms)| ms.iter().map(move |&m| (m, l))).collect();
    BoolMat::from_line_pairs(a.rows, a.cols, layout, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use proptest::prelude::*;

    type Bits = BTreeSet<(usize, usize)>;

    fn bits(m: &BoolMat) -> Bits {
        m.iter().collect()
    }

    fn layout() -> impl Strategy<Value = Layout> {
        prop_oneof![Just(Layout::RowMajor), Just(Layout::ColMajor)]
    }

    fn same_shape_pair() -> impl Strategy<Value = (BoolMat, BoolMat)> {
        (1usize..=40, 1usize..=40, layout()).prop_flat_map(|(r, c, l)| {
            let one = move || {
                proptest::collection::vec((0..r, 0..c), 0..60)
                    .prop_map(move |e| BoolMat::from_entries(r, c, l, e).unwrap())
            };
            (one(), one())
        })
    }

    proptest! {
        #[test]
        fn union_and_difference_match_bitset((a, b) in same_shape_pair()) {
            let mut c = OpCounter::default();
            let u = union(&a, &b, &mut c).unwrap();
            let d = difference(&a, &b).unwrap();
            let (ba, bb) = (bits(&a), bits(&b));
            prop_assert_eq!(bits(&u), &ba | &bb);
            prop_assert_eq!(bits(&d), &ba - &bb);
            prop_assert!(u.nnz() <= a.nnz() + b.nnz());
            // (a ∪ b) \ b ⊆ a, a ⊆ a ∪ b, (a \ b) ∩ b = ∅
            prop_assert!(bits(&difference(&u, &b).unwrap()).is_subset(&ba));
            prop_assert!(ba.is_subset(&bits(&u)));
            prop_assert!(bits(&d).is_disjoint(&bb));
            prop_assert_eq!(c.union_entries, (a.nnz() + b.nnz()) as u64);
        }

        #[test]
        fn convert_preserves_entries((a, _) in same_shape_pair()) {
            let other = match a.layout() { Layout::RowMajor => Layout::ColMajor, Layout::ColMajor => Layout::RowMajor };
            let c = convert(&a, other);
            prop_assert_eq!(c.layout(), other);
            prop_assert_eq!(c.nnz(), a.nnz());
            prop_assert_eq!(bits(&c), bits(&a));
            prop_assert_eq!(convert(&c, a.layout()).sorted_entries(), a.sorted_entries());
        }
    }

    #[test]
    fn identities() {
        let a = BoolMat::from_entries(3, 3, Layout::RowMajor, [(0, 0), (1, 2)]).unwrap();
        let z = BoolMat::zeros(3, 3, Layout::RowMajor);
        let mut c = OpCounter::default();
        assert_eq!(union(&a, &z, &mut c).unwrap(), a);
        assert_eq!(difference(&a, &z).unwrap(), a);
        assert!(difference(&a, &a).unwrap().is_empty());
        let one = BoolMat::from_entries(3, 3, Layout::RowMajor, [(0, 0)]).unwrap();
        assert_eq!(union(&one, &one, &mut c).unwrap().sorted_entries(), alloc::vec![(0, 0)]);
    }

    #[test]
    fn difference_across_layouts() {
        let a = BoolMat::from_entries(3, 3, Layout::RowMajor, [(0, 0), (1, 2), (2, 1)]).unwrap();
        let b = BoolMat::from_entries(3, 3, Layout::ColMajor, [(1, 2)]).unwrap();
        let d = difference(&a, &b).unwrap();
        assert_eq!(d.layout(), Layout::RowMajor);
        assert_eq!(d.sorted_entries(), alloc::vec![(0, 0), (2, 1)]);
    }

    #[test]
    fn convert_example() {
        let a = BoolMat::from_entries(4, 6, Layout::RowMajor, [(0, 5), (3, 5)]).unwrap();
        let c = convert(&a, Layout::ColMajor);
        assert_eq!(c.line(5), &[0, 3]);
    }

    #[test]
    fn mismatches() {
        let a = BoolMat::zeros(2, 3, Layout::RowMajor);
        let mut c = OpCounter::default();
        assert!(union(&a, &BoolMat::zeros(3, 2, Layout::RowMajor), &mut c).is_err());
        assert!(union(&a, &BoolMat::zeros(2, 3, Layout::ColMajor), &mut c).is_err());
        assert!(difference(&a, &BoolMat::zeros(2, 2, Layout::RowMajor)).is_err());
    }
}
