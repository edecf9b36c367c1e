//! Sparse Boolean matrices.
//!
//! A [`BoolMat`] is stored compressed along its *major* dimension (rows for
//! [`Layout::RowMajor`], columns for [`Layout::ColMajor`]). Each line holds
//! sorted, deduplicated *minor* coordinates. When fewer than one line in
//! eight is nonempty the matrix switches to a hypersparse form that keeps
//! only the ids of nonempty lines, so cost and memory follow nnz rather
//! than the dimension.

mod block;
mod ops;
mod spgemm;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};
use core::ops::{Add, AddAssign};

pub use block::{
    block_collapse, block_collapse_vertical, block_diagonalize, block_offset, diagonal_to_vertical,
    horizontal_to_vertical, vertical_to_horizontal, BlockSide,
};
pub use ops::{convert, difference, union};
pub use spgemm::{spgemm, Orientation};

/// Nonempty-line fraction below which storage becomes hypersparse.
pub const HYPERSPARSE_DENOMINATOR: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layout {
    RowMajor,
    ColMajor,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SparseError {
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    DimensionMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("{op}: operand layout {found:?} where {expected:?} is required")]
    LayoutMismatch { op: &'static str, expected: Layout, found: Layout },
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
    #[error("block slot {slot} outside a universe of {universe} indices")]
    SlotOutOfRange { slot: usize, universe: usize },
}

/// Deterministic operation counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpCounter {
    /// Boolean matrix multiplications performed.
    pub spgemm_calls: u64,
    /// `(driver entry, matching line entry)` pairs visited inside SpGEMM.
    pub scalar_ops: u64,
    /// Entries read by element-wise unions, forest merges included.
    pub union_entries: u64,
    /// Entries of the driving operand visited by SpGEMM, whether or not
    /// the matching line of the other operand is empty.
    pub driver_entries: u64,
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, o: OpCounter) {
        self.spgemm_calls += o.spgemm_calls;
        self.scalar_ops += o.scalar_ops;
        self.union_entries += o.union_entries;
        self.driver_entries += o.driver_entries;
    }
}

impl Add for OpCounter {
    type Output = OpCounter;
    fn add(mut self, o: OpCounter) -> OpCounter {
        self += o;
        self
    }
}

#[derive(Clone, Debug)]
enum Lines {
    /// `ptr[l]..ptr[l + 1]` is line `l`; `ptr.len() == major + 1`.
    Dense(Vec<usize>),
    /// `ids[p]` is the line stored at `ptr[p]..ptr[p + 1]`.
    Hyper { ids: Vec<usize>, ptr: Vec<usize> },
}

#[derive(Clone, Debug)]
pub struct BoolMat {
    rows: usize,
    cols: usize,
    layout: Layout,
    lines: Lines,
    idx: Vec<usize>,
}

impl BoolMat {
    pub fn zeros(rows: usize, cols: usize, layout: Layout) -> Self {
        BoolMat::from_compressed(rows, cols, layout, Vec::new(), alloc::vec![0], Vec::new())
    }

    /// Square matrix with the full diagonal set.
    pub fn identity(n: usize, layout: Layout) -> Self {
        let ids: Vec<usize> = (0..n).collect();
        let ptr: Vec<usize> = (0..=n).collect();
        BoolMat::from_compressed(n, n, layout, ids, ptr, (0..n).collect())
    }

    /// Builds from arbitrary `(row, col)` entries; duplicates are merged.
    pub fn from_entries<I>(rows: usize, cols: usize, layout: Layout, entries: I) -> Result<Self, SparseError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs = Vec::new();
        for (r, c) in entries {
            if r >= rows || c >= cols {
                return Err(SparseError::OutOfBounds { row: r, col: c, rows, cols });
            }
            pairs.push(match layout {
                Layout::RowMajor => (r, c),
                Layout::ColMajor => (c, r),
            });
        }
        Ok(BoolMat::from_line_pairs(rows, cols, layout, pairs))
    }

    /// `pairs` are `(line, minor)` coordinates already known to be in range.
    pub(crate) fn from_line_pairs(rows: usize, cols: usize, layout: Layout, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        let mut ids = Vec::new();
        let mut ptr = alloc::vec![0];
        let mut idx = Vec::with_capacity(pairs.len());
        for (line, minor) in pairs {
            if ids.last() != Some(&line) {
                if !ids.is_empty() {
                    ptr.push(idx.len());
                }
                ids.push(line);
            }
            idx.push(minor);
        }
        if !ids.is_empty() {
            ptr.push(idx.len());
        }
        BoolMat::from_compressed(rows, cols, layout, ids, ptr, idx)
    }

    /// `ids` are the sorted nonempty lines and `ptr` has `ids.len() + 1`
    /// offsets into `idx`; every line must be sorted and duplicate free.
    pub(crate) fn from_compressed(
        rows: usize,
        cols: usize,
        layout: Layout,
        ids: Vec<usize>,
        ptr: Vec<usize>,
        idx: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(ptr.len(), ids.len() + 1);
        let major = match layout {
            Layout::RowMajor => rows,
            Layout::ColMajor => cols,
        };
        let lines = if ids.len() * HYPERSPARSE_DENOMINATOR < major {
            Lines::Hyper { ids, ptr }
        } else {
            let mut dense = alloc::vec![0usize; major + 1];
            for (p, &l) in ids.iter().enumerate() {
                dense[l + 1] = ptr[p + 1] - ptr[p];
            }
            for l in 0..major {
                dense[l + 1] += dense[l];
            }
            Lines::Dense(dense)
        };
        BoolMat { rows, cols, layout, lines, idx }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn nnz(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }

    pub fn is_hypersparse(&self) -> bool {
        matches!(self.lines, Lines::Hyper { .. })
    }

    pub(crate) fn minor(&self) -> usize {
        match self.layout {
            Layout::RowMajor => self.cols,
            Layout::ColMajor => self.rows,
        }
    }

    /// Minor coordinates of line `l` (empty when out of range).
    pub(crate) fn line(&self, l: usize) -> &[usize] {
        match &self.lines {
            Lines::Dense(ptr) => {
                if l + 1 < ptr.len() {
                    &self.idx[ptr[l]..ptr[l + 1]]
                } else {
                    &[]
                }
            }
            Lines::Hyper { ids, ptr } => match ids.binary_search(&l) {
                Ok(p) => &self.idx[ptr[p]..ptr[p + 1]],
                Err(_) => &[],
            },
        }
    }

    /// Nonempty lines in increasing order.
    pub(crate) fn lines(&self) -> impl Iterator<Item = (usize, &[usize])> + '_ {
        let (dense, hyper) = match &self.lines {
            Lines::Dense(ptr) => (Some(ptr), None),
            Lines::Hyper { ids, ptr } => (None, Some((ids, ptr))),
        };
        let dense_iter = dense.into_iter().flat_map(move |ptr| {
            (0..ptr.len() - 1).filter(move |&l| ptr[l] < ptr[l + 1]).map(move |l| (l, &self.idx[ptr[l]..ptr[l + 1]]))
        });
        let hyper_iter = hyper.into_iter().flat_map(move |(ids, ptr)| {
            ids.iter().enumerate().map(move |(p, &l)| (l, &self.idx[ptr[p]..ptr[p + 1]]))
        });
        dense_iter.chain(hyper_iter)
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        let (l, m) = match self.layout {
            Layout::RowMajor => (row, col),
            Layout::ColMajor => (col, row),
        };
        self.line(l).binary_search(&m).is_ok()
    }

    /// `(row, col)` entries in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let layout = self.layout;
        self.lines().flat_map(move |(l, ms)| {
            ms.iter().map(move |&m| match layout {
                Layout::RowMajor => (l, m),
                Layout::ColMajor => (m, l),
            })
        })
    }

    /// Entries sorted by row, then column.
    pub fn sorted_entries(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.iter().collect();
        if self.layout == Layout::ColMajor {
            v.sort_unstable();
        }
        v
    }

    /// One `(row, col)` per line, sorted; used by golden tests.
    pub fn to_coord_text(&self) -> String {
        let mut out = String::new();
        for (r, c) in self.sorted_entries() {
            let _ = writeln!(out, "({r}, {c})");
        }
        out
    }

    /// Re-indexes every entry through `f` into a `rows x cols` matrix of the
    /// same layout. `f` must map into range.
    pub(crate) fn map_entries(&self, rows: usize, cols: usize, f: impl Fn(usize, usize) -> (usize, usize)) -> BoolMat {
        let layout = self.layout;
        let pairs = self
            .iter()
            .map(|(r, c)| {
                let (r, c) = f(r, c);
                debug_assert!(r < rows && c < cols);
                match layout {
                    Layout::RowMajor => (r, c),
                    Layout::ColMajor => (c, r),
                }
            })
            .collect();
        BoolMat::from_line_pairs(rows, cols, layout, pairs)
    }
}

/// Logical equality: same shape and same entries, whatever the layouts.
impl PartialEq for BoolMat {
    fn eq(&self, other: &Self) -> bool {
        if self.shape() != other.shape() || self.nnz() != other.nnz() {
            return false;
        }
        if self.layout == other.layout {
            self.lines().eq(other.lines())
        } else {
            self.sorted_entries() == other.sorted_entries()
        }
    }
}

impl Eq for BoolMat {}

impl fmt::Display for BoolMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} {:?} nnz={}", self.rows, self.cols, self.layout, self.nnz())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn hypersparse_switch() {
        let m = BoolMat::from_entries(100, 100, Layout::RowMajor, [(3, 4), (50, 1)]).unwrap();
        assert!(m.is_hypersparse());
        let d = BoolMat::from_entries(8, 8, Layout::RowMajor, [(0, 1), (5, 5)]).unwrap();
        assert!(!d.is_hypersparse());
        assert_eq!(m.line(50), &[1]);
        assert_eq!(m.line(51), &[] as &[usize]);
        assert_eq!(d.line(5), &[5]);
        assert_eq!(d.line(4), &[] as &[usize]);
    }

    #[test]
    fn entries_deduplicate_and_sort() {
        let m = BoolMat::from_entries(3, 3, Layout::ColMajor, [(2, 0), (0, 0), (2, 0), (1, 2)]).unwrap();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.sorted_entries(), vec![(0, 0), (1, 2), (2, 0)]);
        assert!(m.contains(1, 2));
        assert!(!m.contains(2, 1));
    }

    #[test]
    fn out_of_bounds() {
        let err = BoolMat::from_entries(2, 2, Layout::RowMajor, [(2, 0)]).unwrap_err();
        assert_eq!(err, SparseError::OutOfBounds { row: 2, col: 0, rows: 2, cols: 2 });
    }

    #[test]
    fn coord_text() {
        let m = BoolMat::from_entries(4, 4, Layout::ColMajor, [(3, 0), (0, 2)]).unwrap();
        assert_eq!(m.to_coord_text(), "(0, 2)\n(3, 0)\n");
    }

    #[test]
    fn zero_sized() {
        let z = BoolMat::zeros(0, 5, Layout::RowMajor);
        assert_eq!(z.nnz(), 0);
        assert_eq!(z.iter().count(), 0);
        let i = BoolMat::identity(0, Layout::RowMajor);
        assert!(i.is_empty());
    }

    #[test]
    fn equality_ignores_layout() {
        let a = BoolMat::from_entries(5, 6, Layout::RowMajor, [(0, 5), (4, 1)]).unwrap();
        let b = BoolMat::from_entries(5, 6, Layout::ColMajor, [(4, 1), (0, 5)]).unwrap();
        assert_eq!(a, b);
        let c = BoolMat::from_entries(6, 6, Layout::RowMajor, [(0, 5), (4, 1)]).unwrap();
        assert_ne!(a, c);
    }
}
