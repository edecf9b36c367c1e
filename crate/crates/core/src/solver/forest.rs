//! A logical Boolean matrix kept as a set of matrices whose sizes are
//! `b`-separated: for elements `A ≠ B` with `nnz(A) <= nnz(B)`,
//! `b·nnz(A) < nnz(B)`. Inserting a small delta then costs a merge with
//! small elements only; large elements are rebuilt rarely.

use alloc::vec::Vec;

use crate::sparse::{convert, difference, spgemm, union, BoolMat, Layout, OpCounter, Orientation, SparseError};

#[derive(Clone, Debug)]
pub struct MatrixForest {
    rows: usize,
    cols: usize,
    layout: Layout,
    b: usize,
    /// Sorted by ascending nnz; never holds an empty matrix.
    elements: Vec<BoolMat>,
}

impl MatrixForest {
    pub fn new(rows: usize, cols: usize, layout: Layout, b: usize) -> Self {
        assert!(b > 1, "forest growth factor must exceed 1");
        MatrixForest { rows, cols, layout, b, elements: Vec::new() }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn elements(&self) -> &[BoolMat] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Sum of element sizes; equals the logical nnz since elements are
    /// kept disjoint by the solver, but not in general.
    pub fn stored_nnz(&self) -> usize {
        self.elements.iter().map(BoolMat::nnz).sum()
    }

    pub fn materialize(&self) -> BoolMat {
        let mut c = OpCounter::default();
        self.elements
            .iter()
            .fold(BoolMat::zeros(self.rows, self.cols, self.layout), |acc, e| union(&acc, e, &mut c).expect("same shape"))
    }

    /// First pair of elements violating the size separation, if any.
    pub fn violation(&self) -> Option<(usize, usize)> {
        (1..self.elements.len()).find_map(|i| {
            let (a, b) = (self.elements[i - 1].nnz(), self.elements[i].nnz());
            (self.b * a >= b).then_some((i - 1, i))
        })
    }

    pub fn invariant_holds(&self) -> bool {
        self.violation().is_none()
    }

    fn check_shape(&self, op: &'static str, d: &BoolMat) -> Result<(), SparseError> {
        if d.shape() != self.shape() {
            return Err(SparseError::DimensionMismatch { op, left: d.shape(), right: self.shape() });
        }
        Ok(())
    }
}

/// Adds `d` as a new element, then merges violating neighbours, smallest
/// first, until the sizes are separated again.
pub fn forest_insert(f: &mut MatrixForest, d: &BoolMat, counter: &mut OpCounter) -> Result<(), SparseError> {
    f.check_shape("forest_insert", d)?;
    if d.is_empty() {
        return Ok(());
    }
    let d = convert(d, f.layout);
    let at = f.elements.partition_point(|e| e.nnz() <= d.nnz());
    f.elements.insert(at, d);
    // Adjacent separation implies separation of all pairs because b > 1.
    while let Some((i, j)) = f.violation() {
        let merged = union(&f.elements[i], &f.elements[j], counter)?;
        f.elements.remove(j);
        f.elements.remove(i);
        let at = f.elements.partition_point(|e| e.nnz() <= merged.nnz());
        f.elements.insert(at, merged);
    }
    Ok(())
}

/// `d` minus the logical value of `f`, subtracting the largest element
/// first. The result keeps the layout of `d`.
pub fn forest_difference(d: &BoolMat, f: &MatrixForest) -> Result<BoolMat, SparseError> {
    f.check_shape("forest_difference", d)?;
    let mut out = d.clone();
    for e in f.elements.iter().rev() {
        if out.is_empty() {
            break;
        }
        out = difference(&out, e)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaSide {
    /// `d · M`
    Left,
    /// `M · d`
    Right,
}

/// `d · M` or `M · d` against every element of `f`, unioned. The
/// orientation follows the forest layout (column-by-column for a
/// column-major forest) and `d` is converted to match. The result is in
/// that layout.
pub fn multiply_with_forest(
    d: &BoolMat,
    f: &MatrixForest,
    side: DeltaSide,
    counter: &mut OpCounter,
) -> Result<BoolMat, SparseError> {
    let orientation = match f.layout {
        Layout::RowMajor => Orientation::RowByRow,
        Layout::ColMajor => Orientation::ColumnByColumn,
    };
    let d = convert(d, f.layout);
    let (rows, cols) = match side {
        DeltaSide::Left => (d.rows(), f.cols),
        DeltaSide::Right => (f.rows, d.cols()),
    };
    let mut out = BoolMat::zeros(rows, cols, f.layout);
    if side == DeltaSide::Left && d.cols() != f.rows || side == DeltaSide::Right && f.cols != d.rows() {
        return Err(SparseError::DimensionMismatch { op: "multiply_with_forest", left: d.shape(), right: f.shape() });
    }
    for e in &f.elements {
        let p = match side {
            DeltaSide::Left => spgemm(&d, e, orientation, counter)?,
            DeltaSide::Right => spgemm(e, &d, orientation, counter)?,
        };
        out = union(&out, &p, counter)?;
    }
    Ok(out)
}
