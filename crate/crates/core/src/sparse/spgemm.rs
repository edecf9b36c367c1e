use alloc::vec;
use alloc::vec::Vec;

use super::{BoolMat, Layout, OpCounter, SparseError};

/// Output lines wider than this use a sort-and-dedup accumulator instead
/// of a dense bitmap.
const DENSE_ACCUMULATOR_LIMIT: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Both operands row-major; the left operand drives. Output row-major.
    RowByRow,
    /// Both operands column-major; the right operand drives. Output
    /// column-major.
    ColumnByColumn,
}

impl Orientation {
    pub fn layout(self) -> Layout {
        match self {
            Orientation::RowByRow => Layout::RowMajor,
            Orientation::ColumnByColumn => Layout::ColMajor,
        }
    }
}

/// Boolean product `a · b`.
pub fn spgemm(a: &BoolMat, b: &BoolMat, orientation: Orientation, counter: &mut OpCounter) -> Result<BoolMat, SparseError> {
    if a.cols != b.rows {
        return Err(SparseError::DimensionMismatch { op: "spgemm", left: a.shape(), right: b.shape() });
    }
    let layout = orientation.layout();
    for m in [a, b] {
        if m.layout != layout {
            return Err(SparseError::LayoutMismatch { op: "spgemm", expected: layout, found: m.layout });
        }
    }
    counter.spgemm_calls += 1;
    // Row-by-row: row i of the result is the union of rows k of `b` over the
    // entries (i, k) of `a`. Column-by-column is the same walk on the
    // transposed problem: column j is the union of columns k of `a` over the
    // entries (k, j) of `b`.
    let (driver, other) = match orientation {
        Orientation::RowByRow => (a, b),
        Orientation::ColumnByColumn => (b, a),
    };
    let out_minor = other.minor();
    let mut ids = Vec::new();
    let mut ptr = vec![0usize];
    let mut idx = Vec::new();
    let mut acc = Accumulator::new(out_minor);
    for (line, ks) in driver.lines() {
        for &k in ks {
            let hits = other.line(k);
            counter.driver_entries += 1;
            counter.scalar_ops += hits.len() as u64;
            acc.extend(hits);
        }
        if acc.drain_into(&mut idx) {
            ids.push(line);
            ptr.push(idx.len());
        }
    }
    Ok(BoolMat::from_compressed(a.rows, b.cols, layout, ids, ptr, idx))
}

enum Accumulator {
    Bitmap { words: Vec<u64>, touched: Vec<usize> },
    Sorted(Vec<usize>),
}

impl Accumulator {
    fn new(width: usize) -> Self {
        if width <= DENSE_ACCUMULATOR_LIMIT {
            Accumulator::Bitmap { words: vec![0; width.div_ceil(64)], touched: Vec::new() }
        } else {
            Accumulator::Sorted(Vec::new())
        }
    }

    fn extend(&mut self, xs: &[usize]) {
        match self {
            Accumulator::Bitmap { words, touched } => {
                for &x in xs {
                    let (w, bit) = (x / 64, 1u64 << (x % 64));
                    if words[w] & bit == 0 {
                        words[w] |= bit;
                        touched.push(x);
                    }
                }
            }
            Accumulator::Sorted(v) => v.extend_from_slice(xs),
        }
    }

    /// Appends the accumulated line, sorted, and resets. Returns whether the
    /// line was nonempty.
    fn drain_into(&mut self, out: &mut Vec<usize>) -> bool {
        let v = match self {
            Accumulator::Bitmap { words, touched } => {
                for &x in touched.iter() {
                    words[x / 64] = 0;
                }
                touched
            }
            Accumulator::Sorted(v) => v,
        };
        if v.is_empty() {
            return false;
        }
        v.sort_unstable();
        v.dedup();
        out.extend_from_slice(v);
        v.clear();
        true
    }
}
