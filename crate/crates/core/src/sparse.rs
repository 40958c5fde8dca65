//! Compressed sparse row storage shared by the count, entropy and Boltzmann
//! tables. Every table derived from a [`CooccurrenceTable`](crate::CooccurrenceTable)
//! keeps the exact same row layout, so entry `k` of one table and entry `k`
//! of another always refer to the same `(row, column)` pair.

use std::ops::Range;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseRows<T> {
    offsets: Vec<usize>,
    columns: Vec<u32>,
    values: Vec<T>,
}

impl<T> SparseRows<T> {
    /// Builds from triples already sorted by `(row, column)` with no duplicates.
    ///
    /// Panics if the triples are unsorted or reference a row `>= n_rows`.
    pub fn from_sorted<I>(n_rows: usize, triples: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, T)>,
    {
        let mut offsets = Vec::with_capacity(n_rows + 1);
        let mut columns = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        let mut last: Option<(u32, u32)> = None;
        for (row, col, value) in triples {
            assert!((row as usize) < n_rows, "row {row} out of range");
            if let Some(prev) = last {
                assert!(prev < (row, col), "triples must be strictly increasing");
            }
            while offsets.len() <= row as usize {
                offsets.push(columns.len());
            }
            columns.push(col);
            values.push(value);
            last = Some((row, col));
        }
        while offsets.len() <= n_rows {
            offsets.push(columns.len());
        }
        SparseRows {
            offsets,
            columns,
            values,
        }
    }

    /// Same layout as `self` with new values.
    pub fn with_values<U>(&self, values: Vec<U>) -> SparseRows<U> {
        assert_eq!(values.len(), self.values.len());
        SparseRows {
            offsets: self.offsets.clone(),
            columns: self.columns.clone(),
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.columns.len()
    }

    pub fn row_range(&self, row: u32) -> Range<usize> {
        let r = row as usize;
        self.offsets[r]..self.offsets[r + 1]
    }

    pub fn row_len(&self, row: u32) -> usize {
        let r = row as usize;
        self.offsets[r + 1] - self.offsets[r]
    }

    pub fn row(&self, row: u32) -> (&[u32], &[T]) {
        let range = self.row_range(row);
        (&self.columns[range.clone()], &self.values[range])
    }

    /// Flat index of `(row, col)` if the entry is stored.
    pub fn position(&self, row: u32, col: u32) -> Option<usize> {
        if row as usize >= self.n_rows() {
            return None;
        }
        let range = self.row_range(row);
        self.columns[range.clone()]
            .binary_search(&col)
            .ok()
            .map(|i| range.start + i)
    }

    pub fn get(&self, row: u32, col: u32) -> Option<&T> {
        self.position(row, col).map(|i| &self.values[i])
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Iterates `(row, column, &value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, &T)> + '_ {
        (0..self.n_rows() as u32).flat_map(move |row| {
            let range = self.row_range(row);
            self.columns[range.clone()]
                .iter()
                .zip(&self.values[range])
                .map(move |(&col, v)| (row, col, v))
        })
    }
}

impl<T: Copy> SparseRows<T> {
    /// Column-major view: row `c` of the result lists `(r, value)` for every
    /// stored `(r, c)`, with `r` ascending.
    pub fn transpose(&self, n_cols: usize) -> SparseRows<T> {
        let mut counts = vec![0usize; n_cols + 1];
        for &c in &self.columns {
            counts[c as usize + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let offsets = counts.clone();
        let mut cursor = counts;
        let nnz = self.nnz();
        let mut columns = vec![0u32; nnz];
        let mut values: Vec<Option<T>> = vec![None; nnz];
        for (row, col, &v) in self.iter() {
            let slot = cursor[col as usize];
            cursor[col as usize] += 1;
            columns[slot] = row;
            values[slot] = Some(v);
        }
        SparseRows {
            offsets,
            columns,
            values: values.into_iter().map(|v| v.expect("filled")).collect(),
        }
    }
}
