use serde::{Deserialize, Serialize};

/// Dense time-frequency grid indexed by subcarrier `k` and OFDM symbol `l`.
///
/// Cells are stored symbol-major, so iteration visits positions in `(l, k)`
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    n_f: usize,
    n_t: usize,
    cells: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(n_f: usize, n_t: usize, value: T) -> Self {
        Self {
            n_f,
            n_t,
            cells: vec![value; n_f * n_t],
        }
    }
}

impl<T> Grid<T> {
    pub fn from_fn(n_f: usize, n_t: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut cells = Vec::with_capacity(n_f * n_t);
        for l in 0..n_t {
            for k in 0..n_f {
                cells.push(f(k, l));
            }
        }
        Self { n_f, n_t, cells }
    }

    /// Builds a grid from cells already laid out in `(l, k)` order.
    pub fn from_cells(n_f: usize, n_t: usize, cells: Vec<T>) -> Option<Self> {
        (cells.len() == n_f * n_t).then_some(Self { n_f, n_t, cells })
    }

    pub fn n_f(&self) -> usize {
        self.n_f
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn same_shape<U>(&self, other: &Grid<U>) -> bool {
        self.n_f == other.n_f && self.n_t == other.n_t
    }

    pub fn get(&self, k: usize, l: usize) -> &T {
        assert!(k < self.n_f && l < self.n_t, "({k}, {l}) outside grid");
        &self.cells[l * self.n_f + k]
    }

    pub fn get_mut(&mut self, k: usize, l: usize) -> &mut T {
        assert!(k < self.n_f && l < self.n_t, "({k}, {l}) outside grid");
        &mut self.cells[l * self.n_f + k]
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.cells.iter()
    }

    /// `((k, l), cell)` pairs in `(l, k)` order.
    pub fn indexed(&self) -> impl Iterator<Item = ((usize, usize), &T)> {
        let n_f = self.n_f;
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, c)| ((i % n_f, i / n_f), c))
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            n_f: self.n_f,
            n_t: self.n_t,
            cells: self.cells.iter().map(f).collect(),
        }
    }
}
