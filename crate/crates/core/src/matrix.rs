//! Random symmetric step matrices and boolean-semiring propagation.
//!
//! One [`StepMatrix`] is a realisation of the random matrix `T`: unit
//! diagonal, and each off-diagonal pair `{i, j}` an independent
//! Bernoulli(`p_ij`) written to both `(i, j)` and `(j, i)`. Applying `T` to an
//! active set in the OR-AND semiring performs one cascade step. Rows are
//! packed 64 columns per word.

use rand::Rng;
use thiserror::Error;

use crate::active_set::{words_for, ActiveSet};
use crate::graph::{Graph, NodeId};
use crate::stats::{EstimateCell, StatsError};
use crate::streams::{count_trials, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<(), MatrixError> {
    if expected == found {
        Ok(())
    } else {
        Err(MatrixError::DimensionMismatch { expected, found })
    }
}

/// Symmetric boolean matrix with ones on the diagonal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StepMatrix {
    dim: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl StepMatrix {
    pub fn identity(dim: usize) -> Self {
        let stride = words_for(dim);
        let mut m = StepMatrix {
            dim,
            stride,
            bits: vec![0; stride * dim],
        };
        for i in 0..dim {
            m.set_raw(i, i, true);
        }
        m
    }

    /// Identity plus the given symmetric off-diagonal ones.
    pub fn with_pairs<I: IntoIterator<Item = (usize, usize)>>(dim: usize, pairs: I) -> Self {
        let mut m = Self::identity(dim);
        for (i, j) in pairs {
            m.set_pair(i, j, true);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row < self.dim && col < self.dim);
        self.bits[row * self.stride + col / 64] >> (col % 64) & 1 == 1
    }

    /// Sets entries `(i, j)` and `(j, i)`. Ignored on the diagonal, which
    /// stays at one.
    pub fn set_pair(&mut self, i: usize, j: usize, value: bool) {
        if i != j {
            self.set_raw(i, j, value);
            self.set_raw(j, i, value);
        }
    }

    fn set_raw(&mut self, row: usize, col: usize, value: bool) {
        assert!(row < self.dim && col < self.dim);
        let word = &mut self.bits[row * self.stride + col / 64];
        if value {
            *word |= 1 << (col % 64);
        } else {
            *word &= !(1 << (col % 64));
        }
    }

    #[inline]
    pub(crate) fn row_words(&self, row: usize) -> &[u64] {
        &self.bits[row * self.stride..(row + 1) * self.stride]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn has_unit_diagonal(&self) -> bool {
        (0..self.dim).all(|i| self.get(i, i))
    }

    /// Whether every off-diagonal one sits on an edge of `g`.
    pub fn is_supported_by(&self, g: &Graph) -> bool {
        self.dim == g.node_count()
            && (0..self.dim).all(|i| {
                (0..self.dim).all(|j| i == j || !self.get(i, j) || g.prob(i, j) > 0.0)
            })
    }

    pub fn transpose(&self) -> StepMatrix {
        let mut t = StepMatrix {
            dim: self.dim,
            stride: self.stride,
            bits: vec![0; self.bits.len()],
        };
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.get(i, j) {
                    t.set_raw(j, i, true);
                }
            }
        }
        t
    }
}

impl std::fmt::Debug for StepMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "StepMatrix {}x{}", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: String = (0..self.dim)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

/// Draws one step matrix for `g`.
///
/// Edges are visited in canonical order with one Bernoulli draw each; pairs
/// that are not edges consume no randomness.
pub fn sample_step_matrix<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> StepMatrix {
    let mut m = StepMatrix::identity(g.node_count());
    for e in g.edges() {
        if rng.random_bool(e.p) {
            m.set_pair(e.u, e.v, true);
        }
    }
    m
}

/// Draws `steps` independent matrices `T^(1), ..., T^(steps)`.
pub fn sample_sequence<R: Rng + ?Sized>(g: &Graph, steps: usize, rng: &mut R) -> Vec<StepMatrix> {
    (0..steps).map(|_| sample_step_matrix(g, rng)).collect()
}

/// `T v` in the OR-AND semiring: `{ i : T[i][k] = 1 for some k in s }`.
pub fn apply_matrix(t: &StepMatrix, s: &ActiveSet) -> Result<ActiveSet, MatrixError> {
    check_dim(t.dim, s.universe())?;
    let mut out = ActiveSet::empty(t.dim);
    if s.is_empty() {
        return Ok(out);
    }
    for i in 0..t.dim {
        if s.intersects_words(t.row_words(i)) {
            out.insert(i);
        }
    }
    Ok(out)
}

/// Folds `apply_matrix` over `matrices` (first element applied first)
/// starting from `start`, returning every intermediate set.
pub fn propagate(matrices: &[StepMatrix], start: &ActiveSet) -> Result<Vec<ActiveSet>, MatrixError> {
    let mut states = Vec::with_capacity(matrices.len() + 1);
    states.push(start.clone());
    for t in matrices {
        let next = apply_matrix(t, states.last().unwrap())?;
        states.push(next);
    }
    Ok(states)
}

/// Set of rows `r` with `(T^(n) ... T^(1))[r][source] > 0`, for matrices of
/// dimension `dim`.
pub fn chain_column(dim: usize, matrices: &[StepMatrix], source: usize) -> Result<ActiveSet, MatrixError> {
    let mut state = ActiveSet::singleton(dim, source);
    for t in matrices {
        state = apply_matrix(t, &state)?;
    }
    Ok(state)
}

/// Whether entry `(target, source)` of the product `T^(n) ... T^(1)` is
/// positive, where `matrices[0]` is `T^(1)`. The empty product is the
/// identity.
pub fn chain_entry(matrices: &[StepMatrix], source: NodeId, target: NodeId) -> Result<bool, MatrixError> {
    if matrices.is_empty() {
        return Ok(source == target);
    }
    let (source, target) = (source.index(), target.index());
    let dim = matrices[0].dim;
    if source >= dim || target >= dim {
        return Err(MatrixError::DimensionMismatch {
            expected: dim,
            found: source.max(target) + 1,
        });
    }
    Ok(chain_column(dim, matrices, source)?.contains(target))
}

/// Square boolean matrix without the symmetry or diagonal invariants, used
/// for full matrix-matrix products on the verification path.
#[derive(Clone, PartialEq, Eq)]
pub struct BoolMatrix {
    dim: usize,
    rows: Vec<Vec<bool>>,
}

impl BoolMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut rows = vec![vec![false; dim]; dim];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = true;
        }
        BoolMatrix { dim, rows }
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row][col]
    }

    pub fn transpose(&self) -> BoolMatrix {
        let rows = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.rows[j][i]).collect())
            .collect();
        BoolMatrix { dim: self.dim, rows }
    }

    /// `self · rhs` in the OR-AND semiring.
    pub fn mul_step(&self, rhs: &StepMatrix) -> Result<BoolMatrix, MatrixError> {
        check_dim(self.dim, rhs.dim)?;
        let n = self.dim;
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).any(|k| self.rows[i][k] && rhs.get(k, j)))
                    .collect()
            })
            .collect();
        Ok(BoolMatrix { dim: n, rows })
    }
}

impl From<&StepMatrix> for BoolMatrix {
    fn from(t: &StepMatrix) -> Self {
        let rows = (0..t.dim)
            .map(|i| (0..t.dim).map(|j| t.get(i, j)).collect())
            .collect();
        BoolMatrix { dim: t.dim, rows }
    }
}

/// The full product `matrices[0] · matrices[1] · ... · matrices[n-1]`,
/// computed with `O(n N^3)` matrix-matrix products.
pub fn left_to_right_product(dim: usize, matrices: &[StepMatrix]) -> Result<BoolMatrix, MatrixError> {
    matrices
        .iter()
        .try_fold(BoolMatrix::identity(dim), |acc, t| acc.mul_step(t))
}

/// Multiplication order of the sampled factors `T^(1), ..., T^(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductOrder {
    /// `T^(n) ... T^(1)`: `T^(1)` acts first, as in the cascade.
    Forward,
    /// `T^(1) ... T^(n)`: `T^(n)` acts first.
    Reverse,
}

impl ProductOrder {
    fn domain(self) -> Domain {
        match self {
            ProductOrder::Forward => Domain::MatrixForward,
            ProductOrder::Reverse => Domain::MatrixReverse,
        }
    }
}

/// Estimates `P(product[r][c] > 0)` for every entry of the random product of
/// `n` independent step matrices taken in `order`. Cell `[r][c]` is entry
/// `(r, c)`. Each order draws from its own seed stream.
pub fn estimate_product_positivity(
    g: &Graph,
    n: usize,
    trials: u64,
    master_seed: u64,
    confidence: f64,
    order: ProductOrder,
) -> Result<Vec<Vec<EstimateCell>>, StatsError> {
    if trials == 0 {
        return Err(StatsError::NoTrials);
    }
    let dim = g.node_count();
    let counts = count_trials(dim * dim, trials, master_seed, order.domain(), |rng, counts| {
        let mut seq = sample_sequence(g, n, rng);
        if order == ProductOrder::Reverse {
            seq.reverse();
        }
        for c in 0..dim {
            let column = chain_column(dim, &seq, c).expect("matrices sampled for g");
            for r in column.iter() {
                counts[r * dim + c] += 1;
            }
        }
    });
    counts
        .chunks(dim)
        .map(|row| {
            row.iter()
                .map(|&k| EstimateCell::new(k, trials, confidence))
                .collect()
        })
        .collect()
}

/// Matrix-engine estimate of `P_ij(n)`, read as
/// `P((T^(n) ... T^(1))[j][i] > 0)`. Row `i` is seeded by node `i`.
pub fn matrix_estimate_p(
    g: &Graph,
    n: usize,
    trials: u64,
    master_seed: u64,
    confidence: f64,
) -> Result<Vec<Vec<EstimateCell>>, StatsError> {
    let product = estimate_product_positivity(g, n, trials, master_seed, confidence, ProductOrder::Forward)?;
    let dim = g.node_count();
    Ok((0..dim)
        .map(|i| (0..dim).map(|j| product[j][i]).collect())
        .collect())
}
