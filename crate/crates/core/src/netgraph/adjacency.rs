use std::collections::BTreeMap;

use ndarray::Array2;

use super::GraphError;

/// Symmetric, non-negative, weighted adjacency with an empty diagonal,
/// stored as sorted per-row neighbor lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjacency {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        Adjacency {
            rows: vec![Vec::new(); n],
        }
    }

    /// Builds from undirected weighted edges; weights of repeated pairs are
    /// summed. Self-loops and non-positive weights are rejected.
    pub fn from_weighted_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(GraphError::Invalid(format!(
                    "edge ({i},{j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                return Err(GraphError::Invalid(format!("self-loop at node {i}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(GraphError::Invalid(format!(
                    "edge ({i},{j}) has weight {w}"
                )));
            }
            *acc.entry((i.min(j), i.max(j))).or_insert(0.0) += w;
        }
        let mut rows = vec![Vec::new(); n];
        for ((i, j), w) in acc {
            rows[i].push((j, w));
            rows[j].push((i, w));
        }
        for r in &mut rows {
            r.sort_by_key(|e| e.0);
        }
        Ok(Adjacency { rows })
    }

    /// Unweighted edges; duplicates collapse to weight 1.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(i, j)| (i.min(j), i.max(j)))
            .collect();
        set.sort_unstable();
        set.dedup();
        Self::from_weighted_edges(n, set.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    /// Validates and converts a dense matrix.
    pub fn from_dense(a: &Array2<f64>) -> Result<Self, GraphError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(GraphError::Invalid(format!(
                "adjacency is {}x{}, not square",
                n,
                a.ncols()
            )));
        }
        let mut rows = vec![Vec::new(); n];
        for i in 0..n {
            if a[[i, i]] != 0.0 {
                return Err(GraphError::Invalid(format!("non-zero diagonal at {i}")));
            }
            for j in 0..n {
                let w = a[[i, j]];
                if !w.is_finite() || w < 0.0 {
                    return Err(GraphError::Invalid(format!(
                        "entry ({i},{j}) = {w} is negative or non-finite"
                    )));
                }
                if w != a[[j, i]] {
                    return Err(GraphError::Invalid(format!("asymmetric at ({i},{j})")));
                }
                if w > 0.0 {
                    rows[i].push((j, w));
                }
            }
        }
        Ok(Adjacency { rows })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .binary_search_by_key(&j, |e| e.0)
            .map(|k| self.rows[i][k].1)
            .unwrap_or(0.0)
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|e| e.1).sum()
    }

    /// Undirected edges `(i, j, w)` with `i < j`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter()
                .filter(move |e| e.0 > i)
                .map(move |&(j, w)| (i, j, w))
        })
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.n();
        let mut a = Array2::zeros((n, n));
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, w) in r {
                a[[i, j]] = w;
            }
        }
        a
    }

    /// Adjacency restricted to `keep` (in the given order).
    pub fn induced(&self, keep: &[usize]) -> Adjacency {
        let mut pos = vec![usize::MAX; self.n()];
        for (new, &old) in keep.iter().enumerate() {
            pos[old] = new;
        }
        let rows = keep
            .iter()
            .map(|&old| {
                let mut r: Vec<(usize, f64)> = self.rows[old]
                    .iter()
                    .filter(|e| pos[e.0] != usize::MAX)
                    .map(|&(j, w)| (pos[j], w))
                    .collect();
                r.sort_by_key(|e| e.0);
                r
            })
            .collect();
        Adjacency { rows }
    }
}

/// Renormalized propagation operator `D̃^{-1/2} (A + I) D̃^{-1/2}` in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency {
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

/// Adds unit self-loops and applies symmetric degree normalization, where
/// `D̃` is the degree matrix of `A + I`. An isolated node keeps a single
/// entry of 1 on the diagonal.
pub fn normalized_adjacency(a: &Adjacency) -> NormalizedAdjacency {
    let n = a.n();
    let deg: Vec<f64> = (0..n).map(|i| 1.0 + a.degree(i)).collect();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::new();
    let mut values = Vec::new();
    indptr.push(0);
    for i in 0..n {
        let mut self_done = false;
        for &(j, w) in a.neighbors(i) {
            if !self_done && j > i {
                indices.push(i);
                values.push(1.0 / deg[i]);
                self_done = true;
            }
            indices.push(j);
            values.push(w / (deg[i] * deg[j]).sqrt());
        }
        if !self_done {
            indices.push(i);
            values.push(1.0 / deg[i]);
        }
        indptr.push(indices.len());
    }
    NormalizedAdjacency {
        indptr,
        indices,
        values,
    }
}

impl NormalizedAdjacency {
    /// Validates a dense adjacency, then normalizes it.
    pub fn from_dense(a: &Array2<f64>) -> Result<Self, GraphError> {
        Ok(normalized_adjacency(&Adjacency::from_dense(a)?))
    }

    /// The identity operator (edgeless graph).
    pub fn identity(n: usize) -> Self {
        normalized_adjacency(&Adjacency::empty(n))
    }

    pub fn n(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b]
            .iter()
            .copied()
            .zip(self.values[a..b].iter().copied())
    }

    /// `Â · M`. Summation order per output row is fixed, so results are
    /// bit-stable.
    pub fn matmul(&self, m: &Array2<f64>) -> Array2<f64> {
        assert_eq!(m.nrows(), self.n(), "operator/matrix row mismatch");
        let mut out = Array2::zeros((self.n(), m.ncols()));
        for i in 0..self.n() {
            let mut dst = out.row_mut(i);
            for (j, v) in self.row(i) {
                dst.scaled_add(v, &m.row(j));
            }
        }
        out
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.n();
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            for (j, v) in self.row(i) {
                a[[i, j]] = v;
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn empty_graph_gives_identity() {
        let a = Adjacency::from_dense(&Array2::zeros((2, 2))).unwrap();
        assert_eq!(normalized_adjacency(&a).to_dense(), Array2::<f64>::eye(2));
    }

    #[test]
    fn single_edge_is_half() {
        let a = NormalizedAdjacency::from_dense(&array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(a.to_dense(), array![[0.5, 0.5], [0.5, 0.5]]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(NormalizedAdjacency::from_dense(&array![[0.0, 1.0], [0.0, 0.0]]).is_err());
        assert!(NormalizedAdjacency::from_dense(&array![[0.0, -1.0], [-1.0, 0.0]]).is_err());
        assert!(NormalizedAdjacency::from_dense(&array![[1.0, 0.0], [0.0, 0.0]]).is_err());
        assert!(Adjacency::from_edges(2, [(0, 0)]).is_err());
    }

    #[test]
    fn duplicate_edges_collapse() {
        let a = Adjacency::from_edges(3, [(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(a.weight(0, 1), 1.0);
        assert_eq!(a.edge_count(), 2);
        let w = Adjacency::from_weighted_edges(2, [(0, 1, 0.25), (1, 0, 0.5)]).unwrap();
        assert_eq!(w.weight(1, 0), 0.75);
    }

    #[test]
    fn induced_subgraph_reindexes() {
        let a = Adjacency::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let s = a.induced(&[3, 0, 2]);
        assert_eq!(s.n(), 3);
        assert_eq!(s.weight(0, 1), 1.0); // 3-0
        assert_eq!(s.weight(0, 2), 1.0); // 3-2
        assert_eq!(s.weight(1, 2), 0.0); // 0-2
    }

    #[test]
    fn matmul_matches_dense() {
        let a = Adjacency::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let op = normalized_adjacency(&a);
        let m = array![[1.0, 2.0], [3.0, -1.0], [0.5, 0.0]];
        let diff = &op.matmul(&m) - &op.to_dense().dot(&m);
        assert!(diff.iter().all(|d| d.abs() < 1e-15));
    }
}
