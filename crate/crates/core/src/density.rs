//! Sparse two-mode density operators and their blockwise eigendecomposition.
//!
//! Elements are stored only between occupation-number states that some
//! spectral term actually touches. Basis states not coupled by any nonzero
//! element fall into separate blocks, so noon-like mixtures diagonalize as a
//! sequence of 2x2 problems.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::channels::SpectralState;

pub(crate) type Occ = (usize, usize);

#[derive(Debug, Clone)]
pub(crate) struct SparseDensity {
    pub elems: HashMap<(Occ, Occ), Complex64>,
}

/// One invariant block: its basis and full eigendecomposition.
#[derive(Debug, Clone)]
pub(crate) struct Block {
    pub basis: Vec<Occ>,
    pub values: Vec<f64>,
    /// Eigenvectors as columns, expressed in `basis`.
    pub vectors: DMatrix<Complex64>,
}

impl SparseDensity {
    /// Builds `sum_i w_i |psi_i><psi_i|`, keeping only pairs accepted by `keep`.
    pub fn from_spectral(s: &SpectralState, keep: impl Fn(Occ, Occ) -> bool) -> Self {
        let mut elems: HashMap<(Occ, Occ), Complex64> = HashMap::new();
        for term in s.terms() {
            let nz: Vec<(Occ, Complex64)> = term.vector.iter_nonzero().collect();
            for &(i, ai) in &nz {
                for &(j, aj) in &nz {
                    if keep(i, j) {
                        *elems.entry((i, j)).or_default() += ai * aj.conj() * term.weight;
                    }
                }
            }
        }
        Self { elems }
    }

    pub fn get(&self, i: Occ, j: Occ) -> Complex64 {
        self.elems.get(&(i, j)).copied().unwrap_or_default()
    }

    /// Splits the support into blocks with no coupling between them and
    /// diagonalizes each block densely.
    pub fn blocks(&self) -> Vec<Block> {
        let mut basis: Vec<Occ> = self
            .elems
            .keys()
            .flat_map(|(i, j)| [*i, *j])
            .collect();
        basis.sort_unstable();
        basis.dedup();
        let index: HashMap<Occ, usize> =
            basis.iter().enumerate().map(|(k, o)| (*o, k)).collect();

        let mut parent: Vec<usize> = (0..basis.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for ((i, j), v) in &self.elems {
            if i != j && *v != Complex64::default() {
                let (a, b) = (find(&mut parent, index[i]), find(&mut parent, index[j]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for k in 0..basis.len() {
            let root = find(&mut parent, k);
            groups.entry(root).or_default().push(k);
        }
        let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
        groups.sort_unstable_by_key(|g| g[0]);

        groups
            .into_iter()
            .map(|members| {
                let local: Vec<Occ> = members.iter().map(|&k| basis[k]).collect();
                let d = local.len();
                let m = DMatrix::from_fn(d, d, |r, c| self.get(local[r], local[c]));
                // Enforce exact Hermiticity before the solver sees it.
                let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
                let eig = SymmetricEigen::new(m);
                Block {
                    basis: local,
                    values: eig.eigenvalues.iter().copied().collect(),
                    vectors: eig.eigenvectors,
                }
            })
            .collect()
    }
}
