//! Entanglement bookkeeping: density matrices, relative entropy against a
//! reference state, bipartite entanglement entropy, and the edge count that
//! serves as the resource tally of a partially measured cluster.
//!
//! All entropies are reported in bits (base-2 logarithms).  Matrix logs go
//! through a Hermitian eigendecomposition with eigenvalues floored at
//! [`EIGENVALUE_FLOOR`]; weight on a reference state's null space makes the
//! relative entropy infinite.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::graphgen::Graph;
use crate::qsim::{QsimError, Statevector};

/// Eigenvalues at or below this are treated as exact zeros in matrix logs.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Probability weight above this on a null eigenvector counts as a support
/// violation (relative entropy diverges).
pub const SUPPORT_TOL: f64 = 1e-12;

/// Validation tolerance for density-matrix inputs (hermiticity, unit trace,
/// eigenvalue positivity).
pub const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntanglementError {
    #[error("density matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("density matrix dimension {dim} is not a power of two of a 1..=26 qubit system")]
    BadDimension { dim: usize },
    #[error("matrix is not Hermitian within 1e-10")]
    NotHermitian,
    #[error("density matrix trace {trace} differs from 1 by more than 1e-10")]
    BadTrace { trace: f64 },
    #[error("density matrix has eigenvalue {value:.3e} below -1e-10")]
    NegativeEigenvalue { value: f64 },
    #[error("operator dimensions differ ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("bipartition must be a proper non-empty subset of the qubits")]
    BadPartition,
    #[error("partition names qubit {qubit}, but the register has {n} qubits")]
    PartitionOutOfRange { qubit: usize, n: usize },
    #[error(transparent)]
    State(#[from] QsimError),
}

/// A validated density operator on a qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Accepts a square, Hermitian, unit-trace, positive-semidefinite matrix
    /// whose dimension is a power of two.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self, EntanglementError> {
        if mat.nrows() != mat.ncols() {
            return Err(EntanglementError::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        let dim = mat.nrows();
        if !dim.is_power_of_two() || dim < 2 || dim.trailing_zeros() > 26 {
            return Err(EntanglementError::BadDimension { dim });
        }
        for r in 0..dim {
            for c in 0..=r {
                if (mat[(r, c)] - mat[(c, r)].conj()).norm() > DENSITY_TOL {
                    return Err(EntanglementError::NotHermitian);
                }
            }
        }
        let trace: Complex64 = mat.diagonal().iter().sum();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(EntanglementError::BadTrace { trace: trace.re });
        }
        for &value in hermitian_eigenvalues(&mat).iter() {
            if value < -DENSITY_TOL {
                return Err(EntanglementError::NegativeEigenvalue { value });
            }
        }
        Ok(Self { mat })
    }

    /// Pure-state projector `|psi><psi|`.
    pub fn from_statevector(state: &Statevector) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let mat = DMatrix::from_fn(dim, dim, |r, c| amps[r] * amps[c].conj());
        Self { mat }
    }

    /// Maximally mixed state `I / dim`.
    pub fn uniform(dim: usize) -> Result<Self, EntanglementError> {
        if !dim.is_power_of_two() || dim < 2 || dim.trailing_zeros() > 26 {
            return Err(EntanglementError::BadDimension { dim });
        }
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        Ok(Self {
            mat: DMatrix::from_diagonal_element(dim, dim, w),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }
}

fn hermitian_eigenvalues(mat: &DMatrix<Complex64>) -> Vec<f64> {
    mat.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

/// `sum_i lambda_i log2(lambda_i)` over eigenvalues above the floor.
fn trace_rho_log_rho(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&v| v > EIGENVALUE_FLOOR)
        .map(|&v| v * v.log2())
        .sum()
}

/// Quantum relative entropy `S(rho || sigma) = tr[rho log2 rho - rho log2 sigma]`
/// in bits.  Infinite when `rho` has weight outside `sigma`'s support; for a
/// pure `rho` the first term vanishes and only `-tr[rho log2 sigma]` remains.
pub fn relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<f64, EntanglementError> {
    if rho.dim() != sigma.dim() {
        return Err(EntanglementError::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let rho_term = trace_rho_log_rho(&hermitian_eigenvalues(rho.matrix()));

    let eigen = sigma.matrix().clone().symmetric_eigen();
    let mut cross_term = 0.0;
    for (j, &s) in eigen.eigenvalues.iter().enumerate() {
        let v = eigen.eigenvectors.column(j);
        // p_j = <v_j| rho |v_j>, the weight rho puts on sigma's j-th mode.
        let mut p = 0.0;
        for r in 0..rho.dim() {
            for c in 0..rho.dim() {
                p += (v[r].conj() * rho.matrix()[(r, c)] * v[c]).re;
            }
        }
        if s <= EIGENVALUE_FLOOR {
            if p > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
        } else {
            cross_term += p * s.log2();
        }
    }
    Ok(rho_term - cross_term)
}

/// Relative entropy of a pure state against a reference density operator:
/// the entanglement functional evaluated at `sigma`.
pub fn er_with_reference(
    state: &Statevector,
    sigma: &DensityMatrix,
) -> Result<f64, EntanglementError> {
    relative_entropy(&DensityMatrix::from_statevector(state), sigma)
}

/// Partial trace of a pure state onto the qubits in `part_a`.
pub fn reduced_density_matrix(
    state: &Statevector,
    part_a: &BTreeSet<usize>,
) -> Result<DensityMatrix, EntanglementError> {
    let n = state.n_qubits();
    if part_a.is_empty() || part_a.len() >= n {
        return Err(EntanglementError::BadPartition);
    }
    for &q in part_a {
        if q >= n {
            return Err(EntanglementError::PartitionOutOfRange { qubit: q, n });
        }
    }
    let a_qubits: Vec<usize> = part_a.iter().copied().collect();
    let b_qubits: Vec<usize> = (0..n).filter(|q| !part_a.contains(q)).collect();
    let dim_a = 1usize << a_qubits.len();
    let dim_b = 1usize << b_qubits.len();
    let amps = state.amplitudes();
    let scatter = |bits: usize, qubits: &[usize]| -> usize {
        qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &q)| acc | (((bits >> k) & 1) << q))
    };
    let mut rho = DMatrix::from_element(dim_a, dim_a, Complex64::new(0.0, 0.0));
    for b in 0..dim_b {
        let base = scatter(b, &b_qubits);
        for row in 0..dim_a {
            let amp_row = amps[base | scatter(row, &a_qubits)];
            if amp_row == Complex64::new(0.0, 0.0) {
                continue;
            }
            for col in 0..dim_a {
                rho[(row, col)] += amp_row * amps[base | scatter(col, &a_qubits)].conj();
            }
        }
    }
    Ok(DensityMatrix { mat: rho })
}

/// Bipartite entanglement entropy of a pure state across the cut
/// `part_a` vs the rest, in bits.
pub fn bipartite_entropy(
    state: &Statevector,
    part_a: &BTreeSet<usize>,
) -> Result<f64, EntanglementError> {
    let rho_a = reduced_density_matrix(state, part_a)?;
    let eigenvalues = hermitian_eigenvalues(rho_a.matrix());
    Ok(-trace_rho_log_rho(&eigenvalues))
}

/// Edges of the graph whose endpoints are both still unmeasured: the
/// entanglement left in a partially consumed cluster.
pub fn remaining_entanglement(graph: &Graph, measured: &BTreeSet<usize>) -> usize {
    graph
        .edges()
        .iter()
        .filter(|(a, b)| !measured.contains(a) && !measured.contains(b))
        .count()
}
