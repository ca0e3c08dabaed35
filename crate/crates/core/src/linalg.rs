//! Dense complex linear-algebra helpers shared by the Floquet pipeline.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Eigenphase gap below which eigenvectors are re-orthonormalized together.
pub const CLUSTER_TOLERANCE: f64 = 1e-10;

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `‖A − A†‖_max`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let prod = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for ((i, j), z) in prod.iter().enumerate().map(|(k, z)| ((k % prod.nrows(), k / prod.nrows()), z)) {
        let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        worst = worst.max((z - target).norm());
    }
    worst
}

/// `‖[A, B]‖_max`.
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a * b - b * a))
}

/// Makes `m` exactly Hermitian by averaging with its adjoint.
pub fn symmetrize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// `V · diag(d) · V†`.
pub fn spectral_sum(vectors: &CMatrix, diag: &[C64]) -> CMatrix {
    let mut scaled = vectors.clone();
    for (mut col, &d) in scaled.column_iter_mut().zip(diag) {
        col *= d;
    }
    scaled * vectors.adjoint()
}

/// `exp(−i·H·t)` for Hermitian `H`, through its Hermitian eigendecomposition.
pub fn hermitian_propagator(h: &CMatrix, t: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let phases: Vec<C64> = eig
        .eigenvalues
        .iter()
        .map(|&lam| C64::from_polar(1.0, -lam * t))
        .collect();
    spectral_sum(&eig.eigenvectors, &phases)
}

/// Eigendecomposition of a unitary matrix.
///
/// Returns unit-modulus eigenvalues and an orthonormal eigenvector matrix.
/// The complex Schur form of a normal matrix is diagonal, so the Schur
/// vectors are the eigenvectors. Eigenvectors whose eigenphases lie within
/// [`CLUSTER_TOLERANCE`] of each other are re-orthonormalized together.
pub fn unitary_eigen(u: &CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    let dim = u.nrows();
    if dim != u.ncols() {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: u.ncols(),
        });
    }

    // Exactly decoupled blocks are diagonalized separately so that
    // eigenvectors never mix across them.
    let blocks = sparsity_blocks(u);
    let mut values = vec![C64::new(0.0, 0.0); dim];
    let mut q = CMatrix::zeros(dim, dim);
    for block in &blocks {
        let sub = CMatrix::from_fn(block.len(), block.len(), |a, b| u[(block[a], block[b])]);
        let (sub_values, sub_vectors) = schur_eigen(sub)?;
        for (a, &col) in block.iter().enumerate() {
            values[col] = sub_values[a];
            for (b, &row) in block.iter().enumerate() {
                q[(row, col)] = sub_vectors[(b, a)];
            }
        }
    }

    let phase = |z: &C64| z.im.atan2(z.re);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| phase(&values[a]).total_cmp(&phase(&values[b])));
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && phase(&values[order[end]]) - phase(&values[order[end - 1]]) < CLUSTER_TOLERANCE {
            end += 1;
        }
        if end - start > 1 {
            orthonormalize_columns(&mut q, &order[start..end]);
        }
        start = end;
    }

    // Rayleigh quotients keep eigenvalues consistent with the final vectors.
    let uq = u * &q;
    for (k, value) in values.iter_mut().enumerate() {
        let rq = q.column(k).dotc(&uq.column(k));
        *value = rq / rq.norm();
    }
    Ok((values, q))
}

fn schur_eigen(m: CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    let dim = m.nrows();
    if dim == 1 {
        return Ok((vec![m[(0, 0)]], CMatrix::identity(1, 1)));
    }
    let schur = m
        .try_schur(f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    Ok(((0..dim).map(|k| t[(k, k)]).collect(), q))
}

/// Index sets of the connected components of the nonzero pattern of `m`,
/// each sorted ascending.
pub fn sparsity_blocks(m: &CMatrix) -> Vec<Vec<usize>> {
    let dim = m.nrows();
    let zero = C64::new(0.0, 0.0);
    let mut label = vec![usize::MAX; dim];
    let mut blocks = Vec::new();
    for start in 0..dim {
        if label[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        label[start] = id;
        let mut stack = vec![start];
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            for w in 0..dim {
                if label[w] == usize::MAX && (m[(v, w)] != zero || m[(w, v)] != zero) {
                    label[w] = id;
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    blocks
}

/// Modified Gram–Schmidt on the listed columns.
pub fn orthonormalize_columns(m: &mut CMatrix, cols: &[usize]) {
    for (k, &c) in cols.iter().enumerate() {
        for &prev in &cols[..k] {
            let p: DVector<C64> = m.column(prev).into_owned();
            let proj = p.dotc(&m.column(c));
            let mut col = m.column_mut(c);
            col -= &p * proj;
        }
        let norm = m.column(c).norm();
        if norm > 0.0 {
            let mut col = m.column_mut(c);
            col /= C64::new(norm, 0.0);
        }
    }
}

/// Largest `‖U·v_s − μ_s·v_s‖_2` over the eigenpairs.
pub fn eigen_residual(u: &CMatrix, values: &[C64], vectors: &CMatrix) -> f64 {
    let uv = u * vectors;
    values
        .iter()
        .enumerate()
        .map(|(k, &mu)| (uv.column(k) - vectors.column(k) * mu).norm())
        .fold(0.0, f64::max)
}

/// Real symmetric eigenvalues sorted ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut values: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}
