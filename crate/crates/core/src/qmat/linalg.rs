//! Small dense helpers over nalgebra's complex matrices.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{CMat, CVec, C64, EIGEN_CLIP};
use crate::{Error, Result};

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    a.kronecker(b)
}

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint()
}

pub fn trace(a: &CMat) -> C64 {
    a.trace()
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input is symmetrised first so that a tiny anti-Hermitian part from
/// floating-point noise cannot leak into the spectrum.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let sym = (a + a.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(a.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let sym = (a + a.adjoint()).scale(0.5);
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Clips eigenvalues in `[-EIGEN_CLIP, 0)` to zero and rejects anything more
/// negative.
pub fn clip_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&v| {
            if v < -EIGEN_CLIP {
                Err(Error::InvalidState(format!("eigenvalue {v:e} below -{EIGEN_CLIP:e}")))
            } else {
                Ok(v.max(0.0))
            }
        })
        .collect()
}

/// Square root of a positive semidefinite matrix.
pub fn psd_sqrt(a: &CMat) -> Result<CMat> {
    let (values, vectors) = hermitian_eigen(a);
    let values = clip_spectrum(&values)?;
    let diag = DVector::from_iterator(values.len(), values.iter().map(|v| C64::new(v.sqrt(), 0.0)));
    Ok(&vectors * CMat::from_diagonal(&diag) * vectors.adjoint())
}

/// `[[0, A], [A^dagger, 0]]`, whose eigenvalues are `+-` the singular values
/// of `A` (plus `|rows - cols|` zeros).
fn hermitian_dilation(a: &CMat) -> CMat {
    let (m, n) = a.shape();
    let mut h = CMat::zeros(m + n, m + n);
    h.view_mut((0, m), (m, n)).copy_from(a);
    h.view_mut((m, 0), (n, m)).copy_from(&a.adjoint());
    h
}

/// Singular values in descending order, `min(rows, cols)` of them.
///
/// Computed from the Hermitian dilation rather than nalgebra's complex SVD,
/// which can lose accuracy on rank-deficient inputs.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let k = a.nrows().min(a.ncols());
    let mut values = hermitian_eigenvalues(&hermitian_dilation(a));
    values.reverse();
    values.truncate(k);
    values.iter().map(|v| v.max(0.0)).collect()
}

/// Singular triplets with `sigma > threshold`: returns `(sigma, W, V)` with
/// orthonormal columns and `A V = W diag(sigma)`, sigma descending.
pub fn singular_triplets(a: &CMat, threshold: f64) -> (Vec<f64>, CMat, CMat) {
    let (m, n) = a.shape();
    let (values, vectors) = hermitian_eigen(&hermitian_dilation(a));
    let keep: Vec<usize> = (0..values.len()).rev().filter(|&k| values[k] > threshold).collect();
    let scale = std::f64::consts::SQRT_2;
    let w = CMat::from_fn(m, keep.len(), |r, c| vectors[(r, keep[c])] * scale);
    let v = CMat::from_fn(n, keep.len(), |r, c| vectors[(m + r, keep[c])] * scale);
    (keep.iter().map(|&k| values[k]).collect(), w, v)
}

/// Sum of singular values.
pub fn nuclear_norm(a: &CMat) -> f64 {
    singular_values(a).iter().sum()
}

/// Projector onto the eigenspace of a Hermitian matrix with eigenvalue above
/// `threshold`.
pub fn positive_projector(a: &CMat, threshold: f64) -> CMat {
    let (values, vectors) = hermitian_eigen(a);
    let dim = a.nrows();
    let mut proj = CMat::zeros(dim, dim);
    for (k, &v) in values.iter().enumerate() {
        if v > threshold {
            let col = vectors.column(k);
            proj += &col * col.adjoint();
        }
    }
    proj
}

/// Eigenvector of the largest eigenvalue.
pub fn top_eigenvector(a: &CMat) -> CVec {
    let (_, vectors) = hermitian_eigen(a);
    vectors.column(vectors.ncols() - 1).into_owned()
}

pub fn outer(v: &CVec) -> CMat {
    v * v.adjoint()
}

/// Permutation matrix sending basis state `|i>` to `|perm[i]>`.
pub fn permutation_matrix(perm: &[usize]) -> CMat {
    let dim = perm.len();
    let mut m = CMat::zeros(dim, dim);
    for (i, &j) in perm.iter().enumerate() {
        m[(j, i)] = C64::new(1.0, 0.0);
    }
    m
}

pub fn basis_vector(dim: usize, index: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[index] = C64::new(1.0, 0.0);
    v
}

/// Haar-random pure state from normalised complex Gaussians.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVec {
    let v = CVec::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.norm();
    v.unscale(norm)
}

/// Haar-random unitary via QR of a complex Ginibre matrix with phase fix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMat {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random density matrix of the given rank (Ginibre construction).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> CMat {
    let g = DMatrix::from_fn(dim, rank.max(1), |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho.unscale(tr)
}

/// Orthonormal completion of the columns of `basis` (assumed orthonormal) to
/// a full basis of `C^dim`, by Gram-Schmidt over the standard basis vectors in
/// index order.
pub fn complete_basis(basis: &CMat, dim: usize) -> CMat {
    let mut cols: Vec<CVec> = basis.column_iter().map(|c| c.into_owned()).collect();
    for k in 0..dim {
        if cols.len() == dim {
            break;
        }
        let mut v = basis_vector(dim, k);
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v.unscale(norm));
        }
    }
    CMat::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilation_svd_reconstructs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for (m, n, rank) in [(4, 4, 2), (4, 2, 2), (2, 4, 1), (8, 8, 8), (3, 5, 3)] {
            let a = CMat::from_fn(m, rank, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                * CMat::from_fn(rank, n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            let (s, w, v) = singular_triplets(&a, 1e-12);
            assert_eq!(s.len(), rank.min(m).min(n));
            let sig = CMat::from_diagonal(&DVector::from_iterator(s.len(), s.iter().map(|x| C64::new(*x, 0.0))));
            assert!(max_abs_diff(&(&w * sig * v.adjoint()), &a) < 1e-12);
            assert!(max_abs_diff(&(w.adjoint() * &w), &identity(s.len())) < 1e-12);
            assert!(max_abs_diff(&(v.adjoint() * &v), &identity(s.len())) < 1e-12);
            let sv = singular_values(&a);
            assert_eq!(sv.len(), m.min(n));
            let gram = hermitian_eigenvalues(&(a.adjoint() * &a));
            let top = gram.last().unwrap().sqrt();
            assert!((sv[0] - top).abs() < 1e-10);
        }
    }
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(&mut rng, 4);
        assert!(max_abs_diff(&(u.adjoint() * &u), &identity(4)) < 1e-12);
    }

    #[test]
    fn eigen_sorted_ascending() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![
            C64::new(0.7, 0.0),
            C64::new(0.1, 0.0),
            C64::new(0.2, 0.0),
        ]));
        let (vals, vecs) = hermitian_eigen(&m);
        assert_eq!(vals.len(), 3);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        assert!((vecs.column(2)[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clip_rejects_large_negative() {
        assert_eq!(clip_spectrum(&[-1e-11, 0.5]).unwrap(), vec![0.0, 0.5]);
        assert!(clip_spectrum(&[-1e-6]).is_err());
    }

    #[test]
    fn completion_is_unitary() {
        let v = CVec::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0)]);
        let full = complete_basis(&CMat::from_columns(&[v]), 3);
        assert!(max_abs_diff(&(full.adjoint() * &full), &identity(3)) < 1e-12);
    }
}
