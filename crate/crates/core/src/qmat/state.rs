use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::linalg::{self, clip_spectrum, hermitian_eigen, hermitian_eigenvalues};
use super::{check_dims, subsystem_offsets, CMat, CVec, C64, TOL};
use crate::repr::MatrixRepr;
use crate::{Error, Result};

/// Kronecker product with concatenated subsystem labels.
///
/// Implemented per kind, so a state can only be tensored with a state of the
/// same kind and an operator with an operator.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
}

/// Positive semidefinite unit-trace matrix on a labelled tensor factorisation.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (each within
    /// [`TOL`](super::TOL)).
    pub fn new(dims: Vec<usize>, mat: CMat) -> Result<Self> {
        let dim = check_dims(&dims)?;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, dims {:?} need {dim}x{dim}",
                mat.nrows(),
                mat.ncols(),
                dims
            )));
        }
        let defect = linalg::hermiticity_defect(&mat);
        if defect > TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = hermitian_eigenvalues(&mat)[0];
        if min < -TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { dims, mat })
    }

    /// Wraps a matrix already known to be a valid state.
    pub(crate) fn from_parts(dims: Vec<usize>, mat: CMat) -> Self {
        debug_assert_eq!(mat.nrows(), dims.iter().product::<usize>());
        DensityMatrix { dims, mat }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let dim = check_dims(&dims)?;
        Ok(DensityMatrix { dims, mat: linalg::identity(dim).unscale(dim as f64) })
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        PureState::basis(dims, index).map(|p| p.to_density())
    }

    /// Diagonal state with the given probabilities on one subsystem of that
    /// dimension.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let mat = CMat::from_diagonal(&CVec::from_iterator(
            probs.len(),
            probs.iter().map(|&p| C64::new(p, 0.0)),
        ));
        DensityMatrix::new(vec![probs.len()], mat)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Eigenvalues ascending, with float noise clipped to zero.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        clip_spectrum(&hermitian_eigenvalues(&self.mat))
    }

    /// `Tr(A rho)`, real part.
    pub fn expectation(&self, a: &CMat) -> f64 {
        // Tr(A rho) = sum_ij A_ij rho_ji
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                acc += a[(i, j)] * self.mat[(j, i)];
            }
        }
        acc.re
    }

    /// Reduced state on the subsystems listed in `keep`, in ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (keep, traced) = split_subsystems(&self.dims, keep)?;
        let ko = subsystem_offsets(&self.dims, &keep);
        let to = subsystem_offsets(&self.dims, &traced);
        let out = CMat::from_fn(ko.len(), ko.len(), |a, b| {
            to.iter().map(|&t| self.mat[(ko[a] + t, ko[b] + t)]).sum()
        });
        Ok(DensityMatrix {
            dims: keep.iter().map(|&k| self.dims[k]).collect(),
            mat: out,
        })
    }

    /// `U rho U^dagger` for a unitary on the full space.
    pub fn conjugate(&self, u: &CMat) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch("unitary does not match state".into()));
        }
        Ok(DensityMatrix { dims: self.dims.clone(), mat: u * &self.mat * u.adjoint() })
    }

    pub fn mix(states: &[&DensityMatrix], weights: &[f64]) -> Result<DensityMatrix> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        if states.len() != weights.len() {
            return Err(Error::InvalidArgument("weights and states differ in length".into()));
        }
        let mut mat = CMat::zeros(first.dim(), first.dim());
        for (s, &w) in states.iter().zip(weights) {
            if s.dims != first.dims {
                return Err(Error::DimensionMismatch("mixture members differ in dims".into()));
            }
            mat += s.mat.scale(w);
        }
        Ok(DensityMatrix { dims: first.dims.clone(), mat })
    }

    /// Standard purification `sum_i sqrt(l_i) |e_i> (x) |i>` with the ancilla
    /// carrying a copy of the state's dims. Eigenvalues are taken in
    /// descending order so a pure input lands on ancilla `|0>`.
    pub fn purify(&self) -> Result<PureState> {
        let (values, vectors) = hermitian_eigen(&self.mat);
        let values = clip_spectrum(&values)?;
        let dim = self.dim();
        let mut amps = CVec::zeros(dim * dim);
        for (anc, k) in (0..dim).rev().enumerate() {
            let w = values[k].sqrt();
            if w == 0.0 {
                continue;
            }
            for i in 0..dim {
                amps[i * dim + anc] += vectors[(i, k)] * w;
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&self.dims);
        check_dims(&dims)?;
        Ok(PureState { dims, amps })
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let dims = concat_dims(&self.dims, &other.dims)?;
        Ok(DensityMatrix { dims, mat: linalg::kron(&self.mat, &other.mat) })
    }
}

/// Unit vector on a labelled tensor factorisation.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: CVec,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amps: CVec) -> Result<Self> {
        let dim = check_dims(&dims)?;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {dims:?}",
                amps.len()
            )));
        }
        let norm2 = amps.norm_squared();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("squared norm {norm2} != 1")));
        }
        Ok(PureState { dims, amps })
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let dim = check_dims(&dims)?;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} >= {dim}")));
        }
        Ok(PureState { dims, amps: linalg::basis_vector(dim, index) })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { dims: self.dims.clone(), mat: linalg::outer(&self.amps) }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// Applies a matrix acting on the full space; the result is renormalised
    /// only implicitly (callers pass unitaries or isometries).
    pub fn apply(&self, u: &CMat, dims: Vec<usize>) -> Result<PureState> {
        if u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch("operator does not match state".into()));
        }
        let amps = u * &self.amps;
        if amps.len() != dims.iter().product::<usize>() {
            return Err(Error::DimensionMismatch("output dims do not match operator".into()));
        }
        Ok(PureState { dims, amps })
    }

    /// Reduced state on `keep`, computed from the amplitudes without forming
    /// the full projector.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (keep, traced) = split_subsystems(&self.dims, keep)?;
        let ko = subsystem_offsets(&self.dims, &keep);
        let to = subsystem_offsets(&self.dims, &traced);
        let mat = CMat::from_fn(ko.len(), ko.len(), |a, b| {
            to.iter()
                .map(|&t| self.amps[ko[a] + t] * self.amps[ko[b] + t].conj())
                .sum()
        });
        Ok(DensityMatrix { dims: keep.iter().map(|&k| self.dims[k]).collect(), mat })
    }

    /// Reshapes the amplitudes into a `d_left x d_right` matrix across the cut
    /// after the first `left_factors` subsystems.
    pub fn bipartite_matrix(&self, left_factors: usize) -> Result<CMat> {
        if left_factors > self.dims.len() {
            return Err(Error::InvalidArgument("cut beyond last subsystem".into()));
        }
        let dl: usize = self.dims[..left_factors].iter().product();
        let dr: usize = self.dims[left_factors..].iter().product();
        Ok(CMat::from_fn(dl, dr, |k, i| self.amps[k * dr + i]))
    }
}

impl Tensor for PureState {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let dims = concat_dims(&self.dims, &other.dims)?;
        Ok(PureState { dims, amps: linalg::kron_vec(&self.amps, &other.amps) })
    }
}

/// Square operator on a labelled space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    mat: CMat,
}

impl Operator {
    pub fn new(dims: Vec<usize>, mat: CMat) -> Result<Self> {
        let dim = check_dims(&dims)?;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::DimensionMismatch("operator shape does not match dims".into()));
        }
        Ok(Operator { dims, mat })
    }

    pub fn identity(dims: Vec<usize>) -> Result<Self> {
        let dim = check_dims(&dims)?;
        Ok(Operator { dims, mat: linalg::identity(dim) })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn dagger(&self) -> Operator {
        Operator { dims: self.dims.clone(), mat: self.mat.adjoint() }
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::max_abs_diff(&(self.mat.adjoint() * &self.mat), &linalg::identity(self.mat.nrows()))
    }
}

impl Tensor for Operator {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let dims = concat_dims(&self.dims, &other.dims)?;
        Ok(Operator { dims, mat: linalg::kron(&self.mat, &other.mat) })
    }
}

fn concat_dims(a: &[usize], b: &[usize]) -> Result<Vec<usize>> {
    let dims: Vec<usize> = a.iter().chain(b).copied().collect();
    check_dims(&dims)?;
    Ok(dims)
}

fn split_subsystems(dims: &[usize], keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument("empty keep set".into()));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidArgument(format!(
            "subsystem {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let traced = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    Ok((keep, traced))
}

/// `1/2 ||rho - sigma||_1`, in `[0, 1]`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims != sigma.dims {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between dims {:?} and {:?}",
            rho.dims, sigma.dims
        )));
    }
    let diff = &rho.mat - &sigma.mat;
    let half: f64 = 0.5 * hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>();
    Ok(half.clamp(0.0, 1.0))
}

/// Root fidelity `|| sqrt(rho) sqrt(sigma) ||_1`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims != sigma.dims {
        return Err(Error::DimensionMismatch("fidelity between mismatched dims".into()));
    }
    let a = linalg::psd_sqrt(&rho.mat)?;
    let b = linalg::psd_sqrt(&sigma.mat)?;
    Ok(linalg::nuclear_norm(&(a * b)).min(1.0))
}

/// Key-side unitary aligning one purification with another.
#[derive(Debug, Clone)]
pub struct Alignment {
    pub unitary: Operator,
    /// `|<phi| (U (x) I) |psi>|`.
    pub overlap: f64,
}

/// Finds `U` on the first `key_factors` subsystems maximising
/// `|<phi| (U (x) I) |psi>|`.
///
/// With `A`, `B` the amplitude matrices of `psi`, `phi` across the key cut,
/// the overlap is `Tr(U A B^dagger)`; the polar part of `A B^dagger` from its
/// SVD attains the nuclear norm, which equals the fidelity of the reduced
/// states on the remaining factors. Directions with vanishing singular value
/// are completed deterministically.
pub fn uhlmann_align(psi: &PureState, phi: &PureState, key_factors: usize) -> Result<Alignment> {
    if psi.dims != phi.dims {
        return Err(Error::DimensionMismatch(format!(
            "alignment between dims {:?} and {:?}",
            psi.dims, phi.dims
        )));
    }
    let a = psi.bipartite_matrix(key_factors)?;
    let b = phi.bipartite_matrix(key_factors)?;
    let dk = a.nrows();
    let x = &a * b.adjoint();
    let (_, w_r, v_r) = linalg::singular_triplets(&x, 1e-12);
    let w_full = linalg::complete_basis(&w_r, dk);
    let v_full = linalg::complete_basis(&v_r, dk);
    let u = &v_full * w_full.adjoint();
    let overlap = (&u * &x).trace().norm();
    Ok(Alignment {
        unitary: Operator { dims: psi.dims[..key_factors].to_vec(), mat: u },
        overlap,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityRepr {
    dims: Vec<usize>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = MatrixRepr::from(&self.mat);
        DensityRepr { dims: self.dims.clone(), re: m.re, im: m.im }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DensityRepr::deserialize(d)?;
        let mat = CMat::try_from(&MatrixRepr { re: r.re, im: r.im }).map_err(serde::de::Error::custom)?;
        DensityMatrix::new(r.dims, mat).map_err(serde::de::Error::custom)
    }
}
