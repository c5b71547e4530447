//! Dense complex linear algebra for small multi-qubit systems.
//!
//! Every composite space carries an ordered list of subsystem dimensions;
//! index 0 is the leftmost tensor factor. Throughout the crate the key
//! register always comes first, i.e. `(key, message)` or `(key, ciphertext)`.

mod channel;
pub mod linalg;
mod state;

use nalgebra::{Complex, DMatrix, DVector};

pub use channel::{apply_channel, Povm, QuantumChannel};
pub use state::{fidelity, trace_distance, uhlmann_align, Alignment, DensityMatrix, Operator, PureState, Tensor};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Tolerance for Hermiticity, trace and completeness checks.
pub const TOL: f64 = 1e-10;

/// Eigenvalues in `[-EIGEN_CLIP, 0)` are float noise and clipped to zero.
pub const EIGEN_CLIP: f64 = 1e-10;

/// Largest total Hilbert-space dimension handled densely.
pub const DIM_CAP: usize = 1 << 10;

/// Checks that every factor is a power of two and the product respects
/// [`DIM_CAP`]. Returns the total dimension.
pub(crate) fn check_dims(dims: &[usize]) -> crate::Result<usize> {
    if dims.is_empty() {
        return Err(crate::Error::DimensionMismatch("empty dims list".into()));
    }
    if let Some(bad) = dims.iter().find(|d| !d.is_power_of_two()) {
        return Err(crate::Error::DimensionMismatch(format!(
            "subsystem dimension {bad} is not a power of two"
        )));
    }
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .unwrap_or(usize::MAX);
    if total > DIM_CAP {
        return Err(crate::Error::DimensionCap { dim: total, cap: DIM_CAP });
    }
    Ok(total)
}

/// For each joint value of the subsystems in `subset` (enumerated in
/// row-major order over `subset`), the contribution to the full flat index.
pub(crate) fn subsystem_offsets(dims: &[usize], subset: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let mut offsets = vec![0usize];
    for &s in subset {
        offsets = offsets
            .iter()
            .flat_map(|&o| {
                let stride = strides[s];
                (0..dims[s]).map(move |d| o + d * stride)
            })
            .collect();
    }
    offsets
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_enumerate_row_major() {
        assert_eq!(subsystem_offsets(&[2, 2], &[0]), vec![0, 2]);
        assert_eq!(subsystem_offsets(&[2, 2], &[1]), vec![0, 1]);
        assert_eq!(subsystem_offsets(&[2, 4], &[0, 1]), (0..8).collect::<Vec<_>>());
        assert_eq!(subsystem_offsets(&[2, 4], &[]), vec![0]);
    }

    #[test]
    fn dims_validation() {
        assert_eq!(check_dims(&[1, 2, 4]).unwrap(), 8);
        assert!(check_dims(&[3]).is_err());
        assert!(check_dims(&[]).is_err());
        assert!(matches!(check_dims(&[64, 32]), Err(crate::Error::DimensionCap { .. })));
    }
}
