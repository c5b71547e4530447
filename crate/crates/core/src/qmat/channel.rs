use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::linalg;
use super::state::{DensityMatrix, PureState};
use super::{check_dims, CMat, C64, TOL};
use crate::repr::MatrixRepr;
use crate::{Error, Result};

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<CMat>,
    in_dims: Vec<usize>,
    out_dims: Vec<usize>,
}

impl QuantumChannel {
    /// Checks shapes and `sum_j K_j^dagger K_j = I` within [`TOL`].
    pub fn new(kraus: Vec<CMat>, in_dims: Vec<usize>, out_dims: Vec<usize>) -> Result<Self> {
        let din = check_dims(&in_dims)?;
        let dout = check_dims(&out_dims)?;
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        if let Some(k) = kraus.iter().find(|k| k.nrows() != dout || k.ncols() != din) {
            return Err(Error::InvalidChannel(format!(
                "Kraus operator is {}x{}, expected {dout}x{din}",
                k.nrows(),
                k.ncols()
            )));
        }
        let ch = QuantumChannel { kraus, in_dims, out_dims };
        let defect = ch.trace_preservation_defect();
        if defect > TOL {
            return Err(Error::InvalidChannel(format!("not trace preserving (defect {defect:e})")));
        }
        Ok(ch)
    }

    pub fn identity(dims: Vec<usize>) -> Result<Self> {
        let d = check_dims(&dims)?;
        QuantumChannel::new(vec![linalg::identity(d)], dims.clone(), dims)
    }

    pub fn unitary(u: CMat, dims: Vec<usize>) -> Result<Self> {
        QuantumChannel::new(vec![u], dims.clone(), dims)
    }

    /// `rho -> Tr(rho) I/d`, with Kraus operators `|i><j| / sqrt(d)`.
    pub fn completely_depolarizing(dims: Vec<usize>) -> Result<Self> {
        let d = check_dims(&dims)?;
        let s = 1.0 / (d as f64).sqrt();
        let kraus = (0..d * d)
            .map(|ij| {
                let mut k = CMat::zeros(d, d);
                k[(ij / d, ij % d)] = C64::new(s, 0.0);
                k
            })
            .collect();
        QuantumChannel::new(kraus, dims.clone(), dims)
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn in_dims(&self) -> &[usize] {
        &self.in_dims
    }

    pub fn out_dims(&self) -> &[usize] {
        &self.out_dims
    }

    pub fn trace_preservation_defect(&self) -> f64 {
        let din = self.kraus[0].ncols();
        let sum = self
            .kraus
            .iter()
            .fold(CMat::zeros(din, din), |acc, k| acc + k.adjoint() * k);
        linalg::max_abs_diff(&sum, &linalg::identity(din))
    }

    /// Same channel acting on the last factors of `left (x) in`, identity on
    /// `left`.
    pub fn extend_left(&self, left_dims: &[usize]) -> Result<QuantumChannel> {
        let dl = check_dims(left_dims)?;
        let id = linalg::identity(dl);
        let kraus = self.kraus.iter().map(|k| linalg::kron(&id, k)).collect();
        let cat = |d: &[usize]| left_dims.iter().chain(d).copied().collect::<Vec<_>>();
        let in_dims = cat(&self.in_dims);
        let out_dims = cat(&self.out_dims);
        check_dims(&in_dims)?;
        check_dims(&out_dims)?;
        Ok(QuantumChannel { kraus, in_dims, out_dims })
    }

    /// Sequential composition: `self` first, then `next`.
    pub fn then(&self, next: &QuantumChannel) -> Result<QuantumChannel> {
        if self.out_dims != next.in_dims {
            return Err(Error::DimensionMismatch("composed channels do not chain".into()));
        }
        let kraus = next
            .kraus
            .iter()
            .flat_map(|b| self.kraus.iter().map(move |a| b * a))
            .collect();
        Ok(QuantumChannel { kraus, in_dims: self.in_dims.clone(), out_dims: next.out_dims.clone() })
    }

    /// Heisenberg-picture action `sum_j K_j^dagger A K_j`.
    pub fn adjoint_apply(&self, a: &CMat) -> Result<CMat> {
        let dout = self.kraus[0].nrows();
        if a.nrows() != dout || a.ncols() != dout {
            return Err(Error::DimensionMismatch("observable does not match channel output".into()));
        }
        let din = self.kraus[0].ncols();
        Ok(self
            .kraus
            .iter()
            .fold(CMat::zeros(din, din), |acc, k| acc + k.adjoint() * a * k))
    }

    pub(crate) fn apply_matrix(&self, rho: &CMat) -> CMat {
        let dout = self.kraus[0].nrows();
        self.kraus
            .iter()
            .fold(CMat::zeros(dout, dout), |acc, k| acc + k * rho * k.adjoint())
    }

    /// Output of the channel on a pure input, without forming `|psi><psi|`.
    pub fn apply_pure(&self, psi: &PureState) -> Result<DensityMatrix> {
        if psi.dims() != self.in_dims.as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "channel expects {:?}, state has {:?}",
                self.in_dims,
                psi.dims()
            )));
        }
        let dout = self.kraus[0].nrows();
        let mat = self.kraus.iter().fold(CMat::zeros(dout, dout), |acc, k| {
            let v = k * psi.amplitudes();
            acc + &v * v.adjoint()
        });
        Ok(DensityMatrix::from_parts(self.out_dims.clone(), mat))
    }
}

/// `sum_j K_j rho K_j^dagger`.
pub fn apply_channel(ch: &QuantumChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dims() != ch.in_dims.as_slice() {
        return Err(Error::DimensionMismatch(format!(
            "channel expects {:?}, state has {:?}",
            ch.in_dims,
            rho.dims()
        )));
    }
    Ok(DensityMatrix::from_parts(ch.out_dims.clone(), ch.apply_matrix(rho.matrix())))
}

impl QuantumChannel {
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        apply_channel(self, rho)
    }
}

/// Finite POVM; the outcome label is the effect's index.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dims: Vec<usize>,
    effects: Vec<CMat>,
}

impl Povm {
    /// Checks positivity of every effect and completeness, each within
    /// [`TOL`].
    pub fn new(dims: Vec<usize>, effects: Vec<CMat>) -> Result<Self> {
        let d = check_dims(&dims)?;
        if effects.is_empty() {
            return Err(Error::InvalidPovm("no effects".into()));
        }
        let mut sum = CMat::zeros(d, d);
        for (k, e) in effects.iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::InvalidPovm(format!("effect {k} has wrong shape")));
            }
            let defect = linalg::hermiticity_defect(e);
            if defect > TOL {
                return Err(Error::InvalidPovm(format!("effect {k} not Hermitian ({defect:e})")));
            }
            let min = linalg::hermitian_eigenvalues(e)[0];
            if min < -TOL {
                return Err(Error::InvalidPovm(format!("effect {k} has eigenvalue {min:e}")));
            }
            sum += e;
        }
        let defect = linalg::max_abs_diff(&sum, &linalg::identity(d));
        if defect > TOL {
            return Err(Error::InvalidPovm(format!("effects do not sum to identity ({defect:e})")));
        }
        Ok(Povm { dims, effects })
    }

    pub(crate) fn from_parts(dims: Vec<usize>, effects: Vec<CMat>) -> Self {
        Povm { dims, effects }
    }

    /// Two-outcome POVM `{P, I - P}`.
    pub fn binary(dims: Vec<usize>, first: CMat) -> Result<Self> {
        let d = check_dims(&dims)?;
        let second = linalg::identity(d) - &first;
        Povm::new(dims, vec![first, second])
    }

    /// Projective measurement in the computational basis of the full space.
    pub fn computational(dims: Vec<usize>) -> Result<Self> {
        let d = check_dims(&dims)?;
        let effects = (0..d).map(|i| linalg::outer(&linalg::basis_vector(d, i))).collect();
        Povm::new(dims, effects)
    }

    /// `{I/2, I/2}`.
    pub fn coin_flip(dims: Vec<usize>) -> Result<Self> {
        let d = check_dims(&dims)?;
        let half = linalg::identity(d).unscale(2.0);
        Povm::new(dims, vec![half.clone(), half])
    }

    /// `{I, 0}`: always answers outcome `outcome`.
    pub fn constant(dims: Vec<usize>, outcome: usize, outcomes: usize) -> Result<Self> {
        let d = check_dims(&dims)?;
        let effects = (0..outcomes)
            .map(|k| if k == outcome { linalg::identity(d) } else { CMat::zeros(d, d) })
            .collect();
        Povm::new(dims, effects)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn effects(&self) -> &[CMat] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Outcome distribution on `rho`, clamped into `[0, 1]`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "POVM on {:?} applied to state on {:?}",
                self.dims,
                rho.dims()
            )));
        }
        Ok(self.effects.iter().map(|e| rho.expectation(e).clamp(0.0, 1.0)).collect())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PovmRepr {
    dims: Vec<usize>,
    effects: Vec<MatrixRepr>,
}

impl Serialize for Povm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PovmRepr { dims: self.dims.clone(), effects: self.effects.iter().map(MatrixRepr::from).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Povm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PovmRepr::deserialize(d)?;
        let effects = r
            .effects
            .iter()
            .map(CMat::try_from)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Povm::new(r.dims, effects).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelRepr {
    in_dims: Vec<usize>,
    out_dims: Vec<usize>,
    kraus: Vec<MatrixRepr>,
}

impl Serialize for QuantumChannel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelRepr {
            in_dims: self.in_dims.clone(),
            out_dims: self.out_dims.clone(),
            kraus: self.kraus.iter().map(MatrixRepr::from).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuantumChannel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ChannelRepr::deserialize(d)?;
        let kraus = r
            .kraus
            .iter()
            .map(CMat::try_from)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        QuantumChannel::new(kraus, r.in_dims, r.out_dims).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::trace_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
        DensityMatrix::new(vec![dim], linalg::random_density(rng, dim, dim)).unwrap()
    }

    #[test]
    fn identity_channel_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_state(&mut rng, 4);
        let out = apply_channel(&QuantumChannel::identity(vec![4]).unwrap(), &rho).unwrap();
        assert!(linalg::max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn depolarizing_gives_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ch = QuantumChannel::completely_depolarizing(vec![2, 2]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        for _ in 0..5 {
            let rho = DensityMatrix::new(vec![2, 2], linalg::random_density(&mut rng, 4, 2)).unwrap();
            let out = ch.apply(&rho).unwrap();
            assert!(linalg::max_abs_diff(out.matrix(), mixed.matrix()) < 1e-14);
        }
    }

    #[test]
    fn unitary_then_inverse_recovers_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = linalg::random_unitary(&mut rng, 4);
        let fwd = QuantumChannel::unitary(u.clone(), vec![4]).unwrap();
        let back = QuantumChannel::unitary(u.adjoint(), vec![4]).unwrap();
        let rho = random_state(&mut rng, 4);
        let out = fwd.then(&back).unwrap().apply(&rho).unwrap();
        assert!(trace_distance(&out, &rho).unwrap() < 1e-10);
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let k = linalg::identity(2).scale(0.5);
        assert!(matches!(
            QuantumChannel::new(vec![k], vec![2], vec![2]),
            Err(Error::InvalidChannel(_))
        ));
        let rho = DensityMatrix::maximally_mixed(vec![4]).unwrap();
        let ch = QuantumChannel::identity(vec![2]).unwrap();
        assert!(matches!(ch.apply(&rho), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn pure_path_matches_density_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = QuantumChannel::completely_depolarizing(vec![2])
            .unwrap()
            .extend_left(&[2])
            .unwrap();
        let psi = PureState::new(vec![2, 2], linalg::random_unit_vector(&mut rng, 4)).unwrap();
        let a = ch.apply_pure(&psi).unwrap();
        let b = ch.apply(&psi.to_density()).unwrap();
        assert!(linalg::max_abs_diff(a.matrix(), b.matrix()) < 1e-14);
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::coin_flip(vec![2]).is_ok());
        assert!(Povm::computational(vec![2, 2]).is_ok());
        let bad = vec![linalg::identity(2), linalg::identity(2)];
        assert!(Povm::new(vec![2], bad).is_err());
        let mut neg = linalg::identity(2);
        neg[(0, 0)] = C64::new(-0.5, 0.0);
        let mut rest = linalg::identity(2) - &neg;
        rest[(0, 0)] = C64::new(1.5, 0.0);
        assert!(Povm::new(vec![2], vec![neg, rest]).is_err());
    }
}
