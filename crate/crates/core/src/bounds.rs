//! Entropies, Holevo quantities and closed-form lower bounds.
//!
//! All logarithms are base 2 and every bound is in bits/qubits. Bounds are
//! floored at zero: a negative lower bound on a qubit count says nothing.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::qmat::{DensityMatrix, Povm};
use crate::{Error, Result};

/// Slack below which a [`BoundReport`] fails.
pub const SLACK_TOL: f64 = 1e-9;

const CLAMP_TOL: f64 = 1e-12;

/// `-p log p - (1-p) log(1-p)`, with `0 log 0 = 0`.
///
/// Inputs within `1e-12` outside `[0, 1]` are clamped; anything further out is
/// rejected.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&p) || p.is_nan() {
        return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
    }
    let p = p.clamp(0.0, 1.0);
    Ok(plogp(p) + plogp(1.0 - p))
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Shannon entropy of a probability vector, in bits.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| plogp(p)).sum()
}

/// Inverse of the binary entropy on `[1/2, 1]`: the `p >= 1/2` with
/// `H(p) = h`. Bisection to machine precision.
pub fn binary_entropy_inverse_upper(h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::InvalidArgument(format!("entropy {h} outside [0, 1]")));
    }
    let (mut lo, mut hi) = (0.5f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        // H is decreasing on [1/2, 1]
        if binary_entropy(mid)? > h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(shannon_entropy(&rho.spectrum()?))
}

/// Weighted family of states on a common space.
#[derive(Debug, Clone)]
pub struct Ensemble {
    states: Vec<DensityMatrix>,
    probs: Vec<f64>,
}

impl Ensemble {
    pub fn new(states: Vec<DensityMatrix>, probs: Vec<f64>) -> Result<Self> {
        if states.is_empty() || states.len() != probs.len() {
            return Err(Error::InvalidArgument(
                "ensemble needs matching nonempty states and probabilities".into(),
            ));
        }
        if probs.iter().any(|&p| p < 0.0 || p.is_nan()) {
            return Err(Error::InvalidArgument("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
        }
        let dims = states[0].dims();
        if states.iter().any(|s| s.dims() != dims) {
            return Err(Error::DimensionMismatch("ensemble members differ in dims".into()));
        }
        Ok(Ensemble { states, probs })
    }

    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let n = states.len().max(1);
        Ensemble::new(states, vec![1.0 / n as f64; n])
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn dims(&self) -> &[usize] {
        self.states[0].dims()
    }

    pub fn average(&self) -> DensityMatrix {
        let refs: Vec<&DensityMatrix> = self.states.iter().collect();
        DensityMatrix::mix(&refs, &self.probs).expect("validated ensemble")
    }
}

/// `S(sum p_i rho_i) - sum p_i S(rho_i)`.
pub fn holevo_chi(e: &Ensemble) -> Result<f64> {
    let avg = von_neumann_entropy(&e.average())?;
    let mut parts = 0.0;
    for (s, &p) in e.states.iter().zip(&e.probs) {
        parts += p * von_neumann_entropy(s)?;
    }
    Ok((avg - parts).max(0.0))
}

/// Joint distribution `P(x, y) = p_x Tr(M_y rho_x)`, indexed `[x][y]`.
pub fn joint_distribution(e: &Ensemble, m: &Povm) -> Result<Vec<Vec<f64>>> {
    if m.dims() != e.dims() {
        return Err(Error::DimensionMismatch(format!(
            "POVM on {:?}, ensemble on {:?}",
            m.dims(),
            e.dims()
        )));
    }
    e.states
        .iter()
        .zip(&e.probs)
        .map(|(s, &p)| Ok(m.probabilities(s)?.into_iter().map(|q| p * q).collect()))
        .collect()
}

/// Shannon mutual information `I(X:Y)` between the ensemble label and the
/// POVM outcome, computed as `H(Y) - H(Y|X)`.
pub fn mutual_information_cq(e: &Ensemble, m: &Povm) -> Result<f64> {
    let joint = joint_distribution(e, m)?;
    Ok(mutual_information(&joint))
}

/// `I(X:Y)` of a joint table `[x][y]`.
pub fn mutual_information(joint: &[Vec<f64>]) -> f64 {
    let ny = joint.first().map_or(0, Vec::len);
    let py: Vec<f64> = (0..ny).map(|y| joint.iter().map(|row| row[y]).sum()).collect();
    let mut h_y_given_x = 0.0;
    for row in joint {
        let px: f64 = row.iter().sum();
        if px > 0.0 {
            let cond: Vec<f64> = row.iter().map(|&v| v / px).collect();
            h_y_given_x += px * shannon_entropy(&cond);
        }
    }
    (shannon_entropy(&py) - h_y_given_x).max(0.0)
}

/// Minimum qubits for an `(n, m, p)` random access code: `n (1 - H(p))`.
pub fn nayak_bound(n: usize, p: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    // same evaluation order as `subset_bound` so the two agree bit-for-bit
    Ok((n as f64 - n as f64 * binary_entropy(p)?).max(0.0))
}

/// Minimum qubits for an `(F, n, m, p)` code: `log|F| - n H(p)`.
pub fn subset_bound(f_size: u64, n: usize, p: f64) -> Result<f64> {
    if f_size == 0 || (n < 64 && f_size > 1u64 << n) {
        return Err(Error::InvalidArgument(format!("|F| = {f_size} outside [1, 2^{n}]")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(((f_size as f64).log2() - n as f64 * binary_entropy(p)?).max(0.0))
}

/// How the binary entropy of the security parameter enters the
/// communication bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMode {
    /// The printed formula, `H(eps)` for every `eps`.
    Paper,
    /// `H(eps)` replaced by `1` for `eps > 1/2`, where Fano's inequality on
    /// a failure probability stops being monotone.
    Rigorous,
}

impl fmt::Display for BoundMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundMode::Paper => "paper",
            BoundMode::Rigorous => "rigorous",
        })
    }
}

impl std::str::FromStr for BoundMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(BoundMode::Paper),
            "rigorous" => Ok(BoundMode::Rigorous),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

/// `H(eps)` in paper mode; in rigorous mode `1` once `eps > 1/2`.
pub fn security_entropy(eps: f64, mode: BoundMode) -> Result<f64> {
    match mode {
        BoundMode::Rigorous if eps > 0.5 => {
            binary_entropy(eps)?;
            Ok(1.0)
        }
        _ => binary_entropy(eps),
    }
}

/// `log2|F| - 2^n H(eps)`, with `|F|` given through its base-2 logarithm so
/// doubly exponential family sizes stay representable.
pub fn qhe_comm_bound_log(log2_f: f64, n: usize, eps: f64, mode: BoundMode) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!("eps {eps} outside [0, 1]")));
    }
    if n == 0 || n >= 64 {
        return Err(Error::InvalidArgument(format!("n = {n} out of range")));
    }
    let strings = (1u64 << n) as f64;
    if log2_f < 0.0 || log2_f > strings + 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "log2|F| = {log2_f} outside [0, 2^{n}]"
        )));
    }
    Ok((log2_f - strings * security_entropy(eps, mode)?).max(0.0))
}

/// Communication lower bound for a QHE scheme evaluating `f_size` Boolean
/// functions on `n` bits with trace-distance security `eps`.
pub fn qhe_comm_bound(f_size: u64, n: usize, eps: f64, mode: BoundMode) -> Result<f64> {
    if f_size == 0 {
        return Err(Error::InvalidArgument("|F| must be at least 1".into()));
    }
    qhe_comm_bound_log((f_size as f64).log2(), n, eps, mode)
}

/// Evaluated-ciphertext size under perfect security: `log2|S|`.
pub fn perfect_security_bound(s_size: u64) -> Result<f64> {
    if s_size == 0 {
        return Err(Error::InvalidArgument("|S| must be at least 1".into()));
    }
    Ok((s_size as f64).log2())
}

/// `log2((2^n)!)` and its leading asymptotic form `(n - log2 e) 2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReversibleCount {
    pub exact: f64,
    pub asymptotic: f64,
}

pub fn reversible_count_bits(n: usize) -> Result<ReversibleCount> {
    if !(1..=16).contains(&n) {
        return Err(Error::InvalidArgument(format!("n = {n} outside [1, 16]")));
    }
    let size = (1u64 << n) as f64;
    let exact = ln_gamma(size + 1.0) / std::f64::consts::LN_2;
    let asymptotic = (n as f64 - std::f64::consts::LOG2_E) * size;
    Ok(ReversibleCount { exact, asymptotic })
}

/// `H(q) - H(p_err)`: Fano's lower bound on `I(X:Y)` for a binary source with
/// prior `q` read through an estimator with error `p_err`.
pub fn fano_gap(q: f64, p_err: f64) -> Result<f64> {
    Ok(binary_entropy(q)? - binary_entropy(p_err)?)
}

/// A bound compared against the quantity it constrains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub bound: f64,
    pub measured: f64,
    pub slack: f64,
    pub mode: BoundMode,
    pub pass: bool,
}

impl BoundReport {
    pub fn new(
        name: impl Into<String>,
        params: impl IntoIterator<Item = (&'static str, f64)>,
        bound: f64,
        measured: f64,
        mode: BoundMode,
    ) -> Self {
        let slack = measured - bound;
        BoundReport {
            name: name.into(),
            params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            bound,
            measured,
            slack,
            mode,
            pass: slack.is_finite() && slack >= -SLACK_TOL,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{linalg, CMat, PureState, C64};
    use approx::assert_abs_diff_eq;

    /// Independent reference in natural logs.
    fn h_ref(p: f64) -> f64 {
        let t = |x: f64| if x == 0.0 { 0.0 } else { -x * x.ln() };
        (t(p) + t(1.0 - p)) / std::f64::consts::LN_2
    }

    fn plus() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![2], crate::qmat::CVec::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)]))
            .unwrap()
            .to_density()
    }

    fn z(i: usize) -> DensityMatrix {
        DensityMatrix::basis(vec![2], i).unwrap()
    }

    // cos^2(pi/8) = 1/2 + 1/(2 sqrt 2)
    const HELSTROM_P: f64 = 0.853_553_390_593_273_8;

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.8536).unwrap(), h_ref(0.8536), epsilon = 1e-14);
        assert_abs_diff_eq!(binary_entropy(0.8536).unwrap(), 0.6009, epsilon = 5e-4);
        assert_eq!(binary_entropy(-1e-13).unwrap(), 0.0);
        assert!(binary_entropy(1.0 + 1e-9).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn entropy_inverse() {
        let p = binary_entropy_inverse_upper(0.5).unwrap();
        assert_abs_diff_eq!(p, 0.889_972_135_561_639_7, epsilon = 1e-12);
        assert_abs_diff_eq!(binary_entropy(p).unwrap(), 0.5, epsilon = 1e-14);
        let p3 = binary_entropy_inverse_upper(2.0 / 3.0).unwrap();
        assert_abs_diff_eq!(p3, 0.826_047_668_590_806, epsilon = 1e-10);
    }

    #[test]
    fn von_neumann_examples() {
        assert_abs_diff_eq!(von_neumann_entropy(&plus()).unwrap(), 0.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&mixed).unwrap(), 1.0, epsilon = 1e-14);
        let skew = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&skew).unwrap(), h_ref(0.25), epsilon = 1e-14);
        assert_abs_diff_eq!(von_neumann_entropy(&skew).unwrap(), 0.8113, epsilon = 1e-4);
    }

    #[test]
    fn holevo_examples() {
        let e = Ensemble::uniform(vec![z(0), z(1)]).unwrap();
        assert_abs_diff_eq!(holevo_chi(&e).unwrap(), 1.0, epsilon = 1e-14);
        let e = Ensemble::uniform(vec![plus(), plus()]).unwrap();
        assert_abs_diff_eq!(holevo_chi(&e).unwrap(), 0.0, epsilon = 1e-12);
        // average state has eigenvalues 1/2 +- sqrt(2)/4 = cos^2(pi/8), sin^2(pi/8)
        let e = Ensemble::uniform(vec![z(0), plus()]).unwrap();
        assert_abs_diff_eq!(holevo_chi(&e).unwrap(), h_ref(HELSTROM_P), epsilon = 1e-12);
    }

    #[test]
    fn ensemble_validation() {
        assert!(Ensemble::new(vec![z(0)], vec![0.5]).is_err());
        let wide = DensityMatrix::maximally_mixed(vec![4]).unwrap();
        assert!(matches!(
            Ensemble::uniform(vec![z(0), wide]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn mutual_information_examples() {
        let e = Ensemble::new(vec![z(0), z(1)], vec![0.25, 0.75]).unwrap();
        let m = Povm::computational(vec![2]).unwrap();
        assert_abs_diff_eq!(mutual_information_cq(&e, &m).unwrap(), h_ref(0.25), epsilon = 1e-14);

        let coin = Povm::coin_flip(vec![2]).unwrap();
        assert_abs_diff_eq!(mutual_information_cq(&e, &coin).unwrap(), 0.0, epsilon = 1e-15);

        // Helstrom POVM for |0> vs |+>: projector on the positive part of
        // |0><0| - |+><+|, by hand.
        let e = Ensemble::uniform(vec![z(0), plus()]).unwrap();
        let diff: CMat = z(0).matrix() - plus().matrix();
        let p0 = linalg::positive_projector(&diff, 0.0);
        let m = Povm::binary(vec![2], p0).unwrap();
        // brute force over the 2x2 joint table
        let joint = joint_distribution(&e, &m).unwrap();
        let hy = shannon_entropy(&[joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]]);
        let hyx = 0.5 * shannon_entropy(&[2.0 * joint[0][0], 2.0 * joint[0][1]])
            + 0.5 * shannon_entropy(&[2.0 * joint[1][0], 2.0 * joint[1][1]]);
        let i = mutual_information_cq(&e, &m).unwrap();
        assert_abs_diff_eq!(i, hy - hyx, epsilon = 1e-14);
        assert_abs_diff_eq!(i, 1.0 - h_ref(HELSTROM_P), epsilon = 1e-12);
        assert_abs_diff_eq!(i, 0.3990, epsilon = 5e-4);

        let wide = Povm::coin_flip(vec![4]).unwrap();
        assert!(mutual_information_cq(&e, &wide).is_err());
    }

    #[test]
    fn nayak_examples() {
        assert_eq!(nayak_bound(2, 1.0).unwrap(), 2.0);
        assert_eq!(nayak_bound(7, 0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(nayak_bound(2, 0.8536).unwrap(), 2.0 * (1.0 - h_ref(0.8536)), epsilon = 1e-14);
        assert_abs_diff_eq!(nayak_bound(2, 0.8536).unwrap(), 0.798, epsilon = 1e-3);
    }

    #[test]
    fn subset_examples() {
        assert_eq!(subset_bound(4, 2, 1.0).unwrap(), 2.0);
        for n in 1..6 {
            for &p in &[0.5, 0.6, 0.8536, 0.99, 1.0] {
                assert_eq!(subset_bound(1 << n, n, p).unwrap(), nayak_bound(n, p).unwrap());
            }
        }
        // 1 - 4 H(0.9) < 0
        assert!(1.0 - 4.0 * h_ref(0.9) < 0.0);
        assert_eq!(subset_bound(2, 4, 0.9).unwrap(), 0.0);
        assert!(subset_bound(0, 2, 0.9).is_err());
        assert!(subset_bound(5, 2, 0.9).is_err());
    }

    #[test]
    fn comm_bound_examples() {
        assert_eq!(qhe_comm_bound(16, 2, 0.0, BoundMode::Paper).unwrap(), 4.0);
        assert_eq!(
            qhe_comm_bound(1 << 10, 4, 0.5, BoundMode::Paper).unwrap(),
            0.0f64.max(10.0 - 16.0)
        );
        assert_eq!(qhe_comm_bound(1 << 16, 4, 0.5, BoundMode::Paper).unwrap(), 0.0);
        assert_abs_diff_eq!(
            qhe_comm_bound(1 << 16, 4, 0.1, BoundMode::Paper).unwrap(),
            16.0 - 16.0 * h_ref(0.1),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            qhe_comm_bound(1 << 16, 4, 0.1, BoundMode::Paper).unwrap(),
            8.496_070_502_571_5,
            epsilon = 1e-9
        );
        // eps = 1: H(1) = 0 in paper mode, 1 in rigorous mode
        assert_eq!(qhe_comm_bound(6, 2, 1.0, BoundMode::Paper).unwrap(), 6f64.log2());
        assert_eq!(qhe_comm_bound(6, 2, 1.0, BoundMode::Rigorous).unwrap(), 0.0);
        assert!(qhe_comm_bound(4, 2, 1.5, BoundMode::Paper).is_err());
    }

    #[test]
    fn rigorous_mode_is_monotone() {
        let mut prev = f64::INFINITY;
        for k in 0..=1000 {
            let eps = k as f64 / 1000.0;
            let b = qhe_comm_bound_log(16.0, 4, eps, BoundMode::Rigorous).unwrap();
            assert!(b <= prev + 1e-15, "eps {eps}");
            prev = b;
        }
    }

    #[test]
    fn perfect_security_examples() {
        assert_eq!(perfect_security_bound(1).unwrap(), 0.0);
        assert_abs_diff_eq!(perfect_security_bound(24).unwrap(), 24f64.log2(), epsilon = 1e-15);
        assert_abs_diff_eq!(perfect_security_bound(24).unwrap(), 4.585, epsilon = 1e-3);
        for k in 0..40 {
            assert_eq!(perfect_security_bound(1 << k).unwrap(), k as f64);
        }
    }

    #[test]
    fn reversible_count_examples() {
        // direct sum of log2 k as the oracle
        let direct = |n: usize| (1..=(1u64 << n)).map(|k| (k as f64).log2()).sum::<f64>();
        assert_abs_diff_eq!(reversible_count_bits(1).unwrap().exact, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(reversible_count_bits(2).unwrap().exact, 24f64.log2(), epsilon = 1e-12);
        let r8 = reversible_count_bits(8).unwrap();
        let ratio = r8.exact / r8.asymptotic;
        assert!(ratio > 1.0 && ratio < 1.2, "ratio {ratio}");
        let mut prev = 0.0;
        for n in 1..=16 {
            let r = reversible_count_bits(n).unwrap();
            assert!(r.exact > prev);
            assert!(r.asymptotic < r.exact);
            assert_abs_diff_eq!(r.exact, direct(n), epsilon = 1e-9 * direct(n).max(1.0));
            prev = r.exact;
        }
        assert!(reversible_count_bits(0).is_err());
        assert!(reversible_count_bits(17).is_err());
    }

    #[test]
    fn fano_examples() {
        assert_eq!(fano_gap(0.5, 0.0).unwrap(), 1.0);
        assert_eq!(fano_gap(0.5, 0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(fano_gap(0.25, 0.1).unwrap(), h_ref(0.25) - h_ref(0.1), epsilon = 1e-14);
        assert_abs_diff_eq!(fano_gap(0.25, 0.1).unwrap(), 0.342, epsilon = 1e-3);
    }

    #[test]
    fn report_pass_flag() {
        let r = BoundReport::new("x", [("n", 2.0)], 3.0, 3.0 - 5e-10, BoundMode::Paper);
        assert!(r.pass);
        let r = BoundReport::new("x", [], 16.0, 8.0, BoundMode::Rigorous);
        assert!(!r.pass);
        assert_eq!(r.slack, -8.0);
    }
}
