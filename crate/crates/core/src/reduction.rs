//! From a QHE scheme to a random access code.
//!
//! Fix a base plaintext `x'`. Each Boolean function `f` of the scheme's
//! family is encoded as `rho_f = (I (x) Eval_f)(Enc(x'))` on `K (x) E`. To read
//! bit `x` of `f`, a key unitary `U_x` aligns `Enc(x')` with `Enc(x)`; since
//! evaluation touches only the ciphertext, decrypting `(U_x^dagger (x) I)
//! rho_f (U_x (x) I)` and reading the first output wire yields `f(x)` up to
//! the security error. Every approximation along the way is measured.
//!
//! The key register is compressed onto the support of the base point's key
//! state before the code is assembled, so the code lives on at most
//! `qubits(C) + qubits(E)` qubits.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::bounds::{self, BoundMode, BoundReport};
use crate::qhe::{self, FunctionDescriptor, QheScheme, SchemeSpec};
use crate::qmat::{linalg, uhlmann_align, CMat, CVec, DensityMatrix, Operator, Povm, C64};
use crate::qrac::{success_matrix, QracInstance, SuccessTable};
use crate::repr::format_real;
use crate::{par, Error, Result};

const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Distances at or below this count as zero for the perfect-security form.
pub const PERFECT_SECURITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct KeyAlignment {
    pub x: BitString,
    pub unitary: Operator,
    /// `|<Enc(x')| (U_x (x) I) |Enc(x)>|`.
    pub overlap: f64,
    /// Trace distance between `(U_x (x) I) Enc(x)` and `Enc(x')`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentRecord {
    pub x: BitString,
    pub overlap: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub step: usize,
    pub description: String,
    /// Maximum over functions and positions.
    pub measured_distance: f64,
    pub budget: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionResult {
    pub scheme: SchemeSpec,
    pub n: usize,
    pub base: BitString,
    /// One catalog representative per truth table, in code-string order.
    pub functions: Vec<FunctionDescriptor>,
    pub instance: QracInstance,
    pub success: SuccessTable,
    pub worst_success: f64,
    pub epsilon: f64,
    /// `qubits(C) + qubits(E)`.
    pub communication_qubits: usize,
    /// Rank of the base point's key state.
    pub key_support_rank: usize,
    pub alignments: Vec<AlignmentRecord>,
    pub chain: Vec<ChainStep>,
}

impl ReductionResult {
    pub fn family_size(&self) -> usize {
        self.functions.len()
    }

    pub fn max_residual(&self) -> f64 {
        self.alignments.iter().map(|a| a.residual).fold(0.0, f64::max)
    }

    pub fn max_chain_distance(&self) -> f64 {
        self.chain.iter().map(|c| c.measured_distance).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn check_base(s: &QheScheme, base: &BitString) -> Result<()> {
    if base.len() != s.n() {
        return Err(Error::InvalidArgument(format!("base point {base} has length {}, scheme takes {}", base.len(), s.n())));
    }
    Ok(())
}

/// `rho_f = (I (x) Eval_f)(Enc(base))` on `[dK, dE]`.
pub fn build_encoder(s: &QheScheme, f: &FunctionDescriptor, base: &BitString) -> Result<DensityMatrix> {
    check_base(s, base)?;
    let k = s.find(f)?;
    let psi = qhe::encrypt(s, base)?;
    let mat: CMat = s.evaluate_branches(k, psi.amplitudes()).iter().map(linalg::outer).sum();
    DensityMatrix::new(vec![s.key_dim(), s.evaluated_dim()], mat)
}

/// `U_x = uhlmann_align(Enc(x), Enc(base))` for every plaintext `x`, in
/// index order.
pub fn build_key_unitaries(s: &QheScheme, base: &BitString) -> Result<Vec<KeyAlignment>> {
    check_base(s, base)?;
    let target = qhe::encrypt(s, base)?;
    let xs = BitString::all(s.n());
    par::map(&xs, |x| {
        let psi = qhe::encrypt(s, x)?;
        let a = uhlmann_align(&psi, &target, 1)?;
        let de = s.ciphertext_dim();
        let aligned = key_rotate(psi.amplitudes(), &a.unitary.matrix().adjoint(), de);
        let residual = pure_distance(&aligned, target.amplitudes());
        Ok(KeyAlignment { x: x.clone(), unitary: a.unitary, overlap: a.overlap, residual })
    })
    .into_iter()
    .collect()
}

/// Projector onto plaintexts whose first bit is `b`.
fn first_wire_projector(n: usize, b: bool) -> CMat {
    let d = 1usize << n;
    let mut p = CMat::zeros(d, d);
    for m in (0..d).filter(|m| ((m >> (n - 1)) & 1 == 1) == b) {
        p[(m, m)] = C64::new(1.0, 0.0);
    }
    p
}

/// `E^b = V^dagger Dec^dagger(Pi_b) V` with `V = (U^dagger W) (x) I_E`, where
/// `W` embeds the retained key subspace.
fn measurement_effects(s: &QheScheme, u: &CMat, w: &CMat) -> [CMat; 2] {
    let de = s.evaluated_dim();
    let v = linalg::kron(&(u.adjoint() * w), &linalg::identity(de));
    let d = v.ncols();
    let mut effects = [CMat::zeros(d, d), CMat::zeros(d, d)];
    for k in s.decryption().kraus() {
        let b = k * &v;
        for (bit, e) in effects.iter_mut().enumerate() {
            *e += b.adjoint() * first_wire_projector(s.n(), bit == 1) * &b;
        }
    }
    effects
}

/// `M_x = {E_x^0, E_x^1}` on the full `K (x) E`, in the Heisenberg picture:
/// `E_x^b = (U_x (x) I) Dec^dagger(Pi_b) (U_x (x) I)^dagger`.
pub fn build_measurements(s: &QheScheme, keys: &[KeyAlignment]) -> Result<Vec<Povm>> {
    let id = linalg::identity(s.key_dim());
    keys.iter()
        .map(|k| {
            let [e0, e1] = measurement_effects(s, k.unitary.matrix(), &id);
            Povm::new(vec![s.key_dim(), s.evaluated_dim()], vec![e0, e1])
        })
        .collect()
}

/// Orthonormal columns spanning the support of the base point's key state,
/// padded with further basis vectors to a power-of-two count. Returns the
/// embedding and the support rank.
fn key_support(s: &QheScheme, base: &BitString) -> Result<(CMat, usize)> {
    let rho_k = qhe::encrypt(s, base)?.reduced(&[0])?;
    let (values, vectors) = linalg::hermitian_eigen(rho_k.matrix());
    let keep: Vec<usize> = (0..values.len()).rev().filter(|&k| values[k] > SUPPORT_THRESHOLD).collect();
    let rank = keep.len();
    let support = CMat::from_fn(s.key_dim(), rank, |r, c| vectors[(r, keep[c])]);
    let width = rank.next_power_of_two();
    let full = linalg::complete_basis(&support, s.key_dim());
    Ok((full.columns(0, width).into_owned(), rank))
}

/// `(W^dagger (x) I) v` for a vector on `K (x) E`.
fn compress(v: &CVec, w: &CMat, de: usize) -> CVec {
    let dk = w.nrows();
    let a = CMat::from_fn(dk, de, |k, e| v[k * de + e]);
    let out = w.adjoint() * a;
    CVec::from_iterator(out.len(), out.transpose().iter().copied())
}

/// `(U^dagger (x) I) v`.
fn key_rotate(v: &CVec, u: &CMat, de: usize) -> CVec {
    compress(v, u, de)
}

fn density(branches: &[CVec]) -> CMat {
    branches.iter().map(linalg::outer).sum()
}

/// `sqrt(1 - |<u|v>|^2)` for normalised `u`, `v`, evaluated as
/// `sqrt(|u - e^{i phi} v|^2 (1 + c) / 2)` with `c e^{-i phi} = <u|v>` so that
/// nearly equal states do not lose half their digits.
fn pure_distance(u: &CVec, v: &CVec) -> f64 {
    let u = u.unscale(u.norm());
    let v = v.unscale(v.norm());
    let ip = u.dotc(&v);
    let c = ip.norm().min(1.0);
    let phase = if c > 0.0 { ip.unscale(c) } else { C64::new(1.0, 0.0) };
    let d = (&u - v * phase.conj()).norm_squared();
    (d * (1.0 + c) / 2.0).min(1.0).sqrt()
}

/// Trace distance between two mixtures of unnormalised pure branches.
fn branch_distance(a: &[CVec], b: &[CVec]) -> f64 {
    if let ([u], [v]) = (a, b) {
        return pure_distance(u, v);
    }
    let diff = density(a) - density(b);
    0.5 * linalg::hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>()
}

fn first_wire_prob(n: usize, probs: &[f64], b: bool) -> f64 {
    probs
        .iter()
        .enumerate()
        .filter(|(m, _)| ((m >> (n - 1)) & 1 == 1) == b)
        .map(|(_, p)| p)
        .sum()
}

/// Builds the code and measures every step of the approximation chain.
///
/// Requires a perfectly correct scheme.
pub fn extract_qrac(s: &QheScheme, base: &BitString) -> Result<ReductionResult> {
    check_base(s, base)?;
    let correctness = qhe::check_correctness(s)?;
    if let Some(w) = correctness.witness {
        return Err(Error::InvalidArgument(format!(
            "{} is not perfectly correct: x = {}, f = {}, fidelity {}",
            s.spec(),
            w.plaintext,
            w.function,
            w.fidelity
        )));
    }
    let epsilon = qhe::audit_security(s)?.epsilon;
    let family = qhe::boolean_family_with_representatives(s);
    let keys = build_key_unitaries(s, base)?;
    let (w, key_support_rank) = key_support(s, base)?;
    let de = s.evaluated_dim();
    let code_dims = vec![w.ncols(), de];
    let m = (w.ncols() * de).trailing_zeros() as usize;

    let base_amps = qhe::encrypt(s, base)?.amplitudes().clone();
    let encoder = family
        .iter()
        .map(|&(_, k)| {
            let branches: Vec<CVec> = s.evaluate_branches(k, &base_amps).iter().map(|v| compress(v, &w, de)).collect();
            DensityMatrix::new(code_dims.clone(), density(&branches))
        })
        .collect::<Result<Vec<_>>>()?;
    let decoders = par::map(&keys, |k| {
        let [e0, e1] = measurement_effects(s, k.unitary.matrix(), &w);
        Povm::new(code_dims.clone(), vec![e0, e1])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let strings: Vec<BitString> = family.iter().map(|(t, _)| t.clone()).collect();
    let instance = QracInstance::new(1 << s.n(), m, strings, encoder, decoders)?;
    let success = success_matrix(&instance);

    let cases: Vec<(usize, usize)> = (0..family.len()).flat_map(|f| (0..keys.len()).map(move |x| (f, x))).collect();
    let steps = par::map(&cases, |&(fi, xi)| {
        let (table, k) = &family[fi];
        let u = keys[xi].unitary.matrix();
        let aligned_base = key_rotate(&base_amps, u, de);
        let eval_after = s.evaluate_branches(*k, &aligned_base);
        let eval_before: Vec<CVec> =
            s.evaluate_branches(*k, &base_amps).iter().map(|v| key_rotate(v, u, de)).collect();
        let psi_x = s.encryption().column(xi).into_owned();
        let eval_x = s.evaluate_branches(*k, &psi_x);
        let probs = s.decrypt_distribution(&eval_x);
        [
            branch_distance(&eval_after, &eval_before),
            branch_distance(&eval_after, &eval_x),
            1.0 - first_wire_prob(s.n(), &probs, table.bit(xi)),
            1.0 - success.probs[fi][xi],
        ]
    });
    let worst = |j: usize| steps.iter().map(|row| row[j]).fold(0.0, f64::max).max(0.0);
    let descriptions = [
        ("evaluation commutes with the key unitary", 0.0),
        ("evaluated aligned base encryption vs evaluated encryption of x", epsilon),
        ("decryption of the evaluated encryption of x reads f(x)", 0.0),
        ("error of the extracted measurement", epsilon),
    ];
    let chain = descriptions
        .iter()
        .enumerate()
        .map(|(j, &(d, budget))| ChainStep { step: j + 1, description: d.into(), measured_distance: worst(j), budget })
        .collect();

    Ok(ReductionResult {
        scheme: s.spec(),
        n: s.n(),
        base: base.clone(),
        functions: family.iter().map(|&(_, k)| s.catalog()[k].function.clone()).collect(),
        worst_success: success.worst,
        success,
        instance,
        epsilon,
        communication_qubits: s.ciphertext_qubits() + s.evaluated_qubits(),
        key_support_rank,
        alignments: keys
            .iter()
            .map(|k| AlignmentRecord { x: k.x.clone(), overlap: k.overlap, residual: k.residual })
            .collect(),
        chain,
    })
}

/// Communication against `log2|F| - 2^n H(eps)` in the chosen mode, plus
/// `log2|F|` itself when the scheme is perfectly secure.
pub fn verify_reduction(r: &ReductionResult, mode: BoundMode) -> Result<Vec<BoundReport>> {
    let f = r.family_size() as u64;
    let comm = r.communication_qubits as f64;
    let params = [("n", r.n as f64), ("family_size", f as f64), ("epsilon", r.epsilon)];
    let bound = bounds::qhe_comm_bound(f, r.n, r.epsilon, mode)?;
    let mut out = vec![BoundReport::new("qhe_comm_bound", params, bound, comm, mode)];
    if r.epsilon <= PERFECT_SECURITY_TOL {
        out.push(BoundReport::new("perfect_security_bound", params, bounds::perfect_security_bound(f)?, comm, mode));
    }
    Ok(out)
}

/// Chain table as CSV: `step,description,measured_distance,budget`.
pub fn chain_csv(r: &ReductionResult) -> String {
    let mut out = String::from("step,description,measured_distance,budget\n");
    for c in &r.chain {
        out.push_str(&format!(
            "{},{},{},{}\n",
            c.step,
            c.description,
            format_real(c.measured_distance),
            format_real(c.budget)
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryPoint {
    pub n: usize,
    pub epsilon: f64,
    /// `2^n H(eps)`.
    pub correction: f64,
    /// `2^n - 2^n H(eps)` for `|F| = 2^(2^n)`, floored at zero.
    pub bound: f64,
}

/// `eps(n) = 2^(-1.01 n)` with the full family `|F| = 2^(2^n)`.
pub fn corollary_scan(ns: &[usize], mode: BoundMode) -> Result<Vec<CorollaryPoint>> {
    ns.iter()
        .map(|&n| {
            let epsilon = 2f64.powf(-1.01 * n as f64);
            let strings = (1u64 << n) as f64;
            Ok(CorollaryPoint {
                n,
                epsilon,
                correction: strings * bounds::security_entropy(epsilon, mode)?,
                bound: bounds::qhe_comm_bound_log(strings, n, epsilon, mode)?,
            })
        })
        .collect()
}

pub fn correction_strictly_decreasing(points: &[CorollaryPoint]) -> bool {
    points.windows(2).all(|w| w[1].correction < w[0].correction)
}
