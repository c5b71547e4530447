//! Symmetric-key quantum homomorphic encryption as explicit channels.
//!
//! A scheme on `n` plaintext bits consists of an encryption isometry
//! `M -> K (x) C`, one evaluation channel `C -> E` per permissible function
//! and a single decryption channel `K (x) E -> M`. Randomised classical pads
//! are purified: the key register holds a coherent copy of the pad, so every
//! encryption of a basis plaintext is a pure state on `K (x) C`.
//!
//! All shipped evaluation channels are permutations of the computational
//! basis of `C`, and `E = C`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::qmat::{check_dims, linalg, trace_distance, CMat, CVec, DensityMatrix, PureState, QuantumChannel, C64};
use crate::{par, Error, Result};

pub const MAX_N: usize = 3;

/// Decryption fidelity threshold for correctness.
pub const CORRECTNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionKind {
    Identity,
    XorShift,
    ReversibleCircuit,
}

/// A reversible function on `n` bits and the Boolean function on its first
/// output wire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctionDescriptor {
    kind: FunctionKind,
    label: String,
    permutation: Vec<usize>,
    truth_table: BitString,
}

impl FunctionDescriptor {
    pub fn new(kind: FunctionKind, label: impl Into<String>, permutation: Vec<usize>) -> Result<Self> {
        let d = permutation.len();
        if !d.is_power_of_two() || d < 2 {
            return Err(Error::InvalidArgument(format!("permutation table of length {d}")));
        }
        let mut seen = vec![false; d];
        for &p in &permutation {
            if p >= d || seen[p] {
                return Err(Error::InvalidArgument(format!("{permutation:?} is not a bijection")));
            }
            seen[p] = true;
        }
        let n = d.trailing_zeros();
        let truth_table = BitString::new(permutation.iter().map(|&p| (p >> (n - 1)) & 1 == 1).collect());
        Ok(FunctionDescriptor { kind, label: label.into(), permutation, truth_table })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(FunctionKind::Identity, "id", (0..1usize << n).collect())
    }

    pub fn xor_shift(n: usize, a: usize) -> Result<Self> {
        if a == 0 {
            return Self::identity(n);
        }
        let label = format!("xor-{}", BitString::from_index(a, n));
        Self::new(FunctionKind::XorShift, label, (0..1usize << n).map(|x| x ^ a).collect())
    }

    /// Classifies an arbitrary permutation table.
    pub fn from_permutation(permutation: Vec<usize>) -> Result<Self> {
        let a = permutation.first().copied().unwrap_or(0);
        if permutation.iter().enumerate().all(|(x, &p)| p == x ^ a) {
            let n = permutation.len().trailing_zeros() as usize;
            return Self::xor_shift(n, a);
        }
        let label = format!("perm-{}", permutation.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("."));
        Self::new(FunctionKind::ReversibleCircuit, label, permutation)
    }

    pub fn n(&self) -> usize {
        self.permutation.len().trailing_zeros() as usize
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Bit `i` is the first output bit on input `i` (MSB-first).
    pub fn truth_table(&self) -> &BitString {
        &self.truth_table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.permutation[x]
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DescriptorRepr {
    kind: FunctionKind,
    label: String,
    permutation: Vec<usize>,
    truth_table: BitString,
}

impl<'de> Deserialize<'de> for FunctionDescriptor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DescriptorRepr::deserialize(d)?;
        let f = FunctionDescriptor::new(r.kind, r.label, r.permutation).map_err(serde::de::Error::custom)?;
        if f.truth_table != r.truth_table {
            return Err(serde::de::Error::custom("truth table does not match permutation"));
        }
        Ok(f)
    }
}

/// Named scheme constructors, including the negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SchemeSpec {
    XorOtp { n: usize },
    BiasedPad { n: usize, delta: f64 },
    QotpPauli { n: usize },
    Plaintext { n: usize },
    /// xor-otp whose decryption ignores the key.
    CorruptedXorOtp { n: usize },
    /// qotp-pauli with a CNOT appended to the catalog.
    QotpPauliCnot { n: usize },
}

impl SchemeSpec {
    pub fn from_name(name: &str, n: usize, delta: Option<f64>) -> Result<Self> {
        let spec = match name {
            "xor-otp" => SchemeSpec::XorOtp { n },
            "biased-pad" => SchemeSpec::BiasedPad {
                n,
                delta: delta.ok_or_else(|| Error::InvalidArgument("biased-pad needs delta".into()))?,
            },
            "qotp-pauli" => SchemeSpec::QotpPauli { n },
            "plaintext" => SchemeSpec::Plaintext { n },
            "corrupted-xor-otp" => SchemeSpec::CorruptedXorOtp { n },
            "qotp-pauli-cnot" => SchemeSpec::QotpPauliCnot { n },
            other => return Err(Error::InvalidArgument(format!("unknown scheme {other:?}"))),
        };
        if delta.is_some() && !matches!(spec, SchemeSpec::BiasedPad { .. }) {
            return Err(Error::InvalidArgument(format!("{name} takes no delta")));
        }
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchemeSpec::XorOtp { .. } => "xor-otp",
            SchemeSpec::BiasedPad { .. } => "biased-pad",
            SchemeSpec::QotpPauli { .. } => "qotp-pauli",
            SchemeSpec::Plaintext { .. } => "plaintext",
            SchemeSpec::CorruptedXorOtp { .. } => "corrupted-xor-otp",
            SchemeSpec::QotpPauliCnot { .. } => "qotp-pauli-cnot",
        }
    }

    pub fn build(&self) -> Result<QheScheme> {
        match *self {
            SchemeSpec::XorOtp { n } => make_xor_otp(n),
            SchemeSpec::BiasedPad { n, delta } => make_biased_pad(n, delta),
            SchemeSpec::QotpPauli { n } => make_qotp_pauli(n),
            SchemeSpec::Plaintext { n } => make_plaintext(n),
            SchemeSpec::CorruptedXorOtp { n } => make_corrupted_xor_otp(n),
            SchemeSpec::QotpPauliCnot { n } => make_qotp_pauli_with_cnot(n),
        }
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SchemeSpec::BiasedPad { n, delta } => write!(f, "biased-pad({n}, {delta})"),
            SchemeSpec::XorOtp { n }
            | SchemeSpec::QotpPauli { n }
            | SchemeSpec::Plaintext { n }
            | SchemeSpec::CorruptedXorOtp { n }
            | SchemeSpec::QotpPauliCnot { n } => write!(f, "{}({n})", self.name()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub function: FunctionDescriptor,
    /// `C -> E`.
    pub channel: QuantumChannel,
}

#[derive(Debug, Clone)]
pub struct QheScheme {
    spec: SchemeSpec,
    n: usize,
    key_dim: usize,
    ct_dim: usize,
    ev_dim: usize,
    /// `dK dC x 2^n`, rows indexed `k * dC + c`.
    enc: CMat,
    catalog: Vec<CatalogEntry>,
    /// `K (x) E -> M`.
    dec: QuantumChannel,
}

/// Serializable summary; the catalog is stored as permutation tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeDescriptor {
    pub spec: SchemeSpec,
    pub key_qubits: usize,
    pub ciphertext_qubits: usize,
    pub evaluated_qubits: usize,
    pub catalog: Vec<FunctionDescriptor>,
}

impl QheScheme {
    fn assemble(spec: SchemeSpec, n: usize, key_dim: usize, enc: CMat, functions: Vec<FunctionDescriptor>, dec: QuantumChannel) -> Result<Self> {
        let ct_dim = 1usize << n;
        check_dims(&[key_dim, ct_dim])?;
        let catalog = functions
            .into_iter()
            .map(|f| {
                let channel = QuantumChannel::unitary(linalg::permutation_matrix(f.permutation()), vec![ct_dim])?;
                Ok(CatalogEntry { function: f, channel })
            })
            .collect::<Result<Vec<_>>>()?;
        let s = QheScheme { spec, n, key_dim, ct_dim, ev_dim: ct_dim, enc, catalog, dec };
        let defect = s.isometry_defect();
        if defect > 1e-10 {
            return Err(Error::InvalidChannel(format!("encryption is not an isometry (defect {defect:e})")));
        }
        Ok(s)
    }

    pub fn spec(&self) -> SchemeSpec {
        self.spec
    }

    pub fn name(&self) -> &'static str {
        self.spec.name()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn key_dim(&self) -> usize {
        self.key_dim
    }

    pub fn ciphertext_dim(&self) -> usize {
        self.ct_dim
    }

    pub fn evaluated_dim(&self) -> usize {
        self.ev_dim
    }

    pub fn key_qubits(&self) -> usize {
        self.key_dim.trailing_zeros() as usize
    }

    pub fn ciphertext_qubits(&self) -> usize {
        self.ct_dim.trailing_zeros() as usize
    }

    pub fn evaluated_qubits(&self) -> usize {
        self.ev_dim.trailing_zeros() as usize
    }

    pub fn encryption(&self) -> &CMat {
        &self.enc
    }

    pub fn catalog(&self) -> &[CatalogEntry] {
        &self.catalog
    }

    pub fn decryption(&self) -> &QuantumChannel {
        &self.dec
    }

    /// `max |enc^dagger enc - I|`.
    pub fn isometry_defect(&self) -> f64 {
        linalg::max_abs_diff(&(self.enc.adjoint() * &self.enc), &linalg::identity(1 << self.n))
    }

    /// Largest trace-preservation defect over decryption and the catalog.
    pub fn channel_defect(&self) -> f64 {
        self.catalog
            .iter()
            .map(|e| e.channel.trace_preservation_defect())
            .fold(self.dec.trace_preservation_defect(), f64::max)
    }

    /// Largest Schmidt rank of `enc(x)` across the `K : C` cut over basis
    /// plaintexts, i.e. the rank of the key's reduced state.
    pub fn max_key_rank(&self) -> Result<usize> {
        let mut worst = 0;
        for x in 0..1usize << self.n {
            let a = self.encrypt_index(x)?.bipartite_matrix(1)?;
            let rank = linalg::singular_values(&a).iter().filter(|&&s| s > 1e-12).count();
            worst = worst.max(rank);
        }
        Ok(worst)
    }

    pub fn find(&self, f: &FunctionDescriptor) -> Result<usize> {
        self.catalog
            .iter()
            .position(|e| e.function.permutation() == f.permutation())
            .ok_or_else(|| Error::NotPermissible(format!("{} is not in the {} catalog", f.label(), self.spec)))
    }

    pub fn descriptor(&self) -> SchemeDescriptor {
        SchemeDescriptor {
            spec: self.spec,
            key_qubits: self.key_qubits(),
            ciphertext_qubits: self.ciphertext_qubits(),
            evaluated_qubits: self.evaluated_qubits(),
            catalog: self.catalog.iter().map(|e| e.function.clone()).collect(),
        }
    }

    /// Rebuilds from a descriptor and checks that it matches.
    pub fn from_descriptor(d: &SchemeDescriptor) -> Result<Self> {
        let s = d.spec.build()?;
        if s.descriptor() != *d {
            return Err(Error::InvalidArgument(format!("descriptor does not match {}", d.spec)));
        }
        Ok(s)
    }

    fn encrypt_index(&self, x: usize) -> Result<PureState> {
        PureState::new(vec![self.key_dim, self.ct_dim], self.enc.column(x).into_owned())
    }

    /// Unnormalised pure branches of `(I_K (x) eval_f) |psi>` on `K (x) E`,
    /// one per Kraus operator of the evaluation channel.
    pub fn evaluate_branches(&self, f: usize, psi: &CVec) -> Vec<CVec> {
        let a = CMat::from_fn(self.key_dim, self.ct_dim, |k, c| psi[k * self.ct_dim + c]);
        self.catalog[f]
            .channel
            .kraus()
            .iter()
            .map(|e| {
                let out = &a * e.transpose();
                CVec::from_iterator(out.len(), out.transpose().iter().copied())
            })
            .collect()
    }

    /// `(I_K (x) eval_f)(rho)` for a state on `K (x) C`.
    pub fn evaluate(&self, f: usize, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let ch = self.catalog[f].channel.extend_left(&[self.key_dim])?;
        ch.apply(rho)
    }

    /// Distribution of the decrypted plaintext in the computational basis
    /// for a mixture of unnormalised branches on `K (x) E`.
    pub fn decrypt_distribution(&self, branches: &[CVec]) -> Vec<f64> {
        let mut probs = vec![0.0; 1 << self.n];
        for v in branches {
            for k in self.dec.kraus() {
                let out = k * v;
                for (m, amp) in out.iter().enumerate() {
                    probs[m] += amp.norm_sqr();
                }
            }
        }
        probs
    }
}

/// `QHE.Enc(|x>)`, a pure state on `[dK, dC]`.
pub fn encrypt(s: &QheScheme, x: &BitString) -> Result<PureState> {
    if x.len() != s.n {
        return Err(Error::InvalidArgument(format!("plaintext {x} has length {}, scheme takes {}", x.len(), s.n)));
    }
    s.encrypt_index(x.index())
}

fn check_n(n: usize) -> Result<()> {
    if !(1..=MAX_N).contains(&n) {
        return Err(Error::InvalidArgument(format!("n = {n} outside 1..={MAX_N}")));
    }
    Ok(())
}

/// Pad encryption `|x> -> sum_r sqrt(P(r)) |r>|x ^ r>`.
fn pad_encryption(n: usize, probs: &[f64]) -> CMat {
    let d = 1usize << n;
    let mut enc = CMat::zeros(d * d, d);
    for x in 0..d {
        for (r, &p) in probs.iter().enumerate() {
            enc[(r * d + (x ^ r), x)] = C64::new(p.sqrt(), 0.0);
        }
    }
    enc
}

/// `K_j = sum_c |c ^ j><j, c|`, or `|c><j, c|` when `use_key` is false.
fn pad_decryption(n: usize, use_key: bool) -> Result<QuantumChannel> {
    let d = 1usize << n;
    let kraus = (0..d)
        .map(|j| {
            let mut k = CMat::zeros(d, d * d);
            for c in 0..d {
                let m = if use_key { c ^ j } else { c };
                k[(m, j * d + c)] = C64::new(1.0, 0.0);
            }
            k
        })
        .collect();
    QuantumChannel::new(kraus, vec![d, d], vec![d])
}

fn xor_catalog(n: usize) -> Result<Vec<FunctionDescriptor>> {
    (0..1usize << n).map(|a| FunctionDescriptor::xor_shift(n, a)).collect()
}

/// Classical one-time pad with a uniformly random key; permissible
/// functions are the `2^n` xor-shifts.
pub fn make_xor_otp(n: usize) -> Result<QheScheme> {
    check_n(n)?;
    let d = 1usize << n;
    let enc = pad_encryption(n, &vec![1.0 / d as f64; d]);
    QheScheme::assemble(SchemeSpec::XorOtp { n }, n, d, enc, xor_catalog(n)?, pad_decryption(n, true)?)
}

/// One-time pad whose key bits are independently 1 with probability
/// `1/2 - delta`.
pub fn make_biased_pad(n: usize, delta: f64) -> Result<QheScheme> {
    check_n(n)?;
    if !(0.0..=0.5).contains(&delta) {
        return Err(Error::InvalidArgument(format!("delta = {delta} outside [0, 1/2]")));
    }
    let d = 1usize << n;
    let probs: Vec<f64> = (0..d)
        .map(|r| {
            (0..n)
                .map(|i| if (r >> i) & 1 == 1 { 0.5 - delta } else { 0.5 + delta })
                .product()
        })
        .collect();
    let enc = pad_encryption(n, &probs);
    QheScheme::assemble(SchemeSpec::BiasedPad { n, delta }, n, d, enc, xor_catalog(n)?, pad_decryption(n, true)?)
}

fn parity(v: usize) -> f64 {
    if v.count_ones() % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn qotp_parts(n: usize) -> Result<(CMat, QuantumChannel)> {
    let d = 1usize << n;
    let dk = d * d;
    // key index k = a * d + b holds the pad X^a Z^b
    let mut enc = CMat::zeros(dk * d, d);
    let amp = 1.0 / d as f64;
    for x in 0..d {
        for a in 0..d {
            for b in 0..d {
                enc[((a * d + b) * d + (x ^ a), x)] = C64::new(amp * parity(b & x), 0.0);
            }
        }
    }
    // K_{ab} = <ab| (x) Z^b X^a
    let kraus = (0..dk)
        .map(|k| {
            let (a, b) = (k / d, k % d);
            let mut op = CMat::zeros(d, dk * d);
            for e in 0..d {
                let m = e ^ a;
                op[(m, k * d + e)] = C64::new(parity(b & m), 0.0);
            }
            op
        })
        .collect();
    Ok((enc, QuantumChannel::new(kraus, vec![dk, d], vec![d])?))
}

/// Quantum one-time pad `X^a Z^b` with a purified `2n`-qubit key; permissible
/// functions are Pauli-X circuits (xor-shifts).
pub fn make_qotp_pauli(n: usize) -> Result<QheScheme> {
    check_n(n)?;
    let (enc, dec) = qotp_parts(n)?;
    QheScheme::assemble(SchemeSpec::QotpPauli { n }, n, 1 << (2 * n), enc, xor_catalog(n)?, dec)
}

/// No key, identity encryption. For `n <= 2` every reversible function is
/// permissible; for `n = 3` the catalog is xor-shifts composed with wire
/// permutations.
pub fn make_plaintext(n: usize) -> Result<QheScheme> {
    check_n(n)?;
    let d = 1usize << n;
    let functions = if n <= 2 {
        all_permutations(d).into_iter().map(FunctionDescriptor::from_permutation).collect::<Result<_>>()?
    } else {
        let mut out = Vec::new();
        for wires in all_permutations(n) {
            for a in 0..d {
                let perm = (0..d).map(|x| permute_wires(x, &wires, n) ^ a).collect();
                out.push(FunctionDescriptor::from_permutation(perm)?);
            }
        }
        out
    };
    let dec = QuantumChannel::new(vec![linalg::identity(d)], vec![1, d], vec![d])?;
    QheScheme::assemble(SchemeSpec::Plaintext { n }, n, 1, linalg::identity(d), functions, dec)
}

/// Negative control: xor-otp whose decryption discards the key.
pub fn make_corrupted_xor_otp(n: usize) -> Result<QheScheme> {
    check_n(n)?;
    let d = 1usize << n;
    let enc = pad_encryption(n, &vec![1.0 / d as f64; d]);
    QheScheme::assemble(SchemeSpec::CorruptedXorOtp { n }, n, d, enc, xor_catalog(n)?, pad_decryption(n, false)?)
}

/// Negative control: qotp-pauli with `CNOT(wire 1 -> wire 2)` appended to
/// the catalog. Conjugating the pad by a CNOT changes it, so decryption with
/// the original key fails. Needs `n >= 2`.
pub fn make_qotp_pauli_with_cnot(n: usize) -> Result<QheScheme> {
    check_n(n)?;
    if n < 2 {
        return Err(Error::InvalidArgument("CNOT needs n >= 2".into()));
    }
    let (enc, dec) = qotp_parts(n)?;
    let mut functions = xor_catalog(n)?;
    let (c, t) = (1usize << (n - 1), 1usize << (n - 2));
    let cnot = (0..1usize << n).map(|x| if x & c != 0 { x ^ t } else { x }).collect();
    functions.push(FunctionDescriptor::new(FunctionKind::ReversibleCircuit, "cnot-1-2", cnot)?);
    QheScheme::assemble(SchemeSpec::QotpPauliCnot { n }, n, 1 << (2 * n), enc, functions, dec)
}

/// Output bit `j` (0 = MSB) takes input bit `wires[j]`.
fn permute_wires(x: usize, wires: &[usize], n: usize) -> usize {
    let bit = |v: usize, i: usize| (v >> (n - 1 - i)) & 1;
    wires.iter().enumerate().fold(0, |acc, (j, &w)| acc | (bit(x, w) << (n - 1 - j)))
}

/// All permutations of `0..k` in lexicographic order.
fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..k).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot has a successor");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// Distinct first-wire truth tables in catalog order, with the index of the
/// first catalog entry producing each.
pub fn boolean_family_with_representatives(s: &QheScheme) -> Vec<(BitString, usize)> {
    let mut out: Vec<(BitString, usize)> = Vec::new();
    for (k, e) in s.catalog.iter().enumerate() {
        let t = e.function.truth_table();
        if !out.iter().any(|(u, _)| u == t) {
            out.push((t.clone(), k));
        }
    }
    out
}

pub fn boolean_family(s: &QheScheme) -> Vec<BitString> {
    boolean_family_with_representatives(s).into_iter().map(|(t, _)| t).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectnessWitness {
    pub plaintext: BitString,
    pub function: String,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectnessReport {
    pub pass: bool,
    /// Smallest decryption fidelity seen.
    pub min_fidelity: f64,
    /// First failing `(x, f)` in plaintext-major order.
    pub witness: Option<CorrectnessWitness>,
}

/// Exhaustive check that `dec(eval_f(enc(x)))` is `|f(x)>` for every basis
/// plaintext and catalog entry.
pub fn check_correctness(s: &QheScheme) -> Result<CorrectnessReport> {
    let d = 1usize << s.n;
    let cases: Vec<(usize, usize)> = (0..d).flat_map(|x| (0..s.catalog.len()).map(move |f| (x, f))).collect();
    let fids = par::map(&cases, |&(x, f)| {
        let psi = s.enc.column(x).into_owned();
        let probs = s.decrypt_distribution(&s.evaluate_branches(f, &psi));
        probs[s.catalog[f].function.apply(x)]
    });
    let min_fidelity = fids.iter().copied().fold(1.0, f64::min);
    let witness = cases.iter().zip(&fids).find(|(_, &fid)| fid < 1.0 - CORRECTNESS_TOL).map(|(&(x, f), &fid)| {
        CorrectnessWitness {
            plaintext: BitString::from_index(x, s.n),
            function: s.catalog[f].function.label().to_string(),
            fidelity: fid,
        }
    });
    Ok(CorrectnessReport { pass: witness.is_none(), min_fidelity, witness })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDistance {
    pub x: BitString,
    pub y: BitString,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub epsilon: f64,
    pub argmax: (BitString, BitString),
    pub pairs: Vec<PairDistance>,
}

/// Reduced ciphertext state `Tr_K enc(x)`.
pub fn ciphertext_state(s: &QheScheme, x: &BitString) -> Result<DensityMatrix> {
    encrypt(s, x)?.reduced(&[1])
}

/// Exhaustive maximum of the ciphertext trace distance over pairs of
/// distinct classical plaintexts.
pub fn audit_security(s: &QheScheme) -> Result<SecurityReport> {
    let d = 1usize << s.n;
    let states = (0..d)
        .map(|x| ciphertext_state(s, &BitString::from_index(x, s.n)))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|x| (x + 1..d).map(move |y| (x, y))).collect();
    let distances = par::map(&pairs, |&(x, y)| trace_distance(&states[x], &states[y]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<PairDistance> = pairs
        .iter()
        .zip(distances)
        .map(|(&(x, y), distance)| PairDistance {
            x: BitString::from_index(x, s.n),
            y: BitString::from_index(y, s.n),
            distance,
        })
        .collect();
    let best = pairs
        .iter()
        .fold(&pairs[0], |b, p| if p.distance > b.distance { p } else { b });
    Ok(SecurityReport { epsilon: best.distance, argmax: (best.x.clone(), best.y.clone()), pairs: pairs.clone() })
}
