//! Quantum random access codes.
//!
//! An `(F, n, m, p)` code maps each string `x` of a subset `F` of `{0,1}^n`
//! to a state on `m` qubits, and comes with one binary POVM per bit position
//! such that `Tr(M_i^{x_i} rho_x) >= p` for every `x` in `F` and every `i`.
//!
//! [`trace_lemma`] replays the entropy argument bounding `m` on a concrete
//! instance: it splits `F` by prefixes, measures every Holevo and Fano step
//! and checks that each inequality holds with the instance's own decoders.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::bounds::{self, binary_entropy, von_neumann_entropy, SLACK_TOL};
use crate::qmat::{linalg, CMat, DensityMatrix, Povm, C64};
use crate::{par, Error, Result};

/// Qubit cap for optimisation.
pub const MAX_SEESAW_QUBITS: usize = 4;

const HELSTROM_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct QracInstance {
    n: usize,
    m: usize,
    strings: Vec<BitString>,
    encoder: Vec<DensityMatrix>,
    decoders: Vec<Povm>,
}

impl QracInstance {
    pub fn new(
        n: usize,
        m: usize,
        strings: Vec<BitString>,
        encoder: Vec<DensityMatrix>,
        decoders: Vec<Povm>,
    ) -> Result<Self> {
        if strings.is_empty() {
            return Err(Error::InvalidArgument("F is empty".into()));
        }
        if let Some(s) = strings.iter().find(|s| s.len() != n) {
            return Err(Error::InvalidArgument(format!("string {s} does not have length {n}")));
        }
        let mut sorted = strings.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != strings.len() {
            return Err(Error::InvalidArgument("F contains duplicates".into()));
        }
        if encoder.len() != strings.len() {
            return Err(Error::InvalidArgument(format!(
                "{} encoder states for {} strings",
                encoder.len(),
                strings.len()
            )));
        }
        if m >= usize::BITS as usize || encoder.iter().any(|s| s.dim() != 1 << m) {
            return Err(Error::DimensionMismatch(format!("encoder states must have dimension 2^{m}")));
        }
        let dims = encoder[0].dims();
        if encoder.iter().any(|s| s.dims() != dims) {
            return Err(Error::DimensionMismatch("encoder states differ in dims".into()));
        }
        if decoders.len() != n {
            return Err(Error::InvalidArgument(format!("{} decoders for {n} positions", decoders.len())));
        }
        if let Some(d) = decoders.iter().find(|d| d.len() != 2 || d.dims() != dims) {
            return Err(Error::InvalidPovm(format!(
                "decoder must be a 2-outcome POVM on {dims:?}, got {} outcomes on {:?}",
                d.len(),
                d.dims()
            )));
        }
        Ok(QracInstance { n, m, strings, encoder, decoders })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn strings(&self) -> &[BitString] {
        &self.strings
    }

    pub fn encoder(&self) -> &[DensityMatrix] {
        &self.encoder
    }

    pub fn decoders(&self) -> &[Povm] {
        &self.decoders
    }

    pub fn dims(&self) -> &[usize] {
        self.encoder[0].dims()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QracRepr {
    n: usize,
    m: usize,
    strings: Vec<BitString>,
    encoder: Vec<DensityMatrix>,
    decoders: Vec<Povm>,
}

impl<'de> Deserialize<'de> for QracInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = QracRepr::deserialize(d)?;
        QracInstance::new(r.n, r.m, r.strings, r.encoder, r.decoders).map_err(serde::de::Error::custom)
    }
}

/// Per-(string, position) success probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessTable {
    /// `probs[x][i] = Tr(M_i^{x_i} rho_x)`.
    pub probs: Vec<Vec<f64>>,
    pub worst: f64,
    pub average: f64,
}

pub fn success_matrix(q: &QracInstance) -> SuccessTable {
    let probs: Vec<Vec<f64>> = q
        .strings
        .iter()
        .zip(&q.encoder)
        .map(|(x, rho)| {
            q.decoders
                .iter()
                .enumerate()
                .map(|(i, d)| rho.expectation(&d.effects()[x.bit(i) as usize]).clamp(0.0, 1.0))
                .collect()
        })
        .collect();
    summarize(probs)
}

fn summarize(probs: Vec<Vec<f64>>) -> SuccessTable {
    let flat = probs.iter().flatten();
    let count = probs.len() * probs.first().map_or(0, Vec::len);
    let worst = flat.clone().copied().fold(f64::INFINITY, f64::min);
    let average = flat.sum::<f64>() / count.max(1) as f64;
    SuccessTable { probs, worst, average }
}

fn pauli(which: char) -> CMat {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    match which {
        'x' => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        'y' => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        'z' => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => unreachable!(),
    }
}

/// Single-qubit state with the given Bloch vector.
fn bloch_state(r: [f64; 3]) -> Result<DensityMatrix> {
    let mut mat = linalg::identity(2);
    for (k, axis) in ['x', 'y', 'z'].into_iter().enumerate() {
        mat += pauli(axis).scale(r[k]);
    }
    DensityMatrix::new(vec![2], mat.unscale(2.0))
}

/// Outcome 0 is the `+1` eigenspace of the Pauli on `axis`.
fn pauli_decoder(axis: char) -> Result<Povm> {
    Povm::binary(vec![2], (linalg::identity(2) + pauli(axis)).unscale(2.0))
}

fn sign(b: bool) -> f64 {
    if b {
        -1.0
    } else {
        1.0
    }
}

/// Two bits into one qubit: Bloch vectors `((-1)^{b1}, 0, (-1)^{b2}) / sqrt 2`
/// (the four X-Z plane directions at +-45 and +-135 degrees), bit 1 read in
/// the X basis, bit 2 in the Z basis.
pub fn known_qrac_2to1() -> Result<QracInstance> {
    let strings = BitString::all(2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let encoder = strings
        .iter()
        .map(|b| bloch_state([sign(b.bit(0)) * s, 0.0, sign(b.bit(1)) * s]))
        .collect::<Result<_>>()?;
    let decoders = vec![pauli_decoder('x')?, pauli_decoder('z')?];
    QracInstance::new(2, 1, strings, encoder, decoders)
}

/// Three bits into one qubit: the cube vertices `(+-1, +-1, +-1) / sqrt 3`,
/// bits read in the X, Y and Z bases.
pub fn known_qrac_3to1() -> Result<QracInstance> {
    let strings = BitString::all(3);
    let s = 1.0 / 3f64.sqrt();
    let encoder = strings
        .iter()
        .map(|b| bloch_state([sign(b.bit(0)) * s, sign(b.bit(1)) * s, sign(b.bit(2)) * s]))
        .collect::<Result<_>>()?;
    let decoders = vec![pauli_decoder('x')?, pauli_decoder('y')?, pauli_decoder('z')?];
    QracInstance::new(3, 1, strings, encoder, decoders)
}

/// `x -> |x>` on `n` qubits, each bit read off its own qubit.
pub fn computational_qrac(n: usize) -> Result<QracInstance> {
    computational_qrac_on(n, BitString::all(n))
}

pub fn computational_qrac_on(n: usize, strings: Vec<BitString>) -> Result<QracInstance> {
    let dims = vec![2; n];
    let encoder = strings
        .iter()
        .map(|x| DensityMatrix::basis(dims.clone(), x.index()))
        .collect::<Result<_>>()?;
    let decoders = (0..n)
        .map(|i| {
            let d = 1usize << n;
            let mut p0 = CMat::zeros(d, d);
            for k in (0..d).filter(|k| !BitString::from_index(*k, n).bit(i)) {
                p0[(k, k)] = C64::new(1.0, 0.0);
            }
            Povm::binary(dims.clone(), p0)
        })
        .collect::<Result<_>>()?;
    QracInstance::new(n, n, strings, encoder, decoders)
}

/// Equal-prior Helstrom measurement for `s0` vs `s1`; outcome 0 guesses
/// `s0`. Its success probability is `1/2 + T(s0, s1) / 2`.
pub fn helstrom_povm(s0: &DensityMatrix, s1: &DensityMatrix) -> Result<Povm> {
    helstrom_povm_weighted(s0, 1.0, s1, 1.0)
}

/// Helstrom measurement for priors proportional to `w0`, `w1`: outcome 0 is
/// the projector onto the positive part of `w0 s0 - w1 s1`.
pub fn helstrom_povm_weighted(s0: &DensityMatrix, w0: f64, s1: &DensityMatrix, w1: f64) -> Result<Povm> {
    if s0.dims() != s1.dims() {
        return Err(Error::DimensionMismatch(format!(
            "Helstrom between {:?} and {:?}",
            s0.dims(),
            s1.dims()
        )));
    }
    let gamma = s0.matrix().scale(w0) - s1.matrix().scale(w1);
    let p0 = linalg::positive_projector(&gamma, HELSTROM_THRESHOLD);
    let p1 = linalg::identity(s0.dim()) - &p0;
    Ok(Povm::from_parts(s0.dims().to_vec(), vec![p0, p1]))
}

/// Per-position Helstrom decoders for an encoder table.
///
/// Position `i` discriminates `sum_{x_i = 0} rho_x` from
/// `sum_{x_i = 1} rho_x`, i.e. the two conditional mixtures weighted by how
/// many strings of `F` carry each bit value. This maximises the average
/// success over `F`. A position whose bit is constant across `F` gets the
/// trivial POVM that always answers that bit.
pub fn optimal_decoders(encoder: &[DensityMatrix], strings: &[BitString]) -> Result<Vec<Povm>> {
    let first = strings.first().ok_or_else(|| Error::InvalidArgument("F is empty".into()))?;
    if encoder.len() != strings.len() {
        return Err(Error::InvalidArgument("encoder and F differ in length".into()));
    }
    let dims = encoder[0].dims().to_vec();
    let d = encoder[0].dim();
    (0..first.len())
        .map(|i| {
            let mut sums = [CMat::zeros(d, d), CMat::zeros(d, d)];
            let mut counts = [0usize; 2];
            for (x, rho) in strings.iter().zip(encoder) {
                let b = x.bit(i) as usize;
                sums[b] += rho.matrix();
                counts[b] += 1;
            }
            match counts {
                [0, _] => Povm::constant(dims.clone(), 1, 2),
                [_, 0] => Povm::constant(dims.clone(), 0, 2),
                _ => {
                    let p0 = linalg::positive_projector(&(&sums[0] - &sums[1]), HELSTROM_THRESHOLD);
                    let p1 = linalg::identity(d) - &p0;
                    Ok(Povm::from_parts(dims.clone(), vec![p0, p1]))
                }
            }
        })
        .collect()
}

/// Result of one seeded seesaw run.
#[derive(Debug, Clone)]
pub struct SeesawRun {
    pub seed: u64,
    pub instance: QracInstance,
    /// Average success after every half-step (decoder update, then encoder
    /// update), starting with the optimal decoders for the random initial
    /// encoder. Nondecreasing.
    pub history: Vec<f64>,
    pub table: SuccessTable,
}

/// Alternating maximisation of the average success over `F`.
///
/// Starts from Haar-random pure encoder states drawn from a ChaCha8 stream
/// seeded with `seed`, then alternates (a) Helstrom decoders for the current
/// encoder and (b) each encoder state set to the top eigenvector of
/// `sum_i M_i^{x_i}`. Each half-step is optimal given the other half, so the
/// objective never decreases. Stops after `iterations` rounds or once a round
/// improves by less than `1e-14`.
pub fn seesaw_optimize(n: usize, m: usize, strings: &[BitString], iterations: usize, seed: u64) -> Result<SeesawRun> {
    if m > MAX_SEESAW_QUBITS {
        return Err(Error::DimensionCap { dim: 1 << m, cap: 1 << MAX_SEESAW_QUBITS });
    }
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("n and m must be at least 1".into()));
    }
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be at least 1".into()));
    }
    if strings.is_empty() || strings.iter().any(|s| s.len() != n) {
        return Err(Error::InvalidArgument(format!("F must be a nonempty set of length-{n} strings")));
    }
    let dims = vec![2; m];
    let d = 1usize << m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut encoder: Vec<DensityMatrix> = strings
        .iter()
        .map(|_| DensityMatrix::from_parts(dims.clone(), linalg::outer(&linalg::random_unit_vector(&mut rng, d))))
        .collect();
    let average = |enc: &[DensityMatrix], dec: &[Povm]| -> f64 {
        let total: f64 = strings
            .iter()
            .zip(enc)
            .map(|(x, rho)| {
                dec.iter()
                    .enumerate()
                    .map(|(i, p)| rho.expectation(&p.effects()[x.bit(i) as usize]))
                    .sum::<f64>()
            })
            .sum();
        total / (strings.len() * n) as f64
    };

    let mut decoders = optimal_decoders(&encoder, strings)?;
    let mut history = vec![average(&encoder, &decoders)];
    for _ in 0..iterations {
        let before = *history.last().expect("nonempty");
        encoder = strings
            .iter()
            .map(|x| {
                let mut op = CMat::zeros(d, d);
                for (i, p) in decoders.iter().enumerate() {
                    op += &p.effects()[x.bit(i) as usize];
                }
                DensityMatrix::from_parts(dims.clone(), linalg::outer(&linalg::top_eigenvector(&op)))
            })
            .collect();
        history.push(average(&encoder, &decoders));
        decoders = optimal_decoders(&encoder, strings)?;
        history.push(average(&encoder, &decoders));
        if history.last().expect("nonempty") - before < 1e-14 {
            break;
        }
    }
    let instance = QracInstance::new(n, m, strings.to_vec(), encoder, decoders)?;
    let table = success_matrix(&instance);
    Ok(SeesawRun { seed, instance, history, table })
}

/// Runs [`seesaw_optimize`] once per seed (in parallel with the `parallel`
/// feature) and returns every run in seed order.
pub fn seesaw_sweep(n: usize, m: usize, strings: &[BitString], iterations: usize, seeds: &[u64]) -> Result<Vec<SeesawRun>> {
    par::map(seeds, |&s| seesaw_optimize(n, m, strings, iterations, s))
        .into_iter()
        .collect()
}

/// Index of the run with the highest average success (first on ties).
pub fn best_run(runs: &[SeesawRun]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, r) in runs.iter().enumerate() {
        if best.is_none_or(|b| r.table.average > runs[b].table.average) {
            best = Some(k);
        }
    }
    best
}

/// Measured quantities for one prefix `x` whose extensions `x0` and `x1`
/// both occur in `F`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrefixRecord {
    pub prefix: String,
    /// `|F_x|`.
    pub count: usize,
    /// `|F_{x0}| / |F_x|` and `|F_{x1}| / |F_x|`.
    pub weights: [f64; 2],
    /// `S(sigma_x)`.
    pub entropy: f64,
    /// `S(sigma_{x0})`, `S(sigma_{x1})`.
    pub child_entropies: [f64; 2],
    /// `I(X^x : Y^x)` for the next bit read by the decoder at position `|x|+1`.
    pub mutual_information: f64,
    /// Error of that decoder on the prefix-conditioned ensemble.
    pub error: f64,
    /// `S(sigma_x) - w0 S(sigma_x0) - w1 S(sigma_x1) - I`.
    pub holevo_slack: f64,
    /// `I - (H(w0) - H(error))`.
    pub fano_slack: f64,
}

/// The aggregated chain `m >= S(sigma) >= holevo >= fano >= log|F| - n H(p)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainValues {
    pub m: f64,
    /// `S(sigma)` for the uniform mixture over `F`.
    pub entropy: f64,
    /// `avg_y S(rho_y) + sum_x |F_x|/|F| I(X^x:Y^x)`.
    pub holevo: f64,
    /// `sum_x |F_x|/|F| (H(w0_x) - H(error_x))`.
    pub fano: f64,
    /// `log|F| - n H(p)` with `p` the worst-case success.
    pub bound: f64,
    pub log_f: f64,
    pub worst_success: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceReport {
    pub records: Vec<PrefixRecord>,
    pub chain: ChainValues,
    /// Slacks of the four aggregate steps, in chain order.
    pub chain_slacks: [f64; 4],
    /// `m - (log|F| - n H(p))`.
    pub final_slack: f64,
    /// Worst-case success is at least 1/2.
    pub in_regime: bool,
    /// `None` when out of regime.
    pub pass: Option<bool>,
}

impl TraceReport {
    pub fn min_holevo_slack(&self) -> f64 {
        self.records.iter().map(|r| r.holevo_slack).fold(f64::INFINITY, f64::min)
    }

    pub fn min_fano_slack(&self) -> f64 {
        self.records.iter().map(|r| r.fano_slack).fold(f64::INFINITY, f64::min)
    }
}

/// Numerically replays the subset-bound entropy chain on `q`.
///
/// For each prefix `x` with both `F_{x0}` and `F_{x1}` nonempty, `Y^x` is the
/// outcome of the instance's decoder at position `|x|+1` applied to the
/// prefix-conditioned ensemble `{w_b, sigma_{xb}}`; the Holevo step and the
/// Fano step (with the measured conditional error) are checked separately.
/// Prefixes with a single extension contribute nothing to either sum.
pub fn trace_lemma(q: &QracInstance) -> Result<TraceReport> {
    let table = success_matrix(q);
    let p = table.worst;
    let total = q.strings.len() as f64;
    let d = q.encoder[0].dim();
    let dims = q.dims().to_vec();

    let mixture = |members: &[usize]| -> DensityMatrix {
        let mut mat = CMat::zeros(d, d);
        for &k in members {
            mat += q.encoder[k].matrix();
        }
        DensityMatrix::from_parts(dims.clone(), mat.unscale(members.len() as f64))
    };

    let mut records = Vec::new();
    // breadth-first over prefixes that occur in F
    let mut level: Vec<(Vec<bool>, Vec<usize>)> = vec![(Vec::new(), (0..q.strings.len()).collect())];
    for k in 0..q.n {
        let mut next = Vec::new();
        for (prefix, members) in level {
            let split: [Vec<usize>; 2] = [
                members.iter().copied().filter(|&j| !q.strings[j].bit(k)).collect(),
                members.iter().copied().filter(|&j| q.strings[j].bit(k)).collect(),
            ];
            if !split[0].is_empty() && !split[1].is_empty() {
                records.push(prefix_record(q, k, &prefix, &members, &split, &mixture)?);
            }
            for (b, part) in split.into_iter().enumerate() {
                if !part.is_empty() {
                    let mut p2 = prefix.clone();
                    p2.push(b == 1);
                    next.push((p2, part));
                }
            }
        }
        level = next;
    }

    let all: Vec<usize> = (0..q.strings.len()).collect();
    let entropy = von_neumann_entropy(&mixture(&all))?;
    let mut singles = 0.0;
    for rho in &q.encoder {
        singles += von_neumann_entropy(rho)?;
    }
    singles /= total;
    let weight = |r: &PrefixRecord| r.count as f64 / total;
    let holevo = singles + records.iter().map(|r| weight(r) * r.mutual_information).sum::<f64>();
    let mut fano = 0.0;
    for r in &records {
        fano += weight(r) * (binary_entropy(r.weights[0])? - binary_entropy(r.error)?);
    }
    let log_f = total.log2();
    let in_regime = p >= 0.5;
    let bound = log_f - q.n as f64 * binary_entropy(p)?;
    let m = q.m as f64;
    let chain_slacks = [m - entropy, entropy - holevo, holevo - fano, fano - bound];
    let final_slack = m - bound;
    let pass = in_regime.then(|| {
        records.iter().all(|r| r.holevo_slack >= -SLACK_TOL && r.fano_slack >= -SLACK_TOL)
            && chain_slacks.iter().all(|&s| s >= -SLACK_TOL)
            && final_slack >= -SLACK_TOL
    });
    Ok(TraceReport {
        records,
        chain: ChainValues { m, entropy, holevo, fano, bound, log_f, worst_success: p },
        chain_slacks,
        final_slack,
        in_regime,
        pass,
    })
}

fn prefix_record(
    q: &QracInstance,
    position: usize,
    prefix: &[bool],
    members: &[usize],
    split: &[Vec<usize>; 2],
    mixture: &dyn Fn(&[usize]) -> DensityMatrix,
) -> Result<PrefixRecord> {
    let count = members.len();
    let weights = [split[0].len() as f64 / count as f64, split[1].len() as f64 / count as f64];
    let sigma = mixture(members);
    let children = [mixture(&split[0]), mixture(&split[1])];
    let decoder = &q.decoders[position];
    let joint: Vec<Vec<f64>> = children
        .iter()
        .zip(weights)
        .map(|(c, w)| Ok(decoder.probabilities(c)?.into_iter().map(|v| w * v).collect()))
        .collect::<Result<_>>()?;
    let mutual_information = bounds::mutual_information(&joint);
    let error = (joint[0][1] + joint[1][0]).clamp(0.0, 1.0);
    let entropy = von_neumann_entropy(&sigma)?;
    let child_entropies = [von_neumann_entropy(&children[0])?, von_neumann_entropy(&children[1])?];
    let holevo_slack =
        entropy - weights[0] * child_entropies[0] - weights[1] * child_entropies[1] - mutual_information;
    let fano_slack = mutual_information - (binary_entropy(weights[0])? - binary_entropy(error)?);
    Ok(PrefixRecord {
        prefix: BitString::new(prefix.to_vec()).to_string(),
        count,
        weights,
        entropy,
        child_entropies,
        mutual_information,
        error,
        holevo_slack,
        fano_slack,
    })
}
