//! Executes scenarios against the core library.

use std::time::Instant;

use qhe_limits::bits::BitString;
use qhe_limits::bounds::{self, BoundMode};
use qhe_limits::qhe::{self, SchemeSpec};
use qhe_limits::qrac::{self, QracInstance};
use qhe_limits::reduction;
use qhe_limits::{par, Error};

use crate::error::CliError;
use crate::report::{write_atomic, ReportRow};
use crate::scenario::{CodeSource, Scenario, ScenarioFile, Task};

/// Defaults for scenarios that leave `mode` or `seed` unset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub mode: BoundMode,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { mode: BoundMode::Rigorous, seed: 0 }
    }
}

const DEFAULT_SEESAW_ITERATIONS: usize = 200;
const SEESAW_CHUNK: usize = 8;

struct Ctx<'a> {
    id: &'a str,
    mode: BoundMode,
    seed: u64,
    started: Instant,
    budget: Option<f64>,
    rows: Vec<ReportRow>,
}

impl Ctx<'_> {
    fn value(&mut self, q: &str, v: f64) {
        self.rows.push(ReportRow::value(self.id, q, v, self.mode));
    }

    fn at_least(&mut self, q: &str, v: f64, bound: f64) {
        self.rows.push(ReportRow::at_least(self.id, q, v, bound, self.mode));
    }

    fn at_most(&mut self, q: &str, v: f64, bound: f64) {
        self.rows.push(ReportRow::at_most(self.id, q, v, bound, self.mode));
    }

    fn recorded(&mut self, q: &str, v: f64, bound: f64, slack: f64) {
        self.rows.push(ReportRow::recorded(self.id, q, v, bound, slack, self.mode));
    }

    fn flag(&mut self, q: &str, ok: bool) {
        self.rows.push(ReportRow::flag(self.id, q, ok, self.mode));
    }

    fn over_budget(&self) -> bool {
        self.budget.is_some_and(|b| self.started.elapsed().as_secs_f64() > b)
    }
}

/// Runs one scenario. Output depends only on the scenario and `opts`.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<Vec<ReportRow>, CliError> {
    let mut ctx = Ctx {
        id: &s.id,
        mode: s.mode.unwrap_or(opts.mode),
        seed: s.seed.unwrap_or(opts.seed),
        started: Instant::now(),
        budget: s.budget_seconds,
        rows: Vec::new(),
    };
    dispatch(&s.task, &mut ctx).map_err(|source| CliError::Scenario { id: s.id.clone(), source })?;
    if ctx.over_budget() {
        ctx.flag("runtime_within_budget", false);
    }
    Ok(ctx.rows)
}

/// Runs every scenario (concurrently with the `parallel` feature) and
/// concatenates the rows in file order. The first failing scenario in file
/// order determines the error.
pub fn run_all(file: &ScenarioFile, opts: &RunOptions) -> Result<Vec<ReportRow>, CliError> {
    let mut rows = Vec::new();
    for r in par::map(&file.scenarios, |s| run_scenario(s, opts)) {
        rows.extend(r?);
    }
    Ok(rows)
}

fn dispatch(task: &Task, ctx: &mut Ctx) -> qhe_limits::Result<()> {
    match task {
        Task::Bounds { n, p, family_size, epsilon, corollary } => {
            run_bounds(ctx, *n, *p, *family_size, *epsilon, corollary.as_deref())
        }
        Task::Count { n } => {
            let c = bounds::reversible_count_bits(*n)?;
            ctx.value("reversible_count_bits", c.exact);
            ctx.value("reversible_count_asymptotic", c.asymptotic);
            ctx.value("reversible_count_ratio", c.exact / c.asymptotic);
            Ok(())
        }
        Task::QracOptimize { n, m, runs, iterations, family } => {
            run_qrac_optimize(ctx, *n, *m, *runs, *iterations, family.as_deref())
        }
        Task::QheAudit { scheme, n, delta } => run_audit(ctx, SchemeSpec::from_name(scheme, *n, *delta)?),
        Task::Reduce { scheme, n, delta, base, chain_out } => {
            let spec = SchemeSpec::from_name(scheme, *n, *delta)?;
            run_reduce(ctx, spec, base.as_deref(), chain_out.as_deref())
        }
        Task::TraceLemma { code, n, m, iterations } => run_trace(ctx, *code, *n, *m, *iterations),
    }
}

fn run_bounds(
    ctx: &mut Ctx,
    n: usize,
    p: Option<f64>,
    family_size: Option<u64>,
    epsilon: Option<f64>,
    corollary: Option<&[usize]>,
) -> qhe_limits::Result<()> {
    if p.is_none() && epsilon.is_none() && corollary.is_none() {
        return Err(Error::InvalidArgument("bounds needs p, epsilon or corollary".into()));
    }
    if let Some(p) = p {
        ctx.value("binary_entropy", bounds::binary_entropy(p)?);
        ctx.value("nayak_bound", bounds::nayak_bound(n, p)?);
        if let Some(f) = family_size {
            ctx.value("subset_bound", bounds::subset_bound(f, n, p)?);
        }
    }
    if let Some(eps) = epsilon {
        ctx.value("security_entropy", bounds::security_entropy(eps, ctx.mode)?);
        let b = match family_size {
            Some(f) => bounds::qhe_comm_bound(f, n, eps, ctx.mode)?,
            None => bounds::qhe_comm_bound_log(2f64.powi(n as i32), n, eps, ctx.mode)?,
        };
        ctx.value("qhe_comm_bound", b);
    }
    if let Some(ns) = corollary {
        let points = reduction::corollary_scan(ns, ctx.mode)?;
        for pt in &points {
            ctx.value(&format!("corollary_correction_n{}", pt.n), pt.correction);
            ctx.value(&format!("corollary_bound_n{}", pt.n), pt.bound);
        }
        ctx.flag("corollary_correction_strictly_decreasing", reduction::correction_strictly_decreasing(&points));
    }
    Ok(())
}

fn parse_family(n: usize, family: Option<&[String]>) -> qhe_limits::Result<Vec<BitString>> {
    match family {
        None => Ok(BitString::all(n)),
        Some(list) => list.iter().map(|s| s.parse()).collect(),
    }
}

fn run_qrac_optimize(
    ctx: &mut Ctx,
    n: usize,
    m: usize,
    runs: usize,
    iterations: usize,
    family: Option<&[String]>,
) -> qhe_limits::Result<()> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    let strings = parse_family(n, family)?;
    let seeds: Vec<u64> = (0..runs as u64).map(|i| ctx.seed.wrapping_add(i)).collect();
    let mut all = Vec::with_capacity(runs);
    for chunk in seeds.chunks(SEESAW_CHUNK) {
        all.extend(qrac::seesaw_sweep(n, m, &strings, iterations, chunk)?);
        if ctx.over_budget() {
            break;
        }
    }
    let best_avg = all.iter().map(|r| r.table.average).fold(0.0, f64::max);
    let best = all
        .iter()
        .fold(&all[0], |b, r| if r.table.worst > b.table.worst { r } else { b });
    let p = best.table.worst;
    let log_f = (strings.len() as f64).log2();
    let h_needed = ((log_f - m as f64) / n as f64).max(0.0);
    let cap = bounds::binary_entropy_inverse_upper(h_needed)?;
    ctx.value("runs_completed", all.len() as f64);
    if all.len() < runs {
        ctx.flag("partial_result", false);
    }
    ctx.value("best_average_success", best_avg);
    ctx.value("best_seed", best.seed as f64);
    ctx.at_most("best_worst_success", p, cap);
    let bound = if p >= 0.5 { bounds::subset_bound(strings.len() as u64, n, p)? } else { 0.0 };
    ctx.at_least("qubits_vs_subset_bound", m as f64, bound);
    Ok(())
}

fn run_audit(ctx: &mut Ctx, spec: SchemeSpec) -> qhe_limits::Result<()> {
    let s = spec.build()?;
    let sec = qhe::audit_security(&s)?;
    let cor = qhe::check_correctness(&s)?;
    ctx.value("epsilon", sec.epsilon);
    ctx.at_least("correctness_min_fidelity", cor.min_fidelity, 1.0 - qhe::CORRECTNESS_TOL);
    ctx.at_most("isometry_defect", s.isometry_defect(), 1e-10);
    ctx.at_most("channel_defect", s.channel_defect(), 1e-10);
    ctx.value("key_qubits", s.key_qubits() as f64);
    ctx.value("ciphertext_qubits", s.ciphertext_qubits() as f64);
    ctx.value("catalog_size", s.catalog().len() as f64);
    ctx.value("family_size", qhe::boolean_family(&s).len() as f64);
    Ok(())
}

fn run_reduce(ctx: &mut Ctx, spec: SchemeSpec, base: Option<&str>, chain_out: Option<&std::path::Path>) -> qhe_limits::Result<()> {
    let s = spec.build()?;
    let base = match base {
        Some(b) => b.parse()?,
        None => BitString::zeros(s.n()),
    };
    let r = reduction::extract_qrac(&s, &base)?;
    let eps = r.epsilon;
    let perfect = eps <= reduction::PERFECT_SECURITY_TOL;
    ctx.value("epsilon", eps);
    ctx.value("family_size", r.family_size() as f64);
    ctx.at_least("worst_success", r.worst_success, 1.0 - eps);
    ctx.at_most("code_qubits", r.instance.m() as f64, r.communication_qubits as f64);
    for b in reduction::verify_reduction(&r, ctx.mode)? {
        let q = match b.name.as_str() {
            "perfect_security_bound" => "communication_vs_log_family",
            _ => "communication_qubits",
        };
        ctx.at_least(q, b.measured, b.bound);
    }
    ctx.value("max_alignment_residual", r.max_residual());
    for c in &r.chain {
        let q = format!("chain_step_{}", c.step);
        if c.budget == 0.0 || perfect {
            ctx.at_most(&q, c.measured_distance, c.budget);
        } else {
            ctx.recorded(&q, c.measured_distance, c.budget, c.budget - c.measured_distance);
        }
    }
    ctx.value("in_fano_regime", if r.worst_success >= 0.5 { 1.0 } else { 0.0 });
    if let Some(path) = chain_out {
        write_atomic(path, &reduction::chain_csv(&r)).map_err(|e| Error::InvalidArgument(format!("chain output: {e}")))?;
    }
    Ok(())
}

fn trace_instance(ctx: &Ctx, code: CodeSource, n: Option<usize>, m: Option<usize>, iterations: Option<usize>) -> qhe_limits::Result<QracInstance> {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| Error::InvalidArgument(format!("{name} is required for this code")));
    match code {
        CodeSource::Known2to1 => qrac::known_qrac_2to1(),
        CodeSource::Known3to1 => qrac::known_qrac_3to1(),
        CodeSource::Computational => qrac::computational_qrac(need(n, "n")?),
        CodeSource::Seesaw => {
            let n = need(n, "n")?;
            let it = iterations.unwrap_or(DEFAULT_SEESAW_ITERATIONS);
            Ok(qrac::seesaw_optimize(n, need(m, "m")?, &BitString::all(n), it, ctx.seed)?.instance)
        }
    }
}

fn run_trace(ctx: &mut Ctx, code: CodeSource, n: Option<usize>, m: Option<usize>, iterations: Option<usize>) -> qhe_limits::Result<()> {
    let q = trace_instance(ctx, code, n, m, iterations)?;
    let t = qrac::trace_lemma(&q)?;
    ctx.value("worst_success", t.chain.worst_success);
    ctx.value("in_fano_regime", if t.in_regime { 1.0 } else { 0.0 });
    let names = ["chain_capacity", "chain_entropy_holevo", "chain_holevo_fano", "chain_fano_bound"];
    if t.in_regime {
        ctx.at_least("qubits_vs_subset_bound", t.chain.m, t.chain.bound);
        if !t.records.is_empty() {
            ctx.at_least("min_holevo_step_slack", t.min_holevo_slack(), 0.0);
            ctx.at_least("min_fano_step_slack", t.min_fano_slack(), 0.0);
        }
        for (name, s) in names.iter().zip(t.chain_slacks) {
            ctx.at_least(name, s, 0.0);
        }
    } else {
        ctx.recorded("qubits_vs_subset_bound", t.chain.m, t.chain.bound, t.final_slack);
        for (name, s) in names.iter().zip(t.chain_slacks) {
            ctx.recorded(name, s, 0.0, s);
        }
    }
    Ok(())
}
