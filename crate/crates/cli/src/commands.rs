//! The four batch commands. Each returns a [`ResultRecord`]; rendering and
//! exit codes are left to the caller.

use std::collections::BTreeMap;
use std::time::Instant;

use mv_entropy::{
    classical_ks_oracle, entropy, entropy_sequence, join_entropy_rate, min_entropy_refinement, product_refine,
    refine::axis_lower_bound, transport_partition, transport_system, IsomorphismMap, LogBase, Rational, Scalar,
    SolveMode, SolverConfig,
};

use crate::config::{LoadedConfig, Numeric, System, SystemConfig};
use crate::error::{CliError, CliResult};
use crate::record::{digest, Mass, OutputValue, ResultRecord};

/// Slack for the consistency checks run on every result.
const SLACK: f64 = 1e-9;

/// Flags shared by all commands. `None` falls back to the config file, then
/// to the defaults (natural log, rational arithmetic).
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub log_base: Option<LogBase>,
    pub numeric: Option<Numeric>,
    pub tolerance: Option<f64>,
    pub mode: SolveMode,
    pub seed: u64,
    pub n_max: usize,
    pub max_cells: Option<usize>,
    pub max_combos: Option<u128>,
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            log_base: None,
            numeric: None,
            tolerance: None,
            mode: SolveMode::Auto,
            seed: 0,
            n_max: 4,
            max_cells: None,
            max_combos: None,
            timing: false,
        }
    }
}

impl RunOptions {
    pub fn solver(&self) -> SolverConfig {
        let defaults = SolverConfig::default();
        SolverConfig {
            mode: self.mode,
            seed: self.seed,
            max_cells_per_point: self.max_cells.unwrap_or(defaults.max_cells_per_point),
            max_combinations: self.max_combos.unwrap_or(defaults.max_combinations),
            ..defaults
        }
    }
}

/// Options after merging flags with a config file.
struct Resolved {
    base: LogBase,
    numeric: Numeric,
    tolerance: Option<f64>,
    solver: SolverConfig,
    started: Option<Instant>,
}

impl Resolved {
    fn new(opts: &RunOptions, cfg: &SystemConfig) -> CliResult<Self> {
        Ok(Resolved {
            base: match opts.log_base {
                Some(b) => b,
                None => cfg.log_base()?.unwrap_or_default(),
            },
            numeric: match opts.numeric {
                Some(n) => n,
                None => cfg.numeric()?.unwrap_or(Numeric::Rational),
            },
            tolerance: opts.tolerance,
            solver: opts.solver(),
            started: opts.timing.then(Instant::now),
        })
    }

    /// Everything that can change the result, in a fixed order.
    fn fingerprint(&self, command: &str, args: &[&str], n_max: Option<usize>) -> String {
        let s = &self.solver;
        format!(
            "{command}|{}|base={}|numeric={}|tol={:?}|mode={}|seed={}|cells={}|combos={}|bases={}|iters={}|cands={}|n_max={:?}",
            args.join(","),
            self.base.symbol(),
            self.numeric.name(),
            self.tolerance,
            s.mode.name(),
            s.seed,
            s.max_cells_per_point,
            s.max_combinations,
            s.max_bases,
            s.heuristic_iterations,
            s.heuristic_candidates,
            n_max,
        )
    }

    fn record(
        &self,
        command: &str,
        inputs_digest: String,
        outputs: BTreeMap<String, OutputValue>,
        certificates: Vec<String>,
    ) -> ResultRecord {
        ResultRecord {
            command: command.to_string(),
            inputs_digest,
            numeric: self.numeric.name().to_string(),
            log_base: self.base.symbol().to_string(),
            outputs,
            certificates,
            timing_ms: self.started.map(|t| t.elapsed().as_secs_f64() * 1e3),
        }
    }
}

fn per_step(values: &[f64]) -> Vec<f64> {
    values.iter().enumerate().map(|(i, v)| v / (i + 1) as f64).collect()
}

/// `H(A)` and the state of every element of `A`.
pub fn cmd_entropy(cfg: &LoadedConfig, name: &str, opts: &RunOptions) -> CliResult<ResultRecord> {
    let r = Resolved::new(opts, &cfg.config)?;
    let digest = digest(&[&cfg.text, &r.fingerprint("entropy", &[name], None)]);
    let outputs = match r.numeric {
        Numeric::Rational => entropy_outputs(&cfg.config.build::<Rational>(r.tolerance)?, name, r.base),
        Numeric::Float => entropy_outputs(&cfg.config.build::<f64>(r.tolerance)?, name, r.base),
    }?;
    Ok(r.record("entropy", digest, outputs, Vec::new()))
}

fn entropy_outputs<S: Scalar>(sys: &System<S>, name: &str, base: LogBase) -> CliResult<BTreeMap<String, OutputValue>> {
    let a = sys.partition(name)?;
    let state = sys.dynamics.state();
    let h = entropy(a, state, base).map_err(CliError::from_compute)?;
    let masses = a.masses(state).map_err(CliError::from_compute)?;
    let mut out = BTreeMap::new();
    out.insert("entropy".into(), OutputValue::Entropy(h.value));
    out.insert(
        "masses".into(),
        OutputValue::Masses(masses.iter().map(Mass::of).collect()),
    );
    out.insert("crisp".into(), OutputValue::Flag(a.is_idempotent()));
    Ok(out)
}

/// Minimum-entropy common refinement of the named partitions.
pub fn cmd_refine(cfg: &LoadedConfig, names: &[String], opts: &RunOptions) -> CliResult<ResultRecord> {
    if names.is_empty() {
        return Err(CliError::Config("refine needs at least one partition name".into()));
    }
    let r = Resolved::new(opts, &cfg.config)?;
    let args: Vec<&str> = names.iter().map(String::as_str).collect();
    let digest = digest(&[&cfg.text, &r.fingerprint("refine", &args, None)]);
    let (outputs, certs) = match r.numeric {
        Numeric::Rational => refine_outputs(&cfg.config.build::<Rational>(r.tolerance)?, names, &r),
        Numeric::Float => refine_outputs(&cfg.config.build::<f64>(r.tolerance)?, names, &r),
    }?;
    Ok(r.record("refine", digest, outputs, certs))
}

fn refine_outputs<S: Scalar>(
    sys: &System<S>,
    names: &[String],
    r: &Resolved,
) -> CliResult<(BTreeMap<String, OutputValue>, Vec<String>)> {
    let parts = names
        .iter()
        .map(|n| sys.partition(n).cloned())
        .collect::<CliResult<Vec<_>>>()?;
    let state = sys.dynamics.state();
    let sol = min_entropy_refinement(&parts, state, r.base, &r.solver).map_err(CliError::from_compute)?;
    let lower = axis_lower_bound(&parts, state, r.base).map_err(CliError::from_compute)?;
    let product = product_refine(&parts)
        .and_then(|t| t.entropy(state, r.base))
        .map_err(CliError::from_compute)?
        .value;
    let h = sol.entropy.value;
    if h < lower - SLACK || h > product + SLACK {
        return Err(CliError::Invariant(format!(
            "refinement entropy {h} outside [{lower}, {product}]"
        )));
    }
    let masses = sol.tensor.masses(state).map_err(CliError::from_compute)?;
    let mut out = BTreeMap::new();
    out.insert("entropy".into(), OutputValue::Entropy(h));
    out.insert("lower_bound".into(), OutputValue::Entropy(lower));
    out.insert("product_entropy".into(), OutputValue::Entropy(product));
    out.insert(
        "shape".into(),
        OutputValue::Counts(sol.tensor.shape().iter().map(|&k| k as u64).collect()),
    );
    out.insert(
        "masses".into(),
        OutputValue::Masses(masses.iter().map(Mass::of).collect()),
    );
    if let Some(gap) = sol.bound_gap {
        out.insert("bound_gap".into(), OutputValue::Entropy(gap));
    }
    Ok((out, vec![sol.certificate.name().to_string()]))
}

/// `H_1..H_N`, the running infimum, the product-join sequence and, for
/// crisp partitions, the set-based join entropies.
pub fn cmd_dynamics(cfg: &LoadedConfig, name: &str, opts: &RunOptions) -> CliResult<ResultRecord> {
    if opts.n_max == 0 {
        return Err(CliError::Config("--n-max must be at least 1".into()));
    }
    let r = Resolved::new(opts, &cfg.config)?;
    let digest = digest(&[&cfg.text, &r.fingerprint("dynamics", &[name], Some(opts.n_max))]);
    let (outputs, certs) = match r.numeric {
        Numeric::Rational => dynamics_outputs(&cfg.config.build::<Rational>(r.tolerance)?, name, opts.n_max, &r),
        Numeric::Float => dynamics_outputs(&cfg.config.build::<f64>(r.tolerance)?, name, opts.n_max, &r),
    }?;
    Ok(r.record("dynamics", digest, outputs, certs))
}

fn dynamics_outputs<S: Scalar>(
    sys: &System<S>,
    name: &str,
    n_max: usize,
    r: &Resolved,
) -> CliResult<(BTreeMap<String, OutputValue>, Vec<String>)> {
    let a = sys.partition(name)?;
    let seq = entropy_sequence(&sys.dynamics, a, n_max, r.base, &r.solver).map_err(CliError::from_compute)?;
    let (h_bar, join) = join_entropy_rate(&sys.dynamics, a, n_max, r.base).map_err(CliError::from_compute)?;

    let below_join: Vec<bool> = seq
        .values
        .iter()
        .zip(&join.values)
        .map(|(h, j)| *h <= j + SLACK)
        .collect();
    if let Some(n) = below_join.iter().position(|ok| !ok) {
        return Err(CliError::Invariant(format!(
            "H_{} = {} exceeds the product join entropy {}",
            n + 1,
            seq.values[n],
            join.values[n]
        )));
    }

    let mut out = BTreeMap::new();
    if a.is_idempotent() {
        let classical = (1..=n_max)
            .map(|n| classical_ks_oracle(sys.space(), sys.dynamics.tau().map(), a, n, r.base))
            .collect::<mv_entropy::Result<Vec<f64>>>()
            .map_err(CliError::from_compute)?;
        if let Some(n) = (0..n_max).find(|&i| (classical[i] - seq.values[i]).abs() > SLACK) {
            return Err(CliError::Invariant(format!(
                "H_{} = {} differs from the classical join entropy {}",
                n + 1,
                seq.values[n],
                classical[n]
            )));
        }
        out.insert("classical_join".into(), OutputValue::Entropies(classical));
    }
    out.insert("h_n".into(), OutputValue::Entropies(seq.values.clone()));
    out.insert("h_n_per_step".into(), OutputValue::Entropies(seq.per_step.clone()));
    out.insert("running_inf".into(), OutputValue::Entropies(seq.running_inf.clone()));
    out.insert("h_estimate".into(), OutputValue::Entropy(seq.estimate()));
    out.insert("stabilized".into(), OutputValue::Flag(seq.is_stabilized()));
    out.insert("subadditivity_gaps".into(), OutputValue::Count(seq.gaps.len() as u64));
    out.insert("join_entropy".into(), OutputValue::Entropies(join.values.clone()));
    out.insert("join_per_step".into(), OutputValue::Entropies(join.per_step.clone()));
    out.insert("h_bar".into(), OutputValue::Entropy(h_bar));
    out.insert("infimum_le_join".into(), OutputValue::Flags(below_join));
    let certs = seq.certificates.iter().map(|c| c.name().to_string()).collect();
    Ok((out, certs))
}

/// Recomputes `H_n` on both sides of a relabeling and reports the deltas.
/// The partition is taken from the first config and carried across.
pub fn cmd_compare(
    first: &LoadedConfig,
    second: &LoadedConfig,
    bijection: &[usize],
    name: &str,
    opts: &RunOptions,
) -> CliResult<ResultRecord> {
    if opts.n_max == 0 {
        return Err(CliError::Config("--n-max must be at least 1".into()));
    }
    let r = Resolved::new(opts, &first.config)?;
    let bij: Vec<String> = bijection.iter().map(usize::to_string).collect();
    let fp = r.fingerprint("compare", &[name, &bij.join(" ")], Some(opts.n_max));
    let digest = digest(&[&first.text, &second.text, &fp]);
    let iso = IsomorphismMap::new(bijection.to_vec()).map_err(|e| CliError::Isomorphism(e.to_string()))?;
    let (outputs, certs) = match r.numeric {
        Numeric::Rational => compare_outputs::<Rational>(first, second, &iso, name, opts.n_max, &r),
        Numeric::Float => compare_outputs::<f64>(first, second, &iso, name, opts.n_max, &r),
    }?;
    Ok(r.record("compare", digest, outputs, certs))
}

fn compare_outputs<S: Scalar>(
    first: &LoadedConfig,
    second: &LoadedConfig,
    iso: &IsomorphismMap,
    name: &str,
    n_max: usize,
    r: &Resolved,
) -> CliResult<(BTreeMap<String, OutputValue>, Vec<String>)> {
    let one = first.config.build::<S>(r.tolerance)?;
    let two = second.config.build::<S>(r.tolerance)?;
    let iso_err = |e: mv_entropy::Error| CliError::Isomorphism(e.to_string());
    iso.validate(&one.dynamics, &two.dynamics).map_err(iso_err)?;
    let a = one.partition(name)?;
    let moved = transport_partition(a, iso, two.space()).map_err(iso_err)?;
    // The induced map must reproduce the second system exactly.
    let relabeled = transport_system(&one.dynamics, iso).map_err(iso_err)?;
    if relabeled.tau().map() != two.dynamics.tau().map() {
        return Err(CliError::Isomorphism(
            "relabeled map differs from the second system".into(),
        ));
    }

    let seq1 = entropy_sequence(&one.dynamics, a, n_max, r.base, &r.solver).map_err(CliError::from_compute)?;
    let seq2 = entropy_sequence(&two.dynamics, &moved, n_max, r.base, &r.solver).map_err(CliError::from_compute)?;
    let deltas: Vec<f64> = seq1.values.iter().zip(&seq2.values).map(|(x, y)| y - x).collect();
    let max_abs = deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));

    let mut out = BTreeMap::new();
    out.insert("h_n_first".into(), OutputValue::Entropies(seq1.values.clone()));
    out.insert("h_n_second".into(), OutputValue::Entropies(seq2.values.clone()));
    out.insert(
        "h_n_per_step_first".into(),
        OutputValue::Entropies(per_step(&seq1.values)),
    );
    out.insert("deltas".into(), OutputValue::Entropies(deltas));
    out.insert("max_abs_delta".into(), OutputValue::Entropy(max_abs));
    out.insert("h_estimate_first".into(), OutputValue::Entropy(seq1.estimate()));
    out.insert("h_estimate_second".into(), OutputValue::Entropy(seq2.estimate()));
    let certs = seq1
        .certificates
        .iter()
        .map(|c| format!("first:{c}"))
        .chain(seq2.certificates.iter().map(|c| format!("second:{c}")))
        .collect();
    Ok((out, certs))
}
