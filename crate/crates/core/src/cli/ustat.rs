use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use super::{cell, num, csv_writer, finish_csv, list_f64, list_usize, merge_fields, required, to_json, CliResult, Output, Values};
use crate::combinatorics::binomial;
use crate::ensembles::{sample_matrix, EnsembleSpec, Law, Normalization};
use crate::kernels::{Kernel, KernelId, SignMode, BoundedKernel, K_MAX_SIGNS};
use crate::linalg::Tolerances;
use crate::rng::SeedSpec;
use crate::ustat::{deviation_envelope, marginal_mean_mc_grid, ustat_exhaustive_grid, ustat_mc_grid, UStatResult, DEFAULT_ENUMERATION_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    /// Exhaustive when the subset count is within the cap, else Monte Carlo.
    Auto,
    Exhaustive,
    Montecarlo,
}

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UstatArgs {
    /// Entry law: gaussian, bernoulli or uniform [default: gaussian].
    #[arg(long)]
    pub law: Option<Law>,
    /// in_expectation or exact_unit_columns [default: in_expectation].
    #[arg(long)]
    pub normalization: Option<Normalization>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Block lengths, e.g. `100` or `25,100`. Smaller blocks use the
    /// leading columns of the largest matrix.
    #[arg(long)]
    pub n: Option<Values>,
    /// Subset size.
    #[arg(long)]
    pub k: Option<usize>,
    /// eigmax, eigmin, worstproj, smallproj or invproj.
    #[arg(long)]
    pub kernel: Option<KernelId>,
    /// Threshold grid, e.g. `0:2:0.05` or `0.5,1`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<Values>,
    /// A single threshold (overrides the grid).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// [default: auto]
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Monte Carlo subsets per block length [default: 20000].
    #[arg(long)]
    pub trials: Option<u64>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sample this many sign vectors instead of enumerating all `2^k`.
    #[arg(long)]
    pub sign_trials: Option<usize>,
    /// Largest subset count enumerated exhaustively [default: 2000000].
    #[arg(long)]
    pub cap: Option<u64>,
    /// Also estimate `p(a)` from fresh submatrices (rows with mode `marginal`).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub marginal: Option<bool>,
    /// Draws for the marginal estimate [default: same as --trials].
    #[arg(long)]
    pub marginal_trials: Option<u64>,
}

impl UstatArgs {
    pub(crate) fn merged(mut self, file: Option<Self>) -> Self {
        if let Some(f) = file {
            merge_fields!(self, f; law, normalization, m, n, k, kernel, grid, a, mode, trials, seed, sign_trials, cap, marginal, marginal_trials);
        }
        self
    }
}

#[derive(Debug, Clone, Serialize)]
struct UstatConfig {
    law: Law,
    normalization: Normalization,
    m: usize,
    n: Vec<usize>,
    k: usize,
    kernel: KernelId,
    grid: Vec<f64>,
    mode: ModeArg,
    trials: u64,
    seed: u64,
    sign_trials: Option<usize>,
    cap: u64,
    marginal: bool,
    marginal_trials: u64,
}

fn resolve(a: UstatArgs) -> CliResult<UstatConfig> {
    let grid = match (a.a, &a.grid) {
        (Some(x), _) => vec![x],
        (None, Some(g)) => list_f64(g, "grid")?,
        (None, None) => return Err(super::CliError::config("missing setting 'grid' (or a single --a)")),
    };
    let mut n = list_usize(&required(a.n, "n", "ustat")?, "n")?;
    n.sort_unstable();
    n.dedup();
    let trials = a.trials.unwrap_or(20_000);
    Ok(UstatConfig {
        law: a.law.unwrap_or(Law::Gaussian),
        normalization: a.normalization.unwrap_or_default(),
        m: required(a.m, "m", "ustat")?,
        n,
        k: required(a.k, "k", "ustat")?,
        kernel: required(a.kernel, "kernel", "ustat")?,
        grid,
        mode: a.mode.unwrap_or(ModeArg::Auto),
        trials,
        seed: a.seed.unwrap_or(0),
        sign_trials: a.sign_trials,
        cap: a.cap.unwrap_or(DEFAULT_ENUMERATION_CAP as u64),
        marginal: a.marginal.unwrap_or(false),
        marginal_trials: a.marginal_trials.unwrap_or(trials),
    })
}

fn kernel(c: &UstatConfig, seed: SeedSpec) -> CliResult<Kernel> {
    let signs = match c.sign_trials {
        Some(t) => SignMode::Sampled { trials: t, seed },
        None if c.kernel.uses_signs() && c.k > K_MAX_SIGNS => SignMode::Sampled { trials: 4096, seed },
        None => SignMode::Exhaustive,
    };
    Ok(Kernel::with_options(c.kernel, c.k, Tolerances::default(), signs)?)
}

pub(super) fn run(args: UstatArgs) -> CliResult<Output> {
    let c = resolve(args)?;
    if c.trials == 0 || c.marginal_trials == 0 {
        return Err(super::CliError::config("trials must be at least 1"));
    }
    let seed = SeedSpec::new(c.seed);
    let kern = kernel(&c, seed.child(2))?;
    let width = kern.width();
    let n_max = *c.n.last().expect("n is nonempty");
    let spec = EnsembleSpec::new(c.law, c.m, n_max).with_normalization(c.normalization);
    let phi = sample_matrix(&spec, seed.child(0))?;

    let mut w = csv_writer();
    w.write_record(["a", "estimate", "ci", "epsilon_n", "mode", "law", "m", "n", "k", "kernel"])?;
    let mut emit = |rows: &[UStatResult], mode: &str, n: usize| -> CliResult<()> {
        for r in rows {
            let eps = deviation_envelope(r.value.clamp(0.0, 1.0), n, width).ok().map(|d| d.epsilon_n);
            w.write_record([
                num(r.a),
                num(r.value),
                num(r.ci_halfwidth),
                cell(eps),
                mode.to_string(),
                c.law.name().to_string(),
                c.m.to_string(),
                n.to_string(),
                c.k.to_string(),
                c.kernel.name().to_string(),
            ])?;
        }
        Ok(())
    };

    for &n in &c.n {
        let sub = phi.columns(0, n).into_owned();
        let count = binomial(n as u64, width as u64).unwrap_or(u128::MAX);
        let exhaustive = match c.mode {
            ModeArg::Exhaustive => true,
            ModeArg::Montecarlo => false,
            ModeArg::Auto => count <= c.cap as u128,
        };
        let rows = if exhaustive {
            ustat_exhaustive_grid(&sub, &kern, &c.grid, c.cap as u128)?
        } else {
            ustat_mc_grid(&sub, &kern, &c.grid, c.trials, seed.child(1).child(n as u64))?
        };
        let mode = rows[0].mode.name();
        emit(&rows, mode, n)?;
    }
    if c.marginal {
        let rows = marginal_mean_mc_grid(&spec, &kern, &c.grid, c.marginal_trials, seed.child(3))?;
        for &n in &c.n {
            emit(&rows, "marginal", n)?;
        }
    }
    Ok(Output {
        csv: finish_csv(w)?,
        config: to_json(&c),
        seed: Some(seed),
        partial: false,
    })
}
