use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use super::{csv_writer, num, finish_csv, list_f64, list_usize, merge_fields, required, to_json, CliError, CliResult, Output, Values};
use crate::bounds::{rate, rate_constant, RateQuery, RateVariant, TailConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Simple,
    Full,
    Both,
}

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateArgs {
    /// Sparsity levels, e.g. `4` or `2:10:2`.
    #[arg(long)]
    pub k: Option<Values>,
    /// Block lengths, e.g. `3000` or `200:3000:100`.
    #[arg(long)]
    pub n: Option<Values>,
    /// Per-condition failure fractions `u` in (0, 1].
    #[arg(long)]
    pub u: Option<Values>,
    /// Recovered fractions `1 − 3u`; converted to `u` (alternative to --u).
    #[arg(long)]
    pub target_fraction: Option<Values>,
    /// The constant multiplying `k·ln((n−k)/u)` [default: 1.8, or the value
    /// implied by --a1 and --a2 when both are given].
    #[arg(long = "const", alias = "constant")]
    #[serde(alias = "const")]
    pub constant: Option<f64>,
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub a2: Option<f64>,
    /// Tail constant c₁ used with --a1/--a2 [default: 2].
    #[arg(long)]
    pub c1: Option<f64>,
    /// [default: full]
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
}

impl RateArgs {
    pub(crate) fn merged(mut self, file: Option<Self>) -> Self {
        if let Some(f) = file {
            merge_fields!(self, f; k, n, u, target_fraction, constant, a1, a2, c1, variant);
        }
        self
    }
}

#[derive(Debug, Clone, Serialize)]
struct RateConfig {
    k: Vec<usize>,
    n: Vec<usize>,
    u: Vec<f64>,
    constant: f64,
    variants: Vec<RateVariant>,
}

fn resolve(a: RateArgs) -> CliResult<RateConfig> {
    let u = match (&a.u, &a.target_fraction) {
        (Some(_), Some(_)) => return Err(CliError::config("give either u or target_fraction, not both")),
        (Some(u), None) => list_f64(u, "u")?,
        (None, Some(f)) => list_f64(f, "target_fraction")?.into_iter().map(|f| (1.0 - f) / 3.0).collect(),
        (None, None) => return Err(CliError::config("missing setting 'u' (or target_fraction)")),
    };
    let constant = match (a.constant, a.a1, a.a2) {
        (Some(c), _, _) => c,
        (None, Some(a1), Some(a2)) => rate_constant(a1, a2, &TailConstants::with_c1(a.c1.unwrap_or(2.0)))?,
        (None, None, None) => 1.8,
        _ => return Err(CliError::config("a1 and a2 must be given together")),
    };
    let variants = match a.variant.unwrap_or(VariantArg::Full) {
        VariantArg::Simple => vec![RateVariant::Simple],
        VariantArg::Full => vec![RateVariant::Full],
        VariantArg::Both => vec![RateVariant::Simple, RateVariant::Full],
    };
    Ok(RateConfig {
        k: list_usize(&required(a.k, "k", "rate")?, "k")?,
        n: list_usize(&required(a.n, "n", "rate")?, "n")?,
        u,
        constant,
        variants,
    })
}

pub(super) fn run(args: RateArgs) -> CliResult<Output> {
    let c = resolve(args)?;
    let mut w = csv_writer();
    w.write_record(["k", "n", "u", "const", "m_real", "m_rounded", "variant"])?;
    for &variant in &c.variants {
        for &u in &c.u {
            for &k in &c.k {
                for &n in &c.n {
                    let r = rate(&RateQuery { k, n, u, constant: c.constant, variant })?;
                    w.write_record([
                        k.to_string(),
                        n.to_string(),
                        num(u),
                        num(c.constant),
                        num(r.m_real),
                        r.m_rounded.to_string(),
                        variant.name().to_string(),
                    ])?;
                }
            }
        }
    }
    Ok(Output {
        csv: finish_csv(w)?,
        config: to_json(&c),
        seed: None,
        partial: false,
    })
}
