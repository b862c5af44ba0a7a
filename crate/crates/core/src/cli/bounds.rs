use std::collections::BTreeMap;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use super::{csv_writer, num, finish_csv, list_f64, merge_fields, required, to_json, CliError, CliResult, Output, Values};
use crate::bounds::{
    a3_lasso, hoeffding_sum_tail, lasso_lambda, lasso_magnitude_threshold, noise_condition_prob, noise_floor,
    proj_tail_bound, rate_constant, smax_tail_bound, smin_tail_bound, tau_k, wielandt_bound, Bound, TailConstants,
};
use crate::ensembles::Law;
use crate::reference::WORST_CASE_EIGENVALUES;
use crate::ustat::deviation_envelope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundOp {
    /// τ_k over k, a_max, a_min.
    TauK,
    /// Invertibility-projection threshold over k, a_min, a_max.
    Wielandt,
    /// Pr{|(A_S†A_ω)ᵀβ| > a} bound over m, k, a, delta, c1.
    ProjTail,
    /// Pr{σmin ≤ a1} bound over m, a1, c1.
    SminTail,
    /// Pr{σmax > a_max} bound over m, a_max, c1.
    SmaxTail,
    /// Weighted-sum tail over c_norm_sq, m, t.
    Hoeffding,
    /// Rate constant over a1, a2, c1.
    RateConstant,
    /// LASSO invertibility-projection constant over a1, k.
    A3Lasso,
    /// Probability both noise conditions hold, over n.
    NoiseProb,
    /// LASSO regularizer over sigma, a, n.
    Lambda,
    /// LASSO minimum-magnitude threshold over a1, a3, a, n, sigma.
    Threshold,
    /// Noise floor 1 − (1 − t)^k over k, t.
    Floor,
    /// Deviation envelope ε_n over p, n, k.
    Envelope,
    /// Published worst-case Gaussian eigenvalue bounds (static table).
    WorstCaseEig,
}

impl BoundOp {
    fn name(&self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }

    fn params(&self) -> &'static [&'static str] {
        match self {
            BoundOp::TauK => &["k", "a_max", "a_min"],
            BoundOp::Wielandt => &["k", "a_min", "a_max"],
            BoundOp::ProjTail => &["m", "k", "a", "delta", "c1"],
            BoundOp::SminTail => &["m", "a1", "c1"],
            BoundOp::SmaxTail => &["m", "a_max", "c1"],
            BoundOp::Hoeffding => &["c_norm_sq", "m", "t"],
            BoundOp::RateConstant => &["a1", "a2", "c1"],
            BoundOp::A3Lasso => &["a1", "k"],
            BoundOp::NoiseProb => &["n"],
            BoundOp::Lambda => &["sigma", "a", "n"],
            BoundOp::Threshold => &["a1", "a3", "a", "n", "sigma"],
            BoundOp::Floor => &["k", "t"],
            BoundOp::Envelope => &["p", "n", "k"],
            BoundOp::WorstCaseEig => &["k_over_m", "m_over_n"],
        }
    }
}

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub op: Option<BoundOp>,
    /// Sets the default c1: 2 for gaussian, 16 otherwise.
    #[arg(long)]
    pub law: Option<Law>,
    #[arg(long)]
    pub k: Option<Values>,
    #[arg(long)]
    pub m: Option<Values>,
    #[arg(long)]
    pub n: Option<Values>,
    #[arg(long)]
    pub a: Option<Values>,
    #[arg(long)]
    pub a1: Option<Values>,
    #[arg(long)]
    pub a2: Option<Values>,
    #[arg(long)]
    pub a3: Option<Values>,
    #[arg(long)]
    pub a_min: Option<Values>,
    #[arg(long)]
    pub a_max: Option<Values>,
    #[arg(long)]
    pub delta: Option<Values>,
    #[arg(long)]
    pub c1: Option<Values>,
    #[arg(long)]
    pub c_norm_sq: Option<Values>,
    #[arg(long)]
    pub t: Option<Values>,
    #[arg(long)]
    pub p: Option<Values>,
    #[arg(long)]
    pub sigma: Option<Values>,
    #[arg(long)]
    pub k_over_m: Option<Values>,
    #[arg(long)]
    pub m_over_n: Option<Values>,
}

impl BoundsArgs {
    pub(crate) fn merged(mut self, file: Option<Self>) -> Self {
        if let Some(f) = file {
            merge_fields!(self, f; op, law, k, m, n, a, a1, a2, a3, a_min, a_max, delta, c1, c_norm_sq, t, p, sigma,
                k_over_m, m_over_n);
        }
        self
    }

    fn raw(&self, name: &str) -> Option<&Values> {
        match name {
            "k" => self.k.as_ref(),
            "m" => self.m.as_ref(),
            "n" => self.n.as_ref(),
            "a" => self.a.as_ref(),
            "a1" => self.a1.as_ref(),
            "a2" => self.a2.as_ref(),
            "a3" => self.a3.as_ref(),
            "a_min" => self.a_min.as_ref(),
            "a_max" => self.a_max.as_ref(),
            "delta" => self.delta.as_ref(),
            "c1" => self.c1.as_ref(),
            "c_norm_sq" => self.c_norm_sq.as_ref(),
            "t" => self.t.as_ref(),
            "p" => self.p.as_ref(),
            "sigma" => self.sigma.as_ref(),
            "k_over_m" => self.k_over_m.as_ref(),
            "m_over_n" => self.m_over_n.as_ref(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct BoundsConfig {
    op: BoundOp,
    params: BTreeMap<String, Vec<f64>>,
}

fn count(v: f64, name: &str) -> CliResult<usize> {
    if v >= 0.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(CliError::config(format!("{name}={v} must be a nonnegative integer")))
    }
}

fn resolve(a: BoundsArgs) -> CliResult<BoundsConfig> {
    let op = required(a.op, "op", "bounds")?;
    let mut params = BTreeMap::new();
    for &name in op.params() {
        let vals = match (a.raw(name), name, op) {
            (Some(v), _, _) => list_f64(v, name)?,
            (None, "c1", _) => vec![TailConstants::for_law(a.law.unwrap_or(Law::Gaussian)).c1],
            // the static table is emitted whole unless filtered
            (None, _, BoundOp::WorstCaseEig) => continue,
            (None, _, _) => return Err(CliError::config(format!("op {} needs --{}", op.name(), name.replace('_', "-")))),
        };
        params.insert(name.to_string(), vals);
    }
    Ok(BoundsConfig { op, params })
}

/// `(value, vacuous)` for one parameter point.
fn eval(op: BoundOp, p: &BTreeMap<&str, f64>) -> CliResult<(f64, bool)> {
    let g = |k: &str| p[k];
    let int = |k: &str| count(p[k], k);
    let tc = || TailConstants::with_c1(g("c1"));
    let b = |r: crate::Result<Bound>| -> CliResult<(f64, bool)> { r.map(|b| (b.value, b.vacuous)).map_err(Into::into) };
    let plain = |r: crate::Result<f64>| -> CliResult<(f64, bool)> { r.map(|v| (v, false)).map_err(Into::into) };
    match op {
        BoundOp::TauK => plain(tau_k(g("a_max"), g("a_min"), int("k")?)),
        BoundOp::Wielandt => plain(wielandt_bound(int("k")?, g("a_min"), g("a_max"))),
        BoundOp::ProjTail => b(proj_tail_bound(int("m")?, int("k")?, g("a"), g("delta"), &tc())),
        BoundOp::SminTail => b(smin_tail_bound(int("m")?, g("a1"), &tc())),
        BoundOp::SmaxTail => b(smax_tail_bound(int("m")?, g("a_max"), &tc())),
        BoundOp::Hoeffding => b(hoeffding_sum_tail(g("c_norm_sq"), int("m")?, g("t"))),
        BoundOp::RateConstant => plain(rate_constant(g("a1"), g("a2"), &tc())),
        BoundOp::A3Lasso => plain(a3_lasso(g("a1"), int("k")?)),
        BoundOp::NoiseProb => plain(noise_condition_prob(int("n")?)),
        BoundOp::Lambda => plain(Ok(lasso_lambda(g("sigma"), g("a"), int("n")?))),
        BoundOp::Threshold => plain(lasso_magnitude_threshold(g("a1"), g("a3"), g("a"), int("n")?, g("sigma"))),
        BoundOp::Floor => plain(noise_floor(int("k")?, g("t"))),
        BoundOp::Envelope => {
            let e = deviation_envelope(g("p"), int("n")?, int("k")?)?;
            Ok((e.epsilon_n, false))
        }
        BoundOp::WorstCaseEig => unreachable!("tabulated separately"),
    }
}

fn worst_case_rows(w: &mut csv::Writer<Vec<u8>>, c: &BoundsConfig) -> CliResult<()> {
    w.write_record(["op", "k_over_m", "m_over_n", "bound", "value", "vacuous"])?;
    let keep = |name: &str, v: f64| c.params.get(name).is_none_or(|l| l.iter().any(|x| (x - v).abs() < 1e-9));
    for cell in WORST_CASE_EIGENVALUES.iter().filter(|e| keep("k_over_m", e.k_over_m) && keep("m_over_n", e.m_over_n)) {
        for (which, v) in [("sigma2_min", cell.sigma2_min), ("sigma2_max", cell.sigma2_max)] {
            w.write_record([c.op.name(), num(cell.k_over_m), num(cell.m_over_n), which.into(), num(v), "0".into()])?;
        }
    }
    Ok(())
}

pub(super) fn run(args: BoundsArgs) -> CliResult<Output> {
    let c = resolve(args)?;
    let mut w = csv_writer();
    if c.op == BoundOp::WorstCaseEig {
        worst_case_rows(&mut w, &c)?;
    } else {
        let names = c.op.params();
        let mut header = vec!["op"];
        header.extend(names);
        header.extend(["value", "vacuous"]);
        w.write_record(&header)?;
        let lists: Vec<&Vec<f64>> = names.iter().map(|n| &c.params[*n]).collect();
        // odometer over the Cartesian product, last parameter fastest
        let mut idx = vec![0usize; names.len()];
        'outer: loop {
            let point: BTreeMap<&str, f64> = names.iter().zip(&idx).zip(&lists).map(|((n, &i), l)| (*n, l[i])).collect();
            let (value, vacuous) = eval(c.op, &point)?;
            let mut rec = vec![c.op.name()];
            rec.extend(names.iter().map(|n| num(point[n])));
            rec.extend([num(value), (vacuous as u8).to_string()]);
            w.write_record(&rec)?;
            for d in (0..idx.len()).rev() {
                idx[d] += 1;
                if idx[d] < lists[d].len() {
                    continue 'outer;
                }
                idx[d] = 0;
            }
            break;
        }
    }
    Ok(Output {
        csv: finish_csv(w)?,
        config: to_json(&c),
        seed: None,
        partial: false,
    })
}
