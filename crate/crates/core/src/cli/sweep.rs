//! Parameter sweeps: one result row per value of the swept variable.

use std::path::PathBuf;

use rayon::prelude::*;

use super::config::KvConfig;
use super::range::{parse_count, parse_values, Values};
use super::report::{Format, Row, Table, Validity};
use crate::analytic::{
    csb_capacity_bound, delta_finite, delta_upper, direct_outage, epsilon_capacity_base,
    epsilon_capacity_ir, gamma_threshold, k_relay_capacities, k_relay_expected_phases,
    k_relay_outage_constant_csb, k_relay_outage_constant_ir, lemma1_constant,
    optimal_relay_distance, PhaseCountModel, DEFAULT_VALIDITY_THRESHOLD,
};
use crate::channel::{variances_from_geometry, ChannelVariances, NetworkGeometry, MAX_RELAYS};
use crate::simulator::{estimate_outage, simulate, McConfig, MonteCarlo, Protocol};
use crate::solver::{
    invert_capacity, optimize_placement, Asymptotic, CapacitySolution, EvaluatorKind, ExactOutage,
    MonteCarloOutage, OutageEvaluator, SolverOptions,
};
use crate::stats::Z_95;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Outage,
    Capacity,
    Placement,
    Delta,
    Phases,
    KRelay,
}

impl Command {
    /// The variable reported in the `param` column when nothing is swept.
    pub fn primary(self) -> Var {
        match self {
            Command::Outage | Command::Phases => Var::SnrDb,
            Command::Capacity => Var::Epsilon,
            Command::Placement => Var::Alpha,
            Command::Delta => Var::DSr,
            Command::KRelay => Var::K,
        }
    }

    fn quantities(self) -> &'static [Quantity] {
        use Quantity::*;
        match self {
            Command::Outage | Command::Placement => &[],
            Command::Capacity => &[Ir, Base, Csb],
            Command::Delta => &[Bound, Finite],
            Command::Phases => &[Phases, Throughput],
            Command::KRelay => &[IrRate, CsbRate, Outage, Phases],
        }
    }
}

/// Variables that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    DSr,
    Alpha,
    SnrDb,
    Epsilon,
    K,
}

impl Var {
    pub const ALL: [Var; 5] = [Var::DSr, Var::Alpha, Var::SnrDb, Var::Epsilon, Var::K];

    pub fn key(self) -> &'static str {
        match self {
            Var::DSr => "d_sr",
            Var::Alpha => "alpha",
            Var::SnrDb => "snr_db",
            Var::Epsilon => "epsilon",
            Var::K => "k",
        }
    }

    fn default_value(self) -> f64 {
        match self {
            Var::DSr => 0.5,
            Var::Alpha => 3.0,
            Var::SnrDb => -10.0,
            Var::Epsilon => 1e-3,
            Var::K => 1.0,
        }
    }
}

/// What a row reports, for commands that can report more than one thing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Δ upper bound as `gamma -> 0`.
    Bound,
    /// Δ at the configured SNR and epsilon.
    Finite,
    /// ε-outage capacity of repetition-coded DF.
    Base,
    /// ε-outage capacity of incremental relaying.
    Ir,
    /// Cut-set ε-outage capacity bound.
    Csb,
    Phases,
    Throughput,
    IrRate,
    CsbRate,
    Outage,
}

impl Quantity {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "bound" => Quantity::Bound,
            "finite" => Quantity::Finite,
            "base" => Quantity::Base,
            "ir" => Quantity::Ir,
            "csb" => Quantity::Csb,
            "phases" => Quantity::Phases,
            "throughput" => Quantity::Throughput,
            "ir_rate" => Quantity::IrRate,
            "csb_rate" => Quantity::CsbRate,
            "outage" => Quantity::Outage,
            _ => return Err(Error::Config(format!("unknown quantity `{s}`"))),
        })
    }
}

fn parse_protocol(s: &str) -> Result<Protocol> {
    match s {
        "ir" => Ok(Protocol::Ir),
        "csb" => Ok(Protocol::Csb),
        "bound" => Ok(Protocol::Bound),
        _ => Err(Error::Config(format!(
            "unknown protocol `{s}` (ir|csb|bound)"
        ))),
    }
}

fn parse_evaluator(s: &str) -> Result<EvaluatorKind> {
    match s {
        "exact" => Ok(EvaluatorKind::Exact),
        "asymptotic" => Ok(EvaluatorKind::Asymptotic),
        "mc" => Ok(EvaluatorKind::MonteCarlo),
        _ => Err(Error::Config(format!(
            "unknown evaluator `{s}` (exact|asymptotic|mc)"
        ))),
    }
}

/// Keys understood in config files and on the command line.
pub const KNOWN_KEYS: &[&str] = &[
    "d_sr",
    "alpha",
    "snr_db",
    "epsilon",
    "k",
    "rate",
    "sigma2_sd",
    "sigma2_sr",
    "sigma2_rd",
    "protocol",
    "quantity",
    "evaluator",
    "trials",
    "max_trials",
    "seed",
    "tol",
    "validity_threshold",
    "format",
    "out",
];

/// Parameters of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub d_sr: f64,
    pub alpha: f64,
    pub snr_db: f64,
    pub epsilon: f64,
    pub k: usize,
    pub rate: f64,
}

impl Point {
    pub fn snr(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    fn get(&self, var: Var) -> f64 {
        match var {
            Var::DSr => self.d_sr,
            Var::Alpha => self.alpha,
            Var::SnrDb => self.snr_db,
            Var::Epsilon => self.epsilon,
            Var::K => self.k as f64,
        }
    }

    fn set(&mut self, var: Var, value: f64) {
        match var {
            Var::DSr => self.d_sr = value,
            Var::Alpha => self.alpha = value,
            Var::SnrDb => self.snr_db = value,
            Var::Epsilon => self.epsilon = value,
            Var::K => self.k = value as usize,
        }
    }
}

/// Explicit link variances; lists of length one apply to every relay.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceSpec {
    pub sd: f64,
    pub sr: Vec<f64>,
    pub rd: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub command: Command,
    pub swept: Var,
    pub values: Values,
    /// Values of the variables that are not swept.
    pub base: Point,
    /// Overrides the collinear geometry built from `d_sr` and `alpha`.
    pub variances: Option<VarianceSpec>,
    pub protocol: Protocol,
    pub quantity: Option<Quantity>,
    pub evaluator: EvaluatorKind,
    /// Monte Carlo trials per point; 0 skips simulation.
    pub trials: u64,
    pub max_trials: u64,
    pub seed: u64,
    pub tol: f64,
    pub validity_threshold: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    pub fn from_kv(command: Command, kv: &KvConfig) -> Result<Self> {
        if let Some(unknown) = kv.keys().find(|k| !KNOWN_KEYS.contains(k)) {
            return Err(Error::Config(format!("unknown key `{unknown}`")));
        }
        let mut base = Point {
            d_sr: 0.0,
            alpha: 0.0,
            snr_db: 0.0,
            epsilon: 0.0,
            k: 1,
            rate: kv.get_f64("rate")?.unwrap_or(0.01),
        };
        let mut swept = None;
        for var in Var::ALL {
            let values = match kv.get(var.key()) {
                Some(s) => parse_values(s, var.key())?,
                None => Values::single(var.default_value()),
            };
            check_values(var, &values)?;
            base.set(var, values.first());
            if values.is_sweep() {
                if let Some((other, _)) = swept {
                    return Err(Error::Config(format!(
                        "only one variable can be swept, got `{}` and `{}`",
                        Var::key(other),
                        var.key()
                    )));
                }
                swept = Some((var, values));
            }
        }
        let (swept, values) = swept.unwrap_or_else(|| {
            let var = command.primary();
            (var, Values::single(base.get(var)))
        });

        let variances = match (kv.get_list("sigma2_sr")?, kv.get_list("sigma2_rd")?) {
            (Some(sr), Some(rd)) => Some(VarianceSpec {
                sd: kv.get_f64("sigma2_sd")?.unwrap_or(1.0),
                sr,
                rd,
            }),
            (None, None) if kv.get("sigma2_sd").is_none() => None,
            _ => {
                return Err(Error::Config(
                    "explicit variances need both `sigma2_sr` and `sigma2_rd`".into(),
                ))
            }
        };

        let quantity = kv.get("quantity").map(Quantity::parse).transpose()?;
        if let Some(q) = quantity {
            if !command.quantities().contains(&q) {
                return Err(Error::Config(format!(
                    "quantity `{}` does not apply to this command",
                    kv.get("quantity").unwrap_or_default()
                )));
            }
        }

        let trials = kv
            .get("trials")
            .map(|s| parse_count(s, "trials"))
            .transpose()?
            .unwrap_or(1_000_000);
        let max_trials = kv
            .get("max_trials")
            .map(|s| parse_count(s, "max_trials"))
            .transpose()?
            .unwrap_or(trials.saturating_mul(64));
        let evaluator = parse_evaluator(kv.get("evaluator").unwrap_or("exact"))?;
        if evaluator == EvaluatorKind::MonteCarlo && trials == 0 {
            return Err(Error::Config("the mc evaluator needs trials > 0".into()));
        }
        if max_trials < trials {
            return Err(Error::Config(format!(
                "max_trials ({max_trials}) is below trials ({trials})"
            )));
        }
        let seed = match kv.get("seed") {
            Some(s) => s
                .parse()
                .map_err(|_| Error::Config(format!("seed: `{s}` is not a u64")))?,
            None => 1,
        };
        let tol = kv.get_f64("tol")?.unwrap_or(1e-9);
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::Config(format!("tol must be positive, got {tol}")));
        }
        let validity_threshold = kv
            .get_f64("validity_threshold")?
            .unwrap_or(DEFAULT_VALIDITY_THRESHOLD);

        Ok(Self {
            command,
            swept,
            values,
            base,
            variances,
            protocol: parse_protocol(kv.get("protocol").unwrap_or("ir"))?,
            quantity,
            evaluator,
            trials,
            max_trials,
            seed,
            tol,
            validity_threshold,
            format: kv.get("format").unwrap_or("csv").parse()?,
            out: kv.get("out").map(PathBuf::from),
        })
    }

    /// Parameters of sweep point `i`.
    pub fn point(&self, i: usize) -> Point {
        let mut p = self.base;
        p.set(self.swept, self.values.0[i]);
        p
    }

    fn quantity(&self) -> Option<Quantity> {
        self.quantity
            .or_else(|| self.command.quantities().first().copied())
    }

    fn mc(&self) -> MonteCarlo {
        MonteCarlo::new(self.trials, self.seed)
    }

    fn validity(&self, gamma: f64) -> Validity {
        Validity::from_gamma(gamma, self.validity_threshold)
    }

    /// Link variances at a sweep point.
    pub fn network(&self, p: &Point) -> Result<ChannelVariances> {
        match &self.variances {
            Some(spec) => {
                let expand = |xs: &[f64], key: &str| -> Result<Vec<f64>> {
                    match xs.len() {
                        1 => Ok(vec![xs[0]; p.k]),
                        n if n == p.k => Ok(xs.to_vec()),
                        n => Err(Error::Config(format!(
                            "{key} has {n} entries for {} relays",
                            p.k
                        ))),
                    }
                };
                ChannelVariances::new(
                    spec.sd,
                    expand(&spec.sr, "sigma2_sr")?,
                    expand(&spec.rd, "sigma2_rd")?,
                )
            }
            None => {
                let single =
                    variances_from_geometry(&NetworkGeometry::collinear(p.d_sr, p.alpha)?)?;
                let t = single.triplet()?;
                ChannelVariances::uniform(t.sd(), t.sr(), t.rd(), p.k)
            }
        }
    }

    fn row(&self, i: usize) -> Result<Row> {
        let p = self.point(i);
        let param = self.values.0[i];
        match (self.command, self.quantity()) {
            (Command::Placement, _) => self.placement_row(param, &p),
            (Command::Delta, Some(Quantity::Finite)) => self.delta_finite_row(param, &p),
            (Command::Delta, _) => self.delta_bound_row(param, &p),
            (Command::Outage, _) | (Command::KRelay, Some(Quantity::Outage)) => {
                self.outage_row(param, &p)
            }
            (Command::Phases, Some(q)) | (Command::KRelay, Some(q @ Quantity::Phases)) => {
                self.phases_row(param, &p, q)
            }
            (Command::Capacity, Some(q)) | (Command::KRelay, Some(q)) => {
                self.capacity_row(param, &p, q)
            }
            (_, None) => unreachable!("commands with quantities always have a default"),
        }
    }

    fn placement_row(&self, param: f64, p: &Point) -> Result<Row> {
        let m = optimize_placement(p.alpha, self.tol)?;
        let mut row = Row::analytic(
            param,
            optimal_relay_distance(p.alpha)?,
            Validity::NotApplicable,
        );
        row.mc_estimate = Some(m.x);
        row.ci_low = Some(m.x - 0.5 * m.bracket);
        row.ci_high = Some(m.x + 0.5 * m.bracket);
        Ok(row)
    }

    fn delta_bound_row(&self, param: f64, p: &Point) -> Result<Row> {
        let v = self.network(p)?.triplet()?;
        Ok(Row::analytic(
            param,
            delta_upper(v),
            Validity::NotApplicable,
        ))
    }

    fn delta_finite_row(&self, param: f64, p: &Point) -> Result<Row> {
        let v = self.network(p)?.triplet()?;
        let delta = delta_finite(p.snr(), p.epsilon, v)?;
        // the cut-set side operates at the larger threshold
        let gamma = csb_capacity_bound(p.snr(), p.epsilon, v)?.gamma;
        Ok(Row::analytic(param, delta, self.validity(gamma)))
    }

    fn outage_row(&self, param: f64, p: &Point) -> Result<Row> {
        let v = self.network(p)?;
        let snr = p.snr();
        let cfg = McConfig::from_rate(v.clone(), p.rate, snr, self.protocol)?;
        let gamma = cfg.gamma();
        let asymptotic = || {
            let c = match self.protocol {
                Protocol::Csb => k_relay_outage_constant_csb(&v),
                Protocol::Ir | Protocol::Bound => k_relay_outage_constant_ir(&v),
            };
            (c * gamma.powi(v.relays() as i32 + 1)).min(1.0)
        };
        let (analytic, validity) = match self.evaluator {
            EvaluatorKind::Exact => match ExactOutage::new(snr, v.clone(), self.protocol) {
                Some(ev) => (Some(ev.outage_at_threshold(gamma)), Validity::NotApplicable),
                None => (Some(asymptotic()), self.validity(gamma)),
            },
            EvaluatorKind::Asymptotic => (Some(asymptotic()), self.validity(gamma)),
            EvaluatorKind::MonteCarlo => (None, Validity::NotApplicable),
        };
        let mut row = Row {
            param,
            analytic,
            mc_estimate: None,
            ci_low: None,
            ci_high: None,
            trials: None,
            validity,
        };
        if self.trials > 0 {
            let est = estimate_outage(&cfg, self.mc())?;
            row.mc_estimate = Some(est.p_hat);
            row.ci_low = Some(est.ci_low);
            row.ci_high = Some(est.ci_high);
            row.trials = Some(est.trials);
        }
        Ok(row)
    }

    fn phases_row(&self, param: f64, p: &Point, q: Quantity) -> Result<Row> {
        let v = self.network(p)?;
        let k = v.relays();
        let cfg = McConfig::from_rate(v.clone(), p.rate, p.snr(), Protocol::Ir)?;
        let gamma = cfg.gamma();
        let delivered = (k + 1) as f64 * p.rate;

        // leading-order E(N): each C_k probability by its small-gamma limit
        let asymptotic_phases = || {
            let mut means = vec![v.sd()];
            let mut phases = 1.0;
            for j in 0..k {
                phases += lemma1_constant(&means) * gamma.powi(j as i32 + 1);
                means.push(v.rd()[j]);
            }
            phases
        };
        let analytic = match (self.evaluator, q) {
            (EvaluatorKind::MonteCarlo, _) => None,
            (EvaluatorKind::Exact, Quantity::Phases) => Some(k_relay_expected_phases(gamma, &v)),
            (EvaluatorKind::Asymptotic, Quantity::Phases) => Some(asymptotic_phases()),
            (EvaluatorKind::Exact, _) => {
                ExactOutage::new(p.snr(), v.clone(), Protocol::Ir).map(|ev| {
                    delivered * (1.0 - ev.outage_at_threshold(gamma))
                        / k_relay_expected_phases(gamma, &v)
                })
            }
            (EvaluatorKind::Asymptotic, _) => {
                let p_out = (k_relay_outage_constant_ir(&v) * gamma.powi(k as i32 + 1)).min(1.0);
                Some(delivered * (1.0 - p_out) / asymptotic_phases())
            }
        };
        let validity = match (analytic, self.evaluator) {
            (Some(_), EvaluatorKind::Asymptotic) => self.validity(gamma),
            _ => Validity::NotApplicable,
        };
        let mut row = Row {
            param,
            analytic,
            mc_estimate: None,
            ci_low: None,
            ci_high: None,
            trials: None,
            validity,
        };
        if self.trials > 0 {
            let summary = simulate(&cfg, self.mc())?;
            let est = if q == Quantity::Phases {
                summary.expected_phases
            } else {
                summary.throughput
            };
            row.mc_estimate = Some(est.mean);
            row.ci_low = Some(est.ci_low);
            row.ci_high = Some(est.ci_high);
            row.trials = Some(est.trials);
        }
        Ok(row)
    }

    /// Closed-form capacity in `analytic`; the capacity obtained by
    /// inverting the selected outage evaluator in `mc_estimate`.
    fn capacity_row(&self, param: f64, p: &Point, q: Quantity) -> Result<Row> {
        let v = self.network(p)?;
        let k = v.relays();
        let snr = p.snr();
        let eps = p.epsilon;
        if self.command == Command::Capacity && k != 1 {
            return Err(Error::Config(
                "capacity covers a single relay; use krelay for k > 1".into(),
            ));
        }

        let (formula, protocol, constant) = match q {
            Quantity::Base | Quantity::Ir => {
                let t = v.triplet()?;
                let f = if q == Quantity::Base {
                    epsilon_capacity_base(snr, eps, t)?
                } else {
                    epsilon_capacity_ir(snr, eps, t, PhaseCountModel::Target)?
                };
                (f, Protocol::Ir, k_relay_outage_constant_ir(&v))
            }
            Quantity::Csb => (
                csb_capacity_bound(snr, eps, v.triplet()?)?,
                Protocol::Csb,
                k_relay_outage_constant_csb(&v),
            ),
            Quantity::IrRate => (
                k_relay_capacities(snr, eps, &v)?.ir.rate,
                Protocol::Bound,
                k_relay_outage_constant_ir(&v),
            ),
            Quantity::CsbRate => (
                k_relay_capacities(snr, eps, &v)?.csb.rate,
                Protocol::Csb,
                k_relay_outage_constant_csb(&v),
            ),
            _ => unreachable!("not a capacity quantity"),
        };

        let phases = k as u32 + 1;
        let mut evaluator: Option<Box<dyn OutageEvaluator>> = match self.evaluator {
            EvaluatorKind::Exact => ExactOutage::new(snr, v.clone(), protocol)
                .map(|e| Box::new(e) as Box<dyn OutageEvaluator>),
            EvaluatorKind::Asymptotic => Some(Box::new(Asymptotic {
                snr,
                constant,
                phases,
            })),
            EvaluatorKind::MonteCarlo => Some(Box::new(MonteCarloOutage {
                variances: v.clone(),
                snr,
                protocol,
                mc: self.mc(),
                max_trials: self.max_trials,
                z: Z_95,
            })),
        };

        let mut row = Row::analytic(param, formula.rate, self.validity(formula.gamma));
        let Some(ev) = evaluator.as_deref_mut() else {
            return Ok(row);
        };
        let opts = SolverOptions {
            tol: self.tol,
            ..SolverOptions::default()
        };
        let sol: CapacitySolution = invert_capacity(eps, ev, opts)?;

        // converts the per-sub-block rate at which outage equals epsilon into
        // the capacity the row reports
        let capacity = |rate: f64| {
            let gamma = gamma_threshold(rate, snr, phases);
            let blocks = phases as f64 * rate;
            match q {
                Quantity::Base => rate,
                Quantity::Ir if self.evaluator == EvaluatorKind::Asymptotic => blocks / (1.0 + eps),
                Quantity::Ir => blocks / (1.0 + direct_outage(gamma, v.sd())),
                Quantity::IrRate => blocks / k_relay_expected_phases(gamma, &v),
                _ => blocks / (1.0 + k as f64 * eps),
            }
        };
        row.mc_estimate = Some(capacity(sol.rate));
        if self.evaluator == EvaluatorKind::MonteCarlo {
            let (a, b) = (capacity(sol.rate), capacity(sol.rate + sol.bracket));
            row.ci_low = Some(a.min(b));
            row.ci_high = Some(a.max(b));
            row.trials = Some(ev.trials());
        }
        Ok(row)
    }
}

fn check_values(var: Var, values: &Values) -> Result<()> {
    for &x in &values.0 {
        let ok = match var {
            Var::Epsilon => x > 0.0 && x < 1.0,
            Var::K => x.fract() == 0.0 && x >= 1.0 && x <= MAX_RELAYS as f64,
            Var::DSr | Var::Alpha | Var::SnrDb => true,
        };
        if !ok {
            let why = match var {
                Var::Epsilon => "must lie in (0, 1)".to_string(),
                _ => format!("must be an integer in 1..={MAX_RELAYS}"),
            };
            return Err(Error::Config(format!("{}: {x} {why}", var.key())));
        }
    }
    Ok(())
}

/// Evaluates every sweep point. Points run in parallel; rows come back in
/// sweep order.
pub fn run_sweep(config: &SweepConfig) -> Result<Table> {
    let rows = (0..config.values.0.len())
        .into_par_iter()
        .map(|i| config.row(i))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: Command, text: &str) -> Result<SweepConfig> {
        SweepConfig::from_kv(command, &KvConfig::parse(text)?)
    }

    #[test]
    fn defaults_and_primary_variable() {
        let c = cfg(Command::Capacity, "").unwrap();
        assert_eq!(c.swept, Var::Epsilon);
        assert_eq!(c.values.0, vec![1e-3]);
        assert_eq!(c.base.k, 1);
        assert_eq!(c.trials, 1_000_000);
        assert_eq!(c.max_trials, 64_000_000);
        assert_eq!(c.quantity(), Some(Quantity::Ir));
    }

    #[test]
    fn rejects_bad_configs() {
        for (cmd, text) in [
            (Command::Outage, "alpha = 2:3:0.5\nd_sr = 0.1,0.2"),
            (Command::Outage, "epsilon = 0"),
            (Command::Outage, "k = 1.5"),
            (Command::Outage, "k = 16"),
            (Command::Outage, "colour = red"),
            (Command::Outage, "quantity = throughput"),
            (Command::Outage, "evaluator = mc\ntrials = 0"),
            (Command::Outage, "sigma2_sr = 1"),
            (Command::Outage, "trials = 100\nmax_trials = 10"),
            (Command::Outage, "protocol = df"),
            (Command::Delta, "format = xml"),
            (Command::Delta, "tol = 0"),
        ] {
            let err = cfg(cmd, text).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{text}: {err}");
        }
    }

    #[test]
    fn explicit_variances_are_replicated() {
        let c = cfg(
            Command::KRelay,
            "k = 1:3:1\nsigma2_sr = 2\nsigma2_rd = 4\nsigma2_sd = 0.5",
        )
        .unwrap();
        let v = c.network(&c.point(2)).unwrap();
        assert_eq!(v.sr(), &[2.0; 3]);
        assert_eq!(v.sd(), 0.5);
        let c = cfg(Command::KRelay, "k = 2\nsigma2_sr = 1,2,3\nsigma2_rd = 1").unwrap();
        assert!(c.network(&c.point(0)).is_err());
    }

    #[test]
    fn placement_rows() {
        let c = cfg(Command::Placement, "alpha = 2:3:1").unwrap();
        let t = run_sweep(&c).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert!((t.rows[0].analytic.unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((t.rows[1].mc_estimate.unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn outage_rows_are_monotone_in_snr() {
        let c = cfg(
            Command::Outage,
            "snr_db = -20:-10:5\ntrials = 20000\nseed = 3",
        )
        .unwrap();
        let t = run_sweep(&c).unwrap();
        for w in t.rows.windows(2) {
            assert!(w[1].analytic < w[0].analytic);
            assert!(w[1].mc_estimate <= w[0].mc_estimate);
        }
        assert_eq!(t.rows[0].trials, Some(20000));
    }

    #[test]
    fn exact_fallback_flags_regime() {
        let c = cfg(
            Command::KRelay,
            "quantity = outage\nk = 2\nprotocol = csb\ntrials = 0\nrate = 1",
        )
        .unwrap();
        let row = &run_sweep(&c).unwrap().rows[0];
        assert_eq!(row.validity, Validity::OutOfRegime);
        assert!(row.mc_estimate.is_none());
    }

    #[test]
    fn capacity_asymptotic_solve_matches_formula() {
        for q in ["base", "ir", "csb"] {
            let c = cfg(
                Command::Capacity,
                &format!("quantity = {q}\nevaluator = asymptotic\nepsilon = 1e-3,1e-4"),
            )
            .unwrap();
            for r in run_sweep(&c).unwrap().rows {
                let (a, s) = (r.analytic.unwrap(), r.mc_estimate.unwrap());
                assert!((a - s).abs() < 2e-9, "{q}: {a} {s}");
            }
        }
        let c = cfg(
            Command::KRelay,
            "evaluator = asymptotic\nk = 1:3:1\nquantity = csb-rate",
        )
        .unwrap();
        for r in run_sweep(&c).unwrap().rows {
            let (a, s) = (r.analytic.unwrap(), r.mc_estimate.unwrap());
            assert!((a / s - 1.0).abs() < 1e-6, "{a} {s}");
        }
    }

    #[test]
    fn capacity_needs_single_relay() {
        let c = cfg(Command::Capacity, "k = 2").unwrap();
        assert!(matches!(run_sweep(&c), Err(Error::Config(_))));
    }
}
