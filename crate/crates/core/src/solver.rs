//! ε-outage capacity by bisection and relay placement by golden-section
//! search.

use serde::Serialize;

use crate::analytic::{
    exact_outage_csb, exact_outage_ir, gamma_threshold, k_relay_bound_outage,
    optimal_relay_distance, psi_difference,
};
use crate::channel::{ChannelVariances, VarianceTriplet};
use crate::simulator::{estimate_outage, McConfig, MonteCarlo, Protocol};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluatorKind {
    Exact,
    Asymptotic,
    MonteCarlo,
}

/// Outage at one rate, with a confidence interval when it is estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEval {
    pub p: f64,
    pub ci: Option<(f64, f64)>,
}

impl OutageEval {
    fn exact(p: f64) -> Self {
        Self { p, ci: None }
    }

    fn low(&self) -> f64 {
        self.ci.map_or(self.p, |c| c.0)
    }

    fn high(&self) -> f64 {
        self.ci.map_or(self.p, |c| c.1)
    }

    /// Whether the evaluation cannot tell `p` from `epsilon`.
    fn straddles(&self, epsilon: f64) -> bool {
        self.ci
            .is_some_and(|(lo, hi)| lo <= epsilon && epsilon <= hi)
    }
}

/// Outage probability as a function of the end-to-end rate; must be
/// nondecreasing in the rate.
pub trait OutageEvaluator {
    fn kind(&self) -> EvaluatorKind;

    fn outage(&mut self, rate: f64) -> Result<OutageEval>;

    /// Make subsequent evaluations more precise. Returns `false` once the
    /// budget is spent.
    fn refine(&mut self) -> bool {
        false
    }

    /// Trials behind each evaluation; 0 for closed forms.
    fn trials(&self) -> u64 {
        0
    }
}

/// Exact single-relay incremental-relaying outage.
#[derive(Debug, Clone, Copy)]
pub struct ExactIr {
    pub snr: f64,
    pub variances: VarianceTriplet,
}

impl OutageEvaluator for ExactIr {
    fn kind(&self) -> EvaluatorKind {
        EvaluatorKind::Exact
    }

    fn outage(&mut self, rate: f64) -> Result<OutageEval> {
        let gamma = gamma_threshold(rate, self.snr, 2);
        Ok(OutageEval::exact(exact_outage_ir(gamma, self.variances)))
    }
}

/// Closed-form outage for every protocol that has one: incremental relaying
/// and the min-cut with a single relay, and the bounding event for any
/// number of relays.
#[derive(Debug, Clone)]
pub struct ExactOutage {
    snr: f64,
    variances: ChannelVariances,
    protocol: Protocol,
}

impl ExactOutage {
    /// `None` when the protocol has no closed form for this many relays.
    pub fn new(snr: f64, variances: ChannelVariances, protocol: Protocol) -> Option<Self> {
        let single = variances.relays() == 1;
        (single || protocol == Protocol::Bound).then_some(Self {
            snr,
            variances,
            protocol,
        })
    }

    pub fn outage_at_threshold(&self, gamma: f64) -> f64 {
        let triplet = || {
            self.variances
                .triplet()
                .expect("single relay checked in new")
        };
        match self.protocol {
            Protocol::Ir => exact_outage_ir(gamma, triplet()),
            Protocol::Csb => exact_outage_csb(gamma, triplet()),
            Protocol::Bound => k_relay_bound_outage(gamma, &self.variances),
        }
    }
}

impl OutageEvaluator for ExactOutage {
    fn kind(&self) -> EvaluatorKind {
        EvaluatorKind::Exact
    }

    fn outage(&mut self, rate: f64) -> Result<OutageEval> {
        let phases = self.variances.relays() as u32 + 1;
        let gamma = gamma_threshold(rate, self.snr, phases);
        Ok(OutageEval::exact(self.outage_at_threshold(gamma)))
    }
}

/// Leading-order outage `constant * gamma^phases` with
/// `gamma = (2^(phases R) - 1) / snr`.
#[derive(Debug, Clone, Copy)]
pub struct Asymptotic {
    pub snr: f64,
    pub constant: f64,
    pub phases: u32,
}

impl OutageEvaluator for Asymptotic {
    fn kind(&self) -> EvaluatorKind {
        EvaluatorKind::Asymptotic
    }

    fn outage(&mut self, rate: f64) -> Result<OutageEval> {
        let gamma = gamma_threshold(rate, self.snr, self.phases);
        Ok(OutageEval::exact(
            (self.constant * gamma.powi(self.phases as i32)).min(1.0),
        ))
    }
}

/// Monte Carlo outage with common random numbers across rates; the trial
/// count grows by [`MonteCarloOutage::GROWTH`] on each refinement up to
/// `max_trials`.
#[derive(Debug, Clone)]
pub struct MonteCarloOutage {
    pub variances: ChannelVariances,
    pub snr: f64,
    pub protocol: Protocol,
    pub mc: MonteCarlo,
    pub max_trials: u64,
    /// Normal quantile of the interval used to decide bisection steps.
    pub z: f64,
}

impl MonteCarloOutage {
    pub const GROWTH: u64 = 4;
}

impl OutageEvaluator for MonteCarloOutage {
    fn kind(&self) -> EvaluatorKind {
        EvaluatorKind::MonteCarlo
    }

    fn outage(&mut self, rate: f64) -> Result<OutageEval> {
        let cfg = McConfig::from_rate(self.variances.clone(), rate, self.snr, self.protocol)?;
        let est = estimate_outage(&cfg, self.mc)?;
        Ok(OutageEval {
            p: est.p_hat,
            ci: Some(est.interval(self.z)),
        })
    }

    fn refine(&mut self) -> bool {
        let next = self.mc.scaled(Self::GROWTH);
        if next.trials > self.max_trials {
            return false;
        }
        self.mc = next;
        true
    }

    fn trials(&self) -> u64 {
        self.mc.trials
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop once the rate bracket is narrower than this (bits).
    pub tol: f64,
    pub initial_rate_hi: f64,
    pub max_doublings: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            initial_rate_hi: 1.0,
            max_doublings: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacitySolution {
    /// Largest rate found with outage at most epsilon.
    pub rate: f64,
    /// Outage at `rate`.
    pub achieved_outage: f64,
    /// Final bracket width.
    pub bracket: f64,
    pub iterations: u32,
    pub evaluator: EvaluatorKind,
}

/// Largest rate whose outage does not exceed `epsilon`.
///
/// The upper end of the bracket starts at `opts.initial_rate_hi` and doubles
/// until outage exceeds `epsilon`. For estimated outages a bisection step is
/// only taken when the interval at the midpoint excludes `epsilon`;
/// otherwise the evaluator is refined, and [`Error::McBudgetExceeded`]
/// reports the bracket reached when it cannot be refined further.
pub fn invert_capacity(
    epsilon: f64,
    evaluator: &mut dyn OutageEvaluator,
    opts: SolverOptions,
) -> Result<CapacitySolution> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon", epsilon, "must lie in (0, 1)"));
    }
    if !(opts.tol > 0.0 && opts.initial_rate_hi > opts.tol) {
        return Err(Error::param(
            "tol",
            opts.tol,
            "must be positive and below the initial bracket",
        ));
    }

    let mut iterations = 0u32;
    // Decide whether outage at `rate` is above epsilon, refining while the
    // evaluation is ambiguous.
    let mut classify =
        |rate: f64, ev: &mut dyn OutageEvaluator, lo: f64, hi: f64| -> Result<(OutageEval, bool)> {
            loop {
                iterations += 1;
                let e = ev.outage(rate)?;
                if !e.straddles(epsilon) {
                    return Ok((e, e.p > epsilon));
                }
                if !ev.refine() {
                    return Err(Error::McBudgetExceeded {
                        trials: ev.trials(),
                        lo,
                        hi,
                    });
                }
            }
        };

    let mut lo = 0.0;
    let mut lo_eval = OutageEval::exact(0.0);
    let (floor, infeasible) = classify(opts.tol, evaluator, 0.0, opts.tol)?;
    if infeasible {
        return Err(Error::Infeasible {
            epsilon,
            rate: opts.tol,
            floor: floor.p,
        });
    }

    let mut hi = opts.initial_rate_hi;
    let mut doublings = 0;
    let mut hi_eval = loop {
        let (e, above) = classify(hi, evaluator, lo, f64::INFINITY)?;
        if above {
            break e;
        }
        lo = hi;
        lo_eval = e;
        if doublings == opts.max_doublings {
            return Err(Error::NotBracketed {
                epsilon,
                rate_hi: hi,
                outage: e.p,
            });
        }
        hi *= 2.0;
        doublings += 1;
    };

    while hi - lo >= opts.tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (e, above) = classify(mid, evaluator, lo, hi)?;
        if e.high() < lo_eval.low() || e.low() > hi_eval.high() {
            return Err(Error::NonMonotone { rate: mid });
        }
        if above {
            hi = mid;
            hi_eval = e;
        } else {
            lo = mid;
            lo_eval = e;
        }
    }

    Ok(CapacitySolution {
        rate: lo,
        achieved_outage: lo_eval.p,
        bracket: hi - lo,
        iterations,
        evaluator: evaluator.kind(),
    })
}

/// Outcome of a golden-section search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    /// Final bracket width.
    pub bracket: f64,
    pub iterations: u32,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search on `[lo, hi]` for a unimodal objective, driven by a
/// strict comparison `less(a, b) = f(a) < f(b)`. Stops when the bracket is
/// narrower than `tol`.
pub fn golden_section_by<F>(mut lo: f64, mut hi: f64, tol: f64, mut less: F) -> Minimum
where
    F: FnMut(f64, f64) -> bool,
{
    let mut iterations = 0;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    while hi - lo > tol {
        iterations += 1;
        if less(x1, x2) {
            hi = x2;
            x2 = x1;
            x1 = hi - INV_PHI * (hi - lo);
        } else {
            lo = x1;
            x1 = x2;
            x2 = lo + INV_PHI * (hi - lo);
        }
        // probes can cross once the bracket is a few ulps wide
        if x1 >= x2 {
            break;
        }
    }
    Minimum {
        x: 0.5 * (lo + hi),
        bracket: hi - lo,
        iterations,
    }
}

/// Golden-section search on function values.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    golden_section_by(lo, hi, tol, |a, b| f(a) < f(b))
}

pub const DEFAULT_PLACEMENT_TOL: f64 = 1e-10;

/// Numerically minimises the placement objective over `(0, 1)`.
pub fn optimize_placement(alpha: f64, tol: f64) -> Result<Minimum> {
    // same domain check as the closed form
    optimal_relay_distance(alpha)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::param("tol", tol, "must be positive"));
    }
    Ok(golden_section_by(0.0, 1.0, tol, |a, b| {
        psi_difference(a, b, alpha) < 0.0
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{epsilon_capacity_base, outage_constant_ir, psi};

    #[test]
    fn golden_section_quadratic() {
        let m = golden_section(|x| (x - 0.3).powi(2), 0.0, 1.0, 1e-8);
        assert!((m.x - 0.3).abs() < 1e-4);
        assert!(m.bracket <= 1e-8);
    }

    #[test]
    fn placement_matches_closed_form() {
        for alpha in [1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 8.0] {
            let m = optimize_placement(alpha, DEFAULT_PLACEMENT_TOL).unwrap();
            let d = optimal_relay_distance(alpha).unwrap();
            assert!((m.x - d).abs() < 1e-9, "alpha {alpha}: {} vs {d}", m.x);
        }
    }

    #[test]
    fn placement_by_values_is_coarser() {
        // plain value comparison stalls around sqrt(machine epsilon)
        let m = golden_section(|d| psi(d, 3.0), 0.0, 1.0, 1e-12);
        assert!((m.x - (2f64.sqrt() - 1.0)).abs() < 1e-6);
    }

    #[test]
    fn placement_rejects_alpha() {
        assert!(optimize_placement(1.0, 1e-10).is_err());
        assert!(optimize_placement(2.0, 0.0).is_err());
    }

    #[test]
    fn asymptotic_inversion_reproduces_closed_form() {
        let v = VarianceTriplet::new(1.0, 9.0, 2.25).unwrap();
        for eps in [1e-2, 1e-3, 1e-5] {
            let mut ev = Asymptotic {
                snr: 0.5,
                constant: outage_constant_ir(v),
                phases: 2,
            };
            let s = invert_capacity(eps, &mut ev, SolverOptions::default()).unwrap();
            let want = epsilon_capacity_base(0.5, eps, v).unwrap().rate;
            assert!((s.rate - want).abs() < 2e-9, "{} vs {want}", s.rate);
            assert!(s.achieved_outage <= eps);
            assert!(s.bracket < 1e-9);
            assert_eq!(s.evaluator, EvaluatorKind::Asymptotic);
        }
    }

    #[test]
    fn exact_inversion_is_inverse() {
        let v = VarianceTriplet::unit();
        let mut ev = ExactIr {
            snr: 1.0,
            variances: v,
        };
        let s = invert_capacity(1e-4, &mut ev, SolverOptions::default()).unwrap();
        assert!(s.achieved_outage <= 1e-4);
        let above = ev.outage(s.rate + s.bracket).unwrap().p;
        assert!(above > 1e-4);
    }

    struct Constant(f64);

    impl OutageEvaluator for Constant {
        fn kind(&self) -> EvaluatorKind {
            EvaluatorKind::Exact
        }
        fn outage(&mut self, _rate: f64) -> Result<OutageEval> {
            Ok(OutageEval::exact(self.0))
        }
    }

    #[test]
    fn infeasible_and_unbracketed() {
        assert!(matches!(
            invert_capacity(0.1, &mut Constant(0.5), SolverOptions::default()),
            Err(Error::Infeasible { .. })
        ));
        assert!(matches!(
            invert_capacity(0.1, &mut Constant(0.0), SolverOptions::default()),
            Err(Error::NotBracketed { .. })
        ));
    }

    /// Bump between rates 0.4 and 0.6 that exceeds the value at 1.
    struct Bump;

    impl OutageEvaluator for Bump {
        fn kind(&self) -> EvaluatorKind {
            EvaluatorKind::Exact
        }
        fn outage(&mut self, rate: f64) -> Result<OutageEval> {
            let p = match rate {
                r if r >= 1.0 => 0.5,
                r if r > 0.4 && r < 0.6 => 0.6,
                _ => 0.0,
            };
            Ok(OutageEval::exact(p))
        }
    }

    #[test]
    fn detects_non_monotone_evaluator() {
        assert!(matches!(
            invert_capacity(0.1, &mut Bump, SolverOptions::default()),
            Err(Error::NonMonotone { .. })
        ));
    }

    #[test]
    fn rejects_bad_epsilon() {
        let mut ev = ExactIr {
            snr: 1.0,
            variances: VarianceTriplet::unit(),
        };
        assert!(invert_capacity(0.0, &mut ev, SolverOptions::default()).is_err());
        assert!(invert_capacity(1.0, &mut ev, SolverOptions::default()).is_err());
    }

    #[test]
    fn exact_outage_availability() {
        let two = ChannelVariances::uniform(1.0, 1.0, 1.0, 2).unwrap();
        assert!(ExactOutage::new(1.0, two.clone(), Protocol::Csb).is_none());
        assert!(ExactOutage::new(1.0, two.clone(), Protocol::Ir).is_none());
        assert!(ExactOutage::new(1.0, two, Protocol::Bound).is_some());

        // with one relay the bounding event is the IR outage itself
        let v = VarianceTriplet::new(1.0, 2.0, 0.5).unwrap();
        let mut bound = ExactOutage::new(0.3, v.into(), Protocol::Bound).unwrap();
        let mut ir = ExactIr {
            snr: 0.3,
            variances: v,
        };
        let a = invert_capacity(1e-3, &mut bound, SolverOptions::default()).unwrap();
        let b = invert_capacity(1e-3, &mut ir, SolverOptions::default()).unwrap();
        assert!((a.rate - b.rate).abs() < 2e-9);
    }
}
