//! Regenerative estimators over busy cycles, the Lindley workload walk, and
//! heavy-traffic exponent fits.
//!
//! Busy cycles of a GI/GI/1 queue started empty are i.i.d., so cycle-level
//! functionals (P, N, I) get plain sample means while per-job functionals
//! (W, T) get ratio estimators with a delta-method interval.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{CycleRecord, Instance};
use crate::simulator::SimResult;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

pub const DEFAULT_S: f64 = 1.5;
pub const DEFAULT_ZETA: f64 = 15.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Functional {
    /// Busy period length.
    P,
    /// Jobs per busy period.
    N,
    /// Idle time before a busy period.
    I,
    /// Workload found by an arrival.
    W,
    /// Sojourn time.
    T,
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Functional::P => "P",
            Functional::N => "N",
            Functional::I => "I",
            Functional::W => "W",
            Functional::T => "T",
        };
        f.write_str(s)
    }
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P" | "p" => Ok(Functional::P),
            "N" | "n" => Ok(Functional::N),
            "I" | "i" => Ok(Functional::I),
            "W" | "w" => Ok(Functional::W),
            "T" | "t" => Ok(Functional::T),
            _ => Err(Error::param(format!("unknown functional '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub functional: Functional,
    pub kappa: f64,
    pub point: f64,
    /// 95% half-width.
    pub ci_halfwidth: f64,
    pub cycles_used: usize,
    /// Set when `kappa` exceeds the size law's finite-moment order.
    pub beyond_finite_order: bool,
}

impl MomentEstimate {
    pub fn covers(&self, value: f64) -> bool {
        (self.point - value).abs() <= self.ci_halfwidth
    }

    pub fn relative_error(&self, value: f64) -> f64 {
        (self.point - value).abs() / value.abs()
    }
}

/// `(s, zeta)` of the small/large busy-period split, checked against the
/// finite-moment order `alpha` of the size law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    pub alpha: f64,
    pub s: f64,
    pub zeta: f64,
}

impl AnalysisParams {
    pub fn new(alpha: f64, s: f64, zeta: f64) -> Result<Self> {
        if !(alpha > 1.0) {
            return Err(Error::param(format!(
                "finite-moment order must exceed 1, got {alpha}"
            )));
        }
        let lo = if alpha.is_infinite() {
            1.0
        } else {
            alpha / (alpha - 1.0)
        };
        if !(s > lo && s < 2.0) {
            return Err(Error::param(format!("s = {s} outside ({lo}, 2)")));
        }
        let zeta_min = (4.0 + 2.0 * s) / (2.0 - s);
        if !(zeta > zeta_min) {
            return Err(Error::param(format!("zeta = {zeta} must exceed {zeta_min}")));
        }
        Ok(AnalysisParams { alpha, s, zeta })
    }

    pub fn defaults(alpha: f64) -> Result<Self> {
        Self::new(alpha, DEFAULT_S, DEFAULT_ZETA)
    }

    /// Threshold separating small from large busy periods.
    pub fn n0(&self, rho: f64) -> f64 {
        (1.0 - rho).powf(-self.zeta)
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa >= 1.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("moment order must be >= 1, got {kappa}")))
    }
}

fn flag_order(functional: Functional, kappa: f64, alpha: Option<f64>) -> bool {
    let beyond = alpha.is_some_and(|a| kappa > a);
    if beyond {
        log::warn!(
            "order {kappa} moment of {functional} exceeds the size law's finite-moment order {}",
            alpha.unwrap_or(f64::NAN)
        );
    }
    beyond
}

/// Mean and 95% half-width of i.i.d. samples.
pub fn sample_mean(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.is_empty() {
        return Err(Error::InsufficientData("no samples".into()));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return Ok((mean, f64::INFINITY));
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, Z95 * (var / n).sqrt()))
}

/// `sum(ys) / sum(ns)` with a delta-method 95% half-width over i.i.d. pairs.
pub fn ratio_estimate(ys: &[f64], ns: &[f64]) -> Result<(f64, f64)> {
    if ys.len() != ns.len() {
        return Err(Error::param("ratio estimator needs paired samples"));
    }
    if ys.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "ratio estimate needs at least 2 cycles, got {}",
            ys.len()
        )));
    }
    let k = ys.len() as f64;
    let ratio = ys.iter().sum::<f64>() / ns.iter().sum::<f64>();
    let n_bar = ns.iter().sum::<f64>() / k;
    let s2 = ys
        .iter()
        .zip(ns)
        .map(|(y, n)| (y - ratio * n).powi(2))
        .sum::<f64>()
        / (k - 1.0);
    Ok((ratio, Z95 * s2.sqrt() / (n_bar * k.sqrt())))
}

/// Mean sojourn time as (sum over cycles of sojourn sums) / (total jobs).
pub fn regen_mean_sojourn(result: &SimResult) -> Result<MomentEstimate> {
    if result.cycles.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "mean sojourn needs at least 2 cycles, got {}",
            result.cycles.len()
        )));
    }
    let ys: Vec<f64> = result.cycles.iter().map(|c| c.sojourn_sum).collect();
    let ns: Vec<f64> = result.cycles.iter().map(|c| c.record.n as f64).collect();
    let (point, ci) = ratio_estimate(&ys, &ns)?;
    Ok(MomentEstimate {
        functional: Functional::T,
        kappa: 1.0,
        point,
        ci_halfwidth: ci,
        cycles_used: ys.len(),
        beyond_finite_order: false,
    })
}

/// Data a moment is estimated from.
#[derive(Clone, Copy, Debug)]
pub enum MomentInput<'a> {
    /// Cycle-level functionals P, N, I.
    Cycles(&'a [CycleRecord]),
    /// Per-job values (W or T) in job order, grouped by the given cycles.
    PerJob {
        values: &'a [f64],
        cycles: &'a [CycleRecord],
    },
}

/// `E[X^kappa]` for a busy-cycle or per-job functional.
///
/// `alpha` is the size law's finite-moment order; exceeding it only warns.
pub fn functional_moment(
    input: MomentInput<'_>,
    functional: Functional,
    kappa: f64,
    alpha: Option<f64>,
) -> Result<MomentEstimate> {
    check_kappa(kappa)?;
    let beyond = flag_order(functional, kappa, alpha);
    let (point, ci, used) = match input {
        MomentInput::Cycles(cycles) => {
            let xs: Vec<f64> = match functional {
                Functional::P => cycles.iter().map(|c| c.p.powf(kappa)).collect(),
                Functional::N => cycles.iter().map(|c| (c.n as f64).powf(kappa)).collect(),
                Functional::I => cycles
                    .iter()
                    .filter_map(|c| c.idle)
                    .map(|i| i.powf(kappa))
                    .collect(),
                Functional::W | Functional::T => {
                    return Err(Error::param(format!(
                        "{functional} is a per-job functional"
                    )))
                }
            };
            let (m, ci) = sample_mean(&xs)?;
            (m, ci, xs.len())
        }
        MomentInput::PerJob { values, cycles } => {
            if matches!(functional, Functional::P | Functional::N | Functional::I) {
                return Err(Error::param(format!("{functional} is a cycle functional")));
            }
            let mut ys = Vec::with_capacity(cycles.len());
            let mut ns = Vec::with_capacity(cycles.len());
            for c in cycles {
                let slice = values.get(c.first_job - 1..c.last_job).ok_or_else(|| {
                    Error::param(format!("cycle {} refers to missing jobs", c.index))
                })?;
                ys.push(slice.iter().map(|v| v.powf(kappa)).sum());
                ns.push(c.n as f64);
            }
            let (m, ci) = ratio_estimate(&ys, &ns)?;
            (m, ci, ys.len())
        }
    };
    Ok(MomentEstimate {
        functional,
        kappa,
        point,
        ci_halfwidth: ci,
        cycles_used: used,
        beyond_finite_order: beyond,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    /// Mean idle time.
    pub lhs: f64,
    /// `mu` times the mean number of jobs of the preceding cycle.
    pub rhs: f64,
    pub gap: f64,
    pub relative_gap: f64,
    /// 95% half-width of `gap`.
    pub ci_halfwidth: f64,
    pub pairs: usize,
}

/// Compares mean idle time with `mu * E[N]`, pairing each idle period with the
/// busy cycle before it.
pub fn check_in_identity(cycles: &[CycleRecord], mu: f64) -> Result<IdentityCheck> {
    let pairs: Vec<(f64, f64)> = cycles
        .windows(2)
        .filter_map(|w| w[1].idle.map(|i| (w[0].n as f64, i)))
        .collect();
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "idle/jobs identity needs at least 2 idle periods, got {}",
            pairs.len()
        )));
    }
    let k = pairs.len() as f64;
    let lhs = pairs.iter().map(|p| p.1).sum::<f64>() / k;
    let rhs = mu * pairs.iter().map(|p| p.0).sum::<f64>() / k;
    let diffs: Vec<f64> = pairs.iter().map(|(n, i)| i - mu * n).collect();
    let (gap, ci) = sample_mean(&diffs)?;
    Ok(IdentityCheck {
        lhs,
        rhs,
        gap,
        relative_gap: gap / rhs,
        ci_halfwidth: ci,
        pairs: pairs.len(),
    })
}

/// Partial sums of `B_m - A_{m+1}` and the reflected workload at arrivals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetputWalk {
    /// `S_0 = 0`, then one entry per interarrival gap.
    pub partial_sums: Vec<f64>,
    /// Workload seen by each arrival, excluding its own size.
    pub workload: Vec<f64>,
}

pub fn lindley_walk(inst: &Instance) -> NetputWalk {
    let jobs = inst.jobs();
    let mut partial_sums = Vec::with_capacity(jobs.len());
    let mut workload = Vec::with_capacity(jobs.len());
    if jobs.is_empty() {
        return NetputWalk {
            partial_sums,
            workload,
        };
    }
    let (mut s, mut w) = (0.0, 0.0);
    partial_sums.push(s);
    workload.push(w);
    for pair in jobs.windows(2) {
        let step = pair[0].size - (pair[1].release - pair[0].release);
        s += step;
        w = f64::max(w + step, 0.0);
        partial_sums.push(s);
        workload.push(w);
    }
    NetputWalk {
        partial_sums,
        workload,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailSplit {
    pub n0: f64,
    /// Mean-sojourn contribution of cycles with `N <= n0`.
    pub small: f64,
    pub large: f64,
    pub small_cycles: usize,
    pub large_cycles: usize,
}

impl TailSplit {
    pub fn total(&self) -> f64 {
        self.small + self.large
    }
}

/// Splits the regenerative mean sojourn into small- and large-cycle parts.
pub fn tail_split(result: &SimResult, params: &AnalysisParams, rho: f64) -> Result<TailSplit> {
    let params = AnalysisParams::new(params.alpha, params.s, params.zeta)?;
    if result.cycles.len() < 2 {
        return Err(Error::InsufficientData("tail split needs at least 2 cycles".into()));
    }
    let n0 = params.n0(rho);
    let total_n: f64 = result.cycles.iter().map(|c| c.record.n as f64).sum();
    let (mut small, mut large) = (0.0, 0.0);
    let (mut small_cycles, mut large_cycles) = (0, 0);
    for c in &result.cycles {
        if c.record.n as f64 <= n0 {
            small += c.sojourn_sum;
            small_cycles += 1;
        } else {
            large += c.sojourn_sum;
            large_cycles += 1;
        }
    }
    Ok(TailSplit {
        n0,
        small: small / total_n,
        large: large / total_n,
        small_cycles,
        large_cycles,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderBound {
    pub bound: f64,
    /// Order `s / (s - 1)` of the busy-period moment.
    pub p_order: f64,
    pub p_moment: f64,
    pub n_second_moment: f64,
    pub n_mean: f64,
    pub n0: f64,
    /// `(2 - s) / (2 s)`.
    pub n_tail_power: f64,
}

/// Plug-in value of the Hölder/Markov upper bound on the large-cycle
/// contribution to the mean sojourn time.
pub fn holder_diagnostic(result: &SimResult, params: &AnalysisParams, rho: f64) -> Result<HolderBound> {
    let params = AnalysisParams::new(params.alpha, params.s, params.zeta)?;
    if result.cycles.len() < 2 {
        return Err(Error::InsufficientData("bound needs at least 2 cycles".into()));
    }
    let s = params.s;
    let p_order = s / (s - 1.0);
    let tail = (2.0 - s) / (2.0 * s);
    let records = result.cycle_records();
    let alpha = Some(params.alpha);
    let p_moment =
        functional_moment(MomentInput::Cycles(&records), Functional::P, p_order, alpha)?.point;
    let n2 = functional_moment(MomentInput::Cycles(&records), Functional::N, 2.0, alpha)?.point;
    let n1 = functional_moment(MomentInput::Cycles(&records), Functional::N, 1.0, alpha)?.point;
    let n0 = params.n0(rho);
    let bound = p_moment.powf(1.0 / p_order) * n2.sqrt() * n1.powf(tail - 1.0) / n0.powf(tail);
    Ok(HolderBound {
        bound,
        p_order,
        p_moment,
        n_second_moment: n2,
        n_mean: n1,
        n0,
        n_tail_power: tail,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    /// Slope of `ln(moment)` against `ln(1 - rho)`.
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub points: usize,
}

/// Least-squares fit of `ln(value) = a + slope * ln(1 - rho)`.
pub fn exponent_fit(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "exponent fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    for (i, &(rho, v)) in points.iter().enumerate() {
        if !(rho > 0.0 && rho < 1.0) || !(v > 0.0) {
            return Err(Error::param(format!("point ({rho}, {v}) cannot be fitted")));
        }
        if points[..i].iter().any(|p| p.0 == rho) {
            return Err(Error::param(format!("duplicate load {rho} in fit")));
        }
    }
    let xs: Vec<f64> = points.iter().map(|p| (1.0 - p.0).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(ExponentFit {
        slope,
        intercept,
        slope_se: (rss / (n - 2.0) / sxx).sqrt(),
        points: points.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub rho: f64,
    pub t_policy: f64,
    pub t_srpt: f64,
    pub ratio: f64,
    /// `ratio / ln(1 / (1 - rho))`.
    pub normalized: f64,
}

/// Tabulates `E[T_policy] / E[T_srpt]` along a load grid.
pub fn ratio_curve(policy: &[(f64, f64)], srpt: &[(f64, f64)]) -> Result<Vec<RatioRow>> {
    if policy.len() != srpt.len() || policy.iter().zip(srpt).any(|(a, b)| a.0 != b.0) {
        return Err(Error::param("ratio curve needs matching load grids"));
    }
    Ok(policy
        .iter()
        .zip(srpt)
        .map(|(&(rho, tp), &(_, ts))| {
            let ratio = tp / ts;
            RatioRow {
                rho,
                t_policy: tp,
                t_srpt: ts,
                ratio,
                normalized: ratio / (1.0 / (1.0 - rho)).ln(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{DistributionSpec, RandomStream};
    use crate::policies::PolicyKind;
    use crate::simulator::{simulate, SimCycle};
    use approx::assert_relative_eq;

    fn cycle(index: usize, first: usize, n: usize, p: f64, idle: Option<f64>) -> CycleRecord {
        CycleRecord {
            index,
            first_job: first,
            last_job: first + n - 1,
            n,
            p,
            idle,
            start: 0.0,
            end: p,
        }
    }

    fn result_with(cycles: Vec<(usize, f64)>) -> SimResult {
        let mut first = 1;
        let cycles = cycles
            .into_iter()
            .enumerate()
            .map(|(i, (n, sum))| {
                let c = SimCycle {
                    record: cycle(i + 1, first, n, 1.0, (i > 0).then_some(1.0)),
                    sojourn_sum: sum,
                };
                first += n;
                c
            })
            .collect();
        SimResult {
            policy: PolicyKind::Fifo,
            seed: 0,
            jobs: Vec::new(),
            cycles,
            events: Vec::new(),
        }
    }

    fn mm1(rho: f64, cycles: usize, seed: u64) -> Instance {
        let arrival = DistributionSpec::exponential_with_mean(1.0 / rho);
        let size = DistributionSpec::exponential_with_mean(1.0);
        Instance::generate(
            &arrival,
            &size,
            cycles,
            &mut RandomStream::new(seed, 0),
            &mut RandomStream::new(seed, 1),
        )
        .unwrap()
    }

    #[test]
    fn regen_ratio_of_identical_cycles() {
        let r = result_with(vec![(2, 4.0), (2, 4.0)]);
        let e = regen_mean_sojourn(&r).unwrap();
        assert_eq!(e.point, 2.0);
        assert_eq!(e.ci_halfwidth, 0.0);
        assert!(matches!(
            regen_mean_sojourn(&result_with(vec![(2, 4.0)])),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn ratio_interval_matches_direct_formula() {
        let ys = [3.0, 1.0, 8.0, 2.0];
        let ns = [2.0, 1.0, 3.0, 1.0];
        let (r, ci) = ratio_estimate(&ys, &ns).unwrap();
        assert_relative_eq!(r, 14.0 / 7.0);
        // residuals y - 2n = -1, -1, 2, 0 -> s^2 = 6/3
        assert_relative_eq!(ci, Z95 * 2f64.sqrt() / (1.75 * 2.0), max_relative = 1e-14);
    }

    #[test]
    fn analysis_params_ranges() {
        let p = AnalysisParams::defaults(f64::INFINITY).unwrap();
        assert_eq!(p.n0(0.5), 32768.0);
        let p = AnalysisParams::new(f64::INFINITY, 1.5, 10.0);
        assert!(p.is_err(), "zeta must exceed 14 at s = 1.5");
        // alpha = 3 forces s > 1.5
        assert!(AnalysisParams::new(3.0, 1.5, 20.0).is_err());
        assert!(AnalysisParams::new(3.0, 1.6, 30.0).is_ok());
        assert!(AnalysisParams::new(f64::INFINITY, 2.0, 30.0).is_err());
    }

    #[test]
    fn n0_with_zeta_ten() {
        let p = AnalysisParams {
            alpha: f64::INFINITY,
            s: 1.2,
            zeta: 10.0,
        };
        assert_eq!(p.n0(0.5), 1024.0);
    }

    #[test]
    fn moment_orders_and_warnings() {
        let cs = [cycle(1, 1, 1, 1.0, None), cycle(2, 2, 3, 3.0, Some(2.0))];
        let e = functional_moment(MomentInput::Cycles(&cs), Functional::P, 2.0, Some(3.0)).unwrap();
        assert_eq!(e.point, 5.0);
        assert!(!e.beyond_finite_order);
        let e = functional_moment(MomentInput::Cycles(&cs), Functional::N, 4.0, Some(3.0)).unwrap();
        assert_eq!(e.point, 41.0);
        assert!(e.beyond_finite_order);
        let e = functional_moment(MomentInput::Cycles(&cs), Functional::I, 1.0, None).unwrap();
        assert_eq!((e.point, e.cycles_used), (2.0, 1));
        assert!(functional_moment(MomentInput::Cycles(&[]), Functional::P, 1.0, None).is_err());
        assert!(functional_moment(MomentInput::Cycles(&cs), Functional::P, 0.5, None).is_err());
    }

    #[test]
    fn identity_on_deterministic_cycles() {
        let arrival = DistributionSpec::Deterministic { value: 2.0 };
        let size = DistributionSpec::Deterministic { value: 1.0 };
        let inst = Instance::generate(
            &arrival,
            &size,
            10,
            &mut RandomStream::new(0, 0),
            &mut RandomStream::new(0, 1),
        )
        .unwrap();
        let cycles = inst.busy_periods();
        let c = check_in_identity(&cycles, 1.0).unwrap();
        assert_eq!((c.lhs, c.rhs, c.gap), (1.0, 1.0, 0.0));
        assert!(check_in_identity(&cycles[..1], 1.0).is_err());
    }

    #[test]
    fn lindley_examples() {
        let inst = Instance::from_pairs([(0.0, 3.0), (1.0, 1.0)]).unwrap();
        let w = lindley_walk(&inst);
        assert_eq!(w.workload, vec![0.0, 2.0]);
        assert_eq!(w.partial_sums, vec![0.0, 2.0]);

        let inst = Instance::from_pairs((0..20).map(|i| (2.0 * i as f64, 1.0))).unwrap();
        assert!(lindley_walk(&inst).workload.iter().all(|&w| w == 0.0));
    }

    #[test]
    fn mm1_workload_mean() {
        // lambda E[B^2] / (2 (1 - rho)) with E[B^2] = 2
        let rho = 0.5;
        let oracle = rho * 2.0 / (2.0 * (1.0 - rho));
        let inst = mm1(rho, 100_000, 11);
        let w = lindley_walk(&inst).workload;
        let cycles = inst.busy_periods();
        let e = functional_moment(
            MomentInput::PerJob {
                values: &w,
                cycles: &cycles,
            },
            Functional::W,
            1.0,
            None,
        )
        .unwrap();
        assert!((e.point - oracle).abs() <= 1.5 * e.ci_halfwidth, "{e:?}");
    }

    #[test]
    fn tail_split_partitions() {
        let r = result_with(vec![(1, 1.0), (5, 20.0), (2, 3.0)]);
        let p = AnalysisParams {
            alpha: f64::INFINITY,
            s: 1.2,
            zeta: 10.0,
        };
        let split = tail_split(&r, &p, 1.0 - 3f64.powf(-0.1)).unwrap();
        // n0 = 3
        assert_relative_eq!(split.n0, 3.0, max_relative = 1e-12);
        assert_eq!((split.small_cycles, split.large_cycles), (2, 1));
        let regen = regen_mean_sojourn(&r).unwrap().point;
        assert_relative_eq!(split.total(), regen, max_relative = 1e-12);

        let all_small = tail_split(&r, &AnalysisParams::defaults(f64::INFINITY).unwrap(), 0.5).unwrap();
        assert_eq!(all_small.large, 0.0);
        let bad = AnalysisParams {
            alpha: f64::INFINITY,
            s: 1.5,
            zeta: 3.0,
        };
        assert!(tail_split(&r, &bad, 0.5).is_err());
    }

    #[test]
    fn holder_exponents() {
        let r = result_with(vec![(1, 1.0), (2, 3.0), (3, 6.0)]);
        let h = holder_diagnostic(&r, &AnalysisParams::defaults(f64::INFINITY).unwrap(), 0.5).unwrap();
        assert_relative_eq!(h.p_order, 3.0);
        assert_relative_eq!(h.n_tail_power, 1.0 / 6.0);
        assert!(holder_diagnostic(
            &result_with(vec![(1, 1.0)]),
            &AnalysisParams::defaults(f64::INFINITY).unwrap(),
            0.5
        )
        .is_err());
    }

    #[test]
    fn exact_power_law_fit() {
        let pts: Vec<(f64, f64)> = [0.5, 0.6, 0.7, 0.8, 0.9]
            .iter()
            .map(|&r: &f64| (r, 3.7 * (1.0 - r).powf(-1.0)))
            .collect();
        let f = exponent_fit(&pts).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-9);
        let pts: Vec<(f64, f64)> = [0.5, 0.7, 0.9]
            .iter()
            .map(|&r: &f64| (r, 2.0 * (1.0 - r).powf(1.0 - 2.0 * 2.0)))
            .collect();
        assert!((exponent_fit(&pts).unwrap().slope + 3.0).abs() < 1e-9);
        assert!(exponent_fit(&pts[..2]).is_err());
    }

    #[test]
    fn ratio_curve_self_comparison() {
        let grid = [(0.5, 2.0), (0.9, 10.0)];
        let rows = ratio_curve(&grid, &grid).unwrap();
        assert!(rows.iter().all(|r| r.ratio == 1.0));
        assert_relative_eq!(rows[1].normalized, 1.0 / 10f64.ln());
        assert!(ratio_curve(&grid, &grid[..1]).is_err());
    }

    #[test]
    fn mm1_fifo_sojourn_and_identity() {
        let inst = mm1(0.5, 20_000, 3);
        let r = simulate(&inst, PolicyKind::Fifo, 0).unwrap();
        let e = regen_mean_sojourn(&r).unwrap();
        assert!((e.point - 2.0).abs() < 1.5 * e.ci_halfwidth.max(0.02), "{e:?}");
        let c = check_in_identity(&inst.busy_periods(), 1.0).unwrap();
        // mu = E[A] - E[B] = 2 - 1
        assert!(c.gap.abs() <= 1.5 * c.ci_halfwidth, "{c:?}");
    }
}
