//! Acceptance suite: closed-form queueing results, path-wise properties of
//! the simulator and the heavy-traffic experiment, each as one criterion with
//! an explicit tolerance.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, RandomStream, SUBSTREAM_ARRIVALS, SUBSTREAM_SIZES};
use crate::error::{Error, Result};
use crate::estimators::{
    check_in_identity, exponent_fit, functional_moment, regen_mean_sojourn, tail_split,
    AnalysisParams, Functional, MomentInput,
};
use crate::instance::{pow2, CycleRecord, Instance};
use crate::policies::PolicyKind;
use crate::simulator::{brute_force_min_flow, simulate, simulate_with, SimOptions};
use crate::sweep::{derive_seed, run_sweep, AnalysisSection, SweepConfig, SweepSection, SystemSection};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Quick,
    Full,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            _ => Err(Error::param(format!("unknown profile '{s}'"))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Quick => "quick",
            Profile::Full => "full",
        })
    }
}

/// Run lengths. Statistical tolerances are widened by `stat_scale`, the square
/// root of the full-to-quick cycle ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Scale {
    pub blind_cycles: usize,
    pub srpt_cycles: usize,
    pub moment_cycles: usize,
    pub exponent_cycles: usize,
    pub sweep_cycles: usize,
    pub stat_scale: f64,
    pub optimality_instances: usize,
    pub optimality_seeds: usize,
    pub brute_instances: usize,
    pub conservation_instances: usize,
    pub coupling_instances: usize,
    pub order_trajectories: usize,
}

impl Scale {
    pub fn of(profile: Profile) -> Self {
        let full = Scale {
            blind_cycles: 200_000,
            srpt_cycles: 200_000,
            moment_cycles: 1_000_000,
            exponent_cycles: 1_000_000,
            sweep_cycles: 100_000,
            stat_scale: 1.0,
            optimality_instances: 1000,
            optimality_seeds: 5,
            brute_instances: 1000,
            conservation_instances: 100,
            coupling_instances: 200,
            order_trajectories: 10_000,
        };
        match profile {
            Profile::Full => full,
            Profile::Quick => Scale {
                blind_cycles: full.blind_cycles / 10,
                srpt_cycles: full.srpt_cycles / 10,
                moment_cycles: full.moment_cycles / 10,
                exponent_cycles: full.exponent_cycles / 10,
                sweep_cycles: full.sweep_cycles / 10,
                stat_scale: 10f64.sqrt(),
                ..full
            },
        }
    }
}

/// Pass thresholds. Relative tolerances on estimates are multiplied by the
/// profile's `stat_scale`; the others are used as is.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub blind_rel: f64,
    pub srpt_rel: f64,
    pub busy_mean_rel: f64,
    pub busy_second_rel: f64,
    pub jobs_mean_rel: f64,
    pub slope_min: f64,
    pub slope_max: f64,
    pub path_abs: f64,
    pub coupling_rel: f64,
    pub ratio_growth: f64,
    pub partition_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            blind_rel: 0.02,
            srpt_rel: 0.10,
            busy_mean_rel: 0.02,
            busy_second_rel: 0.10,
            jobs_mean_rel: 0.02,
            slope_min: -3.3,
            slope_max: -2.7,
            path_abs: 1e-9,
            coupling_rel: 1e-9,
            ratio_growth: 2.0,
            partition_rel: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub expected: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub elapsed_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Wall-clock information; excluded from reproducibility comparisons.
    pub metadata: Metadata,
}

impl CriterionReport {
    /// `PASS`/`FAIL` line for terminal output.
    pub fn line(&self) -> String {
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.label.as_str())
            .collect();
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "[{status}] criterion {:>2}: {} ({} checks, {:.1}s)",
            self.id,
            self.name,
            self.checks.len(),
            self.metadata.elapsed_seconds
        );
        if !failed.is_empty() {
            s.push_str(&format!(" failing: {}", failed.join("; ")));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub profile: Profile,
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "blind policies match the M/M/1 mean sojourn"),
    (2, "SRPT heavy-traffic mean sojourn at load 0.9"),
    (3, "M/M/1 busy-period moments"),
    (4, "jobs per busy period and the idle/jobs identity"),
    (5, "heavy-traffic exponents of busy-period second moments"),
    (6, "SRPT path-wise optimality and brute-force agreement"),
    (7, "work conservation"),
    (8, "scaling coupling of extended and plain RMLF"),
    (9, "order preservation in multilevel queues"),
    (10, "normalized eRMLF/SRPT ratio and large-cycle bound"),
    (11, "small/large split reconstructs the mean sojourn"),
];

pub struct Context {
    pub scale: Scale,
    pub tol: Tolerances,
    pub seed: u64,
}

struct Checks(Vec<Check>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn push(&mut self, label: impl Into<String>, value: f64, expected: impl Into<String>, passed: bool) {
        self.0.push(Check {
            label: label.into(),
            value,
            expected: expected.into(),
            passed,
        });
    }
}

fn mm1(rho: f64) -> (DistributionSpec, DistributionSpec) {
    (
        DistributionSpec::exponential_with_mean(1.0 / rho),
        DistributionSpec::exponential_with_mean(1.0),
    )
}

fn generate(arrival: &DistributionSpec, size: &DistributionSpec, cycles: usize, seed: u64) -> Result<Instance> {
    Instance::generate(
        arrival,
        size,
        cycles,
        &mut RandomStream::new(seed, SUBSTREAM_ARRIVALS),
        &mut RandomStream::new(seed, SUBSTREAM_SIZES),
    )
}

/// Busy cycles drawn in independent chunks so that only one chunk of jobs is
/// held in memory. The first cycle of every chunk has no idle record.
pub fn cycles_in_chunks(
    arrival: &DistributionSpec,
    size: &DistributionSpec,
    total: usize,
    seed: u64,
) -> Result<Vec<CycleRecord>> {
    const CHUNK: usize = 100_000;
    let mut arrivals = RandomStream::new(seed, SUBSTREAM_ARRIVALS);
    let mut sizes = RandomStream::new(seed, SUBSTREAM_SIZES);
    let mut out = Vec::with_capacity(total);
    while out.len() < total {
        let n = CHUNK.min(total - out.len());
        let inst = Instance::generate(arrival, size, n, &mut arrivals, &mut sizes)?;
        out.extend(inst.busy_periods());
    }
    Ok(out)
}

/// Small random instance for path-wise checks: `1..=max_jobs` jobs, a mix of
/// tight and loose interarrival gaps and sizes spread over several octaves.
pub fn random_instance(stream: &mut RandomStream, max_jobs: usize) -> Instance {
    let n = 1 + (stream.uniform() * max_jobs as f64) as usize;
    let n = n.min(max_jobs);
    let mut release = 0.0;
    let mut pairs = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            let u = stream.uniform();
            let mean = if stream.uniform() < 0.5 { 0.3 } else { 2.0 };
            release += (-(1.0 - u).ln() * mean).max(1e-6);
        }
        let size = pow2(-3) * 64f64.powf(stream.uniform()) * (0.5 + stream.uniform());
        pairs.push((release, size));
    }
    Instance::from_pairs(pairs).expect("generated pairs are valid")
}

fn rel_check(c: &mut Checks, label: String, value: f64, target: f64, tol: f64) {
    let rel = (value - target).abs() / target.abs();
    c.push(label, value, format!("{target} within {:.3}%", 100.0 * tol), rel <= tol);
}

type Runner = fn(&Context) -> Result<Checks>;

fn criterion_1(ctx: &Context) -> Result<Checks> {
    let mut c = Checks::new();
    let tol = ctx.tol.blind_rel * ctx.scale.stat_scale;
    for (i, rho) in [0.5, 0.8].into_iter().enumerate() {
        let (a, b) = mm1(rho);
        let inst = generate(&a, &b, ctx.scale.blind_cycles, derive_seed(ctx.seed, 1, i as u64))?;
        let target = 1.0 / (1.0 - rho);
        for (pi, policy) in PolicyKind::BLIND.into_iter().enumerate() {
            let r = simulate(&inst, policy, derive_seed(ctx.seed, 100 + i as u64, pi as u64))?;
            let e = regen_mean_sojourn(&r)?;
            c.push(
                format!("{policy} rho={rho} covers"),
                e.point,
                format!("{target} inside +-{:.4}", e.ci_halfwidth),
                e.covers(target),
            );
            rel_check(&mut c, format!("{policy} rho={rho} rel"), e.point, target, tol);
        }
    }
    Ok(c)
}

/// Heavy-traffic SRPT approximation `1 / ((1 - rho) ln(e / (1 - rho)))`.
pub fn srpt_heavy_traffic(rho: f64) -> f64 {
    1.0 / ((1.0 - rho) * (1.0 - (1.0 - rho).ln()))
}

fn criterion_2(ctx: &Context) -> Result<Checks> {
    let mut c = Checks::new();
    let rho = 0.9;
    let (a, b) = mm1(rho);
    let inst = generate(&a, &b, ctx.scale.srpt_cycles, derive_seed(ctx.seed, 2, 0))?;
    let e = regen_mean_sojourn(&simulate(&inst, PolicyKind::Srpt, 0)?)?;
    rel_check(&mut c, "srpt rho=0.9".into(), e.point, srpt_heavy_traffic(rho), ctx.tol.srpt_rel);
    Ok(c)
}

fn moment_check(
    c: &mut Checks,
    cycles: &[CycleRecord],
    f: Functional,
    kappa: f64,
    target: f64,
    tol: f64,
    label: &str,
) -> Result<()> {
    let e = functional_moment(MomentInput::Cycles(cycles), f, kappa, None)?;
    c.push(
        format!("{label} covers"),
        e.point,
        format!("{target} inside +-{:.4}", e.ci_halfwidth),
        e.covers(target),
    );
    rel_check(c, format!("{label} rel"), e.point, target, tol);
    Ok(())
}

fn criterion_3(ctx: &Context) -> Result<Checks> {
    let mut c = Checks::new();
    let s = ctx.scale.stat_scale;
    let (a, b) = mm1(0.8);
    let cycles = cycles_in_chunks(&a, &b, ctx.scale.moment_cycles, derive_seed(ctx.seed, 3, 0))?;
    moment_check(&mut c, &cycles, Functional::P, 1.0, 5.0, ctx.tol.busy_mean_rel * s, "E[P] rho=0.8")?;
    let (a, b) = mm1(0.5);
    let cycles = cycles_in_chunks(&a, &b, ctx.scale.moment_cycles, derive_seed(ctx.seed, 3, 1))?;
    // E[B^2] / (1 - rho)^3 with E[B^2] = 2
    moment_check(&mut c, &cycles, Functional::P, 2.0, 16.0, ctx.tol.busy_second_rel * s, "E[P^2] rho=0.5")?;
    Ok(c)
}

fn criterion_4(ctx: &Context) -> Result<Checks> {
    let mut c = Checks::new();
    let tol = ctx.tol.jobs_mean_rel * ctx.scale.stat_scale;
    let size = DistributionSpec::Uniform { lo: 0.5, hi: 1.5 };
    for (i, rho) in [0.5, 0.8].into_iter().enumerate() {
        let arrival = DistributionSpec::exponential_with_mean(1.0 / rho);
        let cycles = cycles_in_chunks(&arrival, &size, ctx.scale.moment_cycles, derive_seed(ctx.seed, 4, i as u64))?;
        let e = functional_moment(MomentInput::Cycles(&cycles), Functional::N, 1.0, None)?;
        rel_check(&mut c, format!("E[N] M/G/1 rho={rho}"), e.point, 1.0 / (1.0 - rho), tol);
    }
    let arrival = DistributionSpec::Uniform { lo: 0.25, hi: 2.25 };
    let size = DistributionSpec::exponential_with_mean(1.0);
    let mu = arrival.moments().mean - size.moments().mean;
    let cycles = cycles_in_chunks(&arrival, &size, ctx.scale.moment_cycles, derive_seed(ctx.seed, 4, 9))?;
    let id = check_in_identity(&cycles, mu)?;
    c.push(
        "E[I] - mu E[N] GI/GI/1 rho=0.8",
        id.gap,
        format!("0 inside +-{:.5}", id.ci_halfwidth),
        id.gap.abs() <= id.ci_halfwidth,
    );
    Ok(c)
}

pub const EXPONENT_GRID: [f64; 5] = [0.5, 0.6, 0.7, 0.8, 0.9];

fn criterion_5(ctx: &Context) -> Result<Checks> {
    let mut c = Checks::new();
    let mut p2 = Vec::new();
    let mut n2 = Vec::new();
    for (i, rho) in EXPONENT_GRID.into_iter().enumerate() {
        let (a, b) = mm1(rho);
        let cycles = cycles_in_chunks(&a, &b, ctx.scale.exponent_cycles, derive_seed(ctx.seed, 5, i as u64))?;
        p2.push((rho, functional_moment(MomentInput::Cycles(&cycles), Functional::P, 2.0, None)?.point));
        n2.push((rho, functional_moment(MomentInput::Cycles(&cycles), Functional::N, 2.0, None)?.point));
    }
    let (lo, hi) = (ctx.tol.slope_min, ctx.tol.slope_max);
    for (label, pts) in [("E[P^2] slope", &p2), ("E[N^2] slope", &n2)] {
        let fit = exponent_fit(pts)?;
        c.push(
            format!("{label} (se {:.3})", fit.slope_se),
            fit.slope,
            format!("in [{lo}, {hi}]"),
            (lo..=hi).contains(&fit.slope),
        );
    }
    Ok(c)
}

fn criterion_6(ctx: &Context) -> Result<Checks> {
    let mut c = Checks::new();
    let tol = ctx.tol.path_abs;
    let mut stream = RandomStream::new(derive_seed(ctx.seed, 6, 0), 0);
    let mut worst = f64::NEG_INFINITY;
    let mut runs = 0usize;
    for k in 0..ctx.scale.optimality_instances {
        let inst = random_instance(&mut stream, 20);
        let srpt = simulate(&inst, PolicyKind::Srpt, 0)?.total_flow();
        for policy in PolicyKind::BLIND {
            for s in 0..ctx.scale.optimality_seeds {
                let other = simulate(&inst, policy, derive_seed(ctx.seed, 600 + k as u64, s as u64))?.total_flow();
                worst = worst.max(srpt - other);
                runs += 1;
            }
        }
    }
    c.push(
        format!("max(srpt - other) over {runs} runs"),
        worst,
        format!("<= {tol}"),
        worst <= tol,
    );
    let mut stream = RandomStream::new(derive_seed(ctx.seed, 6, 1), 0);
    let mut gap = 0f64;
    for _ in 0..ctx.scale.brute_instances {
        let inst = random_instance(&mut stream, 4);
        let srpt = simulate(&inst, PolicyKind::Srpt, 0)?.total_flow();
        gap = gap.max((srpt - brute_force_min_flow(&inst)?).abs());
    }
    c.push(
        format!("max |srpt - brute force| over {} instances", ctx.scale.brute_instances),
        gap,
        format!("<= {tol}"),
        gap <= tol,
    );
    Ok(c)
}

fn criterion_7(ctx: &Context) -> Result<Checks> {
    let mut c = Checks::new();
    let tol = ctx.tol.path_abs;
    let mut stream = RandomStream::new(derive_seed(ctx.seed, 7, 0), 0);
    let mut worst = 0f64;
    let mut count_mismatch = 0usize;
    for k in 0..ctx.scale.conservation_instances {
        let inst = random_instance(&mut stream, 40);
        let expected = inst.busy_periods();
        for policy in PolicyKind::ALL {
            let got = simulate(&inst, policy, derive_seed(ctx.seed, 700, k as u64))?.busy_intervals();
            if got.len() != expected.len() {
                count_mismatch += 1;
                continue;
            }
            for (g, e) in got.iter().zip(&expected) {
                worst = worst.max((g.0 - e.start).abs()).max((g.1 - e.end).abs());
            }
        }
    }
    c.push("busy period count mismatches", count_mismatch as f64, "0", count_mismatch == 0);
    c.push("max endpoint deviation", worst, format!("<= {tol}"), worst <= tol);
    Ok(c)
}

/// Per-job relative deviation between eRMLF sojourns on `inst` and `2^g`
/// times RMLF sojourns on the instance scaled by `2^-g`, same policy seed.
pub fn coupling_deviation(inst: &Instance, seed: u64) -> Result<f64> {
    let g = inst.scaling_exponent()?;
    let scaled = inst.scale(pow2(-g))?;
    let e = simulate(inst, PolicyKind::Ermlf, seed)?;
    let r = simulate(&scaled, PolicyKind::Rmlf, seed)?;
    Ok(e.jobs
        .iter()
        .zip(&r.jobs)
        .map(|(a, b)| (a.sojourn - pow2(g) * b.sojourn).abs() / a.sojourn)
        .fold(0.0, f64::max))
}

fn criterion_8(ctx: &Context) -> Result<Checks> {
    let mut c = Checks::new();
    let mut stream = RandomStream::new(derive_seed(ctx.seed, 8, 0), 0);
    let mut worst = 0f64;
    let mut done = 0;
    while done < ctx.scale.coupling_instances {
        let inst = random_instance(&mut stream, 30);
        if inst.min_size().is_some_and(|m| m >= 2.0) {
            continue;
        }
        worst = worst.max(coupling_deviation(&inst, derive_seed(ctx.seed, 800, done as u64))?);
        done += 1;
    }
    let tol = ctx.tol.coupling_rel;
    c.push(
        format!("max relative sojourn deviation over {done} instances"),
        worst,
        format!("<= {tol}"),
        worst <= tol,
    );
    Ok(c)
}

fn criterion_9(ctx: &Context) -> Result<Checks> {
    let mut c = Checks::new();
    let mut stream = RandomStream::new(derive_seed(ctx.seed, 9, 0), 0);
    let mut violations = 0usize;
    let mut first: Option<String> = None;
    let options = SimOptions {
        check_invariants: true,
        record_events: false,
    };
    for k in 0..ctx.scale.order_trajectories {
        let inst = random_instance(&mut stream, 25);
        let policy = if k % 2 == 0 { PolicyKind::Rmlf } else { PolicyKind::Ermlf };
        let seed = derive_seed(ctx.seed, 900, k as u64);
        let mut sched = policy.scheduler(seed);
        if let Err(e) = simulate_with(&inst, sched.as_mut(), seed, options) {
            violations += 1;
            first.get_or_insert_with(|| format!("{policy} trajectory {k}: {e}"));
        }
    }
    c.push(
        match &first {
            Some(msg) => format!("violations ({msg})"),
            None => format!("violations over {} trajectories", ctx.scale.order_trajectories),
        },
        violations as f64,
        "0",
        violations == 0,
    );
    Ok(c)
}

pub const RATIO_GRID: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 0.95];

/// Criteria 10 and 11 share the same sweep.
fn criteria_10_11(ctx: &Context) -> Result<(Checks, Checks)> {
    let cfg = SweepConfig {
        system: SystemSection {
            arrival: DistributionSpec::exponential_with_mean(1.0),
            size: DistributionSpec::exponential_with_mean(1.0),
        },
        sweep: SweepSection {
            r_grid: RATIO_GRID.to_vec(),
            policies: vec![PolicyKind::Srpt, PolicyKind::Ermlf],
            cycles_per_point: ctx.scale.sweep_cycles,
            seed: derive_seed(ctx.seed, 10, 0),
            kappas: vec![1.0],
        },
        analysis: AnalysisSection::default(),
    };
    let out = run_sweep(&cfg, None)?;
    let mut c10 = Checks::new();
    let rows = out.ratio_rows()?;
    let base = rows[0].1.normalized;
    let max = rows.iter().map(|r| r.1.normalized).fold(f64::NEG_INFINITY, f64::max);
    let limit = ctx.tol.ratio_growth * base;
    c10.push(
        "max normalized ratio over grid",
        max,
        format!("<= {} x {base:.4}", ctx.tol.ratio_growth),
        max <= limit,
    );
    for p in &out.points {
        for q in &p.policies {
            c10.push(
                format!("{} rho={} large-cycle part vs bound {:.4e}", q.policy, p.r, q.holder.bound),
                q.tail.large,
                "<= bound",
                q.tail.large <= q.holder.bound,
            );
        }
    }

    let mut c11 = Checks::new();
    let mut worst = 0f64;
    for p in &out.points {
        for q in &p.policies {
            let rel = (q.tail.total() - q.mean_sojourn.point).abs() / q.mean_sojourn.point;
            worst = worst.max(rel);
        }
    }
    // recompute one split directly from a fresh run as a cross-check
    let (a, b) = mm1(0.8);
    let inst = generate(&a, &b, 2_000, derive_seed(ctx.seed, 11, 0))?;
    let r = simulate(&inst, PolicyKind::Ermlf, 1)?;
    let params = AnalysisParams::defaults(f64::INFINITY)?;
    let small_n0 = AnalysisParams::new(f64::INFINITY, 1.5, 14.5)?;
    for p in [params, small_n0] {
        let split = tail_split(&r, &p, 0.8)?;
        let regen = regen_mean_sojourn(&r)?.point;
        worst = worst.max((split.total() - regen).abs() / regen);
    }
    let tol = ctx.tol.partition_rel;
    c11.push("max relative reconstruction error", worst, format!("<= {tol}"), worst <= tol);
    Ok((c10, c11))
}

fn finish(id: u8, checks: Checks, started: Instant) -> CriterionReport {
    let name = CRITERIA[(id - 1) as usize].1;
    CriterionReport {
        id,
        name,
        passed: !checks.0.is_empty() && checks.0.iter().all(|c| c.passed),
        checks: checks.0,
        metadata: Metadata {
            elapsed_seconds: started.elapsed().as_secs_f64(),
        },
    }
}

fn errored(id: u8, err: &Error, started: Instant) -> CriterionReport {
    let mut checks = Checks::new();
    checks.push(format!("error: {err}"), f64::NAN, "no error", false);
    finish(id, checks, started)
}

/// Runs the selected criteria (all when `only` is empty), calling `report`
/// as each one finishes.
pub fn run_verify(
    profile: Profile,
    seed: u64,
    tol: Tolerances,
    only: &[u8],
    mut report: impl FnMut(&CriterionReport),
) -> Result<Verdict> {
    if let Some(bad) = only.iter().find(|&&id| !(1..=11).contains(&id)) {
        return Err(Error::param(format!("no criterion {bad}")));
    }
    let ctx = Context {
        scale: Scale::of(profile),
        tol,
        seed,
    };
    let wanted = |id: u8| only.is_empty() || only.contains(&id);
    let runners: [(u8, Runner); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut criteria = Vec::new();
    for (id, run) in runners {
        if !wanted(id) {
            continue;
        }
        let t = Instant::now();
        let rep = match run(&ctx) {
            Ok(c) => finish(id, c, t),
            Err(e) => errored(id, &e, t),
        };
        report(&rep);
        criteria.push(rep);
    }
    if wanted(10) || wanted(11) {
        let t = Instant::now();
        match criteria_10_11(&ctx) {
            Ok((c10, c11)) => {
                for (id, c) in [(10, c10), (11, c11)] {
                    if wanted(id) {
                        let rep = finish(id, c, t);
                        report(&rep);
                        criteria.push(rep);
                    }
                }
            }
            Err(e) => {
                for id in [10, 11] {
                    if wanted(id) {
                        let rep = errored(id, &e, t);
                        report(&rep);
                        criteria.push(rep);
                    }
                }
            }
        }
    }
    Ok(Verdict {
        profile,
        seed,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heavy_traffic_target() {
        assert!((srpt_heavy_traffic(0.9) - 10.0 / (1.0 + 10f64.ln())).abs() < 1e-12);
        assert!((srpt_heavy_traffic(0.9) - 3.028).abs() < 1e-3);
    }

    #[test]
    fn random_instances_are_valid() {
        let mut s = RandomStream::new(1, 0);
        for _ in 0..200 {
            let inst = random_instance(&mut s, 4);
            assert!((1..=4).contains(&inst.len()));
        }
    }

    #[test]
    fn quick_scale_widens_statistical_tolerances_only() {
        let q = Scale::of(Profile::Quick);
        let f = Scale::of(Profile::Full);
        assert_eq!(q.blind_cycles * 10, f.blind_cycles);
        assert!((q.stat_scale.powi(2) - 10.0).abs() < 1e-12);
        assert_eq!(q.optimality_instances, f.optimality_instances);
    }

    #[test]
    fn tampered_tolerance_fails() {
        let tol = Tolerances {
            path_abs: -1.0,
            ..Tolerances::default()
        };
        let v = run_verify(Profile::Quick, 1, tol, &[7], |_| {}).unwrap();
        assert!(!v.passed);
        let v = run_verify(Profile::Quick, 1, Tolerances::default(), &[7], |_| {}).unwrap();
        assert!(v.passed, "{:?}", v.criteria);
        assert!(run_verify(Profile::Quick, 1, Tolerances::default(), &[12], |_| {}).is_err());
    }

    #[test]
    fn chunked_cycles_count() {
        let (a, b) = mm1(0.5);
        let cycles = cycles_in_chunks(&a, &b, 250_000, 3).unwrap();
        assert_eq!(cycles.len(), 250_000);
        assert_eq!(cycles.iter().filter(|c| c.idle.is_none()).count(), 3);
    }
}
