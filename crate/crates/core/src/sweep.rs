//! Heavy-traffic sweeps over the scaled-interarrival family: interarrival
//! times `A / r` for each `r` in a grid, every listed policy run on the same
//! generated instance at each point.

use std::fs;
use std::io;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{RandomStream, SUBSTREAM_ARRIVALS, SUBSTREAM_SIZES};
use crate::error::{Error, Result};
use crate::estimators::{
    check_in_identity, exponent_fit, functional_moment, holder_diagnostic, lindley_walk,
    ratio_curve, regen_mean_sojourn, tail_split, AnalysisParams, ExponentFit, Functional,
    HolderBound, IdentityCheck, MomentEstimate, MomentInput, RatioRow, TailSplit, DEFAULT_S,
    DEFAULT_ZETA,
};
use crate::instance::Instance;
use crate::policies::PolicyKind;
use crate::simulator::simulate;
use crate::DistributionSpec;

pub const MIN_CYCLES_PER_POINT: usize = 100;

/// Index used in place of a policy index when deriving instance seeds.
const INSTANCE_SLOT: u64 = u64::MAX;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for `(point, slot)` under master seed `seed`. Fixed forever so that
/// individual sweep points can be re-run in isolation.
pub fn derive_seed(seed: u64, point: u64, slot: u64) -> u64 {
    mix(mix(mix(seed) ^ point) ^ slot)
}

pub fn instance_seed(seed: u64, point: usize) -> u64 {
    derive_seed(seed, point as u64, INSTANCE_SLOT)
}

pub fn policy_seed(seed: u64, point: usize, policy: usize) -> u64 {
    derive_seed(seed, point as u64, policy as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub arrival: DistributionSpec,
    pub size: DistributionSpec,
}

fn default_kappas() -> Vec<f64> {
    vec![1.0, 2.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub r_grid: Vec<f64>,
    pub policies: Vec<PolicyKind>,
    pub cycles_per_point: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_kappas")]
    pub kappas: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub s: f64,
    pub zeta: f64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            s: DEFAULT_S,
            zeta: DEFAULT_ZETA,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub system: SystemSection,
    pub sweep: SweepSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |m: String| Err(Error::Config(m));
        self.system.arrival.validate()?;
        self.system.size.validate()?;
        let grid = &self.sweep.r_grid;
        if grid.is_empty() {
            return cfg_err("r_grid is empty".into());
        }
        if let Some(r) = grid.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
            return cfg_err(format!("r_grid value {r} outside (0, 1)"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return cfg_err("r_grid must be strictly increasing".into());
        }
        if self.sweep.policies.is_empty() {
            return cfg_err("no policies listed".into());
        }
        for (i, p) in self.sweep.policies.iter().enumerate() {
            if self.sweep.policies[..i].contains(p) {
                return cfg_err(format!("policy {p} listed twice"));
            }
        }
        if self.sweep.cycles_per_point < MIN_CYCLES_PER_POINT {
            return cfg_err(format!(
                "cycles_per_point must be at least {MIN_CYCLES_PER_POINT}"
            ));
        }
        if let Some(k) = self.sweep.kappas.iter().find(|&&k| !(k >= 1.0 && k.is_finite())) {
            return cfg_err(format!("kappa {k} must be >= 1"));
        }
        self.analysis_params()?;
        for &r in grid {
            crate::distributions::system_load(&self.point_arrival(r), &self.system.size)?;
        }
        Ok(())
    }

    pub fn analysis_params(&self) -> Result<AnalysisParams> {
        let alpha = self.system.size.moments().finite_moment_order;
        AnalysisParams::new(alpha, self.analysis.s, self.analysis.zeta)
    }

    /// Interarrival law at grid value `r`.
    pub fn point_arrival(&self, r: f64) -> DistributionSpec {
        self.system.arrival.clone().scaled(r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyPoint {
    pub policy: PolicyKind,
    pub seed: u64,
    pub mean_sojourn: MomentEstimate,
    pub tail: TailSplit,
    pub holder: HolderBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointResult {
    pub index: usize,
    pub r: f64,
    pub rho: f64,
    pub instance_seed: u64,
    pub jobs: usize,
    pub cycles: usize,
    /// Policy-independent moments of P, N, I and W.
    pub moments: Vec<MomentEstimate>,
    pub identity: IdentityCheck,
    pub policies: Vec<PolicyPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitRecord {
    pub functional: Functional,
    pub kappa: f64,
    /// `1 - 2 kappa`, the growth exponent of the busy-period bounds; none for `W`.
    pub reference_slope: Option<f64>,
    pub fit: ExponentFit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepOutput {
    pub config: SweepConfig,
    pub points: Vec<PointResult>,
}

fn run_point(cfg: &SweepConfig, params: &AnalysisParams, index: usize) -> Result<PointResult> {
    let r = cfg.sweep.r_grid[index];
    let arrival = cfg.point_arrival(r);
    let iseed = instance_seed(cfg.sweep.seed, index);
    let inst = Instance::generate(
        &arrival,
        &cfg.system.size,
        cfg.sweep.cycles_per_point,
        &mut RandomStream::new(iseed, SUBSTREAM_ARRIVALS),
        &mut RandomStream::new(iseed, SUBSTREAM_SIZES),
    )?;
    let meta = inst.meta().expect("generated instances carry metadata").clone();
    let cycles = inst.busy_periods();
    let walk = lindley_walk(&inst);
    let alpha = Some(params.alpha);

    let mut moments = Vec::new();
    for &kappa in &cfg.sweep.kappas {
        for f in [Functional::P, Functional::N, Functional::I] {
            moments.push(functional_moment(MomentInput::Cycles(&cycles), f, kappa, alpha)?);
        }
        moments.push(functional_moment(
            MomentInput::PerJob {
                values: &walk.workload,
                cycles: &cycles,
            },
            Functional::W,
            kappa,
            alpha,
        )?);
    }
    let identity = check_in_identity(&cycles, meta.mu)?;

    let policies = cfg
        .sweep
        .policies
        .par_iter()
        .enumerate()
        .map(|(pi, &policy)| {
            let seed = policy_seed(cfg.sweep.seed, index, pi);
            let result = simulate(&inst, policy, seed)?;
            log::debug!("point {index} r={r} {policy}: {} jobs", result.jobs.len());
            Ok(PolicyPoint {
                policy,
                seed,
                mean_sojourn: regen_mean_sojourn(&result)?,
                tail: tail_split(&result, params, meta.rho)?,
                holder: holder_diagnostic(&result, params, meta.rho)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PointResult {
        index,
        r,
        rho: meta.rho,
        instance_seed: iseed,
        jobs: inst.len(),
        cycles: cycles.len(),
        moments,
        identity,
        policies,
    })
}

/// Runs every grid point. `jobs` caps the worker threads; `None` uses the
/// global pool. Output order is grid order, then policy order.
pub fn run_sweep(cfg: &SweepConfig, jobs: Option<usize>) -> Result<SweepOutput> {
    cfg.validate()?;
    let params = cfg.analysis_params()?;
    let work = || {
        (0..cfg.sweep.r_grid.len())
            .into_par_iter()
            .map(|i| run_point(cfg, &params, i))
            .collect::<Result<Vec<_>>>()
    };
    let points = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    Ok(SweepOutput {
        config: cfg.clone(),
        points,
    })
}

impl SweepOutput {
    /// One mean-sojourn row per (point, policy).
    pub fn estimate_rows(&self) -> Vec<(f64, PolicyKind, &MomentEstimate)> {
        self.points
            .iter()
            .flat_map(|p| p.policies.iter().map(move |q| (p.rho, q.policy, &q.mean_sojourn)))
            .collect()
    }

    fn series(&self, policy: PolicyKind) -> Option<Vec<(f64, f64)>> {
        self.points
            .iter()
            .map(|p| {
                p.policies
                    .iter()
                    .find(|q| q.policy == policy)
                    .map(|q| (p.rho, q.mean_sojourn.point))
            })
            .collect()
    }

    /// Ratio rows against SRPT for every other policy; empty without SRPT.
    pub fn ratio_rows(&self) -> Result<Vec<(PolicyKind, RatioRow)>> {
        let Some(srpt) = self.series(PolicyKind::Srpt) else {
            return Ok(Vec::new());
        };
        let mut rows = Vec::new();
        for &policy in &self.config.sweep.policies {
            if policy == PolicyKind::Srpt {
                continue;
            }
            let series = self.series(policy).expect("every point runs every policy");
            rows.extend(ratio_curve(&series, &srpt)?.into_iter().map(|r| (policy, r)));
        }
        Ok(rows)
    }

    /// Slope fits of every cycle moment across the grid (needs 3+ points).
    pub fn fits(&self) -> Result<Vec<FitRecord>> {
        if self.points.len() < 3 {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for &kappa in &self.config.sweep.kappas {
            for f in [Functional::P, Functional::N, Functional::W] {
                let pts: Vec<(f64, f64)> = self
                    .points
                    .iter()
                    .filter_map(|p| {
                        p.moments
                            .iter()
                            .find(|m| m.functional == f && m.kappa == kappa)
                            .map(|m| (p.rho, m.point))
                    })
                    .collect();
                if pts.iter().any(|p| !(p.1 > 0.0)) {
                    continue;
                }
                out.push(FitRecord {
                    functional: f,
                    kappa,
                    reference_slope: (f != Functional::W).then_some(1.0 - 2.0 * kappa),
                    fit: exponent_fit(&pts)?,
                });
            }
        }
        Ok(out)
    }

    pub fn write_estimates_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["policy", "functional", "kappa", "rho", "point", "ci", "cycles"])?;
        for (rho, policy, e) in self.estimate_rows() {
            w.write_record([
                policy.to_string(),
                e.functional.to_string(),
                e.kappa.to_string(),
                rho.to_string(),
                e.point.to_string(),
                e.ci_halfwidth.to_string(),
                e.cycles_used.to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn write_moments_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["functional", "kappa", "rho", "point", "ci", "cycles"])?;
        for p in &self.points {
            for e in &p.moments {
                w.write_record([
                    e.functional.to_string(),
                    e.kappa.to_string(),
                    p.rho.to_string(),
                    e.point.to_string(),
                    e.ci_halfwidth.to_string(),
                    e.cycles_used.to_string(),
                ])?;
            }
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn write_ratio_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["policy", "rho", "t_policy", "t_srpt", "ratio", "normalized"])?;
        for (policy, r) in self.ratio_rows()? {
            w.write_record([
                policy.to_string(),
                r.rho.to_string(),
                r.t_policy.to_string(),
                r.t_srpt.to_string(),
                r.ratio.to_string(),
                r.normalized.to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Writes `estimates.csv`, `moments.csv`, `ratio_curve.csv`,
    /// `fits.json` and `summary.json` into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let create = |name: &str| {
            let path = dir.join(name);
            fs::File::create(&path).map_err(|e| Error::io(path, e))
        };
        self.write_estimates_csv(create("estimates.csv")?)?;
        self.write_moments_csv(create("moments.csv")?)?;
        self.write_ratio_csv(create("ratio_curve.csv")?)?;
        serde_json::to_writer_pretty(create("fits.json")?, &self.fits()?)?;
        serde_json::to_writer_pretty(create("summary.json")?, self)?;
        Ok(())
    }
}
