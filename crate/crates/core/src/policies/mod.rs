//! Scheduling disciplines.
//!
//! A [`Scheduler`] is driven by the simulator through arrival, completion and
//! internal (target-hit / tie-merge) events and answers with an [`Allocation`]
//! of the unit-speed server. Blind schedulers never see a job size: the
//! simulator hands them `size: None` at arrival and the only per-job quantity
//! they can read afterwards is attained service through [`ServiceView`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{RandomStream, SUBSTREAM_POLICY};
use crate::error::{Error, Result};
use crate::instance::{pow2, JobId};

mod basic;
mod ermlf;
mod mlf;
mod sharing;

pub use basic::{Fifo, Srpt};
pub use ermlf::{ermlf_displacement, ermlf_initial_target, ermlf_requeue_on_target, ExtendedRmlf};
pub use mlf::MultilevelFeedback;
pub use sharing::{Fb, Ps};

/// Rate of the exponential law of the randomized target offsets.
pub const THETA: f64 = 12.0;

/// Relative tolerance used when grouping least-attained jobs and when
/// recognising that a target has been reached.
pub const SERVICE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Srpt,
    Fifo,
    Ps,
    Fb,
    Mlf,
    Rmlf,
    Ermlf,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 7] = [
        PolicyKind::Srpt,
        PolicyKind::Fifo,
        PolicyKind::Ps,
        PolicyKind::Fb,
        PolicyKind::Mlf,
        PolicyKind::Rmlf,
        PolicyKind::Ermlf,
    ];

    pub const BLIND: [PolicyKind; 6] = [
        PolicyKind::Fifo,
        PolicyKind::Ps,
        PolicyKind::Fb,
        PolicyKind::Mlf,
        PolicyKind::Rmlf,
        PolicyKind::Ermlf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Srpt => "srpt",
            PolicyKind::Fifo => "fifo",
            PolicyKind::Ps => "ps",
            PolicyKind::Fb => "fb",
            PolicyKind::Mlf => "mlf",
            PolicyKind::Rmlf => "rmlf",
            PolicyKind::Ermlf => "ermlf",
        }
    }

    pub fn is_blind(self) -> bool {
        self != PolicyKind::Srpt
    }

    /// Fresh scheduler state; randomized policies draw from substream
    /// [`SUBSTREAM_POLICY`] of `seed`.
    pub fn scheduler(self, seed: u64) -> Box<dyn Scheduler> {
        match self {
            PolicyKind::Srpt => Box::new(Srpt::default()),
            PolicyKind::Fifo => Box::new(Fifo::default()),
            PolicyKind::Ps => Box::new(Ps::default()),
            PolicyKind::Fb => Box::new(Fb::default()),
            PolicyKind::Mlf => Box::new(MultilevelFeedback::deterministic()),
            PolicyKind::Rmlf => Box::new(MultilevelFeedback::randomized(RandomStream::new(
                seed,
                SUBSTREAM_POLICY,
            ))),
            PolicyKind::Ermlf => Box::new(ExtendedRmlf::new(RandomStream::new(
                seed,
                SUBSTREAM_POLICY,
            ))),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownPolicy(s.to_string()))
    }
}

/// What the scheduler learns when a job is released.
#[derive(Clone, Copy, Debug)]
pub struct Arrival {
    pub id: JobId,
    pub release: f64,
    /// Only populated for clairvoyant schedulers.
    pub size: Option<f64>,
}

/// Read-only access to attained service, indexed by job id.
#[derive(Clone, Copy)]
pub struct ServiceView<'a> {
    attained: &'a [f64],
}

impl<'a> ServiceView<'a> {
    pub fn new(attained: &'a [f64]) -> Self {
        ServiceView { attained }
    }

    pub fn attained(&self, id: JobId) -> f64 {
        self.attained[id - 1]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Allocation {
    Idle,
    /// One job at rate 1.
    Single(JobId),
    /// Rates summing to 1.
    Shared(Vec<(JobId, f64)>),
}

pub trait Scheduler: Send {
    fn kind(&self) -> PolicyKind;

    fn on_arrival(&mut self, arrival: Arrival, view: &ServiceView<'_>) -> Result<()>;

    fn on_completion(&mut self, id: JobId, view: &ServiceView<'_>) -> Result<()>;

    fn allocation(&self, view: &ServiceView<'_>) -> Allocation;

    /// Time until the next scheduler-internal event under the current allocation.
    fn next_internal(&self, _view: &ServiceView<'_>) -> Option<f64> {
        None
    }

    /// Called once the time returned by [`Scheduler::next_internal`] has elapsed.
    fn on_internal(&mut self, _view: &ServiceView<'_>) -> Result<()> {
        Ok(())
    }

    /// Structural checks on the current state; used by tests and the verifier.
    fn check_invariants(&self, _view: &ServiceView<'_>) -> Result<()> {
        Ok(())
    }
}

/// Randomized target multiplier `max(1, 2 - beta)` of one job.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BetaFactor {
    /// Position of the job within its busy period (1-based).
    pub j: usize,
    /// `+inf` for `j = 1`.
    pub beta: f64,
    /// In `[1, 2]`.
    pub factor: f64,
}

impl BetaFactor {
    pub fn from_beta(j: usize, beta: f64) -> Self {
        BetaFactor {
            j,
            beta,
            factor: (2.0 - beta).max(1.0),
        }
    }

    /// `beta = 0`, i.e. factor 2: targets `2^(i+1)` as in plain MLF.
    pub fn fixed(j: usize) -> Self {
        BetaFactor::from_beta(j, 0.0)
    }
}

/// Inverse-CDF draw of `beta_j` with `P(beta_j <= x) = 1 - exp(-theta x ln j)`.
pub fn beta_from_uniform(j: usize, u: f64) -> BetaFactor {
    assert!(j >= 1, "job index is 1-based");
    let rate = THETA * (j as f64).ln();
    let beta = if rate == 0.0 {
        f64::INFINITY
    } else {
        -(1.0 - u).ln() / rate
    };
    BetaFactor::from_beta(j, beta)
}

/// Always consumes exactly one uniform, including for `j = 1`.
pub fn draw_beta(j: usize, stream: &mut RandomStream) -> BetaFactor {
    beta_from_uniform(j, stream.uniform())
}

/// `2^level * factor`.
pub fn mlf_target(level: i32, factor: &BetaFactor) -> f64 {
    pow2(level) * factor.factor
}

/// Least remaining time; ties to the earlier release, then the smaller id.
pub fn srpt_decision(active: &[(JobId, f64, f64)]) -> Option<JobId> {
    active
        .iter()
        .min_by(|a, b| {
            a.1.total_cmp(&b.1)
                .then(a.2.total_cmp(&b.2))
                .then(a.0.cmp(&b.0))
        })
        .map(|a| a.0)
}

/// Earliest release.
pub fn fifo_decision(active: &[(JobId, f64)]) -> Option<JobId> {
    active
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|a| a.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sharing {
    Ps,
    Fb,
}

/// Rates of the sharing disciplines over `(id, attained)` pairs.
///
/// PS splits equally over everyone; FB splits equally over the jobs whose
/// attained service is within a relative [`SERVICE_EPS`] of the minimum.
pub fn share_rates(rule: Sharing, active: &[(JobId, f64)]) -> Vec<(JobId, f64)> {
    if active.is_empty() {
        return Vec::new();
    }
    match rule {
        Sharing::Ps => {
            let r = 1.0 / active.len() as f64;
            active.iter().map(|&(id, _)| (id, r)).collect()
        }
        Sharing::Fb => {
            let min = active.iter().map(|a| a.1).fold(f64::INFINITY, f64::min);
            let members: Vec<JobId> = active
                .iter()
                .filter(|a| a.1 <= min * (1.0 + SERVICE_EPS))
                .map(|a| a.0)
                .collect();
            let r = 1.0 / members.len() as f64;
            let mut rates: Vec<(JobId, f64)> = active
                .iter()
                .map(|&(id, _)| (id, if members.contains(&id) { r } else { 0.0 }))
                .collect();
            rates.retain(|x| x.1 > 0.0);
            rates
        }
    }
}

/// Queue of a multilevel-feedback job. `Star` is the new-job queue of eRMLF
/// and orders below every numbered level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum QueueLevel {
    Star,
    Level(i32),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MlfJobState {
    pub id: JobId,
    pub level: QueueLevel,
    pub target: f64,
    pub factor: BetaFactor,
}
