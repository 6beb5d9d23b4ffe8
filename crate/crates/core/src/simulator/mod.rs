//! Event-to-event execution of a scheduler on an instance.
//!
//! Between events the allocation is constant, so attained and remaining
//! service advance linearly and the next completion or scheduler-internal
//! event is found in closed form. Event times are compared exactly; events at
//! the same instant are processed completion, then target hit, then arrival.
//! All tolerances are relative, so scaling an instance by a power of two
//! scales the whole trajectory exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{CycleRecord, Instance, JobId};
use crate::policies::{Allocation, Arrival, PolicyKind, Scheduler, ServiceView};

mod brute;
mod export;

pub use brute::{brute_force_min_flow, BRUTE_FORCE_MAX_JOBS};
pub use export::{write_cycles_csv, write_jobs_csv, SimSummary};

/// A job whose remaining work is at most this fraction of its size is done.
pub const EVENT_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Completion,
    /// Target hit of a multilevel-feedback job.
    TargetHit,
    /// FB tie set reaching the next attained level.
    Reallocation,
    Arrival,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub job: Option<JobId>,
    /// Position in processing order.
    pub seq: u64,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SimOptions {
    /// Run the scheduler's structural checks after every event.
    pub check_invariants: bool,
    pub record_events: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JobOutcome {
    pub id: JobId,
    pub release: f64,
    pub size: f64,
    pub completion: f64,
    pub sojourn: f64,
    /// Unfinished work in the system just before this job's release.
    pub workload_at_arrival: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimCycle {
    pub record: CycleRecord,
    pub sojourn_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub policy: PolicyKind,
    pub seed: u64,
    pub jobs: Vec<JobOutcome>,
    pub cycles: Vec<SimCycle>,
    pub events: Vec<Event>,
}

impl SimResult {
    pub fn total_flow(&self) -> f64 {
        self.jobs.iter().map(|j| j.sojourn).sum()
    }

    pub fn mean_sojourn(&self) -> f64 {
        self.total_flow() / self.jobs.len() as f64
    }

    pub fn cycle_records(&self) -> Vec<CycleRecord> {
        self.cycles.iter().map(|c| c.record.clone()).collect()
    }

    /// Intervals during which the server worked.
    pub fn busy_intervals(&self) -> Vec<(f64, f64)> {
        self.cycles
            .iter()
            .map(|c| (c.record.start, c.record.end))
            .collect()
    }
}

/// Closest upcoming completion or scheduler-internal event, as a delay from now.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InternalEvent {
    pub delay: f64,
    pub kind: EventKind,
}

/// Completions take precedence over an internal event at the same delay.
pub fn next_internal_event(
    allocation: &Allocation,
    remaining: impl Fn(JobId) -> f64,
    internal: Option<(f64, EventKind)>,
) -> Option<InternalEvent> {
    let completion = match allocation {
        Allocation::Idle => None,
        Allocation::Single(id) => Some(remaining(*id)),
        Allocation::Shared(rates) => rates
            .iter()
            .map(|&(id, r)| remaining(id) / r)
            .reduce(f64::min),
    };
    let done = completion.map(|delay| InternalEvent {
        delay,
        kind: EventKind::Completion,
    });
    let other = internal.map(|(delay, kind)| InternalEvent { delay, kind });
    match (done, other) {
        (Some(c), Some(o)) => Some(if o.delay < c.delay { o } else { c }),
        (c, o) => c.or(o),
    }
}

pub fn simulate(inst: &Instance, policy: PolicyKind, seed: u64) -> Result<SimResult> {
    let mut sched = policy.scheduler(seed);
    simulate_with(inst, sched.as_mut(), seed, SimOptions::default())
}

struct Run<'a> {
    inst: &'a Instance,
    attained: Vec<f64>,
    remaining: Vec<f64>,
    outcomes: Vec<JobOutcome>,
    cycles: Vec<SimCycle>,
    events: Vec<Event>,
    record_events: bool,
    seq: u64,
    active: usize,
    workload: f64,
    now: f64,
    open: Option<SimCycle>,
}

impl Run<'_> {
    fn log(&mut self, kind: EventKind, job: Option<JobId>) {
        if self.record_events {
            self.events.push(Event {
                time: self.now,
                kind,
                job,
                seq: self.seq,
            });
        }
        self.seq += 1;
    }

    fn drained(&self, id: JobId) -> bool {
        self.remaining[id - 1] <= EVENT_EPS * self.inst.jobs()[id - 1].size
    }

    fn advance(&mut self, alloc: &Allocation, step: f64) {
        if step <= 0.0 {
            return;
        }
        match alloc {
            Allocation::Idle => {}
            Allocation::Single(id) => {
                self.attained[id - 1] += step;
                self.remaining[id - 1] -= step;
            }
            Allocation::Shared(rates) => {
                for &(id, r) in rates {
                    self.attained[id - 1] += r * step;
                    self.remaining[id - 1] -= r * step;
                }
            }
        }
        self.workload = (self.workload - step).max(0.0);
    }

    fn arrive(&mut self, idx: usize, sched: &mut dyn Scheduler) -> Result<()> {
        let job = self.inst.jobs()[idx];
        self.now = job.release;
        if self.active == 0 {
            let prev_end = self.cycles.last().map(|c| c.record.end);
            self.open = Some(SimCycle {
                record: CycleRecord {
                    index: self.cycles.len() + 1,
                    first_job: job.id,
                    last_job: job.id,
                    n: 0,
                    p: 0.0,
                    idle: prev_end.map(|e| (job.release - e).max(0.0)),
                    start: job.release,
                    end: job.release,
                },
                sojourn_sum: 0.0,
            });
            self.workload = 0.0;
        }
        let cycle = self.open.as_mut().expect("cycle open while busy");
        cycle.record.n += 1;
        cycle.record.last_job = job.id;
        self.outcomes[idx].workload_at_arrival = self.workload;
        self.workload += job.size;
        self.active += 1;
        self.log(EventKind::Arrival, Some(job.id));
        let size = (!sched.kind().is_blind()).then_some(job.size);
        sched.on_arrival(
            Arrival {
                id: job.id,
                release: job.release,
                size,
            },
            &ServiceView::new(&self.attained),
        )
    }

    fn complete(&mut self, id: JobId, sched: &mut dyn Scheduler) -> Result<()> {
        let out = &mut self.outcomes[id - 1];
        out.completion = self.now;
        out.sojourn = self.now - out.release;
        self.remaining[id - 1] = 0.0;
        let cycle = self.open.as_mut().expect("cycle open while busy");
        cycle.sojourn_sum += out.sojourn;
        self.active -= 1;
        self.log(EventKind::Completion, Some(id));
        sched.on_completion(id, &ServiceView::new(&self.attained))?;
        if self.active == 0 {
            let mut cycle = self.open.take().expect("cycle open while busy");
            cycle.record.end = self.now;
            cycle.record.p = self.now - cycle.record.start;
            self.cycles.push(cycle);
            self.workload = 0.0;
        }
        Ok(())
    }
}

/// Runs `sched` on `inst`. `seed` is only recorded in the result.
pub fn simulate_with(
    inst: &Instance,
    sched: &mut dyn Scheduler,
    seed: u64,
    options: SimOptions,
) -> Result<SimResult> {
    let jobs = inst.jobs();
    let n = jobs.len();
    let mut run = Run {
        inst,
        attained: vec![0.0; n],
        remaining: jobs.iter().map(|j| j.size).collect(),
        outcomes: jobs
            .iter()
            .map(|j| JobOutcome {
                id: j.id,
                release: j.release,
                size: j.size,
                completion: f64::NAN,
                sojourn: f64::NAN,
                workload_at_arrival: 0.0,
            })
            .collect(),
        cycles: Vec::new(),
        events: Vec::new(),
        record_events: options.record_events,
        seq: 0,
        active: 0,
        workload: 0.0,
        now: 0.0,
        open: None,
    };
    let mut next = 0usize;
    let mut finished: Vec<JobId> = Vec::new();

    loop {
        if run.active == 0 {
            if next == n {
                break;
            }
            run.arrive(next, sched)?;
            next += 1;
            if options.check_invariants {
                sched.check_invariants(&ServiceView::new(&run.attained))?;
            }
            continue;
        }

        let view = ServiceView::new(&run.attained);
        let alloc = sched.allocation(&view);
        if alloc == Allocation::Idle {
            return Err(Error::internal(format!(
                "scheduler idles with {} jobs present at t={}",
                run.active, run.now
            )));
        }
        let internal_kind = match sched.kind() {
            PolicyKind::Fb => EventKind::Reallocation,
            _ => EventKind::TargetHit,
        };
        let internal = sched.next_internal(&view).map(|d| (d, internal_kind));
        let remaining = &run.remaining;
        let ev = next_internal_event(&alloc, |id| remaining[id - 1], internal)
            .expect("a non-idle allocation always has a completion candidate");
        let t_arr = jobs.get(next).map_or(f64::INFINITY, |j| j.release);

        if run.now + ev.delay <= t_arr {
            run.advance(&alloc, ev.delay);
            run.now += ev.delay;

            finished.clear();
            match &alloc {
                Allocation::Single(id) => {
                    if run.drained(*id) {
                        finished.push(*id);
                    }
                }
                Allocation::Shared(rates) => finished.extend(
                    rates
                        .iter()
                        .filter(|&&(id, _)| run.drained(id))
                        .map(|&(id, _)| id),
                ),
                Allocation::Idle => unreachable!(),
            }
            finished.sort_unstable();
            for &id in &finished {
                run.complete(id, sched)?;
            }
            if finished.is_empty() {
                if ev.kind == EventKind::Completion {
                    return Err(Error::internal(format!(
                        "completion due at t={} but no job finished",
                        run.now
                    )));
                }
                let served = match &alloc {
                    Allocation::Single(id) => Some(*id),
                    _ => None,
                };
                run.log(ev.kind, served);
                sched.on_internal(&ServiceView::new(&run.attained))?;
            }
        } else {
            let step = t_arr - run.now;
            run.advance(&alloc, step);
            run.arrive(next, sched)?;
            next += 1;
        }
        if options.check_invariants {
            sched.check_invariants(&ServiceView::new(&run.attained))?;
        }
    }

    Ok(SimResult {
        policy: sched.kind(),
        seed,
        jobs: run.outcomes,
        cycles: run.cycles,
        events: run.events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::ExtendedRmlf;

    fn two_jobs() -> Instance {
        Instance::from_pairs([(0.0, 3.0), (1.0, 1.0)]).unwrap()
    }

    fn sojourns(r: &SimResult) -> Vec<f64> {
        r.jobs.iter().map(|j| j.sojourn).collect()
    }

    #[test]
    fn srpt_hand_simulation() {
        let r = simulate(&two_jobs(), PolicyKind::Srpt, 0).unwrap();
        assert_eq!(sojourns(&r), vec![4.0, 1.0]);
        assert_eq!(r.total_flow(), 5.0);
    }

    #[test]
    fn fifo_hand_simulation() {
        let r = simulate(&two_jobs(), PolicyKind::Fifo, 0).unwrap();
        assert_eq!(sojourns(&r), vec![3.0, 3.0]);
        assert_eq!(r.total_flow(), 6.0);
    }

    #[test]
    fn ps_simultaneous_completion() {
        // releases must be distinct; the second job arrives an instant later
        let inst = Instance::from_pairs([(0.0, 1.0), (1e-12, 1.0)]).unwrap();
        let r = simulate(&inst, PolicyKind::Ps, 0).unwrap();
        for j in &r.jobs {
            assert!((j.completion - 2.0).abs() < 1e-9, "{j:?}");
        }
    }

    #[test]
    fn fb_pair_completes_together_in_id_order() {
        let inst = Instance::from_pairs([(0.0, 1.0), (1e-12, 1.0)]).unwrap();
        let mut sched = PolicyKind::Fb.scheduler(0);
        let r = simulate_with(
            &inst,
            sched.as_mut(),
            0,
            SimOptions {
                record_events: true,
                ..Default::default()
            },
        )
        .unwrap();
        let done: Vec<(EventKind, Option<JobId>)> = r
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Completion)
            .map(|e| (e.kind, e.job))
            .collect();
        assert_eq!(
            done,
            vec![(EventKind::Completion, Some(1)), (EventKind::Completion, Some(2))]
        );
        assert!((r.jobs[0].completion - 2.0).abs() < 1e-9);
        assert_eq!(r.jobs[0].completion, r.jobs[1].completion);
    }

    #[test]
    fn next_event_candidates() {
        let rem = |_| 2.5;
        let ev = next_internal_event(&Allocation::Single(1), rem, None).unwrap();
        assert_eq!((ev.delay, ev.kind), (2.5, EventKind::Completion));

        let rem = |_| 10.0;
        let ev = next_internal_event(
            &Allocation::Single(1),
            rem,
            Some((1.0 - 0.4, EventKind::TargetHit)),
        )
        .unwrap();
        assert_eq!(ev.kind, EventKind::TargetHit);
        assert!((ev.delay - 0.6).abs() < 1e-15);

        let rem = |_| 1.0;
        let ev = next_internal_event(
            &Allocation::Shared(vec![(1, 0.5), (2, 0.5)]),
            rem,
            None,
        )
        .unwrap();
        assert_eq!((ev.delay, ev.kind), (2.0, EventKind::Completion));

        // a target coinciding with completion loses
        let ev = next_internal_event(
            &Allocation::Single(1),
            |_| 1.0,
            Some((1.0, EventKind::TargetHit)),
        )
        .unwrap();
        assert_eq!(ev.kind, EventKind::Completion);
        assert_eq!(next_internal_event(&Allocation::Idle, |_| 1.0, None), None);
    }

    #[test]
    fn coincident_completion_and_target_completes() {
        // MLF target of job 1 is 2 and its size is 2
        let inst = Instance::from_pairs([(0.0, 2.0)]).unwrap();
        let mut sched = PolicyKind::Mlf.scheduler(0);
        let r = simulate_with(
            &inst,
            sched.as_mut(),
            0,
            SimOptions {
                record_events: true,
                check_invariants: true,
            },
        )
        .unwrap();
        let kinds: Vec<EventKind> = r.events.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec![EventKind::Arrival, EventKind::Completion]);
    }

    #[test]
    fn completion_at_arrival_instant_goes_first() {
        let inst = Instance::from_pairs([(0.0, 1.0), (1.0, 1.0)]).unwrap();
        let r = simulate(&inst, PolicyKind::Fifo, 0).unwrap();
        assert_eq!(r.cycles.len(), 2);
        assert_eq!(r.jobs[0].completion, 1.0);
        assert_eq!(inst.busy_periods().len(), 2);
        // a hair later and the arrival joins the busy period
        let inst = Instance::from_pairs([(0.0, 1.0 + 5e-10), (1.0, 1.0)]).unwrap();
        assert_eq!(simulate(&inst, PolicyKind::Fifo, 0).unwrap().cycles.len(), 1);
        assert_eq!(inst.busy_periods().len(), 1);
    }

    #[test]
    fn power_of_two_scaling_is_exact() {
        let inst = Instance::from_pairs([(0.0, 0.3), (0.1, 0.02), (0.15, 1.7), (0.2, 0.05), (2.5, 0.4)]).unwrap();
        // MLF and RMLF have a bottom queue with an absolute threshold
        for policy in PolicyKind::ALL.into_iter().filter(|p| !matches!(p, PolicyKind::Mlf | PolicyKind::Rmlf)) {
            let a = simulate(&inst, policy, 5).unwrap();
            for e in [-60, -20, 30] {
                let f = crate::instance::pow2(e);
                let b = simulate(&inst.scale(f).unwrap(), policy, 5).unwrap();
                for (x, y) in a.jobs.iter().zip(&b.jobs) {
                    assert_eq!(x.completion * f, y.completion, "{policy} 2^{e}");
                }
            }
        }
    }

    #[test]
    fn rmlf_trajectory_by_hand() {
        // J1 size 3 at 0 (factor 1), J2 size 3 at 0.5
        let inst = Instance::from_pairs([(0.0, 3.0), (0.5, 3.0)]).unwrap();
        let mut sched = PolicyKind::Mlf.scheduler(0);
        let r = simulate_with(
            &inst,
            sched.as_mut(),
            0,
            SimOptions {
                record_events: true,
                check_invariants: true,
            },
        )
        .unwrap();
        // MLF targets 2, 4: J1 runs [0,2], J2 [2,4], J1 [4,5] done, J2 [5,6] done
        assert_eq!(r.jobs[0].completion, 5.0);
        assert_eq!(r.jobs[1].completion, 6.0);
    }

    #[test]
    fn ermlf_runs_new_arrivals_first() {
        let inst = Instance::from_pairs([(0.0, 3.0), (0.5, 0.1)]).unwrap();
        let mut sched = ExtendedRmlf::new(crate::distributions::RandomStream::new(0, 2));
        let r = simulate_with(
            &inst,
            &mut sched,
            0,
            SimOptions {
                check_invariants: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((r.jobs[1].sojourn - 0.1).abs() < 1e-12);
        assert!((r.jobs[0].completion - 3.1).abs() < 1e-12);
    }

    #[test]
    fn workload_before_arrivals() {
        let r = simulate(&two_jobs(), PolicyKind::Ps, 0).unwrap();
        assert_eq!(r.jobs[0].workload_at_arrival, 0.0);
        assert_eq!(r.jobs[1].workload_at_arrival, 2.0);
    }
}
