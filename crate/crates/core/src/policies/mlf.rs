use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{
    draw_beta, mlf_target, Allocation, Arrival, BetaFactor, MlfJobState, PolicyKind, QueueLevel,
    Scheduler, ServiceView, SERVICE_EPS,
};
use crate::distributions::RandomStream;
use crate::error::{Error, Result};
use crate::instance::JobId;

/// Numbered FCFS queues; empty queues are dropped eagerly so the first map
/// entry is always the lowest non-empty queue.
#[derive(Debug, Default)]
pub(crate) struct LevelQueues {
    queues: BTreeMap<i32, VecDeque<JobId>>,
}

impl LevelQueues {
    pub(crate) fn push_back(&mut self, level: i32, id: JobId) {
        self.queues.entry(level).or_default().push_back(id);
    }

    pub(crate) fn lowest(&self) -> Option<(i32, JobId)> {
        self.queues
            .first_key_value()
            .map(|(&level, q)| (level, *q.front().expect("empty queues are removed")))
    }

    pub(crate) fn lowest_level(&self) -> Option<i32> {
        self.queues.first_key_value().map(|(&l, _)| l)
    }

    pub(crate) fn remove(&mut self, level: i32, id: JobId) -> Result<()> {
        let q = self
            .queues
            .get_mut(&level)
            .ok_or_else(|| Error::internal(format!("queue {level} is empty, job {id} not in it")))?;
        // removals are almost always at the front
        let pos = q
            .iter()
            .position(|&x| x == id)
            .ok_or_else(|| Error::internal(format!("job {id} not found in queue {level}")))?;
        q.remove(pos);
        if q.is_empty() {
            self.queues.remove(&level);
        }
        Ok(())
    }

    /// Jobs from the highest queue down, each queue front to back.
    pub(crate) fn top_down(&self) -> impl Iterator<Item = (i32, JobId)> + '_ {
        self.queues
            .iter()
            .rev()
            .flat_map(|(&l, q)| q.iter().map(move |&id| (l, id)))
    }
}

/// Release order must map to a non-increasing queue sequence, with FCFS
/// precedence inside each queue. Reading queues top-down and front to back,
/// ids must therefore strictly increase.
pub(crate) fn check_order(sequence: impl Iterator<Item = (QueueLevel, JobId)>) -> Result<()> {
    let mut prev: Option<(QueueLevel, JobId)> = None;
    for (level, id) in sequence {
        if let Some((pl, pid)) = prev {
            if pid >= id {
                return Err(Error::internal(format!(
                    "order violated: job {pid} in {pl:?} precedes job {id} in {level:?}"
                )));
            }
        }
        prev = Some((level, id));
    }
    Ok(())
}

#[derive(Debug)]
enum Factors {
    /// Plain MLF: every factor is 2.
    Fixed,
    Random(RandomStream),
}

/// MLF and RMLF over queues `Q_0, Q_1, ...`.
///
/// Arrivals join the back of `Q_0`; the front of the lowest non-empty queue is
/// served; on reaching its target a job moves to the back of the next queue
/// with the target doubled. The `j` of each beta draw is the job's position
/// inside the current busy period.
#[derive(Debug)]
pub struct MultilevelFeedback {
    factors: Factors,
    jobs: HashMap<JobId, MlfJobState>,
    queues: LevelQueues,
    position: usize,
}

impl MultilevelFeedback {
    pub fn deterministic() -> Self {
        Self::with(Factors::Fixed)
    }

    pub fn randomized(stream: RandomStream) -> Self {
        Self::with(Factors::Random(stream))
    }

    fn with(factors: Factors) -> Self {
        MultilevelFeedback {
            factors,
            jobs: HashMap::new(),
            queues: LevelQueues::default(),
            position: 0,
        }
    }

    pub fn job_state(&self, id: JobId) -> Option<&MlfJobState> {
        self.jobs.get(&id)
    }

    fn served(&self) -> Option<&MlfJobState> {
        self.queues.lowest().map(|(_, id)| &self.jobs[&id])
    }
}

fn level_of(state: &MlfJobState) -> Result<i32> {
    match state.level {
        QueueLevel::Level(l) => Ok(l),
        QueueLevel::Star => Err(Error::internal("rmlf has no new-job queue")),
    }
}

impl Scheduler for MultilevelFeedback {
    fn kind(&self) -> PolicyKind {
        match self.factors {
            Factors::Fixed => PolicyKind::Mlf,
            Factors::Random(_) => PolicyKind::Rmlf,
        }
    }

    fn on_arrival(&mut self, arrival: Arrival, _view: &ServiceView<'_>) -> Result<()> {
        if self.jobs.is_empty() {
            self.position = 0;
        }
        self.position += 1;
        let factor = match &mut self.factors {
            Factors::Fixed => BetaFactor::fixed(self.position),
            Factors::Random(stream) => draw_beta(self.position, stream),
        };
        let state = MlfJobState {
            id: arrival.id,
            level: QueueLevel::Level(0),
            target: mlf_target(0, &factor),
            factor,
        };
        self.jobs.insert(arrival.id, state);
        self.queues.push_back(0, arrival.id);
        Ok(())
    }

    fn on_completion(&mut self, id: JobId, _view: &ServiceView<'_>) -> Result<()> {
        let state = self
            .jobs
            .remove(&id)
            .ok_or_else(|| Error::internal(format!("unknown job {id} completed")))?;
        self.queues.remove(level_of(&state)?, id)
    }

    fn allocation(&self, _view: &ServiceView<'_>) -> Allocation {
        self.queues
            .lowest()
            .map_or(Allocation::Idle, |(_, id)| Allocation::Single(id))
    }

    fn next_internal(&self, view: &ServiceView<'_>) -> Option<f64> {
        self.served()
            .map(|s| (s.target - view.attained(s.id)).max(0.0))
    }

    fn on_internal(&mut self, view: &ServiceView<'_>) -> Result<()> {
        let (level, id) = self
            .queues
            .lowest()
            .ok_or_else(|| Error::internal("target hit with no job in service"))?;
        let state = self.jobs.get_mut(&id).expect("queued jobs have state");
        let attained = view.attained(id);
        if attained < state.target * (1.0 - SERVICE_EPS) {
            return Err(Error::internal(format!(
                "job {id} signalled a target hit at {attained} below target {}",
                state.target
            )));
        }
        self.queues.remove(level, id)?;
        state.level = QueueLevel::Level(level + 1);
        state.target *= 2.0;
        self.queues.push_back(level + 1, id);
        Ok(())
    }

    fn check_invariants(&self, view: &ServiceView<'_>) -> Result<()> {
        check_order(
            self.queues
                .top_down()
                .map(|(l, id)| (QueueLevel::Level(l), id)),
        )?;
        for s in self.jobs.values() {
            let level = level_of(s)?;
            if level < 0 {
                return Err(Error::internal(format!("job {} below Q_0", s.id)));
            }
            if s.target != mlf_target(level, &s.factor) {
                return Err(Error::internal(format!(
                    "job {} has target {} at level {level}",
                    s.id, s.target
                )));
            }
            let lo = mlf_target(level, &BetaFactor::from_beta(1, f64::INFINITY));
            if !(lo..=2.0 * lo).contains(&s.target) {
                return Err(Error::internal(format!("job {} target out of range", s.id)));
            }
            if view.attained(s.id) > s.target * (1.0 + SERVICE_EPS) {
                return Err(Error::internal(format!("job {} overran its target", s.id)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrive(s: &mut MultilevelFeedback, id: JobId, view: &ServiceView<'_>) {
        s.on_arrival(
            Arrival {
                id,
                release: id as f64,
                size: None,
            },
            view,
        )
        .unwrap();
    }

    #[test]
    fn serves_front_of_lowest_queue() {
        // J1, J2 pushed to Q_1, then J3 arrives into Q_0
        let mut m = MultilevelFeedback::deterministic();
        let mut att = vec![0.0; 3];
        arrive(&mut m, 1, &ServiceView::new(&att));
        arrive(&mut m, 2, &ServiceView::new(&att));
        att[0] = 2.0;
        m.on_internal(&ServiceView::new(&att)).unwrap();
        att[1] = 2.0;
        m.on_internal(&ServiceView::new(&att)).unwrap();
        assert_eq!(m.job_state(1).unwrap().level, QueueLevel::Level(1));
        assert_eq!(m.allocation(&ServiceView::new(&att)), Allocation::Single(1));

        arrive(&mut m, 3, &ServiceView::new(&att));
        assert_eq!(m.allocation(&ServiceView::new(&att)), Allocation::Single(3));
        m.check_invariants(&ServiceView::new(&att)).unwrap();
    }

    #[test]
    fn arrival_preempts_higher_queue_job() {
        let mut m = MultilevelFeedback::randomized(RandomStream::new(1, 2));
        let mut att = vec![0.0; 2];
        arrive(&mut m, 1, &ServiceView::new(&att));
        // j = 1 has factor 1
        assert_eq!(m.job_state(1).unwrap().target, 1.0);
        att[0] = 1.0;
        m.on_internal(&ServiceView::new(&att)).unwrap();
        assert_eq!(m.job_state(1).unwrap().target, 2.0);
        att[0] = 1.4;
        assert_eq!(m.allocation(&ServiceView::new(&att)), Allocation::Single(1));
        arrive(&mut m, 2, &ServiceView::new(&att));
        assert_eq!(m.allocation(&ServiceView::new(&att)), Allocation::Single(2));
        assert_eq!(m.job_state(1).unwrap().level, QueueLevel::Level(1));
    }

    #[test]
    fn target_hit_doubles_and_requeues() {
        let mut m = MultilevelFeedback::randomized(RandomStream::new(3, 2));
        let mut att = vec![0.4];
        arrive(&mut m, 1, &ServiceView::new(&att));
        assert_eq!(m.next_internal(&ServiceView::new(&att)), Some(0.6));
        // early target signal is a sequencing bug
        assert!(m.on_internal(&ServiceView::new(&att)).is_err());
        att[0] = 1.0;
        m.on_internal(&ServiceView::new(&att)).unwrap();
        let s = m.job_state(1).unwrap();
        assert_eq!((s.level, s.target), (QueueLevel::Level(1), 2.0));
    }

    #[test]
    fn mlf_targets_are_powers_of_two() {
        let mut m = MultilevelFeedback::deterministic();
        let att = vec![0.0; 4];
        for id in 1..=4 {
            arrive(&mut m, id, &ServiceView::new(&att));
            assert_eq!(m.job_state(id).unwrap().target, 2.0);
        }
    }

    #[test]
    fn order_checker_flags_inversions() {
        let ok = [(QueueLevel::Level(2), 1), (QueueLevel::Level(0), 3), (QueueLevel::Star, 4)];
        assert!(check_order(ok.into_iter()).is_ok());
        let bad = [(QueueLevel::Level(2), 3), (QueueLevel::Level(0), 1)];
        assert!(check_order(bad.into_iter()).is_err());
    }
}
