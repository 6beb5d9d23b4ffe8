use std::collections::HashMap;

use super::mlf::{check_order, LevelQueues};
use super::{
    draw_beta, mlf_target, Allocation, Arrival, BetaFactor, MlfJobState, PolicyKind, QueueLevel,
    Scheduler, ServiceView, SERVICE_EPS,
};
use crate::distributions::RandomStream;
use crate::error::{Error, Result};
use crate::instance::{floor_log2, pow2, JobId};

/// Initial target of a new arrival and the level `b` backing it
/// (the target is `2^b * factor`, and the job moves to queue `b + 1` on reaching it).
///
/// `lowest_nonempty` is the lowest numbered queue holding a job once any
/// previous new-job occupant has been displaced; `None` for an empty system.
pub fn ermlf_initial_target(lowest_nonempty: Option<i32>, factor: &BetaFactor) -> (f64, i32) {
    let backing = lowest_nonempty.map_or(0, |z| z - 1);
    (mlf_target(backing, factor), backing)
}

/// Queue a displaced new-job occupant belongs to: the unique `z` with
/// `2^(z-1) f <= attained < 2^z f`. Returns `(z, 2^z f)`.
pub fn ermlf_displacement(attained: f64, factor: &BetaFactor) -> Result<(i32, f64)> {
    if !(attained.is_finite() && attained > 0.0) {
        return Err(Error::internal(format!(
            "displaced job has attained service {attained}"
        )));
    }
    let f = factor.factor;
    let mut z = floor_log2(attained / f) + 1;
    while pow2(z - 1) * f > attained {
        z -= 1;
    }
    while pow2(z) * f <= attained {
        z += 1;
    }
    Ok((z, mlf_target(z, factor)))
}

/// Destination of a new-job occupant whose attained service reached its
/// initial target: level `log2(target / factor) + 1`, with the target doubled.
pub fn ermlf_requeue_on_target(target: f64, factor: &BetaFactor) -> Result<(i32, f64)> {
    let ratio = target / factor.factor;
    let exp = ratio.log2();
    let level = exp.round();
    if !(exp.is_finite() && pow2(level as i32) == ratio) {
        return Err(Error::internal(format!(
            "target {target} is not a power-of-two multiple of factor {}",
            factor.factor
        )));
    }
    Ok((level as i32 + 1, 2.0 * target))
}

/// RMLF extended to arbitrary positive sizes.
///
/// Queues `Q_z` for every integer `z`, plus a new-job queue below all of them
/// that holds at most the most recent arrival. An arrival always preempts and
/// is served until it completes, reaches its initial target, or the next
/// arrival displaces it into the queue matching its attained service.
#[derive(Debug)]
pub struct ExtendedRmlf {
    stream: RandomStream,
    jobs: HashMap<JobId, MlfJobState>,
    queues: LevelQueues,
    star: Option<JobId>,
    position: usize,
}

impl ExtendedRmlf {
    pub fn new(stream: RandomStream) -> Self {
        ExtendedRmlf {
            stream,
            jobs: HashMap::new(),
            queues: LevelQueues::default(),
            star: None,
            position: 0,
        }
    }

    pub fn job_state(&self, id: JobId) -> Option<&MlfJobState> {
        self.jobs.get(&id)
    }

    pub fn star(&self) -> Option<JobId> {
        self.star
    }

    fn served(&self) -> Option<JobId> {
        self.star.or_else(|| self.queues.lowest().map(|(_, id)| id))
    }

    fn enqueue(&mut self, id: JobId, level: i32, target: f64) {
        let state = self.jobs.get_mut(&id).expect("known job");
        state.level = QueueLevel::Level(level);
        state.target = target;
        self.queues.push_back(level, id);
    }
}

impl Scheduler for ExtendedRmlf {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Ermlf
    }

    fn on_arrival(&mut self, arrival: Arrival, view: &ServiceView<'_>) -> Result<()> {
        if let Some(prev) = self.star.take() {
            let factor = self.jobs[&prev].factor;
            let (z, target) = ermlf_displacement(view.attained(prev), &factor)?;
            self.enqueue(prev, z, target);
        }
        if self.jobs.is_empty() {
            self.position = 0;
        }
        self.position += 1;
        let factor = draw_beta(self.position, &mut self.stream);
        let lowest = self.queues.lowest_level();
        let (target, _) = ermlf_initial_target(lowest, &factor);
        self.jobs.insert(
            arrival.id,
            MlfJobState {
                id: arrival.id,
                level: QueueLevel::Star,
                target,
                factor,
            },
        );
        self.star = Some(arrival.id);
        Ok(())
    }

    fn on_completion(&mut self, id: JobId, _view: &ServiceView<'_>) -> Result<()> {
        let state = self
            .jobs
            .remove(&id)
            .ok_or_else(|| Error::internal(format!("unknown job {id} completed")))?;
        match state.level {
            QueueLevel::Star => {
                self.star = None;
                Ok(())
            }
            QueueLevel::Level(l) => self.queues.remove(l, id),
        }
    }

    fn allocation(&self, _view: &ServiceView<'_>) -> Allocation {
        self.served().map_or(Allocation::Idle, Allocation::Single)
    }

    fn next_internal(&self, view: &ServiceView<'_>) -> Option<f64> {
        self.served()
            .map(|id| (self.jobs[&id].target - view.attained(id)).max(0.0))
    }

    fn on_internal(&mut self, view: &ServiceView<'_>) -> Result<()> {
        let id = self
            .served()
            .ok_or_else(|| Error::internal("target hit with no job in service"))?;
        let state = self.jobs[&id];
        let attained = view.attained(id);
        if attained < state.target * (1.0 - SERVICE_EPS) {
            return Err(Error::internal(format!(
                "job {id} signalled a target hit at {attained} below target {}",
                state.target
            )));
        }
        match state.level {
            QueueLevel::Star => {
                let (z, target) = ermlf_requeue_on_target(state.target, &state.factor)?;
                self.star = None;
                self.enqueue(id, z, target);
            }
            QueueLevel::Level(l) => {
                self.queues.remove(l, id)?;
                self.enqueue(id, l + 1, 2.0 * state.target);
            }
        }
        Ok(())
    }

    fn check_invariants(&self, view: &ServiceView<'_>) -> Result<()> {
        let sequence = self
            .queues
            .top_down()
            .map(|(l, id)| (QueueLevel::Level(l), id))
            .chain(self.star.map(|id| (QueueLevel::Star, id)));
        check_order(sequence)?;
        if let Some(s) = self.star {
            if self.jobs.keys().any(|&id| id > s) {
                return Err(Error::internal(format!(
                    "new-job queue holds {s} but a later job is present"
                )));
            }
        }
        for s in self.jobs.values() {
            let expected = match s.level {
                QueueLevel::Level(l) => mlf_target(l, &s.factor),
                QueueLevel::Star => {
                    ermlf_requeue_on_target(s.target, &s.factor)?;
                    s.target
                }
            };
            if s.target != expected {
                return Err(Error::internal(format!(
                    "job {} has target {} at {:?}",
                    s.id, s.target, s.level
                )));
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

    fn f(x: f64) -> BetaFactor {
        BetaFactor {
            j: 2,
            beta: 2.0 - x,
            factor: x,
        }
    }

    #[test]
    fn initial_target_cases() {
        assert_eq!(ermlf_initial_target(None, &f(1.5)), (1.5, 0));
        assert_eq!(ermlf_initial_target(Some(2), &f(1.0)), (2.0, 1));
        assert_eq!(ermlf_initial_target(Some(-3), &f(1.0)), (0.0625, -4));
    }

    #[test]
    fn displacement_picks_lowest_unreached_target() {
        assert_eq!(ermlf_displacement(0.6, &f(1.0)).unwrap(), (0, 1.0));
        assert_eq!(ermlf_displacement(0.4, &f(1.0)).unwrap(), (-1, 0.5));
        assert_eq!(ermlf_displacement(3.0, &f(1.5)).unwrap(), (2, 6.0));
        assert_eq!(ermlf_displacement(2.9, &f(1.5)).unwrap(), (1, 3.0));
        assert!(ermlf_displacement(0.0, &f(1.0)).is_err());
        for w in [1e-9, 0.001, 0.37, 1.0, 5.5, 1e6] {
            for x in [1.0, 1.3, 2.0] {
                let (z, t) = ermlf_displacement(w, &f(x)).unwrap();
                assert!(pow2(z - 1) * x <= w && w < t, "w={w} f={x} z={z}");
            }
        }
    }

    #[test]
    fn requeue_doubles() {
        assert_eq!(ermlf_requeue_on_target(0.5, &f(1.0)).unwrap(), (0, 1.0));
        assert_eq!(ermlf_requeue_on_target(1.0, &f(1.0)).unwrap(), (1, 2.0));
        assert_eq!(ermlf_requeue_on_target(3.0, &f(1.5)).unwrap(), (2, 6.0));
        assert!(matches!(
            ermlf_requeue_on_target(0.7, &f(1.0)),
            Err(Error::InternalConsistency(_))
        ));
    }

    fn arrive(s: &mut ExtendedRmlf, id: JobId, att: &[f64]) {
        s.on_arrival(
            Arrival {
                id,
                release: 0.0,
                size: None,
            },
            &ServiceView::new(att),
        )
        .unwrap();
    }

    #[test]
    fn arrival_displaces_star_and_preempts() {
        let mut e = ExtendedRmlf::new(RandomStream::new(0, 2));
        let mut att = vec![0.0; 3];
        arrive(&mut e, 1, &att);
        // first job of a busy period: factor 1, backed by level 0
        let s1 = *e.job_state(1).unwrap();
        assert_eq!((s1.level, s1.target), (QueueLevel::Star, 1.0));

        att[0] = 0.6;
        arrive(&mut e, 2, &att);
        let s1 = *e.job_state(1).unwrap();
        assert_eq!((s1.level, s1.target), (QueueLevel::Level(0), 1.0));
        let s2 = *e.job_state(2).unwrap();
        assert_eq!(s2.level, QueueLevel::Star);
        assert_eq!(s2.target, mlf_target(-1, &s2.factor));
        assert_eq!(e.allocation(&ServiceView::new(&att)), Allocation::Single(2));
        e.check_invariants(&ServiceView::new(&att)).unwrap();

        // job 2 reaches its initial target and joins Q_0 behind job 1
        att[1] = s2.target;
        e.on_internal(&ServiceView::new(&att)).unwrap();
        let s2 = *e.job_state(2).unwrap();
        assert_eq!(s2.level, QueueLevel::Level(0));
        assert_eq!(s2.target, mlf_target(0, &s2.factor));
        assert_eq!(e.star(), None);
        assert_eq!(e.allocation(&ServiceView::new(&att)), Allocation::Single(1));
        e.check_invariants(&ServiceView::new(&att)).unwrap();
    }
}
