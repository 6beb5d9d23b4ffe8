use std::collections::VecDeque;

use super::{Allocation, Arrival, PolicyKind, Scheduler, ServiceView};
use crate::error::{Error, Result};
use crate::instance::JobId;

/// Shortest remaining processing time. The only scheduler that is told sizes.
#[derive(Debug, Default)]
pub struct Srpt {
    // (id, size, release)
    active: Vec<(JobId, f64, f64)>,
}

impl Scheduler for Srpt {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Srpt
    }

    fn on_arrival(&mut self, arrival: Arrival, _view: &ServiceView<'_>) -> Result<()> {
        let size = arrival
            .size
            .ok_or_else(|| Error::internal("srpt needs the job size at arrival"))?;
        self.active.push((arrival.id, size, arrival.release));
        Ok(())
    }

    fn on_completion(&mut self, id: JobId, _view: &ServiceView<'_>) -> Result<()> {
        let pos = self
            .active
            .iter()
            .position(|a| a.0 == id)
            .ok_or_else(|| Error::internal(format!("srpt: unknown job {id} completed")))?;
        self.active.swap_remove(pos);
        Ok(())
    }

    fn allocation(&self, view: &ServiceView<'_>) -> Allocation {
        // same ordering as srpt_decision, without building the slice
        let mut best: Option<(f64, f64, JobId)> = None;
        for &(id, size, release) in &self.active {
            let key = (size - view.attained(id), release, id);
            let better = match best {
                None => true,
                Some(b) => key
                    .0
                    .total_cmp(&b.0)
                    .then(key.1.total_cmp(&b.1))
                    .then(key.2.cmp(&b.2))
                    .is_lt(),
            };
            if better {
                best = Some(key);
            }
        }
        best.map_or(Allocation::Idle, |b| Allocation::Single(b.2))
    }
}

/// First in, first out. Never preempts.
#[derive(Debug, Default)]
pub struct Fifo {
    queue: VecDeque<JobId>,
}

impl Scheduler for Fifo {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Fifo
    }

    fn on_arrival(&mut self, arrival: Arrival, _view: &ServiceView<'_>) -> Result<()> {
        self.queue.push_back(arrival.id);
        Ok(())
    }

    fn on_completion(&mut self, id: JobId, _view: &ServiceView<'_>) -> Result<()> {
        if self.queue.front() == Some(&id) {
            self.queue.pop_front();
            Ok(())
        } else {
            Err(Error::internal(format!(
                "fifo: job {id} completed while not at the head"
            )))
        }
    }

    fn allocation(&self, _view: &ServiceView<'_>) -> Allocation {
        self.queue
            .front()
            .map_or(Allocation::Idle, |&id| Allocation::Single(id))
    }
}

#[cfg(test)]
mod tests {
    use super::super::srpt_decision;
    use super::*;

    #[test]
    fn srpt_allocation_agrees_with_decision_rule() {
        let mut s = Srpt::default();
        let attained = vec![0.5, 0.0, 0.0, 0.0];
        let view = ServiceView::new(&attained);
        let sizes = [2.5, 2.0, 1.0, 3.0];
        for (i, &b) in sizes.iter().enumerate() {
            s.on_arrival(
                Arrival {
                    id: i + 1,
                    release: i as f64,
                    size: Some(b),
                },
                &view,
            )
            .unwrap();
        }
        let rem: Vec<(JobId, f64, f64)> = sizes
            .iter()
            .enumerate()
            .map(|(i, b)| (i + 1, b - attained[i], i as f64))
            .collect();
        assert_eq!(s.allocation(&view), Allocation::Single(3));
        assert_eq!(srpt_decision(&rem), Some(3));
        s.on_completion(3, &view).unwrap();
        // jobs 1 and 2 both have 2.0 remaining; earlier release wins
        assert_eq!(s.allocation(&view), Allocation::Single(1));
    }

    #[test]
    fn srpt_refuses_blind_arrivals() {
        let attained = vec![0.0];
        let view = ServiceView::new(&attained);
        let err = Srpt::default()
            .on_arrival(
                Arrival {
                    id: 1,
                    release: 0.0,
                    size: None,
                },
                &view,
            )
            .unwrap_err();
        assert!(matches!(err, Error::InternalConsistency(_)));
    }

    #[test]
    fn fifo_serves_in_release_order() {
        let mut f = Fifo::default();
        let attained = vec![0.0, 0.0];
        let view = ServiceView::new(&attained);
        assert_eq!(f.allocation(&view), Allocation::Idle);
        for id in 1..=2 {
            f.on_arrival(
                Arrival {
                    id,
                    release: id as f64,
                    size: None,
                },
                &view,
            )
            .unwrap();
        }
        assert_eq!(f.allocation(&view), Allocation::Single(1));
        assert!(f.on_completion(2, &view).is_err());
        f.on_completion(1, &view).unwrap();
        assert_eq!(f.allocation(&view), Allocation::Single(2));
    }
}
