use super::{share_rates, Allocation, Arrival, PolicyKind, Scheduler, ServiceView, Sharing, SERVICE_EPS};
use crate::error::{Error, Result};
use crate::instance::JobId;

fn remove(active: &mut Vec<JobId>, id: JobId, who: &str) -> Result<()> {
    let pos = active
        .iter()
        .position(|&a| a == id)
        .ok_or_else(|| Error::internal(format!("{who}: unknown job {id} completed")))?;
    active.remove(pos);
    Ok(())
}

/// Processor sharing.
#[derive(Debug, Default)]
pub struct Ps {
    active: Vec<JobId>,
}

impl Scheduler for Ps {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Ps
    }

    fn on_arrival(&mut self, arrival: Arrival, _view: &ServiceView<'_>) -> Result<()> {
        self.active.push(arrival.id);
        Ok(())
    }

    fn on_completion(&mut self, id: JobId, _view: &ServiceView<'_>) -> Result<()> {
        remove(&mut self.active, id, "ps")
    }

    fn allocation(&self, _view: &ServiceView<'_>) -> Allocation {
        match self.active.len() {
            0 => Allocation::Idle,
            1 => Allocation::Single(self.active[0]),
            k => {
                let r = 1.0 / k as f64;
                Allocation::Shared(self.active.iter().map(|&id| (id, r)).collect())
            }
        }
    }
}

/// Foreground-background (least attained service first, ties share equally).
#[derive(Debug, Default)]
pub struct Fb {
    active: Vec<JobId>,
}

impl Fb {
    fn attained(&self, view: &ServiceView<'_>) -> Vec<(JobId, f64)> {
        self.active.iter().map(|&id| (id, view.attained(id))).collect()
    }
}

impl Scheduler for Fb {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Fb
    }

    fn on_arrival(&mut self, arrival: Arrival, _view: &ServiceView<'_>) -> Result<()> {
        self.active.push(arrival.id);
        Ok(())
    }

    fn on_completion(&mut self, id: JobId, _view: &ServiceView<'_>) -> Result<()> {
        remove(&mut self.active, id, "fb")
    }

    fn allocation(&self, view: &ServiceView<'_>) -> Allocation {
        let rates = share_rates(Sharing::Fb, &self.attained(view));
        match rates.len() {
            0 => Allocation::Idle,
            1 => Allocation::Single(rates[0].0),
            _ => Allocation::Shared(rates),
        }
    }

    /// The tie set reaches the next attained level after `|M| * gap`.
    fn next_internal(&self, view: &ServiceView<'_>) -> Option<f64> {
        let att = self.attained(view);
        let min = att.iter().map(|a| a.1).fold(f64::INFINITY, f64::min);
        let mut members = 0usize;
        let mut next = f64::INFINITY;
        for &(_, a) in &att {
            if a <= min * (1.0 + SERVICE_EPS) {
                members += 1;
            } else {
                next = next.min(a);
            }
        }
        next.is_finite().then_some(members as f64 * (next - min))
    }
}
