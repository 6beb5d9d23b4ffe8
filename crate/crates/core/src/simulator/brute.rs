use crate::error::{Error, Result};
use crate::instance::Instance;

pub const BRUTE_FORCE_MAX_JOBS: usize = 4;

/// Minimum total flow time over all preemptive single-server schedules.
///
/// Enumerates which released job runs between consecutive release and
/// completion epochs. That suffices, since some optimal schedule only switches
/// jobs at those epochs.
pub fn brute_force_min_flow(inst: &Instance) -> Result<f64> {
    if inst.len() > BRUTE_FORCE_MAX_JOBS {
        return Err(Error::InstanceTooLarge {
            jobs: inst.len(),
            max: BRUTE_FORCE_MAX_JOBS,
        });
    }
    let release: Vec<f64> = inst.jobs().iter().map(|j| j.release).collect();
    let mut remaining: Vec<f64> = inst.jobs().iter().map(|j| j.size).collect();
    let t0 = release.first().copied().unwrap_or(0.0);
    Ok(search(&release, &mut remaining, t0, 0.0))
}

fn search(release: &[f64], remaining: &mut [f64], now: f64, flow: f64) -> f64 {
    let next_release = release
        .iter()
        .copied()
        .filter(|&r| r > now)
        .fold(f64::INFINITY, f64::min);
    let mut best = f64::INFINITY;
    let mut any_ready = false;
    for j in 0..remaining.len() {
        if remaining[j] <= 0.0 || release[j] > now {
            continue;
        }
        any_ready = true;
        let run = remaining[j].min(next_release - now);
        let saved = remaining[j];
        let (left, done_flow) = if saved <= next_release - now {
            (0.0, now + saved - release[j])
        } else {
            (saved - run, 0.0)
        };
        remaining[j] = left;
        best = best.min(search(release, remaining, now + run, flow + done_flow));
        remaining[j] = saved;
    }
    if any_ready {
        best
    } else if next_release.is_finite() {
        search(release, remaining, next_release, flow)
    } else {
        flow
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::PolicyKind;
    use crate::simulator::simulate;

    #[test]
    fn single_job() {
        let inst = Instance::from_pairs([(0.0, 5.0)]).unwrap();
        assert_eq!(brute_force_min_flow(&inst).unwrap(), 5.0);
    }

    #[test]
    fn matches_srpt_on_hand_examples() {
        for pairs in [
            vec![(0.0, 3.0), (1.0, 1.0)],
            vec![(0.0, 4.0), (1.0, 2.0), (2.0, 1.0)],
        ] {
            let inst = Instance::from_pairs(pairs).unwrap();
            let srpt = simulate(&inst, PolicyKind::Srpt, 0).unwrap().total_flow();
            let best = brute_force_min_flow(&inst).unwrap();
            assert!((srpt - best).abs() < 1e-9, "{srpt} vs {best}");
        }
        let inst = Instance::from_pairs([(0.0, 3.0), (1.0, 1.0)]).unwrap();
        assert_eq!(brute_force_min_flow(&inst).unwrap(), 5.0);
    }

    #[test]
    fn rejects_large_instances() {
        let inst = Instance::from_pairs((0..5).map(|i| (i as f64, 1.0))).unwrap();
        assert!(matches!(
            brute_force_min_flow(&inst),
            Err(Error::InstanceTooLarge { jobs: 5, max: 4 })
        ));
    }
}
