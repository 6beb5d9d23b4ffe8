use std::io;

use serde::Serialize;

use super::SimResult;
use crate::error::Result;
use crate::estimators::regen_mean_sojourn;

/// `id,release,size,completion,sojourn`
pub fn write_jobs_csv<W: io::Write>(result: &SimResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "release", "size", "completion", "sojourn"])?;
    for j in &result.jobs {
        w.write_record([
            j.id.to_string(),
            j.release.to_string(),
            j.size.to_string(),
            j.completion.to_string(),
            j.sojourn.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `cycle,N,P,I,sum_sojourn`; `I` is blank for the first cycle.
pub fn write_cycles_csv<W: io::Write>(result: &SimResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["cycle", "N", "P", "I", "sum_sojourn"])?;
    for c in &result.cycles {
        let r = &c.record;
        w.write_record([
            r.index.to_string(),
            r.n.to_string(),
            r.p.to_string(),
            r.idle.map(|i| i.to_string()).unwrap_or_default(),
            c.sojourn_sum.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimSummary {
    pub policy: String,
    pub seed: u64,
    pub jobs: usize,
    pub cycles: usize,
    pub total_flow: f64,
    pub mean_sojourn: f64,
    /// Regenerative 95% half-width; absent with fewer than two cycles.
    pub mean_sojourn_ci: Option<f64>,
}

impl SimSummary {
    pub fn of(result: &SimResult) -> Self {
        SimSummary {
            policy: result.policy.to_string(),
            seed: result.seed,
            jobs: result.jobs.len(),
            cycles: result.cycles.len(),
            total_flow: result.total_flow(),
            mean_sojourn: result.mean_sojourn(),
            mean_sojourn_ci: regen_mean_sojourn(result).ok().map(|e| e.ci_halfwidth),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::policies::PolicyKind;
    use crate::simulator::simulate;

    #[test]
    fn csv_layouts() {
        let inst = Instance::from_pairs([(0.0, 3.0), (1.0, 1.0), (10.0, 2.0)]).unwrap();
        let r = simulate(&inst, PolicyKind::Srpt, 0).unwrap();
        let mut buf = Vec::new();
        write_jobs_csv(&r, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "id,release,size,completion,sojourn\n1,0,3,4,4\n2,1,1,2,1\n3,10,2,12,2\n"
        );
        let mut buf = Vec::new();
        write_cycles_csv(&r, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "cycle,N,P,I,sum_sojourn\n1,2,4,,5\n2,1,2,6,2\n"
        );
        let s = SimSummary::of(&r);
        assert_eq!((s.total_flow, s.cycles), (7.0, 2));
        assert!(s.mean_sojourn_ci.is_some());
    }
}
