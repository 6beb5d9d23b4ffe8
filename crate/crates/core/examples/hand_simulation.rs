// Two jobs by hand: a long job at t=0 and a short one at t=1.
use blindq::{simulate, Instance, PolicyKind};

pub fn run_example() -> blindq::Result<()> {
    let inst = Instance::from_pairs([(0.0, 3.0), (1.0, 1.0)])?;
    for policy in PolicyKind::ALL {
        let r = simulate(&inst, policy, 0)?;
        let sojourns: Vec<f64> = r.jobs.iter().map(|j| j.sojourn).collect();
        println!("{policy:>6}: sojourns {sojourns:?}, total flow {}", r.total_flow());
    }
    let srpt = simulate(&inst, PolicyKind::Srpt, 0)?;
    assert_eq!(srpt.total_flow(), 5.0);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
