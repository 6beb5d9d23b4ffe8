// Workload seen by arrivals, from the reflected random walk, checked against
// the simulator and against the Pollaczek-Khinchine mean.
use blindq::distributions::{SUBSTREAM_ARRIVALS, SUBSTREAM_SIZES};
use blindq::estimators::{functional_moment, lindley_walk, Functional, MomentInput};
use blindq::{simulate, DistributionSpec, Instance, PolicyKind, RandomStream};

pub fn run_example() -> blindq::Result<()> {
    let rho = 0.5;
    let inst = Instance::generate(
        &DistributionSpec::exponential_with_mean(1.0 / rho),
        &DistributionSpec::exponential_with_mean(1.0),
        20_000,
        &mut RandomStream::new(5, SUBSTREAM_ARRIVALS),
        &mut RandomStream::new(5, SUBSTREAM_SIZES),
    )?;
    let walk = lindley_walk(&inst);
    let sim = simulate(&inst, PolicyKind::Ps, 0)?;
    let worst = walk
        .workload
        .iter()
        .zip(&sim.jobs)
        .map(|(w, j)| (w - j.workload_at_arrival).abs())
        .fold(0.0, f64::max);
    println!("max |lindley - simulator| = {worst:e}");

    let cycles = inst.busy_periods();
    let e = functional_moment(
        MomentInput::PerJob { values: &walk.workload, cycles: &cycles },
        Functional::W,
        1.0,
        None,
    )?;
    // lambda E[B^2] / (2 (1 - rho))
    let pk = rho * 2.0 / (2.0 * (1.0 - rho));
    println!("E[W] = {:.3} +- {:.3}, exact {pk}", e.point, e.ci_halfwidth);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
