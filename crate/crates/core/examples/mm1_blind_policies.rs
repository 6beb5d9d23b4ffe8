// Every blind policy has the same mean sojourn time in M/M/1: E[B] / (1 - rho).
use blindq::distributions::{SUBSTREAM_ARRIVALS, SUBSTREAM_SIZES};
use blindq::estimators::regen_mean_sojourn;
use blindq::{simulate, DistributionSpec, Instance, PolicyKind, RandomStream};

pub fn run_example() -> blindq::Result<()> {
    let rho = 0.8;
    let seed = 42;
    let inst = Instance::generate(
        &DistributionSpec::exponential_with_mean(1.0 / rho),
        &DistributionSpec::exponential_with_mean(1.0),
        20_000,
        &mut RandomStream::new(seed, SUBSTREAM_ARRIVALS),
        &mut RandomStream::new(seed, SUBSTREAM_SIZES),
    )?;
    println!("{} jobs in {} busy periods, exact mean {}", inst.len(), inst.busy_periods().len(), 1.0 / (1.0 - rho));
    for policy in PolicyKind::ALL {
        let e = regen_mean_sojourn(&simulate(&inst, policy, seed)?)?;
        println!("{policy:>6}: E[T] = {:.3} +- {:.3}", e.point, e.ci_halfwidth);
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
