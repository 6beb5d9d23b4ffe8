// Mean sojourn split into small and large busy periods, with the Hölder bound
// on the large part.
use blindq::distributions::{SUBSTREAM_ARRIVALS, SUBSTREAM_SIZES};
use blindq::estimators::{holder_diagnostic, regen_mean_sojourn, tail_split, AnalysisParams};
use blindq::{simulate, DistributionSpec, Instance, PolicyKind, RandomStream};

pub fn run_example() -> blindq::Result<()> {
    let rho = 0.8;
    let inst = Instance::generate(
        &DistributionSpec::exponential_with_mean(1.0 / rho),
        &DistributionSpec::exponential_with_mean(1.0),
        10_000,
        &mut RandomStream::new(1, SUBSTREAM_ARRIVALS),
        &mut RandomStream::new(1, SUBSTREAM_SIZES),
    )?;
    let r = simulate(&inst, PolicyKind::Ermlf, 1)?;
    let mean = regen_mean_sojourn(&r)?.point;
    // zeta just above its lower limit keeps the threshold small enough to matter
    for params in [AnalysisParams::defaults(f64::INFINITY)?, AnalysisParams::new(f64::INFINITY, 1.2, 12.0)?] {
        let split = tail_split(&r, &params, rho)?;
        let bound = holder_diagnostic(&r, &params, rho)?;
        println!(
            "s={} zeta={}: N0={:.3e}, small {:.4} + large {:.4} = {mean:.4}, bound {:.4}",
            params.s, params.zeta, split.n0, split.small, split.large, bound.bound
        );
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
