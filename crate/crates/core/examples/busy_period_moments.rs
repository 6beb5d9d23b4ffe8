// Busy-period functionals of an M/M/1 queue. Closed forms: E[P] = 1/(1-rho),
// E[P^2] = 2/(1-rho)^3, E[N] = 1/(1-rho).
use blindq::estimators::{check_in_identity, functional_moment, Functional, MomentInput};
use blindq::verify::cycles_in_chunks;
use blindq::DistributionSpec;

pub fn run_example() -> blindq::Result<()> {
    let rho = 0.5;
    let arrival = DistributionSpec::exponential_with_mean(1.0 / rho);
    let size = DistributionSpec::exponential_with_mean(1.0);
    let cycles = cycles_in_chunks(&arrival, &size, 50_000, 1)?;
    let input = MomentInput::Cycles(&cycles);
    for (f, k, exact) in [
        (Functional::P, 1.0, 1.0 / (1.0 - rho)),
        (Functional::P, 2.0, 2.0 / (1.0 - rho).powi(3)),
        (Functional::N, 1.0, 1.0 / (1.0 - rho)),
    ] {
        let e = functional_moment(input, f, k, None)?;
        println!("E[{f}^{k}] = {:.3} +- {:.3} (exact {exact})", e.point, e.ci_halfwidth);
    }
    let mu = arrival.moments().mean - size.moments().mean;
    let id = check_in_identity(&cycles, mu)?;
    println!("E[I] = {:.4}, mu E[N] = {:.4}, gap {:.4} +- {:.4}", id.lhs, id.rhs, id.gap, id.ci_halfwidth);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
