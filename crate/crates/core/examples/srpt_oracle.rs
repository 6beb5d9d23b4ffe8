// SRPT against exhaustive search on tiny instances, and against every other
// policy on a larger one.
use blindq::simulator::brute_force_min_flow;
use blindq::verify::random_instance;
use blindq::{simulate, Instance, PolicyKind, RandomStream};

pub fn run_example() -> blindq::Result<()> {
    let inst = Instance::from_pairs([(0.0, 4.0), (1.0, 2.0), (2.0, 1.0)])?;
    let srpt = simulate(&inst, PolicyKind::Srpt, 0)?.total_flow();
    println!("srpt {srpt}, brute force {}", brute_force_min_flow(&inst)?);

    let mut stream = RandomStream::new(7, 0);
    let inst = random_instance(&mut stream, 20);
    let srpt = simulate(&inst, PolicyKind::Srpt, 0)?.total_flow();
    for policy in PolicyKind::BLIND {
        let flow = simulate(&inst, policy, 3)?.total_flow();
        println!("{policy:>6}: total flow {flow:.4} (srpt {srpt:.4})");
        assert!(srpt <= flow + 1e-9);
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
