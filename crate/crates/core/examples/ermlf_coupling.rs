// eRMLF on an instance with tiny jobs equals RMLF on the instance stretched by
// 2^-g, with time compressed by 2^g.
use blindq::instance::pow2;
use blindq::policies::ExtendedRmlf;
use blindq::simulator::{simulate_with, SimOptions};
use blindq::{simulate, Instance, PolicyKind, RandomStream};

pub fn run_example() -> blindq::Result<()> {
    let inst = Instance::from_pairs([(0.0, 0.3), (0.1, 0.02), (0.15, 1.7), (0.2, 0.05), (2.5, 0.4)])?;
    let g = inst.scaling_exponent()?;
    let scaled = inst.scale(pow2(-g))?;
    println!("min size {:?}, g = {g}", inst.min_size());

    let seed = 9;
    let e = simulate(&inst, PolicyKind::Ermlf, seed)?;
    let r = simulate(&scaled, PolicyKind::Rmlf, seed)?;
    for (a, b) in e.jobs.iter().zip(&r.jobs) {
        println!("job {}: eRMLF {:.6}, 2^g RMLF {:.6}", a.id, a.sojourn, pow2(g) * b.sojourn);
    }

    // same run with the structural checks after every event
    let mut sched = ExtendedRmlf::new(RandomStream::new(seed, 2));
    let opts = SimOptions { check_invariants: true, record_events: true };
    let checked = simulate_with(&inst, &mut sched, seed, opts)?;
    println!("{} events, all invariants held", checked.events.len());
    Ok(())
}

fn main() {
    run_example().unwrap();
}
