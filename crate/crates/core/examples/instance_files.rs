// Instance text format, busy periods, and the notation for distributions.
use blindq::distributions::{SUBSTREAM_ARRIVALS, SUBSTREAM_SIZES};
use blindq::instance::write_cycles_csv;
use blindq::{DistributionSpec, Instance, RandomStream};

pub fn run_example() -> blindq::Result<()> {
    let arrival: DistributionSpec = "hyperexp:0.5,0.5,0.5,2".parse()?;
    let size: DistributionSpec = "uni:0.2,1.8".parse()?;
    println!("arrival {arrival} (mean {}), size {size}", arrival.moments().mean);

    let inst = Instance::generate(
        &arrival,
        &size,
        3,
        &mut RandomStream::new(11, SUBSTREAM_ARRIVALS),
        &mut RandomStream::new(11, SUBSTREAM_SIZES),
    )?;
    let text = inst.serialize();
    print!("{text}");
    let back = Instance::parse(&text)?;
    assert_eq!(back.jobs(), inst.jobs());

    let mut csv = Vec::new();
    write_cycles_csv(&back.busy_periods(), &mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));

    match Instance::parse("0 3\n0 1\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
