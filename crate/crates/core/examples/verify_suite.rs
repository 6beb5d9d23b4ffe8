// Runs a few of the acceptance criteria at the quick scale.
use blindq::verify::{run_verify, Profile, Tolerances};

pub fn run_example() -> blindq::Result<()> {
    let verdict = run_verify(Profile::Quick, 1, Tolerances::default(), &[6, 7, 8, 9], |r| {
        println!("{}", r.line())
    })?;
    println!("passed: {}", verdict.passed);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
