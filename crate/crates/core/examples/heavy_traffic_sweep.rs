// A small load sweep: mean sojourn ratios against SRPT and slope fits of the
// busy-period moments.
use blindq::sweep::{run_sweep, SweepConfig};

const CONFIG: &str = r#"
[system]
arrival = "exp:1"
size = "exp:1"

[sweep]
r_grid = [0.5, 0.7, 0.8, 0.9]
policies = ["srpt", "ps", "ermlf"]
cycles_per_point = 5000
seed = 3
kappas = [1, 2]
"#;

pub fn run_example() -> blindq::Result<()> {
    let cfg = SweepConfig::from_toml(CONFIG)?;
    let out = run_sweep(&cfg, Some(1))?;
    for (policy, row) in out.ratio_rows()? {
        println!("{policy:>6} rho={:.2}: ratio {:.3}, normalized {:.3}", row.rho, row.ratio, row.normalized);
    }
    for f in out.fits()? {
        let reference = f.reference_slope.map(|r| format!(" (reference {r})")).unwrap_or_default();
        println!("E[{}^{}]: slope {:.2} +- {:.2}{reference}", f.functional, f.kappa, f.fit.slope, f.fit.slope_se);
    }
    let dir = std::env::temp_dir().join("blindq-sweep-example");
    out.write_dir(&dir)?;
    println!("tables in {}", dir.display());
    Ok(())
}

fn main() {
    run_example().unwrap();
}
