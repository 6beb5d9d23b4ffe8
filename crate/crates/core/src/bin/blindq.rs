use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blindq::distributions::{SUBSTREAM_ARRIVALS, SUBSTREAM_SIZES};
use blindq::instance::write_cycles_csv;
use blindq::simulator::{self, SimSummary};
use blindq::sweep::{run_sweep, SweepConfig};
use blindq::verify::{run_verify, Profile, Tolerances};
use blindq::{DistributionSpec, Error, Instance, PolicyKind, RandomStream, Result};

#[derive(Parser)]
#[command(name = "blindq", version, about = "Single-server scheduling simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one policy on one instance.
    Simulate(SimulateArgs),
    /// Heavy-traffic sweep from a TOML config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "sweep-out")]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, env = "BLINDQ_JOBS")]
        jobs: Option<usize>,
    },
    /// Acceptance suite; exits non-zero if any criterion fails.
    Verify {
        profile: Profile,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated criterion numbers.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// TOML file overriding individual tolerances.
        #[arg(long)]
        tolerances: Option<PathBuf>,
        /// Write the JSON verdict here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Instance utilities.
    #[command(subcommand)]
    Instance(InstanceCmd),
}

#[derive(Args)]
struct GenArgs {
    /// Interarrival law, e.g. exp:1.25
    #[arg(long)]
    arrival: Option<DistributionSpec>,
    /// Size law, e.g. exp:1
    #[arg(long)]
    size: Option<DistributionSpec>,
    /// Busy cycles to generate.
    #[arg(long)]
    cycles: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, conflicts_with_all = ["arrival", "size", "cycles"])]
    instance: Option<PathBuf>,
    #[command(flatten)]
    gen: GenArgs,
    #[arg(long)]
    policy: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "simulate-out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum InstanceCmd {
    /// Generate an instance file.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Busy periods of an instance file as CSV.
    Cycles {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn generated(gen: &GenArgs, seed: u64) -> Result<Instance> {
    let (Some(arrival), Some(size), Some(cycles)) = (&gen.arrival, &gen.size, gen.cycles) else {
        return Err(Error::Config(
            "need --instance, or all of --arrival, --size and --cycles".into(),
        ));
    };
    Instance::generate(
        arrival,
        size,
        cycles,
        &mut RandomStream::new(seed, SUBSTREAM_ARRIVALS),
        &mut RandomStream::new(seed, SUBSTREAM_SIZES),
    )
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn simulate_cmd(args: SimulateArgs) -> Result<()> {
    let policy: PolicyKind = args.policy.parse()?;
    let inst = match &args.instance {
        Some(p) => Instance::read(p)?,
        None => generated(&args.gen, args.seed)?,
    };
    let result = simulator::simulate(&inst, policy, args.seed)?;
    let out = &args.out;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    simulator::write_jobs_csv(&result, create(&out.join("jobs.csv"))?)?;
    simulator::write_cycles_csv(&result, create(&out.join("cycles.csv"))?)?;
    let summary = SimSummary::of(&result);
    serde_json::to_writer_pretty(create(&out.join("summary.json"))?, &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Command::Simulate(args) => simulate_cmd(args)?,
        Command::Sweep { config, out, jobs } => {
            let cfg = SweepConfig::read(&config)?;
            run_sweep(&cfg, jobs)?.write_dir(&out)?;
            eprintln!("wrote {}", out.display());
        }
        Command::Verify {
            profile,
            seed,
            only,
            tolerances,
            json,
        } => {
            let tol = match tolerances {
                Some(p) => {
                    let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
                    toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
                }
                None => Tolerances::default(),
            };
            let verdict = run_verify(profile, seed, tol, &only, |r| eprintln!("{}", r.line()))?;
            let mut w = output(json.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &verdict)?;
            writeln!(w).map_err(|e| Error::io("stdout", e))?;
            return Ok(verdict.passed);
        }
        Command::Instance(InstanceCmd::Gen { gen, seed, out }) => {
            let inst = generated(&gen, seed)?;
            output(out.as_deref())?
                .write_all(inst.serialize().as_bytes())
                .map_err(|e| Error::io(out.unwrap_or_else(|| "stdout".into()), e))?;
        }
        Command::Instance(InstanceCmd::Cycles { instance, out }) => {
            let inst = Instance::read(&instance)?;
            write_cycles_csv(&inst.busy_periods(), output(out.as_deref())?)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
