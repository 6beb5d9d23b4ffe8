//! Finite job instances and their policy-independent busy periods.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::distributions::{system_load, DistributionSpec, RandomStream};
use crate::error::{Error, Result};

pub const INSTANCE_HEADER: &str = "# blindq-instance v1";

/// 1-based arrival index.
pub type JobId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Job {
    pub id: JobId,
    pub release: f64,
    pub size: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceMeta {
    pub rho: f64,
    pub mu: f64,
    pub arrival: DistributionSpec,
    pub size: DistributionSpec,
}

/// Jobs in strictly increasing release order with positive sizes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Instance {
    jobs: Vec<Job>,
    meta: Option<InstanceMeta>,
}

/// One busy period of the workload process.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleRecord {
    /// 1-based.
    pub index: usize,
    pub first_job: JobId,
    pub last_job: JobId,
    /// Arrivals during the busy period.
    pub n: usize,
    /// Busy duration.
    pub p: f64,
    /// Idle time preceding the busy period; `None` for the first one.
    pub idle: Option<f64>,
    pub start: f64,
    pub end: f64,
}

impl Instance {
    /// Builds an instance from `(release, size)` pairs, assigning ids in order.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let jobs: Vec<Job> = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (release, size))| Job {
                id: i + 1,
                release,
                size,
            })
            .collect();
        for (i, job) in jobs.iter().enumerate() {
            check_job(job, i.checked_sub(1).map(|p| jobs[p].release))
                .map_err(|e| Error::param(format!("job {}: {e}", job.id)))?;
        }
        Ok(Instance { jobs, meta: None })
    }

    pub fn empty() -> Self {
        Instance::default()
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn meta(&self) -> Option<&InstanceMeta> {
        self.meta.as_ref()
    }

    pub fn min_size(&self) -> Option<f64> {
        self.jobs.iter().map(|j| j.size).reduce(f64::min)
    }

    pub fn total_work(&self) -> f64 {
        self.jobs.iter().map(|j| j.size).sum()
    }

    /// Draws jobs until exactly `target_cycles` busy periods have closed.
    ///
    /// The first job is released at time 0. The arrival that would open cycle
    /// `target_cycles + 1` is discarded.
    pub fn generate(
        arrival: &DistributionSpec,
        size: &DistributionSpec,
        target_cycles: usize,
        arrivals: &mut RandomStream,
        sizes: &mut RandomStream,
    ) -> Result<Self> {
        let load = system_load(arrival, size)?;
        let meta = Some(InstanceMeta {
            rho: load.rho,
            mu: load.mu,
            arrival: arrival.clone(),
            size: size.clone(),
        });
        if target_cycles == 0 {
            return Ok(Instance { jobs: vec![], meta });
        }
        let mut jobs = Vec::new();
        let mut release = 0.0;
        let mut closed = 0;
        // workload just after the latest release
        let mut work = 0.0;
        loop {
            let b = size.draw(sizes);
            work += b;
            jobs.push(Job {
                id: jobs.len() + 1,
                release,
                size: b,
            });
            let a = arrival.draw(arrivals);
            let next = release + a;
            if next <= release {
                return Err(Error::param(format!(
                    "interarrival {a} vanished at time {release}; releases must be distinct"
                )));
            }
            // same arithmetic as busy_periods so both agree on closure
            let gap = next - release;
            if work <= gap {
                work = 0.0;
                closed += 1;
                if closed == target_cycles {
                    break;
                }
            } else {
                work -= gap;
            }
            release = next;
        }
        Ok(Instance { jobs, meta })
    }

    /// Busy periods of the unit-speed workload process.
    pub fn busy_periods(&self) -> Vec<CycleRecord> {
        let mut out: Vec<CycleRecord> = Vec::new();
        let mut iter = self.jobs.iter();
        let Some(first) = iter.next() else {
            return out;
        };
        let mut cur = CycleRecord {
            index: 1,
            first_job: first.id,
            last_job: first.id,
            n: 1,
            p: 0.0,
            idle: None,
            start: first.release,
            end: 0.0,
        };
        let mut last_release = first.release;
        let mut work = first.size;
        for job in iter {
            let gap = job.release - last_release;
            if work <= gap {
                let end = last_release + work;
                cur.end = end;
                cur.p = end - cur.start;
                let next = CycleRecord {
                    index: cur.index + 1,
                    first_job: job.id,
                    last_job: job.id,
                    n: 1,
                    p: 0.0,
                    idle: Some((job.release - end).max(0.0)),
                    start: job.release,
                    end: 0.0,
                };
                out.push(std::mem::replace(&mut cur, next));
                work = job.size;
            } else {
                cur.last_job = job.id;
                cur.n += 1;
                work = work - gap + job.size;
            }
            last_release = job.release;
        }
        cur.end = last_release + work;
        cur.p = cur.end - cur.start;
        out.push(cur);
        out
    }

    /// Largest `g` with `2^-g * min_size >= 2`, i.e. `floor(log2 min_size) - 1`.
    pub fn scaling_exponent(&self) -> Result<i32> {
        let bmin = self.min_size().ok_or(Error::EmptyInstance)?;
        Ok(floor_log2(bmin) - 1)
    }

    /// Multiplies every release and size by `factor`.
    pub fn scale(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::param(format!("scale factor must be > 0, got {factor}")));
        }
        Ok(Instance {
            jobs: self
                .jobs
                .iter()
                .map(|j| Job {
                    id: j.id,
                    release: j.release * factor,
                    size: j.size * factor,
                })
                .collect(),
            meta: None,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut jobs: Vec<Job> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let mut fields = body.split_whitespace();
            let (Some(r), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `release size`, got `{body}`"),
                });
            };
            let num = |t: &str| {
                t.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("`{t}` is not a number"),
                })
            };
            let job = Job {
                id: jobs.len() + 1,
                release: num(r)?,
                size: num(b)?,
            };
            check_job(&job, jobs.last().map(|j| j.release))
                .map_err(|message| Error::Parse { line, message })?;
            jobs.push(job);
        }
        Ok(Instance { jobs, meta: None })
    }

    pub fn serialize(&self) -> String {
        let mut out = String::from(INSTANCE_HEADER);
        out.push('\n');
        for j in &self.jobs {
            let _ = writeln!(out, "{} {}", j.release, j.size);
        }
        out
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Instance::parse(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.serialize()).map_err(|e| Error::io(path, e))
    }
}

fn check_job(job: &Job, prev_release: Option<f64>) -> std::result::Result<(), String> {
    if !(job.release.is_finite() && job.release >= 0.0) {
        return Err(format!("release {} must be finite and >= 0", job.release));
    }
    if !(job.size.is_finite() && job.size > 0.0) {
        return Err(format!("size {} must be finite and > 0", job.size));
    }
    if let Some(prev) = prev_release {
        if job.release <= prev {
            return Err(format!(
                "release {} does not exceed the previous release {prev}",
                job.release
            ));
        }
    }
    Ok(())
}

pub(crate) fn floor_log2(x: f64) -> i32 {
    debug_assert!(x > 0.0 && x.is_finite());
    let mut e = x.log2().floor() as i32;
    while pow2(e) > x {
        e -= 1;
    }
    while pow2(e + 1) <= x {
        e += 1;
    }
    e
}

/// `2^e`, exact over the whole f64 exponent range.
pub fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

#[derive(Serialize)]
struct CycleRow {
    cycle_index: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "P")]
    p: f64,
    #[serde(rename = "I")]
    idle: Option<f64>,
    start: f64,
    end: f64,
}

/// CSV with columns `cycle_index,N,P,I,start,end`; `I` is blank for the first cycle.
pub fn write_cycles_csv<W: io::Write>(cycles: &[CycleRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in cycles {
        w.serialize(CycleRow {
            cycle_index: c.index,
            n: c.n,
            p: c.p,
            idle: c.idle,
            start: c.start,
            end: c.end,
        })?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
