//! Seeded interarrival and job-size laws.
//!
//! Every draw goes through a [`RandomStream`], a ChaCha8 keystream addressed
//! by `(seed, substream, counter)`. Two streams with the same address produce
//! the same numbers on every platform, which is what lets two simulations share
//! their policy randomness draw for draw.
//!
//! Specs are written either as tagged records (`{ kind = "exponential", rate = 0.8 }`)
//! or in the short `kind:param[,param]` notation used on the command line:
//!
//! | notation               | law                                             |
//! |------------------------|-------------------------------------------------|
//! | `exp:MEAN`             | exponential with the given mean                 |
//! | `det:VALUE`            | point mass                                      |
//! | `uni:LO,HI`            | uniform on `(LO, HI)`                           |
//! | `pareto:SHAPE`         | `1 - x^-SHAPE` on `[1, inf)`                    |
//! | `hyperexp:P1,M1,P2,M2` | mixture of exponentials, weights `P`, means `M` |
//! | `scaled:R:INNER`       | `INNER / R`                                     |

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Substream reserved for interarrival times.
pub const SUBSTREAM_ARRIVALS: u64 = 0;
/// Substream reserved for job sizes.
pub const SUBSTREAM_SIZES: u64 = 1;
/// Substream reserved for scheduler randomness.
pub const SUBSTREAM_POLICY: u64 = 2;

/// Splittable deterministic source of uniforms.
///
/// `counter` is the number of 64-bit words consumed so far; a stream can be
/// rebuilt at any position with [`RandomStream::at`].
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    substream: u64,
    counter: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, substream: u64) -> Self {
        Self::at(seed, substream, 0)
    }

    pub fn at(seed: u64, substream: u64, counter: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(substream);
        // each u64 is two 32-bit keystream words
        rng.set_word_pos(u128::from(counter) * 2);
        RandomStream {
            seed,
            substream,
            counter,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream(&self) -> u64 {
        self.substream
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        self.counter += 1;
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Convenience for [`RandomStream::new`].
pub fn make_stream(seed: u64, substream: u64) -> RandomStream {
    RandomStream::new(seed, substream)
}

/// Parametric interarrival or size law with support in `(0, inf)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "SpecRepr")]
pub enum DistributionSpec {
    Exponential { rate: f64 },
    Deterministic { value: f64 },
    Uniform { lo: f64, hi: f64 },
    /// Scale fixed at 1; use [`DistributionSpec::Scaled`] for anything else.
    Pareto { shape: f64 },
    Hyperexponential { weights: Vec<f64>, rates: Vec<f64> },
    /// The inner law divided by `divisor`.
    Scaled {
        inner: Box<DistributionSpec>,
        divisor: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    /// `f64::INFINITY` when it diverges.
    pub second_moment: f64,
    /// Supremum of the orders `k` with `E[X^k] < inf`.
    pub finite_moment_order: f64,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be finite and > 0, got {x}")))
    }
}

impl DistributionSpec {
    pub fn exponential_with_mean(mean: f64) -> Self {
        DistributionSpec::Exponential { rate: 1.0 / mean }
    }

    pub fn scaled(self, divisor: f64) -> Self {
        DistributionSpec::Scaled {
            inner: Box::new(self),
            divisor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DistributionSpec::Exponential { rate } => positive("exponential rate", *rate),
            DistributionSpec::Deterministic { value } => positive("deterministic value", *value),
            DistributionSpec::Uniform { lo, hi } => {
                positive("uniform lo", *lo)?;
                positive("uniform hi", *hi)?;
                if lo < hi {
                    Ok(())
                } else {
                    Err(Error::param(format!("uniform needs lo < hi, got ({lo}, {hi})")))
                }
            }
            DistributionSpec::Pareto { shape } => {
                if shape.is_finite() && *shape > 1.0 {
                    Ok(())
                } else {
                    Err(Error::param(format!("pareto shape must be > 1, got {shape}")))
                }
            }
            DistributionSpec::Hyperexponential { weights, rates } => {
                if weights.is_empty() || weights.len() != rates.len() {
                    return Err(Error::param(
                        "hyperexponential needs equally many weights and rates",
                    ));
                }
                for (&w, &r) in weights.iter().zip(rates) {
                    positive("hyperexponential weight", w)?;
                    positive("hyperexponential rate", r)?;
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::param(format!(
                        "hyperexponential weights must sum to 1, got {total}"
                    )));
                }
                Ok(())
            }
            DistributionSpec::Scaled { inner, divisor } => {
                if !(divisor.is_finite() && *divisor > 0.0 && *divisor < 1.0) {
                    return Err(Error::param(format!(
                        "scaled divisor must lie in (0, 1), got {divisor}"
                    )));
                }
                inner.validate()
            }
        }
    }

    /// One draw.
    ///
    /// Uniforms consumed per draw: deterministic 0, exponential/uniform/pareto 1,
    /// hyperexponential 2, scaled as its inner law.
    pub fn sample(&self, stream: &mut RandomStream) -> Result<f64> {
        self.validate()?;
        Ok(self.draw(stream))
    }

    /// Draw without re-validating; callers validate once up front.
    pub(crate) fn draw(&self, stream: &mut RandomStream) -> f64 {
        match self {
            DistributionSpec::Exponential { rate } => exponential(*rate, stream.uniform()),
            DistributionSpec::Deterministic { value } => *value,
            DistributionSpec::Uniform { lo, hi } => {
                let x = lo + (hi - lo) * stream.uniform();
                // rounding can land on lo; keep the support open at the bottom
                if x > *lo {
                    x
                } else {
                    0.5 * (lo + hi)
                }
            }
            DistributionSpec::Pareto { shape } => (1.0 - stream.uniform()).powf(-1.0 / shape),
            DistributionSpec::Hyperexponential { weights, rates } => {
                let pick = stream.uniform();
                let u = stream.uniform();
                let mut acc = 0.0;
                let mut idx = weights.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    acc += w;
                    if pick < acc {
                        idx = i;
                        break;
                    }
                }
                exponential(rates[idx], u)
            }
            DistributionSpec::Scaled { inner, divisor } => inner.draw(stream) / divisor,
        }
    }

    pub fn moments(&self) -> Moments {
        match self {
            DistributionSpec::Exponential { rate } => Moments {
                mean: 1.0 / rate,
                second_moment: 2.0 / (rate * rate),
                finite_moment_order: f64::INFINITY,
            },
            DistributionSpec::Deterministic { value } => Moments {
                mean: *value,
                second_moment: value * value,
                finite_moment_order: f64::INFINITY,
            },
            DistributionSpec::Uniform { lo, hi } => Moments {
                mean: 0.5 * (lo + hi),
                second_moment: (lo * lo + lo * hi + hi * hi) / 3.0,
                finite_moment_order: f64::INFINITY,
            },
            DistributionSpec::Pareto { shape } => Moments {
                mean: shape / (shape - 1.0),
                second_moment: if *shape > 2.0 {
                    shape / (shape - 2.0)
                } else {
                    f64::INFINITY
                },
                finite_moment_order: *shape,
            },
            DistributionSpec::Hyperexponential { weights, rates } => Moments {
                mean: weights.iter().zip(rates).map(|(w, r)| w / r).sum(),
                second_moment: weights.iter().zip(rates).map(|(w, r)| 2.0 * w / (r * r)).sum(),
                finite_moment_order: f64::INFINITY,
            },
            DistributionSpec::Scaled { inner, divisor } => {
                let m = inner.moments();
                Moments {
                    mean: m.mean / divisor,
                    second_moment: m.second_moment / (divisor * divisor),
                    finite_moment_order: m.finite_moment_order,
                }
            }
        }
    }
}

fn exponential(rate: f64, u: f64) -> f64 {
    // u in [0,1) so 1-u in (0,1]; a zero draw is pushed to the smallest positive value
    let x = -(1.0 - u).ln() / rate;
    if x > 0.0 {
        x
    } else {
        f64::MIN_POSITIVE
    }
}

/// Load and mean drift of a single-server queue.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SystemLoad {
    /// `E[B] / E[A]`
    pub rho: f64,
    /// `E[A] - E[B]`
    pub mu: f64,
}

pub fn system_load(arrival: &DistributionSpec, size: &DistributionSpec) -> Result<SystemLoad> {
    arrival.validate()?;
    size.validate()?;
    let ea = arrival.moments().mean;
    let eb = size.moments().mean;
    if eb >= ea {
        return Err(Error::UnstableSystem {
            mean_size: eb,
            mean_interarrival: ea,
        });
    }
    let rho = eb / ea;
    Ok(SystemLoad {
        rho,
        mu: ea * (1.0 - rho),
    })
}

fn parse_list(kind: &str, body: &str, n: Option<usize>) -> Result<Vec<f64>> {
    let vals = body
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::param(format!("{kind}: cannot parse `{t}` as a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(n) = n {
        if vals.len() != n {
            return Err(Error::param(format!(
                "{kind} takes {n} parameter(s), got {}",
                vals.len()
            )));
        }
    }
    Ok(vals)
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::param(format!("`{s}` is not of the form kind:params")))?;
        let spec = match kind {
            "exp" => {
                let v = parse_list(kind, body, Some(1))?;
                positive("exponential mean", v[0])?;
                DistributionSpec::exponential_with_mean(v[0])
            }
            "det" => DistributionSpec::Deterministic {
                value: parse_list(kind, body, Some(1))?[0],
            },
            "uni" => {
                let v = parse_list(kind, body, Some(2))?;
                DistributionSpec::Uniform { lo: v[0], hi: v[1] }
            }
            "pareto" => DistributionSpec::Pareto {
                shape: parse_list(kind, body, Some(1))?[0],
            },
            "hyperexp" => {
                let v = parse_list(kind, body, None)?;
                if v.is_empty() || v.len() % 2 != 0 {
                    return Err(Error::param("hyperexp takes weight,mean pairs"));
                }
                let (weights, rates) = v
                    .chunks(2)
                    .map(|c| {
                        positive("hyperexponential mean", c[1])?;
                        Ok((c[0], 1.0 / c[1]))
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .unzip();
                DistributionSpec::Hyperexponential { weights, rates }
            }
            "scaled" => {
                let (r, inner) = body
                    .split_once(':')
                    .ok_or_else(|| Error::param("scaled takes R:INNER"))?;
                let divisor = parse_list(kind, r, Some(1))?[0];
                inner.parse::<DistributionSpec>()?.scaled(divisor)
            }
            other => return Err(Error::param(format!("unknown distribution kind `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Exponential { rate } => write!(f, "exp:{}", 1.0 / rate),
            DistributionSpec::Deterministic { value } => write!(f, "det:{value}"),
            DistributionSpec::Uniform { lo, hi } => write!(f, "uni:{lo},{hi}"),
            DistributionSpec::Pareto { shape } => write!(f, "pareto:{shape}"),
            DistributionSpec::Hyperexponential { weights, rates } => {
                write!(f, "hyperexp:")?;
                for (i, (w, r)) in weights.iter().zip(rates).enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w},{}", 1.0 / r)?;
                }
                Ok(())
            }
            DistributionSpec::Scaled { inner, divisor } => write!(f, "scaled:{divisor}:{inner}"),
        }
    }
}

// Config files may carry either the tagged record or the short notation.
#[derive(Deserialize)]
#[serde(untagged)]
enum SpecRepr {
    Notation(String),
    Tagged(TaggedSpec),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum TaggedSpec {
    Exponential { rate: f64 },
    Deterministic { value: f64 },
    Uniform { lo: f64, hi: f64 },
    Pareto { shape: f64 },
    Hyperexponential { weights: Vec<f64>, rates: Vec<f64> },
    Scaled { inner: Box<SpecRepr>, divisor: f64 },
}

impl TryFrom<SpecRepr> for DistributionSpec {
    type Error = Error;

    fn try_from(repr: SpecRepr) -> Result<Self> {
        let spec = match repr {
            SpecRepr::Notation(s) => return s.parse(),
            SpecRepr::Tagged(t) => match t {
                TaggedSpec::Exponential { rate } => DistributionSpec::Exponential { rate },
                TaggedSpec::Deterministic { value } => DistributionSpec::Deterministic { value },
                TaggedSpec::Uniform { lo, hi } => DistributionSpec::Uniform { lo, hi },
                TaggedSpec::Pareto { shape } => DistributionSpec::Pareto { shape },
                TaggedSpec::Hyperexponential { weights, rates } => {
                    DistributionSpec::Hyperexponential { weights, rates }
                }
                TaggedSpec::Scaled { inner, divisor } => DistributionSpec::Scaled {
                    inner: Box::new(DistributionSpec::try_from(*inner)?),
                    divisor,
                },
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}
