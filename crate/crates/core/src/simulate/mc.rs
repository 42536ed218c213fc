//! Seeded, chunked Monte Carlo reductions.
//!
//! Replicates are split into chunks of `MCConfig::chunk`; chunk `c` draws
//! from ChaCha stream `c` of the configured seed. Chunks may run on any
//! number of threads and are merged in chunk order, so every result is a
//! pure function of `(replicates, seed, chunk)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Generator handed to Monte Carlo functionals.
pub type SimRng = ChaCha8Rng;

/// Replicate count, seed and chunk size of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MCConfig {
    pub replicates: u64,
    pub seed: u64,
    pub chunk: u64,
}

impl MCConfig {
    pub const DEFAULT_CHUNK: u64 = 10_000;

    pub fn new(replicates: u64, seed: u64) -> Result<Self> {
        let cfg = MCConfig {
            replicates,
            seed,
            chunk: Self::DEFAULT_CHUNK,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_chunk(self, chunk: u64) -> Result<Self> {
        let cfg = MCConfig { chunk, ..self };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidParams("replicates must be >= 1".into()));
        }
        if self.chunk == 0 {
            return Err(Error::InvalidParams("chunk must be >= 1".into()));
        }
        Ok(())
    }

    fn chunk_count(&self) -> u64 {
        self.replicates.div_ceil(self.chunk)
    }
}

/// Generator for chunk `index` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn reduce<A: Send>(
    cfg: &MCConfig,
    init: impl Fn() -> A + Sync,
    body: impl Fn(&mut SimRng, &mut A) -> Result<()> + Sync,
    merge: impl Fn(&mut A, A),
) -> Result<A> {
    cfg.validate()?;
    let parts: Vec<Result<A>> = (0..cfg.chunk_count())
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(cfg.seed, c);
            let count = cfg.chunk.min(cfg.replicates - c * cfg.chunk);
            let mut acc = init();
            for _ in 0..count {
                body(&mut rng, &mut acc)?;
            }
            Ok(acc)
        })
        .collect();
    let mut total = init();
    for part in parts {
        merge(&mut total, part?);
    }
    Ok(total)
}

/// Count, mean and central moment sums up to order four, mergeable
/// across chunks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SampleMoments {
    pub n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl SampleMoments {
    pub fn push(&mut self, x: f64) {
        let n1 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let term = delta * dn * n1;
        self.mean += dn;
        self.m4 += term * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += term * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += term;
    }

    pub fn merge(&mut self, other: &SampleMoments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let d = other.mean - self.mean;
        let (d2, d3, d4) = (d * d, d * d * d, d * d * d * d);
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3 + other.m3 + d3 * na * nb * (na - nb) / (n * n) + 3.0 * d * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * d * (na * other.m3 - nb * self.m3) / n;
        self.mean += d * nb / n;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
        self.n += other.n;
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (zero for fewer than two samples).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn mean_estimate(&self, seed: u64) -> EstimateWithCI {
        EstimateWithCI {
            value: self.mean,
            std_error: (self.variance() / self.n as f64).sqrt(),
            replicates: self.n,
            seed,
        }
    }

    /// Sample variance with its large-sample standard error
    /// `sqrt((μ4 - (n-3)/(n-1) σ^4) / n)`.
    pub fn variance_estimate(&self, seed: u64) -> EstimateWithCI {
        let n = self.n as f64;
        let var = self.variance();
        let std_error = if self.n < 4 {
            0.0
        } else {
            let mu4 = self.m4 / n;
            ((mu4 - (n - 3.0) / (n - 1.0) * var * var).max(0.0) / n).sqrt()
        };
        EstimateWithCI {
            value: var,
            std_error,
            replicates: self.n,
            seed,
        }
    }
}

/// Monte Carlo mean with standard error `s / sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub value: f64,
    pub std_error: f64,
    pub replicates: u64,
    pub seed: u64,
}

impl EstimateWithCI {
    /// `value ± z · std_error`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        (self.value - z * self.std_error, self.value + z * self.std_error)
    }
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("Monte Carlo functional returned {v}")))
    }
}

/// Running moments of `functional` over the configured replicates.
pub fn sample_moments(
    cfg: &MCConfig,
    functional: impl Fn(&mut SimRng) -> Result<f64> + Sync,
) -> Result<SampleMoments> {
    reduce(
        cfg,
        SampleMoments::default,
        |rng, acc| {
            acc.push(finite(functional(rng)?)?);
            Ok(())
        },
        |acc, part| acc.merge(&part),
    )
}

/// Mean of `functional` with its standard error.
pub fn estimate(cfg: &MCConfig, functional: impl Fn(&mut SimRng) -> Result<f64> + Sync) -> Result<EstimateWithCI> {
    Ok(sample_moments(cfg, functional)?.mean_estimate(cfg.seed))
}

/// Means of `k` functionals evaluated on the same replicates; `functional`
/// fills a slice of length `k`.
pub fn estimate_many(
    cfg: &MCConfig,
    k: usize,
    functional: impl Fn(&mut SimRng, &mut [f64]) -> Result<()> + Sync,
) -> Result<Vec<EstimateWithCI>> {
    let moments = reduce(
        cfg,
        || (vec![SampleMoments::default(); k], vec![0.0; k]),
        |rng, (acc, buf)| {
            functional(rng, buf)?;
            for (m, &v) in acc.iter_mut().zip(buf.iter()) {
                m.push(finite(v)?);
            }
            Ok(())
        },
        |(acc, _), (part, _)| {
            for (m, p) in acc.iter_mut().zip(&part) {
                m.merge(p);
            }
        },
    )?;
    Ok(moments.0.iter().map(|m| m.mean_estimate(cfg.seed)).collect())
}

/// Estimated probability of one histogram bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinEstimate {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
    pub std_error: f64,
}

/// Estimated probability of hitting an atom location exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomEstimate {
    pub location: f64,
    pub mass: f64,
    pub std_error: f64,
}

/// Empirical law split into atoms and equal-width bins. Every mass is a
/// fraction of all replicates, including those the functional discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bins: Vec<BinEstimate>,
    pub atoms: Vec<AtomEstimate>,
    pub replicates: u64,
    pub seed: u64,
}

fn binomial(count: u64, n: u64) -> (f64, f64) {
    let p = count as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

/// Histogram of `functional` over `bins` equal bins of `range`. Values
/// within `1e-12` (relative) of an entry of `atoms` are counted as that
/// atom instead; `None` values and values outside the range are dropped
/// but still count towards the normalization.
pub fn histogram(
    cfg: &MCConfig,
    bins: usize,
    range: (f64, f64),
    atoms: &[f64],
    functional: impl Fn(&mut SimRng) -> Result<Option<f64>> + Sync,
) -> Result<Histogram> {
    let (lo, hi) = range;
    if bins == 0 {
        return Err(Error::InvalidParams("histogram needs at least one bin".into()));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParams(format!("empty histogram range [{lo}, {hi}]")));
    }
    let width = (hi - lo) / bins as f64;
    let counts = reduce(
        cfg,
        || vec![0u64; bins + atoms.len()],
        |rng, acc| {
            let Some(v) = functional(rng)? else {
                return Ok(());
            };
            let v = finite(v)?;
            if let Some(k) = atoms.iter().position(|&a| (v - a).abs() <= 1e-12 * a.abs().max(1.0)) {
                acc[bins + k] += 1;
            } else if (lo..=hi).contains(&v) {
                let k = (((v - lo) / width) as usize).min(bins - 1);
                acc[k] += 1;
            }
            Ok(())
        },
        |acc, part| acc.iter_mut().zip(part).for_each(|(a, p)| *a += p),
    )?;
    let n = cfg.replicates;
    let bin_estimates = (0..bins)
        .map(|k| {
            let (mass, std_error) = binomial(counts[k], n);
            BinEstimate {
                lo: lo + k as f64 * width,
                hi: if k + 1 == bins { hi } else { lo + (k + 1) as f64 * width },
                mass,
                std_error,
            }
        })
        .collect();
    let atom_estimates = atoms
        .iter()
        .enumerate()
        .map(|(k, &location)| {
            let (mass, std_error) = binomial(counts[bins + k], n);
            AtomEstimate {
                location,
                mass,
                std_error,
            }
        })
        .collect();
    Ok(Histogram {
        bins: bin_estimates,
        atoms: atom_estimates,
        replicates: n,
        seed: cfg.seed,
    })
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic critical value of [`ks_two_sample`] at level `alpha`.
pub fn ks_critical_value(alpha: f64, n: usize, m: usize) -> f64 {
    let c = (-(0.5 * alpha).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}
