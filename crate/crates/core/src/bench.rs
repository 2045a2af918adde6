//! Seeded random models and scaling measurements.

use std::io::Write;
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use crate::crisp::{crisp_partition_system, CrispEngineConfig, Strategy};
use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::fuzzy::{fuzzy_partition_system, FuzzyEngineConfig};
use crate::fuzzy_set::FuzzySet;
use crate::model::{LabelId, Model, Nflts, NftsBuilder, StateId};

/// Identifier of the pseudo-random generator, recorded with every result.
pub const RNG_ID: &str = "chacha8";

/// Shape of a random model. Ranges are inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub states: usize,
    pub actions: usize,
    /// Distributions drawn for each (state, action) pair.
    pub dists_per_pair: (usize, usize),
    /// Support size of each distribution.
    pub support: (usize, usize),
    /// `l`: the number of distinct degrees, counting 0 and 1. Distribution
    /// degrees come from a pool of `l - 2` values `k/1000` in (0, 1).
    pub values: usize,
    /// Size of the label alphabet; 0 gives an unlabeled model.
    pub labels: usize,
    /// Probability that a (state, label) pair carries a positive degree.
    pub label_density: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InfeasibleSpec(msg));
        if self.states == 0 || self.actions == 0 {
            return fail("need at least one state and one action".into());
        }
        if self.dists_per_pair.0 > self.dists_per_pair.1 || self.support.0 > self.support.1 {
            return fail("range minimum exceeds maximum".into());
        }
        if self.support.1 > self.states {
            return fail(format!("support size {} exceeds {} states", self.support.1, self.states));
        }
        if self.values < 2 || self.values - 2 > 999 {
            return fail(format!("l = {} outside 2..=1001", self.values));
        }
        if !(0.0..=1.0).contains(&self.label_density) {
            return fail(format!("label density {} outside [0, 1]", self.label_density));
        }
        Ok(())
    }
}

/// The `l - 2` pool values, ascending.
fn value_pool(rng: &mut ChaCha8Rng, l: usize) -> Vec<Degree> {
    let mut ks: Vec<u64> = index::sample(rng, 999, l - 2).into_iter().map(|k| k as u64 + 1).collect();
    ks.sort_unstable();
    ks.into_iter().map(|k| Degree::from_decimal(k, 3).expect("k/1000 is in range")).collect()
}

/// Builds the model described by `spec`. The same spec always yields the
/// same model. When the model has at least `l - 2` support entries, every
/// pool value occurs.
pub fn generate(spec: &GenSpec) -> Result<Nflts> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pool = value_pool(&mut rng, spec.values);
    let mut unused = pool.clone();
    unused.shuffle(&mut rng);

    let mut draw = |rng: &mut ChaCha8Rng| -> Degree {
        if let Some(d) = unused.pop() {
            d
        } else if pool.is_empty() {
            Degree::ONE
        } else {
            pool[rng.gen_range(0..pool.len())]
        }
    };

    let mut b = NftsBuilder::new();
    for i in 0..spec.states {
        b.add_state(&format!("s{}", i + 1))?;
    }
    for i in 0..spec.actions {
        b.add_action(&format!("a{}", i + 1))?;
    }
    for s in 0..spec.states {
        for a in 0..spec.actions {
            let k = rng.gen_range(spec.dists_per_pair.0..=spec.dists_per_pair.1);
            for _ in 0..k {
                let size = rng.gen_range(spec.support.0..=spec.support.1);
                let targets = index::sample(&mut rng, spec.states, size);
                let entries: Vec<(StateId, Degree)> =
                    targets.into_iter().map(|t| (StateId::from(t), draw(&mut rng))).collect();
                let mu = b.intern_distribution(entries)?;
                b.add_transition(StateId::from(s), crate::model::ActionId::from(a), mu)?;
            }
        }
    }
    let base = b.build()?;
    let labels: Vec<String> = (0..spec.labels).map(|i| format!("p{}", i + 1)).collect();
    let mut table = Vec::new();
    for s in 0..spec.states {
        let mut entries = Vec::new();
        for p in 0..spec.labels {
            if rng.gen_bool(spec.label_density) {
                let d = if pool.is_empty() || rng.gen_bool(0.25) { Degree::ONE } else { pool[rng.gen_range(0..pool.len())] };
                entries.push((LabelId::from(p), d));
            }
        }
        table.push((StateId::from(s), FuzzySet::from_entries(entries)));
    }
    Nflts::new(base, labels, table)
}

/// Hex SHA-256 of a canonical result text.
pub fn digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

/// One timed engine run on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub seed: u64,
    pub states: usize,
    pub actions: usize,
    pub transitions: usize,
    pub distributions: usize,
    pub size_delta: usize,
    pub l: usize,
    pub n: usize,
    pub m: usize,
    pub engine: String,
    pub wall_time_ms: f64,
    pub digest: String,
    pub rng: String,
}

/// Which pipelines a scaling run times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Crisp,
    Fuzzy,
}

impl Pipeline {
    pub fn name(self, strategy: Strategy) -> String {
        let kind = match self {
            Pipeline::Crisp => "crisp",
            Pipeline::Fuzzy => "fuzzy",
        };
        format!("{kind}-{strategy}")
    }

    /// Runs the pipeline and returns the canonical text of its result.
    pub fn run<M: Model + ?Sized>(self, m: &M, strategy: Strategy) -> String {
        let names = m.nfts().states();
        match self {
            Pipeline::Crisp => crisp_partition_system(m, &CrispEngineConfig { strategy, verbose: false }).to_text(names),
            Pipeline::Fuzzy => fuzzy_partition_system(m, &FuzzyEngineConfig { strategy, verbose: false }).to_text(names),
        }
    }
}

/// A family of specs indexed by state count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub actions: usize,
    pub dists_per_pair: (usize, usize),
    pub support: (usize, usize),
    pub values: usize,
    pub labels: usize,
    pub label_density: f64,
}

impl Default for Family {
    /// Two actions, one or two distributions per pair, supports of two or
    /// three states, `l = 6`, no labels.
    fn default() -> Self {
        Family { actions: 2, dists_per_pair: (1, 2), support: (2, 3), values: 6, labels: 0, label_density: 0.0 }
    }
}

impl Family {
    /// One action, zero to two distributions per state, supports of one to
    /// three states, `l = 6` and one label on about 30% of the states. Its
    /// compact partitions have many levels.
    pub fn layered() -> Self {
        Family { actions: 1, dists_per_pair: (0, 2), support: (1, 3), values: 6, labels: 1, label_density: 0.3 }
    }

    pub fn spec(&self, states: usize, seed: u64) -> GenSpec {
        GenSpec {
            states,
            actions: self.actions,
            dists_per_pair: self.dists_per_pair,
            support: self.support,
            values: self.values,
            labels: self.labels,
            label_density: self.label_density,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalingOptions {
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub pipelines: Vec<Pipeline>,
    /// Oracle runs only on instances with at most this many states.
    pub oracle_max_states: usize,
    pub base_seed: u64,
}

fn record<M: Model + ?Sized>(m: &M, seed: u64, l: usize, engine: String, ms: f64, digest: String) -> BenchRecord {
    let n = m.nfts();
    BenchRecord {
        seed,
        states: n.state_count(),
        actions: n.actions().len(),
        transitions: n.transitions().len(),
        distributions: n.distributions().len(),
        size_delta: n.size_of_delta(),
        l,
        n: n.state_count() + n.distributions().len(),
        m: n.size_of_delta(),
        engine,
        wall_time_ms: ms,
        digest,
        rng: RNG_ID.to_string(),
    }
}

/// Times one pipeline on one model.
pub fn time_pipeline<M: Model + ?Sized>(m: &M, pipeline: Pipeline, strategy: Strategy) -> (String, f64) {
    let start = Instant::now();
    let text = pipeline.run(m, strategy);
    (text, start.elapsed().as_secs_f64() * 1e3)
}

/// Generates every instance of the family, times each pipeline with the
/// efficient engine and, on small instances, with the oracle. Fails if the
/// two disagree anywhere.
pub fn scaling_run(family: &Family, opts: &ScalingOptions) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    for &size in &opts.sizes {
        for rep in 0..opts.repetitions {
            let seed = opts.base_seed + rep as u64;
            let spec = family.spec(size, seed);
            let m = generate(&spec)?;
            let l = m.nfts().degree_pool().len();
            for &p in &opts.pipelines {
                let (text, ms) = time_pipeline(&m, p, Strategy::Efficient);
                let fast = digest(&text);
                out.push(record(&m, seed, l, p.name(Strategy::Efficient), ms, fast.clone()));
                if size <= opts.oracle_max_states {
                    let (text, ms) = time_pipeline(&m, p, Strategy::Baseline);
                    let slow = digest(&text);
                    if slow != fast {
                        return Err(Error::DigestMismatch { seed, left: fast, right: slow });
                    }
                    out.push(record(&m, seed, l, p.name(Strategy::Baseline), ms, slow));
                }
            }
            log::info!("size {size} seed {seed}: n = {}, m = {}", m.nfts().state_count() + m.nfts().distributions().len(), m.nfts().size_of_delta());
        }
    }
    Ok(out)
}

pub fn write_csv<W: Write>(records: &[BenchRecord], w: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// distinct `x` values.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (logs.len() >= 2 && sxx > 1e-12).then(|| sxy / sxx)
}

/// Slope of wall time against `m` for one engine's records.
pub fn engine_slope(records: &[BenchRecord], engine: &str) -> Option<f64> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.engine == engine)
        .map(|r| (r.m as f64, r.wall_time_ms))
        .collect();
    loglog_slope(&points)
}
