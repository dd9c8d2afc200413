//! Seeded Monte-Carlo integration over a box on τ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quadrature::NeumaierSum;

/// Independent RNG streams; fixed so the estimate does not depend on the
/// number of threads.
const STREAMS: u64 = 256;

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_SAMPLES: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarloOptions {
    pub samples: u64,
    pub seed: u64,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        Self { samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Estimates `∫∫ g(u, v) du dv` over `[u0, u1] × [v0, v1]`.
pub(crate) fn integrate_box<G>(bounds: [f64; 4], g: G, opts: MonteCarloOptions) -> MonteCarloEstimate
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    let [u0, u1, v0, v1] = bounds;
    let n = opts.samples.max(2);
    let partials: Vec<(f64, f64)> = (0..STREAMS)
        .into_par_iter()
        .map(|k| {
            let count = n / STREAMS + u64::from(k < n % STREAMS);
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k);
            let (mut s1, mut s2) = (NeumaierSum::default(), NeumaierSum::default());
            for _ in 0..count {
                let u = u0 + (u1 - u0) * rng.random::<f64>();
                let v = v0 + (v1 - v0) * rng.random::<f64>();
                let y = g(u, v);
                s1.add(y);
                s2.add(y * y);
            }
            (s1.total(), s2.total())
        })
        .collect();
    let (mut s1, mut s2) = (NeumaierSum::default(), NeumaierSum::default());
    for (a, b) in partials {
        s1.add(a);
        s2.add(b);
    }
    let nf = n as f64;
    let mean = s1.total() / nf;
    let var = ((s2.total() / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    let box_area = (u1 - u0) * (v1 - v0);
    MonteCarloEstimate { value: box_area * mean, std_error: box_area * (var / nf).sqrt(), samples: n }
}
