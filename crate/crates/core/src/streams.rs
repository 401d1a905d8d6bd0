//! Deterministic random streams.
//!
//! Every consumer of randomness gets a ChaCha8 generator keyed by the master
//! seed plus a domain tag, positioned on a stream chosen by the caller
//! (usually the trial index). ChaCha exposes 2^64 independent streams per key,
//! so trial `t` always sees the same numbers no matter which thread runs it.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Separates the random streams of different consumers sharing one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Generator,
    Cascade,
    MatrixForward,
    MatrixReverse,
    Transpose,
}

impl Domain {
    fn tag(self) -> u64 {
        match self {
            Domain::Generator => 0x6765_6e65_7261_746f,
            Domain::Cascade => 0x6361_7363_6164_6521,
            Domain::MatrixForward => 0x6d61_7466_7764_2121,
            Domain::MatrixReverse => 0x6d61_7472_6576_2121,
            Domain::Transpose => 0x7472_616e_7370_6f73,
        }
    }
}

/// Generator for stream `stream` of `domain` under `master_seed`.
pub fn stream_rng(master_seed: u64, domain: Domain, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.tag().to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

const BATCH: u64 = 2048;

/// Runs `trials` independent trials, each adding into a counter vector of
/// length `len`. Trial `t` receives stream `t` of `domain`, and the
/// counts are summed per batch, so the result does not depend on scheduling.
pub(crate) fn count_trials<F>(
    len: usize,
    trials: u64,
    master_seed: u64,
    domain: Domain,
    trial: F,
) -> Vec<u64>
where
    F: Fn(&mut ChaCha8Rng, &mut [u64]) + Sync,
{
    let batches = trials.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut counts = vec![0u64; len];
            for t in b * BATCH..((b + 1) * BATCH).min(trials) {
                let mut rng = stream_rng(master_seed, domain, t);
                trial(&mut rng, &mut counts);
            }
            counts
        })
        .reduce(
            || vec![0u64; len],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}
