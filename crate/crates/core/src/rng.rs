//! Seed streams.
//!
//! Every random quantity in an experiment comes from its own ChaCha stream,
//! keyed by `(master seed, trial index, stream label)`. Changing how many
//! numbers one stream consumes never perturbs another one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Independent random streams used by one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Topology,
    Data,
    Shuffle,
    Edges,
    Rho,
    Auxiliary,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Topology => 1,
            Stream::Data => 2,
            Stream::Shuffle => 3,
            Stream::Edges => 4,
            Stream::Rho => 5,
            Stream::Auxiliary => 6,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the 64-bit key of a trial from the master seed.
pub fn trial_key(master: u64, trial: u64) -> u64 {
    splitmix64(master ^ splitmix64(trial.wrapping_add(0xA5A5_5A5A)))
}

/// Opens the `stream` generator of trial `trial`.
pub fn stream_rng(master: u64, trial: u64, stream: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_key(master, trial));
    rng.set_stream(stream.id());
    rng
}

/// Plain seeded generator for one-off uses (tests, small tools).
pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
