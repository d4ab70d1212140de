//! Counter-based random streams.
//!
//! Every replicate draws from its own ChaCha8 stream keyed by
//! `(master seed, N, replicate index)`; the 64-bit block counter inside the
//! stream is the draw counter. A replicate's numbers therefore never depend
//! on which other replicates exist or in which order they run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Identifies the stream a sample was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StreamKey {
    pub master_seed: u64,
    pub n: u32,
    pub replicate: u32,
}

impl StreamKey {
    pub fn new(master_seed: u64, n: usize, replicate: usize) -> Self {
        Self {
            master_seed,
            n: n as u32,
            replicate: replicate as u32,
        }
    }

    fn stream_id(&self) -> u64 {
        ((self.n as u64) << 32) | self.replicate as u64
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id());
        rng.set_word_pos(0);
        rng
    }
}
