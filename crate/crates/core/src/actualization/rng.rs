use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A stream of fair random bits.
pub trait RandomBits {
    fn next_bit(&mut self) -> bool;
}

impl<T: RandomBits + ?Sized> RandomBits for &mut T {
    fn next_bit(&mut self) -> bool {
        (**self).next_bit()
    }
}

/// Everything needed to replay a [`RandomnessSource`] to its current point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lineage {
    pub seed: u64,
    pub stream_id: u64,
    pub bits_drawn: u64,
}

/// Seeded, reproducible bit stream.
///
/// `(seed, stream_id)` selects a ChaCha8 keystream; distinct stream ids give
/// independent streams under the same seed, which is how ensemble replicas
/// get their own randomness.
#[derive(Debug, Clone)]
pub struct RandomnessSource {
    seed: u64,
    stream_id: u64,
    bits_drawn: u64,
    rng: ChaCha8Rng,
    buffer: u64,
    buffered: u32,
}

impl RandomnessSource {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RandomnessSource {
            seed,
            stream_id,
            bits_drawn: 0,
            rng,
            buffer: 0,
            buffered: 0,
        }
    }

    /// Rebuilds a source positioned right after `lineage.bits_drawn` bits.
    pub fn resume(lineage: Lineage) -> Self {
        let mut src = Self::new(lineage.seed, lineage.stream_id);
        let words = lineage.bits_drawn / 64;
        // each buffered u64 consumes two 32-bit keystream words
        src.rng.set_word_pos(2 * u128::from(words));
        src.bits_drawn = words * 64;
        for _ in 0..lineage.bits_drawn % 64 {
            src.next_bit();
        }
        src
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn bits_drawn(&self) -> u64 {
        self.bits_drawn
    }

    pub fn lineage(&self) -> Lineage {
        Lineage {
            seed: self.seed,
            stream_id: self.stream_id,
            bits_drawn: self.bits_drawn,
        }
    }
}

impl RandomBits for RandomnessSource {
    fn next_bit(&mut self) -> bool {
        if self.buffered == 0 {
            self.buffer = self.rng.next_u64();
            self.buffered = 64;
        }
        let bit = self.buffer & 1 == 1;
        self.buffer >>= 1;
        self.buffered -= 1;
        self.bits_drawn += 1;
        bit
    }
}

/// Adapts any `rand` generator, e.g. an OS entropy source, into a bit stream.
/// Runs driven by such a source cannot be replayed.
#[derive(Debug, Clone)]
pub struct RngBits<R> {
    rng: R,
    buffer: u64,
    buffered: u32,
}

impl<R: RngCore> RngBits<R> {
    pub fn new(rng: R) -> Self {
        RngBits {
            rng,
            buffer: 0,
            buffered: 0,
        }
    }
}

impl<R: RngCore> RandomBits for RngBits<R> {
    fn next_bit(&mut self) -> bool {
        if self.buffered == 0 {
            self.buffer = self.rng.next_u64();
            self.buffered = 64;
        }
        let bit = self.buffer & 1 == 1;
        self.buffer >>= 1;
        self.buffered -= 1;
        bit
    }
}
