//! Counter-based pseudorandom streams.
//!
//! Every replication of an experiment owns an [`RngState`] addressed by a
//! `(seed, stream)` pair. The underlying generator is ChaCha8, whose output is
//! a pure function of key, stream id and block counter, so draw `k` of stream
//! `s` under seed `m` is identical on every platform and independent of how
//! many other streams were consumed before it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    /// Stream for replication `index` under `master_seed`.
    pub fn for_replication(master_seed: u64, index: u64) -> Self {
        Self::new(master_seed, index)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.inner.get_stream()
    }

    /// Number of 32-bit words consumed so far.
    pub fn word_pos(&self) -> u128 {
        self.inner.get_word_pos()
    }

    /// Repositions the stream at an absolute word offset.
    pub fn seek(&mut self, word_pos: u128) {
        self.inner.set_word_pos(word_pos);
    }
}

impl RngCore for RngState {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
