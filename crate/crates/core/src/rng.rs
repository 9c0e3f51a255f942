use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent generator for `(seed, stream)`. Streams are ChaCha stream ids,
/// so any trial can be replayed without touching its neighbours.
pub(crate) fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Packs a sweep point index and a trial index into one stream id.
pub(crate) fn point_stream(point: usize, trial: u64) -> u64 {
    debug_assert!(trial < 1 << 40);
    ((point as u64) << 40) | trial
}
