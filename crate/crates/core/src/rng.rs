//! Keyed random streams.
//!
//! Every random decision in the simulator is addressed by a [`StreamKey`]:
//! a 64-bit master seed plus a substream identifier `(role, i, j)`. The
//! seed keys a ChaCha8 block cipher and the substream selects its 64-bit
//! stream number, so the word at position `k` of any substream can be
//! computed without touching any other substream or position.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Recorded in every output file's metadata.
pub const RNG_FAMILY: &str = "chacha8-keyed-stream/v1";

/// What a substream is used for. Part of the substream identifier, so two
/// roles with equal indices never share bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Input,
    Weight,
    Bias,
    Mux,
    BinarizeWeight,
    BinarizeBias,
    BinarizeInput,
    Fit,
    Trial,
    Custom(u32),
}

impl Role {
    fn code(self) -> u64 {
        match self {
            Role::Input => 1,
            Role::Weight => 2,
            Role::Bias => 3,
            Role::Mux => 4,
            Role::BinarizeWeight => 5,
            Role::BinarizeBias => 6,
            Role::BinarizeInput => 7,
            Role::Fit => 8,
            Role::Trial => 9,
            Role::Custom(c) => 0x1_0000_0000 | u64::from(c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub seed: u64,
    pub role: Role,
    pub i: u64,
    pub j: u64,
}

/// SplitMix64 finaliser.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl StreamKey {
    pub fn new(seed: u64, role: Role, i: u64, j: u64) -> Self {
        StreamKey { seed, role, i, j }
    }

    /// A root key for `seed`; callers re-address it with [`StreamKey::with`].
    pub fn root(seed: u64) -> Self {
        StreamKey::new(seed, Role::Trial, 0, 0)
    }

    /// Same seed, different substream.
    pub fn with(&self, role: Role, i: u64, j: u64) -> Self {
        StreamKey {
            role,
            i,
            j,
            ..*self
        }
    }

    /// Derives a new master seed from this key and `label`. Used to give each
    /// trial or grid point a fresh, independent key space.
    pub fn fork(&self, label: u64) -> Self {
        let seed =
            mix64(self.seed ^ mix64(self.substream_id() ^ mix64(label.wrapping_add(0xF0F0))));
        StreamKey::new(seed, self.role, self.i, self.j)
    }

    fn substream_id(&self) -> u64 {
        let h = mix64(self.role.code());
        let h = mix64(h ^ self.i);
        mix64(h.rotate_left(17) ^ self.j)
    }

    /// Generator positioned at the start of this substream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let mut s = self.seed;
        for chunk in key.chunks_exact_mut(8) {
            s = mix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.substream_id());
        rng
    }

    /// Uniform 32-bit word at position `k` of this substream.
    pub fn word_at(&self, k: u64) -> u32 {
        let mut rng = self.rng();
        // word_pos counts 32-bit words
        rng.set_word_pos(u128::from(k));
        rng.next_u32()
    }

    /// A single uniform draw in `[0, 1)` from the head of the substream.
    pub fn uniform(&self) -> f64 {
        self.rng().gen::<f64>()
    }
}

/// Threshold such that `u32 < threshold` happens with probability `p`
/// (to within 2^-33). `p = 1` gives `2^32`, which every word passes.
#[inline]
pub(crate) fn bernoulli_threshold(p: f64) -> u64 {
    (p.clamp(0.0, 1.0) * 4_294_967_296.0).round() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rng_is_pure_function_of_key() {
        let k = StreamKey::new(7, Role::Weight, 3, 4);
        let a: Vec<u32> = (0..16)
            .map(|_| 0)
            .scan(k.rng(), |r, _| Some(r.next_u32()))
            .collect();
        let b: Vec<u32> = (0..16)
            .map(|_| 0)
            .scan(k.rng(), |r, _| Some(r.next_u32()))
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn word_at_matches_sequential_generation() {
        let k = StreamKey::new(99, Role::Input, 0, 1);
        let mut rng = k.rng();
        let seq: Vec<u32> = (0..40).map(|_| rng.next_u32()).collect();
        for (pos, w) in seq.iter().enumerate() {
            assert_eq!(k.word_at(pos as u64), *w);
        }
    }

    #[test]
    fn distinct_substreams_differ() {
        let base = StreamKey::root(1);
        let keys = [
            base.with(Role::Weight, 0, 0),
            base.with(Role::Weight, 0, 1),
            base.with(Role::Weight, 1, 0),
            base.with(Role::Input, 0, 0),
            base.fork(0),
            base.fork(1),
        ];
        let heads: Vec<u64> = keys.iter().map(|k| k.rng().next_u64()).collect();
        for a in 0..heads.len() {
            for b in a + 1..heads.len() {
                assert_ne!(heads[a], heads[b], "keys {a} and {b} collide");
            }
        }
    }

    #[test]
    fn threshold_edges() {
        assert_eq!(bernoulli_threshold(0.0), 0);
        assert_eq!(bernoulli_threshold(1.0), 1 << 32);
        assert!(u64::from(u32::MAX) < bernoulli_threshold(1.0));
    }
}
