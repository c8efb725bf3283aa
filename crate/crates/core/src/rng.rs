//! Random streams. All randomness is derived from explicit seeds.

use rand::SeedableRng;

/// Stream type used for every randomized step.
pub type CaptionRng = rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, b| {
        (h ^ u64::from(*b)).wrapping_mul(FNV_PRIME)
    })
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable seed of one caption, independent of processing order.
pub fn derive_seed(global_seed: u64, pose_id: &str, caption_index: u32) -> u64 {
    let h = splitmix(global_seed ^ splitmix(fnv1a(pose_id.as_bytes())));
    splitmix(h ^ u64::from(caption_index).wrapping_mul(0xd6e8_feb8_6659_fd93))
}

pub fn stream(seed: u64) -> CaptionRng {
    CaptionRng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        // frozen: changing the derivation changes every published dataset
        assert_eq!(derive_seed(7, "pose-0", 0), derive_seed(7, "pose-0", 0));
        assert_ne!(derive_seed(7, "pose-0", 0), derive_seed(7, "pose-0", 1));
        assert_ne!(derive_seed(7, "pose-0", 0), derive_seed(7, "pose-1", 0));
        assert_ne!(derive_seed(7, "pose-0", 0), derive_seed(8, "pose-0", 0));
    }
}
