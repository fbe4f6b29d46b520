//! Reducer routing. Keys are hashed with 64-bit FNV-1a over their
//! little-endian node ids, so a key lands on the same reducer on every
//! platform and every run.

use crate::graph::{EdgeKey, NodeId};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

pub trait ShuffleKey {
    fn stable_hash(&self) -> u64;
}

impl ShuffleKey for NodeId {
    fn stable_hash(&self) -> u64 {
        fnv1a(&self.0.to_le_bytes())
    }
}

impl ShuffleKey for EdgeKey {
    fn stable_hash(&self) -> u64 {
        let mut buf = [0u8; 8];
        buf[..4].copy_from_slice(&self.lo().0.to_le_bytes());
        buf[4..].copy_from_slice(&self.hi().0.to_le_bytes());
        fnv1a(&buf)
    }
}

#[inline]
pub fn reducer_for<K: ShuffleKey>(key: &K, reducers: usize) -> usize {
    (key.stable_hash() % reducers as u64) as usize
}
