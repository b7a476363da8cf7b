//! Reachability-gossip baselines: Bloom-filter flooding (MtG) and its
//! signed-ID variant (MtGv2).

mod bloom;
mod mtg;
mod mtgv2;

pub use bloom::{BloomFilter, BloomParams};
pub use mtg::{mtg_decide, mtg_step, MtgState};
pub use mtgv2::{mtgv2_decide, mtgv2_step, sign_id, verify_id, Mtgv2State, SignedId, SignedIds};
