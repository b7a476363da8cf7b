//! Unforgeability substrate: signature providers, neighborhood proofs and
//! relay signature chains.
//!
//! Canonical wire sizes, used for byte accounting regardless of the provider:
//! a node ID is [`NODE_ID_LEN`] bytes, a proof is `8 + 2 * sig_len` bytes and
//! a chain of `L` links adds `L * (4 + sig_len)` bytes on top of its proof.

mod chain;
mod proof;
mod scheme;

use thiserror::Error;

use crate::graph::NodeId;

pub use chain::{extend_chain, verify_chain, ChainCheck, ChainedMessage, Link};
pub use proof::{edge_encoding, make_proof, verify_proof, Edge, NeighborhoodProof};
pub use scheme::{keygen, keygen_with, KeyPair, SchemeKind, Signature, VerifyKey};

/// Accounting size of one signature: DER-encoded ECDSA P-256 upper bound.
pub const DEFAULT_SIG_LEN: usize = 72;
pub const NODE_ID_LEN: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CryptoError {
    #[error("a neighborhood proof needs two distinct nodes, got {0} twice")]
    SameNode(NodeId),
    #[error("node {0} already signed this chain")]
    DuplicateSigner(NodeId),
}

/// Verify keys of every node in the run, indexed by node ID.
#[derive(Clone, Debug)]
pub struct KeyDirectory {
    keys: Vec<VerifyKey>,
}

impl KeyDirectory {
    /// Builds the directory from one key pair per node, in node order.
    ///
    /// # Panics
    /// If `pairs[i].node() != i` for some `i`.
    pub fn from_pairs(pairs: &[KeyPair]) -> Self {
        let keys = pairs
            .iter()
            .enumerate()
            .map(|(i, kp)| {
                assert_eq!(kp.node(), i, "key pairs must be supplied in node order");
                kp.verify_key().clone()
            })
            .collect();
        Self { keys }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn get(&self, node: NodeId) -> Option<&VerifyKey> {
        self.keys.get(node)
    }

    /// `false` for unknown signers.
    pub fn verify(&self, signer: NodeId, msg: &[u8], sig: &Signature) -> bool {
        self.get(signer).is_some_and(|k| k.verify(msg, sig))
    }
}

/// Key pairs for nodes `0..n` from one run seed.
pub fn keygen_all(n: usize, seed: u64, scheme: SchemeKind) -> Vec<KeyPair> {
    (0..n).map(|v| keygen_with(scheme, v, seed)).collect()
}
