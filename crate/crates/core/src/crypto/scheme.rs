//! Signature providers.
//!
//! The default provider is a deterministic keyed tag: a signature is
//! `SHA-256(secret || message)`. It behaves as an ideal signature oracle:
//! the tag key never leaves this module, a [`VerifyKey`] only answers
//! `verify` queries, and the only way to produce a signature is through the
//! [`KeyPair`] of its owner. With the `ed25519` feature a real asymmetric
//! provider is available through [`keygen_with`].

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graph::NodeId;

/// Which provider backs a key pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    #[default]
    Tag,
    #[cfg(feature = "ed25519")]
    Ed25519,
}

/// Opaque signature bytes. Their in-memory length is provider-specific; wire
/// accounting always uses the configured signature length instead.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Signature(Box<[u8]>);

impl Signature {
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self(bytes.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature(")?;
        for b in self.0.iter().take(6) {
            write!(f, "{b:02x}")?;
        }
        write!(f, "..)")
    }
}

#[derive(Clone)]
enum Secret {
    Tag([u8; 32]),
    #[cfg(feature = "ed25519")]
    Ed25519(ed25519_dalek::SigningKey),
}

#[derive(Clone)]
enum Public {
    Tag([u8; 32]),
    #[cfg(feature = "ed25519")]
    Ed25519(ed25519_dalek::VerifyingKey),
}

/// Public half of a node's key, as published in the directory.
#[derive(Clone)]
pub struct VerifyKey {
    node: NodeId,
    public: Public,
}

impl VerifyKey {
    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn verify(&self, msg: &[u8], sig: &Signature) -> bool {
        match &self.public {
            Public::Tag(key) => tag(key, msg)[..] == *sig.as_bytes(),
            #[cfg(feature = "ed25519")]
            Public::Ed25519(vk) => {
                let Ok(bytes) = <[u8; 64]>::try_from(sig.as_bytes()) else {
                    return false;
                };
                vk.verify_strict(msg, &ed25519_dalek::Signature::from_bytes(&bytes)).is_ok()
            }
        }
    }
}

impl fmt::Debug for VerifyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VerifyKey").field("node", &self.node).finish_non_exhaustive()
    }
}

/// A node's signing capability together with its published verify key.
#[derive(Clone)]
pub struct KeyPair {
    node: NodeId,
    secret: Secret,
    verify: VerifyKey,
}

impl KeyPair {
    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn verify_key(&self) -> &VerifyKey {
        &self.verify
    }

    pub fn sign(&self, msg: &[u8]) -> Signature {
        match &self.secret {
            Secret::Tag(key) => Signature::from_bytes(&tag(key, msg)),
            #[cfg(feature = "ed25519")]
            Secret::Ed25519(sk) => {
                use ed25519_dalek::Signer;
                Signature::from_bytes(&sk.sign(msg).to_bytes())
            }
        }
    }
}

impl fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyPair").field("node", &self.node).finish_non_exhaustive()
    }
}

fn tag(key: &[u8; 32], msg: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(key);
    h.update(msg);
    h.finalize().into()
}

fn derive_seed(node: NodeId, seed: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"nectar/keygen/v1");
    h.update(seed.to_be_bytes());
    h.update((node as u64).to_be_bytes());
    h.finalize().into()
}

/// Deterministic key pair for `node` under the default provider.
pub fn keygen(node: NodeId, seed: u64) -> KeyPair {
    keygen_with(SchemeKind::Tag, node, seed)
}

pub fn keygen_with(scheme: SchemeKind, node: NodeId, seed: u64) -> KeyPair {
    let material = derive_seed(node, seed);
    let (secret, public) = match scheme {
        SchemeKind::Tag => (Secret::Tag(material), Public::Tag(material)),
        #[cfg(feature = "ed25519")]
        SchemeKind::Ed25519 => {
            let sk = ed25519_dalek::SigningKey::from_bytes(&material);
            let vk = sk.verifying_key();
            (Secret::Ed25519(sk), Public::Ed25519(vk))
        }
    };
    KeyPair { node, secret, verify: VerifyKey { node, public } }
}
