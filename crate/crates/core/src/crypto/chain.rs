use std::sync::Arc;

use super::{verify_proof, CryptoError, Edge, KeyDirectory, KeyPair, NeighborhoodProof, Signature, NODE_ID_LEN};
use crate::graph::NodeId;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Link {
    pub signer: NodeId,
    pub sig: Signature,
}

/// A neighborhood proof wrapped in relay signatures.
///
/// Link 1 signs the proof digest; link `r + 1` signs the digest followed by
/// the signature of link `r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainedMessage {
    proof: Arc<NeighborhoodProof>,
    links: Vec<Link>,
}

fn link_payload(digest: &[u8; 32], prev: Option<&Signature>) -> Vec<u8> {
    let mut msg = Vec::with_capacity(32 + prev.map_or(0, |s| s.as_bytes().len()));
    msg.extend_from_slice(digest);
    if let Some(prev) = prev {
        msg.extend_from_slice(prev.as_bytes());
    }
    msg
}

impl ChainedMessage {
    /// First link over `proof`. Correct nodes only originate chains for their
    /// own edges; [`verify_chain`] rejects any other first signer.
    pub fn originate(proof: Arc<NeighborhoodProof>, signer: &KeyPair) -> Self {
        let sig = signer.sign(&link_payload(&proof.digest(), None));
        Self { proof, links: vec![Link { signer: signer.node(), sig }] }
    }

    /// Raw constructor for adversarial or malformed chains.
    pub fn from_parts(proof: Arc<NeighborhoodProof>, links: Vec<Link>) -> Self {
        Self { proof, links }
    }

    /// Appends `signer`'s link. Errors if `signer` already signed.
    pub fn extend(&self, signer: &KeyPair) -> Result<Self, CryptoError> {
        if self.links.iter().any(|l| l.signer == signer.node()) {
            return Err(CryptoError::DuplicateSigner(signer.node()));
        }
        let sig = signer.sign(&link_payload(&self.proof.digest(), self.links.last().map(|l| &l.sig)));
        let mut links = Vec::with_capacity(self.links.len() + 1);
        links.extend_from_slice(&self.links);
        links.push(Link { signer: signer.node(), sig });
        Ok(Self { proof: Arc::clone(&self.proof), links })
    }

    pub fn proof(&self) -> &Arc<NeighborhoodProof> {
        &self.proof
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn edge(&self) -> Edge {
        self.proof.edge()
    }

    /// Number of signatures in the chain.
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn last_signer(&self) -> Option<NodeId> {
        self.links.last().map(|l| l.signer)
    }

    pub fn signers(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.links.iter().map(|l| l.signer)
    }

    /// Chain with only the first `len` links.
    pub fn prefix(&self, len: usize) -> Self {
        Self { proof: Arc::clone(&self.proof), links: self.links[..len.min(self.links.len())].to_vec() }
    }

    pub fn wire_len(&self, sig_len: usize) -> usize {
        NeighborhoodProof::wire_len(sig_len) + self.links.len() * (NODE_ID_LEN + sig_len)
    }
}

pub fn extend_chain(m: &ChainedMessage, signer: &KeyPair) -> Result<ChainedMessage, CryptoError> {
    m.extend(signer)
}

/// Outcome of [`verify_chain`]. `length`, `edge` and `signers` describe the
/// chain as received even when it is invalid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainCheck {
    pub valid: bool,
    pub length: usize,
    pub edge: Edge,
    pub signers: Vec<NodeId>,
}

/// Valid iff the proof verifies, the chain is non-empty, its first signer
/// is an endpoint of the edge, signers are pairwise distinct, and every link
/// verifies in order.
pub fn verify_chain(m: &ChainedMessage, dir: &KeyDirectory) -> ChainCheck {
    let signers: Vec<NodeId> = m.signers().collect();
    let check = |valid| ChainCheck { valid, length: signers.len(), edge: m.edge(), signers: signers.clone() };
    let (u, v) = m.edge();
    let Some(&first) = signers.first() else {
        return check(false);
    };
    if first != u && first != v {
        return check(false);
    }
    let mut seen = signers.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != signers.len() || !verify_proof(&m.proof, dir) {
        return check(false);
    }
    let digest = m.proof.digest();
    let mut prev: Option<&Signature> = None;
    for link in &m.links {
        if !dir.verify(link.signer, &link_payload(&digest, prev), &link.sig) {
            return check(false);
        }
        prev = Some(&link.sig);
    }
    check(true)
}
