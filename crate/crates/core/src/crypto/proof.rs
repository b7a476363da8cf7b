use sha2::{Digest, Sha256};

use super::{CryptoError, KeyDirectory, KeyPair, Signature, NODE_ID_LEN};
use crate::graph::NodeId;

/// Undirected edge in canonical `(min, max)` order.
pub type Edge = (NodeId, NodeId);

/// `"EDGE" || min(u, v) || max(u, v)` with 4-byte big-endian IDs.
pub fn edge_encoding(u: NodeId, v: NodeId) -> [u8; 12] {
    let (a, b) = (u.min(v), u.max(v));
    let mut out = [0u8; 12];
    out[..4].copy_from_slice(b"EDGE");
    out[4..8].copy_from_slice(&(a as u32).to_be_bytes());
    out[8..].copy_from_slice(&(b as u32).to_be_bytes());
    out
}

/// Attestation of the edge `{u, v}` signed by both endpoints.
///
/// Fields are public so that adversaries can assemble arbitrary (and
/// usually invalid) proofs; only [`verify_proof`] decides what counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NeighborhoodProof {
    pub u: NodeId,
    pub v: NodeId,
    pub sig_u: Signature,
    pub sig_v: Signature,
}

impl NeighborhoodProof {
    pub fn edge(&self) -> Edge {
        (self.u, self.v)
    }

    /// Digest bound into every chain link, so a chain cannot be spliced onto
    /// a different proof.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(edge_encoding(self.u, self.v));
        h.update([self.u < self.v].map(u8::from));
        h.update(self.sig_u.as_bytes());
        h.update(self.sig_v.as_bytes());
        h.finalize().into()
    }

    pub fn wire_len(sig_len: usize) -> usize {
        2 * NODE_ID_LEN + 2 * sig_len
    }
}

/// Both endpoints sign the canonical edge encoding.
pub fn make_proof(a: &KeyPair, b: &KeyPair) -> Result<NeighborhoodProof, CryptoError> {
    if a.node() == b.node() {
        return Err(CryptoError::SameNode(a.node()));
    }
    let (lo, hi) = if a.node() < b.node() { (a, b) } else { (b, a) };
    let msg = edge_encoding(lo.node(), hi.node());
    Ok(NeighborhoodProof { u: lo.node(), v: hi.node(), sig_u: lo.sign(&msg), sig_v: hi.sign(&msg) })
}

/// True iff `u < v` and both endpoint signatures check out.
pub fn verify_proof(p: &NeighborhoodProof, dir: &KeyDirectory) -> bool {
    if p.u >= p.v {
        return false;
    }
    let msg = edge_encoding(p.u, p.v);
    dir.verify(p.u, &msg, &p.sig_u) && dir.verify(p.v, &msg, &p.sig_v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::{keygen_all, SchemeKind};

    fn setup() -> (Vec<KeyPair>, KeyDirectory) {
        let pairs = keygen_all(4, 42, SchemeKind::Tag);
        let dir = KeyDirectory::from_pairs(&pairs);
        (pairs, dir)
    }

    #[test]
    fn proof_round_trip_is_canonical() {
        let (k, dir) = setup();
        let p = make_proof(&k[2], &k[1]).unwrap();
        assert_eq!(p.edge(), (1, 2));
        assert!(verify_proof(&p, &dir));
        assert_eq!(p, make_proof(&k[1], &k[2]).unwrap());
    }

    #[test]
    fn same_node_is_rejected() {
        let (k, _) = setup();
        assert_eq!(make_proof(&k[0], &k[0]), Err(CryptoError::SameNode(0)));
    }

    #[test]
    fn tampered_signature_fails() {
        let (k, dir) = setup();
        let mut p = make_proof(&k[0], &k[1]).unwrap();
        p.sig_v = Signature::from_bytes(b"garbage");
        assert!(!verify_proof(&p, &dir));
    }

    #[test]
    fn reversed_orientation_fails() {
        let (k, dir) = setup();
        let p = make_proof(&k[0], &k[1]).unwrap();
        let flipped = NeighborhoodProof { u: 1, v: 0, sig_u: p.sig_v.clone(), sig_v: p.sig_u.clone() };
        assert!(!verify_proof(&flipped, &dir));
    }

    #[test]
    fn single_endpoint_cannot_fabricate_edge() {
        // Node 3 holds only its own key and tries to claim an edge with 0.
        let (k, dir) = setup();
        let msg = edge_encoding(0, 3);
        let own = k[3].sign(&msg);
        let attempts = [
            NeighborhoodProof { u: 0, v: 3, sig_u: own.clone(), sig_v: own.clone() },
            NeighborhoodProof { u: 0, v: 3, sig_u: Signature::from_bytes(&[0; 32]), sig_v: own.clone() },
            NeighborhoodProof { u: 0, v: 3, sig_u: k[3].sign(&edge_encoding(1, 3)), sig_v: own.clone() },
            // Reuse 0's signature from a genuine proof of another edge.
            NeighborhoodProof { u: 0, v: 3, sig_u: make_proof(&k[0], &k[1]).unwrap().sig_u, sig_v: own },
        ];
        for p in &attempts {
            assert!(!verify_proof(p, &dir));
        }
    }

    #[test]
    fn wire_len_convention() {
        assert_eq!(NeighborhoodProof::wire_len(72), 152);
    }
}
