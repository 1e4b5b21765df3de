//! Simulated signatures. Tokens exist only once the ledger has minted them,
//! and the adversary can mint only for the nodes it controls.

use std::collections::HashMap;

use super::message::{Digest, Signature, Token};
use crate::error::{Error, Result};
use crate::model::NodeId;

/// Who requested a token.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Minter {
    /// The protocol logic of the signer itself.
    Owner,
    /// The adversary, acting for a faulty signer.
    Adversary,
}

#[derive(Clone, Debug, Default)]
pub struct Ledger {
    entries: HashMap<(NodeId, Digest), (Token, Minter)>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Issues the token of `signer` over `digest`. `signer_is_owned` tells
    /// whether the caller may sign for that node.
    pub fn mint(&mut self, signer: NodeId, digest: Digest, minter: Minter, signer_is_owned: bool) -> Result<Signature> {
        if !signer_is_owned {
            return Err(Error::Forgery(signer));
        }
        let token = self
            .entries
            .entry((signer, digest))
            .or_insert_with(|| (token_for(signer, digest), minter))
            .0;
        Ok(Signature { signer, token })
    }

    pub fn verify_signature(&self, token: Token, signer: NodeId, digest: Digest) -> bool {
        self.entries.get(&(signer, digest)).is_some_and(|(t, _)| *t == token)
    }

    pub fn verify(&self, sig: &Signature, digest: Digest) -> bool {
        self.verify_signature(sig.token, sig.signer, digest)
    }

    pub fn minter(&self, signer: NodeId, digest: Digest) -> Option<Minter> {
        self.entries.get(&(signer, digest)).map(|(_, m)| *m)
    }

    /// Every minted (signer, digest) pair with its minter.
    pub fn entries(&self) -> impl Iterator<Item = (NodeId, Digest, Minter)> + '_ {
        self.entries.iter().map(|((signer, digest), (_, minter))| (*signer, *digest, *minter))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

// Tokens only need to be fixed per (signer, digest); unforgeability comes
// from the ledger lookup, not from the token being hard to guess.
fn token_for(signer: NodeId, digest: Digest) -> Token {
    Token(splitmix(splitmix(signer.0 as u64 ^ 0x5349_4721) ^ digest.0))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mint_and_verify() {
        let mut l = Ledger::new();
        let d = Digest(7);
        let sig = l.mint(NodeId(2), d, Minter::Owner, true).unwrap();
        assert!(l.verify_signature(sig.token, NodeId(2), d));
        assert!(!l.verify_signature(sig.token, NodeId(2), Digest(8)));
        assert!(!l.verify_signature(sig.token, NodeId(3), d));
        // Replays stay valid.
        assert!(l.verify(&sig, d));
    }

    #[test]
    fn honest_keys_cannot_be_minted_by_adversary() {
        let mut l = Ledger::new();
        assert_eq!(l.mint(NodeId(1), Digest(1), Minter::Adversary, false), Err(Error::Forgery(NodeId(1))));
        assert!(l.mint(NodeId(5), Digest(1), Minter::Adversary, true).is_ok());
    }

    #[test]
    fn unminted_token_rejected_even_if_guessed() {
        let l = Ledger::new();
        let guess = token_for(NodeId(1), Digest(3));
        assert!(!l.verify_signature(guess, NodeId(1), Digest(3)));
    }
}
