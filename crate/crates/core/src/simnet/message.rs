//! Wire format of protocol payloads.
//!
//! Every payload encodes as `tag:u8 | len:u16 (big endian) | body` where
//! `len` is the body length in bytes:
//!
//! | payload    | tag  | body                           |
//! |------------|------|--------------------------------|
//! | `Echo`     | 0x01 | value:u8                       |
//! | `Vote`     | 0x10 | phase:u32 be, value:u8         |
//! | `Propose`  | 0x11 | phase:u32 be, value:u8         |
//! | `King`     | 0x12 | phase:u32 be, value:u8         |
//! | `Relay`    | 0x20 | instance:u32 be, value:u8      |
//! | `Decision` | 0x30 | value:u8                       |
//!
//! A payload digest packs tag, word and value into one `u64`
//! (`tag << 40 | word << 8 | value`). Every payload fits, so distinct
//! payloads never share a digest. Signatures are taken over digests, so a
//! relay signature does not depend on the round in which the relay travels.

use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::model::{Bit, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Payload {
    Echo { value: Bit },
    Vote { phase: u32, value: Bit },
    Propose { phase: u32, value: Bit },
    King { phase: u32, value: Bit },
    Relay { instance: NodeId, value: Bit },
    Decision { value: Bit },
}

impl Payload {
    pub fn tag(&self) -> u8 {
        match self {
            Payload::Echo { .. } => 0x01,
            Payload::Vote { .. } => 0x10,
            Payload::Propose { .. } => 0x11,
            Payload::King { .. } => 0x12,
            Payload::Relay { .. } => 0x20,
            Payload::Decision { .. } => 0x30,
        }
    }

    pub fn value(&self) -> Bit {
        match *self {
            Payload::Echo { value }
            | Payload::Vote { value, .. }
            | Payload::Propose { value, .. }
            | Payload::King { value, .. }
            | Payload::Relay { value, .. }
            | Payload::Decision { value } => value,
        }
    }

    /// The same payload carrying `value` instead.
    pub fn with_value(self, value: Bit) -> Payload {
        match self {
            Payload::Echo { .. } => Payload::Echo { value },
            Payload::Vote { phase, .. } => Payload::Vote { phase, value },
            Payload::Propose { phase, .. } => Payload::Propose { phase, value },
            Payload::King { phase, .. } => Payload::King { phase, value },
            Payload::Relay { instance, .. } => Payload::Relay { instance, value },
            Payload::Decision { .. } => Payload::Decision { value },
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut body = Vec::with_capacity(5);
        match *self {
            Payload::Echo { value } | Payload::Decision { value } => body.push(value.as_u8()),
            Payload::Vote { phase, value } | Payload::Propose { phase, value } | Payload::King { phase, value } => {
                body.extend_from_slice(&phase.to_be_bytes());
                body.push(value.as_u8());
            }
            Payload::Relay { instance, value } => {
                body.extend_from_slice(&instance.0.to_be_bytes());
                body.push(value.as_u8());
            }
        }
        let mut out = Vec::with_capacity(3 + body.len());
        out.push(self.tag());
        out.extend_from_slice(&(body.len() as u16).to_be_bytes());
        out.extend_from_slice(&body);
        out
    }

    pub fn decode(bytes: &[u8]) -> Option<Payload> {
        let (&tag, rest) = bytes.split_first()?;
        if rest.len() < 2 {
            return None;
        }
        let len = u16::from_be_bytes([rest[0], rest[1]]) as usize;
        let body = &rest[2..];
        if body.len() != len {
            return None;
        }
        let word = |b: &[u8]| u32::from_be_bytes([b[0], b[1], b[2], b[3]]);
        match (tag, len) {
            (0x01, 1) => Some(Payload::Echo { value: Bit::from_u8(body[0])? }),
            (0x30, 1) => Some(Payload::Decision { value: Bit::from_u8(body[0])? }),
            (0x10 | 0x11 | 0x12 | 0x20, 5) => {
                let w = word(body);
                let value = Bit::from_u8(body[4])?;
                Some(match tag {
                    0x10 => Payload::Vote { phase: w, value },
                    0x11 => Payload::Propose { phase: w, value },
                    0x12 => Payload::King { phase: w, value },
                    _ => Payload::Relay { instance: NodeId(w), value },
                })
            }
            _ => None,
        }
    }

    pub fn digest(&self) -> Digest {
        let (word, value) = match *self {
            Payload::Echo { value } | Payload::Decision { value } => (0, value),
            Payload::Vote { phase, value } | Payload::Propose { phase, value } | Payload::King { phase, value } => {
                (phase, value)
            }
            Payload::Relay { instance, value } => (instance.0, value),
        };
        Digest((self.tag() as u64) << 40 | (word as u64) << 8 | value.as_u8() as u64)
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Echo { value } => write!(f, "echo({value})"),
            Payload::Vote { phase, value } => write!(f, "vote(phase={phase},value={value})"),
            Payload::Propose { phase, value } => write!(f, "propose(phase={phase},value={value})"),
            Payload::King { phase, value } => write!(f, "king(phase={phase},value={value})"),
            Payload::Relay { instance, value } => write!(f, "relay(instance={instance},value={value})"),
            Payload::Decision { value } => write!(f, "decision({value})"),
        }
    }
}

/// Collision-free payload digest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest(pub u64);

/// Opaque signature token issued by the ledger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub signer: NodeId,
    pub token: Token,
}

/// Ordered signature chain; cheap to clone. The empty chain, carried by
/// every unauthenticated message, allocates nothing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SigChain(Option<Arc<[Signature]>>);

impl SigChain {
    pub fn empty() -> Self {
        SigChain(None)
    }

    pub fn single(sig: Signature) -> Self {
        SigChain(Some(Arc::from([sig])))
    }

    pub fn extended(&self, sig: Signature) -> Self {
        self.as_slice().iter().copied().chain([sig]).collect()
    }

    pub fn as_slice(&self) -> &[Signature] {
        self.0.as_deref().unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.as_slice().len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }
}

impl FromIterator<Signature> for SigChain {
    fn from_iter<I: IntoIterator<Item = Signature>>(iter: I) -> Self {
        let sigs: Arc<[Signature]> = iter.into_iter().collect();
        SigChain(if sigs.is_empty() { None } else { Some(sigs) })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Message {
    pub round: u32,
    pub sender: NodeId,
    pub receiver: NodeId,
    pub payload: Payload,
    pub sig_chain: SigChain,
}

impl Serialize for Message {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Sig {
            signer: NodeId,
            token: String,
        }
        let encoded: String = self.payload.encode().iter().map(|b| format!("{b:02x}")).collect();
        let chain: Vec<Sig> = self
            .sig_chain
            .as_slice()
            .iter()
            .map(|sig| Sig { signer: sig.signer, token: format!("{:016x}", sig.token.0) })
            .collect();
        let mut st = s.serialize_struct("Message", 6)?;
        st.serialize_field("round", &self.round)?;
        st.serialize_field("sender", &self.sender)?;
        st.serialize_field("receiver", &self.receiver)?;
        st.serialize_field("payload", &encoded)?;
        st.serialize_field("decoded", &self.payload.to_string())?;
        st.serialize_field("sig_chain", &chain)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_round_trips() {
        let all = [
            Payload::Echo { value: Bit::One },
            Payload::Vote { phase: 3, value: Bit::Zero },
            Payload::Propose { phase: 70000, value: Bit::One },
            Payload::King { phase: 0, value: Bit::One },
            Payload::Relay { instance: NodeId(12), value: Bit::Zero },
            Payload::Decision { value: Bit::Zero },
        ];
        for p in all {
            assert_eq!(Payload::decode(&p.encode()), Some(p));
        }
        assert_eq!(Payload::Vote { phase: 1, value: Bit::One }.encode(), vec![0x10, 0, 5, 0, 0, 0, 1, 1]);
    }

    #[test]
    fn malformed_rejected() {
        assert_eq!(Payload::decode(&[0x01, 0, 1, 2]), None);
        assert_eq!(Payload::decode(&[0x10, 0, 1, 1]), None);
        assert_eq!(Payload::decode(&[0x99, 0, 1, 1]), None);
        assert_eq!(Payload::decode(&[]), None);
    }

    #[test]
    fn digests_separate_payloads() {
        let a = Payload::Relay { instance: NodeId(1), value: Bit::Zero };
        assert_ne!(a.digest(), a.with_value(Bit::One).digest());
        assert_ne!(a.digest(), Payload::Relay { instance: NodeId(2), value: Bit::Zero }.digest());
    }
}
