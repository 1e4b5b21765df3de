use serde::Serialize;

use super::message::Message;
use crate::model::NodeId;

/// Everything one node sent and received, round by round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub node: NodeId,
    pub faulty: bool,
    pub rounds: Vec<RoundRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundRecord {
    pub round: u32,
    pub sent: Vec<Message>,
    pub received: Vec<Message>,
}

impl Transcript {
    /// Canonical JSON bytes, the unit of comparison for indistinguishability checks.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcripts always serialize")
    }

    /// The view of the node: only what it received, per round.
    pub fn received_json(&self) -> String {
        let view: Vec<&Vec<Message>> = self.rounds.iter().map(|r| &r.received).collect();
        serde_json::to_string(&view).expect("transcripts always serialize")
    }
}
