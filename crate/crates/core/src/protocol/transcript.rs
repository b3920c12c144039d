//! Public classical channel between Alice and Bob. Authenticated and
//! append-only; anything written here is known to Eve.

use serde::{Deserialize, Serialize};

use crate::device::Basis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MessageKind {
    Positions,
    BasisDeclaration,
    OutcomeComparison,
    Abort,
    Proceed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Payload {
    Positions(Vec<usize>),
    Bases(Vec<Basis>),
    Outcomes(Vec<u8>),
    ErrorRate { check: String, qber: f64 },
    Reason(String),
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub sender: Party,
    pub kind: MessageKind,
    pub payload: Payload,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    messages: Vec<Message>,
}

impl Transcript {
    pub fn new() -> Transcript {
        Transcript::default()
    }

    pub fn send(&mut self, sender: Party, kind: MessageKind, payload: Payload) {
        self.messages.push(Message { sender, kind, payload });
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn last(&self) -> Option<&Message> {
        self.messages.last()
    }

    pub fn contains_kind(&self, kind: MessageKind) -> bool {
        self.messages.iter().any(|m| m.kind == kind)
    }
}
