//! Ordered log of every transmission, announcement, check and verdict of a
//! run, serialized as one JSON object per line.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Step {
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Qsend,
    Announce,
    Check,
    Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub step: Step,
    pub from: String,
    pub to: String,
    pub kind: EventKind,
    pub payload: Value,
    /// Position in the run, starting at 0.
    pub t: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(
        &mut self,
        step: Step,
        from: impl ToString,
        to: impl ToString,
        kind: EventKind,
        payload: Value,
    ) {
        let t = self.events.len();
        debug_assert!(
            self.events.last().is_none_or(|e| e.step <= step),
            "events must follow protocol order"
        );
        self.events.push(Event {
            step,
            from: from.to_string(),
            to: to.to_string(),
            kind,
            payload,
            t,
        });
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let events = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<Vec<Event>, _>>()?;
        Ok(Transcript { events })
    }

    pub fn of_kind(&self, step: Step, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events
            .iter()
            .filter(move |e| e.step == step && e.kind == kind)
    }

    /// Sum of an unsigned payload field over matching events.
    pub fn sum_field(&self, step: Step, kind: EventKind, field: &str) -> u64 {
        self.of_kind(step, kind)
            .filter_map(|e| e.payload.get(field).and_then(Value::as_u64))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn jsonl_round_trip_and_field_order() {
        let mut t = Transcript::new();
        t.record(
            Step::S2,
            "Alice",
            "Bob",
            EventKind::Qsend,
            json!({"qubits": 6}),
        );
        t.record(
            Step::S3,
            "Alice",
            "Bob",
            EventKind::Check,
            json!({"pass": true}),
        );
        let text = t.to_jsonl();
        assert!(text.starts_with(r#"{"step":"S2","from":"Alice","to":"Bob","kind":"qsend""#));
        assert_eq!(Transcript::from_jsonl(&text).unwrap(), t);
        assert_eq!(t.sum_field(Step::S2, EventKind::Qsend, "qubits"), 6);
        assert_eq!(t.events[1].t, 1);
    }
}
