//! Line-delimited JSON event trace.
//!
//! Field order is fixed: `t_ns, kind, uav, pkt, x, y, z, detail`. Absent
//! values are written as `null`; `detail` is a JSON string, so quotes,
//! backslashes and control characters use standard JSON escapes.

use serde::Serialize;

use crate::geometry::Vector3;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Pos,
    PktGen,
    MacTx,
    MacRx,
    Ack,
    Drop,
    Deliver,
    Energy,
    Conn,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t_ns: u64,
    pub kind: TraceKind,
    pub uav: Option<u32>,
    pub pkt: Option<u64>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub z: Option<f64>,
    pub detail: String,
}

/// Buffers records in memory; the owner decides where the bytes go.
#[derive(Debug, Default)]
pub struct TraceWriter {
    buf: Vec<u8>,
    records: u64,
}

impl TraceWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn emit(&mut self, t: SimTime, kind: TraceKind, uav: Option<u32>, pkt: Option<u64>, pos: Option<Vector3>, detail: String) {
        let rec = TraceRecord {
            t_ns: t.as_nanos(),
            kind,
            uav,
            pkt,
            x: pos.map(|p| p.x),
            y: pos.map(|p| p.y),
            z: pos.map(|p| p.z),
            detail,
        };
        serde_json::to_writer(&mut self.buf, &rec).expect("in-memory write");
        self.buf.push(b'\n');
        self.records += 1;
    }

    pub fn len(&self) -> u64 {
        self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records == 0
    }

    pub fn bytes(&self) -> &[u8] {
        &self.buf
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_order_and_escaping() {
        let mut w = TraceWriter::new();
        w.emit(SimTime::from_micros(5), TraceKind::MacTx, Some(3), None, Some(Vector3::new(1.0, 2.5, 0.0)), "a\"b".into());
        let line = String::from_utf8(w.into_bytes()).unwrap();
        assert_eq!(
            line,
            "{\"t_ns\":5000,\"kind\":\"mac_tx\",\"uav\":3,\"pkt\":null,\"x\":1.0,\"y\":2.5,\"z\":0.0,\"detail\":\"a\\\"b\"}\n"
        );
    }
}
