//! graph6 encoding for graphs of up to [`CAP`](crate::graph::CAP) vertices.
//!
//! One header byte `n + 63`, then the upper triangle in column order
//! `(0,1), (0,2), (1,2), (0,3), ...` packed six bits per byte, each byte
//! offset by 63. Trailing bits of the last byte are zero.

use crate::error::Graph6Error;
use crate::graph::{Graph, CAP};

fn body_len(n: usize) -> usize {
    (n * n.saturating_sub(1) / 2).div_ceil(6)
}

pub fn encode(g: &Graph) -> String {
    let n = g.n();
    let mut out = Vec::with_capacity(1 + body_len(n));
    out.push(n as u8 + 63);
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = acc << 1 | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    // All bytes are in 63..=126.
    String::from_utf8(out).expect("graph6 output is ASCII")
}

pub fn decode(text: &str) -> Result<Graph, Graph6Error> {
    let bytes = text.trim_end_matches(['\n', '\r']).as_bytes();
    let (&head, body) = bytes.split_first().ok_or(Graph6Error::Empty)?;
    if !(63..=126).contains(&head) {
        return Err(Graph6Error::InvalidByte(head));
    }
    let n = (head - 63) as usize;
    if n > CAP {
        return Err(Graph6Error::TooLarge(n));
    }
    let expected = body_len(n);
    if body.len() != expected {
        return Err(Graph6Error::Length {
            expected,
            found: body.len(),
        });
    }
    let mut g = Graph::empty(n);
    let mut bit = 0;
    let total = n * n.saturating_sub(1) / 2;
    for j in 1..n {
        for i in 0..j {
            let byte = body[bit / 6];
            if !(63..=126).contains(&byte) {
                return Err(Graph6Error::InvalidByte(byte));
            }
            if (byte - 63) >> (5 - bit % 6) & 1 == 1 {
                g.insert_edge(i, j);
            }
            bit += 1;
        }
    }
    if let Some(&last) = body.last() {
        if !(63..=126).contains(&last) {
            return Err(Graph6Error::InvalidByte(last));
        }
        let spare = expected * 6 - total;
        if (last - 63) & ((1u8 << spare) - 1) != 0 {
            return Err(Graph6Error::Padding);
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_encodings() {
        assert_eq!(encode(&Graph::cycle(3)), "Bw");
        assert_eq!(encode(&Graph::cycle(4)), "Cl");
        assert_eq!(encode(&Graph::complete(4)), "C~");
        assert_eq!(encode(&Graph::empty(0)), "?");
        assert_eq!(encode(&Graph::empty(1)), "@");
    }

    #[test]
    fn decode_known() {
        assert_eq!(decode("Cl").unwrap(), Graph::cycle(4));
        assert_eq!(decode("C~\n").unwrap(), Graph::complete(4));
    }

    #[test]
    fn decode_rejects_bad_input() {
        assert_eq!(decode(""), Err(Graph6Error::Empty));
        assert_eq!(decode("C"), Err(Graph6Error::Length { expected: 1, found: 0 }));
        assert_eq!(decode("Q?????????????????????"), Err(Graph6Error::TooLarge(18)));
        assert_eq!(decode("C\x7f"), Err(Graph6Error::InvalidByte(0x7f)));
        // Four vertices use six bits exactly; three vertices leave three spare bits.
        assert_eq!(decode("B~"), Err(Graph6Error::Padding));
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (0usize..=CAP).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(move |bits| {
                let mut g = Graph::empty(n);
                let mut k = 0;
                for j in 1..n {
                    for i in 0..j {
                        if bits[k] {
                            g.insert_edge(i, j);
                        }
                        k += 1;
                    }
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip(g in arb_graph()) {
            prop_assert_eq!(decode(&encode(&g)).unwrap(), g);
        }
    }
}
