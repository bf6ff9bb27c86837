//! graph6 encoding, single-byte header variant only.
//!
//! Header byte `63 + n`, then the upper triangle read column by column
//! (`x(0,1), x(0,2), x(1,2), x(0,3), ...`) packed six bits per byte, most
//! significant bit first, each byte offset by 63.

use super::{Graph, GraphError};

const MAX_G6_ORDER: usize = 62;

fn err(offset: usize, message: impl Into<String>) -> GraphError {
    GraphError::Graph6 { offset, message: message.into() }
}

pub fn parse_graph6(text: &str) -> Result<Graph, GraphError> {
    let bytes = text.trim_end_matches(['\n', '\r']).as_bytes();
    let (&header, body) = bytes.split_first().ok_or_else(|| err(0, "empty input"))?;
    if header == 126 {
        return Err(err(0, "multi-byte size header (n > 62) is not supported"));
    }
    if !(63..126).contains(&header) {
        return Err(err(0, format!("invalid size byte 0x{header:02x}")));
    }
    let n = (header - 63) as usize;
    if n == 0 {
        return Err(err(0, "graph with zero vertices"));
    }
    let bits = n * (n - 1) / 2;
    let expected = bits.div_ceil(6);
    if let Some(pos) = body.iter().position(|b| !(63..=126).contains(b)) {
        return Err(err(pos + 1, format!("non-graph6 byte 0x{:02x}", body[pos])));
    }
    if body.len() < expected {
        return Err(err(bytes.len(), format!("truncated body: expected {expected} bytes, found {}", body.len())));
    }
    if body.len() > expected {
        return Err(err(1 + expected, "trailing bytes after graph body"));
    }
    let mut g = Graph::empty(n)?;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = body[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                g.add_edge(i, j);
            }
            k += 1;
        }
    }
    Ok(g)
}

pub fn emit_graph6(g: &Graph) -> Result<String, GraphError> {
    let n = g.order();
    if n > MAX_G6_ORDER {
        return Err(GraphError::Graph6Order(n));
    }
    let bits = n * (n - 1) / 2;
    let mut body = vec![0u8; bits.div_ceil(6)];
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if g.has_edge(i, j) {
                body[k / 6] |= 1 << (5 - k % 6);
            }
            k += 1;
        }
    }
    let mut out = String::with_capacity(1 + body.len());
    out.push((63 + n as u8) as char);
    out.extend(body.into_iter().map(|b| (b + 63) as char));
    Ok(out)
}
