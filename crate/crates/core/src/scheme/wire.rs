//! Framed byte encoding of shares, queries and answers, plus a loopback TCP demo.
//!
//! A frame is a 4-byte big-endian payload length followed by the payload. The
//! payload starts with a kind byte and a 4-byte big-endian element count; each
//! element is its coefficient tuple over `F_p` (lowest degree first), one
//! big-endian `u32` per coefficient.

use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;

use super::protocol::{QueryBundle, StorageShares};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, GaloisField};

const MAX_FRAME: u32 = 64 << 20;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum MessageKind {
    Store = 1,
    Query = 2,
    Answer = 3,
}

impl TryFrom<u8> for MessageKind {
    type Error = Error;

    fn try_from(b: u8) -> Result<Self> {
        match b {
            1 => Ok(MessageKind::Store),
            2 => Ok(MessageKind::Query),
            3 => Ok(MessageKind::Answer),
            _ => Err(Error::Wire(format!("unknown message kind {b}"))),
        }
    }
}

pub fn encode_payload(f: &GaloisField, kind: MessageKind, elems: &[FieldElement]) -> Vec<u8> {
    let d = f.degree() as usize;
    let mut out = Vec::with_capacity(5 + elems.len() * d * 4);
    out.push(kind as u8);
    out.extend_from_slice(&(elems.len() as u32).to_be_bytes());
    for &e in elems {
        for c in f.coeffs(e) {
            out.extend_from_slice(&c.to_be_bytes());
        }
    }
    out
}

pub fn decode_payload(f: &GaloisField, payload: &[u8]) -> Result<(MessageKind, Vec<FieldElement>)> {
    if payload.len() < 5 {
        return Err(Error::Wire("payload shorter than its header".into()));
    }
    let kind = MessageKind::try_from(payload[0])?;
    let count = u32::from_be_bytes(payload[1..5].try_into().unwrap()) as usize;
    let d = f.degree() as usize;
    let body = &payload[5..];
    if body.len() != count * d * 4 {
        return Err(Error::Wire(format!(
            "expected {} body bytes, got {}",
            count * d * 4,
            body.len()
        )));
    }
    let mut elems = Vec::with_capacity(count);
    for chunk in body.chunks_exact(d * 4) {
        let coeffs: Vec<u32> = chunk
            .chunks_exact(4)
            .map(|b| u32::from_be_bytes(b.try_into().unwrap()))
            .collect();
        elems.push(
            f.from_coeffs(&coeffs)
                .map_err(|e| Error::Wire(format!("bad coefficient tuple: {e}")))?,
        );
    }
    Ok((kind, elems))
}

pub fn write_frame<W: Write>(w: &mut W, payload: &[u8]) -> Result<()> {
    w.write_all(&(payload.len() as u32).to_be_bytes())?;
    w.write_all(payload)?;
    w.flush()?;
    Ok(())
}

pub fn read_frame<R: Read>(r: &mut R) -> Result<Vec<u8>> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let len = u32::from_be_bytes(len);
    if len > MAX_FRAME {
        return Err(Error::Wire(format!("frame of {len} bytes is too large")));
    }
    let mut buf = vec![0u8; len as usize];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn expect(f: &GaloisField, stream: &mut TcpStream, kind: MessageKind) -> Result<Vec<FieldElement>> {
    let (k, elems) = decode_payload(f, &read_frame(stream)?)?;
    if k != kind {
        return Err(Error::Wire(format!("expected {kind:?}, got {k:?}")));
    }
    Ok(elems)
}

/// One stateless server: receive STORE then QUERY, reply with ANSWER.
fn serve_once(f: &GaloisField, listener: TcpListener) -> Result<()> {
    let (mut stream, _) = listener.accept()?;
    let shares = expect(f, &mut stream, MessageKind::Store)?;
    let queries = expect(f, &mut stream, MessageKind::Query)?;
    if shares.len() != queries.len() {
        return Err(Error::Wire("share and query grids differ in size".into()));
    }
    let a = super::protocol::server_answer(f, &shares, &queries);
    write_frame(&mut stream, &encode_payload(f, MessageKind::Answer, &[a]))
}

/// Runs every server on its own loopback listener and collects the answers over TCP.
pub fn answer_over_loopback(
    f: &GaloisField,
    shares: &StorageShares,
    queries: &QueryBundle,
) -> Result<Vec<FieldElement>> {
    thread::scope(|scope| {
        let mut handles = Vec::new();
        let mut addrs = Vec::new();
        for _ in 0..shares.per_server.len() {
            let listener = TcpListener::bind("127.0.0.1:0")?;
            addrs.push(listener.local_addr()?);
            handles.push(scope.spawn(move || serve_once(f, listener)));
        }
        let mut answers = Vec::with_capacity(addrs.len());
        for (n, addr) in addrs.iter().enumerate() {
            let mut stream = TcpStream::connect(addr)?;
            write_frame(&mut stream, &encode_payload(f, MessageKind::Store, &shares.per_server[n]))?;
            write_frame(&mut stream, &encode_payload(f, MessageKind::Query, &queries.per_server[n]))?;
            let a = expect(f, &mut stream, MessageKind::Answer)?;
            answers.push(*a.first().ok_or_else(|| Error::Wire("empty answer".into()))?);
        }
        for h in handles {
            h.join().map_err(|_| Error::Internal("server thread panicked".into()))??;
        }
        Ok(answers)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payload_round_trip() {
        let f = GaloisField::new(5, 2).unwrap();
        let elems: Vec<_> = f.elements().collect();
        let p = encode_payload(&f, MessageKind::Query, &elems);
        assert_eq!(p.len(), 5 + 25 * 2 * 4);
        let (k, back) = decode_payload(&f, &p).unwrap();
        assert_eq!(k, MessageKind::Query);
        assert_eq!(back, elems);
    }

    #[test]
    fn frame_round_trip_and_errors() {
        let f = GaloisField::new(3, 2).unwrap();
        let mut buf = Vec::new();
        write_frame(&mut buf, &encode_payload(&f, MessageKind::Answer, &[FieldElement::ONE])).unwrap();
        assert_eq!(&buf[..4], &13u32.to_be_bytes());
        let payload = read_frame(&mut buf.as_slice()).unwrap();
        assert_eq!(decode_payload(&f, &payload).unwrap().1, vec![FieldElement::ONE]);
        assert!(decode_payload(&f, &[9, 0, 0, 0, 0]).is_err());
        assert!(decode_payload(&f, &payload[..7]).is_err());
        let mut bad = payload.clone();
        bad[8] = 7; // coefficient 7 is not a residue mod 3
        assert!(decode_payload(&f, &bad).is_err());
    }
}
