//! Newline-delimited JSON messages exchanged between verifier and prover.

use std::fmt;
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::bitlin::{BitMatrix, BitVector};
use crate::error::Error;
use crate::model::{Angle, IqpProgram};

/// Largest accepted message, newline included.
pub const MAX_MESSAGE_BYTES: usize = 64 * 1024 * 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCode {
    BadJson,
    BadRow,
    BadAngle,
    BadDimension,
    BadCount,
    Capacity,
    TooLarge,
    UnexpectedMessage,
    SessionMismatch,
    Unsupported,
}

impl ErrorCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorCode::BadJson => "bad-json",
            ErrorCode::BadRow => "bad-row",
            ErrorCode::BadAngle => "bad-angle",
            ErrorCode::BadDimension => "bad-dimension",
            ErrorCode::BadCount => "bad-count",
            ErrorCode::Capacity => "capacity",
            ErrorCode::TooLarge => "too-large",
            ErrorCode::UnexpectedMessage => "unexpected-message",
            ErrorCode::SessionMismatch => "session-mismatch",
            ErrorCode::Unsupported => "unsupported",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A protocol-level failure that can be reported to the peer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireError {
    pub code: ErrorCode,
    pub detail: String,
}

impl WireError {
    pub fn new(code: ErrorCode, detail: impl Into<String>) -> Self {
        Self { code, detail: detail.into() }
    }

    pub fn to_message(&self) -> WireMessage {
        WireMessage::Error(ErrorMsg { code: self.code.as_str().to_string(), detail: self.detail.clone() })
    }
}

impl From<WireError> for Error {
    fn from(e: WireError) -> Self {
        Error::Protocol { code: e.code.as_str().to_string(), detail: e.detail }
    }
}

/// The circuit description sent to the prover. Carries no secret material.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChallengeMsg {
    pub session: String,
    pub n: usize,
    pub rows: Vec<String>,
    pub angles: Vec<(i64, i64)>,
    pub t: u64,
}

/// The prover's output strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplesMsg {
    pub session: String,
    pub bits: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorMsg {
    pub code: String,
    pub detail: String,
}

/// Sent only when the verifier opts into revealing its judgment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictMsg {
    pub session: String,
    pub accept: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum WireMessage {
    Challenge(ChallengeMsg),
    Samples(SamplesMsg),
    Error(ErrorMsg),
    Verdict(VerdictMsg),
}

impl ChallengeMsg {
    pub fn from_program(session: impl Into<String>, program: &IqpProgram, t: u64) -> Self {
        Self {
            session: session.into(),
            n: program.n(),
            rows: program.chi().rows().iter().map(|r| r.to_string()).collect(),
            angles: program.angles().iter().map(|a| (a.num(), a.den())).collect(),
            t,
        }
    }

    /// Validates the message and rebuilds the program.
    pub fn to_program(&self) -> Result<IqpProgram, WireError> {
        if self.n == 0 {
            return Err(WireError::new(ErrorCode::BadDimension, "n must be at least 1"));
        }
        if self.t == 0 {
            return Err(WireError::new(ErrorCode::BadCount, "t must be at least 1"));
        }
        if self.rows.len() != self.angles.len() {
            return Err(WireError::new(
                ErrorCode::BadDimension,
                format!("{} rows but {} angles", self.rows.len(), self.angles.len()),
            ));
        }
        let mut rows = Vec::with_capacity(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            let bits: BitVector = r
                .parse()
                .map_err(|_| WireError::new(ErrorCode::BadRow, format!("row {i}: {r:?} is not a bitstring")))?;
            if bits.len() != self.n {
                return Err(WireError::new(
                    ErrorCode::BadRow,
                    format!("row {i}: length {} but n = {}", bits.len(), self.n),
                ));
            }
            if bits.is_zero() {
                return Err(WireError::new(ErrorCode::BadRow, format!("row {i} is all zero")));
            }
            rows.push(bits);
        }
        let angles = self
            .angles
            .iter()
            .enumerate()
            .map(|(i, &(num, den))| {
                Angle::new(num, den).map_err(|e| WireError::new(ErrorCode::BadAngle, format!("angle {i}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let chi = BitMatrix::from_rows(self.n, rows)
            .map_err(|e| WireError::new(ErrorCode::BadDimension, e.to_string()))?;
        IqpProgram::new(chi, angles).map_err(|e| WireError::new(ErrorCode::BadRow, e.to_string()))
    }
}

impl SamplesMsg {
    pub fn from_bits(session: impl Into<String>, bits: &[BitVector]) -> Self {
        Self { session: session.into(), bits: bits.iter().map(|b| b.to_string()).collect() }
    }

    /// Checks the reply against its challenge and decodes the strings.
    pub fn to_bits(&self, challenge: &ChallengeMsg) -> Result<Vec<BitVector>, WireError> {
        if self.session != challenge.session {
            return Err(WireError::new(
                ErrorCode::SessionMismatch,
                format!("reply for session {:?}, expected {:?}", self.session, challenge.session),
            ));
        }
        if self.bits.len() as u64 != challenge.t {
            return Err(WireError::new(
                ErrorCode::BadCount,
                format!("{} samples returned, {} requested", self.bits.len(), challenge.t),
            ));
        }
        self.bits
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let v: BitVector = b
                    .parse()
                    .map_err(|_| WireError::new(ErrorCode::BadRow, format!("sample {i}: {b:?} is not a bitstring")))?;
                if v.len() != challenge.n {
                    return Err(WireError::new(
                        ErrorCode::BadDimension,
                        format!("sample {i}: length {} but n = {}", v.len(), challenge.n),
                    ));
                }
                Ok(v)
            })
            .collect()
    }
}

/// One JSON object followed by `\n`.
pub fn encode(msg: &WireMessage) -> String {
    let mut line = serde_json::to_string(msg).expect("wire messages always serialize");
    line.push('\n');
    line
}

pub fn decode(line: &str) -> Result<WireMessage, WireError> {
    serde_json::from_str(line.trim_end()).map_err(|e| WireError::new(ErrorCode::BadJson, e.to_string()))
}

/// Reads one message. `Ok(None)` on clean end of stream.
pub fn read_message<R: BufRead>(reader: &mut R, max_bytes: usize) -> Result<Option<WireMessage>, Error> {
    let mut buf = Vec::new();
    let read = Read::take(reader.by_ref(), max_bytes as u64 + 1).read_until(b'\n', &mut buf)?;
    if read == 0 {
        return Ok(None);
    }
    if buf.len() > max_bytes {
        return Err(WireError::new(ErrorCode::TooLarge, format!("message exceeds {max_bytes} bytes")).into());
    }
    let text = std::str::from_utf8(&buf).map_err(|e| WireError::new(ErrorCode::BadJson, e.to_string()))?;
    Ok(Some(decode(text)?))
}

pub fn write_message<W: Write>(writer: &mut W, msg: &WireMessage) -> Result<(), Error> {
    writer.write_all(encode(msg).as_bytes())?;
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn challenge_matches_documented_shape() {
        let p = IqpProgram::from_strs(4, &["1100", "0101"], Angle::pi_over_8(1)).unwrap();
        let msg = WireMessage::Challenge(ChallengeMsg::from_program("abc", &p, 1000));
        assert_eq!(
            encode(&msg),
            "{\"type\":\"challenge\",\"session\":\"abc\",\"n\":4,\"rows\":[\"1100\",\"0101\"],\"angles\":[[1,8],[1,8]],\"t\":1000}\n"
        );
        assert_eq!(decode(&encode(&msg)).unwrap(), msg);
    }

    #[test]
    fn bad_rows_are_typed() {
        let mut c = ChallengeMsg::from_program(
            "s",
            &IqpProgram::from_strs(4, &["1100"], Angle::pi_over_8(1)).unwrap(),
            10,
        );
        c.rows[0] = "11a0".into();
        assert_eq!(c.to_program().unwrap_err().code, ErrorCode::BadRow);
        c.rows[0] = "0000".into();
        assert_eq!(c.to_program().unwrap_err().code, ErrorCode::BadRow);
        c.rows[0] = "1100".into();
        c.angles[0] = (1, 0);
        assert_eq!(c.to_program().unwrap_err().code, ErrorCode::BadAngle);
        c.angles.clear();
        assert_eq!(c.to_program().unwrap_err().code, ErrorCode::BadDimension);
    }

    #[test]
    fn sample_count_checked() {
        let p = IqpProgram::from_strs(2, &["10"], Angle::pi_over_8(1)).unwrap();
        let c = ChallengeMsg::from_program("s", &p, 3);
        let ok = SamplesMsg { session: "s".into(), bits: vec!["00".into(), "10".into(), "11".into()] };
        assert_eq!(ok.to_bits(&c).unwrap().len(), 3);
        let short = SamplesMsg { session: "s".into(), bits: vec!["00".into()] };
        assert_eq!(short.to_bits(&c).unwrap_err().code, ErrorCode::BadCount);
        let wrong = SamplesMsg { session: "x".into(), bits: ok.bits.clone() };
        assert_eq!(wrong.to_bits(&c).unwrap_err().code, ErrorCode::SessionMismatch);
    }

    #[test]
    fn oversized_message_rejected() {
        let line = format!("{}\n", "x".repeat(100));
        let mut r = std::io::Cursor::new(line.into_bytes());
        let err = read_message(&mut r, 50).unwrap_err();
        assert!(matches!(err, Error::Protocol { ref code, .. } if code == "too-large"));
    }

    #[test]
    fn garbage_is_bad_json() {
        assert_eq!(decode("{\"type\":\"nope\"}").unwrap_err().code, ErrorCode::BadJson);
        assert_eq!(decode("not json").unwrap_err().code, ErrorCode::BadJson);
    }
}
