//! Over-the-air frames and their binary codec.
//!
//! Layout: one tag byte, then a fixed payload per tag.
//!
//! | tag  | frame     | payload                         |
//! |------|-----------|---------------------------------|
//! | 0x01 | KeyPress  | 1 byte, ASCII `0-9` / `A-F`     |
//! | 0x02 | PinReset  | none                            |
//! | 0x03 | PinSubmit | none                            |
//! | 0x04 | AuthOk    | none                            |
//! | 0x05 | AuthFail  | 1 byte, remaining attempts      |
//! | 0x06 | Locked    | u32 BE, remaining milliseconds  |
//! | 0x07 | Telemetry | i16 BE, centi-degrees Celsius   |
//! | 0x08 | Ack       | 1 byte, tag of acknowledged frame |

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("unknown tag 0x{0:02X}")]
    UnknownTag(u8),
    #[error("frame with tag 0x{tag:02X} needs {expected} bytes, got {got}")]
    TruncatedFrame {
        tag: u8,
        expected: usize,
        got: usize,
    },
    #[error("empty frame")]
    Empty,
    #[error("byte 0x{0:02X} is not a PIN symbol")]
    InvalidSymbol(u8),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PinError {
    #[error("`{0}` is not a PIN symbol (expected 0-9 or A-F)")]
    InvalidSymbol(char),
    #[error("PIN must have exactly 4 symbols, got {0}")]
    WrongLength(usize),
}

/// One of the 16 keypad characters `0-9`, `A-F`, stored as its ASCII code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PinSymbol(u8);

impl PinSymbol {
    pub const ALPHABET: [u8; 16] = *b"0123456789ABCDEF";

    /// Strict: only the uppercase ASCII codes are accepted.
    pub fn from_ascii(b: u8) -> Option<Self> {
        matches!(b, b'0'..=b'9' | b'A'..=b'F').then_some(Self(b))
    }

    /// Keypad input; lowercase `a-f` is folded to uppercase.
    pub fn from_char(c: char) -> Option<Self> {
        if c.is_ascii() {
            Self::from_ascii(c.to_ascii_uppercase() as u8)
        } else {
            None
        }
    }

    /// Symbol with the given index into [`Self::ALPHABET`] (0..16).
    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALPHABET.get(i).map(|&b| Self(b))
    }

    pub fn ascii(self) -> u8 {
        self.0
    }

    pub fn as_char(self) -> char {
        self.0 as char
    }

    pub fn all() -> impl Iterator<Item = PinSymbol> {
        Self::ALPHABET.iter().map(|&b| PinSymbol(b))
    }
}

impl fmt::Display for PinSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

pub const PIN_LEN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pin([PinSymbol; PIN_LEN]);

impl Pin {
    pub fn new(symbols: [PinSymbol; PIN_LEN]) -> Self {
        Self(symbols)
    }

    pub fn symbols(&self) -> &[PinSymbol; PIN_LEN] {
        &self.0
    }

    pub fn as_bytes(&self) -> [u8; PIN_LEN] {
        self.0.map(PinSymbol::ascii)
    }
}

impl FromStr for Pin {
    type Err = PinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let symbols = s
            .chars()
            .map(|c| PinSymbol::from_char(c).ok_or(PinError::InvalidSymbol(c)))
            .collect::<Result<Vec<_>, _>>()?;
        let arr: [PinSymbol; PIN_LEN] = symbols
            .try_into()
            .map_err(|v: Vec<_>| PinError::WrongLength(v.len()))?;
        Ok(Self(arr))
    }
}

impl fmt::Display for Pin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{s}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameKind {
    KeyPress,
    PinReset,
    PinSubmit,
    AuthOk,
    AuthFail,
    Locked,
    Telemetry,
    Ack,
}

impl FrameKind {
    pub const ALL: [FrameKind; 8] = [
        FrameKind::KeyPress,
        FrameKind::PinReset,
        FrameKind::PinSubmit,
        FrameKind::AuthOk,
        FrameKind::AuthFail,
        FrameKind::Locked,
        FrameKind::Telemetry,
        FrameKind::Ack,
    ];

    pub fn tag(self) -> u8 {
        match self {
            FrameKind::KeyPress => 0x01,
            FrameKind::PinReset => 0x02,
            FrameKind::PinSubmit => 0x03,
            FrameKind::AuthOk => 0x04,
            FrameKind::AuthFail => 0x05,
            FrameKind::Locked => 0x06,
            FrameKind::Telemetry => 0x07,
            FrameKind::Ack => 0x08,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }

    /// Total encoded length including the tag byte.
    pub fn encoded_len(self) -> usize {
        match self {
            FrameKind::PinReset | FrameKind::PinSubmit | FrameKind::AuthOk => 1,
            FrameKind::KeyPress | FrameKind::AuthFail | FrameKind::Ack => 2,
            FrameKind::Telemetry => 3,
            FrameKind::Locked => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    KeyPress(PinSymbol),
    PinReset,
    PinSubmit,
    AuthOk,
    AuthFail { remaining_attempts: u8 },
    Locked { remaining_ms: u32 },
    Telemetry { temp_centi_c: i16 },
    Ack { of: FrameKind },
}

impl Frame {
    pub fn kind(&self) -> FrameKind {
        match self {
            Frame::KeyPress(_) => FrameKind::KeyPress,
            Frame::PinReset => FrameKind::PinReset,
            Frame::PinSubmit => FrameKind::PinSubmit,
            Frame::AuthOk => FrameKind::AuthOk,
            Frame::AuthFail { .. } => FrameKind::AuthFail,
            Frame::Locked { .. } => FrameKind::Locked,
            Frame::Telemetry { .. } => FrameKind::Telemetry,
            Frame::Ack { .. } => FrameKind::Ack,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        encode_frame(self)
    }

    pub fn to_hex(&self) -> String {
        self.encode().iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::KeyPress(s) => write!(f, "KeyPress({s})"),
            Frame::PinReset => write!(f, "PinReset"),
            Frame::PinSubmit => write!(f, "PinSubmit"),
            Frame::AuthOk => write!(f, "AuthOk"),
            Frame::AuthFail { remaining_attempts } => write!(f, "AuthFail({remaining_attempts})"),
            Frame::Locked { remaining_ms } => write!(f, "Locked({remaining_ms}ms)"),
            Frame::Telemetry { temp_centi_c } => write!(f, "Telemetry({temp_centi_c})"),
            Frame::Ack { of } => write!(f, "Ack({of:?})"),
        }
    }
}

pub fn encode_frame(frame: &Frame) -> Vec<u8> {
    let kind = frame.kind();
    let mut out = Vec::with_capacity(kind.encoded_len());
    out.push(kind.tag());
    match *frame {
        Frame::KeyPress(s) => out.push(s.ascii()),
        Frame::PinReset | Frame::PinSubmit | Frame::AuthOk => {}
        Frame::AuthFail { remaining_attempts } => out.push(remaining_attempts),
        Frame::Locked { remaining_ms } => out.extend_from_slice(&remaining_ms.to_be_bytes()),
        Frame::Telemetry { temp_centi_c } => out.extend_from_slice(&temp_centi_c.to_be_bytes()),
        Frame::Ack { of } => out.push(of.tag()),
    }
    debug_assert_eq!(out.len(), kind.encoded_len());
    out
}

/// Decodes exactly one frame; the whole input must be consumed.
pub fn decode_frame(bytes: &[u8]) -> Result<Frame, DecodeError> {
    let (&tag, payload) = bytes.split_first().ok_or(DecodeError::Empty)?;
    let kind = FrameKind::from_tag(tag).ok_or(DecodeError::UnknownTag(tag))?;
    if bytes.len() != kind.encoded_len() {
        return Err(DecodeError::TruncatedFrame {
            tag,
            expected: kind.encoded_len(),
            got: bytes.len(),
        });
    }
    Ok(match kind {
        FrameKind::KeyPress => Frame::KeyPress(
            PinSymbol::from_ascii(payload[0]).ok_or(DecodeError::InvalidSymbol(payload[0]))?,
        ),
        FrameKind::PinReset => Frame::PinReset,
        FrameKind::PinSubmit => Frame::PinSubmit,
        FrameKind::AuthOk => Frame::AuthOk,
        FrameKind::AuthFail => Frame::AuthFail {
            remaining_attempts: payload[0],
        },
        FrameKind::Locked => Frame::Locked {
            remaining_ms: u32::from_be_bytes(payload.try_into().expect("length checked")),
        },
        FrameKind::Telemetry => Frame::Telemetry {
            temp_centi_c: i16::from_be_bytes(payload.try_into().expect("length checked")),
        },
        FrameKind::Ack => Frame::Ack {
            of: FrameKind::from_tag(payload[0]).ok_or(DecodeError::UnknownTag(payload[0]))?,
        },
    })
}
