use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum IdError {
    #[error("node id must be 33 bytes of hex, got {0} characters")]
    NodeIdLength(usize),
    #[error("invalid hex: {0}")]
    Hex(#[from] hex::FromHexError),
    #[error("short channel id component out of range: {0}")]
    ScidRange(&'static str),
    #[error("invalid short channel id: {0}")]
    ScidSyntax(String),
}

/// A 33-byte compressed public key identifying a node.
///
/// Ordering is lexicographic on the raw bytes, which is the BOLT#7 ordering
/// of `node_id_1` / `node_id_2`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub [u8; 33]);

impl NodeId {
    pub const LEN: usize = 33;

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        <[u8; 33]>::try_from(bytes).ok().map(NodeId)
    }

    /// Deterministic placeholder key for index `i`; ordering follows `i`.
    pub fn synthetic(i: u64) -> Self {
        let mut b = [0u8; 33];
        b[0] = 0x02;
        b[25..].copy_from_slice(&i.to_be_bytes());
        NodeId(b)
    }

    pub fn as_bytes(&self) -> &[u8; 33] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeId({})", self.to_hex())
    }
}

impl FromStr for NodeId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != 2 * Self::LEN {
            return Err(IdError::NodeIdLength(s.len()));
        }
        let mut b = [0u8; 33];
        hex::decode_to_slice(s, &mut b)?;
        Ok(NodeId(b))
    }
}

/// Channel identifier: funding block height (24 bits), transaction index
/// within the block (24 bits) and output index (16 bits).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShortChannelId {
    block_height: u32,
    tx_index: u32,
    output_index: u16,
}

impl ShortChannelId {
    const MAX_24: u32 = (1 << 24) - 1;

    pub fn new(block_height: u32, tx_index: u32, output_index: u16) -> Result<Self, IdError> {
        if block_height > Self::MAX_24 {
            return Err(IdError::ScidRange("block_height"));
        }
        if tx_index > Self::MAX_24 {
            return Err(IdError::ScidRange("tx_index"));
        }
        Ok(ShortChannelId {
            block_height,
            tx_index,
            output_index,
        })
    }

    pub fn from_u64(packed: u64) -> Self {
        ShortChannelId {
            block_height: (packed >> 40) as u32,
            tx_index: ((packed >> 16) & 0xFF_FFFF) as u32,
            output_index: (packed & 0xFFFF) as u16,
        }
    }

    pub fn to_u64(self) -> u64 {
        (u64::from(self.block_height) << 40)
            | (u64::from(self.tx_index) << 16)
            | u64::from(self.output_index)
    }

    pub fn block_height(&self) -> u32 {
        self.block_height
    }

    pub fn tx_index(&self) -> u32 {
        self.tx_index
    }

    pub fn output_index(&self) -> u16 {
        self.output_index
    }
}

impl fmt::Display for ShortChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.block_height, self.tx_index, self.output_index)
    }
}

/// Accepts both the packed decimal form and `BLOCKxTXxOUT`.
impl FromStr for ShortChannelId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Ok(packed) = s.parse::<u64>() {
            return Ok(Self::from_u64(packed));
        }
        let parts: Vec<&str> = s.split('x').collect();
        if parts.len() != 3 {
            return Err(IdError::ScidSyntax(s.to_string()));
        }
        let bad = || IdError::ScidSyntax(s.to_string());
        Self::new(
            parts[0].parse().map_err(|_| bad())?,
            parts[1].parse().map_err(|_| bad())?,
            parts[2].parse().map_err(|_| bad())?,
        )
    }
}
