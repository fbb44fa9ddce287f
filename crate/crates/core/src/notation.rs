//! Text notation for comparator networks: comma-separated `low:high` pairs
//! with 0-based channels, e.g. `0:1,2:3,1:3,0:2,1:2`.

use std::fmt;

use thiserror::Error;

use crate::network::{Comparator, ComparatorNetwork, NetworkError, MAX_CHANNELS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed comparator {0:?}, expected low:high")]
    Malformed(String),
    #[error("generalized comparator {low}:{high} rejected, channels must satisfy low < high")]
    Generalized { low: usize, high: usize },
    #[error("channel {channel} out of range for {channels} channels")]
    ChannelOutOfRange { channel: usize, channels: usize },
    #[error("cannot infer the channel count of an empty network, pass it explicitly")]
    EmptyNetwork,
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Parses the notation into `(low, high)` pairs without binding a channel
/// count. An empty (or all-whitespace) string is the empty network.
pub fn parse_comparators(text: &str) -> Result<Vec<(usize, usize)>, ParseError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    let mut pairs = Vec::new();
    for token in trimmed.split(',') {
        let token = token.trim();
        let (low, high) = token
            .split_once(':')
            .ok_or_else(|| ParseError::Malformed(token.to_string()))?;
        let low: usize = low
            .trim()
            .parse()
            .map_err(|_| ParseError::Malformed(token.to_string()))?;
        let high: usize = high
            .trim()
            .parse()
            .map_err(|_| ParseError::Malformed(token.to_string()))?;
        if low >= high {
            return Err(ParseError::Generalized { low, high });
        }
        pairs.push((low, high));
    }
    Ok(pairs)
}

/// Smallest channel count fitting the notation (largest channel + 1).
/// The empty network carries no channel information and is rejected.
pub fn infer_channels(text: &str) -> Result<usize, ParseError> {
    let pairs = parse_comparators(text)?;
    pairs
        .iter()
        .map(|&(_, high)| high + 1)
        .max()
        .ok_or(ParseError::EmptyNetwork)
}

/// Parses a network against a fixed channel count.
pub fn parse_network(text: &str, channels: usize) -> Result<ComparatorNetwork, ParseError> {
    let pairs = parse_comparators(text)?;
    for &(_, high) in &pairs {
        if high >= channels && channels <= MAX_CHANNELS {
            return Err(ParseError::ChannelOutOfRange {
                channel: high,
                channels,
            });
        }
    }
    let comparators = pairs
        .into_iter()
        .map(|(low, high)| Comparator::new(low, high))
        .collect();
    Ok(ComparatorNetwork::new(channels, comparators)?)
}

/// Renders a network back into the notation; the empty network renders as an
/// empty string.
pub fn render_network(network: &ComparatorNetwork) -> String {
    network.to_string()
}

impl fmt::Display for ComparatorNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.comparators().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}:{}", c.low(), c.high())?;
        }
        Ok(())
    }
}
