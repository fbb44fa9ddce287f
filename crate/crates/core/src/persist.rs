//! On-disk formats: filter-set levels (text or binary) and per-level
//! statistics records.
//!
//! Text levels are diffable golden files:
//!
//! ```text
//! n=4 k=2 count=2
//! 0:1,2:3
//! 0:1,0:2
//! ```
//!
//! The binary format is for the large levels: magic `SNF1`, then `n` (u8),
//! `k` (u16 LE), `count` (u32 LE), then `k` byte pairs `(low, high)` per
//! network, then an FNV-1a checksum (u32 LE) of all preceding bytes. Output
//! sets are never persisted; they are recomputed when a level is loaded.

use std::io::{self, BufRead, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generate::{FilterSet, GenerationStats};
use crate::network::{Comparator, ComparatorNetwork, MAX_CHANNELS};
use crate::notation;

const MAGIC: &[u8; 4] = b"SNF1";

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FileFormat {
    Text,
    Binary,
}

#[derive(Debug, Error)]
pub enum PersistError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad header line {0:?}")]
    BadHeader(String),
    #[error("expected {expected} networks, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("network {index} has {found} comparators, level requires {expected}")]
    LevelMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("file truncated")]
    Truncated,
    #[error("checksum mismatch, file is corrupt")]
    Checksum,
    #[error("channel count {0} not supported")]
    BadChannels(usize),
    #[error("invalid comparator bytes {low}:{high}")]
    BadComparator { low: u8, high: u8 },
    #[error(transparent)]
    Parse(#[from] notation::ParseError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fnv1a32(bytes: &[u8]) -> u32 {
    let mut hash = 0x811c9dc5u32;
    for &b in bytes {
        hash ^= b as u32;
        hash = hash.wrapping_mul(0x01000193);
    }
    hash
}

pub fn write_filter_set<W: Write>(
    w: &mut W,
    set: &FilterSet,
    format: FileFormat,
) -> io::Result<()> {
    match format {
        FileFormat::Text => write_text(w, set),
        FileFormat::Binary => write_binary(w, set),
    }
}

fn write_text<W: Write>(w: &mut W, set: &FilterSet) -> io::Result<()> {
    writeln!(w, "n={} k={} count={}", set.channels(), set.level(), set.len())?;
    for network in set.networks() {
        writeln!(w, "{network}")?;
    }
    Ok(())
}

fn write_binary<W: Write>(w: &mut W, set: &FilterSet) -> io::Result<()> {
    let mut buf = Vec::with_capacity(16 + set.len() * set.level() * 2);
    buf.extend_from_slice(MAGIC);
    buf.push(set.channels() as u8);
    buf.extend_from_slice(&(set.level() as u16).to_le_bytes());
    buf.extend_from_slice(&(set.len() as u32).to_le_bytes());
    for network in set.networks() {
        for c in network.comparators() {
            buf.push(c.low() as u8);
            buf.push(c.high() as u8);
        }
    }
    let checksum = fnv1a32(&buf);
    buf.extend_from_slice(&checksum.to_le_bytes());
    w.write_all(&buf)
}

/// Reads a filter set, detecting the format from the leading magic bytes.
/// Output sets and signatures are recomputed from the networks.
pub fn read_filter_set<R: Read>(r: &mut R) -> Result<FilterSet, PersistError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.starts_with(MAGIC) {
        read_binary(&bytes)
    } else {
        read_text(&bytes)
    }
}

fn read_text(bytes: &[u8]) -> Result<FilterSet, PersistError> {
    let mut lines = bytes.lines();
    let header = lines
        .next()
        .ok_or(PersistError::Truncated)??;
    let (channels, level, count) = parse_header(&header)?;
    let mut networks = Vec::with_capacity(count);
    for line in lines {
        let line = line?;
        let network = notation::parse_network(&line, channels)?;
        if network.size() != level {
            return Err(PersistError::LevelMismatch {
                index: networks.len(),
                expected: level,
                found: network.size(),
            });
        }
        networks.push(network);
    }
    if networks.len() != count {
        return Err(PersistError::CountMismatch {
            expected: count,
            found: networks.len(),
        });
    }
    Ok(FilterSet::from_networks(channels, level, networks))
}

fn parse_header(header: &str) -> Result<(usize, usize, usize), PersistError> {
    let bad = || PersistError::BadHeader(header.to_string());
    let mut channels = None;
    let mut level = None;
    let mut count = None;
    for field in header.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(bad)?;
        let value: usize = value.parse().map_err(|_| bad())?;
        match key {
            "n" => channels = Some(value),
            "k" => level = Some(value),
            "count" => count = Some(value),
            _ => return Err(bad()),
        }
    }
    match (channels, level, count) {
        (Some(n), Some(k), Some(c)) => {
            if n == 0 || n > MAX_CHANNELS {
                return Err(PersistError::BadChannels(n));
            }
            Ok((n, k, c))
        }
        _ => Err(bad()),
    }
}

fn read_binary(bytes: &[u8]) -> Result<FilterSet, PersistError> {
    if bytes.len() < MAGIC.len() + 1 + 2 + 4 + 4 {
        return Err(PersistError::Truncated);
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().expect("four checksum bytes"));
    if fnv1a32(body) != stored {
        return Err(PersistError::Checksum);
    }
    let channels = body[4] as usize;
    if channels == 0 || channels > MAX_CHANNELS {
        return Err(PersistError::BadChannels(channels));
    }
    let level = u16::from_le_bytes(body[5..7].try_into().unwrap()) as usize;
    let count = u32::from_le_bytes(body[7..11].try_into().unwrap()) as usize;
    let payload = &body[11..];
    if payload.len() != count * level * 2 {
        return Err(PersistError::CountMismatch {
            expected: count,
            found: payload.len() / (level.max(1) * 2),
        });
    }
    let mut networks = Vec::with_capacity(count);
    for chunk in payload.chunks_exact(level.max(1) * 2).take(count) {
        let mut comparators = Vec::with_capacity(level);
        for pair in chunk.chunks_exact(2) {
            let (low, high) = (pair[0], pair[1]);
            if low >= high || high as usize >= channels {
                return Err(PersistError::BadComparator { low, high });
            }
            comparators.push(Comparator::new(low as usize, high as usize));
        }
        networks.push(
            ComparatorNetwork::new(channels, comparators)
                .expect("validated comparators"),
        );
    }
    if level == 0 {
        // zero-size levels carry no payload; emit `count` empty networks
        networks = vec![ComparatorNetwork::empty(channels).expect("valid channels"); count];
    }
    Ok(FilterSet::from_networks(channels, level, networks))
}

/// One stats-file record, mirroring the per-level columns of the experiment
/// tables. Serialized as one JSON object per line.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct LevelStatsRecord {
    pub level: usize,
    pub size: usize,
    pub total_checks: u64,
    pub subsumptions_found: u64,
    pub permutations_checked: u64,
    pub precheck_rejects: PrecheckRejectsRecord,
    pub elapsed_millis: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PrecheckRejectsRecord {
    pub st1: u64,
    pub st2: u64,
    pub st3: u64,
}

impl LevelStatsRecord {
    pub fn new(set: &FilterSet, stats: &GenerationStats) -> LevelStatsRecord {
        LevelStatsRecord {
            level: set.level(),
            size: set.len(),
            total_checks: stats.total_checks,
            subsumptions_found: stats.subsumptions_found,
            permutations_checked: stats.permutations_checked,
            precheck_rejects: PrecheckRejectsRecord {
                st1: stats.precheck_rejects.st1,
                st2: stats.precheck_rejects.st2,
                st3: stats.precheck_rejects.st3,
            },
            elapsed_millis: stats.elapsed.as_millis() as u64,
        }
    }
}

pub fn write_stats_record<W: Write>(w: &mut W, record: &LevelStatsRecord) -> Result<(), PersistError> {
    serde_json::to_writer(&mut *w, record)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_stats<R: Read>(r: &mut R) -> Result<Vec<LevelStatsRecord>, PersistError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    text.lines()
        .filter(|line| !line.trim().is_empty())
        .map(|line| Ok(serde_json::from_str(line)?))
        .collect()
}
