//! Particle configurations on the discrete torus.
//!
//! [`ExclusionConfig`] is a bit-packed occupancy ring; all local operations
//! read at most four consecutive bits. [`ZeroRangeConfig`] is the ring of
//! particle counts produced by the gap mapping.
//!
//! Both serialize to a compact text form (`'0'`/`'1'` string, resp.
//! comma-separated counts) and a length-prefixed binary form used in run
//! manifests.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("configuration must contain at least one site")]
    Empty,
    #[error("invalid character {0:?} in configuration text")]
    BadChar(char),
    #[error("invalid count entry: {0}")]
    BadCount(String),
    #[error("binary payload truncated or malformed")]
    BadBinary,
}

/// Occupancy configuration on the torus `Z/NZ`, one bit per site.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExclusionConfig {
    n: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for ExclusionConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ExclusionConfig({})", self.to_text())
    }
}

impl ExclusionConfig {
    pub fn empty(n: usize) -> Self {
        assert!(n > 0, "torus size must be positive");
        ExclusionConfig { n, words: vec![0; n.div_ceil(64)] }
    }

    pub fn filled(n: usize) -> Self {
        let mut cfg = Self::empty(n);
        for x in 0..n {
            cfg.set(x, true);
        }
        cfg
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self, ConfigError> {
        if bits.is_empty() {
            return Err(ConfigError::Empty);
        }
        let mut cfg = Self::empty(bits.len());
        for (x, &b) in bits.iter().enumerate() {
            cfg.set(x, b);
        }
        Ok(cfg)
    }

    /// Parse from a `'0'`/`'1'` string, site 0 first.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        if text.is_empty() {
            return Err(ConfigError::Empty);
        }
        let mut bits = Vec::with_capacity(text.len());
        for c in text.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => return Err(ConfigError::BadChar(other)),
            }
        }
        Self::from_bools(&bits)
    }

    pub fn to_text(&self) -> String {
        (0..self.n).map(|x| if self.get(x) { '1' } else { '0' }).collect()
    }

    /// Length-prefixed bit-packed payload: `u64` site count (LE), then
    /// `ceil(n/8)` bytes, site `8j + i` in bit `i` of byte `j`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + self.n.div_ceil(8));
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        let mut byte = 0u8;
        for x in 0..self.n {
            if self.get(x) {
                byte |= 1 << (x % 8);
            }
            if x % 8 == 7 || x == self.n - 1 {
                out.push(byte);
                byte = 0;
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ConfigError> {
        if bytes.len() < 8 {
            return Err(ConfigError::BadBinary);
        }
        let n = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
        if n == 0 || bytes.len() != 8 + n.div_ceil(8) {
            return Err(ConfigError::BadBinary);
        }
        let mut cfg = Self::empty(n);
        for x in 0..n {
            if bytes[8 + x / 8] >> (x % 8) & 1 == 1 {
                cfg.set(x, true);
            }
        }
        Ok(cfg)
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    /// Occupancy of site `x` (callers pass reduced indices).
    #[inline]
    pub fn get(&self, x: usize) -> bool {
        debug_assert!(x < self.n);
        self.words[x >> 6] >> (x & 63) & 1 == 1
    }

    #[inline]
    pub fn occ(&self, x: usize) -> u8 {
        self.get(x) as u8
    }

    #[inline]
    pub fn set(&mut self, x: usize, v: bool) {
        debug_assert!(x < self.n);
        let (w, b) = (x >> 6, x & 63);
        if v {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    /// Swap the occupancies of two sites.
    #[inline]
    pub fn swap(&mut self, x: usize, y: usize) {
        let (a, b) = (self.get(x), self.get(y));
        self.set(x, b);
        self.set(y, a);
    }

    #[inline]
    pub fn succ(&self, x: usize) -> usize {
        if x + 1 == self.n {
            0
        } else {
            x + 1
        }
    }

    #[inline]
    pub fn pred(&self, x: usize) -> usize {
        if x == 0 {
            self.n - 1
        } else {
            x - 1
        }
    }

    pub fn particle_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn empty_count(&self) -> usize {
        self.n - self.particle_count()
    }

    /// Positions of all empty sites, ascending.
    pub fn zero_positions(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| !self.get(x)).collect()
    }
}

/// Zero-range configuration: particle counts on the torus `Z/KZ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZeroRangeConfig {
    counts: Vec<u32>,
}

impl std::fmt::Debug for ZeroRangeConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ZeroRangeConfig({})", self.to_text())
    }
}

impl ZeroRangeConfig {
    pub fn from_counts(counts: Vec<u32>) -> Result<Self, ConfigError> {
        if counts.is_empty() {
            return Err(ConfigError::Empty);
        }
        Ok(ZeroRangeConfig { counts })
    }

    pub fn constant(k: usize, value: u32) -> Self {
        assert!(k > 0);
        ZeroRangeConfig { counts: vec![value; k] }
    }

    /// Parse comma-separated counts, e.g. `"2,1,3,0"`.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        if text.is_empty() {
            return Err(ConfigError::Empty);
        }
        let counts = text
            .split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| ConfigError::BadCount(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_counts(counts)
    }

    pub fn to_text(&self) -> String {
        self.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    }

    /// `u64` site count (LE) followed by `u32` counts (LE).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 4 * self.counts.len());
        out.extend_from_slice(&(self.counts.len() as u64).to_le_bytes());
        for c in &self.counts {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ConfigError> {
        if bytes.len() < 8 {
            return Err(ConfigError::BadBinary);
        }
        let k = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
        if k == 0 || bytes.len() != 8 + 4 * k {
            return Err(ConfigError::BadBinary);
        }
        let counts = (0..k)
            .map(|i| u32::from_le_bytes(bytes[8 + 4 * i..12 + 4 * i].try_into().unwrap()))
            .collect();
        Ok(ZeroRangeConfig { counts })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.counts.len()
    }

    #[inline]
    pub fn get(&self, x: usize) -> u32 {
        self.counts[x]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total_mass(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn max_count(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Sitewise partial order.
    pub fn le(&self, other: &Self) -> bool {
        self.size() == other.size() && self.counts.iter().zip(&other.counts).all(|(a, b)| a <= b)
    }
}
