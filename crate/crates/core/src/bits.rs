//! Packed bit storage shared by stochastic bitstreams and binary vectors.
//!
//! Bit `k` lives in word `k / 64` at position `k % 64`. Pad bits above `len`
//! in the last word are always zero, so word-level popcounts are exact.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PackedBits {
    words: Vec<u64>,
    len: usize,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl PackedBits {
    pub fn zeros(len: usize) -> Self {
        PackedBits {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut bits = PackedBits {
            words: vec![u64::MAX; words_for(len)],
            len,
        };
        bits.clear_padding();
        bits
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0usize;
        for b in iter {
            if len.is_multiple_of(64) {
                words.push(0);
            }
            if b {
                words[len / 64] |= 1 << (len % 64);
            }
            len += 1;
        }
        PackedBits { words, len }
    }

    /// Takes ownership of raw words; bits above `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Result<Self> {
        if words.len() != words_for(len) {
            return Err(Error::LengthMismatch {
                left: words.len(),
                right: words_for(len),
            });
        }
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Ok(PackedBits { words, len })
    }

    /// Parses a string of `'0'`/`'1'` characters (whitespace and `_` ignored).
    pub fn parse_binary(s: &str) -> Result<Self> {
        let mut out = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                '_' => {}
                c if c.is_whitespace() => {}
                c => {
                    return Err(Error::Parse(format!(
                        "unexpected character {c:?} in bit string"
                    )))
                }
            }
        }
        Ok(PackedBits::from_bools(out))
    }

    fn clear_padding(&mut self) {
        let mask = tail_mask(self.len);
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, k: usize) -> bool {
        assert!(
            k < self.len,
            "bit index {k} out of range for length {}",
            self.len
        );
        (self.words[k / 64] >> (k % 64)) & 1 == 1
    }

    pub fn set(&mut self, k: usize, value: bool) {
        assert!(
            k < self.len,
            "bit index {k} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (k % 64);
        if value {
            self.words[k / 64] |= mask;
        } else {
            self.words[k / 64] &= !mask;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |k| (self.words[k / 64] >> (k % 64)) & 1 == 1)
    }

    #[inline]
    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    fn zip_words(&self, other: &PackedBits, f: impl Fn(u64, u64) -> u64) -> Result<PackedBits> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let mut out = PackedBits {
            words,
            len: self.len,
        };
        out.clear_padding();
        Ok(out)
    }

    pub fn and(&self, other: &PackedBits) -> Result<PackedBits> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn xnor(&self, other: &PackedBits) -> Result<PackedBits> {
        self.zip_words(other, |a, b| !(a ^ b))
    }

    /// Popcount of `XNOR(self, other)` without materialising the result.
    pub fn xnor_count(&self, other: &PackedBits) -> Result<u64> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        let n = self.words.len();
        let mut total = 0u64;
        for (k, (&a, &b)) in self.words.iter().zip(&other.words).enumerate() {
            let mut w = !(a ^ b);
            if k + 1 == n {
                w &= tail_mask(self.len);
            }
            total += u64::from(w.count_ones());
        }
        Ok(total)
    }

    pub fn not(&self) -> PackedBits {
        let mut out = PackedBits {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.clear_padding();
        out
    }

    pub fn concat(&self, other: &PackedBits) -> PackedBits {
        PackedBits::from_bools(self.iter().chain(other.iter()))
    }

    /// Bits `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> PackedBits {
        assert!(start + len <= self.len, "slice out of range");
        if start.is_multiple_of(64) {
            let first = start / 64;
            let words = self.words[first..first + words_for(len)].to_vec();
            let mut out = PackedBits { words, len };
            out.clear_padding();
            return out;
        }
        PackedBits::from_bools((start..start + len).map(|k| self.get(k)))
    }

    /// Hex text with the first bit in the most significant position of the
    /// first digit; the final digit is zero-padded on the right.
    pub fn to_hex(&self) -> String {
        const DIGITS: &[u8; 16] = b"0123456789abcdef";
        let mut out = String::with_capacity(self.len.div_ceil(4));
        let mut nibble = 0u8;
        for (k, bit) in self.iter().enumerate() {
            nibble = (nibble << 1) | u8::from(bit);
            if k % 4 == 3 {
                out.push(DIGITS[nibble as usize] as char);
                nibble = 0;
            }
        }
        let rem = self.len % 4;
        if rem != 0 {
            nibble <<= 4 - rem;
            out.push(DIGITS[nibble as usize] as char);
        }
        out
    }

    /// Inverse of [`PackedBits::to_hex`]. Nonzero pad bits are rejected.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let hex = hex.trim();
        if hex.len() != len.div_ceil(4) {
            return Err(Error::Parse(format!(
                "hex field has {} digits, expected {} for {len} bits",
                hex.len(),
                len.div_ceil(4)
            )));
        }
        let mut out = PackedBits::zeros(len);
        for (d, c) in hex.chars().enumerate() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
            for b in 0..4 {
                let k = d * 4 + b;
                let bit = (v >> (3 - b)) & 1 == 1;
                if k < len {
                    out.set(k, bit);
                } else if bit {
                    return Err(Error::Parse("nonzero pad bits in hex field".into()));
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for PackedBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PackedBits({}: ", self.len)?;
        for b in self.iter().take(128) {
            f.write_str(if b { "1" } else { "0" })?;
        }
        if self.len > 128 {
            f.write_str("...")?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for PackedBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}
