//! Periodic puncturing masks over the systematic and two parity streams.

use crate::error::{Error, Result};

/// Periodic keep/drop pattern applied per trellis step to the
/// `(systematic, parity1, parity2)` streams. Tail symbols are never
/// punctured.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PunctureMask {
    keep_systematic: Vec<bool>,
    keep_parity1: Vec<bool>,
    keep_parity2: Vec<bool>,
}

impl PunctureMask {
    /// All three patterns must share a length and no position may drop all
    /// three streams at once.
    pub fn new(
        keep_systematic: Vec<bool>,
        keep_parity1: Vec<bool>,
        keep_parity2: Vec<bool>,
    ) -> Result<Self> {
        let period = keep_systematic.len();
        if period == 0 {
            return Err(Error::InvalidParam("puncture period must be >= 1".into()));
        }
        if keep_parity1.len() != period || keep_parity2.len() != period {
            return Err(Error::InvalidParam(
                "puncture patterns must share one period".into(),
            ));
        }
        for i in 0..period {
            if !keep_systematic[i] && !keep_parity1[i] && !keep_parity2[i] {
                return Err(Error::InvalidParam(format!(
                    "puncture position {i} removes all three streams"
                )));
            }
        }
        Ok(Self {
            keep_systematic,
            keep_parity1,
            keep_parity2,
        })
    }

    /// Unpunctured rate-1/3 mother code.
    pub fn rate_one_third() -> Self {
        Self::new(vec![true], vec![true], vec![true]).expect("valid fixed mask")
    }

    /// Keep all systematic bits, alternate the parity streams.
    pub fn rate_one_half() -> Self {
        Self::new(vec![true, true], vec![true, false], vec![false, true]).expect("valid fixed mask")
    }

    /// Keep all systematic bits, one parity per stream every four steps.
    pub fn rate_two_thirds() -> Self {
        Self::new(
            vec![true; 4],
            vec![true, false, false, false],
            vec![false, false, true, false],
        )
        .expect("valid fixed mask")
    }

    /// Keep all systematic bits; per 8 steps keep parity1 at step 0 and
    /// parity2 at step 4 (one parity per 4 information bits, alternating
    /// encoders).
    pub fn rate_four_fifths() -> Self {
        let mut p1 = vec![false; 8];
        let mut p2 = vec![false; 8];
        p1[0] = true;
        p2[4] = true;
        Self::new(vec![true; 8], p1, p2).expect("valid fixed mask")
    }

    /// Parses a rate label: `1/3`, `1/2`, `2/3`, or `4/5`.
    pub fn parse(rate: &str) -> Result<Self> {
        match rate.trim() {
            "1/3" => Ok(Self::rate_one_third()),
            "1/2" => Ok(Self::rate_one_half()),
            "2/3" => Ok(Self::rate_two_thirds()),
            "4/5" => Ok(Self::rate_four_fifths()),
            other => Err(Error::Config(format!(
                "unsupported rate {other:?} (expected 1/3, 1/2, 2/3, or 4/5)"
            ))),
        }
    }

    pub fn period(&self) -> usize {
        self.keep_systematic.len()
    }

    #[inline]
    pub fn keeps_systematic(&self, step: usize) -> bool {
        self.keep_systematic[step % self.period()]
    }

    #[inline]
    pub fn keeps_parity1(&self, step: usize) -> bool {
        self.keep_parity1[step % self.period()]
    }

    #[inline]
    pub fn keeps_parity2(&self, step: usize) -> bool {
        self.keep_parity2[step % self.period()]
    }

    /// Number of transmitted payload symbols for `k` information bits
    /// (tail excluded).
    pub fn payload_len(&self, k: usize) -> usize {
        (0..k)
            .map(|t| {
                self.keeps_systematic(t) as usize
                    + self.keeps_parity1(t) as usize
                    + self.keeps_parity2(t) as usize
            })
            .sum()
    }
}
