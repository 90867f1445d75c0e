//! Cyclic edge paths under iteration, stored as a cycle of legal blocks.
//!
//! A legal block maps to a legal block under the train track map, so only
//! the ends of a long block can ever cancel. Long blocks keep a window of
//! letters at each end plus the exact per-generator letter counts of the
//! hidden middle; the metric length stays exact while the stored data stays
//! bounded.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::{turn_between, TrainTrackMap};
use crate::class::ConjClass;
use crate::error::{Error, Result};
use crate::word::Letter;

/// Letters kept at each end of a compressed block.
pub const WINDOW: usize = 48;
const COMPRESS_AT: usize = 4 * WINDOW;

#[derive(Clone, Debug)]
struct Block {
    /// All letters of an explicit block, or the known prefix otherwise.
    head: VecDeque<Letter>,
    /// Known suffix of a compressed block; empty for explicit blocks.
    tail: VecDeque<Letter>,
    counts: Vec<u128>,
    len: u128,
    compressed: bool,
}

impl Block {
    fn explicit(rank: usize, letters: impl IntoIterator<Item = Letter>) -> Self {
        let head: VecDeque<Letter> = letters.into_iter().collect();
        let mut counts = alloc::vec![0u128; rank];
        for l in &head {
            counts[l.generator()] += 1;
        }
        Block { len: head.len() as u128, head, tail: VecDeque::new(), counts, compressed: false }
    }

    fn hidden(&self) -> u128 {
        self.len - self.head.len() as u128 - self.tail.len() as u128
    }

    fn first(&self) -> Letter {
        if self.head.is_empty() {
            self.tail[0]
        } else {
            self.head[0]
        }
    }

    fn last(&self) -> Letter {
        match self.tail.back() {
            Some(&l) => l,
            None => *self.head.back().expect("nonempty block"),
        }
    }

    fn decompress_if_exposed(&mut self) {
        if self.compressed && self.hidden() == 0 {
            let tail = core::mem::take(&mut self.tail);
            self.head.extend(tail);
            self.compressed = false;
        }
    }

    fn pop_front(&mut self) -> Result<()> {
        self.decompress_if_exposed();
        let l = self.head.pop_front().ok_or_else(exhausted)?;
        self.counts[l.generator()] -= 1;
        self.len -= 1;
        self.check_windows()
    }

    fn pop_back(&mut self) -> Result<()> {
        self.decompress_if_exposed();
        let l = if self.compressed { self.tail.pop_back() } else { self.head.pop_back() };
        let l = l.ok_or_else(exhausted)?;
        self.counts[l.generator()] -= 1;
        self.len -= 1;
        self.check_windows()
    }

    fn check_windows(&mut self) -> Result<()> {
        self.decompress_if_exposed();
        if self.compressed && (self.head.is_empty() || self.tail.is_empty()) {
            return Err(exhausted());
        }
        Ok(())
    }

    fn maybe_compress(&mut self) {
        if !self.compressed && self.head.len() > COMPRESS_AT {
            let n = self.head.len();
            self.tail = self.head.drain(n - WINDOW..).collect();
            self.head.truncate(WINDOW);
            self.compressed = true;
        }
    }

    fn map(&self, tt: &TrainTrackMap) -> Block {
        let rank = self.counts.len();
        if !self.compressed {
            let letters = self.head.iter().flat_map(|&l| tt.letter_image(l).iter().copied());
            let mut b = Block::explicit(rank, letters);
            b.maybe_compress();
            return b;
        }
        let head: VecDeque<Letter> =
            self.head.iter().flat_map(|&l| tt.letter_image(l).iter().copied()).take(WINDOW).collect();
        let mut tail: Vec<Letter> = Vec::with_capacity(WINDOW);
        'outer: for &l in self.tail.iter().rev() {
            for &x in tt.letter_image(l).iter().rev() {
                if tail.len() == WINDOW {
                    break 'outer;
                }
                tail.push(x);
            }
        }
        tail.reverse();
        let m = tt.matrix();
        let counts: Vec<u128> = (0..rank)
            .map(|i| (0..rank).map(|j| m.get(i, j) as u128 * self.counts[j]).sum())
            .collect();
        let len = counts.iter().sum();
        let mut b = Block { head, tail: tail.into(), counts, len, compressed: true };
        b.decompress_if_exposed();
        b
    }

    /// Concatenation with `next`, for a legal junction.
    fn append(&mut self, next: Block) {
        for (c, d) in self.counts.iter_mut().zip(&next.counts) {
            *c += d;
        }
        self.len += next.len;
        match (self.compressed, next.compressed) {
            (false, false) => {
                self.head.extend(next.head);
                self.maybe_compress();
            }
            (true, false) => {
                self.tail.extend(next.head);
                let excess = self.tail.len().saturating_sub(WINDOW);
                self.tail.drain(..excess);
            }
            (false, true) => {
                let mut head = core::mem::take(&mut self.head);
                head.extend(next.head);
                head.truncate(WINDOW);
                self.head = head;
                self.tail = next.tail;
                self.compressed = true;
            }
            (true, true) => {
                self.tail = next.tail;
            }
        }
    }
}

fn exhausted() -> Error {
    Error::degenerate("cancellation reached past the stored window of a legal block")
}

/// A nontrivial cyclically reduced edge loop on the rose, iterated under a
/// train track map.
#[derive(Clone, Debug)]
pub struct CyclicPath {
    blocks: Vec<Block>,
    rank: usize,
}

impl CyclicPath {
    /// Splits a class into its maximal legal segments.
    pub fn new(tt: &TrainTrackMap, alpha: &ConjClass) -> Result<Self> {
        if alpha.is_trivial() {
            return Err(Error::input("iteration of the trivial class"));
        }
        let rank = tt.rank();
        let letters = alpha.letters();
        let m = letters.len();
        let mut blocks: Vec<Block> = tt
            .legal_segments(letters)
            .into_iter()
            .map(|(s, len)| Block::explicit(rank, (0..len).map(|i| letters[(s + i) % m])))
            .collect();
        for b in &mut blocks {
            b.maybe_compress();
        }
        Ok(CyclicPath { blocks, rank })
    }

    /// Word length of the loop.
    pub fn len(&self) -> u128 {
        self.blocks.iter().map(|b| b.len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Letter counts per generator.
    pub fn counts(&self) -> Vec<u128> {
        let mut out = alloc::vec![0u128; self.rank];
        for b in &self.blocks {
            for (o, c) in out.iter_mut().zip(&b.counts) {
                *o += c;
            }
        }
        out
    }

    pub fn metric_length(&self, edge_lengths: &[f64]) -> f64 {
        self.counts().iter().zip(edge_lengths).map(|(&c, &l)| c as f64 * l).sum()
    }

    /// The class, when no block is compressed.
    pub fn to_class(&self) -> Option<ConjClass> {
        if self.blocks.iter().any(|b| b.compressed) {
            return None;
        }
        let letters: Vec<Letter> = self.blocks.iter().flat_map(|b| b.head.iter().copied()).collect();
        Some(ConjClass::from_letters(&letters))
    }

    /// Replaces the loop by its tightened image `[ρ(·)]`.
    pub fn step(&mut self, tt: &TrainTrackMap) -> Result<()> {
        let mapped: Vec<Block> = self.blocks.iter().map(|b| b.map(tt)).collect();
        let mut out: Vec<Block> = Vec::with_capacity(mapped.len());
        for mut b in mapped {
            while b.len > 0 {
                let Some(top) = out.last_mut() else { break };
                if top.last() != b.first().inverse() {
                    break;
                }
                top.pop_back()?;
                b.pop_front()?;
                if top.len == 0 {
                    out.pop();
                }
            }
            if b.len == 0 {
                continue;
            }
            match out.last_mut() {
                Some(top) if !tt.legal().is_illegal(turn_between(top.last(), b.first())) => {
                    top.append(b)
                }
                _ => out.push(b),
            }
        }
        // wraparound
        loop {
            match out.len() {
                0 => return Err(Error::degenerate("loop collapsed under iteration")),
                1 => {
                    let b = &mut out[0];
                    while b.len >= 2 && b.last() == b.first().inverse() {
                        b.pop_back()?;
                        b.pop_front()?;
                    }
                    break;
                }
                n => {
                    if out[n - 1].last() != out[0].first().inverse() {
                        if n >= 2 && !tt.legal().is_illegal(turn_between(out[n - 1].last(), out[0].first())) {
                            let first = out.remove(0);
                            out.last_mut().expect("n >= 2").append(first);
                            continue;
                        }
                        break;
                    }
                    out[n - 1].pop_back()?;
                    out[0].pop_front()?;
                    out.retain(|b| b.len > 0);
                }
            }
        }
        self.blocks = out;
        Ok(())
    }
}
