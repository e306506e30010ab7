use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bitset of flipped qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ErrorPattern {
    words: Vec<u64>,
    len: usize,
}

impl ErrorPattern {
    pub fn new(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_indices(len: usize, flips: &[usize]) -> Self {
        let mut e = Self::new(len);
        for &q in flips {
            e.toggle(q);
        }
        e
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, q: usize) -> bool {
        self.words[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn set(&mut self, q: usize, v: bool) {
        let bit = 1u64 << (q % 64);
        if v {
            self.words[q / 64] |= bit;
        } else {
            self.words[q / 64] &= !bit;
        }
    }

    pub fn toggle(&mut self, q: usize) {
        self.words[q / 64] ^= 1u64 << (q % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn xor_with(&mut self, other: &ErrorPattern) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }
}

/// Flips each qubit independently with probability `p`. Shot `shot` reads
/// stream `shot` of a ChaCha8 generator keyed by `seed`, one word per qubit.
pub fn sample_error(n_qubits: usize, p: f64, shot: u64, seed: u64) -> ErrorPattern {
    let mut e = ErrorPattern::new(n_qubits);
    if p <= 0.0 {
        return e;
    }
    if p >= 1.0 {
        for q in 0..n_qubits {
            e.set(q, true);
        }
        return e;
    }
    let threshold = (p * 18_446_744_073_709_551_616.0) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    for q in 0..n_qubits {
        if rng.next_u64() < threshold {
            e.set(q, true);
        }
    }
    e
}
