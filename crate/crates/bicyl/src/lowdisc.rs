//! Sobol low-discrepancy sequences in dimensions 2 and 3, with optional
//! seeded scrambling.
//!
//! Direction numbers come from the Joe–Kuo `new-joe-kuo-6.21201` tables
//! (the first sequence dimension is the van der Corput sequence). Points
//! are enumerated in Gray-code order, so any prefix of 2^m points forms the
//! same set as the natural-order prefix and keeps the elementary-interval
//! equidistribution of a (0, m, s)-net.
//!
//! Scrambling is a seeded digital shift: each dimension's output bits are
//! XORed with a mask drawn from a splitmix64 stream. This keeps the net
//! structure intact while decorrelating sequences across seeds.

use crate::error::{Error, Result};

/// Largest supported block exponent (2^30 points).
pub const MAX_LOG2_POINTS: u32 = 30;

const N_BITS: usize = 32;

/// Joe–Kuo table rows for sequence dimensions 2 and 3: the primitive
/// polynomial coefficients `a` and the initial direction numbers `m`.
const JOE_KUO: [(u32, &[u32]); 2] = [(0, &[1]), (1, &[1, 3])];

/// Expands a Joe–Kuo table row into 32 direction vectors.
fn expand_directions(a: u32, m: &[u32]) -> [u32; N_BITS] {
    let s = m.len();
    let mut v = [0u32; N_BITS];
    for (i, &mi) in m.iter().enumerate().take(N_BITS) {
        v[i] = mi << (31 - i);
    }
    for i in s..N_BITS {
        let mut vi = v[i - s] ^ (v[i - s] >> s);
        for k in 0..s - 1 {
            if (a >> k) & 1 == 1 {
                vi ^= v[i - (s - 1 - k)];
            }
        }
        v[i] = vi;
    }
    v
}

fn direction_vectors(dim_index: usize) -> [u32; N_BITS] {
    if dim_index == 0 {
        // Van der Corput: v_j = 2^(31-j).
        let mut v = [0u32; N_BITS];
        for (j, vj) in v.iter_mut().enumerate() {
            *vj = 1 << (31 - j);
        }
        v
    } else {
        let (a, m) = JOE_KUO[dim_index - 1];
        expand_directions(a, m)
    }
}

pub(crate) fn splitmix64_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

#[inline]
fn to_unit(bits: u32) -> f64 {
    bits as f64 / (1u64 << 32) as f64
}

/// Streaming Sobol generator in `D` dimensions (`D` ∈ {2, 3}).
///
/// For a fixed `(D, scramble_seed)` the emitted sequence is deterministic.
/// A sampler owns its cursor, so each consumer constructs its own; a full
/// block is a pure function of the seed and the block exponent.
#[derive(Debug, Clone)]
pub struct SobolSampler<const D: usize> {
    directions: [[u32; N_BITS]; D],
    shift: [u32; D],
    state: [u32; D],
    cursor: u32,
    scramble_seed: Option<u64>,
}

impl<const D: usize> SobolSampler<D> {
    /// A sampler positioned at the start of the sequence. `scramble_seed`
    /// of `None` yields the raw (unscrambled) sequence.
    pub fn new(scramble_seed: Option<u64>) -> Result<Self> {
        if D < 2 || D > 3 {
            return Err(Error::InvalidParameter(format!(
                "sobol dimension {D} not supported (expected 2 or 3)"
            )));
        }
        let mut directions = [[0u32; N_BITS]; D];
        for (i, d) in directions.iter_mut().enumerate() {
            *d = direction_vectors(i);
        }
        let mut shift = [0u32; D];
        if let Some(seed) = scramble_seed {
            let mut s = seed;
            for mask in shift.iter_mut() {
                *mask = (splitmix64_next(&mut s) >> 32) as u32;
            }
        }
        Ok(SobolSampler {
            directions,
            shift,
            state: [0u32; D],
            cursor: 0,
            scramble_seed,
        })
    }

    pub fn dimension(&self) -> usize {
        D
    }

    pub fn scramble_seed(&self) -> Option<u64> {
        self.scramble_seed
    }

    /// Points emitted so far.
    pub fn cursor(&self) -> u32 {
        self.cursor
    }

    /// Emits the next point; every coordinate lies in [0, 1).
    pub fn next_point(&mut self) -> [f64; D] {
        let mut out = [0.0; D];
        for i in 0..D {
            out[i] = to_unit(self.state[i] ^ self.shift[i]);
        }
        self.cursor = self.cursor.wrapping_add(1);
        debug_assert!(self.cursor != 0, "sobol sequence exhausted");
        let bit = self.cursor.trailing_zeros() as usize;
        for i in 0..D {
            self.state[i] ^= self.directions[i][bit];
        }
        out
    }

    /// Repositions the sampler so the next emitted point is `index`
    /// (Gray-code order, matching sequential generation).
    pub fn seek(&mut self, index: u32) {
        let natural = index ^ (index >> 1);
        let mut state = [0u32; D];
        for bit in 0..N_BITS {
            if (natural >> bit) & 1 == 1 {
                for i in 0..D {
                    state[i] ^= self.directions[i][bit];
                }
            }
        }
        self.state = state;
        self.cursor = index;
    }

    /// The next 2^m points (the first 2^m on a fresh sampler), as rows.
    pub fn take_block(&mut self, m: u32) -> Result<Vec<[f64; D]>> {
        if m < 1 || m > MAX_LOG2_POINTS {
            return Err(Error::InvalidParameter(format!(
                "block exponent m = {m} outside 1..={MAX_LOG2_POINTS}"
            )));
        }
        let n = 1usize << m;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(self.next_point());
        }
        Ok(out)
    }
}

/// The first 2^m points of the (optionally scrambled) D-dimensional Sobol
/// sequence.
pub fn sobol_block<const D: usize>(scramble_seed: Option<u64>, m: u32) -> Result<Vec<[f64; D]>> {
    SobolSampler::<D>::new(scramble_seed)?.take_block(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::SplitMix64;

    /// First eight points of the unscrambled 2-D sequence, as published for
    /// the van der Corput + Joe–Kuo construction.
    const FIRST_EIGHT_2D: [[f64; 2]; 8] = [
        [0.0, 0.0],
        [0.5, 0.5],
        [0.75, 0.25],
        [0.25, 0.75],
        [0.375, 0.375],
        [0.875, 0.875],
        [0.625, 0.125],
        [0.125, 0.625],
    ];

    #[test]
    fn first_two_points_2d() {
        let pts = sobol_block::<2>(None, 1).unwrap();
        assert_eq!(pts, vec![[0.0, 0.0], [0.5, 0.5]]);
    }

    #[test]
    fn first_eight_points_2d_match_reference() {
        let pts = sobol_block::<2>(None, 3).unwrap();
        assert_eq!(pts.as_slice(), &FIRST_EIGHT_2D);
    }

    #[test]
    fn first_eight_points_3d_third_coordinate() {
        // Hand-expanded from the d=3 Joe–Kuo row (a=1, m=[1,3]) in
        // Gray-code order.
        let expected = [0.0, 0.5, 0.25, 0.75, 0.625, 0.125, 0.875, 0.375];
        let pts = sobol_block::<3>(None, 3).unwrap();
        for (p, &e) in pts.iter().zip(&expected) {
            assert_eq!(p[2], e);
        }
        // Every 1-D projection of the 8-point block is {k/8}.
        for dim in 0..3 {
            let mut coords: Vec<f64> = pts.iter().map(|p| p[dim]).collect();
            coords.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (k, &c) in coords.iter().enumerate() {
                assert_eq!(c, k as f64 / 8.0, "dim {dim}");
            }
        }
    }

    #[test]
    fn elementary_interval_property() {
        // 2^10 points, 32×32 aligned dyadic boxes: exactly one point each.
        let pts = sobol_block::<2>(None, 10).unwrap();
        let mut counts = [[0u32; 32]; 32];
        for p in &pts {
            let i = (p[0] * 32.0) as usize;
            let j = (p[1] * 32.0) as usize;
            counts[i][j] += 1;
        }
        for (i, row) in counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                assert_eq!(c, 1, "box ({i},{j}) holds {c} points");
            }
        }
    }

    #[test]
    fn coordinates_in_unit_interval() {
        for seed in [None, Some(1u64), Some(0xDEADBEEF)] {
            let pts = sobol_block::<3>(seed, 8).unwrap();
            for p in pts {
                for c in p {
                    assert!((0.0..1.0).contains(&c), "{c}");
                }
            }
        }
    }

    #[test]
    fn scrambling_is_seeded_and_reproducible() {
        let a1 = sobol_block::<2>(Some(7), 6).unwrap();
        let a2 = sobol_block::<2>(Some(7), 6).unwrap();
        let b = sobol_block::<2>(Some(8), 6).unwrap();
        assert_eq!(a1, a2);
        assert_ne!(a1, b);
        assert_ne!(a1, sobol_block::<2>(None, 6).unwrap());
    }

    #[test]
    fn coordinate_means_near_half() {
        for seed in [None, Some(99u64)] {
            let pts = sobol_block::<3>(seed, 16).unwrap();
            for dim in 0..3 {
                let mean: f64 =
                    pts.iter().map(|p| p[dim]).sum::<f64>() / pts.len() as f64;
                assert!((mean - 0.5).abs() < 0.01, "dim {dim}: mean {mean}");
            }
        }
    }

    #[test]
    fn seek_matches_sequential_generation() {
        let mut seq = SobolSampler::<3>::new(Some(321)).unwrap();
        let pts: Vec<[f64; 3]> = (0..100).map(|_| seq.next_point()).collect();
        let mut jumper = SobolSampler::<3>::new(Some(321)).unwrap();
        for (i, expected) in pts.iter().enumerate() {
            jumper.seek(i as u32);
            assert_eq!(jumper.next_point(), *expected, "index {i}");
        }
    }

    #[test]
    fn block_exponent_validation() {
        assert!(sobol_block::<2>(None, 0).is_err());
        assert!(sobol_block::<2>(None, 31).is_err());
        assert!(sobol_block::<2>(None, 1).is_ok());
    }

    /// Anchored-box star discrepancy estimate on a k×k grid.
    fn star_discrepancy(points: &[[f64; 2]], k: usize) -> f64 {
        let n = points.len() as f64;
        let mut worst: f64 = 0.0;
        for i in 1..=k {
            for j in 1..=k {
                let (a, b) = (i as f64 / k as f64, j as f64 / k as f64);
                let count = points
                    .iter()
                    .filter(|p| p[0] < a && p[1] < b)
                    .count() as f64;
                worst = worst.max((count / n - a * b).abs());
            }
        }
        worst
    }

    #[test]
    fn lower_discrepancy_than_pseudorandom() {
        let sobol = sobol_block::<2>(None, 10).unwrap();
        let mut rng = SplitMix64::new(2024);
        let random: Vec<[f64; 2]> = (0..1024)
            .map(|_| [rng.next_f64(), rng.next_f64()])
            .collect();
        let d_sobol = star_discrepancy(&sobol, 64);
        let d_random = star_discrepancy(&random, 64);
        assert!(
            d_sobol < d_random,
            "sobol {d_sobol} should beat pseudorandom {d_random}"
        );
    }
}
