//! Trial noise sampling: independent erasures and bit flips on fallible
//! edges, deterministic per (seed, trial) regardless of worker count.
//!
//! Each trial owns a counter-seeded SplitMix64 stream. Erasures occur with
//! probability `p_e`; a surviving edge flips with probability `p_p`; an
//! erased edge carries a fair-coin outcome (the decoder is told which edges
//! were erased, not the coin). Sparse events are drawn by geometric skip
//! sampling, so cost scales with the number of events rather than edges.

pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(state: u64) -> Self {
        SplitMix64 { state }
    }

    /// Independent stream for one trial of a campaign.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        let mut r = SplitMix64::new(seed ^ trial.wrapping_mul(0x9E3779B97F4A7C15).rotate_left(17));
        r.next_u64();
        r
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }
}

/// Visit each of `m` slots independently with probability `p`, in order.
pub fn skip_sample(rng: &mut SplitMix64, m: usize, p: f64, mut hit: impl FnMut(usize)) {
    if p <= 0.0 || m == 0 {
        return;
    }
    if p >= 1.0 {
        (0..m).for_each(hit);
        return;
    }
    let log1mp = (1.0 - p).ln();
    let mut i: i64 = -1;
    loop {
        let r = rng.next_f64();
        let skip = ((1.0 - r).ln() / log1mp).floor() as i64;
        i += 1 + skip.max(0);
        if i >= m as i64 {
            return;
        }
        hit(i as usize);
    }
}

/// One trial's realized noise over `fallible` (indices into the edge list).
pub struct TrialNoise {
    /// Per-edge erasure flags over the full edge list.
    pub erased: Vec<bool>,
    /// Per-edge realized error bits (flip, or coin if erased).
    pub error: Vec<bool>,
}

pub fn sample_trial(
    n_edges: usize,
    fallible: &[usize],
    p_e: f64,
    p_p: f64,
    seed: u64,
    trial: u64,
) -> TrialNoise {
    let mut rng = SplitMix64::for_trial(seed, trial);
    let mut erased = vec![false; n_edges];
    let mut error = vec![false; n_edges];
    skip_sample(&mut rng, fallible.len(), p_e, |i| erased[fallible[i]] = true);
    skip_sample(&mut rng, fallible.len(), p_p, |i| {
        let e = fallible[i];
        if !erased[e] {
            error[e] = true;
        }
    });
    for &e in fallible {
        if erased[e] {
            error[e] = rng.next_bool();
        }
    }
    TrialNoise { erased, error }
}
