use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::eigen::Spectrum;
use crate::error::{Error, Result};

use super::basis::Statistics;
use super::entropy::entropy_rank;

#[derive(PartialEq)]
struct Candidate {
    energy: f64,
    levels: Vec<u32>,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on energy, ties broken by the index tuple
        other
            .energy
            .total_cmp(&self.energy)
            .then_with(|| other.levels.cmp(&self.levels))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Number of ordered tuples behind a nondecreasing tuple, `n! / ∏ m_j!`,
/// saturating.
fn tuple_multiplicity(levels: &[u32]) -> u128 {
    let mut acc: u128 = 1;
    let mut run = 0u128;
    for (i, l) in levels.iter().enumerate() {
        run = if i > 0 && levels[i - 1] == *l { run + 1 } else { 1 };
        // multiply by (i+1)/run, exact because the partial products are
        // multinomial coefficients
        acc = acc.saturating_mul(i as u128 + 1) / run;
    }
    acc
}

/// The `count` lowest n-particle levels (with multiplicity) of the
/// noninteracting sector, from the sorted one-body eigenvalues.
///
/// Fermi levels are sums over n distinct one-body levels, Bose levels sums
/// over multisets, and Boltzmann levels the same multisets repeated
/// `n!/∏ m_j!` times. Enumeration is best-first from the lowest index
/// tuple; incrementing one index never lowers the sum, so levels come out
/// in order.
pub fn free_levels(one_body: &[f64], n: usize, statistics: Statistics, count: usize) -> Result<Vec<f64>> {
    let m = one_body.len();
    if n == 0 {
        return Err(Error::config("particle number must be at least 1"));
    }
    if statistics == Statistics::Fermi && n > m {
        return Err(Error::sector(format!(
            "no antisymmetric states: {n} fermions on {m} sites"
        )));
    }
    if one_body.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::config("one-body levels must be sorted"));
    }
    let energy = |levels: &[u32]| levels.iter().map(|&l| one_body[l as usize]).sum::<f64>();
    let start: Vec<u32> = match statistics {
        Statistics::Fermi => (0..n as u32).collect(),
        _ => vec![0; n],
    };
    let mut heap = BinaryHeap::new();
    let mut seen = HashSet::new();
    seen.insert(start.clone());
    heap.push(Candidate {
        energy: energy(&start),
        levels: start,
    });
    let mut out = Vec::with_capacity(count.min(1 << 20));
    while out.len() < count {
        let Some(Candidate { energy: e, levels }) = heap.pop() else {
            break;
        };
        let copies = match statistics {
            Statistics::Boltzmann => tuple_multiplicity(&levels),
            _ => 1,
        };
        let take = copies.min((count - out.len()) as u128) as usize;
        out.extend(std::iter::repeat_n(e, take));
        for i in 0..n {
            let next = levels[i] + 1;
            if next as usize >= m {
                continue;
            }
            let fits = match (statistics, levels.get(i + 1)) {
                (_, None) => true,
                (Statistics::Fermi, Some(&after)) => next < after,
                (_, Some(&after)) => next <= after,
            };
            if !fits {
                continue;
            }
            let mut child = levels.clone();
            child[i] = next;
            if seen.insert(child.clone()) {
                heap.push(Candidate {
                    energy: energy(&child),
                    levels: child,
                });
            }
        }
    }
    Ok(out)
}

/// `E(Λ, n, S)` of the noninteracting sector, computed from the one-body
/// spectrum.
pub fn free_energy_at_entropy(one_body: &Spectrum, n: usize, statistics: Statistics, s: f64) -> Result<f64> {
    let k = entropy_rank(s);
    let levels = free_levels(one_body.values(), n, statistics, k)?;
    levels.get(k - 1).copied().ok_or_else(|| {
        Error::sector(format!(
            "sector exhausted: entropy {s} asks for level {k} of {}",
            levels.len()
        ))
    })
}

/// Noninteracting ground energy: the sum of the n lowest one-body levels
/// for fermions, `n E_1` otherwise.
pub fn free_ground_energy(one_body: &Spectrum, n: usize, statistics: Statistics) -> Result<f64> {
    free_energy_at_entropy(one_body, n, statistics, 0.0)
}
