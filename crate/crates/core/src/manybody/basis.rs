use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{dist2, Region};

/// Symmetry sector of the n-particle space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistics {
    /// Distinguishable (Maxwell–Boltzmann) particles: all ordered tuples.
    Boltzmann,
    /// Symmetric sector, occupation-number states.
    Bose,
    /// Antisymmetric sector, ordered Slater configurations.
    Fermi,
}

impl Statistics {
    pub const ALL: [Statistics; 3] = [Statistics::Boltzmann, Statistics::Bose, Statistics::Fermi];
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistics::Boltzmann => "boltzmann",
            Statistics::Bose => "bose",
            Statistics::Fermi => "fermi",
        })
    }
}

/// Sector dimension without hard cores: `m^n`, `C(m+n−1, n)` or `C(m, n)`.
/// `None` on overflow.
pub fn sector_dimension(sites: usize, n: usize, statistics: Statistics) -> Option<u128> {
    match statistics {
        Statistics::Boltzmann => (sites as u128).checked_pow(n as u32),
        Statistics::Bose => binomial((sites + n).checked_sub(1)? as u128, n as u128),
        Statistics::Fermi => {
            if n > sites {
                Some(0)
            } else {
                binomial(sites as u128, n as u128)
            }
        }
    }
}

/// Exact binomial coefficient, `None` on overflow.
pub fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Ordered list of n-particle configurations over the sites of a region.
///
/// Configurations are tuples of site indices into the region: every tuple for
/// Boltzmann, nondecreasing tuples (multisets) for Bose, strictly increasing
/// tuples for Fermi. The list is in lexicographic order. With a hard-core
/// radius `r_0`, every configuration containing two particles at Euclidean
/// distance `< r_0` is removed (coincident particles included).
#[derive(Clone, Debug)]
pub struct BasisSet {
    statistics: Statistics,
    region: Region,
    particles: usize,
    hardcore: Option<f64>,
    configs: Vec<Vec<u32>>,
    lookup: HashMap<Vec<u32>, usize>,
}

impl BasisSet {
    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn hardcore(&self) -> Option<f64> {
        self.hardcore
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn configs(&self) -> &[Vec<u32>] {
        &self.configs
    }

    pub fn index_of(&self, config: &[u32]) -> Option<usize> {
        self.lookup.get(config).copied()
    }
}

/// Enumerates the n-particle basis of `statistics` over `region`.
pub fn enumerate_basis(
    region: &Region,
    n: usize,
    statistics: Statistics,
    hardcore: Option<f64>,
) -> Result<BasisSet> {
    if n == 0 {
        return Err(Error::config("particle number must be at least 1"));
    }
    let m = region.len();
    if statistics == Statistics::Fermi && n > m {
        return Err(Error::sector(format!(
            "no antisymmetric states: {n} fermions on {m} sites"
        )));
    }
    if let Some(r0) = hardcore {
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::config(format!("hard-core radius must be positive (got {r0})")));
        }
    }
    let mut configs = Vec::new();
    let mut current = Vec::with_capacity(n);
    fill(region, n, statistics, hardcore, &mut current, &mut configs);
    if configs.is_empty() {
        return Err(Error::sector(format!(
            "above closed packing: no configuration of {n} particles with hard-core radius {} fits in {} sites",
            hardcore.unwrap_or(0.0),
            m
        )));
    }
    let lookup = configs
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    Ok(BasisSet {
        statistics,
        region: region.clone(),
        particles: n,
        hardcore,
        configs,
        lookup,
    })
}

fn fill(
    region: &Region,
    n: usize,
    statistics: Statistics,
    hardcore: Option<f64>,
    current: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if current.len() == n {
        out.push(current.clone());
        return;
    }
    let m = region.len();
    let start = match (statistics, current.last()) {
        (Statistics::Boltzmann, _) | (_, None) => 0,
        (Statistics::Bose, Some(&last)) => last as usize,
        (Statistics::Fermi, Some(&last)) => last as usize + 1,
    };
    // fermions need room for the remaining particles
    let end = match statistics {
        Statistics::Fermi => m + 1 + current.len() - n,
        _ => m,
    };
    for s in start..end {
        if let Some(r0) = hardcore {
            let x = &region.sites()[s];
            let r2 = r0 * r0;
            let blocked = current
                .iter()
                .any(|&p| (dist2(x, &region.sites()[p as usize]) as f64) < r2);
            if blocked {
                continue;
            }
        }
        current.push(s as u32);
        fill(region, n, statistics, hardcore, current, out);
        current.pop();
    }
}

/// Largest particle number that admits a hard-core configuration on a line
/// of `sites` consecutive lattice points, by dynamic programming over the
/// rightmost occupied site.
pub fn max_packing_line(sites: usize, r0: f64) -> usize {
    if sites == 0 {
        return 0;
    }
    // occupied sites i < j are compatible iff j - i >= r0
    let gap = (r0.ceil() as usize).max(1);
    // best[j]: largest packing whose rightmost particle sits at j
    let mut best = vec![0usize; sites];
    let mut prefix_max = vec![0usize; sites];
    for j in 0..sites {
        best[j] = 1 + if j >= gap { prefix_max[j - gap] } else { 0 };
        prefix_max[j] = best[j].max(if j > 0 { prefix_max[j - 1] } else { 0 });
    }
    prefix_max[sites - 1]
}

/// Largest particle number with a nonempty hard-core basis on an arbitrary
/// region, by exhaustive branch and bound. Exponential; meant for small
/// regions and as a cross-check of [`max_packing_line`].
pub fn max_packing_exhaustive(region: &Region, r0: f64) -> usize {
    fn search(region: &Region, r2: f64, next: usize, chosen: &mut Vec<usize>, best: &mut usize) {
        *best = (*best).max(chosen.len());
        let m = region.len();
        if chosen.len() + (m - next) <= *best {
            return;
        }
        for s in next..m {
            if chosen.len() + (m - s) <= *best {
                return;
            }
            let x = &region.sites()[s];
            if chosen
                .iter()
                .all(|&p| (dist2(x, &region.sites()[p]) as f64) >= r2)
            {
                chosen.push(s);
                search(region, r2, s + 1, chosen, best);
                chosen.pop();
            }
        }
    }
    let mut best = 0;
    search(region, r0 * r0, 0, &mut Vec::new(), &mut best);
    best
}
