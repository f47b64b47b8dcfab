//! Test functions built from two disjoint sub-box states, the energy bound
//! they certify, and per-realization checks of the subadditive inequalities
//! for the counting function, the entropy and the inverse energy.
//!
//! Normalization. Sector vectors are coefficient vectors over the basis of
//! [`crate::manybody::BasisSet`]: ordered tuples for Boltzmann, normalized
//! occupation states for Bose, normalized ordered Slater states for Fermi.
//! The construction itself works with tuple wavefunctions on `Λ^n`; the
//! coefficient `a_c` of a configuration `c` and the tuple value `ψ(c)` are
//! related by
//!
//! * Boltzmann: `a_c = ψ(c)`,
//! * Bose: `a_c = √(n! / ∏_j m_j!) ψ(c)`, with `m_j` the occupations of `c`,
//! * Fermi: `a_c = √(n!) ψ(c)` for increasing `c`.
//!
//! Under these factors the coefficient norm equals the tuple norm, so the
//! identity `‖ζ‖² = C(n_1+n_2, n_1) ‖φ_1‖² ‖φ_2‖²` (Bose, Fermi) and
//! `‖ζ‖ = ‖φ_1‖ ‖φ_2‖` (Boltzmann) can be checked on coefficient vectors.
//!
//! The Fermi sign of the summand indexed by `I ⊂ {1, …, n}` is
//! `(−1)^{Σ_{i∈I} i}`, with particle labels in increasing site order of the
//! joint region (sites of the first box precede those of the second).

use serde::Serialize;

use crate::disorder::{sample_potential, DisorderSpec, PotentialField};
use crate::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::exec;
use crate::lattice::{box_distance, LatticeBox, Region};
use crate::manybody::{
    assemble_many_body, binomial, energy_at_entropy, entropy, entropy_rank, enumerate_basis,
    many_body_eigenpairs, many_body_spectrum, rayleigh_quotient, BasisSet, InteractionSpec,
    ManyBodyOperator, Statistics,
};

/// Slack of every inequality check.
pub const INEQUALITY_TOL: f64 = 1e-8;

/// `ζ` as a coefficient vector over the joint basis.
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub statistics: Statistics,
    pub n1: usize,
    pub n2: usize,
    pub coefficients: Vec<f64>,
    /// `‖ζ‖²`.
    pub norm_sq: f64,
    /// `C(n_1+n_2, n_1) ‖φ_1‖² ‖φ_2‖²`, or `‖φ_1‖² ‖φ_2‖²` for Boltzmann.
    pub predicted_norm_sq: f64,
    /// Smallest distance between the two supports.
    pub separation: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Tuple value `ψ(x)` of a sector vector, `x` given as site indices of the
/// basis region.
pub fn tuple_value(basis: &BasisSet, coefficients: &[f64], tuple: &[u32]) -> f64 {
    let n = tuple.len();
    match basis.statistics() {
        Statistics::Boltzmann => basis.index_of(tuple).map_or(0.0, |i| coefficients[i]),
        Statistics::Bose => {
            let mut sorted = tuple.to_vec();
            sorted.sort_unstable();
            let Some(i) = basis.index_of(&sorted) else {
                return 0.0;
            };
            let mut occupations = 1.0;
            let mut run = 0usize;
            for k in 0..n {
                run = if k > 0 && sorted[k] == sorted[k - 1] { run + 1 } else { 1 };
                occupations *= run as f64;
            }
            coefficients[i] * (occupations / factorial(n)).sqrt()
        }
        Statistics::Fermi => {
            let mut sorted = tuple.to_vec();
            let mut sign = 1.0;
            // insertion sort, counting transpositions
            for k in 1..n {
                let mut j = k;
                while j > 0 && sorted[j - 1] > sorted[j] {
                    sorted.swap(j - 1, j);
                    sign = -sign;
                    j -= 1;
                }
            }
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return 0.0;
            }
            basis
                .index_of(&sorted)
                .map_or(0.0, |i| sign * coefficients[i] / factorial(n).sqrt())
        }
    }
}

/// Inverse of [`tuple_value`]: coefficient of configuration `c` given the
/// tuple value at `c`.
fn coefficient_from_tuple(statistics: Statistics, config: &[u32], value: f64) -> f64 {
    let n = config.len();
    match statistics {
        Statistics::Boltzmann => value,
        Statistics::Fermi => value * factorial(n).sqrt(),
        Statistics::Bose => {
            let mut occupations = 1.0;
            let mut run = 0usize;
            for k in 0..n {
                run = if k > 0 && config[k] == config[k - 1] { run + 1 } else { 1 };
                occupations *= run as f64;
            }
            value * (factorial(n) / occupations).sqrt()
        }
    }
}

/// k-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Builds ζ on `joint` from `φ_1` on `basis1` and `φ_2` on `basis2`.
///
/// Boltzmann: `ζ(x) = φ_1(x^1, …, x^{n_1}) φ_2(x^{n_1+1}, …, x^n)`.
/// Bose and Fermi: `ζ(x) = Σ_{|I| = n_1} s(I) φ_1(x^I) φ_2(x^{I^c})`, with
/// `s = 1` for bosons and `s(I) = (−1)^{Σ_{i∈I} i}` for fermions. The sub-box
/// states are extended by zero to the joint region.
pub fn build_test_function(
    phi1: &[f64],
    basis1: &BasisSet,
    phi2: &[f64],
    basis2: &BasisSet,
    joint: &BasisSet,
) -> Result<TestFunction> {
    let statistics = joint.statistics();
    if basis1.statistics() != statistics || basis2.statistics() != statistics {
        return Err(Error::config("test function inputs must share one statistics"));
    }
    if phi1.len() != basis1.len() || phi2.len() != basis2.len() {
        return Err(Error::config("test function input length differs from its basis"));
    }
    let norm1: f64 = phi1.iter().map(|v| v * v).sum();
    let norm2: f64 = phi2.iter().map(|v| v * v).sum();
    if norm1 == 0.0 || norm2 == 0.0 {
        return Err(Error::config("test function inputs must be nonzero"));
    }
    let (r1, r2) = (basis1.region(), basis2.region());
    if r1.sites().iter().any(|x| r2.contains(x)) {
        return Err(Error::geometry("test function boxes overlap"));
    }
    let (n1, n2) = (basis1.particles(), basis2.particles());
    let n = n1 + n2;
    if joint.particles() != n {
        return Err(Error::config(format!(
            "joint basis holds {} particles, expected {n}",
            joint.particles()
        )));
    }
    let jr = joint.region();
    if !r1.is_subset_of(jr) || !r2.is_subset_of(jr) {
        return Err(Error::geometry("sub-boxes are not contained in the joint region"));
    }
    // joint site index -> (local index in box 1, local index in box 2)
    let local: Vec<(Option<u32>, Option<u32>)> = jr
        .sites()
        .iter()
        .map(|x| (r1.index_of(x).map(|i| i as u32), r2.index_of(x).map(|i| i as u32)))
        .collect();

    let splits: Vec<(Vec<usize>, f64)> = match statistics {
        Statistics::Boltzmann => vec![((0..n1).collect(), 1.0)],
        Statistics::Bose => subsets(n, n1).into_iter().map(|i| (i, 1.0)).collect(),
        Statistics::Fermi => subsets(n, n1)
            .into_iter()
            .map(|i| {
                // labels are 1-based
                let parity: usize = i.iter().map(|k| k + 1).sum();
                (i, if parity % 2 == 0 { 1.0 } else { -1.0 })
            })
            .collect(),
    };

    let mut t1 = Vec::with_capacity(n1);
    let mut t2 = Vec::with_capacity(n2);
    let coefficients: Vec<f64> = joint
        .configs()
        .iter()
        .map(|c| {
            let mut value = 0.0;
            'split: for (subset, sign) in &splits {
                t1.clear();
                t2.clear();
                let mut next = 0;
                for (k, &s) in c.iter().enumerate() {
                    if next < subset.len() && subset[next] == k {
                        next += 1;
                        match local[s as usize].0 {
                            Some(l) => t1.push(l),
                            None => continue 'split,
                        }
                    } else {
                        match local[s as usize].1 {
                            Some(l) => t2.push(l),
                            None => continue 'split,
                        }
                    }
                }
                value += sign * tuple_value(basis1, phi1, &t1) * tuple_value(basis2, phi2, &t2);
            }
            coefficient_from_tuple(statistics, c, value)
        })
        .collect();

    let multiplicity = match statistics {
        Statistics::Boltzmann => 1.0,
        _ => binomial(n as u128, n1 as u128).unwrap_or(u128::MAX) as f64,
    };
    let separation = r1
        .parts()
        .iter()
        .flat_map(|a| r2.parts().iter().map(move |b| box_distance(a, b)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(TestFunction {
        statistics,
        n1,
        n2,
        norm_sq: coefficients.iter().map(|v| v * v).sum(),
        coefficients,
        predicted_norm_sq: multiplicity * norm1 * norm2,
        separation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub quotient: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Compares `⟨Hζ, ζ⟩ / ‖ζ‖²` with `E_1 + E_2 + A n_1 n_2 r^{−λ}`.
pub fn verify_energy_bound(
    zeta: &TestFunction,
    op: &ManyBodyOperator,
    e1: f64,
    e2: f64,
    interaction: &InteractionSpec,
    r: f64,
) -> Result<BoundReport> {
    let basis = op.basis();
    if basis.statistics() != zeta.statistics || basis.particles() != zeta.n1 + zeta.n2 {
        return Err(Error::config("operator sector differs from the test function"));
    }
    let d = basis.region().dimension();
    let tempered = interaction.tempered_constants(d);
    if !op.flags().pti {
        return Err(Error::config("energy bound needs a tempered (PTI) interaction"));
    }
    if r < tempered.range {
        return Err(Error::config(format!(
            "distance r = {r} below the interaction range R_0 = {}",
            tempered.range
        )));
    }
    if r > zeta.separation + 1e-12 {
        return Err(Error::geometry(format!(
            "distance r = {r} exceeds the box separation {}",
            zeta.separation
        )));
    }
    let quotient = rayleigh_quotient(op, &zeta.coefficients)?;
    let bound = e1 + e2 + (zeta.n1 * zeta.n2) as f64 * tempered.tail(r);
    Ok(BoundReport {
        quotient,
        bound,
        margin: bound - quotient,
        pass: quotient <= bound + INEQUALITY_TOL,
    })
}

/// One row of a pass/fail table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub seed_index: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl CheckRow {
    /// Row for `lhs ≤ rhs`.
    fn at_most(seed_index: u64, lhs: f64, rhs: f64) -> Self {
        CheckRow {
            seed_index,
            lhs,
            rhs,
            margin: rhs - lhs,
            pass: lhs <= rhs + INEQUALITY_TOL,
        }
    }

    /// Row for `lhs ≥ rhs`.
    fn at_least(seed_index: u64, lhs: f64, rhs: f64) -> Self {
        CheckRow {
            seed_index,
            lhs,
            rhs,
            margin: lhs - rhs,
            pass: lhs + INEQUALITY_TOL >= rhs,
        }
    }
}

/// Rows of one inequality over realizations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckTable {
    pub name: String,
    pub rows: Vec<CheckRow>,
}

impl CheckTable {
    pub fn passed(&self) -> usize {
        self.rows.iter().filter(|r| r.pass).count()
    }

    pub fn pass_rate(&self) -> f64 {
        if self.rows.is_empty() {
            return 1.0;
        }
        self.passed() as f64 / self.rows.len() as f64
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn min_margin(&self) -> f64 {
        self.rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min)
    }
}

fn collect_tables(names: &[&str], per_realization: Vec<Vec<CheckRow>>) -> Vec<CheckTable> {
    names
        .iter()
        .enumerate()
        .map(|(k, name)| CheckTable {
            name: (*name).to_string(),
            rows: per_realization.iter().map(|rows| rows[k].clone()).collect(),
        })
        .collect()
}

/// Sector on `region` with the basis exclusion the interaction requires.
pub fn sector_operator(
    region: &Region,
    n: usize,
    statistics: Statistics,
    field: &PotentialField,
    interaction: &InteractionSpec,
) -> Result<ManyBodyOperator> {
    let basis = enumerate_basis(region, n, statistics, interaction.hardcore_radius())?;
    assemble_many_body(&basis, field, interaction)
}

pub fn sector_spectrum(
    region: &Region,
    n: usize,
    statistics: Statistics,
    field: &PotentialField,
    interaction: &InteractionSpec,
) -> Result<Spectrum> {
    many_body_spectrum(&sector_operator(region, n, statistics, field, interaction)?)
}

/// Two disjoint boxes with particle numbers and entropies.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitSetup {
    pub first: LatticeBox,
    pub second: LatticeBox,
    pub n1: usize,
    pub n2: usize,
    pub s1: f64,
    pub s2: f64,
    pub statistics: Statistics,
}

fn log_integer(s: f64) -> bool {
    s == 0.0 || ((entropy_rank(s) as f64).ln() - s).abs() <= 1e-9 * s.abs().max(1.0)
}

/// Counting, entropy and energy inequalities, plus the compact-support
/// variant when the interaction has finite range.
///
/// Per realization, with `E_j = E_ω(Λ_j, n_j, S_j)`, `r = dist(Λ_1, Λ_2)` and
/// `E_b = E_1 + E_2 + A n_1 n_2 r^{−λ}`:
///
/// * `counting`: `𝒩(Λ_1∪Λ_2, n_1+n_2, E_b) ≥ 𝒩(Λ_1, n_1, E_1) 𝒩(Λ_2, n_2, E_2)`
/// * `entropy`: `S(Λ_1∪Λ_2, n_1+n_2, E_b) ≥ S(Λ_1, n_1, E_1) + S(Λ_2, n_2, E_2)`
/// * `energy`: `E_ω(Λ_1∪Λ_2, n_1+n_2, S_1+S_2) ≤ E_b`
/// * `compact`: `f(Λ_1∪Λ_2) ≤ f(Λ_1) + f(Λ_2)` with
///   `f(A) = E_ω(Â, n, S*)` and `Â = {x ∈ A : dist(x, ∂A) > R_0/2}` taken box
///   by box.
pub fn check_subadditivity(
    spec: &DisorderSpec,
    interaction: &InteractionSpec,
    setup: &SplitSetup,
    seed: u64,
    realizations: usize,
) -> Result<Vec<CheckTable>> {
    if !log_integer(setup.s1) || !log_integer(setup.s2) {
        return Err(Error::config("entropies must be logarithms of integers"));
    }
    let r = box_distance(&setup.first, &setup.second)?;
    let d = setup.first.dimension();
    let tempered = interaction.tempered_constants(d);
    if r < tempered.range {
        return Err(Error::geometry(format!(
            "box distance {r} below the interaction range R_0 = {}",
            tempered.range
        )));
    }
    interaction.validate(d)?;
    let joint = Region::union(&[setup.first.clone(), setup.second.clone()])?;
    let region1 = Region::from_box(&setup.first);
    let region2 = Region::from_box(&setup.second);
    let compact = match interaction.compact_range() {
        Some(range) => Some((
            joint.interior(range / 2.0)?,
            region1.interior(range / 2.0)?,
            region2.interior(range / 2.0)?,
        )),
        None => None,
    };
    let tail = (setup.n1 * setup.n2) as f64 * tempered.tail(r);
    let n = setup.n1 + setup.n2;
    let stats = setup.statistics;

    let rows = exec::try_map_indexed(realizations, |i| -> Result<Vec<CheckRow>> {
        let idx = i as u64;
        let field = sample_potential(spec, &joint, seed, idx)?;
        let f1 = field.on_region(&region1)?;
        let f2 = field.on_region(&region2)?;
        let spec12 = sector_spectrum(&joint, n, stats, &field, interaction)?;
        let spec1 = sector_spectrum(&region1, setup.n1, stats, &f1, interaction)?;
        let spec2 = sector_spectrum(&region2, setup.n2, stats, &f2, interaction)?;
        let e1 = energy_at_entropy(&spec1, setup.s1)?;
        let e2 = energy_at_entropy(&spec2, setup.s2)?;
        let eb = e1 + e2 + tail;
        let e12 = energy_at_entropy(&spec12, setup.s1 + setup.s2)?;
        let n_lhs = spec12.count_below(eb + INEQUALITY_TOL) as f64;
        let n_rhs = (spec1.count_below(e1) * spec2.count_below(e2)) as f64;
        let s_lhs = entropy(&spec12, eb + INEQUALITY_TOL);
        let s_rhs = entropy(&spec1, e1) + entropy(&spec2, e2);
        let mut out = vec![
            CheckRow::at_least(idx, n_lhs, n_rhs),
            CheckRow::at_least(idx, s_lhs, s_rhs),
            CheckRow::at_most(idx, e12, eb),
        ];
        if let Some((hat12, hat1, hat2)) = &compact {
            let g12 = sector_spectrum(hat12, n, stats, &field.on_region(hat12)?, interaction)?;
            let g1 = sector_spectrum(hat1, setup.n1, stats, &field.on_region(hat1)?, interaction)?;
            let g2 = sector_spectrum(hat2, setup.n2, stats, &field.on_region(hat2)?, interaction)?;
            let lhs = energy_at_entropy(&g12, setup.s1 + setup.s2)?;
            let rhs = energy_at_entropy(&g1, setup.s1)? + energy_at_entropy(&g2, setup.s2)?;
            out.push(CheckRow::at_most(idx, lhs, rhs));
        }
        Ok(out)
    })?;
    let names: &[&str] = if compact.is_some() {
        &["counting", "entropy", "energy", "compact"]
    } else {
        &["counting", "entropy", "energy"]
    };
    Ok(collect_tables(names, rows))
}

/// m-fold energy inequality over pairwise disjoint boxes:
/// `E_ω(∪Λ_j, Σn_j, ΣS_j) ≤ Σ_j E_ω(Λ_j, n_j, S_j) + (A/2)(Σn_j)² r^{−λ}`,
/// with `r` the smallest pairwise box distance.
pub fn check_subadditivity_multi(
    spec: &DisorderSpec,
    interaction: &InteractionSpec,
    boxes: &[LatticeBox],
    particles: &[usize],
    entropies: &[f64],
    statistics: Statistics,
    seed: u64,
    realizations: usize,
) -> Result<CheckTable> {
    if boxes.len() < 2 || particles.len() != boxes.len() || entropies.len() != boxes.len() {
        return Err(Error::config("need at least two boxes with one n and one S each"));
    }
    if entropies.iter().any(|&s| !log_integer(s)) {
        return Err(Error::config("entropies must be logarithms of integers"));
    }
    let joint = Region::union(boxes)?;
    let r = joint
        .component_separation()
        .ok_or_else(|| Error::geometry("boxes have no separation"))?;
    let d = joint.dimension();
    let tempered = interaction.tempered_constants(d);
    if r < tempered.range {
        return Err(Error::geometry(format!(
            "box distance {r} below the interaction range R_0 = {}",
            tempered.range
        )));
    }
    interaction.validate(d)?;
    let total_n: usize = particles.iter().sum();
    let total_s: f64 = entropies.iter().sum();
    let tail = 0.5 * (total_n * total_n) as f64 * tempered.tail(r);
    let parts: Vec<Region> = boxes.iter().map(Region::from_box).collect();
    let rows = exec::try_map_indexed(realizations, |i| -> Result<CheckRow> {
        let idx = i as u64;
        let field = sample_potential(spec, &joint, seed, idx)?;
        let lhs = energy_at_entropy(
            &sector_spectrum(&joint, total_n, statistics, &field, interaction)?,
            total_s,
        )?;
        let mut rhs = tail;
        for ((part, &n), &s) in parts.iter().zip(particles).zip(entropies) {
            let sp = sector_spectrum(part, n, statistics, &field.on_region(part)?, interaction)?;
            rhs += energy_at_entropy(&sp, s)?;
        }
        Ok(CheckRow::at_most(idx, lhs, rhs))
    })?;
    Ok(CheckTable {
        name: "energy_mfold".into(),
        rows,
    })
}

/// Per-realization outcome of the test-function construction from sub-box
/// ground states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestFunctionRow {
    pub seed_index: u64,
    pub quotient: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    pub norm_sq: f64,
    pub predicted_norm_sq: f64,
}

impl TestFunctionRow {
    pub fn norm_error(&self) -> f64 {
        (self.norm_sq - self.predicted_norm_sq).abs()
    }
}

/// Builds ζ from the ground states of the two sub-box sectors and checks
/// the energy bound and the norm identity, one row per realization.
pub fn testfn_check(
    spec: &DisorderSpec,
    interaction: &InteractionSpec,
    setup: &SplitSetup,
    seed: u64,
    realizations: usize,
) -> Result<Vec<TestFunctionRow>> {
    let r = box_distance(&setup.first, &setup.second)?;
    let joint = Region::union(&[setup.first.clone(), setup.second.clone()])?;
    let region1 = Region::from_box(&setup.first);
    let region2 = Region::from_box(&setup.second);
    let hc = interaction.hardcore_radius();
    let stats = setup.statistics;
    let basis1 = enumerate_basis(&region1, setup.n1, stats, hc)?;
    let basis2 = enumerate_basis(&region2, setup.n2, stats, hc)?;
    let joint_basis = enumerate_basis(&joint, setup.n1 + setup.n2, stats, hc)?;
    exec::try_map_indexed(realizations, |i| {
        let idx = i as u64;
        let field = sample_potential(spec, &joint, seed, idx)?;
        let op1 = assemble_many_body(&basis1, &field.on_region(&region1)?, interaction)?;
        let op2 = assemble_many_body(&basis2, &field.on_region(&region2)?, interaction)?;
        let p1 = many_body_eigenpairs(&op1)?;
        let p2 = many_body_eigenpairs(&op2)?;
        let phi1: Vec<f64> = p1.vectors.column(0).iter().copied().collect();
        let phi2: Vec<f64> = p2.vectors.column(0).iter().copied().collect();
        let zeta = build_test_function(&phi1, &basis1, &phi2, &basis2, &joint_basis)?;
        let op = assemble_many_body(&joint_basis, &field, interaction)?;
        let report = verify_energy_bound(
            &zeta,
            &op,
            p1.spectrum.values()[0],
            p2.spectrum.values()[0],
            interaction,
            r,
        )?;
        Ok(TestFunctionRow {
            seed_index: idx,
            quotient: report.quotient,
            bound: report.bound,
            margin: report.margin,
            pass: report.pass,
            norm_sq: zeta.norm_sq,
            predicted_norm_sq: zeta.predicted_norm_sq,
        })
    })
}
