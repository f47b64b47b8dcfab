//! Thermodynamic-limit experiments: the `X_N` cube-sequence recursion, the
//! Maxwell–Boltzmann reduction to the bottom of the one-body spectrum, the
//! Fermi energy and fermionic energy density from the empirical IDS, and the
//! Weyl, Wegner and hard-core packing checks.

use serde::{Deserialize, Serialize};

use crate::constructions::{sector_spectrum, CheckRow, CheckTable, INEQUALITY_TOL};
use crate::disorder::{sample_potential, DisorderSpec, PotentialField};
use crate::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::exec;
use crate::lattice::{make_cube_sequence, CubeSequenceParams, LatticeBox, Region};
use crate::manybody::{
    enumerate_basis, free_energy_at_entropy, free_levels, max_packing_line, sector_dimension, InteractionSpec,
    Statistics,
};
use crate::oneparticle::{assemble_one_body, diagonalize, EmpiricalIds};

/// Sample mean, unbiased variance, standard error of the mean and of the
/// variance (`√((m_4 − s⁴)/M)` with `m_4` the fourth central moment).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleStats {
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    pub se_variance: f64,
    pub min: f64,
    pub max: f64,
}

impl SampleStats {
    pub fn of(xs: &[f64]) -> Self {
        let m = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / m;
        let (variance, m4) = if xs.len() < 2 {
            (0.0, 0.0)
        } else {
            let v = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
            let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / m;
            (v, m4)
        };
        SampleStats {
            mean,
            variance,
            se_mean: (variance / m).sqrt(),
            se_variance: ((m4 - variance * variance).max(0.0) / m).sqrt(),
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

fn one_body_spectrum(region: &Region, field: &PotentialField) -> Result<Spectrum> {
    diagonalize(&assemble_one_body(region, field)?)
}

fn default_sector_cap() -> usize {
    5000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermoParams {
    /// Requested ρ, snapped to `m / (L̃^d 2^{N_0 d})`.
    pub density: f64,
    /// σ; level N uses `S_N = σ n_N` through the S* rounding.
    #[serde(default)]
    pub entropy_density: f64,
    pub cube: CubeSequenceParams,
    pub max_level: u32,
    /// N_0.
    #[serde(default)]
    pub min_level: u32,
    pub realizations: usize,
    pub seed: u64,
    /// Largest interacting sector assembled densely.
    #[serde(default = "default_sector_cap")]
    pub sector_cap: usize,
}

impl ThermoParams {
    /// `(m, ρ')` with `ρ' L̃^d 2^{N_0 d} = m ∈ ℕ` nearest to the request.
    pub fn snapped_density(&self) -> Result<(u64, f64)> {
        if !(self.density > 0.0) || !self.density.is_finite() {
            return Err(Error::config(format!("density ρ must be positive (got {})", self.density)));
        }
        let d = self.cube.dimension as i32;
        let scale = self.cube.base_side.powi(d) * 2f64.powi(self.min_level as i32 * d);
        let m = (self.density * scale).round().max(1.0);
        Ok((m as u64, m / scale))
    }

    pub fn validate(&self) -> Result<()> {
        self.cube.validate()?;
        self.snapped_density()?;
        if !(self.entropy_density >= 0.0) || !self.entropy_density.is_finite() {
            return Err(Error::config("entropy density σ must be finite and nonnegative"));
        }
        if self.min_level > self.max_level {
            return Err(Error::config("min_level must not exceed max_level"));
        }
        if self.realizations == 0 {
            return Err(Error::config("realizations must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelDiagnostics {
    pub level: u32,
    /// L_N; the cube has `L_N + 1` sites per axis.
    pub side: i64,
    pub sites: usize,
    pub particles: usize,
    pub entropy: f64,
    pub stats: SampleStats,
    /// G_N, absent on the last level.
    pub correction: Option<f64>,
    /// X_N per realization, in index order.
    pub samples: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceDiagnostics {
    pub requested_density: f64,
    pub density: f64,
    pub statistics: Statistics,
    pub levels: Vec<LevelDiagnostics>,
    /// B + C.
    pub shift_constant: f64,
    /// Truncations and other notices.
    pub notices: Vec<String>,
    /// Every X_N ≥ 0.
    pub nonnegative: bool,
    /// `mean(X_{N+1}) ≤ mean(X_N) + G_N + 3 √(se_N² + se_{N+1}²)` at every step.
    pub mean_recursion: bool,
    /// `var(X_{N+1}) ≤ var(X_N) + 3 √(sev_N² + sev_{N+1}²)` at every step.
    pub variance_decay: bool,
    /// Realization-level failures of `X_{N+1} ≤ 2^{−d} Σ_i X_N(τ_{γ_i} ω) + G_N`.
    pub pathwise_violations: usize,
    pub realizations: usize,
    pub seed: u64,
}

/// Runs levels `N_0..=max_level` of the cube sequence.
pub fn run_cube_sequence(
    params: &ThermoParams,
    spec: &DisorderSpec,
    interaction: &InteractionSpec,
    statistics: Statistics,
) -> Result<SequenceDiagnostics> {
    params.validate()?;
    spec.validate()?;
    let d = params.cube.dimension;
    let flags = interaction.validate(d)?;
    let tempered = interaction.tempered_constants(d);
    if params.cube.range < tempered.range {
        return Err(Error::config(format!(
            "cube range R_0 = {} below the interaction range {}",
            params.cube.range, tempered.range
        )));
    }
    let family = make_cube_sequence(&params.cube, params.max_level)?;
    let (m, rho) = params.snapped_density()?;
    let shift = interaction.stability_bound + spec.lower_bound_constant();
    let mut notices = Vec::new();
    if (rho - params.density).abs() > 1e-15 {
        notices.push(format!("density snapped from {} to {rho}", params.density));
    }
    if !flags.si {
        notices.push("interaction not flagged stable; X_N ≥ 0 is not guaranteed".into());
    }
    let free = interaction.is_free() && interaction.hardcore_radius().is_none();
    let lt_d = params.cube.base_side.powi(d as i32);

    struct Plan {
        level: u32,
        region: Region,
        translates: Vec<Region>,
        n: usize,
        s: f64,
        correction: Option<f64>,
    }
    let mut plans: Vec<Plan> = Vec::new();
    for level in params.min_level..=params.max_level {
        let lvl = family.level(level).expect("generated");
        let n = (m << ((level - params.min_level) as usize * d)) as usize;
        let region = Region::from_box(&lvl.cube);
        if statistics == Statistics::Fermi && n > region.len() {
            notices.push(format!(
                "level {level} truncated: {n} fermions exceed {} sites",
                region.len()
            ));
            break;
        }
        // interacting levels need a dense sector within the budget
        if !free {
            let dim = sector_dimension(region.len(), n, statistics);
            if dim.is_none_or(|v| v > params.sector_cap as u128) {
                notices.push(format!(
                    "level {level} truncated: sector dimension {} exceeds cap {}",
                    dim.map_or("overflow".to_string(), |v| v.to_string()),
                    params.sector_cap
                ));
                break;
            }
        }
        let correction = lvl.gap.map(|gap| {
            tempered.amplitude
                * rho
                * rho
                * lt_d
                * lt_d
                * 2f64.powi((level as i32 + 2) * d as i32 - 1)
                * (gap as f64).powf(-tempered.decay)
        });
        let translates = if level < params.max_level {
            family
                .translates(level)?
                .iter()
                .map(Region::from_box)
                .collect()
        } else {
            Vec::new()
        };
        plans.push(Plan {
            level,
            region,
            translates,
            n,
            s: params.entropy_density * n as f64,
            correction,
        });
    }
    if plans.is_empty() {
        return Err(Error::sector("no level of the cube sequence is feasible"));
    }
    let last = plans.len() - 1;
    let top = plans[last].region.clone();

    let energy = |region: &Region, field: &PotentialField, n: usize, s: f64| -> Result<f64> {
        if free {
            free_energy_at_entropy(&one_body_spectrum(region, field)?, n, statistics, s)
        } else {
            crate::manybody::energy_at_entropy(&sector_spectrum(region, n, statistics, field, interaction)?, s)
        }
    };
    let scale = |level: u32| 2f64.powi(-(level as i32) * d as i32);

    // per realization: X_N per level, and the translate average per level
    let rows = exec::try_map_indexed(params.realizations, |i| -> Result<(Vec<f64>, Vec<f64>)> {
        let field = sample_potential(spec, &top, params.seed, i as u64)?;
        let mut xs = Vec::with_capacity(plans.len());
        let mut subs = Vec::with_capacity(plans.len());
        for (k, p) in plans.iter().enumerate() {
            let e = energy(&p.region, &field.on_region(&p.region)?, p.n, p.s)?;
            xs.push(scale(p.level) * (e + shift * p.n as f64));
            if k < last {
                let mut acc = 0.0;
                for t in &p.translates {
                    let et = energy(t, &field.on_region(t)?, p.n, p.s)?;
                    acc += scale(p.level) * (et + shift * p.n as f64);
                }
                subs.push(acc / p.translates.len() as f64);
            }
        }
        Ok((xs, subs))
    })?;

    let mut levels = Vec::with_capacity(plans.len());
    for (k, p) in plans.iter().enumerate() {
        let samples: Vec<f64> = rows.iter().map(|(xs, _)| xs[k]).collect();
        levels.push(LevelDiagnostics {
            level: p.level,
            side: family.level(p.level).expect("generated").side,
            sites: p.region.len(),
            particles: p.n,
            entropy: p.s,
            stats: SampleStats::of(&samples),
            correction: if k < last { p.correction } else { None },
            samples,
        });
    }
    let nonnegative = levels.iter().all(|l| l.samples.iter().all(|&x| x >= 0.0));
    let mut mean_recursion = true;
    let mut variance_decay = true;
    let mut pathwise_violations = 0;
    for k in 0..last {
        let (a, b) = (&levels[k].stats, &levels[k + 1].stats);
        let g = levels[k].correction.unwrap_or(0.0);
        if b.mean > a.mean + g + 3.0 * a.se_mean.hypot(b.se_mean) {
            mean_recursion = false;
        }
        if b.variance > a.variance + 3.0 * a.se_variance.hypot(b.se_variance) {
            variance_decay = false;
        }
        pathwise_violations += rows
            .iter()
            .filter(|(xs, subs)| xs[k + 1] > subs[k] + g + INEQUALITY_TOL)
            .count();
    }
    Ok(SequenceDiagnostics {
        requested_density: params.density,
        density: rho,
        statistics,
        levels,
        shift_constant: shift,
        notices,
        nonnegative,
        mean_recursion,
        variance_decay,
        pathwise_violations,
        realizations: params.realizations,
        seed: params.seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoltzmannLimitReport {
    pub sides: Vec<usize>,
    pub particles: usize,
    pub entropy: f64,
    /// Disorder mean of `E_ω(Λ, n, S)/n` per box.
    pub per_particle: Vec<SampleStats>,
    pub strictly_decreasing: bool,
    /// `inf Σ = inf supp V`.
    pub target: f64,
    /// `E(Λ, n_1+n_2, S_1+S_2) ≤ E(Λ, n_1, S_1) + E(Λ, n_2, S_2)`.
    pub subadditivity: CheckTable,
    pub realizations: usize,
    pub seed: u64,
}

/// Splits used for the fixed-box check: `(S_1, S_2)` as log-integers.
const W0_SPLITS: [(usize, usize); 4] = [(1, 1), (2, 1), (2, 3), (4, 1)];

/// Noninteracting Boltzmann particles on growing intervals `[0, L−1]`.
pub fn boltzmann_limit_check(
    spec: &DisorderSpec,
    interaction: &InteractionSpec,
    sides: &[usize],
    n: usize,
    s: f64,
    realizations: usize,
    seed: u64,
) -> Result<BoltzmannLimitReport> {
    spec.validate()?;
    if !interaction.is_free() {
        return Err(Error::config("Boltzmann limit check requires a vanishing interaction"));
    }
    if sides.is_empty() || sides.contains(&0) || n < 2 || realizations == 0 {
        return Err(Error::config("need nonempty sides, n ≥ 2 and at least one realization"));
    }
    let regions: Vec<Region> = sides
        .iter()
        .map(|&l| LatticeBox::interval(0, l as i64 - 1).map(|b| Region::from_box(&b)))
        .collect::<Result<_>>()?;
    let largest = regions
        .iter()
        .max_by_key(|r| r.len())
        .expect("nonempty")
        .clone();
    let stats = Statistics::Boltzmann;
    let (n1, n2) = (n.div_ceil(2), n / 2);
    let rows = exec::try_map_indexed(realizations, |i| -> Result<(Vec<f64>, Vec<CheckRow>)> {
        let field = sample_potential(spec, &largest, seed, i as u64)?;
        let mut per = Vec::with_capacity(regions.len());
        let mut checks = Vec::new();
        for region in &regions {
            let one = one_body_spectrum(region, &field.on_region(region)?)?;
            per.push(free_energy_at_entropy(&one, n, stats, s)? / n as f64);
            for (k1, k2) in W0_SPLITS {
                let (s1, s2) = ((k1 as f64).ln(), (k2 as f64).ln());
                let lhs = free_energy_at_entropy(&one, n1 + n2, stats, s1 + s2)?;
                let rhs = free_energy_at_entropy(&one, n1, stats, s1)? + free_energy_at_entropy(&one, n2, stats, s2)?;
                checks.push(CheckRow {
                    seed_index: i as u64,
                    lhs,
                    rhs,
                    margin: rhs - lhs,
                    pass: lhs <= rhs + INEQUALITY_TOL,
                });
            }
        }
        Ok((per, checks))
    })?;
    let per_particle: Vec<SampleStats> = (0..regions.len())
        .map(|k| SampleStats::of(&rows.iter().map(|(p, _)| p[k]).collect::<Vec<_>>()))
        .collect();
    let strictly_decreasing = per_particle.windows(2).all(|w| w[1].mean < w[0].mean);
    Ok(BoltzmannLimitReport {
        sides: sides.to_vec(),
        particles: n,
        entropy: s,
        per_particle,
        strictly_decreasing,
        target: spec.support().0,
        subadditivity: CheckTable {
            name: "w0_subadditivity".into(),
            rows: rows.into_iter().flat_map(|(_, c)| c).collect(),
        },
        realizations,
        seed,
    })
}

/// Generalized inverse of the IDS at level ρ, with the interval of solutions
/// when the IDS is flat at ρ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FermiEnergy {
    pub energy: f64,
    pub interval: (f64, f64),
}

const LEVEL_TOL: f64 = 1e-12;

/// `E_ρ = inf{E on the grid : N(E) ≥ ρ}`.
pub fn fermi_energy(ids: &EmpiricalIds, rho: f64) -> Result<FermiEnergy> {
    if !(rho > 0.0) {
        return Err(Error::config(format!("density ρ must be positive (got {rho})")));
    }
    let i = ids
        .values
        .iter()
        .position(|&v| v >= rho - LEVEL_TOL)
        .ok_or_else(|| {
            Error::config(format!(
                "no solution: ρ = {rho} exceeds sup N = {}",
                ids.values.last().copied().unwrap_or(0.0)
            ))
        })?;
    let energy = ids.grid[i];
    let mut hi = energy;
    if (ids.values[i] - rho).abs() <= LEVEL_TOL {
        let mut j = i;
        while j + 1 < ids.values.len() && (ids.values[j + 1] - rho).abs() <= LEVEL_TOL {
            j += 1;
        }
        hi = ids.grid[j];
    }
    Ok(FermiEnergy {
        energy,
        interval: (energy, hi),
    })
}

/// `(1/ρ) ∫_{−∞}^{E_ρ} E dN(E)` as a Stieltjes sum over grid cells.
///
/// The mass `N(g_0)` sits at `g_0`; the increment of cell `(g_{i−1}, g_i]`
/// sits at its midpoint. The cell that crosses ρ contributes only the weight
/// still missing, so the total weight is exactly ρ.
pub fn fermion_energy_density(ids: &EmpiricalIds, rho: f64) -> Result<f64> {
    let fermi = fermi_energy(ids, rho)?;
    let mut weight = 0.0;
    let mut integral = 0.0;
    for i in 0..ids.grid.len() {
        let (e, dn) = if i == 0 {
            (ids.grid[0], ids.values[0])
        } else {
            (
                0.5 * (ids.grid[i - 1] + ids.grid[i]),
                ids.values[i] - ids.values[i - 1],
            )
        };
        let take = dn.min(rho - weight);
        if take > 0.0 {
            integral += e * take;
            weight += take;
        }
        if weight >= rho - LEVEL_TOL || ids.grid[i] >= fermi.energy {
            break;
        }
    }
    Ok(integral / rho)
}

/// `(1/n) Σ_{k≤n} E_k(Λ, 1)` for one spectrum.
pub fn fermion_sum_density(spectrum: &Spectrum, n: usize) -> Result<f64> {
    if n == 0 || n > spectrum.len() {
        return Err(Error::sector(format!(
            "no antisymmetric states: {n} fermions on {} sites",
            spectrum.len()
        )));
    }
    Ok(spectrum.values()[..n].iter().sum::<f64>() / n as f64)
}

/// Disorder average of `(1/n) Σ_{k≤n} E_k(Λ, 1)`.
pub fn direct_fermion_density(
    spec: &DisorderSpec,
    b: &LatticeBox,
    n: usize,
    realizations: usize,
    seed: u64,
) -> Result<SampleStats> {
    spec.validate()?;
    let region = Region::from_box(b);
    if n == 0 || n > region.len() {
        return Err(Error::sector(format!(
            "no antisymmetric states: {n} fermions on {} sites",
            region.len()
        )));
    }
    let xs = exec::try_map_indexed(realizations, |i| {
        let field = sample_potential(spec, &region, seed, i as u64)?;
        fermion_sum_density(&one_body_spectrum(&region, &field)?, n)
    })?;
    Ok(SampleStats::of(&xs))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FermionDensityReport {
    pub density: f64,
    pub particles: usize,
    pub fermi_energy: FermiEnergy,
    pub formula: f64,
    pub direct: SampleStats,
    /// `|formula − direct| / direct`.
    pub relative_gap: f64,
    pub grid_points: usize,
    pub sites: usize,
    pub realizations: usize,
    pub seed: u64,
    #[serde(skip)]
    pub ids: EmpiricalIds,
}

/// Formula and direct values of the free-fermion energy density from one
/// set of realizations. The IDS grid spans `[min, max]` of all sampled
/// eigenvalues and `n = round(ρ |Λ|)`.
pub fn fermion_density_report(
    spec: &DisorderSpec,
    b: &LatticeBox,
    rho: f64,
    grid_points: usize,
    realizations: usize,
    seed: u64,
) -> Result<FermionDensityReport> {
    spec.validate()?;
    if realizations == 0 {
        return Err(Error::config("realizations must be positive"));
    }
    let region = Region::from_box(b);
    let volume = region.len();
    let n = (rho * volume as f64).round() as usize;
    if n == 0 || n > volume {
        return Err(Error::config(format!(
            "density ρ = {rho} gives {n} fermions on {volume} sites"
        )));
    }
    let spectra = exec::try_map_indexed(realizations, |i| {
        let field = sample_potential(spec, &region, seed, i as u64)?;
        one_body_spectrum(&region, &field)
    })?;
    let lo = spectra.iter().filter_map(Spectrum::min).fold(f64::INFINITY, f64::min);
    let hi = spectra.iter().filter_map(Spectrum::max).fold(f64::NEG_INFINITY, f64::max);
    let grid = if hi > lo {
        crate::oneparticle::energy_grid(lo, hi, grid_points)?
    } else {
        crate::oneparticle::energy_grid(lo, lo + 1.0, grid_points)?
    };
    let mut totals = vec![0usize; grid.len()];
    for s in &spectra {
        for (t, &e) in totals.iter_mut().zip(&grid) {
            *t += s.count_below(e);
        }
    }
    let ids = EmpiricalIds {
        values: totals
            .iter()
            .map(|&t| t as f64 / (volume * realizations) as f64)
            .collect(),
        grid,
        realizations,
        region_box: b.clone(),
        seed,
    };
    let fermi = fermi_energy(&ids, rho)?;
    let formula = fermion_energy_density(&ids, rho)?;
    let direct = SampleStats::of(
        &spectra
            .iter()
            .map(|s| fermion_sum_density(s, n))
            .collect::<Result<Vec<f64>>>()?,
    );
    Ok(FermionDensityReport {
        density: rho,
        particles: n,
        fermi_energy: fermi,
        formula,
        relative_gap: (formula - direct.mean).abs() / direct.mean.abs(),
        direct,
        grid_points,
        sites: volume,
        realizations,
        seed,
        ids,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylRow {
    pub density: f64,
    pub particles: usize,
    /// Free-model value, which witnesses β ρ^{2/d} with
    /// β = free / ρ^{2/d}.
    pub free_value: f64,
    pub beta: f64,
    pub table: CheckTable,
}

/// Per realization, the disordered fermion density against the free one
/// at the same box and particle number.
pub fn weyl_bound_check(
    spec: &DisorderSpec,
    b: &LatticeBox,
    densities: &[f64],
    realizations: usize,
    seed: u64,
) -> Result<Vec<WeylRow>> {
    spec.validate()?;
    if !spec.is_nonnegative() {
        return Err(Error::config("Weyl bound check needs nonnegative disorder"));
    }
    let region = Region::from_box(b);
    let volume = region.len();
    let d = b.dimension() as f64;
    let free_field = sample_potential(&DisorderSpec::free(), &region, seed, 0)?;
    let free_spectrum = one_body_spectrum(&region, &free_field)?;
    let spectra = exec::try_map_indexed(realizations, |i| {
        let field = sample_potential(spec, &region, seed, i as u64)?;
        one_body_spectrum(&region, &field)
    })?;
    densities
        .iter()
        .map(|&rho| {
            let n = (rho * volume as f64).round() as usize;
            let free_value = fermion_sum_density(&free_spectrum, n)?;
            let rows = spectra
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let v = fermion_sum_density(s, n)?;
                    Ok(CheckRow {
                        seed_index: i as u64,
                        lhs: v,
                        rhs: free_value,
                        margin: v - free_value,
                        pass: v + INEQUALITY_TOL >= free_value,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(WeylRow {
                density: rho,
                particles: n,
                free_value,
                beta: free_value / rho.powf(2.0 / d),
                table: CheckTable {
                    name: format!("weyl_rho_{rho}"),
                    rows,
                },
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WegnerCell {
    pub sites: usize,
    pub interval: (f64, f64),
    /// Mean of `Tr 1_I(H_ω(Λ))`.
    pub estimate: SampleStats,
    /// `estimate / (|Λ| |I|)`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WegnerReport {
    pub cells: Vec<WegnerCell>,
    /// Per interval, `max/min − 1` of the ratio over boxes.
    pub variation: Vec<f64>,
    /// Sup of the ratio over all cells.
    pub constant: f64,
    pub realizations: usize,
    pub seed: u64,
}

/// Eigenvalue counts in `(a, b]` across boxes and intervals.
pub fn wegner_scaling_check(
    spec: &DisorderSpec,
    boxes: &[LatticeBox],
    intervals: &[(f64, f64)],
    realizations: usize,
    seed: u64,
) -> Result<WegnerReport> {
    spec.validate()?;
    if !spec.is_regular() {
        return Err(Error::config("Wegner scaling check needs a regular (uniform) site law"));
    }
    if boxes.is_empty() || intervals.is_empty() || realizations == 0 {
        return Err(Error::config("need boxes, intervals and realizations"));
    }
    if intervals.iter().any(|&(a, b)| !(b >= a)) {
        return Err(Error::config("intervals need a ≤ b"));
    }
    let mut cells = Vec::new();
    for b in boxes {
        let region = Region::from_box(b);
        let counts = exec::try_map_indexed(realizations, |i| {
            let field = sample_potential(spec, &region, seed, i as u64)?;
            let s = one_body_spectrum(&region, &field)?;
            Ok::<_, Error>(
                intervals
                    .iter()
                    .map(|&(lo, hi)| (s.count_below(hi) - s.count_below(lo)) as f64)
                    .collect::<Vec<f64>>(),
            )
        })?;
        for (k, &(lo, hi)) in intervals.iter().enumerate() {
            let stats = SampleStats::of(&counts.iter().map(|c| c[k]).collect::<Vec<_>>());
            let width = hi - lo;
            cells.push(WegnerCell {
                sites: region.len(),
                interval: (lo, hi),
                ratio: if width > 0.0 {
                    stats.mean / (region.len() as f64 * width)
                } else {
                    0.0
                },
                estimate: stats,
            });
        }
    }
    let variation = (0..intervals.len())
        .map(|k| {
            let ratios: Vec<f64> = cells.iter().skip(k).step_by(intervals.len()).map(|c| c.ratio).collect();
            let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            if min > 0.0 {
                max / min - 1.0
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let constant = cells.iter().map(|c| c.ratio).fold(0.0, f64::max);
    Ok(WegnerReport {
        cells,
        variation,
        constant,
        realizations,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PackingRow {
    pub side: usize,
    pub max_particles: usize,
    pub density: f64,
    /// Basis enumeration confirms the maximum (small sides only).
    pub enumerated: Option<bool>,
}

/// Largest hard-core particle number on intervals of the given sides, with
/// basis-enumeration confirmation up to `enumerate_up_to` sites.
pub fn hardcore_packing(sides: &[usize], r0: f64, enumerate_up_to: usize) -> Result<Vec<PackingRow>> {
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::config("hard-core radius must be positive"));
    }
    sides
        .iter()
        .map(|&side| {
            if side == 0 {
                return Err(Error::geometry("side must be positive"));
            }
            let max = max_packing_line(side, r0);
            let enumerated = if side <= enumerate_up_to {
                let region = Region::from_box(&LatticeBox::interval(0, side as i64 - 1)?);
                let at_max = enumerate_basis(&region, max, Statistics::Fermi, Some(r0)).is_ok();
                let above = max + 1 > side
                    || matches!(
                        enumerate_basis(&region, max + 1, Statistics::Fermi, Some(r0)),
                        Err(Error::Sector(_))
                    );
                Some(at_max && above)
            } else {
                None
            };
            Ok(PackingRow {
                side,
                max_particles: max,
                density: max as f64 / side as f64,
                enumerated,
            })
        })
        .collect()
}

/// Free many-body levels of a sector, exposed for tabulating `(E, S)`.
pub fn free_sector_levels(
    spec: &DisorderSpec,
    b: &LatticeBox,
    n: usize,
    statistics: Statistics,
    count: usize,
    seed: u64,
    index: u64,
) -> Result<Vec<f64>> {
    let region = Region::from_box(b);
    let field = sample_potential(spec, &region, seed, index)?;
    free_levels(one_body_spectrum(&region, &field)?.values(), n, statistics, count)
}
