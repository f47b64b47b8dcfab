//! One-particle Anderson operator `−Δ + V_ω` with Dirichlet restriction to a
//! region, its spectrum, counting function and the disorder-averaged
//! pre-limit integrated density of states.

use nalgebra::DMatrix;

use crate::disorder::{sample_potential, DisorderSpec, PotentialField};
use crate::eigen::{dense_eigen, dense_spectrum, tridiagonal_spectrum, EigenPairs, Spectrum};
use crate::error::{Error, Result};
use crate::exec;
use crate::lattice::{LatticeBox, Region};

/// `H = 2d·I − A + V` on a region, where `A` is the adjacency of lattice
/// neighbours inside the region. Couplings to exterior sites are dropped and
/// the diagonal keeps its full `2d`.
#[derive(Clone, Debug)]
pub struct OneBodyOperator {
    region: Region,
    diagonal: Vec<f64>,
    edges: Vec<(usize, usize)>,
}

impl OneBodyOperator {
    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Neighbour pairs `(i, j)`, `i < j`, each carrying the entry −1.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diagonal));
        for &(i, j) in &self.edges {
            m[(i, j)] = -1.0;
            m[(j, i)] = -1.0;
        }
        debug_assert_eq!(m.nrows(), n);
        m
    }

    /// Off-diagonal of the matrix when it is tridiagonal in site order.
    pub fn tridiagonal_off(&self) -> Option<Vec<f64>> {
        let n = self.dim();
        let mut off = vec![0.0; n.saturating_sub(1)];
        for &(i, j) in &self.edges {
            if j != i + 1 {
                return None;
            }
            off[i] = -1.0;
        }
        Some(off)
    }

    /// `H x` for a vector in the site basis.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.diagonal.iter().zip(x).map(|(d, v)| d * v).collect();
        for &(i, j) in &self.edges {
            y[i] -= x[j];
            y[j] -= x[i];
        }
        y
    }
}

/// Assembles the Dirichlet one-body operator of `field` on its region.
pub fn assemble_one_body(region: &Region, field: &PotentialField) -> Result<OneBodyOperator> {
    if field.region() != region {
        return Err(Error::geometry("potential field was sampled on a different region"));
    }
    let two_d = 2.0 * region.dimension() as f64;
    Ok(OneBodyOperator {
        region: region.clone(),
        diagonal: field.values().iter().map(|v| two_d + v).collect(),
        edges: region.edges(),
    })
}

/// Full spectrum; tridiagonal operators take the QL path.
pub fn diagonalize(op: &OneBodyOperator) -> Result<Spectrum> {
    match op.tridiagonal_off() {
        Some(off) => tridiagonal_spectrum(&op.diagonal, &off),
        None => dense_spectrum(&op.to_dense()),
    }
}

/// Eigenpairs through the dense solver.
pub fn eigenpairs(op: &OneBodyOperator) -> Result<EigenPairs> {
    dense_eigen(&op.to_dense())
}

/// 𝒩(E): eigenvalues at or below `energy`, multiplicity counted.
pub fn counting_function(spectrum: &Spectrum, energy: f64) -> usize {
    spectrum.count_below(energy)
}

/// Samples realization `index` and returns its one-body spectrum on `region`.
pub fn realization_spectrum(
    spec: &DisorderSpec,
    region: &Region,
    seed: u64,
    index: u64,
) -> Result<Spectrum> {
    let field = sample_potential(spec, region, seed, index)?;
    diagonalize(&assemble_one_body(region, &field)?)
}

/// Disorder average of `𝒩_ω(E, Λ, 1) / |Λ|` on an energy grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalIds {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub realizations: usize,
    pub region_box: LatticeBox,
    pub seed: u64,
}

impl EmpiricalIds {
    pub fn site_count(&self) -> usize {
        self.region_box.site_count()
    }

    /// Side label for tabular output, e.g. `2000` or `10x10`.
    pub fn side_label(&self) -> String {
        let sides: Vec<String> = self.region_box.sides().iter().map(|s| s.to_string()).collect();
        sides.join("x")
    }
}

/// Evenly spaced grid with `points` entries over `[lo, hi]`.
pub fn energy_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(hi > lo) {
        return Err(Error::config(format!(
            "energy grid needs at least two points over a nonempty range (got {points} on [{lo}, {hi}])"
        )));
    }
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { hi } else { lo + step * i as f64 })
        .collect())
}

/// Range guaranteed to contain every one-body eigenvalue: `[a, 4d + b]` for
/// potentials supported in `[a, b]`.
pub fn spectral_bounds(spec: &DisorderSpec, dimension: usize) -> (f64, f64) {
    let (a, b) = spec.support();
    (a, 4.0 * dimension as f64 + b)
}

pub fn empirical_ids(
    spec: &DisorderSpec,
    b: &LatticeBox,
    grid: &[f64],
    realizations: usize,
    seed: u64,
) -> Result<EmpiricalIds> {
    spec.validate()?;
    if realizations == 0 {
        return Err(Error::config("empirical IDS needs at least one realization"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config("energy grid must be strictly increasing"));
    }
    let region = Region::from_box(b);
    let volume = region.len() as f64;
    let per_realization = exec::try_map_indexed(realizations, |m| {
        let s = realization_spectrum(spec, &region, seed, m as u64)?;
        Ok::<_, Error>(grid.iter().map(|&e| s.count_below(e)).collect::<Vec<usize>>())
    })?;
    let mut totals = vec![0usize; grid.len()];
    for counts in &per_realization {
        for (t, c) in totals.iter_mut().zip(counts) {
            *t += c;
        }
    }
    let values = totals
        .iter()
        .map(|&t| t as f64 / (volume * realizations as f64))
        .collect();
    Ok(EmpiricalIds {
        grid: grid.to_vec(),
        values,
        realizations,
        region_box: b.clone(),
        seed,
    })
}

/// Mean of `E_k(Λ, 1)` along nested boxes.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundLevelTrend {
    pub level: usize,
    pub boxes: Vec<LatticeBox>,
    pub means: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Realizations in which `E_k` increased from a box to a larger one.
    pub monotonicity_violations: usize,
    pub realizations: usize,
    pub seed: u64,
}

pub fn ground_level_trend(
    spec: &DisorderSpec,
    boxes: &[LatticeBox],
    k: usize,
    realizations: usize,
    seed: u64,
) -> Result<GroundLevelTrend> {
    spec.validate()?;
    if boxes.is_empty() || realizations == 0 {
        return Err(Error::config("trend needs at least one box and one realization"));
    }
    for w in boxes.windows(2) {
        if !w[0].is_subset_of(&w[1]) {
            return Err(Error::geometry(format!("boxes {} and {} are not nested", w[0], w[1])));
        }
    }
    let smallest = boxes[0].site_count();
    if k == 0 || k > smallest {
        return Err(Error::config(format!(
            "level k = {k} outside 1..={smallest} of the smallest box"
        )));
    }
    let regions: Vec<Region> = boxes.iter().map(Region::from_box).collect();
    let rows = exec::try_map_indexed(realizations, |m| {
        regions
            .iter()
            .map(|r| {
                let s = realization_spectrum(spec, r, seed, m as u64)?;
                Ok(s.level(k).expect("k checked against smallest box"))
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    let violations = rows
        .iter()
        .filter(|row| row.windows(2).any(|w| w[1] > w[0] + crate::eigen::COUNT_TOL))
        .count();
    let (means, std_errors) = column_stats(&rows, boxes.len());
    Ok(GroundLevelTrend {
        level: k,
        boxes: boxes.to_vec(),
        means,
        std_errors,
        monotonicity_violations: violations,
        realizations,
        seed,
    })
}

/// Column means and standard errors of the mean.
pub(crate) fn column_stats(rows: &[Vec<f64>], columns: usize) -> (Vec<f64>, Vec<f64>) {
    let m = rows.len() as f64;
    let mut means = vec![0.0; columns];
    for row in rows {
        for (acc, v) in means.iter_mut().zip(row) {
            *acc += v;
        }
    }
    means.iter_mut().for_each(|x| *x /= m);
    let ses = (0..columns)
        .map(|c| {
            if rows.len() < 2 {
                return 0.0;
            }
            let var = rows.iter().map(|r| (r[c] - means[c]).powi(2)).sum::<f64>() / (m - 1.0);
            (var / m).sqrt()
        })
        .collect();
    (means, ses)
}
