use nalgebra::DMatrix;

use crate::disorder::PotentialField;
use crate::eigen::{dense_eigen, dense_spectrum, EigenPairs, Spectrum};
use crate::error::{Error, Result};
use crate::lattice::Region;

use super::basis::{BasisSet, Statistics};
use super::interaction::{ClassFlags, InteractionSpec};

/// Largest sector assembled as a dense matrix.
pub const MAX_DENSE_DIMENSION: usize = 6000;

/// `H_{ω,♯}(Λ, n) = Σ_i H_ω^{(i)} + W_n` restricted to a statistics sector.
#[derive(Clone, Debug)]
pub struct ManyBodyOperator {
    basis: BasisSet,
    matrix: DMatrix<f64>,
    interaction: InteractionSpec,
    flags: ClassFlags,
    seed: u64,
    index: u64,
}

impl ManyBodyOperator {
    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn interaction(&self) -> &InteractionSpec {
        &self.interaction
    }

    pub fn flags(&self) -> ClassFlags {
        self.flags
    }

    /// Realization key of the underlying field.
    pub fn realization(&self) -> (u64, u64) {
        (self.seed, self.index)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// One-body data on the region: diagonal `2d + V` and neighbour lists.
struct OneBodyTables {
    diagonal: Vec<f64>,
    neighbours: Vec<Vec<usize>>,
}

fn one_body_tables(region: &Region, field: &PotentialField) -> Result<OneBodyTables> {
    if field.region() != region {
        return Err(Error::geometry(
            "potential field and basis live on different regions",
        ));
    }
    let two_d = 2.0 * region.dimension() as f64;
    let diagonal = field.values().iter().map(|v| two_d + v).collect();
    let mut neighbours = vec![Vec::new(); region.len()];
    for (i, j) in region.edges() {
        neighbours[i].push(j);
        neighbours[j].push(i);
    }
    Ok(OneBodyTables { diagonal, neighbours })
}

/// Assembles the sector matrix.
///
/// Boltzmann tuples hop one particle at a time with amplitude −1. Bose
/// occupation states move one boson from site s to t with amplitude
/// `−√(m_s (m_t + 1))`. Fermi configurations `c†_{i_1} ⋯ c†_{i_n}|0⟩` with
/// `i_1 < ⋯ < i_n` hop with `−(−1)^k`, where k counts occupied sites strictly
/// between s and t. Hops into excluded (hard-core) configurations are dropped.
pub fn assemble_many_body(
    basis: &BasisSet,
    field: &PotentialField,
    interaction: &InteractionSpec,
) -> Result<ManyBodyOperator> {
    let region = basis.region();
    let flags = interaction.validate(region.dimension())?;
    match (interaction.hardcore_radius(), basis.hardcore()) {
        (Some(a), Some(b)) if a == b => {}
        (None, None) => {}
        (Some(a), _) => {
            return Err(Error::config(format!(
                "hard-core interaction of radius {a} needs a basis excluding that radius"
            )))
        }
        (None, Some(b)) => {
            return Err(Error::config(format!(
                "basis excludes radius {b} but the interaction has no hard core"
            )))
        }
    }
    let dim = basis.len();
    if dim > MAX_DENSE_DIMENSION {
        return Err(Error::sector(format!(
            "sector dimension {dim} exceeds the dense limit {MAX_DENSE_DIMENSION}"
        )));
    }
    let tables = one_body_tables(region, field)?;
    let sites = region.sites();
    let mut matrix = DMatrix::<f64>::zeros(dim, dim);
    let mut scratch: Vec<u32> = Vec::with_capacity(basis.particles());

    for (a, config) in basis.configs().iter().enumerate() {
        let positions: Vec<&[i64]> = config.iter().map(|&s| sites[s as usize].as_slice()).collect();
        let w = interaction.total(&positions).ok_or_else(|| {
            Error::config("basis contains a configuration the interaction excludes")
        })?;
        let kinetic: f64 = config.iter().map(|&s| tables.diagonal[s as usize]).sum();
        matrix[(a, a)] = kinetic + w;

        match basis.statistics() {
            Statistics::Boltzmann => {
                for p in 0..config.len() {
                    for &t in &tables.neighbours[config[p] as usize] {
                        scratch.clear();
                        scratch.extend_from_slice(config);
                        scratch[p] = t as u32;
                        if let Some(b) = basis.index_of(&scratch) {
                            matrix[(b, a)] -= 1.0;
                        }
                    }
                }
            }
            Statistics::Fermi => {
                for p in 0..config.len() {
                    let s = config[p];
                    for &t in &tables.neighbours[s as usize] {
                        let t = t as u32;
                        if config.binary_search(&t).is_ok() {
                            continue;
                        }
                        let (lo, hi) = (s.min(t), s.max(t));
                        let between = config.iter().filter(|&&c| c > lo && c < hi).count();
                        scratch.clear();
                        scratch.extend(config.iter().copied().filter(|&c| c != s));
                        let at = scratch.partition_point(|&c| c < t);
                        scratch.insert(at, t);
                        if let Some(b) = basis.index_of(&scratch) {
                            let sign = if between % 2 == 0 { 1.0 } else { -1.0 };
                            matrix[(b, a)] -= sign;
                        }
                    }
                }
            }
            Statistics::Bose => {
                let mut p = 0;
                while p < config.len() {
                    let s = config[p];
                    let m_s = config[p..].iter().take_while(|&&c| c == s).count();
                    for &t in &tables.neighbours[s as usize] {
                        let t = t as u32;
                        let m_t = config.iter().filter(|&&c| c == t).count();
                        scratch.clear();
                        scratch.extend_from_slice(config);
                        scratch.remove(p);
                        let at = scratch.partition_point(|&c| c <= t);
                        scratch.insert(at, t);
                        if let Some(b) = basis.index_of(&scratch) {
                            matrix[(b, a)] -= ((m_s * (m_t + 1)) as f64).sqrt();
                        }
                    }
                    p += m_s;
                }
            }
        }
    }
    Ok(ManyBodyOperator {
        basis: basis.clone(),
        matrix,
        interaction: interaction.clone(),
        flags,
        seed: field.seed(),
        index: field.index(),
    })
}

pub fn many_body_spectrum(op: &ManyBodyOperator) -> Result<Spectrum> {
    dense_spectrum(op.matrix())
}

pub fn many_body_eigenpairs(op: &ManyBodyOperator) -> Result<EigenPairs> {
    dense_eigen(op.matrix())
}

/// Smallest eigenvalue 𝔈.
pub fn ground_state_energy(op: &ManyBodyOperator) -> Result<f64> {
    if op.dim() == 0 {
        return Err(Error::sector("ground state energy of an empty sector"));
    }
    Ok(many_body_spectrum(op)?.values()[0])
}

/// `⟨Hψ, ψ⟩ / ‖ψ‖²`.
pub fn rayleigh_quotient(op: &ManyBodyOperator, psi: &[f64]) -> Result<f64> {
    if psi.len() != op.dim() {
        return Err(Error::config("vector length differs from sector dimension"));
    }
    let v = nalgebra::DVector::from_column_slice(psi);
    let norm2 = v.norm_squared();
    if norm2 == 0.0 {
        return Err(Error::config("Rayleigh quotient of the zero vector"));
    }
    Ok((op.matrix() * &v).dot(&v) / norm2)
}
