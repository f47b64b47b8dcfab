//! I.i.d. site potentials drawn from a counter-based generator.
//!
//! The value at site `x` of realization `(seed, index)` is a pure function of
//! `(seed, index, x)`: a ChaCha8 stream keyed by `(seed, index)` and selected
//! by an injective encoding of the coordinates. Sampling order and thread
//! scheduling therefore never change a field, and translating a realization
//! is the same as reading the generator at shifted coordinates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Region;

/// Law of the single-site potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DisorderSpec {
    Uniform { low: f64, high: f64 },
    /// `v1` with probability `p`, `v0` otherwise.
    Bernoulli { p: f64, v0: f64, v1: f64 },
    Constant { value: f64 },
}

impl DisorderSpec {
    pub fn free() -> Self {
        DisorderSpec::Constant { value: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            DisorderSpec::Uniform { low, high } => {
                if !finite(&[low, high]) {
                    return Err(Error::config("uniform disorder bounds must be finite"));
                }
                if !(low < high) {
                    return Err(Error::config(format!(
                        "uniform disorder requires low < high (got {low}, {high})"
                    )));
                }
            }
            DisorderSpec::Bernoulli { p, v0, v1 } => {
                if !finite(&[v0, v1]) {
                    return Err(Error::config("bernoulli disorder values must be finite"));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::config(format!(
                        "bernoulli disorder requires 0 <= p <= 1 (got {p})"
                    )));
                }
            }
            DisorderSpec::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::config("constant disorder value must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Closed interval containing the support.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            DisorderSpec::Uniform { low, high } => (low, high),
            DisorderSpec::Bernoulli { p, v0, v1 } => {
                if p == 0.0 {
                    (v0, v0)
                } else if p == 1.0 {
                    (v1, v1)
                } else {
                    (v0.min(v1), v0.max(v1))
                }
            }
            DisorderSpec::Constant { value } => (value, value),
        }
    }

    /// The constant C of the lower bound `H_ω ≥ −C`, i.e. `−inf supp V`.
    pub fn lower_bound_constant(&self) -> f64 {
        -self.support().0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.support().0 >= 0.0
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DisorderSpec::Uniform { low, high } => 0.5 * (low + high),
            DisorderSpec::Bernoulli { p, v0, v1 } => (1.0 - p) * v0 + p * v1,
            DisorderSpec::Constant { value } => value,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            DisorderSpec::Uniform { low, high } => (high - low).powi(2) / 12.0,
            DisorderSpec::Bernoulli { p, v0, v1 } => p * (1.0 - p) * (v1 - v0).powi(2),
            DisorderSpec::Constant { .. } => 0.0,
        }
    }

    /// Whether the law has a bounded density (needed for Wegner-type estimates).
    pub fn is_regular(&self) -> bool {
        matches!(self, DisorderSpec::Uniform { .. })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            DisorderSpec::Uniform { low, high } => {
                let u: f64 = rng.random();
                low + (high - low) * u
            }
            DisorderSpec::Bernoulli { p, v0, v1 } => {
                let u: f64 = rng.random();
                if u < p {
                    v1
                } else {
                    v0
                }
            }
            DisorderSpec::Constant { value } => value,
        }
    }
}

/// Keyed generator for one realization.
#[derive(Clone, Debug)]
pub struct SiteStream {
    base: ChaCha8Rng,
}

impl SiteStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&index.to_le_bytes());
        key[16..24].copy_from_slice(b"V_omega!");
        SiteStream {
            base: ChaCha8Rng::from_seed(key),
        }
    }

    /// Generator positioned at the start of the stream owned by site `x`.
    pub fn at(&self, x: &[i64]) -> Result<ChaCha8Rng> {
        let mut rng = self.base.clone();
        rng.set_stream(encode_site(x)?);
        rng.set_word_pos(0);
        Ok(rng)
    }
}

/// Injective packing of a coordinate vector into 63 bits via zigzag codes of
/// `63 / d` bits each.
pub fn encode_site(x: &[i64]) -> Result<u64> {
    let d = x.len();
    if d == 0 || d > 63 {
        return Err(Error::geometry(format!("cannot key sites of dimension {d}")));
    }
    let bits = 63 / d;
    let mut code = 0u64;
    for &xi in x {
        let z = ((xi << 1) ^ (xi >> 63)) as u64;
        if z >> bits != 0 {
            return Err(Error::geometry(format!(
                "coordinate {xi} exceeds the {bits}-bit keying range for dimension {d}"
            )));
        }
        code = (code << bits) | z;
    }
    Ok(code)
}

/// One realization V_ω restricted to a region.
#[derive(Clone, Debug)]
pub struct PotentialField {
    spec: DisorderSpec,
    region: Region,
    values: Vec<f64>,
    seed: u64,
    index: u64,
    shift: Vec<i64>,
}

impl PartialEq for PotentialField {
    fn eq(&self, other: &Self) -> bool {
        self.region == other.region
            && self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl PotentialField {
    pub fn spec(&self) -> &DisorderSpec {
        &self.spec
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Accumulated translation γ: `value(x) = V_ω(x + γ)`.
    pub fn shift(&self) -> &[i64] {
        &self.shift
    }

    pub fn value_at(&self, x: &[i64]) -> Option<f64> {
        self.region.index_of(x).map(|i| self.values[i])
    }

    /// Same realization read on another region.
    pub fn on_region(&self, region: &Region) -> Result<PotentialField> {
        realize(&self.spec, region, self.seed, self.index, &self.shift)
    }
}

fn realize(
    spec: &DisorderSpec,
    region: &Region,
    seed: u64,
    index: u64,
    shift: &[i64],
) -> Result<PotentialField> {
    if shift.len() != region.dimension() {
        return Err(Error::config("translation dimension differs from region dimension"));
    }
    let stream = SiteStream::new(seed, index);
    let mut y = vec![0i64; shift.len()];
    let values = region
        .sites()
        .iter()
        .map(|x| {
            for k in 0..y.len() {
                y[k] = x[k] + shift[k];
            }
            let mut rng = stream.at(&y)?;
            Ok(spec.draw(&mut rng))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(PotentialField {
        spec: spec.clone(),
        region: region.clone(),
        values,
        seed,
        index,
        shift: shift.to_vec(),
    })
}

/// Draws realization `index` of the i.i.d. field keyed by `master_seed`.
pub fn sample_potential(
    spec: &DisorderSpec,
    region: &Region,
    master_seed: u64,
    index: u64,
) -> Result<PotentialField> {
    spec.validate()?;
    realize(spec, region, master_seed, index, &vec![0; region.dimension()])
}

/// `V_{τ_γ ω}(x) = V_ω(x + γ)` on the same region.
pub fn translate_realization(field: &PotentialField, gamma: &[i64]) -> Result<PotentialField> {
    if gamma.len() != field.shift.len() {
        return Err(Error::config("translation dimension differs from field dimension"));
    }
    let shift: Vec<i64> = field.shift.iter().zip(gamma).map(|(a, b)| a + b).collect();
    realize(&field.spec, &field.region, field.seed, field.index, &shift)
}
