use crate::eigen::Spectrum;
use crate::error::{Error, Result};

/// Relative distance of `e^S` to an integer below which no rounding up is
/// applied.
pub const LOG_INTEGER_TOL: f64 = 1e-9;

/// `S(E) = log 𝒩(E)`, or −∞ when no level lies at or below `E`.
pub fn entropy(spectrum: &Spectrum, energy: f64) -> f64 {
    match spectrum.count_below(energy) {
        0 => f64::NEG_INFINITY,
        n => (n as f64).ln(),
    }
}

/// `k = e^{S*}` with `S* = inf{Q ≥ S : e^Q ∈ ℕ}`: 1 for `S ≤ 0`, otherwise
/// `⌈e^S⌉`, except that `e^S` within the tolerance of an integer is that
/// integer.
pub fn entropy_rank(s: f64) -> usize {
    if s.is_nan() || s <= 0.0 {
        return 1;
    }
    let x = s.exp();
    if !x.is_finite() || x >= usize::MAX as f64 {
        return usize::MAX;
    }
    let nearest = x.round();
    if (x - nearest).abs() <= LOG_INTEGER_TOL * x {
        nearest as usize
    } else {
        x.ceil() as usize
    }
}

/// `S* = log k` for the rank of [`entropy_rank`].
pub fn rounded_entropy(s: f64) -> f64 {
    (entropy_rank(s) as f64).ln()
}

/// `E(S) = E_{e^{S*}}`, the right inverse of the entropy.
pub fn energy_at_entropy(spectrum: &Spectrum, s: f64) -> Result<f64> {
    let k = entropy_rank(s);
    spectrum.level(k).ok_or_else(|| {
        Error::sector(format!(
            "sector exhausted: entropy {s} asks for level {k} of {}",
            spectrum.len()
        ))
    })
}
