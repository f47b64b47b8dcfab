use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::dist2;

/// Pair potential `U(x)`, a function of `|x|` only (hence symmetric).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InteractionKind {
    None,
    /// `U(x) = A |x|^{−λ}` for `|x| ≥ R_0`. Inside the range, `near_field`
    /// if given, otherwise the capped value `A R_0^{−λ}`; `U(0)` is always
    /// the capped value.
    TemperedPower {
        amplitude: f64,
        decay: f64,
        range: f64,
        #[serde(default)]
        near_field: Option<f64>,
    },
    /// `U(x) = Q e^{−|x|/s} / |x|`, with `U(0) = Q e^{−1/s}`.
    Yukawa { charge: f64, screening: f64 },
    /// `U(x) = values[⌊|x|⌋]` for `|x| < range`, zero beyond.
    Compact { range: f64, values: Vec<f64> },
    /// Configurations with a pair closer than `radius` are excluded from the
    /// basis; optional tail `A |x|^{−λ}` beyond.
    HardCore {
        radius: f64,
        #[serde(default)]
        tail: Option<Tail>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tail {
    pub amplitude: f64,
    pub decay: f64,
}

/// Class flags: pair interaction, tempered, repulsive, stable, compact
/// support.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFlags {
    #[serde(default)]
    pub pi: bool,
    #[serde(default)]
    pub pti: bool,
    #[serde(default)]
    pub rep: bool,
    #[serde(default)]
    pub si: bool,
    #[serde(default)]
    pub comp: bool,
}

/// Constants `(A, λ, R_0)` with `|U(x)| ≤ A |x|^{−λ}` for `|x| ≥ R_0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperedConstants {
    pub amplitude: f64,
    pub decay: f64,
    pub range: f64,
}

impl TemperedConstants {
    /// `A r^{−λ}`, the cross term for two groups at distance `r`, per pair.
    pub fn tail(&self, r: f64) -> f64 {
        if self.amplitude == 0.0 {
            0.0
        } else {
            self.amplitude * r.powf(-self.decay)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionSpec {
    pub kind: InteractionKind,
    /// Declared B in `W_n ≥ −nB`.
    #[serde(default)]
    pub stability_bound: f64,
    /// Declared flags; when absent, the flags the kind satisfies by
    /// construction.
    #[serde(default)]
    pub flags: Option<ClassFlags>,
}

const RELATIVE_SLACK: f64 = 1e-12;

impl InteractionSpec {
    pub fn new(kind: InteractionKind) -> Self {
        InteractionSpec {
            kind,
            stability_bound: 0.0,
            flags: None,
        }
    }

    pub fn none() -> Self {
        InteractionSpec::new(InteractionKind::None)
    }

    pub fn tempered(amplitude: f64, decay: f64, range: f64) -> Self {
        InteractionSpec::new(InteractionKind::TemperedPower {
            amplitude,
            decay,
            range,
            near_field: None,
        })
    }

    pub fn hard_core(radius: f64) -> Self {
        InteractionSpec::new(InteractionKind::HardCore { radius, tail: None })
    }

    pub fn is_free(&self) -> bool {
        match &self.kind {
            InteractionKind::None => true,
            InteractionKind::TemperedPower { amplitude, near_field, .. } => {
                *amplitude == 0.0 && near_field.is_none_or(|v| v == 0.0)
            }
            InteractionKind::Yukawa { charge, .. } => *charge == 0.0,
            InteractionKind::Compact { values, .. } => values.iter().all(|&v| v == 0.0),
            InteractionKind::HardCore { .. } => false,
        }
    }

    /// Exclusion radius of the hard-core kind.
    pub fn hardcore_radius(&self) -> Option<f64> {
        match &self.kind {
            InteractionKind::HardCore { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    /// `U` at Euclidean distance `r`; `None` inside a hard core.
    pub fn pair_at(&self, r: f64) -> Option<f64> {
        Some(match &self.kind {
            InteractionKind::None => 0.0,
            InteractionKind::TemperedPower {
                amplitude,
                decay,
                range,
                near_field,
            } => {
                let cap = amplitude * range.powf(-decay);
                if r >= *range {
                    amplitude * r.powf(-decay)
                } else if r == 0.0 {
                    cap
                } else {
                    near_field.unwrap_or(cap)
                }
            }
            InteractionKind::Yukawa { charge, screening } => {
                let r = r.max(1.0);
                charge * (-r / screening).exp() / r
            }
            InteractionKind::Compact { range, values } => {
                if r < *range {
                    values.get(r.floor() as usize).copied().unwrap_or(0.0)
                } else {
                    0.0
                }
            }
            InteractionKind::HardCore { radius, tail } => {
                if r < *radius {
                    return None;
                }
                tail.map_or(0.0, |t| t.amplitude * r.powf(-t.decay))
            }
        })
    }

    /// `U(x − y)` for two sites.
    pub fn pair(&self, x: &[i64], y: &[i64]) -> Option<f64> {
        self.pair_at((dist2(x, y) as f64).sqrt())
    }

    /// `W_n = Σ_{i<j} U(x^i − x^j)`; `None` if the configuration is excluded.
    pub fn total<S: AsRef<[i64]>>(&self, positions: &[S]) -> Option<f64> {
        let mut w = 0.0;
        for (i, x) in positions.iter().enumerate() {
            for y in &positions[i + 1..] {
                w += self.pair(x.as_ref(), y.as_ref())?;
            }
        }
        Some(w)
    }

    /// Tempered constants of the kind in dimension `d`. Kinds without an
    /// explicit decay use `λ = d + 1`.
    pub fn tempered_constants(&self, dimension: usize) -> TemperedConstants {
        let default_decay = dimension as f64 + 1.0;
        match &self.kind {
            InteractionKind::None => TemperedConstants {
                amplitude: 0.0,
                decay: default_decay,
                range: 0.0,
            },
            InteractionKind::TemperedPower {
                amplitude, decay, range, ..
            } => TemperedConstants {
                amplitude: amplitude.abs(),
                decay: *decay,
                range: *range,
            },
            InteractionKind::Yukawa { charge, screening } => {
                // sup_{r ≥ 1} r^{λ−1} e^{−r/s} sits at r = (λ − 1) s
                let peak = ((default_decay - 1.0) * screening).max(1.0);
                TemperedConstants {
                    amplitude: charge.abs() * peak.powf(default_decay - 1.0) * (-peak / screening).exp(),
                    decay: default_decay,
                    range: 1.0,
                }
            }
            InteractionKind::Compact { range, .. } => TemperedConstants {
                amplitude: 0.0,
                decay: default_decay,
                range: *range,
            },
            InteractionKind::HardCore { radius, tail } => match tail {
                Some(t) => TemperedConstants {
                    amplitude: t.amplitude.abs(),
                    decay: t.decay,
                    range: *radius,
                },
                None => TemperedConstants {
                    amplitude: 0.0,
                    decay: default_decay,
                    range: *radius,
                },
            },
        }
    }

    /// Support radius `R_0` for compactly supported kinds.
    pub fn compact_range(&self) -> Option<f64> {
        match &self.kind {
            InteractionKind::None => Some(0.0),
            InteractionKind::Compact { range, .. } => Some(*range),
            InteractionKind::HardCore { radius, tail: None } => Some(*radius),
            _ => None,
        }
    }

    fn parameter_check(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::config(format!("interaction: {what}")));
        match &self.kind {
            InteractionKind::None => {}
            InteractionKind::TemperedPower {
                amplitude,
                decay,
                range,
                near_field,
            } => {
                if !amplitude.is_finite() || !decay.is_finite() || *decay <= 0.0 {
                    return bad("tempered power needs finite A and λ > 0");
                }
                if !(*range > 0.0) || !range.is_finite() {
                    return bad("tempered power needs R_0 > 0");
                }
                if near_field.is_some_and(|v| !v.is_finite()) {
                    return bad("near-field value must be finite");
                }
            }
            InteractionKind::Yukawa { charge, screening } => {
                if !charge.is_finite() || !(*screening > 0.0) || !screening.is_finite() {
                    return bad("yukawa needs finite Q and screening length > 0");
                }
            }
            InteractionKind::Compact { range, values } => {
                if !(*range > 0.0) || !range.is_finite() {
                    return bad("compact kind needs range > 0");
                }
                if (values.len() as f64) < range.ceil() {
                    return bad("compact table shorter than its range");
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("compact table entries must be finite");
                }
            }
            InteractionKind::HardCore { radius, tail } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return bad("hard-core radius must be positive");
                }
                if let Some(t) = tail {
                    if !t.amplitude.is_finite() || !(t.decay > 0.0) {
                        return bad("hard-core tail needs finite A and λ > 0");
                    }
                }
            }
        }
        if !(self.stability_bound >= 0.0) || !self.stability_bound.is_finite() {
            return bad("stability constant B must be finite and nonnegative");
        }
        Ok(())
    }

    /// Flags in force: the declared ones, or those derived for dimension `d`.
    pub fn effective_flags(&self, dimension: usize) -> ClassFlags {
        self.flags.unwrap_or_else(|| self.derived_flags(dimension))
    }

    /// Flags that hold on the sampled checks for dimension `d`.
    pub fn derived_flags(&self, dimension: usize) -> ClassFlags {
        ClassFlags {
            pi: true,
            pti: self.check_tempered(dimension).is_ok(),
            rep: self.check_repulsive(dimension).is_ok(),
            si: self.check_stable(dimension).is_ok(),
            comp: self.check_compact(dimension).is_ok(),
        }
    }

    /// Parameter domain plus every declared flag on sampled vectors and
    /// configurations.
    pub fn validate(&self, dimension: usize) -> Result<ClassFlags> {
        self.parameter_check()?;
        let flags = self.effective_flags(dimension);
        let incompatible = |flag: &str, why: String| {
            Err(Error::config(format!(
                "interaction kind incompatible with flags: {flag} fails ({why})"
            )))
        };
        if !flags.pi {
            return incompatible("PI", "every catalog kind is a translation invariant pair potential; PI must be set".into());
        }
        if flags.pti {
            if let Err(why) = self.check_tempered(dimension) {
                return incompatible("PTI", why);
            }
        }
        if flags.rep {
            if let Err(why) = self.check_repulsive(dimension) {
                return incompatible("Rep", why);
            }
        }
        if flags.si {
            if let Err(why) = self.check_stable(dimension) {
                return incompatible("SI", why);
            }
        }
        if flags.comp {
            if let Err(why) = self.check_compact(dimension) {
                return incompatible("Comp", why);
            }
        }
        Ok(flags)
    }

    fn check_tempered(&self, dimension: usize) -> std::result::Result<(), String> {
        let c = self.tempered_constants(dimension);
        if c.amplitude > 0.0 && !(c.decay > dimension as f64) {
            return Err(format!("decay λ = {} must exceed d = {dimension}", c.decay));
        }
        for x in sample_vectors(dimension, c.range) {
            let r = norm(&x);
            if r < c.range || r == 0.0 {
                continue;
            }
            if let Some(u) = self.pair_at(r) {
                let bound = c.tail(r);
                if u.abs() > bound * (1.0 + RELATIVE_SLACK) + f64::MIN_POSITIVE {
                    return Err(format!("|U| = {u} above A|x|^(−λ) = {bound} at |x| = {r}"));
                }
            }
        }
        Ok(())
    }

    fn check_repulsive(&self, dimension: usize) -> std::result::Result<(), String> {
        let range = self.tempered_constants(dimension).range;
        for x in sample_vectors(dimension, range) {
            let r = norm(&x);
            if let Some(u) = self.pair_at(r) {
                if u < 0.0 {
                    return Err(format!("U = {u} < 0 at |x| = {r}"));
                }
            }
        }
        Ok(())
    }

    fn check_stable(&self, dimension: usize) -> std::result::Result<(), String> {
        let b = self.stability_bound;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5151_5eed);
        let half = 4i64;
        for _ in 0..400 {
            let n = rng.random_range(2..=6usize);
            let positions: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..dimension).map(|_| rng.random_range(-half..=half)).collect())
                .collect();
            if let Some(w) = self.total(&positions) {
                let floor = -(n as f64) * b;
                if w < floor - RELATIVE_SLACK * (1.0 + w.abs()) {
                    return Err(format!("W_{n} = {w} below −nB = {floor}"));
                }
            }
        }
        Ok(())
    }

    fn check_compact(&self, dimension: usize) -> std::result::Result<(), String> {
        let Some(range) = self.compact_range() else {
            return Err("kind has no finite support".into());
        };
        for x in sample_vectors(dimension, range) {
            let r = norm(&x);
            if r >= range && self.pair_at(r).is_some_and(|u| u != 0.0) {
                return Err(format!("U nonzero at |x| = {r} ≥ R_0 = {range}"));
            }
        }
        Ok(())
    }
}

fn norm(x: &[i64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<i64>() as f64).sqrt()
}

/// Lattice vectors in `[−K, K]^d` with `K = ⌈R_0⌉ + 8`, capped so the sample
/// stays near 10^4 points.
fn sample_vectors(dimension: usize, range: f64) -> Vec<Vec<i64>> {
    let mut k = (range.ceil().max(0.0) as i64) + 8;
    while ((2 * k + 1) as f64).powi(dimension as i32) > 2.0e4 && k > 1 {
        k -= 1;
    }
    let side = (2 * k + 1) as usize;
    let total = side.pow(dimension as u32);
    (0..total)
        .map(|mut code| {
            (0..dimension)
                .map(|_| {
                    let c = (code % side) as i64 - k;
                    code /= side;
                    c
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capped_tempered_values() {
        let u = InteractionSpec::tempered(1.0, 2.0, 2.0);
        assert_eq!(u.pair_at(0.0), Some(0.25));
        assert_eq!(u.pair_at(1.0), Some(0.25));
        assert_eq!(u.pair_at(4.0), Some(1.0 / 16.0));
        let flags = u.validate(1).unwrap();
        assert!(flags.pti && flags.rep && flags.si && !flags.comp);
    }

    #[test]
    fn tempered_decay_must_exceed_dimension() {
        let mut u = InteractionSpec::tempered(1.0, 2.0, 1.0);
        u.flags = Some(ClassFlags {
            pi: true,
            pti: true,
            ..ClassFlags::default()
        });
        assert!(u.validate(1).is_ok());
        let err = u.validate(2).unwrap_err();
        assert!(err.to_string().contains("incompatible with flags"));
    }

    #[test]
    fn attractive_interaction_is_not_repulsive() {
        let mut u = InteractionSpec::tempered(-1.0, 3.0, 1.0);
        assert!(!u.derived_flags(1).rep);
        u.flags = Some(ClassFlags {
            pi: true,
            rep: true,
            ..ClassFlags::default()
        });
        assert!(u.validate(1).is_err());
        // stability with B large enough to absorb the capped attraction
        u.flags = Some(ClassFlags {
            pi: true,
            si: true,
            ..ClassFlags::default()
        });
        assert!(u.validate(1).is_err());
        u.stability_bound = 5.0;
        assert!(u.validate(1).is_ok());
    }

    #[test]
    fn yukawa_constants_dominate() {
        let u = InteractionSpec::new(InteractionKind::Yukawa {
            charge: 2.0,
            screening: 3.0,
        });
        for d in 1..=3 {
            let f = u.validate(d).unwrap();
            assert!(f.pti && f.rep && !f.comp);
        }
    }

    #[test]
    fn compact_and_hard_core() {
        let c = InteractionSpec::new(InteractionKind::Compact {
            range: 2.0,
            values: vec![3.0, 1.0],
        });
        assert_eq!(c.pair_at(1.0), Some(1.0));
        assert_eq!(c.pair_at(2.0), Some(0.0));
        assert!(c.validate(2).unwrap().comp);

        let h = InteractionSpec::hard_core(2.0);
        assert_eq!(h.pair_at(1.0), None);
        assert_eq!(h.pair_at(2.0), Some(0.0));
        assert_eq!(h.total(&[vec![0i64], vec![3], vec![4]]), None);
        assert_eq!(h.total(&[vec![0i64], vec![2], vec![4]]), Some(0.0));
        assert!(h.validate(1).unwrap().comp);
    }

    #[test]
    fn json_shape() {
        let json = r#"{"kind":{"type":"tempered_power","amplitude":1.0,"decay":2.0,"range":1.0}}"#;
        let u: InteractionSpec = serde_json::from_str(json).unwrap();
        assert_eq!(u, InteractionSpec::tempered(1.0, 2.0, 1.0));
        let bad = r#"{"kind":{"type":"tempered_power","amplitude":1.0,"decay":2.0,"range":1.0,"oops":1}}"#;
        assert!(serde_json::from_str::<InteractionSpec>(bad).is_err());
    }
}
