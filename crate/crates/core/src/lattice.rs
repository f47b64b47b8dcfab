//! Lattice boxes in Z^d, finite site regions built from them, and the
//! doubling cube sequence used for the thermodynamic-limit construction.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer point of Z^d.
pub type Site = Vec<i64>;

/// Squared Euclidean distance between two sites of equal dimension.
pub fn dist2(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Euclidean distance between two sites.
pub fn dist(a: &[i64], b: &[i64]) -> f64 {
    (dist2(a, b) as f64).sqrt()
}

/// Axis-aligned box of lattice sites. `sides` count sites, so a box with
/// corner `c` and side `s` along an axis covers `c, c + 1, ..., c + s - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BoxRepr", into = "BoxRepr")]
pub struct LatticeBox {
    corner: Vec<i64>,
    sides: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxRepr {
    dimension: usize,
    corner: Vec<i64>,
    sides: Vec<usize>,
}

impl TryFrom<BoxRepr> for LatticeBox {
    type Error = Error;

    fn try_from(r: BoxRepr) -> Result<Self> {
        if r.corner.len() != r.dimension {
            return Err(Error::config(format!(
                "box corner has {} coordinates, dimension is {}",
                r.corner.len(),
                r.dimension
            )));
        }
        LatticeBox::new(r.corner, r.sides)
    }
}

impl From<LatticeBox> for BoxRepr {
    fn from(b: LatticeBox) -> Self {
        BoxRepr {
            dimension: b.dimension(),
            corner: b.corner,
            sides: b.sides,
        }
    }
}

impl LatticeBox {
    pub fn new(corner: Vec<i64>, sides: Vec<usize>) -> Result<Self> {
        if corner.is_empty() {
            return Err(Error::config("box dimension must be positive"));
        }
        if corner.len() != sides.len() {
            return Err(Error::config(format!(
                "box corner has dimension {} but sides have dimension {}",
                corner.len(),
                sides.len()
            )));
        }
        if sides.iter().any(|&s| s == 0) {
            return Err(Error::config("box sides must contain at least one site"));
        }
        Ok(LatticeBox { corner, sides })
    }

    /// Cube `{lo, ..., lo + side - 1}^d`.
    pub fn cube(dimension: usize, lo: i64, side: usize) -> Result<Self> {
        LatticeBox::new(vec![lo; dimension], vec![side; dimension])
    }

    /// One-dimensional box `{lo, ..., hi}`.
    pub fn interval(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::config(format!("empty interval {lo}..{hi}")));
        }
        LatticeBox::new(vec![lo], vec![(hi - lo + 1) as usize])
    }

    pub fn dimension(&self) -> usize {
        self.corner.len()
    }

    pub fn corner(&self) -> &[i64] {
        &self.corner
    }

    pub fn sides(&self) -> &[usize] {
        &self.sides
    }

    /// Inclusive upper corner.
    pub fn upper(&self) -> Site {
        self.corner
            .iter()
            .zip(&self.sides)
            .map(|(&c, &s)| c + s as i64 - 1)
            .collect()
    }

    /// Number of sites |Λ|.
    pub fn site_count(&self) -> usize {
        self.sides.iter().product()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dimension()
            && x
                .iter()
                .zip(self.corner.iter().zip(&self.sides))
                .all(|(&xi, (&c, &s))| xi >= c && xi < c + s as i64)
    }

    /// Sites in lexicographic order (first axis slowest).
    pub fn sites(&self) -> Vec<Site> {
        let mut out = Vec::with_capacity(self.site_count());
        let d = self.dimension();
        let mut cur = self.corner.clone();
        loop {
            out.push(cur.clone());
            let mut axis = d;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                cur[axis] += 1;
                if cur[axis] < self.corner[axis] + self.sides[axis] as i64 {
                    break;
                }
                cur[axis] = self.corner[axis];
            }
        }
    }

    pub fn translate(&self, gamma: &[i64]) -> Result<Self> {
        check_dim(self.dimension(), gamma.len())?;
        let corner = self.corner.iter().zip(gamma).map(|(c, g)| c + g).collect();
        Ok(LatticeBox {
            corner,
            sides: self.sides.clone(),
        })
    }

    /// Euclidean distance between the two extreme sites.
    pub fn diameter(&self) -> f64 {
        let s: f64 = self.sides.iter().map(|&s| ((s - 1) as f64).powi(2)).sum();
        s.sqrt()
    }

    /// Distance from `x` to the box surface, `min_i min(x_i - lo_i, hi_i - x_i)`.
    /// Sites on the outer shell are at distance 0.
    pub fn depth(&self, x: &[i64]) -> i64 {
        let hi = self.upper();
        x.iter()
            .zip(self.corner.iter().zip(&hi))
            .map(|(&xi, (&lo, &h))| (xi - lo).min(h - xi))
            .min()
            .unwrap_or(0)
    }

    /// Sub-box of sites whose depth is strictly greater than `margin`, or
    /// `None` when no such site exists.
    pub fn interior(&self, margin: f64) -> Option<LatticeBox> {
        // smallest integer depth k with k > margin
        let k = if margin < 0.0 {
            0
        } else {
            margin.floor() as i64 + 1
        };
        let mut corner = Vec::with_capacity(self.dimension());
        let mut sides = Vec::with_capacity(self.dimension());
        for (&c, &s) in self.corner.iter().zip(&self.sides) {
            let remaining = s as i64 - 2 * k;
            if remaining <= 0 {
                return None;
            }
            corner.push(c + k);
            sides.push(remaining as usize);
        }
        Some(LatticeBox { corner, sides })
    }

    pub fn is_subset_of(&self, other: &LatticeBox) -> bool {
        self.dimension() == other.dimension()
            && other.contains(&self.corner)
            && other.contains(&self.upper())
    }

    pub fn is_disjoint(&self, other: &LatticeBox) -> bool {
        let hi_a = self.upper();
        let hi_b = other.upper();
        (0..self.dimension()).any(|i| hi_a[i] < other.corner[i] || hi_b[i] < self.corner[i])
    }
}

impl fmt::Display for LatticeBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hi = self.upper();
        let parts: Vec<String> = self
            .corner
            .iter()
            .zip(&hi)
            .map(|(lo, hi)| format!("{lo}..{hi}"))
            .collect();
        write!(f, "[{}]", parts.join(" x "))
    }
}

fn check_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::config(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// Euclidean distance between the closest pair of sites of two boxes; zero
/// exactly when they share a site.
pub fn box_distance(a: &LatticeBox, b: &LatticeBox) -> Result<f64> {
    check_dim(a.dimension(), b.dimension())?;
    let (hi_a, hi_b) = (a.upper(), b.upper());
    let mut s = 0i64;
    for i in 0..a.dimension() {
        let gap = (b.corner[i] - hi_a[i]).max(a.corner[i] - hi_b[i]).max(0);
        s += gap * gap;
    }
    Ok((s as f64).sqrt())
}

/// Fraction of sites in the `h`-neighbourhood of the box boundary.
///
/// The boundary layer always contains the outer shell (depth 0); deeper
/// sites belong to it when their depth is strictly below `h`.
pub fn boundary_ratio(b: &LatticeBox, h: f64) -> f64 {
    let sites = b.sites();
    let hits = sites
        .iter()
        .filter(|x| {
            let depth = b.depth(x);
            depth == 0 || (depth as f64) < h
        })
        .count();
    hits as f64 / sites.len() as f64
}

/// A finite set of sites, stored as a union of pairwise disjoint boxes.
/// Site order is box by box, lexicographic inside each box.
#[derive(Clone, Debug)]
pub struct Region {
    dimension: usize,
    parts: Vec<LatticeBox>,
    sites: Vec<Site>,
    index: HashMap<Site, usize>,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.sites == other.sites
    }
}

impl Region {
    pub fn from_box(b: &LatticeBox) -> Self {
        Region::union(std::slice::from_ref(b)).expect("a single box is always a valid region")
    }

    /// Disjoint union of boxes of a common dimension.
    pub fn union(parts: &[LatticeBox]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::geometry("a region needs at least one box"))?;
        let dimension = first.dimension();
        for (i, a) in parts.iter().enumerate() {
            check_dim(dimension, a.dimension())?;
            for b in &parts[i + 1..] {
                if !a.is_disjoint(b) {
                    return Err(Error::geometry(format!("boxes {a} and {b} overlap")));
                }
            }
        }
        let sites: Vec<Site> = parts.iter().flat_map(|b| b.sites()).collect();
        let index = sites
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Region {
            dimension,
            parts: parts.to_vec(),
            sites,
            index,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn parts(&self) -> &[LatticeBox] {
        &self.parts
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn index_of(&self, x: &[i64]) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.index.contains_key(x)
    }

    /// Nearest-neighbour pairs `(i, j)` with `i < j`, both inside the region.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut y = vec![0i64; self.dimension];
        for (i, x) in self.sites.iter().enumerate() {
            y.copy_from_slice(x);
            for axis in 0..self.dimension {
                y[axis] += 1;
                if let Some(j) = self.index_of(&y) {
                    out.push((i.min(j), i.max(j)));
                }
                y[axis] -= 1;
            }
        }
        out.sort_unstable();
        out
    }

    pub fn translate(&self, gamma: &[i64]) -> Result<Self> {
        let parts = self
            .parts
            .iter()
            .map(|b| b.translate(gamma))
            .collect::<Result<Vec<_>>>()?;
        Region::union(&parts)
    }

    /// Union of the component interiors at the given margin. Components that
    /// vanish are dropped; an empty result is a geometry error.
    pub fn interior(&self, margin: f64) -> Result<Self> {
        let parts: Vec<LatticeBox> = self.parts.iter().filter_map(|b| b.interior(margin)).collect();
        if parts.is_empty() {
            return Err(Error::geometry(format!(
                "interior at margin {margin} of region is empty"
            )));
        }
        Region::union(&parts)
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.sites.iter().all(|s| other.contains(s))
    }

    /// Smallest Euclidean distance between sites of distinct components.
    pub fn component_separation(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (i, a) in self.parts.iter().enumerate() {
            for b in &self.parts[i + 1..] {
                let d = box_distance(a, b).ok()?;
                best = Some(best.map_or(d, |x: f64| x.min(d)));
            }
        }
        best
    }
}

impl From<&LatticeBox> for Region {
    fn from(b: &LatticeBox) -> Self {
        Region::from_box(b)
    }
}

impl From<LatticeBox> for Region {
    fn from(b: LatticeBox) -> Self {
        Region::from_box(&b)
    }
}

/// Parameters of the doubling cube sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeSequenceParams {
    pub dimension: usize,
    /// Growth factor of the gap term, `2^{d/λ} < θ < 2`.
    pub theta: f64,
    /// Asymptotic side per level, `L_N / 2^N → L̃`.
    pub base_side: f64,
    /// Interaction range R_0.
    pub range: f64,
    /// Rounding slack δ.
    #[serde(default = "default_slack")]
    pub slack: f64,
    /// Interaction decay exponent λ > d.
    pub decay: f64,
}

fn default_slack() -> f64 {
    4.0
}

impl CubeSequenceParams {
    /// `R = (R_0 + δ) / (2 − θ)`.
    pub fn gap_scale(&self) -> f64 {
        (self.range + self.slack) / (2.0 - self.theta)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dimension as f64;
        if self.dimension == 0 {
            return Err(Error::config("cube sequence dimension must be positive"));
        }
        if !(self.decay > d) {
            return Err(Error::config(format!(
                "decay exponent λ > d violated (λ = {}, d = {})",
                self.decay, self.dimension
            )));
        }
        if !(self.theta < 2.0) {
            return Err(Error::config(format!("θ < 2 violated (θ = {})", self.theta)));
        }
        let lower = 2f64.powf(d / self.decay);
        if !(self.theta > lower) {
            return Err(Error::config(format!(
                "2^(d/λ) < θ violated (θ = {}, 2^(d/λ) = {lower})",
                self.theta
            )));
        }
        if !(self.range > 0.0) || !(self.slack > 0.0) {
            return Err(Error::config("range R_0 and slack δ must be positive"));
        }
        let r = self.gap_scale();
        if !(self.base_side > r) {
            return Err(Error::config(format!(
                "L̃ > R violated (L̃ = {}, R = {r})",
                self.base_side
            )));
        }
        Ok(())
    }

    /// `L_N = 2 ⌊(2^N L̃ − θ^N R) / 2⌋`.
    pub fn side(&self, level: u32) -> i64 {
        let x = 2f64.powi(level as i32) * self.base_side - self.theta.powi(level as i32) * self.gap_scale();
        2 * (x / 2.0).floor() as i64
    }
}

/// One level of the cube sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeLevel {
    pub level: u32,
    /// Continuum side L_N (even); the lattice cube has `L_N + 1` sites per axis.
    pub side: i64,
    /// `[-L_N/2, L_N/2]^d`.
    pub cube: LatticeBox,
    /// Translations γ_i of this cube that fit inside the next level; empty
    /// on the last level.
    pub placements: Vec<Vec<i64>>,
    /// `R_N = L_{N+1} − 2 L_N`, absent on the last level.
    pub gap: Option<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CubeFamily {
    pub params: CubeSequenceParams,
    pub levels: Vec<CubeLevel>,
}

impl CubeFamily {
    pub fn level(&self, n: u32) -> Option<&CubeLevel> {
        self.levels.get(n as usize)
    }

    /// Sub-cubes `Λ_N + γ_i` of level `n`.
    pub fn translates(&self, n: u32) -> Result<Vec<LatticeBox>> {
        let lvl = self
            .level(n)
            .ok_or_else(|| Error::config(format!("level {n} not generated")))?;
        lvl.placements.iter().map(|g| lvl.cube.translate(g)).collect()
    }
}

/// Sign vectors e_i ∈ {±1}^d in binary order (bit k set means −1 on axis k).
pub fn sign_vectors(d: usize) -> Vec<Vec<i64>> {
    (0..1usize << d)
        .map(|mask| (0..d).map(|k| if mask >> k & 1 == 1 { -1 } else { 1 }).collect())
        .collect()
}

/// Builds levels `0..=max_level` of the doubling cube sequence and re-checks
/// every placement invariant.
pub fn make_cube_sequence(params: &CubeSequenceParams, max_level: u32) -> Result<CubeFamily> {
    params.validate()?;
    let d = params.dimension;
    let mut levels = Vec::with_capacity(max_level as usize + 1);
    for n in 0..=max_level {
        let side = params.side(n);
        if side < 0 {
            return Err(Error::geometry(format!("negative side L_{n} = {side}")));
        }
        let cube = LatticeBox::cube(d, -side / 2, side as usize + 1)?;
        levels.push(CubeLevel {
            level: n,
            side,
            cube,
            placements: Vec::new(),
            gap: None,
        });
    }
    for n in 0..max_level as usize {
        let (l_n, l_next) = (levels[n].side, levels[n + 1].side);
        let gap = l_next - 2 * l_n;
        if (gap as f64) < params.range {
            return Err(Error::geometry(format!(
                "gap R_{n} = {gap} below interaction range R_0 = {}",
                params.range
            )));
        }
        let shift = (l_next - l_n) / 2;
        let placements: Vec<Vec<i64>> = sign_vectors(d)
            .into_iter()
            .map(|e| e.into_iter().map(|s| s * shift).collect())
            .collect();
        let outer = &levels[n + 1].cube;
        let subs = placements
            .iter()
            .map(|g| levels[n].cube.translate(g))
            .collect::<Result<Vec<_>>>()?;
        for (i, a) in subs.iter().enumerate() {
            if !a.is_subset_of(outer) {
                return Err(Error::geometry(format!("translate {a} leaves level {}", n + 1)));
            }
            for b in &subs[i + 1..] {
                if box_distance(a, b)? < params.range {
                    return Err(Error::geometry(format!(
                        "translates {a} and {b} closer than R_0"
                    )));
                }
            }
        }
        levels[n].placements = placements;
        levels[n].gap = Some(gap);
    }
    Ok(CubeFamily {
        params: params.clone(),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_1d(base_side: f64) -> CubeSequenceParams {
        CubeSequenceParams {
            dimension: 1,
            theta: 1.5,
            base_side,
            range: 1.0,
            slack: 4.0,
            decay: 2.0,
        }
    }

    #[test]
    fn cube_sequence_hand_values() {
        let p = params_1d(16.0);
        assert_eq!(p.gap_scale(), 10.0);
        let fam = make_cube_sequence(&p, 1).unwrap();
        assert_eq!(fam.levels[0].side, 6);
        assert_eq!(fam.levels[1].side, 16);
        assert_eq!(fam.levels[0].gap, Some(4));
        assert_eq!(fam.levels[0].placements, vec![vec![5], vec![-5]]);
        assert_eq!(fam.levels[0].cube.site_count(), 7);
    }

    #[test]
    fn single_level_has_no_placements() {
        let fam = make_cube_sequence(&params_1d(16.0), 0).unwrap();
        assert_eq!(fam.levels.len(), 1);
        assert!(fam.levels[0].placements.is_empty());
        assert_eq!(fam.levels[0].side % 2, 0);
    }

    #[test]
    fn theta_two_is_rejected() {
        let mut p = params_1d(16.0);
        p.theta = 2.0;
        let err = make_cube_sequence(&p, 2).unwrap_err();
        assert!(err.to_string().contains("θ < 2 violated"), "{err}");
    }

    #[test]
    fn other_domain_violations() {
        let mut p = params_1d(16.0);
        p.theta = 1.2;
        assert!(p.validate().unwrap_err().to_string().contains("2^(d/λ) < θ"));
        let p = params_1d(10.0);
        assert!(p.validate().unwrap_err().to_string().contains("L̃ > R"));
        let mut p = params_1d(16.0);
        p.decay = 1.0;
        assert!(p.validate().unwrap_err().to_string().contains("λ > d"));
    }

    #[test]
    fn distances() {
        let a = LatticeBox::interval(0, 3).unwrap();
        let b = LatticeBox::interval(8, 11).unwrap();
        assert_eq!(box_distance(&a, &b).unwrap(), 5.0);
        assert_eq!(box_distance(&a, &a).unwrap(), 0.0);
        let p = LatticeBox::new(vec![0, 0], vec![1, 1]).unwrap();
        let q = LatticeBox::new(vec![3, 4], vec![1, 1]).unwrap();
        assert_eq!(box_distance(&p, &q).unwrap(), 5.0);
        assert!(box_distance(&a, &p).is_err());
    }

    #[test]
    fn boundary_ratios() {
        let line = LatticeBox::interval(0, 9).unwrap();
        assert!((boundary_ratio(&line, 0.0) - 0.2).abs() < 1e-15);
        let sq = LatticeBox::cube(2, 0, 10).unwrap();
        assert!((boundary_ratio(&sq, 1.0) - 0.36).abs() < 1e-15);
        assert_eq!(boundary_ratio(&sq, sq.diameter()), 1.0);
    }

    #[test]
    fn region_edges_follow_adjacency() {
        let a = LatticeBox::interval(0, 2).unwrap();
        let b = LatticeBox::interval(3, 4).unwrap();
        let r = Region::union(&[a.clone(), b]).unwrap();
        assert_eq!(r.edges(), vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
        let far = LatticeBox::interval(10, 11).unwrap();
        let r = Region::union(&[a.clone(), far]).unwrap();
        assert_eq!(r.edges(), vec![(0, 1), (1, 2), (3, 4)]);
        assert!(Region::union(&[a.clone(), a]).is_err());
    }

    #[test]
    fn interior_drops_shells() {
        let b = LatticeBox::interval(0, 5).unwrap();
        assert_eq!(b.interior(0.5).unwrap(), LatticeBox::interval(1, 4).unwrap());
        assert_eq!(b.interior(1.0).unwrap(), LatticeBox::interval(2, 3).unwrap());
        assert!(b.interior(2.5).is_none());
    }

    #[test]
    fn box_serde_shape() {
        let b = LatticeBox::new(vec![-1, 2], vec![3, 4]).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, r#"{"dimension":2,"corner":[-1,2],"sides":[3,4]}"#);
        let back: LatticeBox = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
        assert!(serde_json::from_str::<LatticeBox>(r#"{"dimension":1,"corner":[0],"sides":[0]}"#).is_err());
    }
}
