//! Geometry of Z^d and the implicit weight field.
//!
//! Sites carry up to [`MAX_DIM`] coordinates, each limited to `|x| < 2^20`.
//! A site packs into a `u128` by storing `x_i + 2^20` in bits `21i..21i+21`;
//! an edge is the key of its lower endpoint with the axis appended above the
//! coordinate bits. Both packings are injective on the supported range, and a
//! unit step along axis `i` adds or subtracts `2^{21i}` from the key.

use std::collections::BTreeSet;
use std::fmt;

use rustc_hash::FxHashSet;

use crate::distributions::EdgeWeightModel;
use crate::error::{Error, Result};
use crate::mixing;

pub const MAX_DIM: usize = 5;
/// Exclusive bound on `|x_i|`.
pub const COORD_LIMIT: i32 = 1 << 20;
pub(crate) const COORD_BITS: u32 = 21;
pub(crate) const COORD_MASK: u128 = (1 << COORD_BITS) - 1;
pub(crate) const AXIS_SHIFT: u32 = COORD_BITS * MAX_DIM as u32;
const SITE_MASK: u128 = (1 << AXIS_SHIFT) - 1;

#[inline]
fn biased(x: i32) -> u128 {
    (x + COORD_LIMIT) as u32 as u128
}

#[inline]
fn unbiased(z: u128) -> i32 {
    z as i32 - COORD_LIMIT
}

/// A point of Z^d.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    dim: u8,
    coords: [i32; MAX_DIM],
}

impl Site {
    /// Panics unless `2 ≤ coords.len() ≤ MAX_DIM`.
    pub fn new(coords: &[i32]) -> Self {
        assert!(
            (2..=MAX_DIM).contains(&coords.len()),
            "site dimension {} outside 2..={MAX_DIM}",
            coords.len()
        );
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Self {
            dim: coords.len() as u8,
            coords: c,
        }
    }

    pub fn origin(d: usize) -> Self {
        Self::new(&vec![0; d])
    }

    /// `scale · e_axis`.
    pub fn on_axis(d: usize, axis: usize, scale: i32) -> Self {
        let mut s = Self::origin(d);
        s.coords[axis] = scale;
        s
    }

    /// Componentwise floor of a real vector.
    pub fn floor_of(point: &[f64]) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&point.len()) {
            return Err(Error::DimensionMismatch {
                expected: MAX_DIM,
                got: point.len(),
            });
        }
        let mut c = Vec::with_capacity(point.len());
        for &x in point {
            let f = x.floor();
            if !(f.abs() < COORD_LIMIT as f64) {
                return Err(Error::CoordinateOverflow(f as i64));
            }
            c.push(f as i32);
        }
        Ok(Self::new(&c))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[i32] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub fn coord(&self, axis: usize) -> i32 {
        self.coords[axis]
    }

    pub fn l1_distance(&self, other: &Site) -> i64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (*a as i64 - *b as i64).abs())
            .sum()
    }

    /// `self ± e_axis` without range checking.
    #[inline]
    pub fn step(&self, axis: usize, delta: i32) -> Site {
        let mut s = *self;
        s.coords[axis] += delta;
        s
    }

    pub fn translate(&self, by: &Site) -> Site {
        let mut s = *self;
        for i in 0..self.dim() {
            s.coords[i] += by.coords[i];
        }
        s
    }

    pub fn in_range(&self) -> bool {
        self.coords().iter().all(|c| c.abs() < COORD_LIMIT)
    }

    pub(crate) fn check_range(&self) -> Result<()> {
        match self.coords().iter().find(|c| c.abs() >= COORD_LIMIT) {
            Some(&c) => Err(Error::CoordinateOverflow(c as i64)),
            None => Ok(()),
        }
    }

    /// Injective packing of an in-range site.
    #[inline]
    pub fn key(&self) -> u128 {
        let mut k = 0u128;
        for i in 0..self.dim as usize {
            k |= biased(self.coords[i]) << (COORD_BITS * i as u32);
        }
        k
    }

    #[inline]
    pub fn from_key(key: u128, d: usize) -> Site {
        let mut coords = [0; MAX_DIM];
        for (i, c) in coords.iter_mut().enumerate().take(d) {
            *c = unbiased((key >> (COORD_BITS * i as u32)) & COORD_MASK);
        }
        Site {
            dim: d as u8,
            coords,
        }
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The 2d nearest neighbours in the order `+e_0, −e_0, +e_1, −e_1, …`.
pub fn neighbors(s: &Site) -> Vec<Site> {
    (0..s.dim())
        .flat_map(|axis| [s.step(axis, 1), s.step(axis, -1)])
        .collect()
}

/// The undirected edge `⟨base, base + e_axis⟩`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    base: Site,
    axis: u8,
}

impl EdgeId {
    pub fn new(base: Site, axis: usize) -> Result<Self> {
        if axis >= base.dim() {
            return Err(Error::NonCanonicalEdge(format!(
                "axis {axis} out of range for dimension {}",
                base.dim()
            )));
        }
        let e = Self {
            base,
            axis: axis as u8,
        };
        if !base.in_range() || !base.step(axis, 1).in_range() {
            return Err(Error::NonCanonicalEdge(format!("{e:?} outside coordinate range")));
        }
        Ok(e)
    }

    #[inline]
    pub(crate) fn new_unchecked(base: Site, axis: usize) -> Self {
        Self {
            base,
            axis: axis as u8,
        }
    }

    /// The canonical id of the edge joining two nearest neighbours.
    pub fn between(a: &Site, b: &Site) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        if a.l1_distance(b) != 1 {
            return Err(Error::NotAPath(format!("{a:?} and {b:?} are not adjacent")));
        }
        let axis = (0..a.dim()).find(|&i| a.coord(i) != b.coord(i)).unwrap();
        let base = if a.coord(axis) < b.coord(axis) { *a } else { *b };
        Self::new(base, axis)
    }

    pub fn base(&self) -> Site {
        self.base
    }

    pub fn axis(&self) -> usize {
        self.axis as usize
    }

    pub fn endpoints(&self) -> (Site, Site) {
        (self.base, self.base.step(self.axis(), 1))
    }

    pub fn contains(&self, s: &Site) -> bool {
        let (a, b) = self.endpoints();
        *s == a || *s == b
    }

    #[inline]
    pub fn encode(&self) -> u128 {
        self.base.key() | ((self.axis as u128) << AXIS_SHIFT)
    }

    /// Inverse of [`EdgeId::encode`].
    pub fn decode(code: u128, d: usize) -> Self {
        Self {
            base: Site::from_key(code & SITE_MASK, d),
            axis: (code >> AXIS_SHIFT) as u8,
        }
    }
}

impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.endpoints();
        write!(f, "<{a:?},{b:?}>")
    }
}

/// Edges incident to the origin, ordered like [`neighbors`].
pub fn origin_edges(d: usize) -> Vec<EdgeId> {
    let o = Site::origin(d);
    (0..d)
        .flat_map(|axis| {
            [
                EdgeId::new_unchecked(o, axis),
                EdgeId::new_unchecked(o.step(axis, -1), axis),
            ]
        })
        .collect()
}

/// Sites at ℓ1 distance one from the origin.
pub fn origin_sphere(d: usize) -> Vec<Site> {
    neighbors(&Site::origin(d))
}

/// All `(d−1)`-vectors whose coordinates are multiples of `3K` in `[−M, M]`.
pub fn transverse_grid(k: u32, m: u32, d: usize) -> Result<Vec<Vec<i32>>> {
    if k == 0 {
        return Err(Error::InvalidInput("transverse grid needs K >= 1".into()));
    }
    if !(2..=MAX_DIM).contains(&d) {
        return Err(Error::DimensionMismatch {
            expected: MAX_DIM,
            got: d,
        });
    }
    let step = 3 * k as i64;
    let reach = m as i64 / step;
    let axis_values: Vec<i32> = (-reach..=reach).map(|j| (j * step) as i32).collect();
    let mut out: Vec<Vec<i32>> = vec![Vec::new()];
    for _ in 0..d - 1 {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis_values.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    Ok(out)
}

/// `((0, v), (n, v))`, the ends of the slab through `v`.
pub fn slab_endpoints(v: &[i32], n: i32) -> (Site, Site) {
    let mut a = vec![0];
    a.extend_from_slice(v);
    let mut b = vec![n];
    b.extend_from_slice(v);
    (Site::new(&a), Site::new(&b))
}

/// A finite set of edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeSet(FxHashSet<EdgeId>);

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, e: EdgeId) -> bool {
        self.0.insert(e)
    }

    #[inline]
    pub fn contains(&self, e: &EdgeId) -> bool {
        self.0.contains(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EdgeId> {
        self.0.iter()
    }
}

impl FromIterator<EdgeId> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = EdgeId>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// A restriction on which sites and edges a path may use.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Full,
    /// `center + [−k, k]^d`.
    Box { center: Site, k: u32 },
    /// `{0 ≤ x_1 ≤ n, (x_2..x_d) ∈ v + [−k, k]^{d−1}}`.
    Slab { v: Vec<i32>, k: u32, n: u32 },
    /// Every site; every edge except those listed.
    EdgeComplement(EdgeSet),
    /// Exactly the listed sites, joined by every lattice edge between them.
    VertexSet(BTreeSet<Site>),
    /// Exactly the listed edges and their endpoints.
    EdgeSet(EdgeSet),
}

impl Region {
    pub fn boxed(center: Site, k: u32) -> Self {
        Self::Box { center, k }
    }

    pub fn slab(v: Vec<i32>, k: u32, n: u32) -> Self {
        Self::Slab { v, k, n }
    }

    pub fn vertex_set<I: IntoIterator<Item = Site>>(sites: I) -> Self {
        Self::VertexSet(sites.into_iter().collect())
    }

    pub fn contains_site(&self, s: &Site) -> bool {
        match self {
            Region::Full | Region::EdgeComplement(_) => true,
            Region::Box { center, k } => s
                .coords()
                .iter()
                .zip(center.coords())
                .all(|(a, c)| (*a as i64 - *c as i64).abs() <= *k as i64),
            Region::Slab { v, k, n } => {
                let c = s.coords();
                c.len() == v.len() + 1
                    && c[0] >= 0
                    && c[0] as i64 <= *n as i64
                    && c[1..]
                        .iter()
                        .zip(v)
                        .all(|(a, b)| (*a as i64 - *b as i64).abs() <= *k as i64)
            }
            Region::VertexSet(set) => set.contains(s),
            Region::EdgeSet(edges) => edges.iter().any(|e| e.contains(s)),
        }
    }

    /// Whether a path inside the region may traverse `e`.
    #[inline]
    pub fn allows_edge(&self, e: &EdgeId) -> bool {
        match self {
            Region::Full => true,
            Region::EdgeComplement(excluded) => !excluded.contains(e),
            Region::EdgeSet(edges) => edges.contains(e),
            _ => {
                let (a, b) = e.endpoints();
                self.contains_site(&a) && self.contains_site(&b)
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Region::Full | Region::EdgeComplement(_))
    }

    /// Every site of a bounded region, in sorted order.
    pub fn sites(&self) -> Option<Vec<Site>> {
        match self {
            Region::Full | Region::EdgeComplement(_) => None,
            Region::Box { center, k } => {
                let d = center.dim();
                let k = *k as i32;
                let lo: Vec<i32> = center.coords().iter().map(|c| c - k).collect();
                let hi: Vec<i32> = center.coords().iter().map(|c| c + k).collect();
                Some(grid_sites(&lo, &hi, d))
            }
            Region::Slab { v, k, n } => {
                let d = v.len() + 1;
                if !(2..=MAX_DIM).contains(&d) {
                    return Some(Vec::new());
                }
                let k = *k as i32;
                let mut lo = vec![0];
                let mut hi = vec![*n as i32];
                lo.extend(v.iter().map(|x| x - k));
                hi.extend(v.iter().map(|x| x + k));
                Some(grid_sites(&lo, &hi, d))
            }
            Region::VertexSet(set) => Some(set.iter().copied().collect()),
            Region::EdgeSet(edges) => {
                let set: BTreeSet<Site> = edges
                    .iter()
                    .flat_map(|e| {
                        let (a, b) = e.endpoints();
                        [a, b]
                    })
                    .collect();
                Some(set.into_iter().collect())
            }
        }
    }
}

fn grid_sites(lo: &[i32], hi: &[i32], d: usize) -> Vec<Site> {
    let mut out = vec![Vec::with_capacity(d)];
    for axis in 0..d {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i32>| {
                (lo[axis]..=hi[axis]).map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    let mut sites: Vec<Site> = out.iter().map(|c| Site::new(c)).collect();
    sites.sort();
    sites
}

/// Anything that assigns a weight to every canonical edge.
pub trait EdgeWeights: Sync {
    fn dim(&self) -> usize;

    /// Weight of a canonical, in-range edge.
    fn edge_weight(&self, e: &EdgeId) -> f64;

    /// Weight of the edge with packed code `code` (see [`EdgeId::encode`]).
    #[inline]
    fn edge_weight_encoded(&self, code: u128) -> f64 {
        self.edge_weight(&EdgeId::decode(code, self.dim()))
    }
}

/// A seeded i.i.d. weight field on the edges of Z^d.
///
/// The weight of `e` is `model.sample(u)` with `u` a keyed hash of `(seed, e)`,
/// so repeated queries are bit-identical and nothing is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    d: usize,
    model: EdgeWeightModel,
    seed: u64,
}

impl Environment {
    pub fn new(d: usize, model: EdgeWeightModel, seed: u64) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&d) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: d,
            });
        }
        Ok(Self { d, model, seed })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn model(&self) -> &EdgeWeightModel {
        &self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    fn check_edge(&self, e: &EdgeId) -> Result<()> {
        if e.base.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: e.base.dim(),
            });
        }
        if e.axis() >= self.d || !e.base.in_range() || !e.base.step(e.axis(), 1).in_range() {
            return Err(Error::NonCanonicalEdge(format!("{e:?}")));
        }
        Ok(())
    }

    #[inline]
    fn raw_uniform(&self, e: &EdgeId) -> f64 {
        mixing::uniform(self.seed, e.encode())
    }

    /// The per-edge uniform in (0,1).
    pub fn uniform_for_edge(&self, e: &EdgeId) -> Result<f64> {
        self.check_edge(e)?;
        Ok(self.raw_uniform(e))
    }

    pub fn weight(&self, e: &EdgeId) -> Result<f64> {
        self.check_edge(e)?;
        Ok(self.edge_weight(e))
    }
}

impl EdgeWeights for Environment {
    fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    fn edge_weight(&self, e: &EdgeId) -> f64 {
        self.model.quantile_unchecked(self.raw_uniform(e))
    }

    #[inline]
    fn edge_weight_encoded(&self, code: u128) -> f64 {
        self.model
            .quantile_unchecked(mixing::uniform(self.seed, code))
    }
}

/// A weight field with a handful of edges replaced.
#[derive(Debug, Clone)]
pub struct WeightOverlay<'a, W: EdgeWeights + ?Sized> {
    base: &'a W,
    overrides: Vec<(u128, f64)>,
}

impl<'a, W: EdgeWeights + ?Sized> WeightOverlay<'a, W> {
    pub fn new(base: &'a W, overrides: Vec<(EdgeId, f64)>) -> Self {
        Self {
            base,
            overrides: overrides.into_iter().map(|(e, w)| (e.encode(), w)).collect(),
        }
    }
}

impl<W: EdgeWeights + ?Sized> EdgeWeights for WeightOverlay<'_, W> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    #[inline]
    fn edge_weight(&self, e: &EdgeId) -> f64 {
        self.edge_weight_encoded(e.encode())
    }

    #[inline]
    fn edge_weight_encoded(&self, code: u128) -> f64 {
        for (id, w) in &self.overrides {
            if *id == code {
                return *w;
            }
        }
        self.base.edge_weight_encoded(code)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighbor_order_is_fixed() {
        let n = neighbors(&Site::new(&[0, 0]));
        let expect: Vec<Site> = [[1, 0], [-1, 0], [0, 1], [0, -1]]
            .iter()
            .map(|c| Site::new(c))
            .collect();
        assert_eq!(n, expect);
        let s = Site::new(&[3, -2, 7]);
        let n3 = neighbors(&s);
        assert_eq!(n3.len(), 6);
        assert!(n3.iter().all(|x| x.l1_distance(&s) == 1));
    }

    #[test]
    fn origin_edges_touch_origin() {
        for d in [2, 3] {
            let edges = origin_edges(d);
            let sphere = origin_sphere(d);
            assert_eq!(edges.len(), 2 * d);
            assert_eq!(sphere.len(), 2 * d);
            let o = Site::origin(d);
            for (e, x) in edges.iter().zip(&sphere) {
                assert!(e.contains(&o));
                assert!(e.contains(x));
                assert_eq!(*e, EdgeId::between(&o, x).unwrap());
            }
        }
    }

    #[test]
    fn edge_between_is_canonical() {
        let a = Site::new(&[2, 5]);
        let b = Site::new(&[2, 4]);
        let e1 = EdgeId::between(&a, &b).unwrap();
        let e2 = EdgeId::between(&b, &a).unwrap();
        assert_eq!(e1, e2);
        assert_eq!(e1.base(), b);
        assert_eq!(e1.axis(), 1);
        assert!(EdgeId::between(&a, &Site::new(&[3, 4])).is_err());
    }

    #[test]
    fn site_keys_round_trip() {
        for c in [[0, 0, 0], [-1, 1, 5], [COORD_LIMIT - 1, -(COORD_LIMIT - 1), 0]] {
            let s = Site::new(&c);
            assert_eq!(Site::from_key(s.key(), 3), s);
        }
    }

    #[test]
    fn floor_maps_reals() {
        assert_eq!(Site::floor_of(&[2.7, -0.5]).unwrap(), Site::new(&[2, -1]));
        assert!(Site::floor_of(&[1e7, 0.0]).is_err());
    }

    #[test]
    fn non_canonical_edges_rejected() {
        let env = Environment::new(2, EdgeWeightModel::exponential(1.0).unwrap(), 1).unwrap();
        assert!(EdgeId::new(Site::new(&[0, 0]), 2).is_err());
        let far = EdgeId::new_unchecked(Site::new(&[COORD_LIMIT - 1, 0]), 0);
        assert!(env.uniform_for_edge(&far).is_err());
        let three = EdgeId::new(Site::new(&[0, 0, 0]), 0).unwrap();
        assert!(env.weight(&three).is_err());
    }

    #[test]
    fn transverse_grid_examples() {
        assert_eq!(transverse_grid(1, 3, 2).unwrap(), vec![vec![-3], vec![0], vec![3]]);
        assert_eq!(transverse_grid(1, 0, 3).unwrap(), vec![vec![0, 0]]);
        let g = transverse_grid(2, 12, 2).unwrap();
        assert_eq!(g, vec![vec![-12], vec![-6], vec![0], vec![6], vec![12]]);
        assert!(g.len() as f64 >= 12.0 / 6.0);
        assert_eq!(transverse_grid(1, 6, 3).unwrap().len(), 25);
    }

    #[test]
    fn slab_endpoint_examples() {
        assert_eq!(
            slab_endpoints(&[0], 5),
            (Site::new(&[0, 0]), Site::new(&[5, 0]))
        );
        assert_eq!(
            slab_endpoints(&[3], 2),
            (Site::new(&[0, 3]), Site::new(&[2, 3]))
        );
        let m = 6;
        for v in transverse_grid(1, m, 2).unwrap() {
            let (a, b) = slab_endpoints(&v, 40);
            assert!(Region::boxed(Site::origin(2), m).contains_site(&a));
            assert!(Region::boxed(Site::on_axis(2, 0, 40), m).contains_site(&b));
            let slab = Region::slab(v.clone(), 0, 40);
            assert!(slab.contains_site(&a) && slab.contains_site(&b));
        }
    }

    #[test]
    fn box_sites_match_definition() {
        let r = Region::boxed(Site::new(&[1, -1]), 1);
        let sites = r.sites().unwrap();
        assert_eq!(sites.len(), 9);
        assert!(sites.iter().all(|s| r.contains_site(s)));
        assert!(!r.contains_site(&Site::new(&[3, 0])));
    }

    #[test]
    fn slabs_on_the_grid_are_disjoint() {
        for (k, m, n) in [(1u32, 6u32, 4u32), (2, 12, 3)] {
            for d in [2usize, 3] {
                let grid = transverse_grid(k, m, d).unwrap();
                let site_sets: Vec<BTreeSet<Site>> = grid
                    .iter()
                    .map(|v| {
                        Region::slab(v.clone(), k, n)
                            .sites()
                            .unwrap()
                            .into_iter()
                            .collect()
                    })
                    .collect();
                for i in 0..site_sets.len() {
                    for j in i + 1..site_sets.len() {
                        assert!(site_sets[i].is_disjoint(&site_sets[j]));
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_weights_are_constant() {
        let env = Environment::new(3, EdgeWeightModel::degenerate(1.0).unwrap(), 9).unwrap();
        for e in origin_edges(3) {
            assert_eq!(env.weight(&e).unwrap(), 1.0);
        }
    }

    #[test]
    fn weights_are_pure() {
        let env = Environment::new(2, EdgeWeightModel::weibull(1.0, 0.5).unwrap(), 77).unwrap();
        let e = EdgeId::new(Site::new(&[4, -9]), 1).unwrap();
        let a = env.weight(&e).unwrap();
        let b = env.clone().weight(&e).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(
            env.uniform_for_edge(&e).unwrap().to_bits(),
            env.uniform_for_edge(&e).unwrap().to_bits()
        );
    }

    #[test]
    fn overlay_replaces_only_listed_edges() {
        let env = Environment::new(2, EdgeWeightModel::exponential(1.0).unwrap(), 3).unwrap();
        let edges = origin_edges(2);
        let overlay = WeightOverlay::new(&env, vec![(edges[0], 100.0)]);
        assert_eq!(overlay.edge_weight(&edges[0]), 100.0);
        assert_eq!(overlay.edge_weight(&edges[1]), env.edge_weight(&edges[1]));
    }
}
