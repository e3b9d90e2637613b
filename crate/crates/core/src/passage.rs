//! First passage times on implicit environments.
//!
//! [`SearchWorkspace`] runs Dijkstra over the implicit lattice graph, querying
//! edge weights only when an edge is relaxed. Distances live in a hash map
//! keyed by packed site ids; the heap uses lazy deletion (stale entries are
//! skipped on pop). Heap entries are ordered by `(distance, site key)` and a
//! predecessor is only replaced on strict improvement, so geodesics are
//! deterministic: among equal-time paths the first one relaxed in neighbour
//! order (`+e_0, −e_0, +e_1, …`) wins.
//!
//! A source outside the region gives `+∞` unless it equals the target, in which
//! case the time is 0.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::lattice::{
    EdgeId, EdgeSet, EdgeWeights, Region, Site, AXIS_SHIFT, COORD_BITS, COORD_LIMIT, COORD_MASK,
};

/// Largest region the exhaustive oracle accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct PassageQuery {
    pub source: Site,
    pub target: Site,
    pub region: Region,
    pub excluded: Option<EdgeSet>,
    pub geodesic: bool,
}

impl PassageQuery {
    pub fn new(source: Site, target: Site) -> Self {
        Self {
            source,
            target,
            region: Region::Full,
            excluded: None,
            geodesic: false,
        }
    }

    /// Endpoints given as real vectors are floored componentwise.
    pub fn between_points(source: &[f64], target: &[f64]) -> Result<Self> {
        Ok(Self::new(Site::floor_of(source)?, Site::floor_of(target)?))
    }

    pub fn within(mut self, region: Region) -> Self {
        self.region = region;
        self
    }

    pub fn excluding(mut self, edges: EdgeSet) -> Self {
        self.excluded = Some(edges);
        self
    }

    pub fn with_geodesic(mut self) -> Self {
        self.geodesic = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassageResult {
    /// `+∞` when the target cannot be reached.
    pub time: f64,
    pub geodesic: Option<Vec<Site>>,
    pub settled_count: usize,
    pub max_frontier: usize,
}

impl PassageResult {
    fn trivial(time: f64, geodesic: Option<Vec<Site>>) -> Self {
        Self {
            time,
            geodesic,
            settled_count: 0,
            max_frontier: 0,
        }
    }
}

const NO_PRED: u8 = u8::MAX;

#[derive(Clone, Copy)]
struct Node {
    dist: f64,
    /// Direction index (see [`crate::lattice::neighbors`]) of the step into this site.
    pred: u8,
    settled: bool,
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier {
    dist: f64,
    key: u128,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, key)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.key.cmp(&self.key))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct SearchStats {
    settled: usize,
    max_frontier: usize,
}

/// Reusable Dijkstra buffers. One workspace per thread.
#[derive(Default)]
pub struct SearchWorkspace {
    nodes: FxHashMap<u128, Node>,
    heap: BinaryHeap<Frontier>,
}

impl SearchWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn passage_time<W: EdgeWeights + ?Sized>(
        &mut self,
        weights: &W,
        query: &PassageQuery,
    ) -> Result<PassageResult> {
        let d = weights.dim();
        for s in [&query.source, &query.target] {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: s.dim(),
                });
            }
            s.check_range()?;
        }
        if query.source == query.target {
            let geo = query.geodesic.then(|| vec![query.source]);
            return Ok(PassageResult::trivial(0.0, geo));
        }
        if !query.region.contains_site(&query.source) || !query.region.contains_site(&query.target)
        {
            return Ok(PassageResult::trivial(f64::INFINITY, None));
        }
        let excluded = query.excluded.as_ref();
        if !reachable_in_principle(&query.region, excluded, &query.source, &query.target)? {
            return Ok(PassageResult::trivial(f64::INFINITY, None));
        }
        let stats = self.run(weights, &query.source, &[query.target], &query.region, excluded)?;
        let target_key = query.target.key();
        let time = self
            .nodes
            .get(&target_key)
            .filter(|n| n.settled)
            .map_or(f64::INFINITY, |n| n.dist);
        let geodesic = if query.geodesic && time.is_finite() {
            let mut path = vec![query.target];
            let mut key = target_key;
            while let Some(node) = self.nodes.get(&key) {
                if node.pred == NO_PRED {
                    break;
                }
                let stride = 1u128 << (COORD_BITS * (node.pred / 2) as u32);
                key = if node.pred % 2 == 0 { key - stride } else { key + stride };
                path.push(Site::from_key(key, d));
            }
            path.reverse();
            Some(path)
        } else {
            None
        };
        Ok(PassageResult {
            time,
            geodesic,
            settled_count: stats.settled,
            max_frontier: stats.max_frontier,
        })
    }

    /// Passage times from `source` to each of `targets` in one search.
    pub fn passage_times_to<W: EdgeWeights + ?Sized>(
        &mut self,
        weights: &W,
        source: &Site,
        targets: &[Site],
        region: &Region,
    ) -> Result<Vec<f64>> {
        let d = weights.dim();
        for s in std::iter::once(source).chain(targets) {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: s.dim(),
                });
            }
            s.check_range()?;
        }
        if !region.contains_site(source) {
            return Ok(targets
                .iter()
                .map(|t| if t == source { 0.0 } else { f64::INFINITY })
                .collect());
        }
        let live: Vec<Site> = targets
            .iter()
            .filter(|t| region.contains_site(t))
            .copied()
            .collect();
        self.run(weights, source, &live, region, None)?;
        Ok(targets
            .iter()
            .map(|t| {
                self.nodes
                    .get(&t.key())
                    .filter(|n| n.settled)
                    .map_or(f64::INFINITY, |n| n.dist)
            })
            .collect())
    }

    fn run<W: EdgeWeights + ?Sized>(
        &mut self,
        weights: &W,
        source: &Site,
        targets: &[Site],
        region: &Region,
        excluded: Option<&EdgeSet>,
    ) -> Result<SearchStats> {
        let d = weights.dim();
        self.nodes.clear();
        self.heap.clear();
        let mut target_keys: Vec<u128> = targets.iter().map(Site::key).collect();
        target_keys.sort_unstable();
        target_keys.dedup();
        let mut remaining = target_keys.len();
        let mut stats = SearchStats {
            settled: 0,
            max_frontier: 0,
        };
        if remaining == 0 {
            return Ok(stats);
        }
        let unrestricted = matches!(region, Region::Full) && excluded.is_none();
        let source_key = source.key();
        self.nodes.insert(
            source_key,
            Node {
                dist: 0.0,
                pred: NO_PRED,
                settled: false,
            },
        );
        self.heap.push(Frontier {
            dist: 0.0,
            key: source_key,
        });
        while let Some(Frontier { dist, key }) = self.heap.pop() {
            let node = self.nodes.get_mut(&key).expect("queued site has a node");
            if node.settled || dist > node.dist {
                continue;
            }
            node.settled = true;
            stats.settled += 1;
            if target_keys.contains(&key) {
                remaining -= 1;
                if remaining == 0 {
                    break;
                }
            }
            for axis in 0..d {
                let shift = COORD_BITS * axis as u32;
                let field = (key >> shift) & COORD_MASK;
                let stride = 1u128 << shift;
                for (dir, up) in [(2 * axis, true), (2 * axis + 1, false)] {
                    let (nb, base) = if up {
                        if field + 1 >= 2 * COORD_LIMIT as u128 {
                            return Err(Error::CoordinateOverflow(COORD_LIMIT as i64));
                        }
                        (key + stride, key)
                    } else {
                        if field <= 1 {
                            return Err(Error::CoordinateOverflow(-(COORD_LIMIT as i64)));
                        }
                        (key - stride, key - stride)
                    };
                    let code = base | (axis as u128) << AXIS_SHIFT;
                    if !unrestricted {
                        let edge = EdgeId::decode(code, d);
                        if !region.allows_edge(&edge)
                            || excluded.is_some_and(|ex| ex.contains(&edge))
                        {
                            continue;
                        }
                    }
                    let entry = self.nodes.entry(nb).or_insert(Node {
                        dist: f64::INFINITY,
                        pred: NO_PRED,
                        settled: false,
                    });
                    if entry.settled {
                        continue;
                    }
                    let candidate = dist + weights.edge_weight_encoded(code);
                    if candidate < entry.dist {
                        entry.dist = candidate;
                        entry.pred = dir as u8;
                        self.heap.push(Frontier {
                            dist: candidate,
                            key: nb,
                        });
                    }
                }
            }
            stats.max_frontier = stats.max_frontier.max(self.heap.len());
        }
        Ok(stats)
    }
}

/// For unbounded regions with finitely many removed edges, decides whether
/// `source` and `target` share a component without an unbounded search.
///
/// Z^d minus finitely many edges has exactly one infinite component, and by
/// the edge-isoperimetric inequality a finite component cut off by `m` edges
/// has at most `m²` sites. A flood fill that exceeds that many sites has
/// therefore found the infinite component.
fn reachable_in_principle(
    region: &Region,
    excluded: Option<&EdgeSet>,
    source: &Site,
    target: &Site,
) -> Result<bool> {
    if region.is_bounded() {
        return Ok(true);
    }
    let removed = match region {
        Region::EdgeComplement(set) => set.len(),
        _ => 0,
    } + excluded.map_or(0, EdgeSet::len);
    if removed == 0 {
        return Ok(true);
    }
    let cap = removed * removed + 1;
    let allowed = |e: &EdgeId| region.allows_edge(e) && !excluded.is_some_and(|ex| ex.contains(e));
    let from_target = finite_component(target, cap, &allowed);
    match from_target {
        Some(component) => Ok(component.contains(source)),
        None => Ok(finite_component(source, cap, &allowed).is_none()),
    }
}

fn finite_component(
    start: &Site,
    cap: usize,
    allowed: &dyn Fn(&EdgeId) -> bool,
) -> Option<FxHashSet<Site>> {
    let mut seen = FxHashSet::default();
    let mut queue = VecDeque::from([*start]);
    seen.insert(*start);
    while let Some(s) = queue.pop_front() {
        for axis in 0..s.dim() {
            for delta in [1, -1] {
                let nb = s.step(axis, delta);
                let edge = if delta == 1 {
                    EdgeId::new_unchecked(s, axis)
                } else {
                    EdgeId::new_unchecked(nb, axis)
                };
                if allowed(&edge) && seen.insert(nb) {
                    if seen.len() > cap {
                        return None;
                    }
                    queue.push_back(nb);
                }
            }
        }
    }
    Some(seen)
}

/// Shortest passage time for `query`.
pub fn passage_time<W: EdgeWeights + ?Sized>(
    weights: &W,
    query: &PassageQuery,
) -> Result<PassageResult> {
    SearchWorkspace::new().passage_time(weights, query)
}

/// Passage time over the lattice with the given edges removed.
pub fn passage_time_excluding<W: EdgeWeights + ?Sized>(
    weights: &W,
    source: Site,
    target: Site,
    excluded: EdgeSet,
) -> Result<PassageResult> {
    passage_time(weights, &PassageQuery::new(source, target).excluding(excluded))
}

/// Sum of edge weights along a nearest-neighbour path.
pub fn path_time<W: EdgeWeights + ?Sized>(weights: &W, path: &[Site]) -> Result<f64> {
    let d = weights.dim();
    let mut total = 0.0;
    for pair in path.windows(2) {
        if pair[0].dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: pair[0].dim(),
            });
        }
        let e = EdgeId::between(&pair[0], &pair[1])?;
        total += weights.edge_weight(&e);
    }
    if let Some(s) = path.first() {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.dim(),
            });
        }
    }
    Ok(total)
}

/// Minimum of [`path_time`] over every simple path from `source` to `target`
/// inside a region of at most `max_sites ≤ 20` sites, by exhaustive
/// depth-first enumeration. With nonnegative weights the infimum over all
/// paths is attained on a simple one.
pub fn brute_force_oracle<W: EdgeWeights + ?Sized>(
    weights: &W,
    source: &Site,
    target: &Site,
    region: &Region,
    max_sites: usize,
) -> Result<f64> {
    let limit = max_sites.min(BRUTE_FORCE_LIMIT);
    let sites = region.sites().ok_or(Error::UnboundedRegion)?;
    if sites.len() > limit {
        return Err(Error::RegionTooLarge {
            sites: sites.len(),
            limit,
        });
    }
    if source == target {
        return Ok(0.0);
    }
    let index = |s: &Site| sites.iter().position(|x| x == s);
    let (Some(src), Some(dst)) = (index(source), index(target)) else {
        return Ok(f64::INFINITY);
    };
    let adjacency: Vec<Vec<(usize, f64)>> = sites
        .iter()
        .map(|s| {
            sites
                .iter()
                .enumerate()
                .filter(|(_, t)| s.l1_distance(t) == 1)
                .filter_map(|(j, t)| {
                    let e = EdgeId::between(s, t).ok()?;
                    region.allows_edge(&e).then(|| (j, weights.edge_weight(&e)))
                })
                .collect()
        })
        .collect();

    fn dfs(
        at: usize,
        dst: usize,
        sum: f64,
        visited: u32,
        adjacency: &[Vec<(usize, f64)>],
        best: &mut f64,
    ) {
        if at == dst {
            *best = best.min(sum);
            return;
        }
        for &(next, w) in &adjacency[at] {
            if visited & (1 << next) == 0 {
                dfs(next, dst, sum + w, visited | (1 << next), adjacency, best);
            }
        }
    }

    let mut best = f64::INFINITY;
    dfs(src, dst, 0.0, 1 << src, &adjacency, &mut best);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::EdgeWeightModel;
    use crate::lattice::{origin_edges, origin_sphere, Environment};

    fn env(model: EdgeWeightModel, seed: u64) -> Environment {
        Environment::new(2, model, seed).unwrap()
    }

    fn s(c: &[i32]) -> Site {
        Site::new(c)
    }

    #[test]
    fn source_equals_target() {
        let e = env(EdgeWeightModel::exponential(1.0).unwrap(), 1);
        let r = passage_time(&e, &PassageQuery::new(s(&[2, 2]), s(&[2, 2])).with_geodesic()).unwrap();
        assert_eq!(r.time, 0.0);
        assert_eq!(r.geodesic, Some(vec![s(&[2, 2])]));
    }

    #[test]
    fn degenerate_time_is_l1_distance() {
        let e = env(EdgeWeightModel::degenerate(2.0).unwrap(), 1);
        for n in [1, 5, 17] {
            let r = passage_time(&e, &PassageQuery::new(s(&[0, 0]), s(&[n, 0]))).unwrap();
            assert_eq!(r.time, 2.0 * n as f64);
        }
        let r = passage_time(&e, &PassageQuery::new(s(&[0, 0]), s(&[3, -4]))).unwrap();
        assert_eq!(r.time, 14.0);
    }

    #[test]
    fn target_outside_box_is_infinite() {
        let e = env(EdgeWeightModel::exponential(1.0).unwrap(), 1);
        let q = PassageQuery::new(s(&[0, 0]), s(&[3, 0])).within(Region::boxed(s(&[0, 0]), 1));
        assert_eq!(passage_time(&e, &q).unwrap().time, f64::INFINITY);
        let q = PassageQuery::new(s(&[5, 0]), s(&[0, 0])).within(Region::boxed(s(&[0, 0]), 1));
        assert_eq!(passage_time(&e, &q).unwrap().time, f64::INFINITY);
    }

    #[test]
    fn real_endpoints_are_floored() {
        let e = env(EdgeWeightModel::degenerate(1.0).unwrap(), 1);
        let q = PassageQuery::between_points(&[0.4, 0.9], &[3.99, -0.01]).unwrap();
        assert_eq!(q.target, s(&[3, -1]));
        assert_eq!(passage_time(&e, &q).unwrap().time, 4.0);
    }

    #[test]
    fn geodesic_sums_to_time() {
        let e = env(EdgeWeightModel::weibull(1.0, 0.5).unwrap(), 99);
        let q = PassageQuery::new(s(&[0, 0]), s(&[12, 5])).with_geodesic();
        let r = passage_time(&e, &q).unwrap();
        let path = r.geodesic.unwrap();
        assert_eq!(path.first(), Some(&s(&[0, 0])));
        assert_eq!(path.last(), Some(&s(&[12, 5])));
        let t = path_time(&e, &path).unwrap();
        assert!(((t - r.time) / r.time).abs() < 1e-9);
        assert!(r.settled_count > 0 && r.max_frontier > 0);
    }

    #[test]
    fn path_time_examples() {
        let e = env(EdgeWeightModel::degenerate(1.0).unwrap(), 1);
        assert_eq!(path_time(&e, &[s(&[4, 4])]).unwrap(), 0.0);
        let path: Vec<Site> = (0..=7).map(|i| s(&[i, 0])).collect();
        assert_eq!(path_time(&e, &path).unwrap(), 7.0);
        assert!(matches!(
            path_time(&e, &[s(&[0, 0]), s(&[1, 1])]),
            Err(Error::NotAPath(_))
        ));
    }

    #[test]
    fn excluding_origin_edges_still_connects() {
        let e = env(EdgeWeightModel::exponential(1.0).unwrap(), 5);
        let excluded: EdgeSet = origin_edges(2).into_iter().collect();
        let r = passage_time_excluding(&e, s(&[1, 0]), s(&[10, 0]), excluded.clone()).unwrap();
        assert!(r.time.is_finite());
        let free = passage_time(&e, &PassageQuery::new(s(&[1, 0]), s(&[10, 0]))).unwrap();
        assert!(r.time >= free.time);
        let none = passage_time_excluding(&e, s(&[1, 0]), s(&[10, 0]), EdgeSet::new()).unwrap();
        assert_eq!(none.time, free.time);
        // the origin itself is cut off entirely
        let iso = passage_time_excluding(&e, s(&[0, 0]), s(&[10, 0]), excluded).unwrap();
        assert_eq!(iso.time, f64::INFINITY);
    }

    #[test]
    fn oracle_small_examples() {
        let e = env(EdgeWeightModel::degenerate(1.0).unwrap(), 1);
        let b = Region::vertex_set([s(&[0, 0]), s(&[1, 0]), s(&[0, 1]), s(&[1, 1])]);
        assert_eq!(
            brute_force_oracle(&e, &s(&[0, 0]), &s(&[1, 1]), &b, 20).unwrap(),
            2.0
        );
        let split = Region::vertex_set([s(&[0, 0]), s(&[1, 0]), s(&[3, 0])]);
        assert_eq!(
            brute_force_oracle(&e, &s(&[0, 0]), &s(&[3, 0]), &split, 20).unwrap(),
            f64::INFINITY
        );
        let q = PassageQuery::new(s(&[0, 0]), s(&[3, 0])).within(split);
        assert_eq!(passage_time(&e, &q).unwrap().time, f64::INFINITY);
        let big = Region::boxed(s(&[0, 0]), 3);
        assert!(matches!(
            brute_force_oracle(&e, &s(&[0, 0]), &s(&[1, 0]), &big, 20),
            Err(Error::RegionTooLarge { .. })
        ));
        assert!(matches!(
            brute_force_oracle(&e, &s(&[0, 0]), &s(&[1, 0]), &Region::Full, 20),
            Err(Error::UnboundedRegion)
        ));
    }

    #[test]
    fn four_by_four_box_matches_oracle() {
        let region = Region::VertexSet(
            (0..4)
                .flat_map(|x| (0..4).map(move |y| s(&[x, y])))
                .collect(),
        );
        for seed in 0..10 {
            let e = env(EdgeWeightModel::weibull(1.0, 0.7).unwrap(), seed);
            let q = PassageQuery::new(s(&[0, 0]), s(&[3, 3])).within(region.clone());
            let fast = passage_time(&e, &q).unwrap().time;
            let slow = brute_force_oracle(&e, &s(&[0, 0]), &s(&[3, 3]), &region, 20).unwrap();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn origin_decomposition() {
        let excluded: EdgeSet = origin_edges(2).into_iter().collect();
        for seed in 0..5 {
            let e = env(EdgeWeightModel::exponential(1.0).unwrap(), seed);
            let target = s(&[9, 2]);
            let direct = passage_time(&e, &PassageQuery::new(Site::origin(2), target))
                .unwrap()
                .time;
            let split = origin_edges(2)
                .iter()
                .zip(origin_sphere(2))
                .map(|(edge, x)| {
                    e.edge_weight(edge)
                        + passage_time_excluding(&e, x, target, excluded.clone())
                            .unwrap()
                            .time
                })
                .fold(f64::INFINITY, f64::min);
            assert!((direct - split).abs() <= 1e-12 * direct, "{direct} vs {split}");
        }
    }

    #[test]
    fn multi_target_agrees_with_single() {
        let e = env(EdgeWeightModel::exponential(1.0).unwrap(), 3);
        let targets: Vec<Site> = [4, 8, 16].iter().map(|&n| s(&[n, 0])).collect();
        let many = SearchWorkspace::new()
            .passage_times_to(&e, &Site::origin(2), &targets, &Region::Full)
            .unwrap();
        for (t, m) in targets.iter().zip(&many) {
            let one = passage_time(&e, &PassageQuery::new(Site::origin(2), *t)).unwrap();
            assert_eq!(one.time, *m);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let e = env(EdgeWeightModel::exponential(1.0).unwrap(), 3);
        let q = PassageQuery::new(Site::origin(3), Site::on_axis(3, 0, 2));
        assert!(matches!(
            passage_time(&e, &q),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn enclosed_target_is_unreachable() {
        let e = env(EdgeWeightModel::exponential(1.0).unwrap(), 3);
        let t = s(&[5, 5]);
        let walls: EdgeSet = crate::lattice::neighbors(&t)
            .iter()
            .map(|n| EdgeId::between(&t, n).unwrap())
            .collect();
        let q = PassageQuery::new(Site::origin(2), t).within(Region::EdgeComplement(walls));
        assert_eq!(passage_time(&e, &q).unwrap().time, f64::INFINITY);
    }
}
