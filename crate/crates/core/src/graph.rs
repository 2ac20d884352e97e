//! The cocircuit graph and distance analytics.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::OrientedMatroid;
use crate::sign::SignVector;

/// Marker for unreachable vertices in distance arrays.
pub const UNREACHABLE: u32 = u32::MAX;

/// Vertices are cocircuits in canonical order; edges join `X`, `Y` with
/// `|X0 ∩ Y0| >= r - 2` and `S(X, Y)` empty. Adjacency is stored in CSR form.
#[derive(Clone, Debug)]
pub struct CocircuitGraph {
    n: usize,
    r: usize,
    vertices: Vec<SignVector>,
    index: HashMap<SignVector, usize>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    antipode: Vec<Option<usize>>,
}

fn adjacent(x: &SignVector, y: &SignVector, r: usize) -> bool {
    x != y && x.separation_unchecked(y).is_empty() && x.zeros().intersection(y.zeros()).len() + 2 >= r
}

impl CocircuitGraph {
    pub fn new(m: &OrientedMatroid) -> CocircuitGraph {
        CocircuitGraph::from_vertices(m.cocircuits().to_vec(), m.n(), m.rank())
    }

    /// Build from an arbitrary sorted vertex list using the edge rule.
    fn from_vertices(vertices: Vec<SignVector>, n: usize, r: usize) -> CocircuitGraph {
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); vertices.len()];
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                if adjacent(&vertices[i], &vertices[j], r) {
                    lists[i].push(j as u32);
                    lists[j].push(i as u32);
                }
            }
        }
        CocircuitGraph::from_lists(vertices, lists, n, r)
    }

    fn from_lists(vertices: Vec<SignVector>, lists: Vec<Vec<u32>>, n: usize, r: usize) -> CocircuitGraph {
        let index: HashMap<SignVector, usize> = vertices.iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let mut offsets = Vec::with_capacity(vertices.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for list in lists {
            targets.extend(list);
            offsets.push(targets.len());
        }
        let antipode = vertices.iter().map(|x| index.get(&x.negate()).copied()).collect();
        CocircuitGraph { n, r, vertices, index, offsets, targets, antipode }
    }

    /// Subgraph induced by the vertices with `keep[i]` set.
    pub fn induced(&self, keep: &[bool]) -> CocircuitGraph {
        let mut remap = vec![u32::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (i, x) in self.vertices.iter().enumerate() {
            if keep[i] {
                remap[i] = vertices.len() as u32;
                vertices.push(*x);
            }
        }
        let lists = (0..self.vertices.len())
            .filter(|&i| keep[i])
            .map(|i| self.neighbors(i).iter().map(|&j| remap[j as usize]).filter(|&j| j != u32::MAX).collect())
            .collect();
        CocircuitGraph::from_lists(vertices, lists, self.n, self.r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn vertices(&self) -> &[SignVector] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn index_of(&self, x: &SignVector) -> Option<usize> {
        self.index.get(x).copied()
    }

    fn require(&self, x: &SignVector) -> Result<usize> {
        self.index_of(x).ok_or_else(|| Error::VertexNotFound(x.to_string()))
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn antipode(&self, i: usize) -> Option<usize> {
        self.antipode[i]
    }

    /// Edges as index pairs `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.vertices.len())
            .flat_map(|i| self.neighbors(i).iter().map(move |&j| (i, j as usize)).filter(|(i, j)| i < j))
            .collect()
    }

    /// BFS distances from `src`; [`UNREACHABLE`] marks other components.
    pub fn distances_from(&self, src: usize) -> Vec<u32> {
        self.bfs(src, |_| true)
    }

    /// BFS from `src` over vertices accepted by `allowed` (`src` always is).
    pub fn bfs(&self, src: usize, allowed: impl Fn(usize) -> bool) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.vertices.len()];
        let mut queue = Vec::with_capacity(self.vertices.len());
        dist[src] = 0;
        queue.push(src as u32);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head] as usize;
            head += 1;
            let d = dist[v] + 1;
            for &w in self.neighbors(v) {
                let w = w as usize;
                if dist[w] == UNREACHABLE && allowed(w) {
                    dist[w] = d;
                    queue.push(w as u32);
                }
            }
        }
        dist
    }

    pub fn distance(&self, x: &SignVector, y: &SignVector) -> Result<u32> {
        let (i, j) = (self.require(x)?, self.require(y)?);
        Ok(self.distances_from(i)[j])
    }

    /// Distance matrix, one BFS per vertex, computed in parallel.
    pub fn all_pairs(&self) -> Vec<Vec<u32>> {
        let rows = self.bfs_sources().into_par_iter().map(|i| (i, self.distances_from(i))).collect();
        self.mirror_rows(rows)
    }

    /// Same matrix on the calling thread.
    pub fn all_pairs_sequential(&self) -> Vec<Vec<u32>> {
        let rows = self.bfs_sources().into_iter().map(|i| (i, self.distances_from(i))).collect();
        self.mirror_rows(rows)
    }

    // Negation is a graph automorphism, so d(-x, y) = d(x, -y): one BFS per
    // antipodal pair is enough.
    fn bfs_sources(&self) -> Vec<usize> {
        if !self.is_symmetric() {
            return (0..self.vertices.len()).collect();
        }
        (0..self.vertices.len()).filter(|&i| self.antipode[i].is_some_and(|a| i <= a)).collect()
    }

    fn is_symmetric(&self) -> bool {
        self.antipode.iter().all(Option::is_some)
    }

    fn mirror_rows(&self, rows: Vec<(usize, Vec<u32>)>) -> Vec<Vec<u32>> {
        let symmetric = self.is_symmetric();
        let mut out: Vec<Vec<u32>> = vec![Vec::new(); self.vertices.len()];
        for (i, row) in rows {
            if let Some(a) = self.antipode[i].filter(|&a| a != i && symmetric) {
                out[a] = (0..row.len()).map(|j| row[self.antipode[j].expect("symmetric")]).collect();
            }
            out[i] = row;
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertices.is_empty() || self.distances_from(0).iter().all(|&d| d != UNREACHABLE)
    }

    pub fn diameter(&self) -> DiameterReport {
        let start = Instant::now();
        // ecc(X) = ecc(-X), so only canonical representatives are searched
        let reps: Vec<usize> = (0..self.vertices.len())
            .filter(|&i| self.vertices[i].is_canonical() || self.antipode[i].is_none())
            .collect();
        let rows: Vec<Vec<u32>> = reps.par_iter().map(|&i| self.distances_from(i)).collect();
        let mut report = self.aggregate(reps.iter().copied().zip(rows.iter().map(Vec::as_slice)), true);
        report.elapsed = start.elapsed();
        report
    }

    /// Diameter report from a full distance matrix (as from [`CocircuitGraph::all_pairs`]).
    pub fn diameter_from_matrix(&self, matrix: &[Vec<u32>]) -> DiameterReport {
        self.aggregate(matrix.iter().map(Vec::as_slice).enumerate(), false)
    }

    fn aggregate<'a>(&self, rows: impl Iterator<Item = (usize, &'a [u32])>, halved: bool) -> DiameterReport {
        let mut diameter = 0;
        let mut witness = None;
        let mut max_non_antipodal = 0;
        let mut histogram: BTreeMap<u32, usize> = BTreeMap::new();
        for (i, dist) in rows {
            let mut ecc = 0;
            for (j, &d) in dist.iter().enumerate() {
                if d == UNREACHABLE {
                    continue;
                }
                ecc = ecc.max(d);
                if witness.is_none() || d > diameter {
                    diameter = d;
                    witness = Some((self.vertices[i], self.vertices[j]));
                }
                if self.antipode[i] != Some(j) {
                    max_non_antipodal = max_non_antipodal.max(d);
                }
            }
            let weight = if halved && self.antipode[i].is_some() { 2 } else { 1 };
            *histogram.entry(ecc).or_default() += weight;
        }
        DiameterReport { diameter, witness, eccentricity_histogram: histogram, max_non_antipodal, elapsed: Duration::ZERO }
    }

    /// Graphviz rendering; vertices are labelled with their sign strings.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph cocircuits {\n");
        for (i, x) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  v{i} [label=\"{x}\"];");
        }
        for (i, j) in self.edges() {
            let _ = writeln!(out, "  v{i} -- v{j};");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_edge_list(&self) -> EdgeList {
        EdgeList { n: self.n, r: self.r, vertices: self.vertices.clone(), edges: self.edges() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeList {
    pub n: usize,
    pub r: usize,
    pub vertices: Vec<SignVector>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub diameter: u32,
    pub witness: Option<(SignVector, SignVector)>,
    /// Eccentricity -> number of vertices.
    pub eccentricity_histogram: BTreeMap<u32, usize>,
    pub max_non_antipodal: u32,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Subgraph induced by the vertices of tope `t`.
pub fn tope_graph(m: &OrientedMatroid, g: &CocircuitGraph, t: &SignVector) -> Result<CocircuitGraph> {
    if !m.is_tope(t)? {
        return Err(Error::NotATope(t.to_string()));
    }
    let keep: Vec<bool> = g.vertices().iter().map(|x| x.conforms_unchecked(t)).collect();
    Ok(g.induced(&keep))
}

pub fn tope_distance(m: &OrientedMatroid, g: &CocircuitGraph, t: &SignVector, x: &SignVector, y: &SignVector) -> Result<u32> {
    let tg = tope_graph(m, g, t)?;
    tg.distance(x, y)
}

/// Length of a shortest crabbed path from `x` to `y`, `None` if the
/// restriction disconnects them.
pub fn crabbed_distance(g: &CocircuitGraph, x: &SignVector, y: &SignVector) -> Result<Option<u32>> {
    let (i, j) = (g.require(x)?, g.require(y)?);
    Ok(crabbed_distance_idx(g, i, j))
}

pub(crate) fn crabbed_distance_idx(g: &CocircuitGraph, i: usize, j: usize) -> Option<u32> {
    let (x, y) = (g.vertices[i], g.vertices[j]);
    let pos = x.positive().union(y.positive());
    let neg = x.negative().union(y.negative());
    let verts = &g.vertices;
    let dist = g.bfs(i, |w| verts[w].positive().is_subset(pos) && verts[w].negative().is_subset(neg));
    (dist[j] != UNREACHABLE).then_some(dist[j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chirotope::{Chirotope, VectorConfiguration};

    fn sv(s: &str) -> SignVector {
        s.parse().unwrap()
    }

    #[test]
    fn mirrored_matrix_matches_plain_bfs() {
        for (n, r) in [(5, 3), (7, 4), (8, 3)] {
            let chi = Chirotope::alternating(n, r).unwrap().reorient(1);
            let g = CocircuitGraph::new(&OrientedMatroid::from_chirotope(&chi).unwrap());
            let plain: Vec<Vec<u32>> = (0..g.vertex_count()).map(|i| g.distances_from(i)).collect();
            assert_eq!(g.all_pairs(), plain);
            assert_eq!(g.all_pairs_sequential(), plain);
            let keep: Vec<bool> = g.vertices().iter().map(|x| x.get(0) != crate::sign::Sign::Zero).collect();
            let h = g.induced(&keep);
            let plain: Vec<Vec<u32>> = (0..h.vertex_count()).map(|i| h.distances_from(i)).collect();
            assert_eq!(h.all_pairs(), plain);
        }
    }

    fn alt(n: usize, r: usize) -> OrientedMatroid {
        OrientedMatroid::from_chirotope(&Chirotope::alternating(n, r).unwrap()).unwrap()
    }

    #[test]
    fn alternating_4_3() {
        let m = alt(4, 3);
        let g = CocircuitGraph::new(&m);
        assert_eq!((g.vertex_count(), g.edge_count()), (12, 24));
        assert!((0..12).all(|i| g.degree(i) == 4));
        assert_eq!(g.distance(&sv("00++"), &sv("00--")).unwrap(), 3);
        assert_eq!(g.distance(&sv("00++"), &sv("0+0-")).unwrap(), 2);
        assert_eq!(g.distance(&sv("00++"), &sv("00++")).unwrap(), 0);
        assert!(matches!(g.distance(&sv("0+++"), &sv("00++")), Err(Error::VertexNotFound(_))));
        let d = g.diameter();
        assert_eq!((d.diameter, d.max_non_antipodal), (3, 2));
        assert_eq!(d.eccentricity_histogram.values().sum::<usize>(), 12);
    }

    #[test]
    fn rank_two_is_a_cycle() {
        for n in 2..8 {
            let g = CocircuitGraph::new(&alt(n, 2));
            assert_eq!(g.vertex_count(), 2 * n);
            assert_eq!(g.edge_count(), 2 * n);
            assert!((0..2 * n).all(|i| g.degree(i) == 2));
            assert_eq!(g.diameter().diameter as usize, n);
        }
        let id = VectorConfiguration::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
        let m = OrientedMatroid::build(id.cocircuits(), 2, None).unwrap();
        let g = CocircuitGraph::new(&m);
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));
    }

    #[test]
    fn tope_and_crabbed() {
        let m = alt(4, 3);
        let g = CocircuitGraph::new(&m);
        let t = sv("++++");
        assert_eq!(tope_distance(&m, &g, &t, &sv("00++"), &sv("++00")).unwrap(), 2);
        assert_eq!(tope_distance(&m, &g, &t, &sv("00++"), &sv("00++")).unwrap(), 0);
        assert!(tope_distance(&m, &g, &t, &sv("00++"), &sv("00--")).is_err());
        assert_eq!(crabbed_distance(&g, &sv("00++"), &sv("++00")).unwrap(), Some(2));
        // only X and -X vanish on X0, and they are not adjacent
        assert_eq!(crabbed_distance(&g, &sv("00++"), &sv("00--")).unwrap(), None);
        let tg = tope_graph(&m, &g, &t).unwrap();
        assert_eq!((tg.vertex_count(), tg.edge_count()), (4, 4));
    }

    #[test]
    fn exports() {
        let g = CocircuitGraph::new(&alt(3, 2));
        let dot = g.to_dot();
        assert_eq!(dot.matches(" -- ").count(), 6);
        let json = serde_json::to_string(&g.to_edge_list()).unwrap();
        let back: EdgeList = serde_json::from_str(&json).unwrap();
        assert_eq!(back.edges.len(), 6);
    }
}
