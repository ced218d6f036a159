//! Incidence graphs, permutation voltages, derived graphs and complexes,
//! covering verification, and the sign factorization of lifted coboundaries.
//!
//! Sheets are zero-based. The derived graph of `(B, ψ)` has an edge between
//! `(u, i)` and `(v, j)` iff `{u, v}` is an edge of `B` and `i = ψ(u→v)(j)`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::DMatrix;

use crate::complex::{
    coboundary_matrix, relative_orientation_sign, Face, OrientedFace, SimplicialComplex, UnionFind,
};
use crate::error::{CoveringViolation, Error, Result};
use crate::perm::Permutation;

/// A simple undirected graph on nodes `0..num_nodes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub num_nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Edges as a set of `(min, max)` pairs.
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect()
    }

    pub fn num_components(&self) -> usize {
        let mut uf = UnionFind::new(self.num_nodes);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        (0..self.num_nodes).filter(|&n| uf.find(n) == n).count()
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// The bipartite graph `B_i(K)` on `S_i ∪ S_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceGraph {
    pub dim: isize,
    pub left: Vec<Face>,
    pub right: Vec<Face>,
    /// `(left index, right index)`, sorted by right then left.
    pub edges: Vec<(usize, usize)>,
}

impl IncidenceGraph {
    /// Nodes `0..left.len()` are `S_i`, the rest are `S_{i+1}`.
    pub fn as_graph(&self) -> Graph {
        let n = self.left.len();
        Graph {
            num_nodes: n + self.right.len(),
            edges: self.edges.iter().map(|&(l, r)| (l, n + r)).collect(),
        }
    }

    pub fn edge_index(&self, left: usize, right: usize) -> Option<usize> {
        self.edges.iter().position(|&e| e == (left, right))
    }
}

pub fn incidence_graph(k: &SimplicialComplex, i: isize) -> Result<IncidenceGraph> {
    if i >= k.top_dim() || i < -1 || (i == -1 && !k.include_empty()) {
        return Err(Error::DimensionOutOfRange {
            dim: i,
            reason: format!("incidence graph needs -1 <= i < {}", k.top_dim()),
        });
    }
    let d = coboundary_matrix(k, i)?;
    let mut edges = Vec::new();
    for r in 0..d.nrows() {
        for c in 0..d.ncols() {
            if d.entries[(r, c)] != 0 {
                edges.push((c, r));
            }
        }
    }
    Ok(IncidenceGraph {
        dim: i,
        left: k.faces(i).to_vec(),
        right: k.faces(i + 1).to_vec(),
        edges,
    })
}

/// Permutation voltages on the edges of a graph.
///
/// Each edge stores `ψ(u→v)` for one orientation; the reverse orientation
/// reads the inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoltageAssignment {
    pub k: usize,
    perms: BTreeMap<(usize, usize), Permutation>,
}

impl VoltageAssignment {
    pub fn new(k: usize) -> Self {
        VoltageAssignment {
            k,
            perms: BTreeMap::new(),
        }
    }

    /// Identity voltage on every edge of `g`.
    pub fn identity_on(g: &Graph, k: usize) -> Self {
        let mut psi = Self::new(k);
        for &(a, b) in &g.edges {
            psi.set(a, b, Permutation::identity(k)).unwrap();
        }
        psi
    }

    /// Sets `ψ(u→v)`, replacing any value stored for either orientation.
    pub fn set(&mut self, u: usize, v: usize, perm: Permutation) -> Result<()> {
        if perm.degree() != self.k {
            return Err(Error::WrongFold {
                expected: self.k,
                got: perm.degree(),
            });
        }
        self.perms.remove(&(v, u));
        self.perms.insert((u, v), perm);
        Ok(())
    }

    /// `ψ(u→v)`.
    pub fn get(&self, u: usize, v: usize) -> Option<Permutation> {
        if let Some(p) = self.perms.get(&(u, v)) {
            return Some(p.clone());
        }
        self.perms.get(&(v, u)).map(|p| p.inverse())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Permutation)> {
        self.perms.iter()
    }

    pub fn generators(&self) -> Vec<Permutation> {
        self.perms.values().cloned().collect()
    }
}

/// The derived graph; node `(u, j)` is numbered `u * k + j`.
pub fn derived_graph(g: &Graph, psi: &VoltageAssignment) -> Result<Graph> {
    let k = psi.k;
    let mut edges = Vec::with_capacity(g.edges.len() * k);
    for &(u, v) in &g.edges {
        let p = psi.get(u, v).ok_or(Error::MissingVoltage(u, v))?;
        for j in 0..k {
            edges.push((u * k + p.apply(j), v * k + j));
        }
    }
    Ok(Graph {
        num_nodes: g.num_nodes * k,
        edges,
    })
}

/// The bijection `η: (base face, sheet) → covering face`, per dimension.
///
/// `sheets[d + 1][g][j]` is the index in `S_d(K)` of `η(G, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberLabeling {
    pub k: usize,
    sheets: Vec<Vec<Vec<usize>>>,
    /// `base_of[d + 1][f] = (g, j)` with `η(G, j) = F`.
    base_of: Vec<Vec<(usize, usize)>>,
}

impl FiberLabeling {
    fn from_sheets(k: usize, sheets: Vec<Vec<Vec<usize>>>, cover: &SimplicialComplex) -> Self {
        let mut base_of: Vec<Vec<(usize, usize)>> = (0..sheets.len())
            .map(|l| vec![(usize::MAX, 0); cover.count(l as isize - 1)])
            .collect();
        for (l, level) in sheets.iter().enumerate() {
            for (g, fiber) in level.iter().enumerate() {
                for (j, &f) in fiber.iter().enumerate() {
                    base_of[l][f] = (g, j);
                }
            }
        }
        FiberLabeling { k, sheets, base_of }
    }

    /// Index in `S_dim(K)` of `η(G, j)` where `G` is the `g`-th base face.
    pub fn eta(&self, dim: isize, g: usize, j: usize) -> usize {
        self.sheets[(dim + 1) as usize][g][j]
    }

    /// `(g, j)` with `η(G, j)` equal to the `f`-th covering face.
    pub fn project(&self, dim: isize, f: usize) -> (usize, usize) {
        self.base_of[(dim + 1) as usize][f]
    }

    /// Reorders the sheets over `S_dim(M)`: new sheet `j` of the `g`-th face
    /// is old sheet `relabel[g](j)`.
    fn relabeled(&self, dim: isize, relabel: &[Permutation], cover: &SimplicialComplex) -> Self {
        let mut sheets = self.sheets.clone();
        let level = &mut sheets[(dim + 1) as usize];
        for (g, sigma) in relabel.iter().enumerate() {
            let old = level[g].clone();
            for j in 0..self.k {
                level[g][j] = old[sigma.apply(j)];
            }
        }
        FiberLabeling::from_sheets(self.k, sheets, cover)
    }
}

/// A verified strong covering `φ: K → M`.
#[derive(Clone, Debug)]
pub struct CoveringMap {
    pub cover: SimplicialComplex,
    pub base: SimplicialComplex,
    pub vertex_map: BTreeMap<usize, usize>,
    pub degree: usize,
    pub labeling: FiberLabeling,
}

impl CoveringMap {
    /// `φ` applied to `face`'s vertices in canonical order.
    pub fn image_sequence(&self, face: &Face) -> Vec<usize> {
        face.vertices().iter().map(|v| self.vertex_map[v]).collect()
    }

    pub fn image(&self, face: &Face) -> Face {
        let mut v = self.image_sequence(face);
        v.sort_unstable();
        Face::from_sorted(v)
    }

    /// `sgn([F], [φ(F)])` for a canonically oriented covering face.
    pub fn orientation_sign(&self, face: &Face) -> i8 {
        relative_orientation_sign(
            &OrientedFace::canonical(face.clone()),
            &self.image_sequence(face),
        )
        .expect("verified coverings are bijective on faces")
    }

    pub fn is_connected(&self) -> bool {
        self.cover.is_connected()
    }
}

/// Checks the covering axioms and builds the canonical fiber labeling.
pub fn verify_covering(
    cover: &SimplicialComplex,
    base: &SimplicialComplex,
    vertex_map: &BTreeMap<usize, usize>,
) -> Result<CoveringMap> {
    verify_covering_with(cover, base, vertex_map, true)
}

/// As [`verify_covering`], optionally accepting a disconnected cover.
pub fn verify_covering_with(
    cover: &SimplicialComplex,
    base: &SimplicialComplex,
    vertex_map: &BTreeMap<usize, usize>,
    require_connected: bool,
) -> Result<CoveringMap> {
    if require_connected && !cover.is_connected() {
        return Err(CoveringViolation::Disconnected {
            components: cover.components().len(),
        }
        .into());
    }
    for v in cover.vertices() {
        if !vertex_map.contains_key(&v) {
            return Err(CoveringViolation::UnmappedVertex(v).into());
        }
    }
    let top = cover.top_dim().max(base.top_dim());
    // fibers[d + 1][g] = covering faces over the g-th base face
    let mut fibers: Vec<Vec<Vec<usize>>> = (0..=top + 1)
        .map(|l| vec![Vec::new(); base.count(l - 1)])
        .collect();
    for d in 0..=cover.top_dim() {
        for (n, face) in cover.faces(d).iter().enumerate() {
            let seq: Vec<usize> = face.vertices().iter().map(|v| vertex_map[v]).collect();
            let image = Face::new(seq)
                .map_err(|_| CoveringViolation::NotBijectiveOnFace { face: face.clone() })?;
            let g = base
                .index_of(&image)
                .ok_or_else(|| CoveringViolation::NotSimplicial { face: face.clone() })?;
            fibers[(d + 1) as usize][g].push(n);
        }
    }
    for d in 0..=base.top_dim() {
        for (g, fiber) in fibers[(d + 1) as usize].iter().enumerate() {
            for (a, &fa) in fiber.iter().enumerate() {
                for &fb in &fiber[a + 1..] {
                    let (x, y) = (&cover.faces(d)[fa], &cover.faces(d)[fb]);
                    if x.vertices()
                        .iter()
                        .any(|v| y.vertices().binary_search(v).is_ok())
                    {
                        return Err(CoveringViolation::FiberOverlap {
                            base: base.faces(d)[g].clone(),
                            first: x.clone(),
                            second: y.clone(),
                        }
                        .into());
                    }
                }
            }
        }
    }
    // strong lifting condition
    for d in 0..base.top_dim() {
        let mut cofacet_images: Vec<BTreeSet<Face>> = vec![BTreeSet::new(); cover.count(d)];
        for cofacet in cover.faces(d + 1) {
            let img = image_of(cofacet, vertex_map);
            for j in 0..cofacet.len() {
                let f = cover.index_of(&cofacet.omit(j)).unwrap();
                cofacet_images[f].insert(img.clone());
            }
        }
        for (g, base_face) in base.faces(d).iter().enumerate() {
            let base_cofacets: Vec<&Face> = base
                .faces(d + 1)
                .iter()
                .filter(|c| c.contains_face(base_face))
                .collect();
            for &f in &fibers[(d + 1) as usize][g] {
                for bc in &base_cofacets {
                    if !cofacet_images[f].contains(*bc) {
                        return Err(CoveringViolation::StrongLiftMissing {
                            face: cover.faces(d)[f].clone(),
                            base: base_face.clone(),
                            base_cofacet: (*bc).clone(),
                        }
                        .into());
                    }
                }
            }
        }
    }
    let degree = fibers
        .get(1)
        .and_then(|level| level.first())
        .map(|f| f.len())
        .unwrap_or(0);
    for d in 0..=base.top_dim() {
        for (g, fiber) in fibers[(d + 1) as usize].iter().enumerate() {
            if fiber.len() != degree || degree == 0 {
                return Err(CoveringViolation::FiberSize {
                    base: base.faces(d)[g].clone(),
                    size: fiber.len(),
                    expected: degree,
                }
                .into());
            }
        }
    }
    // the empty face is its own fiber and carries no sheets
    if let Some(level) = fibers.first_mut() {
        for f in level.iter_mut() {
            f.clear();
        }
    }
    let labeling = FiberLabeling::from_sheets(degree, fibers, cover);
    Ok(CoveringMap {
        cover: cover.clone(),
        base: base.clone(),
        vertex_map: vertex_map.clone(),
        degree,
        labeling,
    })
}

fn image_of(face: &Face, vertex_map: &BTreeMap<usize, usize>) -> Face {
    let mut v: Vec<usize> = face.vertices().iter().map(|x| vertex_map[x]).collect();
    v.sort_unstable();
    Face::from_sorted(v)
}

/// A lift built from 1-skeleton voltages.
#[derive(Clone, Debug)]
pub struct DerivedComplex {
    pub complex: SimplicialComplex,
    pub vertex_map: BTreeMap<usize, usize>,
    /// Verified for every axiom except connectedness.
    pub covering: CoveringMap,
    pub components: Vec<Vec<usize>>,
    /// `η(G, j)` is the lift of `G` with sheet `j` at its last vertex. The
    /// induced incidence voltages are then 1-skeleton voltages or the
    /// identity, so they generate a subgroup of the 1-skeleton group.
    pub natural_labeling: FiberLabeling,
}

impl DerivedComplex {
    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }

    /// The covering map, or a disconnection report.
    pub fn connected_cover(self) -> Result<CoveringMap> {
        if self.is_connected() {
            Ok(self.covering)
        } else {
            Err(CoveringViolation::Disconnected {
                components: self.components.len(),
            }
            .into())
        }
    }
}

/// The 1-skeleton of `m` as a graph on vertex positions in `S_0(m)`.
pub fn one_skeleton(m: &SimplicialComplex) -> Graph {
    let edges = m
        .faces(1)
        .iter()
        .map(|e| {
            let a = m
                .index_of(&Face::from_sorted(vec![e.vertices()[0]]))
                .unwrap();
            let b = m
                .index_of(&Face::from_sorted(vec![e.vertices()[1]]))
                .unwrap();
            (a, b)
        })
        .collect();
    Graph {
        num_nodes: m.count(0),
        edges,
    }
}

/// Checks `ψ(u→w) = ψ(u→v) ∘ ψ(v→w)` on every 2-face `u < v < w`.
pub fn check_cocycle(m: &SimplicialComplex, psi: &VoltageAssignment) -> Result<()> {
    let pos = |v: usize| m.index_of(&Face::from_sorted(vec![v])).unwrap();
    for e in one_skeleton(m).edges {
        if psi.get(e.0, e.1).is_none() {
            return Err(Error::MissingVoltage(m.vertices()[e.0], m.vertices()[e.1]));
        }
    }
    for tri in m.faces(2) {
        let (u, v, w) = (
            pos(tri.vertices()[0]),
            pos(tri.vertices()[1]),
            pos(tri.vertices()[2]),
        );
        let lhs = psi.get(u, w).unwrap();
        let rhs = psi.get(u, v).unwrap().compose(&psi.get(v, w).unwrap());
        if lhs != rhs {
            return Err(Error::CocycleViolation(tri.clone()));
        }
    }
    Ok(())
}

/// Lifts `m` along voltages on its 1-skeleton (nodes are vertex positions).
///
/// Covering vertex `(p, j)` gets id `p * k + j`. A base face `v_0 < .. < v_d`
/// lifts once per sheet `j` of its last vertex, with sheet `ψ(v_a→v_d)(j)`
/// at `v_a`.
pub fn derived_complex(m: &SimplicialComplex, psi: &VoltageAssignment) -> Result<DerivedComplex> {
    check_cocycle(m, psi)?;
    let k = psi.k;
    let pos = |v: usize| m.index_of(&Face::from_sorted(vec![v])).unwrap();
    let mut lifted = Vec::new();
    for facet in m.facets() {
        let ps: Vec<usize> = facet.vertices().iter().map(|&v| pos(v)).collect();
        let last = *ps.last().unwrap();
        for j in 0..k {
            let face: Vec<usize> = ps
                .iter()
                .map(|&p| {
                    let sheet = if p == last {
                        j
                    } else {
                        psi.get(p, last).unwrap().apply(j)
                    };
                    p * k + sheet
                })
                .collect();
            lifted.push(face);
        }
    }
    let complex = SimplicialComplex::build(&lifted, m.include_empty())?;
    let verts = m.vertices();
    let vertex_map: BTreeMap<usize, usize> = complex
        .vertices()
        .into_iter()
        .map(|id| (id, verts[id / k]))
        .collect();
    let covering = verify_covering_with(&complex, m, &vertex_map, false)?;
    let components = complex.components();
    let mut sheets = vec![Vec::new()];
    for d in 0..=m.top_dim() {
        let level = m
            .faces(d)
            .iter()
            .map(|g| {
                let ps: Vec<usize> = g.vertices().iter().map(|&v| pos(v)).collect();
                let last = *ps.last().unwrap();
                (0..k)
                    .map(|j| {
                        let lifted = ps
                            .iter()
                            .map(|&p| {
                                p * k
                                    + if p == last {
                                        j
                                    } else {
                                        psi.get(p, last).unwrap().apply(j)
                                    }
                            })
                            .collect();
                        complex
                            .index_of(&Face::from_sorted(lifted))
                            .expect("lifted faces are in the closure")
                    })
                    .collect()
            })
            .collect();
        sheets.push(level);
    }
    let natural_labeling = FiberLabeling::from_sheets(k, sheets, &complex);
    Ok(DerivedComplex {
        complex,
        vertex_map,
        covering,
        components,
        natural_labeling,
    })
}

/// Voltages on `B_i(M)` stored per incidence edge as `ψ(Ḡ, G)`: sheet `j`
/// of `G` is incident to sheet `ψ(Ḡ, G)(j)` of `Ḡ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceVoltage {
    pub k: usize,
    pub graph: IncidenceGraph,
    /// Aligned with `graph.edges`.
    pub perms: Vec<Permutation>,
}

impl IncidenceVoltage {
    pub fn identity(m: &SimplicialComplex, i: isize, k: usize) -> Result<Self> {
        let graph = incidence_graph(m, i)?;
        let perms = vec![Permutation::identity(k); graph.edges.len()];
        Ok(IncidenceVoltage { k, graph, perms })
    }

    pub fn dim(&self) -> isize {
        self.graph.dim
    }

    /// `ψ(Ḡ, G)` by base faces.
    pub fn get(&self, face: &Face, cofacet: &Face) -> Option<&Permutation> {
        let l = self.graph.left.iter().position(|f| f == face)?;
        let r = self.graph.right.iter().position(|f| f == cofacet)?;
        self.graph.edge_index(l, r).map(|e| &self.perms[e])
    }

    pub fn set(&mut self, face: &Face, cofacet: &Face, perm: Permutation) -> Result<()> {
        if perm.degree() != self.k {
            return Err(Error::WrongFold {
                expected: self.k,
                got: perm.degree(),
            });
        }
        let l = self.graph.left.iter().position(|f| f == face);
        let r = self.graph.right.iter().position(|f| f == cofacet);
        match (l, r) {
            (Some(l), Some(r)) => match self.graph.edge_index(l, r) {
                Some(e) => {
                    self.perms[e] = perm;
                    Ok(())
                }
                None => Err(Error::MalformedInput(format!(
                    "({face}, {cofacet}) is not an incidence"
                ))),
            },
            _ => Err(Error::MalformedInput(format!(
                "({face}, {cofacet}) is not an incidence"
            ))),
        }
    }

    /// The same voltages on `B_i(M)` as a graph, keyed `(Ḡ node, G node)`.
    pub fn to_voltage_assignment(&self) -> VoltageAssignment {
        let n = self.graph.left.len();
        let mut psi = VoltageAssignment::new(self.k);
        for (&(l, r), p) in self.graph.edges.iter().zip(&self.perms) {
            psi.set(n + r, l, p.clone()).unwrap();
        }
        psi
    }

    /// Incidences carrying a non-identity voltage.
    pub fn nontrivial(&self) -> Vec<(Face, Face, Permutation)> {
        self.graph
            .edges
            .iter()
            .zip(&self.perms)
            .filter(|(_, p)| !p.is_identity())
            .map(|(&(l, r), p)| {
                (
                    self.graph.left[l].clone(),
                    self.graph.right[r].clone(),
                    p.clone(),
                )
            })
            .collect()
    }
}

fn check_cover_dim(cov: &CoveringMap, i: isize) -> Result<()> {
    if i < 0 || i >= cov.base.top_dim() {
        return Err(Error::DimensionOutOfRange {
            dim: i,
            reason: format!("incidence voltages need 0 <= i < {}", cov.base.top_dim()),
        });
    }
    Ok(())
}

/// Voltages on `B_i(M)` induced by the covering's canonical labeling.
pub fn induced_incidence_voltage(cov: &CoveringMap, i: isize) -> Result<IncidenceVoltage> {
    induced_incidence_voltage_with(cov, i, &cov.labeling)
}

/// Voltages on `B_i(M)` induced by an arbitrary fiber labeling.
pub fn induced_incidence_voltage_with(
    cov: &CoveringMap,
    i: isize,
    labeling: &FiberLabeling,
) -> Result<IncidenceVoltage> {
    check_cover_dim(cov, i)?;
    let graph = incidence_graph(&cov.base, i)?;
    let k = cov.degree;
    let mut perms = Vec::with_capacity(graph.edges.len());
    for &(g, gbar) in &graph.edges {
        let mut images = Vec::with_capacity(k);
        for j in 0..k {
            let face = &cov.cover.faces(i)[labeling.eta(i, g, j)];
            let l = (0..k)
                .find(|&l| cov.cover.faces(i + 1)[labeling.eta(i + 1, gbar, l)].contains_face(face))
                .expect("strong covering lifts every incidence");
            images.push(l);
        }
        perms.push(Permutation::from_images(images)?);
    }
    Ok(IncidenceVoltage { k, graph, perms })
}

/// A labeling whose induced voltages on `B_i(M)` are the identity along a
/// breadth-first spanning forest of `B_i(M)`.
pub fn tree_normalized_labeling(cov: &CoveringMap, i: isize) -> Result<FiberLabeling> {
    tree_normalized_labeling_avoiding(cov, i, None)
}

/// As [`tree_normalized_labeling`], keeping the incidence `(face, cofacet)`
/// out of the spanning forest when it lies on a cycle of `B_i(M)`.
pub fn tree_normalized_labeling_avoiding(
    cov: &CoveringMap,
    i: isize,
    avoid: Option<(&Face, &Face)>,
) -> Result<FiberLabeling> {
    let psi = induced_incidence_voltage(cov, i)?;
    let skip = avoid.and_then(|(f, c)| {
        let l = psi.graph.left.iter().position(|x| x == f)?;
        let r = psi.graph.right.iter().position(|x| x == c)?;
        psi.graph.edge_index(l, r)
    });
    let k = cov.degree;
    let n_left = psi.graph.left.len();
    let graph = psi.graph.as_graph();
    let mut sigma: Vec<Option<Permutation>> = vec![None; graph.num_nodes];
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph.num_nodes];
    for (e, &(a, b)) in graph.edges.iter().enumerate() {
        if Some(e) == skip {
            continue;
        }
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    for root in 0..graph.num_nodes {
        if sigma[root].is_some() {
            continue;
        }
        sigma[root] = Some(Permutation::identity(k));
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let su = sigma[u].clone().unwrap();
            for &(v, e) in &adj[u] {
                if sigma[v].is_some() {
                    continue;
                }
                let p = &psi.perms[e];
                // new voltage σ_Ḡ⁻¹ ψ σ_G is the identity on tree edges
                sigma[v] = Some(if u < n_left {
                    p.compose(&su)
                } else {
                    p.inverse().compose(&su)
                });
                queue.push_back(v);
            }
        }
    }
    let sigma: Vec<Permutation> = sigma.into_iter().map(|s| s.unwrap()).collect();
    let relabeled = cov.labeling.relabeled(i, &sigma[..n_left], &cov.cover);
    Ok(relabeled.relabeled(i + 1, &sigma[n_left..], &cov.cover))
}

/// Whether `η` maps the derived graph of `(B_i(M), ψ)` onto `B_i(K)`.
pub fn labeling_is_isomorphism(
    cov: &CoveringMap,
    psi: &IncidenceVoltage,
    labeling: &FiberLabeling,
) -> Result<bool> {
    let i = psi.dim();
    let k = cov.degree;
    let derived = derived_graph(&psi.graph.as_graph(), &psi.to_voltage_assignment())?;
    let target = incidence_graph(&cov.cover, i)?.as_graph();
    let n_left_m = psi.graph.left.len();
    let n_left_k = cov.cover.count(i);
    let relabel = |node: usize| {
        let (u, j) = (node / k, node % k);
        if u < n_left_m {
            labeling.eta(i, u, j)
        } else {
            n_left_k + labeling.eta(i + 1, u - n_left_m, j)
        }
    };
    let mapped: BTreeSet<(usize, usize)> = derived
        .edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (relabel(a), relabel(b));
            (x.min(y), x.max(y))
        })
        .collect();
    Ok(mapped == target.edge_set() && mapped.len() == derived.edges.len())
}

/// Diagonal of `±1` indexed by `(base face, sheet)` as `g * k + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignDiagonal {
    pub dim: isize,
    pub entries: Vec<i8>,
}

impl SignDiagonal {
    pub fn to_matrix(&self) -> DMatrix<i64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.entries.len(),
            self.entries.iter().map(|&s| s as i64),
        ))
    }
}

/// `D_i(M)^ψ` built entry by entry: row `(Ḡ, l)`, column `(G, j)` holds
/// `sgn([G], ∂[Ḡ])` when `l = ψ(Ḡ, G)(j)`.
pub fn derived_coboundary_entrywise(
    m: &SimplicialComplex,
    psi: &IncidenceVoltage,
) -> Result<DMatrix<i64>> {
    let i = psi.dim();
    let k = psi.k;
    let d = coboundary_matrix(m, i)?;
    let mut out = DMatrix::zeros(d.nrows() * k, d.ncols() * k);
    for (&(g, gbar), p) in psi.graph.edges.iter().zip(&psi.perms) {
        for j in 0..k {
            out[(gbar * k + p.apply(j), g * k + j)] = d.entries[(gbar, g)];
        }
    }
    Ok(out)
}

/// The pieces of `D_i(K) = Λ_{i+1} D_i(M)^ψ Λ_i`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub lambda_i: SignDiagonal,
    pub lambda_next: SignDiagonal,
    pub derived: DMatrix<i64>,
    /// `D_i(K)` with rows and columns relabeled through `η`.
    pub relabeled: DMatrix<i64>,
    /// Largest absolute entry of `relabeled - Λ_{i+1} D^ψ Λ_i`.
    pub residual: i64,
}

pub fn lambda_and_factorization(cov: &CoveringMap, i: isize) -> Result<Factorization> {
    lambda_and_factorization_with(cov, i, &cov.labeling)
}

pub fn lambda_and_factorization_with(
    cov: &CoveringMap,
    i: isize,
    labeling: &FiberLabeling,
) -> Result<Factorization> {
    let psi = induced_incidence_voltage_with(cov, i, labeling)?;
    let k = cov.degree;
    let lambda = |dim: isize| SignDiagonal {
        dim,
        entries: (0..cov.base.count(dim))
            .flat_map(|g| (0..k).map(move |j| (g, j)))
            .map(|(g, j)| cov.orientation_sign(&cov.cover.faces(dim)[labeling.eta(dim, g, j)]))
            .collect(),
    };
    let lambda_i = lambda(i);
    let lambda_next = lambda(i + 1);
    let derived = derived_coboundary_entrywise(&cov.base, &psi)?;
    let dk = coboundary_matrix(&cov.cover, i)?;
    let relabeled = DMatrix::from_fn(derived.nrows(), derived.ncols(), |r, c| {
        let row = labeling.eta(i + 1, r / k, r % k);
        let col = labeling.eta(i, c / k, c % k);
        dk.entries[(row, col)]
    });
    let product = lambda_next.to_matrix() * &derived * lambda_i.to_matrix();
    let residual = (&relabeled - product)
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or(0);
    Ok(Factorization {
        lambda_i,
        lambda_next,
        derived,
        relabeled,
        residual,
    })
}
