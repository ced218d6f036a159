//! Finite abstract simplicial complexes with canonical orientations,
//! face weights, and integer coboundary matrices.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::sorting_sign;

/// A face stored in canonical (strictly increasing) vertex order.
///
/// The empty face is allowed and has dimension -1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Face(Vec<usize>);

impl Face {
    /// Sorts `vertices`; fails on a repeated vertex.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedInput(format!(
                "repeated vertex in {vertices:?}"
            )));
        }
        Ok(Face(vertices))
    }

    pub fn empty() -> Self {
        Face(Vec::new())
    }

    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Face(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains_face(&self, other: &Face) -> bool {
        other.0.iter().all(|v| self.0.binary_search(v).is_ok())
    }

    /// The face with the vertex at position `j` removed.
    pub fn omit(&self, j: usize) -> Face {
        let mut v = self.0.clone();
        v.remove(j);
        Face(v)
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (n, v) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// A face together with an orientation relative to its canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedFace {
    pub base: Face,
    pub parity: i8,
}

impl OrientedFace {
    pub fn canonical(base: Face) -> Self {
        OrientedFace { base, parity: 1 }
    }

    /// Orientation given by an ordered vertex sequence.
    pub fn from_sequence(seq: &[usize]) -> Result<Self> {
        let parity = sorting_sign(seq)
            .ok_or_else(|| Error::MalformedInput(format!("repeated vertex in {seq:?}")))?;
        Ok(OrientedFace {
            base: Face::new(seq.to_vec())?,
            parity,
        })
    }
}

/// Boundary faces of `f` with signs `(-1)^j * parity`, omitting the `j`-th
/// canonical vertex. The empty face has no boundary.
pub fn boundary_faces(f: &OrientedFace) -> Vec<(Face, i8)> {
    (0..f.base.len())
        .map(|j| {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            (f.base.omit(j), sign * f.parity)
        })
        .collect()
}

/// `sgn([F], [φ(F)])`: +1 when the pointwise image of `f`'s vertices (in
/// `f`'s order) is an even arrangement of the image face.
pub fn relative_orientation_sign(f: &OrientedFace, image_vertex_order: &[usize]) -> Result<i8> {
    if image_vertex_order.len() != f.base.len() {
        return Err(Error::MalformedInput(format!(
            "image {image_vertex_order:?} has the wrong length for {}",
            f.base
        )));
    }
    sorting_sign(image_vertex_order).ok_or_else(|| Error::NotABijection {
        face: f.base.clone(),
    })
}

/// A downward-closed family of faces, indexed per dimension in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    /// `faces_by_dim[d + 1]` lists the `d`-faces.
    faces_by_dim: Vec<Vec<Face>>,
    index: HashMap<Face, usize>,
    include_empty: bool,
    connected: bool,
}

impl SimplicialComplex {
    /// Downward closure of `facets`.
    pub fn build(facets: &[Vec<usize>], include_empty: bool) -> Result<Self> {
        if facets.is_empty() {
            return Err(Error::MalformedInput("no facets given".into()));
        }
        let mut closure: BTreeMap<usize, BTreeSet<Face>> = BTreeMap::new();
        for facet in facets {
            if facet.is_empty() {
                return Err(Error::MalformedInput("empty facet".into()));
            }
            let face = Face::new(facet.clone())?;
            if face.len() > 24 {
                return Err(Error::MalformedInput(format!(
                    "facet {face} is too large to close"
                )));
            }
            let n = face.len();
            for mask in 1u32..(1u32 << n) {
                let sub: Vec<usize> = (0..n)
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| face.0[b])
                    .collect();
                closure.entry(sub.len()).or_default().insert(Face(sub));
            }
        }
        let top = *closure.keys().next_back().unwrap();
        let mut faces_by_dim = vec![Vec::new(); top + 1];
        if include_empty {
            faces_by_dim[0].push(Face::empty());
        }
        for (len, set) in closure {
            faces_by_dim[len] = set.into_iter().collect();
        }
        Ok(Self::from_levels(faces_by_dim, include_empty))
    }

    fn from_levels(faces_by_dim: Vec<Vec<Face>>, include_empty: bool) -> Self {
        let mut index = HashMap::new();
        for level in &faces_by_dim {
            for (n, f) in level.iter().enumerate() {
                index.insert(f.clone(), n);
            }
        }
        let mut complex = SimplicialComplex {
            faces_by_dim,
            index,
            include_empty,
            connected: false,
        };
        complex.connected = complex.components().len() == 1;
        complex
    }

    pub fn include_empty(&self) -> bool {
        self.include_empty
    }

    pub fn top_dim(&self) -> isize {
        self.faces_by_dim.len() as isize - 2
    }

    /// The `dim`-faces in canonical order; empty outside `-1..=top_dim`.
    pub fn faces(&self, dim: isize) -> &[Face] {
        if dim < -1 {
            return &[];
        }
        self.faces_by_dim
            .get((dim + 1) as usize)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn count(&self, dim: isize) -> usize {
        self.faces(dim).len()
    }

    pub fn contains(&self, face: &Face) -> bool {
        self.index.contains_key(face)
    }

    /// Position of `face` within its dimension.
    pub fn index_of(&self, face: &Face) -> Option<usize> {
        self.index.get(face).copied()
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.faces(0).iter().map(|f| f.0[0]).collect()
    }

    pub fn num_faces(&self) -> usize {
        self.faces_by_dim.iter().map(|l| l.len()).sum()
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Faces of dimension >= 0 that are not contained in a larger face.
    pub fn facets(&self) -> Vec<Face> {
        let mut out = Vec::new();
        for d in 0..=self.top_dim() {
            let has_cofacet: BTreeSet<&Face> = self
                .faces(d + 1)
                .iter()
                .flat_map(|c| (0..c.len()).map(move |j| c.omit(j)))
                .filter_map(|f| self.index.get_key_value(&f).map(|(k, _)| k))
                .collect();
            out.extend(
                self.faces(d)
                    .iter()
                    .filter(|f| !has_cofacet.contains(f))
                    .cloned(),
            );
        }
        out
    }

    /// Cofacets of `face` as indices into `faces(dim + 1)`.
    pub fn cofacets(&self, face: &Face) -> Vec<usize> {
        self.faces(face.dim() + 1)
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains_face(face))
            .map(|(n, _)| n)
            .collect()
    }

    /// Vertex sets of the connected components of the 1-skeleton.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let verts = self.vertices();
        let pos: HashMap<usize, usize> = verts.iter().enumerate().map(|(n, &v)| (v, n)).collect();
        let mut uf = UnionFind::new(verts.len());
        for e in self.faces(1) {
            uf.union(pos[&e.0[0]], pos[&e.0[1]]);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (n, &v) in verts.iter().enumerate() {
            groups.entry(uf.find(n)).or_default().push(v);
        }
        let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
        comps.sort();
        comps
    }

    /// The complex rebuilt from its own facets, optionally toggling the
    /// empty face.
    pub fn with_empty_face(&self, include_empty: bool) -> Self {
        let mut levels = self.faces_by_dim.clone();
        levels[0] = if include_empty {
            vec![Face::empty()]
        } else {
            Vec::new()
        };
        Self::from_levels(levels, include_empty)
    }

    fn check_coboundary_dim(&self, i: isize) -> Result<()> {
        if i < -1 || i > self.top_dim() {
            return Err(Error::DimensionOutOfRange {
                dim: i,
                reason: format!("coboundary needs -1 <= i <= {}", self.top_dim()),
            });
        }
        if i == -1 && !self.include_empty {
            return Err(Error::DimensionOutOfRange {
                dim: i,
                reason: "complex built without the empty face".into(),
            });
        }
        Ok(())
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Integer matrix of `δ_i`: rows indexed by `S_{i+1}`, columns by `S_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoboundaryMatrix {
    pub dim: isize,
    pub entries: DMatrix<i64>,
}

impl CoboundaryMatrix {
    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        self.entries.map(|x| x as f64)
    }

    /// Entrywise absolute value, the incidence matrix `|D_i|`.
    pub fn incidence(&self) -> DMatrix<i64> {
        self.entries.map(|x| x.abs())
    }
}

/// `D_i` with `sgn([F], ∂[F̄])` in canonical orientations.
pub fn coboundary_matrix(k: &SimplicialComplex, i: isize) -> Result<CoboundaryMatrix> {
    k.check_coboundary_dim(i)?;
    let rows = k.faces(i + 1);
    let cols = k.faces(i);
    let mut d = DMatrix::zeros(rows.len(), cols.len());
    for (r, cofacet) in rows.iter().enumerate() {
        for (face, sign) in boundary_faces(&OrientedFace::canonical(cofacet.clone())) {
            let c = k.index_of(&face).expect("complex is downward closed");
            d[(r, c)] = sign as i64;
        }
    }
    Ok(CoboundaryMatrix { dim: i, entries: d })
}

/// How face weights (the cochain inner products) are chosen.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum WeightScheme {
    #[default]
    Combinatorial,
    Normalized,
    Explicit(BTreeMap<Face, f64>),
}

impl WeightScheme {
    pub fn name(&self) -> &'static str {
        match self {
            WeightScheme::Combinatorial => "combinatorial",
            WeightScheme::Normalized => "normalized",
            WeightScheme::Explicit(_) => "explicit",
        }
    }
}

/// Positive weights aligned with a complex's face indexing.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceWeights {
    by_dim: Vec<Vec<f64>>,
}

impl FaceWeights {
    /// Weights of the `dim`-faces; empty outside the complex's range.
    pub fn of_dim(&self, dim: isize) -> &[f64] {
        if dim < -1 {
            return &[];
        }
        self.by_dim
            .get((dim + 1) as usize)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn diag(&self, dim: isize) -> DVector<f64> {
        DVector::from_column_slice(self.of_dim(dim))
    }

    pub fn get(&self, k: &SimplicialComplex, face: &Face) -> Option<f64> {
        let n = k.index_of(face)?;
        self.of_dim(face.dim()).get(n).copied()
    }
}

/// Face weights for `scheme`.
///
/// Normalized weights run top-down: facets get 1, every other face the sum
/// of its cofacets' weights. The recursion continues to the empty face.
pub fn compute_weights(k: &SimplicialComplex, scheme: &WeightScheme) -> Result<FaceWeights> {
    let levels = (k.top_dim() + 2) as usize;
    let mut by_dim: Vec<Vec<f64>> = (0..levels)
        .map(|l| vec![1.0; k.count(l as isize - 1)])
        .collect();
    match scheme {
        WeightScheme::Combinatorial => {}
        WeightScheme::Normalized => {
            for d in (-1..k.top_dim()).rev() {
                let upper = by_dim[(d + 2) as usize].clone();
                let mut sums = vec![0.0; k.count(d)];
                for (r, cofacet) in k.faces(d + 1).iter().enumerate() {
                    for j in 0..cofacet.len() {
                        let c = k.index_of(&cofacet.omit(j)).unwrap();
                        sums[c] += upper[r];
                    }
                }
                for (w, s) in by_dim[(d + 1) as usize].iter_mut().zip(sums) {
                    if s > 0.0 {
                        *w = s;
                    }
                }
            }
        }
        WeightScheme::Explicit(values) => {
            for d in -1..=k.top_dim() {
                for (n, face) in k.faces(d).iter().enumerate() {
                    let w = *values
                        .get(face)
                        .ok_or_else(|| Error::MissingWeight(face.clone()))?;
                    if !w.is_finite() || w <= 0.0 {
                        return Err(Error::InvalidWeight {
                            face: face.clone(),
                            weight: w,
                        });
                    }
                    by_dim[(d + 1) as usize][n] = w;
                }
            }
        }
    }
    Ok(FaceWeights { by_dim })
}

/// A real cochain in the elementary-cochain basis of `S_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub dim: isize,
    pub values: DVector<f64>,
}

impl Cochain {
    pub fn zeros(k: &SimplicialComplex, dim: isize) -> Self {
        Cochain {
            dim,
            values: DVector::zeros(k.count(dim)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_triangle() -> SimplicialComplex {
        SimplicialComplex::build(&[vec![0, 1, 2]], true).unwrap()
    }

    fn hollow_triangle() -> SimplicialComplex {
        SimplicialComplex::build(&[vec![0, 1], vec![1, 2], vec![0, 2]], true).unwrap()
    }

    fn f(v: &[usize]) -> Face {
        Face::new(v.to_vec()).unwrap()
    }

    #[test]
    fn closure_of_one_triangle() {
        let k = full_triangle();
        assert_eq!(k.count(-1), 1);
        assert_eq!(k.count(0), 3);
        assert_eq!(k.count(1), 3);
        assert_eq!(k.count(2), 1);
        assert_eq!(k.top_dim(), 2);
        assert!(k.is_connected());
    }

    #[test]
    fn hollow_triangle_has_no_two_faces() {
        let k = hollow_triangle();
        assert_eq!(k.count(1), 3);
        assert_eq!(k.count(2), 0);
        assert_eq!(k.top_dim(), 1);
    }

    #[test]
    fn mixed_facets() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2], vec![2, 3]], true).unwrap();
        assert_eq!(k.top_dim(), 2);
        assert_eq!(
            k.faces(1),
            &[f(&[0, 1]), f(&[0, 2]), f(&[1, 2]), f(&[2, 3])]
        );
        assert_eq!(k.facets(), vec![f(&[2, 3]), f(&[0, 1, 2])]);
    }

    #[test]
    fn duplicate_vertex_rejected() {
        assert!(matches!(
            SimplicialComplex::build(&[vec![0, 0, 1]], true),
            Err(Error::MalformedInput(_))
        ));
        assert!(SimplicialComplex::build(&[], true).is_err());
    }

    #[test]
    fn without_empty_face() {
        let k = SimplicialComplex::build(&[vec![0, 1]], false).unwrap();
        assert_eq!(k.count(-1), 0);
        assert!(coboundary_matrix(&k, -1).is_err());
        assert_eq!(k.with_empty_face(true).count(-1), 1);
    }

    #[test]
    fn boundary_signs() {
        let tri = boundary_faces(&OrientedFace::canonical(f(&[0, 1, 2])));
        assert_eq!(
            tri,
            vec![(f(&[1, 2]), 1), (f(&[0, 2]), -1), (f(&[0, 1]), 1)]
        );
        let pt = boundary_faces(&OrientedFace::canonical(f(&[5])));
        assert_eq!(pt, vec![(Face::empty(), 1)]);
        let tet = boundary_faces(&OrientedFace::canonical(f(&[0, 1, 2, 3])));
        let signs: Vec<i8> = tet.iter().map(|(_, s)| *s).collect();
        assert_eq!(signs, vec![1, -1, 1, -1]);
        assert_eq!(tet[0].0, f(&[1, 2, 3]));
        assert_eq!(tet[3].0, f(&[0, 1, 2]));
    }

    #[test]
    fn oriented_parity_flips_boundary() {
        let odd = OrientedFace::from_sequence(&[1, 0]).unwrap();
        assert_eq!(odd.parity, -1);
        assert_eq!(boundary_faces(&odd), vec![(f(&[1]), -1), (f(&[0]), 1)]);
    }

    #[test]
    fn coboundary_examples() {
        let k = full_triangle();
        let d1 = coboundary_matrix(&k, 1).unwrap();
        assert_eq!(d1.entries, DMatrix::from_row_slice(1, 3, &[1, -1, 1]));
        let dm1 = coboundary_matrix(&k, -1).unwrap();
        assert_eq!(dm1.entries, DMatrix::from_row_slice(3, 1, &[1, 1, 1]));
        let h = hollow_triangle();
        let d = coboundary_matrix(&h, 1).unwrap();
        assert_eq!((d.nrows(), d.ncols()), (0, 3));
        assert!(coboundary_matrix(&h, 2).is_err());
    }

    #[test]
    fn normalized_weights() {
        let k = full_triangle();
        let w = compute_weights(&k, &WeightScheme::Normalized).unwrap();
        assert_eq!(w.of_dim(2), &[1.0]);
        assert_eq!(w.of_dim(1), &[1.0, 1.0, 1.0]);
        assert_eq!(w.of_dim(0), &[2.0, 2.0, 2.0]);
        assert_eq!(w.of_dim(-1), &[6.0]);

        let h = hollow_triangle();
        let w = compute_weights(&h, &WeightScheme::Normalized).unwrap();
        assert_eq!(w.of_dim(1), &[1.0, 1.0, 1.0]);
        assert_eq!(w.of_dim(0), &[2.0, 2.0, 2.0]);
        assert_eq!(w.of_dim(-1), &[6.0]);
    }

    #[test]
    fn explicit_weights_validated() {
        let k = SimplicialComplex::build(&[vec![0, 1]], false).unwrap();
        let mut values = BTreeMap::new();
        values.insert(f(&[0]), 1.0);
        values.insert(f(&[1]), 2.0);
        assert!(matches!(
            compute_weights(&k, &WeightScheme::Explicit(values.clone())),
            Err(Error::MissingWeight(_))
        ));
        values.insert(f(&[0, 1]), -1.0);
        assert!(matches!(
            compute_weights(&k, &WeightScheme::Explicit(values.clone())),
            Err(Error::InvalidWeight { .. })
        ));
        values.insert(f(&[0, 1]), 2.5);
        let w = compute_weights(&k, &WeightScheme::Explicit(values)).unwrap();
        assert_eq!(w.get(&k, &f(&[0, 1])), Some(2.5));
    }

    #[test]
    fn relative_orientation() {
        let tri = OrientedFace::canonical(f(&[0, 1, 2]));
        let edge = OrientedFace::canonical(f(&[0, 1]));
        assert_eq!(relative_orientation_sign(&tri, &[4, 7, 9]).unwrap(), 1);
        assert_eq!(relative_orientation_sign(&edge, &[9, 4]).unwrap(), -1);
        assert_eq!(relative_orientation_sign(&tri, &[7, 9, 4]).unwrap(), 1);
        assert!(matches!(
            relative_orientation_sign(&edge, &[3, 3]),
            Err(Error::NotABijection { .. })
        ));
    }

    #[test]
    fn disconnected_components() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2], vec![3, 4, 5]], true).unwrap();
        assert!(!k.is_connected());
        assert_eq!(k.components(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }
}
