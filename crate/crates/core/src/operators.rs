//! Up, down and full Laplace operators of plain, incidence-signed and
//! incidence-weighted complexes.
//!
//! With `A = D_i` (entries optionally multiplied by a sign or a complex
//! weight per incidence):
//!
//! ```text
//! L_i^up   = W_i^{-1} A^* W_{i+1} A
//! L_i^down = B W_{i-1}^{-1} B^* W_i      (B = decorated D_{i-1})
//! L_i      = L_i^up + L_i^down
//! ```
//!
//! All operators are similar to Hermitian PSD matrices via `W_i^{1/2}`,
//! which is the route the eigensolver takes.

use std::collections::BTreeMap;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::complex::{
    boundary_faces, compute_weights, Face, FaceWeights, OrientedFace, SimplicialComplex,
    WeightScheme,
};
use crate::error::{Error, Result};
use crate::spectrum::{SpectrumMultiset, DEFAULT_TOL};

pub type C64 = Complex<f64>;

/// Residue allowed between a symmetrized operator and its adjoint.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianKind {
    Up,
    Down,
    Full,
}

/// `±1` signs on `(face, cofacet)` incidences.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IncidenceSigning {
    pub signs: BTreeMap<(Face, Face), i8>,
}

impl IncidenceSigning {
    /// Every incidence between `S_i` and `S_{i+1}` gets `+1` except `flips`.
    pub fn from_flips(k: &SimplicialComplex, i: isize, flips: &[(Face, Face)]) -> Result<Self> {
        let mut signs = all_incidences(k, i)
            .into_iter()
            .map(|pair| (pair, 1))
            .collect::<BTreeMap<_, _>>();
        for pair in flips {
            match signs.get_mut(pair) {
                Some(s) => *s = -1,
                None => {
                    return Err(Error::MalformedInput(format!(
                        "({}, {}) is not an incidence of dimension {i}",
                        pair.0, pair.1
                    )))
                }
            }
        }
        Ok(IncidenceSigning { signs })
    }

    pub fn get(&self, face: &Face, cofacet: &Face) -> Option<i8> {
        self.signs.get(&(face.clone(), cofacet.clone())).copied()
    }
}

/// Nonzero complex weights on `(face, cofacet)` incidences.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IncidenceWeighting {
    pub omega: BTreeMap<(Face, Face), C64>,
}

impl IncidenceWeighting {
    pub fn get(&self, face: &Face, cofacet: &Face) -> Option<C64> {
        self.omega.get(&(face.clone(), cofacet.clone())).copied()
    }
}

impl From<&IncidenceSigning> for IncidenceWeighting {
    fn from(s: &IncidenceSigning) -> Self {
        IncidenceWeighting {
            omega: s
                .signs
                .iter()
                .map(|(k, &v)| (k.clone(), C64::new(v as f64, 0.0)))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub enum Decoration {
    #[default]
    Plain,
    Signed(IncidenceSigning),
    Weighted(IncidenceWeighting),
}

impl Decoration {
    fn factor(&self, face: &Face, cofacet: &Face) -> Result<C64> {
        let missing = || Error::MissingIncidence {
            face: face.clone(),
            cofacet: cofacet.clone(),
        };
        match self {
            Decoration::Plain => Ok(C64::new(1.0, 0.0)),
            Decoration::Signed(s) => s
                .get(face, cofacet)
                .map(|v| C64::new(v as f64, 0.0))
                .ok_or_else(missing),
            Decoration::Weighted(w) => w.get(face, cofacet).ok_or_else(missing),
        }
    }
}

/// All `(F, F̄)` with `F ∈ S_i`, `F̄ ∈ S_{i+1}`, `F ∈ ∂F̄`.
pub fn all_incidences(k: &SimplicialComplex, i: isize) -> Vec<(Face, Face)> {
    let mut out = Vec::new();
    for cofacet in k.faces(i + 1) {
        for j in 0..cofacet.len() {
            out.push((cofacet.omit(j), cofacet.clone()));
        }
    }
    out.sort();
    out
}

/// Coboundary `D_i` with every incidence entry multiplied by the decoration.
pub fn decorated_coboundary(
    k: &SimplicialComplex,
    i: isize,
    decoration: &Decoration,
) -> Result<DMatrix<C64>> {
    let rows = k.faces(i + 1);
    let mut d = DMatrix::zeros(rows.len(), k.count(i));
    for (r, cofacet) in rows.iter().enumerate() {
        for (face, sign) in boundary_faces(&OrientedFace::canonical(cofacet.clone())) {
            let c = k.index_of(&face).expect("downward closed");
            d[(r, c)] = decoration.factor(&face, cofacet)? * sign as f64;
        }
    }
    Ok(d)
}

/// A Laplace operator together with the face weights `W_i` of its domain.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub dim: isize,
    pub kind: LaplacianKind,
    pub entries: DMatrix<C64>,
    /// Diagonal of `W_i`.
    pub weights: DVector<f64>,
}

impl OperatorMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.re)
    }
}

fn check_dims(k: &SimplicialComplex, i: isize, kind: LaplacianKind) -> Result<()> {
    let err = |reason: &str| {
        Err(Error::DimensionOutOfRange {
            dim: i,
            reason: reason.to_string(),
        })
    };
    if i > k.top_dim() {
        return err("above the top dimension");
    }
    match kind {
        LaplacianKind::Up | LaplacianKind::Full => {
            if i < -1 || (i == -1 && !k.include_empty()) {
                return err("no faces in this dimension");
            }
        }
        LaplacianKind::Down => {
            if i < 0 {
                return err("down Laplacian needs i >= 0");
            }
            if i == 0 && !k.include_empty() {
                return err("L_0^down needs the empty face");
            }
        }
    }
    Ok(())
}

fn diag_c(v: &[f64]) -> DMatrix<C64> {
    DMatrix::from_diagonal(&DVector::from_iterator(
        v.len(),
        v.iter().map(|&x| C64::new(x, 0.0)),
    ))
}

fn diag_inv_c(v: &[f64]) -> DMatrix<C64> {
    DMatrix::from_diagonal(&DVector::from_iterator(
        v.len(),
        v.iter().map(|&x| C64::new(1.0 / x, 0.0)),
    ))
}

/// Assembles `L_i^kind` for the given weights.
pub fn laplacian_with_weights(
    k: &SimplicialComplex,
    i: isize,
    kind: LaplacianKind,
    weights: &FaceWeights,
    decoration: &Decoration,
) -> Result<OperatorMatrix> {
    check_dims(k, i, kind)?;
    let n = k.count(i);
    let up = || -> Result<DMatrix<C64>> {
        let a = decorated_coboundary(k, i, decoration)?;
        Ok(diag_inv_c(weights.of_dim(i)) * a.adjoint() * diag_c(weights.of_dim(i + 1)) * a)
    };
    let down = || -> Result<DMatrix<C64>> {
        let b = decorated_coboundary(k, i - 1, decoration)?;
        Ok(b.clone() * diag_inv_c(weights.of_dim(i - 1)) * b.adjoint() * diag_c(weights.of_dim(i)))
    };
    let entries = match kind {
        LaplacianKind::Up => up()?,
        LaplacianKind::Down => down()?,
        LaplacianKind::Full => {
            let mut m = up()?;
            if i > 0 || (i == 0 && k.include_empty()) {
                m += down()?;
            }
            m
        }
    };
    debug_assert_eq!(entries.nrows(), n);
    Ok(OperatorMatrix {
        dim: i,
        kind,
        entries,
        weights: weights.diag(i),
    })
}

/// Assembles `L_i^kind` under a weight scheme.
pub fn laplacian_matrix(
    k: &SimplicialComplex,
    i: isize,
    kind: LaplacianKind,
    scheme: &WeightScheme,
    decoration: &Decoration,
) -> Result<OperatorMatrix> {
    let weights = compute_weights(k, scheme)?;
    laplacian_with_weights(k, i, kind, &weights, decoration)
}

/// `W^{1/2} L W^{-1/2}`, Hermitian for every operator built here.
pub fn symmetrized_form(l: &DMatrix<C64>, weights: &DVector<f64>) -> Result<DMatrix<C64>> {
    if let Some((n, &w)) = weights
        .iter()
        .enumerate()
        .find(|(_, &w)| w.is_nan() || w <= 0.0)
    {
        return Err(Error::InvalidWeight {
            face: Face::new(vec![n]).unwrap_or_else(|_| Face::empty()),
            weight: w,
        });
    }
    let roots: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    Ok(DMatrix::from_fn(l.nrows(), l.ncols(), |r, c| {
        l[(r, c)] * (roots[r] / roots[c])
    }))
}

/// Largest entry of `S - S^*`.
pub fn hermitian_residue(s: &DMatrix<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..s.nrows() {
        for c in r..s.ncols() {
            worst = worst.max((s[(r, c)] - s[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of `L` via its symmetrized form.
pub fn spectrum(l: &OperatorMatrix) -> Result<SpectrumMultiset> {
    spectrum_of(&l.entries, &l.weights, DEFAULT_TOL)
}

/// Eigenvalues of a matrix that `W^{1/2}` conjugates into a Hermitian one.
pub fn spectrum_of(
    entries: &DMatrix<C64>,
    weights: &DVector<f64>,
    tol: f64,
) -> Result<SpectrumMultiset> {
    let (values, _) = hermitian_eigen(entries, weights, false)?;
    Ok(SpectrumMultiset::new(values, tol).clamp_tiny_negatives())
}

/// Eigenpairs of `W^{1/2} L W^{-1/2}`; eigenvectors are returned in the
/// symmetrized basis when requested.
pub(crate) fn hermitian_eigen(
    entries: &DMatrix<C64>,
    weights: &DVector<f64>,
    vectors: bool,
) -> Result<(Vec<f64>, Option<DMatrix<C64>>)> {
    if entries.nrows() == 0 {
        return Ok((Vec::new(), vectors.then(|| DMatrix::zeros(0, 0))));
    }
    let s = symmetrized_form(entries, weights)?;
    let scale = s.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let residue = hermitian_residue(&s);
    if residue > HERMITIAN_TOL * scale {
        return Err(Error::MalformedInput(format!(
            "operator is not symmetrizable (residue {residue:e})"
        )));
    }
    let h = (s.clone() + s.adjoint()) * C64::new(0.5, 0.0);
    if h.iter().all(|z| z.im == 0.0) {
        let re = h.map(|z| z.re);
        let eig = SymmetricEigen::try_new(re, 1e-15, 0).ok_or(Error::EigenFailure)?;
        let vals = eig.eigenvalues.iter().copied().collect();
        let vecs = vectors.then(|| eig.eigenvectors.map(|x| C64::new(x, 0.0)));
        Ok((vals, vecs))
    } else {
        let eig = SymmetricEigen::try_new(h, 1e-15, 0).ok_or(Error::EigenFailure)?;
        let vals = eig.eigenvalues.iter().copied().collect();
        Ok((vals, vectors.then_some(eig.eigenvectors)))
    }
}
