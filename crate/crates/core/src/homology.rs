//! Reduced Betti numbers as Laplacian kernel dimensions, harmonic cochain
//! lifting along coverings, and the Betti inequality for coverings.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::complex::{
    coboundary_matrix, compute_weights, Cochain, FaceWeights, SimplicialComplex, WeightScheme,
};
use crate::covering::CoveringMap;
use crate::error::{Error, Result};
use crate::operators::{hermitian_eigen, laplacian_matrix, Decoration, LaplacianKind};

/// Eigenvalues at or below this count as kernel.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-7;

/// Eigenvalues above this but within the kernel tolerance raise a warning.
pub const KERNEL_GUARD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BettiMethod {
    ExactRank,
    NumericKernel,
}

/// An eigenvalue inside the guard band `(1e-9, kernel_tol]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelWarning {
    pub dim: isize,
    pub eigenvalue: f64,
}

#[derive(Clone, Debug)]
pub struct BettiReport {
    /// The numbers from `method`.
    pub betti: BTreeMap<isize, usize>,
    pub method: BettiMethod,
    /// Reduced when the complex carries the empty face.
    pub reduced: bool,
    pub exact: BTreeMap<isize, usize>,
    pub numeric: BTreeMap<isize, usize>,
    /// Kernel bases of the full Laplacian, from the eigensolve.
    pub kernel_bases: BTreeMap<isize, Vec<Cochain>>,
    pub warnings: Vec<KernelWarning>,
}

impl BettiReport {
    pub fn methods_agree(&self) -> bool {
        self.exact == self.numeric
    }

    pub fn get(&self, dim: isize) -> usize {
        self.betti.get(&dim).copied().unwrap_or(0)
    }
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn integer_rank(m: &DMatrix<i64>) -> usize {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|r| (0..cols).map(|c| BigInt::from(m[(r, c)])).collect())
        .collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let v = (&a[r][c] * &a[rank][col] - &a[r][col] * &a[rank][c]) / &prev;
                a[r][c] = v;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

fn dims(k: &SimplicialComplex) -> std::ops::RangeInclusive<isize> {
    (if k.include_empty() { -1 } else { 0 })..=k.top_dim()
}

/// `β_i = |S_i| - rank D_i - rank D_{i-1}`, exactly.
pub fn exact_betti(k: &SimplicialComplex) -> Result<BTreeMap<isize, usize>> {
    let lowest = *dims(k).start();
    let mut ranks = BTreeMap::new();
    for i in dims(k) {
        ranks.insert(i, integer_rank(&coboundary_matrix(k, i)?.entries));
    }
    Ok(dims(k)
        .map(|i| {
            let below = if i > lowest { ranks[&(i - 1)] } else { 0 };
            (i, k.count(i) - ranks[&i] - below)
        })
        .collect())
}

pub fn betti_numbers(k: &SimplicialComplex, scheme: &WeightScheme) -> Result<BettiReport> {
    betti_numbers_with(k, scheme, DEFAULT_KERNEL_TOL)
}

/// Betti numbers by both methods; `method` says which one `betti` holds.
pub fn betti_numbers_with(
    k: &SimplicialComplex,
    scheme: &WeightScheme,
    kernel_tol: f64,
) -> Result<BettiReport> {
    let exact = exact_betti(k)?;
    let mut numeric = BTreeMap::new();
    let mut kernel_bases = BTreeMap::new();
    let mut warnings = Vec::new();
    for i in dims(k) {
        let (basis, warn) = harmonic_basis(k, i, scheme, kernel_tol)?;
        warnings.extend(
            warn.into_iter()
                .map(|eigenvalue| KernelWarning { dim: i, eigenvalue }),
        );
        numeric.insert(i, basis.len());
        kernel_bases.insert(i, basis);
    }
    let method = match scheme {
        WeightScheme::Combinatorial => BettiMethod::ExactRank,
        _ => BettiMethod::NumericKernel,
    };
    let betti = match method {
        BettiMethod::ExactRank => exact.clone(),
        BettiMethod::NumericKernel => numeric.clone(),
    };
    Ok(BettiReport {
        betti,
        method,
        reduced: k.include_empty(),
        exact,
        numeric,
        kernel_bases,
        warnings,
    })
}

/// A basis of `ker L_i` and any guard-band eigenvalues.
pub fn harmonic_basis(
    k: &SimplicialComplex,
    i: isize,
    scheme: &WeightScheme,
    kernel_tol: f64,
) -> Result<(Vec<Cochain>, Vec<f64>)> {
    let l = laplacian_matrix(k, i, LaplacianKind::Full, scheme, &Decoration::Plain)?;
    let (vals, vecs) = hermitian_eigen(&l.entries, &l.weights, true)?;
    let vecs = vecs.expect("requested eigenvectors");
    let mut basis = Vec::new();
    let mut warnings = Vec::new();
    for (n, &v) in vals.iter().enumerate() {
        if v.abs() <= kernel_tol {
            if v.abs() > KERNEL_GUARD {
                warnings.push(v);
            }
            // eigenvectors of W^{1/2} L W^{-1/2}; undo the similarity
            let col = vecs.column(n);
            let values = DVector::from_iterator(
                col.len(),
                col.iter()
                    .zip(l.weights.iter())
                    .map(|(z, w)| z.re / w.sqrt()),
            );
            basis.push(Cochain { dim: i, values });
        }
    }
    Ok((basis, warnings))
}

/// Dimension of `ker L_i^up ∩ ker L_i^down`, by numerical rank of the
/// stacked operators.
pub fn kernel_intersection_dim(
    k: &SimplicialComplex,
    i: isize,
    scheme: &WeightScheme,
    tol: f64,
) -> Result<usize> {
    let n = k.count(i);
    let mut rows: Vec<DMatrix<f64>> = Vec::new();
    if i < k.top_dim() {
        rows.push(
            laplacian_matrix(k, i, LaplacianKind::Up, scheme, &Decoration::Plain)?.real_part(),
        );
    }
    if i > 0 || (i == 0 && k.include_empty()) {
        rows.push(
            laplacian_matrix(k, i, LaplacianKind::Down, scheme, &Decoration::Plain)?.real_part(),
        );
    }
    let total: usize = rows.iter().map(|r| r.nrows()).sum();
    if total == 0 {
        return Ok(n);
    }
    let mut stacked = DMatrix::zeros(total, n);
    let mut at = 0;
    for r in rows {
        stacked.view_mut((at, 0), (r.nrows(), n)).copy_from(&r);
        at += r.nrows();
    }
    let rank = stacked
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol)
        .count();
    Ok(n - rank)
}

/// `Σ_{i ≥ 0} (-1)^i |S_i|`.
pub fn euler_characteristic(k: &SimplicialComplex) -> i64 {
    (0..=k.top_dim())
        .map(|i| if i % 2 == 0 { 1 } else { -1 } * k.count(i) as i64)
        .sum()
}

/// Whether the alternating Betti sum matches the face count exactly.
pub fn euler_consistent(k: &SimplicialComplex, report: &BettiReport) -> bool {
    let alt: i64 = report
        .betti
        .iter()
        .map(|(&i, &b)| if i.rem_euclid(2) == 0 { 1 } else { -1 } * b as i64)
        .sum();
    // the reduced sum includes the -1 layer, which shifts χ by one
    let expected = euler_characteristic(k) - if report.reduced { 1 } else { 0 };
    alt == expected
}

/// Checks `w_K(F̄)/w_K(F) = w_M(φ(F̄))/w_M(φ(F))` on every incidence of `S_i(K)`.
pub fn check_weight_ratio(
    cov: &CoveringMap,
    i: isize,
    wk: &FaceWeights,
    wm: &FaceWeights,
) -> Result<()> {
    let (k, m) = (&cov.cover, &cov.base);
    for cofacet in k.faces(i + 1) {
        for j in 0..cofacet.len() {
            let face = cofacet.omit(j);
            let lhs = wk.get(k, cofacet).unwrap() / wk.get(k, &face).unwrap();
            let rhs =
                wm.get(m, &cov.image(cofacet)).unwrap() / wm.get(m, &cov.image(&face)).unwrap();
            if (lhs - rhs).abs() > 1e-12 * lhs.abs().max(rhs.abs()).max(1.0) {
                return Err(Error::WeightRatio {
                    face,
                    cofacet: cofacet.clone(),
                });
            }
        }
    }
    Ok(())
}

/// `f̄(F) = f(φ(F)) · sgn([F], [φ(F)])`.
///
/// Combinatorial and normalized weights always satisfy the weight-ratio
/// hypothesis. Explicit weights are looked up on both complexes and the
/// ratio is checked for the incidences above `f.dim`.
pub fn lift_cochain(f: &Cochain, cov: &CoveringMap, scheme: &WeightScheme) -> Result<Cochain> {
    let i = f.dim;
    if i < 0 || i > cov.base.top_dim() {
        return Err(Error::DimensionOutOfRange {
            dim: i,
            reason: "cochains lift in dimensions 0..=top".into(),
        });
    }
    if f.values.len() != cov.base.count(i) {
        return Err(Error::MalformedInput(format!(
            "cochain has {} values, base has {} faces of dimension {i}",
            f.values.len(),
            cov.base.count(i)
        )));
    }
    if let WeightScheme::Explicit(_) = scheme {
        if i < cov.base.top_dim() {
            let wk = compute_weights(&cov.cover, scheme)?;
            let wm = compute_weights(&cov.base, scheme)?;
            check_weight_ratio(cov, i, &wk, &wm)?;
        }
    }
    let values = DVector::from_iterator(
        cov.cover.count(i),
        cov.cover.faces(i).iter().map(|face| {
            let g = cov.base.index_of(&cov.image(face)).unwrap();
            f.values[g] * cov.orientation_sign(face) as f64
        }),
    );
    Ok(Cochain { dim: i, values })
}

/// One dimension of the Betti inequality check.
#[derive(Clone, Debug, Serialize)]
pub struct BettiDimCheck {
    pub dim: isize,
    pub beta_cover: usize,
    pub beta_base: usize,
    /// Largest `|L_i(K) f̄|_∞ / |f̄|_∞` over the lifted basis.
    pub kernel_residual: f64,
    /// Smallest singular value of the column-normalized lifted basis.
    pub sigma_min: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BettiInequalityReport {
    pub dims: Vec<BettiDimCheck>,
    pub holds: bool,
}

pub const LIFT_RESIDUAL_TOL: f64 = 1e-8;
pub const LIFT_RANK_TOL: f64 = 1e-8;

/// `β_i(K) ≥ β_i(M)` for `0 ≤ i ≤ top`, with the lifted harmonic basis of
/// `M` checked to lie in `ker L_i(K)` and to stay independent.
pub fn verify_betti_inequality(
    cov: &CoveringMap,
    scheme: &WeightScheme,
    kernel_tol: f64,
) -> Result<BettiInequalityReport> {
    if let WeightScheme::Explicit(_) = scheme {
        return Err(Error::MalformedInput(
            "the Betti inequality is verified for combinatorial and normalized weights".into(),
        ));
    }
    let rk = betti_numbers_with(&cov.cover, scheme, kernel_tol)?;
    let rm = betti_numbers_with(&cov.base, scheme, kernel_tol)?;
    let mut dims = Vec::new();
    for i in 0..=cov.base.top_dim() {
        let lk = laplacian_matrix(
            &cov.cover,
            i,
            LaplacianKind::Full,
            scheme,
            &Decoration::Plain,
        )?
        .real_part();
        let basis = &rm.kernel_bases[&i];
        let mut residual: f64 = 0.0;
        let mut cols = Vec::with_capacity(basis.len());
        for f in basis {
            let lifted = lift_cochain(f, cov, scheme)?;
            let scale = lifted.values.amax().max(f64::MIN_POSITIVE);
            residual = residual.max((&lk * &lifted.values).amax() / scale);
            cols.push(&lifted.values / lifted.values.norm());
        }
        let sigma_min = if cols.is_empty() {
            f64::INFINITY
        } else {
            let m = DMatrix::from_columns(&cols);
            m.svd(false, false).singular_values.min()
        };
        let (beta_cover, beta_base) = (rk.get(i), rm.get(i));
        let holds =
            beta_cover >= beta_base && residual <= LIFT_RESIDUAL_TOL && sigma_min >= LIFT_RANK_TOL;
        dims.push(BettiDimCheck {
            dim: i,
            beta_cover,
            beta_base,
            kernel_residual: residual,
            sigma_min,
            holds,
        });
    }
    let holds = dims.iter().all(|d| d.holds);
    Ok(BettiInequalityReport { dims, holds })
}
