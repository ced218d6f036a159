//! Python bindings. Complexes cross the boundary as facet lists; voltages as
//! `(u, v, perm)` triples with one-based permutation images.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use simplicial_covers::complex::{SimplicialComplex, WeightScheme};
use simplicial_covers::covering::{
    derived_complex, induced_incidence_voltage_with, VoltageAssignment,
};
use simplicial_covers::homology::{betti_numbers, verify_betti_inequality, DEFAULT_KERNEL_TOL};
use simplicial_covers::io::{EdgeVoltage, VoltageFile};
use simplicial_covers::operators::{laplacian_matrix, spectrum_of, Decoration, LaplacianKind};
use simplicial_covers::representation::two_fold_signing;
use simplicial_covers::spectrum::{compare_spectra, Comparison};
use simplicial_covers::Error;

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_scheme(name: &str) -> Result<WeightScheme, Error> {
    match name {
        "combinatorial" => Ok(WeightScheme::Combinatorial),
        "normalized" => Ok(WeightScheme::Normalized),
        other => Err(Error::MalformedInput(format!(
            "unknown weight scheme {other:?}"
        ))),
    }
}

fn parse_kind(name: &str) -> Result<LaplacianKind, Error> {
    match name {
        "up" => Ok(LaplacianKind::Up),
        "down" => Ok(LaplacianKind::Down),
        "full" => Ok(LaplacianKind::Full),
        other => Err(Error::MalformedInput(format!(
            "unknown Laplacian kind {other:?}"
        ))),
    }
}

pub fn spectrum_impl(
    facets: &[Vec<usize>],
    dim: isize,
    kind: &str,
    scheme: &str,
    include_empty: bool,
    tol: f64,
) -> Result<Vec<f64>, Error> {
    let k = SimplicialComplex::build(facets, include_empty)?;
    let l = laplacian_matrix(
        &k,
        dim,
        parse_kind(kind)?,
        &parse_scheme(scheme)?,
        &Decoration::Plain,
    )?;
    Ok(spectrum_of(&l.entries, &l.weights, tol)?.values)
}

/// Edges not listed carry the identity.
pub fn voltage_impl(
    m: &SimplicialComplex,
    k: usize,
    edges: &[(usize, usize, Vec<usize>)],
) -> Result<VoltageAssignment, Error> {
    let file = VoltageFile {
        k,
        edges: edges
            .iter()
            .map(|(u, v, perm)| EdgeVoltage {
                edge: [*u, *v],
                perm: perm.clone(),
            })
            .collect(),
    };
    file.to_assignment(m)
}

/// `(cover facets, vertex map, connected)` of the derived complex.
pub type Lift = (Vec<Vec<usize>>, BTreeMap<usize, usize>, bool);

pub fn lift_impl(
    facets: &[Vec<usize>],
    k: usize,
    edges: &[(usize, usize, Vec<usize>)],
) -> Result<Lift, Error> {
    let m = SimplicialComplex::build(facets, true)?;
    let lift = derived_complex(&m, &voltage_impl(&m, k, edges)?)?;
    let connected = lift.is_connected();
    let mut out: Vec<Vec<usize>> = lift
        .complex
        .facets()
        .iter()
        .map(|f| f.vertices().to_vec())
        .collect();
    out.sort();
    Ok((out, lift.vertex_map, connected))
}

/// Checks Spec L_i^up(K) = Spec L_i^up(M) ∪ Spec L_i^up(M, s) for a 2-fold lift.
pub fn two_fold_union_impl(
    facets: &[Vec<usize>],
    edges: &[(usize, usize, Vec<usize>)],
    dim: isize,
    scheme: &str,
    tol: f64,
) -> Result<bool, Error> {
    let m = SimplicialComplex::build(facets, true)?;
    let scheme = parse_scheme(scheme)?;
    let lift = derived_complex(&m, &voltage_impl(&m, 2, edges)?)?;
    let psi = induced_incidence_voltage_with(&lift.covering, dim, &lift.natural_labeling)?;
    let signed = Decoration::Signed(two_fold_signing(&psi)?);
    let spec = |k: &SimplicialComplex, d: &Decoration| -> Result<_, Error> {
        let l = laplacian_matrix(k, dim, LaplacianKind::Up, &scheme, d)?;
        spectrum_of(&l.entries, &l.weights, tol)
    };
    let cover = spec(&lift.complex, &Decoration::Plain)?;
    let base = spec(&m, &Decoration::Plain)?;
    let ms = spec(&m, &signed)?;
    Ok(compare_spectra(&cover, &base, Comparison::UnionEquals(&ms)).holds)
}

/// Laplacian eigenvalues, ascending.
#[pyfunction]
#[pyo3(signature = (facets, dim, kind = "up", scheme = "combinatorial", include_empty = true, tol = 1e-8))]
fn laplacian_spectrum(
    facets: Vec<Vec<usize>>,
    dim: isize,
    kind: &str,
    scheme: &str,
    include_empty: bool,
    tol: f64,
) -> PyResult<Vec<f64>> {
    spectrum_impl(&facets, dim, kind, scheme, include_empty, tol).map_err(py_err)
}

/// Reduced Betti numbers by exact integer rank, keyed by dimension.
#[pyfunction]
#[pyo3(signature = (facets, include_empty = true))]
fn betti(facets: Vec<Vec<usize>>, include_empty: bool) -> PyResult<BTreeMap<isize, usize>> {
    let k = SimplicialComplex::build(&facets, include_empty).map_err(py_err)?;
    Ok(betti_numbers(&k, &WeightScheme::Combinatorial)
        .map_err(py_err)?
        .betti)
}

/// Derived complex of a 1-skeleton voltage assignment.
#[pyfunction]
fn lift(
    facets: Vec<Vec<usize>>,
    k: usize,
    edges: Vec<(usize, usize, Vec<usize>)>,
) -> PyResult<Lift> {
    lift_impl(&facets, k, &edges).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (facets, edges, dim, scheme = "combinatorial", tol = 1e-8))]
fn two_fold_union(
    facets: Vec<Vec<usize>>,
    edges: Vec<(usize, usize, Vec<usize>)>,
    dim: isize,
    scheme: &str,
    tol: f64,
) -> PyResult<bool> {
    two_fold_union_impl(&facets, &edges, dim, scheme, tol).map_err(py_err)
}

/// Whether every Betti number of the lift is at least the base's.
#[pyfunction]
#[pyo3(signature = (facets, k, edges, scheme = "combinatorial"))]
fn betti_inequality(
    facets: Vec<Vec<usize>>,
    k: usize,
    edges: Vec<(usize, usize, Vec<usize>)>,
    scheme: &str,
) -> PyResult<bool> {
    let run = || -> Result<bool, Error> {
        let m = SimplicialComplex::build(&facets, true)?;
        let lift = derived_complex(&m, &voltage_impl(&m, k, &edges)?)?;
        Ok(
            verify_betti_inequality(&lift.covering, &parse_scheme(scheme)?, DEFAULT_KERNEL_TOL)?
                .holds,
        )
    };
    run().map_err(py_err)
}

#[pymodule]
fn simplicial_covers_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(laplacian_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(betti, m)?)?;
    m.add_function(wrap_pyfunction!(lift, m)?)?;
    m.add_function(wrap_pyfunction!(two_fold_union, m)?)?;
    m.add_function(wrap_pyfunction!(betti_inequality, m)?)?;
    Ok(())
}
