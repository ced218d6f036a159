use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use simplicial_covers::complex::{SimplicialComplex, WeightScheme};
use simplicial_covers::covering::{
    derived_complex, induced_incidence_voltage_with, labeling_is_isomorphism,
    lambda_and_factorization_with, tree_normalized_labeling, verify_covering, CoveringMap,
    FiberLabeling, IncidenceVoltage,
};
use simplicial_covers::error::Error;
use simplicial_covers::fixtures::{
    flip_base_spectrum, flip_cover_spectrum, flip_fixture, flip_signed_spectrum,
};
use simplicial_covers::homology::verify_betti_inequality;
use simplicial_covers::io::{
    parse, ComplexFile, CoveringMapFile, IncidenceVoltageFile, SigningFile, VoltageFile,
    WeightingFile,
};
use simplicial_covers::operators::{
    hermitian_residue, laplacian_matrix, spectrum_of, symmetrized_form, Decoration, LaplacianKind,
    OperatorMatrix, HERMITIAN_TOL,
};
use simplicial_covers::representation::{
    abelian_weightings, block_laplacians, decompose_representation, two_fold_signing, Direction,
    VoltageGroup, BLOCK_TOL,
};
use simplicial_covers::spectrum::{compare_spectra, Comparison, SpectrumMultiset};

use crate::report::{CliError, CliResult, Verdict};

/// Agreement required between a block and the operator it should equal.
const ENTRY_TOL: f64 = 1e-12;

pub struct Settings {
    pub seed: u64,
    pub tol: f64,
    pub kernel_tol: f64,
}

pub struct Outcome {
    pub inputs: BTreeMap<String, String>,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
}

fn read_input(path: &Path, name: &str, inputs: &mut BTreeMap<String, String>) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    inputs.insert(name.to_string(), format!("{digest:x}"));
    String::from_utf8(bytes).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn load<T: for<'de> serde::Deserialize<'de>>(
    path: &Path,
    name: &str,
    inputs: &mut BTreeMap<String, String>,
) -> CliResult<T> {
    let text = read_input(path, name, inputs)?;
    parse(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn load_complex(
    path: &Path,
    name: &str,
    inputs: &mut BTreeMap<String, String>,
) -> CliResult<(SimplicialComplex, WeightScheme)> {
    let file: ComplexFile = load(path, name, inputs)?;
    file.to_parts()
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n")
        .map_err(|e| CliError::precondition(format!("{}: {e}", path.display())))
}

fn spec_of(l: &OperatorMatrix, tol: f64) -> CliResult<SpectrumMultiset> {
    Ok(spectrum_of(&l.entries, &l.weights, tol)?)
}

fn laplacian_spectrum(
    k: &SimplicialComplex,
    i: isize,
    kind: LaplacianKind,
    scheme: &WeightScheme,
    dec: &Decoration,
    tol: f64,
) -> CliResult<SpectrumMultiset> {
    spec_of(&laplacian_matrix(k, i, kind, scheme, dec)?, tol)
}

fn max_entry_diff(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    a.entries
        .iter()
        .zip(b.entries.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues grouped by tolerance, for readable reports.
fn grouped(s: &SpectrumMultiset) -> Vec<Value> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &v in &s.values {
        match out.last_mut() {
            Some((x, m)) if (v - *x).abs() <= s.tol * 1f64.max(v.abs()) => *m += 1,
            _ => out.push((v, 1)),
        }
    }
    out.into_iter()
        .map(|(value, multiplicity)| json!({"value": value, "multiplicity": multiplicity}))
        .collect()
}

fn scheme_name(s: &WeightScheme) -> &'static str {
    s.name()
}

pub fn spectrum(
    settings: &Settings,
    complex: &Path,
    dim: isize,
    kind: LaplacianKind,
    scheme: Option<WeightScheme>,
    signing: Option<&Path>,
    weighting: Option<&Path>,
) -> CliResult<Outcome> {
    let mut inputs = BTreeMap::new();
    let (k, file_scheme) = load_complex(complex, "complex", &mut inputs)?;
    let scheme = scheme.unwrap_or(file_scheme);
    let lower = match kind {
        LaplacianKind::Up => Some(dim),
        LaplacianKind::Down => Some(dim - 1),
        LaplacianKind::Full => None,
    };
    let decoration = match (signing, weighting) {
        (Some(p), _) => {
            let file: SigningFile = load(p, "signing", &mut inputs)?;
            let (i, s) = file.to_signing(&k)?;
            check_decoration_dim(lower, i)?;
            Decoration::Signed(s)
        }
        (_, Some(p)) => {
            let file: WeightingFile = load(p, "weighting", &mut inputs)?;
            let (i, w) = file.to_weighting(&k)?;
            check_decoration_dim(lower, i)?;
            Decoration::Weighted(w)
        }
        _ => Decoration::Plain,
    };
    let l = laplacian_matrix(&k, dim, kind, &scheme, &decoration)?;
    let s = spec_of(&l, settings.tol)?;
    let residue = if l.size() == 0 {
        0.0
    } else {
        hermitian_residue(&symmetrized_form(&l.entries, &l.weights)?)
    };
    let results = json!({
        "dim": dim,
        "kind": kind,
        "scheme": scheme_name(&scheme),
        "size": l.size(),
        "values": s.values,
        "distinct": grouped(&s),
        "clamped_negatives": s.clamped,
    });
    let verdicts = vec![Verdict::new(
        "operator is self-adjoint in the weighted inner product",
        residue <= HERMITIAN_TOL,
        HERMITIAN_TOL,
        residue,
    )];
    Ok(Outcome {
        inputs,
        results,
        verdicts,
    })
}

fn check_decoration_dim(lower: Option<isize>, i: isize) -> CliResult<()> {
    match lower {
        None => Err(CliError::precondition(
            "decorations apply to up or down operators only",
        )),
        Some(l) if l != i => Err(CliError::precondition(format!(
            "decoration is on dimension pair [{i}, {}], the operator uses [{l}, {}]",
            i + 1,
            l + 1
        ))),
        _ => Ok(()),
    }
}

/// How a covering was supplied.
pub enum CoverSource<'a> {
    Voltage {
        base: &'a Path,
        voltage: &'a Path,
    },
    Map {
        base: &'a Path,
        cover: &'a Path,
        map: &'a Path,
    },
}

pub struct LoadedCover {
    pub base: SimplicialComplex,
    pub covering: CoveringMap,
    /// Natural labeling for voltage-built lifts, canonical otherwise.
    pub labeling: FiberLabeling,
    pub connected: bool,
}

pub fn load_cover(
    src: &CoverSource<'_>,
    inputs: &mut BTreeMap<String, String>,
) -> CliResult<LoadedCover> {
    match *src {
        CoverSource::Voltage { base, voltage } => {
            let (m, _) = load_complex(base, "base", inputs)?;
            let file: VoltageFile = load(voltage, "voltage", inputs)?;
            let psi = file
                .to_assignment(&m)
                .map_err(|e| CliError::parse(format!("{}: {e}", voltage.display())))?;
            let lift = derived_complex(&m, &psi)?;
            let connected = lift.is_connected();
            Ok(LoadedCover {
                base: m,
                labeling: lift.natural_labeling,
                covering: lift.covering,
                connected,
            })
        }
        CoverSource::Map { base, cover, map } => {
            let (m, _) = load_complex(base, "base", inputs)?;
            let (k, _) = load_complex(cover, "cover", inputs)?;
            let file: CoveringMapFile = load(map, "map", inputs)?;
            let vertex_map = file
                .to_map()
                .map_err(|e| CliError::parse(format!("{}: {e}", map.display())))?;
            let covering = verify_covering(&k, &m, &vertex_map)?;
            Ok(LoadedCover {
                base: m,
                labeling: covering.labeling.clone(),
                covering,
                connected: true,
            })
        }
    }
}

fn factorization_verdicts(cov: &CoveringMap, labeling: &FiberLabeling) -> CliResult<Vec<Verdict>> {
    let mut out = Vec::new();
    for i in 0..cov.base.top_dim() {
        let f = lambda_and_factorization_with(cov, i, labeling)?;
        out.push(Verdict::new(
            format!(
                "coboundary factorization D_{i}(K) = Λ_{} D_{i}(M)^ψ Λ_{i} (exact)",
                i + 1
            ),
            f.residual == 0,
            0.0,
            f.residual as f64,
        ));
    }
    Ok(out)
}

pub fn cover_build(
    base: &Path,
    voltage: &Path,
    out_cover: Option<&Path>,
    out_map: Option<&Path>,
) -> CliResult<Outcome> {
    let mut inputs = BTreeMap::new();
    let loaded = load_cover(&CoverSource::Voltage { base, voltage }, &mut inputs)?;
    let cov = &loaded.covering;
    let cover_file = ComplexFile::from_complex(&cov.cover, None);
    let map_file = CoveringMapFile::from_map(&cov.vertex_map);
    if let Some(p) = out_cover {
        write_json(p, &cover_file)?;
    }
    if let Some(p) = out_map {
        write_json(p, &map_file)?;
    }
    let counts: BTreeMap<String, usize> = (0..=cov.cover.top_dim())
        .map(|d| (d.to_string(), cov.cover.count(d)))
        .collect();
    let results = json!({
        "k": cov.degree,
        "connected": loaded.connected,
        "components": cov.cover.components().len(),
        "face_counts": counts,
        "cover": cover_file,
        "vertex_map": map_file,
    });
    let mut verdicts = vec![Verdict::new(
        "lift satisfies the strong covering axioms (connectivity reported separately)",
        true,
        0.0,
        0.0,
    )];
    verdicts.extend(factorization_verdicts(cov, &loaded.labeling)?);
    Ok(Outcome {
        inputs,
        results,
        verdicts,
    })
}

pub fn cover_verify(cover: &Path, base: &Path, map: &Path) -> CliResult<Outcome> {
    let mut inputs = BTreeMap::new();
    let loaded = match load_cover(&CoverSource::Map { base, cover, map }, &mut inputs) {
        Ok(l) => l,
        Err(e) if e.kind == crate::report::FailureKind::Precondition => {
            let results = json!({"valid": false, "violation": e.message});
            let verdicts =
                vec![
                    Verdict::new("map is a connected strong covering", false, 0.0, 0.0)
                        .with_witness(e.message),
                ];
            return Ok(Outcome {
                inputs,
                results,
                verdicts,
            });
        }
        Err(e) => return Err(e),
    };
    let cov = &loaded.covering;
    let mut verdicts = vec![Verdict::new(
        "map is a connected strong covering",
        true,
        0.0,
        0.0,
    )];
    verdicts.extend(factorization_verdicts(cov, &cov.labeling)?);
    let mut voltages = Vec::new();
    for i in 0..cov.base.top_dim() {
        let psi = induced_incidence_voltage_with(cov, i, &cov.labeling)?;
        let iso = labeling_is_isomorphism(cov, &psi, &cov.labeling)?;
        verdicts.push(Verdict::new(
            format!("fiber labeling maps the derived graph of B_{i}(M) onto B_{i}(K)"),
            iso,
            0.0,
            0.0,
        ));
        let normalized = tree_normalized_labeling(cov, i)?;
        let tree_psi = induced_incidence_voltage_with(cov, i, &normalized)?;
        voltages.push(json!({
            "dim": i,
            "canonical": IncidenceVoltageFile::from_voltage(&psi),
            "spanning_tree_normalized": IncidenceVoltageFile::from_voltage(&tree_psi),
        }));
    }
    let results = json!({
        "valid": true,
        "degree": cov.degree,
        "incidence_voltages": voltages,
    });
    Ok(Outcome {
        inputs,
        results,
        verdicts,
    })
}

fn voltage_for(loaded: &LoadedCover, lower: isize) -> CliResult<IncidenceVoltage> {
    Ok(induced_incidence_voltage_with(
        &loaded.covering,
        lower,
        &loaded.labeling,
    )?)
}

fn group_summary(g: &VoltageGroup) -> Value {
    json!({
        "order": g.order(),
        "generators": g.generators.iter().map(|p| p.to_one_based()).collect::<Vec<_>>(),
        "abelian": g.abelian,
        "transitive": g.transitive,
    })
}

pub fn decompose(
    settings: &Settings,
    src: &CoverSource<'_>,
    dim: isize,
    direction: Direction,
    scheme: &WeightScheme,
) -> CliResult<Outcome> {
    let mut inputs = BTreeMap::new();
    let loaded = load_cover(src, &mut inputs)?;
    let top = loaded.base.top_dim();
    let lower = match direction {
        Direction::Up if (0..top).contains(&dim) => dim,
        Direction::Down if (1..=top).contains(&dim) => dim - 1,
        _ => {
            return Err(CliError::precondition(format!(
                "{direction:?} decomposition needs {} (top dimension {top})",
                if direction == Direction::Up {
                    "0 <= dim < top"
                } else {
                    "1 <= dim <= top"
                }
            )))
        }
    };
    let psi = voltage_for(&loaded, lower)?;
    let group = VoltageGroup::of_voltage(&psi)?;
    let dec = decompose_representation(&group, settings.seed)?;
    let blocks = block_laplacians(&loaded.base, &psi, dim, scheme, direction, &dec)?;
    let kind = direction.kind();
    let spectra: Vec<SpectrumMultiset> = blocks
        .iter()
        .map(|b| spec_of(b, settings.tol))
        .collect::<CliResult<_>>()?;
    let lifted = laplacian_spectrum(
        &loaded.covering.cover,
        dim,
        kind,
        scheme,
        &Decoration::Plain,
        settings.tol,
    )?;
    let base_l = laplacian_matrix(&loaded.base, dim, kind, scheme, &Decoration::Plain)?;

    let mut verdicts = vec![Verdict::new(
        "permutation representation is block diagonal under T",
        dec.residual <= BLOCK_TOL,
        BLOCK_TOL,
        dec.residual,
    )];
    let d = max_entry_diff(&blocks[0], &base_l);
    verdicts.push(Verdict::new(
        "block decomposition: first block equals L(M)",
        d <= ENTRY_TOL,
        ENTRY_TOL,
        d,
    ));
    let rep = compare_spectra(
        &lifted,
        &SpectrumMultiset::union(&spectra),
        Comparison::Equal,
    );
    verdicts.push(spectral_verdict(
        "block decomposition: block spectra union to Spec L(K)",
        &rep,
        settings.tol,
    ));
    if psi.k == 2 && group.order() == 2 {
        let s = two_fold_signing(&psi)?;
        let signed = laplacian_matrix(&loaded.base, dim, kind, scheme, &Decoration::Signed(s))?;
        let d = max_entry_diff(&blocks[1], &signed);
        verdicts.push(Verdict::new(
            "two-fold union: second block equals L(M, s)",
            d <= ENTRY_TOL,
            ENTRY_TOL,
            d,
        ));
    }
    if group.abelian && group.transitive {
        let omegas = abelian_weightings(&group, &psi, &dec)?;
        for (j, w) in omegas.into_iter().enumerate() {
            let weighted =
                laplacian_matrix(&loaded.base, dim, kind, scheme, &Decoration::Weighted(w))?;
            let d = max_entry_diff(&blocks[j + 1], &weighted);
            verdicts.push(Verdict::new(
                format!(
                    "abelian decomposition: block {} equals L(M, ω_{})",
                    j + 2,
                    j + 1
                ),
                d <= ENTRY_TOL,
                ENTRY_TOL,
                d,
            ));
        }
    }
    let results = json!({
        "dim": dim,
        "direction": format!("{direction:?}").to_lowercase(),
        "scheme": scheme_name(scheme),
        "connected_cover": loaded.connected,
        "group": group_summary(&group),
        "block_sizes": dec.block_sizes,
        "block_residual": dec.residual,
        "attempts": dec.attempts,
        "block_spectra": spectra.iter().map(|s| &s.values).collect::<Vec<_>>(),
        "lifted_spectrum": lifted.values,
    });
    Ok(Outcome {
        inputs,
        results,
        verdicts,
    })
}

fn spectral_verdict(
    claim: &str,
    rep: &simplicial_covers::spectrum::ComparisonReport,
    tol: f64,
) -> Verdict {
    let v = Verdict::new(claim, rep.holds, tol, rep.max_pairing_error);
    match rep.witness {
        Some(w) => v.with_witness(format!("unmatched eigenvalue {w}")),
        None => v,
    }
}

fn dims_in(range: std::ops::Range<isize>, only: Option<isize>) -> Vec<isize> {
    range.filter(|i| only.is_none_or(|d| d == *i)).collect()
}

pub fn verify_union(
    settings: &Settings,
    src: &CoverSource<'_>,
    only: Option<isize>,
    schemes: &[WeightScheme],
) -> CliResult<Outcome> {
    let mut inputs = BTreeMap::new();
    let loaded = load_cover(src, &mut inputs)?;
    if loaded.covering.degree != 2 {
        return Err(Error::WrongFold {
            expected: 2,
            got: loaded.covering.degree,
        }
        .into());
    }
    let dims = dims_in(0..loaded.base.top_dim(), only);
    if dims.is_empty() {
        return Err(CliError::precondition("no dimension 0 <= i < top to check"));
    }
    let mut verdicts = Vec::new();
    let mut rows = Vec::new();
    for &i in &dims {
        let psi = voltage_for(&loaded, i)?;
        let s = two_fold_signing(&psi)?;
        for scheme in schemes {
            let k = laplacian_spectrum(
                &loaded.covering.cover,
                i,
                LaplacianKind::Up,
                scheme,
                &Decoration::Plain,
                settings.tol,
            )?;
            let m = laplacian_spectrum(
                &loaded.base,
                i,
                LaplacianKind::Up,
                scheme,
                &Decoration::Plain,
                settings.tol,
            )?;
            let ms = laplacian_spectrum(
                &loaded.base,
                i,
                LaplacianKind::Up,
                scheme,
                &Decoration::Signed(s.clone()),
                settings.tol,
            )?;
            let rep = compare_spectra(&k, &m, Comparison::UnionEquals(&ms));
            verdicts.push(spectral_verdict(
                &format!("two-fold union: Spec L_{i}^up(K) = Spec L_{i}^up(M) ∪ Spec L_{i}^up(M, s) [{}]", scheme.name()),
                &rep,
                settings.tol,
            ));
            rows.push(json!({
                "dim": i,
                "scheme": scheme.name(),
                "cover": k.values,
                "base": m.values,
                "signed": ms.values,
                "flipped_incidences": s.signs.values().filter(|&&x| x < 0).count(),
            }));
        }
    }
    let results = json!({"connected_cover": loaded.connected, "checks": rows});
    Ok(Outcome {
        inputs,
        results,
        verdicts,
    })
}

pub fn verify_inclusion(
    settings: &Settings,
    src: &CoverSource<'_>,
    only: Option<isize>,
    schemes: &[WeightScheme],
) -> CliResult<Outcome> {
    let mut inputs = BTreeMap::new();
    let loaded = load_cover(src, &mut inputs)?;
    let top = loaded.base.top_dim();
    let mut verdicts = Vec::new();
    let mut rows = Vec::new();
    for scheme in schemes {
        for (kind, range) in [
            (LaplacianKind::Up, 0..top),
            (LaplacianKind::Down, 1..top + 1),
        ] {
            for i in dims_in(range, only) {
                let k = laplacian_spectrum(
                    &loaded.covering.cover,
                    i,
                    kind,
                    scheme,
                    &Decoration::Plain,
                    settings.tol,
                )?;
                let m = laplacian_spectrum(
                    &loaded.base,
                    i,
                    kind,
                    scheme,
                    &Decoration::Plain,
                    settings.tol,
                )?;
                let rep = compare_spectra(&m, &k, Comparison::SubsetOf);
                let name = format!("{kind:?}").to_lowercase();
                verdicts.push(spectral_verdict(
                    &format!(
                        "spectral inclusion: Spec L_{i}^{name}(M) ⊂ Spec L_{i}^{name}(K) [{}]",
                        scheme.name()
                    ),
                    &rep,
                    settings.tol,
                ));
                rows.push(json!({"dim": i, "kind": kind, "scheme": scheme.name(), "base": m.values, "cover": k.values}));
            }
        }
    }
    if verdicts.is_empty() {
        return Err(CliError::precondition("no dimension in range to check"));
    }
    Ok(Outcome {
        inputs,
        results: json!({"degree": loaded.covering.degree, "checks": rows}),
        verdicts,
    })
}

pub fn verify_abelian(
    settings: &Settings,
    src: &CoverSource<'_>,
    only: Option<isize>,
    schemes: &[WeightScheme],
) -> CliResult<Outcome> {
    let mut inputs = BTreeMap::new();
    let loaded = load_cover(src, &mut inputs)?;
    let mut verdicts = Vec::new();
    let mut rows = Vec::new();
    let mut last_err = None;
    for i in dims_in(0..loaded.base.top_dim(), only) {
        let psi = voltage_for(&loaded, i)?;
        let group = VoltageGroup::of_voltage(&psi)?;
        if !group.abelian {
            last_err = Some(Error::NonAbelian);
            continue;
        }
        if !group.transitive {
            last_err = Some(Error::NotTransitive);
            continue;
        }
        let dec = decompose_representation(&group, settings.seed)?;
        let omegas = abelian_weightings(&group, &psi, &dec)?;
        for scheme in schemes {
            let k = laplacian_spectrum(
                &loaded.covering.cover,
                i,
                LaplacianKind::Up,
                scheme,
                &Decoration::Plain,
                settings.tol,
            )?;
            let mut parts = vec![laplacian_spectrum(
                &loaded.base,
                i,
                LaplacianKind::Up,
                scheme,
                &Decoration::Plain,
                settings.tol,
            )?];
            for w in &omegas {
                parts.push(laplacian_spectrum(
                    &loaded.base,
                    i,
                    LaplacianKind::Up,
                    scheme,
                    &Decoration::Weighted(w.clone()),
                    settings.tol,
                )?);
            }
            let rep = compare_spectra(&k, &SpectrumMultiset::union(&parts), Comparison::Equal);
            verdicts.push(spectral_verdict(
                &format!("abelian decomposition: Spec L_{i}^up(K) = Spec L_{i}^up(M) ∪ ⋃_j Spec L_{i}^up(M, ω_j) [{}]", scheme.name()),
                &rep,
                settings.tol,
            ));
            rows.push(json!({
                "dim": i,
                "scheme": scheme.name(),
                "group": group_summary(&group),
                "weighted_spectra": parts[1..].iter().map(|p| &p.values).collect::<Vec<_>>(),
            }));
        }
    }
    if verdicts.is_empty() {
        return Err(last_err
            .map(CliError::from)
            .unwrap_or_else(|| CliError::precondition("no dimension in range to check")));
    }
    Ok(Outcome {
        inputs,
        results: json!({"checks": rows}),
        verdicts,
    })
}

pub fn verify_betti(
    settings: &Settings,
    src: &CoverSource<'_>,
    only: Option<isize>,
    schemes: &[WeightScheme],
) -> CliResult<Outcome> {
    let mut inputs = BTreeMap::new();
    let loaded = load_cover(src, &mut inputs)?;
    let mut verdicts = Vec::new();
    let mut rows = Vec::new();
    for scheme in schemes {
        let rep = verify_betti_inequality(&loaded.covering, scheme, settings.kernel_tol)?;
        for d in rep.dims.iter().filter(|d| only.is_none_or(|o| o == d.dim)) {
            verdicts.push(Verdict::new(
                format!(
                    "Betti inequality: β_{}(K) = {} ≥ β_{}(M) = {}, lifted harmonic basis in ker L_{}(K) with full rank [{}]",
                    d.dim, d.beta_cover, d.dim, d.beta_base, d.dim, scheme.name()
                ),
                d.holds,
                simplicial_covers::homology::LIFT_RESIDUAL_TOL,
                d.kernel_residual,
            ));
            rows.push(json!({
                "dim": d.dim,
                "scheme": scheme.name(),
                "beta_cover": d.beta_cover,
                "beta_base": d.beta_base,
                "equality": d.beta_cover == d.beta_base,
                "kernel_residual": d.kernel_residual,
                "sigma_min": if d.sigma_min.is_finite() { json!(d.sigma_min) } else { Value::Null },
            }));
        }
    }
    if verdicts.is_empty() {
        return Err(CliError::precondition("no dimension in range to check"));
    }
    Ok(Outcome {
        inputs,
        results: json!({"connected_cover": loaded.connected, "checks": rows}),
        verdicts,
    })
}

pub fn fixture_search(settings: &Settings, out_dir: Option<&PathBuf>) -> CliResult<Outcome> {
    let fx = flip_fixture()?;
    let comb = WeightScheme::Combinatorial;
    let tol = settings.tol;
    let base = laplacian_spectrum(
        &fx.base,
        1,
        LaplacianKind::Up,
        &comb,
        &Decoration::Plain,
        tol,
    )?;
    let cover = laplacian_spectrum(
        &fx.cover.cover,
        1,
        LaplacianKind::Up,
        &comb,
        &Decoration::Plain,
        tol,
    )?;
    let s = two_fold_signing(&fx.incidence_voltage)?;
    let signed = laplacian_spectrum(
        &fx.base,
        1,
        LaplacianKind::Up,
        &comb,
        &Decoration::Signed(s),
        tol,
    )?;
    let verdicts = vec![
        spectral_verdict(
            "recovered base: Spec L_1^up(M) = {5, 4², 2², 1, 0⁶}",
            &compare_spectra(&base, &flip_base_spectrum(), Comparison::Equal),
            tol,
        ),
        spectral_verdict(
            "two-fold lift: Spec L_1^up(K) = {5, 4², 3², 2², 1, (3±√3)², 0¹²}",
            &compare_spectra(&cover, &flip_cover_spectrum(), Comparison::Equal),
            tol,
        ),
        spectral_verdict(
            "signed base: Spec L_1^up(M, s) = {3², (3±√3)², 0⁶}",
            &compare_spectra(&signed, &flip_signed_spectrum(), Comparison::Equal),
            tol,
        ),
        spectral_verdict(
            "two-fold union at i = 1",
            &compare_spectra(&cover, &base, Comparison::UnionEquals(&signed)),
            tol,
        ),
    ];
    let base_file = ComplexFile::from_complex(&fx.base, Some(&comb));
    let cover_file = ComplexFile::from_complex(&fx.cover.cover, Some(&comb));
    let map_file = CoveringMapFile::from_map(&fx.cover.vertex_map);
    let voltage_file = VoltageFile::from_assignment(&fx.base, &fx.skeleton_voltage);
    let incidence_file = IncidenceVoltageFile::from_voltage(&fx.incidence_voltage);
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::precondition(format!("{}: {e}", dir.display())))?;
        write_json(&dir.join("base.json"), &base_file)?;
        write_json(&dir.join("cover.json"), &cover_file)?;
        write_json(&dir.join("map.json"), &map_file)?;
        write_json(&dir.join("voltage.json"), &voltage_file)?;
        write_json(&dir.join("incidence_voltage.json"), &incidence_file)?;
    }
    let results = json!({
        "isomorphism_classes": fx.classes_found,
        "base": base_file,
        "cover": cover_file,
        "vertex_map": map_file,
        "skeleton_voltage": voltage_file,
        "incidence_voltage": incidence_file,
        "flipped": {"face": fx.flipped.0, "cofacet": fx.flipped.1},
        "spectra": {"base": base.values, "cover": cover.values, "signed": signed.values},
    });
    Ok(Outcome {
        inputs: BTreeMap::new(),
        results,
        verdicts,
    })
}
