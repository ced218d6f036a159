//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p simplicial-covers --test acceptance`.

mod common;

use std::time::Instant;

use common::*;
use nalgebra::DMatrix;
use simplicial_covers::complex::{coboundary_matrix, Face};
use simplicial_covers::covering::{
    derived_coboundary_entrywise, induced_incidence_voltage, induced_incidence_voltage_with,
    labeling_is_isomorphism, lambda_and_factorization_with, one_skeleton, CoveringMap,
    FiberLabeling, VoltageAssignment,
};
use simplicial_covers::fixtures::{
    flip_base_spectrum, flip_cover_spectrum, flip_fixture, flip_signed_spectrum, k4_minus_edge,
};
use simplicial_covers::homology::{
    betti_numbers, exact_betti, verify_betti_inequality, DEFAULT_KERNEL_TOL,
};
use simplicial_covers::operators::{laplacian_matrix, spectrum, Decoration, LaplacianKind};
use simplicial_covers::perm::Permutation;
use simplicial_covers::random::{random_base, VoltageKind};
use simplicial_covers::representation::{
    abelian_weightings, block_laplacians, decompose_representation, derived_coboundary,
    two_fold_signing, Direction, VoltageGroup, BLOCK_TOL,
};
use simplicial_covers::spectrum::{compare_spectra, Comparison, SpectrumMultiset};
use simplicial_covers::{covering::derived_complex, SimplicialComplex, WeightScheme};

const ENTRY_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn equal(a: &SpectrumMultiset, b: &SpectrumMultiset) -> bool {
    compare_spectra(a, b, Comparison::Equal).holds
}

fn up(
    k: &SimplicialComplex,
    i: isize,
    scheme: &WeightScheme,
    dec: &Decoration,
) -> SpectrumMultiset {
    spec(k, i, LaplacianKind::Up, scheme, dec)
}

fn lifted_labelings(inst: &Instance) -> (CoveringMap, Vec<FiberLabeling>) {
    let cov = inst.lift.covering.clone();
    let labelings = vec![cov.labeling.clone(), inst.lift.natural_labeling.clone()];
    (cov, labelings)
}

fn criterion_1() -> Outcome {
    let fx = flip_fixture().map_err(|e| e.to_string())?;
    let comb = WeightScheme::Combinatorial;
    let base_spec = up(&fx.base, 1, &comb, &Decoration::Plain);
    ensure(equal(&base_spec, &flip_base_spectrum()), || {
        format!("base spectrum {:?}", base_spec.values)
    })?;
    let cover_spec = up(&fx.cover.cover, 1, &comb, &Decoration::Plain);
    ensure(equal(&cover_spec, &flip_cover_spectrum()), || {
        format!("lift spectrum {:?}", cover_spec.values)
    })?;
    ensure(fx.incidence_voltage.nontrivial().len() == 1, || {
        "more than one flipped incidence".into()
    })?;
    let want = (
        Face::new(vec![1, 2]).unwrap(),
        Face::new(vec![1, 2, 6]).unwrap(),
    );
    ensure(fx.flipped == want, || format!("flip at {:?}", fx.flipped))?;
    ensure(
        labeling_is_isomorphism(&fx.cover, &fx.incidence_voltage, &fx.labeling).unwrap(),
        || "labeling is not an isomorphism of incidence graphs".into(),
    )?;
    let s = two_fold_signing(&fx.incidence_voltage).map_err(|e| e.to_string())?;
    let signed = up(&fx.base, 1, &comb, &Decoration::Signed(s));
    ensure(equal(&signed, &flip_signed_spectrum()), || {
        format!("signed spectrum {:?}", signed.values)
    })?;
    ensure(
        equal(&cover_spec, &SpectrumMultiset::union([&base_spec, &signed])),
        || "union fails".into(),
    )?;
    let group = VoltageGroup::of_voltage(&fx.incidence_voltage).unwrap();
    let dec = decompose_representation(&group, 0).unwrap();
    let blocks = block_laplacians(
        &fx.base,
        &fx.incidence_voltage,
        1,
        &comb,
        Direction::Up,
        &dec,
    )
    .unwrap();
    let second = spectrum(&blocks[1]).unwrap();
    ensure(equal(&second, &flip_signed_spectrum()), || {
        "second block spectrum differs".into()
    })?;
    let betti_k = exact_betti(&fx.cover.cover).unwrap();
    let betti_m = exact_betti(&fx.base).unwrap();
    ensure(
        (0..=2).all(|i| betti_k[&i] == betti_m[&i]) && betti_m[&1] == 1 && betti_m[&0] == 0,
        || format!("betti K {betti_k:?} M {betti_m:?}"),
    )?;
    Ok(format!(
        "{} isomorphism classes found; base facets {:?}; flip (12, 126)",
        fx.classes_found,
        fx.base
            .facets()
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let instances = random_instances(0x51, VoltageKind::TwoFold, 60, 30, 3);
    let mut checks = 0;
    for (n, inst) in instances.iter().enumerate() {
        let cov = &inst.lift.covering;
        for i in 0..inst.base.top_dim() {
            let psi = induced_incidence_voltage(cov, i).map_err(|e| e.to_string())?;
            let s = two_fold_signing(&psi).map_err(|e| e.to_string())?;
            for scheme in &SCHEMES {
                let lifted = up(&cov.cover, i, scheme, &Decoration::Plain);
                let plain = up(&inst.base, i, scheme, &Decoration::Plain);
                let signed = up(&inst.base, i, scheme, &Decoration::Signed(s.clone()));
                let rep = compare_spectra(&lifted, &plain, Comparison::UnionEquals(&signed));
                ensure(rep.holds, || {
                    format!(
                        "instance {n}, i={i}, {}: error {:e}",
                        scheme.name(),
                        rep.max_pairing_error
                    )
                })?;
                checks += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("suite took {secs:.1}s"))?;
    Ok(format!(
        "{} bases, {checks} spectrum unions, {secs:.2}s",
        instances.len()
    ))
}

fn criterion_3() -> Outcome {
    let mut checks = 0;
    let mut bases = 0;
    for (seed, kind) in [
        (0x52, VoltageKind::TwoFold),
        (0x53, VoltageKind::Symmetric(3)),
        (0x54, VoltageKind::Symmetric(4)),
    ] {
        let instances = random_instances(seed, kind, 20, 30, 3);
        bases += instances.len();
        for (n, inst) in instances.iter().enumerate() {
            let cov = &inst.lift.covering;
            let top = inst.base.top_dim();
            for scheme in &SCHEMES {
                for (kind_l, range) in [
                    (LaplacianKind::Up, 0..top),
                    (LaplacianKind::Down, 1..top + 1),
                ] {
                    for i in range {
                        let m = spec(&inst.base, i, kind_l, scheme, &Decoration::Plain);
                        let k = spec(&cov.cover, i, kind_l, scheme, &Decoration::Plain);
                        let rep = compare_spectra(&m, &k, Comparison::SubsetOf);
                        ensure(rep.holds, || {
                            format!(
                                "k={} instance {n}, {kind_l:?} i={i}, {}: witness {:?}",
                                kind.fold(),
                                scheme.name(),
                                rep.witness
                            )
                        })?;
                        checks += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{bases} coverings (k = 2, 3, 4), {checks} inclusions"
    ))
}

fn criterion_4() -> Outcome {
    let mut checks = 0;
    let mut bases = 0;
    for k in [3usize, 4, 5] {
        let instances = random_instances(0x60 + k as u64, VoltageKind::Cyclic(k), 20, 30, 3);
        for (n, inst) in instances.iter().enumerate() {
            let cov = &inst.lift.covering;
            let mut used = false;
            for i in 0..inst.base.top_dim() {
                let psi = induced_incidence_voltage_with(cov, i, &inst.lift.natural_labeling)
                    .map_err(|e| e.to_string())?;
                let group = VoltageGroup::of_voltage(&psi).map_err(|e| e.to_string())?;
                ensure(group.abelian, || {
                    format!("cyclic voltages gave a non-abelian group (k={k}, {n})")
                })?;
                if !group.transitive {
                    continue;
                }
                let dec = decompose_representation(&group, n as u64).map_err(|e| e.to_string())?;
                let omegas = abelian_weightings(&group, &psi, &dec).map_err(|e| e.to_string())?;
                ensure(omegas.len() == k - 1, || {
                    format!("{} characters for k={k}", omegas.len() + 1)
                })?;
                for scheme in &SCHEMES {
                    let lifted = up(&cov.cover, i, scheme, &Decoration::Plain);
                    let mut parts = vec![up(&inst.base, i, scheme, &Decoration::Plain)];
                    for w in &omegas {
                        ensure(
                            w.omega.values().all(|z| (z.norm() - 1.0).abs() < 1e-12),
                            || "character of modulus != 1".into(),
                        )?;
                        parts.push(up(&inst.base, i, scheme, &Decoration::Weighted(w.clone())));
                    }
                    let union = SpectrumMultiset::union(&parts);
                    let rep = compare_spectra(&lifted, &union, Comparison::Equal);
                    ensure(rep.holds, || {
                        format!(
                            "k={k} instance {n} i={i} {}: {:e}",
                            scheme.name(),
                            rep.max_pairing_error
                        )
                    })?;
                    let blocks = block_laplacians(&inst.base, &psi, i, scheme, Direction::Up, &dec)
                        .map_err(|e| e.to_string())?;
                    for (j, w) in omegas.iter().enumerate() {
                        let direct = laplacian_matrix(
                            &inst.base,
                            i,
                            LaplacianKind::Up,
                            scheme,
                            &Decoration::Weighted(w.clone()),
                        )
                        .unwrap();
                        let d = max_diff(&blocks[j + 1].entries, &direct.entries);
                        ensure(d <= ENTRY_TOL, || {
                            format!("block {} differs from weighted Laplacian by {d:e}", j + 2)
                        })?;
                    }
                    checks += 1;
                }
                used = true;
            }
            bases += used as usize;
        }
        ensure(bases >= 20, || {
            format!("only {bases} usable bases at k={k}")
        })?;
        bases = 0;
    }
    Ok(format!(
        "k = 3, 4, 5 with >= 20 bases each, {checks} character decompositions"
    ))
}

fn criterion_5() -> Outcome {
    let mut up_checks = 0;
    let mut down_checks = 0;
    let mut worst_residual: f64 = 0.0;
    let mut non_abelian = 0;
    for (seed, k) in [(0x70, 3usize), (0x71, 4), (0x72, 5), (0x73, 2)] {
        let instances = random_instances(seed, VoltageKind::Symmetric(k), 30, 30, 3);
        for (n, inst) in instances.iter().enumerate() {
            let cov = &inst.lift.covering;
            let top = inst.base.top_dim();
            for i in 0..top {
                let psi = induced_incidence_voltage(cov, i).map_err(|e| e.to_string())?;
                let group = VoltageGroup::of_voltage(&psi).map_err(|e| e.to_string())?;
                non_abelian += (!group.abelian) as usize;
                let dec =
                    decompose_representation(&group, 1000 + n as u64).map_err(|e| e.to_string())?;
                worst_residual = worst_residual.max(dec.residual);
                ensure(dec.residual <= BLOCK_TOL, || {
                    format!("block residual {:e}", dec.residual)
                })?;
                for scheme in &SCHEMES {
                    let blocks = block_laplacians(&inst.base, &psi, i, scheme, Direction::Up, &dec)
                        .map_err(|e| e.to_string())?;
                    let first = laplacian_matrix(
                        &inst.base,
                        i,
                        LaplacianKind::Up,
                        scheme,
                        &Decoration::Plain,
                    )
                    .unwrap();
                    let d = max_diff(&blocks[0].entries, &first.entries);
                    ensure(d <= ENTRY_TOL, || format!("first block differs by {d:e}"))?;
                    if k == 2 {
                        let s = two_fold_signing(&psi).unwrap();
                        let signed = laplacian_matrix(
                            &inst.base,
                            i,
                            LaplacianKind::Up,
                            scheme,
                            &Decoration::Signed(s),
                        )
                        .unwrap();
                        if group.order() == 2 {
                            let d = max_diff(&blocks[1].entries, &signed.entries);
                            ensure(d <= ENTRY_TOL, || {
                                format!("second block differs from signed Laplacian by {d:e}")
                            })?;
                        }
                    }
                    let spectra: Vec<SpectrumMultiset> =
                        blocks.iter().map(|b| spectrum(b).unwrap()).collect();
                    let lifted = up(&cov.cover, i, scheme, &Decoration::Plain);
                    let rep = compare_spectra(
                        &lifted,
                        &SpectrumMultiset::union(&spectra),
                        Comparison::Equal,
                    );
                    ensure(rep.holds, || {
                        format!("k={k} instance {n} up i={i}: {:e}", rep.max_pairing_error)
                    })?;
                    up_checks += 1;
                }
            }
            for i in 1..=top {
                let psi = induced_incidence_voltage(cov, i - 1).map_err(|e| e.to_string())?;
                let group = VoltageGroup::of_voltage(&psi).map_err(|e| e.to_string())?;
                let dec =
                    decompose_representation(&group, 2000 + n as u64).map_err(|e| e.to_string())?;
                ensure(dec.residual <= BLOCK_TOL, || {
                    format!("block residual {:e}", dec.residual)
                })?;
                for scheme in &SCHEMES {
                    let blocks =
                        block_laplacians(&inst.base, &psi, i, scheme, Direction::Down, &dec)
                            .map_err(|e| e.to_string())?;
                    let first = laplacian_matrix(
                        &inst.base,
                        i,
                        LaplacianKind::Down,
                        scheme,
                        &Decoration::Plain,
                    )
                    .unwrap();
                    let d = max_diff(&blocks[0].entries, &first.entries);
                    ensure(d <= ENTRY_TOL, || {
                        format!("first down block differs by {d:e}")
                    })?;
                    let spectra: Vec<SpectrumMultiset> =
                        blocks.iter().map(|b| spectrum(b).unwrap()).collect();
                    let lifted = spec(
                        &cov.cover,
                        i,
                        LaplacianKind::Down,
                        scheme,
                        &Decoration::Plain,
                    );
                    let rep = compare_spectra(
                        &lifted,
                        &SpectrumMultiset::union(&spectra),
                        Comparison::Equal,
                    );
                    ensure(rep.holds, || {
                        format!("k={k} instance {n} down i={i}: {:e}", rep.max_pairing_error)
                    })?;
                    down_checks += 1;
                }
            }
        }
    }
    ensure(non_abelian >= 20, || {
        format!("only {non_abelian} non-abelian voltage groups")
    })?;
    Ok(format!(
        "{non_abelian} non-abelian groups, {up_checks} up and {down_checks} down block unions, worst block residual {worst_residual:.1e}"
    ))
}

fn exact_identities(k: &SimplicialComplex) -> Result<(), String> {
    for i in -1..k.top_dim() {
        if i == -1 && !k.include_empty() {
            continue;
        }
        let a = coboundary_matrix(k, i).unwrap().entries;
        let b = coboundary_matrix(k, i + 1).unwrap().entries;
        ensure((b * a).iter().all(|&x| x == 0), || {
            format!("D_{} D_{i} != 0", i + 1)
        })?;
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let mut coverings = 0;
    let mut factorizations = 0;
    let fx = flip_fixture().map_err(|e| e.to_string())?;
    let mut all: Vec<(CoveringMap, Vec<FiberLabeling>)> = vec![(
        fx.cover.clone(),
        vec![fx.cover.labeling.clone(), fx.labeling.clone()],
    )];
    for (seed, kind) in [
        (0x51, VoltageKind::TwoFold),
        (0x53, VoltageKind::Symmetric(3)),
        (0x54, VoltageKind::Symmetric(4)),
        (0x63, VoltageKind::Cyclic(3)),
        (0x64, VoltageKind::Cyclic(4)),
        (0x65, VoltageKind::Cyclic(5)),
        (0x72, VoltageKind::Symmetric(5)),
    ] {
        for inst in random_instances(seed, kind, 20, 30, 3) {
            all.push(lifted_labelings(&inst));
        }
    }
    for (cov, labelings) in &all {
        exact_identities(&cov.cover)?;
        exact_identities(&cov.base)?;
        for labeling in labelings {
            for i in 0..cov.base.top_dim() {
                let f =
                    lambda_and_factorization_with(cov, i, labeling).map_err(|e| e.to_string())?;
                ensure(f.residual == 0, || {
                    format!("factorization residual {} at i={i}", f.residual)
                })?;
                factorizations += 1;
            }
        }
        coverings += 1;
    }
    Ok(format!(
        "{coverings} coverings, {factorizations} exact factorizations, all D_(i+1) D_i = 0"
    ))
}

fn criterion_7() -> Outcome {
    let mut checks = 0;
    for (seed, kind) in [
        (0x80, VoltageKind::TwoFold),
        (0x81, VoltageKind::Symmetric(3)),
        (0x82, VoltageKind::Cyclic(4)),
    ] {
        for (n, inst) in random_instances(seed, kind, 15, 30, 3).iter().enumerate() {
            for scheme in &SCHEMES {
                let rep = verify_betti_inequality(&inst.lift.covering, scheme, DEFAULT_KERNEL_TOL)
                    .map_err(|e| e.to_string())?;
                ensure(rep.holds, || {
                    format!("instance {n} ({}) fails: {:?}", scheme.name(), rep.dims)
                })?;
                checks += 1;
            }
        }
    }
    // every connected 2-lift of K_4 minus an edge
    let m = k4_minus_edge();
    ensure(exact_betti(&m).unwrap()[&1] == 2, || "base β_1 != 2".into())?;
    let skel = one_skeleton(&m);
    let edges: Vec<(usize, usize)> = skel.edges.clone();
    let mut lifts = 0;
    for mask in 0u32..(1 << edges.len()) {
        let mut psi = VoltageAssignment::new(2);
        for (b, &(u, v)) in edges.iter().enumerate() {
            psi.set(u, v, Permutation::cycle_power(2, (mask >> b & 1) as usize))
                .unwrap();
        }
        let lift = derived_complex(&m, &psi).unwrap();
        if !lift.is_connected() {
            continue;
        }
        let b = exact_betti(&lift.complex).unwrap();
        ensure(b[&1] == 3, || {
            format!("connected lift with β_1 = {}", b[&1])
        })?;
        let rep = verify_betti_inequality(
            &lift.covering,
            &WeightScheme::Combinatorial,
            DEFAULT_KERNEL_TOL,
        )
        .unwrap();
        ensure(rep.holds, || {
            "inequality report fails on K_4 minus an edge".into()
        })?;
        lifts += 1;
    }
    ensure(lifts > 0, || "no connected lift".into())?;
    Ok(format!("{checks} random inequality reports; {lifts} connected 2-lifts of K_4 minus an edge, all with β_1 = 3 > 2"))
}

fn criterion_8() -> Outcome {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x90);
    let mut worst: f64 = 0.0;
    for n in 0..30 {
        let k = random_base(&mut rng, 30, 3);
        for scheme in &SCHEMES {
            let r = betti_numbers(&k, scheme).map_err(|e| e.to_string())?;
            ensure(r.methods_agree(), || {
                format!(
                    "complex {n}: exact {:?} vs numeric {:?}",
                    r.exact, r.numeric
                )
            })?;
            let w = weights(&k, scheme);
            for i in -1..=k.top_dim() {
                for kind in [LaplacianKind::Up, LaplacianKind::Down] {
                    if kind == LaplacianKind::Down && i < 0 {
                        continue;
                    }
                    let lib = laplacian_matrix(&k, i, kind, scheme, &Decoration::Plain)
                        .unwrap()
                        .real_part();
                    let oracle = explicit_laplacian(&k, i, kind, &w);
                    let d = (&lib - &oracle).amax();
                    worst = worst.max(d);
                    ensure(d <= 1e-10, || {
                        format!("complex {n} {kind:?} i={i}: entry error {d:e}")
                    })?;
                }
            }
        }
    }
    let mut kron = 0;
    for (seed, kind) in [
        (0x91, VoltageKind::Symmetric(3)),
        (0x92, VoltageKind::Cyclic(4)),
        (0x93, VoltageKind::TwoFold),
    ] {
        for inst in random_instances(seed, kind, 20, 30, 3) {
            for labeling in lifted_labelings(&inst).1 {
                for i in 0..inst.base.top_dim() {
                    let psi =
                        induced_incidence_voltage_with(&inst.lift.covering, i, &labeling).unwrap();
                    let a: DMatrix<i64> = derived_coboundary(&inst.base, &psi).unwrap();
                    let b = derived_coboundary_entrywise(&inst.base, &psi).unwrap();
                    ensure(a == b, || "Kronecker and entrywise lifts differ".into())?;
                    kron += 1;
                }
            }
        }
    }
    ensure(kron >= 50, || {
        format!("only {kron} lifted coboundaries compared")
    })?;
    Ok(format!("30 complexes x 2 schemes Betti agreement; {kron} exact Kronecker checks; worst entry error {worst:.1e}"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "annulus fixture recovery and lifted/signed spectra",
            criterion_1,
        ),
        ("2-fold union property", criterion_2),
        ("spectral inclusion, up and down", criterion_3),
        ("abelian character decomposition", criterion_4),
        ("general block decomposition, up and down", criterion_5),
        ("exact integer identities", criterion_6),
        ("Betti inequality", criterion_7),
        ("cross-method oracles", criterion_8),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}) [{secs:.2}s]: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}) [{secs:.2}s]: {why}", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
