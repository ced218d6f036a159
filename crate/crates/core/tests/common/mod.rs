//! Independent oracles and instance generators shared by integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simplicial_covers::complex::{compute_weights, Face, FaceWeights};
use simplicial_covers::covering::{DerivedComplex, VoltageAssignment};
use simplicial_covers::operators::{laplacian_matrix, spectrum, Decoration, LaplacianKind, C64};
use simplicial_covers::random::{random_base, random_connected_lift, VoltageKind};
use simplicial_covers::spectrum::SpectrumMultiset;
use simplicial_covers::{SimplicialComplex, WeightScheme};

/// `sgn([G], ∂[Ḡ])`: `(-1)^p` where `p` is the position of the vertex of
/// `Ḡ` missing from `G`.
pub fn boundary_sign(face: &Face, cofacet: &Face) -> f64 {
    let p = cofacet
        .vertices()
        .iter()
        .position(|v| !face.vertices().contains(v))
        .expect("face is a facet of cofacet");
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn is_facet_of(face: &Face, cofacet: &Face) -> bool {
    cofacet.len() == face.len() + 1
        && face
            .vertices()
            .iter()
            .all(|v| cofacet.vertices().contains(v))
}

/// Up and down Laplacians from the entrywise sums over faces, with no
/// matrix products.
pub fn explicit_laplacian(
    k: &SimplicialComplex,
    i: isize,
    kind: LaplacianKind,
    w: &FaceWeights,
) -> DMatrix<f64> {
    let faces = k.faces(i);
    let n = faces.len();
    let wt = |f: &Face| w.get(k, f).unwrap();
    let mut l = DMatrix::zeros(n, n);
    if kind == LaplacianKind::Up || kind == LaplacianKind::Full {
        for (a, g) in faces.iter().enumerate() {
            for gbar in k.faces(i + 1).iter().filter(|c| is_facet_of(g, c)) {
                l[(a, a)] += wt(gbar) / wt(g);
                for (b, g2) in faces.iter().enumerate() {
                    if b != a && is_facet_of(g2, gbar) {
                        l[(a, b)] +=
                            wt(gbar) / wt(g) * boundary_sign(g, gbar) * boundary_sign(g2, gbar);
                    }
                }
            }
        }
    }
    if (kind == LaplacianKind::Down || kind == LaplacianKind::Full)
        && (i > 0 || (i == 0 && k.include_empty()))
    {
        for (a, g) in faces.iter().enumerate() {
            for h in k.faces(i - 1).iter().filter(|h| is_facet_of(h, g)) {
                l[(a, a)] += wt(g) / wt(h);
                for (b, g2) in faces.iter().enumerate() {
                    if b != a && is_facet_of(h, g2) {
                        l[(a, b)] += wt(g2) / wt(h) * boundary_sign(h, g) * boundary_sign(h, g2);
                    }
                }
            }
        }
    }
    l
}

pub fn weights(k: &SimplicialComplex, scheme: &WeightScheme) -> FaceWeights {
    compute_weights(k, scheme).unwrap()
}

pub fn spec(
    k: &SimplicialComplex,
    i: isize,
    kind: LaplacianKind,
    scheme: &WeightScheme,
    dec: &Decoration,
) -> SpectrumMultiset {
    spectrum(&laplacian_matrix(k, i, kind, scheme, dec).unwrap()).unwrap()
}

pub fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Closure by repeated products of all known elements until nothing new
/// appears.
pub fn closure_oracle(generators: &[Vec<usize>], k: usize) -> BTreeSet<Vec<usize>> {
    let mut set: BTreeSet<Vec<usize>> = BTreeSet::from([(0..k).collect()]);
    set.extend(generators.iter().cloned());
    loop {
        let current: Vec<Vec<usize>> = set.iter().cloned().collect();
        let mut grew = false;
        for a in &current {
            for b in &current {
                let prod: Vec<usize> = (0..k).map(|j| a[b[j]]).collect();
                grew |= set.insert(prod);
            }
        }
        if !grew {
            return set;
        }
    }
}

pub struct Instance {
    pub base: SimplicialComplex,
    pub voltage: VoltageAssignment,
    pub lift: DerivedComplex,
}

/// `count` random bases with a connected lift of the given kind.
pub fn random_instances(
    seed: u64,
    kind: VoltageKind,
    count: usize,
    max_faces: usize,
    max_dim: usize,
) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut draws = 0;
    while out.len() < count {
        draws += 1;
        assert!(
            draws < 100 * count + 1000,
            "could not find {count} connected lifts"
        );
        let base = random_base(&mut rng, max_faces, max_dim);
        if let Some((voltage, lift)) = random_connected_lift(&mut rng, &base, kind, 8) {
            out.push(Instance {
                base,
                voltage,
                lift,
            });
        }
    }
    out
}

pub const SCHEMES: [WeightScheme; 2] = [WeightScheme::Combinatorial, WeightScheme::Normalized];
