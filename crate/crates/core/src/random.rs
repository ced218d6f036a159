//! Seeded random bases and cocycle voltages for the property suites.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::complex::{Face, SimplicialComplex};
use crate::covering::{derived_complex, one_skeleton, DerivedComplex, VoltageAssignment};
use crate::perm::Permutation;

/// Which permutations random voltages are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VoltageKind {
    /// `id` or `(1 2)`.
    TwoFold,
    /// Powers of `(1 2 .. k)`.
    Cyclic(usize),
    /// Uniform in `S_k`.
    Symmetric(usize),
}

impl VoltageKind {
    pub fn fold(self) -> usize {
        match self {
            VoltageKind::TwoFold => 2,
            VoltageKind::Cyclic(k) | VoltageKind::Symmetric(k) => k,
        }
    }

    fn sample<R: Rng>(self, rng: &mut R) -> Permutation {
        match self {
            VoltageKind::TwoFold => Permutation::cycle_power(2, rng.gen_range(0..2)),
            VoltageKind::Cyclic(k) => Permutation::cycle_power(k, rng.gen_range(0..k)),
            VoltageKind::Symmetric(k) => {
                let mut images: Vec<usize> = (0..k).collect();
                images.shuffle(rng);
                Permutation::from_images(images).expect("shuffled identity")
            }
        }
    }
}

/// A connected complex with at most `max_faces` nonempty faces, dimension
/// between 1 and `max_dim`, on 4 to 7 vertices.
pub fn random_base<R: Rng>(rng: &mut R, max_faces: usize, max_dim: usize) -> SimplicialComplex {
    loop {
        let n = rng.gen_range(4..=7);
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        // random spanning tree, then extra edges
        for v in 1..n {
            let u = rng.gen_range(0..v);
            edges.insert((u, v));
        }
        let extra = rng.gen_range(1..=n);
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        let mut facets: Vec<Vec<usize>> = edges.iter().map(|&(a, b)| vec![a, b]).collect();
        let has = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
        let mut triangles = Vec::new();
        if max_dim >= 2 {
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        if has(a, b) && has(a, c) && has(b, c) && rng.gen_bool(0.4) {
                            triangles.push(vec![a, b, c]);
                        }
                    }
                }
            }
        }
        if max_dim >= 3 {
            let tri_set: BTreeSet<Vec<usize>> = triangles.iter().cloned().collect();
            for t in &triangles {
                for d in t[2] + 1..n {
                    let tet = [t[0], t[1], t[2], d];
                    let faces_present = (0..4).all(|o| {
                        let f: Vec<usize> = tet
                            .iter()
                            .enumerate()
                            .filter(|&(x, _)| x != o)
                            .map(|(_, &v)| v)
                            .collect();
                        has(f[0], f[1])
                            && has(f[0], f[2])
                            && has(f[1], f[2])
                            && (o == 3 || tri_set.contains(&f) || rng.gen_bool(0.5))
                    });
                    if faces_present && rng.gen_bool(0.3) {
                        facets.push(tet.to_vec());
                    }
                }
            }
        }
        facets.extend(triangles);
        let Ok(k) = SimplicialComplex::build(&facets, true) else {
            continue;
        };
        if k.is_connected() && k.num_faces() - 1 <= max_faces && k.top_dim() >= 1 {
            return k;
        }
    }
}

/// A voltage on the 1-skeleton of `m` satisfying the cocycle condition,
/// identity on a breadth-first spanning tree. `None` if propagation keeps
/// hitting contradictions.
pub fn random_cocycle<R: Rng>(
    rng: &mut R,
    m: &SimplicialComplex,
    kind: VoltageKind,
) -> Option<VoltageAssignment> {
    let skel = one_skeleton(m);
    let k = kind.fold();
    let pos = |v: usize| m.index_of(&Face::new(vec![v]).unwrap()).unwrap();
    let triangles: Vec<[usize; 3]> = m
        .faces(2)
        .iter()
        .map(|t| {
            [
                pos(t.vertices()[0]),
                pos(t.vertices()[1]),
                pos(t.vertices()[2]),
            ]
        })
        .collect();
    let adj = skel.neighbors();
    let mut tree = BTreeSet::new();
    let mut seen = vec![false; skel.num_nodes];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                tree.insert((u.min(v), u.max(v)));
                queue.push_back(v);
            }
        }
    }
    'attempt: for _ in 0..20 {
        // values stored as ψ(a→b) for a < b
        let mut val: BTreeMap<(usize, usize), Permutation> = tree
            .iter()
            .map(|&e| (e, Permutation::identity(k)))
            .collect();
        let mut free: Vec<(usize, usize)> = skel
            .edge_set()
            .into_iter()
            .filter(|e| !tree.contains(e))
            .collect();
        free.shuffle(rng);
        loop {
            // ψ(u→w) = ψ(u→v) ∘ ψ(v→w)
            let mut changed = true;
            while changed {
                changed = false;
                for &[u, v, w] in &triangles {
                    let (uv, vw, uw) = (
                        val.get(&(u, v)).cloned(),
                        val.get(&(v, w)).cloned(),
                        val.get(&(u, w)).cloned(),
                    );
                    match (uv, vw, uw) {
                        (Some(a), Some(b), Some(c)) => {
                            if a.compose(&b) != c {
                                continue 'attempt;
                            }
                        }
                        (Some(a), Some(b), None) => {
                            val.insert((u, w), a.compose(&b));
                            changed = true;
                        }
                        (Some(a), None, Some(c)) => {
                            val.insert((v, w), a.inverse().compose(&c));
                            changed = true;
                        }
                        (None, Some(b), Some(c)) => {
                            val.insert((u, v), c.compose(&b.inverse()));
                            changed = true;
                        }
                        _ => {}
                    }
                }
            }
            match free.iter().position(|e| !val.contains_key(e)) {
                Some(at) => {
                    let e = free.remove(at);
                    val.insert(e, kind.sample(rng));
                }
                None => break,
            }
        }
        let mut psi = VoltageAssignment::new(k);
        for ((a, b), p) in val {
            psi.set(a, b, p).ok()?;
        }
        return Some(psi);
    }
    None
}

/// A random cocycle voltage whose lift is connected, within `attempts` draws.
pub fn random_connected_lift<R: Rng>(
    rng: &mut R,
    m: &SimplicialComplex,
    kind: VoltageKind,
    attempts: usize,
) -> Option<(VoltageAssignment, DerivedComplex)> {
    for _ in 0..attempts {
        let Some(psi) = random_cocycle(rng, m, kind) else {
            continue;
        };
        if let Ok(lift) = derived_complex(m, &psi) {
            if lift.is_connected() {
                return Some((psi, lift));
            }
        }
    }
    None
}
