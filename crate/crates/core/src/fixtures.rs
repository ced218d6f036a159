//! Standard small complexes and the search that recovers the 6-vertex
//! annulus-type complex with `Spec L_1^up = {5, 4², 2², 1, 0⁶}`.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{Face, SimplicialComplex, WeightScheme};
use crate::covering::{
    derived_complex, induced_incidence_voltage_with, one_skeleton, tree_normalized_labeling,
    tree_normalized_labeling_avoiding, CoveringMap, FiberLabeling, IncidenceVoltage,
    VoltageAssignment,
};
use crate::error::{Error, Result};
use crate::operators::{laplacian_matrix, spectrum, Decoration, LaplacianKind};
use crate::perm::Permutation;
use crate::spectrum::{compare_spectra, Comparison, SpectrumMultiset, DEFAULT_TOL};

/// The cycle graph on `0..n`.
pub fn cycle(n: usize) -> SimplicialComplex {
    let facets: Vec<Vec<usize>> = (0..n).map(|v| vec![v, (v + 1) % n]).collect();
    SimplicialComplex::build(&facets, true).expect("n >= 3")
}

/// The full simplex on `0..=d`.
pub fn simplex(d: usize) -> SimplicialComplex {
    SimplicialComplex::build(&[(0..=d).collect()], true).expect("nonempty")
}

/// `K_4` on `1..=4` without the edge `34`.
pub fn k4_minus_edge() -> SimplicialComplex {
    SimplicialComplex::build(
        &[vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4]],
        true,
    )
    .expect("valid graph")
}

/// Maps `vertex → n` by `map` (a bijection on the vertex set).
pub fn relabel(k: &SimplicialComplex, map: &BTreeMap<usize, usize>) -> Result<SimplicialComplex> {
    let facets: Vec<Vec<usize>> = k
        .facets()
        .iter()
        .map(|f| f.vertices().iter().map(|v| map[v]).collect())
        .collect();
    SimplicialComplex::build(&facets, k.include_empty())
}

/// The base spectrum the search looks for.
pub fn flip_base_spectrum() -> SpectrumMultiset {
    let mut v = vec![5.0, 4.0, 4.0, 2.0, 2.0, 1.0];
    v.extend([0.0; 6]);
    SpectrumMultiset::new(v, DEFAULT_TOL)
}

/// `Spec L_1^up` of the lift.
pub fn flip_cover_spectrum() -> SpectrumMultiset {
    let r3 = 3f64.sqrt();
    let mut v = vec![
        5.0,
        4.0,
        4.0,
        3.0,
        3.0,
        2.0,
        2.0,
        1.0,
        3.0 + r3,
        3.0 + r3,
        3.0 - r3,
        3.0 - r3,
    ];
    v.extend([0.0; 12]);
    SpectrumMultiset::new(v, DEFAULT_TOL)
}

/// `Spec L_1^up(M, s)`.
pub fn flip_signed_spectrum() -> SpectrumMultiset {
    let r3 = 3f64.sqrt();
    let mut v = vec![3.0, 3.0, 3.0 + r3, 3.0 + r3, 3.0 - r3, 3.0 - r3];
    v.extend([0.0; 6]);
    SpectrumMultiset::new(v, DEFAULT_TOL)
}

fn up_spectrum(k: &SimplicialComplex, i: isize) -> Result<SpectrumMultiset> {
    spectrum(&laplacian_matrix(
        k,
        i,
        LaplacianKind::Up,
        &WeightScheme::Combinatorial,
        &Decoration::Plain,
    )?)
}

/// Complexes on 6 vertices, 12 edges and 6 triangles with every edge in at
/// most two triangles, connected, `β_1 = 1`, and the target `L_1^up`
/// spectrum. One representative per isomorphism class, vertices `1..=6`.
pub fn search_flip_bases() -> Result<Vec<SimplicialComplex>> {
    let all_edges: Vec<(usize, usize)> = (1..=6)
        .flat_map(|a| (a + 1..=6).map(move |b| (a, b)))
        .collect();
    let target = flip_base_spectrum();
    let mut seen: BTreeSet<Vec<Vec<usize>>> = BTreeSet::new();
    let mut found = Vec::new();
    // choose the 3 missing edges out of 15
    for x in 0..15 {
        for y in x + 1..15 {
            for z in y + 1..15 {
                let edges: Vec<(usize, usize)> = (0..15)
                    .filter(|&e| e != x && e != y && e != z)
                    .map(|e| all_edges[e])
                    .collect();
                let has = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
                let triangles: Vec<[usize; 3]> = (1..=6)
                    .flat_map(|a| {
                        (a + 1..=6).flat_map(move |b| (b + 1..=6).map(move |c| [a, b, c]))
                    })
                    .filter(|t| has(t[0], t[1]) && has(t[0], t[2]) && has(t[1], t[2]))
                    .collect();
                for_each_subset(triangles.len(), 6, &mut |chosen| {
                    let tris: Vec<[usize; 3]> = chosen.iter().map(|&t| triangles[t]).collect();
                    if let Some(k) = candidate(&edges, &tris, &target) {
                        let key = canonical_form(&k);
                        if seen.insert(key) {
                            found.push(k);
                        }
                    }
                });
            }
        }
    }
    Ok(found)
}

fn for_each_subset(n: usize, r: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == r {
            f(cur);
            return;
        }
        for s in start..n {
            if n - s < r - cur.len() {
                break;
            }
            cur.push(s);
            go(s + 1, n, r, cur, f);
            cur.pop();
        }
    }
    go(0, n, r, &mut Vec::with_capacity(r), f);
}

fn candidate(
    edges: &[(usize, usize)],
    tris: &[[usize; 3]],
    target: &SpectrumMultiset,
) -> Option<SimplicialComplex> {
    let mut per_edge: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in tris {
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            *per_edge.entry((a, b)).or_default() += 1;
        }
    }
    if per_edge.values().any(|&c| c > 2) {
        return None;
    }
    // cheap filter: Σλ² = |L|_F², with L = D^T D
    let idx: BTreeMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(n, &e)| (e, n)).collect();
    let mut l = vec![[0i64; 12]; 12];
    for t in tris {
        let faces = [((t[1], t[2]), 1i64), ((t[0], t[2]), -1), ((t[0], t[1]), 1)];
        for &(e, s) in &faces {
            for &(f, r) in &faces {
                l[idx[&e]][idx[&f]] += s * r;
            }
        }
    }
    let frob: i64 = l.iter().flatten().map(|x| x * x).sum();
    let target_frob: f64 = target.values.iter().map(|x| x * x).sum();
    if (frob as f64 - target_frob).abs() > 0.5 {
        return None;
    }
    let mut facets: Vec<Vec<usize>> = tris.iter().map(|t| t.to_vec()).collect();
    facets.extend(edges.iter().map(|&(a, b)| vec![a, b]));
    let k = SimplicialComplex::build(&facets, true).ok()?;
    if !k.is_connected() || k.count(0) != 6 {
        return None;
    }
    let s = up_spectrum(&k, 1).ok()?;
    if !compare_spectra(&s, target, Comparison::Equal).holds {
        return None;
    }
    let betti = crate::homology::exact_betti(&k).ok()?;
    (betti[&1] == 1).then_some(k)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            cur.swap(j, k - 1);
        }
    }
    heap(n, &mut cur, &mut out);
    out
}

/// Smallest sorted facet list over all relabelings of the vertices.
fn canonical_form(k: &SimplicialComplex) -> Vec<Vec<usize>> {
    let verts = k.vertices();
    let facets = k.facets();
    permutations(verts.len())
        .into_iter()
        .map(|p| {
            let pos = |v: usize| p[verts.binary_search(&v).unwrap()];
            let mut fs: Vec<Vec<usize>> = facets
                .iter()
                .map(|f| {
                    let mut x: Vec<usize> = f.vertices().iter().map(|&v| pos(v)).collect();
                    x.sort_unstable();
                    x
                })
                .collect();
            fs.sort();
            fs
        })
        .min()
        .unwrap()
}

/// The recovered base, its connected 2-fold lift, and a fiber labeling for
/// which exactly one incidence of `B_1(M)` carries the swap, placed at
/// `(12, 126)`.
#[derive(Clone, Debug)]
pub struct FlipFixture {
    pub base: SimplicialComplex,
    pub cover: CoveringMap,
    /// Voltages on the 1-skeleton of `base` that produce `cover`.
    pub skeleton_voltage: VoltageAssignment,
    pub labeling: FiberLabeling,
    pub incidence_voltage: IncidenceVoltage,
    pub flipped: (Face, Face),
    /// Non-isomorphic bases passing the search.
    pub classes_found: usize,
}

/// Runs the search and builds the lift of the first base found.
pub fn flip_fixture() -> Result<FlipFixture> {
    let bases = search_flip_bases()?;
    let classes_found = bases.len();
    let first = bases.first().ok_or_else(|| {
        Error::MalformedInput("no base complex matches the target spectrum".into())
    })?;
    let base = place_flip(first)?;
    let (skeleton_voltage, cover) = connected_two_lift(&base)?;
    let want = (Face::new(vec![1, 2])?, Face::new(vec![1, 2, 6])?);
    let labeling = tree_normalized_labeling_avoiding(&cover, 1, Some((&want.0, &want.1)))?;
    let incidence_voltage = induced_incidence_voltage_with(&cover, 1, &labeling)?;
    let nontrivial = incidence_voltage.nontrivial();
    if nontrivial.len() != 1 {
        return Err(Error::MalformedInput(format!(
            "expected one flipped incidence, found {}",
            nontrivial.len()
        )));
    }
    let (face, cofacet, _) = nontrivial.into_iter().next().unwrap();
    Ok(FlipFixture {
        base,
        cover,
        skeleton_voltage,
        labeling,
        incidence_voltage,
        flipped: (face, cofacet),
        classes_found,
    })
}

/// Relabels `k` so that an incidence on the cycle of `B_1(k)` becomes
/// `(12, 126)`.
fn place_flip(k: &SimplicialComplex) -> Result<SimplicialComplex> {
    let (_, cover) = connected_two_lift(k)?;
    let labeling = tree_normalized_labeling(&cover, 1)?;
    let psi = induced_incidence_voltage_with(&cover, 1, &labeling)?;
    let Some((face, cofacet, _)) = psi.nontrivial().into_iter().next() else {
        return Ok(k.clone());
    };
    let third = cofacet
        .vertices()
        .iter()
        .copied()
        .find(|v| !face.vertices().contains(v))
        .unwrap();
    let mut order: Vec<usize> = face.vertices().to_vec();
    let rest: Vec<usize> = k
        .vertices()
        .into_iter()
        .filter(|v| !order.contains(v) && *v != third)
        .collect();
    order.extend(rest);
    order.push(third);
    let map: BTreeMap<usize, usize> = order.iter().enumerate().map(|(n, &v)| (v, n + 1)).collect();
    relabel(k, &map)
}

/// The first connected 2-fold lift found by enumerating cocycle voltages
/// that are the identity on a breadth-first spanning tree.
pub fn connected_two_lift(m: &SimplicialComplex) -> Result<(VoltageAssignment, CoveringMap)> {
    let skel = one_skeleton(m);
    let adj = skel.neighbors();
    let mut seen = vec![false; skel.num_nodes];
    let mut tree = BTreeSet::new();
    let mut queue = std::collections::VecDeque::from([0usize]);
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
    let free: Vec<(usize, usize)> = skel
        .edge_set()
        .into_iter()
        .filter(|e| !tree.contains(e))
        .collect();
    if free.len() > 20 {
        return Err(Error::MalformedInput(
            "too many non-tree edges to enumerate".into(),
        ));
    }
    let swap = Permutation::transposition(2, 0, 1);
    for mask in 1u32..(1 << free.len()) {
        let mut psi = VoltageAssignment::identity_on(&skel, 2);
        for (b, &(u, v)) in free.iter().enumerate() {
            if mask >> b & 1 == 1 {
                psi.set(u, v, swap.clone())?;
            }
        }
        let Ok(lift) = derived_complex(m, &psi) else {
            continue;
        };
        if lift.is_connected() {
            return Ok((psi, lift.connected_cover()?));
        }
    }
    Err(Error::NotTransitive)
}
