//! Voltage groups, the splitting `D_i = Σ_g D_i^g`, the permutation
//! representation and its numerical block decomposition, and the block
//! Laplacians whose spectra assemble the spectrum of a lift.

use std::collections::{BTreeMap, HashMap, VecDeque};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{coboundary_matrix, compute_weights, SimplicialComplex, WeightScheme};
use crate::covering::IncidenceVoltage;
use crate::error::{Error, Result};
use crate::operators::{IncidenceSigning, IncidenceWeighting, LaplacianKind, OperatorMatrix, C64};
use crate::perm::Permutation;

/// Off-block residue allowed in `T^{-1} P^g T`.
pub const BLOCK_TOL: f64 = 1e-10;

const MAX_ATTEMPTS: usize = 8;

/// The subgroup of `S_k` generated by a set of voltages.
#[derive(Clone, Debug, PartialEq)]
pub struct VoltageGroup {
    pub k: usize,
    /// Identity first, then breadth-first discovery order.
    pub elements: Vec<Permutation>,
    pub generators: Vec<Permutation>,
    pub transitive: bool,
    pub abelian: bool,
    index: HashMap<Permutation, usize>,
}

fn factorial_bound(k: usize) -> usize {
    (1..=k)
        .try_fold(1usize, |acc, x| acc.checked_mul(x))
        .unwrap_or(usize::MAX)
}

/// Closure of `generators` in `S_k`, bounded by `k!`.
pub fn voltage_group(k: usize, generators: &[Permutation]) -> Result<VoltageGroup> {
    voltage_group_bounded(k, generators, factorial_bound(k))
}

pub fn voltage_group_bounded(
    k: usize,
    generators: &[Permutation],
    bound: usize,
) -> Result<VoltageGroup> {
    let mut gens: Vec<Permutation> = Vec::new();
    for g in generators {
        if g.degree() != k {
            return Err(Error::WrongFold {
                expected: k,
                got: g.degree(),
            });
        }
        if !g.is_identity() && !gens.contains(g) {
            gens.push(g.clone());
        }
    }
    gens.sort();
    let id = Permutation::identity(k);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(e) = queue.pop_front() {
        for g in &gens {
            let next = elements[e].compose(g);
            if !index.contains_key(&next) {
                if elements.len() >= bound {
                    return Err(Error::GroupTooLarge(bound));
                }
                index.insert(next.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(next);
            }
        }
    }
    let mut orbit = vec![false; k];
    for g in &elements {
        if k > 0 {
            orbit[g.apply(0)] = true;
        }
    }
    let transitive = orbit.iter().all(|&x| x);
    let abelian = gens
        .iter()
        .enumerate()
        .all(|(a, g)| gens[a + 1..].iter().all(|h| g.compose(h) == h.compose(g)));
    Ok(VoltageGroup {
        k,
        elements,
        generators: gens,
        transitive,
        abelian,
        index,
    })
}

impl VoltageGroup {
    /// The group `Ψ_i` generated by the voltages on `B_i(M)`.
    pub fn of_voltage(psi: &IncidenceVoltage) -> Result<Self> {
        voltage_group(psi.k, &psi.perms)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, g: &Permutation) -> Option<usize> {
        self.index.get(g).copied()
    }
}

/// The matrices `D_i^g`, keyed by voltage value, in permutation order.
pub fn split_coboundary(
    m: &SimplicialComplex,
    psi: &IncidenceVoltage,
) -> Result<BTreeMap<Permutation, DMatrix<i64>>> {
    let d = coboundary_matrix(m, psi.dim())?;
    let mut parts: BTreeMap<Permutation, DMatrix<i64>> = BTreeMap::new();
    for (&(g, gbar), p) in psi.graph.edges.iter().zip(&psi.perms) {
        parts
            .entry(p.clone())
            .or_insert_with(|| DMatrix::zeros(d.nrows(), d.ncols()))[(gbar, g)] =
            d.entries[(gbar, g)];
    }
    if parts.is_empty() {
        parts.insert(
            Permutation::identity(psi.k),
            DMatrix::zeros(d.nrows(), d.ncols()),
        );
    }
    Ok(parts)
}

fn permutation_matrix_i64(g: &Permutation) -> DMatrix<i64> {
    let k = g.degree();
    let mut p = DMatrix::zeros(k, k);
    for j in 0..k {
        p[(g.apply(j), j)] = 1;
    }
    p
}

/// `D_i^ψ = Σ_g D_i^g ⊗ P^g`.
pub fn derived_coboundary(m: &SimplicialComplex, psi: &IncidenceVoltage) -> Result<DMatrix<i64>> {
    let parts = split_coboundary(m, psi)?;
    let mut total: Option<DMatrix<i64>> = None;
    for (g, dg) in &parts {
        let term = dg.kronecker(&permutation_matrix_i64(g));
        total = Some(match total {
            Some(t) => t + term,
            None => term,
        });
    }
    Ok(total.expect("split is never empty"))
}

/// `T` with `T^{-1} P^g T = ⊕_j ϱ_j(g)` for every group element.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub group: VoltageGroup,
    /// Unitary; the first column is the normalized all-ones vector.
    pub t: DMatrix<C64>,
    /// First entry is 1 (the trivial representation).
    pub block_sizes: Vec<usize>,
    /// `blocks[e][j] = ϱ_j(elements[e])`.
    pub blocks: Vec<Vec<DMatrix<C64>>>,
    /// Largest off-block entry over all group elements.
    pub residual: f64,
    pub attempts: usize,
}

impl BlockDecomposition {
    pub fn rho(&self, j: usize, g: &Permutation) -> &DMatrix<C64> {
        let e = self
            .group
            .index_of(g)
            .expect("element of the decomposed group");
        &self.blocks[e][j]
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for &s in sizes {
        out.push(acc);
        acc += s;
    }
    out
}

fn complement_of_ones(k: usize) -> DMatrix<f64> {
    // Gram-Schmidt on the standard basis against ones/√k
    let mut basis: Vec<DVector<f64>> = vec![DVector::from_element(k, 1.0 / (k as f64).sqrt())];
    for e in 0..k {
        let mut v = DVector::zeros(k);
        v[e] = 1.0;
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let n = v.norm();
        if n > 1e-8 {
            basis.push(v / n);
        }
        if basis.len() == k {
            break;
        }
    }
    DMatrix::from_columns(&basis[1..])
}

fn random_hermitian(k: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let mut r = DMatrix::from_element(k, k, C64::new(0.0, 0.0));
    for a in 0..k {
        r[(a, a)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
        for b in a + 1..k {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            r[(a, b)] = z;
            r[(b, a)] = z.conj();
        }
    }
    r
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}

/// Splits the permutation representation into invariant blocks.
///
/// The complement of the all-ones vector is split along the eigenspaces of
/// a random Hermitian element of the commutant. The result is checked for
/// block-diagonality; a failed check retries with a fresh element.
pub fn decompose_representation(group: &VoltageGroup, seed: u64) -> Result<BlockDecomposition> {
    let k = group.k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perms: Vec<DMatrix<C64>> = group
        .elements
        .iter()
        .map(|g| to_complex(&g.matrix()))
        .collect();
    let ones = DMatrix::from_element(k, 1, C64::new(1.0 / (k as f64).sqrt(), 0.0));
    let comp = to_complex(&complement_of_ones(k));
    let mut worst = f64::INFINITY;
    for attempt in 1..=MAX_ATTEMPTS {
        let (t, sizes) = if k == 1 {
            (ones.clone(), vec![1])
        } else {
            let r = random_hermitian(k, &mut rng);
            let mut x = DMatrix::from_element(k, k, C64::new(0.0, 0.0));
            for p in &perms {
                x += p * &r * p.transpose();
            }
            x /= C64::new(group.order() as f64, 0.0);
            let y = comp.adjoint() * &x * &comp;
            let y = (&y + y.adjoint()) * C64::new(0.5, 0.0);
            let eig = SymmetricEigen::try_new(y, 1e-15, 0).ok_or(Error::EigenFailure)?;
            let mut order: Vec<usize> = (0..k - 1).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let mut clusters: Vec<Vec<usize>> = Vec::new();
            for &idx in &order {
                match clusters.last_mut() {
                    Some(c)
                        if (eig.eigenvalues[idx] - eig.eigenvalues[*c.last().unwrap()]).abs()
                            <= 1e-7 * scale =>
                    {
                        c.push(idx)
                    }
                    _ => clusters.push(vec![idx]),
                }
            }
            let mut cols: Vec<DVector<C64>> = vec![ones.column(0).into_owned()];
            let mut sizes = vec![1];
            for c in &clusters {
                for &idx in c {
                    cols.push(&comp * eig.eigenvectors.column(idx));
                }
                sizes.push(c.len());
            }
            (DMatrix::from_columns(&cols), sizes)
        };
        let tinv = t.adjoint();
        let offs = offsets(&sizes);
        let mut residual: f64 = 0.0;
        let mut blocks = Vec::with_capacity(perms.len());
        for p in &perms {
            let m = &tinv * p * &t;
            for r in 0..k {
                for c in 0..k {
                    let br = offs.partition_point(|&o| o <= r);
                    let bc = offs.partition_point(|&o| o <= c);
                    if br != bc {
                        residual = residual.max(m[(r, c)].norm());
                    }
                }
            }
            residual = residual.max((m[(0, 0)] - C64::new(1.0, 0.0)).norm());
            blocks.push(
                sizes
                    .iter()
                    .zip(&offs)
                    .map(|(&s, &o)| m.view((o, o), (s, s)).into_owned())
                    .collect::<Vec<_>>(),
            );
        }
        let unitarity = (&tinv * &t - DMatrix::<C64>::identity(k, k))
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        residual = residual.max(unitarity);
        if residual <= BLOCK_TOL {
            return Ok(sort_blocks(group, t, sizes, blocks, residual, attempt));
        }
        worst = worst.min(residual);
    }
    Err(Error::DecompositionFailed {
        residual: worst,
        attempts: MAX_ATTEMPTS,
    })
}

/// Orders the non-trivial blocks by size, then by character values.
fn sort_blocks(
    group: &VoltageGroup,
    t: DMatrix<C64>,
    sizes: Vec<usize>,
    blocks: Vec<Vec<DMatrix<C64>>>,
    residual: f64,
    attempts: usize,
) -> BlockDecomposition {
    let quant = |x: f64| (x * 1e6).round() as i64;
    let key = |j: usize| -> (usize, Vec<(i64, i64)>) {
        let chars = blocks
            .iter()
            .map(|b| b[j].trace())
            .map(|z| (quant(z.re), quant(z.im)))
            .collect();
        (sizes[j], chars)
    };
    let mut order: Vec<usize> = (1..sizes.len()).collect();
    order.sort_by_key(|&j| key(j));
    order.insert(0, 0);
    let offs = offsets(&sizes);
    let mut cols = Vec::with_capacity(t.ncols());
    for &j in &order {
        for c in offs[j]..offs[j] + sizes[j] {
            cols.push(t.column(c).into_owned());
        }
    }
    BlockDecomposition {
        group: group.clone(),
        t: DMatrix::from_columns(&cols),
        block_sizes: order.iter().map(|&j| sizes[j]).collect(),
        blocks: blocks
            .iter()
            .map(|b| order.iter().map(|&j| b[j].clone()).collect())
            .collect(),
        residual,
        attempts,
    }
}

/// Which coboundary the block Laplacians are built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Voltages on `B_i(M)`, blocks of `L_i^up`.
    Up,
    /// Voltages on `B_{i-1}(M)`, blocks of `L_i^down`.
    Down,
}

impl Direction {
    pub fn kind(self) -> LaplacianKind {
        match self {
            Direction::Up => LaplacianKind::Up,
            Direction::Down => LaplacianKind::Down,
        }
    }
}

/// `Σ_g D^g ⊗ ϱ_j(g)` and `Σ_g (D^g)^T ⊗ ϱ_j(g^{-1})`.
fn twisted_pair(
    parts: &BTreeMap<Permutation, DMatrix<i64>>,
    dec: &BlockDecomposition,
    j: usize,
    shape: (usize, usize),
) -> (DMatrix<C64>, DMatrix<C64>) {
    let s = dec.block_sizes[j];
    let mut fwd = DMatrix::from_element(shape.0 * s, shape.1 * s, C64::new(0.0, 0.0));
    let mut back = DMatrix::from_element(shape.1 * s, shape.0 * s, C64::new(0.0, 0.0));
    for (g, dg) in parts {
        let dgc = dg.map(|x| C64::new(x as f64, 0.0));
        fwd += dgc.kronecker(dec.rho(j, g));
        back += dgc.transpose().kronecker(dec.rho(j, &g.inverse()));
    }
    (fwd, back)
}

fn expand_weights(w: &[f64], s: usize) -> DVector<f64> {
    DVector::from_iterator(
        w.len() * s,
        w.iter().flat_map(|&x| std::iter::repeat_n(x, s)),
    )
}

fn diag_c(w: &DVector<f64>) -> DMatrix<C64> {
    DMatrix::from_diagonal(&w.map(|x| C64::new(x, 0.0)))
}

/// The blocks of the lifted Laplacian at dimension `i`.
///
/// `psi` lives on `B_i(M)` for [`Direction::Up`] and on `B_{i-1}(M)` for
/// [`Direction::Down`]; `dec` must decompose the group it generates. Block
/// `j` carries weights `W_i ⊗ 1`, so [`crate::operators::spectrum`] applies.
pub fn block_laplacians(
    m: &SimplicialComplex,
    psi: &IncidenceVoltage,
    i: isize,
    scheme: &WeightScheme,
    direction: Direction,
    dec: &BlockDecomposition,
) -> Result<Vec<OperatorMatrix>> {
    let expected = match direction {
        Direction::Up => i,
        Direction::Down => i - 1,
    };
    if psi.dim() != expected {
        return Err(Error::DimensionOutOfRange {
            dim: psi.dim(),
            reason: format!("{direction:?} blocks at dimension {i} need voltages on B_{expected}"),
        });
    }
    if dec.group.k != psi.k {
        return Err(Error::WrongFold {
            expected: psi.k,
            got: dec.group.k,
        });
    }
    if let Some(g) = psi.perms.iter().find(|g| dec.group.index_of(g).is_none()) {
        return Err(Error::MalformedInput(format!(
            "voltage {g} is outside the decomposed group"
        )));
    }
    let weights = compute_weights(m, scheme)?;
    let parts = split_coboundary(m, psi)?;
    let lo = psi.dim();
    let shape = (m.count(lo + 1), m.count(lo));
    let mut out = Vec::with_capacity(dec.num_blocks());
    for j in 0..dec.num_blocks() {
        let s = dec.block_sizes[j];
        let (fwd, back) = twisted_pair(&parts, dec, j, shape);
        let w_lo = expand_weights(weights.of_dim(lo), s);
        let w_hi = expand_weights(weights.of_dim(lo + 1), s);
        let entries = match direction {
            Direction::Up => diag_c(&w_lo.map(|x| 1.0 / x)) * back * diag_c(&w_hi) * fwd,
            Direction::Down => fwd * diag_c(&w_lo.map(|x| 1.0 / x)) * back * diag_c(&w_hi),
        };
        out.push(OperatorMatrix {
            dim: i,
            kind: direction.kind(),
            entries,
            weights: expand_weights(weights.of_dim(i), s),
        });
    }
    Ok(out)
}

/// `s(F, F̄) = sgn ψ(F, F̄)` for a 2-fold voltage.
///
/// A trivial voltage group (disconnected lift) yields the all-`+1` signing.
pub fn two_fold_signing(psi: &IncidenceVoltage) -> Result<IncidenceSigning> {
    if psi.k != 2 {
        return Err(Error::WrongFold {
            expected: 2,
            got: psi.k,
        });
    }
    let signs = psi
        .graph
        .edges
        .iter()
        .zip(&psi.perms)
        .map(|(&(l, r), p)| {
            (
                (psi.graph.left[l].clone(), psi.graph.right[r].clone()),
                p.sign(),
            )
        })
        .collect();
    Ok(IncidenceSigning { signs })
}

/// `ω_j(F, F̄) = ϱ_{j+1}(ψ(F, F̄))` for the `k - 1` non-trivial characters,
/// in the block order of `dec`.
pub fn abelian_weightings(
    group: &VoltageGroup,
    psi: &IncidenceVoltage,
    dec: &BlockDecomposition,
) -> Result<Vec<IncidenceWeighting>> {
    if !group.abelian {
        return Err(Error::NonAbelian);
    }
    if !group.transitive {
        return Err(Error::NotTransitive);
    }
    if dec.block_sizes.iter().any(|&s| s != 1) || dec.group.elements != group.elements {
        return Err(Error::NonAbelian);
    }
    let mut out = Vec::with_capacity(dec.num_blocks() - 1);
    for j in 1..dec.num_blocks() {
        let omega = psi
            .graph
            .edges
            .iter()
            .zip(&psi.perms)
            .map(|(&(l, r), p)| {
                (
                    (psi.graph.left[l].clone(), psi.graph.right[r].clone()),
                    dec.rho(j, p)[(0, 0)],
                )
            })
            .collect();
        out.push(IncidenceWeighting { omega });
    }
    Ok(out)
}
