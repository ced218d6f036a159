//! Sorted real eigenvalue multisets and tolerance-aware multiset algebra.

use serde::Serialize;

/// Default relative tolerance for eigenvalue comparisons.
pub const DEFAULT_TOL: f64 = 1e-8;

/// A sorted multiset of real eigenvalues.
///
/// Two values `a`, `b` match when `|a - b| <= tol * max(1, |a|, |b|)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumMultiset {
    pub values: Vec<f64>,
    pub tol: f64,
    /// Number of tiny negative eigenvalues clamped to zero.
    pub clamped: usize,
}

/// What to check in [`compare_spectra`].
#[derive(Clone, Copy, Debug)]
pub enum Comparison<'a> {
    Equal,
    SubsetOf,
    /// `A` equals the multiset union of `B` and the given spectrum.
    UnionEquals(&'a SpectrumMultiset),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub holds: bool,
    pub max_pairing_error: f64,
    /// First value left unmatched, on failure.
    pub witness: Option<f64>,
}

impl SpectrumMultiset {
    pub fn new(mut values: Vec<f64>, tol: f64) -> Self {
        values.sort_by(|a, b| a.total_cmp(b));
        SpectrumMultiset {
            values,
            tol,
            clamped: 0,
        }
    }

    /// Clamps values in `[-tol, 0)` to zero and records how many.
    pub(crate) fn clamp_tiny_negatives(mut self) -> Self {
        for v in self.values.iter_mut() {
            if *v < 0.0 && *v >= -self.tol {
                *v = 0.0;
                self.clamped += 1;
            }
        }
        self.values.sort_by(|a, b| a.total_cmp(b));
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    /// Merge-sorted union of several multisets, keeping the loosest tolerance.
    pub fn union<'a>(parts: impl IntoIterator<Item = &'a SpectrumMultiset>) -> Self {
        let mut values = Vec::new();
        let mut tol: f64 = 0.0;
        let mut clamped = 0;
        for p in parts {
            values.extend_from_slice(&p.values);
            tol = tol.max(p.tol);
            clamped += p.clamped;
        }
        let mut out = SpectrumMultiset::new(values, if tol > 0.0 { tol } else { DEFAULT_TOL });
        out.clamped = clamped;
        out
    }

    /// Values whose magnitude exceeds the tolerance.
    pub fn nonzero(&self) -> SpectrumMultiset {
        let values = self
            .values
            .iter()
            .copied()
            .filter(|v| v.abs() > self.tol)
            .collect();
        SpectrumMultiset::new(values, self.tol)
    }

    pub fn count_near(&self, x: f64) -> usize {
        self.values
            .iter()
            .filter(|&&v| close(v, x, self.tol))
            .count()
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// Compares `a` against `b` under `mode`. Failure is reported, never raised.
pub fn compare_spectra(
    a: &SpectrumMultiset,
    b: &SpectrumMultiset,
    mode: Comparison<'_>,
) -> ComparisonReport {
    let tol = a.tol.max(b.tol);
    match mode {
        Comparison::Equal => equal(&a.values, &b.values, tol),
        Comparison::SubsetOf => subset(&a.values, &b.values, tol),
        Comparison::UnionEquals(c) => {
            let merged = SpectrumMultiset::union([b, c]);
            equal(&a.values, &merged.values, tol.max(c.tol))
        }
    }
}

fn equal(a: &[f64], b: &[f64], tol: f64) -> ComparisonReport {
    let mut max_err: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        let err = (x - y).abs();
        max_err = max_err.max(err);
        if !close(*x, *y, tol) {
            return ComparisonReport {
                holds: false,
                max_pairing_error: max_err,
                witness: Some(*x),
            };
        }
    }
    if a.len() != b.len() {
        let witness = if a.len() > b.len() {
            a[b.len()]
        } else {
            b[a.len()]
        };
        return ComparisonReport {
            holds: false,
            max_pairing_error: max_err,
            witness: Some(witness),
        };
    }
    ComparisonReport {
        holds: true,
        max_pairing_error: max_err,
        witness: None,
    }
}

/// Greedy sorted matching of every element of `a` into `b`.
fn subset(a: &[f64], b: &[f64], tol: f64) -> ComparisonReport {
    let mut max_err: f64 = 0.0;
    let mut j = 0;
    for &x in a {
        loop {
            if j >= b.len() {
                return ComparisonReport {
                    holds: false,
                    max_pairing_error: max_err,
                    witness: Some(x),
                };
            }
            let y = b[j];
            if close(x, y, tol) {
                max_err = max_err.max((x - y).abs());
                j += 1;
                break;
            }
            if y < x {
                j += 1;
            } else {
                return ComparisonReport {
                    holds: false,
                    max_pairing_error: max_err,
                    witness: Some(x),
                };
            }
        }
    }
    ComparisonReport {
        holds: true,
        max_pairing_error: max_err,
        witness: None,
    }
}
