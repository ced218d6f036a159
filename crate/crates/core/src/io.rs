//! JSON file formats for complexes, decorations, voltages and maps.
//!
//! Vertices are the caller's integer ids; permutations are one-based image
//! lists; faces are written in increasing vertex order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{Face, SimplicialComplex, WeightScheme};
use crate::covering::{one_skeleton, IncidenceVoltage, VoltageAssignment};
use crate::error::{Error, Result};
use crate::operators::{all_incidences, IncidenceSigning, IncidenceWeighting, C64};
use crate::perm::Permutation;

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub face: Face,
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase")]
pub enum WeightsSpec {
    Combinatorial,
    Normalized,
    Explicit { values: Vec<WeightEntry> },
}

impl From<&WeightScheme> for WeightsSpec {
    fn from(s: &WeightScheme) -> Self {
        match s {
            WeightScheme::Combinatorial => WeightsSpec::Combinatorial,
            WeightScheme::Normalized => WeightsSpec::Normalized,
            WeightScheme::Explicit(map) => WeightsSpec::Explicit {
                values: map
                    .iter()
                    .map(|(f, &w)| WeightEntry { face: f.clone(), w })
                    .collect(),
            },
        }
    }
}

impl From<WeightsSpec> for WeightScheme {
    fn from(s: WeightsSpec) -> Self {
        match s {
            WeightsSpec::Combinatorial => WeightScheme::Combinatorial,
            WeightsSpec::Normalized => WeightScheme::Normalized,
            WeightsSpec::Explicit { values } => {
                WeightScheme::Explicit(values.into_iter().map(|e| (e.face, e.w)).collect())
            }
        }
    }
}

/// `{"facets": [[0,1,2],[2,3]], "include_empty": true, "weights": {"scheme": "normalized"}}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub facets: Vec<Vec<usize>>,
    #[serde(default = "default_true")]
    pub include_empty: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsSpec>,
}

impl ComplexFile {
    pub fn from_complex(k: &SimplicialComplex, scheme: Option<&WeightScheme>) -> Self {
        let mut facets: Vec<Vec<usize>> = k
            .facets()
            .into_iter()
            .map(|f| f.vertices().to_vec())
            .collect();
        facets.sort();
        ComplexFile {
            facets,
            include_empty: k.include_empty(),
            weights: scheme.map(WeightsSpec::from),
        }
    }

    /// The complex and its weight scheme (combinatorial when absent).
    pub fn to_parts(&self) -> Result<(SimplicialComplex, WeightScheme)> {
        let k = SimplicialComplex::build(&self.facets, self.include_empty)?;
        let scheme = self
            .weights
            .clone()
            .map(WeightScheme::from)
            .unwrap_or(WeightScheme::Combinatorial);
        Ok((k, scheme))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncidenceRef {
    pub face: Face,
    pub cofacet: Face,
}

fn check_dim_pair(dim_pair: [isize; 2]) -> Result<isize> {
    if dim_pair[1] != dim_pair[0] + 1 {
        return Err(Error::MalformedInput(format!(
            "dim_pair {dim_pair:?} must be [i, i+1]"
        )));
    }
    Ok(dim_pair[0])
}

/// `{"dim_pair":[1,2],"flips":[{"face":[1,2],"cofacet":[1,2,6]}]}`; listed
/// incidences get `-1`, all others `+1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigningFile {
    pub dim_pair: [isize; 2],
    pub flips: Vec<IncidenceRef>,
}

impl SigningFile {
    pub fn to_signing(&self, k: &SimplicialComplex) -> Result<(isize, IncidenceSigning)> {
        let i = check_dim_pair(self.dim_pair)?;
        let flips: Vec<(Face, Face)> = self
            .flips
            .iter()
            .map(|r| (r.face.clone(), r.cofacet.clone()))
            .collect();
        Ok((i, IncidenceSigning::from_flips(k, i, &flips)?))
    }

    pub fn from_signing(i: isize, s: &IncidenceSigning) -> Self {
        SigningFile {
            dim_pair: [i, i + 1],
            flips: s
                .signs
                .iter()
                .filter(|(_, &v)| v < 0)
                .map(|((f, c), _)| IncidenceRef {
                    face: f.clone(),
                    cofacet: c.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedIncidence {
    pub face: Face,
    pub cofacet: Face,
    pub value: ComplexValue,
}

/// Listed incidences get `value`, all others `1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightingFile {
    pub dim_pair: [isize; 2],
    pub values: Vec<WeightedIncidence>,
}

impl WeightingFile {
    pub fn to_weighting(&self, k: &SimplicialComplex) -> Result<(isize, IncidenceWeighting)> {
        let i = check_dim_pair(self.dim_pair)?;
        let mut omega: BTreeMap<(Face, Face), C64> = all_incidences(k, i)
            .into_iter()
            .map(|p| (p, C64::new(1.0, 0.0)))
            .collect();
        for e in &self.values {
            let key = (e.face.clone(), e.cofacet.clone());
            let slot = omega.get_mut(&key).ok_or_else(|| Error::MissingIncidence {
                face: e.face.clone(),
                cofacet: e.cofacet.clone(),
            })?;
            let z = C64::new(e.value.re, e.value.im);
            if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::MalformedInput(format!(
                    "weight on ({}, {}) must be nonzero and finite",
                    e.face, e.cofacet
                )));
            }
            *slot = z;
        }
        Ok((i, IncidenceWeighting { omega }))
    }

    pub fn from_weighting(i: isize, w: &IncidenceWeighting) -> Self {
        WeightingFile {
            dim_pair: [i, i + 1],
            values: w
                .omega
                .iter()
                .filter(|(_, z)| **z != C64::new(1.0, 0.0))
                .map(|((f, c), z)| WeightedIncidence {
                    face: f.clone(),
                    cofacet: c.clone(),
                    value: ComplexValue { re: z.re, im: z.im },
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeVoltage {
    /// `[u, v]` by vertex id; `perm` is `ψ(u→v)`.
    pub edge: [usize; 2],
    pub perm: Vec<usize>,
}

/// `{"k":2,"edges":[{"edge":[1,2],"perm":[2,1]}]}`; absent edges carry the
/// identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoltageFile {
    pub k: usize,
    pub edges: Vec<EdgeVoltage>,
}

impl VoltageFile {
    /// Voltages on the 1-skeleton of `m`, keyed by vertex positions.
    pub fn to_assignment(&self, m: &SimplicialComplex) -> Result<VoltageAssignment> {
        if self.k == 0 {
            return Err(Error::MalformedInput("k must be positive".into()));
        }
        let mut psi = VoltageAssignment::identity_on(&one_skeleton(m), self.k);
        let pos = |v: usize| {
            m.index_of(&Face::new(vec![v])?)
                .ok_or_else(|| Error::MalformedInput(format!("vertex {v} is not in the base")))
        };
        for e in &self.edges {
            let [u, v] = e.edge;
            let face = Face::new(vec![u, v])?;
            if !m.contains(&face) {
                return Err(Error::MalformedInput(format!(
                    "{face} is not an edge of the base"
                )));
            }
            psi.set(pos(u)?, pos(v)?, Permutation::from_one_based(&e.perm)?)?;
        }
        Ok(psi)
    }

    pub fn from_assignment(m: &SimplicialComplex, psi: &VoltageAssignment) -> Self {
        let verts = m.vertices();
        VoltageFile {
            k: psi.k,
            edges: psi
                .iter()
                .filter(|(_, p)| !p.is_identity())
                .map(|(&(u, v), p)| EdgeVoltage {
                    edge: [verts[u], verts[v]],
                    perm: p.to_one_based(),
                })
                .collect(),
        }
    }
}

/// `{"vertex_map":[[k_vertex, m_vertex], ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringMapFile {
    pub vertex_map: Vec<[usize; 2]>,
}

impl CoveringMapFile {
    pub fn to_map(&self) -> Result<BTreeMap<usize, usize>> {
        let mut map = BTreeMap::new();
        for &[a, b] in &self.vertex_map {
            if map.insert(a, b).is_some() {
                return Err(Error::MalformedInput(format!("vertex {a} mapped twice")));
            }
        }
        Ok(map)
    }

    pub fn from_map(map: &BTreeMap<usize, usize>) -> Self {
        CoveringMapFile {
            vertex_map: map.iter().map(|(&a, &b)| [a, b]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncidenceVoltageEntry {
    pub face: Face,
    pub cofacet: Face,
    pub perm: Vec<usize>,
}

/// Voltages on `B_i(M)` as `ψ(F̄, F)` records; absent incidences carry the
/// identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncidenceVoltageFile {
    pub k: usize,
    pub dim: isize,
    pub incidences: Vec<IncidenceVoltageEntry>,
}

impl IncidenceVoltageFile {
    pub fn to_voltage(&self, m: &SimplicialComplex) -> Result<IncidenceVoltage> {
        let mut psi = IncidenceVoltage::identity(m, self.dim, self.k)?;
        for e in &self.incidences {
            psi.set(&e.face, &e.cofacet, Permutation::from_one_based(&e.perm)?)?;
        }
        Ok(psi)
    }

    pub fn from_voltage(psi: &IncidenceVoltage) -> Self {
        IncidenceVoltageFile {
            k: psi.k,
            dim: psi.dim(),
            incidences: psi
                .nontrivial()
                .into_iter()
                .map(|(face, cofacet, p)| IncidenceVoltageEntry {
                    face,
                    cofacet,
                    perm: p.to_one_based(),
                })
                .collect(),
        }
    }
}

/// Parses any of the formats above from a JSON string.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::derived_complex;

    #[test]
    fn complex_round_trip() {
        let text = r#"{"facets": [[0,1,2],[2,3]], "include_empty": true, "weights": {"scheme": "normalized"}}"#;
        let file: ComplexFile = parse(text).unwrap();
        let (k, scheme) = file.to_parts().unwrap();
        assert_eq!(scheme, WeightScheme::Normalized);
        assert_eq!(k.count(1), 4);
        let back = ComplexFile::from_complex(&k, Some(&scheme));
        assert_eq!(back, file);
    }

    #[test]
    fn explicit_weights_parse() {
        let text = r#"{"facets": [[0,1]], "weights": {"scheme":"explicit","values":[{"face":[0,1],"w":2.5}]}}"#;
        let (_, scheme) = parse::<ComplexFile>(text).unwrap().to_parts().unwrap();
        match scheme {
            WeightScheme::Explicit(m) => assert_eq!(m[&Face::new(vec![0, 1]).unwrap()], 2.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn signing_and_weighting_files() {
        let k = SimplicialComplex::build(&[vec![1, 2, 6]], true).unwrap();
        let s: SigningFile =
            parse(r#"{"dim_pair":[1,2],"flips":[{"face":[1,2],"cofacet":[1,2,6]}]}"#).unwrap();
        let (i, signing) = s.to_signing(&k).unwrap();
        assert_eq!(i, 1);
        assert_eq!(signing.signs.values().filter(|&&v| v == -1).count(), 1);
        assert_eq!(SigningFile::from_signing(1, &signing), s);

        let w: WeightingFile =
            parse(r#"{"dim_pair":[1,2],"values":[{"face":[1,6],"cofacet":[1,2,6],"value":{"re":0.0,"im":1.0}}]}"#).unwrap();
        let (_, weighting) = w.to_weighting(&k).unwrap();
        assert_eq!(weighting.omega.len(), 3);
        assert_eq!(WeightingFile::from_weighting(1, &weighting), w);

        let bad: SigningFile = parse(r#"{"dim_pair":[1,3],"flips":[]}"#).unwrap();
        assert!(bad.to_signing(&k).is_err());
    }

    #[test]
    fn voltage_file_builds_hexagon() {
        let m = SimplicialComplex::build(&[vec![1, 2], vec![2, 3], vec![1, 3]], true).unwrap();
        let v: VoltageFile = parse(r#"{"k":2,"edges":[{"edge":[1,2],"perm":[2,1]}]}"#).unwrap();
        let psi = v.to_assignment(&m).unwrap();
        let lift = derived_complex(&m, &psi).unwrap();
        assert!(lift.is_connected());
        assert_eq!(VoltageFile::from_assignment(&m, &psi), v);
        let missing: VoltageFile =
            parse(r#"{"k":2,"edges":[{"edge":[1,4],"perm":[2,1]}]}"#).unwrap();
        assert!(missing.to_assignment(&m).is_err());
    }

    #[test]
    fn map_file_rejects_duplicates() {
        let f: CoveringMapFile = parse(r#"{"vertex_map":[[0,1],[0,2]]}"#).unwrap();
        assert!(f.to_map().is_err());
        assert!(parse::<CoveringMapFile>("{").is_err());
    }
}
