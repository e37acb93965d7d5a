//! Canonical JSON forms for tensors, decompositions, and local maps.
//!
//! Tensor files: `{"shape":[...],"scalar":"cyc"|"eps","entries":
//! [{"idx":[j1,...,jn],"val":"<scalar literal>"}]}` with entries sorted
//! lexicographically by idx. Decompositions: `{"shape":[...],"terms":
//! [{"scale":"...","vectors":[["...",...],...]}]}`.

use serde::{Deserialize, Serialize};

use crate::decomp::{Decomposition, Term};
use crate::scalar::{parse_scalar, Cyclotomic, EpsLaurent, Ring};
use crate::tensor::{LocalMap, Matrix, Shape, Tensor};
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
pub struct TensorJson {
    pub shape: Vec<usize>,
    pub scalar: String,
    pub entries: Vec<TensorEntryJson>,
}

#[derive(Serialize, Deserialize)]
pub struct TensorEntryJson {
    pub idx: Vec<usize>,
    pub val: String,
}

/// A tensor of either scalar kind, as found in files.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyTensor {
    Cyc(Tensor<Cyclotomic>),
    Eps(Tensor<EpsLaurent>),
}

impl AnyTensor {
    pub fn scalar_kind(&self) -> &'static str {
        match self {
            AnyTensor::Cyc(_) => "cyc",
            AnyTensor::Eps(_) => "eps",
        }
    }

    pub fn shape(&self) -> &Shape {
        match self {
            AnyTensor::Cyc(t) => t.shape(),
            AnyTensor::Eps(t) => t.shape(),
        }
    }

    pub fn as_cyc(&self) -> Result<&Tensor<Cyclotomic>> {
        match self {
            AnyTensor::Cyc(t) => Ok(t),
            AnyTensor::Eps(_) => Err(Error::ScalarKindMismatch(
                "expected a cyclotomic tensor, found an epsilon tensor".into(),
            )),
        }
    }
}

fn tensor_json<S: Ring>(t: &Tensor<S>, kind: &str) -> TensorJson {
    TensorJson {
        shape: t.shape().dims().to_vec(),
        scalar: kind.to_string(),
        entries: t
            .entries()
            .map(|(idx, v)| TensorEntryJson { idx: idx.clone(), val: v.literal() })
            .collect(),
    }
}

pub fn tensor_to_json(t: &AnyTensor) -> TensorJson {
    match t {
        AnyTensor::Cyc(t) => tensor_json(t, "cyc"),
        AnyTensor::Eps(t) => tensor_json(t, "eps"),
    }
}

pub fn tensor_to_string(t: &AnyTensor) -> String {
    serde_json::to_string_pretty(&tensor_to_json(t)).expect("tensor serialization")
}

pub fn cyc_tensor_to_string(t: &Tensor<Cyclotomic>) -> String {
    tensor_to_string(&AnyTensor::Cyc(t.clone()))
}

pub fn tensor_from_json(j: &TensorJson) -> Result<AnyTensor> {
    let shape = Shape::new(j.shape.clone())?;
    match j.scalar.as_str() {
        "cyc" => {
            let mut entries = Vec::with_capacity(j.entries.len());
            for e in &j.entries {
                let v = parse_scalar(&e.val)?.as_cyclotomic().ok_or_else(|| {
                    Error::ScalarKindMismatch(format!("epsilon literal {:?} in a cyc tensor", e.val))
                })?;
                entries.push((e.idx.clone(), v));
            }
            Ok(AnyTensor::Cyc(Tensor::build(shape, entries)?))
        }
        "eps" => {
            let mut entries = Vec::with_capacity(j.entries.len());
            for e in &j.entries {
                entries.push((e.idx.clone(), parse_scalar(&e.val)?));
            }
            Ok(AnyTensor::Eps(Tensor::build(shape, entries)?))
        }
        other => Err(Error::Json(format!("unknown scalar kind {other:?}"))),
    }
}

pub fn tensor_from_str(s: &str) -> Result<AnyTensor> {
    let j: TensorJson = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    tensor_from_json(&j)
}

#[derive(Serialize, Deserialize)]
pub struct DecompositionJson {
    pub shape: Vec<usize>,
    pub terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
pub struct TermJson {
    pub scale: String,
    pub vectors: Vec<Vec<String>>,
}

pub fn decomposition_to_json<S: Ring>(dec: &Decomposition<S>) -> DecompositionJson {
    DecompositionJson {
        shape: dec.shape().dims().to_vec(),
        terms: dec
            .terms()
            .iter()
            .map(|t| TermJson {
                scale: t.scale.literal(),
                vectors: t
                    .vectors
                    .iter()
                    .map(|v| v.iter().map(|c| c.literal()).collect())
                    .collect(),
            })
            .collect(),
    }
}

pub fn decomposition_to_string<S: Ring>(dec: &Decomposition<S>) -> String {
    serde_json::to_string_pretty(&decomposition_to_json(dec)).expect("decomposition serialization")
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnyDecomposition {
    Cyc(Decomposition<Cyclotomic>),
    Eps(Decomposition<EpsLaurent>),
}

pub fn decomposition_from_str(s: &str) -> Result<AnyDecomposition> {
    let j: DecompositionJson = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    let shape = Shape::new(j.shape.clone())?;
    let mut eps_terms = Vec::with_capacity(j.terms.len());
    let mut all_cyc = true;
    for t in &j.terms {
        let scale = parse_scalar(&t.scale)?;
        let mut vectors = Vec::with_capacity(t.vectors.len());
        for v in &t.vectors {
            let mut vec = Vec::with_capacity(v.len());
            for lit in v {
                let val = parse_scalar(lit)?;
                all_cyc &= val.as_cyclotomic().is_some();
                vec.push(val);
            }
            vectors.push(vec);
        }
        all_cyc &= scale.as_cyclotomic().is_some();
        eps_terms.push(Term { scale, vectors });
    }
    let eps = Decomposition::new(shape, eps_terms)?;
    if all_cyc {
        let cyc = eps.map_scalars(|v| v.as_cyclotomic().expect("checked epsilon-free"))?;
        Ok(AnyDecomposition::Cyc(cyc))
    } else {
        Ok(AnyDecomposition::Eps(eps))
    }
}

#[derive(Serialize, Deserialize)]
pub struct LocalMapJson {
    pub matrices: Vec<MatrixJson>,
}

#[derive(Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

pub fn local_map_to_json<S: Ring>(map: &LocalMap<S>) -> LocalMapJson {
    LocalMapJson {
        matrices: map
            .matrices()
            .iter()
            .map(|m| MatrixJson {
                rows: m.rows(),
                cols: m.cols(),
                entries: (0..m.rows())
                    .map(|r| (0..m.cols()).map(|c| m.at(r, c).literal()).collect())
                    .collect(),
            })
            .collect(),
    }
}

/// Local maps are read with epsilon scalars (the most general kind).
pub fn local_map_from_str(s: &str) -> Result<LocalMap<EpsLaurent>> {
    let j: LocalMapJson = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    let mut mats = Vec::with_capacity(j.matrices.len());
    for mj in &j.matrices {
        let mut data = Vec::with_capacity(mj.rows * mj.cols);
        if mj.entries.len() != mj.rows {
            return Err(Error::Json("matrix row count mismatch".into()));
        }
        for row in &mj.entries {
            if row.len() != mj.cols {
                return Err(Error::Json("matrix column count mismatch".into()));
            }
            for lit in row {
                data.push(parse_scalar(lit)?);
            }
        }
        mats.push(Matrix::new(mj.rows, mj.cols, data)?);
    }
    if mats.is_empty() {
        return Err(Error::Json("local map needs at least one matrix".into()));
    }
    Ok(LocalMap::new(mats))
}

// ---------------------------------------------------------------------
// certificate serialization (one-way: certificates are outputs)
// ---------------------------------------------------------------------

use crate::degen::{BorderRankCertificate, DegenerationCertificate};
use crate::persistence::{PersistenceCertificate, RankCertificate, WitnessLevel};
use serde_json::{json, Value};

pub fn persistence_certificate_json(cert: &PersistenceCertificate) -> Value {
    let chain: Vec<Value> = cert
        .witness_chain
        .iter()
        .map(|level| match level {
            WitnessLevel::Fixed(v) => {
                json!(v.iter().map(|c| c.literal()).collect::<Vec<_>>())
            }
            WitnessLevel::Discover => json!("discover"),
        })
        .collect();
    json!({
        "format": 1,
        "kind": "persistence",
        "method": cert.method.name(),
        "subject": cert.subject,
        "witness_chain": chain,
        "conclusive": cert.conclusive,
        "screened_samples": cert.screened_samples,
        "diagnostics": cert.diagnostics,
    })
}

pub fn rank_certificate_json(cert: &RankCertificate) -> Value {
    json!({
        "format": 1,
        "kind": "rank",
        "subject": cert.subject,
        "lower": cert.lower,
        "lower_method": cert.lower_method,
        "upper": cert.upper.as_ref().map(|u| json!({
            "terms": u.terms,
            "decomposition": decomposition_to_json(&u.decomposition),
        })),
        "exact": cert.exact(),
        "persistence": cert.persistence.as_ref().map(persistence_certificate_json),
        "trace": cert.trace,
    })
}

pub fn degeneration_certificate_json(cert: &DegenerationCertificate) -> Value {
    json!({
        "format": 1,
        "kind": "degeneration",
        "source": cert.source,
        "target": cert.target,
        "approximation_degree": cert.approximation_degree,
        "error_degree": cert.error_degree,
        "normalization_shift": cert.normalization_shift,
        "scalar": cert.scalar.literal(),
        "verified": cert.verified,
    })
}

pub fn border_certificate_json(cert: &BorderRankCertificate) -> Value {
    json!({
        "format": 1,
        "kind": "border_rank",
        "subject": cert.subject,
        "lower": cert.lower,
        "upper": cert.upper,
        "exact": cert.exact(),
        "terms": decomposition_to_json(&cert.terms),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_state, FamilySpec};

    #[test]
    fn tensor_round_trip() {
        let t = make_state(&FamilySpec::l(3, 4)).unwrap();
        let s = cyc_tensor_to_string(&t);
        let back = tensor_from_str(&s).unwrap();
        assert_eq!(back, AnyTensor::Cyc(t));
    }

    #[test]
    fn entries_are_sorted_and_stable() {
        let t = make_state(&FamilySpec::w(3)).unwrap();
        let s1 = cyc_tensor_to_string(&t);
        let s2 = cyc_tensor_to_string(&t);
        assert_eq!(s1, s2);
        let j = tensor_to_json(&AnyTensor::Cyc(t));
        let idxs: Vec<_> = j.entries.iter().map(|e| e.idx.clone()).collect();
        let mut sorted = idxs.clone();
        sorted.sort();
        assert_eq!(idxs, sorted);
    }

    #[test]
    fn eps_tensor_round_trip() {
        let t = make_state(&FamilySpec::w(3)).unwrap().to_eps();
        let shifted = t.map_scalars(|v| v.scale_by_power(-2));
        let s = tensor_to_string(&AnyTensor::Eps(shifted.clone()));
        let back = tensor_from_str(&s).unwrap();
        assert_eq!(back, AnyTensor::Eps(shifted));
    }

    #[test]
    fn decomposition_round_trip() {
        let dec = crate::decomp::decompose_l(3, 3).unwrap();
        let s = decomposition_to_string(&dec);
        match decomposition_from_str(&s).unwrap() {
            AnyDecomposition::Cyc(back) => assert_eq!(back, dec),
            AnyDecomposition::Eps(_) => panic!("expected cyclotomic decomposition"),
        }
    }
}
