//! Persistence certification and the tensor-rank lower-bound engines
//! built on it.
//!
//! A tensor is persistent when it is 1-concise and stays so under
//! contraction by every covector off some proper subspace, recursively
//! down to the bipartite base case. Persistence gives the lower bound
//! rank >= sum_{k<n} (d_k - 1) + 1, realized by repeatedly substituting
//! away one factor and contracting with a witness chart.
//!
//! Three regimes are implemented, and only the first two ever emit
//! certificates:
//! - an exact sufficient condition for tensors supported below the
//!   hyperplane sum(j) = d with nonzero staircase coefficients
//!   ("pyramid" support);
//! - an exact decision for multiqubit tensors of arity <= 4, via
//!   symbolic polynomial identities;
//! - randomized screening, whose positive answers are explicitly
//!   non-conclusive.

mod qubits;
mod screen;

pub use qubits::{decide_persistence_qubits, tangle3, QubitDecision};
pub use screen::{screen_persistence, ScreenOutcome};

use crate::decomp::{verify_decomposition, Decomposition, Term};
use crate::digest::digest_tensor;
use crate::families::ghz_tensor;
use crate::scalar::Cyclotomic;
use crate::tensor::{solve_linear, CoVector, Matrix, Shape, Tensor};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertMethod {
    Pyramid,
    ExactQubit,
    Screened,
}

impl CertMethod {
    pub fn name(&self) -> &'static str {
        match self {
            CertMethod::Pyramid => "pyramid",
            CertMethod::ExactQubit => "exact_qubit",
            CertMethod::Screened => "screened",
        }
    }
}

/// One recursion level of a persistence certificate: either a concrete
/// witness vector, or a marker that the witness for the contraction at
/// that level is recovered on demand (used by the exact four-qubit
/// decision, where the level-two witness depends on the chart).
#[derive(Clone, Debug, PartialEq)]
pub enum WitnessLevel {
    Fixed(Vec<Cyclotomic>),
    Discover,
}

#[derive(Clone, Debug)]
pub struct PersistenceCertificate {
    pub method: CertMethod,
    /// One entry per recursion level; length = arity - 2 for full
    /// certificates.
    pub witness_chain: Vec<WitnessLevel>,
    pub subject: String,
    pub diagnostics: Vec<String>,
    /// Screened certificates are non-conclusive and never accepted by
    /// the bound engines.
    pub conclusive: bool,
    pub screened_samples: Option<usize>,
}

impl PersistenceCertificate {
    pub fn is_full(&self) -> bool {
        self.conclusive
    }
}

/// Upper-bound half of a rank certificate: a decomposition verified
/// against the subject.
#[derive(Clone, Debug)]
pub struct UpperWitness {
    pub terms: usize,
    pub decomposition: Decomposition<Cyclotomic>,
}

#[derive(Clone, Debug)]
pub struct RankCertificate {
    pub subject: String,
    pub lower: usize,
    pub lower_method: String,
    pub trace: Vec<String>,
    pub upper: Option<UpperWitness>,
    /// Present when the lower bound came from a persistence argument.
    pub persistence: Option<PersistenceCertificate>,
}

impl RankCertificate {
    /// Some(rank) when lower and upper agree.
    pub fn exact(&self) -> Option<usize> {
        match &self.upper {
            Some(u) if u.terms == self.lower => Some(self.lower),
            _ => None,
        }
    }

    pub fn attach_upper(mut self, t: &Tensor<Cyclotomic>, dec: Decomposition<Cyclotomic>) -> Result<Self> {
        if !verify_decomposition(t, &dec)? {
            return Err(Error::UnverifiedDecomposition);
        }
        if digest_tensor(t) != self.subject {
            return Err(Error::CertificateSubjectMismatch(
                "upper bound tensor differs from the certificate subject".into(),
            ));
        }
        self.upper = Some(UpperWitness { terms: dec.len(), decomposition: dec });
        Ok(self)
    }
}

/// Exact sufficient condition: equal local dimensions d, support inside
/// sum(j) < d, and a nonzero coefficient on every staircase position
/// |0...0, j at slot n-2-i, 0...0, d-1-j at the last slot|. On success
/// the witness chain is |0> at every level; the check never produces a
/// false certificate.
pub fn pyramid_persistence(t: &Tensor<Cyclotomic>) -> Result<PersistenceCertificate> {
    let n = t.arity();
    let dims = t.shape().dims();
    let d = dims[0];
    if n < 2 {
        return Err(Error::NotApplicable("arity must be at least 2".into()));
    }
    if dims.iter().any(|&x| x != d) {
        return Err(Error::NotApplicable(format!("local dimensions {dims:?} are not all equal")));
    }
    if let Some(bad) = t.support().find(|idx| idx.iter().sum::<usize>() >= d) {
        return Err(Error::NotApplicable(format!(
            "support entry {bad:?} has level sum {} >= d = {d}",
            bad.iter().sum::<usize>()
        )));
    }
    if t.is_zero() {
        return Err(Error::NotApplicable("zero tensor".into()));
    }
    let mut diagnostics = Vec::new();
    for i in 0..=n - 2 {
        for j in 0..d {
            let mut idx = vec![0usize; n];
            idx[n - 2 - i] = j;
            idx[n - 1] += d - 1 - j;
            if t.coeff(&idx).is_zero() {
                return Err(Error::NotApplicable(format!(
                    "staircase coefficient at {idx:?} vanishes"
                )));
            }
        }
        diagnostics.push(format!(
            "level {i}: all staircase coefficients (j at slot {}, {} - j at the last slot) nonzero",
            n - 2 - i,
            d - 1
        ));
    }
    diagnostics.push("witness |0> at every recursion level".into());
    let e0 = {
        let mut v = vec![Cyclotomic::zero(); d];
        v[0] = Cyclotomic::one();
        v
    };
    Ok(PersistenceCertificate {
        method: CertMethod::Pyramid,
        witness_chain: vec![WitnessLevel::Fixed(e0); n - 2],
        subject: digest_tensor(t),
        diagnostics,
        conclusive: true,
        screened_samples: None,
    })
}

/// Rank lower bound sum_{k<n} (r_k - 1) + 1 from a full persistence
/// certificate, with r_k the mode-k flattening ranks (the concise core
/// dimensions). The trace replays the substitution recursion.
pub fn persistent_lower_bound(
    t: &Tensor<Cyclotomic>,
    cert: &PersistenceCertificate,
) -> Result<RankCertificate> {
    if !cert.is_full() || cert.method == CertMethod::Screened {
        return Err(Error::WeakCertificate(
            "screened persistence evidence cannot back a rank bound".into(),
        ));
    }
    let subject = digest_tensor(t);
    if subject != cert.subject {
        return Err(Error::CertificateSubjectMismatch(
            "persistence certificate was issued for a different tensor".into(),
        ));
    }
    let profile = t.multilinear_profile();
    let n = t.arity();
    let mut lower = 1usize;
    let mut trace = Vec::new();
    trace.push(format!(
        "concise core dimensions {:?} (mode flattening ranks)",
        profile.ranks
    ));
    for k in 0..n - 1 {
        lower += profile.ranks[k] - 1;
        trace.push(format!(
            "level {k}: substitution on factor {k} zeroes at least {} terms; contraction by a witness chart stays persistent",
            profile.ranks[k] - 1
        ));
    }
    trace.push(format!("bipartite base case contributes 1; lower bound {lower}"));
    Ok(RankCertificate {
        subject,
        lower,
        lower_method: format!("persistence ({})", cert.method.name()),
        trace,
        upper: None,
        persistence: Some(cert.clone()),
    })
}

/// Lower bound from the maximum mode flattening rank; valid for every
/// tensor and tight for diagonal tensors.
pub fn flattening_rank_certificate(t: &Tensor<Cyclotomic>) -> Result<RankCertificate> {
    if t.is_zero() {
        return Err(Error::ZeroTensor);
    }
    let profile = t.multilinear_profile();
    let lower = profile.ranks.iter().copied().max().unwrap_or(0).max(1);
    Ok(RankCertificate {
        subject: digest_tensor(t),
        lower,
        lower_method: "max mode flattening rank".into(),
        trace: vec![format!("mode flattening ranks {:?}", profile.ranks)],
        upper: None,
        persistence: None,
    })
}

/// Split a tensor over per-factor splits (dim U_i, dim V_i) into its
/// head block (all indices in U) and step block (all indices in V),
/// after checking the block-pyramidal support condition: every entry is
/// either all-U or has its last index in V.
pub fn split_blocks(
    q: &Tensor<Cyclotomic>,
    split: &[(usize, usize)],
) -> Result<(Tensor<Cyclotomic>, Tensor<Cyclotomic>)> {
    let n = q.arity();
    if split.len() != n {
        return Err(Error::ArityMismatch(split.len(), n));
    }
    for (i, &(u, v)) in split.iter().enumerate() {
        if u + v != q.shape().dim(i) || u == 0 || v == 0 {
            return Err(Error::BadParams(format!(
                "split ({u}, {v}) does not partition dimension {} of factor {i}",
                q.shape().dim(i)
            )));
        }
    }
    let u_dims: Vec<usize> = split.iter().map(|&(u, _)| u).collect();
    let v_dims: Vec<usize> = split.iter().map(|&(_, v)| v).collect();
    let mut head = Tensor::zero(Shape::new(u_dims.clone())?);
    let mut step = Tensor::zero(Shape::new(v_dims)?);
    for (idx, val) in q.entries() {
        let all_u = idx.iter().zip(split).all(|(&j, &(u, _))| j < u);
        if all_u {
            head.add_entry(idx.clone(), val.clone())?;
            continue;
        }
        if idx[n - 1] < split[n - 1].0 {
            return Err(Error::NotBlockPyramidal(format!(
                "entry {idx:?} mixes the blocks without placing the last factor in the step space"
            )));
        }
        let all_v = idx.iter().zip(split).all(|(&j, &(u, _))| j >= u);
        if all_v {
            let local: Vec<usize> = idx.iter().zip(split).map(|(&j, &(u, _))| j - u).collect();
            step.add_entry(local, val.clone())?;
        }
        // entries mixing U and V (with the last factor in V) are allowed
        // by the support condition and are annihilated by the step
        // projection
    }
    Ok((head, step))
}

/// Lower bound for a block-pyramidal tensor: rank(head bound) +
/// sum_{k<n} (dim V_k - 1) + 1, requiring a full persistence
/// certificate for the step block and a rank certificate for the head
/// block.
pub fn composite_lower_bound(
    q: &Tensor<Cyclotomic>,
    split: &[(usize, usize)],
    head_cert: &RankCertificate,
    step_cert: &PersistenceCertificate,
) -> Result<RankCertificate> {
    if step_cert.method == CertMethod::Screened || !step_cert.is_full() {
        return Err(Error::WeakCertificate("the step block needs a full certificate".into()));
    }
    let (head, step) = split_blocks(q, split)?;
    if digest_tensor(&head) != head_cert.subject {
        return Err(Error::CertificateSubjectMismatch(
            "head certificate does not match the head block".into(),
        ));
    }
    if digest_tensor(&step) != step_cert.subject {
        return Err(Error::CertificateSubjectMismatch(
            "step certificate does not match the step block".into(),
        ));
    }
    let n = q.arity();
    let step_sum: usize = split[..n - 1].iter().map(|&(_, v)| v - 1).sum();
    let lower = head_cert.lower + step_sum + 1;
    let mut trace = vec![
        format!(
            "block-pyramidal support over splits {:?}; head lower bound {}",
            split, head_cert.lower
        ),
        format!(
            "step block is persistent; substitutions contribute {} + 1",
            step_sum
        ),
        format!("combined lower bound {lower}"),
    ];
    trace.extend(head_cert.trace.iter().map(|s| format!("head: {s}")));
    Ok(RankCertificate {
        subject: digest_tensor(q),
        lower,
        lower_method: "pyramidal block additivity".into(),
        trace,
        upper: None,
        persistence: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductMode {
    Kron,
    Tensor,
}

/// Exact rank d * rank(p) for the product of the diagonal tensor of
/// size d with a minimal-rank persistent tensor p. The lower bound
/// iterates the block additivity over the d-fold direct sum of p (which
/// the Kronecker product with the diagonal tensor equals, entry for
/// entry, under the index conventions fixed in this crate); the upper
/// bound replicates p's decomposition d times and is verified exactly.
pub fn ghz_kron_cert(
    p: &Tensor<Cyclotomic>,
    p_cert: &RankCertificate,
    d: usize,
    mode: ProductMode,
) -> Result<RankCertificate> {
    if d < 1 {
        return Err(Error::BadParams("d must be positive".into()));
    }
    let n = p.arity();
    if digest_tensor(p) != p_cert.subject {
        return Err(Error::CertificateSubjectMismatch(
            "rank certificate does not match the persistent factor".into(),
        ));
    }
    let minimal: usize = p
        .shape()
        .dims()
        .iter()
        .take(n - 1)
        .map(|&dk| dk - 1)
        .sum::<usize>()
        + 1;
    let Some(exact) = p_cert.exact() else {
        return Err(Error::NotMinimalRank("the factor's rank certificate is not exact".into()));
    };
    if exact != minimal {
        return Err(Error::NotMinimalRank(format!(
            "rank {exact} differs from the minimal persistent rank {minimal}"
        )));
    }
    let Some(p_persist) = &p_cert.persistence else {
        return Err(Error::NotMinimalRank(
            "the factor's lower bound does not carry a persistence certificate".into(),
        ));
    };
    let p_dec = &p_cert.upper.as_ref().expect("exact() implies an upper witness").decomposition;

    let ghz = ghz_tensor(d, n);
    let kron = ghz.kronecker_product(p)?;

    // lower bound: iterate block additivity over p, p + p, ...
    let mut trace = Vec::new();
    let mut acc = p.clone();
    let mut acc_cert = p_cert.clone();
    for step in 1..d {
        let next = acc.direct_sum(p)?;
        let split: Vec<(usize, usize)> = p
            .shape()
            .dims()
            .iter()
            .map(|&dk| (step * dk, dk))
            .collect();
        let cert = composite_lower_bound(&next, &split, &acc_cert, p_persist)?;
        trace.push(format!(
            "direct sum of {} copies: lower bound {}",
            step + 1,
            cert.lower
        ));
        acc = next;
        acc_cert = cert;
    }
    let lower = if d == 1 { p_cert.lower } else { acc_cert.lower };
    if d > 1 && acc != kron {
        return Err(Error::BadParams(
            "kronecker product with the diagonal tensor does not match the direct-sum block structure".into(),
        ));
    }
    trace.push(format!(
        "the size-{d} diagonal Kronecker factor realizes the {d}-fold direct sum exactly; lower bound {lower}"
    ));

    // upper bound: replicate p's decomposition through the d blocks
    let (subject_tensor, upper_dec) = match mode {
        ProductMode::Kron => {
            let mut terms = Vec::with_capacity(d * p_dec.len());
            for k in 0..d {
                for term in p_dec.terms() {
                    let vectors: Vec<Vec<Cyclotomic>> = term
                        .vectors
                        .iter()
                        .enumerate()
                        .map(|(i, v)| {
                            let dim = p.shape().dim(i);
                            let mut out = vec![Cyclotomic::zero(); d * dim];
                            for (j, c) in v.iter().enumerate() {
                                out[k * dim + j] = c.clone();
                            }
                            out
                        })
                        .collect();
                    terms.push(Term { scale: term.scale.clone(), vectors });
                }
            }
            let dec = Decomposition::new(kron.shape().clone(), terms)?;
            (kron.clone(), dec)
        }
        ProductMode::Tensor => {
            let prod = ghz.tensor_product(p);
            let mut terms = Vec::with_capacity(d * p_dec.len());
            for k in 0..d {
                for term in p_dec.terms() {
                    let mut vectors: Vec<Vec<Cyclotomic>> = Vec::with_capacity(2 * n);
                    for _ in 0..n {
                        let mut v = vec![Cyclotomic::zero(); d];
                        v[k] = Cyclotomic::one();
                        vectors.push(v);
                    }
                    vectors.extend(term.vectors.iter().cloned());
                    terms.push(Term { scale: term.scale.clone(), vectors });
                }
            }
            let dec = Decomposition::new(prod.shape().clone(), terms)?;
            (prod, dec)
        }
    };
    if !verify_decomposition(&subject_tensor, &upper_dec)? {
        return Err(Error::UnverifiedDecomposition);
    }
    if mode == ProductMode::Tensor {
        trace.push(format!(
            "the {}-fold tensor-product subject dominates the Kronecker subject, so the lower bound transfers",
            2 * n
        ));
    }
    trace.push(format!("replicated decomposition verifies with {} terms", upper_dec.len()));
    Ok(RankCertificate {
        subject: digest_tensor(&subject_tensor),
        lower,
        lower_method: "diagonal-product block additivity".into(),
        trace,
        upper: Some(UpperWitness { terms: upper_dec.len(), decomposition: upper_dec }),
        persistence: None,
    })
}

/// Rearrange a verified decomposition of a persistent tensor so that for
/// every factor j < n the terms at positions D_j .. D_j + d_j - 1
/// (zero-based, D_j = sum_{k<j} (d_k - 1)) have j-th vectors forming a
/// basis. Returns the permutation as a list of original term indices.
pub fn rearrange_decomposition(
    p: &Tensor<Cyclotomic>,
    dec: &Decomposition<Cyclotomic>,
    cert: &PersistenceCertificate,
) -> Result<Vec<usize>> {
    if !cert.is_full() {
        return Err(Error::WeakCertificate("rearrangement needs a full certificate".into()));
    }
    if digest_tensor(p) != cert.subject {
        return Err(Error::CertificateSubjectMismatch(
            "persistence certificate does not match the decomposed tensor".into(),
        ));
    }
    if !verify_decomposition(p, dec)? {
        return Err(Error::UnverifiedDecomposition);
    }
    #[derive(Clone)]
    struct Work {
        orig: usize,
        vectors: Vec<Vec<Cyclotomic>>,
    }
    let work: Vec<Work> = dec
        .terms()
        .iter()
        .enumerate()
        .map(|(i, t)| Work { orig: i, vectors: t.vectors.clone() })
        .collect();

    fn greedy_basis(terms: &[Work], dim: usize) -> Option<Vec<usize>> {
        let mut rows: Vec<Vec<Cyclotomic>> = Vec::new();
        let mut picked = Vec::new();
        for (i, t) in terms.iter().enumerate() {
            if rows.len() == dim {
                break;
            }
            let mut candidate = rows.clone();
            candidate.push(t.vectors[0].clone());
            if crate::tensor::matrix_rank(candidate.clone()) == rows.len() + 1 {
                rows = candidate;
                picked.push(i);
            }
        }
        (picked.len() == dim).then_some(picked)
    }

    fn solve(
        terms: Vec<Work>,
        dims: &[usize],
        chain: &[WitnessLevel],
        out: &mut Vec<usize>,
    ) -> Result<()> {
        let d1 = dims[0];
        let basis_pos = greedy_basis(&terms, d1).ok_or_else(|| {
            Error::RearrangementFailed(
                "first-factor vectors of the decomposition do not span the factor space".into(),
            )
        })?;
        if dims.len() == 2 {
            for &i in &basis_pos {
                out.push(terms[i].orig);
            }
            for (i, t) in terms.iter().enumerate() {
                if !basis_pos.contains(&i) {
                    out.push(t.orig);
                }
            }
            return Ok(());
        }
        // witness for this level: fixed from the chain, or recovered
        // from the current tensor for the on-demand marker
        let witness: Vec<Cyclotomic> = match &chain[0] {
            WitnessLevel::Fixed(e) => e.clone(),
            WitnessLevel::Discover => {
                let current = expand_work(&terms, dims);
                qubits::discover_witness_w_class(&current)?
            }
        };
        // order the basis so the last element carries a nonzero witness
        // coordinate: the dual covector of that element then has
        // nonzero pairing with the witness, so the contraction stays
        // persistent
        let basis_rows: Vec<Vec<Cyclotomic>> =
            basis_pos.iter().map(|&i| terms[i].vectors[0].clone()).collect();
        // witness = sum c_k * basis_k; solve the transposed system
        let mut at = vec![vec![Cyclotomic::zero(); d1]; d1];
        for (k, row) in basis_rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                at[j][k] = v.clone();
            }
        }
        let coords = solve_linear(&at, &witness)?;
        let Some(last_in_basis) = (0..d1).rev().find(|&k| !coords[k].is_zero()) else {
            return Err(Error::RearrangementFailed("witness vector is zero".into()));
        };
        let chart_term = basis_pos[last_in_basis];
        let kept_basis: Vec<usize> = basis_pos
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != last_in_basis)
            .map(|(_, &i)| i)
            .collect();
        // dual covector f with f(basis_k) = delta_{k, last}
        let mut rhs = vec![Cyclotomic::zero(); d1];
        rhs[last_in_basis] = Cyclotomic::one();
        let mut basis_matrix = vec![vec![Cyclotomic::zero(); d1]; d1];
        for (k, row) in basis_rows.iter().enumerate() {
            basis_matrix[k] = row.clone();
        }
        let f = solve_linear(&transpose(&basis_matrix), &rhs)?;
        let covector = CoVector::new(f);

        for &i in &kept_basis {
            out.push(terms[i].orig);
        }
        let mut survivors = Vec::new();
        let mut zeroed = Vec::new();
        for (i, t) in terms.iter().enumerate() {
            if kept_basis.contains(&i) {
                continue;
            }
            let pairing = covector.apply(&t.vectors[0]);
            if pairing.is_zero() {
                zeroed.push(t.orig);
            } else {
                survivors.push(Work { orig: t.orig, vectors: t.vectors[1..].to_vec() });
            }
        }
        debug_assert!(survivors.iter().any(|s| s.orig == terms[chart_term].orig));
        solve(survivors, &dims[1..], &chain[1..], out)?;
        out.extend(zeroed);
        Ok(())
    }

    fn transpose(m: &[Vec<Cyclotomic>]) -> Vec<Vec<Cyclotomic>> {
        let n = m.len();
        (0..n).map(|j| (0..n).map(|i| m[i][j].clone()).collect()).collect()
    }

    fn expand_work(terms: &[Work], dims: &[usize]) -> Tensor<Cyclotomic> {
        let shape = Shape::new(dims.to_vec()).expect("valid shape");
        let mut out = Tensor::zero(shape.clone());
        for t in terms {
            let term = Term { scale: Cyclotomic::one(), vectors: t.vectors.clone() };
            let dec = Decomposition::new(shape.clone(), vec![term]).expect("well-formed term");
            out = out.add(&dec.expand()).expect("same shape");
        }
        out
    }

    let mut out = Vec::with_capacity(dec.len());
    let chain = cert.witness_chain.clone();
    let dims = p.shape().dims().to_vec();
    solve(work, &dims, &chain, &mut out)?;
    if out.len() != dec.len() {
        return Err(Error::RearrangementFailed("permutation lost terms".into()));
    }
    Ok(out)
}

/// Check the rearrangement contract: for every factor j < n the terms at
/// positions D_j .. D_j + d_j - 1 have j-th vectors of full rank.
pub fn rearrangement_is_valid(
    dec: &Decomposition<Cyclotomic>,
    order: &[usize],
    dims: &[usize],
) -> bool {
    let n = dims.len();
    let mut offset = 0usize;
    for (j, &dj) in dims.iter().enumerate().take(n - 1) {
        if offset + dj > order.len() {
            return false;
        }
        let rows: Vec<Vec<Cyclotomic>> = (offset..offset + dj)
            .map(|pos| dec.terms()[order[pos]].vectors[j].clone())
            .collect();
        if crate::tensor::matrix_rank(rows) != dj {
            return false;
        }
        offset += dj - 1;
    }
    true
}

#[allow(unused)]
fn unused_matrix_helper(m: Matrix<Cyclotomic>) -> usize {
    m.rows()
}
