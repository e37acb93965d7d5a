//! Epsilon-parameterized local maps, degeneration verification, the
//! canonical degeneration chain between the three qudit families, and
//! border-rank certificates from epsilon decompositions.
//!
//! Verification is exact: the image of the source under the epsilon
//! maps is expanded as a Laurent-coefficient tensor family, the globally
//! lowest order must reproduce the target up to a recorded nonzero
//! scalar, and the remaining orders are the error terms.

use std::collections::BTreeMap;

use crate::decomp::{map_decomposition, Decomposition, Term};
use crate::digest::digest_tensor;
use crate::families::ghz_tensor;
use crate::scalar::{rat_frac, zeta, Cyclotomic, EpsLaurent};
use crate::tensor::{slocc_apply, LocalMap, Matrix, Shape, Tensor};
use crate::{Error, Result};

pub type EpsLocalMap = LocalMap<EpsLaurent>;

#[derive(Clone, Debug)]
pub struct DegenerationCertificate {
    pub source: String,
    pub target: String,
    /// Approximation degree of the polynomial form recovered after the
    /// recorded normalization shift.
    pub approximation_degree: i64,
    /// Highest error order above the target term.
    pub error_degree: i64,
    /// Global epsilon power that makes the map family polynomial.
    pub normalization_shift: i64,
    /// Nonzero scalar relating the lowest-order tensor to the target.
    pub scalar: Cyclotomic,
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub struct DegenerationOutcome {
    pub certificate: DegenerationCertificate,
    /// Error tensors by positive order offset l (coefficient of
    /// eps^(lowest + l)).
    pub error_terms: Vec<(i64, Tensor<Cyclotomic>)>,
}

/// Coefficient tensors of a Laurent tensor, keyed by exponent.
fn coefficient_tensors(t: &Tensor<EpsLaurent>) -> BTreeMap<i64, Tensor<Cyclotomic>> {
    let mut out: BTreeMap<i64, Tensor<Cyclotomic>> = BTreeMap::new();
    for (idx, v) in t.entries() {
        for (k, c) in v.terms() {
            out.entry(k)
                .or_insert_with(|| Tensor::zero(t.shape().clone()))
                .add_entry(idx.clone(), c.clone())
                .expect("index within shape");
        }
    }
    out.retain(|_, tensor| !tensor.is_zero());
    out
}

fn map_min_exponent(m: &Matrix<EpsLaurent>) -> Option<i64> {
    let mut min = None;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if let Some(k) = m.at(r, c).min_exp() {
                min = Some(min.map_or(k, |cur: i64| cur.min(k)));
            }
        }
    }
    min
}

/// Expand (maps applied to src) and check that the lowest epsilon order
/// equals the target up to a nonzero scalar.
pub fn verify_degeneration(
    src: &Tensor<Cyclotomic>,
    maps: &EpsLocalMap,
    tgt: &Tensor<Cyclotomic>,
) -> Result<DegenerationOutcome> {
    if tgt.is_zero() {
        return Err(Error::NotADegeneration("the target is zero".into()));
    }
    let image = slocc_apply(&src.to_eps(), maps)?;
    if image.shape() != tgt.shape() {
        return Err(Error::ShapeMismatch(format!(
            "image shape {:?} vs target {:?}",
            image.shape().dims(),
            tgt.shape().dims()
        )));
    }
    let coeffs = coefficient_tensors(&image);
    let Some((&lowest, low_tensor)) = coeffs.iter().next() else {
        return Err(Error::NotADegeneration("the image vanishes identically".into()));
    };
    let Some(scalar) = low_tensor.proportional_to(tgt) else {
        return Err(Error::NotADegeneration(format!(
            "lowest-order tensor (order {lowest}) is not a scalar multiple of the target"
        )));
    };
    let highest = *coeffs.keys().next_back().unwrap();
    // shift that makes every factor map polynomial
    let shift: i64 = maps
        .matrices()
        .iter()
        .map(|m| map_min_exponent(m).map_or(0, |k| (-k).max(0)))
        .sum();
    let error_terms: Vec<(i64, Tensor<Cyclotomic>)> = coeffs
        .iter()
        .filter(|(&k, _)| k > lowest)
        .map(|(&k, t)| (k - lowest, t.clone()))
        .collect();
    Ok(DegenerationOutcome {
        certificate: DegenerationCertificate {
            source: digest_tensor(src),
            target: digest_tensor(tgt),
            approximation_degree: lowest + shift,
            error_degree: highest - lowest,
            normalization_shift: shift,
            scalar,
            verified: true,
        },
        error_terms,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainStep {
    LToM,
    MToN,
}

/// The canonical chain maps. The first step applies
/// diag(eps^-2, eps^(n-2), ..., eps^(n-2), eps^(2(n-1))) to every
/// factor; the second applies diag(1, eps, ..., eps, 1) to the first
/// n - 1 factors and its exact inverse to the last.
pub fn canonical_chain_maps(step: ChainStep, d: usize, n: usize) -> Result<EpsLocalMap> {
    if n < 3 {
        return Err(Error::BadSpec(format!("the chain needs n >= 3, got n = {n}")));
    }
    if d < 2 {
        return Err(Error::BadSpec(format!("the chain needs d >= 2, got d = {d}")));
    }
    let diag = |weights: &dyn Fn(usize) -> EpsLaurent| -> Matrix<EpsLaurent> {
        let mut m = Matrix::zeros(d, d);
        for j in 0..d {
            *m.at_mut(j, j) = weights(j);
        }
        m
    };
    match step {
        ChainStep::LToM => {
            let w = |j: usize| -> EpsLaurent {
                if j == 0 {
                    EpsLaurent::eps(-2)
                } else if j == d - 1 {
                    EpsLaurent::eps(2 * (n as i64 - 1))
                } else {
                    EpsLaurent::eps(n as i64 - 2)
                }
            };
            Ok(LocalMap::replicate(diag(&w), n))
        }
        ChainStep::MToN => {
            let w = |j: usize| -> EpsLaurent {
                if j == 0 || j == d - 1 {
                    EpsLaurent::one()
                } else {
                    EpsLaurent::eps(1)
                }
            };
            let w_inv = |j: usize| -> EpsLaurent {
                if j == 0 || j == d - 1 {
                    EpsLaurent::one()
                } else {
                    EpsLaurent::eps(-1)
                }
            };
            let mut mats = vec![diag(&w); n - 1];
            mats.push(diag(&w_inv));
            Ok(LocalMap::new(mats))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpsFamily {
    L,
    MPrime,
    NPrime,
}

/// The d-term epsilon decompositions whose lowest order reproduces the
/// family tensor exactly:
/// - L: (1/(d eps^(d-1))) sum_p xi^p (sum_j eps^j xi^(pj) |j>)^(x n);
/// - M': (d-2) shifted power terms, one correction term, and one
///   |0...0> term with a two-monomial Laurent scale;
/// - N': d-1 terms (|0> + eps|j>)^(x (n-1)) (x) |j> plus one correction
///   term on the last factor.
/// M'(2, n) equals the qubit W state, where the printed three-block form
/// collapses; that case reuses the L construction on the same tensor.
pub fn eps_decomposition(family: EpsFamily, d: usize, n: usize) -> Result<Decomposition<EpsLaurent>> {
    if d < 2 || n < 2 {
        return Err(Error::BadSpec(format!("epsilon decompositions need d, n >= 2, got d={d} n={n}")));
    }
    let shape = Shape::uniform(d, n)?;
    let dec = match family {
        EpsFamily::L => {
            let xi = zeta(d);
            let inv_d = Cyclotomic::from_rational(rat_frac(1, d as i64));
            let mut terms = Vec::with_capacity(d);
            for p in 0..d as i64 {
                let scale = EpsLaurent::single(-(d as i64 - 1), xi.pow(p as u64).mul(&inv_d));
                let vector: Vec<EpsLaurent> = (0..d as i64)
                    .map(|j| EpsLaurent::single(j, Cyclotomic::root(d, p * j)))
                    .collect();
                terms.push(Term { scale, vectors: vec![vector; n] });
            }
            Decomposition::new(shape, terms)?
        }
        EpsFamily::MPrime => {
            if d == 2 {
                return eps_decomposition(EpsFamily::L, 2, n);
            }
            let mut terms = Vec::with_capacity(d);
            let frac = Cyclotomic::from_rational(rat_frac(1, d as i64 - 2));
            for j in 1..=d - 2 {
                let mut v = vec![EpsLaurent::zero(); d];
                v[0] = EpsLaurent::one();
                v[j] = EpsLaurent::eps(1);
                v[d - 1] = EpsLaurent::single(2, frac.clone());
                terms.push(Term { scale: EpsLaurent::eps(-2), vectors: vec![v; n] });
            }
            {
                let mut v = vec![EpsLaurent::zero(); d];
                v[0] = EpsLaurent::one();
                for j in 1..=d - 2 {
                    v[j] = EpsLaurent::eps(2);
                }
                terms.push(Term { scale: EpsLaurent::eps(-3).neg(), vectors: vec![v; n] });
            }
            {
                let v = {
                    let mut v = vec![EpsLaurent::zero(); d];
                    v[0] = EpsLaurent::one();
                    v
                };
                // -(d - 2 - 1/eps) / eps^2
                let scale = EpsLaurent::single(-2, Cyclotomic::from_int(d as i64 - 2))
                    .neg()
                    .add(&EpsLaurent::eps(-3));
                terms.push(Term { scale, vectors: vec![v; n] });
            }
            Decomposition::new(shape, terms)?
        }
        EpsFamily::NPrime => {
            let mut terms = Vec::with_capacity(d);
            for j in 1..d {
                let mut v = vec![EpsLaurent::zero(); d];
                v[0] = EpsLaurent::one();
                v[j] = EpsLaurent::eps(1);
                let mut last = vec![EpsLaurent::zero(); d];
                last[j] = EpsLaurent::one();
                let mut vectors = vec![v; n - 1];
                vectors.push(last);
                terms.push(Term { scale: EpsLaurent::eps(-1), vectors });
            }
            {
                let mut head = vec![EpsLaurent::zero(); d];
                head[0] = EpsLaurent::one();
                let mut last = vec![EpsLaurent::zero(); d];
                last[0] = EpsLaurent::eps(1);
                for j in 1..d {
                    last[j] = EpsLaurent::one().neg();
                }
                let mut vectors = vec![head; n - 1];
                vectors.push(last);
                terms.push(Term { scale: EpsLaurent::eps(-1), vectors });
            }
            Decomposition::new(shape, terms)?
        }
    };
    Ok(dec)
}

/// The family tensor an epsilon decomposition approximates.
pub fn eps_family_target(family: EpsFamily, d: usize, n: usize) -> Result<Tensor<Cyclotomic>> {
    use crate::families::{make_state, FamilySpec};
    match family {
        EpsFamily::L => make_state(&FamilySpec::l(d, n)),
        EpsFamily::MPrime => make_state(&FamilySpec::m_prime(d, n)),
        EpsFamily::NPrime => make_state(&FamilySpec::n_prime(d, n)),
    }
}

#[derive(Clone, Debug)]
pub struct BorderRankCertificate {
    pub subject: String,
    /// Max mode flattening rank: a lower bound for the border rank.
    pub lower: usize,
    /// Term count of the verified epsilon decomposition.
    pub upper: usize,
    pub terms: Decomposition<EpsLaurent>,
}

impl BorderRankCertificate {
    pub fn exact(&self) -> Option<usize> {
        (self.lower == self.upper).then_some(self.lower)
    }
}

/// Check that the epsilon decomposition's expansion has lowest order
/// exactly `t` with all lower orders cancelling, and combine the term
/// count with the flattening lower bound.
pub fn border_rank_certificate(
    t: &Tensor<Cyclotomic>,
    epsdec: &Decomposition<EpsLaurent>,
) -> Result<BorderRankCertificate> {
    if t.is_zero() {
        return Err(Error::ZeroTensor);
    }
    if epsdec.shape() != t.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            epsdec.shape().dims(),
            t.shape().dims()
        )));
    }
    let expansion = epsdec.expand();
    let coeffs = coefficient_tensors(&expansion);
    let Some((&lowest, low)) = coeffs.iter().next() else {
        return Err(Error::InvalidEpsDecomposition("the expansion vanishes".into()));
    };
    if lowest != 0 {
        return Err(Error::InvalidEpsDecomposition(format!(
            "expansion starts at order {lowest}, expected the normalized order 0"
        )));
    }
    if low != t {
        return Err(Error::InvalidEpsDecomposition(
            "the order-0 coefficient differs from the target".into(),
        ));
    }
    let profile = t.multilinear_profile();
    let lower = profile.ranks.iter().copied().max().unwrap_or(1);
    Ok(BorderRankCertificate {
        subject: digest_tensor(t),
        lower,
        upper: epsdec.len(),
        terms: epsdec.clone(),
    })
}

/// Transport an epsilon decomposition through epsilon maps, then
/// normalize the global epsilon power so the expansion starts at order
/// zero.
pub fn transport_eps_decomposition(
    epsdec: &Decomposition<EpsLaurent>,
    maps: &EpsLocalMap,
) -> Result<Decomposition<EpsLaurent>> {
    let moved = map_decomposition(maps, epsdec)?;
    let expansion = moved.expand();
    let coeffs = coefficient_tensors(&expansion);
    let Some((&lowest, _)) = coeffs.iter().next() else {
        return Err(Error::InvalidEpsDecomposition("transport annihilated the decomposition".into()));
    };
    if lowest == 0 {
        return Ok(moved);
    }
    moved.rescale(&EpsLaurent::eps(-lowest))
}

/// Build the epsilon local maps realizing the degeneration of the
/// diagonal tensor of size r (the term count) onto the decomposition's
/// tensor: leg i of basis vector |p> goes to the p-th term's i-th
/// vector, with the scale folded into the first factor.
pub fn ghz_degeneration_from_eps(epsdec: &Decomposition<EpsLaurent>) -> Result<EpsLocalMap> {
    let r = epsdec.len();
    if r == 0 {
        return Err(Error::InvalidEpsDecomposition("no terms".into()));
    }
    let n = epsdec.shape().arity();
    let mut mats = Vec::with_capacity(n);
    for i in 0..n {
        let dim = epsdec.shape().dim(i);
        let mut m = Matrix::zeros(dim, r);
        for (p, term) in epsdec.terms().iter().enumerate() {
            for (j, c) in term.vectors[i].iter().enumerate() {
                let v = if i == 0 { c.mul(&term.scale) } else { c.clone() };
                *m.at_mut(j, p) = v;
            }
        }
        mats.push(m);
    }
    Ok(LocalMap::new(mats))
}

/// Diagonal tensor of size d as a tensor (public helper for rate and
/// border pipelines).
pub fn ghz(d: usize, n: usize) -> Tensor<Cyclotomic> {
    ghz_tensor(d, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_state, FamilySpec};

    #[test]
    fn identity_maps_give_degree_zero() {
        let w = make_state(&FamilySpec::w(3)).unwrap();
        let maps =
            LocalMap::<Cyclotomic>::identity(w.shape()).map(|c| EpsLaurent::from_cyc(c.clone()));
        let out = verify_degeneration(&w, &maps, &w).unwrap();
        assert_eq!(out.certificate.approximation_degree, 0);
        assert_eq!(out.certificate.error_degree, 0);
        assert_eq!(out.certificate.scalar, Cyclotomic::one());
        assert!(out.error_terms.is_empty());
    }

    #[test]
    fn chain_first_step_verifies() {
        for (d, n) in [(3, 3), (4, 3), (3, 4), (4, 4)] {
            let l = make_state(&FamilySpec::l(d, n)).unwrap();
            let m = make_state(&FamilySpec::m(d, n)).unwrap();
            let maps = canonical_chain_maps(ChainStep::LToM, d, n).unwrap();
            let out = verify_degeneration(&l, &maps, &m).unwrap();
            assert!(out.certificate.verified, "L -> M at d={d} n={n}");
            assert_eq!(out.certificate.scalar, Cyclotomic::one());
        }
    }

    #[test]
    fn chain_second_step_verifies() {
        for (d, n) in [(3, 3), (4, 3), (3, 4), (5, 4)] {
            let m = make_state(&FamilySpec::m(d, n)).unwrap();
            let nn = make_state(&FamilySpec::n_state(d, n)).unwrap();
            let maps = canonical_chain_maps(ChainStep::MToN, d, n).unwrap();
            let out = verify_degeneration(&m, &maps, &nn).unwrap();
            assert!(out.certificate.verified, "M -> N at d={d} n={n}");
        }
    }

    #[test]
    fn chain_requires_three_parties() {
        assert!(matches!(
            canonical_chain_maps(ChainStep::LToM, 3, 2),
            Err(Error::BadSpec(_))
        ));
    }

    #[test]
    fn composed_chain_reaches_the_last_family() {
        let d = 4;
        let n = 3;
        let l = make_state(&FamilySpec::l(d, n)).unwrap();
        let target = make_state(&FamilySpec::n_state(d, n)).unwrap();
        let first = canonical_chain_maps(ChainStep::LToM, d, n).unwrap();
        let second = canonical_chain_maps(ChainStep::MToN, d, n).unwrap();
        let composed = first.then(&second).unwrap();
        let out = verify_degeneration(&l, &composed, &target).unwrap();
        assert!(out.certificate.verified);
    }

    #[test]
    fn eps_decomposition_of_l_at_d2_is_the_two_term_w_family() {
        let dec = eps_decomposition(EpsFamily::L, 2, 3).unwrap();
        assert_eq!(dec.len(), 2);
        let w3 = make_state(&FamilySpec::w(3)).unwrap();
        let cert = border_rank_certificate(&w3, &dec).unwrap();
        assert_eq!(cert.exact(), Some(2));
    }

    #[test]
    fn eps_decompositions_hit_their_targets() {
        for (family, d, n) in [
            (EpsFamily::NPrime, 3, 3),
            (EpsFamily::NPrime, 4, 3),
            (EpsFamily::MPrime, 4, 4),
            (EpsFamily::MPrime, 3, 3),
            (EpsFamily::L, 3, 4),
            (EpsFamily::L, 4, 5),
        ] {
            let dec = eps_decomposition(family, d, n).unwrap();
            assert_eq!(dec.len(), d, "{family:?} d={d} n={n}");
            let target = eps_family_target(family, d, n).unwrap();
            let cert = border_rank_certificate(&target, &dec).unwrap();
            assert_eq!(cert.exact(), Some(d), "{family:?} d={d} n={n}");
        }
    }

    #[test]
    fn negative_orders_cancel_in_every_expansion() {
        for (family, d, n) in [
            (EpsFamily::L, 4, 4),
            (EpsFamily::MPrime, 5, 3),
            (EpsFamily::NPrime, 5, 4),
        ] {
            let dec = eps_decomposition(family, d, n).unwrap();
            let coeffs = coefficient_tensors(&dec.expand());
            let lowest = *coeffs.keys().next().unwrap();
            assert_eq!(lowest, 0, "{family:?} d={d} n={n}");
        }
    }

    #[test]
    fn transported_decompositions_certify_m_and_n() {
        for (d, n) in [(2, 3), (3, 3), (4, 4)] {
            let base = eps_decomposition(EpsFamily::L, d, n).unwrap();
            let to_m = canonical_chain_maps(ChainStep::LToM, d, n).unwrap();
            let m_dec = transport_eps_decomposition(&base, &to_m).unwrap();
            let m = make_state(&FamilySpec::m(d, n)).unwrap();
            assert_eq!(border_rank_certificate(&m, &m_dec).unwrap().exact(), Some(d));

            let to_n = canonical_chain_maps(ChainStep::MToN, d, n).unwrap();
            let n_dec = transport_eps_decomposition(&m_dec, &to_n).unwrap();
            let nn = make_state(&FamilySpec::n_state(d, n)).unwrap();
            assert_eq!(border_rank_certificate(&nn, &n_dec).unwrap().exact(), Some(d));
        }
    }

    #[test]
    fn ghz_border_rank_is_its_rank() {
        let g = make_state(&FamilySpec::ghz(3, 4)).unwrap();
        let dec = crate::decomp::decompose_ghz(3, 4).unwrap().to_eps();
        let cert = border_rank_certificate(&g, &dec).unwrap();
        assert_eq!(cert.exact(), Some(3));
    }

    #[test]
    fn diagonal_degeneration_from_eps_decompositions() {
        // GHZ(3,3) degenerates onto L(3,3)
        let dec = eps_decomposition(EpsFamily::L, 3, 3).unwrap();
        let maps = ghz_degeneration_from_eps(&dec).unwrap();
        let l = make_state(&FamilySpec::l(3, 3)).unwrap();
        let out = verify_degeneration(&ghz(3, 3), &maps, &l).unwrap();
        assert!(out.certificate.verified);

        // an exact (epsilon-free) decomposition gives an exact restriction
        let w_dec = crate::decomp::decompose_w(4).unwrap().to_eps();
        let maps = ghz_degeneration_from_eps(&w_dec).unwrap();
        let w = make_state(&FamilySpec::w(4)).unwrap();
        let out = verify_degeneration(&ghz(4, 4), &maps, &w).unwrap();
        assert_eq!(out.certificate.approximation_degree, 0);
        assert_eq!(out.certificate.error_degree, 0);

        // and the asymmetric family at d = 4
        let dec = eps_decomposition(EpsFamily::NPrime, 4, 3).unwrap();
        let maps = ghz_degeneration_from_eps(&dec).unwrap();
        let np = make_state(&FamilySpec::n_prime(4, 3)).unwrap();
        let out = verify_degeneration(&ghz(4, 3), &maps, &np).unwrap();
        assert!(out.certificate.verified);
    }

    #[test]
    fn border_rank_never_exceeds_rank() {
        for (d, n) in [(2, 3), (3, 3), (3, 4), (4, 3)] {
            let dec = eps_decomposition(EpsFamily::L, d, n).unwrap();
            let l = make_state(&FamilySpec::l(d, n)).unwrap();
            let border = border_rank_certificate(&l, &dec).unwrap();
            let rank_upper = crate::decomp::decompose_l(d, n).unwrap().len();
            assert!(border.upper <= rank_upper);
        }
    }

    #[test]
    fn broken_maps_are_rejected() {
        let l = make_state(&FamilySpec::l(3, 3)).unwrap();
        let m = make_state(&FamilySpec::m(4, 3)).unwrap();
        let maps = canonical_chain_maps(ChainStep::LToM, 3, 3).unwrap();
        assert!(matches!(
            verify_degeneration(&l, &maps, &m),
            Err(Error::ShapeMismatch(_))
        ));
        let w3 = make_state(&FamilySpec::w(3)).unwrap();
        let bad = LocalMap::replicate(Matrix::zeros(2, 2), 3);
        assert!(matches!(
            verify_degeneration(&w3, &bad, &w3),
            Err(Error::NotADegeneration(_))
        ));
    }
}
