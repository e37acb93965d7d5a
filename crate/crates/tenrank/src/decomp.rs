//! Rank-one decompositions: exact verification, explicit constructors
//! for every family, and transport of decompositions through local maps.
//!
//! Every constructor is verified against its target tensor at build
//! time, so a successful return is itself a certificate that the term
//! count upper-bounds the tensor rank.

use crate::families::{make_state, m_basis_change, m_basis_change_scalar, FamilySpec};
use crate::scalar::{Cyclotomic, EpsLaurent, Field, Rational, Ring};
use crate::tensor::{invert_matrix, LocalMap, Matrix, Shape, Tensor};
use crate::{Error, Result};

/// One simple term: scale * v_1 (x) ... (x) v_n.
#[derive(Clone, Debug, PartialEq)]
pub struct Term<S: Ring> {
    pub scale: S,
    pub vectors: Vec<Vec<S>>,
}

/// A list of simple terms summing to a tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<S: Ring> {
    shape: Shape,
    terms: Vec<Term<S>>,
}

impl<S: Ring> Decomposition<S> {
    pub fn new(shape: Shape, terms: Vec<Term<S>>) -> Result<Self> {
        for term in &terms {
            if term.vectors.len() != shape.arity() {
                return Err(Error::ShapeMismatch(format!(
                    "term has {} vectors for arity {}",
                    term.vectors.len(),
                    shape.arity()
                )));
            }
            for (i, v) in term.vectors.iter().enumerate() {
                if v.len() != shape.dim(i) {
                    return Err(Error::DimMismatch(format!(
                        "vector {i} has length {} for dimension {}",
                        v.len(),
                        shape.dim(i)
                    )));
                }
            }
            if term.scale.is_zero() || term.vectors.iter().any(|v| v.iter().all(|c| c.is_zero())) {
                return Err(Error::BadParams("terms must have nonzero scale and vectors".into()));
            }
        }
        Ok(Decomposition { shape, terms })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn terms(&self) -> &[Term<S>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact expansion of the sum of terms.
    pub fn expand(&self) -> Tensor<S> {
        let mut out = Tensor::zero(self.shape.clone());
        let n = self.shape.arity();
        for term in &self.terms {
            // depth-first over the support of each vector, carrying the
            // running product
            let mut idx = vec![0usize; n];
            expand_term(term, 0, &term.scale, &mut idx, &mut out);
        }
        out
    }

    pub fn map_scalars<T: Ring>(&self, f: impl Fn(&S) -> T + Copy) -> Result<Decomposition<T>> {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                scale: f(&t.scale),
                vectors: t.vectors.iter().map(|v| v.iter().map(f).collect()).collect(),
            })
            .collect();
        Decomposition::new(self.shape.clone(), terms)
    }

    /// Multiply one global scalar into every term's scale.
    pub fn rescale(&self, s: &S) -> Result<Decomposition<S>> {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { scale: t.scale.mul(s), vectors: t.vectors.clone() })
            .collect();
        Decomposition::new(self.shape.clone(), terms)
    }

    pub fn permuted(&self, order: &[usize]) -> Result<Decomposition<S>> {
        if order.len() != self.terms.len() {
            return Err(Error::BadParams("permutation length mismatch".into()));
        }
        let terms = order.iter().map(|&i| self.terms[i].clone()).collect();
        Decomposition::new(self.shape.clone(), terms)
    }
}

fn expand_term<S: Ring>(
    term: &Term<S>,
    factor: usize,
    partial: &S,
    idx: &mut Vec<usize>,
    out: &mut Tensor<S>,
) {
    if factor == term.vectors.len() {
        out.add_entry(idx.clone(), partial.clone()).expect("index within shape");
        return;
    }
    for (j, c) in term.vectors[factor].iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let next = partial.mul(c);
        if next.is_zero() {
            continue;
        }
        idx[factor] = j;
        expand_term(term, factor + 1, &next, idx, out);
    }
    idx[factor] = 0;
}

impl Decomposition<Cyclotomic> {
    pub fn to_eps(&self) -> Decomposition<EpsLaurent> {
        self.map_scalars(|c| EpsLaurent::from_cyc(c.clone())).expect("same shape")
    }
}

/// True iff the decomposition expands to exactly `t`; a true return
/// certifies rank(t) <= number of terms.
pub fn verify_decomposition<S: Ring>(t: &Tensor<S>, dec: &Decomposition<S>) -> Result<bool> {
    if t.shape() != dec.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            t.shape().dims(),
            dec.shape().dims()
        )));
    }
    Ok(&dec.expand() == t)
}

fn basis_vector(dim: usize, k: usize) -> Vec<Cyclotomic> {
    let mut v = vec![Cyclotomic::zero(); dim];
    v[k] = Cyclotomic::one();
    v
}

fn simple_term(shape: &Shape, idx: &[usize]) -> Term<Cyclotomic> {
    Term {
        scale: Cyclotomic::one(),
        vectors: idx.iter().enumerate().map(|(i, &j)| basis_vector(shape.dim(i), j)).collect(),
    }
}

/// Which of the definition-is-the-decomposition families to expand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrivialFamily {
    Ghz,
    W,
    N,
}

/// Decompositions read straight off the defining sums: d terms for GHZ,
/// n for W, (n-1)(d-1)+1 for N.
pub fn decompose_trivial(family: TrivialFamily, d: usize, n: usize) -> Result<Decomposition<Cyclotomic>> {
    match family {
        TrivialFamily::Ghz => decompose_ghz(d, n),
        TrivialFamily::W => decompose_w(n),
        TrivialFamily::N => decompose_n(d, n),
    }
}

pub fn decompose_ghz(d: usize, n: usize) -> Result<Decomposition<Cyclotomic>> {
    let t = make_state(&FamilySpec::ghz(d, n))?;
    let shape = t.shape().clone();
    let terms = (0..d).map(|j| simple_term(&shape, &vec![j; n])).collect();
    let dec = Decomposition::new(shape, terms)?;
    debug_assert!(verify_decomposition(&t, &dec)?);
    Ok(dec)
}

pub fn decompose_w(n: usize) -> Result<Decomposition<Cyclotomic>> {
    let t = make_state(&FamilySpec::w(n))?;
    let shape = t.shape().clone();
    let terms = t.support().map(|idx| simple_term(&shape, idx)).collect();
    let dec = Decomposition::new(shape, terms)?;
    debug_assert!(verify_decomposition(&t, &dec)?);
    Ok(dec)
}

pub fn decompose_n(d: usize, n: usize) -> Result<Decomposition<Cyclotomic>> {
    let t = make_state(&FamilySpec::n_state(d, n))?;
    let shape = t.shape().clone();
    let terms = t.support().map(|idx| simple_term(&shape, idx)).collect();
    let dec = Decomposition::new(shape, terms)?;
    debug_assert!(verify_decomposition(&t, &dec)?);
    Ok(dec)
}

/// Symmetric decomposition of L(d, n) into r = (n-1)(d-1)+1 terms
/// (1/r) zeta^(p(1-d)) (sum_j zeta^(pj) |j>)^(x n) over Q(zeta_r): the
/// root-of-unity filter keeps exactly the level sum_j = d-1.
pub fn decompose_l(d: usize, n: usize) -> Result<Decomposition<Cyclotomic>> {
    if d < 2 || n < 2 {
        return Err(Error::BadSpec(format!("L state needs d, n >= 2, got d={d} n={n}")));
    }
    let r = (n - 1) * (d - 1) + 1;
    let inv_r = Cyclotomic::from_rational(crate::scalar::rat_frac(1, r as i64));
    let shape = Shape::uniform(d, n)?;
    let mut terms = Vec::with_capacity(r);
    for p in 0..r as i64 {
        let scale = Cyclotomic::root(r, p * (1 - d as i64)).mul(&inv_r);
        let vector: Vec<Cyclotomic> =
            (0..d as i64).map(|j| Cyclotomic::root(r, p * j)).collect();
        terms.push(Term { scale, vectors: vec![vector; n] });
    }
    let dec = Decomposition::new(shape, terms)?;
    let target = make_state(&FamilySpec::l(d, n))?;
    if !verify_decomposition(&target, &dec)? {
        return Err(Error::BadSpec("L decomposition failed verification".into()));
    }
    Ok(dec)
}

/// Waring-style decomposition of the two-level Dicke tensor with b
/// excitations on a + b factors into a + 1 symmetric terms
/// sum_i zeta^(-ib) (|0> + zeta^i |1>)^(x (a+b)), zeta = zeta_(a+1).
/// The single global scale relating the power sum to the Dicke tensor is
/// solved from one nonzero coordinate and then verified on all of them.
pub fn decompose_monomial_waring(a: usize, b: usize) -> Result<Decomposition<Cyclotomic>> {
    if a < b || b < 1 {
        return Err(Error::BadParams(format!("need a >= b >= 1, got a={a} b={b}")));
    }
    let n = a + b;
    let shape = Shape::uniform(2, n)?;
    let mut terms = Vec::with_capacity(a + 1);
    for i in 0..=a as i64 {
        let scale = Cyclotomic::root(a + 1, -i * b as i64);
        let vector = vec![Cyclotomic::one(), Cyclotomic::root(a + 1, i)];
        terms.push(Term { scale, vectors: vec![vector; n] });
    }
    let unscaled = Decomposition::new(shape, terms)?;
    let target = make_state(&FamilySpec::dicke(n, b))?;
    let expansion = unscaled.expand();
    // solve the multiplicity convention factor from one coordinate
    let (idx0, want) = target.entries().next().expect("Dicke tensor is nonzero");
    let got = expansion.coeff(idx0);
    if got.is_zero() {
        return Err(Error::BadParams("power expansion misses the Dicke support".into()));
    }
    let sigma = want.div(&got)?;
    let dec = unscaled.rescale(&sigma)?;
    if !verify_decomposition(&target, &dec)? {
        return Err(Error::BadParams("Waring decomposition failed verification".into()));
    }
    Ok(dec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MVariant {
    M,
    MPrime,
}

/// Decomposition of M'(d, n) with (n-1)(d-1)+1 terms.
///
/// For n >= 4 it is the sum of (d-2) embedded two-excitation Dicke
/// decompositions (planes {|0>, |j>}, n-1 terms each) and an embedded W
/// decomposition (plane {|0>, |d-1>}, n terms). At n = 3 the Dicke
/// block has rank 3 rather than n-1 = 2, so the plane-by-plane sum
/// would overshoot; instead the cube pairs (e_0 +- e_j)^(x3) produce
/// every |0jj>-type level with only a shared e_0^(x3) remainder, and a
/// three-term binary cubic on span(e_0, e_(d-1)) supplies the top level
/// while cancelling that remainder: 2(d-2) + 3 = 2d - 1 terms. The M
/// variant is the M' decomposition pulled back through the inverse of
/// the basis change, with the global scalar folded in.
pub fn decompose_m(d: usize, n: usize, variant: MVariant) -> Result<Decomposition<Cyclotomic>> {
    if d < 2 || n < 3 {
        return Err(Error::BadSpec(format!("M decomposition needs d >= 2, n >= 3, got d={d} n={n}")));
    }
    let shape = Shape::uniform(d, n)?;
    let embed = |plane: usize, v: &[Cyclotomic]| -> Vec<Cyclotomic> {
        let mut out = vec![Cyclotomic::zero(); d];
        out[0] = v[0].clone();
        out[plane] = v[1].clone();
        out
    };
    let mut terms: Vec<Term<Cyclotomic>> = Vec::new();
    if n == 3 {
        let q = d - 2;
        let half = Cyclotomic::from_rational(crate::scalar::rat_frac(1, 2));
        for j in 1..=q {
            for sign in [1i64, -1] {
                let mut v = vec![Cyclotomic::zero(); d];
                v[0] = Cyclotomic::one();
                v[j] = Cyclotomic::from_int(sign);
                terms.push(Term { scale: half.clone(), vectors: vec![v; 3] });
            }
        }
        // x^2 y = ((x + y)^3 - (x - y)^3 - 2 y^3) / 6 with x = e_0 and
        // y = 3 e_(d-1) - q e_0 kills the q e_0^(x3) remainder
        let x = {
            let mut v = vec![Cyclotomic::zero(); d];
            v[0] = Cyclotomic::one();
            v
        };
        let y = {
            let mut v = vec![Cyclotomic::zero(); d];
            v[0] = Cyclotomic::from_int(-(q as i64));
            v[d - 1] = Cyclotomic::from_int(3);
            v
        };
        let sixth = Cyclotomic::from_rational(crate::scalar::rat_frac(1, 6));
        let x_plus_y: Vec<Cyclotomic> = x.iter().zip(&y).map(|(a, b)| a.add(b)).collect();
        let x_minus_y: Vec<Cyclotomic> = x.iter().zip(&y).map(|(a, b)| a.sub(b)).collect();
        terms.push(Term { scale: sixth.clone(), vectors: vec![x_plus_y; 3] });
        terms.push(Term { scale: sixth.neg(), vectors: vec![x_minus_y; 3] });
        terms.push(Term {
            scale: Cyclotomic::from_rational(crate::scalar::rat_frac(-1, 3)),
            vectors: vec![y; 3],
        });
    } else {
        for term in decompose_w(n)?.terms() {
            terms.push(Term {
                scale: term.scale.clone(),
                vectors: term.vectors.iter().map(|v| embed(d - 1, v)).collect(),
            });
        }
        if d >= 3 {
            let dicke = decompose_monomial_waring(n - 2, 2)?;
            for j in 1..=d - 2 {
                for term in dicke.terms() {
                    terms.push(Term {
                        scale: term.scale.clone(),
                        vectors: term.vectors.iter().map(|v| embed(j, v)).collect(),
                    });
                }
            }
        }
    }
    let m_prime_dec = Decomposition::new(shape, terms)?;
    let m_prime = make_state(&FamilySpec::m_prime(d, n))?;
    if !verify_decomposition(&m_prime, &m_prime_dec)? {
        return Err(Error::BadSpec("M' decomposition failed verification".into()));
    }
    match variant {
        MVariant::MPrime => Ok(m_prime_dec),
        MVariant::M => {
            let map = m_basis_change(d, n)?;
            let lambda = m_basis_change_scalar(d, n)?;
            let inv_rows = invert_matrix(&map.matrix(0).to_rows())?;
            let inv_map = LocalMap::replicate(Matrix::from_rows(inv_rows)?, n);
            let pulled = map_decomposition(&inv_map, &m_prime_dec)?.rescale(&lambda)?;
            let m = make_state(&FamilySpec::m(d, n))?;
            if !verify_decomposition(&m, &pulled)? {
                return Err(Error::BadSpec("M decomposition failed verification".into()));
            }
            Ok(pulled)
        }
    }
}

/// Apply a local map to every term; terms mapped to zero are dropped.
pub fn map_decomposition<S: Ring>(
    map: &LocalMap<S>,
    dec: &Decomposition<S>,
) -> Result<Decomposition<S>> {
    if map.arity() != dec.shape().arity() {
        return Err(Error::ArityMismatch(map.arity(), dec.shape().arity()));
    }
    for (i, m) in map.matrices().iter().enumerate() {
        if m.cols() != dec.shape().dim(i) {
            return Err(Error::DimMismatch(format!(
                "factor {i}: matrix has {} columns for dimension {}",
                m.cols(),
                dec.shape().dim(i)
            )));
        }
    }
    let dims: Vec<usize> = map.matrices().iter().map(|m| m.rows()).collect();
    let shape = Shape::new(dims)?;
    let mut terms = Vec::new();
    'terms: for term in dec.terms() {
        let mut vectors = Vec::with_capacity(term.vectors.len());
        for (i, v) in term.vectors.iter().enumerate() {
            let w = map.matrix(i).apply_vec(v)?;
            if w.iter().all(|c| c.is_zero()) {
                continue 'terms;
            }
            vectors.push(w);
        }
        terms.push(Term { scale: term.scale.clone(), vectors });
    }
    Decomposition::new(shape, terms)
}

/// Decomposition of a (x) b with |a| * |b| terms by concatenating the
/// vector lists.
pub fn tensor_product_decomposition<S: Ring>(
    a: &Decomposition<S>,
    b: &Decomposition<S>,
) -> Result<Decomposition<S>> {
    let mut dims = a.shape().dims().to_vec();
    dims.extend_from_slice(b.shape().dims());
    let shape = Shape::new(dims)?;
    let mut terms = Vec::with_capacity(a.len() * b.len());
    for ta in a.terms() {
        for tb in b.terms() {
            let mut vectors = ta.vectors.clone();
            vectors.extend(tb.vectors.iter().cloned());
            terms.push(Term { scale: ta.scale.mul(&tb.scale), vectors });
        }
    }
    Decomposition::new(shape, terms)
}

/// Turn a decomposition of a (x) b into one of a (kron) b by merging the
/// paired factor vectors with the Kronecker index convention; term count
/// is preserved, witnessing rank(a kron b) <= rank(a (x) b).
pub fn kron_merge_decomposition<S: Ring>(
    dec: &Decomposition<S>,
    arity_a: usize,
    dims_a: &[usize],
    dims_b: &[usize],
) -> Result<Decomposition<S>> {
    if dims_a.len() != arity_a || arity_a > dims_b.len() {
        return Err(Error::BadParams("inconsistent arities for the merge".into()));
    }
    if dec.shape().arity() != dims_a.len() + dims_b.len() {
        return Err(Error::ArityMismatch(dec.shape().arity(), dims_a.len() + dims_b.len()));
    }
    let mut dims: Vec<usize> = Vec::with_capacity(dims_b.len());
    for i in 0..arity_a {
        dims.push(dims_a[i] * dims_b[i]);
    }
    dims.extend_from_slice(&dims_b[arity_a..]);
    let shape = Shape::new(dims)?;
    let mut terms = Vec::with_capacity(dec.len());
    for term in dec.terms() {
        let mut vectors = Vec::with_capacity(dims_b.len());
        for i in 0..arity_a {
            let u = &term.vectors[i];
            let v = &term.vectors[arity_a + i];
            let mut merged = vec![S::zero(); u.len() * v.len()];
            for (j, x) in u.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (k, y) in v.iter().enumerate() {
                    merged[j * v.len() + k] = x.mul(y);
                }
            }
            vectors.push(merged);
        }
        for i in arity_a..dims_b.len() {
            vectors.push(term.vectors[arity_a + i].clone());
        }
        terms.push(Term { scale: term.scale.clone(), vectors });
    }
    Decomposition::new(shape, terms)
}

#[allow(unused)]
fn rational_term(scale: Rational) -> Cyclotomic {
    Cyclotomic::from_rational(scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Family;
    use crate::scalar::rat;

    #[test]
    fn ghz_definition_verifies() {
        let dec = decompose_ghz(5, 3).unwrap();
        assert_eq!(dec.len(), 5);
        let t = make_state(&FamilySpec::ghz(5, 3)).unwrap();
        assert!(verify_decomposition(&t, &dec).unwrap());
    }

    #[test]
    fn w_definition_verifies() {
        let dec = decompose_w(6).unwrap();
        assert_eq!(dec.len(), 6);
        assert!(verify_decomposition(&make_state(&FamilySpec::w(6)).unwrap(), &dec).unwrap());
    }

    #[test]
    fn n_definition_verifies() {
        let dec = decompose_n(3, 4).unwrap();
        assert_eq!(dec.len(), 7);
        assert!(
            verify_decomposition(&make_state(&FamilySpec::n_state(3, 4)).unwrap(), &dec).unwrap()
        );
    }

    #[test]
    fn incomplete_decomposition_fails_verification() {
        let w3 = make_state(&FamilySpec::w(3)).unwrap();
        let full = decompose_w(3).unwrap();
        let partial =
            Decomposition::new(full.shape().clone(), full.terms()[..2].to_vec()).unwrap();
        assert!(!verify_decomposition(&w3, &partial).unwrap());
    }

    #[test]
    fn l_decomposition_coefficients_follow_the_filter() {
        // independent oracle: the coefficient of |j...> in the expansion
        // is root_filter_sum(r, sum j - (d-1)) / r, which is the
        // indicator of sum j = d - 1 at these ranges
        for (d, n) in [(2, 3), (3, 3), (4, 5)] {
            let dec = decompose_l(d, n).unwrap();
            let r = (n - 1) * (d - 1) + 1;
            assert_eq!(dec.len(), r);
            let expansion = dec.expand();
            let l = make_state(&FamilySpec::l(d, n)).unwrap();
            assert_eq!(expansion, l);
            // spot-check the filter identity on a few index levels
            for s in 0..=(n * (d - 1)) as i64 {
                let filter = crate::scalar::root_filter_sum(r, s - (d as i64 - 1));
                let expect = if s == d as i64 - 1 { rat(r as i64) } else { rat(0) };
                assert_eq!(filter, expect);
            }
        }
    }

    #[test]
    fn l_at_d2_gives_a_symmetric_w_decomposition() {
        let dec = decompose_l(2, 5).unwrap();
        assert_eq!(dec.len(), 5);
        assert!(verify_decomposition(&make_state(&FamilySpec::w(5)).unwrap(), &dec).unwrap());
    }

    #[test]
    fn waring_examples() {
        // (1,1): W2 from two squares
        let dec = decompose_monomial_waring(1, 1).unwrap();
        assert_eq!(dec.len(), 2);
        assert!(verify_decomposition(&make_state(&FamilySpec::w(2)).unwrap(), &dec).unwrap());
        // (3,2): four terms against the five-qubit two-excitation Dicke
        let dec = decompose_monomial_waring(3, 2).unwrap();
        assert_eq!(dec.len(), 4);
        assert!(
            verify_decomposition(&make_state(&FamilySpec::dicke(5, 2)).unwrap(), &dec).unwrap()
        );
        // (n-2, 2) has n-1 terms
        for n in 4..=6 {
            assert_eq!(decompose_monomial_waring(n - 2, 2).unwrap().len(), n - 1);
        }
        assert!(decompose_monomial_waring(1, 2).is_err());
    }

    #[test]
    fn m_prime_counts_and_verification() {
        let dec = decompose_m(3, 4, MVariant::MPrime).unwrap();
        assert_eq!(dec.len(), 7);
        let dec = decompose_m(4, 3, MVariant::M).unwrap();
        assert_eq!(dec.len(), 3 * 3 - 2);
        let m = make_state(&FamilySpec::m(4, 3)).unwrap();
        assert!(verify_decomposition(&m, &dec).unwrap());
        // d = 2 leaves only the W part
        let dec = decompose_m(2, 4, MVariant::M).unwrap();
        assert_eq!(dec.len(), 4);
    }

    #[test]
    fn all_family_constructors_verify_in_range() {
        for d in 2..=5 {
            for n in 3..=5 {
                let l = decompose_l(d, n).unwrap();
                assert_eq!(l.len(), (n - 1) * (d - 1) + 1);
                let m = decompose_m(d, n, MVariant::M).unwrap();
                assert_eq!(m.len(), (n - 1) * (d - 1) + 1);
                let mp = decompose_m(d, n, MVariant::MPrime).unwrap();
                assert_eq!(mp.len(), (n - 1) * (d - 1) + 1);
                let nn = decompose_n(d, n).unwrap();
                assert_eq!(nn.len(), (n - 1) * (d - 1) + 1);
            }
        }
    }

    #[test]
    fn mapping_a_decomposition_tracks_the_tensor() {
        let w3 = make_state(&FamilySpec::w(3)).unwrap();
        let dec = decompose_w(3).unwrap();
        let id = LocalMap::identity(w3.shape());
        assert_eq!(map_decomposition(&id, &dec).unwrap(), dec);

        // rank-one projector on the first factor
        let proj = Matrix::from_rows(vec![
            vec![Cyclotomic::one(), Cyclotomic::zero()],
            vec![Cyclotomic::zero(), Cyclotomic::zero()],
        ])
        .unwrap();
        let mut mats = vec![Matrix::identity(2); 3];
        mats[0] = proj;
        let map = LocalMap::new(mats);
        let mapped = map_decomposition(&map, &dec).unwrap();
        let target = crate::tensor::slocc_apply(&w3, &map).unwrap();
        assert!(mapped.len() <= 3);
        assert!(verify_decomposition(&target, &mapped).unwrap());
    }

    #[test]
    fn product_and_merge_instantiate_the_rank_chain() {
        // rank(a kron b) <= rank(a (x) b) <= rank(a) rank(b) via verified
        // term counts
        let w3 = make_state(&FamilySpec::w(3)).unwrap();
        let dec_w = decompose_w(3).unwrap();
        let prod_dec = tensor_product_decomposition(&dec_w, &dec_w).unwrap();
        let prod = w3.tensor_product(&w3);
        assert!(verify_decomposition(&prod, &prod_dec).unwrap());
        assert_eq!(prod_dec.len(), 9);

        let merged = kron_merge_decomposition(&prod_dec, 3, &[2, 2, 2], &[2, 2, 2]).unwrap();
        let kron = w3.kronecker_product(&w3).unwrap();
        assert!(verify_decomposition(&kron, &merged).unwrap());
        assert!(merged.len() <= prod_dec.len());
        // and the optimized M(4, n) decomposition beats the generic 9
        let better = decompose_m(4, 3, MVariant::M).unwrap();
        assert_eq!(make_state(&FamilySpec::m(4, 3)).unwrap(), kron);
        assert!(better.len() < merged.len());
        assert_eq!(Family::from_name("m"), Some(Family::M));
    }
}
