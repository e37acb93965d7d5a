//! Constructors for the named tensor families and the change of basis
//! connecting the two versions of the M family.
//!
//! Symmetrization sums are always expanded as sums over *distinct*
//! permutation images, so every listed basis vector carries coefficient
//! one; this matches the explicit second-line expansions of the family
//! definitions.

use crate::scalar::{Cyclotomic, Rational};
use crate::tensor::{slocc_apply, LocalMap, Matrix, MultiIndex, Shape, Tensor};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Ghz,
    W,
    Dicke,
    L,
    M,
    MPrime,
    N,
    NPrime,
    Y,
    NonSym4,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Ghz => "ghz",
            Family::W => "w",
            Family::Dicke => "dicke",
            Family::L => "l",
            Family::M => "m",
            Family::MPrime => "mprime",
            Family::N => "n",
            Family::NPrime => "nprime",
            Family::Y => "y",
            Family::NonSym4 => "nonsym4",
        }
    }

    pub fn from_name(name: &str) -> Option<Family> {
        Some(match name {
            "ghz" => Family::Ghz,
            "w" => Family::W,
            "dicke" => Family::Dicke,
            "l" => Family::L,
            "m" => Family::M,
            "mprime" => Family::MPrime,
            "n" => Family::N,
            "nprime" => Family::NPrime,
            "y" => Family::Y,
            "nonsym4" => Family::NonSym4,
            _ => return None,
        })
    }
}

/// Parameters selecting one member of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub d: usize,
    pub n: usize,
    /// excitation count, Dicke only
    pub excitations: Option<usize>,
    /// NonSym4 only
    pub alpha: Option<Rational>,
    pub beta: Option<Rational>,
    pub plus_sign: bool,
}

impl FamilySpec {
    pub fn new(family: Family, d: usize, n: usize) -> Self {
        FamilySpec { family, d, n, excitations: None, alpha: None, beta: None, plus_sign: true }
    }

    pub fn ghz(d: usize, n: usize) -> Self {
        Self::new(Family::Ghz, d, n)
    }

    pub fn w(n: usize) -> Self {
        Self::new(Family::W, 2, n)
    }

    pub fn dicke(n: usize, l: usize) -> Self {
        let mut s = Self::new(Family::Dicke, 2, n);
        s.excitations = Some(l);
        s
    }

    pub fn l(d: usize, n: usize) -> Self {
        Self::new(Family::L, d, n)
    }

    pub fn m(d: usize, n: usize) -> Self {
        Self::new(Family::M, d, n)
    }

    pub fn m_prime(d: usize, n: usize) -> Self {
        Self::new(Family::MPrime, d, n)
    }

    pub fn n_state(d: usize, n: usize) -> Self {
        Self::new(Family::N, d, n)
    }

    pub fn n_prime(d: usize, n: usize) -> Self {
        Self::new(Family::NPrime, d, n)
    }

    pub fn y(n: usize) -> Self {
        Self::new(Family::Y, 3, n)
    }

    pub fn nonsym4(alpha: Rational, beta: Rational, plus_sign: bool) -> Self {
        let mut s = Self::new(Family::NonSym4, 2, 4);
        s.alpha = Some(alpha);
        s.beta = Some(beta);
        s.plus_sign = plus_sign;
        s
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::BadSpec(msg));
        if self.d < 2 || self.n < 2 {
            return bad(format!("d = {} and n = {} must both be at least 2", self.d, self.n));
        }
        match self.family {
            Family::Dicke => {
                let l = self
                    .excitations
                    .ok_or_else(|| Error::BadSpec("dicke requires an excitation count".into()))?;
                if self.d != 2 {
                    return bad("dicke states are multiqubit (d = 2)".into());
                }
                if l > self.n {
                    return bad(format!("excitations {l} exceed arity {}", self.n));
                }
            }
            Family::W => {
                if self.d != 2 {
                    return bad("the W state is multiqubit (d = 2)".into());
                }
            }
            Family::Y => {
                if self.d != 3 {
                    return bad("the Y state is the qutrit case d = 3".into());
                }
            }
            Family::NonSym4 => {
                if self.d != 2 || self.n != 4 {
                    return bad("the nonsymmetric example is a four-qubit state".into());
                }
                if self.alpha.is_none() || self.beta.is_none() {
                    return bad("nonsym4 requires alpha and beta".into());
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Diagonal tensor sum_j |j...j>, allowing d = 1 (used internally when a
/// decomposition has a single term).
pub(crate) fn ghz_tensor(d: usize, n: usize) -> Tensor<Cyclotomic> {
    let mut t = Tensor::zero(Shape::uniform(d, n).expect("valid GHZ shape"));
    for j in 0..d {
        t.add_entry(vec![j; n], Cyclotomic::one()).expect("in shape");
    }
    t
}

fn ones_entry(n: usize) -> MultiIndex {
    vec![0usize; n]
}

/// Build the tensor selected by the spec, with every listed basis vector
/// carrying coefficient one (except the nonsymmetric four-qubit example,
/// whose coefficients are supplied).
pub fn make_state(spec: &FamilySpec) -> Result<Tensor<Cyclotomic>> {
    spec.validate()?;
    let one = Cyclotomic::one;
    let (d, n) = (spec.d, spec.n);
    let mut entries: Vec<(MultiIndex, Cyclotomic)> = Vec::new();
    match spec.family {
        Family::Ghz => {
            return Ok(ghz_tensor(d, n));
        }
        Family::W => {
            for pos in 0..n {
                let mut idx = ones_entry(n);
                idx[pos] = 1;
                entries.push((idx, one()));
            }
        }
        Family::Dicke => {
            let l = spec.excitations.unwrap();
            for mask in 0u64..(1 << n) {
                if mask.count_ones() as usize != l {
                    continue;
                }
                let idx: MultiIndex = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
                entries.push((idx, one()));
            }
        }
        Family::L | Family::Y => {
            let mut idx = ones_entry(n);
            compositions(d - 1, n, 0, &mut idx, &mut |idx| entries.push((idx.to_vec(), one())));
        }
        Family::M => {
            for pos in 0..n {
                let mut idx = ones_entry(n);
                idx[pos] = d - 1;
                entries.push((idx, one()));
            }
            for a in 0..n {
                for b in a + 1..n {
                    for j in 1..=d.saturating_sub(2) {
                        let mut idx = ones_entry(n);
                        idx[a] = j;
                        idx[b] = d - 1 - j;
                        entries.push((idx, one()));
                    }
                }
            }
        }
        Family::MPrime => {
            for pos in 0..n {
                let mut idx = ones_entry(n);
                idx[pos] = d - 1;
                entries.push((idx, one()));
            }
            for a in 0..n {
                for b in a + 1..n {
                    for j in 1..=d.saturating_sub(2) {
                        let mut idx = ones_entry(n);
                        idx[a] = j;
                        idx[b] = j;
                        entries.push((idx, one()));
                    }
                }
            }
        }
        Family::N => {
            let mut head = ones_entry(n);
            head[n - 1] = d - 1;
            entries.push((head, one()));
            for pos in 0..n - 1 {
                for j in 1..d {
                    let mut idx = ones_entry(n);
                    idx[pos] = j;
                    idx[n - 1] = d - 1 - j;
                    entries.push((idx, one()));
                }
            }
        }
        Family::NPrime => {
            entries.push((ones_entry(n), one()));
            for pos in 0..n - 1 {
                for j in 1..d {
                    let mut idx = ones_entry(n);
                    idx[pos] = j;
                    idx[n - 1] = j;
                    entries.push((idx, one()));
                }
            }
        }
        Family::NonSym4 => {
            let alpha = spec.alpha.clone().unwrap();
            let beta = spec.beta.clone().unwrap();
            let gamma = if spec.plus_sign { &alpha + &beta } else { &alpha - &beta };
            let sq = |q: &Rational| Cyclotomic::from_rational(q * q);
            entries.push((vec![0, 0, 1, 1], sq(&alpha)));
            entries.push((vec![0, 1, 0, 1], sq(&beta)));
            entries.push((vec![0, 1, 1, 0], sq(&gamma)));
            entries.push((vec![1, 0, 0, 1], one()));
            entries.push((vec![1, 0, 1, 0], one()));
            entries.push((vec![1, 1, 0, 0], one()));
        }
    }
    Tensor::build(Shape::uniform(d, n)?, entries)
}

/// Visit all weak compositions of `total` into the remaining slots.
fn compositions(
    total: usize,
    n: usize,
    slot: usize,
    idx: &mut MultiIndex,
    visit: &mut impl FnMut(&MultiIndex),
) {
    if slot == n - 1 {
        idx[slot] = total;
        visit(idx);
        idx[slot] = 0;
        return;
    }
    for v in 0..=total {
        idx[slot] = v;
        compositions(total - v, n, slot + 1, idx, visit);
    }
    idx[slot] = 0;
}

/// Per-factor change of basis sending M(d, n) to a nonzero scalar
/// multiple of M'(d, n), entirely inside Q(i).
///
/// For d <= 3 the two versions coincide and the map is the identity.
/// For even d the plane {|j>, |d-j-1>} is mapped by |j> -> |j> + i|k>,
/// |k> -> |j> - i|k> and |d-1> is doubled, giving the global scalar 2.
/// Odd d >= 5 has a fixed middle level, which rules the doubled variant
/// out over Q(i); there the plane map |j> -> i|j> + |k>,
/// |k> -> -(i/2)|j> + (1/2)|k> sends |jk> + |kj> to exactly |jj> + |kk>
/// and everything outside the planes stays fixed (global scalar 1).
pub fn m_basis_change_matrix(d: usize) -> Result<Matrix<Cyclotomic>> {
    if d < 2 {
        return Err(Error::BadDim(format!("basis change needs d >= 2, got {d}")));
    }
    let mut m = Matrix::identity(d);
    if d <= 3 {
        return Ok(m);
    }
    let i_unit = Cyclotomic::root(4, 1);
    let half = Cyclotomic::from_rational(crate::scalar::rat_frac(1, 2));
    for j in 1..=(d - 2) / 2 {
        let k = d - 1 - j;
        if d % 2 == 0 {
            // column j is the image of |j>, column k the image of |k>
            *m.at_mut(j, j) = Cyclotomic::one();
            *m.at_mut(k, j) = i_unit.clone();
            *m.at_mut(j, k) = Cyclotomic::one();
            *m.at_mut(k, k) = i_unit.neg();
        } else {
            *m.at_mut(j, j) = i_unit.clone();
            *m.at_mut(k, j) = Cyclotomic::one();
            *m.at_mut(j, k) = i_unit.neg().mul(&half);
            *m.at_mut(k, k) = half.clone();
        }
    }
    if d % 2 == 0 {
        *m.at_mut(d - 1, d - 1) = Cyclotomic::from_int(2);
    }
    Ok(m)
}

/// The basis change replicated over all n factors.
pub fn m_basis_change(d: usize, n: usize) -> Result<LocalMap<Cyclotomic>> {
    Ok(LocalMap::replicate(m_basis_change_matrix(d)?, n))
}

/// The nonzero scalar lambda with (basis change applied to M) equal to
/// lambda * M'; verified exactly.
pub fn m_basis_change_scalar(d: usize, n: usize) -> Result<Cyclotomic> {
    let m = make_state(&FamilySpec::m(d, n))?;
    let mp = make_state(&FamilySpec::m_prime(d, n))?;
    let mapped = slocc_apply(&m, &m_basis_change(d, n)?)?;
    mapped
        .proportional_to(&mp)
        .ok_or_else(|| Error::BadSpec("basis change does not relate the two M versions".into()))
}

/// Try to identify a tensor as one of the named families on its shape.
pub fn recognize(t: &Tensor<Cyclotomic>) -> Option<FamilySpec> {
    let dims = t.shape().dims();
    let n = dims.len();
    if n < 2 {
        return None;
    }
    let d = dims[0];
    if dims.iter().any(|&x| x != d) || d < 2 {
        return None;
    }
    let mut candidates = vec![
        FamilySpec::ghz(d, n),
        FamilySpec::l(d, n),
        FamilySpec::m(d, n),
        FamilySpec::m_prime(d, n),
        FamilySpec::n_state(d, n),
        FamilySpec::n_prime(d, n),
    ];
    if d == 2 {
        candidates.push(FamilySpec::w(n));
        for l in 0..=n {
            candidates.push(FamilySpec::dicke(n, l));
        }
    }
    candidates.into_iter().find(|spec| match make_state(spec) {
        Ok(state) => &state == t,
        Err(_) => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn y3_is_the_listed_six_terms() {
        let y = make_state(&FamilySpec::y(3)).unwrap();
        let expected = [
            vec![0, 0, 2],
            vec![0, 2, 0],
            vec![2, 0, 0],
            vec![0, 1, 1],
            vec![1, 0, 1],
            vec![1, 1, 0],
        ];
        assert_eq!(y.nnz(), 6);
        for idx in expected {
            assert_eq!(y.coeff(&idx), Cyclotomic::one());
        }
        assert_eq!(y, make_state(&FamilySpec::l(3, 3)).unwrap());
    }

    #[test]
    fn qubit_families_collapse_to_w() {
        for n in 2..=6 {
            let w = make_state(&FamilySpec::w(n)).unwrap();
            assert_eq!(make_state(&FamilySpec::l(2, n)).unwrap(), w);
            assert_eq!(make_state(&FamilySpec::m(2, n)).unwrap(), w);
            assert_eq!(make_state(&FamilySpec::n_state(2, n)).unwrap(), w);
            assert_eq!(make_state(&FamilySpec::dicke(n, 1)).unwrap(), w);
        }
    }

    #[test]
    fn n_state_has_the_expected_entry_count() {
        for d in 2..=5 {
            for n in 2..=6 {
                let t = make_state(&FamilySpec::n_state(d, n)).unwrap();
                assert_eq!(t.nnz(), (n - 1) * (d - 1) + 1, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn supports_live_in_the_expected_simplex() {
        for d in 2..=5usize {
            for n in 2..=6usize {
                let l = make_state(&FamilySpec::l(d, n)).unwrap();
                assert!(l.support().all(|idx| idx.iter().sum::<usize>() == d - 1));
                let m = make_state(&FamilySpec::m(d, n)).unwrap();
                assert!(m.support().all(|idx| idx.iter().sum::<usize>() <= d - 1));
                let nn = make_state(&FamilySpec::n_state(d, n)).unwrap();
                assert!(nn.support().all(|idx| idx.iter().sum::<usize>() <= d - 1));
            }
        }
    }

    #[test]
    fn families_are_concise() {
        for d in 2..=5usize {
            for n in [3usize, 4] {
                for spec in [
                    FamilySpec::l(d, n),
                    FamilySpec::m(d, n),
                    FamilySpec::m_prime(d, n),
                    FamilySpec::n_state(d, n),
                    FamilySpec::n_prime(d, n),
                ] {
                    let t = make_state(&spec).unwrap();
                    assert!(t.multilinear_profile().all_concise(), "{spec:?}");
                }
            }
        }
    }

    #[test]
    fn kronecker_square_of_w_is_m4() {
        for n in 3..=5 {
            let w = make_state(&FamilySpec::w(n)).unwrap();
            let ww = w.kronecker_product(&w).unwrap();
            assert_eq!(ww, make_state(&FamilySpec::m(4, n)).unwrap());
        }
    }

    #[test]
    fn basis_change_small_d_is_identity() {
        let m = m_basis_change_matrix(3).unwrap();
        assert_eq!(m, Matrix::identity(3));
    }

    #[test]
    fn basis_change_relates_m_and_m_prime() {
        // even d: global scalar 2
        assert_eq!(m_basis_change_scalar(4, 3).unwrap(), Cyclotomic::from_int(2));
        assert_eq!(m_basis_change_scalar(4, 4).unwrap(), Cyclotomic::from_int(2));
        // d = 3: the versions are equal
        assert_eq!(m_basis_change_scalar(3, 4).unwrap(), Cyclotomic::one());
        // odd d >= 5: scalar 1, planes transformed, everything else fixed
        assert_eq!(m_basis_change_scalar(5, 3).unwrap(), Cyclotomic::one());
        let mat = m_basis_change_matrix(5).unwrap();
        for fixed in [0usize, 2, 4] {
            for r in 0..5 {
                let expect = if r == fixed { Cyclotomic::one() } else { Cyclotomic::zero() };
                assert_eq!(*mat.at(r, fixed), expect);
            }
        }
        assert!(!mat.at(3, 1).is_zero());
    }

    #[test]
    fn nonsym4_coefficients() {
        let t = make_state(&FamilySpec::nonsym4(rat(1), rat(2), true)).unwrap();
        assert_eq!(t.coeff(&[0, 0, 1, 1]), Cyclotomic::from_int(1));
        assert_eq!(t.coeff(&[0, 1, 0, 1]), Cyclotomic::from_int(4));
        assert_eq!(t.coeff(&[0, 1, 1, 0]), Cyclotomic::from_int(9));
        assert_eq!(t.coeff(&[1, 1, 0, 0]), Cyclotomic::one());
        // alpha = beta with the minus sign drops the (alpha - beta)^2 term
        let degenerate = make_state(&FamilySpec::nonsym4(rat(1), rat(1), false)).unwrap();
        assert_eq!(degenerate.nnz(), 5);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(make_state(&FamilySpec::ghz(1, 3)).is_err());
        assert!(make_state(&FamilySpec::dicke(3, 5)).is_err());
        let mut y = FamilySpec::y(4);
        y.d = 4;
        assert!(make_state(&y).is_err());
    }

    #[test]
    fn recognition_round_trips() {
        for spec in [
            FamilySpec::ghz(3, 4),
            FamilySpec::l(4, 3),
            FamilySpec::m(4, 4),
            FamilySpec::n_prime(3, 3),
            FamilySpec::w(5),
            FamilySpec::dicke(4, 2),
        ] {
            let t = make_state(&spec).unwrap();
            let found = recognize(&t).unwrap();
            assert_eq!(make_state(&found).unwrap(), t);
        }
        let random = Tensor::build(
            Shape::uniform(2, 3).unwrap(),
            vec![(vec![0, 0, 0], Cyclotomic::from_int(3)), (vec![1, 1, 0], Cyclotomic::one())],
        )
        .unwrap();
        assert!(recognize(&random).is_none());
    }
}
