//! Sparse multipartite tensors over exact scalars, with the products,
//! contractions, flattenings, and exact rank computations everything
//! else is built on.
//!
//! Conventions fixed here and relied on by the file formats:
//! - factors are indexed from 0;
//! - the Kronecker product pairs factor i of both operands and
//!   linearizes the index pair (j, j') as j * d'_i + j';
//! - flattening rows/columns are ordered lexicographically in the
//!   original index order.

mod rank;

pub use rank::{invert_matrix, matrix_rank, solve_linear};

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::scalar::{Cyclotomic, EpsLaurent, Field, Ring};
use crate::{Error, Result};

pub type MultiIndex = Vec<usize>;

/// Tuple of local dimensions (d_1, ..., d_n), n >= 1, every d_i >= 1.
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::BadDim(format!("invalid shape {dims:?}")));
        }
        Ok(Shape { dims })
    }

    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Shape::new(vec![d; n])
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn contains(&self, idx: &[usize]) -> bool {
        idx.len() == self.dims.len() && idx.iter().zip(&self.dims).all(|(j, d)| j < d)
    }
}

/// Sparse tensor: map from multi-index to nonzero scalar.
#[derive(Clone, Debug)]
pub struct Tensor<S: Ring> {
    shape: Shape,
    entries: BTreeMap<MultiIndex, S>,
}

impl<S: Ring> PartialEq for Tensor<S> {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.entries == other.entries
    }
}

impl<S: Ring> Tensor<S> {
    pub fn zero(shape: Shape) -> Self {
        Tensor { shape, entries: BTreeMap::new() }
    }

    /// Canonical sparse form: duplicate indices are summed, zero values
    /// dropped.
    pub fn build(shape: Shape, entries: Vec<(MultiIndex, S)>) -> Result<Self> {
        let mut t = Tensor::zero(shape);
        for (idx, val) in entries {
            t.add_entry(idx, val)?;
        }
        Ok(t)
    }

    pub fn add_entry(&mut self, idx: MultiIndex, val: S) -> Result<()> {
        if !self.shape.contains(&idx) {
            return Err(Error::IndexOutOfShape { idx, shape: self.shape.dims.clone() });
        }
        if val.is_zero() {
            return Ok(());
        }
        match self.entries.get_mut(&idx) {
            Some(cur) => {
                *cur = cur.add(&val);
                if cur.is_zero() {
                    self.entries.remove(&idx);
                }
            }
            None => {
                self.entries.insert(idx, val);
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn arity(&self) -> usize {
        self.shape.arity()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.entries.iter()
    }

    pub fn coeff(&self, idx: &[usize]) -> S {
        self.entries.get(idx).cloned().unwrap_or_else(S::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> {
        self.entries.keys()
    }

    pub fn map_scalars<T: Ring>(&self, f: impl Fn(&S) -> T) -> Tensor<T> {
        let mut entries = BTreeMap::new();
        for (idx, v) in &self.entries {
            let w = f(v);
            if !w.is_zero() {
                entries.insert(idx.clone(), w);
            }
        }
        Tensor { shape: self.shape.clone(), entries }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map_scalars(|v| v.mul(s))
    }

    pub fn neg(&self) -> Self {
        self.map_scalars(|v| v.neg())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape.dims, other.shape.dims
            )));
        }
        let mut out = self.clone();
        for (idx, v) in &other.entries {
            out.add_entry(idx.clone(), v.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Tensor product: shapes concatenate, entry (i, j) = a(i) * b(j).
    pub fn tensor_product(&self, other: &Self) -> Self {
        let mut dims = self.shape.dims.clone();
        dims.extend_from_slice(&other.shape.dims);
        let shape = Shape::new(dims).expect("concatenated shape is valid");
        let mut entries = BTreeMap::new();
        for (ia, va) in &self.entries {
            for (ib, vb) in &other.entries {
                let v = va.mul(vb);
                if v.is_zero() {
                    continue;
                }
                let mut idx = ia.clone();
                idx.extend_from_slice(ib);
                entries.insert(idx, v);
            }
        }
        Tensor { shape, entries }
    }

    /// Kronecker product: the first arity(self) factors pair up, factor i
    /// getting dimension d_i * d'_i with (j, j') linearized as
    /// j * d'_i + j'; unpaired trailing factors of `other` pass through.
    pub fn kronecker_product(&self, other: &Self) -> Result<Self> {
        let n1 = self.arity();
        let n2 = other.arity();
        if n1 > n2 {
            return Err(Error::ArityMismatch(n1, n2));
        }
        let mut dims = Vec::with_capacity(n2);
        for i in 0..n1 {
            dims.push(self.shape.dim(i) * other.shape.dim(i));
        }
        dims.extend_from_slice(&other.shape.dims[n1..]);
        let shape = Shape::new(dims)?;
        let mut out = Tensor::zero(shape);
        for (ia, va) in &self.entries {
            for (ib, vb) in &other.entries {
                let v = va.mul(vb);
                if v.is_zero() {
                    continue;
                }
                let mut idx = Vec::with_capacity(n2);
                for i in 0..n1 {
                    idx.push(ia[i] * other.shape.dim(i) + ib[i]);
                }
                idx.extend_from_slice(&ib[n1..]);
                out.add_entry(idx, v)?;
            }
        }
        Ok(out)
    }

    /// Direct sum: dimensions add per factor, self occupying the low
    /// index block and other the high block.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let n = self.arity();
        if n != other.arity() {
            return Err(Error::ArityMismatch(n, other.arity()));
        }
        let dims: Vec<usize> = (0..n).map(|i| self.shape.dim(i) + other.shape.dim(i)).collect();
        let shape = Shape::new(dims)?;
        let mut entries = BTreeMap::new();
        for (idx, v) in &self.entries {
            entries.insert(idx.clone(), v.clone());
        }
        for (idx, v) in &other.entries {
            let shifted: MultiIndex =
                idx.iter().enumerate().map(|(i, j)| j + self.shape.dim(i)).collect();
            entries.insert(shifted, v.clone());
        }
        Ok(Tensor { shape, entries })
    }

    /// Contract factor `factor` with the covector f: the arity drops by
    /// one and the result is linear in f.
    pub fn contract(&self, factor: usize, f: &CoVector<S>) -> Result<Self> {
        let n = self.arity();
        if factor >= n || n < 2 {
            return Err(Error::DimMismatch(format!("cannot contract factor {factor} of arity {n}")));
        }
        if f.dim() != self.shape.dim(factor) {
            return Err(Error::DimMismatch(format!(
                "covector dim {} vs factor dim {}",
                f.dim(),
                self.shape.dim(factor)
            )));
        }
        let mut dims = self.shape.dims.clone();
        dims.remove(factor);
        let mut out = Tensor::zero(Shape::new(dims)?);
        for (idx, v) in &self.entries {
            let w = f.coeffs[idx[factor]].mul(v);
            if w.is_zero() {
                continue;
            }
            let mut reduced = idx.clone();
            reduced.remove(factor);
            out.add_entry(reduced, w)?;
        }
        Ok(out)
    }

    /// Matrix of the flattening with row group S and column group the
    /// complement, both ordered lexicographically in the original factor
    /// order.
    pub fn flatten(&self, part: &Bipartition) -> Vec<Vec<S>> {
        let rows_axes: Vec<usize> = part.members().iter().copied().collect();
        let cols_axes: Vec<usize> = part.complement_members();
        let rows: usize = rows_axes.iter().map(|&i| self.shape.dim(i)).product();
        let cols: usize = cols_axes.iter().map(|&i| self.shape.dim(i)).product();
        let mut m = vec![vec![S::zero(); cols]; rows];
        for (idx, v) in &self.entries {
            let mut r = 0usize;
            for &i in &rows_axes {
                r = r * self.shape.dim(i) + idx[i];
            }
            let mut c = 0usize;
            for &i in &cols_axes {
                c = c * self.shape.dim(i) + idx[i];
            }
            m[r][c] = v.clone();
        }
        m
    }
}

impl<S: Field> Tensor<S> {
    /// Exact rank of the flattening matrix for the given bipartition,
    /// by fraction-free elimination.
    pub fn schmidt_rank(&self, part: &Bipartition) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroTensor);
        }
        if part.arity() != self.arity() {
            return Err(Error::ArityMismatch(part.arity(), self.arity()));
        }
        Ok(matrix_rank(self.flatten(part)))
    }

    /// Mode-i flattening ranks together with the conciseness flags
    /// rank_i == d_i. The tensor is concise iff all flags are true.
    pub fn multilinear_profile(&self) -> MultilinearProfile {
        let n = self.arity();
        let mut ranks = Vec::with_capacity(n);
        let mut concise = Vec::with_capacity(n);
        for i in 0..n {
            let rank = if n == 1 {
                usize::from(!self.is_zero())
            } else {
                let part = Bipartition::new(n, [i].into_iter().collect()).expect("single-factor cut");
                matrix_rank(self.flatten(&part))
            };
            ranks.push(rank);
            concise.push(rank == self.shape.dim(i));
        }
        MultilinearProfile { ranks, concise }
    }

    /// Scalar lambda with self == lambda * other, when one exists.
    pub fn proportional_to(&self, other: &Self) -> Option<S> {
        if self.shape != other.shape || self.entries.len() != other.entries.len() {
            return None;
        }
        if other.is_zero() {
            return None;
        }
        let (idx0, w0) = other.entries.iter().next().unwrap();
        let v0 = self.entries.get(idx0)?;
        let lambda = v0.div(w0).ok()?;
        if lambda.is_zero() {
            return None;
        }
        for (idx, w) in &other.entries {
            let v = self.entries.get(idx)?;
            if *v != lambda.mul(w) {
                return None;
            }
        }
        Some(lambda)
    }
}

impl Tensor<Cyclotomic> {
    pub fn to_eps(&self) -> Tensor<EpsLaurent> {
        self.map_scalars(|c| EpsLaurent::from_cyc(c.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearProfile {
    pub ranks: Vec<usize>,
    pub concise: Vec<bool>,
}

impl MultilinearProfile {
    pub fn all_concise(&self) -> bool {
        self.concise.iter().all(|&b| b)
    }
}

/// Dense covector on one factor.
#[derive(Clone, Debug, PartialEq)]
pub struct CoVector<S: Ring> {
    coeffs: Vec<S>,
}

impl<S: Ring> CoVector<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty());
        CoVector { coeffs }
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut coeffs = vec![S::zero(); dim];
        coeffs[k] = S::one();
        CoVector { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Pairing with a dense vector of the same dimension.
    pub fn apply(&self, v: &[S]) -> S {
        let mut acc = S::zero();
        for (c, x) in self.coeffs.iter().zip(v) {
            acc = acc.add(&c.mul(x));
        }
        acc
    }
}

/// Unordered cut S | complement of the factor set {0, ..., n-1}; S must
/// be nonempty and proper.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bipartition {
    n: usize,
    members: BTreeSet<usize>,
}

impl Bipartition {
    pub fn new(n: usize, members: BTreeSet<usize>) -> Result<Self> {
        if members.is_empty() || members.len() >= n || members.iter().any(|&i| i >= n) {
            return Err(Error::BadParams(format!(
                "bipartition {members:?} of {n} factors must be nonempty and proper"
            )));
        }
        Ok(Bipartition { n, members })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn complement_members(&self) -> Vec<usize> {
        (0..self.n).filter(|i| !self.members.contains(i)).collect()
    }

    /// All unordered cuts, canonicalized as the side containing factor 0.
    pub fn all(n: usize) -> Vec<Bipartition> {
        let mut out = Vec::new();
        for mask in 1u64..(1u64 << (n - 1)) {
            let mut members = BTreeSet::new();
            members.insert(0usize);
            for i in 1..n {
                if mask >> (i - 1) & 1 == 1 {
                    members.insert(i);
                }
            }
            if members.len() < n {
                out.push(Bipartition { n, members });
            }
        }
        // the singleton {0} corresponds to mask 0 in the loop above
        let mut members = BTreeSet::new();
        members.insert(0usize);
        out.push(Bipartition { n, members });
        out.sort();
        out.dedup();
        out
    }
}

/// Dense matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S: Ring> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Ring> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch(format!(
                "matrix data length {} vs {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimMismatch("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut S {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.at(r, c).add(&a.mul(b));
                    *out.at_mut(r, c) = v;
                }
            }
        }
        Ok(out)
    }

    /// Image of a dense column vector.
    pub fn apply_vec(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.cols {
            return Err(Error::DimMismatch(format!("vector len {} vs cols {}", v.len(), self.cols)));
        }
        let mut out = vec![S::zero(); self.rows];
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = self.at(r, c);
                if a.is_zero() || v[c].is_zero() {
                    continue;
                }
                out[r] = out[r].add(&a.mul(&v[c]));
            }
        }
        Ok(out)
    }
}

/// One linear map per factor; matrix i must have d_i columns when
/// applied to a tensor with local dimensions d_i.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalMap<S: Ring> {
    matrices: Vec<Matrix<S>>,
}

impl<S: Ring> LocalMap<S> {
    pub fn new(matrices: Vec<Matrix<S>>) -> Self {
        assert!(!matrices.is_empty());
        LocalMap { matrices }
    }

    /// The same matrix on every one of n factors.
    pub fn replicate(matrix: Matrix<S>, n: usize) -> Self {
        LocalMap { matrices: vec![matrix; n] }
    }

    pub fn identity(shape: &Shape) -> Self {
        LocalMap { matrices: shape.dims().iter().map(|&d| Matrix::identity(d)).collect() }
    }

    pub fn arity(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrix(&self, i: usize) -> &Matrix<S> {
        &self.matrices[i]
    }

    pub fn matrices(&self) -> &[Matrix<S>] {
        &self.matrices
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T + Copy) -> LocalMap<T> {
        LocalMap { matrices: self.matrices.iter().map(|m| m.map(f)).collect() }
    }

    /// Composition applying `self` first and `then` second.
    pub fn then(&self, then: &LocalMap<S>) -> Result<LocalMap<S>> {
        if self.arity() != then.arity() {
            return Err(Error::ArityMismatch(self.arity(), then.arity()));
        }
        let mut mats = Vec::with_capacity(self.arity());
        for (a, b) in self.matrices.iter().zip(&then.matrices) {
            mats.push(b.matmul(a)?);
        }
        Ok(LocalMap { matrices: mats })
    }
}

/// Apply one linear map per factor, exactly.
pub fn slocc_apply<S: Ring>(t: &Tensor<S>, map: &LocalMap<S>) -> Result<Tensor<S>> {
    let n = t.arity();
    if map.arity() != n {
        return Err(Error::ArityMismatch(map.arity(), n));
    }
    for (i, m) in map.matrices().iter().enumerate() {
        if m.cols() != t.shape().dim(i) {
            return Err(Error::DimMismatch(format!(
                "factor {i}: matrix is {}x{} but local dimension is {}",
                m.rows(),
                m.cols(),
                t.shape().dim(i)
            )));
        }
    }
    let mut cur = t.clone();
    for i in 0..n {
        let m = map.matrix(i);
        let mut dims = cur.shape().dims().to_vec();
        dims[i] = m.rows();
        let mut next = Tensor::zero(Shape::new(dims)?);
        for (idx, v) in cur.entries() {
            for r in 0..m.rows() {
                let a = m.at(r, idx[i]);
                if a.is_zero() {
                    continue;
                }
                let w = a.mul(v);
                if w.is_zero() {
                    continue;
                }
                let mut out_idx = idx.clone();
                out_idx[i] = r;
                next.add_entry(out_idx, w)?;
            }
        }
        cur = next;
    }
    Ok(cur)
}
