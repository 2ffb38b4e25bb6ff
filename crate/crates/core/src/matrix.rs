//! Dense matrices over the cyclotomic ring or a prime field, with projective
//! comparison (equality up to one global invertible scalar).

use std::fmt;

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::ring::{CycElem, Fq, RingSpec};

/// A coefficient domain: the context carries whatever the elements need.
pub trait Scalars: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

impl Scalars for RingSpec {
    type Elem = CycElem;
    fn zero(&self) -> CycElem {
        RingSpec::zero(self)
    }
    fn one(&self) -> CycElem {
        RingSpec::one(self)
    }
    fn add(&self, a: &CycElem, b: &CycElem) -> CycElem {
        a + b
    }
    fn mul(&self, a: &CycElem, b: &CycElem) -> CycElem {
        a * b
    }
    fn neg(&self, a: &CycElem) -> CycElem {
        -a
    }
    fn is_zero(&self, a: &CycElem) -> bool {
        a.is_zero()
    }
}

impl Scalars for Fq {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        Fq::add(self, *a, *b)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        Fq::mul(self, *a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        Fq::neg(self, *a)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// Row-major matrix. Square matrices are read projectively by [`PMatrix::proj_equal`].
#[derive(Clone, PartialEq)]
pub struct PMatrix<R: Scalars> {
    scalars: R,
    rows: usize,
    cols: usize,
    data: Vec<R::Elem>,
}

pub type CycMatrix = PMatrix<RingSpec>;
pub type FqMatrix = PMatrix<Fq>;

impl<R: Scalars> PMatrix<R> {
    pub fn zeros(scalars: &R, rows: usize, cols: usize) -> Self {
        PMatrix {
            scalars: scalars.clone(),
            rows,
            cols,
            data: vec![scalars.zero(); rows * cols],
        }
    }

    pub fn identity(scalars: &R, n: usize) -> Self {
        let mut m = Self::zeros(scalars, n, n);
        for i in 0..n {
            m.data[i * n + i] = scalars.one();
        }
        m
    }

    pub fn from_rows(scalars: &R, rows: Vec<Vec<R::Elem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        PMatrix {
            scalars: scalars.clone(),
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn diagonal(scalars: &R, diag: Vec<R::Elem>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(scalars, n, n);
        for (i, d) in diag.into_iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn scalars(&self) -> &R {
        &self.scalars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[R::Elem] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[R::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<R::Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let s = &self.scalars;
        let mut out = Self::zeros(s, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if s.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if s.is_zero(b) {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = s.add(&out.data[idx], &s.mul(a, b));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[R::Elem]) -> Vec<R::Elem> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        let s = &self.scalars;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !s.is_zero(a) && !s.is_zero(b))
                    .fold(s.zero(), |acc, (a, b)| s.add(&acc, &s.mul(a, b)))
            })
            .collect()
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let s = &self.scalars;
        PMatrix {
            scalars: s.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| s.mul(c, x)).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::identity(&self.scalars, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(&self.scalars, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> R::Elem {
        let s = &self.scalars;
        (0..self.rows.min(self.cols)).fold(s.zero(), |acc, i| s.add(&acc, self.get(i, i)))
    }

    pub fn map<S: Scalars>(&self, target: &S, f: impl Fn(&R::Elem) -> S::Elem) -> PMatrix<S> {
        PMatrix {
            scalars: target.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.scalars, self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.scalars.is_zero(x))
    }

    /// True iff the matrix is `c·I` for some `c` (zero included).
    pub fn is_scalar(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let c = self.get(0, 0).clone();
        (0..self.rows).all(|i| {
            (0..self.cols).all(|j| {
                let x = self.get(i, j);
                if i == j {
                    *x == c
                } else {
                    self.scalars.is_zero(x)
                }
            })
        })
    }

    /// Equality up to one global nonzero scalar, decided by cross-multiplying
    /// against a pivot entry (no division needed). Both matrices must be nonzero.
    pub fn proj_equal(&self, other: &Self) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        let s = &self.scalars;
        let Some(k) = self.data.iter().position(|x| !s.is_zero(x)) else {
            return false;
        };
        let (x0, y0) = (&self.data[k], &other.data[k]);
        if s.is_zero(y0) {
            return false;
        }
        self.data
            .iter()
            .zip(&other.data)
            .all(|(x, y)| s.mul(x, y0) == s.mul(y, x0))
    }
}

impl CycMatrix {
    /// Conjugate transpose with `A ↦ A^{−1}`.
    pub fn adjoint(&self) -> CycMatrix {
        let mut t = self.transpose();
        for x in t.data.iter_mut() {
            *x = x.conj();
        }
        t
    }

    pub fn ring(&self) -> &RingSpec {
        &self.scalars
    }
}

impl<R: Scalars> fmt::Debug for PMatrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl<R: Scalars> Serialize for PMatrix<R>
where
    R::Elem: Serialize,
{
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PMatrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &self.to_rows())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fq() -> Fq {
        Fq::new(41).unwrap()
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = FqMatrix> {
        prop::collection::vec(0u64..41, n * n).prop_map(move |v| {
            FqMatrix::from_rows(&fq(), v.chunks(n).map(<[u64]>::to_vec).collect())
        })
    }

    #[test]
    fn identity_and_trace() {
        let r = RingSpec::new(5).unwrap();
        let i = CycMatrix::identity(&r, 3);
        assert!(i.is_identity());
        assert!(i.is_scalar());
        assert_eq!(i.trace(), r.integer(3));
    }

    proptest! {
        #[test]
        fn scalar_multiples_are_projectively_equal(m in arb_matrix(3), c in 1u64..41) {
            prop_assume!(!m.is_zero());
            prop_assert!(m.proj_equal(&m.scale(&c)));
        }

        #[test]
        fn multiplication_is_associative(a in arb_matrix(3), b in arb_matrix(3), c in arb_matrix(3)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }
    }

    #[test]
    fn non_scalar_is_not_identity_projectively() {
        let f = fq();
        let m = FqMatrix::from_rows(&f, vec![vec![1, 1], vec![0, 1]]);
        assert!(!m.proj_equal(&FqMatrix::identity(&f, 2)));
        assert!(!m.is_scalar());
    }
}
