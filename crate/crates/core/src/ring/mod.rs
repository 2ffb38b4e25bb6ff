//! Exact arithmetic in the localized cyclotomic ring `Z[ζ_{4p}, 1/p]`.
//!
//! Elements are stored in the power basis `1, ξ, …, ξ^{φ(4p)−1}` of a fixed
//! primitive `4p`-th root of unity `ξ`, with a single power of `p` as the
//! denominator. The Kauffman variable is `A = ξ²` (a primitive `2p`-th root),
//! `u = A²` is a primitive `p`-th root and `i = ξ^p` is a square root of `−1`.

mod elem;
pub mod ideal;
pub mod residue;

pub use elem::{ArithOp, CycElem};
pub use ideal::CycIdeal;
pub use residue::{Fq, ResidueSpec};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug)]
struct RingData {
    p: u64,
    conductor: usize,
    degree: usize,
    /// Monic cyclotomic polynomial `Φ_{4p}`, lowest degree first.
    cyclotomic: Vec<i64>,
}

/// The ring `Z[ζ_{4p}, 1/p]` for an odd prime `p ≥ 5`.
///
/// Cheap to clone; two specs compare equal iff they share `p`.
#[derive(Clone)]
pub struct RingSpec(Arc<RingData>);

impl RingSpec {
    pub fn new(p: u64) -> Result<Self> {
        if p < 5 || !is_prime(p) {
            return Err(Error::usage(format!("level p must be a prime >= 5, got {p}")));
        }
        let conductor = 4 * p as usize;
        let cyclotomic = cyclotomic_poly(conductor);
        let degree = cyclotomic.len() - 1;
        debug_assert_eq!(degree, 2 * (p as usize - 1));
        Ok(RingSpec(Arc::new(RingData {
            p,
            conductor,
            degree,
            cyclotomic,
        })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// The conductor `m = 4p`.
    pub fn conductor(&self) -> usize {
        self.0.conductor
    }

    /// `φ(4p) = 2(p − 1)`, the number of power-basis coordinates.
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn cyclotomic(&self) -> &[i64] {
        &self.0.cyclotomic
    }

    pub fn zero(&self) -> CycElem {
        CycElem::zero(self)
    }

    pub fn one(&self) -> CycElem {
        CycElem::integer(self, 1)
    }

    pub fn integer(&self, n: i64) -> CycElem {
        CycElem::integer(self, n)
    }

    /// `ξ^k` for any integer `k`.
    pub fn xi_pow(&self, k: i64) -> CycElem {
        CycElem::xi_pow(self, k)
    }

    /// The Kauffman variable `A = ξ²` raised to `k`.
    pub fn a_pow(&self, k: i64) -> CycElem {
        self.xi_pow(2 * k)
    }

    /// `u = A²`, a primitive `p`-th root of unity, raised to `k`.
    pub fn u_pow(&self, k: i64) -> CycElem {
        self.xi_pow(4 * k)
    }

    /// `i = ξ^p`.
    pub fn i(&self) -> CycElem {
        self.xi_pow(self.p() as i64)
    }

    /// `(−A)^k`; `−A` is a primitive `p`-th root of unity.
    pub fn minus_a_pow(&self, k: i64) -> CycElem {
        let a = self.a_pow(k);
        if k.rem_euclid(2) == 1 {
            -a
        } else {
            a
        }
    }

    /// The quadratic Gauss sum `Σ_k u^{k²}`, times `i` when `p ≡ 1 (mod 4)`; squares to `−p`.
    pub fn gauss_sqrt_minus_p(&self) -> CycElem {
        let p = self.p() as i64;
        let g = (0..p).fold(self.zero(), |acc, k| &acc + &self.u_pow(k * k));
        if p % 4 == 1 {
            &g * &self.i()
        } else {
            g
        }
    }

    /// `η = (A² − A^{−2}) / √(−p)`, computed as `−(A² − A^{−2})·√(−p) / p`.
    pub fn eta(&self) -> CycElem {
        let num = &self.a_pow(2) - &self.a_pow(-2);
        (-(&num * &self.gauss_sqrt_minus_p())).div_p_pow(1)
    }

    pub(crate) fn check_same(&self, other: &RingSpec) -> Result<()> {
        if self.p() == other.p() {
            Ok(())
        } else {
            Err(Error::RingMismatch {
                left: self.p(),
                right: other.p(),
            })
        }
    }
}

impl PartialEq for RingSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p()
    }
}

impl Eq for RingSpec {}

impl fmt::Debug for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingSpec(p = {})", self.p())
    }
}

/// Deterministic trial division; levels and residue primes are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// `Φ_m` by repeated exact division of `x^m − 1` by `Φ_d`, `d | m`, `d < m`.
pub fn cyclotomic_poly(m: usize) -> Vec<i64> {
    let mut poly = vec![0i64; m + 1];
    poly[0] = -1;
    poly[m] = 1;
    for d in 1..m {
        if m % d == 0 {
            poly = poly_div_exact(&poly, &cyclotomic_poly(d));
        }
    }
    poly
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let lead = *den.last().unwrap();
    debug_assert_eq!(lead.abs(), 1);
    let mut quot = vec![0i64; num.len() - dn];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dn] / lead;
        quot[k] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[k + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_small_cases() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        // Φ_20(x) = x^8 − x^6 + x^4 − x^2 + 1
        assert_eq!(cyclotomic_poly(20), vec![1, 0, -1, 0, 1, 0, -1, 0, 1]);
    }

    #[test]
    fn degree_is_twice_p_minus_one() {
        for p in [5u64, 7, 11, 13] {
            assert_eq!(RingSpec::new(p).unwrap().degree(), 2 * (p as usize - 1));
        }
    }

    #[test]
    fn gauss_sum_squares_to_minus_p() {
        for p in [5u64, 7, 11, 13] {
            let r = RingSpec::new(p).unwrap();
            let g = r.gauss_sqrt_minus_p();
            assert_eq!(&g * &g, r.integer(-(p as i64)));
        }
    }

    #[test]
    fn eta_is_a_unit() {
        for p in [5u64, 7] {
            let r = RingSpec::new(p).unwrap();
            let eta = r.eta();
            assert!((&eta * &eta.inverse().unwrap()).is_one());
            let num = &r.a_pow(2) - &r.a_pow(-2);
            assert_eq!(&eta * &r.gauss_sqrt_minus_p(), num);
        }
    }

    #[test]
    fn rejects_bad_levels() {
        assert!(RingSpec::new(3).is_err());
        assert!(RingSpec::new(9).is_err());
    }
}
