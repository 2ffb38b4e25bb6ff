use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::RingSpec;
use crate::error::{Error, Result};

/// An element of `Z[ζ_{4p}, 1/p]`: `coeffs · (1, ξ, ξ², …) / p^denom_exp`.
///
/// Always canonical: coefficients reduced modulo `Φ_{4p}` and the denominator
/// exponent minimal, so structural equality is ring equality.
#[derive(Clone, PartialEq, Eq)]
pub struct CycElem {
    ring: RingSpec,
    coeffs: Vec<BigInt>,
    denom_exp: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl CycElem {
    pub fn zero(ring: &RingSpec) -> Self {
        CycElem {
            ring: ring.clone(),
            coeffs: vec![BigInt::zero(); ring.degree()],
            denom_exp: 0,
        }
    }

    pub fn integer(ring: &RingSpec, n: i64) -> Self {
        let mut e = Self::zero(ring);
        e.coeffs[0] = BigInt::from(n);
        e.normalize_denominator();
        e
    }

    pub fn xi_pow(ring: &RingSpec, k: i64) -> Self {
        let m = ring.conductor();
        let mut wide = vec![BigInt::zero(); m];
        wide[k.rem_euclid(m as i64) as usize] = BigInt::one();
        Self::from_wide(ring, wide, 0)
    }

    /// Builds an element from raw power-basis coordinates of any length.
    pub fn from_coeffs(ring: &RingSpec, coeffs: Vec<BigInt>, denom_exp: u32) -> Self {
        Self::from_wide(ring, coeffs, denom_exp)
    }

    pub fn from_i64s(ring: &RingSpec, coeffs: &[i64], denom_exp: u32) -> Self {
        Self::from_wide(ring, coeffs.iter().map(|&c| BigInt::from(c)).collect(), denom_exp)
    }

    fn from_wide(ring: &RingSpec, mut wide: Vec<BigInt>, denom_exp: u32) -> Self {
        let m = ring.conductor();
        // fold exponents modulo the conductor first (ξ^m = 1)
        if wide.len() > m {
            let extra = wide.split_off(m);
            for (k, c) in extra.into_iter().enumerate() {
                wide[k % m] += c;
            }
        }
        let coeffs = reduce_mod_cyclotomic(ring, wide);
        let mut e = CycElem {
            ring: ring.clone(),
            coeffs,
            denom_exp,
        };
        e.normalize_denominator();
        e
    }

    fn normalize_denominator(&mut self) {
        if self.coeffs.iter().all(Zero::is_zero) {
            self.denom_exp = 0;
            return;
        }
        let p = BigInt::from(self.ring.p());
        while self.denom_exp > 0 && self.coeffs.iter().all(|c| c.is_multiple_of(&p)) {
            for c in self.coeffs.iter_mut() {
                *c /= &p;
            }
            self.denom_exp -= 1;
        }
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn denom_exp(&self) -> u32 {
        self.denom_exp
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.denom_exp == 0 && self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// True iff the element lies in `Z[ζ_{4p}]` (no `p` in the denominator).
    pub fn is_integral(&self) -> bool {
        self.denom_exp == 0
    }

    /// Checked ring operation; fails when the operands live over different levels.
    pub fn arith(&self, other: &CycElem, op: ArithOp) -> Result<CycElem> {
        self.ring.check_same(&other.ring)?;
        Ok(match op {
            ArithOp::Add => self.add_impl(other, false),
            ArithOp::Sub => self.add_impl(other, true),
            ArithOp::Mul => self.mul_impl(other),
        })
    }

    fn aligned(&self, other: &CycElem) -> (Vec<BigInt>, Vec<BigInt>, u32) {
        let e = self.denom_exp.max(other.denom_exp);
        let p = BigInt::from(self.ring.p());
        let lift = |x: &CycElem| -> Vec<BigInt> {
            let f = num_traits::pow(p.clone(), (e - x.denom_exp) as usize);
            x.coeffs.iter().map(|c| c * &f).collect()
        };
        (lift(self), lift(other), e)
    }

    fn add_impl(&self, other: &CycElem, negate: bool) -> CycElem {
        let (a, b, e) = self.aligned(other);
        let coeffs = a
            .into_iter()
            .zip(b)
            .map(|(x, y)| if negate { x - y } else { x + y })
            .collect();
        let mut r = CycElem {
            ring: self.ring.clone(),
            coeffs,
            denom_exp: e,
        };
        r.normalize_denominator();
        r
    }

    fn mul_impl(&self, other: &CycElem) -> CycElem {
        let n = self.ring.degree();
        let mut wide = vec![BigInt::zero(); 2 * n];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    wide[i + j] += x * y;
                }
            }
        }
        Self::from_wide(&self.ring, wide, self.denom_exp + other.denom_exp)
    }

    pub fn scale(&self, k: i64) -> CycElem {
        let mut r = CycElem {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            denom_exp: self.denom_exp,
        };
        r.normalize_denominator();
        r
    }

    /// Division by `p^k` (always exact in the localized ring).
    pub fn div_p_pow(&self, k: u32) -> CycElem {
        let mut r = self.clone();
        if !r.is_zero() {
            r.denom_exp += k;
        }
        r.normalize_denominator();
        r
    }

    /// The Galois automorphism `ξ ↦ ξ^k`, `gcd(k, 4p) = 1`.
    pub fn galois(&self, k: i64) -> CycElem {
        let m = self.ring.conductor() as i64;
        debug_assert_eq!(num_integer::gcd(k.rem_euclid(m), m), 1);
        let mut wide = vec![BigInt::zero(); m as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            wide[(j as i64 * k).rem_euclid(m) as usize] += c;
        }
        Self::from_wide(&self.ring, wide, self.denom_exp)
    }

    /// Complex conjugation `ξ ↦ ξ^{-1}` (equivalently `A ↦ A^{-1}`).
    pub fn conj(&self) -> CycElem {
        self.galois(-1)
    }

    /// Membership in the subring `Z[ζ_{2p}, 1/p]` generated by `A`: fixed by `ξ ↦ −ξ`.
    pub fn in_half_conductor_subring(&self) -> bool {
        let k = 2 * self.ring.p() as i64 + 1;
        self.galois(k) == *self
    }

    /// Multiplicative inverse, found by solving `x · y = 1` against the
    /// multiplication-by-`x` matrix over `Q` and checking that only powers of
    /// `p` appear in the denominators.
    pub fn inverse(&self) -> Result<CycElem> {
        if self.is_zero() {
            return Err(Error::NotAUnit("zero".into()));
        }
        let n = self.ring.degree();
        // column j of M is x·ξ^j; solve M y = e_0
        let integral = CycElem {
            ring: self.ring.clone(),
            coeffs: self.coeffs.clone(),
            denom_exp: 0,
        };
        let mut mat: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n + 1]; n];
        for j in 0..n {
            let col = integral.mul_impl(&CycElem::xi_pow(&self.ring, j as i64));
            debug_assert_eq!(col.denom_exp, 0);
            for i in 0..n {
                mat[i][j] = BigRational::from_integer(col.coeffs[i].clone());
            }
        }
        mat[0][n] = BigRational::one();
        let sol = solve_rational(mat).ok_or_else(|| Error::Internal("singular multiplication matrix".into()))?;
        let lcm = sol
            .iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let p = BigInt::from(self.ring.p());
        let mut rest = lcm.clone();
        let mut e = 0u32;
        while rest.is_multiple_of(&p) {
            rest /= &p;
            e += 1;
        }
        if !rest.is_one() {
            return Err(Error::NotAUnit(format!("{self} (denominator {lcm})")));
        }
        let coeffs: Vec<BigInt> = sol.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
        // x = X / p^d  =>  x^{-1} = p^d · X^{-1}
        let pd = num_traits::pow(p, self.denom_exp as usize);
        let coeffs = coeffs.into_iter().map(|c| c * &pd).collect();
        Ok(CycElem::from_wide(&self.ring, coeffs, e))
    }

    pub fn is_unit(&self) -> bool {
        self.inverse().is_ok()
    }

    /// `self^k`; negative exponents go through [`CycElem::inverse`].
    pub fn pow(&self, k: i64) -> Result<CycElem> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = CycElem::integer(&self.ring, 1);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// If the element is `±ξ^k`, returns `(sign, k)`.
    pub fn as_signed_root_of_unity(&self) -> Option<(i32, usize)> {
        if self.denom_exp != 0 {
            return None;
        }
        let m = self.ring.conductor();
        (0..m).find_map(|k| {
            let r = CycElem::xi_pow(&self.ring, k as i64);
            if r == *self {
                Some((1, k))
            } else if -r.clone() == *self {
                Some((-1, k))
            } else {
                None
            }
        })
    }

    /// Exact rational value if the element is a rational number.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().any(|c| !c.is_zero()) {
            return None;
        }
        let den = num_traits::pow(BigInt::from(self.ring.p()), self.denom_exp as usize);
        Some(BigRational::new(self.coeffs[0].clone(), den))
    }
}

fn reduce_mod_cyclotomic(ring: &RingSpec, mut wide: Vec<BigInt>) -> Vec<BigInt> {
    let phi = ring.cyclotomic();
    let d = ring.degree();
    for k in (d..wide.len()).rev() {
        if wide[k].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut wide[k]);
        for (j, &f) in phi.iter().enumerate().take(d) {
            if f != 0 {
                wide[k - d + j] -= &c * f;
            }
        }
    }
    wide.resize(d, BigInt::zero());
    wide
}

/// Gauss–Jordan on an augmented `n × (n+1)` rational system.
fn solve_rational(mut m: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for x in m[col][col..].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let t = &m[col][c] * &f;
                    m[r][c] = &m[r][c] - t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a CycElem> for &'a CycElem {
            type Output = CycElem;
            fn $method(self, rhs: &'a CycElem) -> CycElem {
                assert!(self.ring == rhs.ring, "CycElem operands over different levels");
                $body(self, rhs)
            }
        }
        impl $tr<CycElem> for CycElem {
            type Output = CycElem;
            fn $method(self, rhs: CycElem) -> CycElem {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a: &CycElem, b: &CycElem| a.add_impl(b, false));
binop!(Sub, sub, |a: &CycElem, b: &CycElem| a.add_impl(b, true));
binop!(Mul, mul, |a: &CycElem, b: &CycElem| a.mul_impl(b));

impl Neg for CycElem {
    type Output = CycElem;
    fn neg(mut self) -> CycElem {
        for c in self.coeffs.iter_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Neg for &CycElem {
    type Output = CycElem;
    fn neg(self) -> CycElem {
        -self.clone()
    }
}

impl fmt::Display for CycElem {
    /// Polynomial in `z = ξ`, e.g. `(3 - 2 z^2 + z^5)/5^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            let body = match (k, mag.is_one()) {
                (0, _) => mag.to_string(),
                (1, true) => "z".to_string(),
                (1, false) => format!("{mag} z"),
                (_, true) => format!("z^{k}"),
                (_, false) => format!("{mag} z^{k}"),
            };
            terms.push((sign, body));
        }
        let mut s = String::new();
        if terms.is_empty() {
            s.push('0');
        }
        for (i, (sign, body)) in terms.iter().enumerate() {
            if i == 0 {
                if *sign == "-" {
                    s.push('-');
                }
            } else {
                s.push_str(&format!(" {sign} "));
            }
            s.push_str(body);
        }
        if self.denom_exp > 0 {
            let exp = if self.denom_exp == 1 {
                String::new()
            } else {
                format!("^{}", self.denom_exp)
            };
            write!(f, "({s})/{}{exp}", self.ring.p())
        } else {
            f.write_str(&s)
        }
    }
}

impl fmt::Debug for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycElem[p={}]({self})", self.ring.p())
    }
}

/// Wire form: coefficients as decimal strings so no precision is lost.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CycElemWire {
    pub p: u64,
    pub coeffs: Vec<String>,
    pub denom_exp: u32,
}

impl Serialize for CycElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycElemWire {
            p: self.ring.p(),
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
            denom_exp: self.denom_exp,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = CycElemWire::deserialize(d)?;
        let ring = RingSpec::new(w.p).map_err(D::Error::custom)?;
        if w.coeffs.len() != ring.degree() {
            return Err(D::Error::custom(format!(
                "expected {} coefficients, got {}",
                ring.degree(),
                w.coeffs.len()
            )));
        }
        let coeffs = w
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(CycElem::from_coeffs(&ring, coeffs, w.denom_exp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64) -> RingSpec {
        RingSpec::new(p).unwrap()
    }

    #[test]
    fn a_squared_is_u() {
        let r = ring(5);
        let a = r.a_pow(1);
        assert_eq!(a.arith(&a, ArithOp::Mul).unwrap(), r.u_pow(1));
    }

    #[test]
    fn additive_identity() {
        let r = ring(7);
        let x = CycElem::from_i64s(&r, &[3, -1, 4, 1, -5, 9], 1);
        assert_eq!(x.arith(&r.zero(), ArithOp::Add).unwrap(), x);
    }

    #[test]
    fn distinguished_roots() {
        for p in [5u64, 7, 11, 13] {
            let r = ring(p);
            assert_eq!(r.a_pow(p as i64), -r.one());
            assert!(r.u_pow(p as i64).is_one());
            assert!(!r.u_pow(1).is_one());
            assert_eq!(&r.i() * &r.i(), -r.one());
            assert!(r.minus_a_pow(p as i64).is_one());
        }
    }

    #[test]
    fn product_of_unit_differences_is_p() {
        for p in [5u64, 7, 11] {
            let r = ring(p);
            let mut acc = r.one();
            for i in 1..p as i64 {
                acc = &acc * &(&r.one() - &r.u_pow(i));
            }
            assert_eq!(acc, r.integer(p as i64));
        }
    }

    #[test]
    fn mismatched_levels_are_usage_errors() {
        let a = ring(5).one();
        let b = ring(7).one();
        assert!(matches!(a.arith(&b, ArithOp::Add), Err(Error::RingMismatch { .. })));
    }

    #[test]
    fn denominators_are_minimal() {
        let r = ring(5);
        let x = CycElem::from_i64s(&r, &[5, 10, 0, 25], 2);
        assert_eq!(x.denom_exp(), 1);
        assert_eq!(x.coeffs()[0], BigInt::from(1));
        assert!(r.integer(0).div_p_pow(3).is_zero());
        assert_eq!(r.integer(25).div_p_pow(2), r.one());
    }

    #[test]
    fn inverse_of_unit_difference() {
        let r = ring(5);
        let x = &r.one() - &r.u_pow(2);
        let y = x.inverse().unwrap();
        assert!((&x * &y).is_one());
        assert_eq!(y.denom_exp(), 1);
        assert!(matches!(r.integer(2).inverse(), Err(Error::NotAUnit(_))));
        assert!(r.integer(25).inverse().unwrap() == r.one().div_p_pow(2));
    }

    #[test]
    fn conjugation_inverts_roots() {
        let r = ring(7);
        let a = r.a_pow(3);
        assert!((&a * &a.conj()).is_one());
        assert!(r.a_pow(1).in_half_conductor_subring());
        assert!(!r.i().in_half_conductor_subring());
    }

    #[test]
    fn serde_round_trip() {
        let r = ring(5);
        let x = CycElem::from_i64s(&r, &[1, -2, 3], 2);
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.contains("\"denomExp\""));
        let back: CycElem = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn display_is_readable() {
        let r = ring(5);
        assert_eq!(r.zero().to_string(), "0");
        assert_eq!((&r.one() - &r.xi_pow(3)).to_string(), "1 - z^3");
        assert_eq!(r.one().div_p_pow(2).to_string(), "(1)/5^2");
    }
}
