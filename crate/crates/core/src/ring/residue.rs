use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{is_prime, CycElem, RingSpec};
use crate::error::{Error, Result};

/// The prime field `F_q`, `q < 2^32`, with `u64` residues in `0..q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fq {
    q: u64,
}

impl Fq {
    pub fn new(q: u64) -> Result<Self> {
        if !is_prime(q) || q >= 1 << 32 {
            return Err(Error::InvalidResidue(format!("{q} is not a prime below 2^32")));
        }
        Ok(Fq { q })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b) % self.q
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.q - a) % self.q
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.q
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.q;
        let mut b = a % self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero residue.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a % self.q == 0 {
            None
        } else {
            Some(self.pow(a, self.q - 2))
        }
    }

    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.q as i64) as u64
    }

    pub fn from_bigint(&self, a: &BigInt) -> u64 {
        a.mod_floor(&BigInt::from(self.q)).to_u64().expect("residue fits")
    }

    /// Multiplicative order of a nonzero residue.
    pub fn order(&self, a: u64) -> u64 {
        let n = self.q - 1;
        let mut ord = n;
        for f in prime_factors(n) {
            while ord % f == 0 && self.pow(a, ord / f) == 1 {
                ord /= f;
            }
        }
        ord
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A split prime `q ≡ 1 (mod 4p)` together with the image of `ξ`.
///
/// The image is the smallest residue of exact order `4p`; the kernel of the
/// induced map `Z[ζ_{4p}, 1/p] → F_q` is the maximal ideal `J`.
#[derive(Clone, PartialEq, Eq)]
pub struct ResidueSpec {
    ring: RingSpec,
    field: Fq,
    root: u64,
    p_inv: u64,
}

impl ResidueSpec {
    pub fn new(ring: &RingSpec, q: u64) -> Result<Self> {
        let field = Fq::new(q)?;
        let m = ring.conductor() as u64;
        if (q - 1) % m != 0 {
            return Err(Error::InvalidResidue(format!(
                "Φ_{m} has no root modulo {q} (need q ≡ 1 mod {m})"
            )));
        }
        let root = (2..q)
            .find(|&x| field.order(x) == m)
            .ok_or_else(|| Error::InvalidResidue(format!("no element of order {m} modulo {q}")))?;
        let p_inv = field.inv(ring.p() % q).expect("p is invertible modulo q");
        Ok(ResidueSpec {
            ring: ring.clone(),
            field,
            root,
            p_inv,
        })
    }

    /// The first `count` primes `q ≡ 1 (mod 4p)`.
    pub fn default_candidates(ring: &RingSpec, count: usize) -> Vec<u64> {
        let m = ring.conductor() as u64;
        (1..)
            .map(|k| k * m + 1)
            .filter(|&q| is_prime(q))
            .take(count)
            .collect()
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn field(&self) -> Fq {
        self.field
    }

    /// Image of `ξ`.
    pub fn root(&self) -> u64 {
        self.root
    }

    /// Image of `A = ξ²`.
    pub fn a_image(&self) -> u64 {
        self.field.mul(self.root, self.root)
    }

    /// The ring map modulo `J`.
    pub fn reduce(&self, x: &CycElem) -> Result<u64> {
        self.ring.check_same(x.ring())?;
        let f = self.field;
        let mut acc = 0;
        let mut pw = 1;
        for c in x.coeffs() {
            acc = f.add(acc, f.mul(f.from_bigint(c), pw));
            pw = f.mul(pw, self.root);
        }
        Ok(f.mul(acc, f.pow(self.p_inv, x.denom_exp() as u64)))
    }
}

impl std::fmt::Debug for ResidueSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ResidueSpec(p = {}, q = {}, ξ ↦ {})", self.ring.p(), self.q(), self.root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_candidates_for_five() {
        let r = RingSpec::new(5).unwrap();
        assert_eq!(ResidueSpec::default_candidates(&r, 5), vec![41, 61, 101, 181, 241]);
    }

    #[test]
    fn rejects_non_split_primes() {
        let r = RingSpec::new(5).unwrap();
        assert!(matches!(ResidueSpec::new(&r, 31), Err(Error::InvalidResidue(_))));
        assert!(ResidueSpec::new(&r, 42).is_err());
    }

    #[test]
    fn root_has_order_conductor() {
        let r = RingSpec::new(7).unwrap();
        for q in ResidueSpec::default_candidates(&r, 3) {
            let rs = ResidueSpec::new(&r, q).unwrap();
            assert_eq!(rs.field().order(rs.root()), 28);
            // the reduction of Φ_28 at the root vanishes
            let phi = r.cyclotomic();
            let f = rs.field();
            let val = phi
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &c)| f.add(acc, f.mul(f.from_i64(c), f.pow(rs.root(), k as u64))));
            assert_eq!(val, 0);
        }
    }

    #[test]
    fn reduction_basics() {
        let r = RingSpec::new(5).unwrap();
        let rs = ResidueSpec::new(&r, 41).unwrap();
        assert_eq!(rs.reduce(&r.one()).unwrap(), 1);
        assert_eq!(rs.reduce(&r.one().div_p_pow(1)).unwrap(), rs.field().inv(5).unwrap());
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    let d = &r.u_pow(i) - &r.u_pow(j);
                    assert_ne!(rs.reduce(&d).unwrap(), 0);
                }
            }
        }
    }
}
