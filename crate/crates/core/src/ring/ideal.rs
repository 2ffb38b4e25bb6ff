use num_bigint::BigInt;
use serde::Serialize;

use super::{CycElem, Fq, RingSpec};
use crate::error::{Error, Result};
use crate::linalg;

/// An ideal of `Z[ζ_{4p}, 1/p]`, stored as its intersection with `Z[ζ_{4p}]`:
/// a `p`-saturated lattice in power-basis coordinates, in Hermite normal form.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct CycIdeal {
    #[serde(skip)]
    ring: RingSpec,
    #[serde(serialize_with = "ser_rows")]
    basis: Vec<Vec<BigInt>>,
    /// Lattice index before localization at `p`, when the lattice has full rank.
    #[serde(serialize_with = "ser_opt")]
    pre_saturation_index: Option<BigInt>,
}

fn ser_rows<S: serde::Serializer>(rows: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    v.serialize(s)
}

fn ser_opt<S: serde::Serializer>(x: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    x.as_ref().map(|v| v.to_string()).serialize(s)
}

impl CycIdeal {
    /// The ideal generated by `gens`. All-zero input gives the zero ideal.
    pub fn from_generators(ring: &RingSpec, gens: &[CycElem]) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::usage("an ideal needs at least one generator"));
        }
        let n = ring.degree();
        let mut rows = Vec::with_capacity(gens.len() * n);
        for g in gens {
            ring.check_same(g.ring())?;
            if g.is_zero() {
                continue;
            }
            // drop the p-power denominator: p is a unit
            let g = CycElem::from_coeffs(ring, g.coeffs().to_vec(), 0);
            for k in 0..n {
                rows.push((&g * &ring.xi_pow(k as i64)).coeffs().to_vec());
            }
        }
        Ok(Self::from_lattice_rows(ring, rows))
    }

    fn from_lattice_rows(ring: &RingSpec, rows: Vec<Vec<BigInt>>) -> Self {
        let n = ring.degree();
        let mut basis = linalg::hnf(rows);
        let pre = linalg::hnf_index(&basis, n);
        let f = Fq::new(ring.p()).expect("p is prime");
        let p = BigInt::from(ring.p());
        loop {
            let kernel = linalg::left_kernel_mod_p(&basis, f);
            if kernel.is_empty() {
                break;
            }
            let mut rows = basis.clone();
            for c in kernel {
                let mut x = vec![BigInt::from(0); n];
                for (ci, row) in c.iter().zip(&basis) {
                    if *ci != 0 {
                        for (xj, rj) in x.iter_mut().zip(row) {
                            *xj += rj * *ci;
                        }
                    }
                }
                rows.push(x.into_iter().map(|v| v / &p).collect());
            }
            basis = linalg::hnf(rows);
        }
        CycIdeal {
            ring: ring.clone(),
            basis,
            pre_saturation_index: pre,
        }
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn pre_saturation_index(&self) -> Option<&BigInt> {
        self.pre_saturation_index.as_ref()
    }

    /// Index of the saturated lattice in `Z[ζ_{4p}]`; `None` for the zero ideal.
    pub fn index(&self) -> Option<BigInt> {
        linalg::hnf_index(&self.basis, self.ring.degree())
    }

    pub fn contains(&self, x: &CycElem) -> Result<bool> {
        self.ring.check_same(x.ring())?;
        if x.is_zero() {
            return Ok(true);
        }
        Ok(linalg::hnf_contains(&self.basis, x.coeffs()))
    }

    /// `self ⊆ other`.
    pub fn leq(&self, other: &CycIdeal) -> Result<bool> {
        self.ring.check_same(&other.ring)?;
        Ok(self.basis.iter().all(|row| linalg::hnf_contains(&other.basis, row)))
    }

    pub fn is_full(&self) -> bool {
        self.contains(&self.ring.one()).unwrap_or(false)
    }

    /// Regenerates the ideal from its own basis rows read as ring elements.
    pub fn basis_elements(&self) -> Vec<CycElem> {
        self.basis
            .iter()
            .map(|r| CycElem::from_coeffs(&self.ring, r.clone(), 0))
            .collect()
    }

    /// Sum of two ideals.
    pub fn join(&self, other: &CycIdeal) -> Result<CycIdeal> {
        self.ring.check_same(&other.ring)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Ok(Self::from_lattice_rows(&self.ring, rows))
    }
}

impl std::fmt::Debug for CycIdeal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "CycIdeal(p = {}, rank = {}, index = {:?})",
            self.ring.p(),
            self.basis.len(),
            self.index()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_and_zero() {
        let r = RingSpec::new(5).unwrap();
        let one = CycIdeal::from_generators(&r, &[r.one()]).unwrap();
        assert!(one.is_full());
        assert_eq!(one.index(), Some(BigInt::from(1)));
        let zero = CycIdeal::from_generators(&r, &[r.zero()]).unwrap();
        assert!(zero.is_zero());
        assert!(!zero.is_full());
        assert!(zero.contains(&r.zero()).unwrap());
        assert!(zero.leq(&one).unwrap());
    }

    #[test]
    fn u_minus_one_saturates_to_full() {
        let r = RingSpec::new(5).unwrap();
        let x = &r.u_pow(1) - &r.one();
        let i = CycIdeal::from_generators(&r, &[x]).unwrap();
        // norm from Q(ζ_20) of (u - 1) is 5^2
        assert_eq!(i.pre_saturation_index(), Some(&BigInt::from(25)));
        assert!(i.is_full());
    }

    #[test]
    fn p_is_invertible() {
        let r = RingSpec::new(7).unwrap();
        assert!(CycIdeal::from_generators(&r, &[r.integer(7)]).unwrap().is_full());
    }

    #[test]
    fn proper_ideal_from_two() {
        let r = RingSpec::new(5).unwrap();
        let i = CycIdeal::from_generators(&r, &[r.integer(2)]).unwrap();
        assert!(!i.is_full());
        assert_eq!(i.index(), Some(BigInt::from(256)));
        assert!(i.contains(&r.integer(6)).unwrap());
        assert!(!i.contains(&r.integer(3)).unwrap());
        let again = CycIdeal::from_generators(&r, &i.basis_elements()).unwrap();
        assert_eq!(again, i);
        // closed under multiplication by A
        for e in i.basis_elements() {
            assert!(i.contains(&(&e * &r.a_pow(1))).unwrap());
        }
    }
}
