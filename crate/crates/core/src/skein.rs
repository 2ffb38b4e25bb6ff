//! SO(3) skein data at level `p`: quantum integers, theta and tetrahedron
//! evaluations, recoupling coefficients, and the genus-1 `S` and `T` matrices.
//!
//! Conventions follow the Kauffman bracket with variable `A`; only even
//! colors `0, 2, …, p − 3` occur.

use crate::error::{Error, Result};
use crate::matrix::CycMatrix;
use crate::ring::{CycElem, RingSpec};

pub type Color = u32;

/// Even colors `0, 2, …, p − 3`.
pub fn colors(p: u64) -> Vec<Color> {
    (0..=(p as Color - 3)).step_by(2).collect()
}

/// Twist-spectrum label of a color: `i(n) = min(n + 1, p − 1 − n)`, in `1..=(p−1)/2`.
pub fn color_label(p: u64, n: Color) -> u32 {
    (n + 1).min(p as u32 - 1 - n)
}

/// Colors ordered by their label, so that position `i − 1` carries eigenvalue `(−A)^{i²−1}`.
pub fn colors_by_label(p: u64) -> Vec<Color> {
    let mut c = colors(p);
    c.sort_by_key(|&n| color_label(p, n));
    c
}

pub fn admissible(p: u64, a: Color, b: Color, c: Color) -> bool {
    let (a, b, c) = (a as i64, b as i64, c as i64);
    (a + b + c) % 2 == 0 && (a - b).abs() <= c && c <= a + b && a + b + c <= 2 * p as i64 - 4
}

/// Precomputed structure constants over one ring. Immutable after construction.
pub struct Skein {
    ring: RingSpec,
    qint: Vec<CycElem>,
    qfact: Vec<CycElem>,
    qfact_inv: Vec<CycElem>,
}

impl Skein {
    pub fn new(ring: &RingSpec) -> Self {
        let p = ring.p() as i64;
        let qint: Vec<CycElem> = (0..p)
            .map(|n| (0..n).fold(ring.zero(), |acc, k| &acc + &ring.a_pow(2 * n - 2 - 4 * k)))
            .collect();
        let mut qfact = vec![ring.one()];
        for n in 1..p as usize {
            let next = &qfact[n - 1] * &qint[n];
            qfact.push(next);
        }
        let qfact_inv = qfact
            .iter()
            .map(|x| x.inverse().expect("[n]! is a unit for n < p"))
            .collect();
        Skein {
            ring: ring.clone(),
            qint,
            qfact,
            qfact_inv,
        }
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    /// `[n] = (A^{2n} − A^{−2n}) / (A² − A^{−2})` for any integer `n` (period `p`).
    pub fn quantum_integer(&self, n: i64) -> CycElem {
        self.qint[n.rem_euclid(self.p() as i64) as usize].clone()
    }

    /// `[n]!`, zero once `n ≥ p`.
    pub fn quantum_factorial(&self, n: usize) -> CycElem {
        self.qfact.get(n).cloned().unwrap_or_else(|| self.ring.zero())
    }

    fn fact_inv(&self, n: i64) -> &CycElem {
        &self.qfact_inv[usize::try_from(n).expect("nonnegative factorial argument")]
    }

    /// Loop value `Δ_n = (−1)^n [n + 1]`.
    pub fn delta(&self, n: Color) -> CycElem {
        let v = self.quantum_integer(n as i64 + 1);
        if n % 2 == 1 {
            -v
        } else {
            v
        }
    }

    pub fn admissible(&self, a: Color, b: Color, c: Color) -> bool {
        admissible(self.p(), a, b, c)
    }

    fn require(&self, a: Color, b: Color, c: Color) -> Result<()> {
        if self.admissible(a, b, c) {
            Ok(())
        } else {
            Err(Error::Admissibility(format!("({a}, {b}, {c}) at p = {}", self.p())))
        }
    }

    pub fn theta(&self, a: Color, b: Color, c: Color) -> Result<CycElem> {
        self.require(a, b, c)?;
        let (a, b, c) = (a as i64, b as i64, c as i64);
        let (m, n, k) = ((a + b - c) / 2, (b + c - a) / 2, (a + c - b) / 2);
        let mut v = self.quantum_factorial((m + n + k + 1) as usize);
        for x in [m, n, k] {
            v = &v * &self.qfact[x as usize];
        }
        for x in [m + n, n + k, m + k] {
            v = &v * self.fact_inv(x);
        }
        Ok(if (m + n + k) % 2 == 1 { -v } else { v })
    }

    /// `Tet[a b e; c d f]` with faces `(a,d,e)`, `(b,c,e)`, `(a,b,f)`, `(c,d,f)`.
    pub fn tet(&self, a: Color, b: Color, e: Color, c: Color, d: Color, f: Color) -> Result<CycElem> {
        self.require(a, d, e)?;
        self.require(b, c, e)?;
        self.require(a, b, f)?;
        self.require(c, d, f)?;
        let [a, b, c, d, e, f] = [a, b, c, d, e, f].map(|x| x as i64);
        let ai = [(a + d + e) / 2, (b + c + e) / 2, (a + b + f) / 2, (c + d + f) / 2];
        let bj = [(b + d + e + f) / 2, (a + c + e + f) / 2, (a + b + c + d) / 2];
        let mut pre = self.ring.one();
        for &x in &ai {
            for &y in &bj {
                pre = &pre * &self.qfact[(y - x) as usize];
            }
        }
        for col in [a, b, c, d, e, f] {
            pre = &pre * self.fact_inv(col);
        }
        let lo = *ai.iter().max().unwrap();
        let hi = *bj.iter().min().unwrap();
        let mut sum = self.ring.zero();
        for s in lo..=hi {
            let mut t = self.quantum_factorial((s + 1) as usize);
            if t.is_zero() {
                continue;
            }
            for &x in &ai {
                t = &t * self.fact_inv(s - x);
            }
            for &y in &bj {
                t = &t * self.fact_inv(y - s);
            }
            sum = if s % 2 == 1 { &sum - &t } else { &sum + &t };
        }
        Ok(&pre * &sum)
    }

    /// Recoupling coefficient `{a b i; c d j}`: the weight of the internal
    /// edge `i` (vertices `(a,d,i)`, `(b,c,i)`) when re-expanding the graph
    /// with internal edge `j` (vertices `(a,b,j)`, `(c,d,j)`).
    pub fn sixj(&self, a: Color, b: Color, i: Color, c: Color, d: Color, j: Color) -> Result<CycElem> {
        let t = self.tet(a, b, i, c, d, j)?;
        let den = &self.theta(a, d, i)? * &self.theta(b, c, i)?;
        Ok(&(&t * &self.delta(i)) * &den.inverse()?)
    }

    /// Twist eigenvalue `μ_n = (−1)^n A^{n² + 2n}`, equal to `(−A)^{i(n)² − 1}`.
    pub fn t_eigenvalue(&self, n: Color) -> CycElem {
        let n = n as i64;
        let v = self.ring.a_pow(n * n + 2 * n);
        if n % 2 == 1 {
            -v
        } else {
            v
        }
    }

    /// Half-twist coefficient `λ^{ab}_c`.
    pub fn half_twist(&self, a: Color, b: Color, c: Color) -> CycElem {
        let (a, b, c) = (a as i64, b as i64, c as i64);
        let v = self.ring.a_pow((c * (c + 2) - a * (a + 2) - b * (b + 2)) / 2);
        if ((a + b - c) / 2) % 2 == 1 {
            -v
        } else {
            v
        }
    }

    /// Genus-1 `T`, diagonal in the label-ordered color basis.
    pub fn t_matrix(&self) -> CycMatrix {
        let cols = colors_by_label(self.p());
        let mut m = CycMatrix::zeros(&self.ring, cols.len(), cols.len());
        for (k, &n) in cols.iter().enumerate() {
            m.set(k, k, self.t_eigenvalue(n));
        }
        m
    }

    /// Genus-1 `S_{ab} = η [(a+1)(b+1)]`; satisfies `S² = I`.
    pub fn s_matrix(&self) -> CycMatrix {
        let cols = colors_by_label(self.p());
        let eta = self.ring.eta();
        let mut m = CycMatrix::zeros(&self.ring, cols.len(), cols.len());
        for (i, &a) in cols.iter().enumerate() {
            for (j, &b) in cols.iter().enumerate() {
                let v = &eta * &self.quantum_integer(((a + 1) * (b + 1)) as i64);
                m.set(i, j, if (a + b) % 2 == 1 { -v } else { v });
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sk(p: u64) -> Skein {
        Skein::new(&RingSpec::new(p).unwrap())
    }

    #[test]
    fn quantum_integers() {
        let s = sk(5);
        let r = s.ring().clone();
        assert!(s.quantum_integer(1).is_one());
        assert!(s.quantum_integer(0).is_zero());
        assert_eq!(s.quantum_integer(2), &r.a_pow(2) + &r.a_pow(-2));
        assert!(s.quantum_integer(5).is_zero());
        assert_eq!(s.quantum_integer(-2), -s.quantum_integer(2));
    }

    #[test]
    fn color_sets() {
        for p in [5u64, 7, 11, 13] {
            let c = colors(p);
            assert_eq!(c.len(), (p as usize - 1) / 2);
            assert_eq!(*c.last().unwrap(), p as u32 - 3);
        }
        assert_eq!(colors_by_label(7), vec![0, 4, 2]);
    }

    #[test]
    fn thetas() {
        let s = sk(7);
        assert!(s.theta(0, 0, 0).unwrap().is_one());
        assert_eq!(s.theta(2, 2, 0).unwrap(), s.delta(2));
        assert!(s.theta(2, 2, 1).is_err());
        for a in colors(7) {
            for b in colors(7) {
                for c in colors(7) {
                    if s.admissible(a, b, c) {
                        assert!(s.theta(a, b, c).unwrap().is_unit());
                    }
                }
            }
        }
    }

    #[test]
    fn tet_degenerates_to_theta() {
        // a zero-colored edge collapses the tetrahedron to a theta graph
        let s = sk(7);
        assert_eq!(s.tet(2, 2, 0, 2, 2, 2).unwrap(), s.theta(2, 2, 2).unwrap());
        assert_eq!(s.tet(4, 2, 0, 2, 4, 2).unwrap(), s.theta(4, 2, 2).unwrap());
    }

    #[test]
    fn t_spectrum_matches_labels() {
        for p in [5u64, 7, 11] {
            let s = sk(p);
            let r = s.ring().clone();
            for (k, n) in colors_by_label(p).into_iter().enumerate() {
                let i = k as i64 + 1;
                assert_eq!(s.t_eigenvalue(n), r.minus_a_pow(i * i - 1));
            }
            let t = s.t_matrix();
            assert!(t.pow(p).is_identity());
        }
    }

    #[test]
    fn s_squares_to_identity_and_modular_relation() {
        for p in [5u64, 7] {
            let sk = sk(p);
            let s = sk.s_matrix();
            let t = sk.t_matrix();
            assert!(s.mul(&s).is_identity());
            let st = s.mul(&t);
            let st3 = st.mul(&st).mul(&st);
            assert!(st3.proj_equal(&s.mul(&s)));
        }
    }

    fn recoupling_identity(s: &Skein, a: Color, b: Color, c: Color, d: Color) {
        let cols = colors(s.p());
        let js: Vec<Color> = cols.iter().copied().filter(|&j| s.admissible(a, b, j) && s.admissible(c, d, j)).collect();
        let is: Vec<Color> = cols.iter().copied().filter(|&i| s.admissible(a, d, i) && s.admissible(b, c, i)).collect();
        assert_eq!(js.len(), is.len());
        // forward move j -> i, then the reverse move i -> j'
        for &j in &js {
            for &j2 in &js {
                let mut acc = s.ring().zero();
                for &i in &is {
                    let fwd = s.sixj(a, b, i, c, d, j).unwrap();
                    let back = s.sixj(a, d, j2, c, b, i).unwrap();
                    acc = &acc + &(&back * &fwd);
                }
                assert_eq!(acc.is_one(), j == j2, "a={a} b={b} c={c} d={d} j={j} j2={j2}");
                if j != j2 {
                    assert!(acc.is_zero());
                }
            }
        }
    }

    #[test]
    fn recoupling_orthogonality_exhaustive_p5() {
        let s = sk(5);
        for a in colors(5) {
            for b in colors(5) {
                for c in colors(5) {
                    for d in colors(5) {
                        recoupling_identity(&s, a, b, c, d);
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn recoupling_orthogonality_p7(a in 0u32..3, b in 0u32..3, c in 0u32..3, d in 0u32..3) {
            let s = sk(7);
            recoupling_identity(&s, 2 * a, 2 * b, 2 * c, 2 * d);
        }
    }
}
