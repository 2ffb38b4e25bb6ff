//! Projective quantum representations of the genus 1 and 2 mapping class
//! groups at level `p`, and their reductions modulo split primes.
//!
//! Genus 1 uses the label-ordered color basis with `t_alpha = T` and
//! `t_beta = S T S⁻¹`. Genus 2 uses the dumbbell basis `(a, c, b)`: `a`, `b`
//! color the two loops and `c` the bridge. The twists along `c1`, `c5`, `s`
//! are diagonal there; `c2`, `c4` are conjugated by the per-handle `S` move and
//! `c3` by the F-move to the theta-graph basis `(a, b, x)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{CycMatrix, FqMatrix};
use crate::mcg::{Curve, TwistWord};
use crate::ring::{CycElem, Fq, ResidueSpec, RingSpec};
use crate::skein::{colors, colors_by_label, Color, Skein};

/// Labels of the basis vectors: one color at genus 1, `(a, c, b)` at genus 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepBasis {
    pub genus: u8,
    pub p: u64,
    pub labels: Vec<Vec<Color>>,
}

impl RepBasis {
    pub fn new(genus: u8, p: u64) -> Result<Self> {
        let labels = match genus {
            1 => colors_by_label(p).into_iter().map(|n| vec![n]).collect(),
            2 => dumbbell_labels(p).into_iter().map(|(a, c, b)| vec![a, c, b]).collect(),
            g => return Err(Error::usage(format!("unsupported genus {g}"))),
        };
        Ok(RepBasis { genus, p, labels })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &[Color]) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

fn dumbbell_labels(p: u64) -> Vec<(Color, Color, Color)> {
    let cols = colors(p);
    let mut out = Vec::new();
    for &a in &cols {
        for &c in &cols {
            for &b in &cols {
                if crate::skein::admissible(p, a, a, c) && crate::skein::admissible(p, b, b, c) {
                    out.push((a, c, b));
                }
            }
        }
    }
    out
}

/// `d_{p,g}` by enumeration of basis labels.
pub fn rep_dim(genus: u8, p: u64) -> Result<usize> {
    Ok(RepBasis::new(genus, p)?.dim())
}

/// Verlinde count `Σ_j (η [j+1])^{2−2g}` in floating point, for any genus.
pub fn verlinde_dim(p: u64, genus: u32) -> u64 {
    let pf = p as f64;
    let sum: f64 = colors(p)
        .iter()
        .map(|&j| {
            let s0j = 2.0 / pf.sqrt() * (2.0 * std::f64::consts::PI * (j as f64 + 1.0) / pf).sin();
            s0j.abs().powi(2 - 2 * genus as i32)
        })
        .sum();
    sum.round() as u64
}

/// A representation: one matrix and its inverse per catalogued curve, plus
/// the diagonal of the invariant Hermitian form.
pub struct QuantumRep {
    ring: RingSpec,
    basis: RepBasis,
    gens: HashMap<Curve, (CycMatrix, CycMatrix)>,
    gram: Vec<CycElem>,
}

impl QuantumRep {
    pub fn new(ring: &RingSpec, genus: u8) -> Result<Self> {
        let skein = Skein::new(ring);
        match genus {
            1 => Ok(Self::genus1(&skein)),
            2 => Self::genus2(&skein),
            g => Err(Error::usage(format!("unsupported genus {g}"))),
        }
    }

    fn genus1(sk: &Skein) -> Self {
        let ring = sk.ring().clone();
        let s = sk.s_matrix();
        let t = sk.t_matrix();
        let t_inv = diag_conj(&t);
        let mut gens = HashMap::new();
        gens.insert(Curve::Beta, (s.mul(&t).mul(&s), s.mul(&t_inv).mul(&s)));
        gens.insert(Curve::Alpha, (t, t_inv));
        let basis = RepBasis::new(1, ring.p()).unwrap();
        let gram = vec![ring.one(); basis.dim()];
        QuantumRep { ring, basis, gens, gram }
    }

    fn genus2(sk: &Skein) -> Result<Self> {
        let ring = sk.ring().clone();
        let p = ring.p();
        let basis = RepBasis::new(2, p)?;
        let lab = dumbbell_labels(p);
        let d = lab.len();
        let idx: HashMap<(Color, Color, Color), usize> = lab.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let cols = colors(p);
        let mut inv_cache: HashMap<(Color, Color, Color), CycElem> = HashMap::new();
        let mut theta_inv = |a: Color, b: Color, c: Color| -> Result<CycElem> {
            let key = sorted3(a, b, c);
            if let Some(v) = inv_cache.get(&key) {
                return Ok(v.clone());
            }
            let v = sk.theta(a, b, c)?.inverse()?;
            inv_cache.insert(key, v.clone());
            Ok(v)
        };

        let diag_of = |f: &dyn Fn(&(Color, Color, Color)) -> CycElem| {
            CycMatrix::diagonal(&ring, lab.iter().map(f).collect())
        };
        let t1 = diag_of(&|&(a, _, _)| sk.t_eigenvalue(a));
        let t5 = diag_of(&|&(_, _, b)| sk.t_eigenvalue(b));
        let ts = diag_of(&|&(_, c, _)| sk.t_eigenvalue(c));

        // per-handle S move, block diagonal in the bridge color
        let mut nval: HashMap<(Color, Color, Color), CycElem> = HashMap::new();
        for &c in &cols {
            for &a in &cols {
                for &a2 in &cols {
                    if !(sk.admissible(a, a, c) && sk.admissible(a2, a2, c)) {
                        continue;
                    }
                    let mut acc = ring.zero();
                    for &x in &cols {
                        if !sk.admissible(a, a2, x) {
                            continue;
                        }
                        let lam = sk.half_twist(a, a2, x);
                        let term = &(&(&sk.delta(x) * &theta_inv(a, a2, x)?) * &(&lam * &lam))
                            * &sk.tet(a, a2, c, a2, a, x)?;
                        acc = &acc + &term;
                    }
                    let v = &(&acc * &sk.delta(a2)) * &theta_inv(a2, a2, c)?;
                    nval.insert((a, a2, c), v);
                }
            }
        }
        let mut s1 = CycMatrix::zeros(&ring, d, d);
        let mut s2 = CycMatrix::zeros(&ring, d, d);
        for &(a, c, b) in &lab {
            for &(a2, c2, b2) in &lab {
                if c2 != c {
                    continue;
                }
                if b2 == b {
                    s1.set(idx[&(a2, c, b)], idx[&(a, c, b)], nval[&(a, a2, c)].clone());
                }
                if a2 == a {
                    s2.set(idx[&(a, c, b2)], idx[&(a, c, b)], nval[&(b, b2, c)].clone());
                }
            }
        }
        let s1_inv = block_scalar_inverse(&s1)?;
        let s2_inv = block_scalar_inverse(&s2)?;
        let t1_inv = diag_conj(&t1);
        let t5_inv = diag_conj(&t5);

        // F-move to the theta basis (a, b, x)
        let mut tb: Vec<(Color, Color, Color)> = Vec::new();
        for &a in &cols {
            for &b in &cols {
                for &x in &cols {
                    if sk.admissible(a, b, x) {
                        tb.push((a, b, x));
                    }
                }
            }
        }
        if tb.len() != d {
            return Err(Error::Internal("theta and dumbbell bases differ in size".into()));
        }
        let tidx: HashMap<(Color, Color, Color), usize> = tb.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut pm = CycMatrix::zeros(&ring, d, d);
        let mut pm_inv = CycMatrix::zeros(&ring, d, d);
        for &(a, c, b) in &lab {
            for &x in &cols {
                if !sk.admissible(a, b, x) {
                    continue;
                }
                let tet = sk.tet(a, b, c, b, a, x)?;
                let ti = theta_inv(a, b, x)?;
                pm.set(tidx[&(a, b, x)], idx[&(a, c, b)], &(&(&tet * &sk.delta(x)) * &ti) * &ti);
                let back = &(&(&tet * &sk.delta(c)) * &theta_inv(a, a, c)?) * &theta_inv(b, b, c)?;
                pm_inv.set(idx[&(a, c, b)], tidx[&(a, b, x)], back);
            }
        }
        if !pm.mul(&pm_inv).is_identity() {
            return Err(Error::Internal("F-move is not inverted by the reverse move".into()));
        }
        let dx = CycMatrix::diagonal(&ring, tb.iter().map(|&(_, _, x)| sk.t_eigenvalue(x)).collect());
        let t3 = pm_inv.mul(&dx).mul(&pm);
        let t3_inv = pm_inv.mul(&diag_conj(&dx)).mul(&pm);

        let eta_inv = ring.eta().inverse()?;
        let mut gram = Vec::with_capacity(d);
        for &(a, c, b) in &lab {
            let num = &sk.theta(a, a, c)? * &sk.theta(b, b, c)?;
            let den = &(&sk.delta(a) * &sk.delta(b)) * &sk.delta(c);
            gram.push(&(&eta_inv * &num) * &den.inverse()?);
        }

        let mut gens = HashMap::new();
        gens.insert(Curve::C2, (s1.mul(&t1).mul(&s1_inv), s1.mul(&t1_inv).mul(&s1_inv)));
        gens.insert(Curve::C4, (s2.mul(&t5).mul(&s2_inv), s2.mul(&t5_inv).mul(&s2_inv)));
        gens.insert(Curve::C3, (t3, t3_inv));
        gens.insert(Curve::C1, (t1.clone(), t1_inv));
        gens.insert(Curve::C5, (t5.clone(), t5_inv));
        gens.insert(Curve::S, (ts.clone(), diag_conj(&ts)));
        Ok(QuantumRep { ring, basis, gens, gram })
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn genus(&self) -> u8 {
        self.basis.genus
    }

    pub fn basis(&self) -> &RepBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Diagonal of the invariant Hermitian form.
    pub fn gram(&self) -> &[CycElem] {
        &self.gram
    }

    pub fn generator(&self, c: Curve) -> Result<&CycMatrix> {
        self.gens
            .get(&c)
            .map(|g| &g.0)
            .ok_or_else(|| Error::usage(format!("curve {c} is not in the genus-{} catalogue", self.genus())))
    }

    fn letter(&self, c: Curve, e: i64) -> Result<CycMatrix> {
        let (m, mi) = self
            .gens
            .get(&c)
            .ok_or_else(|| Error::usage(format!("curve {c} is not in the genus-{} catalogue", self.genus())))?;
        Ok(if e >= 0 { m.pow(e as u64) } else { mi.pow(e.unsigned_abs()) })
    }

    /// `ρ(x1 … xk) = ρ(x1) ⋯ ρ(xk)`.
    pub fn rho(&self, w: &TwistWord) -> Result<CycMatrix> {
        if w.genus() != self.genus() {
            return Err(Error::usage("word and representation live on different surfaces"));
        }
        let mut acc = CycMatrix::identity(&self.ring, self.dim());
        for &(c, e) in w.letters() {
            acc = acc.mul(&self.letter(c, e)?);
        }
        Ok(acc)
    }

    /// `ρ(w) v` without forming the matrix.
    pub fn apply(&self, w: &TwistWord, v: &[CycElem]) -> Result<Vec<CycElem>> {
        let mut v = v.to_vec();
        for &(c, e) in w.letters().iter().rev() {
            let (m, mi) = self.gens.get(&c).ok_or_else(|| Error::usage(format!("curve {c} not catalogued")))?;
            let g = if e >= 0 { m } else { mi };
            for _ in 0..e.unsigned_abs() {
                v = g.mul_vec(&v);
            }
        }
        Ok(v)
    }

    pub fn gram_matrix(&self) -> CycMatrix {
        CycMatrix::diagonal(&self.ring, self.gram.clone())
    }

    /// `M† G M = λ G` for some scalar `λ`.
    pub fn hermitian_check(&self, m: &CycMatrix) -> bool {
        let g = self.gram_matrix();
        m.adjoint().mul(&g).mul(m).proj_equal(&g)
    }

    pub fn reduce(&self, r: &ResidueSpec) -> Result<ModRep> {
        let mut gens = HashMap::new();
        for (c, (m, mi)) in &self.gens {
            gens.insert(*c, (reduce_matrix(m, r)?, reduce_matrix(mi, r)?));
        }
        Ok(ModRep {
            field: r.field(),
            genus: self.genus(),
            dim: self.dim(),
            gens,
        })
    }

    /// Relation suite: braids for adjacent chain curves, commutation for
    /// disjoint ones, `(t_{c1} t_{c2})^6 ∝ t_s`, `ρ(t^p) = I`, and Hermitian invariance.
    pub fn relation_suite(&self) -> Result<Vec<RelationCheck>> {
        let mut out = Vec::new();
        let p = self.ring.p();
        let rho = |s: &str| self.rho(&TwistWord::parse(self.genus(), s)?);
        let mut push = |name: String, holds: bool| out.push(RelationCheck { name, holds });
        let cat: Vec<Curve> = Curve::catalogue(self.genus())?.to_vec();
        if self.genus() == 1 {
            push("braid alpha beta".into(), rho("alpha*beta*alpha")?.proj_equal(&rho("beta*alpha*beta")?));
        } else {
            let chain = Curve::HUMPHRIES;
            for i in 0..5 {
                for j in i + 1..5 {
                    let (x, y) = (chain[i], chain[j]);
                    if j == i + 1 {
                        let holds = rho(&format!("{x}*{y}*{x}"))?.proj_equal(&rho(&format!("{y}*{x}*{y}"))?);
                        push(format!("braid {x} {y}"), holds);
                    } else {
                        let holds = rho(&format!("{x}*{y}"))?.proj_equal(&rho(&format!("{y}*{x}"))?);
                        push(format!("commute {x} {y}"), holds);
                    }
                }
            }
            for x in [Curve::C1, Curve::C2, Curve::C4, Curve::C5] {
                let holds = rho(&format!("s*{x}"))?.proj_equal(&rho(&format!("{x}*s"))?);
                push(format!("commute s {x}"), holds);
            }
            push("two-chain (c1 c2)^6 = s".into(), rho("(c1*c2)^6")?.proj_equal(&rho("s")?));
        }
        for &c in &cat {
            push(format!("order p {c}"), self.letter(c, p as i64)?.is_identity());
            push(format!("hermitian {c}"), self.hermitian_check(self.generator(c)?));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub name: String,
    pub holds: bool,
}

fn sorted3(a: Color, b: Color, c: Color) -> (Color, Color, Color) {
    let mut v = [a, b, c];
    v.sort();
    (v[0], v[1], v[2])
}

/// Inverse of a diagonal matrix of roots of unity.
fn diag_conj(m: &CycMatrix) -> CycMatrix {
    let n = m.rows();
    CycMatrix::diagonal(m.ring(), (0..n).map(|i| m.get(i, i).conj()).collect())
}

/// `S⁻¹ = S · diag(1/λ)` when `S²` is diagonal.
fn block_scalar_inverse(s: &CycMatrix) -> Result<CycMatrix> {
    let sq = s.mul(s);
    let n = s.rows();
    let mut lam_inv = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && !sq.get(i, j).is_zero() {
                return Err(Error::Internal("S move does not square to a block scalar".into()));
            }
        }
        lam_inv.push(sq.get(i, i).inverse()?);
    }
    Ok(s.mul(&CycMatrix::diagonal(s.ring(), lam_inv)))
}

pub fn reduce_matrix(m: &CycMatrix, r: &ResidueSpec) -> Result<FqMatrix> {
    let f = r.field();
    let rows = m
        .to_rows()
        .iter()
        .map(|row| row.iter().map(|x| r.reduce(x)).collect::<Result<Vec<u64>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(FqMatrix::from_rows(&f, rows))
}

/// The representation reduced modulo `J`.
#[derive(Clone)]
pub struct ModRep {
    field: Fq,
    genus: u8,
    dim: usize,
    gens: HashMap<Curve, (FqMatrix, FqMatrix)>,
}

impl ModRep {
    pub fn field(&self) -> Fq {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn genus(&self) -> u8 {
        self.genus
    }

    pub fn letter(&self, c: Curve, e: i64) -> Result<FqMatrix> {
        let (m, mi) = self
            .gens
            .get(&c)
            .ok_or_else(|| Error::usage(format!("curve {c} is not in the genus-{} catalogue", self.genus)))?;
        Ok(if e >= 0 { m.pow(e as u64) } else { mi.pow(e.unsigned_abs()) })
    }

    /// `ρ(w) v` over `F_q`, one unit letter at a time.
    pub fn apply(&self, w: &TwistWord, v: &[u64]) -> Result<Vec<u64>> {
        let mut v = v.to_vec();
        for &(c, e) in w.letters().iter().rev() {
            let (m, mi) = self.gens.get(&c).ok_or_else(|| Error::usage(format!("curve {c} not catalogued")))?;
            let g = if e >= 0 { m } else { mi };
            for _ in 0..e.unsigned_abs() {
                v = g.mul_vec(&v);
            }
        }
        Ok(v)
    }

    pub fn rho(&self, w: &TwistWord) -> Result<FqMatrix> {
        if w.genus() != self.genus {
            return Err(Error::usage("word and representation live on different surfaces"));
        }
        let mut acc = FqMatrix::identity(&self.field, self.dim);
        for &(c, e) in w.letters() {
            acc = acc.mul(&self.letter(c, e)?);
        }
        Ok(acc)
    }
}

/// Dimension of the `F_q`-span of the given matrices inside `d × d` matrices.
pub fn algebra_span_dim(mats: &[FqMatrix]) -> usize {
    let Some(first) = mats.first() else { return 0 };
    let f = *first.scalars();
    let rows: Vec<Vec<u64>> = mats.iter().map(|m| m.entries().to_vec()).collect();
    linalg::rank_mod(&rows, f)
}

/// `rho_mod` over a sample of words, then [`algebra_span_dim`].
pub fn algebra_span_dim_of_words(rep: &ModRep, words: &[TwistWord]) -> Result<usize> {
    let mats = words.iter().map(|w| rep.rho(w)).collect::<Result<Vec<_>>>()?;
    Ok(algebra_span_dim(&mats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rep(p: u64, g: u8) -> QuantumRep {
        QuantumRep::new(&RingSpec::new(p).unwrap(), g).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(rep_dim(1, 5).unwrap(), 2);
        assert_eq!(rep_dim(1, 7).unwrap(), 3);
        assert_eq!(rep_dim(2, 5).unwrap(), 5);
        assert_eq!(rep_dim(2, 7).unwrap(), 14);
        for p in [5, 7, 11] {
            assert_eq!(verlinde_dim(p, 1) as usize, rep_dim(1, p).unwrap());
            assert_eq!(verlinde_dim(p, 2) as usize, rep_dim(2, p).unwrap());
        }
    }

    #[test]
    fn genus1_twist_power_is_identity() {
        let r = rep(5, 1);
        assert!(r.rho(&TwistWord::twist(Curve::Alpha, 5)).unwrap().is_identity());
        assert!(r.rho(&TwistWord::identity(1)).unwrap().is_identity());
        let s = Skein::new(r.ring()).s_matrix();
        assert!(!CycMatrix::identity(r.ring(), 2).proj_equal(&s));
    }

    #[test]
    fn separating_twist_is_diagonal_and_nontrivial() {
        let r = rep(5, 2);
        let ts = r.rho(&TwistWord::twist(Curve::S, 1)).unwrap();
        let sk = Skein::new(r.ring());
        for (i, l) in r.basis().labels.iter().enumerate() {
            assert_eq!(*ts.get(i, i), sk.t_eigenvalue(l[1]));
        }
        assert!(!ts.is_scalar());
    }

    #[test]
    fn relation_suites_hold() {
        for (p, g) in [(5, 1), (7, 1), (5, 2), (7, 2)] {
            for check in rep(p, g).relation_suite().unwrap() {
                assert!(check.holds, "p = {p}, genus {g}: {}", check.name);
            }
        }
    }

    #[test]
    fn reduction_is_compatible() {
        let r = rep(5, 2);
        let rs = ResidueSpec::new(r.ring(), 41).unwrap();
        let m = r.reduce(&rs).unwrap();
        let w = TwistWord::parse(2, "c1 * c3^-1 * s * c4^2 * c2").unwrap();
        assert_eq!(reduce_matrix(&r.rho(&w).unwrap(), &rs).unwrap(), m.rho(&w).unwrap());
        let ts = m.rho(&TwistWord::twist(Curve::S, 1)).unwrap();
        let mut diag: Vec<u64> = (0..5).map(|i| *ts.get(i, i)).collect();
        diag.dedup();
        assert!(diag.len() >= 2);
    }

    #[test]
    fn span_of_identity_is_one() {
        let r = rep(5, 2);
        let m = r.reduce(&ResidueSpec::new(r.ring(), 41).unwrap()).unwrap();
        assert_eq!(algebra_span_dim_of_words(&m, &[TwistWord::identity(2)]).unwrap(), 1);
    }

    fn arb_word() -> impl Strategy<Value = TwistWord> {
        prop::collection::vec((prop::sample::select(Curve::GENUS2.to_vec()), -2i64..=2), 0..6)
            .prop_map(|ls| TwistWord::new(2, ls).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn mod_rep_is_projectively_functorial(a in arb_word(), b in arb_word()) {
            let r = rep(5, 2);
            let m = r.reduce(&ResidueSpec::new(r.ring(), 41).unwrap()).unwrap();
            let ab = a.concat(&b).unwrap();
            prop_assert!(m.rho(&ab).unwrap().proj_equal(&m.rho(&a).unwrap().mul(&m.rho(&b).unwrap())));
            let id = m.rho(&a).unwrap().mul(&m.rho(&a.inverse()).unwrap());
            prop_assert!(id.is_scalar());
        }

        #[test]
        fn words_preserve_the_hermitian_form(w in arb_word()) {
            let r = rep(5, 2);
            prop_assert!(r.hermitian_check(&r.rho(&w).unwrap()));
        }
    }
}
