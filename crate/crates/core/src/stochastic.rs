//! Finite matrix groups over `F_q`, exact mixing of random walks on them,
//! the hyperplane-hitting probability, and Monte Carlo estimates of the
//! probability that a random gluing kills the boundary vector modulo `J`.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fkb::compression_indices;
use crate::linalg::nullspace_mod;
use crate::manifold::{ManifoldDesc, RtContext};
use crate::matrix::FqMatrix;
use crate::mcg::{word_in_subgroup, TwistWord};
use crate::rep::{rep_dim, verlinde_dim};
use crate::ring::{Fq, ResidueSpec};

/// Square matrix over `F_q`, row-major, in projective normal form when it
/// lives in a projective group.
pub type Mat = Vec<u64>;

pub fn mat_mul(f: Fq, n: usize, a: &[u64], b: &[u64]) -> Mat {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = f.add(out[i * n + j], f.mul(x, b[k * n + j]));
            }
        }
    }
    out
}

pub fn identity(n: usize) -> Mat {
    let mut m = vec![0; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

/// Scales so that the first nonzero entry is 1.
pub fn projective_normal(f: Fq, mut m: Mat) -> Mat {
    if let Some(&lead) = m.iter().find(|&&x| x != 0) {
        let inv = f.inv(lead).expect("nonzero");
        for x in m.iter_mut() {
            *x = f.mul(*x, inv);
        }
    }
    m
}

pub fn determinant(f: Fq, n: usize, m: &[u64]) -> u64 {
    let mut a: Vec<Vec<u64>> = m.chunks(n).map(<[u64]>::to_vec).collect();
    let mut det = 1;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| a[r][c] != 0) else { return 0 };
        if piv != c {
            a.swap(piv, c);
            det = f.neg(det);
        }
        det = f.mul(det, a[c][c]);
        let inv = f.inv(a[c][c]).unwrap();
        for r in c + 1..n {
            let k = f.mul(a[r][c], inv);
            if k != 0 {
                for j in c..n {
                    a[r][j] = f.sub(a[r][j], f.mul(k, a[c][j]));
                }
            }
        }
    }
    det
}

/// Elementary transvections `I + E_ij` and `I − E_ij`, `i ≠ j`.
pub fn sl_generators(f: Fq, n: usize) -> Vec<Mat> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                for c in [1, f.q() - 1] {
                    let mut m = identity(n);
                    m[i * n + j] = c;
                    out.push(m);
                }
            }
        }
    }
    out.dedup();
    out
}

/// `|PSL_n(F_q)| = q^{n(n−1)/2} ∏_{k=2}^{n} (q^k − 1) / gcd(n, q − 1)`.
pub fn psl_order(q: u64, n: u32) -> BigInt {
    let qb = BigInt::from(q);
    let mut order = qb.pow(n * (n - 1) / 2);
    for k in 2..=n {
        order *= qb.pow(k) - 1u32;
    }
    order / BigInt::from(n as u64).gcd(&BigInt::from(q - 1))
}

/// A finite group of projective matrices, closed under the generators.
#[derive(Debug, Clone)]
pub struct MatrixGroup {
    pub field: Fq,
    pub n: usize,
    pub elements: Vec<Mat>,
    index: HashMap<Mat, usize>,
}

impl MatrixGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, m: &[u64]) -> Option<usize> {
        self.index.get(&projective_normal(self.field, m.to_vec())).copied()
    }

    pub fn identity_index(&self) -> usize {
        0
    }
}

#[derive(Debug, Clone)]
pub enum Enumeration {
    Complete(MatrixGroup),
    CapExceeded { partial: usize, cap: usize },
}

impl Enumeration {
    pub fn complete(self) -> Result<MatrixGroup> {
        match self {
            Enumeration::Complete(g) => Ok(g),
            Enumeration::CapExceeded { cap, .. } => Err(Error::Budget {
                what: "group enumeration".into(),
                limit: cap as u64,
            }),
        }
    }
}

/// Breadth-first closure of the projective images of the generators.
pub fn enumerate_group(f: Fq, n: usize, generators: &[Mat], cap: usize) -> Result<Enumeration> {
    if cap == 0 {
        return Err(Error::usage("order cap must be at least 1"));
    }
    if generators.iter().any(|g| g.len() != n * n || determinant(f, n, g) == 0) {
        return Err(Error::usage("generators must be invertible n x n matrices"));
    }
    let gens: Vec<Mat> = generators.iter().map(|g| projective_normal(f, g.clone())).collect();
    let id = identity(n);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &gens {
            let prod = projective_normal(f, mat_mul(f, n, &elements[i], g));
            if index.contains_key(&prod) {
                continue;
            }
            if elements.len() == cap {
                return Ok(Enumeration::CapExceeded { partial: elements.len(), cap });
            }
            index.insert(prod.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(prod);
        }
    }
    Ok(Enumeration::Complete(MatrixGroup { field: f, n, elements, index }))
}

/// `PSL_n(F_q)` from its transvection generators.
pub fn psl(q: u64, n: usize, cap: usize) -> Result<MatrixGroup> {
    let f = Fq::new(q)?;
    enumerate_group(f, n, &sl_generators(f, n), cap)?.complete()
}

/// Step distribution of a random walk: generators with positive rational
/// weights summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSpec<G> {
    pub steps: Vec<(G, BigRational)>,
    pub length: usize,
    pub seed: u64,
}

impl<G: Clone> WalkSpec<G> {
    pub fn new(steps: Vec<(G, BigRational)>, length: usize, seed: u64) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::usage("a walk needs at least one generator"));
        }
        if steps.iter().any(|(_, w)| !w.is_positive()) {
            return Err(Error::usage("walk weights must be positive"));
        }
        let total: BigRational = steps.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() {
            return Err(Error::usage(format!("walk weights sum to {total}, not 1")));
        }
        Ok(WalkSpec { steps, length, seed })
    }

    /// Uniform weights on the given generators.
    pub fn uniform(gens: Vec<G>, length: usize, seed: u64) -> Result<Self> {
        let k = gens.len().max(1);
        let w = BigRational::new(1.into(), k.into());
        Self::new(gens.into_iter().map(|g| (g, w.clone())).collect(), length, seed)
    }

    /// Hold with probability ½, otherwise a uniform generator or inverse.
    /// `inverses` must list the inverse of each generator.
    pub fn lazy_symmetric(identity: G, gens: Vec<G>, inverses: Vec<G>, length: usize, seed: u64) -> Result<Self> {
        if gens.is_empty() || gens.len() != inverses.len() {
            return Err(Error::usage("lazy walks need generators with matching inverses"));
        }
        let w = BigRational::new(1.into(), (4 * gens.len()).into());
        let mut steps = vec![(identity, BigRational::new(1.into(), 2.into()))];
        steps.extend(gens.into_iter().chain(inverses).map(|g| (g, w.clone())));
        Self::new(steps, length, seed)
    }

    /// Integer weights over a common denominator.
    fn integer_weights(&self) -> (Vec<BigInt>, BigInt) {
        let l = self
            .steps
            .iter()
            .fold(BigInt::one(), |acc, (_, w)| acc.lcm(w.denom()));
        let ws = self
            .steps
            .iter()
            .map(|(_, w)| w.numer() * (&l / w.denom()))
            .collect();
        (ws, l)
    }

    /// Draws a step index; weights sampled exactly through the common denominator.
    fn sampler(&self) -> Result<(Vec<u64>, u64)> {
        let (ws, l) = self.integer_weights();
        let l = l.to_u64().ok_or_else(|| Error::usage("walk weight denominators too large to sample"))?;
        let mut cum = Vec::with_capacity(ws.len());
        let mut acc = 0u64;
        for w in ws {
            acc += w.to_u64().unwrap();
            cum.push(acc);
        }
        Ok((cum, l))
    }
}

fn draw(cum: &[u64], l: u64, rng: &mut ChaCha8Rng) -> usize {
    let x = rng.gen_range(0..l);
    cum.partition_point(|&c| c <= x)
}

/// Lazy symmetric walk on `PSL_n(F_q)` with the transvection generators.
pub fn psl_lazy_walk(group: &MatrixGroup, length: usize, seed: u64) -> Result<WalkSpec<Mat>> {
    let f = group.field;
    let n = group.n;
    let gens: Vec<Mat> = sl_generators(f, n).into_iter().filter(|m| m.iter().all(|&x| x <= 1)).collect();
    let invs: Vec<Mat> = gens
        .iter()
        .map(|g| g.iter().enumerate().map(|(k, &x)| if k % (n + 1) != 0 && x != 0 { f.neg(x) } else { x }).collect())
        .collect();
    WalkSpec::lazy_symmetric(identity(n), gens, invs, length, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixingMethod {
    ExactTransition,
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MixingReport {
    pub group_order: usize,
    pub method: MixingMethod,
    /// Exact `TV(d)` for `d = 0, 1, …`.
    pub tv: Vec<String>,
    pub tv_decimal: Vec<f64>,
    pub nonincreasing: bool,
    /// First step with `TV < 0.01`, if reached.
    pub first_below_one_percent: Option<usize>,
}

/// Exact distribution of the walk started at the identity, by repeated
/// application of the transition operator over the element space.
pub fn tv_to_uniform(spec: &WalkSpec<Mat>, group: &MatrixGroup, steps: usize) -> Result<MixingReport> {
    let order = group.order();
    let perms: Vec<Vec<usize>> = spec
        .steps
        .iter()
        .map(|(g, _)| {
            group
                .index_of(g)
                .ok_or_else(|| Error::usage("walk generator lies outside the enumerated group"))?;
            Ok(group
                .elements
                .iter()
                .map(|x| group.index_of(&mat_mul(group.field, group.n, x, g)).expect("closed"))
                .collect())
        })
        .collect::<Result<_>>()?;
    let (ws, l) = spec.integer_weights();
    // P_d = mass / l^d
    let mut mass = vec![BigInt::zero(); order];
    mass[group.identity_index()] = BigInt::one();
    let mut denom = BigInt::one();
    let g = BigInt::from(order);
    let mut tv = Vec::with_capacity(steps + 1);
    let mut tv_decimal = Vec::with_capacity(steps + 1);
    let mut first = None;
    for d in 0..=steps {
        let total: BigInt = mass.iter().sum();
        if total != denom {
            return Err(Error::Internal("walk distribution lost mass".into()));
        }
        let dev: BigInt = mass.iter().map(|m| (m * &g - &denom).abs()).sum();
        let t = BigRational::new(dev, BigInt::from(2) * &g * &denom);
        let td = t.to_f64().unwrap_or(0.0);
        if first.is_none() && td < 0.01 {
            first = Some(d);
        }
        tv.push(t.to_string());
        tv_decimal.push(td);
        if d == steps {
            break;
        }
        let mut next = vec![BigInt::zero(); order];
        for (perm, w) in perms.iter().zip(&ws) {
            for (i, m) in mass.iter().enumerate() {
                if !m.is_zero() {
                    next[perm[i]] += m * w;
                }
            }
        }
        mass = next;
        denom *= &l;
    }
    let nonincreasing = tv_decimal.windows(2).all(|w| w[1] <= w[0]);
    Ok(MixingReport {
        group_order: order,
        method: MixingMethod::ExactTransition,
        tv,
        tv_decimal,
        nonincreasing,
        first_below_one_percent: first,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HyperplaneMode {
    Formula,
    Enumerate { cap: usize },
    Sample { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Probability {
    Exact {
        value: String,
        decimal: f64,
    },
    #[serde(rename_all = "camelCase")]
    Estimate {
        hits: u64,
        trials: u64,
        frequency: String,
        decimal: f64,
        /// Half-width of the 95% normal-approximation interval.
        radius95: f64,
    },
}

impl Probability {
    fn exact(r: BigRational) -> Self {
        Probability::Exact {
            decimal: r.to_f64().unwrap_or(f64::NAN),
            value: r.to_string(),
        }
    }

    fn estimate(hits: u64, trials: u64) -> Self {
        let (p, radius) = binomial_interval(hits, trials);
        let frequency = if trials == 0 {
            "0".to_string()
        } else {
            BigRational::new(hits.into(), trials.into()).to_string()
        };
        Probability::Estimate {
            hits,
            trials,
            frequency,
            decimal: p,
            radius95: radius,
        }
    }

    pub fn decimal(&self) -> f64 {
        match self {
            Probability::Exact { decimal, .. } | Probability::Estimate { decimal, .. } => *decimal,
        }
    }
}

fn binomial_interval(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 0.0);
    }
    let p = hits as f64 / trials as f64;
    (p, 1.96 * (p * (1.0 - p) / trials as f64).sqrt())
}

/// `(q^m − 1) / (q^n − 1)`.
pub fn hyperplane_formula(q: u64, n: u32, m: u32) -> BigRational {
    let qb = BigInt::from(q);
    BigRational::new(qb.pow(m) - 1u32, qb.pow(n) - 1u32)
}

/// Probability that `X v` lands in a fixed `m`-dimensional subspace for `X`
/// uniform in `PSL_n(F_q)` and fixed nonzero `v`.
pub fn hyperplane_prob(q: u64, n: usize, m: usize, mode: &HyperplaneMode) -> Result<Probability> {
    if m == 0 || m >= n {
        return Err(Error::usage(format!("need 1 <= m < n, got m = {m}, n = {n}")));
    }
    let f = Fq::new(q)?;
    // v = e1, V = span(e1, …, em): the first column must vanish below row m
    let lands = |x: &[u64]| (m..n).all(|i| x[i * n] == 0);
    match mode {
        HyperplaneMode::Formula => Ok(Probability::exact(hyperplane_formula(q, n as u32, m as u32))),
        HyperplaneMode::Enumerate { cap } => {
            let g = psl(q, n, *cap)?;
            let hits = g.elements.iter().filter(|x| lands(x)).count();
            Ok(Probability::exact(BigRational::new(hits.into(), g.order().into())))
        }
        HyperplaneMode::Sample { trials, seed } => {
            let hits = (0..*trials)
                .into_par_iter()
                .filter(|&t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    rng.set_stream(t);
                    loop {
                        let x: Mat = (0..n * n).map(|_| rng.gen_range(0..q)).collect();
                        if determinant(f, n, &x) != 0 {
                            return lands(&x);
                        }
                    }
                })
                .count() as u64;
            Ok(Probability::estimate(hits, *trials))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MonteCarloReport {
    pub p: u64,
    pub q: u64,
    pub boundary_genus: u8,
    pub walk_length: usize,
    pub trials: u64,
    pub hits: u64,
    pub frequency: Probability,
    /// Dimension of the kernel of the compression map after the base gluing, mod `J`.
    pub kernel_dim: usize,
    pub space_dim: usize,
    /// `(q^k − 1)/(q^D − 1)` for the measured kernel dimension `k`.
    pub exact_for_kernel: Probability,
    /// `(q^{D − d∂} − 1)/(q^D − 1)` from the TQFT dimensions.
    pub bound: Probability,
    /// Standard deviation of the frequency under the exact probability.
    pub sigma: f64,
}

/// Default walk on `T_n`-words: uniform over `count` certified leaves and their inverses.
pub fn subgroup_walk(n: i64, count: usize, conjugator_len: usize, length: usize, seed: u64) -> Result<WalkSpec<TwistWord>> {
    let mut gens = Vec::with_capacity(2 * count);
    for i in 0..count {
        let w = word_in_subgroup(n, 1, conjugator_len, seed.wrapping_add(i as u64))?.word;
        gens.push(w.inverse());
        gens.push(w);
    }
    WalkSpec::uniform(gens, length, seed)
}

/// Samples `f_d = x₁ ⋯ x_d` and tests whether the gluing `w₀ f_d` sends the
/// handlebody vector into the compression kernel mod `J`.
pub fn montecarlo_vanishing(
    ctx: &RtContext,
    base: &ManifoldDesc,
    r: &ResidueSpec,
    spec: &WalkSpec<TwistWord>,
    trials: u64,
) -> Result<MonteCarloReport> {
    let ManifoldDesc::Compression { boundary_genus, word: w0 } = base else {
        return Err(Error::usage("Monte Carlo runs on compression descriptions"));
    };
    let keep = compression_indices(ctx.p(), *boundary_genus)?;
    let rep = ctx.rep(2)?.reduce(r)?;
    let f = r.field();
    let dim = rep.dim();
    let base_m = rep.rho(w0)?;
    let proj: Vec<Vec<u64>> = keep.iter().map(|&i| base_m.row(i).to_vec()).collect();
    let kernel_dim = nullspace_mod(&proj, dim, f).len();
    if kernel_dim == dim {
        return Err(Error::Degenerate("the compression map vanishes identically mod J".into()));
    }
    let mats: Vec<FqMatrix> = spec.steps.iter().map(|(w, _)| rep.rho(w)).collect::<Result<_>>()?;
    let (cum, l) = spec.sampler()?;
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(t);
            let picks: Vec<usize> = (0..spec.length).map(|_| draw(&cum, l, &mut rng)).collect();
            let mut v = vec![0u64; dim];
            v[0] = 1;
            for &k in picks.iter().rev() {
                v = mats[k].mul_vec(&v);
            }
            proj.iter().all(|row| row.iter().zip(&v).fold(0, |acc, (a, b)| f.add(acc, f.mul(*a, *b))) == 0)
        })
        .count() as u64;
    let q = r.q();
    let exact = hyperplane_formula(q, dim as u32, kernel_dim as u32);
    let d_boundary = if *boundary_genus == 0 { 1 } else { rep_dim(*boundary_genus, ctx.p())? };
    let bound = hyperplane_formula(q, dim as u32, (dim - d_boundary) as u32);
    let pe = exact.to_f64().unwrap();
    let sigma = if trials == 0 { 0.0 } else { (pe * (1.0 - pe) / trials as f64).sqrt() };
    Ok(MonteCarloReport {
        p: ctx.p(),
        q,
        boundary_genus: *boundary_genus,
        walk_length: spec.length,
        trials,
        hits,
        frequency: Probability::estimate(hits, trials),
        kernel_dim,
        space_dim: dim,
        exact_for_kernel: Probability::exact(exact),
        bound: Probability::exact(bound),
        sigma,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundPoint {
    pub genus: u32,
    pub dim: u64,
    pub bound: f64,
}

/// Bound `(q^{D_g − d∂} − 1)/(q^{D_g} − 1)` for growing genus `g` of the
/// glued surface, with `d∂` the boundary dimension; it tends to `q^{−d∂}`.
pub fn remark_series(p: u64, q: u64, boundary_genus: u32, genera: std::ops::RangeInclusive<u32>) -> Vec<BoundPoint> {
    let d_boundary = if boundary_genus == 0 { 1 } else { verlinde_dim(p, boundary_genus) } as f64;
    let qf = q as f64;
    genera
        .map(|g| {
            let d = verlinde_dim(p, g);
            let x = qf.powf(-(d as f64));
            BoundPoint {
                genus: g,
                dim: d,
                bound: (qf.powf(-d_boundary) - x) / (1.0 - x),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn group_orders() {
        let f5 = Fq::new(5).unwrap();
        assert_eq!(enumerate_group(f5, 2, &[identity(2)], 10).unwrap().complete().unwrap().order(), 1);
        for (q, n) in [(2u64, 2usize), (3, 2), (5, 2), (11, 2), (3, 3)] {
            assert_eq!(BigInt::from(psl(q, n, 100_000).unwrap().order()), psl_order(q, n as u32), "q = {q}, n = {n}");
        }
        assert!(matches!(
            enumerate_group(f5, 2, &sl_generators(f5, 2), 10).unwrap(),
            Enumeration::CapExceeded { partial: 10, cap: 10 }
        ));
    }

    #[test]
    fn hyperplane_enumeration_matches_formula() {
        for (q, n, m) in [(2, 2, 1), (3, 2, 1), (5, 2, 1), (3, 3, 1), (3, 3, 2)] {
            let e = hyperplane_prob(q, n, m, &HyperplaneMode::Enumerate { cap: 10_000 }).unwrap();
            assert_eq!(e, hyperplane_prob(q, n, m, &HyperplaneMode::Formula).unwrap());
        }
        assert_eq!(hyperplane_formula(3, 2, 1).to_string(), "1/4");
        assert!(hyperplane_prob(3, 2, 2, &HyperplaneMode::Formula).is_err());
    }

    #[test]
    fn sampled_hyperplane_is_close() {
        let p = hyperplane_prob(5, 2, 1, &HyperplaneMode::Sample { trials: 4000, seed: 3 }).unwrap();
        assert!((p.decimal() - 1.0 / 6.0).abs() < 0.03);
        assert_eq!(p, hyperplane_prob(5, 2, 1, &HyperplaneMode::Sample { trials: 4000, seed: 3 }).unwrap());
    }

    #[test]
    fn psl2_f5_mixes() {
        let g = psl(5, 2, 1000).unwrap();
        let spec = psl_lazy_walk(&g, 200, 0).unwrap();
        let rep = tv_to_uniform(&spec, &g, 200).unwrap();
        assert!(rep.nonincreasing);
        assert!(rep.first_below_one_percent.is_some());
        assert!(rep.tv_decimal[0] > 0.9);
    }

    #[test]
    fn identity_walk_does_not_mix() {
        let g = psl(5, 2, 1000).unwrap();
        let spec = WalkSpec::uniform(vec![identity(2)], 10, 0).unwrap();
        let rep = tv_to_uniform(&spec, &g, 10).unwrap();
        assert!(rep.tv.iter().all(|t| *t == rep.tv[0]));
        assert_eq!(rep.first_below_one_percent, None);
    }

    #[test]
    fn walk_spec_validation() {
        let half = BigRational::new(1.into(), 2.into());
        assert!(WalkSpec::new(vec![(0u8, half.clone())], 1, 0).is_err());
        assert!(WalkSpec::<u8>::new(vec![], 1, 0).is_err());
        assert!(WalkSpec::new(vec![(0u8, half.clone()), (1, half)], 1, 0).is_ok());
    }

    #[test]
    fn montecarlo_edge_cases() {
        let ctx = RtContext::new(5).unwrap();
        let r = ResidueSpec::new(ctx.ring(), 41).unwrap();
        let base: ManifoldDesc = "compress:0:".parse().unwrap();
        let spec = subgroup_walk(3, 4, 4, 10, 1).unwrap();
        let empty = montecarlo_vanishing(&ctx, &base, &r, &spec, 0).unwrap();
        assert_eq!((empty.hits, empty.trials), (0, 0));
        assert_eq!(empty.kernel_dim, 4);
        let a = montecarlo_vanishing(&ctx, &base, &r, &spec, 50).unwrap();
        assert_eq!(a, montecarlo_vanishing(&ctx, &base, &r, &spec, 50).unwrap());
    }

    #[test]
    fn remark_series_tends_to_inverse_square() {
        let pts = remark_series(5, 41, 1, 2..=12);
        let target = 1.0 / (41.0f64 * 41.0);
        assert!((pts.last().unwrap().bound - target).abs() < 1e-12);
        assert!(pts.windows(2).all(|w| (w[1].bound - target).abs() <= (w[0].bound - target).abs()));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn distributions_stay_stochastic(gen_count in 1usize..4, steps in 1usize..15) {
            let g = psl(3, 2, 100).unwrap();
            let gens: Vec<Mat> = g.elements.iter().skip(1).take(gen_count).cloned().collect();
            let spec = WalkSpec::uniform(gens, steps, 0).unwrap();
            let rep = tv_to_uniform(&spec, &g, steps).unwrap();
            prop_assert!(rep.tv_decimal.iter().all(|t| (0.0..=1.0).contains(t)));
        }
    }
}
