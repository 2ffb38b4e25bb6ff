//! Boundary vectors of compression-body gluings, FKB ideals, and the
//! vanish-mod-`J` obstruction to embedding.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{ManifoldDesc, RtContext};
use crate::mcg::{word_in_subgroup, Curve, TwistWord, WordExpr};
use crate::rep::ModRep;
use crate::ring::{CycElem, CycIdeal, ResidueSpec};
use crate::skein::colors_by_label;

/// Vector of a bounded manifold in the TQFT space of its boundary, defined
/// up to a power of the anomaly unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundaryVector {
    pub p: u64,
    pub boundary_genus: u8,
    pub coords: Vec<CycElem>,
}

impl BoundaryVector {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(CycElem::is_zero)
    }

    pub fn reduce(&self, r: &ResidueSpec) -> Result<Vec<u64>> {
        self.coords.iter().map(|x| r.reduce(x)).collect()
    }
}

/// Indices of the genus-2 basis kept by the compression, in boundary basis order.
pub fn compression_indices(p: u64, boundary_genus: u8) -> Result<Vec<usize>> {
    let basis = crate::rep::RepBasis::new(2, p)?;
    match boundary_genus {
        0 => Ok(vec![0]),
        1 => Ok(colors_by_label(p)
            .into_iter()
            .map(|a| basis.index_of(&[a, 0, 0]).expect("(a, 0, 0) is admissible"))
            .collect()),
        g => Err(Error::usage(format!("unsupported boundary genus {g}"))),
    }
}

/// `η⁻¹ ρ(w) e_000`, restricted to the colorings with the compressed curves colored 0.
pub fn boundary_vector(ctx: &RtContext, desc: &ManifoldDesc) -> Result<BoundaryVector> {
    let ManifoldDesc::Compression { boundary_genus, word } = desc else {
        return Err(Error::usage("boundary vectors are defined for compression descriptions"));
    };
    desc.validate()?;
    let rep = ctx.rep(2)?;
    let mut e0 = vec![ctx.ring().zero(); rep.dim()];
    e0[0] = ctx.ring().one();
    let v = rep.apply(word, &e0)?;
    let coords = compression_indices(ctx.p(), *boundary_genus)?
        .into_iter()
        .map(|i| &v[i] * ctx.eta_inv())
        .collect();
    Ok(BoundaryVector {
        p: ctx.p(),
        boundary_genus: *boundary_genus,
        coords,
    })
}

/// Every coordinate reduces to 0 in `F_q`.
pub fn vanishes_mod(v: &BoundaryVector, r: &ResidueSpec) -> Result<bool> {
    Ok(v.reduce(r)?.iter().all(|&x| x == 0))
}

/// `RT_p(M) ≠ 0`.
pub fn very_good_probe(ctx: &RtContext, desc: &ManifoldDesc) -> Result<bool> {
    Ok(!ctx.rt_closed(desc)?.is_zero())
}

/// Ideal generated by the closed invariant.
pub fn fkb_ideal_closed(ctx: &RtContext, desc: &ManifoldDesc) -> Result<CycIdeal> {
    CycIdeal::from_generators(ctx.ring(), &[ctx.rt_closed(desc)?])
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InnerIdeal {
    pub budget: usize,
    pub ideal: CycIdeal,
    pub full: bool,
    /// The ideal did not grow at the last budget step.
    pub stabilized: bool,
    pub fillings_tried: usize,
}

/// Inner approximation of the FKB ideal of a genus-1-bounded `N`: closings by
/// solid tori glued through every genus-1 word of length at most `budget`.
pub fn fkb_ideal_inner(ctx: &RtContext, desc: &ManifoldDesc, budget: usize) -> Result<InnerIdeal> {
    if budget == 0 {
        return Err(Error::usage("inner ideal budget must be at least 1"));
    }
    if desc.boundary_genus() != Some(1) {
        return Err(Error::usage("inner ideals need a description with torus boundary"));
    }
    let v = boundary_vector(ctx, desc)?;
    let rep = ctx.rep(1)?;
    let ring = ctx.ring();
    let mut e0 = vec![ring.zero(); rep.dim()];
    e0[0] = ring.one();
    let letters = [(Curve::Alpha, 1), (Curve::Alpha, -1), (Curve::Beta, 1), (Curve::Beta, -1)];

    let pair = |u: &[CycElem]| v.coords.iter().zip(u).fold(ring.zero(), |acc, (a, b)| &acc + &(a * b));
    let mut ideal = CycIdeal::from_generators(ring, &[pair(&e0)])?;
    let mut previous = ideal.clone();
    let mut seen: HashSet<String> = HashSet::from([format!("{e0:?}")]);
    let mut frontier: Vec<(Option<(Curve, i64)>, Vec<CycElem>)> = vec![(None, e0)];
    let mut tried = 1;
    for _ in 0..budget {
        previous = ideal.clone();
        let mut next = Vec::new();
        for (last, u) in &frontier {
            for &(c, e) in &letters {
                if *last == Some((c, -e)) {
                    continue;
                }
                let w = rep.apply(&TwistWord::twist(c, e), u)?;
                if !seen.insert(format!("{w:?}")) {
                    continue;
                }
                tried += 1;
                let z = pair(&w);
                if !ideal.contains(&z)? {
                    ideal = ideal.join(&CycIdeal::from_generators(ring, &[z])?)?;
                }
                next.push((Some((c, e)), w));
            }
        }
        frontier = next;
    }
    Ok(InnerIdeal {
        budget,
        full: ideal.is_full(),
        stabilized: budget > 1 && ideal == previous,
        ideal,
        fillings_tried: tried,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Obstructed,
    NoObstructionFound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ResidueRow {
    pub q: u64,
    pub m_residue: u64,
    pub n_vector: Vec<u64>,
    pub n_vanishes: bool,
}

impl ResidueRow {
    pub fn decisive(&self) -> bool {
        self.m_residue != 0 && self.n_vanishes
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ObstructionReport {
    pub target: ManifoldDesc,
    pub candidate: ManifoldDesc,
    pub p: u64,
    pub q: u64,
    pub m_residue: u64,
    pub n_vector: Vec<u64>,
    pub verdict: Verdict,
    pub certificate: Vec<ResidueRow>,
    /// The pairing factorization the verdict relies on.
    pub axiom: String,
}

impl ObstructionReport {
    /// Recomputes the verdict from the recorded residues.
    pub fn verdict_from_certificate(&self) -> Verdict {
        if self.certificate.iter().any(ResidueRow::decisive) {
            Verdict::Obstructed
        } else {
            Verdict::NoObstructionFound
        }
    }
}

const AXIOM: &str = "closed invariants of manifolds containing N factor through the pairing with N's boundary vector";

fn candidate_vector(ctx: &RtContext, n: &ManifoldDesc) -> Result<BoundaryVector> {
    match n {
        ManifoldDesc::Compression { .. } => boundary_vector(ctx, n),
        closed => Ok(BoundaryVector {
            p: ctx.p(),
            boundary_genus: 0,
            coords: vec![ctx.rt_closed(closed)?],
        }),
    }
}

/// Reports OBSTRUCTED at the first `q` where `RT(M)` survives and `N`'s vector vanishes.
pub fn obstruct_embedding(
    ctx: &RtContext,
    n: &ManifoldDesc,
    m: &ManifoldDesc,
    q_candidates: &[u64],
) -> Result<ObstructionReport> {
    if !m.is_closed() {
        return Err(Error::usage("the target manifold must be closed"));
    }
    let specs: Vec<ResidueSpec> = q_candidates
        .iter()
        .filter_map(|&q| ResidueSpec::new(ctx.ring(), q).ok())
        .collect();
    if specs.is_empty() {
        return Err(Error::usage(format!("no valid q among {q_candidates:?} (need primes q = 1 mod {})", 4 * ctx.p())));
    }
    let zm = ctx.rt_closed(m)?;
    let v = candidate_vector(ctx, n)?;
    let certificate = specs
        .par_iter()
        .map(|r| {
            let n_vector = v.reduce(r)?;
            Ok(ResidueRow {
                q: r.q(),
                m_residue: r.reduce(&zm)?,
                n_vanishes: n_vector.iter().all(|&x| x == 0),
                n_vector,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pick = certificate
        .iter()
        .find(|row| row.decisive())
        .unwrap_or_else(|| certificate.last().unwrap())
        .clone();
    let mut report = ObstructionReport {
        target: m.clone(),
        candidate: n.clone(),
        p: ctx.p(),
        q: pick.q,
        m_residue: pick.m_residue,
        n_vector: pick.n_vector,
        verdict: Verdict::NoObstructionFound,
        certificate,
        axiom: AXIOM.into(),
    };
    report.verdict = report.verdict_from_certificate();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchParams {
    /// Twist power in the leaves `h s^n h⁻¹`; not a multiple of `p`.
    pub n: i64,
    pub conjugator_len: usize,
    pub max_leaves: usize,
    pub budget: usize,
    pub seed: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            n: 3,
            conjugator_len: 6,
            max_leaves: 3,
            budget: 2000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found {
        /// Full gluing word `w0 · φ`.
        word: TwistWord,
        /// `φ` as a product of certified leaves.
        certificate: WordExpr,
        tries: usize,
    },
    NotFound {
        tries: usize,
        distinct_images: usize,
    },
}

fn restricted(v: &[u64], keep: &[usize]) -> Vec<u64> {
    keep.iter().map(|&i| v[i]).collect()
}

fn random_product(params: &SearchParams, try_index: u64) -> Result<WordExpr> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(try_index);
    let leaves = rng.gen_range(1..=params.max_leaves.max(1));
    let items = (0..leaves)
        .map(|_| word_in_subgroup(params.n, 1, params.conjugator_len, rng.gen()).map(|s| s.certificate))
        .collect::<Result<Vec<_>>>()?;
    Ok(if items.len() == 1 { items.into_iter().next().unwrap() } else { WordExpr::Product(items) })
}

/// Systematic leaves: `h s^n h⁻¹` with `h` running over Humphries words of length ≤ 2.
fn systematic_leaves(n: i64) -> Vec<WordExpr> {
    let mut hs = vec![WordExpr::Identity];
    let units: Vec<WordExpr> = Curve::HUMPHRIES
        .iter()
        .flat_map(|&c| [WordExpr::Twist(c, 1), WordExpr::Twist(c, -1)])
        .collect();
    hs.extend(units.iter().cloned());
    for a in &units {
        for b in &units {
            hs.push(WordExpr::Product(vec![a.clone(), b.clone()]));
        }
    }
    hs.into_iter()
        .map(|h| WordExpr::conjugate(h, WordExpr::Twist(Curve::S, n)))
        .collect()
}

/// Looks for `φ` in the leaf family whose gluing `w0 · φ` sends the handlebody
/// vector into the compression kernel modulo `J`. Deterministic in `seed`.
pub fn twist_search(ctx: &RtContext, base: &ManifoldDesc, r: &ResidueSpec, params: &SearchParams) -> Result<SearchOutcome> {
    let ManifoldDesc::Compression { boundary_genus, word: w0 } = base else {
        return Err(Error::usage("twist_search needs a compression description"));
    };
    if params.n % ctx.p() as i64 == 0 {
        return Err(Error::usage("the twist power must not be a multiple of p"));
    }
    let keep = compression_indices(ctx.p(), *boundary_genus)?;
    let m: ModRep = ctx.rep(2)?.reduce(r)?;
    let mut e0 = vec![0u64; m.dim()];
    e0[0] = 1;
    let image = |phi: &TwistWord| -> Result<Vec<u64>> {
        let v = m.apply(phi, &e0)?;
        m.apply(w0, &v)
    };

    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut tries = 0;
    let mut candidates: Vec<WordExpr> = vec![WordExpr::Identity];
    candidates.extend(systematic_leaves(params.n));
    for cert in candidates {
        if tries >= params.budget {
            break;
        }
        tries += 1;
        let phi = cert.expand(2)?;
        let v = image(&phi)?;
        if restricted(&v, &keep).iter().all(|&x| x == 0) {
            return Ok(SearchOutcome::Found {
                word: w0.concat(&phi)?,
                certificate: cert,
                tries,
            });
        }
        seen.insert(v);
    }

    const BATCH: usize = 64;
    let mut next_index = 0u64;
    while tries < params.budget {
        let take = BATCH.min(params.budget - tries);
        let batch = (next_index..next_index + take as u64)
            .into_par_iter()
            .map(|i| {
                let cert = random_product(params, i)?;
                let phi = cert.expand(2)?;
                let v = image(&phi)?;
                Ok((cert, phi, v))
            })
            .collect::<Result<Vec<_>>>()?;
        next_index += take as u64;
        for (k, (cert, phi, v)) in batch.into_iter().enumerate() {
            if restricted(&v, &keep).iter().all(|&x| x == 0) {
                return Ok(SearchOutcome::Found {
                    word: w0.concat(&phi)?,
                    certificate: cert,
                    tries: tries + k + 1,
                });
            }
            seen.insert(v);
        }
        tries += take;
    }
    Ok(SearchOutcome::NotFound {
        tries,
        distinct_images: seen.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::lens_word;
    use proptest::prelude::*;

    fn ctx() -> RtContext {
        RtContext::new(5).unwrap()
    }

    fn d(s: &str) -> ManifoldDesc {
        s.parse().unwrap()
    }

    #[test]
    fn solid_torus_vector() {
        let c = ctx();
        let v = boundary_vector(&c, &d("compress:1:")).unwrap();
        assert_eq!(v.coords.len(), 2);
        assert_eq!(v.coords[0], c.eta_inv().clone());
        assert!(v.coords[1].is_zero());
        let r = ResidueSpec::new(c.ring(), 41).unwrap();
        assert!(!vanishes_mod(&v, &r).unwrap());
        let zero = BoundaryVector { coords: vec![c.ring().zero(); 2], ..v.clone() };
        assert!(vanishes_mod(&zero, &r).unwrap());
        let scaled = BoundaryVector {
            coords: v.coords.iter().map(|x| x * &(&c.ring().u_pow(1) - &c.ring().one())).collect(),
            ..v
        };
        assert!(!vanishes_mod(&scaled, &r).unwrap());
    }

    #[test]
    fn capped_compression_is_the_heegaard_value() {
        let c = ctx();
        let w = lens_word(2, 3);
        let capped = c.rt_closed(&ManifoldDesc::Compression { boundary_genus: 0, word: w.clone() }).unwrap();
        assert_eq!(capped, c.rt_closed(&ManifoldDesc::Heegaard { word: w }).unwrap());
        assert!(!boundary_vector(&c, &d("compress:0:")).unwrap().is_zero());
    }

    #[test]
    fn closed_ideals() {
        let c = ctx();
        assert!(fkb_ideal_closed(&c, &d("s3")).unwrap().is_full());
        let l5 = fkb_ideal_closed(&c, &d("lens:5")).unwrap();
        assert!(!l5.is_zero());
        assert!(very_good_probe(&c, &d("s3")).unwrap());
        for n in 1..=6 {
            assert!(very_good_probe(&c, &ManifoldDesc::Lens { b: n }).unwrap());
        }
    }

    #[test]
    fn inner_ideal_of_solid_torus_is_full() {
        let c = ctx();
        let inner = fkb_ideal_inner(&c, &d("compress:1:"), 1).unwrap();
        assert!(inner.full);
        assert!(fkb_ideal_inner(&c, &d("compress:1:"), 0).is_err());
    }

    #[test]
    fn inner_ideal_is_monotone() {
        let c = ctx();
        let n = d("compress:1:c3^2*c2*c4^-1");
        let mut prev: Option<CycIdeal> = None;
        for b in 1..=4 {
            let cur = fkb_ideal_inner(&c, &n, b).unwrap().ideal;
            if let Some(p) = prev {
                assert!(p.leq(&cur).unwrap());
            }
            prev = Some(cur);
        }
    }

    #[test]
    fn solid_torus_is_never_obstructed_in_s3() {
        let c = ctx();
        let qs = ResidueSpec::default_candidates(c.ring(), 5);
        let rep = obstruct_embedding(&c, &d("compress:1:"), &d("s3"), &qs).unwrap();
        assert_eq!(rep.verdict, Verdict::NoObstructionFound);
        assert_eq!(rep.certificate.len(), 5);
        assert!(obstruct_embedding(&c, &d("compress:1:"), &d("s3"), &[7, 11]).is_err());
    }

    #[test]
    fn search_finds_a_vanishing_word_and_obstructs() {
        let c = ctx();
        let r = ResidueSpec::new(c.ring(), 41).unwrap();
        let base = d("compress:0:");
        let params = SearchParams { seed: 7, ..SearchParams::default() };
        let out = twist_search(&c, &base, &r, &params).unwrap();
        let SearchOutcome::Found { word, certificate, .. } = out.clone() else { panic!("not found: {out:?}") };
        assert_eq!(certificate.expand(2).unwrap(), word);
        assert_eq!(twist_search(&c, &base, &r, &params).unwrap(), out);
        let n = ManifoldDesc::Compression { boundary_genus: 0, word };
        assert!(vanishes_mod(&boundary_vector(&c, &n).unwrap(), &r).unwrap());
        let report = obstruct_embedding(&c, &n, &d("s3"), &[41]).unwrap();
        assert_eq!(report.verdict, Verdict::Obstructed);
        assert_eq!(report.verdict_from_certificate(), Verdict::Obstructed);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn vanishing_ignores_units(k in -20i64..20, ls in prop::collection::vec((prop::sample::select(Curve::GENUS2.to_vec()), -2i64..3), 0..5)) {
            let c = ctx();
            let r = ResidueSpec::new(c.ring(), 41).unwrap();
            let v = boundary_vector(&c, &ManifoldDesc::Compression { boundary_genus: 1, word: TwistWord::new(2, ls).unwrap() }).unwrap();
            let unit = c.ring().xi_pow(k);
            let w = BoundaryVector { coords: v.coords.iter().map(|x| x * &unit).collect(), ..v.clone() };
            prop_assert_eq!(vanishes_mod(&v, &r).unwrap(), vanishes_mod(&w, &r).unwrap());
        }

        #[test]
        fn separating_twist_before_compression_is_invisible(ls in prop::collection::vec((prop::sample::select(Curve::GENUS2.to_vec()), -2i64..3), 0..5), e in 1i64..5) {
            let c = ctx();
            let w = TwistWord::new(2, ls).unwrap();
            let twisted = TwistWord::twist(Curve::S, e).concat(&w).unwrap();
            let v = boundary_vector(&c, &ManifoldDesc::Compression { boundary_genus: 1, word: w }).unwrap();
            let u = boundary_vector(&c, &ManifoldDesc::Compression { boundary_genus: 1, word: twisted }).unwrap();
            prop_assert_eq!(v, u);
        }
    }
}
