//! Manifold descriptions and their invariants: first homology, Dijkgraaf–Witten
//! counts (by homomorphism enumeration and by the genus-1 TQFT), and SO(3)
//! WRT values by Heegaard pairing, mapping-torus trace and lens surgery.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::smith_invariants;
use crate::mcg::{free_inverse, free_reduce, pi1_action, surface_relator, Curve, FreeWord, TwistWord};
use crate::rep::QuantumRep;
use crate::ring::{CycElem, RingSpec};
use crate::skein::{colors, Skein};

// ---------------------------------------------------------------------------
// presentations

/// Finitely presented group. Generator `k` is letter `k + 1`, its inverse `−(k + 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    gens: Vec<String>,
    relators: Vec<FreeWord>,
}

impl GroupPresentation {
    /// Relators are freely reduced; empty ones are dropped.
    pub fn new(gens: Vec<String>, relators: Vec<FreeWord>) -> Result<Self> {
        let n = gens.len() as i32;
        let mut rels = Vec::with_capacity(relators.len());
        for mut r in relators {
            if let Some(&x) = r.iter().find(|x| **x == 0 || x.abs() > n) {
                return Err(Error::usage(format!("relator letter {x} out of range")));
            }
            free_reduce(&mut r);
            if !r.is_empty() {
                rels.push(r);
            }
        }
        Ok(GroupPresentation { gens, relators: rels })
    }

    fn numbered(prefix: &str, n: usize, relators: Vec<FreeWord>) -> Self {
        let gens = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        Self::new(gens, relators).expect("letters in range")
    }

    pub fn generators(&self) -> &[String] {
        &self.gens
    }

    pub fn generator_count(&self) -> usize {
        self.gens.len()
    }

    pub fn relators(&self) -> &[FreeWord] {
        &self.relators
    }

    /// `gens: a b; rel: a a a, a b A B` with capitals for inverses and
    /// optional `^k` exponents.
    pub fn parse(text: &str) -> Result<Self> {
        let mut gens: Option<Vec<String>> = None;
        let mut rel_src: Vec<(usize, &str)> = Vec::new();
        let mut offset = 0;
        for seg in text.split(';') {
            let seg_start = offset;
            offset += seg.len() + 1;
            let trimmed = seg.trim_start();
            let lead = seg.len() - trimmed.len();
            if trimmed.trim().is_empty() {
                continue;
            }
            let Some((key, body)) = trimmed.split_once(':') else {
                return Err(Error::parse(1, seg_start + lead + 1, "expected `gens:` or `rel:`"));
            };
            let body_col = seg_start + lead + key.len() + 1;
            match key.trim() {
                "gens" => {
                    let names: Vec<String> = body.split_whitespace().map(str::to_string).collect();
                    for nm in &names {
                        if !nm.starts_with(|c: char| c.is_ascii_lowercase()) {
                            return Err(Error::parse(1, body_col + 1, format!("generator `{nm}` must start lowercase")));
                        }
                    }
                    gens = Some(names);
                }
                "rel" | "rels" => {
                    let mut col = body_col;
                    for part in body.split(',') {
                        rel_src.push((col, part));
                        col += part.len() + 1;
                    }
                }
                other => return Err(Error::parse(1, seg_start + lead + 1, format!("unknown section `{other}`"))),
            }
        }
        let gens = gens.ok_or_else(|| Error::parse(1, 1, "missing `gens:` section"))?;
        let mut relators = Vec::new();
        for (col, src) in rel_src {
            let mut word = FreeWord::new();
            let mut pos = 0;
            for tok in src.split(' ') {
                let tcol = col + pos + 1;
                pos += tok.len() + 1;
                if tok.is_empty() {
                    continue;
                }
                let (base, exp) = match tok.split_once('^') {
                    Some((b, e)) => (b, e.parse::<i64>().map_err(|_| Error::parse(1, tcol, format!("bad exponent in `{tok}`")))?),
                    None => (tok, 1),
                };
                let inverted = base.starts_with(|c: char| c.is_ascii_uppercase());
                let mut chars = base.chars();
                let name: String = chars
                    .next()
                    .map(|c| c.to_ascii_lowercase())
                    .into_iter()
                    .chain(chars)
                    .collect();
                let k = gens
                    .iter()
                    .position(|g| *g == name)
                    .ok_or_else(|| Error::parse(1, tcol, format!("unknown generator `{base}`")))? as i32
                    + 1;
                let letter = if inverted { -k } else { k };
                let letter = if exp < 0 { -letter } else { letter };
                word.extend(std::iter::repeat(letter).take(exp.unsigned_abs() as usize));
            }
            relators.push(word);
        }
        Self::new(gens, relators)
    }

    /// Free product; clashing names on the right are primed.
    pub fn free_product(&self, other: &GroupPresentation) -> GroupPresentation {
        let shift = self.gens.len() as i32;
        let mut gens = self.gens.clone();
        for g in &other.gens {
            let mut name = g.clone();
            while gens.contains(&name) {
                name.push('\'');
            }
            gens.push(name);
        }
        let mut relators = self.relators.clone();
        relators.extend(
            other
                .relators
                .iter()
                .map(|r| r.iter().map(|&x| if x > 0 { x + shift } else { x - shift }).collect()),
        );
        GroupPresentation { gens, relators }
    }

    /// Abelianized relator matrix.
    pub fn relation_matrix(&self) -> Vec<Vec<BigInt>> {
        self.relators
            .iter()
            .map(|r| {
                let mut row = vec![BigInt::zero(); self.gens.len()];
                for &x in r {
                    row[x.unsigned_abs() as usize - 1] += x.signum();
                }
                row
            })
            .collect()
    }

    fn letter_text(&self, x: i32) -> String {
        let g = &self.gens[x.unsigned_abs() as usize - 1];
        if x > 0 {
            g.clone()
        } else {
            let mut c = g.chars();
            c.next().map(|h| h.to_ascii_uppercase()).into_iter().chain(c).collect()
        }
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens: {}", self.gens.join(" "))?;
        if !self.relators.is_empty() {
            let rels: Vec<String> = self
                .relators
                .iter()
                .map(|r| r.iter().map(|&x| self.letter_text(x)).collect::<Vec<_>>().join(" "))
                .collect();
            write!(f, "; rel: {}", rels.join(", "))?;
        }
        Ok(())
    }
}

impl FromStr for GroupPresentation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// `Z/d₁ ⊕ … ⊕ Z/d_k ⊕ Z^r` with `1 < d₁ | d₂ | …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    #[serde(serialize_with = "ser_bigints")]
    pub torsion: Vec<BigInt>,
    pub rank: usize,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl AbelianGroup {
    /// `|H|` for finite groups.
    pub fn order(&self) -> Option<BigInt> {
        (self.rank == 0).then(|| self.torsion.iter().product())
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Smith normal form of the abelianized relator matrix.
pub fn homology_h1(pres: &GroupPresentation) -> AbelianGroup {
    let (diag, rank) = smith_invariants(&pres.relation_matrix(), pres.generator_count());
    AbelianGroup {
        torsion: diag.into_iter().filter(|d| !d.is_one()).collect(),
        rank,
    }
}

// ---------------------------------------------------------------------------
// finite groups

/// Finite group given by its full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    name: String,
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
    exponent: u64,
}

impl FiniteGroupTable {
    /// Checks closure, associativity, identity and inverses.
    pub fn new(name: impl Into<String>, elements: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || elements.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::usage("group table must be square with entries in range"));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::usage("group table has no identity"))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::usage(format!("group table not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity)
                .ok_or_else(|| Error::usage(format!("element {a} has no inverse")))?;
            inverses.push(inv);
        }
        let mut g = FiniteGroupTable {
            name: name.into(),
            elements,
            table,
            identity,
            inverses,
            exponent: 1,
        };
        g.exponent = (0..n).fold(1u64, |acc, x| acc.lcm(&g.element_order(x)));
        Ok(g)
    }

    /// Rows of product indices; an optional first line of element names.
    pub fn from_csv(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut names: Option<Vec<String>> = None;
        let mut table = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::parse(line + 1, 1, e.to_string()))?;
            let parsed: std::result::Result<Vec<usize>, _> = rec.iter().map(str::parse::<usize>).collect();
            match parsed {
                Ok(row) => table.push(row),
                Err(_) if line == 0 => names = Some(rec.iter().map(str::to_string).collect()),
                Err(e) => return Err(Error::parse(line + 1, 1, e.to_string())),
            }
        }
        let names = names.unwrap_or_else(|| (0..table.len()).map(|i| i.to_string()).collect());
        Self::new(name, names, table)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.elements.join(",");
        out.push('\n');
        for row in &self.table {
            out.push_str(&row.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("cyclic group of order 0"));
        }
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(format!("Z{n}"), (0..n).map(|i| i.to_string()).collect(), table)
    }

    /// Closure of permutations of `{0, …, m−1}` under composition `(στ)(x) = σ(τ(x))`.
    pub fn from_permutations(name: impl Into<String>, gens: &[Vec<usize>]) -> Result<Self> {
        let m = gens.first().map_or(0, Vec::len);
        if gens.iter().any(|g| g.len() != m || !is_permutation(g)) {
            return Err(Error::usage("generators must be permutations of one set"));
        }
        let id: Vec<usize> = (0..m).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let prod: Vec<usize> = elems[i].iter().map(|&x| g[x]).collect();
                if !index.contains_key(&prod) {
                    index.insert(prod.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(prod);
                }
            }
        }
        let table = elems
            .iter()
            .map(|s| elems.iter().map(|t| index[&t.iter().map(|&x| s[x]).collect::<Vec<_>>()]).collect())
            .collect();
        let names = elems.iter().map(|e| format!("{e:?}")).collect();
        Self::new(name, names, table)
    }

    pub fn symmetric3() -> Self {
        Self::from_permutations("S3", &[vec![1, 0, 2], vec![1, 2, 0]]).expect("S3")
    }

    pub fn quaternion8() -> Self {
        Self::from_csv("Q8", include_str!("../data/q8.csv")).expect("bundled Q8 table")
    }

    /// `Z2`, `Z3`, `Zn`, `S3`, `Q8`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "S3" => Ok(Self::symmetric3()),
            "Q8" => Ok(Self::quaternion8()),
            _ => match name.strip_prefix('Z').map(str::parse::<usize>) {
                Some(Ok(n)) => Self::cyclic(n),
                _ => Err(Error::usage(format!("unknown group `{name}` (try Z2, Z3, S3, Q8)"))),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// `e(G)`, the lcm of element orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    fn eval(&self, assignment: &[usize], word: &[i32]) -> usize {
        word.iter().fold(self.identity, |acc, &x| {
            let g = assignment[x.unsigned_abs() as usize - 1];
            self.mul(acc, if x > 0 { g } else { self.inv(g) })
        })
    }
}

fn is_permutation(g: &[usize]) -> bool {
    let mut seen = vec![false; g.len()];
    g.iter().all(|&x| x < g.len() && !std::mem::replace(&mut seen[x], true))
}

/// Default search cap for [`hom_count`].
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// `|Hom(π, G)|` by backtracking; each relator is checked as soon as its last
/// generator is assigned. Exceeding `node_budget` is an error.
pub fn hom_count(pres: &GroupPresentation, g: &FiniteGroupTable, node_budget: u64) -> Result<u64> {
    let n = pres.generator_count();
    if n == 0 {
        return Ok(1);
    }
    let mut by_depth: Vec<Vec<&FreeWord>> = vec![Vec::new(); n];
    for r in pres.relators() {
        let d = r.iter().map(|x| x.unsigned_abs() as usize - 1).max().unwrap();
        by_depth[d].push(r);
    }
    let nodes = AtomicU64::new(0);
    let abort = AtomicBool::new(false);

    fn go(
        depth: usize,
        asg: &mut Vec<usize>,
        g: &FiniteGroupTable,
        by_depth: &[Vec<&FreeWord>],
        nodes: &AtomicU64,
        abort: &AtomicBool,
        budget: u64,
    ) -> u64 {
        if abort.load(Ordering::Relaxed) {
            return 0;
        }
        if nodes.fetch_add(1, Ordering::Relaxed) >= budget {
            abort.store(true, Ordering::Relaxed);
            return 0;
        }
        if !by_depth[depth - 1].iter().all(|r| g.eval(asg, r) == g.identity()) {
            return 0;
        }
        if depth == by_depth.len() {
            return 1;
        }
        let mut total = 0;
        for x in 0..g.order() {
            asg.push(x);
            total += go(depth + 1, asg, g, by_depth, nodes, abort, budget);
            asg.pop();
        }
        total
    }

    let total: u64 = (0..g.order())
        .into_par_iter()
        .map(|x0| {
            let mut asg = vec![x0];
            go(1, &mut asg, g, &by_depth, &nodes, &abort, node_budget)
        })
        .sum();
    if abort.load(Ordering::Relaxed) {
        return Err(Error::Budget {
            what: "homomorphism search nodes".into(),
            limit: node_budget,
        });
    }
    Ok(total)
}

/// `Z_G(M) = |Hom(π₁M, G)| / |G|`.
pub fn dw_invariant(desc: &ManifoldDesc, g: &FiniteGroupTable, node_budget: u64) -> Result<BigRational> {
    let count = hom_count(&pi1(desc)?, g, node_budget)?;
    Ok(BigRational::new(count.into(), g.order().into()))
}

/// `G`-colorings of the torus: commuting pairs `(x, y)` up to simultaneous
/// conjugation, with the mapping-class action by precomposition.
#[derive(Debug, Clone)]
pub struct DwTorusRep {
    group: FiniteGroupTable,
    classes: Vec<Vec<(usize, usize)>>,
    class_of: HashMap<(usize, usize), usize>,
}

pub fn dw_rep_genus1(g: &FiniteGroupTable) -> DwTorusRep {
    let n = g.order();
    let mut classes = Vec::new();
    let mut class_of = HashMap::new();
    for x in 0..n {
        for y in 0..n {
            if g.mul(x, y) != g.mul(y, x) || class_of.contains_key(&(x, y)) {
                continue;
            }
            let id = classes.len();
            let mut orbit: Vec<(usize, usize)> = (0..n)
                .map(|h| {
                    let hi = g.inv(h);
                    (g.mul(g.mul(h, x), hi), g.mul(g.mul(h, y), hi))
                })
                .collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &pair in &orbit {
                class_of.insert(pair, id);
            }
            classes.push(orbit);
        }
    }
    DwTorusRep {
        group: g.clone(),
        classes,
        class_of,
    }
}

impl DwTorusRep {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<(usize, usize)>] {
        &self.classes
    }

    fn step(&self, (x, y): (usize, usize), c: Curve, sign: i64) -> (usize, usize) {
        let g = &self.group;
        match (c, sign > 0) {
            (Curve::Alpha, true) => (x, g.mul(y, x)),
            (Curve::Alpha, false) => (x, g.mul(y, g.inv(x))),
            (Curve::Beta, true) => (g.mul(x, g.inv(y)), y),
            _ => (g.mul(x, y), y),
        }
    }

    /// Image of a pair under a genus-1 word, letters applied left to right.
    pub fn act(&self, w: &TwistWord, pair: (usize, usize)) -> Result<(usize, usize)> {
        if w.genus() != 1 {
            return Err(Error::usage("the DW torus action needs a genus-1 word"));
        }
        Ok(w.unit_letters().fold(pair, |acc, (c, s)| self.step(acc, c, s)))
    }

    /// Induced permutation of classes.
    pub fn permutation(&self, w: &TwistWord) -> Result<Vec<usize>> {
        self.classes
            .iter()
            .map(|orbit| Ok(self.class_of[&self.act(w, orbit[0])?]))
            .collect()
    }
}

/// DW invariant through the genus-1 TQFT: handlebody pairing for Heegaard
/// gluings (and lens spaces via their gluing word), trace for mapping tori.
pub fn dw_invariant_tqft(desc: &ManifoldDesc, g: &FiniteGroupTable) -> Result<BigRational> {
    let rep = dw_rep_genus1(g);
    let order = BigInt::from(g.order());
    match desc {
        ManifoldDesc::Lens { b } => dw_invariant_tqft(&ManifoldDesc::Heegaard { word: lens_word(1, *b) }, g),
        ManifoldDesc::Heegaard { word } if word.genus() == 1 => {
            let e = g.identity();
            let mut total = 0usize;
            for orbit in &rep.classes {
                if orbit[0].0 == e && rep.act(word, orbit[0])?.0 == e {
                    total += orbit.len();
                }
            }
            Ok(BigRational::new(total.into(), order))
        }
        ManifoldDesc::MappingTorus { word } if word.genus() == 1 => {
            let perm = rep.permutation(word)?;
            let fixed = perm.iter().enumerate().filter(|(i, j)| i == *j).count();
            Ok(BigRational::from_integer(fixed.into()))
        }
        _ => Err(Error::usage("the DW TQFT route handles genus-1 gluings, mapping tori and lens spaces")),
    }
}

// ---------------------------------------------------------------------------
// descriptions

/// A 3-manifold built from surface data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ManifoldDesc {
    /// Two genus-`g` handlebodies glued by the word.
    Heegaard { word: TwistWord },
    MappingTorus { word: TwistWord },
    /// Surgery on the unknot with framing `b`, i.e. `L(b, 1)`.
    Lens { b: i64 },
    ConnectedSum(Box<ManifoldDesc>, Box<ManifoldDesc>),
    Double(Box<ManifoldDesc>),
    /// Genus-2 handlebody glued by the word to a compression body with inner
    /// boundary of genus `boundary_genus`; bounded unless that genus is 0.
    Compression { boundary_genus: u8, word: TwistWord },
}

impl ManifoldDesc {
    pub fn s3() -> Self {
        ManifoldDesc::Lens { b: 1 }
    }

    pub fn connected_sum(a: ManifoldDesc, b: ManifoldDesc) -> Self {
        ManifoldDesc::ConnectedSum(Box::new(a), Box::new(b))
    }

    pub fn double(half: ManifoldDesc) -> Self {
        ManifoldDesc::Double(Box::new(half))
    }

    pub fn compression(boundary_genus: u8, word: TwistWord) -> Result<Self> {
        let d = ManifoldDesc::Compression { boundary_genus, word };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ManifoldDesc::Heegaard { word } | ManifoldDesc::MappingTorus { word } => {
                Curve::catalogue(word.genus()).map(|_| ())
            }
            ManifoldDesc::Lens { .. } => Ok(()),
            ManifoldDesc::ConnectedSum(a, b) => {
                a.validate()?;
                b.validate()?;
                if !a.is_closed() || !b.is_closed() {
                    return Err(Error::usage("connected sums take closed summands"));
                }
                Ok(())
            }
            ManifoldDesc::Double(h) => {
                h.validate()?;
                match **h {
                    ManifoldDesc::Compression { .. } => Ok(()),
                    _ => Err(Error::usage("the double is defined for compression-body descriptions")),
                }
            }
            ManifoldDesc::Compression { boundary_genus, word } => {
                if word.genus() != 2 || *boundary_genus > 1 {
                    return Err(Error::usage("compression descriptions need a genus-2 word and boundary genus 0 or 1"));
                }
                Ok(())
            }
        }
    }

    /// Genus of the boundary surface, `None` when closed. A genus-0
    /// compression is capped by a ball.
    pub fn boundary_genus(&self) -> Option<u8> {
        match self {
            ManifoldDesc::Compression { boundary_genus: 1, .. } => Some(1),
            _ => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_genus().is_none()
    }
}

/// Genus-1 word `(αβα) α^b (αβα)` for `L(b, 1)`; at genus 2 the same on
/// `(c1, c2)` followed by the sphere word `c5 c4 c5` on the second handle.
pub fn lens_word(genus: u8, b: i64) -> TwistWord {
    let (x, y) = if genus == 1 { (Curve::Alpha, Curve::Beta) } else { (Curve::C1, Curve::C2) };
    let mut letters = vec![(x, 1), (y, 1), (x, 2 + b), (y, 1), (x, 1)];
    if genus == 2 {
        letters.extend([(Curve::C5, 1), (Curve::C4, 1), (Curve::C5, 1)]);
    }
    TwistWord::new(genus, letters).expect("catalogued curves")
}

/// The sphere as a Heegaard gluing of the given genus.
pub fn s3_word(genus: u8) -> TwistWord {
    let mut letters = Vec::new();
    if genus == 1 {
        letters.extend([(Curve::Alpha, 1), (Curve::Beta, 1), (Curve::Alpha, 1)]);
    } else {
        letters.extend([(Curve::C1, 1), (Curve::C2, 1), (Curve::C1, 1)]);
        letters.extend([(Curve::C5, 1), (Curve::C4, 1), (Curve::C5, 1)]);
    }
    TwistWord::new(genus, letters).expect("catalogued curves")
}

impl fmt::Display for ManifoldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldDesc::Heegaard { word } => write!(f, "heegaard:{}:{word}", word.genus()),
            ManifoldDesc::MappingTorus { word } => write!(f, "mt:{}:{word}", word.genus()),
            ManifoldDesc::Lens { b } => write!(f, "lens:{b}"),
            ManifoldDesc::ConnectedSum(a, b) => {
                let side = |d: &ManifoldDesc| match d {
                    ManifoldDesc::ConnectedSum(..) => format!("({d})"),
                    _ => d.to_string(),
                };
                write!(f, "{} # {}", side(a), side(b))
            }
            ManifoldDesc::Double(h) => write!(f, "double({h})"),
            ManifoldDesc::Compression { boundary_genus, word } => write!(f, "compress:{boundary_genus}:{word}"),
        }
    }
}

impl FromStr for ManifoldDesc {
    type Err = Error;

    /// `s3`, `lens:b`, `heegaard:g:word`, `mt:g:word`, `compress:g':word`,
    /// `double(...)`, and `A # B`.
    fn from_str(text: &str) -> Result<Self> {
        let s = text.trim();
        let parts = split_top_level(s, '#');
        if parts.len() > 1 {
            let mut it = parts.into_iter().map(ManifoldDesc::from_str);
            let first = it.next().unwrap()?;
            let d = it.try_fold(first, |acc, r| r.map(|x| ManifoldDesc::connected_sum(acc, x)))?;
            d.validate()?;
            return Ok(d);
        }
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            if split_top_level(inner, ')').len() == 1 && balanced(inner) {
                return inner.parse();
            }
        }
        if let Some(inner) = s.strip_prefix("double(").and_then(|r| r.strip_suffix(')')) {
            let d = ManifoldDesc::double(inner.parse()?);
            d.validate()?;
            return Ok(d);
        }
        if s == "s3" {
            return Ok(ManifoldDesc::s3());
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::usage(format!("cannot read manifold description `{s}`")))?;
        let word_part = |rest: &str| -> Result<(u8, String)> {
            let (g, w) = rest
                .split_once(':')
                .ok_or_else(|| Error::usage(format!("expected `{kind}:<genus>:<word>`")))?;
            let g = g.trim().parse::<u8>().map_err(|_| Error::usage(format!("bad genus `{g}`")))?;
            let w = if w.trim().is_empty() { "1".to_string() } else { w.to_string() };
            Ok((g, w))
        };
        let d = match kind.trim() {
            "lens" => ManifoldDesc::Lens {
                b: rest.trim().parse().map_err(|_| Error::usage(format!("bad lens parameter `{rest}`")))?,
            },
            "heegaard" => {
                let (g, w) = word_part(rest)?;
                ManifoldDesc::Heegaard { word: TwistWord::parse(g, &w)? }
            }
            "mt" => {
                let (g, w) = word_part(rest)?;
                ManifoldDesc::MappingTorus { word: TwistWord::parse(g, &w)? }
            }
            "compress" => {
                let (g, w) = word_part(rest)?;
                ManifoldDesc::Compression {
                    boundary_genus: g,
                    word: TwistWord::parse(2, &w)?,
                }
            }
            other => return Err(Error::usage(format!("unknown manifold kind `{other}`"))),
        };
        d.validate()?;
        Ok(d)
    }
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return false;
        }
    }
    depth == 0
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
enum DescKind {
    Heegaard,
    MappingTorus,
    Lens,
    ConnectedSum,
    Double,
    Compression,
}

/// Flat wire form, so that unknown fields are reported with their position.
#[derive(Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct DescWire {
    kind: Option<DescKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    genus: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left: Option<Box<DescWire>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    right: Option<Box<DescWire>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    half: Option<Box<DescWire>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boundary_genus: Option<u8>,
}

impl From<&ManifoldDesc> for DescWire {
    fn from(d: &ManifoldDesc) -> Self {
        let boxed = |x: &ManifoldDesc| Some(Box::new(DescWire::from(x)));
        match d {
            ManifoldDesc::Heegaard { word } => DescWire {
                kind: Some(DescKind::Heegaard),
                genus: Some(word.genus()),
                word: Some(word.to_string()),
                ..Default::default()
            },
            ManifoldDesc::MappingTorus { word } => DescWire {
                kind: Some(DescKind::MappingTorus),
                genus: Some(word.genus()),
                word: Some(word.to_string()),
                ..Default::default()
            },
            ManifoldDesc::Lens { b } => DescWire {
                kind: Some(DescKind::Lens),
                b: Some(*b),
                ..Default::default()
            },
            ManifoldDesc::ConnectedSum(a, b) => DescWire {
                kind: Some(DescKind::ConnectedSum),
                left: boxed(a),
                right: boxed(b),
                ..Default::default()
            },
            ManifoldDesc::Double(h) => DescWire {
                kind: Some(DescKind::Double),
                half: boxed(h),
                ..Default::default()
            },
            ManifoldDesc::Compression { boundary_genus, word } => DescWire {
                kind: Some(DescKind::Compression),
                boundary_genus: Some(*boundary_genus),
                word: Some(word.to_string()),
                ..Default::default()
            },
        }
    }
}

impl TryFrom<DescWire> for ManifoldDesc {
    type Error = Error;
    fn try_from(w: DescWire) -> Result<Self> {
        fn need<T>(v: Option<T>, kind: &str, field: &str) -> Result<T> {
            v.ok_or_else(|| Error::usage(format!("`{kind}` description needs `{field}`")))
        }
        fn word(genus: u8, text: &str) -> Result<TwistWord> {
            if text.trim().is_empty() {
                Ok(TwistWord::identity(genus))
            } else {
                TwistWord::parse(genus, text)
            }
        }
        let kind = need(w.kind, "manifold", "kind")?;
        let allowed: &[&str] = match kind {
            DescKind::Heegaard | DescKind::MappingTorus => &["genus", "word"],
            DescKind::Lens => &["b"],
            DescKind::ConnectedSum => &["left", "right"],
            DescKind::Double => &["half"],
            DescKind::Compression => &["boundaryGenus", "word"],
        };
        let present = [
            ("genus", w.genus.is_some()),
            ("word", w.word.is_some()),
            ("b", w.b.is_some()),
            ("left", w.left.is_some()),
            ("right", w.right.is_some()),
            ("half", w.half.is_some()),
            ("boundaryGenus", w.boundary_genus.is_some()),
        ];
        if let Some((f, _)) = present.iter().find(|(f, on)| *on && !allowed.contains(f)) {
            return Err(Error::usage(format!("field `{f}` does not belong to a {kind:?} description")));
        }
        let d = match kind {
            DescKind::Heegaard => ManifoldDesc::Heegaard {
                word: word(need(w.genus, "heegaard", "genus")?, &need(w.word, "heegaard", "word")?)?,
            },
            DescKind::MappingTorus => ManifoldDesc::MappingTorus {
                word: word(need(w.genus, "mappingTorus", "genus")?, &need(w.word, "mappingTorus", "word")?)?,
            },
            DescKind::Lens => ManifoldDesc::Lens { b: need(w.b, "lens", "b")? },
            DescKind::ConnectedSum => ManifoldDesc::connected_sum(
                (*need(w.left, "connectedSum", "left")?).try_into()?,
                (*need(w.right, "connectedSum", "right")?).try_into()?,
            ),
            DescKind::Double => ManifoldDesc::double((*need(w.half, "double", "half")?).try_into()?),
            DescKind::Compression => ManifoldDesc::Compression {
                boundary_genus: need(w.boundary_genus, "compression", "boundaryGenus")?,
                word: word(2, &need(w.word, "compression", "word")?)?,
            },
        };
        d.validate()?;
        Ok(d)
    }
}

impl Serialize for ManifoldDesc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DescWire::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ManifoldDesc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        DescWire::deserialize(d)?.try_into().map_err(|e| match e {
            Error::Usage(m) => serde::de::Error::custom(m),
            other => serde::de::Error::custom(other),
        })
    }
}

// ---------------------------------------------------------------------------
// fundamental groups

fn surface_gen_names(genus: u8) -> Vec<String> {
    (1..=genus).flat_map(|i| [format!("a{i}"), format!("b{i}")]).collect()
}

fn conj_relator(t: i32, x: i32, image: &[i32]) -> FreeWord {
    let mut r = vec![t, x, -t];
    r.extend(free_inverse(image));
    r
}

/// Presentation of `π₁` for closed and bounded descriptions.
pub fn pi1(desc: &ManifoldDesc) -> Result<GroupPresentation> {
    desc.validate()?;
    match desc {
        ManifoldDesc::Heegaard { word } => {
            // kill the a-curves on both sides; only the b generators remain
            let g = word.genus() as i32;
            let imgs = pi1_action(word);
            let rels = (0..g)
                .map(|i| {
                    imgs[2 * i as usize]
                        .iter()
                        .filter(|x| x.abs() % 2 == 0)
                        .map(|&x| x.signum() * (x.abs() / 2))
                        .collect()
                })
                .collect();
            Ok(GroupPresentation::numbered("b", g as usize, rels))
        }
        ManifoldDesc::MappingTorus { word } => {
            let g = word.genus();
            let n = 2 * g as i32;
            let t = n + 1;
            let imgs = pi1_action(word);
            let mut rels = vec![surface_relator(g)];
            for x in 1..=n {
                rels.push(conj_relator(t, x, &imgs[x as usize - 1]));
            }
            let mut names = surface_gen_names(g);
            names.push("t".into());
            GroupPresentation::new(names, rels)
        }
        ManifoldDesc::Lens { b } => GroupPresentation::new(
            vec!["x".into()],
            vec![vec![if *b >= 0 { 1 } else { -1 }; b.unsigned_abs() as usize]],
        ),
        ManifoldDesc::ConnectedSum(a, b) => Ok(pi1(a)?.free_product(&pi1(b)?)),
        ManifoldDesc::Compression { boundary_genus, word } => {
            let imgs = pi1_action(word);
            let mut rels = vec![surface_relator(2), vec![3], imgs[0].clone(), imgs[2].clone()];
            if *boundary_genus == 0 {
                rels.push(vec![1]);
            }
            GroupPresentation::new(surface_gen_names(2), rels)
        }
        ManifoldDesc::Double(h) => {
            let half = pi1(h)?;
            let mut d = half.free_product(&half);
            if h.boundary_genus() == Some(1) {
                let shift = half.generator_count() as i32;
                d.relators.push(vec![1, -(1 + shift)]);
                d.relators.push(vec![2, -(2 + shift)]);
            }
            Ok(d)
        }
    }
}

// ---------------------------------------------------------------------------
// WRT values

/// Shared state for WRT evaluations at one level: the skein data and lazily
/// built representations.
pub struct RtContext {
    ring: RingSpec,
    skein: Skein,
    g1: OnceLock<Result<QuantumRep>>,
    g2: OnceLock<Result<QuantumRep>>,
    kappa: OnceLock<CycElem>,
    eta_inv: CycElem,
}

impl RtContext {
    pub fn new(p: u64) -> Result<Self> {
        let ring = RingSpec::new(p)?;
        let eta_inv = ring.eta().inverse()?;
        Ok(RtContext {
            skein: Skein::new(&ring),
            ring,
            g1: OnceLock::new(),
            g2: OnceLock::new(),
            kappa: OnceLock::new(),
            eta_inv,
        })
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    pub fn skein(&self) -> &Skein {
        &self.skein
    }

    pub fn eta(&self) -> CycElem {
        self.ring.eta()
    }

    pub fn eta_inv(&self) -> &CycElem {
        &self.eta_inv
    }

    pub fn rep(&self, genus: u8) -> Result<&QuantumRep> {
        let cell = match genus {
            1 => &self.g1,
            2 => &self.g2,
            g => return Err(Error::usage(format!("unsupported genus {g}"))),
        };
        cell.get_or_init(|| QuantumRep::new(&self.ring, genus))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `Σ_n [n+1]² μ_n^b` over the colors.
    pub fn gauss_surgery_sum(&self, b: i64) -> CycElem {
        let sk = &self.skein;
        colors(self.p()).into_iter().fold(self.ring.zero(), |acc, n| {
            let q = sk.quantum_integer(n as i64 + 1);
            let mu = sk.t_eigenvalue(n);
            let mu_b = if b >= 0 { mu.pow(b).unwrap() } else { mu.conj().pow(-b).unwrap() };
            &acc + &(&(&q * &q) * &mu_b)
        })
    }

    /// Anomaly unit `κ = η Σ_n [n+1]² μ_n`.
    pub fn kappa(&self) -> &CycElem {
        self.kappa.get_or_init(|| &self.eta() * &self.gauss_surgery_sum(1))
    }

    /// Closed WRT invariant, up to a power of `κ`.
    pub fn rt_closed(&self, desc: &ManifoldDesc) -> Result<CycElem> {
        desc.validate()?;
        match desc {
            ManifoldDesc::Heegaard { word } => {
                let rep = self.rep(word.genus())?;
                let mut e0 = vec![self.ring.zero(); rep.dim()];
                e0[0] = self.ring.one();
                let z = rep.apply(word, &e0)?.swap_remove(0);
                Ok(if word.genus() == 1 { z } else { &z * &self.eta_inv })
            }
            ManifoldDesc::MappingTorus { word } => Ok(self.rep(word.genus())?.rho(word)?.trace()),
            ManifoldDesc::Lens { b } => {
                let eta = self.eta();
                let z = &(&eta * &eta) * &self.gauss_surgery_sum(*b);
                Ok(match b.signum() {
                    1 => &z * &self.kappa().inverse()?,
                    -1 => &z * self.kappa(),
                    _ => z,
                })
            }
            ManifoldDesc::ConnectedSum(a, b) => Ok(&(&self.rt_closed(a)? * &self.rt_closed(b)?) * &self.eta_inv),
            ManifoldDesc::Double(h) => {
                let v = crate::fkb::boundary_vector(self, h)?;
                let norm = v
                    .coords
                    .iter()
                    .fold(self.ring.zero(), |acc, x| &acc + &(&x.conj() * x));
                Ok(if v.boundary_genus == 0 { &norm * &self.eta_inv } else { norm })
            }
            ManifoldDesc::Compression { boundary_genus: 0, .. } => {
                Ok(crate::fkb::boundary_vector(self, desc)?.coords.swap_remove(0))
            }
            ManifoldDesc::Compression { .. } => Err(Error::usage(
                "bounded description: use the boundary vector instead of a closed invariant",
            )),
        }
    }
}

/// `|z|² = z · conj(z)`.
pub fn abs_sq(z: &CycElem) -> CycElem {
    z * &z.conj()
}

// ---------------------------------------------------------------------------
// Murakami congruence and classical obstructions

/// Reduction `Z[A, 1/(…)] → F_p` sending `A ↦ −1` (so `u ↦ 1`). The input must
/// lie in `Z[A]` with no `p` in its denominator.
pub fn murakami_residue(x: &CycElem) -> Result<u64> {
    if !x.in_half_conductor_subring() {
        return Err(Error::Integrality(format!("{x} is not in Z[A]")));
    }
    if x.denom_exp() > 0 {
        return Err(Error::Integrality(format!("{x} keeps a p-power denominator")));
    }
    let p = BigInt::from(x.ring().p());
    // ξ^{2k} = A^k ↦ (−1)^k
    let s: BigInt = x
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(k, _)| k % 2 == 0)
        .map(|(k, c)| if (k / 2) % 2 == 0 { c.clone() } else { -c })
        .sum();
    Ok(s.mod_floor(&p).try_into().expect("residue below p"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MurakamiReport {
    #[serde(serialize_with = "ser_bigint")]
    pub h1_order: BigInt,
    pub residue: u64,
    /// `+1` or `−1` when the residue is `±|H₁|` mod `p`.
    pub sign: Option<i8>,
    pub holds: bool,
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Compares the integral-normalized invariant `rt_closed / η` with `±|H₁|` mod `p`.
pub fn murakami_check(ctx: &RtContext, desc: &ManifoldDesc) -> Result<MurakamiReport> {
    let h = homology_h1(&pi1(desc)?);
    let order = h.order().ok_or(Error::NotRationalHomologySphere(h.rank))?;
    let z = &ctx.rt_closed(desc)? * ctx.eta_inv();
    let residue = murakami_residue(&z)?;
    let p = BigInt::from(ctx.p());
    let n: u64 = order.mod_floor(&p).try_into().unwrap();
    let neg = (ctx.p() - n) % ctx.p();
    let sign = if residue == n {
        Some(1)
    } else if residue == neg {
        Some(-1)
    } else {
        None
    };
    Ok(MurakamiReport {
        h1_order: order,
        residue,
        sign,
        holds: sign.is_some(),
    })
}

/// True when `b₁(N) − ½b₁(∂N) ≥ b₁(M) − ½b₁(∂M)` fails, i.e. `N` cannot embed in `M`.
pub fn betti_obstruction(b1_n: u64, b1_dn: u64, b1_m: u64, b1_dm: u64) -> bool {
    (2 * b1_n as i128 - b1_dn as i128) < (2 * b1_m as i128 - b1_dm as i128)
}

/// True when `λ(M) ≡ λ(M₀) (mod Δ″)`; `Δ″ = 0` carries no information.
pub fn casson_congruence(lambda_m: i64, lambda_m0: i64, dd_alex: i64) -> bool {
    dd_alex == 0 || (lambda_m as i128 - lambda_m0 as i128) % (dd_alex as i128).abs() == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> ManifoldDesc {
        s.parse().unwrap()
    }

    fn h1(s: &str) -> String {
        homology_h1(&pi1(&d(s)).unwrap()).to_string()
    }

    #[test]
    fn presentation_text_round_trip() {
        let p = GroupPresentation::parse("gens: a b; rel: a b a B A, a^3").unwrap();
        assert_eq!(p.relators(), &[vec![1, 2, 1, -2, -1], vec![1, 1, 1]]);
        assert_eq!(GroupPresentation::parse(&p.to_string()).unwrap(), p);
        assert!(matches!(GroupPresentation::parse("gens: a; rel: a c"), Err(Error::Parse { column: 17, .. })));
        assert_eq!(homology_h1(&"gens: x; rel: x".parse().unwrap()).to_string(), "0");
    }

    #[test]
    fn homology_of_standard_spaces() {
        assert_eq!(h1("lens:5"), "Z/5");
        assert_eq!(h1("lens:0"), "Z");
        assert_eq!(h1("s3"), "0");
        assert_eq!(h1("mt:1:"), "Z^3");
        assert_eq!(h1("lens:2 # lens:4"), "Z/2 + Z/4");
        assert_eq!(h1("lens:2 # lens:3"), "Z/6");
        assert_eq!(h1(&format!("heegaard:1:{}", s3_word(1))), "0");
        assert_eq!(h1(&format!("heegaard:2:{}", s3_word(2))), "0");
        for b in 1..8 {
            let want = if b == 1 { "0".to_string() } else { format!("Z/{b}") };
            assert_eq!(h1(&format!("heegaard:1:{}", lens_word(1, b))), want);
            assert_eq!(h1(&format!("heegaard:2:{}", lens_word(2, b))), want);
        }
        assert_eq!(h1("mt:1:alpha"), "Z^2");
        assert_eq!(h1("compress:0:"), "Z^2");
        assert_eq!(h1("double(compress:1:)"), "Z^3");
    }

    #[test]
    fn group_tables() {
        let s3 = FiniteGroupTable::symmetric3();
        assert_eq!((s3.order(), s3.exponent(), s3.is_abelian()), (6, 6, false));
        let q8 = FiniteGroupTable::quaternion8();
        assert_eq!((q8.order(), q8.exponent(), q8.is_abelian()), (8, 4, false));
        assert_eq!(FiniteGroupTable::from_csv("Q8", &q8.to_csv()).unwrap(), q8);
        assert_eq!(FiniteGroupTable::by_name("Z3").unwrap().exponent(), 3);
        assert!(FiniteGroupTable::from_csv("bad", "0,1\n0,0\n").is_err());
    }

    #[test]
    fn dw_values() {
        let s3 = FiniteGroupTable::symmetric3();
        let z2 = FiniteGroupTable::cyclic(2).unwrap();
        let r = |n: i64, m: i64| BigRational::new(n.into(), m.into());
        assert_eq!(dw_invariant(&d("lens:3"), &s3, DEFAULT_NODE_BUDGET).unwrap(), r(1, 2));
        assert_eq!(dw_invariant(&d("s3"), &s3, DEFAULT_NODE_BUDGET).unwrap(), r(1, 6));
        assert_eq!(dw_invariant(&d("mt:1:"), &z2, DEFAULT_NODE_BUDGET).unwrap(), r(4, 1));
        assert_eq!(dw_invariant_tqft(&d("mt:1:"), &z2).unwrap(), r(4, 1));
        assert!(matches!(
            dw_invariant(&d("mt:1:"), &s3, 10),
            Err(Error::Budget { limit: 10, .. })
        ));
    }

    #[test]
    fn dw_two_routes_agree_on_lens_spaces() {
        for g in [FiniteGroupTable::symmetric3(), FiniteGroupTable::quaternion8()] {
            for b in 1..=6 {
                let lens = ManifoldDesc::Lens { b };
                let heeg = ManifoldDesc::Heegaard { word: lens_word(1, b) };
                let want = dw_invariant(&lens, &g, DEFAULT_NODE_BUDGET).unwrap();
                assert_eq!(dw_invariant_tqft(&lens, &g).unwrap(), want);
                assert_eq!(dw_invariant(&heeg, &g, DEFAULT_NODE_BUDGET).unwrap(), want);
            }
        }
    }

    #[test]
    fn twist_powers_at_the_exponent_act_trivially() {
        let g = FiniteGroupTable::symmetric3();
        let rep = dw_rep_genus1(&g);
        let n = g.exponent() as i64;
        for c in Curve::GENUS1 {
            for k in 1..3 {
                let perm = rep.permutation(&TwistWord::twist(c, n * k)).unwrap();
                assert!(perm.iter().enumerate().all(|(i, j)| i == *j));
            }
        }
    }

    #[test]
    fn rt_basic_values() {
        let ctx = RtContext::new(5).unwrap();
        assert_eq!(ctx.rt_closed(&d("s3")).unwrap(), ctx.eta());
        assert_eq!(ctx.rt_closed(&d("mt:1:")).unwrap(), ctx.ring().integer(2));
        assert!(ctx.rt_closed(&d("compress:1:")).is_err());
        assert!(ctx.kappa().is_unit());
        assert_eq!(ctx.rt_closed(&d("lens:0")).unwrap(), ctx.ring().one());
    }

    #[test]
    fn lens_surgery_matches_heegaard_word_in_absolute_value() {
        for p in [5, 7] {
            let ctx = RtContext::new(p).unwrap();
            for b in 1..=7 {
                let surg = ctx.rt_closed(&ManifoldDesc::Lens { b }).unwrap();
                let heeg = ctx.rt_closed(&ManifoldDesc::Heegaard { word: lens_word(1, b) }).unwrap();
                assert_eq!(abs_sq(&surg), abs_sq(&heeg), "p = {p}, b = {b}");
            }
        }
    }

    #[test]
    fn murakami_at_five() {
        let ctx = RtContext::new(5).unwrap();
        let signs: Vec<Option<i8>> = (1..=8)
            .map(|n| murakami_check(&ctx, &ManifoldDesc::Lens { b: n }).unwrap().sign)
            .collect();
        assert!(signs.iter().all(|s| s.is_some()));
        assert_eq!(murakami_check(&ctx, &d("lens:5")).unwrap().residue, 0);
        assert!(matches!(
            murakami_check(&ctx, &d("lens:0")),
            Err(Error::NotRationalHomologySphere(1))
        ));
    }

    #[test]
    fn classical_obstructions() {
        assert!(betti_obstruction(0, 0, 1, 0));
        assert!(!betti_obstruction(3, 2, 2, 0));
        assert!(casson_congruence(5, 2, 3));
        assert!(!casson_congruence(5, 3, 3));
        assert!(casson_congruence(5, 3, 0));
    }

    #[test]
    fn desc_json_round_trip() {
        let x = d("double(compress:1:c1*c3^-2) # lens:-3");
        let js = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<ManifoldDesc>(&js).unwrap(), x);
        assert!(serde_json::from_str::<ManifoldDesc>(r#"{"kind":"lens","b":2,"extra":1}"#).is_err());
    }

    fn arb_desc() -> impl Strategy<Value = ManifoldDesc> {
        let leaf = prop_oneof![
            (-9i64..10).prop_map(|b| ManifoldDesc::Lens { b }),
            prop::collection::vec((prop::sample::select(Curve::GENUS1.to_vec()), -3i64..4), 0..5)
                .prop_map(|ls| ManifoldDesc::MappingTorus { word: TwistWord::new(1, ls).unwrap() }),
            prop::collection::vec((prop::sample::select(Curve::GENUS2.to_vec()), -3i64..4), 0..5)
                .prop_map(|ls| ManifoldDesc::Heegaard { word: TwistWord::new(2, ls).unwrap() }),
            (0u8..2, prop::collection::vec((prop::sample::select(Curve::GENUS2.to_vec()), -3i64..4), 0..4))
                .prop_map(|(g, ls)| ManifoldDesc::double(ManifoldDesc::Compression {
                    boundary_genus: g,
                    word: TwistWord::new(2, ls).unwrap()
                })),
        ];
        leaf.prop_recursive(2, 6, 2, |inner| {
            (inner.clone(), inner).prop_map(|(a, b)| ManifoldDesc::connected_sum(a, b))
        })
    }

    proptest! {
        #[test]
        fn shorthand_and_json_round_trip(x in arb_desc()) {
            prop_assert_eq!(x.to_string().parse::<ManifoldDesc>().unwrap(), x.clone());
            let js = serde_json::to_string(&x).unwrap();
            prop_assert_eq!(serde_json::from_str::<ManifoldDesc>(&js).unwrap(), x);
        }

        #[test]
        fn dw_connected_sum_identity(a in 1i64..7, b in 1i64..7, gi in 0usize..2) {
            let g = [FiniteGroupTable::cyclic(2).unwrap(), FiniteGroupTable::symmetric3()][gi].clone();
            let (ma, mb) = (ManifoldDesc::Lens { b: a }, ManifoldDesc::Lens { b });
            let sum = ManifoldDesc::connected_sum(ma.clone(), mb.clone());
            let z = |m: &ManifoldDesc| dw_invariant(m, &g, DEFAULT_NODE_BUDGET).unwrap();
            prop_assert_eq!(z(&sum) * z(&ManifoldDesc::s3()), z(&ma) * z(&mb));
        }

        #[test]
        fn mapping_torus_trace_is_conjugation_invariant(
            w in prop::collection::vec((prop::sample::select(Curve::GENUS1.to_vec()), -3i64..4), 0..5),
            h in prop::collection::vec((prop::sample::select(Curve::GENUS1.to_vec()), -3i64..4), 0..4),
        ) {
            let ctx = RtContext::new(5).unwrap();
            let w = TwistWord::new(1, w).unwrap();
            let h = TwistWord::new(1, h).unwrap();
            let conj = h.concat(&w).unwrap().concat(&h.inverse()).unwrap();
            prop_assert_eq!(
                ctx.rt_closed(&ManifoldDesc::MappingTorus { word: w }).unwrap(),
                ctx.rt_closed(&ManifoldDesc::MappingTorus { word: conj }).unwrap()
            );
        }

        #[test]
        fn torus_bundles_two_dw_routes(
            w in prop::collection::vec((prop::sample::select(Curve::GENUS1.to_vec()), -3i64..4), 0..5),
        ) {
            let desc = ManifoldDesc::MappingTorus { word: TwistWord::new(1, w).unwrap() };
            let g = FiniteGroupTable::symmetric3();
            prop_assert_eq!(dw_invariant(&desc, &g, DEFAULT_NODE_BUDGET).unwrap(), dw_invariant_tqft(&desc, &g).unwrap());
        }
    }
}
