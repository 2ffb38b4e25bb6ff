//! Mapping classes of closed genus 1 and 2 surfaces as Dehn-twist words.
//!
//! Curve catalogue: genus 1 has `alpha`, `beta`; genus 2 has the Humphries
//! chain `c1 … c5` plus the separating curve `s` cutting off the first handle.
//! Homology basis `(a1, b1, a2, b2)` with `⟨a_i, b_i⟩ = 1`; the curves carry
//! the classes `c1 = a1`, `c2 = b1`, `c3 = a2 − a1`, `c4 = b2`, `c5 = a2`, `s = 0`.
//!
//! A word `x1 x2 … xk` acts as the composite `τ_{x1} ∘ τ_{x2} ∘ … ∘ τ_{xk}`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Curve {
    Alpha,
    Beta,
    C1,
    C2,
    C3,
    C4,
    C5,
    S,
}

impl Curve {
    pub const GENUS1: [Curve; 2] = [Curve::Alpha, Curve::Beta];
    pub const HUMPHRIES: [Curve; 5] = [Curve::C1, Curve::C2, Curve::C3, Curve::C4, Curve::C5];
    pub const GENUS2: [Curve; 6] = [Curve::C1, Curve::C2, Curve::C3, Curve::C4, Curve::C5, Curve::S];

    pub fn genus(self) -> u8 {
        match self {
            Curve::Alpha | Curve::Beta => 1,
            _ => 2,
        }
    }

    pub fn catalogue(genus: u8) -> Result<&'static [Curve]> {
        match genus {
            1 => Ok(&Self::GENUS1),
            2 => Ok(&Self::GENUS2),
            g => Err(Error::usage(format!("unsupported genus {g} (expected 1 or 2)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Curve::Alpha => "alpha",
            Curve::Beta => "beta",
            Curve::C1 => "c1",
            Curve::C2 => "c2",
            Curve::C3 => "c3",
            Curve::C4 => "c4",
            Curve::C5 => "c5",
            Curve::S => "s",
        }
    }

    /// Homology class in the symplectic basis `(a1, b1[, a2, b2])`.
    pub fn homology_class(self) -> Vec<i64> {
        match self {
            Curve::Alpha => vec![1, 0],
            Curve::Beta => vec![0, 1],
            Curve::C1 => vec![1, 0, 0, 0],
            Curve::C2 => vec![0, 1, 0, 0],
            Curve::C3 => vec![-1, 0, 1, 0],
            Curve::C4 => vec![0, 0, 0, 1],
            Curve::C5 => vec![0, 0, 1, 0],
            Curve::S => vec![0, 0, 0, 0],
        }
    }
}

impl FromStr for Curve {
    type Err = Error;
    fn from_str(s: &str) -> Result<Curve> {
        Ok(match s {
            "alpha" | "α" => Curve::Alpha,
            "beta" | "β" => Curve::Beta,
            "c1" => Curve::C1,
            "c2" => Curve::C2,
            "c3" => Curve::C3,
            "c4" => Curve::C4,
            "c5" => Curve::C5,
            "s" => Curve::S,
            other => return Err(Error::usage(format!("unknown curve `{other}`"))),
        })
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Closed surface of genus 1 or 2, optionally with one boundary component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub genus: u8,
    pub boundary: u8,
}

impl SurfaceSpec {
    pub fn new(genus: u8, boundary: u8) -> Result<Self> {
        if !(1..=2).contains(&genus) || boundary > 1 {
            return Err(Error::usage(format!(
                "unsupported surface: genus {genus}, {boundary} boundary components"
            )));
        }
        Ok(SurfaceSpec { genus, boundary })
    }
}

/// A freely reduced word in Dehn twists: adjacent letters on the same curve
/// are merged and zero exponents dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwistWord {
    genus: u8,
    letters: Vec<(Curve, i64)>,
}

impl TwistWord {
    pub fn identity(genus: u8) -> Self {
        TwistWord { genus, letters: Vec::new() }
    }

    pub fn new(genus: u8, letters: impl IntoIterator<Item = (Curve, i64)>) -> Result<Self> {
        let cat = Curve::catalogue(genus)?;
        let mut out: Vec<(Curve, i64)> = Vec::new();
        for (c, e) in letters {
            if !cat.contains(&c) {
                return Err(Error::usage(format!("curve {c} is not in the genus-{genus} catalogue")));
            }
            push_letter(&mut out, c, e);
        }
        Ok(TwistWord { genus, letters: out })
    }

    pub fn twist(c: Curve, e: i64) -> Self {
        TwistWord::new(c.genus(), [(c, e)]).expect("catalogued curve")
    }

    pub fn genus(&self) -> u8 {
        self.genus
    }

    pub fn letters(&self) -> &[(Curve, i64)] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Total number of single twists `Σ |e|`.
    pub fn twist_count(&self) -> u64 {
        self.letters.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    pub fn exponent_sum(&self, c: Curve) -> i64 {
        self.letters.iter().filter(|l| l.0 == c).map(|l| l.1).sum()
    }

    pub fn inverse(&self) -> Self {
        TwistWord {
            genus: self.genus,
            letters: self.letters.iter().rev().map(|&(c, e)| (c, -e)).collect(),
        }
    }

    pub fn concat(&self, other: &TwistWord) -> Result<Self> {
        if self.genus != other.genus {
            return Err(Error::usage("cannot multiply words on different surfaces"));
        }
        let mut out = self.letters.clone();
        for &(c, e) in &other.letters {
            push_letter(&mut out, c, e);
        }
        Ok(TwistWord { genus: self.genus, letters: out })
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        (0..n.unsigned_abs()).fold(TwistWord::identity(self.genus), |acc, _| acc.concat(&base).unwrap())
    }

    pub fn parse(genus: u8, text: &str) -> Result<Self> {
        WordExpr::parse(genus, text)?.expand(genus)
    }

    /// Single-twist letters `(curve, ±1)` in order.
    pub fn unit_letters(&self) -> impl Iterator<Item = (Curve, i64)> + '_ {
        self.letters
            .iter()
            .flat_map(|&(c, e)| std::iter::repeat((c, e.signum())).take(e.unsigned_abs() as usize))
    }
}

fn push_letter(out: &mut Vec<(Curve, i64)>, c: Curve, e: i64) {
    if e == 0 {
        return;
    }
    if let Some(last) = out.last_mut() {
        if last.0 == c {
            last.1 += e;
            if last.1 == 0 {
                out.pop();
            }
            return;
        }
    }
    out.push((c, e));
}

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, &(c, e)) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            write_twist(f, c, e)?;
        }
        Ok(())
    }
}

fn write_twist(f: &mut fmt::Formatter<'_>, c: Curve, e: i64) -> fmt::Result {
    if e == 1 {
        write!(f, "{c}")
    } else {
        write!(f, "{c}^{e}")
    }
}

#[derive(Serialize, Deserialize)]
struct TwistWordWire {
    genus: u8,
    word: String,
}

impl Serialize for TwistWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TwistWordWire {
            genus: self.genus,
            word: self.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TwistWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = TwistWordWire::deserialize(d)?;
        TwistWord::parse(w.genus, &w.word).map_err(serde::de::Error::custom)
    }
}

/// Structured word: products, powers and commutators `[x, y] = x y x⁻¹ y⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordExpr {
    Identity,
    Twist(Curve, i64),
    Product(Vec<WordExpr>),
    Power(Box<WordExpr>, i64),
    Commutator(Box<WordExpr>, Box<WordExpr>),
}

impl WordExpr {
    pub fn parse(genus: u8, text: &str) -> Result<Self> {
        Curve::catalogue(genus)?;
        let mut p = Parser { src: text, pos: 0, genus };
        p.skip_ws();
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < text.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn conjugate(h: WordExpr, x: WordExpr) -> WordExpr {
        if h == WordExpr::Identity {
            return x;
        }
        WordExpr::Product(vec![h.clone(), x, WordExpr::Power(Box::new(h), -1)])
    }

    pub fn expand(&self, genus: u8) -> Result<TwistWord> {
        Ok(match self {
            WordExpr::Identity => TwistWord::identity(genus),
            WordExpr::Twist(c, e) => TwistWord::new(genus, [(*c, *e)])?,
            WordExpr::Product(items) => {
                let mut w = TwistWord::identity(genus);
                for it in items {
                    w = w.concat(&it.expand(genus)?)?;
                }
                w
            }
            WordExpr::Power(inner, n) => inner.expand(genus)?.pow(*n),
            WordExpr::Commutator(x, y) => {
                let (x, y) = (x.expand(genus)?, y.expand(genus)?);
                x.concat(&y)?.concat(&x.inverse())?.concat(&y.inverse())?
            }
        })
    }

    fn needs_parens_for_power(&self) -> bool {
        match self {
            WordExpr::Twist(_, e) => *e != 1,
            other => matches!(other, WordExpr::Product(_) | WordExpr::Power(..)),
        }
    }
}

impl fmt::Display for WordExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordExpr::Identity => f.write_str("1"),
            WordExpr::Twist(c, e) => write_twist(f, *c, *e),
            WordExpr::Product(items) => {
                if items.is_empty() {
                    return f.write_str("1");
                }
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    if matches!(it, WordExpr::Product(_)) {
                        write!(f, "({it})")?;
                    } else {
                        write!(f, "{it}")?;
                    }
                }
                Ok(())
            }
            WordExpr::Power(inner, n) => {
                if inner.needs_parens_for_power() {
                    write!(f, "({inner})^{n}")
                } else {
                    write!(f, "{inner}^{n}")
                }
            }
            WordExpr::Commutator(x, y) => write!(f, "[{x}, {y}]"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    genus: u8,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        let col = self.src[..self.pos].chars().count() + 1;
        Error::parse(1, col, msg)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<WordExpr> {
        let mut items = vec![self.term()?];
        while self.eat('*') {
            items.push(self.term()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { WordExpr::Product(items) })
    }

    fn term(&mut self) -> Result<WordExpr> {
        let atom = self.atom()?;
        if !self.eat('^') {
            return Ok(atom);
        }
        self.skip_ws();
        let n = self.integer()?;
        Ok(match atom {
            WordExpr::Twist(c, 1) => WordExpr::Twist(c, n),
            other => WordExpr::Power(Box::new(other), n),
        })
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        if self.peek() == Some('-') {
            self.bump();
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| {
                self.pos = start;
                self.err("expected an integer exponent")
            })
    }

    fn atom(&mut self) -> Result<WordExpr> {
        self.skip_ws();
        match self.peek() {
            Some('[') => {
                self.bump();
                let x = self.expr()?;
                if !self.eat(',') {
                    return Err(self.err("expected `,` in commutator"));
                }
                let y = self.expr()?;
                if !self.eat(']') {
                    return Err(self.err("expected `]`"));
                }
                Ok(WordExpr::Commutator(Box::new(x), Box::new(y)))
            }
            Some('(') => {
                self.bump();
                let x = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(x)
            }
            Some('1') => {
                self.bump();
                Ok(WordExpr::Identity)
            }
            Some(c) if c.is_alphanumeric() => {
                let start = self.pos;
                while self.peek().is_some_and(char::is_alphanumeric) {
                    self.bump();
                }
                let name = &self.src[start..self.pos];
                let curve: Curve = name.parse().map_err(|_| {
                    let col = self.src[..start].chars().count() + 1;
                    Error::parse(1, col, format!("unknown curve `{name}`"))
                })?;
                if curve.genus() != self.genus {
                    return Err(Error::usage(format!(
                        "curve {curve} is not in the genus-{} catalogue",
                        self.genus
                    )));
                }
                Ok(WordExpr::Twist(curve, 1))
            }
            _ => Err(self.err("expected a curve, `1`, `(` or `[`")),
        }
    }
}

/// Integer `2g × 2g` matrix acting on `H₁` (columns are images of basis vectors).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct H1Matrix(pub Vec<Vec<i64>>);

impl H1Matrix {
    pub fn identity(n: usize) -> Self {
        H1Matrix((0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, o: &H1Matrix) -> H1Matrix {
        let n = self.dim();
        H1Matrix(
            (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|k| self.0[i][k] * o.0[k][j]).sum()).collect())
                .collect(),
        )
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim())
    }

    /// `Mᵀ J M = J` for the standard form.
    pub fn is_symplectic(&self) -> bool {
        let n = self.dim();
        let j = |a: usize, b: usize| -> i64 {
            if a / 2 != b / 2 {
                0
            } else if a % 2 == 0 && b == a + 1 {
                1
            } else if a % 2 == 1 && b + 1 == a {
                -1
            } else {
                0
            }
        };
        (0..n).all(|r| {
            (0..n).all(|c| {
                let v: i64 = (0..n)
                    .flat_map(|k| (0..n).map(move |l| (k, l)))
                    .map(|(k, l)| self.0[k][r] * j(k, l) * self.0[l][c])
                    .sum();
                v == j(r, c)
            })
        })
    }
}

fn omega(x: &[i64], y: &[i64]) -> i64 {
    (0..x.len() / 2).map(|i| x[2 * i] * y[2 * i + 1] - x[2 * i + 1] * y[2 * i]).sum()
}

fn transvection(c: Curve, e: i64) -> H1Matrix {
    let g = c.homology_class();
    let n = g.len();
    let mut m = vec![vec![0; n]; n];
    for j in 0..n {
        let mut x = vec![0; n];
        x[j] = 1;
        let k = e * omega(&g, &x);
        for i in 0..n {
            m[i][j] = x[i] + k * g[i];
        }
    }
    H1Matrix(m)
}

/// Action on first homology: `T_γ(x) = x + ⟨γ, x⟩ γ` per letter.
pub fn h1_action(w: &TwistWord) -> H1Matrix {
    let n = 2 * w.genus() as usize;
    w.letters()
        .iter()
        .fold(H1Matrix::identity(n), |acc, &(c, e)| acc.mul(&transvection(c, e)))
}

pub fn is_torelli(w: &TwistWord) -> bool {
    h1_action(w).is_identity()
}

/// Free-group word: generator `k ≥ 1` is `k`, its inverse `−k`.
pub type FreeWord = Vec<i32>;

pub fn free_reduce(w: &mut FreeWord) {
    let mut out: FreeWord = Vec::with_capacity(w.len());
    for &x in w.iter() {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    *w = out;
}

pub fn free_inverse(w: &[i32]) -> FreeWord {
    w.iter().rev().map(|x| -x).collect()
}

fn substitute(images: &[FreeWord], w: &[i32]) -> FreeWord {
    let mut out = Vec::new();
    for &x in w {
        let img = &images[x.unsigned_abs() as usize - 1];
        if x > 0 {
            out.extend_from_slice(img);
        } else {
            out.extend(free_inverse(img));
        }
    }
    free_reduce(&mut out);
    out
}

/// Images of the standard generators `a1, b1[, a2, b2]` under a single twist `τ_c^{±1}`.
fn twist_automorphism(c: Curve, sign: i64) -> Vec<FreeWord> {
    let (a1, b1, a2, b2) = (1, 2, 3, 4);
    let inv = sign < 0;
    match c {
        Curve::Alpha | Curve::Beta => {
            let mut img = vec![vec![1], vec![2]];
            match (c, inv) {
                (Curve::Alpha, false) => img[1] = vec![2, 1],
                (Curve::Alpha, true) => img[1] = vec![2, -1],
                (Curve::Beta, false) => img[0] = vec![1, -2],
                (_, _) => img[0] = vec![1, 2],
            }
            img
        }
        _ => {
            let mut img = vec![vec![a1], vec![b1], vec![a2], vec![b2]];
            let z: FreeWord = vec![b1, -a1, -b1, a2];
            let zi = free_inverse(&z);
            let s: FreeWord = vec![a1, b1, -a1, -b1];
            let si = free_inverse(&s);
            let cat = |parts: &[&[i32]]| -> FreeWord {
                let mut w: FreeWord = parts.concat();
                free_reduce(&mut w);
                w
            };
            match (c, inv) {
                (Curve::C1, false) => img[1] = vec![b1, a1],
                (Curve::C1, true) => img[1] = vec![b1, -a1],
                (Curve::C2, false) => img[0] = vec![a1, -b1],
                (Curve::C2, true) => img[0] = vec![a1, b1],
                (Curve::C5, false) => img[3] = vec![b2, a2],
                (Curve::C5, true) => img[3] = vec![b2, -a2],
                (Curve::C4, false) => img[2] = vec![a2, -b2],
                (Curve::C4, true) => img[2] = vec![a2, b2],
                (Curve::C3, false) => {
                    img[1] = cat(&[&zi, &[b1]]);
                    img[2] = cat(&[&zi, &[a2], &z]);
                    img[3] = cat(&[&[b2], &z]);
                }
                (Curve::C3, true) => {
                    img[1] = cat(&[&z, &[b1]]);
                    img[2] = cat(&[&z, &[a2], &zi]);
                    img[3] = cat(&[&[b2], &zi]);
                }
                (Curve::S, false) => {
                    img[0] = cat(&[&si, &[a1], &s]);
                    img[1] = cat(&[&si, &[b1], &s]);
                }
                (_, _) => {
                    img[0] = cat(&[&s, &[a1], &si]);
                    img[1] = cat(&[&s, &[b1], &si]);
                }
            }
            img
        }
    }
}

/// Images of `a1, b1[, a2, b2]` under `τ_w = τ_{x1} ∘ … ∘ τ_{xk}`.
pub fn pi1_action(w: &TwistWord) -> Vec<FreeWord> {
    let n = 2 * w.genus() as i32;
    let mut images: Vec<FreeWord> = (1..=n).map(|g| vec![g]).collect();
    for (c, sgn) in w.unit_letters() {
        let step = twist_automorphism(c, sgn);
        images = step.iter().map(|img| substitute(&images, img)).collect();
    }
    images
}

/// Surface group relator `[a1, b1]…[a_g, b_g]`.
pub fn surface_relator(genus: u8) -> FreeWord {
    (0..genus as i32)
        .flat_map(|i| {
            let (a, b) = (2 * i + 1, 2 * i + 2);
            [a, b, -a, -b]
        })
        .collect()
}

/// A word certified by construction to lie in `Γ_k I ∩ T_n` (genus 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupWord {
    pub n: i64,
    pub k: u32,
    pub certificate: WordExpr,
    pub word: TwistWord,
}

fn random_humphries_word(rng: &mut ChaCha8Rng, len: usize) -> WordExpr {
    if len == 0 {
        return WordExpr::Identity;
    }
    let items: Vec<WordExpr> = (0..len)
        .map(|_| {
            let c = Curve::HUMPHRIES[rng.gen_range(0..5)];
            WordExpr::Twist(c, if rng.gen_bool(0.5) { 1 } else { -1 })
        })
        .collect();
    if items.len() == 1 {
        items.into_iter().next().unwrap()
    } else {
        WordExpr::Product(items)
    }
}

/// Leaves are conjugates `h · s^n · h⁻¹` of powers of the separating twist
/// (elements of `I ∩ T_n`); depth `k` nests `k − 1` commutators with fresh leaves.
pub fn word_in_subgroup(n: i64, k: u32, conjugator_len: usize, seed: u64) -> Result<SubgroupWord> {
    if n < 1 || k < 1 {
        return Err(Error::usage("word_in_subgroup needs n >= 1 and k >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaf = |rng: &mut ChaCha8Rng| {
        let h = random_humphries_word(rng, conjugator_len);
        WordExpr::conjugate(h, WordExpr::Twist(Curve::S, n))
    };
    let mut tree = leaf(&mut rng);
    for _ in 1..k {
        let fresh = leaf(&mut rng);
        tree = WordExpr::Commutator(Box::new(tree), Box::new(fresh));
    }
    let word = tree.expand(2)?;
    Ok(SubgroupWord {
        n,
        k,
        certificate: tree,
        word,
    })
}

/// Genus-1 analogue for `T_n` only: `h · alpha^n · h⁻¹`.
pub fn tn_word_genus1(n: i64, conjugator_len: usize, seed: u64) -> Result<(WordExpr, TwistWord)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h: Vec<WordExpr> = (0..conjugator_len)
        .map(|_| WordExpr::Twist(Curve::GENUS1[rng.gen_range(0..2)], if rng.gen_bool(0.5) { 1 } else { -1 }))
        .collect();
    let h = match h.len() {
        0 => WordExpr::Identity,
        1 => h.into_iter().next().unwrap(),
        _ => WordExpr::Product(h),
    };
    let tree = WordExpr::conjugate(h, WordExpr::Twist(Curve::Alpha, n));
    let word = tree.expand(1)?;
    Ok((tree, word))
}
