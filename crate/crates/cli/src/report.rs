use std::collections::BTreeMap;
use std::fmt::Write as _;

use qtop::fkb::ObstructionReport;
use qtop::rep::RelationCheck;
use qtop::ring::{is_prime, CycElem};
use qtop::stochastic::{MixingReport, MonteCarloReport, Probability};
use serde::{Deserialize, Serialize};

use crate::args::{DwMethod, Format, ProbMode};

pub const SCHEMA_VERSION: u32 = 1;

const COMMANDS: [&str; 9] = [
    "invariant-rt",
    "invariant-dw",
    "homology",
    "obstruct",
    "fkb",
    "walk-mix",
    "walk-prob",
    "walk-montecarlo",
    "rep-check",
];

/// Everything a run depends on, validated before any computation starts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub q: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default)]
    pub inputs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: &str, format: Format) -> Self {
        RunConfig {
            command: command.to_string(),
            p: None,
            q: Vec::new(),
            seed: None,
            budget: None,
            inputs: BTreeMap::new(),
            output: None,
            format,
        }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    /// `q` must be prime, and `1 mod 4p` whenever a level is set.
    pub fn validate(&self) -> Result<(), String> {
        if !COMMANDS.contains(&self.command.as_str()) {
            return Err(format!("unknown command `{}`", self.command));
        }
        if let Some(p) = self.p {
            if p < 5 || !is_prime(p) {
                return Err(format!("level p must be a prime >= 5, got {p}"));
            }
        }
        for &q in &self.q {
            if !is_prime(q) {
                return Err(format!("q = {q} is not prime"));
            }
            if let Some(p) = self.p {
                if q % (4 * p) != 1 {
                    return Err(format!("q = {q} is not 1 mod {}", 4 * p));
                }
            }
        }
        if self.budget == Some(0) {
            return Err("budget must be positive".into());
        }
        if self.format == Format::Csv && !self.has_csv() {
            return Err(format!("`{}` has no CSV form", self.command));
        }
        Ok(())
    }

    fn has_csv(&self) -> bool {
        matches!(self.command.as_str(), "walk-mix" | "walk-prob" | "obstruct" | "rep-check")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Envelope<R> {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    pub result: R,
}

impl<R: Serialize> Envelope<R> {
    pub fn new(config: RunConfig, result: R) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            command: config.command.clone(),
            config,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}

pub trait Render {
    fn text(&self) -> String;

    fn csv(&self) -> Option<String> {
        None
    }
}

fn csv_of(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ResidueValue {
    pub q: u64,
    pub residue: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MurakamiView {
    pub h1_order: String,
    pub residue: u64,
    pub sign: Option<i8>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RtReport {
    pub desc: String,
    pub p: u64,
    pub value: CycElem,
    pub display: String,
    pub abs_sq: String,
    pub residues: Vec<ResidueValue>,
    pub murakami: Option<MurakamiView>,
}

impl Render for RtReport {
    fn text(&self) -> String {
        let mut s = format!("{}\n|Z|^2 = {}\n", self.display, self.abs_sq);
        for r in &self.residues {
            let _ = writeln!(s, "mod {}: {}", r.q, r.residue);
        }
        if let Some(m) = &self.murakami {
            let verdict = if m.holds { "holds" } else { "fails" };
            let _ = writeln!(s, "murakami: |H1| = {}, residue {} mod {}, {verdict}", m.h1_order, m.residue, self.p);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DwReport {
    pub desc: String,
    pub group: String,
    pub order: usize,
    pub method: DwMethod,
    pub count: Option<String>,
    pub tqft: Option<String>,
    pub agree: Option<bool>,
}

impl Render for DwReport {
    fn text(&self) -> String {
        let mut s = String::new();
        if let Some(v) = self.count.as_ref().or(self.tqft.as_ref()) {
            let _ = writeln!(s, "{v}");
        }
        if let Some(agree) = self.agree {
            let _ = writeln!(s, "oracles {}", if agree { "agree" } else { "DISAGREE" });
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct HomologyReport {
    pub presentation: String,
    pub torsion: Vec<String>,
    pub rank: usize,
    pub group: String,
}

impl Render for HomologyReport {
    fn text(&self) -> String {
        format!("{}\n", self.group)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SearchSummary {
    pub found: bool,
    pub tries: usize,
    pub word: Option<String>,
    pub certificate: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ObstructResult {
    #[serde(flatten)]
    pub report: ObstructionReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSummary>,
}

impl Render for ObstructResult {
    fn text(&self) -> String {
        let r = &self.report;
        let mut s = format!("{}\n", serde_json::to_value(r.verdict).expect("verdict").as_str().unwrap_or_default());
        let _ = writeln!(s, "candidate {} in target {} at p = {}", r.candidate, r.target, r.p);
        for row in &r.certificate {
            let _ = writeln!(
                s,
                "q = {}: target residue {}, candidate {}",
                row.q,
                row.m_residue,
                if row.n_vanishes { "vanishes" } else { "survives" }
            );
        }
        if let Some(sr) = &self.search {
            match (&sr.certificate, sr.found) {
                (Some(c), true) => {
                    let _ = writeln!(s, "search: found after {} tries, gluing {c}", sr.tries);
                }
                _ => {
                    let _ = writeln!(s, "search: nothing found in {} tries", sr.tries);
                }
            }
        }
        s
    }

    fn csv(&self) -> Option<String> {
        let rows = self
            .report
            .certificate
            .iter()
            .map(|r| {
                let v: Vec<String> = r.n_vector.iter().map(u64::to_string).collect();
                vec![r.q.to_string(), r.m_residue.to_string(), r.n_vanishes.to_string(), v.join(" ")]
            })
            .collect();
        Some(csv_of(&["q", "m_residue", "n_vanishes", "n_vector"], rows))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FkbReport {
    pub desc: String,
    pub p: u64,
    pub boundary_genus: u8,
    pub full: bool,
    pub index: Option<String>,
    pub basis: Vec<Vec<String>>,
    pub budget: Option<usize>,
    pub stabilized: Option<bool>,
    pub fillings_tried: Option<usize>,
}

impl Render for FkbReport {
    fn text(&self) -> String {
        let mut s = if self.full {
            "full ring\n".to_string()
        } else {
            match &self.index {
                Some(i) => format!("index {i}\n"),
                None => "not of full rank\n".to_string(),
            }
        };
        if let (Some(b), Some(st), Some(n)) = (self.budget, self.stabilized, self.fillings_tried) {
            let _ = writeln!(s, "inner approximation: {n} fillings up to length {b}, stabilized: {st}");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MixReport {
    pub q: u64,
    pub n: usize,
    pub steps: usize,
    pub mixing: MixingReport,
}

impl Render for MixReport {
    fn text(&self) -> String {
        let m = &self.mixing;
        let mut s = format!("|PSL_{}(F_{})| = {}\n", self.n, self.q, m.group_order);
        match m.first_below_one_percent {
            Some(d) => {
                let _ = writeln!(s, "TV < 0.01 at step {d}");
            }
            None => {
                let _ = writeln!(s, "TV >= 0.01 through step {}", self.steps);
            }
        }
        let _ = writeln!(s, "nonincreasing: {}", m.nonincreasing);
        s
    }

    fn csv(&self) -> Option<String> {
        let rows = self
            .mixing
            .tv
            .iter()
            .zip(&self.mixing.tv_decimal)
            .enumerate()
            .map(|(d, (exact, dec))| vec![d.to_string(), dec.to_string(), exact.clone()])
            .collect();
        Some(csv_of(&["step", "tv", "tv_exact"], rows))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ProbReport {
    pub q: u64,
    pub n: usize,
    pub m: usize,
    pub mode: ProbMode,
    pub probability: Probability,
}

impl Render for ProbReport {
    fn text(&self) -> String {
        match &self.probability {
            Probability::Exact { value, .. } => format!("{value}\n"),
            Probability::Estimate {
                hits,
                trials,
                decimal,
                radius95,
                ..
            } => format!("{decimal:.6} +/- {radius95:.6} ({hits}/{trials})\n"),
        }
    }

    fn csv(&self) -> Option<String> {
        let (value, hits, trials) = match &self.probability {
            Probability::Exact { value, .. } => (value.clone(), String::new(), String::new()),
            Probability::Estimate { frequency, hits, trials, .. } => (frequency.clone(), hits.to_string(), trials.to_string()),
        };
        let row = vec![
            self.q.to_string(),
            self.n.to_string(),
            self.m.to_string(),
            value,
            self.probability.decimal().to_string(),
            hits,
            trials,
        ];
        Some(csv_of(&["q", "n", "m", "value", "decimal", "hits", "trials"], vec![row]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MonteCarloView {
    pub desc: String,
    pub seed: u64,
    pub leaves: usize,
    pub montecarlo: MonteCarloReport,
}

impl Render for MonteCarloView {
    fn text(&self) -> String {
        let m = &self.montecarlo;
        format!(
            "frequency {:.4} ({}/{}), exact {:.4}, bound {:.4}, sigma {:.4}\nkernel {} of {}\n",
            m.frequency.decimal(),
            m.hits,
            m.trials,
            m.exact_for_kernel.decimal(),
            m.bound.decimal(),
            m.sigma,
            m.kernel_dim,
            m.space_dim
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RepCheckReport {
    pub genus: u8,
    pub p: u64,
    pub dim: usize,
    pub verlinde_dim: u64,
    pub relations: Vec<RelationCheck>,
    pub q: u64,
    pub words: usize,
    pub span_dim: usize,
    pub full_matrix_algebra: bool,
}

impl RepCheckReport {
    pub fn all_hold(&self) -> bool {
        self.relations.iter().all(|r| r.holds)
    }
}

impl Render for RepCheckReport {
    fn text(&self) -> String {
        let mut s = format!("genus {} at p = {}: dimension {} (Verlinde {})\n", self.genus, self.p, self.dim, self.verlinde_dim);
        for r in &self.relations {
            let _ = writeln!(s, "{} {}", if r.holds { "ok  " } else { "FAIL" }, r.name);
        }
        let _ = writeln!(
            s,
            "span of {} words mod {}: {} of {}",
            self.words,
            self.q,
            self.span_dim,
            self.dim * self.dim
        );
        s
    }

    fn csv(&self) -> Option<String> {
        let rows = self.relations.iter().map(|r| vec![r.name.clone(), r.holds.to_string()]).collect();
        Some(csv_of(&["relation", "holds"], rows))
    }
}
