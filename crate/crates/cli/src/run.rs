use std::path::Path;

use num_rational::BigRational;
use qtop::fkb::{fkb_ideal_closed, fkb_ideal_inner, obstruct_embedding, twist_search, SearchOutcome, SearchParams, Verdict};
use qtop::manifold::{
    abs_sq, dw_invariant, dw_invariant_tqft, homology_h1, murakami_check, pi1, FiniteGroupTable, GroupPresentation,
    ManifoldDesc, RtContext,
};
use qtop::mcg::{Curve, TwistWord};
use qtop::rep::{algebra_span_dim_of_words, verlinde_dim};
use qtop::ring::{ResidueSpec, RingSpec};
use qtop::stochastic::{hyperplane_prob, montecarlo_vanishing, psl, psl_lazy_walk, subgroup_walk, tv_to_uniform, HyperplaneMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::*;
use crate::report::*;
use crate::Failure;

/// A finished run: the rendered report in the requested format, and the exit code.
pub struct Outcome {
    pub command: String,
    pub body: String,
    pub code: u8,
}

fn finish<R: Serialize + Render>(config: RunConfig, report: R, code: u8) -> Result<Outcome, Failure> {
    let format = config.format;
    let command = config.command.clone();
    let body = match format {
        Format::Text => report.text(),
        Format::Csv => report
            .csv()
            .ok_or_else(|| Failure::usage(format!("`{command}` has no CSV form")))?,
        Format::Json => Envelope::new(config, report).to_json(),
    };
    Ok(Outcome { command, body, code })
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))
}

pub fn load_desc(args: &DescArgs) -> Result<ManifoldDesc, Failure> {
    load_desc_or(args, None)
}

fn load_desc_or(args: &DescArgs, default: Option<&str>) -> Result<ManifoldDesc, Failure> {
    if let Some(path) = &args.desc_file {
        return desc_from_json(&read(path)?);
    }
    match (&args.desc, default) {
        (Some(s), _) => Ok(s.parse()?),
        (None, Some(d)) => Ok(d.parse()?),
        (None, None) => Err(Failure::usage("give --desc or --desc-file")),
    }
}

pub fn desc_from_json(text: &str) -> Result<ManifoldDesc, Failure> {
    let d: ManifoldDesc = serde_json::from_str(text).map_err(json_failure)?;
    d.validate()?;
    Ok(d)
}

fn json_failure(e: serde_json::Error) -> Failure {
    let full = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    let message = full.strip_suffix(&suffix).unwrap_or(&full);
    if e.line() == 0 {
        Failure::new("parse", message.to_string())
    } else {
        Failure::new("parse", format!("line {}, column {}: {message}", e.line(), e.column()))
    }
}

fn q_list(ring: &RingSpec, given: &[u64]) -> Vec<u64> {
    if given.is_empty() {
        ResidueSpec::default_candidates(ring, 5)
    } else {
        given.to_vec()
    }
}

fn rational(r: &BigRational) -> String {
    r.to_string()
}

pub fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let format = cli.out.format;
    let output = cli.out.out.as_ref().map(|p| p.display().to_string());
    let cfg = |name: &str| {
        let mut c = RunConfig::new(name, format);
        c.output = output.clone();
        c
    };
    match &cli.command {
        Command::Invariant(InvariantCmd::Rt(a)) => {
            let desc = load_desc(&a.desc)?;
            let mut config = cfg("invariant-rt").input("desc", &desc);
            config.p = Some(a.p);
            config.q = a.q.clone();
            config.validate().map_err(Failure::usage)?;
            let ctx = RtContext::new(a.p)?;
            let value = ctx.rt_closed(&desc)?;
            let display = value.as_rational().map(|r| rational(&r)).unwrap_or_else(|| value.to_string());
            let sq = abs_sq(&value);
            let abs_sq = sq.as_rational().map(|r| rational(&r)).unwrap_or_else(|| sq.to_string());
            let residues = a
                .q
                .iter()
                .map(|&q| {
                    let r = ResidueSpec::new(ctx.ring(), q)?;
                    Ok(ResidueValue { q, residue: r.reduce(&value)? })
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let murakami = if a.murakami {
                let m = murakami_check(&ctx, &desc)?;
                Some(MurakamiView {
                    h1_order: m.h1_order.to_string(),
                    residue: m.residue,
                    sign: m.sign,
                    holds: m.holds,
                })
            } else {
                None
            };
            let report = RtReport {
                desc: desc.to_string(),
                p: a.p,
                value,
                display,
                abs_sq,
                residues,
                murakami,
            };
            finish(config, report, 0)
        }
        Command::Invariant(InvariantCmd::Dw(a)) => {
            let desc = load_desc(&a.desc)?;
            let g = match (&a.group, &a.group_file) {
                (Some(name), _) => FiniteGroupTable::by_name(name)?,
                (None, Some(path)) => {
                    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    FiniteGroupTable::from_csv(name, &read(path)?)?
                }
                (None, None) => return Err(Failure::usage("give --group or --group-file")),
            };
            let mut config = cfg("invariant-dw").input("desc", &desc).input("group", g.name());
            config.budget = Some(a.budget);
            config.validate().map_err(Failure::usage)?;
            let count = match a.method {
                DwMethod::Count | DwMethod::Both => Some(dw_invariant(&desc, &g, a.budget)?),
                DwMethod::Tqft => None,
            };
            let tqft = match a.method {
                DwMethod::Tqft | DwMethod::Both => Some(dw_invariant_tqft(&desc, &g)?),
                DwMethod::Count => None,
            };
            let agree = match (&count, &tqft) {
                (Some(x), Some(y)) => Some(x == y),
                _ => None,
            };
            let report = DwReport {
                desc: desc.to_string(),
                group: g.name().to_string(),
                order: g.order(),
                method: a.method,
                count: count.as_ref().map(rational),
                tqft: tqft.as_ref().map(rational),
                agree,
            };
            let code = if agree == Some(false) { 2 } else { 0 };
            finish(config, report, code)
        }
        Command::Homology(a) => {
            let (pres, config) = if let Some(text) = &a.presentation {
                (GroupPresentation::parse(text)?, cfg("homology").input("presentation", text))
            } else if let Some(path) = &a.presentation_file {
                let text = read(path)?;
                (GroupPresentation::parse(&text)?, cfg("homology").input("presentation", text.trim()))
            } else {
                let desc = load_desc(&a.desc)?;
                (pi1(&desc)?, cfg("homology").input("desc", &desc))
            };
            config.validate().map_err(Failure::usage)?;
            let h = homology_h1(&pres);
            let report = HomologyReport {
                presentation: pres.to_string(),
                torsion: h.torsion.iter().map(|t| t.to_string()).collect(),
                rank: h.rank,
                group: h.to_string(),
            };
            finish(config, report, 0)
        }
        Command::Obstruct(a) => {
            let candidate = match (&a.candidate, &a.candidate_file) {
                (_, Some(path)) => desc_from_json(&read(path)?)?,
                (Some(s), None) => s.parse()?,
                (None, None) => return Err(Failure::usage("give --candidate or --candidate-file")),
            };
            let target: ManifoldDesc = a.target.parse()?;
            let ctx = RtContext::new(a.p)?;
            let qs = q_list(ctx.ring(), &a.q);
            let mut config = cfg("obstruct").input("candidate", &candidate).input("target", &target);
            config.p = Some(a.p);
            config.q = qs.clone();
            if a.search {
                config.seed = Some(a.seed);
                config.budget = Some(a.budget as u64);
                config = config.input("search", "true").input("n", a.n);
            }
            config.validate().map_err(Failure::usage)?;
            let (n, search) = if a.search {
                let r = ResidueSpec::new(ctx.ring(), qs[0])?;
                let params = SearchParams {
                    n: a.n,
                    budget: a.budget,
                    seed: a.seed,
                    ..SearchParams::default()
                };
                match twist_search(&ctx, &candidate, &r, &params)? {
                    SearchOutcome::Found { word, certificate, tries } => {
                        let ManifoldDesc::Compression { boundary_genus, .. } = candidate else {
                            return Err(Failure::new("internal", "search returned a non-compression".into()));
                        };
                        let summary = SearchSummary {
                            found: true,
                            tries,
                            word: Some(word.to_string()),
                            certificate: Some(certificate.to_string()),
                        };
                        (ManifoldDesc::Compression { boundary_genus, word }, Some(summary))
                    }
                    SearchOutcome::NotFound { tries, .. } => (
                        candidate,
                        Some(SearchSummary {
                            found: false,
                            tries,
                            word: None,
                            certificate: None,
                        }),
                    ),
                }
            } else {
                (candidate, None)
            };
            let report = obstruct_embedding(&ctx, &n, &target, &qs)?;
            let code = match report.verdict {
                Verdict::Obstructed => 0,
                Verdict::NoObstructionFound => 1,
            };
            finish(config, ObstructResult { report, search }, code)
        }
        Command::Fkb(a) => {
            let desc = load_desc(&a.desc)?;
            let mut config = cfg("fkb").input("desc", &desc);
            config.p = Some(a.p);
            config.validate().map_err(Failure::usage)?;
            let ctx = RtContext::new(a.p)?;
            let strings = |b: &[Vec<num_bigint::BigInt>]| -> Vec<Vec<String>> {
                b.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
            };
            let report = match desc.boundary_genus() {
                None | Some(0) => {
                    let ideal = fkb_ideal_closed(&ctx, &desc)?;
                    FkbReport {
                        desc: desc.to_string(),
                        p: a.p,
                        boundary_genus: 0,
                        full: ideal.is_full(),
                        index: ideal.index().map(|i| i.to_string()),
                        basis: strings(ideal.basis()),
                        budget: None,
                        stabilized: None,
                        fillings_tried: None,
                    }
                }
                Some(1) => {
                    config.budget = Some(a.budget as u64);
                    let inner = fkb_ideal_inner(&ctx, &desc, a.budget)?;
                    FkbReport {
                        desc: desc.to_string(),
                        p: a.p,
                        boundary_genus: 1,
                        full: inner.full,
                        index: inner.ideal.index().map(|i| i.to_string()),
                        basis: strings(inner.ideal.basis()),
                        budget: Some(inner.budget),
                        stabilized: Some(inner.stabilized),
                        fillings_tried: Some(inner.fillings_tried),
                    }
                }
                Some(g) => return Err(Failure::usage(format!("FKB ideals need closed or torus boundary, got genus {g}"))),
            };
            finish(config, report, 0)
        }
        Command::Walk(WalkCmd::Mix(a)) => {
            let mut config = cfg("walk-mix").input("n", a.n).input("steps", a.steps);
            config.q = vec![a.q];
            config.budget = Some(a.cap as u64);
            config.validate().map_err(Failure::usage)?;
            let g = psl(a.q, a.n, a.cap)?;
            let spec = psl_lazy_walk(&g, a.steps, 0)?;
            let mixing = tv_to_uniform(&spec, &g, a.steps)?;
            finish(
                config,
                MixReport {
                    q: a.q,
                    n: a.n,
                    steps: a.steps,
                    mixing,
                },
                0,
            )
        }
        Command::Walk(WalkCmd::Prob(a)) => {
            let mut config = cfg("walk-prob").input("n", a.n).input("m", a.m).input("mode", format!("{:?}", a.mode).to_lowercase());
            config.q = vec![a.q];
            let mode = match a.mode {
                ProbMode::Formula => HyperplaneMode::Formula,
                ProbMode::Enumerate => {
                    config.budget = Some(a.cap as u64);
                    HyperplaneMode::Enumerate { cap: a.cap }
                }
                ProbMode::Sample => {
                    config.seed = Some(a.seed);
                    config.budget = Some(a.trials);
                    HyperplaneMode::Sample {
                        trials: a.trials,
                        seed: a.seed,
                    }
                }
            };
            config.validate().map_err(Failure::usage)?;
            let probability = hyperplane_prob(a.q, a.n, a.m, &mode)?;
            finish(
                config,
                ProbReport {
                    q: a.q,
                    n: a.n,
                    m: a.m,
                    mode: a.mode,
                    probability,
                },
                0,
            )
        }
        Command::Walk(WalkCmd::Montecarlo(a)) => {
            let desc = load_desc_or(&a.desc, Some("compress:0:"))?;
            let mut config = cfg("walk-montecarlo")
                .input("desc", &desc)
                .input("length", a.length)
                .input("leaves", a.leaves)
                .input("conjugatorLen", a.conjugator_len)
                .input("n", a.n);
            config.p = Some(a.p);
            config.q = vec![a.q];
            config.seed = Some(a.seed);
            config.budget = Some(a.trials);
            config.validate().map_err(Failure::usage)?;
            let ctx = RtContext::new(a.p)?;
            let r = ResidueSpec::new(ctx.ring(), a.q)?;
            let spec = subgroup_walk(a.n, a.leaves, a.conjugator_len, a.length, a.seed)?;
            let montecarlo = montecarlo_vanishing(&ctx, &desc, &r, &spec, a.trials)?;
            finish(
                config,
                MonteCarloView {
                    desc: desc.to_string(),
                    seed: a.seed,
                    leaves: a.leaves,
                    montecarlo,
                },
                0,
            )
        }
        Command::Rep(RepCmd::Check(a)) => {
            let ring = RingSpec::new(a.p)?;
            let q = a.q.unwrap_or_else(|| ResidueSpec::default_candidates(&ring, 1)[0]);
            let mut config = cfg("rep-check").input("genus", a.genus).input("words", a.words);
            config.p = Some(a.p);
            config.q = vec![q];
            config.seed = Some(a.seed);
            config.validate().map_err(Failure::usage)?;
            let ctx = RtContext::new(a.p)?;
            let rep = ctx.rep(a.genus)?;
            let relations = rep.relation_suite()?;
            let modrep = rep.reduce(&ResidueSpec::new(&ring, q)?)?;
            let words = random_words(a.genus, a.words, a.seed)?;
            let span_dim = algebra_span_dim_of_words(&modrep, &words)?;
            let dim = rep.dim();
            let report = RepCheckReport {
                genus: a.genus,
                p: a.p,
                dim,
                verlinde_dim: verlinde_dim(a.p, a.genus as u32),
                relations,
                q,
                words: a.words,
                span_dim,
                full_matrix_algebra: span_dim == dim * dim,
            };
            let code = if report.all_hold() { 0 } else { 2 };
            finish(config, report, code)
        }
    }
}

/// Words of 1 to 12 unit twists along catalogued curves, drawn from one seeded stream.
fn random_words(genus: u8, count: usize, seed: u64) -> Result<Vec<TwistWord>, Failure> {
    let curves = Curve::catalogue(genus)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=12);
            let letters: Vec<(Curve, i64)> = (0..len)
                .map(|_| {
                    let c = curves[rng.gen_range(0..curves.len())];
                    (c, if rng.gen_bool(0.5) { 1 } else { -1 })
                })
                .collect();
            Ok(TwistWord::new(genus, letters)?)
        })
        .collect()
}
