mod args;
mod report;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

#[derive(Debug)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn new(kind: &'static str, message: String) -> Self {
        Failure { kind, message }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure::new("usage", message.into())
    }
}

impl From<qtop::Error> for Failure {
    fn from(e: qtop::Error) -> Self {
        use qtop::Error::*;
        let kind = match &e {
            Usage(_) => "usage",
            RingMismatch { .. } => "ring-mismatch",
            InvalidResidue(_) => "invalid-residue",
            NotAUnit(_) => "not-a-unit",
            Admissibility(_) => "admissibility",
            Budget { .. } => "budget",
            NotRationalHomologySphere(_) => "not-rhs",
            Integrality(_) => "integrality",
            Parse { .. } => "parse",
            Degenerate(_) => "degenerate",
            Internal(_) => "internal",
        };
        let message = match e {
            Usage(m) => m,
            other => other.to_string(),
        };
        Failure::new(kind, message)
    }
}

fn destination(cli: &Cli, command: &str) -> Option<PathBuf> {
    cli.out
        .out
        .clone()
        .or_else(|| cli.out.out_dir.as_ref().map(|d| d.join(format!("{command}.{}", cli.out.format.extension()))))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run::execute(&cli) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind, f.message);
            return ExitCode::from(2);
        }
    };
    if let Some(path) = destination(&cli, &outcome.command) {
        let written = path
            .parent()
            .filter(|d| !d.as_os_str().is_empty())
            .map_or(Ok(()), std::fs::create_dir_all)
            .and_then(|_| std::fs::write(&path, &outcome.body));
        if let Err(e) = written {
            eprintln!("error[io]: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    let _ = std::io::stdout().write_all(outcome.body.as_bytes());
    ExitCode::from(outcome.code)
}

#[cfg(test)]
mod tests {
    use crate::args::Format;
    use crate::report::*;
    use proptest::prelude::*;
    use qtop::stochastic::Probability;

    fn config_strategy() -> impl Strategy<Value = RunConfig> {
        (
            prop::sample::select(vec!["homology", "walk-prob", "obstruct", "rep-check"]),
            prop::option::of(prop::sample::select(vec![5u64, 7, 11])),
            prop::option::of(any::<u64>()),
            prop::collection::btree_map("[a-z]{1,6}", "[ -~]{0,12}", 0..4),
            prop::sample::select(vec![Format::Json, Format::Text]),
        )
            .prop_map(|(command, p, seed, inputs, format)| RunConfig {
                command: command.to_string(),
                p,
                q: p.map(|p| vec![qtop::ring::ResidueSpec::default_candidates(&qtop::ring::RingSpec::new(p).unwrap(), 1)[0]]).unwrap_or_default(),
                seed,
                budget: None,
                inputs,
                output: None,
                format,
            })
    }

    fn round_trip<R>(env: &Envelope<R>) -> Envelope<R>
    where
        R: serde::Serialize + serde::de::DeserializeOwned,
    {
        serde_json::from_str(&env.to_json()).unwrap()
    }

    proptest! {
        #[test]
        fn generated_configs_validate_and_round_trip(c in config_strategy()) {
            prop_assert!(c.validate().is_ok());
            let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
            prop_assert_eq!(back, c);
        }

        #[test]
        fn homology_reports_round_trip(c in config_strategy(), torsion in prop::collection::vec(2u32..1000, 0..4), rank in 0usize..4) {
            let report = HomologyReport {
                presentation: "gens: a; rel: a a".into(),
                torsion: torsion.iter().map(u32::to_string).collect(),
                rank,
                group: "Z/2".into(),
            };
            let env = Envelope::new(c, report);
            prop_assert_eq!(round_trip(&env), env);
        }

        #[test]
        fn prob_reports_round_trip(c in config_strategy(), hits in 0u64..1000, extra in 1u64..1000, num in 0i64..50, den in 1i64..50) {
            let exact = num_rational::BigRational::new(num.into(), den.into());
            for probability in [
                Probability::Exact { value: exact.to_string(), decimal: num as f64 / den as f64 },
                Probability::Estimate { hits, trials: hits + extra, frequency: format!("{hits}/{}", hits + extra), decimal: 0.5, radius95: 0.01 },
            ] {
                let env = Envelope::new(c.clone(), ProbReport { q: 3, n: 2, m: 1, mode: crate::args::ProbMode::Sample, probability });
                prop_assert_eq!(round_trip(&env), env);
            }
        }

        #[test]
        fn rt_reports_round_trip(c in config_strategy(), coeffs in prop::collection::vec(-1000i64..1000, 8), e in 0u32..3) {
            let ring = qtop::ring::RingSpec::new(5).unwrap();
            let value = qtop::ring::CycElem::from_i64s(&ring, &coeffs, e);
            let report = RtReport {
                desc: "lens:3".into(),
                p: 5,
                display: value.to_string(),
                abs_sq: "1".into(),
                value,
                residues: vec![ResidueValue { q: 41, residue: 7 }],
                murakami: Some(MurakamiView { h1_order: "3".into(), residue: 3, sign: Some(1), holds: true }),
            };
            let env = Envelope::new(c, report);
            prop_assert_eq!(round_trip(&env), env);
        }
    }

    #[test]
    fn unknown_config_fields_are_rejected() {
        let text = r#"{"command":"homology","format":"text","inputs":{},"colour":"red"}"#;
        let err = serde_json::from_str::<RunConfig>(text).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = RunConfig::new("obstruct", Format::Json);
        c.p = Some(5);
        c.q = vec![43];
        assert!(c.validate().is_err());
        c.q = vec![41];
        assert!(c.validate().is_ok());
        c.p = Some(9);
        assert!(c.validate().is_err());
        assert!(RunConfig::new("nope", Format::Text).validate().is_err());
        assert!(RunConfig::new("homology", Format::Csv).validate().is_err());
    }

    #[test]
    fn obstruct_report_round_trips_with_search() {
        let ctx = qtop::manifold::RtContext::new(5).unwrap();
        let n: qtop::manifold::ManifoldDesc = "lens:3".parse().unwrap();
        let report = qtop::fkb::obstruct_embedding(&ctx, &n, &qtop::manifold::ManifoldDesc::s3(), &[41, 61]).unwrap();
        let search = Some(SearchSummary { found: false, tries: 10, word: None, certificate: None });
        let env = Envelope::new(RunConfig::new("obstruct", Format::Json), ObstructResult { report, search });
        assert_eq!(round_trip(&env), env);
    }
}
