//! Command dispatch over a validated problem, with an on-disk
//! content-addressed result cache.
//!
//! Exit-code contract: 0 on success, 2 when any section is inconclusive,
//! 1 on error (surfaced as `Err` here; the CLI maps it).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::dirac::{dirac_index, verify_index_formulas};
use crate::fock::{shift_tuple, verify_identities, Part};
use crate::lattice::Side;
use crate::probe::probe_commutator_decay;
use crate::problem::{Mode, ProblemSpec};
use crate::report::*;
use crate::schatten::{commutator_spectrum, number_operator_series, schatten_sum, tail_exponent};
use crate::{Error, Result};

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "DSHIFT_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Hilbert,
    Curvature,
    Schatten,
    Identities,
    Index,
    Verify,
    Probe,
    All,
}

impl Command {
    pub const ALL_NAMES: [&'static str; 8] = [
        "hilbert",
        "curvature",
        "schatten",
        "identities",
        "index",
        "verify",
        "probe",
        "all",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Hilbert => "hilbert",
            Command::Curvature => "curvature",
            Command::Schatten => "schatten",
            Command::Identities => "identities",
            Command::Index => "index",
            Command::Verify => "verify",
            Command::Probe => "probe",
            Command::All => "all",
        }
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hilbert" => Ok(Command::Hilbert),
            "curvature" => Ok(Command::Curvature),
            "schatten" => Ok(Command::Schatten),
            "identities" => Ok(Command::Identities),
            "index" => Ok(Command::Index),
            "verify" => Ok(Command::Verify),
            "probe" => Ok(Command::Probe),
            "all" => Ok(Command::All),
            other => Err(Error::InvalidProblem(format!(
                "unknown command {other:?}; expected one of {:?}",
                Command::ALL_NAMES
            ))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub mode: Option<Mode>,
    pub cache_dir: Option<PathBuf>,
    pub no_cache: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    pub exit_code: i32,
    pub from_cache: bool,
}

fn cache_dir(options: &RunOptions) -> PathBuf {
    if let Some(dir) = &options.cache_dir {
        return dir.clone();
    }
    if let Ok(dir) = std::env::var(CACHE_DIR_ENV) {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    std::env::temp_dir().join("dshift-cache")
}

fn cache_key(command: Command, spec: &ProblemSpec, mode: Mode) -> String {
    let mut hasher = Sha256::new();
    hasher.update(env!("CARGO_PKG_VERSION").as_bytes());
    hasher.update([0]);
    hasher.update(command.name().as_bytes());
    hasher.update([0]);
    hasher.update(match mode {
        Mode::Exact => b"exact".as_slice(),
        Mode::Probe => b"probe".as_slice(),
    });
    hasher.update([0]);
    hasher.update(spec.canonical_json().as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Run a command over a validated spec, consulting the cache first.
pub fn run(command: Command, spec: &ProblemSpec, options: &RunOptions) -> Result<RunOutcome> {
    spec.validate()?;
    let mode = options.mode.unwrap_or(if spec.has_polynomial_generators() {
        Mode::Probe
    } else {
        Mode::Exact
    });

    let key = cache_key(command, spec, mode);
    let dir = cache_dir(options);
    let path = dir.join(format!("{key}.json"));
    if !options.no_cache {
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(report) = serde_json::from_str::<Report>(&text) {
                let exit_code = report.exit_code();
                return Ok(RunOutcome {
                    report,
                    exit_code,
                    from_cache: true,
                });
            }
        }
    }

    let report = compute(command, spec, mode)?;
    if !options.no_cache {
        let _ = std::fs::create_dir_all(&dir);
        let body = serde_json::to_string_pretty(&report.cache_body())
            .map_err(|e| Error::Numerical(format!("report serialization: {e}")))?;
        let _ = std::fs::write(&path, body);
    }
    let exit_code = report.exit_code();
    Ok(RunOutcome {
        report,
        exit_code,
        from_cache: false,
    })
}

fn compute(command: Command, spec: &ProblemSpec, mode: Mode) -> Result<Report> {
    let mut sections = Sections::default();
    let mut timings: BTreeMap<String, u64> = BTreeMap::new();
    let mut status = SectionStatus::Exact;

    let exact_wanted = |c: Command| {
        matches!(
            c,
            Command::Hilbert
                | Command::Curvature
                | Command::Schatten
                | Command::Identities
                | Command::Index
                | Command::Verify
        )
    };
    let run_exact = match command {
        Command::All => mode == Mode::Exact || !spec.has_polynomial_generators(),
        Command::Probe => false,
        c => {
            if mode == Mode::Probe && exact_wanted(c) && spec.has_polynomial_generators() {
                return Err(Error::InvalidProblem(format!(
                    "command {:?} needs monomial generators (exact mode)",
                    c.name()
                )));
            }
            true
        }
    };
    let run_probe = matches!(command, Command::Probe)
        || (matches!(command, Command::All)
            && (mode == Mode::Probe || spec.has_polynomial_generators()));

    let cutoff = spec.cutoff_or_default();
    let ps = spec.p_or_default();
    let budget = spec.budget_or_default();
    let window = spec.window_or_default();

    if run_exact {
        let module = spec.to_submodule().map_err(|e| {
            Error::InvalidProblem(format!("exact path (module {}): {e}", command.name()))
        })?;

        if matches!(command, Command::Hilbert | Command::All) {
            let t = Instant::now();
            let mut sub = Vec::new();
            let mut quot = Vec::new();
            let mut tot = Vec::new();
            for n in 0..=cutoff {
                let (a, b) = module.graded_dims(n);
                sub.push(a);
                quot.push(b);
                tot.push(a + b);
            }
            sections.hilbert = Some(HilbertSection {
                status: SectionStatus::Exact,
                max_degree: cutoff,
                submodule: sub,
                quotient: quot,
                total: tot,
            });
            timings.insert("hilbert".into(), t.elapsed().as_millis() as u64);
        }

        if matches!(command, Command::Curvature | Command::All) {
            let t = Instant::now();
            let s = module.curvature(Side::Submodule, cutoff)?;
            let q = module.curvature(Side::Quotient, cutoff)?;
            let sec_status = if s.stable && q.stable {
                SectionStatus::Exact
            } else {
                SectionStatus::Inconclusive
            };
            status = status.combine(sec_status);
            let additivity = match (s.k, q.k) {
                (Some(a), Some(b)) => Some(a + b == module.r() as i64),
                _ => None,
            };
            sections.curvature = Some(CurvatureSection {
                status: sec_status,
                submodule: CurvatureOut::from(&s),
                quotient: CurvatureOut::from(&q),
                additivity_holds: additivity,
            });
            timings.insert("curvature".into(), t.elapsed().as_millis() as u64);
        }

        if matches!(command, Command::Schatten | Command::All) {
            let t = Instant::now();
            let mut axes = Vec::new();
            let mut sec_status = SectionStatus::Exact;
            for k in 1..=module.d() {
                let stream = commutator_spectrum(&module, k, budget)?;
                let mut sums = Vec::new();
                for &p in &ps {
                    let rep = schatten_sum(&stream, p)?;
                    sec_status = sec_status.combine(verdict_status(rep.verdict));
                    sums.push(rep);
                }
                let tail = tail_exponent(&stream).ok();
                axes.push(axis_spectrum_out(k, &stream, &sums, tail.as_ref()));
            }
            let mut number_operator = Vec::new();
            for &p in &ps {
                let rep = number_operator_series(module.d(), p, budget.max(64))?;
                number_operator.push(SchattenSumOut::from(&rep));
            }
            status = status.combine(sec_status);
            sections.schatten = Some(SchattenSection {
                status: sec_status,
                axes,
                number_operator,
            });
            timings.insert("schatten".into(), t.elapsed().as_millis() as u64);
        }

        if matches!(command, Command::Identities | Command::All) {
            let t = Instant::now();
            match verify_identities(&module, cutoff) {
                Ok(rep) => {
                    let sec = IdentitySection::from_report(&rep);
                    status = status.combine(sec.status);
                    sections.identities = Some(sec);
                }
                Err(Error::CutoffTooSmall { .. }) => {
                    status = status.combine(SectionStatus::Inconclusive);
                    sections.identities = Some(IdentitySection {
                        status: SectionStatus::Inconclusive,
                        restricted_commutator_defect: "untested".into(),
                        compressed_commutator_defect: "untested".into(),
                        restricted_defect_identity: "untested".into(),
                        compressed_defect_identity: "untested".into(),
                        dirac_square_defect: "untested".into(),
                        degrees_tested: (0, 0),
                        all_zero: false,
                    });
                }
                Err(e) => return Err(e),
            }
            timings.insert("identities".into(), t.elapsed().as_millis() as u64);
        }

        if matches!(command, Command::Index | Command::All) {
            let t = Instant::now();
            let restricted = shift_tuple(&module, cutoff, Part::Restricted)?;
            let compressed = shift_tuple(&module, cutoff, Part::Compressed)?;
            let ib = dirac_index(&restricted, window)?;
            let ic = dirac_index(&compressed, window)?;
            let sub = IndexOut::from(&ib);
            let quot = IndexOut::from(&ic);
            let sec_status = if sub.stable && quot.stable {
                SectionStatus::Exact
            } else {
                SectionStatus::Inconclusive
            };
            status = status.combine(sec_status);
            sections.index = Some(IndexSection {
                status: sec_status,
                submodule: sub,
                quotient: quot,
            });
            timings.insert("index".into(), t.elapsed().as_millis() as u64);
        }

        if matches!(command, Command::Verify | Command::All) {
            let t = Instant::now();
            let rep = verify_index_formulas(&module, cutoff, window)?;
            let sec = VerifySection::from_report(&rep);
            status = status.combine(sec.status);
            sections.verify = Some(sec);
            timings.insert("verify".into(), t.elapsed().as_millis() as u64);
        }
    }

    if run_probe {
        let t = Instant::now();
        let gens = spec.to_generator_set()?;
        let top = cutoff.max(gens.max_degree() + 4);
        let cutoffs = vec![top.saturating_sub(4), top.saturating_sub(2), top];
        let reports = probe_commutator_decay(&gens, &cutoffs)?;
        let bases = crate::probe::graded_subspace_bases(&gens, top)?;
        let mut sec_status = SectionStatus::Exact;
        let axes: Vec<ProbeAxisOut> = reports
            .iter()
            .map(|r| {
                sec_status = sec_status.combine(probe_verdict_status(r.verdict));
                probe_axis_out(r)
            })
            .collect();
        status = status.combine(sec_status);
        sections.probe = Some(ProbeSection {
            status: sec_status,
            cutoffs,
            graded_dims: bases.iter().map(|b| (b.degree, b.vectors.len())).collect(),
            axes,
        });
        timings.insert("probe".into(), t.elapsed().as_millis() as u64);
    }

    Ok(Report {
        tool: "dshift".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.name().into(),
        input: input_echo(spec),
        status,
        sections,
        timings_ms: timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1z2_spec() -> ProblemSpec {
        ProblemSpec::parse(
            r#"{"d":2,"r":1,"generators":[{"exponent":[1,1]}],"cutoff":10,"p":[6.0],"budget":500,"window":6}"#,
        )
        .unwrap()
    }

    fn no_cache() -> RunOptions {
        RunOptions {
            no_cache: true,
            ..Default::default()
        }
    }

    #[test]
    fn verify_command_z1z2() {
        let out = run(Command::Verify, &z1z2_spec(), &no_cache()).unwrap();
        assert_eq!(out.exit_code, 0);
        let v = out.report.sections.verify.unwrap();
        assert!(v.all_hold);
        assert_eq!(v.index_quotient, Some(0));
        assert_eq!(v.index_submodule, Some(1));
    }

    #[test]
    fn schatten_command_z1z2() {
        let out = run(Command::Schatten, &z1z2_spec(), &no_cache()).unwrap();
        let s = out.report.sections.schatten.unwrap();
        let axis1 = &s.axes[0];
        let total = axis1.sums[0].total;
        // Σ (m+1)^{-3}, m = 1..500 ≈ ζ(3) − 1
        assert!((total - 0.2020569).abs() < 1e-4, "{total}");
        assert_eq!(axis1.sums[0].verdict, "converged");
    }

    #[test]
    fn index_small_cutoff_is_inconclusive_exit_2() {
        let spec = ProblemSpec::parse(
            r#"{"d":2,"r":1,"generators":[{"exponent":[2,2]}],"cutoff":5,"window":8}"#,
        )
        .unwrap();
        let out = run(Command::Index, &spec, &no_cache()).unwrap();
        assert_eq!(out.exit_code, 2);
        let ix = out.report.sections.index.unwrap();
        assert!(!ix.submodule.stable);
        assert!(ix.submodule.required_cutoff.is_some());
    }

    #[test]
    fn cache_returns_identical_body() {
        let dir = std::env::temp_dir().join(format!("dshift-test-cache-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let opts = RunOptions {
            cache_dir: Some(dir.clone()),
            ..Default::default()
        };
        let spec = z1z2_spec();
        let first = run(Command::Curvature, &spec, &opts).unwrap();
        assert!(!first.from_cache);
        let second = run(Command::Curvature, &spec, &opts).unwrap();
        assert!(second.from_cache);
        let a = serde_json::to_string(&first.report.cache_body()).unwrap();
        let b = serde_json::to_string(&second.report.cache_body()).unwrap();
        assert_eq!(a, b);
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn probe_command_runs_on_polynomials() {
        let spec = ProblemSpec::parse(
            r#"{"d":2,"r":1,"generators":[{"terms":[{"exponent":[2,0],"coeff":["1"]},{"exponent":[0,2],"coeff":["1"]}]}],"cutoff":10}"#,
        )
        .unwrap();
        let out = run(Command::Probe, &spec, &no_cache()).unwrap();
        let probe = out.report.sections.probe.unwrap();
        assert_eq!(probe.axes.len(), 2);
        for ax in &probe.axes {
            assert_eq!(ax.verdict, "decaying");
        }
    }

    #[test]
    fn all_command_populates_every_exact_section() {
        let out = run(Command::All, &z1z2_spec(), &no_cache()).unwrap();
        assert_eq!(out.exit_code, 0);
        let s = &out.report.sections;
        assert!(s.hilbert.is_some());
        assert!(s.curvature.is_some());
        assert!(s.schatten.is_some());
        assert!(s.identities.is_some());
        assert!(s.index.is_some());
        assert!(s.verify.is_some());
        assert!(s.probe.is_none(), "probe only runs for polynomial input");
        assert!(s.identities.as_ref().unwrap().all_zero);
    }

    #[test]
    fn exact_command_rejects_polynomial_generators() {
        let spec = ProblemSpec::parse(
            r#"{"d":2,"r":1,"generators":[{"terms":[{"exponent":[2,0],"coeff":["1"]}]}]}"#,
        )
        .unwrap();
        assert!(run(Command::Curvature, &spec, &no_cache()).is_err());
    }
}
