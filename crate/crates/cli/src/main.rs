//! `dshift` — compute invariants of monomial (and homogeneous-polynomial)
//! invariant subspaces of the finite-rank d-shift from a JSON problem file.
//!
//! Exit codes: 0 success, 2 when any report section is inconclusive,
//! 1 on error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use dshift_core::problem::{Mode, ProblemSpec};
use dshift_core::report::{Report, SectionStatus};
use dshift_core::runner::{run, Command, RunOptions};

#[derive(Parser, Debug)]
#[command(
    name = "dshift",
    version,
    about = "Operator-theoretic invariants of d-shift invariant subspaces",
    after_help = "COMMANDS:\n  hilbert     graded dimensions of M and its complement\n  curvature   finite-difference curvature of both sides\n  schatten    commutator spectra, Schatten sums, tail exponents\n  identities  exact defect/commutator operator identities\n  index       Dirac kernel dimensions and Fredholm index per side\n  verify      index formulas cross-checked against curvature\n  probe       floating-point decay probe for homogeneous generators\n  all         every applicable section\n\nThe problem file is JSON, e.g.\n  {\"d\":2,\"r\":1,\"generators\":[{\"exponent\":[1,1]}],\"cutoff\":10}\nRationals are strings like \"3/4\"; fiber defaults to all of C^r.\nCache directory override: DSHIFT_CACHE_DIR."
)]
struct Cli {
    /// Analysis to run (hilbert|curvature|schatten|identities|index|verify|probe|all)
    command: String,

    /// JSON problem file
    problem: PathBuf,

    /// Truncation degree override
    #[arg(long = "degree", short = 'N')]
    degree: Option<u32>,

    /// Schatten exponents (comma separated), e.g. --p 2.5,6
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,

    /// Spectrum/series enumeration budget (max total degree)
    #[arg(long, short = 'B')]
    budget: Option<u32>,

    /// Stabilization window for the index scan
    #[arg(long, short = 'W')]
    window: Option<usize>,

    /// Force exact or probe mode (default: inferred from the generators)
    #[arg(long)]
    mode: Option<String>,

    /// Output format
    #[arg(long, default_value = "json", value_parser = ["json", "text"])]
    format: String,

    /// Result cache directory (default: system temp dir, or DSHIFT_CACHE_DIR)
    #[arg(long)]
    cache_dir: Option<PathBuf>,

    /// Skip the result cache entirely
    #[arg(long)]
    no_cache: bool,

    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, String> {
    let command: Command = cli.command.parse().map_err(|e| format!("{e}"))?;
    let text = std::fs::read_to_string(&cli.problem)
        .map_err(|e| format!("reading {}: {e}", cli.problem.display()))?;
    let mut spec = ProblemSpec::parse(&text).map_err(|e| format!("{e}"))?;

    if let Some(n) = cli.degree {
        spec.cutoff = Some(n);
    }
    if let Some(p) = &cli.p {
        spec.p = Some(p.clone());
    }
    if let Some(b) = cli.budget {
        spec.budget = Some(b);
    }
    if let Some(w) = cli.window {
        spec.window = Some(w);
    }
    let mode: Option<Mode> = match &cli.mode {
        Some(m) => Some(m.parse().map_err(|e| format!("{e}"))?),
        None => None,
    };

    let options = RunOptions {
        mode,
        cache_dir: cli.cache_dir.clone(),
        no_cache: cli.no_cache,
    };
    let outcome = run(command, &spec, &options).map_err(|e| format!("{e}"))?;

    let rendered = match cli.format.as_str() {
        "json" => serde_json::to_string_pretty(&outcome.report)
            .map_err(|e| format!("serializing report: {e}"))?,
        _ => render_text(&outcome.report),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, rendered.as_bytes())
            .map_err(|e| format!("writing {}: {e}", path.display()))?,
        None => println!("{rendered}"),
    }
    Ok(outcome.exit_code as u8)
}

fn status_word(s: SectionStatus) -> &'static str {
    match s {
        SectionStatus::Exact => "exact",
        SectionStatus::Converged => "converged",
        SectionStatus::Diverging => "diverging",
        SectionStatus::Inconclusive => "inconclusive",
    }
}

fn render_text(report: &Report) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} — command {}: {}",
        report.tool,
        report.version,
        report.command,
        status_word(report.status)
    );
    if let Some(h) = &report.sections.hilbert {
        let _ = writeln!(out, "\nhilbert [{}]", status_word(h.status));
        let _ = writeln!(
            out,
            "  n:         {:?}",
            (0..=h.max_degree).collect::<Vec<_>>()
        );
        let _ = writeln!(out, "  dim M_n:   {:?}", h.submodule);
        let _ = writeln!(out, "  dim M⊥_n:  {:?}", h.quotient);
    }
    if let Some(c) = &report.sections.curvature {
        let _ = writeln!(out, "\ncurvature [{}]", status_word(c.status));
        let _ = writeln!(
            out,
            "  submodule: K = {} (stable: {})",
            c.submodule
                .k
                .map(|k| k.to_string())
                .unwrap_or_else(|| "?".into()),
            c.submodule.stable
        );
        let _ = writeln!(
            out,
            "  quotient:  K = {} (stable: {})",
            c.quotient
                .k
                .map(|k| k.to_string())
                .unwrap_or_else(|| "?".into()),
            c.quotient.stable
        );
        if let Some(a) = c.additivity_holds {
            let _ = writeln!(out, "  K_sub + K_quot = r: {a}");
        }
    }
    if let Some(s) = &report.sections.schatten {
        let _ = writeln!(out, "\nschatten [{}]", status_word(s.status));
        for ax in &s.axes {
            let _ = writeln!(
                out,
                "  axis {}: {} coalesced σ² values (count {}), exhausted: {}",
                ax.axis, ax.coalesced_entries, ax.total_count, ax.exhausted
            );
            for sum in &ax.sums {
                let _ = writeln!(
                    out,
                    "    p = {:<6} sum = {:.8}  [{}]",
                    sum.p, sum.total, sum.verdict
                );
            }
            if let Some(t) = &ax.tail {
                let _ = writeln!(
                    out,
                    "    tail: alpha = {:.4}, critical p = {}",
                    t.alpha,
                    t.critical_p
                        .map(|c| format!("{c:.3}"))
                        .unwrap_or_else(|| "∞ (not compact)".into())
                );
            }
        }
        for rep in &s.number_operator {
            let _ = writeln!(
                out,
                "  (1+N)^-1 series: p = {:<6} sum = {:.8}  [{}]",
                rep.p, rep.total, rep.verdict
            );
        }
    }
    if let Some(i) = &report.sections.identities {
        let _ = writeln!(out, "\nidentities [{}]", status_word(i.status));
        let _ = writeln!(
            out,
            "  degrees {:?}; defects: restr-comm {}, compr-comm {}, restr-defect {}, compr-defect {}, dirac² {}",
            i.degrees_tested,
            i.restricted_commutator_defect,
            i.compressed_commutator_defect,
            i.restricted_defect_identity,
            i.compressed_defect_identity,
            i.dirac_square_defect
        );
    }
    if let Some(ix) = &report.sections.index {
        let _ = writeln!(out, "\nindex [{}]", status_word(ix.status));
        for (side, o) in [("submodule", &ix.submodule), ("quotient", &ix.quotient)] {
            let _ = writeln!(
                out,
                "  {side}: ker± = ({}, {}), index = {}, blocks {:?}{}",
                o.dim_ker_plus,
                o.dim_ker_minus,
                o.index.map(|i| i.to_string()).unwrap_or_else(|| "?".into()),
                o.blocks_examined,
                o.required_cutoff
                    .map(|n| format!(" (needs cutoff >= {n})"))
                    .unwrap_or_default()
            );
        }
    }
    if let Some(v) = &report.sections.verify {
        let _ = writeln!(out, "\nverify [{}]", status_word(v.status));
        let fmt = |x: Option<i64>| x.map(|i| i.to_string()).unwrap_or_else(|| "?".into());
        let _ = writeln!(
            out,
            "  ind D_B+ = {}, ind D_C+ = {}, K_sub = {}, K_quot = {}",
            fmt(v.index_submodule),
            fmt(v.index_quotient),
            fmt(v.curvature_submodule),
            fmt(v.curvature_quotient)
        );
        let _ = writeln!(
            out,
            "  (−1)^d·K = ind: submodule {}, quotient {}; additivity to (−1)^d·r: {}",
            opt_bool(v.submodule_formula_holds),
            opt_bool(v.quotient_formula_holds),
            opt_bool(v.additivity_holds)
        );
    }
    if let Some(p) = &report.sections.probe {
        let _ = writeln!(
            out,
            "\nprobe [{}] (cutoffs {:?})",
            status_word(p.status),
            p.cutoffs
        );
        for ax in &p.axes {
            let _ = writeln!(
                out,
                "  axis {}: verdict {}; upper-half peaks {:?}",
                ax.axis, ax.verdict, ax.upper_half_peaks
            );
        }
    }
    out
}

fn opt_bool(b: Option<bool>) -> String {
    match b {
        Some(true) => "holds".into(),
        Some(false) => "FAILS".into(),
        None => "inconclusive".into(),
    }
}
