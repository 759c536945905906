//! Report schema: every analysis section carries a status, exact values are
//! serialized as rational strings (never floats), and floating-point values
//! are finite by construction (infinities are flagged, not emitted).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dirac::{IndexFormulasReport, IndexReport, IndexStatus};
use crate::fock::IdentityReport;
use crate::lattice::CurvatureReport;
use crate::probe::{DecayReport, DecayVerdict};
use crate::problem::{format_rational, ProblemSpec};
use crate::schatten::{SchattenReport, SpectrumStream, TailFit, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionStatus {
    Exact,
    Converged,
    Diverging,
    Inconclusive,
}

impl SectionStatus {
    /// Worst-of combination for the overall report status: anything
    /// inconclusive dominates.
    pub fn combine(self, other: SectionStatus) -> SectionStatus {
        self.max(other)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input: serde_json::Value,
    pub status: SectionStatus,
    pub sections: Sections,
    /// Wall-clock timings; zeroed inside the cache body so cached reports
    /// compare byte-identical.
    pub timings_ms: BTreeMap<String, u64>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.status == SectionStatus::Inconclusive {
            2
        } else {
            0
        }
    }

    /// The cacheable body: identical report with timings cleared.
    pub fn cache_body(&self) -> Report {
        let mut r = self.clone();
        r.timings_ms = BTreeMap::new();
        r
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Sections {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hilbert: Option<HilbertSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schatten: Option<SchattenSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identities: Option<IdentitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<IndexSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HilbertSection {
    pub status: SectionStatus,
    pub max_degree: u32,
    /// dim M_n for n = 0..=max_degree.
    pub submodule: Vec<u64>,
    /// dim M⊥_n for n = 0..=max_degree.
    pub quotient: Vec<u64>,
    pub total: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureOut {
    pub k: Option<i64>,
    pub stable: bool,
    pub window: (u32, u32),
    pub hilbert_samples: Vec<(u32, u64)>,
}

impl From<&CurvatureReport> for CurvatureOut {
    fn from(r: &CurvatureReport) -> Self {
        Self {
            k: r.k,
            stable: r.stable,
            window: r.window,
            hilbert_samples: r.hilbert_samples.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureSection {
    pub status: SectionStatus,
    pub submodule: CurvatureOut,
    pub quotient: CurvatureOut,
    /// K(sub) + K(quot) = r when both sides are stable.
    pub additivity_holds: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailOut {
    pub alpha: f64,
    /// None encodes a non-decaying spectrum (critical p = +∞).
    pub critical_p: Option<f64>,
    pub residual: f64,
}

impl From<&TailFit> for TailOut {
    fn from(t: &TailFit) -> Self {
        Self {
            alpha: t.alpha,
            critical_p: t.critical_p.is_finite().then_some(t.critical_p),
            residual: t.residual,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchattenSumOut {
    pub p: f64,
    pub total: f64,
    pub last_relative_increment: f64,
    pub verdict: String,
    pub partial_sums: Vec<f64>,
}

impl From<&SchattenReport> for SchattenSumOut {
    fn from(r: &SchattenReport) -> Self {
        Self {
            p: r.p,
            total: r.total,
            last_relative_increment: r.last_relative_increment,
            verdict: verdict_name(r.verdict).to_string(),
            partial_sums: r.partial_sums.clone(),
        }
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Converged => "converged",
        Verdict::Diverging => "diverging",
        Verdict::Inconclusive => "inconclusive",
    }
}

pub fn verdict_status(v: Verdict) -> SectionStatus {
    match v {
        Verdict::Converged => SectionStatus::Converged,
        Verdict::Diverging => SectionStatus::Diverging,
        Verdict::Inconclusive => SectionStatus::Inconclusive,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisSpectrumOut {
    pub axis: usize,
    pub exhausted: bool,
    pub budget: u32,
    pub coalesced_entries: usize,
    pub total_count: u64,
    /// Leading (σ², multiplicity) pairs, σ² as exact rational strings.
    pub leading: Vec<(String, u64)>,
    pub sums: Vec<SchattenSumOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailOut>,
}

pub fn axis_spectrum_out(
    axis: usize,
    stream: &SpectrumStream,
    sums: &[SchattenReport],
    tail: Option<&TailFit>,
) -> AxisSpectrumOut {
    AxisSpectrumOut {
        axis,
        exhausted: stream.exhausted,
        budget: stream.budget,
        coalesced_entries: stream.entries.len(),
        total_count: stream.total_count(),
        leading: stream
            .entries
            .iter()
            .take(32)
            .map(|e| (format_rational(&e.sigma_sq), e.multiplicity))
            .collect(),
        sums: sums.iter().map(SchattenSumOut::from).collect(),
        tail: tail.map(TailOut::from),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchattenSection {
    pub status: SectionStatus,
    pub axes: Vec<AxisSpectrumOut>,
    /// Number-operator series (1+N)⁻¹ diagnostics per requested p.
    pub number_operator: Vec<SchattenSumOut>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentitySection {
    pub status: SectionStatus,
    /// Exact maximal defects as rational strings.
    pub restricted_commutator_defect: String,
    pub compressed_commutator_defect: String,
    pub restricted_defect_identity: String,
    pub compressed_defect_identity: String,
    pub dirac_square_defect: String,
    pub degrees_tested: (u32, u32),
    pub all_zero: bool,
}

impl IdentitySection {
    pub fn from_report(r: &IdentityReport) -> Self {
        Self {
            status: if r.all_zero {
                SectionStatus::Exact
            } else {
                SectionStatus::Inconclusive
            },
            restricted_commutator_defect: format_rational(&r.restricted_commutator),
            compressed_commutator_defect: format_rational(&r.compressed_commutator),
            restricted_defect_identity: format_rational(&r.restricted_defect),
            compressed_defect_identity: format_rational(&r.compressed_defect),
            dirac_square_defect: format_rational(&r.dirac_square),
            degrees_tested: r.degrees_tested,
            all_zero: r.all_zero,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexOut {
    pub stable: bool,
    pub dim_ker_plus: usize,
    pub dim_ker_minus: usize,
    pub index: Option<i64>,
    pub blocks_examined: (i64, i64),
    pub window: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub required_cutoff: Option<u32>,
    pub kernel_blocks: Vec<(i64, usize, usize)>,
}

impl From<&IndexReport> for IndexOut {
    fn from(r: &IndexReport) -> Self {
        let stable = r.status == IndexStatus::Stable;
        Self {
            stable,
            dim_ker_plus: r.dim_ker_plus,
            dim_ker_minus: r.dim_ker_minus,
            index: stable.then_some(r.index),
            blocks_examined: r.blocks_examined,
            window: r.window,
            required_cutoff: r.required_cutoff,
            kernel_blocks: r.kernel_blocks.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexSection {
    pub status: SectionStatus,
    pub submodule: IndexOut,
    pub quotient: IndexOut,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifySection {
    pub status: SectionStatus,
    pub d: usize,
    pub r: usize,
    pub index_submodule: Option<i64>,
    pub index_quotient: Option<i64>,
    pub curvature_submodule: Option<i64>,
    pub curvature_quotient: Option<i64>,
    pub submodule_formula_holds: Option<bool>,
    pub quotient_formula_holds: Option<bool>,
    pub additivity_holds: Option<bool>,
    pub all_hold: bool,
}

impl VerifySection {
    pub fn from_report(r: &IndexFormulasReport) -> Self {
        Self {
            status: if r.conclusive {
                SectionStatus::Exact
            } else {
                SectionStatus::Inconclusive
            },
            d: r.d,
            r: r.r,
            index_submodule: r.index_submodule,
            index_quotient: r.index_quotient,
            curvature_submodule: r.curvature_submodule,
            curvature_quotient: r.curvature_quotient,
            submodule_formula_holds: r.submodule_formula_holds,
            quotient_formula_holds: r.quotient_formula_holds,
            additivity_holds: r.additivity_holds,
            all_hold: r.all_hold(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeAxisOut {
    pub axis: usize,
    pub verdict: String,
    pub upper_half_peaks: Vec<(u32, f64)>,
    /// Leading singular values at the largest cutoff (plot-ready).
    pub singular_values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailOut>,
}

pub fn probe_axis_out(r: &DecayReport) -> ProbeAxisOut {
    ProbeAxisOut {
        axis: r.axis,
        verdict: match r.verdict {
            DecayVerdict::Decaying => "decaying",
            DecayVerdict::NonDecaying => "non-decaying",
            DecayVerdict::Inconclusive => "inconclusive",
        }
        .to_string(),
        upper_half_peaks: r.upper_half_peaks.clone(),
        singular_values: r.singular_values.iter().take(256).copied().collect(),
        tail: r.tail.as_ref().map(TailOut::from),
    }
}

pub fn probe_verdict_status(v: DecayVerdict) -> SectionStatus {
    match v {
        DecayVerdict::Decaying => SectionStatus::Converged,
        DecayVerdict::NonDecaying => SectionStatus::Diverging,
        DecayVerdict::Inconclusive => SectionStatus::Inconclusive,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeSection {
    pub status: SectionStatus,
    pub cutoffs: Vec<u32>,
    pub graded_dims: Vec<(u32, usize)>,
    pub axes: Vec<ProbeAxisOut>,
}

/// Echo of the canonicalized input inside the report.
pub fn input_echo(spec: &ProblemSpec) -> serde_json::Value {
    serde_json::from_str(&spec.canonical_json()).expect("canonical spec is valid JSON")
}
