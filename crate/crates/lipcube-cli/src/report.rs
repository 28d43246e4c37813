//! JSON report documents. Every document derives `Serialize` with a
//! fixed field order, so a seeded command re-run reproduces its report
//! byte for byte. Timing is never part of a report file.

use serde::Serialize;

use lipcube::analysis::{
    approx_f64, AvgStretch, InverseStretchCertificate, LocalMapCertificate, Rational,
    StretchMode, StretchReport,
};
use lipcube::randmap::{PipelineConfig, PipelineDiagnostics};

pub fn to_json_string<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
pub struct RationalDoc {
    pub numerator: u64,
    pub denominator: u64,
    pub approx: f64,
}

impl From<&Rational> for RationalDoc {
    fn from(r: &Rational) -> Self {
        RationalDoc {
            numerator: u64::try_from(*r.numer()).expect("desk-scale numerators fit u64"),
            denominator: u64::try_from(*r.denom()).expect("desk-scale denominators fit u64"),
            approx: approx_f64(r),
        }
    }
}

#[derive(Serialize)]
pub struct AvgStretchDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<RationalDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
}

/// Mirrors `analysis::StretchReport` field for field, prefixed by the
/// invocation that produced it.
#[derive(Serialize)]
pub struct StretchDoc {
    pub command: String,
    pub mapping: String,
    pub n: u32,
    pub lipschitz_constant: u32,
    pub avg_stretch: AvgStretchDoc,
    pub max_displacement: u32,
    pub mode: &'static str,
}

impl StretchDoc {
    pub fn new(command: String, name: &str, r: &StretchReport) -> Self {
        let avg_stretch = match &r.avg_stretch {
            AvgStretch::Exact(rat) => AvgStretchDoc {
                exact: Some(rat.into()),
                mean: None,
                samples: None,
            },
            AvgStretch::Sampled { mean, samples } => AvgStretchDoc {
                exact: None,
                mean: Some(*mean),
                samples: Some(*samples),
            },
        };
        StretchDoc {
            command,
            mapping: name.to_string(),
            n: r.n,
            lipschitz_constant: r.lipschitz_constant,
            avg_stretch,
            max_displacement: r.max_displacement,
            mode: match r.mode {
                StretchMode::Exhaustive => "exhaustive",
                StretchMode::Sampled => "sampled",
            },
        }
    }
}

#[derive(Serialize)]
pub struct VerifyDoc {
    pub mapping_file: String,
    pub n: u32,
    pub source: String,
    pub target: String,
    pub bijective: bool,
    pub is_mapping: bool,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub avg_stretch: RationalDoc,
    pub stretch_bound: RationalDoc,
    pub lipschitz: u32,
    pub ratio_sqrt_n: f64,
}

#[derive(Serialize)]
pub struct SweepDoc {
    pub command: String,
    pub mapping: String,
    pub rows: Vec<SweepRow>,
}

#[derive(Serialize)]
pub struct OutputBoundDoc {
    pub output: u32,
    /// BFS distance from `a_1` to this output's vertex; absent when
    /// disconnected.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dependency_distance: Option<u32>,
    pub min_inverse_stretch: u32,
    pub certified: bool,
}

#[derive(Serialize)]
pub struct DepgraphDoc {
    pub mapping_file: String,
    pub n: u32,
    pub locality: u32,
    /// `adjacency[j-1]` lists the 1-based inputs output `j` reads.
    pub adjacency: Vec<Vec<u32>>,
    pub bounds: Vec<OutputBoundDoc>,
    pub all_certified: bool,
    pub disconnected_outputs: Vec<u32>,
}

impl DepgraphDoc {
    pub fn new(
        file: String,
        adjacency: Vec<Vec<u32>>,
        locality: u32,
        cert: &InverseStretchCertificate,
    ) -> Self {
        DepgraphDoc {
            mapping_file: file,
            n: cert.dim,
            locality,
            adjacency,
            bounds: cert
                .bounds
                .iter()
                .map(|b| OutputBoundDoc {
                    output: b.output,
                    dependency_distance: b.dependency_distance,
                    min_inverse_stretch: b.min_inverse_stretch,
                    certified: b.certified,
                })
                .collect(),
            all_certified: cert.all_certified,
            disconnected_outputs: cert.disconnected_outputs.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct CertifyDoc {
    pub mapping_file: String,
    pub n: u32,
    pub lipschitz: u32,
    pub locality: u32,
    pub input_degree_cap: u64,
    pub max_input_degree: u32,
    pub degrees_ok: bool,
    pub delta: u64,
    pub eccentricity: u32,
    pub all_reachable: bool,
    pub eccentricity_bound: f64,
    pub inverse_lower_bound: f64,
    pub inverse_lipschitz: u32,
    pub certified: bool,
}

impl CertifyDoc {
    pub fn new(file: String, c: &LocalMapCertificate) -> Self {
        CertifyDoc {
            mapping_file: file,
            n: c.dim,
            lipschitz: c.lipschitz,
            locality: c.locality,
            input_degree_cap: c.input_degree_cap,
            max_input_degree: c.input_degrees.iter().copied().max().unwrap_or(0),
            degrees_ok: c.degrees_ok,
            delta: c.delta,
            eccentricity: c.eccentricity,
            all_reachable: c.all_reachable,
            eccentricity_bound: c.eccentricity_bound,
            inverse_lower_bound: c.inverse_lower_bound,
            inverse_lipschitz: c.inverse_lipschitz,
            certified: c.certified,
        }
    }
}

#[derive(Serialize)]
pub struct PipelineConfigDoc {
    pub n: u32,
    pub min_center_distance: u32,
    pub split_threshold: u64,
    pub split_target: u64,
    pub path_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discard_exponent: Option<u32>,
    pub unit_cap: u32,
    pub max_retries: u32,
    pub seed: u64,
}

impl From<&PipelineConfig> for PipelineConfigDoc {
    fn from(c: &PipelineConfig) -> Self {
        PipelineConfigDoc {
            n: c.n,
            min_center_distance: c.min_center_distance,
            split_threshold: c.split_threshold,
            split_target: c.split_target,
            path_count: c.path_count,
            discard_exponent: c.discard_exponent,
            unit_cap: c.unit_cap,
            max_retries: c.max_retries,
            seed: c.seed,
        }
    }
}

#[derive(Serialize)]
pub struct DiagnosticsDoc {
    pub block_count: usize,
    pub min_block_size: usize,
    pub max_block_size: usize,
    pub max_block_diameter: u32,
    pub max_imbalance: u64,
    pub total_imbalance: u64,
    pub positive_units: usize,
    pub negative_units: usize,
    pub paths_kept: usize,
    pub max_paths_through_block: u64,
    pub unit_edges: usize,
    pub distinct_unit_edges: usize,
    pub matching_size: usize,
    pub attempts: u32,
    pub displacement_bound: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_displacement: Option<u32>,
}

impl From<&PipelineDiagnostics> for DiagnosticsDoc {
    fn from(d: &PipelineDiagnostics) -> Self {
        DiagnosticsDoc {
            block_count: d.block_count,
            min_block_size: d.min_block_size,
            max_block_size: d.max_block_size,
            max_block_diameter: d.max_block_diameter,
            max_imbalance: d.max_imbalance,
            total_imbalance: d.total_imbalance,
            positive_units: d.positive_units,
            negative_units: d.negative_units,
            paths_kept: d.paths_kept,
            max_paths_through_block: d.max_paths_through_block,
            unit_edges: d.unit_edges,
            distinct_unit_edges: d.distinct_unit_edges,
            matching_size: d.matching_size,
            attempts: d.attempts,
            displacement_bound: d.displacement_bound,
            max_displacement: d.max_displacement,
        }
    }
}

#[derive(Serialize)]
pub struct RandmapDoc {
    pub command: String,
    pub config: PipelineConfigDoc,
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapping_file: Option<String>,
}

#[derive(Serialize)]
pub struct DlipDoc {
    pub command: String,
    pub n: u32,
    pub f_file: String,
    pub g_file: String,
    pub value: u64,
    pub candidates: u64,
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_file: Option<String>,
}
