//! Stage orchestration (clean → match → enrich → adapt) and the JSON run report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clean::{clean, CleanConfig, CleanReport};
use crate::enrich::{assign_tab_order, enrich_document, EnrichReport};
use crate::metadata::{match_metadata, parse_metadata_csv, MatchResult, MetadataError};
use crate::profile::{profile_mask, DisabilityProfile};
use crate::rules::LayerRules;
use crate::style::StyleOptions;
use crate::svg::{parse_svg, serialize_svg, FloorplanDocument, ParseWarning, SvgError};
use crate::validate::{has_errors, validate_with_rules, Finding, Severity};
use crate::view::{apply_view, ViewError};

pub const REPORT_SCHEMA: &str = "adaptive-floorplan.report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Parse,
    Clean,
    Match,
    Enrich,
    Adapt,
    Validate,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).expect("stage serializes");
        f.write_str(s.as_str().unwrap_or_default())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageReport {
    pub stage: Stage,
    pub counts: BTreeMap<String, u64>,
    /// Named id lists, e.g. unmatched records.
    #[serde(default)]
    pub ids: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub input: String,
    pub stages: Vec<StageReport>,
    pub warnings: Vec<String>,
    pub findings: Vec<Finding>,
    pub error_count: u64,
    pub warning_count: u64,
}

impl Report {
    pub fn new(command: &str, input: &str) -> Self {
        Report {
            schema: REPORT_SCHEMA.to_string(),
            command: command.to_string(),
            input: input.to_string(),
            stages: Vec::new(),
            warnings: Vec::new(),
            findings: Vec::new(),
            error_count: 0,
            warning_count: 0,
        }
    }

    pub fn stage(&self, stage: Stage) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.stage == stage)
    }

    fn push_findings(&mut self, findings: Vec<Finding>) {
        self.findings.extend(findings);
        self.tally();
    }

    fn tally(&mut self) {
        self.error_count = self
            .findings
            .iter()
            .filter(|f| f.severity == Severity::Error)
            .count() as u64;
        self.warning_count = self.warnings.len() as u64
            + self
                .findings
                .iter()
                .filter(|f| f.severity == Severity::Warning)
                .count() as u64;
    }

    pub fn has_errors(&self) -> bool {
        has_errors(&self.findings)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("parse stage failed: {0}")]
    Parse(#[from] SvgError),
    #[error("match stage failed: {0}")]
    Metadata(#[from] MetadataError),
    #[error("adapt stage failed: {0}")]
    View(#[from] ViewError),
}

impl PipelineError {
    pub fn stage(&self) -> Stage {
        match self {
            PipelineError::Parse(_) => Stage::Parse,
            PipelineError::Metadata(_) => Stage::Match,
            PipelineError::View(_) => Stage::Adapt,
        }
    }
}

fn counts<const N: usize>(pairs: [(&str, u64); N]) -> BTreeMap<String, u64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn clean_stage(r: &CleanReport) -> StageReport {
    let mut c = BTreeMap::new();
    for (reason, n) in &r.removed_elements {
        let key = serde_json::to_value(reason).expect("reason serializes");
        c.insert(
            format!("removed_{}", key.as_str().unwrap_or_default()),
            *n as u64,
        );
    }
    for (ns, n) in &r.removed_attributes {
        c.insert(format!("removed_attributes_{ns}"), *n as u64);
    }
    c.insert("bytes_before".into(), r.bytes_before as u64);
    c.insert("bytes_after".into(), r.bytes_after as u64);
    StageReport {
        stage: Stage::Clean,
        counts: c,
        ids: BTreeMap::new(),
    }
}

fn match_stage(records: usize, m: &MatchResult) -> StageReport {
    StageReport {
        stage: Stage::Match,
        counts: counts([
            ("records", records as u64),
            ("matched", m.matched.len() as u64),
            (
                "matched_case_insensitive",
                m.matched.iter().filter(|x| x.case_insensitive).count() as u64,
            ),
            ("unmatched_records", m.unmatched_records.len() as u64),
            (
                "unmatched_candidate_elements",
                m.unmatched_candidate_elements.len() as u64,
            ),
        ]),
        ids: BTreeMap::from([
            (
                "unmatched_records".to_string(),
                m.unmatched_records
                    .iter()
                    .map(|r| r.element_id.clone())
                    .collect(),
            ),
            (
                "unmatched_candidate_elements".to_string(),
                m.unmatched_candidate_elements.clone(),
            ),
        ]),
    }
}

fn enrich_stage(r: &EnrichReport) -> StageReport {
    StageReport {
        stage: Stage::Enrich,
        counts: counts([
            ("enriched", r.enriched as u64),
            ("id_collisions", r.id_collisions.len() as u64),
        ]),
        ids: BTreeMap::from([(
            "renamed_desc_ids".to_string(),
            r.id_collisions.iter().map(|c| c.assigned.clone()).collect(),
        )]),
    }
}

fn parse_warnings(doc: &FloorplanDocument, report: &mut Report) {
    for w in doc.warnings() {
        let ParseWarning::DuplicateId { id, count } = w;
        report
            .warnings
            .push(format!("duplicate id `{id}` ({count} occurrences)"));
    }
}

/// Parses an already-enriched document as the starting point for `command`.
pub fn run_load(
    svg: &[u8],
    source_name: &str,
    command: &str,
) -> Result<(FloorplanDocument, Report), PipelineError> {
    let mut report = Report::new(command, source_name);
    let doc = parse_svg(svg, source_name)?;
    parse_warnings(&doc, &mut report);
    report.tally();
    Ok((doc, report))
}

/// Parses and cleans; returns the cleaned document.
pub fn run_clean(
    svg: &[u8],
    source_name: &str,
    cfg: &CleanConfig,
) -> Result<(FloorplanDocument, Report), PipelineError> {
    let mut report = Report::new("clean", source_name);
    let doc = parse_svg(svg, source_name)?;
    parse_warnings(&doc, &mut report);
    let cleaned = clean_into(&doc, cfg, &mut report);
    Ok((cleaned, report))
}

fn clean_into(
    doc: &FloorplanDocument,
    cfg: &CleanConfig,
    report: &mut Report,
) -> FloorplanDocument {
    let (cleaned, clean_report) = clean(doc, cfg);
    report.stages.push(clean_stage(&clean_report));
    report.tally();
    cleaned
}

#[derive(Debug, Clone)]
pub struct EnrichInputs<'a> {
    pub svg: &'a [u8],
    pub source_name: &'a str,
    pub metadata: &'a [u8],
    pub rules: &'a LayerRules,
    pub clean: &'a CleanConfig,
}

/// clean → match → enrich → tab order → validate.
pub fn run_enrich(inputs: &EnrichInputs<'_>) -> Result<(FloorplanDocument, Report), PipelineError> {
    let mut report = Report::new("enrich", inputs.source_name);
    let doc = parse_svg(inputs.svg, inputs.source_name)?;
    let cleaned = clean_into(&doc, inputs.clean, &mut report);
    let table = parse_metadata_csv(inputs.metadata)?;
    report
        .warnings
        .extend(table.warnings.iter().map(ToString::to_string));
    let matches = match_metadata(&cleaned, &table);
    report.stages.push(match_stage(table.len(), &matches));
    for r in &matches.unmatched_records {
        report.warnings.push(format!(
            "metadata row `{}` matched no element",
            r.element_id
        ));
    }
    let (enriched, enrich_report) = enrich_document(&cleaned, &matches, inputs.rules);
    let enriched = assign_tab_order(&enriched);
    report.stages.push(enrich_stage(&enrich_report));
    report.push_findings(validate_with_rules(&enriched, inputs.rules));
    Ok((enriched, report))
}

/// Applies a profile to an enriched document and validates the result.
pub fn run_adapt(
    enriched: &FloorplanDocument,
    mut report: Report,
    profile: &DisabilityProfile,
    style: &StyleOptions,
    rules: &LayerRules,
) -> Result<(FloorplanDocument, Report), PipelineError> {
    report.command = "adapt".into();
    let outcome = apply_view(enriched, profile, style, rules)?;
    let states = &outcome.states;
    report.stages.push(StageReport {
        stage: Stage::Adapt,
        counts: counts([
            (
                "profile_mask",
                u64::from(profile_mask(profile, rules).bits()),
            ),
            ("elements", states.len() as u64),
            (
                "active",
                states.iter().filter(|(_, s)| s.active).count() as u64,
            ),
            (
                "hidden",
                states.iter().filter(|(_, s)| !s.visible).count() as u64,
            ),
            (
                "highlighted",
                states.iter().filter(|(_, s)| s.highlighted).count() as u64,
            ),
            (
                "annotated",
                states
                    .iter()
                    .filter(|(_, s)| !s.annotations.is_empty())
                    .count() as u64,
            ),
        ]),
        ids: BTreeMap::new(),
    });
    report.warnings.extend(
        outcome
            .warnings
            .iter()
            .map(|w| serde_json::to_string(w).expect("warning serializes")),
    );
    report.findings.clear();
    report.push_findings(validate_with_rules(&outcome.document, rules));
    Ok((outcome.document, report))
}

pub fn run_validate(
    svg: &[u8],
    source_name: &str,
    rules: &LayerRules,
) -> Result<(FloorplanDocument, Report), PipelineError> {
    let mut report = Report::new("validate", source_name);
    let doc = parse_svg(svg, source_name)?;
    let findings = validate_with_rules(&doc, rules);
    report.stages.push(StageReport {
        stage: Stage::Validate,
        counts: counts([("findings", findings.len() as u64)]),
        ids: BTreeMap::new(),
    });
    report.push_findings(findings);
    Ok((doc, report))
}

/// Serialized output bytes for a document.
pub fn render(doc: &FloorplanDocument) -> Vec<u8> {
    serialize_svg(doc)
}
