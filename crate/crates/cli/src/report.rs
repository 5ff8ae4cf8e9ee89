//! Report shapes and the three output renderings (text, JSON, CSV).
//!
//! JSON reports carry the full input echo, so a report can be replayed with
//! `--from-json` and reproduces itself byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{ensure, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use replan::effect::EffectEstimate;

use crate::args::{Format, OutputArgs};
use crate::input::{ModelCfg, PriorSpec, SizeSpec, Study, TauSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
pub struct Report<I, R> {
    pub schema_version: u32,
    pub command: String,
    pub input: I,
    pub result: R,
}

/// Input echo shared by the single-study commands. Sections a command does
/// not use stay absent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Input {
    pub study: Study,
    pub model: ModelCfg,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<SizeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_t1e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McCfg>,
}

impl Input {
    pub fn new(study: Study, model: ModelCfg) -> Self {
        Self {
            study,
            model,
            size: None,
            target: None,
            max_n: None,
            max_t1e: None,
            c_grid: None,
            cost: None,
            mc: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CostCfg {
    pub cost_site: f64,
    pub cost_unit: f64,
    pub m_min: usize,
    pub m_max: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McCfg {
    pub sites: usize,
    pub draws: usize,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
pub struct BatchInput {
    pub corpus: String,
    pub model: ModelCfg,
    pub target: f64,
    pub sort_by_p: bool,
}

/// The study on the scale the computations ran on (reflected to positive
/// when the reported original estimate was negative).
#[derive(Serialize)]
pub struct EffectOut {
    pub estimate: f64,
    pub se: f64,
    pub z: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

pub fn effect_out(effect: &EffectEstimate) -> EffectOut {
    EffectOut {
        estimate: effect.estimate(),
        se: effect.se(),
        z: effect.z(),
        n: effect.n(),
    }
}

#[derive(Serialize)]
pub struct PriorResult {
    pub id: String,
    pub reflected: bool,
    pub original: EffectOut,
    pub tau: f64,
    /// Initial-prior variance relative to the original's marginal variance;
    /// absent under the flat prior.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    pub mean: f64,
    pub sd: f64,
    /// Fraction of the original estimate given up toward the prior mean.
    pub shrinkage: f64,
    pub limiting_sd: f64,
}

#[derive(Serialize)]
pub struct MethodPors {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pors: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Serialize)]
pub struct PorsResult {
    pub id: String,
    pub reflected: bool,
    pub original: EffectOut,
    pub sr: f64,
    pub rel_size: f64,
    pub rep_n: u64,
    pub methods: Vec<MethodPors>,
}

#[derive(Serialize)]
pub struct SsdMethodOut {
    pub method: String,
    pub state: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sr_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_size: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_r: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1e: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Serialize)]
pub struct CombinedOut {
    pub state: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binding: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sr_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_r: Option<u64>,
}

#[derive(Serialize)]
pub struct SsdReport {
    pub id: String,
    pub reflected: bool,
    pub original: EffectOut,
    pub target: f64,
    pub methods: Vec<SsdMethodOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combined: Option<CombinedOut>,
}

#[derive(Serialize)]
pub struct CurveMethod {
    pub method: String,
    pub pors: Vec<f64>,
    pub t1e: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Serialize)]
pub struct CurveResult {
    pub id: String,
    pub reflected: bool,
    pub original: EffectOut,
    pub c_grid: Vec<f64>,
    pub sr_grid: Vec<f64>,
    pub n_grid: Vec<u64>,
    pub methods: Vec<CurveMethod>,
}

#[derive(Serialize)]
pub struct T1eMethod {
    pub method: String,
    pub t1e: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Serialize)]
pub struct T1eResult {
    pub id: String,
    pub reflected: bool,
    pub original: EffectOut,
    pub c_grid: Vec<f64>,
    pub sr_grid: Vec<f64>,
    pub n_grid: Vec<u64>,
    pub methods: Vec<T1eMethod>,
}

#[derive(Serialize)]
pub struct BatchStudyOut {
    pub id: String,
    pub reflected: bool,
    pub original: EffectOut,
    pub p_one_sided: f64,
    pub methods: Vec<SsdMethodOut>,
}

#[derive(Serialize)]
pub struct SkippedRow {
    pub line: u64,
    pub message: String,
}

#[derive(Serialize)]
pub struct BatchResult {
    pub studies: Vec<BatchStudyOut>,
    pub skipped: Vec<SkippedRow>,
}

#[derive(Serialize)]
pub struct SitePoint {
    pub m: usize,
    pub state: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site_n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved: Option<f64>,
}

#[derive(Serialize)]
pub struct SiteOptimum {
    pub m: usize,
    pub site_n: u64,
    pub total_n: u64,
    pub total_cost: f64,
}

#[derive(Serialize)]
pub struct MultisiteResult {
    pub id: String,
    pub reflected: bool,
    pub original: EffectOut,
    pub method: String,
    pub target: f64,
    pub sites: Vec<SitePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimum: Option<SiteOptimum>,
    /// Cost-minimizing per-site size when the number of sites is free;
    /// absent without heterogeneity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_site_size: Option<u64>,
}

#[derive(Serialize)]
pub struct ValidateMethod {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulated: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_se: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Serialize)]
pub struct ValidateResult {
    pub id: String,
    pub reflected: bool,
    pub original: EffectOut,
    pub sr: f64,
    pub sites: usize,
    pub draws: usize,
    pub seed: u64,
    pub methods: Vec<ValidateMethod>,
}

pub fn deliver<I: Serialize, R: Serialize>(
    out: &OutputArgs,
    replaying: bool,
    rep: &Report<I, R>,
    text: impl FnOnce(&Report<I, R>) -> String,
    csv: impl FnOnce(&Report<I, R>) -> Result<String>,
) -> Result<()> {
    let default = if replaying { Format::Json } else { Format::Text };
    let content = match out.format.unwrap_or(default) {
        Format::Json => serde_json::to_string_pretty(rep).context("serializing the report")? + "\n",
        Format::Text => text(rep),
        Format::Csv => csv(rep)?,
    };
    match &out.out {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

pub fn load_input<I: DeserializeOwned>(path: &Path, expect: &str) -> Result<I> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let rep: Report<I, serde_json::Value> =
        serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))?;
    ensure!(
        rep.schema_version == SCHEMA_VERSION,
        "{} has schema version {}, this build reads {}",
        path.display(),
        rep.schema_version,
        SCHEMA_VERSION
    );
    ensure!(
        rep.command == expect,
        "{} is a {:?} report, not {:?}",
        path.display(),
        rep.command,
        expect
    );
    Ok(rep.input)
}

fn opt_f(x: Option<f64>, prec: usize) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$}"))
}

fn opt_u(x: Option<u64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn cell_f(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn cell_u(x: Option<u64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn csv_done(writer: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = writer.into_inner().context("flushing CSV output")?;
    String::from_utf8(bytes).context("CSV output was not UTF-8")
}

fn tau_source(tau: &TauSpec) -> String {
    match tau {
        TauSpec::Fixed { .. } => String::new(),
        TauSpec::Absolute { d, coverage } => {
            format!(" (from a +/-{d} shift band at {coverage} coverage)")
        }
        TauSpec::Relative { i2 } => format!(" (from variance share I2 = {i2})"),
    }
}

fn prior_text_of(prior: &PriorSpec) -> String {
    match prior {
        PriorSpec::Flat => "flat".to_string(),
        PriorSpec::Normal { mean, sd } => format!("normal(mean {mean}, sd {sd})"),
        PriorSpec::Eb { mean } => format!("empirical Bayes around {mean}"),
        PriorSpec::Pilot { estimate, se } => format!("pilot study ({estimate} +/- {se})"),
    }
}

fn study_header(out: &mut String, id: &str, original: &EffectOut, reflected: bool) {
    let _ = writeln!(out, "study: {id}");
    let _ = writeln!(
        out,
        "original: estimate {:.4}, se {:.4} (z = {:.2}){}",
        original.estimate,
        original.se,
        original.z,
        if reflected { "  [reflected to the positive scale]" } else { "" }
    );
}

pub fn prior_text(rep: &Report<Input, PriorResult>) -> String {
    let r = &rep.result;
    let mut out = String::new();
    study_header(&mut out, &r.id, &r.original, r.reflected);
    let _ = writeln!(out, "initial prior: {}", prior_text_of(&rep.input.model.prior));
    let _ = writeln!(
        out,
        "heterogeneity: tau = {:.5}{}",
        r.tau,
        tau_source(&rep.input.model.tau)
    );
    let _ = writeln!(out, "design prior: N(mean = {:.5}, sd = {:.5})", r.mean, r.sd);
    if let Some(g) = r.g {
        let _ = writeln!(out, "relative prior variance g = {g:.4}");
    }
    let _ = writeln!(out, "shrinkage toward the prior mean: {:.1}%", 100.0 * r.shrinkage);
    let _ = writeln!(out, "limiting sd (infinitely large replication): {:.5}", r.limiting_sd);
    out
}

pub fn prior_csv(rep: &Report<Input, PriorResult>) -> Result<String> {
    let r = &rep.result;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record([
        "id", "reflected", "estimate", "se", "z", "tau", "g", "mean", "sd", "shrinkage",
        "limiting_sd",
    ])?;
    w.write_record([
        r.id.clone(),
        r.reflected.to_string(),
        r.original.estimate.to_string(),
        r.original.se.to_string(),
        r.original.z.to_string(),
        r.tau.to_string(),
        cell_f(r.g),
        r.mean.to_string(),
        r.sd.to_string(),
        r.shrinkage.to_string(),
        r.limiting_sd.to_string(),
    ])?;
    csv_done(w)
}

pub fn pors_text(rep: &Report<Input, PorsResult>) -> String {
    let r = &rep.result;
    let mut out = String::new();
    study_header(&mut out, &r.id, &r.original, r.reflected);
    let _ = writeln!(
        out,
        "replication: sr = {:.5} (c = {:.3}, n = {})",
        r.sr, r.rel_size, r.rep_n
    );
    let _ = writeln!(out, "probability of replication success");
    for m in &r.methods {
        match (m.pors, &m.note) {
            (Some(p), _) => {
                let _ = writeln!(out, "  {:<18} {p:.4}", m.method);
            }
            (None, note) => {
                let _ = writeln!(
                    out,
                    "  {:<18} -  ({})",
                    m.method,
                    note.as_deref().unwrap_or("not available")
                );
            }
        }
    }
    out
}

pub fn pors_csv(rep: &Report<Input, PorsResult>) -> Result<String> {
    let r = &rep.result;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["id", "reflected", "method", "sr", "rel_size", "rep_n", "pors", "note"])?;
    for m in &r.methods {
        w.write_record([
            r.id.clone(),
            r.reflected.to_string(),
            m.method.clone(),
            r.sr.to_string(),
            r.rel_size.to_string(),
            r.rep_n.to_string(),
            cell_f(m.pors),
            m.note.clone().unwrap_or_default(),
        ])?;
    }
    csv_done(w)
}

fn ssd_method_lines(out: &mut String, methods: &[SsdMethodOut]) {
    let _ = writeln!(
        out,
        "{:<18} {:<17} {:>9} {:>8} {:>7} {:>9} {:>7} {:>8}",
        "criterion", "state", "sr*", "c", "n", "achieved", "limit", "t1e"
    );
    for m in methods {
        let _ = writeln!(
            out,
            "{:<18} {:<17} {:>9} {:>8} {:>7} {:>9} {:>7} {:>8}",
            m.method,
            m.state,
            opt_f(m.sr_star, 5),
            opt_f(m.rel_size, 3),
            opt_u(m.n_r),
            opt_f(m.achieved, 4),
            opt_f(m.limit, 4),
            opt_f(m.t1e, 4),
        );
        if let Some(note) = &m.note {
            let _ = writeln!(out, "{:<18}   note: {note}", "");
        }
        for v in &m.violations {
            let _ = writeln!(out, "{:<18}   violated: {v}", "");
        }
    }
}

pub fn ssd_text(rep: &Report<Input, SsdReport>) -> String {
    let r = &rep.result;
    let mut out = String::new();
    study_header(&mut out, &r.id, &r.original, r.reflected);
    let _ = writeln!(out, "target success probability: {:.3}", r.target);
    let _ = writeln!(out);
    ssd_method_lines(&mut out, &r.methods);
    if let Some(c) = &r.combined {
        let _ = writeln!(out);
        match (&c.binding, c.sr_star, c.n_r) {
            (Some(binding), Some(sr), Some(n)) => {
                let _ = writeln!(
                    out,
                    "combined requirement: sr* = {sr:.5} (n = {n}), binding criterion: {binding}"
                );
            }
            _ => {
                let _ = writeln!(out, "combined requirement: {}", c.state);
            }
        }
    }
    out
}

pub fn ssd_csv(rep: &Report<Input, SsdReport>) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record([
        "id", "reflected", "method", "state", "limit", "sr_star", "rel_size", "n_r", "achieved",
        "t1e", "violations", "note",
    ])?;
    let r = &rep.result;
    for m in &r.methods {
        w.write_record([
            r.id.clone(),
            r.reflected.to_string(),
            m.method.clone(),
            m.state.clone(),
            cell_f(m.limit),
            cell_f(m.sr_star),
            cell_f(m.rel_size),
            cell_u(m.n_r),
            cell_f(m.achieved),
            cell_f(m.t1e),
            m.violations.join("; "),
            m.note.clone().unwrap_or_default(),
        ])?;
    }
    csv_done(w)
}

pub fn curve_text(rep: &Report<Input, CurveResult>) -> String {
    let r = &rep.result;
    let mut out = String::new();
    study_header(&mut out, &r.id, &r.original, r.reflected);
    let _ = writeln!(out, "success probability (type I error) by relative size");
    let mut header = format!("{:>8} {:>9} {:>7}", "c", "sr", "n");
    for m in &r.methods {
        let _ = write!(header, "  {:>18}", m.method);
    }
    let _ = writeln!(out, "{header}");
    for (i, &c) in r.c_grid.iter().enumerate() {
        let mut line = format!("{:>8.3} {:>9.5} {:>7}", c, r.sr_grid[i], r.n_grid[i]);
        for m in &r.methods {
            if m.note.is_some() {
                let _ = write!(line, "  {:>18}", "-");
            } else {
                let _ = write!(line, "  {:>9.4} ({:.4})", m.pors[i], m.t1e[i]);
            }
        }
        let _ = writeln!(out, "{line}");
    }
    for m in &r.methods {
        if let Some(note) = &m.note {
            let _ = writeln!(out, "note ({}): {note}", m.method);
        }
    }
    out
}

pub fn curve_csv(rep: &Report<Input, CurveResult>) -> Result<String> {
    let r = &rep.result;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["id", "reflected", "method", "c", "sr", "n", "pors", "t1e", "note"])?;
    for m in &r.methods {
        if let Some(note) = &m.note {
            w.write_record([
                r.id.clone(),
                r.reflected.to_string(),
                m.method.clone(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                note.clone(),
            ])?;
            continue;
        }
        for (i, &c) in r.c_grid.iter().enumerate() {
            w.write_record([
                r.id.clone(),
                r.reflected.to_string(),
                m.method.clone(),
                c.to_string(),
                r.sr_grid[i].to_string(),
                r.n_grid[i].to_string(),
                m.pors[i].to_string(),
                m.t1e[i].to_string(),
                String::new(),
            ])?;
        }
    }
    csv_done(w)
}

pub fn t1e_text(rep: &Report<Input, T1eResult>) -> String {
    let r = &rep.result;
    let mut out = String::new();
    study_header(&mut out, &r.id, &r.original, r.reflected);
    let _ = writeln!(out, "type I error by relative size");
    let mut header = format!("{:>8} {:>9} {:>7}", "c", "sr", "n");
    for m in &r.methods {
        let _ = write!(header, "  {:>16}", m.method);
    }
    let _ = writeln!(out, "{header}");
    for (i, &c) in r.c_grid.iter().enumerate() {
        let mut line = format!("{:>8.3} {:>9.5} {:>7}", c, r.sr_grid[i], r.n_grid[i]);
        for m in &r.methods {
            if m.note.is_some() {
                let _ = write!(line, "  {:>16}", "-");
            } else {
                let _ = write!(line, "  {:>16.6}", m.t1e[i]);
            }
        }
        let _ = writeln!(out, "{line}");
    }
    for m in &r.methods {
        if let Some(note) = &m.note {
            let _ = writeln!(out, "note ({}): {note}", m.method);
        }
    }
    out
}

pub fn t1e_csv(rep: &Report<Input, T1eResult>) -> Result<String> {
    let r = &rep.result;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["id", "reflected", "method", "c", "sr", "n", "t1e", "note"])?;
    for m in &r.methods {
        if let Some(note) = &m.note {
            w.write_record([
                r.id.clone(),
                r.reflected.to_string(),
                m.method.clone(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                note.clone(),
            ])?;
            continue;
        }
        for (i, &c) in r.c_grid.iter().enumerate() {
            w.write_record([
                r.id.clone(),
                r.reflected.to_string(),
                m.method.clone(),
                c.to_string(),
                r.sr_grid[i].to_string(),
                r.n_grid[i].to_string(),
                m.t1e[i].to_string(),
                String::new(),
            ])?;
        }
    }
    csv_done(w)
}

fn batch_cell(m: &SsdMethodOut) -> String {
    match m.state.as_str() {
        "solved" => format!(
            "n = {} (c = {})",
            opt_u(m.n_r),
            opt_f(m.rel_size, 2)
        ),
        other => other.to_string(),
    }
}

pub fn batch_text(rep: &Report<BatchInput, BatchResult>) -> String {
    let r = &rep.result;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "corpus: {} ({} studies, {} skipped)",
        rep.input.corpus,
        r.studies.len(),
        r.skipped.len()
    );
    let _ = writeln!(out, "target success probability: {:.3}", rep.input.target);
    let _ = writeln!(out);
    let mut header = format!(
        "{:<14} {:>9} {:>8} {:>6} {:>9}",
        "study", "estimate", "se", "z", "p"
    );
    for name in &rep.input.model.methods {
        let _ = write!(header, "  {name:<22}");
    }
    let _ = writeln!(out, "{}", header.trim_end());
    for s in &r.studies {
        let mut line = format!(
            "{:<14} {:>9.4} {:>8.4} {:>6.2} {:>9.2e}",
            s.id, s.original.estimate, s.original.se, s.original.z, s.p_one_sided
        );
        for m in &s.methods {
            let _ = write!(line, "  {:<22}", batch_cell(m));
        }
        let _ = writeln!(out, "{}", line.trim_end());
        if s.reflected {
            let _ = writeln!(out, "{:<14}   [reflected to the positive scale]", "");
        }
    }
    for skip in &r.skipped {
        let _ = writeln!(out, "skipped line {}: {}", skip.line, skip.message);
    }
    out
}

pub fn batch_csv(rep: &Report<BatchInput, BatchResult>) -> Result<String> {
    let r = &rep.result;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record([
        "id", "reflected", "estimate", "se", "z", "p_one_sided", "method", "state", "limit",
        "sr_star", "rel_size", "n_r", "achieved", "t1e", "violations", "note",
    ])?;
    for s in &r.studies {
        for m in &s.methods {
            w.write_record([
                s.id.clone(),
                s.reflected.to_string(),
                s.original.estimate.to_string(),
                s.original.se.to_string(),
                s.original.z.to_string(),
                s.p_one_sided.to_string(),
                m.method.clone(),
                m.state.clone(),
                cell_f(m.limit),
                cell_f(m.sr_star),
                cell_f(m.rel_size),
                cell_u(m.n_r),
                cell_f(m.achieved),
                cell_f(m.t1e),
                m.violations.join("; "),
                m.note.clone().unwrap_or_default(),
            ])?;
        }
    }
    csv_done(w)
}

pub fn multisite_text(rep: &Report<Input, MultisiteResult>) -> String {
    let r = &rep.result;
    let cost = rep.input.cost.as_ref();
    let mut out = String::new();
    study_header(&mut out, &r.id, &r.original, r.reflected);
    let _ = writeln!(out, "criterion: {}, target {:.3}", r.method, r.target);
    if let Some(c) = cost {
        let _ = writeln!(
            out,
            "costs: {:.2} per site + {:.2} per participant",
            c.cost_site, c.cost_unit
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:>5} {:<17} {:>11} {:>9} {:>11} {:>9}",
        "sites", "state", "per-site n", "total n", "cost", "achieved"
    );
    for p in &r.sites {
        let _ = writeln!(
            out,
            "{:>5} {:<17} {:>11} {:>9} {:>11} {:>9}",
            p.m,
            p.state,
            opt_u(p.site_n),
            opt_u(p.total_n),
            opt_f(p.total_cost, 2),
            opt_f(p.achieved, 4),
        );
    }
    let _ = writeln!(out);
    match &r.optimum {
        Some(o) => {
            let _ = writeln!(
                out,
                "optimal allocation: {} sites of {} (total n {}, cost {:.2})",
                o.m, o.site_n, o.total_n, o.total_cost
            );
        }
        None => {
            let _ = writeln!(out, "optimal allocation: none (target unreachable on this grid)");
        }
    }
    match r.free_site_size {
        Some(n) => {
            let _ = writeln!(out, "free-site optimum: {n} participants per site");
        }
        None => {
            let _ = writeln!(
                out,
                "free-site optimum: none (without heterogeneity ever-larger sites keep helping)"
            );
        }
    }
    out
}

pub fn multisite_csv(rep: &Report<Input, MultisiteResult>) -> Result<String> {
    let r = &rep.result;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record([
        "id", "reflected", "method", "m", "state", "site_n", "total_n", "total_cost", "achieved",
        "optimal",
    ])?;
    for p in &r.sites {
        let optimal = r.optimum.as_ref().is_some_and(|o| o.m == p.m);
        w.write_record([
            r.id.clone(),
            r.reflected.to_string(),
            r.method.clone(),
            p.m.to_string(),
            p.state.clone(),
            cell_u(p.site_n),
            cell_u(p.total_n),
            cell_f(p.total_cost),
            cell_f(p.achieved),
            optimal.to_string(),
        ])?;
    }
    csv_done(w)
}

pub fn validate_text(rep: &Report<Input, ValidateResult>) -> String {
    let r = &rep.result;
    let mut out = String::new();
    study_header(&mut out, &r.id, &r.original, r.reflected);
    let _ = writeln!(
        out,
        "replication: sr = {:.5} per site, sites {}, draws {}, seed {}",
        r.sr, r.sites, r.draws, r.seed
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<18} {:>10} {:>10} {:>9} {:>7}",
        "criterion", "closed", "simulated", "mc se", "z"
    );
    for m in &r.methods {
        let _ = writeln!(
            out,
            "{:<18} {:>10} {:>10} {:>9} {:>7}",
            m.method,
            opt_f(m.closed_form, 6),
            opt_f(m.simulated, 6),
            opt_f(m.mc_se, 6),
            opt_f(m.z, 2),
        );
        if let Some(note) = &m.note {
            let _ = writeln!(out, "{:<18}   note: {note}", "");
        }
    }
    out
}

pub fn validate_csv(rep: &Report<Input, ValidateResult>) -> Result<String> {
    let r = &rep.result;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record([
        "id", "reflected", "method", "sr", "sites", "draws", "seed", "closed_form", "simulated",
        "mc_se", "z", "note",
    ])?;
    for m in &r.methods {
        w.write_record([
            r.id.clone(),
            r.reflected.to_string(),
            m.method.clone(),
            r.sr.to_string(),
            r.sites.to_string(),
            r.draws.to_string(),
            r.seed.to_string(),
            cell_f(m.closed_form),
            cell_f(m.simulated),
            cell_f(m.mc_se),
            cell_f(m.z),
            m.note.clone().unwrap_or_default(),
        ])?;
    }
    csv_done(w)
}
