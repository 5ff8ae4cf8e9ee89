//! Problem description as it travels between the command line, JSON reports,
//! and the solver types. Everything here serializes, so a JSON report's
//! `input` block can be fed back in to reproduce the run.

use std::collections::HashSet;
use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use replan::effect::{
    design_prior, tau2_relative, tau_absolute, DesignPrior, EffectEstimate, GroupSummaries,
    InitialPrior, UnitVariance,
};
use replan::success::Method;

use crate::args::{MethodKind, ModelArgs, SizeArgs, StudyArgs};

pub const METHOD_NAMES: [&str; 5] = [
    "two-trials",
    "meta-analysis",
    "equivalence",
    "rep-bayes-factor",
    "skeptical-p",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Study {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Groups>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Groups {
    pub mean1: f64,
    pub mean2: f64,
    pub sd1: f64,
    pub sd2: f64,
    pub n1: u64,
    pub n2: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TauSpec {
    Fixed { tau: f64 },
    Absolute { d: f64, coverage: f64 },
    Relative { i2: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PriorSpec {
    Flat,
    Normal { mean: f64, sd: f64 },
    Eb { mean: f64 },
    Pilot { estimate: f64, se: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelCfg {
    pub methods: Vec<String>,
    pub alpha: f64,
    pub gamma: f64,
    pub same_sign: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub tau: TauSpec,
    pub prior: PriorSpec,
    pub unit_sd: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SizeSpec {
    Se { sr: f64 },
    Relative { c: f64 },
    SampleSize { n: u64 },
}

/// Everything a single-study run needs, converted to solver types and
/// oriented so the original estimate is positive.
pub struct Resolved {
    pub effect: EffectEstimate,
    pub reflected: bool,
    pub tau: f64,
    pub dp: DesignPrior,
    pub unit: UnitVariance,
    pub methods: Vec<Method>,
}

pub fn study_from_args(args: &StudyArgs) -> Result<Study> {
    let groups = args.groups.as_deref().map(parse_groups).transpose()?;
    if groups.is_none() && (args.estimate.is_none() || args.se.is_none()) {
        bail!("describe the study with --estimate and --se, or with --groups");
    }
    Ok(Study {
        id: args.id.clone(),
        estimate: args.estimate,
        se: args.se,
        n: args.n,
        groups,
    })
}

pub fn parse_groups(s: &str) -> Result<Groups> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    ensure!(
        parts.len() == 6,
        "--groups takes six values M1,M2,SD1,SD2,N1,N2, got {s:?}"
    );
    let num = |i: usize, what: &str| -> Result<f64> {
        parts[i]
            .parse()
            .with_context(|| format!("bad {what} in --groups: {:?}", parts[i]))
    };
    let count = |i: usize, what: &str| -> Result<u64> {
        parts[i]
            .parse()
            .with_context(|| format!("bad {what} in --groups: {:?}", parts[i]))
    };
    Ok(Groups {
        mean1: num(0, "mean")?,
        mean2: num(1, "mean")?,
        sd1: num(2, "SD")?,
        sd2: num(3, "SD")?,
        n1: count(4, "group size")?,
        n2: count(5, "group size")?,
    })
}

pub fn parse_prior(s: &str) -> Result<PriorSpec> {
    let (head, rest) = match s.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (s, None),
    };
    let two = |r: &str, what: &str| -> Result<(f64, f64)> {
        let (a, b) = r
            .split_once(',')
            .ok_or_else(|| anyhow!("{what} prior takes two values, got {r:?}"))?;
        Ok((
            a.trim().parse().with_context(|| format!("bad {what} prior value {a:?}"))?,
            b.trim().parse().with_context(|| format!("bad {what} prior value {b:?}"))?,
        ))
    };
    match head {
        "flat" => {
            ensure!(rest.is_none(), "the flat prior takes no parameters");
            Ok(PriorSpec::Flat)
        }
        "normal" => {
            let (mean, sd) = two(rest.ok_or_else(|| anyhow!("normal prior needs MU,SD"))?, "normal")?;
            ensure!(sd.is_finite() && sd >= 0.0, "normal prior SD must be >= 0, got {sd}");
            Ok(PriorSpec::Normal { mean, sd })
        }
        "eb" => {
            let mean = match rest {
                Some(r) => r.trim().parse().with_context(|| format!("bad eb prior mean {r:?}"))?,
                None => 0.0,
            };
            Ok(PriorSpec::Eb { mean })
        }
        "pilot" => {
            let (estimate, se) = two(rest.ok_or_else(|| anyhow!("pilot prior needs EST,SE"))?, "pilot")?;
            Ok(PriorSpec::Pilot { estimate, se })
        }
        other => bail!("unknown prior {other:?} (use flat, normal:MU,SD, eb[:MU], or pilot:EST,SE)"),
    }
}

pub fn method_names(kinds: &[MethodKind]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for kind in kinds {
        let add: &[&str] = match kind {
            MethodKind::All => &METHOD_NAMES,
            MethodKind::TwoTrials => &["two-trials"],
            MethodKind::MetaAnalysis => &["meta-analysis"],
            MethodKind::Equivalence => &["equivalence"],
            MethodKind::RepBayesFactor => &["rep-bayes-factor"],
            MethodKind::SkepticalP => &["skeptical-p"],
        };
        for name in add {
            if !out.iter().any(|x| x == name) {
                out.push((*name).to_string());
            }
        }
    }
    out
}

pub fn model_from_args(args: &ModelArgs) -> Result<ModelCfg> {
    let tau = match (args.tau, args.tau_d, args.tau_i2) {
        (None, None, None) => TauSpec::Fixed { tau: 0.0 },
        (Some(tau), None, None) => TauSpec::Fixed { tau },
        (None, Some(d), None) => TauSpec::Absolute { d, coverage: 0.95 },
        (None, None, Some(i2)) => TauSpec::Relative { i2 },
        _ => bail!("--tau, --tau-d, and --tau-i2 are mutually exclusive"),
    };
    Ok(ModelCfg {
        methods: method_names(&args.method),
        alpha: args.alpha,
        gamma: args.gamma,
        same_sign: args.same_sign,
        margin: args.margin,
        tau,
        prior: parse_prior(&args.prior)?,
        unit_sd: args.unit_sd,
    })
}

pub fn size_from_args(args: &SizeArgs) -> Result<SizeSpec> {
    match (args.sr, args.rel_size, args.rep_n) {
        (Some(sr), None, None) => Ok(SizeSpec::Se { sr }),
        (None, Some(c), None) => Ok(SizeSpec::Relative { c }),
        (None, None, Some(n)) => Ok(SizeSpec::SampleSize { n }),
        (None, None, None) => bail!("give the replication size as --sr, --rel-size, or --rep-n"),
        _ => bail!("--sr, --rel-size, and --rep-n are mutually exclusive"),
    }
}

/// Builds and validates the criterion list described by a model config.
/// Independent of any study, so a batch can fail fast on bad settings
/// before its first row.
pub fn methods_from_cfg(cfg: &ModelCfg) -> Result<Vec<Method>> {
    let methods = cfg
        .methods
        .iter()
        .map(|name| method_from_name(name, cfg))
        .collect::<Result<Vec<_>>>()?;
    ensure!(!methods.is_empty(), "no success criterion selected");
    Ok(methods)
}

fn method_from_name(name: &str, cfg: &ModelCfg) -> Result<Method> {
    let method = match name {
        "two-trials" => Method::TwoTrials { alpha: cfg.alpha },
        "meta-analysis" => Method::MetaAnalysis { alpha: cfg.alpha },
        "equivalence" => Method::Equivalence {
            alpha: cfg.alpha,
            margin: cfg
                .margin
                .ok_or_else(|| anyhow!("the equivalence criterion needs --margin"))?,
        },
        "rep-bayes-factor" => Method::RepBayesFactor {
            gamma: cfg.gamma,
            same_sign_only: cfg.same_sign,
        },
        "skeptical-p" => Method::SkepticalP { alpha: cfg.alpha },
        other => bail!(
            "unknown method {other:?} (expected one of: {})",
            METHOD_NAMES.join(", ")
        ),
    };
    method.validate()?;
    Ok(method)
}

pub fn resolve(study: &Study, cfg: &ModelCfg) -> Result<Resolved> {
    let effect = match (&study.groups, study.estimate, study.se) {
        (Some(g), None, None) => EffectEstimate::from_groups(GroupSummaries {
            mean1: g.mean1,
            mean2: g.mean2,
            sd1: g.sd1,
            sd2: g.sd2,
            n1: g.n1,
            n2: g.n2,
        })?,
        (None, Some(estimate), Some(se)) => EffectEstimate::new(estimate, se)?,
        _ => bail!(
            "study {:?} needs either estimate and se or group summaries, not both",
            study.id
        ),
    };
    let effect = match study.n {
        Some(n) => effect.with_n(n),
        None => effect,
    };

    let reflected = effect.estimate() < 0.0;
    let effect = if reflected { effect.reflected() } else { effect };
    let orient = |x: f64| if reflected { -x } else { x };

    let tau2 = match cfg.tau {
        TauSpec::Fixed { tau } => {
            ensure!(
                tau.is_finite() && tau >= 0.0,
                "--tau must be finite and non-negative, got {tau}"
            );
            tau * tau
        }
        TauSpec::Absolute { d, coverage } => {
            ensure!(
                d.is_finite() && d >= 0.0,
                "--tau-d must be finite and non-negative, got {d}"
            );
            ensure!(
                coverage > 0.0 && coverage < 1.0,
                "tau coverage must lie in (0, 1), got {coverage}"
            );
            let tau = tau_absolute(d, coverage);
            tau * tau
        }
        TauSpec::Relative { i2 } => tau2_relative(i2, effect.variance())?,
    };

    let prior = match cfg.prior {
        PriorSpec::Flat => InitialPrior::Flat,
        PriorSpec::Normal { mean, sd } => {
            ensure!(
                sd.is_finite() && sd >= 0.0,
                "prior SD must be finite and non-negative, got {sd}"
            );
            InitialPrior::normal(orient(mean), sd * sd)?
        }
        PriorSpec::Eb { mean } => InitialPrior::empirical_bayes(&effect, orient(mean), tau2)?,
        PriorSpec::Pilot { estimate, se } => {
            InitialPrior::from_pilot(&EffectEstimate::new(orient(estimate), se)?)
        }
    };

    let methods = methods_from_cfg(cfg)?;

    Ok(Resolved {
        dp: design_prior(&effect, &prior, tau2),
        effect,
        reflected,
        tau: tau2.sqrt(),
        unit: UnitVariance::new(cfg.unit_sd)?,
        methods,
    })
}

/// Turns a size description into the replication standard error it implies.
pub fn resolve_sr(size: &SizeSpec, effect: &EffectEstimate, unit: &UnitVariance) -> Result<f64> {
    match *size {
        SizeSpec::Se { sr } => {
            ensure!(sr.is_finite() && sr > 0.0, "--sr must be positive, got {sr}");
            Ok(sr)
        }
        SizeSpec::Relative { c } => {
            ensure!(
                c.is_finite() && c > 0.0,
                "--rel-size must be positive, got {c}"
            );
            Ok(effect.se() / c.sqrt())
        }
        SizeSpec::SampleSize { n } => {
            ensure!(n >= 1, "--rep-n must be at least 1");
            Ok(unit.se_from_n(n))
        }
    }
}

enum CorpusShape {
    EstimateSe { has_n: bool },
    Groups,
}

/// Reads a CSV corpus. The outer error covers an unreadable file or a header
/// that matches neither accepted layout; each row then parses independently
/// so one bad study does not take down the batch.
pub fn read_corpus(path: &Path) -> Result<Vec<(u64, Result<Study>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let header: Vec<String> = reader
        .headers()
        .context("cannot read the CSV header")?
        .iter()
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    let header_ref: Vec<&str> = header.iter().map(String::as_str).collect();
    let shape = match header_ref.as_slice() {
        ["id", "estimate", "se"] => CorpusShape::EstimateSe { has_n: false },
        ["id", "estimate", "se", "n"] => CorpusShape::EstimateSe { has_n: true },
        ["id", "mean1", "mean2", "sd1", "sd2", "n1", "n2"] => CorpusShape::Groups,
        _ => bail!(
            "unrecognized corpus header {:?}; expected id,estimate,se[,n] or id,mean1,mean2,sd1,sd2,n1,n2",
            header.join(",")
        ),
    };

    let mut seen: HashSet<String> = HashSet::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let (line, parsed) = match record {
            Ok(rec) => {
                let line = rec.position().map_or(0, |p| p.line());
                (line, parse_corpus_row(&rec, &shape, &mut seen))
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                (line, Err(anyhow!("malformed CSV record: {e}")))
            }
        };
        rows.push((line, parsed));
    }
    Ok(rows)
}

fn parse_corpus_row(
    rec: &csv::StringRecord,
    shape: &CorpusShape,
    seen: &mut HashSet<String>,
) -> Result<Study> {
    let field = |i: usize, what: &str| -> Result<&str> {
        rec.get(i)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| anyhow!("missing {what}"))
    };
    let num = |i: usize, what: &str| -> Result<f64> {
        let raw = field(i, what)?;
        let value: f64 = raw
            .parse()
            .map_err(|_| anyhow!("bad {what} {raw:?}"))?;
        Ok(value)
    };
    let count = |i: usize, what: &str| -> Result<u64> {
        let raw = field(i, what)?;
        raw.parse().map_err(|_| anyhow!("bad {what} {raw:?}"))
    };

    let id = field(0, "study id")?.to_string();
    ensure!(seen.insert(id.clone()), "duplicate study id {id:?}");

    let study = match shape {
        CorpusShape::EstimateSe { has_n } => {
            let n = if *has_n {
                match rec.get(3) {
                    Some("") | None => None,
                    Some(_) => Some(count(3, "sample size")?),
                }
            } else {
                None
            };
            Study {
                id,
                estimate: Some(num(1, "estimate")?),
                se: Some(num(2, "standard error")?),
                n,
                groups: None,
            }
        }
        CorpusShape::Groups => Study {
            id,
            estimate: None,
            se: None,
            n: None,
            groups: Some(Groups {
                mean1: num(1, "mean1")?,
                mean2: num(2, "mean2")?,
                sd1: num(3, "sd1")?,
                sd2: num(4, "sd2")?,
                n1: count(5, "n1")?,
                n2: count(6, "n2")?,
            }),
        },
    };
    Ok(study)
}
