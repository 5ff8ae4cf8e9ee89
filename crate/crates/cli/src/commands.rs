use anyhow::{anyhow, ensure, Result};

use replan::effect::{predictive, EffectEstimate, Rounding, UnitVariance};
use replan::multisite::{
    cost_curve, optimal_allocation, optimal_site_size, pors_multisite, pors_multisite_mc,
    CostModel, MultisiteDesign,
};
use replan::numeric::norm_cdf;
use replan::ssd::{
    check_constraints, combined_requirement, ssd, type_i_error, CombinedRequirement, Constraints,
    SsdOutcome, SsdResult, Violation,
};
use replan::success::{pors, pors_monte_carlo, region, McEstimate};

use crate::args::{
    BatchCmd, Cli, Command, CurveCmd, MultisiteCmd, PorsCmd, PriorCmd, SsdCmd, T1eCmd,
    ValidateMcCmd,
};
use crate::input::{
    methods_from_cfg, model_from_args, resolve, resolve_sr, size_from_args, study_from_args,
    Resolved,
};
use crate::report::{
    self, effect_out, BatchInput, BatchResult, BatchStudyOut, CombinedOut, CostCfg, CurveMethod,
    CurveResult, Input, McCfg, MethodPors, MultisiteResult, PorsResult, PriorResult, Report,
    SitePoint, SiteOptimum, SkippedRow, SsdMethodOut, SsdReport, T1eMethod, T1eResult,
    ValidateMethod, ValidateResult, SCHEMA_VERSION,
};

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Prior(cmd) => prior(cmd),
        Command::Pors(cmd) => pors_cmd(cmd),
        Command::Ssd(cmd) => ssd_cmd(cmd),
        Command::Curve(cmd) => curve(cmd),
        Command::Batch(cmd) => batch(cmd),
        Command::Multisite(cmd) => multisite(cmd),
        Command::T1e(cmd) => t1e_cmd(cmd),
        Command::ValidateMc(cmd) => validate_mc(cmd),
    }
}

fn wrap<R>(command: &str, input: Input, result: R) -> Report<Input, R> {
    Report {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        input,
        result,
    }
}

fn resolved(input: &Input) -> Result<Resolved> {
    let r = resolve(&input.study, &input.model)?;
    if r.reflected {
        eprintln!(
            "note: the original estimate is negative; planning proceeds on the reflected (positive) scale"
        );
    }
    Ok(r)
}

/// Distinguishes findings about the study (worth reporting, exit 0) from
/// errors in the request (propagated, exit 2).
fn finding(e: replan::Error) -> Result<String> {
    if matches!(e, replan::Error::InfeasibleOriginal(_)) {
        Ok(e.to_string())
    } else {
        Err(e.into())
    }
}

fn state_of(outcome: &SsdOutcome) -> &'static str {
    match outcome {
        SsdOutcome::Solved { .. } => "solved",
        SsdOutcome::AlwaysSatisfied => "always-satisfied",
        SsdOutcome::Infeasible => "infeasible",
    }
}

fn violation_text(v: &Violation) -> String {
    match v {
        Violation::MaxSampleSize { n_r, max_n } => {
            format!("sample size {n_r} exceeds the bound {max_n}")
        }
        Violation::MaxTypeIError { t1e, max_t1e } => {
            format!("type I error {t1e:.4} exceeds the bound {max_t1e}")
        }
    }
}

fn noted_method(name: &str, note: String) -> SsdMethodOut {
    SsdMethodOut {
        method: name.to_string(),
        state: "infeasible".to_string(),
        limit: None,
        sr_star: None,
        rel_size: None,
        n_r: None,
        achieved: None,
        t1e: None,
        violations: Vec::new(),
        note: Some(note),
    }
}

fn ssd_method_out(res: &SsdResult, original: &EffectEstimate) -> Result<SsdMethodOut> {
    let method = res.method.name().to_string();
    let state = state_of(&res.outcome).to_string();
    let violations = res.violations.iter().map(violation_text).collect();
    Ok(match res.outcome {
        SsdOutcome::Solved {
            sr_star,
            relative_size,
            n_r,
            achieved,
        } => SsdMethodOut {
            method,
            state,
            limit: Some(res.limit),
            sr_star: Some(sr_star),
            rel_size: Some(relative_size),
            n_r: Some(n_r),
            achieved: Some(achieved),
            t1e: Some(type_i_error(&res.method, original, sr_star)?),
            violations,
            note: None,
        },
        _ => SsdMethodOut {
            method,
            state,
            limit: Some(res.limit),
            sr_star: None,
            rel_size: None,
            n_r: None,
            achieved: None,
            t1e: None,
            violations,
            note: None,
        },
    })
}

/// Runs the sample-size search for every selected criterion. The second
/// value holds the raw results only when every criterion produced one, which
/// is what combining them requires.
fn ssd_all_methods(
    r: &Resolved,
    target: f64,
    constraints: &Constraints,
) -> Result<(Vec<SsdMethodOut>, Option<Vec<SsdResult>>)> {
    let mut outs = Vec::new();
    let mut results = Some(Vec::new());
    for m in &r.methods {
        match ssd(m, &r.dp, target, &r.unit) {
            Ok(res) => {
                let res = check_constraints(res, constraints, &r.effect)?;
                outs.push(ssd_method_out(&res, &r.effect)?);
                if let Some(v) = results.as_mut() {
                    v.push(res);
                }
            }
            Err(e) => {
                outs.push(noted_method(m.name(), finding(e)?));
                results = None;
            }
        }
    }
    Ok((outs, results))
}

fn validate_target(target: f64) -> Result<()> {
    ensure!(
        target.is_finite() && target > 0.0 && target < 1.0,
        "--target must lie strictly between 0 and 1, got {target}"
    );
    Ok(())
}

fn prior(cmd: PriorCmd) -> Result<u8> {
    let input = match &cmd.from_json {
        Some(path) => report::load_input(path, "prior")?,
        None => Input::new(study_from_args(&cmd.study)?, model_from_args(&cmd.model)?),
    };
    let r = resolved(&input)?;
    let dp = &r.dp;
    let result = PriorResult {
        id: input.study.id.clone(),
        reflected: r.reflected,
        original: effect_out(&r.effect),
        tau: r.tau,
        g: (!dp.g().is_infinite()).then(|| dp.g().as_f64()),
        mean: dp.mean(),
        sd: dp.sd(),
        shrinkage: 1.0 - dp.shrinkage(),
        limiting_sd: dp.limiting_variance().sqrt(),
    };
    let rep = wrap("prior", input, result);
    report::deliver(&cmd.output, cmd.from_json.is_some(), &rep, report::prior_text, report::prior_csv)?;
    Ok(0)
}

fn pors_cmd(cmd: PorsCmd) -> Result<u8> {
    let input = match &cmd.from_json {
        Some(path) => report::load_input(path, "pors")?,
        None => {
            let mut input =
                Input::new(study_from_args(&cmd.study)?, model_from_args(&cmd.model)?);
            input.size = Some(size_from_args(&cmd.size)?);
            input
        }
    };
    let size = input
        .size
        .ok_or_else(|| anyhow!("the report input has no size block"))?;
    let r = resolved(&input)?;
    let sr = resolve_sr(&size, &r.effect, &r.unit)?;
    let pred = predictive(&r.dp, sr);
    let methods = r
        .methods
        .iter()
        .map(|m| {
            Ok(match region(m, &r.effect, sr) {
                Ok(reg) => MethodPors {
                    method: m.name().to_string(),
                    pors: Some(pors(&reg, &pred)),
                    note: None,
                },
                Err(e) => MethodPors {
                    method: m.name().to_string(),
                    pors: None,
                    note: Some(finding(e)?),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let se_o = r.effect.se();
    let result = PorsResult {
        id: input.study.id.clone(),
        reflected: r.reflected,
        original: effect_out(&r.effect),
        sr,
        rel_size: (se_o / sr) * (se_o / sr),
        rep_n: r.unit.n_from_se(sr, Rounding::Nearest),
        methods,
    };
    let rep = wrap("pors", input, result);
    report::deliver(&cmd.output, cmd.from_json.is_some(), &rep, report::pors_text, report::pors_csv)?;
    Ok(0)
}

fn ssd_cmd(cmd: SsdCmd) -> Result<u8> {
    let input = match &cmd.from_json {
        Some(path) => report::load_input(path, "ssd")?,
        None => {
            let mut input =
                Input::new(study_from_args(&cmd.study)?, model_from_args(&cmd.model)?);
            input.target = Some(cmd.target);
            input.max_n = cmd.max_n;
            input.max_t1e = cmd.max_t1e;
            input
        }
    };
    let target = input
        .target
        .ok_or_else(|| anyhow!("the report input has no target"))?;
    validate_target(target)?;
    let constraints = Constraints {
        max_n: input.max_n,
        max_t1e: input.max_t1e,
    };
    let r = resolved(&input)?;
    let (methods, results) = ssd_all_methods(&r, target, &constraints)?;
    let combined = match results {
        Some(rs) if rs.len() > 1 => combined_requirement(&rs).map(|c| combined_out(c, &rs, &r.unit)),
        _ => None,
    };
    let result = SsdReport {
        id: input.study.id.clone(),
        reflected: r.reflected,
        original: effect_out(&r.effect),
        target,
        methods,
        combined,
    };
    let rep = wrap("ssd", input, result);
    report::deliver(&cmd.output, cmd.from_json.is_some(), &rep, report::ssd_text, report::ssd_csv)?;
    Ok(0)
}

fn combined_out(c: CombinedRequirement, results: &[SsdResult], unit: &UnitVariance) -> CombinedOut {
    match c {
        CombinedRequirement::Infeasible => CombinedOut {
            state: "infeasible".to_string(),
            binding: None,
            sr_star: None,
            n_r: None,
        },
        CombinedRequirement::AlwaysSatisfied => CombinedOut {
            state: "always-satisfied".to_string(),
            binding: None,
            sr_star: None,
            n_r: None,
        },
        CombinedRequirement::Solved { binding, sr_star } => CombinedOut {
            state: "solved".to_string(),
            binding: Some(results[binding].method.name().to_string()),
            sr_star: Some(sr_star),
            n_r: Some(unit.n_from_se(sr_star, Rounding::Nearest)),
        },
    }
}

fn grid_from(input: &Input) -> Result<Vec<f64>> {
    let grid = input
        .c_grid
        .clone()
        .ok_or_else(|| anyhow!("the report input has no relative-size grid"))?;
    ensure!(!grid.is_empty(), "--c-grid must not be empty");
    for &c in &grid {
        ensure!(
            c.is_finite() && c > 0.0,
            "relative sizes must be positive, got {c}"
        );
    }
    Ok(grid)
}

fn curve(cmd: CurveCmd) -> Result<u8> {
    let input = match &cmd.from_json {
        Some(path) => report::load_input(path, "curve")?,
        None => {
            let mut input =
                Input::new(study_from_args(&cmd.study)?, model_from_args(&cmd.model)?);
            input.c_grid = Some(cmd.c_grid.clone());
            input
        }
    };
    let grid = grid_from(&input)?;
    let r = resolved(&input)?;
    let se_o = r.effect.se();
    let sr_grid: Vec<f64> = grid.iter().map(|&c| se_o / c.sqrt()).collect();
    let n_grid: Vec<u64> = sr_grid
        .iter()
        .map(|&sr| r.unit.n_from_se(sr, Rounding::Nearest))
        .collect();
    let mut methods = Vec::new();
    for m in &r.methods {
        let mut pors_col = Vec::with_capacity(grid.len());
        let mut t1e_col = Vec::with_capacity(grid.len());
        let mut note = None;
        for &sr in &sr_grid {
            match region(m, &r.effect, sr) {
                Ok(reg) => {
                    pors_col.push(pors(&reg, &predictive(&r.dp, sr)));
                    t1e_col.push(type_i_error(m, &r.effect, sr)?);
                }
                Err(e) => {
                    note = Some(finding(e)?);
                    pors_col.clear();
                    t1e_col.clear();
                    break;
                }
            }
        }
        methods.push(CurveMethod {
            method: m.name().to_string(),
            pors: pors_col,
            t1e: t1e_col,
            note,
        });
    }
    let result = CurveResult {
        id: input.study.id.clone(),
        reflected: r.reflected,
        original: effect_out(&r.effect),
        c_grid: grid,
        sr_grid,
        n_grid,
        methods,
    };
    let rep = wrap("curve", input, result);
    report::deliver(&cmd.output, cmd.from_json.is_some(), &rep, report::curve_text, report::curve_csv)?;
    Ok(0)
}

fn t1e_cmd(cmd: T1eCmd) -> Result<u8> {
    let input = match &cmd.from_json {
        Some(path) => report::load_input(path, "t1e")?,
        None => {
            let mut input =
                Input::new(study_from_args(&cmd.study)?, model_from_args(&cmd.model)?);
            input.c_grid = Some(cmd.c_grid.clone());
            input
        }
    };
    let grid = grid_from(&input)?;
    let r = resolved(&input)?;
    let se_o = r.effect.se();
    let sr_grid: Vec<f64> = grid.iter().map(|&c| se_o / c.sqrt()).collect();
    let n_grid: Vec<u64> = sr_grid
        .iter()
        .map(|&sr| r.unit.n_from_se(sr, Rounding::Nearest))
        .collect();
    let mut methods = Vec::new();
    for m in &r.methods {
        let mut t1e_col = Vec::with_capacity(grid.len());
        let mut note = None;
        for &sr in &sr_grid {
            match type_i_error(m, &r.effect, sr) {
                Ok(t) => t1e_col.push(t),
                Err(e) => {
                    note = Some(finding(e)?);
                    t1e_col.clear();
                    break;
                }
            }
        }
        methods.push(T1eMethod {
            method: m.name().to_string(),
            t1e: t1e_col,
            note,
        });
    }
    let result = T1eResult {
        id: input.study.id.clone(),
        reflected: r.reflected,
        original: effect_out(&r.effect),
        c_grid: grid,
        sr_grid,
        n_grid,
        methods,
    };
    let rep = wrap("t1e", input, result);
    report::deliver(&cmd.output, cmd.from_json.is_some(), &rep, report::t1e_text, report::t1e_csv)?;
    Ok(0)
}

fn batch(cmd: BatchCmd) -> Result<u8> {
    let model = model_from_args(&cmd.model)?;
    methods_from_cfg(&model)?;
    validate_target(cmd.target)?;
    let rows = crate::input::read_corpus(&cmd.input)?;
    let no_constraints = Constraints::default();

    let mut studies = Vec::new();
    let mut skipped = Vec::new();
    for (line, row) in rows {
        let outcome = row.and_then(|study| {
            let r = resolve(&study, &model)?;
            let (methods, _) = ssd_all_methods(&r, cmd.target, &no_constraints)?;
            Ok(BatchStudyOut {
                id: study.id,
                reflected: r.reflected,
                original: effect_out(&r.effect),
                p_one_sided: norm_cdf(-r.effect.z()),
                methods,
            })
        });
        match outcome {
            Ok(study) => studies.push(study),
            Err(e) => {
                eprintln!(
                    "warning: {} line {line}: {e:#} (row skipped)",
                    cmd.input.display()
                );
                skipped.push(SkippedRow {
                    line,
                    message: format!("{e:#}"),
                });
            }
        }
    }
    if studies.is_empty() && skipped.is_empty() {
        eprintln!("warning: {} contains no study rows", cmd.input.display());
    }
    if cmd.sort_by_p {
        studies.sort_by(|a, b| a.p_one_sided.total_cmp(&b.p_one_sided));
    }

    let partial = !skipped.is_empty();
    let rep = Report {
        schema_version: SCHEMA_VERSION,
        command: "batch".to_string(),
        input: BatchInput {
            corpus: cmd.input.display().to_string(),
            model,
            target: cmd.target,
            sort_by_p: cmd.sort_by_p,
        },
        result: BatchResult { studies, skipped },
    };
    report::deliver(&cmd.output, false, &rep, report::batch_text, report::batch_csv)?;
    Ok(if partial { 1 } else { 0 })
}

fn multisite(cmd: MultisiteCmd) -> Result<u8> {
    let input = match &cmd.from_json {
        Some(path) => report::load_input(path, "multisite")?,
        None => {
            let mut input =
                Input::new(study_from_args(&cmd.study)?, model_from_args(&cmd.model)?);
            input.target = Some(cmd.target);
            input.cost = Some(CostCfg {
                cost_site: cmd.cost_site.expect("clap enforces --cost-site"),
                cost_unit: cmd.cost_unit,
                m_min: cmd.m_min,
                m_max: cmd.m_max,
            });
            input
        }
    };
    let target = input
        .target
        .ok_or_else(|| anyhow!("the report input has no target"))?;
    validate_target(target)?;
    let cc = input
        .cost
        .ok_or_else(|| anyhow!("the report input has no cost block"))?;
    ensure!(
        cc.m_min >= 1 && cc.m_min <= cc.m_max,
        "the site range {}..={} is empty or starts below 1",
        cc.m_min,
        cc.m_max
    );
    let r = resolved(&input)?;
    ensure!(
        r.methods.len() == 1,
        "multisite planning takes exactly one criterion, got {}",
        r.methods.len()
    );
    let method = &r.methods[0];
    let cost = CostModel::new(cc.cost_site, cc.cost_unit)?;
    let curve = cost_curve(method, &r.dp, target, &r.unit, &cost, cc.m_min..=cc.m_max)?;

    let sites: Vec<SitePoint> = curve
        .iter()
        .map(|p| SitePoint {
            m: p.m,
            state: state_of(&p.outcome).to_string(),
            site_n: p.total_n.map(|t| t / p.m as u64),
            total_n: p.total_n,
            total_cost: p.total_cost,
            achieved: match p.outcome {
                SsdOutcome::Solved { achieved, .. } => Some(achieved),
                _ => None,
            },
        })
        .collect();
    let optimum = optimal_allocation(&curve).map(|p| {
        let total_n = p.total_n.expect("priced designs carry totals");
        SiteOptimum {
            m: p.m,
            site_n: total_n / p.m as u64,
            total_n,
            total_cost: p.total_cost.expect("priced designs carry totals"),
        }
    });
    let free_site_size = match optimal_site_size(r.tau, &r.unit, &cost) {
        Ok(n) => Some(n),
        Err(replan::Error::Unsupported(_)) => None,
        Err(e) => return Err(e.into()),
    };

    let result = MultisiteResult {
        id: input.study.id.clone(),
        reflected: r.reflected,
        original: effect_out(&r.effect),
        method: method.name().to_string(),
        target,
        sites,
        optimum,
        free_site_size,
    };
    let rep = wrap("multisite", input, result);
    report::deliver(&cmd.output, cmd.from_json.is_some(), &rep, report::multisite_text, report::multisite_csv)?;
    Ok(0)
}

fn validate_method_out(name: &str, closed: f64, est: McEstimate) -> ValidateMethod {
    let z = (est.estimate - closed) / est.std_err.max(1e-12);
    ValidateMethod {
        method: name.to_string(),
        closed_form: Some(closed),
        simulated: Some(est.estimate),
        mc_se: Some(est.std_err),
        z: Some(z),
        note: None,
    }
}

fn validate_mc(cmd: ValidateMcCmd) -> Result<u8> {
    let input = match &cmd.from_json {
        Some(path) => report::load_input(path, "validate-mc")?,
        None => {
            let mut input =
                Input::new(study_from_args(&cmd.study)?, model_from_args(&cmd.model)?);
            input.size = Some(size_from_args(&cmd.size)?);
            input.mc = Some(McCfg {
                sites: cmd.sites,
                draws: cmd.draws,
                seed: cmd.seed,
            });
            input
        }
    };
    let size = input
        .size
        .ok_or_else(|| anyhow!("the report input has no size block"))?;
    let mc = input
        .mc
        .ok_or_else(|| anyhow!("the report input has no simulation block"))?;
    ensure!(mc.sites >= 1, "--sites must be at least 1");
    ensure!(mc.draws >= 1000, "--draws must be at least 1000");
    let r = resolved(&input)?;
    let sr = resolve_sr(&size, &r.effect, &r.unit)?;

    let mut methods = Vec::new();
    if mc.sites == 1 {
        for m in &r.methods {
            match region(m, &r.effect, sr) {
                Ok(reg) => {
                    let closed = pors(&reg, &predictive(&r.dp, sr));
                    let est = pors_monte_carlo(&reg, &r.dp, sr, mc.draws, mc.seed);
                    methods.push(validate_method_out(m.name(), closed, est));
                }
                Err(e) => methods.push(ValidateMethod {
                    method: m.name().to_string(),
                    closed_form: None,
                    simulated: None,
                    mc_se: None,
                    z: None,
                    note: Some(finding(e)?),
                }),
            }
        }
    } else {
        let design = MultisiteDesign::balanced(mc.sites, sr)?;
        for m in &r.methods {
            let closed = pors_multisite(m, &r.dp, &design)?;
            let est = pors_multisite_mc(m, &r.dp, &design, mc.draws, mc.seed)?;
            methods.push(validate_method_out(m.name(), closed, est));
        }
    }

    let result = ValidateResult {
        id: input.study.id.clone(),
        reflected: r.reflected,
        original: effect_out(&r.effect),
        sr,
        sites: mc.sites,
        draws: mc.draws,
        seed: mc.seed,
        methods,
    };
    let rep = wrap("validate-mc", input, result);
    report::deliver(&cmd.output, cmd.from_json.is_some(), &rep, report::validate_text, report::validate_csv)?;
    Ok(0)
}
