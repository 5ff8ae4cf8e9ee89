//! End-to-end acceptance gate. Runs without the default test harness so
//! that every criterion prints exactly one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use replan::effect::{
    design_prior, predictive, tau2_relative, tau_absolute, DesignPrior, EffectEstimate,
    InitialPrior, UnitVariance,
};
use replan::multisite::{
    cost_curve, optimal_allocation, pors_multisite, pors_multisite_mc, predictive_pooled,
    CostModel, MultisiteDesign,
};
use replan::ssd::{
    ssd, ssd_generic, ssd_skeptical_p_closed, ssd_two_trials_closed, SsdOutcome, SsdResult,
};
use replan::success::{pors, pors_monte_carlo, region, Method};

macro_rules! check {
    ($cond:expr, $($msg:tt)*) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)*)),
        }
    };
}

type Outcome = Result<String, String>;

fn labels() -> EffectEstimate {
    EffectEstimate::new(0.205, 0.051).unwrap()
}

fn two_group() -> UnitVariance {
    UnitVariance::two_group()
}

fn solved(r: &SsdResult) -> Result<(f64, f64, u64, f64), String> {
    match r.outcome {
        SsdOutcome::Solved { sr_star, relative_size, n_r, achieved } => {
            Ok((sr_star, relative_size, n_r, achieved))
        }
        other => Err(format!("expected a solved outcome, got {other:?}")),
    }
}

// Flagship example reproduced end to end, fast.
fn golden_example() -> Outcome {
    let t0 = Instant::now();
    let dp = design_prior(&labels(), &InitialPrior::Flat, 0.05 * 0.05);
    check!(
        (dp.sd() - 0.071).abs() <= 0.001,
        "design prior sd {} not within 0.071 +/- 0.001",
        dp.sd()
    );
    let method = Method::TwoTrials { alpha: 0.025 };
    let r = ssd(&method, &dp, 0.8, &two_group()).map_err(|e| e.to_string())?;
    let (sr_star, c, n_r, _) = solved(&r)?;
    check!((sr_star - 0.059).abs() <= 0.0005, "sr* {sr_star} not within 0.059 +/- 0.0005");
    check!((c - 0.74).abs() <= 0.01, "relative size {c} not within 0.74 +/- 0.01");
    check!((n_r as i64 - 1137).unsigned_abs() <= 2, "n {n_r} not within 1137 +/- 2");
    let reg = region(&method, &labels(), sr_star).map_err(|e| e.to_string())?;
    let p = pors(&reg, &predictive(&dp, sr_star));
    check!((p - 0.800).abs() <= 1e-3, "recomputed pors {p} not within 0.800 +/- 0.001");
    let dt = t0.elapsed();
    check!(dt.as_secs_f64() < 1.0, "took {dt:?}, budget 1 s");
    Ok(format!(
        "sd {:.4}, sr* {:.5}, c {:.4}, n {}, pors {:.4} in {:.1?}",
        dp.sd(),
        sr_star,
        c,
        n_r,
        p,
        dt
    ))
}

// Empirical Bayes with a zero prior mean shrinks the Labels design prior by
// 12%. The factor applies to the mean and the variance alike (the sd
// therefore moves by 1 - sqrt(1 - 0.12), about 6.3%).
fn empirical_bayes_shrinkage() -> Outcome {
    let tau2 = 0.05 * 0.05;
    let flat = design_prior(&labels(), &InitialPrior::Flat, tau2);
    let eb = InitialPrior::empirical_bayes(&labels(), 0.0, tau2).map_err(|e| e.to_string())?;
    let dp = design_prior(&labels(), &eb, tau2);
    let mean_shrink = 1.0 - dp.mean() / labels().estimate();
    let var_shrink = 1.0 - dp.variance() / flat.variance();
    check!(
        (mean_shrink - 0.12).abs() <= 0.005,
        "mean shrinkage {:.4} not within 12% +/- 0.5pp",
        mean_shrink
    );
    check!(
        (var_shrink - 0.12).abs() <= 0.005,
        "variance shrinkage {:.4} not within 12% +/- 0.5pp",
        var_shrink
    );
    let sd_shrink = 1.0 - dp.sd() / flat.sd();
    Ok(format!(
        "mean shrinks {:.2}%, variance {:.2}%, sd {:.2}%",
        100.0 * mean_shrink,
        100.0 * var_shrink,
        100.0 * sd_shrink
    ))
}

fn heterogeneity_elicitation() -> Outcome {
    let tau = tau_absolute(0.2, 0.95);
    check!((tau - 0.05).abs() <= 0.002, "tau_absolute(0.2, 0.95) = {tau}, wanted 0.05 +/- 0.002");
    for s2 in [0.051f64 * 0.051, 0.002, 0.03] {
        let got = tau2_relative(0.4, s2).map_err(|e| e.to_string())?;
        let want = 2.0 * s2 / 3.0;
        check!(got == want, "tau2_relative(0.4, {s2}) = {got}, wanted exactly {want}");
    }
    Ok(format!("tau_absolute(0.2, 0.95) = {tau:.5}, tau2_relative(0.4, .) = 2/3 variance exactly"))
}

// With the effect pinned at the original estimate, the two-trials answer
// collapses to the classical one-sided formula.
fn classical_reduction() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4001);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let est = rng.gen_range(0.1..0.5);
        let alpha = rng.gen_range(0.01..0.1);
        let target = rng.gen_range(0.55..0.95);
        let lambda = rng.gen_range(1.0..2.5);
        let unit = UnitVariance::new(lambda).map_err(|e| e.to_string())?;
        let se = rng.gen_range(0.02..0.1);
        let original = EffectEstimate::new(est, se).map_err(|e| e.to_string())?;
        let dp = DesignPrior::conditional(&original);
        let r = ssd_two_trials_closed(&dp, alpha, target, &unit).map_err(|e| e.to_string())?;
        let (sr_star, ..) = solved(&r)?;
        let raw_n = (lambda / sr_star).powi(2);
        let za = replan::numeric::normal::norm_quantile(1.0 - alpha);
        let zb = replan::numeric::normal::norm_quantile(target);
        let classical = (za + zb).powi(2) / (est / lambda).powi(2);
        let rel = ((raw_n - classical) / classical).abs();
        worst = worst.max(rel);
        check!(rel < 1e-9, "est {est}, alpha {alpha}, target {target}: relative error {rel:.2e}");
    }
    Ok(format!("20 random cases, worst relative error {worst:.2e}"))
}

fn type_i_error_behavior() -> Outcome {
    use replan::ssd::type_i_error;
    let orig = labels();
    let alpha = 0.025;
    for k in 0..50 {
        let c = 0.25 * 16f64.powf(k as f64 / 49.0);
        let sr = orig.se() / c.sqrt();
        let t = type_i_error(&Method::TwoTrials { alpha }, &orig, sr).map_err(|e| e.to_string())?;
        check!((t - alpha).abs() <= 1e-12, "two-trials t1e at c {c}: {t} != {alpha}");
    }
    let sp = Method::SkepticalP { alpha: 0.062 };
    let t2 = type_i_error(&sp, &orig, orig.se() / 2f64.sqrt()).map_err(|e| e.to_string())?;
    let t4 = type_i_error(&sp, &orig, orig.se() / 4f64.sqrt()).map_err(|e| e.to_string())?;
    check!(t2 > 0.025, "skeptical-p t1e at c=2 is {t2}, expected above 0.025");
    check!(t4 < 0.025, "skeptical-p t1e at c=4 is {t4}, expected below 0.025");
    let ma = Method::MetaAnalysis { alpha: 0.000_625 };
    let tma = type_i_error(&ma, &orig, orig.se()).map_err(|e| e.to_string())?;
    check!(tma > 0.1, "meta-analysis t1e at c=1 is {tma}, expected above 0.1");
    Ok(format!(
        "two-trials t1e = alpha on 50-point grid; skeptical-p {t2:.4} -> {t4:.4} across c=2..4; meta-analysis {tma:.3} at c=1"
    ))
}

// The methods rank by how much replication they demand on Labels.
fn method_ordering() -> Outcome {
    let dp = design_prior(&labels(), &InitialPrior::Flat, 0.05 * 0.05);
    let unit = two_group();
    let ma = ssd(&Method::MetaAnalysis { alpha: 0.000_625 }, &dp, 0.8, &unit)
        .map_err(|e| e.to_string())?;
    check!(
        ma.outcome == SsdOutcome::AlwaysSatisfied,
        "meta-analysis should be satisfied at every size, got {:?}",
        ma.outcome
    );
    let c_of = |method: &Method, dp: &DesignPrior| -> Result<f64, String> {
        let r = ssd(method, dp, 0.8, &unit).map_err(|e| e.to_string())?;
        Ok(solved(&r)?.1)
    };
    let c_ps = c_of(&Method::SkepticalP { alpha: 0.062 }, &dp)?;
    let c_tt = c_of(&Method::TwoTrials { alpha: 0.025 }, &dp)?;
    let c_bf = c_of(&Method::RepBayesFactor { gamma: 0.1, same_sign_only: false }, &dp)?;
    let c_eq = c_of(&Method::Equivalence { alpha: 0.1, margin: 0.2 }, &dp)?;
    check!(
        c_ps <= c_tt && c_tt <= c_bf && c_bf <= c_eq,
        "ordering broken: ps {c_ps:.3}, two-trials {c_tt:.3}, BF {c_bf:.3}, equivalence {c_eq:.3}"
    );

    // Per-study facts, heterogeneity off. A strong original needs at most a
    // third of its own sample under the significance-style criteria.
    let ostracism = EffectEstimate::new(0.32, 0.052).map_err(|e| e.to_string())?;
    let dp_o = design_prior(&ostracism, &InitialPrior::Flat, 0.0);
    for method in [
        Method::TwoTrials { alpha: 0.025 },
        Method::SkepticalP { alpha: 0.062 },
        Method::RepBayesFactor { gamma: 0.1, same_sign_only: false },
    ] {
        let c = c_of(&method, &dp_o)?;
        check!(c <= 1.0 / 3.0, "{} on the strong original: c = {c:.3} > 1/3", method.name());
    }
    // Equivalence demands grow with the original's standard error.
    let referrals = EffectEstimate::new(0.18, 0.049).map_err(|e| e.to_string())?;
    let dp_r = design_prior(&referrals, &InitialPrior::Flat, 0.0);
    let eq = Method::Equivalence { alpha: 0.1, margin: 0.2 };
    let c_eq_r = c_of(&eq, &dp_r)?;
    let c_eq_o = c_of(&eq, &dp_o)?;
    check!((c_eq_r - 1.0578).abs() <= 0.002, "equivalence c {c_eq_r:.4}, wanted about 1.0578");
    check!((c_eq_o - 1.37482).abs() <= 0.002, "equivalence c {c_eq_o:.4}, wanted about 1.37482");
    check!(c_eq_r < c_eq_o, "equivalence ordering by se broken: {c_eq_r} >= {c_eq_o}");
    Ok(format!(
        "always-satisfied MA, then c: ps {c_ps:.3} <= two-trials {c_tt:.3} <= BF {c_bf:.3} <= equivalence {c_eq:.1}; strong original needs <= 1/3"
    ))
}

fn heterogeneity_monotonicity() -> Outcome {
    let unit = two_group();
    let mut parts = Vec::new();
    for method in [
        Method::TwoTrials { alpha: 0.025 },
        Method::SkepticalP { alpha: 0.062 },
        Method::Equivalence { alpha: 0.1, margin: 0.2 },
        Method::RepBayesFactor { gamma: 0.1, same_sign_only: false },
    ] {
        let dp0 = design_prior(&labels(), &InitialPrior::Flat, 0.0);
        let dp5 = design_prior(&labels(), &InitialPrior::Flat, 0.05 * 0.05);
        let r0 = ssd(&method, &dp0, 0.8, &unit).map_err(|e| e.to_string())?;
        let r5 = ssd(&method, &dp5, 0.8, &unit).map_err(|e| e.to_string())?;
        let (sr0, ..) = solved(&r0)?;
        let (sr5, ..) = solved(&r5)?;
        check!(
            sr5 < sr0,
            "{}: heterogeneity should demand more sample, got sr* {sr5} vs {sr0}",
            method.name()
        );
        parts.push(format!("{} {:.4}<{:.4}", method.name(), sr5, sr0));
    }
    // Meta-analysis has no finite requirement at this target either way.
    for tau2 in [0.0, 0.0025] {
        let dp = design_prior(&labels(), &InitialPrior::Flat, tau2);
        let r = ssd(&Method::MetaAnalysis { alpha: 0.000_625 }, &dp, 0.8, &unit)
            .map_err(|e| e.to_string())?;
        check!(r.outcome == SsdOutcome::AlwaysSatisfied, "meta-analysis outcome {:?}", r.outcome);
    }
    Ok(format!("sr* drops under heterogeneity for {}; meta-analysis always satisfied", parts.join(", ")))
}

// Closed-form probabilities against the simulation oracle.
fn monte_carlo_agreement() -> Outcome {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(8001);
    let draws = 1_000_000;
    let mut worst_z: f64 = 0.0;
    for i in 0..100 {
        let se = rng.gen_range(0.02..0.1);
        let method = match i % 5 {
            0 => Method::TwoTrials { alpha: rng.gen_range(0.005..0.08) },
            1 => Method::MetaAnalysis { alpha: rng.gen_range(0.0005..0.01) },
            2 => Method::Equivalence {
                alpha: rng.gen_range(0.05..0.15),
                margin: rng.gen_range(0.15..0.4),
            },
            3 => Method::RepBayesFactor {
                gamma: rng.gen_range(0.05..0.9),
                same_sign_only: rng.gen_bool(0.5),
            },
            _ => Method::SkepticalP { alpha: 0.062 },
        };
        // Keep originals convincing enough for every criterion to apply.
        let est = se * rng.gen_range(1.8..5.0);
        let tau2 = if rng.gen_bool(0.5) { rng.gen_range(0.0..0.0064) } else { 0.0 };
        let original = EffectEstimate::new(est, se).map_err(|e| e.to_string())?;
        let initial = if i % 7 == 0 {
            InitialPrior::empirical_bayes(&original, 0.0, tau2).map_err(|e| e.to_string())?
        } else {
            InitialPrior::Flat
        };
        let dp = design_prior(&original, &initial, tau2);
        let sr = se * rng.gen_range(0.3..3.0);
        let reg = region(&method, &original, sr).map_err(|e| e.to_string())?;
        let exact = pors(&reg, &predictive(&dp, sr));
        let mc = pors_monte_carlo(&reg, &dp, sr, draws, 9000 + i);
        let tol = 3.0 * (exact * (1.0 - exact) / draws as f64).sqrt() + 1e-9;
        let gap = (mc.estimate - exact).abs();
        worst_z = worst_z.max(gap / (tol / 3.0));
        check!(
            gap <= tol,
            "{} point {i}: exact {exact:.5} vs mc {:.5} (gap {gap:.2e} > {tol:.2e})",
            method.name(),
            mc.estimate
        );
    }
    // Multisite: the vector-decision oracle against the pooled closed form.
    let ms_draws = 200_000;
    for i in 0..20u64 {
        let se = rng.gen_range(0.03..0.08);
        let est = se * rng.gen_range(2.0..5.0);
        let tau2 = rng.gen_range(0.0001..0.0064);
        let m = rng.gen_range(2..6);
        let sr = se * rng.gen_range(0.4..2.5);
        let method = if i % 2 == 0 {
            Method::TwoTrials { alpha: 0.025 }
        } else {
            Method::RepBayesFactor {
                gamma: rng.gen_range(0.05..0.5),
                same_sign_only: rng.gen_bool(0.3),
            }
        };
        let original = EffectEstimate::new(est, se).map_err(|e| e.to_string())?;
        let dp = design_prior(&original, &InitialPrior::Flat, tau2);
        let design = MultisiteDesign::balanced(m, sr).map_err(|e| e.to_string())?;
        let exact = pors_multisite(&method, &dp, &design).map_err(|e| e.to_string())?;
        let mc = pors_multisite_mc(&method, &dp, &design, ms_draws, 7700 + i)
            .map_err(|e| e.to_string())?;
        let tol = 3.0 * (exact * (1.0 - exact) / ms_draws as f64).sqrt() + 1e-9;
        let gap = (mc.estimate - exact).abs();
        check!(
            gap <= tol,
            "multisite {} point {i} (m={m}): exact {exact:.5} vs mc {:.5}",
            method.name(),
            mc.estimate
        );
    }
    let dt = t0.elapsed();
    check!(dt.as_secs_f64() < 120.0, "took {dt:?}, budget 2 min");
    Ok(format!(
        "100 single-site + 20 multisite points within 3 SE (worst {worst_z:.2} SE) in {dt:.1?}"
    ))
}

// The Bayes factor at the success-region rim must equal the threshold.
fn bayes_factor_boundary() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9001);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let se = rng.gen_range(0.02..0.12);
        let est = se * rng.gen_range(0.5..5.0);
        let sr = se * rng.gen_range(0.3..3.0);
        let gamma = rng.gen_range(0.05..1.0);
        let original = EffectEstimate::new(est, se).map_err(|e| e.to_string())?;
        let method = Method::RepBayesFactor { gamma, same_sign_only: false };
        let reg = region(&method, &original, sr).map_err(|e| e.to_string())?;
        let density = |x: f64, mean: f64, var: f64| {
            (-(x - mean) * (x - mean) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
        };
        for x in [reg.intervals()[0].upper(), reg.intervals()[1].lower()] {
            let bf = density(x, 0.0, sr * sr) / density(x, est, se * se + sr * sr);
            let gap = (bf - gamma).abs();
            worst = worst.max(gap);
            check!(gap < 1e-8, "case {i}: BF {bf} at boundary {x}, wanted gamma {gamma}");
        }
    }
    Ok(format!("50 random regions, both endpoints; worst |BF - gamma| = {worst:.2e}"))
}

fn multisite_planning() -> Outcome {
    // One site with no heterogeneity is the single-study problem.
    let dp0 = design_prior(&labels(), &InitialPrior::Flat, 0.0);
    for method in [
        Method::TwoTrials { alpha: 0.025 },
        Method::RepBayesFactor { gamma: 0.1, same_sign_only: false },
    ] {
        for sr in [0.03, 0.051, 0.09] {
            let d = MultisiteDesign::balanced(1, sr).map_err(|e| e.to_string())?;
            let multi = pors_multisite(&method, &dp0, &d).map_err(|e| e.to_string())?;
            let reg = region(&method, &labels(), sr).map_err(|e| e.to_string())?;
            let single = pors(&reg, &predictive(&dp0, sr));
            check!(
                (multi - single).abs() <= 1e-12,
                "{} m=1 reduction off: {multi} vs {single}",
                method.name()
            );
        }
    }
    let dp = design_prior(&labels(), &InitialPrior::Flat, 0.05 * 0.05);
    for sr in [0.04, 0.08] {
        let d = MultisiteDesign::balanced(1, sr).map_err(|e| e.to_string())?;
        let pooled = predictive_pooled(&dp, &d);
        let plain = predictive(&dp, sr);
        check!(
            (pooled.variance() - plain.variance()).abs() <= 1e-15,
            "m=1 predictive mismatch at sr {sr}"
        );
    }

    // Splitting Labels across sites under heterogeneity.
    let unit = two_group();
    let method = Method::TwoTrials { alpha: 0.025 };
    let cost = CostModel::new(30.0, 1.0).map_err(|e| e.to_string())?;
    let curve = cost_curve(&method, &dp, 0.8, &unit, &cost, 1..=8).map_err(|e| e.to_string())?;
    let total = |m: usize| -> Result<u64, String> {
        curve[m - 1]
            .total_n
            .ok_or_else(|| format!("m={m} unexpectedly infeasible"))
    };
    let n1 = total(1)?;
    let n2 = total(2)?;
    check!(
        (n1 as f64 - 3000.0).abs() <= 0.15 * 3000.0,
        "single-site total {n1}, wanted about 3000 +/- 15%"
    );
    let ratio = n2 as f64 / n1 as f64;
    check!(
        (ratio - 0.5).abs() <= 0.15 * 0.5,
        "two-site total {n2} is {ratio:.3} of single-site, wanted about half"
    );

    // Optimal number of sites across the two cost regimes.
    let mut optima = Vec::new();
    for (per_site, want_tt, want_bf) in [(30.0, 5usize, 8usize), (300.0, 2, 3)] {
        let cost = CostModel::new(per_site, 1.0).map_err(|e| e.to_string())?;
        let tt = cost_curve(&method, &dp, 0.8, &unit, &cost, 1..=12).map_err(|e| e.to_string())?;
        let m_tt = optimal_allocation(&tt).ok_or("no feasible two-trials allocation")?.m;
        check!(
            m_tt == want_tt,
            "two-trials optimal m at site cost {per_site}: {m_tt}, wanted {want_tt}"
        );
        let bf_method = Method::RepBayesFactor { gamma: 0.1, same_sign_only: false };
        let bf = cost_curve(&bf_method, &dp, 0.8, &unit, &cost, 1..=12).map_err(|e| e.to_string())?;
        let m_bf = optimal_allocation(&bf).ok_or("no feasible BF allocation")?.m;
        check!(
            (m_bf as i64 - want_bf as i64).abs() <= 1,
            "BF optimal m at site cost {per_site}: {m_bf}, wanted {want_bf} +/- 1"
        );
        optima.push(format!("cost {per_site}: two-trials m={m_tt}, BF m={m_bf}"));
    }
    Ok(format!(
        "m=1 reductions exact; totals {n1} -> {n2} across 1 -> 2 sites; optima {}",
        optima.join("; ")
    ))
}

fn solver_duality() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11_001);
    let unit = two_group();
    let mut solved_cases = 0usize;
    let mut attempts = 0usize;
    let mut worst: f64 = 0.0;
    while solved_cases < 100 && attempts < 600 {
        attempts += 1;
        let skeptical = solved_cases % 2 == 1;
        let se = rng.gen_range(0.03..0.1);
        let est = se * rng.gen_range(2.2..5.0);
        let tau2 = rng.gen_range(0.0..0.0036);
        let target = rng.gen_range(0.55..0.9);
        let original = EffectEstimate::new(est, se).map_err(|e| e.to_string())?;
        let dp = design_prior(&original, &InitialPrior::Flat, tau2);
        let (closed, generic) = if skeptical {
            let alpha = rng.gen_range(0.03..0.1);
            (
                ssd_skeptical_p_closed(&dp, alpha, target, &unit),
                ssd_generic(&Method::SkepticalP { alpha }, &dp, target, &unit, None),
            )
        } else {
            let alpha = rng.gen_range(0.01..0.05);
            (
                ssd_two_trials_closed(&dp, alpha, target, &unit),
                ssd_generic(&Method::TwoTrials { alpha }, &dp, target, &unit, None),
            )
        };
        let (closed, generic) = (closed.map_err(|e| e.to_string())?, generic.map_err(|e| e.to_string())?);
        match (closed.sr_star(), generic.sr_star()) {
            (Some(a), Some(b)) => {
                let gap = (a - b).abs();
                worst = worst.max(gap);
                check!(gap < 1e-6, "closed {a} vs generic {b} (gap {gap:.2e})");
                solved_cases += 1;
            }
            (a, b) => check!(
                a.is_none() == b.is_none(),
                "outcome kinds disagree: closed {a:?} vs generic {b:?}"
            ),
        }
    }
    check!(solved_cases == 100, "only {solved_cases} solvable cases in {attempts} attempts");
    Ok(format!("100 feasible cases, worst |closed - generic| = {worst:.2e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("golden example", golden_example),
        ("empirical Bayes shrinkage", empirical_bayes_shrinkage),
        ("heterogeneity elicitation", heterogeneity_elicitation),
        ("classical reduction", classical_reduction),
        ("type I error behavior", type_i_error_behavior),
        ("method ordering", method_ordering),
        ("heterogeneity monotonicity", heterogeneity_monotonicity),
        ("Monte Carlo agreement", monte_carlo_agreement),
        ("Bayes factor boundary", bayes_factor_boundary),
        ("multisite planning", multisite_planning),
        ("solver duality", solver_duality),
    ];
    let mut failures = 0;
    for (i, (label, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(note) => println!("criterion {:2} PASS  {label}: {note}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:2} FAIL  {label}: {why}", i + 1);
            }
        }
    }
    if failures == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
