use proptest::prelude::*;

use replan::effect::{
    design_prior, predictive, EffectEstimate, InitialPrior, Rounding, UnitVariance,
};
use replan::multisite::{predictive_pooled, MultisiteDesign};
use replan::numeric::interval::Interval;
use replan::ssd::{ssd, ssd_generic, ssd_two_trials_closed, SsdOutcome};
use replan::success::{pors, region, Method, SuccessRegion};

fn any_method() -> impl Strategy<Value = Method> {
    prop_oneof![
        (0.005f64..0.1).prop_map(|alpha| Method::TwoTrials { alpha }),
        (0.0001f64..0.01).prop_map(|alpha| Method::MetaAnalysis { alpha }),
        ((0.02f64..0.15), (0.05f64..0.5))
            .prop_map(|(alpha, margin)| Method::Equivalence { alpha, margin }),
        ((0.02f64..1.0), any::<bool>())
            .prop_map(|(gamma, same_sign_only)| Method::RepBayesFactor { gamma, same_sign_only }),
        (0.01f64..0.1).prop_map(|alpha| Method::SkepticalP { alpha }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pors_is_a_probability(
        method in any_method(),
        est in 0.02f64..0.5,
        se in 0.02f64..0.15,
        tau in 0.0f64..0.08,
        sr_ratio in 0.2f64..5.0,
    ) {
        let original = EffectEstimate::new(est, se).unwrap();
        let dp = design_prior(&original, &InitialPrior::Flat, tau * tau);
        let sr = se * sr_ratio;
        // Skeptical p needs a convincing original; skip the rest.
        if let Ok(reg) = region(&method, &original, sr) {
            let p = pors(&reg, &predictive(&dp, sr));
            prop_assert!((0.0..=1.0).contains(&p), "pors {p} out of range");
        }
    }

    #[test]
    fn two_trials_pors_never_increases_with_sr(
        est in 0.02f64..0.5,
        se in 0.02f64..0.15,
        tau in 0.0f64..0.08,
        lo_ratio in 0.2f64..3.0,
        step in 1.01f64..3.0,
    ) {
        let original = EffectEstimate::new(est, se).unwrap();
        let dp = design_prior(&original, &InitialPrior::Flat, tau * tau);
        let method = Method::TwoTrials { alpha: 0.025 };
        let sr_small = se * lo_ratio;
        let sr_big = sr_small * step;
        let p_small = pors(&region(&method, &original, sr_small).unwrap(), &predictive(&dp, sr_small));
        let p_big = pors(&region(&method, &original, sr_big).unwrap(), &predictive(&dp, sr_big));
        prop_assert!(p_big <= p_small + 1e-12, "bigger sr gave {p_big} > {p_small}");
    }

    #[test]
    fn two_trials_region_scales_linearly_in_sr(
        est in 0.02f64..0.5,
        se in 0.02f64..0.15,
        sr in 0.005f64..0.5,
        factor in 0.1f64..10.0,
        alpha in 0.005f64..0.1,
    ) {
        let original = EffectEstimate::new(est, se).unwrap();
        let method = Method::TwoTrials { alpha };
        let base = region(&method, &original, sr).unwrap();
        let scaled = region(&method, &original, sr * factor).unwrap();
        let b0 = base.intervals()[0].lower();
        let b1 = scaled.intervals()[0].lower();
        prop_assert!((b1 - b0 * factor).abs() < 1e-12 * b1.abs().max(1.0));
    }

    #[test]
    fn sample_size_and_standard_error_are_dual(
        n in 1u64..200_000,
        lambda in 0.5f64..3.0,
    ) {
        let unit = UnitVariance::new(lambda).unwrap();
        let se = unit.se_from_n(n);
        prop_assert_eq!(unit.n_from_se(se, Rounding::Nearest), n);
        // Rounding up may step past n when the quotient lands a hair above
        // an integer, but never by more than one and never below.
        let n_up = unit.n_from_se(se, Rounding::Up);
        prop_assert!(n_up == n || n_up == n + 1);
        prop_assert!(unit.se_from_n(n_up) <= se * (1.0 + 1e-12));
    }

    #[test]
    fn region_construction_ignores_order_and_merges(
        a in -2.0f64..2.0,
        len_a in 0.0f64..1.0,
        b in -2.0f64..2.0,
        len_b in 0.0f64..1.0,
    ) {
        let i1 = Interval::new(a, a + len_a);
        let i2 = Interval::new(b, b + len_b);
        let r1 = SuccessRegion::new(vec![i1, i2]);
        let r2 = SuccessRegion::new(vec![i2, i1]);
        prop_assert_eq!(r1.intervals(), r2.intervals());
        // Merging is idempotent: rebuilding from the result changes nothing.
        let r3 = SuccessRegion::new(r1.intervals().to_vec());
        prop_assert_eq!(r1.intervals(), r3.intervals());
        // Probe membership against the raw pair.
        for x in [a - 0.5, a, a + len_a, (a + b) / 2.0, b, b + len_b, b + 1.5] {
            prop_assert_eq!(r1.contains(x), i1.contains(x) || i2.contains(x));
        }
    }

    #[test]
    fn design_prior_mean_sits_between_prior_mean_and_estimate(
        est in -0.5f64..0.5,
        se in 0.02f64..0.15,
        prior_mean in -0.3f64..0.3,
        prior_sd in 0.01f64..0.5,
        tau in 0.0f64..0.08,
    ) {
        let original = EffectEstimate::new(est, se).unwrap();
        let initial = InitialPrior::normal(prior_mean, prior_sd * prior_sd).unwrap();
        let dp = design_prior(&original, &initial, tau * tau);
        let (lo, hi) = if est < prior_mean { (est, prior_mean) } else { (prior_mean, est) };
        prop_assert!(dp.mean() >= lo - 1e-12 && dp.mean() <= hi + 1e-12);
        // Shrinkage also caps the variance by the marginal one.
        prop_assert!(dp.variance() <= se * se + tau * tau + 1e-15);
    }

    #[test]
    fn predictive_is_wider_than_design_prior(
        est in 0.02f64..0.5,
        se in 0.02f64..0.15,
        tau in 0.0f64..0.08,
        sr in 0.005f64..0.3,
    ) {
        let original = EffectEstimate::new(est, se).unwrap();
        let dp = design_prior(&original, &InitialPrior::Flat, tau * tau);
        let pred = predictive(&dp, sr);
        prop_assert!(pred.variance() >= dp.variance() + sr * sr);
        prop_assert_eq!(pred.mean(), dp.mean());
    }

    #[test]
    fn pooling_more_sites_tightens_the_mean(
        est in 0.02f64..0.5,
        se in 0.02f64..0.15,
        tau in 0.0f64..0.08,
        sr in 0.01f64..0.3,
        m in 1usize..12,
    ) {
        let original = EffectEstimate::new(est, se).unwrap();
        let dp = design_prior(&original, &InitialPrior::Flat, tau * tau);
        let small = predictive_pooled(&dp, &MultisiteDesign::balanced(m, sr).unwrap());
        let big = predictive_pooled(&dp, &MultisiteDesign::balanced(m + 1, sr).unwrap());
        prop_assert!(big.variance() < small.variance());
        // But never below the shared between-study floor.
        prop_assert!(big.variance() > dp.variance());
    }
}

proptest! {
    // The cases below each run a full grid-plus-root search, so fewer of
    // them keep the suite quick.
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_and_generic_two_trials_agree(
        est in 0.1f64..0.5,
        se in 0.03f64..0.12,
        tau in 0.0f64..0.06,
        target in 0.55f64..0.92,
    ) {
        let original = EffectEstimate::new(est, se).unwrap();
        let dp = design_prior(&original, &InitialPrior::Flat, tau * tau);
        let unit = UnitVariance::two_group();
        let closed = ssd_two_trials_closed(&dp, 0.025, target, &unit).unwrap();
        let generic =
            ssd_generic(&Method::TwoTrials { alpha: 0.025 }, &dp, target, &unit, None).unwrap();
        match (closed.sr_star(), generic.sr_star()) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-6, "closed {a} vs generic {b}"),
            (a, b) => prop_assert_eq!(a.is_none(), b.is_none(), "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn solved_searches_hit_their_target(
        est in 0.1f64..0.5,
        se in 0.03f64..0.12,
        tau in 0.0f64..0.06,
        target in 0.55f64..0.92,
    ) {
        let original = EffectEstimate::new(est, se).unwrap();
        let dp = design_prior(&original, &InitialPrior::Flat, tau * tau);
        let result = ssd(&Method::TwoTrials { alpha: 0.025 }, &dp, target, &UnitVariance::two_group()).unwrap();
        if let SsdOutcome::Solved { sr_star, achieved, n_r, .. } = result.outcome {
            prop_assert!((achieved - target).abs() < 1e-7);
            prop_assert!(n_r >= 1);
            // Spending more sample than solved keeps the target met.
            let sr_more = sr_star * 0.9;
            let reg = region(&Method::TwoTrials { alpha: 0.025 }, &original, sr_more).unwrap();
            prop_assert!(pors(&reg, &predictive(&dp, sr_more)) >= target - 1e-9);
        }
    }
}
