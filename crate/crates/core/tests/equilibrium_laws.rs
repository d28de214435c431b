//! The variational structure end to end: arbitrary stationary chains sit at
//! or below the topological pressure, equilibrium chains attain it exactly,
//! their cylinder masses satisfy the measure axioms, and certification
//! accepts exactly the measures it should.

use localpress::{
    certify_equilibrium, equilibrium_measure, gibbs_diagnose, topological_pressure, DiagnoseParams,
    Error, GibbsVerdict, LocallyConstantPotential, MarkovMeasure, SubshiftOfFiniteType, Word,
    ORACLE_ENUMERATION_BUDGET,
};

fn golden_mean() -> SubshiftOfFiniteType {
    SubshiftOfFiniteType::new(vec![vec![1, 1], vec![1, 0]]).unwrap()
}

/// The four (system, potential) pairs that ship as ready-made experiments.
fn shipped_pairs() -> Vec<(String, SubshiftOfFiniteType, LocallyConstantPotential)> {
    let full2 = SubshiftOfFiniteType::full_shift(2).unwrap();
    let full3 = SubshiftOfFiniteType::full_shift(3).unwrap();
    let golden = golden_mean();
    vec![
        (
            "full-2 with a one-coordinate field".into(),
            full2.clone(),
            LocallyConstantPotential::from_fn(&full2, 1, |w| w[0] as f64).unwrap(),
        ),
        (
            "golden-mean with the zero potential".into(),
            golden.clone(),
            LocallyConstantPotential::constant(&golden, 0.0).unwrap(),
        ),
        (
            "golden-mean with a two-coordinate field".into(),
            golden.clone(),
            LocallyConstantPotential::from_fn(
                &golden,
                2,
                |w| {
                    if w[0] == w[1] {
                        0.5
                    } else {
                        -0.25
                    }
                },
            )
            .unwrap(),
        ),
        (
            "full-3 with a skewed field".into(),
            full3.clone(),
            LocallyConstantPotential::from_fn(&full3, 1, |w| match w[0] {
                0 => 0.0,
                1 => 0.4,
                _ => -0.6,
            })
            .unwrap(),
        ),
    ]
}

/// Entropy plus integral never exceeds the topological pressure, and generic
/// chains sit strictly below it.
#[test]
fn stationary_chains_never_beat_the_pressure() {
    let full2 = SubshiftOfFiniteType::full_shift(2).unwrap();
    let field = LocallyConstantPotential::from_fn(&full2, 1, |w| w[0] as f64).unwrap();
    let p = topological_pressure(&full2, &field).unwrap().value;

    let contenders = vec![
        MarkovMeasure::bernoulli(&full2, vec![0.5, 0.5]).unwrap(),
        MarkovMeasure::bernoulli(&full2, vec![0.7, 0.3]).unwrap(),
        MarkovMeasure::bernoulli(&full2, vec![0.1, 0.9]).unwrap(),
        MarkovMeasure::new(&full2, vec![vec![0.2, 0.8], vec![0.6, 0.4]]).unwrap(),
        MarkovMeasure::new(&full2, vec![vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap(),
    ];
    for mu in &contenders {
        let value = mu.entropy() + mu.integral(&field).unwrap();
        assert!(
            value <= p + 1e-9,
            "{}: entropy + integral = {value} exceeds pressure {p}",
            mu.id(),
        );
        assert!(
            p - value > 1e-3,
            "{}: expected a visible shortfall below the pressure, got {}",
            mu.id(),
            p - value,
        );
    }
}

/// The equilibrium chain of each shipped pair attains the pressure to within
/// 1e-10, measured externally rather than by the constructor's own check.
#[test]
fn equilibrium_chains_attain_the_pressure_exactly() {
    for (name, sft, phi) in shipped_pairs() {
        let (mu, report) = equilibrium_measure(&sft, &phi).unwrap();
        let value = mu.entropy() + mu.integral(&phi).unwrap();
        assert!(
            (value - report.value).abs() <= 1e-10,
            "{name}: entropy + integral = {value} vs pressure {}",
            report.value,
        );
    }
}

/// Kolmogorov consistency, one-step stationarity, and unit total mass hold
/// exhaustively over every admissible word up to length six, for equilibrium
/// chains and a hand-written chain with a forbidden transition.
#[test]
fn cylinder_axioms_hold_exhaustively_to_length_six() {
    let constrained = SubshiftOfFiniteType::new(vec![vec![0, 1], vec![1, 1]]).unwrap();
    let mut measures: Vec<(String, SubshiftOfFiniteType, MarkovMeasure)> = shipped_pairs()
        .into_iter()
        .map(|(name, sft, phi)| {
            let (mu, _) = equilibrium_measure(&sft, &phi).unwrap();
            (name, sft, mu)
        })
        .collect();
    measures.push((
        "two-state chain with a forced transition".into(),
        constrained.clone(),
        MarkovMeasure::new(&constrained, vec![vec![0.0, 1.0], vec![0.5, 0.5]]).unwrap(),
    ));

    for (name, sft, mu) in &measures {
        let m = sft.alphabet_size();
        let singles: f64 = (0..m)
            .map(|s| mu.cylinder_measure(&Word::new(vec![s])).unwrap())
            .sum();
        assert!(
            (singles - 1.0).abs() <= 1e-12,
            "{name}: single letters carry total mass {singles}",
        );

        for len in 1..=6usize {
            for w in sft
                .admissible_words(len, ORACLE_ENUMERATION_BUDGET)
                .unwrap()
            {
                let mass = mu.cylinder_measure(&w).unwrap();
                let mut right = 0.0;
                let mut left = 0.0;
                for s in 0..m {
                    let mut extended = w.symbols().to_vec();
                    extended.push(s);
                    right += mu.cylinder_measure(&Word::new(extended)).unwrap();
                    let mut preceded = vec![s];
                    preceded.extend_from_slice(w.symbols());
                    left += mu.cylinder_measure(&Word::new(preceded)).unwrap();
                }
                assert!(
                    (right - mass).abs() <= 1e-12,
                    "{name}: right-extension defect {} on {:?}",
                    right - mass,
                    w.symbols(),
                );
                assert!(
                    (left - mass).abs() <= 1e-12,
                    "{name}: left-extension defect {} on {:?}",
                    left - mass,
                    w.symbols(),
                );
            }
        }
    }
}

/// Certification accepts every shipped equilibrium chain with a tiny gap and
/// a correctly ordered sandwich trace at every recorded depth.
#[test]
fn certification_accepts_the_shipped_equilibria() {
    for (name, sft, phi) in shipped_pairs() {
        let (mu, report) = equilibrium_measure(&sft, &phi).unwrap();
        let n_grid: Vec<usize> = (1..=6).map(|i| 20 * i).collect();
        let capacity = 120 + 2 + phi.range() - 1;
        let batch = mu.sample(24, capacity, 0xA11CE).unwrap();
        let params = DiagnoseParams::new(n_grid, 2).unwrap();
        let diagnostics = gibbs_diagnose(&mu, &sft, &phi, report.value, &batch, &params).unwrap();
        assert_eq!(
            diagnostics.verdict,
            GibbsVerdict::Gibbs,
            "{name}: expected bounded deviations, got max log-deviation {}",
            diagnostics.max_log_delta,
        );
        let verdict = certify_equilibrium(&mu, &sft, &phi, &batch, &params, 1e-8).unwrap();

        assert!(verdict.is_equilibrium, "{name}: certification failed");
        assert!(
            verdict.gap.abs() <= 1e-10,
            "{name}: gap {} is larger than the attainment tolerance",
            verdict.gap,
        );
        assert!(
            (verdict.p_top - report.value).abs() <= 1e-12,
            "{name}: certified pressure drifted from the constructor's",
        );
        for entry in &verdict.sandwich_trace {
            assert!(
                entry.lower <= entry.local_pressure && entry.local_pressure <= entry.upper,
                "{name}: sandwich violated at point {} depth {}: {} ≤ {} ≤ {}",
                entry.point_id,
                entry.n,
                entry.lower,
                entry.local_pressure,
                entry.upper,
            );
        }
    }
}

/// A chain that is not the equilibrium of the potential it is tested against
/// is rejected outright: its log-ratios drift linearly at a rate matching
/// the entropy shortfall.
#[test]
fn impostor_chains_are_rejected_with_the_entropy_gap_slope() {
    let full2 = SubshiftOfFiniteType::full_shift(2).unwrap();
    let zero = LocallyConstantPotential::constant(&full2, 0.0).unwrap();
    let mu = MarkovMeasure::bernoulli(&full2, vec![0.25, 0.75]).unwrap();

    let n_grid: Vec<usize> = (1..=10).map(|i| 40 * i).collect();
    let batch = mu.sample(40, 402, 0xBEEF).unwrap();
    let params = DiagnoseParams::new(n_grid, 1).unwrap();
    let err = certify_equilibrium(&mu, &full2, &zero, &batch, &params, 1e-8).unwrap_err();

    // Expected drift: pressure minus the chain's entropy.
    let drift = (2.0f64).ln() - mu.entropy();
    match err {
        Error::GibbsRejected {
            max_log_delta,
            worst_slope,
        } => {
            assert!(
                (worst_slope - drift).abs() <= 0.1,
                "worst slope {worst_slope} is far from the entropy gap {drift}",
            );
            assert!(
                max_log_delta > 10.0,
                "log-deviations should be far past any constant bound, got {max_log_delta}",
            );
        }
        other => panic!("expected a Gibbs rejection, got {other:?}"),
    }
}
