//! Property tests for the structural laws the library is built on: Birkhoff
//! sums form a cocycle, dynamical-ball cylinders nest, cylinder masses obey
//! the Kolmogorov consistency and stationarity equations, and the local
//! pressure splits exactly into local entropy plus a Birkhoff average.

use localpress::{
    local_entropy_at, local_pressure_at, topological_pressure, LocallyConstantPotential,
    MarkovMeasure, PointPrefix, SubshiftOfFiniteType, Word,
};
use proptest::prelude::*;

/// The handful of transition structures the properties quantify over: full
/// shifts, the golden-mean shift, and a three-letter shift with a nontrivial
/// constraint pattern. All are primitive.
fn arb_system() -> impl Strategy<Value = SubshiftOfFiniteType> {
    prop_oneof![
        Just(SubshiftOfFiniteType::full_shift(2).unwrap()),
        Just(SubshiftOfFiniteType::full_shift(3).unwrap()),
        Just(SubshiftOfFiniteType::new(vec![vec![1, 1], vec![1, 0]]).unwrap()),
        Just(SubshiftOfFiniteType::new(vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap()),
    ]
}

/// A fully supported stochastic matrix on the system's transition graph.
/// Entries are bounded away from zero so cylinder masses of moderate words
/// stay in normal floating-point range.
fn arb_markov(sft: SubshiftOfFiniteType) -> impl Strategy<Value = MarkovMeasure> {
    let m = sft.alphabet_size();
    let rows = proptest::collection::vec(proptest::collection::vec(0.05f64..1.0, m), m);
    rows.prop_map(move |raw| {
        let mut stochastic = vec![vec![0.0; m]; m];
        for (a, row) in stochastic.iter_mut().enumerate() {
            let mut total = 0.0;
            for (b, &weight) in raw[a].iter().enumerate() {
                if sft.allows(a, b) {
                    total += weight;
                }
            }
            for (b, cell) in row.iter_mut().enumerate() {
                if sft.allows(a, b) {
                    *cell = raw[a][b] / total;
                }
            }
        }
        MarkovMeasure::new(&sft, stochastic).expect("full-support rows on a primitive graph")
    })
}

fn arb_potential(sft: SubshiftOfFiniteType) -> impl Strategy<Value = LocallyConstantPotential> {
    let m = sft.alphabet_size();
    (1usize..=2).prop_flat_map(move |range| {
        let sft = sft.clone();
        proptest::collection::vec(-2.0f64..2.0, m.pow(range as u32))
            .prop_map(move |table| LocallyConstantPotential::new(&sft, range, table).unwrap())
    })
}

/// A sampled prefix is the cheapest way to get a long admissible word with
/// positive mass under the measure that produced it.
fn sample_point(mu: &MarkovMeasure, capacity: usize, seed: u64) -> PointPrefix {
    mu.sample(1, capacity, seed)
        .expect("sampling a single prefix")
        .points()[0]
        .clone()
}

proptest! {
    /// S_{a+b}φ(x) = S_aφ(x) + S_bφ(σ^a x): summing along the orbit is a
    /// cocycle over the shift.
    #[test]
    fn birkhoff_sums_form_a_cocycle(
        (_sft, mu, phi) in arb_system().prop_flat_map(|s| {
            (Just(s.clone()), arb_markov(s.clone()), arb_potential(s))
        }),
        a in 1usize..20,
        b in 1usize..20,
        seed in any::<u64>(),
    ) {
        let capacity = a + b + phi.range();
        let x = sample_point(&mu, capacity, seed);
        let whole = x.birkhoff_sum(&phi, a + b).unwrap();
        let head = x.birkhoff_sum(&phi, a).unwrap();
        let tail = x.shift(a).unwrap().birkhoff_sum(&phi, b).unwrap();
        let scale = phi.max_abs() * (a + b) as f64;
        prop_assert!(
            (whole - (head + tail)).abs() <= 1e-12 * scale.max(1.0),
            "cocycle defect {} for S_{}+S_{} vs S_{}",
            whole - (head + tail),
            a,
            b,
            a + b,
        );
    }

    /// Deepening either scale parameter refines the ball: the cylinder word
    /// at (n+1, k) and at (n, k+1) both extend the one at (n, k), so masses
    /// are monotone non-increasing in each parameter.
    #[test]
    fn ball_cylinders_nest_and_masses_decrease(
        (sft, mu) in arb_system().prop_flat_map(|s| (Just(s.clone()), arb_markov(s))),
        n in 1usize..12,
        k in 0usize..6,
        seed in any::<u64>(),
    ) {
        let x = sample_point(&mu, n + k + 2, seed);
        let base = x.dynamical_ball_cylinder(n, k).unwrap();
        let deeper = x.dynamical_ball_cylinder(n + 1, k).unwrap();
        let finer = x.dynamical_ball_cylinder(n, k + 1).unwrap();
        prop_assert_eq!(&deeper.symbols()[..base.len()], base.symbols());
        prop_assert_eq!(&finer.symbols()[..base.len()], base.symbols());
        let mass = mu.cylinder_measure(&base).unwrap();
        prop_assert!(mu.cylinder_measure(&deeper).unwrap() <= mass);
        prop_assert!(mu.cylinder_measure(&finer).unwrap() <= mass);
        let _ = sft;
    }

    /// Shifting twice composes additively and drops exactly the claimed
    /// leading coordinates.
    #[test]
    fn shifts_compose_additively(
        (sft, mu) in arb_system().prop_flat_map(|s| (Just(s.clone()), arb_markov(s))),
        a in 0usize..8,
        b in 0usize..8,
        extra in 1usize..10,
        seed in any::<u64>(),
    ) {
        let x = sample_point(&mu, a + b + extra, seed);
        let twice = x.shift(a).unwrap().shift(b).unwrap();
        let once = x.shift(a + b).unwrap();
        prop_assert_eq!(twice.symbols(), once.symbols());
        prop_assert_eq!(once.symbols(), &x.symbols()[a + b..]);
        let _ = sft;
    }

    /// The finite-scale estimator splits exactly: local pressure equals
    /// local entropy plus the depth-averaged Birkhoff sum, to near machine
    /// precision, for any measure/potential/point/scale combination.
    #[test]
    fn local_pressure_decomposes_into_entropy_plus_average(
        (sft, mu, phi) in arb_system().prop_flat_map(|s| {
            (Just(s.clone()), arb_markov(s.clone()), arb_potential(s))
        }),
        n in 1usize..40,
        k in 0usize..6,
        seed in any::<u64>(),
    ) {
        let capacity = n + k + phi.range() - 1;
        let x = sample_point(&mu, capacity, seed);
        let pressure = local_pressure_at(&mu, &sft, &phi, &x, n, k).unwrap();
        let entropy = local_entropy_at(&mu, &sft, &x, n, k).unwrap();
        let average = x.birkhoff_sum(&phi, n).unwrap() / n as f64;
        prop_assert!(
            (pressure - (entropy + average)).abs() <= 1e-12,
            "split defect {} at n={n} k={k}",
            pressure - (entropy + average),
        );
    }

    /// P(φ + c) = P(φ) + c: adding a constant moves pressure by exactly that
    /// constant, up to solver tolerance.
    #[test]
    fn constants_shift_pressure_additively(
        (sft, phi) in arb_system().prop_flat_map(|s| (Just(s.clone()), arb_potential(s))),
        c in -3.0f64..3.0,
    ) {
        let base = topological_pressure(&sft, &phi).unwrap().value;
        let shifted_table: Vec<f64> = phi.table().iter().map(|v| v + c).collect();
        let shifted = LocallyConstantPotential::new(&sft, phi.range(), shifted_table).unwrap();
        let moved = topological_pressure(&sft, &shifted).unwrap().value;
        prop_assert!(
            (moved - (base + c)).abs() <= 1e-9,
            "P(φ+c)−P(φ)−c = {}",
            moved - (base + c),
        );
    }

    /// Kolmogorov consistency and stationarity: summing a cylinder mass over
    /// one-symbol extensions on the right recovers it, and so does summing
    /// over one-symbol histories on the left. Single letters carry total
    /// mass one.
    #[test]
    fn cylinder_masses_are_consistent_and_stationary(
        (sft, mu) in arb_system().prop_flat_map(|s| (Just(s.clone()), arb_markov(s))),
        len in 1usize..10,
        seed in any::<u64>(),
    ) {
        let m = sft.alphabet_size();
        let w = Word::new(sample_point(&mu, len, seed).symbols().to_vec());
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
        prop_assert!((right - mass).abs() <= 1e-12, "right extension defect {}", right - mass);
        prop_assert!((left - mass).abs() <= 1e-12, "left extension defect {}", left - mass);

        let total: f64 = (0..m)
            .map(|s| mu.cylinder_measure(&Word::new(vec![s])).unwrap())
            .sum();
        prop_assert!((total - 1.0).abs() <= 1e-12, "total mass {}", total);
    }

    /// Log-space and plain cylinder masses describe the same measure, and
    /// sampled prefixes always carry positive mass.
    #[test]
    fn log_masses_agree_with_plain_masses_on_sampled_words(
        (sft, mu) in arb_system().prop_flat_map(|s| (Just(s.clone()), arb_markov(s))),
        len in 1usize..40,
        seed in any::<u64>(),
    ) {
        let x = sample_point(&mu, len, seed);
        let w = Word::new(x.symbols().to_vec());
        let log_mass = mu
            .log_cylinder_measure(&w)
            .unwrap()
            .expect("sampled prefixes have positive mass");
        let mass = mu.cylinder_measure(&w).unwrap();
        prop_assert!(mass > 0.0);
        prop_assert!(
            (log_mass.exp() - mass).abs() <= 1e-12 * mass,
            "exp(log mass) = {} vs mass = {}",
            log_mass.exp(),
            mass,
        );
        let _ = sft;
    }
}
