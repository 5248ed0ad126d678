use std::cell::Cell;

use proptest::prelude::*;
use stochopt::aco::{choose_next_city, global_update, local_update, AcoConfig, AntState, Colony, PheromoneMatrix};
use stochopt::annealing::{anneal_from, rescaled_delta_with, RescaleForm, SaConfig};
use stochopt::effort::{computational_effort, cumulative_success, runtime_projection, ComplexityClass, EnsembleStats};
use stochopt::hopfield::{async_step, network_energy, HopfieldNet};
use stochopt::local_search::{hill_climb_first_accept, hill_climb_steepest, random_search};
use stochopt::problems::{
    two_opt, BinPackingInstance, ContinuousLandscape, LandscapeKind, TabletopInstance, TspInstance,
};
use stochopt::swarm::{step_swarm, GlobalBest, Particle, SwarmConfig};
use stochopt::tabu::{tabu_search, TabuConfig, TabuList};
use stochopt::{Budget, Draw, Evaluator, Problem, Result, RngStream, RunRecord};

fn tsp(n: usize, seed: u64) -> TspInstance<f64> {
    TspInstance::random_uniform(n, 100.0, &mut RngStream::new(seed)).unwrap()
}

fn is_permutation(t: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    t.len() == n && t.iter().all(|&c| c < n && !std::mem::replace(&mut seen[c], true))
}

fn curve_monotone<S>(r: &RunRecord<f64, S>) -> bool {
    r.best_curve.windows(2).all(|w| w[1].1 < w[0].1 && w[1].0 > w[0].0)
}

/// Forwards to a problem while counting objective calls.
struct Counting<'a, P> {
    inner: &'a P,
    calls: Cell<u64>,
}

impl<P: Problem> Problem for Counting<'_, P> {
    type Scalar = P::Scalar;
    type Solution = P::Solution;
    type Move = P::Move;
    fn kind(&self) -> &'static str {
        self.inner.kind()
    }
    fn validate(&self, s: &Self::Solution) -> Result<()> {
        self.inner.validate(s)
    }
    fn objective(&self, s: &Self::Solution) -> Result<Self::Scalar> {
        self.calls.set(self.calls.get() + 1);
        self.inner.objective(s)
    }
    fn random_solution(&self, rng: &mut RngStream) -> Self::Solution {
        self.inner.random_solution(rng)
    }
    fn sample_neighbor(&self, s: &Self::Solution, rng: &mut RngStream) -> Result<(Self::Solution, Self::Move)> {
        self.inner.sample_neighbor(s, rng)
    }
    fn neighbors(&self, s: &Self::Solution) -> Result<Vec<(Self::Solution, Self::Move)>> {
        self.inner.neighbors(s)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_opt_keeps_a_permutation(seed in any::<u64>(), n in 2usize..30, a in 0usize..30, b in 0usize..30) {
        let mut rng = RngStream::new(seed);
        let mut tour: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut tour);
        let (i, j) = ((a % n).min(b % n), (a % n).max(b % n));
        let out = two_opt(&tour, i, j).unwrap();
        prop_assert!(is_permutation(&out, n));
    }

    #[test]
    fn tour_length_rotation_and_reversal(seed in any::<u64>(), n in 2usize..15, rot in 0usize..15) {
        let inst = tsp(n, seed);
        let mut rng = RngStream::new(seed ^ 1);
        let tour = inst.random_solution(&mut rng);
        let base = inst.tour_length(&tour).unwrap();
        let mut rotated = tour.clone();
        rotated.rotate_left(rot % n);
        let mut reversed = tour.clone();
        reversed.reverse();
        prop_assert!((inst.tour_length(&rotated).unwrap() - base).abs() <= 1e-9 * base);
        prop_assert!((inst.tour_length(&reversed).unwrap() - base).abs() <= 1e-9 * base);
    }

    #[test]
    fn first_fit_decreasing_feasible_above_volume_bound(sizes in prop::collection::vec(0.01f64..=1.0, 1..40)) {
        let inst = BinPackingInstance::new(sizes).unwrap();
        let a = inst.first_fit_decreasing();
        prop_assert!(inst.is_feasible(&a));
        prop_assert!(inst.bins_used(&a) >= inst.volume_bound());
    }

    #[test]
    fn sampled_neighbors_are_valid(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let t = tsp(9, seed);
        let s = t.random_solution(&mut rng);
        let (n, _) = t.sample_neighbor(&s, &mut rng).unwrap();
        prop_assert!(t.validate(&n).is_ok());

        let sizes: Vec<f64> = (0..10).map(|k| 0.05 + 0.09 * k as f64).collect();
        let bp = BinPackingInstance::new(sizes).unwrap();
        let a = bp.random_solution(&mut rng);
        let (n, _) = bp.sample_neighbor(&a, &mut rng).unwrap();
        prop_assert!(bp.validate(&n).is_ok());

        let land = ContinuousLandscape::<f64>::new(LandscapeKind::Rastrigin, 4).unwrap();
        let x = land.random_solution(&mut rng);
        let (n, _) = land.sample_neighbor(&x, &mut rng).unwrap();
        prop_assert!(land.validate(&n).is_ok());

        let cube = TabletopInstance::<f64>::cube();
        let s = cube.random_solution(&mut rng);
        let (n, _) = cube.sample_neighbor(&s, &mut rng).unwrap();
        prop_assert!(cube.validate(&n).is_ok());
    }

    #[test]
    fn best_curves_monotone_and_counts_exact(seed in any::<u64>()) {
        let inst = tsp(8, seed);
        let counted = Counting { inner: &inst, calls: Cell::new(0) };
        let budget = Budget::new(300).unwrap();
        let mut rng = RngStream::new(seed);

        let r = random_search(&counted, &budget, &mut rng).unwrap();
        prop_assert!(curve_monotone(&r));
        prop_assert_eq!(r.evaluations, counted.calls.replace(0));

        let start = inst.random_solution(&mut rng);
        let r = hill_climb_first_accept(&counted, start.clone(), &budget, &mut rng).unwrap();
        prop_assert!(curve_monotone(&r));
        prop_assert_eq!(r.evaluations, counted.calls.replace(0));

        let r = hill_climb_steepest(&counted, start.clone(), &Budget::new(100_000).unwrap()).unwrap();
        prop_assert!(curve_monotone(&r));
        prop_assert_eq!(r.evaluations, counted.calls.replace(0));
        // 2-opt local optimality by enumeration
        let best = r.best_solution.unwrap();
        let len = inst.tour_length(&best).unwrap();
        for (n, _) in inst.neighbors(&best).unwrap() {
            prop_assert!(inst.tour_length(&n).unwrap() >= len - 1e-9);
        }

        let r = anneal_from(&counted, start.clone(), &SaConfig::default(), &budget, &mut rng).unwrap();
        prop_assert!(curve_monotone(&r));
        prop_assert_eq!(r.evaluations, counted.calls.replace(0));

        let r = tabu_search(&inst, &TabuConfig::default(), &budget, &mut rng).unwrap();
        prop_assert!(curve_monotone(&r));
        prop_assert!(r.evaluations <= 300);
    }

    #[test]
    fn runs_are_deterministic(seed in any::<u64>()) {
        let inst = tsp(7, seed);
        let budget = Budget::new(400).unwrap();
        let sa = |s| anneal_from(&inst, vec![0, 1, 2, 3, 4, 5, 6], &SaConfig::default(), &budget, &mut RngStream::new(s)).unwrap();
        prop_assert_eq!(sa(seed), sa(seed));
        let ts = |s| tabu_search(&inst, &TabuConfig::default(), &budget, &mut RngStream::new(s)).unwrap();
        prop_assert_eq!(ts(seed), ts(seed));
    }

    #[test]
    fn tabu_list_never_holds_stale_entries(tenure in 0usize..10, pushes in prop::collection::vec(0u8..5, 1..60)) {
        let mut list = TabuList::new(tenure);
        for (k, a) in pushes.into_iter().enumerate() {
            let k = k as u64 + 1;
            list.purge(k);
            if let Some(age) = list.oldest_age(k) {
                prop_assert!(age <= tenure as u64);
            }
            prop_assert!(list.live(k).count() <= tenure);
            list.push(a, k);
        }
    }

    #[test]
    fn hopfield_energy_never_increases(seed in any::<u64>(), size in 1usize..12) {
        let mut rng = RngStream::new(seed);
        let mut w = vec![vec![0.0; size]; size];
        for i in 0..size {
            for j in 0..i {
                let v = rng.uniform(-2.0, 2.0);
                w[i][j] = v;
                w[j][i] = v;
            }
        }
        let theta: Vec<f64> = (0..size).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let mut net = HopfieldNet::new(w, theta).unwrap();
        net.randomize(&mut rng);
        let mut e = network_energy(&net);
        for _ in 0..200 {
            async_step(&mut net, &mut rng);
            let next = network_energy(&net);
            prop_assert!(next <= e + 1e-9);
            e = next;
        }
    }

    #[test]
    fn pheromone_stays_bounded_and_symmetric(seed in any::<u64>(), ops in prop::collection::vec((0usize..6, 0usize..6, 0.0f64..50.0), 1..80)) {
        let mut tau = PheromoneMatrix::new(6, 1.0, 1e-3, 5.0);
        let mut rng = RngStream::new(seed);
        for (x, y, amount) in ops {
            if rng.unit() < 0.3 {
                let mut tour: Vec<usize> = (0..6).collect();
                rng.shuffle(&mut tour);
                global_update(&mut tau, &tour, amount.max(0.01), 0.3, 1.0);
            } else {
                local_update(&mut tau, x, y, amount);
            }
            prop_assert!(tau.entries().iter().all(|&v| (1e-3..=5.0).contains(&v)));
            prop_assert!(tau.is_symmetric());
        }
    }

    #[test]
    fn ant_tours_are_permutations(seed in any::<u64>(), n in 2usize..12) {
        let inst = tsp(n, seed);
        let mut colony = Colony::new(&inst, &AcoConfig::default()).unwrap();
        let mut rng = RngStream::new(seed);
        for _ in 0..5 {
            let ant = colony.construct(&mut rng).unwrap();
            prop_assert!(is_permutation(&ant.tour, n));
            let len = inst.tour_length(&ant.tour).unwrap();
            prop_assert!((ant.length - len).abs() <= 1e-9 * len.max(1.0));
        }
    }

    #[test]
    fn roulette_probabilities_sum_to_one(seed in any::<u64>()) {
        // scanning the draw over [0, 1) partitions it into one interval per open city
        let inst = tsp(6, seed);
        let params = AcoConfig::default().resolve(&inst).unwrap();
        let tau = PheromoneMatrix::new(6, 1.0, 1e-4, 1e6);
        let ant = AntState::<f64>::start(6, 0);
        let grid = 10_000;
        let mut counts = [0usize; 6];
        for k in 0..grid {
            let u = (k as f64 + 0.5) / grid as f64;
            let c = choose_next_city(&ant, &tau, &inst, &params, &mut stochopt::FixedDraws::constant(u)).unwrap().city;
            counts[c] += 1;
        }
        prop_assert_eq!(counts[0], 0);
        prop_assert_eq!(counts.iter().sum::<usize>(), grid);
        let total: f64 = (1..6).map(|y| params.w_tau + params.w_eta / inst.dist(0, y)).sum();
        for y in 1..6 {
            let p = (params.w_tau + params.w_eta / inst.dist(0, y)) / total;
            prop_assert!((counts[y] as f64 / grid as f64 - p).abs() <= 1.5 / grid as f64);
        }
    }

    #[test]
    fn success_probability_step_function(times in prop::collection::vec(prop::option::of(1u64..200), 1..40)) {
        let e = EnsembleStats::from_success_times(times.clone(), 200).unwrap();
        let mut prev = 0.0;
        for n in 1..=200 {
            let p = cumulative_success(&e, n).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!(p >= prev);
            prev = p;
        }
        if e.successes() > 0 {
            let doubled: Vec<Option<u64>> = times.iter().chain(times.iter()).copied().collect();
            let d = EnsembleStats::from_success_times(doubled, 200).unwrap();
            let (a, b) = (computational_effort(&e, 0.99).unwrap(), computational_effort(&d, 0.99).unwrap());
            prop_assert_eq!((a.n_star, a.effort), (b.n_star, b.effort));
        }
    }

    #[test]
    fn projection_linear_in_inverse_rate(n in 1u64..25, k in 1u32..6, scale in 1.0f64..1e6) {
        for c in [ComplexityClass::Poly(k), ComplexityClass::Exp(3.0), ComplexityClass::TspFactorial, ComplexityClass::Factorial] {
            let a = runtime_projection(c, n, 1e9).unwrap();
            let b = runtime_projection(c, n, 1e9 * scale).unwrap();
            prop_assert!((a / scale - b).abs() <= 1e-12 * a.max(1e-300));
        }
    }

    #[test]
    fn rescaled_delta_algebra(ei in 0.0f64..1e3, ej in 0.0f64..1e3, et in 0.0f64..1e3) {
        let (si, sj, st) = (ei.sqrt(), ej.sqrt(), et.sqrt());
        let direct = (sj - si).powi(2) - (si - st).powi(2);
        let got = rescaled_delta_with(ei, ej, et, RescaleForm::Printed).unwrap();
        prop_assert!((got - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
        prop_assert_eq!(rescaled_delta_with(ei, ei, ei, RescaleForm::Printed).unwrap(), 0.0);
        // with E_t = 0 the target-centered form is the plain difference of the energies
        let plain = rescaled_delta_with(ei, ej, 0.0, RescaleForm::TargetCentered).unwrap();
        prop_assert!((plain - (ej - ei)).abs() <= 1e-9 * (1.0 + ei + ej));
    }

    #[test]
    fn swarm_best_ordering(seed in any::<u64>()) {
        let land = ContinuousLandscape::<f64>::new(LandscapeKind::Rastrigin, 2).unwrap();
        let cfg = SwarmConfig::<f64>::default();
        let limits = cfg.velocity_limits(land.bounds());
        let mut ev = Evaluator::new(&land, Budget::new(10_000).unwrap());
        let mut rng = RngStream::new(seed);
        let mut ps: Vec<Particle<f64>> = (0..5).map(|_| Particle::at_rest(land.random_solution(&mut rng))).collect();
        let mut g = GlobalBest::empty(2);
        let mut history_min = vec![f64::INFINITY; ps.len()];
        for _ in 0..30 {
            step_swarm(&mut ps, &mut g, &cfg, &limits, &mut ev, &mut rng).unwrap();
            for (k, p) in ps.iter().enumerate() {
                history_min[k] = history_min[k].min(land.objective(&p.pos).unwrap());
                prop_assert!(g.val <= p.pbest_val);
                prop_assert_eq!(p.pbest_val, history_min[k]);
            }
        }
    }
}
