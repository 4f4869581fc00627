mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ring_chord::chord::{endpoint_resistance_updated, kirchhoff_improvement, pairwise_resistance_updated};
use ring_chord::pareto::evaluate_objectives;
use ring_chord::screening::select_best;
use ring_chord::{CandidateSet, Chord, ChordCandidate, SpectralDecomposition, WeightedCycle};

fn cand(c: Chord, w: f64) -> ChordCandidate {
    ChordCandidate::new(c, w).unwrap()
}

#[test]
fn improvement_three_ways() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..40 {
        let n = rng.random_range(5..=30);
        let cycle = random_cycle(&mut rng, n, 0.5, 20.0);
        let chord = random_chord(&mut rng, n);
        let w = 10f64.powf(rng.random_range(-2.0..2.0));
        let spec = SpectralDecomposition::of_cycle(&cycle).unwrap();
        let fast = kirchhoff_improvement(&spec, &cand(chord, w)).unwrap();
        let g = pinv_lu(&laplacian(&cycle, None));
        let g2 = pinv_lu(&laplacian(&cycle, Some((chord, w))));
        let dense = kirchhoff_pairs(&g) - kirchhoff_pairs(&g2);
        let pair_sum = improvement_pair_sum(&g, chord, w);
        assert!(rel_err(fast, dense) < 1e-8, "fast {fast} dense {dense}");
        assert!(rel_err(pair_sum, dense) < 1e-8, "pair sum {pair_sum} dense {dense}");
    }
}

#[test]
fn pairwise_resistances_match_dense_update() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..20 {
        let n = rng.random_range(5..=25);
        let cycle = random_cycle(&mut rng, n, 1.0, 10.0);
        let chord = random_chord(&mut rng, n);
        let w = rng.random_range(0.1..50.0);
        let spec = SpectralDecomposition::of_cycle(&cycle).unwrap();
        let g2 = pinv_lu(&laplacian(&cycle, Some((chord, w))));
        for u in 0..n {
            for v in u + 1..n {
                let fast = pairwise_resistance_updated(&spec, &cand(chord, w), u, v).unwrap();
                assert!((fast - resistance(&g2, u, v)).abs() < 1e-9);
            }
        }
        let rpq = endpoint_resistance_updated(&spec, &cand(chord, w)).unwrap();
        assert!((rpq - resistance(&g2, chord.p, chord.q)).abs() < 1e-9);
    }
}

#[test]
fn secular_update_matches_dense_eigensolve() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..40 {
        let n = rng.random_range(5..=40);
        let cycle = random_cycle(&mut rng, n, 1.0, 100.0);
        let chord = random_chord(&mut rng, n);
        let w = 10f64.powf(rng.random_range(-3.0..3.0));
        let spec = SpectralDecomposition::of_cycle(&cycle).unwrap();
        let fast = spec.lambda1_updated(chord, w).unwrap();
        let dense = lambda1(&laplacian(&cycle, Some((chord, w))));
        assert!(rel_err(fast, dense) < 1e-8, "n={n} w={w}: {fast} vs {dense}");
        assert!(fast >= spec.lambda1() - 1e-10 && fast <= spec.lambda2() + 1e-10);
    }
}

#[test]
fn large_weight_approaches_contracted_graph() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..10 {
        let n = rng.random_range(6..=20);
        let cycle = random_cycle(&mut rng, n, 1.0, 5.0);
        let chord = random_chord(&mut rng, n);
        let spec = SpectralDecomposition::of_cycle(&cycle).unwrap();
        let limit = contracted_lambda1(&cycle, chord);
        let near = spec.lambda1_updated(chord, 1e9).unwrap();
        assert!(rel_err(near, limit) < 1e-6, "{near} vs {limit}");
    }
}

#[test]
fn gain_slope_at_zero_is_first_mode_jump() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..10 {
        let n = rng.random_range(6..=20);
        let cycle = random_cycle(&mut rng, n, 1.0, 5.0);
        let chord = random_chord(&mut rng, n);
        let spec = SpectralDecomposition::of_cycle(&cycle).unwrap();
        let beta1 = spec.mode_value(1, chord.p) - spec.mode_value(1, chord.q);
        let h = 1e-6;
        let slope = spec.exact_gain(chord, h).unwrap() / h;
        assert!((slope - beta1 * beta1).abs() < 1e-4 * (1.0 + beta1 * beta1), "{slope} vs {}", beta1 * beta1);
    }
}

#[test]
fn full_mode_lowfreq_gain_is_exact_gain() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let cycle = random_cycle(&mut rng, 15, 1.0, 100.0);
    let spec = SpectralDecomposition::of_cycle(&cycle).unwrap();
    for chord in cycle.admissible_chords() {
        let a = spec.lowfreq_gain(chord, 30.0, 14).unwrap();
        let b = spec.exact_gain(chord, 30.0).unwrap();
        assert!((a - b).abs() <= 1e-12 * spec.lambda_max());
        assert!(spec.lowfreq_gain(chord, 30.0, 1).unwrap() >= b - 1e-12);
    }
}

#[test]
fn kirchhoff_closed_forms() {
    assert!((WeightedCycle::uniform(4, 1.0).unwrap().kirchhoff_index() - 5.0).abs() < 1e-10);
    assert!((WeightedCycle::uniform(5, 1.0).unwrap().kirchhoff_index() - 10.0).abs() < 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..20 {
        let n = rng.random_range(4..=50);
        let cycle = random_cycle(&mut rng, n, 0.1, 10.0);
        let spec = SpectralDecomposition::of_cycle(&cycle).unwrap();
        assert!(rel_err(cycle.kirchhoff_index(), spec.kirchhoff_index()) < 1e-8);
        let g = pinv_lu(&laplacian(&cycle, None));
        assert!(rel_err(kirchhoff_pairs(&g), spec.kirchhoff_index()) < 1e-8);
        let chord = random_chord(&mut rng, n.max(5));
        if chord.q < n && cycle.is_admissible(chord) {
            let jumps = spec.mode_jumps(chord).unwrap();
            let r = cycle.pair_resistance(chord.p, chord.q).unwrap();
            assert!(rel_err(jumps.modal_resistance(&spec), r) < 1e-8);
        }
    }
}

#[test]
fn objectives_match_dense_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let cycle = random_cycle(&mut rng, 30, 1.0, 100.0);
    let spec = SpectralDecomposition::of_cycle(&cycle).unwrap();
    let full = CandidateSet::full(&cycle);
    let w = 100.0;
    let pts = evaluate_objectives(&spec, full.iter(), w).unwrap();
    let base_l1 = lambda1(&laplacian(&cycle, None));
    let base_k = kirchhoff_pairs(&pinv_lu(&laplacian(&cycle, None)));
    for pt in pts.iter().step_by(7) {
        let l = laplacian(&cycle, Some((pt.chord, w)));
        let d = lambda1(&l) - base_l1;
        let i = base_k - kirchhoff_pairs(&pinv_lu(&l));
        assert!(rel_err(pt.raw_i, i) < 1e-8);
        // The dense difference of two eigenvalues carries absolute error near ε λ_max.
        assert!((pt.raw_d - d).abs() < 1e-8 * d.abs() + 1e-12 * spec.lambda_max(), "{} vs {d}", pt.raw_d);
    }
}

#[test]
fn zero_weight_objectives_vanish() {
    let cycle = WeightedCycle::new(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
    let spec = SpectralDecomposition::of_cycle(&cycle).unwrap();
    for p in evaluate_objectives(&spec, CandidateSet::full(&cycle).iter(), 0.0).unwrap() {
        assert_eq!((p.raw_i, p.raw_d), (0.0, 0.0));
    }
}

#[test]
fn uniform_cycle_objectives() {
    let cycle = WeightedCycle::uniform(10, 1.0).unwrap();
    let spec = SpectralDecomposition::of_cycle(&cycle).unwrap();
    let pts = evaluate_objectives(&spec, CandidateSet::full(&cycle).iter(), 2.0).unwrap();
    let best = pts.iter().max_by(|a, b| a.raw_i.total_cmp(&b.raw_i)).unwrap();
    assert_eq!(cycle.hop_distance(best.chord.p, best.chord.q), 5);
    for p in &pts {
        assert_eq!(p.raw_d, 0.0);
        assert!(p.raw_i > 0.0);
    }
}

#[test]
fn exhaustive_selection_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    for n in [9, 17, 28, 40] {
        let cycle = random_cycle(&mut rng, n, 1.0, 100.0);
        let spec = SpectralDecomposition::of_cycle(&cycle).unwrap();
        let full = CandidateSet::full(&cycle);
        let picked = select_best(&full, |c| spec.exact_gain(c, 50.0)).unwrap();
        let base = lambda1(&laplacian(&cycle, None));
        let dense: Vec<(Chord, f64)> =
            full.iter().map(|&c| (c, lambda1(&laplacian(&cycle, Some((c, 50.0)))) - base)).collect();
        let best = dense.iter().map(|x| x.1).fold(f64::MIN, f64::max);
        let picked_dense = dense.iter().find(|x| x.0 == picked).unwrap().1;
        assert!(best - picked_dense <= 1e-10 * spec.lambda_max(), "n={n}");
    }
}

#[test]
fn numerator_alone_does_not_pick_the_kirchhoff_optimum() {
    // The denominator 1 + wR changes the ranking on some instance.
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let differs = (0..50).any(|_| {
        let cycle = random_cycle(&mut rng, 16, 1.0, 100.0);
        let spec = SpectralDecomposition::of_cycle(&cycle).unwrap();
        let full = CandidateSet::full(&cycle);
        let by_q = select_best(&full, |c| Ok(spec.resistance_sq_form(c.p, c.q))).unwrap();
        let by_i = select_best(&full, |c| kirchhoff_improvement(&spec, &cand(c, 100.0))).unwrap();
        by_q != by_i
    });
    assert!(differs);
}
