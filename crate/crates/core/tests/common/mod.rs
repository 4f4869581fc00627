//! Dense reference computations shared by the integration tests. Nothing
//! here goes through the eigenbasis shortcuts used by the library.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use ring_chord::{Chord, WeightedCycle};

pub fn random_cycle<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> WeightedCycle {
    WeightedCycle::new((0..n).map(|_| rng.random_range(lo..=hi)).collect()).unwrap()
}

pub fn random_chord<R: Rng>(rng: &mut R, n: usize) -> Chord {
    loop {
        let p = rng.random_range(0..n);
        let q = rng.random_range(0..n);
        let d = p.abs_diff(q);
        if d >= 2 && n - d >= 2 {
            return Chord::new(p, q).unwrap();
        }
    }
}

/// Laplacian assembled entry by entry, with an optional chord.
pub fn laplacian(cycle: &WeightedCycle, chord: Option<(Chord, f64)>) -> DMatrix<f64> {
    let n = cycle.n();
    let mut l = DMatrix::zeros(n, n);
    let mut add = |a: usize, b: usize, c: f64| {
        l[(a, a)] += c;
        l[(b, b)] += c;
        l[(a, b)] -= c;
        l[(b, a)] -= c;
    };
    for (i, &c) in cycle.conductances().iter().enumerate() {
        add(i, (i + 1) % n, c);
    }
    if let Some((ch, w)) = chord {
        add(ch.p, ch.q, w);
    }
    l
}

/// `L† = (L + J/n)⁻¹ - J/n` by LU factorisation.
pub fn pinv_lu(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let j = DMatrix::from_element(n, n, 1.0 / n as f64);
    let inv = (l + &j).lu().try_inverse().expect("connected Laplacian");
    inv - j
}

pub fn resistance(g: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    g[(a, a)] + g[(b, b)] - 2.0 * g[(a, b)]
}

/// `Σ_{u<v} R_uv` from a pseudoinverse.
pub fn kirchhoff_pairs(g: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    let mut k = 0.0;
    for u in 0..n {
        for v in u + 1..n {
            k += resistance(g, u, v);
        }
    }
    k
}

/// Kirchhoff improvement as the sum over all pairs of the resistance drops.
pub fn improvement_pair_sum(g: &DMatrix<f64>, chord: Chord, w: f64) -> f64 {
    let n = g.nrows();
    let (p, q) = (chord.p, chord.q);
    let r = |a: usize, b: usize| if a == b { 0.0 } else { resistance(g, a, b) };
    let denom = 4.0 * (1.0 + w * r(p, q));
    let mut total = 0.0;
    for u in 0..n {
        for v in u + 1..n {
            let x = r(u, q) + r(v, p) - r(u, p) - r(v, q);
            total += w * x * x / denom;
        }
    }
    total
}

pub fn eigenvalues(l: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(l.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Second-smallest eigenvalue of a dense symmetric matrix.
pub fn lambda1(l: &DMatrix<f64>) -> f64 {
    eigenvalues(l)[1]
}

/// `λ_1` of the `w → ∞` limit: the Laplacian restricted to `x_p = x_q`,
/// i.e. the contracted graph with mass 2 on the merged vertex.
pub fn contracted_lambda1(cycle: &WeightedCycle, chord: Chord) -> f64 {
    let c = contracted_laplacian(cycle, chord);
    let merged = chord.p - usize::from(chord.q < chord.p);
    let mut scale = vec![1.0; c.nrows()];
    scale[merged] = 1.0 / 2f64.sqrt();
    let scaled = DMatrix::from_fn(c.nrows(), c.ncols(), |i, j| c[(i, j)] * scale[i] * scale[j]);
    lambda1(&scaled)
}

/// Laplacian of the graph with `p` and `q` merged.
pub fn contracted_laplacian(cycle: &WeightedCycle, chord: Chord) -> DMatrix<f64> {
    let l = laplacian(cycle, None);
    let n = l.nrows();
    let keep: Vec<usize> = (0..n).filter(|&v| v != chord.q).collect();
    let idx = |v: usize| {
        if v == chord.q {
            keep.iter().position(|&k| k == chord.p).unwrap()
        } else {
            keep.iter().position(|&k| k == v).unwrap()
        }
    };
    let mut c = DMatrix::zeros(n - 1, n - 1);
    for a in 0..n {
        for b in 0..n {
            c[(idx(a), idx(b))] += l[(a, b)];
        }
    }
    c
}

/// Indices of the points not dominated by any other, by pairwise comparison.
pub fn brute_force_front(points: &[(f64, f64)]) -> Vec<usize> {
    (0..points.len())
        .filter(|&k| {
            let (ik, dk) = points[k];
            !points.iter().any(|&(i, d)| i >= ik && d >= dk && (i > ik || d > dk))
        })
        .collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
