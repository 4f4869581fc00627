//! Smallest eigenvalue of a diagonal matrix plus a rank-one term.
//!
//! For `D = diag(d_1 <= ... <= d_m)` and `A = D + w z zᵀ` with `w >= 0`, the
//! eigenvalues of `A` are the deflated poles (components with `z_k ≈ 0`),
//! one copy of every repeated pole, and the roots of
//!
//! ```text
//! f(μ) = 1 + w Σ_k z_k² / (d_k - μ)
//! ```
//!
//! `f` is increasing between consecutive distinct poles, so the smallest root
//! is bracketed by the two lowest surviving poles.

/// Weights below this fraction of the largest weight are deflated.
pub const DEFLATION_RTOL: f64 = 1e-24;

/// Offset of `λ_min(diag(poles) + w z zᵀ)` above `poles[0]`.
///
/// `poles` must be ascending; `weights[k] = z_k²`. `merge_tol` is the absolute
/// gap below which neighbouring poles are treated as one repeated eigenvalue.
/// Returning the offset rather than the eigenvalue keeps full relative
/// precision for small gains.
pub fn smallest_root_offset(poles: &[f64], weights: &[f64], w: f64, merge_tol: f64) -> f64 {
    debug_assert_eq!(poles.len(), weights.len());
    let Some(&base) = poles.first() else {
        return 0.0;
    };
    let max_weight = weights.iter().copied().fold(0.0, f64::max);
    if w == 0.0 || max_weight == 0.0 {
        return 0.0;
    }
    let cutoff = DEFLATION_RTOL * max_weight;

    // Surviving poles (shifted by `base`), with repeated poles merged. Every
    // deflated pole and every extra copy of a merged pole stays an eigenvalue.
    let mut shifted: Vec<f64> = Vec::with_capacity(poles.len());
    let mut merged: Vec<f64> = Vec::with_capacity(poles.len());
    let mut persistent = f64::INFINITY;
    for (&d, &z2) in poles.iter().zip(weights) {
        let e = d - base;
        if z2 <= cutoff {
            persistent = persistent.min(e);
            continue;
        }
        match shifted.last() {
            Some(&prev) if e - prev <= merge_tol => {
                persistent = persistent.min(prev);
                *merged.last_mut().unwrap() += z2;
            }
            _ => {
                shifted.push(e);
                merged.push(z2);
            }
        }
    }
    if shifted.is_empty() {
        return persistent;
    }

    // Work relative to the lowest surviving pole.
    let origin = shifted[0];
    for e in shifted.iter_mut() {
        *e -= origin;
    }
    let root = if shifted.len() == 1 { w * merged[0] } else { bracketed_root(&shifted, &merged, w) };
    (origin + root).min(persistent)
}

/// Root of `1 + w Σ z_k/(e_k - t)` in `(0, e_1)`, where `e_0 = 0 < e_1 < ...`.
fn bracketed_root(poles: &[f64], weights: &[f64], w: f64) -> f64 {
    let upper = poles[1];
    let secular = |t: f64| -> f64 { 1.0 + w * poles.iter().zip(weights).map(|(e, z)| z / (e - t)).sum::<f64>() };

    // Pick the nearer pole as the anchor: multiplying f by (anchor - t)
    // removes that singularity and leaves a function Newton handles well.
    let mid = 0.5 * upper;
    let anchor_left = secular(mid) > 0.0;
    let anchor = if anchor_left { 0 } else { 1 };
    let (mut lo, mut hi) = if anchor_left { (0.0, mid) } else { (mid, upper) };
    let anchor_pole = poles[anchor];
    let anchor_weight = weights[anchor];

    // h(t) = (e_a - t) f(t) = (e_a - t)(1 + w φ(t)) + w z_a, with φ the other terms.
    let eval = |t: f64| -> (f64, f64) {
        let mut phi = 0.0;
        let mut dphi = 0.0;
        for (k, (e, z)) in poles.iter().zip(weights).enumerate() {
            if k == anchor {
                continue;
            }
            let inv = 1.0 / (e - t);
            phi += z * inv;
            dphi += z * inv * inv;
        }
        let gap = anchor_pole - t;
        let h = gap * (1.0 + w * phi) + w * anchor_weight;
        let dh = -(1.0 + w * phi) + gap * w * dphi;
        (h, dh)
    };

    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (h, dh) = eval(t);
        // The factor (e_a - t) is negative for the left anchor, positive for the right.
        let f_positive = if anchor_left { h < 0.0 } else { h > 0.0 };
        if h == 0.0 {
            return t;
        }
        if f_positive {
            hi = t;
        } else {
            lo = t;
        }
        let mut next = t - h / dh;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let scale = next.abs().max(f64::MIN_POSITIVE);
        if (next - t).abs() <= 4.0 * f64::EPSILON * scale || hi - lo <= 4.0 * f64::EPSILON * scale {
            return next;
        }
        t = next;
    }
    t
}
