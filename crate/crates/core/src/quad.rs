//! Adaptive Gauss–Kronrod (G7, K15) quadrature. Declared split points are
//! treated as integrable singularities: the segments touching them are
//! integrated in the substituted variable x = s ± u², which turns log and
//! inverse-square-root endpoint singularities into bounded integrands and
//! keeps the bisection from stalling on them.

use crate::scalar::Real;

/// K15 nodes on the positive half (symmetric), Kronrod weights, and the
/// embedded G7 weights carried by the odd-index nodes.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

#[derive(Clone, Copy, Debug)]
pub struct Quadrature<F> {
    pub value: F,
    pub err: F,
    pub evals: usize,
}

fn gk15<F: Real>(f: &impl Fn(F) -> F, a: F, b: F) -> (F, F) {
    let half = F::lit(0.5);
    let center = (a + b) * half;
    let hw = (b - a) * half;
    let mut kronrod = F::zero();
    let mut gauss = F::zero();
    // G7 nodes are XGK[1], XGK[3], XGK[5] and the center XGK[7]
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let dx = hw * F::lit(x);
        let pair = if i == 7 {
            f(center)
        } else {
            f(center - dx) + f(center + dx)
        };
        kronrod += F::lit(wk) * pair;
        if i % 2 == 1 {
            gauss += F::lit(WG[i / 2]) * pair;
        }
    }
    let value = kronrod * hw;
    let err = ((kronrod - gauss) * hw).abs();
    (value, err)
}

fn plain<F: Real>(f: &impl Fn(F) -> F, a: F, b: F, tol: F) -> Quadrature<F> {
    let mut total = F::zero();
    let mut total_err = F::zero();
    let mut evals = 0usize;
    let length = b - a;
    if length <= F::zero() {
        return Quadrature { value: total, err: total_err, evals };
    }
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e) = gk15(f, lo, hi);
        evals += 15;
        let local_tol = tol * ((hi - lo) / length);
        if e <= local_tol || depth >= 48 || hi - lo <= F::epsilon() * (hi.abs() + lo.abs()) {
            total += v;
            total_err += e;
        } else {
            let mid = (lo + hi) * F::lit(0.5);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    Quadrature { value: total, err: total_err, evals }
}

/// ∫_s^{s+w} f through x = s + u² (or the mirror image for dir = −1).
fn endpoint_substituted<F: Real>(f: &impl Fn(F) -> F, s: F, w: F, dir: F, tol: F) -> Quadrature<F> {
    let sqrt_w = w.sqrt();
    plain(
        &|u: F| f(s + dir * u * u) * F::lit(2.0) * u,
        F::zero(),
        sqrt_w,
        tol,
    )
}

/// Integrate `f` on `[a, b]` to absolute tolerance `tol`, with integrable
/// singularities at the interior points listed in `splits`.
pub fn adaptive<F: Real>(f: impl Fn(F) -> F, a: F, b: F, tol: F, splits: &[F]) -> Quadrature<F> {
    assert!(b >= a, "integration bounds out of order");
    let mut cuts: Vec<F> = splits.iter().copied().filter(|&s| s > a && s < b).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| *x == *y);

    // (lo, hi, singular at lo, singular at hi)
    let mut segments: Vec<(F, F, bool, bool)> = Vec::with_capacity(cuts.len() + 1);
    let mut left = a;
    let mut left_sing = false;
    for s in cuts {
        segments.push((left, s, left_sing, true));
        left = s;
        left_sing = true;
    }
    segments.push((left, b, left_sing, false));

    let per_seg_tol = tol / F::from_usize(segments.len()).unwrap();
    let mut total = F::zero();
    let mut total_err = F::zero();
    let mut evals = 0usize;

    let mut accumulate = |q: Quadrature<F>| {
        total += q.value;
        total_err += q.err;
        evals += q.evals;
    };

    for (lo, hi, sing_lo, sing_hi) in segments {
        if hi <= lo {
            continue;
        }
        match (sing_lo, sing_hi) {
            (false, false) => accumulate(plain(&f, lo, hi, per_seg_tol)),
            (true, false) => accumulate(endpoint_substituted(&f, lo, hi - lo, F::one(), per_seg_tol)),
            (false, true) => accumulate(endpoint_substituted(&f, hi, hi - lo, -F::one(), per_seg_tol)),
            (true, true) => {
                let mid = (lo + hi) * F::lit(0.5);
                let half_tol = per_seg_tol * F::lit(0.5);
                accumulate(endpoint_substituted(&f, lo, mid - lo, F::one(), half_tol));
                accumulate(endpoint_substituted(&f, hi, hi - mid, -F::one(), half_tol));
            }
        }
    }
    Quadrature { value: total, err: total_err, evals }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn smooth_integral() {
        let q = adaptive(|x: f64| x.sin(), 0.0, PI, 1e-12, &[]);
        assert!((q.value - 2.0).abs() < 1e-10, "{}", q.value);
    }

    #[test]
    fn log_singularity_at_split() {
        // ∫_{-1}^{1} ln|x| dx = −2
        let q = adaptive(|x: f64| x.abs().max(1e-300).ln(), -1.0, 1.0, 1e-10, &[0.0]);
        assert!((q.value + 2.0).abs() < 1e-8, "{}", q.value);
        assert!(q.evals < 40_000, "evals {}", q.evals);
    }

    #[test]
    fn log_singularity_slightly_off_split() {
        // the declared split misses the true singularity by an ulp-scale
        // offset; the substitution keeps the cost bounded anyway
        let off = 1e-13;
        let q = adaptive(
            |x: f64| (x - off).abs().max(1e-300).ln(),
            -1.0,
            1.0,
            1e-9,
            &[0.0],
        );
        assert!((q.value + 2.0).abs() < 1e-6, "{}", q.value);
        assert!(q.evals < 200_000, "evals {}", q.evals);
    }

    #[test]
    fn inverse_sqrt_at_split() {
        // ∫_0^1 dx/√|x − 1/2| = 2(√(1/2) + √(1/2)) = 2√2
        let q = adaptive(
            |x: f64| 1.0 / (x - 0.5).abs().max(1e-300).sqrt(),
            0.0,
            1.0,
            1e-10,
            &[0.5],
        );
        assert!((q.value - 2.0 * 2.0f64.sqrt()).abs() < 1e-8, "{}", q.value);
    }

    #[test]
    fn plain_endpoint_singularities_still_converge() {
        // ∫_0^1 ln x dx = −1 without any declared split
        let q = adaptive(|x: f64| x.max(1e-300).ln(), 0.0, 1.0, 1e-8, &[]);
        assert!((q.value + 1.0).abs() < 1e-6, "{}", q.value);
    }

    #[test]
    fn interior_kink() {
        let q = adaptive(|x: f64| x.abs(), -1.0, 1.0, 1e-12, &[0.0]);
        assert!((q.value - 1.0).abs() < 1e-12);
    }
}
