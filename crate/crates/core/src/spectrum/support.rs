//! Spectral-support arithmetic: the almost sure spectrum of the i.i.d.-η
//! model is Σ = exp(i supp μ) Σ₀, a Minkowski rotation of the free band by
//! the support of the phase distribution.

use crate::arcs::ArcUnion;
use crate::model::{Coefficients, DistributionSpec};
use crate::scalar::Real;
use crate::spectrum::free::sigma0;
use crate::spectrum::measure::SpectralMeasure;
use serde::Serialize;

/// Predicted almost-sure spectrum for η ~ μ i.i.d.
pub fn predicted_support<F: Real>(
    mu: &DistributionSpec<F>,
    params: Coefficients<F>,
) -> ArcUnion<F> {
    // matrix entries carry e^{-iη}: the spectrum rotates by −supp μ; for the
    // symmetric supports used here this equals +supp μ, but keep the sign
    // honest for off-center arcs.
    let support = mu.support();
    let reflected = if support.is_full() {
        ArcUnion::full()
    } else {
        ArcUnion::from_intervals(
            &support
                .arcs()
                .iter()
                .map(|a| (-(a.end()), -a.start))
                .collect::<Vec<_>>(),
        )
    };
    sigma0(params).minkowski_sum(&reflected)
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportReport {
    pub total: usize,
    pub outliers: usize,
    pub outlier_fraction: f64,
    /// Largest signed distance of an eigenphase to the arc union
    /// (> 0 means strictly outside).
    pub max_signed_distance: f64,
    /// Fraction of the predicted arcs within `tol` of some eigenphase.
    pub coverage_fraction: f64,
}

/// Check a pooled eigenphase measure against a predicted arc union: count
/// phases outside the `tol`-dilated arcs and measure how much of the
/// predicted support the spectrum actually fills.
pub fn support_check<F: Real>(
    measure: &SpectralMeasure<F>,
    arcs: &ArcUnion<F>,
    tol: F,
) -> SupportReport {
    let total = measure.len();
    let mut outliers = 0usize;
    let mut max_signed = F::neg_infinity();
    for &p in measure.phases() {
        let d = arcs.signed_distance(p);
        max_signed = max_signed.max(d);
        if d > tol {
            outliers += 1;
        }
    }

    // coverage: sample the predicted arcs and look for a nearby eigenphase
    let probes = 512usize;
    let mut covered = 0usize;
    let mut probed = 0usize;
    if arcs.is_full() {
        let n = probes;
        for i in 0..n {
            let x = -F::PI() + F::two_pi() * F::from_usize(i).unwrap() / F::from_usize(n).unwrap();
            probed += 1;
            if nearest_phase_distance(measure, x) <= tol {
                covered += 1;
            }
        }
    } else {
        for arc in arcs.arcs() {
            let n = ((arc.len / F::two_pi() * F::from_usize(probes).unwrap())
                .to_usize()
                .unwrap_or(1))
            .max(1);
            for i in 0..n {
                let x = arc.start
                    + arc.len * (F::from_usize(i).unwrap() + F::lit(0.5))
                        / F::from_usize(n).unwrap();
                probed += 1;
                if nearest_phase_distance(measure, x) <= tol {
                    covered += 1;
                }
            }
        }
    }

    SupportReport {
        total,
        outliers,
        outlier_fraction: outliers as f64 / total as f64,
        max_signed_distance: max_signed.to_f64().unwrap(),
        coverage_fraction: if probed == 0 { 1.0 } else { covered as f64 / probed as f64 },
    }
}

fn nearest_phase_distance<F: Real>(measure: &SpectralMeasure<F>, x: F) -> F {
    let phases = measure.phases();
    let x = crate::scalar::wrap_angle(x);
    let idx = phases.partition_point(|&p| p < x);
    let mut best = F::infinity();
    // neighbours on the circle, including the wraparound pair
    let candidates = [
        idx.checked_sub(1).unwrap_or(phases.len() - 1),
        idx % phases.len(),
    ];
    for &i in &candidates {
        let mut d = (phases[i] - x).abs();
        d = d.min(F::two_pi() - d);
        best = best.min(d);
    }
    best
}
