//! Closed-arc unions on the torus, used for spectral supports and their
//! Minkowski rotations.

use crate::scalar::{wrap_angle, Real};

/// Closed arc [start, start + len] on the universal cover, start ∈ (−π, π],
/// 0 ≤ len ≤ 2π. Zero length is a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc<F: Real> {
    pub start: F,
    pub len: F,
}

impl<F: Real> Arc<F> {
    pub fn end(&self) -> F {
        self.start + self.len
    }
}

/// Finite union of closed arcs, normalized and merged.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcUnion<F: Real> {
    arcs: Vec<Arc<F>>,
    full: bool,
}

impl<F: Real> ArcUnion<F> {
    pub fn full() -> Self {
        ArcUnion { arcs: Vec::new(), full: true }
    }

    pub fn point(at: F) -> Self {
        ArcUnion { arcs: vec![Arc { start: wrap_angle(at), len: F::zero() }], full: false }
    }

    /// Arc centered at `center` with the given half-width.
    pub fn from_arc(center: F, half_width: F) -> Self {
        assert!(half_width >= F::zero());
        if half_width >= F::PI() {
            return ArcUnion::full();
        }
        ArcUnion {
            arcs: vec![Arc {
                start: wrap_angle(center - half_width),
                len: half_width + half_width,
            }],
            full: false,
        }
        .normalized()
    }

    /// Union of closed intervals [lo, hi] given on the cover.
    pub fn from_intervals(intervals: &[(F, F)]) -> Self {
        let arcs = intervals
            .iter()
            .filter(|(lo, hi)| hi >= lo)
            .map(|&(lo, hi)| Arc { start: wrap_angle(lo), len: (hi - lo).min(F::two_pi()) })
            .collect();
        ArcUnion { arcs, full: false }.normalized()
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn arcs(&self) -> &[Arc<F>] {
        &self.arcs
    }

    pub fn total_len(&self) -> F {
        if self.full {
            F::two_pi()
        } else {
            self.arcs.iter().map(|a| a.len).sum()
        }
    }

    fn normalized(mut self) -> Self {
        if self.full {
            return self;
        }
        if self.arcs.iter().any(|a| a.len >= F::two_pi()) {
            return ArcUnion::full();
        }
        if self.arcs.is_empty() {
            return self;
        }
        self.arcs.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap());
        // merge on the cover
        let mut merged: Vec<Arc<F>> = Vec::with_capacity(self.arcs.len());
        for arc in self.arcs.drain(..) {
            match merged.last_mut() {
                Some(last) if arc.start <= last.end() => {
                    let new_end = last.end().max(arc.end());
                    last.len = new_end - last.start;
                }
                _ => merged.push(arc),
            }
        }
        // wraparound: does the last arc reach the first one shifted by 2π?
        if merged.len() > 1 {
            let first = merged[0];
            let last = *merged.last().unwrap();
            if last.end() >= first.start + F::two_pi() {
                let new_end = (first.start + F::two_pi() + first.len).max(last.end());
                let last_mut = merged.last_mut().unwrap();
                last_mut.len = new_end - last_mut.start;
                merged.remove(0);
            }
        }
        if merged.iter().any(|a| a.len >= F::two_pi()) {
            return ArcUnion::full();
        }
        ArcUnion { arcs: merged, full: false }
    }

    /// Minkowski sum on the torus: {a + b : a ∈ self, b ∈ other}.
    pub fn minkowski_sum(&self, other: &ArcUnion<F>) -> ArcUnion<F> {
        if self.full || other.full {
            return ArcUnion::full();
        }
        let mut sums = Vec::with_capacity(self.arcs.len() * other.arcs.len());
        for a in &self.arcs {
            for b in &other.arcs {
                sums.push(Arc { start: wrap_angle(a.start + b.start), len: a.len + b.len });
            }
        }
        ArcUnion { arcs: sums, full: false }.normalized()
    }

    /// Grow every arc by δ on both sides (negative δ erodes; arcs shorter
    /// than 2|δ| vanish).
    pub fn dilate(&self, delta: F) -> ArcUnion<F> {
        if self.full {
            return ArcUnion::full();
        }
        let arcs = self
            .arcs
            .iter()
            .filter(|a| a.len + delta + delta >= F::zero())
            .map(|a| Arc {
                start: wrap_angle(a.start - delta),
                len: a.len + delta + delta,
            })
            .collect();
        ArcUnion { arcs, full: false }.normalized()
    }

    /// Signed distance of a point to the union: ≤ 0 inside (distance to the
    /// boundary, negated), > 0 outside (distance to the nearest arc).
    pub fn signed_distance(&self, x: F) -> F {
        if self.full {
            return -F::PI();
        }
        if self.arcs.is_empty() {
            return F::PI();
        }
        let x = wrap_angle(x);
        let mut best = F::infinity();
        for a in &self.arcs {
            // lift x near the arc
            let mut rel = x - a.start;
            rel = rel - F::two_pi() * ((rel / F::two_pi()).floor());
            // rel ∈ [0, 2π)
            if rel <= a.len {
                // inside: distance to nearer endpoint
                let d = rel.min(a.len - rel);
                best = best.min(-d);
            } else {
                let gap = (rel - a.len).min(F::two_pi() - rel);
                best = best.min(gap);
            }
        }
        best
    }

    pub fn contains(&self, x: F, tol: F) -> bool {
        self.signed_distance(x) <= tol
    }
}
