//! Empirical spectral measures on the torus: eigenphase multisets, the
//! integrated density of states, histograms, Fourier moments and
//! Kolmogorov–Smirnov distances.

use crate::error::{Error, Result};
use crate::scalar::{cis, wrap_angle, C, Real};
use num_traits::Zero;
use serde::Serialize;
use std::io::{self, Write};

/// Atomic probability measure given by a sorted multiset of eigenphases in
/// (−π, π], every atom carrying weight 1/len.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure<F: Real> {
    phases: Vec<F>,
}

impl<F: Real> SpectralMeasure<F> {
    pub fn from_phases(mut phases: Vec<F>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::Usage("spectral measure needs at least one atom".into()));
        }
        for p in phases.iter_mut() {
            *p = wrap_angle(*p);
        }
        phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(SpectralMeasure { phases })
    }

    /// From eigenvalues of a unitary matrix; rejects moduli off the circle
    /// by more than `tol`.
    pub fn from_eigenvalues(eigs: &[C<F>], tol: F) -> Result<Self> {
        let mut phases = Vec::with_capacity(eigs.len());
        for e in eigs {
            let dev = (e.norm() - F::one()).abs();
            if dev > tol {
                return Err(Error::Numeric(format!(
                    "eigenvalue modulus deviates from the unit circle by {dev:e}"
                )));
            }
            phases.push(e.arg());
        }
        Self::from_phases(phases)
    }

    /// Pool several measures with equal per-atom weight.
    pub fn pool<I: IntoIterator<Item = SpectralMeasure<F>>>(parts: I) -> Result<Self> {
        let mut all = Vec::new();
        for p in parts {
            all.extend_from_slice(&p.phases);
        }
        Self::from_phases(all)
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[F] {
        &self.phases
    }

    /// Total mass (always 1 by construction).
    pub fn total_mass(&self) -> F {
        F::one()
    }

    /// Right-continuous integrated density of states N(λ) = k((−π, λ]).
    /// The argument is clamped to [−π, π]: N(−π) = 0, N(π) = 1.
    pub fn integrated(&self, lambda: F) -> F {
        let lambda = lambda.min(F::PI()).max(-F::PI());
        let count = self.phases.partition_point(|&p| p <= lambda);
        F::from_usize(count).unwrap() / F::from_usize(self.len()).unwrap()
    }

    /// Fourier moment m_s = Σ w e^{isλ}.
    pub fn fourier_moment(&self, s: i64) -> C<F> {
        let sf = F::from_i64(s).unwrap();
        let sum = self.phases.iter().fold(C::<F>::zero(), |acc, &p| acc + cis(sf * p));
        sum / F::from_usize(self.len()).unwrap()
    }

    /// Kolmogorov–Smirnov distance to a reference CDF on (−π, π]
    /// (the reference must satisfy cdf(−π) = 0, cdf(π) = 1).
    pub fn ks_to(&self, cdf: impl Fn(F) -> F) -> F {
        let n = F::from_usize(self.len()).unwrap();
        let mut worst = F::zero();
        for (i, &p) in self.phases.iter().enumerate() {
            let c0 = cdf(p);
            let lo = F::from_usize(i).unwrap() / n;
            let hi = F::from_usize(i + 1).unwrap() / n;
            worst = worst.max((c0 - lo).abs()).max((hi - c0).abs());
        }
        worst
    }

    /// KS distance to the uniform measure dλ/2π.
    pub fn ks_uniform(&self) -> F {
        self.ks_to(|l| (l + F::PI()) / F::two_pi())
    }

    /// Two-sample Kolmogorov distance.
    pub fn ks_between(&self, other: &SpectralMeasure<F>) -> F {
        let mut worst = F::zero();
        for &p in &self.phases {
            worst = worst.max((self.integrated(p) - other.integrated(p)).abs());
        }
        for &p in &other.phases {
            worst = worst.max((self.integrated(p) - other.integrated(p)).abs());
        }
        worst
    }

    /// Histogram over `bins` uniform cells of (−π, π].
    pub fn histogram(&self, bins: usize) -> Histogram {
        let mut counts = vec![0usize; bins];
        let nb = F::from_usize(bins).unwrap();
        for &p in &self.phases {
            let frac = (p + F::PI()) / F::two_pi();
            let mut idx = (frac * nb).to_usize().unwrap_or(0);
            if idx >= bins {
                idx = bins - 1;
            }
            counts[idx] += 1;
        }
        Histogram { counts, total: self.len() }
    }

    /// CSV rows `phase,weight`, with a claim header line.
    pub fn write_csv<W: Write>(&self, w: &mut W, claim: &str) -> io::Result<()> {
        writeln!(w, "# claim: {claim}")?;
        writeln!(w, "phase,weight")?;
        let weight = 1.0 / self.len() as f64;
        for &p in &self.phases {
            writeln!(w, "{:.17e},{:.17e}", p.to_f64().unwrap(), weight)?;
        }
        Ok(())
    }

    /// JSON summary: atom count, KS distance to uniform, Fourier moments,
    /// histogram occupancies.
    pub fn summary(&self, moment_orders: usize, bins: usize) -> MeasureSummary {
        let hist = self.histogram(bins);
        MeasureSummary {
            n_atoms: self.len(),
            ks_uniform: self.ks_uniform().to_f64().unwrap(),
            moments: (0..=moment_orders)
                .map(|s| {
                    let m = self.fourier_moment(s as i64);
                    MomentJson {
                        s,
                        re: m.re.to_f64().unwrap(),
                        im: m.im.to_f64().unwrap(),
                    }
                })
                .collect(),
            histogram: hist.densities::<f64>(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Histogram {
    pub counts: Vec<usize>,
    pub total: usize,
}

impl Histogram {
    /// Per-bin density relative to the flat measure (flat case → 1).
    pub fn densities<F: Real>(&self) -> Vec<F> {
        let bins = F::from_usize(self.counts.len()).unwrap();
        let total = F::from_usize(self.total).unwrap();
        self.counts
            .iter()
            .map(|&c0| F::from_usize(c0).unwrap() / total * bins)
            .collect()
    }

    /// Largest deviation of the per-bin mass from 1/bins.
    pub fn flatness_defect<F: Real>(&self) -> F {
        let bins = F::from_usize(self.counts.len()).unwrap();
        let total = F::from_usize(self.total).unwrap();
        self.counts
            .iter()
            .map(|&c0| (F::from_usize(c0).unwrap() / total - F::one() / bins).abs())
            .fold(F::zero(), F::max)
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct MomentJson {
    pub s: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Serialize, Clone, Debug)]
pub struct MeasureSummary {
    pub n_atoms: usize,
    pub ks_uniform: f64,
    pub moments: Vec<MomentJson>,
    pub histogram: Vec<f64>,
}
