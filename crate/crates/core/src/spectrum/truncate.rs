//! Boundary-condition truncations: cutting the infinite operator at two
//! sites yields an isolated unitary block V^{M,N} on [M+1, N] whose
//! eigenvalue counting measures converge to the density of states.
//!
//! A cut at an even site X zeroes η_{X−1..X+2} and replaces columns X, X+1
//! with reflection entries (it, r); a cut at an odd site X zeroes η_X,
//! η_{X+1} and replaces columns X−1..X+2. Either cut decouples the sites
//! ≤ X from the sites ≥ X+1 while keeping the whole operator unitary.

use crate::eig::{self, DenseMat};
use crate::error::{Error, Result};
use crate::model::{build_u, Coefficients, PhaseField, PhaseModel, SiteInterval};
use crate::rng;
use crate::scalar::{cis, C, Real};
use crate::spectrum::measure::SpectralMeasure;
use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

/// Isolated unitary block on sites [M+1, N].
#[derive(Clone, Debug)]
pub struct TruncatedBlock<F: Real> {
    m: i64,
    n: i64,
    mat: DenseMat<F>,
    params: Coefficients<F>,
    /// Effective phases after the zeroed-boundary prescription, on [M+1, N].
    eta_eff: Vec<F>,
}

impl<F: Real> TruncatedBlock<F> {
    pub fn m(&self) -> i64 {
        self.m
    }
    pub fn n(&self) -> i64 {
        self.n
    }
    pub fn dim(&self) -> usize {
        (self.n - self.m) as usize
    }
    pub fn parity(&self) -> (bool, bool) {
        (self.m.rem_euclid(2) == 0, self.n.rem_euclid(2) == 0)
    }
    pub fn params(&self) -> Coefficients<F> {
        self.params
    }
    pub fn dense(&self) -> &DenseMat<F> {
        &self.mat
    }
    pub fn eta_eff(&self, k: i64) -> F {
        assert!(k > self.m && k <= self.n);
        self.eta_eff[(k - self.m - 1) as usize]
    }

    /// Frobenius norm of V*V − I over the whole block.
    pub fn unitarity_defect(&self) -> F {
        let d = self.dim();
        let mut sum = F::zero();
        for i in 0..d {
            for j in 0..d {
                let mut g = C::<F>::zero();
                for k in 0..d {
                    g += self.mat.at(k, i).conj() * self.mat.at(k, j);
                }
                if i == j {
                    g -= C::one();
                }
                sum += g.norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// All eigenphases of the dense block.
    pub fn eigenphases(&self) -> Result<SpectralMeasure<F>> {
        let eigs = eig::eigenvalues(self.mat.clone())?;
        SpectralMeasure::from_eigenvalues(&eigs, F::lit(1e-8))
    }
}

/// Zeroed η sites induced by cuts at M and N.
fn zeroed_sites(m: i64, n: i64) -> Vec<i64> {
    let mut z = Vec::with_capacity(8);
    if m.rem_euclid(2) == 0 {
        z.extend([m - 1, m, m + 1, m + 2]);
    } else {
        z.extend([m, m + 1]);
    }
    if n.rem_euclid(2) == 0 {
        z.extend([n - 1, n, n + 1, n + 2]);
    } else {
        z.extend([n, n + 1]);
    }
    z
}

/// Build V^{M,N} from sampled phases (the phase field must cover [M+1, N]).
pub fn truncate<F: Real>(
    params: Coefficients<F>,
    phases: &PhaseField<F>,
    m: i64,
    n: i64,
) -> Result<TruncatedBlock<F>> {
    if n - m <= 4 {
        return Err(Error::Usage(format!(
            "truncation window [{}, {}] too small: need N − M > 4",
            m + 1,
            n
        )));
    }
    let need = SiteInterval::new(m + 1, n)?;
    if !phases.window().contains_interval(need) {
        return Err(Error::Usage(format!(
            "phase window {:?} does not cover the block sites {:?}",
            phases.window(),
            need
        )));
    }

    let zeroed = zeroed_sites(m, n);
    let eta = |k: i64| -> F {
        if zeroed.contains(&k) {
            F::zero()
        } else {
            phases.eta(k)
        }
    };

    let dim = (n - m) as usize;
    let mut mat = DenseMat::zeros(dim);
    let idx = |site: i64| (site - m - 1) as usize;
    let i = Complex::<F>::i();
    let (r, t) = (params.r(), params.t());
    let (r2, rt, t2) = (params.r2(), params.rt(), params.t2());
    let m_even = m.rem_euclid(2) == 0;
    let n_even = n.rem_euclid(2) == 0;

    for col in m + 1..=n {
        let entries: Vec<(i64, C<F>)> = if m_even && col == m + 1 {
            vec![(m + 1, Complex::new(r, F::zero())), (m + 2, i * t)]
        } else if !m_even && col == m + 1 {
            let e = cis(-eta(m + 2));
            vec![(m + 1, Complex::new(r, F::zero())), (m + 2, i * e * rt), (m + 3, -e * t2)]
        } else if !m_even && col == m + 2 {
            let e = cis(-eta(m + 2));
            vec![(m + 1, i * t), (m + 2, e * r2), (m + 3, i * e * rt)]
        } else if n_even && col == n {
            vec![(n - 1, i * t), (n, Complex::new(r, F::zero()))]
        } else if !n_even && col == n - 1 {
            let e = cis(-eta(n - 1));
            vec![(n - 2, i * e * rt), (n - 1, e * r2), (n, i * t)]
        } else if !n_even && col == n {
            let e = cis(-eta(n - 1));
            vec![(n - 2, -e * t2), (n - 1, i * e * rt), (n, Complex::new(r, F::zero()))]
        } else if col.rem_euclid(2) == 0 {
            let e0 = cis(-eta(col));
            let e1 = cis(-eta(col + 1));
            vec![
                (col - 1, i * e0 * rt),
                (col, e0 * r2),
                (col + 1, i * e1 * rt),
                (col + 2, -e1 * t2),
            ]
        } else {
            let e0 = cis(-eta(col - 1));
            let e1 = cis(-eta(col));
            vec![
                (col - 2, -e0 * t2),
                (col - 1, i * e0 * rt),
                (col, e1 * r2),
                (col + 1, i * e1 * rt),
            ]
        };
        for (row, v) in entries {
            debug_assert!(
                row > m && row <= n,
                "cut failed to decouple: column {col} reaches row {row}"
            );
            if row > m && row <= n {
                mat.set(idx(row), idx(col), v);
            }
        }
    }

    let eta_eff: Vec<F> = (m + 1..=n).map(eta).collect();
    Ok(TruncatedBlock { m, n, mat, params, eta_eff })
}

/// Free-case block (all η = 0) without sampling.
pub fn truncate_free<F: Real>(params: Coefficients<F>, m: i64, n: i64) -> Result<TruncatedBlock<F>> {
    let phases = PhaseModel::free().sample(SiteInterval::new(m, n + 1)?, 0)?;
    truncate(params, &phases, m, n)
}

/// Pool eigenphases of `n_realizations` independent truncations of the same
/// window; deterministic for a fixed seed (ordered reduction).
pub fn pooled_eigenphases<F: Real>(
    model: &PhaseModel<F>,
    params: Coefficients<F>,
    m: i64,
    n: i64,
    n_realizations: usize,
    seed: u64,
) -> Result<SpectralMeasure<F>> {
    if n_realizations == 0 {
        return Err(Error::Usage("need at least one realization".into()));
    }
    let compiled = model.compile()?;
    let window = SiteInterval::new(m, n + 1)?;
    let measures: Vec<Result<SpectralMeasure<F>>> = (0..n_realizations)
        .into_par_iter()
        .map(|ridx| {
            let phases = compiled.sample(window, rng::substream(seed, ridx as u64))?;
            truncate(params, &phases, m, n)?.eigenphases()
        })
        .collect();
    SpectralMeasure::pool(measures.into_iter().collect::<Result<Vec<_>>>()?)
}

/// |tr f(V^{M,N}) − tr χ f(U) χ| for f(z) = z^s, s = 1..s_max. The finite
/// rank of the cut keeps this O(s), uniformly in the window size. `phases`
/// must cover the padded window [M − 2·s_max − 4, N + 2·s_max + 5]
/// (the evolution window plus one slot for the η stencil).
pub fn counting_vs_projected_defects<F: Real>(
    params: Coefficients<F>,
    phases: &PhaseField<F>,
    m: i64,
    n: i64,
    s_max: usize,
) -> Result<Vec<F>> {
    let block = truncate(params, phases, m, n)?;
    let eigs = eig::eigenvalues(block.dense().clone())?;

    let pad = 2 * s_max as i64 + 4;
    let window = SiteInterval::new(m - pad, n + pad + 1)?;
    let u = build_u(params, phases, window)?;
    let dim = u.dimension();
    let lo = window.lo;

    // evolve all basis vectors of the block window simultaneously
    let mut traces = vec![C::<F>::zero(); s_max];
    for j in m + 1..=n {
        let mut v = vec![C::<F>::zero(); dim];
        v[(j - lo) as usize] = C::one();
        for (s, trace) in traces.iter_mut().enumerate() {
            v = u.apply(&v)?;
            let _ = s;
            *trace += v[(j - lo) as usize];
        }
    }

    Ok((1..=s_max)
        .map(|s| {
            let tr_block: C<F> =
                eigs.iter().map(|e| e.powi(s as i32)).fold(C::zero(), |a, b| a + b);
            (tr_block - traces[s - 1]).norm()
        })
        .collect())
}
