//! Monte Carlo Fourier moments of the density of states,
//! m_s = E[⟨φ₀|U^s φ₀⟩ + ⟨φ₁|U^s φ₁⟩]/2, computed exactly per realization
//! on a window wide enough that the orbit never reaches the edge.

use crate::error::{Error, Result};
use crate::model::{build_u, Coefficients, PhaseModel, SiteInterval};
use crate::rng;
use crate::scalar::{C, Real};
use num_traits::{One, Zero};
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct MomentEstimate<F: Real> {
    pub s: usize,
    pub value: C<F>,
    pub stderr: F,
}

/// Estimate m_s for s = 0..=s_max. Each realization builds U on the window
/// [−(2 s_max + 4), 2 s_max + 5], so powers up to s_max stay supported
/// strictly inside and truncation never touches the orbit.
pub fn dos_moments<F: Real>(
    model: &PhaseModel<F>,
    params: Coefficients<F>,
    s_max: usize,
    n_realizations: usize,
    seed: u64,
) -> Result<Vec<MomentEstimate<F>>> {
    if s_max < 1 {
        return Err(Error::Usage("s_max must be at least 1".into()));
    }
    if n_realizations == 0 {
        return Err(Error::Usage("need at least one realization".into()));
    }
    let compiled = model.compile()?;
    let half = 2 * s_max as i64 + 4;
    let window = SiteInterval::new(-half, half + 1)?;
    let idx0 = (-window.lo) as usize;
    let idx1 = idx0 + 1;

    let per: Vec<Vec<C<F>>> = (0..n_realizations)
        .into_par_iter()
        .map(|ridx| -> Result<Vec<C<F>>> {
            let rseed = rng::substream(seed, ridx as u64);
            let phases = compiled.sample(window, rseed)?;
            let u = build_u(params, &phases, SiteInterval::new(window.lo, window.hi - 1)?)?;
            let udim = u.dimension();
            let mut v0 = vec![C::<F>::zero(); udim];
            let mut v1 = vec![C::<F>::zero(); udim];
            v0[idx0] = C::one();
            v1[idx1] = C::one();
            let mut vals = Vec::with_capacity(s_max);
            for _s in 1..=s_max {
                v0 = u.apply(&v0)?;
                v1 = u.apply(&v1)?;
                vals.push((v0[idx0] + v1[idx1]) * F::lit(0.5));
            }
            Ok(vals)
        })
        .collect::<Result<Vec<_>>>()?;

    let nf = F::from_usize(n_realizations).unwrap();
    let mut out = vec![MomentEstimate { s: 0, value: C::one(), stderr: F::zero() }];
    for s in 1..=s_max {
        let mean =
            per.iter().map(|v| v[s - 1]).fold(C::<F>::zero(), |a, b| a + b) / nf;
        let stderr = if n_realizations > 1 {
            let var = per
                .iter()
                .map(|v| (v[s - 1] - mean).norm_sqr())
                .sum::<F>()
                / F::from_usize(n_realizations - 1).unwrap();
            (var / nf).sqrt()
        } else {
            F::zero()
        };
        out.push(MomentEstimate { s, value: mean, stderr });
    }
    Ok(out)
}
