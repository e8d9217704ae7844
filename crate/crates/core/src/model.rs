//! The random five-diagonal unitary U_ω on ℓ²(ℤ), its deterministic free
//! version U₀, phase sampling, and the factorization U ≃ V⁻¹ D S₀ V into a
//! diagonal random phase operator times a fixed five-diagonal unitary.
//!
//! In the canonical basis {φ_k} the operator acts columnwise as
//!
//! ```text
//! U φ_{2k}   = irt e^{-iη_{2k}}   φ_{2k-1} + r² e^{-iη_{2k}}   φ_{2k}
//!            + irt e^{-iη_{2k+1}} φ_{2k+1} - t² e^{-iη_{2k+1}} φ_{2k+2}
//! U φ_{2k+1} = -t² e^{-iη_{2k}}   φ_{2k-1} + irt e^{-iη_{2k}}  φ_{2k}
//!            + r²  e^{-iη_{2k+1}} φ_{2k+1} + irt e^{-iη_{2k+1}} φ_{2k+2}
//! ```
//!
//! with reflection/transmission weights r² + t² = 1 and torus phases
//! η_k = θ_k + θ_{k-1} + α_k - α_{k-1} built from i.i.d. fields (θ_k, α_k).
//! An alternative Anderson-like model draws the η_k themselves i.i.d.

use crate::error::{Error, Result};
use crate::rng::{self, FieldTag};
use crate::scalar::{c, cis, wrap_angle, C, Real};
use num_complex::Complex;
use num_traits::{One, Zero};
use std::io::{self, Write};

/// Reflection and transmission coefficients with r² + t² = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients<F: Real> {
    r: F,
    t: F,
}

impl<F: Real> Coefficients<F> {
    pub fn new(r: F, t: F) -> Result<Self> {
        if !(r > F::zero() && r < F::one()) || !(t > F::zero() && t < F::one()) {
            return Err(Error::Config(format!(
                "coefficients must lie strictly inside (0,1), got r={r}, t={t}"
            )));
        }
        let tol = F::lit(1e-12).max(F::epsilon() * F::lit(32.0));
        if ((r * r + t * t) - F::one()).abs() > tol {
            return Err(Error::Config(format!(
                "r^2 + t^2 must equal 1, got {}",
                r * r + t * t
            )));
        }
        Ok(Coefficients { r, t })
    }

    /// Derive t from r through r² + t² = 1.
    pub fn from_r(r: F) -> Result<Self> {
        if !(r > F::zero() && r < F::one()) {
            return Err(Error::Config(format!("r must lie strictly inside (0,1), got {r}")));
        }
        Ok(Coefficients { r, t: (F::one() - r * r).sqrt() })
    }

    /// r = t = 1/√2.
    pub fn balanced() -> Self {
        let h = F::lit(0.5).sqrt();
        Coefficients { r: h, t: h }
    }

    pub fn r(&self) -> F {
        self.r
    }
    pub fn t(&self) -> F {
        self.t
    }
    pub fn r2(&self) -> F {
        self.r * self.r
    }
    pub fn t2(&self) -> F {
        self.t * self.t
    }
    pub fn rt(&self) -> F {
        self.r * self.t
    }
    /// τ = t/r.
    pub fn tau(&self) -> F {
        self.t / self.r
    }
    /// Half-aperture of the free band, arccos(r² − t²).
    pub fn band_edge(&self) -> F {
        (self.r2() - self.t2()).acos()
    }
}

/// Inclusive interval of lattice sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiteInterval {
    pub lo: i64,
    pub hi: i64,
}

impl SiteInterval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Usage(format!("empty site interval [{lo}, {hi}]")));
        }
        Ok(SiteInterval { lo, hi })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: i64) -> bool {
        k >= self.lo && k <= self.hi
    }

    pub fn contains_interval(&self, other: SiteInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

/// Probability distribution on the torus (−π, π].
#[derive(Clone, Debug, PartialEq)]
pub enum DistributionSpec<F: Real> {
    UniformTorus,
    PointMass(F),
    UniformArc { center: F, half_width: F },
    /// Density with prescribed Fourier coefficients f̂(n) = coeffs[n-1] for
    /// n ≥ 1 (f̂(-n) = conj f̂(n), f̂(0) = 1), subject to |f̂(n)| ≤ A e^{-Bn}.
    FourierDensity { amp: F, decay: F, coeffs: Vec<C<F>> },
}

pub const FOURIER_GRID: usize = 4096;

impl<F: Real> DistributionSpec<F> {
    pub fn validate(&self) -> Result<()> {
        match self {
            DistributionSpec::UniformTorus | DistributionSpec::PointMass(_) => Ok(()),
            DistributionSpec::UniformArc { half_width, .. } => {
                if *half_width > F::zero() && *half_width <= F::PI() {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "arc half-width must lie in (0, π], got {half_width}"
                    )))
                }
            }
            DistributionSpec::FourierDensity { amp, decay, coeffs } => {
                if *amp < F::one() {
                    return Err(Error::Config(format!(
                        "Fourier density amplitude must satisfy A >= 1 (f̂(0) = 1), got {amp}"
                    )));
                }
                if *decay <= F::zero() {
                    return Err(Error::Config(format!(
                        "Fourier decay rate must be positive, got {decay}"
                    )));
                }
                for (i, cf) in coeffs.iter().enumerate() {
                    let n = F::from_usize(i + 1).unwrap();
                    if cf.norm() > *amp * (-*decay * n).exp() + F::lit(1e-12) {
                        return Err(Error::Config(format!(
                            "|f̂({})| = {} violates A e^{{-Bn}} = {}",
                            i + 1,
                            cf.norm(),
                            *amp * (-*decay * n).exp()
                        )));
                    }
                }
                // density must be nonnegative on the validation grid
                let min = (0..FOURIER_GRID)
                    .map(|i| {
                        let x = F::two_pi() * F::from_usize(i).unwrap()
                            / F::from_usize(FOURIER_GRID).unwrap()
                            - F::PI();
                        fourier_density_value(coeffs, x)
                    })
                    .fold(F::infinity(), F::min);
                if min < -F::lit(1e-9) {
                    return Err(Error::Config(format!(
                        "Fourier density is negative on the grid (min {min})"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Exact characteristic function E e^{inX}.
    pub fn char_fn(&self, n: i64) -> C<F> {
        if n == 0 {
            return C::one();
        }
        match self {
            DistributionSpec::UniformTorus => C::zero(),
            DistributionSpec::PointMass(a) => cis(F::from_i64(n).unwrap() * *a),
            DistributionSpec::UniformArc { center, half_width } => {
                let nf = F::from_i64(n).unwrap();
                let s = (nf * *half_width).sin() / (nf * *half_width);
                cis(nf * *center) * s
            }
            DistributionSpec::FourierDensity { coeffs, .. } => {
                let idx = n.unsigned_abs() as usize;
                if idx == 0 || idx > coeffs.len() {
                    C::zero()
                } else if n > 0 {
                    coeffs[idx - 1]
                } else {
                    coeffs[idx - 1].conj()
                }
            }
        }
    }

    /// Support as a union of closed arcs.
    pub fn support(&self) -> crate::arcs::ArcUnion<F> {
        use crate::arcs::ArcUnion;
        match self {
            DistributionSpec::UniformTorus => ArcUnion::full(),
            // analytic density: zeros are isolated, the support is the torus
            DistributionSpec::FourierDensity { .. } => ArcUnion::full(),
            DistributionSpec::PointMass(a) => ArcUnion::point(*a),
            DistributionSpec::UniformArc { center, half_width } => {
                ArcUnion::from_arc(*center, *half_width)
            }
        }
    }

    pub(crate) fn compile(&self) -> Result<CompiledDist<F>> {
        self.validate()?;
        Ok(match self {
            DistributionSpec::UniformTorus => CompiledDist::Uniform,
            DistributionSpec::PointMass(a) => CompiledDist::Point(wrap_angle(*a)),
            DistributionSpec::UniformArc { center, half_width } => {
                CompiledDist::Arc { center: *center, half_width: *half_width }
            }
            DistributionSpec::FourierDensity { coeffs, .. } => {
                // piecewise-linear CDF on a uniform grid over (−π, π]
                let n = FOURIER_GRID;
                let nf = F::from_usize(n).unwrap();
                let step = F::two_pi() / nf;
                let dens: Vec<F> = (0..=n)
                    .map(|i| {
                        let x = -F::PI() + step * F::from_usize(i).unwrap();
                        fourier_density_value(coeffs, x).max(F::zero())
                    })
                    .collect();
                let mut cdf = Vec::with_capacity(n + 1);
                let mut acc = F::zero();
                cdf.push(F::zero());
                for i in 0..n {
                    acc += (dens[i] + dens[i + 1]) * step * F::lit(0.5);
                    cdf.push(acc);
                }
                let total = *cdf.last().unwrap();
                if total <= F::zero() {
                    return Err(Error::Config("Fourier density integrates to zero".into()));
                }
                for v in cdf.iter_mut() {
                    *v /= total;
                }
                CompiledDist::InverseCdf { cdf, step }
            }
        })
    }
}

/// Density value (with respect to dη) of a Fourier-coefficient distribution.
pub fn fourier_density_value<F: Real>(coeffs: &[C<F>], x: F) -> F {
    let mut s = F::one();
    for (i, cf) in coeffs.iter().enumerate() {
        let n = F::from_usize(i + 1).unwrap();
        // f̂(n) e^{-inx} + conj pair
        s += F::lit(2.0) * (*cf * cis(-n * x)).re;
    }
    s / F::two_pi()
}

#[derive(Clone, Debug)]
pub(crate) enum CompiledDist<F: Real> {
    Uniform,
    Point(F),
    Arc { center: F, half_width: F },
    InverseCdf { cdf: Vec<F>, step: F },
}

impl<F: Real> CompiledDist<F> {
    /// Map a uniform u ∈ [0,1) draw to a torus sample.
    pub fn sample(&self, u: F) -> F {
        match self {
            CompiledDist::Uniform => wrap_angle(F::two_pi() * u),
            CompiledDist::Point(a) => *a,
            CompiledDist::Arc { center, half_width } => {
                wrap_angle(*center + (u + u - F::one()) * *half_width)
            }
            CompiledDist::InverseCdf { cdf, step } => {
                // first index with cdf[idx] >= u
                let idx = cdf.partition_point(|&v| v < u).max(1).min(cdf.len() - 1);
                let (c0, c1) = (cdf[idx - 1], cdf[idx]);
                let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { F::lit(0.5) };
                let x = -F::PI() + *step * (F::from_usize(idx - 1).unwrap() + frac);
                wrap_angle(x)
            }
        }
    }
}

/// How the phases η_k are generated.
#[derive(Clone, Debug, PartialEq)]
pub enum PhaseModel<F: Real> {
    /// η_k = θ_k + θ_{k-1} + α_k - α_{k-1} with i.i.d. θ ~ dist_theta,
    /// α ~ dist_alpha.
    TwoField { theta: DistributionSpec<F>, alpha: DistributionSpec<F> },
    /// Anderson-like variant: the η_k themselves are drawn i.i.d.
    IidEta { eta: DistributionSpec<F> },
}

impl<F: Real> PhaseModel<F> {
    pub fn uniform() -> Self {
        PhaseModel::TwoField {
            theta: DistributionSpec::UniformTorus,
            alpha: DistributionSpec::UniformTorus,
        }
    }

    /// All phases identically zero (the free operator's disorder model).
    pub fn free() -> Self {
        PhaseModel::TwoField {
            theta: DistributionSpec::PointMass(F::zero()),
            alpha: DistributionSpec::PointMass(F::zero()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PhaseModel::TwoField { theta, alpha } => {
                theta.validate()?;
                alpha.validate()
            }
            PhaseModel::IidEta { eta } => eta.validate(),
        }
    }

    pub fn compile(&self) -> Result<CompiledModel<F>> {
        let kind = match self {
            PhaseModel::TwoField { theta, alpha } => CompiledKind::TwoField {
                theta: theta.compile()?,
                alpha: alpha.compile()?,
            },
            PhaseModel::IidEta { eta } => CompiledKind::IidEta { eta: eta.compile()? },
        };
        Ok(CompiledModel { kind })
    }

    /// Sample a phase field whose η coverage is exactly `window`.
    pub fn sample(&self, window: SiteInterval, seed: u64) -> Result<PhaseField<F>> {
        self.compile()?.sample(window, seed)
    }
}

/// Compiled sampler; `eta_at` is a pure function of (seed, site).
#[derive(Clone, Debug)]
pub struct CompiledModel<F: Real> {
    kind: CompiledKind<F>,
}

#[derive(Clone, Debug)]
enum CompiledKind<F: Real> {
    TwoField { theta: CompiledDist<F>, alpha: CompiledDist<F> },
    IidEta { eta: CompiledDist<F> },
}

impl<F: Real> CompiledModel<F> {
    fn theta_at(theta: &CompiledDist<F>, seed: u64, k: i64) -> F {
        theta.sample(rng::unit(seed, k, FieldTag::Theta))
    }

    fn alpha_at(alpha: &CompiledDist<F>, seed: u64, k: i64) -> F {
        alpha.sample(rng::unit(seed, k, FieldTag::Alpha))
    }

    /// The phase η_k of realization `seed` (window-free, counter-based).
    pub fn eta_at(&self, seed: u64, k: i64) -> F {
        match &self.kind {
            CompiledKind::TwoField { theta, alpha } => {
                let th = Self::theta_at(theta, seed, k) + Self::theta_at(theta, seed, k - 1);
                let al = Self::alpha_at(alpha, seed, k) - Self::alpha_at(alpha, seed, k - 1);
                wrap_angle(th + al)
            }
            CompiledKind::IidEta { eta } => eta.sample(rng::unit(seed, k, FieldTag::Eta)),
        }
    }

    pub fn sample(&self, window: SiteInterval, seed: u64) -> Result<PhaseField<F>> {
        let lo = window.lo;
        let n = window.len();
        match &self.kind {
            CompiledKind::TwoField { theta, alpha } => {
                let theta_v: Vec<F> =
                    (lo - 1..=window.hi).map(|k| Self::theta_at(theta, seed, k)).collect();
                let alpha_v: Vec<F> =
                    (lo - 1..=window.hi).map(|k| Self::alpha_at(alpha, seed, k)).collect();
                let eta: Vec<F> = (0..n)
                    .map(|i| {
                        wrap_angle(
                            theta_v[i + 1] + theta_v[i] + alpha_v[i + 1] - alpha_v[i],
                        )
                    })
                    .collect();
                Ok(PhaseField { lo, theta: theta_v, alpha: alpha_v, eta })
            }
            CompiledKind::IidEta { eta } => {
                let eta_v: Vec<F> =
                    window.iter().map(|k| eta.sample(rng::unit(seed, k, FieldTag::Eta))).collect();
                // back-solve θ so that the defining relation still holds (α ≡ 0)
                let mut theta_v = Vec::with_capacity(n + 1);
                theta_v.push(F::zero());
                for i in 0..n {
                    let prev = theta_v[i];
                    theta_v.push(wrap_angle(eta_v[i] - prev));
                }
                let alpha_v = vec![F::zero(); n + 1];
                Ok(PhaseField { lo, theta: theta_v, alpha: alpha_v, eta: eta_v })
            }
        }
    }
}

/// Convenience wrapper for the two-field sampler.
pub fn sample_phases<F: Real>(
    dist_theta: &DistributionSpec<F>,
    dist_alpha: &DistributionSpec<F>,
    window: SiteInterval,
    seed: u64,
) -> Result<PhaseField<F>> {
    PhaseModel::TwoField { theta: dist_theta.clone(), alpha: dist_alpha.clone() }
        .sample(window, seed)
}

/// Realized torus phases over a site window. η_k is stored for every k in
/// the window; θ and α additionally cover the site window.lo − 1 so that the
/// defining relation can be checked on the whole window.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseField<F: Real> {
    lo: i64,
    theta: Vec<F>, // sites lo-1 ..= hi
    alpha: Vec<F>,
    eta: Vec<F>, // sites lo ..= hi
}

impl<F: Real> PhaseField<F> {
    /// η coverage.
    pub fn window(&self) -> SiteInterval {
        SiteInterval { lo: self.lo, hi: self.lo + self.eta.len() as i64 - 1 }
    }

    pub fn eta(&self, k: i64) -> F {
        assert!(self.window().contains(k), "eta site {k} outside window {:?}", self.window());
        self.eta[(k - self.lo) as usize]
    }

    pub fn theta(&self, k: i64) -> F {
        assert!(k >= self.lo - 1 && k <= self.window().hi, "theta site {k} out of range");
        self.theta[(k - self.lo + 1) as usize]
    }

    pub fn alpha(&self, k: i64) -> F {
        assert!(k >= self.lo - 1 && k <= self.window().hi, "alpha site {k} out of range");
        self.alpha[(k - self.lo + 1) as usize]
    }

    /// Max deviation of the stored η from θ_k + θ_{k-1} + α_k - α_{k-1} mod 2π.
    pub fn eta_defect(&self) -> F {
        self.window()
            .iter()
            .map(|k| {
                let expect = wrap_angle(
                    self.theta(k) + self.theta(k - 1) + self.alpha(k) - self.alpha(k - 1),
                );
                wrap_angle(self.eta(k) - expect).abs()
            })
            .fold(F::zero(), F::max)
    }

    /// Phase field of the translated realization: site k reads the original
    /// values at k + shift. The lattice translation by 2j sites corresponds
    /// to shift = 2j.
    pub fn shifted(&self, shift: i64) -> PhaseField<F> {
        PhaseField {
            lo: self.lo - shift,
            theta: self.theta.clone(),
            alpha: self.alpha.clone(),
            eta: self.eta.clone(),
        }
    }

    /// Columnar debug dump: `site theta alpha eta`.
    pub fn write_columnar<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# site theta alpha eta")?;
        for k in self.window().iter() {
            writeln!(w, "{} {:e} {:e} {:e}", k, self.theta(k), self.alpha(k), self.eta(k))?;
        }
        Ok(())
    }
}

/// Five-diagonal unitary restricted to a window of sites: the rows hold the
/// entries of χ U χ, so rows near the window edge are incomplete and
/// unitarity is exact only on interior columns.
#[derive(Clone, Debug)]
pub struct BandUnitary<F: Real> {
    window: SiteInterval,
    rows: Vec<Vec<(i64, C<F>)>>,
    params: Coefficients<F>,
    eta: Vec<F>, // snapshot on window.lo ..= window.hi + 1
}

#[derive(Clone, Copy)]
enum EntryKind {
    IRt,
    R2,
    NegT2,
}

fn entry_value<F: Real>(kind: EntryKind, eta: F, p: &Coefficients<F>) -> C<F> {
    let e = cis(-eta);
    match kind {
        EntryKind::IRt => Complex::<F>::i() * e * p.rt(),
        EntryKind::R2 => e * p.r2(),
        EntryKind::NegT2 => -e * p.t2(),
    }
}

/// Stencil of column `col`: (row, phase site, entry kind). Even columns 2k
/// carry e^{-iη_{2k}} on rows 2k-1, 2k and e^{-iη_{2k+1}} below; odd
/// columns 2k+1 carry e^{-iη_{2k}} above and e^{-iη_{2k+1}} on rows
/// 2k+1, 2k+2.
fn column_stencil(col: i64) -> [(i64, i64, EntryKind); 4] {
    if col.rem_euclid(2) == 0 {
        [
            (col - 1, col, EntryKind::IRt),
            (col, col, EntryKind::R2),
            (col + 1, col + 1, EntryKind::IRt),
            (col + 2, col + 1, EntryKind::NegT2),
        ]
    } else {
        [
            (col - 2, col - 1, EntryKind::NegT2),
            (col - 1, col - 1, EntryKind::IRt),
            (col, col, EntryKind::R2),
            (col + 1, col, EntryKind::IRt),
        ]
    }
}

/// Entries of the column `col` of U as (row, value) pairs; `eta` must be
/// defined at col and col ± 1 as required by the parity of col.
fn column_entries<F: Real>(
    col: i64,
    eta: &impl Fn(i64) -> F,
    p: &Coefficients<F>,
) -> [(i64, C<F>); 4] {
    column_stencil(col).map(|(row, site, kind)| (row, entry_value(kind, eta(site), p)))
}

fn build_from<F: Real>(
    params: Coefficients<F>,
    window: SiteInterval,
    eta: impl Fn(i64) -> F,
) -> BandUnitary<F> {
    let n = window.len();
    let mut rows: Vec<Vec<(i64, C<F>)>> = vec![Vec::with_capacity(4); n];
    for col in window.iter() {
        // entries falling outside the window are dropped before their phase
        // is evaluated, so η is only ever read on the window itself
        for (row, site, kind) in column_stencil(col) {
            if window.contains(row) {
                rows[(row - window.lo) as usize]
                    .push((col, entry_value(kind, eta(site), &params)));
            }
        }
    }
    for row in rows.iter_mut() {
        row.sort_by_key(|&(col, _)| col);
    }
    let eta_snapshot = window.iter().map(eta).collect();
    BandUnitary { window, rows, params, eta: eta_snapshot }
}

/// Build U_ω on `window` from sampled phases. The phase field must cover
/// the window itself; entries that would reference phases outside are the
/// ones cut off by the projection anyway.
pub fn build_u<F: Real>(
    params: Coefficients<F>,
    phases: &PhaseField<F>,
    window: SiteInterval,
) -> Result<BandUnitary<F>> {
    let need = window;
    if !phases.window().contains_interval(need) {
        return Err(Error::Usage(format!(
            "phase window {:?} does not cover required η sites {:?}",
            phases.window(),
            need
        )));
    }
    Ok(build_from(params, window, |k| phases.eta(k)))
}

/// The free operator U₀ (all η = 0) on `window`.
pub fn build_free<F: Real>(params: Coefficients<F>, window: SiteInterval) -> BandUnitary<F> {
    build_from(params, window, |_| F::zero())
}

impl<F: Real> BandUnitary<F> {
    pub fn window(&self) -> SiteInterval {
        self.window
    }

    pub fn dimension(&self) -> usize {
        self.window.len()
    }

    pub fn params(&self) -> Coefficients<F> {
        self.params
    }

    pub fn rows(&self) -> &[Vec<(i64, C<F>)>] {
        &self.rows
    }

    pub fn eta_snapshot(&self, k: i64) -> F {
        assert!(self.window.contains(k));
        self.eta[(k - self.window.lo) as usize]
    }

    pub fn entry(&self, row: i64, col: i64) -> C<F> {
        if !self.window.contains(row) || !self.window.contains(col) {
            return C::zero();
        }
        self.rows[(row - self.window.lo) as usize]
            .iter()
            .find(|&&(c0, _)| c0 == col)
            .map(|&(_, v)| v)
            .unwrap_or_else(C::zero)
    }

    /// Sparse matvec. `v` is indexed by window sites.
    pub fn apply(&self, v: &[C<F>]) -> Result<Vec<C<F>>> {
        if v.len() != self.dimension() {
            return Err(Error::Usage(format!(
                "vector length {} does not match window dimension {}",
                v.len(),
                self.dimension()
            )));
        }
        let lo = self.window.lo;
        Ok(self
            .rows
            .iter()
            .map(|row| {
                row.iter().fold(C::zero(), |acc, &(col, a)| acc + a * v[(col - lo) as usize])
            })
            .collect())
    }

    /// Columns of U whose full stencil lies inside the window.
    pub fn complete_columns(&self) -> impl Iterator<Item = i64> + '_ {
        let w = self.window;
        w.iter().filter(move |&col| {
            if col.rem_euclid(2) == 0 {
                col > w.lo && col + 2 <= w.hi
            } else {
                col - 2 >= w.lo && col < w.hi
            }
        })
    }

    /// Frobenius norm of (U*U − I) restricted to complete columns; an upper
    /// bound on the interior operator-norm defect.
    pub fn unitarity_defect(&self) -> F {
        let cols: Vec<i64> = self.complete_columns().collect();
        let eta = |k: i64| self.eta_snapshot(k);
        let mut sum = F::zero();
        for (ia, &ca) in cols.iter().enumerate() {
            for &cb in cols.iter().skip(ia) {
                if cb - ca > 4 {
                    break;
                }
                let ea = column_entries(ca, &eta, &self.params);
                let eb = column_entries(cb, &eta, &self.params);
                let mut g = C::<F>::zero();
                for (ra, va) in ea {
                    for (rb, vb) in eb {
                        if ra == rb {
                            g += va.conj() * vb;
                        }
                    }
                }
                if ca == cb {
                    g -= C::one();
                }
                let w = if ca == cb { F::one() } else { F::lit(2.0) };
                sum += w * g.norm_sqr();
            }
        }
        sum.sqrt()
    }

    pub fn to_dense(&self) -> Vec<C<F>> {
        let n = self.dimension();
        let lo = self.window.lo;
        let mut a = vec![C::zero(); n * n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(col, v) in row {
                a[i * n + (col - lo) as usize] = v;
            }
        }
        a
    }
}

/// Result of the factorization χ U χ = V* D S₀ V on an aligned window
/// (window.lo odd, window.hi even so the 2×2 rotation blocks tile exactly).
#[derive(Clone, Debug)]
pub struct Factorization<F: Real> {
    /// Diagonal entries e^{-iη_k}, k over the window.
    pub d: Vec<C<F>>,
    /// Deterministic five-diagonal unitary factor (real entries).
    pub s0: BandUnitary<F>,
    /// Direct sum of [[ir, t], [-it, r]] blocks on odd-anchored pairs.
    pub v: BandUnitary<F>,
    window: SiteInterval,
}

/// Factor U_ω into diagonal phases times the fixed operator S₀, conjugated
/// by the block rotation V.
pub fn factorize<F: Real>(u: &BandUnitary<F>) -> Result<Factorization<F>> {
    let w = u.window();
    if w.lo.rem_euclid(2) != 1 || w.hi.rem_euclid(2) != 0 {
        return Err(Error::Usage(format!(
            "factorization window must start at an odd site and end at an even site, got {:?}",
            w
        )));
    }
    let params = u.params();
    let d: Vec<C<F>> = w.iter().map(|k| cis(-u.eta_snapshot(k))).collect();

    // S₀ columns: even col 2k -> (2k-2, -t²), (2k-1, -rt), (2k, r²), (2k+1, -rt);
    //             odd col 2k+1 -> (2k, rt), (2k+1, r²), (2k+2, rt), (2k+3, -t²).
    let (r2, rt, t2) = (params.r2(), params.rt(), params.t2());
    let re = |x: F| c(x, F::zero());
    let mut s0_rows: Vec<Vec<(i64, C<F>)>> = vec![Vec::with_capacity(4); w.len()];
    let push = |row: i64, col: i64, v: C<F>, rows: &mut Vec<Vec<(i64, C<F>)>>| {
        if w.contains(row) {
            rows[(row - w.lo) as usize].push((col, v));
        }
    };
    for col in w.iter() {
        if col.rem_euclid(2) == 0 {
            push(col - 2, col, re(-t2), &mut s0_rows);
            push(col - 1, col, re(-rt), &mut s0_rows);
            push(col, col, re(r2), &mut s0_rows);
            push(col + 1, col, re(-rt), &mut s0_rows);
        } else {
            push(col - 1, col, re(rt), &mut s0_rows);
            push(col, col, re(r2), &mut s0_rows);
            push(col + 1, col, re(rt), &mut s0_rows);
            push(col + 2, col, re(-t2), &mut s0_rows);
        }
    }
    for row in s0_rows.iter_mut() {
        row.sort_by_key(|&(c0, _)| c0);
    }
    let s0 = BandUnitary { window: w, rows: s0_rows, params, eta: vec![F::zero(); w.len()] };

    // V blocks on pairs (2j-1, 2j): V e_{2j-1} = ir e_{2j-1} - it e_{2j},
    // V e_{2j} = t e_{2j-1} + r e_{2j}.
    let i = Complex::<F>::i();
    let mut v_rows: Vec<Vec<(i64, C<F>)>> = vec![Vec::with_capacity(2); w.len()];
    for col in w.iter() {
        if col.rem_euclid(2) == 1 {
            v_rows[(col - w.lo) as usize].push((col, i * params.r()));
            v_rows[(col + 1 - w.lo) as usize].push((col, -i * params.t()));
        } else {
            v_rows[(col - 1 - w.lo) as usize].push((col, re(params.t())));
            v_rows[(col - w.lo) as usize].push((col, re(params.r())));
        }
    }
    for row in v_rows.iter_mut() {
        row.sort_by_key(|&(c0, _)| c0);
    }
    let v = BandUnitary { window: w, rows: v_rows, params, eta: vec![F::zero(); w.len()] };

    Ok(Factorization { d, s0, v, window: w })
}

impl<F: Real> Factorization<F> {
    /// Dense V* D S₀ V on the window.
    pub fn reconstruct(&self) -> Vec<C<F>> {
        let n = self.window.len();
        let s0 = self.s0.to_dense();
        let v = self.v.to_dense();
        // m1 = D * S0 * V
        let mut sv = vec![C::<F>::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = s0[i * n + k];
                if a.norm_sqr() == F::zero() {
                    continue;
                }
                for j in 0..n {
                    sv[i * n + j] += a * v[k * n + j];
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                sv[i * n + j] *= self.d[i];
            }
        }
        // result = V^* * sv
        let mut out = vec![C::<F>::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = v[k * n + i].conj();
                if a.norm_sqr() == F::zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * sv[k * n + j];
                }
            }
        }
        out
    }

    /// Frobenius norm of χUχ − V* D S₀ V over the whole window.
    pub fn residual(&self, u: &BandUnitary<F>) -> F {
        let n = self.window.len();
        let rec = self.reconstruct();
        let dense = u.to_dense();
        let mut sum = F::zero();
        for idx in 0..n * n {
            sum += (dense[idx] - rec[idx]).norm_sqr();
        }
        sum.sqrt()
    }
}

/// Characteristic-function estimate for one Fourier order.
#[derive(Clone, Debug)]
pub struct CharFnEstimate<F: Real> {
    pub order: i64,
    pub value: C<F>,
    pub stderr: F,
}

/// Joint estimate over consecutive pairs (η_k, η_{k+1}).
#[derive(Clone, Debug)]
pub struct JointCharEstimate<F: Real> {
    pub orders: (i64, i64),
    pub value: C<F>,
    pub stderr: F,
}

#[derive(Clone, Debug)]
pub struct CharFnReport<F: Real> {
    pub n_samples: usize,
    pub singles: Vec<CharFnEstimate<F>>,
    pub joints: Vec<JointCharEstimate<F>>,
}

/// Empirical characteristic function Φ̂_η(n) = mean e^{inη} over the pooled
/// fields, with batch-means standard errors, plus joint estimates over
/// consecutive site pairs for the independence check.
pub fn phase_char_fn<F: Real>(
    fields: &[PhaseField<F>],
    orders: &[i64],
) -> Result<CharFnReport<F>> {
    let n_samples: usize = fields.iter().map(|f| f.window().len()).sum();
    if fields.is_empty() || n_samples == 0 {
        return Err(Error::Usage("phase_char_fn needs a nonempty sample set".into()));
    }
    if n_samples < 1000 {
        return Err(Error::Usage(format!(
            "phase_char_fn needs at least 10^3 samples, got {n_samples}"
        )));
    }

    let etas: Vec<F> = fields.iter().flat_map(|f| f.window().iter().map(|k| f.eta(k))).collect();
    let n_batches = if fields.len() >= 8 { fields.len() } else { 8 };

    let batch_stats = |values: &dyn Fn(usize) -> C<F>, count: usize| -> (C<F>, F) {
        let mut means = Vec::with_capacity(n_batches);
        let per = count.div_ceil(n_batches);
        let mut total = C::<F>::zero();
        for b in 0..n_batches {
            let lo = b * per;
            let hi = ((b + 1) * per).min(count);
            if lo >= hi {
                continue;
            }
            let mut s = C::<F>::zero();
            for i in lo..hi {
                s += values(i);
            }
            total += s;
            means.push(s / F::from_usize(hi - lo).unwrap());
        }
        let mean = total / F::from_usize(count).unwrap();
        let b = means.len();
        let stderr = if b > 1 {
            let mb = means.iter().fold(C::<F>::zero(), |a, &x| a + x) / F::from_usize(b).unwrap();
            let var = means.iter().map(|&m| (m - mb).norm_sqr()).sum::<F>()
                / F::from_usize(b - 1).unwrap();
            (var / F::from_usize(b).unwrap()).sqrt()
        } else {
            F::zero()
        };
        (mean, stderr)
    };

    let singles = orders
        .iter()
        .map(|&n| {
            let nf = F::from_i64(n).unwrap();
            let f = |i: usize| cis(nf * etas[i]);
            let (value, stderr) = batch_stats(&f, etas.len());
            CharFnEstimate { order: n, value, stderr }
        })
        .collect();

    // consecutive pairs within each field
    let pairs: Vec<(F, F)> = fields
        .iter()
        .flat_map(|f| {
            let w = f.window();
            (w.lo..w.hi).map(move |k| (f.eta(k), f.eta(k + 1)))
        })
        .collect();
    let mut joints = Vec::new();
    if !pairs.is_empty() {
        for &n in orders {
            for &m in orders {
                let (nf, mf) = (F::from_i64(n).unwrap(), F::from_i64(m).unwrap());
                let f = |i: usize| {
                    let (a, b) = pairs[i];
                    cis(nf * a + mf * b)
                };
                let (value, stderr) = batch_stats(&f, pairs.len());
                joints.push(JointCharEstimate { orders: (n, m), value, stderr });
            }
        }
    }

    Ok(CharFnReport { n_samples, singles, joints })
}
