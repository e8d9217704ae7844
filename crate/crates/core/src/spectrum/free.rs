//! Closed forms for the free operator U₀: band functions of the 2×2
//! multiplication symbol, the density of states dk₀ with its square-root
//! band edges, the integrated density N₀, and smooth quadrature against dk₀
//! through the band-function substitution.

use crate::arcs::ArcUnion;
use crate::mat2::Mat2;
use crate::model::Coefficients;
use crate::quad::{self, Quadrature};
use crate::scalar::{c, cis, C, Real};

/// Eigenvalue data of the symbol V(x) representing U₀ as a multiplication
/// operator: eigenvalues e^{±iα(x)} with α(x) = arccos(r² − t² cos 2x).
#[derive(Clone, Copy, Debug)]
pub struct BandFunctions<F: Real> {
    pub lambda_plus: C<F>,
    pub lambda_minus: C<F>,
    pub alpha: F,
    pub symbol: Mat2<F>,
}

pub fn band_functions<F: Real>(x: F, params: Coefficients<F>) -> BandFunctions<F> {
    let (r2, t2, rt) = (params.r2(), params.t2(), params.rt());
    let two = F::lit(2.0);
    let off = C::new(F::zero(), two * rt * x.cos());
    let symbol = Mat2::new(
        c(r2, F::zero()) - cis(two * x) * t2,
        off,
        off,
        c(r2, F::zero()) - cis(-(two * x)) * t2,
    );
    let alpha = (r2 - t2 * (two * x).cos()).min(F::one()).max(-F::one()).acos();
    BandFunctions { lambda_plus: cis(alpha), lambda_minus: cis(-alpha), alpha, symbol }
}

/// Spectrum Σ₀ of the free operator: the symmetric arc of half-aperture
/// arccos(r² − t²).
pub fn sigma0<F: Real>(params: Coefficients<F>) -> ArcUnion<F> {
    ArcUnion::from_arc(F::zero(), params.band_edge())
}

/// Density (w.r.t. dλ) and integrated density of states of U₀ at λ.
#[derive(Clone, Copy, Debug)]
pub struct FreeDos<F: Real> {
    pub density: F,
    pub integrated: F,
}

pub fn free_dos<F: Real>(lambda: F, params: Coefficients<F>) -> FreeDos<F> {
    let edge = params.band_edge();
    let (r2, t2) = (params.r2(), params.t2());
    let inside = lambda.abs() < edge;
    let density = if inside {
        // t⁴ − (r² − cos λ)² = (cos λ − cos λ₀)(1 − cos λ) with λ₀ the band
        // edge; cancelling the sin(λ/2) factor keeps λ → 0 finite:
        // density = |cos(λ/2)| / (π √2 √(cos λ − cos λ₀)).
        let half = lambda * F::lit(0.5);
        let gap = (lambda.cos() - edge.cos()).max(F::zero());
        half.cos().abs() / (F::PI() * F::lit(2.0).sqrt() * gap.sqrt())
    } else {
        F::zero()
    };
    let integrated = if lambda <= -edge {
        F::zero()
    } else if lambda >= edge {
        F::one()
    } else {
        let g = ((r2 - lambda.cos()) / t2).min(F::one()).max(-F::one());
        let branch = g.acos() / F::two_pi();
        if lambda <= F::zero() {
            branch
        } else {
            F::one() - branch
        }
    };
    FreeDos { density, integrated }
}

/// ∫ f(λ) dk₀(λ) through the band-function substitution
/// ∫ f dk₀ = (1/2π) ∫_{-π/2}^{π/2} [f(α(x)) + f(−α(x))] dx,
/// which turns the square-root band-edge singularities of dk₀ into a smooth
/// integrand. Split points may be supplied as λ-values (log kernels etc.);
/// they are pulled back through α.
pub fn integrate_dk0<F: Real>(
    f: impl Fn(F) -> F,
    params: Coefficients<F>,
    tol: F,
    singular_lambdas: &[F],
) -> Quadrature<F> {
    let half_pi = F::FRAC_PI_2();
    // preimages of singular λ under α(x) to split the x-integral at
    let mut splits = Vec::new();
    for &lam in singular_lambdas {
        let g = (params.r2() - lam.cos()) / params.t2();
        if g.abs() <= F::one() {
            let x = F::lit(0.5) * g.acos();
            splits.push(x);
            splits.push(-x);
        }
    }
    let q = quad::adaptive(
        |x| {
            let bf = band_functions(x, params);
            f(bf.alpha) + f(-bf.alpha)
        },
        -half_pi,
        half_pi,
        tol,
        &splits,
    );
    Quadrature { value: q.value / F::two_pi(), err: q.err / F::two_pi(), evals: q.evals }
}

/// Free-case Fourier moment ∫ e^{isλ} dk₀(λ) (real by symmetry).
pub fn free_dos_moment<F: Real>(s: i64, params: Coefficients<F>) -> F {
    if s == 0 {
        return F::one();
    }
    let sf = F::from_i64(s).unwrap();
    integrate_dk0(|lam| (sf * lam).cos(), params, F::lit(1e-10), &[]).value
}
