//! The Thouless identity γ(z) = 2∫ln|z − e^{iλ'}| dk(λ') + ln(1/t²) − ln|z|,
//! its Poisson-kernel radial derivative, and recovery of the absolutely
//! continuous density from the Lyapunov exponent.
//!
//! Against an atomic empirical measure every integral here is an exact
//! finite sum; quadrature only enters for the closed-form free measure dk₀.

use crate::error::{Error, Result};
use crate::model::{Coefficients, PhaseModel};
use crate::scalar::Real;
use crate::spectrum::free::integrate_dk0;
use crate::spectrum::measure::SpectralMeasure;
use crate::transfer::{lyapunov_estimate, SpectralParameter};
use serde::Serialize;
use std::io::{self, Write};

/// Default atom-exclusion radius for the on-circle logarithmic kernel.
pub const ATOM_EXCLUSION: f64 = 1e-9;

/// Right-hand side of the Thouless formula against an atomic measure.
/// Off the circle the log kernel is summed directly; on the circle the
/// sin² form ∫ln(sin²((λ−λ')/2)) dk + ln(4/t²) is used, dropping atoms
/// within the exclusion radius of λ and renormalizing the rest.
pub fn thouless_rhs<F: Real>(
    z: SpectralParameter<F>,
    measure: &SpectralMeasure<F>,
    params: Coefficients<F>,
) -> F {
    thouless_rhs_with_exclusion(z, measure, params, F::lit(ATOM_EXCLUSION))
}

pub fn thouless_rhs_with_exclusion<F: Real>(
    z: SpectralParameter<F>,
    measure: &SpectralMeasure<F>,
    params: Coefficients<F>,
    exclusion: F,
) -> F {
    let on_circle = (z.modulus() - F::one()).abs() <= F::lit(1e-9);
    let log_inv_t2 = (F::one() / params.t2()).ln();
    if !on_circle {
        let zc = z.z();
        let n = F::from_usize(measure.len()).unwrap();
        let sum: F = measure
            .phases()
            .iter()
            .map(|&l| (zc - crate::scalar::cis(l)).norm().ln())
            .sum();
        F::lit(2.0) * sum / n + log_inv_t2 - z.modulus().ln()
    } else {
        let lambda = z.z().arg();
        let half = F::lit(0.5);
        let mut sum = F::zero();
        let mut kept = 0usize;
        for &l in measure.phases() {
            let mut d = (lambda - l).abs();
            d = d.min(F::two_pi() - d);
            if d <= exclusion {
                continue;
            }
            let s = ((lambda - l) * half).sin();
            sum += (s * s).ln();
            kept += 1;
        }
        // redistribute the excluded mass over the kept atoms
        let log4 = F::lit(4.0).ln();
        if kept == 0 {
            return F::neg_infinity();
        }
        sum / F::from_usize(kept).unwrap() + log4 + log_inv_t2
    }
}

/// Thouless right-hand side against the closed-form free measure dk₀,
/// evaluated by smooth quadrature in the band-function variable with splits
/// at the preimages of the on-circle log singularity.
pub fn thouless_rhs_free<F: Real>(
    z: SpectralParameter<F>,
    params: Coefficients<F>,
    tol: F,
) -> F {
    let zc = z.z();
    let singular = if (z.modulus() - F::one()).abs() < F::lit(1e-12) {
        vec![zc.arg()]
    } else {
        Vec::new()
    };
    let q = integrate_dk0(
        |l| (zc - crate::scalar::cis(l)).norm().max(F::lit(1e-300)).ln(),
        params,
        tol,
        &singular,
    );
    F::lit(2.0) * q.value + (F::one() / params.t2()).ln() - z.modulus().ln()
}

/// Poisson transform P\[dk\](e^{iλ'} e^{−ε}) of an atomic measure; equals the
/// ε-derivative of γ along the radius and recovers the a.c. density of dk
/// as ε → 0⁺.
pub fn poisson_transform<F: Real>(
    measure: &SpectralMeasure<F>,
    lam_prime: F,
    eps: F,
) -> Result<F> {
    if eps <= F::zero() {
        return Err(Error::Domain(format!("Poisson transform needs ε > 0, got {eps}")));
    }
    let q = (-eps).exp();
    let one = F::one();
    let num = one - q * q;
    let n = F::from_usize(measure.len()).unwrap();
    let two = F::lit(2.0);
    let sum: F = measure
        .phases()
        .iter()
        .map(|&l| num / (one + q * q - two * q * (l - lam_prime).cos()))
        .sum();
    Ok(sum / n)
}

/// Poisson transform of the free measure dk₀ by quadrature.
pub fn poisson_transform_free<F: Real>(
    params: Coefficients<F>,
    lam_prime: F,
    eps: F,
    tol: F,
) -> Result<F> {
    if eps <= F::zero() {
        return Err(Error::Domain(format!("Poisson transform needs ε > 0, got {eps}")));
    }
    let q = (-eps).exp();
    let one = F::one();
    let num = one - q * q;
    let two = F::lit(2.0);
    Ok(integrate_dk0(
        |l| num / (one + q * q - two * q * (l - lam_prime).cos()),
        params,
        tol,
        &[lam_prime],
    )
    .value)
}

#[derive(Clone, Debug, Serialize)]
pub struct AcDensityEstimate {
    /// Extrapolated density n(λ') with respect to dλ/2π.
    pub value: f64,
    pub schedule: Vec<f64>,
    pub transforms: Vec<f64>,
    /// Slope of the linear fit over the tail of the schedule.
    pub fit_slope: f64,
    /// Max residual of the fit; a large value flags failed extrapolation
    /// (e.g. at band edges).
    pub fit_residual: f64,
}

/// Poisson transforms along a decreasing ε schedule plus a linear-in-ε
/// extrapolation to ε = 0 over the last three points.
pub fn ac_density<F: Real>(
    measure: &SpectralMeasure<F>,
    lam_prime: F,
    eps_schedule: &[F],
) -> Result<AcDensityEstimate> {
    if eps_schedule.len() < 2 {
        return Err(Error::Usage("ε schedule needs at least two points".into()));
    }
    for w in eps_schedule.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::Usage("ε schedule must be strictly decreasing".into()));
        }
    }
    let transforms: Vec<F> = eps_schedule
        .iter()
        .map(|&e| poisson_transform(measure, lam_prime, e))
        .collect::<Result<Vec<_>>>()?;

    let tail = eps_schedule.len().min(3);
    let xs: Vec<f64> = eps_schedule[eps_schedule.len() - tail..]
        .iter()
        .map(|e| e.to_f64().unwrap())
        .collect();
    let ys: Vec<f64> = transforms[transforms.len() - tail..]
        .iter()
        .map(|v| v.to_f64().unwrap())
        .collect();
    let nf = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let fit_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);

    Ok(AcDensityEstimate {
        value: intercept,
        schedule: eps_schedule.iter().map(|e| e.to_f64().unwrap()).collect(),
        transforms: transforms.iter().map(|v| v.to_f64().unwrap()).collect(),
        fit_slope: slope,
        fit_residual,
    })
}

/// Where the Thouless right-hand side comes from in a scan.
pub enum RhsSource<'a, F: Real> {
    /// Exact sums against a pooled empirical measure.
    Empirical(&'a SpectralMeasure<F>),
    /// Quadrature against the closed-form free measure dk₀.
    FreeClosedForm,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThoulessPoint {
    pub z_re: f64,
    pub z_im: f64,
    pub gamma_cocycle: f64,
    pub stderr: f64,
    pub gamma_thouless: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThoulessReport {
    pub points: Vec<ThoulessPoint>,
    pub max_abs_gap: f64,
}

pub struct ScanBudget {
    pub n_steps: u64,
    pub n_realizations: usize,
    pub seed: u64,
}

/// Compare the cocycle Lyapunov estimate against the Thouless right-hand
/// side on a grid of spectral parameters. Grid points are evaluated
/// concurrently inside `lyapunov_estimate`; results are reported in grid
/// order.
pub fn thouless_scan<F: Real>(
    zs: &[SpectralParameter<F>],
    model: &PhaseModel<F>,
    params: Coefficients<F>,
    budget: &ScanBudget,
    rhs: RhsSource<'_, F>,
) -> Result<ThoulessReport> {
    if zs.is_empty() {
        return Err(Error::Usage("thouless scan needs a nonempty grid".into()));
    }
    let mut points = Vec::with_capacity(zs.len());
    let mut max_abs_gap = 0.0f64;
    let free_model = *model == PhaseModel::free();
    for &z in zs {
        let (gamma_cocycle, stderr) = if free_model {
            // deterministic: a single cocycle, no averaging
            let compiled = model.compile()?;
            (
                crate::transfer::lyapunov_single(z, &compiled, params, budget.n_steps, budget.seed),
                F::zero(),
            )
        } else {
            let est = lyapunov_estimate(
                z,
                model,
                params,
                budget.n_steps,
                budget.n_realizations,
                budget.seed,
            )?;
            (est.gamma, est.stderr)
        };
        let gamma_thouless = match &rhs {
            RhsSource::Empirical(measure) => thouless_rhs(z, measure, params),
            RhsSource::FreeClosedForm => thouless_rhs_free(z, params, F::lit(1e-9)),
        };
        let gap = (gamma_cocycle - gamma_thouless).to_f64().unwrap();
        max_abs_gap = max_abs_gap.max(gap.abs());
        points.push(ThoulessPoint {
            z_re: z.z().re.to_f64().unwrap(),
            z_im: z.z().im.to_f64().unwrap(),
            gamma_cocycle: gamma_cocycle.to_f64().unwrap(),
            stderr: stderr.to_f64().unwrap(),
            gamma_thouless: gamma_thouless.to_f64().unwrap(),
            gap,
        });
    }
    Ok(ThoulessReport { points, max_abs_gap })
}

impl ThoulessReport {
    pub fn write_csv<W: Write>(&self, w: &mut W, claim: &str) -> io::Result<()> {
        writeln!(w, "# claim: {claim}")?;
        writeln!(w, "z_re,z_im,gamma_cocycle,stderr,gamma_thouless,gap")?;
        for p in &self.points {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                p.z_re, p.z_im, p.gamma_cocycle, p.stderr, p.gamma_thouless, p.gap
            )?;
        }
        Ok(())
    }
}

/// Largest violation of the Craig–Simon continuity bound
/// |N(λ₁) − N(λ₂)| ≤ ln(2/t²)/|ln|e^{iλ₁} − e^{iλ₂}|| on a grid of pairs
/// with separation at most `max_sep` (positive values violate).
pub fn craig_simon_excess<F: Real>(
    measure: &SpectralMeasure<F>,
    params: Coefficients<F>,
    grid: usize,
    max_sep: F,
) -> F {
    let bound_num = (F::lit(2.0) / params.t2()).ln();
    let mut worst = F::neg_infinity();
    let nf = F::from_usize(grid).unwrap();
    for i in 0..grid {
        let l1 = -F::PI() + F::two_pi() * F::from_usize(i).unwrap() / nf;
        for j in i + 1..grid {
            let l2 = -F::PI() + F::two_pi() * F::from_usize(j).unwrap() / nf;
            // N is the distribution function on (−π, π]: pairs are compared
            // along the line, without wrapping through the cut at ±π
            let sep = (l1 - l2).abs();
            if sep > max_sep || sep == F::zero() {
                continue;
            }
            let chord = (crate::scalar::cis(l1) - crate::scalar::cis(l2)).norm();
            if chord >= F::one() {
                continue;
            }
            let bound = bound_num / chord.ln().abs();
            let dn = (measure.integrated(l1) - measure.integrated(l2)).abs();
            worst = worst.max(dn - bound);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use crate::transfer::lyapunov_free;
    use std::f64::consts::PI;

    fn grid_measure(n: usize) -> SpectralMeasure<f64> {
        SpectralMeasure::from_phases(
            (0..n).map(|i| -PI + (i as f64 + 0.5) * 2.0 * PI / n as f64).collect(),
        )
        .unwrap()
    }

    fn balanced() -> Coefficients<f64> {
        Coefficients::balanced()
    }

    #[test]
    fn uniform_measure_gives_log_inverse_t2_on_circle() {
        let m = grid_measure(4096);
        let p = balanced();
        for lam in [0.37, -2.0, 3.0] {
            let v = thouless_rhs(SpectralParameter::from_angle(lam), &m, p);
            assert!((v - 2.0f64.ln()).abs() < 1e-3, "λ = {lam}: {v}");
        }
    }

    #[test]
    fn small_z_dominated_by_log_modulus() {
        let m = grid_measure(2048);
        let p = balanced();
        let z = SpectralParameter::from_z(c(1e-3, 0.0)).unwrap();
        let v = thouless_rhs(z, &m, p);
        // 2∫ln|z−e^{iλ}|dk ≈ 0, so γ ≈ −ln|z| + ln(1/t²)
        let expect = -(1e-3f64).ln() + 2.0f64.ln();
        assert!((v - expect).abs() < 1e-2, "{v} vs {expect}");
    }

    #[test]
    fn free_rhs_matches_free_lyapunov_outside_band() {
        let p = balanced();
        for lam in [1.8, 2.4, 3.0] {
            let z = SpectralParameter::from_angle(lam);
            let rhs = thouless_rhs_free(z, p, 1e-9);
            let g0 = lyapunov_free(z, p);
            assert!((rhs - g0).abs() < 1e-3, "λ = {lam}: rhs {rhs} vs γ₀ {g0}");
        }
        // inside the band both vanish
        let z = SpectralParameter::from_angle(0.7);
        assert!(thouless_rhs_free(z, p, 1e-9).abs() < 1e-3);
    }

    #[test]
    fn free_rhs_matches_spectral_radius_off_circle() {
        let p = Coefficients::<f64>::from_r(0.6).unwrap();
        for z in [c(0.8, 0.1), c(1.3, -0.4)] {
            let sp = SpectralParameter::from_z(z).unwrap();
            let rhs = thouless_rhs_free(sp, p, 1e-10);
            let direct = lyapunov_free(sp, p);
            assert!((rhs - direct).abs() < 1e-6, "z = {z}: {rhs} vs {direct}");
        }
    }

    #[test]
    fn poisson_of_uniform_is_one() {
        let m = grid_measure(4096);
        for eps in [0.1, 0.5, 40.0] {
            let v = poisson_transform(&m, 0.9, eps).unwrap();
            assert!((v - 1.0).abs() < 1e-6, "ε = {eps}: {v}");
        }
        assert!(poisson_transform(&m, 0.0, 0.0).is_err());
        assert!(poisson_transform(&m, 0.0, -1.0).is_err());
    }

    #[test]
    fn poisson_is_radial_derivative_of_thouless() {
        let m = grid_measure(1024);
        let p = balanced();
        let (lam, eps, h) = (0.6, 0.1, 1e-4);
        let gamma_at = |e: f64| {
            let z = SpectralParameter::from_z(crate::scalar::cis(lam) * (-e).exp()).unwrap();
            thouless_rhs(z, &m, p)
        };
        let fd = (gamma_at(eps + h) - gamma_at(eps - h)) / (2.0 * h);
        let pt = poisson_transform(&m, lam, eps).unwrap();
        assert!((fd - pt).abs() < 1e-6, "finite diff {fd} vs Poisson {pt}");
    }

    #[test]
    fn poisson_positivity() {
        let m = SpectralMeasure::from_phases(vec![0.0, 0.4, 0.41, -2.0, 3.0]).unwrap();
        for lam in [-3.0, 0.0, 0.4, 2.0] {
            for eps in [0.01, 0.3, 2.0] {
                assert!(poisson_transform(&m, lam, eps).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn radial_continuity_of_free_rhs() {
        // γ(e^{iλ'}e^{−ε}) → γ(e^{iλ'}) with monotone gap decrease
        let p = balanced();
        let lam = 2.2; // outside the band, γ₀ > 0
        let on_circle = thouless_rhs_free(SpectralParameter::from_angle(lam), p, 1e-10);
        let mut last_gap = f64::INFINITY;
        for eps in [0.1f64, 0.05, 0.01] {
            let z = SpectralParameter::from_z(crate::scalar::cis(lam) * (-eps).exp()).unwrap();
            let v = thouless_rhs_free(z, p, 1e-10);
            let gap = (v - on_circle).abs();
            assert!(gap < last_gap, "gap did not decrease at ε = {eps}");
            last_gap = gap;
        }
        assert!(last_gap < 5e-3, "gap {last_gap}");
    }

    #[test]
    fn atom_exclusion_stability() {
        // 10^5 pseudo-random atoms; doubling the exclusion radius moves the
        // on-circle value by less than 1e−6 at a generic λ
        let atoms: Vec<f64> = (0..100_000)
            .map(|i| {
                let u = crate::rng::unit::<f64>(4242, i, crate::rng::FieldTag::Eta);
                -PI + 2.0 * PI * u
            })
            .collect();
        let m = SpectralMeasure::from_phases(atoms).unwrap();
        let p = balanced();
        let z = SpectralParameter::from_angle(1.234567);
        let a = thouless_rhs_with_exclusion(z, &m, p, 1e-9);
        let b = thouless_rhs_with_exclusion(z, &m, p, 2e-9);
        assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
    }

    #[test]
    fn ac_density_uniform_is_one() {
        let m = grid_measure(8192);
        let est = ac_density(&m, 0.3, &[0.2, 0.1, 0.05, 0.02]).unwrap();
        assert!((est.value - 1.0).abs() < 1e-4, "{}", est.value);
        assert!(est.fit_residual < 1e-4);
    }

    #[test]
    fn ac_density_rejects_bad_schedule() {
        let m = grid_measure(128);
        assert!(ac_density(&m, 0.0, &[0.1, 0.2]).is_err());
        assert!(ac_density(&m, 0.0, &[0.1]).is_err());
    }

    #[test]
    fn craig_simon_bound_holds_for_uniform_grid() {
        let m = grid_measure(4096);
        let p = balanced();
        let excess = craig_simon_excess(&m, p, 64, 0.5);
        // ΔN ≈ Δλ/2π while the bound is ≥ ln(4)/|ln chord| ≫ ΔN
        assert!(excess < 0.0, "excess {excess}");
    }
}
