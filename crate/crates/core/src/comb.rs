//! Lattice-path combinatorics behind the analyticity criterion: weighted
//! path sums S_{n−1}(j) over parity-constrained walks, their generating
//! functions by a 2×2 Laurent transfer recursion, exact balanced-case
//! binomials, and the margin arithmetic of the analyticity criterion.
//!
//! Path rules: from an odd site the allowed steps are {0, +1, −1, +2}, from
//! an even site {0, +1, −1, −2}; a step of size |d| carries weight r², rt,
//! t² for d = 0, ±1, ±2.

use crate::error::{Error, Result};
use crate::laurent::{LaurentMat2, LaurentPoly};
use crate::model::Coefficients;
use crate::scalar::{c, C, Real};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

/// Allowed steps out of a site of the given parity.
pub fn allowed_steps(site: i64) -> [i64; 4] {
    if site.rem_euclid(2) == 1 {
        [0, 1, -1, 2]
    } else {
        [0, 1, -1, -2]
    }
}

fn step_weight<F: Real>(d: i64, params: Coefficients<F>) -> F {
    match d.abs() {
        0 => params.r2(),
        1 => params.rt(),
        2 => params.t2(),
        _ => unreachable!("steps are bounded by 2"),
    }
}

/// All path sums S_{n−1}(j) for paths of n steps from 0, by exhaustive
/// enumeration. Exponential in n; guarded at n ≤ 12.
pub fn path_sums_bruteforce<F: Real>(
    n: usize,
    params: Coefficients<F>,
) -> Result<BTreeMap<i64, F>> {
    if n > 12 {
        return Err(Error::Usage(format!(
            "brute-force enumeration is limited to n ≤ 12 (4^n paths), got {n}"
        )));
    }
    // compensated per-bucket accumulation: 4^n positive terms would
    // otherwise drift past the 1e−12 oracle tolerance
    let mut sums: BTreeMap<i64, (F, F)> = BTreeMap::new();
    fn recurse<F: Real>(
        site: i64,
        depth: usize,
        weight: F,
        n: usize,
        params: Coefficients<F>,
        sums: &mut BTreeMap<i64, (F, F)>,
    ) {
        if depth == n {
            let (sum, comp) = sums.entry(site).or_insert((F::zero(), F::zero()));
            let y = weight - *comp;
            let t = *sum + y;
            *comp = (t - *sum) - y;
            *sum = t;
            return;
        }
        for d in allowed_steps(site) {
            recurse(site + d, depth + 1, weight * step_weight(d, params), n, params, sums);
        }
    }
    recurse(0, 0, F::one(), n, params, &mut sums);
    Ok(sums.into_iter().map(|(j, (s, _))| (j, s)).collect())
}

/// S_{n−1}(j) by brute force.
pub fn path_sum_bruteforce<F: Real>(n: usize, j: i64, params: Coefficients<F>) -> Result<F> {
    Ok(path_sums_bruteforce(n, params)?.get(&j).copied().unwrap_or_else(F::zero))
}

/// Transfer matrix of the generating-function recursion
/// (P⁺, P⁻) ← [[r² + t²x⁻², rt(x + x⁻¹)], [rt(x + x⁻¹), r² + t²x²]].
fn gen_matrix<F: Real>(params: Coefficients<F>) -> LaurentMat2<F> {
    let (r2, rt, t2) = (params.r2(), params.rt(), params.t2());
    let diag_m = LaurentPoly::from_coeffs(-2, vec![t2, F::zero(), r2]);
    let diag_p = LaurentPoly::from_coeffs(0, vec![r2, F::zero(), t2]);
    let off = LaurentPoly::from_coeffs(-1, vec![rt, F::zero(), rt]);
    LaurentMat2 { m: [[diag_m, off.clone()], [off, diag_p]] }
}

/// Generating functions (P_n⁺, P_n⁻): the coefficient of x^j in P_n^± is
/// S_{n−1}(j) for j of even/odd parity. Seed (P₀⁺, P₀⁻) = (1, 0).
pub fn gen_poly<F: Real>(n: usize, params: Coefficients<F>) -> (LaurentPoly<F>, LaurentPoly<F>) {
    let t = gen_matrix(params);
    let mut v = [LaurentPoly::one(), LaurentPoly::zero()];
    for _ in 0..n {
        v = t.mul_vec(&v);
    }
    let [plus, minus] = v;
    (plus, minus)
}

/// Unweighted path counts |𝒞_{n−1}(j)| as exact integers (the τ = 1
/// recursion with unit weights).
pub fn gen_poly_counts(n: usize) -> (LaurentPoly<BigInt>, LaurentPoly<BigInt>) {
    let one = BigInt::one;
    let diag_m = LaurentPoly::from_coeffs(-2, vec![one(), BigInt::zero(), one()]);
    let diag_p = LaurentPoly::from_coeffs(0, vec![one(), BigInt::zero(), one()]);
    let off = LaurentPoly::from_coeffs(-1, vec![one(), BigInt::zero(), one()]);
    let t = LaurentMat2 { m: [[diag_m, off.clone()], [off, diag_p]] };
    let mut v = [LaurentPoly::one(), LaurentPoly::zero()];
    for _ in 0..n {
        v = t.mul_vec(&v);
    }
    let [plus, minus] = v;
    (plus, minus)
}

/// Central path sum S_{n−1}(0) by coefficient extraction. The recursion has
/// nonnegative coefficients, so no cancellation occurs and the float route
/// is accurate to machine precision even at large n.
pub fn s_center<F: Real>(n: usize, params: Coefficients<F>) -> Result<F> {
    if n < 1 {
        return Err(Error::Usage("s_center needs n ≥ 1".into()));
    }
    Ok(gen_poly(n, params).0.coeff(0))
}

/// Central path sum by the independent on-circle route: the zeroth Fourier
/// coefficient of P_n⁺(e^{iθ}) by the trapezoid rule on 8n nodes, which
/// integrates a trigonometric polynomial of degree ≤ 2n exactly. Each node
/// evaluates the transfer recursion numerically at x = e^{iθ}.
pub fn s_center_quadrature<F: Real>(n: usize, params: Coefficients<F>) -> Result<F> {
    if n < 1 {
        return Err(Error::Usage("s_center needs n ≥ 1".into()));
    }
    if n > 700 {
        return Err(Error::Usage(
            "on-circle evaluation overflows beyond n ≈ 700 (values grow like (r+t)^{2n})".into(),
        ));
    }
    let nodes = 8 * n;
    let (r2, rt, t2) = (params.r2(), params.rt(), params.t2());
    let mut acc = F::zero();
    for q in 0..nodes {
        let theta = F::two_pi() * F::from_usize(q).unwrap() / F::from_usize(nodes).unwrap();
        let x = crate::scalar::cis(theta);
        let xinv = x.conj();
        let x2 = x * x;
        let xinv2 = xinv * xinv;
        let off = (x + xinv) * rt;
        let m = crate::mat2::Mat2::new(
            xinv2 * t2 + r2,
            off,
            off,
            x2 * t2 + r2,
        );
        let mut v = [C::<F>::one(), C::zero()];
        for _ in 0..n {
            v = m.mul_vec(v);
        }
        acc += v[0].re;
    }
    Ok(acc / F::from_usize(nodes).unwrap())
}

/// Exact balanced-case value with range flag.
#[derive(Clone, Debug)]
pub struct BalancedPathSum {
    pub value: BigRational,
    pub in_range: bool,
}

/// S_{n−1}(j) at r = t = 1/√2: 2^{-n} C(2n−1, j/2 + n) for even j in
/// [−2n, 2(n−1)] and 2^{-n} C(2n−1, (j−1)/2 + n) for odd j in
/// [−2n+1, 2n−1]; zero (flagged) outside those ranges.
pub fn s_exact_balanced(n: usize, j: i64) -> Result<BalancedPathSum> {
    if n < 1 {
        return Err(Error::Usage("s_exact_balanced needs n ≥ 1".into()));
    }
    let n_i = n as i64;
    let even = j.rem_euclid(2) == 0;
    let (in_range, k) = if even {
        (-2 * n_i <= j && j <= 2 * (n_i - 1), j / 2 + n_i)
    } else {
        (-2 * n_i < j && j < 2 * n_i, (j - 1) / 2 + n_i)
    };
    if !in_range {
        return Ok(BalancedPathSum { value: BigRational::zero(), in_range: false });
    }
    let value = BigRational::new(binomial(2 * n - 1, k as usize), BigInt::from(2u32).pow(n as u32));
    Ok(BalancedPathSum { value, in_range: true })
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Eigenvalue data of the generating transfer matrix at x = e^{iθ}:
/// T(e^{iθ}) has eigenvalues r²·λ±(θ) with
/// λ± = h ± √(h² − (1−τ²)²), h = 1 + τ² cos 2θ.
#[derive(Clone, Debug)]
pub struct GenEigs<F: Real> {
    /// Eigenvalues of T(e^{iθ}) themselves (r²λ±), largest modulus first.
    pub lam_plus: C<F>,
    pub lam_minus: C<F>,
    pub discriminant: F,
    /// Real pair (τ<1 always; τ>1 outside the critical window) or complex
    /// conjugate pair of modulus |1−τ²| r².
    pub conjugate_pair: bool,
    /// Critical angle where the discriminant vanishes (τ > 1 only).
    pub theta_c: Option<F>,
}

pub fn gen_eigs<F: Real>(theta: F, params: Coefficients<F>) -> GenEigs<F> {
    let tau = params.tau();
    let tau2 = tau * tau;
    let h = F::one() + tau2 * (theta + theta).cos();
    let gap2 = (F::one() - tau2) * (F::one() - tau2);
    let disc = h * h - gap2;
    let r2 = params.r2();
    let (lp, lm, conj) = if disc >= F::zero() {
        let s = disc.sqrt();
        (c(r2 * (h + s), F::zero()), c(r2 * (h - s), F::zero()), false)
    } else {
        let s = (-disc).sqrt();
        (c(r2 * h, r2 * s), c(r2 * h, -(r2 * s)), true)
    };
    let theta_c = if tau > F::one() {
        Some(F::lit(0.5) * ((tau2 - F::lit(2.0)) / tau2).acos())
    } else {
        None
    };
    GenEigs { lam_plus: lp, lam_minus: lm, discriminant: disc, conjugate_pair: conj, theta_c }
}

/// Analyticity criterion for the density of states when η ~ f(η) dη with
/// |f̂(n)| ≤ A e^{−B|n|}: the density of states has an analytic density if
/// B > ln(1 + 2rt) + ln A.
#[derive(Clone, Debug, Serialize)]
pub struct AnalyticityReport {
    pub margin: f64,
    pub analytic: bool,
    /// Lower/upper reflection-coefficient thresholds when B > ln A but the
    /// criterion fails at this r (analytic for r < r⁻ or r > r⁺).
    pub r_minus: Option<f64>,
    pub r_plus: Option<f64>,
    /// B > ln(2A): analytic for every r in [0, 1].
    pub all_r: bool,
}

pub fn analyticity_margin<F: Real>(
    a: F,
    b: F,
    params: Coefficients<F>,
) -> Result<AnalyticityReport> {
    if a < F::one() {
        return Err(Error::Domain(format!(
            "A ≥ 1 is forced by f̂(0) = 1, got A = {a}"
        )));
    }
    if b <= F::zero() {
        return Err(Error::Domain(format!("decay rate B must be positive, got {b}")));
    }
    let two_rt = F::lit(2.0) * params.rt();
    let margin = b - (F::one() + two_rt).ln() - a.ln();
    let all_r = b > (F::lit(2.0) * a).ln();
    let (r_minus, r_plus) = if b > a.ln() && !all_r {
        // solve 2 r √(1−r²) = e^{B}/A − 1 =: y ∈ (0, 1)
        let y = (b.exp() / a - F::one()).to_f64().unwrap();
        let root = (1.0 - y * y).sqrt();
        (Some(((1.0 - root) / 2.0).sqrt()), Some(((1.0 + root) / 2.0).sqrt()))
    } else {
        (None, None)
    };
    Ok(AnalyticityReport {
        margin: margin.to_f64().unwrap(),
        analytic: margin > F::zero(),
        r_minus,
        r_plus,
        all_r,
    })
}

/// Bound |E⟨φ_j|U^n φ_j⟩| ≤ Aⁿ e^{−Bn} S_{n−1}(0) used in the moment chain
/// of the analyticity criterion.
pub fn moment_bound<F: Real>(a: F, b: F, n: usize, params: Coefficients<F>) -> Result<F> {
    Ok(a.powi(n as i32) * (-b * F::from_usize(n).unwrap()).exp() * s_center(n, params)?)
}

/// Rational-to-float helper for reporting.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // fall back through a scaled division for extreme magnitudes
        let digits = x.numer().abs().to_string().len() as i32
            - x.denom().abs().to_string().len() as i32;
        let scale = BigInt::from(10u32).pow(digits.unsigned_abs());
        let scaled = if digits > 0 {
            BigRational::new(x.numer().clone(), x.denom() * scale)
        } else {
            BigRational::new(x.numer() * scale, x.denom().clone())
        };
        scaled.to_f64().unwrap() * 10f64.powi(digits)
    })
}
