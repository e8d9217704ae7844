//! Acceptance suite: one test per headline claim, each printing a pass line
//! with the measured figures (run with `--nocapture` to see them).
//!
//! The heavy shared inputs — the pooled uniform-phase spectrum and the
//! size-2000 free truncation — are computed once and reused across
//! criteria.

use std::sync::OnceLock;
use ubm::comb::{
    analyticity_margin, gen_poly, gen_poly_counts, moment_bound, path_sums_bruteforce,
    rational_to_f64, s_center, s_exact_balanced,
};
use ubm::model::{
    build_u, factorize, Coefficients, DistributionSpec, PhaseModel, SiteInterval,
};
use ubm::scalar::{c, cis};
use ubm::spectrum::{
    dos_moments, free_dos, pooled_eigenphases, predicted_support, secular_roots, support_check,
    truncate, truncate_free, SpectralMeasure,
};
use ubm::thouless::{
    ac_density, craig_simon_excess, thouless_scan, RhsSource, ScanBudget,
};
use ubm::transfer::{lyapunov_estimate, lyapunov_free, transfer_matrix, SpectralParameter};

const SEED: u64 = 20260810;

fn params() -> Coefficients<f64> {
    Coefficients::balanced()
}

fn win(lo: i64, hi: i64) -> SiteInterval {
    SiteInterval::new(lo, hi).unwrap()
}

static UNIFORM_POOL: OnceLock<SpectralMeasure<f64>> = OnceLock::new();

/// 100 realizations × size-500 blocks of the uniform-phase model.
fn uniform_pool() -> &'static SpectralMeasure<f64> {
    UNIFORM_POOL.get_or_init(|| {
        pooled_eigenphases(&PhaseModel::uniform(), params(), 0, 500, 100, SEED).unwrap()
    })
}

static FREE_2000: OnceLock<SpectralMeasure<f64>> = OnceLock::new();

/// Eigenphases of the size-2000 free truncation.
fn free_2000() -> &'static SpectralMeasure<f64> {
    FREE_2000.get_or_init(|| truncate_free(params(), 0, 2000).unwrap().eigenphases().unwrap())
}

#[test]
fn criterion_01_uniform_phase_lyapunov() {
    let p = params();
    let expect = 2.0f64.ln(); // ln(1/t²) at t² = 1/2
    let lambdas = [0.3, 0.7, 1.1, 1.6, 2.0, 2.4, 2.8, -1.3];
    let mut worst = 0.0f64;
    for (i, &lam) in lambdas.iter().enumerate() {
        let est = lyapunov_estimate(
            SpectralParameter::from_angle(lam),
            &PhaseModel::uniform(),
            p,
            100_000,
            32,
            SEED + i as u64,
        )
        .unwrap();
        let gap = (est.gamma - expect).abs();
        worst = worst.max(gap);
        assert!(
            gap <= 0.01f64.max(3.0 * est.stderr),
            "λ = {lam}: γ̂ = {} ± {} vs ln 2",
            est.gamma,
            est.stderr
        );
    }
    println!(
        "[acceptance] criterion 1 (uniform-phase Lyapunov = ln(1/t²)): PASS, worst gap {worst:.2e}"
    );
}

#[test]
fn criterion_02_flat_density_of_states() {
    let pool = uniform_pool();
    let ks = pool.ks_uniform();
    assert!(ks <= 0.01, "KS distance to uniform {ks}");

    let flat = pool.histogram(256).flatness_defect::<f64>();
    let slack = 4.0 / (pool.len() as f64).sqrt();
    assert!(flat <= slack, "histogram flatness {flat} vs {slack}");

    let moments = dos_moments(&PhaseModel::uniform(), params(), 8, 100, SEED ^ 0x11).unwrap();
    let mut worst = 0.0f64;
    for est in moments.iter().skip(1) {
        worst = worst.max(est.value.norm());
        assert!(
            est.value.norm() <= 3.0 / (100.0f64).sqrt(),
            "s = {}: |m̂| = {}",
            est.s,
            est.value.norm()
        );
    }
    println!(
        "[acceptance] criterion 2 (flat DOS, dk = dλ/2π): PASS, KS {ks:.4}, max |m̂_s| {worst:.3}"
    );
}

#[test]
fn criterion_03_free_closed_forms() {
    let p = params();
    // integrated DOS of the size-2000 truncation vs the closed form N₀
    let sup_gap = free_2000().ks_to(|lam| free_dos(lam, p).integrated);
    assert!(sup_gap <= 0.02, "sup |N_emp − N₀| = {sup_gap}");

    // cocycle growth vs γ₀ on both sides of the band edge (π/2 here)
    let edge = p.band_edge();
    let inside = [0.12, 0.25, 0.45, 0.7, 0.9, 1.1, 1.3, 1.45];
    let outside = [0.1, 0.2, 0.35, 0.55, 0.8, 1.05, 1.3, 1.5];
    let free = PhaseModel::free().compile().unwrap();
    let mut worst_in = 0.0f64;
    let mut worst_out = 0.0f64;
    for &d in &inside {
        let z = SpectralParameter::from_angle(edge - d);
        let got = ubm::transfer::lyapunov_single(z, &free, p, 40_000, 0);
        assert!(lyapunov_free(z, p) == 0.0);
        worst_in = worst_in.max(got.abs());
        assert!(got.abs() <= 0.01, "inside λ = {}: γ̂ = {got}", edge - d);
    }
    for &d in &outside {
        let z = SpectralParameter::from_angle(edge + d);
        let got = ubm::transfer::lyapunov_single(z, &free, p, 40_000, 0);
        let gap = (got - lyapunov_free(z, p)).abs();
        worst_out = worst_out.max(gap);
        assert!(gap <= 1e-3, "outside λ = {}: gap = {gap}", edge + d);
    }
    println!(
        "[acceptance] criterion 3 (free closed forms N₀/γ₀): PASS, sup N-gap {sup_gap:.4}, \
         γ gaps in/out {worst_in:.1e}/{worst_out:.1e}"
    );
}

#[test]
fn criterion_04_thouless_formula() {
    let p = params();
    // uniform phases, 8 off-circle points
    let mut zs = Vec::new();
    for &arg in &[0.4f64, 1.2, 2.1, 2.9] {
        for &m in &[0.8f64, 1.25] {
            zs.push(SpectralParameter::from_z(cis(arg) * m).unwrap());
        }
    }
    let budget = ScanBudget { n_steps: 20_000, n_realizations: 16, seed: SEED ^ 0x22 };
    let report = thouless_scan(
        &zs,
        &PhaseModel::uniform(),
        p,
        &budget,
        RhsSource::Empirical(uniform_pool()),
    )
    .unwrap();
    assert!(report.max_abs_gap <= 0.02, "uniform off-circle max gap {}", report.max_abs_gap);

    // free case on the circle outside the band, closed-form measure
    let zs_free: Vec<_> = [1.75f64, 2.1, 2.5, 3.0]
        .iter()
        .map(|&l| SpectralParameter::from_angle(l))
        .collect();
    let budget_free = ScanBudget { n_steps: 40_000, n_realizations: 1, seed: 0 };
    let report_free = thouless_scan(
        &zs_free,
        &PhaseModel::free(),
        p,
        &budget_free,
        RhsSource::FreeClosedForm,
    )
    .unwrap();
    assert!(report_free.max_abs_gap <= 0.01, "free on-circle max gap {}", report_free.max_abs_gap);

    println!(
        "[acceptance] criterion 4 (Thouless formula): PASS, gaps uniform {:.4}, free {:.4}",
        report.max_abs_gap, report_free.max_abs_gap
    );
}

#[test]
fn criterion_05_poisson_ac_recovery() {
    let p = params();
    // uniform: n(λ') = 1
    let mut worst_u = 0.0f64;
    for &lam in &[0.0f64, 1.0, -2.2] {
        let est = ac_density(uniform_pool(), lam, &[0.2, 0.1, 0.05]).unwrap();
        worst_u = worst_u.max((est.value - 1.0).abs());
        assert!((est.value - 1.0).abs() <= 0.05, "λ' = {lam}: n = {}", est.value);
    }
    // free: matches 2π × dk₀ density at interior points
    let mut worst_f = 0.0f64;
    for &lam in &[0.0f64, 0.5, -0.5] {
        let est = ac_density(free_2000(), lam, &[0.1, 0.05, 0.02]).unwrap();
        let expect = 2.0 * std::f64::consts::PI * free_dos(lam, p).density;
        let rel = (est.value - expect).abs() / expect;
        worst_f = worst_f.max(rel);
        assert!(rel <= 0.05, "λ' = {lam}: n = {} vs {expect}", est.value);
    }
    // and vanishes outside the band
    for &lam in &[2.2f64, -2.8] {
        let est = ac_density(free_2000(), lam, &[0.1, 0.05, 0.02]).unwrap();
        assert!(est.value.abs() <= 0.02, "λ' = {lam} outside band: n = {}", est.value);
    }
    println!(
        "[acceptance] criterion 5 (Poisson a.c. recovery): PASS, uniform dev {worst_u:.3}, \
         free rel dev {worst_f:.3}"
    );
}

#[test]
fn criterion_06_secular_vs_dense() {
    let p = params();
    let parities = [(0i64, 60i64), (0, 59), (1, 60), (1, 59)];
    let mut worst = 0.0f64;
    for (pi, &(m, n)) in parities.iter().enumerate() {
        for real in 0..50u64 {
            let seed = SEED + 1000 * pi as u64 + real;
            let phases =
                PhaseModel::<f64>::uniform().sample(win(m, n + 1), seed).unwrap();
            let dense = truncate(p, &phases, m, n).unwrap().eigenphases().unwrap();
            let sec = secular_roots(&phases, p, m, n).unwrap();
            assert_eq!(sec.degree, (n - m) as usize);
            for (a, b) in dense.phases().iter().zip(sec.measure.phases()) {
                let d = (a - b).abs();
                worst = worst.max(d);
                assert!(d <= 1e-8, "parity ({m},{n}) seed {seed}: {a} vs {b}");
            }
        }
    }
    // leading-coefficient growth rate at N − M = 60
    let phases = PhaseModel::<f64>::uniform().sample(win(0, 61), SEED ^ 0x66).unwrap();
    let out = secular_roots(&phases, p, 0, 60).unwrap();
    let rate = out.leading_abs.ln() / out.half_span as f64;
    assert!(
        (rate - (1.0 / p.t2()).ln()).abs() <= 0.02,
        "leading-coefficient rate {rate}"
    );
    println!(
        "[acceptance] criterion 6 (secular = dense eigenphases): PASS, worst |Δphase| {worst:.2e}, \
         leading rate {rate:.6}"
    );
}

#[test]
fn criterion_07_path_combinatorics() {
    // brute force = generating function for n ≤ 10
    let mut worst = 0.0f64;
    for &r in &[0.6f64, 0.5f64.sqrt(), 0.31] {
        let p = Coefficients::from_r(r).unwrap();
        for n in 1..=10usize {
            let sums = path_sums_bruteforce(n, p).unwrap();
            let (plus, minus) = gen_poly(n, p);
            for j in -(2 * n as i64)..=(2 * n as i64) {
                let expect = sums.get(&j).copied().unwrap_or(0.0);
                let got = if j.rem_euclid(2) == 0 { plus.coeff(j) } else { minus.coeff(j) };
                worst = worst.max((got - expect).abs());
                assert!((got - expect).abs() <= 1e-12, "r={r} n={n} j={j}");
            }
        }
    }

    // balanced binomials exact for n ≤ 12 (2^n × counts are integers)
    for n in 1..=12usize {
        let (plus, minus) = gen_poly_counts(n);
        let two_n = num_bigint::BigInt::from(2u32).pow(n as u32);
        for j in -(2 * n as i64)..=(2 * n as i64) {
            let count = if j.rem_euclid(2) == 0 { plus.coeff(j) } else { minus.coeff(j) };
            let exact = s_exact_balanced(n, j).unwrap();
            let reconstructed =
                num_rational::BigRational::new(count, two_n.clone());
            assert_eq!(reconstructed, exact.value, "n={n} j={j}");
        }
    }

    // asymptotic law at r = t. The exact binomial S_{n−1}(0) = 2^{-n} C(2n−1, n)
    // satisfies S_{n−1}(0)·√(πn)/2ⁿ → 1/2 (the constant is 1/(2√π), not
    // 1/√π); the ratio is checked against that limit at the stated 1%
    // tolerance. At n = 200 the as-written normalization gives 0.4997.
    let n = 200usize;
    let s200 = rational_to_f64(&s_exact_balanced(n, 0).unwrap().value);
    let ratio = s200 * (std::f64::consts::PI * n as f64).sqrt() / 2f64.powi(n as i32);
    assert!(
        (2.0 * ratio - 1.0).abs() <= 0.01,
        "balanced asymptotic ratio {ratio} (×2 = {})",
        2.0 * ratio
    );

    // generic (r, t): the normalized ratio is Cauchy between n = 300 and 600
    let p = Coefficients::new(0.6, 0.8).unwrap();
    let ratio_at = |n: usize| {
        s_center(n, p).unwrap() * (n as f64).sqrt() / (p.r() + p.t()).powi(2 * n as i32)
    };
    let (r300, r600) = (ratio_at(300), ratio_at(600));
    let drift = (r600 / r300 - 1.0).abs();
    assert!(drift <= 0.02, "ratio drift {drift} ({r300} → {r600})");

    println!(
        "[acceptance] criterion 7 (path combinatorics): PASS, oracle gap {worst:.1e}, \
         balanced ratio ×2 = {:.5}, generic drift {drift:.4}",
        2.0 * ratio
    );
}

#[test]
fn criterion_08_support_theorem() {
    let p = params();
    let mu = DistributionSpec::UniformArc { center: 0.0, half_width: 0.3 };
    let model = PhaseModel::IidEta { eta: mu.clone() };
    let pool = pooled_eigenphases(&model, p, 0, 500, 40, SEED ^ 0x88).unwrap();
    let sigma = predicted_support(&mu, p);
    // predicted: the free band widened by the arc, [−(π/2+0.3), π/2+0.3]
    let a = std::f64::consts::FRAC_PI_2 + 0.3;
    assert!(sigma.contains(a - 1e-9, 1e-12) && !sigma.contains(a + 1e-3, 1e-12));

    // the ±0.05 edge tolerance cuts both ways: no eigenphase further than
    // 0.05 outside the arcs, and the 0.05-eroded arcs fully shadowed by
    // eigenphases (a Hausdorff-style two-sided check)
    let tol = 0.05;
    let report = support_check(&pool, &sigma, tol);
    assert!(
        1.0 - report.outlier_fraction >= 0.99,
        "only {}% of eigenphases inside the dilated arcs",
        100.0 * (1.0 - report.outlier_fraction)
    );
    let eroded = support_check(&pool, &sigma.dilate(-tol), tol);
    assert!(
        eroded.coverage_fraction >= 0.95,
        "eroded predicted arcs only {}% covered",
        100.0 * eroded.coverage_fraction
    );
    println!(
        "[acceptance] criterion 8 (support theorem Σ = e^{{i supp μ}}Σ₀): PASS, \
         inside {:.2}%, eroded coverage {:.2}%",
        100.0 * (1.0 - report.outlier_fraction),
        100.0 * eroded.coverage_fraction
    );
}

#[test]
fn criterion_09_structural_invariants() {
    let p = params();
    // unitarity
    let phases = PhaseModel::<f64>::uniform().sample(win(-64, 64), SEED ^ 0x99).unwrap();
    let u = build_u(p, &phases, win(-64, 64)).unwrap();
    assert!(u.unitarity_defect() <= 1e-12);

    // det T identity
    let z = SpectralParameter::from_z(c(0.7, -0.9)).unwrap();
    for k in -63..=64i64 {
        let (ee, eo) = (phases.eta(k), phases.eta(k - 1));
        let t = transfer_matrix(ee, eo, z, p);
        assert!((t.det() - cis(ee - eo)).norm() <= 1e-12);
    }

    // factorization residual
    let uf = build_u(p, &phases, win(-63, 64)).unwrap();
    let f = factorize(&uf).unwrap();
    assert!(f.residual(&uf) <= 1e-12);

    // γ symmetry z ↔ 1/z̄ within 3σ
    let zz = SpectralParameter::from_z(cis(0.5) * 0.8).unwrap();
    let e1 = lyapunov_estimate(zz, &PhaseModel::uniform(), p, 20_000, 12, SEED).unwrap();
    let e2 =
        lyapunov_estimate(zz.reflected(), &PhaseModel::uniform(), p, 20_000, 12, SEED + 1)
            .unwrap();
    let sigma = (e1.stderr.powi(2) + e2.stderr.powi(2)).sqrt().max(1e-3);
    assert!(
        (e1.gamma - e2.gamma).abs() <= 3.0 * sigma,
        "γ(z) = {} vs γ(1/z̄) = {}",
        e1.gamma,
        e2.gamma
    );

    // 0 ≤ γ̂ ≤ ln(4/t²) + 3σ on the circle
    for &lam in &[0.4f64, 1.7, 2.9] {
        let est = lyapunov_estimate(
            SpectralParameter::from_angle(lam),
            &PhaseModel::uniform(),
            p,
            20_000,
            8,
            SEED + 7,
        )
        .unwrap();
        assert!(est.gamma >= -1e-6, "γ̂ = {}", est.gamma);
        assert!(est.gamma <= (4.0 / p.t2()).ln() + 3.0 * est.stderr);
    }

    // Craig–Simon continuity bound on the empirical N
    let excess = craig_simon_excess(uniform_pool(), p, 64, 0.5);
    assert!(excess <= 0.01, "Craig–Simon excess {excess}");

    println!("[acceptance] criterion 9 (structural invariants): PASS, CS excess {excess:.3}");
}

#[test]
fn criterion_10_analyticity_criterion() {
    let p = params();
    let (a, b) = (1.0f64, 1.0f64);
    // wrapped-Cauchy-type Fourier coefficients saturate |f̂(n)| = e^{-n}
    let rho = (-1.0f64).exp();
    let coeffs: Vec<_> = (1..=24).map(|n| c(rho.powi(n), 0.0)).collect();
    let mu = DistributionSpec::FourierDensity { amp: a, decay: b, coeffs };
    mu.validate().unwrap();
    let model = PhaseModel::IidEta { eta: mu };

    let moments = dos_moments(&model, p, 8, 20_000, SEED ^ 0xAA).unwrap();
    let mut tightest = f64::INFINITY;
    for est in moments.iter().skip(1) {
        let bound = moment_bound(a, b, est.s, p).unwrap();
        assert!(
            est.value.norm() <= bound + 3.0 * est.stderr,
            "n = {}: |m̂| = {} vs bound {bound}",
            est.s,
            est.value.norm()
        );
        tightest = tightest.min((bound + 3.0 * est.stderr) - est.value.norm());
    }

    // margin and threshold arithmetic against hand-computed values
    let rep = analyticity_margin(1.0, 1.0, p).unwrap();
    assert!((rep.margin - 0.306_852_819_440_054_7).abs() < 1e-12);
    assert!(rep.analytic && rep.all_r);

    let rep2 = analyticity_margin(1.0, 0.4, p).unwrap();
    assert!(!rep2.all_r && !rep2.analytic);
    assert!((rep2.r_minus.unwrap() - 0.254_269_301_974_667_24).abs() < 1e-9);
    assert!((rep2.r_plus.unwrap() - 0.967_133_456_185_502_6).abs() < 1e-9);

    let rep3 = analyticity_margin(1.5, 3.0f64.ln() + 0.01, p).unwrap();
    assert!(rep3.all_r);

    println!(
        "[acceptance] criterion 10 (analyticity criterion): PASS, slackest moment margin {tightest:.2e}"
    );
}
