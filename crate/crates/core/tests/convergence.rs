//! Convergence of the truncation counting measures: pools at growing window
//! sizes approach the same (non-random) density of states.

use ubm::model::{Coefficients, PhaseModel};
use ubm::spectrum::pooled_eigenphases;

#[test]
fn counting_measure_pools_converge_in_kolmogorov_distance() {
    let params = Coefficients::<f64>::balanced();
    let model = PhaseModel::uniform();
    let at_500 = pooled_eigenphases(&model, params, 0, 500, 12, 4001).unwrap();
    let at_1000 = pooled_eigenphases(&model, params, 0, 1000, 6, 4002).unwrap();
    let ks = at_500.ks_between(&at_1000);
    assert!(ks <= 0.02, "Kolmogorov distance between pools: {ks}");
}

#[test]
fn secular_pairing_growth_recovers_lyapunov_off_circle() {
    // the boundary-vector matrix elements of the cocycle grow at the
    // Lyapunov rate: (1/m) ln|⟨a(z)|Φ(z) b(z)⟩| → γ(z) off the circle,
    // which for uniform phases equals ln(1/t²) + 2 ln max(1,|z|) − ln|z|
    use ubm::model::SiteInterval;
    use ubm::scalar::cis;
    use ubm::spectrum::boundary_vectors;
    use ubm::transfer::{transfer_matrix, SpectralParameter};

    let params = Coefficients::<f64>::balanced();
    let bv = boundary_vectors(params);
    let n0 = 1000i64;
    let phases = PhaseModel::uniform()
        .sample(SiteInterval::new(0, 2 * n0).unwrap(), 77)
        .unwrap();

    // 2∫ln|z−e^{iλ}| dλ/2π = 2 ln max(1,|z|), so γ = ln 2 + |ln|z|| here
    for modulus in [1.25f64, 0.8] {
        let expect = 2.0f64.ln() + modulus.ln().abs();
        let z = SpectralParameter::from_z(cis(0.6) * modulus).unwrap();
        let mut v = [bv.b[0][0].eval(z.z()), bv.b[0][1].eval(z.z())];
        let mut log_scale = 0.0f64;
        for k in 2..n0 {
            let t = transfer_matrix(phases.eta(2 * k), phases.eta(2 * k - 1), z, params);
            v = t.mat.mul_vec(v);
            let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            if !(1e-6..=1e6).contains(&norm) {
                log_scale += norm.ln();
                v[0] /= norm;
                v[1] /= norm;
            }
        }
        let pairing = bv.bra[0][0].eval(z.z()) * v[0] + bv.bra[0][1].eval(z.z()) * v[1];
        let rate = (log_scale + pairing.norm().ln()) / n0 as f64;
        assert!(
            (rate - expect).abs() < 0.1,
            "|z| = {modulus}: pairing growth {rate} vs γ = {expect}"
        );
    }
}
