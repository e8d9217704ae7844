//! Fast self-test: a sub-minute subset of the verification suite, one
//! printed line per claim. Exit code 4 when any check fails.

use ubm::model::{build_u, factorize, Coefficients, PhaseModel, SiteInterval};
use ubm::scalar::cis;
use ubm::spectrum::{free_dos, pooled_eigenphases, secular_roots, truncate};
use ubm::transfer::{lyapunov_free, lyapunov_single, transfer_matrix, SpectralParameter};

/// Deliberate corruptions used to exercise the checks themselves.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Fault {
    None,
    /// Flip a sign in one transfer matrix before the determinant check.
    DetSign,
}

struct Outcome {
    name: &'static str,
    detail: String,
    pass: bool,
}

fn check(name: &'static str, result: Result<String, String>) -> Outcome {
    match result {
        Ok(detail) => Outcome { name, detail, pass: true },
        Err(detail) => Outcome { name, detail, pass: false },
    }
}

pub fn run(fault: Fault) -> bool {
    let params = Coefficients::<f64>::balanced();
    let mut outcomes = Vec::new();

    // transfer matrix at zero phases and z = 1 is −I
    outcomes.push(check("transfer T(0,0;1) = -identity", {
        let t = transfer_matrix(0.0, 0.0, SpectralParameter::from_angle(0.0), params);
        let dev = (t.mat.m[0][0] + 1.0).norm()
            + t.mat.m[0][1].norm()
            + t.mat.m[1][0].norm()
            + (t.mat.m[1][1] + 1.0).norm();
        if dev < 1e-12 {
            Ok(format!("deviation {dev:.1e}"))
        } else {
            Err(format!("deviation {dev:.1e}"))
        }
    }));

    // determinant invariant det T = e^{i(η_even − η_odd)}
    outcomes.push(check("transfer determinant phase identity", {
        let z = SpectralParameter::from_z(ubm::scalar::c(0.3, -1.1)).unwrap();
        let mut worst = 0.0f64;
        for k in 0..64 {
            let (ee, eo) = ((k as f64 * 0.37).sin() * 3.0, (k as f64 * 0.61).cos() * 3.0);
            let mut t = transfer_matrix(ee, eo, z, params);
            if fault == Fault::DetSign && k == 17 {
                t.mat.m[1][1] = -t.mat.m[1][1];
            }
            worst = worst.max((t.det() - cis(ee - eo)).norm());
        }
        if worst < 1e-12 {
            Ok(format!("worst {worst:.1e}"))
        } else {
            Err(format!("worst {worst:.1e}"))
        }
    }));

    // unitarity of a sampled window
    outcomes.push(check("band operator unitarity", {
        let phases =
            PhaseModel::uniform().sample(SiteInterval::new(-32, 32).unwrap(), 11).unwrap();
        let u = build_u(params, &phases, SiteInterval::new(-32, 32).unwrap()).unwrap();
        let d = u.unitarity_defect();
        if d < 1e-12 {
            Ok(format!("defect {d:.1e}"))
        } else {
            Err(format!("defect {d:.1e}"))
        }
    }));

    // factorization U = V* D S0 V
    outcomes.push(check("diagonal-times-free factorization", {
        let phases =
            PhaseModel::uniform().sample(SiteInterval::new(-31, 32).unwrap(), 5).unwrap();
        let u = build_u(params, &phases, SiteInterval::new(-31, 32).unwrap()).unwrap();
        let res = factorize(&u).unwrap().residual(&u);
        if res < 1e-12 {
            Ok(format!("residual {res:.1e}"))
        } else {
            Err(format!("residual {res:.1e}"))
        }
    }));

    // free Lyapunov closed form vs cocycle
    outcomes.push(check("free Lyapunov closed form", {
        let free = PhaseModel::free().compile().unwrap();
        let mut worst = 0.0f64;
        for lam in [0.4, 2.2, 3.0] {
            let z = SpectralParameter::from_angle(lam);
            let got = lyapunov_single(z, &free, params, 20_000, 0);
            let expect = lyapunov_free(z, params);
            worst = worst.max((got - expect).abs());
        }
        if worst < 0.01 {
            Ok(format!("worst gap {worst:.1e}"))
        } else {
            Err(format!("worst gap {worst:.1e}"))
        }
    }));

    // secular polynomial route equals dense eigensolve
    outcomes.push(check("secular = dense eigenphases", {
        let mut worst = 0.0f64;
        for (seed, (m, n)) in [(1u64, (0i64, 20i64)), (2, (1, 21)), (3, (0, 21)), (4, (1, 20))] {
            let phases = PhaseModel::uniform()
                .sample(SiteInterval::new(m, n + 1).unwrap(), seed)
                .unwrap();
            let dense = truncate(params, &phases, m, n).unwrap().eigenphases().unwrap();
            let sec = secular_roots(&phases, params, m, n).unwrap();
            for (a, b) in dense.phases().iter().zip(sec.measure.phases()) {
                worst = worst.max((a - b).abs());
            }
        }
        if worst < 1e-8 {
            Ok(format!("worst |Δphase| {worst:.1e}"))
        } else {
            Err(format!("worst |Δphase| {worst:.1e}"))
        }
    }));

    // exact balanced path identities
    outcomes.push(check("balanced path binomials exact", {
        let mut ok = true;
        for n in 1..=8usize {
            let sums = ubm::comb::path_sums_bruteforce(n, params).unwrap();
            for (j, s) in sums {
                let exact = ubm::comb::s_exact_balanced(n, j).unwrap();
                let ef = ubm::comb::rational_to_f64(&exact.value);
                if !exact.in_range || (s - ef).abs() > 1e-12 {
                    ok = false;
                }
            }
        }
        if ok {
            Ok("n ≤ 8, all offsets".into())
        } else {
            Err("binomial mismatch".into())
        }
    }));

    // quick flat-DOS check
    outcomes.push(check("flat density of states (quick pool)", {
        let pool =
            pooled_eigenphases(&PhaseModel::uniform(), params, 0, 200, 10, 99).unwrap();
        let ks = pool.ks_uniform();
        if ks < 0.03 {
            Ok(format!("KS {ks:.4}"))
        } else {
            Err(format!("KS {ks:.4}"))
        }
    }));

    // free density of states closed form at the origin
    outcomes.push(check("free DOS density at 0 is 1/(2πt)", {
        let d = free_dos(0.0, params).density;
        let expect = 1.0 / (2.0 * std::f64::consts::PI * params.t());
        let dev = (d - expect).abs();
        if dev < 1e-12 {
            Ok(format!("deviation {dev:.1e}"))
        } else {
            Err(format!("deviation {dev:.1e}"))
        }
    }));

    // analyticity margin arithmetic
    outcomes.push(check("analyticity margin arithmetic", {
        let rep = ubm::comb::analyticity_margin(1.0, 1.0, params).unwrap();
        let dev = (rep.margin - (1.0 - 2.0f64.ln())).abs();
        if dev < 1e-12 && rep.analytic && rep.all_r {
            Ok(format!("margin {:.6}", rep.margin))
        } else {
            Err(format!("margin {:.6}", rep.margin))
        }
    }));

    let mut all_pass = true;
    for o in &outcomes {
        println!("[selftest] {}: {} ({})", o.name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        all_pass &= o.pass;
    }
    println!(
        "[selftest] {} of {} checks passed",
        outcomes.iter().filter(|o| o.pass).count(),
        outcomes.len()
    );
    all_pass
}
