//! Command implementations: each resolves its config (flags override the
//! optional JSON file), runs the experiment, writes plot-ready CSV plus a
//! JSON summary, and finishes with a manifest.

use crate::config::{load_config, out_dir, parse_dist, resolve_model, resolve_params, Run};
use clap::Args;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::PathBuf;
use ubm::model::PhaseModel;
use ubm::scalar::cis;
use ubm::spectrum::{
    dos_moments, free_dos, pooled_eigenphases, predicted_support, support_check, truncate_free,
};
use ubm::thouless::{thouless_scan, RhsSource, ScanBudget};
use ubm::transfer::{lyapunov_estimate, lyapunov_free, SpectralParameter};
use ubm::{Error, Result};

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Output directory (default: $UBM_OUT_DIR or the working directory)
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Worker pool size (default: machine parallelism)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

fn model_fields(
    theta: &Option<String>,
    alpha: &Option<String>,
    eta: &Option<String>,
) -> Result<PhaseModel<f64>> {
    resolve_model(theta.as_deref(), alpha.as_deref(), eta.as_deref())
}

macro_rules! merge {
    ($cfg:expr, $args:expr, $($field:ident),+ $(,)?) => {
        $(if let Some(v) = $args.$field.clone() { $cfg.$field = v; })+
    };
}

macro_rules! merge_opt {
    ($cfg:expr, $args:expr, $($field:ident),+ $(,)?) => {
        $(if $args.$field.is_some() { $cfg.$field = $args.$field.clone(); })+
    };
}

// ---------------------------------------------------------------- dos ----

#[derive(Args, Debug)]
pub struct DosArgs {
    /// JSON config mirroring the flags of this subcommand
    #[arg(long)]
    config: Option<PathBuf>,
    /// Shorthand for the uniform-phase model (the default)
    #[arg(long)]
    uniform: bool,
    #[arg(long)]
    size: Option<i64>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    bins: Option<usize>,
    /// Fourier moment orders to estimate alongside the histogram
    #[arg(long)]
    moments: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    /// Also dump the pooled eigenphases as CSV
    #[arg(long)]
    dump_phases: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(default)]
pub struct DosConfig {
    pub size: i64,
    pub realizations: usize,
    pub bins: usize,
    pub moments: usize,
    pub seed: u64,
    pub r: Option<f64>,
    pub t: Option<f64>,
    pub theta: Option<String>,
    pub alpha: Option<String>,
    pub eta: Option<String>,
    pub dump_phases: bool,
}

impl Default for DosConfig {
    fn default() -> Self {
        DosConfig {
            size: 500,
            realizations: 100,
            bins: 256,
            moments: 8,
            seed: 1,
            r: None,
            t: None,
            theta: None,
            alpha: None,
            eta: None,
            dump_phases: false,
        }
    }
}

pub fn run_dos(common: &CommonArgs, args: &DosArgs) -> Result<()> {
    let mut cfg: DosConfig = match &args.config {
        Some(p) => load_config(p)?,
        None => DosConfig::default(),
    };
    merge!(cfg, args, size, realizations, bins, moments, seed);
    merge_opt!(cfg, args, r, t, theta, alpha, eta);
    cfg.dump_phases |= args.dump_phases;
    if cfg.size <= 4 || cfg.size % 2 != 0 {
        return Err(Error::Config(format!("size must be even and > 4, got {}", cfg.size)));
    }
    if cfg.realizations == 0 {
        return Err(Error::Config("realizations must be positive".into()));
    }

    let params = resolve_params(cfg.r, cfg.t)?;
    let model = model_fields(&cfg.theta, &cfg.alpha, &cfg.eta)?;
    let mut run = Run::new(out_dir(common.out_dir.as_deref())?);

    let pool = pooled_eigenphases(&model, params, 0, cfg.size, cfg.realizations, cfg.seed)?;
    let hist = pool.histogram(cfg.bins);
    let densities = hist.densities::<f64>();
    let flatness = hist.flatness_defect::<f64>();
    let flatness_threshold = 4.0 / (pool.len() as f64).sqrt();

    let mut csv = String::new();
    let _ = writeln!(
        csv,
        "# claim: pooled eigenphase histogram of unitary truncations estimates the density of states \
         (flat dk = dlambda/2pi for uniform phases)"
    );
    let _ = writeln!(csv, "bin_lo,bin_hi,density");
    let step = 2.0 * std::f64::consts::PI / cfg.bins as f64;
    for (i, d) in densities.iter().enumerate() {
        let lo = -std::f64::consts::PI + i as f64 * step;
        let _ = writeln!(csv, "{:.17e},{:.17e},{:.17e}", lo, lo + step, d);
    }
    run.write_text("dos_hist.csv", &csv)?;

    if cfg.dump_phases {
        let mut buf = Vec::new();
        pool.write_csv(&mut buf, "pooled eigenphases of boundary-condition truncations")
            .map_err(|e| Error::Numeric(e.to_string()))?;
        run.write_text("dos_phases.csv", &String::from_utf8(buf).unwrap())?;
    }

    let moments = dos_moments(&model, params, cfg.moments.max(1), cfg.realizations, cfg.seed)?;
    let moment_threshold = 3.0 / (cfg.realizations as f64).sqrt();

    #[derive(Serialize)]
    struct Summary {
        claim: &'static str,
        n_atoms: usize,
        ks_uniform: f64,
        flatness_defect: f64,
        flatness_threshold: f64,
        moment_threshold: f64,
        moments: Vec<(usize, f64, f64, f64)>,
    }
    let summary = Summary {
        claim: "the eigenvalue counting measure of truncations estimates the density of states; \
                uniform phases flatten it to dlambda/2pi",
        n_atoms: pool.len(),
        ks_uniform: pool.ks_uniform(),
        flatness_defect: flatness,
        flatness_threshold,
        moment_threshold,
        moments: moments
            .iter()
            .map(|m| (m.s, m.value.re, m.value.im, m.stderr))
            .collect(),
    };
    run.write_json("dos_summary.json", &summary)?;

    println!(
        "dos: {} atoms, KS to uniform {:.4}, histogram flatness {:.2e} (threshold {:.2e})",
        pool.len(),
        summary.ks_uniform,
        flatness,
        flatness_threshold
    );
    let seed = cfg.seed;
    run.finish("dos", cfg, seed)
}

// ----------------------------------------------------------- lyapunov ----

#[derive(Args, Debug)]
pub struct LyapunovArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated quasi-energies λ (z = modulus·e^{iλ})
    #[arg(long)]
    lambdas: Option<String>,
    /// Number of uniformly spaced λ when --lambdas is absent
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    z_modulus: Option<f64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    /// Deterministic free case (all phases zero)
    #[arg(long)]
    free: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(default)]
pub struct LyapunovConfig {
    pub lambdas: Option<String>,
    pub grid: usize,
    pub z_modulus: f64,
    pub steps: u64,
    pub realizations: usize,
    pub seed: u64,
    pub r: Option<f64>,
    pub t: Option<f64>,
    pub theta: Option<String>,
    pub alpha: Option<String>,
    pub eta: Option<String>,
    pub free: bool,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        LyapunovConfig {
            lambdas: None,
            grid: 16,
            z_modulus: 1.0,
            steps: 100_000,
            realizations: 32,
            seed: 1,
            r: None,
            t: None,
            theta: None,
            alpha: None,
            eta: None,
            free: false,
        }
    }
}

fn parse_lambdas(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad λ value '{s}'")))
        })
        .collect()
}

pub fn run_lyapunov(common: &CommonArgs, args: &LyapunovArgs) -> Result<()> {
    let mut cfg: LyapunovConfig = match &args.config {
        Some(p) => load_config(p)?,
        None => LyapunovConfig::default(),
    };
    merge!(cfg, args, z_modulus, steps, realizations, seed, grid);
    merge_opt!(cfg, args, lambdas, r, t, theta, alpha, eta);
    cfg.free |= args.free;
    if cfg.steps < 1000 {
        return Err(Error::Config("steps must be at least 10^3".into()));
    }

    let params = resolve_params(cfg.r, cfg.t)?;
    let model = if cfg.free { PhaseModel::free() } else { model_fields(&cfg.theta, &cfg.alpha, &cfg.eta)? };
    let lambdas = match &cfg.lambdas {
        Some(text) => parse_lambdas(text)?,
        None => (0..cfg.grid)
            .map(|i| -std::f64::consts::PI + (i as f64 + 0.5) * 2.0 * std::f64::consts::PI / cfg.grid as f64)
            .collect(),
    };

    let mut run = Run::new(out_dir(common.out_dir.as_deref())?);
    let mut csv = String::new();
    let _ = writeln!(
        csv,
        "# claim: cocycle growth rate per transfer step; uniform phases give gamma = ln(1/t^2), \
         the free case vanishes on the band |lambda| <= arccos(r^2-t^2)"
    );
    let _ = writeln!(csv, "lambda,z_re,z_im,gamma,stderr,gamma_free_closed_form");
    for (i, &lam) in lambdas.iter().enumerate() {
        let z = SpectralParameter::from_z(cis(lam) * cfg.z_modulus)
            .map_err(|_| Error::Config("z modulus must be nonzero".into()))?;
        let (gamma, stderr) = if cfg.free {
            let compiled = model.compile()?;
            (ubm::transfer::lyapunov_single(z, &compiled, params, cfg.steps, 0), 0.0)
        } else {
            let est = lyapunov_estimate(
                z,
                &model,
                params,
                cfg.steps,
                cfg.realizations,
                cfg.seed.wrapping_add(i as u64),
            )?;
            (est.gamma, est.stderr)
        };
        let free_value = lyapunov_free(z, params);
        let _ = writeln!(
            csv,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            lam,
            z.z().re,
            z.z().im,
            gamma,
            stderr,
            free_value
        );
    }
    run.write_text("lyapunov.csv", &csv)?;
    println!("lyapunov: {} grid points written", lambdas.len());
    let seed = cfg.seed;
    run.finish("lyapunov", cfg, seed)
}

// ------------------------------------------------------- thouless-scan ----

#[derive(Args, Debug)]
pub struct ThoulessArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Grid: `circle:<n>`, `ring:<modulus>:<n>`, or `list:re,im;re,im;...`
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Pooled-measure window size for the empirical right-hand side
    #[arg(long)]
    measure_size: Option<i64>,
    #[arg(long)]
    measure_realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    /// Free case: deterministic cocycle against the closed-form measure
    #[arg(long)]
    free: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(default)]
pub struct ThoulessConfig {
    pub grid: String,
    pub steps: u64,
    pub realizations: usize,
    pub measure_size: i64,
    pub measure_realizations: usize,
    pub seed: u64,
    pub r: Option<f64>,
    pub t: Option<f64>,
    pub theta: Option<String>,
    pub alpha: Option<String>,
    pub eta: Option<String>,
    pub free: bool,
}

impl Default for ThoulessConfig {
    fn default() -> Self {
        ThoulessConfig {
            grid: "ring:0.8:8".into(),
            steps: 20_000,
            realizations: 16,
            measure_size: 500,
            measure_realizations: 50,
            seed: 1,
            r: None,
            t: None,
            theta: None,
            alpha: None,
            eta: None,
            free: false,
        }
    }
}

fn parse_grid(text: &str) -> Result<Vec<SpectralParameter<f64>>> {
    let bad = |msg: &str| Error::Config(format!("grid '{text}': {msg}"));
    let parts: Vec<&str> = text.split(':').collect();
    match parts[0] {
        "circle" | "ring" => {
            let (modulus, count_text) = if parts[0] == "circle" {
                if parts.len() != 2 {
                    return Err(bad("expected circle:<n>"));
                }
                (1.0, parts[1])
            } else {
                if parts.len() != 3 {
                    return Err(bad("expected ring:<modulus>:<n>"));
                }
                (parts[1].parse::<f64>().map_err(|_| bad("bad modulus"))?, parts[2])
            };
            let n: usize = count_text.parse().map_err(|_| bad("bad count"))?;
            if n == 0 {
                return Err(bad("count must be positive"));
            }
            (0..n)
                .map(|i| {
                    let lam = -std::f64::consts::PI
                        + (i as f64 + 0.5) * 2.0 * std::f64::consts::PI / n as f64;
                    SpectralParameter::from_z(cis(lam) * modulus)
                        .map_err(|_| bad("modulus must be nonzero"))
                })
                .collect()
        }
        "list" => {
            if parts.len() != 2 {
                return Err(bad("expected list:re,im;re,im"));
            }
            parts[1]
                .split(';')
                .map(|pair| {
                    let nums: Vec<&str> = pair.split(',').collect();
                    if nums.len() != 2 {
                        return Err(bad("each entry must be re,im"));
                    }
                    let re = nums[0].trim().parse::<f64>().map_err(|_| bad("bad re"))?;
                    let im = nums[1].trim().parse::<f64>().map_err(|_| bad("bad im"))?;
                    SpectralParameter::from_z(ubm::scalar::c(re, im)).map_err(|e| match e {
                        Error::Domain(m) => bad(&m),
                        other => other,
                    })
                })
                .collect()
        }
        other => Err(bad(&format!("unknown grid kind '{other}'"))),
    }
}

pub fn run_thouless(common: &CommonArgs, args: &ThoulessArgs) -> Result<()> {
    let mut cfg: ThoulessConfig = match &args.config {
        Some(p) => load_config(p)?,
        None => ThoulessConfig::default(),
    };
    merge!(cfg, args, steps, realizations, measure_size, measure_realizations, seed, grid);
    merge_opt!(cfg, args, r, t, theta, alpha, eta);
    cfg.free |= args.free;

    let params = resolve_params(cfg.r, cfg.t)?;
    let zs = parse_grid(&cfg.grid)?;
    let mut run = Run::new(out_dir(common.out_dir.as_deref())?);

    let budget = ScanBudget {
        n_steps: cfg.steps,
        n_realizations: cfg.realizations,
        seed: cfg.seed,
    };
    let report = if cfg.free {
        thouless_scan(&zs, &PhaseModel::free(), params, &budget, RhsSource::FreeClosedForm)?
    } else {
        let model = model_fields(&cfg.theta, &cfg.alpha, &cfg.eta)?;
        let pool = pooled_eigenphases(
            &model,
            params,
            0,
            cfg.measure_size,
            cfg.measure_realizations,
            cfg.seed ^ 0x7453,
        )?;
        thouless_scan(&zs, &model, params, &budget, RhsSource::Empirical(&pool))?
    };

    let mut buf = Vec::new();
    report
        .write_csv(
            &mut buf,
            "gamma(z) = 2 int ln|z-e^{i lambda}| dk + ln(1/t^2) - ln|z| (cocycle vs density of states)",
        )
        .map_err(|e| Error::Numeric(e.to_string()))?;
    run.write_text("thouless.csv", &String::from_utf8(buf).unwrap())?;
    #[derive(Serialize)]
    struct Summary<'a> {
        claim: &'static str,
        #[serde(flatten)]
        report: &'a ubm::thouless::ThoulessReport,
    }
    run.write_json(
        "thouless_summary.json",
        &Summary {
            claim: "gamma(z) = 2 int ln|z - e^{i lambda}| dk + ln(1/t^2) - ln|z|",
            report: &report,
        },
    )?;
    println!("thouless-scan: {} points, max |gap| = {:.6}", report.points.len(), report.max_abs_gap);
    let seed = cfg.seed;
    run.finish("thouless-scan", cfg, seed)
}

// ---------------------------------------------------------- free-exact ----

#[derive(Args, Debug)]
pub struct FreeExactArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of λ grid points for the closed forms
    #[arg(long)]
    points: Option<usize>,
    /// Also diagonalize a free truncation of this size and compare N
    #[arg(long)]
    empirical_size: Option<i64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(default)]
pub struct FreeExactConfig {
    pub points: usize,
    pub empirical_size: Option<i64>,
    pub r: Option<f64>,
    pub t: Option<f64>,
}

impl Default for FreeExactConfig {
    fn default() -> Self {
        FreeExactConfig { points: 512, empirical_size: None, r: None, t: None }
    }
}

pub fn run_free_exact(common: &CommonArgs, args: &FreeExactArgs) -> Result<()> {
    let mut cfg: FreeExactConfig = match &args.config {
        Some(p) => load_config(p)?,
        None => FreeExactConfig::default(),
    };
    merge!(cfg, args, points);
    merge_opt!(cfg, args, empirical_size, r, t);

    let params = resolve_params(cfg.r, cfg.t)?;
    let mut run = Run::new(out_dir(common.out_dir.as_deref())?);

    let mut csv = String::new();
    let _ = writeln!(
        csv,
        "# claim: free operator closed forms: band density |sin|/2pi sqrt(t^4-(r^2-cos)^2), \
         integrated N0 via arccos((r^2-cos)/t^2), Lyapunov arccosh((r^2-cos)/t^2) off the band"
    );
    let _ = writeln!(csv, "lambda,density,integrated,gamma0");
    for i in 0..cfg.points {
        let lam = -std::f64::consts::PI
            + (i as f64 + 0.5) * 2.0 * std::f64::consts::PI / cfg.points as f64;
        let fd = free_dos(lam, params);
        let g0 = lyapunov_free(SpectralParameter::from_angle(lam), params);
        let _ = writeln!(csv, "{:.17e},{:.17e},{:.17e},{:.17e}", lam, fd.density, fd.integrated, g0);
    }
    run.write_text("free.csv", &csv)?;

    #[derive(Serialize)]
    struct Summary {
        claim: &'static str,
        band_edge: f64,
        empirical_size: Option<i64>,
        sup_n_gap: Option<f64>,
    }
    let mut summary = Summary {
        claim: "free-operator closed forms: band arc arccos(r^2-t^2), N0 branches, gamma0",
        band_edge: params.band_edge(),
        empirical_size: cfg.empirical_size,
        sup_n_gap: None,
    };

    if let Some(size) = cfg.empirical_size {
        if size <= 4 || size % 2 != 0 {
            return Err(Error::Config(format!("empirical size must be even and > 4, got {size}")));
        }
        let meas = truncate_free(params, 0, size)?.eigenphases()?;
        let gap = meas.ks_to(|l| free_dos(l, params).integrated);
        summary.sup_n_gap = Some(gap);
        let mut cmp = String::new();
        let _ = writeln!(
            cmp,
            "# claim: eigenvalue counting of the free truncation converges to the closed-form N0"
        );
        let _ = writeln!(cmp, "lambda,n_empirical,n_closed_form");
        for &l in meas.phases() {
            let _ = writeln!(
                cmp,
                "{:.17e},{:.17e},{:.17e}",
                l,
                meas.integrated(l),
                free_dos(l, params).integrated
            );
        }
        run.write_text("free_empirical.csv", &cmp)?;
        println!("free-exact: sup |N_emp - N0| = {:.5} at size {size}", gap);
    } else {
        println!("free-exact: {} grid points written", cfg.points);
    }
    run.write_json("free_summary.json", &summary)?;
    run.finish("free-exact", cfg, 0)
}

// --------------------------------------------------------------- paths ----

#[derive(Args, Debug)]
pub struct PathsArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Step count n of the table S_{n-1}(j)
    #[arg(long)]
    n: Option<usize>,
    /// Emit exact balanced-case rationals (needs r = t)
    #[arg(long)]
    exact: bool,
    /// Cross-check against brute-force enumeration (n ≤ 12)
    #[arg(long)]
    brute: bool,
    /// Comma-separated n values for the normalized-ratio convergence table
    #[arg(long)]
    ratios: Option<String>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(default)]
pub struct PathsConfig {
    pub n: usize,
    pub exact: bool,
    pub brute: bool,
    pub ratios: Option<String>,
    pub r: Option<f64>,
    pub t: Option<f64>,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig { n: 8, exact: false, brute: false, ratios: None, r: None, t: None }
    }
}

pub fn run_paths(common: &CommonArgs, args: &PathsArgs) -> Result<()> {
    let mut cfg: PathsConfig = match &args.config {
        Some(p) => load_config(p)?,
        None => PathsConfig::default(),
    };
    merge!(cfg, args, n);
    merge_opt!(cfg, args, ratios, r, t);
    cfg.exact |= args.exact;
    cfg.brute |= args.brute;

    let params = resolve_params(cfg.r, cfg.t)?;
    let balanced = (params.r() - params.t()).abs() < 1e-12;
    if cfg.exact && !balanced {
        return Err(Error::Config(
            "--exact needs the balanced case r = t = 1/sqrt(2)".into(),
        ));
    }
    let mut run = Run::new(out_dir(common.out_dir.as_deref())?);

    let n = cfg.n;
    let (plus, minus) = ubm::comb::gen_poly(n, params);
    let brute = if cfg.brute || cfg.exact {
        Some(ubm::comb::path_sums_bruteforce(n.min(12), params)?)
    } else {
        None
    };

    let mut csv = String::new();
    let _ = writeln!(
        csv,
        "# claim: weighted parity-constrained path sums S_(n-1)(j); generating-function route{}",
        if cfg.exact { " with exact balanced binomials 2^-n C(2n-1, .)" } else { "" }
    );
    let mut header = String::from("j,s");
    if brute.is_some() {
        header.push_str(",s_bruteforce");
    }
    if cfg.exact {
        header.push_str(",s_exact");
    }
    let _ = writeln!(csv, "{header}");
    let mut max_dev = 0.0f64;
    for j in -(2 * n as i64)..=(2 * n as i64) {
        let s = if j.rem_euclid(2) == 0 { plus.coeff(j) } else { minus.coeff(j) };
        let mut row = format!("{j},{s:.17e}");
        if let Some(bf) = &brute {
            let b = bf.get(&j).copied().unwrap_or(0.0);
            max_dev = max_dev.max((s - b).abs());
            let _ = write!(row, ",{b:.17e}");
        }
        if cfg.exact {
            let ex = ubm::comb::s_exact_balanced(n, j)?;
            let _ = write!(row, ",{}", ex.value);
            let exf = ubm::comb::rational_to_f64(&ex.value);
            max_dev = max_dev.max((s - exf).abs());
        }
        let _ = writeln!(csv, "{row}");
    }
    run.write_text("paths_table.csv", &csv)?;

    #[derive(Serialize)]
    struct Summary {
        claim: &'static str,
        n: usize,
        max_route_deviation: f64,
        ratios: Vec<(usize, f64, f64)>,
    }
    let mut summary = Summary {
        claim: "path sums S_(n-1)(j) by generating-function recursion, exact binomials at r = t",
        n,
        max_route_deviation: max_dev,
        ratios: Vec::new(),
    };

    if let Some(list) = &cfg.ratios {
        let mut csv = String::new();
        let _ = writeln!(
            csv,
            "# claim: S_(n-1)(0) sqrt(n)/(r+t)^(2n) converges (central path sum asymptotics)"
        );
        let _ = writeln!(csv, "n,s_center,normalized_ratio");
        for tok in list.split(',') {
            let nn: usize = tok
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad ratio n '{tok}'")))?;
            let s = ubm::comb::s_center(nn, params)?;
            let ratio = s * (nn as f64).sqrt() / (params.r() + params.t()).powi(2 * nn as i32);
            let _ = writeln!(csv, "{nn},{s:.17e},{ratio:.17e}");
            summary.ratios.push((nn, s, ratio));
        }
        run.write_text("paths_ratio.csv", &csv)?;
    }

    run.write_json("paths_summary.json", &summary)?;
    println!("paths: table for n = {n}, max route deviation {max_dev:.2e}");
    run.finish("paths", cfg, 0)
}

// ------------------------------------------------------- support-check ----

#[derive(Args, Debug)]
pub struct SupportArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// i.i.d. η distribution, e.g. arc:0:0.3
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    size: Option<i64>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Edge tolerance for the two-sided support comparison
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    dump_phases: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(default)]
pub struct SupportConfig {
    pub eta: String,
    pub size: i64,
    pub realizations: usize,
    pub tol: f64,
    pub seed: u64,
    pub r: Option<f64>,
    pub t: Option<f64>,
    pub dump_phases: bool,
}

impl Default for SupportConfig {
    fn default() -> Self {
        SupportConfig {
            eta: "arc:0:0.3".into(),
            size: 500,
            realizations: 20,
            tol: 0.05,
            seed: 1,
            r: None,
            t: None,
            dump_phases: false,
        }
    }
}

pub fn run_support(common: &CommonArgs, args: &SupportArgs) -> Result<()> {
    let mut cfg: SupportConfig = match &args.config {
        Some(p) => load_config(p)?,
        None => SupportConfig::default(),
    };
    merge!(cfg, args, size, realizations, tol, seed);
    merge_opt!(cfg, args, r, t);
    if let Some(e) = &args.eta {
        cfg.eta = e.clone();
    }
    cfg.dump_phases |= args.dump_phases;

    let params = resolve_params(cfg.r, cfg.t)?;
    let mu = parse_dist(&cfg.eta)?;
    let model = PhaseModel::IidEta { eta: mu.clone() };
    let mut run = Run::new(out_dir(common.out_dir.as_deref())?);

    let pool = pooled_eigenphases(&model, params, 0, cfg.size, cfg.realizations, cfg.seed)?;
    let sigma = predicted_support(&mu, params);
    let outliers = support_check(&pool, &sigma.dilate(0.0), cfg.tol);
    let coverage = support_check(&pool, &sigma.dilate(-cfg.tol), cfg.tol);

    #[derive(Serialize)]
    struct Summary {
        claim: &'static str,
        predicted_arcs: Vec<(f64, f64)>,
        predicted_total_len: f64,
        outliers: ubm::spectrum::SupportReport,
        eroded_coverage: f64,
    }
    let summary = Summary {
        claim: "the almost-sure spectrum is exp(i supp mu) Sigma0 for i.i.d. eta ~ mu",
        predicted_arcs: sigma.arcs().iter().map(|a| (a.start, a.end())).collect(),
        predicted_total_len: sigma.total_len(),
        outliers: outliers.clone(),
        eroded_coverage: coverage.coverage_fraction,
    };
    run.write_json("support_summary.json", &summary)?;

    if cfg.dump_phases {
        let mut buf = Vec::new();
        pool.write_csv(
            &mut buf,
            "pooled eigenphases vs predicted support exp(i supp mu) Sigma0",
        )
        .map_err(|e| Error::Numeric(e.to_string()))?;
        run.write_text("support_phases.csv", &String::from_utf8(buf).unwrap())?;
    }

    println!(
        "support-check: {:.2}% inside (tol {}), eroded coverage {:.2}%, max signed distance {:.4}",
        100.0 * (1.0 - outliers.outlier_fraction),
        cfg.tol,
        100.0 * coverage.coverage_fraction,
        outliers.max_signed_distance
    );
    let seed = cfg.seed;
    run.finish("support-check", cfg, seed)
}

// --------------------------------------------------------- analyticity ----

#[derive(Args, Debug)]
pub struct AnalyticityArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fourier amplitude A ≥ 1
    #[arg(long)]
    amp: Option<f64>,
    /// Fourier decay rate B > 0
    #[arg(long)]
    decay: Option<f64>,
    /// Verify the moment chain with this i.i.d. η density (fourier:...)
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    moment_orders: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(default)]
pub struct AnalyticityConfig {
    pub amp: f64,
    pub decay: f64,
    pub eta: Option<String>,
    pub moment_orders: usize,
    pub realizations: usize,
    pub seed: u64,
    pub r: Option<f64>,
    pub t: Option<f64>,
}

impl Default for AnalyticityConfig {
    fn default() -> Self {
        AnalyticityConfig {
            amp: 1.0,
            decay: 1.0,
            eta: None,
            moment_orders: 8,
            realizations: 10_000,
            seed: 1,
            r: None,
            t: None,
        }
    }
}

pub fn run_analyticity(common: &CommonArgs, args: &AnalyticityArgs) -> Result<()> {
    let mut cfg: AnalyticityConfig = match &args.config {
        Some(p) => load_config(p)?,
        None => AnalyticityConfig::default(),
    };
    merge!(cfg, args, amp, decay, moment_orders, realizations, seed);
    merge_opt!(cfg, args, eta, r, t);

    let params = resolve_params(cfg.r, cfg.t)?;
    let report = ubm::comb::analyticity_margin(cfg.amp, cfg.decay, params)?;
    let mut run = Run::new(out_dir(common.out_dir.as_deref())?);

    #[derive(Serialize)]
    struct Summary {
        claim: &'static str,
        amp: f64,
        decay: f64,
        r: f64,
        t: f64,
        report: ubm::comb::AnalyticityReport,
    }
    run.write_json(
        "analyticity_summary.json",
        &Summary {
            claim: "B > ln(1+2rt) + ln A forces an analytic density of states",
            amp: cfg.amp,
            decay: cfg.decay,
            r: params.r(),
            t: params.t(),
            report: report.clone(),
        },
    )?;

    if let Some(eta) = &cfg.eta {
        let mu = parse_dist(eta)?;
        let model = PhaseModel::IidEta { eta: mu };
        let moments =
            dos_moments(&model, params, cfg.moment_orders.max(1), cfg.realizations, cfg.seed)?;
        let mut csv = String::new();
        let _ = writeln!(
            csv,
            "# claim: |E<phi|U^n phi>| <= A^n e^(-Bn) S_(n-1)(0) for eta densities with \
             |fhat(n)| <= A e^(-Bn)"
        );
        let _ = writeln!(csv, "n,m_hat_abs,stderr,bound,bound_plus_3se,pass");
        for est in moments.iter().skip(1) {
            let bound = ubm::comb::moment_bound(cfg.amp, cfg.decay, est.s, params)?;
            let limit = bound + 3.0 * est.stderr;
            let _ = writeln!(
                csv,
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{}",
                est.s,
                est.value.norm(),
                est.stderr,
                bound,
                limit,
                est.value.norm() <= limit
            );
        }
        run.write_text("analyticity_moments.csv", &csv)?;
    }

    println!(
        "analyticity: margin = {:.6} ({}), all-r: {}",
        report.margin,
        if report.analytic { "analytic" } else { "criterion fails" },
        report.all_r
    );
    let seed = cfg.seed;
    run.finish("analyticity", cfg, seed)
}
