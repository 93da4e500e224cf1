//! Configuration-driven experiment runner behind the `macromech` binary:
//! computes sweep data, writes full-precision CSV plus a JSON run manifest,
//! and optionally checks the measure bound on every emitted row.
//!
//! Identical config + seed produce byte-identical CSV output; only the
//! manifest carries the wall time.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::conditioning::{condition_at, evolve_joint, measurement_amplitude, MeasurementSetting, SystemParams};
use crate::config::{range_values, ExperimentConfig};
use crate::error::{Error, Result};
use crate::fidelity::{cat_state, optimize_lambda, simplified_state, state_fidelity, CatSpec, Parity};
use crate::macroscopicity::{mean_excitations, measure_I, measure_I_mixture, MixtureState};
use crate::subtraction;
use crate::trajectories::{ensemble_condition, ensemble_mean_photons, run_ensemble, NoiseParams, ThermalInit};

/// Tolerance of the per-row bound check `I <= <b†b> + 1e-9`.
const BOUND_TOL: f64 = 1e-9;

/// Runtime options from the CLI.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub seed_override: Option<u64>,
    pub debug_invariants: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { out_dir: PathBuf::from("."), seed_override: None, debug_invariants: false }
    }
}

/// Paths written by a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wigner_csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub musweep_csv: Option<PathBuf>,
}

/// Least-squares fit of `a + c sin(θ + b)` through the linearization
/// `a + P sin θ + Q cos θ` (exact; normal equations), then `c = |(P, Q)|`,
/// `b = atan2(Q, P)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SinusoidFit {
    pub a: f64,
    pub c: f64,
    pub b: f64,
}

pub fn fit_sinusoid(thetas: &[f64], values: &[f64]) -> Result<SinusoidFit> {
    if thetas.len() != values.len() || thetas.len() < 3 {
        return Err(Error::Config("sinusoid fit needs >= 3 samples".into()));
    }
    // normal equations for the design (1, sin θ, cos θ)
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for (&t, &y) in thetas.iter().zip(values) {
        let row = [1.0, t.sin(), t.cos()];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            rhs[i] += row[i] * y;
        }
    }
    // 3x3 Gaussian elimination with partial pivoting
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        if m[col][col].abs() < 1e-12 {
            return Err(Error::NonConvergence("singular sinusoid normal equations".into()));
        }
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for j in col..3 {
                m[row][j] -= f * m[col][j];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut sol = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut v = rhs[row];
        for j in row + 1..3 {
            v -= m[row][j] * sol[j];
        }
        sol[row] = v / m[row][row];
    }
    let (a, p, q) = (sol[0], sol[1], sol[2]);
    Ok(SinusoidFit { a, c: p.hypot(q), b: q.atan2(p) })
}

/// Gap minimizer for one measurement phase.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThetaCrossing {
    pub theta: f64,
    pub xbar: f64,
    pub gap: f64,
}

/// The homodyne-signal value at which `I` approaches `<b†b>`, per phase
/// angle, with the spread across angles.
#[derive(Debug, Clone, Serialize)]
pub struct CrossingReport {
    pub xbar: f64,
    pub gap_at_xbar: f64,
    pub per_theta: Vec<ThetaCrossing>,
    pub max_spread: f64,
}

fn golden_min(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INVPHI * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > xtol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INVPHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (a + b);
    (xm, f(xm))
}

/// Locate, for each phase angle, the homodyne signal minimizing the gap
/// `<b†b> - I` inside `bracket` (to 1e-5), and report the spread across
/// angles. Fails when a minimizer sits on the bracket boundary (no
/// interior crossing bracketed).
pub fn find_crossing(
    params: &SystemParams,
    thetas: &[f64],
    bracket: (f64, f64),
    xtol: f64,
) -> Result<CrossingReport> {
    if thetas.is_empty() {
        return Err(Error::Config("find_crossing needs at least one theta".into()));
    }
    if params.k == 0.0 {
        return Err(Error::NonConvergence(
            "no crossing bracketed: I vanishes identically at k = 0".into(),
        ));
    }
    let gap = |x: f64, theta: f64| -> Result<f64> {
        let st = condition_at(params, &MeasurementSetting::Homodyne { x, theta })?;
        Ok(mean_excitations(&st) - measure_I(&st))
    };
    let mut per_theta = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let (xbar, g) = golden_min(|x| gap(x, theta).unwrap_or(f64::INFINITY), bracket.0, bracket.1, xtol);
        if xbar - bracket.0 < 2.0 * xtol || bracket.1 - xbar < 2.0 * xtol {
            return Err(Error::NonConvergence(format!(
                "no crossing bracketed in [{}, {}] at theta = {theta}",
                bracket.0, bracket.1
            )));
        }
        per_theta.push(ThetaCrossing { theta, xbar, gap: g });
    }
    let xs: Vec<f64> = per_theta.iter().map(|t| t.xbar).collect();
    let max_spread = xs.iter().cloned().fold(f64::MIN, f64::max)
        - xs.iter().cloned().fold(f64::MAX, f64::min);
    Ok(CrossingReport {
        xbar: per_theta[0].xbar,
        gap_at_xbar: per_theta[0].gap,
        per_theta,
        max_spread,
    })
}

fn fmt_row(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
}

fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{}", fmt_row(row))?;
    }
    Ok(())
}

struct InvariantGuard {
    enabled: bool,
}

impl InvariantGuard {
    fn check_bound(&self, i: f64, n: f64, context: &str) -> Result<()> {
        if self.enabled && i > n + BOUND_TOL {
            return Err(Error::Invariant(format!(
                "I = {i:.12e} exceeds <b†b> = {n:.12e} at {context}"
            )));
        }
        Ok(())
    }

    fn check_norm(&self, norm_sq: f64, context: &str) -> Result<()> {
        if self.enabled && (norm_sq - 1.0).abs() > 1e-10 {
            return Err(Error::Invariant(format!(
                "normalization residue {:.3e} at {context}",
                norm_sq - 1.0
            )));
        }
        Ok(())
    }
}

/// Run one configured experiment, writing `<name>.csv`,
/// `<name>.manifest.json` and, for grid experiments, `<name>.wigner.csv`
/// under the output directory.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary> {
    cfg.validate()?;
    let started = Instant::now();
    let seed = opts.seed_override.unwrap_or(cfg.seed);
    let guard = InvariantGuard { enabled: opts.debug_invariants };
    std::fs::create_dir_all(&opts.out_dir)?;
    let stem = opts.out_dir.join(&cfg.output.name);
    let csv_path = stem.with_extension("csv");
    let manifest_path = stem.with_extension("manifest.json");

    let mut wigner_path = None;
    let mut musweep_path = None;
    let results: serde_json::Value;

    match cfg.experiment.as_str() {
        "sweep-k" => {
            let s = cfg.sweep_k.as_ref().unwrap();
            let ks = range_values(s.k_min, s.k_max, s.k_step);
            let settings: Vec<(f64, f64, MeasurementSetting)> = if let Some(h) = &s.homodyne {
                h.thetas
                    .iter()
                    .map(|&t| (t, 0.0, MeasurementSetting::Homodyne { x: h.x, theta: t }))
                    .collect()
            } else {
                s.heterodyne
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(|c| {
                        let sig = c.value();
                        (sig.re, sig.im, MeasurementSetting::Heterodyne { sigma: sig })
                    })
                    .collect()
            };
            let points: Vec<(f64, &(f64, f64, MeasurementSetting))> = ks
                .iter()
                .flat_map(|&k| settings.iter().map(move |s| (k, s)))
                .collect();
            let rows: Vec<Vec<f64>> = points
                .par_iter()
                .map(|(k, (tag1, tag2, setting))| {
                    let p = cfg.system.params_with_k(*k)?;
                    let st = condition_at(&p, setting)?;
                    guard.check_norm(st.norm_sq(), &format!("k = {k}"))?;
                    let i = measure_I(&st);
                    let n = mean_excitations(&st);
                    guard.check_bound(i, n, &format!("k = {k}"))?;
                    Ok(vec![*k, *tag1, *tag2, i, n])
                })
                .collect::<Result<_>>()?;
            let header = if s.homodyne.is_some() {
                "k,theta,unused,I,mean_excitations"
            } else {
                "k,sigma_re,sigma_im,I,mean_excitations"
            };
            write_csv(&csv_path, header, &rows)?;
            results = json!({ "rows": rows.len() });
        }

        "sweep-x-theta" => {
            let s = cfg.sweep_x_theta.as_ref().unwrap();
            let xs = range_values(s.x_min, s.x_max, s.x_step);
            let params = cfg.system.params()?;
            let points: Vec<(f64, f64)> =
                xs.iter().flat_map(|&x| s.thetas.iter().map(move |&t| (x, t))).collect();
            let rows: Vec<Vec<f64>> = points
                .par_iter()
                .map(|&(x, theta)| {
                    let st = condition_at(&params, &MeasurementSetting::Homodyne { x, theta })?;
                    guard.check_norm(st.norm_sq(), &format!("x = {x}"))?;
                    let i = measure_I(&st);
                    let n = mean_excitations(&st);
                    guard.check_bound(i, n, &format!("x = {x}, theta = {theta}"))?;
                    Ok(vec![x, theta, i, n])
                })
                .collect::<Result<_>>()?;
            write_csv(&csv_path, "x,theta,I,mean_excitations", &rows)?;
            results = if s.find_crossing {
                let report = find_crossing(&params, &s.thetas, (s.x_min, s.x_max), 1e-5)?;
                json!({ "rows": rows.len(), "crossing": report })
            } else {
                json!({ "rows": rows.len() })
            };
        }

        "sweep-sigma" => {
            let s = cfg.sweep_sigma.as_ref().unwrap();
            let ks = range_values(s.k_min, s.k_max, s.k_step);
            let points: Vec<(f64, C64)> = ks
                .iter()
                .flat_map(|&k| s.sigmas.iter().map(move |c| (k, c.value())))
                .collect();
            let rows: Vec<Vec<f64>> = points
                .par_iter()
                .map(|&(k, sigma)| {
                    let p = cfg.system.params_with_k(k)?;
                    let st = condition_at(&p, &MeasurementSetting::Heterodyne { sigma })?;
                    guard.check_norm(st.norm_sq(), &format!("k = {k}"))?;
                    let i = measure_I(&st);
                    let n = mean_excitations(&st);
                    guard.check_bound(i, n, &format!("k = {k}, sigma = {sigma}"))?;
                    Ok(vec![k, sigma.re, sigma.im, i, n])
                })
                .collect::<Result<_>>()?;
            write_csv(&csv_path, "k,sigma_re,sigma_im,I,mean_excitations", &rows)?;
            results = json!({ "rows": rows.len() });
        }

        "wigner-grid" => {
            let g = cfg.wigner_grid.as_ref().unwrap();
            let params = cfg.system.params()?;
            let setting = if let Some(x) = g.homodyne_x {
                MeasurementSetting::Homodyne { x, theta: g.homodyne_theta.unwrap_or(0.0) }
            } else {
                MeasurementSetting::Heterodyne { sigma: g.heterodyne_sigma.unwrap().value() }
            };
            let (mix, i, n) = match g.kappa {
                None if g.nbar == 0.0 => {
                    let st = condition_at(&params, &setting)?;
                    guard.check_norm(st.norm_sq(), "wigner state")?;
                    let (i, n) = (measure_I(&st), mean_excitations(&st));
                    (MixtureState::pure(st), i, n)
                }
                _ => {
                    let noise_cfg = cfg.noise.clone().unwrap_or_default();
                    let noise = NoiseParams {
                        kappa: g.kappa.unwrap_or(0.0),
                        dtau: noise_cfg.dtau,
                        n_traj: noise_cfg.n_traj,
                        seed,
                    };
                    let init = ThermalInit { beta: params.beta, nbar: g.nbar };
                    let trajs = run_ensemble(&params, &noise, &init)?;
                    let mix = ensemble_condition(&trajs, &setting)?.merged(1e-9);
                    let i = measure_I_mixture(&mix);
                    let n = mix.mean_excitations();
                    (mix, i, n)
                }
            };
            guard.check_bound(i, n, "wigner grid state")?;

            let res = range_values(g.re_min, g.re_max, g.step);
            let ims = range_values(g.im_min, g.im_max, g.step);
            let grid_rows: Vec<Vec<(f64, f64, f64)>> = res
                .par_iter()
                .map(|&re| {
                    ims.iter().map(|&im| (re, im, mix.wigner(C64::new(re, im)))).collect()
                })
                .collect();
            let wpath = opts.out_dir.join(format!("{}.wigner.csv", cfg.output.name));
            {
                let mut out = std::io::BufWriter::new(std::fs::File::create(&wpath)?);
                writeln!(out, "re,im,w")?;
                for row in &grid_rows {
                    for &(re, im, w) in row {
                        writeln!(out, "{}", fmt_row(&[re, im, w]))?;
                    }
                }
            }
            wigner_path = Some(wpath);
            let (mut min_w, mut at) = (f64::INFINITY, (0.0, 0.0));
            for row in &grid_rows {
                for &(re, im, w) in row {
                    if w < min_w {
                        min_w = w;
                        at = (re, im);
                    }
                }
            }
            write_csv(&csv_path, "I,mean_excitations,min_w", &[vec![i, n, min_w]])?;
            results = json!({
                "i_measure": i,
                "mean_excitations": n,
                "min_w": min_w,
                "min_w_at": [at.0, at.1],
            });
        }

        "fidelity-opt" => {
            let f = cfg.fidelity_opt.as_ref().unwrap();
            let params = cfg.system.params()?;
            let parity = if f.parity == "even" { Parity::Even } else { Parity::Odd };
            let rows: Vec<Vec<f64>> = f
                .thetas
                .par_iter()
                .map(|&theta| {
                    let st =
                        condition_at(&params, &MeasurementSetting::Homodyne { x: f.x, theta })?;
                    guard.check_norm(st.norm_sq(), &format!("theta = {theta}"))?;
                    let i = measure_I(&st);
                    let n = mean_excitations(&st);
                    guard.check_bound(i, n, &format!("theta = {theta}"))?;
                    let opt = optimize_lambda(&st, parity);
                    Ok(vec![theta, i, n, opt.fidelity, opt.lambda.re, opt.lambda.im])
                })
                .collect::<Result<_>>()?;
            write_csv(
                &csv_path,
                "theta,I,mean_excitations,f_star,re_lambda_star,im_lambda_star",
                &rows,
            )?;

            let mut extra = serde_json::Map::new();
            extra.insert("rows".into(), json!(rows.len()));
            if f.fit_sinusoid {
                let thetas: Vec<f64> = rows.iter().map(|r| r[0]).collect();
                let is: Vec<f64> = rows.iter().map(|r| r[1]).collect();
                extra.insert("sinusoid_fit".into(), serde_json::to_value(fit_sinusoid(&thetas, &is)?).unwrap());
            }
            // coefficient profile |w_n|² at the first θ
            {
                let setting = MeasurementSetting::Homodyne { x: f.x, theta: f.thetas[0] };
                let n_max = crate::conditioning::choose_cutoff(&params, &setting, 1e-10)?;
                let joint = evolve_joint(&params, n_max)?;
                let mut prof: Vec<f64> = joint
                    .sectors
                    .iter()
                    .map(|s| (s.coeff * measurement_amplitude(&setting, s.n)).norm_sqr())
                    .collect();
                let total: f64 = prof.iter().sum();
                for v in prof.iter_mut() {
                    *v /= total;
                }
                extra.insert("coefficient_profile".into(), json!(prof));
            }
            if let Some(mus) = &f.mu_values {
                let setting = MeasurementSetting::Homodyne { x: f.x, theta: f.thetas[0] };
                let joint = evolve_joint(&params, 8)?;
                let d: Vec<C64> = joint.sectors[..3]
                    .iter()
                    .map(|s| s.coeff * measurement_amplitude(&setting, s.n))
                    .collect();
                let amps = [
                    joint.sectors[0].mech_amplitude,
                    joint.sectors[1].mech_amplitude,
                    joint.sectors[2].mech_amplitude,
                ];
                let lam_res = range_values(-4.0, 4.0, 0.05);
                let mut mrows = Vec::new();
                for &mu in mus {
                    let st = simplified_state([d[0], d[1], d[2]], mu, amps)?;
                    for &lr in &lam_res {
                        if parity == Parity::Odd && lr.abs() < 1e-12 {
                            continue;
                        }
                        let cat = cat_state(&CatSpec { lambda: C64::new(lr, 0.0), parity })?;
                        mrows.push(vec![mu, lr, state_fidelity(&st, &cat)]);
                    }
                }
                let mpath = opts.out_dir.join(format!("{}.musweep.csv", cfg.output.name));
                write_csv(&mpath, "mu,re_lambda,fidelity", &mrows)?;
                musweep_path = Some(mpath);
            }
            results = serde_json::Value::Object(extra);
        }

        "dissipative" | "thermal" => {
            let d = if cfg.experiment == "dissipative" {
                cfg.dissipative.as_ref().unwrap()
            } else {
                cfg.thermal.as_ref().unwrap()
            };
            let params = cfg.system.params()?;
            let noise_cfg = cfg.noise.clone().unwrap_or_default();
            let setting = MeasurementSetting::Homodyne { x: d.x, theta: d.theta };
            let init = ThermalInit { beta: params.beta, nbar: d.nbar };
            let mut rows = Vec::new();
            let mut decay = Vec::new();
            for (idx, &kappa) in d.kappas.iter().enumerate() {
                let noise = NoiseParams {
                    kappa,
                    dtau: noise_cfg.dtau,
                    n_traj: noise_cfg.n_traj,
                    seed: seed.wrapping_add(idx as u64),
                };
                let trajs = run_ensemble(&params, &noise, &init)?;
                let mix = ensemble_condition(&trajs, &setting)?.merged(1e-9);
                let i = measure_I_mixture(&mix);
                let n = mix.mean_excitations();
                guard.check_bound(i, n, &format!("kappa = {kappa}"))?;
                // blocked Monte-Carlo error on I
                let bs = (trajs.len() / d.blocks).max(1);
                let mut block_is = Vec::new();
                for chunk in trajs.chunks(bs) {
                    if chunk.len() < bs {
                        break;
                    }
                    let bmix = ensemble_condition(chunk, &setting)?.merged(1e-9);
                    block_is.push(measure_I_mixture(&bmix));
                }
                let bmean = block_is.iter().sum::<f64>() / block_is.len() as f64;
                let bvar = block_is.iter().map(|v| (v - bmean) * (v - bmean)).sum::<f64>()
                    / (block_is.len().max(2) - 1) as f64;
                let i_err = (bvar / block_is.len() as f64).sqrt();
                let (photons, _) = ensemble_mean_photons(&trajs);
                let expected = params.alpha.norm_sqr() * (-kappa * params.tau).exp();
                decay.push(json!({ "kappa": kappa, "mean_photons": photons, "expected": expected }));
                rows.push(vec![kappa, i, i_err, n, n - i, photons, expected]);
            }
            write_csv(
                &csv_path,
                "kappa,I,I_err,mean_excitations,gap,mean_photons,mean_photons_expected",
                &rows,
            )?;
            results = json!({ "rows": rows.len(), "decay_check": decay });
        }

        "subtraction" => {
            let s = cfg.subtraction.as_ref().unwrap();
            let table = match (&s.table, &s.synthetic_rows) {
                (Some(path), None) => subtraction::read_detuning_table(Path::new(path))?,
                (None, Some(rows)) => subtraction::synthetic_detuning_table(*rows),
                _ => unreachable!("validated"),
            };
            let sweep = subtraction::detuning_sweep(&table)?;
            if opts.debug_invariants {
                for r in &sweep.rows {
                    guard.check_bound(
                        r.macroscopicity,
                        r.mean_excitations,
                        &format!("delta = {}", r.delta),
                    )?;
                }
            }
            let mut out = std::io::BufWriter::new(std::fs::File::create(&csv_path)?);
            subtraction::write_sweep_csv(&sweep, &mut out)?;
            let best = &sweep.rows[sweep.argmax];
            results = json!({
                "rows": sweep.rows.len(),
                "argmax": {
                    "delta": best.delta,
                    "I": best.macroscopicity,
                    "mean_excitations": best.mean_excitations,
                },
            });
        }

        other => return Err(Error::Config(format!("unknown experiment kind {other:?}"))),
    }

    let manifest = json!({
        "experiment": cfg.experiment,
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_ms": started.elapsed().as_millis() as u64,
        "config": cfg,
        "results": results,
    });
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest).unwrap())?;

    Ok(RunSummary { csv: csv_path, manifest: manifest_path, wigner_csv: wigner_path, musweep_csv: musweep_path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn sinusoid_fit_recovers_exact_parameters() {
        let thetas: Vec<f64> = (0..40).map(|i| i as f64 * 2.0 * PI / 40.0).collect();
        let vals: Vec<f64> =
            thetas.iter().map(|&t| 1.891 + 0.309 * (t + PI / 2.0).sin()).collect();
        let fit = fit_sinusoid(&thetas, &vals).unwrap();
        assert_abs_diff_eq!(fit.a, 1.891, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.c, 0.309, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.b, PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn golden_section_finds_quadratic_minimum() {
        let (x, f) = golden_min(|x| (x - 1.3) * (x - 1.3) + 0.2, 0.0, 3.0, 1e-8);
        assert_abs_diff_eq!(x, 1.3, epsilon = 1e-6);
        assert_abs_diff_eq!(f, 0.2, epsilon = 1e-10);
    }

    #[test]
    fn crossing_errors_without_bracket() {
        // k = 0: I ≡ 0, no crossing exists
        let p = SystemParams::new(C64::new(0.8, 0.0), C64::new(2.0, 0.0), 0.0, 0.0, PI).unwrap();
        assert!(matches!(
            find_crossing(&p, &[0.0], (0.5, 2.5), 1e-5),
            Err(Error::NonConvergence(_))
        ));
        // monotone gap over a bad bracket reports a boundary minimizer
        let p1 = SystemParams::new(C64::new(0.8, 0.0), C64::new(2.0, 0.0), 1.0, 0.0, PI).unwrap();
        assert!(matches!(
            find_crossing(&p1, &[0.0], (3.0, 4.0), 1e-5),
            Err(Error::NonConvergence(_))
        ));
    }
}
