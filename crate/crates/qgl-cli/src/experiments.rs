//! The registered experiments. Each one assembles instances from the
//! config, runs its checks, and reduces the results into a [`Report`].

use crate::config::{self, ExperimentConfig};
use crate::output::{fbool, fnum, Report};
use crate::RunError;
use qgl_core::model::FilterKind;
use qgl_core::numkit::{self, c, CMat};
use qgl_core::{circuits, discriminant, dynamics, generator, oft};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

pub const EXPERIMENTS: &[&str] = &[
    "parseval",
    "oft-tails",
    "secular-bound",
    "fixed-point-scan",
    "davies-exactness",
    "mixing-time",
    "adb-scan",
    "proxy-eigvec-scan",
    "weak-measure-convergence",
    "block-encode-verify",
    "discriminant-block-verify",
    "anneal-path",
    "discretization-convergence",
    "bound-suite",
];

pub fn run(cfg: &ExperimentConfig, seed: u64) -> Result<Report, RunError> {
    match cfg.experiment.as_str() {
        "parseval" => parseval(cfg),
        "oft-tails" => oft_tails(cfg),
        "secular-bound" => secular_bound(cfg),
        "fixed-point-scan" => fixed_point_scan(cfg),
        "davies-exactness" => davies_exactness(cfg),
        "mixing-time" => mixing_time(cfg, seed),
        "adb-scan" => adb_scan(cfg),
        "proxy-eigvec-scan" => proxy_eigvec_scan(cfg),
        "weak-measure-convergence" => weak_measure_convergence(cfg),
        "block-encode-verify" => block_encode_verify(cfg),
        "discriminant-block-verify" => discriminant_block_verify(cfg),
        "anneal-path" => anneal_path(cfg),
        "discretization-convergence" => discretization_convergence(cfg),
        "bound-suite" => bound_suite(cfg, seed),
        other => Err(RunError::Config(format!(
            "unknown experiment '{other}'; registered: {}",
            EXPERIMENTS.join(", ")
        ))),
    }
}

/// Worker cap: QGL_THREADS when set, otherwise the machine parallelism.
fn worker_count(jobs: usize) -> usize {
    let cap = std::env::var("QGL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    cap.min(jobs).max(1)
}

/// Evaluate one closure per sweep value, in parallel, preserving order.
fn parallel_map<T, F>(values: &[f64], f: F) -> Result<Vec<T>, RunError>
where
    T: Send,
    F: Fn(f64) -> Result<T, RunError> + Sync,
{
    let workers = worker_count(values.len());
    if workers <= 1 {
        return values.iter().map(|&v| f(v)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T, RunError>>>> =
        Mutex::new((0..values.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= values.len() {
                    break;
                }
                let out = f(values[i]);
                slots.lock().unwrap()[i] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("worker filled every slot"))
        .collect()
}

fn report(cfg: &ExperimentConfig, columns: Vec<&'static str>) -> Report {
    Report {
        experiment: cfg.experiment.clone(),
        columns,
        rows: Vec::new(),
        failures: Vec::new(),
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn parseval(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = report(cfg, vec!["n_qubits", "N", "residual_identity", "sum_norm", "status"]);
    let ns = cfg.sweep_values(&["N"], &[cfg.instance.grid.n as f64])?;
    let tol = cfg.tolerance("residual", 1e-10);
    let rows = parallel_map(&ns, |nf| {
        let built = config::build_instance(&cfg.instance, None, Some(nf as usize), None)?;
        let s = &built.spec;
        let family = oft::oft_discrete(&s.jumps, &s.filter, &s.grid, &s.context)
            .map_err(|e| RunError::Instance(e.to_string()))?;
        let p = oft::parseval_report(&family, &s.jumps, &s.filter, &s.context);
        Ok((nf as usize, p))
    })?;
    for (n, p) in rows {
        let ok = p.residual_identity < tol;
        if !ok {
            rep.failures
                .push(format!("parseval residual {:.3e} at N={n}", p.residual_identity));
        }
        rep.push_row(vec![
            cfg.instance.hamiltonian.n.to_string(),
            n.to_string(),
            fnum(p.residual_identity),
            fnum(p.sum_norm),
            fbool(ok),
        ]);
    }
    Ok(rep)
}

fn oft_tails(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = report(cfg, vec!["mu", "measured", "bound", "status"]);
    let mus = cfg.sweep_values(&["mu"], &[0.5, 1.0, 2.0])?;
    let built = config::build_instance(&cfg.instance, None, None, None)?;
    for &mu in &mus {
        let rec = oft::tail_mass(&built.spec.filter, &built.spec.grid, mu);
        if !rec.pass {
            rep.failures.push(format!(
                "tail mass {:.3e} above bound {:.3e} at mu={mu}",
                rec.measured, rec.bound
            ));
        }
        rep.push_row(vec![fnum(mu), fnum(rec.measured), fnum(rec.bound), fbool(rec.pass)]);
    }
    Ok(rep)
}

fn secular_bound(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = report(cfg, vec!["mu", "measured", "bound", "status"]);
    let mus = cfg.sweep_values(&["mu"], &[0.2, 0.4, 0.8])?;
    let built = config::build_instance(&cfg.instance, None, None, None)?;
    let rows = parallel_map(&mus, |mu| {
        generator::secular_bound(&built.spec, mu).map_err(|e| RunError::Instance(e.to_string()))
    })?;
    for (mu, rec) in mus.iter().zip(rows) {
        if !rec.pass {
            rep.failures.push(format!(
                "secular difference {:.3e} above bound {:.3e} at mu={mu}",
                rec.measured, rec.bound
            ));
        }
        rep.push_row(vec![fnum(*mu), fnum(rec.measured), fnum(rec.bound), fbool(rec.pass)]);
    }
    Ok(rep)
}

fn fixed_point_scan(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = report(
        cfg,
        vec!["sigma_t", "beta", "N", "trace_distance", "t_mix_lb", "runtime_s"],
    );
    let values = cfg.sweep_values(&["sigma_t", "T"], &[2.0, 4.0, 8.0, 16.0, 32.0])?;
    let window_sweep = cfg.sweep_param() == Some("T");
    let rows = parallel_map(&values, |v| {
        let start = Instant::now();
        let (l, built) = if window_sweep {
            // Window sweep: the continuous uniform-window generator.
            let built = config::build_instance(&cfg.instance, None, None, None)?;
            let l = generator::build_cgme_dissipative(
                &built.spec.jumps,
                &built.spec.weight,
                v,
                &built.spec.context,
            )
            .map_err(|e| RunError::Instance(e.to_string()))?;
            (l, built)
        } else {
            let built = config::build_instance(
                &cfg.instance,
                None,
                None,
                Some(FilterKind::Gaussian { sigma_t: v }),
            )?;
            let l = generator::build_lindbladian(&built.spec)
                .map_err(|e| RunError::Instance(e.to_string()))?;
            (l, built)
        };
        let fix = dynamics::fixed_point(&l).map_err(|e| RunError::Instance(e.to_string()))?;
        let dist = numkit::trace_norm(&(&fix - &built.spec.context.rho));
        let gap = dynamics::generator_real_gap(&l).map_err(|e| RunError::Instance(e.to_string()))?;
        let t_mix_lb = (2.0f64).ln() / gap;
        Ok((dist, t_mix_lb, built.spec.grid.n, start.elapsed().as_secs_f64()))
    })?;
    let mut last = f64::INFINITY;
    for (&v, (dist, t_mix_lb, n, runtime)) in values.iter().zip(&rows) {
        if *dist >= last {
            rep.failures.push(format!(
                "trace distance not decreasing at {}={v}: {dist:.3e} >= {last:.3e}",
                if window_sweep { "T" } else { "sigma_t" }
            ));
        }
        last = *dist;
        rep.push_row(vec![
            fnum(v),
            fnum(cfg.instance.beta),
            n.to_string(),
            fnum(*dist),
            fnum(*t_mix_lb),
            format!("{runtime:.3}"),
        ]);
    }
    // Scaling-law sanity: fitted log-log exponent.
    let xs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.0.max(1e-300).ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    let (lo, hi) = if window_sweep {
        (cfg.tolerance("slope_min", -0.8), cfg.tolerance("slope_max", -0.3))
    } else {
        (cfg.tolerance("slope_min", -1.5), cfg.tolerance("slope_max", -0.6))
    };
    if !(lo..=hi).contains(&slope) {
        rep.failures
            .push(format!("fitted slope {slope:.3} outside [{lo}, {hi}]"));
    }
    Ok(rep)
}

fn davies_exactness(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = report(cfg, vec!["beta", "trace_distance", "status"]);
    let built = config::build_instance(&cfg.instance, None, None, None)?;
    let l = generator::build_davies(&built.spec.jumps, &built.spec.weight, &built.spec.context)
        .map_err(|e| RunError::Instance(e.to_string()))?;
    let fix = dynamics::fixed_point(&l).map_err(|e| RunError::Instance(e.to_string()))?;
    let dist = numkit::trace_norm(&(&fix - &built.spec.context.rho));
    let tol = cfg.tolerance("trace_distance", 1e-10);
    let ok = dist < tol;
    if !ok {
        rep.failures
            .push(format!("Davies fixed point off by {dist:.3e} (tol {tol:.1e})"));
    }
    rep.push_row(vec![fnum(cfg.instance.beta), fnum(dist), fbool(ok)]);
    Ok(rep)
}

fn mixing_time(cfg: &ExperimentConfig, seed: u64) -> Result<Report, RunError> {
    let mut rep = report(cfg, vec!["case", "t_mix", "reference", "status"]);
    let built = config::build_instance(&cfg.instance, None, None, None)?;
    let l = generator::build_davies(&built.spec.jumps, &built.spec.weight, &built.spec.context)
        .map_err(|e| RunError::Instance(e.to_string()))?;
    let d_rep = discriminant::discriminant_report(&l, &built.spec.context.rho)
        .map_err(|e| RunError::Instance(e.to_string()))?;
    let db_bound = dynamics::db_mixing_bound(&built.spec.context.rho, d_rep.gap)
        .map_err(|e| RunError::Instance(e.to_string()))?;
    let mix = dynamics::mixing_time(&l, 40.0 * db_bound.max(1.0), 400, seed)
        .map_err(|e| RunError::Instance(e.to_string()))?;
    let ok = mix.t_mix <= db_bound * (1.0 + 1e-9);
    if !ok {
        rep.failures.push(format!(
            "sampled t_mix {:.4} above detailed-balance bound {db_bound:.4}",
            mix.t_mix
        ));
    }
    rep.push_row(vec![
        "instance_davies".into(),
        fnum(mix.t_mix),
        fnum(db_bound),
        fbool(ok),
    ]);

    // Closed-form oracle: the uniform depolarizer halves worst-case trace
    // distance at (3/4)ln2.
    let dep = depolarizer();
    let oracle = 0.75 * (2.0f64).ln();
    let mix2 = dynamics::mixing_time(&dep, 5.0, 400, seed)
        .map_err(|e| RunError::Instance(e.to_string()))?;
    let rel = (mix2.t_mix - oracle).abs() / oracle;
    let ok2 = rel < cfg.tolerance("oracle_rel", 0.02);
    if !ok2 {
        rep.failures
            .push(format!("depolarizer t_mix off by {:.2}%", rel * 100.0));
    }
    rep.push_row(vec![
        "depolarizer_oracle".into(),
        fnum(mix2.t_mix),
        fnum(oracle),
        fbool(ok2),
    ]);
    Ok(rep)
}

fn depolarizer() -> qgl_core::numkit::Superoperator {
    use qgl_core::numkit::{Picture, Superoperator};
    let eye = numkit::identity(2);
    let third = 1.0 / 3.0;
    let mut terms = vec![];
    for p in [numkit::pauli_x(), numkit::pauli_y(), numkit::pauli_z()] {
        terms.push((c(third, 0.0), p.clone(), numkit::dagger(&p)));
        terms.push((c(-third / 2.0, 0.0), eye.clone(), eye.clone()));
        terms.push((c(-third / 2.0, 0.0), eye.clone(), eye.clone()));
    }
    Superoperator::from_terms(terms, Picture::Schrodinger).expect("depolarizer terms")
}

fn adb_scan(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = report(cfg, vec!["mu", "epsilon", "bound", "status"]);
    let mus = cfg.sweep_values(&["mu"], &[0.2, 0.4, 0.8])?;
    let built = config::build_instance(&cfg.instance, None, None, None)?;
    let rows = parallel_map(&mus, |mu| {
        discriminant::proxy_epsilon(&built.spec, mu).map_err(|e| RunError::Instance(e.to_string()))
    })?;
    for (mu, rec) in mus.iter().zip(rows) {
        if !rec.pass {
            rep.failures.push(format!(
                "proxy error {:.3e} above bound {:.3e} at mu={mu}",
                rec.epsilon, rec.bound
            ));
        }
        rep.push_row(vec![fnum(*mu), fnum(rec.epsilon), fnum(rec.bound), fbool(rec.pass)]);
    }
    Ok(rep)
}

fn proxy_eigvec_scan(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = report(cfg, vec!["sigma_t", "distance", "bound", "status"]);
    let sigmas = cfg.sweep_values(&["sigma_t"], &[2.0, 4.0, 8.0, 16.0, 32.0])?;
    let rows = parallel_map(&sigmas, |sigma| {
        let built = config::build_instance(
            &cfg.instance,
            None,
            None,
            Some(FilterKind::Gaussian { sigma_t: sigma }),
        )?;
        let s = &built.spec;
        let proxy = discriminant::build_proxy(s).map_err(|e| RunError::Instance(e.to_string()))?;
        let l = generator::build_lindbladian(s).map_err(|e| RunError::Instance(e.to_string()))?;
        let disc = discriminant::similarity_discriminant(&l, &s.context.rho)
            .map_err(|e| RunError::Instance(e.to_string()))?;
        let eps = numkit::op_norm(&(&proxy - &numkit::dagger(&disc)));
        let cmp = dynamics::top_eigvec_compare(&proxy, &s.context.rho)
            .map_err(|e| RunError::Instance(e.to_string()))?;
        let bound = 4.0 * (2.0f64).sqrt() * eps / cmp.gap;
        Ok((cmp.distance, bound))
    })?;
    let mut last = f64::INFINITY;
    for (&sigma, (dist, bound)) in sigmas.iter().zip(&rows) {
        let ok = *dist <= *bound;
        if !ok {
            rep.failures.push(format!(
                "eigenvector distance {dist:.3e} above bound {bound:.3e} at sigma_t={sigma}"
            ));
        }
        if *dist >= last {
            rep.failures.push(format!(
                "distance not decreasing at sigma_t={sigma}: {dist:.3e} >= {last:.3e}"
            ));
        }
        last = *dist;
        rep.push_row(vec![fnum(sigma), fnum(*dist), fnum(*bound), fbool(ok)]);
    }
    Ok(rep)
}

fn weak_measure_convergence(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = report(cfg, vec!["label", "value", "reference", "status"]);
    let deltas = cfg.sweep_values(&["delta"], &[0.1, 0.05, 0.025, 0.0125])?;
    let built = config::build_instance(&cfg.instance, None, None, None)?;
    let s = &built.spec;
    let d = s.context.dim();
    let be = circuits::build_block_encoding(s).map_err(|e| RunError::Instance(e.to_string()))?;
    let u = be.program.composite();
    let l = generator::build_lindbladian(s).map_err(|e| RunError::Instance(e.to_string()))?;
    // Deterministic full-rank probe state with coherences.
    let rho0 = {
        let dim = d as f64;
        let psi: Vec<_> = (0..d).map(|_| c(1.0 / dim.sqrt(), 0.0)).collect();
        let mut m = numkit::identity(d).mapv(|z| z * (0.5 / dim));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] += psi[i] * psi[j].conj() * 0.5;
            }
        }
        m
    };
    let errs: Vec<f64> = deltas
        .iter()
        .map(|&delta| {
            let out = circuits::weak_measure_step(&u, 2, d, delta, &rho0);
            let expect = &rho0 + &l.apply(&rho0).mapv(|z| z * delta);
            numkit::trace_norm(&(&out - &expect))
        })
        .collect();
    for (delta, err) in deltas.iter().zip(&errs) {
        rep.push_row(vec![
            format!("step_error_delta={delta}"),
            fnum(*err),
            "-".into(),
            "info".into(),
        ]);
    }
    let xs: Vec<f64> = deltas.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|v| v.max(1e-300).ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    let slope_tol = cfg.tolerance("slope_tol", 0.3);
    let slope_ok = (slope - 2.0).abs() <= slope_tol;
    if !slope_ok {
        rep.failures
            .push(format!("per-step error slope {slope:.3} not within 2.0±{slope_tol}"));
    }
    rep.push_row(vec![
        "step_error_slope".into(),
        fnum(slope),
        format!("2.0+-{slope_tol}"),
        fbool(slope_ok),
    ]);

    // Full evolution: t = 1 with delta = 0.01, against the exact semigroup.
    let t = cfg.tolerance("evolve_t", 1.0);
    let delta = cfg.tolerance("evolve_delta", 0.01);
    let steps = (t / delta).round() as usize;
    let mut state = rho0.clone();
    for _ in 0..steps {
        state = circuits::weak_measure_step(&u, 2, d, delta, &state);
    }
    let exact = dynamics::evolve(&l, &rho0, t);
    let dist = numkit::trace_norm(&(&state - &exact));
    let tol = cfg.tolerance("evolve_tol", 0.05);
    let ok = dist <= tol;
    if !ok {
        rep.failures.push(format!(
            "weak-measurement evolution off by {dist:.3e} at t={t}, delta={delta} (tol {tol})"
        ));
    }
    rep.push_row(vec!["evolution_error".into(), fnum(dist), fnum(tol), fbool(ok)]);
    Ok(rep)
}

fn block_encode_verify(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = report(
        cfg,
        vec!["N", "block_residual", "reject_residual", "unitarity", "status"],
    );
    let ns = cfg.sweep_values(&["N"], &[8.0, 16.0])?;
    let tol_block = cfg.tolerance("block_residual", 1e-9);
    let tol_reject = cfg.tolerance("reject_residual", 1e-10);
    let rows = parallel_map(&ns, |nf| {
        let built = config::build_instance(&cfg.instance, None, Some(nf as usize), None)?;
        let s = &built.spec;
        let be = circuits::build_block_encoding(s).map_err(|e| RunError::Instance(e.to_string()))?;
        let unit = be.program.unitarity_residual();
        let block_resid = numkit::max_abs(
            &(&be.block()
                - &be
                    .expected_block(s)
                    .map_err(|e| RunError::Instance(e.to_string()))?),
        );
        let u = be.program.composite();
        let (ops, _) = circuits::lindblad_ops(s).map_err(|e| RunError::Instance(e.to_string()))?;
        let d = s.context.dim();
        let mut gram = CMat::zeros((d, d));
        for lop in &ops {
            gram = gram + numkit::dagger(lop).dot(lop);
        }
        let reject_resid = numkit::max_abs(&(&circuits::reject_block(&u, 2, d) - &gram));
        Ok((nf as usize, block_resid, reject_resid, unit))
    })?;
    for (n, block_resid, reject_resid, unit) in rows {
        let ok = block_resid < tol_block && reject_resid < tol_reject && unit < 1e-10;
        if !ok {
            rep.failures.push(format!(
                "block encoding residuals at N={n}: block {block_resid:.3e}, reject {reject_resid:.3e}, unitarity {unit:.3e}"
            ));
        }
        rep.push_row(vec![
            n.to_string(),
            fnum(block_resid),
            fnum(reject_resid),
            fnum(unit),
            fbool(ok),
        ]);
    }
    Ok(rep)
}

fn discriminant_block_verify(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = report(cfg, vec!["N", "hermiticity", "block_residual", "status"]);
    let ns = cfg.sweep_values(&["N"], &[8.0, 16.0])?;
    let tol = cfg.tolerance("block_residual", 1e-9);
    let rows = parallel_map(&ns, |nf| {
        let built = config::build_instance(&cfg.instance, None, Some(nf as usize), None)?;
        let s = &built.spec;
        let db =
            circuits::build_discriminant_block(s).map_err(|e| RunError::Instance(e.to_string()))?;
        let herm = numkit::hermiticity_residual(&db.unitary);
        let proxy = discriminant::build_proxy(s).map_err(|e| RunError::Instance(e.to_string()))?;
        let d2 = s.context.dim() * s.context.dim();
        let expect = &numkit::identity(d2) + &proxy;
        let resid = numkit::max_abs(&(&db.block() - &expect));
        Ok((nf as usize, herm, resid))
    })?;
    for (n, herm, resid) in rows {
        let ok = herm < 1e-10 && resid < tol;
        if !ok {
            rep.failures.push(format!(
                "discriminant block at N={n}: hermiticity {herm:.3e}, residual {resid:.3e}"
            ));
        }
        rep.push_row(vec![n.to_string(), fnum(herm), fnum(resid), fbool(ok)]);
    }
    Ok(rep)
}

fn anneal_path(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = report(
        cfg,
        vec!["beta_j", "gap", "eigvec_dist", "overlap_next", "status"],
    );
    let built = config::build_instance(&cfg.instance, None, None, None)?;
    let beta = cfg.instance.beta;
    let k = (2.0 * beta * built.spec.context.h_norm()).ceil().max(1.0) as usize;
    let nodes = circuits::anneal_path(&built.spec, beta, k)
        .map_err(|e| RunError::Instance(e.to_string()))?;
    let overlap_min = cfg.tolerance("overlap_min", 0.6);
    for node in &nodes {
        let ok = node.dist_ok && node.overlap_next >= overlap_min;
        if !node.dist_ok {
            rep.failures.push(format!(
                "eigenvector distance {:.3} above 1/10 at beta_j={:.3}",
                node.eigvec_dist, node.beta_j
            ));
        }
        if node.overlap_next < overlap_min {
            rep.failures.push(format!(
                "overlap {:.3} below {overlap_min} after beta_j={:.3}",
                node.overlap_next, node.beta_j
            ));
        }
        rep.push_row(vec![
            fnum(node.beta_j),
            fnum(node.gap),
            fnum(node.eigvec_dist),
            fnum(node.overlap_next),
            fbool(ok),
        ]);
    }
    Ok(rep)
}

fn discretization_convergence(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = report(cfg, vec!["N", "generator_distance", "status"]);
    let ns = cfg.sweep_values(&["N"], &[32.0, 64.0, 128.0, 256.0])?;
    let fkind = config::filter_kind(&cfg.instance.filter)?;
    let base = config::build_instance(&cfg.instance, None, None, None)?;
    let continuous = generator::build_continuous(
        &base.spec.jumps,
        &base.spec.weight,
        &fkind,
        &base.spec.context,
    )
    .map_err(|e| RunError::Instance(e.to_string()))?;
    let rows = parallel_map(&ns, |nf| {
        let built = config::build_instance(&cfg.instance, None, Some(nf as usize), None)?;
        let l = generator::build_lindbladian(&built.spec)
            .map_err(|e| RunError::Instance(e.to_string()))?;
        Ok(numkit::op_norm(&(&l.mat - &continuous.mat)))
    })?;
    let mut last = f64::INFINITY;
    for (&nf, dist) in ns.iter().zip(&rows) {
        let ok = *dist < last;
        if !ok {
            rep.failures.push(format!(
                "generator distance not decreasing at N={}: {dist:.3e} >= {last:.3e}",
                nf as usize
            ));
        }
        last = *dist;
        rep.push_row(vec![(nf as usize).to_string(), fnum(*dist), fbool(ok)]);
    }
    Ok(rep)
}

fn bound_suite(cfg: &ExperimentConfig, seed: u64) -> Result<Report, RunError> {
    let mut rep = report(cfg, vec!["name", "lhs", "rhs", "status", "note"]);
    let built = config::build_instance(&cfg.instance, None, None, None)?;
    let l = generator::build_lindbladian(&built.spec)
        .map_err(|e| RunError::Instance(e.to_string()))?;
    let other = generator::build_davies(&built.spec.jumps, &built.spec.weight, &built.spec.context)
        .map_err(|e| RunError::Instance(e.to_string()))?;
    let t_max = cfg.tolerance("t_max", 60.0);
    let entries = dynamics::bound_suite(&l, &built.spec.context.rho, t_max, seed, Some(&other))
        .map_err(|e| RunError::Instance(e.to_string()))?;
    for e in &entries {
        let status = match e.pass {
            Some(true) => "pass".to_string(),
            Some(false) => "fail".to_string(),
            None => "skip".to_string(),
        };
        if e.pass == Some(false) {
            rep.failures
                .push(format!("{}: lhs {:.3e} above rhs {:.3e}", e.name, e.lhs, e.rhs));
        }
        rep.push_row(vec![
            e.name.clone(),
            fnum(e.lhs),
            fnum(e.rhs),
            status,
            e.note.replace(',', ";"),
        ]);
    }
    Ok(rep)
}
