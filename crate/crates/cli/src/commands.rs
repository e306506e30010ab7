use crate::config::{parse_grid, RunConfig};
use crate::error::{CliError, CliResult};
use crate::input::{read_data, DataFile};
use crate::table::{emit, json_document, Table};
use ising_qec::analysis::{
    collapse_spread, compare_models, fit_failure_ansatz, fit_g_collapse, fit_surface_tension, g_statistic,
    gaussian_fit_pooled, sigma_zero_crossing, stiffness_fit, wasserstein1_bootstrap, FailurePoint, FitResult,
    GapHistogram, DEFAULT_EPSILON,
};
use ising_qec::exact::{duality_residual, kw_dual, p_c, pfail_exact};
use ising_qec::regimes::{
    binomial_continuous, capillary_boundary_p, capillary_pfail, nmin_coefficient, pathcount_nonpostselected,
    pathcount_postselected, AnsatzFamily, Parity, PathCountForm,
};
use ising_qec::sim::{
    exact_failure_polynomial, run_failure_rate, run_gap_samples, DecodingContext, GeometryKind, DEFAULT_NODE_BUDGET,
};
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// Output of a command: bytes to write, plus whether a fit failed to
/// converge.
pub struct Report {
    pub bytes: Vec<u8>,
    pub converged: bool,
}

impl Report {
    fn ok(bytes: Vec<u8>) -> Self {
        Self { bytes, converged: true }
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let command = cfg.command.as_deref().unwrap_or_default();
    let report = match command {
        "exact" => Report::ok(exact(cfg)?.render(cfg)?),
        "simulate" => Report::ok(simulate(cfg)?.render(cfg)?),
        "gapdist" => Report::ok(gapdist(cfg)?.render(cfg)?),
        "duality" => Report::ok(duality(cfg)?.render(cfg)?),
        "pathcount" => Report::ok(pathcount(cfg)?.render(cfg)?),
        "capillary" => Report::ok(capillary(cfg)?.render(cfg)?),
        "collapse" => Report::ok(collapse(cfg)?.render(cfg)?),
        "failpoly" => Report::ok(failpoly(cfg)?.render(cfg)?),
        "fit" => fit(cfg)?,
        other => return Err(CliError::Usage(format!("unknown command {other:?}"))),
    };
    emit(cfg, &report.bytes)?;
    if report.converged {
        Ok(())
    } else {
        Err(CliError::NonConvergence("fit output written with converged = false".into()))
    }
}

fn exact(cfg: &RunConfig) -> CliResult<Table> {
    let ps = cfg.p_values()?;
    let mut t = Table::new(&["L", "p", "pfail"]);
    for l in cfg.sizes(&[8, 16, 32]) {
        for &p in &ps {
            t.push(vec![l.into(), p.into(), pfail_exact(p, l)?.into()]);
        }
    }
    Ok(t)
}

fn context(cfg: &RunConfig, l: usize) -> CliResult<DecodingContext> {
    Ok(DecodingContext::new(cfg.geometry()?, l)?.with_node_budget(cfg.node_budget.unwrap_or(DEFAULT_NODE_BUDGET)))
}

fn simulate(cfg: &RunConfig) -> CliResult<Table> {
    let ps = cfg.p_values()?;
    let (shots, seed) = (cfg.shots.unwrap_or(10_000), cfg.seed.unwrap_or(1));
    let mut t = Table::new(&["L", "p", "shots", "failures", "pfail_hat", "ci_low", "ci_high", "ties", "timeouts", "seed"]);
    let mut timeouts = 0;
    let mut row = 0u64;
    for l in cfg.sizes(&[5]) {
        let ctx = context(cfg, l)?;
        for &p in &ps {
            let s = run_failure_rate(&ctx, p, shots, seed.wrapping_add(row))?;
            row += 1;
            timeouts += s.timeouts;
            t.push(vec![
                l.into(),
                p.into(),
                s.shots.into(),
                s.failures.into(),
                s.pfail_hat.into(),
                s.ci_low.into(),
                s.ci_high.into(),
                s.ties.into(),
                s.timeouts.into(),
                s.seed.into(),
            ]);
        }
    }
    t.meta("timeouts", timeouts);
    Ok(t)
}

fn gapdist(cfg: &RunConfig) -> CliResult<Table> {
    let ps = cfg.p_values()?;
    let (shots, seed) = (cfg.shots.unwrap_or(10_000), cfg.seed.unwrap_or(1));
    let mut t = Table::new(&["L", "p", "delta_e", "count"]);
    let mut timeouts = 0;
    let mut row = 0u64;
    for l in cfg.sizes(&[5]) {
        let ctx = context(cfg, l)?;
        for &p in &ps {
            let (samples, to) = run_gap_samples(&ctx, p, shots, seed.wrapping_add(row))?;
            row += 1;
            timeouts += to;
            let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
            for s in &samples {
                *counts.entry(s.delta_e).or_insert(0) += 1;
            }
            for (d, c) in counts {
                t.push(vec![l.into(), p.into(), d.into(), c.into()]);
            }
        }
    }
    t.meta("timeouts", timeouts);
    Ok(t)
}

fn duality(cfg: &RunConfig) -> CliResult<Table> {
    let ps = cfg.p_values()?;
    let mut t = Table::new(&["L", "p", "p_dual", "residual"]);
    let mut worst = 0.0f64;
    for l in cfg.sizes(&[8, 16]) {
        for &p in &ps {
            let r = duality_residual(p, l)?;
            worst = worst.max(r.abs());
            t.push(vec![l.into(), p.into(), kw_dual(p)?.into(), r.into()]);
        }
    }
    t.meta("max_abs_residual", worst);
    Ok(t)
}

fn pathcount(cfg: &RunConfig) -> CliResult<Table> {
    let ps = cfg.p_values()?;
    match cfg.regime.as_deref().unwrap_or("post") {
        "post" => {
            let mut t = Table::new(&["L", "p", "pfail_pathcount", "pfail_exact", "valid", "boundary_pfail"]);
            for l in cfg.sizes(&[16, 32, 64]) {
                for &p in &ps {
                    let e = pathcount_postselected(p, l)?;
                    // Validity edge L = 1/p, with L continuous.
                    let lb = 1.0 / p;
                    let boundary = 2.0 * lb * (p / (1.0 - p)).powf(lb);
                    t.push(vec![l.into(), p.into(), e.value.into(), pfail_exact(p, l)?.into(), e.valid.into(), boundary.into()]);
                }
            }
            Ok(t)
        }
        "nonpost" => {
            let kind = cfg.geometry()?;
            let mut t = Table::new(&["L", "p", "coefficient", "pfail_pathcount", "valid", "boundary_pfail"]);
            for l in cfg.sizes(&[5, 7, 9]) {
                let parity = Parity::of(l);
                for &p in &ps {
                    let e = pathcount_nonpostselected(kind, parity, l, p, PathCountForm::Retained)?;
                    // Validity edge p = 1/L², with Γ-continued prefactor.
                    let lb = 1.0 / p.sqrt();
                    let boundary = continuous_coefficient(kind, parity, lb) * p.powf(lb / 2.0);
                    t.push(vec![l.into(), p.into(), e.coefficient.into(), e.pfail.into(), e.valid.into(), boundary.into()]);
                }
            }
            Ok(t)
        }
        r => Err(CliError::Usage(format!("unknown regime {r:?}"))),
    }
}

fn continuous_coefficient(kind: GeometryKind, parity: Parity, l: f64) -> f64 {
    let c = binomial_continuous(l, l / 2.0);
    match (kind, parity) {
        (GeometryKind::Torus, Parity::Odd) => 2.0 * l * c,
        (GeometryKind::Torus, Parity::Even) => l * c,
        (GeometryKind::Planar, Parity::Even) => 0.5 * l * c,
        (GeometryKind::Planar, Parity::Odd) => l * l * binomial_continuous(l + 1.0, l / 2.0) + 0.5 * l * c,
    }
}

fn capillary(cfg: &RunConfig) -> CliResult<Table> {
    let ps = cfg.p_values()?;
    let mut t = Table::new(&["L", "p", "pfail_capillary", "pfail_exact", "valid", "boundary_p", "boundary_pfail"]);
    for l in cfg.sizes(&[16, 32, 64]) {
        let pb: f64 = capillary_boundary_p(l);
        let boundary = capillary_pfail(pb, l)?.value;
        for &p in &ps {
            let e = capillary_pfail(p, l)?;
            t.push(vec![
                l.into(),
                p.into(),
                e.value.into(),
                pfail_exact(p, l)?.into(),
                e.valid.into(),
                pb.into(),
                boundary.into(),
            ]);
        }
    }
    Ok(t)
}

fn collapse(cfg: &RunConfig) -> CliResult<Table> {
    let xs = parse_grid(cfg.x_spec.as_deref().unwrap_or("-1:1:0.01"))?;
    let epsilon = cfg.epsilon.unwrap_or(DEFAULT_EPSILON);
    if !(epsilon > 0.0) {
        return Err(CliError::Usage("epsilon must be positive".into()));
    }
    let pc = p_c::<f64>();
    let mut t = Table::new(&["L", "x", "p", "pfail"]);
    let mut curves = Vec::new();
    for l in cfg.sizes(&[16, 32, 64, 128]) {
        let mut ys = Vec::with_capacity(xs.len());
        for &x in &xs {
            let p = pc + x / l as f64;
            let y = pfail_exact(p, l)?;
            t.push(vec![l.into(), x.into(), p.into(), y.into()]);
            ys.push(y);
        }
        curves.push((xs.clone(), ys));
    }
    match collapse_spread(&curves, epsilon, Some(0.0))? {
        Some((lo, hi)) => {
            t.meta("window_low", lo);
            t.meta("window_high", hi);
        }
        None => t.meta("window", "none"),
    }
    Ok(t)
}

fn failpoly(cfg: &RunConfig) -> CliResult<Table> {
    let kind = cfg.geometry()?;
    let mut t = Table::new(&["L", "w", "fail_count", "coefficient", "formula_leading"]);
    for l in cfg.sizes(&[3]) {
        let wmax = cfg.wmax.unwrap_or(l.div_ceil(2));
        let poly = exact_failure_polynomial(kind, l, wmax)?;
        let formula = nmin_coefficient(kind, Parity::of(l), l)?;
        for w in 0..=wmax {
            t.push(vec![
                l.into(),
                w.into(),
                poly.fail_counts[w].into(),
                poly.coefficients[w].into(),
                formula.into(),
            ]);
        }
    }
    Ok(t)
}

fn failure_points(cfg: &RunConfig) -> CliResult<Vec<FailurePoint>> {
    match load(cfg)? {
        DataFile::Failure(v) => Ok(v),
        DataFile::Gap(_) => Err(CliError::Usage("this model needs curve or shot data, got gap data".into())),
    }
}

fn gap_histograms(cfg: &RunConfig) -> CliResult<Vec<GapHistogram>> {
    match load(cfg)? {
        DataFile::Gap(g) => g
            .into_iter()
            .map(|((l, pb), counts)| Ok(GapHistogram::from_counts(l, f64::from_bits(pb), counts)?))
            .collect(),
        DataFile::Failure(_) => Err(CliError::Usage("this model needs gap data".into())),
    }
}

fn load(cfg: &RunConfig) -> CliResult<DataFile> {
    let path = cfg.input.as_ref().ok_or_else(|| CliError::Usage("fit needs --input".into()))?;
    read_data(path)
}

fn fit_json(r: &FitResult) -> Value {
    let mut v = serde_json::to_value(r).expect("fit serialises");
    if let Some(pf) = r.implied_pfail_at_threshold() {
        v["implied_pfail_at_threshold"] = json!(pf);
    }
    v
}

fn ranking(fits: &[FitResult], key: impl Fn(&FitResult) -> f64) -> Vec<String> {
    let mut idx: Vec<usize> = (0..fits.len()).collect();
    idx.sort_by(|&a, &b| key(&fits[a]).total_cmp(&key(&fits[b])));
    idx.into_iter().map(|i| fits[i].family.clone()).collect()
}

/// Single-`p` means per size, rejecting mixed-`p` input.
fn single_p(hists: &[GapHistogram]) -> CliResult<()> {
    if hists.windows(2).any(|w| w[0].p != w[1].p) {
        return Err(CliError::Usage("gap data must hold a single p for this model".into()));
    }
    Ok(())
}

fn theta_for(cfg: &RunConfig, hists: &[GapHistogram]) -> CliResult<f64> {
    match cfg.theta {
        Some(t) => Ok(t),
        None => {
            let means: Vec<(usize, f64)> = hists.iter().map(|h| (h.l, h.mean())).collect();
            Ok(stiffness_fit(&means)?.theta)
        }
    }
}

fn fit(cfg: &RunConfig) -> CliResult<Report> {
    let model = cfg.model.as_deref().unwrap_or("erf2");
    let resamples = cfg.resamples.unwrap_or(200);
    let seed = cfg.seed.unwrap_or(1);
    let (body, converged) = match model {
        "compare" => {
            let pts = failure_points(cfg)?;
            let fits = compare_models(&pts)?;
            let conv = fits.iter().all(|f| f.converged);
            let body = json!({
                "fits": fits.iter().map(fit_json).collect::<Vec<_>>(),
                "ranking_aic": ranking(&fits, |f| f.aic),
                "ranking_bic": ranking(&fits, |f| f.bic),
            });
            (body, conv)
        }
        "g" => {
            let hists = gap_histograms(cfg)?;
            let mut stats = Vec::new();
            for (i, h) in hists.iter().enumerate() {
                let xs: Vec<i64> = h.counts.iter().flat_map(|(&d, &c)| std::iter::repeat_n(d, c as usize)).collect();
                stats.push(g_statistic(h.l, h.p, &xs, resamples, seed.wrapping_add(i as u64))?);
            }
            let r = fit_g_collapse(&stats, None)?;
            (json!({ "g_statistics": stats, "fit": fit_json(&r) }), r.converged)
        }
        "stiffness" => {
            let hists = gap_histograms(cfg)?;
            single_p(&hists)?;
            let means: Vec<(usize, f64)> = hists.iter().map(|h| (h.l, h.mean())).collect();
            let st = stiffness_fit(&means)?;
            (json!({ "means": means, "stiffness": st }), true)
        }
        "gaussian" => {
            let hists = gap_histograms(cfg)?;
            single_p(&hists)?;
            let theta = theta_for(cfg, &hists)?;
            let g = gaussian_fit_pooled(&hists, theta)?;
            (json!({ "theta": theta, "gaussian": g, "implied_pfail": g.implied_pfail() }), true)
        }
        "wasserstein" => {
            let hists = gap_histograms(cfg)?;
            single_p(&hists)?;
            let theta = theta_for(cfg, &hists)?;
            let scaled: Vec<Vec<f64>> = hists
                .iter()
                .map(|h| {
                    let s = (h.l as f64).powf(theta);
                    h.counts.iter().flat_map(|(&d, &c)| std::iter::repeat_n(d as f64 / s, c as usize)).collect()
                })
                .collect();
            let mut pairs = Vec::new();
            for i in 1..hists.len() {
                let (w, se) = wasserstein1_bootstrap(&scaled[i - 1], &scaled[i], resamples, seed)?;
                pairs.push(json!({ "L_a": hists[i - 1].l, "L_b": hists[i].l, "w1": w, "se": se }));
            }
            (json!({ "theta": theta, "pairs": pairs }), true)
        }
        "tension" => {
            let pts = failure_points(cfg)?;
            let fits = fit_surface_tension(&pts, cfg.capillary);
            (json!({ "fits": fits, "sigma_zero_crossing": sigma_zero_crossing(&fits) }), true)
        }
        name => {
            let family = AnsatzFamily::parse(name).ok_or_else(|| CliError::Usage(format!("unknown model {name:?}")))?;
            let pts = failure_points(cfg)?;
            let r = fit_failure_ansatz(&pts, family, None)?;
            (json!({ "fit": fit_json(&r) }), r.converged)
        }
    };
    Ok(Report { bytes: json_document(cfg, body)?, converged })
}
