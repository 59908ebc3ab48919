//! The verification suites behind `moyal run`.

use crate::config::{Experiment, ExperimentConfig};
use crate::report::{Check, Plot, Report};
use moyal::duality::{
    approx_identity_error, twisted_conv_functional, Functional, Side,
};
use moyal::error::{GridWarning, MoyalError, Result};
use moyal::gaussian::Gaussian;
use moyal::grid::PhaseGrid;
use moyal::gsanalysis::{
    entire_coeff_check, fourier_bound_check, gs_norm, lemma_a1_check, norm_report_json,
    truncation_order, GSParams,
};
use moyal::multi_index::MultiIndex;
use moyal::poly::Polynomial;
use moyal::spectral::{
    fourier, star_via_twisted, symplectic_fourier, twisted_convolution, Direction,
    StarOperand, SymplecticSign,
};
use moyal::starproduct::{semiclassical_residual, star_integral, star_series};
use moyal::symbol::{sample, GridSymbol, Symbol};
use moyal::theta::ThetaMatrix;
use moyal::C64;

pub fn run(config: &ExperimentConfig) -> Result<(Report, Plot)> {
    match config.experiment {
        Experiment::Trace => trace(config),
        Experiment::StarCompare => star_compare(config),
        Experiment::Associativity => associativity(config),
        Experiment::Bridge => bridge(config),
        Experiment::ApproxId => approx_id(config),
        Experiment::Norms => norms(config),
        Experiment::FourierBound => fourier_bound(config),
        Experiment::SeriesTail => series_tail(config),
    }
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j));
        }
    }
    out
}

fn slope_fit(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn rel_sup_diff(a: &GridSymbol<f64>, b: &GridSymbol<f64>) -> Result<f64> {
    Ok(a.sup_diff(b)? / b.sup_norm())
}

fn format_warnings(warnings: &[GridWarning]) -> Vec<String> {
    warnings.iter().map(|w| w.to_string()).collect()
}

fn trace(config: &ExperimentConfig) -> Result<(Report, Plot)> {
    let tol = config.tolerance("rel_err", 1e-8);
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let mut plot = Plot::new(&["pair_i", "pair_j", "rel_err"]);
    for (i, j) in all_pairs(config.symbols.len()) {
        let f = &config.symbols[i];
        let g = &config.symbols[j];
        let fg = star_integral(f, g, &config.theta, &config.grid)?;
        warnings.extend(format_warnings(&fg.warnings));
        let lhs = fg.value.integral();
        let fs = sample(f, &config.grid)?.symbol;
        let gs = sample(g, &config.grid)?.symbol;
        let rhs = fs.pointwise_mul(&gs)?.integral();
        let rel = (lhs - rhs).norm() / rhs.norm();
        checks.push(Check::upper(format!("trace pair {i}-{j}"), rel, tol));
        plot.push(vec![i as f64, j as f64, rel]);
    }
    Ok((Report::new("trace", checks, warnings), plot))
}

fn star_compare(config: &ExperimentConfig) -> Result<(Report, Plot)> {
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let mut plot = Plot::new(&["epsilon", "residual"]);

    // integral path against the closed form on Gaussian pairs
    let pair_tol = config.tolerance("pair_rel", 1e-7);
    for (i, j) in all_pairs(config.symbols.len()) {
        let (Symbol::Gaussian(f), Symbol::Gaussian(g)) =
            (&config.symbols[i], &config.symbols[j])
        else {
            continue;
        };
        let numeric = star_integral(
            &config.symbols[i],
            &config.symbols[j],
            &config.theta,
            &config.grid,
        )?;
        warnings.extend(format_warnings(&numeric.warnings));
        let closed = f.star(g, &config.theta)?;
        let want = sample(&Symbol::Gaussian(closed), &config.grid)?.symbol;
        let rel = rel_sup_diff(&numeric.value, &want)?;
        checks.push(Check::upper(format!("integral vs closed form, pair {i}-{j}"), rel, pair_tol));
    }

    // deformation order: residual after removing the first-order term must
    // scale like ε²
    if config.grid.dim() == 2 && config.symbols.len() >= 2 {
        if let (Symbol::Gaussian(f), Symbol::Gaussian(g)) =
            (&config.symbols[0], &config.symbols[1])
        {
            let epsilons = config.param_f64_list("epsilons", &[0.1, 0.05, 0.025]);
            let mut lx = Vec::new();
            let mut ly = Vec::new();
            for &eps in &epsilons {
                let th = ThetaMatrix::canonical(2, eps)?;
                let r = semiclassical_residual(f, g, &th, &config.grid)?;
                plot.push(vec![eps, r]);
                lx.push(eps.ln());
                ly.push(r.ln());
            }
            let slope = slope_fit(&lx, &ly);
            let dev = config.tolerance("slope_dev", 0.2);
            checks.push(Check::within("semiclassical slope", slope, 2.0 - dev, 2.0 + dev));
        }
    }

    Ok((Report::new("star-compare", checks, warnings), plot))
}

fn associativity(config: &ExperimentConfig) -> Result<(Report, Plot)> {
    let tol = config.tolerance("assoc_rel", 1e-6);
    let id_tol = config.tolerance("identity_rel", 1e-8);
    let max_triples = config.param_u64("max_triples", 3) as usize;
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let mut plot = Plot::new(&["triple", "rel_dev"]);

    let n = config.symbols.len();
    let mut count = 0usize;
    'outer: for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                if count >= max_triples {
                    break 'outer;
                }
                let (f, g, h) = (&config.symbols[i], &config.symbols[j], &config.symbols[k]);
                let fg = star_integral(f, g, &config.theta, &config.grid)?.value;
                let left =
                    star_integral(&Symbol::Grid(fg), h, &config.theta, &config.grid)?.value;
                let gh = star_integral(g, h, &config.theta, &config.grid)?.value;
                let right =
                    star_integral(f, &Symbol::Grid(gh), &config.theta, &config.grid)?.value;
                let rel = rel_sup_diff(&left, &right)?;
                checks.push(Check::upper(format!("associativity triple {i}-{j}-{k}"), rel, tol));
                plot.push(vec![count as f64, rel]);
                count += 1;
            }
        }
    }

    // identities: 𝟙⋆f = f through the bridge, δ★̂g = g directly
    if config.theta.is_invertible() {
        let one = Functional::One { d: config.grid.dim() };
        for (i, f) in config.symbols.iter().enumerate().take(2) {
            let out = star_via_twisted(
                StarOperand::Functional(&one),
                f,
                &config.theta,
                Side::Left,
                &config.grid,
            )?;
            warnings.extend(format_warnings(&out.warnings));
            let want = sample(f, &config.grid)?.symbol;
            let rel = rel_sup_diff(&out.value, &want)?;
            checks.push(Check::upper(format!("identity functional on symbol {i}"), rel, id_tol));
        }
    }
    let delta = Functional::Delta { xi: vec![0.0; config.grid.dim()] };
    for (i, g) in config.symbols.iter().enumerate().take(2) {
        let out = twisted_conv_functional(&delta, g, &config.theta, Side::Left, &config.grid)?;
        let want = sample(g, &config.grid)?.symbol;
        let rel = rel_sup_diff(&out.value, &want)?;
        checks.push(Check::upper(format!("delta identity on symbol {i}"), rel, id_tol));
    }

    Ok((Report::new("associativity", checks, warnings), plot))
}

fn bridge(config: &ExperimentConfig) -> Result<(Report, Plot)> {
    let fb_tol = config.tolerance("fourier_bridge", 1e-8);
    let br_tol = config.tolerance("bridge_rel", 1e-7);
    let dt_tol = config.tolerance("double_transform", 1e-10);
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let mut plot = Plot::new(&["pair", "fourier_bridge", "bridge_left", "bridge_right"]);

    let d = config.grid.dim() as i32;
    let two_pi_d = (2.0 * std::f64::consts::PI).powi(d);

    for (idx, (i, j)) in all_pairs(config.symbols.len()).into_iter().enumerate() {
        let f = &config.symbols[i];
        let g = &config.symbols[j];

        // transform of the star product equals the scaled twisted
        // convolution of the transforms
        let fg = star_integral(f, g, &config.theta, &config.grid)?.value;
        let lhs = fourier(&Symbol::Grid(fg), Direction::Forward)?;
        let fs = sample(f, &config.grid)?.symbol;
        let gs = sample(g, &config.grid)?.symbol;
        let fhat = fourier(&Symbol::Grid(fs), Direction::Forward)?;
        let ghat = fourier(&Symbol::Grid(gs), Direction::Forward)?;
        let dual = config.grid.dual();
        let conv = twisted_convolution(&fhat, &ghat, &config.theta, &dual)?;
        warnings.extend(format_warnings(&conv.warnings));
        let scaled = conv.value.scale(C64::new(1.0 / two_pi_d, 0.0));
        let Symbol::Grid(lhs) = lhs else { unreachable!() };
        let fb = rel_sup_diff(&lhs, &scaled)?;
        checks.push(Check::upper(format!("fourier bridge pair {i}-{j}"), fb, fb_tol));

        // the −4θ⁻¹ twisted-convolution route against the direct integral
        let mut bl = f64::NAN;
        let mut br = f64::NAN;
        if config.theta.is_invertible() {
            let direct = star_integral(f, g, &config.theta, &config.grid)?.value;
            let left = star_via_twisted(
                StarOperand::Symbol(f),
                g,
                &config.theta,
                Side::Left,
                &config.grid,
            )?;
            warnings.extend(format_warnings(&left.warnings));
            bl = rel_sup_diff(&left.value, &direct)?;
            checks.push(Check::upper(format!("bridge left pair {i}-{j}"), bl, br_tol));

            let direct_r = star_integral(g, f, &config.theta, &config.grid)?.value;
            let right = star_via_twisted(
                StarOperand::Symbol(f),
                g,
                &config.theta,
                Side::Right,
                &config.grid,
            )?;
            br = rel_sup_diff(&right.value, &direct_r)?;
            checks.push(Check::upper(format!("bridge right pair {i}-{j}"), br, br_tol));
        }
        plot.push(vec![idx as f64, fb, bl, br]);
    }

    // double symplectic transform scales by π^d det θ
    if config.theta.is_invertible() {
        let factor = std::f64::consts::PI.powi(d) * config.theta.det();
        for (i, s) in config.symbols.iter().enumerate().take(3) {
            let once = symplectic_fourier(s, &config.theta, SymplecticSign::Minus, &config.grid)?;
            warnings.extend(format_warnings(&once.warnings));
            let twice = symplectic_fourier(
                &once.value,
                &config.theta,
                SymplecticSign::Minus,
                &config.grid,
            )?;
            let twice_s = sample(&twice.value, &config.grid)?.symbol;
            let want = sample(s, &config.grid)?.symbol.scale(C64::new(factor, 0.0));
            let rel = rel_sup_diff(&twice_s, &want)?;
            checks.push(Check::upper(format!("double symplectic transform symbol {i}"), rel, dt_tol));

            // the conjugated pair adds a reflection, so on even symbols
            // F̄_θ F_θ also scales by the same factor
            if let Symbol::Gaussian(gg) = s {
                let even = gg.linear().iter().all(|z| z.norm() == 0.0);
                if even {
                    let back = symplectic_fourier(
                        &once.value,
                        &config.theta,
                        SymplecticSign::Plus,
                        &config.grid,
                    )?;
                    let back_s = sample(&back.value, &config.grid)?.symbol;
                    let rel = rel_sup_diff(&back_s, &want)?;
                    checks.push(Check::upper(
                        format!("conjugate double transform symbol {i}"),
                        rel,
                        dt_tol,
                    ));
                }
            }
        }
    }

    Ok((Report::new("bridge", checks, warnings), plot))
}

fn approx_id(config: &ExperimentConfig) -> Result<(Report, Plot)> {
    if config.symbols.len() < 2 {
        return Err(MoyalError::Config(
            "approx-id needs two symbols: the test symbol and the profile e".into(),
        ));
    }
    let f = &config.symbols[0];
    let e = &config.symbols[1];
    let nus: Vec<u32> = config
        .param_f64_list("nus", &[4.0, 8.0, 16.0, 32.0])
        .into_iter()
        .map(|v| v as u32)
        .collect();
    let omega_tol = config.tolerance("omega", 1e-10);
    let slope_lo = -config.tolerance("slope_lo_abs", 1.3);
    let slope_hi = -config.tolerance("slope_hi_abs", 0.8);

    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let mut plot = Plot::new(&["nu", "err", "omega_check"]);
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for &nu in &nus {
        let r = approx_identity_error(f, e, nu, &config.theta, Side::Right, &config.grid)?;
        warnings.extend(format_warnings(&r.warnings));
        checks.push(Check::upper(format!("omega normalization at nu={nu}"), r.value.omega_check, omega_tol));
        plot.push(vec![nu as f64, r.value.err, r.value.omega_check]);
        lx.push((nu as f64).ln());
        ly.push(r.value.err.ln());
    }
    let slope = slope_fit(&lx, &ly);
    checks.push(Check::within("identity error decay slope", slope, slope_lo, slope_hi));
    Ok((Report::new("approx-id", checks, warnings), plot))
}

fn norms(config: &ExperimentConfig) -> Result<(Report, Plot)> {
    let alpha = config.param_f64("alpha", 0.5);
    let beta = config.param_f64("beta", 0.5);
    let a = config.param_f64("a", 1.0);
    let b = config.param_f64("b", 1.0);
    let weight_sign = config.param_f64("weight_sign", 1.0) as i8;
    let n_max = config.param_u64("n_max", 6) as usize;
    let a1_order = config.param_u64("a1_order", 4) as u32;
    let stability_tol = config.tolerance("stability", 1e-6);

    let params = GSParams::new(alpha, beta, a, b, weight_sign)?;
    let params_json = serde_json::to_value(&params).expect("params serialize");

    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let mut plot = Plot::new(&["symbol", "order", "per_order"]);
    let mut norm_reports = Vec::new();

    let doubled = PhaseGrid::new(
        config.grid.dim(),
        config.grid.half_extent(),
        config.grid.points_per_axis() * 2,
    )?;

    for (i, s) in config.symbols.iter().enumerate() {
        let est = gs_norm(s, &params, n_max, &config.grid)?;
        warnings.extend(format_warnings(&est.warnings));
        norm_reports.push(norm_report_json(&params_json, &est.value));
        for (order, &v) in est.value.per_order.iter().enumerate() {
            plot.push(vec![i as f64, order as f64, v]);
        }
        // grid refinement must not move the estimate
        if matches!(s, Symbol::Gaussian(_)) {
            let est2 = gs_norm(s, &params, n_max, &doubled)?;
            let rel = (est2.value.value - est.value.value).abs() / est.value.value;
            checks.push(Check::upper(format!("norm stability under refinement, symbol {i}"), rel, stability_tol));
        }

        // the derivative/moment inequality over all |k|, |n| ≤ a1_order
        let d = config.grid.dim();
        let mut total = 0usize;
        let mut held = 0usize;
        let mut real_held = 0usize;
        let mut real_total = 0usize;
        let is_real = match s {
            Symbol::Gaussian(g) => {
                g.quadratic().data.iter().all(|z| z.im == 0.0)
                    && g.linear().iter().all(|z| z.im == 0.0)
                    && g.constant().im == 0.0
            }
            Symbol::Grid(gr) => gr.values().iter().all(|z| z.im == 0.0),
            Symbol::Polynomial(_) => false,
        };
        for k in MultiIndex::up_to_order(d, a1_order) {
            for n in MultiIndex::up_to_order(d, a1_order) {
                let r = lemma_a1_check(s, &k, &n, &config.grid)?;
                total += 1;
                if r.value.holds {
                    held += 1;
                }
                if is_real {
                    real_total += 1;
                    if r.value.lhs <= r.value.rhs_no_factor * (1.0 + 1e-6) {
                        real_held += 1;
                    }
                }
            }
        }
        checks.push(
            Check::upper(
                format!("quadrature inequality failures, symbol {i}"),
                (total - held) as f64,
                0.0,
            )
            .with_detail(format!("{held}/{total} held")),
        );
        if is_real {
            checks.push(
                Check::upper(
                    format!("sharp real-valued inequality failures, symbol {i}"),
                    (real_total - real_held) as f64,
                    0.0,
                )
                .with_detail(format!("{real_held}/{real_total} held without the √2 factor")),
            );
        }
    }

    let mut report = Report::new("norms", checks, warnings);
    report.norm_reports = Some(norm_reports);
    Ok((report, plot))
}

fn fourier_bound(config: &ExperimentConfig) -> Result<(Report, Plot)> {
    let alpha = config.param_f64("alpha", 0.5);
    let beta = config.param_f64("beta", 0.5);
    let a = config.param_f64("a", 1.5);
    let b = config.param_f64("b", 3.0);
    let n_max = config.param_u64("n_max", 6) as usize;
    let stability_tol = config.tolerance("stability", 0.05);
    let params = GSParams::new(alpha, beta, a, b, 1)?;

    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let mut plot = Plot::new(&["symbol", "ratio"]);

    let ratio_on = |grid: &PhaseGrid<f64>| -> Result<Vec<f64>> {
        config
            .symbols
            .iter()
            .map(|s| {
                let r = fourier_bound_check(s, &params, n_max, grid)?;
                Ok(r.value.ratio)
            })
            .collect()
    };
    let ratios = ratio_on(&config.grid)?;
    let mut r_used = f64::NAN;
    for (i, s) in config.symbols.iter().enumerate() {
        let r = fourier_bound_check(s, &params, n_max, &config.grid)?;
        warnings.extend(format_warnings(&r.warnings));
        r_used = r.value.r_used;
        plot.push(vec![i as f64, r.value.ratio]);
    }
    let max_ratio = ratios.iter().copied().fold(0.0f64, f64::max);
    checks.push(
        Check::upper("max transform/norm ratio finite", if max_ratio.is_finite() { 0.0 } else { 1.0 }, 0.0)
            .with_detail(format!("max ratio {max_ratio:.6e}, r = {r_used:.4}")),
    );

    let doubled = PhaseGrid::new(
        config.grid.dim(),
        config.grid.half_extent(),
        config.grid.points_per_axis() * 2,
    )?;
    let ratios2 = ratio_on(&doubled)?;
    let max2 = ratios2.iter().copied().fold(0.0f64, f64::max);
    let rel_change = (max2 - max_ratio).abs() / max_ratio;
    checks.push(Check::upper("max ratio stability under refinement", rel_change, stability_tol));

    Ok((Report::new("fourier-bound", checks, warnings), plot))
}

/// Truncate a Gaussian symbol to the polynomial partial sum of its
/// exponential series.
fn gaussian_to_polynomial(g: &Gaussian<f64>, degree: u32) -> Polynomial<f64> {
    let d = g.dim();
    let mut u = Polynomial::zero(d);
    for i in 0..d {
        for j in 0..d {
            let c = -g.quadratic()[(i, j)];
            if c.norm() != 0.0 {
                let mut n = MultiIndex::zero(d);
                n.0[i] += 1;
                n.0[j] += 1;
                let slot = u.coeffs().get(&n).copied().unwrap_or(C64::new(0.0, 0.0));
                u.set(n, slot + c);
            }
        }
    }
    for (j, &bj) in g.linear().iter().enumerate() {
        if bj.norm() != 0.0 {
            let mut n = MultiIndex::zero(d);
            n.0[j] = 1;
            u.set(n, bj);
        }
    }
    u.set(MultiIndex::zero(d), g.constant());
    Polynomial::exp_truncated(&u, degree + 2, degree)
}

/// Coefficient family of the star-product exponential: one variable per
/// active θ entry, coefficient (i/2)^{|k|} Π θ^{k_t}/k_t!.
fn star_exponential_coeffs(theta: &ThetaMatrix<f64>, order: u32) -> Polynomial<f64> {
    let pairs = theta.active_pairs();
    let nvars = pairs.len();
    let mut p = Polynomial::zero(nvars);
    for k in MultiIndex::up_to_order(nvars, order) {
        let mut coeff = C64::new(1.0, 0.0);
        let half_i = C64::new(0.0, 0.5);
        for _ in 0..k.order() {
            coeff *= half_i;
        }
        for (t, &(i, j)) in pairs.iter().enumerate() {
            let kt = k.get(t);
            let mut fact = 1.0f64;
            for v in 1..=kt {
                fact *= v as f64;
            }
            coeff *= C64::new(theta.entry(i, j).powi(kt as i32) / fact, 0.0);
        }
        if coeff.norm() > 0.0 {
            p.set(k, coeff);
        }
    }
    p
}

fn series_tail(config: &ExperimentConfig) -> Result<(Report, Plot)> {
    if config.symbols.len() < 2 {
        return Err(MoyalError::Config("series-tail needs two symbols".into()));
    }
    let (Symbol::Gaussian(fg), Symbol::Gaussian(gg)) = (&config.symbols[0], &config.symbols[1])
    else {
        return Err(MoyalError::Config(
            "series-tail expects Gaussian-exponential symbols to truncate".into(),
        ));
    };
    let degree = config.param_u64("truncate_degree", 24) as u32;
    let series_order = config.param_u64("series_order", 14) as usize;
    let op_order = config.param_u64("op_order", 16) as u32;
    let weight_a = config.param_f64("weight_a", 1.0);
    let b_fit_orders = config.param_u64("b_fit_orders", 8) as usize;
    let tail_tol = config.param_f64("tail_tol", 1e-8);
    let ratio_slack = config.tolerance("ratio_slack", 0.1);
    let from_order = config.param_u64("ratio_from_order", 5) as usize;

    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let mut plot = Plot::new(&["order", "term_norm"]);

    // exact series on the polynomial truncations
    let fp = gaussian_to_polynomial(fg, degree);
    let gp = gaussian_to_polynomial(gg, degree);
    let series = star_series(
        &Symbol::Polynomial(fp.clone()),
        &Symbol::Polynomial(gp),
        &config.theta,
        series_order,
    )?;

    // weighted sup of each term over the grid
    let weight = Gaussian::isotropic(config.grid.dim(), 1.0 / (weight_a * weight_a))?;
    let weights: Vec<f64> = (0..config.grid.len())
        .map(|i| weight.eval(&config.grid.node(i)).re)
        .collect();
    let term_norms: Vec<f64> = series
        .terms
        .iter()
        .map(|t| {
            let Symbol::Polynomial(tp) = t else { unreachable!() };
            let mut sup = 0.0f64;
            for i in 0..config.grid.len() {
                let v = tp.eval(&config.grid.node(i)).norm() * weights[i];
                if v > sup {
                    sup = v;
                }
            }
            sup
        })
        .collect();
    for (n, &t) in term_norms.iter().enumerate() {
        plot.push(vec![n as f64, t]);
    }

    // b from the operator's coefficient family, B from the symbols' own
    // derivative growth in the same weight
    let op_coeffs = star_exponential_coeffs(&config.theta, op_order);
    let op_fit = entire_coeff_check(&op_coeffs)?;
    checks.push(
        Check::upper(
            "operator coefficients satisfy the entire bound",
            if op_fit.satisfies { 0.0 } else { 1.0 },
            0.0,
        )
        .with_detail(format!("b_fit = {:.6}", op_fit.b_fit)),
    );
    let sym_fit = entire_coeff_check(&fp)?;
    checks.push(Check::upper(
        "symbol coefficients satisfy the entire bound",
        if sym_fit.satisfies { 0.0 } else { 1.0 },
        0.0,
    ));

    let gs_params = GSParams::new(0.5, 0.5, weight_a, 1.0, -1)?;
    let mut b_const = 0.0f64;
    for s in [&config.symbols[0], &config.symbols[1]] {
        let est = gs_norm(s, &gs_params, b_fit_orders, &config.grid)?;
        warnings.extend(format_warnings(&est.warnings));
        let sigma0 = est.value.per_order[0];
        for (n, &sn) in est.value.per_order.iter().enumerate().skip(1) {
            if sn > 0.0 && sigma0 > 0.0 {
                b_const = b_const.max((sn / sigma0).powf(1.0 / n as f64));
            }
        }
    }
    let q_bound = b_const * (2.0 * op_fit.b_fit).sqrt();
    checks.push(
        Check::upper("geometric bound below one", q_bound, 1.0 - 1e-9)
            .with_detail(format!("B = {b_const:.4}, b = {:.4}, q = {q_bound:.4}", op_fit.b_fit)),
    );

    // measured term ratios beyond the transient orders
    let floor = term_norms.iter().copied().fold(0.0f64, f64::max) * 1e-250;
    let mut max_ratio = 0.0f64;
    for n in from_order..term_norms.len().saturating_sub(1) {
        if term_norms[n] > floor {
            max_ratio = max_ratio.max(term_norms[n + 1] / term_norms[n]);
        }
    }
    checks.push(Check::upper(
        format!("term ratio beyond order {from_order}"),
        max_ratio,
        q_bound * (1.0 + ratio_slack),
    ));

    // the predicted geometric tail must dominate the measured remainder
    let c_pref = term_norms
        .iter()
        .enumerate()
        .map(|(n, &t)| t / q_bound.powi(n as i32))
        .fold(0.0f64, f64::max);
    let m = truncation_order(b_const, op_fit.b_fit, c_pref, tail_tol)?;
    let predicted = c_pref * q_bound.powi(m as i32 + 1) / (1.0 - q_bound);
    let measured: f64 = term_norms.iter().skip(m + 1).sum();
    checks.push(
        Check::upper("measured remainder within predicted tail", measured, predicted)
            .with_detail(format!("M = {m}, predicted {predicted:.3e}")),
    );
    checks.push(Check::upper(
        "truncation order within computed range",
        m as f64,
        (term_norms.len() - 1) as f64,
    ));

    Ok((Report::new("series-tail", checks, warnings), plot))
}
