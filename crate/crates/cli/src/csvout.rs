//! CSV emission with a stable schema: header
//! `t,y,u,ystar,d,ddelta,e,rho,V,phi_norm` followed by
//! `theta_hat_1..theta_hat_2n` and `theta_star_1..theta_star_2n`, floats
//! serialized with 17 significant digits so traces replay bit-exactly.

use std::fmt::Write as _;

use poleplace::analysis;
use poleplace::simulation::Trace;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trace_header(n: usize) -> String {
    let mut header = String::from("t,y,u,ystar,d,ddelta,e,rho,V,phi_norm");
    for i in 1..=2 * n {
        let _ = write!(header, ",theta_hat_{i}");
    }
    for i in 1..=2 * n {
        let _ = write!(header, ",theta_star_{i}");
    }
    header
}

pub fn trace_csv(trace: &Trace) -> String {
    let mut out = trace_header(trace.n);
    out.push('\n');
    for row in &trace.rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.t,
            fmt_f64(row.y),
            fmt_f64(row.u),
            fmt_f64(row.ystar),
            fmt_f64(row.d),
            fmt_f64(row.ddelta),
            fmt_f64(row.e),
            row.rho,
            fmt_f64(row.v),
            fmt_f64(row.phi_norm),
        );
        for v in &row.theta_hat {
            let _ = write!(out, ",{}", fmt_f64(*v));
        }
        for v in &row.theta_star {
            let _ = write!(out, ",{}", fmt_f64(*v));
        }
        out.push('\n');
    }
    out
}

/// Summary metrics for a run, one `metric,value` row each. Rows that do
/// not apply to the run (envelope fits on noisy traces, descent checks on
/// time-varying ones) are omitted; inclusion is a pure function of the
/// trace, so re-running reproduces the file byte for byte.
pub fn analysis_csv(trace: &Trace) -> String {
    let mut out = String::from("metric,value\n");
    let mut push = |name: &str, value: f64| {
        let _ = writeln!(out, "{name},{}", fmt_f64(value));
    };

    let sup_phi = trace.rows.iter().fold(0.0f64, |m, r| m.max(r.phi_norm));
    let sup_y = trace.rows.iter().fold(0.0f64, |m, r| m.max(r.y.abs()));
    push("keyeq_max_dev", trace.keyeq_max_dev);
    push("sup_phi_norm", sup_phi);
    push("sup_abs_y", sup_y);
    if let Some(last) = trace.rows.last() {
        push("final_v", last.v);
    }
    push("update_energy_sum", analysis::update_energy_sum(trace));

    if trace.ideal_estimator && trace.theta_star_is_constant() {
        if let Some(first) = trace.rows.first() {
            let theta_star = first.theta_star.clone();
            if let Ok(report) = analysis::check_prop1(trace, &theta_star) {
                push("prop1_drift_max_violation", report.drift_max_violation);
                push("prop1_energy_max_violation", report.energy_max_violation);
            }
        }
    }

    if let Ok(fit) = analysis::fit_envelope(trace, &analysis::DEFAULT_LAMBDA_GRID) {
        if let Some((lambda_star, c_star)) = fit.best {
            push("envelope_lambda_star", lambda_star);
            push("envelope_c_star", c_star);
        }
    }

    let gain = analysis::gain_estimate(trace);
    push("gain_sup_phi", gain.sup_phi);
    push("gain_input_level", gain.input_level);
    if let Some(ratio) = gain.ratio {
        push("gain_ratio", ratio);
    }
    out
}
