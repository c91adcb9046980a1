//! Writer for the covering LP in the plain LP text dialect, so external
//! solvers can cross-validate the exact oracle on instances beyond its
//! size limit.
//!
//! The primal has one variable `x_i_k` per center `i` and candidate-radius
//! rank `k`, with coverage rows for every non-source point. The dual has
//! one variable `y_j` per non-source point, with a capacity row per
//! coverage set. Coefficients carry 17 significant digits.

use std::fmt::Write;

use rangecast::{Alpha, ArrivalInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpForm {
    Primal,
    Dual,
}

fn coef(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_lp(instance: &ArrivalInstance, alpha: Alpha, form: LpForm) -> String {
    let n = instance.len();
    let radii: Vec<Vec<f64>> = (0..n).map(|i| instance.candidate_ranges(i)).collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ priority cover LP ({}), n = {}, alpha = {}",
        match form {
            LpForm::Primal => "primal",
            LpForm::Dual => "dual",
        },
        n,
        alpha.get()
    );

    match form {
        LpForm::Primal => {
            let _ = writeln!(out, "Minimize");
            let mut first = true;
            for (i, rs) in radii.iter().enumerate() {
                for (k, r) in rs.iter().enumerate() {
                    let prefix = if first { " obj:" } else { "    +" };
                    let _ = writeln!(out, "{prefix} {} x_{i}_{k}", coef(r.powf(alpha.get())));
                    first = false;
                }
            }
            if first {
                let _ = writeln!(out, " obj:");
            }
            let _ = writeln!(out, "Subject To");
            for j in 1..n {
                let mut terms = Vec::new();
                for (i, rs) in radii.iter().enumerate().take(j) {
                    let d = instance.dist(i, j);
                    for (k, r) in rs.iter().enumerate() {
                        if *r >= d {
                            terms.push(format!("x_{i}_{k}"));
                        }
                    }
                }
                let _ = writeln!(out, " cover_{j}: {} >= 1", terms.join(" + "));
            }
            let _ = writeln!(out, "Bounds");
            for (i, rs) in radii.iter().enumerate() {
                for k in 0..rs.len() {
                    let _ = writeln!(out, " x_{i}_{k} >= 0");
                }
            }
        }
        LpForm::Dual => {
            let _ = writeln!(out, "Maximize");
            let mut first = true;
            for j in 1..n {
                let prefix = if first { " obj:" } else { "    +" };
                let _ = writeln!(out, "{prefix} y_{j}");
                first = false;
            }
            if first {
                let _ = writeln!(out, " obj:");
            }
            let _ = writeln!(out, "Subject To");
            for (i, rs) in radii.iter().enumerate() {
                for (k, r) in rs.iter().enumerate() {
                    let members: Vec<String> = ((i + 1)..n)
                        .filter(|&j| instance.dist(i, j) <= *r)
                        .map(|j| format!("y_{j}"))
                        .collect();
                    let _ = writeln!(
                        out,
                        " set_{i}_{k}: {} <= {}",
                        members.join(" + "),
                        coef(r.powf(alpha.get()))
                    );
                }
            }
            let _ = writeln!(out, "Bounds");
            for j in 1..n {
                let _ = writeln!(out, " y_{j} >= 0");
            }
        }
    }
    let _ = writeln!(out, "End");
    out
}
