//! Damped Gauss–Newton fit of a parallel-channel Arrhenius model in ln τ.
//!
//! Parameters are `(ln τ0_i, Δ_i)` per channel. The objective is
//! `Σ_k w_k (ln τ_k − ln τ(T_k))²` with `w_k = 1/σ_k²` where a point carries
//! an uncertainty and 1 otherwise. Each step solves
//! `(JᵀWJ + μ·diag(JᵀWJ)) δ = JᵀW r`; μ grows ×10 after an uphill trial and
//! shrinks ÷10 after an accepted one.

use serde::Serialize;

use super::{log_sum_exp, ArrheniusProcess, RelaxationDataset, RelaxationModel, MAX_PROCESSES};
use crate::error::{Error, Result};

pub const FIT_MAX_ITERATIONS: usize = 500;
const REL_OBJECTIVE_TOL: f64 = 1e-12;
const STEP_TOL: f64 = 1e-10;
const INITIAL_DAMPING: f64 = 1e-3;
/// Smallest Cholesky pivot of the unit-diagonal (correlation-scaled) normal
/// matrix before parameters are declared degenerate.
const DEGENERACY_PIVOT: f64 = 1e-9;

/// A channel whose barrier is below this many standard errors is unresolved.
pub const RESOLVED_SIGNIFICANCE: f64 = 3.0;
/// Cross-channel parameter correlation at which two channels are confounded.
pub const CONFOUNDED_CORRELATION: f64 = 0.9;

/// One-sigma uncertainties of a fitted channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProcessErrors {
    pub ln_tau0: f64,
    /// `τ0 · σ(ln τ0)`, seconds.
    pub tau0: f64,
    /// Kelvin.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    /// Channels sorted by ascending barrier.
    pub model: RelaxationModel,
    /// Aligned with `model.processes()`.
    pub std_errors: Vec<ProcessErrors>,
    /// Names of the covariance rows, `ln_tau0[i]` / `delta[i]` with 1-based i.
    pub parameter_names: Vec<String>,
    /// Covariance of `(ln τ0_1, Δ_1, ln τ0_2, Δ_2, …)`, scaled by the
    /// residual variance.
    pub covariance: Vec<Vec<f64>>,
    /// RMS of unweighted ln τ residuals.
    pub residual_rms: f64,
    /// Final weighted objective.
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Objective after every accepted step, starting with the initial guess.
    #[serde(skip)]
    pub objective_history: Vec<f64>,
}

/// Fit `n_processes` parallel Arrhenius channels to `data`.
///
/// Without `init` the starting guess splits the Arrhenius plot (ln τ against
/// 1/T) into `n_processes` contiguous runs of equal point count and fits a
/// straight line to each, coldest run first.
pub fn fit(data: &RelaxationDataset, n_processes: usize, init: Option<&RelaxationModel>) -> Result<FitResult> {
    if !(1..=MAX_PROCESSES).contains(&n_processes) {
        return Err(Error::invalid("n_processes", format!("must be in 1..={MAX_PROCESSES}, got {n_processes}")));
    }
    let n_params = 2 * n_processes;
    if data.len() < 2 * n_params {
        return Err(Error::InsufficientData { have: data.len(), need: 2 * n_params });
    }
    if let Some(m) = init {
        if m.len() != n_processes {
            return Err(Error::invalid("init", format!("has {} channels, expected {n_processes}", m.len())));
        }
    }

    let problem = Problem::new(data);
    let mut theta = match init {
        Some(m) => m.processes().iter().flat_map(|p| [p.tau0().ln(), p.delta()]).collect(),
        None => problem.segment_guess(n_processes),
    };

    let mut eval = problem.evaluate(&theta);
    if !eval.objective.is_finite() {
        return Err(Error::invalid("init", "initial guess gives a non-finite objective"));
    }
    let mut history = vec![eval.objective];
    let mut damping = INITIAL_DAMPING;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < FIT_MAX_ITERATIONS {
        iterations += 1;
        if eval.objective == 0.0 {
            converged = true;
            break;
        }
        let (normal, gradient) = eval.normal_equations();
        let mut damped = normal.clone();
        let max_diag = (0..n_params).map(|i| normal[i][i]).fold(0.0, f64::max);
        for (i, row) in damped.iter_mut().enumerate() {
            row[i] += damping * normal[i][i].max(1e-12 * max_diag).max(f64::MIN_POSITIVE);
        }
        let step = match cholesky(&damped).map(|l| cholesky_solve(&l, &gradient)) {
            Some(s) => s,
            None => {
                damping *= 10.0;
                continue;
            }
        };
        let step_norm = step.iter().map(|x| x * x).sum::<f64>().sqrt();
        let trial: Vec<f64> = theta.iter().zip(&step).map(|(t, s)| t + s).collect();
        let trial_eval = problem.evaluate(&trial);

        if trial_eval.objective < eval.objective {
            let rel = (eval.objective - trial_eval.objective) / eval.objective;
            theta = trial;
            eval = trial_eval;
            history.push(eval.objective);
            damping = (damping / 10.0).max(1e-15);
            if rel < REL_OBJECTIVE_TOL || step_norm < STEP_TOL {
                converged = true;
                break;
            }
        } else {
            damping *= 10.0;
            if step_norm < STEP_TOL {
                converged = true;
                break;
            }
        }
    }

    let names = parameter_names(n_processes);
    let (normal, _) = eval.normal_equations();
    check_degeneracy(&normal, &names)?;
    let inverse = invert_spd(&normal).ok_or_else(|| degenerate_pair(&normal, &names))?;

    let n = problem.len() as f64;
    let variance = eval.objective / (n - n_params as f64);
    let mut covariance: Vec<Vec<f64>> = inverse.iter().map(|row| row.iter().map(|c| c * variance).collect()).collect();
    let residual_rms = (eval.raw_residuals.iter().map(|r| r * r).sum::<f64>() / n).sqrt();

    // sort channels by barrier and permute the covariance to match
    let mut order: Vec<usize> = (0..n_processes).collect();
    order.sort_by(|&a, &b| theta[2 * a + 1].total_cmp(&theta[2 * b + 1]));
    let perm: Vec<usize> = order.iter().flat_map(|&c| [2 * c, 2 * c + 1]).collect();
    covariance = perm.iter().map(|&i| perm.iter().map(|&j| covariance[i][j]).collect()).collect();

    let mut processes = Vec::with_capacity(n_processes);
    let mut std_errors = Vec::with_capacity(n_processes);
    for (k, &c) in order.iter().enumerate() {
        let (ln_tau0, delta) = (theta[2 * c], theta[2 * c + 1]);
        let process = ArrheniusProcess::new(ln_tau0.exp(), delta).map_err(|_| {
            Error::invalid(
                "delta",
                format!("fitted channel {} is unphysical (ln tau0 = {ln_tau0}, delta = {delta} K)", k + 1),
            )
        })?;
        let se_ln = covariance[2 * k][2 * k].max(0.0).sqrt();
        std_errors.push(ProcessErrors {
            ln_tau0: se_ln,
            tau0: process.tau0() * se_ln,
            delta: covariance[2 * k + 1][2 * k + 1].max(0.0).sqrt(),
        });
        processes.push(process);
    }

    Ok(FitResult {
        model: RelaxationModel::new(processes)?,
        std_errors,
        parameter_names: names,
        covariance,
        residual_rms,
        objective: eval.objective,
        converged,
        iterations,
        objective_history: history,
    })
}

impl FitResult {
    /// Parameter correlation `cov_ij / √(cov_ii cov_jj)`.
    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        let c = &self.covariance;
        c[i][j] / (c[i][i] * c[j][j]).sqrt()
    }

    /// Indices of channels the data do not pin down.
    ///
    /// A channel is unresolved when its barrier is less than
    /// [`RESOLVED_SIGNIFICANCE`] standard errors from zero, or when any of its
    /// parameters correlates with a parameter of another channel at
    /// |ρ| ≥ [`CONFOUNDED_CORRELATION`]. Fitting more channels than the data
    /// support typically lands here rather than in a singular normal matrix.
    pub fn unresolved_channels(&self) -> Vec<usize> {
        let n = self.model.len();
        (0..n)
            .filter(|&k| {
                let weak = self.model.processes()[k].delta() < RESOLVED_SIGNIFICANCE * self.std_errors[k].delta;
                let confounded = (0..n).filter(|&o| o != k).any(|o| {
                    [2 * k, 2 * k + 1].iter().any(|&i| {
                        [2 * o, 2 * o + 1].iter().any(|&j| self.correlation(i, j).abs() >= CONFOUNDED_CORRELATION)
                    })
                });
                weak || confounded
            })
            .collect()
    }
}

fn parameter_names(n_processes: usize) -> Vec<String> {
    (1..=n_processes).flat_map(|i| [format!("ln_tau0[{i}]"), format!("delta[{i}]")]).collect()
}

struct Problem {
    inv_t: Vec<f64>,
    ln_tau: Vec<f64>,
    sqrt_w: Vec<f64>,
}

struct Evaluation {
    /// `√w_k (y_k − f_k)`.
    residuals: Vec<f64>,
    raw_residuals: Vec<f64>,
    /// `√w_k ∂f_k/∂θ_j`.
    jacobian: Vec<Vec<f64>>,
    objective: f64,
}

impl Problem {
    fn new(data: &RelaxationDataset) -> Self {
        let pts = data.points();
        Self {
            inv_t: pts.iter().map(|p| 1.0 / p.temperature).collect(),
            ln_tau: pts.iter().map(|p| p.tau.ln()).collect(),
            sqrt_w: pts.iter().map(|p| p.sigma_ln_tau.map_or(1.0, |s| 1.0 / s)).collect(),
        }
    }

    fn len(&self) -> usize {
        self.inv_t.len()
    }

    fn evaluate(&self, theta: &[f64]) -> Evaluation {
        let nc = theta.len() / 2;
        let mut residuals = Vec::with_capacity(self.len());
        let mut raw_residuals = Vec::with_capacity(self.len());
        let mut jacobian = Vec::with_capacity(self.len());
        let mut z = vec![0.0; nc];
        for k in 0..self.len() {
            let x = self.inv_t[k];
            for c in 0..nc {
                z[c] = -theta[2 * c] - theta[2 * c + 1] * x;
            }
            let lse = log_sum_exp(z.iter().copied());
            let f = -lse;
            let raw = self.ln_tau[k] - f;
            let sw = self.sqrt_w[k];
            raw_residuals.push(raw);
            residuals.push(sw * raw);
            let mut row = vec![0.0; 2 * nc];
            for c in 0..nc {
                let frac = (z[c] - lse).exp();
                row[2 * c] = sw * frac;
                row[2 * c + 1] = sw * frac * x;
            }
            jacobian.push(row);
        }
        let objective = residuals.iter().map(|r| r * r).sum::<f64>();
        Evaluation {
            residuals,
            raw_residuals,
            jacobian,
            objective: if objective.is_nan() { f64::INFINITY } else { objective },
        }
    }

    /// Straight-line fits to equal-count runs of the Arrhenius plot.
    fn segment_guess(&self, n_processes: usize) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.inv_t[b].total_cmp(&self.inv_t[a]));
        let per = self.len() / n_processes;
        let mut theta = Vec::with_capacity(2 * n_processes);
        for s in 0..n_processes {
            let end = if s == n_processes - 1 { self.len() } else { (s + 1) * per };
            let seg = &idx[s * per..end];
            let (ln_tau0, delta) = self.line_fit(seg);
            theta.push(ln_tau0);
            theta.push(delta);
        }
        theta
    }

    /// Weighted least-squares `ln τ = ln τ0 + Δ/T`, barrier clamped at 0.
    fn line_fit(&self, seg: &[usize]) -> (f64, f64) {
        let w = |k: usize| self.sqrt_w[k] * self.sqrt_w[k];
        let sw: f64 = seg.iter().map(|&k| w(k)).sum();
        let mx = seg.iter().map(|&k| w(k) * self.inv_t[k]).sum::<f64>() / sw;
        let my = seg.iter().map(|&k| w(k) * self.ln_tau[k]).sum::<f64>() / sw;
        let sxx: f64 = seg.iter().map(|&k| w(k) * (self.inv_t[k] - mx).powi(2)).sum();
        let sxy: f64 = seg.iter().map(|&k| w(k) * (self.inv_t[k] - mx) * (self.ln_tau[k] - my)).sum();
        let slope = if sxx > 0.0 { (sxy / sxx).max(0.0) } else { 0.0 };
        (my - slope * mx, slope)
    }
}

impl Evaluation {
    /// `(JᵀWJ, JᵀW r)`.
    fn normal_equations(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let np = self.jacobian[0].len();
        let mut a = vec![vec![0.0; np]; np];
        let mut g = vec![0.0; np];
        for (row, r) in self.jacobian.iter().zip(&self.residuals) {
            for i in 0..np {
                g[i] += row[i] * r;
                for j in 0..np {
                    a[i][j] += row[i] * row[j];
                }
            }
        }
        (a, g)
    }
}

fn check_degeneracy(normal: &[Vec<f64>], names: &[String]) -> Result<()> {
    let np = normal.len();
    if let Some(i) = (0..np).find(|&i| !(normal[i][i] > 0.0)) {
        return Err(Error::DegenerateParameters {
            first: names[i].clone(),
            second: "(no influence on the model)".into(),
        });
    }
    let scaled = correlation(normal);
    match cholesky(&scaled) {
        Some(l) if (0..np).all(|i| l[i][i] * l[i][i] > DEGENERACY_PIVOT) => Ok(()),
        _ => Err(degenerate_pair(normal, names)),
    }
}

fn correlation(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d: Vec<f64> = (0..m.len()).map(|i| m[i][i].sqrt()).collect();
    m.iter().enumerate().map(|(i, row)| row.iter().enumerate().map(|(j, x)| x / (d[i] * d[j])).collect()).collect()
}

/// Names the most strongly correlated parameter pair.
fn degenerate_pair(normal: &[Vec<f64>], names: &[String]) -> Error {
    let c = correlation(normal);
    let mut best = (0, 1, -1.0);
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            if c[i][j].abs() > best.2 {
                best = (i, j, c[i][j].abs());
            }
        }
    }
    Error::DegenerateParameters { first: names[best.0].clone(), second: names[best.1].clone() }
}

/// Lower Cholesky factor; `None` unless strictly positive definite.
fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    x
}

fn invert_spd(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let l = cholesky(a)?;
    let n = a.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let e: Vec<f64> = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
            cholesky_solve(&l, &e)
        })
        .collect();
    // symmetrize
    Some((0..n).map(|i| (0..n).map(|j| 0.5 * (cols[j][i] + cols[i][j])).collect()).collect())
}
