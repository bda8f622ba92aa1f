//! Levenberg-Marquardt with Marquardt diagonal scaling, Nielsen damping
//! updates and box constraints by projection.

use super::{Dataset, FitError, FitParameter, FitResult, Model};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn unbounded(n: usize) -> Self {
        Self {
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self { lower, upper }
    }

    fn project(&self, p: &mut [f64]) {
        for (i, v) in p.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsqOptions {
    pub max_iterations: usize,
    /// Stop when an accepted step lowers the cost by less than this fraction.
    pub relative_tolerance: f64,
    /// Stop when `|Jᵀr|∞` falls below this.
    pub gradient_tolerance: f64,
    /// Initial damping relative to the largest diagonal of `JᵀJ`.
    pub initial_damping: f64,
}

impl Default for LsqOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            relative_tolerance: 1e-10,
            gradient_tolerance: 1e-12,
            initial_damping: 1e-9,
        }
    }
}

struct Linearization {
    residuals: DVector<f64>,
    jacobian: DMatrix<f64>,
    cost: f64,
}

fn residuals<M: Model + ?Sized>(model: &M, data: &Dataset, p: &[f64]) -> DVector<f64> {
    DVector::from_iterator(
        data.len(),
        (0..data.len()).map(|i| {
            let w = data.sigma.as_ref().map_or(1.0, |s| 1.0 / s[i]);
            (data.y[i] - model.value(data.x[i], p)) * w
        }),
    )
}

fn linearize<M: Model + ?Sized>(model: &M, data: &Dataset, p: &[f64]) -> Linearization {
    let r = residuals(model, data, p);
    let mut j = DMatrix::zeros(data.len(), p.len());
    let mut row = vec![0.0; p.len()];
    for i in 0..data.len() {
        model.gradient(data.x[i], p, &mut row);
        let w = data.sigma.as_ref().map_or(1.0, |s| 1.0 / s[i]);
        for (k, g) in row.iter().enumerate() {
            // residual = y − f, so ∂r/∂p = −∂f/∂p
            j[(i, k)] = -g * w;
        }
    }
    let cost = 0.5 * r.norm_squared();
    Linearization {
        residuals: r,
        jacobian: j,
        cost,
    }
}

/// Minimizes `½ Σ ((yᵢ − f(xᵢ; p)) / σᵢ)²` starting from `initial`.
///
/// Deterministic for fixed inputs. The covariance is `s² (JᵀJ)⁻¹` with
/// `s² = Σr²/(n − k)`; directions that the data leave unconstrained get an
/// infinite standard error.
pub fn least_squares<M: Model + ?Sized>(
    model: &M,
    data: &Dataset,
    initial: &[f64],
    bounds: &Bounds,
    options: &LsqOptions,
) -> Result<FitResult, FitError> {
    let names = model.parameter_names();
    let k = initial.len();
    if names.len() != k || bounds.lower.len() != k || bounds.upper.len() != k {
        return Err(FitError::InvalidData("parameter, name and bound counts differ".into()));
    }
    if data.len() < k + 1 {
        return Err(FitError::InsufficientData {
            points: data.len(),
            params: k,
        });
    }
    for i in 0..k {
        if !(initial[i] >= bounds.lower[i] && initial[i] <= bounds.upper[i]) {
            return Err(FitError::BoundsViolation { name: names[i].clone() });
        }
    }

    let free: Vec<bool> = (0..k).map(|i| bounds.lower[i] < bounds.upper[i]).collect();
    let mut p = initial.to_vec();
    let mut lin = linearize(model, data, &p);
    if !lin.cost.is_finite() || lin.jacobian.iter().any(|v| !v.is_finite()) {
        return Err(FitError::InvalidData("model is not finite at the initial guess".into()));
    }
    let mut jtj = lin.jacobian.tr_mul(&lin.jacobian);
    let mut grad = lin.jacobian.tr_mul(&lin.residuals);
    for i in 0..k {
        if free[i] && jtj[(i, i)] == 0.0 {
            return Err(FitError::SingularJacobian { name: names[i].clone() });
        }
    }

    let max_diag = (0..k).filter(|&i| free[i]).map(|i| jtj[(i, i)]).fold(0.0, f64::max);
    let mut mu = options.initial_damping * max_diag;
    let mut nu = 2.0;
    let mut history = vec![lin.cost];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < options.max_iterations {
        iterations += 1;

        // Free parameters not pinned against a bound by the descent direction.
        let moving: Vec<usize> = (0..k)
            .filter(|&i| {
                free[i] && !(p[i] <= bounds.lower[i] && grad[i] > 0.0) && !(p[i] >= bounds.upper[i] && grad[i] < 0.0)
            })
            .collect();
        let projected_grad = moving.iter().map(|&i| grad[i].abs()).fold(0.0, f64::max);
        if lin.cost == 0.0 || moving.is_empty() || projected_grad < options.gradient_tolerance {
            converged = true;
            break;
        }

        let m = moving.len();
        let diag_floor = max_diag.max(1e-300) * 1e-15;
        let mut a = DMatrix::zeros(m, m);
        let mut rhs = DVector::zeros(m);
        for (r, &i) in moving.iter().enumerate() {
            rhs[r] = -grad[i];
            for (c, &j) in moving.iter().enumerate() {
                a[(r, c)] = jtj[(i, j)];
            }
            a[(r, r)] += mu * jtj[(i, i)].max(diag_floor);
        }
        let reduced = match a.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => match a.lu().solve(&rhs) {
                Some(s) => s,
                None => {
                    mu *= nu;
                    nu *= 2.0;
                    continue;
                }
            },
        };

        let mut trial = p.clone();
        for (r, &i) in moving.iter().enumerate() {
            trial[i] += reduced[r];
        }
        bounds.project(&mut trial);
        let delta = DVector::from_iterator(k, (0..k).map(|i| trial[i] - p[i]));
        let negligible = (0..k).all(|i| delta[i].abs() <= 1e-15 * (p[i].abs() + 1e-300));
        if negligible {
            converged = true;
            break;
        }

        let r_trial = residuals(model, data, &trial);
        let cost_trial = 0.5 * r_trial.norm_squared();
        let predicted = -(grad.dot(&delta) + 0.5 * delta.dot(&(&jtj * &delta)));
        let actual = lin.cost - cost_trial;
        let rho = if predicted > 0.0 { actual / predicted } else { -1.0 };

        let accepted = if cost_trial.is_finite() && actual > 0.0 && rho > 0.0 {
            let next = linearize(model, data, &trial);
            next.jacobian.iter().all(|v| v.is_finite()).then_some(next)
        } else {
            None
        };
        if let Some(next) = accepted {
            let previous = lin.cost;
            p = trial;
            lin = next;
            jtj = lin.jacobian.tr_mul(&lin.jacobian);
            grad = lin.jacobian.tr_mul(&lin.residuals);
            history.push(lin.cost);
            mu *= (1.0f64 / 3.0).max(1.0 - (2.0 * rho - 1.0).powi(3));
            nu = 2.0;
            // Residuals at round-off count as an exact fit.
            let exact = lin.cost <= 1e-20 * history[0];
            if exact || (previous - lin.cost) <= options.relative_tolerance * previous {
                converged = true;
                break;
            }
        } else {
            mu *= nu;
            nu *= 2.0;
            if !mu.is_finite() || mu > 1e300 {
                // No descent direction left at machine precision.
                converged = true;
                break;
            }
        }
    }

    let residual_norm = (2.0 * lin.cost).sqrt();
    let errors = if converged {
        let free_idx: Vec<usize> = (0..k).filter(|&i| free[i]).collect();
        let (c, e) = covariance(&jtj, &free_idx, lin.cost, data.len());
        Some((c, e))
    } else {
        None
    };
    let parameters = names
        .into_iter()
        .enumerate()
        .map(|(i, name)| FitParameter {
            name,
            value: p[i],
            standard_error: errors.as_ref().map(|(_, e)| e[i]),
        })
        .collect();
    let result = FitResult {
        parameters,
        covariance: errors.map(|(c, _)| c),
        residual_norm,
        converged,
        iterations,
        cost_history: history,
    };
    if converged {
        Ok(result)
    } else {
        Err(FitError::IterationCap(Box::new(result)))
    }
}

/// Covariance over the free parameters; fixed parameters get zero rows.
fn covariance(jtj: &DMatrix<f64>, free: &[usize], cost: f64, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = jtj.nrows();
    let m = free.len();
    let mut cov = vec![vec![0.0; k]; k];
    if m == 0 {
        return (cov, vec![0.0; k]);
    }
    if jtj.iter().any(|v| !v.is_finite()) {
        for &i in free {
            cov[i][i] = f64::INFINITY;
        }
        let errors = (0..k).map(|i| cov[i][i].sqrt()).collect();
        return (cov, errors);
    }
    let s2 = 2.0 * cost / (n - m) as f64;
    let sub = DMatrix::from_fn(m, m, |r, c| jtj[(free[r], free[c])]);
    let svd = sub.svd(true, true);
    let smax = svd.singular_values.max();
    let v_t = svd.v_t.as_ref().expect("requested V");
    let mut inv = DMatrix::zeros(m, m);
    let mut unconstrained = vec![false; m];
    for (j, &s) in svd.singular_values.iter().enumerate() {
        let row = v_t.row(j);
        if s > smax * 1e-13 && s > 0.0 {
            inv += row.transpose() * row / s;
        } else {
            for i in 0..m {
                if row[i].abs() > 1e-6 {
                    unconstrained[i] = true;
                }
            }
        }
    }
    for r in 0..m {
        for c in 0..m {
            cov[free[r]][free[c]] = if unconstrained[r] || unconstrained[c] {
                if r == c {
                    f64::INFINITY
                } else {
                    f64::NAN
                }
            } else {
                0.5 * (inv[(r, c)] + inv[(c, r)]) * s2
            };
        }
    }
    let errors = (0..k).map(|i| cov[i][i].max(0.0).sqrt()).collect();
    (cov, errors)
}

#[cfg(test)]
mod tests {
    use super::super::{FnModel, LinearModel};
    use super::*;

    #[test]
    fn linear_exact_in_two_iterations() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| 3.0 - 0.5 * x).collect();
        let d = Dataset::new(x, y).unwrap();
        let opts = LsqOptions {
            max_iterations: 2,
            ..LsqOptions::default()
        };
        let r = match least_squares(&LinearModel, &d, &[0.0, 0.0], &Bounds::unbounded(2), &opts) {
            Ok(r) => r,
            Err(FitError::IterationCap(r)) => *r,
            Err(e) => panic!("{e}"),
        };
        assert!(r.iterations <= 2);
        assert!((r.values()[0] - 3.0).abs() < 1e-9);
        assert!((r.values()[1] + 0.5).abs() < 1e-9);
    }

    #[test]
    fn finite_difference_fallback_matches() {
        let x: Vec<f64> = (0..40).map(|i| i as f64 * 1e-6).collect();
        let y: Vec<f64> = x.iter().map(|t| (-t / 12e-6).exp()).collect();
        let d = Dataset::new(x, y).unwrap();
        let m = FnModel::new(&["tau"], |t, p| (-t / p[0]).exp());
        let r = least_squares(&m, &d, &[8e-6], &Bounds::unbounded(1), &LsqOptions::default()).unwrap();
        assert!((r.values()[0] / 12e-6 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn distinct_errors() {
        let d = Dataset::new(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
        let e = least_squares(
            &LinearModel,
            &d,
            &[0.0, 0.0, 0.0],
            &Bounds::unbounded(3),
            &LsqOptions::default(),
        );
        assert!(matches!(e, Err(FitError::InvalidData(_))));
        let short = Dataset::new(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            least_squares(
                &LinearModel,
                &short,
                &[0.0, 0.0],
                &Bounds::unbounded(2),
                &LsqOptions::default()
            ),
            Err(FitError::InsufficientData { .. })
        ));
        let b = Bounds::new(vec![1.0, f64::NEG_INFINITY], vec![2.0, f64::INFINITY]);
        assert!(matches!(
            least_squares(&LinearModel, &d, &[0.0, 0.0], &b, &LsqOptions::default()),
            Err(FitError::BoundsViolation { .. })
        ));
        let flat = FnModel::new(&["a", "unused"], |x, p| p[0] * x);
        assert!(matches!(
            least_squares(&flat, &d, &[1.0, 1.0], &Bounds::unbounded(2), &LsqOptions::default()),
            Err(FitError::SingularJacobian { .. })
        ));
        let slow = LsqOptions {
            max_iterations: 1,
            initial_damping: 1e3,
            ..LsqOptions::default()
        };
        let capped = least_squares(&LinearModel, &d, &[0.0, 0.0], &Bounds::unbounded(2), &slow);
        match capped {
            Err(FitError::IterationCap(r)) => {
                assert!(!r.converged);
                assert!(r.parameters.iter().all(|p| p.standard_error.is_none()));
            }
            other => panic!("expected iteration cap, got {other:?}"),
        }
    }

    #[test]
    fn bounds_are_respected() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| 3.0 - 0.5 * x).collect();
        let d = Dataset::new(x, y).unwrap();
        let b = Bounds::new(vec![f64::NEG_INFINITY, 0.0], vec![f64::INFINITY, 1.0]);
        let r = least_squares(&LinearModel, &d, &[0.0, 0.5], &b, &LsqOptions::default()).unwrap();
        assert_eq!(r.values()[1], 0.0);
    }
}
