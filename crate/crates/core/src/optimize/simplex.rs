//! Derivative-free Nelder–Mead simplex minimization.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Nelder–Mead settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMead {
    pub max_iterations: usize,
    /// Stop once `f(worst) - f(best)` drops below this.
    pub tolerance: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub step_scale: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iterations: 4000,
            tolerance: 1e-10,
            step_scale: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best objective value after each iteration.
    pub trace: Vec<f64>,
}

struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> Result<f64>> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evaluations += 1;
        let v = (self.f)(x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite {
                value: v,
                point: x.to_vec(),
            });
        }
        Ok(v)
    }
}

impl NelderMead {
    /// Minimizes an infallible objective.
    pub fn minimize<F>(&self, mut f: F, x0: &[f64]) -> Result<Minimum>
    where
        F: FnMut(&[f64]) -> f64,
    {
        self.try_minimize(|x| Ok(f(x)), x0)
    }

    /// Minimizes an objective that may itself fail.
    pub fn try_minimize<F>(&self, f: F, x0: &[f64]) -> Result<Minimum>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let mut f = Counted { f, evaluations: 0 };
        let n = x0.len();
        if let Some(bad) = x0.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                value: *bad,
                point: x0.to_vec(),
            });
        }
        if n == 0 {
            let value = f.eval(x0)?;
            return Ok(Minimum {
                x: Vec::new(),
                value,
                iterations: 0,
                evaluations: 1,
                converged: true,
                trace: vec![value],
            });
        }

        let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        let mut values: Vec<f64> = Vec::with_capacity(n + 1);
        points.push(x0.to_vec());
        values.push(f.eval(x0)?);
        for i in 0..n {
            let mut p = x0.to_vec();
            p[i] += self.step_scale;
            values.push(f.eval(&p)?);
            points.push(p);
        }

        let mut order: Vec<usize> = (0..=n).collect();
        let mut trace = Vec::new();
        let mut centroid = vec![0.0; n];
        let mut iterations = 0;
        let mut converged = false;
        loop {
            // stable sort keeps ties in insertion order
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let (best, worst, second_worst) = (order[0], order[n], order[n - 1]);
            trace.push(values[best]);
            if iterations >= self.max_iterations {
                break;
            }
            if values[worst] - values[best] < self.tolerance {
                // a flat simplex can straddle a minimum; accept only if its
                // centroid is no better than the best vertex
                let mid: Vec<f64> = (0..n)
                    .map(|d| points.iter().map(|p| p[d]).sum::<f64>() / (n + 1) as f64)
                    .collect();
                let fm = f.eval(&mid)?;
                if fm < values[best] - self.tolerance {
                    iterations += 1;
                    points[worst] = mid;
                    values[worst] = fm;
                    continue;
                }
                converged = true;
                break;
            }
            iterations += 1;

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for &i in &order[..n] {
                for (c, x) in centroid.iter_mut().zip(&points[i]) {
                    *c += x;
                }
            }
            centroid.iter_mut().for_each(|c| *c /= n as f64);

            let along = |t: f64, from: &[f64]| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(from)
                    .map(|(c, x)| c + t * (x - c))
                    .collect()
            };

            let reflected = along(-REFLECT, &points[worst]);
            let fr = f.eval(&reflected)?;
            if fr < values[best] {
                let expanded = along(EXPAND, &reflected);
                let fe = f.eval(&expanded)?;
                if fe < fr {
                    points[worst] = expanded;
                    values[worst] = fe;
                } else {
                    points[worst] = reflected;
                    values[worst] = fr;
                }
                continue;
            }
            if fr < values[second_worst] {
                points[worst] = reflected;
                values[worst] = fr;
                continue;
            }
            let accepted = if fr < values[worst] {
                let outside = along(CONTRACT, &reflected);
                let fc = f.eval(&outside)?;
                (fc <= fr).then_some((outside, fc))
            } else {
                let inside = along(CONTRACT, &points[worst]);
                let fc = f.eval(&inside)?;
                (fc < values[worst]).then_some((inside, fc))
            };
            if let Some((p, v)) = accepted {
                points[worst] = p;
                values[worst] = v;
                continue;
            }
            let anchor = points[best].clone();
            for &i in &order[1..] {
                for (x, a) in points[i].iter_mut().zip(&anchor) {
                    *x = a + SHRINK * (*x - a);
                }
                values[i] = f.eval(&points[i])?;
            }
        }
        let best = order[0];
        Ok(Minimum {
            x: points.swap_remove(best),
            value: values[best],
            iterations,
            evaluations: f.evaluations,
            converged,
            trace,
        })
    }
}
