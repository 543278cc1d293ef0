//! Limited-memory BFGS minimiser with a strong-Wolfe line search.

use std::collections::VecDeque;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsParams {
    pub history: usize,
    pub max_iters: usize,
    /// Stop once the gradient infinity-norm drops below this.
    pub epsilon: f64,
    pub c1: f64,
    pub c2: f64,
    pub max_line_search: usize,
}

impl Default for LbfgsParams {
    fn default() -> Self {
        LbfgsParams {
            history: 10,
            max_iters: 500,
            epsilon: 1e-4,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
    /// No step satisfying the sufficient-decrease condition was found.
    LineSearchFailed,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max_iterations",
            Termination::LineSearchFailed => "line_search_failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    /// `(value, gradient infinity-norm)` at the start and after every accepted step.
    pub trace: Vec<(f64, f64)>,
    pub termination: Termination,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(g: &[f64]) -> f64 {
    g.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Point {
    alpha: f64,
    value: f64,
    slope: f64,
    grad: Vec<f64>,
}

/// Minimises `f`, which returns the value and gradient at a point.
pub fn minimize<F>(x0: Vec<f64>, params: &LbfgsParams, mut f: F) -> Result<Outcome>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut x = x0;
    let (mut value, mut grad) = f(&x)?;
    let mut grad_norm = inf_norm(&grad);
    let mut trace = vec![(value, grad_norm)];
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;

    let termination = loop {
        if grad_norm < params.epsilon {
            break Termination::Converged;
        }
        if iterations >= params.max_iters {
            break Termination::MaxIterations;
        }

        let mut dir = direction(&grad, &memory);
        let mut slope = dot(&grad, &dir);
        if !(slope < 0.0) {
            memory.clear();
            dir = grad.iter().map(|g| -g).collect();
            slope = -dot(&grad, &grad);
        }
        let alpha0 = if memory.is_empty() {
            (1.0 / dir.iter().map(|d| d * d).sum::<f64>().sqrt()).min(1.0)
        } else {
            1.0
        };

        let mut eval = |alpha: f64| -> Point {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + alpha * di).collect();
            match f(&trial) {
                Ok((v, g)) if v.is_finite() && g.iter().all(|z| z.is_finite()) => Point {
                    alpha,
                    value: v,
                    slope: dot(&g, &dir),
                    grad: g,
                },
                _ => Point {
                    alpha,
                    value: f64::INFINITY,
                    slope: f64::NAN,
                    grad: Vec::new(),
                },
            }
        };
        let Some(step) = line_search(value, slope, alpha0, params, &mut eval) else {
            break Termination::LineSearchFailed;
        };

        let s: Vec<f64> = dir.iter().map(|d| step.alpha * d).collect();
        for (xi, si) in x.iter_mut().zip(&s) {
            *xi += si;
        }
        let y: Vec<f64> = step.grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            if memory.len() == params.history {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        }
        value = step.value;
        grad = step.grad;
        grad_norm = inf_norm(&grad);
        iterations += 1;
        trace.push((value, grad_norm));
    };

    Ok(Outcome {
        x,
        value,
        grad_norm,
        iterations,
        trace,
        termination,
    })
}

/// Two-loop recursion: `-H g`.
fn direction(grad: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = grad.iter().map(|g| -g).collect();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|qi| *qi *= gamma);
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q
}

fn line_search<E>(value0: f64, slope0: f64, alpha0: f64, params: &LbfgsParams, eval: &mut E) -> Option<Point>
where
    E: FnMut(f64) -> Point,
{
    let armijo = |p: &Point| p.value <= value0 + params.c1 * p.alpha * slope0;
    let curvature = |p: &Point| p.slope.abs() <= -params.c2 * slope0;

    let mut prev = Point {
        alpha: 0.0,
        value: value0,
        slope: slope0,
        grad: Vec::new(),
    };
    let mut alpha = alpha0;
    for i in 0..params.max_line_search {
        let cur = eval(alpha);
        if !armijo(&cur) || (i > 0 && cur.value >= prev.value) {
            return zoom(prev, cur, value0, slope0, params, eval);
        }
        if curvature(&cur) {
            return Some(cur);
        }
        if cur.slope >= 0.0 {
            return zoom(cur, prev, value0, slope0, params, eval);
        }
        alpha = cur.alpha * 2.0;
        prev = cur;
    }
    (prev.alpha > 0.0).then_some(prev)
}

fn zoom<E>(
    mut lo: Point,
    mut hi: Point,
    value0: f64,
    slope0: f64,
    params: &LbfgsParams,
    eval: &mut E,
) -> Option<Point>
where
    E: FnMut(f64) -> Point,
{
    for _ in 0..params.max_line_search {
        let alpha = interpolate(&lo, &hi);
        if (hi.alpha - lo.alpha).abs() < 1e-16 * lo.alpha.abs().max(1.0) {
            break;
        }
        let cur = eval(alpha);
        if cur.value > value0 + params.c1 * alpha * slope0 || cur.value >= lo.value {
            hi = cur;
        } else {
            if cur.slope.abs() <= -params.c2 * slope0 {
                return Some(cur);
            }
            if cur.slope * (hi.alpha - lo.alpha) >= 0.0 {
                hi = std::mem::replace(&mut lo, cur);
            } else {
                lo = cur;
            }
        }
    }
    // settle for sufficient decrease alone
    (lo.alpha > 0.0).then_some(lo)
}

/// Minimiser of the cubic through both end points, kept away from the ends;
/// bisection when the cubic is unusable.
fn interpolate(a: &Point, b: &Point) -> f64 {
    let (lo, hi) = (a.alpha.min(b.alpha), a.alpha.max(b.alpha));
    let width = hi - lo;
    let mid = 0.5 * (lo + hi);
    if !(a.value.is_finite() && b.value.is_finite() && a.slope.is_finite() && b.slope.is_finite()) {
        return mid;
    }
    let d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.alpha - b.alpha);
    let disc = d1 * d1 - a.slope * b.slope;
    if disc < 0.0 {
        return mid;
    }
    let d2 = (b.alpha - a.alpha).signum() * disc.sqrt();
    let t = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
    if t.is_finite() && t > lo + 0.1 * width && t < hi - 0.1 * width {
        t
    } else {
        mid
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (a, b) = (x[0], x[1]);
        let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
        Ok((v, g))
    }

    #[test]
    fn quadratic() {
        let c = [1.0, -2.0, 3.0, 0.5];
        let out = minimize(vec![0.0; 4], &LbfgsParams::default(), |x| {
            let v = x.iter().zip(&c).enumerate().map(|(i, (a, b))| (i + 1) as f64 * (a - b).powi(2)).sum();
            let g = x.iter().zip(&c).enumerate().map(|(i, (a, b))| 2.0 * (i + 1) as f64 * (a - b)).collect();
            Ok((v, g))
        })
        .unwrap();
        assert_eq!(out.termination, Termination::Converged);
        for (a, b) in out.x.iter().zip(&c) {
            assert!((a - b).abs() < 1e-4);
        }
    }

    #[test]
    fn rosenbrock_converges_monotonically() {
        let params = LbfgsParams {
            epsilon: 1e-8,
            ..LbfgsParams::default()
        };
        let out = minimize(vec![-1.2, 1.0], &params, rosenbrock).unwrap();
        assert_eq!(out.termination, Termination::Converged);
        assert!((out.x[0] - 1.0).abs() < 1e-6 && (out.x[1] - 1.0).abs() < 1e-6);
        assert!(out.trace.windows(2).all(|w| w[1].0 <= w[0].0));
        assert_eq!(out.trace.len(), out.iterations + 1);
    }

    #[test]
    fn iteration_cap() {
        let params = LbfgsParams {
            max_iters: 3,
            epsilon: 1e-12,
            ..LbfgsParams::default()
        };
        let out = minimize(vec![-1.2, 1.0], &params, rosenbrock).unwrap();
        assert_eq!(out.termination, Termination::MaxIterations);
        assert_eq!(out.iterations, 3);
    }

    #[test]
    fn already_optimal() {
        let out = minimize(vec![1.0, 1.0], &LbfgsParams::default(), rosenbrock).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.termination, Termination::Converged);
    }
}
