//! Derivative-free minimizers used by the projection solver.
//!
//! `+∞` and NaN objective values are rejected probes: they compare as larger
//! than every finite value.

use rand::Rng;

use crate::rng::seeded;

/// Golden-section stops once the bracket is narrower than this.
pub const GOLDEN_WIDTH: f64 = 1e-8;
/// Nelder–Mead stops once the simplex diameter is below this.
pub const SIMPLEX_DIAMETER: f64 = 1e-7;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn clean(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Result of a scalar minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum1d {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub final_width: f64,
    /// The minimizer sits on a search-box edge.
    pub at_boundary: bool,
    /// Every probe returned `+∞`.
    pub infeasible: bool,
}

/// Minimizes `f` on `[lo, hi]`: bracketing by doubling steps from `x0`,
/// then golden-section search down to [`GOLDEN_WIDTH`].
pub fn minimize_scalar<F: FnMut(f64) -> f64>(mut f: F, x0: f64, step: f64, lo: f64, hi: f64) -> Minimum1d {
    let mut evaluations = 0usize;
    let mut eval = |x: f64| {
        evaluations += 1;
        clean(f(x))
    };
    let clamp = |x: f64| x.clamp(lo, hi);

    let x0 = clamp(x0);
    let mut f0 = eval(x0);
    let mut start = x0;
    if f0 == f64::INFINITY {
        // Look outward for a feasible point.
        let mut d = step;
        let mut found = false;
        while !found && (x0 - d > lo || x0 + d < hi) {
            for x in [clamp(x0 + d), clamp(x0 - d)] {
                let v = eval(x);
                if v < f64::INFINITY {
                    start = x;
                    f0 = v;
                    found = true;
                    break;
                }
            }
            d *= 2.0;
        }
        if !found {
            return Minimum1d {
                x: x0,
                value: f64::INFINITY,
                iterations: 0,
                evaluations,
                final_width: hi - lo,
                at_boundary: false,
                infeasible: true,
            };
        }
    }

    let right = clamp(start + step);
    let left = clamp(start - step);
    let (fr, fl) = (eval(right), eval(left));
    let (mut a, mut c);
    let mut iterations = 0usize;
    if f0 <= fr && f0 <= fl {
        a = left;
        c = right;
    } else {
        let dir = if fr < fl { 1.0 } else { -1.0 };
        let (mut prev, mut b, mut fb) = (start, if dir > 0.0 { right } else { left }, fr.min(fl));
        let mut d = 2.0 * step;
        loop {
            iterations += 1;
            let next = clamp(b + dir * d);
            if next == b {
                // Stuck on the box edge.
                return Minimum1d {
                    x: b,
                    value: fb,
                    iterations,
                    evaluations,
                    final_width: (b - prev).abs(),
                    at_boundary: true,
                    infeasible: false,
                };
            }
            let fn_ = eval(next);
            if fn_ >= fb {
                a = prev.min(next);
                c = prev.max(next);
                break;
            }
            prev = b;
            b = next;
            fb = fn_;
            d *= 2.0;
        }
    }

    let mut x1 = c - INV_PHI * (c - a);
    let mut x2 = a + INV_PHI * (c - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    while c - a > GOLDEN_WIDTH {
        iterations += 1;
        if f1 <= f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - INV_PHI * (c - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (c - a);
            f2 = eval(x2);
        }
    }
    let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let at_boundary = x - lo < 1e3 * GOLDEN_WIDTH || hi - x < 1e3 * GOLDEN_WIDTH;
    Minimum1d {
        x,
        value,
        iterations,
        evaluations,
        final_width: c - a,
        at_boundary,
        infeasible: value == f64::INFINITY,
    }
}

/// Result of a Nelder–Mead run (best over restarts).
#[derive(Debug, Clone, PartialEq)]
pub struct MinimumNd {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub final_diameter: f64,
    pub converged: bool,
    pub restarts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { initial_step: 0.5, max_iterations: 20_000, restarts: 3, seed: 0 }
    }
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let mut d = 0.0f64;
    for (i, a) in simplex.iter().enumerate() {
        for b in &simplex[i + 1..] {
            let dist = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            d = d.max(dist);
        }
    }
    d
}

/// Nelder–Mead from `restarts` seeded initial simplexes around `x0`; the
/// first simplex is axis-aligned, later ones use random directions and start
/// from the best point so far.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> MinimumNd {
    let n = x0.len();
    let mut rng = seeded(opts.seed);
    let mut best: Option<MinimumNd> = None;
    let mut evaluations = 0usize;
    let mut total_iterations = 0usize;
    for restart in 0..opts.restarts.max(1) {
        let origin = best.as_ref().map(|b| b.x.clone()).unwrap_or_else(|| x0.to_vec());
        let mut simplex = vec![origin.clone()];
        for i in 0..n {
            let mut v = origin.clone();
            if restart == 0 {
                v[i] += opts.initial_step;
            } else {
                for vj in v.iter_mut() {
                    *vj += opts.initial_step * rng.gen_range(-1.0..1.0);
                }
                v[i] += opts.initial_step * 0.5;
            }
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex
            .iter()
            .map(|x| {
                evaluations += 1;
                clean(f(x))
            })
            .collect();
        let mut iterations = 0usize;
        let mut converged = false;
        while iterations < opts.max_iterations {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();
            if diameter(&simplex) < SIMPLEX_DIAMETER {
                converged = true;
                break;
            }
            iterations += 1;
            let centroid: Vec<f64> =
                (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
            let along = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect()
            };
            let xr = along(-1.0);
            let fr = clean(f(&xr));
            evaluations += 1;
            if fr < values[0] {
                let xe = along(-2.0);
                let fe = clean(f(&xe));
                evaluations += 1;
                if fe < fr {
                    simplex[n] = xe;
                    values[n] = fe;
                } else {
                    simplex[n] = xr;
                    values[n] = fr;
                }
            } else if fr < values[n - 1] {
                simplex[n] = xr;
                values[n] = fr;
            } else {
                let (xc, fc) = if fr < values[n] {
                    let x = along(-0.5);
                    let v = clean(f(&x));
                    (x, v)
                } else {
                    let x = along(0.5);
                    let v = clean(f(&x));
                    (x, v)
                };
                evaluations += 1;
                if fc < values[n].min(fr) {
                    simplex[n] = xc;
                    values[n] = fc;
                } else {
                    for i in 1..=n {
                        let shrunk: Vec<f64> =
                            simplex[0].iter().zip(&simplex[i]).map(|(b, x)| b + 0.5 * (x - b)).collect();
                        values[i] = clean(f(&shrunk));
                        evaluations += 1;
                        simplex[i] = shrunk;
                    }
                }
            }
        }
        total_iterations += iterations;
        let bi = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
        let candidate = MinimumNd {
            x: simplex[bi].clone(),
            value: values[bi],
            iterations: total_iterations,
            evaluations,
            final_diameter: diameter(&simplex),
            converged,
            restarts: restart + 1,
        };
        best = Some(match best {
            Some(b) if b.value <= candidate.value => MinimumNd {
                iterations: total_iterations,
                evaluations,
                restarts: restart + 1,
                converged: b.converged || candidate.converged,
                ..b
            },
            _ => candidate,
        });
    }
    best.expect("at least one restart")
}
