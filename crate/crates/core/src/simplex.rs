//! Nelder–Mead simplex descent with an evaluation budget.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub reflect: f64,
    pub expand: f64,
    pub contract: f64,
    pub shrink: f64,
    /// Maximum number of objective evaluations, including the initial simplex.
    pub budget: usize,
    /// Stop once the vertex values spread by at most this much...
    pub ftol: f64,
    /// ...and every vertex lies within this distance of the best one.
    pub xtol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            reflect: 1.0,
            expand: 2.0,
            contract: 0.5,
            shrink: 0.5,
            budget: 2000,
            ftol: 1e-15,
            xtol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    /// Best point evaluated so far (not necessarily a current vertex).
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub iterations: usize,
}

struct Counted<F> {
    f: F,
    evaluations: usize,
    budget: usize,
    best: Option<(Vec<f64>, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    /// `None` once the budget is spent. NaN values count as `+inf`.
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.evaluations >= self.budget {
            return None;
        }
        self.evaluations += 1;
        let mut v = (self.f)(x);
        if v.is_nan() {
            v = f64::INFINITY;
        }
        if self.best.as_ref().is_none_or(|(_, b)| v < *b) {
            self.best = Some((x.to_vec(), v));
        }
        Some(v)
    }
}

fn affine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b - a)
    a.iter().zip(b).map(|(ai, bi)| ai + t * (bi - ai)).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Minimize `f` starting from the given simplex (`dim + 1` vertices).
///
/// Vertices are kept sorted by value with a stable sort, so equal values keep
/// their current order and lower positions win ties. The run is fully
/// deterministic for a given objective and initial simplex.
pub fn minimize<F: FnMut(&[f64]) -> f64>(f: F, initial: Vec<Vec<f64>>, opts: &SimplexOptions) -> SimplexResult {
    assert!(!initial.is_empty(), "simplex needs at least one vertex");
    let mut obj = Counted {
        f,
        evaluations: 0,
        budget: opts.budget.max(1),
        best: None,
    };
    let mut iterations = 0;
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(initial.len());
    for x in initial {
        match obj.eval(&x) {
            Some(v) => simplex.push((x, v)),
            None => break,
        }
    }

    if simplex.len() == simplex[0].0.len() + 1 {
        'outer: loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let n = simplex.len() - 1;
            let (f_best, f_second, f_worst) = (simplex[0].1, simplex[n - 1].1, simplex[n].1);
            let spread = simplex.iter().map(|(x, _)| dist(x, &simplex[0].0)).fold(0.0, f64::max);
            if (f_worst - f_best).abs() <= opts.ftol && spread <= opts.xtol {
                break;
            }
            iterations += 1;

            let dim = simplex[0].0.len();
            let mut centroid = vec![0.0; dim];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let worst = simplex[n].0.clone();

            let xr = affine(&centroid, &worst, -opts.reflect);
            let Some(fr) = obj.eval(&xr) else { break };

            if fr < f_best {
                let xe = affine(&centroid, &xr, opts.expand);
                let Some(fe) = obj.eval(&xe) else {
                    simplex[n] = (xr, fr);
                    break;
                };
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < f_second {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc, accept) = if fr < f_worst {
                let xc = affine(&centroid, &xr, opts.contract);
                let Some(fc) = obj.eval(&xc) else { break };
                (xc, fc, fc <= fr)
            } else {
                let xc = affine(&centroid, &worst, opts.contract);
                let Some(fc) = obj.eval(&xc) else { break };
                (xc, fc, fc < f_worst)
            };
            if accept {
                simplex[n] = (xc, fc);
                continue;
            }

            let anchor = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x = affine(&anchor, &vertex.0, opts.shrink);
                let Some(v) = obj.eval(&x) else { break 'outer };
                *vertex = (x, v);
            }
        }
    }

    let (x, f) = obj.best.expect("at least one evaluation");
    SimplexResult {
        x,
        f,
        evaluations: obj.evaluations,
        iterations,
    }
}

/// Axis-aligned simplex: `x0` plus `x0 + steps[i] e_i` for each coordinate.
pub fn axis_simplex(x0: &[f64], steps: &[f64]) -> Vec<Vec<f64>> {
    let mut out = vec![x0.to_vec()];
    for (i, h) in steps.iter().enumerate() {
        let mut v = x0.to_vec();
        v[i] += h;
        out.push(v);
    }
    out
}
