//! Nelder–Mead simplex search on unconstrained coordinates.

/// Outcome of one simplex run.
#[derive(Debug, Clone)]
pub(crate) struct SimplexRun {
    /// Best point evaluated during the run and its value.
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexSettings {
    pub initial_step: f64,
    /// Stop once every vertex is within this sup-norm distance of the best vertex.
    pub tol_x: f64,
    pub max_evals: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .flat_map(|(v, _)| v.iter().zip(best).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
}

fn sort(simplex: &mut [(Vec<f64>, f64)]) {
    // Stable sort keeps ties in insertion order, so runs are reproducible.
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
}

fn combine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b - a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

pub(crate) fn minimize(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    settings: SimplexSettings,
) -> SimplexRun {
    let dim = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += settings.initial_step;
        let fv = eval(&v, &mut evals);
        simplex.push((v, fv));
    }
    sort(&mut simplex);

    let mut converged = false;
    while evals < settings.max_evals {
        if diameter(&simplex) <= settings.tol_x {
            converged = true;
            break;
        }
        let worst = simplex[dim].clone();
        let mut centroid = vec![0.0; dim];
        for (v, _) in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }

        let xr = combine(&centroid, &worst.0, -REFLECT);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = combine(&centroid, &worst.0, -EXPAND);
            let fe = eval(&xe, &mut evals);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = combine(&centroid, &xr, CONTRACT);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = combine(&centroid, &worst.0, CONTRACT);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[dim] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let v = combine(&best, &vertex.0, SHRINK);
                    let fv = eval(&v, &mut evals);
                    *vertex = (v, fv);
                }
            }
        }
        sort(&mut simplex);
    }
    if !converged && diameter(&simplex) <= settings.tol_x {
        converged = true;
    }
    let (best_x, best_f) = simplex.swap_remove(0);
    SimplexRun {
        best_x,
        best_f,
        evaluations: evals,
        converged,
    }
}
