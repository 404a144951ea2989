//! Box-constrained Nelder–Mead minimizer.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_iter: usize,
    /// Stop once the spread of simplex values falls below this.
    pub tol: f64,
    pub initial_step: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iter: 300,
            tol: 1e-10,
            initial_step: 0.5,
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

fn clamp(x: &mut [f64], o: &SimplexOptions) {
    for v in x.iter_mut() {
        *v = v.clamp(o.lower, o.upper);
    }
}

/// Minimizes `f` starting from `x0`; every trial point is clamped to the
/// box `[lower, upper]ⁿ`.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: SimplexOptions) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let eval = |x: &mut Vec<f64>| {
        clamp(x, &opts);
        f(x)
    };
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut start = x0.to_vec();
    let v0 = eval(&mut start);
    pts.push(start);
    let mut vals = vec![v0];
    for i in 0..n {
        let mut p = x0.to_vec();
        // Step inward when the box would swallow the move.
        p[i] += if p[i] + opts.initial_step <= opts.upper {
            opts.initial_step
        } else {
            -opts.initial_step
        };
        vals.push(eval(&mut p));
        pts.push(p);
    }

    let mut iterations = 0;
    while iterations < opts.max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        if vals[n] - vals[0] <= opts.tol {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let mut xr = along(1.0);
        let fr = eval(&mut xr);
        if fr < vals[0] {
            let mut xe = along(2.0);
            let fe = eval(&mut xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (mut xc, outside) = if fr < vals[n] {
            (along(0.5), true)
        } else {
            (along(-0.5), false)
        };
        let fc = eval(&mut xc);
        if (outside && fc <= fr) || (!outside && fc < vals[n]) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        let best = pts[0].clone();
        for i in 1..=n {
            let mut p: Vec<f64> = best
                .iter()
                .zip(&pts[i])
                .map(|(b, x)| b + 0.5 * (x - b))
                .collect();
            vals[i] = eval(&mut p);
            pts[i] = p;
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .expect("non-empty simplex");
    SimplexResult {
        x: pts[best].clone(),
        value: vals[best],
        iterations,
    }
}
