//! Nelder-Mead direct search (minimization).

/// Reflection, expansion, contraction and shrink coefficients.
const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Clone, Debug)]
pub(crate) struct SimplexOptions {
    pub max_iterations: usize,
    /// Spread `f_worst - f_best` below which the simplex counts as collapsed.
    pub tolerance: f64,
    /// Initial edge length along each coordinate.
    pub steps: Vec<f64>,
}

#[derive(Clone, Debug)]
pub(crate) struct SimplexOutcome {
    pub iterations: usize,
}

/// Minimizes `f` from `x0`.
///
/// `project` is applied to every new vertex before it is evaluated. When the
/// simplex collapses it is rebuilt around the best vertex; the search stops
/// once a rebuild yields no improvement beyond `tolerance` or the iteration
/// budget runs out.
pub(crate) fn minimize<F, P>(
    mut f: F,
    project: P,
    x0: &[f64],
    opts: &SimplexOptions,
) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    let n = x0.len();
    let mut iterations = 0;
    if n == 0 || opts.max_iterations == 0 {
        return SimplexOutcome { iterations };
    }
    let mut anchor = x0.to_vec();
    project(&mut anchor);
    let mut anchor_value = f(&anchor);

    loop {
        let (mut verts, mut values) = build(&mut f, &project, &anchor, anchor_value, &opts.steps);
        let mut order: Vec<usize> = (0..=n).collect();
        loop {
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let (best, worst, second) = (order[0], order[n], order[n - 1]);
            if values[worst] - values[best] <= opts.tolerance || iterations >= opts.max_iterations {
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for &k in &order[..n] {
                for (c, x) in centroid.iter_mut().zip(&verts[k]) {
                    *c += x / n as f64;
                }
            }
            let toward = |from: &[f64], t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(from)
                    .map(|(c, x)| c + t * (x - c))
                    .collect()
            };

            let mut reflected = toward(&verts[worst], -REFLECT);
            project(&mut reflected);
            let fr = f(&reflected);

            if fr < values[best] {
                let mut expanded = toward(&reflected, EXPAND);
                project(&mut expanded);
                let fe = f(&expanded);
                if fe < fr {
                    verts[worst] = expanded;
                    values[worst] = fe;
                } else {
                    verts[worst] = reflected;
                    values[worst] = fr;
                }
                continue;
            }
            if fr < values[second] {
                verts[worst] = reflected;
                values[worst] = fr;
                continue;
            }
            let (mut contracted, threshold) = if fr < values[worst] {
                (toward(&reflected, CONTRACT), fr)
            } else {
                (toward(&verts[worst], CONTRACT), values[worst])
            };
            project(&mut contracted);
            let fc = f(&contracted);
            if fc < threshold {
                verts[worst] = contracted;
                values[worst] = fc;
                continue;
            }
            let keep = verts[best].clone();
            for &k in &order[1..] {
                let mut shrunk: Vec<f64> = keep
                    .iter()
                    .zip(&verts[k])
                    .map(|(b, x)| b + SHRINK * (x - b))
                    .collect();
                project(&mut shrunk);
                values[k] = f(&shrunk);
                verts[k] = shrunk;
            }
        }

        let best = order[0];
        let improved = anchor_value - values[best] > opts.tolerance;
        anchor = verts[best].clone();
        anchor_value = values[best];
        if !improved || iterations >= opts.max_iterations {
            return SimplexOutcome { iterations };
        }
    }
}

fn build<F, P>(
    f: &mut F,
    project: &P,
    anchor: &[f64],
    anchor_value: f64,
    steps: &[f64],
) -> (Vec<Vec<f64>>, Vec<f64>)
where
    F: FnMut(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    let mut verts = vec![anchor.to_vec()];
    let mut values = vec![anchor_value];
    for (k, &step) in steps.iter().enumerate() {
        let mut v = anchor.to_vec();
        v[k] += step;
        project(&mut v);
        values.push(f(&v));
        verts.push(v);
    }
    (verts, values)
}
