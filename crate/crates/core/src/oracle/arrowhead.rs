//! Eigendecomposition of a real symmetric arrowhead matrix
//!
//! ```text
//! ⎡ a   z₁  z₂ … ⎤
//! ⎢ z₁  d₁       ⎥
//! ⎢ z₂      d₂   ⎥
//! ⎣ ⋮          ⋱ ⎦
//! ```
//!
//! in `O(n²)`: deflation of negligible couplings and near-equal poles,
//! a shifted secular-equation root per eigenvalue, and eigenvectors from
//! couplings recomputed with the Löwner formula so that they come out
//! numerically orthogonal.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

/// Eigenpairs sorted by ascending eigenvalue; column `α` of `vectors` is the
/// eigenvector for `values[α]`. Row 0 is the corner (`a`) coordinate.
#[derive(Debug, Clone)]
pub struct ArrowheadEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    /// Largest `‖Hv − λv‖` over all eigenpairs.
    pub residual: f64,
}

/// An eigenvalue stored as `origin + offset` so that differences to the pole
/// at `origin` keep full relative precision.
#[derive(Debug, Clone, Copy)]
struct Root {
    origin: f64,
    offset: f64,
}

impl Root {
    fn value(self) -> f64 {
        self.origin + self.offset
    }

    /// `d − λ` for a pole `d`.
    fn gap(self, d: f64) -> f64 {
        (d - self.origin) - self.offset
    }
}

/// Plane rotation mixing coordinates `i` and `j`, recorded during deflation.
#[derive(Debug, Clone, Copy)]
struct Rotation {
    i: usize,
    j: usize,
    c: f64,
    s: f64,
}

pub fn arrowhead_eigen(a: f64, d: &[f64], z: &[f64]) -> Result<ArrowheadEigen> {
    if d.len() != z.len() {
        return Err(Error::Validation(format!(
            "arrowhead diagonal has {} entries but {} couplings",
            d.len(),
            z.len()
        )));
    }
    if !a.is_finite() || d.iter().chain(z).any(|x| !x.is_finite()) {
        return Err(Error::Validation("arrowhead entries must be finite".into()));
    }
    let n = d.len();
    let dim = n + 1;
    let z_norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = d
        .iter()
        .fold(a.abs(), |m, x| m.max(x.abs()))
        .max(z_norm)
        .max(f64::MIN_POSITIVE);
    let tol = 8.0 * f64::EPSILON * scale;

    // pole order, then deflation in that order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| d[p].total_cmp(&d[q]));
    let mut zc: Vec<f64> = z.to_vec();
    let mut rotations = Vec::new();
    let mut deflated: Vec<usize> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for &k in &order {
        if zc[k].abs() <= tol {
            deflated.push(k);
            continue;
        }
        if let Some(&prev) = active.last() {
            if d[k] - d[prev] <= tol {
                // rotate the coupling of `prev` onto `k`; `prev` decouples
                let r = zc[prev].hypot(zc[k]);
                let rot = Rotation {
                    i: prev,
                    j: k,
                    c: zc[k] / r,
                    s: zc[prev] / r,
                };
                rotations.push(rot);
                zc[prev] = 0.0;
                zc[k] = r;
                active.pop();
                deflated.push(prev);
            }
        }
        active.push(k);
    }

    let poles: Vec<f64> = active.iter().map(|&k| d[k]).collect();
    let z2: Vec<f64> = active.iter().map(|&k| zc[k] * zc[k]).collect();
    let roots = secular_roots(a, &poles, &z2, z_norm)?;

    // Löwner couplings consistent with the computed roots
    let m = poles.len();
    let z_hat: Vec<f64> = (0..m)
        .map(|j| {
            let dj = poles[j];
            let mut prod = roots[j].gap(dj) * -roots[j + 1].gap(dj);
            for i in 0..m {
                if i < j {
                    prod *= roots[i].gap(dj) / (dj - poles[i]);
                } else if i > j {
                    prod *= roots[i + 1].gap(dj) / (dj - poles[i]);
                }
            }
            prod.max(0.0).sqrt().copysign(zc[active[j]])
        })
        .collect();

    // assemble (value, column) pairs in the deflated basis
    let mut values = Vec::with_capacity(dim);
    let mut vectors = DMatrix::<f64>::zeros(dim, dim);
    let mut col = 0;
    for root in &roots {
        let mut v = vec![0.0; dim];
        v[0] = 1.0;
        for (j, &k) in active.iter().enumerate() {
            v[k + 1] = -z_hat[j] / root.gap(poles[j]);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (r, x) in v.iter().enumerate() {
            vectors[(r, col)] = x / norm;
        }
        values.push(root.value());
        col += 1;
    }
    for &k in &deflated {
        vectors[(k + 1, col)] = 1.0;
        values.push(d[k]);
        col += 1;
    }

    for rot in rotations.iter().rev() {
        let (ri, rj) = (rot.i + 1, rot.j + 1);
        for c in 0..dim {
            let (xi, xj) = (vectors[(ri, c)], vectors[(rj, c)]);
            vectors[(ri, c)] = rot.c * xi + rot.s * xj;
            vectors[(rj, c)] = -rot.s * xi + rot.c * xj;
        }
    }

    let mut perm: Vec<usize> = (0..dim).collect();
    perm.sort_by(|&p, &q| values[p].total_cmp(&values[q]));
    let sorted_values: Vec<f64> = perm.iter().map(|&p| values[p]).collect();
    let sorted_vectors = DMatrix::from_fn(dim, dim, |r, c| vectors[(r, perm[c])]);

    let residual = max_residual(a, d, z, &sorted_values, &sorted_vectors);
    if !(residual <= 1e3 * tol.max(f64::EPSILON * scale) * (dim as f64).sqrt()) {
        return Err(Error::Numerical(format!(
            "arrowhead eigendecomposition residual {residual:.3e} exceeds tolerance \
             (n = {n}, scale = {scale:.3e}, deflated = {}, rotations = {})",
            deflated.len(),
            rotations.len()
        )));
    }
    Ok(ArrowheadEigen {
        values: sorted_values,
        vectors: sorted_vectors,
        residual,
    })
}

/// Roots of `f(λ) = λ − a − Σ z_j²/(λ − d_j)` for strictly increasing poles
/// `d`; there is one below `d₀`, one in each gap and one above the last pole.
fn secular_roots(a: f64, poles: &[f64], z2: &[f64], z_norm: f64) -> Result<Vec<Root>> {
    let m = poles.len();
    if m == 0 {
        return Ok(vec![Root {
            origin: a,
            offset: 0.0,
        }]);
    }
    let f = |origin: f64, mu: f64| -> (f64, f64) {
        let mut val = mu + (origin - a);
        let mut der = 1.0;
        for (&d, &w) in poles.iter().zip(z2) {
            let delta = mu - (d - origin);
            let q = w / delta;
            val -= q;
            der += q / delta;
        }
        (val, der)
    };
    let mut roots = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let (origin, lo, hi) = if k == 0 {
            let origin = poles[0];
            (origin, (a.min(origin) - z_norm) - origin - 1.0, 0.0)
        } else if k == m {
            let origin = poles[m - 1];
            (origin, 0.0, (a.max(origin) + z_norm) - origin + 1.0)
        } else {
            let (left, right) = (poles[k - 1], poles[k]);
            let mid = 0.5 * (right - left);
            let (fm, _) = f(left, mid);
            if fm > 0.0 {
                (left, 0.0, mid)
            } else {
                (right, -mid, 0.0)
            }
        };
        roots.push(Root {
            origin,
            offset: solve_monotone(|mu| f(origin, mu), lo, hi)?,
        });
    }
    Ok(roots)
}

/// Root of an increasing function on `(lo, hi)` by Newton steps kept inside a
/// shrinking bracket, falling back to bisection.
fn solve_monotone(f: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITERATIONS {
        let (val, der) = f(x);
        if val == 0.0 {
            return Ok(x);
        }
        if val > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            return Ok(0.5 * (lo + hi));
        }
        let newton = x - val / der;
        x = if newton > lo && newton < hi && der.is_finite() {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if x == lo || x == hi {
            return Ok(x);
        }
    }
    Err(Error::Numerical(format!(
        "secular equation did not converge on ({lo:e}, {hi:e})"
    )))
}

fn max_residual(a: f64, d: &[f64], z: &[f64], values: &[f64], vectors: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for (c, &lam) in values.iter().enumerate() {
        let v = vectors.column(c);
        let mut head = (a - lam) * v[0];
        let mut sq = 0.0;
        for k in 0..d.len() {
            head += z[k] * v[k + 1];
            let r = z[k] * v[0] + (d[k] - lam) * v[k + 1];
            sq += r * r;
        }
        worst = worst.max((sq + head * head).sqrt());
    }
    worst
}
