//! Deterministic low-discrepancy point sets (Kronecker sequence driven by
//! the generalized golden ratio). Used wherever a deterministic scan of a
//! parameter box is needed: coprimeness margins, identity checks, norm
//! estimates.

/// Positive root of x^{d+1} = x + 1 (d = 1 gives the golden ratio).
fn generalized_golden(dim: usize) -> f64 {
    let p = dim as f64 + 1.0;
    let mut x = 2.0f64;
    for _ in 0..64 {
        let f = x.powf(p) - x - 1.0;
        let fp = p * x.powf(p - 1.0) - 1.0;
        x -= f / fp;
    }
    x
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// The `index`-th point of the R_d sequence in [0,1)^dim.
pub fn unit_point(dim: usize, index: usize) -> Vec<f64> {
    let g = generalized_golden(dim);
    (0..dim)
        .map(|i| {
            let alpha = frac((1.0 / g).powi(i as i32 + 1));
            frac(0.5 + alpha * (index as f64 + 1.0))
        })
        .collect()
}

/// Affine map of `unit_point` into the box given by (lo, hi).
pub fn box_point(lo: &[f64], hi: &[f64], index: usize) -> Vec<f64> {
    let u = unit_point(lo.len(), index);
    lo.iter()
        .zip(hi.iter())
        .zip(u.iter())
        .map(|((l, h), x)| l + x * (h - l))
        .collect()
}
