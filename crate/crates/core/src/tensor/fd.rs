//! Central finite differences. Used as the independent oracle for every
//! analytic derivative in the crate.

/// Default step for coordinate `x`: `max(1e-6, 1e-6·|x|)`.
#[inline]
pub fn default_step(x: f64) -> f64 {
    (1e-6 * x.abs()).max(1e-6)
}

/// Central-difference gradient `(f(x + h e_i) − f(x − h e_i)) / 2h`.
///
/// `h = None` selects [`default_step`] per coordinate. The first evaluation
/// error aborts the sweep and is returned unchanged.
pub fn fd_gradient<E>(
    f: impl Fn(&[f64]) -> Result<f64, E>,
    x: &[f64],
    h: Option<f64>,
) -> Result<Vec<f64>, E> {
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let step = h.unwrap_or_else(|| default_step(x[i]));
        probe[i] = x[i] + step;
        let fp = f(&probe)?;
        probe[i] = x[i] - step;
        let fm = f(&probe)?;
        probe[i] = x[i];
        grad.push((fp - fm) / (2.0 * step));
    }
    Ok(grad)
}

/// Central difference of a scalar function of one variable.
pub fn fd_derivative<E>(f: impl Fn(f64) -> Result<f64, E>, x: f64, h: Option<f64>) -> Result<f64, E> {
    let g = fd_gradient(|v: &[f64]| f(v[0]), &[x], h)?;
    Ok(g[0])
}
