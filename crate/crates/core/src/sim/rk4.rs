use crate::error::Result;
use crate::linalg::Vector;

/// One classical fourth-order Runge–Kutta step of `ṡ = f(s)`.
pub fn rk4_step<F>(mut f: F, s: &[f64], dt: f64) -> Result<Vector>
where
    F: FnMut(&[f64]) -> Result<Vector>,
{
    rk4_step_t(|_, s| f(s), 0.0, s, dt)
}

/// One classical fourth-order Runge–Kutta step of `ṡ = f(t, s)`.
pub fn rk4_step_t<F>(mut f: F, t: f64, s: &[f64], dt: f64) -> Result<Vector>
where
    F: FnMut(f64, &[f64]) -> Result<Vector>,
{
    let half = 0.5 * dt;
    let s0 = Vector::from_slice(s);
    let k1 = f(t, &s0)?;
    let k2 = f(t + half, &s0.axpy(half, &k1))?;
    let k3 = f(t + half, &s0.axpy(half, &k2))?;
    let k4 = f(t + dt, &s0.axpy(dt, &k3))?;
    Ok(Vector(
        (0..s.len())
            .map(|i| s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect(),
    ))
}
