//! Fixed-step flow integration with the variational equation.
//!
//! The integrator is a classical 4th-order one-step method with a fixed
//! step; the flow differential is obtained by integrating the variational
//! equation `J' = DX(t, x) · J` alongside the state, not by differencing
//! endpoints. No adaptivity: residual reports must be reproducible.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};

/// A (possibly time-dependent) vector field on a chart domain.
pub trait TimeField {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, x: &[f64]) -> Result<DVector<f64>>;

    /// Spatial Jacobian of the field. The default uses a 5-point central
    /// stencil so the `h⁴` regime of the integrator stays visible in step
    /// refinement studies.
    fn jacobian(&self, t: f64, x: &[f64], fd_step: f64) -> Result<DMatrix<f64>> {
        let n = self.dim();
        let mut jac = DMatrix::zeros(n, n);
        let h = fd_step;
        for j in 0..n {
            let mut xpp = x.to_vec();
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            let mut xmm = x.to_vec();
            xpp[j] += 2.0 * h;
            xp[j] += h;
            xm[j] -= h;
            xmm[j] -= 2.0 * h;
            let fpp = self.eval(t, &xpp)?;
            let fp = self.eval(t, &xp)?;
            let fm = self.eval(t, &xm)?;
            let fmm = self.eval(t, &xmm)?;
            let col = (fmm - fpp + (fp - fm) * 8.0) / (12.0 * h);
            jac.set_column(j, &col);
        }
        Ok(jac)
    }
}

/// A field given by closures.
pub struct ClosureField<F> {
    pub dim: usize,
    pub f: F,
}

impl<F> TimeField for ClosureField<F>
where
    F: Fn(f64, &[f64]) -> Result<DVector<f64>>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, x: &[f64]) -> Result<DVector<f64>> {
        (self.f)(t, x)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    /// Fixed integration step.
    pub step: f64,
    /// Abort when the state norm exceeds this bound.
    pub blowup_norm: f64,
    /// Step for finite-difference Jacobians of the field.
    pub fd_step: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            step: 1e-3,
            blowup_norm: 1e6,
            fd_step: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub state: DVector<f64>,
    pub jacobian: DMatrix<f64>,
}

/// One state + differential snapshot along a trajectory.
#[derive(Debug, Clone)]
pub struct FlowSample {
    pub t: f64,
    pub state: DVector<f64>,
    pub jacobian: DMatrix<f64>,
}

fn check_state(x: &DVector<f64>, t: f64, opts: &FlowOptions) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(GeomError::NonFiniteValue(format!("flow state at t = {t}")));
    }
    let norm = x.norm();
    if norm > opts.blowup_norm {
        return Err(GeomError::BlowUp {
            norm,
            bound: opts.blowup_norm,
            t,
        });
    }
    Ok(())
}

/// Integrate `x' = X(t, x)`, `J' = DX(t, x) J` from `t0` to `t1`.
pub fn integrate_flow(field: &dyn TimeField, x0: &DVector<f64>, t0: f64, t1: f64, opts: &FlowOptions) -> Result<FlowResult> {
    let samples = integrate_flow_sampled(field, x0, t0, t1, opts, &[t1])?;
    let last = samples.into_iter().last().expect("one sample requested");
    Ok(FlowResult {
        state: last.state,
        jacobian: last.jacobian,
    })
}

/// Integrate and record the state and flow differential at the requested
/// times (which must be increasing and inside `[t0, t1]`). Steps are aligned
/// so every node is hit exactly.
pub fn integrate_flow_sampled(
    field: &dyn TimeField,
    x0: &DVector<f64>,
    t0: f64,
    t1: f64,
    opts: &FlowOptions,
    nodes: &[f64],
) -> Result<Vec<FlowSample>> {
    let n = field.dim();
    if x0.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            got: x0.len(),
            context: "flow initial state".into(),
        });
    }
    let mut x = x0.clone();
    let mut jac = DMatrix::identity(n, n);
    let mut t = t0;
    let mut out = Vec::with_capacity(nodes.len());
    let mut node_iter = nodes.iter().copied().peekable();

    if let Some(&first) = node_iter.peek() {
        if (first - t0).abs() < 1e-14 {
            out.push(FlowSample {
                t: t0,
                state: x.clone(),
                jacobian: jac.clone(),
            });
            node_iter.next();
        }
    }

    while let Some(&target) = node_iter.peek() {
        let span = target - t;
        if span <= 0.0 {
            return Err(GeomError::ConfigInvalid {
                field: "nodes".into(),
                message: "sample times must be strictly increasing".into(),
            });
        }
        let steps = (span / opts.step).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for _ in 0..steps {
            rk4_step(field, &mut x, &mut jac, t, h, opts)?;
            t += h;
            check_state(&x, t, opts)?;
        }
        t = target; // kill accumulated rounding
        out.push(FlowSample {
            t,
            state: x.clone(),
            jacobian: jac.clone(),
        });
        node_iter.next();
    }
    let _ = t1;
    Ok(out)
}

fn rk4_step(
    field: &dyn TimeField,
    x: &mut DVector<f64>,
    jac: &mut DMatrix<f64>,
    t: f64,
    h: f64,
    opts: &FlowOptions,
) -> Result<()> {
    let k1 = field.eval(t, x.as_slice())?;
    let d1 = field.jacobian(t, x.as_slice(), opts.fd_step)? * &*jac;

    let x2 = &*x + &k1 * (h / 2.0);
    let j2 = &*jac + &d1 * (h / 2.0);
    let k2 = field.eval(t + h / 2.0, x2.as_slice())?;
    let d2 = field.jacobian(t + h / 2.0, x2.as_slice(), opts.fd_step)? * &j2;

    let x3 = &*x + &k2 * (h / 2.0);
    let j3 = &*jac + &d2 * (h / 2.0);
    let k3 = field.eval(t + h / 2.0, x3.as_slice())?;
    let d3 = field.jacobian(t + h / 2.0, x3.as_slice(), opts.fd_step)? * &j3;

    let x4 = &*x + &k3 * h;
    let j4 = &*jac + &d3 * h;
    let k4 = field.eval(t + h, x4.as_slice())?;
    let d4 = field.jacobian(t + h, x4.as_slice(), opts.fd_step)? * &j4;

    *x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    *jac += (d1 + d2 * 2.0 + d3 * 2.0 + d4) * (h / 6.0);
    Ok(())
}

/// Composite Simpson weights over an odd number of equally spaced nodes on
/// `[a, b]`, paired with the node positions.
pub fn simpson_nodes(a: f64, b: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(count >= 3 && count % 2 == 1, "Simpson needs an odd node count >= 3");
    let n = count - 1;
    let h = (b - a) / n as f64;
    let nodes: Vec<f64> = (0..count).map(|i| a + i as f64 * h).collect();
    let weights: Vec<f64> = (0..count)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect();
    (nodes, weights)
}
