//! Gauss–Newton least squares over real or complex unknowns.

use nalgebra::{ComplexField, DMatrix, DVector};

/// Outcome of a Gauss–Newton run.
#[derive(Clone, Debug)]
pub struct NewtonRun<T: ComplexField> {
    pub x: DVector<T>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    pub max_iters: usize,
    /// Stop once the residual measure drops below this.
    pub tol: f64,
    /// Abort when any unknown exceeds this magnitude.
    pub blowup: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { max_iters: 100, tol: 1e-12, blowup: 1e8 }
    }
}

/// A square or overdetermined system with its Jacobian.
pub trait LeastSquaresSystem<T: ComplexField<RealField = f64>> {
    /// Residual vector and Jacobian at `x`.
    fn evaluate(&self, x: &DVector<T>) -> (DVector<T>, DMatrix<T>);

    /// Scalar measure compared against the tolerance. Defaults to the
    /// Euclidean norm of the residual vector.
    fn measure(&self, _x: &DVector<T>, residual: &DVector<T>) -> f64 {
        residual.norm()
    }
}

/// Undamped Gauss–Newton with minimum-norm least-squares steps.
pub fn gauss_newton<T, S>(system: &S, start: DVector<T>, opts: &NewtonOptions) -> NewtonRun<T>
where
    T: ComplexField<RealField = f64>,
    S: LeastSquaresSystem<T>,
{
    let mut x = start;
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    for it in 0..=opts.max_iters {
        let (r, jac) = system.evaluate(&x);
        let residual = system.measure(&x, &r);
        if !residual.is_finite() {
            return NewtonRun { x, residual: f64::INFINITY, iterations: it, converged: false };
        }
        if residual < opts.tol {
            return NewtonRun { x, residual, iterations: it, converged: true };
        }
        if it == opts.max_iters {
            return NewtonRun { x, residual, iterations: it, converged: false };
        }
        // give up on runs that wander without improving
        if residual < 0.5 * best {
            best = residual;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > 25 {
                return NewtonRun { x, residual, iterations: it, converged: false };
            }
        }
        let Some(step) = least_squares_step(jac, &r) else {
            return NewtonRun { x, residual, iterations: it, converged: false };
        };
        x -= step;
        if x.iter().any(|v| v.clone().modulus() > opts.blowup) {
            return NewtonRun { x, residual: f64::INFINITY, iterations: it + 1, converged: false };
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// Minimum-norm solution of `jac · d = r`.
pub fn least_squares_step<T>(jac: DMatrix<T>, r: &DVector<T>) -> Option<DVector<T>>
where
    T: ComplexField<RealField = f64>,
{
    let svd = jac.svd(true, true);
    let cutoff = svd.singular_values.max() * 1e-13;
    svd.solve(r, cutoff).ok()
}
