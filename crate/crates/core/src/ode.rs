//! Dormand–Prince 5(4) integrator for small complex systems, with the
//! standard fourth-order continuous extension for dense output.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type State<const N: usize> = [C64; N];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// error coefficients: fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// dense output
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step length.
    pub max_step: f64,
}

fn axpy<const N: usize>(y: &State<N>, terms: &[(f64, &State<N>)], h: f64) -> State<N> {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += k[i] * (c * h);
        }
    }
    out
}

/// Coefficients of the continuous extension over one accepted step.
struct Dense<const N: usize> {
    t: f64,
    h: f64,
    r: [State<N>; 5],
}

impl<const N: usize> Dense<N> {
    fn eval(&self, t: f64) -> State<N> {
        let s = (t - self.t) / self.h;
        let s1 = 1.0 - s;
        let mut out = [C64::new(0.0, 0.0); N];
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.r;
            *o = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        }
        out
    }
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1` (> t0) and reports the
/// solution at every time in `outputs` (ascending, inside `[t0, t1]`).
///
/// Output times equal to `t0` receive the initial state exactly; the final
/// step is clamped to land on `t1`.
pub fn integrate<const N: usize, F>(
    rhs: F,
    t0: f64,
    y0: State<N>,
    t1: f64,
    outputs: &[f64],
    tol: &Tolerances,
    initial_step: f64,
) -> Result<Vec<State<N>>>
where
    F: Fn(f64, &State<N>) -> State<N>,
{
    let mut out = Vec::with_capacity(outputs.len());
    let mut next = 0;
    while next < outputs.len() && outputs[next] <= t0 {
        out.push(y0);
        next += 1;
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut h = initial_step.min(t1 - t0);
    let mut steps = 0usize;
    let mut last_rejected = false;

    while t < t1 {
        if steps >= tol.max_steps {
            return Err(Error::StepLimitExceeded { steps, t });
        }
        steps += 1;
        h = h.min(tol.max_step);
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        if h <= 1e-14 * t1.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }

        let k2 = rhs(t + C2 * h, &axpy(&y, &[(A21, &k1)], h));
        let k3 = rhs(t + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = rhs(
            t + C4 * h,
            &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h),
        );
        let k5 = rhs(
            t + C5 * h,
            &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        );
        let k6 = rhs(
            t + h,
            &axpy(
                &y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                h,
            ),
        );
        let y_new = axpy(
            &y,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            h,
        );
        let t_new = if last { t1 } else { t + h };
        let k7 = rhs(t_new, &y_new);

        let err_vec = axpy(
            &[C64::new(0.0, 0.0); N],
            &[
                (E1, &k1),
                (E3, &k3),
                (E4, &k4),
                (E5, &k5),
                (E6, &k6),
                (E7, &k7),
            ],
            h,
        );
        let mut acc = 0.0;
        for i in 0..N {
            let sc_re = tol.atol + tol.rtol * y[i].re.abs().max(y_new[i].re.abs());
            let sc_im = tol.atol + tol.rtol * y[i].im.abs().max(y_new[i].im.abs());
            acc += (err_vec[i].re / sc_re).powi(2) + (err_vec[i].im / sc_im).powi(2);
        }
        let err = (acc / (2 * N) as f64).sqrt();

        if err <= 1.0 {
            let mut r = [[C64::new(0.0, 0.0); N]; 5];
            for i in 0..N {
                let dy = y_new[i] - y[i];
                let bspl = k1[i] * h - dy;
                r[0][i] = y[i];
                r[1][i] = dy;
                r[2][i] = bspl;
                r[3][i] = dy - k7[i] * h - bspl;
                r[4][i] =
                    (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7)
                        * h;
            }
            let dense = Dense { t, h, r };
            while next < outputs.len() && (outputs[next] <= t_new || last) {
                let tq = outputs[next];
                out.push(if tq >= t_new { y_new } else { dense.eval(tq) });
                next += 1;
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h *= fac;
            last_rejected = false;
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            last_rejected = true;
        }
    }
    Ok(out)
}

/// Classical fixed-step propagation with the fifth-order Dormand–Prince
/// weights; used for convergence studies.
pub fn integrate_fixed<const N: usize, F>(
    rhs: F,
    t0: f64,
    y0: State<N>,
    t1: f64,
    steps: usize,
) -> State<N>
where
    F: Fn(f64, &State<N>) -> State<N>,
{
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for n in 0..steps {
        let t = t0 + n as f64 * h;
        let k1 = rhs(t, &y);
        let k2 = rhs(t + C2 * h, &axpy(&y, &[(A21, &k1)], h));
        let k3 = rhs(t + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = rhs(
            t + C4 * h,
            &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h),
        );
        let k5 = rhs(
            t + C5 * h,
            &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        );
        let k6 = rhs(
            t + h,
            &axpy(
                &y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                h,
            ),
        );
        y = axpy(
            &y,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            h,
        );
    }
    y
}
