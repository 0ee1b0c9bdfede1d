//! Small dense complex linear algebra: matrix exponential via Padé
//! scaling-and-squaring, an LU solver backing it, and the tridiagonal
//! Runge-Kutta kernels used by the numeric propagator.
//!
//! Chains here stay small (n <= 200), so everything is plain dense code with
//! no external solver dependency.

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64;

use crate::error::{CoreError, Result};

/// Maximum column absolute sum.
pub fn one_norm(a: &ArrayView2<Complex64>) -> f64 {
    let (rows, cols) = a.dim();
    let mut sums = vec![0.0; cols];
    for i in 0..rows {
        for j in 0..cols {
            sums[j] += a[[i, j]].norm();
        }
    }
    sums.into_iter().fold(0.0, f64::max)
}

/// Max-norm of `a - identity`.
pub fn max_dev_from_identity(a: &ArrayView2<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((a[[i, j]] - expect).norm());
        }
    }
    worst
}

/// Max-norm of `u * u_dagger - identity`.
pub fn unitarity_defect(u: &ArrayView2<Complex64>) -> f64 {
    let udag = u.t().mapv(|z| z.conj());
    let prod = u.dot(&udag);
    max_dev_from_identity(&prod.view())
}

/// Solve `a x = b` for square complex `a` with as many right-hand sides as
/// `b` has columns, by LU decomposition with partial pivoting.
pub fn lu_solve(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(b.nrows(), n);
    let mut lu = a.clone();
    let mut x = b.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut pivot = k;
        let mut best = lu[[k, k]].norm();
        for i in (k + 1)..n {
            let mag = lu[[i, k]].norm();
            if mag > best {
                best = mag;
                pivot = i;
            }
        }
        if best == 0.0 {
            return Err(CoreError::Internal(
                "singular matrix in LU solve".to_string(),
            ));
        }
        if pivot != k {
            perm.swap(pivot, k);
            for j in 0..n {
                let tmp = lu[[k, j]];
                lu[[k, j]] = lu[[pivot, j]];
                lu[[pivot, j]] = tmp;
            }
            for j in 0..x.ncols() {
                let tmp = x[[k, j]];
                x[[k, j]] = x[[pivot, j]];
                x[[pivot, j]] = tmp;
            }
        }
        let diag = lu[[k, k]];
        for i in (k + 1)..n {
            let factor = lu[[i, k]] / diag;
            lu[[i, k]] = factor;
            if factor != Complex64::new(0.0, 0.0) {
                for j in (k + 1)..n {
                    let sub = factor * lu[[k, j]];
                    lu[[i, j]] -= sub;
                }
                for j in 0..x.ncols() {
                    let sub = factor * x[[k, j]];
                    x[[i, j]] -= sub;
                }
            }
        }
    }

    // back substitution
    for j in 0..x.ncols() {
        for i in (0..n).rev() {
            let mut acc = x[[i, j]];
            for k in (i + 1)..n {
                acc -= lu[[i, k]] * x[[k, j]];
            }
            x[[i, j]] = acc / lu[[i, i]];
        }
    }
    Ok(x)
}

// Degree-13 Pade numerator coefficients for exp.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

const PADE13_THETA: f64 = 5.371_920_351_148_152;

/// Matrix exponential of a square complex matrix, by degree-13 Pade
/// approximation with scaling and squaring and a trace pre-shift.
pub fn expm(a: &ArrayView2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);

    // exp(A) = exp(mu) exp(A - mu I); for A = -i H t the shift removes the
    // common cavity-frequency rotation and shrinks the norm to be scaled.
    let trace: Complex64 = (0..n).map(|i| a[[i, i]]).sum();
    let mu = trace / n as f64;
    let mut m = a.to_owned();
    for i in 0..n {
        m[[i, i]] -= mu;
    }

    let norm = one_norm(&m.view());
    let s = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as u32
    } else {
        0
    };
    if s > 0 {
        let scale = Complex64::new((0.5f64).powi(s as i32), 0.0);
        m.mapv_inplace(|z| z * scale);
    }

    let eye = Array2::from_diag(&Array1::from_elem(n, Complex64::new(1.0, 0.0)));
    let m2 = m.dot(&m);
    let m4 = m2.dot(&m2);
    let m6 = m2.dot(&m4);

    let b = &PADE13;
    let u_inner = &m6 * b[13] + &m4 * b[11] + &m2 * b[9];
    let u = m.dot(&(m6.dot(&u_inner) + &m6 * b[7] + &m4 * b[5] + &m2 * b[3] + &eye * b[1]));
    let v_inner = &m6 * b[12] + &m4 * b[10] + &m2 * b[8];
    let v = m6.dot(&v_inner) + &m6 * b[6] + &m4 * b[4] + &m2 * b[2] + &eye * b[0];

    let mut r = lu_solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        r = r.dot(&r);
    }

    let phase = mu.exp();
    r.mapv_inplace(|z| z * phase);
    Ok(r)
}

/// `out = -i * H_off * a` where `H_off` is the zero-diagonal tridiagonal
/// matrix with bond couplings `c`, applied to every column of `a`.
fn coupling_rhs_matrix(c: &[f64], a: &Array2<Complex64>, out: &mut Array2<Complex64>) {
    let n = a.nrows();
    let cols = a.ncols();
    let av = a.as_slice().expect("standard layout");
    let ov = out.as_slice_mut().expect("standard layout");
    for i in 0..n {
        let row = &mut ov[i * cols..(i + 1) * cols];
        row.fill(Complex64::new(0.0, 0.0));
        if i > 0 {
            let w = c[i - 1];
            let up = &av[(i - 1) * cols..i * cols];
            for (o, x) in row.iter_mut().zip(up) {
                // -i * (w * x)
                o.re += w * x.im;
                o.im -= w * x.re;
            }
        }
        if i + 1 < n {
            let w = c[i];
            let down = &av[(i + 1) * cols..(i + 2) * cols];
            for (o, x) in row.iter_mut().zip(down) {
                o.re += w * x.im;
                o.im -= w * x.re;
            }
        }
    }
}

/// One classical fourth-order Runge-Kutta step of `da/dt = -i H_off a`.
struct Rk4Work {
    k1: Array2<Complex64>,
    k2: Array2<Complex64>,
    k3: Array2<Complex64>,
    k4: Array2<Complex64>,
    tmp: Array2<Complex64>,
}

impl Rk4Work {
    fn new(rows: usize, cols: usize) -> Self {
        let z = Array2::from_elem((rows, cols), Complex64::new(0.0, 0.0));
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }
}

fn rk4_step(c: &[f64], a: &mut Array2<Complex64>, h: f64, w: &mut Rk4Work) {
    coupling_rhs_matrix(c, a, &mut w.k1);
    w.tmp.assign(a);
    w.tmp.scaled_add(Complex64::new(h / 2.0, 0.0), &w.k1);
    coupling_rhs_matrix(c, &w.tmp, &mut w.k2);
    w.tmp.assign(a);
    w.tmp.scaled_add(Complex64::new(h / 2.0, 0.0), &w.k2);
    coupling_rhs_matrix(c, &w.tmp, &mut w.k3);
    w.tmp.assign(a);
    w.tmp.scaled_add(Complex64::new(h, 0.0), &w.k3);
    coupling_rhs_matrix(c, &w.tmp, &mut w.k4);

    let sixth = h / 6.0;
    a.scaled_add(Complex64::new(sixth, 0.0), &w.k1);
    a.scaled_add(Complex64::new(2.0 * sixth, 0.0), &w.k2);
    a.scaled_add(Complex64::new(2.0 * sixth, 0.0), &w.k3);
    a.scaled_add(Complex64::new(sixth, 0.0), &w.k4);
}

/// Fixed-step RK4 integration of `da/dt = -i H_off a` from `a(0) = a0` to
/// time `t` (either sign), with the step chosen from the per-step cap
/// `j_max * h <= max_step_product` and a fourth-order accuracy budget over
/// the whole interval.
pub struct Rk4Plan {
    pub steps: u64,
    pub h: f64,
}

/// Choose step count/size for a coupling spectrum bounded by `2 * j_max`.
pub fn rk4_plan(
    j_max: f64,
    t: f64,
    max_step_product: f64,
    error_budget: f64,
    max_steps: u64,
) -> Result<Rk4Plan> {
    let span = t.abs();
    if span == 0.0 || j_max == 0.0 {
        return Ok(Rk4Plan { steps: 0, h: 0.0 });
    }
    // coupling-only spectral radius is below 2 * j_max; the leading local
    // truncation error of classical RK4 on e^{z} is z^5 / 120
    let rho = 2.0 * j_max;
    let h_cap = max_step_product / j_max;
    let h_acc = (120.0 * error_budget / (span * rho.powi(5))).powf(0.25);
    let h = h_cap.min(h_acc);
    let steps = (span / h).ceil() as u64;
    if steps > max_steps {
        return Err(CoreError::Integration {
            message: format!(
                "step-size underflow: {steps} steps needed for span {span} (limit {max_steps})"
            ),
            estimate: span * rho.powi(5) * (span / max_steps as f64).powi(4) / 120.0,
        });
    }
    let h = t / steps as f64;
    Ok(Rk4Plan { steps, h })
}

/// Integrate the coupling-only system for a full matrix initial condition.
pub fn rk4_evolve_matrix(
    c: &[f64],
    a0: &Array2<Complex64>,
    plan: &Rk4Plan,
) -> Array2<Complex64> {
    let mut a = a0.clone();
    let mut work = Rk4Work::new(a0.nrows(), a0.ncols());
    for _ in 0..plan.steps {
        rk4_step(c, &mut a, plan.h, &mut work);
    }
    a
}

/// Streaming RK4 on one or two column vectors: calls `record(index, columns)`
/// after every `substeps` internal steps, `count` times.
pub fn rk4_stream_columns<F>(
    c: &[f64],
    cols0: &Array2<Complex64>,
    h: f64,
    substeps: u64,
    count: usize,
    mut record: F,
) where
    F: FnMut(usize, &Array2<Complex64>),
{
    let mut a = cols0.clone();
    let mut work = Rk4Work::new(cols0.nrows(), cols0.ncols());
    for k in 0..count {
        for _ in 0..substeps {
            rk4_step(c, &mut a, h, &mut work);
        }
        record(k, &a);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn lu_solves_small_system() {
        let a = array![
            [Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)],
            [Complex64::new(1.0, -1.0), Complex64::new(3.0, 0.0)],
        ];
        let x_true = array![
            [Complex64::new(1.0, 2.0)],
            [Complex64::new(-0.5, 0.25)],
        ];
        let b = a.dot(&x_true);
        let x = lu_solve(&a, &b).unwrap();
        for i in 0..2 {
            assert_abs_diff_eq!((x[[i, 0]] - x_true[[i, 0]]).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn expm_matches_two_level_rotation() {
        // exp(-i t sigma_x) = cos t I - i sin t sigma_x
        let t = 0.7321;
        let a = array![
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, -t)],
            [Complex64::new(0.0, -t), Complex64::new(0.0, 0.0)],
        ];
        let e = expm(&a.view()).unwrap();
        assert_abs_diff_eq!((e[[0, 0]] - Complex64::new(t.cos(), 0.0)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((e[[0, 1]] - Complex64::new(0.0, -t.sin())).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn expm_handles_large_norm_by_scaling() {
        // exp(-i t sigma_x) at large t still unitary and correct
        let t = 137.0;
        let a = array![
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, -t)],
            [Complex64::new(0.0, -t), Complex64::new(0.0, 0.0)],
        ];
        let e = expm(&a.view()).unwrap();
        assert!(unitarity_defect(&e.view()) < 1e-12);
        assert_abs_diff_eq!(e[[0, 0]].re, t.cos(), epsilon = 1e-11);
    }

    #[test]
    fn rk4_matches_exact_two_site_solution() {
        // two sites, coupling 1: amplitude |sin t| on the far site
        let c = [1.0];
        let eye = Array2::from_diag(&Array1::from_elem(2, Complex64::new(1.0, 0.0)));
        let t = 1.234;
        let plan = rk4_plan(1.0, t, 0.01, 1e-9, 1_000_000).unwrap();
        let a = rk4_evolve_matrix(&c, &eye, &plan);
        assert_abs_diff_eq!(a[[1, 0]].norm(), t.sin().abs(), epsilon = 1e-10);
        assert_abs_diff_eq!(a[[0, 0]].norm(), t.cos().abs(), epsilon = 1e-10);
    }
}
