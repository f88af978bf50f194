//! Dormand–Prince 5(4) with a projection hook after every accepted step.

use serde::{Deserialize, Serialize};

use crate::slice::C64;

pub type P3 = [C64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest admissible step, relative to the interval length.
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { rtol: 1e-10, atol: 1e-12, h_min: 1e-13, max_steps: 2_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integrated {
    pub y: P3,
    /// Euclidean length of the polygon through the accepted states.
    pub length: f64,
    pub steps: usize,
}

/// Failure at parameter `s`: the step fell below `h_min` or the step budget
/// ran out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stalled {
    pub s: f64,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

fn axpy(y: &P3, h: f64, coeffs: &[f64], k: &[P3]) -> P3 {
    let mut out = *y;
    for (c, ki) in coeffs.iter().zip(k) {
        if *c != 0.0 {
            for i in 0..3 {
                out[i] += ki[i] * (h * c);
            }
        }
    }
    out
}

pub fn distance(a: &P3, b: &P3) -> f64 {
    libm::sqrt((0..3).map(|i| (a[i] - b[i]).norm_sqr()).sum::<f64>())
}

pub fn norm(a: &P3) -> f64 {
    libm::sqrt(a.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// Integrates `y' = f(s, y)` over `[s0, s1]`. `f` returning `None` counts as
/// a rejected step. `project` runs on every accepted state.
pub fn integrate<F, Q>(f: F, project: Q, y0: P3, s0: f64, s1: f64, ctl: &StepControl) -> Result<Integrated, Stalled>
where
    F: Fn(f64, &P3) -> Option<P3>,
    Q: Fn(f64, P3) -> P3,
{
    let span = s1 - s0;
    let mut y = y0;
    let mut s = s0;
    let mut h = span * 1e-3;
    let h_min = span.abs() * ctl.h_min;
    let mut length = 0.0;
    let mut steps = 0;
    if span == 0.0 {
        return Ok(Integrated { y, length, steps });
    }
    while (s1 - s) * span.signum() > 0.0 {
        if steps >= ctl.max_steps {
            return Err(Stalled { s });
        }
        if (s + h - s1) * span.signum() > 0.0 {
            h = s1 - s;
        }
        let mut k = [[C64::new(0.0, 0.0); 3]; 7];
        let mut ok = true;
        for stage in 0..7 {
            let ys = axpy(&y, h, &A[stage][..stage], &k[..stage]);
            match f(s + C[stage] * h, &ys) {
                Some(v) => k[stage] = v,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        let err = if ok {
            let y5 = axpy(&y, h, &B5, &k);
            let y4 = axpy(&y, h, &B4, &k);
            let mut e: f64 = 0.0;
            for i in 0..3 {
                let scale = ctl.atol + ctl.rtol * y[i].norm().max(y5[i].norm());
                e = e.max((y5[i] - y4[i]).norm() / scale);
            }
            if e <= 1.0 {
                let next = project(s + h, y5);
                length += distance(&y, &next);
                y = next;
                s += h;
                steps += 1;
                if (s1 - s) * span.signum() <= 0.0 {
                    break;
                }
            }
            e
        } else {
            f64::INFINITY
        };
        let factor = if err == 0.0 { 5.0 } else { (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h.abs() < h_min {
            return Err(Stalled { s });
        }
    }
    Ok(Integrated { y, length, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let ctl = StepControl::default();
        let one = C64::new(1.0, 0.0);
        let r = integrate(|_, y| Some([y[0], y[1] * C64::new(0.0, 1.0), one]), |_, y| y, [one, one, one * 0.0], 0.0, 2.0, &ctl)
            .unwrap();
        assert!((r.y[0] - C64::new(libm::exp(2.0), 0.0)).norm() < 1e-8);
        assert!((r.y[1] - C64::new(libm::cos(2.0), libm::sin(2.0))).norm() < 1e-9);
        assert!((r.y[2] - C64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn backwards_and_empty_intervals() {
        let ctl = StepControl::default();
        let one = C64::new(1.0, 0.0);
        let r = integrate(|_, y| Some([-y[0], one * 0.0, one * 0.0]), |_, y| y, [one; 3], 1.0, 0.0, &ctl).unwrap();
        assert!((r.y[0] - C64::new(libm::exp(1.0), 0.0)).norm() < 1e-8);
        let r = integrate(|_, y| Some(*y), |_, y| y, [one; 3], 0.5, 0.5, &ctl).unwrap();
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn blow_up_stalls() {
        let ctl = StepControl::default();
        let one = C64::new(1.0, 0.0);
        // y' = y^2 from y(0) = 1 blows up at s = 1
        let r = integrate(|_, y| Some([y[0] * y[0], one * 0.0, one * 0.0]), |_, y| y, [one; 3], 0.0, 2.0, &ctl);
        let s = r.unwrap_err().s;
        assert!(s > 0.99 && s < 1.0, "{s}");
    }
}
