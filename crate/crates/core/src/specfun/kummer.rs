use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest argument modulus accepted by the power series.
pub const Z_MAX: f64 = 60.0;

const MAX_TERMS: usize = 600;
const SMALL_RUN: usize = 8;
const REL_TOL: f64 = 1e-16;

/// Compensated (Kahan) accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Compensated {
    sum: C64,
    carry: C64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: C64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> C64 {
        self.sum
    }
}

fn is_nonpositive_integer(b: C64) -> bool {
    b.im == 0.0 && b.re <= 0.0 && b.re == b.re.round()
}

/// Precomputed coefficients `(a)_s / ((b)_s s!)` of Kummer's series.
#[derive(Debug, Clone)]
pub(crate) struct KummerSeries {
    coeffs: Vec<C64>,
}

impl KummerSeries {
    pub(crate) fn new(a: C64, b: C64) -> Result<Self> {
        if is_nonpositive_integer(b) {
            return Err(Error::Domain(format!("b = {b} is a nonpositive integer")));
        }
        let mut coeffs = Vec::with_capacity(MAX_TERMS);
        let mut c = C64::new(1.0, 0.0);
        coeffs.push(c);
        for s in 0..MAX_TERMS - 1 {
            let s = s as f64;
            c = c * (a + s) / ((b + s) * (s + 1.0));
            if c == C64::new(0.0, 0.0) {
                break;
            }
            coeffs.push(c);
        }
        Ok(Self { coeffs })
    }

    /// Series value and derivative at `z`.
    pub(crate) fn eval(&self, z: C64) -> (C64, C64) {
        let mut value = Compensated::default();
        let mut deriv = Compensated::default();
        let mut zpow = C64::new(1.0, 0.0);
        let mut zprev = C64::new(0.0, 0.0);
        let mut run = 0;
        for (s, c) in self.coeffs.iter().enumerate() {
            let term = c * zpow;
            let dterm = if s == 0 { C64::new(0.0, 0.0) } else { c * zprev * s as f64 };
            value.add(term);
            deriv.add(dterm);
            let small_v = term.norm() <= REL_TOL * value.value().norm();
            let small_d = dterm.norm() <= REL_TOL * deriv.value().norm() || s == 0;
            if small_v && small_d {
                run += 1;
                if run >= SMALL_RUN {
                    break;
                }
            } else {
                run = 0;
            }
            zprev = zpow;
            zpow *= z;
        }
        (value.value(), deriv.value())
    }
}

/// Kummer's confluent hypergeometric function `M(a, b, z)`.
///
/// The power series is summed with compensation. For `Re z < 0` the Kummer
/// transformation `M(a, b, z) = e^z M(b - a, b, -z)` is applied first so that
/// the series has no sign cancellation.
pub fn kummer_m(a: C64, b: C64, z: C64) -> Result<C64> {
    if is_nonpositive_integer(b) {
        return Err(Error::Domain(format!("b = {b} is a nonpositive integer")));
    }
    if z.norm() > Z_MAX {
        return Err(Error::Overflow { modulus: z.norm(), limit: Z_MAX });
    }
    if z.re < 0.0 {
        let (v, _) = KummerSeries::new(b - a, b)?.eval(-z);
        Ok(z.exp() * v)
    } else {
        Ok(KummerSeries::new(a, b)?.eval(z).0)
    }
}
