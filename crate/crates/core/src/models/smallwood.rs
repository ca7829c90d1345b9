//! Lap-joint energy dissipation model.
//!
//! Energy lost per loading cycle is `D_E = k_n * (m-1)/(m+1) * dz^(m+1)`,
//! where the displacement amplitude `dz` is implicit in
//! `2F = k*dz - k_n*dz^m` and must be solved numerically for each force
//! amplitude `F`. The composed map `F -> D_E` is exposed as the registered
//! model `"smallwood"` with parameters `(m, log10_kn, k)`; the nonlinear
//! stiffness lives in log10 space because that is how its prior knowledge is
//! usually stated.

use super::{check_dim, ModelError, ParametricModel};
use crate::scalar::{cast, Scalar};

/// Physical parameters with the nonlinear stiffness in linear space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallwoodParams<F: Scalar> {
    /// Nonlinear exponent (unitless).
    pub exponent: F,
    /// Nonlinear stiffness `k_n` (lbf/in).
    pub nonlinear_stiffness: F,
    /// Linear stiffness `k` (lbf/in), must be positive.
    pub linear_stiffness: F,
}

const SCAN_SEGMENTS: usize = 64;
const MAX_EXPANSIONS: usize = 60;
const MAX_BISECTIONS: usize = 200;
const MAX_NEWTON_STEPS: usize = 12;

/// Solve `k*dz - k_n*dz^m = 2F` for the smallest positive displacement.
///
/// The search starts on `[1e-12, 10 * 2F/k]` (the linear solution `2F/k`
/// sets the scale) and doubles the upper end when no sign change is found.
/// The bracket is scanned left to right so the smallest root wins, then
/// refined by bisection with Newton polishing until
/// `|g(dz)| <= 1e-10 * 2F`.
pub fn solve_displacement<F: Scalar>(
    force: F,
    params: &SmallwoodParams<F>,
) -> Result<F, ModelError> {
    let force_ok = force.is_finite() && force > F::zero();
    if !force_ok {
        return Err(ModelError::Domain {
            message: format!("force must be positive, got {force}"),
        });
    }
    let stiffness_ok = params.linear_stiffness.is_finite() && params.linear_stiffness > F::zero();
    if !stiffness_ok {
        return Err(ModelError::Domain {
            message: format!(
                "linear stiffness must be positive, got {}",
                params.linear_stiffness
            ),
        });
    }

    let target = cast::<F>(2.0) * force;
    let k = params.linear_stiffness;
    let kn = params.nonlinear_stiffness;
    let m = params.exponent;
    // Restricting to dz > 0 keeps dz^m real for non-integer exponents.
    let g = |z: F| k * z - kn * z.powf(m) - target;

    let lo: F = cast(1e-12);
    let mut hi = cast::<F>(10.0) * target / k;
    let tolerance = cast::<F>(1e-10) * target;

    for expansion in 0..=MAX_EXPANSIONS {
        if let Some((mut a, mut b)) = scan_for_sign_change(g, lo, hi) {
            let mut ga = g(a);
            if ga == F::zero() {
                return Ok(a);
            }
            for _ in 0..MAX_BISECTIONS {
                let mid = (a + b) / cast(2.0);
                if mid <= a || mid >= b {
                    break; // interval exhausted at this precision
                }
                let gm = g(mid);
                if gm == F::zero() {
                    return Ok(mid);
                }
                if (gm > F::zero()) == (ga > F::zero()) {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            // Newton polish, constrained to the bracket.
            let mut z = (a + b) / cast(2.0);
            for _ in 0..MAX_NEWTON_STEPS {
                let gz = g(z);
                if gz.abs() <= tolerance {
                    return Ok(z);
                }
                let slope = k - m * kn * z.powf(m - F::one());
                if slope == F::zero() || !slope.is_finite() {
                    break;
                }
                let next = z - gz / slope;
                if !(next > a && next < b) {
                    break;
                }
                z = next;
            }
            if g(z).abs() <= tolerance {
                return Ok(z);
            }
            // Fall back to the tighter bracket endpoint.
            let best = if g(a).abs() < g(b).abs() { a } else { b };
            if g(best).abs() <= tolerance {
                return Ok(best);
            }
            return Err(ModelError::NoRoot {
                low: a.to_f64().unwrap_or(f64::NAN),
                high: b.to_f64().unwrap_or(f64::NAN),
                expansions: expansion,
            });
        }
        hi *= cast(2.0);
    }
    Err(ModelError::NoRoot {
        low: lo.to_f64().unwrap_or(f64::NAN),
        high: hi.to_f64().unwrap_or(f64::NAN),
        expansions: MAX_EXPANSIONS,
    })
}

/// First sign-changing segment of `g` on `[lo, hi]`, scanning left to right.
fn scan_for_sign_change<F: Scalar>(g: impl Fn(F) -> F, lo: F, hi: F) -> Option<(F, F)> {
    let n = cast::<F>(SCAN_SEGMENTS as f64);
    let step = (hi - lo) / n;
    let mut prev_x = lo;
    let mut prev_g = g(lo);
    for i in 1..=SCAN_SEGMENTS {
        let x = lo + step * cast(i as f64);
        let gx = g(x);
        if prev_g == F::zero() {
            return Some((prev_x, prev_x));
        }
        if gx == F::zero() || (prev_g > F::zero()) != (gx > F::zero()) {
            return Some((prev_x, x));
        }
        prev_x = x;
        prev_g = gx;
    }
    None
}

/// Energy dissipated per cycle: `k_n * (m-1)/(m+1) * dz^(m+1)` with the
/// displacement obtained from [`solve_displacement`].
pub fn energy_dissipation<F: Scalar>(
    force: F,
    params: &SmallwoodParams<F>,
) -> Result<F, ModelError> {
    if params.exponent == -F::one() {
        return Err(ModelError::Domain {
            message: "exponent m = -1 makes the (m-1)/(m+1) factor divide by zero".into(),
        });
    }
    if params.nonlinear_stiffness == F::zero() {
        // The nonlinear term vanishes; no hysteresis loss regardless of dz.
        return Ok(F::zero());
    }
    let dz = solve_displacement(force, params)?;
    let m = params.exponent;
    let factor = (m - F::one()) / (m + F::one());
    Ok(params.nonlinear_stiffness * factor * dz.powf(m + F::one()))
}

/// Composed model `F -> D_E` over state `(m, log10_kn, k)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmallwoodModel;

impl SmallwoodModel {
    pub fn params_from_state<F: Scalar>(state: &[F]) -> SmallwoodParams<F> {
        SmallwoodParams {
            exponent: state[0],
            nonlinear_stiffness: cast::<F>(10.0).powf(state[1]),
            linear_stiffness: state[2],
        }
    }
}

impl<F: Scalar> ParametricModel<F> for SmallwoodModel {
    fn name(&self) -> &str {
        "smallwood"
    }

    fn dim(&self) -> usize {
        3
    }

    fn param_names(&self) -> Vec<String> {
        vec!["m".into(), "log10_kn".into(), "k".into()]
    }

    fn evaluate(&self, x: F, params: &[F]) -> Result<F, ModelError> {
        check_dim(3, params)?;
        let physical = Self::params_from_state(params);
        energy_dissipation(x, &physical)
    }
}
