//! Special functions, bracketing root finding and Gauss–Legendre quadrature.
//!
//! Spherical Bessel functions of the first kind are evaluated with Miller's
//! downward recurrence, normalized against the closed forms of `j_0` or `j_1`
//! (whichever is larger in magnitude at the argument). The recurrence
//!
//! ```text
//! j_{k-1}(x) = (2k+1)/x * j_k(x) - j_{k+1}(x)
//! ```
//!
//! is run from a start order well above `max(l, x)`, so the minimal solution
//! dominates by the time the requested order is reached. Orders in the
//! thousands (millimetre spheres at optical wavelengths) are supported; the
//! running values are rescaled and tracked in log space so that results in
//! the deep evanescent region underflow gracefully instead of poisoning the
//! normalization.
//!
//! Neumann functions `y_l` are only needed through their logarithmic
//! derivative and relative magnitudes, which come from the (stable) forward
//! recurrence on the ratio `y_k / y_{k-1}`.

use crate::error::{Error, Result};

const RESCALE_THRESHOLD: f64 = 1e200;
const MAX_BRENT_ITERATIONS: usize = 500;

/// Interval `[lo, hi]` on which a function is expected to change sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidBracket { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

fn check_argument(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "spherical Bessel argument must be positive and finite, got {x}"
        )))
    }
}

/// `ln((2l+1)!!)`
fn ln_double_factorial_odd(l: u32) -> f64 {
    (1..=l).map(|k| ((2 * k + 1) as f64).ln()).sum()
}

/// Power series around the origin; only used where the first omitted term
/// is below double precision.
fn j_series(l: u32, x: f64) -> f64 {
    let ln_lead = l as f64 * x.ln() - ln_double_factorial_odd(l);
    let half_x2 = 0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=4u32 {
        term *= -half_x2 / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
    }
    ln_lead.exp() * sum
}

fn series_applies(l: u32, x: f64) -> bool {
    x * x < 1e-4 * (2 * l + 3) as f64
}

fn j0_closed(x: f64) -> f64 {
    x.sin() / x
}

fn j1_closed(x: f64) -> f64 {
    (x.sin() / x - x.cos()) / x
}

/// Value captured during the downward sweep, with the log of the rescaling
/// applied so far.
#[derive(Clone, Copy, Default)]
struct Captured {
    value: f64,
    shift: f64,
}

/// Returns `[j_{l-1}, j_l, j_{l+1}]`, with `j_{-1}(x) = cos(x)/x`.
fn j_window(l: u32, x: f64) -> [f64; 3] {
    if series_applies(l + 1, x) {
        let jm1 = if l == 0 {
            x.cos() / x
        } else {
            j_series(l - 1, x)
        };
        return [jm1, j_series(l, x), j_series(l + 1, x)];
    }

    let top = f64::max((l + 1) as f64, x.ceil());
    let start = (top + 16.0 + 3.0 * top.sqrt()).ceil() as u32;

    // Downward sweep: f_{k-1} = (2k+1)/x f_k - f_{k+1}.
    let mut f_above = 0.0_f64; // f_{k+1}
    let mut f_here = 1e-300_f64; // f_k
    let mut shift = 0.0_f64;
    let mut captured = [Captured::default(); 3];
    let capture_at = |k: u32| -> Option<usize> {
        if k + 1 == l {
            Some(0)
        } else if k == l {
            Some(1)
        } else if k == l + 1 {
            Some(2)
        } else {
            None
        }
    };

    let mut k = start;
    if let Some(slot) = capture_at(k) {
        captured[slot] = Captured {
            value: f_here,
            shift,
        };
    }
    while k > 0 {
        let f_below = (2 * k + 1) as f64 / x * f_here - f_above;
        f_above = f_here;
        f_here = f_below;
        k -= 1;
        if f_here.abs() > RESCALE_THRESHOLD {
            f_here /= RESCALE_THRESHOLD;
            f_above /= RESCALE_THRESHOLD;
            shift += RESCALE_THRESHOLD.ln();
        }
        if let Some(slot) = capture_at(k) {
            captured[slot] = Captured {
                value: f_here,
                shift,
            };
        }
    }
    // f_here = f_0, f_above = f_1 (same scale).
    let (true_ref, computed_ref) = {
        let j0 = j0_closed(x);
        let j1 = j1_closed(x);
        if j0.abs() >= j1.abs() {
            (j0, f_here)
        } else {
            (j1, f_above)
        }
    };

    let restore = |c: Captured| -> f64 {
        if c.value == 0.0 {
            return 0.0;
        }
        let ln_abs =
            c.value.abs().ln() + true_ref.abs().ln() - computed_ref.abs().ln() + (c.shift - shift);
        let sign = c.value.signum() * true_ref.signum() * computed_ref.signum();
        sign * ln_abs.exp()
    };

    let jm1 = if l == 0 {
        x.cos() / x
    } else {
        restore(captured[0])
    };
    [jm1, restore(captured[1]), restore(captured[2])]
}

/// Spherical Bessel function of the first kind `j_l(x)` for `x > 0`.
pub fn spherical_bessel_j(l: u32, x: f64) -> Result<f64> {
    check_argument(x)?;
    Ok(match l {
        0 if !series_applies(0, x) => j0_closed(x),
        _ => j_window(l, x)[1],
    })
}

/// `j_l'(x) = j_{l-1}(x) - (l+1)/x j_l(x)`; for `l = 0` this is `-j_1(x)`.
pub fn spherical_bessel_j_derivative(l: u32, x: f64) -> Result<f64> {
    check_argument(x)?;
    let [jm1, j, jp1] = j_window(l, x);
    Ok(if l == 0 {
        -jp1
    } else {
        jm1 - (l + 1) as f64 / x * j
    })
}

/// `[j_{l-1}(x), j_l(x), j_{l+1}(x)]` from a single recurrence sweep.
pub fn spherical_bessel_j_triplet(l: u32, x: f64) -> Result<[f64; 3]> {
    check_argument(x)?;
    Ok(j_window(l, x))
}

/// Spherical Neumann function `y_l(x)` by forward recurrence.
///
/// Overflows to infinity far inside the evanescent region (`l >> x`); use
/// [`ScaledNeumann`] there.
pub fn spherical_bessel_y(l: u32, x: f64) -> Result<f64> {
    check_argument(x)?;
    let y0 = -x.cos() / x;
    if l == 0 {
        return Ok(y0);
    }
    let mut prev = y0;
    let mut cur = -x.cos() / (x * x) - x.sin() / x;
    for k in 1..l {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `y_l(x)` represented as `sign * exp(ln_abs)`, with its logarithmic
/// derivative `y_l'(x) / y_l(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledNeumann {
    pub sign: f64,
    pub ln_abs: f64,
    pub log_derivative: f64,
}

impl ScaledNeumann {
    pub fn new(l: u32, x: f64) -> Result<Self> {
        check_argument(x)?;
        let y0 = -x.cos() / x;
        let y1 = -x.cos() / (x * x) - x.sin() / x;
        let mut sign = y0.signum();
        let mut ln_abs = y0.abs().ln();
        if l == 0 {
            return Ok(Self {
                sign,
                ln_abs,
                log_derivative: -y1 / y0,
            });
        }
        // ratio_k = y_k / y_{k-1}
        let mut ratio = y1 / y0;
        sign *= ratio.signum();
        ln_abs += ratio.abs().ln();
        for k in 1..l {
            ratio = (2 * k + 1) as f64 / x - 1.0 / ratio;
            sign *= ratio.signum();
            ln_abs += ratio.abs().ln();
        }
        if !ln_abs.is_finite() {
            return Err(Error::Domain(format!(
                "y_{l}({x}) hit an exact zero of an intermediate order"
            )));
        }
        Ok(Self {
            sign,
            ln_abs,
            log_derivative: 1.0 / ratio - (l + 1) as f64 / x,
        })
    }

    /// `y_l(x) / y_l(x_ref)` without forming either value.
    pub fn ratio_to(&self, reference: &ScaledNeumann) -> f64 {
        self.sign * reference.sign * (self.ln_abs - reference.ln_abs).exp()
    }
}

/// Brent's method on a sign-changing bracket.
///
/// Never uses derivatives, so poles between roots cannot throw the iterate
/// out of the bracket. The returned abscissa always lies inside `bracket`,
/// and the final enclosing interval is no wider than
/// `tol + 4 * f64::EPSILON * |x|`.
pub fn find_root<F>(f: F, bracket: Bracket, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Domain("function returned NaN at bracket end".into()));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_BRENT_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0)),
                    (qa - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Domain(format!("function returned NaN at {b}")));
        }
    }
    Err(Error::MaxIterations(MAX_BRENT_ITERATIONS))
}

/// Walks `[start, end]` in steps of `step` and returns the `count`-th
/// interval (1-based) across which `f` changes sign.
pub fn scan_for_bracket<F>(f: F, start: f64, end: f64, step: f64, count: u32) -> Result<Bracket>
where
    F: Fn(f64) -> f64,
{
    if !(step > 0.0) || !(start < end) || count == 0 {
        return Err(Error::InvalidParameter(format!(
            "scan [{start}, {end}] step {step} count {count}"
        )));
    }
    let mut seen = 0;
    let mut x0 = start;
    let mut f0 = f(x0);
    let mut i = 1u64;
    loop {
        let x1 = (start + i as f64 * step).min(end);
        let f1 = f(x1);
        if f0.is_finite() && f1.is_finite() && f0 != 0.0 && f0.signum() != f1.signum() {
            seen += 1;
            if seen == count {
                return Bracket::new(x0, x1);
            }
        }
        if x1 >= end {
            break;
        }
        x0 = x1;
        f0 = f1;
        i += 1;
    }
    Err(Error::RootNotFound(format!(
        "only {seen} sign change(s) in [{start}, {end}], wanted {count}"
    )))
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter(
                "Gauss-Legendre order must be at least 1".into(),
            ));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp;
            loop {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let z_prev = z;
                z = z_prev - p1 / dp;
                if (z - z_prev).abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Ok(Self { nodes, weights })
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn j0_vanishes_at_pi() {
        assert!(spherical_bessel_j(0, PI).unwrap().abs() < 1e-15);
    }

    #[test]
    fn j1_small_argument_is_x_over_three() {
        for &x in &[1e-3, 1e-6, 1e-9] {
            assert_relative_eq!(
                spherical_bessel_j(1, x).unwrap(),
                x / 3.0,
                max_relative = 1e-6
            );
        }
    }

    #[test]
    fn nonpositive_argument_is_a_domain_error() {
        assert!(matches!(spherical_bessel_j(3, 0.0), Err(Error::Domain(_))));
        assert!(matches!(spherical_bessel_j(3, -1.0), Err(Error::Domain(_))));
        assert!(matches!(
            spherical_bessel_j_derivative(3, -1.0),
            Err(Error::Domain(_))
        ));
    }

    // Reference values: 50-digit evaluation of sqrt(pi/2x) J_{l+1/2}(x).
    #[test]
    fn matches_high_precision_reference() {
        let cases = [
            (50, 60.0, -0.021230978268738994477),
            (100, 120.0, 0.010398358612379497329),
            (200, 250.0, 0.0011810036443646586201),
            (1, 2.0, 0.43539777497999161735),
            (10, 3.0, 3.5260038931752563332e-6),
            (100, 50.0, 1.0190122629310461406e-22),
            (5, 0.001, 9.6200092500092571772e-20),
            (1000, 1200.0, 0.00044555354275231718576),
            (5000, 5010.0, 0.00066631587736837163798),
        ];
        for (l, x, expected) in cases {
            let got = spherical_bessel_j(l, x).unwrap();
            assert_relative_eq!(got, expected, max_relative = 1e-10);
        }
    }

    #[test]
    fn derivative_matches_reference() {
        let cases = [
            (0, PI / 2.0, -0.40528473456935108578),
            (1, 2.0, 0.01925093843284923035),
            (50, 60.0, -0.0034739931669660964752),
            (200, 250.0, -0.0030191061274304640614),
        ];
        for (l, x, expected) in cases {
            let got = spherical_bessel_j_derivative(l, x).unwrap();
            assert_relative_eq!(got, expected, max_relative = 1e-10);
        }
    }

    #[test]
    fn derivative_agrees_with_central_difference() {
        let h = 1e-6;
        for &(l, x) in &[(0u32, PI / 2.0), (1, 2.0), (50, 60.0), (7, 0.5)] {
            let fd = (spherical_bessel_j(l, x + h).unwrap()
                - spherical_bessel_j(l, x - h).unwrap())
                / (2.0 * h);
            let d = spherical_bessel_j_derivative(l, x).unwrap();
            assert_relative_eq!(d, fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn neumann_low_orders() {
        let x = 1.7;
        assert_relative_eq!(spherical_bessel_y(0, x).unwrap(), -x.cos() / x);
        let y2 = (-3.0 / (x * x * x) + 1.0 / x) * x.cos() - 3.0 / (x * x) * x.sin();
        assert_relative_eq!(spherical_bessel_y(2, x).unwrap(), y2, max_relative = 1e-13);
    }

    #[test]
    fn scaled_neumann_agrees_with_direct_recurrence() {
        for &(l, x) in &[(0u32, 2.3), (3, 1.1), (40, 20.0), (100, 45.0)] {
            let direct = spherical_bessel_y(l, x).unwrap();
            let s = ScaledNeumann::new(l, x).unwrap();
            assert_relative_eq!(s.sign * s.ln_abs.exp(), direct, max_relative = 1e-11);
            let h = 1e-6 * x;
            let fd = (spherical_bessel_y(l, x + h).unwrap()
                - spherical_bessel_y(l, x - h).unwrap())
                / (2.0 * h);
            assert_relative_eq!(s.log_derivative, fd / direct, max_relative = 1e-6);
        }
    }

    #[test]
    fn scaled_neumann_survives_deep_evanescence() {
        let s = ScaledNeumann::new(4600, 2100.0).unwrap();
        assert!(s.ln_abs > 700.0 && s.ln_abs.is_finite());
    }

    #[test]
    fn brent_square_root_of_two() {
        let b = Bracket::new(1.0, 2.0).unwrap();
        let x = find_root(|x| x * x - 2.0, b, 1e-12).unwrap();
        assert_relative_eq!(x, 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn brent_cosine_root() {
        let b = Bracket::new(1.0, 2.0).unwrap();
        let x = find_root(f64::cos, b, 1e-12).unwrap();
        assert_relative_eq!(x, PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn brent_rejects_missing_sign_change() {
        let b = Bracket::new(-1.0, 1.0).unwrap();
        assert!(matches!(
            find_root(|x| x * x + 1.0, b, 1e-12),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn brent_stays_inside_bracket() {
        let b = Bracket::new(2.0, 4.0).unwrap();
        let x = find_root(f64::tan, b, 1e-13).unwrap();
        assert_relative_eq!(x, PI, epsilon = 1e-12);
        assert!(b.contains(x));
    }

    #[test]
    fn bracket_rejects_inverted_bounds() {
        assert!(Bracket::new(2.0, 1.0).is_err());
        assert!(Bracket::new(1.0, 1.0).is_err());
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(8).unwrap();
        // degree 15 is the maximum exactly integrated by 8 nodes
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert_relative_eq!(v, 2f64.powi(16) / 16.0, max_relative = 1e-13);
        let w: f64 = gl.weights.iter().sum();
        assert_relative_eq!(w, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn scan_finds_successive_sign_changes() {
        let b = scan_for_bracket(f64::sin, 0.5, 20.0, 0.1, 2).unwrap();
        assert!(b.contains(2.0 * PI));
        assert!(scan_for_bracket(f64::sin, 0.5, 3.0, 0.1, 2).is_err());
    }
}
