//! Magnetic material laws: energy densities, their derivatives and the
//! convex conjugate coenergy.
//!
//! Nonlinear isotropic laws are built from measured (H, B) samples: the
//! scalar response `wtilde'(|b|) = |h|` is the Fritsch-Carlson monotone
//! cubic interpolant of the B -> H data, so the energy density is convex by
//! construction. The energy itself is the exact per-piece integral of the
//! interpolant, and the coenergy is obtained by pointwise numerical
//! inversion, which makes the two laws exact conjugates of each other.

use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::MU0;

/// Lower clamp for the scalar second derivative: measured curves can carry
/// flat segments, while the analysis needs a uniform monotonicity constant.
pub const GAMMA_FLOOR: f64 = 1e-5 / MU0;

/// Below this |b| the isotropic Hessian switches to its analytic limit.
const ISO_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("B-H parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("B-H data not strictly increasing at sample {index} ({which})")]
    NonMonotone { index: usize, which: &'static str },
    #[error("B-H curve needs at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("B-H data contains negative or non-finite value at sample {0}")]
    InvalidValue(usize),
    #[error("coenergy inversion did not converge for |h| = {h:.6e}")]
    InversionFailed { h: f64 },
    #[error("monotonicity constant gamma = {0:.6e} is not positive")]
    NonPositiveGamma(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Measured material relation: (H, B) samples including (0, 0), strictly
/// increasing in both coordinates.
#[derive(Debug, Clone)]
pub struct BhCurve {
    /// (H in A/m, B in tesla), first sample (0, 0).
    pub samples: Vec<(f64, f64)>,
}

impl BhCurve {
    pub fn new(mut samples: Vec<(f64, f64)>) -> Result<Self, MaterialError> {
        if !samples.first().is_some_and(|&(h, b)| h == 0.0 && b == 0.0) {
            samples.insert(0, (0.0, 0.0));
        }
        if samples.len() < 3 {
            return Err(MaterialError::TooFewSamples(samples.len()));
        }
        for (i, &(h, b)) in samples.iter().enumerate() {
            if !(h.is_finite() && b.is_finite()) || h < 0.0 || b < 0.0 {
                return Err(MaterialError::InvalidValue(i));
            }
        }
        for i in 1..samples.len() {
            if samples[i].0 <= samples[i - 1].0 {
                return Err(MaterialError::NonMonotone { index: i, which: "H" });
            }
            if samples[i].1 <= samples[i - 1].1 {
                return Err(MaterialError::NonMonotone { index: i, which: "B" });
            }
        }
        Ok(BhCurve { samples })
    }

    pub fn b_last(&self) -> f64 {
        self.samples.last().unwrap().1
    }

    /// Synthetic saturating steel-like curve used by the shipped benchmark:
    /// initial relative permeability ~501, saturation polarization 1.9 T.
    pub fn synthetic_steel() -> BhCurve {
        let js = 1.9;
        let chi = 500.0;
        let h0 = 2.0 * js / (std::f64::consts::PI * chi * MU0);
        let hs = [
            0.0, 250.0, 500.0, 750.0, 1000.0, 1500.0, 2000.0, 3000.0, 4000.0, 6000.0, 8000.0,
            12000.0, 16000.0, 24000.0, 32000.0, 48000.0, 64000.0, 96000.0, 128000.0, 200000.0,
        ];
        let samples = hs
            .iter()
            .map(|&h| {
                let b = MU0 * h + js * (2.0 / std::f64::consts::PI) * (h / h0).atan();
                (h, b)
            })
            .collect();
        BhCurve::new(samples).expect("synthetic curve is valid")
    }
}

/// Parse a two-column (H, B) text file: comma or whitespace separated,
/// '#' comment lines and a single non-numeric header line allowed.
pub fn load_bh_csv(path: impl AsRef<Path>) -> Result<BhCurve, MaterialError> {
    let text = std::fs::read_to_string(path)?;
    parse_bh(&text)
}

pub fn parse_bh(text: &str) -> Result<BhCurve, MaterialError> {
    let mut samples = Vec::new();
    let mut header_skipped = false;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|s| s.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => samples.push((v[0], v[1])),
            _ if !header_skipped && samples.is_empty() => header_skipped = true,
            _ => {
                return Err(MaterialError::Parse {
                    line: ln + 1,
                    msg: format!("expected two numeric columns, got '{line}'"),
                })
            }
        }
    }
    BhCurve::new(samples)
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
    /// Exact cumulative integral of the interpolant at each knot.
    integral: Vec<f64>,
}

impl MonotoneCubic {
    pub fn fit(x: &[f64], y: &[f64]) -> MonotoneCubic {
        let n = x.len();
        assert!(n >= 2);
        let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut m = vec![0.0; n];
        for i in 1..n - 1 {
            if d[i - 1] * d[i] <= 0.0 {
                m[i] = 0.0;
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        m[0] = endpoint_slope(h[0], h.get(1).copied().unwrap_or(h[0]), d[0], *d.get(1).unwrap_or(&d[0]));
        m[n - 1] = endpoint_slope(
            h[n - 2],
            if n >= 3 { h[n - 3] } else { h[n - 2] },
            d[n - 2],
            if n >= 3 { d[n - 3] } else { d[n - 2] },
        );
        let mut integral = vec![0.0; n];
        for i in 0..n - 1 {
            // exact integral of the Hermite cubic on [x_i, x_{i+1}]
            let seg = h[i] * (y[i] + y[i + 1]) / 2.0 + h[i] * h[i] * (m[i] - m[i + 1]) / 12.0;
            integral[i + 1] = integral[i] + seg;
        }
        MonotoneCubic { x: x.to_vec(), y: y.to_vec(), slope: m, integral }
    }

    fn interval(&self, s: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    /// Interpolant value at `s` (must lie within the data range).
    pub fn value(&self, s: f64) -> f64 {
        let i = self.interval(s);
        let h = self.x[i + 1] - self.x[i];
        let t = (s - self.x[i]) / h;
        let (h00, h10, h01, h11) = hermite(t);
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }

    /// First derivative at `s`.
    pub fn derivative(&self, s: f64) -> f64 {
        let i = self.interval(s);
        let h = self.x[i + 1] - self.x[i];
        let t = (s - self.x[i]) / h;
        let dh00 = 6.0 * t * t - 6.0 * t;
        let dh10 = 3.0 * t * t - 4.0 * t + 1.0;
        let dh01 = -dh00;
        let dh11 = 3.0 * t * t - 2.0 * t;
        (dh00 * self.y[i] + dh01 * self.y[i + 1]) / h + dh10 * self.slope[i] + dh11 * self.slope[i + 1]
    }

    /// Exact integral of the interpolant from the first knot to `s`.
    pub fn integral_to(&self, s: f64) -> f64 {
        let i = self.interval(s);
        let h = self.x[i + 1] - self.x[i];
        let t = (s - self.x[i]) / h;
        // integrals of the Hermite basis from 0 to t, scaled by h
        let i00 = t * t * t * (t / 2.0 - 1.0) + t; // int of 2t^3-3t^2+1
        let i10 = t * t * (t * (t / 4.0 - 2.0 / 3.0) + 0.5); // int of t^3-2t^2+t
        let i01 = t * t * t * (1.0 - t / 2.0); // int of -2t^3+3t^2
        let i11 = t * t * t * (t / 4.0 - 1.0 / 3.0); // int of t^3-t^2
        self.integral[i]
            + h * (i00 * self.y[i]
                + i01 * self.y[i + 1]
                + h * (i10 * self.slope[i] + i11 * self.slope[i + 1]))
    }

    pub fn x_last(&self) -> f64 {
        *self.x.last().unwrap()
    }

    pub fn y_last(&self) -> f64 {
        *self.y.last().unwrap()
    }
}

fn hermite(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

/// Three-point endpoint slope with the standard monotone projection.
fn endpoint_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m.min(3.0 * d0.abs())
    }
}

/// Pointwise magnetic energy density w(b) with first and second derivatives.
#[derive(Debug, Clone)]
pub enum EnergyLaw {
    /// w(b) = |b|^2 / (2 mu).
    Linear { mu: f64 },
    /// Isotropic w(b) = wtilde(|b|) with wtilde' the monotone interpolant of
    /// the B -> H data, extended affinely with slope `nu_sat` beyond the
    /// last sample.
    IsotropicSpline {
        spline: MonotoneCubic,
        nu_sat: f64,
        /// min / max of the (clamped) second derivative over a dense scan.
        gamma: f64,
        lipschitz: f64,
        /// number of scan points where the clamp to [`GAMMA_FLOOR`] engaged.
        clamp_events: usize,
    },
}

/// Value, gradient and Hessian of an energy density at one point.
#[derive(Debug, Clone, Copy)]
pub struct EnergyEval {
    /// J/m^3
    pub w: f64,
    /// A/m
    pub h: Vector3<f64>,
    /// Symmetric positive definite, eigenvalues in [gamma, L].
    pub hessian: Matrix3<f64>,
}

/// Value, gradient and Hessian of a coenergy density at one point.
#[derive(Debug, Clone, Copy)]
pub struct CoenergyEval {
    pub w_star: f64,
    /// tesla
    pub b: Vector3<f64>,
    pub hessian: Matrix3<f64>,
}

impl EnergyLaw {
    /// Scalar response wtilde'(s) = |h| as a function of s = |b|.
    pub fn wprime(&self, s: f64) -> f64 {
        match self {
            EnergyLaw::Linear { mu } => s / mu,
            EnergyLaw::IsotropicSpline { spline, nu_sat, .. } => {
                let bl = spline.x_last();
                if s <= bl {
                    spline.value(s)
                } else {
                    spline.y_last() + nu_sat * (s - bl)
                }
            }
        }
    }

    /// Clamped second derivative wtilde''(s).
    pub fn wsecond(&self, s: f64) -> f64 {
        match self {
            EnergyLaw::Linear { mu } => 1.0 / mu,
            EnergyLaw::IsotropicSpline { spline, nu_sat, .. } => {
                let raw = if s <= spline.x_last() { spline.derivative(s) } else { *nu_sat };
                raw.max(GAMMA_FLOOR)
            }
        }
    }

    /// Scalar energy wtilde(s).
    pub fn wtilde(&self, s: f64) -> f64 {
        match self {
            EnergyLaw::Linear { mu } => s * s / (2.0 * mu),
            EnergyLaw::IsotropicSpline { spline, nu_sat, .. } => {
                let bl = spline.x_last();
                if s <= bl {
                    spline.integral_to(s)
                } else {
                    let ds = s - bl;
                    spline.integral_to(bl) + spline.y_last() * ds + 0.5 * nu_sat * ds * ds
                }
            }
        }
    }

    /// Largest B sample (or 1 T for linear laws, used as a scan scale).
    pub fn b_scale(&self) -> f64 {
        match self {
            EnergyLaw::Linear { .. } => 1.0,
            EnergyLaw::IsotropicSpline { spline, .. } => spline.x_last(),
        }
    }

    /// Monotonicity and Lipschitz constants (gamma, L) of the law.
    pub fn constants(&self) -> (f64, f64) {
        match self {
            EnergyLaw::Linear { mu } => (1.0 / mu, 1.0 / mu),
            EnergyLaw::IsotropicSpline { gamma, lipschitz, .. } => (*gamma, *lipschitz),
        }
    }
}

/// Fit an isotropic energy law to a B-H curve.
pub fn fit_energy(curve: &BhCurve) -> Result<EnergyLaw, MaterialError> {
    let b: Vec<f64> = curve.samples.iter().map(|s| s.1).collect();
    let h: Vec<f64> = curve.samples.iter().map(|s| s.0).collect();
    let spline = MonotoneCubic::fit(&b, &h);
    let n = b.len();
    let last_secant = (h[n - 1] - h[n - 2]) / (b[n - 1] - b[n - 2]);
    let nu_sat = last_secant.max(GAMMA_FLOOR);

    // (gamma, L) from a dense scan of [0, 2 B_last] including the extension
    let b_last = spline.x_last();
    let scan_n = 10_000;
    let mut gamma = f64::INFINITY;
    let mut lipschitz: f64 = 0.0;
    let mut clamp_events = 0usize;
    for k in 0..=scan_n {
        let s = 2.0 * b_last * k as f64 / scan_n as f64;
        let raw = if s <= b_last { spline.derivative(s) } else { nu_sat };
        if raw < GAMMA_FLOOR {
            clamp_events += 1;
        }
        let clamped = raw.max(GAMMA_FLOOR);
        gamma = gamma.min(clamped);
        lipschitz = lipschitz.max(clamped);
    }
    if gamma <= 0.0 {
        return Err(MaterialError::NonPositiveGamma(gamma));
    }
    Ok(EnergyLaw::IsotropicSpline { spline, nu_sat, gamma, lipschitz, clamp_events })
}

/// w, dw/db and d2w/db2 at a flux density `b`.
pub fn energy_eval(law: &EnergyLaw, b: Vector3<f64>) -> EnergyEval {
    match law {
        EnergyLaw::Linear { mu } => EnergyEval {
            w: b.norm_squared() / (2.0 * mu),
            h: b / *mu,
            hessian: Matrix3::identity() / *mu,
        },
        _ => {
            let s = b.norm();
            if s < ISO_ZERO_TOL {
                let w2 = law.wsecond(0.0);
                EnergyEval { w: law.wtilde(s), h: b * w2, hessian: Matrix3::identity() * w2 }
            } else {
                let wp = law.wprime(s);
                let w2 = law.wsecond(s);
                let dir = b / s;
                let proj = dir * dir.transpose();
                EnergyEval {
                    w: law.wtilde(s),
                    h: dir * wp,
                    hessian: proj * w2 + (Matrix3::identity() - proj) * (wp / s),
                }
            }
        }
    }
}

/// Convex conjugate of an [`EnergyLaw`], evaluated by pointwise inversion.
#[derive(Debug, Clone)]
pub struct CoenergyLaw {
    pub law: EnergyLaw,
    /// relative tolerance of the scalar inversion
    pub tol: f64,
}

impl CoenergyLaw {
    pub fn new(law: EnergyLaw) -> Self {
        CoenergyLaw { law, tol: 1e-12 }
    }

    /// Solve wtilde'(s) = h_norm for s >= 0 by safeguarded Newton-bisection.
    pub fn invert(&self, h_norm: f64) -> Result<f64, MaterialError> {
        if h_norm == 0.0 {
            return Ok(0.0);
        }
        if let EnergyLaw::Linear { mu } = self.law {
            return Ok(mu * h_norm);
        }
        let EnergyLaw::IsotropicSpline { spline, nu_sat, .. } = &self.law else {
            unreachable!()
        };
        let b_last = spline.x_last();
        let h_last = spline.y_last();
        if h_norm >= h_last {
            // affine extension: closed-form inverse
            return Ok(b_last + (h_norm - h_last) / nu_sat);
        }
        let mut lo = 0.0f64;
        let mut hi = b_last;
        let mut s = (h_norm / h_last) * b_last; // secant first guess
        for _ in 0..200 {
            let f = self.law.wprime(s) - h_norm;
            if f.abs() <= self.tol * h_norm {
                return Ok(s);
            }
            if f > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let df = self.law.wsecond(s);
            let mut next = s - f / df;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi); // bisection safeguard
            }
            if (next - s).abs() <= self.tol * s.abs().max(1e-300) {
                return Ok(next);
            }
            s = next;
        }
        Err(MaterialError::InversionFailed { h: h_norm })
    }
}

/// w*, dw*/dh and d2w*/dh2 at a field intensity `h`.
pub fn coenergy_eval(claw: &CoenergyLaw, h: Vector3<f64>) -> Result<CoenergyEval, MaterialError> {
    match &claw.law {
        EnergyLaw::Linear { mu } => Ok(CoenergyEval {
            w_star: mu * h.norm_squared() / 2.0,
            b: h * *mu,
            hessian: Matrix3::identity() * *mu,
        }),
        law => {
            let hn = h.norm();
            if hn < ISO_ZERO_TOL * law.constants().1 {
                let w2 = law.wsecond(0.0);
                return Ok(CoenergyEval {
                    w_star: 0.0,
                    b: h / w2,
                    hessian: Matrix3::identity() / w2,
                });
            }
            let s = claw.invert(hn)?;
            let dir = h / hn;
            let proj = dir * dir.transpose();
            Ok(CoenergyEval {
                w_star: hn * s - law.wtilde(s),
                b: dir * s,
                hessian: proj / law.wsecond(s) + (Matrix3::identity() - proj) * (s / hn),
            })
        }
    }
}

/// Scan-based (gamma, L) of a law, as reported to the user.
pub fn verify_constants(law: &EnergyLaw) -> Result<(f64, f64), MaterialError> {
    let (gamma, l) = law.constants();
    if gamma <= 0.0 {
        return Err(MaterialError::NonPositiveGamma(gamma));
    }
    Ok((gamma, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut impl Rng, scale: f64) -> Vector3<f64> {
        Vector3::new(
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
        )
    }

    #[test]
    fn parse_valid_curve() {
        let c = parse_bh("0,0\n100,0.5\n1000,1.2\n10000,1.6\n").unwrap();
        assert_eq!(c.samples.len(), 4);
    }

    #[test]
    fn parse_rejects_decreasing_b() {
        let err = parse_bh("0,0\n100,0.5\n1000,0.4\n10000,1.6\n");
        assert!(matches!(err, Err(MaterialError::NonMonotone { which: "B", .. })));
    }

    #[test]
    fn parse_prepends_origin() {
        let c = parse_bh("# H B\n100 0.5\n1000 1.2\n10000 1.6\n").unwrap();
        assert_eq!(c.samples.len(), 4);
        assert_eq!(c.samples[0], (0.0, 0.0));
    }

    #[test]
    fn parse_skips_header_line() {
        let c = parse_bh("H,B\n0,0\n100,0.5\n1000,1.2\n").unwrap();
        assert_eq!(c.samples.len(), 3);
    }

    #[test]
    fn linear_sampled_curve_reproduces_line() {
        // sampling B = mu0 H and fitting must give wtilde'(s) = s / mu0
        let samples: Vec<(f64, f64)> =
            (0..12).map(|i| (1000.0 * i as f64, MU0 * 1000.0 * i as f64)).collect();
        let curve = BhCurve::new(samples).unwrap();
        let law = fit_energy(&curve).unwrap();
        for s in [0.0, 1e-4, 5e-3, 1.2e-2] {
            assert_relative_eq!(law.wprime(s), s / MU0, max_relative = 1e-12, epsilon = 1e-12);
        }
        let (g, l) = law.constants();
        assert_relative_eq!(g, 1.0 / MU0, max_relative = 1e-9);
        assert_relative_eq!(l, 1.0 / MU0, max_relative = 1e-9);
    }

    #[test]
    fn fit_interpolates_samples_exactly() {
        let curve = BhCurve::synthetic_steel();
        let law = fit_energy(&curve).unwrap();
        for &(h, b) in &curve.samples {
            assert_relative_eq!(law.wprime(b), h, max_relative = 1e-12, epsilon = 1e-12);
        }
        if let EnergyLaw::IsotropicSpline { clamp_events, .. } = &law {
            assert_eq!(*clamp_events, 0, "synthetic curve must not hit the gamma clamp");
        }
    }

    #[test]
    fn energy_matches_adaptive_quadrature_of_wprime() {
        // independent oracle: trapezoid refinement of the fitted wtilde'
        let curve = BhCurve::synthetic_steel();
        let law = fit_energy(&curve).unwrap();
        let b_last = curve.b_last();
        let mut n = 1 << 6;
        let trapz = |n: usize| {
            let mut sum = 0.0;
            for i in 0..n {
                let a = b_last * i as f64 / n as f64;
                let b = b_last * (i + 1) as f64 / n as f64;
                sum += 0.5 * (law.wprime(a) + law.wprime(b)) * (b - a);
            }
            sum
        };
        let mut prev = trapz(n);
        loop {
            n *= 2;
            let cur = trapz(n);
            // Richardson: trapezoid error ~ h^2, stop when extrapolation settles
            if (cur - prev).abs() <= 1e-11 * cur.abs() || n > (1 << 22) {
                prev = cur + (cur - prev) / 3.0;
                break;
            }
            prev = cur;
        }
        assert_relative_eq!(law.wtilde(b_last), prev, max_relative = 1e-10);
    }

    #[test]
    fn linear_energy_eval() {
        let law = EnergyLaw::Linear { mu: MU0 };
        let e = energy_eval(&law, Vector3::new(MU0, 0.0, 0.0));
        assert_relative_eq!(e.h.x, 1.0, max_relative = 1e-14);
        assert_relative_eq!(e.w, MU0 / 2.0, max_relative = 1e-14);
        assert_relative_eq!((e.hessian - Matrix3::identity() / MU0).norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn zero_field_limits() {
        let law = fit_energy(&BhCurve::synthetic_steel()).unwrap();
        let e = energy_eval(&law, Vector3::zeros());
        assert_eq!(e.h, Vector3::zeros());
        let w2 = law.wsecond(0.0);
        assert_relative_eq!((e.hessian - Matrix3::identity() * w2).norm(), 0.0, epsilon = 1e-9);

        let claw = CoenergyLaw::new(law);
        let c = coenergy_eval(&claw, Vector3::zeros()).unwrap();
        assert_eq!(c.b, Vector3::zeros());
        assert_eq!(c.w_star, 0.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let law = fit_energy(&BhCurve::synthetic_steel()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let b = rand_vec(&mut rng, 1.8);
            let e = energy_eval(&law, b);
            let step = 1e-6 * b.norm().max(1.0);
            for c in 0..3 {
                let mut db = Vector3::zeros();
                db[c] = step;
                let wp = energy_eval(&law, b + db);
                let wm = energy_eval(&law, b - db);
                let fd_h = (wp.w - wm.w) / (2.0 * step);
                assert_relative_eq!(e.h[c], fd_h, max_relative = 1e-6, epsilon = 1e-6);
                let fd_hess = (wp.h - wm.h) / (2.0 * step);
                for r in 0..3 {
                    assert_relative_eq!(
                        e.hessian[(r, c)],
                        fd_hess[r],
                        max_relative = 1e-5,
                        epsilon = 1e-4 * e.hessian.norm()
                    );
                }
            }
        }
    }

    #[test]
    fn fenchel_young_equality() {
        // w(b) + w*(h) = <h,b> with h = dw(b); sup-scan confirms the conjugate
        let law = fit_energy(&BhCurve::synthetic_steel()).unwrap();
        let claw = CoenergyLaw::new(law.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let b = rand_vec(&mut rng, 2.0 * law.b_scale());
            let e = energy_eval(&law, b);
            let c = coenergy_eval(&claw, e.h).unwrap();
            let lhs = e.w + c.w_star;
            let rhs = e.h.dot(&b);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-9, epsilon = 1e-9);
        }
        // brute-force sup over s for a couple of directions
        for hmag in [500.0, 5e3, 5e4] {
            let h = Vector3::new(hmag, 0.0, 0.0);
            let c = coenergy_eval(&claw, h).unwrap();
            let mut sup = f64::NEG_INFINITY;
            let smax = 2.0 * law.b_scale();
            for k in 0..=200_000 {
                let s = smax * k as f64 / 200_000.0;
                sup = sup.max(hmag * s - law.wtilde(s));
            }
            assert!(c.w_star >= sup - 1e-7 * c.w_star.abs().max(1.0));
            assert!((c.w_star - sup).abs() <= 1e-6 * c.w_star.abs().max(1.0));
        }
    }

    #[test]
    fn conjugation_round_trip() {
        let law = fit_energy(&BhCurve::synthetic_steel()).unwrap();
        let claw = CoenergyLaw::new(law.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let b = rand_vec(&mut rng, 2.0 * law.b_scale());
            let e = energy_eval(&law, b);
            let c = coenergy_eval(&claw, e.h).unwrap();
            assert!((c.b - b).norm() <= 1e-9 * b.norm().max(1e-12));
        }
    }

    #[test]
    fn hessians_are_mutual_inverses() {
        let law = fit_energy(&BhCurve::synthetic_steel()).unwrap();
        let claw = CoenergyLaw::new(law.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let b = rand_vec(&mut rng, 1.9);
            let e = energy_eval(&law, b);
            let c = coenergy_eval(&claw, e.h).unwrap();
            let prod = c.hessian * e.hessian;
            assert!((prod - Matrix3::identity()).norm() < 1e-8);
        }
    }

    #[test]
    fn linear_coenergy_closed_form() {
        let claw = CoenergyLaw::new(EnergyLaw::Linear { mu: MU0 });
        let c = coenergy_eval(&claw, Vector3::new(1.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(c.w_star, MU0 / 2.0, max_relative = 1e-14);
        assert_relative_eq!(c.b.x, MU0, max_relative = 1e-14);
    }

    #[test]
    fn secant_conditions_hold() {
        let law = fit_energy(&BhCurve::synthetic_steel()).unwrap();
        let (gamma, l) = verify_constants(&law).unwrap();
        assert!(gamma > 0.0 && gamma < l && l.is_finite());
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let b1 = rand_vec(&mut rng, 2.0 * law.b_scale());
            let b2 = rand_vec(&mut rng, 2.0 * law.b_scale());
            let d = b1 - b2;
            let dh = energy_eval(&law, b1).h - energy_eval(&law, b2).h;
            let slack = 1e-10 * d.norm_squared();
            assert!(dh.dot(&d) >= gamma * d.norm_squared() - slack);
            assert!(dh.norm() <= l * d.norm() + 1e-10 * l * d.norm());
        }
    }

    #[test]
    fn convexity_along_segments() {
        let law = fit_energy(&BhCurve::synthetic_steel()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..500 {
            let b1 = rand_vec(&mut rng, 2.0);
            let b2 = rand_vec(&mut rng, 2.0);
            let t: f64 = rng.gen_range(0.01..0.99);
            let mid = b1 * t + b2 * (1.0 - t);
            let lhs = energy_eval(&law, mid).w;
            let rhs = t * energy_eval(&law, b1).w + (1.0 - t) * energy_eval(&law, b2).w;
            assert!(lhs <= rhs + 1e-12 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn isotropy_under_rotations() {
        let law = fit_energy(&BhCurve::synthetic_steel()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let axis = rand_vec(&mut rng, 1.0).normalize();
            let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let rot = nalgebra::Rotation3::from_axis_angle(
                &nalgebra::Unit::new_normalize(axis),
                angle,
            );
            let b = rand_vec(&mut rng, 1.5);
            let e = energy_eval(&law, b);
            let er = energy_eval(&law, rot * b);
            assert_relative_eq!(er.w, e.w, max_relative = 1e-12, epsilon = 1e-15);
            assert!((er.h - rot * e.h).norm() <= 1e-12 * e.h.norm().max(1e-12));
        }
    }
}
