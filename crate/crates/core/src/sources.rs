//! Impressed source fields h_s with j_s = curl h_s.
//!
//! Two building blocks: uniform fields (curl-free everywhere) and polygonal
//! filament coils evaluated with the exact finite-segment Biot-Savart
//! formula, which is curl-free off the wire. Fields compose by summation.

use nalgebra::Vector3;
use thiserror::Error;

/// Default guard distance around filaments in meters: evaluation closer than
/// this is a mesh/coil configuration error, not a field request.
pub const DEFAULT_GUARD: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("evaluation point {point:?} is within guard distance {guard:.3e} m of a filament (distance {dist:.3e})")]
    GuardViolation { point: [f64; 3], dist: f64, guard: f64 },
    #[error("filament polyline must be closed and have at least 3 segments of positive length")]
    BadPolyline,
}

/// Impressed source field variants.
#[derive(Debug, Clone)]
pub enum SourceField {
    /// Spatially constant field, A/m.
    Uniform { h0: Vector3<f64> },
    /// Closed polygonal filament loop carrying `current` amperes through
    /// `turns` turns. Vertices in meters, first vertex repeated last.
    FilamentLoop {
        vertices: Vec<Vector3<f64>>,
        current: f64,
        turns: f64,
        guard: f64,
    },
    Sum(Vec<SourceField>),
}

impl SourceField {
    pub fn filament_loop(
        vertices: Vec<Vector3<f64>>,
        current: f64,
        turns: f64,
    ) -> Result<SourceField, SourceError> {
        if vertices.len() < 4 || vertices.first() != vertices.last() {
            return Err(SourceError::BadPolyline);
        }
        let mut distinct = 0;
        for w in vertices.windows(2) {
            let len = (w[1] - w[0]).norm();
            if len <= 0.0 {
                return Err(SourceError::BadPolyline);
            }
            distinct += 1;
        }
        if distinct < 3 {
            return Err(SourceError::BadPolyline);
        }
        Ok(SourceField::FilamentLoop { vertices, current, turns, guard: DEFAULT_GUARD })
    }

    /// Closed square loop in the plane z = `z`, corners at (lo,lo), (hi,lo),
    /// (hi,hi), (lo,hi). Convenience for the shipped benchmark.
    pub fn square_loop(lo: f64, hi: f64, z: f64, current: f64, turns: f64) -> SourceField {
        let v = vec![
            Vector3::new(lo, lo, z),
            Vector3::new(hi, lo, z),
            Vector3::new(hi, hi, z),
            Vector3::new(lo, hi, z),
            Vector3::new(lo, lo, z),
        ];
        SourceField::filament_loop(v, current, turns).expect("square loop is a valid polyline")
    }
}

fn segment_distance(x: Vector3<f64>, a: Vector3<f64>, b: Vector3<f64>) -> f64 {
    let ab = b - a;
    let t = ((x - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (x - (a + ab * t)).norm()
}

/// Exact H field of one finite straight segment from `a` to `b` carrying
/// current `i` (amperes), evaluated at `x`:
/// H = (I / 4 pi) * (a x r1) / |a x r1|^2 * (a.r1/|r1| - a.r2/|r2|),
/// the (cos t1 - cos t2)/d form written without trigonometry.
fn segment_field(x: Vector3<f64>, a: Vector3<f64>, b: Vector3<f64>, i: f64) -> Vector3<f64> {
    let seg = b - a;
    let r1 = x - a;
    let r2 = x - b;
    let cr = seg.cross(&r1);
    let cr2 = cr.norm_squared();
    if cr2 == 0.0 {
        // on the segment axis but outside the guard tube: field vanishes
        return Vector3::zeros();
    }
    let scale = seg.dot(&r1) / r1.norm() - seg.dot(&r2) / r2.norm();
    cr * (i / (4.0 * std::f64::consts::PI) * scale / cr2)
}

/// Evaluate h_s at a point. Filament evaluation inside the guard tube is an
/// error: quadrature points must stay off the wire.
pub fn eval_hs(src: &SourceField, x: Vector3<f64>) -> Result<Vector3<f64>, SourceError> {
    match src {
        SourceField::Uniform { h0 } => Ok(*h0),
        SourceField::FilamentLoop { vertices, current, turns, guard } => {
            let i = current * turns;
            let mut h = Vector3::zeros();
            for w in vertices.windows(2) {
                let dist = segment_distance(x, w[0], w[1]);
                if dist < *guard {
                    return Err(SourceError::GuardViolation {
                        point: [x.x, x.y, x.z],
                        dist,
                        guard: *guard,
                    });
                }
                h += segment_field(x, w[0], w[1], i);
            }
            Ok(h)
        }
        SourceField::Sum(parts) => {
            let mut h = Vector3::zeros();
            for p in parts {
                h += eval_hs(p, x)?;
            }
            Ok(h)
        }
    }
}

/// Central-difference estimate of |curl h_s| at `x`. Off the filament the
/// true curl is zero; this is a validation aid, not part of assembly.
pub fn check_curl_free(src: &SourceField, x: Vector3<f64>, step: f64) -> Result<f64, SourceError> {
    let mut jac = [[0.0f64; 3]; 3]; // jac[i][j] = d h_i / d x_j
    for j in 0..3 {
        let mut dx = Vector3::zeros();
        dx[j] = step;
        let hp = eval_hs(src, x + dx)?;
        let hm = eval_hs(src, x - dx)?;
        for i in 0..3 {
            jac[i][j] = (hp[i] - hm[i]) / (2.0 * step);
        }
    }
    let curl = Vector3::new(
        jac[2][1] - jac[1][2],
        jac[0][2] - jac[2][0],
        jac[1][0] - jac[0][1],
    );
    Ok(curl.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn polygon_loop(n: usize, radius: f64, current: f64) -> SourceField {
        let mut v: Vec<Vector3<f64>> = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                Vector3::new(radius * t.cos(), radius * t.sin(), 0.0)
            })
            .collect();
        v.push(v[0]);
        SourceField::filament_loop(v, current, 1.0).unwrap()
    }

    #[test]
    fn uniform_field_is_constant() {
        let src = SourceField::Uniform { h0: Vector3::new(0.0, 0.0, 1000.0) };
        for x in [Vector3::zeros(), Vector3::new(1.0, -2.0, 0.5)] {
            assert_eq!(eval_hs(&src, x).unwrap(), Vector3::new(0.0, 0.0, 1000.0));
        }
    }

    #[test]
    fn polygon_center_field_matches_circular_loop() {
        // 256-gon of radius 0.1 m: center field within 0.1% of I/(2R)
        let src = polygon_loop(256, 0.1, 1.0);
        let h = eval_hs(&src, Vector3::zeros()).unwrap();
        let expect = 1.0 / (2.0 * 0.1);
        assert!(h.x.abs() < 1e-12 && h.y.abs() < 1e-12);
        assert_relative_eq!(h.z, expect, max_relative = 1e-3);
    }

    #[test]
    fn current_reversal_flips_field() {
        let fwd = polygon_loop(16, 0.1, 2.5);
        let rev = polygon_loop(16, 0.1, -2.5);
        let x = Vector3::new(0.03, -0.02, 0.05);
        let hf = eval_hs(&fwd, x).unwrap();
        let hr = eval_hs(&rev, x).unwrap();
        assert!((hf + hr).norm() < 1e-14 * hf.norm());
    }

    #[test]
    fn guard_violation_is_error() {
        let src = SourceField::square_loop(0.0, 1.0, 0.0, 1.0, 1.0);
        let on_wire = Vector3::new(0.5, 0.0, 1e-9);
        assert!(matches!(
            eval_hs(&src, on_wire),
            Err(SourceError::GuardViolation { .. })
        ));
    }

    #[test]
    fn open_or_degenerate_polyline_rejected() {
        let open = vec![
            Vector3::zeros(),
            Vector3::x(),
            Vector3::y(),
        ];
        assert!(SourceField::filament_loop(open, 1.0, 1.0).is_err());
        let two_seg = vec![Vector3::zeros(), Vector3::x(), Vector3::zeros()];
        assert!(SourceField::filament_loop(two_seg, 1.0, 1.0).is_err());
    }

    #[test]
    fn curl_free_estimates() {
        let uni = SourceField::Uniform { h0: Vector3::new(10.0, -3.0, 7.0) };
        assert!(check_curl_free(&uni, Vector3::new(0.2, 0.1, 0.4), 1e-4).unwrap() < 1e-8);

        let coil = polygon_loop(32, 0.1, 1.0);
        let x = Vector3::new(0.0, 0.0, 0.05);
        let h = eval_hs(&coil, x).unwrap().norm();
        let curl = check_curl_free(&coil, x, 1e-4).unwrap();
        assert!(curl <= 1e-3 * h, "curl {curl:.3e} vs field {h:.3e}");

        let sum = SourceField::Sum(vec![
            SourceField::Uniform { h0: Vector3::x() },
            SourceField::Uniform { h0: Vector3::y() },
        ]);
        assert!(check_curl_free(&sum, Vector3::zeros(), 1e-4).unwrap() < 1e-12);
    }

    #[test]
    fn sum_linearity_and_current_scaling() {
        let a = polygon_loop(12, 0.1, 1.0);
        let b = SourceField::Uniform { h0: Vector3::new(5.0, 0.0, 0.0) };
        let sum = SourceField::Sum(vec![a.clone(), b.clone()]);
        let x = Vector3::new(0.02, 0.01, 0.07);
        let hs = eval_hs(&sum, x).unwrap();
        let ha = eval_hs(&a, x).unwrap();
        let hb = eval_hs(&b, x).unwrap();
        assert_eq!(hs, ha + hb);

        let doubled = polygon_loop(12, 0.1, 2.0);
        let hd = eval_hs(&doubled, x).unwrap();
        assert!((hd - ha * 2.0).norm() < 1e-15 * hd.norm());
    }

    #[test]
    fn far_field_decays_like_dipole() {
        let src = polygon_loop(64, 0.05, 1.0);
        let h1 = eval_hs(&src, Vector3::new(0.0, 0.0, 1.0)).unwrap().norm();
        let h2 = eval_hs(&src, Vector3::new(0.0, 0.0, 2.0)).unwrap().norm();
        let ratio = h1 / h2;
        // 1/d^3 decay within a factor of 2
        assert!(ratio > 4.0 && ratio < 16.0, "ratio {ratio}");
    }
}
