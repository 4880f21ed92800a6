//! Real roots of a cubic with a non-vanishing leading coefficient.

use std::f64::consts::PI;

/// Evaluates `c[0] x³ + c[1] x² + c[2] x + c[3]` and its derivative.
fn eval(c: &[f64; 4], x: f64) -> (f64, f64) {
    let p = ((c[0] * x + c[1]) * x + c[2]) * x + c[3];
    let dp = (3.0 * c[0] * x + 2.0 * c[1]) * x + c[2];
    (p, dp)
}

/// `|p(x)| / (max|c_i| · max(1, |x|)³)`.
pub fn relative_residual(c: &[f64; 4], x: f64) -> f64 {
    let scale = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let (p, _) = eval(c, x);
    p.abs() / (scale * x.abs().max(1.0).powi(3))
}

/// Three roots of a cubic known to have only real roots, ascending.
///
/// Uses the trigonometric form when the discriminant allows it and Cardano
/// otherwise (a near-double root can push the computed discriminant slightly
/// positive; the complex pair's real part is returned twice). Each root gets
/// a Newton polish on the undepressed polynomial.
pub fn real_roots(c: [f64; 4]) -> [f64; 3] {
    let a = c[1] / c[0];
    let b = c[2] / c[0];
    let d = c[3] / c[0];

    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;

    let mut roots = if p == 0.0 && q == 0.0 {
        [0.0; 3]
    } else if p < 0.0 && 4.0 * p * p * p + 27.0 * q * q <= 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        [
            m * theta.cos(),
            m * (theta - 2.0 * PI / 3.0).cos(),
            m * (theta - 4.0 * PI / 3.0).cos(),
        ]
    } else {
        let disc = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        // choose the sign that avoids cancellation
        let u = (-q / 2.0 - disc.copysign(q)).cbrt();
        let v = if u == 0.0 { 0.0 } else { -p / (3.0 * u) };
        let real = u + v;
        let pair = -0.5 * real;
        [real, pair, pair]
    };

    for r in roots.iter_mut() {
        *r = polish(&c, *r - shift);
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

fn polish(c: &[f64; 4], mut x: f64) -> f64 {
    let (mut px, _) = eval(c, x);
    for _ in 0..4 {
        let (p, dp) = eval(c, x);
        if dp == 0.0 || p == 0.0 {
            break;
        }
        let cand = x - p / dp;
        let (pc, _) = eval(c, cand);
        if !(pc.abs() < px.abs()) {
            break;
        }
        x = cand;
        px = pc;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(c: [f64; 4], expected: [f64; 3]) {
        let r = real_roots(c);
        for (a, b) in r.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-7, "{r:?} vs {expected:?}");
        }
        for x in r {
            assert!(relative_residual(&c, x) < 1e-14);
        }
    }

    #[test]
    fn distinct_roots() {
        // (x-1)(x-2)(x+3) = x³ - 7x + 6
        check([1.0, 0.0, -7.0, 6.0], [-3.0, 1.0, 2.0]);
        check([2.0, 0.0, -14.0, 12.0], [-3.0, 1.0, 2.0]);
    }

    #[test]
    fn double_root() {
        // -(x-1)²(x+1) = -x³ + x² + x - 1
        check([-1.0, 1.0, 1.0, -1.0], [-1.0, 1.0, 1.0]);
    }

    #[test]
    fn triple_root() {
        // (x-2)³
        let r = real_roots([1.0, -6.0, 12.0, -8.0]);
        for x in r {
            assert!((x - 2.0).abs() < 1e-5);
        }
    }

    #[test]
    fn widely_spread_roots() {
        // (x-1e3)(x-1)(x+1e-3)
        let c = [1.0, -1000.999, 998.999, 1.0];
        let r = real_roots(c);
        assert!((r[0] + 1e-3).abs() < 1e-12);
        assert!((r[1] - 1.0).abs() < 1e-12);
        assert!((r[2] - 1000.0).abs() < 1e-9);
    }
}
