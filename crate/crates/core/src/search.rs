//! One-dimensional maximization helpers.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmax, max)`; the endpoints are compared against the interior
/// optimum so maxima on the boundary are found exactly.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
        if x2 <= x1 {
            break;
        }
    }
    let mid = 0.5 * (a + b);
    [(mid, f(mid)), (lo, f(lo)), (hi, f(hi))].into_iter().fold(
        (mid, f64::NEG_INFINITY),
        |best, c| if c.1 > best.1 { c } else { best },
    )
}

/// `n >= 2` evenly spaced points from `lo` to `hi`, endpoints exact.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_and_boundary_maxima() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3).powi(2), -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!(fx.abs() < 1e-12);
        let (x, _) = golden_section_max(|x| x, -1.0, 1.0, 1e-12);
        assert_eq!(x, 1.0);
        let (x, _) = golden_section_max(|x| -x, -1.0, 1.0, 1e-12);
        assert_eq!(x, -1.0);
    }

    #[test]
    fn grid_endpoints() {
        let g = grid(0.1, 1.0, 7);
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[6], 1.0);
    }
}
