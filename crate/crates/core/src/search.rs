//! One-dimensional minimization: coarse grid scan refined by golden-section
//! search.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping once the
/// bracket is narrower than `tol`. Returns `(x, f(x))`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimizes `f` over the open interval `(lo, hi)`: scans `steps` interior
/// points, then refines around the best one. `f` may return `+inf` for
/// points outside its domain.
pub fn grid_then_golden(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    steps: usize,
    tol: f64,
) -> (f64, f64) {
    let h = (hi - lo) / (steps + 1) as f64;
    let xs: Vec<f64> = (1..=steps).map(|k| lo + k as f64 * h).collect();
    let (k, best) = xs
        .iter()
        .map(|&x| f(x))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc });
    let a = if k == 0 { lo + tol.min(h) * 1e-3 } else { xs[k - 1] };
    let b = if k + 1 == xs.len() { hi - tol.min(h) * 1e-3 } else { xs[k + 1] };
    let (x, v) = golden_min(&f, a, b, tol);
    if v < best {
        (x, v)
    } else {
        (xs[k], best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let (x, v) = golden_min(|x| (x - 0.3).powi(2) + 1.0, -1.0, 1.0, 1e-8);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_handles_infinite_regions() {
        let f = |x: f64| if x < 0.5 { f64::INFINITY } else { (x - 0.7).abs() };
        let (x, v) = grid_then_golden(f, -1.0, 1.0, 65, 1e-7);
        assert!((x - 0.7).abs() < 1e-5, "{x}");
        assert!(v < 1e-5);
    }

    #[test]
    fn minimum_at_edge() {
        let (x, _) = grid_then_golden(|x| x, -1.0, 1.0, 9, 1e-8);
        assert!(x < -0.99);
    }
}
