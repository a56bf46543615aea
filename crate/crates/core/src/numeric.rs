//! Scalar root finding and one-dimensional maximization.

/// Bisection for a continuous function with a sign change on `[lo, hi]`.
///
/// Returns `None` when `f(lo)` and `f(hi)` share a strict sign. Iterates
/// until the bracket stops shrinking in floating point.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return None;
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximizer of a unimodal function on `[lo, hi]`.
pub fn golden_max<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        if x1 >= x2 {
            break;
        }
    }
    // endpoints are candidates too; the search never evaluates them
    let mid = 0.5 * (lo + hi);
    let f_mid = f(mid);
    [(x1, f1), (x2, f2), (mid, f_mid)]
        .into_iter()
        .fold((mid, f_mid), |best, c| if c.1 > best.1 { c } else { best })
}

/// Maximizes a unimodal (possibly flat at the edges) function on `[lo, hi]`
/// by scanning `grid` points and refining between the best point's
/// neighbours with golden-section search.
pub fn bracketed_max<F>(mut f: F, lo: f64, hi: f64, grid: usize, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let grid = grid.max(3);
    let step = (hi - lo) / (grid - 1) as f64;
    let mut best = (lo, f(lo));
    let mut best_k = 0;
    for k in 1..grid {
        let x = if k == grid - 1 {
            hi
        } else {
            lo + step * k as f64
        };
        let v = f(x);
        if v > best.1 {
            best = (x, v);
            best_k = k;
        }
    }
    let a = if best_k == 0 {
        lo
    } else {
        lo + step * (best_k - 1) as f64
    };
    let b = if best_k + 1 >= grid {
        hi
    } else {
        lo + step * (best_k + 1) as f64
    };
    let refined = golden_max(&mut f, a, b, tol);
    if refined.1 >= best.1 {
        refined
    } else {
        best
    }
}
