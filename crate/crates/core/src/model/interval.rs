//! Maximization over a closed interval when no closed form is available.

/// Grid resolution used when a payoff has no closed-form best response.
pub const DEFAULT_GRID_POINTS: usize = 10_001;

const GOLDEN_ITERATIONS: usize = 80;

/// Maximize `f` over `[lo, hi]`: uniform grid scan followed by one
/// golden-section refinement inside the bracket around the best grid point.
///
/// Returns `(argmax, max)`. Among equal grid values the smallest point wins.
pub fn grid_golden_argmax<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let points = points.max(2);
    let step = (hi - lo) / (points - 1) as f64;
    let mut best_k = 0;
    let mut best_v = f(lo);
    for k in 1..points {
        let x = if k == points - 1 { hi } else { lo + step * k as f64 };
        let v = f(x);
        if v > best_v {
            best_k = k;
            best_v = v;
        }
    }
    let best_x = if best_k == points - 1 { hi } else { lo + step * best_k as f64 };

    let a = (best_x - step).max(lo);
    let b = (best_x + step).min(hi);
    let (x, v) = golden_section_max(&f, a, b);
    if v > best_v {
        (x, v)
    } else {
        (best_x, best_v)
    }
}

fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERATIONS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
