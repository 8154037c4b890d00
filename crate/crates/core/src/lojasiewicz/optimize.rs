const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[a, b]`. Returns the best
/// point seen and its value.
pub fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for _ in 0..max_iter {
        if (b - a).abs() <= rel_tol * (c.abs() + d.abs()) + f64::MIN_POSITIVE {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    best
}

/// Coordinate-wise golden-section descent from `start` with initial bracket
/// half-width `step`, halving the bracket after each sweep.
pub fn coordinate_descent<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    mut step: f64,
    sweeps: usize,
) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut fx = f(&x);
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for _ in 0..sweeps {
        if step <= 1e-15 * scale || step == 0.0 {
            break;
        }
        for i in 0..x.len() {
            let xi = x[i];
            let mut probe = x.clone();
            let (t, ft) = golden_section(
                |v| {
                    probe[i] = v;
                    f(&probe)
                },
                xi - step,
                xi + step,
                1e-12,
                80,
            );
            if ft < fx {
                x[i] = t;
                fx = ft;
            }
        }
        step *= 0.5;
    }
    (x, fx)
}
