/// Generalised Laguerre polynomial `L^{(1)}_n(x)` by forward recurrence.
pub fn laguerre_assoc1(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 2.0 - x) * cur - (kf + 1.0) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Roots of `L^{(1)}_n`, bracketed by sign changes on a fine scan and
/// refined by bisection. Returned in increasing order.
pub fn laguerre_assoc1_roots(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    // All zeros lie below 4n + 2α + 2.
    let upper = 4.0 * n as f64 + 6.0;
    let step = 1e-3;
    let steps = (upper / step).ceil() as usize;
    let mut roots = Vec::with_capacity(n);
    let mut a = 0.0;
    let mut fa = laguerre_assoc1(n, a);
    for i in 1..=steps {
        let b = i as f64 * step;
        let fb = laguerre_assoc1(n, b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            roots.push(bisect(|x| laguerre_assoc1(n, x), a, b, fa));
        }
        a = b;
        fa = fb;
    }
    roots
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
