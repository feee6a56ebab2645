//! Quadrature rules: Gauss–Legendre nodes/weights and uniform angular grids.
//!
//! The radial rules are open (no endpoint nodes), so integrands may be
//! singular at r = 0 as long as the integral converges. The angular rule is
//! the N-point trapezoid on [0, 2π), which integrates e^{ikθ} exactly for
//! 0 < |k| < N; that exactness is what makes off-diagonal Fock blocks vanish
//! in the resolution checks.

/// Gauss–Legendre nodes and weights on (-1, 1), by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n(x) = 0.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (_, d2) = legendre_with_derivative(n, x);
                dp = d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_with_derivative(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    if n == 1 {
        return (x, 1.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped onto (a, b).
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        xs.iter().map(|x| mid + half * x).collect(),
        ws.iter().map(|w| w * half).collect(),
    )
}

/// Uniform angular nodes θ_k = 2πk/N on [0, 2π); every node carries weight 2π/N.
pub fn trapezoid_angles(n: usize) -> (Vec<f64>, f64) {
    assert!(n >= 1);
    let step = 2.0 * std::f64::consts::PI / n as f64;
    ((0..n).map(|k| k as f64 * step).collect(), step)
}

/// Composite Gauss–Legendre over [a, b] with panels of width ≤ h.
pub fn composite_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, h: f64, nodes_per_panel: usize) -> f64 {
    assert!(b > a && h > 0.0);
    let panels = ((b - a) / h).ceil() as usize;
    let (xs, ws) = gauss_legendre(nodes_per_panel);
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        let mut acc = 0.0;
        for (x, w) in xs.iter().zip(&ws) {
            acc += w * f(mid + half * x);
        }
        total += acc * half;
    }
    total
}
