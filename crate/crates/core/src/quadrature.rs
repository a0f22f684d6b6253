//! Composite Gauss–Legendre quadrature.

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Default number of panels for integrals over a solution interval.
pub const DEFAULT_PANELS: usize = 64;

/// Nodes and weights of the composite 8-point rule on `[a, b]`.
pub fn gauss_legendre_rule(a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(8 * panels);
    let mut weights = Vec::with_capacity(8 * panels);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            nodes.push(mid - half * x);
            weights.push(half * w);
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }
    (nodes, weights)
}

/// `∫_a^b f` with the composite 8-point Gauss–Legendre rule.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = gauss_legendre_rule(a, b, panels);
    nodes.iter().zip(&weights).map(|(&x, &w)| w * f(x)).sum()
}
