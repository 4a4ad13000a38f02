//! Four-point Gauss–Legendre rule, exact for polynomials of degree ≤ 7.
use crate::Scalar;

const NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_8,
    0.652_145_154_862_546_2,
    0.652_145_154_862_546_2,
    0.347_854_845_137_453_8,
];

/// `∫_lo^hi f(x) dx` by a single four-point panel.
pub(crate) fn gauss4<T: Scalar>(lo: T, hi: T, mut f: impl FnMut(T) -> T) -> T {
    let half = (hi - lo) / T::lit(2.0);
    let mid = (hi + lo) / T::lit(2.0);
    let mut acc = T::zero();
    for (node, weight) in NODES.iter().zip(WEIGHTS.iter()) {
        acc += T::lit(*weight) * f(mid + half * T::lit(*node));
    }
    acc * half
}
