//! Bessel functions of the first kind and integer order.
//!
//! All orders `0..=n` are produced together by Miller's downward recurrence
//! `J_{k−1} = (2k/x)·J_k − J_{k+1}`, started from an arbitrary seed well
//! above both `n` and `|x|` and normalized with `J₀ + 2·Σ J₂ₖ = 1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Orders of headroom above `max(n, ⌈|x|⌉)` where the recurrence starts.
const START_MARGIN: usize = 20;

const RESCALE_ABOVE: f64 = 1e250;

fn start_order(n: usize, ax: f64) -> usize {
    let base = n.max(math::ceil(ax) as usize);
    // The fixed margin alone loses digits once |x| reaches a few tens; the
    // square-root term keeps the seed's relative weight below 1e-16 there.
    let extra = math::ceil(math::sqrt(40.0 * base as f64)) as usize;
    let m = base + START_MARGIN + extra;
    // even start keeps the normalization sum aligned
    m + (m & 1)
}

/// `J_0(x), …, J_n(x)`.
pub fn bessel_j_orders(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if !x.is_finite() {
        out.fill(f64::NAN);
        return out;
    }
    let ax = math::abs(x);
    let m = start_order(n, ax);
    let two_over_x = 2.0 / ax;

    let mut above = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k, arbitrary seed
    let mut norm = 0.0;
    for k in (1..=m).rev() {
        if k <= n {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let below = k as f64 * two_over_x * cur - above;
        above = cur;
        cur = below;
        if math::abs(cur) > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            cur *= s;
            above *= s;
            norm *= s;
            // orders below k are still zero, so scaling everything is fine
            for v in &mut out {
                *v *= s;
            }
        }
    }
    out[0] = cur;
    norm += cur;

    let inv = 1.0 / norm;
    for (k, v) in out.iter_mut().enumerate() {
        *v *= inv;
        if x < 0.0 && k % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// `J_n(x)` for any integer order, using `J₋ₙ = (−1)ⁿ Jₙ`.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let order = n.unsigned_abs() as usize;
    let v = bessel_j_orders(order, x)[order];
    if n < 0 && order % 2 == 1 {
        -v
    } else {
        v
    }
}
