//! Dormand-Prince 5(4) integrator with event location.

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    /// Steps are also capped at `h_rel·(1 + |r|)`.
    pub h_rel: f64,
    pub max_steps: usize,
}

/// An accepted node: position, state and state derivative.
#[derive(Debug, Clone, Copy)]
pub struct Node<const N: usize> {
    pub r: f64,
    pub y: [f64; N],
    pub dy: [f64; N],
}

/// What stopped the integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// Event function `index` crossed zero at the last node.
    Event(usize),
    /// The caller's end condition held at the last node.
    Done,
    /// Reached the right end of the interval.
    End,
    /// Step size underflow or step budget exhausted.
    Failed,
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn comb<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand-Prince step. Returns the fifth-order state, its derivative and
/// the embedded error vector.
pub fn dp_step<F, const N: usize>(f: &F, r: f64, y: &[f64; N], k1: &[f64; N], h: f64) -> ([f64; N], [f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k2 = f(r + h / 5.0, &comb(y, h, &[(A21, k1)]));
    let k3 = f(r + 0.3 * h, &comb(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(r + 0.8 * h, &comb(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(r + 8.0 / 9.0 * h, &comb(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = f(r + h, &comb(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y5 = comb(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(r + h, &y5);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y5, k7, err)
}

/// Integrates from `start` towards `r_end`, checking `events` (sign changes
/// from positive to non-positive) and `done` after every accepted step.
/// Event positions are refined by re-stepping from the previous node.
pub fn integrate<F, const N: usize>(
    f: &F,
    start: Node<N>,
    r_end: f64,
    opts: &OdeOptions,
    events: &[&dyn Fn(&[f64; N]) -> f64],
    done: &dyn Fn(&Node<N>) -> bool,
) -> (Vec<Node<N>>, Stop)
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut nodes = vec![start];
    let mut cur = start;
    let mut h = opts.h_init.min(opts.h_max);
    for _ in 0..opts.max_steps {
        if cur.r >= r_end {
            return (nodes, Stop::End);
        }
        let mut last = false;
        h = h.min(opts.h_rel * (1.0 + cur.r.abs()));
        if cur.r + h >= r_end {
            h = r_end - cur.r;
            last = true;
        }
        let (y5, k7, err) = dp_step(f, cur.r, &cur.y, &cur.dy, h);
        let mut norm = 0.0;
        let mut finite = true;
        for i in 0..N {
            let sc = opts.atol + opts.rtol * cur.y[i].abs().max(y5[i].abs());
            norm += (err[i] / sc).powi(2);
            finite &= y5[i].is_finite() && k7[i].is_finite();
        }
        let norm = (norm / N as f64).sqrt();
        if !finite || !(norm <= 1.0) {
            let shrink = if finite { (0.9 * norm.powf(-0.2)).max(0.1) } else { 0.25 };
            h *= shrink;
            if h <= 1e-15 * cur.r.abs().max(1e-300) || h < 1e-300 {
                return (nodes, Stop::Failed);
            }
            continue;
        }
        let next = Node { r: if last { r_end } else { cur.r + h }, y: y5, dy: k7 };
        // Events are sampled on the cubic Hermite interpolant so that a
        // shallow excursion inside one step is not missed.
        let hh = next.r - cur.r;
        for k in 1..=DENSE_SAMPLES {
            let t = k as f64 / DENSE_SAMPLES as f64;
            let y = if k == DENSE_SAMPLES { next.y } else { hermite(&cur, &next, hh, t) };
            if let Some(idx) = events.iter().position(|ev| ev(&y) <= 0.0) {
                let located = locate(f, &cur, t * hh, events[idx]);
                nodes.push(located);
                return (nodes, Stop::Event(idx));
            }
        }
        nodes.push(next);
        cur = next;
        if done(&cur) {
            return (nodes, Stop::Done);
        }
        if last {
            return (nodes, Stop::End);
        }
        let grow = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * grow).min(opts.h_max);
    }
    (nodes, Stop::Failed)
}

const DENSE_SAMPLES: usize = 8;

fn hermite<const N: usize>(a: &Node<N>, b: &Node<N>, h: f64, t: f64) -> [f64; N] {
    let t2 = t * t;
    let t3 = t2 * t;
    let mut y = [0.0; N];
    for i in 0..N {
        y[i] = (2.0 * t3 - 3.0 * t2 + 1.0) * a.y[i]
            + (t3 - 2.0 * t2 + t) * h * a.dy[i]
            + (-2.0 * t3 + 3.0 * t2) * b.y[i]
            + (t3 - t2) * h * b.dy[i];
    }
    y
}

/// Finds the first zero of `g` along the step from `cur` of length `h` by
/// bisection on the step length, returning the node at the crossing.
fn locate<F, const N: usize>(f: &F, cur: &Node<N>, h: f64, g: &dyn Fn(&[f64; N]) -> f64) -> Node<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut lo = 0.0;
    let mut hi = h;
    let mut best = {
        let (y, dy, _) = dp_step(f, cur.r, &cur.y, &cur.dy, h);
        Node { r: cur.r + h, y, dy }
    };
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (y, dy, _) = dp_step(f, cur.r, &cur.y, &cur.dy, mid);
        if g(&y) <= 0.0 {
            hi = mid;
            best = Node { r: cur.r + mid, y, dy };
        } else {
            lo = mid;
        }
    }
    best
}
