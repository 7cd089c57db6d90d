//! Explicit constructions: Steiner and λ-fold triple systems, transversal
//! designs from finite fields, and a few hard-coded small designs.

use super::{Design, DesignParams, TransversalDesign};
use crate::error::{Error, Result};

/// A Steiner triple system on `v ≡ 1, 3 (mod 6)` points.
///
/// `v ≡ 3` uses Bose's construction over `Z_{2t+1} × Z_3`, `v ≡ 1` uses
/// Skolem's over `Z_{2n} × Z_3` plus a point at infinity (the last point).
pub fn make_sts(v: usize) -> Result<Design> {
    let blocks = match v % 6 {
        3 => bose(v),
        1 if v >= 7 => skolem(v),
        _ => return Err(Error::InvalidParameters(format!("an STS({v}) needs v = 1 or 3 mod 6 and v >= 3"))),
    };
    Design::new(DesignParams::new(v, 3, 1)?, blocks)
}

fn sorted(mut b: Vec<usize>) -> Vec<usize> {
    b.sort_unstable();
    b
}

fn bose(v: usize) -> Vec<Vec<usize>> {
    let q = v / 3;
    let t = (q - 1) / 2;
    let point = |x: usize, i: usize| x + q * (i % 3);
    let op = |x: usize, y: usize| (x + y) * (t + 1) % q;
    let mut blocks: Vec<Vec<usize>> = (0..q).map(|x| vec![point(x, 0), point(x, 1), point(x, 2)]).collect();
    for i in 0..3 {
        for x in 0..q {
            for y in x + 1..q {
                blocks.push(sorted(vec![point(x, i), point(y, i), point(op(x, y), i + 1)]));
            }
        }
    }
    blocks
}

fn skolem(v: usize) -> Vec<Vec<usize>> {
    let n = (v - 1) / 6;
    let m = 2 * n;
    let inf = 6 * n;
    let point = |x: usize, i: usize| x + m * (i % 3);
    let half = |s: usize| if s.is_multiple_of(2) { s / 2 } else { n + s / 2 };
    let op = |x: usize, y: usize| half((x + y) % m);
    let mut blocks: Vec<Vec<usize>> = (0..n).map(|x| vec![point(x, 0), point(x, 1), point(x, 2)]).collect();
    for i in 0..3 {
        for x in 0..n {
            blocks.push(sorted(vec![point(x + n, i), point(x, i + 1), inf]));
        }
    }
    for i in 0..3 {
        for x in 0..m {
            for y in x + 1..m {
                blocks.push(sorted(vec![point(x, i), point(y, i), point(op(x, y), i + 1)]));
            }
        }
    }
    blocks
}

/// Every 3-subset of `0..v`, in lexicographic order.
pub fn all_triples(v: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for a in 0..v {
        for b in a + 1..v {
            for c in b + 1..v {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}

/// A nine-block list that looks like a TS(6,2) but is not a design: the pair
/// `{2,4}` appears three times and one block is missing.
pub fn flawed_ts62_blocks() -> Vec<Vec<usize>> {
    vec![
        vec![0, 1, 2],
        vec![0, 1, 3],
        vec![0, 2, 4],
        vec![0, 3, 5],
        vec![0, 4, 5],
        vec![1, 2, 4],
        vec![1, 4, 5],
        vec![2, 3, 4],
        vec![2, 3, 5],
    ]
}

/// A TS(6,2) whose blocks through 0 match the flawed list, so that `G[0]` is
/// the 5-cycle (1 2 4 5 3).
fn ts62_blocks() -> Vec<Vec<usize>> {
    vec![
        vec![0, 1, 2],
        vec![0, 1, 3],
        vec![0, 2, 4],
        vec![0, 3, 5],
        vec![0, 4, 5],
        vec![1, 3, 4],
        vec![1, 2, 5],
        vec![1, 4, 5],
        vec![2, 3, 4],
        vec![2, 3, 5],
    ]
}

/// A triple system TS(v, λ).
///
/// Supported: `v ≡ 1, 3 (mod 6)` (an STS repeated λ times), `v = 5` with
/// `3 | λ`, `v = 4` and `v = 6` with `2 | λ`.
pub fn make_ts(v: usize, lambda: usize) -> Result<Design> {
    let params = DesignParams::new(v, 3, lambda)?;
    if !params.is_admissible() {
        return Err(Error::InvalidParameters(format!("TS({v},{lambda}) is not admissible")));
    }
    let (base, copies) = match v % 6 {
        1 | 3 => (make_sts(v)?.blocks, lambda),
        _ if v == 5 => (all_triples(5), lambda / 3),
        _ if v == 4 => (all_triples(4), lambda / 2),
        _ if v == 6 => (ts62_blocks(), lambda / 2),
        _ => return Err(Error::Unsupported(format!("no construction for TS({v},{lambda})"))),
    };
    let blocks = (0..copies).flat_map(|_| base.iter().cloned()).collect();
    Design::new(params, blocks)
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Arithmetic of the field used to build a TD.
trait Field {
    fn order(&self) -> usize;
    fn add(&self, a: usize, b: usize) -> usize;
    fn mul(&self, a: usize, b: usize) -> usize;
}

struct Prime(usize);

impl Field for Prime {
    fn order(&self) -> usize {
        self.0
    }
    fn add(&self, a: usize, b: usize) -> usize {
        (a + b) % self.0
    }
    fn mul(&self, a: usize, b: usize) -> usize {
        a * b % self.0
    }
}

/// GF(4) = {0, 1, w, w+1} encoded as 0, 1, 2, 3; addition is XOR.
struct Gf4;

const GF4_MUL: [[usize; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];

impl Field for Gf4 {
    fn order(&self) -> usize {
        4
    }
    fn add(&self, a: usize, b: usize) -> usize {
        a ^ b
    }
    fn mul(&self, a: usize, b: usize) -> usize {
        GF4_MUL[a][b]
    }
}

fn groups(k: usize, n: usize) -> Vec<Vec<usize>> {
    (0..k).map(|g| (g * n..(g + 1) * n).collect()).collect()
}

/// Point `value` of group `g` is `g·n + value`. Block `(a, m)` takes value
/// `a + g·m` in group `g < n`, and value `m` in group `n` when `k = n + 1`.
fn field_td(f: &dyn Field, k: usize) -> Vec<Vec<usize>> {
    let n = f.order();
    let mut blocks = Vec::with_capacity(n * n);
    for m in 0..n {
        for a in 0..n {
            let mut block: Vec<usize> = (0..k.min(n)).map(|g| g * n + f.add(a, f.mul(g, m))).collect();
            if k == n + 1 {
                block.push(n * n + m);
            }
            blocks.push(block);
        }
    }
    blocks
}

/// Names of the 16 points of the built-in TD(4,4): groups `r`, `c`, `a`
/// (for α) and `b` (for β), each numbered 1 to 4.
pub fn td44_labels() -> Vec<String> {
    ["r", "c", "a", "b"].iter().flat_map(|g| (1..=4).map(move |i| format!("{g}{i}"))).collect()
}

/// The TD(4,4) block table, four parallel classes of four blocks.
const TD44: [[&str; 4]; 16] = [
    ["r1", "c1", "a1", "b1"],
    ["r4", "c2", "a3", "b4"],
    ["r2", "c3", "a4", "b2"],
    ["r3", "c4", "a2", "b3"],
    ["r3", "c3", "a1", "b4"],
    ["r1", "c2", "a2", "b2"],
    ["r4", "c1", "a4", "b3"],
    ["r2", "c4", "a3", "b1"],
    ["r2", "c1", "a2", "b4"],
    ["r3", "c2", "a4", "b1"],
    ["r1", "c3", "a3", "b3"],
    ["r4", "c4", "a1", "b2"],
    ["r3", "c1", "a3", "b2"],
    ["r2", "c2", "a1", "b3"],
    ["r4", "c3", "a2", "b1"],
    ["r1", "c4", "a4", "b4"],
];

fn td44_blocks() -> Vec<Vec<usize>> {
    let labels = td44_labels();
    TD44.iter().map(|b| b.iter().map(|p| labels.iter().position(|l| l == p).expect("label")).collect()).collect()
}

/// A transversal design TD(k, n).
///
/// Supported: `n = 1`, `k = 2`, prime `n` with `k ≤ n + 1`, and `n = 4` with
/// `k ≤ 5`; `(4, 4)` is the fixed block table of [`td44_labels`].
pub fn make_td(k: usize, n: usize) -> Result<TransversalDesign> {
    if k < 2 || n < 1 {
        return Err(Error::InvalidParameters(format!("TD({k},{n}) needs k >= 2 and n >= 1")));
    }
    let blocks = if n == 1 {
        vec![(0..k).collect()]
    } else if k == 2 {
        (0..n).flat_map(|a| (0..n).map(move |b| vec![a, n + b])).collect()
    } else if (k, n) == (4, 4) {
        td44_blocks()
    } else if is_prime(n) && k <= n + 1 {
        field_td(&Prime(n), k)
    } else if n == 4 && k <= 5 {
        field_td(&Gf4, k)
    } else {
        return Err(Error::Unsupported(format!("no construction for TD({k},{n})")));
    };
    TransversalDesign::new(k, n, groups(k, n), blocks)
}

/// The TD(3, n) of the cyclic Latin square: blocks `{(0,a), (1,b), (2,a+b)}`.
pub fn cyclic_td3(n: usize) -> Result<TransversalDesign> {
    if n < 1 {
        return Err(Error::InvalidParameters("n must be positive".into()));
    }
    let blocks = (0..n).flat_map(|a| (0..n).map(move |b| vec![a, n + b, 2 * n + (a + b) % n])).collect();
    TransversalDesign::new(3, n, groups(3, n), blocks)
}
