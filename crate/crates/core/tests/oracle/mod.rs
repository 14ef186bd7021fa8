//! Reference implementations used to cross-check the library. Each is coded
//! from the definitions, shares no code with the crate, and favours
//! obviousness over speed.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Least common multiple of 1..=10, so block means squared share a denominator.
pub const LCM_TO_10: i64 = 2520;

/// Minimum isotonic squared error of an integer sequence (length ≤ 10), as an
/// exact integer scaled by 2520. Enumerates every partition into contiguous
/// blocks whose means are non-decreasing.
pub fn isotonic_min_sse_scaled(values: &[i64]) -> i64 {
    assert!(values.len() <= 10);
    let total_sq: i64 = values.iter().map(|v| v * v).sum();
    // SSE = Σv² − Σ_blocks S²/L, so minimizing SSE maximizes Σ S²/L.
    fn best(values: &[i64], start: usize, prev: Option<(i64, i64)>) -> Option<i64> {
        if start == values.len() {
            return Some(0);
        }
        let mut top: Option<i64> = None;
        let mut sum = 0;
        for end in start + 1..=values.len() {
            sum += values[end - 1];
            let len = (end - start) as i64;
            if let Some((ps, pl)) = prev {
                // Require ps/pl <= sum/len.
                if ps * len > sum * pl {
                    continue;
                }
            }
            if let Some(rest) = best(values, end, Some((sum, len))) {
                let here = sum * sum * (LCM_TO_10 / len) + rest;
                top = Some(top.map_or(here, |t: i64| t.max(here)));
            }
        }
        top
    }
    total_sq * LCM_TO_10 - best(values, 0, None).expect("a single block is always feasible")
}

/// Exact scaled squared error of a fitted sequence whose values are block
/// means of integer inputs: splits the fit into runs of equal values.
pub fn level_set_sse_scaled(values: &[i64], fitted: &[f64]) -> i64 {
    let total_sq: i64 = values.iter().map(|v| v * v).sum();
    let mut gain = 0;
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && fitted[end] == fitted[start] {
            end += 1;
        }
        let sum: i64 = values[start..end].iter().sum();
        let len = (end - start) as i64;
        gain += sum * sum * (LCM_TO_10 / len);
        start = end;
    }
    total_sq * LCM_TO_10 - gain
}

/// Isotonic fit by exhaustive search over level-set partitions, organised as
/// a table over (last block start, prefix end) so that it stays polynomial.
pub fn isotonic_by_partitions(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mean = |s: usize, e: usize| values[s..e].iter().sum::<f64>() / (e - s) as f64;
    let sse = |s: usize, e: usize| {
        let m = mean(s, e);
        values[s..e].iter().map(|v| (v - m) * (v - m)).sum::<f64>()
    };
    // cost[s][e]: best SSE of values[..e] whose last block is s..e.
    let mut cost = vec![vec![f64::INFINITY; n + 1]; n + 1];
    let mut back = vec![vec![usize::MAX; n + 1]; n + 1];
    for e in 1..=n {
        cost[0][e] = sse(0, e);
        for s in 1..e {
            let m = mean(s, e);
            for p in 0..s {
                if cost[p][s].is_finite() && mean(p, s) <= m + 1e-15 {
                    let c = cost[p][s] + sse(s, e);
                    if c < cost[s][e] {
                        cost[s][e] = c;
                        back[s][e] = p;
                    }
                }
            }
        }
    }
    let mut s = (0..n).min_by(|&a, &b| cost[a][n].total_cmp(&cost[b][n])).unwrap();
    let mut e = n;
    let mut fitted = vec![0.0; n];
    loop {
        let m = mean(s, e);
        fitted[s..e].iter_mut().for_each(|f| *f = m);
        if s == 0 {
            break;
        }
        let p = back[s][e];
        e = s;
        s = p;
    }
    fitted
}

/// Hop distances by Floyd–Warshall.
pub fn hop_distances(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<u64>> {
    let inf = u64::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in edges {
        d[a][b] = 1;
        d[b][a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Kruskal stress-1 computed from scratch: pairs sorted by hop distance then
/// drawn distance, disparities from [`isotonic_by_partitions`].
pub fn kruskal_reference(n: usize, edges: &[(usize, usize)], pos: &[[f64; 2]]) -> f64 {
    let hops = hop_distances(n, edges);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dx = pos[i][0] - pos[j][0];
            let dy = pos[i][1] - pos[j][1];
            pairs.push((hops[i][j], (dx * dx + dy * dy).sqrt()));
        }
    }
    pairs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap()));
    let drawn: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let fit = isotonic_by_partitions(&drawn);
    let num: f64 = drawn.iter().zip(&fit).map(|(x, f)| (x - f) * (x - f)).sum();
    let den: f64 = drawn.iter().map(|x| x * x).sum();
    (num / den).sqrt()
}

fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite coordinate")
}

fn cross(ax: &BigRational, ay: &BigRational, bx: &BigRational, by: &BigRational) -> BigRational {
    ax * by - ay * bx
}

/// Whether closed segments p1p2 and q1q2 share a point, decided in exact
/// rational arithmetic by solving p1 + t(p2 − p1) = q1 + u(q2 − q1).
pub fn segments_meet_exact(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let (px, py) = (rational(p1[0]), rational(p1[1]));
    let (rx, ry) = (rational(p2[0]) - &px, rational(p2[1]) - &py);
    let (qx, qy) = (rational(q1[0]), rational(q1[1]));
    let (sx, sy) = (rational(q2[0]) - &qx, rational(q2[1]) - &qy);
    let (wx, wy) = (&qx - &px, &qy - &py);
    let denom = cross(&rx, &ry, &sx, &sy);
    let zero = BigRational::zero();
    let one = BigRational::from_integer(BigInt::from(1));
    if !denom.is_zero() {
        let t = cross(&wx, &wy, &sx, &sy) / &denom;
        let u = cross(&wx, &wy, &rx, &ry) / &denom;
        return t >= zero && t <= one && u >= zero && u <= one;
    }
    if !cross(&wx, &wy, &rx, &ry).is_zero() {
        return false;
    }
    // Parallel and collinear. A zero-length segment is a point, so project
    // onto whichever segment has extent.
    let rr = &rx * &rx + &ry * &ry;
    if rr.is_zero() {
        let ss = &sx * &sx + &sy * &sy;
        if ss.is_zero() {
            return wx.is_zero() && wy.is_zero();
        }
        if !cross(&wx, &wy, &sx, &sy).is_zero() {
            return false;
        }
        let t = -(&wx * &sx + &wy * &sy) / &ss;
        return t >= zero && t <= one;
    }
    let t0 = (&wx * &rx + &wy * &ry) / &rr;
    let t1 = (((&wx + &sx) * &rx) + ((&wy + &sy) * &ry)) / &rr;
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    !(hi < zero || lo > one)
}

/// Crossing count: unordered edge pairs with no shared endpoint that meet.
pub fn crossings_reference(edges: &[(usize, usize)], pos: &[[f64; 2]]) -> u64 {
    let mut count = 0;
    for a in 0..edges.len() {
        for b in a + 1..edges.len() {
            let (u, v) = edges[a];
            let (x, y) = edges[b];
            if u == x || u == y || v == x || v == y {
                continue;
            }
            if segments_meet_exact(pos[u], pos[v], pos[x], pos[y]) {
                count += 1;
            }
        }
    }
    count
}

/// Simple 4-cycles, counted by enumerating node orderings a-b-c-d-a and
/// dividing out the 8 rotations and reflections of each cycle.
pub fn four_cycles_reference(n: usize, edges: &[(usize, usize)]) -> u64 {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let mut ordered = 0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let distinct = a != b && a != c && a != d && b != c && b != d && c != d;
                    if distinct && adj[a][b] && adj[b][c] && adj[c][d] && adj[d][a] {
                        ordered += 1;
                    }
                }
            }
        }
    }
    ordered / 8
}

/// Node uniformity over the unit square grown to include every node.
pub fn uniformity_reference(pos: &[[f64; 2]]) -> f64 {
    let n = pos.len();
    let mut k = 1;
    while k * k < n {
        k += 1;
    }
    let lo_x = pos.iter().map(|p| p[0]).fold(0.0, f64::min);
    let hi_x = pos.iter().map(|p| p[0]).fold(1.0, f64::max);
    let lo_y = pos.iter().map(|p| p[1]).fold(0.0, f64::min);
    let hi_y = pos.iter().map(|p| p[1]).fold(1.0, f64::max);
    let bin = |v: f64, lo: f64, hi: f64| {
        let w = (hi - lo) / k as f64;
        (0..k).find(|&i| v < lo + (i + 1) as f64 * w).unwrap_or(k - 1)
    };
    let mut hist = vec![vec![0usize; k]; k];
    for p in pos {
        hist[bin(p[0], lo_x, hi_x)][bin(p[1], lo_y, hi_y)] += 1;
    }
    let expect = n as f64 / (k * k) as f64;
    let mut tv = 0.0;
    for row in &hist {
        for &c in row {
            tv += (c as f64 - expect).abs();
        }
    }
    tv /= 2.0;
    1.0 - tv / (n as f64 * (1.0 - 1.0 / (k * k) as f64))
}

/// Scale minimizing Σ((s·x − d)/d)² by golden-section search on [lo, hi].
pub fn golden_section_scale(pairs: &[(f64, f64)], mut lo: f64, mut hi: f64) -> f64 {
    let f = |s: f64| pairs.iter().map(|&(x, d)| ((s * x - d) / d).powi(2)).sum::<f64>();
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..200 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    (lo + hi) / 2.0
}

/// Textbook two-pass Pearson coefficient.
pub fn pearson_reference(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Uniform random points in the unit square.
pub fn random_layout(n: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect()
}

/// A random connected graph: a random spanning tree plus extra edges, kept
/// under 2n edges.
pub fn random_connected_edges(n: usize, extra: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.insert((u, v));
    }
    let mut tries = 0;
    while edges.len() < (n - 1 + extra).min(2 * n - 1) && tries < 10 * n * n {
        tries += 1;
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    edges.into_iter().collect()
}
