//! Bottleneck distance between barcodes.

use super::barcode::Barcode;

/// L∞ cost of matching two finite bars.
fn pair_cost(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn diag_cost(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Kuhn augmenting path search on an implicit bipartite graph.
fn perfect_matching(n: usize, adj: &dyn Fn(usize, usize) -> bool) -> bool {
    let mut match_right = vec![usize::MAX; n];
    fn augment(
        u: usize,
        n: usize,
        adj: &dyn Fn(usize, usize) -> bool,
        seen: &mut [bool],
        match_right: &mut [usize],
    ) -> bool {
        for v in 0..n {
            if !seen[v] && adj(u, v) {
                seen[v] = true;
                if match_right[v] == usize::MAX
                    || augment(match_right[v], n, adj, seen, match_right)
                {
                    match_right[v] = u;
                    return true;
                }
            }
        }
        false
    }
    for u in 0..n {
        let mut seen = vec![false; n];
        if !augment(u, n, adj, &mut seen, &mut match_right) {
            return false;
        }
    }
    true
}

/// Bottleneck distance between finite parts, with diagonal matching.
pub fn finite_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    if n == 0 {
        return 0.0;
    }
    let mut candidates: Vec<f64> = vec![0.0];
    candidates.extend(a.iter().map(|&x| diag_cost(x)));
    candidates.extend(b.iter().map(|&x| diag_cost(x)));
    for &x in a {
        for &y in b {
            candidates.push(pair_cost(x, y));
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // Left: bars of a, then diagonal copies of b. Right: bars of b, then
    // diagonal copies of a.
    let feasible = |r: f64| {
        let adj = |u: usize, v: usize| -> bool {
            match (u < na, v < nb) {
                (true, true) => pair_cost(a[u], b[v]) <= r,
                (true, false) => v - nb == u && diag_cost(a[u]) <= r,
                (false, true) => u - na == v && diag_cost(b[v]) <= r,
                (false, false) => true,
            }
        };
        perfect_matching(n, &adj)
    };
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Bottleneck distance; infinite bars are matched by birth and infinite if
/// their counts differ.
pub fn bottleneck_distance(x: &Barcode, y: &Barcode) -> f64 {
    let mut ix = x.expanded_infinite();
    let mut iy = y.expanded_infinite();
    if ix.len() != iy.len() {
        return f64::INFINITY;
    }
    ix.sort_by(f64::total_cmp);
    iy.sort_by(f64::total_cmp);
    let inf_part = ix
        .iter()
        .zip(&iy)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    inf_part.max(finite_bottleneck(
        &x.expanded_finite(),
        &y.expanded_finite(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bar_against_nothing() {
        assert_eq!(finite_bottleneck(&[(0.0, 1.0)], &[]), 0.5);
    }

    #[test]
    fn shifted_bar() {
        assert!((finite_bottleneck(&[(0.0, 4.0)], &[(0.25, 4.5)]) - 0.5).abs() < 1e-15);
    }
}
